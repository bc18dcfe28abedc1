//! Local magnetizations, the average magnetization and the Edwards-Anderson
//! order parameter of two-term superposition states.
//!
//! The measured operator is `scale * sigma^z` per site (default scale 1/2).
//! It is diagonal, so for `b1 != b2` the cross terms `<b1|sigma^z_i|b2>` vanish
//! and the expectation only sees the weight squares.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{AmplitudeVector, BasisState, ClusterDecomposition, SuperpositionSpec};

/// Values with magnitude below this are treated as zero when classifying.
pub const ZERO_TOL: f64 = 1e-9;

/// Spin magnitude per site.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct SpinScale(f64);

impl SpinScale {
    pub const HALF: SpinScale = SpinScale(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSpinScale(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Largest attainable `q_ea`, reached by every single basis state.
    pub fn q_max(self) -> f64 {
        self.0 * self.0
    }
}

impl Default for SpinScale {
    fn default() -> Self {
        Self::HALF
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservablesRecord {
    pub m_local: Vec<f64>,
    /// Average magnetization.
    pub m: f64,
    /// Edwards-Anderson order parameter, mean squared local magnetization.
    pub q_ea: f64,
}

impl ObservablesRecord {
    pub fn from_local(m_local: Vec<f64>) -> Self {
        let n = m_local.len() as f64;
        let m = m_local.iter().sum::<f64>() / n;
        let q_ea = m_local.iter().map(|x| x * x).sum::<f64>() / n;
        Self { m_local, m, q_ea }
    }

    /// `q_ea / q_max`, in `[0, 1]`.
    pub fn q_normalized(&self, scale: SpinScale) -> f64 {
        self.q_ea / scale.q_max()
    }
}

pub fn local_magnetization(spec: &SuperpositionSpec, scale: SpinScale) -> Vec<f64> {
    let (p1, p2) = (spec.w1().norm_sqr(), spec.w2().norm_sqr());
    let (b1, b2) = (spec.b1(), spec.b2());
    (0..spec.n())
        .map(|i| (p1 * f64::from(b1.spin(i)) + p2 * f64::from(b2.spin(i))) * scale.value())
        .collect()
}

pub fn observables(spec: &SuperpositionSpec, scale: SpinScale) -> ObservablesRecord {
    ObservablesRecord::from_local(local_magnetization(spec, scale))
}

/// Observables from the cluster decomposition alone, with `p = |w1|^2`.
///
/// Agree sites carry the full `±scale`; each differ site carries
/// `±(2p - 1) scale`, positive where `b1` is excited.
pub fn closed_form_observables(
    dec: &ClusterDecomposition,
    p: f64,
    scale: SpinScale,
) -> Result<ObservablesRecord> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let s = scale.value();
    let mut m_local = vec![0.0; dec.n];
    for &i in &dec.agree_e {
        m_local[i] = s;
    }
    for &i in &dec.agree_g {
        m_local[i] = -s;
    }
    let skew = (2.0 * p - 1.0) * s;
    for (&i, &b1_excited) in dec.differ.iter().zip(&dec.pattern) {
        m_local[i] = if b1_excited { skew } else { -skew };
    }
    Ok(ObservablesRecord::from_local(m_local))
}

/// Equal-weight shortcut: `(q_ea, m)` from the agree-set sizes.
pub fn equal_weight_order_parameters(
    n: usize,
    agree_e: usize,
    agree_g: usize,
    scale: SpinScale,
) -> (f64, f64) {
    let s = scale.value();
    let n = n as f64;
    let q = (agree_e + agree_g) as f64 * s * s / n;
    let m = (agree_e as f64 - agree_g as f64) * s / n;
    (q, m)
}

/// `<psi| scale * sigma^z_i |psi>` summed over the full amplitude vector.
pub fn dense_local_magnetization(psi: &AmplitudeVector, scale: SpinScale) -> Vec<f64> {
    let n = psi.n();
    let mut out = vec![0.0; n];
    for (index, a) in psi.amplitudes().iter().enumerate() {
        let weight = a.norm_sqr();
        if weight == 0.0 {
            continue;
        }
        let b = BasisState::new(n, index as u64).expect("index within 2^n");
        for (site, slot) in out.iter_mut().enumerate() {
            *slot += weight * f64::from(b.spin(site));
        }
    }
    out.iter().map(|x| x * scale.value()).collect()
}
