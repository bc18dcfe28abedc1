//! Negativity of two-term superposition states.
//!
//! Two routes are provided. The dense route builds `rho = |psi><psi|`, takes
//! the partial transpose on a site subset and sums the absolute eigenvalues.
//! The Schmidt route uses the fact that `w1|b1> + w2|b2>` has Schmidt rank at
//! most 2 across any cut: the state is a product across the cut unless `b1`
//! and `b2` differ on both sides, in which case the negativity is `|w1||w2|`.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::state::{
    build_amplitude_vector, AmplitudeVector, BasisState, SuperpositionSpec, DENSE_CAP,
};

/// Largest tolerated Hermiticity defect before a matrix is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Off-diagonal norm at which the Jacobi sweeps stop.
pub const EIGEN_TOL: f64 = 1e-12;

/// Dense `2^n x 2^n` complex matrix on `n` sites, row-major.
///
/// Also used for partial transposes, which stay Hermitian but need not be
/// positive.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dense_sites(n)?;
        let dim = 1usize << n;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: entries.len(), right: dim * dim });
        }
        Ok(Self { n, entries })
    }

    pub fn from_pure(psi: &AmplitudeVector) -> Result<Self> {
        let n = psi.n();
        check_dense_sites(n)?;
        let amps = psi.amplitudes();
        let dim = amps.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        // only the support contributes
        let support: Vec<usize> = psi.support().into_iter().collect();
        for &r in &support {
            for &c in &support {
                entries[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_spec(spec: &SuperpositionSpec) -> Result<Self> {
        Self::from_pure(&build_amplitude_vector(spec)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `max |A - A^H|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        hermitian_eigenvalues(&self.entries, self.dim(), EIGEN_TOL)
    }
}

fn check_dense_sites(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::SiteCount { n, min: 1, max: DENSE_CAP });
    }
    if n > DENSE_CAP {
        return Err(Error::SizeCap { what: "dense density matrix", n, cap: DENSE_CAP });
    }
    Ok(())
}

/// Basis-index mask of a site subset; rejects out-of-range and repeated sites.
fn subset_mask(n: usize, subset: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    for &site in subset {
        if site >= n {
            return Err(Error::InvalidSubset(format!("site {site} outside 0..{n}")));
        }
        let bit = BasisState::site_bit(n, site);
        if mask & bit != 0 {
            return Err(Error::InvalidSubset(format!("site {site} listed twice")));
        }
        mask |= bit;
    }
    Ok(mask)
}

/// Transposes the indices of the sites in `subset`.
pub fn partial_transpose(rho: &DensityMatrix, subset: &[usize]) -> Result<DensityMatrix> {
    let mask = subset_mask(rho.n, subset)? as usize;
    let dim = rho.dim();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let value = rho.entries[r * dim + c];
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            let r2 = (r & !mask) | (c & mask);
            let c2 = (c & !mask) | (r & mask);
            entries[r2 * dim + c2] = value;
        }
    }
    Ok(DensityMatrix { n: rho.n, entries })
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &DensityMatrix) -> Result<f64> {
    Ok(m.eigenvalues()?.iter().map(|x| x.abs()).sum())
}

/// `(||rho^T_A||_1 - 1) / 2` with the transpose taken on `subset`.
pub fn negativity(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    let defect = rho.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let norm = trace_norm(&partial_transpose(rho, subset)?)?;
    Ok(((norm - 1.0) / 2.0).max(0.0))
}

/// Exact negativity of a two-term pure state across `subset | rest`.
pub fn schmidt_negativity(spec: &SuperpositionSpec, subset: &[usize]) -> Result<f64> {
    let n = spec.n();
    let mask = subset_mask(n, subset)?;
    let rest = !mask & spec.b1().full_mask();
    let diff = spec.b1().index() ^ spec.b2().index();
    if diff & mask == 0 || diff & rest == 0 {
        return Ok(0.0);
    }
    Ok(spec.w1().norm() * spec.w2().norm())
}

/// Negativity of every single-site cut and their average.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativityReport {
    pub per_cut: Vec<f64>,
    pub avg_raw: f64,
    /// `2 * avg_raw`, so an `n`-site GHZ state scores 1.
    pub avg_normalized: f64,
}

impl NegativityReport {
    pub fn from_cuts(per_cut: Vec<f64>) -> Self {
        let avg_raw = per_cut.iter().sum::<f64>() / per_cut.len() as f64;
        Self { per_cut, avg_raw, avg_normalized: 2.0 * avg_raw }
    }
}

pub fn negativity_report(spec: &SuperpositionSpec) -> NegativityReport {
    let cuts = (0..spec.n())
        .map(|i| schmidt_negativity(spec, &[i]).expect("single site in range"))
        .collect();
    NegativityReport::from_cuts(cuts)
}

/// Same report computed on the dense partial-transpose route.
pub fn dense_negativity_report(spec: &SuperpositionSpec) -> Result<NegativityReport> {
    let rho = DensityMatrix::from_spec(spec)?;
    let cuts = (0..spec.n()).map(|i| negativity(&rho, &[i])).collect::<Result<Vec<_>>>()?;
    Ok(NegativityReport::from_cuts(cuts))
}

/// Equal-weight GHZ cluster on `placement` with the other sites fixed.
///
/// `fixed` lists `(site, excited)` for every site outside `placement`.
pub fn ghz_state(
    n_entangled: usize,
    total: usize,
    placement: &[usize],
    fixed: &[(usize, bool)],
) -> Result<SuperpositionSpec> {
    if placement.len() != n_entangled || n_entangled > total {
        return Err(Error::InvalidPlacement(format!(
            "{} placement sites for a {n_entangled}-site cluster in {total} sites",
            placement.len()
        )));
    }
    let mut slots: Vec<Option<(bool, bool)>> = vec![None; total];
    for &site in placement {
        match slots.get_mut(site) {
            Some(slot @ None) => *slot = Some((true, false)),
            _ => return Err(Error::InvalidPlacement(format!("placement site {site}"))),
        }
    }
    for &(site, excited) in fixed {
        match slots.get_mut(site) {
            Some(slot @ None) => *slot = Some((excited, excited)),
            _ => return Err(Error::InvalidPlacement(format!("fixed site {site}"))),
        }
    }
    let (mut first, mut second) = (Vec::with_capacity(total), Vec::with_capacity(total));
    for (site, slot) in slots.into_iter().enumerate() {
        let (a, b) =
            slot.ok_or_else(|| Error::InvalidPlacement(format!("site {site} not covered")))?;
        first.push(a);
        second.push(b);
    }
    SuperpositionSpec::equal_weight(BasisState::from_flags(&first)?, BasisState::from_flags(&second)?)
}

/// Traces out one site, returning the `(n - 1)`-site state.
pub fn partial_trace(rho: &DensityMatrix, site: usize) -> Result<DensityMatrix> {
    let n = rho.n;
    if site >= n || n < 2 {
        return Err(Error::InvalidSite { site, n });
    }
    let bit = 1usize << (n - 1 - site);
    let low = bit - 1;
    let reduced_dim = 1usize << (n - 1);
    let expand = |i: usize, v: usize| ((i & !low) << 1) | (v * bit) | (i & low);
    let dim = rho.dim();
    let mut entries = vec![Complex64::new(0.0, 0.0); reduced_dim * reduced_dim];
    for r in 0..reduced_dim {
        for c in 0..reduced_dim {
            entries[r * reduced_dim + c] = (0..2)
                .map(|v| rho.entries[expand(r, v) * dim + expand(c, v)])
                .sum();
        }
    }
    Ok(DensityMatrix { n: n - 1, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BasisState {
        s.parse().unwrap()
    }

    fn bell() -> SuperpositionSpec {
        SuperpositionSpec::equal_weight(bs("ee"), bs("gg")).unwrap()
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn partial_transpose_examples() {
        let rho = DensityMatrix::from_spec(&bell()).unwrap();
        assert_eq!(partial_transpose(&rho, &[]).unwrap(), rho);

        let pt = partial_transpose(&rho, &[0]).unwrap();
        let ev = sorted(pt.eigenvalues().unwrap());
        for (got, want) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
        assert_eq!(partial_transpose(&pt, &[0]).unwrap(), rho);

        // product of single-site states stays positive
        let product = SuperpositionSpec::equal_weight(bs("ee"), bs("eg")).unwrap();
        let pt = partial_transpose(&DensityMatrix::from_spec(&product).unwrap(), &[0]).unwrap();
        assert!(pt.eigenvalues().unwrap().iter().all(|&x| x > -1e-12));

        assert!(partial_transpose(&rho, &[2]).is_err());
        assert!(partial_transpose(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn negativity_examples() {
        let rho = DensityMatrix::from_spec(&bell()).unwrap();
        assert!((negativity(&rho, &[0]).unwrap() - 0.5).abs() < 1e-12);

        let ghz3 = SuperpositionSpec::equal_weight(bs("eee"), bs("ggg")).unwrap();
        let rho = DensityMatrix::from_spec(&ghz3).unwrap();
        for cut in 0..3 {
            assert!((negativity(&rho, &[cut]).unwrap() - 0.5).abs() < 1e-12);
        }

        let rho = DensityMatrix::from_spec(&SuperpositionSpec::single(bs("egg"))).unwrap();
        assert!(negativity(&rho, &[1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let z = Complex64::new(0.0, 0.0);
        let m = DensityMatrix::from_entries(1, vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0), z, z])
            .unwrap();
        assert!(matches!(negativity(&m, &[0]), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn schmidt_examples() {
        let s = SuperpositionSpec::equal_weight(bs("eeeg"), bs("ggeg")).unwrap();
        assert!((schmidt_negativity(&s, &[0]).unwrap() - 0.5).abs() < 1e-15);

        let s = SuperpositionSpec::equal_weight(bs("eeg"), bs("geg")).unwrap();
        assert_eq!(schmidt_negativity(&s, &[1]).unwrap(), 0.0);

        let s = SuperpositionSpec::with_probability(bs("eeg"), bs("gge"), 0.64).unwrap();
        for cut in 0..3 {
            let fast = schmidt_negativity(&s, &[cut]).unwrap();
            assert!((fast - 0.48).abs() < 1e-15);
            let dense = negativity(&DensityMatrix::from_spec(&s).unwrap(), &[cut]).unwrap();
            assert!((dense - 0.48).abs() < 1e-10);
        }
    }

    #[test]
    fn report_examples() {
        let ghz = SuperpositionSpec::equal_weight(bs("eeeee"), bs("ggggg")).unwrap();
        assert!((negativity_report(&ghz).avg_normalized - 1.0).abs() < 1e-15);

        let single = SuperpositionSpec::single(bs("egge"));
        assert_eq!(negativity_report(&single).avg_normalized, 0.0);

        let s = SuperpositionSpec::equal_weight(bs("eeeg"), bs("ggeg")).unwrap();
        let report = negativity_report(&s);
        for (got, want) in report.per_cut.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((report.avg_normalized - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ghz_examples() {
        let g = ghz_state(3, 3, &[0, 1, 2], &[]).unwrap();
        assert_eq!((g.b1(), g.b2()), (bs("ggg"), bs("eee")));

        let g = ghz_state(2, 4, &[0, 1], &[(2, true), (3, false)]).unwrap();
        assert_eq!((g.b1(), g.b2()), (bs("ggeg"), bs("eeeg")));

        let lone = ghz_state(1, 3, &[1], &[(0, true), (2, false)]).unwrap();
        assert_eq!(negativity_report(&lone).per_cut, vec![0.0; 3]);

        assert!(ghz_state(2, 3, &[0, 1], &[]).is_err());
        assert!(ghz_state(2, 3, &[0], &[(1, true), (2, true)]).is_err());
        assert!(ghz_state(1, 2, &[0], &[(0, true), (1, true)]).is_err());
        assert!(ghz_state(1, 2, &[5], &[(1, true)]).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let s = SuperpositionSpec::equal_weight(bs("eeg"), bs("geg")).unwrap();
        let reduced = partial_trace(&DensityMatrix::from_spec(&s).unwrap(), 2).unwrap();
        let want = SuperpositionSpec::equal_weight(bs("ee"), bs("ge")).unwrap();
        assert!(reduced.max_abs_diff(&DensityMatrix::from_spec(&want).unwrap()) < 1e-15);

        let rho = DensityMatrix::from_spec(&bell()).unwrap();
        for site in 0..2 {
            let r = partial_trace(&rho, site).unwrap();
            assert!((r.get(0, 0).re - 0.5).abs() < 1e-15);
            assert!((r.get(1, 1).re - 0.5).abs() < 1e-15);
            assert_eq!(r.get(0, 1), Complex64::new(0.0, 0.0));
        }
        assert!(partial_trace(&rho, 2).is_err());
        let one = DensityMatrix::from_spec(&SuperpositionSpec::single(bs("e"))).unwrap();
        assert!(partial_trace(&one, 0).is_err());
    }

    #[test]
    fn dense_cap() {
        let big = SuperpositionSpec::single(BasisState::all_ground(11).unwrap());
        assert!(matches!(DensityMatrix::from_spec(&big), Err(Error::SizeCap { .. })));
    }
}
