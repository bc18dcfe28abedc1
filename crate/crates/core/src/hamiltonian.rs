//! All-to-all Ising Hamiltonian `H = -sum_{i<k} J_ik s_i s_k` with quenched
//! Gaussian couplings.
//!
//! Energies use Pauli eigenvalues `s = ±1`, unlike the spin-1/2 scale of the
//! observables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{BasisState, SuperpositionSpec};

/// Largest `n` for exhaustive ground-state enumeration.
pub const EXHAUSTIVE_CAP: usize = 16;

/// Symmetric coupling matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    j: Vec<f64>,
    j_scale: f64,
    seed: Option<u64>,
}

impl CouplingMatrix {
    /// Builds couplings from `f(i, k)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::SiteCount { n, min: 2, max: usize::MAX });
        }
        let mut j = vec![0.0; n * n];
        for i in 0..n {
            for k in (i + 1)..n {
                let v = f(i, k);
                j[i * n + k] = v;
                j[k * n + i] = v;
            }
        }
        Ok(Self { n, j, j_scale: 1.0, seed: None })
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::from_fn(n, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    pub fn j_scale(&self) -> f64 {
        self.j_scale
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Upper-triangle entries `(i, k, J_ik)` in row-major order.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |k| (i, k, self.get(i, k))))
    }

    pub fn abs_sum(&self) -> f64 {
        self.bonds().map(|(_, _, v)| v.abs()).sum()
    }
}

/// Draws every upper-triangle coupling from `Normal(0, j_scale^2 / n)`.
///
/// Uses ChaCha8 seeded with `seed` and `rand_distr`'s normal sampler, so the
/// matrix is reproducible for a given seed and crate version.
pub fn sample_couplings(n: usize, j_scale: f64, seed: u64) -> Result<CouplingMatrix> {
    if n < 2 {
        return Err(Error::SiteCount { n, min: 2, max: usize::MAX });
    }
    let normal = Normal::new(0.0, j_scale / (n as f64).sqrt())
        .map_err(|e| Error::Parse(format!("coupling scale {j_scale}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CouplingMatrix::from_fn(n, |_, _| normal.sample(&mut rng))?;
    m.j_scale = j_scale;
    m.seed = Some(seed);
    Ok(m)
}

pub fn energy(b: BasisState, j: &CouplingMatrix) -> Result<f64> {
    if b.n() != j.n {
        return Err(Error::DimensionMismatch { left: b.n(), right: j.n });
    }
    let spins: Vec<f64> = (0..b.n()).map(|i| f64::from(b.spin(i))).collect();
    Ok(-j.bonds().map(|(i, k, v)| v * spins[i] * spins[k]).sum::<f64>())
}

/// `|w1|^2 E(b1) + |w2|^2 E(b2)`; no cross terms since `H` is diagonal.
pub fn expectation_energy(spec: &SuperpositionSpec, j: &CouplingMatrix) -> Result<f64> {
    if spec.is_single() {
        return energy(spec.b1(), j);
    }
    Ok(spec.w1().norm_sqr() * energy(spec.b1(), j)? + spec.w2().norm_sqr() * energy(spec.b2(), j)?)
}

/// Minimum energy and every basis state attaining it (within `1e-12`).
pub fn ground_states(j: &CouplingMatrix) -> Result<(f64, Vec<BasisState>)> {
    if j.n > EXHAUSTIVE_CAP {
        return Err(Error::SizeCap { what: "exhaustive energy enumeration", n: j.n, cap: EXHAUSTIVE_CAP });
    }
    let energies = BasisState::all(j.n)?
        .map(|b| energy(b, j).map(|e| (b, e)))
        .collect::<Result<Vec<_>>>()?;
    let min = energies.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    let states = energies.into_iter().filter(|&(_, e)| e - min < 1e-12).map(|(b, _)| b).collect();
    Ok((min, states))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrustrationCensus {
    pub total_triangles: u64,
    pub frustrated: u64,
    pub fraction: f64,
}

/// Counts triangles whose coupling-sign product is negative. Zero couplings
/// count as positive.
pub fn frustration_census(j: &CouplingMatrix) -> Result<FrustrationCensus> {
    let n = j.n;
    if n < 3 {
        return Err(Error::SiteCount { n, min: 3, max: usize::MAX });
    }
    let negative = |a: usize, b: usize| j.get(a, b) < 0.0;
    let mut total = 0u64;
    let mut frustrated = 0u64;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                total += 1;
                let negatives = negative(a, b) as u8 + negative(b, c) as u8 + negative(a, c) as u8;
                if negatives % 2 == 1 {
                    frustrated += 1;
                }
            }
        }
    }
    Ok(FrustrationCensus { total_triangles: total, frustrated, fraction: frustrated as f64 / total as f64 })
}
