//! Exhaustive enumeration of equal-weight pairs over the `2^n x 2^n` grid of
//! basis states, phase classification and the derived checks on it.
//!
//! Cells are canonical (`row <= col`) and always produced in row-major order.
//! Row and column are basis indices, so the complement of row `r` sits in
//! column `2^n - 1 - r`: the anti-diagonal holds the all-differ pairs.

use std::fmt;

use serde::Serialize;

use crate::entanglement::{negativity_report, partial_trace, DensityMatrix};
use crate::error::{Error, Result};
use crate::observables::{closed_form_observables, observables, ObservablesRecord, SpinScale, ZERO_TOL};
use crate::state::{BasisState, SuperpositionSpec};

/// Default size cap of the closed-form atlas path.
pub const CLOSED_FORM_CAP: usize = 12;

/// Hard cap, reachable only by explicit override.
pub const EXTENDED_CAP: usize = 16;

/// Largest `n` for which [`recursion_check`] also contracts dense matrices.
pub const RECURSION_DENSE_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PhaseLabel {
    SG,
    PM,
    FM,
    AFM,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseLabel::SG => "SG",
            PhaseLabel::PM => "PM",
            PhaseLabel::FM => "FM",
            PhaseLabel::AFM => "AFM",
        })
    }
}

/// PM: `m = 0, q = 0`; SG: `m = 0, q > 0`; FM: `m > 0`; AFM: `m < 0`.
pub fn classify(m: f64, q_ea: f64) -> PhaseLabel {
    if m >= ZERO_TOL {
        PhaseLabel::FM
    } else if m <= -ZERO_TOL {
        PhaseLabel::AFM
    } else if q_ea < ZERO_TOL {
        PhaseLabel::PM
    } else {
        PhaseLabel::SG
    }
}

pub fn classify_phase(obs: &ObservablesRecord) -> PhaseLabel {
    classify(obs.m, obs.q_ea)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasCell {
    pub row: u64,
    pub col: u64,
    /// Cluster size.
    pub k: usize,
    pub q_ea: f64,
    pub m: f64,
    /// Normalized average negativity.
    pub neg: f64,
    pub phase: PhaseLabel,
}

/// Evaluates the equal-weight pair `(row, col)`.
pub fn atlas_cell(n: usize, row: u64, col: u64, scale: SpinScale) -> Result<AtlasCell> {
    let spec = SuperpositionSpec::equal_weight(BasisState::new(n, row)?, BasisState::new(n, col)?)?;
    let dec = spec.decompose();
    let obs = closed_form_observables(&dec, 0.5, scale)?;
    let neg = negativity_report(&spec).avg_normalized;
    Ok(AtlasCell {
        row: spec.b1().index(),
        col: spec.b2().index(),
        k: dec.k(),
        q_ea: obs.q_ea,
        m: obs.m,
        neg,
        phase: classify_phase(&obs),
    })
}

/// Validates `n` against the closed-form caps.
pub fn check_atlas_size(n: usize, allow_extended: bool) -> Result<()> {
    let cap = if allow_extended { EXTENDED_CAP } else { CLOSED_FORM_CAP };
    if n == 0 {
        return Err(Error::SiteCount { n, min: 1, max: cap });
    }
    if n > cap {
        return Err(Error::SizeCap { what: "closed-form atlas", n, cap });
    }
    Ok(())
}

/// Canonical pairs `(row, col)`, `row <= col`, row-major.
pub fn canonical_pairs(n: usize) -> impl Iterator<Item = (u64, u64)> {
    let dim = 1u64 << n;
    (0..dim).flat_map(move |r| (r..dim).map(move |c| (r, c)))
}

/// Streams every canonical cell; `n` must already be within the caps.
pub fn atlas_cells(n: usize, scale: SpinScale) -> impl Iterator<Item = AtlasCell> {
    canonical_pairs(n).map(move |(r, c)| atlas_cell(n, r, c, scale).expect("indices within 2^n"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCounts {
    pub sg: usize,
    pub pm: usize,
    pub fm: usize,
    pub afm: usize,
}

impl PhaseCounts {
    pub fn add(&mut self, phase: PhaseLabel) {
        match phase {
            PhaseLabel::SG => self.sg += 1,
            PhaseLabel::PM => self.pm += 1,
            PhaseLabel::FM => self.fm += 1,
            PhaseLabel::AFM => self.afm += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.sg + self.pm + self.fm + self.afm
    }
}

impl fmt::Display for PhaseCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SG={} PM={} FM={} AFM={}", self.sg, self.pm, self.fm, self.afm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasMatrix {
    pub n: usize,
    pub spin_scale: SpinScale,
    pub cells: Vec<AtlasCell>,
}

impl AtlasMatrix {
    /// Cell `(row, col)` in either order.
    pub fn cell(&self, row: u64, col: u64) -> Option<&AtlasCell> {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        let dim = 1u64 << self.n;
        if c >= dim {
            return None;
        }
        // rows before r hold dim + (dim - 1) + ... + (dim - r + 1) cells
        let index = r * dim - r * (r.saturating_sub(1)) / 2 + (c - r);
        self.cells.get(index as usize)
    }

    pub fn phase_counts(&self) -> PhaseCounts {
        let mut counts = PhaseCounts::default();
        for cell in &self.cells {
            counts.add(cell.phase);
        }
        counts
    }
}

pub fn build_atlas(n: usize, scale: SpinScale) -> Result<AtlasMatrix> {
    check_atlas_size(n, false)?;
    Ok(AtlasMatrix { n, spin_scale: scale, cells: atlas_cells(n, scale).collect() })
}

/// Sorted distinct `q_ea` values over the SG cells, found by enumeration.
pub fn distinct_sg_q_census(n: usize, scale: SpinScale) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::SiteCount { n, min: 2, max: CLOSED_FORM_CAP });
    }
    check_atlas_size(n, false)?;
    let mut qs: Vec<f64> =
        atlas_cells(n, scale).filter(|c| c.phase == PhaseLabel::SG).map(|c| c.q_ea).collect();
    qs.sort_by(f64::total_cmp);
    qs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(qs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub n: usize,
    pub row: u64,
    pub col: u64,
    /// `|w1|^2` on the row state.
    pub p: f64,
    pub m: f64,
    pub q_ea: f64,
}

/// Uniform grid over `[0, 1]` with `steps` points, endpoints exact.
pub fn weight_grid(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidSteps(steps));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| i as f64 / last).collect())
}

/// Streams scatter points: each diagonal cell once (at `p = 1`), each
/// off-diagonal pair once per grid weight.
pub fn scatter_points(
    n: usize,
    steps: usize,
    scale: SpinScale,
) -> Result<impl Iterator<Item = ScatterPoint>> {
    let grid = weight_grid(steps)?;
    BasisState::all_ground(n)?;
    Ok(canonical_pairs(n).flat_map(move |(row, col)| {
        let b1 = BasisState::new(n, row).expect("row < 2^n");
        let b2 = BasisState::new(n, col).expect("col < 2^n");
        let weights = if row == col { vec![1.0] } else { grid.clone() };
        weights.into_iter().map(move |p| {
            let spec = SuperpositionSpec::with_probability(b1, b2, p).expect("grid within [0, 1]");
            let obs = observables(&spec, scale);
            ScatterPoint { n, row, col, p, m: obs.m, q_ea: obs.q_ea }
        })
    }))
}

pub fn weighted_scatter(n: usize, steps: usize, scale: SpinScale) -> Result<Vec<ScatterPoint>> {
    check_atlas_size(n, false)?;
    Ok(scatter_points(n, steps, scale)?.collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub included_count: usize,
    pub excluded_k1_count: usize,
    /// Largest distance of an excluded `k = 1` cell from the fitted line.
    pub k1_max_deviation: f64,
}

/// Least-squares fit of `q_ea` against normalized average negativity over
/// all equal-weight cells except those with a lone cat site (`k = 1`).
pub fn fit_linear_law(n: usize, scale: SpinScale) -> Result<FitResult> {
    if n < 3 {
        return Err(Error::SiteCount { n, min: 3, max: CLOSED_FORM_CAP });
    }
    check_atlas_size(n, false)?;
    Ok(fit_cells(n, atlas_cells(n, scale)))
}

/// The fit behind [`fit_linear_law`] over any stream of cells; callers own
/// the size checks.
pub fn fit_cells(n: usize, cells: impl IntoIterator<Item = AtlasCell>) -> FitResult {
    let (included, excluded): (Vec<AtlasCell>, Vec<AtlasCell>) =
        cells.into_iter().partition(|c| c.k != 1);
    let count = included.len() as f64;
    let mean_x = included.iter().map(|c| c.neg).sum::<f64>() / count;
    let mean_y = included.iter().map(|c| c.q_ea).sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for c in &included {
        sxy += (c.neg - mean_x) * (c.q_ea - mean_y);
        sxx += (c.neg - mean_x) * (c.neg - mean_x);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = |c: &AtlasCell| (c.q_ea - (intercept + slope * c.neg)).abs();
    FitResult {
        n,
        slope,
        intercept,
        max_residual: included.iter().map(residual).fold(0.0, f64::max),
        included_count: included.len(),
        excluded_k1_count: excluded.len(),
        k1_max_deviation: excluded.iter().map(residual).fold(0.0, f64::max),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RecursionReport {
    pub n: usize,
    /// Cells whose last site is an agree site.
    pub checked: usize,
    /// Cells whose last site is in the differ set.
    pub excluded: usize,
    /// Cells additionally confirmed by a dense partial trace.
    pub dense_checked: usize,
    pub violations: Vec<(u64, u64)>,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

/// Dropping the last site of a pair that agrees there must land on the
/// matching `(n - 1)`-site cell with `n q_n = (n - 1) q_{n-1} + q_max`.
pub fn recursion_check(n: usize, scale: SpinScale) -> Result<RecursionReport> {
    if !(2..=8).contains(&n) {
        return Err(Error::SiteCount { n, min: 2, max: 8 });
    }
    let smaller = build_atlas(n - 1, scale)?;
    let mut report = RecursionReport { n, ..Default::default() };
    for cell in atlas_cells(n, scale) {
        if (cell.row ^ cell.col) & 1 == 1 {
            report.excluded += 1;
            continue;
        }
        report.checked += 1;
        let (r, c) = (cell.row >> 1, cell.col >> 1);
        let prev = smaller.cell(r, c).expect("restricted pair inside the smaller atlas");
        let lhs = n as f64 * cell.q_ea;
        let rhs = (n - 1) as f64 * prev.q_ea + scale.q_max();
        let mut ok = (lhs - rhs).abs() < 1e-12 && prev.k == cell.k && (prev.row, prev.col) == (r, c);

        if ok && n <= RECURSION_DENSE_CAP {
            let full = SuperpositionSpec::equal_weight(BasisState::new(n, cell.row)?, BasisState::new(n, cell.col)?)?;
            let reduced = partial_trace(&DensityMatrix::from_spec(&full)?, n - 1)?;
            let expected = SuperpositionSpec::equal_weight(BasisState::new(n - 1, r)?, BasisState::new(n - 1, c)?)?;
            ok = reduced.max_abs_diff(&DensityMatrix::from_spec(&expected)?) < 1e-12;
            report.dense_checked += 1;
        }
        if !ok {
            report.violations.push((cell.row, cell.col));
        }
    }
    Ok(report)
}
