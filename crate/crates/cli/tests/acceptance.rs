//! Acceptance gate. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line each and exits non-zero if any fail.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qss_core::atlas::{
    build_atlas, distinct_sg_q_census, fit_linear_law, recursion_check, scatter_points, PhaseLabel,
};
use qss_core::entanglement::{negativity, schmidt_negativity, DensityMatrix};
use qss_core::hamiltonian::{expectation_energy, frustration_census, sample_couplings, CouplingMatrix};
use qss_core::observables::{
    closed_form_observables, dense_local_magnetization, observables, ObservablesRecord,
};
use qss_core::state::{
    build_amplitude_vector, enumerate_word_family, parse_letters, BasisState, Letter,
    SuperpositionSpec,
};
use qss_core::SpinScale;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HALF: SpinScale = SpinScale::HALF;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // negated so that NaN fails
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn pairs(n: usize) -> Vec<(BasisState, BasisState)> {
    let all: Vec<BasisState> = BasisState::all(n).unwrap().collect();
    all.iter().flat_map(|&a| all.iter().filter(move |&&b| a <= b).map(move |&b| (a, b))).collect()
}

fn is_sg(rec: &ObservablesRecord) -> bool {
    rec.m.abs() < 1e-9 && rec.q_ea >= 1e-9
}

fn word_values() -> Outcome {
    let mut checked = 0;
    for (word, want) in [("C,C,e,g", 0.125), ("e,g,e,g", 0.25)] {
        for spec in enumerate_word_family(&parse_letters(word).unwrap()).unwrap() {
            let q = observables(&spec, HALF).q_ea;
            ensure!((q - want).abs() < 1e-12, "{word}: {spec} has q_ea {q}");
            checked += 1;
        }
    }
    Ok(format!("{checked} expansions at 0.125 / 0.25"))
}

/// Every letter multiset of length `n`, in canonical C, e, g order.
fn all_words(n: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for c in 0..=n {
        for e in 0..=(n - c) {
            let mut w = vec![Letter::Cat; c];
            w.extend(vec![Letter::Excited; e]);
            w.extend(vec![Letter::Ground; n - c - e]);
            out.push(w);
        }
    }
    out
}

fn state_counts() -> Outcome {
    let count = |w: &str| enumerate_word_family(&parse_letters(w).unwrap()).unwrap().len();
    ensure!(count("C,C,e,g") == 24, "C,C,e,g gave {}", count("C,C,e,g"));
    ensure!(count("e,g,e,g") == 6, "e,g,e,g gave {}", count("e,g,e,g"));
    let mut totals = Vec::new();
    for n in [3, 4] {
        let atlas_sg = build_atlas(n, HALF).unwrap().phase_counts().sg;
        let family_sg: usize = all_words(n)
            .iter()
            .map(|w| {
                enumerate_word_family(w)
                    .unwrap()
                    .iter()
                    .filter(|s| is_sg(&observables(s, HALF)))
                    .count()
            })
            .sum();
        ensure!(atlas_sg == family_sg, "n = {n}: atlas {atlas_sg} vs families {family_sg}");
        totals.push(atlas_sg);
    }
    ensure!(totals[0] == 6, "n = 3 has {} SG cells", totals[0]);
    Ok(format!("24 / 6 specs; SG cells n=3: {}, n=4: {}", totals[0], totals[1]))
}

fn diagonal_laws() -> Outcome {
    for n in 3..=8 {
        let atlas = build_atlas(n, HALF).unwrap();
        for b in BasisState::all(n).unwrap() {
            let d = atlas.cell(b.index(), b.index()).unwrap();
            ensure!((d.q_ea - 0.25).abs() < 1e-10, "n = {n}: diagonal {b} q_ea {}", d.q_ea);
            let (lo, hi) = (b.index().min(b.complement().index()), b.index().max(b.complement().index()));
            let a = atlas.cell(lo, hi).unwrap();
            ensure!(
                a.m.abs() < 1e-10 && a.q_ea.abs() < 1e-10 && a.phase == PhaseLabel::PM && (a.neg - 1.0).abs() < 1e-10,
                "n = {n}: anti-diagonal {b} gave {a:?}"
            );
        }
    }
    Ok("n=3..8 exhaustive".into())
}

fn linear_law() -> Outcome {
    let mut report = Vec::new();
    for n in 3..=8 {
        let fit = fit_linear_law(n, HALF).unwrap();
        ensure!((fit.slope + 0.25).abs() < 1e-9, "n = {n}: slope {}", fit.slope);
        ensure!((fit.intercept - 0.25).abs() < 1e-9, "n = {n}: intercept {}", fit.intercept);
        ensure!(fit.max_residual < 1e-10, "n = {n}: residual {}", fit.max_residual);
        ensure!(fit.excluded_k1_count > 0 && fit.k1_max_deviation > 0.0, "n = {n}: no k=1 report");
        report.push(format!("n={n} k1 dev {:.4} over {}", fit.k1_max_deviation, fit.excluded_k1_count));
    }
    Ok(report.join("; "))
}

fn distinct_q() -> Outcome {
    let lengths: Vec<usize> = (3..=8).map(|n| distinct_sg_q_census(n, HALF).unwrap().len()).collect();
    ensure!(lengths == [1, 2, 2, 3, 3, 4], "lengths {lengths:?}");
    Ok(format!("{lengths:?}"))
}

fn sg_rules() -> Outcome {
    let mut sg = 0;
    for n in 1..=8 {
        for (a, b) in pairs(n) {
            let spec = SuperpositionSpec::equal_weight(a, b).unwrap();
            if !is_sg(&observables(&spec, HALF)) {
                continue;
            }
            ensure!(!spec.decompose().agree_e.is_empty(), "{spec} has no co-excited site");
            ensure!(a.excited_count() + b.excited_count() == n, "{spec} excited total != n");
            sg += 1;
        }
    }
    Ok(format!("{sg} SG cells n<=8"))
}

fn dense_hamiltonian(j: &CouplingMatrix) -> Vec<f64> {
    // H is diagonal; build it as a sum of Kronecker products of diag(-1, +1) and I
    let n = j.n();
    let mut diag = vec![0.0; 1 << n];
    for (a, b, v) in j.bonds() {
        let mut op = vec![1.0];
        for site in 0..n {
            let factor = if site == a || site == b { [-1.0, 1.0] } else { [1.0, 1.0] };
            op = op.iter().flat_map(|x| factor.map(|f| x * f)).collect();
        }
        for (d, o) in diag.iter_mut().zip(op) {
            *d -= v * o;
        }
    }
    diag
}

fn oracle_equivalences() -> Outcome {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for n in 1..=6 {
        for (a, b) in pairs(n) {
            for &p in &grid {
                let spec = SuperpositionSpec::with_probability(a, b, p).unwrap();
                let dense = ObservablesRecord::from_local(dense_local_magnetization(
                    &build_amplitude_vector(&spec).unwrap(),
                    HALF,
                ));
                let closed = closed_form_observables(&spec.decompose(), spec.p(), HALF).unwrap();
                let worst = closed.m_local.iter().zip(&dense.m_local).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                ensure!(worst < 1e-10 && (closed.q_ea - dense.q_ea).abs() < 1e-10, "observables {spec}");
            }
        }
    }

    let check_neg = |spec: &SuperpositionSpec| -> Result<(), String> {
        let rho = DensityMatrix::from_spec(spec).unwrap();
        for cut in 0..spec.n() {
            let d = negativity(&rho, &[cut]).unwrap();
            let s = schmidt_negativity(spec, &[cut]).unwrap();
            ensure!((d - s).abs() < 1e-10, "negativity {spec} cut {cut}: {s} vs {d}");
        }
        Ok(())
    };
    for n in 1..=5 {
        for (a, b) in pairs(n) {
            check_neg(&SuperpositionSpec::equal_weight(a, b).unwrap())?;
            check_neg(&SuperpositionSpec::with_probability(a, b, 0.3).unwrap())?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random_spec = |rng: &mut ChaCha8Rng, n: usize| {
        let dim = 1u64 << n;
        let p: f64 = rng.random_range(0.0..=1.0);
        SuperpositionSpec::new(
            BasisState::new(n, rng.random_range(0..dim)).unwrap(),
            BasisState::new(n, rng.random_range(0..dim)).unwrap(),
            Complex64::from_polar(p.sqrt(), rng.random_range(0.0..6.3)),
            Complex64::from_polar((1.0 - p).sqrt(), rng.random_range(0.0..6.3)),
        )
        .unwrap()
    };
    for i in 0..300 {
        check_neg(&random_spec(&mut rng, 6 + i % 3))?;
    }

    let hs: Vec<(CouplingMatrix, Vec<f64>)> = (2..=7)
        .map(|n| {
            let j = sample_couplings(n, 1.0, 40 + n as u64).unwrap();
            let h = dense_hamiltonian(&j);
            (j, h)
        })
        .collect();
    for case in 0..1000 {
        let (j, h) = &hs[case % hs.len()];
        let spec = random_spec(&mut rng, j.n());
        let psi = build_amplitude_vector(&spec).unwrap();
        let want: f64 = psi.amplitudes().iter().zip(h).map(|(a, e)| a.norm_sqr() * e).sum();
        let got = expectation_energy(&spec, j).unwrap();
        ensure!((got - want).abs() < 1e-10, "energy case {case}: {got} vs {want}");
    }
    Ok("observables n<=6 x 11 weights; negativity n<=5 + 300 sampled; 1000 energies".into())
}

fn scatter_envelope() -> Outcome {
    let mut points = 0usize;
    for n in 1..=8 {
        let mut q_max = f64::NEG_INFINITY;
        for pt in scatter_points(n, 101, HALF).unwrap() {
            ensure!(pt.q_ea >= pt.m * pt.m - 1e-12 && pt.q_ea <= 0.25 + 1e-12, "{pt:?}");
            if pt.p == 0.5 {
                ensure!(pt.q_ea >= pt.m.abs() / 2.0 - 1e-12, "equal weight {pt:?}");
            }
            q_max = q_max.max(pt.q_ea);
            points += 1;
        }
        ensure!((q_max - 0.25).abs() < 1e-12, "n = {n}: max q_ea {q_max}");
    }
    Ok(format!("{points} points n=1..8"))
}

fn frustration() -> Outcome {
    for n in 3..=12 {
        let positive = CouplingMatrix::from_fn(n, |i, k| 0.1 + (i * 7 + k) as f64).unwrap();
        ensure!(frustration_census(&positive).unwrap().frustrated == 0, "positive n = {n}");
    }
    let mean = (0..100)
        .map(|seed| frustration_census(&sample_couplings(20, 1.0, seed).unwrap()).unwrap().fraction)
        .sum::<f64>()
        / 100.0;
    ensure!((mean - 0.5).abs() < 0.02, "mean fraction {mean}");

    let (n, j_scale) = (448, 1.0);
    let values: Vec<f64> = sample_couplings(n, j_scale, 3).unwrap().bonds().map(|b| b.2).collect();
    let count = values.len() as f64;
    let mu = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (count - 1.0);
    let want = j_scale * j_scale / n as f64;
    ensure!(mu.abs() < 4.0 * (want / count).sqrt(), "sampler mean {mu}");
    // variance of the sample variance is 2 sigma^4 / (count - 1)
    ensure!((var - want).abs() < 4.0 * want * (2.0 / (count - 1.0)).sqrt(), "sampler variance {var} vs {want}");
    Ok(format!("mean fraction {mean:.4}; sampler var {var:.3e} vs {want:.3e}"))
}

fn recursion() -> Outcome {
    let mut checked = 0;
    for n in 4..=8 {
        let r = recursion_check(n, HALF).unwrap();
        ensure!(r.passed(), "n = {n}: violations {:?}", r.violations);
        checked += r.checked;
    }
    Ok(format!("{checked} restricted cells n=4..8"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    let mut slowest = Duration::ZERO;
    for run in 0..2 {
        let path = dir.path().join(format!("atlas_{run}.json"));
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_qss"))
            .args(["atlas", "--n", "8", "--out"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure!(status.status.success(), "run {run} failed: {}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(outputs[0] == outputs[1], "outputs differ");
    ensure!(slowest < Duration::from_secs(60), "took {slowest:?}");
    let doc: serde_json::Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
    ensure!(doc["cells"].as_array().map(Vec::len) == Some(32896), "cell count");
    Ok(format!("{} bytes, slowest run {:.2?}", outputs[0].len(), slowest))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("word values", word_values),
        ("state counts", state_counts),
        ("diagonal and anti-diagonal laws", diagonal_laws),
        ("linear law", linear_law),
        ("distinct-q census", distinct_q),
        ("spin-glass rules", sg_rules),
        ("oracle equivalences", oracle_equivalences),
        ("scatter envelope", scatter_envelope),
        ("frustration statistics", frustration),
        ("recursion", recursion),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({:.2?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
