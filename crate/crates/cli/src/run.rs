use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qss_core::atlas::{
    self, atlas_cells, check_atlas_size, classify_phase, scatter_points, PhaseCounts,
};
use qss_core::entanglement::{dense_negativity_report, negativity_report, NegativityReport};
use qss_core::export::{self, ExportMeta};
use qss_core::hamiltonian::{frustration_census, ground_states, sample_couplings};
use qss_core::observables::{observables, ObservablesRecord};
use qss_core::state::{enumerate_word_family, parse_letters, EnsembleWord, SuperpositionSpec};
use qss_core::{BasisState, SpinScale};

/// Largest site count accepted by `census`.
pub const CENSUS_CAP: usize = 20;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    SizeCap(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::SizeCap(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<qss_core::Error> for CliError {
    fn from(e: qss_core::Error) -> Self {
        match e {
            qss_core::Error::SizeCap { .. } => CliError::SizeCap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Exact superposition-state atlases: magnetization, Edwards-Anderson order
/// parameter, negativity and phase labels.
#[derive(Debug, Parser)]
#[command(name = "qss", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every equal-weight pair of basis states with its phase label.
    Atlas(Common),
    /// Magnetization vs q_ea over a grid of weights.
    Scatter {
        #[command(flatten)]
        common: Common,
        /// Points of the uniform grid over p = |w1|^2.
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Least-squares fit of q_ea against average negativity.
    Law(Common),
    /// Expand an ensemble word (`C,C,e,g`) or one variant of it (`C,C,e,g:1`).
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
    },
    /// Negativity of one superposition, Schmidt and dense routes side by side.
    Negativity {
        #[command(flatten)]
        common: Common,
        /// First basis state, e.g. `eeeg`.
        #[arg(long)]
        b1: String,
        /// Second basis state; omitted for a single basis state.
        #[arg(long)]
        b2: Option<String>,
        /// Weight square on `--b1`.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Sample Gaussian couplings and enumerate the ground states.
    Ham {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        j_scale: f64,
    },
    /// Frustrated-triangle census of sampled Gaussian couplings.
    Census {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        j_scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Site count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; defaults to `<command>_n<N>.<format>` in the working directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub spin_scale: f64,
    /// Raise the closed-form cap from 12 to 16 sites.
    #[arg(long)]
    pub allow_large: bool,
}

impl Common {
    fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| CliError::Usage("--n is required for this command".into()))
    }

    fn scale(&self) -> Result<SpinScale> {
        Ok(SpinScale::new(self.spin_scale)?)
    }

    fn closed_form_n(&self) -> Result<usize> {
        let n = self.require_n()?;
        check_atlas_size(n, self.allow_large)?;
        if n > atlas::CLOSED_FORM_CAP {
            eprintln!("warning: n = {n} exceeds the default cap of {}; output grows as 4^n", atlas::CLOSED_FORM_CAP);
        }
        Ok(n)
    }

    fn meta(&self, command: &str, n: usize) -> ExportMeta {
        ExportMeta::new(command, n, self.spin_scale, self.seed)
    }

    fn create(&self, command: &str, n: usize) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{command}_n{n}.{}", self.format.ext())));
        let file = File::create(&path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        Ok((path, BufWriter::new(file)))
    }
}

fn finish(path: &std::path::Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Atlas(common) => run_atlas(common),
        Command::Scatter { common, steps } => run_scatter(common, *steps),
        Command::Law(common) => run_law(common),
        Command::Ensemble { common, word } => run_ensemble(common, word),
        Command::Negativity { common, b1, b2, p } => run_negativity(common, b1, b2.as_deref(), *p),
        Command::Ham { common, j_scale } => run_ham(common, *j_scale),
        Command::Census { common, j_scale } => run_census(common, *j_scale),
    }
}

fn run_atlas(common: &Common) -> Result<String> {
    let n = common.closed_form_n()?;
    let scale = common.scale()?;
    let meta = common.meta("atlas", n);
    let (path, mut w) = common.create("atlas", n)?;
    let mut counts = PhaseCounts::default();
    let cells = atlas_cells(n, scale).inspect(|c| counts.add(c.phase));
    let written = match common.format {
        Format::Json => export::write_atlas_json(&mut w, &meta, cells)?,
        Format::Csv => export::write_atlas_csv(&mut w, &meta, cells)?,
    };
    finish(&path, w)?;
    Ok(format!("atlas n={n} cells={written} {counts} -> {}", path.display()))
}

fn run_scatter(common: &Common, steps: usize) -> Result<String> {
    let n = common.closed_form_n()?;
    let points = scatter_points(n, steps, common.scale()?)?;
    let meta = common.meta("scatter", n);
    let (path, mut w) = common.create("scatter", n)?;
    let written = match common.format {
        Format::Json => export::write_scatter_json(&mut w, &meta, points)?,
        Format::Csv => export::write_scatter_csv(&mut w, &meta, points)?,
    };
    finish(&path, w)?;
    Ok(format!("scatter n={n} steps={steps} points={written} -> {}", path.display()))
}

fn run_law(common: &Common) -> Result<String> {
    let n = common.closed_form_n()?;
    if n < 3 {
        return Err(CliError::Usage(format!("law needs n >= 3 (got {n})")));
    }
    let fit = atlas::fit_cells(n, atlas_cells(n, common.scale()?));
    let meta = common.meta("law", n);
    let (path, mut w) = common.create("law", n)?;
    match common.format {
        Format::Json => export::write_fit_json(&mut w, &meta, &fit)?,
        Format::Csv => export::write_fit_csv(&mut w, &meta, &fit)?,
    }
    finish(&path, w)?;
    Ok(format!(
        "law n={n} slope={} intercept={} max_residual={} excluded_k1={} -> {}",
        fit.slope,
        fit.intercept,
        fit.max_residual,
        fit.excluded_k1_count,
        path.display()
    ))
}

#[derive(serde::Serialize)]
struct EnsembleRow {
    word: String,
    b1: String,
    b2: String,
    k: usize,
    q_ea: f64,
    m: f64,
    neg: f64,
    phase: String,
}

fn run_ensemble(common: &Common, word: &str) -> Result<String> {
    let specs = if word.contains(':') {
        vec![word.parse::<EnsembleWord>()?.expand()]
    } else {
        enumerate_word_family(&parse_letters(word)?)?
    };
    let n = specs[0].n();
    if common.n.is_some_and(|given| given != n) {
        return Err(CliError::Usage(format!("--n {} does not match the {n}-letter word", common.n.unwrap())));
    }
    check_atlas_size(n, common.allow_large)?;
    let scale = common.scale()?;
    let rows: Vec<EnsembleRow> = specs
        .iter()
        .map(|spec| {
            let obs = observables(spec, scale);
            EnsembleRow {
                word: EnsembleWord::from_pair(spec.b1(), spec.b2()).expect("same size").to_string(),
                b1: spec.b1().to_string(),
                b2: spec.b2().to_string(),
                k: spec.decompose().k(),
                q_ea: obs.q_ea,
                m: obs.m,
                neg: negativity_report(spec).avg_normalized,
                phase: classify_phase(&obs).to_string(),
            }
        })
        .collect();

    let meta = common.meta("ensemble", n);
    let (path, mut w) = common.create("ensemble", n)?;
    match common.format {
        Format::Json => {
            export::write_record_json(&mut w, &meta, &serde_json_rows(word, &rows))?;
        }
        Format::Csv => {
            meta.write_csv_header(&mut w)?;
            writeln!(w, "word,b1,b2,k,q_ea,m,neg,phase")?;
            for r in &rows {
                writeln!(w, "\"{}\",{},{},{},{},{},{},{}", r.word, r.b1, r.b2, r.k, r.q_ea, r.m, r.neg, r.phase)?;
            }
        }
    }
    finish(&path, w)?;
    let qs: BTreeSet<String> = rows.iter().map(|r| r.q_ea.to_string()).collect();
    let qs: Vec<String> = qs.into_iter().collect();
    Ok(format!("ensemble word={word} specs={} q_ea=[{}] -> {}", rows.len(), qs.join(","), path.display()))
}

#[derive(serde::Serialize)]
struct EnsembleDoc<'a> {
    word: &'a str,
    count: usize,
    specs: &'a [EnsembleRow],
}

fn serde_json_rows<'a>(word: &'a str, rows: &'a [EnsembleRow]) -> EnsembleDoc<'a> {
    EnsembleDoc { word, count: rows.len(), specs: rows }
}

#[derive(serde::Serialize)]
struct NegativityDoc {
    b1: String,
    b2: String,
    p: f64,
    observables: ObservablesRecord,
    schmidt: NegativityReport,
    dense: NegativityReport,
    max_route_difference: f64,
}

fn run_negativity(common: &Common, b1: &str, b2: Option<&str>, p: f64) -> Result<String> {
    let first: BasisState = b1.parse()?;
    let spec = match b2 {
        Some(b2) => SuperpositionSpec::with_probability(first, b2.parse()?, p)?,
        None => SuperpositionSpec::single(first),
    };
    let n = spec.n();
    if common.n.is_some_and(|given| given != n) {
        return Err(CliError::Usage(format!("--n does not match the {n}-site states")));
    }
    let dense = dense_negativity_report(&spec)?;
    let schmidt = negativity_report(&spec);
    let max_route_difference = schmidt
        .per_cut
        .iter()
        .zip(&dense.per_cut)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let doc = NegativityDoc {
        b1: spec.b1().to_string(),
        b2: spec.b2().to_string(),
        p: spec.p(),
        observables: observables(&spec, common.scale()?),
        schmidt,
        dense,
        max_route_difference,
    };

    let meta = common.meta("negativity", n);
    let (path, mut w) = common.create("negativity", n)?;
    match common.format {
        Format::Json => export::write_record_json(&mut w, &meta, &doc)?,
        Format::Csv => {
            meta.write_csv_header(&mut w)?;
            writeln!(w, "cut,schmidt,dense")?;
            for (i, (s, d)) in doc.schmidt.per_cut.iter().zip(&doc.dense.per_cut).enumerate() {
                writeln!(w, "{i},{s},{d}")?;
            }
        }
    }
    finish(&path, w)?;
    Ok(format!(
        "negativity n={n} avg_normalized={} dense_avg_normalized={} max_route_difference={} -> {}",
        doc.schmidt.avg_normalized,
        doc.dense.avg_normalized,
        doc.max_route_difference,
        path.display()
    ))
}

fn run_ham(common: &Common, j_scale: f64) -> Result<String> {
    let n = common.closed_form_n()?;
    if n < 2 {
        return Err(CliError::Usage("ham needs n >= 2".into()));
    }
    let j = sample_couplings(n, j_scale, common.seed)?;
    let (ground, states) = ground_states(&j)?;
    let meta = common.meta("ham", n);
    let (path, mut w) = common.create("ham", n)?;
    match common.format {
        Format::Json => export::write_couplings_json(&mut w, &meta, &j)?,
        Format::Csv => export::write_couplings_csv(&mut w, &meta, &j)?,
    }
    finish(&path, w)?;
    let census = if n >= 3 { frustration_census(&j)?.fraction.to_string() } else { "n/a".into() };
    let labels: Vec<String> = states.iter().map(|b| b.to_string()).collect();
    Ok(format!(
        "ham n={n} seed={} bonds={} ground_energy={ground} degeneracy={} ground_states=[{}] frustrated_fraction={census} -> {}",
        common.seed,
        n * (n - 1) / 2,
        states.len(),
        labels.join(","),
        path.display()
    ))
}

fn run_census(common: &Common, j_scale: f64) -> Result<String> {
    let n = common.require_n()?;
    if n > CENSUS_CAP {
        return Err(CliError::SizeCap(format!("census is capped at n = {CENSUS_CAP} (requested n = {n})")));
    }
    let j = sample_couplings(n, j_scale, common.seed)?;
    let census = frustration_census(&j)?;
    let meta = common.meta("census", n);
    let (path, mut w) = common.create("census", n)?;
    match common.format {
        Format::Json => export::write_census_json(&mut w, &meta, &census)?,
        Format::Csv => export::write_census_csv(&mut w, &meta, &census)?,
    }
    finish(&path, w)?;
    Ok(format!(
        "census n={n} seed={} triangles={} frustrated={} fraction={} -> {}",
        common.seed,
        census.total_triangles,
        census.frustrated,
        census.fraction,
        path.display()
    ))
}
