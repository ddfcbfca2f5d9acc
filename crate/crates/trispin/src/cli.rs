//! Argument parsing and subcommand dispatch for the `trispin` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trispin_core::bose_hubbard::{effective_couplings, validate_perturbation, BoseHubbardParams};
use trispin_core::correlations::{cluster_survey, survey_decay_rate, two_point_connected, SurveyConfig, SurveyMode};
use trispin_core::free_fermion::{correlation_length, czz_series, FitConfig};
use trispin_core::localizable::{
    branch_average, cluster_scheme_plan, lower_bound_plan, optimize_plan, AnnealConfig, SchemeParse,
};
use trispin_core::spin_core::{
    cluster_hamiltonian, dense_spectrum, excitation_gap, ground_state, low_spectrum, Axis, LanczosConfig,
    SpinChainSpec, DEFAULT_DENSE_MAX_SITES,
};

use crate::error::{Error, Result};
use crate::figure2::{self, Figure2Config};
use crate::formats::{
    write_series_csv, CouplingsJson, LengthEstimateJson, LocEntJson, ParamsJson, SpinChainJson, SurveyReportJson,
    TruncationReportJson,
};
use crate::grid::{parse_grid, parse_usize_grid};
use crate::numfmt::g12;
use crate::run::RunDir;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "trispin",
    version,
    about = "Cluster-chain spectra, correlations and localizable entanglement"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Output directory [default: runs/<subcommand>]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Effective three-spin couplings of the two-species triangle
    Couplings(ParamArgs),
    /// Compare the full triangle spectrum with the effective model
    Validate(ValidateArgs),
    /// Exact spectrum and excitation gap
    Spectrum(SpectrumArgs),
    /// Two-point correlators from exact ground states and the closed form
    Corr(CorrArgs),
    /// Census of non-vanishing Pauli-string expectations
    Survey(SurveyArgs),
    /// Localizable entanglement of a pair
    Locent(LocentArgs),
    /// Correlation and entanglement lengths across a field grid
    Figure2(Figure2Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Couplings(_) => "couplings",
            Command::Validate(_) => "validate",
            Command::Spectrum(_) => "spectrum",
            Command::Corr(_) => "corr",
            Command::Survey(_) => "survey",
            Command::Locent(_) => "locent",
            Command::Figure2(_) => "figure2",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ParamArgs {
    /// JSON file with j_a, j_b, u_aa, u_bb, u_ab
    #[arg(long, conflicts_with_all = ["j", "u", "j_a", "j_b", "u_aa", "u_bb", "u_ab"])]
    pub config: Option<PathBuf>,
    /// Tunneling of both species
    #[arg(long, allow_negative_numbers = true)]
    pub j: Option<f64>,
    /// All three collisional couplings
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub j_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub j_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u_aa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u_bb: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u_ab: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<BoseHubbardParams> {
        if let Some(path) = &self.config {
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            let p: ParamsJson = serde_json::from_reader(f)?;
            return Ok(p.into());
        }
        let need = |v: Option<f64>, shared: Option<f64>, name: &str| {
            v.or(shared)
                .ok_or_else(|| Error::Input(format!("missing --{name} (or --config)")))
        };
        Ok(BoseHubbardParams {
            j_a: need(self.j_a, self.j, "j-a")?,
            j_b: need(self.j_b, self.j, "j-b")?,
            u_aa: need(self.u_aa, self.u, "u-aa")?,
            u_bb: need(self.u_bb, self.u, "u-bb")?,
            u_ab: need(self.u_ab, self.u, "u-ab")?,
        })
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Largest accepted relative deviation
    #[arg(long, default_value_t = 0.08)]
    pub max_rel_dev: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Cluster,
    /// Read a spin-chain JSON file given by --spec
    Spec,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value_t = Model::Cluster)]
    pub model: Model,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, required_if_eq("model", "spec"))]
    pub spec: Option<PathBuf>,
    /// Iterative solver levels when the chain is too long for dense diagonalization
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CorrArgs {
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub b_grid: String,
    /// Ring size of the exact ground state
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Largest `L` (spins spanned by the pair, inclusive) [default: n/2 + 1]
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Axis pairs such as zz,xx
    #[arg(long, value_delimiter = ',', default_value = "zz")]
    pub axes: Vec<String>,
    /// Also emit the closed-form `C^zz` series and its length up to this `L`
    #[arg(long)]
    pub analytic_l_max: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SurveyArgs {
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub b_grid: String,
    /// Window sizes, same syntax as the field grid
    #[arg(long, default_value = "5:8:1")]
    pub windows: String,
    /// Sample this many random strings instead of enumerating all of them
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Cluster,
    LowerBound,
    Optimize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LocentArgs {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b_grid: String,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Target sites `p,q`
    #[arg(long, value_parser = parse_pair, default_value = "0,4")]
    pub pair: (usize, usize),
    #[arg(long, value_enum, default_value_t = Scheme::Cluster)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 200)]
    pub anneal_steps: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Figure2Args {
    #[arg(long, default_value = "0:2:0.1", allow_hyphen_values = true)]
    pub b_grid: String,
    /// Ring size of the entanglement channel [default: 12, or 16 with --large]
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub large: bool,
    #[arg(long, default_value_t = figure2::DEFAULT_L_MAX)]
    pub l_max: usize,
    #[arg(long, default_value_t = figure2::DEFAULT_ANNEAL_STEPS)]
    pub anneal_steps: usize,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or("expected two sites `p,q`")?;
    let site = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((site(p)?, site(q)?))
}

#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    subcommand: &'a str,
    #[serde(flatten)]
    common: &'a Common,
    #[serde(flatten)]
    args: &'a T,
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return Err(Error::Input("--threads must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::Input(e.to_string()))?;
    let name = cli.command.name();
    let out = cli
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(name));
    pool.install(|| match &cli.command {
        Command::Couplings(a) => couplings(&cli.common, a, out),
        Command::Validate(a) => validate(&cli.common, a, out),
        Command::Spectrum(a) => spectrum(&cli.common, a, out),
        Command::Corr(a) => corr(&cli.common, a, out),
        Command::Survey(a) => survey(&cli.common, a, out),
        Command::Locent(a) => locent(&cli.common, a, out),
        Command::Figure2(a) => run_figure2(&cli.common, a, out),
    })
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    std::io::stdout()
        .write_all(s.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn finish<T: Serialize>(run: RunDir, name: &str, common: &Common, args: &T) -> Result<()> {
    let path = run.finish(
        name,
        common.seed,
        &Resolved {
            subcommand: name,
            common,
            args,
        },
    )?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn couplings(common: &Common, a: &ParamArgs, out: PathBuf) -> Result<i32> {
    let p = a.resolve()?;
    let c = CouplingsJson::new(&effective_couplings(&p)?, &p);
    let mut run = RunDir::create(out)?;
    run.write_json("couplings.json", &c)?;
    print_json(&c)?;
    finish(run, "couplings", common, a)?;
    Ok(EXIT_OK)
}

fn validate(common: &Common, a: &ValidateArgs, out: PathBuf) -> Result<i32> {
    let p = a.params.resolve()?;
    let r = TruncationReportJson::from(&validate_perturbation(&p)?);
    let mut run = RunDir::create(out)?;
    run.write_json("truncation.json", &r)?;
    print_json(&r)?;
    finish(run, "validate", common, a)?;
    if r.max_rel_dev > a.max_rel_dev {
        eprintln!("max_rel_dev {} exceeds {}", g12(r.max_rel_dev), g12(a.max_rel_dev));
        return Ok(EXIT_VALIDATION);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SpectrumSummary {
    n: usize,
    ground_energy: f64,
    gap: Option<f64>,
    levels: usize,
    dense: bool,
}

fn spectrum(common: &Common, a: &SpectrumArgs, out: PathBuf) -> Result<i32> {
    let spec = match a.model {
        Model::Cluster => cluster_hamiltonian(a.n, a.b)?,
        Model::Spec => {
            let path = a
                .spec
                .as_ref()
                .ok_or_else(|| Error::Input("--spec is required".into()))?;
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            let j: SpinChainJson = serde_json::from_reader(f)?;
            SpinChainSpec::try_from(&j)?
        }
    };
    let dense = spec.n_sites() <= DEFAULT_DENSE_MAX_SITES;
    let levels = if dense {
        dense_spectrum(&spec)?
    } else {
        low_spectrum(
            &spec,
            a.levels.max(2),
            &LanczosConfig {
                seed: common.seed,
                ..LanczosConfig::default()
            },
        )?
    };
    let summary = SpectrumSummary {
        n: spec.n_sites(),
        ground_energy: levels[0],
        gap: excitation_gap(&levels, 1e-8),
        levels: levels.len(),
        dense,
    };
    let mut run = RunDir::create(out)?;
    let rows: Vec<Vec<String>> = levels
        .iter()
        .enumerate()
        .map(|(i, e)| vec![i.to_string(), g12(*e)])
        .collect();
    run.write_csv("spectrum.csv", &["index", "energy"], &rows)?;
    run.write_json("summary.json", &summary)?;
    run.write_json("model.json", &SpinChainJson::from(&spec))?;
    print_json(&summary)?;
    finish(run, "spectrum", common, a)?;
    Ok(EXIT_OK)
}

fn axis(c: char) -> Result<Axis> {
    match c.to_ascii_lowercase() {
        'x' => Ok(Axis::X),
        'y' => Ok(Axis::Y),
        'z' => Ok(Axis::Z),
        _ => Err(Error::Input(format!("unknown axis `{c}`"))),
    }
}

fn corr(common: &Common, a: &CorrArgs, out: PathBuf) -> Result<i32> {
    use rayon::prelude::*;
    let grid = parse_grid(&a.b_grid)?;
    let pairs = a
        .axes
        .iter()
        .map(|s| match s.chars().collect::<Vec<_>>().as_slice() {
            [p, q] => Ok((axis(*p)?, axis(*q)?)),
            _ => Err(Error::Input(format!("axis pair `{s}` needs two letters"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let l_max = a.l_max.unwrap_or(a.n / 2 + 1);
    if l_max < 2 || l_max > a.n {
        return Err(Error::Input(format!("--l-max must lie in 2..={}", a.n)));
    }
    let lanczos = LanczosConfig {
        tol: 1e-11,
        seed: common.seed,
        ..LanczosConfig::default()
    };
    let blocks = grid
        .par_iter()
        .map(|&b| -> Result<Vec<Vec<String>>> {
            let gs = ground_state(&cluster_hamiltonian(a.n, b)?, &lanczos)?;
            let mut rows = Vec::new();
            for l in 2..=l_max {
                for &(p, q) in &pairs {
                    let v = two_point_connected(&gs.state, p, q, 0, l - 1)?;
                    rows.push(vec![
                        g12(b),
                        l.to_string(),
                        p.symbol().to_string(),
                        q.symbol().to_string(),
                        g12(v),
                    ]);
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut run = RunDir::create(out)?;
    run.write_csv("corr.csv", &["B", "L", "alpha", "beta", "value"], &blocks.concat())?;
    if let Some(lm) = a.analytic_l_max {
        #[derive(Serialize)]
        struct Entry {
            #[serde(rename = "B")]
            b: f64,
            estimate: Option<LengthEstimateJson>,
            error: Option<String>,
        }
        let mut lengths = Vec::new();
        for &b in &grid {
            let s = czz_series(b, 3..=lm)?;
            let name = format!("czz_B{}.csv", g12(b));
            let p = run.path().join(&name);
            write_series_csv(File::create(&p).map_err(|e| Error::io(&p, e))?, &s)?;
            let (estimate, error) = match correlation_length(&s, &FitConfig::default()) {
                Ok(e) => (Some(LengthEstimateJson::from(&e)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            lengths.push(Entry { b, estimate, error });
        }
        run.write_json("lengths.json", &lengths)?;
    }
    finish(run, "corr", common, a)?;
    Ok(EXIT_OK)
}

fn survey(common: &Common, a: &SurveyArgs, out: PathBuf) -> Result<i32> {
    let grid = parse_grid(&a.b_grid)?;
    let windows = parse_usize_grid(&a.windows)?;
    let lanczos = LanczosConfig {
        tol: 1e-11,
        seed: common.seed,
        ..LanczosConfig::default()
    };
    #[derive(Serialize)]
    struct Entry {
        #[serde(rename = "B")]
        b: f64,
        reports: Vec<SurveyReportJson>,
        decay_rate: Option<f64>,
    }
    let mut entries = Vec::new();
    for &b in &grid {
        let mut reports = Vec::new();
        for &w in &windows {
            let cfg = SurveyConfig {
                mode: a
                    .samples
                    .map_or(SurveyMode::Exhaustive, |samples| SurveyMode::Sampled { samples }),
                threshold: a.threshold,
                seed: common.seed,
                ..SurveyConfig::exhaustive(w)
            };
            reports.push(cluster_survey(b, &cfg, &lanczos)?);
        }
        let decay_rate = survey_decay_rate(&reports).ok();
        entries.push(Entry {
            b,
            reports: reports.iter().map(SurveyReportJson::from).collect(),
            decay_rate,
        });
    }
    let mut run = RunDir::create(out)?;
    run.write_json("survey.json", &entries)?;
    finish(run, "survey", common, a)?;
    Ok(EXIT_OK)
}

fn locent(common: &Common, a: &LocentArgs, out: PathBuf) -> Result<i32> {
    let grid = parse_grid(&a.b_grid)?;
    let pair = a.pair;
    let lanczos = LanczosConfig {
        tol: 1e-11,
        seed: common.seed,
        ..LanczosConfig::default()
    };
    let mut results = Vec::new();
    for &b in &grid {
        let gs = ground_state(&cluster_hamiltonian(a.n, b)?, &lanczos)?;
        let r = match a.scheme {
            Scheme::Cluster => branch_average(&gs.state, &cluster_scheme_plan(a.n, pair)?)?,
            Scheme::LowerBound => {
                if pair.0 != 0 {
                    return Err(Error::Input("the lower-bound scheme needs the pair 0,L-1".into()));
                }
                branch_average(&gs.state, &lower_bound_plan(a.n, pair.1 + 1, SchemeParse::Primary)?)?
            }
            Scheme::Optimize => {
                let cfg = AnnealConfig {
                    steps: a.anneal_steps,
                    seed: common.seed,
                    ..AnnealConfig::default()
                };
                optimize_plan(&gs.state, pair, &cfg)?
            }
        };
        results.push(LocEntJson::new(b, &r));
    }
    let mut run = RunDir::create(out)?;
    run.write_json("locent.json", &results)?;
    print_json(&results)?;
    finish(run, "locent", common, a)?;
    Ok(EXIT_OK)
}

fn run_figure2(common: &Common, a: &Figure2Args, out: PathBuf) -> Result<i32> {
    let grid = parse_grid(&a.b_grid)?;
    let n = a.n.unwrap_or(if a.large {
        figure2::LARGE_SITES
    } else {
        figure2::DEFAULT_SITES
    });
    if !(11..=figure2::LARGE_SITES).contains(&n) {
        return Err(Error::Input(format!(
            "--n must lie in 11..={} for the entanglement fit",
            figure2::LARGE_SITES
        )));
    }
    if a.l_max < 8 {
        return Err(Error::Input("--l-max must be at least 8".into()));
    }
    let mut cfg = Figure2Config::new(grid, n, common.seed);
    cfg.l_max = a.l_max;
    cfg.anneal.steps = a.anneal_steps;
    let mut run = RunDir::create(out)?;
    let rows = figure2::figure2(&cfg);
    run.mark("sweep");
    run.write_csv(
        "correlation_length.csv",
        &figure2::LENGTH_HEADER,
        &figure2::correlation_rows(&rows),
    )?;
    let mut header = figure2::LENGTH_HEADER.to_vec();
    header.push("source");
    run.write_csv("entanglement_length.csv", &header, &figure2::entanglement_rows(&rows))?;
    run.write_csv(
        "entanglement_series.csv",
        &figure2::SERIES_HEADER,
        &figure2::series_rows(&rows),
    )?;
    let failures = rows.iter().filter(|r| r.failed()).count();
    finish(run, "figure2", common, a)?;
    if failures > 0 {
        eprintln!("{failures} grid point(s) failed; see the log");
        return Ok(EXIT_ERROR);
    }
    Ok(EXIT_OK)
}
