//! Correlation length and entanglement length across a field grid.

use rayon::prelude::*;
use serde::Serialize;
use trispin_core::free_fermion::{
    correlation_length, czz_series, CorrelationKind, CorrelationSeries, FitConfig, LengthEstimate,
};
use trispin_core::localizable::{entanglement_length, lower_bound_series, optimize_plan, AnnealConfig, SchemeParse};
use trispin_core::spin_core::{cluster_hamiltonian, ground_state, LanczosConfig};

use crate::formats::model_name;
use crate::numfmt::g12;

pub const DEFAULT_SITES: usize = 12;
pub const LARGE_SITES: usize = 16;
pub const DEFAULT_L_MAX: usize = 40;
pub const DEFAULT_ANNEAL_STEPS: usize = 60;

#[derive(Clone, Debug)]
pub struct Figure2Config {
    pub grid: Vec<f64>,
    /// Ring size for the entanglement channel.
    pub n: usize,
    /// Largest separation of the analytic correlation channel.
    pub l_max: usize,
    pub fit: FitConfig,
    pub anneal: AnnealConfig,
    pub lanczos: LanczosConfig,
}

impl Figure2Config {
    pub fn new(grid: Vec<f64>, n: usize, seed: u64) -> Self {
        Self {
            grid,
            n,
            l_max: DEFAULT_L_MAX,
            fit: FitConfig::default(),
            anneal: AnnealConfig {
                steps: DEFAULT_ANNEAL_STEPS,
                seed,
                ..AnnealConfig::default()
            },
            lanczos: LanczosConfig::default(),
        }
    }
}

/// Outcome of the correlation channel at one field value.
#[derive(Clone, Debug)]
pub enum CorrPoint {
    Fit(LengthEstimate),
    /// All correlations lie below the noise floor.
    Vanishing,
    Failed(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntSource {
    /// The lower-bound scheme series already fails to decay.
    LowerBound,
    /// Optimized measurements over all pair separations.
    Optimized,
}

#[derive(Clone, Debug)]
pub enum EntPoint {
    Fit {
        estimate: LengthEstimate,
        source: EntSource,
        series: CorrelationSeries,
    },
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct Figure2Row {
    pub b: f64,
    pub corr: CorrPoint,
    pub ent: EntPoint,
}

impl Figure2Row {
    pub fn failed(&self) -> bool {
        matches!(self.corr, CorrPoint::Failed(_)) || matches!(self.ent, EntPoint::Failed(_))
    }
}

fn corr_point(b: f64, cfg: &Figure2Config) -> CorrPoint {
    let series = match czz_series(b, 3..=cfg.l_max) {
        Ok(s) => s,
        Err(e) => return CorrPoint::Failed(e.to_string()),
    };
    match correlation_length(&series, &cfg.fit) {
        Ok(e) => CorrPoint::Fit(e),
        Err(trispin_core::Error::NumericallyZero) => CorrPoint::Vanishing,
        Err(e) => CorrPoint::Failed(e.to_string()),
    }
}

fn pair_seed(base: u64, b: f64, d: usize) -> u64 {
    base ^ b.to_bits().rotate_left(21) ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// The lower-bound series decides divergence; otherwise the optimized series gives the length.
///
/// Separations are counted as `L` spins from one target to the other inclusive in both series.
fn ent_point(b: f64, cfg: &Figure2Config) -> trispin_core::Result<EntPoint> {
    let kmax = (cfg.n - 1) / 2;
    let lower = lower_bound_series(b, 1..=kmax, SchemeParse::Primary, &cfg.lanczos)?;
    let est = entanglement_length(&lower, &cfg.fit)?;
    if est.diverges() {
        return Ok(EntPoint::Fit {
            estimate: est,
            source: EntSource::LowerBound,
            series: lower,
        });
    }
    let gs = ground_state(&cluster_hamiltonian(cfg.n, b)?, &cfg.lanczos)?;
    let mut ls = Vec::new();
    let mut vals = Vec::new();
    for d in 1..=cfg.n / 2 {
        let anneal = AnnealConfig {
            seed: pair_seed(cfg.anneal.seed, b, d),
            ..cfg.anneal.clone()
        };
        ls.push(d + 1);
        vals.push(optimize_plan(&gs.state, (0, d), &anneal)?.value);
    }
    let series = CorrelationSeries::new(ls, vals, CorrelationKind::Generic)?;
    let estimate = entanglement_length(&series, &cfg.fit)?;
    Ok(EntPoint::Fit {
        estimate,
        source: EntSource::Optimized,
        series,
    })
}

/// Evaluates every grid point in parallel; failures are logged and kept in their row.
pub fn figure2(cfg: &Figure2Config) -> Vec<Figure2Row> {
    cfg.grid
        .par_iter()
        .map(|&b| {
            let corr = corr_point(b, cfg);
            let ent = ent_point(b, cfg).unwrap_or_else(|e| EntPoint::Failed(e.to_string()));
            if let CorrPoint::Failed(e) = &corr {
                log::warn!("B = {b}: correlation length failed: {e}");
            }
            if let EntPoint::Failed(e) = &ent {
                log::warn!("B = {b}: entanglement length failed: {e}");
            }
            log::info!("B = {b} done");
            Figure2Row { b, corr, ent }
        })
        .collect()
}

pub const LENGTH_HEADER: [&str; 7] = ["B", "xi", "model", "diverges", "residual", "window_lo", "window_hi"];
pub const SERIES_HEADER: [&str; 4] = ["B", "L", "E_loc", "xi_flag"];

fn estimate_fields(b: f64, e: &LengthEstimate) -> Vec<String> {
    vec![
        g12(b),
        g12(e.xi),
        model_name(e.model).into(),
        u8::from(e.diverges()).to_string(),
        g12(e.fit_residual),
        e.window.0.to_string(),
        e.window.1.to_string(),
    ]
}

fn failed_fields(b: f64) -> Vec<String> {
    vec![
        g12(b),
        String::new(),
        "error".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ]
}

pub fn correlation_rows(rows: &[Figure2Row]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| match &r.corr {
            CorrPoint::Fit(e) => estimate_fields(r.b, e),
            CorrPoint::Vanishing => {
                vec![
                    g12(r.b),
                    "0".into(),
                    "vanishing".into(),
                    "0".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]
            }
            CorrPoint::Failed(_) => failed_fields(r.b),
        })
        .collect()
}

/// Entanglement rows carry an extra `source` column.
pub fn entanglement_rows(rows: &[Figure2Row]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| match &r.ent {
            EntPoint::Fit { estimate, source, .. } => {
                let mut f = estimate_fields(r.b, estimate);
                f.push(match source {
                    EntSource::LowerBound => "lower_bound".into(),
                    EntSource::Optimized => "optimized".into(),
                });
                f
            }
            EntPoint::Failed(_) => {
                let mut f = failed_fields(r.b);
                f.push(String::new());
                f
            }
        })
        .collect()
}

pub fn series_rows(rows: &[Figure2Row]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in rows {
        if let EntPoint::Fit { estimate, series, .. } = &r.ent {
            let flag = u8::from(estimate.diverges()).to_string();
            for (l, v) in series.separations().iter().zip(series.values()) {
                out.push(vec![g12(r.b), l.to_string(), g12(*v), flag.clone()]);
            }
        }
    }
    out
}
