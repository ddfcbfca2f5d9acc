//! JSON and CSV representations of the core types.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use trispin_core::bose_hubbard::{BoseHubbardParams, EffectiveCouplings, TruncationReport};
use trispin_core::correlations::{SurveyMode, SurveyReport};
use trispin_core::free_fermion::{CorrelationKind, CorrelationSeries, LengthEstimate, LengthModel};
use trispin_core::localizable::LocEntResult;
use trispin_core::spin_core::{Boundary, Pauli, PauliString, SpinChainSpec};

use crate::error::{Error, Result};
use crate::numfmt::g12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    pub j_a: f64,
    pub j_b: f64,
    pub u_aa: f64,
    pub u_bb: f64,
    pub u_ab: f64,
}

impl From<ParamsJson> for BoseHubbardParams {
    fn from(p: ParamsJson) -> Self {
        BoseHubbardParams {
            j_a: p.j_a,
            j_b: p.j_b,
            u_aa: p.u_aa,
            u_bb: p.u_bb,
            u_ab: p.u_ab,
        }
    }
}

impl From<&BoseHubbardParams> for ParamsJson {
    fn from(p: &BoseHubbardParams) -> Self {
        ParamsJson {
            j_a: p.j_a,
            j_b: p.j_b,
            u_aa: p.u_aa,
            u_bb: p.u_bb,
            u_ab: p.u_ab,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingsJson {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub b_z_comp: f64,
    pub perturbative_ratio: f64,
    pub perturbative: bool,
}

impl CouplingsJson {
    /// Adding zero turns `-0.0` into `0.0` for symmetric species.
    pub fn new(c: &EffectiveCouplings, p: &BoseHubbardParams) -> Self {
        Self {
            lambda1: c.lambda1 + 0.0,
            lambda2: c.lambda2 + 0.0,
            lambda3: c.lambda3 + 0.0,
            lambda4: c.lambda4 + 0.0,
            b_z_comp: c.b_z_comp + 0.0,
            perturbative_ratio: p.perturbative_ratio(),
            perturbative: p.is_perturbative(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelJson {
    pub sector: [u8; 2],
    pub full: f64,
    pub effective: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub manifold_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationReportJson {
    pub levels: Vec<LevelJson>,
    pub max_rel_dev: f64,
    pub max_abs_dev: f64,
    pub bandwidth: f64,
    pub ambiguous: bool,
    pub perturbative_ratio: f64,
    pub perturbative: bool,
}

impl From<&TruncationReport> for TruncationReportJson {
    fn from(r: &TruncationReport) -> Self {
        Self {
            levels: r
                .levels
                .iter()
                .map(|l| LevelJson {
                    sector: [l.sector.0, l.sector.1],
                    full: l.full,
                    effective: l.effective,
                    abs_dev: l.abs_dev,
                    rel_dev: l.rel_dev,
                    manifold_weight: l.manifold_weight,
                })
                .collect(),
            max_rel_dev: r.max_rel_dev,
            max_abs_dev: r.max_abs_dev,
            bandwidth: r.bandwidth,
            ambiguous: r.ambiguous,
            perturbative_ratio: r.perturbative_ratio,
            perturbative: r.perturbative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: f64,
    pub factors: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainJson {
    pub n: usize,
    pub boundary: String,
    pub terms: Vec<TermJson>,
}

impl From<&SpinChainSpec> for SpinChainJson {
    fn from(s: &SpinChainSpec) -> Self {
        Self {
            n: s.n_sites(),
            boundary: match s.boundary() {
                Boundary::Periodic => "periodic",
                Boundary::Open => "open",
            }
            .into(),
            terms: s
                .terms()
                .iter()
                .map(|t| TermJson {
                    coeff: t.coeff(),
                    factors: t
                        .factors()
                        .iter()
                        .map(|&(site, p)| (site, p.symbol().to_string()))
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&SpinChainJson> for SpinChainSpec {
    type Error = Error;

    fn try_from(j: &SpinChainJson) -> Result<Self> {
        let boundary = match j.boundary.as_str() {
            "periodic" => Boundary::Periodic,
            "open" => Boundary::Open,
            other => return Err(Error::Input(format!("unknown boundary `{other}`"))),
        };
        let terms = j
            .terms
            .iter()
            .map(|t| {
                let factors = t
                    .factors
                    .iter()
                    .map(|(site, sym)| {
                        let mut chars = sym.chars();
                        match (chars.next().and_then(Pauli::from_symbol), chars.next()) {
                            (Some(p), None) => Ok((*site, p)),
                            _ => Err(Error::Input(format!("unknown Pauli symbol `{sym}`"))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PauliString::new(t.coeff, factors)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpinChainSpec::new(j.n, boundary, terms)?)
    }
}

pub fn model_name(m: LengthModel) -> &'static str {
    match m {
        LengthModel::Exponential => "exponential",
        LengthModel::PowerLaw => "power_law",
        LengthModel::Saturating => "saturating",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimateJson {
    /// `null` when the length diverges.
    pub xi: Option<f64>,
    pub model: String,
    pub residual: f64,
    pub window: [usize; 2],
}

impl From<&LengthEstimate> for LengthEstimateJson {
    fn from(e: &LengthEstimate) -> Self {
        Self {
            xi: e.xi.is_finite().then_some(e.xi),
            model: model_name(e.model).into(),
            residual: e.fit_residual,
            window: [e.window.0, e.window.1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyReportJson {
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub window: usize,
    pub n_sites: usize,
    pub mode: String,
    pub total: u64,
    pub nonvanishing: u64,
    pub fraction: f64,
    pub threshold: f64,
}

impl From<&SurveyReport> for SurveyReportJson {
    fn from(r: &SurveyReport) -> Self {
        Self {
            b: r.b_field,
            window: r.n_sites_window,
            n_sites: r.n_sites,
            mode: match r.mode {
                SurveyMode::Exhaustive => "exhaustive".into(),
                SurveyMode::Sampled { samples } => format!("sampled:{samples}"),
            },
            total: r.total,
            nonvanishing: r.nonvanishing,
            fraction: r.fraction,
            threshold: r.threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocEntJson {
    #[serde(rename = "B")]
    pub b: f64,
    pub n: usize,
    pub pair: [usize; 2],
    pub value: f64,
    /// Measured site to `[theta, phi]`.
    pub plan: BTreeMap<usize, [f64; 2]>,
    pub branches: usize,
}

impl LocEntJson {
    pub fn new(b: f64, r: &LocEntResult) -> Self {
        let (p, q) = r.plan.pair();
        Self {
            b,
            n: r.plan.n_sites(),
            pair: [p, q],
            value: r.value,
            plan: r
                .plan
                .measured()
                .into_iter()
                .map(|(s, a)| (s, [a.theta, a.phi]))
                .collect(),
            branches: r.branches,
        }
    }
}

/// Writes rows of preformatted fields under `header`.
pub fn write_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// `L,value` table of a correlation series.
pub fn write_series_csv<W: Write>(w: W, s: &CorrelationSeries) -> Result<()> {
    let rows: Vec<Vec<String>> = s
        .separations()
        .iter()
        .zip(s.values())
        .map(|(l, v)| vec![l.to_string(), g12(*v)])
        .collect();
    write_csv(w, &["L", "value"], &rows)
}

pub fn read_series_csv<R: Read>(r: R, kind: CorrelationKind) -> Result<CorrelationSeries> {
    #[derive(Deserialize)]
    struct Row {
        #[serde(rename = "L")]
        l: usize,
        value: f64,
    }
    let mut ls = Vec::new();
    let mut vs = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: Row = row?;
        ls.push(row.l);
        vs.push(row.value);
    }
    Ok(CorrelationSeries::new(ls, vs, kind)?)
}
