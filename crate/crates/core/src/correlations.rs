//! Two-point and multi-point correlators on exact states, and the census of
//! random Pauli strings with non-vanishing expectation.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, resource, Error, Result};
use crate::spin_core::{
    cluster_hamiltonian, expectation, ground_state, pauli_expectation_raw, Axis, LanczosConfig, Pauli, PauliString,
    StateVector,
};

/// `<s^a_i s^b_j> - <s^a_i><s^b_j>`.
pub fn two_point_connected(state: &StateVector, alpha: Axis, beta: Axis, i: usize, j: usize) -> Result<f64> {
    let n = state.n_sites();
    if i >= n || j >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: i.max(j) + 1,
        });
    }
    if i == j {
        return Err(domain("connected correlator needs two distinct sites"));
    }
    let both = PauliString::new(1.0, [(i, alpha.into()), (j, beta.into())])?;
    let a = PauliString::new(1.0, [(i, Pauli::from(alpha))])?;
    let b = PauliString::new(1.0, [(j, Pauli::from(beta))])?;
    Ok(expectation(state, &both)? - expectation(state, &a)? * expectation(state, &b)?)
}

/// Plain expectation `<P>`, coefficient included.
pub fn n_point(state: &StateVector, op: &PauliString) -> Result<f64> {
    expectation(state, op)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SurveyMode {
    Exhaustive,
    Sampled { samples: usize },
}

/// Exhaustive surveys enumerate `4^window` strings; this bounds the count.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyConfig {
    pub window: usize,
    pub mode: SurveyMode,
    pub threshold: f64,
    pub seed: u64,
}

impl SurveyConfig {
    pub fn exhaustive(window: usize) -> Self {
        Self {
            window,
            mode: SurveyMode::Exhaustive,
            threshold: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyReport {
    pub n_sites_window: usize,
    pub n_sites: usize,
    /// Set when the state is a cluster ground state built by [`cluster_survey`].
    pub b_field: Option<f64>,
    pub mode: SurveyMode,
    pub total: u64,
    pub nonvanishing: u64,
    pub fraction: f64,
    pub threshold: f64,
}

fn string_from_digits(mut code: u64, window: usize) -> PauliString {
    let factors = (0..window).map(|site| {
        let p = Pauli::ALL[(code % 4) as usize];
        code /= 4;
        (site, p)
    });
    PauliString::new(1.0, factors).expect("distinct sites")
}

/// Fraction of Pauli strings on sites `0..window` (identity factors allowed)
/// whose expectation exceeds the threshold in magnitude.
pub fn survey(state: &StateVector, cfg: &SurveyConfig) -> Result<SurveyReport> {
    let w = cfg.window;
    if w > state.n_sites() {
        return Err(domain(alloc::format!(
            "window of {w} sites exceeds the {}-site state",
            state.n_sites()
        )));
    }
    if w == 0 {
        return Err(domain("survey window must be non-empty"));
    }
    let amps = state.amplitudes();
    let hit = |code: u64| pauli_expectation_raw(amps, &string_from_digits(code, w)).norm() > cfg.threshold;
    let (total, nonvanishing) = match cfg.mode {
        SurveyMode::Exhaustive => {
            let total = 4u64
                .checked_pow(w as u32)
                .filter(|&t| t <= EXHAUSTIVE_LIMIT)
                .ok_or_else(|| {
                    resource(alloc::format!(
                        "exhaustive survey over {w} sites exceeds 4^w <= {EXHAUSTIVE_LIMIT}"
                    ))
                })?;
            (total, (0..total).filter(|&c| hit(c)).count() as u64)
        }
        SurveyMode::Sampled { samples } => {
            if samples == 0 {
                return Err(domain("sampled survey needs at least one sample"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let count = (0..samples)
                .filter(|_| {
                    let code = (0..w).fold(0u64, |acc, k| acc + (rng.random_range(0..4u64) << (2 * k)));
                    hit(code)
                })
                .count();
            (samples as u64, count as u64)
        }
    };
    Ok(SurveyReport {
        n_sites_window: w,
        n_sites: state.n_sites(),
        b_field: None,
        mode: cfg.mode,
        total,
        nonvanishing,
        fraction: nonvanishing as f64 / total as f64,
        threshold: cfg.threshold,
    })
}

/// Smallest multiple of four holding the window plus four spectator sites.
///
/// Rings whose length is not a multiple of four break the two-sublattice
/// structure of the cluster ring and give erratic census counts.
pub fn survey_ring_size(window: usize) -> usize {
    (window + 4).div_ceil(4) * 4
}

/// Census on the ground state of the cluster ring of [`survey_ring_size`] sites.
pub fn cluster_survey(b_field: f64, cfg: &SurveyConfig, lanczos: &LanczosConfig) -> Result<SurveyReport> {
    let n = survey_ring_size(cfg.window);
    let gs = ground_state(&cluster_hamiltonian(n, b_field)?, lanczos)?;
    let mut r = survey(&gs.state, cfg)?;
    r.b_field = Some(b_field);
    Ok(r)
}

/// Per-site decay rate `exp(slope)` of `log(fraction)` against window size.
pub fn survey_decay_rate(reports: &[SurveyReport]) -> Result<f64> {
    if reports.len() < 2 || reports.iter().any(|r| r.fraction <= 0.0) {
        return Err(domain("decay rate needs two or more non-zero fractions"));
    }
    let x: Vec<f64> = reports.iter().map(|r| r.n_sites_window as f64).collect();
    let y: Vec<f64> = reports.iter().map(|r| r.fraction.ln()).collect();
    let (slope, _, _) = crate::free_fermion::linear_fit(&x, &y);
    Ok(slope.exp())
}
