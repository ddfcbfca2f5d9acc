//! Localizable entanglement: average two-spin concurrence left behind by
//! projective single-site measurements on every other spin.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, resource, Error, Result};
use crate::free_fermion::{correlation_length, CorrelationKind, CorrelationSeries, FitConfig, LengthEstimate};
use crate::spin_core::{cluster_hamiltonian, ground_state, LanczosConfig, StateVector};

const NORM_TOL: f64 = 1e-10;

/// `2 |a00 a11 - a01 a10|` with index bit 0 = first spin, bit 1 = second spin.
pub fn concurrence_pure(a: &[Complex64; 4]) -> Result<f64> {
    let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    Ok(concurrence_raw(a))
}

#[inline]
fn concurrence_raw(a: &[Complex64; 4]) -> f64 {
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

fn wrap_angle(x: f64) -> f64 {
    let r = x % (2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Measurement direction `(sin t cos f, sin t sin f, cos t)` on the Bloch sphere.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

impl Angles {
    pub const Z: Angles = Angles { theta: 0.0, phi: 0.0 };
    pub const X: Angles = Angles {
        theta: FRAC_PI_2,
        phi: 0.0,
    };
    pub const Y: Angles = Angles {
        theta: FRAC_PI_2,
        phi: FRAC_PI_2,
    };

    /// Folds `theta` into `[0, pi]` and `phi` into `[0, 2 pi)` without changing the direction.
    pub fn canonical(self) -> Self {
        let mut t = wrap_angle(self.theta);
        let mut f = self.phi;
        if t > PI {
            t = 2.0 * PI - t;
            f += PI;
        }
        Angles {
            theta: t,
            phi: wrap_angle(f),
        }
    }

    /// Conjugated eigenvectors `<+n|` and `<-n|`.
    fn bras(self) -> [[Complex64; 2]; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [
            [Complex64::new(c, 0.0), (e * s).conj()],
            [-(e.conj() * s).conj(), Complex64::new(c, 0.0)],
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPlan {
    n_sites: usize,
    pair: (usize, usize),
    angles: Vec<Option<Angles>>,
}

impl MeasurementPlan {
    /// `measured` lists one direction per site other than the pair, in ascending site order.
    pub fn new(n_sites: usize, pair: (usize, usize), measured: Vec<Angles>) -> Result<Self> {
        let (p, q) = pair;
        if p == q || p >= n_sites || q >= n_sites {
            return Err(domain(alloc::format!(
                "invalid target pair ({p}, {q}) for {n_sites} sites"
            )));
        }
        if measured.len() + 2 != n_sites {
            return Err(Error::DimensionMismatch {
                expected: n_sites - 2,
                found: measured.len(),
            });
        }
        if measured.iter().any(|a| !a.theta.is_finite() || !a.phi.is_finite()) {
            return Err(domain("measurement angles must be finite"));
        }
        let mut it = measured.into_iter();
        let angles = (0..n_sites)
            .map(|s| {
                if s == p || s == q {
                    None
                } else {
                    it.next().map(Angles::canonical)
                }
            })
            .collect();
        Ok(Self { n_sites, pair, angles })
    }

    pub fn from_fn(n_sites: usize, pair: (usize, usize), f: impl FnMut(usize) -> Angles) -> Result<Self> {
        let measured = (0..n_sites).filter(|&s| s != pair.0 && s != pair.1).map(f).collect();
        Self::new(n_sites, pair, measured)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn angle(&self, site: usize) -> Option<Angles> {
        self.angles.get(site).copied().flatten()
    }

    pub fn measured_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_sites).filter(move |&s| self.angles[s].is_some())
    }

    pub fn measured(&self) -> Vec<(usize, Angles)> {
        self.angles
            .iter()
            .enumerate()
            .filter_map(|(s, a)| a.map(|a| (s, a)))
            .collect()
    }

    fn set(&mut self, site: usize, a: Angles) {
        self.angles[site] = Some(a.canonical());
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchResult {
    /// Bit `k` is the outcome on the `k`-th measured site in ascending order; 0 is `+n`.
    pub outcome: u64,
    pub probability: f64,
    /// Normalized residual state, bit 0 = first spin of the pair.
    pub residual: [Complex64; 4],
    pub concurrence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocEntResult {
    pub value: f64,
    pub plan: MeasurementPlan,
    pub branches: usize,
    pub probability_sum: f64,
    pub min_concurrence: f64,
    /// Best value after each temperature step when produced by the optimizer.
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchConfig {
    pub max_measured: usize,
    /// Branches (and whole subtrees) below this probability are skipped.
    pub cutoff: f64,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            max_measured: 20,
            cutoff: 1e-14,
        }
    }
}

/// A state reordered so the pair sits on bits 0 and 1 and measured sites
/// follow in ascending order, with scratch space for the contraction tree.
struct Contractor {
    m: usize,
    levels: Vec<Vec<Complex64>>,
    cutoff: f64,
}

#[derive(Default)]
struct Tally {
    value: f64,
    prob: f64,
    branches: usize,
    min_c: f64,
}

impl Contractor {
    fn new(state: &StateVector, pair: (usize, usize), cfg: &BranchConfig) -> Result<Self> {
        let n = state.n_sites();
        let (p, q) = pair;
        if p == q || p >= n || q >= n {
            return Err(domain(alloc::format!("invalid target pair ({p}, {q}) for {n} sites")));
        }
        let m = n - 2;
        if m > cfg.max_measured {
            return Err(resource(alloc::format!(
                "{m} measured spins exceeds the cap of {}",
                cfg.max_measured
            )));
        }
        let mut target = vec![0usize; n];
        target[p] = 0;
        target[q] = 1;
        let mut next = 2;
        for (s, t) in target.iter_mut().enumerate() {
            if s != p && s != q {
                *t = next;
                next += 1;
            }
        }
        let src = state.amplitudes();
        let mut top = vec![Complex64::new(0.0, 0.0); src.len()];
        for (b, &a) in src.iter().enumerate() {
            let mut nb = 0usize;
            for (s, &t) in target.iter().enumerate() {
                nb |= (b >> s & 1) << t;
            }
            top[nb] = a;
        }
        let mut levels = Vec::with_capacity(m + 1);
        levels.push(top);
        for k in 1..=m {
            levels.push(vec![Complex64::new(0.0, 0.0); 1 << (n - k)]);
        }
        Ok(Self {
            m,
            levels,
            cutoff: cfg.cutoff,
        })
    }

    /// Walks the tree with `bras[k]` for measured slot `k` (ascending site order).
    fn run(&mut self, bras: &[[[Complex64; 2]; 2]], mut visit: impl FnMut(u64, f64, &[Complex64; 4])) -> Tally {
        let mut t = Tally {
            min_c: f64::INFINITY,
            ..Tally::default()
        };
        self.descend(0, 0, bras, &mut t, &mut visit);
        t
    }

    fn descend(
        &mut self,
        depth: usize,
        outcome: u64,
        bras: &[[[Complex64; 2]; 2]],
        t: &mut Tally,
        visit: &mut impl FnMut(u64, f64, &[Complex64; 4]),
    ) {
        if depth == self.m {
            let v = &self.levels[depth];
            let a = [v[0], v[1], v[2], v[3]];
            let prob: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let c = concurrence_raw(&a) / prob;
            t.value += prob * c;
            t.prob += prob;
            t.branches += 1;
            t.min_c = t.min_c.min(c);
            visit(outcome, prob, &a);
            return;
        }
        // the highest remaining bit belongs to the highest unmeasured slot
        let slot = self.m - 1 - depth;
        for (o, bra) in bras[slot].iter().enumerate() {
            let (head, tail) = self.levels.split_at_mut(depth + 1);
            let src = &head[depth];
            let dst = &mut tail[0];
            let half = dst.len();
            let mut norm = 0.0;
            for x in 0..half {
                let z = bra[0] * src[x] + bra[1] * src[x + half];
                norm += z.norm_sqr();
                dst[x] = z;
            }
            if norm < self.cutoff {
                continue;
            }
            self.descend(depth + 1, outcome | (o as u64) << slot, bras, t, visit);
        }
    }
}

fn plan_bras(plan: &MeasurementPlan) -> Vec<[[Complex64; 2]; 2]> {
    plan.measured().into_iter().map(|(_, a)| a.bras()).collect()
}

fn check_plan(state: &StateVector, plan: &MeasurementPlan) -> Result<()> {
    if plan.n_sites() != state.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: state.n_sites(),
            found: plan.n_sites(),
        });
    }
    Ok(())
}

/// Average concurrence of the pair over every measurement outcome of a fixed plan.
pub fn branch_average(state: &StateVector, plan: &MeasurementPlan) -> Result<LocEntResult> {
    branch_average_with(state, plan, &BranchConfig::default())
}

pub fn branch_average_with(state: &StateVector, plan: &MeasurementPlan, cfg: &BranchConfig) -> Result<LocEntResult> {
    check_plan(state, plan)?;
    let mut c = Contractor::new(state, plan.pair(), cfg)?;
    let t = c.run(&plan_bras(plan), |_, _, _| {});
    Ok(LocEntResult {
        value: t.value,
        plan: plan.clone(),
        branches: t.branches,
        probability_sum: t.prob,
        min_concurrence: t.min_c,
        trace: Vec::new(),
    })
}

/// Every retained branch of a fixed plan, in outcome order.
pub fn branch_results(state: &StateVector, plan: &MeasurementPlan, cfg: &BranchConfig) -> Result<Vec<BranchResult>> {
    check_plan(state, plan)?;
    let mut c = Contractor::new(state, plan.pair(), cfg)?;
    let mut out = Vec::new();
    c.run(&plan_bras(plan), |outcome, prob, a| {
        let s = prob.sqrt();
        let residual = [a[0] / s, a[1] / s, a[2] / s, a[3] / s];
        out.push(BranchResult {
            outcome,
            probability: prob,
            concurrence: concurrence_raw(&residual),
            residual,
        });
    });
    out.sort_by_key(|b| b.outcome);
    Ok(out)
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum SchemeParse {
    /// `X` on the spin next to the first target, `Z` on every other measured spin.
    #[default]
    Primary,
    /// `X` on the spin next to the first target and on every spin outside the
    /// segment between the targets, `Z` inside the segment.
    Alternative,
}

/// Lower-bound scheme for targets at sites `0` and `l - 1` of an `n`-site ring, `l` odd.
pub fn lower_bound_plan(n: usize, l: usize, parse: SchemeParse) -> Result<MeasurementPlan> {
    if l < 3 || l % 2 == 0 {
        return Err(domain(alloc::format!(
            "the scheme needs an odd separation L = 2k + 1 with k >= 1, got L = {l}"
        )));
    }
    if l > n {
        return Err(domain(alloc::format!("separation {l} does not fit on {n} sites")));
    }
    MeasurementPlan::from_fn(n, (0, l - 1), |s| match parse {
        _ if s == 1 => Angles::X,
        SchemeParse::Alternative if s > l - 1 => Angles::X,
        _ => Angles::Z,
    })
}

/// `Z` on the spins strictly between the targets along the shorter arc, `X` on the rest.
///
/// For antipodal targets the arc through increasing indices from the lower target is used.
pub fn cluster_scheme_plan(n: usize, pair: (usize, usize)) -> Result<MeasurementPlan> {
    let (lo, hi) = (pair.0.min(pair.1), pair.0.max(pair.1));
    let inner = hi - lo;
    let direct = inner <= n - inner;
    MeasurementPlan::from_fn(n, pair, |s| {
        let between = s > lo && s < hi;
        if between == direct {
            Angles::Z
        } else {
            Angles::X
        }
    })
}

/// Lower-bound scheme on the ground state of the `L`-site cluster ring for each `L = 2k + 1`.
pub fn lower_bound_series(
    b_field: f64,
    ks: impl IntoIterator<Item = usize>,
    parse: SchemeParse,
    lanczos: &LanczosConfig,
) -> Result<CorrelationSeries> {
    let mut ls = Vec::new();
    let mut vals = Vec::new();
    for k in ks {
        let l = 2 * k + 1;
        let gs = ground_state(&cluster_hamiltonian(l, b_field)?, lanczos)?;
        let plan = lower_bound_plan(l, l, parse)?;
        ls.push(l);
        vals.push(branch_average(&gs.state, &plan)?.value);
    }
    CorrelationSeries::new(ls, vals, CorrelationKind::Generic)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealConfig {
    pub t0: f64,
    pub cooling: f64,
    pub steps: usize,
    pub proposals_per_step: usize,
    /// Proposal width at `t0`; shrinks in proportion to the temperature.
    pub sigma0: f64,
    pub random_restarts: usize,
    pub seed: u64,
    pub branch: BranchConfig,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            t0: 0.5,
            cooling: 0.97,
            steps: 200,
            proposals_per_step: 50,
            sigma0: 0.6,
            random_restarts: 1,
            seed: 0x5eed,
            branch: BranchConfig::default(),
        }
    }
}

/// Simulated annealing over all measurement directions.
///
/// Chains start from the cluster scheme, from the lower-bound scheme when the
/// pair geometry admits it, and from `random_restarts` random plans. The best
/// plan over all chains is returned; ties go to the earliest chain.
pub fn optimize_plan(state: &StateVector, pair: (usize, usize), cfg: &AnnealConfig) -> Result<LocEntResult> {
    let n = state.n_sites();
    let mut c = Contractor::new(state, pair, &cfg.branch)?;
    if cfg.t0.is_nan() || cfg.t0 <= 0.0 || !(0.0..1.0).contains(&cfg.cooling) || cfg.cooling == 0.0 {
        return Err(domain("annealing needs t0 > 0 and cooling in (0, 1)"));
    }

    let mut starts = vec![cluster_scheme_plan(n, pair)?];
    let (lo, hi) = (pair.0.min(pair.1), pair.0.max(pair.1));
    if lo == 0 && (hi + 1) % 2 == 1 && hi >= 2 {
        let mut p = lower_bound_plan(n, hi + 1, SchemeParse::Primary)?;
        p.pair = pair;
        starts.push(p);
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_restarts {
        let plan = MeasurementPlan::from_fn(n, pair, |_| Angles {
            theta: seeder.random::<f64>() * PI,
            phi: seeder.random::<f64>() * 2.0 * PI,
        })?;
        starts.push(plan);
    }

    let mut best: Option<(f64, MeasurementPlan, Vec<f64>)> = None;
    for (chain, start) in starts.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(chain as u64 + 1);
        let (v, plan, trace) = anneal_chain(&mut c, start, cfg, &mut rng);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, plan, trace));
        }
    }
    let (_, plan, trace) = best.expect("at least one chain");
    let t = c.run(&plan_bras(&plan), |_, _, _| {});
    Ok(LocEntResult {
        value: t.value,
        plan,
        branches: t.branches,
        probability_sum: t.prob,
        min_concurrence: t.min_c,
        trace,
    })
}

fn anneal_chain(
    c: &mut Contractor,
    start: MeasurementPlan,
    cfg: &AnnealConfig,
    rng: &mut ChaCha8Rng,
) -> (f64, MeasurementPlan, Vec<f64>) {
    let sites: Vec<usize> = start.measured_sites().collect();
    let mut bras = plan_bras(&start);
    let mut cur = start;
    let mut cur_v = c.run(&bras, |_, _, _| {}).value;
    let mut best = (cur_v, cur.clone());
    let mut trace = Vec::with_capacity(cfg.steps);
    if sites.is_empty() {
        return (cur_v, cur, trace);
    }
    let mut temp = cfg.t0;
    for _ in 0..cfg.steps {
        let sigma = cfg.sigma0 * temp / cfg.t0;
        for _ in 0..cfg.proposals_per_step {
            let slot = rng.random_range(0..sites.len());
            let site = sites[slot];
            let old = cur.angle(site).expect("measured site");
            let dt: f64 = StandardNormal.sample(rng);
            let df: f64 = StandardNormal.sample(rng);
            let new = Angles {
                theta: old.theta + sigma * dt,
                phi: old.phi + sigma * df,
            }
            .canonical();
            let saved = bras[slot];
            bras[slot] = new.bras();
            let v = c.run(&bras, |_, _, _| {}).value;
            let accept = v >= cur_v || rng.random::<f64>() < ((v - cur_v) / temp).exp();
            if accept {
                cur.set(site, new);
                cur_v = v;
                if v > best.0 {
                    best = (v, cur.clone());
                }
            } else {
                bras[slot] = saved;
            }
        }
        trace.push(best.0);
        temp *= cfg.cooling;
    }
    (best.0, best.1, trace)
}

/// Decay length of `E(L)` with the same fit as [`correlation_length`].
///
/// A series that does not decay is reported as saturating with infinite length.
pub fn entanglement_length(series: &CorrelationSeries, cfg: &FitConfig) -> Result<LengthEstimate> {
    correlation_length(series, cfg)
}
