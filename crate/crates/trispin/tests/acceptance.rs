//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::time::Instant;

use trispin::figure2::{figure2, CorrPoint, EntPoint, Figure2Config};
use trispin::grid::parse_grid;
use trispin_core::bose_hubbard::{validate_perturbation, BoseHubbardParams};
use trispin_core::correlations::{cluster_survey, n_point, survey_decay_rate, two_point_connected, SurveyConfig};
use trispin_core::free_fermion::{correlation_length, czz_analytic, czz_series, FitConfig, LengthModel};
use trispin_core::localizable::{branch_results, cluster_scheme_plan, lower_bound_series, BranchConfig, SchemeParse};
use trispin_core::spin_core::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn tight() -> LanczosConfig {
    LanczosConfig {
        tol: 1e-11,
        ..LanczosConfig::default()
    }
}

fn gs(n: usize, b: f64) -> Result<GroundState, String> {
    ground_state(&cluster_hamiltonian(n, b).map_err(err)?, &tight()).map_err(err)
}

fn gap(n: usize, b: f64) -> Result<f64, String> {
    let levels = dense_spectrum(&cluster_hamiltonian(n, b).map_err(err)?).map_err(err)?;
    excitation_gap(&levels, 1e-8).ok_or_else(|| "no excited level".into())
}

fn c1_zero_field_gap() -> Outcome {
    for n in [6, 8, 10, 12] {
        let levels = dense_spectrum(&cluster_hamiltonian(n, 0.0).map_err(err)?).map_err(err)?;
        let g = excitation_gap(&levels, 1e-8).ok_or("no gap")?;
        ensure((g - 2.0).abs() < 1e-9, || format!("n = {n}: gap {g}"))?;
        for e in &levels {
            let m = (e + n as f64) / 2.0;
            ensure((m - m.round()).abs() < 1e-9, || {
                format!("n = {n}: level {e} off the ladder")
            })?;
        }
    }
    Ok("gap 2 and levels in {-n + 2m} for n = 6..12".into())
}

fn c2_gap_closing() -> Outcome {
    let (g05, g1, g15) = (gap(12, 0.5)?, gap(12, 1.0)?, gap(12, 1.5)?);
    ensure(g1 < g05 && g1 < g15, || format!("n = 12 gaps {g05} {g1} {g15}"))?;
    let by_n = [8, 10, 12, 14]
        .iter()
        .map(|&n| gap(n, 1.0))
        .collect::<Result<Vec<_>, _>>()?;
    ensure(by_n.windows(2).all(|w| w[1] < w[0]), || {
        format!("B = 1 gaps over n: {by_n:?}")
    })?;
    Ok(format!(
        "n = 12 gaps {g05:.4} > {g1:.4} < {g15:.4}; B = 1 gaps {by_n:.4?}"
    ))
}

fn c3_closed_form_vs_ed() -> Outcome {
    let mut worst = 0.0f64;
    for b in [0.0, 0.3, 0.5, 2.0] {
        let g = gs(16, b)?;
        for l in 3..=8 {
            let ed = two_point_connected(&g.state, Axis::Z, Axis::Z, 0, l - 1).map_err(err)?;
            let cf = czz_analytic(b, l).map_err(err)?;
            worst = worst.max((ed - cf).abs());
            ensure((ed - cf).abs() < 2e-2, || format!("B = {b}, L = {l}: ED {ed} vs {cf}"))?;
        }
    }
    Ok(format!("max |ED - closed form| = {worst:.2e}"))
}

fn c4_classification() -> Outcome {
    let mut report = Vec::new();
    for (b, want) in [
        (0.5, LengthModel::Exponential),
        (2.0, LengthModel::Exponential),
        (1.0, LengthModel::PowerLaw),
    ] {
        let e = correlation_length(&czz_series(b, 4..=40).map_err(err)?, &FitConfig::default()).map_err(err)?;
        ensure(
            e.model == want && (want != LengthModel::Exponential || e.xi.is_finite()),
            || format!("B = {b}: {:?} xi {}", e.model, e.xi),
        )?;
        report.push(format!("B = {b}: {:?} xi {:.3}", e.model, e.xi));
    }
    Ok(report.join(", "))
}

fn c5_deterministic_localization() -> Outcome {
    let n = 10;
    let g = gs(n, 0.0)?;
    let mut branches = 0;
    for p in 0..n {
        for q in p + 1..n {
            let plan = cluster_scheme_plan(n, (p, q)).map_err(err)?;
            for r in branch_results(&g.state, &plan, &BranchConfig::default()).map_err(err)? {
                ensure((r.concurrence - 1.0).abs() < 1e-9, || {
                    format!("pair ({p}, {q}): concurrence {}", r.concurrence)
                })?;
                branches += 1;
            }
        }
    }
    Ok(format!("{branches} branches over 45 pairs, all concurrence 1"))
}

fn c6_lower_bound_limit() -> Outcome {
    let mut report = Vec::new();
    for b in [0.3, 0.5, 0.8] {
        let limit = f64::powf(1.0 - b * b, 0.25);
        let s = lower_bound_series(b, 2..=5, SchemeParse::Primary, &tight()).map_err(err)?;
        let dev: Vec<f64> = s.values().iter().map(|v| (v - limit).abs()).collect();
        ensure(dev.windows(2).all(|w| w[1] <= w[0]), || {
            format!("B = {b}: not monotone, {:?}", s.values())
        })?;
        let last = *dev.last().unwrap();
        ensure(last < 0.03, || format!("B = {b}: final deviation {last}"))?;
        report.push(format!("B = {b}: dev {last:.4}"));
    }
    Ok(report.join(", "))
}

fn c7_figure2() -> Outcome {
    let grid = parse_grid("0:2:0.1").map_err(err)?;
    let rows = figure2(&Figure2Config::new(grid, 12, 0));
    for r in &rows {
        match &r.corr {
            CorrPoint::Fit(e) if (r.b.abs() - 1.0).abs() > 1e-9 => ensure(e.xi.is_finite(), || {
                format!("B = {}: correlation length {:?}", r.b, e.model)
            })?,
            CorrPoint::Fit(_) | CorrPoint::Vanishing => {}
            CorrPoint::Failed(e) => return Err(format!("B = {}: correlation channel failed: {e}", r.b)),
        }
        match &r.ent {
            EntPoint::Fit { estimate, .. } => {
                if r.b.abs() <= 0.9 + 1e-9 {
                    ensure(estimate.diverges(), || {
                        format!("B = {}: entanglement length {}", r.b, estimate.xi)
                    })?;
                }
                if r.b >= 1.2 - 1e-9 {
                    ensure(!estimate.diverges(), || {
                        format!("B = {}: entanglement length diverges", r.b)
                    })?;
                }
            }
            EntPoint::Failed(e) => return Err(format!("B = {}: entanglement channel failed: {e}", r.b)),
        }
    }
    let finite: Vec<String> = rows
        .iter()
        .filter_map(|r| match &r.ent {
            EntPoint::Fit { estimate, .. } if !estimate.diverges() => Some(format!("{}:{:.1}", r.b, estimate.xi)),
            _ => None,
        })
        .collect();
    Ok(format!(
        "{} grid points; finite entanglement lengths {}",
        rows.len(),
        finite.join(" ")
    ))
}

fn c8_census() -> Outcome {
    for w in [5, 6] {
        let r = cluster_survey(0.0, &SurveyConfig::exhaustive(w), &tight()).map_err(err)?;
        let want = 2f64.powi(-(2 + w as i32));
        ensure(r.fraction == want, || {
            format!("w = {w}: fraction {} vs {want}", r.fraction)
        })?;
    }
    let reports = (5..=8)
        .map(|w| cluster_survey(0.5, &SurveyConfig::exhaustive(w), &tight()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let rate = survey_decay_rate(&reports).map_err(err)?;
    ensure((0.80..=0.92).contains(&rate), || format!("B = 0.5 decay rate {rate}"))?;
    Ok(format!("exact fractions at w = 5, 6; B = 0.5 rate {rate:.4}"))
}

fn c9_three_point() -> Outcome {
    let n = 10;
    let g = gs(n, 0.0)?;
    let mut largest_other = 0.0f64;
    for start in 0..n {
        for code in 0..27usize {
            let ops = [code % 3, code / 3 % 3, code / 9].map(|o| Pauli::ALL[o + 1]);
            let p = PauliString::new(1.0, ops.iter().enumerate().map(|(k, &o)| ((start + k) % n, o))).map_err(err)?;
            let v = n_point(&g.state, &p).map_err(err)?;
            if ops == [Pauli::X, Pauli::Z, Pauli::X] {
                ensure((v - 1.0).abs() < 1e-10, || format!("XZX at {start}: {v}"))?;
            } else {
                largest_other = largest_other.max(v.abs());
                ensure(v.abs() < 1e-10, || format!("{ops:?} at {start}: {v}"))?;
            }
        }
    }
    Ok(format!("XZX = 1, largest other |<P>| = {largest_other:.1e}"))
}

fn c10_truncation() -> Outcome {
    let r1 = validate_perturbation(&BoseHubbardParams::symmetric(0.1, 1.0)).map_err(err)?;
    let r2 = validate_perturbation(&BoseHubbardParams::symmetric(0.05, 1.0)).map_err(err)?;
    ensure(r1.max_rel_dev <= 0.08, || {
        format!("relative deviation {}", r1.max_rel_dev)
    })?;
    let ratio = r1.max_abs_dev / r2.max_abs_dev;
    ensure(ratio >= 8.0, || format!("halving J shrinks the deviation by {ratio}"))?;
    Ok(format!("rel dev {:.4}, shrink factor {ratio:.2}", r1.max_rel_dev))
}

fn c11_raising_operator() -> Outcome {
    let mut worst = 0.0f64;
    for n in 4..=10 {
        let spec = cluster_hamiltonian(n, 0.0).map_err(err)?;
        let g = ground_state(&spec, &tight()).map_err(err)?;
        for k in 0..n {
            let psi = StateVector::normalized(n, apply_raising(&g.state, k).map_err(err)?).map_err(err)?;
            let h = apply(&spec, &psi).map_err(err)?;
            let e = g.energy + 2.0;
            let res = h
                .iter()
                .zip(psi.amplitudes())
                .map(|(h, a)| (h - a * e).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(res);
            ensure(res < 1e-9, || format!("n = {n}, k = {k}: residual {res}"))?;
        }
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("zero-field gap", c1_zero_field_gap),
        ("gap closing at |B| = 1", c2_gap_closing),
        ("closed-form C^zz vs exact diagonalization", c3_closed_form_vs_ed),
        ("criticality classification", c4_classification),
        ("deterministic localization at B = 0", c5_deterministic_localization),
        ("lower-bound limit", c6_lower_bound_limit),
        ("correlation and entanglement lengths over the field grid", c7_figure2),
        ("n-point census", c8_census),
        ("three-point selectivity", c9_three_point),
        ("perturbative truncation", c10_truncation),
        ("raising operator", c11_raising_operator),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {detail}", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
