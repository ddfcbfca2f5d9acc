use trispin_core::localizable::*;
use trispin_core::spin_core::*;

fn gs(n: usize, b: f64) -> StateVector {
    let cfg = LanczosConfig { tol: 1e-11, ..LanczosConfig::default() };
    ground_state(&cluster_hamiltonian(n, b).unwrap(), &cfg).unwrap().state
}

#[test]
fn lower_bound_converges_to_limit() {
    for b in [0.3f64, 0.5, 0.8] {
        let limit = (1.0 - b * b).powf(0.25);
        let s = lower_bound_series(b, 2..=6, SchemeParse::Primary, &LanczosConfig::default()).unwrap();
        let dev: Vec<f64> = s.values().iter().map(|v| (v - limit).abs()).collect();
        for w in dev.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "B = {b}: {:?}", s.values());
        }
        assert!(dev[dev.len() - 1] < 0.03);
    }
}

#[test]
fn optimized_entanglement_decreases_within_parity() {
    // odd and even separations form two interleaved sequences, the even one larger
    let cfg = AnnealConfig { steps: 40, ..AnnealConfig::default() };
    for b in [0.5, 1.5] {
        let s = gs(12, b);
        let e: Vec<f64> = (1..=6).map(|d| optimize_plan(&s, (0, d), &cfg).unwrap().value).collect();
        for parity in 0..2 {
            let seq: Vec<f64> = e.iter().skip(parity).step_by(2).copied().collect();
            for w in seq.windows(2) {
                assert!(w[1] <= w[0] + 1e-6, "B = {b}: {e:?}");
            }
        }
        assert!(e[1] > e[0], "B = {b}: {e:?}");
    }
}

#[test]
fn optimizer_not_below_lower_bound() {
    let s = gs(9, 0.5);
    let lb = branch_average(&s, &lower_bound_plan(9, 5, SchemeParse::Primary).unwrap()).unwrap().value;
    let opt = optimize_plan(&s, (0, 4), &AnnealConfig { steps: 30, ..AnnealConfig::default() }).unwrap().value;
    assert!(opt >= lb - 1e-12, "{opt} < {lb}");
}
