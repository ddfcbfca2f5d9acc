//! Thick-restart Lanczos for the lowest eigenpairs of a [`SpinChainSpec`].
//!
//! The Krylov basis is fully reorthogonalized, so the projected matrix is
//! formed from explicit inner products rather than the three-term recurrence.
//! That keeps the restart simple: the kept Ritz vectors enter with a diagonal
//! block and every later column is measured directly.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{resource, Error, Result};
use crate::spin_core::apply::CompiledHamiltonian;
use crate::spin_core::pauli::SpinChainSpec;
use crate::spin_core::state::{dot, norm_sqr, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct LanczosConfig {
    /// Converged when `||H y - theta y||` falls below this for every wanted pair.
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
    pub max_sites: usize,
    /// Two lowest Ritz values closer than this flag a degenerate ground space.
    pub degeneracy_tol: f64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            krylov_dim: 40,
            max_restarts: 500,
            seed: 0x5eed,
            max_sites: 20,
            degeneracy_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// The two lowest Ritz values agree within `degeneracy_tol`.
    pub degenerate: bool,
    pub residual: f64,
    pub restarts: usize,
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
}

/// Lowest eigenpair of `spec`, normalized, with the largest amplitude made real and positive.
pub fn ground_state(spec: &SpinChainSpec, cfg: &LanczosConfig) -> Result<GroundState> {
    check_size(spec, cfg)?;
    let h = CompiledHamiltonian::new(spec);
    let nev = if h.dim() >= 2 { 2 } else { 1 };
    let pairs = lowest_eigenpairs(&h, nev, cfg)?;
    let degenerate = pairs.values.len() > 1 && pairs.values[1] - pairs.values[0] < cfg.degeneracy_tol;
    let mut amps = pairs.vectors.into_iter().next().expect("at least one Ritz vector");
    fix_phase(&mut amps);
    Ok(GroundState {
        energy: pairs.values[0],
        state: StateVector::normalized(spec.n_sites(), amps)?,
        degenerate,
        residual: pairs.residuals[0],
        restarts: pairs.restarts,
    })
}

/// The `k` lowest Ritz values of `spec`, ascending.
///
/// A single Krylov sequence sees only one copy of an exactly degenerate
/// level, so repeated values are not guaranteed; distinct levels are.
pub fn low_spectrum(spec: &SpinChainSpec, k: usize, cfg: &LanczosConfig) -> Result<Vec<f64>> {
    check_size(spec, cfg)?;
    let h = CompiledHamiltonian::new(spec);
    Ok(lowest_eigenpairs(&h, k, cfg)?.values)
}

fn check_size(spec: &SpinChainSpec, cfg: &LanczosConfig) -> Result<()> {
    if spec.n_sites() > cfg.max_sites {
        return Err(resource(alloc::format!(
            "{} sites exceeds the iterative solver cap of {}",
            spec.n_sites(),
            cfg.max_sites
        )));
    }
    Ok(())
}

fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, a) in v.iter().enumerate() {
        if a.norm_sqr() > v[best].norm_sqr() * (1.0 + 1e-9) {
            best = i;
        }
    }
    let a = v[best];
    if a.norm() > 0.0 {
        let ph = a.conj() / a.norm();
        v.iter_mut().for_each(|x| *x *= ph);
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let n = norm_sqr(&v).sqrt();
    scale(&mut v, 1.0 / n);
    v
}

fn scale(v: &mut [Complex64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Orthogonalizes `w` against `basis` (two passes), returning the accumulated coefficients.
fn orthogonalize(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let p = dot(v, w);
            axpy(w, -p, v);
            *c += p;
        }
    }
    coeffs
}

/// A fresh random direction orthogonal to `basis`, or `None` once the space is exhausted.
fn fresh_direction(basis: &[Vec<Complex64>], dim: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    if basis.len() >= dim {
        return None;
    }
    for _ in 0..4 {
        let mut r = random_unit(dim, rng);
        orthogonalize(basis, &mut r);
        let n = norm_sqr(&r).sqrt();
        if n > 1e-8 {
            scale(&mut r, 1.0 / n);
            return Some(r);
        }
    }
    None
}

pub fn lowest_eigenpairs(h: &CompiledHamiltonian, nev: usize, cfg: &LanczosConfig) -> Result<Eigenpairs> {
    let dim = h.dim();
    let nev = nev.clamp(1, dim);
    let m = cfg.krylov_dim.max(nev + 2).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    basis.push(random_unit(dim, &mut rng));
    let mut proj = DMatrix::<Complex64>::zeros(m, m);
    let mut start = 0;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut best_energy = f64::INFINITY;
    let mut best_residual = f64::INFINITY;

    for restart in 0..cfg.max_restarts {
        let mut tail: Option<(Vec<Complex64>, f64)> = None;
        let mut exhausted = false;
        let mut j = start;
        while j < basis.len() {
            h.apply_into(&basis[j], &mut w);
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, c) in coeffs.iter().enumerate().take(j + 1) {
                if i == j {
                    proj[(j, j)] = Complex64::new(c.re, 0.0);
                } else {
                    proj[(i, j)] = *c;
                    proj[(j, i)] = c.conj();
                }
            }
            let beta = norm_sqr(&w).sqrt();
            let scale_ref = proj[(j, j)].re.abs().max(1.0);
            if basis.len() < m {
                if beta > 1e-12 * scale_ref {
                    let mut v = w.clone();
                    scale(&mut v, 1.0 / beta);
                    basis.push(v);
                } else if let Some(r) = fresh_direction(&basis, dim, &mut rng) {
                    basis.push(r);
                } else {
                    exhausted = true;
                }
            } else {
                tail = Some((w.clone(), beta));
            }
            j += 1;
        }

        let size = basis.len();
        let sub = proj.view((0, 0), (size, size)).clone_owned();
        let eig = SymmetricEigen::new(sub);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let beta_last = tail.as_ref().map_or(0.0, |t| t.1);
        let want = nev.min(size);
        let residuals: Vec<f64> = order[..want]
            .iter()
            .map(|&c| beta_last * eig.eigenvectors[(size - 1, c)].norm())
            .collect();
        if eig.eigenvalues[order[0]] < best_energy || residuals[0] < best_residual {
            best_energy = eig.eigenvalues[order[0]];
            best_residual = residuals[0];
        }
        let converged = exhausted || tail.is_none() || residuals.iter().all(|&r| r < cfg.tol);

        let ritz = |c: usize| -> Vec<Complex64> {
            let mut y = vec![Complex64::new(0.0, 0.0); dim];
            for (r, v) in basis.iter().enumerate() {
                axpy(&mut y, eig.eigenvectors[(r, c)], v);
            }
            y
        };

        if converged {
            let vectors: Vec<Vec<Complex64>> = order[..want]
                .iter()
                .map(|&c| {
                    let mut y = ritz(c);
                    let n = norm_sqr(&y).sqrt();
                    scale(&mut y, 1.0 / n);
                    y
                })
                .collect();
            return Ok(Eigenpairs {
                values: order[..want].iter().map(|&c| eig.eigenvalues[c]).collect(),
                vectors,
                residuals,
                restarts: restart,
            });
        }

        let keep = (size / 2).max(nev + 1).min(size - 1);
        let mut next: Vec<Vec<Complex64>> = order[..keep].iter().map(|&c| ritz(c)).collect();
        let (mut f, beta) = tail.expect("full basis has a residual");
        if beta > 1e-12 {
            // the kept Ritz vectors drift slightly out of orthogonality with f
            orthogonalize(&next, &mut f);
            let n = norm_sqr(&f).sqrt();
            scale(&mut f, 1.0 / n);
            next.push(f);
        } else if let Some(r) = fresh_direction(&next, dim, &mut rng) {
            next.push(r);
        }
        proj.fill(Complex64::new(0.0, 0.0));
        for (i, &c) in order[..keep].iter().enumerate() {
            proj[(i, i)] = Complex64::new(eig.eigenvalues[c], 0.0);
        }
        start = keep;
        basis = next;
    }

    Err(Error::NotConverged {
        iterations: cfg.max_restarts,
        best_energy,
        residual: best_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bose_hubbard::EffectiveCouplings;
    use crate::spin_core::{cluster_hamiltonian, dense_spectrum, expectation, triangle_chain_hamiltonian};

    #[test]
    fn zero_field_cluster_energy() {
        let g = ground_state(&cluster_hamiltonian(10, 0.0).unwrap(), &LanczosConfig::default()).unwrap();
        assert!((g.energy + 10.0).abs() < 1e-9);
        assert!(!g.degenerate);
    }

    #[test]
    fn matches_dense_solver() {
        for &b in &[0.3, 1.0, 1.7] {
            let spec = cluster_hamiltonian(8, b).unwrap();
            let dense = dense_spectrum(&spec).unwrap();
            let g = ground_state(&spec, &LanczosConfig::default()).unwrap();
            assert!((g.energy - dense[0]).abs() < 1e-9, "b = {b}");
            let e = spec
                .terms()
                .iter()
                .map(|t| expectation(&g.state, t).unwrap())
                .sum::<f64>();
            assert!((e - dense[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_hamiltonian() {
        let c = EffectiveCouplings {
            lambda1: 0.4,
            lambda2: -0.3,
            lambda3: 0.2,
            lambda4: 0.7,
            b_z_comp: 0.0,
        };
        let spec = triangle_chain_hamiltonian(&c, [0.1, 0.25, -0.3], 7).unwrap();
        let dense = dense_spectrum(&spec).unwrap();
        let low = low_spectrum(&spec, 3, &LanczosConfig::default()).unwrap();
        assert!((low[0] - dense[0]).abs() < 1e-9);
    }

    #[test]
    fn tiny_space_exhausts() {
        let spec = cluster_hamiltonian(3, 0.4).unwrap();
        let dense = dense_spectrum(&spec).unwrap();
        let g = ground_state(&spec, &LanczosConfig::default()).unwrap();
        assert!((g.energy - dense[0]).abs() < 1e-10);
    }

    #[test]
    fn site_cap() {
        let cfg = LanczosConfig {
            max_sites: 6,
            ..LanczosConfig::default()
        };
        assert!(matches!(
            ground_state(&cluster_hamiltonian(8, 0.0).unwrap(), &cfg),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = LanczosConfig {
            max_restarts: 1,
            krylov_dim: 4,
            tol: 1e-14,
            ..LanczosConfig::default()
        };
        match ground_state(&cluster_hamiltonian(10, 0.8).unwrap(), &cfg) {
            Err(Error::NotConverged { best_energy, .. }) => assert!(best_energy.is_finite()),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let spec = cluster_hamiltonian(9, 0.6).unwrap();
        let a = ground_state(&spec, &LanczosConfig::default()).unwrap();
        let b = ground_state(&spec, &LanczosConfig::default()).unwrap();
        assert_eq!(a.energy, b.energy);
        assert_eq!(a.state, b.state);
    }
}
