use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{resource, Result};
use crate::spin_core::apply::CompiledHamiltonian;
use crate::spin_core::pauli::SpinChainSpec;

/// Largest chain handed to the dense solver by default.
pub const DEFAULT_DENSE_MAX_SITES: usize = 14;

/// Splits the basis into the blocks the Hamiltonian cannot connect.
///
/// Off-diagonal terms only ever XOR a basis index with one of their flip
/// masks, so the blocks are the cosets of the GF(2) span of those masks.
/// Each block is returned as an ascending list of basis indices.
pub fn sectors(spec: &SpinChainSpec) -> Vec<Vec<u64>> {
    let h = CompiledHamiltonian::new(spec);
    let pivots = gf2_basis(h.flip_masks());
    let dim = spec.dim();
    let reduce = |mut b: u64| {
        for &(bit, v) in &pivots {
            if b >> bit & 1 == 1 {
                b ^= v;
            }
        }
        b
    };
    // canonical representative -> sector slot
    let mut slot = vec![u32::MAX; dim];
    let mut out: Vec<Vec<u64>> = Vec::new();
    for b in 0..dim as u64 {
        let r = reduce(b) as usize;
        if slot[r] == u32::MAX {
            slot[r] = out.len() as u32;
            out.push(Vec::new());
        }
        out[slot[r] as usize].push(b);
    }
    out
}

/// Row-reduced basis as `(pivot bit, vector)`, each pivot bit cleared in every other vector.
fn gf2_basis(masks: impl Iterator<Item = u64>) -> Vec<(u32, u64)> {
    let mut basis: Vec<(u32, u64)> = Vec::new();
    for mut m in masks {
        for &(bit, v) in &basis {
            if m >> bit & 1 == 1 {
                m ^= v;
            }
        }
        if m == 0 {
            continue;
        }
        let bit = 63 - m.leading_zeros();
        for entry in basis.iter_mut() {
            if entry.1 >> bit & 1 == 1 {
                entry.1 ^= m;
            }
        }
        basis.push((bit, m));
    }
    basis
}

/// Dense Hermitian matrix of `spec` restricted to the given basis states.
pub fn dense_block(spec: &SpinChainSpec, states: &[u64]) -> DMatrix<Complex64> {
    let h = CompiledHamiltonian::new(spec);
    let d = states.len();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (j, &col) in states.iter().enumerate() {
        h.for_each_in_column(col, |row, v| {
            if let Ok(i) = states.binary_search(&row) {
                m[(i, j)] += v;
            }
        });
    }
    // enforce exact Hermiticity
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

/// Full dense matrix over all `2^n` basis states.
pub fn dense_matrix(spec: &SpinChainSpec) -> DMatrix<Complex64> {
    let all: Vec<u64> = (0..spec.dim() as u64).collect();
    dense_block(spec, &all)
}

fn block_eigenvalues(spec: &SpinChainSpec, states: &[u64]) -> Vec<f64> {
    let m = dense_block(spec, states);
    if spec.is_real() {
        let re = m.map(|z| z.re);
        re.symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    }
}

/// Every eigenvalue of `spec`, ascending, for chains up to [`DEFAULT_DENSE_MAX_SITES`].
pub fn dense_spectrum(spec: &SpinChainSpec) -> Result<Vec<f64>> {
    dense_spectrum_capped(spec, DEFAULT_DENSE_MAX_SITES)
}

pub fn dense_spectrum_capped(spec: &SpinChainSpec, max_sites: usize) -> Result<Vec<f64>> {
    if spec.n_sites() > max_sites {
        return Err(resource(alloc::format!(
            "dense spectrum of {} sites exceeds the {max_sites}-site cap",
            spec.n_sites()
        )));
    }
    let mut levels: Vec<f64> = sectors(spec).iter().flat_map(|s| block_eigenvalues(spec, s)).collect();
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

/// Distance from the lowest level to the next level that differs by more than `degeneracy_tol`.
///
/// `None` when every level is within tolerance of the lowest.
pub fn excitation_gap(levels: &[f64], degeneracy_tol: f64) -> Option<f64> {
    let e0 = levels.iter().copied().fold(f64::INFINITY, f64::min);
    levels
        .iter()
        .copied()
        .filter(|&e| e - e0 > degeneracy_tol)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e - e0, |a| a.min(e - e0))))
}
