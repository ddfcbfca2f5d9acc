use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_core::pauli::SpinChainSpec;
use crate::spin_core::state::StateVector;

#[derive(Clone, Debug)]
struct Term {
    flip: u64,
    sign: u64,
    /// coefficient times i^(number of Y)
    weight: Complex64,
}

/// Matrix-free form of a [`SpinChainSpec`]: one bit-flip mask and one sign mask per term.
#[derive(Clone, Debug)]
pub struct CompiledHamiltonian {
    n_sites: usize,
    terms: Vec<Term>,
}

impl CompiledHamiltonian {
    pub fn new(spec: &SpinChainSpec) -> Self {
        let terms = spec
            .terms()
            .iter()
            .filter(|t| t.coeff() != 0.0)
            .map(|t| {
                let m = t.masks();
                Term {
                    flip: m.flip,
                    sign: m.sign,
                    weight: m.phase() * t.coeff(),
                }
            })
            .collect();
        Self {
            n_sites: spec.n_sites(),
            terms,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    /// Flip masks of all off-diagonal terms.
    pub(crate) fn flip_masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|t| t.flip).filter(|&f| f != 0)
    }

    /// `out = H input`, overwriting `out`.
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let flip = t.flip as usize;
            for (b, &a) in input.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let c = if (b as u64 & t.sign).count_ones() & 1 == 0 {
                    t.weight
                } else {
                    -t.weight
                };
                out[b ^ flip] += c * a;
            }
        }
    }

    /// Calls `f(row, value)` for every term acting on basis state `col` (rows may repeat).
    pub(crate) fn for_each_in_column(&self, col: u64, mut f: impl FnMut(u64, Complex64)) {
        for t in &self.terms {
            let v = if (col & t.sign).count_ones() & 1 == 0 {
                t.weight
            } else {
                -t.weight
            };
            f(col ^ t.flip, v);
        }
    }

    /// Matrix element `<row|H|col>`.
    pub fn element(&self, row: u64, col: u64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if col ^ t.flip == row {
                if (col & t.sign).count_ones() & 1 == 0 {
                    acc += t.weight;
                } else {
                    acc -= t.weight;
                }
            }
        }
        acc
    }
}

/// Applies `spec` to `state` without forming the matrix. The result is not normalized.
pub fn apply(spec: &SpinChainSpec, state: &StateVector) -> Result<Vec<Complex64>> {
    if state.n_sites() != spec.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: state.dim(),
        });
    }
    apply_amplitudes(spec, state.amplitudes())
}

/// As [`apply`], on raw amplitudes (any norm).
pub fn apply_amplitudes(spec: &SpinChainSpec, amps: &[Complex64]) -> Result<Vec<Complex64>> {
    if amps.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: amps.len(),
        });
    }
    let h = CompiledHamiltonian::new(spec);
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    h.apply_into(amps, &mut out);
    Ok(out)
}
