use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spin_core::pauli::{PauliString, MAX_SITES};

pub const NORM_TOL: f64 = 1e-12;

/// Normalized amplitudes over the `2^n` configurations of an `n`-site chain.
///
/// Bit `i` of a basis index is spin `i`; `0` is up and `1` is down.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_len(n_sites, amps.len())?;
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { n_sites, amps })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(n_sites: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_len(n_sites, amps.len())?;
        let n2 = norm_sqr(&amps);
        if n2.is_nan() || n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
        let s = 1.0 / n2.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Ok(Self { n_sites, amps })
    }

    pub fn basis(n_sites: usize, index: u64) -> Result<Self> {
        check_len(n_sites, 1usize << n_sites.min(MAX_SITES))?;
        let dim = 1usize << n_sites;
        if index as usize >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index as usize,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_sites, amps })
    }

    /// All spins up.
    pub fn all_up(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(dot(&self.amps, &other.amps))
    }

    /// `<self|P|self>` including the coefficient of `op`. Complex in general.
    pub fn pauli_expectation(&self, op: &PauliString) -> Result<Complex64> {
        if let Some(s) = op.max_site() {
            if s >= self.n_sites {
                return Err(Error::DimensionMismatch {
                    expected: self.n_sites,
                    found: s + 1,
                });
            }
        }
        Ok(pauli_expectation_raw(&self.amps, op) * op.coeff())
    }
}

/// `<psi|P|psi>` ignoring the coefficient of `op`.
pub(crate) fn pauli_expectation_raw(amps: &[Complex64], op: &PauliString) -> Complex64 {
    let m = op.masks();
    let mut acc = 0.0;
    let mut acc_im = 0.0;
    for (b, a) in amps.iter().enumerate() {
        let t = amps[b ^ m.flip as usize].conj() * *a * m.sign_of(b as u64);
        acc += t.re;
        acc_im += t.im;
    }
    m.phase() * Complex64::new(acc, acc_im)
}

fn check_len(n_sites: usize, len: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::Domain(alloc::format!(
            "chain length {n_sites} outside 1..={MAX_SITES}"
        )));
    }
    let expected = 1usize << n_sites;
    if len != expected {
        return Err(Error::DimensionMismatch { expected, found: len });
    }
    Ok(())
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `<a|b>`
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        let amps = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(
            StateVector::new(1, amps.clone()),
            Err(Error::NotNormalized { .. })
        ));
        let s = StateVector::normalized(1, amps).unwrap();
        assert!((norm_sqr(s.amplitudes()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_length() {
        let amps = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(
            StateVector::normalized(2, amps),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_expectation_is_one() {
        let s = StateVector::normalized(3, (0..8).map(|k| Complex64::new(k as f64, 1.0)).collect()).unwrap();
        let e = s.pauli_expectation(&PauliString::identity(1.0)).unwrap();
        assert!((e.re - 1.0).abs() < 1e-14 && e.im.abs() < 1e-14);
    }
}
