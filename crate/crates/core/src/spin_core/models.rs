use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bose_hubbard::EffectiveCouplings;
use crate::error::{domain, Result};
use crate::spin_core::pauli::{wrap_site, Boundary, Pauli, PauliString, SpinChainSpec};
use crate::spin_core::state::StateVector;

fn chain_term(n: usize, boundary: Boundary, coeff: f64, start: isize, ops: &[Pauli]) -> Result<Option<PauliString>> {
    let mut factors = Vec::with_capacity(ops.len());
    for (k, &p) in ops.iter().enumerate() {
        match wrap_site(n, boundary, start + k as isize) {
            Some(s) => factors.push((s, p)),
            None => return Ok(None),
        }
    }
    PauliString::new(coeff, factors).map(Some)
}

/// `H = sum_i ( -X_{i-1} Z_i X_{i+1} + b Z_i )` on a periodic ring of `n >= 3` sites.
///
/// Terms are emitted as the `n` three-site stabilizers followed by the `n` field terms.
pub fn cluster_hamiltonian(n: usize, b_field: f64) -> Result<SpinChainSpec> {
    if n < 3 {
        return Err(domain(alloc::format!("cluster ring needs n >= 3, got {n}")));
    }
    let mut terms = Vec::with_capacity(2 * n);
    for i in 0..n as isize {
        terms.extend(chain_term(
            n,
            Boundary::Periodic,
            -1.0,
            i - 1,
            &[Pauli::X, Pauli::Z, Pauli::X],
        )?);
    }
    for i in 0..n as isize {
        terms.extend(chain_term(n, Boundary::Periodic, b_field, i, &[Pauli::Z])?);
    }
    SpinChainSpec::new(n, Boundary::Periodic, terms)
}

/// The stabilizer `X_{i-1} Z_i X_{i+1}` of the cluster ring (unit coefficient).
pub fn cluster_stabilizer(n: usize, i: usize) -> Result<PauliString> {
    chain_term(
        n,
        Boundary::Periodic,
        1.0,
        i as isize - 1,
        &[Pauli::X, Pauli::Z, Pauli::X],
    )
    .map(|t| t.expect("periodic wrap always resolves"))
}

/// Effective triangle-lattice chain: field `b_vec . sigma` on every site, two-spin
/// ZZ and XX+YY on neighbouring pairs, and ZZZ and XZX+YZY on consecutive triples.
///
/// On a periodic 3-site chain every triple is the whole triangle, so the
/// three-spin sums visit each triangle permutation. Zero coefficients are
/// skipped.
pub fn triangle_chain_hamiltonian(couplings: &EffectiveCouplings, b_vec: [f64; 3], n: usize) -> Result<SpinChainSpec> {
    triangle_chain_with_boundary(couplings, b_vec, n, Boundary::Periodic)
}

pub fn triangle_chain_with_boundary(
    couplings: &EffectiveCouplings,
    b_vec: [f64; 3],
    n: usize,
    boundary: Boundary,
) -> Result<SpinChainSpec> {
    use Pauli::{X, Y, Z};
    if n < 3 {
        return Err(domain(alloc::format!("triangle chain needs n >= 3, got {n}")));
    }
    let mut terms = Vec::new();
    let mut push = |coeff: f64, start: isize, ops: &[Pauli]| -> Result<()> {
        if coeff != 0.0 {
            terms.extend(chain_term(n, boundary, coeff, start, ops)?);
        }
        Ok(())
    };
    for i in 0..n as isize {
        push(b_vec[0], i, &[X])?;
        push(b_vec[1], i, &[Y])?;
        push(b_vec[2], i, &[Z])?;
    }
    for i in 0..n as isize {
        push(couplings.lambda1, i, &[Z, Z])?;
    }
    for i in 0..n as isize {
        push(couplings.lambda2, i, &[X, X])?;
        push(couplings.lambda2, i, &[Y, Y])?;
    }
    for i in 0..n as isize {
        push(couplings.lambda3, i, &[Z, Z, Z])?;
    }
    for i in 0..n as isize {
        push(couplings.lambda4, i, &[X, Z, X])?;
        push(couplings.lambda4, i, &[Y, Z, Y])?;
    }
    SpinChainSpec::new(n, boundary, terms)
}

/// `P|psi>` for a single Pauli string, coefficient included.
pub fn apply_pauli(amps: &[Complex64], op: &PauliString) -> Vec<Complex64> {
    let m = op.masks();
    let w = m.phase() * op.coeff();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (b, &a) in amps.iter().enumerate() {
        out[b ^ m.flip as usize] += w * m.sign_of(b as u64) * a;
    }
    out
}

/// `(X_k - i X_{k-1} Y_k X_{k+1}) |psi>` on a periodic ring; not normalized.
///
/// On the zero-field cluster ground state this flips the single stabilizer
/// `K_k` and so raises the energy by exactly 2.
pub fn apply_raising(state: &StateVector, k: usize) -> Result<Vec<Complex64>> {
    let n = state.n_sites();
    if n < 3 || k >= n {
        return Err(domain(alloc::format!(
            "raising operator site {k} invalid for {n} sites"
        )));
    }
    let x = PauliString::new(1.0, [(k, Pauli::X)])?;
    let xyx = chain_term(
        n,
        Boundary::Periodic,
        1.0,
        k as isize - 1,
        &[Pauli::X, Pauli::Y, Pauli::X],
    )?
    .expect("periodic wrap always resolves");
    let a = apply_pauli(state.amplitudes(), &x);
    let b = apply_pauli(state.amplitudes(), &xyx);
    let mi = Complex64::new(0.0, -1.0);
    Ok(a.iter().zip(&b).map(|(p, q)| p + mi * q).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cluster_three_sites() {
        let s = cluster_hamiltonian(3, 0.0).unwrap();
        let three: Vec<_> = s.terms().iter().filter(|t| t.weight() == 3).collect();
        assert_eq!(three.len(), 3);
        for (i, t) in three.iter().enumerate() {
            assert_eq!(t.coeff(), -1.0);
            let want =
                PauliString::new(-1.0, [((i + 2) % 3, Pauli::X), (i, Pauli::Z), ((i + 1) % 3, Pauli::X)]).unwrap();
            assert_eq!(**t, want);
        }
    }

    #[test]
    fn cluster_term_count() {
        assert_eq!(cluster_hamiltonian(4, 0.5).unwrap().terms().len(), 8);
        assert!(cluster_hamiltonian(2, 0.0).is_err());
    }

    #[test]
    fn triangle_field_only() {
        let s = triangle_chain_hamiltonian(&EffectiveCouplings::zero(), [0.0, 0.0, 1.0], 4).unwrap();
        assert_eq!(s.terms().len(), 4);
        assert!(s
            .terms()
            .iter()
            .all(|t| t.weight() == 1 && t.factors()[0].1 == Pauli::Z));
    }

    #[test]
    fn open_chain_drops_wrapping_terms() {
        let c = EffectiveCouplings {
            lambda3: 1.0,
            ..EffectiveCouplings::zero()
        };
        let s = triangle_chain_with_boundary(&c, [0.0; 3], 5, Boundary::Open).unwrap();
        assert_eq!(s.terms().len(), 3);
    }
}
