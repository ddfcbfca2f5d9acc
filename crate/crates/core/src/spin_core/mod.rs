//! Spin-1/2 chains as sums of Pauli strings, with matrix-free application,
//! a dense block solver and an iterative ground-state solver.

mod apply;
mod dense;
mod lanczos;
mod models;
mod pauli;
mod state;

pub use apply::{apply, apply_amplitudes, CompiledHamiltonian};
pub use dense::{
    dense_block, dense_matrix, dense_spectrum, dense_spectrum_capped, excitation_gap, sectors, DEFAULT_DENSE_MAX_SITES,
};
pub use lanczos::{ground_state, low_spectrum, lowest_eigenpairs, Eigenpairs, GroundState, LanczosConfig};
pub use models::{
    apply_pauli, apply_raising, cluster_hamiltonian, cluster_stabilizer, triangle_chain_hamiltonian,
    triangle_chain_with_boundary,
};
pub use pauli::{Axis, Boundary, Pauli, PauliMasks, PauliString, SpinChainSpec, MAX_SITES};
pub use state::{StateVector, NORM_TOL};

pub(crate) use state::pauli_expectation_raw;

use crate::error::{domain, Result};

/// `<psi|P|psi>` for a Hermitian Pauli string.
pub fn expectation(state: &StateVector, op: &PauliString) -> Result<f64> {
    let z = state.pauli_expectation(op)?;
    if z.im.abs() > 1e-10 {
        return Err(domain(alloc::format!(
            "expectation of `{op}` has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}
