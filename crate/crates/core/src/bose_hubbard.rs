//! Two-species Bose-Hubbard model on a triangle and the three-spin effective
//! Hamiltonian it generates deep in the Mott phase.
//!
//! With one atom per site the two species encode a spin: an `a` atom is up
//! (bit 0) and a `b` atom is down (bit 1). Tunneling `J` is taken equal on
//! all three bonds of the triangle.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, resource, Result};
use crate::spin_core::{dense_matrix, triangle_chain_hamiltonian};

/// Ratio `max(J)/min(U)` at which the expansion is considered unreliable.
pub const PERTURBATIVE_LIMIT: f64 = 0.2;

pub const TRIANGLE_SITES: usize = 3;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BoseHubbardParams {
    pub j_a: f64,
    pub j_b: f64,
    pub u_aa: f64,
    pub u_bb: f64,
    pub u_ab: f64,
}

impl BoseHubbardParams {
    /// Equal species: `j_a = j_b = j`, all collisional couplings `u`.
    pub fn symmetric(j: f64, u: f64) -> Self {
        Self {
            j_a: j,
            j_b: j,
            u_aa: u,
            u_bb: u,
            u_ab: u,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.j_a, self.j_b, self.u_aa, self.u_bb, self.u_ab];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(domain("Bose-Hubbard parameters must be finite"));
        }
        if self.u_aa <= 0.0 || self.u_bb <= 0.0 || self.u_ab <= 0.0 {
            return Err(domain("collisional couplings must be strictly positive"));
        }
        if self.j_a < 0.0 || self.j_b < 0.0 {
            return Err(domain("tunneling amplitudes must be non-negative"));
        }
        Ok(())
    }

    pub fn perturbative_ratio(&self) -> f64 {
        self.j_a.max(self.j_b) / self.u_aa.min(self.u_bb).min(self.u_ab)
    }

    pub fn is_perturbative(&self) -> bool {
        self.perturbative_ratio() < PERTURBATIVE_LIMIT
    }

    /// Exchanges the roles of the two species.
    pub fn swapped(&self) -> Self {
        Self {
            j_a: self.j_b,
            j_b: self.j_a,
            u_aa: self.u_bb,
            u_bb: self.u_aa,
            u_ab: self.u_ab,
        }
    }
}

/// Effective spin couplings and the single-site field that has to be compensated externally.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct EffectiveCouplings {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub b_z_comp: f64,
}

impl EffectiveCouplings {
    pub fn zero() -> Self {
        Self::default()
    }
}

/// Couplings through third order in `J/U`.
pub fn effective_couplings(p: &BoseHubbardParams) -> Result<EffectiveCouplings> {
    p.validate()?;
    let uab = p.u_ab;
    let (ja, jb) = (p.j_a, p.j_b);
    let a = (p.j_a, p.u_aa);
    let b = (p.j_b, p.u_bb);

    // per-species pieces; symmetric couplings add them, antisymmetric ones subtract
    let t1 = |(j, u): (f64, f64)| {
        let (j2, j3) = (j * j, j * j * j);
        -j2 / u - 4.5 * j3 / (u * u) + 0.5 * j2 / uab + 0.5 * j3 / (uab * uab) + j3 / u / uab
    };
    let g = |(j, u): (f64, f64)| j / u + 1.5 * j / uab;
    let h = |(j, u): (f64, f64)| j / (u * u);
    let k = |(j, u): (f64, f64)| j / u;
    let t3 = |(j, u): (f64, f64)| {
        let j3 = j * j * j;
        -1.5 * j3 / (u * u) + j3 / u / uab
    };
    let f = |(j, u): (f64, f64)| j * j / u * (2.0 + 4.5 * j / u + j / uab);

    let jj = ja * jb;
    let lambda1 = t1(a) + t1(b);
    let lambda2 = -jj / uab * (1.0 + (g(a) + g(b))) - 0.5 * jj * (h(a) + h(b));
    let lambda3 = t3(a) - t3(b);
    let lambda4 = -jj / uab * (k(a) - k(b)) - 0.5 * jj * (h(a) - h(b));
    let b_z_comp = f(b) - f(a);

    Ok(EffectiveCouplings {
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        b_z_comp,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    pub a: [u8; TRIANGLE_SITES],
    pub b: [u8; TRIANGLE_SITES],
}

impl FockState {
    pub fn is_singly_occupied(&self) -> bool {
        (0..TRIANGLE_SITES).all(|i| self.a[i] + self.b[i] == 1)
    }

    /// Spin-basis index of a singly occupied state (bit `i` set when site `i` holds a `b` atom).
    pub fn spin_index(&self) -> Option<u64> {
        self.is_singly_occupied()
            .then(|| (0..TRIANGLE_SITES).filter(|&i| self.b[i] == 1).map(|i| 1u64 << i).sum())
    }
}

/// All occupation patterns of the triangle with fixed species totals.
#[derive(Clone, Debug)]
pub struct FockBasis {
    n_a: u8,
    n_b: u8,
    states: Vec<FockState>,
}

fn compositions(total: u8) -> Vec<[u8; TRIANGLE_SITES]> {
    let mut out = Vec::new();
    for x in 0..=total {
        for y in 0..=total - x {
            out.push([x, y, total - x - y]);
        }
    }
    out
}

impl FockBasis {
    pub fn new(n_a: u8, n_b: u8) -> Self {
        let ca = compositions(n_a);
        let cb = compositions(n_b);
        let mut states: Vec<FockState> = ca
            .iter()
            .flat_map(|&a| cb.iter().map(move |&b| FockState { a, b }))
            .collect();
        states.sort();
        Self { n_a, n_b, states }
    }

    pub fn totals(&self) -> (u8, u8) {
        (self.n_a, self.n_b)
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.states.binary_search(s).ok()
    }

    /// Indices of the one-atom-per-site states.
    pub fn manifold(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.states[i].is_singly_occupied())
            .collect()
    }
}

pub const DEFAULT_SECTOR_CAP: usize = 20_000;

/// Collisional energy of a Fock state.
pub fn collisional_energy(p: &BoseHubbardParams, s: &FockState) -> f64 {
    (0..TRIANGLE_SITES)
        .map(|i| {
            let (na, nb) = (s.a[i] as f64, s.b[i] as f64);
            0.5 * p.u_aa * na * (na - 1.0) + 0.5 * p.u_bb * nb * (nb - 1.0) + p.u_ab * na * nb
        })
        .sum()
}

/// Collisional part (diagonal) and tunneling part of the triangle Hamiltonian in one sector.
pub fn split_hamiltonian(p: &BoseHubbardParams, basis: &FockBasis) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = basis.len();
    let mut h0 = DMatrix::<f64>::zeros(d, d);
    let mut v = DMatrix::<f64>::zeros(d, d);
    for (col, s) in basis.states().iter().enumerate() {
        h0[(col, col)] = collisional_energy(p, s);
        for (species, j) in [(0usize, p.j_a), (1usize, p.j_b)] {
            if j == 0.0 {
                continue;
            }
            let occ = if species == 0 { &s.a } else { &s.b };
            for from in 0..TRIANGLE_SITES {
                if occ[from] == 0 {
                    continue;
                }
                for to in (0..TRIANGLE_SITES).filter(|&t| t != from) {
                    let mut moved = *occ;
                    let amp = (moved[from] as f64).sqrt() * ((moved[to] + 1) as f64).sqrt();
                    moved[from] -= 1;
                    moved[to] += 1;
                    let target = if species == 0 {
                        FockState { a: moved, b: s.b }
                    } else {
                        FockState { a: s.a, b: moved }
                    };
                    let row = basis.index_of(&target).expect("tunneling conserves totals");
                    v[(row, col)] -= j * amp;
                }
            }
        }
    }
    (h0, v)
}

/// Full two-species triangle Hamiltonian in the `(n_a, n_b)` sector.
pub fn build_full_hamiltonian(p: &BoseHubbardParams, sector: (u8, u8)) -> Result<DMatrix<f64>> {
    build_full_hamiltonian_capped(p, sector, DEFAULT_SECTOR_CAP)
}

pub fn build_full_hamiltonian_capped(p: &BoseHubbardParams, sector: (u8, u8), max_dim: usize) -> Result<DMatrix<f64>> {
    p.validate()?;
    let (na, nb) = sector;
    let dim = compositions_count(na) * compositions_count(nb);
    if dim > max_dim {
        return Err(resource(alloc::format!(
            "sector ({na}, {nb}) has dimension {dim}, above the cap {max_dim}"
        )));
    }
    let basis = FockBasis::new(na, nb);
    let (h0, v) = split_hamiltonian(p, &basis);
    Ok(h0 + v)
}

fn compositions_count(total: u8) -> usize {
    let t = total as usize;
    (t + 1) * (t + 2) / 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelDeviation {
    pub sector: (u8, u8),
    pub full: f64,
    pub effective: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    /// Weight of the full-model eigenvector on the one-atom-per-site states.
    pub manifold_weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationReport {
    pub levels: Vec<LevelDeviation>,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    /// Spread of the effective spectrum; the scale of `rel_dev`.
    pub bandwidth: f64,
    /// Some selected full-model level carries less than half its weight in the manifold.
    pub ambiguous: bool,
    pub perturbative_ratio: f64,
    pub perturbative: bool,
}

/// Compares the eight low-lying triangle levels of the full model with the
/// effective three-spin spectrum.
///
/// Full-model levels are picked per species sector by largest overlap with
/// the singly occupied states. The effective Hamiltonian includes the
/// second-order field `b_z_comp` on every site, which is part of the
/// generated dynamics until compensated. Both spectra are compared after
/// removing their means; `rel_dev` is measured against the effective bandwidth.
pub fn validate_perturbation(p: &BoseHubbardParams) -> Result<TruncationReport> {
    p.validate()?;
    let c = effective_couplings(p)?;
    let eff_spec = triangle_chain_hamiltonian(&c, [0.0, 0.0, c.b_z_comp], TRIANGLE_SITES)?;
    let eff_matrix = dense_matrix(&eff_spec).map(|z| z.re);

    let n_total = TRIANGLE_SITES as u8;
    let mut levels = Vec::new();
    let mut ambiguous = false;
    for na in 0..=n_total {
        let nb = n_total - na;
        let basis = FockBasis::new(na, nb);
        let (h0, v) = split_hamiltonian(p, &basis);
        let eig = SymmetricEigen::new(h0 + v);
        let manifold = basis.manifold();

        let mut weights: Vec<(usize, f64)> = (0..basis.len())
            .map(|col| {
                let w = manifold
                    .iter()
                    .map(|&r| eig.eigenvectors[(r, col)].powi(2))
                    .sum::<f64>();
                (col, w)
            })
            .collect();
        weights.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let mut chosen: Vec<(f64, f64)> = weights[..manifold.len()]
            .iter()
            .map(|&(col, w)| (eig.eigenvalues[col], w))
            .collect();
        if chosen.iter().any(|&(_, w)| w < 0.5) {
            ambiguous = true;
        }
        chosen.sort_by(|x, y| x.0.total_cmp(&y.0));

        let spin_idx: Vec<usize> = manifold
            .iter()
            .map(|&i| basis.states()[i].spin_index().expect("manifold state") as usize)
            .collect();
        let block = DMatrix::<f64>::from_fn(spin_idx.len(), spin_idx.len(), |r, s| {
            eff_matrix[(spin_idx[r], spin_idx[s])]
        });
        let mut eff: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        eff.sort_by(f64::total_cmp);

        for ((full, w), e) in chosen.into_iter().zip(eff) {
            levels.push(LevelDeviation {
                sector: (na, nb),
                full,
                effective: e,
                abs_dev: 0.0,
                rel_dev: 0.0,
                manifold_weight: w,
            });
        }
    }

    let count = levels.len() as f64;
    let mean_full = levels.iter().map(|l| l.full).sum::<f64>() / count;
    let mean_eff = levels.iter().map(|l| l.effective).sum::<f64>() / count;
    let (lo, hi) = levels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
        (lo.min(l.effective), hi.max(l.effective))
    });
    let bandwidth = hi - lo;
    for l in &mut levels {
        l.full -= mean_full;
        l.effective -= mean_eff;
        l.abs_dev = (l.full - l.effective).abs();
        l.rel_dev = if bandwidth > 0.0 {
            l.abs_dev / bandwidth
        } else {
            l.abs_dev
        };
    }
    let max_abs_dev = levels.iter().map(|l| l.abs_dev).fold(0.0, f64::max);
    let max_rel_dev = levels.iter().map(|l| l.rel_dev).fold(0.0, f64::max);

    Ok(TruncationReport {
        levels,
        max_abs_dev,
        max_rel_dev,
        bandwidth,
        ambiguous,
        perturbative_ratio: p.perturbative_ratio(),
        perturbative: p.is_perturbative(),
    })
}
