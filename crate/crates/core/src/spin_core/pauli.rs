use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Largest chain length a `u64` basis index can address.
pub const MAX_SITES: usize = 63;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Single-site measurement/correlation axis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl From<Axis> for Pauli {
    fn from(a: Axis) -> Self {
        match a {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

impl Axis {
    pub fn symbol(self) -> char {
        Pauli::from(self).symbol().to_ascii_lowercase()
    }
}

/// A real multiple of a tensor product of Pauli operators.
///
/// Factors are kept sorted by site with identities dropped, so two strings
/// describing the same operator compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    coeff: f64,
    factors: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(coeff: f64, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut factors: Vec<(usize, Pauli)> = factors.into_iter().filter(|&(_, p)| p != Pauli::I).collect();
        factors.sort_by_key(|&(s, _)| s);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(domain("Pauli string repeats a site"));
        }
        if !coeff.is_finite() {
            return Err(domain("Pauli string coefficient must be finite"));
        }
        Ok(Self { coeff, factors })
    }

    pub fn identity(coeff: f64) -> Self {
        Self {
            coeff,
            factors: Vec::new(),
        }
    }

    /// Parses a dense label such as `"XZX"` placed on sites `start..start+len`.
    pub fn from_label(coeff: f64, start: usize, label: &str) -> Result<Self> {
        let mut factors = Vec::with_capacity(label.len());
        for (k, c) in label.chars().enumerate() {
            let p = Pauli::from_symbol(c).ok_or_else(|| domain(alloc::format!("unknown Pauli symbol '{c}'")))?;
            factors.push((start + k, p));
        }
        Self::new(coeff, factors)
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn with_coeff(&self, coeff: f64) -> Self {
        Self {
            coeff,
            factors: self.factors.clone(),
        }
    }

    pub fn max_site(&self) -> Option<usize> {
        self.factors.last().map(|&(s, _)| s)
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    /// Bit masks for the action on computational basis states.
    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks::default();
        for &(s, p) in &self.factors {
            let bit = 1u64 << s;
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.y_count += 1;
                }
                Pauli::Z => m.sign |= bit,
            }
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coeff)?;
        if self.factors.is_empty() {
            return write!(f, " I");
        }
        for &(s, p) in &self.factors {
            write!(f, " {p}{s}")?;
        }
        Ok(())
    }
}

/// `P|b> = phase * (-1)^popcount(b & sign) |b ^ flip>` with `phase = i^y_count`.
///
/// Y|0> = i|1>, Y|1> = -i|0>.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct PauliMasks {
    pub flip: u64,
    pub sign: u64,
    pub y_count: u32,
}

impl PauliMasks {
    pub fn phase(&self) -> Complex64 {
        match self.y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    #[inline]
    pub fn sign_of(&self, basis: u64) -> f64 {
        if (basis & self.sign).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Symbolic spin-1/2 chain Hamiltonian: a sum of weighted Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinChainSpec {
    n_sites: usize,
    boundary: Boundary,
    terms: Vec<PauliString>,
}

impl SpinChainSpec {
    pub fn new(n_sites: usize, boundary: Boundary, terms: Vec<PauliString>) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(domain(alloc::format!("chain length {n_sites} outside 1..={MAX_SITES}")));
        }
        if let Some(t) = terms.iter().find(|t| t.max_site().is_some_and(|s| s >= n_sites)) {
            return Err(domain(alloc::format!(
                "term `{t}` addresses a site outside 0..{n_sites}"
            )));
        }
        Ok(Self {
            n_sites,
            boundary,
            terms,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    /// Whether the matrix is real in the computational basis (every term has an even number of Y).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.masks().y_count % 2 == 0)
    }

    /// Resolves a possibly out-of-range site offset; `None` when an open chain has no such site.
    pub fn wrap(&self, site: isize) -> Option<usize> {
        wrap_site(self.n_sites, self.boundary, site)
    }
}

pub(crate) fn wrap_site(n: usize, boundary: Boundary, site: isize) -> Option<usize> {
    match boundary {
        Boundary::Periodic => Some(site.rem_euclid(n as isize) as usize),
        Boundary::Open => (0..n as isize).contains(&site).then_some(site as usize),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identity_factors_dropped_and_sorted() {
        let p = PauliString::new(2.0, vec![(3, Pauli::Z), (1, Pauli::I), (0, Pauli::X)]).unwrap();
        assert_eq!(p.factors(), &[(0, Pauli::X), (3, Pauli::Z)]);
        assert_eq!(p.weight(), 2);
    }

    #[test]
    fn repeated_site_rejected() {
        assert!(PauliString::new(1.0, vec![(1, Pauli::X), (1, Pauli::Z)]).is_err());
    }

    #[test]
    fn spec_rejects_out_of_range_site() {
        let t = PauliString::from_label(1.0, 2, "XX").unwrap();
        assert!(SpinChainSpec::new(3, Boundary::Open, vec![t]).is_err());
    }

    #[test]
    fn masks_follow_y_convention() {
        let m = PauliString::from_label(1.0, 0, "YZX").unwrap().masks();
        assert_eq!(m.flip, 0b101);
        assert_eq!(m.sign, 0b011);
        assert_eq!(m.phase(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn wrap_periodic_and_open() {
        assert_eq!(wrap_site(5, Boundary::Periodic, -1), Some(4));
        assert_eq!(wrap_site(5, Boundary::Periodic, 5), Some(0));
        assert_eq!(wrap_site(5, Boundary::Open, 5), None);
    }
}
