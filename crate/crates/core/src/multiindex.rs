//! Multi-indices for monomials `z^alpha` on `C^n`.
//!
//! The basis order used everywhere is graded: lower total degree first,
//! and within a degree the exponent of the earliest variable decreases
//! last, i.e. `(1,0)` precedes `(0,1)` and `(2,0), (1,1), (0,2)` is the
//! degree-2 layout.

use std::cmp::Ordering;
use std::fmt;

use num::BigInt;

use crate::scalar::{binomial, factorial};

/// Exponent vector alpha of a monomial `z^alpha = z_1^{a_1} ... z_n^{a_n}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    /// Constant monomial exponent (all zeros).
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// Unit index `eps_j` (1-based coordinate).
    pub fn unit(n: usize, j: usize) -> Self {
        debug_assert!(1 <= j && j <= n);
        let mut e = vec![0; n];
        e[j - 1] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `alpha! = a_1! ... a_n!`.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .map(|&e| factorial(e as usize))
            .product::<BigInt>()
    }

    /// Exponent of the 1-based coordinate `j`.
    pub fn get(&self, j: usize) -> u32 {
        self.0[j - 1]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `alpha - eps_j`, or `None` when `alpha_j = 0`.
    pub fn lower(&self, j: usize) -> Option<MultiIndex> {
        if self.get(j) == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[j - 1] -= 1;
        Some(MultiIndex(e))
    }

    /// `alpha + eps_j`.
    pub fn raise(&self, j: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[j - 1] += 1;
        MultiIndex(e)
    }

    /// Componentwise difference, or `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.len() != other.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(MultiIndex(out))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            // Within a degree: earlier variables carry higher exponents first.
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices of dimension `n` with total degree exactly `d`,
/// in basis order.
pub fn enumerate_degree(n: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut out, &mut current, 0, d);
    out
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: usize) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e as u32;
        fill(out, current, pos + 1, remaining - e);
    }
}

/// All multi-indices with `|alpha| <= max_degree`, in basis order.
/// The list has `binomial(n + max_degree, n)` entries.
pub fn enumerate(n: usize, max_degree: usize) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be at least 1");
    let mut out = Vec::new();
    for d in 0..=max_degree {
        out.extend(enumerate_degree(n, d));
    }
    debug_assert_eq!(
        BigInt::from(out.len()),
        binomial(n + max_degree, n),
        "enumeration count mismatch"
    );
    out
}
