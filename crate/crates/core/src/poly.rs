//! Polynomials on `C^n`: holomorphic ones and mixed ones in `z` and
//! `conj(z)`, with the differential operators used throughout — partial
//! derivatives, the radial derivative `R = sum z_i d_i` and the complex
//! tangential derivatives `L_{j,i} = conj(z_i) d_j - conj(z_j) d_i`.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};

use crate::error::{CoreError, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::{C64, ExactC, Scalar};

/// Holomorphic polynomial `sum_alpha c_alpha z^alpha`.
///
/// Invariant: no stored coefficient is zero. The degree of the zero
/// polynomial is `None`.
#[derive(Clone, PartialEq, Debug)]
pub struct HoloPoly<S: Scalar> {
    n: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> HoloPoly<S> {
    pub fn zero(n: usize) -> Self {
        HoloPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut p = HoloPoly::zero(n);
        p.add_term(MultiIndex::zero(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, S::one())
    }

    /// The coordinate function `z_j` (1-based).
    pub fn variable(n: usize, j: usize) -> Self {
        let mut p = HoloPoly::zero(n);
        p.add_term(MultiIndex::unit(n, j), S::one());
        p
    }

    pub fn monomial(n: usize, alpha: MultiIndex, c: S) -> Self {
        assert_eq!(alpha.len(), n);
        let mut p = HoloPoly::zero(n);
        p.add_term(alpha, c);
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> S {
        self.terms.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    /// Max total degree over stored terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|a| a.degree()).max()
    }

    /// Accumulate `c * z^alpha`, dropping the term if it cancels to zero.
    pub fn add_term(&mut self, alpha: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&alpha) {
            None => {
                self.terms.insert(alpha, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(alpha, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HoloPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.mul(s));
        }
        out
    }

    /// Coefficient-wise convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch(self.n, other.n));
        }
        let mut out = HoloPoly::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca.mul(cb));
            }
        }
        Ok(out)
    }

    /// `d_j p` (1-based coordinate): termwise `a_j z^{alpha - eps_j}`.
    pub fn partial_derivative(&self, j: usize) -> Self {
        assert!(1 <= j && j <= self.n, "coordinate out of range");
        let mut out = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            if let Some(lowered) = a.lower(j) {
                out.add_term(lowered, c.scale_ratio(a.get(j) as i64, 1));
            }
        }
        out
    }

    /// Radial derivative `R p = sum_i z_i d_i p`; termwise `|alpha| z^alpha`.
    pub fn radial_derivative(&self) -> Self {
        let mut out = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.scale_ratio(a.degree() as i64, 1));
        }
        out
    }

    /// `R^l p`; scales `z^alpha` by `|alpha|^l`.
    pub fn radial_power(&self, l: usize) -> Self {
        let mut out = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            let d = a.degree() as i64;
            let mut s = c.clone();
            for _ in 0..l {
                s = s.scale_ratio(d, 1);
            }
            out.add_term(a.clone(), s);
        }
        out
    }

    /// Complex tangential derivative `L_{j,i} p = conj(z_i) d_j p - conj(z_j) d_i p`.
    /// Rejects `i = j`.
    pub fn tangential_derivative(&self, j: usize, i: usize) -> Result<MixedPoly<S>> {
        if i == j {
            return Err(CoreError::SameCoordinate(i));
        }
        if j < 1 || j > self.n {
            return Err(CoreError::CoordinateOutOfRange { index: j, n: self.n });
        }
        if i < 1 || i > self.n {
            return Err(CoreError::CoordinateOutOfRange { index: i, n: self.n });
        }
        let mut out = MixedPoly::zero(self.n);
        for (a, c) in self.partial_derivative(j).terms() {
            out.add_term(a.clone(), MultiIndex::unit(self.n, i), c.clone());
        }
        for (a, c) in self.partial_derivative(i).terms() {
            out.add_term(a.clone(), MultiIndex::unit(self.n, j), c.neg());
        }
        Ok(out)
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        HoloPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.degree() == d)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// Dilation `p_r(z) = p(rz)`: scales the `z^alpha` coefficient by `r^{|alpha|}`.
    pub fn dilate_ratio(&self, num: i64, den: i64) -> Self {
        let mut out = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            let mut s = c.clone();
            for _ in 0..a.degree() {
                s = s.scale_ratio(num, den);
            }
            out.add_term(a.clone(), s);
        }
        out
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.n);
        let mut acc = C64::new(0.0, 0.0);
        for (a, c) in &self.terms {
            let mut m = C64::new(1.0, 0.0);
            for (zi, &e) in z.iter().zip(&a.0) {
                for _ in 0..e {
                    m *= zi;
                }
            }
            acc += c.to_c64() * m;
        }
        acc
    }

    pub fn as_mixed(&self) -> MixedPoly<S> {
        let mut out = MixedPoly::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), MultiIndex::zero(self.n), c.clone());
        }
        out
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HoloPoly<T> {
        let mut out = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }
}

impl HoloPoly<ExactC> {
    pub fn to_float(&self) -> HoloPoly<C64> {
        self.map_scalars(|c| c.to_c64())
    }
}

/// Polynomial in `z` and `conj(z)`: `sum c_{alpha,beta} z^alpha conj(z)^beta`.
#[derive(Clone, PartialEq, Debug)]
pub struct MixedPoly<S: Scalar> {
    n: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), S>,
}

impl<S: Scalar> MixedPoly<S> {
    pub fn zero(n: usize) -> Self {
        MixedPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &S)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        let key = (alpha, beta);
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MixedPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    /// Complex conjugate: swaps the holomorphic and anti-holomorphic
    /// exponents and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let mut out = MixedPoly::zero(self.n);
        for ((a, b), c) in &self.terms {
            out.add_term(b.clone(), a.clone(), c.conj());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch(self.n, other.n));
        }
        let mut out = MixedPoly::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.add_term(a1.add(a2), b1.add(b2), c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn mul_holo(&self, other: &HoloPoly<S>) -> Result<Self> {
        self.mul(&other.as_mixed())
    }

    /// Max anti-holomorphic degree over stored terms.
    pub fn anti_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(_, b)| b.degree()).max()
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.n);
        let mut acc = C64::new(0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let mut m = C64::new(1.0, 0.0);
            for (zi, &e) in z.iter().zip(&a.0) {
                for _ in 0..e {
                    m *= zi;
                }
            }
            for (zi, &e) in z.iter().zip(&b.0) {
                let w = zi.conj();
                for _ in 0..e {
                    m *= w;
                }
            }
            acc += c.to_c64() * m;
        }
        acc
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MixedPoly<T> {
        let mut out = MixedPoly::zero(self.n);
        for ((a, b), c) in &self.terms {
            out.add_term(a.clone(), b.clone(), f(c));
        }
        out
    }
}

/// Coefficients `a_j^(l)` of the one-variable expansion
/// `R^l f = sum_{j=1}^{l} a_j^(l) z^j d^j f`, from the recurrence
/// `a_j^(l+1) = j a_j^(l) + a_{j-1}^(l)` with `a_0 = a_{l+1} = 0`.
pub fn radial_power_coeffs(l: usize) -> Vec<BigInt> {
    assert!(l >= 1);
    let mut coeffs = vec![BigInt::one()];
    for _ in 1..l {
        let prev = coeffs;
        let mut next = vec![BigInt::zero(); prev.len() + 1];
        for (idx, a) in prev.iter().enumerate() {
            let j = idx + 1;
            next[idx] += BigInt::from(j) * a;
            next[idx + 1] += a;
        }
        coeffs = next;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;
    use num::Complex;

    type P = HoloPoly<ExactC>;

    fn c(v: i64) -> ExactC {
        Complex::new(rat_int(v), rat_int(0))
    }

    fn z(n: usize, j: usize) -> P {
        P::variable(n, j)
    }

    #[test]
    fn product_of_coordinates() {
        let p = z(2, 1).mul(&z(2, 2)).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&MultiIndex::new(vec![1, 1])), c(1));
    }

    #[test]
    fn product_with_zero_is_zero() {
        let p = z(2, 1).mul(&P::zero(2)).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn difference_of_squares() {
        let one = P::one(1);
        let a = z(1, 1).add(&one).unwrap();
        let b = z(1, 1).sub(&one).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeff(&MultiIndex::new(vec![2])), c(1));
        assert_eq!(p.coeff(&MultiIndex::new(vec![0])), c(-1));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(z(2, 1).mul(&z(3, 1)).is_err());
    }

    #[test]
    fn partial_derivatives() {
        // d1(z1^2 z2) = 2 z1 z2
        let p = P::monomial(2, MultiIndex::new(vec![2, 1]), c(1));
        let d = p.partial_derivative(1);
        assert_eq!(d.coeff(&MultiIndex::new(vec![1, 1])), c(2));
        // d2(z1^3) = 0
        let p = P::monomial(2, MultiIndex::new(vec![3, 0]), c(1));
        assert!(p.partial_derivative(2).is_zero());
        // d1(z1 z2 + z1) = z2 + 1
        let p = P::monomial(2, MultiIndex::new(vec![1, 1]), c(1))
            .add(&z(2, 1))
            .unwrap();
        let d = p.partial_derivative(1);
        assert_eq!(d.coeff(&MultiIndex::new(vec![0, 1])), c(1));
        assert_eq!(d.coeff(&MultiIndex::new(vec![0, 0])), c(1));
    }

    #[test]
    fn radial_derivative_scales_by_degree() {
        // R(z1 z2) = 2 z1 z2 (homogeneous of degree 2)
        let p = z(2, 1).mul(&z(2, 2)).unwrap();
        assert_eq!(p.radial_derivative(), p.scale(&c(2)));
        // R(constant) = 0
        assert!(P::one(2).radial_derivative().is_zero());
        // R(z1^2 + z2) = 2 z1^2 + z2, termwise
        let p = P::monomial(2, MultiIndex::new(vec![2, 0]), c(1))
            .add(&z(2, 2))
            .unwrap();
        let r = p.radial_derivative();
        assert_eq!(r.coeff(&MultiIndex::new(vec![2, 0])), c(2));
        assert_eq!(r.coeff(&MultiIndex::new(vec![0, 1])), c(1));
    }

    #[test]
    fn radial_power_scaling() {
        let p = z(2, 1).mul(&z(2, 2)).unwrap();
        assert_eq!(p.radial_power(2), p.scale(&c(4)));
        assert_eq!(p.radial_power(0), p);
        let q = P::monomial(1, MultiIndex::new(vec![2]), c(1));
        assert_eq!(q.radial_power(3), q.scale(&c(8)));
    }

    #[test]
    fn tangential_derivative_basics() {
        // L_{2,1}(z2) = conj(z1) * 1
        let out = z(2, 2).tangential_derivative(2, 1).unwrap();
        let mut expected = MixedPoly::zero(2);
        expected.add_term(MultiIndex::zero(2), MultiIndex::unit(2, 1), c(1));
        assert_eq!(out, expected);
        // L on constants vanishes
        assert!(P::one(2).tangential_derivative(1, 2).unwrap().is_zero());
        // L_{1,2}(z1 z2) = conj(z2) z2 - conj(z1) z1
        let p = z(2, 1).mul(&z(2, 2)).unwrap();
        let out = p.tangential_derivative(1, 2).unwrap();
        let mut expected = MixedPoly::zero(2);
        expected.add_term(MultiIndex::unit(2, 2), MultiIndex::unit(2, 2), c(1));
        expected.add_term(MultiIndex::unit(2, 1), MultiIndex::unit(2, 1), c(-1));
        assert_eq!(out, expected);
        // anti-holomorphic degree is 1
        assert_eq!(out.anti_degree(), Some(1));
    }

    #[test]
    fn tangential_derivative_rejects_equal_coordinates() {
        assert!(z(2, 1).tangential_derivative(1, 1).is_err());
    }

    #[test]
    fn tangential_antisymmetry() {
        let p = z(3, 1)
            .mul(&z(3, 2))
            .unwrap()
            .add(&P::monomial(3, MultiIndex::new(vec![0, 0, 2]), c(3)))
            .unwrap();
        let a = p.tangential_derivative(1, 2).unwrap();
        let b = p.tangential_derivative(2, 1).unwrap();
        assert_eq!(a, b.neg());
    }

    #[test]
    fn radial_power_coefficient_table() {
        assert_eq!(radial_power_coeffs(1), vec![BigInt::from(1)]);
        assert_eq!(
            radial_power_coeffs(3),
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(1)]
        );
        assert_eq!(
            radial_power_coeffs(4),
            vec![
                BigInt::from(1),
                BigInt::from(7),
                BigInt::from(6),
                BigInt::from(1)
            ]
        );
    }

    #[test]
    fn mixed_conjugation_is_involution() {
        let p = z(2, 1).mul(&z(2, 2)).unwrap();
        let m = p.tangential_derivative(1, 2).unwrap();
        assert_eq!(m.conj().conj(), m);
    }
}
