//! Exact weighted integrals over the unit ball `B_n` and the spherical
//! shells `Omega_r = { r < |z| < 1 }`.
//!
//! Every integral of a polynomial expression against `(1-|z|^2)^t dm`
//! reduces to a rational multiple of `pi^n` through exact radial and
//! sphere moments; values are carried as [`PiValue`] pairs and only
//! floated for reporting. The pi powers cancel in every ratio the
//! inequality suite forms.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::multiindex::MultiIndex;
use crate::poly::{HoloPoly, MixedPoly};
use crate::scalar::{abs_sq, factorial, rat_to_f64, C64, ExactC, Rat, Scalar};

/// Exact value `coeff * pi^pi_power`.
#[derive(Clone, PartialEq, Debug)]
pub struct PiValue {
    pub coeff: Rat,
    pub pi_power: u32,
}

impl PiValue {
    pub fn new(coeff: Rat, pi_power: u32) -> Self {
        PiValue { coeff, pi_power }
    }

    pub fn zero(pi_power: u32) -> Self {
        PiValue::new(Rat::zero(), pi_power)
    }

    pub fn rational(coeff: Rat) -> Self {
        PiValue::new(coeff, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Sum; meaningful only for matching pi powers, which holds for every
    /// combination the toolkit forms. A zero side adopts the other power.
    pub fn add(&self, other: &PiValue) -> PiValue {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.pi_power, other.pi_power,
            "cannot add values with different pi powers"
        );
        PiValue::new(&self.coeff + &other.coeff, self.pi_power)
    }

    pub fn sub(&self, other: &PiValue) -> PiValue {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, r: &Rat) -> PiValue {
        PiValue::new(&self.coeff * r, self.pi_power)
    }

    /// Exact ratio `self / other`; requires matching pi powers and a
    /// nonzero denominator.
    pub fn ratio_to(&self, other: &PiValue) -> Option<Rat> {
        if other.is_zero() {
            return None;
        }
        if !self.is_zero() && self.pi_power != other.pi_power {
            return None;
        }
        Some(&self.coeff / &other.coeff)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coeff) * std::f64::consts::PI.powi(self.pi_power as i32)
    }
}

/// Weight `(1-|z|^2)^t` with either the raw Lebesgue measure `dm` or the
/// probability normalization `c_t (1-|z|^2)^t dv`, `c_t = (n+t)!/(n! t!)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Normalization {
    RawLebesgue,
    NormalizedWithCt,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WeightSpec {
    pub t: u32,
    pub normalization: Normalization,
}

impl WeightSpec {
    pub fn raw(t: u32) -> Self {
        WeightSpec {
            t,
            normalization: Normalization::RawLebesgue,
        }
    }

    pub fn normalized(t: u32) -> Self {
        WeightSpec {
            t,
            normalization: Normalization::NormalizedWithCt,
        }
    }
}

/// `c_t = (n+t)!/(n! t!)`.
pub fn weight_constant(n: usize, t: u32) -> Rat {
    Rat::new(
        factorial(n + t as usize),
        factorial(n) * factorial(t as usize),
    )
}

/// Integration region: the full ball or the shell `Omega_r`.
#[derive(Clone, PartialEq, Debug)]
pub enum Region {
    FullBall,
    Shell { inner: Rat },
}

impl Region {
    pub fn shell(inner: Rat) -> Result<Region> {
        if inner <= Rat::zero() || inner >= Rat::one() {
            return Err(CoreError::invalid(
                "region.inner",
                "shell radius must lie strictly inside (0, 1)",
            ));
        }
        Ok(Region::Shell { inner })
    }

    /// Shell over `|z| > 1/2`, the one fixed in the shell inequalities.
    pub fn half_shell() -> Region {
        Region::Shell {
            inner: Rat::new(1.into(), 2.into()),
        }
    }

    /// Complement of a shell inside the ball (`|z| < r`), used for the
    /// additivity property. Full ball has an empty complement.
    fn lower_bound_sq(&self) -> Option<Rat> {
        match self {
            Region::FullBall => None,
            Region::Shell { inner } => Some(inner * inner),
        }
    }
}

/// `||z^alpha||_t^2 = alpha! (n+t)! / (n+t+|alpha|)!` on the normalized
/// weighted space.
pub fn monomial_norm_sq(alpha: &MultiIndex, t: u32, n: usize) -> Rat {
    debug_assert_eq!(alpha.len(), n);
    let numer = alpha.factorial() * factorial(n + t as usize);
    let denom = factorial(n + t as usize + alpha.degree());
    Rat::new(numer, denom)
}

/// Normalized sphere moment `int_{dB_n} |xi^alpha|^2 dsigma
/// = (n-1)! alpha! / (n-1+|alpha|)!`.
pub fn sphere_moment(alpha: &MultiIndex, n: usize) -> Rat {
    debug_assert_eq!(alpha.len(), n);
    Rat::new(
        factorial(n - 1) * alpha.factorial(),
        factorial(n - 1 + alpha.degree()),
    )
}

/// Exact radial integral `int_a^1 u^s (1-u)^t du` with `a = lower_sq`
/// (`a = 0` for the full ball), by binomial expansion of `(1-u)^t`.
pub fn radial_moment(s: usize, t: u32, lower_sq: Option<&Rat>) -> Rat {
    match lower_sq {
        None => {
            // Beta(s+1, t+1) = s! t! / (s+t+1)!
            Rat::new(
                factorial(s) * factorial(t as usize),
                factorial(s + t as usize + 1),
            )
        }
        Some(a) => {
            let mut acc = Rat::zero();
            let mut sign = Rat::one();
            for i in 0..=(t as usize) {
                let binom = crate::scalar::binomial(t as usize, i);
                let power = s + i + 1;
                let a_pow = num::pow::pow(a.clone(), power);
                let term = Rat::from(binom) * (Rat::one() - a_pow) / Rat::from(num::BigInt::from(power));
                acc += &sign * term;
                sign = -sign;
            }
            acc
        }
    }
}

/// Exact mixed monomial moment
/// `int_region z^alpha conj(z)^beta (1-|z|^2)^t dm(z)`.
///
/// Vanishes unless `alpha = beta`; on the diagonal it factors into the
/// sphere moment and the exact radial integral.
pub fn moment(alpha: &MultiIndex, beta: &MultiIndex, t: u32, region: &Region, n: usize) -> PiValue {
    debug_assert_eq!(alpha.len(), n);
    debug_assert_eq!(beta.len(), n);
    if alpha != beta {
        return PiValue::zero(n as u32);
    }
    let s = alpha.degree() + n - 1;
    let radial = radial_moment(s, t, region.lower_bound_sq().as_ref());
    // 2n Vol(B_n) * (1/2) / pi^n = n / n!, then sigma(alpha) absorbs (n-1)!.
    let coeff = Rat::new(alpha.factorial(), factorial(n - 1 + alpha.degree())) * radial;
    PiValue::new(coeff, n as u32)
}

/// `int_region |h|^2 (1-|z|^2)^t dmu` for holomorphic `h` via monomial
/// orthogonality. With the normalized weight over the full ball this is
/// the weighted space norm `||h||_t^2`.
pub fn weighted_l2_sq_holo(h: &HoloPoly<ExactC>, spec: WeightSpec, region: &Region) -> PiValue {
    let n = h.dimension();
    let mut acc = PiValue::zero(n as u32);
    for (alpha, c) in h.terms() {
        let m = moment(alpha, alpha, spec.t, region, n);
        acc = acc.add(&m.scale(&abs_sq(c)));
    }
    apply_normalization(acc, spec, n)
}

/// `int_region |h|^2 (1-|z|^2)^t dmu` for a mixed polynomial `h`.
///
/// Terms are bucketed by the exponent difference `alpha - beta`; only
/// pairs in the same bucket produce a diagonal moment.
pub fn weighted_l2_sq(h: &MixedPoly<ExactC>, spec: WeightSpec, region: &Region) -> PiValue {
    let n = h.dimension();
    let mut buckets: std::collections::BTreeMap<Vec<i64>, Vec<(&MultiIndex, &MultiIndex, &ExactC)>> =
        std::collections::BTreeMap::new();
    for ((a, b), c) in h.terms() {
        let key: Vec<i64> = a
            .0
            .iter()
            .zip(&b.0)
            .map(|(&x, &y)| x as i64 - y as i64)
            .collect();
        buckets.entry(key).or_default().push((a, b, c));
    }
    let mut acc = PiValue::zero(n as u32);
    for group in buckets.values() {
        for (a1, b1, c1) in group {
            for (a2, b2, c2) in group {
                // (a1 - b1) = (a2 - b2) makes a1 + b2 = a2 + b1 diagonal.
                debug_assert_eq!(a1.add(b2), a2.add(b1));
                let mu = a1.add(b2);
                let m = moment(&mu, &mu, spec.t, region, n);
                let prod = c1.mul(&Scalar::conj(*c2));
                // Pair sums are conjugate-symmetric, so only the real part
                // survives; keep it exact.
                acc = acc.add(&m.scale(&prod.re));
            }
        }
    }
    apply_normalization(acc, spec, n)
}

fn apply_normalization(raw: PiValue, spec: WeightSpec, n: usize) -> PiValue {
    match spec.normalization {
        Normalization::RawLebesgue => raw,
        Normalization::NormalizedWithCt => {
            assert_eq!(raw.pi_power, n as u32);
            // c_t / Vol(B_n) = c_t n! / pi^n
            let coeff = raw.coeff * weight_constant(n, spec.t) * Rat::from(factorial(n));
            PiValue::new(coeff, 0)
        }
    }
}

/// Full-ball integral `int_{B_n} g (1-|z|^2)^t dm` computed through the
/// slice decomposition: the sphere direction and the one-variable disk
/// radius integrate independently for each mixed term.
///
/// `g` must be real-valued (an `|g|^2`-type integrand): conjugation
/// symmetry of the term map forces diagonal coefficients to be real.
pub fn slice_integral(g: &MixedPoly<ExactC>, t: u32) -> PiValue {
    let n = g.dimension();
    let mut acc = PiValue::zero(n as u32);
    for ((alpha, beta), c) in g.terms() {
        // Sphere factor: int xi^alpha conj(xi)^beta dm(xi) vanishes off
        // the diagonal, else equals 2 pi^n alpha! / (n-1+|alpha|)!.
        if alpha != beta {
            continue;
        }
        assert!(
            c.im.is_zero(),
            "slice_integral expects a real-valued integrand"
        );
        // Disk factor: int_D z^s conj(z)^s |z|^{2(n-1)} (1-|z|^2)^t dm(z)
        // = pi * radial_moment(s+n-1, t) with s = |alpha|.
        let s = alpha.degree();
        let sphere = Rat::new(
            num::BigInt::from(2) * alpha.factorial(),
            factorial(n - 1 + alpha.degree()),
        );
        let disk = radial_moment(s + n - 1, t, None);
        // (1/2pi) * (sphere * pi^n) * (disk * pi) = sphere*disk/2 * pi^n
        let term = sphere * disk / Rat::from(num::BigInt::from(2));
        acc = acc.add(&PiValue::new(&c.re * &term, n as u32));
    }
    acc
}

/// Monte Carlo estimate of `int_region h (1-|z|^2)^t dm` by rejection
/// sampling from the bounding box `[-1,1]^{2n}`.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub value: C64,
    pub std_err: f64,
    pub samples: u64,
    pub seed: u64,
}

pub fn monte_carlo_integral(
    h: &MixedPoly<ExactC>,
    t: u32,
    region: &Region,
    samples: u64,
    seed: u64,
) -> McEstimate {
    assert!(samples >= 1);
    let n = h.dimension();
    let hf = h.map_scalars(|c| c.to_c64());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower_sq = region
        .lower_bound_sq()
        .map(|r| rat_to_f64(&r))
        .unwrap_or(0.0);
    let box_volume = 4f64.powi(n as i32);
    let mut sum = C64::new(0.0, 0.0);
    let mut sum_sq_re = 0.0;
    let mut sum_sq_im = 0.0;
    let mut z = vec![C64::new(0.0, 0.0); n];
    for _ in 0..samples {
        let mut norm_sq = 0.0;
        for zi in z.iter_mut() {
            let re = rng.gen_range(-1.0..1.0);
            let im = rng.gen_range(-1.0..1.0);
            *zi = C64::new(re, im);
            norm_sq += re * re + im * im;
        }
        let inside = norm_sq < 1.0 && norm_sq > lower_sq;
        let v = if inside {
            hf.eval(&z) * (1.0 - norm_sq).powi(t as i32)
        } else {
            C64::new(0.0, 0.0)
        };
        sum += v;
        sum_sq_re += v.re * v.re;
        sum_sq_im += v.im * v.im;
    }
    let count = samples as f64;
    let mean = sum / count;
    let var_re = (sum_sq_re / count - mean.re * mean.re).max(0.0);
    let var_im = (sum_sq_im / count - mean.im * mean.im).max(0.0);
    let std_err = box_volume * ((var_re + var_im) / count).sqrt();
    McEstimate {
        value: mean * box_volume,
        std_err,
        samples,
        seed,
    }
}

/// Volume of the unit ball as an exact value: `pi^n / n!`.
pub fn ball_volume(n: usize) -> PiValue {
    PiValue::new(Rat::new(num::BigInt::one(), factorial(n)), n as u32)
}

/// True when `value` is within `k` standard errors of `exact`.
pub fn within_std_errors(est: &McEstimate, exact: &PiValue, k: f64) -> bool {
    let diff = (est.value - C64::new(exact.to_f64(), 0.0)).norm();
    // Guard the fully-degenerate zero-variance case with a tiny floor.
    diff <= k * est.std_err.max(1e-12)
}
