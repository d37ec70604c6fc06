//! Executable verifiers for the identity and inequality suite: the
//! commutator series identity, the fractional number-operator bounds, the
//! three shell derivative bounds with empirical constant estimation, the
//! per-term series bound, the shell comparison and dilation bounds, the
//! one-variable circle/disk averages, and the tangential-radial identity.
//!
//! Whenever a claim is exactly checkable it is compared in rational
//! arithmetic; only the circle/disk averages (non-polynomial integrands)
//! and the empirical constants go through floats.

use num::{One, Zero};
use serde_json::json;

use crate::error::{CoreError, Result};
use crate::moments::{weighted_l2_sq, weighted_l2_sq_holo, PiValue, Region, WeightSpec};
use crate::multiindex::MultiIndex;
use crate::operators::adjoint_action;
use crate::poly::{HoloPoly, MixedPoly};
use crate::randpoly::{RandomPolyModel, Support};
use crate::report::VerificationReport;
use crate::scalar::{abs_sq, rat_to_f64, C64, ExactC, Rat, Scalar};

fn pow_rat(base: &Rat, exp: usize) -> Rat {
    num::pow::pow(base.clone(), exp)
}

fn rat_usize(v: usize) -> Rat {
    Rat::from(num::BigInt::from(v))
}

/// Squared norm `||f||^2` on the unweighted space (exact rational).
fn norm_sq(f: &HoloPoly<ExactC>) -> Rat {
    weighted_l2_sq_holo(f, WeightSpec::normalized(0), &Region::FullBall).coeff
}

/// Squared weighted norm `||f||_t^2` (exact rational).
fn norm_sq_t(f: &HoloPoly<ExactC>, t: u32) -> Rat {
    weighted_l2_sq_holo(f, WeightSpec::normalized(t), &Region::FullBall).coeff
}

/// `|| (N+1+n)^{-(k+1/2)} g ||^2` summed over homogeneous parts (exact).
fn fractional_number_norm_sq(g: &HoloPoly<ExactC>, k: u32, n: usize) -> Rat {
    let mut acc = Rat::zero();
    if let Some(deg) = g.degree() {
        for d in 0..=deg {
            let part = g.homogeneous_part(d);
            if part.is_zero() {
                continue;
            }
            let denom = pow_rat(&rat_usize(d + 1 + n), 2 * k as usize + 1);
            acc += norm_sq(&part) / denom;
        }
    }
    acc
}

/// Exact check of the commutator series identity on monomials
/// `p = z^alpha`, `f = z^beta`:
///
/// `M*_{z_j} M_p f - M_p M*_{z_j} f
///   = sum_k (N+1+n)^{-(k+1)} [M_{d_j R^k p} - M*_{z_j} M_{R^{k+1} p}] f`,
///
/// comparing the left side against the closed form
/// `(alpha_j(n+|beta|) - beta_j|alpha|) / ((n+|alpha|+|beta|)(n+|beta|))`
/// and the `K`-term partial sum against the exact geometric tail.
pub fn verify_series_identity(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    j: usize,
    k_terms: usize,
) -> Result<VerificationReport> {
    let n = alpha.len();
    if beta.len() != n {
        return Err(CoreError::DimensionMismatch(beta.len(), n));
    }
    if j < 1 || j > n {
        return Err(CoreError::CoordinateOutOfRange { index: j, n });
    }
    let p = HoloPoly::monomial(n, alpha.clone(), Scalar::one());
    let f = HoloPoly::monomial(n, beta.clone(), Scalar::one());
    let pf = p.mul(&f)?;

    // LHS through the adjoint action
    let lhs = adjoint_action(&pf, j, 0).sub(&p.mul(&adjoint_action(&f, j, 0))?)?;

    // closed form from the telescoped series
    let a = alpha.degree();
    let b = beta.degree();
    let closed = if alpha.get(j) + beta.get(j) == 0 {
        HoloPoly::zero(n)
    } else {
        let numer = Rat::from(num::BigInt::from(
            alpha.get(j) as i64 * (n + b) as i64 - beta.get(j) as i64 * a as i64,
        ));
        let denom = rat_usize((n + a + b) * (n + b));
        let coeff = ExactC::new(numer / denom, Rat::zero());
        let exponent = alpha.add(beta).lower(j).expect("alpha_j + beta_j > 0");
        HoloPoly::monomial(n, exponent, coeff)
    };
    let closed_ok = lhs == closed;

    // Series terms through the operator pipeline; the partial sum is
    // checked against the exact geometric tail at every truncation K:
    // terms scale by q = |alpha| / (n+|alpha|+|beta|), so the omitted
    // mass after K terms is |c_K| / (1 - q). Both the radial powers and
    // the (N+1+n)^{-(k+1)} divisor advance incrementally — each bracket
    // lives on the single exponent alpha+beta-eps_j, of fixed degree.
    // (deg + 1 + n) for the bracket's fixed degree a + b - 1
    let bracket_degree_shift = rat_usize(a + b + n);
    let q = rat_usize(a) / rat_usize(n + a + b);
    let geom = Rat::one() / (Rat::one() - q.clone());
    let geom_sq = geom.clone() * geom;
    let coeff_sq = |g: &HoloPoly<ExactC>| -> Rat {
        g.terms().next().map(|(_, c)| abs_sq(c)).unwrap_or_else(Rat::zero)
    };
    let mut terms = Vec::with_capacity(k_terms + 1);
    let mut rkp = p.clone();
    let mut divisor = bracket_degree_shift.clone();
    for _ in 0..=k_terms {
        let rk1p = rkp.radial_derivative();
        let first = rkp.partial_derivative(j).mul(&f)?;
        let second = adjoint_action(&rk1p.mul(&f)?, j, 0);
        let bracket = first.sub(&second)?;
        debug_assert!(bracket.num_terms() <= 1);
        terms.push(bracket.scale(&ExactC::new(divisor.recip(), Rat::zero())));
        rkp = rk1p;
        divisor *= &bracket_degree_shift;
    }
    let mut partial = HoloPoly::zero(n);
    let mut tail_ok = true;
    for k in 0..k_terms {
        partial = partial.add(&terms[k])?;
        let tail_sq = coeff_sq(&terms[k + 1]) * geom_sq.clone();
        let diff_sq = coeff_sq(&partial.sub(&lhs)?);
        tail_ok &= diff_sq <= tail_sq;
    }

    let lhs_coeff = lhs
        .terms()
        .next()
        .map(|(_, c)| rat_to_f64(&c.re))
        .unwrap_or(0.0);
    Ok(VerificationReport::float(
        "commutator-series-identity",
        json!({
            "n": n,
            "alpha": format!("{alpha:?}"),
            "beta": format!("{beta:?}"),
            "j": j,
            "terms": k_terms,
            "tail_q": rat_to_f64(&q),
        }),
        lhs_coeff,
        lhs_coeff,
        closed_ok && tail_ok,
    ))
}

/// Exact check of the two fractional number-operator bounds for a
/// homogeneous `f` with `deg f >= l`:
///
/// (1) `||(N+1+n)^{-(k+1/2)} f||^2
///        <= (n+2k+1+l)^l / (l+1+n)^{2k+1} ||f||_{2k+1}^2`
/// (2) `||(N+1+n)^{-(k+1/2)} (T*_{z_j} - T^{(2k+1)*}_{z_j}) f||^2
///        <= (n+2k+2+l)^l / (l+n)^{2k+1} ||f||_{2k+2}^2` for every `j`.
pub fn verify_number_weight_bounds(
    f: &HoloPoly<ExactC>,
    k: u32,
    l: usize,
) -> Result<Vec<VerificationReport>> {
    if f.is_zero() {
        return Err(CoreError::invalid("f", "must be nonzero"));
    }
    let n = f.dimension();
    let d = f.degree().unwrap();
    if f.homogeneous_part(d) != *f {
        return Err(CoreError::invalid("f", "must be homogeneous"));
    }
    if d < l {
        return Err(CoreError::invalid("l", "needs deg f >= l"));
    }
    let k_us = k as usize;

    // (1)
    let lhs1 = norm_sq(f) / pow_rat(&rat_usize(d + 1 + n), 2 * k_us + 1);
    let rhs1 = pow_rat(&rat_usize(n + 2 * k_us + 1 + l), l)
        / pow_rat(&rat_usize(l + 1 + n), 2 * k_us + 1)
        * norm_sq_t(f, 2 * k + 1);
    let pass1 = lhs1 <= rhs1;
    let report1 = VerificationReport::exact(
        "number-weight-bound-1",
        json!({"n": n, "deg": d, "k": k, "l": l}),
        &PiValue::rational(lhs1),
        &PiValue::rational(rhs1),
        pass1,
    );

    // (2): worst coordinate
    let rhs2 = pow_rat(&rat_usize(n + 2 * k_us + 2 + l), l)
        / pow_rat(&rat_usize(l + n), 2 * k_us + 1)
        * norm_sq_t(f, 2 * k + 2);
    let mut lhs2_max = Rat::zero();
    for j in 1..=n {
        let g = adjoint_action(f, j, 0).sub(&adjoint_action(f, j, 2 * k + 1))?;
        if g.is_zero() {
            continue;
        }
        // g is homogeneous of degree d - 1
        let lhs = norm_sq(&g) / pow_rat(&rat_usize(d + n), 2 * k_us + 1);
        if lhs > lhs2_max {
            lhs2_max = lhs;
        }
    }
    let pass2 = lhs2_max <= rhs2;
    let report2 = VerificationReport::exact(
        "number-weight-bound-2",
        json!({"n": n, "deg": d, "k": k, "l": l}),
        &PiValue::rational(lhs2_max),
        &PiValue::rational(rhs2),
        pass2,
    );
    Ok(vec![report1, report2])
}

/// The three families of shell bounds, each comparing a derivative of `p`
/// times `f` on the half shell against `p f` on the ball:
///
/// 1. radial: weight `2k` vs `2k - 2l`, needs `l <= k`;
/// 2. tangential: weight `2k+1` vs `2k`, needs `i != j`;
/// 3. coordinate: weight `2k+2` vs `2k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeFamily {
    Radial { l: u32 },
    Tangential { j: usize, i: usize },
    Coordinate { j: usize },
}

impl DerivativeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            DerivativeFamily::Radial { .. } => "shell-bound-radial",
            DerivativeFamily::Tangential { .. } => "shell-bound-tangential",
            DerivativeFamily::Coordinate { .. } => "shell-bound-coordinate",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShellBoundOutcome {
    pub report: VerificationReport,
    /// Exact ratio `LHS / RHS-core`: the constant this family would need
    /// at this `k`, before the `(k+1)`-st root.
    pub ratio: Rat,
    /// `ratio^(1/(k+1))` — the per-k empirical constant.
    pub per_k_constant: f64,
}

pub fn verify_shell_derivative_bound(
    p: &HoloPoly<ExactC>,
    f: &HoloPoly<ExactC>,
    k: u32,
    family: DerivativeFamily,
    cap: f64,
) -> Result<ShellBoundOutcome> {
    let n = p.dimension();
    if f.dimension() != n {
        return Err(CoreError::DimensionMismatch(f.dimension(), n));
    }
    let pf = p.mul(f)?;
    if pf.is_zero() {
        return Err(CoreError::invalid("p*f", "must be nonzero (ratio undefined)"));
    }
    let shell = Region::half_shell();
    let (lhs, rhs_core) = match family {
        DerivativeFamily::Radial { l } => {
            if l > k {
                return Err(CoreError::invalid("l", "radial family needs l <= k"));
            }
            let g = p.radial_power(l as usize).mul(f)?;
            let lhs = weighted_l2_sq(&g.as_mixed(), WeightSpec::raw(2 * k), &shell);
            let rhs = weighted_l2_sq(
                &pf.as_mixed(),
                WeightSpec::raw(2 * k - 2 * l),
                &Region::FullBall,
            );
            (lhs, rhs)
        }
        DerivativeFamily::Tangential { j, i } => {
            let g = p.tangential_derivative(j, i)?.mul_holo(f)?;
            let lhs = weighted_l2_sq(&g, WeightSpec::raw(2 * k + 1), &shell);
            let rhs = weighted_l2_sq(&pf.as_mixed(), WeightSpec::raw(2 * k), &Region::FullBall);
            (lhs, rhs)
        }
        DerivativeFamily::Coordinate { j } => {
            if j < 1 || j > n {
                return Err(CoreError::CoordinateOutOfRange { index: j, n });
            }
            let g = p.partial_derivative(j).mul(f)?;
            let lhs = weighted_l2_sq(&g.as_mixed(), WeightSpec::raw(2 * k + 2), &shell);
            let rhs = weighted_l2_sq(&pf.as_mixed(), WeightSpec::raw(2 * k), &Region::FullBall);
            (lhs, rhs)
        }
    };
    let ratio = lhs
        .ratio_to(&rhs_core)
        .ok_or_else(|| CoreError::invalid("ratio", "degenerate right-hand side"))?;
    let ratio_f = rat_to_f64(&ratio);
    let per_k = ratio_f.max(0.0).powf(1.0 / (k as f64 + 1.0));
    let pass = ratio_f <= cap.powi(k as i32 + 1) * (1.0 + 1e-9);
    let report = VerificationReport::exact(
        family.name(),
        json!({
            "n": n,
            "k": k,
            "family": format!("{family:?}"),
            "deg_p": p.degree(),
            "deg_f": f.degree(),
            "per_k_constant": per_k,
            "cap": cap,
        }),
        &lhs,
        &rhs_core,
        pass,
    );
    Ok(ShellBoundOutcome {
        report,
        ratio,
        per_k_constant: per_k,
    })
}

/// Per-trial seed derivation (splitmix-style), so trials are independent
/// of execution order.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut x = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ConstantEstimate {
    pub n: usize,
    pub m: usize,
    /// Sampled maximum of `ratio^(1/(k+1))` over all trials and families.
    pub cap: f64,
    pub attained: serde_json::Value,
    pub trials: usize,
    pub kmax: u32,
    pub seed: u64,
}

/// Empirical estimate of the shell-bound constant for degree-`m`
/// generators in dimension `n`: the sampled maximum of the per-k
/// constants over seeded random `(p, f)`, every family and `k <= kmax`.
pub fn estimate_derivative_constant(
    n: usize,
    m: usize,
    trials: usize,
    kmax: u32,
    seed: u64,
) -> Result<ConstantEstimate> {
    if trials < 1 {
        return Err(CoreError::invalid("trials", "need at least one trial"));
    }
    let mut cap = 0.0f64;
    let mut attained = json!(null);
    for t in 0..trials {
        let s = trial_seed(seed, t as u64);
        let (p, f) = sample_pair(n, m, s);
        for k in 0..=kmax {
            let mut families: Vec<DerivativeFamily> = Vec::new();
            for l in 0..=k {
                families.push(DerivativeFamily::Radial { l });
            }
            if n >= 2 {
                families.push(DerivativeFamily::Tangential { j: 1, i: 2 });
            }
            families.push(DerivativeFamily::Coordinate { j: 1 });
            for fam in families {
                let out = verify_shell_derivative_bound(&p, &f, k, fam, f64::INFINITY)?;
                if out.per_k_constant > cap {
                    cap = out.per_k_constant;
                    attained = json!({
                        "trial": t,
                        "seed": s,
                        "k": k,
                        "family": format!("{fam:?}"),
                        "ratio": rat_to_f64(&out.ratio),
                    });
                }
            }
        }
    }
    Ok(ConstantEstimate {
        n,
        m,
        cap,
        attained,
        trials,
        kmax,
        seed,
    })
}

/// Structured draw for constant estimation: monomial generators are mixed
/// in because extremal ratios concentrate on them.
fn sample_pair(n: usize, m: usize, seed: u64) -> (HoloPoly<ExactC>, HoloPoly<ExactC>) {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let p = match rng.gen_range(0..4u8) {
        0 => {
            let tops = crate::multiindex::enumerate_degree(n, m);
            let alpha = tops[rng.gen_range(0..tops.len())].clone();
            HoloPoly::monomial(n, alpha, Scalar::one())
        }
        1 => RandomPolyModel {
            n,
            degree: m,
            support: Support::Sparse {
                terms: (m + 1).min(2).max(1),
            },
        }
        .generate(rng.gen()),
        _ => RandomPolyModel::dense(n, m).generate(rng.gen()),
    };
    let f = match rng.gen_range(0..4u8) {
        0 => HoloPoly::one(n),
        1 => {
            let df = rng.gen_range(0..=3usize);
            let tops = crate::multiindex::enumerate_degree(n, df);
            HoloPoly::monomial(n, tops[rng.gen_range(0..tops.len())].clone(), Scalar::one())
        }
        _ => RandomPolyModel::dense(n, rng.gen_range(0..=3usize)).generate(rng.gen()),
    };
    (p, f)
}

/// `|| (N+1+n)^{-(k+1/2)} [M_{d_j R^k p} - M*_{z_j} M_{R^{k+1} p}] f ||^2`
/// as an exact rational.
pub fn series_term_norm_sq(
    p: &HoloPoly<ExactC>,
    f: &HoloPoly<ExactC>,
    j: usize,
    k: u32,
) -> Result<Rat> {
    let n = p.dimension();
    let first = p.radial_power(k as usize).partial_derivative(j).mul(f)?;
    let second = adjoint_action(&p.radial_power(k as usize + 1).mul(f)?, j, 0);
    let g = first.sub(&second)?;
    Ok(fractional_number_norm_sq(&g, k, n))
}

/// Exact left side of the per-term series bound compared against
/// `(n+1) (n+2k+2+l)^{(l+n)/2} C^{k+1} / (l+n)^{k+1/2} ||p f||`
/// with the empirical constant `C`.
pub fn verify_series_term_bound(
    p: &HoloPoly<ExactC>,
    f: &HoloPoly<ExactC>,
    j: usize,
    k: u32,
    l: usize,
    c_empirical: f64,
) -> Result<VerificationReport> {
    let n = p.dimension();
    if f.dimension() != n {
        return Err(CoreError::DimensionMismatch(f.dimension(), n));
    }
    if l > 0 {
        if let Some(dmin) = f.terms().map(|(a, _)| a.degree()).min() {
            if dmin < l {
                return Err(CoreError::invalid(
                    "f",
                    "must vanish to order l at the origin",
                ));
            }
        }
    }
    let lhs_sq = series_term_norm_sq(p, f, j, k)?;
    let pf = p.mul(f)?;
    let rhs_sq_over_c = rat_usize((n + 1) * (n + 1))
        * pow_rat(&rat_usize(n + 2 * k as usize + 2 + l), l + n)
        / pow_rat(&rat_usize(l + n), 2 * k as usize + 1)
        * norm_sq(&pf);
    let rhs = rat_to_f64(&rhs_sq_over_c).sqrt() * c_empirical.powi(k as i32 + 1);
    let lhs = rat_to_f64(&lhs_sq).sqrt();
    let pass = lhs <= rhs * (1.0 + 1e-9);
    Ok(VerificationReport::float(
        "series-term-bound",
        json!({"n": n, "k": k, "l": l, "j": j, "c": c_empirical}),
        lhs,
        rhs,
        pass,
    ))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SeriesDecay {
    /// `t_k` norms of the series terms for `k = 0..=kmax`.
    pub terms: Vec<f64>,
    pub max_consecutive_ratio: Option<f64>,
    /// True when every consecutive ratio stays below 1.
    pub geometric: bool,
}

/// Aggregate decay of the series terms over `k`.
pub fn series_term_decay(
    p: &HoloPoly<ExactC>,
    f: &HoloPoly<ExactC>,
    j: usize,
    kmax: u32,
) -> Result<SeriesDecay> {
    let mut terms = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        terms.push(rat_to_f64(&series_term_norm_sq(p, f, j, k)?).sqrt());
    }
    let mut max_ratio: Option<f64> = None;
    for w in terms.windows(2) {
        if w[0] > 0.0 {
            let r = w[1] / w[0];
            max_ratio = Some(max_ratio.map_or(r, |m: f64| m.max(r)));
        }
    }
    let geometric = max_ratio.map_or(true, |r| r < 1.0);
    Ok(SeriesDecay {
        terms,
        max_consecutive_ratio: max_ratio,
        geometric,
    })
}

/// Exact shell comparison
/// `int_B |f|^2 (1-|z|^2)^t dm <= 3^{t+1} int_{O_{1/2}} |f|^2 (1-|z|^2)^t dm`.
pub fn verify_shell_comparison(f: &HoloPoly<ExactC>, t: u32) -> Result<VerificationReport> {
    if f.is_zero() {
        return Err(CoreError::invalid("f", "must be nonzero"));
    }
    let lhs = weighted_l2_sq_holo(f, WeightSpec::raw(t), &Region::FullBall);
    let shell = weighted_l2_sq_holo(f, WeightSpec::raw(t), &Region::half_shell());
    let rhs = shell.scale(&pow_rat(&rat_usize(3), t as usize + 1));
    let pass = lhs.coeff <= rhs.coeff;
    Ok(VerificationReport::exact(
        "shell-comparison",
        json!({"n": f.dimension(), "t": t, "deg": f.degree()}),
        &lhs,
        &rhs,
        pass,
    ))
}

/// Exact dilation bound
/// `int |f_r|^2 |p|^2 dm <= 2^{2(m+n-1)} int |f|^2 |p|^2 dm`
/// for rational `r = num/den` in `(1/2, 1)`, `m = deg p`.
pub fn verify_dilation_bound(
    p: &HoloPoly<ExactC>,
    f: &HoloPoly<ExactC>,
    r_num: i64,
    r_den: i64,
) -> Result<VerificationReport> {
    let n = p.dimension();
    if p.is_zero() {
        return Err(CoreError::invalid("p", "must be nonzero"));
    }
    let r = Rat::new(r_num.into(), r_den.into());
    if r <= Rat::new(1.into(), 2.into()) || r >= Rat::one() {
        return Err(CoreError::invalid("r", "dilation needs 1/2 < r < 1"));
    }
    let m = p.degree().unwrap();
    let f_r = f.dilate_ratio(r_num, r_den);
    let lhs = weighted_l2_sq(
        &p.mul(&f_r)?.as_mixed(),
        WeightSpec::raw(0),
        &Region::FullBall,
    );
    let base = weighted_l2_sq(
        &p.mul(f)?.as_mixed(),
        WeightSpec::raw(0),
        &Region::FullBall,
    );
    let factor = pow_rat(&rat_usize(4), m + n - 1);
    let rhs = base.scale(&factor);
    let pass = lhs.coeff <= rhs.coeff;
    Ok(VerificationReport::exact(
        "dilation-bound",
        json!({"n": n, "m": m, "r": format!("{r_num}/{r_den}"), "deg_f": f.degree()}),
        &lhs,
        &rhs,
        pass,
    ))
}

/// Composite trapezoid average of `|g|` over the circle of given radius;
/// spectrally accurate for zero-free circles.
fn circle_average(g: &MixedPoly<C64>, radius: f64, nodes: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..nodes {
        let theta = std::f64::consts::TAU * (k as f64) / (nodes as f64);
        let z = [C64::from_polar(radius, theta)];
        acc += g.eval(&z).norm();
    }
    acc / nodes as f64
}

/// Normalized disk average of `|g|` over `rD` by composite Simpson in the
/// radius over circle averages.
fn disk_average(g: &MixedPoly<C64>, radius: f64, radial_nodes: usize, circle_nodes: usize) -> f64 {
    let m = if radial_nodes % 2 == 0 {
        radial_nodes
    } else {
        radial_nodes + 1
    };
    let h = radius / m as f64;
    let integrand = |rho: f64| -> f64 {
        if rho == 0.0 {
            0.0
        } else {
            rho * circle_average(g, rho, circle_nodes)
        }
    };
    let mut acc = integrand(0.0) + integrand(radius);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(i as f64 * h);
    }
    let integral = acc * h / 3.0;
    // (2/r^2) int_0^r avg(rho) rho drho
    2.0 * integral / (radius * radius)
}

#[derive(Clone, Debug)]
pub struct DiskAverageOutcome {
    pub circle_report: VerificationReport,
    pub disk_report: VerificationReport,
    /// Largest change produced by the final node doubling.
    pub doubling_change: f64,
}

/// Quadrature tolerance of the circle/disk bounds.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Required stability under node doubling.
pub const DOUBLING_TOL: f64 = 1e-10;

/// One-variable circle and disk average bounds at radius `r` (the `r = 1`
/// case is the plain statement; general `r` applies it to the dilates):
///
/// (1) `r^l |d^l p(0) f(0)| <= m!/(m-l)! avg_{|z|=r} |p f|`
/// (2) `r^l |d^l p(0) f(0)| <= (l+2) m! / (2 (m-l)!) avg_{rD} |p f|`
pub fn verify_disk_average_bounds(
    p: &HoloPoly<ExactC>,
    f: &HoloPoly<ExactC>,
    l: usize,
    r: f64,
    nodes: usize,
) -> Result<DiskAverageOutcome> {
    if p.dimension() != 1 || f.dimension() != 1 {
        return Err(CoreError::invalid("p", "one-variable bound"));
    }
    if p.is_zero() {
        return Err(CoreError::invalid("p", "must be nonzero"));
    }
    if !(0.0 < r && r <= 1.0) {
        return Err(CoreError::invalid("r", "radius must lie in (0, 1]"));
    }
    let m = p.degree().unwrap().max(l);
    if l < 1 {
        return Err(CoreError::invalid("l", "order must satisfy 1 <= l <= m"));
    }
    // l-th derivative of p at 0: l! * coefficient
    let coeff = p.coeff(&MultiIndex::new(vec![l as u32]));
    let deriv0 = rat_to_f64(&abs_sq(&coeff)).sqrt() * factorial_f64(l);
    let f0 = f.coeff(&MultiIndex::zero(1)).to_c64().norm();
    let lhs = r.powi(l as i32) * deriv0 * f0;
    let falling = factorial_f64(m) / factorial_f64(m - l);

    let g = p.mul(f)?.as_mixed().map_scalars(|c| c.to_c64());
    // node-doubling convergence for both averages
    let base = nodes.max(64);
    let mut circle_nodes = base;
    let mut circle_prev = circle_average(&g, r, circle_nodes);
    let (circle_val, circle_change) = loop {
        circle_nodes *= 2;
        let val = circle_average(&g, r, circle_nodes);
        let change = (val - circle_prev).abs();
        if change < DOUBLING_TOL {
            break (val, change);
        }
        if circle_nodes > base * 64 {
            return Err(CoreError::QuadratureNonConvergent { change });
        }
        circle_prev = val;
    };
    let mut radial_nodes = base;
    let mut disk_prev = disk_average(&g, r, radial_nodes, circle_nodes);
    let (disk_val, disk_change) = loop {
        radial_nodes *= 2;
        let val = disk_average(&g, r, radial_nodes, circle_nodes);
        let change = (val - disk_prev).abs();
        if change < DOUBLING_TOL {
            break (val, change);
        }
        if radial_nodes > base * 512 {
            return Err(CoreError::QuadratureNonConvergent { change });
        }
        disk_prev = val;
    };

    let rhs1 = falling * circle_val;
    let rhs2 = (l as f64 + 2.0) * falling / 2.0 * disk_val;
    let pass1 = lhs <= rhs1 + QUADRATURE_TOL * rhs1.abs().max(1.0);
    let pass2 = lhs <= rhs2 + QUADRATURE_TOL * rhs2.abs().max(1.0);
    let params = json!({
        "m": m, "l": l, "r": r,
        "circle_nodes": circle_nodes,
        "radial_nodes": radial_nodes,
    });
    Ok(DiskAverageOutcome {
        circle_report: VerificationReport::float(
            "circle-average-bound",
            params.clone(),
            lhs,
            rhs1,
            pass1,
        ),
        disk_report: VerificationReport::float("disk-average-bound", params, lhs, rhs2, pass2),
        doubling_change: circle_change.max(disk_change),
    })
}

fn factorial_f64(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product::<f64>().max(1.0)
}

/// The pointwise identity
/// `d_j p - conj(z_j) R p = (1-|z|^2) d_j p + sum_{i != j} z_i L_{j,i} p`,
/// checked symbolically as mixed polynomials and at sampled points.
pub fn verify_tangential_identity(
    p: &HoloPoly<ExactC>,
    j: usize,
    sample_points: usize,
    seed: u64,
) -> Result<VerificationReport> {
    use rand::Rng;
    use rand::SeedableRng;
    let n = p.dimension();
    if j < 1 || j > n {
        return Err(CoreError::CoordinateOutOfRange { index: j, n });
    }
    let dj = p.partial_derivative(j);
    // LHS = d_j p - conj(z_j) R p
    let mut conj_zj_rp = MixedPoly::zero(n);
    for (alpha, c) in p.radial_derivative().terms() {
        conj_zj_rp.add_term(alpha.clone(), MultiIndex::unit(n, j), c.clone());
    }
    let lhs = dj.as_mixed().sub(&conj_zj_rp)?;
    // RHS = (1-|z|^2) d_j p + sum_{i != j} z_i L_{j,i} p
    let mut norm_sq_poly = MixedPoly::zero(n);
    for i in 1..=n {
        norm_sq_poly.add_term(MultiIndex::unit(n, i), MultiIndex::unit(n, i), Scalar::one());
    }
    let mut rhs = dj.as_mixed().sub(&norm_sq_poly.mul(&dj.as_mixed())?)?;
    for i in 1..=n {
        if i == j {
            continue;
        }
        let li = p.tangential_derivative(j, i)?;
        let zi = HoloPoly::variable(n, i);
        rhs = rhs.add(&li.mul_holo(&zi)?)?;
    }
    let symbolic_ok = lhs == rhs;

    let lhs_f = lhs.map_scalars(|c| c.to_c64());
    let rhs_f = rhs.map_scalars(|c| c.to_c64());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_resid = 0.0f64;
    for _ in 0..sample_points {
        let z: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)))
            .collect();
        let resid = (lhs_f.eval(&z) - rhs_f.eval(&z)).norm();
        max_resid = max_resid.max(resid);
    }
    let pass = symbolic_ok && max_resid < 1e-12;
    Ok(VerificationReport::float(
        "tangential-radial-identity",
        json!({"n": n, "j": j, "points": sample_points, "symbolic": symbolic_ok}),
        max_resid,
        1e-12,
        pass,
    )
    .with_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn z(n: usize, j: usize) -> HoloPoly<ExactC> {
        HoloPoly::variable(n, j)
    }

    #[test]
    fn series_identity_example() {
        // n = 2, alpha = (2,0), beta = (1,0), j = 1: both sides 4/15 z1^2
        let rep = verify_series_identity(&mi(&[2, 0]), &mi(&[1, 0]), 1, 12).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.lhs.float - 4.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn series_identity_constant_multiplier() {
        let rep = verify_series_identity(&mi(&[0, 0]), &mi(&[1, 2]), 1, 5).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lhs.float, 0.0);
    }

    #[test]
    fn series_identity_vanishing_coordinate() {
        // alpha_j = beta_j = 0 makes the closed form vanish
        let rep = verify_series_identity(&mi(&[0, 2]), &mi(&[0, 1]), 1, 8).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lhs.float, 0.0);
    }

    #[test]
    fn series_identity_small_grid() {
        for alpha in crate::multiindex::enumerate(2, 3) {
            for beta in crate::multiindex::enumerate(2, 3) {
                for j in 1..=2 {
                    let rep = verify_series_identity(&alpha, &beta, j, 6).unwrap();
                    assert!(rep.pass, "failed at {alpha:?}, {beta:?}, j={j}");
                }
            }
        }
    }

    #[test]
    fn number_weight_equality_case() {
        // n = 2, k = 0, l = 0, f = 1: both sides are exactly 1/3.
        let reps = verify_number_weight_bounds(&HoloPoly::one(2), 0, 0).unwrap();
        assert!(reps[0].pass);
        assert_eq!(reps[0].lhs.rational.as_deref(), Some("1/3"));
        assert_eq!(reps[0].rhs.rational.as_deref(), Some("1/3"));
    }

    #[test]
    fn number_weight_adjoint_difference_value() {
        // k = 0, f = z1, n = 2, l = 1: difference (1/3 - 1/4) = 1/12 on the
        // constants, LHS = (1/3) * (1/12)^2 = 1/432.
        let reps = verify_number_weight_bounds(&z(2, 1), 0, 1).unwrap();
        assert!(reps[1].pass);
        assert_eq!(reps[1].lhs.rational.as_deref(), Some("1/432"));
    }

    #[test]
    fn number_weight_monomials_hold() {
        for alpha in crate::multiindex::enumerate(2, 4) {
            let d = alpha.degree();
            let f = HoloPoly::monomial(2, alpha.clone(), Scalar::one());
            for k in 0..=2u32 {
                for l in 0..=d {
                    let reps = verify_number_weight_bounds(&f, k, l).unwrap();
                    assert!(reps.iter().all(|r| r.pass), "failed at {alpha:?} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn number_weight_rejects_inhomogeneous() {
        let f = z(2, 1).add(&HoloPoly::one(2)).unwrap();
        assert!(verify_number_weight_bounds(&f, 0, 0).is_err());
    }

    #[test]
    fn shell_bound_constant_multiplier_inclusion() {
        // constant p, radial family with l = 0: shell subset of ball
        // forces ratio <= 1.
        let p = HoloPoly::one(2);
        let f = RandomPolyModel::dense(2, 2).generate(5);
        for k in 0..=3u32 {
            let out =
                verify_shell_derivative_bound(&p, &f, k, DerivativeFamily::Radial { l: 0 }, 1.0)
                    .unwrap();
            assert!(out.report.pass);
            assert!(out.ratio <= Rat::one());
        }
    }

    #[test]
    fn shell_bound_coordinate_example_value() {
        // p = z1^2, f = 1, k = 0, coordinate family: exact ratio 459/640.
        let p = HoloPoly::monomial(2, mi(&[2, 0]), Scalar::one());
        let out = verify_shell_derivative_bound(
            &p,
            &HoloPoly::one(2),
            0,
            DerivativeFamily::Coordinate { j: 1 },
            10.0,
        )
        .unwrap();
        assert_eq!(out.ratio, rat(459, 640));
        assert!(out.report.pass);
    }

    #[test]
    fn shell_bound_radial_needs_l_at_most_k() {
        let err = verify_shell_derivative_bound(
            &z(2, 1),
            &HoloPoly::one(2),
            1,
            DerivativeFamily::Radial { l: 2 },
            10.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn shell_bound_zero_product_rejected() {
        let err = verify_shell_derivative_bound(
            &z(2, 1),
            &HoloPoly::zero(2),
            0,
            DerivativeFamily::Coordinate { j: 1 },
            10.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn constant_estimate_is_deterministic() {
        let a = estimate_derivative_constant(1, 1, 8, 3, 77).unwrap();
        let b = estimate_derivative_constant(1, 1, 8, 3, 77).unwrap();
        assert_eq!(a.cap, b.cap);
        assert!(a.cap.is_finite() && a.cap > 0.0);
    }

    #[test]
    fn series_term_vanishes_for_constant_generator() {
        let p = HoloPoly::one(2);
        let f = RandomPolyModel::dense(2, 2).generate(9);
        for k in 0..=3u32 {
            let sq = series_term_norm_sq(&p, &f, 1, k).unwrap();
            assert!(sq.is_zero());
        }
    }

    #[test]
    fn series_term_exact_value() {
        // k = 0, p = z1, f = z1, n = 2, j = 1: squared norm 1/48.
        let sq = series_term_norm_sq(&z(2, 1), &z(2, 1), 1, 0).unwrap();
        assert_eq!(sq, rat(1, 48));
        let rep = verify_series_term_bound(&z(2, 1), &z(2, 1), 1, 0, 1, 2.0).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn series_decay_is_geometric_for_monomials() {
        let p = HoloPoly::monomial(2, mi(&[1, 1]), Scalar::one());
        let f = HoloPoly::monomial(2, mi(&[2, 1]), Scalar::one());
        let decay = series_term_decay(&p, &f, 1, 6).unwrap();
        assert!(decay.geometric, "{decay:?}");
    }

    #[test]
    fn shell_comparison_examples() {
        // f = 1, t = 0, n = 1: LHS = pi, RHS = 3 * (3 pi / 4).
        let rep = verify_shell_comparison(&HoloPoly::one(1), 0).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lhs.rational.as_deref(), Some("1"));
        assert_eq!(rep.rhs.rational.as_deref(), Some("9/4"));
        // high-degree monomials concentrate at the boundary: the shell
        // carries almost all the mass, so the reported ratio (which holds
        // the 3^{t+1} factor) decreases toward 1/3.
        let low = HoloPoly::monomial(1, mi(&[1]), Scalar::one());
        let high = HoloPoly::monomial(1, mi(&[40]), Scalar::one());
        let r_low = verify_shell_comparison(&low, 0).unwrap().ratio.unwrap();
        let r_high = verify_shell_comparison(&high, 0).unwrap().ratio.unwrap();
        assert!(r_high < r_low);
        assert!((r_high - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn shell_comparison_monomial_grid() {
        for n in 1..=2usize {
            for alpha in crate::multiindex::enumerate(n, 5) {
                for t in 0..=4u32 {
                    let f = HoloPoly::monomial(n, alpha.clone(), Scalar::one());
                    assert!(verify_shell_comparison(&f, t).unwrap().pass);
                }
            }
        }
    }

    #[test]
    fn dilation_bound_examples() {
        // constant f: ratio 1 <= 2^{2(m+n-1)}
        let p = z(2, 1);
        let rep = verify_dilation_bound(&p, &HoloPoly::one(2), 3, 4).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.ratio, Some(1.0 / 16.0));
        // p = z1, f = z1^d: lhs/base is exactly r^{2d}; factor 16 for m=1, n=2
        let f = HoloPoly::monomial(2, mi(&[2, 0]), Scalar::one());
        let rep = verify_dilation_bound(&p, &f, 3, 4).unwrap();
        let expected = (3.0f64 / 4.0).powi(4) / 16.0;
        assert!((rep.ratio.unwrap() - expected).abs() < 1e-12);
        assert!(rep.pass);
    }

    #[test]
    fn dilation_bound_rejects_small_radius() {
        assert!(verify_dilation_bound(&z(1, 1), &HoloPoly::one(1), 1, 2).is_err());
    }

    #[test]
    fn disk_average_equality_case() {
        // p = z^l, f = 1, r = 1: derivative l!, circle average 1, m = l.
        for l in 1..=3usize {
            let p = HoloPoly::monomial(1, mi(&[l as u32]), Scalar::one());
            let out = verify_disk_average_bounds(&p, &HoloPoly::one(1), l, 1.0, 128).unwrap();
            assert!(out.circle_report.pass, "{:?}", out.circle_report);
            assert!(out.disk_report.pass);
            let expected = factorial_f64(l);
            assert!((out.circle_report.lhs.float - expected).abs() < 1e-10);
            assert!((out.circle_report.rhs.float - expected).abs() < 1e-7);
        }
    }

    #[test]
    fn disk_average_zero_value_at_origin() {
        // f(0) = 0 makes the left side vanish
        let out = verify_disk_average_bounds(&z(1, 1), &z(1, 1), 1, 0.5, 128).unwrap();
        assert_eq!(out.circle_report.lhs.float, 0.0);
        assert!(out.circle_report.pass && out.disk_report.pass);
    }

    #[test]
    fn disk_average_shifted_zero() {
        // p = z - 2: |p'(0) f(0)| = 1 <= average of |z - 2| (a bit above 2).
        let p = z(1, 1)
            .sub(&HoloPoly::constant(1, ExactC::from_ratio(2, 1)))
            .unwrap();
        let out = verify_disk_average_bounds(&p, &HoloPoly::one(1), 1, 1.0, 128).unwrap();
        assert!(out.circle_report.pass);
        let avg = out.circle_report.rhs.float;
        assert!((1.9..2.3).contains(&avg), "average {avg}");
        assert!(out.disk_report.pass);
    }

    #[test]
    fn tangential_identity_cases() {
        // constants: 0 = 0
        let rep = verify_tangential_identity(&HoloPoly::one(2), 1, 10, 5).unwrap();
        assert!(rep.pass);
        // p = z1, j = 1 symbolically
        let rep = verify_tangential_identity(&z(2, 1), 1, 50, 6).unwrap();
        assert!(rep.pass);
        // random polynomials at 100 points
        let p = RandomPolyModel::dense(3, 3).generate(21);
        let rep = verify_tangential_identity(&p, 2, 100, 7).unwrap();
        assert!(rep.pass, "residual {}", rep.lhs.float);
    }
}
