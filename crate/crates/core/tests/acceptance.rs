//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them). Exact claims are
//! compared in rational arithmetic with zero tolerance; float claims pin
//! the stated tolerances in code.

use std::time::Instant;

use bergman_core::covering::{
    check_containment, check_distortion, greedy_cover, overlap_histogram, sample_in_box,
    sample_shell, CoverConfig, Point,
};
use bergman_core::inequalities::{
    estimate_derivative_constant, trial_seed, verify_dilation_bound, verify_disk_average_bounds,
    verify_number_weight_bounds, verify_series_identity, verify_shell_comparison,
};
use bergman_core::moments::{
    moment, monte_carlo_integral, slice_integral, within_std_errors, Region,
};
use bergman_core::multiindex::{enumerate, MultiIndex};
use bergman_core::operators::{
    build_submodule_basis, compressed_commutator, coordinate_adjoint, kernel_orthogonality_with,
    multiplication_matrix_within, BasisSpec, SubmodulePlan,
};
use bergman_core::poly::{radial_power_coeffs, HoloPoly, MixedPoly};
use bergman_core::randpoly::RandomPolyModel;
use bergman_core::scalar::{C64, ExactC, Scalar};
use bergman_core::spectra::{schatten_norm, singular_values};
use num::{BigInt, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 0x5EED_BA11;

fn conclude(id: u32, desc: &str, pass: bool) {
    println!(
        "acceptance {:02} {}: {}",
        id,
        desc,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {id} ({desc}) failed");
}

fn z(n: usize, j: usize) -> HoloPoly<ExactC> {
    HoloPoly::variable(n, j)
}

#[test]
fn c01_commutator_series_identity_exact() {
    let start = Instant::now();
    let mut pass = true;
    for n in 1..=3usize {
        for alpha in enumerate(n, 6) {
            for beta in enumerate(n, 6) {
                for j in 1..=n {
                    let rep = verify_series_identity(&alpha, &beta, j, 30).unwrap();
                    if !rep.pass {
                        eprintln!("series identity failed: n={n} {alpha:?} {beta:?} j={j}");
                        pass = false;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs() < 120;
    conclude(
        1,
        &format!("commutator series identity, exact, all truncations ({elapsed:.1?})"),
        pass,
    );
}

#[test]
fn c02_adjoint_formula_entrywise() {
    let mut pass = true;
    for n in 1..=3usize {
        for t in 0..=7u32 {
            let spec = BasisSpec::new(n, t, 12);
            for j in 1..=n {
                let mul = multiplication_matrix_within(&z(n, j), &spec).unwrap();
                let adj_closed = coordinate_adjoint(j, &spec).unwrap();
                let adj_generic = mul.adjoint();
                // identical sparse entry sets, exact rational equality
                if adj_closed.num_entries() != adj_generic.num_entries() {
                    pass = false;
                    continue;
                }
                for (key, v) in adj_closed.entries() {
                    if *v != adj_generic.get(key.0, key.1) {
                        eprintln!("adjoint mismatch at n={n} t={t} j={j} {key:?}");
                        pass = false;
                    }
                }
            }
        }
    }
    conclude(2, "Toeplitz adjoint matches multiplication adjoint entrywise", pass);
}

#[test]
fn c03_fractional_number_operator_bounds() {
    let mut pass = true;
    for n in 1..=3usize {
        for alpha in enumerate(n, 10) {
            let f = HoloPoly::monomial(n, alpha.clone(), Scalar::one());
            let d = alpha.degree();
            for k in 0..=5u32 {
                for l in 0..=d {
                    match verify_number_weight_bounds(&f, k, l) {
                        Ok(reps) => {
                            if !reps.iter().all(|r| r.pass) {
                                eprintln!("bound failed: n={n} alpha={alpha:?} k={k} l={l}");
                                pass = false;
                            }
                        }
                        Err(e) => {
                            eprintln!("bound errored: {e}");
                            pass = false;
                        }
                    }
                }
            }
        }
    }
    // equality case: n = 2, k = 0, l = 0, f = 1 achieves 1/3 on both sides
    let reps = verify_number_weight_bounds(&HoloPoly::one(2), 0, 0).unwrap();
    pass &= reps[0].lhs.rational.as_deref() == Some("1/3")
        && reps[0].rhs.rational.as_deref() == Some("1/3");
    conclude(3, "fractional number-operator bounds, exact", pass);
}

#[test]
fn c04_shell_bound_empirical_constants_stable() {
    let mut pass = true;
    for n in 1..=2usize {
        for m in 1..=3usize {
            let a = estimate_derivative_constant(n, m, 500, 6, MASTER_SEED).unwrap();
            let b =
                estimate_derivative_constant(n, m, 500, 6, MASTER_SEED ^ 0xFFFF_0000_0000).unwrap();
            let caps_ok = a.cap.is_finite() && b.cap.is_finite() && a.cap > 0.0 && b.cap > 0.0;
            let spread = (a.cap - b.cap).abs() / a.cap.max(b.cap);
            println!(
                "  constants n={n} m={m}: batchA={:.6} batchB={:.6} spread={:.3}%",
                a.cap,
                b.cap,
                100.0 * spread
            );
            if !(caps_ok && spread <= 0.10) {
                eprintln!("constant instability at n={n} m={m}");
                pass = false;
            }
        }
    }
    conclude(4, "shell-bound constants finite and stable across seed batches", pass);
}

#[test]
fn c05_shell_comparison_and_dilation_bounds() {
    let mut pass = true;
    // shell comparison: monomials of degree <= 8, t <= 6, n <= 3
    for n in 1..=3usize {
        for alpha in enumerate(n, 8) {
            let f = HoloPoly::monomial(n, alpha.clone(), Scalar::one());
            for t in 0..=6u32 {
                if !verify_shell_comparison(&f, t).unwrap().pass {
                    eprintln!("shell comparison failed: n={n} {alpha:?} t={t}");
                    pass = false;
                }
            }
        }
    }
    // shell comparison: 200 seeded random polynomials
    for trial in 0..200u64 {
        let n = 1 + (trial % 3) as usize;
        let deg = [8, 5, 3][n - 1];
        let f = RandomPolyModel::dense(n, deg).generate(trial_seed(MASTER_SEED, 100 + trial));
        let t = (trial % 7) as u32;
        if !verify_shell_comparison(&f, t).unwrap().pass {
            eprintln!("random shell comparison failed at trial {trial}");
            pass = false;
        }
    }
    // dilation bound: monomial pairs, three radii
    let radii = [(3i64, 5i64), (3, 4), (9, 10)];
    for n in 1..=2usize {
        for alpha in enumerate(n, 4) {
            if alpha.degree() == 0 {
                continue;
            }
            let p = HoloPoly::monomial(n, alpha.clone(), Scalar::one());
            for beta in enumerate(n, 8 - 4.min(8)) {
                let f = HoloPoly::monomial(n, beta.clone(), Scalar::one());
                for (num, den) in radii {
                    if !verify_dilation_bound(&p, &f, num, den).unwrap().pass {
                        eprintln!("dilation failed: {alpha:?} {beta:?} r={num}/{den}");
                        pass = false;
                    }
                }
            }
        }
    }
    // dilation bound: 200 seeded random pairs
    for trial in 0..200u64 {
        let n = 1 + (trial % 3) as usize;
        let p = RandomPolyModel::dense(n, 1 + (trial % 3) as usize)
            .generate(trial_seed(MASTER_SEED, 300 + trial));
        let f = RandomPolyModel::dense(n, [8, 5, 3][n - 1])
            .generate(trial_seed(MASTER_SEED, 500 + trial));
        let (num, den) = radii[(trial % 3) as usize];
        if !verify_dilation_bound(&p, &f, num, den).unwrap().pass {
            eprintln!("random dilation failed at trial {trial}");
            pass = false;
        }
    }
    conclude(5, "shell comparison (3^(t+1)) and dilation (2^(2(m+n-1))) bounds, exact", pass);
}

#[test]
fn c06_circle_and_disk_average_bounds() {
    let mut pass = true;
    for trial in 0..200u64 {
        let seed = trial_seed(MASTER_SEED, 700 + trial);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 1 + (trial % 4) as usize;
        let p = RandomPolyModel::dense(1, m).generate(rng.gen());
        let f = RandomPolyModel::dense(1, (trial % 9) as usize).generate(rng.gen());
        let l = 1 + (trial as usize % m);
        let r = if trial % 2 == 0 { 0.5 } else { 1.0 };
        match verify_disk_average_bounds(&p, &f, l, r, 128) {
            Ok(out) => {
                if !(out.circle_report.pass && out.disk_report.pass) {
                    eprintln!("disk average bound failed at trial {trial}");
                    pass = false;
                }
                if out.doubling_change >= 1e-10 {
                    eprintln!("doubling change {} at trial {trial}", out.doubling_change);
                    pass = false;
                }
            }
            Err(e) => {
                eprintln!("quadrature error at trial {trial}: {e}");
                pass = false;
            }
        }
    }
    conclude(6, "one-variable circle/disk average bounds at 1e-8, doubling < 1e-10", pass);
}

#[test]
fn c07_radial_power_coefficient_tables() {
    // independent oracle: Stirling numbers of the second kind
    fn stirling2(l: usize, j: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..=j {
            let term = bergman_core::scalar::binomial(j, i)
                * BigInt::from(j - i).pow(l as u32);
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc / bergman_core::scalar::factorial(j)
    }
    let mut pass = true;
    for l in 1..=12usize {
        let coeffs = radial_power_coeffs(l);
        for (idx, a) in coeffs.iter().enumerate() {
            let j = idx + 1;
            if *a != stirling2(l, j) {
                eprintln!("coefficient mismatch at l={l} j={j}");
                pass = false;
            }
            if a.abs() >= BigInt::from(j + 1).pow(l as u32) {
                eprintln!("growth bound violated at l={l} j={j}");
                pass = false;
            }
        }
    }
    conclude(7, "radial power coefficient tables vs Stirling oracle, exact", pass);
}

#[test]
fn c08_box_distortion_bounds() {
    let mut pass = true;
    let cfg = CoverConfig::new(0.5, 0.05).unwrap();
    for n in 1..=3usize {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(MASTER_SEED, 900 + n as u64));
        let zs = sample_shell(n, cfg.r, 10_000, trial_seed(MASTER_SEED, 910 + n as u64));
        let mut violations = 0usize;
        for z in &zs {
            let zp = sample_in_box(z, &cfg, &mut rng, false).unwrap();
            if !check_distortion(z, &zp, &cfg).unwrap().bounds_hold {
                violations += 1;
            }
        }
        if violations != 0 {
            eprintln!("{violations} distortion violations at n={n}");
            pass = false;
        }
        // containment probes on a 100-pair subsample
        let mut containment_violations = 0usize;
        for (i, z) in zs.iter().take(100).enumerate() {
            let zp = sample_in_box(z, &cfg, &mut rng, true).unwrap();
            containment_violations +=
                check_containment(z, &zp, &cfg, 1000, trial_seed(MASTER_SEED, 950 + i as u64))
                    .unwrap();
        }
        if containment_violations != 0 {
            eprintln!("{containment_violations} containment violations at n={n}");
            pass = false;
        }
    }
    conclude(8, "box distortion bounds and C=200 containments, zero violations", pass);
}

#[test]
fn c09_greedy_cover_disjoint_and_covering() {
    let start = Instant::now();
    let mut pass = true;
    let overlap_bound = 200f64.powi(18) + 1.0; // N(2) + 1

    // main run: 1e5 samples at c = 1e-3
    let cfg = CoverConfig::new(0.5, 1e-3).unwrap();
    let samples = sample_shell(2, cfg.r, 100_000, trial_seed(MASTER_SEED, 1200));
    let res = greedy_cover(&samples, &cfg).unwrap();
    pass &= res.disjointness_violations.is_empty();
    pass &= res.uncovered.is_empty();
    let centers: Vec<Point> = res
        .selected
        .iter()
        .map(|s| samples[s.sample_index].clone())
        .collect();
    let deltas: Vec<f64> = res.selected.iter().map(|s| s.delta).collect();
    let probes = sample_shell(2, cfg.r, 1000, trial_seed(MASTER_SEED, 1201));
    let hist = overlap_histogram(&centers, &deltas, cfg.dilate, &probes);
    println!(
        "  cover run: {} centers from {} samples, max dilated overlap {} (bound 200^18+1 = {:.3e})",
        centers.len(),
        samples.len(),
        hist.max_multiplicity,
        overlap_bound
    );
    pass &= (hist.max_multiplicity as f64) <= overlap_bound;

    // reference run at the small constant c = 1/(10 * 200^3)
    let c_small = 1.0 / (10.0 * 200f64.powi(3));
    let cfg2 = CoverConfig::new(0.5, c_small).unwrap();
    let samples2 = sample_shell(2, cfg2.r, 1000, trial_seed(MASTER_SEED, 1202));
    let res2 = greedy_cover(&samples2, &cfg2).unwrap();
    pass &= res2.disjointness_violations.is_empty();
    pass &= res2.uncovered.is_empty();
    let centers2: Vec<Point> = res2
        .selected
        .iter()
        .map(|s| samples2[s.sample_index].clone())
        .collect();
    let deltas2: Vec<f64> = res2.selected.iter().map(|s| s.delta).collect();
    let hist2 = overlap_histogram(&centers2, &deltas2, cfg2.dilate, &probes);
    pass &= (hist2.max_multiplicity as f64) <= overlap_bound;

    let elapsed = start.elapsed();
    pass &= elapsed.as_secs() < 300;
    conclude(
        9,
        &format!("greedy cover: disjoint shrunk boxes, full coverage, bounded overlap ({elapsed:.1?})"),
        pass,
    );
}

#[test]
fn c10_commutator_spectra() {
    let mut pass = true;

    // n = 1 full space, D = 20: interior singular values are exactly
    // 1/((k+1)(k+2)).
    let plan = SubmodulePlan::new(HoloPoly::one(1), 0, 20).unwrap();
    let comm = compressed_commutator(&plan, 1, 1).unwrap();
    let spec = singular_values(&comm).unwrap();
    for (k, got) in spec.interior().iter().enumerate() {
        let expect = 1.0 / ((k as f64 + 1.0) * (k as f64 + 2.0));
        if (got - expect).abs() > 1e-12 {
            eprintln!("spectrum mismatch at k={k}: {got} vs {expect}");
            pass = false;
        }
    }

    // Schatten-1 norm converges toward 1 within 1e-2 by D = 100
    let plan = SubmodulePlan::new(HoloPoly::one(1), 0, 100).unwrap();
    let comm = compressed_commutator(&plan, 1, 1).unwrap();
    let spec100 = singular_values(&comm).unwrap();
    let s1 = schatten_norm(&spec100, 1.0, false);
    println!("  n=1 D=100 Schatten-1 = {s1:.6} (telescoping limit 1)");
    if (s1 - 1.0).abs() >= 1e-2 {
        eprintln!("Schatten-1 at D=100 off: {s1}");
        pass = false;
    }

    // n = 2 submodules: interior top-10 stability between B=14 and B=18,
    // bounded Schatten-3 over B in {10, 14, 18}
    let generators = [
        z(2, 1).mul(&z(2, 2)).unwrap(),
        HoloPoly::monomial(2, MultiIndex::new(vec![2, 0]), Scalar::one()),
        z(2, 1).add(&z(2, 2)).unwrap(),
    ];
    for p in &generators {
        let mut spectra = Vec::new();
        for b in [10usize, 14, 18] {
            let plan = SubmodulePlan::new(p.clone(), 0, b).unwrap();
            let comm = compressed_commutator(&plan, 1, 2).unwrap();
            spectra.push((b, singular_values(&comm).unwrap()));
        }
        let s14 = &spectra[1].1;
        let s18 = &spectra[2].1;
        let tracked = 10.min(s14.interior().len()).min(s18.interior().len());
        let mut max_change = 0.0f64;
        for i in 0..tracked {
            let a = s14.interior()[i];
            let b = s18.interior()[i];
            let change = (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            max_change = max_change.max(change);
        }
        let s3: Vec<f64> = spectra
            .iter()
            .map(|(_, s)| schatten_norm(s, 3.0, false))
            .collect();
        // same symmetric relative-change convention as the top-10 check
        let growth = (s3[2] - s3[1]) / s3[2].abs().max(s3[1].abs());
        println!(
            "  p = {}: top-10 change {:.2e}, Schatten-3 over B = {:?} -> {:?} (last-step growth {:.2}%)",
            bergman_core::parse::format_poly(p),
            max_change,
            [10, 14, 18],
            s3.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
            100.0 * growth
        );
        if max_change >= 1e-2 {
            eprintln!("top-10 interior values unstable for p={p:?}: {max_change}");
            pass = false;
        }
        if growth > 0.05 {
            eprintln!("Schatten-3 still growing for p={p:?}: {growth}");
            pass = false;
        }
    }
    conclude(10, "commutator spectra: exact diagonal, Schatten convergence, stability", pass);
}

#[test]
fn c11_kernel_orthogonality() {
    let mut pass = true;
    let cases: [(HoloPoly<ExactC>, &str); 3] = [
        (z(2, 1).mul(&z(2, 2)).unwrap(), "z1*z2"),
        (
            HoloPoly::monomial(2, MultiIndex::new(vec![2, 0]), Scalar::one()),
            "z1^2",
        ),
        (z(2, 1).add(&z(2, 2)).unwrap(), "z1+z2"),
    ];
    for (idx, (p, name)) in cases.iter().enumerate() {
        let plan = SubmodulePlan::new(p.clone(), 0, 8).unwrap();
        let basis = build_submodule_basis(&plan).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(MASTER_SEED, 1500 + idx as u64));
        let pf = p.to_float();
        // 50 points on the zero set
        let mut max_on_zero = 0.0f64;
        for trial in 0..50 {
            let w = sample_zero(name, trial, &mut rng);
            debug_assert!(pf.eval(&w).norm() < 1e-12);
            let v = kernel_orthogonality_with(&w, &basis).unwrap();
            max_on_zero = max_on_zero.max(v);
        }
        // 50 points with |p(w)| > 0.1
        let mut min_off_zero = f64::INFINITY;
        let mut found = 0;
        while found < 50 {
            let w: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)))
                .collect();
            let norm: f64 = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm >= 0.95 || pf.eval(&w).norm() <= 0.1 {
                continue;
            }
            let v = kernel_orthogonality_with(&w, &basis).unwrap();
            min_off_zero = min_off_zero.min(v);
            found += 1;
        }
        println!("  p = {name}: max on zero set {max_on_zero:.2e}, min off zero set {min_off_zero:.2e}");
        if max_on_zero >= 1e-10 {
            eprintln!("kernel projection too large on Z(p) for {name}");
            pass = false;
        }
        if min_off_zero <= 1e-6 {
            eprintln!("kernel projection too small off Z(p) for {name}");
            pass = false;
        }
    }
    conclude(11, "kernel orthogonality on and off the zero variety", pass);
}

fn sample_zero(name: &str, trial: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let w = C64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
    match name {
        "z1*z2" => {
            if trial % 2 == 0 {
                vec![C64::new(0.0, 0.0), w]
            } else {
                vec![w, C64::new(0.0, 0.0)]
            }
        }
        "z1^2" => vec![C64::new(0.0, 0.0), w],
        _ => vec![w, -w],
    }
}

#[test]
fn c12_slice_formula_and_monte_carlo() {
    let mut pass = true;
    // slice decomposition agrees with the moment oracle exactly
    for n in 1..=3usize {
        for alpha in enumerate(n, 8) {
            for t in 0..=3u32 {
                let mut g = MixedPoly::<ExactC>::zero(n);
                g.add_term(alpha.clone(), alpha.clone(), Scalar::one());
                let via_slice = slice_integral(&g, t);
                let via_moment = moment(&alpha, &alpha, t, &Region::FullBall, n);
                if via_slice != via_moment {
                    eprintln!("slice mismatch at n={n} {alpha:?} t={t}");
                    pass = false;
                }
            }
        }
    }
    // Monte Carlo agreement within 4 standard errors on 30 seeded cases
    for trial in 0..30u64 {
        let n = 1 + (trial % 2) as usize;
        let degs = enumerate(n, 2);
        let alpha = degs[(trial as usize * 7 + 1) % degs.len()].clone();
        let t = (trial % 2) as u32;
        let region = if trial % 3 == 0 {
            Region::half_shell()
        } else {
            Region::FullBall
        };
        let mut g = MixedPoly::<ExactC>::zero(n);
        g.add_term(alpha.clone(), alpha.clone(), Scalar::one());
        let exact = moment(&alpha, &alpha, t, &region, n);
        let est = monte_carlo_integral(
            &g,
            t,
            &region,
            150_000,
            trial_seed(MASTER_SEED, 1700 + trial),
        );
        if !within_std_errors(&est, &exact, 4.0) {
            eprintln!(
                "MC outside 4 SE at trial {trial}: est {} exact {} se {}",
                est.value.re,
                exact.to_f64(),
                est.std_err
            );
            pass = false;
        }
    }
    conclude(12, "slice formula exact vs moment oracle; Monte Carlo within 4 SE", pass);
}
