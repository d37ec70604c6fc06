//! Experiment execution: expands a config into independent seeded trials,
//! runs them on a fixed-width worker pool, and writes the report files.
//! Trial seeds are pre-assigned from the master seed, and results are
//! ordered by trial id, so parallel and serial runs produce identical
//! bytes and reruns of exact experiments are byte-stable.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use bergman_core::covering::{greedy_cover, overlap_histogram, sample_shell, CoverConfig, Point};
use bergman_core::inequalities::{
    estimate_derivative_constant, trial_seed, verify_dilation_bound, verify_disk_average_bounds,
    verify_number_weight_bounds, verify_series_identity, verify_series_term_bound,
    verify_shell_comparison, verify_shell_derivative_bound, verify_tangential_identity,
    DerivativeFamily,
};
use bergman_core::multiindex::enumerate;
use bergman_core::operators::{
    compressed_commutator, matrix_to_binary, matrix_to_csv, SubmodulePlan,
};
use bergman_core::parse::parse_poly;
use bergman_core::poly::HoloPoly;
use bergman_core::randpoly::{RandomPolyModel, Support};
use bergman_core::report::{summary_csv, to_jsonl, VerificationReport};
use bergman_core::scalar::ExactC;
use bergman_core::spectra::{decay_report, default_exponents, singular_values, spectrum_to_csv};

use crate::config::{
    CommutatorConfig, ConstantsConfig, CoverRunConfig, ExperimentConfig, VerifyConfig,
};
use crate::CliError;

#[derive(Debug)]
pub struct RunOutput {
    pub reports: Vec<VerificationReport>,
    pub files: Vec<PathBuf>,
    pub all_passed: bool,
}

/// Deterministic polynomial source: a literal when present, otherwise the
/// seeded random model.
pub fn generate_polynomial(
    n: usize,
    literal: &Option<String>,
    degree: usize,
    sparsity: Option<usize>,
    seed: u64,
) -> Result<HoloPoly<ExactC>, CliError> {
    match literal {
        Some(text) => {
            parse_poly(text, n).map_err(|e| CliError::config("polynomial", e.to_string()))
        }
        None => {
            let model = RandomPolyModel {
                n,
                degree,
                support: sparsity.map(|t| Support::Sparse { terms: t }).unwrap_or(Support::Dense),
            };
            Ok(model.generate(seed))
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let width = config.parallelism();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(width)
        .build()
        .map_err(|e| CliError::config("parallelism", e.to_string()))?;
    let (reports, extra_files) = pool.install(|| match config {
        ExperimentConfig::Verify(cfg) => run_verify(cfg),
        ExperimentConfig::Commutator(cfg) => run_commutator(cfg),
        ExperimentConfig::Cover(cfg) => run_cover(cfg),
        ExperimentConfig::Constants(cfg) => run_constants(cfg),
    })?;

    let out_dir = config.out_dir();
    fs::create_dir_all(&out_dir)?;
    let jsonl_path = out_dir.join("report.jsonl");
    fs::write(&jsonl_path, to_jsonl(&reports))?;
    let csv_path = out_dir.join("summary.csv");
    fs::write(&csv_path, summary_csv(&reports))?;
    let mut files = vec![jsonl_path, csv_path];
    files.extend(extra_files);

    let all_passed = reports.iter().all(|r| r.pass);
    Ok(RunOutput {
        reports,
        files,
        all_passed,
    })
}

type TrialResult = Result<Vec<VerificationReport>, CliError>;

fn collect_trials<T, F>(trials: Vec<T>, f: F) -> TrialResult
where
    T: Send + Sync,
    F: Fn(usize, &T) -> Result<Vec<VerificationReport>, CliError> + Sync,
{
    let mut indexed: Vec<(usize, Result<Vec<VerificationReport>, CliError>)> = trials
        .par_iter()
        .enumerate()
        .map(|(id, t)| (id, f(id, t)))
        .collect();
    indexed.sort_by_key(|(id, _)| *id);
    let mut out = Vec::new();
    for (_, res) in indexed {
        out.extend(res?);
    }
    Ok(out)
}

enum VerifyTrial {
    SeriesIdentity {
        alpha: bergman_core::MultiIndex,
        beta: bergman_core::MultiIndex,
        j: usize,
    },
    NumberWeight {
        alpha: bergman_core::MultiIndex,
        k: u32,
        l: usize,
    },
    ShellBound {
        family: DerivativeFamily,
        k: u32,
        seed: u64,
    },
    SeriesTerm {
        k: u32,
        seed: u64,
    },
    ShellComparisonMonomial {
        alpha: bergman_core::MultiIndex,
        t: u32,
    },
    ShellComparisonRandom {
        t: u32,
        seed: u64,
    },
    DilationMonomial {
        alpha: bergman_core::MultiIndex,
        beta: bergman_core::MultiIndex,
        r: (i64, i64),
    },
    DilationRandom {
        r: (i64, i64),
        seed: u64,
    },
    DiskAverage {
        l: usize,
        r: f64,
        seed: u64,
    },
    Tangential {
        j: usize,
        seed: u64,
    },
}

fn wants(claims: &[String], id: &str) -> bool {
    claims.is_empty() || claims.iter().any(|c| c == id)
}

fn run_verify(cfg: &VerifyConfig) -> Result<(Vec<VerificationReport>, Vec<PathBuf>), CliError> {
    let n = cfg.n;
    let seed = cfg.seed.expect("normalized");
    let radii: [(i64, i64); 3] = [(3, 5), (3, 4), (9, 10)];

    // Empirical constant for the sampled shell and series-term claims.
    let needs_cap = wants(&cfg.claims, "shell-bound-radial")
        || wants(&cfg.claims, "shell-bound-tangential")
        || wants(&cfg.claims, "shell-bound-coordinate")
        || wants(&cfg.claims, "series-term-bound");
    // The sampled cap is stable across disjoint seed batches to within
    // 10%, so trials are checked against the estimate with that margin.
    let cap = if needs_cap {
        estimate_derivative_constant(
            n,
            cfg.degree.max(1),
            cfg.trials.clamp(8, 64),
            cfg.k_max,
            trial_seed(seed, 0xCA9),
        )?
        .cap * 1.1
    } else {
        f64::INFINITY
    };

    let mut trials: Vec<VerifyTrial> = Vec::new();
    if wants(&cfg.claims, "commutator-series-identity") {
        for alpha in enumerate(n, cfg.max_degree) {
            for beta in enumerate(n, cfg.max_degree) {
                for j in 1..=n {
                    trials.push(VerifyTrial::SeriesIdentity {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        j,
                    });
                }
            }
        }
    }
    if wants(&cfg.claims, "number-weight-bound-1") || wants(&cfg.claims, "number-weight-bound-2") {
        for alpha in enumerate(n, cfg.max_degree) {
            for k in 0..=cfg.k_max {
                for l in 0..=alpha.degree() {
                    trials.push(VerifyTrial::NumberWeight {
                        alpha: alpha.clone(),
                        k,
                        l,
                    });
                }
            }
        }
    }
    for (claim, mk) in [
        ("shell-bound-radial", 0usize),
        ("shell-bound-tangential", 1),
        ("shell-bound-coordinate", 2),
    ] {
        if !wants(&cfg.claims, claim) || (mk == 1 && n < 2) {
            continue;
        }
        for trial in 0..cfg.trials {
            let k = (trial as u32) % (cfg.k_max + 1);
            let family = match mk {
                0 => DerivativeFamily::Radial {
                    l: (trial as u32 / (cfg.k_max + 1)) % (k + 1),
                },
                1 => DerivativeFamily::Tangential { j: 1, i: 2 },
                _ => DerivativeFamily::Coordinate { j: 1 },
            };
            trials.push(VerifyTrial::ShellBound {
                family,
                k,
                seed: trial_seed(seed, 0x1000 + trial as u64),
            });
        }
    }
    if wants(&cfg.claims, "series-term-bound") {
        for trial in 0..cfg.trials {
            trials.push(VerifyTrial::SeriesTerm {
                k: (trial as u32) % (cfg.k_max + 1),
                seed: trial_seed(seed, 0x2000 + trial as u64),
            });
        }
    }
    if wants(&cfg.claims, "shell-comparison") {
        for alpha in enumerate(n, cfg.max_degree) {
            for t in 0..=cfg.t_max {
                trials.push(VerifyTrial::ShellComparisonMonomial {
                    alpha: alpha.clone(),
                    t,
                });
            }
        }
        for trial in 0..cfg.trials {
            trials.push(VerifyTrial::ShellComparisonRandom {
                t: (trial as u32) % (cfg.t_max + 1),
                seed: trial_seed(seed, 0x3000 + trial as u64),
            });
        }
    }
    if wants(&cfg.claims, "dilation-bound") {
        for alpha in enumerate(n, cfg.max_degree.min(3)) {
            if alpha.degree() == 0 {
                continue;
            }
            for beta in enumerate(n, cfg.max_degree.min(3)) {
                for r in radii {
                    trials.push(VerifyTrial::DilationMonomial {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        r,
                    });
                }
            }
        }
        for trial in 0..cfg.trials {
            trials.push(VerifyTrial::DilationRandom {
                r: radii[trial % 3],
                seed: trial_seed(seed, 0x4000 + trial as u64),
            });
        }
    }
    if n == 1
        && (wants(&cfg.claims, "circle-average-bound") || wants(&cfg.claims, "disk-average-bound"))
    {
        for trial in 0..cfg.trials {
            trials.push(VerifyTrial::DiskAverage {
                l: 1 + trial % cfg.degree.max(1),
                r: if trial % 2 == 0 { 0.5 } else { 1.0 },
                seed: trial_seed(seed, 0x5000 + trial as u64),
            });
        }
    }
    if wants(&cfg.claims, "tangential-radial-identity") {
        for trial in 0..cfg.trials {
            trials.push(VerifyTrial::Tangential {
                j: 1 + trial % n,
                seed: trial_seed(seed, 0x6000 + trial as u64),
            });
        }
    }

    let reports = collect_trials(trials, |_, trial| match trial {
        VerifyTrial::SeriesIdentity { alpha, beta, j } => {
            Ok(vec![verify_series_identity(alpha, beta, *j, 20)?])
        }
        VerifyTrial::NumberWeight { alpha, k, l } => {
            let f = HoloPoly::monomial(n, alpha.clone(), bergman_core::Scalar::one());
            Ok(verify_number_weight_bounds(&f, *k, *l)?)
        }
        VerifyTrial::ShellBound { family, k, seed } => {
            let p = generate_polynomial(n, &cfg.polynomial, cfg.degree, cfg.sparsity, *seed)?;
            let f = RandomPolyModel::dense(n, (*seed % 4) as usize).generate(seed.wrapping_add(1));
            let out = verify_shell_derivative_bound(&p, &f, *k, *family, cap)?;
            Ok(vec![out.report.with_seed(*seed)])
        }
        VerifyTrial::SeriesTerm { k, seed } => {
            let p = generate_polynomial(n, &cfg.polynomial, cfg.degree, cfg.sparsity, *seed)?;
            let f = RandomPolyModel::dense(n, (*seed % 4) as usize).generate(seed.wrapping_add(1));
            Ok(vec![
                verify_series_term_bound(&p, &f, 1, *k, 0, cap)?.with_seed(*seed),
            ])
        }
        VerifyTrial::ShellComparisonMonomial { alpha, t } => {
            let f = HoloPoly::monomial(n, alpha.clone(), bergman_core::Scalar::one());
            Ok(vec![verify_shell_comparison(&f, *t)?])
        }
        VerifyTrial::ShellComparisonRandom { t, seed } => {
            let f = RandomPolyModel::dense(n, cfg.degree.max(1)).generate(*seed);
            Ok(vec![verify_shell_comparison(&f, *t)?.with_seed(*seed)])
        }
        VerifyTrial::DilationMonomial { alpha, beta, r } => {
            let p = HoloPoly::monomial(n, alpha.clone(), bergman_core::Scalar::one());
            let f = HoloPoly::monomial(n, beta.clone(), bergman_core::Scalar::one());
            Ok(vec![verify_dilation_bound(&p, &f, r.0, r.1)?])
        }
        VerifyTrial::DilationRandom { r, seed } => {
            let p = generate_polynomial(n, &cfg.polynomial, cfg.degree.max(1), cfg.sparsity, *seed)?;
            let f = RandomPolyModel::dense(n, 2).generate(seed.wrapping_add(1));
            Ok(vec![verify_dilation_bound(&p, &f, r.0, r.1)?.with_seed(*seed)])
        }
        VerifyTrial::DiskAverage { l, r, seed } => {
            let p = RandomPolyModel::dense(1, cfg.degree.max(*l)).generate(*seed);
            let f = RandomPolyModel::dense(1, 3).generate(seed.wrapping_add(1));
            let out = verify_disk_average_bounds(&p, &f, *l, *r, 128)?;
            Ok(vec![
                out.circle_report.with_seed(*seed),
                out.disk_report.with_seed(*seed),
            ])
        }
        VerifyTrial::Tangential { j, seed } => {
            let p = generate_polynomial(n, &cfg.polynomial, cfg.degree, cfg.sparsity, *seed)?;
            Ok(vec![verify_tangential_identity(&p, *j, 64, *seed)?])
        }
    })?;
    Ok((reports, Vec::new()))
}

fn run_commutator(
    cfg: &CommutatorConfig,
) -> Result<(Vec<VerificationReport>, Vec<PathBuf>), CliError> {
    let seed = cfg.seed.expect("normalized");
    let p = match &cfg.polynomial {
        Some(text) => parse_poly(text, cfg.n)
            .map_err(|e| CliError::config("polynomial", e.to_string()))?,
        None => generate_polynomial(cfg.n, &None, cfg.degree, cfg.sparsity, seed)?,
    };
    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("bergman-out"));
    fs::create_dir_all(&out_dir)?;
    let exponents = if cfg.schatten.is_empty() {
        default_exponents(cfg.n)
    } else {
        cfg.schatten.clone()
    };

    let mut b_list = cfg.b_list.clone();
    b_list.sort_unstable();
    b_list.dedup();
    let per_b: Vec<(usize, bergman_core::spectra::SingularSpectrum, Vec<PathBuf>)> = b_list
        .par_iter()
        .map(|&b| -> Result<_, CliError> {
            let plan = SubmodulePlan::new(p.clone(), cfg.min_degree, b)?;
            let comm = compressed_commutator(&plan, cfg.i, cfg.j)?;
            let spectrum = singular_values(&comm)?;
            let mut files = Vec::new();
            let spath = out_dir.join(format!("spectrum_B{b}.csv"));
            fs::write(&spath, spectrum_to_csv(&spectrum))?;
            files.push(spath);
            if cfg.export_matrices {
                let mpath = out_dir.join(format!("matrix_B{b}.csv"));
                fs::write(&mpath, matrix_to_csv(&comm))?;
                let bpath = out_dir.join(format!("matrix_B{b}.bin"));
                fs::write(&bpath, matrix_to_binary(&comm))?;
                files.push(mpath);
                files.push(bpath);
            }
            Ok((b, spectrum, files))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut files = Vec::new();
    let mut computed = Vec::new();
    for (b, spectrum, fs) in per_b {
        computed.push((b, spectrum));
        files.extend(fs);
    }
    computed.sort_by_key(|(b, _)| *b);

    let mut reports = Vec::new();
    for (b, spectrum) in &computed {
        let norms: Vec<(f64, f64)> = exponents
            .iter()
            .map(|&q| (q, bergman_core::spectra::schatten_norm(spectrum, q, false)))
            .collect();
        // coordinate multipliers are contractions, so the commutator's
        // operator norm is bounded by 2 a priori
        let top = spectrum.values.first().copied().unwrap_or(0.0);
        reports.push(VerificationReport::float(
            "commutator-spectrum",
            json!({
                "B": b,
                "generator": bergman_core::parse::format_poly(&p),
                "i": cfg.i, "j": cfg.j,
                "interior": spectrum.interior_len,
                "schatten": norms,
            }),
            top,
            2.0,
            top <= 2.0,
        ));
    }
    if computed.len() >= 2 {
        let rep = decay_report(&computed, 10, &exponents, 1e-2)?;
        let dpath = out_dir.join("decay.json");
        fs::write(&dpath, serde_json::to_string_pretty(&rep)?)?;
        files.push(dpath);
        reports.push(VerificationReport::float(
            "commutator-stabilization",
            json!({
                "generator": bergman_core::parse::format_poly(&p),
                "sizes": rep.sizes,
                "non_stabilizing": rep.non_stabilizing,
            }),
            rep.changes.last().map(|c| c.iter().cloned().fold(0.0, f64::max)).unwrap_or(0.0),
            rep.tol,
            rep.stabilized(),
        ));
    }
    Ok((reports, files))
}

fn run_cover(cfg: &CoverRunConfig) -> Result<(Vec<VerificationReport>, Vec<PathBuf>), CliError> {
    let seed = cfg.seed.expect("normalized");
    let cover_cfg = CoverConfig::new(cfg.r, cfg.c)?;
    let samples = sample_shell(cfg.n, cfg.r, cfg.samples, seed);
    let result = greedy_cover(&samples, &cover_cfg)?;

    let centers: Vec<Point> = result
        .selected
        .iter()
        .map(|s| samples[s.sample_index].clone())
        .collect();
    let deltas: Vec<f64> = result.selected.iter().map(|s| s.delta).collect();
    let probes = sample_shell(cfg.n, cfg.r, cfg.probes, trial_seed(seed, 1));
    let hist = overlap_histogram(&centers, &deltas, cover_cfg.dilate, &probes);
    let overlap_bound = 200f64.powi(6 * cfg.n as i32 + 6) + 1.0;

    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("bergman-out"));
    fs::create_dir_all(&out_dir)?;
    // centers CSV: selection order, source sample, delta, coordinates
    let mut csv = String::from("order,sample_index,delta");
    for c in 0..cfg.n {
        csv.push_str(&format!(",re{c},im{c}"));
    }
    csv.push('\n');
    for s in &result.selected {
        let z = &samples[s.sample_index];
        csv.push_str(&format!("{},{},{:.17e}", s.order, s.sample_index, s.delta));
        for v in z {
            csv.push_str(&format!(",{:.17e},{:.17e}", v.re, v.im));
        }
        csv.push('\n');
    }
    let cpath = out_dir.join("cover_centers.csv");
    fs::write(&cpath, csv)?;
    let diag = json!({
        "samples": cfg.samples,
        "selected": result.selected.len(),
        "uncovered": result.uncovered,
        "disjointness_violations": result.disjointness_violations,
        "undecided_tests": result.undecided_tests,
        "overlap_histogram": hist.histogram,
        "max_overlap": hist.max_multiplicity,
        "overlap_bound": overlap_bound,
        "seed": seed,
    });
    let dpath = out_dir.join("cover_diagnostics.json");
    fs::write(&dpath, serde_json::to_string_pretty(&diag)?)?;

    let reports = vec![
        VerificationReport::float(
            "greedy-cover",
            json!({"n": cfg.n, "r": cfg.r, "c": cfg.c, "samples": cfg.samples,
                   "selected": result.selected.len()}),
            (result.uncovered.len() + result.disjointness_violations.len()) as f64,
            0.0,
            result.uncovered.is_empty() && result.disjointness_violations.is_empty(),
        )
        .with_seed(seed),
        VerificationReport::float(
            "cover-overlap",
            json!({"n": cfg.n, "probes": cfg.probes, "dilate": cover_cfg.dilate}),
            hist.max_multiplicity as f64,
            overlap_bound,
            (hist.max_multiplicity as f64) <= overlap_bound,
        )
        .with_seed(seed),
    ];
    Ok((reports, vec![cpath, dpath]))
}

fn run_constants(
    cfg: &ConstantsConfig,
) -> Result<(Vec<VerificationReport>, Vec<PathBuf>), CliError> {
    let seed = cfg.seed.expect("normalized");
    let grid: Vec<(usize, usize)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.m_list.iter().map(move |&m| (n, m)))
        .collect();
    let mut estimates: Vec<_> = grid
        .par_iter()
        .map(|&(n, m)| {
            estimate_derivative_constant(n, m, cfg.trials, cfg.k_max, trial_seed(seed, (n * 64 + m) as u64))
                .map(|e| (n, m, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    estimates.sort_by_key(|(n, m, _)| (*n, *m));

    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("bergman-out"));
    fs::create_dir_all(&out_dir)?;
    let mut csv = String::from("n,m,cap,covering_argument_scale,trials,k_max,seed\n");
    let mut reports = Vec::new();
    for (n, m, est) in &estimates {
        // the scale a covering-argument construction would give:
        // 24^{n+1} m^2 N(n) / c with N(n) = 200^{6n+6}, c = 1/(10*200^3);
        // the sampled cap sits many orders of magnitude below it.
        let reference = 24f64.powi(*n as i32 + 1)
            * (*m as f64) * (*m as f64)
            * 200f64.powi(6 * *n as i32 + 6)
            * 10.0
            * 200f64.powi(3);
        csv.push_str(&format!(
            "{},{},{:.12e},{:.6e},{},{},{}\n",
            n, m, est.cap, reference, est.trials, est.kmax, est.seed
        ));
        reports.push(
            VerificationReport::float(
                "derivative-constant",
                json!({
                    "n": n, "m": m,
                    "attained": est.attained,
                    "trials": est.trials,
                }),
                est.cap,
                reference,
                est.cap.is_finite() && est.cap > 0.0 && est.cap <= reference,
            )
            .with_seed(est.seed),
        );
    }
    let cpath = out_dir.join("constants.csv");
    fs::write(&cpath, csv)?;
    Ok((reports, vec![cpath]))
}
