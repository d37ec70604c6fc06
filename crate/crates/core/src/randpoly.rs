//! Seeded random polynomials with exact rational coefficients.
//!
//! Coefficients are drawn uniformly from the complex unit disk and then
//! rationalized at a fixed denominator `2^24`, so sampled trials can
//! still run in exact arithmetic and any draw is reproducible from its
//! seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::multiindex::{enumerate, enumerate_degree, MultiIndex};
use crate::poly::HoloPoly;
use crate::scalar::{rationalize, ExactC, Scalar};

const COEFF_BITS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// Every exponent with `|alpha| <= degree` carries a coefficient.
    Dense,
    /// A fixed number of distinct exponents, always including one of top
    /// degree.
    Sparse { terms: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPolyModel {
    pub n: usize,
    pub degree: usize,
    pub support: Support,
}

impl RandomPolyModel {
    pub fn dense(n: usize, degree: usize) -> Self {
        RandomPolyModel {
            n,
            degree,
            support: Support::Dense,
        }
    }

    pub fn sparse(n: usize, degree: usize, terms: usize) -> Self {
        RandomPolyModel {
            n,
            degree,
            support: Support::Sparse { terms },
        }
    }

    /// Deterministic draw: identical `(model, seed)` pairs produce
    /// identical polynomials with degree exactly `degree`.
    pub fn generate(&self, seed: u64) -> HoloPoly<ExactC> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut poly = HoloPoly::zero(self.n);
        match self.support {
            Support::Dense => {
                for alpha in enumerate(self.n, self.degree) {
                    poly.add_term(alpha, disk_coefficient(&mut rng));
                }
            }
            Support::Sparse { terms } => {
                let all = enumerate(self.n, self.degree);
                let top = enumerate_degree(self.n, self.degree);
                let lead = top[rng.gen_range(0..top.len())].clone();
                let mut chosen: Vec<MultiIndex> = vec![lead];
                while chosen.len() < terms.min(all.len()) {
                    let cand = all[rng.gen_range(0..all.len())].clone();
                    if !chosen.contains(&cand) {
                        chosen.push(cand);
                    }
                }
                for alpha in chosen {
                    poly.add_term(alpha, disk_coefficient(&mut rng));
                }
            }
        }
        // Guarantee the top degree is populated even under cancellation of
        // the rationalization (draws of exactly zero are redrawn inside
        // disk_coefficient, so this only guards degenerate configs).
        if poly.degree() != Some(self.degree) {
            let top = enumerate_degree(self.n, self.degree);
            poly.add_term(top[0].clone(), disk_coefficient(&mut rng));
        }
        poly
    }
}

/// Uniform draw from the complex unit disk, rationalized at `2^-24`.
/// Redraws the rare sample whose rationalization collapses to zero.
fn disk_coefficient(rng: &mut ChaCha8Rng) -> ExactC {
    loop {
        let re = rng.gen_range(-1.0f64..1.0);
        let im = rng.gen_range(-1.0f64..1.0);
        if re * re + im * im > 1.0 {
            continue;
        }
        let c = ExactC::new(rationalize(re, COEFF_BITS), rationalize(im, COEFF_BITS));
        if !c.is_zero() {
            return c;
        }
    }
}
