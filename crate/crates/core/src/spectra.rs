//! Singular-value analysis and Schatten-norm estimation of computed
//! operator matrices.
//!
//! A matrix carrying a truncation band is split first: the interior
//! principal submatrix (rows and columns outside the band) yields the
//! clean part of the spectrum, and the band principal submatrix yields
//! the contaminated tail, appended after the interior values and flagged
//! by `interior_len`. Schatten sums exclude the band by default.

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::operators::OperatorMatrix;
use crate::scalar::C64;

#[derive(Clone, Debug)]
pub struct SingularSpectrum {
    /// Interior singular values (descending), then band values (descending).
    pub values: Vec<f64>,
    /// Length of the clean prefix; `values[interior_len..]` is contaminated.
    pub interior_len: usize,
    pub source: String,
}

impl SingularSpectrum {
    pub fn interior(&self) -> &[f64] {
        &self.values[..self.interior_len]
    }

    pub fn contaminated(&self) -> &[f64] {
        &self.values[self.interior_len..]
    }
}

fn svd_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

fn principal_submatrix(m: &DMatrix<C64>, keep: impl Fn(usize) -> bool) -> DMatrix<C64> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|&i| keep(i)).collect();
    let mut out = DMatrix::from_element(idx.len(), idx.len(), C64::new(0.0, 0.0));
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out[(r, c)] = m[(i, j)];
        }
    }
    out
}

/// Singular values of an operator matrix via a dense decomposition.
/// Rejects non-finite entries.
pub fn singular_values(m: &OperatorMatrix) -> Result<SingularSpectrum> {
    if m.matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(CoreError::NonFiniteEntries);
    }
    match &m.band {
        None => {
            let values = svd_values(&m.matrix);
            let interior_len = values.len();
            Ok(SingularSpectrum {
                values,
                interior_len,
                source: m.label.clone(),
            })
        }
        Some(band) => {
            if m.nrows() != m.ncols() {
                return Err(CoreError::invalid(
                    "band",
                    "banded spectra need a square matrix",
                ));
            }
            let band = band.clone();
            let interior = principal_submatrix(&m.matrix, |i| !band.contains(&i));
            let tail = principal_submatrix(&m.matrix, |i| band.contains(&i));
            let mut values = svd_values(&interior);
            let interior_len = values.len();
            values.extend(svd_values(&tail));
            Ok(SingularSpectrum {
                values,
                interior_len,
                source: m.label.clone(),
            })
        }
    }
}

/// Schatten q-norm `(sum sigma_k^q)^{1/q}`; `q = f64::INFINITY` gives the
/// operator norm. The truncation band is excluded unless `include_band`.
pub fn schatten_norm(s: &SingularSpectrum, q: f64, include_band: bool) -> f64 {
    assert!(q > 0.0, "Schatten exponent must be positive");
    let vals = if include_band {
        &s.values[..]
    } else {
        s.interior()
    };
    if q.is_infinite() {
        return vals.first().copied().unwrap_or(0.0);
    }
    let sum: f64 = vals.iter().map(|v| v.powf(q)).sum();
    sum.powf(1.0 / q)
}

/// Default Schatten exponent grid straddling the dimension threshold:
/// `{n, n + 1/2, n + 1, 2n}`.
pub fn default_exponents(n: usize) -> Vec<f64> {
    let nf = n as f64;
    vec![nf, nf + 0.5, nf + 1.0, 2.0 * nf]
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DecayReport {
    /// Truncation sizes the spectra came from, ascending.
    pub sizes: Vec<usize>,
    /// Relative change of each tracked interior value between consecutive
    /// sizes: `changes[step][idx]`.
    pub changes: Vec<Vec<f64>>,
    /// Schatten norms per size and exponent: `(size, [(q, value)])`.
    pub schatten: Vec<(usize, Vec<(f64, f64)>)>,
    /// Tracked indices whose last-step relative change exceeds `tol`.
    pub non_stabilizing: Vec<usize>,
    pub tol: f64,
}

impl DecayReport {
    pub fn stabilized(&self) -> bool {
        self.non_stabilizing.is_empty()
    }
}

/// Stabilization report for a family of spectra computed at increasing
/// truncation sizes. Tracks the top `top_k` interior values.
pub fn decay_report(
    series: &[(usize, SingularSpectrum)],
    top_k: usize,
    exponents: &[f64],
    tol: f64,
) -> Result<DecayReport> {
    if series.len() < 2 {
        return Err(CoreError::invalid("series", "need at least two spectra"));
    }
    let sizes: Vec<usize> = series.iter().map(|(b, _)| *b).collect();
    let tracked = series
        .iter()
        .map(|(_, s)| s.interior_len)
        .min()
        .unwrap_or(0)
        .min(top_k);
    let mut changes = Vec::new();
    for w in series.windows(2) {
        let prev = w[0].1.interior();
        let next = w[1].1.interior();
        let mut step = Vec::with_capacity(tracked);
        for i in 0..tracked {
            let denom = prev[i].abs().max(next[i].abs()).max(f64::MIN_POSITIVE);
            step.push((next[i] - prev[i]).abs() / denom);
        }
        changes.push(step);
    }
    let schatten = series
        .iter()
        .map(|(b, s)| {
            (
                *b,
                exponents
                    .iter()
                    .map(|&q| (q, schatten_norm(s, q, false)))
                    .collect(),
            )
        })
        .collect();
    let non_stabilizing = changes
        .last()
        .map(|last| {
            last.iter()
                .enumerate()
                .filter(|(_, &c)| c > tol)
                .map(|(i, _)| i)
                .collect()
        })
        .unwrap_or_default();
    Ok(DecayReport {
        sizes,
        changes,
        schatten,
        non_stabilizing,
        tol,
    })
}

/// CSV export: `index,value,contaminated`.
pub fn spectrum_to_csv(s: &SingularSpectrum) -> String {
    let mut out = String::from("index,value,contaminated\n");
    for (i, v) in s.values.iter().enumerate() {
        out.push_str(&format!("{},{:.17e},{}\n", i, v, i >= s.interior_len));
    }
    out
}
