//! Structured results of verification runs: one JSON-lines record per
//! trial plus a summary CSV aggregating pass rates and extremal ratios
//! per claim.

use serde::{Deserialize, Serialize};

use crate::moments::PiValue;
use crate::scalar::format_rat;

/// Exact-or-float value rendering: `{rational: "p/q", pi_power: k}` plus
/// a float view.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValueRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_power: Option<u32>,
    pub float: f64,
}

impl ValueRepr {
    pub fn from_pi(v: &PiValue) -> Self {
        ValueRepr {
            rational: Some(format_rat(&v.coeff)),
            pi_power: Some(v.pi_power),
            float: v.to_f64(),
        }
    }

    pub fn from_f64(v: f64) -> Self {
        // JSON cannot carry non-finite floats; reports must stay readable.
        assert!(v.is_finite(), "report values must be finite, got {v}");
        ValueRepr {
            rational: None,
            pi_power: None,
            float: v,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ScalarKind {
    Exact,
    Float,
}

/// Result of one inequality or covering check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Stable claim identifier, e.g. `commutator-series-identity`.
    pub claim: String,
    /// Claim parameters (dimension, degrees, indices, ...).
    pub params: serde_json::Value,
    pub lhs: ValueRepr,
    pub rhs: ValueRepr,
    /// `lhs / rhs` when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub scalar_kind: ScalarKind,
}

impl VerificationReport {
    pub fn exact(
        claim: impl Into<String>,
        params: serde_json::Value,
        lhs: &PiValue,
        rhs: &PiValue,
        pass: bool,
    ) -> Self {
        let ratio = lhs.ratio_to(rhs).map(|r| crate::scalar::rat_to_f64(&r));
        VerificationReport {
            claim: claim.into(),
            params,
            lhs: ValueRepr::from_pi(lhs),
            rhs: ValueRepr::from_pi(rhs),
            ratio,
            pass,
            seed: None,
            scalar_kind: ScalarKind::Exact,
        }
    }

    pub fn float(
        claim: impl Into<String>,
        params: serde_json::Value,
        lhs: f64,
        rhs: f64,
        pass: bool,
    ) -> Self {
        let ratio = if rhs != 0.0 { Some(lhs / rhs) } else { None };
        VerificationReport {
            claim: claim.into(),
            params,
            lhs: ValueRepr::from_f64(lhs),
            rhs: ValueRepr::from_f64(rhs),
            ratio,
            pass,
            seed: None,
            scalar_kind: ScalarKind::Float,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Serialize reports as JSON lines (one record per line, stable field
/// order from the struct definition).
pub fn to_jsonl(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> serde_json::Result<Vec<VerificationReport>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

/// Aggregate pass rates and extremal ratios per claim id as CSV.
pub fn summary_csv(reports: &[VerificationReport]) -> String {
    use std::collections::BTreeMap;
    struct Agg {
        total: usize,
        passed: usize,
        min_ratio: f64,
        max_ratio: f64,
    }
    let mut by_claim: BTreeMap<&str, Agg> = BTreeMap::new();
    for r in reports {
        let agg = by_claim.entry(&r.claim).or_insert(Agg {
            total: 0,
            passed: 0,
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
        });
        agg.total += 1;
        agg.passed += r.pass as usize;
        if let Some(ratio) = r.ratio {
            agg.min_ratio = agg.min_ratio.min(ratio);
            agg.max_ratio = agg.max_ratio.max(ratio);
        }
    }
    let mut out = String::from("claim,total,passed,failed,min_ratio,max_ratio\n");
    for (claim, agg) in by_claim {
        let (lo, hi) = if agg.min_ratio.is_finite() {
            (format!("{:.12e}", agg.min_ratio), format!("{:.12e}", agg.max_ratio))
        } else {
            (String::new(), String::new())
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            claim,
            agg.total,
            agg.passed,
            agg.total - agg.passed,
            lo,
            hi
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::PiValue;
    use crate::scalar::rat;

    #[test]
    fn jsonl_round_trip() {
        let r1 = VerificationReport::exact(
            "demo-claim",
            serde_json::json!({"n": 2}),
            &PiValue::new(rat(1, 3), 2),
            &PiValue::new(rat(1, 2), 2),
            true,
        );
        let r2 = VerificationReport::float("demo-float", serde_json::json!({}), 0.5, 1.0, true)
            .with_seed(42);
        let text = to_jsonl(&[r1.clone(), r2]);
        let back = from_jsonl(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].lhs.rational.as_deref(), Some("1/3"));
        assert_eq!(back[0].ratio, Some(2.0 / 3.0));
        assert_eq!(back[1].seed, Some(42));
    }

    #[test]
    fn summary_aggregates_by_claim() {
        let mk = |pass, ratio| {
            let mut r =
                VerificationReport::float("c", serde_json::json!({}), ratio, 1.0, pass);
            r.ratio = Some(ratio);
            r
        };
        let csv = summary_csv(&[mk(true, 0.25), mk(false, 0.75)]);
        let line = csv.lines().nth(1).unwrap();
        assert!(line.starts_with("c,2,1,1"));
        assert!(line.contains("2.5"));
        assert!(line.contains("7.5"));
    }
}
