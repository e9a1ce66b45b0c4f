use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Outcome of one sampled inequality check. `pass` holds exactly when
/// `margin = bound − observed_max` is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub node: Option<String>,
    pub bound: f64,
    pub observed_max: f64,
    pub samples: usize,
    pub margin: f64,
    pub pass: bool,
    pub worst_point: Complex64,
    #[serde(default)]
    pub skipped: usize,
    /// Informational reports are printed but never fail a run.
    #[serde(default)]
    pub informational: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Set for lower-bound checks, where `margin = observed_min − bound`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_min: Option<f64>,
}

impl VerificationReport {
    pub fn new(check_id: impl Into<String>, node: Option<String>, bound: f64, observed_max: f64, samples: usize, worst_point: Complex64) -> Self {
        let margin = bound - observed_max;
        Self {
            check_id: check_id.into(),
            node,
            bound,
            observed_max,
            samples,
            margin,
            pass: margin > 0.0 && samples > 0,
            worst_point,
            skipped: 0,
            informational: false,
            note: None,
            observed_min: None,
        }
    }

    /// Report for `observed_min ≥ bound`.
    pub fn lower(check_id: impl Into<String>, node: Option<String>, bound: f64, observed_min: f64, observed_max: f64, samples: usize, worst_point: Complex64) -> Self {
        let mut r = Self::new(check_id, node, bound, observed_max, samples, worst_point);
        r.margin = observed_min - bound;
        r.pass = r.margin >= 0.0 && samples > 0;
        r.observed_min = Some(observed_min);
        r
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_skipped(mut self, skipped: usize) -> Self {
        self.skipped = skipped;
        self
    }

    /// Whether this report should count against a run.
    pub fn failed(&self) -> bool {
        !self.pass && !self.informational
    }

    pub fn summary_line(&self) -> String {
        let status = match (self.pass, self.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => "FAIL",
        };
        format!(
            "{status} {}{} bound={:.6e} observed={:.6e} margin={:.3e} samples={}",
            self.check_id,
            self.node.as_ref().map(|n| format!("[{n}]")).unwrap_or_default(),
            self.bound,
            self.observed_min.unwrap_or(self.observed_max),
            self.margin,
            self.samples
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_positive_margin() {
        let z = Complex64::new(0.0, 0.0);
        assert!(VerificationReport::new("a", None, 1.0, 0.5, 3, z).pass);
        assert!(!VerificationReport::new("a", None, 1.0, 1.0, 3, z).pass);
        assert!(!VerificationReport::new("a", None, 1.0, 0.0, 0, z).pass);
        let r = VerificationReport::new("a", None, 1.0, 2.0, 3, z).informational();
        assert!(!r.failed());
        let r = VerificationReport::lower("b", None, 1.0, 1.5, 4.0, 3, z);
        assert!(r.pass && r.margin == 0.5);
    }

    #[test]
    fn json_shape() {
        let r = VerificationReport::new("complement_12eps", Some("2.3".into()), 0.09375, 0.01, 400, Complex64::new(0.5, 0.25));
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["worst_point"], serde_json::json!([0.5, 0.25]));
        assert!(v.get("note").is_none());
    }
}
