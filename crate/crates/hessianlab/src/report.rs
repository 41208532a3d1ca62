//! Report types shared by the verification sweeps and grid checks.
//!
//! Reports are plain serde structs; with a fixed seed and configuration the
//! serialized JSON is byte-identical between runs (no timestamps, no
//! environment-dependent fields).

use serde::Serialize;

/// One offending (or notable) sample from a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Sample index within the sweep, when the witness came from a sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<u64>,
    /// Signed violation (negative = inequality failed by that much).
    pub value: f64,
    /// Human-readable description of the offending data.
    pub detail: String,
}

/// Result of a sampled verification sweep (operator axioms, cone checks).
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    /// Operator or cone the sweep ran against.
    pub subject: String,
    pub n: usize,
    pub samples: u64,
    pub tolerance: f64,
    /// Largest violation observed (0 when every sample satisfied the
    /// property outright).
    pub max_violation: f64,
    pub witnesses: Vec<Witness>,
    pub pass: bool,
}

impl Report {
    pub fn pass_line(&self) -> String {
        format!(
            "{} [{}] n={} samples={}: {} (max violation {:.3e})",
            self.check,
            self.subject,
            self.n,
            self.samples,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_violation
        )
    }
}

/// Result of a grid-based check (counterexample algebra, barriers, maximum
/// principle).
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub grid_size: usize,
    pub max_violation: f64,
    /// Flattened coordinates (re, im per axis) of the worst point, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    /// Extra context for the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_detail: Option<String>,
    /// Strict margin achieved away from degenerate sets, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Realized slack of the inequality being tested, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub pass: bool,
}

impl CheckReport {
    pub fn pass_line(&self) -> String {
        format!(
            "{} ({} grid points): {} (max violation {:.3e}{})",
            self.name,
            self.grid_size,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_violation,
            match self.epsilon {
                Some(e) => format!(", epsilon {e:.6e}"),
                None => String::new(),
            }
        )
    }
}

/// Serialize any report set with a stable layout.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

pub fn point_coords(z: &[crate::hermitian::Complex64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}
