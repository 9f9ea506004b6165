//! The full-run report artifact and its JSON schema.

use crate::metrics::{FeatureSensitivity, InteractionMatrix};
use crate::pce::FitDiagnostics;
use serde::{Deserialize, Serialize};

/// Schema identifier embedded in every report.
pub const REPORT_SCHEMA: &str = "sensitivity-report/v1";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Run parameters recorded for bit-identical re-runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    /// Source description, e.g. `builtin:friedman5` or `csv:<path>`.
    pub source: String,
    pub seed: u64,
    /// Grid size for 1-D PDP/ICE curves.
    pub k_grid: usize,
    /// Per-axis grid size for joint PDP surfaces.
    pub k_joint: usize,
    pub n_mc: usize,
    pub n_base: usize,
    pub n_pts: usize,
    pub n_bg: usize,
    /// Whether metrics were computed on a fitted surrogate.
    pub on_surrogate: bool,
}

/// Complete result of one sensitivity run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub schema: String,
    pub schema_version: u32,
    pub metadata: RunMetadata,
    pub features: Vec<FeatureSensitivity>,
    /// Interaction matrices tagged pdp / sobol2 / shap; diagonals carry the
    /// corresponding main-effect importance.
    pub interactions: Vec<InteractionMatrix>,
    /// Sobol' estimates flagged as outside [0, 1], if any.
    pub sobol_out_of_range: Vec<usize>,
    pub surrogate: Option<FitDiagnostics>,
}

impl SensitivityReport {
    /// Canonical JSON: fixed key order (struct order), full round-trip float
    /// precision, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
