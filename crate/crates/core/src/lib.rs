//! Global sensitivity analysis built around PDP and ICE curves.
//!
//! The crate computes, for black-box functions or fitted surrogates over
//! independent inputs:
//!
//! - PDP feature importance and per-curve ICE importances with their
//!   mean/spread aggregates, which surface interactions that averaging
//!   cancels out;
//! - ICE-correlation dispersion, measuring how interactions reshape the
//!   input-output trend;
//! - two-way PDP interaction importance on joint dependence surfaces;
//! - Monte-Carlo Sobol' indices (pick-freeze) and coefficient-based Sobol'
//!   indices of sparse polynomial chaos surrogates;
//! - exact interventional Shapley values and pairwise interaction indices
//!   by coalition enumeration;
//! - brute-force oracles and property suites for the estimator-level
//!   inequality between the PDP- and ICE-based importances.
//!
//! Sampling is counter-based and stream-separated, so every result is a
//! pure function of the root seed regardless of thread count.

pub mod benchmarks;
pub mod error;
pub mod evaluator;
pub mod metrics;
pub mod pce;
pub mod pdp;
pub mod report;
pub mod sampling;
pub mod shapley;
pub mod space;
pub mod stats;
pub mod verify;

pub use benchmarks::{builtin_friedman5, builtin_goldstein3, Builtin, Friedman5, Goldstein3};
pub use error::{CoreError, Result};
pub use evaluator::{Evaluator, FnEvaluator};
pub use metrics::{
    boxplot_stats, i_pdp, ice_correlations, ice_importances, mu_sigma_ice, sobol_mc,
    sobol_second_mc, two_way_ipdp, BoxplotStats, BoxplotSummary, FeatureSensitivity,
    IceCorrelations, InteractionKind, InteractionMatrix, SobolIndices,
};
pub use pce::{
    eval_basis, fit_lars, hyperbolic_index_set, load_model, pce_sobol, save_model, select_order,
    BasisSet, FitDiagnostics, MultiIndex, PceModel, PceSobol, UnivariateFamily,
};
pub use pdp::{
    anchor_curves, compute_ice, compute_ice_with_sample, compute_joint_pdp,
    compute_joint_pdp_with_sample, write_curves_csv, IceEnsemble, JointPdp,
};
pub use report::{RunMetadata, SensitivityReport, REPORT_SCHEMA, REPORT_SCHEMA_VERSION};
pub use sampling::{
    draw_iid, feature_grid, saltelli_design, streams, uniform01_fill, uniform01_shuffle,
    FeatureGrid, GridScheme, SaltelliDesign, SampleMatrix,
};
pub use shapley::{
    averaged_shap, averaged_shap_anchored, averaged_shap_interaction, exact_shap, shap_records,
    shap_interaction_pair, write_dependence_csv, ShapBaseline, ShapRecord,
};
pub use space::{Family, InputSpace, Marginal};
pub use verify::{
    bruteforce_pdp, check_inequality, jensen_psd_check, random_separable, run_separable_suite,
    InequalityCheck, SeparableSpec, SeparableStructure, TrialRecord, VerificationReport,
};
