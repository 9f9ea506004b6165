//! End-to-end sensitivity pipeline: resolve the source, fit a surrogate when
//! asked, run every metric off the shared seed streams, and assemble the
//! report. Nothing is written to disk here; emission happens only after the
//! whole pipeline has succeeded.

use crate::config::{RunConfig, Source};
use crate::csv_data::{load_csv, Dataset};
use crate::error::{CliError, Result};
use icegsa_core::{
    anchor_curves, averaged_shap_interaction, boxplot_stats, compute_ice_with_sample,
    compute_joint_pdp_with_sample, draw_iid, feature_grid, i_pdp, ice_correlations,
    ice_importances, mu_sigma_ice, pce, sobol_mc, sobol_second_mc, shap_records, streams,
    two_way_ipdp, uniform01_shuffle, BoxplotStats, Builtin, CoreError, Evaluator,
    FeatureSensitivity, FitDiagnostics, GridScheme, IceEnsemble, InputSpace, InteractionKind,
    InteractionMatrix, PceModel, RunMetadata, SensitivityReport, ShapBaseline, ShapRecord,
    REPORT_SCHEMA, REPORT_SCHEMA_VERSION,
};
use ndarray::{Array1, Array2};

fn compute_err(e: CoreError) -> CliError {
    CliError::Compute(e.to_string())
}

/// Everything a run produces: the report plus the artifacts the emitters
/// need (anchored ensembles, per-point attributions, full boxplots).
pub struct PipelineOutput {
    pub report: SensitivityReport,
    pub ensembles: Vec<IceEnsemble>,
    pub shap: Vec<ShapRecord>,
    pub names: Vec<String>,
    pub rho_boxplots: Vec<Option<BoxplotStats>>,
    /// Surrogate model, when one was fitted.
    pub model: Option<PceModel>,
    /// Ingestion warnings (declared-support violations).
    pub warnings: Vec<String>,
}

enum Resolved {
    TrueFunction { ev: Box<dyn Evaluator>, space: InputSpace },
    Surrogate { model: Box<PceModel>, space: InputSpace, warnings: Vec<String> },
}

/// Fits a surrogate to tabular data with a seeded train/validation split.
fn fit_surrogate_to_data(
    x: &Array2<f64>,
    y: &Array1<f64>,
    space: &InputSpace,
    cfg: &RunConfig,
) -> Result<PceModel> {
    let n = x.nrows();
    let n_train = ((cfg.train_fraction * n as f64).ceil() as usize).clamp(1, n);
    let order = uniform01_shuffle(n, cfg.seed, streams::PCE_TRAIN);
    let train_idx = &order[..n_train];
    let test_idx = &order[n_train..];

    let take = |idx: &[usize]| -> (Array2<f64>, Array1<f64>) {
        let mut xs = Array2::zeros((idx.len(), x.ncols()));
        let mut ys = Array1::zeros(idx.len());
        for (r, &i) in idx.iter().enumerate() {
            xs.row_mut(r).assign(&x.row(i));
            ys[r] = y[i];
        }
        (xs, ys)
    };
    let (xtr, ytr) = take(train_idx);
    let mut model = pce::select_order(&xtr.view(), &ytr.view(), space, cfg.p_max, cfg.q)
        .map_err(|e| CliError::Fit(e.to_string()))?;
    if !test_idx.is_empty() {
        let (xte, yte) = take(test_idx);
        let pred = model.predict(&xte.view()).map_err(|e| CliError::Fit(e.to_string()))?;
        model.diagnostics.heldout_r2 =
            Some(pce::r_squared(&pred.to_vec(), &yte.to_vec()));
    }
    Ok(model)
}

/// Fits a surrogate to a builtin function from a fresh seeded design.
fn fit_surrogate_to_builtin(
    b: Builtin,
    space: &InputSpace,
    cfg: &RunConfig,
) -> Result<PceModel> {
    let (ev, _) = b.instantiate();
    let train = draw_iid(space, cfg.n_train, cfg.seed, streams::PCE_TRAIN)
        .map_err(compute_err)?;
    let ytr = ev.eval_batch(train.values.view()).map_err(compute_err)?;
    let mut model =
        pce::select_order(&train.values.view(), &ytr.view(), space, cfg.p_max, cfg.q)
            .map_err(|e| CliError::Fit(e.to_string()))?;
    let heldout = draw_iid(space, 500, cfg.seed, streams::PCE_VALIDATION)
        .map_err(compute_err)?;
    let yte = ev.eval_batch(heldout.values.view()).map_err(compute_err)?;
    let pred =
        model.predict(&heldout.values.view()).map_err(|e| CliError::Fit(e.to_string()))?;
    model.diagnostics.heldout_r2 = Some(pce::r_squared(&pred.to_vec(), &yte.to_vec()));
    Ok(model)
}

fn resolve(cfg: &RunConfig) -> Result<Resolved> {
    match &cfg.source {
        Source::Builtin(b) => {
            let (ev, mut space) = b.instantiate();
            if let Some(anchor) = &cfg.anchor {
                space = space
                    .with_anchor(anchor.clone())
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            if cfg.use_surrogate {
                let model = fit_surrogate_to_builtin(*b, &space, cfg)?;
                Ok(Resolved::Surrogate { model: Box::new(model), space, warnings: vec![] })
            } else {
                Ok(Resolved::TrueFunction { ev, space })
            }
        }
        Source::Csv { path, output_column, input_columns } => {
            let Dataset { x, y, mut space, warnings, .. } =
                load_csv(path, output_column, input_columns.as_deref(), &cfg.marginals)?;
            if let Some(anchor) = &cfg.anchor {
                space = space
                    .with_anchor(anchor.clone())
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            let model = fit_surrogate_to_data(&x, &y, &space, cfg)?;
            Ok(Resolved::Surrogate { model: Box::new(model), space, warnings })
        }
    }
}

/// Runs the full metric pipeline for a configuration.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let resolved = resolve(cfg)?;
    let (space, surrogate_diag, model, warnings): (
        InputSpace,
        Option<FitDiagnostics>,
        Option<PceModel>,
        Vec<String>,
    ) = match &resolved {
        Resolved::TrueFunction { space, .. } => (space.clone(), None, None, vec![]),
        Resolved::Surrogate { model, space, warnings } => (
            space.clone(),
            Some(model.diagnostics.clone()),
            Some((**model).clone()),
            warnings.clone(),
        ),
    };
    let ev: &dyn Evaluator = match &resolved {
        Resolved::TrueFunction { ev, .. } => ev.as_ref(),
        Resolved::Surrogate { model, .. } => model.as_ref(),
    };

    let m = space.dim();
    let names = space.names();
    let seed = cfg.seed;

    // One complement sample shared by every feature and joint surface.
    let sample =
        draw_iid(&space, cfg.n_mc, seed, streams::ICE_COMPLEMENT).map_err(compute_err)?;

    // Per-feature curves and scalar metrics.
    let mut ensembles = Vec::with_capacity(m);
    let mut per_feature = Vec::with_capacity(m);
    let mut rho_boxplots = Vec::with_capacity(m);
    for j in 0..m {
        let grid = feature_grid(&space, j, cfg.k_grid, GridScheme::Quantile)
            .map_err(compute_err)?;
        let ens =
            compute_ice_with_sample(ev, &space, j, &grid, &sample).map_err(compute_err)?;
        let ip = i_pdp(&ens).map_err(compute_err)?;
        let importances = ice_importances(&ens).map_err(compute_err)?;
        let (mu, sigma) = mu_sigma_ice(&importances).map_err(compute_err)?;
        let corr = ice_correlations(&ens).map_err(compute_err)?;
        let boxplot =
            if corr.rho.len() >= 4 { Some(boxplot_stats(&corr.rho).map_err(compute_err)?) } else { None };
        per_feature.push(FeatureSensitivity {
            feature: j,
            name: names[j].clone(),
            i_pdp: ip,
            mu_ice: mu,
            sigma_ice: sigma,
            sigma_rho: corr.sigma_rho,
            rho_excluded: corr.excluded,
            rho_boxplot: boxplot.as_ref().map(Into::into),
            s_first: f64::NAN, // filled below
            s_total: f64::NAN,
            sh_bar: f64::NAN,
            sh_bar_anchored: f64::NAN,
        });
        let anchored =
            anchor_curves(ev, ens, space.anchor()[j]).map_err(compute_err)?;
        ensembles.push(anchored);
        rho_boxplots.push(boxplot);
    }

    // Sobol' indices.
    let sobol = sobol_mc(ev, &space, cfg.n_base, seed).map_err(compute_err)?;
    let sobol2 = sobol_second_mc(ev, &space, cfg.n_base, seed).map_err(compute_err)?;

    // Shapley summaries.
    let records = shap_records(ev, &space, cfg.n_pts, cfg.n_bg, seed, ShapBaseline::Background)
        .map_err(compute_err)?;
    let sh_bar = icegsa_core::shapley::mean_abs_phi(&records, m);
    let anchored_records =
        shap_records(ev, &space, cfg.n_pts, 1, seed, ShapBaseline::Anchor)
            .map_err(compute_err)?;
    let sh_anchored = icegsa_core::shapley::mean_abs_phi(&anchored_records, m);
    let shap_inter = averaged_shap_interaction(ev, &space, cfg.n_pts, cfg.n_bg, seed)
        .map_err(compute_err)?;

    for j in 0..m {
        per_feature[j].s_first = sobol.first[j];
        per_feature[j].s_total = sobol.total[j];
        per_feature[j].sh_bar = sh_bar[j];
        per_feature[j].sh_bar_anchored = sh_anchored[j];
    }

    // Interaction matrices; diagonals carry the main effects.
    let joint_scheme = |j: usize| {
        if space.marginal(j).is_bounded() {
            GridScheme::Equispaced
        } else {
            GridScheme::Quantile
        }
    };
    let mut pdp_matrix = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        pdp_matrix[[i, i]] = per_feature[i].i_pdp;
        for j in i + 1..m {
            let gi = feature_grid(&space, i, cfg.k_joint, joint_scheme(i))
                .map_err(compute_err)?;
            let gj = feature_grid(&space, j, cfg.k_joint, joint_scheme(j))
                .map_err(compute_err)?;
            let joint = compute_joint_pdp_with_sample(ev, &space, i, j, &gi, &gj, &sample)
                .map_err(compute_err)?;
            let v = two_way_ipdp(&joint).map_err(compute_err)?;
            pdp_matrix[[i, j]] = v;
            pdp_matrix[[j, i]] = v;
        }
    }
    let mut sobol2_matrix = sobol2.clone();
    for i in 0..m {
        sobol2_matrix[[i, i]] = sobol.first[i];
    }
    let mut shap_matrix = shap_inter.clone();
    for i in 0..m {
        shap_matrix[[i, i]] = sh_bar[i];
    }

    let report = SensitivityReport {
        schema: REPORT_SCHEMA.into(),
        schema_version: REPORT_SCHEMA_VERSION,
        metadata: RunMetadata {
            source: cfg.source_label(),
            seed,
            k_grid: cfg.k_grid,
            k_joint: cfg.k_joint,
            n_mc: cfg.n_mc,
            n_base: cfg.n_base,
            n_pts: cfg.n_pts,
            n_bg: cfg.n_bg,
            on_surrogate: model.is_some(),
        },
        features: per_feature,
        interactions: vec![
            InteractionMatrix::from_array(InteractionKind::Pdp, &pdp_matrix),
            InteractionMatrix::from_array(InteractionKind::Sobol2, &sobol2_matrix),
            InteractionMatrix::from_array(InteractionKind::Shap, &shap_matrix),
        ],
        sobol_out_of_range: sobol.out_of_range,
        surrogate: surrogate_diag,
    };

    Ok(PipelineOutput { report, ensembles, shap: records, names, rho_boxplots, model, warnings })
}
