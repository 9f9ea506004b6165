// Scratch calibration binary; prints benchmark metrics against the
// acceptance windows. Not part of the test suite.
use icegsa_core::*;

fn main() {
    let seed = 42u64;
    let t0 = std::time::Instant::now();

    let (gev, gspace) = builtin_goldstein3();
    let sample = draw_iid(&gspace, 10_000, seed, streams::ICE_COMPLEMENT).unwrap();
    println!("== goldstein (seed {seed}) ==");
    for j in 0..3 {
        let grid = feature_grid(&gspace, j, 50, GridScheme::Quantile).unwrap();
        let ens = compute_ice_with_sample(&gev, &gspace, j, &grid, &sample).unwrap();
        let ip = i_pdp(&ens).unwrap();
        let imp = ice_importances(&ens).unwrap();
        let (mu, sg) = mu_sigma_ice(&imp).unwrap();
        let corr = ice_correlations(&ens).unwrap();
        println!(
            "x{}: i_pdp={:.4} mu={:.4} sigma={:.4} srho={:?} excl={}",
            j + 1,
            ip,
            mu,
            sg,
            corr.sigma_rho.map(|v| (v * 1e4).round() / 1e4),
            corr.excluded
        );
    }
    let s = sobol_mc(&gev, &gspace, 100_000, seed).unwrap();
    println!("SF={:?}", s.first.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!("ST={:?}", s.total.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    let s2 = sobol_second_mc(&gev, &gspace, 100_000, seed).unwrap();
    println!("S2(2,3)={:.4} S2(1,2)={:.4} S2(1,3)={:.4}", s2[[1, 2]], s2[[0, 1]], s2[[0, 2]]);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let gi = feature_grid(&gspace, i, 25, GridScheme::Equispaced).unwrap();
        let gj = feature_grid(&gspace, j, 25, GridScheme::Equispaced).unwrap();
        let joint = compute_joint_pdp_with_sample(&gev, &gspace, i, j, &gi, &gj, &sample).unwrap();
        println!("I_pdp({},{}) = {:.4}", i + 1, j + 1, two_way_ipdp(&joint).unwrap());
    }
    let sh = averaged_shap(&gev, &gspace, 10_000, 1_000, seed).unwrap();
    println!("sh_bar = {:?}", sh.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    let sha = averaged_shap_anchored(&gev, &gspace, 10_000, seed).unwrap();
    println!("sh_anch = {:?}", sha.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    let phi = averaged_shap_interaction(&gev, &gspace, 10_000, 1_000, seed).unwrap();
    println!("|Phi|(2,3)={:.4} (1,2)={:.6} (1,3)={:.6}", phi[[1, 2]], phi[[0, 1]], phi[[0, 2]]);
    println!("goldstein elapsed: {:.1?}", t0.elapsed());

    let t1 = std::time::Instant::now();
    let (fev, fspace) = builtin_friedman5();
    let fsample = draw_iid(&fspace, 10_000, seed, streams::ICE_COMPLEMENT).unwrap();
    println!("== friedman (seed {seed}) ==");
    for j in 0..5 {
        let grid = feature_grid(&fspace, j, 50, GridScheme::Quantile).unwrap();
        let ens = compute_ice_with_sample(&fev, &fspace, j, &grid, &fsample).unwrap();
        let ip = i_pdp(&ens).unwrap();
        let imp = ice_importances(&ens).unwrap();
        let (mu, sg) = mu_sigma_ice(&imp).unwrap();
        let corr = ice_correlations(&ens).unwrap();
        println!(
            "x{}: i_pdp={:.4} mu={:.4} sigma={:.4} srho={:?}",
            j + 1,
            ip,
            mu,
            sg,
            corr.sigma_rho.map(|v| (v * 1e4).round() / 1e4)
        );
    }
    let s = sobol_mc(&fev, &fspace, 100_000, seed).unwrap();
    println!("SF={:?}", s.first.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!("ST={:?}", s.total.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    let s2 = sobol_second_mc(&fev, &fspace, 100_000, seed).unwrap();
    println!("S2(1,2)={:.4}", s2[[0, 1]]);
    let mut max_other = 0.0f64;
    for i in 0..5 {
        for j in i + 1..5 {
            if (i, j) != (0, 1) {
                max_other = max_other.max(s2[[i, j]].abs());
            }
        }
    }
    println!("S2 max other = {:.4}", max_other);
    for (i, j) in [(0usize, 1usize), (0, 3), (1, 3)] {
        let gi = feature_grid(&fspace, i, 25, GridScheme::Equispaced).unwrap();
        let gj = feature_grid(&fspace, j, 25, GridScheme::Equispaced).unwrap();
        let joint = compute_joint_pdp_with_sample(&fev, &fspace, i, j, &gi, &gj, &fsample).unwrap();
        println!("I_pdp({},{}) = {:.4}", i + 1, j + 1, two_way_ipdp(&joint).unwrap());
    }
    let sh = averaged_shap(&fev, &fspace, 10_000, 1_000, seed).unwrap();
    println!("sh_bar = {:?}", sh.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    let sha = averaged_shap_anchored(&fev, &fspace, 10_000, seed).unwrap();
    println!("sh_anch = {:?}", sha.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    let phi = averaged_shap_interaction(&fev, &fspace, 10_000, 1_000, seed).unwrap();
    println!("|Phi|(1,2)={:.4}", phi[[0, 1]]);
    let mut pmax = 0.0f64;
    for i in 0..5 {
        for j in i + 1..5 {
            if (i, j) != (0, 1) {
                pmax = pmax.max(phi[[i, j]]);
            }
        }
    }
    println!("|Phi| max other = {:.6}", pmax);
    println!("friedman elapsed: {:.1?}", t1.elapsed());

    // PCE fit on friedman, n = 2000 + 500 held out.
    let t2 = std::time::Instant::now();
    let train = draw_iid(&fspace, 2_000, seed, streams::PCE_TRAIN).unwrap();
    let ytr = fev.eval_batch(train.values.view()).unwrap();
    let test = draw_iid(&fspace, 500, seed, streams::PCE_VALIDATION).unwrap();
    let yte = fev.eval_batch(test.values.view()).unwrap();
    let model = select_order(&train.values.view(), &ytr.view(), &fspace, 5, 1.0).unwrap();
    let pred = model.predict(&test.values.view()).unwrap();
    let r2 = pce::r_squared(&pred.to_vec(), &yte.to_vec());
    println!(
        "pce: order={} terms={} loo={:.2e} heldout R2={:.5}",
        model.diagnostics.order,
        model.nonzeros(),
        model.diagnostics.loo_rel,
        r2
    );
    let ps = pce_sobol(&model).unwrap();
    println!("pce SF={:?}", ps.first.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!("pce elapsed: {:.1?}", t2.elapsed());
}
