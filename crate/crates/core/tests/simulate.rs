use mvdlm::simulate::{
    apply_missing, gen_local_level, replicate_experiment, run_replication, ExperimentSetup,
    LocalLevelConfig, MissingPattern,
};
use mvdlm::{msse, Matrix};

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

// observation noise ε = y − ψ and level increments ζ = Δψ
fn noises(cfg: &LocalLevelConfig) -> ([Vec<f64>; 2], [Vec<f64>; 2]) {
    let s = gen_local_level(cfg).unwrap();
    let col = |m: &Matrix, j: usize| m.column(j);
    let eps: [Vec<f64>; 2] = [0, 1].map(|j| {
        col(&s.data, j)
            .iter()
            .zip(col(&s.levels, j))
            .map(|(y, l)| y - l)
            .collect()
    });
    let zeta: [Vec<f64>; 2] =
        [0, 1].map(|j| col(&s.levels, j).windows(2).map(|w| w[1] - w[0]).collect());
    (eps, zeta)
}

#[test]
fn noise_correlation_is_recovered() {
    let base = LocalLevelConfig {
        len: 10_000,
        seed: 42,
        ..Default::default()
    };
    let (eps, _) = noises(&LocalLevelConfig {
        corr: 0.0,
        ..base.clone()
    });
    assert!(corr(&eps[0], &eps[1]).abs() < 0.1);
    let (eps, zeta) = noises(&LocalLevelConfig { corr: 0.8, ..base });
    assert!((corr(&eps[0], &eps[1]) - 0.8).abs() < 0.02);
    assert!(corr(&zeta[0], &zeta[1]).abs() < 0.05);
}

#[test]
fn noise_variances_follow_config() {
    let cfg = LocalLevelConfig {
        len: 20_000,
        obs_var: [2.0, 0.5],
        level_var: [0.3, 0.1],
        seed: 7,
        ..Default::default()
    };
    let (eps, zeta) = noises(&cfg);
    let var = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    for j in 0..2 {
        assert!((var(&eps[j]) / cfg.obs_var[j] - 1.0).abs() < 0.05);
        assert!((var(&zeta[j]) / cfg.level_var[j] - 1.0).abs() < 0.05);
    }
}

#[test]
fn experiment_summaries_are_deterministic() {
    let setup = ExperimentSetup::local_level(0.05, 1e6).unwrap();
    let cfg = LocalLevelConfig {
        seed: 11,
        ..Default::default()
    };
    let a = replicate_experiment(8, &cfg, &MissingPattern::reference(), &setup).unwrap();
    let b = replicate_experiment(8, &cfg, &MissingPattern::reference(), &setup).unwrap();
    assert_eq!(a, b);
    for (i, r) in a.replications.iter().enumerate() {
        assert_eq!(r.index, i);
        assert_eq!(r.seed, 11 + i as u64);
    }
    assert!(a.mean_missing_corr_new.is_some());
}

#[test]
fn empty_pattern_makes_modes_identical() {
    let setup = ExperimentSetup::local_level(0.05, 1e6).unwrap();
    let cfg = LocalLevelConfig::default();
    let summary = replicate_experiment(1, &cfg, &MissingPattern::default(), &setup).unwrap();
    let r = &summary.replications[0];
    assert_eq!(r.msse_new, r.msse_classical);
    assert_eq!(summary.win_fraction, 1.0);
    assert_eq!(r.missing_corr_new, None);

    let run = run_replication(&cfg, &MissingPattern::default(), &setup).unwrap();
    assert_eq!(run.new.steps, run.classical.steps);
}

#[test]
fn single_replication_matches_direct_composition() {
    let setup = ExperimentSetup::local_level(0.05, 1e6).unwrap();
    let cfg = LocalLevelConfig {
        seed: 5,
        ..Default::default()
    };
    let pattern = MissingPattern::reference();
    let summary = replicate_experiment(1, &cfg, &pattern, &setup).unwrap();

    let series = gen_local_level(&cfg).unwrap();
    let obs = apply_missing(&series.data, &pattern).unwrap();
    let out = mvdlm::filter(&setup.model, &obs, &setup.prior, mvdlm::UpdateMode::New).unwrap();
    assert_eq!(summary.replications[0].msse_new, msse(&out).unwrap());
    assert_eq!(summary.mean_msse_new, msse(&out).unwrap());
}

#[test]
fn zero_replications_is_an_error() {
    let setup = ExperimentSetup::local_level(0.05, 1e6).unwrap();
    assert!(replicate_experiment(
        0,
        &LocalLevelConfig::default(),
        &MissingPattern::reference(),
        &setup
    )
    .is_err());
}
