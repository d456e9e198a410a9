//! Monte Carlo examples beyond the acceptance criteria, run on the shipped
//! configs.

use std::path::PathBuf;

use serde::de::DeserializeOwned;

use robust_pacbayes::distributions::DistributionSpec;
use robust_pacbayes::format::to_json_string;
use robust_pacbayes::intervals::IntervalModel;
use robust_pacbayes::montecarlo::{
    coverage_experiment, gibbs_comparison_experiment, mom_demo_experiment, subgaussian_width_failure_probe,
    union_blowup_experiment, CoverageConfig, GibbsConfig, MomDemoConfig, UnionConfig,
};

fn config<T: DeserializeOwned>(name: &str) -> T {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name].iter().collect();
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn three_se_floor(nominal: f64, trials: usize) -> f64 {
    nominal - 3.0 * (nominal * (1.0 - nominal) / trials as f64).sqrt()
}

#[test]
fn chebyshev_width_survives_the_probe_law() {
    let cfg: CoverageConfig = config("failure_probe_chebyshev.json");
    let r = coverage_experiment(&cfg, 4).unwrap();
    assert!(r.coverage >= three_se_floor(0.95, r.trials), "coverage {}", r.coverage);
    assert_eq!(r.under_coverage, Some(false));
}

#[test]
fn probe_on_gaussian_data_finds_no_failure() {
    let mut cfg: CoverageConfig = config("failure_probe.json");
    cfg.distribution = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    cfg.trials = 20_000;
    for delta in [0.2, 0.05, 1e-3] {
        cfg.delta = Some(delta);
        let r = subgaussian_width_failure_probe(&cfg, 4).unwrap();
        assert!(r.coverage >= three_se_floor(1.0 - delta, r.trials), "delta {delta}: {}", r.coverage);
    }
}

#[test]
fn probe_sibling_without_probe_flag_matches() {
    let mut cfg: CoverageConfig = config("failure_probe.json");
    cfg.trials = 5_000;
    let probe = subgaussian_width_failure_probe(&cfg, 2).unwrap();
    cfg.probe = false;
    let plain = coverage_experiment(&cfg, 2).unwrap();
    assert_eq!(probe.successes, plain.successes);
    assert_eq!(plain.under_coverage, None);
}

#[test]
fn union_single_hypothesis_within_delta() {
    let cfg: UnionConfig = config("union_blowup.json");
    let r = union_blowup_experiment(&cfg, 4).unwrap();
    let first = r.rows[0];
    assert_eq!(first.k_hyp, 1);
    let se = (r.delta * (1.0 - r.delta) / r.trials as f64).sqrt();
    assert!(first.joint_failure_rate <= r.delta + 3.0 * se);
    assert!(r.rows[1].joint_failures >= first.joint_failures);
}

#[test]
fn union_calibrated_grows_like_one_minus_power() {
    // With independent statements, joint failure is 1 − (1 − p)^K_hyp.
    let cfg: UnionConfig = config("union_blowup_calibrated.json");
    let r = union_blowup_experiment(&cfg, 4).unwrap();
    let p = r.rows[0].joint_failure_rate;
    assert!(p > 0.0);
    for row in &r.rows[..6] {
        let expected = 1.0 - (1.0 - p).powi(row.k_hyp as i32);
        assert!(
            (row.joint_failure_rate - expected).abs() < 0.1,
            "K_hyp {}: {} vs {expected}",
            row.k_hyp,
            row.joint_failure_rate
        );
    }
    assert!(r.rows.last().unwrap().joint_failure_rate > 0.9);
}

#[test]
fn gibbs_light_tails_curves_agree() {
    let cfg: GibbsConfig = config("gibbs_gaussian.json");
    let r = gibbs_comparison_experiment(&cfg, 4).unwrap();
    assert_eq!(r.contaminated_points, 0);
    assert_eq!(r.rows[0].risk_emp, r.rows[0].risk_mom);
    for row in &r.rows {
        // MoM pays a small efficiency loss on Gaussian data; no systematic gap beyond it.
        let rel = (row.risk_mom - row.risk_emp).abs() / row.risk_emp;
        assert!(rel < 0.03, "gamma {}: emp {} mom {}", row.gamma, row.risk_emp, row.risk_mom);
    }
}

#[test]
fn gibbs_contamination_pulls_empirical_posterior_away() {
    let cfg: GibbsConfig = config("gibbs_contaminated.json");
    let r = gibbs_comparison_experiment(&cfg, 4).unwrap();
    assert_eq!(r.contaminated_points, 4);
    let last = r.rows.last().unwrap();
    assert!(last.risk_mom < last.risk_emp);
    // Best hypothesis (center 0) has risk 3: the MoM posterior approaches it.
    assert!((last.risk_mom - 3.0).abs() < 0.2);
}

#[test]
fn mom_demo_meets_each_level() {
    let cfg: MomDemoConfig = config("mom_demo.json");
    let r = mom_demo_experiment(&cfg, 4).unwrap();
    for row in &r.rows {
        assert!(
            row.coverage >= three_se_floor(row.nominal, r.trials),
            "K {}: {} < {}",
            row.k,
            row.coverage,
            row.nominal
        );
    }
}

#[test]
fn reports_embed_config_and_seed() {
    let mut cfg: CoverageConfig = config("coverage_gaussian.json");
    cfg.trials = 100;
    cfg.interval = IntervalModel::Chebyshev;
    let json = to_json_string(&coverage_experiment(&cfg, 1).unwrap());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["master_seed"], 1);
    assert_eq!(v["config"]["interval"], "chebyshev");
    assert_eq!(v["config"]["distribution"]["family"], "gaussian");
}
