//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS/FAIL` line (run with `--nocapture` to see them all).
//!
//! Criterion 8 is known to fail and is kept faithful rather than loosened:
//! the adaptive step-size family freezes after a subgradient-norm surge on
//! the ratio-quadratic instance, so neither half of that criterion can reach
//! 100% over random starts. The test reports the measured rates.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glide_opt::analysis::TheoremTag;
use glide_opt::analysis::{e1_failure_predicate, e2_geometry_check, e3_failure_probability};
use glide_opt::harness::{
    bound_check, failure_region_map, one_step_psg_failure, run_experiment, BoundCheckConfig,
    ExperimentSpec, SuccessRateReport,
};
use glide_opt::oracles::{NoiseModel, Oracle, OracleConfig};
use glide_opt::schedules::{eq12_weight, AlphaRule, BetaRule, WeightRule};
use glide_opt::sets::Point;
use glide_opt::solver::{run, run_batch, sample_strict_interior, Method, RunStatus, SolverConfig};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load_spec(name: &str) -> ExperimentSpec {
    let path = configs_dir().join(name);
    let raw = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing config {}: {e}", path.display()));
    ExperimentSpec::from_json(&raw).unwrap()
}

fn rate_of(report: &SuccessRateReport, params: &str) -> f64 {
    report
        .cells
        .iter()
        .find(|c| c.params == params)
        .unwrap_or_else(|| panic!("no cell {params}"))
        .rate
}

#[test]
fn criterion_01_table1_success_rates() {
    let started = Instant::now();
    let psg = run_experiment(&load_spec("table1_eq4_psg.json")).unwrap();
    let sgm = run_experiment(&load_spec("table1_eq4_sgm.json")).unwrap();
    let expected = [
        ("k2=5", 0.781),
        ("k2=7", 0.37),
        ("k2=10", 0.109),
        ("k2=15", 0.003),
        ("k2=20", 0.0),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (cell, target) in expected {
        let rate = rate_of(&psg, cell);
        detail.push_str(&format!("{cell}: psg {rate:.3} (target {target:.3}) "));
        if (rate - target).abs() > 0.04 {
            ok = false;
        }
    }
    for cell in sgm.cells.iter() {
        if cell.rate != 1.0 {
            ok = false;
            detail.push_str(&format!("{}: sgm {:.3} != 1.000 ", cell.params, cell.rate));
        }
        if cell.max_interior_violations != 0 {
            ok = false;
            detail.push_str(&format!("{}: sgm violations > 0 ", cell.params));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    println!(
        "criterion 1: {} — table 1 (eq. 4 block), psg within ±4pp and sgm exactly 100% [{detail}] ({secs:.1}s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}");
    assert!(
        secs < 60.0,
        "table 1 reproduction took {secs:.1}s (> 60s target)"
    );
}

#[test]
fn criterion_02_table3_success_rates() {
    let started = Instant::now();
    let psg_b2 = run_experiment(&load_spec("table3_b2_psg.json")).unwrap();
    let sgm_b2 = run_experiment(&load_spec("table3_b2_sgm.json")).unwrap();
    let psg_b1001 = run_experiment(&load_spec("table3_b1001_psg.json")).unwrap();
    let sgm_b1001 = run_experiment(&load_spec("table3_b1001_sgm.json")).unwrap();

    let mut ok = true;
    let mut detail = String::new();

    let b2_rate_n1 = rate_of(&psg_b2, "n=1");
    detail.push_str(&format!("B=2 psg n=1: {b2_rate_n1:.3} (target 0.064) "));
    if (b2_rate_n1 - 0.064).abs() > 0.04 {
        ok = false;
    }
    for cell in ["n=10", "n=100", "n=1000"] {
        let rate = rate_of(&psg_b2, cell);
        if rate != 0.0 {
            ok = false;
            detail.push_str(&format!("B=2 psg {cell}: {rate:.4} != 0 "));
        }
    }
    let b1001_targets = [
        ("n=1", 0.962),
        ("n=10", 0.654),
        ("n=100", 0.009),
        ("n=1000", 0.0),
    ];
    for (cell, target) in b1001_targets {
        let rate = rate_of(&psg_b1001, cell);
        detail.push_str(&format!(
            "B=1.001 psg {cell}: {rate:.3} (target {target:.3}) "
        ));
        if (rate - target).abs() > 0.04 {
            ok = false;
        }
    }
    for (tag, report) in [("B=2", &sgm_b2), ("B=1.001", &sgm_b1001)] {
        for cell in report.cells.iter() {
            if cell.rate != 1.0 {
                ok = false;
                detail.push_str(&format!(
                    "{tag} sgm {}: {:.3} != 1.000 ",
                    cell.params, cell.rate
                ));
            }
            if cell.max_interior_violations != 0 {
                ok = false;
                detail.push_str(&format!("{tag} sgm {}: interior violations ", cell.params));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    println!(
        "criterion 2: {} — table 3 (B=2 and B=1.001), psg within ±4pp, sgm exactly 100% [{detail}] ({secs:.1}s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}");
    assert!(
        secs < 120.0,
        "table 3 reproduction took {secs:.1}s (> 120s target)"
    );
}

#[test]
fn criterion_03_analytic_vs_monte_carlo_failure_probability() {
    // bracketing of the auxiliary root
    let q = |x: f64| x - 2.0 * (1.0 + x.ln());
    let out1 = e3_failure_probability(2.0, 0.5, 1).unwrap();
    let mut ok = q(0.4) > 0.0 && q(0.5) < 0.0 && out1.p_root > 0.4 && out1.p_root < 0.5;
    let mut detail = format!("p_root={:.6} ", out1.p_root);

    let mut rng = ChaCha8Rng::seed_from_u64(314);
    for n in [1u32, 10, 100] {
        let prob = e3_failure_probability(2.0, 0.5, n).unwrap().prob;
        let draws = 100_000;
        let mut hits = 0u32;
        for _ in 0..draws {
            let fail = (0..n).any(|_| {
                let x: f64 = rng.random_range(0.0..2.0);
                x - 2.0 * (1.0 + x.ln()) <= 0.0
            });
            if fail {
                hits += 1;
            }
        }
        let freq = hits as f64 / draws as f64;
        detail.push_str(&format!("n={n}: analytic {prob:.4} mc {freq:.4} "));
        if (freq - prob).abs() > 0.005 {
            ok = false;
        }
    }
    println!(
        "criterion 3: {} — one-step failure probability matches Monte Carlo within ±0.005 [{detail}]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_04_predicate_vs_simulation_grid() {
    let mut ok = true;
    let mut detail = String::new();
    for rho in [2.5, 5.0, 10.0] {
        let cells = failure_region_map(2.0, 100.0, &[rho], 200);
        let agree = cells
            .iter()
            .filter(|c| c.one_step_fail == c.predicate)
            .count();
        let frac = agree as f64 / cells.len() as f64;
        detail.push_str(&format!(
            "rho={rho}: agreement {frac:.5} over {} cells ",
            cells.len()
        ));
        if frac < 0.999 {
            ok = false;
        }
    }
    // on the x2 = 0 axis the predicate and the simulation are false everywhere
    let (k1, k2, r) = (2.0f64, 20.0f64, 100.0f64);
    let a = (r / k1).sqrt();
    for i in 1..500 {
        let x1 = -a + 2.0 * a * i as f64 / 500.0;
        if x1.abs() < 1e-12 {
            continue;
        }
        let c = k1 * x1 * x1;
        if c >= r {
            continue;
        }
        let theta = if x1 >= 0.0 { 0.0 } else { std::f64::consts::PI };
        if e1_failure_predicate(r, c, theta, k2 / k1) {
            ok = false;
            detail.push_str(&format!("predicate true on axis at x1={x1} "));
        }
        if one_step_psg_failure(k1, k2, r, &Point::new(vec![x1, 0.0]).unwrap()) {
            ok = false;
            detail.push_str(&format!("simulation fails on axis at x1={x1} "));
        }
    }
    println!(
        "criterion 4: {} — predicate vs one-step simulation ≥ 99.9% on 200x200 grids; axis all-false [{detail}]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}");
}

/// Every (alpha, beta, weight) combination named by the gliding-design and
/// joint-design theorems, checked against the per-run master bound.
#[test]
fn criterion_05_master_bound_every_combination() {
    let started = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    let mut checked = 0u64;

    // convex combinations on the l1 box
    for n in [2usize, 10] {
        let oracle = Oracle::sanity_instance("l1-box", n).unwrap();
        let r = oracle.radius_r();
        let l = oracle.lipschitz_l().unwrap();
        for t in [100u64, 10_000] {
            let combos: Vec<(AlphaRule, WeightRule, &str)> = vec![
                (
                    AlphaRule::ConstantHorizon { r, l, t_total: t },
                    WeightRule::ConstantW,
                    "t3c1",
                ),
                (
                    AlphaRule::DecayingRl { r, l },
                    eq12_weight(-1.0),
                    "t3c2(k=-1)",
                ),
                (
                    AlphaRule::DecayingRl { r, l },
                    eq12_weight(0.0),
                    "t3c2(k=0)",
                ),
                (
                    AlphaRule::DecayingRl { r, l },
                    eq12_weight(2.0),
                    "t3c2(k=2)",
                ),
                (AlphaRule::Normalized { r }, WeightRule::AlphaW, "t3c3"),
                (
                    AlphaRule::AdaptiveG { r, a: 1.0 },
                    eq12_weight(-1.0),
                    "t3c4(k=-1)",
                ),
                (
                    AlphaRule::AdaptiveG { r, a: 0.5 },
                    eq12_weight(0.0),
                    "t3c4(k=0)",
                ),
                (
                    AlphaRule::AdaptiveG { r, a: 0.0 },
                    eq12_weight(2.0),
                    "t3c4(k=2)",
                ),
                (
                    AlphaRule::ConstantHorizon { r, l, t_total: t },
                    WeightRule::BetaW,
                    "t4c1",
                ),
                (AlphaRule::DecayingRl { r, l }, WeightRule::BetaW, "t4c2"),
                (AlphaRule::Normalized { r }, WeightRule::AlphaBetaW, "t4c3"),
                (
                    AlphaRule::AdaptiveG { r, a: 1.0 },
                    WeightRule::BetaW,
                    "t4c4",
                ),
            ];
            for (alpha, weight, tag) in combos {
                let config = SolverConfig {
                    method: Method::Sgm,
                    alpha,
                    beta: BetaRule::Constant { value: 0.5 },
                    weight,
                    t,
                    noise: NoiseModel::None,
                    success_gap: None,
                    record_trajectory: false,
                };
                let region = oracle.region().clone();
                let records = run_batch(&oracle, &region, &config, 100, 4205, |rng| {
                    sample_strict_interior(&region, rng)
                });
                for rec in records {
                    let rec = rec.unwrap();
                    let gap = rec.ergodic_gap.unwrap();
                    let bound = rec.bound_terms.master_bound(r);
                    checked += 1;
                    if gap > bound + 1e-9 {
                        ok = false;
                        detail.push_str(&format!(
                            "{tag} n={n} t={t}: gap {gap:.3e} > bound {bound:.3e} "
                        ));
                    }
                }
            }
        }
    }

    // the strongly convex coupling on the negative-entropy instance
    for n in [2usize, 10] {
        let oracle = Oracle::example3(n, 2.0).unwrap();
        let r = oracle.radius_r();
        for t in [100u64, 10_000] {
            let config = SolverConfig {
                method: Method::Sgm,
                alpha: AlphaRule::StronglyConvexJoint { mu: 0.5 },
                beta: BetaRule::Constant { value: 0.5 },
                weight: WeightRule::StronglyConvexLinear,
                t,
                noise: NoiseModel::None,
                success_gap: None,
                record_trajectory: false,
            };
            let region = oracle.region().clone();
            let records = run_batch(&oracle, &region, &config, 100, 4205, |rng| {
                sample_strict_interior(&region, rng)
            });
            for rec in records {
                let rec = rec.unwrap();
                let gap = rec.ergodic_gap.unwrap();
                let bound = rec.bound_terms.master_bound(r);
                checked += 1;
                if gap > bound + 1e-9 {
                    ok = false;
                    detail.push_str(&format!("t5 n={n} t={t}: gap {gap:.3e} > {bound:.3e} "));
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    println!(
        "criterion 5: {} — per-run master ergodic bound held on {checked} runs across 13 rule combinations [{}] ({secs:.1}s)",
        if ok { "PASS" } else { "FAIL" },
        if detail.is_empty() { "no violations" } else { detail.as_str() }
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_06_closed_form_bounds() {
    let mut ok = true;
    let mut detail = String::new();
    let l1 = |k: Option<f64>| BoundCheckConfig {
        oracle: OracleConfig::L1Box { n: 2 },
        n_trials: 100,
        master_seed: 4206,
        t: 1000,
        beta: 0.5,
        sigma: None,
        a: Some(1.0),
        k,
    };
    let e1 = BoundCheckConfig {
        oracle: OracleConfig::E1 {
            k1: 2.0,
            k2: 5.0,
            r: 100.0,
        },
        n_trials: 100,
        master_seed: 4206,
        t: 1000,
        beta: 0.5,
        sigma: None,
        a: Some(1.0),
        k: Some(0.0),
    };
    let e3 = BoundCheckConfig {
        oracle: OracleConfig::E3 { n: 2, b: 2.0 },
        n_trials: 100,
        master_seed: 4206,
        t: 1000,
        beta: 0.5,
        sigma: None,
        a: Some(1.0),
        k: Some(0.0),
    };
    use TheoremTag::*;
    let cases: Vec<(&str, BoundCheckConfig, TheoremTag)> = vec![
        ("t3c1", l1(Some(0.0)), T3c1),
        ("t3c2(k=0)", l1(Some(0.0)), T3c2),
        ("t3c2(k=2)", l1(Some(2.0)), T3c2),
        ("t3c3", l1(Some(0.0)), T3c3),
        ("t3c4", e1.clone(), T3c4),
        ("t4c1", l1(Some(0.0)), T4c1),
        ("t4c2", l1(Some(0.0)), T4c2),
        ("t4c3", l1(Some(0.0)), T4c3),
        ("t4c4", e1, T4c4),
        ("t5sc", e3, T5sc),
    ];
    for (label, cfg, tag) in cases {
        let rows = bound_check(&cfg, tag).unwrap();
        let violated = rows.iter().filter(|r| !r.satisfied).count();
        if violated > 0 {
            ok = false;
            detail.push_str(&format!("{label}: {violated}/{} violated ", rows.len()));
        } else {
            detail.push_str(&format!("{label}: {} runs ok ", rows.len()));
        }
    }
    println!(
        "criterion 6: {} — measured ergodic gaps under the closed-form bounds [{detail}]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_07_stochastic_bounds() {
    let mut ok = true;
    let mut detail = String::new();
    // sigma = 0.5 L is the bound_check default for Lipschitz instances
    let l1 = |k: Option<f64>| BoundCheckConfig {
        oracle: OracleConfig::L1Box { n: 2 },
        n_trials: 200,
        master_seed: 4207,
        t: 400,
        beta: 0.5,
        sigma: None,
        a: Some(1.0),
        k,
    };
    use TheoremTag::*;
    let mut cases: Vec<(&str, BoundCheckConfig, TheoremTag)> = vec![
        ("t6c1", l1(Some(0.0)), T6c1),
        ("t6c2(k=0)", l1(Some(0.0)), T6c2),
        ("t6c3(k=0)", l1(Some(0.0)), T6c3),
        ("t7c1", l1(Some(0.0)), T7c1),
        ("t7c2", l1(Some(0.0)), T7c2),
        ("t7c3", l1(Some(0.0)), T7c3),
    ];
    // the strongly convex stochastic tag needs mu > 0: negative entropy
    // instance with an explicit noise level
    let sigma_e3 = 0.5 * (1.0 + 2f64.ln()) * 2f64.sqrt();
    cases.push((
        "t8sc",
        BoundCheckConfig {
            oracle: OracleConfig::E3 { n: 2, b: 2.0 },
            n_trials: 200,
            master_seed: 4207,
            t: 400,
            beta: 0.5,
            sigma: Some(sigma_e3),
            a: Some(1.0),
            k: Some(0.0),
        },
        T8sc,
    ));
    for (label, cfg, tag) in cases {
        let rows = bound_check(&cfg, tag).unwrap();
        assert_eq!(rows.len(), 1, "stochastic tags aggregate to one row");
        let row = &rows[0];
        detail.push_str(&format!(
            "{label}: mean gap {:.3e} vs bound {:.3e} ",
            row.empirical_gap, row.bound
        ));
        if !row.satisfied {
            ok = false;
        }
    }
    println!(
        "criterion 7: {} — mean ergodic gaps under the expectation bounds (200 trials each) [{detail}]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}");
}

/// Known-red criterion, implemented exactly as stated. The adaptive G
/// freezes after a subgradient-norm surge (G is a running max), so a
/// fraction of runs stalls above 1e-4 by t = 1e4 and a fraction of PSG runs
/// never lands exactly on the boundary. Measured rates are printed; the
/// assertion is the literal 100% requirement.
#[test]
fn criterion_08_non_lipschitz_example2() {
    let oracle = Oracle::example2();
    let r = oracle.radius_r();
    let mk = |method: Method| SolverConfig {
        method,
        alpha: AlphaRule::AdaptiveG { r, a: 1.0 },
        beta: BetaRule::Constant { value: 0.5 },
        weight: eq12_weight(0.0),
        t: 10_000,
        noise: NoiseModel::None,
        success_gap: None,
        record_trajectory: false,
    };
    let region = oracle.region().clone();
    let sgm_records: Vec<_> = run_batch(&oracle, &region, &mk(Method::Sgm), 100, 2024, |rng| {
        sample_strict_interior(&region, rng)
    })
    .into_iter()
    .map(|r| r.unwrap())
    .collect();
    let psg_records: Vec<_> = run_batch(&oracle, &region, &mk(Method::Psg), 100, 2024, |rng| {
        sample_strict_interior(&region, rng)
    })
    .into_iter()
    .map(|r| r.unwrap())
    .collect();

    let sgm_hit = sgm_records
        .iter()
        .filter(|r| r.status == RunStatus::Completed && r.min_f <= 1e-4)
        .count();
    let sgm_violations: u64 = sgm_records.iter().map(|r| r.interior_violations).sum();
    let psg_failed = psg_records
        .iter()
        .filter(|r| matches!(r.status, RunStatus::SubgradientUndefinedAt(_)))
        .count();

    let ok = sgm_hit == 100 && psg_failed == 100 && sgm_violations == 0;
    println!(
        "criterion 8: {} — SGM reached min f <= 1e-4 in {sgm_hit}/100 (demanded 100), PSG hit an \
         undefined subgradient in {psg_failed}/100 (demanded 100), SGM interior violations {sgm_violations}. \
         The shortfalls are inherent: a subgradient-norm surge freezes the adaptive step size \
         (running-max G), stalling some SGM runs and leaving some PSG runs short of the boundary; \
         no admissible setting reaches 100% here (see README, Acceptance status).",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(sgm_violations == 0, "SGM produced interior violations");
    assert!(
        ok,
        "criterion 8 demands 100%: sgm {sgm_hit}/100, psg {psg_failed}/100 (documented spec defect)"
    );
}

#[test]
fn criterion_09_geometry_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let mut worst = (0.0f64, 0.0f64);
    let mut checked = 0;
    while checked < 10_000 {
        let x1: f64 = rng.random_range(1e-9..1.0);
        let x2: f64 = rng.random_range(-1.0..1.0);
        if x2 == 0.0 {
            continue;
        }
        checked += 1;
        let out = e2_geometry_check(&Point::new(vec![x1, x2]).unwrap()).unwrap();
        worst.0 = worst.0.max(out.angle_identity_err);
        worst.1 = worst.1.max(out.descent_angle_err);
    }
    let ok = worst.0 <= 1e-10 && worst.1 <= 1e-10;
    println!(
        "criterion 9: {} — angle identity err <= {:.2e}, descent angle err <= {:.2e} over 10^4 points (tolerance 1e-10)",
        if ok { "PASS" } else { "FAIL" },
        worst.0,
        worst.1
    );
    assert!(ok);
}

#[test]
fn criterion_10_psg_equivalence_and_interior_preservation() {
    // bitwise equality of SGM(beta = 1) and PSG trajectories on 50 seeded runs
    let mut ok = true;
    let mut detail = String::new();
    let l1 = Oracle::sanity_instance("l1-box", 2).unwrap();
    let e1 = Oracle::example1(2.0, 7.0, 100.0).unwrap();
    for seed in 0..50u64 {
        let (oracle, alpha) = if seed % 2 == 0 {
            (
                &l1,
                AlphaRule::DecayingRl {
                    r: l1.radius_r(),
                    l: l1.lipschitz_l().unwrap(),
                },
            )
        } else {
            (&e1, AlphaRule::Normalized { r: e1.radius_r() })
        };
        let mk = |method: Method| SolverConfig {
            method,
            alpha: alpha.clone(),
            beta: BetaRule::One,
            weight: WeightRule::AlphaW,
            t: 100,
            noise: NoiseModel::None,
            success_gap: None,
            record_trajectory: true,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x1 = sample_strict_interior(oracle.region(), &mut rng);
        let psg = run(
            oracle,
            oracle.region(),
            &x1,
            &mk(Method::Psg),
            &mut rng.clone(),
        )
        .unwrap();
        let sgm = run(
            oracle,
            oracle.region(),
            &x1,
            &mk(Method::Sgm),
            &mut rng.clone(),
        )
        .unwrap();
        if psg.status != sgm.status
            || psg.min_f.to_bits() != sgm.min_f.to_bits()
            || psg.final_point != sgm.final_point
        {
            ok = false;
            detail.push_str(&format!("seed {seed}: records diverge "));
            continue;
        }
        let ta = psg.trajectory.unwrap();
        let tb = sgm.trajectory.unwrap();
        if ta.len() != tb.len()
            || ta.iter().zip(&tb).any(|(a, b)| {
                a.x != b.x
                    || a.alpha.to_bits() != b.alpha.to_bits()
                    || a.f.to_bits() != b.f.to_bits()
            })
        {
            ok = false;
            detail.push_str(&format!("seed {seed}: trajectories diverge "));
        }
    }
    // interior preservation for SGM with beta in (0,1) is asserted inside
    // criteria 1, 2 and 8 on their own runs (max_interior_violations == 0)
    println!(
        "criterion 10: {} — SGM(beta=1) bitwise-equals PSG on 50 seeded runs; interior preservation asserted in criteria 1/2/8 [{}]",
        if ok { "PASS" } else { "FAIL" },
        if detail.is_empty() { "all equal" } else { detail.as_str() }
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_11_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_glide-opt");
    let base = std::env::temp_dir().join(format!("glide-acceptance-{}", std::process::id()));
    let run_tables = |sub: &str, threads: Option<usize>| -> Vec<u8> {
        let dir = base.join(sub);
        std::fs::create_dir_all(&dir).unwrap();
        let mut cmd = Command::new(bin);
        cmd.args(["tables", "--which", "1", "--seed", "42", "--out"])
            .arg(&dir)
            .env_remove("GLIDE_OPT_SEED");
        if let Some(n) = threads {
            cmd.args(["--threads", &n.to_string()]);
        }
        let status = cmd.status().expect("tables run");
        assert!(status.success(), "tables exited with {status:?}");
        std::fs::read(dir.join("table1.csv")).unwrap()
    };
    let first = run_tables("a", None);
    let second = run_tables("b", None);
    let single_thread = run_tables("c", Some(1));
    let four_thread = run_tables("d", Some(4));
    let ok = first == second && first == single_thread && first == four_thread;
    println!(
        "criterion 11: {} — `tables --which 1 --seed 42` byte-identical across two invocations and 1 vs 4 threads ({} bytes)",
        if ok { "PASS" } else { "FAIL" },
        first.len()
    );
    std::fs::remove_dir_all(&base).ok();
    assert!(ok);
}

/// The checked-in configs must stay in lockstep with the programmatic table
/// specs used by the `tables` subcommand.
#[test]
fn checked_in_configs_match_programmatic_specs() {
    use glide_opt::harness::{table1_spec, table3_spec};
    let pairs = [
        (
            "table1_eq4_psg.json",
            table1_spec("eq4", Method::Psg, 1000, 42),
        ),
        (
            "table1_eq4_sgm.json",
            table1_spec("eq4", Method::Sgm, 1000, 42),
        ),
        (
            "table1_eq6_psg.json",
            table1_spec("eq6", Method::Psg, 1000, 42),
        ),
        (
            "table1_eq6_sgm.json",
            table1_spec("eq6", Method::Sgm, 1000, 42),
        ),
        (
            "table3_b2_psg.json",
            table3_spec(2.0, Method::Psg, 1000, 42),
        ),
        (
            "table3_b2_sgm.json",
            table3_spec(2.0, Method::Sgm, 1000, 42),
        ),
        (
            "table3_b1001_psg.json",
            table3_spec(1.001, Method::Psg, 1000, 42),
        ),
        (
            "table3_b1001_sgm.json",
            table3_spec(1.001, Method::Sgm, 1000, 42),
        ),
    ];
    for (file, mut programmatic) in pairs {
        let mut loaded = load_spec(file);
        loaded.name = String::new();
        programmatic.name = String::new();
        // PSG ignores the gliding rule; configs pin it to `one` for clarity
        if programmatic.solver.method == Method::Psg {
            programmatic.solver.beta = BetaRule::One;
        }
        let a = serde_json::to_value(&loaded).unwrap();
        let b = serde_json::to_value(&programmatic).unwrap();
        assert_eq!(a, b, "config {file} drifted from the programmatic spec");
    }
}
