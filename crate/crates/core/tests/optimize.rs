use bellforge::catalog;
use bellforge::optimize::{
    seesaw, seesaw_run, sqs_lower_bound, ParamOptConfig, SeesawConfig, SeesawMode, Subspace,
    SYMMETRIC_TOL,
};
use bellforge::symmetry::is_sqs;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn seesaw_cfg(restarts: usize) -> SeesawConfig {
    SeesawConfig {
        restarts,
        ..SeesawConfig::default()
    }
}

fn sqs_cfg(restarts: usize) -> ParamOptConfig {
    ParamOptConfig {
        restarts,
        ..ParamOptConfig::default()
    }
}

#[test]
fn seesaw_reaches_tsirelson() {
    let f = catalog::chsh().functional;
    let r = seesaw(&f, &seesaw_cfg(20)).unwrap();
    assert!(r.best_value >= 2.0 * SQRT2 - 1e-7, "{}", r.best_value);
    assert!(r.best_value <= 2.0 * SQRT2 + 1e-9);
    assert_eq!(r.per_restart.len(), 20);
}

#[test]
fn seesaw_history_never_decreases() {
    let f = catalog::j42().functional;
    for restart in 0..5 {
        let run = seesaw_run(&f, &seesaw_cfg(1), restart).unwrap();
        for w in run.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{:?}", w);
        }
    }
}

#[test]
fn seesaw_is_reproducible_for_a_seed() {
    let f = catalog::i3322c().functional;
    let a = seesaw(&f, &seesaw_cfg(4)).unwrap();
    let b = seesaw(&f, &seesaw_cfg(4)).unwrap();
    assert_eq!(a.per_restart, b.per_restart);
}

#[test]
fn seesaw_on_j42_approaches_quantum_bound() {
    let f = catalog::j42().functional;
    let r = seesaw(&f, &seesaw_cfg(20)).unwrap();
    assert!(r.best_value >= 0.6712, "{}", r.best_value);
}

#[test]
fn symmetric_correlation_mode_stays_symmetric() {
    let f = catalog::chsh().functional;
    let cfg = SeesawConfig {
        mode: SeesawMode::SymmetricCorrelation,
        restarts: 3,
        ..SeesawConfig::default()
    };
    let r = seesaw(&f, &cfg).unwrap();
    assert!(r.best_strategy.correlation().is_symmetric(SYMMETRIC_TOL));
    assert!(r.best_value <= 2.0 * SQRT2 + 1e-6);
    assert!(r.best_value >= 2.0 * SQRT2 - 1e-6, "{}", r.best_value);
}

#[test]
fn symmetric_correlation_mode_on_j42_finds_the_asymmetric_family() {
    // the best symmetric correlation found matches the known asymmetric strategy
    let f = catalog::j42().functional;
    let cfg = SeesawConfig {
        mode: SeesawMode::SymmetricCorrelation,
        restarts: 2,
        ..SeesawConfig::default()
    };
    let r = seesaw(&f, &cfg).unwrap();
    assert!(r.best_strategy.correlation().is_symmetric(SYMMETRIC_TOL));
    assert!((r.best_value - 0.6012).abs() < 1e-3, "{}", r.best_value);
}

#[test]
fn shared_povm_mode_returns_sqs() {
    let f = catalog::chsh().functional;
    let cfg = SeesawConfig {
        mode: SeesawMode::SharedPovm,
        restarts: 5,
        ..SeesawConfig::default()
    };
    let r = seesaw(&f, &cfg).unwrap();
    assert!(is_sqs(&r.best_strategy));
    assert!(r.best_value <= 2.0 * SQRT2 + 1e-9);
}

#[test]
fn sqs_reaches_tsirelson_for_chsh() {
    let f = catalog::chsh().functional;
    let r = sqs_lower_bound(&f, &sqs_cfg(10)).unwrap();
    assert!((r.best_value - 2.0 * SQRT2).abs() < 1e-6, "{}", r.best_value);
    assert!(is_sqs(&r.best_strategy));
}

#[test]
fn sqs_on_j42_stays_below_quantum_value() {
    let f = catalog::j42().functional;
    let r = sqs_lower_bound(&f, &sqs_cfg(40)).unwrap();
    assert!((r.best_value - 0.5682).abs() < 1e-3, "{}", r.best_value);
    assert!(r.per_restart.iter().all(|v| *v <= 0.60));
}

#[test]
fn sqs_on_i9_reaches_symmetric_value() {
    let f = catalog::i9().functional;
    let r = sqs_lower_bound(&f, &sqs_cfg(20)).unwrap();
    let target = 6.0 * 3f64.sqrt() + 9.0;
    assert!(r.best_value <= target + 1e-4, "{}", r.best_value);
    assert!(r.best_value >= target - 1e-4, "{}", r.best_value);
}

#[test]
fn antisymmetric_subspace_is_honoured() {
    let f = catalog::chsh().functional;
    let cfg = ParamOptConfig {
        subspace: Subspace::Antisymmetric,
        restarts: 4,
        ..ParamOptConfig::default()
    };
    let r = sqs_lower_bound(&f, &cfg).unwrap();
    // the singlet with shared measurements gives perfectly anticorrelated outcomes
    assert!(r.best_value <= 2.0 * SQRT2 + 1e-9);
    assert!(is_sqs(&r.best_strategy));
}

#[test]
fn bad_rank_partition_is_rejected() {
    let f = catalog::chsh().functional;
    let cfg = ParamOptConfig {
        rank_partitions: Some(vec![vec![2, 1], vec![1, 1]]),
        ..ParamOptConfig::default()
    };
    assert!(sqs_lower_bound(&f, &cfg).is_err());
}
