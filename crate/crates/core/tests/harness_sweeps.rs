//! Sweep bookkeeping, determinism and per-trial invariants.

use secrelay_core::beamform::Method;
use secrelay_core::harness::{
    run_experiment, run_relay_sweep, to_csv, ExperimentSpec, TrialOutcome,
};
use secrelay_core::Error;

fn power_sweep(methods: &str, trials: usize) -> ExperimentSpec {
    ExperimentSpec::parse(&format!(
        r#"{{"fading": {{"sigma_h": 3.0, "sigma_z": 1.0, "relays": 4}}, "n0": 1.0,
            "sweep": {{"variable": "P_T", "grid": [0.5, 2.0, 8.0]}},
            "methods": {methods}, "trials": {trials}, "seed": 11}}"#
    ))
    .unwrap()
}

#[test]
fn single_trial_is_reproducible() {
    let spec = power_sweep(r#"["total"]"#, 1);
    let a = to_csv(&spec, &run_experiment(&spec).unwrap()).unwrap();
    let b = to_csv(&spec, &run_experiment(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with(
        "sweep_var,value,method,mean_rate_bits,stderr,trials_ok,trials_failed,trials_na\n"
    ));
}

#[test]
fn one_row_per_grid_point_and_method() {
    let spec = power_sweep(r#"["total", "null-space", "low-snr", "suboptimal"]"#, 5);
    let result = run_experiment(&spec).unwrap();
    assert_eq!(result.rows.len(), 3 * 4);
    let csv = to_csv(&spec, &result).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 4);
    for row in &result.rows {
        assert_eq!(row.trials_ok + row.trials_failed + row.trials_na, 5);
        assert_eq!(row.sweep_var, "P_T");
    }
}

#[test]
fn per_trial_ordering_and_monotone_power() {
    let spec = power_sweep(
        r#"["total", "individual-sdr", "individual-socp", "suboptimal"]"#,
        8,
    );
    let result = run_experiment(&spec).unwrap();
    let rate = |gi: usize, trial: usize, m: Method| {
        result
            .records
            .iter()
            .find(|r| r.grid_index == gi && r.trial == trial && r.method == m)
            .and_then(|r| r.outcome.rate())
            .unwrap()
    };
    for gi in 0..3 {
        for trial in 0..8 {
            let t = rate(gi, trial, Method::Total);
            let i = rate(gi, trial, Method::IndividualSdr);
            let s = rate(gi, trial, Method::Suboptimal);
            assert!(t >= i - 1e-9 && i >= s - 1e-9, "{t} {i} {s}");
            let socp = rate(gi, trial, Method::IndividualSocp);
            assert!((socp - i).abs() < 3e-6);
            // Channels are shared across power levels, so rates cannot drop.
            if gi > 0 {
                for m in [Method::Total, Method::IndividualSdr] {
                    assert!(rate(gi, trial, m) >= rate(gi - 1, trial, m) - 1e-9);
                }
            }
        }
    }
}

#[test]
fn single_relay_null_space_is_not_applicable() {
    let spec = ExperimentSpec::parse(
        r#"{"fading": {"sigma_h": 1.0, "sigma_z": 2.0}, "n0": 1.0, "p_t": 10.0,
            "sweep": {"variable": "M", "grid": [1, 2]},
            "methods": ["null-space", "total"], "trials": 4, "seed": 3}"#,
    )
    .unwrap();
    let result = run_relay_sweep(&spec).unwrap();
    let at_one = result.row(1.0, Method::NullSpace).unwrap();
    assert_eq!((at_one.trials_ok, at_one.trials_na), (0, 4));
    assert_eq!(at_one.mean_rate_bits, None);
    assert_eq!(result.row(2.0, Method::NullSpace).unwrap().trials_ok, 4);
    assert!(result
        .records_for(Method::NullSpace)
        .filter(|r| r.value == 1.0)
        .all(|r| r.outcome == TrialOutcome::NotApplicable));
    let csv = to_csv(&spec, &result).unwrap();
    assert!(csv.contains("M,1,null-space,,,0,0,4"), "{csv}");
}

#[test]
fn relay_sweep_requires_relay_variable() {
    let spec = power_sweep(r#"["total"]"#, 1);
    assert!(matches!(run_relay_sweep(&spec), Err(Error::Invalid { .. })));
}

#[test]
fn more_relays_help_on_average() {
    let spec = ExperimentSpec::parse(
        r#"{"fading": {"sigma_h": 1.0, "sigma_z": 2.0}, "n0": 1.0, "p_t": 10.0,
            "sweep": {"variable": "M", "grid": [2, 8]},
            "methods": ["total"], "trials": 200, "seed": 5}"#,
    )
    .unwrap();
    let result = run_experiment(&spec).unwrap();
    let two = result
        .row(2.0, Method::Total)
        .unwrap()
        .mean_rate_bits
        .unwrap();
    let eight = result
        .row(8.0, Method::Total)
        .unwrap()
        .mean_rate_bits
        .unwrap();
    assert!(two <= eight, "{two} > {eight}");
}

#[test]
fn end_to_end_columns_with_source_power() {
    let spec = ExperimentSpec::parse(
        r#"{"fading": {"sigma_h": 3.0, "sigma_z": 1.0, "relays": 3}, "n0": 1.0,
            "sweep": {"variable": "P_T", "grid": [1.0]},
            "methods": ["total"], "trials": 20, "seed": 1, "p_s": 2.0}"#,
    )
    .unwrap();
    let result = run_experiment(&spec).unwrap();
    let row = &result.rows[0];
    assert!(row.mean_overall_bits.unwrap() <= row.mean_rate_bits.unwrap());
    let csv = to_csv(&spec, &result).unwrap();
    assert!(csv
        .lines()
        .next()
        .unwrap()
        .ends_with("mean_overall_bits,stderr_overall"));
}

#[test]
fn zero_trials_is_a_validation_error() {
    let text = r#"{"fading": {"sigma_h": 3.0, "sigma_z": 1.0, "relays": 4}, "n0": 1.0,
        "sweep": {"variable": "P_T"}, "trials": 0}"#;
    match ExperimentSpec::parse(text) {
        Err(Error::Invalid { field, .. }) => assert_eq!(field, "trials"),
        other => panic!("{other:?}"),
    }
}
