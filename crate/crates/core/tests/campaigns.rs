use std::fs;

use swarmopt::harness::{
    read_convergence_csv, read_power_curve_csv, read_summary_csv, run_benchmark_campaign,
    run_experiment, run_solar_campaign, ExperimentSpec, Outcome, Settings, Target,
};
use swarmopt::optimizer::optimize;
use swarmopt::solar::{Arrangement, IrradianceMatrix};
use swarmopt::testbed::{FunctionId, ObjectiveSpec};
use swarmopt::Error;

fn benchmark(dir: &std::path::Path, function: FunctionId, runs: usize) -> ExperimentSpec {
    ExperimentSpec {
        target: Target::Benchmark { function, dim: 2 },
        settings: Settings {
            max_evaluations: Some(3_000),
            ..Settings::default()
        },
        runs,
        seed: 40,
        out_dir: dir.to_path_buf(),
        ..ExperimentSpec::default()
    }
}

#[test]
fn single_run_equals_direct_optimizer_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = benchmark(dir.path(), FunctionId::F8, 1);
    let records = run_experiment(&spec).unwrap();
    assert_eq!(records.len(), 1);

    let obj = ObjectiveSpec::generate(FunctionId::F8, 2, 40).unwrap();
    let cfg = spec
        .settings
        .swarm_config(obj.search_bounds().clone(), 40)
        .unwrap();
    let direct = optimize(cfg, obj.objective(!40)).unwrap();
    assert_eq!(records[0].best_fitness, direct.best.fitness);
    assert_eq!(records[0].trace, direct.trace);
    match &records[0].outcome {
        Outcome::Benchmark { position, error } => {
            assert_eq!(position, &direct.best.position);
            assert_eq!(*error, direct.best.fitness - obj.f_min);
        }
        Outcome::Solar { .. } => panic!("benchmark run"),
    }
}

#[test]
fn campaigns_are_reproducible_and_written() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ra, sa) = run_benchmark_campaign(&benchmark(a.path(), FunctionId::F4, 4)).unwrap();
    let (rb, sb) = run_benchmark_campaign(&benchmark(b.path(), FunctionId::F4, 4)).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(sa, sb);
    assert_eq!(
        ra.iter().map(|r| r.seed).collect::<Vec<_>>(),
        vec![40, 41, 42, 43]
    );
    for r in &ra {
        assert!(r.evaluations <= 3_000);
        let trace = read_convergence_csv(
            &a.path()
                .join(format!("F4_2d_run{:02}_convergence.csv", r.run)),
        )
        .unwrap();
        assert_eq!(trace, r.trace);
    }
    assert_eq!(
        read_summary_csv(&a.path().join("summary.csv")).unwrap(),
        vec![sa]
    );
}

#[test]
fn unwritable_output_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let spec = benchmark(&blocker.join("out"), FunctionId::F1, 2);
    assert!(matches!(run_experiment(&spec), Err(Error::Io { .. })));
}

#[test]
fn solar_campaign_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let arrangement = dir.path().join("id.txt");
    Arrangement::identity(9, 9).write(&arrangement).unwrap();
    let spec = ExperimentSpec {
        target: Target::Solar {
            irradiance: None,
            arrangement: Some(arrangement),
        },
        settings: Settings {
            max_evaluations: Some(5_000),
            ..Settings::default()
        },
        runs: 2,
        seed: 3,
        out_dir: dir.path().join("out"),
        ..ExperimentSpec::default()
    };
    let report = run_solar_campaign(&spec).unwrap();
    assert_eq!(report.arrangement_power, Some(report.tct_power));
    assert!(report.best_power() >= report.tct_power);
    let curve = read_power_curve_csv(&dir.path().join("out/solar_tct_curve.csv")).unwrap();
    assert_eq!(curve.points.len(), 9);
    let best = Arrangement::read(dir.path().join("out/solar_run01_best.txt")).unwrap();
    match &report.records[1].outcome {
        Outcome::Solar { arrangement, .. } => assert_eq!(&best, arrangement),
        Outcome::Benchmark { .. } => panic!("solar run"),
    }
    let summary = fs::read_to_string(dir.path().join("out/solar_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 + 2);
    assert!(summary.starts_with("label,evaluations,power_watts\ntct,"));
}

#[test]
fn irradiance_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("irr.txt");
    let irr = IrradianceMatrix::short_wide_shadow();
    irr.write(&path).unwrap();
    assert_eq!(IrradianceMatrix::read(&path).unwrap(), irr);
}

#[test]
fn external_shift_moves_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("shift.txt");
    fs::write(&shift, "1.5 -2.5 99 99\n").unwrap();
    let spec = ExperimentSpec {
        shift_file: Some(shift),
        ..benchmark(dir.path(), FunctionId::F1, 1)
    };
    let obj = swarmopt::harness::benchmark_instance(&spec).unwrap();
    assert_eq!(obj.optimum, vec![1.5, -2.5]);
    assert_eq!(obj.evaluate_noiseless(&[1.5, -2.5]).unwrap(), -450.0);
}
