mod common;

use std::fs;

use rydbench::campaign::*;
use rydbench::*;

fn gen_request(rows: usize, cols: usize, p: f64, count: usize, seed: u64) -> GenRequest {
    GenRequest { rows, cols, occupation_prob: p, spacing_um: 5.0, count, seed, oracle_cap: 30 }
}

#[test]
fn gen_writes_solved_instances() {
    let dir = tempfile::tempdir().unwrap();
    let paths = cmd_gen(&gen_request(4, 4, 0.8, 12, 7), dir.path()).unwrap();
    assert_eq!(paths.len(), 12);
    for path in &paths {
        let f = InstanceFile::load(path).unwrap();
        assert_eq!(f.solver, Some(SolverUsed::Exact));
        let n = f.instance.n_qubits();
        assert!((5..=16).contains(&n));
        assert_eq!(f.instance.optimal_cost, Some(solve_mis_exact(&f.instance).unwrap().cost));
        // the plain instance loader reads the same file
        assert_eq!(DuggInstance::load(path).unwrap(), f.instance);
    }
    let sizes: Vec<usize> = paths.iter().map(|p| InstanceFile::load(p).unwrap().instance.n_qubits()).collect();
    assert!(sizes.iter().filter(|&&n| (10..=13).contains(&n)).count() >= 8, "{sizes:?}");

    let again = tempfile::tempdir().unwrap();
    let paths2 = cmd_gen(&gen_request(4, 4, 0.8, 12, 7), again.path()).unwrap();
    for (a, b) in paths.iter().zip(&paths2) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}

#[test]
fn gen_falls_back_to_greedy_past_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let paths = cmd_gen(&gen_request(32, 32, 1.0, 1, 0), dir.path()).unwrap();
    let f = InstanceFile::load(&paths[0]).unwrap();
    assert_eq!(f.instance.n_qubits(), 1024);
    assert_eq!(f.solver, Some(SolverUsed::Greedy));
    assert_eq!(f.instance.optimal_cost, None);
    assert_eq!(f.lower_bound, Some(256));
}

#[test]
fn gen_count_zero_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(cmd_gen(&gen_request(4, 4, 0.8, 0, 1), dir.path()).unwrap().is_empty());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn solve_fills_missing_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_dugg(3, 4, 0.8, 5.0, 2).unwrap();
    let path = dir.path().join("x.json");
    fs::write(&path, inst.to_json().unwrap()).unwrap();
    let out = cmd_solve(std::slice::from_ref(&path), 30).unwrap();
    assert_eq!(out[0].instance.optimal_cost, Some(solve_mis_exact(&inst).unwrap().cost));
    assert_eq!(InstanceFile::load(&path).unwrap(), out[0]);
}

#[test]
fn qaa_run_writes_records_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inst = common::instances_of_size(13, 1, 0).remove(0);
    let cfg = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 4.0);
    let out = run_campaign(&cfg, std::slice::from_ref(&inst), dir.path()).unwrap();
    assert!(out.failures.is_empty());
    let csv = fs::read_to_string(&out.csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], RUN_CSV_HEADER);
    assert_eq!(lines.len(), 1 + 3 + 2);
    assert!(lines[4].contains(",mean,") && lines[5].contains(",std,"));

    let rec = RunRecord::load(&out.record_paths[0]).unwrap();
    assert_eq!(rec.repeats.len(), 3);
    assert!(rec.repeats.iter().all(|r| r.metrics.n_shots == 500));
    assert_eq!(rec.instance_id, inst.id);
    assert_eq!(rec.n_qubits, 13);
    assert_eq!(rec.waveform.clone().into_waveform().unwrap(), cfg.waveform().unwrap());
    let seeds: Vec<u64> = rec.repeats.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, (0..3).map(|k| cfg.repeat_seed(k)).collect::<Vec<_>>());

    // aggregates recompute from the per-repeat reports
    let rs: Vec<f64> = rec.repeats.iter().map(|r| r.metrics.approximation_ratio.unwrap()).collect();
    let mean = rs.iter().sum::<f64>() / 3.0;
    let std = (rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 2.0).sqrt();
    let agg = rec.aggregate.approximation_ratio.unwrap();
    assert!((agg.mean - mean).abs() < 1e-12 && (agg.std - std).abs() < 1e-12);
    let csv_mean: f64 = lines[4].split(',').nth(5).unwrap().parse().unwrap();
    assert!((csv_mean - mean).abs() < 1e-12);

    let leftovers: Vec<_> = walk(dir.path()).into_iter().filter(|p| p.ends_with(".tmp")).collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

fn walk(dir: &std::path::Path) -> Vec<String> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path.display().to_string());
        }
    }
    out
}

#[test]
fn failures_are_recorded_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    let small = generate_dugg(2, 3, 1.0, 5.0, 0).unwrap();
    let big = generate_dugg(4, 8, 1.0, 5.0, 0).unwrap();
    assert_eq!(big.n_qubits(), 32);
    let mut cfg = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 1.0);
    cfg.n_shots = 50;
    let out = run_campaign(&cfg, &[big.clone(), small.clone()], dir.path()).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].instance_id, big.id);
    assert!(dir.path().join("failures.json").exists());
}

#[test]
fn schedule_violations_abort_the_run() {
    let inst = generate_dugg(2, 2, 1.0, 5.0, 0).unwrap();
    let mut cfg = BenchmarkConfig::qaa(&DeviceSpec::quera_aquila(), 5.0);
    cfg.n_shots = 10;
    match run_instance(&cfg, &inst) {
        Err(Error::ScheduleViolations(v)) => assert!(matches!(v[0], Violation::DurationTooLong { .. })),
        other => panic!("expected violations, got {other:?}"),
    }
}

#[test]
fn qaoa_record_audits_the_trained_waveform() {
    let inst = generate_dugg(3, 3, 0.9, 5.0, 1).unwrap();
    let params = QaoaParams::new(
        (0..10).map(|k| 2.0 + 0.3 * k as f64).collect(),
        (0..10).map(|k| -5.0 + k as f64).collect(),
        2.0,
    )
    .unwrap();
    let mut cfg = BenchmarkConfig::qaoa(&DeviceSpec::pasqal_fresnel(), params.clone());
    cfg.n_shots = 100;
    let rec = run_instance(&cfg, &inst).unwrap();
    let w = rec.waveform.into_waveform().unwrap();
    assert_eq!(QaoaParams::from_waveform(&w, 10).unwrap(), params);
    assert_eq!(w, build_qaoa_schedule(&params, Interpolation::Linear).unwrap());
}

#[test]
fn calibrated_run_on_aquila_matches_fresnel() {
    let inst = generate_dugg(3, 3, 0.8, 5.0, 4).unwrap();
    let mut f = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 2.0);
    f.n_shots = 200;
    let mut a = BenchmarkConfig::qaa(&DeviceSpec::quera_aquila(), 2.0);
    a.n_shots = 200;
    a.calibrate_from = Some(CalibrationRef { c6: DeviceSpec::pasqal_fresnel().c6 });
    let rf = run_instance(&f, &inst).unwrap();
    let ra = run_instance(&a, &inst).unwrap();
    assert!((ra.spacing_um - 6.79).abs() < 0.005);
    // identical interaction strengths give the same sampled outcomes up to round-off
    let vf: Vec<f64> = rf.repeats.iter().map(|r| r.metrics.valid_fraction).collect();
    let va: Vec<f64> = ra.repeats.iter().map(|r| r.metrics.valid_fraction).collect();
    assert_eq!(vf, va);
}

#[test]
fn spam_changes_the_outcome_deterministically() {
    let inst = generate_dugg(3, 3, 0.8, 5.0, 2).unwrap();
    let mut cfg = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 1.0);
    cfg.spam = SpamParams::new(0.05, 0.02, 0.05, 0.1).unwrap();
    let a = run_instance(&cfg, &inst).unwrap();
    let b = run_instance(&cfg, &inst).unwrap();
    assert_eq!(a, b);
    assert!(a.repeats.iter().all(|r| r.metrics.n_shots < 500));
}

#[test]
fn identical_configs_give_identical_csv() {
    let insts: Vec<_> = (0..3).map(|s| generate_dugg(3, 3, 0.8, 5.0, s).unwrap()).collect();
    let mut cfg = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 1.0);
    cfg.seed = 77;
    cfg.spam = SpamParams::new(0.01, 0.01, 0.02, 0.05).unwrap();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let o1 = run_campaign(&cfg, &insts, d1.path()).unwrap();
    let o2 = run_campaign(&cfg, &insts, d2.path()).unwrap();
    assert_eq!(fs::read(&o1.csv_path).unwrap(), fs::read(&o2.csv_path).unwrap());
    for (a, b) in o1.record_paths.iter().zip(&o2.record_paths) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}

#[test]
fn report_groups_by_size() {
    let dir = tempfile::tempdir().unwrap();
    let mut insts = Vec::new();
    for n in [13, 11, 12] {
        insts.extend(common::instances_of_size(n, 1, 0));
    }
    let mut cfg = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 1.0);
    cfg.n_shots = 100;
    let out = run_campaign(&cfg, &insts, dir.path()).unwrap();
    let reference = ReferenceTable::bundled();
    let (csv, table) = cmd_report(&out.record_paths, Some(&reference)).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    let sizes: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(sizes, vec!["11", "12", "13"]);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "ref_r_quera_aquila").unwrap();
    assert_eq!(rows[2].split(',').nth(col).unwrap(), "0.9101");
    assert_eq!(rows[1].split(',').nth(col).unwrap(), "");
    assert!(table.contains("0.9101/0.685"));

    let (plain, _) = cmd_report(&out.record_paths, None).unwrap();
    assert!(!plain.contains("ref_"));
}

#[test]
fn report_std_over_three_repeats() {
    let inst = generate_dugg(3, 3, 0.8, 5.0, 0).unwrap();
    let mut cfg = BenchmarkConfig::qaa(&DeviceSpec::pasqal_fresnel(), 1.0);
    cfg.n_shots = 100;
    let rec = run_instance(&cfg, &inst).unwrap();
    let summary = summarize(std::slice::from_ref(&rec));
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].aggregate, rec.aggregate);
    assert_eq!(summary[0].aggregate.valid_fraction.unwrap().n, 3);
}

#[test]
fn malformed_record_reports_path_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"instance_id\": \"x\",\n  oops\n}").unwrap();
    let err = cmd_report(std::slice::from_ref(&path), None).unwrap_err();
    match &err {
        Error::Parse { path: p, line, .. } => {
            assert_eq!(p, &path);
            assert_eq!(*line, 3);
        }
        other => panic!("{other:?}"),
    }
    assert!(err.to_string().contains("bad.json"));
}
