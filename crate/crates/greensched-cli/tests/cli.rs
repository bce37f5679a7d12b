//! Black-box tests of the installed binary: exit codes, output files,
//! printed summaries, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use greensched::model::{Catalog, Schedule, Workflow};
use greensched::sim::EnergyLedger;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greensched"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

fn run_usage_error(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(2),
        "expected exit 2 for {args:?}, stdout: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stderr = String::from_utf8(out.stderr).expect("utf-8 stderr");
    assert!(!stderr.is_empty(), "usage errors explain themselves");
    stderr
}

fn path_str(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().expect("utf-8 path").to_string()
}

/// Generates eega3 into `dir` and returns the workflow/catalog paths.
fn generate_eega3(dir: &Path) -> (String, String) {
    run_ok(&["generate", "--preset", "eega3", "--out", dir.to_str().unwrap()]);
    (path_str(dir, "workflow.json"), path_str(dir, "catalog.json"))
}

#[test]
fn generate_writes_valid_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());

    let workflow = Workflow::from_json(&fs::read_to_string(&workflow_path).unwrap()).unwrap();
    let catalog = Catalog::from_json(&fs::read_to_string(&catalog_path).unwrap()).unwrap();
    assert_eq!(workflow.len(), 30);
    assert_eq!(catalog.sites().len(), 3);

    let first = fs::read(&workflow_path).unwrap();
    run_ok(&["generate", "--preset", "eega3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(fs::read(&workflow_path).unwrap(), first, "regeneration is byte-identical");
}

#[test]
fn generate_prints_file_paths() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run_ok(&["generate", "--out", dir.path().to_str().unwrap()]);
    assert!(stdout.contains("workflow.json"));
    assert!(stdout.contains("catalog.json"));
}

#[test]
fn generate_rejects_invalid_spec() {
    let dir = tempfile::tempdir().unwrap();
    let stderr = run_usage_error(&["generate", "--n-tasks", "0", "--out", dir.path().to_str().unwrap()]);
    assert!(stderr.contains("n_tasks"));
}

#[test]
fn generate_honors_spec_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = path_str(dir.path(), "spec.json");
    fs::write(
        &spec_path,
        greensched::workload::ScenarioSpec::eega3().to_json(),
    )
    .unwrap();
    run_ok(&[
        "generate",
        "--spec",
        &spec_path,
        "--n-tasks",
        "12",
        "--n-sites",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let workflow =
        Workflow::from_json(&fs::read_to_string(dir.path().join("workflow.json")).unwrap())
            .unwrap();
    let catalog =
        Catalog::from_json(&fs::read_to_string(dir.path().join("catalog.json")).unwrap()).unwrap();
    assert_eq!(workflow.len(), 12);
    assert_eq!(catalog.sites().len(), 2);
}

fn schedule_into(dir: &Path, workflow: &str, catalog: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec![
        "schedule",
        "--workflow",
        workflow,
        "--catalog",
        catalog,
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run_ok(&args);
    dir.join("schedule.json")
}

#[test]
fn schedule_emits_total_assignment_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let stdout = run_ok(&[
        "schedule",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--scheduler",
        "hga",
        "--gf",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stdout.contains("scheduler hga: 30 tasks, 30 mapped"));

    let workflow = Workflow::from_json(&fs::read_to_string(&workflow_path).unwrap()).unwrap();
    let catalog = Catalog::from_json(&fs::read_to_string(&catalog_path).unwrap()).unwrap();
    let schedule =
        Schedule::from_json(&fs::read_to_string(dir.path().join("schedule.json")).unwrap())
            .unwrap();
    schedule.validate_for(&workflow, &catalog).unwrap();
}

#[test]
fn schedule_rejects_out_of_range_gf() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let stderr = run_usage_error(&[
        "schedule",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--gf",
        "1.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stderr.contains("gf"));
}

#[test]
fn random_scheduler_is_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let extra = ["--scheduler", "random", "--seed", "7"];
    let path = schedule_into(dir.path(), &workflow_path, &catalog_path, &extra);
    let first = fs::read(&path).unwrap();
    schedule_into(dir.path(), &workflow_path, &catalog_path, &extra);
    assert_eq!(fs::read(&path).unwrap(), first);

    schedule_into(
        dir.path(),
        &workflow_path,
        &catalog_path,
        &["--scheduler", "random", "--seed", "8"],
    );
    assert_ne!(fs::read(&path).unwrap(), first, "a different seed moves tasks");
}

/// Full generate/schedule/simulate run; returns the ledger path.
fn simulate_pipeline(dir: &Path, gating_flags: &[&str]) -> PathBuf {
    let (workflow_path, catalog_path) = generate_eega3(dir);
    let schedule_path = schedule_into(dir, &workflow_path, &catalog_path, &[]);
    let mut args = vec![
        "simulate",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--schedule",
        schedule_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(gating_flags);
    let stdout = run_ok(&args);
    assert!(stdout.contains("makespan"), "summary line: {stdout}");
    assert!(stdout.contains("total energy"));
    dir.join("ledger.json")
}

#[test]
fn simulate_writes_ledger_and_timeline() {
    let dir = tempfile::tempdir().unwrap();
    let ledger_path = simulate_pipeline(dir.path(), &["--gating", "fine"]);
    let ledger = EnergyLedger::from_json(&fs::read_to_string(&ledger_path).unwrap()).unwrap();
    assert!(ledger.total_j > 0.0);

    let timeline = fs::read_to_string(dir.path().join("timeline.csv")).unwrap();
    assert!(timeline.starts_with("task,site,start_s,end_s\n"));
    assert_eq!(timeline.lines().count(), 31, "header plus one row per task");
}

#[test]
fn simulate_honors_csv_ledger_format() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let schedule_path = schedule_into(dir.path(), &workflow_path, &catalog_path, &[]);
    run_ok(&[
        "simulate",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--schedule",
        schedule_path.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let ledger = fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert!(ledger.starts_with("site,busy_j,idle_j,storage_j,wake_j\n"));
}

#[test]
fn fine_gating_saves_energy_at_zero_overheads() {
    let none_dir = tempfile::tempdir().unwrap();
    let fine_dir = tempfile::tempdir().unwrap();
    let zero = [
        "--wake-latency",
        "0",
        "--wake-energy",
        "0",
        "--residual",
        "0",
    ];
    let mut none_flags = vec!["--gating", "none"];
    none_flags.extend_from_slice(&zero);
    let mut fine_flags = vec!["--gating", "fine"];
    fine_flags.extend_from_slice(&zero);

    let none_ledger = simulate_pipeline(none_dir.path(), &none_flags);
    let fine_ledger = simulate_pipeline(fine_dir.path(), &fine_flags);
    let none = EnergyLedger::from_json(&fs::read_to_string(none_ledger).unwrap()).unwrap();
    let fine = EnergyLedger::from_json(&fs::read_to_string(fine_ledger).unwrap()).unwrap();
    assert!(fine.total_j <= none.total_j);
}

#[test]
fn simulate_rejects_partial_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let partial = path_str(dir.path(), "partial.json");
    fs::write(&partial, "{\"assignment\": {\"t01\": \"A\"}, \"order\": [\"t01\"]}\n").unwrap();
    run_usage_error(&[
        "simulate",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--schedule",
        &partial,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
}

#[test]
fn simulate_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let broken = path_str(dir.path(), "broken.json");
    fs::write(&broken, "{\"assignment\": ").unwrap();
    run_usage_error(&[
        "simulate",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--schedule",
        &broken,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
}

#[test]
fn simulate_rejects_invalid_residual() {
    let dir = tempfile::tempdir().unwrap();
    let (workflow_path, catalog_path) = generate_eega3(dir.path());
    let schedule_path = schedule_into(dir.path(), &workflow_path, &catalog_path, &[]);
    let stderr = run_usage_error(&[
        "simulate",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--schedule",
        schedule_path.to_str().unwrap(),
        "--gating",
        "fine",
        "--residual",
        "1.0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stderr.contains("residual_fraction"));
}

#[test]
fn compare_reports_savings_with_direction() {
    let dir = tempfile::tempdir().unwrap();
    let ledger_path = simulate_pipeline(dir.path(), &["--gating", "fine"]);

    let stdout = run_ok(&[
        "compare",
        "--candidate",
        ledger_path.to_str().unwrap(),
        "--baseline",
        ledger_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stdout.contains("savings 0.00%"), "identical ledgers: {stdout}");
    assert!(stdout.contains("identical energy use"));

    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.starts_with("label,candidate_total_j,baseline_total_j,savings_fraction,makespan_delta_s\n"));
    assert_eq!(report.lines().count(), 2);
    let dat = fs::read_to_string(dir.path().join("savings.dat")).unwrap();
    assert!(dat.lines().any(|l| l.starts_with("ledger 0.0000")), "{dat}");
}

#[test]
fn compare_rejects_mismatched_scenarios() {
    let big = tempfile::tempdir().unwrap();
    let small = tempfile::tempdir().unwrap();
    let big_ledger = simulate_pipeline(big.path(), &[]);

    run_ok(&["generate", "--n-sites", "2", "--out", small.path().to_str().unwrap()]);
    let (workflow_path, catalog_path) = (
        path_str(small.path(), "workflow.json"),
        path_str(small.path(), "catalog.json"),
    );
    let schedule_path = schedule_into(small.path(), &workflow_path, &catalog_path, &[]);
    run_ok(&[
        "simulate",
        "--workflow",
        &workflow_path,
        "--catalog",
        &catalog_path,
        "--schedule",
        schedule_path.to_str().unwrap(),
        "--out",
        small.path().to_str().unwrap(),
    ]);

    let stderr = run_usage_error(&[
        "compare",
        "--candidate",
        big_ledger.to_str().unwrap(),
        "--baseline",
        path_str(small.path(), "ledger.json").as_str(),
        "--out",
        big.path().to_str().unwrap(),
    ]);
    assert!(stderr.contains("different site"), "{stderr}");
}

#[test]
fn pipeline_emits_batch_report() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run_ok(&[
        "compare",
        "--pipeline",
        "--gating",
        "fine",
        "--baseline-seeds",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stdout.contains("mean"), "{stdout}");
    assert!(stdout.contains("min"));
    assert!(stdout.contains("max"));

    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 21, "header plus 20 seed rows");
    let dat = fs::read_to_string(dir.path().join("savings.dat")).unwrap();
    assert_eq!(dat.lines().count(), 21);

    let rerun = tempfile::tempdir().unwrap();
    run_ok(&[
        "compare",
        "--pipeline",
        "--gating",
        "fine",
        "--baseline-seeds",
        "20",
        "--out",
        rerun.path().to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read(dir.path().join("report.csv")).unwrap(),
        fs::read(rerun.path().join("report.csv")).unwrap(),
        "pipeline reruns are byte-identical"
    );
}

#[test]
fn compare_requires_ledgers_or_pipeline() {
    let out = run(&["compare"]);
    assert_eq!(out.status.code(), Some(2), "clap usage error");
}

#[test]
fn global_seed_reseeds_generation() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let dir_c = tempfile::tempdir().unwrap();
    run_ok(&["generate", "--seed", "3", "--out", dir_a.path().to_str().unwrap()]);
    run_ok(&["generate", "--seed", "3", "--out", dir_b.path().to_str().unwrap()]);
    run_ok(&["generate", "--seed", "4", "--out", dir_c.path().to_str().unwrap()]);

    let read = |d: &Path| fs::read(d.join("workflow.json")).unwrap();
    assert_eq!(read(dir_a.path()), read(dir_b.path()));
    assert_ne!(read(dir_a.path()), read(dir_c.path()));
}
