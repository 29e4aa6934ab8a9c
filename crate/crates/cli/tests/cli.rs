use std::path::Path;
use std::process::Command;

use fpp_cli::acceptance::{run_suite, Sizes};
use fpp_cli::config::{parse_config, Experiment, ExperimentConfig};
use fpp_cli::manifest::{sha256_hex, RunManifest};
use fpp_cli::{render_report, replay, run};
use fpp_lab::Padding;
use proptest::prelude::*;

fn small_config(dir: &Path, experiments: Vec<Experiment>) -> ExperimentConfig {
    ExperimentConfig {
        n_values: vec![4, 8],
        replicas: 30,
        master_seed: 99,
        experiments,
        output_dir: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

fn fpp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fpp"))
        .args(args)
        .env_remove("FPP_OUTPUT_DIR")
        .env_remove("FPP_THREADS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, cfg: &ExperimentConfig) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

fn experiment_list() -> impl Strategy<Value = Vec<Experiment>> {
    prop::sample::subsequence(Experiment::ALL.to_vec(), 0..=Experiment::ALL.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn config_round_trip(
        dimension in 2usize..5,
        alpha in 1.0001f64..6.0,
        intensity in 0.01f64..10.0,
        start in 1u64..50,
        steps in prop::collection::vec(1u64..100, 0..6),
        replicas in 2usize..10_000,
        master_seed in any::<u64>(),
        padding in prop_oneof![Just(Padding::Auto), (0.0f64..100.0).prop_map(Padding::Fixed)],
        theta in 1e-9f64..1.0,
        delta in 0.01f64..1.0,
        c_ubiq in 0.001f64..0.25,
        experiments in experiment_list(),
        threads in prop::option::of(1usize..64),
    ) {
        let mut n_values = vec![start];
        for s in steps {
            n_values.push(n_values.last().unwrap() + s);
        }
        let cfg = ExperimentConfig {
            dimension, alpha, intensity, n_values, replicas, master_seed, padding,
            theta, delta, c_ubiq, experiments, output_dir: "out/x".into(), threads,
        };
        let once = parse_config(&cfg.to_json()).unwrap();
        prop_assert_eq!(&once, &cfg);
        let twice = parse_config(&once.to_json()).unwrap();
        prop_assert_eq!(twice.to_json(), cfg.to_json());
    }
}

#[test]
fn empty_experiment_list_writes_only_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = small_config(&out, vec![]);
    let path = write_config(tmp.path(), &cfg);
    let o = fpp(&["run", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let files: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files, vec![std::ffi::OsString::from("manifest.json")]);
    let m = RunManifest::load(&out).unwrap();
    assert!(m.tasks.is_empty());
    assert_eq!(m.config, cfg);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{\"alpha\": 0.5}").unwrap();
    assert_eq!(fpp(&["run", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(fpp(&["run", "/nonexistent/config.json"]).status.code(), Some(1));
    let mut cfg = small_config(&tmp.path().join("o"), vec![]);
    cfg.alpha = 1.0;
    std::fs::write(&bad, cfg.to_json()).unwrap();
    assert_eq!(fpp(&["acceptance", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(fpp(&["report", tmp.path().join("missing").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn env_overrides_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(&tmp.path().join("from-file"), vec![]);
    let path = write_config(tmp.path(), &cfg);
    let elsewhere = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_fpp"))
        .args(["run", &path])
        .env("FPP_OUTPUT_DIR", &elsewhere)
        .env("FPP_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(elsewhere.join("manifest.json").exists());
    assert!(!tmp.path().join("from-file").exists());
    let bad = Command::new(env!("CARGO_BIN_EXE_fpp"))
        .args(["run", &path])
        .env("FPP_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn campaign_run_report_resume_and_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let experiments = vec![
        Experiment::Estimate,
        Experiment::Fluctuation,
        Experiment::BenchLambda,
        Experiment::BenchUbiquity,
    ];
    let cfg = small_config(&out, experiments.clone());
    let first = run(cfg.clone(), &Sizes::smoke(), |_| {}).unwrap();
    assert!(first.resumed.is_empty());
    for t in &first.manifest.tasks {
        for o in &t.outputs {
            let bytes = std::fs::read(out.join(&o.file)).unwrap();
            assert_eq!(sha256_hex(&bytes), o.sha256);
        }
    }

    let text = render_report(&out).unwrap();
    assert!(text.contains("bench-lambda"));
    assert!(text.contains("(log phi_hat, fluct_lb)"));
    // the largest n defines g_hat, so its fluct_lb is exactly zero
    let last_row = text.lines().find(|l| l.trim_start().starts_with("8 ")).unwrap();
    assert!(last_row.contains(" 0.0000 "));
    assert_eq!(render_report(&out).unwrap(), text);

    // resume keeps intact outputs and recomputes a damaged one
    let before = std::fs::read(out.join("fluctuation.csv")).unwrap();
    std::fs::write(out.join("bench-lambda.csv"), "tampered").unwrap();
    assert!(render_report(&out).is_err());
    let again = run(cfg.clone(), &Sizes::smoke(), |_| {}).unwrap();
    assert_eq!(again.resumed, vec![Experiment::Estimate, Experiment::Fluctuation, Experiment::BenchUbiquity]);
    assert_eq!(std::fs::read(out.join("fluctuation.csv")).unwrap(), before);
    let digests = |m: &RunManifest| m.tasks.iter().map(|t| t.outputs.clone()).collect::<Vec<_>>();
    assert_eq!(digests(&again.manifest), digests(&first.manifest));

    let mismatches = replay(&first.manifest, tmp.path().join("replay"), &Sizes::smoke()).unwrap();
    assert!(mismatches.is_empty(), "{mismatches:?}");
    // replaying into a directory that already holds a run is refused
    assert!(replay(&first.manifest, out.clone(), &Sizes::smoke()).is_err());
}

#[test]
fn single_n_campaign_gives_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("one");
    let mut cfg = small_config(&out, vec![Experiment::Fluctuation]);
    cfg.n_values = vec![6];
    run(cfg, &Sizes::smoke(), |_| {}).unwrap();
    let text = render_report(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.trim_start().starts_with("6 ")).collect();
    assert_eq!(rows.len(), 1);
}

#[test]
fn smoke_suite_reports_every_criterion() {
    let suite = run_suite(5, &Sizes::smoke());
    let ids: Vec<u8> = suite.criteria.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=11).collect::<Vec<_>>());
    for c in &suite.criteria {
        assert!(!c.detail.starts_with("error"), "{}", c.line());
    }
    assert!(suite.criterion(11).property);
    assert!(suite.criterion(1).property, "{}", suite.criterion(1).line());
    assert!(suite.criterion(2).property, "{}", suite.criterion(2).line());
    let again = run_suite(5, &Sizes::smoke());
    assert_eq!(suite.summary_json(), again.summary_json());
    assert_eq!(suite.outputs, again.outputs);
}
