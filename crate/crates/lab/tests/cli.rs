use std::fs;
use std::path::Path;
use std::process::Command;

use lvrae_lab::config::{quick_config, save_config};
use lvrae_lab::table::{schema_hash, SCHEMAS};

fn lvrae() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lvrae"))
}

fn quick_config_file(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("quick.json");
    save_config(&quick_config(), &p).unwrap();
    p
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn run_into(sub: &str, cfg: &Path, out: &Path) {
    let st = lvrae()
        .args([sub, "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .status()
        .unwrap();
    assert!(st.success(), "{sub} exited with {st}");
}

#[test]
fn toy_sweep_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config_file(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_into("toy-sweep", &cfg, &a);
    run_into("toy-sweep", &cfg, &b);
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    assert!(fa.iter().any(|(n, _)| n == "toy_sweep.csv"));
    assert_eq!(fa, fb);
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config_file(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_into("toy-sweep", &cfg, &a);
    let st = lvrae()
        .args(["toy-sweep", "--threads", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .status()
        .unwrap();
    assert!(st.success());
    assert_eq!(csv_files(&a), csv_files(&b));
}

#[test]
fn lvrae_pipeline_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config_file(tmp.path());
    let out = tmp.path().join("o");
    for sub in ["lvrae-train", "lvrae-noiseft", "lvrae-gen"] {
        run_into(sub, &cfg, &out);
    }
    let names: Vec<String> = csv_files(&out).into_iter().map(|(n, _)| n).collect();
    for want in ["stage1_eval.csv", "noise_ablation.csv", "amplification.csv", "sigma_sweep.csv"] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
    // a second gen reuses checkpoints and reproduces the sweep
    let sweep = fs::read(out.join("sigma_sweep.csv")).unwrap();
    run_into("lvrae-gen", &cfg, &out);
    assert_eq!(sweep, fs::read(out.join("sigma_sweep.csv")).unwrap());
}

#[test]
fn written_headers_follow_schemas() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config_file(tmp.path());
    let out = tmp.path().join("o");
    run_into("grad-check", &cfg, &out);
    run_into("toy-sweep", &cfg, &out);
    let header = |f: &str| fs::read_to_string(out.join(f)).unwrap().lines().next().unwrap().to_string();
    let schema = |n: &str| SCHEMAS.iter().find(|(k, _)| *k == n).unwrap().1.join(",");
    assert_eq!(header("grad_check.csv"), schema("grad_check"));
    assert_eq!(header("toy_sweep.csv"), schema("toy_sweep"));
    assert_eq!(header("loss_trace_d8.csv"), schema("loss_trace"));
    // changing any column must be a deliberate, versioned edit
    assert_eq!(lvrae_lab::table::SCHEMA_VERSION, 1);
    assert_eq!(schema_hash(), schema_hash_pinned());
}

fn schema_hash_pinned() -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for (name, cols) in SCHEMAS {
        for s in std::iter::once(name).chain(cols.iter()) {
            for b in s.bytes().chain(std::iter::once(0)) {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

#[test]
fn scatter_plots_are_well_formed_xml() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config_file(tmp.path());
    let out = tmp.path().join("o");
    run_into("toy-sweep", &cfg, &out);
    let svgs: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .collect();
    assert!(!svgs.is_empty());
    for p in svgs {
        let text = fs::read_to_string(&p).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert!(doc.descendants().filter(|n| n.has_tag_name("circle")).count() > 2);
    }
}

#[test]
fn metrics_between_dumps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config_file(tmp.path());
    let out = tmp.path().join("o");
    run_into("toy-sweep", &cfg, &out);
    let truth = out.join("truth_d8.csv");
    let st = lvrae()
        .args(["metrics", "--reference"])
        .arg(&truth)
        .arg("--candidate")
        .arg(&truth)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let text = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(text.lines().any(|l| l == "energy_distance,0"), "{text}");
    assert!(text.lines().any(|l| l == "cknna,1"), "{text}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| lvrae().args(args).current_dir(tmp.path()).status().unwrap().code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["no-such-command"]), Some(1));
    assert_eq!(code(&["grad-check", "--threads", "0"]), Some(1));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"seeed": 1}"#).unwrap();
    assert_eq!(code(&["grad-check", "--config", bad.to_str().unwrap()]), Some(1));
    assert_eq!(code(&["metrics"]), Some(1));
    let nan = tmp.path().join("nan.json");
    fs::write(&nan, r#"{"toy": {"dims": [4], "alphas": [0.0], "flow": {"steps": 20, "lr": 1e300}}}"#).unwrap();
    let out = tmp.path().join("o");
    assert_eq!(code(&["toy-sweep", "--config", nan.to_str().unwrap(), "--out", out.to_str().unwrap()]), Some(2));
}
