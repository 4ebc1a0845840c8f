use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn lwr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lwr")).args(args).output().unwrap()
}

fn toy_train_args() -> Vec<String> {
    vec![
        "--train-labels".into(),
        fixture("toy_labels.csv"),
        "--train-phi".into(),
        fixture("toy_phi.csv"),
        "--train-phi-prime".into(),
        fixture("toy_phi_prime.csv"),
    ]
}

fn run(cmd: &str, extra: &[String], more: &[&str]) -> Output {
    let mut args: Vec<&str> = vec![cmd];
    args.extend(extra.iter().map(String::as_str));
    args.extend_from_slice(more);
    lwr(&args)
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn single_cell_train_writes_one_model_and_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = run(
            "train",
            &toy_train_args(),
            &["--c-list", "0.25", "--lambda-grid", "0.1", "--lambda-prime-grid", "0.1", "--out-dir", dir.to_str().unwrap()],
        );
        assert_ok(&out);
    }
    assert_eq!(listing(&a), ["model_lwr_c0.25.json", "train_report.json"]);
    for name in listing(&a) {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn grid_report_has_every_candidate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        "train",
        &toy_train_args(),
        &[
            "--c-list", "0.2,0.3",
            "--lambda-grid", "0.01,0.1,1",
            "--lambda-prime-grid", "0.01,0.1,1",
            "--out-dir", tmp.path().to_str().unwrap(),
        ],
    );
    assert_ok(&out);
    let report = json(&tmp.path().join("train_report.json"));
    assert_eq!(report["lwr_candidates"].as_array().unwrap().len(), 18);
    assert_eq!(report["selected"].as_array().unwrap().len(), 2);
    assert_eq!(report["settings"]["lambdas"].as_array().unwrap().len(), 3);
    let models: Vec<String> = listing(tmp.path()).into_iter().filter(|n| n.starts_with("model_")).collect();
    assert_eq!(models, ["model_lwr_c0.2.json", "model_lwr_c0.3.json"]);
}

#[test]
fn missing_phi_prime_is_a_config_error_with_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = lwr(&[
        "train",
        "--train-labels", &fixture("toy_labels.csv"),
        "--train-phi", &fixture("toy_phi.csv"),
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--train-phi-prime"));
    assert!(!dir.exists());

    let out = lwr(&[
        "train",
        "--train-labels", &fixture("toy_labels.csv"),
        "--train-phi", &fixture("toy_phi.csv"),
        "--train-phi-prime", &fixture("nonexistent.csv"),
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.exists());
}

#[test]
fn bad_values_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    for extra in [
        &["--c-list", "0.5"][..],
        &["--c-list", "0.2,0.2"],
        &["--lambda-grid", "0,1"],
        &["--tolerance", "-1"],
        &["--solver", "newton"],
    ] {
        let mut more = extra.to_vec();
        more.extend(["--out-dir", dir.to_str().unwrap()]);
        let out = run("train", &toy_train_args(), &more);
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
        assert!(!dir.exists());
    }
}

#[test]
fn malformed_data_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = tmp.path().join("labels.csv");
    fs::write(&labels, "id,label\nt00,+1\nt01,2\n").unwrap();
    let dir = tmp.path().join("out");
    let out = lwr(&[
        "train",
        "--train-labels", labels.to_str().unwrap(),
        "--train-phi", &fixture("toy_phi.csv"),
        "--train-phi-prime", &fixture("toy_phi_prime.csv"),
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("labels.csv:3:"));
    assert!(!dir.exists());
}

#[test]
fn exhausted_iterations_is_a_convergence_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = run(
        "train",
        &toy_train_args(),
        &["--c-list", "0.2", "--lambda-grid", "1", "--lambda-prime-grid", "1", "--max-iterations", "1", "--out-dir", dir.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(!dir.exists());
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    fs::write(
        &conf,
        format!(
            "train_labels = {}\ntrain_phi = {}\ntrain_phi_prime = {}\nc_list = 0.1,0.2\nlambda_grid = 0.1\nlambda_prime_grid = 0.1\nnormalize = true\n",
            fixture("toy_labels.csv"),
            fixture("toy_phi.csv"),
            fixture("toy_phi_prime.csv")
        ),
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let out = lwr(&["train", "--config", conf.to_str().unwrap(), "--c-list", "0.3", "--out-dir", dir.to_str().unwrap()]);
    assert_ok(&out);
    assert_eq!(listing(&dir), ["model_lwr_c0.3.json", "train_report.json"]);
    let model = json(&dir.join("model_lwr_c0.3.json"));
    assert!(model["normalization"].is_object());

    fs::write(&conf, "unknown_key = 1\n").unwrap();
    let out = lwr(&["train", "--config", conf.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_with_external_probabilities_and_baselines() {
    let tmp = tempfile::tempdir().unwrap();
    let models = tmp.path().join("models");
    let out = run(
        "train",
        &toy_train_args(),
        &[
            "--c-list", "0.1,0.2,0.3,0.4",
            "--lambda-grid", "0.1,1",
            "--lambda-prime-grid", "0.1,1",
            "--baselines",
            "--probabilities", &fixture("toy_probabilities.csv"),
            "--out-dir", models.to_str().unwrap(),
        ],
    );
    assert_ok(&out);
    let eval_dir = tmp.path().join("eval");
    let out = lwr(&[
        "eval",
        "--models", models.to_str().unwrap(),
        "--test-labels", &fixture("toy_labels.csv"),
        "--test-phi", &fixture("toy_phi.csv"),
        "--test-phi-prime", &fixture("toy_phi_prime.csv"),
        "--probabilities", &fixture("toy_probabilities.csv"),
        "--out-dir", eval_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let curve = fs::read_to_string(eval_dir.join("curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("method,c,rejection_rate,accuracy,risk_per_sample"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    for method in ["lwr", "svm", "external"] {
        let cs: Vec<&str> = rows
            .iter()
            .filter(|r| r.starts_with(&format!("{method},")))
            .map(|r| r.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(cs, ["0.1", "0.2", "0.3", "0.4"], "{method}");
    }

    // External models cannot be scored without the table.
    let out = lwr(&[
        "eval",
        "--models", models.to_str().unwrap(),
        "--test-labels", &fixture("toy_labels.csv"),
        "--test-phi", &fixture("toy_phi.csv"),
        "--test-phi-prime", &fixture("toy_phi_prime.csv"),
        "--out-dir", tmp.path().join("eval2").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_on_training_data_counts_match_the_model() {
    use lwr::data::DatasetFiles;
    use lwr::trainer::recover_slacks;

    let tmp = tempfile::tempdir().unwrap();
    let labels = fixture("toy_labels.csv");
    let phi = fixture("toy_phi.csv");
    let phi_prime = fixture("toy_phi_prime.csv");
    let out = lwr(&[
        "train",
        "--train-labels", &labels, "--train-phi", &phi, "--train-phi-prime", &phi_prime,
        "--val-labels", &labels, "--val-phi", &phi, "--val-phi-prime", &phi_prime,
        "--c-list", "0.25", "--lambda-grid", "0.1", "--lambda-prime-grid", "0.1",
        "--out-dir", tmp.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    let eval_dir = tmp.path().join("eval");
    let out = lwr(&[
        "eval", "--models", tmp.path().to_str().unwrap(),
        "--test-labels", &labels, "--test-phi", &phi, "--test-phi-prime", &phi_prime,
        "--out-dir", eval_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);

    let file = json(&tmp.path().join("model_lwr_c0.25.json"));
    let model: lwr::LwrModel = serde_json::from_value(file["model"].clone()).unwrap();
    let data = DatasetFiles {
        labels: labels.into(),
        phi: phi.into(),
        phi_prime: phi_prime.into(),
    }
    .load()
    .unwrap();
    let mut wrong = 0;
    let mut rejected = 0;
    for i in 0..data.len() {
        let (f, r) = model.scores(&data, i);
        if r <= 0.0 {
            rejected += 1;
        } else if (f > 0.0) != (data.labels()[i] == lwr::Label::Positive) {
            wrong += 1;
        }
    }
    let expected = wrong as f64 + 0.25 * rejected as f64;
    let report = json(&eval_dir.join("eval_report.json"));
    let risk_total = report[0]["report"]["risk_total"].as_f64().unwrap();
    assert_eq!(risk_total, expected);
    // The surrogate bounds the counted risk from above.
    assert!(risk_total <= recover_slacks(&model, &data).unwrap().sum());
}

#[test]
fn sweep_emits_four_rows_per_method() {
    let tmp = tempfile::tempdir().unwrap();
    let syn = tmp.path().join("syn");
    assert_ok(&lwr(&["synth", "--m", "600", "--dim", "1", "--seed", "4", "--out-dir", syn.to_str().unwrap()]));
    let sweep = tmp.path().join("sweep");
    let out = lwr(&[
        "sweep",
        "--train-labels", syn.join("labels.csv").to_str().unwrap(),
        "--train-phi", syn.join("phi.csv").to_str().unwrap(),
        "--train-phi-prime", syn.join("phi_prime.csv").to_str().unwrap(),
        "--baselines", "--normalize",
        "--out-dir", sweep.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let curve = fs::read_to_string(sweep.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().filter(|l| l.starts_with("lwr,")).count(), 4);
    assert_eq!(curve.lines().filter(|l| l.starts_with("svm,")).count(), 4);
    let report = json(&sweep.join("train_report.json"));
    assert_eq!(report["train_size"], 300);
    assert_eq!(report["validation_size"], 150);
}

#[test]
fn synth_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    assert_ok(&lwr(&["synth", "--out-dir", a.to_str().unwrap()]));
    assert_eq!(listing(&a), ["labels.csv", "oracle_summary.json", "phi.csv", "phi_prime.csv"]);
    assert_eq!(fs::read_to_string(a.join("labels.csv")).unwrap().lines().count(), 4001);
    let summary = json(&a.join("oracle_summary.json"));
    assert_eq!(summary["oracle"].as_array().unwrap().len(), 4);

    let b = tmp.path().join("b");
    let args = ["synth", "--dim", "2", "--second-space", "rotation", "--projection-dims", "3", "--m", "50", "--seed", "8"];
    assert_ok(&lwr(&[&args[..], &["--out-dir", b.to_str().unwrap()]].concat()));
    let header = fs::read_to_string(b.join("phi_prime.csv")).unwrap();
    assert_eq!(header.lines().next(), Some("id,f1,f2,f3"));

    let c = tmp.path().join("c");
    assert_ok(&lwr(&[&args[..], &["--out-dir", c.to_str().unwrap()]].concat()));
    for name in listing(&b) {
        assert_eq!(fs::read(b.join(&name)).unwrap(), fs::read(c.join(&name)).unwrap());
    }

    let out = lwr(&["synth", "--sigma", "0", "--out-dir", tmp.path().join("d").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
