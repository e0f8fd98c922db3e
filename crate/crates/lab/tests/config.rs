use lvrae_lab::config::{quick_config, to_json};
use lvrae_lab::{parse_config, ExperimentConfig, ExperimentKind, LabError};

#[test]
fn empty_object_is_all_defaults() {
    assert_eq!(parse_config("{}").unwrap(), ExperimentConfig::default());
}

#[test]
fn json_round_trip_is_lossless() {
    let mut c = quick_config();
    c.seed = 1234;
    c.experiment = ExperimentKind::LvraeNoiseft;
    c.lvrae.weights.eta = 0.1 + 0.2;
    c.toy.alphas = vec![0.0, 1.0 / 3.0];
    let back = parse_config(&to_json(&c)).unwrap();
    assert_eq!(back, c);
}

#[test]
fn unknown_key_is_rejected_by_path() {
    let err = parse_config(r#"{"lvrae": {"weights": {"etaa": 1.0}}}"#).unwrap_err();
    match &err {
        LabError::Config { path, message } => {
            assert_eq!(path, "lvrae.weights.etaa");
            assert!(message.contains("etaa"), "{message}");
        }
        other => panic!("unexpected error {other:?}"),
    }
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn wrong_type_names_the_field() {
    let err = parse_config(r#"{"toy": {"dims": [2, "four"]}}"#).unwrap_err();
    match err {
        LabError::Config { path, .. } => assert!(path.starts_with("toy.dims"), "{path}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn experiment_names_are_kebab_case() {
    let c = parse_config(r#"{"experiment": "lvrae-gen"}"#).unwrap();
    assert_eq!(c.experiment, ExperimentKind::LvraeGen);
    assert!(parse_config(r#"{"experiment": "LvraeGen"}"#).is_err());
}
