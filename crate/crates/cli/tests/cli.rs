use std::path::Path;
use std::process::{Command, Output};

fn qsignal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsignal")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qsignal(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// CSV with the trailing wall-time column removed.
fn without_wall_time(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string()).collect()
}

#[test]
fn white_noise_csv_is_reproducible_across_worker_counts() {
    let base = ["white-noise", "--n", "3..5", "--samples", "24", "--seed", "11"];
    let one = stdout(&[&base[..], &["--workers", "1"]].concat());
    let four = stdout(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.starts_with("experiment,n,c,variant,estimate_bits,std_error_bits,sample_max_bits,samples,seed,model,"));
    assert_eq!(one.lines().count(), 4);
    assert_eq!(without_wall_time(&one), without_wall_time(&four));
}

#[test]
fn every_subcommand_runs() {
    for args in [
        vec!["white-noise", "--n", "2", "--samples", "3"],
        vec!["white-noise-mixed", "--n", "2", "--samples", "3", "--eta", "equal", "--components", "2"],
        vec!["collapse", "--n", "4", "--c", "1..2", "--samples", "3"],
        vec!["biased-prior", "--n", "3", "--samples", "3", "--c-bias", "1"],
        vec!["conservation", "--n", "4", "--c", "1", "--samples", "5", "--channel", "coarsen"],
        vec!["trajectory", "--times", "0,1,inf"],
        vec!["pointer-average", "--n", "2..4"],
    ] {
        let text = stdout(&args);
        assert!(text.lines().count() >= 2, "{args:?}");
    }
}

#[test]
fn json_report_echoes_config() {
    let text = stdout(&["collapse", "--n", "5", "--c", "2", "--samples", "4", "--seed", "3", "--format", "json"]);
    assert!(text.contains("\"schema\": \"qsignal-report/1\""));
    assert!(text.contains("\"seed\": 3"));
    assert!(text.contains("\"model\": \"length\""));
    assert!(text.contains("\"estimate_bits\": 3.0"));
}

#[test]
fn trajectory_single_time() {
    let text = stdout(&["trajectory", "--state", "basis:1", "--n", "2", "--times", "0"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["t,purity,entropy,algorithmic_bits", "0,1,0,2"]);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "n = \"3\"\nsamples = 5\nseed = 9\nformat = \"csv\"\n").unwrap();
    let out = dir.path().join("out.csv");
    let cfg = config.to_str().unwrap();
    stdout(&["white-noise", "--config", cfg, "--seed", "10", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(Path::new(&out)).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[1], row[7], row[8]), ("3", "5", "10"));
}

#[test]
fn invalid_input_fails() {
    for args in [
        vec!["white-noise", "--samples", "0"],
        vec!["collapse", "--c", "0"],
        vec!["white-noise", "--model", "nonsense"],
        vec!["trajectory", "--times", "-1"],
        vec!["white-noise", "--n", "13"],
    ] {
        let out = qsignal(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
