use std::path::Path;
use std::process::{Command, Output};

use relay_bounds::DiscreteChannel;
use relay_bounds_cli::channel_io::{read_channel_file, write_channel};

const HALF_LN_1_5: f64 = 0.2027325540540822;
const HALF_LN_2: f64 = 0.34657359027997264;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_relay-bounds"));
    cmd.env_remove("RELAY_BOUNDS_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and numeric rows of a CSV document.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(!text.contains('\r'), "CSV must use LF endings");
    let mut lines = text.lines();
    let header = lines.next().expect("header row").split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn field(header: &[String], row: &[String], name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    row[i].parse().unwrap()
}

fn single_row(out: &Output) -> (Vec<String>, Vec<String>) {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let (h, mut rows) = parse_csv(&stdout(out));
    assert_eq!(rows.len(), 1);
    (h, rows.remove(0))
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn gaussian_moderate_relay_rate() {
    let (h, r) = single_row(&run(&["gaussian", "--snr", "0.5", "--c0", "0.1"]));
    assert_eq!(h, ["snr", "c0", "cutset", "relaxed", "lemma2", "lemma3", "best"]);
    let lemma3 = field(&h, &r, "lemma3");
    assert!((lemma3 - 0.5 * 1.8f64.ln()).abs() < 1e-15);
    assert!((lemma3 - 0.293891).abs() < 5e-6);
    assert!((field(&h, &r, "cutset") - (0.1 + HALF_LN_1_5)).abs() < 1e-15);
    assert_eq!(field(&h, &r, "best"), lemma3);
}

#[test]
fn gaussian_zero_relay_rate_collapses_to_direct_link() {
    let (h, r) = single_row(&run(&["gaussian", "--snr", "0.5", "--c0", "0"]));
    for name in ["cutset", "relaxed", "lemma2", "lemma3", "best"] {
        assert!((field(&h, &r, name) - HALF_LN_1_5).abs() < 1e-15, "{name}");
    }
}

#[test]
fn gaussian_large_relay_rate_saturates_at_broadcast_cut() {
    let (h, r) = single_row(&run(&["gaussian", "--snr", "0.5", "--c0", "10"]));
    assert!((field(&h, &r, "best") - HALF_LN_2).abs() < 1e-15);
}

#[test]
fn gaussian_power_and_noise_match_snr() {
    let a = run(&["gaussian", "--power", "2", "--noise", "4", "--c0", "0.1"]);
    let b = run(&["gaussian", "--snr", "0.5", "--c0", "0.1"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn gaussian_bits_rescales_rates_only() {
    let (h, nats) = single_row(&run(&["gaussian", "--snr", "0.5", "--c0", "0.1"]));
    let (_, bits) = single_row(&run(&["gaussian", "--snr", "0.5", "--c0", "0.1", "--bits"]));
    assert_eq!(field(&h, &bits, "snr"), 0.5);
    for name in ["c0", "cutset", "lemma2", "best"] {
        let ratio = field(&h, &nats, name) / field(&h, &bits, name);
        assert!((ratio - std::f64::consts::LN_2).abs() < 1e-15, "{name}");
    }
}

#[test]
fn gaussian_json_is_one_object() {
    let out = run(&["gaussian", "--snr", "0.5", "--c0", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["best"].as_f64().unwrap(), HALF_LN_2);
}

#[test]
fn flag_errors_exit_2() {
    for args in [
        &["gaussian", "--c0", "0.1"][..],
        &["gaussian", "--snr", "0.5", "--power", "1", "--noise", "1", "--c0", "0.1"],
        &["gaussian", "--power", "1", "--c0", "0.1"],
        &["gaussian", "--snr", "-1", "--c0", "0.1"],
        &["gaussian", "--snr", "0.5", "--c0", "-0.1"],
        &["gaussian", "--snr", "nan", "--c0", "0.1"],
        &["curves", "--figure", "3"],
        &["curves", "--figure", "2", "--points", "1"],
        &["verify", "--suite", "nope"],
        &["verify", "--suite", "mossel", "--p", "0.2", "--q", "0.5"],
        &["verify", "--t", "soon"],
        &["dmc", "--c0", "0.1"],
        &["bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verify"));
}

#[test]
fn dmc_bsc_without_relay_is_bsc_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "bsc.csv", "0.9,0.1\n0.1,0.9\n");
    let (h, r) = single_row(&run(&["dmc", "--channel", &path, "--c0", "0"]));
    let hb = -0.1 * 0.1f64.ln() - 0.9 * 0.9f64.ln();
    assert!((field(&h, &r, "cor2") - (2f64.ln() - hb)).abs() < 1e-12);
    assert!((field(&h, &r, "alpha") - 1.8).abs() < 1e-15);
    assert!((field(&h, &r, "i_infinity") - 1.8f64.ln()).abs() < 1e-15);
    assert_eq!(r[h.iter().position(|c| c == "certified").unwrap()], "true");
    assert!((field(&h, &r, "p0") - 0.5).abs() < 1e-6);
}

#[test]
fn dmc_bsc_relay_gain_is_penalized() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "bsc.csv", "0.9,0.1\n0.1,0.9\n");
    let (h, r) = single_row(&run(&["dmc", "--channel", &path, "--c0", "0.05"]));
    assert!(field(&h, &r, "cor2") < field(&h, &r, "cutset"));
    assert!(field(&h, &r, "penalty") < 0.05);
}

#[test]
fn dmc_identical_rows_give_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "flat.csv", "0.3,0.7\n0.3,0.7\n0.3,0.7\n");
    let (h, r) = single_row(&run(&["dmc", "--channel", &path, "--c0", "0.2"]));
    for name in ["i_infinity", "cutset", "cor2", "penalty"] {
        assert!(field(&h, &r, name).abs() < 1e-15, "{name} = {}", field(&h, &r, name));
    }
}

#[test]
fn dmc_alpha_override_of_one_removes_the_relay_gain() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "bsc.csv", "0.9,0.1\n0.1,0.9\n");
    let (h, r) = single_row(&run(&["dmc", "--channel", &path, "--c0", "0.3", "--alpha", "1"]));
    let (_, base) = single_row(&run(&["dmc", "--channel", &path, "--c0", "0"]));
    assert_eq!(field(&h, &r, "alpha"), 1.0);
    assert_eq!(field(&h, &r, "penalty"), 0.0);
    assert!((field(&h, &r, "cor2") - field(&h, &base, "cor2")).abs() < 1e-12);
}

#[test]
fn dmc_malformed_channels_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["0.9,0.2\n0.1,0.9\n", "1.2,-0.2\n0.5,0.5\n", "0.5,0.5\n1\n", "x,y\n", ""].iter().enumerate() {
        let path = write_file(dir.path(), &format!("bad{i}.csv"), text);
        let out = run(&["dmc", "--channel", &path, "--c0", "0.1"]);
        assert_eq!(out.status.code(), Some(2), "{text:?}");
    }
    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["dmc", "--channel", missing.to_str().unwrap(), "--c0", "0.1"]).status.code(), Some(2));
}

#[test]
fn dmc_reads_channels_written_by_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let third = 1.0 / 3.0;
    let w = DiscreteChannel::new(vec![
        vec![0.7, 0.2, 0.1],
        vec![third, third, 1.0 - 2.0 * third],
        vec![0.0, 0.15, 0.85],
    ])
    .unwrap();
    let path = dir.path().join("w.csv");
    write_channel(&w, std::fs::File::create(&path).unwrap()).unwrap();
    assert_eq!(read_channel_file(&path).unwrap(), w);
    let out = run(&["dmc", "--channel", path.to_str().unwrap(), "--c0", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn dmc_seed_flag_and_env_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "w.csv", "0.6,0.3,0.1\n0.1,0.2,0.7\n0.3,0.4,0.3\n0.25,0.25,0.5\n0.05,0.9,0.05\n");
    let flag = run(&["dmc", "--channel", &path, "--c0", "0.1", "--seed", "99"]);
    let env = bin().args(["dmc", "--channel", &path, "--c0", "0.1"]).env("RELAY_BOUNDS_SEED", "99").output().unwrap();
    assert_eq!(flag.status.code(), Some(0));
    assert_eq!(flag.stdout, env.stdout);
}

fn curve_rows(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = parse_csv(&stdout(&out));
    (h, rows.iter().map(|r| r.iter().map(|v| v.parse().unwrap()).collect()).collect())
}

#[test]
fn curves_figure_2_matches_closed_forms() {
    let (h, rows) = curve_rows(&["curves", "--figure", "2", "--snr", "0.5", "--c0-max", "0.27"]);
    assert_eq!(h, ["c0", "cutset", "relaxed", "lemma2", "lemma3", "lemma3_unclipped"]);
    assert_eq!(rows.len(), 512);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[511][0], 0.27);
    for r in &rows {
        let c0 = r[0];
        assert!((r[1] - HALF_LN_2.min(c0 + HALF_LN_1_5)).abs() <= 1e-12);
        assert!((r[5] - (0.5 * (2.0 * c0).ln_1p() + HALF_LN_1_5)).abs() <= 1e-12);
        assert!((r[4] - HALF_LN_2.min(r[5])).abs() <= 1e-12);
        assert!(r[3] <= r[2] + 1e-12 && r[2] <= r[1] + 1e-12);
    }
}

#[test]
fn curves_figure_1_matches_parametric_form() {
    let (h, rows) = curve_rows(&["curves", "--figure", "1", "--h1-max", "3"]);
    assert_eq!(h, ["h1", "h2_relaxed", "h2_lemma3"]);
    assert_eq!(rows.last().unwrap()[0], 3.0);
    for r in &rows {
        let (h1, thin, thick) = (r[0], r[1], r[2]);
        assert!((thin - (2.0 * h1 + (2.0 * h1).sqrt())).abs() <= 1e-12);
        assert!((thick - 0.5 * (2.0 * thick).ln_1p() - h1).abs() <= 1e-8);
        assert!(thick <= thin + 1e-12);
    }
}

#[test]
fn curves_two_points_are_the_endpoints() {
    let (_, rows) = curve_rows(&["curves", "--figure", "2", "--c0-max", "0.27", "--points", "2"]);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [0.0, 0.27]);
    let (_, rows) = curve_rows(&["curves", "--figure", "1", "--h1-max", "3", "--points", "2"]);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [0.0, 3.0]);
}

#[test]
fn curves_output_file_and_write_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = run(&["curves", "--figure", "2", "--points", "16", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let direct = run(&["curves", "--figure", "2", "--points", "16"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);

    let bad = dir.path().join("no-such-dir").join("x.csv");
    assert_eq!(run(&["curves", "--figure", "2", "-o", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn curves_are_byte_identical_across_runs() {
    let args = ["curves", "--figure", "1", "--h1-max", "3", "--points", "257"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn verify_borell_at_critical_time_is_an_equality() {
    let out = run(&["verify", "--suite", "borell-exp", "--t", "critical"]);
    assert_eq!(out.status.code(), Some(0));
    let records = json_lines(&out);
    assert_eq!(records.len(), 100);
    for r in &records {
        assert!(r["margin"].as_f64().unwrap().abs() <= 1e-12, "{r}");
        assert_eq!(r["instance"]["t"], r["instance"]["critical_t"]);
    }
}

#[test]
fn verify_mossel_equal_indices_at_time_zero() {
    let out = run(&["verify", "--suite", "mossel", "--n", "1", "--t", "0", "--p", "0.5", "--q", "0.5", "--count", "200"]);
    assert_eq!(out.status.code(), Some(0));
    for r in json_lines(&out) {
        assert_eq!(r["instance"]["factors"].as_array().unwrap().len(), 1);
        assert!(r["margin"].as_f64().unwrap().abs() <= 1e-12);
        assert_eq!(r["pass"], true);
    }
}

#[test]
fn verify_default_run_passes_and_reports_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let out = run(&["verify", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stderr).unwrap();
    for name in ["mossel", "mossel-log", "jensen", "borell-exp", "lemma4", "quantizer"] {
        assert!(summary.lines().any(|l| l.starts_with(&format!("{name}: "))), "{name}");
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10_000 + 10_000 + 1_000 + 100 + 200 + 50);
}

#[test]
fn verify_is_deterministic_and_seeded() {
    let args = ["verify", "--suite", "mossel", "--count", "40"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let seeded = bin().args(args).env("RELAY_BOUNDS_SEED", "7").output().unwrap();
    let flagged = run(&["verify", "--suite", "mossel", "--count", "40", "--seed", "7"]);
    assert_eq!(seeded.stdout, flagged.stdout);
    assert_ne!(seeded.stdout, a.stdout);
}
