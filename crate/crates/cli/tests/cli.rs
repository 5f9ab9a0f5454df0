use bernlog::report::{read_csv, to_csv_string, BoundRow, DistributionRow};
use bernlog_cli::{run_from_args, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> bernlog_cli::Output {
    run_from_args(std::iter::once("bernlog").chain(args.iter().copied()))
}

fn bound_rows(args: &[&str]) -> Vec<BoundRow> {
    let out = run(args);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    read_csv(out.stdout.as_bytes()).unwrap()
}

#[test]
fn bounds_table_for_tiny_probabilities() {
    let rows = bound_rows(&["bounds", "--probs-log-const", "-100", "--n", "100", "--t", "50"]);
    let methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(methods, ["new", "hoeffding", "classical_bernstein"]);
    assert!((rows[0].bound - 4.807389528390284e-4).abs() < 1e-15);
    assert!((rows[1].bound - 1.9900249583853646).abs() < 1e-12);
    assert!((rows[2].bound - 0.9447331054820294).abs() < 1e-12);
    assert!(rows[1].trivial_flag);
    assert!(!rows[0].trivial_flag);
}

#[test]
fn bounds_csv_round_trips_byte_for_byte() {
    let out = run(&["bounds", "--probs", "0.5,0.2,0.9", "--t", "0.1,0.5,2"]);
    let rows: Vec<BoundRow> = read_csv(out.stdout.as_bytes()).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(to_csv_string(&rows).unwrap(), out.stdout);
}

#[test]
fn bounds_json_matches_csv() {
    let csv = bound_rows(&["bounds", "--probs-const", "0.5", "--n", "100", "--t", "5"]);
    let out = run(&["bounds", "--probs-const", "0.5", "--n", "100", "--t", "5", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    for (row, value) in csv.iter().zip(arr) {
        assert_eq!(value["method"], row.method.as_str());
        assert_eq!(value["bound"].as_f64().unwrap(), row.bound);
    }
}

#[test]
fn grouped_and_multinoulli_bounds() {
    let grouped = bound_rows(&["bounds", "--grouped", "[[0.2,0.8],[0.5]]", "--t", "1"]);
    assert_eq!(grouped.len(), 1);
    assert_eq!(grouped[0].method, "grouped");
    assert_eq!(grouped[0].n, 3);

    let rows: Vec<String> = (0..100).map(|_| "[0.5,0.5]".to_string()).collect();
    let spec = format!("[{}]", rows.join(","));
    let multi = bound_rows(&["bounds", "--multinoulli", &spec, "--t", "50"]);
    assert_eq!(multi[0].epsilon, Some(0.5));
    assert!((multi[0].bound - 0.3283399944955952).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bounds", "--probs", "0.5"][..],
        &["bounds", "--probs", "1.5", "--t", "1"],
        &["bounds", "--probs", "0.5", "--t", "-1"],
        &["bounds", "--probs-const", "0.5", "--t", "1"],
        &["bounds", "--probs", "0.5", "--probs-const", "0.5", "--n", "2", "--t", "1"],
        &["bounds", "--multinoulli", "[[0.5,0.4]]", "--t", "1"],
        &["bounds", "--input", "/nonexistent/ensemble.json", "--t", "1"],
        &["no-such-command"],
    ] {
        let out = run(args);
        assert_eq!(out.code, EXIT_USAGE, "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn ensemble_file_input() {
    let dir = std::env::temp_dir().join(format!("bernlog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ensemble.json");
    std::fs::write(&path, r#"{"bernoulli": [0.5, 0.5]}"#).unwrap();
    let rows = bound_rows(&["bounds", "--input", path.to_str().unwrap(), "--t", "0.5"]);
    assert!((rows[0].bound - 1.902458849001428).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_passes_on_examples_and_random_ensembles() {
    let out = run(&["verify", "--probs", "0.5,0.5"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.lines().nth(1).unwrap().ends_with(",true"));

    let out = run(&["verify", "--grouped", "[[0.2,0.8],[0.5]]"]);
    assert_eq!(out.code, EXIT_OK);

    let out = run(&["verify", "--random", "30", "--max-n", "8", "--seed", "3"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    // one header plus 30 of each ensemble kind
    assert_eq!(out.stdout.lines().count(), 91);
    assert!(out.stderr.starts_with("pass"));
}

#[test]
fn exact_distribution_of_half_pair() {
    let out = run(&["exact", "--probs", "0.5,0.5"]);
    let rows: Vec<DistributionRow> = read_csv(out.stdout.as_bytes()).unwrap();
    let masses: Vec<f64> = rows.iter().map(|r| r.mass).collect();
    assert_eq!(masses, [0.25, 0.5, 0.25]);
    assert!((rows[2].value - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn chernoff_reports_numeric_and_closed_form() {
    let out = run(&["chernoff", "--n", "100", "--t", "50"]);
    assert_eq!(out.code, EXIT_OK);
    let line = out.stdout.lines().nth(1).unwrap();
    let fields: Vec<f64> = line.split(',').filter_map(|f| f.parse().ok()).collect();
    // n, t, lambda_star, objective, closed-form lambda, closed-form objective
    assert!((fields[2] + 1.0 - 0.5f64.sqrt()).abs() < 1e-8);
    assert!((fields[4] + 1.0 / 3.0).abs() < 1e-15);
    assert!(fields[3] < fields[5]);
}

#[test]
fn boundary_scan_verdicts() {
    let out = run(&["mgf-scan", "--lambda=-1.5,-1,0.5", "--p-grid-log", "-12:-1:12", "--boundary"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 1 + 36);
    assert!(out.stderr.contains("lambda -1.5: Diverges"));
    assert!(out.stderr.contains("lambda -1: Converges"));
    assert!(out.stderr.contains("lambda 0.5: Converges"));
}

#[test]
fn moments_condition_holds() {
    let out = run(&["moments", "--m-max", "40", "--grid", "100"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--probs", "0.5,0.5", "--t", "0.5", "--replicates", "20000", "--seed", "9"];
    let a = run(&args);
    let b = run(&[&args[..], &["--workers", "3"]].concat());
    let ja: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    let jb: serde_json::Value = serde_json::from_str(&b.stdout).unwrap();
    assert_eq!(ja["estimate"]["hits"], jb["estimate"]["hits"]);
    assert_eq!(ja["seed"], 9);
    assert!(ja["bounds"].as_array().unwrap().len() >= 3);
}
