use std::process::{Command, Output};

fn ksemi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksemi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn oracle_prints_the_exact_mean() {
    let o = ksemi(&["oracle", "--n", "4", "--k", "1", "--property", "mindeg1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2.5");

    let o = ksemi(&["oracle", "--n", "4", "--k", "1", "--property", "mindeg1", "--distribution"]);
    let text = stdout(&o);
    assert!(text.contains("exact: 5/2"), "{text}");
    assert!(text.contains("P(H = 1) = 0\n"), "{text}");
}

#[test]
fn bad_arguments_exit_one() {
    let o = ksemi(&["simulate", "--property", "pm", "--n", "0", "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    assert_eq!(ksemi(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(ksemi(&["simulate", "--property", "pm", "--n", "7", "--k", "1"]).status.code(), Some(1));
    assert_eq!(ksemi(&["ode-table", "--property", "mindeg", "--k-range", "5..1"]).status.code(), Some(1));
    assert_eq!(ksemi(&["oracle", "--n", "3", "--k", "1", "--property", "ham"]).status.code(), Some(1));
}

#[test]
fn help_lists_the_subcommands_and_flags() {
    let o = ksemi(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for word in ["ode-table", "simulate", "compare", "oracle", "dominance", "--threads", "--verbose"] {
        assert!(text.contains(word), "missing {word}");
    }
    let text = stdout(&ksemi(&["simulate", "--help"]));
    for word in ["--property", "--strategy", "--n", "--k", "--trials", "--seed", "--threshold", "--tie-break", "--validate"] {
        assert!(text.contains(word), "missing {word}");
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn ode_table_reproduces_min_degree_constants() {
    let o = ksemi(&["ode-table", "--property", "mindeg"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 26);
    assert_eq!(lines[0], "property,k,l,constant,kind");
    let find = |k: &str, l: &str| -> f64 {
        lines[1..]
            .iter()
            .map(|r| r.split(',').collect::<Vec<_>>())
            .find(|f| f[1] == k && f[2] == l)
            .map(|f| f[3].parse().unwrap())
            .unwrap()
    };
    assert!((find("1", "1") - 0.69315).abs() < 5e-6);
    assert!((find("3", "2") - 1.09081).abs() < 5e-6);
    assert!((find("5", "5") - 2.55947).abs() < 5e-6);
}

#[test]
fn ode_table_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pm.json");
    let o = ksemi(&["ode-table", "--property", "pm", "--k-range", "1..2", "--format", "json", "-o", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn print_config_shows_the_effective_spec() {
    let o = ksemi(&["--print-config", "simulate", "--property", "ham", "--n", "50", "--k", "2", "--seed", "9"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 50);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["strategy"], "hamilton");
}

#[test]
fn simulate_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = ksemi(&["simulate", "--property", "mindeg2", "--n", "200", "--k", "2", "--trials", "3", "-o", csv.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mean H/n"));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 4);

    let json = dir.path().join("r.json");
    let o = ksemi(&["compare", "--property", "pm", "--n", "400", "--k", "2", "--trials", "2", "-o", json.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("sup-distance"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["ode"].is_object());
    assert_eq!(v["summary"]["records"].as_array().unwrap().len(), 2);
}

#[test]
fn same_seed_same_output_across_thread_counts() {
    let args = ["simulate", "--property", "ham", "--n", "300", "--k", "3", "--trials", "6", "--seed", "4"];
    let one = ksemi(&[&["--threads", "1"], &args[..]].concat());
    let four = ksemi(&[&["--threads", "4"], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn dominance_reports_a_p_value() {
    let o = ksemi(&["dominance", "--property", "mindeg1", "--n", "300", "--k", "2", "--trials", "20", "--baseline", "uniform_circle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("one-sided p-value"));
}
