use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mollifier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn unreduced_point_is_a_usage_error() {
    let o = run(&["scan", "--kind", "U", "--alpha", "2/4", "--schedule", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not reduced"));
}

#[test]
fn bad_arguments_exit_two() {
    let o = run(&["scan", "--kind", "X", "--alpha", "1/3", "--schedule", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["scan", "--kind", "U", "--alpha", "1/3", "--schedule", "100,10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["jump", "--point", "0.3", "--n-max", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_sieve_is_a_capacity_error() {
    let o = run(&[
        "scan", "--kind", "V", "--alpha", "1/3", "--schedule", "1e3,1e5", "--sieve-limit", "1e4",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn u_vanishes_at_zero() {
    let o = run(&["scan", "--kind", "U", "--alpha", "0/1", "--schedule", "10,100,1000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,alpha,N,value,target,error"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(field(r, 3), 0.0);
    }
}

#[test]
fn w_scan_has_one_row_per_cutoff() {
    let o = run(&["scan", "--kind", "W", "--alpha", "1/3", "--schedule", "1e3,1e4,1e5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    // Error shrinks roughly like 1 / log N.
    let errs: Vec<f64> = text.lines().skip(1).map(|l| field(l, 5).abs()).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
}

#[test]
fn scan_without_target_leaves_columns_empty() {
    let o = run(&["scan", "--kind", "S", "--alpha", "golden", "--schedule", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.ends_with(",,"), "{row}");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "monitor", "--kind", "Tsum", "--random", "16", "--seed", "9", "--rational-grid", "6",
        "--n-max", "1e4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let scan = ["scan", "--kind", "V", "--alpha", "1/4", "--alpha", "sqrt2", "--schedule", "1e3,1e4"];
    assert_eq!(run(&scan).stdout, run(&scan).stdout);
}

#[test]
fn tsv_output() {
    let o = run(&["scan", "--kind", "U", "--alpha", "1/2", "--schedule", "10", "--format", "tsv"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("kind\talpha\tN\tvalue\ttarget\terror\n"));
}

#[test]
fn identities_hold_and_injected_failure_is_caught() {
    let o = run(&["identities", "--q-max", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("identity,q,chi_index,residual\n"));
    for name in ["lemma2", "orthogonality", "gauss_norm", "l0_even", "lemma1"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    let o = run(&["identities", "--q-max", "20", "--inject-failure"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn criterion_for_two_terms() {
    let o = run(&["criterion", "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with(
        "N,rhs_value,rhs_uncertainty,lhs_value,lhs_uncertainty,gap_to_one,weighted_mertens\n"
    ));
    let row = text.lines().nth(1).unwrap();
    assert!((field(row, 1) - 1.26066).abs() < 1e-4, "{row}");
}

#[test]
fn monitor_ceiling_breach_exits_one() {
    let o = run(&["monitor", "--kind", "Tsum", "--alpha", "1/3", "--n-max", "1e4", "--ceiling", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn jump_rows() {
    let o = run(&["jump", "--point", "1/3", "--eps", "1e-2,1e-3", "--n-max", "1e5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("a,q,eps,T_left,T_right,avg,T_at,conjectured_half_jump\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("mollifier-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("u.csv");
    let o = run(&[
        "scan", "--kind", "U", "--alpha", "1/2", "--schedule", "10", "-o", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("kind,"));
    std::fs::remove_dir_all(dir).ok();
}
