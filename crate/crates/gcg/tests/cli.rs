use std::process::{Command, Output};

fn gcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcg"))
        .args(args)
        .env("RUST_LOG", "off")
        .env_remove("GCG_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn passing_suite_exits_zero_with_json_report() {
    let o = gcg(&["verify", "--suite", "mc,tripods", "--g", "2", "--V", "2", "--E", "2", "--D", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["failed"], 0);
    assert!(v["total"].as_u64().unwrap() > 0);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "--suite", "nonsense"][..],
        &["verify", "--suite", "mc", "--g", "2", "--tadpoles"],
        &["verify", "--suite", "center", "--g", "1"],
        &["verify", "--suite", "mc", "--jobs", "0"],
        &["table", "--kind", "rg", "--g", "2", "--nonframed"],
    ] {
        let o = gcg(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    let base = ["verify", "--suite", "d-squared,jacobi", "--g", "2", "--V", "2", "--E", "3", "--D", "3"];
    let one = gcg(&[&base[..], &["--jobs", "1"]].concat());
    let four = gcg(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn t11_table_csv() {
    let o = gcg(&["table", "--kind", "tg", "--g", "1", "--n", "1", "--max-weight", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let quotient: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().to_string())
        .collect();
    assert_eq!(quotient, ["2", "1", "0", "0", "0"]);
}

#[test]
fn tripod_basis_in_genus_two() {
    let o = gcg(&["basis", "--degree", "0", "--g", "2", "--V", "1", "--E", "0", "--D", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let tripods = rows.iter().filter(|r| !r.contains(".w")).count();
    assert_eq!(tripods, 4, "{text}");
    assert!(rows.iter().any(|r| r.contains("G1[0.a1 0.a2 0.b1]")));
}

#[test]
fn empty_truncation_gives_empty_matrix() {
    let o = gcg(&["diff", "--degree", "5", "--g", "1", "--V", "1", "--E", "0", "--D", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"], 0);
    assert_eq!(v["cols"], 0);
    let csv = gcg(&["diff", "--degree", "5", "--g", "1", "--V", "1", "--E", "0", "--D", "0", "--format", "csv"]);
    assert_eq!(stdout(&csv), "row,col,value\n");
}

#[test]
fn nonframed_grt_table() {
    let o = gcg(&["table", "--kind", "rg", "--g", "1", "--nonframed", "--max-weight", "6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,variant,weight,dim_z,dim_b,dim_r"));
    let dim_b: Vec<&str> = lines.map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(dim_b, ["0"; 7]);
}

#[test]
fn cache_dir_receives_tables_and_is_reused() {
    let dir = std::env::temp_dir().join(format!("gcg-cache-test-{}", std::process::id()));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gcg"))
            .args(["table", "--kind", "tg", "--g", "2", "--n", "2", "--max-weight", "3"])
            .env("RUST_LOG", "off")
            .env("GCG_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_written_to_file() {
    let path = std::env::temp_dir().join(format!("gcg-report-{}.csv", std::process::id()));
    let o = gcg(&["verify", "--suite", "mc", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("suite,instance,anchor,identity,passed,detail\n"));
    assert!(text.contains("gc.z.maurer-cartan"));
    std::fs::remove_file(&path).unwrap();
}
