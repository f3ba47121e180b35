use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rank1det"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not one JSON document ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn verify_exact_suite() {
    let out = run(&[
        "verify", "--seed", "42", "--trials", "1000", "--max-n", "8", "--kind", "q",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["trials"], 1000);
    assert_eq!(v["dims"].as_array().unwrap().len(), 1000);
    let paths = v["paths_used"].as_object().unwrap();
    assert_eq!(
        paths.values().map(|c| c.as_u64().unwrap()).sum::<u64>(),
        1000
    );
    // integer instances hit exactly-zero factors now and then
    assert!(paths.contains_key("fallback") && paths.contains_key("divided"));
}

#[test]
fn verify_is_deterministic_except_clock() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_s");
        v
    };
    let a = strip(json(&run(&[
        "verify", "--seed", "3", "--trials", "40", "--kind", "f64",
    ])));
    let b = strip(json(&run(&[
        "verify", "--seed", "3", "--trials", "40", "--kind", "f64",
    ])));
    assert_eq!(a, b);
    assert_eq!(a["mismatches"], 0);
}

#[test]
fn verify_usage_errors() {
    assert_eq!(run(&["verify", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--kind", "c64"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--max-n", "13"]).status.code(), Some(2));
    let out = run(&["verify", "--max-n", "0", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["dims"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d == 0));
}

#[test]
fn erratum_builtin_demo() {
    let out = run(&["erratum", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["corrected"], "11");
    assert_eq!(v["erroneous"], "-192/35");
    assert_eq!(v["dense"], "11");
    assert_eq!(v["agree_corrected_dense"], true);
    assert_eq!(v["agree_erroneous_dense"], false);
    assert_eq!(v["instance"]["x"], serde_json::json!(["5", "7"]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("-192/35"));
}

#[test]
fn erratum_from_files() {
    let f = temp_file("rank1 3 q\nx: 2 3 4\na: 0 0 0\nb: 1 -5 7\n");
    let v = json(&run(&["erratum", f.path().to_str().unwrap()]));
    assert_eq!(
        (&v["corrected"], &v["erroneous"], &v["dense"]),
        (&"24".into(), &"24".into(), &"24".into())
    );

    let f = temp_file("rank1 2 q\nx: 0 7\na: 1 2\nb: 3 4\n");
    let out = run(&["erratum", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["erroneous"], "undefined (division by zero)");
    assert_eq!(v["corrected"], v["dense"]);

    let f = temp_file("rank1 2 f64\nx: 5.0 7.0\na: 1 2\nb: 3 4\n");
    let v = json(&run(&["erratum", f.path().to_str().unwrap()]));
    assert_eq!(v["agree_corrected_dense"], true);
    assert_eq!(v["agree_erroneous_dense"], false);
}

#[test]
fn erratum_parse_error_reports_position() {
    let f = temp_file("rank1 2 q\nx: 5 7\na: 1 two\nb: 3 4\n");
    let out = run(&["erratum", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 6"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn fscheck_examples() {
    let out = run(&[
        "fscheck", "--n", "1", "--points", "1", "--step", "1e-4", "--seed", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let c = v["reports"][0]["estimated_constant"].as_f64().unwrap();
    assert!((c - 2.0).abs() < 1e-6);

    let out = run(&[
        "fscheck", "--n", "2", "--points", "5", "--step", "1e-4", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 5);
    assert_eq!(
        v["reports"][0]["point"]["z"],
        serde_json::json!(["0.0+0.0i", "0.0+0.0i"])
    );
    for r in v["reports"].as_array().unwrap() {
        assert!((r["estimated_constant"].as_f64().unwrap() - 3.0).abs() < 1e-4);
    }
    assert_eq!(v["summary"]["pass"], true);
}

#[test]
fn fscheck_usage_errors() {
    assert_eq!(run(&["fscheck", "--step", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fscheck", "--step", "-1e-3"]).status.code(), Some(2));
    assert_eq!(run(&["fscheck", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fscheck", "--points", "0"]).status.code(), Some(2));
}

#[test]
fn fscheck_point_file() {
    let f = temp_file("chart 2\n0.3+0i 0.7-0.2i\n");
    let out = run(&["fscheck", "--point", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 2);
    assert!(v["summary"]["max_abs_deviation"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn fscheck_tiny_step_fails_check() {
    // cancellation error ~ eps / h^2 dwarfs the 100 h^2 threshold
    let f = temp_file("chart 1\n0.5+0.5i\n");
    let out = run(&[
        "fscheck",
        "--point",
        f.path().to_str().unwrap(),
        "--step",
        "1e-7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["summary"]["pass"], false);
    assert!(v["summary"]["max_abs_deviation"].as_f64().unwrap() > v["threshold"].as_f64().unwrap());
}

#[test]
fn bench_small_sizes() {
    let out = run(&["bench", "--sizes", "1,16,64", "--repeats", "3", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for e in entries {
        assert!(e["structured_median_s"].as_f64().unwrap() > 0.0);
        assert!(e["dense_median_s"].as_f64().unwrap() > 0.0);
        assert!(e["abs_diff"].as_f64().unwrap() <= 1e-6);
    }
    assert!(v["checksum"].as_f64().unwrap().is_finite());
}

#[test]
fn bench_speedup_grows_with_n() {
    let v = json(&run(&["bench", "--sizes", "64,256,1024", "--repeats", "5"]));
    let speedups: Vec<f64> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["speedup"].as_f64().unwrap())
        .collect();
    assert!(speedups[2] > speedups[0], "{speedups:?}");
}

#[test]
fn bench_rejects_zero_size() {
    assert_eq!(run(&["bench", "--sizes", "0,4"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--repeats", "0"]).status.code(), Some(2));
}

#[test]
fn det_reads_both_formats() {
    let f = temp_file("dense 2 q\n3 4\n6 7\n");
    let v = json(&run(&["det", f.path().to_str().unwrap()]));
    assert_eq!(v["dense"], "-3");
    assert!(v.get("rank1").is_none());

    let f = temp_file("dense 2 qi\n1+1i 0+0i\n0+0i 1-1i\n");
    assert_eq!(
        json(&run(&["det", f.path().to_str().unwrap()]))["dense"],
        "2+0i"
    );

    let f = temp_file("rank1 2 q\nx: 3 7\na: 1 2\nb: 3 4\n");
    let v = json(&run(&["det", f.path().to_str().unwrap()]));
    assert_eq!(v["dense"], "-3");
    assert_eq!(v["rank1"]["corrected"], "-3");
    assert_eq!(v["rank1"]["corrected_path"], "fallback");
    assert_eq!(v["rank1"]["expansion"], "-3");

    let out = run(&["det", "/nonexistent/file"]);
    assert_eq!(out.status.code(), Some(2));
}
