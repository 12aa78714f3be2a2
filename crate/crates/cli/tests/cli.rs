//! End-to-end tests of the `weightlab` binary: exit codes, report bytes,
//! and the file/flag config equivalence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn weightlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weightlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const HEADER: &str = "analysis,weight,scale,id,value,value2,witness_lo,witness_hi,depth,panels,floor,verdict";

#[test]
fn run_writes_a_csv_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let cfg = write_config(
        dir.path(),
        "exp.cfg",
        &format!(
            "# smoke experiment\nweight=expsin:1:1\nwindow=-2,2\ncells=4096\n\
             scales=0.05,0.4,4\nmax_positions=128\nanalyses=masses,bmo,mitsis,doubling\n\
             out={}\n",
            out.display()
        ),
    );
    let res = weightlab(&["run", &cfg]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let report = fs::read_to_string(&out).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some(HEADER));
    // masses(3) + bmo(1) + mitsis(4 scales) + doubling(1)
    assert_eq!(lines.count(), 9);
    assert!(report.contains("expsin:1:1"));
}

#[test]
fn identical_runs_produce_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let body = "weight=martingale:7:10:0.4:0.9\nwindow=-2,2\ncells=4096\n\
                scales=0.05,0.4,3\nmax_positions=128\nanalyses=masses,vmo,eta\nout=";
    let cfg_a =
        write_config(dir.path(), "a.cfg", &format!("{body}{}\n", out_a.display()));
    let cfg_b =
        write_config(dir.path(), "b.cfg", &format!("{body}{}\n", out_b.display()));
    assert!(weightlab(&["run", &cfg_a]).status.success());
    assert!(weightlab(&["run", &cfg_b]).status.success());
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn config_errors_exit_2_with_a_located_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        "weight=gauss:1\nwindow=-2,2\ncells=4096\nanalyses=bmo\n",
    );
    let res = weightlab(&["run", &cfg]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
    assert!(stderr.contains("gauss"), "stderr: {stderr}");
}

#[test]
fn analysis_failures_exit_3_but_still_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    // the largest scale cannot fit the decomposition's probe box inside
    // the window, so that analysis fails while the others complete
    let cfg = write_config(
        dir.path(),
        "exp.cfg",
        &format!(
            "weight=constant:1\nwindow=-1,1\ncells=4096\nscales=0.5,1.9,2\n\
             analyses=decomposition:4,masses\nout={}\n",
            out.display()
        ),
    );
    let res = weightlab(&["run", &cfg]);
    assert_eq!(res.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("decomposition:4"), "stderr: {stderr}");
    let report = fs::read_to_string(&out).unwrap();
    assert!(report.contains(",error"), "error row present: {report}");
    assert!(report.contains("mass"), "later analyses still ran: {report}");
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.cfg",
        "weight=constant:1\nwindow=-1,1\ncells=16\nanalyses=masses\n\
         out=/nonexistent-weightlab-dir/report.csv\n",
    );
    let res = weightlab(&["run", &cfg]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn missing_config_file_exits_4() {
    let res = weightlab(&["run", "/nonexistent-weightlab.cfg"]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn families_lists_every_builtin() {
    let res = weightlab(&["families"]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    for name in ["constant", "power", "expsin", "step", "martingale", "sampled"] {
        assert!(stdout.contains(name), "missing {name}: {stdout}");
    }
}

#[test]
fn analyze_flags_match_an_equivalent_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("file.csv");
    let out_flag = dir.path().join("flag.csv");
    let cfg = write_config(
        dir.path(),
        "exp.cfg",
        &format!(
            "weight=step:0:1:2\nwindow=-2,2\ncells=4096\nscales=0.05,0.4,3\n\
             max_positions=128\nanalyses=masses,sarason,ap:2\nout={}\n",
            out_file.display()
        ),
    );
    assert!(weightlab(&["run", &cfg]).status.success());
    let res = weightlab(&[
        "analyze",
        "--weight", "step:0:1:2",
        "--window", "-2,2",
        "--cells", "4096",
        "--scales", "0.05,0.4,3",
        "--max-positions", "128",
        "--analyses", "masses,sarason,ap:2",
        "--out", out_flag.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(fs::read(&out_file).unwrap(), fs::read(&out_flag).unwrap());
}

#[test]
fn analyze_validates_like_the_file_parser() {
    let res = weightlab(&[
        "analyze",
        "--weight", "power:0:-1.5",
        "--window", "-2,2",
        "--cells", "4096",
        "--analyses", "bmo",
    ]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("-1"), "explains the exponent bound: {stderr}");
}

#[test]
fn json_reports_parse_as_an_array_of_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = write_config(
        dir.path(),
        "exp.cfg",
        &format!(
            "weight=power:0:1\nwindow=-2,2\ncells=4096\nscales=0.05,0.4,3\n\
             max_positions=128\nanalyses=masses,mitsis\nformat=json\nout={}\n",
            out.display()
        ),
    );
    assert!(weightlab(&["run", &cfg]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().expect("top level is an array");
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["analysis"], "masses");
    assert_eq!(rows[0]["id"], "mass");
    assert!(rows[0]["scale"].is_null());
    assert!(rows[3]["value"].is_number());
}

#[test]
fn stdout_reports_carry_the_same_header() {
    let res = weightlab(&[
        "analyze",
        "--weight", "constant:2",
        "--window", "0,1",
        "--cells", "16",
        "--analyses", "masses",
    ]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert_eq!(stdout.lines().next(), Some(HEADER));
    assert!(stdout.contains("mass,2"), "stdout: {stdout}");
}
