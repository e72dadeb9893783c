use std::io::Write;
use std::process::{Command, Output, Stdio};

const D3: &str = "dtr v1 n=3 mode=dag\nins 1 1 2 1 3\nins 3 3 2\ntr\nred 1 2\n";

fn dyntr(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dyntr"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_from_stdin_with_every_engine() {
    for engine in ["comb", "alg", "oracle"] {
        let o = dyntr(&["run", "--engine", engine, "--check"], D3);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "tr m=2\n1 3\n3 2\nred 1 2 1\n");
    }
}

#[test]
fn run_from_file_writes_stats() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d3.dtr");
    let stats = dir.path().join("stats.csv");
    std::fs::write(&input, D3).unwrap();
    let o = dyntr(&["run", input.to_str().unwrap(), "--stats", stats.to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(stats).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], dyntr::stream::CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,ins,3,2,comb,"));
    assert!(lines[2].starts_with("2,ins,3,3,comb,") && lines[2].ends_with(",2"));
}

#[test]
fn parse_error_exits_1() {
    let o = dyntr(&["run"], "dtr v1 n=3 mode=dag\nins 1 1 9\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn mode_flag_must_match_header() {
    assert_eq!(dyntr(&["run", "--mode", "dag"], D3).status.code(), Some(0));
    let o = dyntr(&["run", "--mode", "general"], D3);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mode=dag"));
}

#[test]
fn engine_error_exits_2() {
    let o = dyntr(&["run"], "dtr v1 n=3 mode=dag\nins 1 1 2\nins 2 2 1\ntr\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
    let o = dyntr(&["run"], "dtr v1 n=3 mode=dag\ndel 1 2\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_exits_2() {
    let o = dyntr(&["run", "/nonexistent/stream.dtr"], "");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(dyntr(&["run", "--engine", "fast"], D3).status.code(), Some(1));
    assert_eq!(dyntr(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(dyntr(&["--help"], "").status.code(), Some(0));
}

#[test]
fn general_stream() {
    let text = "dtr v1 n=3 mode=general\nins 1 1 2 2 1\nins 3 2 3 1 3\ntr\nred 1 3\n";
    for engine in ["comb", "alg", "oracle"] {
        let o = dyntr(&["run", "--engine", engine, "--check"], text);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "tr m=3\n1 2\n1 3\n2 1\nred 1 3 0\n");
    }
}

#[test]
fn bench_writes_one_row_per_update() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = dyntr(
        &["bench", "--n", "30", "--steps", "50", "--mode", "general", "--engine", "alg", "--seed", "7",
          "--out-csv", out.to_str().unwrap()],
        "",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().next(), Some(dyntr::stream::CSV_HEADER));
    assert!(csv.lines().skip(1).all(|l| l.contains(",alg,")));
    assert!(csv.lines().count() > 1);

    let o = dyntr(&["bench", "--n", "10", "--steps", "5"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with(dyntr::stream::CSV_HEADER));
}
