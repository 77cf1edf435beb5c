use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cubeproc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn example(name: &str, n: &str) -> String {
    let out = run(&["examples", "--name", name, "--n", n], None);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn analyze_intro() {
    let proc = example("intro", "2");
    let out = run(&["analyze", "--kappa", "2"], Some(&proc));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "ok");
    assert_eq!(v["results"]["eta_star_lines"], "1/4");
    assert_eq!(v["results"]["base_rate"], "1/2");
}

#[test]
fn extract_then_verify() {
    let proc = example("intro-restricted", "3");
    let args = ["extract", "--mode", "lines", "--epsilon", "1/4", "--sigma", "1/96", "--allow-small-n"];
    let out = run(&args, Some(&proc));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["results"]["beta"], "3");
    let again = run(&args, Some(&proc));
    assert_eq!(String::from_utf8(again.stdout).unwrap(), report);

    assert_eq!(run(&["verify"], Some(&report)).status.code(), Some(0));
    let mut t: Value = serde_json::from_str(&report).unwrap();
    t["transcript"]["checks"][2]["lhs"] = Value::from("0/1");
    let tampered = t.to_string();
    assert_eq!(run(&["verify"], Some(&tampered)).status.code(), Some(1));
}

#[test]
fn independent_exits_pseudorandom() {
    let proc = example("independent", "3");
    let out = run(&["extract", "--mode", "lines", "--epsilon", "1/2", "--sigma", "1/96"], Some(&proc));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["outcome"], "pseudorandom");
}

#[test]
fn invalid_parameters_are_named() {
    let proc = example("intro-restricted", "3");
    let out =
        run(&["extract", "--mode", "lines", "--epsilon", "9/10", "--sigma", "1/96", "--allow-small-n"], Some(&proc));
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].as_str().unwrap().contains("epsilon_upper"));
    let out = run(&["analyze"], Some("{not json"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn text_output() {
    let out = run(&["--format", "text", "sep"], Some("[[2,1],[1,2],[1,1]]"));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("outcome: ok"), "{text}");
}
