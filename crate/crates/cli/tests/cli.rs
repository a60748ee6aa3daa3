use std::path::PathBuf;
use std::process::{Command, Output};

use lo_core::behavior::Behavior;
use lo_core::boxes::pr_box;
use lo_core::dgp::gyni_instance;
use lo_core::graph::OrthogonalityGraph;
use lo_core::inequality::LoInequality;
use lo_core::rational::rat;
use lo_core::scenario::{Event, Scenario};
use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../core/fixtures");
    p.push(name);
    p.display().to_string()
}

fn lo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lo"))
        .args(args)
        .env_remove("LO_CACHE_DIR")
        .output()
        .expect("run lo")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "lo failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn graph_counts_and_text_output() {
    assert_eq!(
        stdout(&lo(&["graph", "--scenario", "2,2,2"])),
        "vertices=16 edges=56\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let p = path.to_str().unwrap();
    stdout(&lo(&["graph", "--scenario", "2,2,2", "--dot", p]));
    let g = OrthogonalityGraph::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((g.order(), g.edge_count()), (16, 56));
}

#[test]
fn nsmax_of_gyni_with_witness_box() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = lo(&[
        "nsmax",
        "--scenario",
        "3,2,2",
        "--ineq",
        &fixture("gyni.txt"),
        "--witness",
        path.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&out), "4/3\n");
    let b = Behavior::from_json_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(b.is_no_signaling());
    let gyni =
        LoInequality::from_text(&std::fs::read_to_string(fixture("gyni.txt")).unwrap(), None)
            .unwrap();
    assert_eq!(gyni.evaluate(&b).unwrap(), rat(4, 3));
}

#[test]
fn nsmax_rejects_wrong_scenario() {
    let out = lo(&[
        "nsmax",
        "--scenario",
        "4,2,2",
        "--ineq",
        &fixture("gyni.txt"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_pr_squared() {
    let out = lo(&[
        "eval",
        "--box",
        "pr",
        "--copies",
        "2",
        "--ineq",
        &fixture("five_event.txt"),
    ]);
    assert_eq!(stdout(&out), "5/4\n");
}

#[test]
fn eval_behavior_file_and_fig4_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pr.json");
    std::fs::write(&path, pr_box().to_json_string()).unwrap();
    let five = fixture("five_event.txt");
    let out = lo(&[
        "eval",
        "--box",
        path.to_str().unwrap(),
        "--copies",
        "2",
        "--ineq",
        &five,
    ]);
    assert_eq!(stdout(&out), "5/4\n");
    let out = lo(&[
        "eval", "--box", "fig4:1,0", "--copies", "2", "--ineq", &five,
    ]);
    assert_eq!(stdout(&out), "5/4\n");
}

#[test]
fn threshold_of_ten_event_inequality() {
    let text = stdout(&lo(&[
        "threshold",
        "--ineq",
        &fixture("ten_event.txt"),
        "--copies",
        "2",
    ]));
    let mut lines = text.lines();
    let bracket = lines.next().unwrap();
    assert!(
        bracket.starts_with('[') && bracket.ends_with(']'),
        "{bracket}"
    );
    let q: f64 = lines.next().unwrap().parse().unwrap();
    assert!((q - 0.7208).abs() < 1e-3, "{q}");
}

#[test]
fn threshold_without_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.txt");
    std::fs::write(&path, "# scenario 2,2,2\n00|00\n01|00\n10|00\n11|00\n").unwrap();
    let text = stdout(&lo(&[
        "threshold",
        "--ineq",
        path.to_str().unwrap(),
        "--copies",
        "1",
    ]));
    assert!(text.starts_with("no violation"), "{text}");
}

#[test]
fn cliques_of_bipartite_graph() {
    let text = stdout(&lo(&["cliques", "--scenario", "2,2,2", "--sorted"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().all(|l| l.split(',').count() == 4));
    let s = Scenario::new(2, 2, 2).unwrap();
    let ids: Vec<Vec<usize>> = lines
        .iter()
        .map(|l| {
            l.split(',')
                .map(|e| s.event_index(&e.parse::<Event>().unwrap()).unwrap())
                .collect()
        })
        .collect();
    assert!(ids.iter().all(|c| c.windows(2).all(|w| w[0] < w[1])));
    assert!(ids.windows(2).all(|w| w[0] < w[1]));

    let text = stdout(&lo(&["cliques", "--scenario", "2,2,2", "--limit", "3"]));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn cliques_on_pr_support() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pr.json");
    std::fs::write(&path, pr_box().to_json_string()).unwrap();
    let text = stdout(&lo(&[
        "cliques",
        "--scenario",
        "2,2,2",
        "--support",
        path.to_str().unwrap(),
    ]));
    assert!(!text.is_empty());
    assert!(text.lines().all(|l| l.split(',').count() == 2), "{text}");
}

#[test]
fn classify_tripartite() {
    let text = stdout(&lo(&["classify", "--scenario", "3,2,2"]));
    assert_eq!(
        text.lines().last().unwrap(),
        "classes=2 nontrivial=1 trivial=1"
    );
    assert!(text.contains("nontrivial ns_max=4/3"));

    let text = stdout(&lo(&[
        "classify",
        "--scenario",
        "3,2,2",
        "--input",
        &fixture("gyni.txt"),
    ]));
    assert_eq!(
        text.lines().last().unwrap(),
        "classes=1 nontrivial=1 trivial=0"
    );
}

#[test]
fn dgp_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gyni.json");
    let json = serde_json::to_string(&gyni_instance(3).unwrap().to_json()).unwrap();
    std::fs::write(&path, json).unwrap();
    let text = stdout(&lo(&[
        "dgp",
        "--instance",
        path.to_str().unwrap(),
        "--classical-value",
    ]));
    assert!(text.contains("size=4 maximally_difficult=true"), "{text}");
    assert!(text.contains("classical_value=1/4"), "{text}");
}

#[test]
fn witness_search() {
    let text = stdout(&lo(&["witness", "--box", "pr", "--copies", "2"]));
    assert_eq!(text.lines().next(), Some("5/4"));
    assert_eq!(stdout(&lo(&["witness", "--box", "pr"])), "no violation\n");
}

#[test]
fn fig4_csv_grid() {
    let text = stdout(&lo(&[
        "fig4",
        "--ineq",
        &fixture("five_event.txt"),
        "--steps",
        "3",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "xi,gamma,value,violated");
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines.contains(&"1,0,5/4,true"), "{text}");
    assert!(lines.contains(&"0,0,5/16,false"), "{text}");
}

fn without_wall_time(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    assert!(v["wall_time"].is_f64());
    v.as_object_mut().unwrap().remove("wall_time");
    v
}

#[test]
fn json_reports_are_reproducible() {
    let args = [
        "--json",
        "eval",
        "--box",
        "noisy:4/5",
        "--copies",
        "2",
        "--ineq",
        &fixture("ten_event.txt"),
    ];
    let a = without_wall_time(&stdout(&lo(&args)));
    let b = without_wall_time(&stdout(&lo(&args)));
    assert_eq!(a, b);
    assert_eq!(a["command"], "eval");
    assert_eq!(a["results"]["value"], "213/200");
    assert_eq!(a["results"]["violated"], true);
    assert_eq!(a["scenario"]["n"], 4);
    let digest = a["inputs"][fixture("ten_event.txt")].as_str().unwrap();
    assert_eq!(digest.len(), 64);

    let args = ["--json", "cliques", "--scenario", "2,2,2"];
    let a = without_wall_time(&stdout(&lo(&args)));
    let b = without_wall_time(&stdout(&lo(&args)));
    assert_eq!(a, b);
    assert_eq!(a["results"]["count"], 12);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&lo(&["graph", "--bogus"])), 2);
    assert_eq!(code(&lo(&["frobnicate"])), 2);
    assert_eq!(code(&lo(&["graph", "--scenario", "2,2"])), 2);
    assert_eq!(
        code(&lo(&[
            "eval",
            "--box",
            "noisy:2",
            "--ineq",
            &fixture("gyni.txt")
        ])),
        2
    );
    assert_eq!(
        code(&lo(&[
            "eval",
            "--box",
            "pr",
            "--ineq",
            "/nonexistent/file.txt"
        ])),
        2
    );
    assert_eq!(code(&lo(&["graph", "--scenario", "9,9,9"])), 3);
    assert_eq!(
        code(&lo(&["--threads", "1", "graph", "--scenario", "2,2,2"])),
        0
    );
}

#[test]
fn graph_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lo"))
            .args(["graph", "--scenario", "3,2,2"])
            .env("LO_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run()), "vertices=64 edges=1184\n");
    let cached = dir.path().join("graph-3-2-2.txt");
    assert!(cached.exists());
    assert_eq!(stdout(&run()), "vertices=64 edges=1184\n");
    std::fs::write(&cached, "garbage").unwrap();
    assert_eq!(stdout(&run()), "vertices=64 edges=1184\n");
}
