use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pdfa_synth_cli::RunManifest;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdfa-synth")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn learn_reports_unsafe_vanilla_and_safe_preprocess() {
    let dir = tempfile::tempdir().unwrap();
    let safety = format!("@{}", s(&data("charge_safety.ltl")));
    let demos = data("charge_demos.txt");
    let v = dir.path().join("v");
    let stdout = ok(&run(&[
        "learn", "--demos", s(&demos), "--safety", &safety, "--mode", "vanilla", "--alpha", "4", "--out", s(&v),
    ]));
    assert!(stdout.contains("states=2 UNSAFE"), "{stdout}");
    let cert = fs::read_to_string(v.join("certificate.txt")).unwrap();
    assert_eq!(cert, "UNSAFE\nwitness: {water} {charge}\n");
    for f in ["pdfa.txt", "pdfa.dot", "merge-log.txt", "manifest.json"] {
        assert!(v.join(f).exists(), "{f}");
    }

    let p = dir.path().join("p");
    let stdout = ok(&run(&[
        "learn", "--demos", s(&demos), "--safety", &safety, "--mode", "preprocess", "--alpha", "4", "--out", s(&p),
    ]));
    assert!(stdout.contains("SAFE"), "{stdout}");
    assert_eq!(fs::read_to_string(p.join("certificate.txt")).unwrap(), "SAFE\n");
}

#[test]
fn learn_rejects_non_positive_alpha() {
    let out = run(&["learn", "--demos", s(&data("charge_demos.txt")), "--alpha", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha must be positive"));
}

#[test]
fn synthesize_worked_example_writes_front_and_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&run(&[
        "synthesize",
        "--pdfa",
        s(&data("worked_example.pdfa")),
        "--game",
        s(&data("worked_example.game")),
        "--out",
        s(dir.path()),
    ]));
    assert!(stdout.contains("2 strategies"), "{stdout}");
    let front = fs::read_to_string(dir.path().join("front.csv")).unwrap();
    assert!(front.contains("\"(init,q0)\",5,10,0"), "{front}");
    let strat = fs::read_to_string(dir.path().join("strategy-0.txt")).unwrap();
    assert!(strat.lines().all(|l| l.starts_with("at ") && l.contains(" do ") && l.contains(" budget ")));
    let m = RunManifest::load(&dir.path().join("manifest.json")).unwrap();
    assert_eq!(m.inputs.len(), 2);
    for stage in ["product", "front", "strategies"] {
        assert!(m.stage_seconds(stage).is_some(), "{stage}");
    }
    assert!(m.outputs.iter().any(|a| a.path == "front.csv" && a.sha256.len() == 64));
}

#[test]
fn synthesize_selects_a_point_by_vector() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&run(&[
        "synthesize",
        "--pdfa",
        s(&data("worked_example.pdfa")),
        "--game",
        s(&data("worked_example.game")),
        "--point",
        "10,5,0",
        "--out",
        s(dir.path()),
    ]));
    assert!(stdout.contains("1 strategies"), "{stdout}");
    assert!(fs::read_to_string(dir.path().join("strategy-0.txt")).unwrap().contains("do a4"));
}

#[test]
fn unreachable_task_has_no_winning_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("g.game");
    fs::write(
        &game,
        "alphabet: o1\ndims: 1\ninitial s0\nstate s0 robot {}\nedge s0 stay s0 1\n",
    )
    .unwrap();
    let out = run(&[
        "synthesize",
        "--pdfa",
        s(&data("chain.pdfa")),
        "--game",
        s(&game),
        "--out",
        s(&dir.path().join("o")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no winning strategy"));
}

#[test]
fn simulate_fish_grid_completes_every_episode() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&run(&[
        "simulate",
        "--pdfa",
        s(&data("ship_fish_truth.pdfa")),
        "--grid",
        s(&data("fish_grid.toml")),
        "--episodes",
        "50",
        "--seed",
        "4",
        "--out",
        s(dir.path()),
    ]));
    assert_eq!(stdout.matches("completion 1.0000 dominance 1.0000").count(), 3, "{stdout}");
    assert!(dir.path().join("rollouts-0.csv").exists());

    let scripted = ok(&run(&[
        "simulate",
        "--pdfa",
        s(&data("ship_fish_truth.pdfa")),
        "--grid",
        s(&data("fish_grid.toml")),
        "--env",
        "greedy:1",
        "--point",
        "0",
        "--out",
        s(&dir.path().join("g")),
    ]));
    assert!(scripted.contains("completion 1.0000"), "{scripted}");
}

#[test]
fn simulate_rejects_zero_episodes() {
    let out = run(&[
        "simulate",
        "--pdfa",
        s(&data("chain.pdfa")),
        "--game",
        s(&data("chain.game")),
        "--episodes",
        "0",
    ]);
    assert!(!out.status.success());
}

#[test]
fn bench_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let go = |name: &str| {
        let out = dir.path().join(name);
        ok(&run(&[
            "bench",
            "--truth",
            s(&data("charge_truth.pdfa")),
            "--safety",
            &format!("@{}", s(&data("charge_safety.ltl"))),
            "--sizes",
            "0,5,50",
            "--seed",
            "11",
            "--out",
            s(&out),
        ]));
        fs::read_to_string(out.join("bench.csv")).unwrap()
    };
    let a = go("a");
    assert_eq!(a, go("b"));
    assert!(a.contains("skipped: empty sample"));
    for line in a.lines().filter(|l| l.starts_with("pre") || l.starts_with("post")) {
        assert!(line.contains(",SAFE,") || line.contains("skipped"), "{line}");
    }
}

#[test]
fn gridworld_export_and_safety_dfa() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&run(&["gridworld-export", "--grid", s(&data("fish_grid.toml")), "--out", s(dir.path())]));
    assert!(stdout.starts_with("game: "), "{stdout}");
    let text = fs::read_to_string(dir.path().join("game.txt")).unwrap();
    let g = pdfa_synth::game::GameGraph::parse_text(&text).unwrap();
    assert_eq!(stdout, format!("game: {} states, {} edges\n", g.num_states(), g.num_edges()));

    let stdout = ok(&run(&[
        "safety-dfa",
        "--safety",
        &format!("@{}", s(&data("charge_safety.ltl"))),
        "--alphabet",
        "lava,water,carpet,charge",
        "--out",
        s(&dir.path().join("s")),
    ]));
    assert!(stdout.contains("13 states (12 live)"), "{stdout}");
}

#[test]
fn learned_charging_pdfa_drives_gridworld_synthesis() {
    let dir = tempfile::tempdir().unwrap();
    let learned = dir.path().join("learned");
    ok(&run(&[
        "learn",
        "--demos",
        s(&data("charge_demos.txt")),
        "--safety",
        &format!("@{}", s(&data("charge_safety.ltl"))),
        "--mode",
        "preprocess",
        "--alpha",
        "4",
        "--out",
        s(&learned),
    ]));
    let stdout = ok(&run(&[
        "synthesize",
        "--pdfa",
        s(&learned.join("pdfa.txt")),
        "--grid",
        s(&data("charge_grid.toml")),
        "--out",
        s(&dir.path().join("syn")),
    ]));
    assert!(stdout.contains("2 strategies"), "{stdout}");
    // the cheaper plan crosses carpet, the preferred one detours on dry floor
    let fast = fs::read_to_string(dir.path().join("syn/strategy-0.txt")).unwrap();
    let slow = fs::read_to_string(dir.path().join("syn/strategy-1.txt")).unwrap();
    assert_eq!(fast.lines().count(), 6);
    assert_eq!(slow.lines().count(), 8);
}
