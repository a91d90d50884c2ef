//! Command implementations behind the `pdfa-synth` binary.

pub mod config;
pub mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pdfa_synth::automata::{language_empty_intersection, Emptiness, Pdfa};
use pdfa_synth::game::{augment, build_gridworld, build_product, GameGraph, GridSpec, ProductGame};
use pdfa_synth::learning::{l1_trace_error, learn, LearnMode};
use pdfa_synth::pareto_synthesis::{
    compute_pareto_front, extract_strategy, front_to_csv, simulate, ParetoFront, RolloutReport, Strategy,
    DEFAULT_EPS,
};
use pdfa_synth::safety_spec::{build_violating_dfa, parse_safe_ltl, safety_dfa, Dfa, MAX_ENUMERATED_PROPOSITIONS};
use pdfa_synth::symbols::{load_demos, Alphabet, DemoSet, Trace};

pub use config::{ExperimentConfig, PointSelector};
pub use manifest::RunManifest;

/// Safety formula given inline or as `@path`.
pub fn read_formula(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(fs::read_to_string(path)
            .with_context(|| format!("reading {path}"))?
            .trim()
            .to_string()),
        None => Ok(arg.to_string()),
    }
}

/// Minimized safety DFA over `alphabet`, projecting large alphabets first.
pub fn safety_automaton(formula: &str, alphabet: &Alphabet) -> Result<Dfa> {
    let phi = parse_safe_ltl(formula, alphabet).map_err(|e| anyhow!("safety formula: {e}"))?;
    if alphabet.len() <= MAX_ENUMERATED_PROPOSITIONS {
        return Ok(safety_dfa(&phi)?);
    }
    let small = safety_dfa(&phi.project_to_mentioned())?;
    Ok(small.lift_to(alphabet)?)
}

fn load_pdfa(path: &Path) -> Result<Pdfa> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Pdfa::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_game(cfg: &ExperimentConfig) -> Result<GameGraph> {
    if let Some(p) = &cfg.grid {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let spec = GridSpec::parse_toml(&text).with_context(|| format!("parsing {}", p.display()))?;
        return build_gridworld(&spec).with_context(|| format!("building {}", p.display()));
    }
    if let Some(p) = &cfg.game {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return GameGraph::parse_text(&text).with_context(|| format!("parsing {}", p.display()));
    }
    bail!("a game file (--game) or gridworld spec (--grid) is required")
}

fn certificate(p: &Pdfa, safe: &Dfa) -> Result<Emptiness> {
    Ok(language_empty_intersection(p, &safe.complement())?)
}

fn render_certificate(alphabet: &Alphabet, c: &Emptiness) -> String {
    match c {
        Emptiness::Empty => "SAFE\n".to_string(),
        Emptiness::Witness(t) => format!("UNSAFE\nwitness: {}\n", alphabet.render_trace(t)),
    }
}

fn alpha_tag(alpha: f64, many: bool) -> String {
    if many {
        format!("-alpha{alpha}")
    } else {
        String::new()
    }
}

/// Summary of one learning run.
#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub alpha: f64,
    pub states: usize,
    pub certificate: Option<Emptiness>,
}

pub fn cmd_learn(cfg: &ExperimentConfig) -> Result<Vec<LearnOutcome>> {
    let demos_path = cfg.demos.as_deref().ok_or_else(|| anyhow!("--demos is required"))?;
    let mut man = RunManifest::new("learn", &cfg.out)?;
    man.input(demos_path)?;
    let t = Instant::now();
    let demos = load_demos(demos_path, None).with_context(|| format!("loading {}", demos_path.display()))?;
    let safe = match &cfg.safety {
        Some(f) => Some(safety_automaton(f, demos.alphabet())?),
        None => None,
    };
    man.stage("load", t);
    let many = cfg.alphas.len() > 1;
    let mut out = Vec::new();
    for &alpha in &cfg.alphas {
        let t = Instant::now();
        let (p, log) = learn(&demos, cfg.mode, alpha, safe.as_ref())
            .with_context(|| format!("{} learner, alpha {alpha}", cfg.mode))?;
        man.stage(&format!("learn{}", alpha_tag(alpha, many)), t);
        let tag = alpha_tag(alpha, many);
        man.write(&format!("pdfa{tag}.txt"), &p.to_text())?;
        man.write(&format!("pdfa{tag}.dot"), &p.to_dot())?;
        man.write(&format!("merge-log{tag}.txt"), &log.render())?;
        let cert = match &safe {
            Some(s) => {
                let c = certificate(&p, s)?;
                man.write(&format!("certificate{tag}.txt"), &render_certificate(p.alphabet(), &c))?;
                Some(c)
            }
            None => None,
        };
        out.push(LearnOutcome {
            alpha,
            states: p.num_states(),
            certificate: cert,
        });
    }
    man.finish()?;
    Ok(out)
}

pub fn cmd_safety_dfa(formula: &str, alphabet: &str, out: &Path) -> Result<(usize, usize)> {
    let mut man = RunManifest::new("safety-dfa", out)?;
    let a = Alphabet::parse(alphabet)?;
    let t = Instant::now();
    let phi = parse_safe_ltl(formula, &a).map_err(|e| anyhow!("safety formula: {e}"))?;
    let phi = if a.len() > MAX_ENUMERATED_PROPOSITIONS {
        phi.project_to_mentioned()
    } else {
        phi
    };
    let bad = build_violating_dfa(&phi)?;
    let safe = safety_dfa(&phi)?;
    man.stage("translate", t);
    man.write("violating.txt", &bad.to_text())?;
    man.write("safety.txt", &safe.to_text())?;
    man.write("safety.dot", &safe.to_dot())?;
    man.finish()?;
    Ok((safe.num_states(), safe.live_state_count()))
}

/// Product game, its value iteration and the strategies built from it.
pub struct Synthesis {
    pub product: ProductGame,
    pub front: ParetoFront,
    pub strategies: Vec<Strategy>,
}

fn select_points(front: &ParetoFront, pg: &ProductGame, sel: &PointSelector) -> Result<Vec<Vec<f64>>> {
    let init = front.at(pg.initial());
    if init.is_top() {
        bail!("no winning strategy: the initial state's Pareto front is {{∞}}");
    }
    let pts: Vec<Vec<f64>> = init.finite_points().cloned().collect();
    match sel {
        PointSelector::All => Ok(pts),
        PointSelector::Index(i) => pts
            .get(*i)
            .cloned()
            .map(|p| vec![p])
            .ok_or_else(|| anyhow!("point index {i} out of range ({} points)", pts.len())),
        PointSelector::Vector(v) => {
            if v.len() != pg.dims() {
                bail!("point has {} components, expected {}", v.len(), pg.dims());
            }
            Ok(vec![v.clone()])
        }
    }
}

fn synthesize_core(cfg: &ExperimentConfig, man: &mut RunManifest) -> Result<Synthesis> {
    let pdfa_path = cfg.pdfa.as_deref().ok_or_else(|| anyhow!("--pdfa is required"))?;
    man.input(pdfa_path)?;
    if let Some(p) = cfg.grid.as_deref().or(cfg.game.as_deref()) {
        man.input(p)?;
    }
    let p = load_pdfa(pdfa_path)?;
    let g = augment(&load_game(cfg)?);
    let t = Instant::now();
    let pg = build_product(&g, &p, cfg.finish)?;
    man.stage("product", t);
    man.note("product_states", pg.num_states() as f64);
    man.note("product_edges", pg.num_edges() as f64);
    let t = Instant::now();
    let front = compute_pareto_front(&pg, DEFAULT_EPS)?;
    man.stage("front", t);
    man.note("iterations", front.iterations as f64);
    let t = Instant::now();
    let strategies = select_points(&front, &pg, &cfg.point)?
        .iter()
        .map(|p| extract_strategy(&pg, &front, p))
        .collect::<Result<Vec<_>, _>>()?;
    man.stage("strategies", t);
    Ok(Synthesis {
        product: pg,
        front,
        strategies,
    })
}

pub fn cmd_synthesize(cfg: &ExperimentConfig) -> Result<Synthesis> {
    let mut man = RunManifest::new("synthesize", &cfg.out)?;
    let syn = synthesize_core(cfg, &mut man)?;
    man.write("front.csv", &front_to_csv(&syn.product, &syn.front.values))?;
    man.write("product.dot", &syn.product.to_dot())?;
    let mut points = String::new();
    for (i, s) in syn.strategies.iter().enumerate() {
        man.write(&format!("strategy-{i}.txt"), &s.to_text(&syn.product))?;
        writeln!(points, "{i},{}", join(&s.point)).unwrap();
    }
    man.write("points.csv", &points)?;
    man.finish()?;
    Ok(syn)
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<Vec<RolloutReport>> {
    let mut man = RunManifest::new("simulate", &cfg.out)?;
    let syn = synthesize_core(cfg, &mut man)?;
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut summary = String::new();
    for (i, s) in syn.strategies.iter().enumerate() {
        let r = simulate(&syn.product, &syn.front, s, &cfg.env, cfg.episodes);
        man.write(&format!("rollouts-{i}.csv"), &r.to_csv())?;
        writeln!(
            summary,
            "point {i} ({}): episodes {} completion {:.4} dominance {:.4}",
            join(&s.point),
            r.episodes.len(),
            r.completion_rate(),
            r.dominance_rate()
        )
        .unwrap();
        reports.push(r);
    }
    man.stage("simulate", t);
    man.write("summary.txt", &summary)?;
    man.finish()?;
    Ok(reports)
}

pub fn cmd_gridworld_export(grid: &Path, out: &Path) -> Result<GameGraph> {
    let mut man = RunManifest::new("gridworld-export", out)?;
    man.input(grid)?;
    let text = fs::read_to_string(grid).with_context(|| format!("reading {}", grid.display()))?;
    let spec = GridSpec::parse_toml(&text)?;
    let t = Instant::now();
    let g = build_gridworld(&spec)?;
    man.stage("build", t);
    man.write("game.txt", &g.to_text())?;
    man.write("game.dot", &g.to_dot())?;
    man.finish()?;
    Ok(g)
}

/// One cell of the learning benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mode: LearnMode,
    pub alpha: f64,
    pub size: usize,
    pub states: Option<usize>,
    pub l1: Option<f64>,
    pub safe: Option<bool>,
    pub note: String,
    pub seconds: f64,
}

fn sample_set(truth: &Pdfa, seed: u64, stream: u64, n: usize) -> Result<DemoSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut d = DemoSet::new(truth.alphabet().clone());
    for _ in 0..n {
        d.add(truth.sample_with(&mut rng, 10_000)?, 1);
    }
    Ok(d)
}

/// Number of held-out samples drawn for the L1 probe set.
pub const PROBE_SAMPLES: usize = 2000;

pub fn run_bench(truth: &Pdfa, formula: &str, alphas: &[f64], sizes: &[usize], seed: u64) -> Result<Vec<BenchRow>> {
    let safe = safety_automaton(formula, truth.alphabet())?;
    let probe_set = sample_set(truth, seed, 0, PROBE_SAMPLES)?;
    let probe: Vec<Trace> = probe_set.iter().map(|(t, _)| t.clone()).collect();
    let samples: Vec<Option<DemoSet>> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| (n > 0).then(|| sample_set(truth, seed, 1 + i as u64, n)).transpose())
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for mode in [LearnMode::Vanilla, LearnMode::Postprocess, LearnMode::Preprocess] {
        for &alpha in alphas {
            for (i, &n) in sizes.iter().enumerate() {
                cells.push((mode, alpha, i, n));
            }
        }
    }
    let rows = cells
        .par_iter()
        .map(|&(mode, alpha, i, size)| {
            let mut row = BenchRow {
                mode,
                alpha,
                size,
                states: None,
                l1: None,
                safe: None,
                note: String::new(),
                seconds: 0.0,
            };
            let Some(demos) = &samples[i] else {
                row.note = "skipped: empty sample".into();
                return row;
            };
            let t = Instant::now();
            match learn(demos, mode, alpha, Some(&safe)) {
                Ok((p, _)) => {
                    row.seconds = t.elapsed().as_secs_f64();
                    row.states = Some(p.num_states());
                    row.l1 = Some(l1_trace_error(truth, &p, &probe));
                    row.safe = certificate(&p, &safe).ok().map(|c| c.is_empty());
                }
                Err(e) => {
                    row.seconds = t.elapsed().as_secs_f64();
                    row.note = format!("failed: {e}");
                }
            }
            row
        })
        .collect();
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("mode,alpha,n,states,l1_error,safe,note\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.mode,
            r.alpha,
            r.size,
            r.states.map(|s| s.to_string()).unwrap_or_default(),
            r.l1.map(|x| format!("{x:e}")).unwrap_or_default(),
            r.safe.map(|s| if s { "SAFE" } else { "UNSAFE" }).unwrap_or(""),
            r.note
        )
        .unwrap();
    }
    out
}

pub fn cmd_bench(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    let truth_path = cfg.truth.as_deref().ok_or_else(|| anyhow!("--truth is required"))?;
    let formula = cfg.safety.as_deref().ok_or_else(|| anyhow!("--safety is required"))?;
    let mut man = RunManifest::new("bench", &cfg.out)?;
    man.input(truth_path)?;
    let truth = load_pdfa(truth_path)?;
    let t = Instant::now();
    let rows = run_bench(&truth, formula, &cfg.alphas, &cfg.sizes, cfg.seed)?;
    man.stage("bench", t);
    man.write("bench.csv", &bench_csv(&rows))?;
    let mut times = String::from("mode,alpha,n,seconds\n");
    for r in &rows {
        writeln!(times, "{},{},{},{}", r.mode, r.alpha, r.size, r.seconds).unwrap();
    }
    man.write_volatile("bench-times.csv", &times)?;
    man.finish()?;
    Ok(rows)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
