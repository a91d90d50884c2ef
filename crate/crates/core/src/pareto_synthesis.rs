//! Pareto-set algebra over payoff vectors, the fixed-point value iteration
//! on product games, strategy extraction for a chosen Pareto point, and a
//! rollout simulator.
//!
//! A Pareto set stands for the upset it generates. Robot states take the
//! union of their successors' shifted upsets, environment states the
//! intersection.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{fmt_weight, Owner, ProductGame};

/// Default tolerance for floating-point dominance and convergence tests.
pub const DEFAULT_EPS: f64 = 1e-9;

pub type Point = Vec<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParetoError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no fixed point within {bound} iterations")]
    IterationBoundExceeded { bound: usize },
    #[error("iteration {iteration}: value of state {state} grew")]
    MonotonicityViolated { state: u32, iteration: usize },
    #[error("point {0} is not achievable from the initial state")]
    PointNotAchievable(String),
    #[error("no admissible action at state {state} with budget {budget}")]
    InternalInconsistency { state: u32, budget: String },
    #[error("the initial state has no winning strategy")]
    NoWinningStrategy,
}

/// `v ⪰ w`: `v` is componentwise no larger than `w` (up to `eps`).
pub fn dominates(v: &[f64], w: &[f64]) -> Result<bool, ParetoError> {
    dominates_eps(v, w, 0.0)
}

pub fn dominates_eps(v: &[f64], w: &[f64], eps: f64) -> Result<bool, ParetoError> {
    if v.len() != w.len() {
        return Err(ParetoError::DimensionMismatch(v.len(), w.len()));
    }
    Ok(leq(v, w, eps))
}

fn leq(v: &[f64], w: &[f64], eps: f64) -> bool {
    v.iter().zip(w).all(|(a, b)| *b == f64::INFINITY || *a <= *b + eps)
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("payoffs are never NaN") {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// A point with an infinite component can never be met; it collapses to ∞⃗.
fn normalize(mut p: Point) -> Point {
    if p.iter().any(|x| x.is_infinite()) {
        p.iter_mut().for_each(|x| *x = f64::INFINITY);
    }
    p
}

/// Antichain of generators of an upset, kept in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoSet {
    points: Vec<Point>,
}

impl ParetoSet {
    pub fn empty() -> Self {
        ParetoSet { points: Vec::new() }
    }

    /// `{∞⃗}`.
    pub fn top(dims: usize) -> Self {
        ParetoSet {
            points: vec![vec![f64::INFINITY; dims]],
        }
    }

    /// `{0⃗}`.
    pub fn bottom(dims: usize) -> Self {
        ParetoSet {
            points: vec![vec![0.0; dims]],
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = Point>) -> Self {
        pareto_min(points, DEFAULT_EPS)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when the set holds no finite point.
    pub fn is_top(&self) -> bool {
        self.points.iter().all(|p| p.iter().any(|x| x.is_infinite()))
    }

    pub fn finite_points(&self) -> impl Iterator<Item = &Point> {
        self.points.iter().filter(|p| p.iter().all(|x| x.is_finite()))
    }

    /// Is `v` in the upset generated by this set?
    pub fn covers(&self, v: &[f64], eps: f64) -> bool {
        self.points.iter().any(|p| leq(p, v, eps))
    }

    pub fn approx_eq(&self, other: &ParetoSet, eps: f64) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| {
                a.iter().zip(b).all(|(x, y)| x == y || (x - y).abs() <= eps)
            })
    }

    fn shifted(&self, w: &[f64]) -> impl Iterator<Item = Point> + '_ {
        let w = w.to_vec();
        self.points
            .iter()
            .map(move |p| normalize(p.iter().zip(&w).map(|(a, b)| a + b).collect()))
    }
}

/// Keep the minimal points: drop every point weakly dominated by another
/// and collapse duplicates.
pub fn pareto_min(points: impl IntoIterator<Item = Point>, eps: f64) -> ParetoSet {
    let mut all: Vec<Point> = points.into_iter().map(normalize).collect();
    all.sort_by(|a, b| lex(a, b));
    let mut kept: Vec<Point> = Vec::new();
    for p in all {
        if kept.iter().any(|k| leq(k, &p, eps)) {
            continue;
        }
        kept.retain(|k| !leq(&p, k, eps));
        kept.push(p);
    }
    kept.sort_by(|a, b| lex(a, b));
    ParetoSet { points: kept }
}

fn check_dims(a: &ParetoSet, b: &ParetoSet) -> Result<(), ParetoError> {
    if let (Some(x), Some(y)) = (a.points.first(), b.points.first()) {
        if x.len() != y.len() {
            return Err(ParetoError::DimensionMismatch(x.len(), y.len()));
        }
    }
    Ok(())
}

/// Generators of `upset(a) ∪ upset(b)`.
pub fn upset_union(a: &ParetoSet, b: &ParetoSet) -> Result<ParetoSet, ParetoError> {
    check_dims(a, b)?;
    Ok(pareto_min(a.points.iter().chain(&b.points).cloned(), DEFAULT_EPS))
}

/// Generators of `upset(a) ∩ upset(b)`: pairwise componentwise maxima.
pub fn upset_intersection(a: &ParetoSet, b: &ParetoSet) -> Result<ParetoSet, ParetoError> {
    check_dims(a, b)?;
    Ok(intersect(a, b, DEFAULT_EPS))
}

fn intersect(a: &ParetoSet, b: &ParetoSet, eps: f64) -> ParetoSet {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a.points {
        for y in &b.points {
            out.push(x.iter().zip(y).map(|(p, q)| p.max(*q)).collect());
        }
    }
    pareto_min(out, eps)
}

/// One Pareto set per product state.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMap(pub Vec<ParetoSet>);

impl ValueMap {
    /// Initial values: `{∞⃗}` everywhere except `{0⃗}` at the terminal.
    pub fn initial(pg: &ProductGame) -> Self {
        let mut v = vec![ParetoSet::top(pg.dims()); pg.num_states()];
        v[pg.terminal() as usize] = ParetoSet::bottom(pg.dims());
        ValueMap(v)
    }

    pub fn get(&self, s: u32) -> &ParetoSet {
        &self.0[s as usize]
    }

    pub fn approx_eq(&self, other: &ValueMap, eps: f64) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.approx_eq(b, eps))
    }
}

fn apply_at(pg: &ProductGame, u: &ValueMap, s: u32, eps: f64) -> ParetoSet {
    let dims = pg.dims();
    if s == pg.terminal() {
        return ParetoSet::bottom(dims);
    }
    let edges = pg.edges(s);
    if edges.is_empty() {
        return ParetoSet::top(dims);
    }
    match pg.node(s).owner {
        Some(Owner::Environment) => {
            let mut acc: Option<ParetoSet> = None;
            for e in edges {
                let shifted = pareto_min(u.get(e.target).shifted(&e.weight), eps);
                acc = Some(match acc {
                    None => shifted,
                    Some(a) => intersect(&a, &shifted, eps),
                });
            }
            acc.expect("nonempty edge list")
        }
        _ => pareto_min(edges.iter().flat_map(|e| u.get(e.target).shifted(&e.weight)), eps),
    }
}

/// One Jacobi step of the fixed-point operator.
pub fn apply_fp(pg: &ProductGame, u: &ValueMap) -> ValueMap {
    apply_fp_eps(pg, u, DEFAULT_EPS)
}

pub fn apply_fp_eps(pg: &ProductGame, u: &ValueMap, eps: f64) -> ValueMap {
    ValueMap((0..pg.num_states() as u32).map(|s| apply_at(pg, u, s, eps)).collect())
}

/// A generator seen during iteration, with the first iteration it appeared.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedPoint {
    pub point: Point,
    pub birth: usize,
}

/// Fixed point of the value iteration plus bookkeeping for extraction.
#[derive(Debug, Clone)]
pub struct ParetoFront {
    pub values: ValueMap,
    /// Number of operator applications, including the confirming one.
    pub iterations: usize,
    /// `|S^P|·(|S^P| + |E^P|)`.
    pub bound: usize,
    /// Number of per-iteration monotonicity checks performed.
    pub monotonicity_checks: usize,
    pub archive: Vec<Vec<ArchivedPoint>>,
    pub eps: f64,
}

impl ParetoFront {
    pub fn at(&self, s: u32) -> &ParetoSet {
        self.values.get(s)
    }

    /// Smallest iteration at which `budget` became achievable at `s`,
    /// with the archived generator witnessing it.
    pub fn rank(&self, s: u32, budget: &[f64]) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (i, a) in self.archive[s as usize].iter().enumerate() {
            if leq(&a.point, budget, self.eps) && best.is_none_or(|(b, _)| a.birth < b) {
                best = Some((a.birth, i));
            }
        }
        best
    }
}

pub fn compute_pareto_front(pg: &ProductGame, eps: f64) -> Result<ParetoFront, ParetoError> {
    let n = pg.num_states();
    let bound = n * (n + pg.num_edges());
    let mut u = ValueMap::initial(pg);
    let mut archive: Vec<Vec<ArchivedPoint>> = vec![Vec::new(); n];
    archive[pg.terminal() as usize].push(ArchivedPoint {
        point: vec![0.0; pg.dims()],
        birth: 0,
    });
    let mut iterations = 0;
    let mut checks = 0;
    loop {
        if iterations >= bound.max(1) {
            return Err(ParetoError::IterationBoundExceeded { bound });
        }
        let next = apply_fp_eps(pg, &u, eps);
        iterations += 1;
        for s in 0..n {
            checks += 1;
            if !u.0[s].points.iter().all(|o| next.0[s].covers(o, eps)) {
                return Err(ParetoError::MonotonicityViolated {
                    state: s as u32,
                    iteration: iterations,
                });
            }
            for p in next.0[s].finite_points() {
                let seen = archive[s]
                    .iter()
                    .any(|a| a.point.iter().zip(p).all(|(x, y)| (x - y).abs() <= eps));
                if !seen {
                    archive[s].push(ArchivedPoint {
                        point: p.clone(),
                        birth: iterations,
                    });
                }
            }
        }
        let done = next.approx_eq(&u, eps);
        u = next;
        if done {
            return Ok(ParetoFront {
                values: u,
                iterations,
                bound,
                monotonicity_checks: checks,
                archive,
                eps,
            });
        }
    }
}

/// Node of a strategy: a product state paired with the payoff budget the
/// rest of the play must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyNode {
    pub state: u32,
    pub budget: Point,
    pub rank: usize,
    /// Chosen edge index at robot states.
    pub choice: Option<usize>,
    /// `(edge index, child node)` for every edge kept in the strategy graph.
    pub children: Vec<(usize, usize)>,
}

/// Deterministic strategy for one Pareto point. Memory is the remaining
/// budget, so a product state may appear in several nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub point: Point,
    pub root: usize,
    pub nodes: Vec<StrategyNode>,
}

impl Strategy {
    pub fn node(&self, i: usize) -> &StrategyNode {
        &self.nodes[i]
    }

    pub fn child(&self, node: usize, edge: usize) -> Option<usize> {
        self.nodes[node].children.iter().find(|(e, _)| *e == edge).map(|&(_, c)| c)
    }

    /// `(state, edge index, budget)` for every robot decision, in node order.
    pub fn decisions(&self) -> impl Iterator<Item = (u32, usize, &Point)> {
        self.nodes
            .iter()
            .filter_map(|n| n.choice.map(|c| (n.state, c, &n.budget)))
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for node in &self.nodes {
            for &(_, c) in &node.children {
                indeg[c] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for &(_, c) in &self.nodes[i].children {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        seen == n
    }

    /// `at <state> do <action> budget <vector>` per robot decision.
    pub fn to_text(&self, pg: &ProductGame) -> String {
        let mut out = String::new();
        for (s, e, b) in self.decisions() {
            writeln!(
                out,
                "at {} do {} budget {}",
                pg.node(s).name,
                pg.edges(s)[e].action,
                fmt_weight(b)
            )
            .unwrap();
        }
        out
    }
}

fn render(p: &[f64]) -> String {
    format!("({})", fmt_weight(p))
}

/// Strategy enforcing payoff `p` from the initial state. Each admitted edge
/// hands its successor a budget first achievable at a strictly earlier
/// iteration, so the strategy graph is acyclic and every play ends at the
/// terminal within `rank(initial, p)` steps.
pub fn extract_strategy(pg: &ProductGame, front: &ParetoFront, p: &[f64]) -> Result<Strategy, ParetoError> {
    if p.len() != pg.dims() {
        return Err(ParetoError::DimensionMismatch(p.len(), pg.dims()));
    }
    let init = pg.initial();
    let (rank0, a0) = front
        .rank(init, p)
        .ok_or_else(|| ParetoError::PointNotAchievable(render(p)))?;
    let mut ids: HashMap<(u32, usize), usize> = HashMap::new();
    let mut nodes = vec![StrategyNode {
        state: init,
        budget: front.archive[init as usize][a0].point.clone(),
        rank: rank0,
        choice: None,
        children: Vec::new(),
    }];
    ids.insert((init, a0), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (s, budget, rank) = {
            let n = &nodes[i];
            (n.state, n.budget.clone(), n.rank)
        };
        if s == pg.terminal() {
            continue;
        }
        let robot = pg.node(s).owner != Some(Owner::Environment);
        let mut admitted = Vec::new();
        for (k, e) in pg.edges(s).iter().enumerate() {
            let rest: Point = budget.iter().zip(&e.weight).map(|(b, w)| b - w).collect();
            let fit = front
                .rank(e.target, &rest)
                .filter(|&(r, _)| r < rank);
            match fit {
                Some((r, a)) => {
                    admitted.push((k, e.target, r, a));
                    if robot {
                        break;
                    }
                }
                None if !robot => {
                    return Err(ParetoError::InternalInconsistency {
                        state: s,
                        budget: render(&budget),
                    })
                }
                None => {}
            }
        }
        if admitted.is_empty() {
            return Err(ParetoError::InternalInconsistency {
                state: s,
                budget: render(&budget),
            });
        }
        for (k, t, r, a) in admitted {
            let c = *ids.entry((t, a)).or_insert_with(|| {
                nodes.push(StrategyNode {
                    state: t,
                    budget: front.archive[t as usize][a].point.clone(),
                    rank: r,
                    choice: None,
                    children: Vec::new(),
                });
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            nodes[i].children.push((k, c));
            if robot {
                nodes[i].choice = Some(k);
            }
        }
    }
    Ok(remove_loops(
        pg,
        Strategy {
            point: p.to_vec(),
            root: 0,
            nodes,
        },
    ))
}

/// Keep only nodes from which the terminal is reachable in the strategy
/// graph (backward reachability), renumbering in original order.
pub fn remove_loops(pg: &ProductGame, s: Strategy) -> Strategy {
    let n = s.nodes.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, node) in s.nodes.iter().enumerate() {
        for &(_, c) in &node.children {
            preds[c].push(i);
        }
    }
    let mut keep = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| s.nodes[i].state == pg.terminal()).collect();
    for &i in &queue {
        keep[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &p in &preds[i] {
            if !keep[p] {
                keep[p] = true;
                queue.push_back(p);
            }
        }
    }
    let mut remap = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if keep[i] {
            remap[i] = next;
            next += 1;
        }
    }
    let nodes = s
        .nodes
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(_, mut node)| {
            node.children.retain(|&(_, c)| keep[c]);
            node.children.iter_mut().for_each(|(_, c)| *c = remap[*c]);
            if let Some(ch) = node.choice {
                if !node.children.iter().any(|&(e, _)| e == ch) {
                    node.choice = None;
                }
            }
            node
        })
        .collect();
    Strategy {
        point: s.point,
        root: if keep[s.root] { remap[s.root] } else { 0 },
        nodes,
    }
}

/// One strategy per Pareto point of the initial state.
pub fn extract_all(pg: &ProductGame, front: &ParetoFront) -> Result<Vec<Strategy>, ParetoError> {
    let init = front.at(pg.initial());
    if init.is_top() {
        return Err(ParetoError::NoWinningStrategy);
    }
    init.finite_points().map(|p| extract_strategy(pg, front, p)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvPolicy {
    /// Uniform choice among environment edges.
    Random { seed: u64 },
    /// Maximize the worst-case value of component `component`.
    AdversarialGreedy { component: usize },
    /// Replay actions by name; falls back to the first edge when exhausted.
    Scripted(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub payoff: Point,
    pub terminated: bool,
    pub dominated: bool,
    pub steps: usize,
    pub step_cap_exceeded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutReport {
    pub point: Point,
    pub episodes: Vec<Episode>,
}

impl RolloutReport {
    pub fn completion_rate(&self) -> f64 {
        self.rate(|e| e.terminated)
    }

    pub fn dominance_rate(&self) -> f64 {
        self.rate(|e| e.terminated && e.dominated)
    }

    fn rate(&self, f: impl Fn(&Episode) -> bool) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().filter(|e| f(e)).count() as f64 / self.episodes.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let dims = self.point.len();
        let mut out = String::from("episode,terminated,dominated,steps");
        for i in 0..dims {
            write!(out, ",c{i}").unwrap();
        }
        out.push('\n');
        for (i, e) in self.episodes.iter().enumerate() {
            write!(out, "{i},{},{},{}", e.terminated, e.dominated, e.steps).unwrap();
            for x in &e.payoff {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn env_choice(
    pg: &ProductGame,
    front: &ParetoFront,
    s: u32,
    policy: &EnvPolicy,
    rng: &mut ChaCha8Rng,
    script: &mut std::slice::Iter<'_, String>,
) -> usize {
    let edges = pg.edges(s);
    match policy {
        EnvPolicy::Random { .. } => rng.gen_range(0..edges.len()),
        EnvPolicy::AdversarialGreedy { component } => {
            let worst = |k: usize| {
                let e = &edges[k];
                front
                    .at(e.target)
                    .points()
                    .iter()
                    .map(|p| p[*component] + e.weight[*component])
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            (0..edges.len())
                .fold((0, f64::NEG_INFINITY), |(bk, bv), k| {
                    let v = worst(k);
                    if v > bv {
                        (k, v)
                    } else {
                        (bk, bv)
                    }
                })
                .0
        }
        EnvPolicy::Scripted(_) => script
            .next()
            .and_then(|a| edges.iter().position(|e| &e.action == a))
            .unwrap_or(0),
    }
}

/// Play `episodes` games with the robot following `strat`. The step cap is
/// the larger of `|S^P|` and the strategy's node count.
pub fn simulate(
    pg: &ProductGame,
    front: &ParetoFront,
    strat: &Strategy,
    policy: &EnvPolicy,
    episodes: usize,
) -> RolloutReport {
    let cap = pg.num_states().max(strat.nodes.len());
    let seed = match policy {
        EnvPolicy::Random { seed } => *seed,
        _ => 0,
    };
    let mut out = Vec::with_capacity(episodes);
    for ep in 0..episodes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ep as u64);
        let script_vec = match policy {
            EnvPolicy::Scripted(v) => v.clone(),
            _ => Vec::new(),
        };
        let mut script = script_vec.iter();
        let mut payoff = vec![0.0; pg.dims()];
        let mut node = strat.root;
        let mut steps = 0;
        let mut terminated = false;
        let mut capped = false;
        loop {
            let s = strat.nodes[node].state;
            if s == pg.terminal() {
                terminated = true;
                break;
            }
            if steps >= cap {
                capped = true;
                break;
            }
            let k = match strat.nodes[node].choice {
                Some(k) => k,
                None => env_choice(pg, front, s, policy, &mut rng, &mut script),
            };
            let e = &pg.edges(s)[k];
            payoff.iter_mut().zip(&e.weight).for_each(|(p, w)| *p += w);
            steps += 1;
            match strat.child(node, k) {
                Some(c) => node = c,
                None => break,
            }
        }
        let dominated = terminated && leq(&payoff, &strat.point, front.eps.max(1e-9) * 10.0);
        out.push(Episode {
            payoff,
            terminated,
            dominated,
            steps,
            step_cap_exceeded: capped,
        });
    }
    RolloutReport {
        point: strat.point.clone(),
        episodes: out,
    }
}

/// One row per point per state: `state,name,c0,…`.
pub fn front_to_csv(pg: &ProductGame, values: &ValueMap) -> String {
    let mut out = String::from("state,name");
    for i in 0..pg.dims() {
        write!(out, ",c{i}").unwrap();
    }
    out.push('\n');
    for s in 0..pg.num_states() as u32 {
        for p in values.get(s).points() {
            write!(out, "{s},\"{}\"", pg.node(s).name.replace('"', "\"\"")).unwrap();
            for x in p {
                if x.is_infinite() {
                    out.push_str(",inf");
                } else {
                    write!(out, ",{x}").unwrap();
                }
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{NodeKind, ProductEdge, ProductNode};

    fn set(points: &[&[f64]]) -> ParetoSet {
        ParetoSet::from_points(points.iter().map(|p| p.to_vec()))
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[5.0, 5.0], &[5.0, 10.0]).unwrap());
        assert!(!dominates(&[5.0, 10.0], &[10.0, 5.0]).unwrap());
        assert!(dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(dominates(&[1.0, 2.0], &[INF, INF]).unwrap());
        assert_eq!(dominates(&[1.0], &[1.0, 2.0]), Err(ParetoError::DimensionMismatch(1, 2)));
    }

    #[test]
    fn pareto_min_examples() {
        let s = set(&[&[5.0, 5.0], &[5.0, 10.0], &[10.0, 1.0], &[INF, INF]]);
        assert_eq!(s, set(&[&[5.0, 5.0], &[10.0, 1.0]]));
        assert!(pareto_min(Vec::new(), 0.0).is_empty());
        let inc = set(&[&[1.0, 10.0], &[10.0, 1.0]]);
        assert_eq!(inc.len(), 2);
        assert_eq!(set(&[&[1.0, 1.0], &[1.0, 1.0]]).len(), 1);
        assert_eq!(set(&[&[1.0, INF]]), ParetoSet::top(2));
    }

    #[test]
    fn union_and_intersection_examples() {
        let u = upset_union(&ParetoSet::top(2), &set(&[&[5.0, 5.0]])).unwrap();
        assert_eq!(u, set(&[&[5.0, 5.0]]));
        let u = upset_union(&set(&[&[1.0, 10.0]]), &set(&[&[10.0, 1.0]])).unwrap();
        assert_eq!(u, set(&[&[1.0, 10.0], &[10.0, 1.0]]));
        let i = upset_intersection(&set(&[&[5.0, 5.0]]), &set(&[&[1.0, 10.0], &[10.0, 1.0]])).unwrap();
        assert_eq!(i, set(&[&[5.0, 10.0], &[10.0, 5.0]]));
        let i = upset_intersection(&set(&[&[3.0, 4.0]]), &ParetoSet::bottom(2)).unwrap();
        assert_eq!(i, set(&[&[3.0, 4.0]]));
        let i = upset_intersection(&set(&[&[3.0, 4.0]]), &ParetoSet::top(2)).unwrap();
        assert!(i.is_top());
    }

    fn node(name: &str, owner: Option<Owner>) -> ProductNode {
        ProductNode {
            name: name.into(),
            owner,
            kind: NodeKind::Raw,
        }
    }

    fn edge(action: &str, target: u32, w: &[f64]) -> ProductEdge {
        ProductEdge {
            action: action.into(),
            target,
            weight: w.to_vec(),
        }
    }

    #[test]
    fn single_edge_to_terminal() {
        let pg = ProductGame::from_parts(
            2,
            vec![node("s", Some(Owner::Robot)), node("t", None)],
            vec![vec![edge("go", 1, &[2.0, 3.0])], vec![]],
            0,
            1,
        )
        .unwrap();
        let f = compute_pareto_front(&pg, 0.0).unwrap();
        assert_eq!(f.at(0), &set(&[&[2.0, 3.0]]));
        let s = extract_strategy(&pg, &f, &[2.0, 3.0]).unwrap();
        assert_eq!(s.decisions().count(), 1);
        assert!(matches!(
            extract_strategy(&pg, &f, &[1.0, 1.0]),
            Err(ParetoError::PointNotAchievable(_))
        ));
    }

    #[test]
    fn unreachable_terminal_is_top() {
        let pg = ProductGame::from_parts(
            1,
            vec![node("s", Some(Owner::Robot)), node("t", None)],
            vec![vec![edge("loop", 0, &[1.0])], vec![]],
            0,
            1,
        )
        .unwrap();
        let f = compute_pareto_front(&pg, 0.0).unwrap();
        assert!(f.at(0).is_top());
        assert_eq!(extract_all(&pg, &f), Err(ParetoError::NoWinningStrategy));
    }

    /// The environment picks which of two cost channels is charged; the
    /// robot must answer with the opposite channel. No memoryless choice at
    /// the robot state meets (1,1), the budget-tracking strategy does.
    #[test]
    fn budget_memory_is_needed() {
        let pg = ProductGame::from_parts(
            2,
            vec![node("e", Some(Owner::Environment)), node("r", Some(Owner::Robot)), node("t", None)],
            vec![
                vec![edge("x", 1, &[1.0, 0.0]), edge("y", 1, &[0.0, 1.0])],
                vec![edge("a", 2, &[0.0, 1.0]), edge("b", 2, &[1.0, 0.0])],
                vec![],
            ],
            0,
            2,
        )
        .unwrap();
        let f = compute_pareto_front(&pg, 0.0).unwrap();
        assert_eq!(f.at(0), &set(&[&[1.0, 1.0]]));
        let s = extract_strategy(&pg, &f, &[1.0, 1.0]).unwrap();
        assert!(s.is_acyclic());
        for script in [["x"], ["y"]] {
            let policy = EnvPolicy::Scripted(script.iter().map(|a| a.to_string()).collect());
            let r = simulate(&pg, &f, &s, &policy, 1);
            assert_eq!(r.episodes[0].payoff, vec![1.0, 1.0]);
            assert!(r.episodes[0].dominated);
        }
    }

    #[test]
    fn scripted_simulation_is_deterministic() {
        let pg = ProductGame::from_parts(
            1,
            vec![node("e", Some(Owner::Environment)), node("t", None)],
            vec![vec![edge("a", 1, &[1.0]), edge("b", 1, &[2.0])], vec![]],
            0,
            1,
        )
        .unwrap();
        let f = compute_pareto_front(&pg, 0.0).unwrap();
        let s = extract_strategy(&pg, &f, &[2.0]).unwrap();
        let p = EnvPolicy::Scripted(vec!["a".into()]);
        let r1 = simulate(&pg, &f, &s, &p, 3);
        let r2 = simulate(&pg, &f, &s, &p, 3);
        assert_eq!(r1, r2);
        assert!(r1.episodes.iter().all(|e| e.payoff == vec![1.0]));
        let g = simulate(&pg, &f, &s, &EnvPolicy::AdversarialGreedy { component: 0 }, 1);
        assert_eq!(g.episodes[0].payoff, vec![2.0]);
    }
}
