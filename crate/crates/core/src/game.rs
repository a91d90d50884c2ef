//! Turn-based two-player game graphs and their product with a PDFA.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::automata::Pdfa;
use crate::symbols::{Alphabet, Symbol, SymbolError};

pub mod gridworld;

pub use gridworld::{build_gridworld, GridSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("state `{0}` has no outgoing action")]
    NoAction(String),
    #[error("weight of `{state}` --{action}--> has {found} components, expected {expected}")]
    DimensionMismatch {
        state: String,
        action: String,
        expected: usize,
        found: usize,
    },
    #[error("weight of `{state}` --{action}--> must be finite and nonnegative")]
    InvalidWeight { state: String, action: String },
    #[error("state `{state}` defines action `{action}` twice")]
    DuplicateAction { state: String, action: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("game alphabet {game} differs from automaton alphabet {pdfa}")]
    AlphabetMismatch { game: String, pdfa: String },
    #[error("path does not end at the terminal state")]
    PathNotTerminal,
    #[error("state {state} has no edge {edge}")]
    InvalidEdge { state: u32, edge: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("grid spec `{path}`: {message}")]
    Spec { path: String, message: String },
    #[error("terminal state must have no outgoing edges")]
    TerminalHasEdges,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Robot,
    Environment,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::Robot => "robot",
            Owner::Environment => "env",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub name: String,
    pub owner: Owner,
    pub label: Symbol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameEdge {
    pub action: String,
    pub target: u32,
    pub weight: Vec<f64>,
}

/// Turn-based weighted game graph. Edges of a state belong to its owner.
#[derive(Debug, Clone, PartialEq)]
pub struct GameGraph {
    alphabet: Alphabet,
    dims: usize,
    states: Vec<GameState>,
    edges: Vec<Vec<GameEdge>>,
    initial: u32,
}

impl GameGraph {
    pub fn new(
        alphabet: Alphabet,
        dims: usize,
        states: Vec<GameState>,
        edges: Vec<Vec<GameEdge>>,
        initial: u32,
    ) -> Result<Self, GameError> {
        if edges.len() != states.len() {
            return Err(GameError::Format {
                line: 0,
                message: "edge table size differs from state count".into(),
            });
        }
        if initial as usize >= states.len() {
            return Err(GameError::UnknownState(initial.to_string()));
        }
        let mut names = std::collections::HashSet::new();
        if let Some(st) = states.iter().find(|st| !names.insert(st.name.as_str())) {
            return Err(GameError::DuplicateState(st.name.clone()));
        }
        for (i, out) in edges.iter().enumerate() {
            let name = &states[i].name;
            if out.is_empty() {
                return Err(GameError::NoAction(name.clone()));
            }
            let mut seen = std::collections::HashSet::new();
            for e in out {
                if !seen.insert(&e.action) {
                    return Err(GameError::DuplicateAction {
                        state: name.clone(),
                        action: e.action.clone(),
                    });
                }
                if e.target as usize >= states.len() {
                    return Err(GameError::UnknownState(e.target.to_string()));
                }
                if e.weight.len() != dims {
                    return Err(GameError::DimensionMismatch {
                        state: name.clone(),
                        action: e.action.clone(),
                        expected: dims,
                        found: e.weight.len(),
                    });
                }
                if e.weight.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    return Err(GameError::InvalidWeight {
                        state: name.clone(),
                        action: e.action.clone(),
                    });
                }
            }
        }
        Ok(GameGraph {
            alphabet,
            dims,
            states,
            edges,
            initial,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn state(&self, s: u32) -> &GameState {
        &self.states[s as usize]
    }

    pub fn edges(&self, s: u32) -> &[GameEdge] {
        &self.edges[s as usize]
    }

    pub fn find_state(&self, name: &str) -> Option<u32> {
        self.states.iter().position(|s| s.name == name).map(|i| i as u32)
    }

    /// Successor under `action`, if the action is available.
    pub fn step(&self, s: u32, action: &str) -> Option<&GameEdge> {
        self.edges[s as usize].iter().find(|e| e.action == action)
    }

    /// Payoff of a play given as a start state and a sequence of actions.
    pub fn play_payoff(&self, start: u32, actions: &[&str]) -> Option<Vec<f64>> {
        let mut total = vec![0.0; self.dims];
        let mut s = start;
        for a in actions {
            let e = self.step(s, a)?;
            for (t, w) in total.iter_mut().zip(&e.weight) {
                *t += w;
            }
            s = e.target;
        }
        Some(total)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.alphabet.header()).unwrap();
        writeln!(out, "dims: {}", self.dims).unwrap();
        writeln!(out, "initial {}", self.states[self.initial as usize].name).unwrap();
        for s in &self.states {
            writeln!(out, "state {} {} {}", s.name, s.owner, self.alphabet.render_symbol(s.label)).unwrap();
        }
        for (i, out_edges) in self.edges.iter().enumerate() {
            for e in out_edges {
                writeln!(
                    out,
                    "edge {} {} {} {}",
                    self.states[i].name,
                    e.action,
                    self.states[e.target as usize].name,
                    fmt_weight(&e.weight)
                )
                .unwrap();
            }
        }
        out
    }

    /// Parse the line-oriented game format:
    ///
    /// ```text
    /// alphabet: fish,ship
    /// dims: 1
    /// initial s0
    /// state s0 robot {}
    /// state s1 env {fish}
    /// edge s0 right s1 2
    /// edge s1 stay s0 0
    /// ```
    pub fn parse_text(text: &str) -> Result<GameGraph, GameError> {
        let mut alphabet = None;
        let mut dims = None;
        let mut initial_name = None;
        let mut states: Vec<GameState> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut raw_edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |m: &str| GameError::Format {
                line,
                message: m.to_string(),
            };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            if let Some(rest) = body.strip_prefix("alphabet:") {
                alphabet = Some(Alphabet::parse(rest.trim())?);
                continue;
            }
            if let Some(rest) = body.strip_prefix("dims:") {
                dims = Some(rest.trim().parse::<usize>().map_err(|_| err("bad dims"))?);
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[0] {
                "initial" if toks.len() == 2 => initial_name = Some(toks[1].to_string()),
                "state" if toks.len() == 4 => {
                    let a = alphabet.as_ref().ok_or_else(|| err("state before alphabet header"))?;
                    let owner = match toks[2] {
                        "robot" => Owner::Robot,
                        "env" | "environment" => Owner::Environment,
                        _ => return Err(err("owner must be `robot` or `env`")),
                    };
                    let label = a.parse_symbol(toks[3]).map_err(|e| err(&e.to_string()))?;
                    if index.insert(toks[1].to_string(), states.len() as u32).is_some() {
                        return Err(GameError::DuplicateState(toks[1].to_string()));
                    }
                    states.push(GameState {
                        name: toks[1].to_string(),
                        owner,
                        label,
                    });
                }
                "edge" if toks.len() == 5 => {
                    let weight = parse_weight(toks[4]).ok_or_else(|| err("bad weight vector"))?;
                    raw_edges.push((line, toks[1].to_string(), toks[2].to_string(), toks[3].to_string(), weight));
                }
                _ => return Err(err("expected `initial`, `state` or `edge`")),
            }
        }
        let alphabet = alphabet.ok_or(GameError::Format {
            line: 0,
            message: "missing alphabet header".into(),
        })?;
        let dims = dims.ok_or(GameError::Format {
            line: 0,
            message: "missing dims header".into(),
        })?;
        let initial_name = initial_name.ok_or(GameError::Format {
            line: 0,
            message: "missing initial state".into(),
        })?;
        let initial = *index
            .get(&initial_name)
            .ok_or_else(|| GameError::UnknownState(initial_name.clone()))?;
        let mut edges = vec![Vec::new(); states.len()];
        for (line, src, action, dst, weight) in raw_edges {
            let s = *index.get(&src).ok_or(GameError::Format {
                line,
                message: format!("unknown state `{src}`"),
            })?;
            let t = *index.get(&dst).ok_or(GameError::Format {
                line,
                message: format!("unknown state `{dst}`"),
            })?;
            edges[s as usize].push(GameEdge {
                action,
                target: t,
                weight,
            });
        }
        GameGraph::new(alphabet, dims, states, edges, initial)
    }

    /// Graphviz rendering: robot states as circles, environment states as
    /// squares.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph game {\n  __start [shape=point];\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = match s.owner {
                Owner::Robot => "circle",
                Owner::Environment => "box",
            };
            writeln!(
                out,
                "  {i} [shape={shape}, label=\"{}\\n{}\"];",
                s.name,
                self.alphabet.render_symbol(s.label)
            )
            .unwrap();
        }
        writeln!(out, "  __start -> {};", self.initial).unwrap();
        for (i, es) in self.edges.iter().enumerate() {
            for e in es {
                writeln!(out, "  {i} -> {} [label=\"{}:{}\"];", e.target, e.action, fmt_weight(&e.weight)).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Name of the state added by [`augment`].
pub const AUGMENTED_INITIAL: &str = "init";
/// Action of the augmented initial state.
pub const START_ACTION: &str = "start";
/// Action of product edges into the terminal state.
pub const FINISH_ACTION: &str = "finish";

/// Add a fresh robot-owned initial state with a single zero-weight action
/// into the old initial state. Its label is empty.
pub fn augment(g: &GameGraph) -> GameGraph {
    let mut h = g.clone();
    let mut name = AUGMENTED_INITIAL.to_string();
    while h.states.iter().any(|s| s.name == name) {
        name.push('_');
    }
    h.states.push(GameState {
        name,
        owner: Owner::Robot,
        label: Symbol::EMPTY,
    });
    h.edges.push(vec![GameEdge {
        action: START_ACTION.into(),
        target: g.initial,
        weight: vec![0.0; g.dims],
    }]);
    h.initial = (h.states.len() - 1) as u32;
    h
}

/// Which product states may take the finish edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FinishPolicy {
    #[default]
    RobotOnly,
    AnyState,
}

impl std::str::FromStr for FinishPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "robot-only" | "robot" => Ok(FinishPolicy::RobotOnly),
            "any-state" | "any" => Ok(FinishPolicy::AnyState),
            other => Err(format!("unknown finish policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Synchronous pair of a game state and a PDFA state.
    Pair { game: u32, pdfa: u32 },
    /// Task completed.
    Terminal,
    /// The environment forced a label the PDFA cannot read.
    Reject,
    /// Node given directly, without a game/PDFA origin.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductNode {
    pub name: String,
    /// `None` for the terminal state.
    pub owner: Option<Owner>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductEdge {
    pub action: String,
    pub target: u32,
    pub weight: Vec<f64>,
}

/// Product of an augmented game with a PDFA: `m` game-cost components plus
/// one preference component `−ln P`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGame {
    dims: usize,
    nodes: Vec<ProductNode>,
    edges: Vec<Vec<ProductEdge>>,
    initial: u32,
    terminal: u32,
}

impl ProductGame {
    /// Assemble a product game from explicit parts. Environment nodes need
    /// at least one edge; the terminal node must have none.
    pub fn from_parts(
        dims: usize,
        nodes: Vec<ProductNode>,
        edges: Vec<Vec<ProductEdge>>,
        initial: u32,
        terminal: u32,
    ) -> Result<Self, GameError> {
        if edges.len() != nodes.len() {
            return Err(GameError::Format {
                line: 0,
                message: "edge table size differs from node count".into(),
            });
        }
        for &x in &[initial, terminal] {
            if x as usize >= nodes.len() {
                return Err(GameError::UnknownState(x.to_string()));
            }
        }
        if !edges[terminal as usize].is_empty() {
            return Err(GameError::TerminalHasEdges);
        }
        for (i, out) in edges.iter().enumerate() {
            let node = &nodes[i];
            if node.owner == Some(Owner::Environment) && out.is_empty() {
                return Err(GameError::NoAction(node.name.clone()));
            }
            for e in out {
                if e.target as usize >= nodes.len() {
                    return Err(GameError::UnknownState(e.target.to_string()));
                }
                if e.weight.len() != dims {
                    return Err(GameError::DimensionMismatch {
                        state: node.name.clone(),
                        action: e.action.clone(),
                        expected: dims,
                        found: e.weight.len(),
                    });
                }
                if e.weight.iter().any(|w| w.is_nan() || *w < 0.0) {
                    return Err(GameError::InvalidWeight {
                        state: node.name.clone(),
                        action: e.action.clone(),
                    });
                }
            }
        }
        Ok(ProductGame {
            dims,
            nodes,
            edges,
            initial,
            terminal,
        })
    }

    /// Weight dimension (`m + 1` for products built from a game).
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_states(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn terminal(&self) -> u32 {
        self.terminal
    }

    pub fn node(&self, x: u32) -> &ProductNode {
        &self.nodes[x as usize]
    }

    pub fn edges(&self, x: u32) -> &[ProductEdge] {
        &self.edges[x as usize]
    }

    pub fn find(&self, name: &str) -> Option<u32> {
        self.nodes.iter().position(|n| n.name == name).map(|i| i as u32)
    }

    pub fn find_pair(&self, game: u32, pdfa: u32) -> Option<u32> {
        self.nodes
            .iter()
            .position(|n| n.kind == NodeKind::Pair { game, pdfa })
            .map(|i| i as u32)
    }

    /// True when some finish edge exists.
    pub fn terminal_reachable(&self) -> bool {
        self.edges.iter().flatten().any(|e| e.target == self.terminal)
    }

    /// Componentwise sum of the weights along a path from `start`, each step
    /// naming an edge index of the current node. The path must end at the
    /// terminal state.
    pub fn total_payoff(&self, start: u32, path: &[usize]) -> Result<Vec<f64>, GameError> {
        let mut total = vec![0.0; self.dims];
        let mut x = start;
        for &k in path {
            let e = self.edges[x as usize]
                .get(k)
                .ok_or(GameError::InvalidEdge { state: x, edge: k })?;
            for (t, w) in total.iter_mut().zip(&e.weight) {
                *t += w;
            }
            x = e.target;
        }
        if x != self.terminal {
            return Err(GameError::PathNotTerminal);
        }
        Ok(total)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph product {\n  __start [shape=point];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = match n.owner {
                Some(Owner::Robot) => "circle",
                Some(Owner::Environment) => "box",
                None => "doublecircle",
            };
            writeln!(out, "  {i} [shape={shape}, label=\"{}\"];", n.name).unwrap();
        }
        writeln!(out, "  __start -> {};", self.initial).unwrap();
        for (i, es) in self.edges.iter().enumerate() {
            for e in es {
                writeln!(out, "  {i} -> {} [label=\"{}:{}\"];", e.target, e.action, fmt_weight(&e.weight)).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Synchronous product of an augmented game and a PDFA, restricted to the
/// part reachable from the initial pair.
///
/// Robot moves whose label the PDFA cannot read are dropped. An
/// environment move of that kind cannot be forbidden, so it leads to a
/// losing `reject` sink instead.
pub fn build_product(g: &GameGraph, p: &Pdfa, policy: FinishPolicy) -> Result<ProductGame, GameError> {
    if g.alphabet() != p.alphabet() {
        return Err(GameError::AlphabetMismatch {
            game: g.alphabet().to_string(),
            pdfa: p.alphabet().to_string(),
        });
    }
    let dims = g.dims() + 1;
    let mut nodes: Vec<ProductNode> = vec![ProductNode {
        name: "terminal".into(),
        owner: None,
        kind: NodeKind::Terminal,
    }];
    let terminal = 0u32;
    let mut reject: Option<u32> = None;
    let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut edges: Vec<Vec<ProductEdge>> = vec![Vec::new()];
    let mut queue = VecDeque::new();

    let mut intern = |s: u32, q: u32, nodes: &mut Vec<ProductNode>, edges: &mut Vec<Vec<ProductEdge>>, queue: &mut VecDeque<(u32, u32)>| {
        *ids.entry((s, q)).or_insert_with(|| {
            nodes.push(ProductNode {
                name: format!("({},q{})", g.state(s).name, q),
                owner: Some(g.state(s).owner),
                kind: NodeKind::Pair { game: s, pdfa: q },
            });
            edges.push(Vec::new());
            queue.push_back((s, q));
            (nodes.len() - 1) as u32
        })
    };

    let initial = intern(g.initial(), p.initial(), &mut nodes, &mut edges, &mut queue);
    while let Some((s, q)) = queue.pop_front() {
        let x = intern(s, q, &mut nodes, &mut edges, &mut queue);
        let owner = g.state(s).owner;
        let mut out = Vec::new();
        for e in g.edges(s) {
            let label = g.state(e.target).label;
            match p.transition(q, label) {
                Some((q2, prob)) => {
                    let y = intern(e.target, q2, &mut nodes, &mut edges, &mut queue);
                    let mut w = e.weight.clone();
                    w.push(0.0 - prob.ln());
                    out.push(ProductEdge {
                        action: e.action.clone(),
                        target: y,
                        weight: w,
                    });
                }
                None if owner == Owner::Environment => {
                    let r = *reject.get_or_insert_with(|| {
                        nodes.push(ProductNode {
                            name: "reject".into(),
                            owner: Some(Owner::Robot),
                            kind: NodeKind::Reject,
                        });
                        edges.push(Vec::new());
                        (nodes.len() - 1) as u32
                    });
                    let mut w = e.weight.clone();
                    w.push(f64::INFINITY);
                    out.push(ProductEdge {
                        action: e.action.clone(),
                        target: r,
                        weight: w,
                    });
                }
                None => {}
            }
        }
        let f = p.term_prob(q);
        if f > 0.0 && (policy == FinishPolicy::AnyState || owner == Owner::Robot) {
            let mut w = vec![0.0; g.dims()];
            w.push(0.0 - f.ln());
            out.push(ProductEdge {
                action: FINISH_ACTION.into(),
                target: terminal,
                weight: w,
            });
        }
        edges[x as usize] = out;
    }
    ProductGame::from_parts(dims, nodes, edges, initial, terminal)
}

pub fn total_payoff(pg: &ProductGame, start: u32, path: &[usize]) -> Result<Vec<f64>, GameError> {
    pg.total_payoff(start, path)
}

pub(crate) fn fmt_weight(w: &[f64]) -> String {
    w.iter()
        .map(|x| if x.is_infinite() { "inf".to_string() } else { format!("{x}") })
        .collect::<Vec<_>>()
        .join(",")
}

pub(crate) fn parse_weight(s: &str) -> Option<Vec<f64>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',')
        .map(|t| match t.trim() {
            "inf" | "∞" => Some(f64::INFINITY),
            x => x.parse::<f64>().ok(),
        })
        .collect()
}

/// Map from game-state name to id, for tests and CLI lookups.
pub fn name_index(g: &GameGraph) -> BTreeMap<String, u32> {
    (0..g.num_states() as u32).map(|s| (g.state(s).name.clone(), s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = "\
alphabet: o1
dims: 1
initial s0
state s0 env {}
state s1 env {}
state s2 robot {o1}
edge s0 E s1 1
edge s1 E s2 1
edge s2 stay s2 0
";

    fn chain_pdfa() -> Pdfa {
        let a = Alphabet::parse("o1").unwrap();
        Pdfa::new(a, 0, vec![(0, Symbol(0), 0, 0.6), (0, Symbol(1), 1, 0.4)], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let g = GameGraph::parse_text(CHAIN).unwrap();
        assert_eq!(GameGraph::parse_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn augment_adds_one_state() {
        let g = GameGraph::parse_text(CHAIN).unwrap();
        let h = augment(&g);
        assert_eq!(h.num_states(), g.num_states() + 1);
        let init = h.initial();
        assert_eq!(h.state(init).owner, Owner::Robot);
        assert_eq!(h.state(init).label, Symbol::EMPTY);
        assert_eq!(h.edges(init).len(), 1);
        assert_eq!(h.edges(init)[0].target, g.initial());
        assert_eq!(h.edges(init)[0].weight, vec![0.0]);
    }

    #[test]
    fn product_chain_weights() {
        let g = augment(&GameGraph::parse_text(CHAIN).unwrap());
        let pg = build_product(&g, &chain_pdfa(), FinishPolicy::RobotOnly).unwrap();
        let mut x = pg.initial();
        let mut prefs = Vec::new();
        loop {
            let e = &pg.edges(x)[0];
            let e = if pg.edges(x).len() > 1 {
                pg.edges(x).iter().find(|e| e.action == FINISH_ACTION).unwrap()
            } else {
                e
            };
            prefs.push(e.weight[1]);
            x = e.target;
            if x == pg.terminal() {
                break;
            }
        }
        let expect = [-(0.6f64).ln(), -(0.6f64).ln(), -(0.4f64).ln(), 0.0];
        assert_eq!(prefs.len(), 4);
        for (a, b) in prefs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn environment_mismatch_goes_to_reject() {
        let g = augment(
            &GameGraph::parse_text(
                "alphabet: o1\ndims: 1\ninitial s0\nstate s0 env {}\nstate s1 robot {o1}\nstate s2 robot {}\n\
                 edge s0 a s1 0\nedge s0 b s2 0\nedge s1 stay s1 0\nedge s2 stay s2 0\n",
            )
            .unwrap(),
        );
        // PDFA that forbids o1 entirely
        let a = Alphabet::parse("o1").unwrap();
        let p = Pdfa::new(a, 0, vec![(0, Symbol(0), 0, 0.5)], vec![0.5]).unwrap();
        let pg = build_product(&g, &p, FinishPolicy::RobotOnly).unwrap();
        let reject = pg.find("reject").unwrap();
        assert!(pg.edges(reject).is_empty());
        let env = pg.find_pair(0, 0).unwrap();
        assert!(pg.edges(env).iter().any(|e| e.target == reject));
        assert!(pg.num_states() <= g.num_states() + 2);
    }

    #[test]
    fn payoff_requires_terminal() {
        let g = augment(&GameGraph::parse_text(CHAIN).unwrap());
        let pg = build_product(&g, &chain_pdfa(), FinishPolicy::RobotOnly).unwrap();
        assert_eq!(pg.total_payoff(pg.initial(), &[0]), Err(GameError::PathNotTerminal));
        assert_eq!(pg.total_payoff(pg.terminal(), &[]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn validation_errors() {
        let no_action = "alphabet: a\ndims: 1\ninitial s0\nstate s0 robot {}\n";
        assert_eq!(GameGraph::parse_text(no_action), Err(GameError::NoAction("s0".into())));
        let bad_dim = "alphabet: a\ndims: 2\ninitial s0\nstate s0 robot {}\nedge s0 x s0 1\n";
        assert!(matches!(GameGraph::parse_text(bad_dim), Err(GameError::DimensionMismatch { .. })));
        let dup = "alphabet: a\ndims: 1\ninitial s0\nstate s0 robot {}\nedge s0 x s0 1\nedge s0 x s0 2\n";
        assert!(matches!(GameGraph::parse_text(dup), Err(GameError::DuplicateAction { .. })));
        let neg = "alphabet: a\ndims: 1\ninitial s0\nstate s0 robot {}\nedge s0 x s0 -1\n";
        assert!(matches!(GameGraph::parse_text(neg), Err(GameError::InvalidWeight { .. })));
    }

    #[test]
    fn dot_shapes() {
        let g = GameGraph::parse_text(CHAIN).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("shape=circle"));
        assert!(dot.contains("shape=box"));
    }
}
