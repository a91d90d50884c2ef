//! Evidence-driven state merging for PDFA learning.
//!
//! The learner builds a frequency prefix tree from the demonstrations and
//! greedily merges blue frontier nodes into red core nodes while the
//! likelihood lost per removed state stays below `alpha`. In pre-process
//! mode every node carries the safety-DFA state reached by its prefix, and
//! only nodes with equal safety states are merged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::automata::{product_with_safety, AutomataError, Pdfa};
use crate::safety_spec::Dfa;
use crate::symbols::{Alphabet, DemoSet, Symbol, Trace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearningError {
    #[error("demonstration `{trace}` violates the safety property at symbol {position}")]
    UnsafeDemonstration { trace: String, position: usize },
    #[error("nodes {red} and {blue} carry different safety states")]
    SafetyStateMismatch { red: u32, blue: u32 },
    #[error("mode {0} needs a safety automaton")]
    MissingSafety(LearnMode),
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("demonstration set is empty")]
    EmptyDemoSet,
    #[error("alphabet mismatch between demonstrations and safety automaton")]
    AlphabetMismatch,
    #[error("node {0} is not a valid blue node")]
    NotBlue(u32),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// The three learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LearnMode {
    Vanilla,
    Postprocess,
    Preprocess,
}

impl fmt::Display for LearnMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnMode::Vanilla => "vanilla",
            LearnMode::Postprocess => "postprocess",
            LearnMode::Preprocess => "preprocess",
        })
    }
}

impl std::str::FromStr for LearnMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vanilla" => Ok(LearnMode::Vanilla),
            "postprocess" | "post-process" | "post" => Ok(LearnMode::Postprocess),
            "preprocess" | "pre-process" | "pre" => Ok(LearnMode::Preprocess),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Merge restriction used inside the red/blue loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeMode {
    Vanilla,
    Preprocess,
}

/// How the next blue node is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlueOrder {
    /// Highest `freq_through` first, ties by smallest access path.
    #[default]
    FrequencyThenPath,
    /// Smallest access path first.
    PathOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeParams {
    pub alpha: f64,
    pub blue_order: BlueOrder,
    pub mode: MergeMode,
}

impl MergeParams {
    pub fn new(alpha: f64, mode: MergeMode) -> Result<Self, LearningError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LearningError::InvalidAlpha(alpha));
        }
        Ok(MergeParams {
            alpha,
            blue_order: BlueOrder::default(),
            mode,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub target: u32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptaNode {
    pub id: u32,
    /// Original tree nodes folded into this one, sorted.
    pub sources: Vec<u32>,
    pub freq_through: u64,
    pub freq_end: u64,
    pub children: BTreeMap<Symbol, Edge>,
    pub safety_state: Option<u32>,
    /// Prefix leading to the original tree node `id`.
    pub access: Vec<Symbol>,
    parent: Option<(u32, Symbol)>,
}

impl FptaNode {
    /// Log-likelihood of the outcomes observed at this node under their
    /// relative frequencies.
    fn log_likelihood(&self) -> f64 {
        let total = self.freq_through as f64;
        if total == 0.0 {
            return 0.0;
        }
        let term = |c: u64| {
            if c == 0 {
                0.0
            } else {
                let c = c as f64;
                c * (c / total).ln()
            }
        };
        self.children.values().map(|e| term(e.count)).sum::<f64>() + term(self.freq_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Red,
    Blue,
    White,
}

/// Frequency automaton: the prefix tree, possibly after merges.
#[derive(Debug, Clone, PartialEq)]
pub struct Fdfa {
    alphabet: Alphabet,
    nodes: Vec<Option<FptaNode>>,
    initial: u32,
    color: Vec<Color>,
}

/// Build the frequency prefix tree. Node ids follow breadth-first order with
/// children visited in symbol order. With a safety DFA, nodes are annotated
/// with the state reached by their prefix and every demonstration must stay
/// inside the safe language.
pub fn build_fpta(demos: &DemoSet, safety: Option<&Dfa>) -> Result<Fdfa, LearningError> {
    if demos.is_empty() {
        return Err(LearningError::EmptyDemoSet);
    }
    if let Some(s) = safety {
        if s.alphabet() != demos.alphabet() {
            return Err(LearningError::AlphabetMismatch);
        }
        let live = s.coreachable();
        for (trace, _) in demos.iter() {
            let mut q = s.initial();
            for (i, &sym) in trace.iter().enumerate() {
                q = s.next(q, sym);
                if !live[q as usize] {
                    return Err(LearningError::UnsafeDemonstration {
                        trace: demos.alphabet().render_trace(trace),
                        position: i + 1,
                    });
                }
            }
            if !s.is_accepting(q) {
                return Err(LearningError::UnsafeDemonstration {
                    trace: demos.alphabet().render_trace(trace),
                    position: trace.len(),
                });
            }
        }
    }

    #[derive(Default)]
    struct Trie {
        through: u64,
        end: u64,
        kids: BTreeMap<Symbol, Trie>,
    }
    let mut root = Trie::default();
    for (trace, count) in demos.iter() {
        let count = count as u64;
        let mut node = &mut root;
        node.through += count;
        for &s in trace.iter() {
            node = node.kids.entry(s).or_default();
            node.through += count;
        }
        node.end += count;
    }

    let mut nodes = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    let init_safety = safety.map(|s| s.initial());
    queue.push_back((&root, Vec::<Symbol>::new(), None::<(u32, Symbol)>, init_safety));
    // ids are handed out in pop order, children get theirs when pushed
    let mut next_id = 1u32;
    let mut pending_ids = std::collections::VecDeque::from([0u32]);
    while let Some((t, access, parent, sstate)) = queue.pop_front() {
        let id = pending_ids.pop_front().unwrap();
        let mut children = BTreeMap::new();
        for (&s, kid) in &t.kids {
            let cid = next_id;
            next_id += 1;
            children.insert(s, Edge { target: cid, count: kid.through });
            let mut a = access.clone();
            a.push(s);
            let ks = safety.zip(sstate).map(|(d, q)| d.next(q, s));
            queue.push_back((kid, a, Some((id, s)), ks));
            pending_ids.push_back(cid);
        }
        nodes.push(Some(FptaNode {
            id,
            sources: vec![id],
            freq_through: t.through,
            freq_end: t.end,
            children,
            safety_state: sstate,
            access,
            parent,
        }));
    }
    let n = nodes.len();
    let mut color = vec![Color::White; n];
    color[0] = Color::Red;
    let mut f = Fdfa {
        alphabet: demos.alphabet().clone(),
        nodes,
        initial: 0,
        color,
    };
    f.refresh_blue();
    Ok(f)
}

/// Copy-on-write view used for tentative merges.
struct View<'a> {
    base: &'a Fdfa,
    changed: HashMap<u32, FptaNode>,
    removed: BTreeSet<u32>,
}

impl<'a> View<'a> {
    fn new(base: &'a Fdfa) -> Self {
        View {
            base,
            changed: HashMap::new(),
            removed: BTreeSet::new(),
        }
    }

    fn get(&self, id: u32) -> &FptaNode {
        self.changed
            .get(&id)
            .unwrap_or_else(|| self.base.nodes[id as usize].as_ref().expect("live node"))
    }

    fn get_mut(&mut self, id: u32) -> &mut FptaNode {
        let base = self.base;
        self.changed
            .entry(id)
            .or_insert_with(|| base.nodes[id as usize].clone().expect("live node"))
    }

    /// Redirect the blue node's incoming edge to `red` and fold the blue
    /// subtree into the red node.
    fn merge(&mut self, red: u32, blue: u32) -> Result<(), LearningError> {
        let (p, s) = self.get(blue).parent.ok_or(LearningError::NotBlue(blue))?;
        self.get_mut(p)
            .children
            .get_mut(&s)
            .expect("parent edge exists")
            .target = red;
        let mut stack = vec![(red, blue)];
        while let Some((r, b)) = stack.pop() {
            if self.get(r).safety_state != self.get(b).safety_state {
                return Err(LearningError::SafetyStateMismatch { red: r, blue: b });
            }
            let bnode = self.get(b).clone();
            self.removed.insert(b);
            self.changed.remove(&b);
            let mut adopted = Vec::new();
            {
                let rn = self.get_mut(r);
                rn.freq_through += bnode.freq_through;
                rn.freq_end += bnode.freq_end;
                rn.sources.extend_from_slice(&bnode.sources);
                rn.sources.sort_unstable();
                for (sym, e) in &bnode.children {
                    match rn.children.get_mut(sym) {
                        Some(re) => {
                            re.count += e.count;
                            stack.push((re.target, e.target));
                        }
                        None => {
                            rn.children.insert(*sym, *e);
                            adopted.push((e.target, *sym));
                        }
                    }
                }
            }
            for (child, sym) in adopted {
                self.get_mut(child).parent = Some((r, sym));
            }
        }
        Ok(())
    }

    /// Likelihood lost per removed node.
    fn score(&self) -> f64 {
        let touched: BTreeSet<u32> = self.changed.keys().copied().chain(self.removed.iter().copied()).collect();
        let before: f64 = touched
            .iter()
            .map(|&id| self.base.nodes[id as usize].as_ref().unwrap().log_likelihood())
            .sum();
        let after: f64 = self.changed.values().map(FptaNode::log_likelihood).sum();
        let dq = self.removed.len().max(1) as f64;
        ((before - after) / dq).max(0.0)
    }

    fn commit(self) -> (HashMap<u32, FptaNode>, BTreeSet<u32>) {
        (self.changed, self.removed)
    }
}

/// One evaluated or executed step of the red/blue loop.
#[derive(Debug, Clone, PartialEq)]
pub enum MergeEvent {
    Evaluated { red: u32, blue: u32, score: Option<f64>, compatible: bool },
    Merged { red: u32, blue: u32, score: f64 },
    Promoted { blue: u32 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MergeLog {
    pub events: Vec<MergeEvent>,
}

impl MergeLog {
    pub fn merges(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, MergeEvent::Merged { .. }))
            .count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            match e {
                MergeEvent::Evaluated { red, blue, score, compatible } => {
                    let verdict = if *compatible { "compatible" } else { "rejected" };
                    match score {
                        Some(s) => writeln!(out, "eval red={red} blue={blue} score={s:.6} {verdict}"),
                        None => writeln!(out, "eval red={red} blue={blue} score=- {verdict} (safety state)"),
                    }
                }
                MergeEvent::Merged { red, blue, score } => {
                    writeln!(out, "merge red={red} blue={blue} score={score:.6}")
                }
                MergeEvent::Promoted { blue } => writeln!(out, "promote {blue}"),
            }
            .unwrap();
        }
        out
    }
}

impl Fdfa {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn node(&self, id: u32) -> Option<&FptaNode> {
        self.nodes.get(id as usize).and_then(Option::as_ref)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &FptaNode> {
        self.nodes.iter().flatten()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().flatten().count()
    }

    pub fn color(&self, id: u32) -> Color {
        self.color[id as usize]
    }

    /// Node currently reached by reading `path` from the root.
    pub fn follow(&self, path: &[Symbol]) -> Option<u32> {
        let mut q = self.initial;
        for s in path {
            q = self.node(q)?.children.get(s)?.target;
        }
        Some(q)
    }

    pub fn red_nodes(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32)
            .filter(|&i| self.nodes[i as usize].is_some() && self.color[i as usize] == Color::Red)
            .collect()
    }

    pub fn blue_nodes(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32)
            .filter(|&i| self.nodes[i as usize].is_some() && self.color[i as usize] == Color::Blue)
            .collect()
    }

    /// Blue frontier = children of red nodes that are not red.
    fn refresh_blue(&mut self) {
        for c in self.color.iter_mut() {
            if *c == Color::Blue {
                *c = Color::White;
            }
        }
        let reds = self.red_nodes();
        for r in reds {
            let kids: Vec<u32> = self.nodes[r as usize]
                .as_ref()
                .unwrap()
                .children
                .values()
                .map(|e| e.target)
                .collect();
            for k in kids {
                if self.color[k as usize] != Color::Red {
                    self.color[k as usize] = Color::Blue;
                }
            }
        }
    }

    fn choose_blue(&self, order: BlueOrder) -> Option<u32> {
        self.blue_nodes().into_iter().min_by(|&a, &b| {
            let na = self.node(a).unwrap();
            let nb = self.node(b).unwrap();
            let by_path = na.access.cmp(&nb.access);
            match order {
                BlueOrder::FrequencyThenPath => nb.freq_through.cmp(&na.freq_through).then(by_path),
                BlueOrder::PathOnly => by_path,
            }
        })
    }

    /// Merge score of folding `blue` into `red`, or `None` when the merge is
    /// structurally or safety-wise impossible.
    pub fn merge_score(&self, red: u32, blue: u32, mode: MergeMode) -> Option<f64> {
        if mode == MergeMode::Preprocess && self.node(red)?.safety_state != self.node(blue)?.safety_state {
            return None;
        }
        let mut view = View::new(self);
        view.merge(red, blue).ok()?;
        Some(view.score())
    }

    /// Apply the merge of `blue` into `red` in place.
    pub fn stochastic_merge(&mut self, red: u32, blue: u32) -> Result<(), LearningError> {
        if self.node(blue).and_then(|n| n.parent).is_none() {
            return Err(LearningError::NotBlue(blue));
        }
        let mut view = View::new(self);
        view.merge(red, blue)?;
        let (changed, removed) = view.commit();
        for id in removed {
            self.nodes[id as usize] = None;
            self.color[id as usize] = Color::White;
        }
        for (id, node) in changed {
            self.nodes[id as usize] = Some(node);
        }
        Ok(())
    }

    /// Normalize frequencies into probabilities and renumber canonically.
    pub fn to_pdfa(&self) -> Result<Pdfa, AutomataError> {
        let mut index = vec![u32::MAX; self.nodes.len()];
        let mut order = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.is_some() {
                index[i] = order.len() as u32;
                order.push(i);
            }
        }
        let mut edges = Vec::new();
        let mut term = Vec::with_capacity(order.len());
        for &i in &order {
            let n = self.nodes[i].as_ref().unwrap();
            let total = n.freq_through as f64;
            for (&s, e) in &n.children {
                if e.count > 0 {
                    edges.push((index[i], s, index[e.target as usize], e.count as f64 / total));
                }
            }
            term.push(if total > 0.0 { n.freq_end as f64 / total } else { 1.0 });
        }
        Ok(Pdfa::new(self.alphabet.clone(), index[self.initial as usize], edges, term)?.canonical())
    }
}

/// Free-function form of the compatibility test.
pub fn compatible(f: &Fdfa, red: u32, blue: u32, params: &MergeParams) -> bool {
    matches!(f.merge_score(red, blue, params.mode), Some(s) if s < params.alpha)
}

/// Free-function form of the merge, returning the merged automaton.
pub fn stochastic_merge(f: &Fdfa, red: u32, blue: u32) -> Result<Fdfa, LearningError> {
    let mut g = f.clone();
    g.stochastic_merge(red, blue)?;
    Ok(g)
}

/// Run the red/blue loop on an already built tree.
pub fn run_edsm(mut f: Fdfa, params: &MergeParams) -> Result<(Fdfa, MergeLog), LearningError> {
    let mut log = MergeLog::default();
    while let Some(blue) = f.choose_blue(params.blue_order) {
        let mut best: Option<(f64, u32)> = None;
        for red in f.red_nodes() {
            let score = f.merge_score(red, blue, params.mode);
            let ok = matches!(score, Some(s) if s < params.alpha);
            log.events.push(MergeEvent::Evaluated { red, blue, score, compatible: ok });
            if let (true, Some(s)) = (ok, score) {
                if best.is_none_or(|(bs, _)| s < bs) {
                    best = Some((s, red));
                }
            }
        }
        match best {
            Some((score, red)) => {
                f.stochastic_merge(red, blue)?;
                log.events.push(MergeEvent::Merged { red, blue, score });
            }
            None => {
                f.color[blue as usize] = Color::Red;
                log.events.push(MergeEvent::Promoted { blue });
            }
        }
        f.refresh_blue();
    }
    Ok((f, log))
}

/// The red/blue loop followed by frequency normalization. `safety` is
/// required in pre-process mode and ignored otherwise.
pub fn edsm_learn(demos: &DemoSet, params: &MergeParams, safety: Option<&Dfa>) -> Result<Pdfa, LearningError> {
    Ok(edsm_learn_logged(demos, params, safety)?.0)
}

pub fn edsm_learn_logged(
    demos: &DemoSet,
    params: &MergeParams,
    safety: Option<&Dfa>,
) -> Result<(Pdfa, MergeLog), LearningError> {
    let annot = match params.mode {
        MergeMode::Preprocess => Some(safety.ok_or(LearningError::MissingSafety(LearnMode::Preprocess))?),
        MergeMode::Vanilla => None,
    };
    let tree = build_fpta(demos, annot)?;
    let (f, log) = run_edsm(tree, params)?;
    Ok((f.to_pdfa()?, log))
}

/// Vanilla learning followed by the safety product.
pub fn postprocess_learn(demos: &DemoSet, params: &MergeParams, safety: &Dfa) -> Result<Pdfa, LearningError> {
    let vanilla = MergeParams {
        mode: MergeMode::Vanilla,
        ..*params
    };
    let p = edsm_learn(demos, &vanilla, None)?;
    Ok(product_with_safety(&p, safety)?)
}

/// Dispatch on the learner variant.
pub fn learn(
    demos: &DemoSet,
    mode: LearnMode,
    alpha: f64,
    safety: Option<&Dfa>,
) -> Result<(Pdfa, MergeLog), LearningError> {
    match mode {
        LearnMode::Vanilla => edsm_learn_logged(demos, &MergeParams::new(alpha, MergeMode::Vanilla)?, None),
        LearnMode::Preprocess => {
            let s = safety.ok_or(LearningError::MissingSafety(mode))?;
            edsm_learn_logged(demos, &MergeParams::new(alpha, MergeMode::Preprocess)?, Some(s))
        }
        LearnMode::Postprocess => {
            let s = safety.ok_or(LearningError::MissingSafety(mode))?;
            let (p, log) = edsm_learn_logged(demos, &MergeParams::new(alpha, MergeMode::Vanilla)?, None)?;
            Ok((product_with_safety(&p, s)?, log))
        }
    }
}

/// Mean absolute difference of trace probabilities over `probe`.
pub fn l1_trace_error<'a>(truth: &Pdfa, learned: &Pdfa, probe: impl IntoIterator<Item = &'a Trace>) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for t in probe {
        total += (truth.trace_probability(t).value - learned.trace_probability(t).value).abs();
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

/// Empirical distribution of the demonstrations as a PDFA (the unmerged
/// prefix tree).
pub fn empirical_pdfa(demos: &DemoSet) -> Result<Pdfa, LearningError> {
    Ok(build_fpta(demos, None)?.to_pdfa()?)
}
