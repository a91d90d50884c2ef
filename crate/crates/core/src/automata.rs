//! Probabilistic deterministic finite automata.
//!
//! Every state satisfies `Σ_σ δ_P(q, σ) + F_P(q) = 1`: termination behaves
//! like one more outcome of the per-state distribution.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::safety_spec::Dfa;
use crate::symbols::{Alphabet, Symbol, SymbolError, Trace};

/// Tolerance of the stochasticity check.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomataError {
    #[error("state {state}: outgoing mass plus termination is {sum}, expected 1")]
    NotStochastic { state: u32, sum: f64 },
    #[error("state {state}: probability {value} outside (0, 1]")]
    InvalidProbability { state: u32, value: f64 },
    #[error("state {0} out of range")]
    StateOutOfRange(u32),
    #[error("duplicate transition from state {state} on {symbol}")]
    DuplicateTransition { state: u32, symbol: String },
    #[error("sampled trace exceeded {0} symbols")]
    MaxLengthExceeded(usize),
    #[error("state {0} has no probability mass")]
    NonGenerativeState(u32),
    #[error("no accepting state survives the safety product")]
    EmptyIntersection,
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: String, right: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Probability of a trace, with its negative natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceProbability {
    pub value: f64,
    pub log_value: f64,
}

/// Result of an emptiness check against a bad-prefix automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// A shortest positive-probability trace that the bad automaton accepts.
    Witness(Trace),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&Trace> {
        match self {
            Emptiness::Empty => None,
            Emptiness::Witness(t) => Some(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pdfa {
    alphabet: Alphabet,
    initial: u32,
    trans: Vec<BTreeMap<Symbol, (u32, f64)>>,
    term: Vec<f64>,
}

impl Pdfa {
    /// Build and validate. `edges` lists `(source, symbol, target, δ_P)`;
    /// `term` gives `F_P` per state.
    pub fn new(
        alphabet: Alphabet,
        initial: u32,
        edges: impl IntoIterator<Item = (u32, Symbol, u32, f64)>,
        term: Vec<f64>,
    ) -> Result<Self, AutomataError> {
        let n = term.len();
        let mut trans = vec![BTreeMap::new(); n];
        for (q, s, t, p) in edges {
            if q as usize >= n {
                return Err(AutomataError::StateOutOfRange(q));
            }
            if t as usize >= n {
                return Err(AutomataError::StateOutOfRange(t));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(AutomataError::InvalidProbability { state: q, value: p });
            }
            if trans[q as usize].insert(s, (t, p)).is_some() {
                return Err(AutomataError::DuplicateTransition {
                    state: q,
                    symbol: alphabet.render_symbol(s),
                });
            }
        }
        if initial as usize >= n {
            return Err(AutomataError::StateOutOfRange(initial));
        }
        let p = Pdfa {
            alphabet,
            initial,
            trans,
            term,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), AutomataError> {
        for q in 0..self.num_states() as u32 {
            let f = self.term[q as usize];
            if !(0.0..=1.0).contains(&f) {
                return Err(AutomataError::InvalidProbability { state: q, value: f });
            }
            let sum = self.outgoing_mass(q) + f;
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(AutomataError::NotStochastic { state: q, sum });
            }
        }
        Ok(())
    }

    fn outgoing_mass(&self, q: u32) -> f64 {
        self.trans[q as usize].values().map(|&(_, p)| p).sum()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.term.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn term_prob(&self, q: u32) -> f64 {
        self.term[q as usize]
    }

    /// `q ∈ F` exactly when `F_P(q) > 0`.
    pub fn is_accepting(&self, q: u32) -> bool {
        self.term[q as usize] > 0.0
    }

    pub fn transition(&self, q: u32, s: Symbol) -> Option<(u32, f64)> {
        self.trans[q as usize].get(&s).copied()
    }

    /// Transitions of `q` in symbol order.
    pub fn transitions(&self, q: u32) -> impl Iterator<Item = (Symbol, u32, f64)> + '_ {
        self.trans[q as usize].iter().map(|(&s, &(t, p))| (s, t, p))
    }

    pub fn edge_count(&self) -> usize {
        self.trans.iter().map(BTreeMap::len).sum()
    }

    /// The underlying complete DFA: missing transitions go to a rejecting
    /// sink appended after the last state.
    pub fn support_dfa(&self) -> Dfa {
        let n = self.num_states() as u32;
        Dfa::from_fn(
            self.alphabet.clone(),
            n as usize + 1,
            self.initial,
            |q| q < n && self.is_accepting(q),
            |q, s| {
                if q == n {
                    n
                } else {
                    self.transition(q, s).map(|(t, _)| t).unwrap_or(n)
                }
            },
        )
        .expect("support table is complete")
    }

    /// The run of `t`, or `None` once a transition is missing.
    pub fn run(&self, t: &Trace) -> Option<u32> {
        let mut q = self.initial;
        for &s in t.iter() {
            q = self.transition(q, s)?.0;
        }
        Some(q)
    }

    /// Probability of `t` and its negative log.
    ///
    /// Each stored probability is read as the shortest decimal that round
    /// trips to it; the product of those decimals is formed exactly and
    /// rounded once, so `0.8·0.15·0.8·0.2` gives `0.0192`.
    pub fn trace_probability(&self, t: &Trace) -> TraceProbability {
        let mut factors = Vec::with_capacity(t.len() + 1);
        let mut q = self.initial;
        for &s in t.iter() {
            match self.transition(q, s) {
                Some((next, p)) => {
                    factors.push(p);
                    q = next;
                }
                None => return TraceProbability::ZERO,
            }
        }
        let f = self.term[q as usize];
        if f == 0.0 {
            return TraceProbability::ZERO;
        }
        factors.push(f);
        TraceProbability {
            value: decimal_product(&factors),
            log_value: factors.iter().map(|p| -p.ln()).sum(),
        }
    }

    /// Random walk from the initial state; deterministic in `seed`.
    pub fn sample_trace(&self, seed: u64, max_len: usize) -> Result<Trace, AutomataError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, max_len)
    }

    /// Random walk drawing from a caller-owned generator.
    pub fn sample_with<R: Rng>(&self, rng: &mut R, max_len: usize) -> Result<Trace, AutomataError> {
        let mut q = self.initial;
        let mut out = Vec::new();
        loop {
            let f = self.term[q as usize];
            let mass = f + self.outgoing_mass(q);
            if mass <= 0.0 {
                return Err(AutomataError::NonGenerativeState(q));
            }
            let u = rng.gen::<f64>() * mass;
            if u < f {
                return Ok(Trace::new(out));
            }
            if out.len() == max_len {
                return Err(AutomataError::MaxLengthExceeded(max_len));
            }
            let mut acc = f;
            let mut pick = None;
            for (&s, &(t, p)) in &self.trans[q as usize] {
                acc += p;
                pick = Some((s, t));
                if u < acc {
                    break;
                }
            }
            let (s, t) = pick.ok_or(AutomataError::NonGenerativeState(q))?;
            out.push(s);
            q = t;
        }
    }

    /// Renumber states in breadth-first order from the initial state,
    /// following transitions in symbol order; unreachable states are
    /// dropped.
    pub fn canonical(&self) -> Pdfa {
        let mut order = vec![u32::MAX; self.num_states()];
        let mut seq = vec![self.initial];
        order[self.initial as usize] = 0;
        let mut i = 0;
        while i < seq.len() {
            let q = seq[i];
            for (_, t, _) in self.transitions(q) {
                if order[t as usize] == u32::MAX {
                    order[t as usize] = seq.len() as u32;
                    seq.push(t);
                }
            }
            i += 1;
        }
        let trans = seq
            .iter()
            .map(|&q| {
                self.trans[q as usize]
                    .iter()
                    .map(|(&s, &(t, p))| (s, (order[t as usize], p)))
                    .collect()
            })
            .collect();
        Pdfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            trans,
            term: seq.iter().map(|&q| self.term[q as usize]).collect(),
        }
    }

    /// A bijection `self → other` preserving the initial state, the
    /// transition structure and acceptance, if one exists. Probabilities are
    /// not compared.
    pub fn isomorphism(&self, other: &Pdfa) -> Option<Vec<u32>> {
        if self.alphabet != other.alphabet || self.num_states() != other.num_states() {
            return None;
        }
        let n = self.num_states();
        let mut map = vec![u32::MAX; n];
        let mut used = vec![false; n];
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        map[self.initial as usize] = other.initial;
        used[other.initial as usize] = true;
        while let Some((a, b)) = queue.pop_front() {
            if self.is_accepting(a) != other.is_accepting(b) {
                return None;
            }
            if self.trans[a as usize].len() != other.trans[b as usize].len() {
                return None;
            }
            for (&s, &(ta, _)) in &self.trans[a as usize] {
                let (tb, _) = other.transition(b, s)?;
                if map[ta as usize] == u32::MAX {
                    if used[tb as usize] {
                        return None;
                    }
                    map[ta as usize] = tb;
                    used[tb as usize] = true;
                    queue.push_back((ta, tb));
                } else if map[ta as usize] != tb {
                    return None;
                }
            }
        }
        if map.contains(&u32::MAX) {
            return None;
        }
        Some(map)
    }

    /// Largest absolute difference between corresponding probabilities of
    /// two isomorphic automata.
    pub fn max_probability_gap(&self, other: &Pdfa, map: &[u32]) -> f64 {
        let mut gap: f64 = 0.0;
        for q in 0..self.num_states() as u32 {
            let r = map[q as usize];
            gap = gap.max((self.term_prob(q) - other.term_prob(r)).abs());
            for (s, _, p) in self.transitions(q) {
                let (_, p2) = other.transition(r, s).unwrap_or((0, 0.0));
                gap = gap.max((p - p2).abs());
            }
        }
        gap
    }

    fn check_alphabet(&self, d: &Dfa) -> Result<(), AutomataError> {
        if &self.alphabet != d.alphabet() {
            return Err(AutomataError::AlphabetMismatch {
                left: self.alphabet.to_string(),
                right: d.alphabet().to_string(),
            });
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.alphabet.header()).unwrap();
        for q in 0..self.num_states() as u32 {
            write!(out, "state {q}").unwrap();
            if q == self.initial {
                out.push_str(" initial");
            }
            if self.is_accepting(q) {
                out.push_str(" accepting");
            }
            out.push('\n');
        }
        for q in 0..self.num_states() as u32 {
            for (s, t, p) in self.transitions(q) {
                writeln!(out, "edge {q} {} {t} {p}", self.alphabet.render_symbol(s)).unwrap();
            }
        }
        for q in 0..self.num_states() as u32 {
            if self.is_accepting(q) {
                writeln!(out, "term {q} {}", self.term[q as usize]).unwrap();
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Pdfa, AutomataError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut states: BTreeMap<u32, bool> = BTreeMap::new();
        let mut initial = None;
        let mut edges = Vec::new();
        let mut terms: HashMap<u32, f64> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: &str| AutomataError::Format {
                line,
                message: message.to_string(),
            };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            if let Some(rest) = body.strip_prefix("alphabet:") {
                alphabet = Some(Alphabet::parse(rest.trim())?);
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            let id = |t: &str| t.parse::<u32>().map_err(|_| err("bad state id"));
            let prob = |t: &str| t.parse::<f64>().map_err(|_| err("bad probability"));
            match toks[0] {
                "state" if toks.len() >= 2 => {
                    let q = id(toks[1])?;
                    let mut acc = false;
                    for flag in &toks[2..] {
                        match *flag {
                            "initial" => initial = Some(q),
                            "accepting" => acc = true,
                            _ => return Err(err("unknown state flag")),
                        }
                    }
                    if states.insert(q, acc).is_some() {
                        return Err(err("duplicate state"));
                    }
                }
                "edge" if toks.len() == 5 => {
                    let a = alphabet.as_ref().ok_or_else(|| err("edge before alphabet header"))?;
                    edges.push((id(toks[1])?, a.parse_symbol(toks[2])?, id(toks[3])?, prob(toks[4])?));
                }
                "term" if toks.len() == 3 => {
                    terms.insert(id(toks[1])?, prob(toks[2])?);
                }
                _ => return Err(err("expected `state`, `edge` or `term`")),
            }
        }
        let alphabet = alphabet.ok_or(AutomataError::Format {
            line: 0,
            message: "missing alphabet header".into(),
        })?;
        if states.keys().enumerate().any(|(i, &q)| q as usize != i) {
            return Err(AutomataError::Format {
                line: 0,
                message: "state ids must be 0..n-1".into(),
            });
        }
        let initial = initial.ok_or(AutomataError::Format {
            line: 0,
            message: "no initial state".into(),
        })?;
        let term: Vec<f64> = (0..states.len() as u32)
            .map(|q| terms.get(&q).copied().unwrap_or(0.0))
            .collect();
        for (q, acc) in &states {
            if *acc != (term[*q as usize] > 0.0) {
                return Err(AutomataError::Format {
                    line: 0,
                    message: format!("state {q}: accepting flag disagrees with its term line"),
                });
            }
        }
        Pdfa::new(alphabet, initial, edges, term)
    }

    /// Graphviz rendering with `symbol: prob` edge labels and `F_P` on
    /// accepting states.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pdfa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for q in 0..self.num_states() as u32 {
            if self.is_accepting(q) {
                writeln!(
                    out,
                    "  {q} [shape=doublecircle, label=\"q{q}\\nF_P={}\"];",
                    fmt_prob(self.term[q as usize])
                )
                .unwrap();
            } else {
                writeln!(out, "  {q} [shape=circle, label=\"q{q}\"];").unwrap();
            }
        }
        writeln!(out, "  __start -> {};", self.initial).unwrap();
        for q in 0..self.num_states() as u32 {
            for (s, t, p) in self.transitions(q) {
                writeln!(
                    out,
                    "  {q} -> {t} [label=\"{}: {}\"];",
                    self.alphabet.render_symbol(s),
                    fmt_prob(p)
                )
                .unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

impl TraceProbability {
    pub const ZERO: TraceProbability = TraceProbability {
        value: 0.0,
        log_value: f64::INFINITY,
    };
}

fn fmt_prob(p: f64) -> String {
    let s = format!("{p:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub fn trace_probability(p: &Pdfa, t: &Trace) -> TraceProbability {
    p.trace_probability(t)
}

pub fn sample_trace(p: &Pdfa, seed: u64, max_len: usize) -> Result<Trace, AutomataError> {
    p.sample_trace(seed, max_len)
}

/// Intersect with a safety DFA, prune product states that cannot reach an
/// accepting product state, and renormalize each surviving state by its
/// retained mass `N(q, q^s)`.
pub fn product_with_safety(p: &Pdfa, safe: &Dfa) -> Result<Pdfa, AutomataError> {
    p.check_alphabet(safe)?;
    let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut edges: Vec<Vec<(Symbol, u32, f64)>> = Vec::new();
    let start = (p.initial, safe.initial());
    ids.insert(start, 0);
    pairs.push(start);
    let mut i = 0;
    while i < pairs.len() {
        let (q, s) = pairs[i];
        let mut out = Vec::new();
        for (sym, t, prob) in p.transitions(q) {
            let next = (t, safe.next(s, sym));
            let id = *ids.entry(next).or_insert_with(|| {
                pairs.push(next);
                (pairs.len() - 1) as u32
            });
            out.push((sym, id, prob));
        }
        edges.push(out);
        i += 1;
    }
    let n = pairs.len();
    let accepting: Vec<bool> = pairs
        .iter()
        .map(|&(q, s)| p.is_accepting(q) && safe.is_accepting(s))
        .collect();

    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (src, out) in edges.iter().enumerate() {
        for &(_, t, _) in out {
            preds[t as usize].push(src as u32);
        }
    }
    let mut keep = accepting.clone();
    let mut stack: Vec<u32> = (0..n as u32).filter(|&x| keep[x as usize]).collect();
    while let Some(x) = stack.pop() {
        for &y in &preds[x as usize] {
            if !keep[y as usize] {
                keep[y as usize] = true;
                stack.push(y);
            }
        }
    }
    if !keep[0] {
        return Err(AutomataError::EmptyIntersection);
    }

    let mut renum = vec![u32::MAX; n];
    let mut next_id = 0;
    for x in 0..n {
        if keep[x] {
            renum[x] = next_id;
            next_id += 1;
        }
    }
    let mut new_edges = Vec::new();
    let mut term = vec![0.0; next_id as usize];
    for x in 0..n {
        if !keep[x] {
            continue;
        }
        let f = if accepting[x] { p.term_prob(pairs[x].0) } else { 0.0 };
        let retained: f64 = edges[x]
            .iter()
            .filter(|e| keep[e.1 as usize])
            .map(|e| e.2)
            .sum::<f64>()
            + f;
        term[renum[x] as usize] = f / retained;
        for &(sym, t, prob) in &edges[x] {
            if keep[t as usize] {
                new_edges.push((renum[x], sym, renum[t as usize], prob / retained));
            }
        }
    }
    let raw = Pdfa::new(p.alphabet.clone(), 0, new_edges, term)?;
    Ok(raw.canonical())
}

/// Search the synchronized product of `p`'s positive-probability support and
/// `bad` for a trace that `p` accepts with positive probability and `bad`
/// accepts. Breadth-first, so a returned witness is shortest.
pub fn language_empty_intersection(p: &Pdfa, bad: &Dfa) -> Result<Emptiness, AutomataError> {
    p.check_alphabet(bad)?;
    let start = (p.initial, bad.initial());
    let mut parent: HashMap<(u32, u32), Option<((u32, u32), Symbol)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(cur @ (q, b)) = queue.pop_front() {
        if p.is_accepting(q) && bad.is_accepting(b) {
            let mut syms = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, s))) = parent.get(&at) {
                syms.push(*s);
                at = *prev;
            }
            syms.reverse();
            return Ok(Emptiness::Witness(Trace::new(syms)));
        }
        for (s, t, _) in p.transitions(q) {
            let next = (t, bad.next(b, s));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((cur, s)));
                queue.push_back(next);
            }
        }
    }
    Ok(Emptiness::Empty)
}

/// Every trace up to `max_len` over the alphabet, shortest first.
pub fn all_traces(alphabet: &Alphabet, max_len: usize) -> Vec<Trace> {
    let mut out = vec![Trace::new(Vec::new())];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for s in alphabet.symbols() {
                let mut v: Vec<Symbol> = prefix.clone();
                v.push(s);
                out.push(Trace::new(v.clone()));
                next.push(v);
            }
        }
        frontier = next;
    }
    out
}

/// Correctly rounded product of the shortest decimal forms of `factors`.
fn decimal_product(factors: &[f64]) -> f64 {
    let mut mant = BigUint::from(1u32);
    let mut exp10: i64 = 0;
    for &x in factors {
        let text = format!("{x:e}");
        let (m, e) = text.split_once('e').expect("exponent form");
        let (int, frac) = m.split_once('.').unwrap_or((m, ""));
        let digits: BigUint = format!("{int}{frac}").parse().expect("decimal digits");
        mant *= digits;
        exp10 += e.parse::<i64>().expect("exponent") - frac.len() as i64;
    }
    format!("{mant}e{exp10}").parse().expect("decimal literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_way() -> Pdfa {
        // accepts `a` with 0.7 and `b` with 0.3
        let al = Alphabet::parse("a,b").unwrap();
        Pdfa::new(
            al,
            0,
            vec![(0, Symbol(1), 1, 0.7), (0, Symbol(2), 2, 0.3)],
            vec![0.0, 1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn stochasticity_is_enforced() {
        let al = Alphabet::parse("a").unwrap();
        let err = Pdfa::new(al.clone(), 0, vec![(0, Symbol(1), 0, 0.5)], vec![0.4]).unwrap_err();
        assert!(matches!(err, AutomataError::NotStochastic { state: 0, .. }));
        let err = Pdfa::new(al, 0, vec![(0, Symbol(1), 0, 0.0)], vec![1.0]).unwrap_err();
        assert!(matches!(err, AutomataError::InvalidProbability { .. }));
    }

    #[test]
    fn single_terminal_state_samples_empty() {
        let p = Pdfa::new(Alphabet::parse("a").unwrap(), 0, vec![], vec![1.0]).unwrap();
        for seed in 0..10 {
            assert!(p.sample_trace(seed, 5).unwrap().is_empty());
        }
    }

    #[test]
    fn max_length_is_reported() {
        let p = Pdfa::new(
            Alphabet::parse("a").unwrap(),
            0,
            vec![(0, Symbol(1), 0, 0.999)],
            vec![0.001],
        )
        .unwrap();
        assert_eq!(p.sample_trace(1, 3), Err(AutomataError::MaxLengthExceeded(3)));
    }

    #[test]
    fn safety_product_renormalizes() {
        let p = two_way();
        let al = p.alphabet().clone();
        // safety: b never occurs
        let safe = Dfa::from_fn(al.clone(), 2, 0, |q| q == 0, |q, s| if q == 1 || s.has(1) { 1 } else { 0 })
            .unwrap();
        let r = product_with_safety(&p, &safe).unwrap();
        let a = al.parse_trace("{a}").unwrap();
        let b = al.parse_trace("{b}").unwrap();
        assert!((r.trace_probability(&a).value - 1.0).abs() < 1e-12);
        assert_eq!(r.trace_probability(&b).value, 0.0);
        assert_eq!(r.num_states(), 2);
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let p = two_way();
        let none = Dfa::empty(p.alphabet().clone());
        assert_eq!(product_with_safety(&p, &none), Err(AutomataError::EmptyIntersection));
        assert!(language_empty_intersection(&p, &none).unwrap().is_empty());
    }

    #[test]
    fn witness_is_shortest() {
        let p = two_way();
        let all = Dfa::universal(p.alphabet().clone());
        let w = language_empty_intersection(&p, &all).unwrap();
        assert_eq!(w.witness().unwrap().len(), 1);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let p = two_way();
        let back = Pdfa::parse_text(&p.to_text()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn isomorphism_ignores_numbering() {
        let p = two_way();
        let al = p.alphabet().clone();
        let q = Pdfa::new(
            al,
            2,
            vec![(2, Symbol(1), 0, 0.6), (2, Symbol(2), 1, 0.4)],
            vec![1.0, 1.0, 0.0],
        )
        .unwrap();
        let map = p.isomorphism(&q).unwrap();
        assert_eq!(map, vec![2, 0, 1]);
        assert!((p.max_probability_gap(&q, &map) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn all_traces_counts() {
        let al = Alphabet::parse("a").unwrap();
        assert_eq!(all_traces(&al, 3).len(), 1 + 2 + 4 + 8);
    }
}
