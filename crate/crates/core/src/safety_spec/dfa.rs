//! Complete DFAs over `2^Π` with explicit transition tables.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::symbols::{Alphabet, Symbol, SymbolError, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("transition table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("state {0} out of range")]
    StateOutOfRange(u32),
    #[error("proposition `{0}` is missing from the target alphabet")]
    MissingProposition(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Complete deterministic automaton. `trans[q * |Σ| + σ]` is the successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: u32,
    accepting: Vec<bool>,
    trans: Vec<u32>,
    names: Vec<String>,
}

impl Dfa {
    pub fn from_parts(
        alphabet: Alphabet,
        initial: u32,
        accepting: Vec<bool>,
        trans: Vec<u32>,
    ) -> Result<Self, DfaError> {
        let n = accepting.len();
        let expected = n * alphabet.symbol_count();
        if trans.len() != expected {
            return Err(DfaError::TableSize { expected, found: trans.len() });
        }
        if initial as usize >= n {
            return Err(DfaError::StateOutOfRange(initial));
        }
        if let Some(&bad) = trans.iter().find(|&&t| t as usize >= n) {
            return Err(DfaError::StateOutOfRange(bad));
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            trans,
            names: Vec::new(),
        })
    }

    /// Build from a successor function.
    pub fn from_fn(
        alphabet: Alphabet,
        states: usize,
        initial: u32,
        accepting: impl Fn(u32) -> bool,
        next: impl Fn(u32, Symbol) -> u32,
    ) -> Result<Self, DfaError> {
        let mut trans = Vec::with_capacity(states * alphabet.symbol_count());
        for q in 0..states as u32 {
            for s in alphabet.symbols() {
                trans.push(next(q, s));
            }
        }
        let acc = (0..states as u32).map(accepting).collect();
        Dfa::from_parts(alphabet, initial, acc, trans)
    }

    /// One accepting state looping on every symbol.
    pub fn universal(alphabet: Alphabet) -> Self {
        let k = alphabet.symbol_count();
        Dfa::from_parts(alphabet, 0, vec![true], vec![0; k]).unwrap()
    }

    /// One rejecting state looping on every symbol.
    pub fn empty(alphabet: Alphabet) -> Self {
        let k = alphabet.symbol_count();
        Dfa::from_parts(alphabet, 0, vec![false], vec![0; k]).unwrap()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        if names.len() == self.accepting.len() {
            self.names = names;
        }
        self
    }

    pub fn name(&self, q: u32) -> String {
        self.names
            .get(q as usize)
            .cloned()
            .unwrap_or_else(|| format!("q{q}"))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.accepting[q as usize]
    }

    pub fn accepting_count(&self) -> usize {
        self.accepting.iter().filter(|&&a| a).count()
    }

    pub fn next(&self, q: u32, sigma: Symbol) -> u32 {
        self.trans[q as usize * self.alphabet.symbol_count() + sigma.0 as usize]
    }

    pub fn run(&self, t: &Trace) -> u32 {
        t.iter().fold(self.initial, |q, &s| self.next(q, s))
    }

    pub fn accepts(&self, t: &Trace) -> bool {
        self.is_accepting(self.run(t))
    }

    /// States from which some accepting state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let k = self.alphabet.symbol_count();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n {
            for c in 0..k {
                preds[self.trans[q * k + c] as usize].push(q as u32);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&q| seen[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Number of states that can still reach acceptance.
    pub fn live_state_count(&self) -> usize {
        self.coreachable().iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for a in &mut d.accepting {
            *a = !*a;
        }
        d
    }

    /// Drop unreachable states and renumber the rest in breadth-first order
    /// from the initial state (symbols visited in bitset order).
    pub fn trim(&self) -> Dfa {
        let k = self.alphabet.symbol_count();
        let mut order = vec![u32::MAX; self.num_states()];
        let mut seq = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        order[self.initial as usize] = 0;
        seq.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for c in 0..k {
                let t = self.trans[q as usize * k + c];
                if order[t as usize] == u32::MAX {
                    order[t as usize] = seq.len() as u32;
                    seq.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut trans = Vec::with_capacity(seq.len() * k);
        for &q in &seq {
            for c in 0..k {
                trans.push(order[self.trans[q as usize * k + c] as usize]);
            }
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting: seq.iter().map(|&q| self.accepting[q as usize]).collect(),
            names: if self.names.is_empty() {
                Vec::new()
            } else {
                seq.iter().map(|&q| self.names[q as usize].clone()).collect()
            },
            trans,
        }
    }

    /// Hopcroft partition refinement on the reachable part. The result is
    /// the canonical minimal complete DFA.
    pub fn minimize(&self) -> Dfa {
        let d = self.trim();
        let n = d.num_states();
        let k = d.alphabet.symbol_count();

        // inverse transitions in CSR layout, indexed by (symbol, target)
        let mut counts = vec![0usize; k * n + 1];
        for q in 0..n {
            for c in 0..k {
                counts[c * n + d.trans[q * k + c] as usize + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut inv = vec![0u32; n * k];
        for q in 0..n {
            for c in 0..k {
                let slot = c * n + d.trans[q * k + c] as usize;
                inv[fill[slot]] = q as u32;
                fill[slot] += 1;
            }
        }

        let mut block_of = vec![0usize; n];
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        let acc: Vec<u32> = (0..n as u32).filter(|&q| d.accepting[q as usize]).collect();
        let rej: Vec<u32> = (0..n as u32).filter(|&q| !d.accepting[q as usize]).collect();
        for part in [acc, rej] {
            if !part.is_empty() {
                for &q in &part {
                    block_of[q as usize] = blocks.len();
                }
                blocks.push(part);
            }
        }
        let mut in_work: Vec<Vec<bool>> = Vec::new();
        let mut work: Vec<(usize, usize)> = Vec::new();
        for b in 0..blocks.len() {
            in_work.push(vec![true; k]);
            for c in 0..k {
                work.push((b, c));
            }
        }

        let mut marked: Vec<Vec<u32>> = vec![Vec::new(); n.max(1)];
        let mut touched: Vec<usize> = Vec::new();
        let mut is_marked = vec![false; n];
        while let Some((b, c)) = work.pop() {
            in_work[b][c] = false;
            let splitter = blocks[b].clone();
            for &t in &splitter {
                let slot = c * n + t as usize;
                for &p in &inv[counts[slot]..counts[slot + 1]] {
                    if !is_marked[p as usize] {
                        is_marked[p as usize] = true;
                        let y = block_of[p as usize];
                        if marked[y].is_empty() {
                            touched.push(y);
                        }
                        marked[y].push(p);
                    }
                }
            }
            for y in touched.drain(..) {
                let hit = std::mem::take(&mut marked[y]);
                if hit.len() == blocks[y].len() {
                    for &p in &hit {
                        is_marked[p as usize] = false;
                    }
                    continue;
                }
                let rest: Vec<u32> = blocks[y]
                    .iter()
                    .copied()
                    .filter(|&q| !is_marked[q as usize])
                    .collect();
                for &p in &hit {
                    is_marked[p as usize] = false;
                }
                let (keep, split) = if hit.len() <= rest.len() { (rest, hit) } else { (hit, rest) };
                let z = blocks.len();
                for &q in &split {
                    block_of[q as usize] = z;
                }
                blocks[y] = keep;
                blocks.push(split);
                marked.push(Vec::new());
                // whether or not (y, c) is pending, queueing the smaller half suffices
                in_work.push(vec![true; k]);
                for d2 in 0..k {
                    work.push((z, d2));
                }
            }
        }

        let m = blocks.len();
        let mut trans = vec![0u32; m * k];
        let mut accepting = vec![false; m];
        let mut names = vec![String::new(); m];
        for (bi, members) in blocks.iter().enumerate() {
            let rep = members[0] as usize;
            accepting[bi] = d.accepting[rep];
            for c in 0..k {
                trans[bi * k + c] = block_of[d.trans[rep * k + c] as usize] as u32;
            }
            if !d.names.is_empty() {
                let mut ns: Vec<&str> = members.iter().map(|&q| d.names[q as usize].as_str()).collect();
                ns.sort();
                names[bi] = ns.join(" ~ ");
            }
        }
        let mut out = Dfa {
            alphabet: d.alphabet.clone(),
            initial: block_of[d.initial as usize] as u32,
            accepting,
            trans,
            names: Vec::new(),
        };
        if !d.names.is_empty() {
            out.names = names;
        }
        out.trim()
    }

    /// Language equality by synchronized search for a distinguishing state
    /// pair. Returns a shortest distinguishing trace when they differ.
    pub fn equivalent(&self, other: &Dfa) -> Result<(), Trace> {
        assert_eq!(self.alphabet, other.alphabet, "alphabet mismatch");
        let mut seen = std::collections::HashMap::new();
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        seen.insert(start, None::<((u32, u32), Symbol)>);
        queue.push_back(start);
        while let Some((a, b)) = queue.pop_front() {
            if self.is_accepting(a) != other.is_accepting(b) {
                let mut syms = Vec::new();
                let mut cur = (a, b);
                while let Some(Some((prev, s))) = seen.get(&cur) {
                    syms.push(*s);
                    cur = *prev;
                }
                syms.reverse();
                return Err(Trace::new(syms));
            }
            for s in self.alphabet.symbols() {
                let nxt = (self.next(a, s), other.next(b, s));
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(nxt) {
                    e.insert(Some(((a, b), s)));
                    queue.push_back(nxt);
                }
            }
        }
        Ok(())
    }

    /// Re-express the automaton over a larger alphabet. Propositions absent
    /// from this DFA's alphabet are ignored when reading symbols.
    pub fn lift_to(&self, target: &Alphabet) -> Result<Dfa, DfaError> {
        for p in self.alphabet.propositions() {
            if target.index_of(p).is_none() {
                return Err(DfaError::MissingProposition(p.clone()));
            }
        }
        if target == &self.alphabet {
            return Ok(self.clone());
        }
        let mut d = Dfa::from_fn(
            target.clone(),
            self.num_states(),
            self.initial,
            |q| self.is_accepting(q),
            |q, s| self.next(q, target.project(s, &self.alphabet)),
        )?;
        d.names = self.names.clone();
        Ok(d)
    }

    /// Line-oriented text serialization.
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
            for s in self.alphabet.symbols() {
                writeln!(out, "edge {q} {} {}", self.alphabet.render_symbol(s), self.next(q, s)).unwrap();
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Dfa, DfaError> {
        let mut alphabet = None;
        let mut states: BTreeMap<u32, bool> = BTreeMap::new();
        let mut initial = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let fmt_err = |message: &str| DfaError::Format {
                line: line_no,
                message: message.to_string(),
            };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("alphabet:") {
                alphabet = Some(Alphabet::parse(rest.trim())?);
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("state") => {
                    let id: u32 = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| fmt_err("expected state id"))?;
                    let mut acc = false;
                    for flag in parts {
                        match flag {
                            "initial" => {
                                if initial.replace(id).is_some() {
                                    return Err(fmt_err("second initial state"));
                                }
                            }
                            "accepting" => acc = true,
                            other => return Err(fmt_err(&format!("unknown flag `{other}`"))),
                        }
                    }
                    if states.insert(id, acc).is_some() {
                        return Err(fmt_err("duplicate state"));
                    }
                }
                Some("edge") => {
                    let a = alphabet.as_ref().ok_or_else(|| fmt_err("edge before alphabet header"))?;
                    let toks: Vec<&str> = parts.collect();
                    if toks.len() != 3 {
                        return Err(fmt_err("expected `edge <src> <symbol> <dst>`"));
                    }
                    let src: u32 = toks[0].parse().map_err(|_| fmt_err("bad source id"))?;
                    let sym = a.parse_symbol(toks[1])?;
                    let dst: u32 = toks[2].parse().map_err(|_| fmt_err("bad target id"))?;
                    edges.push((line_no, src, sym, dst));
                }
                _ => return Err(fmt_err("expected `state` or `edge`")),
            }
        }
        let alphabet = alphabet.ok_or(DfaError::Format {
            line: 0,
            message: "missing alphabet header".into(),
        })?;
        let n = states.len();
        if states.keys().enumerate().any(|(i, &id)| id as usize != i) {
            return Err(DfaError::Format {
                line: 0,
                message: "state ids must be 0..n-1".into(),
            });
        }
        let initial = initial.ok_or(DfaError::Format {
            line: 0,
            message: "no initial state".into(),
        })?;
        let k = alphabet.symbol_count();
        let mut trans = vec![u32::MAX; n * k];
        for (line, src, sym, dst) in edges {
            if src as usize >= n || dst as usize >= n {
                return Err(DfaError::Format {
                    line,
                    message: "edge references an undeclared state".into(),
                });
            }
            let slot = &mut trans[src as usize * k + sym.0 as usize];
            if *slot != u32::MAX {
                return Err(DfaError::Format {
                    line,
                    message: "nondeterministic edge".into(),
                });
            }
            *slot = dst;
        }
        if trans.contains(&u32::MAX) {
            return Err(DfaError::Format {
                line: 0,
                message: "transition function is not total".into(),
            });
        }
        Dfa::from_parts(alphabet, initial, states.into_values().collect(), trans)
    }

    /// Graphviz rendering; parallel edges are merged into one label.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for q in 0..self.num_states() as u32 {
            let shape = if self.is_accepting(q) { "doublecircle" } else { "circle" };
            writeln!(
                out,
                "  {q} [shape={shape}, label=\"{}\"];",
                dot_escape(&self.name(q))
            )
            .unwrap();
        }
        writeln!(out, "  __start -> {};", self.initial).unwrap();
        for q in 0..self.num_states() as u32 {
            let mut grouped: BTreeMap<u32, Vec<String>> = BTreeMap::new();
            for s in self.alphabet.symbols() {
                grouped
                    .entry(self.next(q, s))
                    .or_default()
                    .push(self.alphabet.render_symbol(s));
            }
            for (t, labels) in grouped {
                writeln!(out, "  {q} -> {t} [label=\"{}\"];", dot_escape(&labels.join(" "))).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::parse("a").unwrap()
    }

    /// Accepts traces whose number of `a` symbols is even, with a duplicated
    /// odd state.
    fn parity_with_duplicate() -> Dfa {
        Dfa::from_fn(ab(), 3, 0, |q| q == 0, |q, s| match (q, s.0) {
            (0, 1) => 1,
            (1, 1) => 0,
            (2, 1) => 0,
            (0, _) => 0,
            (1, _) => 2,
            (_, _) => 1,
        })
        .unwrap()
    }

    #[test]
    fn bisimilar_states_merge() {
        let d = parity_with_duplicate();
        let m = d.minimize();
        assert_eq!(m.num_states(), 2);
        assert!(d.equivalent(&m).is_ok());
    }

    #[test]
    fn complement_twice_is_identity() {
        let d = parity_with_duplicate();
        let cc = d.complement().minimize().complement().minimize();
        assert!(d.equivalent(&cc).is_ok());
        assert!(d.equivalent(&d.complement()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = parity_with_duplicate().minimize();
        let back = Dfa::parse_text(&d.to_text()).unwrap();
        assert_eq!(back, Dfa { names: Vec::new(), ..d });
    }

    #[test]
    fn text_errors() {
        assert!(matches!(
            Dfa::parse_text("alphabet: a\nstate 0 initial\nedge 0 {} 0\n"),
            Err(DfaError::Format { .. })
        ));
        assert!(matches!(
            Dfa::parse_text("alphabet: a\nstate 0 initial\nedge 0 {b} 0\n"),
            Err(DfaError::Symbol(_))
        ));
        assert!(matches!(
            Dfa::parse_text("alphabet: a\nstate 0 initial\nstate 0\n"),
            Err(DfaError::Format { line: 3, .. })
        ));
    }

    #[test]
    fn dot_has_all_states() {
        let dot = parity_with_duplicate().minimize().to_dot();
        assert!(dot.contains("doublecircle"));
        assert!(dot.contains("0 -> 1"));
    }

    #[test]
    fn distinguishing_trace_is_shortest() {
        let d = parity_with_duplicate();
        let u = Dfa::universal(ab());
        assert_eq!(d.equivalent(&u), Err(Trace::new(vec![Symbol(1)])));
    }
}
