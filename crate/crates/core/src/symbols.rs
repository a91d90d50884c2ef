//! Atomic propositions, symbols over `2^Π`, traces and demonstration corpora.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Symbols are stored as bitsets, so the alphabet is capped at this many propositions.
pub const MAX_PROPOSITIONS: usize = 30;

/// Line content denoting the empty trace in trace files.
pub const EMPTY_TRACE: &str = "-";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("malformed symbol `{text}`")]
    MalformedSymbol { text: String },
    #[error("line {line}, column {column}: {source}")]
    AtLine {
        line: usize,
        column: usize,
        #[source]
        source: Box<SymbolError>,
    },
    #[error("invalid proposition name `{0}`")]
    InvalidProposition(String),
    #[error("duplicate proposition `{0}`")]
    DuplicateProposition(String),
    #[error("alphabet has {0} propositions, at most {MAX_PROPOSITIONS} are supported")]
    TooManyPropositions(usize),
    #[error("demonstration set is empty")]
    EmptyDemoSet,
    #[error("trace file declares alphabet {found:?}, expected {expected:?}")]
    AlphabetMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("trace file has no `alphabet:` header")]
    MissingAlphabet,
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// The ordered proposition set Π.
#[derive(Debug, Clone)]
pub struct Alphabet {
    propositions: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, SymbolError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut propositions = Vec::new();
        let mut index = HashMap::new();
        for name in names {
            let name = name.into();
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || "{},".contains(c)) {
                return Err(SymbolError::InvalidProposition(name));
            }
            if index.contains_key(&name) {
                return Err(SymbolError::DuplicateProposition(name));
            }
            index.insert(name.clone(), propositions.len());
            propositions.push(name);
        }
        if propositions.len() > MAX_PROPOSITIONS {
            return Err(SymbolError::TooManyPropositions(propositions.len()));
        }
        Ok(Self {
            propositions,
            index,
        })
    }

    /// Parses a comma-separated proposition list, e.g. `fish,ship`.
    pub fn parse(list: &str) -> Result<Self, SymbolError> {
        let list = list.trim();
        if list.is_empty() {
            return Self::new(Vec::<String>::new());
        }
        Self::new(list.split(',').map(|p| p.trim().to_string()))
    }

    pub fn len(&self) -> usize {
        self.propositions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.propositions.is_empty()
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Number of symbols, `2^|Π|`.
    pub fn symbol_count(&self) -> usize {
        1usize << self.propositions.len()
    }

    /// All symbols in ascending bit order, starting with `∅`.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.symbol_count() as u32).map(Symbol)
    }

    pub fn symbol<S: AsRef<str>>(&self, props: &[S]) -> Result<Symbol, SymbolError> {
        let mut bits = 0u32;
        for p in props {
            let i = self
                .index_of(p.as_ref())
                .ok_or_else(|| SymbolError::UnknownProposition(p.as_ref().to_string()))?;
            bits |= 1 << i;
        }
        Ok(Symbol(bits))
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        (symbol.0 as u64) < (1u64 << self.propositions.len())
    }

    /// Parses `{p1,p2}`; `{}` is the empty symbol. Case-sensitive.
    pub fn parse_symbol(&self, text: &str) -> Result<Symbol, SymbolError> {
        let malformed = || SymbolError::MalformedSymbol {
            text: text.to_string(),
        };
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(malformed)?;
        if inner.trim().is_empty() {
            return Ok(Symbol::EMPTY);
        }
        let mut bits = 0u32;
        for name in inner.split(',') {
            let name = name.trim();
            if name.is_empty() {
                return Err(malformed());
            }
            let i = self
                .index_of(name)
                .ok_or_else(|| SymbolError::UnknownProposition(name.to_string()))?;
            bits |= 1 << i;
        }
        Ok(Symbol(bits))
    }

    pub fn render_symbol(&self, symbol: Symbol) -> String {
        let names: Vec<&str> = symbol
            .members()
            .map(|i| self.propositions[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parses whitespace-separated symbols; a lone `-` is the empty trace.
    pub fn parse_trace(&self, line: &str) -> Result<Trace, SymbolError> {
        if line.trim() == EMPTY_TRACE {
            return Ok(Trace::default());
        }
        let mut symbols = Vec::new();
        for (column, tok) in tokens_with_columns(line) {
            let s = self.parse_symbol(tok).map_err(|e| SymbolError::AtLine {
                line: 0,
                column,
                source: Box::new(e),
            })?;
            symbols.push(s);
        }
        Ok(Trace(symbols))
    }

    pub fn render_trace(&self, trace: &Trace) -> String {
        if trace.is_empty() {
            return EMPTY_TRACE.to_string();
        }
        trace
            .iter()
            .map(|s| self.render_symbol(*s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Renders with a single-character legend (e.g. `s={ship}`); symbols
    /// missing from the legend fall back to brace notation.
    pub fn render_trace_abbrev(&self, trace: &Trace, legend: &[(char, Symbol)]) -> String {
        trace
            .iter()
            .map(|s| {
                legend
                    .iter()
                    .find(|(_, sym)| sym == s)
                    .map(|(c, _)| c.to_string())
                    .unwrap_or_else(|| self.render_symbol(*s))
            })
            .collect::<Vec<_>>()
            .join("")
    }

    /// Header line used by trace and automaton files.
    pub fn header(&self) -> String {
        format!("alphabet: {}", self.propositions.join(","))
    }

    /// Restricts a symbol of `self` to the propositions of `target`, by name.
    pub fn project(&self, symbol: Symbol, target: &Alphabet) -> Symbol {
        let mut bits = 0;
        for i in symbol.members() {
            if let Some(j) = target.index_of(&self.propositions[i]) {
                bits |= 1 << j;
            }
        }
        Symbol(bits)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.propositions == other.propositions
    }
}

impl Eq for Alphabet {}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.propositions.join(","))
    }
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

/// An element of `2^Π`, as a bitset over the owning alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Symbol(pub u32);

impl Symbol {
    pub const EMPTY: Symbol = Symbol(0);

    pub fn has(self, prop: usize) -> bool {
        self.0 & (1 << prop) != 0
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 & (1 << i) != 0)
    }

    pub fn union(self, other: Symbol) -> Symbol {
        Symbol(self.0 | other.0)
    }
}

/// A finite sequence of symbols `ω₁…ωₙ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Trace(pub Vec<Symbol>);

impl Trace {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }
}

impl FromIterator<Symbol> for Trace {
    fn from_iter<T: IntoIterator<Item = Symbol>>(iter: T) -> Self {
        Trace(iter.into_iter().collect())
    }
}

/// A multiset of demonstrations Ω. Duplicates encode preference frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoSet {
    alphabet: Alphabet,
    traces: BTreeMap<Trace, usize>,
}

impl DemoSet {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            traces: BTreeMap::new(),
        }
    }

    pub fn from_traces<I>(alphabet: Alphabet, traces: I) -> Result<Self, SymbolError>
    where
        I: IntoIterator<Item = Trace>,
    {
        let mut set = Self::new(alphabet);
        for t in traces {
            set.add(t, 1);
        }
        if set.is_empty() {
            return Err(SymbolError::EmptyDemoSet);
        }
        Ok(set)
    }

    pub fn add(&mut self, trace: Trace, count: usize) {
        if count > 0 {
            *self.traces.entry(trace).or_insert(0) += count;
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Distinct traces with their multiplicities, in trace order.
    pub fn iter(&self) -> impl Iterator<Item = (&Trace, usize)> {
        self.traces.iter().map(|(t, c)| (t, *c))
    }

    pub fn distinct(&self) -> usize {
        self.traces.len()
    }

    /// `n_Ω`, counting multiplicities.
    pub fn total(&self) -> usize {
        self.traces.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn multiplicity(&self, trace: &Trace) -> usize {
        self.traces.get(trace).copied().unwrap_or(0)
    }

    pub fn render(&self) -> String {
        let mut out = self.alphabet.header();
        out.push('\n');
        for (t, c) in self.iter() {
            for _ in 0..c {
                out.push_str(&self.alphabet.render_trace(t));
                out.push('\n');
            }
        }
        out
    }
}

/// Parses a trace file. Blank and `#` lines are skipped. An optional
/// `alphabet:` header must agree with `alphabet` when both are present.
pub fn parse_demos(text: &str, alphabet: Option<&Alphabet>) -> Result<DemoSet, SymbolError> {
    let mut declared: Option<Alphabet> = None;
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            let a = Alphabet::parse(rest).map_err(|e| SymbolError::AtLine {
                line: n + 1,
                column: 1,
                source: Box::new(e),
            })?;
            declared = Some(a);
            continue;
        }
        lines.push((n + 1, raw));
    }
    let alphabet = match (alphabet, declared) {
        (Some(given), Some(found)) => {
            if given.propositions() != found.propositions() {
                return Err(SymbolError::AlphabetMismatch {
                    expected: given.propositions().to_vec(),
                    found: found.propositions().to_vec(),
                });
            }
            given.clone()
        }
        (Some(given), None) => given.clone(),
        (None, Some(found)) => found,
        (None, None) => return Err(SymbolError::MissingAlphabet),
    };
    let mut set = DemoSet::new(alphabet);
    for (line_no, raw) in lines {
        let trace = set.alphabet.parse_trace(raw).map_err(|e| match e {
            SymbolError::AtLine { column, source, .. } => SymbolError::AtLine {
                line: line_no,
                column,
                source,
            },
            other => other,
        })?;
        set.add(trace, 1);
    }
    if set.is_empty() {
        return Err(SymbolError::EmptyDemoSet);
    }
    Ok(set)
}

pub fn load_demos(path: &Path, alphabet: Option<&Alphabet>) -> Result<DemoSet, SymbolError> {
    let text = std::fs::read_to_string(path).map_err(|e| SymbolError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_demos(&text, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fs() -> Alphabet {
        Alphabet::parse("fish,ship").unwrap()
    }

    #[test]
    fn parse_empty_symbol() {
        assert_eq!(fs().parse_symbol("{}").unwrap(), Symbol::EMPTY);
    }

    #[test]
    fn parse_singleton() {
        let a = Alphabet::parse("shipwreck,fish,coral-reefs").unwrap();
        let s = a.parse_symbol("{shipwreck}").unwrap();
        assert_eq!(s, Symbol(1));
        assert_eq!(a.render_symbol(s), "{shipwreck}");
    }

    #[test]
    fn parse_unknown_proposition() {
        assert_eq!(
            fs().parse_symbol("{ship,lava}"),
            Err(SymbolError::UnknownProposition("lava".into()))
        );
    }

    #[test]
    fn parse_is_case_sensitive() {
        assert!(matches!(
            fs().parse_symbol("{Fish}"),
            Err(SymbolError::UnknownProposition(_))
        ));
    }

    #[test]
    fn malformed_symbols() {
        for t in ["fish", "{fish", "{fish,}", "{,}", ""] {
            assert!(
                matches!(fs().parse_symbol(t), Err(SymbolError::MalformedSymbol { .. })),
                "{t}"
            );
        }
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::parse("a,a").is_err());
        assert!(Alphabet::new(["a b"]).is_err());
        assert!(Alphabet::new([""]).is_err());
        let many: Vec<String> = (0..31).map(|i| format!("p{i}")).collect();
        assert_eq!(
            Alphabet::new(many),
            Err(SymbolError::TooManyPropositions(31))
        );
    }

    #[test]
    fn duplicate_lines_become_multiplicity() {
        let text = "alphabet: f,s\n{} {s} {} {f}\n{} {s} {} {f}\n";
        let d = parse_demos(text, None).unwrap();
        assert_eq!(d.distinct(), 1);
        assert_eq!(d.total(), 2);
    }

    #[test]
    fn empty_file_is_rejected() {
        let a = fs();
        assert_eq!(parse_demos("", Some(&a)), Err(SymbolError::EmptyDemoSet));
        assert_eq!(
            parse_demos("# only a comment\n\n", Some(&a)),
            Err(SymbolError::EmptyDemoSet)
        );
    }

    #[test]
    fn error_carries_line_and_column() {
        let text = "alphabet: f,s\n{f} {s}\n{f}  {x}\n";
        match parse_demos(text, None) {
            Err(SymbolError::AtLine { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_must_match_given_alphabet() {
        let text = "alphabet: ship,fish\n{fish}\n";
        assert!(matches!(
            parse_demos(text, Some(&fs())),
            Err(SymbolError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn load_from_file_and_missing_file() {
        let dir = std::env::temp_dir().join(format!("pdfa-synth-sym-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("demos.txt");
        std::fs::write(&p, "alphabet: fish,ship\n# five demos\n{} {ship}\n{fish}\n{ship}\n{}\n{fish} {ship}\n").unwrap();
        let d = load_demos(&p, None).unwrap();
        assert_eq!(d.total(), 5);
        assert!(matches!(
            load_demos(&dir.join("nope.txt"), None),
            Err(SymbolError::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn symbol_round_trip(n in 0usize..=4, bits in 0u32..16) {
            let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let a = Alphabet::new(names).unwrap();
            let s = Symbol(bits & ((1 << n) - 1));
            prop_assert_eq!(a.parse_symbol(&a.render_symbol(s)).unwrap(), s);
        }

        #[test]
        fn multiset_cardinality_preserved(lines in prop::collection::vec(prop::collection::vec(0u32..4, 0..5), 1..20)) {
            let a = Alphabet::parse("x,y").unwrap();
            let mut text = String::from("alphabet: x,y\n");
            for l in &lines {
                let t: Trace = l.iter().map(|b| Symbol(*b)).collect();
                text.push_str(&a.render_trace(&t));
                text.push('\n');
            }
            let d = parse_demos(&text, None).unwrap();
            prop_assert_eq!(d.total(), lines.len());
        }
    }
}
