//! Safety specifications: safe-LTL formulas and their automata.
//!
//! A formula is compiled into the DFA of its bad prefixes by formula
//! progression; complementing and minimizing that DFA gives the safety DFA.

mod dfa;
mod ltl;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::symbols::{Alphabet, Symbol, Trace};

pub use dfa::{Dfa, DfaError};
pub use ltl::{canonicalize, parse_safe_ltl, progress, visit_until, Formula, FormulaDisplay, SafeLtl};

/// Default bound on the number of residual formulas explored.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Largest alphabet whose symbols are enumerated explicitly.
pub const MAX_ENUMERATED_PROPOSITIONS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SafetyError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("negation applied to a compound formula at offset {position}")]
    NegationOnCompound { position: usize },
    #[error("unknown proposition `{name}` at offset {position}")]
    UnknownProposition { name: String, position: usize },
    #[error("residual automaton exceeds {cap} states")]
    StateBlowup { cap: usize },
    #[error("alphabet has {0} propositions; project to the formula's propositions first")]
    AlphabetTooLarge(usize),
}

/// Formula progression (alias kept close to the textbook name).
pub fn formula_progression(phi: &Formula, sigma: Symbol) -> Formula {
    progress(phi, sigma)
}

/// DFA accepting exactly the finite bad prefixes of `phi`.
pub fn build_violating_dfa(phi: &SafeLtl) -> Result<Dfa, SafetyError> {
    build_violating_dfa_with_cap(phi, DEFAULT_STATE_CAP)
}

pub fn build_violating_dfa_with_cap(phi: &SafeLtl, cap: usize) -> Result<Dfa, SafetyError> {
    let alphabet = &phi.alphabet;
    if alphabet.len() > MAX_ENUMERATED_PROPOSITIONS {
        return Err(SafetyError::AlphabetTooLarge(alphabet.len()));
    }
    let k = alphabet.symbol_count();
    let mut ids: HashMap<Formula, u32> = HashMap::new();
    let mut residuals: Vec<Formula> = Vec::new();
    let mut trans: Vec<u32> = Vec::new();
    let mut queue = VecDeque::new();

    let intern = |f: Formula,
                      ids: &mut HashMap<Formula, u32>,
                      residuals: &mut Vec<Formula>,
                      queue: &mut VecDeque<u32>|
     -> Result<u32, SafetyError> {
        if let Some(&id) = ids.get(&f) {
            return Ok(id);
        }
        if residuals.len() >= cap {
            return Err(SafetyError::StateBlowup { cap });
        }
        let id = residuals.len() as u32;
        ids.insert(f.clone(), id);
        residuals.push(f);
        queue.push_back(id);
        Ok(id)
    };

    let root = canonicalize(phi.root.clone());
    intern(root, &mut ids, &mut residuals, &mut queue)?;
    while let Some(q) = queue.pop_front() {
        let f = residuals[q as usize].clone();
        let base = q as usize * k;
        if trans.len() < base + k {
            trans.resize(base + k, 0);
        }
        for sigma in alphabet.symbols() {
            let next = progress(&f, sigma);
            let id = intern(next, &mut ids, &mut residuals, &mut queue)?;
            trans[base + sigma.0 as usize] = id;
        }
    }
    trans.resize(residuals.len() * k, 0);

    // A residual with no infinite continuation is unsatisfiable, hence
    // equivalent to `false`. Keep the greatest set of states that can avoid
    // `false` forever.
    let n = residuals.len();
    let is_false = |q: usize| residuals[q] == Formula::False;
    let mut live: Vec<bool> = (0..n).map(|q| !is_false(q)).collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if live[q] && !(0..k).any(|c| live[trans[q * k + c] as usize]) {
                live[q] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let false_id = match ids.get(&Formula::False) {
        Some(&id) => id,
        None => {
            // No violation is possible; still add the sink for a uniform shape.
            residuals.push(Formula::False);
            live.push(false);
            trans.extend(std::iter::repeat_n((residuals.len() - 1) as u32, k));
            (residuals.len() - 1) as u32
        }
    };
    let n = residuals.len();
    for q in 0..n {
        for c in 0..k {
            let t = trans[q * k + c] as usize;
            if !live[t] {
                trans[q * k + c] = false_id;
            }
        }
    }
    if !live[0] {
        // The formula itself is unsatisfiable: every prefix, even the empty
        // one, is bad.
        for c in 0..k {
            trans[c] = 0;
        }
    }
    let accepting: Vec<bool> = (0..n).map(|q| !live[q] && (q == false_id as usize || q == 0)).collect();
    let names: Vec<String> = residuals
        .iter()
        .map(|f| f.display(alphabet).to_string())
        .collect();
    let dfa = Dfa::from_parts(alphabet.clone(), 0, accepting, trans)
        .expect("progression yields a complete table")
        .with_names(names);
    Ok(dfa.trim())
}

/// Flip acceptance and minimize. Unreachable states are dropped; the result
/// keeps an explicit rejecting sink whenever one is needed for totality.
pub fn complement_and_minimize(d: &Dfa) -> Dfa {
    d.complement().minimize()
}

/// The minimized safety DFA of `phi`.
pub fn safety_dfa(phi: &SafeLtl) -> Result<Dfa, SafetyError> {
    Ok(complement_and_minimize(&build_violating_dfa(phi)?))
}

pub fn dfa_accepts(d: &Dfa, t: &Trace) -> bool {
    d.accepts(t)
}

impl SafeLtl {
    /// Restrict the alphabet to the propositions the formula mentions. The
    /// resulting automaton can be lifted back with [`Dfa::lift_to`].
    pub fn project_to_mentioned(&self) -> SafeLtl {
        let mut used = vec![false; self.alphabet.len()];
        mark_atoms(&self.root, &mut used);
        let names: Vec<&str> = self
            .alphabet
            .propositions()
            .iter()
            .zip(&used)
            .filter(|(_, u)| **u)
            .map(|(n, _)| n.as_str())
            .collect();
        let target = Alphabet::new(names).expect("subset of a valid alphabet");
        let remap: Vec<usize> = self
            .alphabet
            .propositions()
            .iter()
            .map(|n| target.index_of(n).unwrap_or(usize::MAX))
            .collect();
        SafeLtl {
            root: rename_atoms(&self.root, &remap),
            alphabet: target,
        }
    }
}

fn mark_atoms(f: &Formula, used: &mut [bool]) {
    match f {
        Formula::Atom(i) | Formula::NegAtom(i) => used[*i] = true,
        Formula::And(v) | Formula::Or(v) => v.iter().for_each(|g| mark_atoms(g, used)),
        Formula::Next(g) | Formula::Globally(g) => mark_atoms(g, used),
        Formula::True | Formula::False => {}
    }
}

fn rename_atoms(f: &Formula, remap: &[usize]) -> Formula {
    match f {
        Formula::Atom(i) => Formula::Atom(remap[*i]),
        Formula::NegAtom(i) => Formula::NegAtom(remap[*i]),
        Formula::And(v) => Formula::And(v.iter().map(|g| rename_atoms(g, remap)).collect()),
        Formula::Or(v) => Formula::Or(v.iter().map(|g| rename_atoms(g, remap)).collect()),
        Formula::Next(g) => Formula::next(rename_atoms(g, remap)),
        Formula::Globally(g) => Formula::globally(rename_atoms(g, remap)),
        other => other.clone(),
    }
}
