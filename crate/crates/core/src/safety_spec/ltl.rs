//! Syntactically safe LTL: parsing, canonical forms and formula progression.

use std::fmt;

use crate::symbols::{Alphabet, Symbol};

use super::SafetyError;

/// A formula of the safe fragment. Negation only occurs on atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    False,
    True,
    Atom(usize),
    NegAtom(usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Next(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula::Or(parts)
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    /// Largest proposition index mentioned, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Atom(i) | Formula::NegAtom(i) => Some(*i),
            Formula::And(v) | Formula::Or(v) => v.iter().filter_map(|f| f.max_atom()).max(),
            Formula::Next(f) | Formula::Globally(f) => f.max_atom(),
        }
    }

    /// Negation pushed through the boolean connectives and `X`. `G` has no
    /// dual inside the fragment.
    fn negate(&self) -> Result<Formula, SafetyError> {
        Ok(match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(i) => Formula::NegAtom(*i),
            Formula::NegAtom(i) => Formula::Atom(*i),
            Formula::And(v) => Formula::Or(v.iter().map(|f| f.negate()).collect::<Result<_, _>>()?),
            Formula::Or(v) => Formula::And(v.iter().map(|f| f.negate()).collect::<Result<_, _>>()?),
            Formula::Next(f) => Formula::next(f.negate()?),
            Formula::Globally(_) => return Err(SafetyError::NegationOnCompound { position: 0 }),
        })
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            alphabet,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    alphabet: &'a Alphabet,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.formula, self.alphabet, f)
    }
}

fn write_formula(phi: &Formula, a: &Alphabet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let name = |i: usize| {
        a.propositions()
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("p{i}"))
    };
    match phi {
        Formula::True => write!(f, "true"),
        Formula::False => write!(f, "false"),
        Formula::Atom(i) => write!(f, "{}", name(*i)),
        Formula::NegAtom(i) => write!(f, "!{}", name(*i)),
        Formula::And(v) | Formula::Or(v) => {
            let op = if matches!(phi, Formula::And(_)) { " & " } else { " | " };
            write!(f, "(")?;
            for (k, sub) in v.iter().enumerate() {
                if k > 0 {
                    write!(f, "{op}")?;
                }
                write_formula(sub, a, f)?;
            }
            write!(f, ")")
        }
        Formula::Next(sub) => {
            write!(f, "X ")?;
            write_formula(sub, a, f)
        }
        Formula::Globally(sub) => {
            write!(f, "G ")?;
            write_formula(sub, a, f)
        }
    }
}

/// A parsed safety formula bound to its alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeLtl {
    pub root: Formula,
    pub alphabet: Alphabet,
}

impl fmt::Display for SafeLtl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(&self.root, &self.alphabet, f)
    }
}

/// Flattens nested connectives, folds constants, sorts and deduplicates
/// operands. Complementary literals under one connective are folded too.
pub fn canonicalize(phi: Formula) -> Formula {
    match phi {
        Formula::And(parts) => {
            let mut flat = Vec::new();
            for p in parts {
                match canonicalize(p) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::And(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            flat.sort();
            flat.dedup();
            if has_complementary_literals(&flat) {
                return Formula::False;
            }
            match flat.len() {
                0 => Formula::True,
                1 => flat.pop().unwrap(),
                _ => Formula::And(flat),
            }
        }
        Formula::Or(parts) => {
            let mut flat = Vec::new();
            for p in parts {
                match canonicalize(p) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            flat.sort();
            flat.dedup();
            if has_complementary_literals(&flat) {
                return Formula::True;
            }
            match flat.len() {
                0 => Formula::False,
                1 => flat.pop().unwrap(),
                _ => Formula::Or(flat),
            }
        }
        Formula::Next(f) => Formula::next(canonicalize(*f)),
        Formula::Globally(f) => match canonicalize(*f) {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            g => Formula::globally(g),
        },
        other => other,
    }
}

fn has_complementary_literals(sorted: &[Formula]) -> bool {
    sorted.iter().any(|f| match f {
        Formula::Atom(i) => sorted.binary_search(&Formula::NegAtom(*i)).is_ok(),
        _ => false,
    })
}

/// Residual obligation after reading `sigma`, in canonical form.
pub fn progress(phi: &Formula, sigma: Symbol) -> Formula {
    canonicalize(progress_raw(phi, sigma))
}

fn progress_raw(phi: &Formula, sigma: Symbol) -> Formula {
    match phi {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(i) => bool_formula(sigma.has(*i)),
        Formula::NegAtom(i) => bool_formula(!sigma.has(*i)),
        Formula::And(v) => Formula::And(v.iter().map(|f| progress_raw(f, sigma)).collect()),
        Formula::Or(v) => Formula::Or(v.iter().map(|f| progress_raw(f, sigma)).collect()),
        Formula::Next(f) => (**f).clone(),
        Formula::Globally(f) => Formula::And(vec![progress_raw(f, sigma), phi.clone()]),
    }
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u32),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SafetyError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => {
                out.push((start, Tok::Not));
                i += 1;
            }
            '&' => {
                out.push((start, Tok::And));
                i += if bytes.get(i + 1) == Some(&'&') { 2 } else { 1 };
            }
            '|' => {
                out.push((start, Tok::Or));
                i += if bytes.get(i + 1) == Some(&'|') { 2 } else { 1 };
            }
            '(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((start, Tok::Comma));
                i += 1;
            }
            '-' if bytes.get(i + 1) == Some(&'>') => {
                out.push((start, Tok::Implies));
                i += 2;
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                let n = s
                    .parse()
                    .map_err(|_| SafetyError::Syntax { position: start, message: "integer too large".into() })?;
                out.push((start, Tok::Int(n)));
            }
            c if c.is_alphanumeric() || c == '_' => {
                while i < bytes.len()
                    && (bytes[i].is_alphanumeric()
                        || bytes[i] == '_'
                        || (bytes[i] == '-' && bytes.get(i + 1) != Some(&'>')))
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(bytes[start..i].iter().collect())));
            }
            other => {
                return Err(SafetyError::Syntax {
                    position: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SafetyError> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            _ => Err(SafetyError::Syntax {
                position: at,
                message: format!("expected {what}"),
            }),
        }
    }

    fn implication(&mut self) -> Result<Formula, SafetyError> {
        let at = self.offset();
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implication()?;
            let neg = lhs.negate().map_err(|_| SafetyError::NegationOnCompound { position: at })?;
            return Ok(Formula::Or(vec![neg, rhs]));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, SafetyError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula, SafetyError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula, SafetyError> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                match self.unary()? {
                    Formula::Atom(i) => Ok(Formula::NegAtom(i)),
                    Formula::True => Ok(Formula::False),
                    Formula::False => Ok(Formula::True),
                    _ => Err(SafetyError::NegationOnCompound { position: at }),
                }
            }
            Some(Tok::Ident(name)) if name == "X" || name == "G" => {
                let op = name.clone();
                self.bump();
                let inner = self.unary()?;
                Ok(if op == "X" { Formula::next(inner) } else { Formula::globally(inner) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, SafetyError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let f = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "visit_until" => {
                    self.expect(Tok::LParen, "`(` after visit_until")?;
                    let a = self.implication()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.implication()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let k_at = self.offset();
                    let k = match self.bump() {
                        Some(Tok::Int(k)) => k,
                        _ => {
                            return Err(SafetyError::Syntax {
                                position: k_at,
                                message: "expected step count".into(),
                            })
                        }
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(visit_until(a, b, k))
                }
                _ => match self.alphabet.index_of(&name) {
                    Some(i) => Ok(Formula::Atom(i)),
                    None => Err(SafetyError::UnknownProposition { name, position: at }),
                },
            },
            _ => Err(SafetyError::Syntax {
                position: at,
                message: "expected a formula".into(),
            }),
        }
    }
}

/// "Hold `a` for `k` steps unless `b` is visited":
/// `φ(a,b,0) = a`, `φ(a,b,k) = a ∧ (b ∨ X φ(a,b,k−1))`.
pub fn visit_until(a: Formula, b: Formula, k: u32) -> Formula {
    let mut phi = a.clone();
    for _ in 0..k {
        phi = Formula::And(vec![a.clone(), Formula::Or(vec![b.clone(), Formula::next(phi)])]);
    }
    phi
}

pub fn parse_safe_ltl(text: &str, alphabet: &Alphabet) -> Result<SafeLtl, SafetyError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        alphabet,
    };
    let root = p.implication()?;
    if p.pos < p.toks.len() {
        return Err(SafetyError::Syntax {
            position: p.offset(),
            message: "trailing input".into(),
        });
    }
    Ok(SafeLtl {
        root,
        alphabet: alphabet.clone(),
    })
}
