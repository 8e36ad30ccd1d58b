use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;

use crate::error::{AbdError, Result};
use crate::format::syntax;
use crate::model::{AbductionInstance, Assignment, Explanation};
use crate::schaefer::{Clause, Lit};

/// Largest variable count accepted by [`wsat_bruteforce`].
pub const MAX_WSAT_VARS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WsatMode {
    Exact,
    AtMost,
}

impl WsatMode {
    pub fn label(self) -> &'static str {
        match self {
            WsatMode::Exact => "eq",
            WsatMode::AtMost => "le",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Any,
    Monotone,
    Antimonotone,
}

/// A CNF together with a target weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsatInstance {
    pub variables: Vec<String>,
    pub clauses: Vec<Clause>,
    pub k: usize,
    pub mode: WsatMode,
    /// Why the image is a canonical constant instance, if it is one.
    pub note: Option<String>,
}

impl WsatInstance {
    pub fn new(variables: Vec<String>, clauses: Vec<Clause>, k: usize, mode: WsatMode) -> Self {
        WsatInstance { variables, clauses, k, mode, note: None }
    }

    /// No variables and a single empty clause.
    pub fn trivially_false(note: impl Into<String>) -> Self {
        WsatInstance { note: Some(note.into()), ..Self::new(vec![], vec![vec![]], 0, WsatMode::Exact) }
    }

    /// No variables, no clauses, weight 0.
    pub fn trivially_true(note: impl Into<String>) -> Self {
        WsatInstance { note: Some(note.into()), ..Self::new(vec![], vec![], 0, WsatMode::Exact) }
    }

    pub fn is_trivially_false(&self) -> bool {
        self.variables.is_empty() && self.clauses == [Vec::<Lit>::new()]
    }

    /// The widest clause, 0 for an empty CNF.
    pub fn width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn polarity(&self) -> Polarity {
        let lits = || self.clauses.iter().flatten();
        if lits().all(|l| l.positive) {
            Polarity::Monotone
        } else if lits().all(|l| !l.positive) {
            Polarity::Antimonotone
        } else {
            Polarity::Any
        }
    }

    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(a.values())))
    }

    /// Reads an assignment back as the explanation it encodes. Variables
    /// carry the names of the source instance's hypotheses.
    pub fn to_explanation(&self, inst: &AbductionInstance, a: &Assignment) -> Option<Explanation> {
        let names: Vec<&str> = a.true_vars().into_iter().map(|i| self.variables[i].as_str()).collect();
        inst.explanation_from_names(&names)
    }
}

/// The first satisfying assignment of admissible weight, visiting weights
/// in increasing order and each weight lexicographically.
pub fn wsat_bruteforce(w: &WsatInstance) -> Result<Option<Assignment>> {
    let n = w.variables.len();
    if n > MAX_WSAT_VARS {
        return Err(AbdError::TooLarge(format!("{n} WSAT variables")));
    }
    let weights = match w.mode {
        WsatMode::Exact => w.k..=w.k,
        WsatMode::AtMost => 0..=w.k,
    };
    for k in weights.filter(|&k| k <= n) {
        for ones in (0..n).combinations(k) {
            let mut values = vec![false; n];
            for i in ones {
                values[i] = true;
            }
            let a = Assignment::new(values);
            if w.satisfied_by(&a) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

impl fmt::Display for WsatInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p wsat {} {} {} {}", self.variables.len(), self.clauses.len(), self.k, self.mode.label())?;
        if let Some(note) = &self.note {
            writeln!(f, "c note {note}")?;
        }
        for (i, name) in self.variables.iter().enumerate() {
            writeln!(f, "c var {} {name}", i + 1)?;
        }
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                write!(f, "{} ", if l.positive { v } else { -v })?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses the output of `Display`. Variables without a `c var` line get
/// the name `x<i>`.
pub fn parse_wsat(text: &str) -> Result<WsatInstance> {
    let mut header: Option<(usize, usize, usize, WsatMode)> = None;
    let mut names: Vec<Option<String>> = Vec::new();
    let mut note = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["p", "wsat", n, m, k, mode] => {
                let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(line, format!("bad number `{s}`")));
                let mode = match *mode {
                    "eq" => WsatMode::Exact,
                    "le" => WsatMode::AtMost,
                    other => return Err(syntax(line, format!("unknown mode `{other}`"))),
                };
                let n = num(n)?;
                header = Some((n, num(m)?, num(k)?, mode));
                names = vec![None; n];
            }
            ["c", "var", idx, name] => {
                let idx: usize = idx.parse().map_err(|_| syntax(line, "bad variable index"))?;
                let slot = names
                    .get_mut(idx.wrapping_sub(1))
                    .ok_or_else(|| syntax(line, "variable index out of range"))?;
                *slot = Some(name.to_string());
            }
            ["c", "note", ..] => note = Some(raw.trim_start()[7..].trim().to_string()),
            ["c", ..] => {}
            _ => {
                let (n, ..) = header.ok_or_else(|| syntax(line, "clause before header"))?;
                let mut clause = Vec::new();
                let mut ended = false;
                for t in &toks {
                    let v: i64 = t.parse().map_err(|_| syntax(line, format!("bad literal `{t}`")))?;
                    if ended {
                        return Err(syntax(line, "literal after terminating 0"));
                    }
                    if v == 0 {
                        ended = true;
                        continue;
                    }
                    let var = v.unsigned_abs() as usize - 1;
                    if var >= n {
                        return Err(syntax(line, format!("literal {v} out of range")));
                    }
                    clause.push(Lit { var, positive: v > 0 });
                }
                if !ended {
                    return Err(syntax(line, "clause is not 0-terminated"));
                }
                clauses.push(clause);
            }
        }
    }
    let (n, m, k, mode) = header.ok_or_else(|| syntax(1, "missing header"))?;
    if clauses.len() != m {
        return Err(syntax(1, format!("header announces {m} clauses, found {}", clauses.len())));
    }
    let variables = names
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.unwrap_or_else(|| format!("x{}", i + 1)))
        .collect();
    let _ = n;
    Ok(WsatInstance { variables, clauses, k, mode, note })
}

/// Distinct clauses, each with sorted literals.
pub(crate) fn tidy(clauses: impl IntoIterator<Item = Clause>) -> Vec<Clause> {
    let set: BTreeSet<Clause> = clauses
        .into_iter()
        .map(|mut c| {
            c.sort();
            c.dedup();
            c
        })
        .collect();
    set.into_iter().collect()
}
