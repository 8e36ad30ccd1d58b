//! Exhaustive reference procedures. Everything else in the crate is tested
//! against these.
//!
//! Assignments over `n` variables are enumerated lexicographically with
//! variable 0 as the most significant position and 0 before 1.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{AbdError, Result};
use crate::model::{AbductionInstance, Assignment, Constraint, ConstraintLanguage, Explanation, KnowledgeBase, Var, Variant};

/// Default cap on `2^|H| * 2^|V|` for oracle runs.
pub const DEFAULT_ORACLE_LIMIT: u128 = 1 << 24;

/// Largest variable count the enumeration kernels accept.
pub const MAX_ORACLE_VARS: usize = 40;

/// The work cap, read from `ABDKIT_ORACLE_LIMIT` when set.
pub fn oracle_limit() -> u128 {
    std::env::var("ABDKIT_ORACLE_LIMIT")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_LIMIT)
}

/// Fails when the instance exceeds the oracle work cap.
pub fn check_oracle_budget(inst: &AbductionInstance) -> Result<()> {
    let (h, v) = (inst.hypotheses.len(), inst.num_vars());
    let limit = oracle_limit();
    if h + v >= 127 || v > MAX_ORACLE_VARS || (1u128 << (h + v)) > limit {
        return Err(AbdError::TooLarge(format!(
            "2^|H| * 2^|V| = 2^{} exceeds the oracle limit {limit}",
            h + v
        )));
    }
    Ok(())
}

/// Evaluates a constraint under a total assignment.
pub fn eval_constraint(lang: &ConstraintLanguage, c: &Constraint, sigma: &Assignment) -> Result<bool> {
    let mut tuple = 0u64;
    for (i, &v) in c.args.iter().enumerate() {
        let bit = sigma.get(v).ok_or_else(|| AbdError::UnassignedVariable(format!("#{v}")))?;
        tuple |= (bit as u64) << i;
    }
    Ok(lang.get(c.relation).contains(tuple))
}

/// A KB with per-constraint membership tables for fast evaluation.
struct CompiledKb<'a> {
    constraints: &'a [Constraint],
    tables: Vec<Vec<u64>>,
}

impl<'a> CompiledKb<'a> {
    fn new(lang: &ConstraintLanguage, kb: &'a KnowledgeBase) -> Self {
        let tables = kb
            .constraints
            .iter()
            .map(|c| {
                let rel = lang.get(c.relation);
                let mut table = vec![0u64; (1usize << rel.arity()).div_ceil(64)];
                for &t in rel.tuples() {
                    table[(t >> 6) as usize] |= 1 << (t & 63);
                }
                table
            })
            .collect();
        CompiledKb {
            constraints: &kb.constraints,
            tables,
        }
    }

    #[inline]
    fn satisfied(&self, mask: u64) -> bool {
        self.constraints.iter().zip(&self.tables).all(|(c, table)| {
            let t = c.tuple_under(mask);
            table[(t >> 6) as usize] >> (t & 63) & 1 == 1
        })
    }
}

/// Converts the `rank`-th assignment in lexicographic order to a variable mask.
fn lex_mask(rank: u64, n: usize) -> u64 {
    (0..n).fold(0u64, |acc, v| acc | ((rank >> (n - 1 - v)) & 1) << v)
}

/// All models of `kb` over variables `0..n`, as masks (bit `v` is variable `v`),
/// in lexicographic order.
pub fn all_models(lang: &ConstraintLanguage, kb: &KnowledgeBase, n: usize) -> Vec<u64> {
    assert!(n <= MAX_ORACLE_VARS, "too many variables for enumeration");
    let compiled = CompiledKb::new(lang, kb);
    (0..1u64 << n)
        .map(|rank| lex_mask(rank, n))
        .filter(|&m| compiled.satisfied(m))
        .collect()
}

/// First model of `kb` over `0..n` in lexicographic order.
pub fn sat_bruteforce(lang: &ConstraintLanguage, kb: &KnowledgeBase, n: usize) -> Option<Assignment> {
    assert!(n <= MAX_ORACLE_VARS, "too many variables for enumeration");
    let compiled = CompiledKb::new(lang, kb);
    (0..1u64 << n)
        .map(|rank| lex_mask(rank, n))
        .find(|&m| compiled.satisfied(m))
        .map(|m| Assignment::from_mask(m, n))
}

/// Whether every model of `kb ∧ E` sets all of `M` to 1. Vacuously true
/// when `kb ∧ E` is unsatisfiable.
pub fn entails_bruteforce(
    lang: &ConstraintLanguage,
    kb: &KnowledgeBase,
    e: &BTreeSet<Var>,
    m: &BTreeSet<Var>,
    n: usize,
) -> bool {
    let e_mask = to_mask(e);
    let m_mask = to_mask(m);
    all_models(lang, kb, n)
        .into_iter()
        .filter(|&x| x & e_mask == e_mask)
        .all(|x| x & m_mask == m_mask)
}

pub(crate) fn to_mask(vars: &BTreeSet<Var>) -> u64 {
    vars.iter().fold(0u64, |acc, &v| acc | 1 << v)
}

/// Outcome of checking a candidate explanation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Valid,
    NotSubsetOfH,
    Inconsistent,
    NonEntailing,
}

/// The models of an instance's KB, enumerated once and queried repeatedly.
pub struct ModelTable {
    models: Vec<u64>,
    m_mask: u64,
    h: Vec<Var>,
    h_mask: u64,
}

impl ModelTable {
    pub fn new(inst: &AbductionInstance) -> Self {
        ModelTable {
            models: all_models(&inst.language, &inst.kb, inst.num_vars()),
            m_mask: to_mask(&inst.manifestations),
            h: inst.hypotheses.iter().copied().collect(),
            h_mask: to_mask(&inst.hypotheses),
        }
    }

    pub fn models(&self) -> &[u64] {
        &self.models
    }

    pub fn check_mask(&self, e: u64) -> Check {
        if e & !self.h_mask != 0 {
            return Check::NotSubsetOfH;
        }
        let mut any = false;
        for &x in &self.models {
            if x & e == e {
                any = true;
                if x & self.m_mask != self.m_mask {
                    return Check::NonEntailing;
                }
            }
        }
        if any {
            Check::Valid
        } else {
            Check::Inconsistent
        }
    }

    pub fn check(&self, e: &BTreeSet<Var>) -> Check {
        if e.iter().any(|&v| v >= 64) {
            return Check::NotSubsetOfH;
        }
        self.check_mask(to_mask(e))
    }

    /// Candidates of the given size in lexicographic order.
    fn of_size(&self, k: usize) -> impl Iterator<Item = BTreeSet<Var>> + '_ {
        self.h.iter().copied().combinations(k).map(|c| c.into_iter().collect())
    }

    /// First valid explanation of size `k`, if any.
    pub fn first_of_size(&self, k: usize) -> Option<Explanation> {
        if k > self.h.len() {
            return None;
        }
        self.of_size(k).find(|e| self.check(e) == Check::Valid).map(Explanation)
    }

    /// Every valid explanation, ordered by size and then lexicographically.
    pub fn all_explanations(&self) -> Vec<Explanation> {
        (0..=self.h.len())
            .flat_map(|k| self.of_size(k))
            .filter(|e| self.check(e) == Check::Valid)
            .map(Explanation)
            .collect()
    }

    /// The set of sizes `|E|` over all valid explanations.
    pub fn achievable_sizes(&self) -> BTreeSet<usize> {
        (0..=self.h.len()).filter(|&k| self.first_of_size(k).is_some()).collect()
    }
}

/// Checks a candidate explanation by enumeration.
pub fn check_explanation(inst: &AbductionInstance, e: &Explanation) -> Check {
    ModelTable::new(inst).check(e.vars())
}

/// Reference solver: candidates by increasing size, then lexicographic order.
pub fn oracle_abduce(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    let bound = inst.bound_for(variant)?;
    let table = ModelTable::new(inst);
    let sizes: Vec<usize> = match (variant, bound) {
        (Variant::Exact, Some(s)) => vec![s],
        (Variant::AtMost, Some(s)) => (0..=s.min(inst.hypotheses.len())).collect(),
        _ => (0..=inst.hypotheses.len()).collect(),
    };
    Ok(sizes.into_iter().find_map(|k| table.first_of_size(k)))
}
