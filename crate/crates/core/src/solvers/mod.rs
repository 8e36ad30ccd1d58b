//! Specialised and fixed-parameter algorithms for abduction.
//!
//! Every solver returns `Ok(None)` when no explanation exists and an
//! error when its input is outside the region it was written for.

mod affine2;
mod dualhorn;
mod essneg;
mod esspos;

pub use affine2::{cluster_decomposition, solve_2affine, ClusterDecomposition};
pub use dualhorn::{explainer_sets, preprocess_dualhorn, solve_m_setcover, ExplainerSets, ImplicationKb};
pub use essneg::solve_ess_negative_le;
pub use esspos::solve_ess_positive;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::error::{AbdError, Result};
use crate::lattice::{closure_flags, ClosureFlags};
use crate::model::{AbductionInstance, Explanation, Var, Variant};
use crate::schaefer::{explains, sat_poly, Clause, ClauseForm, ClauseKind, Lit};

/// Largest `|H|` for which the enumeration solvers run.
pub const MAX_ENUMERATION_H: usize = 40;

pub(crate) fn flags_of(inst: &AbductionInstance) -> ClosureFlags {
    closure_flags(&inst.language)
}

pub(crate) fn precondition(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(AbdError::Precondition(what.to_string()))
    }
}

/// The plain problem as the bounded one with `s = |H|`.
pub fn abd_to_le(inst: &AbductionInstance) -> AbductionInstance {
    inst.with_size(Some(inst.hypotheses.len()))
}

fn schaefer_form(inst: &AbductionInstance) -> Result<ClauseForm> {
    let kind = ClauseKind::for_flags(&flags_of(inst))
        .ok_or_else(|| AbdError::Precondition("the language is not Schaefer".into()))?;
    ClauseForm::of_instance(inst, kind)
}

fn sizes_for(inst: &AbductionInstance, variant: Variant) -> Result<Vec<usize>> {
    let h = inst.hypotheses.len();
    Ok(match inst.bound_for(variant)? {
        None => (0..=h).collect(),
        Some(s) if variant == Variant::Exact => {
            if s <= h {
                vec![s]
            } else {
                vec![]
            }
        }
        Some(s) => (0..=s.min(h)).collect(),
    })
}

/// Tries every subset of `H` in canonical order (by size, then
/// lexicographically) and verifies it with the polynomial kernels.
pub fn solve_by_h_enumeration(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    let cf = schaefer_form(inst)?;
    let h: Vec<Var> = inst.hypotheses.iter().copied().collect();
    if h.len() > MAX_ENUMERATION_H {
        return Err(AbdError::TooLarge(format!("|H| = {} is too large to enumerate", h.len())));
    }
    let wanted: BTreeSet<usize> = sizes_for(inst, variant)?.into_iter().collect();
    // All subsets as masks, visited in size-then-lexicographic order.
    let mut masks: Vec<u64> = (0..1u64 << h.len()).filter(|m| wanted.contains(&(m.count_ones() as usize))).collect();
    masks.sort_by_key(|&m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
    for m in masks {
        let e: BTreeSet<Var> = (0..h.len()).filter(|i| m >> i & 1 == 1).map(|i| h[i]).collect();
        if explains(&cf, &e, &inst.manifestations) {
            return Ok(Some(Explanation(e)));
        }
    }
    Ok(None)
}

/// Tries only the subsets of the admissible sizes, `≤ s` or `= s`.
pub fn solve_by_size_enumeration(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    precondition(variant != Variant::Plain, "size enumeration needs a size bound")?;
    let cf = schaefer_form(inst)?;
    for k in sizes_for(inst, variant)? {
        for e in inst.hypotheses.iter().copied().combinations(k) {
            let e: BTreeSet<Var> = e.into_iter().collect();
            if explains(&cf, &e, &inst.manifestations) {
                return Ok(Some(Explanation(e)));
            }
        }
    }
    Ok(None)
}

/// Plain abduction over definite Horn knowledge bases. Such a KB is always
/// satisfiable and entailment grows with `E`, so `E = H` decides the
/// question; the witness is then shrunk greedily.
pub fn solve_definite_horn_plain(inst: &AbductionInstance) -> Result<Option<Explanation>> {
    let flags = flags_of(inst);
    precondition(flags.horn && flags.one_valid, "the language is not definite Horn")?;
    let cf = ClauseForm::of_instance(inst, ClauseKind::Horn)?;
    let derives = |e: &BTreeSet<Var>| {
        let closure = sat_poly(&cf.with_units(e.iter().copied(), [])).expect("definite Horn is satisfiable");
        inst.manifestations.iter().all(|&m| closure.values()[m])
    };
    let mut e = inst.hypotheses.clone();
    if !derives(&e) {
        return Ok(None);
    }
    for h in inst.hypotheses.iter().copied() {
        e.remove(&h);
        if !derives(&e) {
            e.insert(h);
        }
    }
    Ok(Some(Explanation(e)))
}

/// Grows a valid explanation to exactly `target` elements over a dual Horn
/// knowledge base, adding hypotheses that are consistent with the KB.
///
/// Dual Horn models are closed under `∨`, so hypotheses that are each
/// consistent with `KB` are jointly consistent with `KB ∧ E`.
pub fn extend_solution_monotone(inst: &AbductionInstance, e: &Explanation, target: usize) -> Result<Option<Explanation>> {
    let flags = flags_of(inst);
    precondition(flags.dual_horn, "the language is not dual Horn")?;
    precondition(e.vars().is_subset(&inst.hypotheses), "E is not a subset of H")?;
    precondition(e.len() <= target, "target is smaller than |E|")?;
    let cf = ClauseForm::of_instance(inst, ClauseKind::DualHorn)?;
    let mut out = e.vars().clone();
    for &h in &inst.hypotheses {
        if out.len() == target {
            break;
        }
        if !out.contains(&h) && sat_poly(&cf.with_units(out.iter().copied().chain([h]), [])).is_some() {
            out.insert(h);
        }
    }
    Ok((out.len() == target).then_some(Explanation(out)))
}

/// Union-find over variables.
pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// An essentially positive or negative clause set with its equalities
/// collapsed. `rep[v]` is the representative of `v`'s class: the smallest
/// hypothesis of the class, or its smallest member.
pub(crate) struct Collapsed {
    pub rep: Vec<Var>,
    pub clauses: Vec<Clause>,
}

/// Collapses the paired implications `a → b`, `b → a` of `cf`. Clauses
/// that are mixed but not part of such a pair are rejected.
pub(crate) fn collapse_equalities(inst: &AbductionInstance, cf: &ClauseForm) -> Result<Collapsed> {
    let n = inst.num_vars();
    let mixed: BTreeSet<(Var, Var)> = cf
        .clauses
        .iter()
        .filter_map(|c| match c.as_slice() {
            [a, b] if a.positive != b.positive => {
                let (from, to) = if a.positive { (b.var, a.var) } else { (a.var, b.var) };
                Some((from, to))
            }
            _ => None,
        })
        .collect();
    let mut uf = UnionFind::new(n);
    for &(a, b) in &mixed {
        if !mixed.contains(&(b, a)) {
            return Err(AbdError::Precondition(
                "an implication is not part of an equality".into(),
            ));
        }
        uf.union(a, b);
    }
    let mut classes: BTreeMap<usize, Vec<Var>> = BTreeMap::new();
    for v in 0..n {
        classes.entry(uf.find(v)).or_default().push(v);
    }
    let mut rep = vec![0; n];
    for members in classes.values() {
        let r = members
            .iter()
            .copied()
            .find(|v| inst.hypotheses.contains(v))
            .unwrap_or(members[0]);
        for &v in members {
            rep[v] = r;
        }
    }
    let mut clauses = BTreeSet::new();
    for c in &cf.clauses {
        let mapped: Clause = c.iter().map(|l| Lit { var: rep[l.var], positive: l.positive }).collect();
        let is_mixed_pair = matches!(c.as_slice(), [a, b] if a.positive != b.positive);
        if is_mixed_pair {
            continue;
        }
        if let Some(n) = crate::schaefer::normalize(mapped) {
            clauses.insert(n);
        }
    }
    Ok(Collapsed {
        rep,
        clauses: clauses.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rels, InstanceBuilder, Relation};
    use crate::oracle::oracle_abduce;

    fn train() -> AbductionInstance {
        let guard = Relation::from_predicate("OR3IMP", 4, |b| !(b[0] || b[1] || b[2]) || b[3]);
        InstanceBuilder::new()
            .relation(rels::imp())
            .relation(rels::nand(2))
            .relation(rels::f())
            .relation(guard)
            .constraint("NAND2", &["moving", "stop"])
            .constraint("F", &["announcement"])
            .constraint("IMP", &["moving", "time"])
            .constraint("IMP", &["engineFailed", "announcement"])
            .constraint("IMP", &["trainDelayed", "newTime"])
            .constraint("OR3IMP", &["engineFailed", "trainDelayed", "doorOpen", "stop"])
            .hypotheses(&["time", "doorOpen", "announcement"])
            .manifestations(&["stop"])
            .build()
            .unwrap()
    }

    #[test]
    fn bridge_sets_size_to_h() {
        let inst = train();
        let le = abd_to_le(&inst);
        assert_eq!(le.size, Some(3));
        assert_eq!(
            oracle_abduce(&inst, Variant::Plain).unwrap().is_some(),
            oracle_abduce(&le, Variant::AtMost).unwrap().is_some()
        );
        let empty = InstanceBuilder::new().manifestations(&["m"]).build().unwrap();
        assert_eq!(abd_to_le(&empty).size, Some(0));
    }

    #[test]
    fn enumeration_on_train_example() {
        let inst = train().with_size(Some(1));
        let e = solve_by_h_enumeration(&inst, Variant::Exact).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["doorOpen"]);
        let e = solve_by_size_enumeration(&inst, Variant::Exact).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["doorOpen"]);
        let inst = inst.with_size(Some(2));
        let e = solve_by_h_enumeration(&inst, Variant::Exact).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["doorOpen", "time"]);
    }

    #[test]
    fn enumeration_on_parity() {
        let inst = InstanceBuilder::new()
            .relation(rels::even(2))
            .constraint("EVEN2", &["x", "m"])
            .hypotheses(&["x"])
            .manifestations(&["m"])
            .build()
            .unwrap();
        let e = solve_by_h_enumeration(&inst, Variant::Plain).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["x"]);
    }

    #[test]
    fn enumeration_without_hypotheses() {
        let inst = InstanceBuilder::new()
            .relation(rels::imp())
            .constraint("IMP", &["a", "b"])
            .manifestations(&["m"])
            .build()
            .unwrap();
        assert_eq!(solve_by_h_enumeration(&inst, Variant::Plain).unwrap(), None);
        let empty = InstanceBuilder::new().relation(rels::imp()).constraint("IMP", &["a", "b"]).size(0).build().unwrap();
        assert_eq!(solve_by_size_enumeration(&empty, Variant::AtMost).unwrap(), Some(Explanation::default()));
    }

    #[test]
    fn definite_horn_examples() {
        let inst = InstanceBuilder::new()
            .relation(rels::imp())
            .constraint("IMP", &["x", "m"])
            .hypotheses(&["x"])
            .manifestations(&["m"])
            .build()
            .unwrap();
        assert_eq!(solve_definite_horn_plain(&inst).unwrap().unwrap().names(&inst), vec!["x"]);
        let inst = InstanceBuilder::new()
            .relation(rels::horn3())
            .constraint("AND2IMP", &["a", "b", "m"])
            .hypotheses(&["a"])
            .manifestations(&["m"])
            .build()
            .unwrap();
        assert_eq!(solve_definite_horn_plain(&inst).unwrap(), None);
        let inst = InstanceBuilder::new().relation(rels::horn3()).constraint("AND2IMP", &["a", "b", "c"]).build().unwrap();
        assert_eq!(solve_definite_horn_plain(&inst).unwrap(), Some(Explanation::default()));
    }

    #[test]
    fn monotone_extension() {
        let base = || {
            InstanceBuilder::new()
                .relation(rels::imp())
                .relation(rels::f())
                .constraint("IMP", &["x", "m"])
                .hypotheses(&["x", "z"])
                .manifestations(&["m"])
        };
        let inst = base().build().unwrap();
        let x = inst.explanation_from_names(&["x"]).unwrap();
        let e = extend_solution_monotone(&inst, &x, 2).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["x", "z"]);
        assert_eq!(extend_solution_monotone(&inst, &x, 1).unwrap(), Some(x.clone()));
        let inst = base().constraint("F", &["z"]).build().unwrap();
        let x = inst.explanation_from_names(&["x"]).unwrap();
        assert_eq!(extend_solution_monotone(&inst, &x, 2).unwrap(), None);
    }
}
