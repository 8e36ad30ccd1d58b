use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{abd_to_le, extend_solution_monotone, flags_of, precondition};
use crate::error::{AbdError, Result};
use crate::model::{AbductionInstance, Explanation, Var, Variant};
use crate::schaefer::{normalize, sat_poly, Clause, ClauseForm, ClauseKind, Lit};

/// Largest number of open manifestations for the set-cover dynamic program.
pub const MAX_SETCOVER_M: usize = 20;

/// Resolution steps that would produce more resolvents than this keep the
/// variable instead.
const MAX_RESOLVENTS: usize = 4096;

/// A dual Horn knowledge base reduced to implications `h → m`.
///
/// Dual Horn models are closed under `∨`. Hence `KB ∧ E` is consistent iff
/// every `h ∈ E` is consistent with `KB`, and `KB ∧ E ⊨ m` iff `KB ⊨ m` or
/// `KB ∧ h ⊨ m` for some `h ∈ E`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImplicationKb {
    pub satisfiable: bool,
    /// Pairs `(h, m)` with `h ≠ m`, `h` usable and `KB ∧ h ⊨ m`.
    pub implications: Vec<(Var, Var)>,
    /// Manifestations entailed by the knowledge base alone.
    pub forced_true: BTreeSet<Var>,
    /// Hypotheses inconsistent with the knowledge base.
    pub unusable: BTreeSet<Var>,
    /// The clause set after unit propagation and resolution, over `H ∪ M`.
    pub clauses: Vec<Clause>,
}

/// For every manifestation, the hypotheses that explain it on their own.
pub type ExplainerSets = BTreeMap<Var, BTreeSet<Var>>;

fn subsumes(a: &Clause, b: &Clause) -> bool {
    a.len() <= b.len() && a.iter().all(|l| b.contains(l))
}

fn insert_clause(set: &mut Vec<Clause>, c: Clause) {
    if set.iter().any(|d| subsumes(d, &c)) {
        return;
    }
    set.retain(|d| !subsumes(&c, d));
    set.push(c);
}

/// Unit propagation followed by Davis-Putnam elimination of every variable
/// outside `H ∪ M`, then one entailment test per hypothesis and
/// manifestation.
pub fn preprocess_dualhorn(inst: &AbductionInstance) -> Result<ImplicationKb> {
    precondition(flags_of(inst).dual_horn, "the language is not dual Horn")?;
    let n = inst.num_vars();
    let cf = ClauseForm::of_instance(inst, ClauseKind::DualHorn)?;
    if sat_poly(&cf).is_none() {
        return Ok(ImplicationKb::default());
    }

    let mut clauses = propagate_units(&cf.clauses, n);
    let keep: BTreeSet<Var> = inst.hypotheses.union(&inst.manifestations).copied().collect();
    for x in (0..n).filter(|v| !keep.contains(v)) {
        let (with, rest): (Vec<Clause>, Vec<Clause>) = clauses.into_iter().partition(|c| c.iter().any(|l| l.var == x));
        let (pos, neg): (Vec<&Clause>, Vec<&Clause>) = with.iter().partition(|c| c.contains(&Lit::pos(x)));
        if pos.len() * neg.len() > MAX_RESOLVENTS {
            clauses = rest.into_iter().chain(with.iter().cloned()).collect();
            continue;
        }
        clauses = Vec::new();
        for c in rest {
            insert_clause(&mut clauses, c);
        }
        for p in &pos {
            for q in &neg {
                let r: Clause = p.iter().chain(q.iter()).copied().filter(|l| l.var != x).collect();
                if let Some(r) = normalize(r) {
                    insert_clause(&mut clauses, r);
                }
            }
        }
    }
    clauses.sort();

    let reduced = ClauseForm { clauses: clauses.clone(), ..cf.clone() };
    let forced_true: BTreeSet<Var> = inst
        .manifestations
        .iter()
        .copied()
        .filter(|&m| sat_poly(&reduced.with_units([], [m])).is_none())
        .collect();
    let unusable: BTreeSet<Var> = inst
        .hypotheses
        .iter()
        .copied()
        .filter(|&h| sat_poly(&reduced.with_units([h], [])).is_none())
        .collect();
    let mut implications = Vec::new();
    for &h in inst.hypotheses.difference(&unusable) {
        for &m in inst.manifestations.difference(&forced_true) {
            if m != h && sat_poly(&reduced.with_units([h], [m])).is_none() {
                implications.push((h, m));
            }
        }
    }
    Ok(ImplicationKb {
        satisfiable: true,
        implications,
        forced_true,
        unusable,
        clauses,
    })
}

/// Simplifies a satisfiable clause set under its unit clauses.
fn propagate_units(clauses: &[Clause], n: usize) -> Vec<Clause> {
    let mut value: Vec<Option<bool>> = vec![None; n];
    let mut queue: VecDeque<Lit> = clauses.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    let mut current: Vec<Clause> = clauses.to_vec();
    while let Some(l) = queue.pop_front() {
        if value[l.var].is_some() {
            continue;
        }
        value[l.var] = Some(l.positive);
        let mut next = Vec::with_capacity(current.len());
        for c in current {
            if c.contains(&l) && c.len() > 1 {
                continue;
            }
            let shrunk: Clause = c.into_iter().filter(|x| *x != l.negated()).collect();
            if shrunk.len() == 1 && value[shrunk[0].var].is_none() {
                queue.push_back(shrunk[0]);
            }
            next.push(shrunk);
        }
        current = next;
    }
    let mut out = Vec::new();
    for c in current {
        if !c.is_empty() {
            insert_clause(&mut out, c);
        }
    }
    out
}

/// `H_m = {h ∈ H : m is reachable from h}` for every `m ∈ M`, over a set of
/// implications `a → b`. Every `m ∈ H` explains itself.
pub fn explainer_sets(implications: &[(Var, Var)], h: &BTreeSet<Var>, m: &BTreeSet<Var>) -> ExplainerSets {
    let mut back: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
    for &(a, b) in implications {
        back.entry(b).or_default().push(a);
    }
    let mut out = ExplainerSets::new();
    for &target in m {
        let mut seen = BTreeSet::from([target]);
        let mut queue = VecDeque::from([target]);
        while let Some(v) = queue.pop_front() {
            for &u in back.get(&v).into_iter().flatten() {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        out.insert(target, seen.intersection(h).copied().collect());
    }
    out
}

/// Abduction over dual Horn languages (including implicative hitting sets)
/// as a set cover of the open manifestations.
pub fn solve_m_setcover(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    let inst = if variant == Variant::Plain { abd_to_le(inst) } else { inst.clone() };
    let s = inst.bound_for(if variant == Variant::Exact { Variant::Exact } else { Variant::AtMost })?
        .expect("size set");
    let ikb = preprocess_dualhorn(&inst)?;
    if !ikb.satisfiable {
        return Ok(None);
    }
    let usable: BTreeSet<Var> = inst.hypotheses.difference(&ikb.unusable).copied().collect();
    let open: BTreeSet<Var> = inst.manifestations.difference(&ikb.forced_true).copied().collect();
    let sets = explainer_sets(&ikb.implications, &usable, &open);
    if sets.values().any(|s| s.is_empty()) {
        return Ok(None);
    }
    let Some(cover) = min_cover(&sets, s)? else {
        return Ok(None);
    };
    let e = Explanation(cover);
    if variant == Variant::Exact {
        return extend_solution_monotone(&inst, &e, s);
    }
    Ok(Some(e))
}

/// A cover of size at most `s`, minimum unless the bound makes that moot.
fn min_cover(sets: &ExplainerSets, s: usize) -> Result<Option<BTreeSet<Var>>> {
    if sets.len() <= s {
        return Ok(Some(sets.values().map(|h| *h.iter().next().expect("nonempty")).collect()));
    }
    if sets.len() > MAX_SETCOVER_M {
        return Err(AbdError::TooLarge(format!(
            "{} open manifestations exceed the set-cover limit of {MAX_SETCOVER_M}",
            sets.len()
        )));
    }
    let mut covers: BTreeMap<Var, u32> = BTreeMap::new();
    for (i, hs) in sets.values().enumerate() {
        for &h in hs {
            *covers.entry(h).or_default() |= 1 << i;
        }
    }
    let full = (1u32 << sets.len()) - 1;
    let mut best: Vec<Option<(usize, u32, Var)>> = vec![None; full as usize + 1];
    best[0] = Some((0, 0, 0));
    for mask in 0..=full {
        let Some((count, _, _)) = best[mask as usize] else { continue };
        for (&h, &c) in &covers {
            let next = mask | c;
            if next != mask && best[next as usize].is_none_or(|(k, _, _)| count + 1 < k) {
                best[next as usize] = Some((count + 1, mask, h));
            }
        }
    }
    let (count, _, _) = best[full as usize].expect("every set is nonempty");
    if count > s {
        return Ok(None);
    }
    let mut out = BTreeSet::new();
    let mut mask = full;
    while mask != 0 {
        let (_, prev, h) = best[mask as usize].expect("reached");
        out.insert(h);
        mask = prev;
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rels, InstanceBuilder};

    #[test]
    fn setcover_picks_shared_hypothesis() {
        let inst = InstanceBuilder::new()
            .relation(rels::imp())
            .constraint("IMP", &["a", "m1"])
            .constraint("IMP", &["b", "m1"])
            .constraint("IMP", &["b", "m2"])
            .hypotheses(&["a", "b"])
            .manifestations(&["m1", "m2"])
            .size(1)
            .build()
            .unwrap();
        let e = solve_m_setcover(&inst, Variant::AtMost).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["b"]);
        let e = solve_m_setcover(&inst.with_size(Some(2)), Variant::Exact).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["a", "b"]);
    }

    #[test]
    fn explainer_sets_follow_chains() {
        let h = BTreeSet::from([0, 1]);
        let m = BTreeSet::from([3, 1]);
        let sets = explainer_sets(&[(0, 2), (2, 3)], &h, &m);
        assert_eq!(sets[&3], BTreeSet::from([0]));
        assert_eq!(sets[&1], BTreeSet::from([1]));
    }

    #[test]
    fn keeps_implication_through_a_hypothesis() {
        // (¬h ∨ m ∨ x) ∧ (¬x ∨ m): h alone entails m.
        let r = crate::model::Relation::from_predicate("R", 3, |b| !b[0] || b[1] || b[2]);
        let inst = InstanceBuilder::new()
            .relation(r)
            .relation(rels::imp())
            .constraint("R", &["h", "m", "x"])
            .constraint("IMP", &["x", "m"])
            .hypotheses(&["h", "x"])
            .manifestations(&["m"])
            .size(1)
            .build()
            .unwrap();
        let ikb = preprocess_dualhorn(&inst).unwrap();
        let h = inst.var_index("h").unwrap();
        let m = inst.var_index("m").unwrap();
        assert!(ikb.implications.contains(&(h, m)));
        assert!(solve_m_setcover(&inst, Variant::AtMost).unwrap().is_some());
    }

    #[test]
    fn eliminates_hidden_variables() {
        let inst = InstanceBuilder::new()
            .relation(rels::imp())
            .relation(rels::f())
            .constraint("IMP", &["h", "y"])
            .constraint("IMP", &["y", "m"])
            .constraint("F", &["g"])
            .hypotheses(&["h", "g"])
            .manifestations(&["m"])
            .build()
            .unwrap();
        let ikb = preprocess_dualhorn(&inst).unwrap();
        let y = inst.var_index("y").unwrap();
        assert!(ikb.clauses.iter().all(|c| c.iter().all(|l| l.var != y)));
        assert_eq!(ikb.unusable, BTreeSet::from([inst.var_index("g").unwrap()]));
        let e = solve_m_setcover(&inst, Variant::Plain).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["h"]);
    }
}
