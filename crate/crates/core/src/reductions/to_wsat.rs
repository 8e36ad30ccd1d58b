use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use super::wsat::{tidy, WsatInstance, WsatMode};
use crate::error::{AbdError, Result};
use crate::lattice::closure_flags;
use crate::model::{AbductionInstance, Var, Variant};
use crate::schaefer::{horn_min_model, Clause, ClauseForm, ClauseKind, Lit};
use crate::solvers::{collapse_equalities, explainer_sets, preprocess_dualhorn, solve_ess_negative_le};

fn exact_size(inst: &AbductionInstance) -> Result<usize> {
    Ok(inst.bound_for(Variant::Exact)?.expect("exact variant carries a size"))
}

/// Builds `⋀_m ⋁_{h ∈ H_m} h` over `vars`, with weight `k`.
fn cover_cnf(inst: &AbductionInstance, vars: &[Var], sets: &BTreeMap<Var, BTreeSet<Var>>, extra: Vec<Clause>, k: usize) -> WsatInstance {
    let pos: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut clauses: Vec<Clause> = sets.values().map(|hs| hs.iter().map(|h| Lit::pos(pos[h])).collect()).collect();
    clauses.extend(extra.into_iter().map(|c| c.into_iter().map(|l| Lit { var: pos[&l.var], ..l }).collect()));
    let names = vars.iter().map(|&v| inst.var_name(v).to_string()).collect();
    WsatInstance::new(names, tidy(clauses), k, WsatMode::Exact)
}

fn implicative(inst: &AbductionInstance) -> Result<WsatInstance> {
    let s = exact_size(inst)?;
    let ikb = preprocess_dualhorn(inst)?;
    if !ikb.satisfiable {
        return Ok(WsatInstance::trivially_false("the knowledge base is unsatisfiable"));
    }
    let usable: Vec<Var> = inst.hypotheses.difference(&ikb.unusable).copied().collect();
    let usable_set: BTreeSet<Var> = usable.iter().copied().collect();
    let open: BTreeSet<Var> = inst.manifestations.difference(&ikb.forced_true).copied().collect();
    let sets = explainer_sets(&ikb.implications, &usable_set, &open);
    if let Some((&m, _)) = sets.iter().find(|(_, hs)| hs.is_empty()) {
        return Ok(WsatInstance::trivially_false(format!("no hypothesis explains {}", inst.var_name(m))));
    }
    Ok(cover_cnf(inst, &usable, &sets, vec![], s))
}

/// Exact abduction over implicative hitting set languages as monotone
/// weighted satisfiability: one clause `⋁ H_m` per manifestation, `k = s`.
pub fn reduce_im_eq_to_wsat(inst: &AbductionInstance) -> Result<WsatInstance> {
    let f = closure_flags(&inst.language);
    if !(f.horn && f.dual_horn) {
        return Err(AbdError::Precondition("the language is not implicative".into()));
    }
    implicative(inst)
}

/// Exact abduction over dual Horn languages: the knowledge base is first
/// reduced to implications, then encoded as for implicative languages.
pub fn reduce_iv2_eq_to_wsat(inst: &AbductionInstance) -> Result<WsatInstance> {
    if !closure_flags(&inst.language).dual_horn {
        return Err(AbdError::Precondition("the language is not dual Horn".into()));
    }
    implicative(inst)
}

/// Reachability in an implication graph, self included.
fn reach_sets(n: usize, edges: &[(Var, Var)]) -> Vec<BTreeSet<Var>> {
    let mut out = vec![BTreeSet::new(); n];
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    for (v, seen) in out.iter_mut().enumerate() {
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    out
}

/// Replaces every literal `¬u` of the negative clauses by `¬h` for each
/// `h ∈ H_u`, one copy per combination. `on` marks variables that are 1
/// anyway; a clause with such a literal loses it.
fn expand_negative(negative: &[Clause], explainers: &dyn Fn(Var) -> Vec<Var>, on: &dyn Fn(Var) -> bool) -> Option<Vec<Clause>> {
    let mut out = Vec::new();
    for c in negative {
        let open: Vec<Var> = c.iter().map(|l| l.var).filter(|&v| !on(v)).collect();
        if open.is_empty() {
            return None;
        }
        let choices: Vec<Vec<Var>> = open.iter().map(|&u| explainers(u)).collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        for pick in choices.into_iter().multi_cartesian_product() {
            out.push(pick.into_iter().map(Lit::neg).collect());
        }
    }
    Some(out)
}

/// Exact abduction over knowledge bases of implications, unit clauses and
/// negative clauses. Every variable of a negative clause is replaced by the
/// hypotheses that derive it, which keeps the width.
pub fn reduce_is10_eq_to_wsat(inst: &AbductionInstance) -> Result<WsatInstance> {
    if !closure_flags(&inst.language).horn {
        return Err(AbdError::Precondition("the language is not Horn".into()));
    }
    let s = exact_size(inst)?;
    let n = inst.num_vars();
    let cf = ClauseForm::of_instance(inst, ClauseKind::Horn)?;
    let mut edges = Vec::new();
    let mut units = Vec::new();
    let mut negative = Vec::new();
    for c in &cf.clauses {
        match c.as_slice() {
            [l] if l.positive => units.push(l.var),
            [a, b] if a.positive != b.positive => {
                let (from, to) = if a.positive { (b.var, a.var) } else { (a.var, b.var) };
                edges.push((from, to));
            }
            _ if c.iter().all(|l| !l.positive) => negative.push(c.clone()),
            _ => return Err(AbdError::Precondition("a clause is not an implication, unit or negative clause".into())),
        }
    }
    let reach = reach_sets(n, &edges);
    let forced: BTreeSet<Var> = units.iter().flat_map(|&u| reach[u].iter().copied()).collect();
    let hyps: Vec<Var> = inst.hypotheses.iter().copied().collect();
    let explainers = |u: Var| -> Vec<Var> { hyps.iter().copied().filter(|&h| reach[h].contains(&u)).collect() };
    let Some(extra) = expand_negative(&negative, &explainers, &|v| forced.contains(&v)) else {
        return Ok(WsatInstance::trivially_false("the knowledge base is unsatisfiable"));
    };
    let sets: BTreeMap<Var, BTreeSet<Var>> = inst
        .manifestations
        .iter()
        .filter(|m| !forced.contains(m))
        .map(|&m| (m, explainers(m).into_iter().collect()))
        .collect();
    if let Some((&m, _)) = sets.iter().find(|(_, hs)| hs.is_empty()) {
        return Ok(WsatInstance::trivially_false(format!("no hypothesis explains {}", inst.var_name(m))));
    }
    Ok(cover_cnf(inst, &hyps, &sets, extra, s))
}

/// The structure behind [`reduce_essneg_eq_to_wsat`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssNegReduction {
    /// The hypotheses every explanation may be assumed to contain.
    pub e_mp: BTreeSet<Var>,
    pub wsat: WsatInstance,
}

/// Exact abduction over essentially negative languages as antimonotone
/// weighted satisfiability with `k = s − |E_MP|`, where `E_MP` holds one
/// hypothesis per equality class of the manifestations not forced to 1.
pub fn reduce_essneg_eq_to_wsat(inst: &AbductionInstance) -> Result<WsatInstance> {
    Ok(essneg_reduction(inst)?.wsat)
}

pub fn essneg_reduction(inst: &AbductionInstance) -> Result<EssNegReduction> {
    let s = exact_size(inst)?;
    let false_image = |why: &str| EssNegReduction { e_mp: BTreeSet::new(), wsat: WsatInstance::trivially_false(why) };
    let Some(e_mp) = solve_ess_negative_le(inst, Variant::AtMost)? else {
        return Ok(false_image("no explanation of size at most s"));
    };
    let e_mp = e_mp.0;
    let n = inst.num_vars();
    let cf = ClauseForm::of_instance(inst, ClauseKind::Horn)?;
    let col = collapse_equalities(inst, &cf)?;
    let forced = horn_min_model(n, &col.clauses).expect("checked satisfiable");
    let man_classes: BTreeSet<Var> = inst.manifestations.iter().map(|&m| col.rep[m]).collect();
    let on = |r: Var| forced[r] || man_classes.contains(&r);
    let free: Vec<Var> = inst.hypotheses.difference(&e_mp).copied().collect();
    let explainers = |r: Var| -> Vec<Var> { free.iter().copied().filter(|&h| col.rep[h] == r).collect() };
    let negative: Vec<Clause> = col.clauses.iter().filter(|c| c.iter().all(|l| !l.positive)).cloned().collect();
    let Some(clauses) = expand_negative(&negative, &explainers, &on) else {
        return Ok(false_image("the manifestations contradict the knowledge base"));
    };
    let pos: BTreeMap<Var, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let clauses = clauses
        .into_iter()
        .map(|c| c.into_iter().map(|l| Lit { var: pos[&l.var], ..l }).collect());
    let names = free.iter().map(|&v| inst.var_name(v).to_string()).collect();
    if s < e_mp.len() {
        return Ok(false_image("s is smaller than the forced part of every explanation"));
    }
    let wsat = WsatInstance::new(names, tidy(clauses), s - e_mp.len(), WsatMode::Exact);
    Ok(EssNegReduction { e_mp, wsat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rels, InstanceBuilder};
    use crate::oracle::oracle_abduce;
    use crate::reductions::wsat::wsat_bruteforce;

    fn agree(inst: &AbductionInstance, w: &WsatInstance) {
        let want = oracle_abduce(inst, Variant::Exact).unwrap().is_some();
        assert_eq!(wsat_bruteforce(w).unwrap().is_some(), want, "{w}");
    }

    #[test]
    fn implicative_examples() {
        let b = |s| {
            InstanceBuilder::new()
                .relation(rels::imp())
                .constraint("IMP", &["a", "m1"])
                .constraint("IMP", &["b", "m1"])
                .constraint("IMP", &["b", "m2"])
                .hypotheses(&["a", "b"])
                .manifestations(&["m1", "m2"])
                .size(s)
                .build()
                .unwrap()
        };
        for s in 0..=3 {
            let inst = b(s);
            let w = reduce_im_eq_to_wsat(&inst).unwrap();
            assert_eq!(w.k, s);
            assert_eq!(w.clauses.len(), 2);
            agree(&inst, &w);
        }
        let inst = InstanceBuilder::new().relation(rels::imp()).hypotheses(&["a", "b"]).size(1).build().unwrap();
        let w = reduce_im_eq_to_wsat(&inst).unwrap();
        assert!(w.clauses.is_empty());
        assert_eq!(w.variables.len(), 2);
        agree(&inst, &w);
    }

    #[test]
    fn implication_through_a_hypothesis_is_kept() {
        let inst = InstanceBuilder::new()
            .relation(rels::imp())
            .relation(rels::nand(2))
            .constraint("IMP", &["g", "h"])
            .constraint("NAND2", &["h", "k"])
            .constraint("IMP", &["k", "m"])
            .hypotheses(&["g", "h", "k"])
            .manifestations(&["m"])
            .size(2)
            .build()
            .unwrap();
        let w = reduce_is10_eq_to_wsat(&inst).unwrap();
        agree(&inst, &w);
        let text = w.to_string();
        assert!(text.contains("-1 -3 0") || text.contains("-3 -1 0"), "{text}");
    }

    #[test]
    fn essneg_weight_and_variables() {
        let b = |s| {
            InstanceBuilder::new()
                .relation(rels::nand(2))
                .relation(rels::t())
                .constraint("NAND2", &["h1", "h2"])
                .constraint("T", &["m"])
                .hypotheses(&["h1", "h2", "m"])
                .manifestations(&["m"])
                .size(s)
                .build()
                .unwrap()
        };
        for s in 0..=3 {
            let inst = b(s);
            let r = essneg_reduction(&inst).unwrap();
            assert!(r.e_mp.is_empty());
            assert_eq!(r.wsat.k, s);
            agree(&inst, &r.wsat);
        }
    }

    #[test]
    fn essneg_equal_hypotheses() {
        let inst = InstanceBuilder::new()
            .relation(rels::eq())
            .constraint("EQ", &["h1", "h2"])
            .hypotheses(&["h1", "h2"])
            .size(1)
            .build()
            .unwrap();
        let w = reduce_essneg_eq_to_wsat(&inst).unwrap();
        agree(&inst, &w);
        assert!(wsat_bruteforce(&w).unwrap().is_some());
    }
}
