use std::collections::{BTreeSet, VecDeque};

use super::{collapse_equalities, flags_of, precondition};
use crate::error::{AbdError, Result};
use crate::model::{AbductionInstance, Explanation, Var, Variant};
use crate::schaefer::{ClauseForm, ClauseKind};

/// Bounded abduction over essentially positive languages: positive
/// clauses, negative unit clauses and equalities.
///
/// Unit propagation runs on every literal except positive hypotheses and
/// negative manifestations. A manifestation forced to 0 leaves no
/// explanation; otherwise the explanations are the sets containing the
/// manifestations not already forced to 1, drawn from the hypotheses not
/// forced to 0.
pub fn solve_ess_positive(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    precondition(flags_of(inst).ess_positive, "the language is not essentially positive")?;
    precondition(variant != Variant::Plain, "a size bound is required")?;
    let s = inst.bound_for(variant)?.expect("bounded variant");
    let cf = ClauseForm::of_instance(inst, ClauseKind::DualHorn)?;
    let col = collapse_equalities(inst, &cf)?;
    let n = inst.num_vars();
    let hyp: BTreeSet<Var> = inst.hypotheses.iter().map(|&h| col.rep[h]).collect();
    let man: BTreeSet<Var> = inst.manifestations.iter().map(|&m| col.rep[m]).collect();

    let mut clauses: Vec<Vec<Var>> = Vec::new();
    let mut queue: VecDeque<(Var, bool)> = VecDeque::new();
    for c in &col.clauses {
        match c.as_slice() {
            [l] if !l.positive => queue.push_back((l.var, false)),
            _ if c.iter().all(|l| l.positive) => clauses.push(c.iter().map(|l| l.var).collect()),
            _ => return Err(AbdError::Precondition("a clause is neither positive nor a negative unit".into())),
        }
    }

    // value[v]: Some(true) forced 1, Some(false) forced 0.
    let mut value: Vec<Option<bool>> = vec![None; n];
    let mut blocked = false;
    for c in &clauses {
        if let [v] = c.as_slice() {
            queue.push_back((*v, true));
        }
    }
    while let Some((v, b)) = queue.pop_front() {
        if (b && hyp.contains(&v)) || (!b && man.contains(&v)) {
            // Skipped literals. A manifestation forced to 0 rules out
            // every explanation; a forced hypothesis is simply forced.
            if !b {
                blocked = true;
            }
            if value[v].is_none() {
                value[v] = Some(b);
            }
            continue;
        }
        match value[v] {
            Some(old) if old == b => continue,
            Some(_) => return Ok(None),
            None => value[v] = Some(b),
        }
        if !b {
            for c in clauses.iter_mut() {
                if c.contains(&v) {
                    c.retain(|&x| x != v);
                    match c.as_slice() {
                        [] => return Ok(None),
                        [u] => queue.push_back((*u, true)),
                        _ => {}
                    }
                }
            }
        }
    }
    if blocked {
        return Ok(None);
    }
    if value.iter().enumerate().any(|(v, x)| *x == Some(false) && man.contains(&v)) {
        return Ok(None);
    }

    let usable: BTreeSet<Var> = inst
        .hypotheses
        .iter()
        .copied()
        .filter(|&h| value[col.rep[h]] != Some(false))
        .collect();
    let needed: BTreeSet<Var> = man.iter().copied().filter(|&m| value[m] != Some(true)).collect();
    if !needed.is_subset(&usable) || needed.len() > s {
        return Ok(None);
    }
    let mut e = needed;
    if variant == Variant::Exact {
        for &h in &usable {
            if e.len() == s {
                break;
            }
            e.insert(h);
        }
        if e.len() < s {
            return Ok(None);
        }
    }
    Ok(Some(Explanation(e)))
}
