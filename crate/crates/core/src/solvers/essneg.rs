use std::collections::BTreeSet;

use super::{abd_to_le, collapse_equalities, flags_of, precondition};
use crate::error::{AbdError, Result};
use crate::model::{AbductionInstance, Explanation, Var, Variant};
use crate::schaefer::{horn_min_model, Clause, ClauseForm, ClauseKind, Lit};

/// Bounded abduction (`≤ s`, or unbounded for [`Variant::Plain`]) over
/// essentially negative languages: negative clauses, positive unit clauses
/// and equalities.
///
/// Such a knowledge base forces a set `P` of variables to 1 and otherwise
/// only forbids combinations, so the only candidate is the set of
/// manifestations outside `P`.
pub fn solve_ess_negative_le(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    precondition(flags_of(inst).ess_negative, "the language is not essentially negative")?;
    precondition(variant != Variant::Exact, "the exact-size variant is not handled here")?;
    let inst = if variant == Variant::Plain { abd_to_le(inst) } else { inst.clone() };
    let s = inst.bound_for(Variant::AtMost)?.expect("size set");
    let cf = ClauseForm::of_instance(&inst, ClauseKind::Horn)?;
    let col = collapse_equalities(&inst, &cf)?;
    let n = inst.num_vars();
    for c in &col.clauses {
        let ok = c.iter().all(|l| !l.positive) || matches!(c.as_slice(), [l] if l.positive);
        if !ok {
            return Err(AbdError::Precondition("a clause is neither negative nor a positive unit".into()));
        }
    }
    let Some(forced) = horn_min_model(n, &col.clauses) else {
        return Ok(None);
    };
    let man: BTreeSet<Var> = inst.manifestations.iter().map(|&m| col.rep[m]).collect();
    let e: BTreeSet<Var> = man.iter().copied().filter(|&m| !forced[m]).collect();
    if !e.iter().all(|v| inst.hypotheses.contains(v)) || e.len() > s {
        return Ok(None);
    }
    let mut with_m: Vec<Clause> = col.clauses.clone();
    with_m.extend(man.iter().map(|&m| vec![Lit::pos(m)]));
    if horn_min_model(n, &with_m).is_none() {
        return Ok(None);
    }
    Ok(Some(Explanation(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rels, InstanceBuilder};

    #[test]
    fn nand_with_forced_manifestation() {
        let inst = InstanceBuilder::new()
            .relation(rels::nand(2))
            .relation(rels::t())
            .constraint("NAND2", &["h1", "h2"])
            .constraint("T", &["m1"])
            .hypotheses(&["h1", "m2"])
            .manifestations(&["m1", "m2"])
            .size(1)
            .build()
            .unwrap();
        let e = solve_ess_negative_le(&inst, Variant::AtMost).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["m2"]);
        assert_eq!(solve_ess_negative_le(&inst.with_size(Some(0)), Variant::AtMost).unwrap(), None);
    }

    #[test]
    fn manifestations_in_conflict() {
        let inst = InstanceBuilder::new()
            .relation(rels::nand(2))
            .constraint("NAND2", &["a", "b"])
            .hypotheses(&["a", "b"])
            .manifestations(&["a", "b"])
            .build()
            .unwrap();
        assert_eq!(solve_ess_negative_le(&inst, Variant::Plain).unwrap(), None);
    }

    #[test]
    fn equality_maps_manifestation_to_hypothesis() {
        let inst = InstanceBuilder::new()
            .relation(rels::eq())
            .relation(rels::nand(2))
            .constraint("EQ", &["m", "h"])
            .constraint("NAND2", &["h", "x"])
            .hypotheses(&["h"])
            .manifestations(&["m"])
            .size(1)
            .build()
            .unwrap();
        let e = solve_ess_negative_le(&inst, Variant::AtMost).unwrap().unwrap();
        assert_eq!(e.names(&inst), vec!["h"]);
    }
}
