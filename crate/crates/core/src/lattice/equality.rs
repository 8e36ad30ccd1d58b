//! Expressing equality without equality, and removing equality constraints
//! from instances over essentially positive or negative languages.

use std::collections::{BTreeMap, BTreeSet};

use super::ppdef::{pp_member, PPDefinition, DEFAULT_MAX_AUX};
use super::{closure_flags, preserves_generator, Generator};
use crate::clause::prime_implicates;
use crate::error::{AbdError, Result};
use crate::model::{rels, AbductionInstance, Constraint, ConstraintLanguage, Relation, Var, Variant};

/// An equality-free definition of `x = y` over `lang`.
///
/// The language must be neither essentially positive nor essentially
/// negative; those languages cannot express equality without it.
pub fn construct_equality(lang: &ConstraintLanguage) -> Result<PPDefinition> {
    let flags = closure_flags(lang);
    if flags.ess_positive || flags.ess_negative {
        return Err(AbdError::Precondition(
            "the language is essentially positive or essentially negative".into(),
        ));
    }
    let def = if flags.zero_valid || flags.one_valid {
        pp_member(&rels::eq(), lang, false, DEFAULT_MAX_AUX)
            .ok_or_else(|| AbdError::Internal("no equality definition within the search bound".into()))?
    } else if flags.complementive {
        let neq = pp_member(&rels::neq(), lang, false, DEFAULT_MAX_AUX)
            .ok_or_else(|| AbdError::Internal("no disequality definition within the search bound".into()))?;
        chain_disequality(lang, &neq)
    } else if !flags.horn && !flags.dual_horn {
        from_and_or_witnesses(lang)?
    } else if flags.horn {
        from_horn_witness(lang, false)?
    } else {
        from_horn_witness(lang, true)?
    };
    if !def.is_valid() || def.uses_equality() {
        return Err(AbdError::Internal("equality construction does not project to {00, 11}".into()));
    }
    Ok(def)
}

/// Builds a definition from `(variable names, body)`, the first two names free.
fn assemble(lang: &ConstraintLanguage, names: &[&str], body: Vec<Constraint>) -> PPDefinition {
    PPDefinition {
        target: rels::eq(),
        free_vars: names[..2].iter().map(|s| s.to_string()).collect(),
        aux_vars: names[2..].iter().map(|s| s.to_string()).collect(),
        language: lang.clone(),
        body,
    }
}

/// `x = y ≡ ∃z. x ≠ z ∧ z ≠ y`, with fresh copies of the inner auxiliaries.
fn chain_disequality(lang: &ConstraintLanguage, neq: &PPDefinition) -> PPDefinition {
    let m = neq.aux_vars.len();
    let mut names: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
    let mut body = Vec::new();
    for (copy, (a, b)) in [(0usize, 2usize), (2, 1)].into_iter().enumerate() {
        let base = names.len();
        names.extend((0..m).map(|j| format!("w{copy}_{j}")));
        for c in &neq.body {
            let args = c
                .args
                .iter()
                .map(|&v| match v {
                    0 => a,
                    1 => b,
                    aux => base + aux - 2,
                })
                .collect();
            body.push(Constraint::new(c.relation, args));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    assemble(lang, &refs, body)
}

/// Body constraints over `(t, f)` forcing `t = 1` and `f = 0`.
fn true_false_gadget(lang: &ConstraintLanguage, t: Var, f: Var) -> Result<Vec<Constraint>> {
    let tf = Relation::from_bitstrings("TF", 2, &["10"]).expect("valid relation");
    let def = pp_member(&tf, lang, false, 0)
        .ok_or_else(|| AbdError::Internal("constants are not expressible in the language".into()))?;
    Ok(def
        .body
        .iter()
        .map(|c| Constraint::new(c.relation, c.args.iter().map(|&v| if v == 0 { t } else { f }).collect()))
        .collect())
}

/// Applies the relation with each position bound to the variable of its class.
fn substitute(relation: usize, arity: usize, class_var: impl Fn(usize) -> Var) -> Constraint {
    Constraint::new(relation, (0..arity).map(class_var).collect())
}

/// Two tuples of one relation whose combination under `op` leaves it.
fn violation(lang: &ConstraintLanguage, op: fn(u64, u64) -> u64) -> Option<(usize, u64, u64)> {
    lang.relations().iter().enumerate().find_map(|(i, r)| {
        r.tuples().iter().find_map(|&a| {
            r.tuples()
                .iter()
                .find(|&&b| !r.contains(op(a, b)))
                .map(|&b| (i, a, b))
        })
    })
}

/// Neither Horn nor dual Horn: an `∧`-violation and an `∨`-violation give,
/// under `t = 1, f = 0`, the relations `{10, 01, 11}` and `{10, 01, 00}` on
/// `(x, y)`, whose conjunction is `x ≠ y`.
fn from_and_or_witnesses(lang: &ConstraintLanguage) -> Result<PPDefinition> {
    let (r_and, m1, m2) = violation(lang, |a, b| a & b).ok_or_else(|| AbdError::Internal("no ∧ violation".into()))?;
    let (r_or, m3, m4) = violation(lang, |a, b| a | b).ok_or_else(|| AbdError::Internal("no ∨ violation".into()))?;
    // Variables: x = 0, y = 1, z = 2, f = 3, t = 4.
    let (f, t) = (3, 4);
    let gadget = |a: u64, b: u64, x: Var, y: Var| {
        move |i: usize| match (a >> i & 1, b >> i & 1) {
            (0, 0) => f,
            (1, 0) => x,
            (0, 1) => y,
            _ => t,
        }
    };
    let mut body = Vec::new();
    for (x, y) in [(0, 2), (2, 1)] {
        body.push(substitute(r_and, lang.get(r_and).arity(), gadget(m1, m2, x, y)));
        body.push(substitute(r_or, lang.get(r_or).arity(), gadget(m3, m4, x, y)));
    }
    body.extend(true_false_gadget(lang, t, f)?);
    Ok(assemble(lang, &["x", "y", "z", "f", "t"], body))
}

/// Horn but not essentially negative: a violation `m1 ∧ (m2 ∨ ¬m3) ∉ R`,
/// normalised to `m2 ≤ m3 ≤ m1`, gives `y → x` under `t = 1, f = 0`.
/// The dual case runs the same construction on complemented relations.
fn from_horn_witness(lang: &ConstraintLanguage, dual: bool) -> Result<PPDefinition> {
    let view = |r: &Relation| if dual { r.complemented() } else { r.clone() };
    let found = lang.relations().iter().enumerate().find_map(|(i, r)| {
        let r = view(r);
        if preserves_generator(Generator::EssNegative, &r) {
            return None;
        }
        let rows: Vec<u64> = r.tuples().iter().copied().collect();
        for &a in &rows {
            for &b in &rows {
                for &c in &rows {
                    if !r.contains(a & (b | !c) & r.full_mask()) {
                        return Some((i, a, a & b & c, a & c));
                    }
                }
            }
        }
        None
    });
    let (ri, m1, m2, m3) = found.ok_or_else(|| AbdError::Internal("no essential-negativity violation".into()))?;
    // Variables: x = 0, y = 1, f = 2, t = 3.
    let (f, t) = (2, 3);
    let class = |x: Var, y: Var| {
        move |i: usize| match (m1 >> i & 1, m2 >> i & 1, m3 >> i & 1) {
            (0, _, _) => f,
            (1, 1, _) => t,
            (1, 0, 1) => x,
            _ => y,
        }
    };
    let arity = lang.get(ri).arity();
    let mut body = vec![substitute(ri, arity, class(0, 1)), substitute(ri, arity, class(1, 0))];
    // Complementing swaps the roles of the two constants.
    body.extend(if dual {
        true_false_gadget(lang, f, t)?
    } else {
        true_false_gadget(lang, t, f)?
    });
    Ok(assemble(lang, &["x", "y", "f", "t"], body))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct Merged {
    language: ConstraintLanguage,
    constraints: Vec<Constraint>,
    rep: Vec<Var>,
}

/// Merges variables linked by equality constraints. The representative of
/// a class is its smallest hypothesis, or its smallest member otherwise.
fn merge_equalities(inst: &AbductionInstance) -> Merged {
    let n = inst.num_vars();
    let mut uf = UnionFind::new(n);
    for c in &inst.kb.constraints {
        if inst.relation_of(c).is_equality() {
            uf.union(c.args[0], c.args[1]);
        }
    }
    let mut members: BTreeMap<usize, Vec<Var>> = BTreeMap::new();
    for v in 0..n {
        members.entry(uf.find(v)).or_default().push(v);
    }
    let mut rep = vec![0; n];
    for class in members.values() {
        let r = class
            .iter()
            .copied()
            .find(|v| inst.hypotheses.contains(v))
            .unwrap_or(class[0]);
        for &v in class {
            rep[v] = r;
        }
    }
    let mut language = ConstraintLanguage::new();
    let mut index = BTreeMap::new();
    for (i, r) in inst.language.relations().iter().enumerate() {
        if !r.is_equality() {
            index.insert(i, language.insert(r.clone()).expect("names stay unique"));
        }
    }
    let constraints = inst
        .kb
        .constraints
        .iter()
        .filter(|c| !inst.relation_of(c).is_equality())
        .map(|c| Constraint::new(index[&c.relation], c.args.iter().map(|&v| rep[v]).collect()))
        .collect();
    Merged {
        language,
        constraints,
        rep,
    }
}

fn check_language(inst: &AbductionInstance, ess_positive: bool) -> Result<()> {
    let rest = ConstraintLanguage::from_relations(
        inst.language.relations().iter().filter(|r| !r.is_equality()).cloned(),
    )?;
    let flags = closure_flags(&rest);
    let ok = if ess_positive {
        flags.ess_positive
    } else {
        flags.ess_negative
    };
    if ok {
        Ok(())
    } else {
        let kind = if ess_positive { "positive" } else { "negative" };
        Err(AbdError::Precondition(format!("the language is not essentially {kind}")))
    }
}

/// Variables forced to 0 by a single constraint.
fn negative_units(lang: &ConstraintLanguage, constraints: &[Constraint]) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for c in constraints {
        for pi in prime_implicates(lang.get(c.relation)).unwrap_or_default() {
            if pi.pos == 0 && pi.neg.count_ones() == 1 {
                out.insert(c.args[pi.neg.trailing_zeros() as usize]);
            }
        }
    }
    out
}

/// Removes equality constraints from an essentially positive instance.
///
/// Each equality class is collapsed onto its representative. Hypotheses
/// other than the representative stay in `H` as unconstrained padding, so
/// that every explanation size remains available; when the representative
/// is forced to 0, the padding is forced to 0 as well.
pub fn eliminate_equality_ess_positive(inst: &AbductionInstance, _variant: Variant) -> Result<AbductionInstance> {
    check_language(inst, true)?;
    let Merged {
        mut language,
        mut constraints,
        rep,
    } = merge_equalities(inst);
    let forced = negative_units(&language, &constraints);
    let padding: Vec<Var> = inst.hypotheses.iter().copied().filter(|&h| rep[h] != h).collect();
    let blocked: Vec<Var> = padding.iter().copied().filter(|h| forced.contains(&rep[*h])).collect();
    if !blocked.is_empty() {
        let f = language.intern(rels::f())?;
        constraints.extend(blocked.into_iter().map(|h| Constraint::new(f, vec![h])));
    }
    let manifestations = inst.manifestations.iter().map(|&m| rep[m]).collect();
    inst.rebuild(language, constraints, &inst.hypotheses, &manifestations, inst.size)
}

/// Removes equality constraints from an essentially negative instance for
/// the bounded variant. Merged hypotheses collapse into one.
pub fn eliminate_equality_ess_negative(inst: &AbductionInstance) -> Result<AbductionInstance> {
    check_language(inst, false)?;
    let Merged {
        language,
        constraints,
        rep,
    } = merge_equalities(inst);
    let hypotheses = inst.hypotheses.iter().map(|&h| rep[h]).collect();
    let manifestations = inst.manifestations.iter().map(|&m| rep[m]).collect();
    inst.rebuild(language, constraints, &hypotheses, &manifestations, inst.size)
}
