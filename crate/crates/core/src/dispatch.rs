//! Engine selection and the cross-checking harness.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{AbdError, Result};
use crate::lattice::{closure_flags, identify_coclone, ClosureFlags};
use crate::model::{AbductionInstance, Explanation, Param, Variant};
use crate::oracle::{check_explanation, check_oracle_budget, oracle_abduce, Check};
use crate::reductions::{
    essneg_reduction, reduce_is10_eq_to_wsat, reduce_iv2_eq_to_wsat, wsat_bruteforce, WsatInstance,
};
use crate::schaefer::{explains, ClauseForm, ClauseKind};
use crate::solvers::{
    abd_to_le, solve_2affine, solve_by_h_enumeration, solve_by_size_enumeration, solve_definite_horn_plain,
    solve_ess_negative_le, solve_ess_positive, solve_m_setcover,
};
use crate::verdict::{classify_label, Verdict};

pub type EngineFn = fn(&AbductionInstance, Variant) -> Result<Option<Explanation>>;

/// A named solver with the region it is written for.
#[derive(Clone, Copy)]
pub struct Engine {
    pub name: &'static str,
    pub applies: fn(&ClosureFlags, Variant) -> bool,
    pub run: EngineFn,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name)
    }
}

/// `|H|` above which automatic dispatch skips subset enumeration.
pub const AUTO_ENUMERATION_H: usize = 20;

pub const ORACLE: &str = "oracle";

fn run_ess_positive(inst: &AbductionInstance, v: Variant) -> Result<Option<Explanation>> {
    match v {
        Variant::Plain => solve_ess_positive(&abd_to_le(inst), Variant::AtMost),
        _ => solve_ess_positive(inst, v),
    }
}

fn run_h_enumeration(inst: &AbductionInstance, v: Variant) -> Result<Option<Explanation>> {
    if inst.hypotheses.len() > AUTO_ENUMERATION_H {
        return Err(AbdError::TooLarge(format!("|H| = {} exceeds {AUTO_ENUMERATION_H}", inst.hypotheses.len())));
    }
    solve_by_h_enumeration(inst, v)
}

fn from_wsat(inst: &AbductionInstance, w: &WsatInstance, base: &BTreeSet<usize>) -> Result<Option<Explanation>> {
    let Some(a) = wsat_bruteforce(w)? else { return Ok(None) };
    let mut e = w
        .to_explanation(inst, &a)
        .ok_or_else(|| AbdError::Internal("WSAT variable is not a hypothesis".into()))?;
    e.0.extend(base.iter().copied());
    Ok(Some(e))
}

fn run_wsat_iv2(inst: &AbductionInstance, _: Variant) -> Result<Option<Explanation>> {
    from_wsat(inst, &reduce_iv2_eq_to_wsat(inst)?, &BTreeSet::new())
}

fn run_wsat_is10(inst: &AbductionInstance, _: Variant) -> Result<Option<Explanation>> {
    from_wsat(inst, &reduce_is10_eq_to_wsat(inst)?, &BTreeSet::new())
}

fn run_wsat_essneg(inst: &AbductionInstance, _: Variant) -> Result<Option<Explanation>> {
    let r = essneg_reduction(inst)?;
    from_wsat(inst, &r.wsat, &r.e_mp)
}

fn run_oracle(inst: &AbductionInstance, v: Variant) -> Result<Option<Explanation>> {
    check_oracle_budget(inst)?;
    oracle_abduce(inst, v)
}

/// Every engine, in the order automatic dispatch tries them: specialised
/// polynomial solvers, then parameterised enumeration, then reductions to
/// weighted satisfiability, then the oracle.
pub const ENGINES: &[Engine] = &[
    Engine {
        name: "solve_ess_positive",
        applies: |f, _| f.ess_positive,
        run: run_ess_positive,
    },
    Engine {
        name: "solve_ess_negative_le",
        applies: |f, v| f.ess_negative && v != Variant::Exact,
        run: solve_ess_negative_le,
    },
    Engine {
        name: "solve_2affine",
        applies: |f, _| f.bijunctive && f.affine,
        run: solve_2affine,
    },
    Engine {
        name: "solve_definite_horn_plain",
        applies: |f, v| f.horn && f.one_valid && v == Variant::Plain,
        run: |inst, _| solve_definite_horn_plain(inst),
    },
    Engine {
        name: "solve_M_setcover",
        applies: |f, _| f.dual_horn,
        run: solve_m_setcover,
    },
    Engine {
        name: "solve_by_H_enumeration",
        applies: |f, _| f.is_schaefer(),
        run: run_h_enumeration,
    },
    Engine {
        name: "solve_by_size_enumeration",
        applies: |f, v| f.is_schaefer() && v != Variant::Plain,
        run: solve_by_size_enumeration,
    },
    Engine {
        name: "reduce_iv2_eq_to_wsat",
        applies: |f, v| f.dual_horn && v == Variant::Exact,
        run: run_wsat_iv2,
    },
    Engine {
        name: "reduce_is10_eq_to_wsat",
        applies: |f, v| f.and_or && v == Variant::Exact,
        run: run_wsat_is10,
    },
    Engine {
        name: "reduce_essneg_eq_to_wsat",
        applies: |f, v| f.ess_negative && v == Variant::Exact,
        run: run_wsat_essneg,
    },
    Engine {
        name: ORACLE,
        applies: |_, _| true,
        run: run_oracle,
    },
];

pub fn engine_by_name(name: &str) -> Result<&'static Engine> {
    ENGINES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| AbdError::UnknownEngine(name.to_string()))
}

/// Which engine to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineChoice<'a> {
    Auto,
    Named(&'a str),
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub answer: bool,
    pub witness: Option<Vec<String>>,
    pub engine: &'static str,
    pub verdict: Option<Verdict>,
    pub coclone: String,
}

/// Checks a witness with the polynomial kernels when the language allows
/// it, and with the oracle otherwise.
fn witness_ok(inst: &AbductionInstance, variant: Variant, e: &Explanation) -> Result<bool> {
    if !variant.admits(e.len(), inst.bound_for(variant)?) || !e.vars().is_subset(&inst.hypotheses) {
        return Ok(false);
    }
    let flags = closure_flags(&inst.language);
    if let Some(kind) = ClauseKind::for_flags(&flags) {
        let cf = ClauseForm::of_instance(inst, kind)?;
        return Ok(explains(&cf, e.vars(), &inst.manifestations));
    }
    check_oracle_budget(inst)?;
    Ok(check_explanation(inst, e) == Check::Valid)
}

/// Solves `inst`. `param` selects the verdict reported alongside.
pub fn solve(inst: &AbductionInstance, variant: Variant, choice: EngineChoice, param: Param) -> Result<SolveResult> {
    inst.bound_for(variant)?;
    let label = identify_coclone(&inst.language);
    let flags = label.flags;
    let (engine, found) = match choice {
        EngineChoice::Named(name) => {
            let engine = engine_by_name(name)?;
            if !(engine.applies)(&flags, variant) {
                return Err(AbdError::Precondition(format!(
                    "{name} does not apply to {} with variant {}",
                    label.name(),
                    variant.label()
                )));
            }
            (engine, (engine.run)(inst, variant)?)
        }
        EngineChoice::Auto => auto(inst, variant, &flags)?,
    };
    if let Some(e) = &found {
        if !witness_ok(inst, variant, e)? {
            return Err(AbdError::Internal(format!("{} returned an invalid witness", engine.name)));
        }
    }
    let verdict = match classify_label(&label, variant, param) {
        Ok(v) => Some(v),
        Err(AbdError::NotMeaningful) => None,
        Err(e) => return Err(e),
    };
    Ok(SolveResult {
        answer: found.is_some(),
        witness: found.map(|e| e.names(inst)),
        engine: engine.name,
        verdict,
        coclone: label.name(),
    })
}

fn auto(inst: &AbductionInstance, variant: Variant, flags: &ClosureFlags) -> Result<(&'static Engine, Option<Explanation>)> {
    let mut last = None;
    for engine in ENGINES.iter().filter(|e| (e.applies)(flags, variant)) {
        match (engine.run)(inst, variant) {
            Ok(found) => return Ok((engine, found)),
            Err(e @ (AbdError::TooLarge(_) | AbdError::Precondition(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| AbdError::Internal("no engine applies".into())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngineOutcome {
    pub engine: &'static str,
    pub answer: Option<bool>,
    pub witness: Option<Vec<String>>,
    /// Whether the witness passes the oracle check for the variant.
    pub witness_valid: Option<bool>,
    pub error: Option<String>,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub oracle: bool,
    pub outcomes: Vec<EngineOutcome>,
    pub all_agree: bool,
}

/// Runs every applicable engine and compares each with the oracle.
pub fn verify(inst: &AbductionInstance, variant: Variant) -> Result<VerifyReport> {
    verify_with(inst, variant, ENGINES)
}

/// [`verify`] over a custom engine list.
pub fn verify_with(inst: &AbductionInstance, variant: Variant, engines: &[Engine]) -> Result<VerifyReport> {
    check_oracle_budget(inst)?;
    let bound = inst.bound_for(variant)?;
    let oracle = oracle_abduce(inst, variant)?.is_some();
    let flags = closure_flags(&inst.language);
    let mut outcomes = Vec::new();
    for engine in engines.iter().filter(|e| e.name != ORACLE && (e.applies)(&flags, variant)) {
        let outcome = match (engine.run)(inst, variant) {
            Ok(found) => {
                let valid = found
                    .as_ref()
                    .map(|e| variant.admits(e.len(), bound) && check_explanation(inst, e) == Check::Valid);
                EngineOutcome {
                    engine: engine.name,
                    answer: Some(found.is_some()),
                    agrees: found.is_some() == oracle && valid != Some(false),
                    witness: found.map(|e| e.names(inst)),
                    witness_valid: valid,
                    error: None,
                }
            }
            Err(AbdError::TooLarge(msg)) => EngineOutcome {
                engine: engine.name,
                answer: None,
                witness: None,
                witness_valid: None,
                error: Some(msg),
                agrees: true,
            },
            Err(e) => EngineOutcome {
                engine: engine.name,
                answer: None,
                witness: None,
                witness_valid: None,
                error: Some(e.to_string()),
                agrees: false,
            },
        };
        outcomes.push(outcome);
    }
    let all_agree = outcomes.iter().all(|o| o.agrees);
    Ok(VerifyReport { oracle, outcomes, all_agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rels, InstanceBuilder, Relation};

    fn train(s: usize) -> AbductionInstance {
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
            .size(s)
            .build()
            .unwrap()
    }

    #[test]
    fn auto_on_train_example() {
        let r = solve(&train(1), Variant::Exact, EngineChoice::Auto, Param::H).unwrap();
        assert!(r.answer);
        assert_eq!(r.witness, Some(vec!["doorOpen".to_string()]));
        assert_eq!(r.engine, "solve_by_H_enumeration");
    }

    #[test]
    fn auto_picks_ess_negative() {
        let inst = InstanceBuilder::new()
            .relation(rels::nand(2))
            .constraint("NAND2", &["a", "b"])
            .hypotheses(&["a"])
            .manifestations(&["a"])
            .size(1)
            .build()
            .unwrap();
        let r = solve(&inst, Variant::AtMost, EngineChoice::Auto, Param::E).unwrap();
        assert_eq!(r.engine, "solve_ess_negative_le");
        assert!(r.answer);
    }

    #[test]
    fn named_engine_outside_region() {
        let err = solve(&train(1), Variant::Exact, EngineChoice::Named("solve_2affine"), Param::H).unwrap_err();
        assert!(matches!(err, AbdError::Precondition(_)));
        let err = solve(&train(1), Variant::Exact, EngineChoice::Named("nope"), Param::H).unwrap_err();
        assert!(matches!(err, AbdError::UnknownEngine(_)));
    }

    #[test]
    fn verify_flags_a_corrupted_engine() {
        let report = verify(&train(2), Variant::Exact).unwrap();
        assert!(report.all_agree, "{report:?}");
        let liar = Engine {
            name: "always_no",
            applies: |_, _| true,
            run: |_, _| Ok(None),
        };
        let report = verify_with(&train(1), Variant::Exact, &[liar]).unwrap();
        assert!(!report.all_agree);
        let forger = Engine {
            name: "forged_witness",
            applies: |_, _| true,
            run: |inst, _| Ok(inst.explanation_from_names(&["time"])),
        };
        let report = verify_with(&train(1), Variant::Exact, &[forger]).unwrap();
        assert_eq!(report.outcomes[0].witness_valid, Some(false));
        assert!(!report.all_agree);
    }
}
