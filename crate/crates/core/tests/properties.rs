mod common;

use abdkit::lattice::{closure_flags, identify_coclone};
use abdkit::model::NamedConstraint;
use abdkit::oracle::oracle_abduce;
use abdkit::reductions::{parse_wsat, reduce_is10_eq_to_wsat, reduce_iv2_eq_to_wsat, wsat_bruteforce};
use abdkit::solvers::abd_to_le;
use abdkit::verdict::classify;
use abdkit::{parse_instance, serialize_instance, AbductionInstance, ConstraintLanguage, Param, Relation, Variant};
use common::{random_instance, random_relation, rng, Region, Shape};
use proptest::prelude::*;

const REGIONS: [Region; 9] = [
    Region::EssPositive,
    Region::EssNegative,
    Region::Affine2,
    Region::DualHorn,
    Region::Implicative,
    Region::Is10,
    Region::Horn,
    Region::Schaefer,
    Region::Any,
];

fn instance(seed: u64, region: usize) -> AbductionInstance {
    random_instance(&mut rng(seed), REGIONS[region % REGIONS.len()], Shape::default())
}

fn permute_columns(r: &Relation, perm: &[usize]) -> Relation {
    let tuples = r.tuples().iter().map(|&t| {
        perm.iter().enumerate().fold(0u64, |acc, (j, &src)| acc | (t >> src & 1) << j)
    });
    Relation::new(format!("{}_p", r.name()), r.arity(), tuples).unwrap()
}

/// The same instance with every variable renamed and constraints reversed.
fn renamed(inst: &AbductionInstance) -> AbductionInstance {
    let name = |v: usize| format!("w_{}", inst.var_name(v));
    let cons = inst
        .kb
        .constraints
        .iter()
        .rev()
        .map(|c| NamedConstraint { relation: c.relation, args: c.args.iter().map(|&v| name(v)).collect() })
        .collect();
    AbductionInstance::from_named(
        inst.language.clone(),
        cons,
        inst.hypotheses.iter().map(|&v| name(v)),
        inst.manifestations.iter().map(|&v| name(v)),
        inst.size,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn instance_text_round_trips(seed in any::<u64>(), region in 0usize..9) {
        let inst = instance(seed, region);
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(serialize_instance(&back), text);
        for v in [Variant::Plain, Variant::AtMost, Variant::Exact] {
            prop_assert_eq!(oracle_abduce(&back, v).unwrap().is_some(), oracle_abduce(&inst, v).unwrap().is_some());
        }
    }

    #[test]
    fn answers_ignore_variable_names(seed in any::<u64>(), region in 0usize..9) {
        let inst = instance(seed, region);
        let other = renamed(&inst);
        for v in [Variant::Plain, Variant::AtMost, Variant::Exact] {
            prop_assert_eq!(oracle_abduce(&inst, v).unwrap().is_some(), oracle_abduce(&other, v).unwrap().is_some());
        }
    }

    #[test]
    fn plain_equals_at_most_with_full_budget(seed in any::<u64>(), region in 0usize..9) {
        let inst = instance(seed, region);
        let plain = oracle_abduce(&inst, Variant::Plain).unwrap().is_some();
        prop_assert_eq!(plain, oracle_abduce(&abd_to_le(&inst), Variant::AtMost).unwrap().is_some());
    }

    #[test]
    fn coclone_ignores_argument_order(seed in any::<u64>(), region in 0usize..9, shift in 0usize..3) {
        let mut r = rng(seed);
        let Some(rel) = random_relation(&mut r, REGIONS[region % REGIONS.len()], "R") else { return Ok(()) };
        let k = rel.arity();
        let perm: Vec<usize> = (0..k).map(|j| (j + shift) % k).collect();
        let a = ConstraintLanguage::from_relations(vec![rel.clone()]).unwrap();
        let b = ConstraintLanguage::from_relations(vec![permute_columns(&rel, &perm)]).unwrap();
        prop_assert_eq!(identify_coclone(&a).class, identify_coclone(&b).class);
        for p in [Param::H, Param::M, Param::V] {
            for v in [Variant::Plain, Variant::AtMost, Variant::Exact] {
                prop_assert_eq!(classify(&a, v, p).unwrap().label, classify(&b, v, p).unwrap().label);
            }
        }
    }

    #[test]
    fn flags_of_a_union_are_the_join(seed in any::<u64>(), x in 0usize..9, y in 0usize..9) {
        let mut r = rng(seed);
        let (Some(a), Some(b)) = (
            random_relation(&mut r, REGIONS[x], "A"),
            random_relation(&mut r, REGIONS[y], "B"),
        ) else { return Ok(()) };
        let la = ConstraintLanguage::from_relations(vec![a.clone()]).unwrap();
        let lb = ConstraintLanguage::from_relations(vec![b.clone()]).unwrap();
        let lab = ConstraintLanguage::from_relations(vec![a, b]).unwrap();
        prop_assert_eq!(closure_flags(&lab), closure_flags(&la).join(&closure_flags(&lb)));
    }

    #[test]
    fn wsat_text_round_trips(seed in any::<u64>(), dual in any::<bool>()) {
        let (region, f): (Region, fn(&AbductionInstance) -> _) = if dual {
            (Region::DualHorn, reduce_iv2_eq_to_wsat)
        } else {
            (Region::Is10, reduce_is10_eq_to_wsat)
        };
        let inst = random_instance(&mut rng(seed), region, Shape::default());
        let w = f(&inst).unwrap();
        let text = w.to_string();
        let back = parse_wsat(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(wsat_bruteforce(&back).unwrap().is_some(), wsat_bruteforce(&w).unwrap().is_some());
    }
}
