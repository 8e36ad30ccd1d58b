//! Random instances for the language regions the solvers are written for,
//! and small graphs up to isomorphism.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use abdkit::lattice::{closure_flags, ClosureFlags};
use abdkit::model::{rels, NamedConstraint};
use abdkit::reductions::Graph;
use abdkit::{AbductionInstance, ConstraintLanguage, Relation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    EssPositive,
    EssNegative,
    Affine2,
    DualHorn,
    DualHorn1,
    Implicative,
    Is10,
    DefiniteHorn,
    Horn,
    Bijunctive,
    Schaefer,
    Any,
}

impl Region {
    fn pool(self) -> Vec<Relation> {
        use Region::*;
        match self {
            EssPositive => vec![rels::or(2), rels::or(3), rels::f(), rels::t(), rels::eq()],
            EssNegative => vec![rels::nand(2), rels::nand(3), rels::t(), rels::f(), rels::eq()],
            Affine2 => vec![rels::eq(), rels::neq(), rels::t(), rels::f()],
            DualHorn => vec![rels::imp(), rels::or(2), rels::or(3), rels::dual_horn3(), rels::t(), rels::f()],
            DualHorn1 => vec![rels::imp(), rels::or(2), rels::or(3), rels::dual_horn3(), rels::t()],
            Implicative => vec![rels::imp(), rels::t(), rels::f(), rels::eq()],
            Is10 => vec![rels::imp(), rels::nand(2), rels::nand(3), rels::t(), rels::f(), rels::eq()],
            DefiniteHorn => vec![rels::imp(), rels::horn3(), rels::t(), rels::eq()],
            Horn => vec![rels::imp(), rels::horn3(), rels::nand(2), rels::t(), rels::f()],
            Bijunctive => vec![rels::imp(), rels::or(2), rels::nand(2), rels::neq(), rels::t(), rels::f()],
            Schaefer => unreachable!("drawn per class"),
            Any => vec![rels::one_in_three(), rels::nae3(), rels::imp(), rels::or(2), rels::even(2)],
        }
    }

    pub fn admits(self, f: &ClosureFlags) -> bool {
        use Region::*;
        match self {
            EssPositive => f.ess_positive,
            EssNegative => f.ess_negative,
            Affine2 => f.bijunctive && f.affine,
            DualHorn => f.dual_horn,
            DualHorn1 => f.dual_horn && f.one_valid,
            Implicative => f.horn && f.dual_horn,
            Is10 => f.and_or,
            DefiniteHorn => f.horn && f.one_valid,
            Horn => f.horn,
            Bijunctive => f.bijunctive,
            Schaefer => f.horn || f.dual_horn || f.bijunctive || f.affine,
            Any => true,
        }
    }
}

/// A random nonempty relation of arity 1 to 3 inside `region`.
pub fn random_relation(rng: &mut impl Rng, region: Region, name: &str) -> Option<Relation> {
    for _ in 0..200 {
        let arity = rng.gen_range(1..=3);
        let tuples: Vec<u64> = (0..1u64 << arity).filter(|_| rng.gen_bool(0.5)).collect();
        if tuples.is_empty() {
            continue;
        }
        let r = Relation::new(name, arity, tuples).unwrap();
        let lang = ConstraintLanguage::from_relations(vec![r.clone()]).unwrap();
        if region.admits(&closure_flags(&lang)) {
            return Some(r);
        }
    }
    None
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_vars: usize,
    pub max_h: usize,
    pub max_m: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_vars: 9, max_h: 6, max_m: 3 }
    }
}

/// A random instance whose language lies in `region`, with a size bound
/// between 0 and `|H| + 1`.
pub fn random_instance(rng: &mut impl Rng, region: Region, shape: Shape) -> AbductionInstance {
    if region == Region::Schaefer {
        // one tractable class at a time, so the union stays inside it
        let sub = [Region::Horn, Region::DualHorn, Region::Affine2, Region::Implicative, Region::Bijunctive];
        let pick = sub[rng.gen_range(0..sub.len())];
        return random_instance(rng, pick, shape);
    }
    let pool = region.pool();
    let take = rng.gen_range(1..=3);
    let mut relations: Vec<Relation> = pool.choose_multiple(rng, take).cloned().collect();
    if rng.gen_bool(0.4) {
        if let Some(r) = random_relation(rng, region, "R") {
            relations.push(r);
        }
    }
    let lang = ConstraintLanguage::from_relations(relations).unwrap();
    let n = rng.gen_range(2..=shape.max_vars);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut cons = Vec::new();
    for _ in 0..rng.gen_range(0..=n + 2) {
        let relation = rng.gen_range(0..lang.len());
        let arity = lang.get(relation).arity();
        let args = (0..arity).map(|_| names.choose(rng).unwrap().clone()).collect();
        cons.push(NamedConstraint { relation, args });
    }
    let nh = rng.gen_range(0..=shape.max_h.min(n));
    let h: Vec<String> = names.choose_multiple(rng, nh).cloned().collect();
    let nm = rng.gen_range(0..=shape.max_m.min(n));
    let m: Vec<String> = names.choose_multiple(rng, nm).cloned().collect();
    let size = rng.gen_range(0..=h.len() + 1);
    let inst = AbductionInstance::from_named(lang, cons, h, m, Some(size)).unwrap();
    assert!(region.admits(&closure_flags(&inst.language)));
    inst
}

/// Canonical code of a graph on `n` vertices given by adjacency masks:
/// the largest upper-triangle encoding over all vertex orders that respect
/// a degree-based refinement.
fn canonical(n: usize, adj: &[u8]) -> u32 {
    let deg = |v: usize| adj[v].count_ones();
    let key = |v: usize| {
        let mut nd: Vec<u32> = (0..n).filter(|&u| adj[v] >> u & 1 == 1).map(deg).collect();
        nd.sort();
        (deg(v), nd)
    };
    let mut classes: BTreeMap<(u32, Vec<u32>), Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        classes.entry(key(v)).or_default().push(v);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let mut best = 0u32;
    let mut order = Vec::with_capacity(n);
    fn rec(classes: &[Vec<usize>], ci: usize, used: &mut Vec<bool>, order: &mut Vec<usize>, n: usize, adj: &[u8], best: &mut u32) {
        if ci == classes.len() {
            let mut code = 0u32;
            let mut bit = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if adj[order[i]] >> order[j] & 1 == 1 {
                        code |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            *best = (*best).max(code);
            return;
        }
        let class = &classes[ci];
        let placed = order.len();
        let start = classes[..ci].iter().map(Vec::len).sum::<usize>();
        if placed == start + class.len() {
            return rec(classes, ci + 1, used, order, n, adj, best);
        }
        for &v in class {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(classes, ci, used, order, n, adj, best);
                order.pop();
                used[v] = false;
            }
        }
    }
    rec(&classes, 0, &mut vec![false; n], &mut order, n, adj, &mut best);
    best
}

/// All graphs on exactly `n ≤ 7` vertices up to isomorphism, built by
/// adding a vertex to every graph on `n − 1` vertices.
pub fn graphs_up_to_iso(n: usize) -> Vec<Graph> {
    assert!(n <= 7);
    let mut level: Vec<Vec<u8>> = vec![vec![]];
    for k in 1..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &level {
            for nb in 0..1u16 << (k - 1) {
                let mut adj: Vec<u8> = g.clone();
                adj.push(nb as u8);
                for (u, a) in adj.iter_mut().enumerate().take(k - 1) {
                    if nb >> u & 1 == 1 {
                        *a |= 1 << (k - 1);
                    }
                }
                if seen.insert(canonical(k, &adj)) {
                    next.push(adj);
                }
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|adj| {
            let vertices: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| adj[i] >> j & 1 == 1);
            Graph::new(vertices, edges.collect::<Vec<_>>()).unwrap()
        })
        .collect()
}
