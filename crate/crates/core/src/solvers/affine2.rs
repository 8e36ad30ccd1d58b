use std::collections::{BTreeMap, BTreeSet};

use super::{flags_of, precondition};
use crate::error::{AbdError, Result};
use crate::model::{AbductionInstance, Explanation, Var, Variant};
use crate::schaefer::{ClauseForm, ClauseKind};

/// Union-find that tracks the parity between a node and its root.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf { parent: (0..n).collect(), parity: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.parity[x] ^= p;
        (root, self.parity[x])
    }

    /// Records `x ⊕ y = d`; false on contradiction.
    fn union(&mut self, x: usize, y: usize, d: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == d;
        }
        let (child, root) = if rx < ry { (ry, rx) } else { (rx, ry) };
        self.parent[child] = root;
        self.parity[child] = px ^ py ^ d;
        true
    }
}

/// The structure of a satisfiable knowledge base of width-2 equations with
/// respect to `H` and `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDecomposition {
    /// Variables forced to 1.
    pub forced_true: BTreeSet<Var>,
    /// Variables forced to 0.
    pub forced_false: BTreeSet<Var>,
    /// The classes (parity sides) that hold an unforced manifestation.
    pub manifestation_classes: Vec<BTreeSet<Var>>,
    /// Hypotheses that can be added to a minimum explanation, in the order
    /// they are added.
    pub extension: Vec<Var>,
    /// Size of the smallest explanation.
    pub min_size: usize,
    /// Size of the largest explanation.
    pub max_size: usize,
    /// A smallest explanation: the least hypothesis of every class.
    pub minimum: BTreeSet<Var>,
}

/// Decomposes the knowledge base into parity clusters. `Ok(None)` means
/// there is no explanation at all.
pub fn cluster_decomposition(inst: &AbductionInstance) -> Result<Option<ClusterDecomposition>> {
    let flags = flags_of(inst);
    precondition(flags.affine && flags.bijunctive, "the language is not affine of width 2")?;
    let cf = ClauseForm::of_instance(inst, ClauseKind::Affine)?;
    let n = inst.num_vars();
    let zero = n;
    let mut uf = ParityUf::new(n + 1);
    for eq in &cf.equations {
        let ok = match eq.vars.as_slice() {
            [] => !eq.rhs,
            [x] => uf.union(*x, zero, eq.rhs),
            [x, y] => uf.union(*x, *y, eq.rhs),
            _ => return Err(AbdError::Precondition("an equation has more than two variables".into())),
        };
        if !ok {
            return Ok(None);
        }
    }
    let (zroot, zpar) = uf.find(zero);
    // side key: (root, parity relative to root)
    let mut sides: BTreeMap<(usize, bool), BTreeSet<Var>> = BTreeMap::new();
    let mut forced_true = BTreeSet::new();
    let mut forced_false = BTreeSet::new();
    for v in 0..n {
        let (r, p) = uf.find(v);
        if r == zroot {
            if p ^ zpar {
                forced_true.insert(v);
            } else {
                forced_false.insert(v);
            }
        } else {
            sides.entry((r, p)).or_default().insert(v);
        }
    }
    let m = &inst.manifestations;
    let h = &inst.hypotheses;
    if m.iter().any(|v| forced_false.contains(v)) {
        return Ok(None);
    }
    let m_sides: BTreeSet<(usize, bool)> = m
        .iter()
        .filter(|v| !forced_true.contains(v))
        .map(|&v| uf.find(v))
        .collect();
    if m_sides.iter().any(|&(r, p)| m_sides.contains(&(r, !p))) {
        return Ok(None);
    }
    let mut minimum = BTreeSet::new();
    let mut classes = Vec::new();
    for key in &m_sides {
        let side = &sides[key];
        let Some(&rep) = side.iter().find(|v| h.contains(v)) else {
            return Ok(None);
        };
        minimum.insert(rep);
        classes.push(side.clone());
    }
    let m_roots: BTreeSet<usize> = m_sides.iter().map(|&(r, _)| r).collect();
    let mut extension: BTreeSet<Var> = h.intersection(&forced_true).copied().collect();
    for side in &classes {
        extension.extend(side.intersection(h).filter(|v| !minimum.contains(v)));
    }
    let roots: BTreeSet<usize> = sides.keys().map(|&(r, _)| r).collect();
    for r in roots.difference(&m_roots) {
        let count = |p: bool| sides.get(&(*r, p)).map_or(0, |s| s.intersection(h).count());
        // Ties pick the side holding the root.
        let p = count(true) > count(false);
        if let Some(side) = sides.get(&(*r, p)) {
            extension.extend(side.intersection(h));
        }
    }
    let extension: Vec<Var> = extension.into_iter().collect();
    Ok(Some(ClusterDecomposition {
        forced_true,
        forced_false,
        min_size: minimum.len(),
        max_size: minimum.len() + extension.len(),
        manifestation_classes: classes,
        extension,
        minimum,
    }))
}

/// Abduction over knowledge bases of width-2 equations, for every variant.
pub fn solve_2affine(inst: &AbductionInstance, variant: Variant) -> Result<Option<Explanation>> {
    let bound = inst.bound_for(variant)?;
    let Some(d) = cluster_decomposition(inst)? else {
        return Ok(None);
    };
    match (variant, bound) {
        (Variant::AtMost, Some(s)) if d.min_size > s => Ok(None),
        (Variant::Exact, Some(s)) if s < d.min_size || s > d.max_size => Ok(None),
        (Variant::Exact, Some(s)) => {
            let mut e = d.minimum;
            e.extend(d.extension.iter().take(s - e.len()));
            Ok(Some(Explanation(e)))
        }
        _ => Ok(Some(Explanation(d.minimum))),
    }
}
