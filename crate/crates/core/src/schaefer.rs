//! Polynomial satisfiability and implication for Horn, dual Horn, Krom and
//! affine knowledge bases.

use std::collections::{BTreeMap, BTreeSet};

use crate::clause::{affine_equations, prime_implicates};
use crate::error::{AbdError, Result};
use crate::lattice::ClosureFlags;
use crate::model::{AbductionInstance, Assignment, ConstraintLanguage, KnowledgeBase, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: Var,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: Var) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: Var) -> Self {
        Lit { var, positive: false }
    }

    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    pub fn holds(self, sigma: &[bool]) -> bool {
        sigma[self.var] == self.positive
    }
}

pub type Clause = Vec<Lit>;

/// `⊕ vars = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub vars: Vec<Var>,
    pub rhs: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Horn,
    DualHorn,
    Krom,
    Affine,
}

impl ClauseKind {
    /// A kind that fits every relation with these flags, preferring Horn.
    pub fn for_flags(flags: &ClosureFlags) -> Option<ClauseKind> {
        if flags.horn {
            Some(ClauseKind::Horn)
        } else if flags.dual_horn {
            Some(ClauseKind::DualHorn)
        } else if flags.bijunctive {
            Some(ClauseKind::Krom)
        } else if flags.affine {
            Some(ClauseKind::Affine)
        } else {
            None
        }
    }

    fn admits(self, c: &Clause) -> bool {
        match self {
            ClauseKind::Horn => c.iter().filter(|l| l.positive).count() <= 1,
            ClauseKind::DualHorn => c.iter().filter(|l| !l.positive).count() <= 1,
            ClauseKind::Krom => c.len() <= 2,
            ClauseKind::Affine => false,
        }
    }
}

/// A clause-level view of a knowledge base. Affine forms use `equations`,
/// every other kind uses `clauses`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseForm {
    pub kind: ClauseKind,
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
    pub equations: Vec<Equation>,
}

/// Normalises a clause: sorted, deduplicated, `None` for tautologies.
pub fn normalize(mut c: Clause) -> Option<Clause> {
    c.sort();
    c.dedup();
    if c.windows(2).any(|w| w[0].var == w[1].var) {
        return None;
    }
    Some(c)
}

/// Expands each constraint into its prime implicates (or equations for the
/// affine kind), checking that all of them fit `kind`.
pub fn to_clause_form(lang: &ConstraintLanguage, kb: &KnowledgeBase, num_vars: usize, kind: ClauseKind) -> Result<ClauseForm> {
    let mut clauses = BTreeSet::new();
    let mut equations = BTreeSet::new();
    let mut pi_cache = BTreeMap::new();
    let mut eq_cache = BTreeMap::new();
    for c in &kb.constraints {
        let rel = lang.get(c.relation);
        if kind == ClauseKind::Affine {
            let eqs = match eq_cache.get(&c.relation) {
                Some(e) => e,
                None => {
                    let e = affine_equations(rel).ok_or_else(|| not_expressible(rel.name(), kind))?;
                    eq_cache.entry(c.relation).or_insert(e)
                }
            };
            for e in eqs {
                let mut odd = BTreeSet::new();
                for (p, &v) in c.args.iter().enumerate() {
                    if e.vars >> p & 1 == 1 && !odd.remove(&v) {
                        odd.insert(v);
                    }
                }
                equations.insert(Equation {
                    vars: odd.into_iter().collect(),
                    rhs: e.rhs,
                });
            }
            continue;
        }
        let pis = match pi_cache.get(&c.relation) {
            Some(p) => p,
            None => {
                let p = prime_implicates(rel).ok_or_else(|| not_expressible(rel.name(), kind))?;
                pi_cache.entry(c.relation).or_insert(p)
            }
        };
        for pi in pis {
            let lits: Clause = (0..rel.arity())
                .filter_map(|p| {
                    if pi.pos >> p & 1 == 1 {
                        Some(Lit::pos(c.args[p]))
                    } else if pi.neg >> p & 1 == 1 {
                        Some(Lit::neg(c.args[p]))
                    } else {
                        None
                    }
                })
                .collect();
            let shape: Clause = (0..rel.arity())
                .filter_map(|p| {
                    if pi.pos >> p & 1 == 1 {
                        Some(Lit::pos(p))
                    } else if pi.neg >> p & 1 == 1 {
                        Some(Lit::neg(p))
                    } else {
                        None
                    }
                })
                .collect();
            if !kind.admits(&shape) {
                return Err(not_expressible(rel.name(), kind));
            }
            if let Some(n) = normalize(lits) {
                clauses.insert(n);
            }
        }
    }
    Ok(ClauseForm {
        kind,
        num_vars,
        clauses: clauses.into_iter().collect(),
        equations: equations.into_iter().filter(|e| !(e.vars.is_empty() && !e.rhs)).collect(),
    })
}

fn not_expressible(name: &str, kind: ClauseKind) -> AbdError {
    AbdError::Internal(format!("relation `{name}` is not expressible as {kind:?} clauses"))
}

impl ClauseForm {
    pub fn of_instance(inst: &AbductionInstance, kind: ClauseKind) -> Result<Self> {
        to_clause_form(&inst.language, &inst.kb, inst.num_vars(), kind)
    }

    /// The same form with unit constraints added.
    pub fn with_units(&self, ones: impl IntoIterator<Item = Var>, zeros: impl IntoIterator<Item = Var>) -> ClauseForm {
        let mut out = self.clone();
        for (vars, value) in [(ones.into_iter().collect::<Vec<_>>(), true), (zeros.into_iter().collect(), false)] {
            for v in vars {
                if out.kind == ClauseKind::Affine {
                    out.equations.push(Equation { vars: vec![v], rhs: value });
                } else {
                    out.clauses.push(vec![Lit { var: v, positive: value }]);
                }
            }
        }
        out
    }

    pub fn satisfied_by(&self, sigma: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(sigma)))
            && self
                .equations
                .iter()
                .all(|e| e.vars.iter().filter(|&&v| sigma[v]).count() % 2 == e.rhs as usize)
    }
}

/// A model of `cf`, or `None` if unsatisfiable. Defaults: Horn 0, dual
/// Horn 1, Krom by component order, affine free variables 0.
pub fn sat_poly(cf: &ClauseForm) -> Option<Assignment> {
    let values = match cf.kind {
        ClauseKind::Horn => horn_min_model(cf.num_vars, &cf.clauses)?,
        ClauseKind::DualHorn => {
            let flipped: Vec<Clause> = cf
                .clauses
                .iter()
                .map(|c| c.iter().map(|l| l.negated()).collect())
                .collect();
            horn_min_model(cf.num_vars, &flipped)?.into_iter().map(|b| !b).collect()
        }
        ClauseKind::Krom => krom_model(cf.num_vars, &cf.clauses)?,
        ClauseKind::Affine => gauss_solve(cf.num_vars, &cf.equations)?,
    };
    Some(Assignment::new(values))
}

/// Whether `cf ∧ E` entails every variable of `M`.
pub fn implies_poly(cf: &ClauseForm, e: &BTreeSet<Var>, m: &BTreeSet<Var>) -> bool {
    m.iter()
        .all(|&x| sat_poly(&cf.with_units(e.iter().copied(), [x])).is_none())
}

/// Whether `cf ∧ E` is satisfiable and entails `M`.
pub fn explains(cf: &ClauseForm, e: &BTreeSet<Var>, m: &BTreeSet<Var>) -> bool {
    sat_poly(&cf.with_units(e.iter().copied(), [])).is_some() && implies_poly(cf, e, m)
}

/// Minimal model of a Horn clause set by counter-based unit propagation.
pub fn horn_min_model(n: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let mut value = vec![false; n];
    let mut remaining: Vec<usize> = Vec::with_capacity(clauses.len());
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = std::collections::VecDeque::new();
    for (ci, c) in clauses.iter().enumerate() {
        let negs = c.iter().filter(|l| !l.positive).count();
        remaining.push(negs);
        for l in c.iter().filter(|l| !l.positive) {
            occurs[l.var].push(ci);
        }
        if negs == 0 {
            queue.push_back(ci);
        }
    }
    let head = |ci: usize| clauses[ci].iter().find(|l| l.positive).map(|l| l.var);
    let fire = |ci: usize, value: &mut Vec<bool>, pending: &mut std::collections::VecDeque<Var>| -> bool {
        match head(ci) {
            Some(v) => {
                if !value[v] {
                    value[v] = true;
                    pending.push_back(v);
                }
                true
            }
            None => false,
        }
    };
    let mut pending = std::collections::VecDeque::new();
    for ci in queue.drain(..) {
        if !fire(ci, &mut value, &mut pending) {
            return None;
        }
    }
    while let Some(v) = pending.pop_front() {
        for &ci in &occurs[v] {
            remaining[ci] -= 1;
            if remaining[ci] == 0 && !fire(ci, &mut value, &mut pending) {
                return None;
            }
        }
    }
    Some(value)
}

/// 2-SAT through strongly connected components of the implication graph.
pub fn krom_model(n: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let node = |l: Lit| 2 * l.var + usize::from(!l.positive);
    let mut adj = vec![Vec::new(); 2 * n];
    for c in clauses {
        match c.as_slice() {
            [] => return None,
            [a] => adj[node(a.negated())].push(node(*a)),
            [a, b] => {
                adj[node(a.negated())].push(node(*b));
                adj[node(b.negated())].push(node(*a));
            }
            _ => return None,
        }
    }
    let comp = tarjan(&adj);
    let mut out = vec![false; n];
    for (v, slot) in out.iter_mut().enumerate() {
        let (p, q) = (comp[2 * v], comp[2 * v + 1]);
        if p == q {
            return None;
        }
        // Tarjan numbers components in reverse topological order.
        *slot = p < q;
    }
    Some(out)
}

fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, i)) = call.last() {
            if i < adj[v].len() {
                let w = adj[v][i];
                call.last_mut().expect("non-empty").1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Gaussian elimination over GF(2); free variables are set to 0.
pub fn gauss_solve(n: usize, equations: &[Equation]) -> Option<Vec<bool>> {
    let words = n / 64 + 1;
    let rhs_bit = n;
    let mut rows: Vec<Vec<u64>> = equations
        .iter()
        .map(|e| {
            let mut r = vec![0u64; words];
            for &v in &e.vars {
                r[v / 64] ^= 1 << (v % 64);
            }
            if e.rhs {
                r[rhs_bit / 64] ^= 1 << (rhs_bit % 64);
            }
            r
        })
        .collect();
    let bit = |r: &[u64], c: usize| r[c / 64] >> (c % 64) & 1 == 1;
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| bit(&rows[i], col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && bit(row, col) {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| bit(r, rhs_bit)) {
        return None;
    }
    let mut out = vec![false; n];
    for (i, &col) in pivots.iter().enumerate() {
        out[col] = bit(&rows[i], rhs_bit);
    }
    Some(out)
}
