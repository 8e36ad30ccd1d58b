//! Bounded search for primitive positive definitions, lookup tables of
//! definitions, and rewriting instances through them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;

use crate::error::{AbdError, Result};
use crate::format::{identifier, insert_relation, parse_rel, syntax, tokens, write_relations};
use crate::model::{rels, AbductionInstance, Constraint, ConstraintLanguage, NamedConstraint, Relation};

/// Default bound on auxiliary variables for [`pp_member`].
pub const DEFAULT_MAX_AUX: usize = 4;

/// Total variables (free plus auxiliary) the search handles; models are
/// kept as 128-bit masks over all assignments.
const MAX_SEARCH_VARS: usize = 7;

/// Cap on auxiliary column combinations tried per auxiliary count.
const MAX_COMBINATIONS: usize = 200_000;

/// `target(x_1..x_k) ≡ ∃ y_1..y_m . body`. Body variables `0..k` are the
/// free variables, `k..k+m` the auxiliary ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPDefinition {
    pub target: Relation,
    pub free_vars: Vec<String>,
    pub aux_vars: Vec<String>,
    pub language: ConstraintLanguage,
    pub body: Vec<Constraint>,
}

impl PPDefinition {
    pub fn num_vars(&self) -> usize {
        self.free_vars.len() + self.aux_vars.len()
    }

    /// Projection of the body's models onto the free variables.
    pub fn projection(&self) -> BTreeSet<u64> {
        let n = self.num_vars();
        let k = self.free_vars.len();
        let free_mask = (1u64 << k) - 1;
        assert!(n <= 30, "definition too large to enumerate");
        (0..1u64 << n)
            .filter(|&a| {
                self.body
                    .iter()
                    .all(|c| self.language.get(c.relation).contains(c.tuple_under(a)))
            })
            .map(|a| a & free_mask)
            .collect()
    }

    /// Whether the projection equals the target relation exactly.
    pub fn is_valid(&self) -> bool {
        self.projection() == *self.target.tuples()
    }

    pub fn uses_equality(&self) -> bool {
        self.body.iter().any(|c| self.language.get(c.relation).is_equality())
    }
}

struct Atom {
    relation: usize,
    args: Vec<usize>,
    models: u128,
}

/// Searches for a definition of `target` over `lang` (plus equality when
/// `allow_eq`) with at most `max_aux` auxiliary variables. Candidates with
/// fewer auxiliary variables win, then bodies with fewer constraints.
/// `None` only means that nothing was found within the bound.
pub fn pp_member(target: &Relation, lang: &ConstraintLanguage, allow_eq: bool, max_aux: usize) -> Option<PPDefinition> {
    let mut source = lang.clone();
    if allow_eq {
        source.intern(rels::eq()).ok()?;
    }
    let k = target.arity();
    if k > MAX_SEARCH_VARS {
        return None;
    }
    let rows: Vec<u64> = target.tuples().iter().copied().collect();
    let r = rows.len();
    if r > 16 {
        return None;
    }
    // Columns as functions from row index to bit.
    let free_cols: Vec<u32> = (0..k)
        .map(|i| {
            rows.iter()
                .enumerate()
                .fold(0u32, |acc, (j, &t)| acc | ((t >> i & 1) as u32) << j)
        })
        .collect();
    let distinct_free: BTreeSet<u32> = free_cols.iter().copied().collect();
    let candidates: Vec<u32> = (0..1u32 << r).filter(|c| !distinct_free.contains(c)).collect();
    let useful = max_aux.min(MAX_SEARCH_VARS - k).min(candidates.len());

    for a in 0..=useful {
        let mut best: Option<Vec<Atom>> = None;
        for aux in candidates.iter().copied().combinations(a).take(MAX_COMBINATIONS) {
            let cols: Vec<u32> = free_cols.iter().copied().chain(aux).collect();
            if let Some(body) = definition_for(target, &source, &rows, &cols) {
                if best.as_ref().is_none_or(|b| body.len() < b.len()) {
                    best = Some(body);
                }
            }
        }
        if let Some(body) = best {
            return Some(PPDefinition {
                target: target.clone(),
                free_vars: (1..=k).map(|i| format!("x{i}")).collect(),
                aux_vars: (1..=a).map(|i| format!("y{i}")).collect(),
                language: source,
                body: body.into_iter().map(|at| Constraint::new(at.relation, at.args)).collect(),
            });
        }
    }
    None
}

/// The strongest conjunction satisfied by the extended rows, if it defines
/// `target`, greedily pruned of redundant atoms.
fn definition_for(target: &Relation, lang: &ConstraintLanguage, rows: &[u64], cols: &[u32]) -> Option<Vec<Atom>> {
    let n = cols.len();
    let k = target.arity();
    let row_value = |j: usize, v: usize| (cols[v] >> j & 1) as u64;
    let mut atoms = Vec::new();
    for (ri, rel) in lang.relations().iter().enumerate() {
        let arity = rel.arity();
        for args in (0..arity).map(|_| 0..n).multi_cartesian_product() {
            let sat = (0..rows.len()).all(|j| {
                let t = args.iter().enumerate().fold(0u64, |acc, (p, &v)| acc | row_value(j, v) << p);
                rel.contains(t)
            });
            if sat {
                let c = Constraint::new(ri, args);
                let models = (0..1u64 << n)
                    .filter(|&x| rel.contains(c.tuple_under(x)))
                    .fold(0u128, |acc, x| acc | 1 << x);
                atoms.push(Atom {
                    relation: ri,
                    args: c.args,
                    models,
                });
            }
        }
    }
    let all = (0..1u64 << n).fold(0u128, |acc, x| acc | 1 << x);
    let project = |atoms: &[Atom], skip: Option<usize>| -> BTreeSet<u64> {
        let m = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .fold(all, |acc, (_, a)| acc & a.models);
        let free = (1u64 << k) - 1;
        (0..1u64 << n).filter(|&x| m >> x & 1 == 1).map(|x| x & free).collect()
    };
    if project(&atoms, None) != *target.tuples() {
        return None;
    }
    let mut i = atoms.len();
    while i > 0 {
        i -= 1;
        if project(&atoms, Some(i)) == *target.tuples() {
            atoms.remove(i);
        }
    }
    Some(atoms)
}

/// Definitions over a common source language, keyed by target name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lookup {
    pub language: ConstraintLanguage,
    pub defs: BTreeMap<String, PPDefinition>,
}

impl Lookup {
    pub fn new(language: ConstraintLanguage) -> Self {
        Lookup {
            language,
            defs: BTreeMap::new(),
        }
    }

    /// Adds a definition, re-indexing its body into the lookup's language.
    pub fn insert(&mut self, def: PPDefinition) -> Result<()> {
        let mut body = Vec::with_capacity(def.body.len());
        for c in &def.body {
            let idx = self.language.insert(def.language.get(c.relation).clone())?;
            body.push(Constraint::new(idx, c.args.clone()));
        }
        let name = def.target.name().to_string();
        self.defs.insert(
            name,
            PPDefinition {
                language: self.language.clone(),
                body,
                ..def
            },
        );
        for d in self.defs.values_mut() {
            d.language = self.language.clone();
        }
        Ok(())
    }

    fn entry_for(&self, rel: &Relation) -> Result<&PPDefinition> {
        self.defs
            .get(rel.name())
            .filter(|d| d.target.same_tuples(rel))
            .ok_or_else(|| AbdError::MissingLookup(rel.name().to_string()))
    }
}

/// Text form: source `rel` lines, then one block per definition.
///
/// ```text
/// rel IMP 2 00 01 11
/// def EQ 2 00 11
/// free x y
/// exists
/// con IMP x y
/// con IMP y x
/// end
/// ```
pub fn serialize_lookup(lookup: &Lookup) -> String {
    let mut out = String::new();
    write_relations(&mut out, &lookup.language);
    for def in lookup.defs.values() {
        let t = &def.target;
        let _ = write!(out, "def {} {}", t.name(), t.arity());
        for row in t.sorted_bitstrings() {
            let _ = write!(out, " {row}");
        }
        let names: Vec<&str> = def.free_vars.iter().chain(&def.aux_vars).map(String::as_str).collect();
        let _ = writeln!(out, "\nfree {}", def.free_vars.join(" "));
        if def.aux_vars.is_empty() {
            out.push_str("exists\n");
        } else {
            let _ = writeln!(out, "exists {}", def.aux_vars.join(" "));
        }
        for c in &def.body {
            let args: Vec<&str> = c.args.iter().map(|&v| names[v]).collect();
            let _ = writeln!(out, "con {} {}", lookup.language.get(c.relation).name(), args.join(" "));
        }
        out.push_str("end\n");
    }
    out
}

struct OpenDef {
    target: Relation,
    free: Vec<String>,
    aux: Vec<String>,
    body: Vec<(usize, Vec<String>)>,
}

pub fn parse_lookup(text: &str) -> Result<Lookup> {
    let mut lang = ConstraintLanguage::new();
    let mut closed: Vec<(usize, OpenDef)> = Vec::new();
    let mut open: Option<(usize, OpenDef)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        match (head, open.as_mut()) {
            ("rel", None) => insert_relation(&mut lang, parse_rel(rest, line)?, line)?,
            ("def", None) => {
                let target = parse_rel(rest, line)?;
                open = Some((
                    line,
                    OpenDef {
                        target,
                        free: Vec::new(),
                        aux: Vec::new(),
                        body: Vec::new(),
                    },
                ));
            }
            ("free", Some((_, d))) => d.free = rest.iter().map(|t| identifier(t, line)).collect::<Result<_>>()?,
            ("exists", Some((_, d))) => d.aux = rest.iter().map(|t| identifier(t, line)).collect::<Result<_>>()?,
            ("con", Some((_, d))) => {
                if rest.is_empty() {
                    return Err(syntax(line, "expected `con NAME v1 ... vk`"));
                }
                let args = rest.iter().map(|t| identifier(t, line)).collect::<Result<Vec<_>>>()?;
                d.body.push((line, args));
            }
            ("end", Some(_)) => closed.push(open.take().expect("open definition")),
            (other, _) => return Err(syntax(line, format!("unexpected `{other}`"))),
        }
    }
    if let Some((line, _)) = open {
        return Err(syntax(line, "definition is missing `end`"));
    }
    let mut lookup = Lookup::new(lang.clone());
    for (line, d) in closed {
        if d.free.len() != d.target.arity() {
            return Err(syntax(line, "`free` must list one variable per target position"));
        }
        let names: Vec<&String> = d.free.iter().chain(&d.aux).collect();
        let mut body = Vec::new();
        for (cline, args) in &d.body {
            let nc = crate::format::resolve_con(&lang, args, *cline)?;
            let vars = nc
                .args
                .iter()
                .map(|a| {
                    names
                        .iter()
                        .position(|n| *n == a)
                        .ok_or_else(|| syntax(*cline, format!("variable `{a}` is not declared")))
                })
                .collect::<Result<Vec<_>>>()?;
            body.push(Constraint::new(nc.relation, vars));
        }
        lookup.insert(PPDefinition {
            target: d.target,
            free_vars: d.free,
            aux_vars: d.aux,
            language: lang.clone(),
            body,
        })?;
    }
    Ok(lookup)
}

/// Replaces every constraint by its definition from `lookup`, with fresh
/// auxiliary variables per constraint occurrence. `H`, `M` and `s` are kept.
pub fn rewrite_language(inst: &AbductionInstance, lookup: &Lookup) -> Result<AbductionInstance> {
    let taken: BTreeSet<&str> = inst.vars().iter().map(String::as_str).collect();
    let mut constraints = Vec::new();
    for (ci, c) in inst.kb.constraints.iter().enumerate() {
        let def = lookup.entry_for(inst.relation_of(c))?;
        let mut names: Vec<String> = c.args.iter().map(|&v| inst.var_name(v).to_string()).collect();
        for j in 0..def.aux_vars.len() {
            let mut fresh = format!("_a{ci}_{j}");
            while taken.contains(fresh.as_str()) {
                fresh.push('_');
            }
            names.push(fresh);
        }
        for b in &def.body {
            constraints.push(NamedConstraint {
                relation: b.relation,
                args: b.args.iter().map(|&v| names[v].clone()).collect(),
            });
        }
    }
    let name = |v: &usize| inst.var_name(*v).to_string();
    AbductionInstance::from_named(
        lookup.language.clone(),
        constraints,
        inst.hypotheses.iter().map(name),
        inst.manifestations.iter().map(name),
        inst.size,
    )
}
