//! Domain types: relations, constraint languages, knowledge bases and
//! abduction instances.
//!
//! Tuples are stored as bit masks: position `i` of a tuple is bit `i` of
//! the mask. Variables are indices into the instance's variable table,
//! which is kept sorted by name so index order is lexicographic order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{AbdError, Result};

/// Largest supported relation arity.
pub const MAX_ARITY: usize = 24;

pub type Var = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    name: String,
    arity: usize,
    tuples: BTreeSet<u64>,
}

impl Relation {
    pub fn new(name: impl Into<String>, arity: usize, tuples: impl IntoIterator<Item = u64>) -> Result<Self> {
        let name = name.into();
        if arity == 0 || arity > MAX_ARITY {
            return Err(AbdError::InvalidRelation {
                name,
                reason: format!("arity must be between 1 and {MAX_ARITY}"),
            });
        }
        let limit = 1u64 << arity;
        let tuples: BTreeSet<u64> = tuples.into_iter().collect();
        if let Some(bad) = tuples.iter().find(|&&t| t >= limit) {
            return Err(AbdError::InvalidRelation {
                name,
                reason: format!("tuple mask {bad} exceeds arity {arity}"),
            });
        }
        Ok(Relation { name, arity, tuples })
    }

    /// Builds a relation from bitstrings such as `"01"`; character `i` is position `i`.
    pub fn from_bitstrings(name: impl Into<String>, arity: usize, rows: &[&str]) -> Result<Self> {
        let name = name.into();
        let mut tuples = Vec::with_capacity(rows.len());
        for row in rows {
            tuples.push(parse_bitstring(row, arity).ok_or_else(|| AbdError::InvalidRelation {
                name: name.clone(),
                reason: format!("bad tuple `{row}`"),
            })?);
        }
        Relation::new(name, arity, tuples)
    }

    /// All tuples of the given arity satisfying `pred`.
    pub fn from_predicate(name: impl Into<String>, arity: usize, pred: impl Fn(&[bool]) -> bool) -> Self {
        let mut bits = vec![false; arity];
        let tuples = (0..1u64 << arity).filter(|&t| {
            for (i, b) in bits.iter_mut().enumerate() {
                *b = t >> i & 1 == 1;
            }
            pred(&bits)
        });
        let tuples: Vec<u64> = tuples.collect();
        Relation::new(name, arity, tuples).expect("valid arity")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<u64> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: u64) -> bool {
        self.tuples.contains(&tuple)
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.arity) - 1
    }

    /// Same tuple set under a different name.
    pub fn renamed(&self, name: impl Into<String>) -> Relation {
        Relation {
            name: name.into(),
            arity: self.arity,
            tuples: self.tuples.clone(),
        }
    }

    pub fn same_tuples(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples == other.tuples
    }

    /// The relation whose tuples are the bitwise complements of this one's.
    pub fn complemented(&self) -> Relation {
        let mask = self.full_mask();
        Relation {
            name: format!("{}_c", self.name),
            arity: self.arity,
            tuples: self.tuples.iter().map(|t| t ^ mask).collect(),
        }
    }

    pub fn is_equality(&self) -> bool {
        self.arity == 2 && self.tuples.len() == 2 && self.contains(0b00) && self.contains(0b11)
    }

    pub fn tuple_string(&self, tuple: u64) -> String {
        bitstring(tuple, self.arity)
    }

    /// Tuples as bitstrings in lexicographic order.
    pub fn sorted_bitstrings(&self) -> Vec<String> {
        let mut rows: Vec<String> = self.tuples.iter().map(|&t| self.tuple_string(t)).collect();
        rows.sort();
        rows
    }
}

pub fn bitstring(tuple: u64, arity: usize) -> String {
    (0..arity).map(|i| if tuple >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str, arity: usize) -> Option<u64> {
    if s.len() != arity {
        return None;
    }
    let mut t = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => t |= 1 << i,
            _ => return None,
        }
    }
    Some(t)
}

/// Frequently used relations.
pub mod rels {
    use super::Relation;

    pub fn eq() -> Relation {
        Relation::from_bitstrings("EQ", 2, &["00", "11"]).unwrap()
    }
    pub fn neq() -> Relation {
        Relation::from_bitstrings("NEQ", 2, &["01", "10"]).unwrap()
    }
    /// `x -> y`.
    pub fn imp() -> Relation {
        Relation::from_bitstrings("IMP", 2, &["00", "01", "11"]).unwrap()
    }
    pub fn t() -> Relation {
        Relation::from_bitstrings("T", 1, &["1"]).unwrap()
    }
    pub fn f() -> Relation {
        Relation::from_bitstrings("F", 1, &["0"]).unwrap()
    }
    /// Positive clause of width `k`.
    pub fn or(k: usize) -> Relation {
        Relation::from_predicate(format!("OR{k}"), k, |b| b.iter().any(|&x| x))
    }
    /// Negative clause of width `k`.
    pub fn nand(k: usize) -> Relation {
        Relation::from_predicate(format!("NAND{k}"), k, |b| b.iter().any(|&x| !x))
    }
    /// `x1 ^ ... ^ xk = 0`.
    pub fn even(k: usize) -> Relation {
        Relation::from_predicate(format!("EVEN{k}"), k, |b| b.iter().filter(|&&x| x).count() % 2 == 0)
    }
    /// `x1 ^ ... ^ xk = 1`.
    pub fn odd(k: usize) -> Relation {
        Relation::from_predicate(format!("ODD{k}"), k, |b| b.iter().filter(|&&x| x).count() % 2 == 1)
    }
    /// `(x & y) -> z`.
    pub fn horn3() -> Relation {
        Relation::from_predicate("AND2IMP", 3, |b| !(b[0] && b[1]) || b[2])
    }
    /// `x -> (y | z)`.
    pub fn dual_horn3() -> Relation {
        Relation::from_predicate("IMPOR2", 3, |b| !b[0] || b[1] || b[2])
    }
    /// Exactly one of three.
    pub fn one_in_three() -> Relation {
        Relation::from_bitstrings("ONEIN3", 3, &["100", "010", "001"]).unwrap()
    }
    /// Not-all-equal on three positions.
    pub fn nae3() -> Relation {
        Relation::from_predicate("NAE3", 3, |b| !(b[0] == b[1] && b[1] == b[2]))
    }
}

/// A finite set of relations with unique names, in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintLanguage {
    relations: Vec<Relation>,
}

impl ConstraintLanguage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_relations(relations: impl IntoIterator<Item = Relation>) -> Result<Self> {
        let mut lang = Self::new();
        for r in relations {
            lang.insert(r)?;
        }
        Ok(lang)
    }

    /// Adds a relation and returns its index. Re-adding an identical
    /// relation returns the existing index.
    pub fn insert(&mut self, relation: Relation) -> Result<usize> {
        if let Some(i) = self.index_of(relation.name()) {
            if self.relations[i].same_tuples(&relation) {
                return Ok(i);
            }
            return Err(AbdError::DuplicateRelation(relation.name().to_string()));
        }
        self.relations.push(relation);
        Ok(self.relations.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name() == name)
    }

    pub fn get(&self, index: usize) -> &Relation {
        &self.relations[index]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(Relation::arity).max().unwrap_or(0)
    }

    /// Index of a relation with the same tuples, inserting it under `name`
    /// if none exists.
    pub fn intern(&mut self, relation: Relation) -> Result<usize> {
        if let Some(i) = self.relations.iter().position(|r| r.same_tuples(&relation)) {
            return Ok(i);
        }
        let mut name = relation.name().to_string();
        while self.index_of(&name).is_some() {
            name.push('_');
        }
        self.insert(relation.renamed(name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub relation: usize,
    pub args: Vec<Var>,
}

impl Constraint {
    pub fn new(relation: usize, args: Vec<Var>) -> Self {
        Constraint { relation, args }
    }

    /// Tuple mask selected by a full assignment given as a variable mask.
    #[inline]
    pub fn tuple_under(&self, assignment: u64) -> u64 {
        self.args
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | ((assignment >> v) & 1) << i)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub constraints: Vec<Constraint>,
}

impl KnowledgeBase {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        KnowledgeBase { constraints }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.constraints.iter().flat_map(|c| c.args.iter().copied()).collect()
    }
}

/// Problem variant: no size bound, `|E| <= s`, or `|E| = s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    Plain,
    AtMost,
    Exact,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::AtMost => "le",
            Variant::Exact => "eq",
        }
    }

    pub fn admits(self, size: usize, bound: Option<usize>) -> bool {
        match (self, bound) {
            (Variant::Plain, _) => true,
            (Variant::AtMost, Some(s)) => size <= s,
            (Variant::Exact, Some(s)) => size == s,
            (_, None) => false,
        }
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" => Ok(Variant::Plain),
            "le" => Ok(Variant::AtMost),
            "eq" => Ok(Variant::Exact),
            other => Err(format!("unknown variant `{other}` (expected plain, le or eq)")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameterisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Param {
    H,
    M,
    V,
    E,
}

impl FromStr for Param {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "H" | "h" => Ok(Param::H),
            "M" | "m" => Ok(Param::M),
            "V" | "v" => Ok(Param::V),
            "E" | "e" => Ok(Param::E),
            other => Err(format!("unknown parameter `{other}` (expected H, M, V or E)")),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Param::H => "H",
            Param::M => "M",
            Param::V => "V",
            Param::E => "E",
        };
        f.write_str(s)
    }
}

/// A total assignment over `0..len` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        Assignment {
            values: (0..len).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values.get(v).copied()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }

    pub fn true_vars(&self) -> BTreeSet<Var> {
        self.values.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

/// A candidate or verified explanation `E ⊆ H`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Explanation(pub BTreeSet<Var>);

impl Explanation {
    pub fn new(vars: impl IntoIterator<Item = Var>) -> Self {
        Explanation(vars.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> &BTreeSet<Var> {
        &self.0
    }

    pub fn names(&self, inst: &AbductionInstance) -> Vec<String> {
        self.0.iter().map(|&v| inst.var_name(v).to_string()).collect()
    }
}

/// `⟨V, H, M, KB, s⟩` over a constraint language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbductionInstance {
    pub language: ConstraintLanguage,
    pub kb: KnowledgeBase,
    vars: Vec<String>,
    pub hypotheses: BTreeSet<Var>,
    pub manifestations: BTreeSet<Var>,
    pub size: Option<usize>,
}

/// A constraint with named arguments, as used when assembling instances.
#[derive(Clone, Debug)]
pub struct NamedConstraint {
    pub relation: usize,
    pub args: Vec<String>,
}

impl AbductionInstance {
    /// Assembles an instance; `V` is computed as the union of the KB,
    /// hypothesis and manifestation variables.
    pub fn from_named(
        language: ConstraintLanguage,
        constraints: Vec<NamedConstraint>,
        hypotheses: impl IntoIterator<Item = String>,
        manifestations: impl IntoIterator<Item = String>,
        size: Option<usize>,
    ) -> Result<Self> {
        let hypotheses: BTreeSet<String> = hypotheses.into_iter().collect();
        let manifestations: BTreeSet<String> = manifestations.into_iter().collect();
        let mut names: BTreeSet<&str> = BTreeSet::new();
        for c in &constraints {
            if c.relation >= language.len() {
                return Err(AbdError::Internal(format!("relation index {} out of range", c.relation)));
            }
            let rel = language.get(c.relation);
            if rel.arity() != c.args.len() {
                return Err(AbdError::ArityMismatch {
                    line: 0,
                    relation: rel.name().to_string(),
                    arity: rel.arity(),
                    given: c.args.len(),
                });
            }
            names.extend(c.args.iter().map(String::as_str));
        }
        names.extend(hypotheses.iter().map(String::as_str));
        names.extend(manifestations.iter().map(String::as_str));
        let vars: Vec<String> = names.into_iter().map(str::to_string).collect();
        let index: BTreeMap<&str, Var> = vars.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let kb = KnowledgeBase::new(
            constraints
                .iter()
                .map(|c| Constraint::new(c.relation, c.args.iter().map(|a| index[a.as_str()]).collect()))
                .collect(),
        );
        let hypotheses = hypotheses.iter().map(|h| index[h.as_str()]).collect();
        let manifestations = manifestations.iter().map(|m| index[m.as_str()]).collect();
        Ok(AbductionInstance {
            language,
            kb,
            vars,
            hypotheses,
            manifestations,
            size,
        })
    }

    /// Rebuilds an instance from index-based parts of another one. Variables
    /// that no longer occur anywhere are dropped.
    pub fn rebuild(
        &self,
        language: ConstraintLanguage,
        constraints: Vec<Constraint>,
        hypotheses: &BTreeSet<Var>,
        manifestations: &BTreeSet<Var>,
        size: Option<usize>,
    ) -> Result<Self> {
        let named = constraints
            .into_iter()
            .map(|c| NamedConstraint {
                relation: c.relation,
                args: c.args.iter().map(|&v| self.vars[v].clone()).collect(),
            })
            .collect();
        AbductionInstance::from_named(
            language,
            named,
            hypotheses.iter().map(|&v| self.vars[v].clone()),
            manifestations.iter().map(|&v| self.vars[v].clone()),
            size,
        )
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.vars[v]
    }

    pub fn var_index(&self, name: &str) -> Option<Var> {
        self.vars.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn with_size(&self, size: Option<usize>) -> Self {
        let mut inst = self.clone();
        inst.size = size;
        inst
    }

    pub fn relation_of(&self, c: &Constraint) -> &Relation {
        self.language.get(c.relation)
    }

    /// Maps explanation names back to indices.
    pub fn explanation_from_names<S: AsRef<str>>(&self, names: &[S]) -> Option<Explanation> {
        names
            .iter()
            .map(|n| self.var_index(n.as_ref()))
            .collect::<Option<BTreeSet<_>>>()
            .map(Explanation)
    }

    /// The size bound required by `variant`, if any.
    pub fn bound_for(&self, variant: Variant) -> Result<Option<usize>> {
        match variant {
            Variant::Plain => Ok(None),
            Variant::AtMost => self.size.map(Some).ok_or(AbdError::MissingSize("le")),
            Variant::Exact => self.size.map(Some).ok_or(AbdError::MissingSize("eq")),
        }
    }
}

/// Incremental construction of instances by name.
#[derive(Default)]
pub struct InstanceBuilder {
    language: ConstraintLanguage,
    constraints: Vec<NamedConstraint>,
    hypotheses: Vec<String>,
    manifestations: Vec<String>,
    size: Option<usize>,
    error: Option<AbdError>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn relation(mut self, relation: Relation) -> Self {
        if let Err(e) = self.language.insert(relation) {
            self.error.get_or_insert(e);
        }
        self
    }

    pub fn constraint(mut self, relation: &str, args: &[&str]) -> Self {
        match self.language.index_of(relation) {
            Some(i) => self.constraints.push(NamedConstraint {
                relation: i,
                args: args.iter().map(|a| a.to_string()).collect(),
            }),
            None => {
                self.error.get_or_insert(AbdError::UnknownRelation {
                    line: 0,
                    relation: relation.to_string(),
                });
            }
        }
        self
    }

    pub fn hypotheses(mut self, names: &[&str]) -> Self {
        self.hypotheses.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn manifestations(mut self, names: &[&str]) -> Self {
        self.manifestations.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn size(mut self, s: usize) -> Self {
        self.size = Some(s);
        self
    }

    pub fn build(self) -> Result<AbductionInstance> {
        if let Some(e) = self.error {
            return Err(e);
        }
        AbductionInstance::from_named(
            self.language,
            self.constraints,
            self.hypotheses,
            self.manifestations,
            self.size,
        )
    }
}
