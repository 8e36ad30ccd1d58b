//! Polymorphisms, closure properties and the position of a constraint
//! language in Post's lattice of co-clones.

mod coclone;
mod equality;
mod ppdef;

pub use coclone::{identify_coclone, CoClone, CoCloneLabel};
pub(crate) use coclone::identify;
pub use equality::{construct_equality, eliminate_equality_ess_negative, eliminate_equality_ess_positive};
pub use ppdef::{
    parse_lookup, pp_member, rewrite_language, serialize_lookup, Lookup, PPDefinition, DEFAULT_MAX_AUX,
};

use serde::Serialize;

use crate::clause::{prime_implicates, PosClause};
use crate::model::{ConstraintLanguage, Relation};

/// A Boolean function given by its truth table; entry `i` is the value on
/// the input whose bit `j` is argument `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolFunction {
    arity: usize,
    table: Vec<bool>,
}

impl BoolFunction {
    pub fn new(arity: usize, table: Vec<bool>) -> Option<Self> {
        ((1..=6).contains(&arity) && table.len() == 1 << arity).then_some(BoolFunction { arity, table })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> bool) -> Self {
        let table = (0..1usize << arity)
            .map(|i| {
                let args: Vec<bool> = (0..arity).map(|j| i >> j & 1 == 1).collect();
                f(&args)
            })
            .collect();
        BoolFunction { arity, table }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, args: &[bool]) -> bool {
        let idx = args.iter().enumerate().fold(0usize, |acc, (j, &b)| acc | (b as usize) << j);
        self.table[idx]
    }

    /// Applies the function coordinate-wise to `rows`, each of `width` bits.
    pub fn apply(&self, rows: &[u64], width: usize) -> u64 {
        let mut out = 0u64;
        for pos in 0..width {
            let idx = rows
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &r)| acc | ((r >> pos & 1) as usize) << j);
            if self.table[idx] {
                out |= 1 << pos;
            }
        }
        out
    }
}

/// The generating functions used for the closure tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Const0,
    Const1,
    Not,
    And,
    Or,
    Majority,
    Xor3,
    /// `x ∧ (y ∨ z)`
    AndOr,
    /// `x ∨ (y ∧ z)`
    OrAnd,
    /// `x ∧ (y ∨ ¬z)`
    EssNegative,
    /// `x ∨ (y ∧ ¬z)`
    EssPositive,
}

impl Generator {
    pub const ALL: [Generator; 11] = [
        Generator::Const0,
        Generator::Const1,
        Generator::Not,
        Generator::And,
        Generator::Or,
        Generator::Majority,
        Generator::Xor3,
        Generator::AndOr,
        Generator::OrAnd,
        Generator::EssNegative,
        Generator::EssPositive,
    ];

    pub fn arity(self) -> usize {
        match self {
            Generator::Const0 | Generator::Const1 | Generator::Not => 1,
            Generator::And | Generator::Or => 2,
            _ => 3,
        }
    }

    /// Bitwise evaluation on whole tuples.
    #[inline]
    pub fn apply(self, a: &[u64], mask: u64) -> u64 {
        let r = match self {
            Generator::Const0 => 0,
            Generator::Const1 => mask,
            Generator::Not => !a[0],
            Generator::And => a[0] & a[1],
            Generator::Or => a[0] | a[1],
            Generator::Majority => (a[0] & a[1]) | (a[0] & a[2]) | (a[1] & a[2]),
            Generator::Xor3 => a[0] ^ a[1] ^ a[2],
            Generator::AndOr => a[0] & (a[1] | a[2]),
            Generator::OrAnd => a[0] | (a[1] & a[2]),
            Generator::EssNegative => a[0] & (a[1] | !a[2]),
            Generator::EssPositive => a[0] | (a[1] & !a[2]),
        };
        r & mask
    }

    pub fn function(self) -> BoolFunction {
        BoolFunction::from_fn(self.arity(), |b| {
            let words: Vec<u64> = b.iter().map(|&x| x as u64).collect();
            self.apply(&words, 1) == 1
        })
    }
}

/// Whether `f` is a polymorphism of `rel`.
pub fn preserves(f: &BoolFunction, rel: &Relation) -> bool {
    let rows: Vec<u64> = rel.tuples().iter().copied().collect();
    let k = f.arity();
    let n = rows.len();
    if n == 0 {
        return true;
    }
    let mut idx = vec![0usize; k];
    let mut pick = vec![0u64; k];
    loop {
        for (p, &i) in pick.iter_mut().zip(&idx) {
            *p = rows[i];
        }
        if !rel.contains(f.apply(&pick, rel.arity())) {
            return false;
        }
        let mut j = 0;
        while j < k && idx[j] + 1 == n {
            idx[j] = 0;
            j += 1;
        }
        if j == k {
            return true;
        }
        idx[j] += 1;
    }
}

/// Fast path of [`preserves`] for the fixed generators.
pub fn preserves_generator(g: Generator, rel: &Relation) -> bool {
    let rows: Vec<u64> = rel.tuples().iter().copied().collect();
    let mask = rel.full_mask();
    if rows.is_empty() {
        return true;
    }
    match g.arity() {
        1 => rows.iter().all(|&a| rel.contains(g.apply(&[a], mask))),
        2 => rows
            .iter()
            .all(|&a| rows.iter().all(|&b| rel.contains(g.apply(&[a, b], mask)))),
        _ => rows.iter().all(|&a| {
            rows.iter()
                .all(|&b| rows.iter().all(|&c| rel.contains(g.apply(&[a, b, c], mask))))
        }),
    }
}

/// Closure properties of a language, each the conjunction over its relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClosureFlags {
    pub zero_valid: bool,
    pub one_valid: bool,
    pub complementive: bool,
    pub horn: bool,
    pub dual_horn: bool,
    pub bijunctive: bool,
    pub affine: bool,
    /// Preserved by `x ∧ (y ∨ z)`.
    pub and_or: bool,
    /// Preserved by `x ∨ (y ∧ z)`.
    pub or_and: bool,
    pub ess_negative: bool,
    pub ess_positive: bool,
    /// Largest width of a negative prime implicate (at least 2).
    pub neg_width: Option<usize>,
    /// Largest width of a positive prime implicate (at least 2).
    pub pos_width: Option<usize>,
}

impl ClosureFlags {
    pub fn is_schaefer(&self) -> bool {
        self.horn || self.dual_horn || self.bijunctive || self.affine
    }

    /// The flags of the union of two languages.
    pub fn join(&self, other: &ClosureFlags) -> ClosureFlags {
        let width = |a: Option<usize>, b: Option<usize>| Some(a?.max(b?));
        ClosureFlags {
            zero_valid: self.zero_valid && other.zero_valid,
            one_valid: self.one_valid && other.one_valid,
            complementive: self.complementive && other.complementive,
            horn: self.horn && other.horn,
            dual_horn: self.dual_horn && other.dual_horn,
            bijunctive: self.bijunctive && other.bijunctive,
            affine: self.affine && other.affine,
            and_or: self.and_or && other.and_or,
            or_and: self.or_and && other.or_and,
            ess_negative: self.ess_negative && other.ess_negative,
            ess_positive: self.ess_positive && other.ess_positive,
            neg_width: width(self.neg_width, other.neg_width),
            pos_width: width(self.pos_width, other.pos_width),
        }
    }
}

fn widest(lang: &ConstraintLanguage, keep: fn(&PosClause) -> bool) -> Option<usize> {
    let mut w = 2;
    for r in lang.relations() {
        let pis = prime_implicates(r)?;
        w = pis.iter().filter(|c| keep(c)).map(PosClause::width).fold(w, usize::max);
    }
    Some(w)
}

/// Polymorphism-based closure flags of `lang`.
pub fn closure_flags(lang: &ConstraintLanguage) -> ClosureFlags {
    let all = |g: Generator| lang.relations().iter().all(|r| preserves_generator(g, r));
    ClosureFlags {
        zero_valid: all(Generator::Const0),
        one_valid: all(Generator::Const1),
        complementive: all(Generator::Not),
        horn: all(Generator::And),
        dual_horn: all(Generator::Or),
        bijunctive: all(Generator::Majority),
        affine: all(Generator::Xor3),
        and_or: all(Generator::AndOr),
        or_and: all(Generator::OrAnd),
        ess_negative: all(Generator::EssNegative),
        ess_positive: all(Generator::EssPositive),
        neg_width: widest(lang, |c| c.is_negative() && c.width() > 0),
        pos_width: widest(lang, |c| c.is_positive() && c.width() > 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rels;

    fn lang(rs: Vec<Relation>) -> ConstraintLanguage {
        ConstraintLanguage::from_relations(rs).unwrap()
    }

    #[test]
    fn preservation_examples() {
        let and = Generator::And.function();
        let or = Generator::Or.function();
        assert!(!preserves(&and, &rels::or(2)));
        assert!(preserves(&and, &rels::eq()));
        assert!(preserves(&and, &rels::imp()));
        assert!(preserves(&or, &rels::imp()));
    }

    #[test]
    fn generic_and_fast_paths_agree() {
        let sample = [rels::or(2), rels::nand(3), rels::even(3), rels::one_in_three(), rels::horn3(), rels::nae3()];
        for r in &sample {
            for g in Generator::ALL {
                assert_eq!(preserves(&g.function(), r), preserves_generator(g, r), "{g:?} {}", r.name());
            }
        }
    }

    #[test]
    fn nand_flags() {
        let f = closure_flags(&lang(vec![rels::nand(2)]));
        assert!(f.horn && !f.dual_horn && f.ess_negative && !f.one_valid && f.zero_valid);
        assert_eq!(f.neg_width, Some(2));
    }

    #[test]
    fn equality_is_preserved_by_everything() {
        let f = closure_flags(&lang(vec![rels::eq()]));
        assert!(f.zero_valid && f.one_valid && f.complementive && f.horn && f.dual_horn);
        assert!(f.bijunctive && f.affine && f.and_or && f.or_and && f.ess_negative && f.ess_positive);
    }

    #[test]
    fn implication_flags() {
        let f = closure_flags(&lang(vec![rels::imp()]));
        assert!(f.horn && f.dual_horn && f.zero_valid && f.one_valid && !f.complementive);
        assert!(!f.ess_negative && !f.ess_positive);
    }

    #[test]
    fn essential_flags_imply_horn_flags() {
        let sample = [rels::nand(3), rels::or(3), rels::t(), rels::f(), rels::imp(), rels::horn3()];
        for r in sample {
            let f = closure_flags(&lang(vec![r]));
            assert!(!f.ess_negative || f.horn);
            assert!(!f.ess_positive || f.dual_horn);
        }
    }
}
