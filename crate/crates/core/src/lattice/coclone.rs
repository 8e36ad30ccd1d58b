use std::fmt;

use serde::Serialize;

use super::{closure_flags, ClosureFlags};
use crate::model::{rels, ConstraintLanguage, Relation};

/// A co-clone of Post's lattice. The `IS` families carry the width bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoClone {
    BR,
    II0,
    II1,
    II,
    IN2,
    IN,
    IE2,
    IE0,
    IE1,
    IE,
    IV2,
    IV0,
    IV1,
    IV,
    ID2,
    ID1,
    ID,
    IL2,
    IL0,
    IL1,
    IL,
    IL3,
    IM2,
    IM0,
    IM1,
    IM,
    IS1(usize),
    IS12(usize),
    IS11(usize),
    IS10(usize),
    IS0(usize),
    IS02(usize),
    IS01(usize),
    IS00(usize),
    IR2,
    IR0,
    IR1,
    IBF,
}

impl CoClone {
    /// Every co-clone, with the `IS` families instantiated at `width`.
    pub fn all(width: usize) -> Vec<CoClone> {
        use CoClone::*;
        vec![
            BR,
            II0,
            II1,
            II,
            IN2,
            IN,
            IE2,
            IE0,
            IE1,
            IE,
            IV2,
            IV0,
            IV1,
            IV,
            ID2,
            ID1,
            ID,
            IL2,
            IL0,
            IL1,
            IL,
            IL3,
            IM2,
            IM0,
            IM1,
            IM,
            IS1(width),
            IS12(width),
            IS11(width),
            IS10(width),
            IS0(width),
            IS02(width),
            IS01(width),
            IS00(width),
            IR2,
            IR0,
            IR1,
            IBF,
        ]
    }

    /// A finite base of the co-clone.
    pub fn base(self) -> Vec<Relation> {
        use CoClone::*;
        let bs = |name: &str, k: usize, rows: &[&str]| Relation::from_bitstrings(name, k, rows).unwrap();
        match self {
            BR => vec![rels::one_in_three()],
            II0 => vec![bs("IIZERO", 3, &["000", "101", "110"])],
            II1 => vec![bs("IIONE", 3, &["010", "100", "111"])],
            II => vec![bs("IIBOTH", 4, &["0000", "1010", "1100", "1111"])],
            IN2 => vec![rels::nae3()],
            IN => vec![bs("INBOTH", 3, &["000", "001", "010", "101", "110", "111"])],
            IE2 => vec![rels::horn3(), rels::t(), rels::f()],
            IE0 => vec![rels::horn3(), rels::f()],
            IE1 => vec![rels::horn3(), rels::t()],
            IE => vec![rels::horn3()],
            IV2 => vec![rels::dual_horn3(), rels::t(), rels::f()],
            IV0 => vec![rels::dual_horn3(), rels::f()],
            IV1 => vec![rels::dual_horn3(), rels::t()],
            IV => vec![rels::dual_horn3()],
            ID2 => vec![rels::or(2), rels::imp(), rels::nand(2)],
            ID1 => vec![rels::neq(), rels::t()],
            ID => vec![rels::neq()],
            IL2 => vec![rels::even(3), rels::t()],
            IL0 => vec![rels::even(3)],
            IL1 => vec![rels::odd(3)],
            IL => vec![rels::even(4)],
            IL3 => vec![rels::even(4), rels::neq()],
            IM2 => vec![rels::imp(), rels::t(), rels::f()],
            IM0 => vec![rels::imp(), rels::f()],
            IM1 => vec![rels::imp(), rels::t()],
            IM => vec![rels::imp()],
            IS1(w) => vec![rels::nand(w)],
            IS12(w) => vec![rels::nand(w), rels::t(), rels::f()],
            IS11(w) => vec![rels::nand(w), rels::imp()],
            IS10(w) => vec![rels::nand(w), rels::imp(), rels::t(), rels::f()],
            IS0(w) => vec![rels::or(w)],
            IS02(w) => vec![rels::or(w), rels::t(), rels::f()],
            IS01(w) => vec![rels::or(w), rels::imp()],
            IS00(w) => vec![rels::or(w), rels::imp(), rels::t(), rels::f()],
            IR2 => vec![rels::t(), rels::f()],
            IR0 => vec![rels::f()],
            IR1 => vec![rels::t()],
            IBF => vec![rels::eq()],
        }
    }

    pub fn width(self) -> Option<usize> {
        use CoClone::*;
        match self {
            IS1(w) | IS12(w) | IS11(w) | IS10(w) | IS0(w) | IS02(w) | IS01(w) | IS00(w) => Some(w),
            _ => None,
        }
    }

    /// Whether `self ⊆ other`, decided by identifying the join of both bases.
    pub fn is_subset_of(self, other: CoClone) -> bool {
        if self == other {
            return true;
        }
        let mut lang = ConstraintLanguage::new();
        for r in self.base().into_iter().chain(other.base()) {
            lang.intern(r).expect("base relations are well formed");
        }
        identify(&closure_flags(&lang)) == Some(other)
    }

    pub fn is_affine_family(self) -> bool {
        use CoClone::*;
        matches!(self, IL2 | IL0 | IL1 | IL | IL3)
    }
}

impl fmt::Display for CoClone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CoClone::*;
        let (name, w) = match *self {
            IS1(w) => ("IS1", w),
            IS12(w) => ("IS12", w),
            IS11(w) => ("IS11", w),
            IS10(w) => ("IS10", w),
            IS0(w) => ("IS0", w),
            IS02(w) => ("IS02", w),
            IS01(w) => ("IS01", w),
            IS00(w) => ("IS00", w),
            other => return write!(f, "{other:?}"),
        };
        write!(f, "{name}({w})")
    }
}

/// The identified co-clone together with the flags it was derived from.
/// `class` is `None` when the language falls outside the decision table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoCloneLabel {
    pub class: Option<CoClone>,
    pub flags: ClosureFlags,
}

impl CoCloneLabel {
    pub fn name(&self) -> String {
        match self.class {
            Some(c) => c.to_string(),
            None => "other".to_string(),
        }
    }
}

impl Serialize for CoCloneLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

/// Places a language in the lattice.
pub fn identify_coclone(lang: &ConstraintLanguage) -> CoCloneLabel {
    let flags = closure_flags(lang);
    CoCloneLabel {
        class: identify(&flags),
        flags,
    }
}

pub(crate) fn identify(f: &ClosureFlags) -> Option<CoClone> {
    use CoClone::*;
    let (z, o) = (f.zero_valid, f.one_valid);
    let by_validity = |both, zero, one, none| match (z, o) {
        (true, true) => both,
        (true, false) => zero,
        (false, true) => one,
        (false, false) => none,
    };
    let class = match (f.horn, f.dual_horn) {
        (true, true) if f.affine => by_validity(IBF, IR0, IR1, IR2),
        (true, true) => by_validity(IM, IM0, IM1, IM2),
        (true, false) if f.and_or => {
            let w = f.neg_width?;
            match (f.ess_negative, z) {
                (true, true) => IS1(w),
                (true, false) => IS12(w),
                (false, true) => IS11(w),
                (false, false) => IS10(w),
            }
        }
        (true, false) => by_validity(IE, IE0, IE1, IE2),
        (false, true) if f.or_and => {
            let w = f.pos_width?;
            match (f.ess_positive, o) {
                (true, true) => IS0(w),
                (true, false) => IS02(w),
                (false, true) => IS01(w),
                (false, false) => IS00(w),
            }
        }
        (false, true) => by_validity(IV, IV0, IV1, IV2),
        (false, false) if f.bijunctive => match (f.affine, f.complementive) {
            (true, true) => ID,
            (true, false) => ID1,
            (false, _) => ID2,
        },
        (false, false) if f.affine => {
            if z && o {
                IL
            } else if z {
                IL0
            } else if o {
                IL1
            } else if f.complementive {
                IL3
            } else {
                IL2
            }
        }
        (false, false) => match (z, o, f.complementive) {
            (true, true, true) => IN,
            (_, _, true) => IN2,
            (true, true, false) => II,
            (true, false, false) => II0,
            (false, true, false) => II1,
            (false, false, false) => BR,
        },
    };
    Some(class)
}
