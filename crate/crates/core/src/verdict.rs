//! Parameterised complexity of abduction by co-clone, variant and parameter.
//!
//! The table is a list of rows checked in order; the first row whose region
//! contains the language decides. Regions are windows `A ⊆ ⟨S⟩ ⊆ B` of the
//! lattice.

use std::fmt;

use serde::Serialize;

use crate::error::{AbdError, Result};
use crate::lattice::{closure_flags, identify, identify_coclone, CoClone, CoCloneLabel, ClosureFlags};
use crate::model::{ConstraintLanguage, Param, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerdictLabel {
    Fpt,
    W1Complete,
    W1Hard,
    W2Complete,
    W2Hard,
    WPComplete,
    ParaNpComplete,
    ParaCoNpHard,
    ParaDpHard,
    ParaSigma2pHard,
    Unclassified,
}

impl VerdictLabel {
    pub fn as_str(self) -> &'static str {
        use VerdictLabel::*;
        match self {
            Fpt => "FPT",
            W1Complete => "W1_complete",
            W1Hard => "W1_hard",
            W2Complete => "W2_complete",
            W2Hard => "W2_hard",
            WPComplete => "WP_complete",
            ParaNpComplete => "paraNP_complete",
            ParaCoNpHard => "paraCoNP_hard",
            ParaDpHard => "paraDP_hard",
            ParaSigma2pHard => "paraSigma2P_hard",
            Unclassified => "unclassified",
        }
    }

    /// A coarse hardness rank; `None` for unclassified.
    pub fn rank(self) -> Option<u8> {
        use VerdictLabel::*;
        Some(match self {
            Fpt => 0,
            W1Complete | W1Hard => 1,
            W2Complete | W2Hard => 2,
            WPComplete => 3,
            ParaNpComplete => 4,
            ParaCoNpHard => 5,
            ParaDpHard => 6,
            ParaSigma2pHard => 7,
            Unclassified => return None,
        })
    }
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for VerdictLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub label: VerdictLabel,
    /// The classification result the row is taken from.
    pub source: &'static str,
}

/// What the rows may ask about a language.
struct Ctx {
    class: Option<CoClone>,
    flags: ClosureFlags,
}

impl Ctx {
    /// `lower ⊆ ⟨S⟩`: adding a base of `lower` does not move the language.
    fn sup(&self, lower: CoClone) -> bool {
        let Some(c) = self.class else { return false };
        let base = ConstraintLanguage::from_relations(lower.base()).expect("bases are well formed");
        identify(&self.flags.join(&closure_flags(&base))) == Some(c)
    }

    fn hard_dp(&self) -> bool {
        self.sup(CoClone::IN2) || self.sup(CoClone::II0)
    }

    fn co_np(&self) -> bool {
        self.sup(CoClone::IN) && self.flags.one_valid
    }

    fn in_ie2(&self) -> bool {
        self.flags.horn
    }

    fn in_iv2(&self) -> bool {
        self.flags.dual_horn
    }

    fn in_id2(&self) -> bool {
        self.flags.bijunctive
    }

    fn in_id1(&self) -> bool {
        self.flags.bijunctive && self.flags.affine
    }

    fn in_ie1(&self) -> bool {
        self.flags.horn && self.flags.one_valid
    }

    fn in_is12(&self) -> bool {
        self.flags.ess_negative
    }

    fn in_is02(&self) -> bool {
        self.flags.ess_positive
    }

    fn in_is10(&self) -> bool {
        self.flags.and_or
    }
}

use Variant::{AtMost as Le, Exact as Eq, Plain};
use VerdictLabel::*;

struct Row {
    param: Param,
    variants: &'static [Variant],
    region: fn(&Ctx) -> bool,
    label: VerdictLabel,
    source: &'static str,
}

const ALL: &[Variant] = &[Plain, Le, Eq];
const BOUNDED: &[Variant] = &[Le, Eq];

macro_rules! row {
    ($p:ident, $v:expr, $r:expr, $l:ident, $s:expr) => {
        Row { param: Param::$p, variants: $v, region: $r, label: $l, source: $s }
    };
}

const TABLE: &[Row] = &[
    row!(V, ALL, |_| true, Fpt, "|V|: brute force over all assignments, every language"),
    // |H|
    row!(H, ALL, Ctx::hard_dp, ParaDpHard, "|H|: IN2 ⊆ ⟨S⟩ or II0 ⊆ ⟨S⟩"),
    row!(H, ALL, |c| c.sup(CoClone::IN), ParaCoNpHard, "|H|: IN ⊆ ⟨S⟩ ⊆ BR"),
    row!(H, ALL, |c| c.in_ie2() || c.in_iv2() || c.in_id2() || c.flags.affine, Fpt,
        "|H|: candidate enumeration for ⟨S⟩ ⊆ IE2, IV2, ID2 or IL2"),
    // |E|
    row!(E, BOUNDED, Ctx::hard_dp, ParaDpHard, "|E|: IN2 ⊆ ⟨S⟩ or II0 ⊆ ⟨S⟩"),
    row!(E, BOUNDED, Ctx::co_np, ParaCoNpHard, "|E|: IN ⊆ ⟨S⟩ ⊆ II1"),
    row!(E, BOUNDED, |c| c.sup(CoClone::IE) && c.in_ie2(), WPComplete, "|E|: IE ⊆ ⟨S⟩ ⊆ IE2"),
    row!(E, BOUNDED, |c| c.sup(CoClone::IM) && (c.in_id2() || c.in_iv2()), W2Complete,
        "|E|: IM ⊆ ⟨S⟩ ⊆ ID2 or IV2"),
    row!(E, &[Eq], |c| c.sup(CoClone::IM) && c.in_is10(), W2Complete, "|E|, exact: IM ⊆ ⟨S⟩ ⊆ IS10"),
    row!(E, &[Le], |c| c.sup(CoClone::IM) && c.in_is10(), W2Hard,
        "|E|, at most: IM ⊆ ⟨S⟩ ⊆ IS10 (membership open)"),
    row!(E, BOUNDED, |c| c.in_id1() || c.in_is02(), Fpt, "|E|: ⟨S⟩ ⊆ ID1 or ⟨S⟩ ⊆ IS02"),
    row!(E, &[Le], |c| c.in_is12(), Fpt, "|E|, at most: ⟨S⟩ ⊆ IS12"),
    row!(E, &[Eq], |c| c.sup(CoClone::IS1(2)) && c.in_is12(), W1Complete, "|E|, exact: IS1(2) ⊆ ⟨S⟩ ⊆ IS12"),
    // |M|, unbounded
    row!(M, &[Plain], Ctx::hard_dp, ParaSigma2pHard, "|M|: IN2 ⊆ ⟨S⟩ or II0 ⊆ ⟨S⟩"),
    row!(M, &[Plain], Ctx::co_np, ParaCoNpHard, "|M|: IN ⊆ ⟨S⟩ ⊆ II1"),
    row!(M, &[Plain], |c| c.class == Some(CoClone::IE2), ParaNpComplete, "|M|, unbounded: ⟨S⟩ = IE2"),
    row!(M, &[Plain], |c| c.sup(CoClone::IS11(2)) && c.in_id2(), W1Complete,
        "|M|, unbounded: IS11(2) ⊆ ⟨S⟩ ⊆ ID2"),
    row!(M, &[Plain], |c| c.sup(CoClone::IS11(3)), W1Hard, "|M|, unbounded: IS11(3) ⊆ ⟨S⟩"),
    row!(M, &[Plain], |c| c.in_id1() || c.in_is12() || c.in_ie1() || c.in_iv2(), Fpt,
        "|M|, unbounded: ⟨S⟩ ⊆ ID1, IS12, IE1 or IV2"),
    // |M|, at most
    row!(M, &[Le], Ctx::hard_dp, ParaSigma2pHard, "|M|: IN2 ⊆ ⟨S⟩ or II0 ⊆ ⟨S⟩"),
    row!(M, &[Le], Ctx::co_np, ParaCoNpHard, "|M|: IN ⊆ ⟨S⟩ ⊆ II1"),
    row!(M, &[Le], |c| c.sup(CoClone::IE) && c.in_ie2(), ParaNpComplete,
        "|M|, at most: IE ⊆ ⟨S⟩ ⊆ IE2 (vertex cover)"),
    row!(M, &[Le], |c| c.sup(CoClone::IS11(2)) && c.in_id2(), W1Complete, "|M|, at most: IS11(2) ⊆ ⟨S⟩ ⊆ ID2"),
    row!(M, &[Le], |c| c.sup(CoClone::IS11(3)), W1Hard, "|M|, at most: IS11(3) ⊆ ⟨S⟩"),
    row!(M, &[Le], |c| c.in_id1() || c.in_is12() || c.in_iv2(), Fpt, "|M|, at most: ⟨S⟩ ⊆ ID1, IS12 or IV2"),
    // |M|, exact
    row!(M, &[Eq], Ctx::hard_dp, ParaSigma2pHard, "|M|: IN2 ⊆ ⟨S⟩ or II0 ⊆ ⟨S⟩"),
    row!(M, &[Eq], Ctx::co_np, ParaCoNpHard, "|M|: IN ⊆ ⟨S⟩ ⊆ II1"),
    row!(M, &[Eq], |c| c.sup(CoClone::IS1(2)) && (c.in_ie2() || c.in_id2()), ParaNpComplete,
        "|M|, exact: IS1(2) ⊆ ⟨S⟩ ⊆ IE2 or ID2"),
    row!(M, &[Eq], |c| c.sup(CoClone::IE) && c.in_ie2(), ParaNpComplete, "|M|, exact: IE ⊆ ⟨S⟩ ⊆ IE2"),
    row!(M, &[Eq], |c| c.in_id1() || c.in_iv2(), Fpt, "|M|, exact: ⟨S⟩ ⊆ ID1 or IV2"),
];

const UNCLASSIFIED: Verdict = Verdict {
    label: Unclassified,
    source: "no classification result covers this region",
};

/// The verdict for an already identified language.
pub fn classify_label(label: &CoCloneLabel, variant: Variant, param: Param) -> Result<Verdict> {
    if variant == Plain && param == Param::E {
        return Err(AbdError::NotMeaningful);
    }
    let ctx = Ctx { class: label.class, flags: label.flags };
    Ok(TABLE
        .iter()
        .find(|r| r.param == param && r.variants.contains(&variant) && (r.region)(&ctx))
        .map_or(UNCLASSIFIED, |r| Verdict { label: r.label, source: r.source }))
}

pub fn classify(lang: &ConstraintLanguage, variant: Variant, param: Param) -> Result<Verdict> {
    classify_label(&identify_coclone(lang), variant, param)
}

/// The number of rows in the table.
pub fn table_len() -> usize {
    TABLE.len()
}
