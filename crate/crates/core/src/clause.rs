//! Clause-level descriptions of single relations: prime implicates and
//! affine equation systems. Positions are bit indices into tuple masks.

use crate::model::Relation;

/// Largest arity for which prime implicates are computed.
pub const MAX_IMPLICATE_ARITY: usize = 12;

/// A clause over relation positions: `∨_{i∈pos} x_i ∨ ∨_{j∈neg} ¬x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosClause {
    pub pos: u64,
    pub neg: u64,
}

impl PosClause {
    pub fn width(&self) -> usize {
        (self.pos.count_ones() + self.neg.count_ones()) as usize
    }

    pub fn is_negative(&self) -> bool {
        self.pos == 0
    }

    pub fn is_positive(&self) -> bool {
        self.neg == 0
    }

    pub fn satisfied_by(&self, tuple: u64) -> bool {
        tuple & self.pos != 0 || !tuple & self.neg != 0
    }
}

fn is_implicate(rel: &Relation, c: PosClause) -> bool {
    rel.tuples().iter().all(|&t| c.satisfied_by(t))
}

/// All prime implicates of `rel`, or `None` when the arity is too large.
/// The empty relation has the empty clause as its only prime implicate.
pub fn prime_implicates(rel: &Relation) -> Option<Vec<PosClause>> {
    let k = rel.arity();
    if k > MAX_IMPLICATE_ARITY {
        return None;
    }
    let mut out = Vec::new();
    let mut digits = vec![0u8; k];
    loop {
        let mut c = PosClause { pos: 0, neg: 0 };
        for (i, &d) in digits.iter().enumerate() {
            match d {
                1 => c.pos |= 1 << i,
                2 => c.neg |= 1 << i,
                _ => {}
            }
        }
        if is_implicate(rel, c) && is_prime(rel, c) {
            out.push(c);
        }
        let mut i = 0;
        while i < k && digits[i] == 2 {
            digits[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        digits[i] += 1;
    }
    out.sort_by_key(|c| (c.width(), *c));
    Some(out)
}

fn is_prime(rel: &Relation, c: PosClause) -> bool {
    let lits = c.pos | c.neg;
    (0..64).filter(|i| lits >> i & 1 == 1).all(|i| {
        let sub = PosClause {
            pos: c.pos & !(1 << i),
            neg: c.neg & !(1 << i),
        };
        !is_implicate(rel, sub)
    })
}

/// An affine equation `⊕_{i∈vars} x_i = rhs` over positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosEquation {
    pub vars: u64,
    pub rhs: bool,
}

/// A basis of equations whose solution set is exactly `rel`, or `None` if
/// `rel` is not affine.
pub fn affine_equations(rel: &Relation) -> Option<Vec<PosEquation>> {
    let k = rel.arity();
    let Some(&t0) = rel.tuples().iter().next() else {
        return Some(vec![PosEquation { vars: 0, rhs: true }]);
    };
    // Row-reduced basis of the difference space W = span{t ⊕ t0}.
    let mut basis: Vec<u64> = Vec::new();
    for &t in rel.tuples() {
        let mut d = t ^ t0;
        for &b in &basis {
            d = d.min(d ^ b);
        }
        if d != 0 {
            basis.push(d);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    if (rel.len() as u128) != 1u128 << basis.len() {
        return None;
    }
    // Equations: the orthogonal complement of W, found by brute elimination
    // over the unit vectors.
    let mut eqs: Vec<u64> = Vec::new();
    let mut reduced: Vec<u64> = Vec::new();
    for a in orthogonal_complement(&basis, k) {
        let mut r = a;
        for &b in &reduced {
            r = r.min(r ^ b);
        }
        if r != 0 {
            reduced.push(r);
            reduced.sort_unstable_by(|x, y| y.cmp(x));
            eqs.push(a);
        }
    }
    Some(
        eqs.into_iter()
            .map(|a| PosEquation {
                vars: a,
                rhs: (a & t0).count_ones() % 2 == 1,
            })
            .collect(),
    )
}

/// A spanning set of `{a : a·w = 0 for all w in basis}` over `k` positions.
fn orthogonal_complement(basis: &[u64], k: usize) -> Vec<u64> {
    // Gaussian elimination on the basis to reduced row echelon form.
    let mut rows: Vec<u64> = basis.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..k {
        if let Some(p) = (r..rows.len()).find(|&i| rows[i] >> col & 1 == 1) {
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r && rows[i] >> col & 1 == 1 {
                    rows[i] ^= rows[r];
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    // Each free column f yields a vector with a_f = 1 and a_p = row_p[f].
    (0..k)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut a = 1u64 << f;
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i] >> f & 1 == 1 {
                    a |= 1 << p;
                }
            }
            a
        })
        .collect()
}
