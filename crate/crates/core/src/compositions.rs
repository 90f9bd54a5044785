//! Compositions, the pull-back coefficients `C_λ`, the derivation operator
//! `D(λ) = λ' + (1, λ)` on formal sums of compositions, and the identity used
//! to close the induction on `C_λ`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{compact_digits, factorial, serialize_integer};
use crate::error::{mismatch, Error, Result};
use crate::partitions;

/// A sequence of positive integers. Ordered lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if let Some(i) = parts.iter().position(|&x| x == 0) {
            return Err(Error::ZeroPart { index: i + 1 });
        }
        Ok(Composition(parts))
    }

    pub fn empty() -> Self {
        Composition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|λ|`
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|λ|_1, ..., |λ|_l`
    pub fn partial_sums(&self) -> Vec<u32> {
        self.0
            .iter()
            .scan(0u32, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    /// The compositions `Λ` with `λ → Λ`: each part bumped by one in turn,
    /// then `(1, λ)`.
    pub fn successors(&self) -> Vec<Composition> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        for j in 0..self.0.len() {
            let mut next = self.0.clone();
            next[j] += 1;
            out.push(Composition(next));
        }
        let mut front = Vec::with_capacity(self.0.len() + 1);
        front.push(1);
        front.extend_from_slice(&self.0);
        out.push(Composition(front));
        out
    }

    /// The compositions `λ` with `λ → Λ`: drop a leading 1, then decrement
    /// each part that is at least 2. Empty for `()`.
    pub fn predecessors(&self) -> Vec<Composition> {
        let mut out = Vec::new();
        if self.0.first() == Some(&1) {
            out.push(Composition(self.0[1..].to_vec()));
        }
        for j in 0..self.0.len() {
            if self.0[j] >= 2 {
                let mut prev = self.0.clone();
                prev[j] -= 1;
                out.push(Composition(prev));
            }
        }
        out
    }

    /// Whether `self → other` in the composition graph.
    pub fn relates_to(&self, other: &Composition) -> bool {
        other.size() == self.size() + 1 && other.predecessors().contains(self)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", compact_digits(&self.0))
    }
}

impl TryFrom<Vec<u32>> for Composition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Composition::new(parts)
    }
}

/// All compositions of `k` in lexicographic order (`2^(k-1)` of them, one
/// for `k = 0`).
pub fn enumerate_compositions(k: u32) -> Vec<Composition> {
    fn rec(buf: &mut Vec<u32>, rest: u32, out: &mut Vec<Composition>) {
        if rest == 0 {
            out.push(Composition(buf.clone()));
            return;
        }
        for first in 1..=rest {
            buf.push(first);
            rec(buf, rest - first, out);
            buf.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), k, &mut out);
    out
}

/// `C_λ = |λ|! / prod_j [(λ_j - 1)! |λ|_j]`. The division is exact.
pub fn coeff_clambda(lambda: &Composition) -> BigUint {
    let num = factorial(lambda.size() as u64);
    let den = lambda
        .parts()
        .iter()
        .zip(lambda.partial_sums())
        .fold(BigUint::one(), |acc, (&part, sum)| {
            acc * factorial(part as u64 - 1) * sum
        });
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "C_λ is not an integer for {lambda}");
    q
}

/// A formal integer combination of compositions with no zero coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompositionSum {
    terms: BTreeMap<Composition, BigInt>,
}

impl Serialize for CompositionSum {
    /// `[{"lambda": [...], "c": n}, ...]` in lexicographic order.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            lambda: &'a Composition,
            #[serde(serialize_with = "serialize_integer")]
            c: &'a BigInt,
        }
        s.collect_seq(self.terms.iter().map(|(lambda, c)| Row { lambda, c }))
    }
}

impl CompositionSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// The sum with the single term `1 · λ`.
    pub fn unit(lambda: Composition) -> Self {
        let mut s = Self::new();
        s.add(lambda, BigInt::one());
        s
    }

    pub fn add(&mut self, lambda: Composition, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(lambda) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn get(&self, lambda: &Composition) -> BigInt {
        self.terms.get(lambda).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Composition, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total(&self) -> BigInt {
        self.terms.values().sum()
    }
}

/// One application of `D`, extended linearly.
pub fn derive_step(s: &CompositionSum) -> CompositionSum {
    let mut out = CompositionSum::new();
    for (lambda, c) in s.iter() {
        for next in lambda.successors() {
            out.add(next, c.clone());
        }
    }
    out
}

/// `D^k(())`, by iteration only.
pub fn derive_iterated(k: u32) -> CompositionSum {
    (0..k).fold(CompositionSum::unit(Composition::empty()), |s, _| {
        derive_step(&s)
    })
}

/// One row of the pull-back table: the coefficient of `λ` three ways.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackRow {
    pub composition: Composition,
    #[serde(serialize_with = "serialize_integer")]
    pub by_derivation: BigUint,
    #[serde(serialize_with = "serialize_integer")]
    pub by_formula: BigUint,
    #[serde(serialize_with = "serialize_integer")]
    pub by_partitions: BigUint,
}

impl PullbackRow {
    pub fn agrees(&self) -> bool {
        self.by_derivation == self.by_formula && self.by_formula == self.by_partitions
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackTable {
    pub k: u32,
    pub rows: Vec<PullbackRow>,
    #[serde(serialize_with = "serialize_integer")]
    pub total: BigUint,
    #[serde(serialize_with = "serialize_integer")]
    pub bell: BigUint,
}

/// The coefficients of `D^k(())` next to the closed formula and the number
/// of set partitions of `[k]` of each shape. Rows are in lexicographic order.
pub fn pullback_table(k: u32) -> PullbackTable {
    let derived = derive_iterated(k);
    let by_shape = partitions::shape_histogram(k);
    let rows: Vec<PullbackRow> = enumerate_compositions(k)
        .into_iter()
        .map(|lambda| {
            let d = derived.get(&lambda);
            PullbackRow {
                by_derivation: d.to_biguint().unwrap_or_default(),
                by_formula: coeff_clambda(&lambda),
                by_partitions: by_shape.get(&lambda).cloned().unwrap_or_default(),
                composition: lambda,
            }
        })
        .collect();
    let total = rows.iter().map(|r| r.by_derivation.clone()).sum();
    PullbackTable {
        k,
        rows,
        total,
        bell: partitions::bell(k as usize),
    }
}

/// `D^k(())`, after checking every coefficient against the closed formula and
/// the partition count by shape, and the total against `Bell(k)`.
pub fn pullback_coefficients(k: u32) -> Result<CompositionSum> {
    let derived = derive_iterated(k);
    let table = pullback_table(k);
    if let Some(bad) = table.rows.iter().find(|r| !r.agrees()) {
        return Err(mismatch(
            "pullback",
            format!(
                "{}: derivation {} formula {} partitions {}",
                bad.composition, bad.by_derivation, bad.by_formula, bad.by_partitions
            ),
        ));
    }
    if derived.len() != table.rows.len() {
        return Err(mismatch(
            "pullback",
            "derivation produced a composition of the wrong size",
        ));
    }
    if table.total != table.bell {
        return Err(mismatch(
            "pullback",
            format!(
                "total {} differs from Bell({k}) = {}",
                table.total, table.bell
            ),
        ));
    }
    Ok(derived)
}

/// Both sides of
/// `sum_s Λ_s = sum_s (Λ_s - 1) prod_{j >= s} S_j / (S_j - 1)`
/// with `S_j` the partial sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyIdentity {
    pub holds: bool,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

/// Evaluates the induction identity in exact rational arithmetic.
///
/// For `s = 1` the factor `(Λ_1 - 1) / (S_1 - 1)` equals 1 since `S_1 = Λ_1`,
/// and it is cancelled before evaluation so that `Λ_1 = 1` is not a pole.
/// For `s >= 2` every `S_j` with `j >= s` is at least 2.
pub fn verify_key_identity(lambda: &Composition) -> Result<KeyIdentity> {
    let sums = lambda.partial_sums();
    let lhs = BigRational::from_integer(BigInt::from(lambda.size()));
    let mut rhs = BigRational::zero();
    for s in 0..lambda.len() {
        let mut term = if s == 0 {
            BigRational::from_integer(BigInt::from(lambda.parts()[0]))
        } else {
            BigRational::from_integer(BigInt::from(lambda.parts()[s]) - 1)
        };
        if term.is_zero() {
            continue;
        }
        let first = if s == 0 { 1 } else { s };
        for (j, &sum) in sums.iter().enumerate().skip(first) {
            let den = BigInt::from(sum) - BigInt::one();
            if !den.is_positive() {
                return Err(Error::DivisionByZero { s: s + 1, j: j + 1 });
            }
            term *= BigRational::new(BigInt::from(sum), den);
        }
        rhs += term;
    }
    Ok(KeyIdentity {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn enumerates_in_lex_order() {
        assert_eq!(
            enumerate_compositions(3),
            vec![c(&[1, 1, 1]), c(&[1, 2]), c(&[2, 1]), c(&[3])]
        );
        assert_eq!(enumerate_compositions(0), vec![c(&[])]);
        assert_eq!(enumerate_compositions(4).len(), 8);
    }

    #[test]
    fn rejects_zero_parts() {
        assert_eq!(
            Composition::new(vec![1, 0]),
            Err(Error::ZeroPart { index: 2 })
        );
    }

    #[test]
    fn clambda_examples() {
        assert_eq!(coeff_clambda(&c(&[1, 2])), BigUint::from(2u32));
        assert_eq!(coeff_clambda(&c(&[1, 1, 2])), BigUint::from(3u32));
        assert_eq!(coeff_clambda(&c(&[2, 2])), BigUint::from(3u32));
        assert_eq!(coeff_clambda(&c(&[1])), BigUint::one());
        assert_eq!(coeff_clambda(&c(&[])), BigUint::one());
    }

    #[test]
    fn derive_step_examples() {
        assert_eq!(
            derive_step(&CompositionSum::unit(c(&[]))),
            CompositionSum::unit(c(&[1]))
        );

        let out = derive_step(&CompositionSum::unit(c(&[1, 1])));
        let got: Vec<_> = out.iter().map(|(l, x)| (l.clone(), x.clone())).collect();
        assert_eq!(
            got,
            vec![
                (c(&[1, 1, 1]), BigInt::one()),
                (c(&[1, 2]), BigInt::one()),
                (c(&[2, 1]), BigInt::one()),
            ]
        );

        let mut three = CompositionSum::new();
        three.add(c(&[2]), BigInt::from(3));
        let out = derive_step(&three);
        assert_eq!(out.get(&c(&[3])), BigInt::from(3));
        assert_eq!(out.get(&c(&[1, 2])), BigInt::from(3));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn sums_drop_cancelled_terms() {
        let mut s = CompositionSum::unit(c(&[2]));
        s.add(c(&[2]), BigInt::from(-1));
        assert!(s.is_empty());
    }

    #[test]
    fn figure_bottom_row() {
        let got: Vec<(Composition, u32)> = pullback_coefficients(4)
            .unwrap()
            .iter()
            .map(|(l, x)| (l.clone(), u32::try_from(x).unwrap()))
            .collect();
        let want = vec![
            (c(&[1, 1, 1, 1]), 1),
            (c(&[1, 1, 2]), 3),
            (c(&[1, 2, 1]), 2),
            (c(&[1, 3]), 3),
            (c(&[2, 1, 1]), 1),
            (c(&[2, 2]), 3),
            (c(&[3, 1]), 1),
            (c(&[4]), 1),
        ];
        assert_eq!(got, want);
        assert_eq!(pullback_table(4).total, BigUint::from(15u32));
        assert_eq!(
            pullback_coefficients(0).unwrap(),
            CompositionSum::unit(c(&[]))
        );
        assert_eq!(pullback_table(6).total, BigUint::from(203u32));
    }

    #[test]
    fn predecessor_examples() {
        assert_eq!(c(&[1, 2]).predecessors(), vec![c(&[2]), c(&[1, 1])]);
        assert_eq!(c(&[4]).predecessors(), vec![c(&[3])]);
        assert_eq!(c(&[1]).predecessors(), vec![c(&[])]);
        assert!(c(&[]).predecessors().is_empty());
    }

    #[test]
    fn key_identity_examples() {
        for (parts, value) in [
            (&[2u32, 1][..], 3),
            (&[3][..], 3),
            (&[1, 1, 1][..], 3),
            (&[1, 2][..], 3),
        ] {
            let r = verify_key_identity(&c(parts)).unwrap();
            assert!(r.holds, "{parts:?}");
            assert_eq!(r.lhs, BigRational::from_integer(BigInt::from(value)));
            assert_eq!(r.rhs, r.lhs);
        }
        let empty = verify_key_identity(&c(&[])).unwrap();
        assert!(empty.holds);
    }
}
