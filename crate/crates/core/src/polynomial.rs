//! Sparse integer polynomials in `B, X_1, ..., X_k`, and the two
//! computations of `Σ_k`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::arith::{json_integer, serialize_integer};
use crate::dyck::{coeff_cp, enumerate_dyck};
use crate::forests::{forest_count, forest_from_index, labels_with_root, monomial};

/// `coeff · B^bdeg · X^expo`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub bdeg: u32,
    pub expo: Vec<u32>,
    pub coeff: BigInt,
}

impl Term {
    pub fn new(bdeg: u32, expo: Vec<u32>, coeff: impl Into<BigInt>) -> Self {
        Term {
            bdeg,
            expo,
            coeff: coeff.into(),
        }
    }

    fn write_monomial(f: &mut fmt::Formatter<'_>, bdeg: u32, expo: &[u32]) -> fmt::Result {
        let mut parts = Vec::new();
        match bdeg {
            0 => {}
            1 => parts.push("B".to_string()),
            d => parts.push(format!("B^{d}")),
        }
        if !expo.is_empty() {
            let e: Vec<String> = expo.iter().map(u32::to_string).collect();
            parts.push(format!("X^({})", e.join(",")));
        }
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for Term {
    /// `{"b": bdeg, "p": [...], "c": coeff}` with `c` an exact JSON integer.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Term", 3)?;
        st.serialize_field("b", &self.bdeg)?;
        st.serialize_field("p", &self.expo)?;
        st.serialize_field("c", &json_integer(&self.coeff))?;
        st.end()
    }
}

/// A polynomial with no zero coefficients, keyed by `(bdeg, expo)` in
/// ascending order (exponents compared lexicographically).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiPolynomial {
    terms: BTreeMap<(u32, Vec<u32>), BigInt>,
}

impl MultiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut p = Self::zero();
        p.add_term(0, Vec::new(), BigInt::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut p = Self::zero();
        for t in terms {
            p.add_term(t.bdeg, t.expo, t.coeff);
        }
        p
    }

    pub fn add_term(&mut self, bdeg: u32, expo: Vec<u32>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry((bdeg, expo)) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `other` into `self`.
    pub fn merge(mut self, other: MultiPolynomial) -> MultiPolynomial {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (std::mem::take(&mut self), other)
        } else {
            (other, std::mem::take(&mut self))
        };
        for ((b, e), c) in small.terms {
            big.add_term(b, e, c);
        }
        big
    }

    /// The product with a single term; exponent vectors of different length
    /// are padded with zeros.
    pub fn mul_term(&self, t: &Term) -> MultiPolynomial {
        let mut out = Self::zero();
        for ((b, e), c) in &self.terms {
            let n = e.len().max(t.expo.len());
            let expo = (0..n)
                .map(|i| e.get(i).copied().unwrap_or(0) + t.expo.get(i).copied().unwrap_or(0))
                .collect();
            out.add_term(b + t.bdeg, expo, c * &t.coeff);
        }
        out
    }

    pub fn coeff(&self, bdeg: u32, expo: &[u32]) -> BigInt {
        self.terms
            .get(&(bdeg, expo.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = Term> + '_ {
        self.terms
            .iter()
            .map(|((b, e), c)| Term::new(*b, e.clone(), c.clone()))
    }

    /// The value at `B = X_1 = ... = X_k = 1`.
    pub fn specialize_all_ones(&self) -> BigInt {
        self.terms.values().sum()
    }
}

impl fmt::Display for MultiPolynomial {
    /// Terms by descending `B` degree, then descending exponent vector, e.g.
    /// `B X^(0) + 2 X^(1)`. The zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((b, e), c)) in self.terms.iter().rev().enumerate() {
            let constant = *b == 0 && e.is_empty();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if constant {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs} ")?;
                }
                Term::write_monomial(f, *b, e)?;
            }
        }
        Ok(())
    }
}

impl Serialize for MultiPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for t in self.terms() {
            seq.serialize_element(&t)?;
        }
        seq.end()
    }
}

/// Result of [`poly_equal`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum PolyComparison {
    Equal,
    /// The first key, in canonical order, whose coefficients disagree.
    Differ {
        bdeg: u32,
        expo: Vec<u32>,
        #[serde(serialize_with = "serialize_integer")]
        left: BigInt,
        #[serde(serialize_with = "serialize_integer")]
        right: BigInt,
    },
}

impl PolyComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, PolyComparison::Equal)
    }
}

pub fn poly_equal(a: &MultiPolynomial, b: &MultiPolynomial) -> PolyComparison {
    let mut keys: Vec<&(u32, Vec<u32>)> = a.terms.keys().chain(b.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        let l = a.terms.get(key).cloned().unwrap_or_default();
        let r = b.terms.get(key).cloned().unwrap_or_default();
        if l != r {
            return PolyComparison::Differ {
                bdeg: key.0,
                expo: key.1.clone(),
                left: l,
                right: r,
            };
        }
    }
    PolyComparison::Equal
}

/// `Σ_k = sum_{P ∈ Dyck(k)} C_P B^{D_{P,k}} X^P`.
pub fn sigma_formula(k: usize) -> MultiPolynomial {
    let mut out = MultiPolynomial::zero();
    for p in enumerate_dyck(k) {
        let c = BigInt::from(coeff_cp(&p));
        out.add_term(p.final_deficit(), p.entries().to_vec(), c);
    }
    out
}

/// `Σ_k` as `sum_F 2^(l_F - 1) B^{nchild(∘)} X_F` over all `(k+1)!` forests
/// on `[k] ∪ {∘}`.
pub fn sigma_bruteforce(k: usize) -> MultiPolynomial {
    let labels = labels_with_root(k as u32);
    (0..forest_count(labels.len()))
        .into_par_iter()
        .fold(MultiPolynomial::zero, |mut acc, i| {
            let f = forest_from_index(&labels, i);
            let m = monomial(&f);
            let weight = BigInt::one() << (m.tree_count - 1);
            acc.add_term(m.root_children as u32, m.exponent_vec(), weight);
            acc
        })
        .reduce(MultiPolynomial::zero, MultiPolynomial::merge)
}

/// `sum_F 2^(l_F - 1)` over all forests on `[k] ∪ {∘}`, counted directly.
pub fn weighted_forest_count(k: usize) -> BigUint {
    let labels = labels_with_root(k as u32);
    (0..forest_count(labels.len()))
        .into_par_iter()
        .map(|i| BigUint::one() << (forest_from_index(&labels, i).tree_count() - 1))
        .reduce(BigUint::zero, |a, b| a + b)
}
