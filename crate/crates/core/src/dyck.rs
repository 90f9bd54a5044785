//! Dyck vectors, their deficit profiles, the coefficient `C_P` and the
//! encoding of Dyck vectors as lattice paths below the diagonal.
//!
//! A Dyck vector of length `k` is a sequence `(p_1, ..., p_k)` of nonnegative
//! integers whose prefix sums satisfy `p_1 + ... + p_j <= j`. The deficit
//! `D_{P,j} = j - (p_1 + ... + p_j)` measures the slack at step `j`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, compact_digits};
use crate::error::{Error, Result};

/// A validated Dyck vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct DyckVector(Vec<u32>);

impl DyckVector {
    /// Validates the prefix constraint and wraps the sequence.
    pub fn new(p: Vec<u32>) -> Result<Self> {
        let mut sum = 0u64;
        for (j, &x) in p.iter().enumerate() {
            sum += x as u64;
            if sum > (j + 1) as u64 {
                return Err(Error::NotDyck { index: j + 1 });
            }
        }
        Ok(DyckVector(p))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `p_1 + ... + p_k`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Deficits `(D_{P,0}, ..., D_{P,k})`; always starts with 0.
    pub fn deficits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut d = 0u32;
        out.push(0);
        for &x in &self.0 {
            d = d + 1 - x;
            out.push(d);
        }
        out
    }

    /// `D_{P,k}`, the final deficit.
    pub fn final_deficit(&self) -> u32 {
        self.0.len() as u32 - self.degree()
    }

    /// Drops the last entry; a prefix of a Dyck vector is a Dyck vector.
    pub fn truncated(&self) -> DyckVector {
        let mut p = self.0.clone();
        p.pop();
        DyckVector(p)
    }

    /// Lattice path of semilength `k + 1`: one East step per index followed
    /// by `p_j` North steps, and a final East step followed by the North run
    /// that closes the path.
    pub fn to_path(&self) -> DyckPath {
        let k = self.0.len();
        let mut steps = Vec::with_capacity(2 * (k + 1));
        for &x in &self.0 {
            steps.push(Step::East);
            steps.extend(std::iter::repeat_n(Step::North, x as usize));
        }
        steps.push(Step::East);
        let closing = k as u32 + 1 - self.degree();
        steps.extend(std::iter::repeat_n(Step::North, closing as usize));
        DyckPath(steps)
    }
}

impl<'de> Deserialize<'de> for DyckVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = Vec::<u32>::deserialize(d)?;
        DyckVector::new(p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for DyckVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", compact_digits(&self.0))
    }
}

impl TryFrom<Vec<u32>> for DyckVector {
    type Error = Error;
    fn try_from(p: Vec<u32>) -> Result<Self> {
        DyckVector::new(p)
    }
}

/// One step of a lattice path. Serialized as `0` (East) and `1` (North).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    East,
    North,
}

/// A Dyck path of positive semilength staying weakly below the diagonal:
/// every prefix has at most as many North steps as East steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyckPath(Vec<Step>);

impl DyckPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::MalformedPath(
                "empty path encodes no Dyck vector".into(),
            ));
        }
        if !steps.len().is_multiple_of(2) {
            return Err(Error::MalformedPath(format!("odd length {}", steps.len())));
        }
        let mut height = 0i64;
        for (i, s) in steps.iter().enumerate() {
            height += match s {
                Step::East => 1,
                Step::North => -1,
            };
            if height < 0 {
                return Err(Error::MalformedPath(format!(
                    "prefix of length {} crosses the diagonal",
                    i + 1
                )));
            }
        }
        if height != 0 {
            return Err(Error::MalformedPath(
                "unequal numbers of East and North steps".into(),
            ));
        }
        Ok(DyckPath(steps))
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn semilength(&self) -> usize {
        self.0.len() / 2
    }

    /// Reads the North-run lengths after each East step, omitting the last.
    pub fn to_vector(&self) -> DyckVector {
        let mut runs: Vec<u32> = Vec::with_capacity(self.semilength());
        for s in &self.0 {
            match s {
                Step::East => runs.push(0),
                Step::North => *runs.last_mut().expect("path starts East") += 1,
            }
        }
        runs.pop();
        DyckVector(runs)
    }
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Step::East => "0",
                Step::North => "1",
            })?;
        }
        Ok(())
    }
}

impl FromStr for DyckPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' | 'E' | 'e' => Ok(Step::East),
                '1' | 'N' | 'n' => Ok(Step::North),
                other => Err(Error::MalformedPath(format!("unexpected step {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        DyckPath::new(steps)
    }
}

/// Either side of the path encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DyckCode {
    Vector(DyckVector),
    Path(DyckPath),
}

/// Converts a Dyck vector to its path and a path back to its vector.
pub fn path_codec(x: DyckCode) -> DyckCode {
    match x {
        DyckCode::Vector(v) => DyckCode::Path(v.to_path()),
        DyckCode::Path(p) => DyckCode::Vector(p.to_vector()),
    }
}

/// Calls `visit` on every Dyck vector of length `k`, in lexicographic order,
/// without allocating per vector.
pub fn visit_dyck(k: usize, mut visit: impl FnMut(&[u32])) {
    fn rec(buf: &mut Vec<u32>, k: usize, sum: u32, visit: &mut impl FnMut(&[u32])) {
        let j = buf.len();
        if j == k {
            visit(buf);
            return;
        }
        for x in 0..=(j as u32 + 1 - sum) {
            buf.push(x);
            rec(buf, k, sum + x, visit);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(k);
    rec(&mut buf, k, 0, &mut visit);
}

/// Every Dyck vector of length `k` in lexicographic order; there are
/// `Catalan(k + 1)` of them.
pub fn enumerate_dyck(k: usize) -> Vec<DyckVector> {
    let mut out = Vec::new();
    visit_dyck(k, |p| out.push(DyckVector(p.to_vec())));
    out
}

/// Number of Dyck vectors of length `k`, by enumeration.
pub fn count_dyck(k: usize) -> u64 {
    let mut n = 0u64;
    visit_dyck(k, |_| n += 1);
    n
}

/// Deficit profile of a raw sequence, rejecting non-Dyck input.
pub fn deficit_profile(p: &[u32]) -> Result<Vec<u32>> {
    Ok(DyckVector::new(p.to_vec())?.deficits())
}

/// The factors `2 binom(D_{P,j-1}, p_j - 1) + binom(D_{P,j-1}, p_j)` for
/// `j = 1..k`.
pub fn coeff_cp_factors(p: &DyckVector) -> Vec<BigUint> {
    let d = p.deficits();
    p.entries()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let prev = d[i] as i64;
            let x = x as i64;
            binomial(prev, x - 1) * 2u32 + binomial(prev, x)
        })
        .collect()
}

/// `C_P` through the restricted product
/// `prod_{p_j != 0} (2 + D_{P,j} / p_j) binom(D_{P,j-1}, p_j - 1)`,
/// evaluated over the rationals.
pub fn coeff_cp_restricted(p: &DyckVector) -> BigRational {
    let d = p.deficits();
    let mut acc = BigRational::one();
    for (i, &x) in p.entries().iter().enumerate() {
        if x == 0 {
            continue;
        }
        let ratio = BigRational::new(BigInt::from(d[i + 1]), BigInt::from(x));
        let b = BigInt::from(binomial(d[i] as i64, x as i64 - 1));
        acc *= (ratio + BigInt::from(2)) * BigRational::from_integer(b);
    }
    acc
}

/// The coefficient `C_P`. Both product forms are evaluated and must agree.
pub fn coeff_cp(p: &DyckVector) -> BigUint {
    let product: BigUint = coeff_cp_factors(p).into_iter().product();
    let restricted = coeff_cp_restricted(p);
    assert_eq!(
        restricted,
        BigRational::from_integer(BigInt::from(product.clone())),
        "product forms of C_P disagree on {p}"
    );
    product
}
