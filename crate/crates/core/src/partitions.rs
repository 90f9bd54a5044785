//! Set partitions of `[k]` in normal ordering, their shapes, the shrink map
//! `Π ↦ Π⁻`, and the bijection between partitions of a given shape and paths
//! from `()` in the composition graph.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::compositions::Composition;
use crate::error::{Error, Result};

/// A set partition of `[k]`, stored in normal ordering: every block sorted
/// ascending, blocks sorted by their largest element.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<u32>>,
}

impl SetPartition {
    /// Normalizes `blocks` and checks they partition `[k]`, `k` being the
    /// total number of elements.
    pub fn new(mut blocks: Vec<Vec<u32>>) -> Result<Self> {
        let k: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; k + 1];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x == 0 || x as usize > k {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} outside 1..={k}"
                    )));
                }
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::InvalidPartition(format!("element {x} repeated")));
                }
            }
        }
        blocks.sort_unstable_by_key(|b| *b.last().expect("nonempty"));
        Ok(SetPartition { blocks })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The `k` such that this partitions `[k]`.
    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block sizes in normal ordering.
    pub fn shape(&self) -> Composition {
        Composition::new(self.blocks.iter().map(|b| b.len() as u32).collect())
            .expect("blocks are nonempty")
    }

    /// `Π⁻`: every element decremented, the resulting 0 removed together with
    /// its block when that block was `{1}`.
    pub fn shrink(&self) -> Result<SetPartition> {
        if self.blocks.is_empty() {
            return Err(Error::ShrinkEmpty);
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .filter(|&&x| x != 1)
                    .map(|&x| x - 1)
                    .collect::<Vec<_>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        SetPartition::new(blocks)
    }

    fn shifted(&self) -> Vec<Vec<u32>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&x| x + 1).collect())
            .collect()
    }

    /// Renders the compact form, e.g. `1|35|6|247`. Elements are run
    /// together up to `k = 9` and comma separated beyond.
    pub fn to_compact(&self) -> String {
        if self.blocks.is_empty() {
            return "∅".to_string();
        }
        let sep = if self.ground_size() > 9 { "," } else { "" };
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

impl FromStr for SetPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" || s == "{}" {
            return Ok(SetPartition::empty());
        }
        let blocks = s
            .split('|')
            .map(|block| {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad element {t:?} in {s:?}")))
                };
                if block.contains(',') {
                    block.split(',').map(parse).collect::<Result<Vec<_>>>()
                } else {
                    block
                        .chars()
                        .map(|c| parse(c.encode_utf8(&mut [0; 4])))
                        .collect::<Result<Vec<_>>>()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        SetPartition::new(blocks)
    }
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_compact())
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every set partition of `[k]`, generated from restricted growth strings in
/// lexicographic order; `Bell(k)` of them.
pub fn enumerate_partitions(k: usize) -> Vec<SetPartition> {
    fn rec(rgs: &mut Vec<usize>, k: usize, blocks: usize, out: &mut Vec<SetPartition>) {
        if rgs.len() == k {
            let mut bs = vec![Vec::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                bs[b].push(i as u32 + 1);
            }
            out.push(SetPartition::new(bs).expect("restricted growth string"));
            return;
        }
        for b in 0..=blocks {
            rgs.push(b);
            rec(rgs, k, blocks.max(b + 1), out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), k, 0, &mut out);
    out
}

/// `Bell(k)` by the Bell triangle.
pub fn bell(k: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("nonempty row").clone());
        for x in &row {
            let v = next.last().expect("nonempty row") + x;
            next.push(v);
        }
        row = next;
    }
    row[0].clone()
}

/// `F(Π) = (shape(Π^(k)), ..., shape(Π^(0)))`, a path from `()` to
/// `shape(Π)`.
pub fn partition_to_path(p: &SetPartition) -> Vec<Composition> {
    let mut shapes = vec![p.shape()];
    let mut cur = p.clone();
    while !cur.is_empty() {
        cur = cur.shrink().expect("nonempty");
        shapes.push(cur.shape());
    }
    shapes.reverse();
    shapes
}

/// The unique partition whose path is `path`. Step `i` is the edge
/// `path[i-1] → path[i]`; step 0 flags a path that does not start at `()`.
pub fn path_to_partition(path: &[Composition]) -> Result<SetPartition> {
    match path.first() {
        Some(first) if first.is_empty() => {}
        _ => return Err(Error::InvalidPath { step: 0 }),
    }
    let mut cur = SetPartition::empty();
    for (i, pair) in path.windows(2).enumerate() {
        let (from, to) = (&pair[0], &pair[1]);
        let mut blocks = cur.shifted();
        if to.len() == from.len() + 1 && to.parts()[0] == 1 && &to.parts()[1..] == from.parts() {
            blocks.insert(0, vec![1]);
        } else if to.len() == from.len() {
            let diff: Vec<usize> = (0..to.len())
                .filter(|&j| to.parts()[j] != from.parts()[j])
                .collect();
            match diff.as_slice() {
                [j] if to.parts()[*j] == from.parts()[*j] + 1 => blocks[*j].insert(0, 1),
                _ => return Err(Error::InvalidPath { step: i + 1 }),
            }
        } else {
            return Err(Error::InvalidPath { step: i + 1 });
        }
        cur = SetPartition::new(blocks).expect("shift keeps a partition");
    }
    Ok(cur)
}

/// Number of partitions of `[|λ|]` with shape `λ`, by enumeration.
pub fn count_by_shape(lambda: &Composition) -> BigUint {
    let n = enumerate_partitions(lambda.size() as usize)
        .iter()
        .filter(|p| &p.shape() == lambda)
        .count();
    BigUint::from(n)
}

/// Partition counts of `[k]` grouped by shape, in one enumeration pass.
pub fn shape_histogram(k: u32) -> BTreeMap<Composition, BigUint> {
    let mut out: BTreeMap<Composition, BigUint> = BTreeMap::new();
    for p in enumerate_partitions(k as usize) {
        *out.entry(p.shape()).or_insert_with(BigUint::zero) += 1u32;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn normal_ordering() {
        let p = SetPartition::new(vec![vec![6], vec![1], vec![7, 2, 4], vec![5, 3]]).unwrap();
        assert_eq!(p.to_string(), "1|35|6|247");
        assert_eq!(part("247|1|35|6"), p);
    }

    #[test]
    fn rejects_bad_blocks() {
        assert!(SetPartition::new(vec![vec![1, 2], vec![2]]).is_err());
        assert!(SetPartition::new(vec![vec![1], vec![]]).is_err());
        assert!(SetPartition::new(vec![vec![1, 4]]).is_err());
        assert!("1|2x".parse::<SetPartition>().is_err());
    }

    #[test]
    fn comma_form_beyond_nine() {
        let p = SetPartition::new(vec![(1..=10).collect()]).unwrap();
        assert_eq!(p.to_string(), "1,2,3,4,5,6,7,8,9,10");
        assert_eq!(p.to_string().parse::<SetPartition>().unwrap(), p);
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_partitions(0), vec![SetPartition::empty()]);
        assert_eq!(enumerate_partitions(3).len(), 5);
        assert_eq!(enumerate_partitions(4).len(), 15);
        let bells: Vec<u64> = (0..10).map(|k| u64::try_from(bell(k)).unwrap()).collect();
        assert_eq!(bells, [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147]);
    }

    #[test]
    fn shapes() {
        assert_eq!(part("1|35|6|247").shape(), comp(&[1, 2, 1, 3]));
        assert_eq!(SetPartition::empty().shape(), comp(&[]));
        assert_eq!(part("234|15|6").shape(), comp(&[3, 2, 1]));
    }

    #[test]
    fn shrink_examples() {
        assert_eq!(part("1|35|6|247").shrink().unwrap(), part("24|5|136"));
        assert_eq!(part("345|26|17").shrink().unwrap(), part("234|15|6"));
        assert_eq!(part("1").shrink().unwrap(), SetPartition::empty());
        assert_eq!(SetPartition::empty().shrink(), Err(Error::ShrinkEmpty));
    }

    #[test]
    fn worked_chain() {
        let path = partition_to_path(&part("1|35|6|247"));
        let want = vec![
            comp(&[]),
            comp(&[1]),
            comp(&[1, 1]),
            comp(&[1, 1, 1]),
            comp(&[1, 1, 2]),
            comp(&[2, 1, 2]),
            comp(&[2, 1, 3]),
            comp(&[1, 2, 1, 3]),
        ];
        assert_eq!(path, want);
        assert_eq!(path_to_partition(&want).unwrap(), part("1|35|6|247"));
        assert_eq!(partition_to_path(&SetPartition::empty()), vec![comp(&[])]);
        assert_eq!(
            partition_to_path(&part("1|2")),
            vec![comp(&[]), comp(&[1]), comp(&[1, 1])]
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            path_to_partition(&[comp(&[]), comp(&[1])]).unwrap(),
            part("1")
        );
        assert_eq!(
            path_to_partition(&[comp(&[]), comp(&[1]), comp(&[2])]).unwrap(),
            part("12")
        );
    }

    #[test]
    fn invalid_paths_name_the_step() {
        assert_eq!(
            path_to_partition(&[comp(&[]), comp(&[1]), comp(&[3])]),
            Err(Error::InvalidPath { step: 2 })
        );
        assert_eq!(
            path_to_partition(&[comp(&[1])]),
            Err(Error::InvalidPath { step: 0 })
        );
        assert_eq!(path_to_partition(&[]), Err(Error::InvalidPath { step: 0 }));
        assert_eq!(
            path_to_partition(&[comp(&[]), comp(&[1]), comp(&[1, 1]), comp(&[2, 2])]),
            Err(Error::InvalidPath { step: 3 })
        );
    }

    #[test]
    fn count_by_shape_examples() {
        assert_eq!(count_by_shape(&comp(&[1, 2])), BigUint::from(2u32));
        assert_eq!(count_by_shape(&comp(&[2, 2])), BigUint::from(3u32));
        assert_eq!(count_by_shape(&comp(&[])), BigUint::one());
    }
}
