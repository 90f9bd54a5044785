//! Formal expansions of `L_{ξ_1} ··· L_{ξ_k}` acting on endomorphism
//! sections, through `L_ξ = ∇_ξ − ad(∇ξ)`.
//!
//! Operators are never evaluated. A term is a symbol indexed either by a set
//! partition of `[k+1]` (the block holding `k+1` is the trailing `∇` factor,
//! the others are `ad` factors ordered by their maxima) or by a forest on
//! `[k] ∪ {∘}` (the tree of `∘` is the trailing factor). Formal sums are keyed
//! by the canonical text of the index, so two sums are equal exactly when
//! their maps are.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{multinomial, serialize_integer};
use crate::dyck::{coeff_cp, enumerate_dyck, DyckVector};
use crate::error::{mismatch, Result};
use crate::forests::{
    decorate, enumerate_forests_par, enumerate_rooted_trees, enumerate_trees, graft,
    labels_with_root, Forest, Label,
};
use crate::partitions::{bell, enumerate_partitions, SetPartition};

/// A signed formal sum of operator symbols: canonical key → multiplicity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorSum {
    terms: BTreeMap<String, i64>,
}

impl OperatorSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: String, mult: i64) {
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                if mult != 0 {
                    e.insert(mult);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += mult;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn merge(mut self, other: OperatorSum) -> OperatorSum {
        for (k, m) in other.terms {
            self.add(k, m);
        }
        self
    }

    pub fn get(&self, key: &str) -> i64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.terms.iter().map(|(k, &m)| (k.as_str(), m))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the multiplicities.
    pub fn signed_total(&self) -> i64 {
        self.terms.values().sum()
    }

    /// The first key, in key order, where the two sums disagree.
    pub fn first_difference(&self, other: &OperatorSum) -> Option<(String, i64, i64)> {
        let keys: BTreeSet<&String> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|k| {
            let (a, b) = (self.get(k), other.get(k));
            (a != b).then(|| (k.clone(), a, b))
        })
    }

    fn ensure_equal(&self, other: &OperatorSum, check: &str) -> Result<()> {
        match self.first_difference(other) {
            None => Ok(()),
            Some((k, a, b)) => Err(mismatch(check, format!("term {k}: {a} against {b}"))),
        }
    }
}

impl FromIterator<(String, i64)> for OperatorSum {
    fn from_iter<I: IntoIterator<Item = (String, i64)>>(iter: I) -> Self {
        let mut s = OperatorSum::new();
        for (k, m) in iter {
            s.add(k, m);
        }
        s
    }
}

impl Serialize for OperatorSum {
    /// `[{"key": ..., "sign": ±1}, ...]` in key order.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            key: &'a str,
            sign: i64,
        }
        s.collect_seq(self.iter().map(|(key, sign)| Entry { key, sign }))
    }
}

fn sign_of(factors: usize) -> i64 {
    if factors % 2 == 1 {
        1
    } else {
        -1
    }
}

/// A summand of the partition expansion: sign `(−1)^{|P|−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTerm {
    pub partition: SetPartition,
    pub sign: i64,
}

impl PartitionTerm {
    pub fn new(partition: SetPartition) -> Self {
        let sign = sign_of(partition.len());
        PartitionTerm { partition, sign }
    }

    pub fn key(&self) -> String {
        self.partition.to_compact()
    }

    /// The operator word, e.g. `- ad(∇_ξ2 ∇ξ3) ad(∇ξ7) ∇_ξ5`; `ascii` writes
    /// `D` for `∇` and `x` for `ξ`.
    pub fn operator_word(&self, ascii: bool) -> String {
        let (nabla, xi) = if ascii { ("D", "x") } else { ("∇", "ξ") };
        let mut factors = Vec::new();
        let blocks = self.partition.blocks();
        if let Some((last, ads)) = blocks.split_last() {
            for b in ads {
                let (max, rest) = b.split_last().expect("nonempty block");
                let mut inner: Vec<String> =
                    rest.iter().map(|j| format!("{nabla}_{xi}{j}")).collect();
                inner.push(format!("{nabla}{xi}{max}"));
                factors.push(format!("ad({})", inner.join(" ")));
            }
            let trailing = &last[..last.len() - 1];
            factors.extend(trailing.iter().map(|j| format!("{nabla}_{xi}{j}")));
        }
        let body = if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join(" ")
        };
        let sign = if self.sign < 0 { "-" } else { "+" };
        format!("{sign} {body}")
    }
}

/// A summand of the forest expansion: sign `(−1)^{l_F−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestTerm {
    pub forest: Forest,
    pub sign: i64,
}

impl ForestTerm {
    pub fn new(forest: Forest) -> Self {
        let sign = sign_of(forest.tree_count());
        ForestTerm { forest, sign }
    }

    pub fn key(&self) -> String {
        self.forest.to_string()
    }
}

/// The closed partition form: every partition of `[k+1]` once.
pub fn partition_terms(k: usize) -> Vec<PartitionTerm> {
    enumerate_partitions(k + 1)
        .into_iter()
        .map(PartitionTerm::new)
        .collect()
}

/// The inductive construction: starting from `{{k+1}}`, each `a = k, ..., 1`
/// either joins an existing block (`∇_{ξ_a}` by Leibniz) or opens the block
/// `{a}` with a sign flip (`−ad(∇ξ_a)`).
pub fn partition_recurrence(k: usize) -> OperatorSum {
    let top = k as u32 + 1;
    let mut state: Vec<(Vec<Vec<u32>>, i64)> = vec![(vec![vec![top]], 1)];
    for a in (1..=k as u32).rev() {
        let mut next = Vec::with_capacity(state.len() * 2);
        for (blocks, sign) in &state {
            for i in 0..blocks.len() {
                let mut b = blocks.clone();
                b[i].insert(0, a);
                next.push((b, *sign));
            }
            let mut b = Vec::with_capacity(blocks.len() + 1);
            b.push(vec![a]);
            b.extend(blocks.iter().cloned());
            next.push((b, -sign));
        }
        state = next;
    }
    state
        .into_iter()
        .map(|(blocks, sign)| {
            let p = SetPartition::new(blocks).expect("blocks partition [k+1]");
            (p.to_compact(), sign)
        })
        .collect()
}

/// `prod_{j=1..k} L_{ξ_j}` over set partitions of `[k+1]`; the closed form
/// and the recurrence must agree, with `Bell(k+1)` terms.
pub fn expand_lie_partitions(k: usize) -> Result<OperatorSum> {
    let closed: OperatorSum = partition_terms(k)
        .into_iter()
        .map(|t| (t.key(), t.sign))
        .collect();
    closed.ensure_equal(&partition_recurrence(k), "expand_lie_partitions")?;
    if BigUint::from(closed.len()) != bell(k + 1) {
        return Err(mismatch(
            "expand_lie_partitions",
            format!("{} terms, expected Bell({})", closed.len(), k + 1),
        ));
    }
    Ok(closed)
}

/// The closed forest form: every forest on `[k] ∪ {∘}` once.
pub fn forest_terms(k: usize) -> Vec<ForestTerm> {
    enumerate_forests_par(&labels_with_root(k as u32))
        .into_iter()
        .map(ForestTerm::new)
        .collect()
}

fn label_of(x: u32, top: u32) -> Label {
    if x == top {
        Label::Root
    } else {
        Label::Plain(x)
    }
}

/// The partition form with every block expanded into its trees: a block `p`
/// into the trees on `p` rooted at `max p`, the block of `k+1` into the
/// trees on `p* ∪ {∘}`.
pub fn forest_product(k: usize) -> OperatorSum {
    let top = k as u32 + 1;
    partition_terms(k)
        .into_par_iter()
        .map(|t| {
            let choices: Vec<Vec<Forest>> = t
                .partition
                .blocks()
                .iter()
                .map(|b| {
                    let nodes: Vec<Label> = b.iter().map(|&x| label_of(x, top)).collect();
                    enumerate_rooted_trees(&nodes)
                })
                .collect();
            let mut out = OperatorSum::new();
            let mut pick = vec![0usize; choices.len()];
            loop {
                let mut edges = Vec::new();
                for (c, &i) in choices.iter().zip(&pick) {
                    edges.extend(c[i].edges());
                }
                let f = Forest::new(labels_with_root(k as u32), &edges)
                    .expect("block trees are decreasing");
                out.add(f.to_string(), t.sign);
                // odometer over the per-block choices
                let mut d = 0;
                loop {
                    if d == pick.len() {
                        return out;
                    }
                    pick[d] += 1;
                    if pick[d] < choices[d].len() {
                        break;
                    }
                    pick[d] = 0;
                    d += 1;
                }
            }
        })
        .reduce(OperatorSum::new, OperatorSum::merge)
}

/// `prod_{j=1..k} L_{ξ_j}` over forests on `[k] ∪ {∘}`; the closed form and
/// the block-by-block product must agree, with `(k+1)!` terms.
pub fn expand_lie_forests(k: usize) -> Result<OperatorSum> {
    let closed: OperatorSum = forest_terms(k)
        .into_iter()
        .map(|t| (t.key(), t.sign))
        .collect();
    closed.ensure_equal(&forest_product(k), "expand_lie_forests")?;
    Ok(closed)
}

/// Independent oracle: from `+∘`, left-multiply by `L_{ξ_j}` for
/// `j = k, ..., 1`. `∇_{ξ_j}` grafts `j` onto every node of every tree;
/// `−ad(∇ξ_j)` adds the one-node tree `{j}` with a sign flip.
pub fn lie_chain_oracle(k: usize) -> OperatorSum {
    let mut state: BTreeMap<Forest, i64> = BTreeMap::from([(Forest::bare_root(), 1)]);
    for j in (1..=k as u32).rev() {
        let j = Label::Plain(j);
        state = state
            .par_iter()
            .map(|(f, &m)| {
                let mut out = BTreeMap::new();
                for g in graft(f, j).expect("j is below every label") {
                    *out.entry(g).or_insert(0) += m;
                }
                let mut labels = f.labels().to_vec();
                labels.push(j);
                let g = Forest::new(labels, &f.edges()).expect("adding a root");
                *out.entry(g).or_insert(0) -= m;
                out
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (f, m) in b {
                    *a.entry(f).or_insert(0) += m;
                }
                a
            });
    }
    state.into_iter().map(|(f, m)| (f.to_string(), m)).collect()
}

/// The trees among the closed forest terms (`l_F = 1`), which must be
/// `Trees([k])` with sign `+`: the pure covariant part of the expansion.
pub fn connected_part(k: usize) -> Result<OperatorSum> {
    let part: OperatorSum = forest_terms(k)
        .into_iter()
        .filter(|t| t.forest.tree_count() == 1)
        .map(|t| (t.key(), t.sign))
        .collect();
    let s: Vec<u32> = (1..=k as u32).collect();
    let trees: OperatorSum = enumerate_trees(&s)
        .into_iter()
        .map(|t| (t.to_string(), 1))
        .collect();
    part.ensure_equal(&trees, "connected_part")?;
    Ok(part)
}

/// Groups the forests on `[k] ∪ {∘}` by the partition of `[k+1]` into tree
/// node sets (`∘` read as `k+1`). Each group must carry the sign of its
/// partition and `prod_p (|p| − 1)!` forests.
pub fn group_by_node_sets(k: usize) -> Result<BTreeMap<SetPartition, (i64, u64)>> {
    let top = k as u32 + 1;
    let mut groups: BTreeMap<SetPartition, (i64, u64)> = BTreeMap::new();
    for t in forest_terms(k) {
        let blocks = t
            .forest
            .trees()
            .iter()
            .map(|tree| {
                tree.labels()
                    .iter()
                    .map(|l| match l {
                        Label::Plain(x) => *x,
                        _ => top,
                    })
                    .collect()
            })
            .collect();
        let p = SetPartition::new(blocks)?;
        let e = groups.entry(p).or_insert((t.sign, 0));
        if e.0 != t.sign {
            return Err(mismatch("group_by_node_sets", "mixed signs in a group"));
        }
        e.1 += 1;
    }
    for (p, &(sign, count)) in &groups {
        let want: u64 = p
            .blocks()
            .iter()
            .map(|b| (1..b.len() as u64).product::<u64>())
            .product();
        if count != want || sign != sign_of(p.len()) {
            return Err(mismatch(
                "group_by_node_sets",
                format!("{p}: {count} forests, expected {want}"),
            ));
        }
    }
    Ok(groups)
}

/// `Map(h, l)`: every map `[h] → [l]` as its value list, lexicographically.
pub fn leibniz_split(h: usize, l: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..h {
        out = out
            .into_iter()
            .flat_map(|m| {
                (1..=l).map(move |v| {
                    let mut m = m.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

/// `N^l(h)`: weak compositions of `h` into `l` parts, in decreasing
/// lexicographic order.
pub fn weak_compositions(h: u32, l: usize) -> Vec<Vec<u32>> {
    fn rec(h: u32, l: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == l {
            cur.push(h);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in (0..=h).rev() {
            cur.push(first);
            rec(h - first, l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if l == 0 {
        if h == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(h, l, &mut Vec::new(), &mut out);
    out
}

/// Groups `Map(h, l)` by fiber sizes. Each `H ∈ N^l(h)` must occur exactly
/// `h! / prod h_j!` times; the groups are returned in the order of
/// [`weak_compositions`].
pub fn leibniz_groups(h: usize, l: u32) -> Result<Vec<(Vec<u32>, BigUint)>> {
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for m in leibniz_split(h, l) {
        let mut sizes = vec![0u32; l as usize];
        for v in m {
            sizes[v as usize - 1] += 1;
        }
        *counts.entry(sizes).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    for hv in weak_compositions(h as u32, l as usize) {
        let got = BigUint::from(counts.remove(&hv).unwrap_or(0));
        let want = multinomial(&hv);
        if got != want {
            return Err(mismatch(
                "leibniz_groups",
                format!("{hv:?}: {got} maps, expected {want}"),
            ));
        }
        out.push((hv, got));
    }
    if !counts.is_empty() {
        return Err(mismatch("leibniz_groups", "fiber vector outside N^l(h)"));
    }
    Ok(out)
}

/// One term of the estimate: the Dyck vector `P`, the split `H` of the `h`
/// extra derivatives, the coefficient `C_P`, the derivative order on `A`
/// (`h_{k+1} + D_{P,k}`) and on each `ξ_j` (`h_j + p_j`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateRow {
    pub p: DyckVector,
    pub h: Vec<u32>,
    #[serde(serialize_with = "serialize_integer")]
    pub coeff: BigUint,
    pub a_order: u32,
    pub xi_orders: Vec<u32>,
}

/// One row per `(P, H)` with `P ∈ Dyck(k)` and `H ∈ N^{k+1}(h)`, `P` in
/// lexicographic order, `H` in decreasing lexicographic order.
pub fn estimate_certificate(k: usize, h: u32) -> Vec<CertificateRow> {
    let splits = weak_compositions(h, k + 1);
    let mut rows = Vec::new();
    for p in enumerate_dyck(k) {
        let coeff = coeff_cp(&p);
        let d = p.final_deficit();
        for hv in &splits {
            rows.push(CertificateRow {
                p: p.clone(),
                h: hv.clone(),
                coeff: coeff.clone(),
                a_order: hv[k] + d,
                xi_orders: p.entries().iter().zip(hv).map(|(a, b)| a + b).collect(),
            });
        }
    }
    rows
}

fn primed_map(values: &[Label]) -> BTreeMap<Label, Label> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| (Label::Primed(i as u32 + 1), v))
        .collect()
}

/// For every forest on `[k] ∪ {∘}`: the pairs `(μ: [h] → [l_F], β_j:
/// μ⁻¹(j) → T_j)` recombine through `α(p) = β_{μ(p)}(p)` into each map
/// `α: [h] → [k] ∪ {∘}` exactly once. Compared as decorated forests `α ∪ F`.
/// Returns the number of pairs checked.
pub fn verify_map_recombination(k: usize, h: usize) -> Result<u64> {
    let forests = enumerate_forests_par(&labels_with_root(k as u32));
    forests
        .par_iter()
        .map(|f| {
            let trees = f.trees();
            let mut seen = BTreeSet::new();
            let mut pairs = 0u64;
            for mu in leibniz_split(h, trees.len() as u32) {
                // β chooses, for each p, a node of the tree μ(p)
                let mut betas: Vec<Vec<Label>> = vec![Vec::new()];
                for &j in &mu {
                    let nodes = trees[j as usize - 1].labels();
                    betas = betas
                        .into_iter()
                        .flat_map(|b| {
                            nodes.iter().map(move |&v| {
                                let mut b = b.clone();
                                b.push(v);
                                b
                            })
                        })
                        .collect();
                }
                for alpha in betas {
                    pairs += 1;
                    if !seen.insert(decorate(&primed_map(&alpha), f)?) {
                        return Err(mismatch(
                            "map_recombination",
                            format!("{f}: α {alpha:?} obtained twice"),
                        ));
                    }
                }
            }
            let mut all = BTreeSet::new();
            let mut maps: Vec<Vec<Label>> = vec![Vec::new()];
            for _ in 0..h {
                maps = maps
                    .into_iter()
                    .flat_map(|m| {
                        f.labels().iter().map(move |&v| {
                            let mut m = m.clone();
                            m.push(v);
                            m
                        })
                    })
                    .collect();
            }
            for alpha in maps {
                all.insert(decorate(&primed_map(&alpha), f)?);
            }
            if all != seen {
                return Err(mismatch(
                    "map_recombination",
                    format!("{f}: {} recombined maps against {}", seen.len(), all.len()),
                ));
            }
            Ok(pairs)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}
