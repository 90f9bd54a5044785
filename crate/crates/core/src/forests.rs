//! Rooted labeled strictly decreasing forests.
//!
//! A forest on a finite totally ordered label set `S` is a partial father map
//! `S → S` with `father(ν) > ν`. Nodes without a father are roots; the
//! maximum of `S` is always one. Children are never stored in a separate
//! sibling order: they are listed by increasing label.
//!
//! Labels come from three families ordered `1' < 2' < ... < 1 < 2 < ... < ∘`.
//! The primed copy only appears through [`decorate`], where it realizes the
//! ordered sum `S' + S`; the empty root `∘` is maximal.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyck::DyckVector;
use crate::error::{mismatch, Error, Result};

/// A node label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Primed(u32),
    Plain(u32),
    /// The empty root `∘`, standing for the tensor being differentiated.
    Root,
}

impl Label {
    pub fn is_root_symbol(self) -> bool {
        matches!(self, Label::Root)
    }

    pub fn render(self, ascii: bool) -> String {
        match self {
            Label::Primed(n) => format!("{n}'"),
            Label::Plain(n) => n.to_string(),
            Label::Root if ascii => "o".to_string(),
            Label::Root => "∘".to_string(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "∘" || s == "o" {
            return Ok(Label::Root);
        }
        let (digits, primed) = match s.strip_suffix('\'') {
            Some(d) => (d, true),
            None => (s, false),
        };
        let n: u32 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad label {s:?}")))?;
        if n == 0 {
            return Err(Error::Parse("labels start at 1".into()));
        }
        Ok(if primed {
            Label::Primed(n)
        } else {
            Label::Plain(n)
        })
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// `[k]` as labels.
pub fn plain_labels(k: u32) -> Vec<Label> {
    (1..=k).map(Label::Plain).collect()
}

/// `[k] ∪ {∘}` as labels.
pub fn labels_with_root(k: u32) -> Vec<Label> {
    let mut v = plain_labels(k);
    v.push(Label::Root);
    v
}

/// A strictly decreasing forest. Nodes are addressed by label; internally by
/// their rank in the sorted label set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest {
    labels: Vec<Label>,
    father: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Forest {
    /// Builds a forest from its label set and `(child, father)` pairs.
    pub fn new(labels: impl IntoIterator<Item = Label>, edges: &[(Label, Label)]) -> Result<Self> {
        let mut labels: Vec<Label> = labels.into_iter().collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidForest("repeated label".into()));
        }
        let mut father = vec![None; labels.len()];
        for &(child, parent) in edges {
            let c = Self::rank_in(&labels, child)
                .ok_or_else(|| Error::InvalidForest(format!("{child} is not a node")))?;
            let p = Self::rank_in(&labels, parent)
                .ok_or_else(|| Error::InvalidForest(format!("{parent} is not a node")))?;
            if p <= c {
                return Err(Error::InvalidForest(format!(
                    "father {parent} of {child} is not larger"
                )));
            }
            if father[c].replace(p).is_some() {
                return Err(Error::InvalidForest(format!("{child} has two fathers")));
            }
        }
        Ok(Self::from_ranks(labels, father))
    }

    /// `labels` sorted and unique, `father[i] > i` wherever defined.
    fn from_ranks(labels: Vec<Label>, father: Vec<Option<usize>>) -> Self {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let mut children = vec![Vec::new(); labels.len()];
        for (i, f) in father.iter().enumerate() {
            if let Some(p) = *f {
                debug_assert!(p > i);
                children[p].push(i);
            }
        }
        Forest {
            labels,
            father,
            children,
        }
    }

    fn rank_in(labels: &[Label], l: Label) -> Option<usize> {
        labels.binary_search(&l).ok()
    }

    fn rank(&self, l: Label) -> Option<usize> {
        Self::rank_in(&self.labels, l)
    }

    fn rank_or_panic(&self, l: Label) -> usize {
        self.rank(l)
            .unwrap_or_else(|| panic!("{l} is not a node of {self}"))
    }

    /// The forest `{∘}` with a single node.
    pub fn bare_root() -> Self {
        Self::from_ranks(vec![Label::Root], vec![None])
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, l: Label) -> bool {
        self.rank(l).is_some()
    }

    pub fn max_label(&self) -> Option<Label> {
        self.labels.last().copied()
    }

    pub fn father(&self, l: Label) -> Option<Label> {
        self.father[self.rank_or_panic(l)].map(|p| self.labels[p])
    }

    /// Children of `l` in increasing label order.
    pub fn children(&self, l: Label) -> Vec<Label> {
        self.children[self.rank_or_panic(l)]
            .iter()
            .map(|&c| self.labels[c])
            .collect()
    }

    pub fn nchild(&self, l: Label) -> usize {
        self.children[self.rank_or_panic(l)].len()
    }

    pub fn is_root(&self, l: Label) -> bool {
        self.father[self.rank_or_panic(l)].is_none()
    }

    /// Roots in increasing label order.
    pub fn roots(&self) -> Vec<Label> {
        (0..self.len())
            .filter(|&i| self.father[i].is_none())
            .map(|i| self.labels[i])
            .collect()
    }

    /// `l_F`, the number of trees.
    pub fn tree_count(&self) -> usize {
        self.father.iter().filter(|f| f.is_none()).count()
    }

    /// `(child, father)` pairs in increasing child order.
    pub fn edges(&self) -> Vec<(Label, Label)> {
        self.father
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.map(|p| (self.labels[i], self.labels[p])))
            .collect()
    }

    fn descendants(&self, r: usize) -> Vec<usize> {
        let mut out = vec![r];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }

    fn restricted(&self, keep: &[usize]) -> Forest {
        let labels: Vec<Label> = keep.iter().map(|&i| self.labels[i]).collect();
        let father = keep
            .iter()
            .map(|&i| self.father[i].and_then(|p| keep.binary_search(&p).ok()))
            .collect();
        Forest::from_ranks(labels, father)
    }

    /// `F_ν`, the tree of descendants of `l`.
    pub fn subtree(&self, l: Label) -> Forest {
        self.restricted(&self.descendants(self.rank_or_panic(l)))
    }

    /// The trees of the forest, ordered by root label.
    pub fn trees(&self) -> Vec<Forest> {
        (0..self.len())
            .filter(|&i| self.father[i].is_none())
            .map(|i| self.restricted(&self.descendants(i)))
            .collect()
    }

    /// `F†`: the forest without the tree rooted at its maximal element.
    pub fn dagger(&self) -> Forest {
        if self.is_empty() {
            return self.clone();
        }
        let drop = self.descendants(self.len() - 1);
        let keep: Vec<usize> = (0..self.len())
            .filter(|i| drop.binary_search(i).is_err())
            .collect();
        self.restricted(&keep)
    }

    fn write_tree(&self, out: &mut String, node: usize, ascii: bool) {
        out.push('(');
        out.push_str(&self.labels[node].render(ascii));
        for &c in &self.children[node] {
            out.push(' ');
            self.write_tree(out, c, ascii);
        }
        out.push(')');
    }

    /// Canonical nested text, one parenthesized tree per root in increasing
    /// root order, e.g. `(4 (1)) (5) (∘ (3 (2)) (7))`.
    pub fn to_text(&self, ascii: bool) -> String {
        let mut out = String::new();
        for (n, i) in (0..self.len())
            .filter(|&i| self.father[i].is_none())
            .enumerate()
        {
            if n > 0 {
                out.push(' ');
            }
            self.write_tree(&mut out, i, ascii);
        }
        out
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(false))
    }
}

impl FromStr for Forest {
    type Err = Error;

    /// Parses the canonical text form. Child and tree order in the input is
    /// not significant.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut word = String::new();
        for ch in s.chars() {
            match ch {
                '(' | ')' => {
                    if !word.is_empty() {
                        tokens.push(std::mem::take(&mut word));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !word.is_empty() {
                        tokens.push(std::mem::take(&mut word));
                    }
                }
                c => word.push(c),
            }
        }
        if !word.is_empty() {
            tokens.push(word);
        }

        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut stack: Vec<Label> = Vec::new();
        let mut expect_label = false;
        for t in tokens {
            match t.as_str() {
                "(" => {
                    if expect_label {
                        return Err(Error::Parse("missing label after '('".into()));
                    }
                    expect_label = true;
                }
                ")" => {
                    if expect_label || stack.pop().is_none() {
                        return Err(Error::Parse("unbalanced ')'".into()));
                    }
                }
                word => {
                    if !expect_label {
                        return Err(Error::Parse(format!("unexpected {word:?}")));
                    }
                    let l: Label = word.parse()?;
                    if let Some(&parent) = stack.last() {
                        edges.push((l, parent));
                    }
                    labels.push(l);
                    stack.push(l);
                    expect_label = false;
                }
            }
        }
        if expect_label || !stack.is_empty() {
            return Err(Error::Parse("unbalanced '('".into()));
        }
        Forest::new(labels, &edges)
    }
}

impl Serialize for Forest {
    /// `{"father": {"1": "4", ...}, "labels": [...]}`, both in label order.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;

        struct Fathers<'a>(&'a Forest);
        impl Serialize for Fathers<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeMap;
                let edges = self.0.edges();
                let mut m = s.serialize_map(Some(edges.len()))?;
                for (c, p) in edges {
                    m.serialize_entry(&c, &p)?;
                }
                m.end()
            }
        }

        let mut st = s.serialize_struct("Forest", 2)?;
        st.serialize_field("father", &Fathers(self))?;
        st.serialize_field("labels", &self.labels)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Forest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            father: BTreeMap<Label, Label>,
            labels: Vec<Label>,
        }
        let raw = Raw::deserialize(d)?;
        let edges: Vec<(Label, Label)> = raw.father.into_iter().collect();
        Forest::new(raw.labels, &edges).map_err(serde::de::Error::custom)
    }
}

fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of strictly decreasing forests on a set of `n` labels, `n!`.
pub fn forest_count(n: usize) -> u64 {
    factorial_u64(n)
}

/// The `index`-th forest on `labels` (sorted, unique) in the father-choice
/// product order: node of rank `i` picks digit `d_i` in `0..n-i`, where 0
/// means "root" and `d > 0` means father of rank `i + d`. The digit of rank
/// 0 is the most significant.
pub fn forest_from_index(labels: &[Label], mut index: u64) -> Forest {
    let n = labels.len();
    let mut father = vec![None; n];
    for i in (0..n).rev() {
        let radix = (n - i) as u64;
        let d = (index % radix) as usize;
        index /= radix;
        if d > 0 {
            father[i] = Some(i + d);
        }
    }
    Forest::from_ranks(labels.to_vec(), father)
}

fn sorted_unique(labels: &[Label]) -> Vec<Label> {
    let mut s = labels.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Every strictly decreasing forest on `labels`, `|S|!` of them, each node
/// independently choosing a strictly larger father or none.
pub fn enumerate_forests(labels: &[Label]) -> Vec<Forest> {
    let s = sorted_unique(labels);
    (0..forest_count(s.len()))
        .map(|i| forest_from_index(&s, i))
        .collect()
}

/// Parallel version of [`enumerate_forests`]; same order.
pub fn enumerate_forests_par(labels: &[Label]) -> Vec<Forest> {
    let s = sorted_unique(labels);
    (0..forest_count(s.len()))
        .into_par_iter()
        .map(|i| forest_from_index(&s, i))
        .collect()
}

/// All single-root forests on `nodes`; the root is the maximum.
pub fn enumerate_rooted_trees(nodes: &[Label]) -> Vec<Forest> {
    let s = sorted_unique(nodes);
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut father = vec![None; n];
    fn rec(i: usize, s: &[Label], father: &mut Vec<Option<usize>>, out: &mut Vec<Forest>) {
        let n = s.len();
        if i + 1 == n {
            out.push(Forest::from_ranks(s.to_vec(), father.clone()));
            return;
        }
        for p in (i + 1)..n {
            father[i] = Some(p);
            rec(i + 1, s, father, out);
        }
        father[i] = None;
    }
    rec(0, &s, &mut father, &mut out);
    out
}

/// `Trees(S)`: trees on `S ∪ {∘}`, necessarily rooted at `∘`.
pub fn enumerate_trees(s: &[u32]) -> Vec<Forest> {
    let mut nodes: Vec<Label> = s.iter().map(|&x| Label::Plain(x)).collect();
    nodes.push(Label::Root);
    enumerate_rooted_trees(&nodes)
}

/// The forests obtained by attaching `j` as a child of each node of `t` in
/// turn (increasing node order). `j` must be smaller than every node.
pub fn graft(t: &Forest, j: Label) -> Result<Vec<Forest>> {
    if let Some(&min) = t.labels.first() {
        if j >= min {
            return Err(Error::GraftLabel {
                label: j.to_string(),
                node: min.to_string(),
            });
        }
    }
    let mut labels = Vec::with_capacity(t.len() + 1);
    labels.push(j);
    labels.extend_from_slice(&t.labels);
    let shifted: Vec<Option<usize>> = t.father.iter().map(|f| f.map(|p| p + 1)).collect();
    Ok((0..t.len())
        .map(|node| {
            let mut father = Vec::with_capacity(t.len() + 1);
            father.push(Some(node + 1));
            father.extend_from_slice(&shifted);
            Forest::from_ranks(labels.clone(), father)
        })
        .collect())
}

/// The multiple covariant derivative `(prod_{j∈S} ∇_{ξ_j}) A` as a multiset
/// of trees: starting from `∘`, each label of `S` is grafted in decreasing
/// order onto every node. The result must be `Trees(S)`, each once.
pub fn expand_covariant(s: &[u32]) -> Result<BTreeMap<Forest, u64>> {
    let mut labels: Vec<u32> = s.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let mut state: BTreeMap<Forest, u64> = BTreeMap::from([(Forest::bare_root(), 1)]);
    for &j in labels.iter().rev() {
        let mut next = BTreeMap::new();
        for (t, mult) in &state {
            for u in graft(t, Label::Plain(j))? {
                *next.entry(u).or_insert(0) += mult;
            }
        }
        state = next;
    }
    if let Some((t, m)) = state.iter().find(|(_, &m)| m != 1) {
        return Err(mismatch(
            "expand_covariant",
            format!("tree {t} has multiplicity {m}"),
        ));
    }
    let expected = enumerate_trees(&labels);
    if expected.len() != state.len() || expected.iter().any(|t| !state.contains_key(t)) {
        return Err(mismatch(
            "expand_covariant",
            format!(
                "{} grafted trees against {} in Trees(S)",
                state.len(),
                expected.len()
            ),
        ));
    }
    Ok(state)
}

/// The forest monomial `X_F` with `p_ν = nchild(ν) + [ν is a root]` on every
/// label other than `∘`, the tree count `l_F`, and `nchild(∘)` (the power of
/// `B`; 0 when `∘` is absent).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub exponents: BTreeMap<Label, u32>,
    pub tree_count: usize,
    pub root_children: usize,
}

impl Monomial {
    /// Exponents in label order.
    pub fn exponent_vec(&self) -> Vec<u32> {
        self.exponents.values().copied().collect()
    }

    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    /// The exponents as a Dyck vector; `None` if they are not one.
    pub fn dyck_vector(&self) -> Option<DyckVector> {
        DyckVector::new(self.exponent_vec()).ok()
    }
}

pub fn monomial(f: &Forest) -> Monomial {
    let mut exponents = BTreeMap::new();
    let mut root_children = 0;
    for (i, &l) in f.labels.iter().enumerate() {
        let nchild = f.children[i].len() as u32;
        if l.is_root_symbol() {
            root_children = nchild as usize;
        } else {
            exponents.insert(l, nchild + u32::from(f.father[i].is_none()));
        }
    }
    Monomial {
        exponents,
        tree_count: f.tree_count(),
        root_children,
    }
}

/// `F'`: the children of `∘` are moved under the largest other label `k`,
/// which then becomes the new `∘`.
pub fn prune(f: &Forest) -> Result<Forest> {
    let root = f
        .rank(Label::Root)
        .ok_or_else(|| Error::InvalidForest("no ∘ node to prune".into()))?;
    if root == 0 {
        return Err(Error::PruneEmpty);
    }
    let top = root - 1;
    let mut labels = f.labels.clone();
    labels.remove(top);
    // ranks below `top` are unchanged; `top` and `∘` merge into rank `top`
    let father = (0..top)
        .map(|i| f.father[i].map(|p| if p >= top { top } else { p }))
        .chain(std::iter::once(None))
        .collect();
    Ok(Forest::from_ranks(labels, father))
}

/// `Forests_P`: forests on `[k] ∪ {∘}` with `X_F = X^P`, by filtering the
/// full enumeration.
pub fn fiber(p: &DyckVector) -> Vec<Forest> {
    let labels = labels_with_root(p.len() as u32);
    let n = labels.len();
    let want = p.entries();
    (0..forest_count(n))
        .into_par_iter()
        .map(|i| forest_from_index(&labels, i))
        .filter(|f| monomial(f).exponent_vec() == want)
        .collect()
}

fn combinations<T: Copy>(items: &[T], size: usize) -> Vec<Vec<T>> {
    fn rec<T: Copy>(
        items: &[T],
        size: usize,
        start: usize,
        cur: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= items.len() {
        rec(items, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Preimages of `h` (on `[k-1] ∪ {∘}`) under [`prune`] whose new label `k`
/// has exponent `p_k`, split by whether `k` is a root.
///
/// `∘` of `h` becomes `k`; a subset of its children stays with `k` and the
/// rest moves to the new `∘`. When `k` is a root it keeps `p_k - 1`
/// children, otherwise it is a child of `∘` and keeps `p_k`.
pub fn unprune(h: &Forest, k: u32, p_k: u32) -> (Vec<Forest>, Vec<Forest>) {
    let old_root = h.rank(Label::Root).expect("forest on [k-1] ∪ {∘}");
    let cands: Vec<usize> = h.children[old_root].clone();
    let mut labels = h.labels.clone();
    labels.insert(old_root, Label::Plain(k));
    let new_root = old_root + 1;
    let build = |keep: &[usize], k_is_root: bool| {
        let mut father: Vec<Option<usize>> = h.father.iter().take(old_root).copied().collect();
        for &c in &cands {
            father[c] = Some(if keep.contains(&c) {
                old_root
            } else {
                new_root
            });
        }
        father.push(if k_is_root { None } else { Some(new_root) });
        father.push(None);
        Forest::from_ranks(labels.clone(), father)
    };
    let rooted = if p_k >= 1 {
        combinations(&cands, p_k as usize - 1)
            .iter()
            .map(|keep| build(keep, true))
            .collect()
    } else {
        Vec::new()
    };
    let attached = combinations(&cands, p_k as usize)
        .iter()
        .map(|keep| build(keep, false))
        .collect();
    (rooted, attached)
}

/// `Forests_P` built label by label through [`unprune`]; sorted.
pub fn fiber_constructive(p: &DyckVector) -> Vec<Forest> {
    let mut level = vec![Forest::bare_root()];
    for (j, &pj) in p.entries().iter().enumerate() {
        level = level
            .iter()
            .flat_map(|h| {
                let (mut a, b) = unprune(h, j as u32 + 1, pj);
                a.extend(b);
                a
            })
            .collect();
    }
    level.sort();
    level
}

/// `C'_P = sum_{F ∈ Forests_P} 2^(l_F - 1)`.
pub fn cprime(p: &DyckVector) -> BigUint {
    fiber(p)
        .iter()
        .map(|f| BigUint::one() << (f.tree_count() - 1))
        .fold(BigUint::zero(), |a, b| a + b)
}

/// `μ ∪ F` on `S' + S`: the primed labels of `μ`'s domain hang below their
/// images, `F` is unchanged.
pub fn decorate(mu: &BTreeMap<Label, Label>, f: &Forest) -> Result<Forest> {
    let mut edges = f.edges();
    let mut labels = f.labels.clone();
    for (&src, &dst) in mu {
        if !matches!(src, Label::Primed(_)) {
            return Err(Error::InvalidForest(format!(
                "decoration label {src} is not primed"
            )));
        }
        if f.contains(src) {
            return Err(Error::InvalidForest(format!("{src} is already a node")));
        }
        if !f.contains(dst) {
            return Err(Error::DecorateCodomain(dst.to_string()));
        }
        labels.push(src);
        edges.push((src, dst));
    }
    Forest::new(labels, &edges)
}
