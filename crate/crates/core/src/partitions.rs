//! Set partitions, integer partitions ("shapes") and the bridge between them.
//!
//! Set partitions are enumerated in restricted-growth-string order. Shapes are
//! multisets of block sizes stored in descending order, so each multiset has
//! exactly one representation and can key a lookup table.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits;

/// Integer partition of `k`, parts sorted descending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Shape(Vec<usize>);

impl Shape {
    /// Builds a shape from parts in any order. Zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Shape> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("shape {parts:?} has a zero part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Shape(parts))
    }

    pub fn empty() -> Shape {
        Shape(Vec::new())
    }

    /// `m` parts of size one.
    pub fn singletons(m: usize) -> Shape {
        Shape(vec![1; m])
    }

    /// One part of size `k`, or the empty shape when `k = 0`.
    pub fn single_block(k: usize) -> Shape {
        if k == 0 {
            Shape::empty()
        } else {
            Shape(vec![k])
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn num_parts(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part value → multiplicity.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Distinct part values, descending.
    pub fn distinct_parts(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.dedup();
        v
    }

    /// The shape with one occurrence of `part` removed.
    pub fn without(&self, part: usize) -> Option<Shape> {
        let idx = self.0.iter().position(|&p| p == part)?;
        let mut parts = self.0.clone();
        parts.remove(idx);
        Some(Shape(parts))
    }

    /// The shape with `part` added.
    pub fn with(&self, part: usize) -> Shape {
        let mut parts = self.0.clone();
        let idx = parts.partition_point(|&p| p >= part);
        parts.insert(idx, part);
        Shape(parts)
    }

    /// Replaces the parts at positions `i` and `j` by their sum.
    pub fn merge(&self, i: usize, j: usize) -> Shape {
        assert!(i != j && i < self.0.len() && j < self.0.len());
        let merged = self.0[i] + self.0[j];
        let mut parts: Vec<usize> = self
            .0
            .iter()
            .enumerate()
            .filter(|&(idx, _)| idx != i && idx != j)
            .map(|(_, &p)| p)
            .collect();
        let idx = parts.partition_point(|&p| p >= merged);
        parts.insert(idx, merged);
        Shape(parts)
    }

    /// All shapes reachable by one merge of two parts, with the merged
    /// part values. Pairs of equal values are listed once.
    pub fn merges(&self) -> Vec<((usize, usize), Shape)> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            for j in (i + 1)..self.0.len() {
                let pair = (self.0[i], self.0[j]);
                if seen.insert(pair) {
                    out.push((pair, self.merge(i, j)));
                }
            }
        }
        out
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<usize>::deserialize(d)?;
        Shape::new(parts).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// A coalition of size `s` together with the shape of the outsiders'
/// partition: the symmetric stand-in for a pair `(S, π)` with `S ∈ π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddedShape {
    pub s: usize,
    pub outsiders: Shape,
}

impl EmbeddedShape {
    pub fn new(s: usize, outsiders: Shape) -> Result<EmbeddedShape> {
        if s == 0 {
            return Err(Error::InvalidArgument("coalition size must be at least 1".into()));
        }
        Ok(EmbeddedShape { s, outsiders })
    }

    pub fn n(&self) -> usize {
        self.s + self.outsiders.k()
    }

    /// The full shape of the partition the coalition sits in.
    pub fn full_shape(&self) -> Shape {
        self.outsiders.with(self.s)
    }
}

impl fmt::Display for EmbeddedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s={}, outsiders={})", self.s, self.outsiders)
    }
}

/// A partition of `{0..n}` into non-empty blocks, blocks sorted by least
/// element and each block sorted ascending. Displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates and canonicalizes arbitrary blocks over `{0..n}`.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<SetPartition> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            for &i in b {
                if i >= n || seen[i] {
                    return Err(Error::InvalidArgument(format!(
                        "element {} out of range or repeated",
                        i + 1
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("blocks do not cover the player set".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// Builds the partition encoded by a restricted growth string.
    fn from_rgs(rgs: &[usize]) -> SetPartition {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &b) in rgs.iter().enumerate() {
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(i);
        }
        SetPartition { n: rgs.len(), blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Index of the block containing `player`.
    pub fn block_of(&self, player: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&player).is_ok())
    }

    /// Multiset of block sizes.
    pub fn shape(&self) -> Shape {
        shape_of(self)
    }

    /// Shape of the blocks other than block `idx`.
    pub fn outsider_shape(&self, idx: usize) -> Shape {
        let parts = self
            .blocks
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, b)| b.len())
            .collect();
        Shape::new(parts).expect("blocks are non-empty")
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, p) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// All set partitions of an `n`-element set in restricted-growth-string order.
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    limits::check("set partition enumeration", n, limits::SET_PARTITION_MAX_N)?;
    let mut out = Vec::new();
    // rgs[i] <= 1 + max(rgs[..i]); maxes[i] caches max(rgs[..=i]).
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        out.push(SetPartition::from_rgs(&rgs));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                maxes[i] = maxes[i - 1].max(rgs[i]);
                for j in (i + 1)..n {
                    rgs[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// All integer partitions of `k` in descending lexicographic order.
pub fn enumerate_shapes(k: usize) -> Result<Vec<Shape>> {
    limits::check("shape enumeration", k, limits::SHAPE_MAX_K)?;
    if k == 0 {
        return Ok(vec![Shape::empty()]);
    }
    let mut out = Vec::new();
    let mut parts = vec![k];
    loop {
        out.push(Shape(parts.clone()));
        // Rightmost part larger than one.
        let Some(idx) = parts.iter().rposition(|&p| p > 1) else {
            return Ok(out);
        };
        let ones = parts.len() - idx - 1;
        let top = parts[idx] - 1;
        parts.truncate(idx);
        let mut rest = ones + top + 1;
        while rest > 0 {
            let p = top.min(rest);
            parts.push(p);
            rest -= p;
        }
    }
}

pub fn shape_of(p: &SetPartition) -> Shape {
    Shape::new(p.blocks.iter().map(Vec::len).collect()).expect("blocks are non-empty")
}

/// Number of set partitions of a `k`-set with the given shape:
/// `k! / (∏ parts! · ∏ multiplicities!)`.
pub fn shape_multiplicity(sh: &Shape) -> BigUint {
    let fact = |m: usize| -> BigUint { (1..=m).fold(BigUint::one(), |acc, i| acc * i) };
    let mut den = BigUint::one();
    for &p in sh.parts() {
        den *= fact(p);
    }
    for &m in sh.multiplicities().values() {
        den *= fact(m);
    }
    fact(sh.k()) / den
}

/// Shapes the outsiders of a size-`s` coalition can form among `n` players.
pub fn outsider_shapes(n: usize, s: usize) -> Result<Vec<Shape>> {
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "coalition size {s} must lie in 1..={n}"
        )));
    }
    enumerate_shapes(n - s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(parts: &[usize]) -> Shape {
        Shape::new(parts.to_vec()).unwrap()
    }

    fn bell_triangle(max: usize) -> Vec<u64> {
        let mut bells = vec![1u64];
        let mut row = vec![1u64];
        for _ in 0..max {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            bells.push(next[0]);
            row = next;
        }
        bells
    }

    fn partition_numbers(max: usize) -> Vec<u64> {
        // p(k) by the "parts at most j" recurrence.
        let mut p = vec![0u64; max + 1];
        p[0] = 1;
        for part in 1..=max {
            for total in part..=max {
                p[total] += p[total - part];
            }
        }
        p
    }

    #[test]
    fn single_player_partition() {
        let ps = enumerate_set_partitions(1).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].to_string(), "{{1}}");
    }

    #[test]
    fn three_players_in_rgs_order() {
        let ps: Vec<String> = enumerate_set_partitions(3)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            ps,
            [
                "{{1,2,3}}",
                "{{1,2},{3}}",
                "{{1,3},{2}}",
                "{{1},{2,3}}",
                "{{1},{2},{3}}"
            ]
        );
    }

    #[test]
    fn counts_match_bell_triangle() {
        let bells = bell_triangle(10);
        for n in 1..=10 {
            assert_eq!(enumerate_set_partitions(n).unwrap().len() as u64, bells[n], "n={n}");
        }
        assert_eq!(enumerate_set_partitions(8).unwrap().len(), 4140);
    }

    #[test]
    fn enumeration_has_no_duplicates_and_is_canonical() {
        let ps = enumerate_set_partitions(6).unwrap();
        let set: std::collections::HashSet<_> = ps.iter().cloned().collect();
        assert_eq!(set.len(), ps.len());
        for p in &ps {
            let again = SetPartition::from_blocks(6, p.blocks().to_vec()).unwrap();
            assert_eq!(&again, p);
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        assert_eq!(
            enumerate_set_partitions(7).unwrap(),
            enumerate_set_partitions(7).unwrap()
        );
        assert_eq!(enumerate_shapes(15).unwrap(), enumerate_shapes(15).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_set_partitions(13),
            Err(Error::SizeLimit { requested: 13, .. })
        ));
        assert!(enumerate_shapes(41).is_err());
    }

    #[test]
    fn shapes_of_small_k() {
        assert_eq!(enumerate_shapes(0).unwrap(), vec![Shape::empty()]);
        assert_eq!(
            enumerate_shapes(4).unwrap(),
            vec![sh(&[4]), sh(&[3, 1]), sh(&[2, 2]), sh(&[2, 1, 1]), sh(&[1, 1, 1, 1])]
        );
        let p = partition_numbers(30);
        for k in 0..=30 {
            assert_eq!(enumerate_shapes(k).unwrap().len() as u64, p[k], "k={k}");
        }
        assert_eq!(enumerate_shapes(10).unwrap().len(), 42);
    }

    #[test]
    fn shapes_are_strictly_descending_lex() {
        let shapes = enumerate_shapes(12).unwrap();
        for w in shapes.windows(2) {
            assert!(w[0] > w[1], "{} !> {}", w[0], w[1]);
        }
    }

    #[test]
    fn shape_of_examples() {
        let p = |blocks: Vec<Vec<usize>>, n| SetPartition::from_blocks(n, blocks).unwrap();
        assert_eq!(shape_of(&p(vec![vec![0, 1], vec![2]], 3)), sh(&[2, 1]));
        assert_eq!(shape_of(&p(vec![vec![0], vec![1], vec![2]], 3)), sh(&[1, 1, 1]));
        assert_eq!(shape_of(&p(vec![vec![0, 3], vec![1, 4], vec![2]], 5)), sh(&[2, 2, 1]));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(shape_multiplicity(&sh(&[2, 1])), BigUint::from(3u32));
        assert_eq!(shape_multiplicity(&sh(&[1, 1, 1])), BigUint::from(1u32));
        assert_eq!(shape_multiplicity(&sh(&[2, 2])), BigUint::from(3u32));
        assert_eq!(shape_multiplicity(&Shape::empty()), BigUint::from(1u32));
    }

    #[test]
    fn multiplicities_sum_to_bell() {
        let bells = bell_triangle(8);
        for k in 0..=8 {
            let total: BigUint = enumerate_shapes(k).unwrap().iter().map(shape_multiplicity).sum();
            assert_eq!(total, BigUint::from(bells[k]), "k={k}");
        }
    }

    #[test]
    fn grouping_by_shape_reproduces_multiplicity() {
        for k in 1..=8 {
            let mut counts: BTreeMap<Shape, u64> = BTreeMap::new();
            for p in enumerate_set_partitions(k).unwrap() {
                *counts.entry(shape_of(&p)).or_default() += 1;
            }
            for sh in enumerate_shapes(k).unwrap() {
                assert_eq!(BigUint::from(counts[&sh]), shape_multiplicity(&sh), "{sh}");
            }
        }
    }

    #[test]
    fn outsider_shapes_examples() {
        assert_eq!(outsider_shapes(3, 1).unwrap(), vec![sh(&[2]), sh(&[1, 1])]);
        assert_eq!(outsider_shapes(3, 3).unwrap(), vec![Shape::empty()]);
        assert_eq!(outsider_shapes(6, 2).unwrap().len(), 5);
        assert!(outsider_shapes(3, 4).is_err());
        assert!(outsider_shapes(3, 0).is_err());
    }

    #[test]
    fn shape_editing() {
        let s = sh(&[3, 2, 2, 1]);
        assert_eq!(s.without(2).unwrap(), sh(&[3, 2, 1]));
        assert!(s.without(4).is_none());
        assert_eq!(s.with(2), sh(&[3, 2, 2, 2, 1]));
        assert_eq!(s.merge(1, 3), sh(&[3, 3, 2]));
        let merges: Vec<_> = s.merges().into_iter().map(|(pair, _)| pair).collect();
        assert_eq!(merges, vec![(3, 2), (3, 1), (2, 2), (2, 1)]);
        assert!(Shape::new(vec![1, 0]).is_err());
    }

    #[test]
    fn shapes_serialize_as_descending_arrays() {
        assert_eq!(serde_json::to_string(&sh(&[1, 2])).unwrap(), "[2,1]");
        let back: Shape = serde_json::from_str("[1,3,1]").unwrap();
        assert_eq!(back, sh(&[3, 1, 1]));
        assert!(serde_json::from_str::<Shape>("[0]").is_err());
    }

    #[test]
    fn from_blocks_rejects_invalid() {
        assert!(SetPartition::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(SetPartition::from_blocks(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(SetPartition::from_blocks(2, vec![vec![0, 1], vec![]]).is_err());
    }
}
