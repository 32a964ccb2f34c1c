//! Partition function form games.
//!
//! [`SymmetricGame`] is the working representation: worth indexed by the
//! coalition size and the shape of the outsiders' partition. [`GeneralGame`]
//! stores a worth for every (coalition, set partition) pair and exists to
//! cross-check the symmetric table on small player counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits;
use crate::partitions::{enumerate_set_partitions, enumerate_shapes, EmbeddedShape, SetPartition, Shape};
use crate::rational::{self, Rational};

/// Worth table of a symmetric partition function game on `n` players.
///
/// Construction validates that every embedded shape of `n` has exactly one
/// worth, so [`SymmetricGame::worth`] never misses.
pub struct SymmetricGame {
    n: usize,
    worths: BTreeMap<EmbeddedShape, Rational>,
    externalities: OnceLock<ExternalityReport>,
}

impl Clone for SymmetricGame {
    fn clone(&self) -> Self {
        SymmetricGame {
            n: self.n,
            worths: self.worths.clone(),
            externalities: self.externalities.clone(),
        }
    }
}

impl PartialEq for SymmetricGame {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.worths == other.worths
    }
}

impl Eq for SymmetricGame {}

impl fmt::Debug for SymmetricGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (k, v) in &self.worths {
            m.entry(&k.to_string(), &rational::format(v));
        }
        m.finish()
    }
}

/// Every (s, outsider shape) key of an `n`-player game, ordered by `s` then
/// descending-lex outsider shape.
pub fn embedded_shapes(n: usize) -> Result<Vec<EmbeddedShape>> {
    let mut out = Vec::new();
    for s in 1..=n {
        for outsiders in enumerate_shapes(n - s)? {
            out.push(EmbeddedShape { s, outsiders });
        }
    }
    Ok(out)
}

impl SymmetricGame {
    pub fn from_fn(n: usize, mut worth: impl FnMut(usize, &Shape) -> Rational) -> Result<SymmetricGame> {
        if n == 0 {
            return Err(Error::MalformedGame("a game needs at least one player".into()));
        }
        let worths = embedded_shapes(n)?
            .into_iter()
            .map(|e| {
                let v = worth(e.s, &e.outsiders);
                (e, v)
            })
            .collect();
        Ok(SymmetricGame::from_validated(n, worths))
    }

    /// Builds a game from explicit entries, rejecting duplicates, entries
    /// that do not add up to `n`, and missing embedded shapes.
    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = (usize, Shape, Rational)>,
    ) -> Result<SymmetricGame> {
        if n == 0 {
            return Err(Error::MalformedGame("a game needs at least one player".into()));
        }
        let mut worths = BTreeMap::new();
        for (s, outsiders, value) in entries {
            let key = EmbeddedShape::new(s, outsiders).map_err(|e| Error::MalformedGame(e.to_string()))?;
            if key.n() != n {
                return Err(Error::MalformedGame(format!(
                    "entry {key} covers {} players, expected {n}",
                    key.n()
                )));
            }
            if worths.contains_key(&key) {
                return Err(Error::MalformedGame(format!("duplicate entry {key}")));
            }
            worths.insert(key, value);
        }
        for key in embedded_shapes(n)? {
            if !worths.contains_key(&key) {
                return Err(Error::MalformedGame(format!("missing entry {key}")));
            }
        }
        Ok(SymmetricGame::from_validated(n, worths))
    }

    fn from_validated(n: usize, worths: BTreeMap<EmbeddedShape, Rational>) -> SymmetricGame {
        SymmetricGame {
            n,
            worths,
            externalities: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `V(S, π)` for `|S| = s` and outsiders partitioned as `outsiders`.
    ///
    /// Panics if `s + outsiders.k() != n`; the table itself is total.
    pub fn worth(&self, s: usize, outsiders: &Shape) -> &Rational {
        self.try_worth(s, outsiders).unwrap_or_else(|| {
            panic!(
                "no embedded shape (s={s}, outsiders={outsiders}) in a {}-player game",
                self.n
            )
        })
    }

    pub fn try_worth(&self, s: usize, outsiders: &Shape) -> Option<&Rational> {
        self.worths.get(&EmbeddedShape {
            s,
            outsiders: outsiders.clone(),
        })
    }

    /// Worth of the grand coalition, `V(N, {N})`.
    pub fn grand(&self) -> &Rational {
        self.worth(self.n, &Shape::empty())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EmbeddedShape, &Rational)> {
        self.worths.iter()
    }

    /// Every worth multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> SymmetricGame {
        SymmetricGame::from_validated(
            self.n,
            self.worths.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
        )
    }

    /// Same table with the grand coalition's worth replaced.
    pub fn with_grand(&self, grand: Rational) -> SymmetricGame {
        let mut worths = self.worths.clone();
        worths.insert(
            EmbeddedShape {
                s: self.n,
                outsiders: Shape::empty(),
            },
            grand,
        );
        SymmetricGame::from_validated(self.n, worths)
    }

    /// Cached [`classify_externalities`].
    pub fn externalities(&self) -> &ExternalityReport {
        self.externalities.get_or_init(|| classify_externalities(self))
    }

    pub fn to_file(&self) -> GameFile {
        GameFile {
            n: self.n,
            worths: self
                .worths
                .iter()
                .map(|(k, v)| WorthEntry {
                    s: k.s,
                    outsiders: k.outsiders.clone(),
                    value: v.clone(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: GameFile) -> Result<SymmetricGame> {
        SymmetricGame::from_entries(file.n, file.worths.into_iter().map(|e| (e.s, e.outsiders, e.value)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("game serializes")
    }

    pub fn from_json(text: &str) -> Result<SymmetricGame> {
        let file: GameFile = serde_json::from_str(text)?;
        SymmetricGame::from_file(file)
    }
}

/// On-disk game: `{ "n": 3, "worths": [ { "s": 1, "outsiders": [2], "value": "1/9" }, ... ] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    pub worths: Vec<WorthEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorthEntry {
    pub s: usize,
    pub outsiders: Shape,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

/// Full shapes of `n` with at least two parts, each paired with its
/// coalition total `Σ_{S∈π} V(S, π)`.
fn nontrivial_partition_totals(g: &SymmetricGame) -> Result<Vec<(Shape, Rational)>> {
    Ok(enumerate_shapes(g.n)?
        .into_iter()
        .filter(|full| full.num_parts() >= 2)
        .map(|full| {
            let total = full
                .parts()
                .iter()
                .map(|&a| g.worth(a, &full.without(a).expect("part present")))
                .fold(Rational::zero(), |acc, v| acc + v);
            (full, total)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionTotal {
    pub shape: Shape,
    #[serde(with = "rational::serde_str")]
    pub total: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfficiencyReport {
    pub efficient: bool,
    #[serde(with = "rational::serde_str")]
    pub grand: Rational,
    /// First shape (descending-lex) whose total is not strictly below the
    /// grand worth.
    pub violation: Option<PartitionTotal>,
    /// Some shape's total equals the grand worth exactly.
    pub tie: bool,
}

/// `V(N,{N}) > Σ_{S∈π} V(S,π)` for every partition `π ≠ {N}`.
pub fn is_efficient(g: &SymmetricGame) -> EfficiencyReport {
    let grand = g.grand().clone();
    let totals = nontrivial_partition_totals(g).expect("within shape cap");
    let tie = totals.iter().any(|(_, t)| *t == grand);
    let violation = totals
        .into_iter()
        .find(|(_, t)| *t >= grand)
        .map(|(shape, total)| PartitionTotal { shape, total });
    EfficiencyReport {
        efficient: violation.is_none(),
        grand,
        violation,
        tie,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExternalitySign {
    Positive,
    Negative,
    Mixed,
    None,
}

impl ExternalitySign {
    pub fn is_strict(self) -> bool {
        matches!(self, ExternalitySign::Positive | ExternalitySign::Negative)
    }
}

impl fmt::Display for ExternalitySign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExternalitySign::Positive => "positive",
            ExternalitySign::Negative => "negative",
            ExternalitySign::Mixed => "mixed",
            ExternalitySign::None => "none",
        };
        f.write_str(name)
    }
}

/// One merge comparison: outsiders `before` become `after` by merging the
/// parts `merged`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeWitness {
    pub s: usize,
    pub before: Shape,
    pub after: Shape,
    pub merged: (usize, usize),
    #[serde(with = "rational::serde_str")]
    pub worth_before: Rational,
    #[serde(with = "rational::serde_str")]
    pub worth_after: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExternalityReport {
    pub sign: ExternalitySign,
    pub comparisons: usize,
    pub increase: Option<MergeWitness>,
    pub decrease: Option<MergeWitness>,
    pub unchanged: Option<MergeWitness>,
}

/// Merge test on every embedded shape: replace two outsider parts by their
/// sum and compare the designated coalition's worth.
pub fn classify_externalities(g: &SymmetricGame) -> ExternalityReport {
    let mut report = ExternalityReport {
        sign: ExternalitySign::None,
        comparisons: 0,
        increase: None,
        decrease: None,
        unchanged: None,
    };
    for (key, before_worth) in g.entries() {
        for (merged, after) in key.outsiders.merges() {
            let after_worth = g.worth(key.s, &after);
            report.comparisons += 1;
            let slot = match after_worth.cmp(before_worth) {
                std::cmp::Ordering::Greater => &mut report.increase,
                std::cmp::Ordering::Less => &mut report.decrease,
                std::cmp::Ordering::Equal => &mut report.unchanged,
            };
            if slot.is_none() {
                *slot = Some(MergeWitness {
                    s: key.s,
                    before: key.outsiders.clone(),
                    after,
                    merged,
                    worth_before: before_worth.clone(),
                    worth_after: after_worth.clone(),
                });
            }
        }
    }
    report.sign = match (&report.increase, &report.decrease, &report.unchanged) {
        (Some(_), None, None) => ExternalitySign::Positive,
        (None, Some(_), None) => ExternalitySign::Negative,
        (None, None, _) => ExternalitySign::None,
        _ => ExternalitySign::Mixed,
    };
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YiWitness {
    pub shape: Shape,
    pub small: usize,
    pub large: usize,
    #[serde(with = "rational::serde_str")]
    pub small_per_member: Rational,
    #[serde(with = "rational::serde_str")]
    pub large_per_member: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YiReport {
    pub holds: bool,
    pub violation: Option<YiWitness>,
}

/// Per-member worth of a smaller coalition strictly exceeds that of a larger
/// one in every partition.
pub fn check_yi_p2(g: &SymmetricGame) -> YiReport {
    for full in enumerate_shapes(g.n).expect("within shape cap") {
        let distinct = full.distinct_parts();
        let per_member: Vec<(usize, Rational)> = distinct
            .iter()
            .map(|&a| {
                let w = g.worth(a, &full.without(a).expect("part present"));
                (a, w / rational::int(a as i64))
            })
            .collect();
        // distinct is descending; compare every smaller part with every larger.
        for (i, (large, large_pm)) in per_member.iter().enumerate() {
            for (small, small_pm) in &per_member[i + 1..] {
                if small_pm <= large_pm {
                    return YiReport {
                        holds: false,
                        violation: Some(YiWitness {
                            shape: full.clone(),
                            small: *small,
                            large: *large,
                            small_per_member: small_pm.clone(),
                            large_per_member: large_pm.clone(),
                        }),
                    };
                }
            }
        }
    }
    YiReport {
        holds: true,
        violation: None,
    }
}

/// Uncompressed partition function: a worth for every block of every set
/// partition of `{0..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralGame {
    n: usize,
    partitions: Vec<SetPartition>,
    index: HashMap<SetPartition, usize>,
    /// `worths[p][b]` is the worth of block `b` of partition `p`.
    worths: Vec<Vec<Rational>>,
}

impl GeneralGame {
    pub fn from_fn(n: usize, mut worth: impl FnMut(&SetPartition, usize) -> Rational) -> Result<GeneralGame> {
        limits::check("general game", n, limits::EXPAND_MAX_N)?;
        let partitions = enumerate_set_partitions(n)?;
        let worths = partitions
            .iter()
            .map(|p| (0..p.blocks().len()).map(|b| worth(p, b)).collect())
            .collect();
        let index = partitions.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(GeneralGame {
            n,
            partitions,
            index,
            worths,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partitions(&self) -> &[SetPartition] {
        &self.partitions
    }

    /// Worth of block `block` of the `partition`-th set partition.
    pub fn worth_at(&self, partition: usize, block: usize) -> &Rational {
        &self.worths[partition][block]
    }

    /// Worth of `coalition` inside `partition`, if the coalition is one of
    /// its blocks.
    pub fn worth(&self, coalition: &[usize], partition: &SetPartition) -> Option<&Rational> {
        let p = *self.index.get(partition)?;
        let mut sorted = coalition.to_vec();
        sorted.sort_unstable();
        let b = partition.blocks().iter().position(|blk| *blk == sorted)?;
        Some(&self.worths[p][b])
    }

    /// Number of (coalition, containing partition) entries.
    pub fn entry_count(&self) -> usize {
        self.worths.iter().map(Vec::len).sum()
    }

    pub fn set_worth(&mut self, partition: usize, block: usize, value: Rational) {
        self.worths[partition][block] = value;
    }
}

/// Lifts a symmetric table to every (coalition, set partition) pair.
pub fn expand(g: &SymmetricGame) -> Result<GeneralGame> {
    GeneralGame::from_fn(g.n, |p, b| g.worth(p.blocks()[b].len(), &p.outsider_shape(b)).clone())
}

/// Collapses a general game to its symmetric table, or reports two entries
/// with the same (size, outsider shape) and different worths.
pub fn compress(g: &GeneralGame) -> Result<SymmetricGame> {
    let mut seen: BTreeMap<EmbeddedShape, (usize, usize)> = BTreeMap::new();
    let describe = |p: usize, b: usize| {
        let part = &g.partitions[p];
        let members: Vec<String> = part.blocks()[b].iter().map(|i| (i + 1).to_string()).collect();
        format!(
            "V({{{}}}, {}) = {}",
            members.join(","),
            part,
            rational::format(&g.worths[p][b])
        )
    };
    for (p, part) in g.partitions.iter().enumerate() {
        for b in 0..part.blocks().len() {
            let key = EmbeddedShape {
                s: part.blocks()[b].len(),
                outsiders: part.outsider_shape(b),
            };
            match seen.get(&key) {
                Some(&(p0, b0)) if g.worths[p0][b0] != g.worths[p][b] => {
                    return Err(Error::SymmetryViolation {
                        first: describe(p0, b0),
                        second: describe(p, b),
                    });
                }
                Some(_) => {}
                None => {
                    seen.insert(key, (p, b));
                }
            }
        }
    }
    let worths = seen
        .into_iter()
        .map(|(k, (p, b))| (k, g.worths[p][b].clone()))
        .collect();
    Ok(SymmetricGame::from_validated(g.n, worths))
}

/// Games on a contiguous range of player counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameFamily {
    games: Vec<SymmetricGame>,
}

impl GameFamily {
    /// Games must be given in increasing, gap-free order of `n`.
    pub fn new(games: Vec<SymmetricGame>) -> Result<GameFamily> {
        if games.is_empty() {
            return Err(Error::InvalidArgument("empty game family".into()));
        }
        for w in games.windows(2) {
            if w[1].n() != w[0].n() + 1 {
                return Err(Error::InvalidArgument(format!(
                    "game family jumps from n = {} to n = {}",
                    w[0].n(),
                    w[1].n()
                )));
            }
        }
        Ok(GameFamily { games })
    }

    pub fn from_fn(
        range: std::ops::RangeInclusive<usize>,
        mut make: impl FnMut(usize) -> Result<SymmetricGame>,
    ) -> Result<GameFamily> {
        GameFamily::new(range.map(&mut make).collect::<Result<Vec<_>>>()?)
    }

    pub fn n_min(&self) -> usize {
        self.games[0].n()
    }

    pub fn n_max(&self) -> usize {
        self.games[self.games.len() - 1].n()
    }

    pub fn get(&self, n: usize) -> Option<&SymmetricGame> {
        n.checked_sub(self.n_min()).and_then(|i| self.games.get(i))
    }

    pub fn games(&self) -> &[SymmetricGame] {
        &self.games
    }

    /// First `n` with `V_n(N) > V_{n+1}(N)`, if any.
    pub fn grand_monotonicity_violation(&self) -> Option<usize> {
        self.games
            .windows(2)
            .find(|w| w[0].grand() > w[1].grand())
            .map(|w| w[0].n())
    }
}
