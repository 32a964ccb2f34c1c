//! The induced game `(N, V^h)`, blocking, and core membership.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::beliefs::{expected_worth, Belief};
use crate::error::{Error, Result};
use crate::game::SymmetricGame;
use crate::limits;
use crate::lp::{maximize, LpOutcome, StandardLp};
use crate::rational::{self, Rational};

/// Characteristic-function game of expected worths: `vh(s)` for every
/// proper coalition size and the grand coalition's worth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedGame {
    n: usize,
    #[serde(with = "rational::serde_vec_str")]
    vh: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    grand: Rational,
}

impl InducedGame {
    /// `vh[s - 1]` is the worth of size-`s` coalitions, `s = 1..n-1`.
    pub fn new(n: usize, vh: Vec<Rational>, grand: Rational) -> Result<InducedGame> {
        if n == 0 || vh.len() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "an induced game on {n} players needs {} coalition worths, got {}",
                n.saturating_sub(1),
                vh.len()
            )));
        }
        Ok(InducedGame { n, vh, grand })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vh(&self, s: usize) -> &Rational {
        &self.vh[s - 1]
    }

    pub fn grand(&self) -> &Rational {
        &self.grand
    }

    pub fn scaled(&self, factor: &Rational) -> InducedGame {
        InducedGame {
            n: self.n,
            vh: self.vh.iter().map(|v| v * factor).collect(),
            grand: &self.grand * factor,
        }
    }
}

/// `vh(s) = V^{h_{n,s}}(S)` for each size, `grand = V(N, {N})`.
pub fn induce(g: &SymmetricGame, beliefs: &BTreeMap<usize, Belief>) -> Result<InducedGame> {
    let n = g.n();
    let vh = (1..n)
        .map(|s| {
            let h = beliefs
                .get(&s)
                .ok_or_else(|| Error::InvalidArgument(format!("no belief for coalition size {s}")))?;
            if h.s() != s {
                return Err(Error::InvalidArgument(format!(
                    "belief keyed by size {s} is for size {}",
                    h.s()
                )));
            }
            expected_worth(g, h)
        })
        .collect::<Result<Vec<_>>>()?;
    InducedGame::new(n, vh, g.grand().clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Allocation(#[serde(with = "rational::serde_vec_str")] pub Vec<Rational>);

impl Allocation {
    pub fn payoffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn total(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn coalition_total(&self, members: impl IntoIterator<Item = usize>) -> Rational {
        members.into_iter().map(|i| &self.0[i]).sum()
    }
}

pub fn equal_split(ig: &InducedGame) -> Allocation {
    let share = &ig.grand / rational::int(ig.n as i64);
    Allocation(vec![share; ig.n])
}

/// Whether size-`s` coalitions object to `z`: `vh(s)` strictly exceeds the
/// `s` smallest payoffs.
pub fn blocks(ig: &InducedGame, s: usize, z: &Allocation) -> Result<bool> {
    if z.0.len() != ig.n || z.total() != ig.grand {
        return Err(Error::InvalidArgument(format!(
            "allocation of {} to {} players is not feasible for grand worth {}",
            rational::format(&z.total()),
            z.0.len(),
            rational::format(&ig.grand)
        )));
    }
    if s == 0 || s > ig.n {
        return Err(Error::InvalidArgument(format!("coalition size {s} out of range")));
    }
    if s == ig.n {
        return Ok(false);
    }
    let mut sorted = z.0.clone();
    sorted.sort();
    let weakest: Rational = sorted[..s].iter().sum();
    Ok(*ig.vh(s) > weakest)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualSplitReport {
    pub in_core: bool,
    /// Size with the largest excess `vh(s) − s·grand/n` when blocked.
    pub witness: Option<usize>,
    /// `s·grand/n − vh(s)` for `s = 1..n-1`.
    #[serde(with = "rational::serde_vec_str")]
    pub margins: Vec<Rational>,
}

/// `s·grand/n >= vh(s)` for every proper size.
pub fn equal_split_in_core(ig: &InducedGame) -> EqualSplitReport {
    let n = rational::int(ig.n as i64);
    let margins: Vec<Rational> = (1..ig.n)
        .map(|s| rational::int(s as i64) * &ig.grand / &n - ig.vh(s))
        .collect();
    let worst = margins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .filter(|(_, m)| m.is_negative())
        .map(|(i, _)| i + 1);
    EqualSplitReport {
        in_core: worst.is_none(),
        witness: worst,
        margins,
    }
}

/// Symmetric-game shortcut: the core is non-empty iff
/// `max_s vh(s)/s <= grand/n`.
pub fn symmetric_core_criterion(ig: &InducedGame) -> bool {
    let per_capita = &ig.grand / rational::int(ig.n as i64);
    (1..ig.n).all(|s| ig.vh(s) / rational::int(s as i64) <= per_capita)
}

/// A balancing weight on one coalition (players 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedCoalition {
    pub members: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreVerdict {
    pub nonempty: bool,
    pub certificate: Option<Allocation>,
    /// Balanced collection whose weighted worth exceeds the grand worth.
    pub blocking_witness: Option<Vec<WeightedCoalition>>,
    /// `min Σ z_i` over allocations no coalition blocks.
    #[serde(with = "rational::serde_str")]
    pub min_unblocked_total: Rational,
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// Decides core non-emptiness with the exact simplex.
///
/// Solves `max Σ_S vh(|S|)·y_S` over balancing weights (`Σ_{S∋i} y_S = 1`,
/// `y >= 0`, `S` ranging over proper coalitions). Its optimal multipliers
/// are the cheapest unblocked payoff vector `z`; the core is non-empty iff
/// `Σ z <= grand`, in which case the slack is shared equally.
pub fn core_nonempty_lp(ig: &InducedGame) -> Result<CoreVerdict> {
    let n = ig.n;
    limits::check("core LP", n, limits::LP_MAX_N)?;
    if n == 1 {
        return Ok(CoreVerdict {
            nonempty: true,
            certificate: Some(Allocation(vec![ig.grand.clone()])),
            blocking_witness: None,
            min_unblocked_total: Rational::zero(),
        });
    }
    let masks: Vec<u32> = (1..(1u32 << n) - 1).collect();
    let one = rational::one();
    let zero = Rational::zero();
    let a = (0..n)
        .map(|i| {
            masks
                .iter()
                .map(|m| if m & (1 << i) != 0 { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    let c = masks.iter().map(|m| ig.vh(m.count_ones() as usize).clone()).collect();
    let lp = StandardLp {
        a,
        b: vec![one.clone(); n],
        c,
    };
    let LpOutcome::Optimal { x, value, duals } = maximize(&lp) else {
        unreachable!("balancing weights are feasible (singletons) and bounded by 1");
    };

    if value <= ig.grand {
        let share = (&ig.grand - &value) / rational::int(n as i64);
        let z = duals.into_iter().map(|v| v + &share).collect();
        let cert = Allocation(z);
        for &m in &masks {
            assert!(
                cert.coalition_total(members(m, n)) >= *ig.vh(m.count_ones() as usize),
                "LP certificate violates coalition {m:b}"
            );
        }
        assert_eq!(cert.total(), ig.grand);
        Ok(CoreVerdict {
            nonempty: true,
            certificate: Some(cert),
            blocking_witness: None,
            min_unblocked_total: value,
        })
    } else {
        let witness = masks
            .iter()
            .zip(x)
            .filter(|(_, w)| !w.is_zero())
            .map(|(&m, weight)| WeightedCoalition {
                members: members(m, n),
                weight,
            })
            .collect();
        Ok(CoreVerdict {
            nonempty: false,
            certificate: None,
            blocking_witness: Some(witness),
            min_unblocked_total: value,
        })
    }
}
