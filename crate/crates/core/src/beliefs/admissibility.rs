//! Conditions tying a coalition's beliefs at `n` players to its beliefs at
//! `n + 1` players, and the regime analysis behind them.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{delta_value, expected_worth, gamma_value, interval_for_sign, Belief, BeliefFamily, Interval};
use crate::error::{Error, Result};
use crate::game::{ExternalitySign, GameFamily, SymmetricGame};
use crate::rational::{self, Rational};

fn step_factor(n: usize) -> Rational {
    rational::ratio(n as i64, n as i64 + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tilde {
    /// `λ·(favorable point mass) + (1 − λ)·(unfavorable point mass)`.
    Mixture {
        #[serde(with = "rational::serde_str")]
        lambda: Rational,
        #[serde(skip)]
        belief: Belief,
    },
    /// The target exceeds every achievable value: any belief satisfies the step.
    Automatic,
    /// The target is below every achievable value: no belief satisfies the step.
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TildeConstruction {
    /// `n/(n+1)·V^{h_n}(S)`
    #[serde(with = "rational::serde_str")]
    pub target: Rational,
    pub interval: Interval,
    pub tilde: Tilde,
}

/// Builds a belief at `g_next.n()` players whose expected worth equals
/// `n/(n+1)` times `h_n_value`, where `n = g_next.n() − 1`.
pub fn construct_tilde(g_next: &SymmetricGame, h_n_value: &Rational, s: usize) -> Result<TildeConstruction> {
    let n_next = g_next.n();
    if n_next < 2 || s >= n_next {
        return Err(Error::InvalidArgument(format!(
            "coalition size {s} has no outsiders at n = {n_next}"
        )));
    }
    let interval = interval_for_sign(g_next, s, g_next.externalities().sign)?;
    let target = step_factor(n_next - 1) * h_n_value;
    let tilde = if target > interval.hi {
        Tilde::Automatic
    } else if target < interval.lo {
        Tilde::Infeasible
    } else {
        let fav = Belief::point_mass(n_next, s, interval.hi_shape.clone())?;
        let unfav = Belief::point_mass(n_next, s, interval.lo_shape.clone())?;
        let width = &interval.hi - &interval.lo;
        let lambda = if width.is_zero() {
            Rational::one()
        } else {
            (&target - &interval.lo) / width
        };
        let belief = fav.mix(&lambda, &unfav)?;
        Tilde::Mixture { lambda, belief }
    };
    Ok(TildeConstruction {
        target,
        interval,
        tilde,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepCheck {
    pub holds: bool,
    /// `n·V^{h_n}(S) − (n+1)·V^{h_{n+1}}(S)`; the step holds iff this is `>= 0`.
    #[serde(with = "rational::serde_str")]
    pub margin: Rational,
}

fn check_consecutive(g_n: &SymmetricGame, g_next: &SymmetricGame) -> Result<()> {
    if g_next.n() != g_n.n() + 1 {
        return Err(Error::InvalidArgument(format!(
            "games with n = {} and n = {} are not consecutive",
            g_n.n(),
            g_next.n()
        )));
    }
    Ok(())
}

/// `(n+1)·V^{h_{n+1}}(S) ≤ n·V^{h_n}(S)`.
pub fn admissible_step_check(
    g_n: &SymmetricGame,
    g_next: &SymmetricGame,
    h_n: &Belief,
    h_next: &Belief,
) -> Result<StepCheck> {
    check_consecutive(g_n, g_next)?;
    if h_n.s() != h_next.s() {
        return Err(Error::InvalidArgument(format!(
            "beliefs for coalition sizes {} and {}",
            h_n.s(),
            h_next.s()
        )));
    }
    let n = rational::int(g_n.n() as i64);
    let margin = &n * expected_worth(g_n, h_n)? - (&n + Rational::one()) * expected_worth(g_next, h_next)?;
    Ok(StepCheck {
        holds: !margin.is_negative(),
        margin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RSetCheck {
    pub holds: bool,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    #[serde(with = "rational::serde_str")]
    pub gamma_next: Rational,
}

/// `V^{h_n}(S) ≥ V^{γ_{n+1}}(S)`.
pub fn r_set_check(g_n: &SymmetricGame, g_next: &SymmetricGame, h_n: &Belief) -> Result<RSetCheck> {
    check_consecutive(g_n, g_next)?;
    let value = expected_worth(g_n, h_n)?;
    let gamma_next = gamma_value(g_next, h_n.s()).clone();
    Ok(RSetCheck {
        holds: value >= gamma_next,
        value,
        gamma_next,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PropRegime {
    /// `V^{γ_{n+1}} ≤ n/(n+1)·V^{γ_n}`
    Prop1,
    /// `V^{γ_{n+1}} > n/(n+1)·V^{γ_n}`
    Prop2,
}

/// Position of `V^{δ_{n+1}}` against the scaled `n`-level bounds
/// `n/(n+1)·V^{γ_n}` and `n/(n+1)·V^{δ_n}`. Under positive externalities the
/// lowest position only occurs in the `Prop1` regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseLabel {
    /// At most the scaled γ bound: the step holds for every belief.
    BelowScaledGamma,
    /// Above the scaled γ bound, at most the scaled δ bound.
    BetweenScaledBounds,
    /// Above the scaled δ bound.
    AboveScaledDelta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeBounds {
    #[serde(with = "rational::serde_str")]
    pub gamma_next: Rational,
    #[serde(with = "rational::serde_str")]
    pub delta_next: Rational,
    #[serde(with = "rational::serde_str")]
    pub scaled_gamma: Rational,
    #[serde(with = "rational::serde_str")]
    pub scaled_delta: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeReport {
    pub n: usize,
    pub s: usize,
    pub regime: PropRegime,
    pub case: CaseLabel,
    pub bounds: RegimeBounds,
}

pub fn classify_bounds(b: &RegimeBounds) -> (PropRegime, CaseLabel) {
    let regime = if b.gamma_next <= b.scaled_gamma {
        PropRegime::Prop1
    } else {
        PropRegime::Prop2
    };
    let case = if b.delta_next <= b.scaled_gamma {
        CaseLabel::BelowScaledGamma
    } else if b.delta_next <= b.scaled_delta {
        CaseLabel::BetweenScaledBounds
    } else {
        CaseLabel::AboveScaledDelta
    };
    (regime, case)
}

/// Regime and case of the step `n → n+1` for size-`s` coalitions in a
/// positive-externality family.
pub fn regime_classify(g_n: &SymmetricGame, g_next: &SymmetricGame, s: usize) -> Result<RegimeReport> {
    check_consecutive(g_n, g_next)?;
    for g in [g_n, g_next] {
        let sign = g.externalities().sign;
        if sign != ExternalitySign::Positive {
            return Err(Error::UnsupportedSign(sign));
        }
    }
    if s == 0 || s >= g_n.n() {
        return Err(Error::InvalidArgument(format!(
            "coalition size {s} has no outsiders at n = {}",
            g_n.n()
        )));
    }
    let factor = step_factor(g_n.n());
    let bounds = RegimeBounds {
        gamma_next: gamma_value(g_next, s).clone(),
        delta_next: delta_value(g_next, s).clone(),
        scaled_gamma: &factor * gamma_value(g_n, s),
        scaled_delta: &factor * delta_value(g_n, s),
    };
    let (regime, case) = classify_bounds(&bounds);
    Ok(RegimeReport {
        n: g_n.n(),
        s,
        regime,
        case,
        bounds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMode {
    Admissible,
    RAdmissible,
    NegativeMirror,
}

impl AdmissibilityMode {
    pub fn required_sign(self) -> ExternalitySign {
        match self {
            AdmissibilityMode::NegativeMirror => ExternalitySign::Negative,
            _ => ExternalitySign::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepVerdict {
    /// The step runs from `n` to `n + 1`.
    pub n: usize,
    pub step: StepCheck,
    pub r_set: Option<RSetCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCheckReport {
    pub s: usize,
    pub mode: AdmissibilityMode,
    pub admissible: bool,
    pub steps: Vec<StepVerdict>,
}

/// Checks every consecutive pair of a belief family; the first level is
/// unconstrained.
pub fn admissible_family_check(f: &GameFamily, b: &BeliefFamily, mode: AdmissibilityMode) -> Result<FamilyCheckReport> {
    if b.n_min() < f.n_min() || b.n_max() > f.n_max() {
        return Err(Error::InvalidArgument(format!(
            "belief family spans n = {}..={} but the games cover n = {}..={}",
            b.n_min(),
            b.n_max(),
            f.n_min(),
            f.n_max()
        )));
    }
    let mut steps = Vec::new();
    for pair in b.entries().windows(2) {
        let (h_n, h_next) = (&pair[0], &pair[1]);
        let g_n = f.get(h_n.n()).expect("range checked");
        let g_next = f.get(h_next.n()).expect("range checked");
        let step = admissible_step_check(g_n, g_next, h_n, h_next)?;
        let r_set = match mode {
            AdmissibilityMode::RAdmissible => Some(r_set_check(g_n, g_next, h_n)?),
            _ => None,
        };
        let passed = step.holds && r_set.as_ref().is_none_or(|r| r.holds);
        steps.push(StepVerdict {
            n: h_n.n(),
            step,
            r_set,
            passed,
        });
    }
    Ok(FamilyCheckReport {
        s: b.s(),
        mode,
        admissible: steps.iter().all(|v| v.passed),
        steps,
    })
}

/// Which values of `h_{3,S}(1)`, the probability that the two outsiders of a
/// singleton merge, keep the singleton from blocking the equal split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "bound", rename_all = "kebab-case")]
pub enum SingletonThreshold {
    AnyBelief,
    AtMost(#[serde(with = "rational::serde_str")] Rational),
    AtLeast(#[serde(with = "rational::serde_str")] Rational),
    /// No belief keeps the singleton from blocking.
    Unattainable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseCase {
    /// `V(N)/3`
    #[serde(with = "rational::serde_str")]
    pub share: Rational,
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub threshold: SingletonThreshold,
}

/// Base case of the induction for a singleton coalition at `n = 3`.
/// `V^h = p·V^δ + (1 − p)·V^γ` must not exceed `V(N)/3`.
pub fn singleton_threshold(g: &SymmetricGame) -> Result<BaseCase> {
    if g.n() != 3 {
        return Err(Error::InvalidArgument(format!(
            "the singleton threshold is defined for 3-player games, got n = {}",
            g.n()
        )));
    }
    let share = g.grand() / rational::int(3);
    let gamma = gamma_value(g, 1).clone();
    let delta = delta_value(g, 1).clone();
    let threshold = match delta.cmp(&gamma) {
        Ordering::Greater if delta <= share => SingletonThreshold::AnyBelief,
        Ordering::Greater if gamma > share => SingletonThreshold::Unattainable,
        Ordering::Greater => SingletonThreshold::AtMost((&share - &gamma) / (&delta - &gamma)),
        Ordering::Less if gamma <= share => SingletonThreshold::AnyBelief,
        Ordering::Less if delta > share => SingletonThreshold::Unattainable,
        Ordering::Less => SingletonThreshold::AtLeast((&gamma - &share) / (&gamma - &delta)),
        Ordering::Equal if gamma <= share => SingletonThreshold::AnyBelief,
        Ordering::Equal => SingletonThreshold::Unattainable,
    };
    Ok(BaseCase {
        share,
        gamma,
        delta,
        threshold,
    })
}

impl SingletonThreshold {
    /// Whether a merge probability `p` keeps the singleton unblocked.
    pub fn admits(&self, p: &Rational) -> bool {
        match self {
            SingletonThreshold::AnyBelief => true,
            SingletonThreshold::AtMost(b) => p <= b,
            SingletonThreshold::AtLeast(b) => p >= b,
            SingletonThreshold::Unattainable => false,
        }
    }
}
