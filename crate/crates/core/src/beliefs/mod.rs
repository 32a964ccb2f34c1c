//! Probabilistic beliefs of a coalition about how the outsiders organize.
//!
//! Under symmetry a belief `h_{n,S}` only depends on `(n, |S|)` and is a
//! distribution over outsider shapes. [`expected_worth`] turns it into the
//! worth `V^h(S)` of the induced characteristic-function game.

mod admissibility;
mod sampler;

pub use admissibility::{
    admissible_family_check, admissible_step_check, classify_bounds, construct_tilde, r_set_check, regime_classify,
    singleton_threshold, AdmissibilityMode, BaseCase, CaseLabel, FamilyCheckReport, PropRegime, RSetCheck,
    RegimeBounds, RegimeReport, SingletonThreshold, StepCheck, StepVerdict, Tilde, TildeConstruction,
};
pub use sampler::{sample_admissible_family, sample_admissible_family_with, SamplerOptions};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ExternalitySign, SymmetricGame};
use crate::partitions::Shape;
use crate::rational::{self, Rational};

/// Distribution over outsider shapes for a size-`s` coalition among `n`
/// players. Zero-probability shapes are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Belief {
    n: usize,
    s: usize,
    probs: BTreeMap<Shape, Rational>,
}

impl Belief {
    pub fn new(n: usize, s: usize, probs: impl IntoIterator<Item = (Shape, Rational)>) -> Result<Belief> {
        if s == 0 || s > n {
            return Err(Error::InvalidBelief(format!("coalition size {s} must lie in 1..={n}")));
        }
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (shape, p) in probs {
            if shape.k() != n - s {
                return Err(Error::InvalidBelief(format!(
                    "shape {shape} does not partition the {} outsiders",
                    n - s
                )));
            }
            if p.is_negative() {
                return Err(Error::InvalidBelief(format!(
                    "negative probability {} on {shape}",
                    rational::format(&p)
                )));
            }
            total += &p;
            if map.insert(shape.clone(), p).is_some() {
                return Err(Error::InvalidBelief(format!("shape {shape} listed twice")));
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidBelief(format!(
                "probabilities sum to {}, not 1",
                rational::format(&total)
            )));
        }
        map.retain(|_, p| !p.is_zero());
        Ok(Belief { n, s, probs: map })
    }

    pub fn point_mass(n: usize, s: usize, shape: Shape) -> Result<Belief> {
        Belief::new(n, s, [(shape, Rational::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn prob(&self, shape: &Shape) -> Rational {
        self.probs.get(shape).cloned().unwrap_or_else(Rational::zero)
    }

    /// Shapes with positive probability.
    pub fn support(&self) -> impl Iterator<Item = (&Shape, &Rational)> {
        self.probs.iter()
    }

    /// `weight·self + (1 − weight)·other`.
    pub fn mix(&self, weight: &Rational, other: &Belief) -> Result<Belief> {
        if (self.n, self.s) != (other.n, other.s) {
            return Err(Error::InvalidArgument("mixing beliefs of different (n, s)".into()));
        }
        if weight.is_negative() || *weight > Rational::one() {
            return Err(Error::InvalidArgument("mixture weight outside [0, 1]".into()));
        }
        let rest = Rational::one() - weight;
        let mut probs: BTreeMap<Shape, Rational> = BTreeMap::new();
        for (sh, p) in &self.probs {
            *probs.entry(sh.clone()).or_insert_with(Rational::zero) += p * weight;
        }
        for (sh, p) in &other.probs {
            *probs.entry(sh.clone()).or_insert_with(Rational::zero) += p * &rest;
        }
        Belief::new(self.n, self.s, probs)
    }

    pub fn to_file(&self) -> BeliefFile {
        BeliefFile {
            n: self.n,
            s: self.s,
            probs: self
                .probs
                .iter()
                .map(|(sh, p)| ProbEntry {
                    outsiders: sh.clone(),
                    p: p.clone(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: BeliefFile) -> Result<Belief> {
        Belief::new(file.n, file.s, file.probs.into_iter().map(|e| (e.outsiders, e.p)))
    }
}

/// `{ "n": 4, "s": 1, "probs": [ { "outsiders": [3], "p": "99/1024" }, ... ] }`
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefFile {
    pub n: usize,
    pub s: usize,
    pub probs: Vec<ProbEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbEntry {
    pub outsiders: Shape,
    #[serde(with = "rational::serde_str")]
    pub p: Rational,
}

/// γ-conjecture: the outsiders stay singletons.
pub fn gamma_belief(n: usize, s: usize) -> Result<Belief> {
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "coalition size {s} must lie in 1..={n}"
        )));
    }
    Belief::point_mass(n, s, Shape::singletons(n - s))
}

/// δ-conjecture: the outsiders form one coalition.
pub fn delta_belief(n: usize, s: usize) -> Result<Belief> {
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "coalition size {s} must lie in 1..={n}"
        )));
    }
    Belief::point_mass(n, s, Shape::single_block(n - s))
}

/// `V^h(S) = Σ_π h(π)·V(S, π)`.
pub fn expected_worth(g: &SymmetricGame, h: &Belief) -> Result<Rational> {
    if g.n() != h.n {
        return Err(Error::InvalidArgument(format!(
            "belief for n = {} used with a {}-player game",
            h.n,
            g.n()
        )));
    }
    Ok(h.probs
        .iter()
        .map(|(sh, p)| p * g.worth(h.s, sh))
        .fold(Rational::zero(), |acc, v| acc + v))
}

pub fn gamma_value(g: &SymmetricGame, s: usize) -> &Rational {
    g.worth(s, &Shape::singletons(g.n() - s))
}

pub fn delta_value(g: &SymmetricGame, s: usize) -> &Rational {
    g.worth(s, &Shape::single_block(g.n() - s))
}

/// Range of `V^h(S)` over all beliefs, with the point masses attaining the
/// ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    /// Least favorable outsider shape (attains `lo`).
    pub lo_shape: Shape,
    /// Most favorable outsider shape (attains `hi`).
    pub hi_shape: Shape,
}

impl Interval {
    pub fn contains(&self, v: &Rational) -> bool {
        *v >= self.lo && *v <= self.hi
    }
}

/// `[V^γ, V^δ]` under positive externalities, `[V^δ, V^γ]` under negative.
pub fn achievable_interval(g: &SymmetricGame, s: usize) -> Result<Interval> {
    interval_for_sign(g, s, g.externalities().sign)
}

pub(crate) fn interval_for_sign(g: &SymmetricGame, s: usize, sign: ExternalitySign) -> Result<Interval> {
    if s == 0 || s > g.n() {
        return Err(Error::InvalidArgument(format!(
            "coalition size {s} must lie in 1..={}",
            g.n()
        )));
    }
    let gamma = (Shape::singletons(g.n() - s), gamma_value(g, s).clone());
    let delta = (Shape::single_block(g.n() - s), delta_value(g, s).clone());
    let (lo, hi) = match sign {
        ExternalitySign::Positive => (gamma, delta),
        ExternalitySign::Negative => (delta, gamma),
        other => return Err(Error::UnsupportedSign(other)),
    };
    Ok(Interval {
        lo: lo.1,
        hi: hi.1,
        lo_shape: lo.0,
        hi_shape: hi.0,
    })
}

/// Beliefs of one coalition size over consecutive player counts, starting
/// where a size-`s` coalition first has outsiders (and at least 3 players).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefFamily {
    s: usize,
    entries: Vec<Belief>,
}

impl BeliefFamily {
    pub fn first_level(s: usize) -> usize {
        (s + 1).max(3)
    }

    pub fn new(entries: Vec<Belief>) -> Result<BeliefFamily> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty belief family".into()))?;
        let s = first.s;
        if first.n != Self::first_level(s) {
            return Err(Error::InvalidArgument(format!(
                "a size-{s} belief family starts at n = {}, not {}",
                Self::first_level(s),
                first.n
            )));
        }
        for (i, b) in entries.iter().enumerate() {
            if b.s != s {
                return Err(Error::InvalidArgument(format!(
                    "belief family mixes coalition sizes {s} and {}",
                    b.s
                )));
            }
            if b.n != first.n + i {
                return Err(Error::InvalidArgument(format!(
                    "belief family has a gap before n = {}",
                    b.n
                )));
            }
        }
        Ok(BeliefFamily { s, entries })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n_min(&self) -> usize {
        self.entries[0].n
    }

    pub fn n_max(&self) -> usize {
        self.entries[self.entries.len() - 1].n
    }

    pub fn get(&self, n: usize) -> Option<&Belief> {
        n.checked_sub(self.n_min()).and_then(|i| self.entries.get(i))
    }

    pub fn entries(&self) -> &[Belief] {
        &self.entries
    }

    pub fn to_files(&self) -> Vec<BeliefFile> {
        self.entries.iter().map(Belief::to_file).collect()
    }

    pub fn from_files(files: Vec<BeliefFile>) -> Result<BeliefFamily> {
        BeliefFamily::new(files.into_iter().map(Belief::from_file).collect::<Result<_>>()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cournot_game, neg_family_game, random_symmetric_game, CournotParams, NegFamilyParams};
    use crate::partitions::outsider_shapes;
    use crate::random;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn sh(parts: &[usize]) -> Shape {
        Shape::new(parts.to_vec()).unwrap()
    }

    fn cournot(n: usize) -> SymmetricGame {
        cournot_game(&CournotParams::unit(), n).unwrap()
    }

    fn negfam(n: usize) -> SymmetricGame {
        neg_family_game(&NegFamilyParams::new(ratio(1, 10)).unwrap(), n).unwrap()
    }

    #[test]
    fn conjecture_point_masses() {
        assert_eq!(gamma_belief(4, 1).unwrap().prob(&sh(&[1, 1, 1])), rational::one());
        assert_eq!(gamma_belief(3, 2).unwrap().prob(&sh(&[1])), rational::one());
        assert_eq!(gamma_belief(5, 2).unwrap().prob(&sh(&[1, 1, 1])), rational::one());
        assert_eq!(delta_belief(4, 1).unwrap().prob(&sh(&[3])), rational::one());
        assert_eq!(delta_belief(3, 1).unwrap().prob(&sh(&[2])), rational::one());
        assert_eq!(delta_belief(3, 2).unwrap(), gamma_belief(3, 2).unwrap());
        // Degenerate: no outsiders.
        assert_eq!(gamma_belief(3, 3).unwrap().prob(&Shape::empty()), rational::one());
        assert!(gamma_belief(3, 4).is_err());
    }

    #[test]
    fn belief_validation() {
        assert!(Belief::new(3, 1, [(sh(&[2]), ratio(1, 2))]).is_err());
        assert!(Belief::new(3, 1, [(sh(&[2]), ratio(3, 2)), (sh(&[1, 1]), ratio(-1, 2))]).is_err());
        assert!(Belief::new(3, 1, [(sh(&[1]), rational::one())]).is_err());
        assert!(Belief::new(3, 1, [(sh(&[2]), ratio(1, 2)), (sh(&[2]), ratio(1, 2))]).is_err());
        let b = Belief::new(3, 1, [(sh(&[2]), rational::zero()), (sh(&[1, 1]), rational::one())]).unwrap();
        assert_eq!(b.support().count(), 1);
    }

    #[test]
    fn expected_worth_examples() {
        let g3 = cournot(3);
        assert_eq!(expected_worth(&g3, &gamma_belief(3, 1).unwrap()).unwrap(), ratio(1, 16));
        assert_eq!(expected_worth(&g3, &delta_belief(3, 1).unwrap()).unwrap(), ratio(1, 9));
        let uniform = Belief::new(
            4,
            1,
            [
                (sh(&[1, 1, 1]), ratio(1, 3)),
                (sh(&[2, 1]), ratio(1, 3)),
                (sh(&[3]), ratio(1, 3)),
            ],
        )
        .unwrap();
        assert_eq!(expected_worth(&cournot(4), &uniform).unwrap(), ratio(769, 10800));
        assert!(expected_worth(&g3, &gamma_belief(4, 1).unwrap()).is_err());
    }

    #[test]
    fn interval_examples() {
        let i = achievable_interval(&cournot(3), 1).unwrap();
        assert_eq!((i.lo, i.hi), (ratio(1, 16), ratio(1, 9)));
        let i = achievable_interval(&cournot(3), 2).unwrap();
        assert_eq!((i.lo, i.hi), (ratio(1, 9), ratio(1, 9)));
        let i = achievable_interval(&negfam(3), 1).unwrap();
        assert_eq!((i.lo.clone(), i.hi.clone()), (ratio(11, 90), ratio(2, 15)));
        assert_eq!(i.lo_shape, sh(&[2]));
        let flat = SymmetricGame::from_fn(3, |_, _| rational::one()).unwrap();
        assert!(matches!(achievable_interval(&flat, 1), Err(Error::UnsupportedSign(_))));
    }

    #[test]
    fn point_masses_lie_in_interval() {
        for n in 3..=7 {
            for (g, seed) in [
                (cournot(n), 0),
                (negfam(n), 1),
                (
                    random_symmetric_game(n, ExternalitySign::Positive, n as u64).unwrap(),
                    2,
                ),
                (
                    random_symmetric_game(n, ExternalitySign::Negative, n as u64).unwrap(),
                    3,
                ),
            ] {
                let mut rng = random::rng(seed);
                for s in 1..n {
                    let i = achievable_interval(&g, s).unwrap();
                    let shapes = outsider_shapes(n, s).unwrap();
                    for shp in &shapes {
                        assert!(i.contains(g.worth(s, shp)), "n={n} s={s} {shp}");
                    }
                    let probs = random::simplex(&mut rng, shapes.len());
                    let h = Belief::new(n, s, shapes.into_iter().zip(probs)).unwrap();
                    assert!(i.contains(&expected_worth(&g, &h).unwrap()));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn expected_worth_is_affine(seed in any::<u64>(), n in 3usize..=6, s_off in 0usize..5) {
            let s = 1 + s_off % (n - 1);
            let g = random_symmetric_game(n, ExternalitySign::Positive, seed).unwrap();
            let shapes = outsider_shapes(n, s).unwrap();
            let mut rng = random::rng(seed ^ 0xabc);
            let h1 = Belief::new(n, s, shapes.iter().cloned().zip(random::simplex(&mut rng, shapes.len()))).unwrap();
            let h2 = Belief::new(n, s, shapes.iter().cloned().zip(random::simplex(&mut rng, shapes.len()))).unwrap();
            let lambda = random::unit(&mut rng);
            let mixed = h1.mix(&lambda, &h2).unwrap();
            let lhs = expected_worth(&g, &mixed).unwrap();
            let rhs = &lambda * expected_worth(&g, &h1).unwrap()
                + (rational::one() - &lambda) * expected_worth(&g, &h2).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(mixed.support().map(|(_, p)| p.clone()).sum::<Rational>(), rational::one());
        }
    }

    #[test]
    fn json_formats() {
        let b = Belief::new(4, 1, [(sh(&[3]), ratio(99, 1024)), (sh(&[1, 1, 1]), ratio(925, 1024))]).unwrap();
        let text = serde_json::to_string(&b.to_file()).unwrap();
        assert!(text.contains("\"99/1024\""));
        let back = Belief::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, b);
        let bad = r#"{ "n": 3, "s": 1, "probs": [ { "outsiders": [2], "p": "2/3" } ] }"#;
        assert!(Belief::from_file(serde_json::from_str(bad).unwrap()).is_err());
    }

    #[test]
    fn family_validation() {
        let fam = BeliefFamily::new(vec![gamma_belief(3, 1).unwrap(), gamma_belief(4, 1).unwrap()]).unwrap();
        assert_eq!((fam.n_min(), fam.n_max()), (3, 4));
        assert!(BeliefFamily::new(vec![gamma_belief(3, 1).unwrap(), gamma_belief(5, 1).unwrap()]).is_err());
        assert!(BeliefFamily::new(vec![gamma_belief(4, 1).unwrap()]).is_err());
        assert!(BeliefFamily::new(vec![gamma_belief(4, 3).unwrap()]).is_ok());
        assert!(BeliefFamily::new(vec![gamma_belief(3, 1).unwrap(), gamma_belief(4, 2).unwrap()]).is_err());
    }
}
