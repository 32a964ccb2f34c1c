//! Seeded generator of belief families that satisfy the step condition.

use num_traits::Zero;
use rand::Rng;

use super::{
    construct_tilde, expected_worth, gamma_value, interval_for_sign, AdmissibilityMode, Belief, BeliefFamily, Interval,
    Tilde,
};
use crate::error::{Error, Result};
use crate::game::{GameFamily, SymmetricGame};
use crate::partitions::outsider_shapes;
use crate::random;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SamplerOptions {
    /// Upper bound on the expected worth at the first level, e.g. the equal
    /// split share of a singleton in the base case.
    pub first_level_cap: Option<Rational>,
}

pub fn sample_admissible_family(f: &GameFamily, s: usize, seed: u64, mode: AdmissibilityMode) -> Result<BeliefFamily> {
    sample_admissible_family_with(f, s, seed, mode, &SamplerOptions::default())
}

/// Draws `h_{first}` uniformly from the simplex of outsider shapes, then each
/// later level with expected worth at or below the `n/(n+1)` target.
///
/// Every level is also kept high enough that the next step stays feasible
/// (and, in R-admissible mode, inside the R set). When a uniform draw misses
/// the allowed value range it is mixed with an extreme point mass to land on
/// a uniformly drawn value inside the range.
pub fn sample_admissible_family_with(
    f: &GameFamily,
    s: usize,
    seed: u64,
    mode: AdmissibilityMode,
    options: &SamplerOptions,
) -> Result<BeliefFamily> {
    if s == 0 {
        return Err(Error::InvalidArgument("coalition size must be at least 1".into()));
    }
    let first = BeliefFamily::first_level(s);
    if first < f.n_min() || first > f.n_max() {
        return Err(Error::InvalidArgument(format!(
            "games cover n = {}..={}, a size-{s} family needs n = {first}",
            f.n_min(),
            f.n_max()
        )));
    }
    let sign = mode.required_sign();
    for n in first..=f.n_max() {
        let got = f.get(n).expect("in range").externalities().sign;
        if got != sign {
            return Err(Error::UnsupportedSign(got));
        }
    }

    let mut rng = random::rng(seed);
    let mut entries: Vec<Belief> = Vec::new();
    let mut prev_value: Option<Rational> = None;
    for n in first..=f.n_max() {
        let g = f.get(n).expect("in range");
        let interval = interval_for_sign(g, s, sign)?;
        let mut lower = interval.lo.clone();
        let mut upper = interval.hi.clone();

        match &prev_value {
            None => {
                if let Some(cap) = &options.first_level_cap {
                    upper = upper.min(cap.clone());
                }
            }
            Some(v) => match construct_tilde(g, v, s)? {
                c if c.tilde == Tilde::Infeasible => return Err(Error::InfeasibleStep { n, s }),
                c => {
                    if let Tilde::Mixture { .. } = c.tilde {
                        upper = upper.min(c.target);
                    }
                }
            },
        }
        if let Some(g_next) = f.get(n + 1) {
            // Keeps n/(n+1)·V at or above the next level's minimum.
            let next = interval_for_sign(g_next, s, sign)?;
            lower = lower.max(rational::ratio(n as i64 + 1, n as i64) * &next.lo);
            if mode == AdmissibilityMode::RAdmissible {
                lower = lower.max(gamma_value(g_next, s).clone());
            }
        }
        if lower > upper {
            return Err(Error::InfeasibleStep { n, s });
        }

        let belief = draw_in_range(&mut rng, g, s, &interval, &lower, &upper)?;
        prev_value = Some(expected_worth(g, &belief)?);
        entries.push(belief);
    }
    BeliefFamily::new(entries)
}

fn uniform_belief(rng: &mut impl Rng, n: usize, s: usize) -> Result<Belief> {
    let shapes = outsider_shapes(n, s)?;
    let probs = random::simplex(rng, shapes.len());
    Belief::new(n, s, shapes.into_iter().zip(probs))
}

/// A belief whose expected worth lies in `[lower, upper]`, a sub-range of the
/// achievable interval.
fn draw_in_range(
    rng: &mut impl Rng,
    g: &SymmetricGame,
    s: usize,
    interval: &Interval,
    lower: &Rational,
    upper: &Rational,
) -> Result<Belief> {
    let n = g.n();
    let r = uniform_belief(rng, n, s)?;
    let v = expected_worth(g, &r)?;
    if v >= *lower && v <= *upper {
        return Ok(r);
    }
    let target = lower + random::unit(rng) * (upper - lower);
    let unfav = Belief::point_mass(n, s, interval.lo_shape.clone())?;
    let fav = Belief::point_mass(n, s, interval.hi_shape.clone())?;
    let belief = if v > target {
        // v > target >= lo, so the denominator is positive.
        let weight = (&target - &interval.lo) / (&v - &interval.lo);
        r.mix(&weight, &unfav)?
    } else {
        let width = &interval.hi - &v;
        debug_assert!(!width.is_zero());
        let weight = (&interval.hi - &target) / width;
        r.mix(&weight, &fav)?
    };
    debug_assert_eq!(expected_worth(g, &belief)?, target);
    Ok(belief)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beliefs::admissible_family_check;
    use crate::game::ExternalitySign;
    use crate::generators::{cournot_family, neg_family, random_family, CournotParams, NegFamilyParams};
    use crate::rational::ratio;

    #[test]
    fn cournot_samples_are_admissible() {
        let fam = cournot_family(&CournotParams::unit(), 6).unwrap();
        let b = sample_admissible_family(&fam, 1, 42, AdmissibilityMode::Admissible).unwrap();
        assert_eq!((b.n_min(), b.n_max()), (3, 6));
        let r = admissible_family_check(&fam, &b, AdmissibilityMode::Admissible).unwrap();
        assert!(r.admissible, "{r:?}");
    }

    #[test]
    fn every_size_and_seed_passes() {
        let fam = cournot_family(&CournotParams::unit(), 7).unwrap();
        for s in 1..7 {
            for seed in 0..10 {
                let b = sample_admissible_family(&fam, s, seed, AdmissibilityMode::Admissible).unwrap();
                assert_eq!(b.n_min(), BeliefFamily::first_level(s));
                assert!(
                    admissible_family_check(&fam, &b, AdmissibilityMode::Admissible)
                        .unwrap()
                        .admissible
                );
            }
        }
    }

    #[test]
    fn mirror_samples_pass_the_mirror_check() {
        let fam = neg_family(&NegFamilyParams::new(ratio(1, 10)).unwrap(), 7).unwrap();
        for seed in 0..10 {
            let b = sample_admissible_family(&fam, 2, seed, AdmissibilityMode::NegativeMirror).unwrap();
            assert!(
                admissible_family_check(&fam, &b, AdmissibilityMode::NegativeMirror)
                    .unwrap()
                    .admissible
            );
        }
        assert!(matches!(
            sample_admissible_family(&fam, 1, 0, AdmissibilityMode::Admissible),
            Err(Error::UnsupportedSign(ExternalitySign::Negative))
        ));
    }

    #[test]
    fn r_admissible_samples_pass_r_check() {
        let fam = random_family(ExternalitySign::Positive, 6, 5).unwrap();
        let mut produced = 0;
        for seed in 0..20 {
            match sample_admissible_family(&fam, 1, seed, AdmissibilityMode::RAdmissible) {
                Ok(b) => {
                    produced += 1;
                    let r = admissible_family_check(&fam, &b, AdmissibilityMode::RAdmissible).unwrap();
                    assert!(r.admissible, "{r:?}");
                }
                Err(Error::InfeasibleStep { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(produced > 0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let fam = cournot_family(&CournotParams::unit(), 6).unwrap();
        let a = sample_admissible_family(&fam, 2, 9, AdmissibilityMode::Admissible).unwrap();
        let b = sample_admissible_family(&fam, 2, 9, AdmissibilityMode::Admissible).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_level_cap_is_respected() {
        let fam = cournot_family(&CournotParams::unit(), 5).unwrap();
        let cap = ratio(1, 12);
        let opts = SamplerOptions {
            first_level_cap: Some(cap.clone()),
        };
        for seed in 0..30 {
            let b = sample_admissible_family_with(&fam, 1, seed, AdmissibilityMode::Admissible, &opts).unwrap();
            let v = expected_worth(fam.get(3).unwrap(), b.get(3).unwrap()).unwrap();
            assert!(v <= cap);
        }
    }

    #[test]
    fn infeasible_step_names_n_and_s() {
        // Positive externalities, but the n = 4 minimum sits far above
        // anything 3/4·V_3 can reach.
        let g3 = SymmetricGame::from_fn(3, |s, out| match (s, out.num_parts()) {
            (3, _) => rational::int(100),
            (_, m) => ratio(1, 1 + m as i64),
        })
        .unwrap();
        let g4 = SymmetricGame::from_fn(4, |s, out| match (s, out.num_parts()) {
            (4, _) => rational::int(100),
            (_, m) => rational::int(10) + ratio(1, 1 + m as i64),
        })
        .unwrap();
        let fam = GameFamily::new(vec![g3, g4]).unwrap();
        let err = sample_admissible_family(&fam, 1, 0, AdmissibilityMode::Admissible).unwrap_err();
        assert!(matches!(err, Error::InfeasibleStep { n: 3, s: 1 }), "{err}");
    }
}
