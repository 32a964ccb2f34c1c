//! Game families with known structure.

use num_traits::Signed;
use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{is_efficient, ExternalitySign, GameFamily, SymmetricGame};
use crate::limits;
use crate::partitions::{outsider_shapes, Shape};
use crate::random;
use crate::rational::{self, Rational};

/// Linear Cournot market: inverse demand `a - b·Q`, marginal cost `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CournotParams {
    /// `a - c`
    margin: Rational,
    /// `b`
    slope: Rational,
}

impl CournotParams {
    pub fn new(margin: Rational, slope: Rational) -> Result<CournotParams> {
        if !margin.is_positive() || !slope.is_positive() {
            return Err(Error::InvalidArgument(
                "Cournot margin and slope must both be positive".into(),
            ));
        }
        Ok(CournotParams { margin, slope })
    }

    pub fn unit() -> CournotParams {
        CournotParams {
            margin: rational::one(),
            slope: rational::one(),
        }
    }

    pub fn margin(&self) -> &Rational {
        &self.margin
    }

    pub fn slope(&self) -> &Rational {
        &self.slope
    }

    /// Equilibrium profit of each of `m` symmetric firms.
    pub fn profit(&self, m: usize) -> Rational {
        let m1 = rational::int(m as i64 + 1);
        &self.margin * &self.margin / (&self.slope * &m1 * &m1)
    }
}

/// Every coalition acts as one firm, so a coalition in a partition with `m`
/// blocks earns `margin² / (slope·(m+1)²)`.
pub fn cournot_game(p: &CournotParams, n: usize) -> Result<SymmetricGame> {
    if n < 2 {
        return Err(Error::InvalidArgument("Cournot games need n >= 2".into()));
    }
    SymmetricGame::from_fn(n, |_, out| p.profit(1 + out.num_parts()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegFamilyParams {
    epsilon: Rational,
}

impl NegFamilyParams {
    pub fn new(epsilon: Rational) -> Result<NegFamilyParams> {
        if !epsilon.is_positive() || epsilon >= rational::one() {
            return Err(Error::InvalidArgument(format!(
                "epsilon {} must lie strictly between 0 and 1",
                rational::format(&epsilon)
            )));
        }
        Ok(NegFamilyParams { epsilon })
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }
}

/// `worth(s, out) = (s/n)²·(1 + ε·(m−1))` with `m` the total block count.
/// Worth rises with `m`, so merging outsiders hurts: negative externalities.
pub fn neg_family_game(p: &NegFamilyParams, n: usize) -> Result<SymmetricGame> {
    if n < 2 {
        return Err(Error::InvalidArgument("negative family needs n >= 2".into()));
    }
    let g = SymmetricGame::from_fn(n, |s, out| {
        let share = rational::ratio(s as i64, n as i64);
        let m = 1 + out.num_parts();
        &share * &share * (rational::one() + &p.epsilon * rational::int(m as i64 - 1))
    })?;
    let eff = is_efficient(&g);
    if let Some(v) = eff.violation {
        return Err(Error::Generator(format!(
            "epsilon {} breaks efficiency at n = {n}: shape {} totals {} >= grand {}",
            rational::format(&p.epsilon),
            v.shape,
            rational::format(&v.total),
            rational::format(&eff.grand)
        )));
    }
    Ok(g)
}

/// Random game whose worths are strictly monotone along the merge order of
/// outsider shapes, oriented by `sign`, with the grand worth raised until the
/// game is efficient.
pub fn random_symmetric_game(n: usize, sign: ExternalitySign, seed: u64) -> Result<SymmetricGame> {
    if !sign.is_strict() {
        return Err(Error::UnsupportedSign(sign));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    limits::check("random game", n, limits::RANDOM_GAME_MAX_N)?;
    let mut rng = random::rng(seed);
    let mut entries = Vec::new();
    for s in 1..n {
        // A merge removes one part, so ordering by part count extends the
        // merge order linearly.
        let mut shapes = outsider_shapes(n, s)?;
        shapes.sort_by_key(|sh| std::cmp::Reverse(sh.num_parts()));
        let draws = distinct_sorted_draws(&mut rng, shapes.len());
        let ordered: Box<dyn Iterator<Item = Rational>> = match sign {
            ExternalitySign::Positive => Box::new(draws.into_iter()),
            _ => Box::new(draws.into_iter().rev()),
        };
        for (sh, v) in shapes.into_iter().zip(ordered) {
            entries.push((s, sh, v));
        }
    }
    let placeholder = rational::zero();
    entries.push((n, Shape::empty(), placeholder));
    let g = SymmetricGame::from_entries(n, entries)?;
    let mut grand = random::unit_positive(&mut rng);
    if let Some(required) = max_partition_total(&g) {
        if grand <= required {
            grand = required + random::unit_positive(&mut rng);
        }
    }
    let g = g.with_grand(grand);
    debug_assert!(is_efficient(&g).efficient);
    Ok(g)
}

fn max_partition_total(g: &SymmetricGame) -> Option<Rational> {
    crate::partitions::enumerate_shapes(g.n())
        .ok()?
        .into_iter()
        .filter(|full| full.num_parts() >= 2)
        .map(|full| {
            full.parts()
                .iter()
                .map(|&a| g.worth(a, &full.without(a).expect("part present")).clone())
                .sum::<Rational>()
        })
        .max()
}

fn distinct_sorted_draws(rng: &mut impl Rng, k: usize) -> Vec<Rational> {
    loop {
        let mut draws: Vec<Rational> = (0..k).map(|_| random::unit_positive(rng)).collect();
        draws.sort();
        if draws.windows(2).all(|w| w[0] < w[1]) {
            return draws;
        }
    }
}

pub fn cournot_family(p: &CournotParams, n_max: usize) -> Result<GameFamily> {
    GameFamily::from_fn(3..=n_max, |n| cournot_game(p, n))
}

pub fn neg_family(p: &NegFamilyParams, n_max: usize) -> Result<GameFamily> {
    GameFamily::from_fn(3..=n_max, |n| neg_family_game(p, n))
}

/// Independent random games per `n`, seeds derived from `seed`.
pub fn random_family(sign: ExternalitySign, n_max: usize, seed: u64) -> Result<GameFamily> {
    GameFamily::from_fn(3..=n_max, |n| {
        random_symmetric_game(n, sign, random::derive_seed(seed, &[n as u64]))
    })
}
