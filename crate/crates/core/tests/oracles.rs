use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use pfg_core::beliefs::{construct_tilde, expected_worth, gamma_belief, Belief, Tilde};
use pfg_core::game::{expand, ExternalitySign, SymmetricGame};
use pfg_core::generators::{cournot_game, random_symmetric_game, CournotParams};
use pfg_core::partitions::{
    enumerate_set_partitions, enumerate_shapes, outsider_shapes, shape_multiplicity, SetPartition, Shape,
};
use pfg_core::random::{derive_seed, rng, simplex};
use pfg_core::rational::{int, ratio};
use pfg_core::Rational;

/// Bell numbers from Stirling numbers of the second kind.
fn bell(n: usize) -> u64 {
    let mut s = vec![vec![0u64; n + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            s[i][k] = k as u64 * s[i - 1][k] + s[i - 1][k - 1];
        }
    }
    s[n].iter().sum()
}

/// Partitions of `k` with parts at most `max`, by plain recursion.
fn partitions_count(k: usize, max: usize) -> u64 {
    if k == 0 {
        return 1;
    }
    (1..=max.min(k)).map(|p| partitions_count(k - p, p)).sum()
}

#[test]
fn set_partition_counts_match_stirling_sums() {
    for n in 1..=9 {
        assert_eq!(enumerate_set_partitions(n).unwrap().len() as u64, bell(n), "n = {n}");
    }
}

#[test]
fn shape_counts_match_recursive_count() {
    for k in 1..=15 {
        assert_eq!(
            enumerate_shapes(k).unwrap().len() as u64,
            partitions_count(k, k),
            "k = {k}"
        );
    }
}

#[test]
fn multiplicities_count_realizations() {
    for k in 1..=8 {
        let mut counts: BTreeMap<Shape, u64> = BTreeMap::new();
        for p in enumerate_set_partitions(k).unwrap() {
            *counts.entry(p.shape()).or_default() += 1;
        }
        for (sh, c) in counts {
            assert_eq!(shape_multiplicity(&sh), BigUint::from(c), "{sh}");
        }
    }
}

/// Symmetric Cournot equilibrium profit with `m` firms, demand `P = a − b·Q`
/// and unit cost `c`.
fn cournot_profit(a: &Rational, b: &Rational, c: &Rational, m: usize) -> Rational {
    let m_r = int(m as i64);
    let q = (a - c) / (b * (&m_r + Rational::one()));
    let price = a - b * &m_r * &q;
    (price - c) * q
}

#[test]
fn cournot_worths_match_equilibrium_profits() {
    let (a, b, c) = (ratio(7, 2), ratio(2, 3), ratio(1, 2));
    let params = CournotParams::new(&a - &c, b.clone()).unwrap();
    for n in 2..=7 {
        let g = cournot_game(&params, n).unwrap();
        for (key, worth) in g.entries() {
            let blocks = 1 + key.outsiders.num_parts();
            assert_eq!(*worth, cournot_profit(&a, &b, &c, blocks), "n = {n}, {key}");
        }
        assert_eq!(*g.grand(), cournot_profit(&a, &b, &c, 1));
    }
}

/// Expected worth on the expanded game with the belief spread uniformly over
/// each shape's realizations among players `s..n`.
fn lifted_expected_worth(g: &SymmetricGame, h: &Belief) -> Rational {
    let general = expand(g).unwrap();
    let (n, s) = (h.n(), h.s());
    let coalition: Vec<usize> = (0..s).collect();
    let mut total = Rational::zero();
    for outsiders in enumerate_set_partitions(n - s).unwrap() {
        let sh = outsiders.shape();
        let p = h.prob(&sh);
        if p.is_zero() {
            continue;
        }
        let mult = shape_multiplicity(&sh).to_i64().unwrap();
        let mut blocks = vec![coalition.clone()];
        blocks.extend(outsiders.blocks().iter().map(|b| b.iter().map(|i| i + s).collect()));
        let full = SetPartition::from_blocks(n, blocks).unwrap();
        let w = general.worth(&coalition, &full).unwrap();
        total += p / int(mult) * w;
    }
    total
}

#[test]
fn expected_worth_matches_expanded_game() {
    for trial in 0..12u64 {
        let n = 3 + (trial as usize % 4);
        let sign = if trial % 2 == 0 {
            ExternalitySign::Positive
        } else {
            ExternalitySign::Negative
        };
        let g = random_symmetric_game(n, sign, derive_seed(99, &[trial])).unwrap();
        let mut r = rng(derive_seed(100, &[trial]));
        for s in 1..n {
            let shapes = outsider_shapes(n, s).unwrap();
            let w = simplex(&mut r, shapes.len());
            let h = Belief::new(n, s, shapes.into_iter().zip(w)).unwrap();
            assert_eq!(
                expected_worth(&g, &h).unwrap(),
                lifted_expected_worth(&g, &h),
                "n = {n}, s = {s}"
            );
        }
    }
}

#[test]
fn cournot_tilde_step_three_to_four() {
    let p = CournotParams::unit();
    let (g3, g4) = (cournot_game(&p, 3).unwrap(), cournot_game(&p, 4).unwrap());
    let v3 = expected_worth(&g3, &gamma_belief(3, 1).unwrap()).unwrap();
    let c = construct_tilde(&g4, &v3, 1).unwrap();
    let Tilde::Mixture { lambda, belief } = c.tilde else {
        panic!("{:?}", c.tilde)
    };
    // (3/64 − 1/25) / (1/9 − 1/25)
    let expected = (ratio(3, 64) - ratio(1, 25)) / (ratio(1, 9) - ratio(1, 25));
    assert_eq!(lambda, expected);
    assert_eq!(expected_worth(&g4, &belief).unwrap(), ratio(3, 64));
}
