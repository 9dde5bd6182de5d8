//! Equilibrium solvers against brute-force searches over the tail-form oracle.

mod common;

use common::*;
use locgame_core::equilibria::{
    check_concavity, check_dsc, follower_br, leader_utility, price_of_anarchy, social_max, social_optimum, solve_ne,
    solve_ne_from, solve_stackelberg, stackelberg_limit, two_player_closed_form, EquilibriumKind,
};
use locgame_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const L: f64 = 100.0;

fn cfg(k: usize, alpha: f64, eps: f64) -> ScenarioConfig {
    ScenarioConfig::new(L, eps, alpha, 1e4, k).unwrap()
}

#[test]
fn ne_is_symmetric_and_unique_from_random_starts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 2..=4 {
        for alpha in [2.0, 3.0] {
            let c = cfg(k, alpha, 0.1);
            let ne = solve_ne(&c, 1e-12 * L, 100_000).unwrap();
            let x = ne.profile.positions();
            for i in 0..k {
                assert!((x[i] + x[k - 1 - i] - L).abs() < 1e-6 * L);
            }
            for _ in 0..20 {
                let start = random_ordered_profile(&c, &mut rng);
                let other = solve_ne_from(&c, &start, 1e-12 * L, 100_000).unwrap();
                assert!(other.profile.max_distance(&ne.profile) < 1e-6 * L);
            }
        }
    }
}

#[test]
fn no_station_gains_by_deviating_from_ne() {
    for k in 2..=4 {
        for alpha in [2.0, 3.0] {
            let c = cfg(k, alpha, 0.1);
            let ne = solve_ne(&c, 1e-12 * L, 100_000).unwrap();
            let x = ne.profile.positions();
            for i in 0..k {
                let oracle = brute_force_response(i, x, L, 0.1, alpha);
                assert!((oracle - x[i]).abs() < 1e-6 * L, "K {k} alpha {alpha} i {i}: {oracle} vs {}", x[i]);
                let fd = fd_gradient(i, x, L, 0.1, alpha, 1e-3);
                assert!(fd.abs() < 1e-9, "K {k} alpha {alpha}: {fd}");
            }
        }
    }
}

#[test]
fn two_player_closed_form_agrees_with_fixed_point() {
    for eps in [0.01, 0.1, 1.0, 10.0] {
        let c = cfg(2, 2.0, eps);
        let closed = two_player_closed_form(&c).unwrap().unwrap();
        let iterated = solve_ne(&c, 1e-13 * L, 100_000).unwrap();
        assert!(closed.profile.max_distance(&iterated.profile) < 1e-9 * L);
        let x2 = 0.5 * (2.0 * L * L - 4.0 * eps * eps).sqrt();
        assert!((closed.profile.positions()[1] - x2).abs() < 1e-12 * L);
    }
    assert!(two_player_closed_form(&cfg(3, 2.0, 0.1)).is_none());
    assert!(two_player_closed_form(&cfg(2, 3.0, 0.1)).is_none());
}

#[test]
fn single_station_sits_at_centre() {
    let ne = solve_ne(&cfg(1, 3.0, 0.1), 1e-12, 100).unwrap();
    assert_eq!(ne.profile.positions(), &[50.0]);
}

#[test]
fn stackelberg_matches_grid_search() {
    for eps in [0.1, 1.0, 10.0] {
        let c = cfg(2, 2.0, eps);
        let se = solve_stackelberg(&c, 1e-10).unwrap();
        // Leader objective by the tail-form oracle, follower placed by its
        // (separately verified) best response.
        let leader = |x1: f64| {
            let x2 = follower_br(x1, &c).unwrap();
            utility(0, &[x1, x2], L, eps, 2.0)
        };
        let (mut lo, mut hi) = (1e-6, L - 1e-6);
        let mut best = 0.5 * L;
        for _ in 0..6 {
            let n = 4000;
            let step = (hi - lo) / n as f64;
            let mut bv = f64::NEG_INFINITY;
            for i in 0..=n {
                let y = lo + step * i as f64;
                let v = leader(y);
                if v > bv {
                    bv = v;
                    best = y;
                }
            }
            lo = (best - 2.0 * step).max(1e-6);
            hi = (best + 2.0 * step).min(L - 1e-6);
        }
        let x = se.profile.positions();
        assert!((x[0] - best).abs() < 1e-5 * L, "eps {eps}: {} vs {best}", x[0]);
        assert!(leader_utility(x[0], &c).unwrap() >= leader(best) - 1e-12);
    }
}

#[test]
fn stackelberg_small_height_limit() {
    let c = cfg(2, 2.0, 0.1);
    let se = solve_stackelberg(&c, 1e-10).unwrap();
    let (x1, x2) = stackelberg_limit(L);
    let x = se.profile.positions();
    assert!(((x[0] - x1) / x1).abs() < 1e-3);
    assert!(((x[1] - x2) / x2).abs() < 1e-3);
    assert!((x1 - 35.115).abs() < 1e-3);
}

#[test]
fn social_optimum_beats_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 1..=4 {
        let c = cfg(k, 2.0, 0.1);
        let so = social_optimum(&c).unwrap();
        let best = so.utilities.sum_u_hat();
        for _ in 0..200 {
            let x = random_ordered_profile(&c, &mut rng);
            let s: f64 = (0..k).map(|i| utility(i, x.positions(), L, 0.1, 2.0)).sum();
            assert!(s <= best + 1e-9);
        }
    }
}

#[test]
fn social_max_matches_two_player_grid_search() {
    for eps in [0.1, 1.0, 10.0] {
        let c = cfg(2, 2.0, eps);
        let (_, max) = social_max(&c);
        let step = 0.05;
        let n = (L / step) as usize;
        let mut grid_best = f64::NEG_INFINITY;
        for i in 1..n {
            for j in i + 1..n {
                let x = [step * i as f64, step * j as f64];
                grid_best = grid_best.max(utility(0, &x, L, eps, 2.0) + utility(1, &x, L, eps, 2.0));
            }
        }
        assert!(max >= grid_best - 1e-9);
        assert!((max - grid_best) / grid_best < 1e-3);
    }
}

#[test]
fn poa_ordering() {
    for eps in [0.1, 1.0, 10.0] {
        let c = cfg(2, 2.0, eps);
        let ne = solve_ne(&c, 1e-12 * L, 100_000).unwrap();
        let se = solve_stackelberg(&c, 1e-10).unwrap();
        let pn = price_of_anarchy(&ne, EquilibriumKind::Nash, &c);
        let ps = price_of_anarchy(&se, EquilibriumKind::Stackelberg, &c);
        assert!(pn.poa >= 1.0 - 1e-9);
        assert!(ps.poa >= pn.poa, "eps {eps}: {} < {}", ps.poa, pn.poa);
    }
}

#[test]
fn concavity_and_dsc_witnesses() {
    for alpha in [2.0, 3.0] {
        let r = check_concavity(&cfg(4, alpha, 0.1), 1000, 1).unwrap();
        assert!(r.passed && r.worst_margin < 0.0);
    }
    for alpha in [2.0, 3.0, 4.0] {
        let r = check_dsc(&cfg(3, alpha, 0.1), 1000, 2).unwrap();
        assert!(r.passed && r.min_value > 0.0, "{r:?}");
    }
}
