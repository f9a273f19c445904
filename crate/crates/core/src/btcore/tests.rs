use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::error::Error;

fn two_player(a: f64, b: f64) -> WinMatrix {
    WinMatrix::from_rows(&[vec![0.0, a], vec![b, 0.0]]).unwrap()
}

fn degenerate_three() -> WinMatrix {
    // 1 beats 2, 1 beats 3, 2 beats 3.
    WinMatrix::from_rows(&[
        vec![0.0, 1.0, 1.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0],
    ])
    .unwrap()
}

fn unnormalized(scheme: Scheme, w: &WinMatrix, pi: &[f64]) -> Vec<f64> {
    let mut theta: Vec<f64> = pi.iter().map(|p| p.ln()).collect();
    sweep(scheme, w, &mut theta).unwrap();
    theta.iter().map(|t| t.exp()).collect()
}

#[test]
fn log_likelihood_direct_values() {
    let w = two_player(1.0, 1.0);
    assert_relative_eq!(log_likelihood(&w, &[1.0, 1.0]).unwrap(), 2.0 * 0.5f64.ln(), epsilon = 1e-12);
    assert_relative_eq!(log_likelihood(&w, &[1.0, 1.0]).unwrap(), -1.386294, epsilon = 1e-6);
    let w = two_player(1.0, 0.0);
    assert_relative_eq!(log_likelihood(&w, &[3.0, 1.0]).unwrap(), -0.287682, epsilon = 1e-6);
}

#[test]
fn log_likelihood_rejects_bad_strengths() {
    let w = two_player(1.0, 1.0);
    assert!(matches!(log_likelihood(&w, &[1.0]), Err(Error::Usage(_))));
    assert!(matches!(log_likelihood(&w, &[1.0, 0.0]), Err(Error::Usage(_))));
    assert!(matches!(log_likelihood(&w, &[-1.0, 1.0]), Err(Error::Usage(_))));
}

#[test]
fn unnormalized_steps_match_hand_substitution() {
    let w = two_player(3.0, 1.0);
    let z = unnormalized(Scheme::Zermelo, &w, &[1.0, 1.0]);
    assert_relative_eq!(z[0], 1.5, epsilon = 1e-12);
    assert_relative_eq!(z[1], 0.5, epsilon = 1e-12);

    let nw = unnormalized(Scheme::Newman, &w, &[1.0, 1.0]);
    assert_relative_eq!(nw[0], 3.0, epsilon = 1e-12);
    assert_relative_eq!(nw[1], 1.0 / 3.0, epsilon = 1e-12);

    let gs = unnormalized(Scheme::NewmanGaussSeidel, &w, &[1.0, 1.0]);
    assert_relative_eq!(gs[0], 3.0, epsilon = 1e-12);
    assert_relative_eq!(gs[1], 1.0, epsilon = 1e-12);
}

#[test]
fn public_steps_renormalize() {
    let w = two_player(3.0, 1.0);
    let start = StrengthVector::uniform(2);
    let z = zermelo_step(&w, &start).unwrap();
    assert_relative_eq!(z.ratio(0, 1), 3.0, epsilon = 1e-12);
    assert_relative_eq!(z.pi()[0], 3f64.sqrt(), epsilon = 1e-12);
    let gs = newman_gauss_seidel_step(&w, &start).unwrap();
    assert_relative_eq!(gs.ratio(0, 1), 3.0, epsilon = 1e-12);
    let nw = newman_step(&w, &start).unwrap();
    assert_relative_eq!(nw.ratio(0, 1), 9.0, epsilon = 1e-12);
    assert_relative_eq!(nw.log_pi().iter().sum::<f64>(), 0.0, epsilon = 1e-12);
}

#[test]
fn symmetric_matrix_is_a_fixed_point_for_every_scheme() {
    let w = WinMatrix::from_rows(&[
        vec![0.0, 2.0, 0.5, 0.0],
        vec![2.0, 0.0, 1.0, 3.0],
        vec![0.5, 1.0, 0.0, 0.7],
        vec![0.0, 3.0, 0.7, 0.0],
    ])
    .unwrap();
    for scheme in [Scheme::Zermelo, Scheme::Newman, Scheme::NewmanGaussSeidel] {
        let next = step_of(scheme, &w, &StrengthVector::uniform(4));
        assert!(next.pi().iter().all(|&p| (p - 1.0).abs() < 1e-15), "{scheme}");
        let s = solve(&w, &SolverConfig::default().with_scheme(scheme)).unwrap();
        assert!(s.converged && s.iterations <= 2, "{scheme}: {s:?}");
        assert!(s.pi().iter().all(|&p| (p - 1.0).abs() < 1e-12));
    }
}

fn step_of(scheme: Scheme, w: &WinMatrix, pi: &StrengthVector) -> StrengthVector {
    match scheme {
        Scheme::Zermelo => zermelo_step(w, pi),
        Scheme::Newman => newman_step(w, pi),
        Scheme::NewmanGaussSeidel => newman_gauss_seidel_step(w, pi),
    }
    .unwrap()
}

#[test]
fn two_player_fit_matches_empirical_frequency() {
    let w = two_player(3.0, 1.0);
    for scheme in [Scheme::Zermelo, Scheme::NewmanGaussSeidel] {
        let s = solve(&w, &SolverConfig::default().with_scheme(scheme)).unwrap();
        assert!(s.converged, "{scheme}");
        assert_relative_eq!(s.ratio(0, 1), 3.0, epsilon = 1e-7);
    }
}

#[test]
fn simultaneous_newman_oscillates_on_two_players() {
    // The ratio alternates between 9 and 1; the fixed point 3 is never hit.
    let w = two_player(3.0, 1.0);
    let s = solve(&w, &SolverConfig::new(Scheme::Newman, 1e-8, 101).unwrap()).unwrap();
    assert!(!s.converged);
    assert_relative_eq!(s.ratio(0, 1), 9.0, epsilon = 1e-9);
}

#[test]
fn divergent_tournament_keeps_its_order() {
    let w = degenerate_three();
    for scheme in [Scheme::Zermelo, Scheme::Newman, Scheme::NewmanGaussSeidel] {
        for max_iterations in [200, 10_000] {
            let s = solve(&w, &SolverConfig::new(scheme, 1e-8, max_iterations).unwrap()).unwrap();
            assert!(!s.converged, "{scheme}");
            assert_eq!(s.iterations, max_iterations);
            assert_eq!(rank_by_strength(&s), vec![0, 1, 2], "{scheme}");
            let lp = s.log_pi();
            assert!(lp.iter().all(|l| l.is_finite()));
            // pi_1 runs away from pi_2, pi_3 collapses.
            assert!(lp[0] - lp[1] > 1.0 && lp[1] - lp[2] > 1.0, "{scheme}: {lp:?}");
        }
    }
}

#[test]
fn consistent_step_matrix_ranks_exactly() {
    // Complete noiseless comparison of 30 items: higher index always wins.
    let n = 30;
    let mut w = WinMatrix::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            w.set_probability(j, i, 1.0).unwrap();
        }
    }
    for scheme in [Scheme::Zermelo, Scheme::NewmanGaussSeidel] {
        let s = solve(&w, &SolverConfig::default().with_scheme(scheme)).unwrap();
        assert!(!s.converged);
        let expected: Vec<usize> = (0..n).rev().collect();
        assert_eq!(rank_by_strength(&s), expected, "{scheme}");
    }
}

#[test]
fn isolated_item_is_degenerate() {
    let mut w = WinMatrix::<f64>::new(3);
    w.set_pair(0, 1, 1.0, 2.0).unwrap();
    assert!(matches!(solve(&w, &SolverConfig::default()), Err(Error::Degenerate(_))));
    assert!(matches!(zermelo_step(&w, &StrengthVector::uniform(3)), Err(Error::Degenerate(_))));
    let mut zero = WinMatrix::<f64>::new(2);
    zero.set_pair(0, 1, 0.0, 0.0).unwrap();
    assert!(matches!(solve(&zero, &SolverConfig::default()), Err(Error::Degenerate(_))));
}

#[test]
fn too_few_items_or_bad_config() {
    let w = WinMatrix::<f64>::new(1);
    assert!(matches!(solve(&w, &SolverConfig::default()), Err(Error::Usage(_))));
    assert!(SolverConfig::new(Scheme::Zermelo, 0.0, 10).is_err());
    assert!(SolverConfig::new(Scheme::Zermelo, 1e-6, 0).is_err());
    assert!("ngs".parse::<Scheme>().is_ok());
    assert!("bogus".parse::<Scheme>().is_err());
}

#[test]
fn single_precision_solves_too() {
    let w = WinMatrix::<f32>::from_rows(&[vec![0.0, 3.0], vec![1.0, 0.0]]).unwrap();
    let s = solve(&w, &SolverConfig::new(Scheme::NewmanGaussSeidel, 1e-5f32, 1000).unwrap()).unwrap();
    assert!(s.converged);
    assert!((s.ratio(0, 1) - 3.0).abs() < 1e-4);
}

/// Random tournament where every item wins and loses at least once.
fn tournament(n: usize) -> impl Strategy<Value = WinMatrix> {
    prop::collection::vec(0u32..5, n * n).prop_filter_map("need a win and a loss per item", move |cells| {
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rows[i][j] = cells[i * n + j] as f64;
                }
            }
        }
        let ok = (0..n).all(|i| {
            let wins: f64 = rows[i].iter().sum();
            let losses: f64 = (0..n).map(|j| rows[j][i]).sum();
            wins > 0.0 && losses > 0.0
        });
        ok.then(|| WinMatrix::from_rows(&rows).unwrap())
    })
}

proptest! {
    #[test]
    fn sweeps_commute_with_scaling(
        w in tournament(5),
        logs in prop::collection::vec(-2.0f64..2.0, 5),
        shift in -5.0f64..5.0,
    ) {
        for scheme in [Scheme::Zermelo, Scheme::Newman, Scheme::NewmanGaussSeidel] {
            let mut a = logs.clone();
            let mut b: Vec<f64> = logs.iter().map(|l| l + shift).collect();
            sweep(scheme, &w, &mut a).unwrap();
            sweep(scheme, &w, &mut b).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x + shift - y).abs() < 1e-9);
            }
        }
        let plain = solve(&w, &SolverConfig::default()).unwrap();
        prop_assert_eq!(rank_by_strength(&plain), rank_by_strength(&StrengthVector::from_log_strengths(plain.log_pi().to_vec())));
    }

    #[test]
    fn zermelo_never_decreases_likelihood(w in tournament(5)) {
        let mut s = StrengthVector::uniform(5);
        let mut last = log_likelihood(&w, &s.pi()).unwrap();
        for _ in 0..50 {
            s = zermelo_step(&w, &s).unwrap();
            let now = log_likelihood(&w, &s.pi()).unwrap();
            prop_assert!(now >= last - 1e-10, "{} < {}", now, last);
            last = now;
        }
    }
}
