//! LP and minimax engines against independent oracles.

mod common;

use common::*;
use leakgame::games::{solve, GameKind};
use leakgame::solver::{
    closed_form_2x2, expected_payoff, fictitious_play, lp_solve, solve_convex_linear_game, solve_matrix_rows,
    EpigraphPayoff, LinearProgram, LpStatus, Relation,
};
use proptest::prelude::*;
use rand::Rng;

/// Solves a small dense square system; `None` if singular.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Best vertex of `max c·x, A x ≤ b, 0 ≤ x ≤ 1` by enumerating active sets.
fn vertex_oracle(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), 1.0));
        rows.push((e.iter().map(|v| -v).collect(), 0.0));
    }
    let mut best: Option<f64> = None;
    let k = rows.len();
    let mut pick = vec![0usize; n];
    fn next(pick: &mut [usize], k: usize) -> bool {
        let n = pick.len();
        for i in (0..n).rev() {
            if pick[i] < k - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, p) in pick.iter_mut().enumerate() {
        *p = i;
    }
    loop {
        let m: Vec<Vec<f64>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let r: Vec<f64> = pick.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = gauss(m, r) {
            if rows.iter().all(|(row, rhs)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9) {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
        if !next(&mut pick, k) {
            return best;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn lp_matches_vertex_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=4));
        let c: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        let b: Vec<f64> = (0..m).map(|_| r.gen_range(-0.5..1.0)).collect();
        let mut lp = LinearProgram::maximize(c.clone());
        for (row, &rhs) in a.iter().zip(&b) {
            lp.constrain(row.clone(), Relation::Le, rhs);
        }
        for j in 0..n {
            lp.set_bounds(j, 0.0, 1.0);
        }
        let sol = lp_solve(&lp).unwrap();
        match vertex_oracle(&c, &a, &b) {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!(close(sol.objective, best, 1e-8), "{} vs {}", sol.objective, best);
                prop_assert!(sol.diagnostics.primal_residual <= 1e-8);
                prop_assert!(sol.diagnostics.duality_gap <= 1e-8);
            }
        }
    }

    #[test]
    fn matrix_game_saddle_point(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (nr, nc) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let m = random_payoff(&mut r, nr, nc);
        let s = solve_matrix_rows(&m).unwrap();
        prop_assert!(s.lp.duality_gap <= 1e-8);
        prop_assert!(close(s.value, s.maxmin_value, 1e-8));
        prop_assert!(close(expected_payoff(&m, &s.row_strategy, &s.col_strategy), s.value, 1e-8));
        // no pure deviation helps either player
        for i in 0..nr {
            let e: Vec<f64> = (0..nr).map(|k| f64::from(k == i)).collect();
            prop_assert!(expected_payoff(&m, &e, &s.col_strategy) >= s.value - 1e-8);
        }
        for j in 0..nc {
            let e: Vec<f64> = (0..nc).map(|k| f64::from(k == j)).collect();
            prop_assert!(expected_payoff(&m, &s.row_strategy, &e) <= s.value + 1e-8);
        }
    }

    #[test]
    fn matrix_game_affine_invariance(seed in any::<u64>()) {
        let mut r = rng(seed);
        let nr = r.gen_range(1..=4);
        let m = random_payoff(&mut r, nr, 3);
        let (a, b) = (r.gen_range(0.1..5.0), r.gen_range(-3.0..3.0));
        let t: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|v| a * v + b).collect()).collect();
        let (s, u) = (solve_matrix_rows(&m).unwrap(), solve_matrix_rows(&t).unwrap());
        prop_assert!(close(u.value, a * s.value + b, 1e-8));
        // the transformed strategies are still optimal in the original game
        prop_assert!(close(expected_payoff(&m, &u.row_strategy, &u.col_strategy), s.value, 1e-8));
    }

    #[test]
    fn closed_form_agrees_when_applicable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_payoff(&mut r, 2, 2);
        if let Some(cf) = closed_form_2x2([[m[0][0], m[0][1]], [m[1][0], m[1][1]]]) {
            let s = solve_matrix_rows(&m).unwrap();
            prop_assert!(close(cf.value, s.value, 1e-10));
        }
    }

    #[test]
    fn one_piece_epigraph_is_a_matrix_game(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (nr, nc) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let m = random_payoff(&mut r, nr, nc);
        let mut ep = EpigraphPayoff::new(nr);
        for j in 0..nc {
            ep.push_action(vec![vec![(0..nr).map(|i| m[i][j]).collect()]]).unwrap();
        }
        let (c, s) = (solve_convex_linear_game(&ep).unwrap(), solve_matrix_rows(&m).unwrap());
        prop_assert!(close(c.value, s.value, 1e-9));
    }
}

#[test]
fn lp_values_inside_fictitious_play_brackets() {
    let mut r = rng(10);
    for k in 0..50 {
        let (nr, nc) = (r.gen_range(2..=5), r.gen_range(2..=5));
        let m = random_payoff(&mut r, nr, nc);
        let s = solve_matrix_rows(&m).unwrap();
        let fp = fictitious_play(&m, 20_000, k);
        assert!(fp.contains(s.value, 1e-12), "matrix {k}: {} outside [{}, {}]", s.value, fp.lower, fp.upper);
        assert!(s.lp.duality_gap <= 1e-8);
    }
}

#[test]
fn fictitious_play_examples() {
    let m = vec![vec![0.5, 1.0], vec![1.0, 2.0 / 3.0]];
    let fp = fictitious_play(&m, 100_000, 0);
    assert!(fp.contains(0.8, 0.0) && fp.width() < 0.01, "{fp:?}");
    let c = vec![vec![0.3; 3]; 2];
    let fp = fictitious_play(&c, 1, 5);
    assert_eq!((fp.lower, fp.upper), (0.3, 0.3));
    let fp = fictitious_play(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1000, 1);
    assert!(fp.contains(0.5, 0.0));
}

/// `max_a V_a(δ)` on a 1001-point grid for two defender actions.
fn grid_value(g: &leakgame::games::LeakageGame) -> f64 {
    (0..=1000)
        .map(|k| {
            let p = k as f64 / 1000.0;
            (0..g.attacker().len()).map(|a| g.hidden_payoff(a, &[p, 1.0 - p]).unwrap()).fold(f64::MIN, f64::max)
        })
        .fold(f64::MAX, f64::min)
}

#[test]
fn hidden_games_match_grid_search() {
    let mut r = rng(20);
    for k in 0..50 {
        let (na, nx) = (r.gen_range(2..=3), r.gen_range(2..=4));
        let g = random_game_sized(&mut r, 2, na, nx);
        let s = solve(&g, GameKind::IV).unwrap();
        let grid = grid_value(&g);
        assert!(close(s.value, grid, 1e-3), "game {k}: LP {} grid {grid}", s.value);
        assert!(s.value <= grid + 1e-9, "LP value above a feasible point");
        assert!(s.diagnostics.duality_gap <= 1e-8);
        assert!(close(s.diagnostics.maxmin_value.unwrap(), s.value, 1e-8));
    }
}
