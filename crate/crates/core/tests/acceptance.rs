//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion
//! over all of them. Run with `--nocapture` to see the lines.

mod common;

use common::*;
use leakgame::channel::{binary_hidden, binary_visible, equivalent, hidden_choice, visible_choice, Channel, EQUIV_TOL};
use leakgame::fixtures::{self, running_example};
use leakgame::games::{audit_hierarchy, solve, strategy_spread, DefenderStrategy, AttackerStrategy, GameKind, LeakageGame, SolveOptions};
use leakgame::pwd;
use leakgame::solver::{fictitious_play, solve_matrix_rows};
use leakgame::vulnerability::VulnMeasure;
use leakgame::Label;
use rand::Rng;

const EQ: f64 = 1e-9;

/// Collects the individual checks behind one criterion.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    passed: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what());
        }
    }
}

fn report(id: usize, title: &str, c: Checks) -> bool {
    let ok = c.failed.is_empty();
    let detail = if ok {
        format!("{} checks", c.passed)
    } else {
        format!("{} of {} checks failed: {}", c.failed.len(), c.passed + c.failed.len(), c.failed.join("; "))
    };
    println!("{} {id:>2}. {title} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

fn same(a: &Channel, b: &Channel) -> bool {
    a.matrix().max_abs_diff(b.matrix()).map_or(false, |d| d <= EQ)
}

fn equiv(a: &Channel, b: &Channel) -> bool {
    equivalent(a, b, EQUIV_TOL).map_or(false, |e| e.equivalent)
}

fn uniform_worst(g: &LeakageGame) -> f64 {
    let n = g.defender().len();
    (0..g.attacker().len()).map(|a| g.hidden_payoff(a, &vec![1.0 / n as f64; n]).unwrap()).fold(f64::MIN, f64::max)
}

fn with_c11(c11: Channel) -> LeakageGame {
    let base = running_example();
    LeakageGame::from_fn(base.defender().to_vec(), base.attacker().to_vec(), base.prior().clone(), VulnMeasure::Bayes, |d, a| {
        let (d, a) = (base.defender_index(d)?, base.attacker_index(a)?);
        Ok(if (d, a) == (1, 1) { c11.clone() } else { base.channel(d, a).clone() })
    })
    .unwrap()
}

fn running_values() -> Checks {
    let g = running_example();
    let mut c = Checks::default();
    let expect = [
        (GameKind::I, 4.0 / 5.0, "4/5"),
        (GameKind::II, 1.0, "1"),
        (GameKind::III, 2.0 / 3.0, "2/3"),
        (GameKind::IV, 5.0 / 7.0, "5/7"),
        (GameKind::V, 5.0 / 7.0, "5/7"),
        (GameKind::VIMixed, 4.0 / 7.0, "4/7"),
        (GameKind::VIBehavioral, 0.5, "1/2"),
    ];
    for (k, v, s) in expect {
        let got = solve(&g, k).unwrap().value;
        c.check(close(got, v, 1e-8), || format!("{k} = {got:.10}, expected {s}"));
    }
    c
}

fn game_one_equilibrium() -> Checks {
    let g = running_example();
    let mut c = Checks::default();
    let s = solve(&g, GameKind::I).unwrap();
    let (ds, as_) = strategy_spread(&g, GameKind::I, s.value).unwrap();
    c.check(ds < 1e-6 && as_ < 1e-6, || format!("equilibrium not unique (spread {ds:.2e}, {as_:.2e})"));
    if let (DefenderStrategy::Mixed(d), AttackerStrategy::Mixed(a)) = (&s.defender, &s.attacker) {
        c.check(close(d[0], 0.4, 1e-8), || format!("δ*(0) = {}", d[0]));
        c.check(close(a[0], 0.4, 1e-8), || format!("α*(0) = {}", a[0]));
    } else {
        c.check(false, || "strategies are not mixed".into());
    }
    c
}

fn game_four_equilibrium() -> Checks {
    let g = running_example();
    let mut c = Checks::default();
    let s = solve(&g, GameKind::IV).unwrap();
    c.check(close(s.value, 5.0 / 7.0, 1e-8), || format!("value {}", s.value));
    let (ds, as_) = strategy_spread(&g, GameKind::IV, s.value).unwrap();
    c.check(ds < 1e-6 && as_ < 1e-6, || format!("equilibrium not unique (spread {ds:.2e}, {as_:.2e})"));
    if let (DefenderStrategy::Mixed(d), AttackerStrategy::Mixed(a)) = (&s.defender, &s.attacker) {
        c.check(close(d[0], 4.0 / 7.0, 1e-6), || format!("δ*(0) = {}", d[0]));
        c.check(close(a[0], 4.0 / 7.0, 1e-6), || format!("α*(0) = {}", a[0]));
    } else {
        c.check(false, || "strategies are not mixed".into());
    }
    c
}

fn operator_algebra() -> Checks {
    let mut c = Checks::default();
    let mut r = rng(401);
    let fam = |idx: &[Label], cs: &[Channel]| -> Vec<(Label, Channel)> { idx.iter().cloned().zip(cs.iter().cloned()).collect() };
    for k in 0..100 {
        let xs = labels("x", r.gen_range(2..=4));
        let ys = labels("y", r.gen_range(2..=3));
        let idx = labels("i", r.gen_range(2..=4));
        let [c1, c2, c3] = [(); 3].map(|_| random_channel(&mut r, &xs, &ys));
        let us = labels("u", r.gen_range(1..=2));
        let c0 = random_channel(&mut r, &xs, &us);
        let (p, q, s) = (r.gen_range(0.0..=1.0), r.gen_range(0.0..=1.0), r.gen_range(0.0..=1.0));
        let mu = random_dist(&mut r, &idx);

        // choice over a single channel
        let copies = fam(&idx, &vec![c1.clone(); idx.len()]);
        let copies: Vec<(Label, &Channel)> = copies.iter().map(|(l, ch)| (l.clone(), ch)).collect();
        c.check(same(&hidden_choice(&mu, &copies).unwrap(), &c1), || format!("#{k}: hidden choice of copies"));
        c.check(equiv(&visible_choice(&mu, &copies).unwrap(), &c1), || format!("#{k}: visible choice of copies"));
        // compositions are channels of the right type
        let h = binary_hidden(p, &c1, &c2).unwrap();
        c.check(h.same_type(&c1), || format!("#{k}: hidden typing"));
        // idempotency and commutativity
        c.check(same(&binary_hidden(p, &c1, &c1).unwrap(), &c1), || format!("#{k}: hidden idempotency"));
        c.check(equiv(&binary_visible(p, &c1, &c1).unwrap(), &c1), || format!("#{k}: visible idempotency"));
        c.check(same(&h, &binary_hidden(1.0 - p, &c2, &c1).unwrap()), || format!("#{k}: hidden commutativity"));
        c.check(equiv(&binary_visible(p, &c1, &c2).unwrap(), &binary_visible(1.0 - p, &c2, &c1).unwrap()), || {
            format!("#{k}: visible commutativity")
        });
        // associativity in the reweighted form
        if q > 1e-3 && q < 1.0 - 1e-3 {
            let w = p * q / (p * q + (1.0 - q)).max(1e-300);
            let outer = p * q + (1.0 - q);
            let lhs = binary_hidden(1.0 - outer, &c3, &binary_hidden(w, &c1, &c2).unwrap()).unwrap();
            let rhs = binary_hidden(p * q, &c1, &binary_hidden((1.0 - q) / (1.0 - p * q), &c2, &c3).unwrap()).unwrap();
            c.check(same(&lhs, &rhs), || format!("#{k}: hidden associativity"));
            let lhs = binary_visible(1.0 - outer, &c3, &binary_visible(w, &c1, &c2).unwrap()).unwrap();
            let rhs = binary_visible(p * q, &c1, &binary_visible((1.0 - q) / (1.0 - p * q), &c2, &c3).unwrap()).unwrap();
            c.check(equiv(&lhs, &rhs), || format!("#{k}: visible associativity"));
        }
        // absorption
        let lhs = binary_hidden(q, &binary_hidden(p, &c1, &c2).unwrap(), &binary_hidden(s, &c1, &c2).unwrap()).unwrap();
        c.check(same(&lhs, &binary_hidden(p * q + (1.0 - q) * s, &c1, &c2).unwrap()), || format!("#{k}: absorption"));
        // visible distributes over hidden
        let lhs = binary_visible(p, &c0, &binary_hidden(q, &c2, &c3).unwrap()).unwrap();
        let rhs = binary_hidden(q, &binary_visible(p, &c0, &c2).unwrap(), &binary_visible(p, &c0, &c3).unwrap()).unwrap();
        c.check(equiv(&lhs, &rhs), || format!("#{k}: visible over hidden"));
        // but hidden does not distribute over visible: the left side is ill-typed
        let v = binary_visible(q, &c2, &c3).unwrap();
        c.check(binary_hidden(p, &c1, &v).is_err(), || format!("#{k}: hidden over visible accepted"));
    }
    c
}

fn hierarchy() -> Checks {
    let mut c = Checks::default();
    let mut r = rng(501);
    let opts = SolveOptions::default();
    for k in 0..200 {
        let g = random_game(&mut r);
        let rep = audit_hierarchy(&g, &opts).unwrap();
        for chk in rep.checks.iter().filter(|x| !x.holds) {
            c.check(false, || format!("game {k}: {chk}"));
        }
        c.check(true, String::new);
    }
    let g = running_example();
    let (iii, iv) = (solve(&g, GameKind::III).unwrap().value, solve(&g, GameKind::IV).unwrap().value);
    c.check(close(iii, 2.0 / 3.0, 1e-8) && close(iv, 5.0 / 7.0, 1e-8), || format!("III/IV = {iii}/{iv}"));
    // witness: the (defender 1, attacker 1) channel replaced by the (defender 1, attacker 0) one
    let h = with_c11(g.channel(1, 0).clone());
    let (iii, iv) = (solve(&h, GameKind::III).unwrap().value, solve(&h, GameKind::IV).unwrap().value);
    c.check(close(iii, 1.0, 1e-8) && close(iv, 2.0 / 3.0, 1e-8), || format!("witness III/IV = {iii}/{iv}"));
    c
}

const PIHAT_TABLE: [[f64; 8]; 6] = [
    [0.7257, 0.7257, 0.9311, 0.9311, 0.6577, 0.6577, 0.7122, 0.7122],
    [0.8900, 0.9311, 0.8900, 0.9311, 0.7122, 0.7122, 0.7122, 0.7122],
    [0.5068, 0.5068, 0.9311, 0.9311, 0.4934, 0.4934, 0.7668, 0.7668],
    [0.5068, 0.5068, 0.7668, 0.9311, 0.5068, 0.5068, 0.7668, 0.9311],
    [0.7257, 0.9311, 0.7257, 0.9311, 0.7122, 0.8766, 0.7122, 0.8766],
    [0.6712, 0.7122, 0.7257, 0.9311, 0.6712, 0.7122, 0.7257, 0.9311],
];

fn pwd_game(prior: &str) -> LeakageGame {
    pwd::build_game(3, fixtures::prior(prior).unwrap(), VulnMeasure::Bayes).unwrap()
}

fn skewed_prior() -> Checks {
    let mut c = Checks::default();
    let g = pwd_game("pihat");
    let u = g.payoff_table().unwrap();
    for d in 0..6 {
        for a in 0..8 {
            c.check((u[d][a] - PIHAT_TABLE[d][a]).abs() <= 2e-3, || format!("entry ({d},{a}) = {:.4}", u[d][a]));
        }
    }
    let v = solve(&g, GameKind::IV).unwrap().value;
    c.check(close(v, 0.6573, 2e-3), || format!("game value {v}"));
    let w = uniform_worst(&g);
    c.check(close(w, 0.6573, 2e-3), || format!("uniform worst case {w}"));
    c
}

fn other_priors() -> Checks {
    let mut c = Checks::default();
    let g = pwd_game("piA");
    let v = solve(&g, GameKind::IV).unwrap().value;
    c.check(close(v, 0.5625, 1e-4) && close(v, 9.0 / 16.0, 1e-9), || format!("π^(A) value {v}"));
    let w = uniform_worst(&g);
    c.check(close(w, 0.5833, 1e-4) && close(w, 7.0 / 12.0, 1e-9), || format!("π^(A) uniform {w}"));
    let g = pwd_game("piB");
    let v = solve(&g, GameKind::IV).unwrap().value;
    c.check(close(v, 0.4553, 1e-3), || format!("π^(B) value {v}"));
    let w = uniform_worst(&g);
    c.check(close(w, 0.4666, 1e-3), || format!("π^(B) uniform {w}"));
    c
}

fn output_of(ch: &Channel, x: &str) -> usize {
    let m = ch.matrix();
    let r = m.row_index(&Label::atom(x)).unwrap();
    (0..m.n_cols()).find(|&k| m.get(r, k) == 1.0).unwrap()
}

fn uniform_defender() -> Checks {
    let mut c = Checks::default();
    for n in 2..=4 {
        let r = pwd::verify_uniform_equilibrium(n).unwrap();
        c.check(r.attacker_indifferent(1e-9), || format!("n={n}: payoff spread {:.2e}", r.spread));
        c.check(r.uniform_is_optimal(1e-8), || format!("n={n}: uniform {} vs optimum {}", r.uniform_value, r.game_value));
    }
    let zero = [false; 3];
    for rho in pwd::permutations(3) {
        for d in pwd::permutations(3) {
            let moved: Vec<usize> = d.iter().map(|&j| rho[j - 1]).collect();
            let (a, b) = (pwd::pwd_channel(3, &d, &zero).unwrap(), pwd::pwd_channel(3, &moved, &zero).unwrap());
            let ok = pwd::secrets(3).iter().all(|x| {
                let x = x.as_atom().unwrap();
                let mut y = [' '; 3];
                for (j, ch) in x.chars().enumerate() {
                    y[rho[j] - 1] = ch;
                }
                output_of(&a, x) == output_of(&b, &y.iter().collect::<String>())
            });
            c.check(ok, || format!("bit permutation {rho:?} on order {d:?}"));
        }
    }
    let xor = |x: &str, y: &str| -> String { x.chars().zip(y.chars()).map(|(a, b)| if a == b { '0' } else { '1' }).collect() };
    for d in pwd::orders(3) {
        for a in pwd::secrets(3) {
            for b in pwd::secrets(3) {
                let (d, a, b) = (d.as_atom().unwrap(), a.as_atom().unwrap(), b.as_atom().unwrap());
                let (ca, cb) = (pwd::pwd_channel_for(d, a).unwrap(), pwd::pwd_channel_for(d, b).unwrap());
                let mask = xor(a, b);
                let ok = pwd::secrets(3).iter().all(|x| {
                    let x = x.as_atom().unwrap();
                    output_of(&ca, x) == output_of(&cb, &xor(x, &mask))
                });
                c.check(ok, || format!("low-input shift {d} {a}->{b}"));
            }
        }
    }
    c
}

fn iterations() -> Checks {
    let mut c = Checks::default();
    for n in 1..=20u32 {
        let direct = (1..=n).map(|k| k as f64 * 0.5f64.powi(k as i32)).sum::<f64>() + n as f64 * 0.5f64.powi(n as i32);
        let analytic = pwd::expected_iterations(n);
        c.check(close(analytic, direct, 1e-12), || format!("n={n}: {analytic} vs {direct}"));
    }
    for n in [4, 8] {
        let m = pwd::measured_iterations(n, 100_000, 0);
        let e = pwd::expected_iterations(n);
        c.check((m / e - 1.0).abs() < 0.01, || format!("n={n}: measured {m} vs {e}"));
    }
    c
}

fn solver_cross_validation() -> Checks {
    let mut c = Checks::default();
    let mut r = rng(1001);
    for k in 0..50 {
        let (nr, nc) = (r.gen_range(2..=5), r.gen_range(2..=5));
        let m = random_payoff(&mut r, nr, nc);
        let s = solve_matrix_rows(&m).unwrap();
        let fp = fictitious_play(&m, 20_000, k);
        c.check(fp.contains(s.value, 1e-12), || format!("matrix {k}: {} outside [{}, {}]", s.value, fp.lower, fp.upper));
        c.check(s.lp.duality_gap <= 1e-8, || format!("matrix {k}: gap {:.2e}", s.lp.duality_gap));
    }
    for k in 0..50 {
        let (na, nx) = (r.gen_range(2..=3), r.gen_range(2..=4));
        let g = random_game_sized(&mut r, 2, na, nx);
        let s = solve(&g, GameKind::IV).unwrap();
        let grid = (0..=1000)
            .map(|t| {
                let p = t as f64 / 1000.0;
                (0..na).map(|a| g.hidden_payoff(a, &[p, 1.0 - p]).unwrap()).fold(f64::MIN, f64::max)
            })
            .fold(f64::MAX, f64::min);
        c.check(close(s.value, grid, 1e-3), || format!("game {k}: LP {} grid {grid}", s.value));
        c.check(s.diagnostics.duality_gap <= 1e-8, || format!("game {k}: gap {:.2e}", s.diagnostics.duality_gap));
    }
    c
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Checks); 10] = [
        ("running-example game values", running_values),
        ("simultaneous visible game: equilibrium strategies", game_one_equilibrium),
        ("simultaneous hidden game: value and strategies", game_four_equilibrium),
        ("operator algebra on random channels", operator_algebra),
        ("hierarchy of game values, incomparability witness", hierarchy),
        ("password checker under the skewed prior", skewed_prior),
        ("password checker under priors A and B", other_priors),
        ("uniform defender under the uniform prior, channel symmetries", uniform_defender),
        ("expected checker iterations", iterations),
        ("solver cross-validation", solver_cross_validation),
    ];
    let mut failed = vec![];
    for (i, (title, run)) in criteria.iter().enumerate() {
        if !report(i + 1, title, run()) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
