//! Games whose payoff is convex piecewise-linear in the defender's mix and
//! linear in the attacker's: `U(δ, α) = Σ_a α(a) V_a(δ)` with
//! `V_a(δ) = Σ_g max_{p ∈ g} ⟨p, δ⟩`, solved exactly through the epigraph LP.

use crate::error::{Error, Result};
use crate::solver::lp::{lp_solve, LinearProgram, LpDiagnostics, Relation};
use crate::solver::matrix_game::normalise;

/// Pieces of `V_a`, grouped per attacker action then per max-group (one group per observable).
#[derive(Debug, Clone)]
pub struct EpigraphPayoff {
    n_defender: usize,
    actions: Vec<Vec<Vec<Vec<f64>>>>,
}

impl EpigraphPayoff {
    pub fn new(n_defender: usize) -> Self {
        Self { n_defender, actions: Vec::new() }
    }

    pub fn n_defender(&self) -> usize {
        self.n_defender
    }

    pub fn n_attacker(&self) -> usize {
        self.actions.len()
    }

    /// Appends attacker action with the given groups of pieces; returns its index.
    pub fn push_action(&mut self, groups: Vec<Vec<Vec<f64>>>) -> Result<usize> {
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Shape("empty max-group in epigraph payoff".into()));
            }
            if g.iter().any(|p| p.len() != self.n_defender) {
                return Err(Error::Shape(format!(
                    "epigraph piece length differs from {} defender actions",
                    self.n_defender
                )));
            }
        }
        self.actions.push(groups);
        Ok(self.actions.len() - 1)
    }

    pub fn eval(&self, a: usize, delta: &[f64]) -> f64 {
        self.actions[a]
            .iter()
            .map(|g| {
                g.iter()
                    .map(|p| p.iter().zip(delta).map(|(c, d)| c * d).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    }

    pub fn eval_mixed(&self, delta: &[f64], alpha: &[f64]) -> f64 {
        alpha.iter().enumerate().map(|(a, w)| w * self.eval(a, delta)).sum()
    }

    /// Removes pointwise-dominated pieces and groups that are identically zero.
    /// Leaves every `V_a` unchanged.
    pub fn pruned(&self) -> Self {
        let actions = self
            .actions
            .iter()
            .map(|groups| {
                groups
                    .iter()
                    .filter_map(|g| {
                        let kept = undominated(g);
                        let zero = kept.len() == 1 && kept[0].iter().all(|&c| c == 0.0);
                        (!zero).then_some(kept)
                    })
                    .collect()
            })
            .collect();
        Self { n_defender: self.n_defender, actions }
    }

    pub fn n_pieces(&self) -> usize {
        self.actions.iter().flatten().map(|g| g.len()).sum()
    }
}

fn undominated(g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dominates = |q: &[f64], p: &[f64]| q.iter().zip(p).all(|(a, b)| a >= b);
    let mut kept: Vec<Vec<f64>> = Vec::new();
    'outer: for (i, p) in g.iter().enumerate() {
        for (j, q) in g.iter().enumerate() {
            // equal pieces: keep the first occurrence only
            if i != j && dominates(q, p) && (q != p || j < i) {
                continue 'outer;
            }
        }
        kept.push(p.clone());
    }
    kept
}

#[derive(Debug, Clone)]
pub struct ConvexGameSolution {
    pub value: f64,
    pub defender: Vec<f64>,
    pub attacker: Vec<f64>,
    /// Optimum of the explicit max-min (dual) program, solved separately.
    pub maxmin_value: f64,
    pub lp: LpDiagnostics,
    pub dual_lp: LpDiagnostics,
}

struct PrimalLayout {
    lp: LinearProgram,
    n_def: usize,
    z: usize,
    per_action_rows: Vec<usize>,
}

fn primal(p: &EpigraphPayoff) -> PrimalLayout {
    let n_def = p.n_defender;
    let n_groups: usize = p.actions.iter().map(|a| a.len()).sum();
    let n = n_def + n_groups + 1;
    let z = n - 1;
    let mut obj = vec![0.0; n];
    obj[z] = 1.0;
    let mut lp = LinearProgram::minimize(obj);
    for k in n_def..n {
        lp.free(k);
    }
    let mut t = n_def;
    let mut per_action_rows = Vec::with_capacity(p.actions.len());
    let mut action_t = Vec::with_capacity(p.actions.len());
    for groups in &p.actions {
        let start = t;
        for g in groups {
            for piece in g {
                let mut row = vec![0.0; n];
                row[..n_def].copy_from_slice(piece);
                row[t] = -1.0;
                lp.constrain(row, Relation::Le, 0.0);
            }
            t += 1;
        }
        action_t.push(start..t);
    }
    for range in action_t {
        let mut row = vec![0.0; n];
        for k in range {
            row[k] = 1.0;
        }
        row[z] = -1.0;
        per_action_rows.push(lp.constrain(row, Relation::Le, 0.0));
    }
    let mut simplex = vec![0.0; n];
    simplex[..n_def].iter_mut().for_each(|v| *v = 1.0);
    lp.constrain(simplex, Relation::Eq, 1.0);
    PrimalLayout { lp, n_def, z, per_action_rows }
}

/// `max v` s.t. `Σα = 1`, `Σ_{p∈g} λ_p = α_a` per group, `v ≤ Σ_p λ_p p[d]` per d.
fn dual(p: &EpigraphPayoff) -> (LinearProgram, usize) {
    let n_att = p.actions.len();
    let n_pieces = p.n_pieces();
    let n = n_att + n_pieces + 1;
    let v = n - 1;
    let mut obj = vec![0.0; n];
    obj[v] = 1.0;
    let mut lp = LinearProgram::maximize(obj);
    lp.free(v);
    let mut simplex = vec![0.0; n];
    simplex[..n_att].iter_mut().for_each(|x| *x = 1.0);
    lp.constrain(simplex, Relation::Eq, 1.0);
    let mut k = n_att;
    let mut piece_rows = vec![vec![0.0; n]; p.n_defender];
    for (a, groups) in p.actions.iter().enumerate() {
        for g in groups {
            let mut row = vec![0.0; n];
            row[a] = -1.0;
            for piece in g {
                row[k] = 1.0;
                for (d, &c) in piece.iter().enumerate() {
                    piece_rows[d][k] = -c;
                }
                k += 1;
            }
            lp.constrain(row, Relation::Eq, 0.0);
        }
    }
    for mut row in piece_rows {
        row[v] = 1.0;
        lp.constrain(row, Relation::Le, 0.0);
    }
    (lp, v)
}

pub fn solve_convex_linear_game(payoff: &EpigraphPayoff) -> Result<ConvexGameSolution> {
    if payoff.n_defender == 0 || payoff.actions.is_empty() {
        return Err(Error::Shape("game needs at least one action per player".into()));
    }
    let p = payoff.pruned();
    let layout = primal(&p);
    let sol = lp_solve(&layout.lp)?.optimal()?;
    let defender = normalise(&sol.x[..layout.n_def]);
    let attacker =
        normalise(&layout.per_action_rows.iter().map(|&r| -sol.duals[r]).collect::<Vec<_>>());
    let (dlp, _) = dual(&p);
    let dsol = lp_solve(&dlp)?.optimal()?;
    Ok(ConvexGameSolution {
        value: sol.x[layout.z],
        defender,
        attacker,
        maxmin_value: dsol.objective,
        lp: sol.diagnostics,
        dual_lp: dsol.diagnostics,
    })
}

/// Widest coordinate range over near-optimal strategies of each player (within `tol`
/// of `value`). Both near zero means the equilibrium is unique.
pub fn convex_game_spread(payoff: &EpigraphPayoff, value: f64, tol: f64) -> Result<(f64, f64)> {
    let p = payoff.pruned();
    let layout = primal(&p);
    let mut def_spread = 0.0f64;
    for d in 0..layout.n_def {
        let mut range = [0.0; 2];
        for (slot, maximise) in [false, true].into_iter().enumerate() {
            let mut lp = layout.lp.clone();
            lp.objective = vec![0.0; lp.n_vars()];
            lp.objective[d] = 1.0;
            lp.sense = if maximise {
                crate::solver::lp::Sense::Maximize
            } else {
                crate::solver::lp::Sense::Minimize
            };
            lp.set_bounds(layout.z, f64::NEG_INFINITY, value + tol);
            range[slot] = lp_solve(&lp)?.optimal()?.objective;
        }
        def_spread = def_spread.max(range[1] - range[0]);
    }
    let (dlp, v) = dual(&p);
    let mut att_spread = 0.0f64;
    for a in 0..p.actions.len() {
        let mut range = [0.0; 2];
        for (slot, maximise) in [false, true].into_iter().enumerate() {
            let mut lp = dlp.clone();
            lp.objective = vec![0.0; lp.n_vars()];
            lp.objective[a] = 1.0;
            lp.sense = if maximise {
                crate::solver::lp::Sense::Maximize
            } else {
                crate::solver::lp::Sense::Minimize
            };
            lp.set_bounds(v, value - tol, f64::INFINITY);
            range[slot] = lp_solve(&lp)?.optimal()?.objective;
        }
        att_spread = att_spread.max(range[1] - range[0]);
    }
    Ok((def_spread, att_spread))
}
