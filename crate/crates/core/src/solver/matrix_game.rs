//! Zero-sum matrix games. The row player minimises, the column player maximises.

use crate::error::{Error, Result};
use crate::matrix::LabeledMatrix;
use crate::solver::lp::{lp_solve, LinearProgram, LpDiagnostics, Relation};

#[derive(Debug, Clone)]
pub struct MatrixGameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
    /// min over rows of the payoff against `col_strategy`; equals `value` at a saddle point.
    pub maxmin_value: f64,
    pub lp: LpDiagnostics,
}

fn check_rows(m: &[Vec<f64>]) -> Result<usize> {
    let nc = m.first().map(|r| r.len()).unwrap_or(0);
    if m.is_empty() || nc == 0 {
        return Err(Error::Shape("payoff matrix must be non-empty".into()));
    }
    if m.iter().any(|r| r.len() != nc) {
        return Err(Error::Shape("ragged payoff matrix".into()));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Shape("non-finite payoff".into()));
    }
    Ok(nc)
}

/// `min_δ max_α δᵀ M α` via the row player's LP; α comes from the duals.
pub fn solve_matrix_rows(m: &[Vec<f64>]) -> Result<MatrixGameSolution> {
    let nc = check_rows(m)?;
    let nr = m.len();
    // vars: δ_0..δ_{nr-1}, z
    let mut obj = vec![0.0; nr + 1];
    obj[nr] = 1.0;
    let mut lp = LinearProgram::minimize(obj);
    lp.free(nr);
    for j in 0..nc {
        let mut row: Vec<f64> = (0..nr).map(|i| m[i][j]).collect();
        row.push(-1.0);
        lp.constrain(row, Relation::Le, 0.0);
    }
    let mut simplex = vec![1.0; nr];
    simplex.push(0.0);
    lp.constrain(simplex, Relation::Eq, 1.0);
    let sol = lp_solve(&lp)?.optimal()?;
    let row_strategy = normalise(&sol.x[..nr]);
    let col_strategy = normalise(&sol.duals[..nc].iter().map(|d| -d).collect::<Vec<_>>());
    let maxmin_value = (0..nr)
        .map(|i| (0..nc).map(|j| m[i][j] * col_strategy[j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(MatrixGameSolution {
        value: sol.objective,
        row_strategy,
        col_strategy,
        maxmin_value,
        lp: sol.diagnostics,
    })
}

pub fn solve_matrix_game(payoff: &LabeledMatrix) -> Result<MatrixGameSolution> {
    solve_matrix_rows(&payoff.to_rows())
}

/// Clamp tiny negatives and rescale to a distribution.
pub(crate) fn normalise(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    if s > 0.0 {
        clipped.iter().map(|x| x / s).collect()
    } else {
        vec![1.0 / v.len() as f64; v.len()]
    }
}

pub fn expected_payoff(m: &[Vec<f64>], row: &[f64], col: &[f64]) -> f64 {
    m.iter()
        .zip(row)
        .map(|(r, p)| p * r.iter().zip(col).map(|(v, q)| v * q).sum::<f64>())
        .sum()
}

/// Widest range any single coordinate of an optimal strategy can take while
/// staying within `tol` of the value. Near zero means the equilibrium is unique.
pub fn equilibrium_spread(m: &[Vec<f64>], value: f64, tol: f64) -> Result<(f64, f64)> {
    let nc = check_rows(m)?;
    let nr = m.len();
    let row_face = |k: usize, maximise: bool| -> Result<f64> {
        let mut obj = vec![0.0; nr];
        obj[k] = 1.0;
        let mut lp = if maximise { LinearProgram::maximize(obj) } else { LinearProgram::minimize(obj) };
        for j in 0..nc {
            lp.constrain((0..nr).map(|i| m[i][j]).collect(), Relation::Le, value + tol);
        }
        lp.constrain(vec![1.0; nr], Relation::Eq, 1.0);
        Ok(lp_solve(&lp)?.optimal()?.objective)
    };
    let col_face = |k: usize, maximise: bool| -> Result<f64> {
        let mut obj = vec![0.0; nc];
        obj[k] = 1.0;
        let mut lp = if maximise { LinearProgram::maximize(obj) } else { LinearProgram::minimize(obj) };
        for row in m {
            lp.constrain(row.clone(), Relation::Ge, value - tol);
        }
        lp.constrain(vec![1.0; nc], Relation::Eq, 1.0);
        Ok(lp_solve(&lp)?.optimal()?.objective)
    };
    let mut rs = 0.0f64;
    for k in 0..nr {
        rs = rs.max(row_face(k, true)? - row_face(k, false)?);
    }
    let mut cs = 0.0f64;
    for k in 0..nc {
        cs = cs.max(col_face(k, true)? - col_face(k, false)?);
    }
    Ok((rs, cs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm2x2 {
    pub value: f64,
    /// probability of the first row
    pub row0: f64,
    /// probability of the first column
    pub col0: f64,
}

/// Indifference formulas for a fully mixed 2×2 equilibrium; `None` when the
/// denominator vanishes or a probability leaves [0, 1].
pub fn closed_form_2x2(u: [[f64; 2]; 2]) -> Option<ClosedForm2x2> {
    let den = u[0][0] - u[0][1] - u[1][0] + u[1][1];
    if den.abs() < 1e-15 {
        return None;
    }
    let row0 = (u[1][1] - u[1][0]) / den;
    let col0 = (u[1][1] - u[0][1]) / den;
    if !(0.0..=1.0).contains(&row0) || !(0.0..=1.0).contains(&col0) {
        return None;
    }
    let row = [row0, 1.0 - row0];
    let col = [col0, 1.0 - col0];
    let value = (0..2).map(|i| (0..2).map(|j| row[i] * col[j] * u[i][j]).sum::<f64>()).sum();
    Some(ClosedForm2x2 { value, row0, col0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_example_visible_game() {
        let m = vec![vec![0.5, 1.0], vec![1.0, 2.0 / 3.0]];
        let s = solve_matrix_rows(&m).unwrap();
        assert!((s.value - 0.8).abs() < 1e-12);
        assert!((s.row_strategy[0] - 0.4).abs() < 1e-12);
        assert!((s.col_strategy[0] - 0.4).abs() < 1e-12);
        assert!((s.maxmin_value - s.value).abs() < 1e-12);
        let (rs, cs) = equilibrium_spread(&m, s.value, 1e-10).unwrap();
        assert!(rs < 1e-8 && cs < 1e-8);
        let cf = closed_form_2x2([[0.5, 1.0], [1.0, 2.0 / 3.0]]).unwrap();
        assert!((cf.row0 - 0.4).abs() < 1e-15 && (cf.col0 - 0.4).abs() < 1e-15);
        assert!((cf.value - 0.8).abs() < 1e-15);
    }

    #[test]
    fn matching_pennies_and_constants() {
        let s = solve_matrix_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        assert!((s.row_strategy[0] - 0.5).abs() < 1e-12);
        assert!((s.col_strategy[0] - 0.5).abs() < 1e-12);
        assert_eq!(closed_form_2x2([[0.0, 1.0], [1.0, 0.0]]).map(|c| c.row0), Some(0.5));
        let k = vec![vec![0.3; 3]; 2];
        let c = solve_matrix_rows(&k).unwrap();
        assert!((c.value - 0.3).abs() < 1e-12);
        let (rs, _) = equilibrium_spread(&k, c.value, 1e-10).unwrap();
        assert!(rs > 0.99, "any strategy is optimal for a constant game");
    }

    #[test]
    fn closed_form_not_applicable() {
        assert_eq!(closed_form_2x2([[1.0, 0.0], [2.0, 1.0]]), None);
        // pure saddle in the corner: formula leaves [0, 1]
        assert_eq!(closed_form_2x2([[0.0, 3.0], [1.0, 2.0]]), None);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(solve_matrix_rows(&[]).is_err());
        assert!(solve_matrix_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
