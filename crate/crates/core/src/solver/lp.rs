//! Dense two-phase primal simplex: Bland's entering rule with a Harris ratio test.
//!
//! Variables get arbitrary bounds; the problem is rewritten into
//! `min c'x', A'x' = b' >= 0, x' >= 0` with slacks, surpluses and artificials,
//! then solved on a full tableau. Small dense problems only.

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;
const DROP: f64 = 1e-14;
/// bound relaxation of the first Harris pass
const HARRIS: f64 = 1e-9;
/// consecutive degenerate pivots before the right-hand side is perturbed
const STALL: usize = 200;
/// relative size of that perturbation
const PERTURB: f64 = 1e-6;
const MAX_PIVOTS: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const NONNEG: Bounds = Bounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: Bounds = Bounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    /// All variables default to `x >= 0`.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { sense, objective, constraints: Vec::new(), bounds: vec![Bounds::NONNEG; n] }
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a constraint and returns its index (the index of its dual value).
    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = Bounds { lower, upper };
    }

    pub fn free(&mut self, var: usize) {
        self.bounds[var] = Bounds::FREE;
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.bounds.len() != n {
            return Err(Error::Shape(format!("{} bounds for {} variables", self.bounds.len(), n)));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Shape(format!(
                    "constraint {i} has {} coefficients, objective has {n}",
                    c.coeffs.len()
                )));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::Shape(format!("constraint {i} has a non-finite entry")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("non-finite objective coefficient".into()));
        }
        if self.bounds.iter().any(|b| b.lower.is_nan() || b.upper.is_nan()) {
            return Err(Error::Shape("NaN variable bound".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Default)]
pub struct LpDiagnostics {
    pub pivots: usize,
    /// Rows and columns of the standard-form tableau.
    pub rows: usize,
    pub cols: usize,
    /// Largest violation of a constraint or bound by the returned point.
    pub primal_residual: f64,
    /// |primal objective - dual objective| on the standard form.
    pub duality_gap: f64,
    /// Most negative reduced cost recomputed from the original data.
    pub dual_infeasibility: f64,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// One per constraint: d(optimal objective) / d(rhs).
    pub duals: Vec<f64>,
    pub objective: f64,
    pub diagnostics: LpDiagnostics,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Ok only for an optimal solution.
    pub fn optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            s => Err(Error::Solver(format!("linear program is {s:?}").to_lowercase())),
        }
    }
}

/// x_j = offset + sum(coef * x'_k)
struct VarMap {
    offset: f64,
    parts: Vec<(usize, f64)>,
}

struct StdForm {
    n_struct: usize,
    var_maps: Vec<VarMap>,
    /// standard-form rows over structural columns, after shifting/flipping
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    relation: Vec<Relation>,
    /// +1 or -1 if the row was negated to make rhs >= 0
    sign: Vec<f64>,
    cost: Vec<f64>,
    n_orig_rows: usize,
}

fn to_standard(lp: &LinearProgram) -> std::result::Result<StdForm, LpStatus> {
    let mut var_maps = Vec::with_capacity(lp.n_vars());
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    let mut k = 0;
    for b in &lp.bounds {
        if b.lower > b.upper {
            return Err(LpStatus::Infeasible);
        }
        let map = match (b.lower.is_finite(), b.upper.is_finite()) {
            (true, up) => {
                if up {
                    bound_rows.push((k, b.upper - b.lower));
                }
                VarMap { offset: b.lower, parts: vec![(k, 1.0)] }
            }
            (false, true) => VarMap { offset: b.upper, parts: vec![(k, -1.0)] },
            (false, false) => {
                k += 1;
                VarMap { offset: 0.0, parts: vec![(k - 1, 1.0), (k, -1.0)] }
            }
        };
        k += 1;
        var_maps.push(map);
    }
    let n_struct = k;
    let sense = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; n_struct];
    for (j, m) in var_maps.iter().enumerate() {
        for &(s, c) in &m.parts {
            cost[s] += sense * lp.objective[j] * c;
        }
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut relation = Vec::new();
    for con in &lp.constraints {
        let mut row = vec![0.0; n_struct];
        let mut b = con.rhs;
        for (j, &a) in con.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            b -= a * var_maps[j].offset;
            for &(s, c) in &var_maps[j].parts {
                row[s] += a * c;
            }
        }
        rows.push(row);
        rhs.push(b);
        relation.push(con.relation);
    }
    for (s, ub) in bound_rows {
        let mut row = vec![0.0; n_struct];
        row[s] = 1.0;
        rows.push(row);
        rhs.push(ub);
        relation.push(Relation::Le);
    }
    let mut sign = vec![1.0; rows.len()];
    for i in 0..rows.len() {
        if rhs[i] < 0.0 {
            sign[i] = -1.0;
            rhs[i] = -rhs[i];
            rows[i].iter_mut().for_each(|v| *v = -*v);
            relation[i] = match relation[i] {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    Ok(StdForm {
        n_struct,
        var_maps,
        rows,
        rhs,
        relation,
        sign,
        cost,
        n_orig_rows: lp.constraints.len(),
    })
}

struct Tableau {
    m: usize,
    width: usize, // columns + rhs
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    barred: Vec<bool>,
    pivots: usize,
    stalled: usize,
    /// standard-form right-hand side, for undoing perturbations
    b: Vec<f64>,
    /// columns that formed the initial identity basis; in the tableau they hold B⁻¹
    identity_col: Vec<usize>,
    perturbed: bool,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r * self.width + self.width - 1]
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.width;
        let inv = 1.0 / self.t[p * w + q];
        let mut prow: Vec<f64> = self.t[p * w..(p + 1) * w].to_vec();
        for v in prow.iter_mut() {
            *v *= inv;
            if v.abs() < DROP {
                *v = 0.0;
            }
        }
        prow[q] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&k| prow[k] != 0.0).collect();
        for r in 0..self.m {
            if r == p {
                continue;
            }
            let f = self.t[r * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[r * w..(r + 1) * w];
            for &k in &nz {
                row[k] -= f * prow[k];
                if row[k].abs() < DROP {
                    row[k] = 0.0;
                }
            }
            row[q] = 0.0;
        }
        let f = self.obj[q];
        if f != 0.0 {
            for &k in &nz {
                self.obj[k] -= f * prow[k];
            }
            self.obj[q] = 0.0;
        }
        self.t[p * w..(p + 1) * w].copy_from_slice(&prow);
        // round-off must not leave a basic variable slightly negative
        for r in 0..self.m {
            let b = &mut self.t[r * w + w - 1];
            if *b < 0.0 && *b > -2.0 * HARRIS {
                *b = 0.0;
            }
        }
        self.basis[p] = q;
        self.pivots += 1;
    }

    /// Reduced costs for cost vector `c` given the current basis.
    fn price(&mut self, c: &[f64]) {
        let w = self.width;
        let mut obj = vec![0.0; w];
        obj[..c.len()].copy_from_slice(c);
        for r in 0..self.m {
            let cb = c[self.basis[r]];
            if cb != 0.0 {
                for k in 0..w {
                    obj[k] -= cb * self.t[r * w + k];
                }
            }
        }
        self.obj = obj;
    }

    /// Leaving row for entering column `q`. The first pass finds the largest step
    /// allowed when every bound is relaxed by `HARRIS`; the second picks, among
    /// rows blocking within that step, the largest pivot (ties: lowest basic index).
    fn leaving(&self, q: usize) -> Option<usize> {
        let rows = || (0..self.m).filter(move |&r| self.at(r, q) > EPS);
        let limit = rows().map(|r| (self.rhs(r).max(0.0) + HARRIS) / self.at(r, q)).fold(f64::INFINITY, f64::min);
        if limit.is_infinite() {
            return None;
        }
        rows().filter(|&r| self.rhs(r).max(0.0) / self.at(r, q) <= limit).fold(None, |best, r| match best {
            Some(b) if self.at(b, q) > self.at(r, q) || self.at(b, q) == self.at(r, q) && self.basis[b] < self.basis[r] => {
                Some(b)
            }
            _ => Some(r),
        })
    }

    /// Shifts every basic value up by a small row-dependent amount, which breaks
    /// the ties that let degenerate pivots cycle.
    fn perturb(&mut self) {
        let w = self.width;
        for r in 0..self.m {
            let jitter = 1.0 + ((r * 7919 + 13) % 101) as f64 / 101.0;
            self.t[r * w + w - 1] += PERTURB * jitter * (1.0 + self.rhs(r).abs());
        }
        self.perturbed = true;
        self.stalled = 0;
        log::debug!("perturbed right-hand side after {} pivots", self.pivots);
    }

    /// Recomputes the basic values `B⁻¹b` for the unperturbed right-hand side.
    fn restore(&mut self) {
        let w = self.width;
        for r in 0..self.m {
            let v: f64 = self.identity_col.iter().zip(&self.b).map(|(&c, &bi)| self.at(r, c) * bi).sum();
            self.t[r * w + w - 1] = if v.abs() < DROP { 0.0 } else { v };
        }
        self.perturbed = false;
    }

    /// Dual simplex pivots until the basic values are non-negative; reduced
    /// costs stay non-negative throughout.
    fn dual_repair(&mut self) -> Result<()> {
        let ncols = self.width - 1;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Solver(format!("pivot limit {MAX_PIVOTS} exceeded")));
            }
            let Some(p) = (0..self.m)
                .filter(|&r| self.rhs(r) < -EPS)
                .fold(None, |b: Option<usize>, r| match b {
                    Some(b) if self.rhs(b) <= self.rhs(r) => Some(b),
                    _ => Some(r),
                })
            else {
                return Ok(());
            };
            let q = (0..ncols)
                .filter(|&j| !self.barred[j] && self.at(p, j) < -EPS)
                .fold(None, |b: Option<usize>, j| {
                    let ratio = |k: usize| self.obj[k].max(0.0) / -self.at(p, k);
                    match b {
                        Some(b) if ratio(b) < ratio(j) || ratio(b) == ratio(j) && self.at(p, b) <= self.at(p, j) => Some(b),
                        _ => Some(j),
                    }
                })
                .ok_or_else(|| Error::Internal("restored basis is primal infeasible".into()))?;
            self.pivot(p, q);
        }
    }

    /// Iterates to optimality for the current reduced costs, then re-prices
    /// against `cost` from scratch and continues if round-off hid an improving
    /// column. Returns false if unbounded.
    fn run(&mut self, cost: &[f64]) -> Result<bool> {
        let ncols = self.width - 1;
        loop {
            loop {
                if self.pivots > MAX_PIVOTS {
                    return Err(Error::Solver(format!("pivot limit {MAX_PIVOTS} exceeded")));
                }
                let Some(q) = (0..ncols).find(|&j| !self.barred[j] && self.obj[j] < -EPS) else {
                    break;
                };
                let Some(p) = self.leaving(q) else {
                    return Ok(false);
                };
                if self.rhs(p) <= EPS {
                    self.stalled += 1;
                } else {
                    self.stalled = 0;
                }
                self.pivot(p, q);
                if self.stalled >= STALL {
                    self.perturb();
                }
                if log::log_enabled!(log::Level::Trace) {
                    log::trace!("pivot {} on ({p},{q}) obj {:.12}", self.pivots, -self.obj[ncols]);
                }
            }
            if self.perturbed {
                self.restore();
                self.price(cost);
                self.dual_repair()?;
            }
            self.price(cost);
            if !(0..ncols).any(|j| !self.barred[j] && self.obj[j] < -EPS) {
                return Ok(true);
            }
        }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let failed = |status| LpSolution {
        status,
        x: vec![0.0; lp.n_vars()],
        duals: vec![0.0; lp.constraints.len()],
        objective: f64::NAN,
        diagnostics: LpDiagnostics::default(),
    };
    let sf = match to_standard(lp) {
        Ok(sf) => sf,
        Err(status) => return Ok(failed(status)),
    };
    let m = sf.rows.len();
    let ns = sf.n_struct;
    // column layout: structural | slack/surplus | artificial
    let mut ncols = ns;
    let mut slack_col = vec![None; m];
    for i in 0..m {
        if sf.relation[i] != Relation::Eq {
            slack_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let mut art_col = vec![None; m];
    for i in 0..m {
        if sf.relation[i] != Relation::Le {
            art_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let n_art_start = ncols - art_col.iter().flatten().count();
    let width = ncols + 1;
    let mut t = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let mut identity_col = vec![0; m];
    for i in 0..m {
        t[i * width..i * width + ns].copy_from_slice(&sf.rows[i]);
        t[i * width + ncols] = sf.rhs[i];
        match sf.relation[i] {
            Relation::Le => {
                let s = slack_col[i].unwrap();
                t[i * width + s] = 1.0;
                basis[i] = s;
            }
            Relation::Ge => {
                t[i * width + slack_col[i].unwrap()] = -1.0;
                let a = art_col[i].unwrap();
                t[i * width + a] = 1.0;
                basis[i] = a;
            }
            Relation::Eq => {
                let a = art_col[i].unwrap();
                t[i * width + a] = 1.0;
                basis[i] = a;
            }
        }
        identity_col[i] = basis[i];
    }
    let original = t.clone();
    let mut tab = Tableau {
        m,
        width,
        t,
        obj: vec![0.0; width],
        basis,
        barred: vec![false; ncols],
        pivots: 0,
        stalled: 0,
        b: sf.rhs.clone(),
        identity_col: identity_col.clone(),
        perturbed: false,
    };

    if n_art_start < ncols {
        let mut c1 = vec![0.0; ncols];
        c1[n_art_start..].iter_mut().for_each(|v| *v = 1.0);
        tab.price(&c1);
        tab.run(&c1)?;
        let infeasibility = tab.obj[ncols].abs();
        let scale = 1.0 + sf.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        // real infeasibility in this library's problems is of order one; what
        // is left at 1e-9 is round-off on badly scaled entries
        if infeasibility > 1e-7 * scale {
            log::debug!("phase 1 ended with infeasibility {infeasibility:e}");
            return Ok(failed(LpStatus::Infeasible));
        }
        for j in n_art_start..ncols {
            tab.barred[j] = true;
        }
        // drive zero-valued artificials out of the basis
        for r in 0..m {
            if tab.basis[r] >= n_art_start {
                if let Some(q) = (0..n_art_start).find(|&j| tab.at(r, j).abs() > EPS) {
                    tab.pivot(r, q);
                }
            }
        }
    }

    let mut c2 = vec![0.0; ncols];
    c2[..ns].copy_from_slice(&sf.cost);
    tab.price(&c2);
    if !tab.run(&c2)? {
        return Ok(failed(LpStatus::Unbounded));
    }

    let mut xs = vec![0.0; ncols];
    for r in 0..m {
        xs[tab.basis[r]] = tab.rhs(r);
    }
    let x: Vec<f64> = sf
        .var_maps
        .iter()
        .map(|vm| vm.offset + vm.parts.iter().map(|&(s, c)| c * xs[s]).sum::<f64>())
        .collect();
    // y = c_B B^-1, read off the reduced costs of the initial identity columns
    let y: Vec<f64> = (0..m).map(|i| c2[identity_col[i]] - tab.obj[identity_col[i]]).collect();
    let sense = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let duals: Vec<f64> = (0..sf.n_orig_rows).map(|i| sense * sf.sign[i] * y[i]).collect();
    let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    let primal_std: f64 = c2.iter().zip(&xs).map(|(c, v)| c * v).sum();
    let dual_std: f64 = y.iter().zip(&sf.rhs).map(|(a, b)| a * b).sum();
    let mut dual_infeasibility = 0.0f64;
    for j in 0..n_art_start {
        let mut rc = c2[j];
        for i in 0..m {
            rc -= y[i] * original[i * width + j];
        }
        dual_infeasibility = dual_infeasibility.max(-rc);
    }
    let diagnostics = LpDiagnostics {
        pivots: tab.pivots,
        rows: m,
        cols: ncols,
        primal_residual: primal_residual(lp, &x),
        duality_gap: (primal_std - dual_std).abs(),
        dual_infeasibility,
    };
    log::debug!(
        "lp {}x{} solved in {} pivots, gap {:e}",
        m,
        ncols,
        diagnostics.pivots,
        diagnostics.duality_gap
    );
    Ok(LpSolution { status: LpStatus::Optimal, x, duals, objective, diagnostics })
}

/// Largest constraint or bound violation of `x`.
pub fn primal_residual(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let viol = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    for (b, &v) in lp.bounds.iter().zip(x) {
        worst = worst.max(b.lower - v).max(v - b.upper);
    }
    worst
}
