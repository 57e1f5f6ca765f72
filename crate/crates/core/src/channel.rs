use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::{concat, sum, LabeledMatrix};
use crate::solver::lp::{lp_solve, LinearProgram, Relation};

/// Entry and row-sum tolerance for channel validation.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Default ∞-norm tolerance for [`equivalent`].
pub const EQUIV_TOL: f64 = 1e-7;

/// A stochastic matrix: rows are secrets, columns observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    matrix: LabeledMatrix,
}

impl Channel {
    /// Validates to within [`CHANNEL_TOL`] and renormalises rows exactly.
    pub fn new(matrix: LabeledMatrix) -> Result<Self> {
        let mut data = Vec::with_capacity(matrix.entries().len());
        for r in 0..matrix.n_rows() {
            let row = matrix.row(r);
            if let Some(v) = row.iter().find(|v| !(-CHANNEL_TOL..=1.0 + CHANNEL_TOL).contains(*v)) {
                return Err(Error::NotAChannel(format!(
                    "entry {v} in row `{}` outside [0, 1]",
                    matrix.rows()[r]
                )));
            }
            let s: f64 = row.iter().map(|v| v.max(0.0)).sum();
            if (s - 1.0).abs() > CHANNEL_TOL {
                return Err(Error::NotAChannel(format!(
                    "row `{}` sums to {s}",
                    matrix.rows()[r]
                )));
            }
            data.extend(row.iter().map(|v| v.max(0.0) / s));
        }
        let matrix = LabeledMatrix::from_flat(matrix.rows().to_vec(), matrix.cols().to_vec(), data)?;
        Ok(Self { matrix })
    }

    pub fn from_atoms<R: AsRef<str>, C: AsRef<str>>(
        rows: &[R],
        cols: &[C],
        data: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new(LabeledMatrix::from_atoms(rows, cols, data)?)
    }

    pub fn matrix(&self) -> &LabeledMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> LabeledMatrix {
        self.matrix
    }

    pub fn secrets(&self) -> &[Label] {
        self.matrix.rows()
    }

    pub fn outputs(&self) -> &[Label] {
        self.matrix.cols()
    }

    pub fn same_type(&self, other: &Channel) -> bool {
        self.matrix.same_type(&other.matrix)
    }

    /// Every row equal: the output carries no information about the secret.
    pub fn is_non_interferent(&self, tol: f64) -> bool {
        let m = &self.matrix;
        (1..m.n_rows()).all(|r| m.row(r).iter().zip(m.row(0)).all(|(a, b)| (a - b).abs() <= tol))
    }
}

/// Probability distribution over index labels; order is kept for visible choice.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexDistribution {
    entries: Vec<(Label, f64)>,
}

impl IndexDistribution {
    pub fn new(entries: Vec<(Label, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (l, w) in &entries {
            if !seen.insert(l) {
                return Err(Error::DuplicateIndex(l.to_string()));
            }
            if !w.is_finite() || *w < -CHANNEL_TOL {
                return Err(Error::BadDistribution(format!("weight {w} for `{l}`")));
            }
        }
        let s: f64 = entries.iter().map(|(_, w)| w.max(0.0)).sum();
        if entries.is_empty() || (s - 1.0).abs() > CHANNEL_TOL {
            return Err(Error::BadDistribution(format!("weights sum to {s}")));
        }
        Ok(Self { entries: entries.into_iter().map(|(l, w)| (l, w.max(0.0) / s)).collect() })
    }

    /// `{1: p, 2: 1 - p}`
    pub fn binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadDistribution(format!("p = {p} outside [0, 1]")));
        }
        Self::new(vec![(Label::atom("1"), p), (Label::atom("2"), 1.0 - p)])
    }

    pub fn point(index: Label) -> Self {
        Self { entries: vec![(index, 1.0)] }
    }

    pub fn entries(&self) -> &[(Label, f64)] {
        &self.entries
    }

    pub fn weight(&self, index: &Label) -> f64 {
        self.entries.iter().find(|(l, _)| l == index).map_or(0.0, |(_, w)| *w)
    }

    /// Product distribution over pair indexes `i@j`.
    pub fn product(&self, other: &IndexDistribution) -> Self {
        let entries = self
            .entries
            .iter()
            .flat_map(|(i, p)| {
                other.entries.iter().map(move |(j, q)| (Label::tagged(i.clone(), j.clone()), p * q))
            })
            .collect();
        Self { entries }
    }
}

fn lookup<'a>(mu: &IndexDistribution, family: &[(Label, &'a Channel)]) -> Result<Vec<(Label, f64, &'a Channel)>> {
    let mut seen = HashSet::new();
    for (l, _) in family {
        if !seen.insert(l) {
            return Err(Error::DuplicateIndex(l.to_string()));
        }
    }
    mu.entries
        .iter()
        .map(|(i, w)| {
            family
                .iter()
                .find(|(l, _)| l == i)
                .map(|(_, c)| (i.clone(), *w, *c))
                .ok_or_else(|| Error::BadDistribution(format!("index `{i}` has no channel")))
        })
        .collect()
}

/// `Σ_i μ(i) C_i`. Every channel named by `mu` must share rows and columns.
pub fn hidden_choice(mu: &IndexDistribution, family: &[(Label, &Channel)]) -> Result<Channel> {
    let picked = lookup(mu, family)?;
    let (first_label, _, first) = &picked[0];
    for (l, _, c) in &picked[1..] {
        if !c.same_type(first) {
            return Err(Error::TypeMismatch(format!(
                "channels `{first_label}` and `{l}` differ in secrets or outputs"
            )));
        }
    }
    let scaled: Vec<LabeledMatrix> = picked.iter().map(|(_, w, c)| c.matrix.scaled(*w)).collect();
    Channel::new(sum(&scaled.iter().collect::<Vec<_>>())?)
}

/// `⋄_i μ(i) C_i`, columns tagged `(y, i)`. Every channel named by `mu` must share rows.
/// Indexes with weight 0 still contribute (all-zero) columns.
pub fn visible_choice(mu: &IndexDistribution, family: &[(Label, &Channel)]) -> Result<Channel> {
    let picked = lookup(mu, family)?;
    let scaled: Vec<(Label, LabeledMatrix)> =
        picked.iter().map(|(l, w, c)| (l.clone(), c.matrix.scaled(*w))).collect();
    let blocks: Vec<(Label, &LabeledMatrix)> = scaled.iter().map(|(l, m)| (l.clone(), m)).collect();
    Channel::new(concat(&blocks)?)
}

pub fn binary_hidden(p: f64, c1: &Channel, c2: &Channel) -> Result<Channel> {
    hidden_choice(&IndexDistribution::binary(p)?, &[(Label::atom("1"), c1), (Label::atom("2"), c2)])
}

pub fn binary_visible(p: f64, c1: &Channel, c2: &Channel) -> Result<Channel> {
    visible_choice(&IndexDistribution::binary(p)?, &[(Label::atom("1"), c1), (Label::atom("2"), c2)])
}

/// Adds one all-zero column under a label not already present.
pub fn zero_extend(c: &Channel) -> Channel {
    let taken: HashSet<&Label> = c.outputs().iter().collect();
    let fresh = (0..)
        .map(|k| Label::atom(if k == 0 { "#zero".to_string() } else { format!("#zero{k}") }))
        .find(|l| !taken.contains(l))
        .expect("unbounded label supply");
    let m = &c.matrix;
    let mut cols = m.cols().to_vec();
    cols.push(fresh);
    let mut data = Vec::with_capacity(m.n_rows() * cols.len());
    for r in 0..m.n_rows() {
        data.extend_from_slice(m.row(r));
        data.push(0.0);
    }
    let matrix = LabeledMatrix::from_flat(m.rows().to_vec(), cols, data).expect("shape preserved");
    Channel { matrix }
}

/// How well `target` is reproduced by post-processing `source`: `target ≈ source · R`
/// with `R` row-stochastic (source outputs × target outputs).
#[derive(Debug, Clone)]
pub struct Refinement {
    /// smallest achievable max-entry error
    pub residual: f64,
    pub holds: bool,
    /// the post-processing map found
    pub map: LabeledMatrix,
    /// target column with the largest error (only when `holds` is false)
    pub worst_column: Option<Label>,
}

#[derive(Debug, Clone)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `c1` recovered from `c2`
    pub forward: Refinement,
    /// `c2` recovered from `c1`
    pub backward: Refinement,
}

/// Solves `min ε` s.t. `|source·R − target| ≤ ε` entrywise, `R ≥ 0`, rows of `R` sum to 1.
pub fn refinement(target: &Channel, source: &Channel, tol: f64) -> Result<Refinement> {
    if !target.matrix.compatible(&source.matrix) {
        return Err(Error::IncompatibleRows("channels have different secret sets".into()));
    }
    let rows = target.secrets();
    let src = source.matrix.aligned(rows, source.outputs())?;
    let tgt = &target.matrix;
    let (nx, ns, nt) = (rows.len(), src.n_cols(), tgt.n_cols());
    let n = ns * nt + 1;
    let eps = n - 1;
    let var = |k: usize, j: usize| k * nt + j;
    let mut obj = vec![0.0; n];
    obj[eps] = 1.0;
    let mut lp = LinearProgram::minimize(obj);
    for j in 0..nt {
        for x in 0..nx {
            let mut row = vec![0.0; n];
            for k in 0..ns {
                row[var(k, j)] = src.get(x, k);
            }
            let mut upper = row.clone();
            upper[eps] = -1.0;
            lp.constrain(upper, Relation::Le, tgt.get(x, j));
            row[eps] = 1.0;
            lp.constrain(row, Relation::Ge, tgt.get(x, j));
        }
    }
    for k in 0..ns {
        let mut row = vec![0.0; n];
        for j in 0..nt {
            row[var(k, j)] = 1.0;
        }
        lp.constrain(row, Relation::Eq, 1.0);
    }
    let sol = lp_solve(&lp)?.optimal()?;
    let r: Vec<f64> = sol.x[..ns * nt].iter().map(|v| v.max(0.0)).collect();
    let map = LabeledMatrix::from_flat(src.cols().to_vec(), tgt.cols().to_vec(), r.clone())?;
    let residual = sol.x[eps].max(0.0);
    let holds = residual <= tol;
    let worst_column = (!holds).then(|| {
        let err = |j: usize| {
            (0..nx)
                .map(|x| {
                    let approx: f64 = (0..ns).map(|k| src.get(x, k) * r[var(k, j)]).sum();
                    (approx - tgt.get(x, j)).abs()
                })
                .fold(0.0, f64::max)
        };
        let j = (0..nt).fold(0, |b, j| if err(j) > err(b) { j } else { b });
        tgt.cols()[j].clone()
    });
    Ok(Refinement { residual, holds, map, worst_column })
}

/// Channel equivalence: each channel is a post-processing of the other, so both
/// induce the same posterior vulnerability for every prior and gain function.
pub fn equivalent(c1: &Channel, c2: &Channel, tol: f64) -> Result<Equivalence> {
    let forward = refinement(c1, c2, tol)?;
    let backward = refinement(c2, c1, tol)?;
    Ok(Equivalence { equivalent: forward.holds && backward.holds, forward, backward })
}
