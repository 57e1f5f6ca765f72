use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::label::Label;

/// Dense real matrix indexed by label sets. Operators match by label, never by position.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    rows: Vec<Label>,
    cols: Vec<Label>,
    data: Vec<f64>,
}

fn check_unique(labels: &[Label]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

pub(crate) fn same_set(a: &[Label], b: &[Label]) -> bool {
    a.len() == b.len() && {
        let set: HashSet<&Label> = a.iter().collect();
        b.iter().all(|l| set.contains(l))
    }
}

pub(crate) fn index_of(labels: &[Label]) -> HashMap<&Label, usize> {
    labels.iter().enumerate().map(|(i, l)| (l, i)).collect()
}

impl LabeledMatrix {
    pub fn new(rows: Vec<Label>, cols: Vec<Label>, data: Vec<Vec<f64>>) -> Result<Self> {
        if data.len() != rows.len() {
            return Err(Error::Shape(format!("{} rows labelled, {} given", rows.len(), data.len())));
        }
        if let Some((i, r)) = data.iter().enumerate().find(|(_, r)| r.len() != cols.len()) {
            return Err(Error::Shape(format!(
                "row {} has {} entries, expected {}",
                rows[i],
                r.len(),
                cols.len()
            )));
        }
        Self::from_flat(rows, cols, data.into_iter().flatten().collect())
    }

    /// Row-major data.
    pub fn from_flat(rows: Vec<Label>, cols: Vec<Label>, data: Vec<f64>) -> Result<Self> {
        check_unique(&rows)?;
        check_unique(&cols)?;
        if data.len() != rows.len() * cols.len() {
            return Err(Error::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows.len(),
                cols.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor with atom labels.
    pub fn from_atoms<R: AsRef<str>, C: AsRef<str>>(
        rows: &[R],
        cols: &[C],
        data: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new(
            rows.iter().map(|r| Label::atom(r.as_ref())).collect(),
            cols.iter().map(|c| Label::atom(c.as_ref())).collect(),
            data,
        )
    }

    pub fn zeros(rows: Vec<Label>, cols: Vec<Label>) -> Result<Self> {
        let n = rows.len() * cols.len();
        Self::from_flat(rows, cols, vec![0.0; n])
    }

    pub fn rows(&self) -> &[Label] {
        &self.rows
    }

    pub fn cols(&self) -> &[Label] {
        &self.cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols.len() + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let nc = self.cols.len();
        &self.data[r * nc..(r + 1) * nc]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.get(r, c)).collect()
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows.len()).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn row_index(&self, l: &Label) -> Option<usize> {
        self.rows.iter().position(|x| x == l)
    }

    pub fn col_index(&self, l: &Label) -> Option<usize> {
        self.cols.iter().position(|x| x == l)
    }

    /// Entry by labels.
    pub fn entry(&self, row: &Label, col: &Label) -> Option<f64> {
        Some(self.get(self.row_index(row)?, self.col_index(col)?))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.row(r).iter().sum()).collect()
    }

    /// Same row set and same column set ("same type").
    pub fn same_type(&self, other: &Self) -> bool {
        same_set(&self.rows, &other.rows) && same_set(&self.cols, &other.cols)
    }

    /// Same row set.
    pub fn compatible(&self, other: &Self) -> bool {
        same_set(&self.rows, &other.rows)
    }

    /// Reorder rows and columns to the given label orders (which must be permutations).
    pub fn aligned(&self, rows: &[Label], cols: &[Label]) -> Result<Self> {
        if !same_set(rows, &self.rows) {
            return Err(Error::IncompatibleRows("row label sets differ".into()));
        }
        if !same_set(cols, &self.cols) {
            return Err(Error::TypeMismatch("column label sets differ".into()));
        }
        let ri = index_of(&self.rows);
        let ci = index_of(&self.cols);
        let cmap: Vec<usize> = cols.iter().map(|c| ci[c]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        for r in rows {
            let src = ri[r];
            data.extend(cmap.iter().map(|&c| self.get(src, c)));
        }
        Ok(Self { rows: rows.to_vec(), cols: cols.to_vec(), data })
    }

    pub fn scaled(&self, r: f64) -> Self {
        Self {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self.data.iter().map(|v| r * v).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let o = other.aligned(&self.rows, &self.cols)?;
        Ok(self.data.iter().zip(&o.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

pub fn scalar_mul(r: f64, m: &LabeledMatrix) -> LabeledMatrix {
    m.scaled(r)
}

/// Entrywise sum; every summand must have the first one's row and column sets.
pub fn sum(family: &[&LabeledMatrix]) -> Result<LabeledMatrix> {
    let (first, rest) = family
        .split_first()
        .ok_or_else(|| Error::Shape("sum of an empty family".into()))?;
    let mut acc = (*first).clone();
    for (k, m) in rest.iter().enumerate() {
        if !acc.same_type(m) {
            return Err(Error::TypeMismatch(format!(
                "summand {} differs in row or column labels from summand 0",
                k + 1
            )));
        }
        let m = m.aligned(&acc.rows, &acc.cols)?;
        for (a, b) in acc.data.iter_mut().zip(&m.data) {
            *a += b;
        }
    }
    Ok(acc)
}

/// Concatenation: columns become `(y, index)`, in family order then column order.
pub fn concat(family: &[(Label, &LabeledMatrix)]) -> Result<LabeledMatrix> {
    let (first, _) = family
        .split_first()
        .ok_or_else(|| Error::Shape("concatenation of an empty family".into()))?;
    let rows = first.1.rows.clone();
    let mut seen = HashSet::new();
    for (idx, m) in family {
        if !seen.insert(idx) {
            return Err(Error::DuplicateIndex(idx.to_string()));
        }
        if !same_set(&rows, &m.rows) {
            return Err(Error::IncompatibleRows(format!("block `{idx}` has different rows")));
        }
    }
    let blocks: Vec<LabeledMatrix> = family
        .iter()
        .map(|(_, m)| m.aligned(&rows, &m.cols))
        .collect::<Result<_>>()?;
    let cols: Vec<Label> = family
        .iter()
        .flat_map(|(idx, m)| m.cols.iter().map(move |y| Label::tagged(y.clone(), idx.clone())))
        .collect();
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for r in 0..rows.len() {
        for b in &blocks {
            data.extend_from_slice(b.row(r));
        }
    }
    LabeledMatrix::from_flat(rows, cols, data)
}

impl fmt::Display for LabeledMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.cols.iter().map(|c| c.to_string().len()).max().unwrap_or(0).max(9);
        let rw = self.rows.iter().map(|r| r.to_string().len()).max().unwrap_or(0);
        write!(f, "{:rw$}", "")?;
        for c in &self.cols {
            write!(f, " {:>w$}", c.to_string())?;
        }
        for (r, l) in self.rows.iter().enumerate() {
            write!(f, "\n{:rw$}", l.to_string())?;
            for v in self.row(r) {
                write!(f, " {:>w$}", crate::report::sig6(*v))?;
            }
        }
        Ok(())
    }
}
