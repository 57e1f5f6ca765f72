use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{Channel, CHANNEL_TOL};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::{index_of, same_set};

#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    secrets: Vec<Label>,
    weights: Vec<f64>,
}

impl Prior {
    /// Weights must sum to 1 within 1e-9; they are then renormalised exactly.
    pub fn new(pairs: Vec<(Label, f64)>) -> Result<Self> {
        let s: f64 = pairs.iter().map(|(_, w)| w.max(0.0)).sum();
        if (s - 1.0).abs() > CHANNEL_TOL {
            return Err(Error::BadDistribution(format!("prior weights sum to {s}")));
        }
        Self::renormalized(pairs)
    }

    /// Accepts any non-negative weights with positive total (e.g. rounded
    /// published figures or raw counts) and rescales them to sum to 1.
    pub fn renormalized(pairs: Vec<(Label, f64)>) -> Result<Self> {
        let mut secrets = Vec::with_capacity(pairs.len());
        let mut weights = Vec::with_capacity(pairs.len());
        for (l, w) in pairs {
            if !w.is_finite() || w < -CHANNEL_TOL {
                return Err(Error::BadDistribution(format!("weight {w} for secret `{l}`")));
            }
            if secrets.contains(&l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            secrets.push(l);
            weights.push(w.max(0.0));
        }
        let s: f64 = weights.iter().sum();
        if secrets.is_empty() || s <= 0.0 {
            return Err(Error::BadDistribution("prior has no mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= s);
        Ok(Self { secrets, weights })
    }

    pub fn uniform(secrets: Vec<Label>) -> Result<Self> {
        let w = 1.0 / secrets.len() as f64;
        Self::renormalized(secrets.into_iter().map(|l| (l, w)).collect())
    }

    pub fn point(secrets: Vec<Label>, at: &Label) -> Result<Self> {
        if !secrets.contains(at) {
            return Err(Error::LabelMismatch(format!("`{at}` is not a secret")));
        }
        Self::renormalized(
            secrets
                .into_iter()
                .map(|l| {
                    let w = if &l == at { 1.0 } else { 0.0 };
                    (l, w)
                })
                .collect(),
        )
    }

    pub fn secrets(&self) -> &[Label] {
        &self.secrets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, secret: &Label) -> f64 {
        self.secrets.iter().position(|l| l == secret).map_or(0.0, |i| self.weights[i])
    }

    /// Weights in the order of `secrets`, which must be the same label set.
    pub fn aligned(&self, secrets: &[Label]) -> Result<Vec<f64>> {
        if !same_set(secrets, &self.secrets) {
            return Err(Error::LabelMismatch("prior and channel have different secret sets".into()));
        }
        let idx = index_of(&self.secrets);
        Ok(secrets.iter().map(|l| self.weights[idx[l]]).collect())
    }

    /// Convex combination `Σ c_i π_i` over a shared secret set.
    pub fn mixture(parts: &[(f64, &Prior)]) -> Result<Prior> {
        let first = parts.first().ok_or_else(|| Error::BadDistribution("empty mixture".into()))?.1;
        let mut acc = vec![0.0; first.secrets.len()];
        for (c, p) in parts {
            for (a, w) in acc.iter_mut().zip(p.aligned(&first.secrets)?) {
                *a += c * w;
            }
        }
        Prior::new(first.secrets.iter().cloned().zip(acc).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainFunction {
    guesses: Vec<Label>,
    secrets: Vec<Label>,
    /// row-major: guesses × secrets
    gain: Vec<f64>,
}

impl GainFunction {
    pub fn new(guesses: Vec<Label>, secrets: Vec<Label>, gain: Vec<Vec<f64>>) -> Result<Self> {
        let m = crate::matrix::LabeledMatrix::new(guesses, secrets, gain)?;
        if m.entries().iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("gain function has a non-finite entry".into()));
        }
        Ok(Self { guesses: m.rows().to_vec(), secrets: m.cols().to_vec(), gain: m.entries().to_vec() })
    }

    /// Bayes vulnerability as a gain function: guess the secret, gain 1 iff right.
    pub fn identity(secrets: Vec<Label>) -> Self {
        let n = secrets.len();
        let mut gain = vec![0.0; n * n];
        for i in 0..n {
            gain[i * n + i] = 1.0;
        }
        Self { guesses: secrets.clone(), secrets, gain }
    }

    pub fn guesses(&self) -> &[Label] {
        &self.guesses
    }

    pub fn secrets(&self) -> &[Label] {
        &self.secrets
    }

    pub fn gain(&self, w: usize, x: usize) -> f64 {
        self.gain[w * self.secrets.len() + x]
    }

    /// `g[w][x]` with `x` running over `secrets` (same label set as this function's).
    pub fn aligned(&self, secrets: &[Label]) -> Result<Vec<Vec<f64>>> {
        if !same_set(secrets, &self.secrets) {
            return Err(Error::LabelMismatch("gain function and prior have different secret sets".into()));
        }
        let idx = index_of(&self.secrets);
        Ok((0..self.guesses.len())
            .map(|w| secrets.iter().map(|x| self.gain(w, idx[x])).collect())
            .collect())
    }
}

/// A convex vulnerability given directly as a function of a distribution on secrets.
/// Only usable where no LP over gain pieces is needed.
pub trait ConvexVulnerability: Send + Sync {
    fn name(&self) -> &str;
    fn vulnerability(&self, secrets: &[Label], dist: &[f64]) -> f64;
}

#[derive(Clone)]
pub enum VulnMeasure {
    Bayes,
    Gain(GainFunction),
    Custom(Arc<dyn ConvexVulnerability>),
}

impl fmt::Debug for VulnMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VulnMeasure::Bayes => write!(f, "Bayes"),
            VulnMeasure::Gain(g) => f.debug_tuple("Gain").field(g).finish(),
            VulnMeasure::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

impl VulnMeasure {
    /// Guess labels and `g[w][x]` over `secrets`; Bayes becomes the identity gain.
    pub fn gain_table(&self, secrets: &[Label]) -> Result<(Vec<Label>, Vec<Vec<f64>>)> {
        match self {
            VulnMeasure::Bayes => {
                let g = GainFunction::identity(secrets.to_vec());
                Ok((g.guesses.clone(), g.aligned(secrets)?))
            }
            VulnMeasure::Gain(g) => Ok((g.guesses.clone(), g.aligned(secrets)?)),
            VulnMeasure::Custom(c) => Err(Error::TypeMismatch(format!(
                "measure `{}` has no gain-function form",
                c.name()
            ))),
        }
    }
}

pub fn prior_vuln(v: &VulnMeasure, pi: &Prior) -> Result<f64> {
    match v {
        VulnMeasure::Bayes => Ok(pi.weights.iter().copied().fold(0.0, f64::max)),
        VulnMeasure::Gain(g) => {
            let table = g.aligned(&pi.secrets)?;
            Ok(table
                .iter()
                .map(|row| row.iter().zip(&pi.weights).map(|(g, p)| g * p).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max))
        }
        VulnMeasure::Custom(c) => Ok(c.vulnerability(&pi.secrets, &pi.weights)),
    }
}

/// `Σ_y max_w Σ_x π(x) C(x,y) g(w,x)`, evaluated on the joint matrix so that
/// zero-probability outputs contribute nothing.
pub fn posterior_vuln(v: &VulnMeasure, pi: &Prior, c: &Channel) -> Result<f64> {
    let pw = pi.aligned(c.secrets())?;
    let m = c.matrix();
    match v {
        VulnMeasure::Bayes => Ok((0..m.n_cols())
            .map(|y| (0..m.n_rows()).map(|x| pw[x] * m.get(x, y)).fold(0.0, f64::max))
            .sum()),
        VulnMeasure::Gain(g) => {
            let table = g.aligned(c.secrets())?;
            Ok((0..m.n_cols())
                .map(|y| {
                    table
                        .iter()
                        .map(|gw| (0..m.n_rows()).map(|x| pw[x] * m.get(x, y) * gw[x]).sum::<f64>())
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum())
        }
        VulnMeasure::Custom(f) => {
            let mut total = 0.0;
            for y in 0..m.n_cols() {
                let joint: Vec<f64> = (0..m.n_rows()).map(|x| pw[x] * m.get(x, y)).collect();
                let py: f64 = joint.iter().sum();
                if py > 0.0 {
                    let post: Vec<f64> = joint.iter().map(|j| j / py).collect();
                    total += py * f.vulnerability(c.secrets(), &post);
                }
            }
            Ok(total)
        }
    }
}

/// Lowest-labelled maximiser of `score` over `labels`.
fn best_by_label(labels: &[Label], score: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_score = score(0);
    for i in 1..labels.len() {
        let s = score(i);
        if s > best_score || (s == best_score && labels[i] < labels[best]) {
            best = i;
            best_score = s;
        }
    }
    best
}

/// The adversary's optimal guess for each output (lowest label on ties).
pub fn best_guesses(v: &VulnMeasure, pi: &Prior, c: &Channel) -> Result<Vec<(Label, Label)>> {
    let pw = pi.aligned(c.secrets())?;
    let (guesses, table) = v.gain_table(c.secrets())?;
    let m = c.matrix();
    Ok((0..m.n_cols())
        .map(|y| {
            let w = best_by_label(&guesses, |w| (0..m.n_rows()).map(|x| pw[x] * m.get(x, y) * table[w][x]).sum());
            (m.cols()[y].clone(), guesses[w].clone())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

fn cumulative(ws: impl Iterator<Item = f64>) -> Vec<f64> {
    ws.scan(0.0, |acc, w| {
        *acc += w;
        Some(*acc)
    })
    .collect()
}

/// Monte-Carlo estimate of the posterior vulnerability. The first half of the
/// samples picks a guess per output, the second half scores it, so the estimate
/// is unbiased for the guessing rule it found.
pub fn posterior_vuln_mc(
    v: &VulnMeasure,
    pi: &Prior,
    c: &Channel,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Shape("need at least one sample".into()));
    }
    let pw = pi.aligned(c.secrets())?;
    let (guesses, table) = v.gain_table(c.secrets())?;
    let m = c.matrix();
    let (nx, ny) = (m.n_rows(), m.n_cols());
    let prior_cdf = cumulative(pw.iter().copied());
    let row_cdf: Vec<Vec<f64>> = (0..nx).map(|x| cumulative(m.row(x).iter().copied())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let x = sample_index(&prior_cdf, rng.gen::<f64>() * prior_cdf[nx - 1]);
        let y = sample_index(&row_cdf[x], rng.gen::<f64>() * row_cdf[x][ny - 1]);
        (x, y)
    };
    let n_train = samples / 2;
    let mut counts = vec![vec![0u64; nx]; ny];
    for _ in 0..n_train {
        let (x, y) = draw(&mut rng);
        counts[y][x] += 1;
    }
    let prior_guess = best_by_label(&guesses, |w| (0..nx).map(|x| pw[x] * table[w][x]).sum());
    let choice: Vec<usize> = (0..ny)
        .map(|y| {
            if counts[y].iter().all(|&k| k == 0) {
                prior_guess
            } else {
                best_by_label(&guesses, |w| (0..nx).map(|x| counts[y][x] as f64 * table[w][x]).sum())
            }
        })
        .collect();
    let n_score = samples - n_train;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n_score {
        let (x, y) = draw(&mut rng);
        let g = table[choice[y]][x];
        s1 += g;
        s2 += g * g;
    }
    let n = n_score as f64;
    let mean = s1 / n;
    let var = if n_score > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(McEstimate { value: mean, std_error: (var / n).sqrt(), samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeakageMode {
    Additive,
    Multiplicative,
}

pub fn leakage(v: &VulnMeasure, pi: &Prior, c: &Channel, mode: LeakageMode) -> Result<f64> {
    let prior = prior_vuln(v, pi)?;
    let post = posterior_vuln(v, pi, c)?;
    match mode {
        LeakageMode::Additive => Ok(post - prior),
        LeakageMode::Multiplicative if prior.abs() < 1e-300 => {
            Err(Error::DivideByZero("prior vulnerability is zero".into()))
        }
        LeakageMode::Multiplicative => Ok(post / prior),
    }
}
