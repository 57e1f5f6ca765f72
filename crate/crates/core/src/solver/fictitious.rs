//! Brown–Robinson fictitious play, used as an independent bracket on matrix-game values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct FictitiousPlay {
    /// best lower bound seen: min over rows against the column player's empirical mix
    pub lower: f64,
    /// best upper bound seen: max over columns against the row player's empirical mix
    pub upper: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
    pub iterations: usize,
}

impl FictitiousPlay {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }
}

fn argmin(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |b, (i, &x)| if x < v[b] { i } else { b })
}

fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |b, (i, &x)| if x > v[b] { i } else { b })
}

/// Row player minimises. The seed picks the opening pair; ties break to the lowest index.
pub fn fictitious_play(m: &[Vec<f64>], iters: usize, seed: u64) -> FictitiousPlay {
    let nr = m.len();
    let nc = m.first().map_or(0, |r| r.len());
    assert!(nr > 0 && nc > 0, "fictitious play needs a non-empty matrix");
    let iters = iters.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut i, mut j) = (rng.gen_range(0..nr), rng.gen_range(0..nc));
    let mut row_counts = vec![0usize; nr];
    let mut col_counts = vec![0usize; nc];
    // row_acc[i] = Σ_t M[i][j_t]; col_acc[j] = Σ_t M[i_t][j]
    let mut row_acc = vec![0.0; nr];
    let mut col_acc = vec![0.0; nc];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 1..=iters {
        row_counts[i] += 1;
        col_counts[j] += 1;
        for k in 0..nr {
            row_acc[k] += m[k][j];
        }
        for k in 0..nc {
            col_acc[k] += m[i][k];
        }
        let (bi, bj) = (argmin(&row_acc), argmax(&col_acc));
        lower = lower.max(row_acc[bi] / t as f64);
        upper = upper.min(col_acc[bj] / t as f64);
        i = bi;
        j = bj;
    }
    let freq = |c: &[usize]| c.iter().map(|&k| k as f64 / iters as f64).collect::<Vec<_>>();
    FictitiousPlay {
        lower,
        upper,
        row_strategy: freq(&row_counts),
        col_strategy: freq(&col_counts),
        iterations: iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_game_closes_immediately() {
        let fp = fictitious_play(&[vec![0.25, 0.25], vec![0.25, 0.25]], 1, 7);
        assert_eq!((fp.lower, fp.upper), (0.25, 0.25));
    }

    #[test]
    fn brackets_known_values() {
        let fp = fictitious_play(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1000, 0);
        assert!(fp.contains(0.5, 0.0));
        let fp = fictitious_play(&[vec![0.5, 1.0], vec![1.0, 2.0 / 3.0]], 100_000, 0);
        assert!(fp.contains(0.8, 0.0));
        assert!(fp.width() < 0.01, "width {}", fp.width());
    }
}
