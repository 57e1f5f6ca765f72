#![allow(dead_code)]

use leakgame::channel::{Channel, IndexDistribution};
use leakgame::games::LeakageGame;
use leakgame::matrix::LabeledMatrix;
use leakgame::vulnerability::{GainFunction, Prior, VulnMeasure};
use leakgame::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(prefix: &str, n: usize) -> Vec<Label> {
    (0..n).map(|i| Label::atom(format!("{prefix}{i}"))).collect()
}

pub fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    Dirichlet::new(&vec![1.0; k]).unwrap().sample(rng)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: &[Label], cols: &[Label]) -> LabeledMatrix {
    let data = rows.iter().map(|_| simplex(rng, cols.len())).collect();
    LabeledMatrix::new(rows.to_vec(), cols.to_vec(), data).unwrap()
}

pub fn random_channel(rng: &mut ChaCha8Rng, rows: &[Label], cols: &[Label]) -> Channel {
    Channel::new(random_matrix(rng, rows, cols)).unwrap()
}

/// Every row is a point mass.
pub fn random_deterministic(rng: &mut ChaCha8Rng, rows: &[Label], cols: &[Label]) -> Channel {
    let data = rows
        .iter()
        .map(|_| {
            let mut r = vec![0.0; cols.len()];
            r[rng.gen_range(0..cols.len())] = 1.0;
            r
        })
        .collect();
    Channel::new(LabeledMatrix::new(rows.to_vec(), cols.to_vec(), data).unwrap()).unwrap()
}

pub fn random_dist(rng: &mut ChaCha8Rng, index: &[Label]) -> IndexDistribution {
    let w = simplex(rng, index.len());
    IndexDistribution::new(index.iter().cloned().zip(w).collect()).unwrap()
}

pub fn random_prior(rng: &mut ChaCha8Rng, secrets: &[Label]) -> Prior {
    Prior::renormalized(secrets.iter().cloned().zip(simplex(rng, secrets.len())).collect()).unwrap()
}

pub fn random_gain(rng: &mut ChaCha8Rng, secrets: &[Label], guesses: usize) -> GainFunction {
    let gain = (0..guesses).map(|_| secrets.iter().map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    GainFunction::new(labels("w", guesses), secrets.to_vec(), gain).unwrap()
}

/// |𝒟|, |𝒜| ∈ {2,3}, |𝒳| ∈ {2,3,4}; deterministic or Dirichlet channels whose
/// outputs depend only on the attacker action; Bayes or a random 3-guess gain.
pub fn random_game(rng: &mut ChaCha8Rng) -> LeakageGame {
    let (nd, na, nx) = (rng.gen_range(2..=3), rng.gen_range(2..=3), rng.gen_range(2..=4));
    random_game_sized(rng, nd, na, nx)
}

pub fn random_game_sized(rng: &mut ChaCha8Rng, nd: usize, na: usize, nx: usize) -> LeakageGame {
    let secrets = labels("x", nx);
    let outputs: Vec<Vec<Label>> = (0..na).map(|a| labels(&format!("y{a}_"), rng.gen_range(2..=3))).collect();
    let prior = random_prior(rng, &secrets);
    let measure =
        if rng.gen_bool(0.5) { VulnMeasure::Bayes } else { VulnMeasure::Gain(random_gain(rng, &secrets, 3)) };
    let deterministic = rng.gen_bool(0.3);
    let (defender, attacker) = (labels("d", nd), labels("a", na));
    let mut channels = Vec::new();
    for d in &defender {
        for (ai, a) in attacker.iter().enumerate() {
            let c = if deterministic {
                random_deterministic(rng, &secrets, &outputs[ai])
            } else {
                random_channel(rng, &secrets, &outputs[ai])
            };
            channels.push(((d.clone(), a.clone()), c));
        }
    }
    LeakageGame::new(defender, attacker, channels, prior, measure).unwrap()
}

pub fn random_payoff(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
