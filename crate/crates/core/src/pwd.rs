//! The n-bit password checker whose loop stops at the first mismatching bit,
//! leaking the mismatch position through its running time. The defender picks
//! the order in which bits are compared, the attacker picks the low input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::games::{solve, GameKind, LeakageGame};
use crate::label::Label;
use crate::matrix::LabeledMatrix;
use crate::vulnerability::{Prior, VulnMeasure};

/// Largest bit count `build_game` accepts by default (5! · 2⁵ = 3840 channels).
pub const DEFAULT_MAX_BITS: usize = 5;

/// All n-bit strings, `00…0` first.
pub fn secrets(n: usize) -> Vec<Label> {
    (0..1u64 << n).map(|v| Label::atom(bits_to_string(&to_bits(v, n)))).collect()
}

/// All checking orders as digit strings (`123`, `132`, …) in lexicographic order.
pub fn orders(n: usize) -> Vec<Label> {
    permutations(n).into_iter().map(|p| Label::atom(order_to_string(&p))).collect()
}

/// `F,1 … F,n` (rejected at the i-th comparison) and `T,n` (accepted).
pub fn observables(n: usize) -> Vec<Label> {
    (1..=n).map(|i| Label::atom(format!("F,{i}"))).chain([Label::atom(format!("T,{n}"))]).collect()
}

fn to_bits(v: u64, n: usize) -> Vec<bool> {
    (0..n).map(|j| v >> (n - 1 - j) & 1 == 1).collect()
}

fn bits_to_string(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

fn order_to_string(p: &[usize]) -> String {
    p.iter().map(|d| char::from_digit(*d as u32, 10).unwrap_or('?')).collect()
}

/// Permutations of `1..=n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k + 1);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

pub fn parse_bits(n: usize, s: &str) -> Result<Vec<bool>> {
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Parse(format!("`{s}` is not a {n}-bit string")));
    }
    Ok(s.chars().map(|c| c == '1').collect())
}

/// Parses a digit-string order such as `213` (bit 2 compared first).
pub fn parse_order(n: usize, s: &str) -> Result<Vec<usize>> {
    let p: Vec<usize> = s
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::BadPermutation(format!("`{s}` is not a digit string")))?;
    check_order(n, &p)?;
    Ok(p)
}

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::BadPermutation(format!("{order:?} has {} entries, expected {n}", order.len())));
    }
    for &j in order {
        if j == 0 || j > n || std::mem::replace(&mut seen[j - 1], true) {
            return Err(Error::BadPermutation(format!("{order:?} is not a permutation of 1..{n}")));
        }
    }
    Ok(())
}

/// Number of loop iterations the checker runs, and whether it accepts.
pub fn run_checker(order: &[usize], secret: &[bool], low: &[bool]) -> (usize, bool) {
    for (pos, &j) in order.iter().enumerate() {
        if secret[j - 1] != low[j - 1] {
            return (pos + 1, false);
        }
    }
    (order.len(), true)
}

/// Deterministic channel of the checker comparing bits in `order` against `low`.
pub fn pwd_channel(n: usize, order: &[usize], low: &[bool]) -> Result<Channel> {
    check_order(n, order)?;
    if low.len() != n {
        return Err(Error::Shape(format!("low input has {} bits, expected {n}", low.len())));
    }
    let rows = secrets(n);
    let mut data = vec![0.0; rows.len() * (n + 1)];
    for v in 0..1u64 << n {
        let x = to_bits(v, n);
        let (steps, accepted) = run_checker(order, &x, low);
        let col = if accepted { n } else { steps - 1 };
        data[v as usize * (n + 1) + col] = 1.0;
    }
    Channel::new(LabeledMatrix::from_flat(rows, observables(n), data)?)
}

/// Channel for action labels such as `("213", "101")`.
pub fn pwd_channel_for(order: &str, low: &str) -> Result<Channel> {
    let n = low.len();
    pwd_channel(n, &parse_order(n, order)?, &parse_bits(n, low)?)
}

/// The constant-time checker: only accept/reject is observable.
pub fn const_time_channel(n: usize, low: &[bool]) -> Result<Channel> {
    if low.len() != n {
        return Err(Error::Shape(format!("low input has {} bits, expected {n}", low.len())));
    }
    let rows = secrets(n);
    let cols = vec![Label::atom(format!("F,{n}")), Label::atom(format!("T,{n}"))];
    let mut data = vec![0.0; rows.len() * 2];
    for v in 0..1u64 << n {
        let accepted = to_bits(v, n) == low;
        data[v as usize * 2 + usize::from(accepted)] = 1.0;
    }
    Channel::new(LabeledMatrix::from_flat(rows, cols, data)?)
}

pub fn build_game(n: usize, prior: Prior, measure: VulnMeasure) -> Result<LeakageGame> {
    build_game_capped(n, prior, measure, DEFAULT_MAX_BITS)
}

/// Defender: all n! orders; attacker: all 2ⁿ low inputs.
pub fn build_game_capped(n: usize, prior: Prior, measure: VulnMeasure, max_bits: usize) -> Result<LeakageGame> {
    if n == 0 {
        return Err(Error::Shape("need at least one bit".into()));
    }
    if n > max_bits.min(9) {
        return Err(Error::TooLarge(format!(
            "{n}-bit game has {n}!·2^{n} channels; the limit is {} bits",
            max_bits.min(9)
        )));
    }
    LeakageGame::from_fn(orders(n), secrets(n), prior, measure, |d, a| {
        pwd_channel_for(d.as_atom().unwrap_or_default(), a.as_atom().unwrap_or_default())
    })
}

/// `Σ_{k=1}^{n} k 2^{-k} + n 2^{-n} = 2(1 − 2^{-n})`
pub fn expected_iterations(n: u32) -> f64 {
    2.0 * (1.0 - 0.5f64.powi(n as i32))
}

/// Mean iteration count of the checker (natural order, all-zero low input)
/// over uniformly random secrets.
pub fn measured_iterations(n: u32, samples: usize, seed: u64) -> f64 {
    assert!((1..=64).contains(&n), "1 to 64 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0u64;
    for _ in 0..samples {
        let x: u64 = rng.gen();
        // bit j (1-based, from the left) of an n-bit secret; first set bit mismatches 0
        let x = if n == 64 { x } else { x & ((1u64 << n) - 1) };
        let lead = if x == 0 { n } else { x.leading_zeros() - (64 - n) + 1 };
        total += u64::from(lead.min(n));
    }
    total as f64 / samples.max(1) as f64
}

#[derive(Debug, Clone)]
pub struct UniformDefenderCheck {
    /// `U(δ_uniform, a)` per attacker action
    pub per_action: Vec<f64>,
    /// max − min of `per_action`
    pub spread: f64,
    /// worst case of the uniform defender, `max_a U(δ_uniform, a)`
    pub uniform_value: f64,
    /// the hidden simultaneous game's value
    pub game_value: f64,
    pub optimal_defender: Vec<f64>,
}

impl UniformDefenderCheck {
    pub fn attacker_indifferent(&self, tol: f64) -> bool {
        self.spread <= tol
    }

    pub fn uniform_is_optimal(&self, tol: f64) -> bool {
        (self.uniform_value - self.game_value).abs() <= tol
    }
}

/// Compares the uniform defender against the optimum of the hidden simultaneous game.
pub fn check_uniform_defender(n: usize, prior: Prior) -> Result<UniformDefenderCheck> {
    let g = build_game(n, prior, VulnMeasure::Bayes)?;
    let nd = g.defender().len();
    let uniform = vec![1.0 / nd as f64; nd];
    let per_action: Vec<f64> =
        (0..g.attacker().len()).map(|a| g.hidden_payoff(a, &uniform)).collect::<Result<_>>()?;
    let hi = per_action.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = per_action.iter().copied().fold(f64::INFINITY, f64::min);
    let sol = solve(&g, GameKind::IV)?;
    let optimal_defender = match sol.defender {
        crate::games::DefenderStrategy::Mixed(d) => d,
        _ => unreachable!("Game IV returns a mixed defender"),
    };
    Ok(UniformDefenderCheck {
        per_action,
        spread: hi - lo,
        uniform_value: hi,
        game_value: sol.value,
        optimal_defender,
    })
}

/// Under a uniform prior every low input is equally good against the uniform
/// defender, and the uniform defender is optimal.
pub fn verify_uniform_equilibrium(n: usize) -> Result<UniformDefenderCheck> {
    check_uniform_defender(n, Prior::uniform(secrets(n))?)
}
