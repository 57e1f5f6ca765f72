//! Leakage games between a defender choosing channels and an attacker choosing
//! inputs, in the seven variants below, plus the audit of their value ordering.

use std::fmt;
use std::str::FromStr;

use crate::channel::{hidden_choice, visible_choice, Channel, IndexDistribution};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::{index_of, same_set};
use crate::solver::convex::{convex_game_spread, solve_convex_linear_game, EpigraphPayoff};
use crate::solver::lp::LpDiagnostics;
use crate::solver::matrix_game::{equilibrium_spread, solve_matrix_rows};
use crate::vulnerability::{posterior_vuln, Prior, VulnMeasure};

/// Payoffs closer than this count as ties (broken towards the lowest label).
const TIE: f64 = 1e-12;
/// Tolerance for the ordering audit.
pub const ORDER_TOL: f64 = 1e-7;
pub const DEFAULT_VI_MIXED_CAP: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct LeakageGame {
    defender: Vec<Label>,
    attacker: Vec<Label>,
    /// `channels[d * |A| + a]`
    channels: Vec<Channel>,
    prior: Prior,
    measure: VulnMeasure,
}

fn sorted_unique(mut v: Vec<Label>, what: &str) -> Result<Vec<Label>> {
    if v.is_empty() {
        return Err(Error::Shape(format!("no {what} actions")));
    }
    v.sort();
    if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateLabel(format!("{what} action {}", w[0])));
    }
    Ok(v)
}

impl LeakageGame {
    /// Actions are stored in label order; the channel map must be total over 𝒟 × 𝒜.
    pub fn new(
        defender: Vec<Label>,
        attacker: Vec<Label>,
        channels: Vec<((Label, Label), Channel)>,
        prior: Prior,
        measure: VulnMeasure,
    ) -> Result<Self> {
        let defender = sorted_unique(defender, "defender")?;
        let attacker = sorted_unique(attacker, "attacker")?;
        let (di, ai) = (index_of(&defender), index_of(&attacker));
        let mut slots: Vec<Option<Channel>> = vec![None; defender.len() * attacker.len()];
        for ((d, a), c) in channels {
            let &dk = di.get(&d).ok_or_else(|| Error::UnknownAction(d.to_string()))?;
            let &ak = ai.get(&a).ok_or_else(|| Error::UnknownAction(a.to_string()))?;
            if !same_set(c.secrets(), prior.secrets()) {
                return Err(Error::LabelMismatch(format!("channel ({d}, {a}) has different secrets than the prior")));
            }
            let slot = &mut slots[dk * attacker.len() + ak];
            if slot.is_some() {
                return Err(Error::DuplicateIndex(format!("({d}, {a})")));
            }
            *slot = Some(c);
        }
        let mut out = Vec::with_capacity(slots.len());
        for (k, c) in slots.into_iter().enumerate() {
            let (d, a) = (&defender[k / attacker.len()], &attacker[k % attacker.len()]);
            out.push(c.ok_or_else(|| Error::Shape(format!("no channel for ({d}, {a})")))?);
        }
        if let VulnMeasure::Gain(g) = &measure {
            g.aligned(prior.secrets())?;
        }
        Ok(Self { defender, attacker, channels: out, prior, measure })
    }

    pub fn from_fn(
        defender: Vec<Label>,
        attacker: Vec<Label>,
        prior: Prior,
        measure: VulnMeasure,
        mut channel: impl FnMut(&Label, &Label) -> Result<Channel>,
    ) -> Result<Self> {
        let mut cs = Vec::with_capacity(defender.len() * attacker.len());
        for d in &defender {
            for a in &attacker {
                cs.push(((d.clone(), a.clone()), channel(d, a)?));
            }
        }
        Self::new(defender, attacker, cs, prior, measure)
    }

    pub fn defender(&self) -> &[Label] {
        &self.defender
    }

    pub fn attacker(&self) -> &[Label] {
        &self.attacker
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn measure(&self) -> &VulnMeasure {
        &self.measure
    }

    pub fn channel(&self, d: usize, a: usize) -> &Channel {
        &self.channels[d * self.attacker.len() + a]
    }

    pub fn defender_index(&self, d: &Label) -> Result<usize> {
        self.defender.binary_search(d).map_err(|_| Error::UnknownAction(d.to_string()))
    }

    pub fn attacker_index(&self, a: &Label) -> Result<usize> {
        self.attacker.binary_search(a).map_err(|_| Error::UnknownAction(a.to_string()))
    }

    /// `u(d, a)`: posterior vulnerability of `C_da`.
    pub fn pure_payoff(&self, d: &Label, a: &Label) -> Result<f64> {
        let (d, a) = (self.defender_index(d)?, self.attacker_index(a)?);
        posterior_vuln(&self.measure, &self.prior, self.channel(d, a))
    }

    /// `u[d][a]` in action label order.
    pub fn payoff_table(&self) -> Result<Vec<Vec<f64>>> {
        (0..self.defender.len())
            .map(|d| {
                (0..self.attacker.len())
                    .map(|a| posterior_vuln(&self.measure, &self.prior, self.channel(d, a)))
                    .collect()
            })
            .collect()
    }

    fn family(&self, a: usize) -> Vec<(Label, &Channel)> {
        (0..self.defender.len()).map(|d| (self.defender[d].clone(), self.channel(d, a))).collect()
    }

    fn distribution(&self, delta: &[f64]) -> Result<IndexDistribution> {
        if delta.len() != self.defender.len() {
            return Err(Error::Shape("defender distribution has the wrong length".into()));
        }
        IndexDistribution::new(self.defender.iter().cloned().zip(delta.iter().copied()).collect())
    }

    /// `⨊_{d←δ} C_da`
    pub fn hidden_mix(&self, a: usize, delta: &[f64]) -> Result<Channel> {
        self.check_hidden_typing(a)?;
        hidden_choice(&self.distribution(delta)?, &self.family(a))
    }

    /// `⨆̇_{d←δ} C_da`
    pub fn visible_mix(&self, a: usize, delta: &[f64]) -> Result<Channel> {
        visible_choice(&self.distribution(delta)?, &self.family(a))
    }

    /// `𝕍[π, ⨊_{d←δ} C_da]`
    pub fn hidden_payoff(&self, a: usize, delta: &[f64]) -> Result<f64> {
        posterior_vuln(&self.measure, &self.prior, &self.hidden_mix(a, delta)?)
    }

    fn check_hidden_typing(&self, a: usize) -> Result<()> {
        let first = self.channel(0, a);
        for d in 1..self.defender.len() {
            if !self.channel(d, a).same_type(first) {
                return Err(Error::TypeMismatch(format!(
                    "hidden choice needs C({}, {}) to have the outputs of C({}, {})",
                    self.defender[d], self.attacker[a], self.defender[0], self.attacker[a]
                )));
            }
        }
        Ok(())
    }

    /// Pieces `Σ_x π(x) C_da(x,y) g(w,x)` over `d`, grouped per `(a, y)`.
    fn hidden_pieces(&self, a: usize) -> Result<Vec<Vec<Vec<f64>>>> {
        self.check_hidden_typing(a)?;
        let secrets = self.prior.secrets();
        let (_, gain) = self.measure.gain_table(secrets).map_err(|e| match e {
            Error::TypeMismatch(m) => Error::TypeMismatch(format!("{m}; hidden-choice games need a gain function")),
            e => e,
        })?;
        let outputs = self.channel(0, a).outputs().to_vec();
        let aligned: Vec<_> = (0..self.defender.len())
            .map(|d| self.channel(d, a).matrix().aligned(secrets, &outputs))
            .collect::<Result<_>>()?;
        let pw = self.prior.weights();
        Ok((0..outputs.len())
            .map(|y| {
                gain.iter()
                    .map(|gw| {
                        aligned
                            .iter()
                            .map(|m| (0..secrets.len()).map(|x| pw[x] * m.get(x, y) * gw[x]).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect())
    }

    /// The convex piecewise-linear payoff of the hidden-choice games.
    pub fn hidden_epigraph(&self) -> Result<EpigraphPayoff> {
        let mut p = EpigraphPayoff::new(self.defender.len());
        for a in 0..self.attacker.len() {
            p.push_action(self.hidden_pieces(a)?)?;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameKind {
    /// simultaneous, visible choice
    I,
    /// defender first, visible choice
    II,
    /// attacker first, visible choice
    III,
    /// simultaneous, hidden choice
    IV,
    /// defender first, hidden choice (same solution as IV)
    V,
    /// attacker first, hidden choice, defender mixes over functions 𝒜 → 𝒟
    VIMixed,
    /// attacker first, hidden choice, defender behavioural
    VIBehavioral,
}

impl GameKind {
    pub const ALL: [GameKind; 7] = [
        GameKind::I,
        GameKind::II,
        GameKind::III,
        GameKind::IV,
        GameKind::V,
        GameKind::VIMixed,
        GameKind::VIBehavioral,
    ];

    pub fn is_hidden(self) -> bool {
        matches!(self, GameKind::IV | GameKind::V | GameKind::VIMixed | GameKind::VIBehavioral)
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::I => "I",
            GameKind::II => "II",
            GameKind::III => "III",
            GameKind::IV => "IV",
            GameKind::V => "V",
            GameKind::VIMixed => "VI-mixed",
            GameKind::VIBehavioral => "VI-behavioral",
        })
    }
}

impl FromStr for GameKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match norm.as_str() {
            "i" | "1" => GameKind::I,
            "ii" | "2" => GameKind::II,
            "iii" | "3" => GameKind::III,
            "iv" | "4" => GameKind::IV,
            "v" | "5" => GameKind::V,
            "vi-mixed" | "vi-m" | "vim" => GameKind::VIMixed,
            "vi-behavioral" | "vi-behavioural" | "vi-b" | "vib" => GameKind::VIBehavioral,
            _ => return Err(Error::Parse(format!("unknown game kind `{s}`"))),
        })
    }
}

/// Defender strategies, over actions in label order.
#[derive(Debug, Clone, PartialEq)]
pub enum DefenderStrategy {
    Mixed(Vec<f64>),
    /// Distribution over functions 𝒜 → 𝒟; each function lists the defender index per attacker action.
    Functions(Vec<(Vec<usize>, f64)>),
    /// `[a][d]`: distribution over 𝒟 after observing `a`.
    Behavioral(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttackerStrategy {
    Mixed(Vec<f64>),
    Pure(usize),
    /// best response per defender action, `[d] -> a`
    Response(Vec<usize>),
}

/// Behavioural counterpart reported next to a pure sequential equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub enum BehavioralForm {
    /// `[d][a]`
    Attacker(Vec<Vec<f64>>),
    /// `[a][d]`
    Defender(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Default)]
pub struct SolveDiagnostics {
    pub solver: &'static str,
    pub lp_rows: usize,
    pub lp_cols: usize,
    pub lp_pivots: usize,
    pub duality_gap: f64,
    pub primal_residual: f64,
    /// independently computed max-min value, when available
    pub maxmin_value: Option<f64>,
}

impl SolveDiagnostics {
    fn absorb(&mut self, d: &LpDiagnostics) {
        self.lp_rows = self.lp_rows.max(d.rows);
        self.lp_cols = self.lp_cols.max(d.cols);
        self.lp_pivots += d.pivots;
        self.duality_gap = self.duality_gap.max(d.duality_gap);
        self.primal_residual = self.primal_residual.max(d.primal_residual);
    }
}

#[derive(Debug, Clone)]
pub struct GameSolution {
    pub kind: GameKind,
    pub value: f64,
    pub defender: DefenderStrategy,
    pub attacker: AttackerStrategy,
    pub behavioral: Option<BehavioralForm>,
    pub notes: Vec<String>,
    pub diagnostics: SolveDiagnostics,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// refuse VI-mixed when |𝒟|^|𝒜| exceeds this
    pub vi_mixed_cap: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { vi_mixed_cap: DEFAULT_VI_MIXED_CAP }
    }
}

fn argmin_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    (1..n).fold(0, |b, i| if f(i) < f(b) - TIE { i } else { b })
}

fn argmax_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    (1..n).fold(0, |b, i| if f(i) > f(b) + TIE { i } else { b })
}

fn point(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

pub fn solve(g: &LeakageGame, kind: GameKind) -> Result<GameSolution> {
    solve_with(g, kind, &SolveOptions::default())
}

pub fn solve_with(g: &LeakageGame, kind: GameKind, opts: &SolveOptions) -> Result<GameSolution> {
    let (nd, na) = (g.defender.len(), g.attacker.len());
    match kind {
        GameKind::I => {
            let u = g.payoff_table()?;
            let mg = solve_matrix_rows(&u)?;
            let mut diagnostics = SolveDiagnostics {
                solver: "matrix-game LP",
                maxmin_value: Some(mg.maxmin_value),
                ..Default::default()
            };
            diagnostics.absorb(&mg.lp);
            Ok(GameSolution {
                kind,
                value: mg.value,
                defender: DefenderStrategy::Mixed(mg.row_strategy),
                attacker: AttackerStrategy::Mixed(mg.col_strategy),
                behavioral: None,
                notes: vec![],
                diagnostics,
            })
        }
        GameKind::II => {
            let u = g.payoff_table()?;
            let response: Vec<usize> = (0..nd).map(|d| argmax_by(na, |a| u[d][a])).collect();
            let d_star = argmin_by(nd, |d| u[d][response[d]]);
            let value = u[d_star][response[d_star]];
            let phi: Vec<Vec<f64>> = response.iter().map(|&a| point(na, a)).collect();
            let behavioural_value: f64 = (0..na).map(|a| phi[d_star][a] * u[d_star][a]).sum();
            if (behavioural_value - value).abs() > 1e-12 {
                return Err(Error::Internal(format!(
                    "pure and behavioural attacker responses disagree: {value} vs {behavioural_value}"
                )));
            }
            Ok(GameSolution {
                kind,
                value,
                defender: DefenderStrategy::Mixed(point(nd, d_star)),
                attacker: AttackerStrategy::Response(response),
                behavioral: Some(BehavioralForm::Attacker(phi)),
                notes: vec![],
                diagnostics: SolveDiagnostics { solver: "pure leader enumeration", ..Default::default() },
            })
        }
        GameKind::III => {
            let u = g.payoff_table()?;
            let response: Vec<usize> = (0..na).map(|a| argmin_by(nd, |d| u[d][a])).collect();
            let a_star = argmax_by(na, |a| u[response[a]][a]);
            let value = u[response[a_star]][a_star];
            let phi: Vec<Vec<f64>> = response.iter().map(|&d| point(nd, d)).collect();
            let behavioural_value: f64 = (0..nd).map(|d| phi[a_star][d] * u[d][a_star]).sum();
            if (behavioural_value - value).abs() > 1e-12 {
                return Err(Error::Internal(format!(
                    "pure and behavioural defender responses disagree: {value} vs {behavioural_value}"
                )));
            }
            Ok(GameSolution {
                kind,
                value,
                defender: DefenderStrategy::Functions(vec![(response, 1.0)]),
                attacker: AttackerStrategy::Pure(a_star),
                behavioral: Some(BehavioralForm::Defender(phi)),
                notes: vec![],
                diagnostics: SolveDiagnostics { solver: "pure leader enumeration", ..Default::default() },
            })
        }
        GameKind::IV | GameKind::V => {
            let ep = g.hidden_epigraph()?;
            let s = solve_convex_linear_game(&ep)?;
            let mut diagnostics = SolveDiagnostics {
                solver: "epigraph LP",
                maxmin_value: Some(s.maxmin_value),
                ..Default::default()
            };
            diagnostics.absorb(&s.lp);
            diagnostics.absorb(&s.dual_lp);
            let notes = if kind == GameKind::V {
                vec![
                    "Game V has the same equilibrium value and defender strategy as Game IV; the attacker \
                     strategy shown is the simultaneous-game one, other best responses to the defender's \
                     commitment also attain the value"
                        .to_string(),
                ]
            } else {
                vec![]
            };
            Ok(GameSolution {
                kind,
                value: s.value,
                defender: DefenderStrategy::Mixed(s.defender),
                attacker: AttackerStrategy::Mixed(s.attacker),
                behavioral: None,
                notes,
                diagnostics,
            })
        }
        GameKind::VIMixed => solve_vi_mixed(g, opts),
        GameKind::VIBehavioral => {
            let mut per_action = Vec::with_capacity(na);
            let mut diagnostics = SolveDiagnostics { solver: "per-action epigraph LP", ..Default::default() };
            for a in 0..na {
                let mut ep = EpigraphPayoff::new(nd);
                ep.push_action(g.hidden_pieces(a)?)?;
                let s = solve_convex_linear_game(&ep)?;
                diagnostics.absorb(&s.lp);
                diagnostics.absorb(&s.dual_lp);
                per_action.push((s.value, s.defender));
            }
            let a_star = argmax_by(na, |a| per_action[a].0);
            let value = per_action[a_star].0;
            let phi: Vec<Vec<f64>> = per_action.into_iter().map(|(_, d)| d).collect();
            Ok(GameSolution {
                kind,
                value,
                defender: DefenderStrategy::Behavioral(phi),
                attacker: AttackerStrategy::Pure(a_star),
                behavioral: None,
                notes: vec![],
                diagnostics,
            })
        }
    }
}

/// Decodes function number `k` (mixed radix, first attacker action least significant).
fn function_of(mut k: u64, nd: usize, na: usize) -> Vec<usize> {
    (0..na)
        .map(|_| {
            let d = (k % nd as u64) as usize;
            k /= nd as u64;
            d
        })
        .collect()
}

fn solve_vi_mixed(g: &LeakageGame, opts: &SolveOptions) -> Result<GameSolution> {
    let (nd, na) = (g.defender.len(), g.attacker.len());
    let count = (nd as u64)
        .checked_pow(na as u32)
        .filter(|&c| c <= opts.vi_mixed_cap)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "{nd}^{na} defender functions exceed the cap of {}",
                opts.vi_mixed_cap
            ))
        })?;
    let functions: Vec<Vec<usize>> = (0..count).map(|k| function_of(k, nd, na)).collect();
    let mut ep = EpigraphPayoff::new(functions.len());
    for a in 0..na {
        let pieces = g.hidden_pieces(a)?;
        let lifted = pieces
            .into_iter()
            .map(|group| {
                group
                    .into_iter()
                    .map(|piece| functions.iter().map(|f| piece[f[a]]).collect())
                    .collect()
            })
            .collect();
        ep.push_action(lifted)?;
    }
    let s = solve_convex_linear_game(&ep)?;
    let sigma: Vec<(Vec<usize>, f64)> = functions
        .into_iter()
        .zip(s.defender.iter().copied())
        .filter(|(_, w)| *w > 1e-12)
        .collect();
    let total: f64 = sigma.iter().map(|(_, w)| w).sum();
    let sigma: Vec<(Vec<usize>, f64)> = sigma.into_iter().map(|(f, w)| (f, w / total)).collect();
    let phi = mixed_to_behavioral(&sigma, nd, na);
    let a_star = (0..na)
        .find(|&a| s.attacker[a] > 1e-9 && ep.eval(a, &s.defender) >= s.value - 1e-9)
        .unwrap_or_else(|| argmax_by(na, |a| ep.eval(a, &s.defender)));
    let mut diagnostics = SolveDiagnostics {
        solver: "epigraph LP over defender functions",
        maxmin_value: Some(s.maxmin_value),
        ..Default::default()
    };
    diagnostics.absorb(&s.lp);
    diagnostics.absorb(&s.dual_lp);
    Ok(GameSolution {
        kind: GameKind::VIMixed,
        value: s.value,
        defender: DefenderStrategy::Functions(sigma),
        attacker: AttackerStrategy::Pure(a_star),
        behavioral: Some(BehavioralForm::Defender(phi)),
        notes: vec![],
        diagnostics,
    })
}

/// Marginalise a distribution over functions 𝒜 → 𝒟 into `[a][d]`.
pub fn mixed_to_behavioral(sigma: &[(Vec<usize>, f64)], n_defender: usize, n_attacker: usize) -> Vec<Vec<f64>> {
    let mut phi = vec![vec![0.0; n_defender]; n_attacker];
    for (f, w) in sigma {
        for (a, &d) in f.iter().enumerate() {
            phi[a][d] += w;
        }
    }
    phi
}

impl LeakageGame {
    fn defender_marginal(&self, s: &DefenderStrategy, a: usize) -> Vec<f64> {
        match s {
            DefenderStrategy::Mixed(d) => d.clone(),
            DefenderStrategy::Functions(sigma) => {
                mixed_to_behavioral(sigma, self.defender.len(), self.attacker.len()).swap_remove(a)
            }
            DefenderStrategy::Behavioral(phi) => phi[a].clone(),
        }
    }
}

/// Recomputes the expected payoff of a strategy profile with the kind's own formula:
/// expected `u(d, a)` for visible kinds, expected `𝕍[π, ⨊ C_da]` for hidden ones.
pub fn evaluate(
    g: &LeakageGame,
    kind: GameKind,
    defender: &DefenderStrategy,
    attacker: &AttackerStrategy,
) -> Result<f64> {
    let na = g.attacker.len();
    let alpha = match attacker {
        AttackerStrategy::Mixed(a) => a.clone(),
        AttackerStrategy::Pure(a) => point(na, *a),
        AttackerStrategy::Response(resp) => {
            let DefenderStrategy::Mixed(delta) = defender else {
                return Err(Error::TypeMismatch(
                    "an attacker response function needs a defender distribution".into(),
                ));
            };
            if kind.is_hidden() {
                return Err(Error::TypeMismatch("hidden-choice kinds have no attacker response function".into()));
            }
            let mut total = 0.0;
            for (d, &w) in delta.iter().enumerate() {
                if w > 0.0 {
                    total += w * posterior_vuln(&g.measure, &g.prior, g.channel(d, resp[d]))?;
                }
            }
            return Ok(total);
        }
    };
    let mut total = 0.0;
    for (a, &wa) in alpha.iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        let marginal = g.defender_marginal(defender, a);
        let v = if kind.is_hidden() {
            g.hidden_payoff(a, &marginal)?
        } else {
            let mut s = 0.0;
            for (d, &wd) in marginal.iter().enumerate() {
                if wd > 0.0 {
                    s += wd * posterior_vuln(&g.measure, &g.prior, g.channel(d, a))?;
                }
            }
            s
        };
        total += wa * v;
    }
    Ok(total)
}

/// Widest coordinate range over (near-)optimal strategies of each player, for
/// the simultaneous kinds. `(≈0, ≈0)` means the equilibrium is unique.
pub fn strategy_spread(g: &LeakageGame, kind: GameKind, value: f64) -> Result<(f64, f64)> {
    const TOL: f64 = 1e-10;
    match kind {
        GameKind::I => equilibrium_spread(&g.payoff_table()?, value, TOL),
        GameKind::IV | GameKind::V => convex_game_spread(&g.hidden_epigraph()?, value, TOL),
        k => Err(Error::TypeMismatch(format!("spread is defined for kinds I and IV, not {k}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    AtLeast,
    Equal,
}

#[derive(Debug, Clone)]
pub struct OrderingCheck {
    pub left: GameKind,
    pub right: GameKind,
    pub relation: Ordering,
    pub left_value: f64,
    pub right_value: f64,
    pub holds: bool,
}

impl fmt::Display for OrderingCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.relation == Ordering::AtLeast { ">=" } else { "==" };
        write!(
            f,
            "{} {rel} {}: {} vs {} [{}]",
            self.left,
            self.right,
            crate::report::sig6(self.left_value),
            crate::report::sig6(self.right_value),
            if self.holds { "ok" } else { "VIOLATED" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct HierarchyReport {
    pub solutions: Vec<GameSolution>,
    pub checks: Vec<OrderingCheck>,
}

impl HierarchyReport {
    pub fn value(&self, kind: GameKind) -> f64 {
        self.solutions.iter().find(|s| s.kind == kind).map_or(f64::NAN, |s| s.value)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// The orderings that must hold between game values.
pub const HIERARCHY: [(GameKind, Ordering, GameKind); 7] = [
    (GameKind::II, Ordering::AtLeast, GameKind::I),
    (GameKind::I, Ordering::AtLeast, GameKind::III),
    (GameKind::IV, Ordering::AtLeast, GameKind::VIMixed),
    (GameKind::I, Ordering::AtLeast, GameKind::IV),
    (GameKind::III, Ordering::AtLeast, GameKind::VIMixed),
    (GameKind::VIMixed, Ordering::AtLeast, GameKind::VIBehavioral),
    (GameKind::IV, Ordering::Equal, GameKind::V),
];

/// Solves every kind and checks [`HIERARCHY`] to within [`ORDER_TOL`].
pub fn audit_hierarchy(g: &LeakageGame, opts: &SolveOptions) -> Result<HierarchyReport> {
    let solutions = GameKind::ALL
        .iter()
        .map(|&k| solve_with(g, k, opts))
        .collect::<Result<Vec<_>>>()?;
    let value = |k: GameKind| solutions.iter().find(|s| s.kind == k).map(|s| s.value).unwrap_or(f64::NAN);
    let checks = HIERARCHY
        .iter()
        .map(|&(left, relation, right)| {
            let (l, r) = (value(left), value(right));
            let holds = match relation {
                Ordering::AtLeast => l >= r - ORDER_TOL,
                Ordering::Equal => (l - r).abs() <= ORDER_TOL,
            };
            OrderingCheck { left, right, relation, left_value: l, right_value: r, holds }
        })
        .collect();
    Ok(HierarchyReport { solutions, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_example() -> LeakageGame {
        let c = |d| Channel::from_atoms(&["x0", "x1"], &["0", "1"], d).unwrap();
        let chans = [
            c(vec![vec![1., 0.], vec![1., 0.]]),
            c(vec![vec![1., 0.], vec![0., 1.]]),
            c(vec![vec![0., 1.], vec![1., 0.]]),
            c(vec![vec![1. / 3., 2. / 3.], vec![2. / 3., 1. / 3.]]),
        ];
        let acts = vec![Label::atom("0"), Label::atom("1")];
        let prior = Prior::uniform(vec!["x0".into(), "x1".into()]).unwrap();
        LeakageGame::from_fn(acts.clone(), acts, prior, VulnMeasure::Bayes, |d, a| {
            let k = 2 * usize::from(d.as_atom() == Some("1")) + usize::from(a.as_atom() == Some("1"));
            Ok(chans[k].clone())
        })
        .unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in GameKind::ALL {
            assert_eq!(k.to_string().parse::<GameKind>().unwrap(), k);
        }
        assert!("VII".parse::<GameKind>().is_err());
    }

    #[test]
    fn payoff_table_matches_table1() {
        let g = running_example();
        assert_eq!(g.pure_payoff(&"0".into(), &"1".into()).unwrap(), 1.0);
        let u = g.payoff_table().unwrap();
        assert!((u[1][1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(g.pure_payoff(&"7".into(), &"1".into()), Err(Error::UnknownAction(_))));
    }

    #[test]
    fn sequential_kinds() {
        let g = running_example();
        let s = solve(&g, GameKind::II).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.defender, DefenderStrategy::Mixed(vec![1.0, 0.0]));
        let s = solve(&g, GameKind::III).unwrap();
        assert!((s.value - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.attacker, AttackerStrategy::Pure(1));
        let DefenderStrategy::Functions(f) = &s.defender else { panic!() };
        assert_eq!(f[0].0[1], 1);
    }

    #[test]
    fn function_enumeration() {
        assert_eq!(function_of(0, 3, 2), vec![0, 0]);
        assert_eq!(function_of(5, 3, 2), vec![2, 1]);
        let phi = mixed_to_behavioral(&[(vec![0, 1], 0.25), (vec![0, 0], 0.75)], 2, 2);
        assert_eq!(phi, vec![vec![1.0, 0.0], vec![0.75, 0.25]]);
    }

    #[test]
    fn vi_mixed_cap() {
        let g = running_example();
        let opts = SolveOptions { vi_mixed_cap: 3 };
        assert!(matches!(solve_with(&g, GameKind::VIMixed, &opts), Err(Error::TooLarge(_))));
    }
}
