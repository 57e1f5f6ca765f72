//! Browser bindings. Every entry point takes and returns JSON text so the page
//! needs no generated types; errors come back as `{"error": "..."}`.

use leakgame::channel::{hidden_choice, visible_choice, Channel, IndexDistribution};
use leakgame::games::{audit_hierarchy, solve_with, DefenderStrategy, GameKind, SolveOptions};
use leakgame::vulnerability::{leakage, posterior_vuln, prior_vuln, LeakageMode, Prior, VulnMeasure};
use leakgame::{fixtures, io, pwd, Label};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Res = Result<Value, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn wrap(r: Res) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

pub fn running_example() -> Value {
    io::game_to_json(&fixtures::running_example()).expect("bundled game serialises")
}

/// Solves one kind, or every kind with the ordering check when `kind` is `all`.
pub fn solve_game(game: &str, kind: &str) -> Res {
    let g = io::read_game(game).map_err(err)?;
    let opts = SolveOptions::default();
    if kind == "all" {
        let h = audit_hierarchy(&g, &opts).map_err(err)?;
        return Ok(io::hierarchy_to_json(&g, &h));
    }
    let kind: GameKind = kind.parse().map_err(err)?;
    let s = solve_with(&g, kind, &opts).map_err(err)?;
    Ok(io::solution_to_json(&g, &s))
}

/// Binary hidden or visible choice with weight `p` on the first channel, and
/// the Bayes leakage of the result under a uniform prior.
pub fn compose(op: &str, p: f64, first: &str, second: &str) -> Res {
    let (c1, c2) = (io::read_channel(first).map_err(err)?, io::read_channel(second).map_err(err)?);
    let mu = IndexDistribution::binary(p).map_err(err)?;
    let family: Vec<(Label, &Channel)> = vec![(Label::atom("1"), &c1), (Label::atom("2"), &c2)];
    let c = match op {
        "hidden" => hidden_choice(&mu, &family),
        "visible" => visible_choice(&mu, &family),
        _ => return Err(format!("unknown operator `{op}`")),
    }
    .map_err(err)?;
    let pi = Prior::uniform(c.secrets().to_vec()).map_err(err)?;
    let v = VulnMeasure::Bayes;
    Ok(json!({
        "channel": io::channel_to_json(&c),
        "prior_vulnerability": prior_vuln(&v, &pi).map_err(err)?,
        "posterior_vulnerability": posterior_vuln(&v, &pi, &c).map_err(err)?,
        "multiplicative_leakage": leakage(&v, &pi, &c, LeakageMode::Multiplicative).ok(),
    }))
}

/// Payoff table and hidden simultaneous equilibrium of the password checker.
pub fn password(bits: usize, prior: &str) -> Res {
    let pi = match prior {
        "uniform" => Prior::uniform(pwd::secrets(bits)).map_err(err)?,
        name => fixtures::prior(name).map_err(err)?,
    };
    // keep the page responsive: at most 4 bits (24 orders x 16 inputs)
    let g = pwd::build_game_capped(bits, pi, VulnMeasure::Bayes, 4).map_err(err)?;
    let table = g.payoff_table().map_err(err)?;
    let s = solve_with(&g, GameKind::IV, &SolveOptions::default()).map_err(err)?;
    let DefenderStrategy::Mixed(delta) = &s.defender else { return Err("unexpected strategy form".into()) };
    let nd = g.defender().len();
    let uniform = vec![1.0 / nd as f64; nd];
    let worst = (0..g.attacker().len())
        .map(|a| g.hidden_payoff(a, &uniform))
        .collect::<leakgame::Result<Vec<_>>>()
        .map_err(err)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let names = |ls: &[Label]| ls.iter().map(Label::to_string).collect::<Vec<_>>();
    Ok(json!({
        "orders": names(g.defender()),
        "inputs": names(g.attacker()),
        "payoff": table,
        "value": s.value,
        "defender": delta,
        "uniform_worst_case": worst,
        "expected_iterations": pwd::expected_iterations(bits as u32),
    }))
}

#[wasm_bindgen(js_name = runningExample)]
pub fn running_example_js() -> String {
    running_example().to_string()
}

#[wasm_bindgen(js_name = solveGame)]
pub fn solve_game_js(game: &str, kind: &str) -> String {
    wrap(solve_game(game, kind))
}

#[wasm_bindgen(js_name = compose)]
pub fn compose_js(op: &str, p: f64, first: &str, second: &str) -> String {
    wrap(compose(op, p, first, second))
}

#[wasm_bindgen(js_name = password)]
pub fn password_js(bits: usize, prior: &str) -> String {
    wrap(password(bits, prior))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_of_the_bundled_game() {
        let v = solve_game(&running_example().to_string(), "all").unwrap();
        assert_eq!(v["passed"], true);
        assert!((v["values"]["IV"].as_f64().unwrap() - 5.0 / 7.0).abs() < 1e-9);
        let v = solve_game(&running_example().to_string(), "I").unwrap();
        assert!((v["value"].as_f64().unwrap() - 0.8).abs() < 1e-9);
        assert!(solve_game("{}", "I").is_err());
        assert!(wrap(solve_game("{", "I")).starts_with("{\"error\""));
    }

    #[test]
    fn composing_two_channels() {
        let a = r#"{"rows":["x1","x2"],"cols":["y1","y2"],"data":[[0.5,0.5],[0.3333333333333333,0.6666666666666666]]}"#;
        let b = r#"{"rows":["x1","x2"],"cols":["y1","y2"],"data":[[0.3333333333333333,0.6666666666666666],[0.5,0.5]]}"#;
        let v = compose("hidden", 1.0 / 3.0, a, b).unwrap();
        assert!((v["channel"]["data"][0][0].as_f64().unwrap() - 7.0 / 18.0).abs() < 1e-12);
        let v = compose("visible", 0.5, a, b).unwrap();
        assert_eq!(v["channel"]["cols"].as_array().unwrap().len(), 4);
        assert!(compose("sideways", 0.5, a, b).is_err());
    }

    #[test]
    fn password_checker() {
        let v = password(3, "piA").unwrap();
        assert!((v["value"].as_f64().unwrap() - 0.5625).abs() < 1e-9);
        assert_eq!(v["payoff"].as_array().unwrap().len(), 6);
        assert!(password(5, "uniform").is_err());
    }
}
