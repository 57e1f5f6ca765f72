//! JSON encodings of matrices, channels, priors, gain functions, games and
//! solutions. Labels are written in their text form (`y@1`).

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::games::{
    AttackerStrategy, BehavioralForm, DefenderStrategy, GameSolution, HierarchyReport, LeakageGame,
};
use crate::label::Label;
use crate::matrix::LabeledMatrix;
use crate::vulnerability::{GainFunction, Prior, VulnMeasure};

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn labels(v: &[String]) -> Result<Vec<Label>> {
    v.iter().map(|s| Label::parse(s)).collect()
}

fn texts(v: &[Label]) -> Vec<String> {
    v.iter().map(Label::to_string).collect()
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    rows: Vec<String>,
    cols: Vec<String>,
    data: Vec<Vec<f64>>,
}

pub fn matrix_to_json(m: &LabeledMatrix) -> Value {
    json!({ "rows": texts(m.rows()), "cols": texts(m.cols()), "data": m.to_rows() })
}

pub fn matrix_from_json(v: &Value) -> Result<LabeledMatrix> {
    let doc: MatrixDoc = serde_json::from_value(v.clone()).map_err(parse_err)?;
    LabeledMatrix::new(labels(&doc.rows)?, labels(&doc.cols)?, doc.data)
}

pub fn channel_to_json(c: &Channel) -> Value {
    let mut v = matrix_to_json(c.matrix());
    v["kind"] = json!("channel");
    v
}

/// Accepts plain matrices too; a `kind` other than `channel` is rejected.
pub fn channel_from_json(v: &Value) -> Result<Channel> {
    match v.get("kind").and_then(Value::as_str) {
        None | Some("channel") => Channel::new(matrix_from_json(v)?),
        Some(k) => Err(Error::Parse(format!("expected a channel, found kind `{k}`"))),
    }
}

pub fn prior_to_json(p: &Prior) -> Value {
    let w: Map<String, Value> = p.secrets().iter().zip(p.weights()).map(|(s, &w)| (s.to_string(), json!(w))).collect();
    json!({ "weights": w })
}

/// Weights are renormalised to sum to one (printed priors rarely do exactly).
pub fn prior_from_json(v: &Value) -> Result<Prior> {
    let w = v
        .get("weights")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("prior needs a `weights` object".into()))?;
    let pairs = w
        .iter()
        .map(|(k, x)| {
            let x = x.as_f64().ok_or_else(|| Error::Parse(format!("weight of `{k}` is not a number")))?;
            Ok((Label::parse(k)?, x))
        })
        .collect::<Result<Vec<_>>>()?;
    Prior::renormalized(pairs)
}

#[derive(Serialize, Deserialize)]
struct GainDoc {
    guesses: Vec<String>,
    #[serde(default)]
    secrets: Option<Vec<String>>,
    gain: Vec<Vec<f64>>,
}

pub fn gain_to_json(g: &GainFunction) -> Value {
    let rows: Vec<Vec<f64>> =
        (0..g.guesses().len()).map(|w| (0..g.secrets().len()).map(|x| g.gain(w, x)).collect()).collect();
    json!({ "guesses": texts(g.guesses()), "secrets": texts(g.secrets()), "gain": rows })
}

/// `secrets` may be omitted when the caller knows them (e.g. from the prior).
pub fn gain_from_json(v: &Value, default_secrets: Option<&[Label]>) -> Result<GainFunction> {
    let doc: GainDoc = serde_json::from_value(v.clone()).map_err(parse_err)?;
    let secrets = match (&doc.secrets, default_secrets) {
        (Some(s), _) => labels(s)?,
        (None, Some(s)) => s.to_vec(),
        (None, None) => return Err(Error::Parse("gain function needs `secrets`".into())),
    };
    GainFunction::new(labels(&doc.guesses)?, secrets, doc.gain)
}

pub fn measure_to_json(m: &VulnMeasure) -> Result<Value> {
    match m {
        VulnMeasure::Bayes => Ok(json!({ "type": "bayes" })),
        VulnMeasure::Gain(g) => {
            let mut v = gain_to_json(g);
            v["type"] = json!("gain");
            Ok(v)
        }
        VulnMeasure::Custom(c) => Err(Error::Parse(format!("measure `{}` has no JSON form", c.name()))),
    }
}

/// `"bayes"`, `{"type": "bayes"}`, or `{"type": "gain", "guesses", "gain", "secrets"?}`.
pub fn measure_from_json(v: &Value, default_secrets: Option<&[Label]>) -> Result<VulnMeasure> {
    let ty = v.as_str().or_else(|| v.get("type").and_then(Value::as_str));
    match ty {
        Some("bayes") => Ok(VulnMeasure::Bayes),
        Some("gain") => Ok(VulnMeasure::Gain(gain_from_json(v, default_secrets)?)),
        None if v.get("gain").is_some() => Ok(VulnMeasure::Gain(gain_from_json(v, default_secrets)?)),
        other => Err(Error::Parse(format!("unknown measure {other:?}"))),
    }
}

/// Channels are keyed `"d|a"`.
pub fn game_to_json(g: &LeakageGame) -> Result<Value> {
    let mut cs = Map::new();
    for (di, d) in g.defender().iter().enumerate() {
        for (ai, a) in g.attacker().iter().enumerate() {
            cs.insert(format!("{d}|{a}"), channel_to_json(g.channel(di, ai)));
        }
    }
    Ok(json!({
        "defender": texts(g.defender()),
        "attacker": texts(g.attacker()),
        "prior": prior_to_json(g.prior()),
        "measure": measure_to_json(g.measure())?,
        "channels": cs,
    }))
}

/// `prior` may be the string `"uniform"`; a missing `measure` means Bayes vulnerability.
pub fn game_from_json(v: &Value) -> Result<LeakageGame> {
    let list = |key: &str| -> Result<Vec<Label>> {
        let xs: Vec<String> = serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("`{key}`: {e}")))?;
        labels(&xs)
    };
    let (defender, attacker) = (list("defender")?, list("attacker")?);
    let raw = v
        .get("channels")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("game needs a `channels` object".into()))?;
    let mut channels = Vec::with_capacity(raw.len());
    for (key, c) in raw {
        let (d, a) = key
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("channel key `{key}` is not `d|a`")))?;
        channels.push(((Label::parse(d)?, Label::parse(a)?), channel_from_json(c)?));
    }
    let prior = match v.get("prior") {
        Some(Value::String(s)) if s == "uniform" => {
            let c = &channels.first().ok_or_else(|| Error::Parse("game has no channels".into()))?.1;
            Prior::uniform(c.secrets().to_vec())?
        }
        Some(p) => prior_from_json(p)?,
        None => return Err(Error::Parse("game needs a `prior`".into())),
    };
    let measure = match v.get("measure") {
        None | Some(Value::Null) => VulnMeasure::Bayes,
        Some(m) => measure_from_json(m, Some(prior.secrets()))?,
    };
    LeakageGame::new(defender, attacker, channels, prior, measure)
}

fn distribution(names: &[Label], w: &[f64]) -> Value {
    Value::Object(names.iter().zip(w).map(|(n, &x)| (n.to_string(), json!(x))).collect())
}

fn nested(outer: &[Label], inner: &[Label], rows: &[Vec<f64>]) -> Value {
    Value::Object(outer.iter().zip(rows).map(|(o, r)| (o.to_string(), distribution(inner, r))).collect())
}

pub fn defender_to_json(g: &LeakageGame, s: &DefenderStrategy) -> Value {
    let (d, a) = (g.defender(), g.attacker());
    match s {
        DefenderStrategy::Mixed(w) => json!({ "type": "mixed", "distribution": distribution(d, w) }),
        DefenderStrategy::Functions(fs) => {
            let items: Vec<Value> = fs
                .iter()
                .map(|(f, w)| {
                    let map: Map<String, Value> =
                        a.iter().zip(f).map(|(ai, &di)| (ai.to_string(), json!(d[di].to_string()))).collect();
                    json!({ "function": map, "weight": w })
                })
                .collect();
            json!({ "type": "functions", "distribution": items })
        }
        DefenderStrategy::Behavioral(rows) => json!({ "type": "behavioral", "map": nested(a, d, rows) }),
    }
}

pub fn attacker_to_json(g: &LeakageGame, s: &AttackerStrategy) -> Value {
    let (d, a) = (g.defender(), g.attacker());
    match s {
        AttackerStrategy::Mixed(w) => json!({ "type": "mixed", "distribution": distribution(a, w) }),
        AttackerStrategy::Pure(k) => json!({ "type": "pure", "action": a[*k].to_string() }),
        AttackerStrategy::Response(r) => {
            let map: Map<String, Value> =
                d.iter().zip(r).map(|(di, &ak)| (di.to_string(), json!(a[ak].to_string()))).collect();
            json!({ "type": "response", "function": map })
        }
    }
}

pub fn solution_to_json(g: &LeakageGame, s: &GameSolution) -> Value {
    let behavioral = match &s.behavioral {
        None => Value::Null,
        Some(BehavioralForm::Attacker(r)) => {
            json!({ "player": "attacker", "map": nested(g.defender(), g.attacker(), r) })
        }
        Some(BehavioralForm::Defender(r)) => {
            json!({ "player": "defender", "map": nested(g.attacker(), g.defender(), r) })
        }
    };
    let d = &s.diagnostics;
    json!({
        "kind": s.kind.to_string(),
        "value": s.value,
        "defender": defender_to_json(g, &s.defender),
        "attacker": attacker_to_json(g, &s.attacker),
        "behavioral": behavioral,
        "notes": s.notes,
        "diagnostics": {
            "solver": d.solver,
            "lp_rows": d.lp_rows,
            "lp_cols": d.lp_cols,
            "lp_pivots": d.lp_pivots,
            "duality_gap": d.duality_gap,
            "primal_residual": d.primal_residual,
            "maxmin_value": d.maxmin_value,
        },
    })
}

pub fn hierarchy_to_json(g: &LeakageGame, h: &HierarchyReport) -> Value {
    let values: Map<String, Value> = h.solutions.iter().map(|s| (s.kind.to_string(), json!(s.value))).collect();
    let checks: Vec<Value> = h
        .checks
        .iter()
        .map(|c| json!({ "relation": c.to_string(), "left": c.left_value, "right": c.right_value, "holds": c.holds }))
        .collect();
    let sols: Vec<Value> = h.solutions.iter().map(|s| solution_to_json(g, s)).collect();
    json!({ "values": values, "checks": checks, "passed": h.passed(), "solutions": sols })
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn read_channel(text: &str) -> Result<Channel> {
    channel_from_json(&parse(text)?)
}

pub fn read_prior(text: &str) -> Result<Prior> {
    prior_from_json(&parse(text)?)
}

pub fn read_game(text: &str) -> Result<LeakageGame> {
    game_from_json(&parse(text)?)
}
