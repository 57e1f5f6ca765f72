//! Bundled inputs: the 2×2 running example and three priors over 3-bit passwords.

use crate::error::{Error, Result};
use crate::games::LeakageGame;
use crate::io;
use crate::vulnerability::Prior;

pub const RUNNING_EXAMPLE_JSON: &str = include_str!("../fixtures/running_example.json");
/// Skewed towards a few passwords; the printed weights sum to 1.0001.
pub const PIHAT_JSON: &str = include_str!("../fixtures/pihat.json");
/// Uniform on passwords whose first bit is 0.
pub const PIA_JSON: &str = include_str!("../fixtures/piA.json");
pub const PIB_JSON: &str = include_str!("../fixtures/piB.json");

/// Two defender and two attacker actions over a binary secret, uniform prior,
/// Bayes vulnerability.
pub fn running_example() -> LeakageGame {
    io::read_game(RUNNING_EXAMPLE_JSON).expect("bundled running example parses")
}

/// Looks up a bundled prior by name: `pihat`, `piA`, `piB`.
pub fn prior(name: &str) -> Result<Prior> {
    let text = match name {
        "pihat" => PIHAT_JSON,
        "piA" => PIA_JSON,
        "piB" => PIB_JSON,
        _ => return Err(Error::Parse(format!("no bundled prior `{name}` (try pihat, piA, piB)"))),
    };
    io::read_prior(text)
}
