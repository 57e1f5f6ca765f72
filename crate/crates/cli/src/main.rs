//! `leakgame`: compose and compare channels, measure leakage, solve leakage
//! games and analyse the bitwise password checker.
//!
//! Exit codes: 0 ok, 1 error, 2 channels not equivalent, 3 hierarchy violated.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use leakgame::channel::{equivalent, hidden_choice, visible_choice, Channel, IndexDistribution, Refinement, EQUIV_TOL};
use leakgame::games::{audit_hierarchy, solve_with, DefenderStrategy, GameKind, LeakageGame, SolveOptions, DEFAULT_VI_MIXED_CAP};
use leakgame::matrix::LabeledMatrix;
use leakgame::vulnerability::{leakage, posterior_vuln, posterior_vuln_mc, prior_vuln, LeakageMode, Prior, VulnMeasure};
use leakgame::report::sig6;
use leakgame::{fixtures, io, pwd, Label};
use log::{debug, info};
use render::{Format, Report};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "leakgame", version, about = "Channels, leakage and leakage games")]
struct Cli {
    /// output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// seed for every sampled quantity
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// tolerance for channel equivalence
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// largest |D|^|A| the mixed attacker-first hidden game will enumerate
    #[arg(long, global = true, default_value_t = DEFAULT_VI_MIXED_CAP)]
    cap: u64,
    /// write the result here instead of stdout
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel composition and comparison
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Prior and posterior vulnerability, leakage
    Vuln {
        /// prior file, or `uniform` over the channel's secrets
        #[arg(long)]
        prior: String,
        #[arg(long)]
        channel: PathBuf,
        /// gain-function file; Bayes vulnerability when omitted
        #[arg(long)]
        measure: Option<PathBuf>,
        /// also report a Monte-Carlo estimate from this many samples
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Leakage games
    #[command(subcommand)]
    Game(GameCmd),
    /// The bitwise password checker
    #[command(subcommand)]
    Pwd(PwdCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Hidden,
    Visible,
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Hidden or visible probabilistic choice over channels
    Compose {
        #[arg(long, value_enum)]
        op: Op,
        /// distribution file (`{"weights": {...}}` or a list), or inline weights `1/3,2/3`
        #[arg(long)]
        dist: String,
        #[arg(required = true)]
        channels: Vec<PathBuf>,
    },
    /// Are two channels equivalent up to post-processing both ways?
    Equiv { a: PathBuf, b: PathBuf },
    /// Check that files hold valid channels
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GameCmd {
    /// Solve one kind of game
    Solve {
        /// game file, or `running-example`
        game: String,
        /// I, II, III, IV, V, VI-mixed or VI-behavioral
        #[arg(long)]
        kind: String,
    },
    /// Solve every kind and check the ordering of their values
    Audit { game: String },
}

#[derive(Subcommand)]
enum PwdCmd {
    /// Write the checker game as JSON
    Gen {
        #[command(flatten)]
        args: PwdArgs,
    },
    /// Payoff table and hidden simultaneous equilibrium
    Analyze {
        #[command(flatten)]
        args: PwdArgs,
    },
    /// Expected number of loop iterations, analytic and simulated
    Timing {
        #[arg(long)]
        bits: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(clap::Args)]
struct PwdArgs {
    #[arg(long)]
    bits: usize,
    /// prior file, `uniform`, or a bundled prior (pihat, piA, piB)
    #[arg(long, default_value = "uniform")]
    prior: String,
    /// refuse larger passwords
    #[arg(long, default_value_t = pwd::DEFAULT_MAX_BITS)]
    max_bits: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_channel(path: &Path) -> Result<Channel> {
    io::read_channel(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_prior(arg: &str, secrets: impl FnOnce() -> Vec<Label>) -> Result<Prior> {
    let path = Path::new(arg);
    if path.is_file() {
        return io::read_prior(&read(path)?).with_context(|| format!("in {arg}"));
    }
    if arg == "uniform" {
        return Ok(Prior::uniform(secrets())?);
    }
    // bundled priors may be named with or without the .json suffix
    let stem = Path::new(arg).file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    fixtures::prior(stem).map_err(|_| anyhow!("no prior file `{arg}` and no bundled prior of that name (pihat, piA, piB)"))
}

fn load_game(arg: &str) -> Result<LeakageGame> {
    if arg == "running-example" && !Path::new(arg).exists() {
        return Ok(fixtures::running_example());
    }
    io::read_game(&read(Path::new(arg))?).with_context(|| format!("in {arg}"))
}

fn parse_weight(s: &str) -> Result<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => Ok(a.trim().parse::<f64>()? / b.trim().parse::<f64>()?),
        None => Ok(s.parse()?),
    }
}

/// Weights in channel order; index labels default to `1..k`.
fn load_dist(arg: &str, k: usize) -> Result<IndexDistribution> {
    let path = Path::new(arg);
    let entries: Vec<(Label, f64)> = if path.is_file() {
        let v = io::parse(&read(path)?)?;
        let w = v.get("weights").unwrap_or(&v);
        match w {
            Value::Array(xs) => xs
                .iter()
                .enumerate()
                .map(|(i, x)| Ok((Label::atom((i + 1).to_string()), x.as_f64().ok_or_else(|| anyhow!("weight {x} is not a number"))?)))
                .collect::<Result<_>>()?,
            Value::Object(m) => m
                .iter()
                .map(|(l, x)| Ok((Label::parse(l)?, x.as_f64().ok_or_else(|| anyhow!("weight of `{l}` is not a number"))?)))
                .collect::<Result<_>>()?,
            _ => bail!("{arg}: expected a list of weights or a `weights` object"),
        }
    } else {
        arg.split(',').enumerate().map(|(i, s)| Ok((Label::atom((i + 1).to_string()), parse_weight(s)?))).collect::<Result<_>>()?
    };
    if entries.len() != k {
        bail!("{} weights for {k} channels", entries.len());
    }
    Ok(IndexDistribution::new(entries)?)
}

fn refinement_json(r: &Refinement) -> Value {
    json!({
        "holds": r.holds,
        "residual": r.residual,
        "worst_column": r.worst_column.as_ref().map(Label::to_string),
        "map": io::matrix_to_json(&r.map),
    })
}

fn channel_cmd(cli: &Cli, cmd: &ChannelCmd) -> Result<Report> {
    match cmd {
        ChannelCmd::Compose { op, dist, channels } => {
            let cs = channels.iter().map(|p| load_channel(p)).collect::<Result<Vec<_>>>()?;
            let mu = load_dist(dist, cs.len())?;
            let family: Vec<(Label, &Channel)> = mu.entries().iter().map(|(l, _)| l.clone()).zip(cs.iter()).collect();
            let out = match op {
                Op::Hidden => hidden_choice(&mu, &family)?,
                Op::Visible => visible_choice(&mu, &family)?,
            };
            info!("composed {} channels into {}x{}", cs.len(), out.secrets().len(), out.outputs().len());
            Ok(Report::new(io::channel_to_json(&out)).with_table(out.into_matrix()))
        }
        ChannelCmd::Equiv { a, b } => {
            let (ca, cb) = (load_channel(a)?, load_channel(b)?);
            let tol = cli.tol.unwrap_or(EQUIV_TOL);
            let e = equivalent(&ca, &cb, tol)?;
            let witness = if e.equivalent {
                Value::Null
            } else {
                let (dir, r) = if e.forward.holds { ("second from first", &e.backward) } else { ("first from second", &e.forward) };
                json!({
                    "cannot_recover": dir,
                    "column": r.worst_column.as_ref().map(Label::to_string),
                    "residual": r.residual,
                })
            };
            let v = json!({
                "equivalent": e.equivalent,
                "tolerance": tol,
                "witness": witness,
                "first_from_second": refinement_json(&e.forward),
                "second_from_first": refinement_json(&e.backward),
            });
            Ok(Report::new(v).exit(if e.equivalent { 0 } else { 2 }))
        }
        ChannelCmd::Validate { files } => {
            let mut items = vec![];
            for f in files {
                let c = load_channel(f)?;
                items.push(json!({
                    "file": f.display().to_string(),
                    "valid": true,
                    "secrets": c.secrets().len(),
                    "outputs": c.outputs().len(),
                    "non_interferent": c.is_non_interferent(EQUIV_TOL),
                }));
            }
            Ok(Report::new(Value::Array(items)))
        }
    }
}

fn vuln_cmd(cli: &Cli, prior: &str, channel: &Path, measure: Option<&Path>, samples: Option<usize>) -> Result<Report> {
    let c = load_channel(channel)?;
    let pi = load_prior(prior, || c.secrets().to_vec())?;
    let v = match measure {
        Some(p) => io::measure_from_json(&io::parse(&read(p)?)?, Some(pi.secrets()))?,
        None => VulnMeasure::Bayes,
    };
    let before = prior_vuln(&v, &pi)?;
    let after = posterior_vuln(&v, &pi, &c)?;
    let mut out = json!({
        "prior_vulnerability": before,
        "posterior_vulnerability": after,
        "additive_leakage": leakage(&v, &pi, &c, LeakageMode::Additive)?,
        "multiplicative_leakage": leakage(&v, &pi, &c, LeakageMode::Multiplicative).ok(),
    });
    if let Some(n) = samples {
        let mc = posterior_vuln_mc(&v, &pi, &c, n, cli.seed)?;
        out["monte_carlo"] = json!({ "value": mc.value, "std_error": mc.std_error, "samples": mc.samples, "seed": cli.seed });
    }
    Ok(Report::new(out))
}

fn game_cmd(cli: &Cli, cmd: &GameCmd) -> Result<Report> {
    let opts = SolveOptions { vi_mixed_cap: cli.cap };
    match cmd {
        GameCmd::Solve { game, kind } => {
            let g = load_game(game)?;
            let kind: GameKind = kind.parse()?;
            let s = solve_with(&g, kind, &opts)?;
            debug!("{kind}: {} pivots, duality gap {:e}", s.diagnostics.lp_pivots, s.diagnostics.duality_gap);
            Ok(Report::new(io::solution_to_json(&g, &s)))
        }
        GameCmd::Audit { game } => {
            let g = load_game(game)?;
            let h = audit_hierarchy(&g, &opts)?;
            let v = io::hierarchy_to_json(&g, &h);
            let mut text: String = h.solutions.iter().map(|s| format!("{:>13}  {}\n", s.kind.to_string(), sig6(s.value))).collect();
            text.push('\n');
            text.extend(h.checks.iter().map(|c| format!("{c}\n")));
            let mut r = Report::new(v).with_pretty(text);
            if !h.passed() {
                for c in h.checks.iter().filter(|c| !c.holds) {
                    log::warn!("{c}");
                }
                r = r.exit(3);
            }
            Ok(r)
        }
    }
}

fn pwd_game(args: &PwdArgs) -> Result<LeakageGame> {
    let n = args.bits;
    // check the size before building a prior over 2^n secrets
    if n == 0 || n > args.max_bits.min(9) {
        pwd::build_game_capped(n, Prior::uniform(pwd::secrets(1))?, VulnMeasure::Bayes, args.max_bits)?;
    }
    let pi = load_prior(&args.prior, || pwd::secrets(n))?;
    Ok(pwd::build_game_capped(n, pi, VulnMeasure::Bayes, args.max_bits)?)
}

fn pwd_cmd(cli: &Cli, cmd: &PwdCmd) -> Result<Report> {
    match cmd {
        PwdCmd::Gen { args } => Ok(Report::new(io::game_to_json(&pwd_game(args)?)?)),
        PwdCmd::Analyze { args } => {
            let g = pwd_game(args)?;
            let table = LabeledMatrix::new(g.defender().to_vec(), g.attacker().to_vec(), g.payoff_table()?)?;
            let s = solve_with(&g, GameKind::IV, &SolveOptions { vi_mixed_cap: cli.cap })?;
            let nd = g.defender().len();
            let uniform = vec![1.0 / nd as f64; nd];
            let per_action = (0..g.attacker().len()).map(|a| g.hidden_payoff(a, &uniform)).collect::<leakgame::Result<Vec<_>>>()?;
            let worst = per_action.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let worst_actions: Vec<String> =
                g.attacker().iter().zip(&per_action).filter(|(_, &u)| u >= worst - 1e-9).map(|(a, _)| a.to_string()).collect();
            let DefenderStrategy::Mixed(delta) = &s.defender else { unreachable!("the hidden simultaneous game has a mixed defender") };
            let mut summary = vec![("game_value".to_string(), s.value), ("uniform_worst_case".to_string(), worst)];
            summary.extend(g.defender().iter().zip(delta).map(|(d, &w)| (format!("defender[{d}]"), w)));
            let out = json!({
                "bits": args.bits,
                "payoff": io::matrix_to_json(&table),
                "equilibrium": io::solution_to_json(&g, &s),
                "uniform_defender": {
                    "worst_case": worst,
                    "worst_actions": worst_actions,
                    "payoffs": Value::Object(g.attacker().iter().zip(&per_action).map(|(a, &u)| (a.to_string(), json!(u))).collect()),
                },
            });
            Ok(Report::new(out).with_table(table).with_summary(summary))
        }
        PwdCmd::Timing { bits, samples } => {
            if !(1..=64).contains(bits) {
                bail!("--bits must be between 1 and 64");
            }
            let analytic = pwd::expected_iterations(*bits);
            let simulated = pwd::measured_iterations(*bits, *samples, cli.seed);
            Ok(Report::new(json!({
                "bits": bits,
                "analytic": analytic,
                "simulated": simulated,
                "samples": samples,
                "seed": cli.seed,
            })))
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let report = match &cli.command {
        Command::Channel(c) => channel_cmd(cli, c)?,
        Command::Vuln { prior, channel, measure, samples } => vuln_cmd(cli, prior, channel, measure.as_deref(), *samples)?,
        Command::Game(c) => game_cmd(cli, c)?,
        Command::Pwd(c) => pwd_cmd(cli, c)?,
    };
    let text = report.render(cli.format)?;
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(report.exit)
}

fn error_kind(e: &anyhow::Error) -> String {
    if let Some(le) = e.downcast_ref::<leakgame::Error>() {
        // variant name, e.g. `TypeMismatch`
        return format!("{le:?}").split('(').next().unwrap_or("Error").to_string();
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return "Io".into();
    }
    "Usage".into()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let msg = json!({ "error": { "kind": error_kind(&e), "message": format!("{e:#}") } });
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
