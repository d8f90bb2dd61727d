//! Command-line front end.
//!
//! [`parse_args`] turns an argument list into a validated [`RunRequest`];
//! [`run`] executes it, writes the result file atomically and returns the
//! process exit status: 0 on pass, 1 on error, 2 on a failed statistical
//! check.

mod args;
mod output;
mod run;

use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::seed_from_amplitudes;
use crate::walk::{chip_counts, Mode, SimplexPoint, WalkConfig};

pub use args::{Format, Quantity};
pub use run::run;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Compare,
    Mfpt,
    Density,
    Analytic(Quantity),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Simulate => "simulate".into(),
            Command::Compare => "compare".into(),
            Command::Mfpt => "mfpt".into(),
            Command::Density => "density".into(),
            Command::Analytic(q) => format!("analytic {}", quantity_name(*q)),
        }
    }

    pub fn simulates(&self) -> bool {
        !matches!(self, Command::Analytic(_))
    }
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Fpp => "fpp",
        Quantity::Mfpt => "mfpt",
        Quantity::Green => "green",
        Quantity::Density => "density",
    }
}

/// The start as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Amplitudes { raw: Vec<String>, values: Vec<Complex64> },
    Point(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub command: Command,
    pub state: StateSpec,
    /// The simplex point `state` resolves to.
    pub start: SimplexPoint,
    pub mode: Mode,
    pub config: WalkConfig,
    pub trials: u64,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub trace: bool,
    pub wall_clock: bool,
    pub s: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn clap_usage(err: &clap::Error) -> Error {
    let text = err.to_string();
    let line = text.lines().next().unwrap_or("invalid arguments");
    usage(line.strip_prefix("error: ").unwrap_or(line))
}

fn split_list(flag: &str, text: &str) -> Result<Vec<String>> {
    let items: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    if items.iter().any(String::is_empty) {
        return Err(usage(format!("--{flag}: empty entry in '{text}'")));
    }
    Ok(items)
}

fn parse_reals(flag: &str, text: &str) -> Result<Vec<f64>> {
    split_list(flag, text)?
        .iter()
        .map(|item| {
            item.parse::<f64>()
                .map_err(|_| usage(format!("--{flag}: '{item}' is not a number")))
        })
        .collect()
}

fn parse_state(state: &args::StateArgs) -> Result<(StateSpec, SimplexPoint)> {
    if let Some(text) = &state.point {
        let coords = parse_reals("point", text)?;
        let start = SimplexPoint::new(coords.clone()).map_err(|e| usage(format!("--point: {e}")))?;
        return Ok((StateSpec::Point(coords), start));
    }
    let text = state.amps.as_deref().expect("clap requires --amps or --point");
    let raw = split_list("amps", text)?;
    let values = raw
        .iter()
        .map(|item| {
            Complex64::from_str(item)
                .map_err(|_| usage(format!("--amps: '{item}' is not a complex number")))
        })
        .collect::<Result<Vec<_>>>()?;
    let start = seed_from_amplitudes(&values).map_err(|e| usage(format!("--amps: {e}")))?;
    Ok((StateSpec::Amplitudes { raw, values }, start))
}

fn require_two_states(command: Command, start: &SimplexPoint) -> Result<()> {
    if start.dimension() != 2 {
        return Err(usage(format!(
            "{} needs a two-state start, got {} states",
            command.name(),
            start.dimension()
        )));
    }
    Ok(())
}

fn walk_request(command: Command, a: args::WalkArgs) -> Result<RunRequest> {
    let (state, start) = parse_state(&a.state)?;
    let config = WalkConfig {
        dimension: start.dimension(),
        diffusion: a.diffusion,
        dt: a.dt,
        chips: u64::from(a.chips),
        max_steps: a.max_steps,
        seed: a.seed,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    if a.mode == Mode::Discrete {
        chip_counts(&start, config.chips).map_err(|e| usage(e.to_string()))?;
    }
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    match command {
        Command::Mfpt => require_two_states(command, &start)?,
        Command::Density => {
            require_two_states(command, &start)?;
            if a.mode != Mode::Continuum {
                return Err(usage("density compares against the continuum walk; use --mode continuum"));
            }
        }
        _ => {}
    }
    let default_format = if command == Command::Density {
        Format::Csv
    } else {
        Format::Json
    };
    Ok(RunRequest {
        command,
        state,
        start,
        mode: a.mode,
        config,
        trials: a.trials,
        threads: a.threads.map(|t| t as usize),
        output: a.out,
        format: a.format.unwrap_or(default_format),
        trace: a.trace,
        wall_clock: a.wall_clock,
        s: None,
        x: None,
        t: None,
    })
}

fn analytic_request(a: args::AnalyticArgs) -> Result<RunRequest> {
    let command = Command::Analytic(a.quantity);
    let (state, start) = parse_state(&a.state)?;
    if !(a.diffusion.is_finite() && a.diffusion > 0.0) {
        return Err(usage(format!("--diffusion must be positive, got {}", a.diffusion)));
    }
    let x = a.x.as_deref().map(|t| parse_reals("x", t)).transpose()?;
    let t = a.t.as_deref().map(|t| parse_reals("t", t)).transpose()?;
    let only = |flag: &str, set: bool, quantity: Quantity| {
        if set && a.quantity != quantity {
            Err(usage(format!("--{flag} only applies to analytic {}", quantity_name(quantity))))
        } else {
            Ok(())
        }
    };
    only("s", a.s.is_some(), Quantity::Green)?;
    only("x", x.is_some(), Quantity::Green)?;
    only("t", t.is_some(), Quantity::Density)?;
    match a.quantity {
        Quantity::Fpp => {}
        Quantity::Mfpt | Quantity::Density => require_two_states(command, &start)?,
        Quantity::Green => {
            let s = a.s.ok_or_else(|| usage("analytic green needs --s"))?;
            if !(s.is_finite() && s > 0.0) {
                return Err(usage(format!("--s must be positive, got {s}")));
            }
            let x = x.as_ref().ok_or_else(|| usage("analytic green needs --x"))?;
            let want = if start.dimension() == 2 { 1 } else { start.dimension() };
            if x.len() != want {
                return Err(usage(format!("--x needs {want} value(s), got {}", x.len())));
            }
        }
    }
    let config = WalkConfig {
        dimension: start.dimension(),
        diffusion: a.diffusion,
        ..WalkConfig::default()
    };
    Ok(RunRequest {
        command,
        state,
        start,
        mode: Mode::Continuum,
        config,
        trials: 0,
        threads: None,
        output: a.out,
        format: a.format.unwrap_or(Format::Json),
        trace: false,
        wall_clock: false,
        s: a.s,
        x,
        t,
    })
}

enum Parsed {
    Run(Box<RunRequest>),
    /// Help or version text, printed with a zero exit status.
    Info(String),
}

fn parse<I, T>(argv: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("simplexwalk".into()).chain(argv.into_iter().map(Into::into));
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Ok(Parsed::Info(err.to_string()))
                }
                _ => Err(clap_usage(&err)),
            }
        }
    };
    let request = match cli.command {
        args::Sub::Simulate(a) => walk_request(Command::Simulate, a),
        args::Sub::Compare(a) => walk_request(Command::Compare, a),
        args::Sub::Mfpt(a) => walk_request(Command::Mfpt, a),
        args::Sub::Density(a) => walk_request(Command::Density, a),
        args::Sub::Analytic(a) => analytic_request(a),
    }?;
    Ok(Parsed::Run(Box::new(request)))
}

/// Parses arguments (without the program name) into a request.
///
/// Every failure, including a help request, is a one-line
/// [`Error::Usage`].
pub fn parse_args<I, T>(argv: I) -> Result<RunRequest>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse(argv)? {
        Parsed::Run(request) => Ok(*request),
        Parsed::Info(_) => Err(usage("help requested")),
    }
}

/// Parses and runs; returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse(argv) {
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            EXIT_PASS
        }
        Ok(Parsed::Run(request)) => run(&request),
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_ERROR
        }
    }
}
