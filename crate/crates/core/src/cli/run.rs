use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::output::{csv, emit, to_json, AtomicFile};
use super::{Command, Format, Quantity, RunRequest, StateSpec, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
use crate::analytic::{
    fpp_2state, fpp_nstate, fpt_cdf_2state, fpt_density_2state, fpt_density_inversion,
    green_2state, green_nstate, mfpt_2state, wall_flux_2state, DiffusionParams, NGreenParams,
    VALIDATED_DIMENSION,
};
use crate::error::{Error, Result};
use crate::sim;
use crate::stats::{compare_born, compare_mfpt, ks_statistic, BornComparison, EnsembleStats};
use crate::walk::Mode;

/// KS distance above which `density` reports a failed comparison.
pub const DENSITY_KS_LIMIT: f64 = 0.02;

/// Points in the default time grid of `analytic density`.
const DENSITY_GRID_POINTS: usize = 100;

/// Executes `request` and returns the exit status.
pub fn run(request: &RunRequest) -> i32 {
    match execute(request) {
        Ok(Outcome { pass, summary }) => {
            if request.output.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_ERROR
        }
    }
}

struct Outcome {
    pass: bool,
    summary: String,
}

#[derive(Serialize)]
struct RequestRecord<'a> {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    amps: Option<&'a [String]>,
    start: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    diffusion: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chips: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<&'a [f64]>,
}

impl<'a> RequestRecord<'a> {
    /// Everything that determines the result; thread count, output
    /// location and format are left out.
    fn new(r: &'a RunRequest) -> Self {
        let walk = r.command.simulates();
        let amps = match &r.state {
            StateSpec::Amplitudes { raw, .. } => Some(raw.as_slice()),
            StateSpec::Point(_) => None,
        };
        RequestRecord {
            command: r.command.name(),
            amps,
            start: r.start.coords(),
            mode: walk.then_some(r.mode),
            trials: walk.then_some(r.trials),
            seed: walk.then_some(r.config.seed),
            diffusion: r.config.diffusion,
            dt: walk.then_some(r.config.dt),
            chips: walk.then_some(r.config.chips),
            max_steps: walk.then_some(r.config.max_steps),
            s: r.s,
            x: r.x.as_deref(),
            t: r.t.as_deref(),
        }
    }
}

#[derive(Serialize)]
struct MfptRecord {
    analytic: Option<f64>,
    observed: Option<f64>,
    stderr: Option<f64>,
}

#[derive(Serialize)]
struct EnsembleReport<'a> {
    request: RequestRecord<'a>,
    expected: &'a [f64],
    observed: Option<&'a [f64]>,
    z_scores: Option<&'a [f64]>,
    chi_square: Option<f64>,
    mfpt: MfptRecord,
    incomplete: u64,
    trials: u64,
    seed: u64,
    elapsed_wall_s: Option<f64>,
}

#[derive(Serialize)]
struct DensityReport<'a> {
    request: RequestRecord<'a>,
    t: &'a [f64],
    analytic_density: &'a [f64],
    empirical_density: &'a [f64],
    ks: f64,
    incomplete: u64,
    trials: u64,
    seed: u64,
    elapsed_wall_s: Option<f64>,
}

fn execute(request: &RunRequest) -> Result<Outcome> {
    match request.command {
        Command::Simulate | Command::Compare | Command::Mfpt => ensemble_command(request),
        Command::Density => density_command(request),
        Command::Analytic(q) => analytic_command(request, q),
    }
}

fn trace_path(out: Option<&Path>) -> PathBuf {
    match out {
        Some(path) => {
            let mut name = path.as_os_str().to_owned();
            name.push(".trace.csv");
            PathBuf::from(name)
        }
        None => PathBuf::from("trace.csv"),
    }
}

fn simulate(request: &RunRequest) -> Result<EnsembleStats> {
    let (start, config, mode) = (&request.start, &request.config, request.mode);
    let histogram = sim::default_histogram(start, config, mode)?;
    if request.trace {
        return traced(request, histogram);
    }
    match request.threads {
        Some(threads) => sim::run_ensemble_on(threads, start, config, mode, request.trials, histogram),
        None => sim::run_ensemble_with(start, config, mode, request.trials, histogram),
    }
}

fn traced(request: &RunRequest, histogram: crate::stats::TimeHistogram) -> Result<EnsembleStats> {
    let mut file = AtomicFile::create(&trace_path(request.output.as_deref()))?;
    let path = file.path().to_path_buf();
    let mut header = String::from("trial,step");
    for i in 0..request.start.dimension() {
        let _ = write!(header, ",x_{i}");
    }
    let mut failure = writeln!(file.writer(), "{header}").err();
    let stats = {
        let writer = file.writer();
        sim::run_traced(
            &request.start,
            &request.config,
            request.mode,
            request.trials,
            histogram,
            |trial, step, coords| {
                if failure.is_some() {
                    return;
                }
                let mut row = format!("{trial},{step}");
                for x in coords {
                    let _ = write!(row, ",{x}");
                }
                failure = writeln!(writer, "{row}").err();
            },
        )?
    };
    if let Some(source) = failure {
        return Err(Error::Io { path, source });
    }
    file.commit()?;
    Ok(stats)
}

/// Closed-form mean passage time of a two-state start in the walk's time units.
fn analytic_mfpt(request: &RunRequest) -> Result<Option<f64>> {
    if request.start.dimension() != 2 {
        return Ok(None);
    }
    let x0 = request.start.coords()[0];
    Ok(Some(match request.mode {
        Mode::Continuum => mfpt_2state(x0, request.config.diffusion)?,
        Mode::Discrete => {
            let k = request.config.chips as f64;
            k * k * x0 * (1.0 - x0)
        }
    }))
}

fn elapsed(request: &RunRequest, started: Instant) -> Option<f64> {
    request.wall_clock.then(|| started.elapsed().as_secs_f64())
}

fn ensemble_command(request: &RunRequest) -> Result<Outcome> {
    let started = Instant::now();
    let stats = simulate(request)?;
    let wall = elapsed(request, started);
    let expected = request.start.coords();
    let born = match compare_born(&stats, expected) {
        Ok(born) => Some(born),
        Err(Error::NoCompletedTrials) => None,
        Err(e) => return Err(e),
    };
    let analytic = analytic_mfpt(request)?;
    let moments = stats.time_mean_and_stderr();
    let mfpt_check = match (analytic, moments) {
        (Some(a), Some(_)) => Some(compare_mfpt(&stats, a)?),
        _ => None,
    };

    let report = EnsembleReport {
        request: RequestRecord::new(request),
        expected,
        observed: born.as_ref().map(|b| b.observed.as_slice()),
        z_scores: born.as_ref().map(|b| b.z_scores.as_slice()),
        chi_square: born.as_ref().map(|b| b.chi_square),
        mfpt: MfptRecord {
            analytic,
            observed: moments.map(|m| m.0),
            stderr: moments.map(|m| m.1),
        },
        incomplete: stats.incomplete_count(),
        trials: stats.trials(),
        seed: request.config.seed,
        elapsed_wall_s: wall,
    };
    let bytes = match request.format {
        Format::Json => to_json(&report),
        Format::Csv => born_csv(expected, born.as_ref()),
    };
    emit(request.output.as_deref(), &bytes)?;

    let pass = match request.command {
        Command::Compare => born.as_ref().is_some_and(|b| b.pass),
        Command::Mfpt => mfpt_check.as_ref().is_some_and(|m| m.pass),
        _ => true,
    };
    let mut summary = String::new();
    born_table(&mut summary, expected, born.as_ref());
    if let Some((mean, stderr)) = moments {
        let _ = write!(summary, "mean passage time {mean:.6} ± {stderr:.6}");
        match &mfpt_check {
            Some(m) => {
                let _ = writeln!(
                    summary,
                    " (analytic {}, allowance {:.6})",
                    m.analytic, m.allowance
                );
            }
            None => summary.push('\n'),
        }
    }
    let _ = writeln!(
        summary,
        "incomplete {} of {} trials",
        stats.incomplete_count(),
        stats.trials()
    );
    if matches!(request.command, Command::Compare | Command::Mfpt) {
        let _ = writeln!(summary, "{}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(Outcome { pass, summary })
}

fn born_csv(expected: &[f64], born: Option<&BornComparison>) -> Vec<u8> {
    let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    csv(
        "vertex,expected,observed,z_score",
        expected.iter().enumerate().map(|(i, e)| {
            vec![
                i.to_string(),
                e.to_string(),
                cell(born.map(|b| b.observed[i])),
                cell(born.map(|b| b.z_scores[i])),
            ]
        }),
    )
}

fn born_table(out: &mut String, expected: &[f64], born: Option<&BornComparison>) {
    let _ = writeln!(out, "{:>6}  {:>10}  {:>10}  {:>8}", "vertex", "expected", "observed", "z");
    for (i, e) in expected.iter().enumerate() {
        match born {
            Some(b) => {
                let _ = writeln!(
                    out,
                    "{i:>6}  {e:>10.6}  {:>10.6}  {:>8.3}",
                    b.observed[i], b.z_scores[i]
                );
            }
            None => {
                let _ = writeln!(out, "{i:>6}  {e:>10.6}  {:>10}  {:>8}", "-", "-");
            }
        }
    }
    if let Some(b) = born {
        let _ = writeln!(
            out,
            "chi-square {:.4} ({} dof, threshold {:.4})",
            b.chi_square, b.degrees_of_freedom, b.chi_square_threshold
        );
    }
}

fn density_command(request: &RunRequest) -> Result<Outcome> {
    let started = Instant::now();
    let stats = simulate(request)?;
    let wall = elapsed(request, started);
    let x0 = request.start.coords()[0];
    let d = request.config.diffusion;
    let hist = stats.histogram();
    let centers = hist.centers();
    let edges = hist.edges();
    let analytic = fpt_density_2state(x0, d, &centers)?;
    let scale = 1.0 / (stats.trials() as f64 * hist.bin_width());
    let empirical: Vec<f64> = hist.counts().iter().map(|&c| c as f64 * scale).collect();
    let mut cdf = vec![0.0];
    cdf.extend(fpt_cdf_2state(x0, d, &edges[1..])?);
    let ks = ks_statistic(&stats, &cdf)?;
    let pass = ks < DENSITY_KS_LIMIT;

    let bytes = match request.format {
        Format::Csv => csv(
            "t,analytic_density,empirical_density",
            centers
                .iter()
                .zip(&analytic)
                .zip(&empirical)
                .map(|((t, a), e)| vec![t.to_string(), a.to_string(), e.to_string()]),
        ),
        Format::Json => to_json(&DensityReport {
            request: RequestRecord::new(request),
            t: &centers,
            analytic_density: &analytic,
            empirical_density: &empirical,
            ks,
            incomplete: stats.incomplete_count(),
            trials: stats.trials(),
            seed: request.config.seed,
            elapsed_wall_s: wall,
        }),
    };
    emit(request.output.as_deref(), &bytes)?;
    let summary = format!(
        "{} bins up to t = {}\nKS distance {ks:.5} (limit {DENSITY_KS_LIMIT})\nincomplete {} of {} trials\n{}\n",
        hist.bins(),
        hist.upper(),
        stats.incomplete_count(),
        stats.trials(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome { pass, summary })
}

fn analytic_command(request: &RunRequest, quantity: Quantity) -> Result<Outcome> {
    let coords = request.start.coords();
    let d = request.config.diffusion;
    let record = RequestRecord::new(request);
    let mut summary = String::new();
    let bytes = match quantity {
        Quantity::Fpp => {
            let probabilities = if coords.len() == 2 {
                // the walk coordinate is x_0; vertex 0 sits at x = 1
                let (at_zero, at_one) = fpp_2state(coords[0], d)?;
                vec![at_one, at_zero]
            } else {
                fpp_nstate(coords)?
            };
            for (i, p) in probabilities.iter().enumerate() {
                let _ = writeln!(summary, "vertex {i}  probability {p}");
            }
            #[derive(Serialize)]
            struct Report<'a> {
                request: RequestRecord<'a>,
                probabilities: &'a [f64],
            }
            match request.format {
                Format::Json => to_json(&Report {
                    request: record,
                    probabilities: &probabilities,
                }),
                Format::Csv => csv(
                    "vertex,probability",
                    probabilities
                        .iter()
                        .enumerate()
                        .map(|(i, p)| vec![i.to_string(), p.to_string()]),
                ),
            }
        }
        Quantity::Mfpt => {
            let mfpt = mfpt_2state(coords[0], d)?;
            let _ = writeln!(summary, "mean passage time {mfpt}");
            #[derive(Serialize)]
            struct Report<'a> {
                request: RequestRecord<'a>,
                mfpt: f64,
            }
            match request.format {
                Format::Json => to_json(&Report {
                    request: record,
                    mfpt,
                }),
                Format::Csv => csv("mfpt", [vec![mfpt.to_string()]]),
            }
        }
        Quantity::Green => {
            let s = request.s.expect("validated by the parser");
            let x = request.x.as_deref().expect("validated by the parser");
            let (green, fluxes) = if coords.len() == 2 {
                let params = DiffusionParams::new(d, coords[0], s)?;
                let (at_zero, at_one) = wall_flux_2state(&params)?;
                (green_2state(x[0], &params)?, vec![at_one, at_zero])
            } else {
                if coords.len() != VALIDATED_DIMENSION {
                    let _ = writeln!(
                        summary,
                        "note: only the {VALIDATED_DIMENSION}-state function has been validated"
                    );
                }
                let params = NGreenParams::new(coords, s, d)?;
                (green_nstate(x, &params)?, params.vertex_fluxes())
            };
            let _ = writeln!(summary, "green {green}");
            for (i, f) in fluxes.iter().enumerate() {
                let _ = writeln!(summary, "vertex {i}  flux {f}");
            }
            #[derive(Serialize)]
            struct Report<'a> {
                request: RequestRecord<'a>,
                green: f64,
                vertex_fluxes: &'a [f64],
            }
            match request.format {
                Format::Json => to_json(&Report {
                    request: record,
                    green,
                    vertex_fluxes: &fluxes,
                }),
                Format::Csv => {
                    let mut header = String::from("green");
                    let mut row = vec![green.to_string()];
                    for (i, f) in fluxes.iter().enumerate() {
                        let _ = write!(header, ",flux_{i}");
                        row.push(f.to_string());
                    }
                    csv(&header, [row])
                }
            }
        }
        Quantity::Density => {
            let x0 = coords[0];
            let grid = match &request.t {
                Some(t) => t.clone(),
                None => {
                    let mfpt = mfpt_2state(x0, d)?;
                    if mfpt == 0.0 {
                        return Err(Error::domain("the start is a vertex; passage is immediate"));
                    }
                    let step = 10.0 * mfpt / DENSITY_GRID_POINTS as f64;
                    (1..=DENSITY_GRID_POINTS).map(|i| i as f64 * step).collect()
                }
            };
            let inversion = fpt_density_inversion(x0, d, &grid)?;
            let _ = writeln!(
                summary,
                "{} times, Stehfest order {} (order gap {:.2e})",
                grid.len(),
                inversion.order,
                inversion.gap
            );
            #[derive(Serialize)]
            struct Report<'a> {
                request: RequestRecord<'a>,
                t: &'a [f64],
                analytic_density: &'a [f64],
                stehfest_order: usize,
            }
            match request.format {
                Format::Json => to_json(&Report {
                    request: record,
                    t: &grid,
                    analytic_density: &inversion.values,
                    stehfest_order: inversion.order,
                }),
                Format::Csv => csv(
                    "t,analytic_density",
                    grid.iter()
                        .zip(&inversion.values)
                        .map(|(t, f)| vec![t.to_string(), f.to_string()]),
                ),
            }
        }
    };
    emit(request.output.as_deref(), &bytes)?;
    Ok(Outcome {
        pass: true,
        summary,
    })
}
