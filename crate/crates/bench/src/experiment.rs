//! Runs trials of a configured task and writes their CSV traces and summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use contrel_core::apps::{
    st_cut_bound, Alphabet, EdgeCount, EpisodeCounterState, GraphFnEstimator, GraphStream,
    SubstringCounterState,
};
use contrel_core::factor::{averaging_factor, LowerTriFactor};
use contrel_core::ldp::{
    client_encode_with, risk_bound, server_aggregate, uniform_median_risk, AggregateEstimate, Grid,
};
use contrel_core::mech::{AverageState, BinaryTreeState, CounterState, HistogramState};
use contrel_core::privacy::Sensitivity;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mechanism, Task};
use crate::input::{data_rng, load, TaskData};
use crate::tables::write_bounds;
use crate::trace::{emit_csv, fmt_f64, write_table, ErrorTrace, TraceRow};

pub const LDP_HEADER: &str = "theta,g,f,bound";
pub const SUMMARY_HEADER: &str = "t,mean_abs_error,max_abs_error,bound_exact,bound_analytic";
pub const LDP_SUMMARY_HEADER: &str = "theta,mean_abs_error,max_abs_error,bound";

/// One row of an LDP trial: the estimated curves at `theta` and the target risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdpRow {
    pub theta: f64,
    pub g: f64,
    pub f: f64,
    pub target: f64,
    pub bound: f64,
}

impl LdpRow {
    pub fn abs_error(&self) -> f64 {
        (self.f - self.target).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutput {
    Trace(ErrorTrace),
    Ldp(Vec<LdpRow>),
}

impl TrialOutput {
    pub fn max_error(&self) -> f64 {
        match self {
            TrialOutput::Trace(t) => t.max_error(),
            TrialOutput::Ldp(rows) => rows.iter().map(LdpRow::abs_error).fold(0.0, f64::max),
        }
    }

    pub fn within_bound(&self) -> bool {
        match self {
            TrialOutput::Trace(t) => t.within_exact(),
            TrialOutput::Ldp(rows) => rows.iter().all(|r| r.abs_error() <= r.bound),
        }
    }
}

/// A validated config with its data and any factor shared by all trials.
pub struct Prepared {
    config: ExperimentConfig,
    data: TaskData,
    average_factor: Option<Arc<LowerTriFactor>>,
}

impl Prepared {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let data = load(&config)?;
        let average_factor = if config.task == Task::Average {
            Some(Arc::new(averaging_factor(config.horizon)?))
        } else {
            None
        };
        Ok(Prepared {
            config,
            data,
            average_factor,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn data(&self) -> &TaskData {
        &self.data
    }

    pub fn average_factor(&self) -> Option<&Arc<LowerTriFactor>> {
        self.average_factor.as_ref()
    }

    /// Trial `i`, with noise seed `seed + i`.
    pub fn run_trial(&self, trial: usize) -> Result<TrialOutput> {
        let c = &self.config;
        let seed = c.trial_seed(trial);
        let plan = c.plan(seed)?;
        let mut trace = ErrorTrace::default();
        match &self.data {
            TaskData::Scalars(xs) if c.task == Task::Count => match c.mechanism {
                Mechanism::Factorization => {
                    let mut s = CounterState::new(plan)?;
                    for (i, &x) in xs.iter().enumerate() {
                        let a = s.step(x)?;
                        let b = s.error_bound(i + 1);
                        trace.push(TraceRow::new(i + 1, s.true_sum(), a, b.exact, b.analytic));
                    }
                }
                Mechanism::BinaryTree => {
                    let mut s = BinaryTreeState::new(plan);
                    for (i, &x) in xs.iter().enumerate() {
                        let a = s.step(x)?;
                        let b = s.error_bound(i + 1);
                        trace.push(TraceRow::new(i + 1, s.true_sum(), a, b.exact, b.analytic));
                    }
                }
            },
            TaskData::Scalars(xs) => {
                let factor = self
                    .average_factor
                    .clone()
                    .expect("average tasks share a factor");
                let mut s = AverageState::with_factor(
                    plan.with_sensitivity(Sensitivity::Average),
                    factor,
                    0,
                )?;
                for (i, &x) in xs.iter().enumerate() {
                    let a = s.step(x)?;
                    let b = s.error_bound(i + 1);
                    trace.push(TraceRow::new(i + 1, s.true_mean(), a, b.exact, b.analytic));
                }
            }
            TaskData::Items(items) => {
                let mut s = HistogramState::new(plan, c.u)?.with_deletions(true);
                for (i, &(j, sign)) in items.iter().enumerate() {
                    let released = s.step(j, sign)?;
                    let b = s.error_bound(i + 1);
                    trace.push(worst_coordinate(
                        i + 1,
                        s.true_counts(),
                        &released,
                        b.exact,
                        b.analytic,
                    ));
                }
            }
            TaskData::Edges(steps) => {
                let n = c.vertices();
                let budget = c.budget()?;
                let mut s = GraphStream::new(plan, n)?.with_deletions(true);
                let k = n as f64;
                let spread = 3.0 * (k * k.ln()).sqrt();
                for (i, updates) in steps.iter().enumerate() {
                    let released = s.step(updates)?;
                    let truth = s.true_graph();
                    let mut row: Option<TraceRow> = None;
                    let channel = s.channel(0).error_bound(i + 1);
                    for v in 0..n {
                        let r = TraceRow::new(
                            i + 1,
                            truth.full_cut_value(&[v])?,
                            released.full_cut_value(&[v])?,
                            spread * channel.exact,
                            st_cut_bound(&budget, 1, n - 1, i + 1, c.horizon),
                        );
                        if row.is_none_or(|w| r.abs_error > w.abs_error) {
                            row = Some(r);
                        }
                    }
                    trace.push(row.expect("graphs have vertices"));
                }
            }
            TaskData::Events(events) => {
                let mut s = GraphFnEstimator::new(plan, EdgeCount::default())?;
                for (i, &e) in events.iter().enumerate() {
                    let a = s.step(e)?;
                    let b = s.counter().error_bound(i + 1);
                    trace.push(TraceRow::new(i + 1, s.true_value(), a, b.exact, b.analytic));
                }
            }
            TaskData::Letters(letters) => {
                let alphabet = Alphabet::from_letters(&c.alphabet)?;
                if c.task == Task::Substring {
                    let mut s = SubstringCounterState::new(plan, alphabet, c.ell)?;
                    for (i, &l) in letters.iter().enumerate() {
                        let released = s.step(l)?;
                        let truth: Vec<f64> = s.true_counts().iter().map(|&v| v as f64).collect();
                        let b = s.error_bound(i + 1);
                        trace.push(worst_coordinate(
                            i + 1,
                            &truth,
                            &released,
                            b.exact,
                            b.analytic,
                        ));
                    }
                } else {
                    let mut s = EpisodeCounterState::new(plan, alphabet, c.ell)?;
                    for (i, &l) in letters.iter().enumerate() {
                        let released = s.step(l)?;
                        let truth: Vec<f64> = s.true_counts().iter().map(|&v| v as f64).collect();
                        let b = s.error_bound(i + 1);
                        trace.push(worst_coordinate(
                            i + 1,
                            &truth,
                            &released,
                            b.exact,
                            b.analytic,
                        ));
                    }
                }
            }
            TaskData::Clients(fixed) => {
                return self.run_ldp(seed, fixed.as_deref()).map(TrialOutput::Ldp)
            }
            TaskData::Nothing => bail!("task {:?} has no trials", c.task),
        }
        Ok(TrialOutput::Trace(trace))
    }

    fn run_ldp(&self, seed: u64, fixed: Option<&[f64]>) -> Result<Vec<LdpRow>> {
        let c = &self.config;
        let drawn: Vec<f64>;
        let data = match fixed {
            Some(d) => d,
            None => {
                let mut rng = data_rng(seed);
                drawn = (0..c.clients()).map(|_| rng.random::<f64>()).collect();
                &drawn
            }
        };
        let budget = c.budget()?;
        let grid = Grid::new(data.len(), budget)?;
        let messages = data
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                Ok(client_encode_with(
                    d,
                    &grid,
                    grid.plan(seed).with_sigma_zero(c.sigma_zero),
                    i as u64,
                )?)
            })
            .collect::<Result<Vec<_>>>()?;
        let estimate = server_aggregate(&messages, &grid)?;
        let bound = risk_bound(data.len(), &budget);
        Ok(theta_grid(c.thetas)
            .map(|theta| ldp_row(&estimate, theta, median_risk(fixed, theta), bound))
            .collect())
    }
}

/// `E|θ - d|` under the data distribution: exact for Uniform[0, 1], empirical for a file.
fn median_risk(fixed: Option<&[f64]>, theta: f64) -> f64 {
    match fixed {
        None => uniform_median_risk(theta),
        Some(d) => d.iter().map(|x| (theta - x).abs()).sum::<f64>() / d.len() as f64,
    }
}

fn ldp_row(estimate: &AggregateEstimate, theta: f64, target: f64, bound: f64) -> LdpRow {
    LdpRow {
        theta,
        g: estimate.g(theta),
        f: estimate.f(theta),
        target,
        bound,
    }
}

/// `k` evenly spaced points of `[0, 1]`, endpoints included.
pub fn theta_grid(k: usize) -> impl Iterator<Item = f64> {
    (0..k).map(move |i| i as f64 / (k - 1) as f64)
}

fn worst_coordinate(
    t: usize,
    truth: &[f64],
    released: &[f64],
    exact: f64,
    analytic: f64,
) -> TraceRow {
    let (j, _) = truth
        .iter()
        .zip(released)
        .map(|(a, b)| (b - a).abs())
        .enumerate()
        .fold(
            (0, -1.0),
            |best, (j, e)| if e > best.1 { (j, e) } else { best },
        );
    TraceRow::new(t, truth[j], released[j], exact, analytic)
}

/// Per-step (or per-θ) aggregates across trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub header: &'static str,
    pub rows: Vec<Vec<f64>>,
    pub max_abs_error: f64,
    pub fraction_within_bound: f64,
}

pub fn summarize(outputs: &[TrialOutput]) -> Summary {
    let k = outputs.len() as f64;
    let within = outputs.iter().filter(|o| o.within_bound()).count() as f64 / k;
    let max_abs_error = outputs
        .iter()
        .map(TrialOutput::max_error)
        .fold(0.0, f64::max);
    let (header, rows) = match outputs.first() {
        Some(TrialOutput::Ldp(first)) => {
            let rows = (0..first.len())
                .map(|i| {
                    let errs: Vec<f64> = outputs
                        .iter()
                        .map(|o| match o {
                            TrialOutput::Ldp(r) => r[i].abs_error(),
                            TrialOutput::Trace(_) => unreachable!("mixed outputs"),
                        })
                        .collect();
                    vec![first[i].theta, mean(&errs), max(&errs), first[i].bound]
                })
                .collect();
            (LDP_SUMMARY_HEADER, rows)
        }
        Some(TrialOutput::Trace(first)) => {
            let traces: Vec<&ErrorTrace> = outputs
                .iter()
                .map(|o| match o {
                    TrialOutput::Trace(t) => t,
                    TrialOutput::Ldp(_) => unreachable!("mixed outputs"),
                })
                .collect();
            let rows = (0..first.rows.len())
                .map(|i| {
                    let errs: Vec<f64> = traces.iter().map(|t| t.rows[i].abs_error).collect();
                    let exact: Vec<f64> = traces.iter().map(|t| t.rows[i].bound_exact).collect();
                    let analytic: Vec<f64> =
                        traces.iter().map(|t| t.rows[i].bound_analytic).collect();
                    vec![
                        first.rows[i].t as f64,
                        mean(&errs),
                        max(&errs),
                        mean(&exact),
                        mean(&analytic),
                    ]
                })
                .collect();
            (SUMMARY_HEADER, rows)
        }
        None => (SUMMARY_HEADER, Vec::new()),
    };
    Summary {
        header,
        rows,
        max_abs_error,
        fraction_within_bound: within,
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Files written by [`run_experiment`] and the headline numbers.
#[derive(Debug, Clone)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: Option<Summary>,
}

/// Runs all trials in parallel and writes `trial_XXXX.csv` and `summary.csv`
/// (or `bounds.csv` for the bounds task) under `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let comments = config.comment_lines();
    if config.task == Task::Bounds {
        let path = config.out.join("bounds.csv");
        write_bounds(&config.bound_horizons(), &comments, &path)?;
        return Ok(Report {
            files: vec![path],
            summary: None,
        });
    }
    let prepared = Prepared::new(config.clone())?;
    let outputs = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let out = prepared
                .run_trial(i)
                .with_context(|| format!("trial {i}"))?;
            let path = config.out.join(format!("trial_{i:04}.csv"));
            let mut c = comments.clone();
            c.push(format!("trial_seed = {}", config.trial_seed(i)));
            write_output(&out, &c, &path)?;
            Ok((out, path))
        })
        .collect::<Result<Vec<_>>>()?;
    let (outputs, mut files): (Vec<_>, Vec<_>) = outputs.into_iter().unzip();
    let summary = summarize(&outputs);
    let path = config.out.join("summary.csv");
    write_summary(&summary, &comments, &path)?;
    files.push(path);
    Ok(Report {
        files,
        summary: Some(summary),
    })
}

fn write_output(out: &TrialOutput, comments: &[String], path: &Path) -> Result<()> {
    match out {
        TrialOutput::Trace(t) => emit_csv(t, comments, path),
        TrialOutput::Ldp(rows) => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| [r.theta, r.g, r.f, r.bound].map(fmt_f64).to_vec())
                .collect();
            write_file(path, comments, LDP_HEADER, &rows)
        }
    }
}

fn write_summary(summary: &Summary, comments: &[String], path: &Path) -> Result<()> {
    let mut c = comments.to_vec();
    c.push(format!(
        "fraction_within_bound = {}",
        fmt_f64(summary.fraction_within_bound)
    ));
    c.push(format!(
        "max_abs_error = {}",
        fmt_f64(summary.max_abs_error)
    ));
    let rows: Vec<Vec<String>> = summary
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i == 0 && summary.header == SUMMARY_HEADER {
                        (v as usize).to_string()
                    } else {
                        fmt_f64(v)
                    }
                })
                .collect()
        })
        .collect();
    write_file(path, &c, summary.header, &rows)
}

pub(crate) fn write_file(
    path: &Path,
    comments: &[String],
    header: &str,
    rows: &[Vec<String>],
) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_table(std::io::BufWriter::new(file), comments, header, rows)
}
