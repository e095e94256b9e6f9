//! Stream inputs: parsed from files or generated from the config seed.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use contrel_core::apps::{edge_pair, pair_count, EdgeEvent, EdgeUpdate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, StreamKind, Task};

/// The data of one experiment, shared by all trials.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskData {
    Scalars(Vec<f64>),
    /// `(coordinate, ±1)` per step.
    Items(Vec<(usize, i8)>),
    Edges(Vec<Vec<EdgeUpdate>>),
    Events(Vec<EdgeEvent>),
    Letters(Vec<char>),
    /// Client data; `None` draws Uniform[0, 1] afresh in every trial.
    Clients(Option<Vec<f64>>),
    Nothing,
}

impl TaskData {
    pub fn steps(&self) -> usize {
        match self {
            TaskData::Scalars(v) => v.len(),
            TaskData::Items(v) => v.len(),
            TaskData::Edges(v) => v.len(),
            TaskData::Events(v) => v.len(),
            TaskData::Letters(v) => v.len(),
            TaskData::Clients(_) | TaskData::Nothing => 0,
        }
    }
}

/// Deterministic data generator; noise streams never use stream `u64::MAX`.
pub fn data_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng
}

pub fn load(config: &ExperimentConfig) -> Result<TaskData> {
    let data = match &config.input {
        Some(path) => parse_file(config, path)?,
        None => generate(config),
    };
    if data.steps() > config.horizon {
        bail!(
            "input has {} steps but --T is {}",
            data.steps(),
            config.horizon
        );
    }
    Ok(data)
}

fn generate(config: &ExperimentConfig) -> TaskData {
    let mut rng = data_rng(config.seed);
    let steps = config.horizon;
    let random = config.stream == StreamKind::Random;
    match config.task {
        Task::Count | Task::Average => TaskData::Scalars(
            (0..steps)
                .map(|_| {
                    if random {
                        rng.random_range(0..2) as f64
                    } else {
                        1.0
                    }
                })
                .collect(),
        ),
        Task::Histogram => TaskData::Items(
            (0..steps)
                .map(|_| {
                    (
                        if random {
                            rng.random_range(0..config.u)
                        } else {
                            0
                        },
                        1,
                    )
                })
                .collect(),
        ),
        Task::GraphCut => {
            let n = config.vertices();
            TaskData::Edges(
                (0..steps)
                    .map(|t| {
                        let (e, w) = if random {
                            (rng.random_range(0..pair_count(n)), rng.random::<f64>())
                        } else {
                            (t % pair_count(n), 1.0)
                        };
                        let (u, v) = edge_pair(n, e);
                        vec![EdgeUpdate::new(u, v, w)]
                    })
                    .collect(),
            )
        }
        Task::GraphFn => {
            let n = config.vertices();
            TaskData::Events(
                (0..steps)
                    .map(|t| {
                        if random {
                            let (u, v) = edge_pair(n, rng.random_range(0..pair_count(n)));
                            if rng.random_bool(0.5) {
                                EdgeEvent::Insert(u, v)
                            } else {
                                EdgeEvent::Delete(u, v)
                            }
                        } else {
                            let (u, v) = edge_pair(n, t % pair_count(n));
                            EdgeEvent::Insert(u, v)
                        }
                    })
                    .collect(),
            )
        }
        Task::Substring | Task::Episode => {
            let letters: Vec<char> = config.alphabet.chars().collect();
            TaskData::Letters(
                (0..steps)
                    .map(|_| {
                        if random {
                            letters[rng.random_range(0..letters.len())]
                        } else {
                            letters[0]
                        }
                    })
                    .collect(),
            )
        }
        Task::LdpMedian => TaskData::Clients(None),
        Task::Bounds => TaskData::Nothing,
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(no: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .with_context(|| format!("line {no}: bad number {s:?}"))
}

fn parse_usize(no: usize, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .with_context(|| format!("line {no}: bad index {s:?}"))
}

/// `t,u,v,weight` lines with 1-based steps.
fn parse_edge_lines(text: &str) -> Result<Vec<(usize, usize, usize, f64)>> {
    data_lines(text)
        .map(|(no, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 4 {
                bail!("line {no}: expected t,u,v,weight");
            }
            let t = parse_usize(no, f[0])?;
            if t == 0 {
                bail!("line {no}: steps are 1-based");
            }
            Ok((
                t,
                parse_usize(no, f[1])?,
                parse_usize(no, f[2])?,
                parse_f64(no, f[3])?,
            ))
        })
        .collect()
}

fn parse_file(config: &ExperimentConfig, path: &Path) -> Result<TaskData> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(match config.task {
        Task::Count | Task::Average => TaskData::Scalars(
            data_lines(&text)
                .map(|(no, l)| parse_f64(no, l))
                .collect::<Result<_>>()?,
        ),
        Task::LdpMedian => TaskData::Clients(Some(
            data_lines(&text)
                .map(|(no, l)| parse_f64(no, l))
                .collect::<Result<_>>()?,
        )),
        Task::Histogram => TaskData::Items(
            data_lines(&text)
                .map(|(no, l)| {
                    let mut f = l.split(',');
                    let j = parse_usize(no, f.next().unwrap_or(""))?;
                    let sign = match f.next().map(str::trim) {
                        None | Some("1") | Some("+1") => 1,
                        Some("-1") => -1,
                        Some(s) => bail!("line {no}: sign must be 1 or -1, got {s:?}"),
                    };
                    Ok((j, sign))
                })
                .collect::<Result<_>>()?,
        ),
        Task::GraphCut => {
            let lines = parse_edge_lines(&text)?;
            let steps = lines.iter().map(|l| l.0).max().unwrap_or(0);
            let mut out = vec![Vec::new(); steps];
            for (t, u, v, w) in lines {
                out[t - 1].push(EdgeUpdate::new(u, v, w));
            }
            TaskData::Edges(out)
        }
        Task::GraphFn => {
            let lines = parse_edge_lines(&text)?;
            let mut out = Vec::with_capacity(lines.len());
            for (k, (t, u, v, w)) in lines.into_iter().enumerate() {
                if t != k + 1 {
                    bail!("graph-fn input needs exactly one event per step, in order");
                }
                out.push(if w >= 0.0 {
                    EdgeEvent::Insert(u, v)
                } else {
                    EdgeEvent::Delete(u, v)
                });
            }
            TaskData::Events(out)
        }
        Task::Substring | Task::Episode => {
            TaskData::Letters(text.chars().filter(|c| !c.is_whitespace()).collect())
        }
        Task::Bounds => TaskData::Nothing,
    })
}
