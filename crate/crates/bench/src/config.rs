use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, ValueEnum};
use contrel_core::privacy::{NoiseMode, NoisePlan, PrivacyBudget};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Count,
    Average,
    Histogram,
    GraphCut,
    GraphFn,
    Substring,
    Episode,
    LdpMedian,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    Factorization,
    BinaryTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Horizon,
    PerStep,
}

impl From<Mode> for NoiseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Horizon => NoiseMode::FixedHorizon,
            Mode::PerStep => NoiseMode::PerStepPaper,
        }
    }
}

/// Synthetic input used when no `--input` file is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamKind {
    /// Worst case for counting: every item is a one (or item 0, or a new edge).
    Ones,
    /// Items drawn uniformly at random from a stream fixed by `--seed`.
    Random,
}

/// Everything that determines an experiment's output files.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(
    name = "contrel",
    version,
    about = "Continual-release factorization mechanisms: experiments and figure data"
)]
pub struct ExperimentConfig {
    #[arg(long, value_enum)]
    pub task: Task,

    #[arg(long, value_enum, default_value = "factorization")]
    pub mechanism: Mechanism,

    /// Stream horizon.
    #[arg(long = "T", default_value_t = 1 << 14)]
    #[serde(rename = "T")]
    pub horizon: usize,

    #[arg(long, default_value_t = 0.8)]
    pub epsilon: f64,

    #[arg(long, default_value_t = 1e-10)]
    pub delta: f64,

    #[arg(long, env = "CONTREL_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub trials: usize,

    #[arg(long, value_enum, default_value = "horizon")]
    pub mode: Mode,

    /// Run without noise.
    #[arg(long)]
    pub sigma_zero: bool,

    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value = "ones")]
    pub stream: StreamKind,

    /// Input file replacing the synthetic stream.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Histogram universe size.
    #[arg(long, default_value_t = 8)]
    pub u: usize,

    /// Vertices for graph tasks, clients for ldp-median.
    #[arg(long)]
    pub n: Option<usize>,

    /// Maximum substring or episode length.
    #[arg(long, default_value_t = 2)]
    pub ell: usize,

    #[arg(long, default_value = "ab")]
    pub alphabet: String,

    /// Number of evenly spaced θ values for ldp-median.
    #[arg(long, default_value_t = 101)]
    pub thetas: usize,

    /// Horizons for the bounds table; defaults to 2^8, 2^10, ..., 2^24.
    #[arg(long, value_delimiter = ',')]
    pub t_list: Option<Vec<usize>>,
}

impl ExperimentConfig {
    /// A config with the CLI defaults for `task`.
    pub fn new(task: Task) -> Self {
        ExperimentConfig::parse_from(["contrel", "--task", task_name(task)])
    }

    pub fn validate(&self) -> Result<()> {
        PrivacyBudget::new(self.epsilon, self.delta)?;
        if self.horizon == 0 {
            bail!("--T must be positive");
        }
        if self.trials == 0 && self.task != Task::Bounds {
            bail!("--trials must be positive");
        }
        if self.mechanism == Mechanism::BinaryTree && self.task != Task::Count {
            bail!("the binary-tree baseline only supports --task count");
        }
        match self.task {
            Task::Histogram if self.u == 0 => bail!("--u must be positive"),
            Task::GraphCut | Task::GraphFn if self.vertices() < 2 => bail!("graphs need --n >= 2"),
            Task::Substring | Task::Episode => {
                if self.ell == 0 {
                    bail!("--ell must be positive");
                }
                if self.alphabet.is_empty() {
                    bail!("--alphabet must be nonempty");
                }
            }
            Task::LdpMedian => {
                if self.clients() == 0 {
                    bail!("--n must be positive");
                }
                if self.thetas < 2 {
                    bail!("--thetas must be at least 2");
                }
            }
            Task::Bounds if self.bound_horizons().iter().any(|&t| t < 2) => {
                bail!("every bounds horizon must be at least 2")
            }
            _ => {}
        }
        Ok(())
    }

    pub fn budget(&self) -> Result<PrivacyBudget> {
        Ok(PrivacyBudget::new(self.epsilon, self.delta)?)
    }

    /// The noise plan of one trial.
    pub fn plan(&self, seed: u64) -> Result<NoisePlan> {
        Ok(NoisePlan::new(self.budget()?, self.horizon, seed)?
            .with_mode(self.mode.into())
            .with_sigma_zero(self.sigma_zero))
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    pub fn vertices(&self) -> usize {
        self.n.unwrap_or(8)
    }

    pub fn clients(&self) -> usize {
        self.n.unwrap_or(10_000)
    }

    pub fn bound_horizons(&self) -> Vec<usize> {
        self.t_list
            .clone()
            .unwrap_or_else(|| (4..=12).map(|k| 1usize << (2 * k)).collect())
    }

    /// `key = value` lines describing the config, sorted by key.
    pub fn comment_lines(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("config serializes");
        let map = value.as_object().expect("config is an object");
        map.iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }
}

fn task_name(task: Task) -> &'static str {
    match task {
        Task::Count => "count",
        Task::Average => "average",
        Task::Histogram => "histogram",
        Task::GraphCut => "graph-cut",
        Task::GraphFn => "graph-fn",
        Task::Substring => "substring",
        Task::Episode => "episode",
        Task::LdpMedian => "ldp-median",
        Task::Bounds => "bounds",
    }
}
