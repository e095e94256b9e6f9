use std::sync::Arc;

use crate::error::{Error, Result};
use crate::factor::counting_factor;
use crate::privacy::{ErrorBound, NoisePlan};

use super::{check_horizon, CounterState, InputDomain};

/// Continual histogram over a universe of `u` items.
///
/// Each step inserts or deletes one item. The lifted factor `R ⊗ I_u` has the
/// same column norms as `R`, so every coordinate is an independent scalar
/// counter with the scalar plan; coordinate `j` draws from noise stream `j`.
#[derive(Debug, Clone)]
pub struct HistogramState {
    channels: Vec<CounterState>,
    counts: Vec<f64>,
    deletions: bool,
}

impl HistogramState {
    pub fn new(plan: NoisePlan, u: usize) -> Result<Self> {
        if u == 0 {
            return Err(Error::InvalidInput("universe must be nonempty".into()));
        }
        let coeffs = Arc::new(counting_factor(plan.horizon)?);
        let channels = (0..u)
            .map(|j| {
                CounterState::with_coeffs(plan, coeffs.clone(), j as u64)
                    .with_domain(InputDomain::SignedUnit)
            })
            .collect();
        Ok(HistogramState {
            channels,
            counts: vec![0.0; u],
            deletions: false,
        })
    }

    /// Accept `-1` updates as long as no true count becomes negative.
    pub fn with_deletions(mut self, deletions: bool) -> Self {
        self.deletions = deletions;
        self
    }

    pub fn universe(&self) -> usize {
        self.channels.len()
    }

    pub fn t(&self) -> usize {
        self.channels[0].t()
    }

    pub fn true_counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn channel(&self, j: usize) -> &CounterState {
        &self.channels[j]
    }

    /// Applies `sign ∈ {+1, -1}` to `coord` and returns all `u` released counts.
    pub fn step(&mut self, coord: usize, sign: i8) -> Result<Vec<f64>> {
        let u = self.universe();
        if coord >= u {
            return Err(Error::InvalidInput(format!(
                "coordinate {coord} outside universe of size {u}"
            )));
        }
        match sign {
            1 => {}
            -1 if self.deletions => {
                let value = self.counts[coord] - 1.0;
                if value < 0.0 {
                    return Err(Error::NegativeCount { coord, value });
                }
            }
            -1 => return Err(Error::InvalidInput("deletions are not enabled".into())),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "update sign must be +1 or -1, got {sign}"
                )))
            }
        }
        check_horizon(self.t(), self.channels[0].horizon())?;
        self.counts[coord] += sign as f64;
        self.channels
            .iter_mut()
            .enumerate()
            .map(|(j, c)| c.step(if j == coord { sign as f64 } else { 0.0 }))
            .collect()
    }

    /// Per-coordinate error radius at step `t`.
    pub fn error_bound(&self, t: usize) -> ErrorBound {
        self.channels[0].error_bound(t)
    }
}
