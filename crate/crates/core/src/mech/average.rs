use std::sync::Arc;

use crate::error::Result;
use crate::factor::{averaging_factor, averaging_norm_bound, FactorNorms, LowerTriFactor};
use crate::privacy::{ErrorBound, NoiseMode, NoisePlan, NoiseSource, Sensitivity};

use super::{check_horizon, dot, InputDomain};

/// Streaming state of the factorization running average.
///
/// In per-step mode the factor is grown by one row per step; in
/// fixed-horizon mode the full factor is needed up front for `‖R_T‖`.
/// Factors are shared copy-on-write, so states built from one
/// [`LowerTriFactor`] of sufficient dimension never re-solve it.
#[derive(Debug, Clone)]
pub struct AverageState {
    factor: Arc<LowerTriFactor>,
    plan: NoisePlan,
    noise: NoiseSource,
    domain: InputDomain,
    x: Vec<f64>,
    y: Vec<f64>,
    true_sum: f64,
}

impl AverageState {
    /// Running average with sensitivity `1/t`.
    pub fn new(plan: NoisePlan) -> Result<Self> {
        let factor = match plan.mode {
            NoiseMode::FixedHorizon => averaging_factor(plan.horizon)?,
            NoiseMode::PerStepPaper => LowerTriFactor::default(),
        };
        Self::with_factor(
            plan.with_sensitivity(Sensitivity::Average),
            Arc::new(factor),
            0,
        )
    }

    /// Uses `factor` (extended if needed) and noise `stream`; the plan's
    /// sensitivity is used as given.
    pub fn with_factor(plan: NoisePlan, factor: Arc<LowerTriFactor>, stream: u64) -> Result<Self> {
        let mut state = AverageState {
            factor,
            noise: NoiseSource::new(plan.seed, stream),
            plan,
            domain: InputDomain::default(),
            x: Vec::with_capacity(plan.horizon),
            y: Vec::with_capacity(plan.horizon),
            true_sum: 0.0,
        };
        if plan.mode == NoiseMode::FixedHorizon {
            state.grow_to(plan.horizon)?;
        }
        Ok(state)
    }

    pub fn with_domain(mut self, domain: InputDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn plan(&self) -> &NoisePlan {
        &self.plan
    }

    pub fn factor(&self) -> &Arc<LowerTriFactor> {
        &self.factor
    }

    pub fn t(&self) -> usize {
        self.x.len()
    }

    pub fn horizon(&self) -> usize {
        self.plan.horizon
    }

    /// Exact running mean of the consumed inputs.
    pub fn true_mean(&self) -> f64 {
        if self.x.is_empty() {
            0.0
        } else {
            self.true_sum / self.x.len() as f64
        }
    }

    fn grow_to(&mut self, dim: usize) -> Result<()> {
        if self.factor.dim() < dim {
            let f = Arc::make_mut(&mut self.factor);
            while f.dim() < dim {
                f.push_row()?;
            }
        }
        Ok(())
    }

    /// Noise scale at step `t`; the factor must already cover `t` rows.
    pub fn sigma(&self, t: usize) -> f64 {
        let r_t = self.factor.row_col_norms(t).1;
        let r_horizon = match self.plan.mode {
            NoiseMode::FixedHorizon => self.factor.row_col_norms(self.plan.horizon).1,
            NoiseMode::PerStepPaper => r_t,
        };
        self.plan.sigma(t, r_t, r_horizon)
    }

    /// Consumes `x_t` and returns the private running mean at `t`.
    pub fn step(&mut self, x: f64) -> Result<f64> {
        check_horizon(self.t(), self.plan.horizon)?;
        self.domain.check(x)?;
        self.grow_to(self.t() + 1)?;
        self.x.push(x);
        self.true_sum += x;
        let t = self.x.len();
        let row = self.factor.row(t - 1);
        let rx = dot(row, &self.x);
        let draw = (t - 1) as u64;
        match self.plan.mode {
            NoiseMode::FixedHorizon => {
                let sigma = self.sigma(t);
                let z = if sigma == 0.0 {
                    0.0
                } else {
                    sigma * self.noise.gaussian(draw)
                };
                self.y.push(rx + z);
                Ok(dot(self.factor.row(t - 1), &self.y))
            }
            NoiseMode::PerStepPaper => {
                self.y.push(rx);
                let exact = dot(self.factor.row(t - 1), &self.y);
                let scale = self.sigma(t) * self.factor.row_norm(t - 1);
                if scale == 0.0 {
                    Ok(exact)
                } else {
                    Ok(exact + scale * self.noise.gaussian(draw))
                }
            }
        }
    }

    /// Error radius at step `t`; the factor must already cover `t` rows.
    ///
    /// `analytic` replaces each squared norm by [`averaging_norm_bound`].
    pub fn error_bound(&self, t: usize) -> ErrorBound {
        let m = self.plan.radius_multiplier() * self.plan.calibrated_sensitivity(t);
        let row = self.factor.row_norm(t - 1);
        let col_t = self.factor.row_col_norms(t).1;
        let (r_exact, r_closed) = match self.plan.mode {
            NoiseMode::PerStepPaper => (col_t * row, averaging_norm_bound(t)),
            NoiseMode::FixedHorizon => {
                let horizon = self.plan.horizon;
                (
                    self.factor.row_col_norms(horizon).1 * row,
                    (averaging_norm_bound(t) * averaging_norm_bound(horizon)).sqrt(),
                )
            }
        };
        ErrorBound {
            exact: m * r_exact,
            analytic: m * r_closed,
        }
    }
}
