use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Result;
use crate::factor::{counting_factor, FactorCoeffs};
use crate::privacy::{ErrorBound, NoiseMode, NoisePlan, NoiseSource};

use super::{check_horizon, InputDomain};

/// Streaming state of the factorization counter.
///
/// Keeps the released prefix `y` of `R x + z`; step `t` appends one entry and
/// returns row `t` of `L y`, so each step costs `O(t)`.
#[derive(Debug, Clone)]
pub struct CounterState {
    coeffs: Arc<FactorCoeffs>,
    plan: NoisePlan,
    noise: NoiseSource,
    domain: InputDomain,
    x: Vec<f64>,
    y: Vec<f64>,
    true_sum: f64,
}

impl CounterState {
    pub fn new(plan: NoisePlan) -> Result<Self> {
        let coeffs = Arc::new(counting_factor(plan.horizon)?);
        Ok(Self::with_coeffs(plan, coeffs, 0))
    }

    /// A counter that shares `coeffs` and draws its noise from `stream`.
    ///
    /// Lifted mechanisms run one of these per channel; `coeffs` must cover the
    /// plan's horizon.
    pub fn with_coeffs(plan: NoisePlan, coeffs: Arc<FactorCoeffs>, stream: u64) -> Self {
        assert!(
            coeffs.horizon() >= plan.horizon,
            "factor shorter than horizon"
        );
        CounterState {
            coeffs,
            noise: NoiseSource::new(plan.seed, stream),
            plan,
            domain: InputDomain::default(),
            x: Vec::with_capacity(plan.horizon),
            y: Vec::with_capacity(plan.horizon),
            true_sum: 0.0,
        }
    }

    pub fn with_domain(mut self, domain: InputDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn plan(&self) -> &NoisePlan {
        &self.plan
    }

    /// Number of elapsed steps.
    pub fn t(&self) -> usize {
        self.x.len()
    }

    pub fn horizon(&self) -> usize {
        self.plan.horizon
    }

    pub fn true_sum(&self) -> f64 {
        self.true_sum
    }

    /// Stored entries of `R x` (plus noise in fixed-horizon mode).
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Noise standard deviation of `y` entries, or of the per-step vector in
    /// per-step mode, at step `t`.
    pub fn sigma(&self, t: usize) -> f64 {
        let r_t = self.coeffs.norm_sq(t).sqrt();
        let r_horizon = self.coeffs.norm_sq(self.plan.horizon).sqrt();
        self.plan.sigma(t, r_t, r_horizon)
    }

    /// Consumes `x_t` and returns the private prefix sum at `t`.
    pub fn step(&mut self, x: f64) -> Result<f64> {
        check_horizon(self.t(), self.plan.horizon)?;
        self.domain.check(x)?;
        self.x.push(x);
        self.true_sum += x;
        let t = self.x.len();
        let rx = self.coeffs.toeplitz_row_dot(t, &self.x);
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
                Ok(self.coeffs.toeplitz_row_dot(t, &self.y))
            }
            NoiseMode::PerStepPaper => {
                // Row t of L_t z_t for a fresh z_t ~ N(0, σ_t² I) is a single
                // normal with standard deviation σ_t ‖row t of L_t‖.
                self.y.push(rx);
                let exact = self.coeffs.toeplitz_row_dot(t, &self.y);
                let scale = self.sigma(t) * self.coeffs.norm_sq(t).sqrt();
                if scale == 0.0 {
                    Ok(exact)
                } else {
                    Ok(exact + scale * self.noise.gaussian(draw))
                }
            }
        }
    }

    /// Error radius at step `t` for this counter's noise schedule.
    ///
    /// `exact` uses the computed norms, `analytic` replaces each squared norm
    /// by `1 + ln(t)/π`.
    pub fn error_bound(&self, t: usize) -> ErrorBound {
        let m = self.plan.radius_multiplier() * self.plan.calibrated_sensitivity(t);
        let horizon = self.plan.horizon;
        let closed = |s: usize| 1.0 + (s as f64).ln() / PI;
        let (r_exact, r_closed) = match self.plan.mode {
            NoiseMode::PerStepPaper => (self.coeffs.norm_sq(t), closed(t)),
            NoiseMode::FixedHorizon => (
                (self.coeffs.norm_sq(t) * self.coeffs.norm_sq(horizon)).sqrt(),
                (closed(t) * closed(horizon)).sqrt(),
            ),
        };
        ErrorBound {
            exact: m * r_exact,
            analytic: m * r_closed,
        }
    }
}
