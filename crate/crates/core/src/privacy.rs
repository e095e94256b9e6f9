//! Privacy budgets, Gaussian calibration and seeded noise.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::factor::{counting_norm_product, FactorNorms, LowerTriFactor};

/// An `(ε, δ)` pair with both parameters strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidBudget(format!(
                "epsilon must be in (0, 1), got {epsilon}"
            )));
        }
        if epsilon >= 1.0 {
            return Err(Error::UnsupportedRegime { epsilon });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidBudget(format!(
                "delta must be in (0, 1), got {delta}"
            )));
        }
        Ok(PrivacyBudget { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `(ε/2, δ/2)`, the share of each of two composed releases.
    pub fn halved(&self) -> PrivacyBudget {
        PrivacyBudget {
            epsilon: self.epsilon / 2.0,
            delta: self.delta / 2.0,
        }
    }

    /// Basic composition of two budgets.
    pub fn compose(&self, other: &PrivacyBudget) -> (f64, f64) {
        (self.epsilon + other.epsilon, self.delta + other.delta)
    }
}

/// `C_{ε,δ} = (1/ε) · sqrt(8/9 + 2 ln((1/δ) · sqrt(2/π)))`.
pub fn gaussian_constant(budget: &PrivacyBudget) -> f64 {
    let log_term = ((2.0 / PI).sqrt() / budget.delta).ln();
    (8.0 / 9.0 + 2.0 * log_term).sqrt() / budget.epsilon
}

/// `sqrt(ln(6T))`, the union-bound factor shared by every error bound.
pub fn tail_factor(horizon: usize) -> f64 {
    (6.0 * horizon as f64).ln().sqrt()
}

/// How noise is calibrated across the steps of a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// One noise vector for the whole horizon, one coordinate drawn per step,
    /// scaled by the norm of the full-horizon factor.
    #[default]
    FixedHorizon,
    /// A fresh noise vector per step, scaled by the norm of the current
    /// principal submatrix.
    PerStepPaper,
}

/// `ℓ2`-sensitivity of the per-step input of a mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sensitivity {
    Count,
    /// Running mean: `1/t` at step `t`.
    Average,
    Histogram,
    Cut,
    /// All substrings of length at most `max_len`.
    Substring {
        max_len: usize,
    },
    /// Minimal occurrences of all episodes of length at most `max_len`.
    Episode {
        alphabet: usize,
        max_len: usize,
    },
    Custom(f64),
}

impl Sensitivity {
    /// Sensitivity at step `t` (1-based).
    pub fn at_step(&self, t: usize) -> f64 {
        match *self {
            Sensitivity::Count | Sensitivity::Histogram | Sensitivity::Cut => 1.0,
            Sensitivity::Average => 1.0 / t.max(1) as f64,
            // One substituted letter flips two indicators for each of the
            // l(l+1)/2 (offset, length) pairs it touches.
            Sensitivity::Substring { max_len } => ((max_len * (max_len + 1)) as f64).sqrt(),
            Sensitivity::Episode { alphabet, max_len } => {
                2.0 * ((alphabet as f64).powi(max_len as i32 - 1) * max_len as f64).sqrt()
            }
            Sensitivity::Custom(v) => v,
        }
    }

    /// Largest per-step sensitivity over any horizon.
    pub fn worst_case(&self) -> f64 {
        self.at_step(1)
    }
}

/// Everything needed to calibrate and draw the noise of one mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePlan {
    budget: PrivacyBudget,
    constant: f64,
    pub mode: NoiseMode,
    pub horizon: usize,
    pub seed: u64,
    pub sensitivity: Sensitivity,
    /// Dry run: every noise scale is zero.
    pub sigma_zero: bool,
}

impl NoisePlan {
    /// Plan for a counting-type mechanism in [`NoiseMode::FixedHorizon`].
    pub fn new(budget: PrivacyBudget, horizon: usize, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidHorizon { min: 1, got: 0 });
        }
        Ok(NoisePlan {
            budget,
            constant: gaussian_constant(&budget),
            mode: NoiseMode::default(),
            horizon,
            seed,
            sensitivity: Sensitivity::Count,
            sigma_zero: false,
        })
    }

    pub fn with_mode(mut self, mode: NoiseMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sensitivity(mut self, sensitivity: Sensitivity) -> Self {
        self.sensitivity = sensitivity;
        self
    }

    pub fn with_sigma_zero(mut self, sigma_zero: bool) -> Self {
        self.sigma_zero = sigma_zero;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn budget(&self) -> &PrivacyBudget {
        &self.budget
    }

    /// `C_{ε,δ}` for this plan's budget.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Sensitivity the plan calibrates to at step `t`.
    pub fn calibrated_sensitivity(&self, t: usize) -> f64 {
        match self.mode {
            NoiseMode::PerStepPaper => self.sensitivity.at_step(t),
            NoiseMode::FixedHorizon => self.sensitivity.worst_case(),
        }
    }

    /// `C · sqrt(ln 6T)` for this plan's horizon.
    pub fn radius_multiplier(&self) -> f64 {
        self.constant * tail_factor(self.horizon)
    }

    /// Shorthand for [`noise_scale`].
    pub fn sigma(&self, t: usize, r_norm_t: f64, r_norm_horizon: f64) -> f64 {
        noise_scale(self, t, r_norm_t, r_norm_horizon)
    }
}

/// Noise standard deviation for the coordinate released at step `t`.
///
/// `r_norm_t` and `r_norm_horizon` are the exact `‖R_t‖_{1→2}` and
/// `‖R_T‖_{1→2}`. In fixed-horizon mode the whole stream shares one noise
/// vector, so the sensitivity is the worst case over the horizon.
pub fn noise_scale(plan: &NoisePlan, t: usize, r_norm_t: f64, r_norm_horizon: f64) -> f64 {
    if plan.sigma_zero {
        return 0.0;
    }
    let r_norm = match plan.mode {
        NoiseMode::PerStepPaper => r_norm_t,
        NoiseMode::FixedHorizon => r_norm_horizon,
    };
    plan.constant * plan.calibrated_sensitivity(t) * r_norm
}

/// Counter-based standard normal source.
///
/// Draw `i` of stream `s` under seed `k` is a fixed function of `(k, s, i)`:
/// it consumes ChaCha8 words `4i .. 4i + 4` of stream `s`, so sources can be
/// read in any order and parallel users never share draws.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: ChaCha8Rng,
    next: u64,
}

impl NoiseSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NoiseSource { rng, next: 0 }
    }

    /// The standard normal draw with the given index.
    pub fn gaussian(&mut self, index: u64) -> f64 {
        if index != self.next {
            self.rng.set_word_pos(4 * index as u128);
        }
        self.next = index + 1;
        // Box-Muller on two 53-bit uniforms; u1 in (0, 1]
        let u1 = 1.0 - (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn fill(&mut self, offset: u64, out: &mut [f64]) {
        for (i, v) in out.iter_mut().enumerate() {
            *v = self.gaussian(offset + i as u64);
        }
    }
}

/// `count` unit normal draws starting at `offset` in stream 0 of the plan's seed.
pub fn sample_noise(plan: &NoisePlan, count: usize, offset: u64) -> Vec<f64> {
    let mut out = vec![0.0; count];
    NoiseSource::new(plan.seed, 0).fill(offset, &mut out);
    out
}

/// A high-probability error radius, from exact norms and from closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    pub exact: f64,
    pub analytic: f64,
}

/// Counting error radius at step `t` of a horizon-`T` stream:
/// `C · N_t · sqrt(ln 6T)` with `N_t = ‖R_t‖_{1→2} ‖L_t‖_{2→∞}`, and the
/// closed form with `1 + ln(t)/π` in place of `N_t`.
pub fn error_bound_counting(t: usize, horizon: usize, budget: &PrivacyBudget) -> ErrorBound {
    let c = gaussian_constant(budget) * tail_factor(horizon);
    ErrorBound {
        exact: c * counting_norm_product(t),
        analytic: c * (1.0 + (t as f64).ln() / PI),
    }
}

/// Running-average error radius at step `t`.
///
/// The exact variant is `C · ‖R_t‖_{1→2} · ‖row t of R‖ / t · sqrt(ln 6T)`
/// using the solved factor, which must cover at least `t` rows.
pub fn error_bound_average(
    t: usize,
    horizon: usize,
    budget: &PrivacyBudget,
    factor: &LowerTriFactor,
) -> ErrorBound {
    let c = gaussian_constant(budget) * tail_factor(horizon);
    let tf = t as f64;
    let (_, col) = factor.row_col_norms(t);
    ErrorBound {
        exact: c * col * factor.row_norm(t - 1) / tf,
        analytic: c * 2.0 * PI * PI * (tf + 1.0) / (3.0 * (2.0 * tf + 1.0).powi(2)),
    }
}
