//! Non-interactive local-DP median learning from double prefix-sum reports.
//!
//! Each client one-hot encodes its interval twice, forward (`u`) and
//! reversed (`v`), and releases the factorization counter of each at half the
//! budget. The server combines the two prefix sums into an estimate of
//! `P(d ≤ θ) - P(d > θ)` at every breakpoint; integrating the snapped
//! estimate gives the empirical median risk curve.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::factor::{counting_factor, FactorCoeffs};
use crate::mech::CounterState;
use crate::privacy::{gaussian_constant, NoiseMode, NoisePlan, PrivacyBudget};

/// Partition of `[0, 1]` into `w = ⌈ε sqrt(n)⌉` intervals of width `1/w`.
#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    budget: PrivacyBudget,
    w: usize,
    coeffs: Arc<FactorCoeffs>,
}

impl Grid {
    pub fn new(n: usize, budget: PrivacyBudget) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one client".into()));
        }
        let w = ((budget.epsilon() * (n as f64).sqrt()).ceil() as usize).max(1);
        Ok(Grid {
            n,
            budget,
            w,
            coeffs: Arc::new(counting_factor(w)?),
        })
    }

    pub fn clients(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> usize {
        self.w
    }

    pub fn budget(&self) -> &PrivacyBudget {
        &self.budget
    }

    /// Breakpoint `j / w`.
    pub fn breakpoint(&self, j: usize) -> f64 {
        j as f64 / self.w as f64
    }

    /// 1-based interval of `d`; interior boundaries go right and `d = 1` to `I_w`.
    pub fn interval_of(&self, d: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::InvalidInput(format!(
                "data point {d} outside [0, 1]"
            )));
        }
        Ok(((d * self.w as f64).floor() as usize + 1).min(self.w))
    }

    /// Budget of each of a client's two counters.
    pub fn vector_budget(&self) -> PrivacyBudget {
        self.budget.halved()
    }

    /// Basic composition of the two per-vector budgets: the per-client total.
    pub fn client_budget(&self) -> (f64, f64) {
        let half = self.vector_budget();
        half.compose(&half)
    }

    /// The noise plan shared by every client vector.
    pub fn plan(&self, seed: u64) -> NoisePlan {
        NoisePlan::new(self.vector_budget(), self.w, seed)
            .expect("grid has a positive horizon")
            .with_mode(NoiseMode::FixedHorizon)
    }
}

/// The two released prefix-sum vectors of one client.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientMessage {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// One-hot vectors `(u, v)` of `d`: `u[j-1] = 1` and `v[w-j] = 1` for `d ∈ I_j`.
pub fn one_hot(d: f64, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    let j = grid.interval_of(d)?;
    let mut u = vec![0.0; grid.w];
    let mut v = vec![0.0; grid.w];
    u[j - 1] = 1.0;
    v[grid.w - j] = 1.0;
    Ok((u, v))
}

/// Encodes `d` for client number `client`, whose counters draw from noise
/// streams `2 client` and `2 client + 1` of `seed`.
pub fn client_encode(d: f64, grid: &Grid, seed: u64, client: u64) -> Result<ClientMessage> {
    client_encode_with(d, grid, grid.plan(seed), client)
}

/// [`client_encode`] with an explicit per-vector plan (e.g. a dry run).
pub fn client_encode_with(
    d: f64,
    grid: &Grid,
    plan: NoisePlan,
    client: u64,
) -> Result<ClientMessage> {
    let (u, v) = one_hot(d, grid)?;
    let run = |x: &[f64], stream: u64| -> Result<Vec<f64>> {
        let mut c = CounterState::with_coeffs(plan, grid.coeffs.clone(), stream);
        x.iter().map(|&b| c.step(b)).collect()
    };
    Ok(ClientMessage {
        y: run(&u, 2 * client)?,
        z: run(&v, 2 * client + 1)?,
    })
}

/// The server's estimate at the `w + 1` breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateEstimate {
    values: Vec<f64>,
}

impl AggregateEstimate {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(
                "an estimate needs at least two breakpoints".into(),
            ));
        }
        Ok(AggregateEstimate { values })
    }

    /// `x̂[j]` for breakpoints `j = 0..=w`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Index of the breakpoint nearest to `θ`, ties to the smaller one.
    pub fn nearest(&self, theta: f64) -> usize {
        let w = self.intervals() as f64;
        let j = (theta * w - 0.5).ceil().max(0.0) as usize;
        j.min(self.intervals())
    }

    /// `g(x̂, θ)`.
    pub fn g(&self, theta: f64) -> f64 {
        self.values[self.nearest(theta)]
    }

    /// `f(x̂, θ) = ∫_0^θ g(x̂, s) ds`, exact.
    pub fn f(&self, theta: f64) -> f64 {
        let w = self.intervals() as f64;
        let mut total = 0.0;
        for (j, a) in self.values.iter().enumerate() {
            let lo = ((j as f64 - 0.5) / w).max(0.0);
            let hi = ((j as f64 + 0.5) / w).min(1.0);
            if theta <= lo {
                break;
            }
            total += a * (hi.min(theta) - lo);
        }
        total
    }
}

/// `x̂[t] = (Σ y_i[t] - Σ z_i[w - t]) / n` for `t = 1..w-1`; the endpoints copy
/// the nearest interior value, or for `w = 1` use the same formula with
/// empty prefix sums.
pub fn server_aggregate(messages: &[ClientMessage], grid: &Grid) -> Result<AggregateEstimate> {
    let w = grid.w;
    if messages.is_empty() {
        return Err(Error::InvalidInput("no client messages".into()));
    }
    let mut sy = vec![0.0; w];
    let mut sz = vec![0.0; w];
    for m in messages {
        for len in [m.y.len(), m.z.len()] {
            if len != w {
                return Err(Error::GridMismatch {
                    expected: w,
                    got: len,
                });
            }
        }
        for (a, b) in sy.iter_mut().zip(&m.y) {
            *a += b;
        }
        for (a, b) in sz.iter_mut().zip(&m.z) {
            *a += b;
        }
    }
    let n = messages.len() as f64;
    // 1-based prefix sums with y[0] = z[0] = 0
    let y = |t: usize| if t == 0 { 0.0 } else { sy[t - 1] };
    let z = |t: usize| if t == 0 { 0.0 } else { sz[t - 1] };
    let mut values: Vec<f64> = (0..=w).map(|t| (y(t) - z(w - t)) / n).collect();
    if w >= 2 {
        values[0] = values[1];
        values[w] = values[w - 1];
    }
    AggregateEstimate::from_values(values)
}

/// `(g(x̂, θ), f(x̂, θ))`.
pub fn risk_curve(estimate: &AggregateEstimate, theta: f64) -> (f64, f64) {
    (estimate.g(theta), estimate.f(theta))
}

/// `β = C_{ε/2,δ/2} sqrt(ln(6(ε√n + 1)) / (2n)) (1 + ln(ε√n + 1)/π)`.
pub fn beta_bound(n: usize, budget: &PrivacyBudget) -> f64 {
    let m = budget.epsilon() * (n as f64).sqrt() + 1.0;
    gaussian_constant(&budget.halved())
        * ((6.0 * m).ln() / (2.0 * n as f64)).sqrt()
        * (1.0 + m.ln() / PI)
}

/// `2β + 2/(ε√n)`, the guaranteed distance of `f(x̂, ·)` from the median risk.
pub fn risk_bound(n: usize, budget: &PrivacyBudget) -> f64 {
    2.0 * beta_bound(n, budget) + 2.0 / (budget.epsilon() * (n as f64).sqrt())
}

/// `E|θ - d|` for `d ~ Uniform[0, 1]`.
pub fn uniform_median_risk(theta: f64) -> f64 {
    theta * theta - theta + 0.5
}
