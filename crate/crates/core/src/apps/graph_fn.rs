//! Continual estimates of graph functions from their difference sequences.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mech::{CounterState, InputDomain};
use crate::privacy::{gaussian_constant, NoisePlan, PrivacyBudget, Sensitivity};

/// An unweighted edge insertion or deletion; vertices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeEvent {
    Insert(usize, usize),
    Delete(usize, usize),
}

/// A graph function tracked under edge events.
pub trait DifferenceProvider {
    fn name(&self) -> &str;

    /// `ℓ2`-sensitivity of the difference sequence, if known.
    fn sensitivity(&self) -> Option<f64>;

    /// Applies the event and returns the new function value.
    fn apply(&mut self, event: EdgeEvent) -> f64;
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Number of edges of a simple graph.
#[derive(Debug, Clone, Default)]
pub struct EdgeCount {
    edges: BTreeSet<(usize, usize)>,
}

impl DifferenceProvider for EdgeCount {
    fn name(&self) -> &str {
        "edge-count"
    }

    fn sensitivity(&self) -> Option<f64> {
        Some(1.0)
    }

    fn apply(&mut self, event: EdgeEvent) -> f64 {
        match event {
            EdgeEvent::Insert(u, v) if u != v => {
                self.edges.insert(key(u, v));
            }
            EdgeEvent::Delete(u, v) => {
                self.edges.remove(&key(u, v));
            }
            _ => {}
        }
        self.edges.len() as f64
    }
}

/// Degree of one fixed vertex.
#[derive(Debug, Clone)]
pub struct VertexDegree {
    vertex: usize,
    neighbors: BTreeSet<usize>,
}

impl VertexDegree {
    pub fn new(vertex: usize) -> Self {
        VertexDegree {
            vertex,
            neighbors: BTreeSet::new(),
        }
    }
}

impl DifferenceProvider for VertexDegree {
    fn name(&self) -> &str {
        "vertex-degree"
    }

    fn sensitivity(&self) -> Option<f64> {
        Some(1.0)
    }

    fn apply(&mut self, event: EdgeEvent) -> f64 {
        let (u, v, insert) = match event {
            EdgeEvent::Insert(u, v) => (u, v, true),
            EdgeEvent::Delete(u, v) => (u, v, false),
        };
        if u != v {
            let other = if u == self.vertex {
                Some(v)
            } else if v == self.vertex {
                Some(u)
            } else {
                None
            };
            if let Some(w) = other {
                if insert {
                    self.neighbors.insert(w);
                } else {
                    self.neighbors.remove(&w);
                }
            }
        }
        self.neighbors.len() as f64
    }
}

/// Feeds `f_t - f_{t-1}` of a provider into a factorization counter.
pub struct GraphFnEstimator<P> {
    provider: P,
    counter: CounterState,
    gamma: f64,
    value: f64,
}

impl<P: DifferenceProvider> GraphFnEstimator<P> {
    pub fn new(plan: NoisePlan, provider: P) -> Result<Self> {
        let gamma = provider
            .sensitivity()
            .filter(|g| g.is_finite() && *g > 0.0)
            .ok_or_else(|| Error::UndeclaredSensitivity(provider.name().to_string()))?;
        let plan = plan.with_sensitivity(Sensitivity::Custom(gamma));
        let counter = CounterState::new(plan)?.with_domain(InputDomain::Unbounded);
        Ok(GraphFnEstimator {
            provider,
            counter,
            gamma,
            value: 0.0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Exact current value of the function.
    pub fn true_value(&self) -> f64 {
        self.value
    }

    pub fn counter(&self) -> &CounterState {
        &self.counter
    }

    /// Applies `event` and returns the private function value. A difference
    /// larger than the declared sensitivity is an error and leaves the
    /// provider ahead of the counter.
    pub fn step(&mut self, event: EdgeEvent) -> Result<f64> {
        crate::mech::check_horizon(self.counter.t(), self.counter.horizon())?;
        let next = self.provider.apply(event);
        let diff = next - self.value;
        if diff.abs() > self.gamma * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "difference {diff} exceeds the declared sensitivity {}",
                self.gamma
            )));
        }
        let released = self.counter.step(diff)?;
        self.value = next;
        Ok(released)
    }
}

/// `C (1 + ln(T)/π) Γ sqrt(ln T)`.
pub fn graph_fn_bound(budget: &PrivacyBudget, horizon: usize, gamma: f64) -> f64 {
    let ln_t = (horizon as f64).ln();
    gaussian_constant(budget) * (1.0 + ln_t / PI) * gamma * ln_t.sqrt()
}
