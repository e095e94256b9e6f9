//! Continual release of a synthetic graph that preserves all cuts.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::factor::{counting_factor, DenseMatrix};
use crate::mech::{CounterState, InputDomain};
use crate::privacy::{gaussian_constant, tail_factor, NoisePlan, PrivacyBudget, Sensitivity};

/// Number of vertex pairs of an `n`-vertex graph.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `(u, v)`, `u < v`, among all pairs of `[0, n)`.
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// Inverse of [`edge_index`].
pub fn edge_pair(n: usize, mut index: usize) -> (usize, usize) {
    for u in 0..n {
        let row = n - u - 1;
        if index < row {
            return (u, u + 1 + index);
        }
        index -= row;
    }
    panic!("edge index out of range");
}

/// One weighted edge change; vertices are 0-based and unordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeUpdate {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl EdgeUpdate {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        EdgeUpdate { u, v, weight }
    }
}

/// Edge-weighted graph on `[0, n)` stored as a lexicographic pair vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticGraph {
    n: usize,
    weights: Vec<f64>,
}

impl SyntheticGraph {
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != pair_count(n) {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} vertex pairs",
                weights.len(),
                pair_count(n)
            )));
        }
        Ok(SyntheticGraph { n, weights })
    }

    pub fn empty(n: usize) -> Self {
        SyntheticGraph {
            n,
            weights: vec![0.0; pair_count(n)],
        }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => self.weights[edge_index(self.n, u, v)],
            std::cmp::Ordering::Greater => self.weights[edge_index(self.n, v, u)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Copy with negative weights replaced by zero, for presentation.
    pub fn clamped(&self) -> SyntheticGraph {
        SyntheticGraph {
            n: self.n,
            weights: self.weights.iter().map(|w| w.max(0.0)).collect(),
        }
    }

    /// `Φ_{S,P}`: total weight between the disjoint nonempty sets `s` and `p`.
    pub fn cut_value(&self, s: &[usize], p: &[usize]) -> Result<f64> {
        self.check_cut(s, p)?;
        Ok(s.iter()
            .flat_map(|&a| p.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.weight(a, b))
            .sum())
    }

    /// `Φ_S = Φ_{S, V \ S}`.
    pub fn full_cut_value(&self, s: &[usize]) -> Result<f64> {
        self.cut_value(s, &self.complement(s))
    }

    /// `χ_Sᵀ K χ_S`, equal to [`Self::full_cut_value`].
    pub fn cut_quadratic_form(&self, s: &[usize]) -> Result<f64> {
        self.check_cut(s, &self.complement(s))?;
        let k = self.laplacian();
        let mut chi = vec![0.0; self.n];
        for &v in s {
            chi[v] = 1.0;
        }
        let mut total = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                total += chi[i] * k.get(i, j) * chi[j];
            }
        }
        Ok(total)
    }

    /// Weighted Laplacian `K = D - W`.
    pub fn laplacian(&self) -> DenseMatrix {
        let mut k = DenseMatrix::zeros(self.n);
        for (e, &w) in self.weights.iter().enumerate() {
            let (u, v) = edge_pair(self.n, e);
            k.set(u, v, -w);
            k.set(v, u, -w);
            k.set(u, u, k.get(u, u) + w);
            k.set(v, v, k.get(v, v) + w);
        }
        k
    }

    fn complement(&self, s: &[usize]) -> Vec<usize> {
        (0..self.n).filter(|v| !s.contains(v)).collect()
    }

    fn check_cut(&self, s: &[usize], p: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n];
        if s.is_empty() || p.is_empty() {
            return Err(Error::InvalidCut);
        }
        for &v in s.iter().chain(p) {
            if v >= self.n || seen[v] {
                return Err(Error::InvalidCut);
            }
            seen[v] = true;
        }
        Ok(())
    }
}

/// Streaming synthetic-graph release.
///
/// Each of the `C(n, 2)` pair coordinates runs an independent scalar counter
/// on noise stream equal to its lexicographic index. One step's update vector
/// must have `ℓ2` norm at most one, which bounds the lifted sensitivity.
#[derive(Debug, Clone)]
pub struct GraphStream {
    n: usize,
    channels: Vec<CounterState>,
    truth: SyntheticGraph,
    deletions: bool,
}

impl GraphStream {
    pub fn new(plan: NoisePlan, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(
                "a graph stream needs at least two vertices".into(),
            ));
        }
        let plan = plan.with_sensitivity(Sensitivity::Cut);
        let coeffs = Arc::new(counting_factor(plan.horizon)?);
        let channels = (0..pair_count(n))
            .map(|e| {
                CounterState::with_coeffs(plan, coeffs.clone(), e as u64)
                    .with_domain(InputDomain::SignedUnit)
            })
            .collect();
        Ok(GraphStream {
            n,
            channels,
            truth: SyntheticGraph::empty(n),
            deletions: false,
        })
    }

    /// Accept weights in `[-1, 1]` as long as every true weight stays nonnegative.
    pub fn with_deletions(mut self, deletions: bool) -> Self {
        self.deletions = deletions;
        self
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.channels[0].t()
    }

    pub fn true_graph(&self) -> &SyntheticGraph {
        &self.truth
    }

    pub fn channel(&self, e: usize) -> &CounterState {
        &self.channels[e]
    }

    /// Applies one step of edge updates and returns the released graph.
    pub fn step(&mut self, updates: &[EdgeUpdate]) -> Result<SyntheticGraph> {
        let mut x = vec![0.0; self.channels.len()];
        for up in updates {
            let (u, v) = (up.u.min(up.v), up.u.max(up.v));
            if u == v || v >= self.n {
                return Err(Error::InvalidInput(format!(
                    "({}, {}) is not a vertex pair",
                    up.u, up.v
                )));
            }
            let lo = if self.deletions { -1.0 } else { 0.0 };
            if !(lo..=1.0).contains(&up.weight) {
                return Err(Error::InvalidInput(format!(
                    "edge weight {} out of range",
                    up.weight
                )));
            }
            x[edge_index(self.n, u, v)] += up.weight;
        }
        let norm_sq: f64 = x.iter().map(|w| w * w).sum();
        if norm_sq > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "update vector has l2 norm {} > 1",
                norm_sq.sqrt()
            )));
        }
        for (e, w) in x.iter().enumerate() {
            let value = self.truth.weights[e] + w;
            if value < 0.0 {
                return Err(Error::NegativeCount { coord: e, value });
            }
        }
        crate::mech::check_horizon(self.t(), self.channels[0].horizon())?;
        for (e, w) in x.iter().enumerate() {
            self.truth.weights[e] += w;
        }
        let weights = self
            .channels
            .iter_mut()
            .zip(&x)
            .map(|(c, &w)| c.step(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(SyntheticGraph { n: self.n, weights })
    }
}

/// `3 C |S| (1 + ln(t)/π) sqrt((|S| + |P|) ln(|S| + |P|) ln(6T))`.
pub fn st_cut_bound(budget: &PrivacyBudget, s: usize, p: usize, t: usize, horizon: usize) -> f64 {
    let k = (s + p) as f64;
    3.0 * gaussian_constant(budget)
        * s as f64
        * (1.0 + (t as f64).ln() / PI)
        * (k * k.ln()).sqrt()
        * tail_factor(horizon)
}
