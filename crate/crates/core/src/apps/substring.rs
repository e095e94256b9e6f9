//! Continual counts of all substrings up to a given length.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Result;
use crate::factor::counting_factor;
use crate::mech::CounterState;
use crate::privacy::{
    gaussian_constant, tail_factor, ErrorBound, NoisePlan, PrivacyBudget, Sensitivity,
};

use super::words::{Alphabet, WordIndex};

/// Default cap on the number of indexed words.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 16;

/// Indices of the suffixes of `recent` (oldest letter first) of length
/// `1..=max_len`: the nonzero entries of the per-step indicator vector.
pub fn suffix_indicator(index: &WordIndex, recent: &[usize]) -> Vec<usize> {
    let n = recent.len();
    (1..=index.max_len().min(n))
        .map(|k| index.index(&recent[n - k..]))
        .collect()
}

/// Lifted counter over all strings of length at most `ℓ`.
#[derive(Debug, Clone)]
pub struct SubstringCounterState {
    alphabet: Alphabet,
    index: WordIndex,
    recent: VecDeque<usize>,
    channels: Vec<CounterState>,
    counts: Vec<u64>,
}

impl SubstringCounterState {
    pub fn new(plan: NoisePlan, alphabet: Alphabet, max_len: usize) -> Result<Self> {
        Self::with_cap(plan, alphabet, max_len, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(
        plan: NoisePlan,
        alphabet: Alphabet,
        max_len: usize,
        cap: usize,
    ) -> Result<Self> {
        let index = WordIndex::new(alphabet.len(), max_len, cap)?;
        let plan = plan.with_sensitivity(Sensitivity::Substring { max_len });
        let coeffs = Arc::new(counting_factor(plan.horizon)?);
        let channels = (0..index.dim())
            .map(|q| CounterState::with_coeffs(plan, coeffs.clone(), q as u64))
            .collect();
        Ok(SubstringCounterState {
            counts: vec![0; index.dim()],
            alphabet,
            index,
            recent: VecDeque::with_capacity(max_len),
            channels,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn index(&self) -> &WordIndex {
        &self.index
    }

    pub fn t(&self) -> usize {
        self.channels[0].t()
    }

    pub fn true_counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn plan(&self) -> &NoisePlan {
        self.channels[0].plan()
    }

    /// Consumes one letter and returns the released count of every word.
    pub fn step(&mut self, letter: char) -> Result<Vec<f64>> {
        let c = self.alphabet.index_of(letter)?;
        crate::mech::check_horizon(self.t(), self.channels[0].horizon())?;
        if self.recent.len() == self.index.max_len() {
            self.recent.pop_front();
        }
        self.recent.push_back(c);
        let ones = suffix_indicator(&self.index, self.recent.make_contiguous());
        let mut x = vec![0.0; self.index.dim()];
        for q in ones {
            x[q] = 1.0;
            self.counts[q] += 1;
        }
        self.channels
            .iter_mut()
            .zip(&x)
            .map(|(ch, &v)| ch.step(v))
            .collect()
    }

    /// Per-query error radius at `t` with the union bound taken over all
    /// `T · dim` released values.
    pub fn error_bound(&self, t: usize) -> ErrorBound {
        let horizon = self.plan().horizon;
        let widen = tail_factor(horizon * self.index.dim()) / tail_factor(horizon);
        let b = self.channels[0].error_bound(t);
        ErrorBound {
            exact: b.exact * widen,
            analytic: b.analytic * widen,
        }
    }
}

/// `C (1 + ln(T)/π) ℓ sqrt(ln(6 T |U|^ℓ))`, the stated additive error.
pub fn substring_bound(budget: &PrivacyBudget, horizon: usize, q: usize, max_len: usize) -> f64 {
    let ln_t = (horizon as f64).ln();
    let arg = 6.0 * horizon as f64 * (q as f64).powi(max_len as i32);
    gaussian_constant(budget) * (1.0 + ln_t / PI) * max_len as f64 * arg.ln().sqrt()
}
