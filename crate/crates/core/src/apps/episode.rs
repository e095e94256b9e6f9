//! Continual counts of minimal occurrences of all episodes up to a given length.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Result;
use crate::factor::counting_factor;
use crate::mech::CounterState;
use crate::privacy::{
    gaussian_constant, tail_factor, ErrorBound, NoisePlan, PrivacyBudget, Sensitivity,
};

use super::substring::DEFAULT_DIMENSION_CAP;
use super::words::{Alphabet, WordIndex};

fn is_subsequence(episode: &[usize], window: &[usize]) -> bool {
    let mut it = window.iter();
    episode.iter().all(|c| it.any(|w| w == c))
}

/// Positions of the minimal occurrence of `episode` ending at the last
/// letter of `history`, if there is one.
///
/// Among occurrences ending there only the one with the latest start can be
/// minimal; it is minimal iff its window minus the last letter does not
/// contain the episode.
pub fn minimal_occurrence_ending(history: &[usize], episode: &[usize]) -> Option<Vec<usize>> {
    let end = history.len().checked_sub(1)?;
    let (&last, head) = episode.split_last()?;
    if history[end] != last {
        return None;
    }
    let mut positions = vec![end; episode.len()];
    let mut cursor = end;
    for (slot, &c) in positions.iter_mut().zip(head).rev() {
        cursor = history[..cursor].iter().rposition(|&h| h == c)?;
        *slot = cursor;
    }
    if is_subsequence(episode, &history[positions[0]..end]) {
        None
    } else {
        Some(positions)
    }
}

/// Lifted counter over the minimal-occurrence indicators of all episodes of
/// length at most `ℓ`.
#[derive(Debug, Clone)]
pub struct EpisodeCounterState {
    alphabet: Alphabet,
    index: WordIndex,
    history: Vec<usize>,
    channels: Vec<CounterState>,
    counts: Vec<u64>,
    support: Vec<BTreeSet<usize>>,
}

impl EpisodeCounterState {
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
        let plan = plan.with_sensitivity(Sensitivity::Episode {
            alphabet: alphabet.len(),
            max_len,
        });
        let coeffs = Arc::new(counting_factor(plan.horizon)?);
        let channels = (0..index.dim())
            .map(|q| CounterState::with_coeffs(plan, coeffs.clone(), q as u64))
            .collect();
        Ok(EpisodeCounterState {
            counts: vec![0; index.dim()],
            support: vec![BTreeSet::new(); index.dim()],
            alphabet,
            index,
            history: Vec::with_capacity(plan.horizon),
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
        self.history.len()
    }

    pub fn plan(&self) -> &NoisePlan {
        self.channels[0].plan()
    }

    /// Exact minimal-occurrence counts.
    pub fn true_counts(&self) -> &[u64] {
        &self.counts
    }

    /// Exact support of episode `q`: positions covered by its minimal occurrences.
    pub fn true_support(&self, q: usize) -> usize {
        self.support[q].len()
    }

    /// Episodes with a minimal occurrence ending at the latest letter.
    pub fn indicator(&self) -> Vec<usize> {
        let Some(&last) = self.history.last() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for i in 0..self.index.dim() {
            let e = self.index.word(i);
            if e[e.len() - 1] == last && minimal_occurrence_ending(&self.history, &e).is_some() {
                out.push(i);
            }
        }
        out
    }

    /// Consumes one event and returns the released count of every episode.
    pub fn step(&mut self, letter: char) -> Result<Vec<f64>> {
        let c = self.alphabet.index_of(letter)?;
        crate::mech::check_horizon(self.t(), self.channels[0].horizon())?;
        self.history.push(c);
        let mut x = vec![0.0; self.index.dim()];
        for (i, xi) in x.iter_mut().enumerate() {
            let e = self.index.word(i);
            if e[e.len() - 1] != c {
                continue;
            }
            if let Some(pos) = minimal_occurrence_ending(&self.history, &e) {
                *xi = 1.0;
                self.counts[i] += 1;
                self.support[i].extend(pos);
            }
        }
        self.channels
            .iter_mut()
            .zip(&x)
            .map(|(ch, &v)| ch.step(v))
            .collect()
    }

    /// Episodes to report at support threshold `min_support`, decided from
    /// released counts only: `count · |e|` bounds the support from above.
    pub fn reported(&self, released: &[f64], min_support: usize) -> Vec<usize> {
        (0..self.index.dim())
            .filter(|&i| released[i] * self.index.word(i).len() as f64 >= min_support as f64)
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

/// `2 C (1 + ln(T)/π) ℓ sqrt(|U|^{ℓ-1} ℓ ln(6 T |U|^ℓ))`, the stated additive error.
pub fn episode_bound(budget: &PrivacyBudget, horizon: usize, q: usize, max_len: usize) -> f64 {
    let ln_t = (horizon as f64).ln();
    let qf = q as f64;
    let l = max_len as f64;
    let arg = 6.0 * horizon as f64 * qf.powi(max_len as i32);
    2.0 * gaussian_constant(budget)
        * (1.0 + ln_t / PI)
        * l
        * (qf.powi(max_len as i32 - 1) * l * arg.ln()).sqrt()
}
