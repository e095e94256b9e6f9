use crate::error::Result;
use crate::privacy::{ErrorBound, NoisePlan, NoiseSource};

use super::{check_horizon, InputDomain};

/// The binary (tree) mechanism baseline with Gaussian node noise.
///
/// Level `i` holds the sum over the most recent complete dyadic block of
/// length `2^i`. Step `t` completes the block at level `trailing_zeros(t)`, and
/// the release at `t` sums the noisy blocks of the set bits of `t`. Every item
/// lies in at most `H = ⌈log2 T⌉ + 1` blocks, so each block gets noise
/// `C · sqrt(H)`.
#[derive(Debug, Clone)]
pub struct BinaryTreeState {
    plan: NoisePlan,
    height: usize,
    sigma_node: f64,
    noise: NoiseSource,
    domain: InputDomain,
    alpha: Vec<f64>,
    noisy: Vec<f64>,
    t: usize,
    true_sum: f64,
}

impl BinaryTreeState {
    pub fn new(plan: NoisePlan) -> Self {
        let height = tree_height(plan.horizon);
        let sigma_node = if plan.sigma_zero {
            0.0
        } else {
            plan.constant() * plan.sensitivity.worst_case() * (height as f64).sqrt()
        };
        BinaryTreeState {
            noise: NoiseSource::new(plan.seed, 0),
            plan,
            height,
            sigma_node,
            domain: InputDomain::default(),
            alpha: vec![0.0; height],
            noisy: vec![0.0; height],
            t: 0,
            true_sum: 0.0,
        }
    }

    pub fn with_domain(mut self, domain: InputDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn sigma_node(&self) -> f64 {
        self.sigma_node
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn true_sum(&self) -> f64 {
        self.true_sum
    }

    pub fn step(&mut self, x: f64) -> Result<f64> {
        check_horizon(self.t, self.plan.horizon)?;
        self.domain.check(x)?;
        self.t += 1;
        self.true_sum += x;
        let t = self.t;
        let level = t.trailing_zeros() as usize;
        let mut block = x;
        for j in 0..level {
            block += self.alpha[j];
            self.alpha[j] = 0.0;
            self.noisy[j] = 0.0;
        }
        self.alpha[level] = block;
        let z = if self.sigma_node == 0.0 {
            0.0
        } else {
            self.sigma_node * self.noise.gaussian((t - 1) as u64)
        };
        self.noisy[level] = block + z;
        Ok((0..self.height)
            .filter(|j| t >> j & 1 == 1)
            .map(|j| self.noisy[j])
            .sum())
    }

    /// Error radius at step `t`: `C sqrt(H · popcount(t) · ln 6T)`, and the
    /// analytic variant with `popcount(t)` replaced by `⌊log2 t⌋ + 1`.
    pub fn error_bound(&self, t: usize) -> ErrorBound {
        let m = self.plan.radius_multiplier()
            * self.plan.sensitivity.worst_case()
            * (self.height as f64).sqrt();
        let bits = (usize::BITS - t.leading_zeros()) as f64;
        ErrorBound {
            exact: m * (t.count_ones() as f64).sqrt(),
            analytic: m * bits.sqrt(),
        }
    }
}

/// `⌈log2 T⌉ + 1`.
pub fn tree_height(horizon: usize) -> usize {
    horizon.max(1).next_power_of_two().trailing_zeros() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privacy::PrivacyBudget;

    fn plan(horizon: usize, seed: u64) -> NoisePlan {
        NoisePlan::new(PrivacyBudget::new(0.8, 1e-10).unwrap(), horizon, seed).unwrap()
    }

    #[test]
    fn heights() {
        assert_eq!(tree_height(1), 1);
        assert_eq!(tree_height(2), 2);
        assert_eq!(tree_height(3), 3);
        assert_eq!(tree_height(4), 3);
        assert_eq!(tree_height(1 << 14), 15);
    }

    #[test]
    fn dry_run_is_exact() {
        let mut s = BinaryTreeState::new(plan(100, 0).with_sigma_zero(true));
        let mut sum = 0.0;
        for i in 0..100 {
            let x = ((i * 7) % 3 == 0) as u8 as f64;
            sum += x;
            assert_eq!(s.step(x).unwrap(), sum);
        }
        assert!(s.step(1.0).is_err());
    }

    #[test]
    fn power_of_two_uses_one_node() {
        // at t = 2^k the release is the single root-of-block node, so the
        // error is exactly one node draw
        let p = plan(64, 5);
        let mut s = BinaryTreeState::new(p);
        let mut draws = NoiseSource::new(5, 0);
        for t in 1..=64usize {
            let a = s.step(1.0).unwrap();
            if t.is_power_of_two() {
                let g = draws.gaussian((t - 1) as u64);
                assert!((a - t as f64 - s.sigma_node() * g).abs() < 1e-9);
            }
        }
    }
}
