//! Streaming mechanisms under continual release: the factorization counter,
//! the running average, the continual histogram and the binary-tree baseline.
//!
//! Every state is created with a declared horizon and is stepped once per
//! arriving item; the value returned by a step is the private release for
//! that time.

mod average;
mod counter;
mod histogram;
mod tree;

pub use average::AverageState;
pub use counter::CounterState;
pub use histogram::HistogramState;
pub use tree::{tree_height, BinaryTreeState};

use crate::error::{Error, Result};
pub(crate) use crate::factor::dot;

/// Admissible values of a single stream item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputDomain {
    /// `x ∈ {0, 1}`.
    #[default]
    Binary,
    /// `x ∈ [0, 1]`.
    UnitInterval,
    /// `x ∈ [-1, 1]`, used for insert/delete streams.
    SignedUnit,
    /// Any finite value; the caller vouches for the declared sensitivity.
    Unbounded,
}

impl InputDomain {
    pub fn check(&self, x: f64) -> Result<()> {
        let ok = x.is_finite()
            && match self {
                InputDomain::Binary => x == 0.0 || x == 1.0,
                InputDomain::UnitInterval => (0.0..=1.0).contains(&x),
                InputDomain::SignedUnit => (-1.0..=1.0).contains(&x),
                InputDomain::Unbounded => true,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "{x} is outside the {self:?} input domain"
            )))
        }
    }
}

pub(crate) fn check_horizon(t: usize, horizon: usize) -> Result<()> {
    if t >= horizon {
        Err(Error::HorizonExceeded {
            step: t + 1,
            horizon,
        })
    } else {
        Ok(())
    }
}
