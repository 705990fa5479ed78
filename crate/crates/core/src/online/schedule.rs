use num_traits::{Signed, Zero};

use crate::scalar::{QuadraticScalar, Scalar};

use super::StrategyError;

/// Geometric round trips from the origin.
///
/// Trip 1 has length `2+2α`, trip `j ≥ 2` has length `(2+2α)^(j−1)(1+2α)`;
/// every trip is lengthened by `pad`. The outward reach of a trip is half
/// its length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTripSchedule {
    alpha: QuadraticScalar,
    pad: Scalar,
}

impl RoundTripSchedule {
    pub fn new(alpha: QuadraticScalar, pad: Scalar) -> Result<Self, StrategyError> {
        if !alpha.is_positive() {
            return Err(StrategyError::BadParameter(format!("alpha must be positive, got {alpha}")));
        }
        if pad.is_negative() {
            return Err(StrategyError::BadParameter(format!("pad must be nonnegative, got {pad}")));
        }
        Ok(Self { alpha, pad })
    }

    /// Unpadded schedule with the given `α`.
    pub fn with_alpha(alpha: QuadraticScalar) -> Result<Self, StrategyError> {
        Self::new(alpha, Scalar::zero())
    }

    pub fn alpha(&self) -> &QuadraticScalar {
        &self.alpha
    }

    pub fn pad(&self) -> &Scalar {
        &self.pad
    }

    /// `2+2α`, the factor by which unpadded trips grow.
    pub fn growth(&self) -> QuadraticScalar {
        &QuadraticScalar::from_int(2) + &(&self.alpha + &self.alpha)
    }

    /// Unpadded length of trip `j` (1-based).
    pub fn base_length(&self, j: usize) -> QuadraticScalar {
        assert!(j >= 1, "trips are numbered from 1");
        let growth = self.growth();
        if j == 1 {
            return growth;
        }
        let tail = &QuadraticScalar::one() + &(&self.alpha + &self.alpha);
        &growth.pow(j as u32 - 1) * &tail
    }

    pub fn trip_length(&self, j: usize) -> QuadraticScalar {
        &self.base_length(j) + &QuadraticScalar::from(&self.pad)
    }

    /// Outward reach `s_j`.
    pub fn reach(&self, j: usize) -> QuadraticScalar {
        self.trip_length(j).mul_scalar(&Scalar::new(1.into(), 2.into()))
    }

    /// Time of the return to the origin that ends trip `j`, ignoring clamping.
    pub fn return_time(&self, j: usize) -> QuadraticScalar {
        (1..=j).fold(QuadraticScalar::zero(), |acc, k| &acc + &self.trip_length(k))
    }

    /// The first trip whose reach is at least `distance`.
    pub fn trip_reaching(&self, distance: &QuadraticScalar) -> usize {
        let mut j = 1;
        while self.reach(j) < *distance {
            j += 1;
        }
        j
    }
}

/// `√3/2`, the trip-growth parameter that balances both worst cases.
pub fn default_alpha() -> QuadraticScalar {
    QuadraticScalar::sqrt3().mul_scalar(&Scalar::new(1.into(), 2.into()))
}

/// `2+√3`.
pub fn certified_ratio() -> QuadraticScalar {
    &QuadraticScalar::from_int(2) + &QuadraticScalar::sqrt3()
}
