//! The indifference polynomial and its derivative-sequence sign analysis.
//!
//! A rate `lambda` in (0, 1) is an interior equilibrium exactly when
//! `W(lambda) = reward`, which after clearing the positive denominator is a
//! polynomial equation of degree `threshold + 1`:
//!
//! ```text
//! H(lambda) = reward * (1 - lambda) * d(lambda) - g(lambda) = 0
//! ```
//!
//! with `g` and `d` the numerator and denominator of W. The coefficients are
//! produced by expanding this product symbolically rather than transcribing
//! a closed-form table; the expansion fixes the sign convention (leading
//! coefficient `-reward * (1 - low_rate)`) and is immune to small-threshold
//! edge cases. Counting sign variations of the derivative sequence at two
//! points bounds the number of roots between them (Fourier-Budan).

use crate::delay::{denominator_coefficients, numerator_coefficients};
use crate::error::{QueueError, Result};
use crate::model::ServicePolicy;
use crate::numeric::{horner, horner_magnitude};

/// Relative threshold below which a derivative value is treated as an exact
/// zero when counting sign variations. Zeros are skipped, the standard
/// Fourier-Budan convention.
pub const VARIATION_ZERO_EPS: f64 = 1e-12;

/// `H(lambda) = reward * (1 - lambda) * d(lambda) - g(lambda)`, ascending
/// coefficients, degree `threshold + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPolynomial {
    coefficients: Vec<f64>,
    threshold: u32,
    low_rate: f64,
    reward: f64,
}

impl EquilibriumPolynomial {
    pub fn new(policy: ServicePolicy, reward: f64) -> Result<Self> {
        if !reward.is_finite() || reward < 0.0 {
            return Err(QueueError::InvalidParameter(format!(
                "reward must be a finite non-negative real, got {reward}"
            )));
        }
        let g = numerator_coefficients(policy);
        let d = denominator_coefficients(policy);
        let n = d.len();
        let mut coefficients = vec![0.0; n + 1];
        for (k, dk) in d.iter().enumerate() {
            coefficients[k] += reward * dk;
            coefficients[k + 1] -= reward * dk;
        }
        for (k, gk) in g.iter().enumerate() {
            coefficients[k] -= gk;
        }
        Ok(Self {
            coefficients,
            threshold: policy.threshold(),
            low_rate: policy.low_rate(),
            reward,
        })
    }

    /// Ascending coefficients; index n holds the coefficient of `lambda^n`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn low_rate(&self) -> f64 {
        self.low_rate
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }

    /// Values of H and all its derivatives at `point`, together with the
    /// number of sign variations along the sequence.
    ///
    /// At `point == 0` the sequence reduces to `(0! c0, 1! c1, ...)`, so
    /// variations there are variations of the coefficient signs. Entries
    /// whose magnitude falls below [`VARIATION_ZERO_EPS`] relative to the
    /// term-magnitude bound are treated as zeros and skipped.
    pub fn sign_variations(&self, point: f64) -> SignVariationReport {
        let mut derivative_values = Vec::with_capacity(self.coefficients.len());
        let mut signs = Vec::with_capacity(self.coefficients.len());
        let mut coeffs = self.coefficients.clone();
        loop {
            let value = horner(&coeffs, point);
            let scale = horner_magnitude(&coeffs, point);
            derivative_values.push(value);
            if value.abs() > VARIATION_ZERO_EPS * scale {
                signs.push(value > 0.0);
            }
            if coeffs.len() == 1 {
                break;
            }
            for k in 1..coeffs.len() {
                coeffs[k - 1] = coeffs[k] * k as f64;
            }
            coeffs.pop();
        }
        let variations = signs.windows(2).filter(|w| w[0] != w[1]).count();
        SignVariationReport {
            point,
            derivative_values,
            variations,
        }
    }
}

/// Derivative sequence of H at a point and its sign-variation count.
#[derive(Debug, Clone, PartialEq)]
pub struct SignVariationReport {
    pub point: f64,
    /// `H(point), H'(point), ..., H^(degree)(point)`.
    pub derivative_values: Vec<f64>,
    pub variations: usize,
}
