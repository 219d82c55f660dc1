//! Scalar arithmetic behind the probability computations.
//!
//! Everything downstream of the tree (likelihoods, posteriors, mixtures,
//! branching distributions) is generic over [`Scalar`], so the same code runs
//! in floating point for simulation and in exact rational arithmetic for the
//! small worked examples where integer ratios are the ground truth.
//!
//! Floating-point scalars carry products of attachment weights in log space
//! (deep trees overflow a linear product); the exact scalar keeps them linear
//! since big rationals cannot overflow. Transcendental operations (`exp`,
//! `ln`, non-integer powers) are therefore float-only and panic on the exact
//! scalar — no linear-representation code path ever calls them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, Pow};
use std::fmt::{Debug, Display};

pub trait Scalar:
    Num + NumAssign + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Whether products of attachment weights are accumulated in log space.
    const LOG_PRODUCTS: bool;

    fn from_count(n: u64) -> Self;

    /// Exact ratio `num/den`; `den` must be nonzero.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Conversion from a finite `f64` configuration value.
    fn from_f64(x: f64) -> Self;

    /// `ln(n)` for log-space accumulation; `n ≥ 1`. Float-only.
    fn ln_count(n: u64) -> Self;

    /// `e^self`, used when leaving log space. Float-only.
    fn exp(self) -> Self;

    /// Natural log, used for log-space evidence. Float-only.
    fn ln(self) -> Self;

    /// Power sharpening `w ↦ w^alpha`. Exact scalars accept only integer
    /// `alpha ≥ 0` and panic otherwise.
    fn pow_sharpen(self, alpha: f64) -> Self;

    /// Exponential sharpening `w ↦ exp(alpha·w)`. Float-only.
    fn exp_sharpen(self, alpha: f64) -> Self;
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const LOG_PRODUCTS: bool = true;

            fn from_count(n: u64) -> Self {
                n as $t
            }

            fn from_ratio(num: u64, den: u64) -> Self {
                assert!(den != 0, "zero denominator");
                num as $t / den as $t
            }

            fn from_f64(x: f64) -> Self {
                debug_assert!(x.is_finite());
                x as $t
            }

            fn ln_count(n: u64) -> Self {
                debug_assert!(n >= 1);
                (n as $t).ln()
            }

            fn exp(self) -> Self {
                self.exp()
            }

            fn ln(self) -> Self {
                self.ln()
            }

            fn pow_sharpen(self, alpha: f64) -> Self {
                self.powf(alpha as $t)
            }

            fn exp_sharpen(self, alpha: f64) -> Self {
                (alpha as $t * self).exp()
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    const LOG_PRODUCTS: bool = false;

    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value required for exact arithmetic")
    }

    fn ln_count(_n: u64) -> Self {
        unreachable!("exact scalars never use log representation")
    }

    fn exp(self) -> Self {
        unreachable!("exact scalars never use log representation")
    }

    fn ln(self) -> Self {
        unreachable!("exact scalars never use log representation")
    }

    fn pow_sharpen(self, alpha: f64) -> Self {
        assert!(
            alpha >= 0.0 && alpha.fract() == 0.0 && alpha <= i32::MAX as f64,
            "exact arithmetic supports only non-negative integer power sharpening, got alpha = {alpha}"
        );
        if self == BigRational::from_integer(BigInt::from(0)) && alpha == 0.0 {
            // 0^0 = 1 by the empty-product convention used throughout.
            return BigRational::from_integer(BigInt::from(1));
        }
        Pow::pow(self, alpha as i32)
    }

    fn exp_sharpen(self, _alpha: f64) -> Self {
        panic!("exponential sharpening requires a floating-point scalar")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_construction() {
        assert_eq!(f64::from_ratio(1, 4), 0.25);
        assert_eq!(
            BigRational::from_ratio(6, 22),
            BigRational::new(BigInt::from(3), BigInt::from(11))
        );
    }

    #[test]
    fn exact_integer_power() {
        let three = BigRational::from_count(3);
        assert_eq!(three.clone().pow_sharpen(2.0), BigRational::from_count(9));
        assert_eq!(three.pow_sharpen(0.0), BigRational::from_count(1));
        assert_eq!(
            BigRational::from_count(0).pow_sharpen(0.0),
            BigRational::from_count(1)
        );
    }

    #[test]
    #[should_panic(expected = "integer power")]
    fn exact_fractional_power_rejected() {
        let _ = BigRational::from_count(2).pow_sharpen(0.5);
    }

    #[test]
    fn float_sharpening() {
        assert_eq!(2.0f64.pow_sharpen(2.0), 4.0);
        assert!((1.5f64.exp_sharpen(2.0) - 3.0f64.exp()).abs() < 1e-15);
    }
}
