//! Scalar abstraction shared by the numeric modules.
//!
//! PMFs and expected energies are computed either in floating point
//! (`f32`/`f64`) or exactly (`BigRational`). Table construction uses the
//! exact form so energy sorting is reproducible on every platform.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A number that can hold probabilities and energies.
pub trait Scalar:
    Num + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Allowed deviation of a PMF's total mass from one.
    fn mass_tolerance() -> Self;

    fn magnitude(&self) -> Self;

    fn from_u64_exact(v: u64) -> Self {
        Self::from_u64(v).expect("u64 is representable")
    }

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64_exact(num) / Self::from_u64_exact(den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn mass_tolerance() -> Self {
        1e-12
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f32 {
    fn mass_tolerance() -> Self {
        1e-5
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Scalar for BigRational {
    fn mass_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn magnitude(&self) -> Self {
        num_traits::Signed::abs(self)
    }

    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Floating-point scalars, used where logarithms and exponentials appear.
pub trait RealScalar: Scalar + Float {
    fn c(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite constant")
    }
}

impl RealScalar for f64 {}
impl RealScalar for f32 {}
