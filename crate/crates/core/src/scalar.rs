//! Number types the flow simulator can run on.
//!
//! The event loop only needs field arithmetic and a notion of "equal" for
//! amplitudes and times. Doubles compare with absolute tolerances; exact
//! rationals compare exactly, which lets small worked examples reproduce
//! without any rounding.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::step::EPS_AMP;
use crate::tvflow::EPS_EVENT;

pub trait FlowScalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact conversion where the target can represent the input; `None` for
    /// non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn from_int(x: i64) -> Self;

    /// Amplitude comparison; `Equal` means "same level" for canonicalization
    /// and for boundary pins.
    fn amp_cmp(&self, other: &Self) -> Ordering;

    /// Whether two event times coincide.
    fn time_eq(&self, other: &Self) -> bool;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

impl FlowScalar for f64 {
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_int(x: i64) -> Self {
        x as f64
    }

    fn amp_cmp(&self, other: &Self) -> Ordering {
        let d = self - other;
        if d.abs() <= EPS_AMP {
            Ordering::Equal
        } else if d > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn time_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= EPS_EVENT
    }
}

impl FlowScalar for BigRational {
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_int(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }

    fn amp_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn time_eq(&self, other: &Self) -> bool {
        self == other
    }
}
