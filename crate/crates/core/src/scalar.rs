//! Scalar traits the generic algorithms are written against.
//!
//! Integer algorithms (Smith form, integer kernels) run over any signed
//! Euclidean integer type; exact linear algebra over cyclotomic fields runs
//! over any exact field of characteristic zero; the intertwiner runs over a
//! floating type.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Signed integers with Euclidean division.
pub trait IntegerScalar: Integer + Signed + Clone + Debug + FromPrimitive + ToPrimitive {}

impl IntegerScalar for i64 {}
impl IntegerScalar for i128 {}
impl IntegerScalar for BigInt {}

/// Exact fields (no rounding): rationals in practice.
pub trait ExactField: Num + Clone + PartialEq + Debug + Neg<Output = Self> + FromPrimitive {}

impl<T> ExactField for Ratio<T>
where
    T: Clone + Integer + Signed + Debug + FromPrimitive,
    Ratio<T>: FromPrimitive,
{
}

/// Real floating types used for approximate complex arithmetic.
pub trait RealScalar: Float + FromPrimitive + Debug + Send + Sync {}

impl RealScalar for f32 {}
impl RealScalar for f64 {}
