//! Coefficient rings for formal sums.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A commutative ring usable as coefficients of formal sums.
pub trait Coeff:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Send
    + Sync
{
    fn sign(negative: bool) -> Self {
        if negative {
            -Self::one()
        } else {
            Self::one()
        }
    }

    /// Image of an integer under the unique ring map from ℤ.
    fn from_i64(v: i64) -> Self;
}

impl Coeff for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
}

impl Coeff for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

/// The field with two elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2(pub bool);

impl fmt::Display for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

impl Add for F2 {
    type Output = F2;
    fn add(self, o: F2) -> F2 {
        F2(self.0 ^ o.0)
    }
}

impl Sub for F2 {
    type Output = F2;
    fn sub(self, o: F2) -> F2 {
        F2(self.0 ^ o.0)
    }
}

impl Mul for F2 {
    type Output = F2;
    fn mul(self, o: F2) -> F2 {
        F2(self.0 & o.0)
    }
}

impl Neg for F2 {
    type Output = F2;
    fn neg(self) -> F2 {
        self
    }
}

impl Zero for F2 {
    fn zero() -> F2 {
        F2(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl One for F2 {
    fn one() -> F2 {
        F2(true)
    }
}

impl Coeff for F2 {
    fn from_i64(v: i64) -> Self {
        F2(v & 1 == 1)
    }
}

/// Ring tag used in reports and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Z,
    F2,
}
