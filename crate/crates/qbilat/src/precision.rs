use rug::Float;

use crate::error::{Error, Result};

/// Working precision in bits plus guard digits; threaded through every
/// numeric evaluation. The derived tolerance is always recomputed as
/// `2^-(bits - guard)`, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    bits: u32,
    guard: u32,
}

pub const DEFAULT_PREC_BITS: u32 = 256;
pub const DEFAULT_GUARD_BITS: u32 = 16;

impl PrecisionContext {
    pub fn new(bits: u32, guard: u32) -> Result<Self> {
        if bits < 64 {
            return Err(Error::Usage(format!("precision must be at least 64 bits, got {bits}")));
        }
        if guard >= bits {
            return Err(Error::Usage(format!("guard ({guard}) must be below precision ({bits})")));
        }
        Ok(Self { bits, guard })
    }

    pub fn with_bits(bits: u32) -> Result<Self> {
        Self::new(bits, DEFAULT_GUARD_BITS)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Tolerance `2^-(bits - guard)` at working precision.
    pub fn tol(&self) -> Float {
        Float::with_val(self.bits, Float::i_exp(1, -((self.bits - self.guard) as i32)))
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::with_val(self.bits, 0)
    }

    pub fn one(&self) -> Float {
        Float::with_val(self.bits, 1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, rug::float::Constant::Pi)
    }

    /// Same context with doubled precision, used by the bound-shrinks-on-refinement checks.
    pub fn doubled(&self) -> Self {
        Self { bits: self.bits * 2, guard: self.guard }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { bits: DEFAULT_PREC_BITS, guard: DEFAULT_GUARD_BITS }
    }
}
