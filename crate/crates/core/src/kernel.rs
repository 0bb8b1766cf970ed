use crate::error::Result;
use crate::symbols::Point;
use num_complex::Complex64;

/// A bounded continuous two-point kernel v(p, q) on momentum space, as it
/// enters the potential part of the quadratic form.
pub trait PairKernel: Send + Sync {
    fn dimension(&self) -> usize;

    fn eval(&self, p: &Point, q: &Point) -> Result<Complex64>;
}

/// v(p, q) ≡ value. Not the transform of an L¹ potential; used for
/// rank-one checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantKernel {
    pub dimension: usize,
    pub value: f64,
}

impl PairKernel for ConstantKernel {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval(&self, _p: &Point, _q: &Point) -> Result<Complex64> {
        Ok(Complex64::new(self.value, 0.0))
    }
}
