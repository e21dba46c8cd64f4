//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point type the solver can be instantiated with (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal or parameter into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| Self::lit(n as f64))
    }
}

impl Real for f32 {}
impl Real for f64 {}


/// Determinant and inverse of a small square matrix with compile-time size.
///
/// nalgebra only offers these for sizes it can name at the type level, so
/// the generic `D` is routed through the concrete 1×1, 2×2 and 3×3 forms.
pub fn det_and_inverse<T: Real, const D: usize>(
    a: &nalgebra::SMatrix<T, D, D>,
) -> (T, Option<nalgebra::SMatrix<T, D, D>>) {
    use nalgebra::{Matrix1, Matrix2, Matrix3, SMatrix};
    macro_rules! via {
        ($m:ty) => {{
            let m = <$m>::from_fn(|r, c| a[(r, c)]);
            let inv = m.try_inverse().map(|b| SMatrix::<T, D, D>::from_fn(|r, c| b[(r, c)]));
            (m.determinant(), inv)
        }};
    }
    match D {
        1 => via!(Matrix1<T>),
        2 => via!(Matrix2<T>),
        3 => via!(Matrix3<T>),
        _ => {
            let m = nalgebra::DMatrix::from_fn(D, D, |r, c| a[(r, c)]);
            let det = m.clone().determinant();
            let inv = m.try_inverse().map(|b| SMatrix::<T, D, D>::from_fn(|r, c| b[(r, c)]));
            (det, inv)
        }
    }
}
