//! Cubic B-spline kernel and the first-order gradient correction.
//!
//! Every discrete operator in the solver uses the symmetrized corrected
//! gradient `0.5 (B_i + B_j) ∇W_ij`, where `B = A⁻¹` and
//! `A = -Σ_j f_ij V_j x_ij ⊗ ∇W_ij`. Since `∇W_ij` is parallel to `x_ij`,
//! `A` is symmetric and `A⁻¹ = A⁻ᵀ`, so the correction restores exact
//! gradients of affine fields whenever `B_i = B_j`.

use nalgebra::{SMatrix, SVector};
use thiserror::Error;

use crate::num::{det_and_inverse, Real};

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("unsupported spatial dimension {0} (expected 2 or 3)")]
    Dimension(usize),
    #[error("smoothing length must be positive and finite, got {0}")]
    SmoothingLength(f64),
}

/// Smoothing length, dimension and normalisation of the cubic B-spline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig<T: Real, const D: usize> {
    h: T,
    alpha_d: T,
    support_radius: T,
}

impl<T: Real, const D: usize> KernelConfig<T, D> {
    pub fn new(h: T) -> Result<Self, KernelError> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(KernelError::SmoothingLength(h.as_f64()));
        }
        let alpha_d = match D {
            2 => T::lit(10.0) / (T::lit(7.0) * T::pi() * h * h),
            3 => T::one() / (T::pi() * h * h * h),
            d => return Err(KernelError::Dimension(d)),
        };
        Ok(Self {
            h,
            alpha_d,
            support_radius: h + h,
        })
    }

    #[inline]
    pub fn h(&self) -> T {
        self.h
    }

    #[inline]
    pub fn alpha_d(&self) -> T {
        self.alpha_d
    }

    /// Radius beyond which the kernel vanishes identically (`2h`).
    #[inline]
    pub fn support_radius(&self) -> T {
        self.support_radius
    }

    /// Kernel value `W(r, h)`.
    pub fn value(&self, r: T) -> T {
        let q = r / self.h;
        let one = T::one();
        let two = T::lit(2.0);
        let shape = if q < one {
            one - T::lit(1.5) * q * q + T::lit(0.75) * q * q * q
        } else if q < two {
            let s = two - q;
            T::lit(0.25) * s * s * s
        } else {
            T::zero()
        };
        self.alpha_d * shape
    }

    /// Radial derivative `dW/dr`.
    pub fn derivative(&self, r: T) -> T {
        let q = r / self.h;
        let one = T::one();
        let two = T::lit(2.0);
        let dshape = if q < one {
            -T::lit(3.0) * q + T::lit(2.25) * q * q
        } else if q < two {
            let s = two - q;
            -T::lit(0.75) * s * s
        } else {
            T::zero()
        };
        self.alpha_d * dshape / self.h
    }

    /// Raw gradient `∂W(x_i - x_j)/∂x_i` given `x_ij = x_i - x_j`.
    pub fn gradient(&self, x_ij: &SVector<T, D>) -> SVector<T, D> {
        let r = x_ij.norm();
        if r <= T::zero() || r >= self.support_radius {
            return SVector::zeros();
        }
        x_ij * (self.derivative(r) / r)
    }
}

/// Smallest mean diagonal of `A` that is still inverted. `A ≈ I` for a full
/// kernel support and `≈ I/2` on a flat free surface; a particle left with a
/// few weak bonds has a well-conditioned but tiny `A`, whose inverse would
/// amplify its remaining pair forces without bound.
pub const MIN_SUPPORT_COVERAGE: f64 = 0.1;

/// Per-particle correction `B = A⁻¹` of the kernel gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionMatrix<T: Real, const D: usize> {
    pub a: SMatrix<T, D, D>,
    pub b: SMatrix<T, D, D>,
    /// `A` was too close to singular; `b` is the identity.
    pub singular: bool,
}

impl<T: Real, const D: usize> CorrectionMatrix<T, D> {
    pub fn identity() -> Self {
        Self {
            a: SMatrix::identity(),
            b: SMatrix::identity(),
            singular: false,
        }
    }

    /// Inverts an assembled moment matrix, falling back to the identity when
    /// `|det A| < 1e-8 · (mean diagonal)^D` or when the mean diagonal is below
    /// [`MIN_SUPPORT_COVERAGE`].
    pub fn from_moment(a: SMatrix<T, D, D>) -> Self {
        let mean_diag = a.trace() / T::from_usize_lossy(D);
        let scale = mean_diag.powi(D as i32);
        let (det, inverse) = det_and_inverse(&a);
        let degenerate = !(mean_diag >= T::lit(MIN_SUPPORT_COVERAGE))
            || !det.is_finite()
            || det.abs() < T::lit(1e-8) * scale.abs();
        if !degenerate {
            if let Some(b) = inverse {
                return Self {
                    a,
                    b,
                    singular: false,
                };
            }
        }
        Self {
            a,
            b: SMatrix::identity(),
            singular: true,
        }
    }
}

/// One neighbour's contribution to the moment matrix of particle `i`.
#[derive(Debug, Clone, Copy)]
pub struct NeighborSample<T: Real, const D: usize> {
    /// `x_i - x_j`.
    pub x_ij: SVector<T, D>,
    /// `m_j / ρ_j`.
    pub volume: T,
    /// Bond interaction factor `f_ij`.
    pub factor: T,
}

/// Assembles `A = -Σ_j f_ij V_j x_ij ⊗ ∇W_ij` and inverts it.
pub fn correction_matrix<T: Real, const D: usize>(
    neighbors: impl IntoIterator<Item = NeighborSample<T, D>>,
    kernel: &KernelConfig<T, D>,
) -> CorrectionMatrix<T, D> {
    let mut a = SMatrix::<T, D, D>::zeros();
    for s in neighbors {
        if s.factor <= T::zero() {
            continue;
        }
        let grad = kernel.gradient(&s.x_ij);
        a -= (s.x_ij * grad.transpose()) * (s.volume * s.factor);
    }
    CorrectionMatrix::from_moment(a)
}

/// `W̄_ij = 0.5 (B_i + B_j) ∇W_ij`; antisymmetric under `i ↔ j`.
#[inline]
pub fn symmetrized_gradient<T: Real, const D: usize>(
    b_i: &SMatrix<T, D, D>,
    b_j: &SMatrix<T, D, D>,
    grad_ij: &SVector<T, D>,
) -> SVector<T, D> {
    ((b_i + b_j) * grad_ij) * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, Vector2, Vector3};
    use std::f64::consts::PI;

    fn lattice_2d(n: usize, dp: f64) -> Vec<Vector2<f64>> {
        let mut pts = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                pts.push(Vector2::new(ix as f64 * dp, iy as f64 * dp));
            }
        }
        pts
    }

    /// Brute-force correction matrix over every other point of the cloud.
    fn brute_correction(
        pts: &[Vector2<f64>],
        i: usize,
        vol: f64,
        k: &KernelConfig<f64, 2>,
    ) -> CorrectionMatrix<f64, 2> {
        let samples = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, xj)| {
            NeighborSample {
                x_ij: pts[i] - xj,
                volume: vol,
                factor: 1.0,
            }
        });
        correction_matrix(samples, k)
    }

    #[test]
    fn weakly_supported_particle_falls_back_to_identity() {
        let weak = SMatrix::<f64, 2, 2>::identity() * 0.05;
        let c = CorrectionMatrix::from_moment(weak);
        assert!(c.singular);
        assert_eq!(c.b, SMatrix::<f64, 2, 2>::identity());

        let surface = SMatrix::<f64, 2, 2>::from_diagonal(&SVector::<f64, 2>::new(1.0, 0.5));
        let c = CorrectionMatrix::from_moment(surface);
        assert!(!c.singular);
        assert!((c.b[(1, 1)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn value_at_origin_2d() {
        let k = KernelConfig::<f64, 2>::new(1.0).unwrap();
        assert_relative_eq!(k.value(0.0), 10.0 / (7.0 * PI), epsilon = 1e-15);
        assert_relative_eq!(k.value(0.0), 0.45473, epsilon = 1e-5);
    }

    #[test]
    fn value_at_q_one_and_support_edge() {
        let k = KernelConfig::<f64, 2>::new(1.0).unwrap();
        assert_relative_eq!(k.value(1.0), 0.25 * 10.0 / (7.0 * PI), epsilon = 1e-15);
        assert_relative_eq!(k.value(1.0), 0.11368, epsilon = 1e-5);
        for h in [1e-4, 0.3, 2.0] {
            let k = KernelConfig::<f64, 2>::new(h).unwrap();
            assert_eq!(k.value(2.0 * h), 0.0);
            assert_eq!(k.value(2.5 * h), 0.0);
            assert_eq!(k.support_radius(), 2.0 * h);
        }
    }

    #[test]
    fn normalisation_constants() {
        let h = 0.25e-3;
        let k2 = KernelConfig::<f64, 2>::new(h).unwrap();
        let k3 = KernelConfig::<f64, 3>::new(h).unwrap();
        assert_relative_eq!(k2.alpha_d(), 10.0 / (7.0 * PI * h * h), max_relative = 1e-14);
        assert_relative_eq!(k3.alpha_d(), 1.0 / (PI * h * h * h), max_relative = 1e-14);
        assert_eq!(
            KernelConfig::<f64, 4>::new(1.0).unwrap_err(),
            KernelError::Dimension(4)
        );
        assert!(KernelConfig::<f64, 2>::new(0.0).is_err());
    }

    #[test]
    fn monotone_nonincreasing() {
        let k = KernelConfig::<f64, 3>::new(0.7).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..=300 {
            let w = k.value(n as f64 * 0.005);
            assert!(w >= 0.0);
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let k = KernelConfig::<f64, 2>::new(1.0).unwrap();
        let x = Vector2::new(0.5, 0.0);
        let g = k.gradient(&x);
        let eps = 1e-6;
        for axis in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += eps;
            xm[axis] -= eps;
            let fd = (k.value(xp.norm()) - k.value(xm.norm())) / (2.0 * eps);
            if axis == 0 {
                assert_relative_eq!(g[axis], fd, max_relative = 1e-6);
            } else {
                assert!((g[axis] - fd).abs() < 1e-9);
            }
        }
        // q > 1 branch, off-axis
        let x = Vector2::new(0.9, -0.8);
        let g = k.gradient(&x);
        for axis in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += eps;
            xm[axis] -= eps;
            let fd = (k.value(xp.norm()) - k.value(xm.norm())) / (2.0 * eps);
            assert_relative_eq!(g[axis], fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn gradient_zero_at_origin_and_outside_support() {
        let k = KernelConfig::<f64, 3>::new(1.0).unwrap();
        assert_eq!(k.gradient(&Vector3::zeros()), Vector3::zeros());
        assert_eq!(k.gradient(&Vector3::new(2.0, 0.0, 0.0)), Vector3::zeros());
        assert_eq!(k.gradient(&Vector3::new(1.5, 1.5, 0.0)), Vector3::zeros());
        let x = Vector3::new(0.3, -0.2, 0.7);
        assert_eq!(k.gradient(&x), -k.gradient(&(-x)));
    }

    #[test]
    fn isolated_particle_is_singular() {
        let k = KernelConfig::<f64, 2>::new(1.0).unwrap();
        let c = correction_matrix(std::iter::empty(), &k);
        assert!(c.singular);
        assert_eq!(c.b, Matrix2::identity());
    }

    #[test]
    fn row_of_particles_is_rank_deficient() {
        let k = KernelConfig::<f64, 2>::new(1.0).unwrap();
        let pts: Vec<_> = (0..9).map(|i| Vector2::new(i as f64 * 0.5, 0.0)).collect();
        let c = brute_correction(&pts, 4, 0.25, &k);
        assert_eq!(c.a[(1, 1)], 0.0);
        assert_eq!(c.a[(0, 1)], 0.0);
        assert!(c.singular);
        assert_eq!(c.b, Matrix2::identity());
    }

    #[test]
    fn corrected_gradient_of_linear_field_on_lattice() {
        let dp = 0.5;
        let k = KernelConfig::<f64, 2>::new(1.3 * dp).unwrap();
        let pts = lattice_2d(9, dp);
        let vol = dp * dp;
        let centre = 4 * 9 + 4;
        let c = brute_correction(&pts, centre, vol, &k);
        assert!(!c.singular);
        let mut grad = Vector2::zeros();
        for (j, xj) in pts.iter().enumerate() {
            if j == centre {
                continue;
            }
            let x_ij = pts[centre] - xj;
            let df = xj.x - pts[centre].x;
            grad += c.b * k.gradient(&x_ij) * (vol * df);
        }
        assert!((grad.x - 1.0).abs() < 1e-10, "{grad}");
        assert!(grad.y.abs() < 1e-10);
    }

    #[test]
    fn symmetrized_gradient_antisymmetry_and_identity_limit() {
        let k = KernelConfig::<f64, 2>::new(1.0).unwrap();
        let b_i = Matrix2::new(1.1, 0.05, 0.05, 0.93);
        let b_j = Matrix2::new(0.97, -0.02, -0.02, 1.2);
        let x_ij = Vector2::new(0.4, -0.7);
        let g_ij = symmetrized_gradient(&b_i, &b_j, &k.gradient(&x_ij));
        let g_ji = symmetrized_gradient(&b_j, &b_i, &k.gradient(&(-x_ij)));
        assert_eq!(g_ij + g_ji, Vector2::zeros());
        let id = Matrix2::identity();
        assert_eq!(symmetrized_gradient(&id, &id, &k.gradient(&x_ij)), k.gradient(&x_ij));
    }

    #[test]
    fn divergence_of_linear_velocity_with_symmetrized_gradient() {
        // Particles deep enough in the lattice share the same B, so the
        // symmetrized operator inherits first-order consistency.
        let dp = 1.0;
        let n = 15;
        let k = KernelConfig::<f64, 2>::new(1.5 * dp).unwrap();
        let pts = lattice_2d(n, dp);
        let vol = dp * dp;
        let bs: Vec<_> = (0..pts.len())
            .map(|i| brute_correction(&pts, i, vol, &k).b)
            .collect();
        let centre = 7 * n + 7;
        let mut div = 0.0;
        for (j, xj) in pts.iter().enumerate() {
            if j == centre {
                continue;
            }
            let x_ij = pts[centre] - xj;
            let wbar = symmetrized_gradient(&bs[centre], &bs[j], &k.gradient(&x_ij));
            // u = (x, 0); div u = -Σ V_j u_ij · W̄_ij
            div -= vol * (pts[centre].x - xj.x) * wbar.x;
        }
        assert!((div - 1.0).abs() < 1e-8, "{div}");
    }

    #[test]
    fn partition_of_unity_on_lattice() {
        for ratio in [1.3, 1.5, 2.0] {
            let dp = 1.0;
            let n = 13;
            let k = KernelConfig::<f64, 2>::new(ratio * dp).unwrap();
            let pts = lattice_2d(n, dp);
            let centre = 6 * n + 6;
            let sum: f64 = pts
                .iter()
                .map(|xj| dp * dp * k.value((pts[centre] - xj).norm()))
                .sum();
            assert!((sum - 1.0).abs() < 0.02, "h/dp={ratio}: {sum}");
        }
    }

    #[test]
    fn quadrature_normalisation_2d_3d() {
        // Radial quadrature: ∫ W dV = ∫_0^{2h} W(r) S_d(r) dr with fine Simpson.
        let h = 0.8;
        let k2 = KernelConfig::<f64, 2>::new(h).unwrap();
        let k3 = KernelConfig::<f64, 3>::new(h).unwrap();
        let n = 4000;
        let dr = 2.0 * h / n as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut s = f(0.0) + f(2.0 * h);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(i as f64 * dr);
            }
            s * dr / 3.0
        };
        let i2 = simpson(&|r| k2.value(r) * 2.0 * PI * r);
        let i3 = simpson(&|r| k3.value(r) * 4.0 * PI * r * r);
        assert!((i2 - 1.0).abs() < 1e-3, "{i2}");
        assert!((i3 - 1.0).abs() < 1e-3, "{i3}");
    }

    #[test]
    fn single_precision_instantiation() {
        let k = KernelConfig::<f32, 2>::new(1.0).unwrap();
        assert!((k.value(0.0) - 0.454_73).abs() < 1e-5);
    }
}
