//! Boundary conditions: applied stress, prescribed velocity, mirror symmetry
//! and rigid walls.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use crate::num::Real;

/// Oriented plane `normal · x = offset`; `normal` points into the material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane<T: Real, const D: usize> {
    pub normal: SVector<T, D>,
    pub offset: T,
}

impl<T: Real, const D: usize> Plane<T, D> {
    pub fn new(normal: SVector<T, D>, offset: T) -> Self {
        let n = normal.norm();
        Self {
            normal: normal / n,
            offset: offset / n,
        }
    }

    pub fn axis(axis: usize, value: T, positive_side: bool) -> Self {
        let mut normal = SVector::zeros();
        normal[axis] = if positive_side { T::one() } else { -T::one() };
        Self::new(normal, if positive_side { value } else { -value })
    }

    /// Signed distance, positive on the material side.
    #[inline]
    pub fn distance(&self, x: &SVector<T, D>) -> T {
        self.normal.dot(x) - self.offset
    }

    pub fn reflect_point(&self, x: &SVector<T, D>) -> SVector<T, D> {
        x - self.normal * (self.distance(x) * T::lit(2.0))
    }

    pub fn reflect_vector(&self, v: &SVector<T, D>) -> SVector<T, D> {
        v - self.normal * (self.normal.dot(v) * T::lit(2.0))
    }

    /// `R M R` with `R = I - 2 n nᵀ` for a `D×D` tensor.
    pub fn reflect_tensor_d(&self, m: &SMatrix<T, D, D>) -> SMatrix<T, D, D> {
        let r = SMatrix::<T, D, D>::identity() - self.normal * self.normal.transpose() * T::lit(2.0);
        r * m * r
    }

    /// `R M R` for a 3×3 tensor, with the plane normal embedded in 3D.
    pub fn reflect_tensor(&self, m: &Matrix3<T>) -> Matrix3<T> {
        let mut n = Vector3::zeros();
        for d in 0..D.min(3) {
            n[d] = self.normal[d];
        }
        let r = Matrix3::identity() - n * n.transpose() * T::lit(2.0);
        r * m * r
    }
}

/// Prescribed velocity as a function of reference and current position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityField<T: Real, const D: usize> {
    Constant(SVector<T, D>),
    /// Tangential field `u = sense · u_max (r/R) sin((θ + π/2)/2)` about an
    /// axis, with `θ ∈ [-π/2, 3π/2)` the reference azimuth measured from `e1`
    /// towards `e2`.
    Torsion {
        origin: SVector<T, D>,
        axis: SVector<T, D>,
        e1: SVector<T, D>,
        e2: SVector<T, D>,
        u_max: T,
        radius: T,
        sense: T,
    },
}

impl<T: Real, const D: usize> VelocityField<T, D> {
    pub fn velocity(&self, x0: &SVector<T, D>, x: &SVector<T, D>) -> SVector<T, D> {
        match *self {
            Self::Constant(v) => v,
            Self::Torsion {
                origin,
                axis,
                e1,
                e2,
                u_max,
                radius,
                sense,
            } => {
                let theta = reference_azimuth(&(x0 - origin), &e1, &e2);
                let amplitude = u_max * ((theta + T::frac_pi_2()) * T::lit(0.5)).sin();
                let r = x - origin;
                let radial = r - axis * r.dot(&axis);
                let rad = radial.norm();
                if rad <= T::zero() {
                    return SVector::zeros();
                }
                let phi = radial.dot(&e2).atan2(radial.dot(&e1));
                let tangent = e1 * (-phi.sin()) + e2 * phi.cos();
                tangent * (sense * amplitude * rad / radius)
            }
        }
    }
}

/// Azimuth of `r` in `[-π/2, 3π/2)`.
pub fn reference_azimuth<T: Real, const D: usize>(r: &SVector<T, D>, e1: &SVector<T, D>, e2: &SVector<T, D>) -> T {
    let mut theta = r.dot(e2).atan2(r.dot(e1));
    if theta < -T::frac_pi_2() {
        theta += T::two_pi();
    }
    theta
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition<T: Real, const D: usize> {
    /// Applied boundary stress `σ0` on the listed particles, ramped linearly
    /// over `ramp_time` (zero means a step load).
    AppliedStress {
        particles: Vec<usize>,
        stress: SMatrix<T, D, D>,
        ramp_time: T,
    },
    /// Velocity override on the listed particles, scaled up linearly from
    /// rest over `ramp_time` (zero means an impulsive start).
    PrescribedVelocity {
        particles: Vec<usize>,
        field: VelocityField<T, D>,
        ramp_time: T,
    },
    /// Mirror images of particles within the kernel support of the plane.
    Symmetry { plane: Plane<T, D> },
    /// Frictionless, perfectly inelastic non-penetration.
    RigidWall { plane: Plane<T, D> },
}

/// Load multiplier for a linear ramp.
#[inline]
pub fn ramp_factor<T: Real>(t: T, ramp_time: T) -> T {
    if ramp_time <= T::zero() {
        T::one()
    } else {
        (t / ramp_time).min(T::one()).max(T::zero())
    }
}

/// Projects a penetrating particle back onto the wall and removes its
/// inward normal velocity. Returns `true` if anything changed.
pub fn apply_rigid_wall<T: Real, const D: usize>(
    plane: &Plane<T, D>,
    x: &mut SVector<T, D>,
    u: &mut SVector<T, D>,
) -> bool {
    let s = plane.distance(x);
    if s >= T::zero() {
        return false;
    }
    *x -= plane.normal * s;
    let un = plane.normal.dot(u);
    if un < T::zero() {
        *u -= plane.normal * un;
    }
    true
}
