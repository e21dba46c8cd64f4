//! Constitutive response, pairwise stabilisation and damage criteria.
//!
//! Tensors are always stored as 3×3. Two-dimensional runs embed the in-plane
//! velocity gradient with zero out-of-plane rows (plane strain), which keeps
//! the deviatoric stress exactly traceless.

use nalgebra::{Matrix3, SVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("invalid material parameter {name} = {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("Johnson-Cook criterion selected but no Johnson-Cook parameters given")]
    MissingJohnsonCook,
}

/// Which accumulated quantity the maximum principal strain criterion reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrainMeasure {
    /// Maximum principal value of `∫ ε̇ dt`.
    #[default]
    Accumulated,
    /// Maximum principal Cauchy stress divided by `E`.
    StressOverModulus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DamageCriterion<T: Real> {
    None,
    MaxPrincipalStrain { eps_max: T, measure: StrainMeasure },
    MaxPrincipalStress { sigma_max: T },
    /// Bond level: `(r - r0) / r0 > delta_tc` breaks the spring.
    CriticalStretch { delta_tc: T },
    /// Cumulative `Σ Δε_pl / ε_f` with the Johnson-Cook failure strain.
    JohnsonCook,
}

/// Standard five-parameter Johnson-Cook flow and failure model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JohnsonCook<T: Real> {
    pub a: T,
    pub b: T,
    pub n: T,
    pub c: T,
    pub m: T,
    pub ref_strain_rate: T,
    pub t_room: T,
    pub t_melt: T,
    pub d1: T,
    pub d2: T,
    pub d3: T,
    pub d4: T,
    pub d5: T,
    /// J/(kg K), used for adiabatic heating from plastic work.
    pub specific_heat: T,
    pub taylor_quinney: T,
}

impl<T: Real> JohnsonCook<T> {
    fn homologous(&self, temperature: T) -> T {
        let t = (temperature - self.t_room) / (self.t_melt - self.t_room);
        t.max(T::zero()).min(T::one())
    }

    fn rate_ratio(&self, rate: T) -> T {
        (rate / self.ref_strain_rate).max(T::one())
    }

    /// `(A + B ε_pl^n)(1 + C ln ε̇*)(1 - T*^m)`.
    pub fn flow_stress(&self, eps_pl: T, rate: T, temperature: T) -> T {
        let hardening = self.a + self.b * eps_pl.max(T::zero()).powf(self.n);
        let rate_term = T::one() + self.c * self.rate_ratio(rate).ln();
        let t_star = self.homologous(temperature);
        let thermal = if t_star > T::zero() {
            T::one() - t_star.powf(self.m)
        } else {
            T::one()
        };
        hardening * rate_term * thermal
    }

    /// `(D1 + D2 exp(D3 σ*))(1 + D4 ln ε̇*)(1 + D5 T*)`, floored at a small positive value.
    pub fn failure_strain(&self, triaxiality: T, rate: T, temperature: T) -> T {
        let eps_f = (self.d1 + self.d2 * (self.d3 * triaxiality).exp())
            * (T::one() + self.d4 * self.rate_ratio(rate).ln())
            * (T::one() + self.d5 * self.homologous(temperature));
        eps_f.max(T::lit(1e-6))
    }
}

/// Isotropic elastic constants plus yield and damage parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T: Real> {
    pub rho0: T,
    pub youngs: T,
    pub poisson: T,
    pub bulk: T,
    pub shear: T,
    pub yield_stress: Option<T>,
    pub criterion: DamageCriterion<T>,
    pub jc: Option<JohnsonCook<T>>,
}

impl<T: Real> Material<T> {
    pub fn elastic(rho0: T, youngs: T, poisson: T) -> Result<Self, MaterialError> {
        let check = |name, v: T, ok: bool| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(MaterialError::Parameter {
                    name,
                    value: v.as_f64(),
                })
            }
        };
        check("rho0", rho0, rho0 > T::zero())?;
        check("E", youngs, youngs > T::zero())?;
        check("nu", poisson, poisson > -T::one() && poisson < T::lit(0.5))?;
        let two = T::lit(2.0);
        Ok(Self {
            rho0,
            youngs,
            poisson,
            bulk: youngs / (T::lit(3.0) * (T::one() - two * poisson)),
            shear: youngs / (two * (T::one() + poisson)),
            yield_stress: None,
            criterion: DamageCriterion::None,
            jc: None,
        })
    }

    pub fn with_criterion(mut self, criterion: DamageCriterion<T>) -> Result<Self, MaterialError> {
        if criterion == DamageCriterion::JohnsonCook && self.jc.is_none() {
            return Err(MaterialError::MissingJohnsonCook);
        }
        self.criterion = criterion;
        Ok(self)
    }

    pub fn with_yield_stress(mut self, sigma_y: T) -> Self {
        self.yield_stress = Some(sigma_y);
        self
    }

    pub fn with_johnson_cook(mut self, jc: JohnsonCook<T>) -> Self {
        self.jc = Some(jc);
        self
    }

    /// `C = √(E/ρ)`.
    #[inline]
    pub fn sound_speed(&self, rho: T) -> T {
        (self.youngs / rho).sqrt()
    }

    /// Current yield stress, if the material is plastic.
    pub fn flow_stress(&self, state: &StressState<T>) -> Option<T> {
        match (&self.jc, self.yield_stress) {
            (Some(jc), _) => Some(jc.flow_stress(state.eps_pl, state.eps_pl_rate, state.temperature)),
            (None, y) => y,
        }
    }
}

/// Per-particle constitutive state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressState<T: Real> {
    /// Deviatoric stress.
    pub s: Matrix3<T>,
    /// Pressure, positive in compression.
    pub p: T,
    /// `∫ ε̇ dt`.
    pub eps_total: Matrix3<T>,
    pub eps_pl: T,
    pub eps_pl_rate: T,
    /// Plastic work density.
    pub w_p: T,
    pub temperature: T,
    pub damage: T,
}

impl<T: Real> StressState<T> {
    pub fn new(temperature: T) -> Self {
        Self {
            s: Matrix3::zeros(),
            p: T::zero(),
            eps_total: Matrix3::zeros(),
            eps_pl: T::zero(),
            eps_pl_rate: T::zero(),
            w_p: T::zero(),
            temperature,
            damage: T::zero(),
        }
    }

    /// `σ = S - P δ`.
    #[inline]
    pub fn cauchy(&self) -> Matrix3<T> {
        self.s - Matrix3::identity() * self.p
    }

    /// `√(3 J2)`.
    #[inline]
    pub fn von_mises(&self) -> T {
        von_mises(&self.s)
    }
}

impl<T: Real> Default for StressState<T> {
    fn default() -> Self {
        Self::new(T::lit(293.0))
    }
}

/// `√(3 J2)` with `J2 = ½ S:S`.
#[inline]
pub fn von_mises<T: Real>(s: &Matrix3<T>) -> T {
    (T::lit(1.5) * s.dot(s)).sqrt()
}

/// `P = K (ρ/ρ0 - 1)`.
#[inline]
pub fn eos_pressure<T: Real>(rho: T, mat: &Material<T>) -> T {
    mat.bulk * (rho / mat.rho0 - T::one())
}

/// Embeds a `D×D` velocity gradient into 3×3.
pub fn embed<T: Real, const D: usize>(l: &nalgebra::SMatrix<T, D, D>) -> Matrix3<T> {
    let mut m = Matrix3::zeros();
    for a in 0..D {
        for b in 0..D {
            m[(a, b)] = l[(a, b)];
        }
    }
    m
}

/// Upper-left `D×D` block.
pub fn restrict<T: Real, const D: usize>(m: &Matrix3<T>) -> nalgebra::SMatrix<T, D, D> {
    nalgebra::SMatrix::from_fn(|a, b| m[(a, b)])
}

/// Splits `L = ∂u/∂x` into strain rate and spin.
pub fn strain_rate_and_spin<T: Real>(l: &Matrix3<T>) -> (Matrix3<T>, Matrix3<T>) {
    let half = T::lit(0.5);
    let lt = l.transpose();
    ((l + lt) * half, (l - lt) * half)
}

/// `Ṡ = 2μ(ε̇ - ⅓ δ tr ε̇) + S ωᵀ + ω S`.
pub fn jaumann_deviatoric_rate<T: Real>(
    s: &Matrix3<T>,
    strain_rate: &Matrix3<T>,
    spin: &Matrix3<T>,
    shear: T,
) -> Matrix3<T> {
    let vol = strain_rate.trace() / T::lit(3.0);
    let dev = strain_rate - Matrix3::identity() * vol;
    dev * (shear + shear) + s * spin.transpose() + spin * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnMapping<T: Real> {
    pub s: Matrix3<T>,
    pub scale: T,
    pub d_eps_pl: T,
    pub d_w_p: T,
}

/// Wilkins radial return onto the von Mises surface.
pub fn von_mises_return<T: Real>(s_trial: &Matrix3<T>, sigma_y: T, shear: T) -> ReturnMapping<T> {
    let ss = s_trial.dot(s_trial);
    let eq = (T::lit(1.5) * ss).sqrt();
    if !(eq > sigma_y) || ss <= T::zero() {
        return ReturnMapping {
            s: *s_trial,
            scale: T::one(),
            d_eps_pl: T::zero(),
            d_w_p: T::zero(),
        };
    }
    let c_f = sigma_y / eq;
    let one_minus = T::one() - c_f;
    ReturnMapping {
        s: s_trial * c_f,
        scale: c_f,
        d_eps_pl: one_minus / (T::lit(3.0) * shear) * eq,
        // Δε^{αβ} S_n^{αβ} = (1 - c_f)/(2μ) c_f S:S
        d_w_p: one_minus / (shear + shear) * c_f * ss,
    }
}

/// Largest eigenvalue of a symmetric 3×3 tensor.
pub fn max_principal<T: Real>(m: &Matrix3<T>) -> T {
    let sym = (m + m.transpose()) * T::lit(0.5);
    sym.symmetric_eigenvalues().max()
}

#[inline]
fn indicator<T: Real>(hit: bool) -> T {
    if hit {
        T::one()
    } else {
        T::zero()
    }
}

/// `D = 1` iff the maximum principal accumulated strain is `>= eps_max`.
pub fn damage_principal_strain<T: Real>(eps_total: &Matrix3<T>, eps_max: T) -> T {
    indicator(max_principal(eps_total) >= eps_max)
}

/// `D = 1` iff the maximum principal Cauchy stress is `>= sigma_max`.
pub fn damage_principal_stress<T: Real>(sigma: &Matrix3<T>, sigma_max: T) -> T {
    indicator(max_principal(sigma) >= sigma_max)
}

/// Stretch `(r - r0) / r0`.
#[inline]
pub fn stretch<T: Real>(r: T, r0: T) -> T {
    (r - r0) / r0
}

/// `D = 1` iff the stretch exceeds `delta_tc`.
#[inline]
pub fn damage_critical_stretch<T: Real>(r: T, r0: T, delta_tc: T) -> T {
    indicator(stretch(r, r0) > delta_tc)
}

/// Pair quantities entering the artificial viscosity.
#[derive(Debug, Clone, Copy)]
pub struct PairState<T: Real, const D: usize> {
    pub x_ij: SVector<T, D>,
    pub u_ij: SVector<T, D>,
    pub c_i: T,
    pub c_j: T,
    pub rho_i: T,
    pub rho_j: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Viscosity<T: Real> {
    pub beta1: T,
    pub beta2: T,
}

impl<T: Real> Default for Viscosity<T> {
    fn default() -> Self {
        Self {
            beta1: T::one(),
            beta2: T::one(),
        }
    }
}

/// `π_ij = (-β1 C̄ μ_ij + β2 μ_ij²)/ρ̄` on approach, else 0.
pub fn artificial_viscosity<T: Real, const D: usize>(pair: &PairState<T, D>, h: T, visc: &Viscosity<T>) -> T {
    let ux = pair.u_ij.dot(&pair.x_ij);
    if ux > T::zero() {
        return T::zero();
    }
    let half = T::lit(0.5);
    let mu = h * ux / (pair.x_ij.norm_squared() + T::lit(0.01) * h * h);
    let c_bar = half * (pair.c_i + pair.c_j);
    let rho_bar = half * (pair.rho_i + pair.rho_j);
    (-visc.beta1 * c_bar * mu + visc.beta2 * mu * mu) / rho_bar
}

/// Monaghan artificial pressure `γ (|P_i|/ρ_i² + |P_j|/ρ_j²) [W(Δx)/W(Δp)]^l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtificialPressure<T: Real> {
    /// `W(Δp, h)`.
    pub w_ref: T,
    pub exponent: i32,
    pub gamma_tension: T,
    pub gamma_compression: T,
}

impl<T: Real> ArtificialPressure<T> {
    pub fn new(w_ref: T) -> Self {
        Self {
            w_ref,
            exponent: 4,
            gamma_tension: T::lit(0.3),
            gamma_compression: T::lit(0.01),
        }
    }

    /// The pair counts as in tension when `P_i + P_j < 0`.
    pub fn evaluate(&self, p_i: T, p_j: T, rho_i: T, rho_j: T, w_current: T) -> T {
        let gamma = if p_i + p_j < T::zero() {
            self.gamma_tension
        } else {
            self.gamma_compression
        };
        let ratio = (w_current / self.w_ref).powi(self.exponent);
        gamma * (p_i.abs() / (rho_i * rho_i) + p_j.abs() / (rho_j * rho_j)) * ratio
    }
}
