//! Discrete conservation laws, boundary conditions and time integration.

pub mod audit;
pub mod boundary;
pub mod rhs;

use nalgebra::{Matrix3, SMatrix, SVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::bonds::{BondError, BondNetwork, CrackRecord, Seam};
use crate::kernel::{KernelConfig, KernelError};
use crate::material::{
    damage_critical_stretch, damage_principal_strain, damage_principal_stress, eos_pressure, jaumann_deviatoric_rate,
    max_principal, strain_rate_and_spin, von_mises_return, ArtificialPressure, DamageCriterion, Material, StrainMeasure,
    StressState, Viscosity,
};
use crate::num::Real;

pub use audit::{AuditRow, AUDIT_CSV_HEADER};
pub use boundary::{apply_rigid_wall, ramp_factor, BoundaryCondition, Plane, VelocityField};
pub use rhs::Rates;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Bond(#[from] BondError),
    #[error("step {step}, t = {t:e}: particle {particle} {what}")]
    Unstable {
        step: usize,
        t: f64,
        particle: usize,
        what: &'static str,
    },
}

/// Mirror image bookkeeping for symmetry planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhostLink {
    pub source: usize,
    pub plane: usize,
}

/// A Lagrangian SPH particle.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle<T: Real, const D: usize> {
    pub x: SVector<T, D>,
    pub u: SVector<T, D>,
    /// Reference position.
    pub x0: SVector<T, D>,
    pub rho: T,
    pub m: T,
    /// Specific internal energy.
    pub e: T,
    pub stress: StressState<T>,
    pub ghost: Option<GhostLink>,
    /// Velocity is prescribed by a boundary condition.
    pub driven: bool,
}

impl<T: Real, const D: usize> Particle<T, D> {
    pub fn new(x: SVector<T, D>, m: T, rho: T) -> Self {
        Self {
            x,
            u: SVector::zeros(),
            x0: x,
            rho,
            m,
            e: T::zero(),
            stress: StressState::default(),
            ghost: None,
            driven: false,
        }
    }

    #[inline]
    pub fn damage(&self) -> T {
        self.stress.damage
    }
}

/// Which gradient the applied-stress term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressBcGradient {
    /// Uncorrected `W_ij,β`.
    #[default]
    Raw,
    Corrected,
}

/// How the applied-stress term weights each neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressBcForm {
    /// `m_j σ0 (1/ρ_i² + 1/ρ_j²)`, matching the symmetric momentum sum; a
    /// uniform band then carries the full traction `σ0`.
    #[default]
    Symmetric,
    /// `m_j σ0 / (ρ_i ρ_j)`; delivers `σ0 / 2` against the symmetric sum.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T: Real> {
    /// CFL number `c_s`.
    pub cfl: T,
    pub viscosity: Viscosity<T>,
    pub artificial_pressure: bool,
    pub stress_bc_gradient: StressBcGradient,
    pub stress_bc_form: StressBcForm,
    /// Overrides the CFL step when set.
    pub fixed_dt: Option<T>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            cfl: T::lit(0.3),
            viscosity: Viscosity::default(),
            artificial_pressure: true,
            stress_bc_gradient: StressBcGradient::Raw,
            stress_bc_form: StressBcForm::Symmetric,
            fixed_dt: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimState<T: Real, const D: usize> {
    pub particles: Vec<Particle<T, D>>,
    pub network: BondNetwork<T>,
    pub t: T,
    pub step: usize,
    pub dt: T,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct StressLoad<T: Real, const D: usize> {
    pub particles: Vec<usize>,
    pub stress: SMatrix<T, D, D>,
    pub ramp_time: T,
}

#[derive(Debug, Clone, PartialEq)]
struct VelocityLoad<T: Real, const D: usize> {
    particles: Vec<usize>,
    field: VelocityField<T, D>,
    ramp_time: T,
}

/// Result of one predictor-corrector step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport<T: Real, const D: usize> {
    pub dt: T,
    /// Real particles whose correction matrix fell back to the identity.
    pub singular_corrections: usize,
    pub newly_broken: Vec<CrackRecord<T, D>>,
}

/// A configured pseudo-spring SPH simulation.
#[derive(Debug, Clone)]
pub struct Simulation<T: Real, const D: usize> {
    pub state: SimState<T, D>,
    pub material: Material<T>,
    pub kernel: KernelConfig<T, D>,
    /// Reference particle spacing.
    pub dp: T,
    pub config: SolverConfig<T>,
    n_real: usize,
    art_pressure: ArtificialPressure<T>,
    pub(crate) stress_loads: Vec<StressLoad<T, D>>,
    velocity_loads: Vec<VelocityLoad<T, D>>,
    walls: Vec<Plane<T, D>>,
    pub(crate) ghost_planes: Vec<Plane<T, D>>,
}

impl<T: Real, const D: usize> Simulation<T, D> {
    /// Builds ghosts for symmetry planes, the pseudo-spring network (minus
    /// bonds cut by `seams`) and resolves boundary-condition regions.
    pub fn new(
        mut particles: Vec<Particle<T, D>>,
        material: Material<T>,
        kernel: KernelConfig<T, D>,
        dp: T,
        seams: &[Seam<T, D>],
        bcs: Vec<BoundaryCondition<T, D>>,
        config: SolverConfig<T>,
    ) -> Result<Self, SimError> {
        if particles.is_empty() {
            return Err(SimError::Setup("no particles".into()));
        }
        if !(dp > T::zero()) {
            return Err(SimError::Setup("particle spacing must be positive".into()));
        }
        if particles.iter().any(|p| p.ghost.is_some()) {
            return Err(SimError::Setup("input particles must not be ghosts".into()));
        }
        let n_real = particles.len();
        let mut stress_loads = Vec::new();
        let mut velocity_loads = Vec::new();
        let mut walls = Vec::new();
        let mut ghost_planes = Vec::new();
        for bc in bcs {
            match bc {
                BoundaryCondition::AppliedStress {
                    particles: sel,
                    stress,
                    ramp_time,
                } => {
                    check_selection(&sel, n_real)?;
                    stress_loads.push(StressLoad {
                        particles: sel,
                        stress,
                        ramp_time,
                    });
                }
                BoundaryCondition::PrescribedVelocity {
                    particles: sel,
                    field,
                    ramp_time,
                } => {
                    check_selection(&sel, n_real)?;
                    for &i in &sel {
                        if particles[i].driven {
                            return Err(SimError::Setup(format!("particle {i} in two velocity regions")));
                        }
                        particles[i].driven = true;
                        particles[i].u = field.velocity(&particles[i].x0, &particles[i].x) * ramp_factor(T::zero(), ramp_time);
                    }
                    velocity_loads.push(VelocityLoad {
                        particles: sel,
                        field,
                        ramp_time,
                    });
                }
                BoundaryCondition::Symmetry { plane } => ghost_planes.push(plane),
                BoundaryCondition::RigidWall { plane } => walls.push(plane),
            }
        }

        let radius = kernel.support_radius();
        let mut all_seams = seams.to_vec();
        for (k, plane) in ghost_planes.iter().enumerate() {
            for s in seams {
                all_seams.push(mirror_seam(s, plane));
            }
            for i in 0..n_real {
                let d = plane.distance(&particles[i].x);
                if d < T::zero() {
                    return Err(SimError::Setup(format!("particle {i} lies behind symmetry plane {k}")));
                }
                if d < radius {
                    let mut g = particles[i].clone();
                    g.x = plane.reflect_point(&g.x);
                    g.x0 = plane.reflect_point(&g.x0);
                    g.ghost = Some(GhostLink { source: i, plane: k });
                    g.driven = false;
                    particles.push(g);
                }
            }
        }
        let positions: Vec<_> = particles.iter().map(|p| p.x).collect();
        let full = BondNetwork::build(&positions, &kernel, &all_seams)?;
        let network = if particles.len() > n_real {
            let bonds = full.bonds().iter().filter(|b| b.i < n_real).copied().collect();
            BondNetwork::from_bonds(particles.len(), bonds)
        } else {
            full
        };
        let art_pressure = ArtificialPressure::new(kernel.value(dp));
        let mut sim = Self {
            state: SimState {
                particles,
                network,
                t: T::zero(),
                step: 0,
                dt: T::zero(),
            },
            material,
            kernel,
            dp,
            config,
            n_real,
            art_pressure,
            stress_loads,
            velocity_loads,
            walls,
            ghost_planes,
        };
        let mut ps = std::mem::take(&mut sim.state.particles);
        sim.refresh_ghosts(&mut ps);
        sim.state.particles = ps;
        Ok(sim)
    }

    /// Number of real (non-ghost) particles; they occupy the leading indices.
    pub fn n_real(&self) -> usize {
        self.n_real
    }

    pub fn real_particles(&self) -> &[Particle<T, D>] {
        &self.state.particles[..self.n_real]
    }

    /// Bonds between two real particles.
    pub fn is_real_bond(&self, idx: usize) -> bool {
        self.state.network.bond(idx).j < self.n_real
    }

    pub fn broken_bonds(&self) -> usize {
        self.state
            .network
            .bonds()
            .iter()
            .filter(|b| b.j < self.n_real && b.is_broken())
            .count()
    }

    pub fn broken_fraction(&self, i: usize) -> T {
        self.state.network.broken_bond_fraction(i)
    }

    /// Stable step `min_i c_s h / (C_i + |u_i|)`.
    pub fn cfl_timestep(&self) -> T {
        if let Some(dt) = self.config.fixed_dt {
            return dt;
        }
        let h = self.kernel.h();
        let cfl = self.config.cfl;
        self.real_particles()
            .iter()
            .map(|p| cfl * h / (self.material.sound_speed(p.rho) + p.u.norm()))
            .fold(T::max_value().unwrap_or_else(|| T::lit(f64::MAX)), |a, b| a.min(b))
    }

    /// One predictor-corrector step under the CFL limit.
    pub fn step(&mut self) -> Result<StepReport<T, D>, SimError> {
        let dt = self.cfl_timestep();
        self.step_with(dt)
    }

    /// One predictor-corrector step of size `dt`: midpoint rates, then plastic
    /// return, EOS, particle damage, bond commit and boundary conditions.
    pub fn step_with(&mut self, dt: T) -> Result<StepReport<T, D>, SimError> {
        let half_dt = dt * T::lit(0.5);
        let t0 = self.state.t;
        let base = std::mem::take(&mut self.state.particles);

        let (r0, _) = self.evaluate_rates(&base, t0);
        let mut mid = base.clone();
        self.advance(&mut mid, &base, &base, &r0, half_dt);
        self.prescribe_velocities(&mut mid, t0 + half_dt);
        self.refresh_ghosts(&mut mid);

        let (r1, singular) = self.evaluate_rates(&mid, t0 + half_dt);
        let mut next = base.clone();
        self.advance(&mut next, &base, &mid, &r1, dt);
        drop(base);
        drop(mid);

        let t1 = t0 + dt;
        self.constitutive_update(&mut next, dt);
        self.refresh_ghosts(&mut next);
        let broken = self.commit_damage(&mut next);
        self.prescribe_velocities(&mut next, t0 + dt);
        for wall in &self.walls {
            for p in next[..self.n_real].iter_mut() {
                apply_rigid_wall(wall, &mut p.x, &mut p.u);
            }
        }
        self.refresh_ghosts(&mut next);

        let step = self.state.step + 1;
        let check = next[..self.n_real].iter().position(|p| {
            !(p.rho > T::zero())
                || !p.rho.is_finite()
                || !p.x.iter().all(|v| v.is_finite())
                || !p.u.iter().all(|v| v.is_finite())
                || !p.e.is_finite()
        });
        self.state.particles = next;
        if let Some(i) = check {
            let p = &self.state.particles[i];
            let what = if !(p.rho > T::zero()) {
                "has non-positive density"
            } else {
                "has a non-finite state"
            };
            return Err(SimError::Unstable {
                step,
                t: t1.as_f64(),
                particle: i,
                what,
            });
        }
        self.state.t = t1;
        self.state.step = step;
        self.state.dt = dt;

        let positions: Vec<_> = self.state.particles.iter().map(|p| p.x).collect();
        let newly_broken = broken
            .into_iter()
            .filter(|&b| self.is_real_bond(b))
            .map(|b| CrackRecord {
                time: t1,
                segment: self.state.network.segment(b, &positions),
            })
            .collect();
        Ok(StepReport {
            dt,
            singular_corrections: singular,
            newly_broken,
        })
    }

    /// `target = base + dt · rates`, positions advanced with `kin.u`.
    fn advance(
        &self,
        target: &mut [Particle<T, D>],
        base: &[Particle<T, D>],
        kin: &[Particle<T, D>],
        rates: &[Rates<T, D>],
        dt: T,
    ) {
        let shear = self.material.shear;
        let material = &self.material;
        target[..self.n_real]
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, p)| {
                let b = &base[i];
                let r = &rates[i];
                let (strain_rate, spin) = strain_rate_and_spin(&r.grad_u);
                let ds = jaumann_deviatoric_rate(&kin[i].stress.s, &strain_rate, &spin, shear);
                p.x = b.x + kin[i].u * dt;
                if !p.driven {
                    p.u = b.u + r.du * dt;
                }
                p.rho = b.rho + r.drho * dt;
                p.e = b.e + r.de * dt;
                p.stress.s = b.stress.s + ds * dt;
                p.stress.eps_total = b.stress.eps_total + strain_rate * dt;
                p.stress.p = eos_pressure(p.rho, material);
            });
    }

    fn prescribe_velocities(&self, particles: &mut [Particle<T, D>], t: T) {
        for load in &self.velocity_loads {
            let scale = ramp_factor(t, load.ramp_time);
            for &i in &load.particles {
                let p = &mut particles[i];
                p.u = load.field.velocity(&p.x0, &p.x) * scale;
            }
        }
    }

    /// Plastic return, EOS and particle damage criteria on end-of-step states.
    fn constitutive_update(&self, particles: &mut [Particle<T, D>], dt: T) {
        let material = &self.material;
        particles[..self.n_real].par_iter_mut().for_each(|p| {
            let st = &mut p.stress;
            if let Some(sigma_y) = material.flow_stress(st) {
                let r = von_mises_return(&st.s, sigma_y, material.shear);
                st.s = r.s;
                st.eps_pl += r.d_eps_pl;
                st.eps_pl_rate = r.d_eps_pl / dt;
                st.w_p += r.d_w_p;
                if let Some(jc) = &material.jc {
                    st.temperature += jc.taylor_quinney * r.d_w_p / (p.rho * jc.specific_heat);
                    if material.criterion == DamageCriterion::JohnsonCook && r.d_eps_pl > T::zero() && !p.driven {
                        let eq = st.von_mises();
                        let triax = if eq > T::zero() { -st.p / eq } else { T::zero() };
                        let eps_f = jc.failure_strain(triax, st.eps_pl_rate, st.temperature);
                        st.damage = (st.damage + r.d_eps_pl / eps_f).min(T::one());
                    }
                }
            }
            st.p = eos_pressure(p.rho, material);
            // driven particles are loading grips: their kinematics are imposed,
            // so a failure criterion on them would only tear up the grip
            if p.driven {
                return;
            }
            let d = match material.criterion {
                DamageCriterion::MaxPrincipalStrain { eps_max, measure } => match measure {
                    StrainMeasure::Accumulated => damage_principal_strain(&st.eps_total, eps_max),
                    StrainMeasure::StressOverModulus => {
                        if max_principal(&st.cauchy()) / material.youngs >= eps_max {
                            T::one()
                        } else {
                            T::zero()
                        }
                    }
                },
                DamageCriterion::MaxPrincipalStress { sigma_max } => damage_principal_stress(&st.cauchy(), sigma_max),
                _ => T::zero(),
            };
            if d > st.damage {
                st.damage = d;
            }
        });
    }

    /// Commits bond damage; returns newly broken bond indices.
    fn commit_damage(&mut self, particles: &mut [Particle<T, D>]) -> Vec<usize> {
        let network = &mut self.state.network;
        match self.material.criterion {
            DamageCriterion::None => Vec::new(),
            DamageCriterion::CriticalStretch { delta_tc } => {
                let hits: Vec<usize> = network
                    .bonds()
                    .par_iter()
                    .enumerate()
                    .filter(|(_, b)| {
                        !b.is_broken()
                            && !(particles[b.i].driven && particles[b.j].driven)
                            && damage_critical_stretch((particles[b.i].x - particles[b.j].x).norm(), b.r0, delta_tc)
                                > T::zero()
                    })
                    .map(|(k, _)| k)
                    .collect();
                let mut broken = Vec::with_capacity(hits.len());
                for k in hits {
                    if network.set_bond_damage(k, T::one()).unwrap_or(false) {
                        broken.push(k);
                    }
                }
                for i in 0..self.n_real {
                    particles[i].stress.damage = network.broken_bond_fraction(i);
                }
                broken
            }
            _ => {
                let damage: Vec<T> = particles.iter().map(|p| p.stress.damage).collect();
                network.commit_particle_damage(&damage)
            }
        }
    }

    /// Copies mirrored state from each ghost's source particle.
    fn refresh_ghosts(&self, particles: &mut [Particle<T, D>]) {
        if self.ghost_planes.is_empty() {
            return;
        }
        let (real, ghosts) = particles.split_at_mut(self.n_real);
        for g in ghosts.iter_mut() {
            let link = g.ghost.expect("trailing particles are ghosts");
            let plane = &self.ghost_planes[link.plane];
            let src = &real[link.source];
            g.x = plane.reflect_point(&src.x);
            g.u = plane.reflect_vector(&src.u);
            g.x0 = plane.reflect_point(&src.x0);
            g.rho = src.rho;
            g.m = src.m;
            g.e = src.e;
            g.stress = src.stress;
            g.stress.s = plane.reflect_tensor(&src.stress.s);
            g.stress.eps_total = plane.reflect_tensor(&src.stress.eps_total);
        }
    }

    /// Conserved-quantity bookkeeping over real particles.
    pub fn audit(&self) -> AuditRow<T> {
        let mut mass = T::zero();
        let mut momentum = [T::zero(); 3];
        let mut kinetic = T::zero();
        let mut internal = T::zero();
        for p in self.real_particles() {
            mass += p.m;
            for d in 0..D.min(3) {
                momentum[d] += p.m * p.u[d];
            }
            kinetic += T::lit(0.5) * p.m * p.u.norm_squared();
            internal += p.m * p.e;
        }
        AuditRow {
            step: self.state.step,
            t: self.state.t,
            dt: self.state.dt,
            total_mass: mass,
            momentum,
            kinetic,
            internal,
            broken_bonds: self.broken_bonds(),
        }
    }

    /// Deviatoric stress invariant per real particle, for diagnostics.
    pub fn cauchy(&self, i: usize) -> Matrix3<T> {
        self.state.particles[i].stress.cauchy()
    }
}

fn check_selection(sel: &[usize], n: usize) -> Result<(), SimError> {
    match sel.iter().find(|&&i| i >= n) {
        Some(i) => Err(SimError::Setup(format!("boundary region references particle {i} of {n}"))),
        None => Ok(()),
    }
}

fn mirror_seam<T: Real, const D: usize>(s: &Seam<T, D>, plane: &Plane<T, D>) -> Seam<T, D> {
    let lo = plane.reflect_point(&s.lo);
    let hi = plane.reflect_point(&s.hi);
    let n = plane.reflect_vector(&s.normal);
    let on_plane = s.lo + s.normal * (s.offset - s.normal.dot(&s.lo));
    let p = plane.reflect_point(&on_plane);
    Seam {
        normal: n,
        offset: n.dot(&p),
        lo: lo.zip_map(&hi, |a, b| a.min(b)),
        hi: lo.zip_map(&hi, |a, b| a.max(b)),
    }
}
