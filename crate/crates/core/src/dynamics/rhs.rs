//! Right-hand sides of the damage-modified discrete conservation laws.

use nalgebra::{Matrix3, SMatrix, SVector};
use rayon::prelude::*;

use super::{Particle, Simulation, StressBcForm, StressBcGradient};
use crate::kernel::{correction_matrix, symmetrized_gradient, CorrectionMatrix, NeighborSample};
use crate::material::{artificial_viscosity, embed, restrict, PairState};
use crate::num::Real;

/// Time derivatives of one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates<T: Real, const D: usize> {
    pub drho: T,
    pub du: SVector<T, D>,
    pub de: T,
    /// Velocity gradient `∂u^α/∂x^β`, embedded in 3×3.
    pub grad_u: Matrix3<T>,
}

impl<T: Real, const D: usize> Rates<T, D> {
    pub fn zero() -> Self {
        Self {
            drho: T::zero(),
            du: SVector::zeros(),
            de: T::zero(),
            grad_u: Matrix3::zeros(),
        }
    }
}

/// Per-particle quantities read by the pair loop.
#[derive(Debug, Clone, Copy)]
struct Snapshot<T: Real, const D: usize> {
    sigma_over_rho2: SMatrix<T, D, D>,
    p: T,
    c: T,
    volume: T,
}

impl<T: Real, const D: usize> Simulation<T, D> {
    /// Correction matrices for every particle at the given configuration.
    /// Ghost particles take the mirror image of their source's matrix.
    pub fn correction_matrices(&self, particles: &[Particle<T, D>]) -> Vec<CorrectionMatrix<T, D>> {
        let network = &self.state.network;
        let kernel = &self.kernel;
        let mut out: Vec<CorrectionMatrix<T, D>> = (0..particles.len())
            .into_par_iter()
            .map(|i| {
                if particles[i].ghost.is_some() {
                    return CorrectionMatrix::identity();
                }
                let samples = network.neighbors(i).map(|(j, b)| NeighborSample {
                    x_ij: particles[i].x - particles[j].x,
                    volume: particles[j].m / particles[j].rho,
                    factor: network.bond(b).factor(),
                });
                correction_matrix(samples, kernel)
            })
            .collect();
        for (g, p) in particles.iter().enumerate() {
            if let Some(link) = p.ghost {
                let src = out[link.source];
                let plane = &self.ghost_planes[link.plane];
                out[g] = CorrectionMatrix {
                    a: plane.reflect_tensor_d(&src.a),
                    b: plane.reflect_tensor_d(&src.b),
                    singular: src.singular,
                };
            }
        }
        out
    }

    /// Evaluates all rates against a frozen particle array at time `t`.
    pub fn evaluate_rates(&self, particles: &[Particle<T, D>], t: T) -> (Vec<Rates<T, D>>, usize) {
        let corr = self.correction_matrices(particles);
        let singular = corr
            .iter()
            .zip(particles)
            .filter(|(c, p)| c.singular && p.ghost.is_none())
            .count();
        let snap: Vec<Snapshot<T, D>> = particles
            .par_iter()
            .map(|p| {
                let sigma: SMatrix<T, D, D> = restrict(&p.stress.cauchy());
                Snapshot {
                    sigma_over_rho2: sigma / (p.rho * p.rho),
                    p: p.stress.p,
                    c: self.material.sound_speed(p.rho),
                    volume: p.m / p.rho,
                }
            })
            .collect();
        let loads = self.applied_stress_at(t, particles.len());
        let rates = (0..particles.len())
            .into_par_iter()
            .map(|i| {
                if particles[i].ghost.is_some() {
                    Rates::zero()
                } else {
                    self.particle_rates(i, particles, &snap, &corr, loads[i].as_ref())
                }
            })
            .collect();
        (rates, singular)
    }

    fn particle_rates(
        &self,
        i: usize,
        particles: &[Particle<T, D>],
        snap: &[Snapshot<T, D>],
        corr: &[CorrectionMatrix<T, D>],
        load: Option<&SMatrix<T, D, D>>,
    ) -> Rates<T, D> {
        let network = &self.state.network;
        let kernel = &self.kernel;
        let h = kernel.h();
        let half = T::lit(0.5);
        let pi = &particles[i];
        let si = &snap[i];
        let mut drho = T::zero();
        let mut du = SVector::<T, D>::zeros();
        let mut de = T::zero();
        let mut grad_u = SMatrix::<T, D, D>::zeros();
        let mut bc = SVector::<T, D>::zeros();
        for (j, b) in network.neighbors(i) {
            let pj = &particles[j];
            let sj = &snap[j];
            let x_ij = pi.x - pj.x;
            let grad = kernel.gradient(&x_ij);
            if let Some(sigma0) = load {
                let raw = match self.config.stress_bc_gradient {
                    StressBcGradient::Raw => grad,
                    StressBcGradient::Corrected => symmetrized_gradient(&corr[i].b, &corr[j].b, &grad),
                };
                let weight = match self.config.stress_bc_form {
                    StressBcForm::Symmetric => pj.m * (T::one() / (pi.rho * pi.rho) + T::one() / (pj.rho * pj.rho)),
                    StressBcForm::Printed => pj.m / (pi.rho * pj.rho),
                };
                bc += sigma0 * raw * weight;
            }
            let f = network.bond(b).factor();
            if f <= T::zero() {
                continue;
            }
            let wbar = symmetrized_gradient(&corr[i].b, &corr[j].b, &grad) * f;
            let u_ij = pi.u - pj.u;
            drho += pj.m * u_ij.dot(&wbar);
            grad_u -= u_ij * wbar.transpose() * sj.volume;

            let pair = PairState {
                x_ij,
                u_ij,
                c_i: si.c,
                c_j: sj.c,
                rho_i: pi.rho,
                rho_j: pj.rho,
            };
            let visc = artificial_viscosity(&pair, h, &self.config.viscosity);
            let art = if self.config.artificial_pressure {
                self.art_pressure
                    .evaluate(si.p, sj.p, pi.rho, pj.rho, kernel.value(x_ij.norm()))
            } else {
                T::zero()
            };
            let tensor = si.sigma_over_rho2 + sj.sigma_over_rho2 - SMatrix::<T, D, D>::identity() * (visc + art);
            let force = tensor * wbar;
            du += force * pj.m;
            de -= half * pj.m * u_ij.dot(&force);
        }
        Rates {
            drho,
            du: du - bc,
            de,
            grad_u: embed(&grad_u),
        }
    }

    /// Ramped applied stress per particle at time `t`.
    fn applied_stress_at(&self, t: T, n: usize) -> Vec<Option<SMatrix<T, D, D>>> {
        let mut out = vec![None; n];
        for load in &self.stress_loads {
            let sigma0 = load.stress * super::boundary::ramp_factor(t, load.ramp_time);
            for &i in &load.particles {
                out[i] = Some(match out[i] {
                    Some(prev) => prev + sigma0,
                    None => sigma0,
                });
            }
        }
        out
    }
}
