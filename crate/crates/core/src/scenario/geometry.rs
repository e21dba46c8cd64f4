//! Particle generators for the shipped scenarios.

use nalgebra::{Matrix2, SVector, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::spec::{Geometry, ScenarioSpec};
use super::ScenarioError;
use crate::bonds::Seam;
use crate::dynamics::{BoundaryCondition, Particle, Plane, Simulation, VelocityField};
use crate::kernel::KernelConfig;

/// A ready-to-run simulation in two or three dimensions.
#[derive(Debug, Clone)]
pub enum Model {
    Planar(Simulation<f64, 2>),
    Solid(Simulation<f64, 3>),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Self::Planar(_) => 2,
            Self::Solid(_) => 3,
        }
    }

    pub fn n_real(&self) -> usize {
        match self {
            Self::Planar(s) => s.n_real(),
            Self::Solid(s) => s.n_real(),
        }
    }

    pub fn n_bonds(&self) -> usize {
        match self {
            Self::Planar(s) => s.state.network.bonds().len(),
            Self::Solid(s) => s.state.network.bonds().len(),
        }
    }
}

/// What the crack analytics look for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// A crack running from a notch tip.
    Notch,
    /// A fracture surface in a twisted bar.
    Surface,
    /// A projectile striking a wall.
    Impact,
    /// No fracture expected.
    Elastic,
}

/// Geometric reference data for post-processing, padded to three components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackFrame {
    pub kind: FrameKind,
    pub dim: usize,
    pub dp: f64,
    /// Notch tip, bar centre or impact-face centre.
    pub origin: [f64; 3],
    /// Notch direction, bar axis or impact direction.
    pub axis: [f64; 3],
    /// In-plane direction normal to `axis`.
    pub transverse: [f64; 3],
    pub domain_lo: [f64; 3],
    pub domain_hi: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_center: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_radius: Option<f64>,
    /// Axial interval more than one kernel support away from driven regions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_zone: Option<[f64; 2]>,
    /// Initial radius (projectile or bar).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

pub struct Setup {
    pub model: Model,
    pub frame: CrackFrame,
}

/// Number of lattice cells along an extent and the extent they actually
/// cover. Extents that are not a whole number of spacings are rounded to the
/// nearest one.
fn cells(extent: f64, dp: f64, what: &str) -> Result<(usize, f64), ScenarioError> {
    let n = (extent / dp).round();
    if n < 1.0 {
        return Err(ScenarioError::Config(format!(
            "{what} = {extent} is smaller than the particle spacing {dp}"
        )));
    }
    let covered = n * dp;
    if (covered - extent).abs() > 1e-6 * extent {
        log::warn!("{what} = {extent} m rounded to {covered} m ({n} spacings of {dp} m)");
    }
    Ok((n as usize, covered))
}

/// Cell-centred lattice on `[lo, lo + n·dp]`, filtered by `keep`.
fn lattice<const D: usize>(
    lo: SVector<f64, D>,
    n: [usize; D],
    dp: f64,
    rho0: f64,
    keep: impl Fn(&SVector<f64, D>) -> bool,
) -> Vec<Particle<f64, D>> {
    let mass = rho0 * dp.powi(D as i32);
    let total: usize = n.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = [0usize; D];
    for _ in 0..total {
        let x = SVector::<f64, D>::from_fn(|d, _| lo[d] + (idx[d] as f64 + 0.5) * dp);
        if keep(&x) {
            out.push(Particle::new(x, mass, rho0));
        }
        for d in 0..D {
            idx[d] += 1;
            if idx[d] < n[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    out
}

fn select<const D: usize>(ps: &[Particle<f64, D>], pred: impl Fn(&SVector<f64, D>) -> bool) -> Vec<usize> {
    (0..ps.len()).filter(|&i| pred(&ps[i].x)).collect()
}

fn disjoint(a: &[usize], b: &[usize]) -> Result<(), ScenarioError> {
    if a.iter().any(|i| b.binary_search(i).is_ok()) {
        return Err(ScenarioError::Config("boundary regions overlap".into()));
    }
    Ok(())
}

fn pad(v: &[f64]) -> [f64; 3] {
    let mut o = [0.0; 3];
    o[..v.len()].copy_from_slice(v);
    o
}

/// Builds the initial state for a validated spec.
pub fn generate(spec: &ScenarioSpec) -> Result<Setup, ScenarioError> {
    spec.validate()?;
    let dp = spec.dp;
    let h = spec.smoothing_length();
    let rho0 = spec.material.rho0;
    let material = spec.material()?;
    let solver = (&spec.solver).into();
    let ramp = spec.ramp_time();
    let sigma = spec.load.sigma;
    let v = spec.load.velocity;

    match spec.geometry {
        Geometry::NotchedPlate {
            length,
            width,
            notch_length,
            load_layers,
        } => {
            let (nx, length) = cells(length, dp, "length")?;
            let (ny, width) = cells(width, dp, "width")?;
            if notch_length >= length {
                return Err(ScenarioError::Config("notch longer than the plate".into()));
            }
            let lo = Vector2::new(0.0, -0.5 * width);
            let ps = lattice(lo, [nx, ny], dp, rho0, |_| true);
            let band = load_layers as f64 * dp;
            let top = select(&ps, |x| x.y > 0.5 * width - band);
            let bottom = select(&ps, |x| x.y < -0.5 * width + band);
            disjoint(&top, &bottom)?;
            let load = Matrix2::new(0.0, 0.0, 0.0, sigma);
            let bcs = vec![
                BoundaryCondition::AppliedStress {
                    particles: top,
                    stress: load,
                    ramp_time: ramp,
                },
                BoundaryCondition::AppliedStress {
                    particles: bottom,
                    stress: load,
                    ramp_time: ramp,
                },
            ];
            let seam = Seam::axis_aligned(1, 0.0, Vector2::new(-dp, -dp), Vector2::new(notch_length, dp));
            let sim = Simulation::new(ps, material, KernelConfig::new(h)?, dp, &[seam], bcs, solver)?;
            Ok(Setup {
                model: Model::Planar(sim),
                frame: CrackFrame {
                    kind: FrameKind::Notch,
                    dim: 2,
                    dp,
                    origin: [notch_length, 0.0, 0.0],
                    axis: [1.0, 0.0, 0.0],
                    transverse: [0.0, 1.0, 0.0],
                    domain_lo: pad(lo.as_slice()),
                    domain_hi: [length, 0.5 * width, 0.0],
                    hole_center: None,
                    hole_radius: None,
                    free_zone: None,
                    radius: None,
                },
            })
        }
        Geometry::HolePlate {
            width,
            length,
            notch_length,
            notch_height,
            hole_center,
            hole_radius,
            clamp_layers,
            load_layers,
        } => {
            let (nx, width) = cells(width, dp, "width")?;
            let (ny, length) = cells(length, dp, "length")?;
            let c = Vector2::from(hole_center);
            if c.x - hole_radius <= 0.0
                || c.x + hole_radius >= width
                || c.y - hole_radius <= 0.0
                || c.y + hole_radius >= length
            {
                return Err(ScenarioError::Config("hole does not fit inside the plate".into()));
            }
            if notch_length >= c.x - hole_radius && (notch_height - c.y).abs() <= hole_radius {
                return Err(ScenarioError::Config("notch overlaps the hole".into()));
            }
            let ps = lattice(Vector2::zeros(), [nx, ny], dp, rho0, |x| (x - c).norm() > hole_radius);
            let clamp = select(&ps, |x| x.y < clamp_layers as f64 * dp);
            let top = select(&ps, |x| x.y > length - load_layers as f64 * dp);
            disjoint(&clamp, &top)?;
            if notch_height <= clamp_layers as f64 * dp || notch_height >= length - load_layers as f64 * dp {
                return Err(ScenarioError::Config("notch lies inside a boundary region".into()));
            }
            let bcs = vec![
                BoundaryCondition::PrescribedVelocity {
                    particles: clamp,
                    field: VelocityField::Constant(Vector2::zeros()),
                    ramp_time: 0.0,
                },
                BoundaryCondition::AppliedStress {
                    particles: top,
                    stress: Matrix2::new(0.0, 0.0, 0.0, sigma),
                    ramp_time: ramp,
                },
            ];
            let seam = Seam::axis_aligned(
                1,
                notch_height,
                Vector2::new(-dp, notch_height - dp),
                Vector2::new(notch_length, notch_height + dp),
            );
            let sim = Simulation::new(ps, material, KernelConfig::new(h)?, dp, &[seam], bcs, solver)?;
            Ok(Setup {
                model: Model::Planar(sim),
                frame: CrackFrame {
                    kind: FrameKind::Notch,
                    dim: 2,
                    dp,
                    origin: [notch_length, notch_height, 0.0],
                    axis: [1.0, 0.0, 0.0],
                    transverse: [0.0, 1.0, 0.0],
                    domain_lo: [0.0; 3],
                    domain_hi: [width, length, 0.0],
                    hole_center: Some(pad(&hole_center)),
                    hole_radius: Some(hole_radius),
                    free_zone: None,
                    radius: None,
                },
            })
        }
        Geometry::TorsionBar {
            length,
            diameter,
            drive_length,
        } => {
            let (nx, length) = cells(length, dp, "length")?;
            let (nd, diameter) = cells(diameter, dp, "diameter")?;
            let r = 0.5 * diameter;
            if 2.0 * drive_length >= length {
                return Err(ScenarioError::Config("drive regions cover the whole bar".into()));
            }
            let lo = Vector3::new(0.0, -r, -r);
            let ps = lattice(lo, [nx, nd, nd], dp, rho0, |x| x.y * x.y + x.z * x.z <= r * r);
            let left = select(&ps, |x| x.x < drive_length);
            let right = select(&ps, |x| x.x > length - drive_length);
            let field = |sense: f64, x0: f64| VelocityField::Torsion {
                origin: Vector3::new(x0, 0.0, 0.0),
                axis: Vector3::x(),
                e1: Vector3::y(),
                e2: Vector3::z(),
                u_max: v,
                radius: r,
                sense,
            };
            let bcs = vec![
                BoundaryCondition::PrescribedVelocity {
                    particles: left,
                    field: field(1.0, 0.0),
                    ramp_time: spec.ramp_time(),
                },
                BoundaryCondition::PrescribedVelocity {
                    particles: right,
                    field: field(-1.0, length),
                    ramp_time: spec.ramp_time(),
                },
            ];
            let sim = Simulation::new(ps, material, KernelConfig::new(h)?, dp, &[], bcs, solver)?;
            Ok(Setup {
                model: Model::Solid(sim),
                frame: CrackFrame {
                    kind: FrameKind::Surface,
                    dim: 3,
                    dp,
                    origin: [0.5 * length, 0.0, 0.0],
                    axis: [1.0, 0.0, 0.0],
                    transverse: [0.0, 1.0, 0.0],
                    domain_lo: [0.0, -r, -r],
                    domain_hi: [length, r, r],
                    hole_center: None,
                    hole_radius: None,
                    // one kernel support clear of the grips
                    free_zone: Some([drive_length + 2.0 * h, length - drive_length - 2.0 * h]),
                    radius: Some(r),
                },
            })
        }
        Geometry::ImpactPlate {
            width,
            height,
            notch_length,
            notch_offset,
            layers,
            impactor_depth,
        } => {
            let (nx, width) = cells(width, dp, "width")?;
            let (ny, height) = cells(height, dp, "height")?;
            if layers == 0 || notch_offset <= 0.0 || notch_offset >= height || notch_length >= width {
                return Err(ScenarioError::Config("invalid impact plate layout".into()));
            }
            let thickness = layers as f64 * dp;
            let ps = lattice(Vector3::zeros(), [nx, ny, layers], dp, rho0, |_| true);
            let impactor = select(&ps, |x| x.x < impactor_depth as f64 * dp && x.y < notch_offset);
            let bcs = vec![
                BoundaryCondition::Symmetry {
                    plane: Plane::axis(1, 0.0, true),
                },
                BoundaryCondition::PrescribedVelocity {
                    particles: impactor,
                    field: VelocityField::Constant(Vector3::new(v, 0.0, 0.0)),
                    ramp_time: spec.ramp_time(),
                },
            ];
            let seam = Seam::axis_aligned(
                1,
                notch_offset,
                Vector3::new(-dp, notch_offset - dp, -dp),
                Vector3::new(notch_length, notch_offset + dp, thickness + dp),
            );
            let sim = Simulation::new(ps, material, KernelConfig::new(h)?, dp, &[seam], bcs, solver)?;
            Ok(Setup {
                model: Model::Solid(sim),
                frame: CrackFrame {
                    kind: FrameKind::Notch,
                    dim: 3,
                    dp,
                    origin: [notch_length, notch_offset, 0.5 * thickness],
                    axis: [1.0, 0.0, 0.0],
                    transverse: [0.0, 1.0, 0.0],
                    domain_lo: [0.0; 3],
                    domain_hi: [width, height, thickness],
                    hole_center: None,
                    hole_radius: None,
                    free_zone: None,
                    radius: None,
                },
            })
        }
        Geometry::Projectile { length, diameter } => {
            let (nz, length) = cells(length, dp, "length")?;
            let (nd, diameter) = cells(diameter, dp, "diameter")?;
            let r = 0.5 * diameter;
            let lo = Vector3::new(-r, -r, 0.0);
            let mut ps = lattice(lo, [nd, nd, nz], dp, rho0, |x| x.x * x.x + x.y * x.y <= r * r);
            for p in &mut ps {
                p.u = Vector3::new(0.0, 0.0, -v);
            }
            let bcs = vec![BoundaryCondition::RigidWall {
                plane: Plane::axis(2, 0.0, true),
            }];
            let sim = Simulation::new(ps, material, KernelConfig::new(h)?, dp, &[], bcs, solver)?;
            Ok(Setup {
                model: Model::Solid(sim),
                frame: CrackFrame {
                    kind: FrameKind::Impact,
                    dim: 3,
                    dp,
                    origin: [0.0; 3],
                    axis: [0.0, 0.0, -1.0],
                    transverse: [1.0, 0.0, 0.0],
                    domain_lo: [-r, -r, 0.0],
                    domain_hi: [r, r, length],
                    hole_center: None,
                    hole_radius: None,
                    free_zone: None,
                    radius: Some(r),
                },
            })
        }
        Geometry::ThinBar {
            length,
            section_layers,
            pulse_center,
            pulse_width,
        } => {
            let (nx, length) = cells(length, dp, "length")?;
            let a = section_layers as f64 * dp;
            let lo = Vector3::new(0.0, -0.5 * a, -0.5 * a);
            let mut ps = lattice(lo, [nx, section_layers, section_layers], dp, rho0, |_| true);
            for p in &mut ps {
                let s = (p.x.x - pulse_center) / pulse_width;
                p.u = Vector3::new(v * (-s * s).exp(), 0.0, 0.0);
            }
            let sim = Simulation::new(ps, material, KernelConfig::new(h)?, dp, &[], vec![], solver)?;
            Ok(Setup {
                model: Model::Solid(sim),
                frame: CrackFrame {
                    kind: FrameKind::Elastic,
                    dim: 3,
                    dp,
                    origin: [pulse_center, 0.0, 0.0],
                    axis: [1.0, 0.0, 0.0],
                    transverse: [0.0, 1.0, 0.0],
                    domain_lo: pad(lo.as_slice()),
                    domain_hi: [length, 0.5 * a, 0.5 * a],
                    hole_center: None,
                    hole_radius: None,
                    free_zone: None,
                    radius: None,
                },
            })
        }
    }
}
