//! Pseudo-spring smoothed particle hydrodynamics for dynamic fracture.
//!
//! Particles interact only with their initial neighbours through
//! pseudo-springs whose damage scales the corrected kernel gradient; a crack
//! is the set of fully broken springs. The solver is generic over the
//! floating-point type; the aliases below fix it to `f64`.

pub mod bonds;
pub mod dynamics;
pub mod kernel;
pub mod material;
pub mod neighbor;
pub mod num;
pub mod scenario;

pub use num::Real;

pub type Simulation2 = dynamics::Simulation<f64, 2>;
pub type Simulation3 = dynamics::Simulation<f64, 3>;
pub type Particle2 = dynamics::Particle<f64, 2>;
pub type Particle3 = dynamics::Particle<f64, 3>;
pub type Kernel2 = kernel::KernelConfig<f64, 2>;
pub type Kernel3 = kernel::KernelConfig<f64, 3>;
pub type BondNetwork = bonds::BondNetwork<f64>;
pub type Material = material::Material<f64>;
