use std::io::{self, Write};

use crate::num::Real;

pub const AUDIT_CSV_HEADER: &str = "step,t,dt,total_mass,px,py,pz,kinetic,internal,broken_bonds";

/// Global conserved quantities at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow<T: Real> {
    pub step: usize,
    pub t: T,
    pub dt: T,
    pub total_mass: T,
    pub momentum: [T; 3],
    pub kinetic: T,
    pub internal: T,
    pub broken_bonds: usize,
}

impl<T: Real> AuditRow<T> {
    pub fn total_energy(&self) -> T {
        self.kinetic + self.internal
    }

    pub fn write_row<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.step,
            self.t.as_f64(),
            self.dt.as_f64(),
            self.total_mass.as_f64(),
            self.momentum[0].as_f64(),
            self.momentum[1].as_f64(),
            self.momentum[2].as_f64(),
            self.kinetic.as_f64(),
            self.internal.as_f64(),
            self.broken_bonds
        )
    }
}
