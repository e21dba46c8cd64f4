//! Snapshot files: CSV tables and legacy-ASCII VTK point clouds.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::bonds::{CrackRecord, CrackSegment};
use crate::dynamics::Simulation;
use crate::num::Real;

pub const SNAPSHOT_CSV_HEADER: &str = "id,x,y,z,ux,uy,uz,rho,P,s_vm,eps_pl,damage,broken_frac";

const SCALARS: [&str; 6] = ["rho", "P", "s_vm", "eps_pl", "damage", "broken_frac"];

/// Per-particle output record; vectors are padded to three components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub id: usize,
    pub x: [f64; 3],
    pub u: [f64; 3],
    pub rho: f64,
    pub p: f64,
    pub s_vm: f64,
    pub eps_pl: f64,
    pub damage: f64,
    pub broken_frac: f64,
}

impl SnapshotRow {
    fn scalars(&self) -> [f64; 6] {
        [self.rho, self.p, self.s_vm, self.eps_pl, self.damage, self.broken_frac]
    }
}

/// Rows for every real particle.
pub fn snapshot_rows<T: Real, const D: usize>(sim: &Simulation<T, D>) -> Vec<SnapshotRow> {
    let pad = |v: &nalgebra::SVector<T, D>| {
        let mut o = [0.0; 3];
        for (d, slot) in o.iter_mut().enumerate().take(D) {
            *slot = v[d].as_f64();
        }
        o
    };
    sim.real_particles()
        .iter()
        .enumerate()
        .map(|(i, p)| SnapshotRow {
            id: i,
            x: pad(&p.x),
            u: pad(&p.u),
            rho: p.rho.as_f64(),
            p: p.stress.p.as_f64(),
            s_vm: p.stress.von_mises().as_f64(),
            eps_pl: p.stress.eps_pl.as_f64(),
            damage: p.damage().as_f64(),
            broken_frac: sim.broken_fraction(i).as_f64(),
        })
        .collect()
}

pub fn write_snapshot_csv(path: &Path, rows: &[SnapshotRow]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{SNAPSHOT_CSV_HEADER}")?;
    for r in rows {
        write!(out, "{}", r.id)?;
        for v in r.x.iter().chain(&r.u).chain(&r.scalars()) {
            write!(out, ",{v:e}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

pub fn read_snapshot_csv(path: &Path) -> io::Result<Vec<SnapshotRow>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != SNAPSHOT_CSV_HEADER {
        return Err(invalid(format!("unexpected snapshot header '{header}'")));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut f = line.split(',');
        let id = f
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| invalid(format!("bad id on line {}", n + 2)))?;
        let v: Vec<f64> = f
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| invalid(format!("line {}: {e}", n + 2)))?;
        if v.len() != 12 {
            return Err(invalid(format!("line {}: expected 13 columns", n + 2)));
        }
        rows.push(SnapshotRow {
            id,
            x: [v[0], v[1], v[2]],
            u: [v[3], v[4], v[5]],
            rho: v[6],
            p: v[7],
            s_vm: v[8],
            eps_pl: v[9],
            damage: v[10],
            broken_frac: v[11],
        });
    }
    Ok(rows)
}

/// Legacy ASCII VTK polydata with one vertex per particle.
pub fn write_snapshot_vtk(path: &Path, rows: &[SnapshotRow], title: &str) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let n = rows.len();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.replace('\n', " "))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET POLYDATA")?;
    writeln!(out, "POINTS {n} double")?;
    for r in rows {
        writeln!(out, "{:e} {:e} {:e}", r.x[0], r.x[1], r.x[2])?;
    }
    writeln!(out, "VERTICES {n} {}", 2 * n)?;
    for i in 0..n {
        writeln!(out, "1 {i}")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    writeln!(out, "SCALARS id int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for r in rows {
        writeln!(out, "{}", r.id)?;
    }
    writeln!(out, "VECTORS velocity double")?;
    for r in rows {
        writeln!(out, "{:e} {:e} {:e}", r.u[0], r.u[1], r.u[2])?;
    }
    for (k, name) in SCALARS.iter().enumerate() {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for r in rows {
            writeln!(out, "{:e}", r.scalars()[k])?;
        }
    }
    out.flush()
}

/// Reads crack records written by [`crate::bonds::write_crack_csv`].
pub fn read_crack_csv(path: &Path) -> io::Result<Vec<CrackRecord<f64, 3>>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != crate::bonds::CRACK_CSV_HEADER {
        return Err(invalid(format!("unexpected crack header '{header}'")));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| invalid(format!("crack line {}: {e}", n + 2)))?;
        if v.len() != 7 {
            return Err(invalid(format!("crack line {}: expected 7 columns", n + 2)));
        }
        out.push(CrackRecord {
            time: v[0],
            segment: CrackSegment {
                bond: n,
                midpoint: nalgebra::Vector3::new(v[1], v[2], v[3]),
                direction: nalgebra::Vector3::new(v[4], v[5], v[6]),
            },
        });
    }
    Ok(out)
}
