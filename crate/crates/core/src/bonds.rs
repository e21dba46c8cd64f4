//! Pseudo-spring network over the initial immediate neighbourhood.
//!
//! Springs carry no stiffness. Each one stores a damage `D_ij` and exposes the
//! interaction factor `f_ij = 1 - D_ij` that scales the kernel gradient of the
//! pair. The pair set is fixed at construction; only damage evolves, and it
//! never decreases.

use std::io::{self, Write};

use nalgebra::SVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::kernel::KernelConfig;
use crate::neighbor::SpatialGrid;
use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum BondError {
    #[error("particles {0} and {1} are coincident")]
    Coincident(usize, usize),
    #[error("bond damage {0} outside [0, 1]")]
    DamageRange(f64),
    #[error("bond index {0} out of range")]
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringBond<T: Real> {
    pub i: usize,
    pub j: usize,
    /// Reference length at t = 0.
    pub r0: T,
    damage: T,
}

impl<T: Real> SpringBond<T> {
    pub fn new(i: usize, j: usize, r0: T) -> Self {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Self {
            i,
            j,
            r0,
            damage: T::zero(),
        }
    }

    #[inline]
    pub fn damage(&self) -> T {
        self.damage
    }

    /// `f_ij = 1 - D_ij`.
    #[inline]
    pub fn factor(&self) -> T {
        T::one() - self.damage
    }

    #[inline]
    pub fn is_broken(&self) -> bool {
        self.damage >= T::one()
    }

    #[inline]
    pub fn other(&self, k: usize) -> usize {
        if k == self.i {
            self.j
        } else {
            self.i
        }
    }
}

/// `max(previous, 0.5 (D_i + D_j))`.
#[inline]
pub fn spring_damage<T: Real>(previous: T, d_i: T, d_j: T) -> T {
    let avg = T::lit(0.5) * (d_i + d_j);
    if avg > previous {
        avg.min(T::one())
    } else {
        previous
    }
}

/// Planar cut through the reference configuration. A bond whose segment
/// crosses the plane at a point inside `[lo, hi]` is never created.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seam<T: Real, const D: usize> {
    pub normal: SVector<T, D>,
    pub offset: T,
    pub lo: SVector<T, D>,
    pub hi: SVector<T, D>,
}

impl<T: Real, const D: usize> Seam<T, D> {
    /// Seam in the plane `x[axis] = value`, bounded by the box `[lo, hi]`.
    pub fn axis_aligned(axis: usize, value: T, lo: SVector<T, D>, hi: SVector<T, D>) -> Self {
        let mut normal = SVector::zeros();
        normal[axis] = T::one();
        Self {
            normal,
            offset: value,
            lo,
            hi,
        }
    }

    pub fn cuts(&self, a: &SVector<T, D>, b: &SVector<T, D>) -> bool {
        let sa = self.normal.dot(a) - self.offset;
        let sb = self.normal.dot(b) - self.offset;
        if sa * sb > T::zero() || sa == sb {
            return false;
        }
        let t = sa / (sa - sb);
        let p = a + (b - a) * t;
        let tol = T::lit(1e-9) * (self.hi - self.lo).norm().max(T::one());
        (0..D).all(|d| p[d] >= self.lo[d] - tol && p[d] <= self.hi[d] + tol)
    }
}

/// A fully broken spring, located at the pair midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackSegment<T: Real, const D: usize> {
    pub bond: usize,
    pub midpoint: SVector<T, D>,
    /// Unit vector from `i` to `j`.
    pub direction: SVector<T, D>,
}

/// A crack segment stamped with the time its bond broke.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackRecord<T: Real, const D: usize> {
    pub time: T,
    pub segment: CrackSegment<T, D>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Link {
    neighbor: usize,
    bond: usize,
}

#[derive(Debug, Clone)]
pub struct BondNetwork<T: Real> {
    bonds: Vec<SpringBond<T>>,
    offsets: Vec<usize>,
    links: Vec<Link>,
}

impl<T: Real> BondNetwork<T> {
    /// Bonds every pair within the kernel support at the reference
    /// configuration, except pairs cut by a seam.
    pub fn build<const D: usize>(
        positions: &[SVector<T, D>],
        kernel: &KernelConfig<T, D>,
        seams: &[Seam<T, D>],
    ) -> Result<Self, BondError> {
        let radius = kernel.support_radius();
        let grid = SpatialGrid::new(positions, radius);
        let coincident = T::lit(1e-9) * kernel.h();
        let mut bonds = Vec::new();
        for (i, j) in grid.pairs_within(positions, radius) {
            let r0 = (positions[i] - positions[j]).norm();
            if r0 <= coincident {
                return Err(BondError::Coincident(i, j));
            }
            if seams.iter().any(|s| s.cuts(&positions[i], &positions[j])) {
                continue;
            }
            bonds.push(SpringBond::new(i, j, r0));
        }
        Ok(Self::from_bonds(positions.len(), bonds))
    }

    /// Network over an explicit bond list (pairs are canonicalised and sorted).
    pub fn from_bonds(n_particles: usize, mut bonds: Vec<SpringBond<T>>) -> Self {
        bonds.sort_by_key(|b| (b.i, b.j));
        bonds.dedup_by_key(|b| (b.i, b.j));
        let mut counts = vec![0usize; n_particles + 1];
        for b in &bonds {
            counts[b.i + 1] += 1;
            counts[b.j + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut links = vec![
            Link {
                neighbor: 0,
                bond: 0
            };
            offsets[n_particles]
        ];
        for (idx, b) in bonds.iter().enumerate() {
            links[fill[b.i]] = Link {
                neighbor: b.j,
                bond: idx,
            };
            fill[b.i] += 1;
            links[fill[b.j]] = Link {
                neighbor: b.i,
                bond: idx,
            };
            fill[b.j] += 1;
        }
        for i in 0..n_particles {
            links[offsets[i]..offsets[i + 1]].sort_by_key(|l| l.neighbor);
        }
        Self {
            bonds,
            offsets,
            links,
        }
    }

    pub fn n_particles(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn bonds(&self) -> &[SpringBond<T>] {
        &self.bonds
    }

    pub fn bond(&self, idx: usize) -> &SpringBond<T> {
        &self.bonds[idx]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// `(neighbor, bond index)` for every spring of particle `i`, ordered by neighbour.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links[self.offsets[i]..self.offsets[i + 1]]
            .iter()
            .map(|l| (l.neighbor, l.bond))
    }

    /// Neighbours through intact springs (`f_ij = 1`).
    pub fn undamaged(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(i)
            .filter(|&(_, b)| self.bonds[b].damage == T::zero())
            .map(|(j, _)| j)
    }

    /// Neighbours through damaged springs (`0 <= f_ij < 1`).
    pub fn damaged(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(i)
            .filter(|&(_, b)| self.bonds[b].damage > T::zero())
            .map(|(j, _)| j)
    }

    /// Raises the damage of one bond to `max(D_ij, d)`. Returns `true` when
    /// this call broke the bond completely.
    pub fn set_bond_damage(&mut self, idx: usize, d: T) -> Result<bool, BondError> {
        if !(d >= T::zero() && d <= T::one()) {
            return Err(BondError::DamageRange(d.as_f64()));
        }
        let bond = self.bonds.get_mut(idx).ok_or(BondError::Index(idx))?;
        let was_broken = bond.is_broken();
        if d > bond.damage {
            bond.damage = d;
        }
        Ok(!was_broken && bond.is_broken())
    }

    /// Commits `D_ij = max(D_ij, 0.5 (D_i + D_j))` for every bond. Values are
    /// computed from the frozen particle array first, then written. Returns
    /// the indices of bonds that became fully broken, ascending.
    pub fn commit_particle_damage(&mut self, particle_damage: &[T]) -> Vec<usize> {
        assert_eq!(particle_damage.len(), self.n_particles());
        let updated: Vec<T> = self
            .bonds
            .par_iter()
            .map(|b| spring_damage(b.damage, particle_damage[b.i], particle_damage[b.j]))
            .collect();
        let mut newly_broken = Vec::new();
        for (idx, (bond, d)) in self.bonds.iter_mut().zip(updated).enumerate() {
            let was_broken = bond.is_broken();
            bond.damage = d;
            if !was_broken && bond.is_broken() {
                newly_broken.push(idx);
            }
        }
        newly_broken
    }

    /// Fraction of particle `i`'s springs with `f_ij = 0`; 1 for an isolated particle.
    pub fn broken_bond_fraction(&self, i: usize) -> T {
        let n = self.degree(i);
        if n == 0 {
            return T::one();
        }
        let broken = self
            .neighbors(i)
            .filter(|&(_, b)| self.bonds[b].is_broken())
            .count();
        T::from_usize_lossy(broken) / T::from_usize_lossy(n)
    }

    pub fn broken_count(&self) -> usize {
        self.bonds.iter().filter(|b| b.is_broken()).count()
    }

    pub fn segment<const D: usize>(&self, idx: usize, positions: &[SVector<T, D>]) -> CrackSegment<T, D> {
        let b = &self.bonds[idx];
        let xi = positions[b.i];
        let xj = positions[b.j];
        let d = xj - xi;
        let len = d.norm();
        CrackSegment {
            bond: idx,
            midpoint: (xi + xj) * T::lit(0.5),
            direction: if len > T::zero() { d / len } else { d },
        }
    }

    /// One segment per fully broken bond at the given positions.
    pub fn crack_segments<const D: usize>(&self, positions: &[SVector<T, D>]) -> Vec<CrackSegment<T, D>> {
        (0..self.bonds.len())
            .filter(|&k| self.bonds[k].is_broken())
            .map(|k| self.segment(k, positions))
            .collect()
    }
}

pub const CRACK_CSV_HEADER: &str = "time,mx,my,mz,dx,dy,dz";

/// Writes crack records as CSV; coordinates beyond `D` are written as 0.
pub fn write_crack_csv<T: Real, const D: usize, W: Write>(
    mut out: W,
    records: &[CrackRecord<T, D>],
) -> io::Result<()> {
    writeln!(out, "{CRACK_CSV_HEADER}")?;
    for r in records {
        write_crack_row(&mut out, r)?;
    }
    Ok(())
}

pub fn write_crack_row<T: Real, const D: usize, W: Write>(
    out: &mut W,
    r: &CrackRecord<T, D>,
) -> io::Result<()> {
    let c = |v: &SVector<T, D>, k: usize| if k < D { v[k].as_f64() } else { 0.0 };
    let m = &r.segment.midpoint;
    let d = &r.segment.direction;
    writeln!(
        out,
        "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
        r.time.as_f64(),
        c(m, 0),
        c(m, 1),
        c(m, 2),
        c(d, 0),
        c(d, 1),
        c(d, 2)
    )
}
