//! Crack-path analytics on broken-bond clouds: tip position and speed,
//! branching, crack angle and fracture-surface orientation.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::geometry::{CrackFrame, FrameKind};
use super::output::SnapshotRow;
use crate::bonds::CrackRecord;
use crate::neighbor::SpatialGrid;

/// Linkage distance, in particle spacings, for crack clustering.
pub const LINK_SPACINGS: f64 = 3.0;
/// Smallest frontier cluster counted as a crack branch.
pub const MIN_BRANCH_SIZE: usize = 2;
/// Smallest cluster used for a crack-angle fit.
pub const MIN_ANGLE_POINTS: usize = 10;
/// Growth length, in particle spacings, over which the kink angle is fitted.
pub const KINK_SPACINGS: f64 = 15.0;

/// Summary written to `metrics.toml`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackMetrics {
    pub broken_bonds: usize,
    pub primary_bonds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initiation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_onset: Option<f64>,
    pub branch_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_arrival: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_speed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_speed_time: Option<f64>,
    /// Acute kink angles (degrees) between the notch direction and each crack
    /// cluster leaving the notch, largest cluster first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub crack_angles: Vec<f64>,
    /// The same clusters fitted over their full extent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cluster_angles: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_intersected: Option<bool>,
    /// Angle (degrees) between the best-fit fracture surface normal and the axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_normal_angle: Option<f64>,
    /// Fraction of the main fracture cloud more than one kernel support away
    /// from the driven zones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_zone_fraction: Option<f64>,
    /// Number of crack clusters with at least [`MIN_ANGLE_POINTS`] bonds.
    pub crack_clusters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact: Option<ImpactMetrics>,
    /// `(time, tip position, tip speed)` at each sample time; written to `tip.csv`.
    #[serde(skip)]
    pub tip_history: Vec<[f64; 3]>,
}

/// Deformation and fracture summary of a projectile striking a wall.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpactMetrics {
    /// Largest radius within two spacings of the wall over the initial radius.
    pub face_radius_ratio: f64,
    /// Largest radius in the rear third over the initial radius.
    pub rear_radius_ratio: f64,
    /// Current length over initial length.
    pub length_ratio: f64,
    /// Median radius of the bonds broken in the first breaking step over the
    /// initial radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_crack_radius_ratio: Option<f64>,
    /// Number of occupied 15° azimuthal sectors among broken bonds near the face.
    pub cracked_sectors: usize,
}

fn v3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::from(a)
}

/// Single-linkage clusters of `points` (gap `link`), as index lists sorted
/// by decreasing size, ties broken by smallest member.
pub fn clusters(points: &[Vector3<f64>], link: f64) -> Vec<Vec<usize>> {
    if points.is_empty() {
        return Vec::new();
    }
    let grid = SpatialGrid::new(points, link);
    let mut uf = UnionFind::<usize>::new(points.len());
    for (i, j) in grid.pairs_within(points, link) {
        uf.union(i, j);
    }
    let labels = uf.into_labeling();
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, r) in labels.into_iter().enumerate() {
        by_root.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Clusters of a sorted 1-D coordinate list split at gaps larger than `gap`,
/// keeping only those with at least `min_size` members.
pub fn clusters_1d(mut values: Vec<f64>, gap: f64, min_size: usize) -> usize {
    values.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut size = 0;
    for k in 0..values.len() {
        if k > 0 && values[k] - values[k - 1] > gap {
            if size >= min_size {
                count += 1;
            }
            size = 0;
        }
        size += 1;
    }
    if size >= min_size {
        count += 1;
    }
    count
}

/// Indices of records in the crack cluster touching the origin.
pub fn primary_cluster(records: &[CrackRecord<f64, 3>], frame: &CrackFrame) -> Vec<usize> {
    let link = LINK_SPACINGS * frame.dp;
    let pts: Vec<_> = records.iter().map(|r| r.segment.midpoint).collect();
    let origin = v3(frame.origin);
    let mut members: Vec<usize> = clusters(&pts, link)
        .into_iter()
        .filter(|c| c.iter().any(|&i| (pts[i] - origin).norm() <= link))
        .flatten()
        .collect();
    members.sort_unstable();
    members
}

/// Furthest advance of the primary crack along the notch axis at each sample time.
pub fn tip_positions(records: &[CrackRecord<f64, 3>], primary: &[usize], frame: &CrackFrame, times: &[f64]) -> Vec<f64> {
    let origin = v3(frame.origin);
    let axis = v3(frame.axis);
    times
        .iter()
        .map(|&t| {
            primary
                .iter()
                .filter(|&&i| records[i].time <= t)
                .map(|&i| (records[i].segment.midpoint - origin).dot(&axis))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Central difference over a five-sample window (narrower at the ends).
pub fn tip_speed(times: &[f64], tips: &[f64]) -> Vec<f64> {
    let n = times.len();
    (0..n)
        .map(|k| {
            let w = 2.min(k).min(n - 1 - k);
            let (lo, hi) = if w > 0 {
                (k - w, k + w)
            } else if k + 1 < n {
                (k, k + 1)
            } else if k > 0 {
                (k - 1, k)
            } else {
                return 0.0;
            };
            (tips[hi] - tips[lo]) / (times[hi] - times[lo])
        })
        .collect()
}

/// Branch onset and branch count from the advancing crack front.
///
/// The front of a slice is the set of bonds broken during that slice whose
/// midpoints lie within [`LINK_SPACINGS`] spacings of the furthest radial
/// extent of the crack so far; bonds that fail behind the front (widening of
/// the damaged band) are ignored. The onset is the first slice whose front
/// splits into two or more transverse clusters; the count is the number of
/// clusters in the last slice with a nonempty front.
pub fn branching(
    records: &[CrackRecord<f64, 3>],
    primary: &[usize],
    frame: &CrackFrame,
    times: &[f64],
) -> (Option<f64>, usize) {
    let origin = v3(frame.origin);
    let transverse = v3(frame.transverse);
    let gap = LINK_SPACINGS * frame.dp;
    let radius = |i: usize| (records[i].segment.midpoint - origin).norm();
    let mut onset = None;
    let mut count = 0;
    let mut reach = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for &t in times {
        let fresh: Vec<usize> = primary
            .iter()
            .copied()
            .filter(|&i| records[i].time > prev && records[i].time <= t)
            .collect();
        prev = t;
        reach = fresh.iter().map(|&i| radius(i)).fold(reach, f64::max);
        let front: Vec<f64> = fresh
            .iter()
            .filter(|&&i| radius(i) >= reach - gap)
            .map(|&i| (records[i].segment.midpoint - origin).dot(&transverse))
            .collect();
        let c = clusters_1d(front, gap, MIN_BRANCH_SIZE);
        if c == 0 {
            continue;
        }
        if c >= 2 && onset.is_none() {
            onset = Some(t);
        }
        count = c;
    }
    (onset, count)
}

/// In-plane coordinates `(axis, transverse)` relative to the origin.
fn in_plane(p: &Vector3<f64>, frame: &CrackFrame) -> Vector2<f64> {
    let d = p - v3(frame.origin);
    Vector2::new(d.dot(&v3(frame.axis)), d.dot(&v3(frame.transverse)))
}

/// Acute angle (degrees) between the notch axis and the principal direction
/// of an in-plane point cloud.
pub fn principal_angle(points: &[Vector2<f64>]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let c = points.iter().sum::<Vector2<f64>>() / n;
    let mut cov = Matrix2::zeros();
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let k = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let dir = eig.eigenvectors.column(k);
    Some(dir[1].abs().atan2(dir[0].abs()).to_degrees())
}

/// Angles of every crack cluster with at least [`MIN_ANGLE_POINTS`] bonds
/// that starts within a few spacings of the notch tip, largest first.
///
/// Each angle is a kink direction. It is fitted to the bonds broken up to the
/// earliest time at which a tip-connected cluster reaches [`KINK_SPACINGS`]
/// from the tip (or to all bonds if none does). Damage added later, typically
/// by waves reflected from the edges, does not tilt it.
pub fn crack_angles(records: &[CrackRecord<f64, 3>], frame: &CrackFrame) -> Vec<f64> {
    let kink = KINK_SPACINGS * frame.dp;
    let origin = v3(frame.origin);
    let mut times: Vec<f64> = records.iter().map(|r| r.time).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let upto = |t: f64| -> Vec<CrackRecord<f64, 3>> { records.iter().filter(|r| r.time <= t).copied().collect() };
    let reached = |t: f64| {
        let early = upto(t);
        tip_clusters(&early, frame)
            .iter()
            .any(|c| c.iter().any(|&i| (early[i].segment.midpoint - origin).norm() >= kink))
    };
    // first index whose prefix reaches the kink distance; clusters only grow
    let (mut lo, mut hi) = (0, times.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if reached(times[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let early = match times.get(lo) {
        Some(&t) => upto(t),
        None => records.to_vec(),
    };
    tip_clusters(&early, frame)
        .into_iter()
        .filter_map(|c| {
            let plane: Vec<_> = c.iter().map(|&i| in_plane(&early[i].segment.midpoint, frame)).collect();
            principal_angle(&plane)
        })
        .collect()
}

/// Clusters with at least [`MIN_ANGLE_POINTS`] bonds starting within a few
/// spacings of the notch tip, largest first.
fn tip_clusters(records: &[CrackRecord<f64, 3>], frame: &CrackFrame) -> Vec<Vec<usize>> {
    let reach = 2.0 * LINK_SPACINGS * frame.dp;
    let pts: Vec<_> = records.iter().map(|r| r.segment.midpoint).collect();
    let origin = v3(frame.origin);
    clusters(&pts, LINK_SPACINGS * frame.dp)
        .into_iter()
        .filter(|c| c.len() >= MIN_ANGLE_POINTS)
        .filter(|c| c.iter().any(|&i| (pts[i] - origin).norm() <= reach))
        .collect()
}

/// Whole-cluster variant of [`crack_angles`], without the kink window.
pub fn cluster_angles(records: &[CrackRecord<f64, 3>], frame: &CrackFrame) -> Vec<f64> {
    tip_clusters(records, frame)
        .into_iter()
        .filter_map(|c| {
            let plane: Vec<_> = c.iter().map(|&i| in_plane(&records[i].segment.midpoint, frame)).collect();
            principal_angle(&plane)
        })
        .collect()
}

/// Angle (degrees) between the best-fit plane normal of a 3-D cloud and `axis`.
pub fn surface_normal_angle(points: &[Vector3<f64>], axis: &Vector3<f64>) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let c = points.iter().sum::<Vector3<f64>>() / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let normal = eig.eigenvectors.column(k).into_owned();
    let cos = normal.dot(axis).abs() / axis.norm();
    Some(cos.min(1.0).acos().to_degrees())
}

/// Projectile deformation and crack layout from the final particle state.
pub fn impact_metrics(rows: &[SnapshotRow], records: &[CrackRecord<f64, 3>], frame: &CrackFrame) -> ImpactMetrics {
    let r0 = frame.radius.unwrap_or(1.0);
    let l0 = frame.domain_hi[2] - frame.domain_lo[2];
    let radial = |x: &[f64; 3]| x[0].hypot(x[1]);
    let z_max = rows.iter().map(|r| r.x[2]).fold(f64::NEG_INFINITY, f64::max);
    let z_min = rows.iter().map(|r| r.x[2]).fold(f64::INFINITY, f64::min);
    let face = rows
        .iter()
        .filter(|r| r.x[2] <= z_min + 2.0 * frame.dp)
        .map(|r| radial(&r.x))
        .fold(0.0, f64::max);
    let rear = rows
        .iter()
        .filter(|r| r.x[2] >= z_max - (z_max - z_min) / 3.0)
        .map(|r| radial(&r.x))
        .fold(0.0, f64::max);
    // initiation site: the bonds broken in the first step that broke any
    let first = records.iter().map(|c| c.time).reduce(f64::min).and_then(|t0| {
        let mut r: Vec<f64> = records
            .iter()
            .filter(|c| c.time <= t0)
            .map(|c| radial(&c.segment.midpoint.into()))
            .collect();
        r.sort_by(f64::total_cmp);
        r.get(r.len() / 2).map(|m| m / r0)
    });
    let mut sectors = [false; 24];
    for c in records {
        let m = c.segment.midpoint;
        if m.z <= z_min + 0.25 * l0 && m.x.hypot(m.y) > 0.5 * r0 {
            let phi = m.y.atan2(m.x).rem_euclid(std::f64::consts::TAU);
            sectors[((phi / std::f64::consts::TAU * 24.0) as usize).min(23)] = true;
        }
    }
    ImpactMetrics {
        face_radius_ratio: face / r0,
        rear_radius_ratio: rear / r0,
        length_ratio: (z_max - z_min + frame.dp) / l0,
        first_crack_radius_ratio: first,
        cracked_sectors: sectors.iter().filter(|&&s| s).count(),
    }
}

/// Full metric set for a finished run.
pub fn analyze(
    records: &[CrackRecord<f64, 3>],
    frame: &CrackFrame,
    times: &[f64],
    final_rows: Option<&[SnapshotRow]>,
) -> CrackMetrics {
    let mut m = CrackMetrics {
        broken_bonds: records.len(),
        ..Default::default()
    };
    let pts: Vec<_> = records.iter().map(|r| r.segment.midpoint).collect();
    let link = LINK_SPACINGS * frame.dp;
    let all = clusters(&pts, link);
    m.crack_clusters = all.iter().filter(|c| c.len() >= MIN_ANGLE_POINTS).count();
    match frame.kind {
        FrameKind::Notch => {
            let primary = primary_cluster(records, frame);
            m.primary_bonds = primary.len();
            m.initiation = primary.iter().map(|&i| records[i].time).reduce(f64::min);
            let tips = tip_positions(records, &primary, frame, times);
            let speed = tip_speed(times, &tips);
            m.tip_history = times
                .iter()
                .zip(&tips)
                .zip(&speed)
                .map(|((&t, &x), &v)| [t, x, v])
                .collect();
            if let Some((k, &v)) = speed.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
                if v > 0.0 {
                    m.peak_speed = Some(v);
                    m.peak_speed_time = Some(times[k]);
                }
            }
            let (onset, count) = branching(records, &primary, frame, times);
            m.branch_onset = onset;
            m.branch_count = count;
            m.boundary_arrival = boundary_arrival(records, &primary, frame);
            m.crack_angles = crack_angles(records, frame);
            m.cluster_angles = cluster_angles(records, frame);
            if let (Some(c), Some(r)) = (frame.hole_center, frame.hole_radius) {
                let c = v3(c);
                let d = primary
                    .iter()
                    .map(|&i| (pts[i] - c).norm())
                    .fold(f64::INFINITY, f64::min);
                if d.is_finite() {
                    m.hole_distance = Some(d);
                    m.hole_intersected = Some(d <= r + frame.dp);
                }
            }
        }
        FrameKind::Surface => {
            if let Some(main) = all.first() {
                let cloud: Vec<_> = main.iter().map(|&i| pts[i]).collect();
                m.primary_bonds = cloud.len();
                m.initiation = main.iter().map(|&i| records[i].time).reduce(f64::min);
                m.surface_normal_angle = surface_normal_angle(&cloud, &v3(frame.axis));
                if let Some([a, b]) = frame.free_zone {
                    let axis = v3(frame.axis);
                    let inside = cloud
                        .iter()
                        .filter(|p| (a..=b).contains(&p.dot(&axis)))
                        .count();
                    m.free_zone_fraction = Some(inside as f64 / cloud.len() as f64);
                }
            }
        }
        FrameKind::Impact => {
            m.initiation = records.iter().map(|r| r.time).reduce(f64::min);
            if let Some(rows) = final_rows {
                m.impact = Some(impact_metrics(rows, records, frame));
            }
        }
        FrameKind::Elastic => {}
    }
    m
}

/// First time the primary crack comes within two spacings of an in-plane
/// domain edge other than the one the notch is cut from.
pub fn boundary_arrival(records: &[CrackRecord<f64, 3>], primary: &[usize], frame: &CrackFrame) -> Option<f64> {
    let margin = 2.0 * frame.dp;
    let lo = v3(frame.domain_lo);
    let hi = v3(frame.domain_hi);
    let axis = v3(frame.axis);
    let transverse = v3(frame.transverse);
    primary
        .iter()
        .filter(|&&i| {
            let p = records[i].segment.midpoint;
            let near_end = if axis.sum() > 0.0 {
                axis.dot(&(hi - p)) <= margin
            } else {
                axis.dot(&(lo - p)) <= margin
            };
            let (tl, th) = (transverse.dot(&lo), transverse.dot(&hi));
            let t = transverse.dot(&p);
            let near_side = (t - tl.min(th)) <= margin || (tl.max(th) - t) <= margin;
            near_end || near_side
        })
        .map(|&i| records[i].time)
        .reduce(f64::min)
}
