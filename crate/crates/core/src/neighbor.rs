//! Uniform hash grid for fixed-radius pair queries.

use std::collections::HashMap;

use nalgebra::SVector;

use crate::num::Real;

type CellKey = [i64; 3];

/// Points bucketed into cubic cells of side `cell_size`.
#[derive(Debug, Clone)]
pub struct SpatialGrid<T: Real, const D: usize> {
    cell_size: T,
    cells: HashMap<CellKey, Vec<usize>>,
}

impl<T: Real, const D: usize> SpatialGrid<T, D> {
    pub fn new(points: &[SVector<T, D>], cell_size: T) -> Self {
        assert!(cell_size > T::zero(), "cell size must be positive");
        let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell_size)).or_default().push(i);
        }
        Self { cell_size, cells }
    }

    fn key(p: &SVector<T, D>, cell_size: T) -> CellKey {
        let mut k = [0i64; 3];
        for (d, slot) in k.iter_mut().enumerate().take(D) {
            *slot = (p[d] / cell_size).floor().to_i64().unwrap_or(i64::MAX);
        }
        k
    }

    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    /// All unordered pairs `(i, j)`, `i < j`, with `|x_i - x_j| <= radius`.
    ///
    /// `radius` must not exceed the cell size. Output is sorted.
    pub fn pairs_within(&self, points: &[SVector<T, D>], radius: T) -> Vec<(usize, usize)> {
        assert!(radius <= self.cell_size, "query radius exceeds cell size");
        let r2 = radius * radius;
        let mut pairs = Vec::new();
        let offsets = neighbor_offsets(D);
        for (key, members) in &self.cells {
            for off in &offsets {
                let other = [key[0] + off[0], key[1] + off[1], key[2] + off[2]];
                let Some(candidates) = self.cells.get(&other) else {
                    continue;
                };
                for &i in members {
                    for &j in candidates {
                        if i < j && (points[i] - points[j]).norm_squared() <= r2 {
                            pairs.push((i, j));
                        }
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// Indices of points within `radius` of `x`, sorted.
    pub fn query(&self, points: &[SVector<T, D>], x: &SVector<T, D>, radius: T) -> Vec<usize> {
        assert!(radius <= self.cell_size, "query radius exceeds cell size");
        let r2 = radius * radius;
        let key = Self::key(x, self.cell_size);
        let mut out = Vec::new();
        for off in neighbor_offsets(D) {
            let other = [key[0] + off[0], key[1] + off[1], key[2] + off[2]];
            if let Some(c) = self.cells.get(&other) {
                out.extend(c.iter().copied().filter(|&j| (points[j] - x).norm_squared() <= r2));
            }
        }
        out.sort_unstable();
        out
    }
}

fn neighbor_offsets(dim: usize) -> Vec<[i64; 3]> {
    let range = |active: bool| if active { -1..=1 } else { 0..=0 };
    let mut out = Vec::new();
    for a in range(dim > 0) {
        for b in range(dim > 1) {
            for c in range(dim > 2) {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// O(n²) reference used to validate the grid.
pub fn brute_force_pairs<T: Real, const D: usize>(
    points: &[SVector<T, D>],
    radius: T,
) -> Vec<(usize, usize)> {
    let r2 = radius * radius;
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm_squared() <= r2 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Vector2, Vector3};
    use proptest::prelude::*;

    #[test]
    fn negative_coordinates_are_bucketed() {
        let pts = vec![Vector2::new(-0.05, -0.05), Vector2::new(0.05, 0.05)];
        let g = SpatialGrid::new(&pts, 0.2);
        assert_eq!(g.pairs_within(&pts, 0.2), vec![(0, 1)]);
        assert_eq!(g.query(&pts, &Vector2::new(0.0, 0.0), 0.1), vec![0, 1]);
    }

    proptest! {
        #[test]
        fn grid_matches_brute_force_2d(
            raw in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..400),
            radius in 0.1f64..1.5,
        ) {
            let pts: Vec<_> = raw.iter().map(|&(x, y)| Vector2::new(x, y)).collect();
            let g = SpatialGrid::new(&pts, radius);
            prop_assert_eq!(g.pairs_within(&pts, radius), brute_force_pairs(&pts, radius));
        }

        #[test]
        fn grid_matches_brute_force_3d(
            raw in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0), 1..300),
            radius in 0.1f64..1.0,
        ) {
            let pts: Vec<_> = raw.iter().map(|&(x, y, z)| Vector3::new(x, y, z)).collect();
            let g = SpatialGrid::new(&pts, radius);
            prop_assert_eq!(g.pairs_within(&pts, radius), brute_force_pairs(&pts, radius));
        }
    }
}
