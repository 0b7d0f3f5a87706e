//! Integer boxes `Π [-r_a, r_a]` with a dense lexicographic indexing.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexBox {
    radii: Vec<i64>,
}

/// `|y|_∞`.
pub fn sup_norm(y: &[i64]) -> i64 {
    y.iter().map(|v| v.abs()).max().unwrap_or(0)
}

/// `|y - z|_∞`.
pub fn sup_dist(y: &[i64], z: &[i64]) -> i64 {
    y.iter().zip(z).map(|(a, b)| (a - b).abs()).max().unwrap_or(0)
}

impl IndexBox {
    pub fn new(radii: Vec<i64>) -> Self {
        assert!(radii.iter().all(|&r| r >= 0), "box radii must be nonnegative");
        Self { radii }
    }

    pub fn cube(dim: usize, radius: i64) -> Self {
        Self::new(vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[i64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.iter().map(|&r| (2 * r + 1) as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        y.len() == self.dim() && y.iter().zip(&self.radii).all(|(v, r)| v.abs() <= *r)
    }

    /// Position of `y` in lexicographic order, first coordinate most significant.
    pub fn index_of(&self, y: &[i64]) -> Option<usize> {
        if !self.contains(y) {
            return None;
        }
        let mut idx = 0usize;
        for (v, r) in y.iter().zip(&self.radii) {
            idx = idx * (2 * r + 1) as usize + (v + r) as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Vec<i64> {
        let mut y = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let side = (2 * self.radii[a] + 1) as usize;
            y[a] = (idx % side) as i64 - self.radii[a];
            idx /= side;
        }
        y
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Indices of box points `z ≠ y` with `|z - y|_∞ ≤ reach`.
    pub fn neighbours(&self, y: &[i64], reach: i64) -> Vec<usize> {
        let window = IndexBox::cube(self.dim(), reach);
        let mut out = Vec::with_capacity(window.len());
        let mut z = vec![0; self.dim()];
        for offset in window.points() {
            if offset.iter().all(|&o| o == 0) {
                continue;
            }
            for a in 0..self.dim() {
                z[a] = y[a] + offset[a];
            }
            if let Some(i) = self.index_of(&z) {
                out.push(i);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lexicographic_order() {
        let b = IndexBox::cube(2, 1);
        let pts: Vec<_> = b.points().collect();
        assert_eq!(pts.first().unwrap(), &vec![-1, -1]);
        assert_eq!(pts[1], vec![-1, 0]);
        assert_eq!(pts.last().unwrap(), &vec![1, 1]);
        assert_eq!(b.len(), 9);
    }

    #[test]
    fn neighbours_clip_at_boundary() {
        let b = IndexBox::cube(2, 2);
        assert_eq!(b.neighbours(&[2, 2], 1).len(), 3);
        assert_eq!(b.neighbours(&[0, 0], 1).len(), 8);
    }

    proptest! {
        #[test]
        fn index_round_trip(radii in prop::collection::vec(0i64..4, 1..4), seed in 0usize..10_000) {
            let b = IndexBox::new(radii);
            let i = seed % b.len();
            let p = b.point(i);
            prop_assert!(b.contains(&p));
            prop_assert_eq!(b.index_of(&p), Some(i));
        }
    }
}
