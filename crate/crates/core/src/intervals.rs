//! Closed real intervals and finite unions of them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let out = Interval::new(self.lo.max(other.lo), self.hi.min(other.hi));
        (!out.is_empty()).then_some(out)
    }
}

/// Sorted, pairwise disjoint intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn from_intervals(mut items: Vec<Interval>) -> Self {
        items.retain(|i| !i.is_empty());
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut parts: Vec<Interval> = Vec::with_capacity(items.len());
        for i in items {
            match parts.last_mut() {
                Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
                _ => parts.push(i),
            }
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let k = self.parts.partition_point(|p| p.hi < x);
        self.parts.get(k).is_some_and(|p| p.contains(x))
    }

    pub fn clip(&self, window: &Interval) -> Self {
        Self {
            parts: self.parts.iter().filter_map(|p| p.intersect(window)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merges_overlaps_and_touching() {
        let u = IntervalUnion::from_intervals(vec![
            Interval::new(2.0, 3.0),
            Interval::new(0.0, 1.0),
            Interval::new(0.5, 1.5),
            Interval::new(3.0, 4.0),
        ]);
        assert_eq!(u.parts().len(), 2);
        assert!((u.measure() - 3.5).abs() < 1e-15);
        assert!(u.contains(3.0) && !u.contains(1.75));
        let c = u.clip(&Interval::new(1.0, 2.5));
        assert!((c.measure() - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn measure_matches_grid_count(raw in prop::collection::vec((0.0f64..10.0, 0.0f64..2.0), 0..8)) {
            let items: Vec<_> = raw.iter().map(|&(lo, w)| Interval::new(lo, lo + w)).collect();
            let u = IntervalUnion::from_intervals(items.clone());
            let step = 1e-3;
            let hits = (0..12_000).filter(|k| {
                let x = (*k as f64 + 0.5) * step;
                items.iter().any(|i| i.contains(x))
            }).count();
            prop_assert!((hits as f64 * step - u.measure()).abs() <= 2.0 * step * (items.len() as f64 + 1.0));
            prop_assert!(u.measure() <= items.iter().map(Interval::len).sum::<f64>() + 1e-12);
        }
    }
}
