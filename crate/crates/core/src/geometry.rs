//! User placement in the unit square, fixed-radius neighborhoods, and the
//! virtual cluster grid.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use rand::Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Closed-ball test `|self - other| <= r`. Every range check in the crate goes through here.
    pub fn within(self, other: Point, r: f64) -> bool {
        self.dist2(other) <= r * r
    }
}

/// Positions of `n` users in `[0, 1]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    points: Vec<Point>,
}

impl Placement {
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "placement needs at least one user".into(),
            ));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y))
        {
            return Err(Error::InvalidParameter(format!(
                "point ({}, {}) outside the unit square",
                p.x, p.y
            )));
        }
        Ok(Self { points })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, user: usize) -> Point {
        self.points[user]
    }

    pub fn within(&self, a: usize, b: usize, r: f64) -> bool {
        self.points[a].within(self.points[b], r)
    }

    /// Drops a single user; indices above `user` shift down by one.
    pub fn without(&self, user: usize) -> Result<Self> {
        let mut points = self.points.clone();
        points.remove(user);
        Self::from_points(points)
    }
}

/// `n` i.i.d. uniform points in the unit square.
pub fn sample_placement<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Placement> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "number of users n must be >= 1".into(),
        ));
    }
    let points = (0..n)
        .map(|_| Point::new(rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    Ok(Placement { points })
}

/// Symmetric, irreflexive adjacency of the random geometric graph.
/// Each list is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbors {
    adj: Vec<Vec<usize>>,
}

impl Neighbors {
    pub fn of(&self, user: usize) -> &[usize] {
        &self.adj[user]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// All pairs within distance `r`, found through a uniform hash grid of cell width `r`
/// so only the 3x3 block of cells around each user is scanned.
pub fn neighbors(placement: &Placement, r: f64) -> Result<Neighbors> {
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {r}"
        )));
    }
    let key = |p: Point| ((p.x / r).floor() as i64, (p.y / r).floor() as i64);
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in placement.points.iter().enumerate() {
        cells.entry(key(p)).or_default().push(i);
    }

    let mut adj = vec![Vec::new(); placement.n()];
    for (i, &p) in placement.points.iter().enumerate() {
        let (cx, cy) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = cells.get(&(cx + dx, cy + dy)) else {
                    continue;
                };
                for &j in bucket {
                    if j != i && p.within(placement.points[j], r) {
                        adj[i].push(j);
                    }
                }
            }
        }
        adj[i].sort_unstable();
    }
    Ok(Neighbors { adj })
}

/// Axis-aligned grid of square clusters with edge `r / sqrt(2)`, anchored at the origin.
/// Cell ids are row-major: `row * cells_per_axis + col`, rows along y.
#[derive(Debug, Clone)]
pub struct ClusterGrid {
    side: f64,
    cells_per_axis: usize,
    assignment: Vec<usize>,
}

impl ClusterGrid {
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn num_cells(&self) -> usize {
        self.cells_per_axis * self.cells_per_axis
    }

    /// Cell id of every user.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cell_of(&self, user: usize) -> usize {
        self.assignment[user]
    }

    /// `(col, row)` of a cell id.
    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.cells_per_axis, cell / self.cells_per_axis)
    }

    /// Users grouped by cell, each group in ascending user order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_cells()];
        for (user, &cell) in self.assignment.iter().enumerate() {
            out[cell].push(user);
        }
        out
    }
}

pub fn cluster_partition(placement: &Placement, r: f64) -> Result<ClusterGrid> {
    if !(r > 0.0 && r <= SQRT_2) {
        return Err(Error::InvalidParameter(format!(
            "cluster radius must lie in (0, sqrt 2], got {r}"
        )));
    }
    let side = r / SQRT_2;
    let cells_per_axis = (1.0 / side).ceil() as usize;
    let last = cells_per_axis - 1;
    let index = |v: f64| ((v / side).floor() as usize).min(last);
    let assignment = placement
        .points
        .iter()
        .map(|p| index(p.y) * cells_per_axis + index(p.x))
        .collect();
    Ok(ClusterGrid {
        side,
        cells_per_axis,
        assignment,
    })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn placement_strategy() -> impl Strategy<Value = Placement> {
        prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..300).prop_map(|pts| {
            Placement::from_points(pts.into_iter().map(|(x, y)| Point::new(x, y)).collect())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn adjacency_symmetric_irreflexive_exact(p in placement_strategy(), r in 0.001f64..1.5) {
            let nb = neighbors(&p, r).unwrap();
            for i in 0..p.n() {
                prop_assert!(!nb.contains(i, i));
                for j in 0..p.n() {
                    if i != j {
                        let expected = p.point(i).within(p.point(j), r);
                        prop_assert_eq!(nb.contains(i, j), expected);
                        prop_assert_eq!(nb.contains(i, j), nb.contains(j, i));
                    }
                }
            }
        }
    }
}
