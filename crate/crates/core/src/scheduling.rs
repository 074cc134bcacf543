//! Choosing a set of simultaneously active, interference-free links.
//!
//! Three schedulers are provided:
//!
//! * [`mis_exact`]: maximum independent set by branch-and-bound, for small graphs.
//! * [`mis_greedy`]: minimum-degree greedy maximal independent set.
//! * [`cluster_schedule`]: the virtual-cluster construction. Users are bucketed
//!   into square cells of side `r / sqrt 2`, a cell is good when one of its
//!   users can be served by another user of the same cell, and good cells are
//!   activated in row-major order unless their link conflicts with one already
//!   active. Each activated link can only block cells within two rows/columns
//!   that come later in row-major order, so at least `ceil(G / 17)` of the `G`
//!   good cells end up active.

use std::collections::BTreeSet;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::caching::NetworkState;
use crate::geometry::cluster_partition;
use crate::graph::Graph;
use crate::linkplan::{enumerate_potential_links, interferes, PotentialLink};
use crate::{Error, Result};

/// Default vertex cap for [`mis_exact`].
pub const DEFAULT_EXACT_CAP: usize = 40;
/// Hard ceiling on the exact solver's cap (bitset width).
pub const MAX_EXACT_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Greedy,
    Cluster,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::Cluster => "cluster",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            "cluster" => Ok(Method::Cluster),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheduler `{other}` (expected exact, greedy or cluster)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Active vertex (link) indices, ascending.
    pub active: Vec<usize>,
    pub method: Method,
    /// Number of good clusters; only set by the cluster scheduler.
    pub good_clusters: Option<usize>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }
}

/// Maximum independent set by branch-and-bound.
///
/// Vertices of degree at most one are taken greedily (always safe). Otherwise the
/// search branches include/exclude on a maximum-degree vertex, lowest index on
/// ties, and prunes when the chosen count plus the remaining candidates cannot
/// beat the incumbent.
pub fn mis_exact(graph: &Graph, cap: usize) -> Result<Schedule> {
    let cap = cap.min(MAX_EXACT_CAP);
    let n = graph.num_vertices();
    if n > cap {
        return Err(Error::SizeLimit { vertices: n, cap });
    }
    let masks: Vec<u128> = (0..n)
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .fold(0u128, |m, &u| m | (1u128 << u))
        })
        .collect();
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };

    let mut best = Incumbent { size: 0, set: 0 };
    branch(all, 0, &masks, &mut best);

    Ok(Schedule {
        active: bits(best.set).collect(),
        method: Method::Exact,
        good_clusters: None,
    })
}

struct Incumbent {
    size: u32,
    set: u128,
}

fn bits(mut set: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            return None;
        }
        let v = set.trailing_zeros() as usize;
        set &= set - 1;
        Some(v)
    })
}

fn branch(mut cand: u128, mut chosen: u128, masks: &[u128], best: &mut Incumbent) {
    loop {
        if chosen.count_ones() + cand.count_ones() <= best.size {
            return;
        }
        if cand == 0 {
            *best = Incumbent {
                size: chosen.count_ones(),
                set: chosen,
            };
            return;
        }
        // degree <= 1 vertices belong to some maximum independent set
        let low = bits(cand).find(|&v| (masks[v] & cand).count_ones() <= 1);
        match low {
            Some(v) => {
                chosen |= 1 << v;
                cand &= !(masks[v] | (1 << v));
            }
            None => break,
        }
    }

    let mut pivot = 0;
    let mut pivot_deg = 0;
    for v in bits(cand) {
        let d = (masks[v] & cand).count_ones();
        if d > pivot_deg {
            pivot = v;
            pivot_deg = d;
        }
    }
    let bit = 1u128 << pivot;
    branch(cand & !(masks[pivot] | bit), chosen | bit, masks, best);
    branch(cand & !bit, chosen, masks, best);
}

/// Minimum-degree greedy: take the lowest-degree remaining vertex (lowest index on
/// ties), delete it and its neighbors, repeat. The result is a maximal independent set.
pub fn mis_greedy(graph: &Graph) -> Schedule {
    let n = graph.num_vertices();
    let mut degree: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut active = Vec::new();

    while let Some((_, v)) = queue.pop_first() {
        active.push(v);
        alive[v] = false;
        let removed: Vec<usize> = graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| alive[u])
            .collect();
        for &u in &removed {
            alive[u] = false;
            queue.remove(&(degree[u], u));
        }
        for &u in &removed {
            for &w in graph.neighbors(u) {
                if alive[w] {
                    queue.remove(&(degree[w], w));
                    degree[w] -= 1;
                    queue.insert((degree[w], w));
                }
            }
        }
    }
    active.sort_unstable();
    Schedule {
        active,
        method: Method::Greedy,
        good_clusters: None,
    }
}

/// Virtual-cluster scheduler. Indices in the returned schedule refer to
/// [`enumerate_potential_links`] order.
pub fn cluster_schedule(state: &NetworkState) -> Result<Schedule> {
    let links = enumerate_potential_links(state)?;
    cluster_schedule_on(state, &links)
}

/// As [`cluster_schedule`], reusing an already enumerated link list (sorted by `(rx, tx)`).
pub fn cluster_schedule_on(state: &NetworkState, links: &[PotentialLink]) -> Result<Schedule> {
    let placement = state.placement();
    let r = state.radius();
    let grid = cluster_partition(placement, r.min(SQRT_2))?;
    let cells = grid.cells_per_axis();

    // lowest (rx, tx) intra-cluster link per cell; links arrive in that order
    let mut selected: Vec<Option<usize>> = vec![None; grid.num_cells()];
    for (i, link) in links.iter().enumerate() {
        let cell = grid.cell_of(link.rx);
        if grid.cell_of(link.tx) == cell && selected[cell].is_none() {
            selected[cell] = Some(i);
        }
    }
    let good = selected.iter().filter(|s| s.is_some()).count();

    let mut active_in_cell: Vec<Option<usize>> = vec![None; grid.num_cells()];
    let mut active = Vec::new();
    for cell in 0..grid.num_cells() {
        let Some(candidate) = selected[cell] else {
            continue;
        };
        let (col, row) = grid.coords(cell);
        // cells three or more apart are separated by more than r
        let blocked = (row.saturating_sub(2)..=(row + 2).min(cells - 1))
            .flat_map(|rr| {
                (col.saturating_sub(2)..=(col + 2).min(cells - 1)).map(move |cc| rr * cells + cc)
            })
            .filter_map(|c| active_in_cell[c])
            .any(|other| interferes(&links[candidate], &links[other], placement, r));
        if !blocked {
            active_in_cell[cell] = Some(candidate);
            active.push(candidate);
        }
    }
    active.sort_unstable();
    Ok(Schedule {
        active,
        method: Method::Cluster,
        good_clusters: Some(good),
    })
}
