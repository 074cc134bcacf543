//! Potential D2D links and the protocol-model conflict graph.
//!
//! A user whose own cache holds the file it requests is served locally and is
//! never a receiver. Every other user `rx` gets one candidate link from each
//! neighbor `tx` within range that caches `requests[rx]`.
//!
//! Two links conflict when either transmitter is within range of the other
//! link's receiver, or when they share an endpoint (one radio per user).

use crate::caching::NetworkState;
use crate::geometry::{neighbors, Neighbors, Placement};
use crate::graph::Graph;
use crate::popularity::FileId;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PotentialLink {
    pub tx: usize,
    pub rx: usize,
    pub file: FileId,
}

impl PotentialLink {
    fn shares_endpoint(&self, other: &PotentialLink) -> bool {
        self.tx == other.tx || self.tx == other.rx || self.rx == other.tx || self.rx == other.rx
    }
}

/// Protocol-model conflict test between two distinct links.
pub fn interferes(a: &PotentialLink, b: &PotentialLink, placement: &Placement, r: f64) -> bool {
    placement.within(a.tx, b.rx, r) || placement.within(b.tx, a.rx, r) || a.shares_endpoint(b)
}

/// Links sorted by `(rx, tx)`.
pub fn enumerate_potential_links(state: &NetworkState) -> Result<Vec<PotentialLink>> {
    let nb = neighbors(state.placement(), state.radius())?;
    Ok(links_from_neighbors(state, &nb))
}

fn links_from_neighbors(state: &NetworkState, nb: &Neighbors) -> Vec<PotentialLink> {
    let caches = state.caches();
    let mut links = Vec::new();
    for (rx, &file) in state.requests().iter().enumerate() {
        if state.is_self_served(rx) {
            continue;
        }
        links.extend(
            nb.of(rx)
                .iter()
                .filter(|&&tx| caches[tx] == file)
                .map(|&tx| PotentialLink { tx, rx, file }),
        );
    }
    links
}

#[derive(Debug, Clone)]
pub struct ConflictGraph {
    links: Vec<PotentialLink>,
    graph: Graph,
}

impl ConflictGraph {
    pub fn links(&self) -> &[PotentialLink] {
        &self.links
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.links.len()
    }

    pub fn to_edge_list(&self) -> String {
        self.graph.to_edge_list()
    }
}

pub fn build_conflict_graph(
    links: Vec<PotentialLink>,
    placement: &Placement,
    r: f64,
) -> Result<ConflictGraph> {
    let nb = neighbors(placement, r)?;
    Ok(conflict_graph_from_neighbors(links, placement, &nb, r))
}

/// Potential links plus their conflict graph, sharing one neighbor search.
pub fn plan(state: &NetworkState) -> Result<ConflictGraph> {
    let nb = neighbors(state.placement(), state.radius())?;
    let links = links_from_neighbors(state, &nb);
    Ok(conflict_graph_from_neighbors(
        links,
        state.placement(),
        &nb,
        state.radius(),
    ))
}

fn conflict_graph_from_neighbors(
    links: Vec<PotentialLink>,
    placement: &Placement,
    nb: &Neighbors,
    r: f64,
) -> ConflictGraph {
    let n = placement.n();
    let mut by_tx = vec![Vec::new(); n];
    let mut by_rx = vec![Vec::new(); n];
    for (i, l) in links.iter().enumerate() {
        by_tx[l.tx].push(i);
        by_rx[l.rx].push(i);
    }

    let mut adj = vec![Vec::new(); links.len()];
    let mut candidates = Vec::new();
    for (a, link) in links.iter().enumerate() {
        candidates.clear();
        // receivers near our transmitter
        for &u in std::iter::once(&link.tx).chain(nb.of(link.tx)) {
            candidates.extend_from_slice(&by_rx[u]);
        }
        // transmitters near our receiver
        for &w in std::iter::once(&link.rx).chain(nb.of(link.rx)) {
            candidates.extend_from_slice(&by_tx[w]);
        }
        // shared endpoints
        candidates.extend_from_slice(&by_tx[link.tx]);
        candidates.extend_from_slice(&by_rx[link.rx]);
        candidates.extend_from_slice(&by_rx[link.tx]);
        candidates.extend_from_slice(&by_tx[link.rx]);

        adj[a].extend(
            candidates
                .iter()
                .copied()
                .filter(|&b| b != a && interferes(link, &links[b], placement, r)),
        );
    }
    ConflictGraph {
        links,
        graph: Graph::from_adjacency(adj),
    }
}
