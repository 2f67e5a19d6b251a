//! Contact graph of a disk packing, with combinatorial metric primitives.
//!
//! Vertices are disk centers; an edge joins two vertices whose centers are at
//! unit distance (within the packing tolerance). Neighbor lists are kept in
//! counterclockwise angular order, which fixes a rotation system and hence
//! the planar embedding used by face tracing.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::packing::{validate_packing, DiskPacking, SpatialHash};

/// Embedded contact graph. Immutable after construction; queries are pure.
#[derive(Debug, Clone)]
pub struct PennyGraph {
    coords: Vec<(f64, f64)>,
    /// Neighbor ids sorted counterclockwise by the angle of the edge vector.
    adjacency: Vec<Vec<usize>>,
    component: Vec<usize>,
    component_count: usize,
    tolerance: f64,
}

impl PennyGraph {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self, v: usize) -> (f64, f64) {
        self.coords[v]
    }

    pub fn all_coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Undirected edges as (i, j) pairs with i < j, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            for &j in nbrs {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.len() {
            return Err(Error::InvalidInput(format!(
                "vertex id {v} out of range (graph has {} vertices)",
                self.len()
            )));
        }
        Ok(())
    }

    /// BFS distances from `x0`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, x0: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[x0] = Some(0);
        queue.push_back(x0);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.coords.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>(),
            "edges": self.edges().iter().map(|&(i, j)| vec![i, j]).collect::<Vec<_>>(),
        })
    }
}

/// Sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    ids: Vec<usize>,
}

impl VertexSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet { ids }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.ids.iter().copied()
    }

    /// Membership mask over a graph with `n` vertices.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.ids {
            m[v] = true;
        }
        m
    }
}

/// Build the contact graph of a valid packing.
///
/// Edge rule: (i, j) is an edge iff the center distance is within
/// `tolerance` of 1. Rejects overlapping packings with their validation
/// report. Runs in expected O(n) via the cell-size-1 spatial hash.
pub fn build_contact_graph(packing: &DiskPacking) -> Result<PennyGraph> {
    let report = validate_packing(packing);
    if !report.ok {
        return Err(Error::InvalidPacking(report));
    }
    let centers = packing.centers();
    let tol = packing.tolerance();
    let hash = SpatialHash::build(centers);
    let n = centers.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &c) in centers.iter().enumerate() {
        for j in hash.near(c) {
            if j <= i {
                continue;
            }
            let d = ((c.0 - centers[j].0).powi(2) + (c.1 - centers[j].1).powi(2)).sqrt();
            if (d - 1.0).abs() <= tol {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }

    for (v, nbrs) in adjacency.iter_mut().enumerate() {
        if nbrs.len() > 6 {
            return Err(Error::GeometryInconsistency(format!(
                "vertex {v} has degree {} > 6",
                nbrs.len()
            )));
        }
        let (x, y) = centers[v];
        nbrs.sort_by(|&a, &b| {
            let ta = (centers[a].1 - y).atan2(centers[a].0 - x);
            let tb = (centers[b].1 - y).atan2(centers[b].0 - x);
            ta.partial_cmp(&tb).unwrap()
        });
        // Two unit edges sharing a direction would force coincident centers,
        // so ties cannot occur in a valid packing.
        for w in 0..nbrs.len() {
            let u = (w + 1) % nbrs.len();
            if nbrs.len() > 1 {
                let ta = (centers[nbrs[w]].1 - y).atan2(centers[nbrs[w]].0 - x);
                let tb = (centers[nbrs[u]].1 - y).atan2(centers[nbrs[u]].0 - x);
                let gap = (tb - ta).rem_euclid(std::f64::consts::TAU);
                if gap < 1e-9 {
                    return Err(Error::GeometryInconsistency(format!(
                        "vertex {v} has two edges in the same direction"
                    )));
                }
            }
        }
    }

    // Component labels in BFS order from the lowest unvisited id.
    let mut component = vec![usize::MAX; n];
    let mut component_count = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::new();
        component[start] = component_count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if component[w] == usize::MAX {
                    component[w] = component_count;
                    queue.push_back(w);
                }
            }
        }
        component_count += 1;
    }

    Ok(PennyGraph {
        coords: centers.to_vec(),
        adjacency,
        component,
        component_count,
        tolerance: tol,
    })
}

/// Length of the shortest edge path between `x` and `y`, or `None` across
/// components.
pub fn graph_distance(g: &PennyGraph, x: usize, y: usize) -> Result<Option<u32>> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if g.component_of(x) != g.component_of(y) {
        return Ok(None);
    }
    if x == y {
        return Ok(Some(0));
    }
    let mut dist = vec![None; g.len()];
    let mut queue = VecDeque::new();
    dist[x] = Some(0u32);
    queue.push_back(x);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                if w == y {
                    return Ok(Some(d + 1));
                }
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

/// Combinatorial ball of radius `r` around `x0`.
pub fn ball(g: &PennyGraph, x0: usize, r: u32) -> Result<VertexSet> {
    g.check_vertex(x0)?;
    let mut ids = Vec::new();
    let mut dist = vec![None; g.len()];
    let mut queue = VecDeque::new();
    dist[x0] = Some(0u32);
    queue.push_back(x0);
    ids.push(x0);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        if d == r {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                ids.push(w);
                queue.push_back(w);
            }
        }
    }
    Ok(VertexSet::new(ids))
}

/// Vertex boundary: vertices outside `omega` adjacent to it.
pub fn vertex_boundary(g: &PennyGraph, omega: &VertexSet) -> VertexSet {
    let mask = omega.mask(g.len());
    let mut ids = Vec::new();
    for v in omega.iter() {
        for &w in g.neighbors(v) {
            if !mask[w] {
                ids.push(w);
            }
        }
    }
    VertexSet::new(ids)
}
