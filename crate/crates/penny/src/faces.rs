//! Faces of the embedded contact graph, recovered from the rotation system.
//!
//! Bounded faces are traced counterclockwise (turning number +1); the unique
//! outer walk of each component has turning number -1. Walks may revisit a
//! vertex (pendant edges and cut vertices inside a face), so corners are
//! counted with multiplicity and areas come from the shoelace sum over the
//! whole walk.

use std::collections::HashMap;

use crate::contact::{PennyGraph, VertexSet};
use crate::error::{Error, Result};

/// A closed walk of directed edges bounding one face.
#[derive(Debug, Clone)]
pub struct FaceWalk {
    /// Corner vertex ids in walk order; edge t goes from `vertices[t]` to
    /// `vertices[(t + 1) % len]`. Ids may repeat.
    pub vertices: Vec<usize>,
    /// +1 for bounded faces, -1 for the outer walk.
    pub turning: i32,
    pub outer: bool,
    /// Signed shoelace area of the walk (positive for bounded faces).
    pub area: f64,
}

impl FaceWalk {
    /// Facial degree: the number of corners of the walk.
    pub fn degree(&self) -> usize {
        self.vertices.len()
    }
}

/// All faces of a graph, one walk per directed-edge orbit.
#[derive(Debug, Clone)]
pub struct FaceSet {
    walks: Vec<FaceWalk>,
    /// Owning face of each directed edge.
    edge_face: HashMap<(usize, usize), usize>,
    max_bounded_degree: usize,
}

impl FaceSet {
    pub fn walks(&self) -> &[FaceWalk] {
        &self.walks
    }

    pub fn walk(&self, id: usize) -> &FaceWalk {
        &self.walks[id]
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    /// Face owning the directed edge (tail, head).
    pub fn face_of_directed_edge(&self, tail: usize, head: usize) -> Option<usize> {
        self.edge_face.get(&(tail, head)).copied()
    }

    /// Largest facial degree over bounded faces; 0 when none exist.
    pub fn max_bounded_degree(&self) -> usize {
        self.max_bounded_degree
    }

    pub fn bounded(&self) -> impl Iterator<Item = (usize, &FaceWalk)> {
        self.walks.iter().enumerate().filter(|(_, w)| !w.outer)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "faces": self.walks.iter().map(|w| serde_json::json!({
                "degree": w.degree(),
                "area": w.area,
                "outer": w.outer,
                "walk": w.vertices,
            })).collect::<Vec<_>>(),
            "D": self.max_bounded_degree,
        })
    }
}

/// Signed shoelace area of a closed coordinate walk. Valid for walks with
/// repeated vertices; edges traversed in both directions cancel.
pub fn polygon_area(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (x0, y0) = points[i];
        let (x1, y1) = points[(i + 1) % n];
        twice += x0 * y1 - x1 * y0;
    }
    twice / 2.0
}

/// Interior angle of the face at corner `t` of the walk, in (0, 2pi].
///
/// Measured counterclockwise from the outgoing edge direction to the
/// reversed incoming direction; a pendant tip wraps the full 2pi.
fn interior_angle(g: &PennyGraph, walk: &[usize], t: usize) -> f64 {
    let n = walk.len();
    let prev = walk[(t + n - 1) % n];
    let v = walk[t];
    let next = walk[(t + 1) % n];
    let (vx, vy) = g.coords(v);
    let dir_out = (g.coords(next).1 - vy).atan2(g.coords(next).0 - vx);
    let dir_back = (g.coords(prev).1 - vy).atan2(g.coords(prev).0 - vx);
    let gap = (dir_back - dir_out).rem_euclid(std::f64::consts::TAU);
    if gap == 0.0 {
        std::f64::consts::TAU
    } else {
        gap
    }
}

/// Interior angles of a walk, one per corner (repeated coordinates contribute
/// one angle per occurrence).
pub fn walk_interior_angles(g: &PennyGraph, walk: &FaceWalk) -> Vec<f64> {
    (0..walk.vertices.len())
        .map(|t| interior_angle(g, &walk.vertices, t))
        .collect()
}

/// Trace all face walks of the rotation system.
///
/// After arriving at `v` along a directed edge, the walk departs along the
/// clockwise successor of the reversed edge around `v`, which keeps the face
/// on the left. Walks partition the directed edges; per component exactly
/// one walk is the outer face.
pub fn trace_faces(g: &PennyGraph) -> Result<FaceSet> {
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    let mut walks: Vec<FaceWalk> = Vec::new();

    for tail in 0..g.len() {
        for &head in g.neighbors(tail) {
            if edge_face.contains_key(&(tail, head)) {
                continue;
            }
            let id = walks.len();
            let mut vertices = Vec::new();
            let (mut a, mut b) = (tail, head);
            loop {
                edge_face.insert((a, b), id);
                vertices.push(a);
                // Predecessor of the reversed edge in ccw order around b.
                let nbrs = g.neighbors(b);
                let i = nbrs
                    .iter()
                    .position(|&w| w == a)
                    .expect("adjacency is symmetric");
                let next = nbrs[(i + nbrs.len() - 1) % nbrs.len()];
                a = b;
                b = next;
                if (a, b) == (tail, head) {
                    break;
                }
            }

            let turn_sum: f64 = (0..vertices.len())
                .map(|t| std::f64::consts::PI - interior_angle(g, &vertices, t))
                .sum();
            let turning = (turn_sum / std::f64::consts::TAU).round();
            if (turn_sum / std::f64::consts::TAU - turning).abs() > 1e-6 {
                return Err(Error::GeometryInconsistency(format!(
                    "face walk {vertices:?} has non-integer turning {turn_sum}"
                )));
            }
            let turning = turning as i32;
            if turning != 1 && turning != -1 {
                return Err(Error::GeometryInconsistency(format!(
                    "face walk {vertices:?} has turning number {turning}, expected +1 or -1"
                )));
            }
            let points: Vec<(f64, f64)> = vertices.iter().map(|&v| g.coords(v)).collect();
            let area = polygon_area(&points);
            walks.push(FaceWalk {
                vertices,
                turning,
                outer: turning == -1,
                area,
            });
        }
    }

    // One outer walk per component with edges, and Euler's formula holds.
    let mut outer_per_component = vec![0usize; g.component_count()];
    let mut faces_per_component = vec![0usize; g.component_count()];
    for w in &walks {
        let c = g.component_of(w.vertices[0]);
        faces_per_component[c] += 1;
        if w.outer {
            outer_per_component[c] += 1;
        }
    }
    let mut verts_per_component = vec![0usize; g.component_count()];
    let mut dir_edges_per_component = vec![0usize; g.component_count()];
    for v in 0..g.len() {
        verts_per_component[g.component_of(v)] += 1;
        dir_edges_per_component[g.component_of(v)] += g.degree(v);
    }
    for c in 0..g.component_count() {
        if dir_edges_per_component[c] == 0 {
            continue; // isolated vertex, no walks
        }
        if outer_per_component[c] != 1 {
            return Err(Error::GeometryInconsistency(format!(
                "component {c} has {} outer walks",
                outer_per_component[c]
            )));
        }
        let euler = verts_per_component[c] as i64 - (dir_edges_per_component[c] / 2) as i64
            + faces_per_component[c] as i64;
        if euler != 2 {
            return Err(Error::GeometryInconsistency(format!(
                "component {c} violates Euler's formula: V - E + F = {euler}"
            )));
        }
    }

    let max_bounded_degree = walks
        .iter()
        .filter(|w| !w.outer)
        .map(|w| w.degree())
        .max()
        .unwrap_or(0);

    Ok(FaceSet {
        walks,
        edge_face,
        max_bounded_degree,
    })
}

/// Corner coordinates of a bounded face, in walk order.
#[derive(Debug, Clone)]
pub struct FacePolygon {
    pub vertex_ids: Vec<usize>,
    pub points: Vec<(f64, f64)>,
    pub area: f64,
}

/// Extract the polygon of a bounded face. Errors on the outer walk.
pub fn face_polygon(g: &PennyGraph, walk: &FaceWalk) -> Result<FacePolygon> {
    if walk.outer {
        return Err(Error::InvalidInput(
            "face_polygon called on the outer face".into(),
        ));
    }
    let points: Vec<(f64, f64)> = walk.vertices.iter().map(|&v| g.coords(v)).collect();
    let area = polygon_area(&points);
    Ok(FacePolygon {
        vertex_ids: walk.vertices.clone(),
        points,
        area,
    })
}

/// Vertices lying on outer walks, plus isolated vertices. For a finite window
/// of an infinite graph this is the truncation rim.
pub fn outer_rim(g: &PennyGraph, faces: &FaceSet) -> VertexSet {
    let mut ids = Vec::new();
    for w in faces.walks() {
        if w.outer {
            ids.extend_from_slice(&w.vertices);
        }
    }
    for v in 0..g.len() {
        if g.degree(v) == 0 {
            ids.push(v);
        }
    }
    VertexSet::new(ids)
}
