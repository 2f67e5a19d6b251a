//! Diagonal triangulation of bounded faces.
//!
//! Every face is cut into exactly `degree - 2` triangles using only face
//! edges and diagonal segments (chords inside the face that meet the vertex
//! set only at their endpoints). The recursion clips the valid ear whose
//! triangle has the largest minimum angle; when every convex corner is
//! blocked, it splits along the segment from a blocked corner to the nearest
//! enclosed vertex and recurses on both parts. A plain first-ear pass runs
//! alongside, and the triangulation with the larger global minimum angle is
//! kept, so the output never does worse than naive clipping. Corners with
//! interior angle exactly pi (straight boundary runs, common in lattice
//! subsets) and 2*pi (pendant tips) are never ears and are consumed as their
//! neighbors go.
//!
//! The minimum-angle quality of the output is measured, not proved: the
//! reports tabulate the empirical floor per facial degree.

use crate::error::{Error, Result};
use crate::faces::{polygon_area, FacePolygon, FaceSet};
use crate::contact::PennyGraph;

const EPS: f64 = 1e-9;

type Point = (f64, f64);

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    (d.0 * d.0 + d.1 * d.1).sqrt()
}

/// Twice the signed area of triangle (a, b, c); positive when ccw.
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Interior angle at `v` between the outgoing direction to `next` and the
/// incoming direction back to `prev`, measured ccw, in (0, 2*pi].
fn corner_angle(prev: Point, v: Point, next: Point) -> f64 {
    let out = (next.1 - v.1).atan2(next.0 - v.0);
    let back = (prev.1 - v.1).atan2(prev.0 - v.0);
    let gap = (back - out).rem_euclid(std::f64::consts::TAU);
    if gap == 0.0 {
        std::f64::consts::TAU
    } else {
        gap
    }
}

/// Distance from `p` to the closed segment [a, b].
fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = ((p.0 - a.0) * ab.0 + (p.1 - a.1) * ab.1) / len2;
    let t = t.clamp(0.0, 1.0);
    dist(p, (a.0 + t * ab.0, a.1 + t * ab.1))
}

fn sign_with_tol(x: f64, tol: f64) -> i32 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

/// True when segments [a,b] and [c,d] cross or touch anywhere other than a
/// shared endpoint. Collinear overlap counts as a conflict.
fn segments_conflict(a: Point, b: Point, c: Point, d: Point) -> bool {
    let l1 = dist(a, b);
    let l2 = dist(c, d);
    let t1 = EPS * l1.max(EPS);
    let t2 = EPS * l2.max(EPS);
    let s1 = sign_with_tol(orient(a, b, c), t1);
    let s2 = sign_with_tol(orient(a, b, d), t1);
    let s3 = sign_with_tol(orient(c, d, a), t2);
    let s4 = sign_with_tol(orient(c, d, b), t2);
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    // Touching: an endpoint of one segment on the interior of the other.
    let interior_touch = |p: Point, u: Point, v: Point| {
        dist_to_segment(p, u, v) <= EPS && dist(p, u) > EPS && dist(p, v) > EPS
    };
    if s1 == 0 && interior_touch(c, a, b) {
        return true;
    }
    if s2 == 0 && interior_touch(d, a, b) {
        return true;
    }
    if s3 == 0 && interior_touch(a, c, d) {
        return true;
    }
    if s4 == 0 && interior_touch(b, c, d) {
        return true;
    }
    false
}

/// Winding number of the closed walk around `p`. Nonzero means inside.
fn winding_number(p: Point, poly: &[Point]) -> i32 {
    let mut wn = 0;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a.1 <= p.1 {
            if b.1 > p.1 && orient(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b.1 <= p.1 && orient(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

#[derive(Debug, Clone, Copy)]
struct Corner {
    id: usize,
    pt: Point,
}

/// Validity of the chord between corner positions `i` and `j` of the current
/// polygon: clear of every vertex, crossing no boundary edge, and interior
/// to the region.
fn chord_is_diagonal(poly: &[Corner], i: usize, j: usize) -> bool {
    let n = poly.len();
    let a = poly[i].pt;
    let b = poly[j].pt;
    if dist(a, b) <= EPS {
        return false;
    }
    for (k, c) in poly.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        if dist(c.pt, a) <= EPS || dist(c.pt, b) <= EPS {
            continue; // another occurrence of an endpoint coordinate
        }
        if dist_to_segment(c.pt, a, b) <= EPS {
            return false;
        }
    }
    for k in 0..n {
        let k1 = (k + 1) % n;
        if k == i || k1 == i || k == j || k1 == j {
            continue; // edges incident to the chord endpoints may share them
        }
        if segments_conflict(a, b, poly[k].pt, poly[k1].pt) {
            return false;
        }
    }
    let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    let pts: Vec<Point> = poly.iter().map(|c| c.pt).collect();
    for k in 0..n {
        if dist_to_segment(mid, pts[k], pts[(k + 1) % n]) <= EPS {
            return false;
        }
    }
    winding_number(mid, &pts) != 0
}

/// Smallest interior angle of the ccw triangle (a, b, c).
fn triangle_min_angle(a: Point, b: Point, c: Point) -> f64 {
    corner_angle(c, a, b)
        .min(corner_angle(a, b, c))
        .min(corner_angle(b, c, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EarChoice {
    /// Clip the valid ear maximizing the new triangle's minimum angle.
    MaxMinAngle,
    /// Clip the first valid ear in walk order (the plain baseline).
    FirstValid,
}

fn dump(poly: &[Corner]) -> String {
    let pts: Vec<String> = poly
        .iter()
        .map(|c| format!("{}:({:.6},{:.6})", c.id, c.pt.0, c.pt.1))
        .collect();
    pts.join(" ")
}

fn triangulate_polygon(
    poly: &[Corner],
    choice: EarChoice,
    out: &mut Vec<[Corner; 3]>,
) -> Result<()> {
    let n = poly.len();
    if n < 3 {
        return Err(Error::GeometryInconsistency(format!(
            "degenerate walk of length {n}: {}",
            dump(poly)
        )));
    }
    if n == 3 {
        if orient(poly[0].pt, poly[1].pt, poly[2].pt) <= EPS * EPS {
            return Err(Error::GeometryInconsistency(format!(
                "degenerate triangle: {}",
                dump(poly)
            )));
        }
        out.push([poly[0], poly[1], poly[2]]);
        return Ok(());
    }

    let angle_at = |i: usize| {
        corner_angle(
            poly[(i + n - 1) % n].pt,
            poly[i].pt,
            poly[(i + 1) % n].pt,
        )
    };
    let convex: Vec<usize> = (0..n)
        .filter(|&i| angle_at(i) < std::f64::consts::PI - EPS)
        .collect();
    if convex.is_empty() {
        return Err(Error::GeometryInconsistency(format!(
            "no convex corner in face walk: {}",
            dump(poly)
        )));
    }

    // Corner coordinates strictly inside the ear triangle of corner i.
    let contained = |i: usize| -> Vec<usize> {
        let p = poly[(i + n - 1) % n].pt;
        let v = poly[i].pt;
        let nx = poly[(i + 1) % n].pt;
        let mut inside = Vec::new();
        for (k, c) in poly.iter().enumerate() {
            if k == i || k == (i + n - 1) % n || k == (i + 1) % n {
                continue;
            }
            let q = c.pt;
            if dist(q, v) <= EPS {
                continue;
            }
            let t1 = EPS * dist(p, v).max(EPS);
            let t2 = EPS * dist(v, nx).max(EPS);
            let t3 = EPS * dist(nx, p).max(EPS);
            if orient(p, v, q) > t1 && orient(v, nx, q) > t2 && orient(nx, p, q) > t3 {
                inside.push(k);
            }
        }
        inside
    };

    let mut best: Option<(usize, f64)> = None;
    for &i in &convex {
        if !contained(i).is_empty() {
            continue;
        }
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        if !chord_is_diagonal(poly, prev, next) {
            continue;
        }
        let score = triangle_min_angle(poly[prev].pt, poly[i].pt, poly[next].pt);
        match choice {
            EarChoice::FirstValid => {
                best = Some((i, score));
                break;
            }
            EarChoice::MaxMinAngle => {
                if best.map_or(true, |(_, s)| score > s) {
                    best = Some((i, score));
                }
            }
        }
    }

    if let Some((i, _)) = best {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        out.push([poly[prev], poly[i], poly[next]]);
        let mut rest: Vec<Corner> = Vec::with_capacity(n - 1);
        for k in 0..n {
            if k != i {
                rest.push(poly[k]);
            }
        }
        return triangulate_polygon(&rest, choice, out);
    }

    // Every convex corner is blocked: split from one of them to the nearest
    // enclosed vertex and recurse on both parts.
    for &i in &convex {
        let mut inside = contained(i);
        if inside.is_empty() {
            continue;
        }
        inside.sort_by(|&a, &b| {
            dist(poly[a].pt, poly[i].pt)
                .partial_cmp(&dist(poly[b].pt, poly[i].pt))
                .unwrap()
        });
        for j in inside {
            if !chord_is_diagonal(poly, i, j) {
                continue;
            }
            let (lo, hi) = (i.min(j), i.max(j));
            let part_a: Vec<Corner> = (lo..=hi).map(|k| poly[k]).collect();
            let mut part_b: Vec<Corner> = (hi..n).map(|k| poly[k]).collect();
            part_b.extend((0..=lo).map(|k| poly[k]));
            if polygon_area(&part_a.iter().map(|c| c.pt).collect::<Vec<_>>()) <= 0.0
                || polygon_area(&part_b.iter().map(|c| c.pt).collect::<Vec<_>>()) <= 0.0
            {
                continue;
            }
            triangulate_polygon(&part_a, choice, out)?;
            triangulate_polygon(&part_b, choice, out)?;
            return Ok(());
        }
    }

    Err(Error::GeometryInconsistency(format!(
        "no valid ear and no valid split in face walk: {}",
        dump(poly)
    )))
}

/// One triangle of the mesh, corners in ccw order.
#[derive(Debug, Clone)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub points: [Point; 3],
    /// Interior angle at each corner.
    pub angles: [f64; 3],
    /// Length of the side from corner k to corner k + 1.
    pub side_lengths: [f64; 3],
    /// Owning face id.
    pub face: usize,
}

impl Triangle {
    fn new(corners: [Corner; 3], face: usize) -> Triangle {
        let [a, b, c] = corners;
        Triangle {
            vertices: [a.id, b.id, c.id],
            points: [a.pt, b.pt, c.pt],
            angles: [
                corner_angle(c.pt, a.pt, b.pt),
                corner_angle(a.pt, b.pt, c.pt),
                corner_angle(b.pt, c.pt, a.pt),
            ],
            side_lengths: [dist(a.pt, b.pt), dist(b.pt, c.pt), dist(c.pt, a.pt)],
            face,
        }
    }

    pub fn area(&self) -> f64 {
        orient(self.points[0], self.points[1], self.points[2]) / 2.0
    }

    pub fn min_angle(&self) -> f64 {
        self.angles[0].min(self.angles[1]).min(self.angles[2])
    }
}

fn corners_of(polygon: &FacePolygon) -> Result<Vec<Corner>> {
    if polygon.area <= 0.0 {
        return Err(Error::InvalidInput(
            "face polygon must be counterclockwise with positive area".into(),
        ));
    }
    Ok(polygon
        .vertex_ids
        .iter()
        .zip(&polygon.points)
        .map(|(&id, &pt)| Corner { id, pt })
        .collect())
}

fn check_face_triangles(polygon: &FacePolygon, tris: &[Triangle]) -> Result<()> {
    if tris.len() != polygon.points.len() - 2 {
        return Err(Error::GeometryInconsistency(format!(
            "face of degree {} produced {} triangles",
            polygon.points.len(),
            tris.len()
        )));
    }
    let total: f64 = tris.iter().map(|t| t.area()).sum();
    if (total - polygon.area).abs() > 1e-9 * polygon.area.abs().max(1.0) {
        return Err(Error::GeometryInconsistency(format!(
            "triangle areas sum to {total}, face area is {}",
            polygon.area
        )));
    }
    for t in tris {
        let sum: f64 = t.angles.iter().sum();
        if (sum - std::f64::consts::PI).abs() > 1e-9 || t.min_angle() <= 0.0 {
            return Err(Error::GeometryInconsistency(format!(
                "bad triangle angles {:?}",
                t.angles
            )));
        }
    }
    Ok(())
}

fn run_strategy(corners: &[Corner], choice: EarChoice, face_id: usize) -> Result<Vec<Triangle>> {
    let mut out = Vec::with_capacity(corners.len().saturating_sub(2));
    triangulate_polygon(corners, choice, &mut out)?;
    Ok(out.into_iter().map(|c| Triangle::new(c, face_id)).collect())
}

fn global_min_angle(tris: &[Triangle]) -> f64 {
    tris.iter().map(Triangle::min_angle).fold(f64::INFINITY, f64::min)
}

/// Diagonal triangulation of one bounded face.
///
/// Runs the max-min-angle greedy recursion and the first-ear recursion and
/// keeps the result with the larger global minimum angle (greedy wins ties).
/// One-step greedy alone can paint itself into a sliver that naive clipping
/// avoids, so the portfolio is what guarantees it never does worse.
pub fn triangulate_face(polygon: &FacePolygon, face_id: usize) -> Result<Vec<Triangle>> {
    let corners = corners_of(polygon)?;
    let greedy = run_strategy(&corners, EarChoice::MaxMinAngle, face_id)?;
    let baseline = run_strategy(&corners, EarChoice::FirstValid, face_id)?;
    let tris = if global_min_angle(&baseline) > global_min_angle(&greedy) {
        baseline
    } else {
        greedy
    };
    check_face_triangles(polygon, &tris)?;
    Ok(tris)
}

/// Plain first-ear clipping, kept as the comparison floor.
pub fn triangulate_face_baseline(polygon: &FacePolygon, face_id: usize) -> Result<Vec<Triangle>> {
    let corners = corners_of(polygon)?;
    let tris = run_strategy(&corners, EarChoice::FirstValid, face_id)?;
    check_face_triangles(polygon, &tris)?;
    Ok(tris)
}

/// Exhaustive max-min-angle triangulation by interval dynamic programming.
///
/// Only defined for faces with simple boundaries (all corner coordinates
/// distinct) and at most 12 corners; returns `None` otherwise. Used as an
/// optimality oracle for the greedy strategy.
pub fn dp_optimal_min_angle(polygon: &FacePolygon) -> Result<Option<f64>> {
    let corners = corners_of(polygon)?;
    let n = corners.len();
    if n > 12 {
        return Ok(None);
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist(corners[i].pt, corners[j].pt) <= EPS {
                return Ok(None); // repeated coordinate, boundary is not simple
            }
        }
    }
    let pts: Vec<Point> = corners.iter().map(|c| c.pt).collect();
    let usable = |i: usize, j: usize| -> bool {
        j == (i + 1) % n || i == (j + 1) % n || chord_is_diagonal(&corners, i, j)
    };
    let tri_ok = |i: usize, k: usize, j: usize| -> bool {
        if orient(pts[i], pts[k], pts[j]) <= EPS * EPS {
            return false;
        }
        for (m, &q) in pts.iter().enumerate() {
            if m == i || m == k || m == j {
                continue;
            }
            let t = EPS;
            if orient(pts[i], pts[k], q) > t && orient(pts[k], pts[j], q) > t && orient(pts[j], pts[i], q) > t {
                return false;
            }
        }
        let centroid = (
            (pts[i].0 + pts[k].0 + pts[j].0) / 3.0,
            (pts[i].1 + pts[k].1 + pts[j].1) / 3.0,
        );
        winding_number(centroid, &pts) != 0
    };
    // best[i][j]: best achievable minimum angle for the sub-polygon from
    // corner i forward to corner j (ccw), closed by the chord (i, j).
    let mut best = vec![vec![f64::NEG_INFINITY; n]; n];
    let mut order: Vec<(usize, usize)> = Vec::new();
    for gap in 1..n {
        for i in 0..n {
            order.push((i, (i + gap) % n));
        }
    }
    for (i, j) in order {
        let span = (j + n - i) % n;
        if span == 1 {
            best[i][j] = f64::INFINITY; // empty region
            continue;
        }
        if !usable(i, j) {
            continue;
        }
        let mut value = f64::NEG_INFINITY;
        let mut k = (i + 1) % n;
        while k != j {
            if best[i][k] > f64::NEG_INFINITY && best[k][j] > f64::NEG_INFINITY && tri_ok(i, k, j)
            {
                let t = triangle_min_angle(pts[i], pts[k], pts[j])
                    .min(best[i][k])
                    .min(best[k][j]);
                value = value.max(t);
            }
            k = (k + 1) % n;
        }
        best[i][j] = value;
    }
    // Close the polygon along the boundary edge (n - 1, 0).
    let answer = best[0][n - 1];
    if answer == f64::NEG_INFINITY {
        return Err(Error::GeometryInconsistency(
            "dp oracle found no triangulation of a simple face".into(),
        ));
    }
    Ok(Some(answer))
}

/// Uniform grid with unit cells used for point location.
#[derive(Debug, Clone)]
struct LocationGrid {
    x0: f64,
    y0: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl LocationGrid {
    fn build(triangles: &[Triangle]) -> LocationGrid {
        if triangles.is_empty() {
            return LocationGrid { x0: 0.0, y0: 0.0, nx: 0, ny: 0, cells: Vec::new() };
        }
        let mut min = (f64::INFINITY, f64::INFINITY);
        let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for t in triangles {
            for p in t.points {
                min.0 = min.0.min(p.0);
                min.1 = min.1.min(p.1);
                max.0 = max.0.max(p.0);
                max.1 = max.1.max(p.1);
            }
        }
        let x0 = min.0 - 0.5;
        let y0 = min.1 - 0.5;
        let nx = ((max.0 - x0).ceil() as usize + 1).max(1);
        let ny = ((max.1 - y0).ceil() as usize + 1).max(1);
        let mut cells = vec![Vec::new(); nx * ny];
        for (idx, t) in triangles.iter().enumerate() {
            let xs = [t.points[0].0, t.points[1].0, t.points[2].0];
            let ys = [t.points[0].1, t.points[1].1, t.points[2].1];
            let cx0 = ((xs.iter().cloned().fold(f64::INFINITY, f64::min) - x0).floor() as usize).min(nx - 1);
            let cx1 = ((xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x0).floor() as usize).min(nx - 1);
            let cy0 = ((ys.iter().cloned().fold(f64::INFINITY, f64::min) - y0).floor() as usize).min(ny - 1);
            let cy1 = ((ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y0).floor() as usize).min(ny - 1);
            for cx in cx0..=cx1 {
                for cy in cy0..=cy1 {
                    cells[cy * nx + cx].push(idx);
                }
            }
        }
        LocationGrid { x0, y0, nx, ny, cells }
    }

    fn candidates(&self, p: Point) -> &[usize] {
        if self.nx == 0 {
            return &[];
        }
        let cx = (p.0 - self.x0).floor();
        let cy = (p.1 - self.y0).floor();
        if cx < 0.0 || cy < 0.0 || cx >= self.nx as f64 || cy >= self.ny as f64 {
            return &[];
        }
        &self.cells[cy as usize * self.nx + cx as usize]
    }

    fn candidates_in_rect(&self, min: Point, max: Point) -> Vec<usize> {
        if self.nx == 0 {
            return Vec::new();
        }
        let cx0 = ((min.0 - self.x0).floor().max(0.0) as usize).min(self.nx - 1);
        let cx1 = ((max.0 - self.x0).floor().max(0.0) as usize).min(self.nx - 1);
        let cy0 = ((min.1 - self.y0).floor().max(0.0) as usize).min(self.ny - 1);
        let cy1 = ((max.1 - self.y0).floor().max(0.0) as usize).min(self.ny - 1);
        let mut out = Vec::new();
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                out.extend_from_slice(&self.cells[cy * self.nx + cx]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Global mesh over all bounded faces of a graph.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub triangles: Vec<Triangle>,
    /// Triangle indices per face id (empty for the outer face).
    pub face_triangles: Vec<Vec<usize>>,
    /// Facial degree per face id (0 for the outer face).
    pub face_degrees: Vec<usize>,
    pub theta_min: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    grid: LocationGrid,
}

impl Triangulation {
    /// Containing triangle and barycentric coordinates of `p`, if any.
    /// Points on shared edges resolve to the lowest triangle index.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        for &idx in self.grid.candidates(p) {
            let t = &self.triangles[idx];
            let denom = orient(t.points[0], t.points[1], t.points[2]);
            let w0 = orient(p, t.points[1], t.points[2]) / denom;
            let w1 = orient(t.points[0], p, t.points[2]) / denom;
            let w2 = orient(t.points[0], t.points[1], p) / denom;
            let tol = 1e-12;
            if w0 >= -tol && w1 >= -tol && w2 >= -tol {
                return Some((idx, [w0, w1, w2]));
            }
        }
        None
    }

    /// Triangle indices whose bounding boxes meet the given rectangle.
    pub fn triangles_in_rect(&self, min: Point, max: Point) -> Vec<usize> {
        self.grid.candidates_in_rect(min, max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut vertex_ids: Vec<usize> = Vec::new();
        for t in &self.triangles {
            vertex_ids.extend_from_slice(&t.vertices);
        }
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        let coords: std::collections::BTreeMap<usize, Point> = self
            .triangles
            .iter()
            .flat_map(|t| t.vertices.iter().copied().zip(t.points.iter().copied()))
            .collect();
        serde_json::json!({
            "vertices": vertex_ids.iter().map(|v| {
                let (x, y) = coords[v];
                serde_json::json!({"id": v, "xy": [x, y]})
            }).collect::<Vec<_>>(),
            "triangles": self.triangles.iter().map(|t| t.vertices.to_vec()).collect::<Vec<_>>(),
            "face_of_triangle": self.triangles.iter().map(|t| t.face).collect::<Vec<_>>(),
        })
    }
}

/// Triangulate every bounded face of the graph and merge into one mesh.
pub fn triangulate_window(g: &PennyGraph, faces: &FaceSet) -> Result<Triangulation> {
    let mut triangles = Vec::new();
    let mut face_triangles = vec![Vec::new(); faces.len()];
    let mut face_degrees = vec![0usize; faces.len()];
    for (face_id, walk) in faces.bounded() {
        face_degrees[face_id] = walk.degree();
        let polygon = crate::faces::face_polygon(g, walk)?;
        for t in triangulate_face(&polygon, face_id)? {
            face_triangles[face_id].push(triangles.len());
            triangles.push(t);
        }
    }
    let theta_min = triangles
        .iter()
        .map(Triangle::min_angle)
        .fold(f64::INFINITY, f64::min);
    let min_edge = triangles
        .iter()
        .flat_map(|t| t.side_lengths)
        .fold(f64::INFINITY, f64::min);
    let max_edge = triangles
        .iter()
        .flat_map(|t| t.side_lengths)
        .fold(f64::NEG_INFINITY, f64::max);
    let grid = LocationGrid::build(&triangles);
    Ok(Triangulation {
        triangles,
        face_triangles,
        face_degrees,
        theta_min,
        min_edge,
        max_edge,
        grid,
    })
}

/// Edge-length certificate and per-degree quality table.
#[derive(Debug, Clone)]
pub struct QualityReport {
    pub theta_min: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    /// (facial degree, triangle count, min angle, max edge) rows.
    pub per_degree: Vec<(usize, usize, f64, f64)>,
    /// Human-readable descriptions of edge-length violations.
    pub violations: Vec<String>,
}

impl QualityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "theta_min": crate::report::val_f64(self.theta_min),
            "min_edge": crate::report::val_f64(self.min_edge),
            "max_edge": crate::report::val_f64(self.max_edge),
            "per_degree": self.per_degree.iter().map(|&(d, n, a, e)| serde_json::json!({
                "degree": d,
                "triangles": n,
                "theta_min": crate::report::val_f64(a),
                "max_edge": crate::report::val_f64(e),
            })).collect::<Vec<_>>(),
            "violations": self.violations,
        })
    }
}

/// Check that every mesh edge has length in [1 - tol, max_facial_degree]:
/// face edges are unit, and a diagonal is a chord of a face whose boundary
/// has at most `max_facial_degree` unit edges. Violations are listed, not
/// thrown.
pub fn quality_report(t: &Triangulation, max_facial_degree: usize) -> QualityReport {
    let mut per: std::collections::BTreeMap<usize, (usize, f64, f64)> =
        std::collections::BTreeMap::new();
    let mut violations = Vec::new();
    let upper = max_facial_degree as f64;
    for (idx, tri) in t.triangles.iter().enumerate() {
        let degree = t.face_degrees[tri.face];
        let entry = per.entry(degree).or_insert((0, f64::INFINITY, 0.0));
        entry.0 += 1;
        entry.1 = entry.1.min(tri.min_angle());
        for len in tri.side_lengths {
            entry.2 = entry.2.max(len);
            if len < 1.0 - EPS {
                violations.push(format!("triangle {idx}: edge length {len} below 1"));
            }
            if len > upper {
                violations.push(format!(
                    "triangle {idx}: edge length {len} above the facial degree bound {upper}"
                ));
            }
        }
    }
    QualityReport {
        theta_min: t.theta_min,
        min_edge: t.min_edge,
        max_edge: t.max_edge,
        per_degree: per.into_iter().map(|(d, (n, a, e))| (d, n, a, e)).collect(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::build_contact_graph;
    use crate::faces::trace_faces;
    use crate::packing::{generate_lattice, DiskPacking, LatticeKind};

    fn polygon_from(points: Vec<Point>) -> FacePolygon {
        let area = polygon_area(&points);
        FacePolygon {
            vertex_ids: (0..points.len()).collect(),
            points,
            area,
        }
    }

    #[test]
    fn triangle_face_is_returned_unchanged() {
        let s = 3.0_f64.sqrt() / 2.0;
        let poly = polygon_from(vec![(0.0, 0.0), (1.0, 0.0), (0.5, s)]);
        let tris = triangulate_face(&poly, 0).unwrap();
        assert_eq!(tris.len(), 1);
        assert!((tris[0].min_angle() - std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square_splits_into_two_right_isosceles_triangles() {
        let poly = polygon_from(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let tris = triangulate_face(&poly, 0).unwrap();
        assert_eq!(tris.len(), 2);
        let min = tris.iter().map(Triangle::min_angle).fold(f64::INFINITY, f64::min);
        assert!((min - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let total: f64 = tris.iter().map(Triangle::area).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    fn rhombus_sharp_first() -> FacePolygon {
        let s = 3.0_f64.sqrt() / 2.0;
        // Start the walk at the wide corner so the first-found ear is the
        // min-angle pi/6 split while greedy still finds pi/3.
        polygon_from(vec![(1.0, 0.0), (1.5, s), (0.5, s), (0.0, 0.0)])
    }

    #[test]
    fn rhombus_greedy_picks_the_short_diagonal() {
        let poly = rhombus_sharp_first();
        let tris = triangulate_face(&poly, 0).unwrap();
        assert_eq!(tris.len(), 2);
        let min = tris.iter().map(Triangle::min_angle).fold(f64::INFINITY, f64::min);
        assert!((min - std::f64::consts::PI / 3.0).abs() < 1e-9);

        let baseline = triangulate_face_baseline(&poly, 0).unwrap();
        let base_min = baseline.iter().map(Triangle::min_angle).fold(f64::INFINITY, f64::min);
        assert!((base_min - std::f64::consts::PI / 6.0).abs() < 1e-9);
    }

    #[test]
    fn dp_oracle_matches_enumerated_optima() {
        let square = polygon_from(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let opt = dp_optimal_min_angle(&square).unwrap().unwrap();
        assert!((opt - std::f64::consts::FRAC_PI_4).abs() < 1e-12);

        let rhombus = rhombus_sharp_first();
        let opt = dp_optimal_min_angle(&rhombus).unwrap().unwrap();
        assert!((opt - std::f64::consts::PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn lattice_windows_have_the_expected_quality() {
        let g = build_contact_graph(&generate_lattice(LatticeKind::Square, 4)).unwrap();
        let faces = trace_faces(&g).unwrap();
        let t = triangulate_window(&g, &faces).unwrap();
        assert_eq!(t.triangles.len(), 2 * 8 * 8);
        assert!((t.theta_min - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
        assert!((t.min_edge - 1.0).abs() < 1e-9);
        assert!((t.max_edge - 2.0_f64.sqrt()).abs() < 1e-9);
        let q = quality_report(&t, faces.max_bounded_degree());
        assert!(q.violations.is_empty());

        let g = build_contact_graph(&generate_lattice(LatticeKind::Triangular, 4)).unwrap();
        let faces = trace_faces(&g).unwrap();
        let t = triangulate_window(&g, &faces).unwrap();
        assert!((t.theta_min - std::f64::consts::PI / 3.0).abs() < 1e-9);
        assert!((t.max_edge - 1.0).abs() < 1e-9);
        assert!(quality_report(&t, 3).violations.is_empty());
    }

    /// Two adjacent sites removed from the triangular patch: the merged hole
    /// is an 8-gon with two straight-line corners (interior angle exactly pi).
    #[test]
    fn straight_corners_in_lattice_holes_are_handled() {
        let patch = generate_lattice(LatticeKind::Triangular, 3);
        let removed: Vec<usize> = (0..patch.len())
            .filter(|&i| {
                let (x, y) = patch.centers()[i];
                let c1 = (x - 0.5).abs() < 1e-9 && (y - 3.0_f64.sqrt() / 2.0).abs() < 1e-9;
                let c2 = (x + 0.5).abs() < 1e-9 && (y - 3.0_f64.sqrt() / 2.0).abs() < 1e-9;
                !(c1 || c2)
            })
            .collect();
        let p = patch.subset(&removed);
        let g = build_contact_graph(&p).unwrap();
        let faces = trace_faces(&g).unwrap();
        assert_eq!(faces.max_bounded_degree(), 8);
        let (hole_id, hole) = faces.bounded().find(|(_, w)| w.degree() == 8).unwrap();
        let poly = crate::faces::face_polygon(&g, hole).unwrap();
        let angles: Vec<f64> = crate::faces::walk_interior_angles(&g, hole);
        let straight = angles
            .iter()
            .filter(|a| (**a - std::f64::consts::PI).abs() < 1e-9)
            .count();
        assert_eq!(straight, 2);
        let tris = triangulate_face(&poly, hole_id).unwrap();
        assert_eq!(tris.len(), 6);
        // Union of the two hexagonal cells minus their rhombic overlap.
        let total: f64 = tris.iter().map(Triangle::area).sum();
        assert!((total - 2.5 * 3.0_f64.sqrt()).abs() < 1e-9);
    }

    /// Square ring with a pendant penny inside: the 18-corner walk revisits
    /// its attachment vertex and wraps the pendant tip.
    #[test]
    fn pendant_slit_face_triangulates() {
        let mut centers = Vec::new();
        for i in -2i64..=2 {
            for j in -2i64..=2 {
                if i.abs().max(j.abs()) == 2 {
                    centers.push((i as f64, j as f64));
                }
            }
        }
        centers.push((1.0, 0.0));
        let g = build_contact_graph(&DiskPacking::with_default_tolerance(centers)).unwrap();
        let faces = trace_faces(&g).unwrap();
        let (id, walk) = faces.bounded().next().unwrap();
        assert_eq!(walk.degree(), 18);
        let poly = crate::faces::face_polygon(&g, walk).unwrap();
        let tris = triangulate_face(&poly, id).unwrap();
        assert_eq!(tris.len(), 16);
        let total: f64 = tris.iter().map(Triangle::area).sum();
        assert!((total - 16.0).abs() < 1e-9);
    }

    #[test]
    fn hexagon_face_diagonals_stay_below_the_degree_bound() {
        // Ring of six pennies with the center removed: one hexagonal face.
        let p = generate_lattice(LatticeKind::Triangular, 1);
        let ring: Vec<usize> = (0..p.len())
            .filter(|&i| p.centers()[i] != (0.0, 0.0))
            .collect();
        let g = build_contact_graph(&p.subset(&ring)).unwrap();
        let faces = trace_faces(&g).unwrap();
        assert_eq!(faces.max_bounded_degree(), 6);
        let t = triangulate_window(&g, &faces).unwrap();
        assert_eq!(t.triangles.len(), 4);
        let q = quality_report(&t, 6);
        assert!(q.violations.is_empty());
        assert!(t.max_edge < 6.0);
    }

    #[test]
    fn greedy_never_loses_to_the_baseline_on_small_corpora() {
        let mut polys = Vec::new();
        for seed in 1..=10u64 {
            let p = crate::packing::generate_random_subset(5, 0.9, 8, seed, 64).unwrap();
            let g = build_contact_graph(&p).unwrap();
            let faces = trace_faces(&g).unwrap();
            for (_, w) in faces.bounded() {
                polys.push(crate::faces::face_polygon(&g, w).unwrap());
            }
        }
        for poly in &polys {
            let greedy = triangulate_face(poly, 0).unwrap();
            let base = triangulate_face_baseline(poly, 0).unwrap();
            let gmin = greedy.iter().map(Triangle::min_angle).fold(f64::INFINITY, f64::min);
            let bmin = base.iter().map(Triangle::min_angle).fold(f64::INFINITY, f64::min);
            assert!(gmin >= bmin - 1e-12);
            if let Some(opt) = dp_optimal_min_angle(poly).unwrap() {
                assert!(gmin <= opt + 1e-9);
            }
        }
    }

    #[test]
    fn diagonals_avoid_all_face_vertices() {
        // Brute-force diagonal validity on every small face of a mixed corpus.
        let p = crate::packing::generate_random_subset(5, 0.9, 8, 3, 64).unwrap();
        let g = build_contact_graph(&p).unwrap();
        let faces = trace_faces(&g).unwrap();
        for (id, w) in faces.bounded() {
            if w.degree() > 12 {
                continue;
            }
            let poly = crate::faces::face_polygon(&g, w).unwrap();
            for t in triangulate_face(&poly, id).unwrap() {
                for k in 0..3 {
                    let a = t.points[k];
                    let b = t.points[(k + 1) % 3];
                    if (dist(a, b) - 1.0).abs() <= 1e-9 {
                        continue; // face edge
                    }
                    for &q in &poly.points {
                        if dist(q, a) <= 1e-9 || dist(q, b) <= 1e-9 {
                            continue;
                        }
                        assert!(dist_to_segment(q, a, b) > 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn point_location_resolves_ties_to_the_lowest_triangle() {
        let g = build_contact_graph(&generate_lattice(LatticeKind::Square, 2)).unwrap();
        let faces = trace_faces(&g).unwrap();
        let t = triangulate_window(&g, &faces).unwrap();
        // A vertex shared by several triangles locates in the lowest one.
        let p = g.coords(12 % g.len());
        let (idx, _) = t.locate(p).unwrap();
        for (other, tri) in t.triangles.iter().enumerate() {
            if other >= idx {
                break;
            }
            let denom = orient(tri.points[0], tri.points[1], tri.points[2]);
            let w0 = orient(p, tri.points[1], tri.points[2]) / denom;
            let w1 = orient(tri.points[0], p, tri.points[2]) / denom;
            let w2 = orient(tri.points[0], tri.points[1], p) / denom;
            assert!(w0 < -1e-12 || w1 < -1e-12 || w2 < -1e-12);
        }
        assert!(t.locate((100.0, 100.0)).is_none());
    }
}
