//! Piecewise linear extension of vertex fields over the triangulation, with
//! exact quadrature of products of extensions.
//!
//! Per triangle the squared extension integrates in closed form through the
//! 3x3 mass form. Disks are replaced by their inscribed regular 64-gon
//! (relative area error below 2.1e-3), so boundary-crossing triangles can be
//! clipped to convex polygons and integrated by a midpoint rule that is
//! exact for quadratics. All quadrature is therefore exact on the polygonal
//! region; only the disk-to-polygon substitution is approximate.

use crate::contact::PennyGraph;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::triangulate::{Triangle, Triangulation};

type Point = (f64, f64);

/// Number of sides of the inscribed polygon standing in for a disk.
pub const DISK_SIDES: usize = 64;

/// A vertex field read through the triangulation as a continuous function.
#[derive(Clone, Copy)]
pub struct PlField<'a> {
    pub tri: &'a Triangulation,
    pub field: &'a ScalarField,
}

impl<'a> PlField<'a> {
    pub fn new(tri: &'a Triangulation, field: &'a ScalarField) -> Self {
        PlField { tri, field }
    }

    /// Value at `p` by barycentric interpolation in the containing triangle.
    /// Points on shared edges give the same value from either side.
    pub fn eval(&self, p: Point) -> Result<f64> {
        match self.tri.locate(p) {
            Some((idx, w)) => {
                let t = &self.tri.triangles[idx];
                Ok(w[0] * self.field.values[t.vertices[0]]
                    + w[1] * self.field.values[t.vertices[1]]
                    + w[2] * self.field.values[t.vertices[2]])
            }
            None => Err(Error::OutsideMesh(p.0, p.1)),
        }
    }

    /// Affine extension of triangle `idx` evaluated at `p`, without any
    /// containment check.
    pub fn eval_in(&self, idx: usize, p: Point) -> f64 {
        let t = &self.tri.triangles[idx];
        let [a, b, c] = t.points;
        let denom = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        let w1 = ((p.0 - a.0) * (c.1 - a.1) - (p.1 - a.1) * (c.0 - a.0)) / denom;
        let w2 = ((b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)) / denom;
        let w0 = 1.0 - w1 - w2;
        w0 * self.field.values[t.vertices[0]]
            + w1 * self.field.values[t.vertices[1]]
            + w2 * self.field.values[t.vertices[2]]
    }

    fn corner_values(&self, idx: usize) -> [f64; 3] {
        let t = &self.tri.triangles[idx];
        [
            self.field.values[t.vertices[0]],
            self.field.values[t.vertices[1]],
            self.field.values[t.vertices[2]],
        ]
    }
}

/// Integration region for squared extensions.
#[derive(Debug, Clone, Copy)]
pub enum Region {
    /// One full triangle of the mesh, by index.
    Triangle(usize),
    /// Disk of the given radius, realized as its inscribed regular 64-gon.
    Disk { center: Point, radius: f64 },
}

/// Exact integral of the squared affine interpolant over a full triangle:
/// Area/12 * ((f1+f2+f3)^2 + f1^2 + f2^2 + f3^2).
pub fn triangle_square_integral(area: f64, f: [f64; 3]) -> f64 {
    let s = f[0] + f[1] + f[2];
    area / 12.0 * (s * s + f[0] * f[0] + f[1] * f[1] + f[2] * f[2])
}

/// Bilinear version of the closed form for two interpolants on one triangle.
pub fn triangle_product_integral(area: f64, u: [f64; 3], v: [f64; 3]) -> f64 {
    let su = u[0] + u[1] + u[2];
    let sv = v[0] + v[1] + v[2];
    area / 12.0 * (su * sv + u[0] * v[0] + u[1] * v[1] + u[2] * v[2])
}

/// Vertices of the inscribed regular polygon standing in for the disk.
pub fn disk_polygon(center: Point, radius: f64) -> Vec<Point> {
    (0..DISK_SIDES)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / DISK_SIDES as f64;
            (center.0 + radius * t.cos(), center.1 + radius * t.sin())
        })
        .collect()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Clip a convex subject polygon against a convex ccw clip polygon
/// (Sutherland-Hodgman). Both stay convex, so the output is convex.
fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut poly: Vec<Point> = subject.to_vec();
    for k in 0..clip.len() {
        if poly.is_empty() {
            return poly;
        }
        let a = clip[k];
        let b = clip[(k + 1) % clip.len()];
        let mut next = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let dp = orient(a, b, p);
            let dq = orient(a, b, q);
            if dp >= 0.0 {
                next.push(p);
            }
            if (dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0) {
                let t = dp / (dp - dq);
                next.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
        poly = next;
    }
    poly
}

/// Quadrature of a quadratic integrand over a convex ccw polygon: fan, then
/// the edge-midpoint rule on each fan triangle (exact for quadratics).
fn quadratic_polygon_integral(poly: &[Point], mut g: impl FnMut(Point) -> f64) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 1..poly.len() - 1 {
        let (a, b, c) = (poly[0], poly[k], poly[k + 1]);
        let area = orient(a, b, c) / 2.0;
        if area <= 0.0 {
            continue;
        }
        let m1 = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let m2 = ((b.0 + c.0) / 2.0, (b.1 + c.1) / 2.0);
        let m3 = ((c.0 + a.0) / 2.0, (c.1 + a.1) / 2.0);
        total += area / 3.0 * (g(m1) + g(m2) + g(m3));
    }
    total
}

/// Integral of the product of two extensions over a convex ccw polygon.
///
/// Full mesh triangles inside the polygon use the closed form; triangles
/// crossing the boundary are clipped and integrated by exact quadrature.
/// Regions outside the mesh contribute nothing.
pub fn integrate_pl_product_polygon(u: &PlField, v: &PlField, polygon: &[Point]) -> f64 {
    assert!(std::ptr::eq(u.tri, v.tri), "fields must share one mesh");
    if polygon.len() < 3 {
        return 0.0;
    }
    let min = polygon.iter().fold((f64::INFINITY, f64::INFINITY), |m, p| {
        (m.0.min(p.0), m.1.min(p.1))
    });
    let max = polygon
        .iter()
        .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |m, p| {
            (m.0.max(p.0), m.1.max(p.1))
        });
    let inside = |p: Point| {
        (0..polygon.len()).all(|k| orient(polygon[k], polygon[(k + 1) % polygon.len()], p) >= 0.0)
    };
    let mut total = 0.0;
    for idx in u.tri.triangles_in_rect(min, max) {
        let t = &u.tri.triangles[idx];
        if t.points.iter().all(|&p| inside(p)) {
            total += triangle_product_integral(t.area(), u.corner_values(idx), v.corner_values(idx));
        } else {
            let clipped = clip_convex(&t.points, polygon);
            if clipped.len() >= 3 {
                total += quadratic_polygon_integral(&clipped, |p| {
                    u.eval_in(idx, p) * v.eval_in(idx, p)
                });
            }
        }
    }
    total
}

/// Integral of the squared extension over a region. An empty intersection
/// with the mesh gives 0.
pub fn integrate_pl_square(pl: &PlField, region: Region) -> f64 {
    match region {
        Region::Triangle(idx) => {
            let t = &pl.tri.triangles[idx];
            triangle_square_integral(t.area(), pl.corner_values(idx))
        }
        Region::Disk { center, radius } => {
            let gon = disk_polygon(center, radius);
            integrate_pl_product_polygon(pl, pl, &gon)
        }
    }
}

/// Smallest constant C with f1^2 + f2^2 + f3^2 <= C * integral of the
/// squared interpolant, over all corner values: the reciprocal of the
/// smallest eigenvalue of the 3x3 mass form. Equals 12 / Area.
pub fn trace_constant(t: &Triangle) -> f64 {
    let area = t.area();
    let m = nalgebra::Matrix3::new(
        2.0, 1.0, 1.0, //
        1.0, 2.0, 1.0, //
        1.0, 1.0, 2.0,
    ) * (area / 12.0);
    let eigen = nalgebra::SymmetricEigen::new(m);
    let min = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    1.0 / min
}

/// Ratio E(f)^2(p) * R^2 / integral of E(f)^2 over the disk of radius R at
/// p, for f harmonic on the ball of radius ceil(2R) around the vertex
/// nearest p. The supremum over a probe set is the empirical constant of
/// the planar mean value inequality.
///
/// `r_min` is the smallest admissible radius (callers default it to four
/// times the facial degree bound).
pub fn planar_mvi_ratio(
    g: &PennyGraph,
    pl: &PlField,
    p: Point,
    radius: f64,
    r_min: f64,
) -> Result<f64> {
    if radius < r_min {
        return Err(Error::InvalidInput(format!(
            "radius {radius} below the admissible minimum {r_min}"
        )));
    }
    let (idx, _) = pl.tri.locate(p).ok_or(Error::OutsideMesh(p.0, p.1))?;
    let t = &pl.tri.triangles[idx];
    let nearest = (0..3)
        .min_by(|&i, &j| {
            let di = (t.points[i].0 - p.0).hypot(t.points[i].1 - p.1);
            let dj = (t.points[j].0 - p.0).hypot(t.points[j].1 - p.1);
            di.partial_cmp(&dj).unwrap()
        })
        .map(|i| t.vertices[i])
        .unwrap();
    let ball = crate::contact::ball(g, nearest, (2.0 * radius).ceil() as u32)?;
    let worst = crate::field::max_laplacian_on(g, pl.field, &ball)?;
    if worst > crate::field::HARMONIC_TOL {
        return Err(Error::InvalidInput(format!(
            "field is not harmonic near the probe point: max |Lf| = {worst:e}"
        )));
    }
    let gon = disk_polygon(p, radius);
    for &q in &gon {
        if pl.tri.locate(q).is_none() {
            return Err(Error::OutsideMesh(q.0, q.1));
        }
    }
    let value = pl.eval(p)?;
    let denom = integrate_pl_product_polygon(pl, pl, &gon);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(value * value * radius * radius / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::build_contact_graph;
    use crate::faces::trace_faces;
    use crate::packing::{generate_lattice, LatticeKind};
    use rand::{Rng, SeedableRng};

    fn mesh(l: u32) -> (PennyGraph, Triangulation) {
        let g = build_contact_graph(&generate_lattice(LatticeKind::Square, l)).unwrap();
        let faces = trace_faces(&g).unwrap();
        let t = crate::triangulate::triangulate_window(&g, &faces).unwrap();
        (g, t)
    }

    #[test]
    fn eval_matches_vertices_edges_and_centroids() {
        let (g, t) = mesh(2);
        let f = ScalarField::from_coords(&g, |x, y| 2.0 * x - y + 0.25);
        let pl = PlField::new(&t, &f);
        for v in 0..g.len() {
            let p = g.coords(v);
            assert_eq!(pl.eval(p).unwrap(), f.values[v]);
        }
        // Any affine function is reproduced exactly everywhere.
        for &p in &[(0.5, 0.25), (-1.25, 0.75), (0.125, -1.5)] {
            assert!((pl.eval(p).unwrap() - (2.0 * p.0 - p.1 + 0.25)).abs() < 1e-12);
        }
        let tri = &t.triangles[0];
        let centroid = (
            (tri.points[0].0 + tri.points[1].0 + tri.points[2].0) / 3.0,
            (tri.points[0].1 + tri.points[1].1 + tri.points[2].1) / 3.0,
        );
        let mean = (f.values[tri.vertices[0]] + f.values[tri.vertices[1]] + f.values[tri.vertices[2]]) / 3.0;
        assert!((pl.eval(centroid).unwrap() - mean).abs() < 1e-12);
        assert!(pl.eval((50.0, 50.0)).is_err());
    }

    #[test]
    fn evaluation_is_continuous_across_shared_edges() {
        let (g, t) = mesh(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let f = ScalarField::from_values((0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let pl = PlField::new(&t, &f);
        // Pair triangles by shared (sorted) vertex edges.
        let mut by_edge: std::collections::HashMap<(usize, usize), Vec<usize>> =
            std::collections::HashMap::new();
        for (idx, tri) in t.triangles.iter().enumerate() {
            for k in 0..3 {
                let a = tri.vertices[k];
                let b = tri.vertices[(k + 1) % 3];
                by_edge.entry((a.min(b), a.max(b))).or_default().push(idx);
            }
        }
        let mut tested = 0;
        for (&(a, b), tris) in by_edge.iter() {
            if tris.len() != 2 {
                continue;
            }
            let pa = g.coords(a);
            let pb = g.coords(b);
            for _ in 0..4 {
                let s: f64 = rng.gen_range(0.05..0.95);
                let p = (pa.0 + s * (pb.0 - pa.0), pa.1 + s * (pb.1 - pa.1));
                let v0 = pl.eval_in(tris[0], p);
                let v1 = pl.eval_in(tris[1], p);
                assert!((v0 - v1).abs() < 1e-10);
                tested += 1;
            }
            if tested >= 100 {
                break;
            }
        }
        assert!(tested >= 100);
    }

    #[test]
    fn closed_form_matches_the_stated_examples() {
        assert!((triangle_square_integral(1.0, [1.0, 1.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((triangle_square_integral(1.0, [1.0, -1.0, 0.0]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_monte_carlo() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let a = (0.0, 0.0);
        let b = (1.7, 0.3);
        let c = (0.4, 1.9);
        let area = orient(a, b, c) / 2.0;
        let f = [0.8, -1.3, 2.1];
        let exact = triangle_square_integral(area, f);
        let mut acc = 0.0;
        let samples = 200_000;
        for _ in 0..samples {
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            let su = u.sqrt();
            let (w0, w1, w2) = (1.0 - su, su * (1.0 - v), su * v);
            let val = w0 * f[0] + w1 * f[1] + w2 * f[2];
            acc += val * val;
        }
        let estimate = acc / samples as f64 * area;
        assert!((estimate - exact).abs() < 0.01 * exact.abs());
    }

    #[test]
    fn quadrature_is_quadratic_in_the_field() {
        let (g, t) = mesh(3);
        let f = ScalarField::from_coords(&g, |x, y| x - 0.3 * y + 0.7);
        let f2 = f.scaled(2.5);
        let pl = PlField::new(&t, &f);
        let pl2 = PlField::new(&t, &f2);
        let region = Region::Disk { center: (0.1, -0.2), radius: 2.0 };
        let i1 = integrate_pl_square(&pl, region);
        let i2 = integrate_pl_square(&pl2, region);
        assert!((i2 - 2.5 * 2.5 * i1).abs() < 1e-12 * i2.abs());
    }

    #[test]
    fn constant_field_disk_integral_is_the_polygon_area() {
        let (g, t) = mesh(6);
        let f = ScalarField::constant(g.len(), 1.0);
        let pl = PlField::new(&t, &f);
        let r = 3.0;
        let integral = integrate_pl_square(&pl, Region::Disk { center: (0.0, 0.0), radius: r });
        let gon_area = 0.5 * DISK_SIDES as f64 * r * r * (std::f64::consts::TAU / DISK_SIDES as f64).sin();
        assert!((integral - gon_area).abs() < 1e-9);
        let disk_area = std::f64::consts::PI * r * r;
        assert!((integral - disk_area).abs() / disk_area < 2.1e-3);
    }

    #[test]
    fn disk_integrals_are_monotone_and_additive() {
        let (g, t) = mesh(6);
        let f = ScalarField::from_coords(&g, |x, y| x + 0.5 * y);
        let pl = PlField::new(&t, &f);
        let mut prev = 0.0;
        for r in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let i = integrate_pl_square(&pl, Region::Disk { center: (0.2, 0.1), radius: r });
            assert!(i >= prev);
            prev = i;
        }
        // Split a rectangle into two halves; integrals add up.
        let rect = vec![(-2.0, -1.0), (2.0, -1.0), (2.0, 1.5), (-2.0, 1.5)];
        let left = vec![(-2.0, -1.0), (0.3, -1.0), (0.3, 1.5), (-2.0, 1.5)];
        let right = vec![(0.3, -1.0), (2.0, -1.0), (2.0, 1.5), (0.3, 1.5)];
        let whole = integrate_pl_product_polygon(&pl, &pl, &rect);
        let parts = integrate_pl_product_polygon(&pl, &pl, &left)
            + integrate_pl_product_polygon(&pl, &pl, &right);
        assert!((whole - parts).abs() < 1e-10 * whole.abs().max(1.0));
    }

    fn random_triangle(rng: &mut impl Rng) -> Triangle {
        loop {
            let pts: Vec<Point> = (0..3)
                .map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
                .collect();
            let area = orient(pts[0], pts[1], pts[2]) / 2.0;
            if area > 0.05 {
                let poly = crate::faces::FacePolygon {
                    vertex_ids: vec![0, 1, 2],
                    points: pts.clone(),
                    area,
                };
                return crate::triangulate::triangulate_face(&poly, 0).unwrap().remove(0);
            }
        }
    }

    #[test]
    fn trace_constant_identity_and_inequality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let t = random_triangle(&mut rng);
            let c = trace_constant(&t);
            assert!((c * t.area() - 12.0).abs() < 1e-12 * 12.0);
            for _ in 0..50 {
                let f = [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ];
                let lhs = f[0] * f[0] + f[1] * f[1] + f[2] * f[2];
                let rhs = c * triangle_square_integral(t.area(), f);
                assert!(lhs <= rhs * (1.0 + 1e-9));
            }
        }
        // The equilateral side-1 triangle gives 12 / (sqrt(3)/4) = 16 sqrt(3).
        let s = 3.0_f64.sqrt() / 2.0;
        let poly = crate::faces::FacePolygon {
            vertex_ids: vec![0, 1, 2],
            points: vec![(0.0, 0.0), (1.0, 0.0), (0.5, s)],
            area: s / 2.0,
        };
        let t = crate::triangulate::triangulate_face(&poly, 0).unwrap().remove(0);
        assert!((trace_constant(&t) - 16.0 * 3.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn planar_mvi_constant_field_hits_one_over_pi() {
        let (g, t) = mesh(14);
        let f = ScalarField::constant(g.len(), 2.0);
        let pl = PlField::new(&t, &f);
        let ratio = planar_mvi_ratio(&g, &pl, (0.0, 0.0), 5.0, 0.0).unwrap();
        let inv_pi = 1.0 / std::f64::consts::PI;
        assert!((ratio - inv_pi).abs() < 2.1e-3);

        let x_field = ScalarField::from_coords(&g, |x, _| x);
        let plx = PlField::new(&t, &x_field);
        let ratio = planar_mvi_ratio(&g, &plx, (0.0, 0.0), 5.0, 0.0).unwrap();
        assert!(ratio.abs() < 1e-20);

        // Disk poking outside the mesh is rejected.
        assert!(planar_mvi_ratio(&g, &pl, (12.0, 12.0), 5.0, 0.0).is_err());
        // Radius below the admissible minimum is rejected.
        assert!(planar_mvi_ratio(&g, &pl, (0.0, 0.0), 5.0, 16.0).is_err());
    }
}
