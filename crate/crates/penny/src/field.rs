//! Scalar fields on vertices: Laplacian, Dirichlet problems, harmonicity,
//! and the discrete mean value inequality.

use crate::contact::{vertex_boundary, PennyGraph, VertexSet};
use crate::error::{Error, Result};

/// Harmonicity tolerance used by downstream checks.
pub const HARMONIC_TOL: f64 = 1e-8;

/// One real value per vertex, aligned with the graph's vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(n: usize) -> Self {
        ScalarField { values: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ScalarField { values: vec![c; n] }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    /// Field defined pointwise from vertex coordinates.
    pub fn from_coords(g: &PennyGraph, f: impl Fn(f64, f64) -> f64) -> Self {
        ScalarField {
            values: (0..g.len()).map(|v| {
                let (x, y) = g.coords(v);
                f(x, y)
            }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    /// self + alpha * other, elementwise.
    pub fn axpy(&self, alpha: f64, other: &ScalarField) -> ScalarField {
        ScalarField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> ScalarField {
        ScalarField { values: self.values.iter().map(|v| alpha * v).collect() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "values": self.values })
    }
}

fn check_len(g: &PennyGraph, f: &ScalarField) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::InvalidInput(format!(
            "field length {} does not match vertex count {}",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// Combinatorial Laplacian: (Lf)(x) = sum over neighbors y of (f(y) - f(x)).
pub fn laplacian(g: &PennyGraph, f: &ScalarField) -> Result<ScalarField> {
    check_len(g, f)?;
    let mut out = vec![0.0; g.len()];
    for (x, slot) in out.iter_mut().enumerate() {
        let fx = f.values[x];
        *slot = g.neighbors(x).iter().map(|&y| f.values[y] - fx).sum();
    }
    Ok(ScalarField::from_values(out))
}

/// Largest |Lf| over the given vertices.
pub fn max_laplacian_on(g: &PennyGraph, f: &ScalarField, on: &VertexSet) -> Result<f64> {
    check_len(g, f)?;
    let mut worst: f64 = 0.0;
    for x in on.iter() {
        let fx = f.values[x];
        let lap: f64 = g.neighbors(x).iter().map(|&y| f.values[y] - fx).sum();
        worst = worst.max(lap.abs());
    }
    Ok(worst)
}

/// Solve the Dirichlet problem: find f with f = data on the vertex boundary
/// of `omega` and Lf = 0 on `omega`.
///
/// `boundary_data` must provide a value for every vertex of the boundary.
/// The interior system is symmetric positive definite and is solved by
/// Jacobi-preconditioned conjugate gradients to the absolute residual
/// tolerance `tol` (so `max |Lf|` over the interior is at most `tol`).
/// Vertices outside the closure keep the value 0.
pub fn solve_dirichlet(
    g: &PennyGraph,
    omega: &VertexSet,
    boundary_data: &[(usize, f64)],
    tol: f64,
    max_iter: usize,
) -> Result<ScalarField> {
    let boundary = vertex_boundary(g, omega);
    if boundary.is_empty() {
        return Err(Error::InvalidInput(
            "dirichlet problem needs a nonempty vertex boundary".into(),
        ));
    }
    let mut data = vec![f64::NAN; g.len()];
    for &(v, val) in boundary_data {
        if v >= g.len() {
            return Err(Error::InvalidInput(format!("boundary vertex {v} out of range")));
        }
        data[v] = val;
    }
    for v in boundary.iter() {
        if data[v].is_nan() {
            return Err(Error::InvalidInput(format!(
                "no boundary value for boundary vertex {v}"
            )));
        }
    }

    // Interior indexing.
    let interior: Vec<usize> = omega.iter().collect();
    let mut index = vec![usize::MAX; g.len()];
    for (k, &v) in interior.iter().enumerate() {
        index[v] = k;
    }
    let in_boundary = boundary.mask(g.len());

    // Reject interior regions not connected to the boundary (singular).
    {
        let mut seen = vec![false; interior.len()];
        let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
        for v in boundary.iter() {
            for &w in g.neighbors(v) {
                if index[w] != usize::MAX && !seen[index[w]] {
                    seen[index[w]] = true;
                    queue.push_back(w);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if index[w] != usize::MAX && !seen[index[w]] {
                    seen[index[w]] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!(
                "interior vertex {} is not connected to the boundary",
                interior[k]
            )));
        }
    }

    let n = interior.len();
    // A u = b with A = deg - adjacency restricted to the interior and
    // b(x) = sum of boundary values over boundary neighbors of x.
    let mut b = vec![0.0; n];
    for (k, &v) in interior.iter().enumerate() {
        for &w in g.neighbors(v) {
            if in_boundary[w] {
                b[k] += data[w];
            }
        }
    }
    let apply = |u: &[f64], out: &mut [f64]| {
        for (k, &v) in interior.iter().enumerate() {
            let mut acc = g.degree(v) as f64 * u[k];
            for &w in g.neighbors(v) {
                if index[w] != usize::MAX {
                    acc -= u[index[w]];
                }
            }
            out[k] = acc;
        }
    };

    // Jacobi-preconditioned conjugate gradients.
    let inv_diag: Vec<f64> = interior.iter().map(|&v| 1.0 / g.degree(v) as f64).collect();
    let mut u = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut residual = norm2(&r);
    let mut iterations = 0;
    while residual > tol && iterations < max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break; // numerically exhausted
        }
        let alpha = rz / pap;
        for k in 0..n {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        residual = norm2(&r);
        iterations += 1;
    }
    if residual > tol {
        return Err(Error::NonConvergence { iterations, residual });
    }

    let mut out = vec![0.0; g.len()];
    for v in boundary.iter() {
        out[v] = data[v];
    }
    for (k, &v) in interior.iter().enumerate() {
        out[v] = u[k];
    }
    Ok(ScalarField::from_values(out))
}

/// Ratio f(p)^2 |B_r(p)| / sum over B_r(p) of f^2, for f harmonic on the
/// ball. The supremum of this ratio over a probe set is the empirical mean
/// value constant. A field vanishing on the whole ball gives 0.
pub fn discrete_mvi_ratio(g: &PennyGraph, f: &ScalarField, p: usize, r: u32) -> Result<f64> {
    check_len(g, f)?;
    let ball = crate::contact::ball(g, p, r)?;
    let worst = max_laplacian_on(g, f, &ball)?;
    if worst > HARMONIC_TOL {
        return Err(Error::InvalidInput(format!(
            "field is not harmonic on the ball: max |Lf| = {worst:e}"
        )));
    }
    let denom: f64 = ball.iter().map(|x| f.values[x] * f.values[x]).sum();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(f.values[p] * f.values[p] * ball.len() as f64 / denom)
}
