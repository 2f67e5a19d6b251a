//! Heat flow on the contact graph and caloric polynomials.
//!
//! Forward diffusion uses explicit Euler steps. With dt <= 1/12 each update
//! is a convex combination of neighboring values (1 - dt deg(x) >= 1/2), so
//! mass is conserved and the maximum principle holds step by step.
//!
//! Ancient solutions of polynomial growth are represented algebraically:
//! from a seed q the coefficient fields q, Lq, L^2 q, ... define
//! u(x, t) = sum over i of t^i / i! * q_i(x), which solves the heat equation
//! wherever the next power L^(m+1) q vanishes.

use crate::contact::{PennyGraph, VertexSet};
use crate::error::{Error, Result};
use crate::field::{laplacian, ScalarField};

/// Largest admissible explicit Euler step (half of the stability bound for
/// the maximum vertex degree 6).
pub const MAX_DT: f64 = 1.0 / 12.0;

/// Residual tolerance defining the validity region of a caloric polynomial.
pub const CALORIC_TOL: f64 = 1e-10;

/// One explicit Euler step: u + dt * Lu.
pub fn heat_step(g: &PennyGraph, u: &ScalarField, dt: f64) -> Result<ScalarField> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(Error::InvalidInput(format!(
            "time step {dt} outside (0, {MAX_DT}]"
        )));
    }
    let lu = laplacian(g, u)?;
    Ok(u.axpy(dt, &lu))
}

/// Ancient solution assembled from Laplacian powers of a seed field.
#[derive(Debug, Clone)]
pub struct AncientSolution {
    /// q_0 = q, q_1 = Lq, ..., q_m = L^m q, plus the residual q_{m+1}.
    coefficients: Vec<ScalarField>,
    /// Vertices where the residual L^(m+1) q vanishes (within tolerance),
    /// so the heat equation holds identically in t.
    validity: VertexSet,
}

impl AncientSolution {
    /// Truncation order m.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 2
    }

    pub fn coefficient(&self, i: usize) -> &ScalarField {
        &self.coefficients[i]
    }

    pub fn validity(&self) -> &VertexSet {
        &self.validity
    }

    /// u(x, t) = sum over i <= m of t^i / i! * q_i(x).
    pub fn eval(&self, x: usize, t: f64) -> f64 {
        let m = self.order();
        let mut term = 1.0;
        let mut acc = 0.0;
        for i in 0..=m {
            acc += term * self.coefficients[i].values[x];
            term *= t / (i as f64 + 1.0);
        }
        acc
    }

    /// Time derivative of u at (x, t).
    pub fn eval_dt(&self, x: usize, t: f64) -> f64 {
        let m = self.order();
        let mut term = 1.0;
        let mut acc = 0.0;
        for i in 1..=m {
            acc += term * self.coefficients[i].values[x];
            term *= t / i as f64;
        }
        acc
    }

    /// Spatial Laplacian of u at (x, t), from the stored coefficients:
    /// L q_i = q_(i+1) by construction.
    pub fn eval_laplacian(&self, x: usize, t: f64) -> f64 {
        let m = self.order();
        let mut term = 1.0;
        let mut acc = 0.0;
        for i in 0..=m {
            acc += term * self.coefficients[i + 1].values[x];
            term *= t / (i as f64 + 1.0);
        }
        acc
    }
}

/// Build the caloric polynomial of order `m` from seed `q`.
///
/// The validity region requires both a vanishing residual L^(m+1) q and
/// distance at least m + 1 from the truncation rim (the outer-face
/// vertices). The second clause matters: clipped sums at the rim can cancel
/// by accident and leave a zero residual at a vertex whose Laplacian powers
/// never saw full neighborhoods.
pub fn caloric_polynomial(g: &PennyGraph, q: &ScalarField, m: usize) -> Result<AncientSolution> {
    let mut coefficients = Vec::with_capacity(m + 2);
    coefficients.push(q.clone());
    for _ in 0..=m {
        let next = laplacian(g, coefficients.last().unwrap())?;
        coefficients.push(next);
    }
    let residual = &coefficients[m + 1];

    let faces = crate::faces::trace_faces(g)?;
    let rim = crate::faces::outer_rim(g, &faces);
    let mut rim_dist = vec![u32::MAX; g.len()];
    let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for v in rim.iter() {
        rim_dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if rim_dist[w] == u32::MAX {
                rim_dist[w] = rim_dist[v] + 1;
                queue.push_back(w);
            }
        }
    }

    let validity = VertexSet::new(
        (0..g.len())
            .filter(|&x| {
                residual.values[x].abs() <= CALORIC_TOL && rim_dist[x] >= m as u32 + 1
            })
            .collect(),
    );
    if validity.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no vertex satisfies |L^{} q| <= {CALORIC_TOL} away from the rim",
            m + 1
        )));
    }
    Ok(AncientSolution { coefficients, validity })
}

/// Empirical growth constant of an ancient solution over sampled (x, t).
#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// Smallest C with |u(x,t)| <= C (1 + d(x,x0) + sqrt|t|)^k on the samples.
    pub constant: f64,
    /// Same constant on the first half of the samples.
    pub half_constant: f64,
    /// Whether the constant moved less than 5% as the grid doubled.
    pub saturated: bool,
}

/// Scan samples (vertex, t <= 0) for the growth constant of exponent `k`.
/// Samples outside the validity region are rejected.
pub fn growth_certificate(
    g: &PennyGraph,
    sol: &AncientSolution,
    x0: usize,
    k: usize,
    samples: &[(usize, f64)],
) -> Result<GrowthReport> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no growth samples given".into()));
    }
    let dist = g.bfs_distances(x0);
    let mut constant: f64 = 0.0;
    let mut half_constant: f64 = 0.0;
    for (idx, &(x, t)) in samples.iter().enumerate() {
        if t > 0.0 {
            return Err(Error::InvalidInput(format!("sample time {t} is positive")));
        }
        if !sol.validity().contains(x) {
            return Err(Error::InvalidInput(format!(
                "sample vertex {x} outside the validity region"
            )));
        }
        let d = dist[x].ok_or_else(|| {
            Error::InvalidInput(format!("sample vertex {x} unreachable from {x0}"))
        })? as f64;
        let ratio = sol.eval(x, t).abs() / (1.0 + d + t.abs().sqrt()).powi(k as i32);
        constant = constant.max(ratio);
        if idx < samples.len() / 2 {
            half_constant = half_constant.max(ratio);
        }
    }
    let saturated = constant <= half_constant * 1.05;
    Ok(GrowthReport { constant, half_constant, saturated })
}

/// Number of linearly independent solutions in a family, measured by the
/// rank of their coefficient Gram over a common vertex set.
pub fn independent_solution_count(sols: &[AncientSolution], region: &VertexSet) -> usize {
    if sols.is_empty() || region.is_empty() {
        return 0;
    }
    let depth = sols.iter().map(|s| s.order()).max().unwrap() + 1;
    let vec_of = |s: &AncientSolution| -> Vec<f64> {
        let mut v = Vec::with_capacity(depth * region.len());
        for i in 0..depth {
            for x in region.iter() {
                v.push(if i <= s.order() { s.coefficient(i).values[x] } else { 0.0 });
            }
        }
        v
    };
    let vectors: Vec<Vec<f64>> = sols.iter().map(vec_of).collect();
    let n = vectors.len();
    let mut gram: nalgebra::DMatrix<f64> = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    let eig = nalgebra::SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&v| v > 1e-10 * max).count()
}
