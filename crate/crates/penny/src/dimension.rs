//! Numerical estimate of the dimension of polynomial-growth harmonic
//! function spaces on a finite window.
//!
//! Candidates are harmonic extensions of low-frequency boundary data on a
//! large sphere. Their pairwise inner products over two concentric regions
//! (radius R and beta*R) form a Gram pencil whose generalized eigenvalues
//! measure growth factors: degree-j polynomial modes grow like
//! beta^(2j + 2), while high-frequency extensions decay geometrically inward
//! and their growth factors explode. Counting eigenvalues at or below the
//! threshold beta^(2k + 2 + delta) therefore counts the candidates growing
//! no faster than degree-k polynomials; the estimate is the modal count over
//! a schedule of radii.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::contact::{ball, vertex_boundary, PennyGraph};
use crate::error::{Error, Result};
use crate::extend::{disk_polygon, integrate_pl_product_polygon, PlField};
use crate::field::{solve_dirichlet, ScalarField};
use crate::triangulate::Triangulation;

/// Relative rank cutoff for the numerically nonsingular subspace.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Candidates with outer mass below this are numerically zero and dropped.
pub const MASS_FLOOR: f64 = 1e-20;

const SOLVE_TOL: f64 = 1e-10;
const SOLVE_MAX_ITER: usize = 200_000;

/// How the two-scale inner products are evaluated.
#[derive(Clone, Copy)]
pub enum PencilMode<'a> {
    /// Sum of products over combinatorial balls.
    Discrete,
    /// Integral of products of piecewise linear extensions over disks.
    Planar(&'a Triangulation),
}

impl PencilMode<'_> {
    fn is_planar(&self) -> bool {
        matches!(self, PencilMode::Planar(_))
    }
}

/// Gram matrices of one candidate family at two radii.
#[derive(Debug, Clone)]
pub struct GramPencil {
    pub candidates: Vec<ScalarField>,
    pub r_inner: u32,
    pub beta: f64,
    /// Inner products over the radius-R region.
    pub gram_inner: DMatrix<f64>,
    /// Inner products over the radius-beta*R region.
    pub gram_outer: DMatrix<f64>,
    pub planar: bool,
}

/// Distance from `x0` to the truncation rim (outer-face vertices).
fn rim_distance(g: &PennyGraph, x0: usize) -> Result<u32> {
    let faces = crate::faces::trace_faces(g)?;
    let rim = crate::faces::outer_rim(g, &faces);
    let dist = g.bfs_distances(x0);
    rim.iter()
        .filter_map(|v| dist[v])
        .min()
        .ok_or_else(|| Error::InvalidInput("vertex sees no window rim".into()))
}

/// The 2M+1 trigonometric boundary fields 1, cos(m t), sin(m t) for m <= M,
/// where t is the angle of each boundary vertex of the radius-`r_out` sphere
/// around the embedded position of `x0`.
///
/// Returned as (vertex, value) lists ready for the Dirichlet solver.
pub fn boundary_probe_basis(
    g: &PennyGraph,
    x0: usize,
    r_out: u32,
    m: usize,
) -> Result<Vec<Vec<(usize, f64)>>> {
    let margin = rim_distance(g, x0)?;
    if r_out + 2 > margin {
        return Err(Error::InvalidInput(format!(
            "sphere radius {r_out} leaves no margin inside the window (rim at {margin})"
        )));
    }
    let omega = ball(g, x0, r_out)?;
    let boundary = vertex_boundary(g, &omega);
    if boundary.len() < 2 * m + 1 {
        return Err(Error::InvalidInput(format!(
            "boundary has {} vertices, fewer than the {} probe fields",
            boundary.len(),
            2 * m + 1
        )));
    }
    let (cx, cy) = g.coords(x0);
    let angles: Vec<(usize, f64)> = boundary
        .iter()
        .map(|v| {
            let (x, y) = g.coords(v);
            (v, (y - cy).atan2(x - cx))
        })
        .collect();
    let mut probes = Vec::with_capacity(2 * m + 1);
    probes.push(angles.iter().map(|&(v, _)| (v, 1.0)).collect());
    for freq in 1..=m {
        let f = freq as f64;
        probes.push(angles.iter().map(|&(v, t)| (v, (f * t).cos())).collect());
        probes.push(angles.iter().map(|&(v, t)| (v, (f * t).sin())).collect());
    }
    Ok(probes)
}

fn discrete_inner(u: &ScalarField, v: &ScalarField, ids: &[usize]) -> f64 {
    ids.iter().map(|&x| u.values[x] * v.values[x]).sum()
}

/// Assemble the Gram pencil of an explicit candidate family.
///
/// Candidates with outer mass below [`MASS_FLOOR`] are dropped.
pub fn pencil_from_candidates(
    g: &PennyGraph,
    x0: usize,
    r: u32,
    beta: f64,
    candidates: Vec<ScalarField>,
    mode: PencilMode,
) -> Result<GramPencil> {
    if beta <= 1.0 {
        return Err(Error::InvalidInput(format!("beta {beta} must exceed 1")));
    }
    let r_outer = (beta * r as f64).ceil() as u32;
    let (masses, grams): (Vec<f64>, Box<dyn Fn(&ScalarField, &ScalarField) -> (f64, f64)>) =
        match mode {
            PencilMode::Discrete => {
                let inner_ids: Vec<usize> = ball(g, x0, r)?.ids().to_vec();
                let outer_ids: Vec<usize> = ball(g, x0, r_outer)?.ids().to_vec();
                let masses = candidates
                    .iter()
                    .map(|u| discrete_inner(u, u, &outer_ids))
                    .collect();
                (
                    masses,
                    Box::new(move |u, v| {
                        (discrete_inner(u, v, &inner_ids), discrete_inner(u, v, &outer_ids))
                    }),
                )
            }
            PencilMode::Planar(tri) => {
                let center = g.coords(x0);
                let gon_inner = disk_polygon(center, r as f64);
                let gon_outer = disk_polygon(center, beta * r as f64);
                let masses = candidates
                    .iter()
                    .map(|u| {
                        let pl = PlField::new(tri, u);
                        integrate_pl_product_polygon(&pl, &pl, &gon_outer)
                    })
                    .collect();
                (
                    masses,
                    Box::new(move |u, v| {
                        let plu = PlField::new(tri, u);
                        let plv = PlField::new(tri, v);
                        (
                            integrate_pl_product_polygon(&plu, &plv, &gon_inner),
                            integrate_pl_product_polygon(&plu, &plv, &gon_outer),
                        )
                    }),
                )
            }
        };

    let kept: Vec<ScalarField> = candidates
        .into_iter()
        .zip(&masses)
        .filter(|(_, &m)| m >= MASS_FLOOR)
        .map(|(c, _)| c)
        .collect();
    let n = kept.len();
    if n == 0 {
        return Err(Error::InvalidInput(
            "every candidate has numerically zero mass".into(),
        ));
    }
    let mut gram_inner = DMatrix::zeros(n, n);
    let mut gram_outer = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (a, b) = grams(&kept[i], &kept[j]);
            gram_inner[(i, j)] = a;
            gram_inner[(j, i)] = a;
            gram_outer[(i, j)] = b;
            gram_outer[(j, i)] = b;
        }
    }
    Ok(GramPencil {
        candidates: kept,
        r_inner: r,
        beta,
        gram_inner,
        gram_outer,
        planar: mode.is_planar(),
    })
}

/// Solve for the trigonometric probe family and assemble its pencil.
///
/// `m_freq` defaults to 2k + 4 boundary frequencies; `extra` fields (already
/// defined on the whole window) are appended to the candidate family. The
/// Dirichlet solves run on the ball the outer region needs: radius
/// ceil(beta R) in discrete mode, and ceil(sqrt(2) beta R) + 1 in planar
/// mode so that the outer disk stays inside the solved region.
pub fn build_pencil(
    g: &PennyGraph,
    x0: usize,
    k: usize,
    r: u32,
    beta: f64,
    m_freq: Option<usize>,
    mode: PencilMode,
    extra: &[ScalarField],
) -> Result<GramPencil> {
    let m = m_freq.unwrap_or(2 * k + 4);
    let r_outer = (beta * r as f64).ceil() as u32;
    let r_solve = if mode.is_planar() {
        (std::f64::consts::SQRT_2 * beta * r as f64).ceil() as u32 + 1
    } else {
        r_outer
    };
    let probes = boundary_probe_basis(g, x0, r_solve, m)?;
    let omega = ball(g, x0, r_solve)?;
    let solutions: Vec<Result<ScalarField>> = probes
        .par_iter()
        .map(|data| solve_dirichlet(g, &omega, data, SOLVE_TOL, SOLVE_MAX_ITER))
        .collect();
    let mut candidates = Vec::with_capacity(probes.len() + extra.len());
    for s in solutions {
        candidates.push(s?);
    }
    candidates.extend(extra.iter().cloned());
    pencil_from_candidates(g, x0, r, beta, candidates, mode)
}

/// Generalized eigenvalues of the pencil on its numerically nonsingular
/// subspace (relative rank cutoff [`RANK_CUTOFF`] on the inner Gram),
/// sorted ascending. Empty when the inner Gram is numerically zero.
pub fn pencil_eigenvalues(pencil: &GramPencil) -> Vec<f64> {
    let n = pencil.gram_inner.nrows();
    let eig = nalgebra::SymmetricEigen::new(pencil.gram_inner.clone());
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if lam_max <= 0.0 {
        return Vec::new();
    }
    let keep: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > RANK_CUTOFF * lam_max)
        .collect();
    if keep.is_empty() {
        return Vec::new();
    }
    let mut w = DMatrix::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let scale = 1.0 / eig.eigenvalues[i].sqrt();
        for row in 0..n {
            w[(row, col)] = eig.eigenvectors[(row, i)] * scale;
        }
    }
    let mut reduced = w.transpose() * &pencil.gram_outer * &w;
    // Symmetrize against round-off before the eigensolve.
    let sym = (reduced.clone() + reduced.transpose()) * 0.5;
    reduced = sym;
    let mut values: Vec<f64> = nalgebra::SymmetricEigen::new(reduced)
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Growth-factor threshold separating degree-k candidates.
pub fn growth_threshold(beta: f64, k: usize, delta: f64) -> f64 {
    beta.powf(2.0 * k as f64 + 2.0 + delta)
}

/// Eigenvalue list and below-threshold count for one radius of the schedule.
#[derive(Debug, Clone)]
pub struct PencilSummary {
    pub r: u32,
    pub eigenvalues: Vec<f64>,
    pub count: usize,
}

/// Dimension estimate across a schedule of pencils.
#[derive(Debug, Clone)]
pub struct DimensionReport {
    pub k: usize,
    pub beta: f64,
    pub delta: f64,
    pub schedule: Vec<PencilSummary>,
    /// Modal below-threshold count; `None` when every pencil was singular.
    pub estimate: Option<usize>,
}

impl DimensionReport {
    pub fn threshold(&self) -> f64 {
        growth_threshold(self.beta, self.k, self.delta)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "beta": self.beta,
            "delta": self.delta,
            "schedule": self.schedule.iter().map(|s| serde_json::json!({
                "R": s.r,
                "eigenvalues": crate::report::val_f64_slice(&s.eigenvalues),
                "count": s.count,
            })).collect::<Vec<_>>(),
            "estimate": self.estimate,
        })
    }
}

/// Ratio of the smallest above-threshold eigenvalue to the threshold, per
/// pencil of the report; `None` where no eigenvalue exceeds the threshold.
/// Larger separation means the count is further from flipping.
pub fn separation_factors(report: &DimensionReport) -> Vec<Option<f64>> {
    let threshold = report.threshold();
    report
        .schedule
        .iter()
        .map(|s| {
            s.eigenvalues
                .iter()
                .find(|&&v| v > threshold)
                .map(|v| v / threshold)
        })
        .collect()
}

/// Count below-threshold growth factors per pencil and take the modal count.
///
/// Pencils whose inner Gram is numerically singular contribute an empty
/// eigenvalue list and do not vote; ties resolve to the smaller count.
pub fn estimate_dim(pencils: &[GramPencil], k: usize, delta: f64) -> Result<DimensionReport> {
    if pencils.is_empty() {
        return Err(Error::InvalidInput("empty pencil schedule".into()));
    }
    let beta = pencils[0].beta;
    if pencils.iter().any(|p| (p.beta - beta).abs() > 1e-12) {
        return Err(Error::InvalidInput(
            "pencil schedule mixes different beta values".into(),
        ));
    }
    let threshold = growth_threshold(beta, k, delta);
    let mut schedule = Vec::with_capacity(pencils.len());
    let mut votes: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for p in pencils {
        let eigenvalues = pencil_eigenvalues(p);
        let count = eigenvalues.iter().filter(|&&v| v <= threshold).count();
        if !eigenvalues.is_empty() {
            *votes.entry(count).or_insert(0) += 1;
        }
        schedule.push(PencilSummary { r: p.r_inner, eigenvalues, count });
    }
    let estimate = votes
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&count, _)| count);
    Ok(DimensionReport { k, beta, delta, schedule, estimate })
}
