//! Configurations of non-overlapping unit-diameter disks.
//!
//! All coordinates are in units of the disk diameter, so two disks touch
//! exactly when their centers are at distance 1. A configuration is valid
//! when every pairwise center distance is at least `1 - tolerance`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disk radius in diameter units. Fixed for the whole crate.
pub const DISK_RADIUS: f64 = 0.5;

/// Default absolute tolerance for tangency and overlap tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A finite list of unit-diameter disk centers.
///
/// Immutable after construction; all operations on it are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskPacking {
    centers: Vec<(f64, f64)>,
    tolerance: f64,
}

impl DiskPacking {
    pub fn new(centers: Vec<(f64, f64)>, tolerance: f64) -> Self {
        assert!(tolerance >= 0.0, "tolerance must be nonnegative");
        DiskPacking { centers, tolerance }
    }

    pub fn with_default_tolerance(centers: Vec<(f64, f64)>) -> Self {
        Self::new(centers, DEFAULT_TOLERANCE)
    }

    pub fn centers(&self) -> &[(f64, f64)] {
        &self.centers
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Keep only the centers at the given indices (in the given order).
    pub fn subset(&self, indices: &[usize]) -> DiskPacking {
        let centers = indices.iter().map(|&i| self.centers[i]).collect();
        DiskPacking::new(centers, self.tolerance)
    }

    /// Translate every center by the same offset.
    pub fn translated(&self, dx: f64, dy: f64) -> DiskPacking {
        let centers = self.centers.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        DiskPacking::new(centers, self.tolerance)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "radius": DISK_RADIUS,
            "tolerance": self.tolerance,
            "centers": self.centers.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            radius: f64,
            #[serde(default = "default_tol")]
            tolerance: f64,
            centers: Vec<[f64; 2]>,
        }
        fn default_tol() -> f64 {
            DEFAULT_TOLERANCE
        }
        let doc: Doc = serde_json::from_str(text)?;
        if (doc.radius - DISK_RADIUS).abs() > 1e-15 {
            return Err(Error::InvalidInput(format!(
                "unsupported disk radius {} (only {} is supported)",
                doc.radius, DISK_RADIUS
            )));
        }
        Ok(DiskPacking::new(
            doc.centers.iter().map(|c| (c[0], c[1])).collect(),
            doc.tolerance,
        ))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, crate::report::to_json_string(&self.to_json()))?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Outcome of an overlap scan. Always produced, never an error.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// True when no pair of centers is closer than `1 - tolerance`.
    pub ok: bool,
    /// Index pairs (i < j) closer than `1 - tolerance`.
    pub violations: Vec<(usize, usize)>,
    /// Minimum distance over all near pairs; `INFINITY` when no two centers
    /// come within the candidate capture range of about two diameters.
    pub min_distance: f64,
}

/// Uniform grid over the plane with cell size 1, mapping cells to the center
/// indices they contain. Candidate near pairs come from 3x3 cell blocks, so
/// every pair at distance <= 1 + tolerance is examined.
pub(crate) struct SpatialHash {
    cells: std::collections::HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialHash {
    pub(crate) fn build(centers: &[(f64, f64)]) -> Self {
        let mut cells: std::collections::HashMap<(i64, i64), Vec<usize>> =
            std::collections::HashMap::new();
        for (i, &(x, y)) in centers.iter().enumerate() {
            cells
                .entry((x.floor() as i64, y.floor() as i64))
                .or_default()
                .push(i);
        }
        SpatialHash { cells }
    }

    /// Indices of centers in the 3x3 cell block around `p`, in ascending order.
    pub(crate) fn near(&self, p: (f64, f64)) -> Vec<usize> {
        let (cx, cy) = (p.0.floor() as i64, p.1.floor() as i64);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.cells.get(&(cx + dx, cy + dy)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Scan all near pairs for overlaps. Expected O(n) via the spatial hash.
pub fn validate_packing(packing: &DiskPacking) -> ValidationReport {
    let centers = packing.centers();
    let tol = packing.tolerance();
    let hash = SpatialHash::build(centers);
    let mut violations = Vec::new();
    let mut min_distance = f64::INFINITY;
    for (i, &c) in centers.iter().enumerate() {
        for j in hash.near(c) {
            if j <= i {
                continue;
            }
            let d = dist(c, centers[j]);
            if d < min_distance {
                min_distance = d;
            }
            if d < 1.0 - tol {
                violations.push((i, j));
            }
        }
    }
    violations.sort_unstable();
    ValidationReport {
        ok: violations.is_empty(),
        violations,
        min_distance,
    }
}

/// Lattice flavors used to generate reference packings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// Integer points; the contact graph is the grid graph.
    Square,
    /// Triangular lattice; the contact graph is 6-regular in the interior.
    Triangular,
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(LatticeKind::Square),
            "triangular" => Ok(LatticeKind::Triangular),
            other => Err(Error::InvalidInput(format!("unknown lattice kind '{other}'"))),
        }
    }
}

/// Lattice patch of half-width `half_width` (graph-distance radius for the
/// triangular kind, coordinate box for the square kind).
pub fn generate_lattice(kind: LatticeKind, half_width: u32) -> DiskPacking {
    let l = half_width as i64;
    let mut centers = Vec::new();
    match kind {
        LatticeKind::Square => {
            for i in -l..=l {
                for j in -l..=l {
                    centers.push((i as f64, j as f64));
                }
            }
        }
        LatticeKind::Triangular => {
            let s = 3.0_f64.sqrt() / 2.0;
            for i in -l..=l {
                for j in -l..=l {
                    if (i.abs() + j.abs() + (i + j).abs()) / 2 <= l {
                        centers.push((i as f64 + j as f64 / 2.0, j as f64 * s));
                    }
                }
            }
        }
    }
    DiskPacking::with_default_tolerance(centers)
}

/// Random connected site-subset of the triangular patch whose contact graph
/// has all bounded facial degrees at most `max_facial_degree`.
///
/// Each attempt keeps the origin, keeps every other site independently with
/// probability `keep_probability`, restricts to the origin's connected
/// component, and accepts if the facial degree bound holds. Attempts draw
/// from per-attempt streams of a counter-based generator, so the result is a
/// pure function of `seed`.
pub fn generate_random_subset(
    half_width: u32,
    keep_probability: f64,
    max_facial_degree: usize,
    seed: u64,
    retry_budget: usize,
) -> Result<DiskPacking> {
    use rand::{Rng, SeedableRng};
    if !(keep_probability > 0.0 && keep_probability <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "keep probability {keep_probability} outside (0, 1]"
        )));
    }
    if max_facial_degree < 3 {
        return Err(Error::InvalidInput(format!(
            "max facial degree {max_facial_degree} below 3"
        )));
    }
    let patch = generate_lattice(LatticeKind::Triangular, half_width);
    let origin = patch
        .centers()
        .iter()
        .position(|&(x, y)| x == 0.0 && y == 0.0)
        .expect("triangular patch contains the origin");

    for attempt in 0..retry_budget {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let kept: Vec<usize> = (0..patch.len())
            .filter(|&i| {
                let draw = rng.gen::<f64>();
                i == origin || draw < keep_probability
            })
            .collect();
        let candidate = patch.subset(&kept);
        let graph = crate::contact::build_contact_graph(&candidate)?;
        let origin_in_candidate = kept.iter().position(|&i| i == origin).unwrap();
        let comp = graph.component_of(origin_in_candidate);
        let comp_indices: Vec<usize> = (0..graph.len())
            .filter(|&v| graph.component_of(v) == comp)
            .map(|v| kept[v])
            .collect();
        let connected = patch.subset(&comp_indices);
        let graph = crate::contact::build_contact_graph(&connected)?;
        let faces = crate::faces::trace_faces(&graph)?;
        if faces.max_bounded_degree() <= max_facial_degree {
            return Ok(connected);
        }
    }
    Err(Error::RetryBudgetExhausted {
        attempts: retry_budget,
        reason: format!("no subset with bounded facial degree <= {max_facial_degree}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_tangency_is_allowed() {
        let p = DiskPacking::with_default_tolerance(vec![(0.0, 0.0), (1.0, 0.0)]);
        let report = validate_packing(&p);
        assert!(report.ok);
        assert_eq!(report.min_distance, 1.0);
    }

    #[test]
    fn overlap_is_reported() {
        let p = DiskPacking::with_default_tolerance(vec![(0.0, 0.0), (0.99, 0.0)]);
        let report = validate_packing(&p);
        assert!(!report.ok);
        assert_eq!(report.violations, vec![(0, 1)]);
        assert!((report.min_distance - 0.99).abs() < 1e-15);
    }

    #[test]
    fn empty_packing_is_ok_with_infinite_min_distance() {
        let report = validate_packing(&DiskPacking::with_default_tolerance(vec![]));
        assert!(report.ok);
        assert!(report.min_distance.is_infinite());
    }

    #[test]
    fn lattice_patch_matches_brute_force_scan() {
        let p = generate_lattice(LatticeKind::Triangular, 6);
        assert!(p.len() >= 100);
        let report = validate_packing(&p);
        assert!(report.ok);
        // Brute-force oracle over all pairs.
        let mut brute_min = f64::INFINITY;
        let mut brute_ok = true;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let d = dist(p.centers()[i], p.centers()[j]);
                if d < 2.0 {
                    brute_min = brute_min.min(d);
                }
                if d < 1.0 - p.tolerance() {
                    brute_ok = false;
                }
            }
        }
        assert_eq!(report.ok, brute_ok);
        assert!((report.min_distance - brute_min).abs() < 1e-15);
    }

    fn tangent_pairs(p: &DiskPacking) -> usize {
        let mut n = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if (dist(p.centers()[i], p.centers()[j]) - 1.0).abs() <= p.tolerance() {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn square_patch_counts() {
        let p = generate_lattice(LatticeKind::Square, 1);
        assert_eq!(p.len(), 9);
        assert_eq!(tangent_pairs(&p), 12);
        assert_eq!(generate_lattice(LatticeKind::Square, 0).len(), 1);
    }

    #[test]
    fn hex_flower_counts() {
        let p = generate_lattice(LatticeKind::Triangular, 1);
        assert_eq!(p.len(), 7);
        assert_eq!(tangent_pairs(&p), 12);
    }

    #[test]
    fn full_probability_subset_is_the_whole_patch() {
        let full = generate_random_subset(3, 1.0, 3, 0, 1).unwrap();
        assert_eq!(full.len(), generate_lattice(LatticeKind::Triangular, 3).len());
    }

    #[test]
    fn random_subset_obeys_facial_degree_bound() {
        let p = generate_random_subset(6, 0.9, 8, 7, 64).unwrap();
        assert!(validate_packing(&p).ok);
        let g = crate::contact::build_contact_graph(&p).unwrap();
        let faces = crate::faces::trace_faces(&g).unwrap();
        assert!(faces.max_bounded_degree() <= 8);
    }

    #[test]
    fn random_subset_is_deterministic() {
        let a = generate_random_subset(5, 0.9, 8, 42, 64).unwrap();
        let b = generate_random_subset(5, 0.9, 8, 42, 64).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_retry_budget_reports_exhaustion() {
        // Aggressive deletion with the tightest degree bound exhausts quickly.
        let err = generate_random_subset(6, 0.5, 3, 11, 2).unwrap_err();
        assert!(matches!(err, Error::RetryBudgetExhausted { attempts: 2, .. }));
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let p = generate_lattice(LatticeKind::Triangular, 4);
        let text = crate::report::to_json_string(&p.to_json());
        let q = DiskPacking::from_json(&text).unwrap();
        assert_eq!(p.centers(), q.centers());
        assert_eq!(p.tolerance(), q.tolerance());
        // Serializing again reproduces the same bytes.
        assert_eq!(text, crate::report::to_json_string(&q.to_json()));
    }

    proptest::proptest! {
        /// Removing disks from a valid packing keeps it valid.
        #[test]
        fn deletion_preserves_validity(mask in proptest::collection::vec(proptest::bool::ANY, 37)) {
            let p = generate_lattice(LatticeKind::Triangular, 3);
            let kept: Vec<usize> = (0..p.len()).filter(|&i| mask[i]).collect();
            let q = p.subset(&kept);
            proptest::prop_assert!(validate_packing(&q).ok);
        }
    }
}
