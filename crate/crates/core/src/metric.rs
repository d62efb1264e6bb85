//! Finite metric spaces and the elementary operations on them: distance to a
//! set, closed balls, diameters and ball-inclusion maps between two metrics
//! on one carrier.
//!
//! Points are identified by 0-based index. Labels are display-only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for metric-axiom and equality checks.
pub const TOLERANCE: f64 = 1e-9;

/// Point-cloud spaces above this many points compute distances on demand
/// instead of materialising the full table.
pub const DEFAULT_DENSE_LIMIT: usize = 2048;

/// Norm used to turn coordinate vectors into distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Euclidean,
    L1,
    Linf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::L1 => diffs.sum(),
            Norm::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(Norm::Euclidean),
            "l1" | "manhattan" => Ok(Norm::L1),
            "linf" | "max" | "sup" => Ok(Norm::Linf),
            other => Err(Error::domain(format!("unknown norm '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Storage {
    /// Row-major n×n table.
    Table(Vec<f64>),
    /// Distances computed from `coords` on every lookup.
    Lazy(Norm),
}

/// A finite set of points with a validated metric.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    n: usize,
    storage: Storage,
    labels: Option<Vec<String>>,
    coords: Option<Vec<Vec<f64>>>,
}

impl FiniteMetricSpace {
    /// Builds a space from a square table, running the full axiom check.
    pub fn from_table(table: &[Vec<f64>]) -> Result<Self> {
        let report = validate_metric(table, TOLERANCE)?;
        if !report.is_empty() {
            return Err(Error::InvalidMetric(Box::new(report)));
        }
        let n = table.len();
        let flat = table.iter().flat_map(|row| row.iter().copied()).collect();
        Ok(Self {
            n,
            storage: Storage::Table(flat),
            labels: None,
            coords: None,
        })
    }

    /// Builds a space by evaluating `dist` on every pair.
    ///
    /// Only the O(n²) axioms (diagonal, symmetry, positivity, finiteness) are
    /// checked here; callers pass formulas that are metrics by construction.
    /// The triangle inequality can still be audited with [`validate_metric`].
    pub fn from_fn(n: usize, dist: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::structural("a metric space needs at least one point"));
        }
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                flat[i * n + j] = dist(i, j);
            }
        }
        let report = validate_pairwise(n, &|i, j| flat[i * n + j], TOLERANCE)?;
        if !report.is_empty() {
            return Err(Error::InvalidMetric(Box::new(report)));
        }
        Ok(Self {
            n,
            storage: Storage::Table(flat),
            labels: None,
            coords: None,
        })
    }

    /// Builds a point-cloud space with the default dense limit.
    pub fn from_points(coords: Vec<Vec<f64>>, norm: Norm) -> Result<Self> {
        Self::from_points_with_limit(coords, norm, DEFAULT_DENSE_LIMIT)
    }

    /// Builds a point-cloud space; above `dense_limit` points the table is not stored.
    pub fn from_points_with_limit(
        coords: Vec<Vec<f64>>,
        norm: Norm,
        dense_limit: usize,
    ) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::structural("a metric space needs at least one point"));
        }
        let dim = coords[0].len();
        for (i, p) in coords.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::structural(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::structural(format!("point {i} has a non-finite coordinate")));
            }
        }
        let storage = if n <= dense_limit {
            let mut flat = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = norm.distance(&coords[i], &coords[j]);
                    flat[i * n + j] = d;
                    flat[j * n + i] = d;
                }
            }
            Storage::Table(flat)
        } else {
            Storage::Lazy(norm)
        };
        let space = Self {
            n,
            storage,
            labels: None,
            coords: Some(coords),
        };
        // A norm always yields a pseudometric; only coincident points can break it.
        let mut report = MetricValidationReport::default();
        for i in 0..n {
            for j in (i + 1)..n {
                if space.dist(i, j) <= 0.0 {
                    report.positivity_violations.push((i, j));
                }
            }
        }
        if !report.is_empty() {
            return Err(Error::InvalidMetric(Box::new(report)));
        }
        Ok(space)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::structural(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Table(flat) => flat[i * self.n + j],
            Storage::Lazy(norm) => {
                let coords = self.coords.as_ref().expect("lazy storage keeps coordinates");
                norm.distance(&coords[i], &coords[j])
            }
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Whether the full table is materialised.
    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Table(_))
    }

    pub fn to_table(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    pub fn all_points(&self) -> SubsetHandle {
        SubsetHandle {
            indices: (0..self.n).collect(),
        }
    }

    pub(crate) fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.n {
            return Err(Error::domain(format!(
                "point index {x} out of range for {} points",
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn check_subset(&self, subset: &SubsetHandle) -> Result<()> {
        match subset.indices.last() {
            Some(&last) if last >= self.n => Err(Error::domain(format!(
                "subset index {last} out of range for {} points",
                self.n
            ))),
            _ => Ok(()),
        }
    }

    pub(crate) fn check_nonempty_subset(&self, subset: &SubsetHandle, what: &str) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::domain(format!("{what} must be nonempty")));
        }
        self.check_subset(subset)
    }
}

/// A set of point indices, kept strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetHandle {
    indices: Vec<usize>,
}

impl SubsetHandle {
    /// Sorts `indices`; rejects duplicates and indices `>= n`.
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate index {} in subset", w[0])));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::domain(format!(
                    "subset index {last} out of range for {n} points"
                )));
            }
        }
        Ok(Self { indices })
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn singleton(x: usize) -> Self {
        Self { indices: vec![x] }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.indices.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn is_subset_of(&self, other: &SubsetHandle) -> bool {
        self.iter().all(|x| other.contains(x))
    }
}

/// Every metric-axiom violation found in a distance table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValidationReport {
    /// `(i, j, d(i,j), d(j,i))` with `i < j`.
    pub symmetry_violations: Vec<(usize, usize, f64, f64)>,
    /// `(i, j, k, excess)`: `d(i,j) > d(i,k) + d(k,j) + τ`, with `i < j`.
    pub triangle_violations: Vec<(usize, usize, usize, f64)>,
    pub diagonal_violations: Vec<(usize, f64)>,
    /// Distinct points at distance `<= 0`, `i < j`.
    pub positivity_violations: Vec<(usize, usize)>,
}

impl MetricValidationReport {
    pub fn is_empty(&self) -> bool {
        self.symmetry_violations.is_empty()
            && self.triangle_violations.is_empty()
            && self.diagonal_violations.is_empty()
            && self.positivity_violations.is_empty()
    }
}

impl fmt::Display for MetricValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} symmetry, {} triangle, {} diagonal, {} positivity violation(s)",
            self.symmetry_violations.len(),
            self.triangle_violations.len(),
            self.diagonal_violations.len(),
            self.positivity_violations.len()
        )?;
        if let Some(&(i, j, a, b)) = self.symmetry_violations.first() {
            write!(f, "; first asymmetry d({i},{j})={a} vs d({j},{i})={b}")?;
        }
        if let Some(&(i, j, k, e)) = self.triangle_violations.first() {
            write!(f, "; first triangle failure d({i},{j}) exceeds the path via {k} by {e}")?;
        }
        if let Some(&(i, v)) = self.diagonal_violations.first() {
            write!(f, "; first diagonal entry d({i},{i})={v}")?;
        }
        if let Some(&(i, j)) = self.positivity_violations.first() {
            write!(f, "; first coincident pair ({i},{j})")?;
        }
        Ok(())
    }
}

/// Checks a raw square table against the metric axioms at tolerance `tol`.
///
/// Structural problems (non-square, non-finite entries) are errors; axiom
/// failures are listed in the returned report.
pub fn validate_metric(table: &[Vec<f64>], tol: f64) -> Result<MetricValidationReport> {
    let n = table.len();
    if n == 0 {
        return Err(Error::structural("empty distance table"));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::structural(format!(
                "row {i} has {} entries, table has {n} rows",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::structural(format!("entry ({i},{j}) is not finite")));
        }
    }
    let d = |i: usize, j: usize| table[i][j];
    let mut report = validate_pairwise(n, &d, tol)?;
    for i in 0..n {
        for j in (i + 1)..n {
            let direct = d(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let excess = direct - (d(i, k) + d(k, j));
                if excess > tol {
                    report.triangle_violations.push((i, j, k, excess));
                }
            }
        }
    }
    Ok(report)
}

fn validate_pairwise(
    n: usize,
    d: &dyn Fn(usize, usize) -> f64,
    tol: f64,
) -> Result<MetricValidationReport> {
    let mut report = MetricValidationReport::default();
    for i in 0..n {
        let diag = d(i, i);
        if !diag.is_finite() {
            return Err(Error::structural(format!("entry ({i},{i}) is not finite")));
        }
        if diag.abs() > tol {
            report.diagonal_violations.push((i, diag));
        }
        for j in (i + 1)..n {
            let (a, b) = (d(i, j), d(j, i));
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::structural(format!("entry ({i},{j}) is not finite")));
            }
            if (a - b).abs() > tol {
                report.symmetry_violations.push((i, j, a, b));
            }
            if a <= 0.0 || b <= 0.0 {
                report.positivity_violations.push((i, j));
            }
        }
    }
    Ok(report)
}

/// `d(x, A) = min over a in A of d(x, a)`.
pub fn dist_to_set(space: &FiniteMetricSpace, x: usize, set: &SubsetHandle) -> Result<f64> {
    space.check_point(x)?;
    space.check_nonempty_subset(set, "target set")?;
    Ok(set.iter().map(|a| space.dist(x, a)).fold(f64::INFINITY, f64::min))
}

/// Closed ball `{ y : d(x,y) <= r }`.
pub fn closed_ball(space: &FiniteMetricSpace, x: usize, r: f64) -> Result<SubsetHandle> {
    space.check_point(x)?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!("ball radius must be >= 0, got {r}")));
    }
    let members = (0..space.len()).filter(|&y| space.dist(x, y) <= r).collect();
    Ok(SubsetHandle::from_sorted_unchecked(members))
}

pub fn diameter(space: &FiniteMetricSpace, set: &SubsetHandle) -> Result<f64> {
    space.check_nonempty_subset(set, "subset")?;
    let idx = set.indices();
    let mut best = 0.0f64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            best = best.max(space.dist(i, j));
        }
    }
    Ok(best)
}

/// For each radius `r`, the smallest `R` with `B_rho[x0, r] ⊆ B_d[x0, R]`.
///
/// `space_rho` must live on the same carrier as `space_d`. Radii must be
/// nonnegative and nondecreasing.
pub fn ball_inclusion_map(
    space_d: &FiniteMetricSpace,
    space_rho: &FiniteMetricSpace,
    x0: usize,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if space_d.len() != space_rho.len() {
        return Err(Error::structural(format!(
            "carrier sizes differ: {} vs {}",
            space_d.len(),
            space_rho.len()
        )));
    }
    space_d.check_point(x0)?;
    if radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::domain("radii must be nonnegative"));
    }
    if radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("radii must be nondecreasing"));
    }
    // Sort by rho-distance once; each R is a running maximum over a prefix.
    let mut order: Vec<usize> = (0..space_d.len()).collect();
    order.sort_by(|&a, &b| space_rho.dist(x0, a).total_cmp(&space_rho.dist(x0, b)));
    let mut out = Vec::with_capacity(radii.len());
    let mut cursor = 0;
    let mut running = 0.0f64;
    for &r in radii {
        while cursor < order.len() && space_rho.dist(x0, order[cursor]) <= r {
            running = running.max(space_d.dist(x0, order[cursor]));
            cursor += 1;
        }
        out.push((r, running));
    }
    Ok(out)
}
