//! Component labelings and the label-padded chain metric.
//!
//! A [`ComponentLabeling`] assigns a positive integer to every ε-component; as
//! a point function it is constant on components, so it is uniformly
//! continuous with the step modulus `d(x,y) < ε ⇒ f(x) = f(y)`.
//!
//! [`RhoMetric`] extends the chain metric `d_ε` across components: inside a
//! component it is `d_ε` itself, and for `x` in component `i`, `y` in
//! component `j ≠ i` it is
//!
//! ```text
//! d_ε(x, x_i) + f(x_i) + d_ε(y, x_j) + f(x_j)
//! ```
//!
//! where `x_i` are the component representatives. The result is a metric that
//! coincides with `d` on every pair closer than ε in either metric.

use serde::Serialize;

use crate::chain::ChainGraph;
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SubsetHandle, DEFAULT_DENSE_LIMIT, TOLERANCE};

/// Anything that assigns a distance to pairs of indices on a finite carrier.
pub trait PairDistance {
    fn carrier_len(&self) -> usize;
    fn distance(&self, x: usize, y: usize) -> f64;
}

impl PairDistance for FiniteMetricSpace {
    fn carrier_len(&self) -> usize {
        self.len()
    }

    fn distance(&self, x: usize, y: usize) -> f64 {
        self.dist(x, y)
    }
}

/// A positive integer per ε-component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentLabeling {
    values: Vec<u64>,
    #[serde(skip)]
    component_id: Vec<usize>,
}

impl ComponentLabeling {
    /// One value per component of `graph`, each at least 1.
    pub fn new(graph: &ChainGraph<'_>, values: Vec<u64>) -> Result<Self> {
        if values.len() != graph.component_count() {
            return Err(Error::domain(format!(
                "{} label values for {} components",
                values.len(),
                graph.component_count()
            )));
        }
        if let Some(c) = values.iter().position(|&v| v == 0) {
            return Err(Error::domain(format!("label of component {c} is 0, labels start at 1")));
        }
        Ok(Self {
            values,
            component_id: graph.component_ids().to_vec(),
        })
    }

    pub fn constant(graph: &ChainGraph<'_>, value: u64) -> Result<Self> {
        Self::new(graph, vec![value; graph.component_count()])
    }

    /// Injective on the components met by `subset` (1, 2, … in order of first
    /// appearance), 1 everywhere else. Its image on `subset` is as large as
    /// any labeling's can be.
    pub fn adversarial(graph: &ChainGraph<'_>, subset: &SubsetHandle) -> Result<Self> {
        graph.space().check_nonempty_subset(subset, "subset")?;
        let mut values = vec![0u64; graph.component_count()];
        let mut next = 1;
        for x in subset.iter() {
            let c = graph.component_of(x);
            if values[c] == 0 {
                values[c] = next;
                next += 1;
            }
        }
        for v in values.iter_mut().filter(|v| **v == 0) {
            *v = 1;
        }
        Self::new(graph, values)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn component_count(&self) -> usize {
        self.values.len()
    }

    pub fn value_at(&self, x: usize) -> u64 {
        self.values[self.component_id[x]]
    }

    /// The labeling read as a function on points.
    pub fn as_point_function(&self) -> Vec<u64> {
        self.component_id.iter().map(|&c| self.values[c]).collect()
    }

    fn matches(&self, graph: &ChainGraph<'_>) -> bool {
        self.component_id == graph.component_ids()
    }
}

/// The label-padded chain metric at one scale.
#[derive(Clone, Debug)]
pub struct RhoMetric<'a> {
    graph: ChainGraph<'a>,
    labeling: ComponentLabeling,
    representatives: Vec<usize>,
    /// `d_ε(x, x_{comp(x)})`.
    rep_distance: Vec<f64>,
    /// Symmetric intra-component chain distances; `NaN` across components.
    intra: Option<Vec<f64>>,
}

impl<'a> RhoMetric<'a> {
    /// Builds the metric; `representatives`, when given, must name one point
    /// of each component in component order.
    pub fn build(
        space: &'a FiniteMetricSpace,
        eps: f64,
        labeling: ComponentLabeling,
        representatives: Option<&[usize]>,
    ) -> Result<Self> {
        let graph = ChainGraph::build(space, eps)?;
        Self::from_graph(graph, labeling, representatives)
    }

    pub fn from_graph(
        graph: ChainGraph<'a>,
        labeling: ComponentLabeling,
        representatives: Option<&[usize]>,
    ) -> Result<Self> {
        if !labeling.matches(&graph) {
            return Err(Error::domain(
                "labeling was built for a different component structure",
            ));
        }
        let reps = match representatives {
            None => graph.representatives().to_vec(),
            Some(reps) => {
                if reps.len() != graph.component_count() {
                    return Err(Error::domain(format!(
                        "{} representatives for {} components",
                        reps.len(),
                        graph.component_count()
                    )));
                }
                for (c, &r) in reps.iter().enumerate() {
                    graph.space().check_point(r)?;
                    if graph.component_of(r) != c {
                        return Err(Error::domain(format!(
                            "representative {r} is not in component {c}"
                        )));
                    }
                }
                reps.to_vec()
            }
        };
        let n = graph.len();
        let intra = (n <= DEFAULT_DENSE_LIMIT).then(|| intra_component_table(&graph));
        let rep_distance = match &intra {
            Some(table) => (0..n)
                .map(|x| table[x * n + reps[graph.component_of(x)]])
                .collect(),
            None => {
                let mut out = vec![0.0; n];
                for &r in &reps {
                    for (x, d) in graph.chain_distances_from(r).into_iter().enumerate() {
                        if let Some(d) = d {
                            out[x] = d;
                        }
                    }
                }
                out
            }
        };
        Ok(Self {
            graph,
            labeling,
            representatives: reps,
            rep_distance,
            intra,
        })
    }

    pub fn graph(&self) -> &ChainGraph<'a> {
        &self.graph
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.graph.space()
    }

    pub fn eps(&self) -> f64 {
        self.graph.eps()
    }

    pub fn labeling(&self) -> &ComponentLabeling {
        &self.labeling
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn representative(&self, component: usize) -> usize {
        self.representatives[component]
    }

    pub fn label_of_component(&self, component: usize) -> u64 {
        self.labeling.values[component]
    }

    /// `d_ε(x, x_i)` for the representative of `x`'s component.
    pub fn distance_to_representative(&self, x: usize) -> f64 {
        self.rep_distance[x]
    }

    pub fn rho_distance(&self, x: usize, y: usize) -> f64 {
        let (cx, cy) = (self.graph.component_of(x), self.graph.component_of(y));
        if cx == cy {
            if x == y {
                return 0.0;
            }
            match &self.intra {
                Some(table) => table[x * self.graph.len() + y],
                None => self
                    .graph
                    .chain_distance(x.min(y), x.max(y))
                    .ok()
                    .flatten()
                    .expect("same component"),
            }
        } else {
            self.rep_distance[x]
                + self.labeling.values[cx] as f64
                + self.rep_distance[y]
                + self.labeling.values[cy] as f64
        }
    }

    pub fn to_table(&self) -> Vec<Vec<f64>> {
        let n = self.graph.len();
        (0..n)
            .map(|x| (0..n).map(|y| self.rho_distance(x, y)).collect())
            .collect()
    }

    /// Materialises the metric as a standalone space on the same carrier.
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::from_fn(self.graph.len(), |x, y| self.rho_distance(x, y))
    }
}

impl PairDistance for RhoMetric<'_> {
    fn carrier_len(&self) -> usize {
        self.graph.len()
    }

    fn distance(&self, x: usize, y: usize) -> f64 {
        self.rho_distance(x, y)
    }
}

fn intra_component_table(graph: &ChainGraph<'_>) -> Vec<f64> {
    let n = graph.len();
    let mut table = vec![f64::NAN; n * n];
    for x in 0..n {
        table[x * n + x] = 0.0;
        for (y, d) in graph.chain_distances_from(x).into_iter().enumerate().skip(x + 1) {
            if let Some(d) = d {
                table[x * n + y] = d;
                table[y * n + x] = d;
            }
        }
    }
    table
}

/// A pair where two metrics disagree although one of them is below the scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalViolation {
    pub x: usize,
    pub y: usize,
    pub base: f64,
    pub other: f64,
}

/// Lists every pair `x < y` with `d(x,y) < eps` or `other(x,y) < eps` on
/// which the two distances differ by more than the tolerance.
pub fn check_locally_identical(
    space: &FiniteMetricSpace,
    other: &impl PairDistance,
    eps: f64,
) -> Result<Vec<LocalViolation>> {
    if other.carrier_len() != space.len() {
        return Err(Error::structural(format!(
            "carrier sizes differ: {} vs {}",
            space.len(),
            other.carrier_len()
        )));
    }
    let mut violations = Vec::new();
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            let base = space.dist(x, y);
            let alt = other.distance(x, y);
            if (base < eps || alt < eps) && (alt - base).abs() > TOLERANCE {
                violations.push(LocalViolation {
                    x,
                    y,
                    base,
                    other: alt,
                });
            }
        }
    }
    Ok(violations)
}

/// Outcome of a Lipschitz-in-the-small check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LsWitness {
    pub k: f64,
    pub delta: f64,
    /// `(x, y, d(x,y), |f(x) - f(y)|)` for offending pairs, `x < y`.
    pub violations: Vec<(usize, usize, f64, f64)>,
}

impl LsWitness {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|f(x) - f(y)| <= k·d(x,y)` on all pairs with `d(x,y) < delta`.
pub fn check_lipschitz_small(
    space: &FiniteMetricSpace,
    f: &[f64],
    k: f64,
    delta: f64,
) -> Result<LsWitness> {
    if f.len() != space.len() {
        return Err(Error::structural(format!(
            "function has {} values for {} points",
            f.len(),
            space.len()
        )));
    }
    if !(k >= 0.0) {
        return Err(Error::domain(format!("Lipschitz constant must be >= 0, got {k}")));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta must be > 0, got {delta}")));
    }
    let mut violations = Vec::new();
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            let d = space.dist(x, y);
            if d < delta {
                let jump = (f[x] - f[y]).abs();
                if jump > k * d + TOLERANCE {
                    violations.push((x, y, d, jump));
                }
            }
        }
    }
    Ok(LsWitness {
        k,
        delta,
        violations,
    })
}
