//! Finite-scale covering profiles.
//!
//! At a fixed scale ε a subset `B` can be covered by
//!
//! * open ε-balls (`m = 1`, the net cover behind total boundedness),
//! * chain-balls `B^m(c, ε)` for a fixed step budget `m` (Bourbaki-style
//!   boundedness), or
//! * whole ε-components (`m = ∞`, α-boundedness), where the minimum number
//!   of centers is simply the number of components `B` meets.
//!
//! Centers range over the whole space, not just over `B`. Minimum covers are
//! set-cover instances: [`CoverMethod::Greedy`] is the default, and
//! [`CoverMethod::Exact`] runs a branch-and-bound search once dominated
//! candidate centers are discarded.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::builders::{check_lipschitz_small, RhoMetric};
use crate::chain::{ChainGraph, Depth};
use crate::error::{Error, Result};
use crate::metric::{diameter, FiniteMetricSpace, SubsetHandle, TOLERANCE};

/// Default bound on candidate centers for exact cover search.
pub const DEFAULT_EXACT_LIMIT: usize = 14;

/// Default tail length for the Bourbaki-Cauchy prefix diagnostic.
pub const DEFAULT_MIN_TAIL: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMethod {
    Greedy,
    Exact,
    /// Centers fixed by a constructive argument rather than a search.
    Certificate,
}

/// Centers whose chain-balls `B^m(c, ε)` cover `covered`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverResult {
    pub centers: Vec<usize>,
    pub m: Depth,
    pub eps: f64,
    pub covered: SubsetHandle,
    pub size: usize,
    pub method: CoverMethod,
}

impl CoverResult {
    /// Re-checks coverage from scratch.
    pub fn verify(&self, graph: &ChainGraph<'_>) -> bool {
        let mut reached = vec![false; graph.len()];
        for &c in &self.centers {
            for (y, h) in graph.hops_from(c, self.m).into_iter().enumerate() {
                if h.is_some() {
                    reached[y] = true;
                }
            }
        }
        self.size == self.centers.len() && self.covered.iter().all(|x| reached[x])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn empty(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }

    fn full(bits: usize) -> Self {
        let mut set = Self::empty(bits);
        for i in 0..bits {
            set.insert(i);
        }
        set
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn overlap(&self, other: &BitSet) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn remove_all(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// For every center that reaches `subset`, the positions of `subset` it covers.
fn coverage_sets(graph: &ChainGraph<'_>, subset: &SubsetHandle, m: Depth) -> Vec<(usize, BitSet)> {
    let mut met = vec![false; graph.component_count()];
    for x in subset.iter() {
        met[graph.component_of(x)] = true;
    }
    (0..graph.len())
        .filter(|&c| met[graph.component_of(c)])
        .filter_map(|c| {
            let hops = graph.hops_from(c, m);
            let mut set = BitSet::empty(subset.len());
            for (pos, x) in subset.iter().enumerate() {
                if hops[x].is_some() {
                    set.insert(pos);
                }
            }
            (!set.is_empty()).then_some((c, set))
        })
        .collect()
}

fn greedy(sets: &[(usize, BitSet)], universe: usize) -> Vec<usize> {
    let mut uncovered = BitSet::full(universe);
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(k, (_, s))| (k, s.overlap(&uncovered)))
            // max_by_key keeps the last maximum; compare so the smallest center wins.
            .fold((usize::MAX, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        assert!(gain > 0, "every subset point covers itself");
        chosen.push(sets[best].0);
        uncovered.remove_all(&sets[best].1);
    }
    chosen
}

/// Drops candidates whose coverage is contained in another's; the first
/// (smallest) center is kept among equals. Minimum cover size is unchanged.
fn undominated(sets: Vec<(usize, BitSet)>) -> Vec<(usize, BitSet)> {
    let keep: Vec<bool> = (0..sets.len())
        .map(|a| {
            !(0..sets.len()).any(|b| {
                b != a
                    && sets[a].1.is_subset(&sets[b].1)
                    && (!sets[b].1.is_subset(&sets[a].1) || b < a)
            })
        })
        .collect();
    sets.into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

fn exact(sets: &[(usize, BitSet)], universe: usize, upper: Vec<usize>) -> Vec<usize> {
    struct Search<'s> {
        sets: &'s [(usize, BitSet)],
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, uncovered: &BitSet, chosen: &mut Vec<usize>) {
            let Some(target) = uncovered.first() else {
                if chosen.len() < self.best.len() {
                    self.best = chosen.clone();
                }
                return;
            };
            if chosen.len() + 1 >= self.best.len() {
                return;
            }
            for (c, set) in self.sets.iter().filter(|(_, s)| s.contains(target)) {
                let mut rest = uncovered.clone();
                rest.remove_all(set);
                chosen.push(*c);
                self.run(&rest, chosen);
                chosen.pop();
            }
        }
    }

    let mut search = Search { sets, best: upper };
    search.run(&BitSet::full(universe), &mut Vec::new());
    let mut best = search.best;
    best.sort_unstable();
    best
}

/// Covers `subset` with chain-balls of depth `m` over an existing graph.
pub fn cover_with_graph(
    graph: &ChainGraph<'_>,
    subset: &SubsetHandle,
    m: Depth,
    method: CoverMethod,
    exact_limit: usize,
) -> Result<CoverResult> {
    graph.space().check_nonempty_subset(subset, "subset to cover")?;
    if let Depth::Steps(0) = m {
        return Err(Error::domain("chain depth must be at least 1"));
    }
    let sets = coverage_sets(graph, subset, m);
    let centers = match method {
        CoverMethod::Greedy => greedy(&sets, subset.len()),
        CoverMethod::Exact => {
            let sets = undominated(sets);
            if sets.len() > exact_limit {
                return Err(Error::Capacity {
                    candidates: sets.len(),
                    limit: exact_limit,
                });
            }
            let upper = greedy(&sets, subset.len());
            exact(&sets, subset.len(), upper)
        }
        CoverMethod::Certificate => {
            return Err(Error::domain("certificate covers are not produced by search"))
        }
    };
    Ok(CoverResult {
        size: centers.len(),
        centers,
        m,
        eps: graph.eps(),
        covered: subset.clone(),
        method,
    })
}

/// Cover by open ε-balls.
pub fn net_cover(
    space: &FiniteMetricSpace,
    subset: &SubsetHandle,
    eps: f64,
    method: CoverMethod,
    exact_limit: usize,
) -> Result<CoverResult> {
    let graph = ChainGraph::build(space, eps)?;
    cover_with_graph(&graph, subset, Depth::Steps(1), method, exact_limit)
}

/// Cover by chain-balls `B^m(c, ε)`.
pub fn chain_cover(
    space: &FiniteMetricSpace,
    subset: &SubsetHandle,
    eps: f64,
    m: Depth,
    method: CoverMethod,
    exact_limit: usize,
) -> Result<CoverResult> {
    let graph = ChainGraph::build(space, eps)?;
    cover_with_graph(&graph, subset, m, method, exact_limit)
}

/// Number of ε-components that `subset` meets.
pub fn components_met(graph: &ChainGraph<'_>, subset: &SubsetHandle) -> Result<usize> {
    graph.space().check_nonempty_subset(subset, "subset")?;
    let mut met = vec![false; graph.component_count()];
    let mut count = 0;
    for x in subset.iter() {
        let c = graph.component_of(x);
        if !met[c] {
            met[c] = true;
            count += 1;
        }
    }
    Ok(count)
}

/// Outcome of checking `ρ(x, x_j) <= M·ε + 2K` over `⋃_{i∈F} B^M(x_i, ε)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardBound {
    /// Largest label over `F`.
    pub k: u64,
    pub bound: f64,
    pub checked: usize,
    /// `(x, ρ(x, x_j))` for points exceeding the bound.
    pub violations: Vec<(usize, f64)>,
}

/// A union of depth-`m` chain-balls around finitely many representatives is
/// ρ-bounded: every point of it is within `m·ε + 2K` of the representative of
/// component `j`.
pub fn rho_bounded_forward_bound(
    rho: &RhoMetric<'_>,
    components: &[usize],
    m: usize,
    j: usize,
) -> Result<ForwardBound> {
    let graph = rho.graph();
    if components.is_empty() {
        return Err(Error::domain("component list must be nonempty"));
    }
    if let Some(&c) = components.iter().find(|&&c| c >= graph.component_count()) {
        return Err(Error::domain(format!("component {c} does not exist")));
    }
    if !components.contains(&j) {
        return Err(Error::domain(format!("component {j} is not in the list")));
    }
    let depth = Depth::steps(m)?;
    let k = components
        .iter()
        .map(|&c| rho.label_of_component(c))
        .max()
        .expect("nonempty");
    let bound = m as f64 * graph.eps() + 2.0 * k as f64;
    let anchor = rho.representative(j);
    let mut in_union = vec![false; graph.len()];
    for &c in components {
        for (x, h) in graph.hops_from(rho.representative(c), depth).into_iter().enumerate() {
            if h.is_some() {
                in_union[x] = true;
            }
        }
    }
    let mut checked = 0;
    let mut violations = Vec::new();
    for x in (0..graph.len()).filter(|&x| in_union[x]) {
        checked += 1;
        let value = rho.rho_distance(x, anchor);
        if value > bound + TOLERANCE {
            violations.push((x, value));
        }
    }
    Ok(ForwardBound {
        k,
        bound,
        checked,
        violations,
    })
}

/// Finite data showing a ρ-bounded set sits in finitely many chain-balls.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReverseCertificate {
    /// Component of the first point of `B`; its representative is the ρ-center.
    pub base_component: usize,
    /// Components met by `B`.
    pub components: Vec<usize>,
    pub k: u64,
    /// `⌈2(R + K + f(x_{i0}))/ε⌉ + 1`.
    pub m: usize,
    pub cover: CoverResult,
    pub verified: bool,
}

/// Given `ρ(x, x_{i0}) < radius` on `subset`, produces `F` and `M` with
/// `subset ⊆ ⋃_{i∈F} B^M(x_i, ε)` and checks the inclusion.
pub fn rho_bounded_reverse_cover(
    rho: &RhoMetric<'_>,
    subset: &SubsetHandle,
    radius: f64,
) -> Result<ReverseCertificate> {
    let graph = rho.graph();
    graph.space().check_nonempty_subset(subset, "subset")?;
    let base_component = graph.component_of(subset.indices()[0]);
    let base = rho.representative(base_component);
    if let Some(x) = subset.iter().find(|&x| !(rho.rho_distance(x, base) < radius)) {
        return Err(Error::domain(format!(
            "point {x} has rho-distance {} to representative {base}, not below {radius}",
            rho.rho_distance(x, base)
        )));
    }
    let mut components: Vec<usize> = subset.iter().map(|x| graph.component_of(x)).collect();
    components.sort_unstable();
    components.dedup();
    let k = components
        .iter()
        .map(|&c| rho.label_of_component(c))
        .max()
        .expect("nonempty");
    let reach = radius + k as f64 + rho.label_of_component(base_component) as f64;
    let m = (2.0 * reach / graph.eps()).ceil() as usize + 1;
    let centers: Vec<usize> = components.iter().map(|&c| rho.representative(c)).collect();
    let cover = CoverResult {
        size: centers.len(),
        centers,
        m: Depth::Steps(m),
        eps: graph.eps(),
        covered: subset.clone(),
        method: CoverMethod::Certificate,
    };
    let verified = cover.verify(graph);
    Ok(ReverseCertificate {
        base_component,
        components,
        k,
        m,
        cover,
        verified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub m: Depth,
    pub size: usize,
    pub method: CoverMethod,
}

/// Cover sizes at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub eps: f64,
    pub entries: Vec<ProfileEntry>,
    pub components_met: usize,
}

impl ScaleRow {
    pub fn size_at(&self, m: Depth) -> Option<usize> {
        self.entries.iter().find(|e| e.m == m).map(|e| e.size)
    }
}

/// A greedy size that grew when the depth grew.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyAnomaly {
    pub eps: f64,
    pub m_low: Depth,
    pub size_low: usize,
    pub m_high: Depth,
    pub size_high: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    #[serde(rename = "indices")]
    pub subset: SubsetHandle,
    pub diameter: f64,
    #[serde(rename = "profile")]
    pub rows: Vec<ScaleRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anomalies: Vec<GreedyAnomaly>,
}

fn normalize_eps_grid(eps_grid: &[f64]) -> Result<Vec<f64>> {
    if eps_grid.is_empty() {
        return Err(Error::domain("scale grid is empty"));
    }
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::domain(format!("scale {e} is not a positive finite real")));
    }
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// Sorted, deduplicated, always containing the net depth `m = 1`.
fn normalize_m_grid(m_grid: &[Depth]) -> Result<Vec<Depth>> {
    if m_grid.contains(&Depth::Steps(0)) {
        return Err(Error::domain("chain depth must be at least 1"));
    }
    let mut grid = m_grid.to_vec();
    grid.push(Depth::Steps(1));
    grid.sort_unstable();
    grid.dedup();
    Ok(grid)
}

fn profile_row(
    space: &FiniteMetricSpace,
    subset: &SubsetHandle,
    eps: f64,
    m_grid: &[Depth],
) -> Result<ScaleRow> {
    let graph = ChainGraph::build(space, eps)?;
    let entries = m_grid
        .iter()
        .map(|&m| {
            cover_with_graph(&graph, subset, m, CoverMethod::Greedy, 0).map(|c| ProfileEntry {
                m,
                size: c.size,
                method: CoverMethod::Greedy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaleRow {
        eps,
        entries,
        components_met: components_met(&graph, subset)?,
    })
}

/// Greedy cover sizes for every `(eps, m)` cell plus the component count per scale.
pub fn scale_profile(
    space: &FiniteMetricSpace,
    subset: &SubsetHandle,
    eps_grid: &[f64],
    m_grid: &[Depth],
) -> Result<ScaleProfile> {
    space.check_nonempty_subset(subset, "subset")?;
    let eps_grid = normalize_eps_grid(eps_grid)?;
    let m_grid = normalize_m_grid(m_grid)?;

    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        eps_grid
            .par_iter()
            .map(|&eps| profile_row(space, subset, eps, &m_grid))
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows = eps_grid
        .iter()
        .map(|&eps| profile_row(space, subset, eps, &m_grid))
        .collect::<Result<Vec<_>>>()?;

    let mut anomalies = Vec::new();
    for row in &rows {
        for pair in row.entries.windows(2) {
            if pair[1].size > pair[0].size {
                anomalies.push(GreedyAnomaly {
                    eps: row.eps,
                    m_low: pair[0].m,
                    size_low: pair[0].size,
                    m_high: pair[1].m,
                    size_high: pair[1].size,
                });
            }
        }
    }
    Ok(ScaleProfile {
        subset: subset.clone(),
        diameter: diameter(space, subset)?,
        rows,
        anomalies,
    })
}

/// A scale at which some finite-depth chain cover is strictly smaller than
/// the net cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceFlag {
    pub subset: usize,
    pub eps: f64,
    pub net_size: usize,
    pub m: Depth,
    pub chain_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    pub indices: SubsetHandle,
    pub diameter: f64,
    pub profile: Vec<ScaleRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anomalies: Vec<GreedyAnomaly>,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub property: String,
    pub instances: usize,
    pub failures: usize,
}

/// Per-subset covering profiles plus the scales where they diverge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornologyReport {
    pub schema_version: u32,
    /// Generator spec of the analysed space, or `"external"`.
    pub space: String,
    pub eps_grid: Vec<f64>,
    pub m_grid: Vec<Depth>,
    pub subsets: Vec<SubsetReport>,
    pub flags: Vec<DivergenceFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Vec<VerificationRecord>>,
}

impl Default for BornologyReport {
    fn default() -> Self {
        Self {
            schema_version: 1,
            space: "external".to_string(),
            eps_grid: Vec::new(),
            m_grid: Vec::new(),
            subsets: Vec::new(),
            flags: Vec::new(),
            verification: None,
        }
    }
}

impl BornologyReport {
    pub fn with_space(mut self, space: impl Into<String>) -> Self {
        self.space = space.into();
        self
    }

    pub fn with_verification(mut self, records: Vec<VerificationRecord>) -> Self {
        self.verification = Some(records);
        self
    }
}

fn summarize(profile: &ScaleProfile, flags: &[&DivergenceFlag]) -> String {
    let mut text = format!("d-diameter {:.6}", profile.diameter);
    let net: Vec<usize> = profile
        .rows
        .iter()
        .filter_map(|r| r.size_at(Depth::Steps(1)))
        .collect();
    let comps: Vec<usize> = profile.rows.iter().map(|r| r.components_met).collect();
    let _ = write!(
        text,
        "; net cover sizes {:?} (total-boundedness profile); components met {:?} (alpha profile)",
        net, comps
    );
    let mut diverging: Vec<f64> = flags.iter().map(|f| f.eps).collect();
    diverging.dedup();
    if diverging.is_empty() {
        text.push_str("; chain covers never beat net covers on this grid");
    } else {
        let widest = flags
            .iter()
            .max_by_key(|f| f.net_size - f.chain_size)
            .expect("nonempty");
        let _ = write!(
            text,
            "; chain covers beat net covers at {} scale(s), widest gap at eps {}: net {} vs chain-{} {} \
             (Bourbaki-style coverage without matching net coverage)",
            diverging.len(),
            widest.eps,
            widest.net_size,
            widest.m,
            widest.chain_size
        );
    }
    if !profile.anomalies.is_empty() {
        let _ = write!(
            text,
            "; {} greedy monotonicity anomaly(ies)",
            profile.anomalies.len()
        );
    }
    text
}

/// Profiles each subset and flags every `(subset, eps, m)` with a finite
/// chain cover smaller than the net cover.
pub fn bornology_report(
    space: &FiniteMetricSpace,
    subsets: &[SubsetHandle],
    eps_grid: &[f64],
    m_grid: &[Depth],
) -> Result<BornologyReport> {
    if subsets.is_empty() {
        return Err(Error::domain("at least one subset is required"));
    }
    let eps_norm = normalize_eps_grid(eps_grid)?;
    let m_norm = normalize_m_grid(m_grid)?;
    let mut report = BornologyReport {
        eps_grid: eps_norm.clone(),
        m_grid: m_norm.clone(),
        ..BornologyReport::default()
    };
    for (index, subset) in subsets.iter().enumerate() {
        let profile = scale_profile(space, subset, &eps_norm, &m_norm)?;
        let first_flag = report.flags.len();
        for row in &profile.rows {
            let net = row.size_at(Depth::Steps(1)).expect("m = 1 is always profiled");
            for entry in &row.entries {
                if matches!(entry.m, Depth::Steps(m) if m > 1) && entry.size < net {
                    report.flags.push(DivergenceFlag {
                        subset: index,
                        eps: row.eps,
                        net_size: net,
                        m: entry.m,
                        chain_size: entry.size,
                    });
                }
            }
        }
        let own: Vec<&DivergenceFlag> = report.flags[first_flag..].iter().collect();
        let summary = summarize(&profile, &own);
        report.subsets.push(SubsetReport {
            indices: profile.subset,
            diameter: profile.diameter,
            profile: profile.rows,
            anomalies: profile.anomalies,
            summary,
        });
    }
    Ok(report)
}

/// A tail of a sequence inside one chain-ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CauchyWitness {
    pub m: Depth,
    pub tail_start: usize,
    pub center: usize,
}

/// Smallest `m` (then tail start, then center) such that `seq[tail_start..]`
/// has at least `min_tail` terms and lies in `B^m(center, eps)`.
///
/// `None` when every admissible tail meets more than one ε-component.
pub fn bourbaki_cauchy_prefix(
    space: &FiniteMetricSpace,
    seq: &[usize],
    eps: f64,
    min_tail: usize,
) -> Result<Option<CauchyWitness>> {
    if min_tail == 0 {
        return Err(Error::domain("min_tail must be positive"));
    }
    if min_tail > seq.len() {
        return Err(Error::domain(format!(
            "min_tail {min_tail} exceeds sequence length {}",
            seq.len()
        )));
    }
    for &x in seq {
        space.check_point(x)?;
    }
    let graph = ChainGraph::build(space, eps)?;
    let last_start = seq.len() - min_tail;
    let mut best: Option<(usize, usize, usize)> = None;
    for center in 0..space.len() {
        let hops = graph.hops_from(center, Depth::Unbounded);
        // suffix[t] = hops needed to reach all of seq[t..]
        let mut needed: Option<usize> = Some(0);
        let mut suffix = vec![None; seq.len()];
        for t in (0..seq.len()).rev() {
            needed = match (needed, hops[seq[t]]) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            suffix[t] = needed;
        }
        for (t, need) in suffix.iter().enumerate().take(last_start + 1) {
            if let Some(need) = need {
                let candidate = (need.max(&1).to_owned(), t, center);
                if best.is_none_or(|b| candidate < b) {
                    best = Some(candidate);
                }
            }
        }
    }
    Ok(best.map(|(m, tail_start, center)| CauchyWitness {
        m: Depth::Steps(m),
        tail_start,
        center,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Oscillation {
    pub x: usize,
    pub m: usize,
    pub max_oscillation: f64,
    pub bound: f64,
    pub ok: bool,
}

fn certify_ls(graph: &ChainGraph<'_>, f: &[f64], k: f64) -> Result<()> {
    let witness = check_lipschitz_small(graph.space(), f, k, graph.eps())?;
    if let Some(&(x, y, d, jump)) = witness.violations.first() {
        return Err(Error::domain(format!(
            "function is not ({k}, {})-Lipschitz in the small: |f({x}) - f({y})| = {jump} at distance {d}",
            graph.eps()
        )));
    }
    Ok(())
}

fn oscillation_at(graph: &ChainGraph<'_>, f: &[f64], k: f64, x: usize, m: usize) -> Oscillation {
    let max_oscillation = graph
        .hops_from(x, Depth::Steps(m))
        .iter()
        .enumerate()
        .filter(|(_, h)| h.is_some())
        .map(|(y, _)| (f[y] - f[x]).abs())
        .fold(0.0, f64::max);
    let bound = k * m as f64 * graph.eps();
    Oscillation {
        x,
        m,
        max_oscillation,
        bound,
        ok: max_oscillation <= bound + TOLERANCE,
    }
}

/// Largest `|f(y) - f(x)|` over `B^m(x, ε)`, against the bound `K·m·ε`.
///
/// `f` must be `K`-Lipschitz on pairs closer than the graph's scale.
pub fn oscillation_check(
    graph: &ChainGraph<'_>,
    f: &[f64],
    k: f64,
    x: usize,
    m: usize,
) -> Result<Oscillation> {
    graph.space().check_point(x)?;
    Depth::steps(m)?;
    certify_ls(graph, f, k)?;
    Ok(oscillation_at(graph, f, k, x, m))
}

/// [`oscillation_check`] for every point and every depth `1..=max_m`,
/// certifying `f` once.
pub fn oscillation_profile(
    graph: &ChainGraph<'_>,
    f: &[f64],
    k: f64,
    max_m: usize,
) -> Result<Vec<Oscillation>> {
    Depth::steps(max_m)?;
    certify_ls(graph, f, k)?;
    Ok((0..graph.len())
        .flat_map(|x| (1..=max_m).map(move |m| (x, m)))
        .map(|(x, m)| oscillation_at(graph, f, k, x, m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::ComponentLabeling;
    use crate::metric::Norm;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let pts = points.iter().map(|&p| vec![p]).collect();
        FiniteMetricSpace::from_points(pts, Norm::Euclidean).unwrap()
    }

    fn unit_line() -> FiniteMetricSpace {
        line(&[0.0, 1.0, 2.0, 3.0, 4.0])
    }

    #[test]
    fn exact_net_cover_on_line() {
        let space = unit_line();
        let all = space.all_points();
        let cover = net_cover(&space, &all, 1.1, CoverMethod::Exact, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(cover.size, 2);
        let g = ChainGraph::build(&space, 1.1).unwrap();
        assert!(cover.verify(&g));
        let greedy = net_cover(&space, &all, 1.1, CoverMethod::Greedy, 0).unwrap();
        assert!(greedy.verify(&g));
    }

    #[test]
    fn trivial_covers() {
        let space = unit_line();
        let one = SubsetHandle::singleton(3);
        let cover = net_cover(&space, &one, 0.5, CoverMethod::Exact, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!((cover.size, cover.centers.clone()), (1, vec![3]));
        let wide = net_cover(&space, &space.all_points(), 4.5, CoverMethod::Greedy, 0).unwrap();
        assert_eq!(wide.size, 1);
        assert!(net_cover(&space, &SubsetHandle::default(), 1.0, CoverMethod::Greedy, 0).is_err());
    }

    #[test]
    fn chain_cover_depths() {
        let space = unit_line();
        let all = space.all_points();
        let c = chain_cover(&space, &all, 1.1, Depth::Steps(2), CoverMethod::Exact, 14).unwrap();
        assert_eq!((c.size, c.centers.clone()), (1, vec![2]));
        let split = line(&[0.0, 1.0, 5.0, 6.0, 20.0]);
        let c = chain_cover(&split, &split.all_points(), 1.5, Depth::Unbounded, CoverMethod::Greedy, 0)
            .unwrap();
        assert_eq!(c.centers, vec![0, 2, 4]);
    }

    #[test]
    fn exact_capacity_error() {
        let space = FiniteMetricSpace::from_fn(20, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let err = net_cover(&space, &space.all_points(), 0.5, CoverMethod::Exact, 14).unwrap_err();
        assert!(matches!(err, Error::Capacity { candidates: 20, limit: 14 }));
    }

    #[test]
    fn components_met_counts() {
        let space = FiniteMetricSpace::from_fn(6, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let g = ChainGraph::build(&space, 0.5).unwrap();
        let b = SubsetHandle::new(6, [0, 2, 5]).unwrap();
        assert_eq!(components_met(&g, &b).unwrap(), 3);
        let g = ChainGraph::build(&space, 1.5).unwrap();
        assert_eq!(components_met(&g, &b).unwrap(), 1);
    }

    #[test]
    fn forward_bound_two_components() {
        let space = line(&[0.0, 0.4, 0.8, 5.0, 5.3, 5.6]);
        let g = ChainGraph::build(&space, 0.5).unwrap();
        let l = ComponentLabeling::constant(&g, 1).unwrap();
        let rho = RhoMetric::from_graph(g, l, None).unwrap();
        let fb = rho_bounded_forward_bound(&rho, &[0, 1], 2, 0).unwrap();
        assert_eq!(fb.k, 1);
        assert!((fb.bound - 3.0).abs() < 1e-12);
        assert_eq!(fb.checked, 6);
        assert!(fb.violations.is_empty());
        assert!(rho_bounded_forward_bound(&rho, &[0], 2, 1).is_err());
        assert!(rho_bounded_forward_bound(&rho, &[0, 7], 2, 0).is_err());
    }

    #[test]
    fn reverse_cover_single_point_and_violation() {
        let space = line(&[0.0, 0.4, 0.8, 5.0]);
        let g = ChainGraph::build(&space, 0.5).unwrap();
        let l = ComponentLabeling::new(&g, vec![1, 2]).unwrap();
        let rho = RhoMetric::from_graph(g, l, None).unwrap();
        let cert = rho_bounded_reverse_cover(&rho, &SubsetHandle::singleton(0), 0.1).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.components, vec![0]);
        let all = space.all_points();
        assert!(rho_bounded_reverse_cover(&rho, &all, 1.0).is_err());
        let cert = rho_bounded_reverse_cover(&rho, &all, 4.0).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.k, 2);
        // ceil(2 * (4 + 2 + 1) / 0.5) + 1
        assert_eq!(cert.m, 29);
    }

    #[test]
    fn profile_of_singleton_is_all_ones() {
        let space = unit_line();
        let p = scale_profile(
            &space,
            &SubsetHandle::singleton(1),
            &[0.5, 2.0],
            &[Depth::Steps(2), Depth::Unbounded],
        )
        .unwrap();
        assert_eq!(p.rows.len(), 2);
        for row in &p.rows {
            assert_eq!(row.entries.len(), 3);
            assert!(row.entries.iter().all(|e| e.size == 1));
            assert_eq!(row.components_met, 1);
        }
    }

    #[test]
    fn discrete_profile() {
        let space = FiniteMetricSpace::from_fn(4, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let p = scale_profile(
            &space,
            &space.all_points(),
            &[1.5, 0.5],
            &[Depth::Steps(1), Depth::Steps(3), Depth::Unbounded],
        )
        .unwrap();
        assert_eq!(p.rows[0].eps, 0.5);
        assert!(p.rows[0].entries.iter().all(|e| e.size == 4));
        assert_eq!(p.rows[0].components_met, 4);
        assert!(p.rows[1].entries.iter().all(|e| e.size == 1));
        assert!(p.anomalies.is_empty());
    }

    #[test]
    fn singleton_report_has_no_flags() {
        let space = unit_line();
        let subsets: Vec<SubsetHandle> = (0..5).map(SubsetHandle::singleton).collect();
        let r = bornology_report(&space, &subsets, &[0.5, 1.5], &[Depth::Steps(2)]).unwrap();
        assert!(r.flags.is_empty());
        assert_eq!(r.subsets.len(), 5);
        assert!(bornology_report(&space, &[], &[0.5], &[]).is_err());
    }

    #[test]
    fn cauchy_prefix_cases() {
        let space = unit_line();
        let w = bourbaki_cauchy_prefix(&space, &[3, 3, 3, 3], 0.5, 2).unwrap().unwrap();
        assert_eq!(w, CauchyWitness { m: Depth::Steps(1), tail_start: 0, center: 3 });
        let alt = bourbaki_cauchy_prefix(&space, &[0, 4, 0, 4, 0, 4], 1.5, 2).unwrap().unwrap();
        assert_eq!(alt.m, Depth::Steps(2));
        assert_eq!(bourbaki_cauchy_prefix(&space, &[0, 4, 0, 4], 0.5, 2).unwrap(), None);
        assert!(bourbaki_cauchy_prefix(&space, &[0], 0.5, 2).is_err());
        assert!(bourbaki_cauchy_prefix(&space, &[0], 0.5, 0).is_err());
    }

    #[test]
    fn oscillation_of_distance_function() {
        let space = line(&[0.0, 0.3, 0.7, 1.0, 1.6]);
        let g = ChainGraph::build(&space, 0.5).unwrap();
        let f: Vec<f64> = (0..5).map(|y| space.dist(y, 1)).collect();
        for m in 1..4 {
            let o = oscillation_check(&g, &f, 1.0, 1, m).unwrap();
            assert!(o.ok);
            assert!(o.max_oscillation < m as f64 * 0.5);
        }
        let constant = vec![2.0; 5];
        assert_eq!(oscillation_check(&g, &constant, 0.0, 2, 3).unwrap().max_oscillation, 0.0);
        let steep: Vec<f64> = (0..5).map(|y| 10.0 * space.dist(y, 0)).collect();
        assert!(oscillation_check(&g, &steep, 1.0, 0, 1).is_err());
        assert_eq!(oscillation_profile(&g, &f, 1.0, 3).unwrap().len(), 15);
    }
}
