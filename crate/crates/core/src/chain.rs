//! ε-chains on a finite metric space.
//!
//! Two points are ε-chained when a finite sequence of points joins them with
//! every consecutive distance strictly below ε. [`ChainGraph`] holds the
//! threshold graph at one scale together with its components, smallest-index
//! representatives, chain-balls `B^m(x, ε)`, hop distances and the chain
//! metric `d_ε` (infimum of step-sums over ε-chains).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SubsetHandle};
use crate::union_find::UnionFind;

/// Step budget for chain-balls and chain covers: a positive count or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Steps(usize),
    Unbounded,
}

impl Depth {
    /// A finite depth; zero is rejected since chain-balls start at `B^1`.
    pub fn steps(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("chain depth must be at least 1"));
        }
        Ok(Depth::Steps(m))
    }

    pub fn admits(self, hops: usize) -> bool {
        match self {
            Depth::Steps(m) => hops <= m,
            Depth::Unbounded => true,
        }
    }

    pub fn as_finite(self) -> Option<usize> {
        match self {
            Depth::Steps(m) => Some(m),
            Depth::Unbounded => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Depth::Steps(_))
    }

    fn validate(self) -> Result<Self> {
        match self {
            Depth::Steps(0) => Err(Error::domain("chain depth must be at least 1")),
            other => Ok(other),
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Steps(m) => write!(f, "{m}"),
            Depth::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Depth::Unbounded);
        }
        let m: usize = s
            .parse()
            .map_err(|_| Error::domain(format!("invalid depth '{s}', expected a positive integer or 'inf'")))?;
        Depth::steps(m)
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Steps(m) => serializer.serialize_u64(*m as u64),
            Depth::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(m) => Depth::steps(m as usize).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The ε-threshold graph of a space with its chain components.
#[derive(Clone, Debug)]
pub struct ChainGraph<'a> {
    space: &'a FiniteMetricSpace,
    eps: f64,
    adjacency: Vec<Vec<usize>>,
    component_id: Vec<usize>,
    representatives: Vec<usize>,
    component_sizes: Vec<usize>,
}

impl<'a> ChainGraph<'a> {
    /// Joins every pair at distance strictly below `eps`.
    ///
    /// Components are numbered in order of their smallest member, which is
    /// also the component's representative.
    pub fn build(space: &'a FiniteMetricSpace, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(format!("scale must be a positive finite real, got {eps}")));
        }
        let n = space.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if space.dist(i, j) < eps {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                    uf.union(i, j);
                }
            }
        }
        let mut root_to_component = vec![usize::MAX; n];
        let mut component_id = vec![0; n];
        let mut representatives = Vec::new();
        let mut component_sizes = Vec::new();
        for x in 0..n {
            let root = uf.find(x);
            if root_to_component[root] == usize::MAX {
                root_to_component[root] = representatives.len();
                representatives.push(x);
                component_sizes.push(0);
            }
            let c = root_to_component[root];
            component_id[x] = c;
            component_sizes[c] += 1;
        }
        Ok(Self {
            space,
            eps,
            adjacency,
            component_id,
            representatives,
            component_sizes,
        })
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn component_of(&self, x: usize) -> usize {
        self.component_id[x]
    }

    pub fn component_ids(&self) -> &[usize] {
        &self.component_id
    }

    pub fn component_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn representative(&self, component: usize) -> usize {
        self.representatives[component]
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.component_sizes
    }

    pub fn component_members(&self, component: usize) -> SubsetHandle {
        let members = (0..self.len())
            .filter(|&x| self.component_id[x] == component)
            .collect();
        SubsetHandle::from_sorted_unchecked(members)
    }

    /// Breadth-first hop counts from `x`, stopping after `limit` layers.
    pub fn hops_from(&self, x: usize, limit: Depth) -> Vec<Option<usize>> {
        let mut hops = vec![None; self.len()];
        hops[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            let next = hops[u].expect("queued nodes have hop counts") + 1;
            if !limit.admits(next) {
                continue;
            }
            for &v in &self.adjacency[u] {
                if hops[v].is_none() {
                    hops[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        hops
    }

    /// `B^m(x, ε)`: the points reachable from `x` by an ε-chain of at most `m` steps.
    pub fn chain_ball(&self, x: usize, m: Depth) -> Result<ChainBall> {
        self.space.check_point(x)?;
        let m = m.validate()?;
        let hops = self.hops_from(x, m);
        let (members, hop): (Vec<usize>, Vec<usize>) = hops
            .iter()
            .enumerate()
            .filter_map(|(y, h)| h.map(|h| (y, h)))
            .unzip();
        Ok(ChainBall {
            center: x,
            m,
            members: SubsetHandle::from_sorted_unchecked(members),
            hop,
        })
    }

    /// Fewest steps of an ε-chain from `x` to `y`; `None` across components.
    pub fn hop_distance(&self, x: usize, y: usize) -> Result<Option<usize>> {
        self.space.check_point(x)?;
        self.space.check_point(y)?;
        if self.component_id[x] != self.component_id[y] {
            return Ok(None);
        }
        Ok(self.hops_from(x, Depth::Unbounded)[y])
    }

    /// Chain distances from `x` to every point; `None` outside its component.
    pub fn chain_distances_from(&self, x: usize) -> Vec<Option<f64>> {
        let (dist, _) = self.dijkstra(x, None);
        dist.into_iter()
            .map(|d| d.is_finite().then_some(d))
            .collect()
    }

    /// `d_ε(x, y)`: least step-sum over ε-chains; `None` across components.
    pub fn chain_distance(&self, x: usize, y: usize) -> Result<Option<f64>> {
        self.space.check_point(x)?;
        self.space.check_point(y)?;
        if self.component_id[x] != self.component_id[y] {
            return Ok(None);
        }
        let (dist, _) = self.dijkstra(x, Some(y));
        Ok(Some(dist[y]))
    }

    /// A chain attaining `d_ε(x, y)`.
    pub fn shortest_chain(&self, x: usize, y: usize) -> Result<Chain> {
        self.space.check_point(x)?;
        self.space.check_point(y)?;
        if self.component_id[x] != self.component_id[y] {
            return Err(Error::DifferentComponents(x, y));
        }
        let (_, pred) = self.dijkstra(x, Some(y));
        let mut points = vec![y];
        let mut cur = y;
        while cur != x {
            cur = pred[cur];
            points.push(cur);
        }
        points.reverse();
        Ok(Chain {
            points,
            eps: self.eps,
        })
    }

    /// Single-source shortest paths over threshold edges weighted by distance.
    /// Unreached points get `f64::INFINITY`.
    fn dijkstra(&self, source: usize, target: Option<usize>) -> (Vec<f64>, Vec<usize>) {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        pred[source] = source;
        heap.push(HeapEntry { cost: 0.0, node: source });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            if target == Some(node) {
                break;
            }
            for &next in &self.adjacency[node] {
                let candidate = cost + self.space.dist(node, next);
                if candidate < dist[next] {
                    dist[next] = candidate;
                    pred[next] = node;
                    heap.push(HeapEntry {
                        cost: candidate,
                        node: next,
                    });
                }
            }
        }
        (dist, pred)
    }
}

#[derive(Clone, Copy, Debug)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Reversed so the max-heap pops the cheapest entry first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `B^m(center, ε)` with the hop count of every member.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainBall {
    pub center: usize,
    pub m: Depth,
    pub members: SubsetHandle,
    /// Aligned with `members`.
    pub hop: Vec<usize>,
}

/// A finite sequence of points with every step strictly below `eps`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    points: Vec<usize>,
    eps: f64,
}

impl Chain {
    pub fn new(space: &FiniteMetricSpace, eps: f64, points: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("a chain needs at least one point"));
        }
        for &p in &points {
            space.check_point(p)?;
        }
        if let Some(w) = points.windows(2).find(|w| !(space.dist(w[0], w[1]) < eps)) {
            return Err(Error::domain(format!(
                "step {} -> {} has length {} which is not below {eps}",
                w[0],
                w[1],
                space.dist(w[0], w[1])
            )));
        }
        Ok(Self { points, eps })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of steps.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> usize {
        self.points[0]
    }

    pub fn end(&self) -> usize {
        *self.points.last().expect("chains are nonempty")
    }

    pub fn step_sum(&self, space: &FiniteMetricSpace) -> f64 {
        self.points.windows(2).map(|w| space.dist(w[0], w[1])).sum()
    }

    /// Every two consecutive steps sum to at least `eps`.
    pub fn is_irreducible(&self, space: &FiniteMetricSpace) -> bool {
        self.points
            .windows(3)
            .all(|w| space.dist(w[0], w[1]) + space.dist(w[1], w[2]) >= self.eps)
    }
}

/// Drops interior points whose two adjacent steps sum below `eps` until the
/// chain is irreducible. The endpoints are kept and the step-sum never grows.
pub fn reduce_chain(space: &FiniteMetricSpace, eps: f64, chain: &Chain) -> Result<Chain> {
    let mut points = Chain::new(space, eps, chain.points.clone())?.points;
    let mut k = 1;
    while k + 1 < points.len() {
        let (a, b, c) = (points[k - 1], points[k], points[k + 1]);
        if space.dist(a, b) + space.dist(b, c) < eps {
            points.remove(k);
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    Ok(Chain { points, eps })
}
