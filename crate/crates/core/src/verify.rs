//! Seeded random instances and the property suites behind `chainmetric verify`.
//!
//! Every suite draws its instances from a [`InstanceGenerator`] seeded with the
//! user seed mixed with the suite name, so suites are reproducible and
//! independent of the order they run in.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bornology::{
    components_met, cover_with_graph, oscillation_profile, rho_bounded_forward_bound,
    rho_bounded_reverse_cover, CoverMethod, VerificationRecord, DEFAULT_EXACT_LIMIT,
};
use crate::builders::{check_locally_identical, ComponentLabeling, RhoMetric};
use crate::chain::{ChainGraph, Depth};
use crate::error::{Error, Result};
use crate::metric::{dist_to_set, validate_metric, FiniteMetricSpace, Norm, SubsetHandle, TOLERANCE};

/// Deterministic generator of random finite metric spaces and scales.
#[derive(Clone, Debug)]
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed derived from a base seed and a stream name (FNV-1a over the name).
    pub fn for_stream(seed: u64, stream: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in stream.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Self::new(seed ^ h)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A space with `min_n..=max_n` points: a point cloud under a random norm
    /// or a shortest-path metric of a random weighted graph.
    pub fn space(&mut self, min_n: usize, max_n: usize) -> FiniteMetricSpace {
        let n = self.rng.random_range(min_n.max(1)..=max_n.max(min_n).max(1));
        loop {
            let candidate = match self.rng.random_range(0..4) {
                0..=2 => {
                    let dim = self.rng.random_range(1..=3);
                    let norm = [Norm::Euclidean, Norm::L1, Norm::Linf][self.rng.random_range(0..3)];
                    let coords = (0..n)
                        .map(|_| (0..dim).map(|_| self.rng.random::<f64>()).collect())
                        .collect();
                    FiniteMetricSpace::from_points(coords, norm)
                }
                _ => self.graph_metric(n),
            };
            if let Ok(space) = candidate {
                return space;
            }
        }
    }

    fn graph_metric(&mut self, n: usize) -> Result<FiniteMetricSpace> {
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        // random spanning tree plus extra edges
        for j in 1..n {
            let i = self.rng.random_range(0..j);
            let w = self.rng.random_range(0.05..1.0);
            d[i][j] = w;
            d[j][i] = w;
        }
        for _ in 0..n {
            let (i, j) = (self.rng.random_range(0..n), self.rng.random_range(0..n));
            if i != j {
                let w = self.rng.random_range(0.05..1.0);
                d[i][j] = d[i][j].min(w);
                d[j][i] = d[i][j];
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        FiniteMetricSpace::from_table(&d)
    }

    /// A scale between the smallest and largest positive distance, biased
    /// towards the lower end so several components are common.
    pub fn eps(&mut self, space: &FiniteMetricSpace) -> f64 {
        let mut dists: Vec<f64> = (0..space.len())
            .flat_map(|i| ((i + 1)..space.len()).map(move |j| (i, j)))
            .map(|(i, j)| space.dist(i, j))
            .collect();
        if dists.is_empty() {
            return 1.0;
        }
        dists.sort_by(f64::total_cmp);
        let q = self.rng.random::<f64>().powi(2);
        let pick = dists[((dists.len() - 1) as f64 * q) as usize];
        pick * self.rng.random_range(0.8..1.2)
    }

    /// One label in `1..=max` per component.
    pub fn labels(&mut self, components: usize, max: u64) -> Vec<u64> {
        (0..components).map(|_| self.rng.random_range(1..=max)).collect()
    }

    /// A nonempty random subset of `0..n`.
    pub fn subset(&mut self, n: usize) -> SubsetHandle {
        let size = self.rng.random_range(1..=n);
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut self.rng);
        all.truncate(size);
        SubsetHandle::new(n, all).expect("distinct in-range indices")
    }
}

/// All suites, in the order `--suite all` runs them.
pub const SUITES: [&str; 5] = ["metric", "rho", "lemma", "cover", "oscillation"];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<VerificationRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.records.iter().map(|r| r.failures).sum()
    }
}

#[derive(Default)]
struct Tally {
    records: Vec<VerificationRecord>,
}

impl Tally {
    fn record(&mut self, property: &str, ok: bool) {
        let pos = match self.records.iter().position(|r| r.property == property) {
            Some(pos) => pos,
            None => {
                self.records.push(VerificationRecord {
                    property: property.to_string(),
                    instances: 0,
                    failures: 0,
                });
                self.records.len() - 1
            }
        };
        let rec = &mut self.records[pos];
        rec.instances += 1;
        if !ok {
            rec.failures += 1;
        }
    }
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run_suites(name: &str, seed: u64, instances: usize) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        other if SUITES.contains(&other) => vec![other],
        other => return Err(Error::domain(format!("unknown suite '{other}'"))),
    };
    Ok(names
        .into_iter()
        .map(|suite| {
            let start = Instant::now();
            let mut gen = InstanceGenerator::for_stream(seed, suite);
            let mut tally = Tally::default();
            for _ in 0..instances {
                match suite {
                    "metric" => metric_instance(&mut gen, &mut tally),
                    "rho" => rho_instance(&mut gen, &mut tally),
                    "lemma" => lemma_instance(&mut gen, &mut tally),
                    "cover" => cover_instance(&mut gen, &mut tally),
                    _ => oscillation_instance(&mut gen, &mut tally),
                }
            }
            SuiteReport {
                suite: suite.to_string(),
                records: tally.records,
                elapsed: start.elapsed(),
            }
        })
        .collect())
}

/// Least step-sum over simple ε-paths, by exhaustive depth-first enumeration.
pub fn brute_force_chain_distance(space: &FiniteMetricSpace, eps: f64, x: usize, y: usize) -> Option<f64> {
    fn walk(
        space: &FiniteMetricSpace,
        eps: f64,
        at: usize,
        target: usize,
        sum: f64,
        seen: &mut [bool],
        best: &mut Option<f64>,
    ) {
        if at == target {
            if best.is_none_or(|b| sum < b) {
                *best = Some(sum);
            }
            return;
        }
        for next in 0..space.len() {
            if !seen[next] && space.dist(at, next) < eps {
                seen[next] = true;
                walk(space, eps, next, target, sum + space.dist(at, next), seen, best);
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; space.len()];
    seen[x] = true;
    let mut best = None;
    walk(space, eps, x, y, 0.0, &mut seen, &mut best);
    best
}

fn metric_instance(gen: &mut InstanceGenerator, tally: &mut Tally) {
    let space = gen.space(2, 9);
    let eps = gen.eps(&space);
    let graph = ChainGraph::build(&space, eps).expect("positive scale");
    let n = space.len();
    tally.record(
        "generated space satisfies the metric axioms",
        validate_metric(&space.to_table(), TOLERANCE).is_ok_and(|r| r.is_empty()),
    );
    let target = gen.subset(n);
    let g: Vec<f64> = (0..n).map(|x| dist_to_set(&space, x, &target).unwrap()).collect();
    let lipschitz = (0..n).all(|x| (0..n).all(|y| (g[x] - g[y]).abs() <= space.dist(x, y) + TOLERANCE));
    tally.record("distance to a set is 1-Lipschitz", lipschitz);

    let table: Vec<Vec<Option<f64>>> = (0..n).map(|x| graph.chain_distances_from(x)).collect();
    let mut oracle_ok = true;
    let mut lower_ok = true;
    for x in 0..n {
        for y in 0..n {
            let oracle = brute_force_chain_distance(&space, eps, x, y);
            oracle_ok &= match (table[x][y], oracle) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                (None, None) => true,
                _ => false,
            };
            if let Some(c) = table[x][y] {
                let d = space.dist(x, y);
                lower_ok &= c >= d - TOLERANCE;
                if d < eps {
                    lower_ok &= (c - d).abs() <= TOLERANCE;
                }
            }
        }
    }
    tally.record("chain distance equals exhaustive simple-path minimum", oracle_ok);
    tally.record("chain distance dominates d and equals it below the scale", lower_ok);
    let mut axioms = true;
    for x in 0..n {
        for y in 0..n {
            let Some(xy) = table[x][y] else { continue };
            axioms &= (xy == 0.0) == (x == y);
            axioms &= (xy - table[y][x].unwrap_or(f64::NAN)).abs() <= TOLERANCE;
            for z in 0..n {
                if let (Some(xz), Some(zy)) = (table[x][z], table[z][y]) {
                    axioms &= xy <= xz + zy + TOLERANCE;
                }
            }
        }
    }
    tally.record("chain distance is a metric on each component", axioms);
}

fn random_rho<'a>(gen: &mut InstanceGenerator, space: &'a FiniteMetricSpace) -> RhoMetric<'a> {
    let eps = gen.eps(space);
    let graph = ChainGraph::build(space, eps).expect("positive scale");
    let labels = gen.labels(graph.component_count(), 5);
    let labeling = ComponentLabeling::new(&graph, labels).expect("positive labels");
    RhoMetric::from_graph(graph, labeling, None).expect("matching labeling")
}

fn rho_instance(gen: &mut InstanceGenerator, tally: &mut Tally) {
    let space = gen.space(2, 60);
    let rho = random_rho(gen, &space);
    let eps = rho.eps();
    let table = rho.to_table();
    tally.record(
        "rho satisfies the metric axioms",
        validate_metric(&table, TOLERANCE).is_ok_and(|r| r.is_empty()),
    );
    tally.record(
        "rho and d are uniformly locally identical",
        check_locally_identical(&space, &rho, eps).is_ok_and(|v| v.is_empty()),
    );
    let graph = rho.graph();
    let alt: Vec<usize> = (0..graph.component_count())
        .map(|c| {
            let members = graph.component_members(c);
            members.indices()[gen.rng().random_range(0..members.len())]
        })
        .collect();
    let omega = RhoMetric::from_graph(graph.clone(), rho.labeling().clone(), Some(&alt))
        .expect("representatives drawn from their components");
    let n = space.len();
    let mut agree = true;
    for x in 0..n {
        for y in 0..n {
            let (a, b) = (rho.rho_distance(x, y), omega.rho_distance(x, y));
            if a < eps || b < eps {
                agree &= (a - b).abs() <= TOLERANCE && (a - space.dist(x, y)).abs() <= TOLERANCE;
            }
        }
    }
    tally.record("representative choice is invisible below the scale", agree);
}

fn lemma_instance(gen: &mut InstanceGenerator, tally: &mut Tally) {
    let space = gen.space(2, 60);
    let rho = random_rho(gen, &space);
    let graph = rho.graph();
    let eps = rho.eps();
    let n = space.len();

    let mut hop_ok = true;
    for x in 0..n {
        let hops = graph.hops_from(x, Depth::Unbounded);
        let chain = graph.chain_distances_from(x);
        for y in 0..n {
            if let (Some(h), Some(c)) = (hops[y], chain[y]) {
                hop_ok &= h as f64 <= 2.0 * c / eps + 1.0 + TOLERANCE;
            }
        }
    }
    tally.record("hop count is at most 2*chain distance/eps + 1", hop_ok);

    let count = graph.component_count();
    let mut comps: Vec<usize> = (0..count).collect();
    comps.shuffle(gen.rng());
    comps.truncate(gen.rng().random_range(1..=count));
    let j = comps[gen.rng().random_range(0..comps.len())];
    let m = gen.rng().random_range(1..=4);
    tally.record(
        "rho-balls contain finite unions of chain-balls",
        rho_bounded_forward_bound(&rho, &comps, m, j).is_ok_and(|f| f.violations.is_empty()),
    );

    let subset = gen.subset(n);
    let base = rho.representative(graph.component_of(subset.indices()[0]));
    let radius = subset
        .iter()
        .map(|x| rho.rho_distance(x, base))
        .fold(0.0, f64::max)
        + gen.rng().random_range(1e-6..1.0);
    tally.record(
        "rho-bounded sets sit in finitely many chain-balls",
        rho_bounded_reverse_cover(&rho, &subset, radius).is_ok_and(|c| c.verified),
    );

    let met = components_met(graph, &subset).expect("nonempty subset");
    let image = |labels: &ComponentLabeling| {
        let f = labels.as_point_function();
        let mut seen: Vec<u64> = subset.iter().map(|x| f[x]).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    };
    let mut bounded = true;
    for _ in 0..10 {
        let max = gen.rng().random_range(1..=2 * count as u64 + 1);
        let labels = gen.labels(count, max);
        let labeling = ComponentLabeling::new(graph, labels).expect("positive labels");
        bounded &= image(&labeling) <= met;
    }
    let adversarial = ComponentLabeling::adversarial(graph, &subset).expect("nonempty subset");
    bounded &= image(&adversarial) == met;
    tally.record("labelings take at most components-met values on a subset", bounded);
}

fn cover_instance(gen: &mut InstanceGenerator, tally: &mut Tally) {
    let space = gen.space(2, DEFAULT_EXACT_LIMIT);
    let eps = gen.eps(&space);
    let graph = ChainGraph::build(&space, eps).expect("positive scale");
    let subset = gen.subset(space.len());
    let depths = [Depth::Steps(1), Depth::Steps(2), Depth::Steps(4)];
    let exact: Vec<usize> = depths
        .iter()
        .map(|&m| {
            cover_with_graph(&graph, &subset, m, CoverMethod::Exact, DEFAULT_EXACT_LIMIT)
                .expect("within exact limit")
                .size
        })
        .collect();
    let met = components_met(&graph, &subset).expect("nonempty subset");
    tally.record(
        "exact cover sizes: net >= chain-2 >= chain-4 >= components met",
        exact[0] >= exact[1] && exact[1] >= exact[2] && exact[2] >= met,
    );
    let factor = 1.0 + (subset.len() as f64).ln();
    let greedy_ok = depths.iter().zip(&exact).all(|(&m, &best)| {
        let g = cover_with_graph(&graph, &subset, m, CoverMethod::Greedy, 0).expect("greedy");
        g.verify(&graph) && g.size as f64 <= factor * best as f64 + TOLERANCE
    });
    tally.record("greedy cover is within 1 + ln|B| of optimal", greedy_ok);
}

fn oscillation_instance(gen: &mut InstanceGenerator, tally: &mut Tally) {
    let space = gen.space(2, 60);
    let rho = random_rho(gen, &space);
    let x0 = gen.rng().random_range(0..space.len());
    let f: Vec<f64> = (0..space.len()).map(|x| rho.rho_distance(x, x0)).collect();
    let ok = oscillation_profile(rho.graph(), &f, 1.0, 4).is_ok_and(|all| all.iter().all(|o| o.ok));
    tally.record("oscillation on B^m(x, eps) is at most m*eps", ok);
}
