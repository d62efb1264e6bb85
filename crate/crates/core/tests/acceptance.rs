//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p chainmetric --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use chainmetric::spaces::orthonormal_tips;
use chainmetric::verify::InstanceGenerator;
use chainmetric::{
    ball_inclusion_map, chain_cover, components_met, cover_with_graph, generate, net_cover,
    oscillation_profile, rho_bounded_forward_bound, rho_bounded_reverse_cover, ChainGraph,
    ComponentLabeling, CoverMethod, Depth, FiniteMetricSpace, RhoMetric, SpaceSpec,
};
use rand::seq::SliceRandom;
use rand::Rng;

use common::TAU;

const SEED: u64 = 20_241_016;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("took {elapsed:?}, limit {limit_s}s")
    })
}

/// The shared random family behind criteria 1, 3, 4, 5 and 10: n <= 60,
/// a scale inside the distance range, labels in 1..=5.
struct Suite1 {
    spaces: Vec<(FiniteMetricSpace, f64, Vec<u64>)>,
}

impl Suite1 {
    fn new() -> Self {
        let mut gen = InstanceGenerator::for_stream(SEED, "suite-1");
        let spaces = (0..200)
            .map(|_| {
                let space = gen.space(2, 60);
                let eps = gen.eps(&space);
                let count = ChainGraph::build(&space, eps).unwrap().component_count();
                let labels = gen.labels(count, 5);
                (space, eps, labels)
            })
            .collect();
        Self { spaces }
    }

    fn rhos(&self) -> impl Iterator<Item = RhoMetric<'_>> {
        self.spaces.iter().map(|(space, eps, labels)| {
            let graph = ChainGraph::build(space, *eps).unwrap();
            let labeling = ComponentLabeling::new(&graph, labels.clone()).unwrap();
            RhoMetric::from_graph(graph, labeling, None).unwrap()
        })
    }
}

fn ac01_rho_triangle(suite: &Suite1) -> Outcome {
    let start = Instant::now();
    let mut triples = 0usize;
    for (k, rho) in suite.rhos().enumerate() {
        let n = rho.space().len();
        let t = rho.to_table();
        for x in 0..n {
            for y in 0..n {
                ensure((t[x][y] == 0.0) == (x == y), || format!("instance {k}: zero iff equal fails at ({x},{y})"))?;
                ensure((t[x][y] - t[y][x]).abs() <= TAU, || format!("instance {k}: asymmetry at ({x},{y})"))?;
                for z in 0..n {
                    triples += 1;
                    ensure(t[x][y] <= t[x][z] + t[z][y] + TAU, || {
                        format!("instance {k}: triangle fails for ({x},{y}) via {z}")
                    })?;
                }
            }
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("200 instances, {triples} triples, 0 failures, {:?}", start.elapsed()))
}

fn ac02_chain_oracle() -> Outcome {
    let start = Instant::now();
    let mut gen = InstanceGenerator::for_stream(SEED, "criterion-2");
    let mut pairs = 0usize;
    for k in 0..100 {
        let space = gen.space(2, 9);
        let eps = gen.eps(&space);
        let graph = ChainGraph::build(&space, eps).unwrap();
        for x in 0..space.len() {
            let oracle = common::simple_path_minimum(&space, eps, x);
            for (y, expected) in oracle.iter().enumerate() {
                pairs += 1;
                let got = graph.chain_distance(x, y).unwrap();
                let ok = match (got, expected) {
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                    (None, None) => true,
                    _ => false,
                };
                ensure(ok, || format!("instance {k}: d_eps({x},{y}) = {got:?}, oracle {expected:?}"))?;
            }
        }
    }
    within(start.elapsed(), 10)?;
    Ok(format!("100 instances, {pairs} pairs, 0 failures, {:?}", start.elapsed()))
}

fn ac03_local_identity(suite: &Suite1) -> Outcome {
    let mut checked = 0usize;
    for (k, rho) in suite.rhos().enumerate() {
        let space = rho.space();
        let eps = rho.eps();
        for x in 0..space.len() {
            for y in 0..space.len() {
                let (d, r) = (space.dist(x, y), rho.rho_distance(x, y));
                if d < eps || r < eps {
                    checked += 1;
                    ensure((d - r).abs() <= TAU, || {
                        format!("instance {k}: ({x},{y}) d = {d}, rho = {r}, eps = {eps}")
                    })?;
                }
            }
        }
    }
    Ok(format!("{checked} short pairs agree in both directions"))
}

fn ac04_hop_bound(suite: &Suite1) -> Outcome {
    let mut pairs = 0usize;
    for (k, (space, eps, _)) in suite.spaces.iter().enumerate() {
        let graph = ChainGraph::build(space, *eps).unwrap();
        for x in 0..space.len() {
            for y in 0..space.len() {
                let (Some(h), Some(c)) = (graph.hop_distance(x, y).unwrap(), graph.chain_distance(x, y).unwrap())
                else {
                    continue;
                };
                pairs += 1;
                ensure(h as f64 <= 2.0 * c / eps + 1.0 + TAU, || {
                    format!("instance {k}: hop({x},{y}) = {h} > 2*{c}/{eps} + 1")
                })?;
            }
        }
    }
    Ok(format!("{pairs} connected pairs"))
}

fn ac05_bounded_lemma(suite: &Suite1) -> Outcome {
    let mut gen = InstanceGenerator::for_stream(SEED, "criterion-5");
    let mut forward_cases = 0usize;
    for (k, rho) in suite.rhos().enumerate() {
        let graph = rho.graph();
        let adj = common::threshold(rho.space(), rho.eps());
        let count = graph.component_count();
        let mut comps: Vec<usize> = (0..count).collect();
        comps.shuffle(gen.rng());
        comps.truncate(gen.rng().random_range(1..=count));
        let j = comps[gen.rng().random_range(0..comps.len())];
        let m = gen.rng().random_range(1..=4usize);
        let report = rho_bounded_forward_bound(&rho, &comps, m, j).map_err(|e| e.to_string())?;
        ensure(report.violations.is_empty(), || format!("instance {k}: {:?}", report.violations))?;
        let kmax = comps.iter().map(|&c| rho.label_of_component(c)).max().unwrap() as f64;
        let bound = m as f64 * rho.eps() + 2.0 * kmax;
        let anchor = rho.representative(j);
        for &c in &comps {
            let h = common::hops(&adj, rho.representative(c));
            for x in (0..h.len()).filter(|&x| h[x].is_some_and(|h| h <= m)) {
                ensure(rho.rho_distance(x, anchor) <= bound + TAU, || {
                    format!("instance {k}: rho({x}, x_j) exceeds {bound}")
                })?;
            }
        }
        forward_cases += 1;
    }

    let mut reverse_cases = 0usize;
    for (k, rho) in suite.rhos().take(100).enumerate() {
        let n = rho.space().len();
        let subset = gen.subset(n);
        let base = rho.representative(rho.graph().component_of(subset.indices()[0]));
        let radius = subset.iter().map(|x| rho.rho_distance(x, base)).fold(0.0, f64::max)
            + gen.rng().random_range(1e-6..2.0);
        let cert = rho_bounded_reverse_cover(&rho, &subset, radius).map_err(|e| e.to_string())?;
        ensure(cert.verified, || format!("reverse case {k}: certificate does not verify"))?;
        let adj = common::threshold(rho.space(), rho.eps());
        let comp = common::components(&adj);
        for x in subset.iter() {
            let rep = cert
                .cover
                .centers
                .iter()
                .copied()
                .find(|&c| comp[c] == comp[x])
                .ok_or_else(|| format!("reverse case {k}: no center in the component of {x}"))?;
            let h = common::hops(&adj, rep)[x].unwrap();
            ensure(h <= cert.m, || format!("reverse case {k}: {x} is {h} hops from {rep} > M = {}", cert.m))?;
        }
        reverse_cases += 1;
    }
    Ok(format!("forward: {forward_cases} cases, reverse: {reverse_cases} (B, R) cases, 0 failures"))
}

fn ac06_cover_chain() -> Outcome {
    let start = Instant::now();
    let mut gen = InstanceGenerator::for_stream(SEED, "criterion-6");
    let mut cells = 0usize;
    for k in 0..50 {
        let space = gen.space(2, 14);
        let eps = gen.eps(&space);
        let graph = ChainGraph::build(&space, eps).unwrap();
        let subset = gen.subset(space.len());
        let adj = common::threshold(&space, eps);
        let target = (1u64 << subset.len()) - 1;
        let mut sizes = Vec::new();
        for m in [1usize, 2, 4] {
            let exact = cover_with_graph(&graph, &subset, Depth::Steps(m), CoverMethod::Exact, 14)
                .map_err(|e| format!("instance {k}: {e}"))?;
            let masks = common::chain_ball_masks(&adj, subset.indices(), Some(m));
            let oracle = common::min_cover_size(&masks, target);
            ensure(exact.size == oracle, || format!("instance {k}, m={m}: exact {} vs oracle {oracle}", exact.size))?;
            ensure(exact.verify(&graph), || format!("instance {k}, m={m}: exact cover invalid"))?;
            let greedy = cover_with_graph(&graph, &subset, Depth::Steps(m), CoverMethod::Greedy, 0).unwrap();
            ensure(greedy.verify(&graph), || format!("instance {k}, m={m}: greedy cover invalid"))?;
            let factor = 1.0 + (subset.len() as f64).ln();
            ensure(greedy.size as f64 <= factor * exact.size as f64, || {
                format!("instance {k}, m={m}: greedy {} > (1+ln {}) * {}", greedy.size, subset.len(), exact.size)
            })?;
            sizes.push(exact.size);
            cells += 1;
        }
        let met = components_met(&graph, &subset).unwrap();
        let oracle_met = {
            let comp = common::components(&adj);
            let mut c: Vec<usize> = subset.iter().map(|x| comp[x]).collect();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        ensure(met == oracle_met, || format!("instance {k}: components met {met} vs {oracle_met}"))?;
        ensure(sizes[0] >= sizes[1] && sizes[1] >= sizes[2] && sizes[2] >= met, || {
            format!("instance {k}: net {} chain-2 {} chain-4 {} components {met}", sizes[0], sizes[1], sizes[2])
        })?;
    }
    within(start.elapsed(), 60)?;
    Ok(format!("50 instances, {cells} cells, {:?}", start.elapsed()))
}

fn ac07_orthonormal_rays() -> Outcome {
    let space = generate(&SpaceSpec::OrthonormalRays { rays: 8, steps: 3 }).unwrap().space;
    let tips = orthonormal_tips(8, 3);
    let eps = 0.8;
    let net = net_cover(&space, &tips, eps, CoverMethod::Exact, 14).map_err(|e| e.to_string())?;
    let chain = chain_cover(&space, &tips, eps, Depth::Steps(3), CoverMethod::Exact, 14).map_err(|e| e.to_string())?;
    let graph = ChainGraph::build(&space, eps).unwrap();
    let met = components_met(&graph, &tips).unwrap();
    let adj = common::threshold(&space, eps);
    let target = (1u64 << tips.len()) - 1;
    let net_oracle = common::min_cover_size(&common::chain_ball_masks(&adj, tips.indices(), Some(1)), target);
    let chain_oracle = common::min_cover_size(&common::chain_ball_masks(&adj, tips.indices(), Some(3)), target);
    ensure(net.size == 8 && net_oracle == 8, || format!("net cover {} (oracle {net_oracle}), expected 8", net.size))?;
    ensure(chain.size == 1 && chain_oracle == 1, || format!("chain-3 cover {} (oracle {chain_oracle}), expected 1", chain.size))?;
    ensure(met == 1, || format!("components met {met}, expected 1"))?;
    Ok(format!("net 8, chain-3 1 (center {:?}), components 1", chain.centers))
}

fn ac08_reciprocal_profile() -> Outcome {
    let mut sizes = Vec::new();
    for k in [50, 200] {
        let space = generate(&SpaceSpec::ReciprocalSet { k }).unwrap().space;
        let all = space.all_points();
        let greedy = net_cover(&space, &all, 0.1, CoverMethod::Greedy, 0).map_err(|e| e.to_string())?;
        let adj = common::threshold(&space, 0.1);
        let oracle = {
            // same greedy rule on explicit membership lists
            let mut uncovered: Vec<bool> = vec![true; space.len()];
            let mut count = 0;
            while uncovered.iter().any(|&u| u) {
                let best = (0..space.len())
                    .max_by_key(|&c| {
                        let gain = (0..space.len()).filter(|&y| uncovered[y] && (y == c || adj[c][y])).count();
                        (gain, std::cmp::Reverse(c))
                    })
                    .unwrap();
                for y in 0..space.len() {
                    if y == best || adj[best][y] {
                        uncovered[y] = false;
                    }
                }
                count += 1;
            }
            count
        };
        ensure(greedy.size == oracle, || format!("k={k}: greedy {} vs oracle {oracle}", greedy.size))?;
        sizes.push(greedy.size);
    }
    ensure(sizes[0] == sizes[1], || format!("k=50 size {} vs k=200 size {}", sizes[0], sizes[1]))?;
    Ok(format!("greedy net size {} at k=50 and k=200", sizes[0]))
}

fn ac09_tashjian() -> Outcome {
    let mut gen = InstanceGenerator::for_stream(SEED, "criterion-9");
    let mut labelings = 0usize;
    for k in 0..100 {
        let space = gen.space(2, 60);
        let eps = gen.eps(&space);
        let graph = ChainGraph::build(&space, eps).unwrap();
        let subset = gen.subset(space.len());
        let met = components_met(&graph, &subset).unwrap();
        let image = |l: &ComponentLabeling| {
            let f = l.as_point_function();
            let mut v: Vec<u64> = subset.iter().map(|x| f[x]).collect();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        for _ in 0..10 {
            let max = gen.rng().random_range(1..=2 * graph.component_count() as u64 + 1);
            let l = ComponentLabeling::new(&graph, gen.labels(graph.component_count(), max)).unwrap();
            ensure(image(&l) <= met, || format!("instance {k}: image {} > components met {met}", image(&l)))?;
            labelings += 1;
        }
        let adversarial = ComponentLabeling::adversarial(&graph, &subset).unwrap();
        ensure(image(&adversarial) == met, || {
            format!("instance {k}: adversarial image {} != components met {met}", image(&adversarial))
        })?;
        labelings += 1;
    }
    Ok(format!("100 instances, {labelings} labelings"))
}

fn ac10_oscillation(suite: &Suite1) -> Outcome {
    let mut gen = InstanceGenerator::for_stream(SEED, "criterion-10");
    let mut checks = 0usize;
    for (k, rho) in suite.rhos().enumerate() {
        let space = rho.space();
        let eps = rho.eps();
        let n = space.len();
        let x0 = gen.rng().random_range(0..n);
        let f: Vec<f64> = (0..n).map(|x| rho.rho_distance(x, x0)).collect();
        for x in 0..n {
            for y in 0..n {
                if space.dist(x, y) < eps {
                    ensure((f[x] - f[y]).abs() <= space.dist(x, y) + TAU, || {
                        format!("instance {k}: f is not (1, eps)-LS at ({x},{y})")
                    })?;
                }
            }
        }
        let profile = oscillation_profile(rho.graph(), &f, 1.0, 4).map_err(|e| e.to_string())?;
        ensure(profile.iter().all(|o| o.ok), || format!("instance {k}: library reports a violation"))?;
        let adj = common::threshold(space, eps);
        for x in 0..n {
            let h = common::hops(&adj, x);
            for m in 1..=4usize {
                let osc = (0..n)
                    .filter(|&y| h[y].is_some_and(|h| h <= m))
                    .map(|y| (f[y] - f[x]).abs())
                    .fold(0.0, f64::max);
                ensure(osc <= m as f64 * eps + TAU, || {
                    format!("instance {k}: oscillation {osc} on B^{m}({x}) exceeds {}", m as f64 * eps)
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (x, m) cells"))
}

fn ac11_sqrt_inclusion() -> Outcome {
    let g = generate(&SpaceSpec::SqrtInterval { radius: 100.0, step: 0.25 }).unwrap();
    let d = g.space;
    let rho = g.companion.unwrap();
    let radii: Vec<f64> = (1..=10).map(f64::from).collect();
    let map = ball_inclusion_map(&d, &rho, 0, &radii).map_err(|e| e.to_string())?;
    for &(r, big_r) in &map {
        let brute = (0..d.len())
            .filter(|&y| rho.dist(0, y) <= r)
            .map(|y| d.dist(0, y))
            .fold(0.0, f64::max);
        ensure(big_r == brute, || format!("r={r}: R={big_r}, brute force {brute}"))?;
        ensure((big_r - r * r).abs() <= 0.25, || format!("r={r}: R={big_r}, expected {}", r * r))?;
    }
    ensure(map.windows(2).all(|w| w[0].1 <= w[1].1), || "map is not monotone".into())?;
    Ok(format!("R = r^2 for r = 1..10 (R(10) = {})", map[9].1))
}

fn ac12_cli_round_trip() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_chainmetric");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("space.csv");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())
    };
    let gen = run(&[
        "generate", "--family", "orthonormal_rays", "--params", "rays=8,steps=3",
        "--out", csv.to_str().unwrap(),
    ])?;
    ensure(gen.status.success(), || format!("generate failed: {}", String::from_utf8_lossy(&gen.stderr)))?;
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let res = run(&[
            "analyze", "--input", csv.to_str().unwrap(), "--eps-grid", "0.2:1.6:0.2",
            "--m-grid", "1,2,4,inf", "--out", out.to_str().unwrap(),
        ])?;
        ensure(res.status.success(), || format!("analyze failed: {}", String::from_utf8_lossy(&res.stderr)))?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "analyze output differs between runs".into())?;
    let json: serde_json::Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
    check_report_schema(&json)?;
    let verify = run(&["verify", "--suite", "all", "--seed", "7", "--instances", "100"])?;
    let table = String::from_utf8_lossy(&verify.stdout);
    ensure(verify.status.code() == Some(0), || format!("verify exited {:?}:\n{table}", verify.status.code()))?;
    ensure(table.contains(", 0 failure(s)"), || format!("verify table reports failures:\n{table}"))?;
    Ok("generate -> analyze byte-identical and schema-valid; verify --suite all exits 0".into())
}

fn check_report_schema(json: &serde_json::Value) -> Result<(), String> {
    let obj = json.as_object().ok_or("report is not an object")?;
    for key in ["schema_version", "space", "eps_grid", "m_grid", "subsets", "flags"] {
        ensure(obj.contains_key(key), || format!("missing key '{key}'"))?;
    }
    ensure(json["schema_version"] == 1, || "schema_version != 1".into())?;
    ensure(json["space"].is_string(), || "space is not a string".into())?;
    ensure(json["eps_grid"].as_array().is_some_and(|a| a.iter().all(|v| v.is_number())), || "eps_grid".into())?;
    let m_ok = |v: &serde_json::Value| v.is_u64() || v == "inf";
    ensure(json["m_grid"].as_array().is_some_and(|a| a.iter().all(m_ok)), || "m_grid".into())?;
    for subset in json["subsets"].as_array().ok_or("subsets is not an array")? {
        ensure(subset["indices"].as_array().is_some_and(|a| a.iter().all(|v| v.is_u64())), || "indices".into())?;
        ensure(subset["diameter"].is_number(), || "diameter".into())?;
        for row in subset["profile"].as_array().ok_or("profile is not an array")? {
            ensure(row["eps"].is_number() && row["components_met"].is_u64(), || "profile row".into())?;
            for e in row["entries"].as_array().ok_or("entries is not an array")? {
                ensure(m_ok(&e["m"]) && e["size"].is_u64() && e["method"].is_string(), || "entry".into())?;
            }
        }
    }
    for flag in json["flags"].as_array().ok_or("flags is not an array")? {
        ensure(flag["eps"].is_number() && flag["net_size"].is_u64() && flag["chain_size"].is_u64(), || "flag".into())?;
    }
    if let Some(v) = json.get("verification") {
        for rec in v.as_array().ok_or("verification is not an array")? {
            ensure(rec["property"].is_string() && rec["instances"].is_u64() && rec["failures"].is_u64(), || {
                "verification record".into()
            })?;
        }
    }
    Ok(())
}

fn main() {
    let suite = Suite1::new();
    let criteria: Vec<Criterion<'_>> = vec![
        ("AC-01", "rho metric axioms on 200 random instances", Box::new(|| ac01_rho_triangle(&suite))),
        ("AC-02", "chain distance equals simple-path oracle", Box::new(ac02_chain_oracle)),
        ("AC-03", "uniform local identity of rho and d", Box::new(|| ac03_local_identity(&suite))),
        ("AC-04", "hop <= 2 d_eps / eps + 1", Box::new(|| ac04_hop_bound(&suite))),
        ("AC-05", "rho-bounded sets vs chain-ball unions, both directions", Box::new(|| ac05_bounded_lemma(&suite))),
        ("AC-06", "exact cover chain and greedy quality", Box::new(ac06_cover_chain)),
        ("AC-07", "orthonormal rays: net 8, chain-3 1, components 1", Box::new(ac07_orthonormal_rays)),
        ("AC-08", "reciprocal set net profile stable from k=50 to k=200", Box::new(ac08_reciprocal_profile)),
        ("AC-09", "labeling image bounded by components met", Box::new(ac09_tashjian)),
        ("AC-10", "oscillation on B^m(x, eps) <= m eps", Box::new(|| ac10_oscillation(&suite))),
        ("AC-11", "sqrt interval ball inclusion R = r^2", Box::new(ac11_sqrt_inclusion)),
        ("AC-12", "CLI generate/analyze/verify round trip", Box::new(ac12_cli_round_trip)),
    ];
    let mut failed = 0;
    for (id, title, check) in &criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("{id} PASS  {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL  {title}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
