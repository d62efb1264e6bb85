//! The `chainmetric` command line.
//!
//! Exit codes: 0 success, 1 domain or validation failure (including failing
//! verification suites), 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bornology::{bornology_report, cover_with_graph, CoverMethod, DEFAULT_EXACT_LIMIT};
use crate::builders::{ComponentLabeling, RhoMetric};
use crate::chain::{ChainGraph, Depth};
use crate::error::{Error, Result};
use crate::spaces::{
    generate, load_distance_csv_path, load_labels_path, load_subset_path, report_to_json,
    save_distance_csv, SpaceSpec,
};
use crate::verify::run_suites;

#[derive(Debug, Parser)]
#[command(name = "chainmetric", version, about = "Chain components, chain metrics and covering profiles of finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an example space and write its distance matrix as CSV.
    Generate {
        #[arg(long)]
        family: String,
        /// Comma-separated key=value parameters, e.g. `rays=8,steps=3`.
        #[arg(long, default_value = "")]
        params: String,
        /// Seed for random families.
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the companion metric (sqrt_interval's |√x − √y|) instead of the primary one.
        #[arg(long)]
        companion: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count the ε-components and report their sizes.
    Components {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Chain distance d_ε between two points.
    ChainDist {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Cover a subset with chain-balls B^m(c, ε).
    Cover {
        #[arg(long)]
        input: PathBuf,
        /// One point index per line; defaults to every point.
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        eps: f64,
        /// Positive integer or `inf`.
        #[arg(long, default_value = "1")]
        m: Depth,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label-padded chain metric between two points.
    Rho {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        /// One positive integer per component, in component order.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Covering profiles over a scale grid, written as a JSON report.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Subset files; may be repeated. Defaults to the whole space.
        #[arg(long)]
        subset: Vec<PathBuf>,
        /// `A:B:STEP` (inclusive) or a comma list.
        #[arg(long)]
        eps_grid: String,
        /// Comma list of depths, `inf` allowed.
        #[arg(long, default_value = "1,2,4,inf")]
        m_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites and print a pass/fail table.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let text = err.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            if let Error::InvalidMetric(report) = &err {
                if let Ok(json) = report_to_json(report.as_ref()) {
                    let _ = write!(stderr, "{json}");
                }
            }
            1
        }
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn seed_random(spec: &mut SpaceSpec, seed: u64) {
    match spec {
        SpaceSpec::RandomCloud { seed: s, .. } => *s = seed,
        SpaceSpec::ProductSup { first, second, .. } => {
            seed_random(first, seed);
            seed_random(second, seed);
        }
        _ => {}
    }
}

/// Parses `A:B:STEP` (inclusive, values rounded to 12 significant digits) or a comma list.
pub fn parse_eps_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |t: &str| Error::domain(format!("invalid scale '{t}' in grid '{text}'"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let [a, b, step] = [parts[0], parts[1], parts[2]].map(|t| t.parse::<f64>().map_err(|_| bad(t)));
        let (a, b, step) = (a?, b?, step?);
        if !(step > 0.0) || !(b >= a) {
            return Err(Error::domain(format!("grid '{text}' needs A <= B and STEP > 0")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count)
            .map(|k| {
                let v = a + k as f64 * step;
                format!("{v:.11e}").parse().unwrap_or(v)
            })
            .collect());
    }
    if parts.len() != 1 {
        return Err(Error::domain(format!("grid '{text}' is neither A:B:STEP nor a list")));
    }
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| bad(t)))
        .collect()
}

pub fn parse_m_grid(text: &str) -> Result<Vec<Depth>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Generate {
            family,
            params,
            seed,
            companion,
            out,
        } => {
            let mut spec = SpaceSpec::from_parts(&family, &params)?;
            if let Some(seed) = seed {
                seed_random(&mut spec, seed);
            }
            let generated = generate(&spec)?;
            let space = if companion {
                generated.companion.ok_or_else(|| {
                    Error::domain(format!("family '{family}' has no companion metric"))
                })?
            } else {
                generated.space
            };
            let mut buf = Vec::new();
            save_distance_csv(&space, &mut buf)?;
            emit(&String::from_utf8_lossy(&buf), out.as_deref(), stdout)?;
        }
        Command::Components { input, eps } => {
            let space = load_distance_csv_path(&input)?;
            let graph = ChainGraph::build(&space, eps)?;
            let sizes: Vec<String> = graph.component_sizes().iter().map(usize::to_string).collect();
            let text = format!(
                "{} components\nsizes: {}\n",
                graph.component_count(),
                sizes.join(" ")
            );
            emit(&text, None, stdout)?;
        }
        Command::ChainDist {
            input,
            eps,
            from,
            to,
        } => {
            let space = load_distance_csv_path(&input)?;
            let graph = ChainGraph::build(&space, eps)?;
            let text = match graph.chain_distance(from, to)? {
                Some(d) => format!("{d}\n"),
                None => "different-components\n".to_string(),
            };
            emit(&text, None, stdout)?;
        }
        Command::Cover {
            input,
            subset,
            eps,
            m,
            exact,
            exact_limit,
            out,
        } => {
            let space = load_distance_csv_path(&input)?;
            let subset = match subset {
                Some(path) => load_subset_path(path, space.len())?,
                None => space.all_points(),
            };
            let graph = ChainGraph::build(&space, eps)?;
            let method = if exact {
                CoverMethod::Exact
            } else {
                CoverMethod::Greedy
            };
            let cover = cover_with_graph(&graph, &subset, m, method, exact_limit)?;
            let centers: Vec<String> = cover.centers.iter().map(usize::to_string).collect();
            let text = format!(
                "size {}\ncenters {}\nm {}\neps {}\nmethod {}\n",
                cover.size,
                centers.join(" "),
                cover.m,
                cover.eps,
                if exact { "exact" } else { "greedy" }
            );
            emit(&text, None, stdout)?;
            if let Some(path) = out {
                emit(&report_to_json(&cover)?, Some(&path), stdout)?;
            }
        }
        Command::Rho {
            input,
            eps,
            labels,
            from,
            to,
        } => {
            let space = load_distance_csv_path(&input)?;
            space.check_point(from)?;
            space.check_point(to)?;
            let graph = ChainGraph::build(&space, eps)?;
            let labeling = ComponentLabeling::new(&graph, load_labels_path(&labels)?)?;
            let rho = RhoMetric::from_graph(graph, labeling, None)?;
            emit(&format!("{}\n", rho.rho_distance(from, to)), None, stdout)?;
        }
        Command::Analyze {
            input,
            subset,
            eps_grid,
            m_grid,
            out,
        } => {
            let space = load_distance_csv_path(&input)?;
            let subsets = if subset.is_empty() {
                vec![space.all_points()]
            } else {
                subset
                    .iter()
                    .map(|p| load_subset_path(p, space.len()))
                    .collect::<Result<Vec<_>>>()?
            };
            let report = bornology_report(
                &space,
                &subsets,
                &parse_eps_grid(&eps_grid)?,
                &parse_m_grid(&m_grid)?,
            )?;
            emit(&report_to_json(&report)?, out.as_deref(), stdout)?;
        }
        Command::Verify {
            suite,
            seed,
            instances,
        } => {
            let reports = run_suites(&suite, seed, instances)?;
            let mut text = format!(
                "{:<12} {:<68} {:>9} {:>8}  status\n",
                "suite", "property", "instances", "failures"
            );
            let mut failures = 0;
            for report in &reports {
                for rec in &report.records {
                    failures += rec.failures;
                    text.push_str(&format!(
                        "{:<12} {:<68} {:>9} {:>8}  {}\n",
                        report.suite,
                        rec.property,
                        rec.instances,
                        rec.failures,
                        if rec.failures == 0 { "pass" } else { "FAIL" }
                    ));
                }
            }
            text.push_str(&format!(
                "{} suite(s), {failures} failure(s)\n",
                reports.len()
            ));
            emit(&text, None, stdout)?;
            return Ok(if failures == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}
