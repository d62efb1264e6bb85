//! Example-space generators, CSV ingestion and report serialization.
//!
//! Generator specs have a compact text form, `family(key=value,...)`, used by
//! the CLI and recorded in reports:
//!
//! ```text
//! discrete01(k=5)
//! sqrt_interval(radius=100,step=0.25)
//! reciprocal_set(k=50)
//! atsuji_pairs(k=10)
//! orthonormal_rays(rays=8,steps=3)
//! lattice(dims=2,side=5)
//! random_cloud(n=40,dim=2,seed=7)
//! product_sup(first=reciprocal_set(k=5),second=orthonormal_rays(rays=3,steps=2),cap=true)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Norm, SubsetHandle};

/// Generated spaces are capped at this many points.
pub const MAX_GENERATED_POINTS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceSpec {
    /// `k` points, all pairwise at distance 1.
    Discrete01 { k: usize },
    /// The grid `{0, step, ..., radius}`; the companion metric is `|√x − √y|`.
    SqrtInterval { radius: f64, step: f64 },
    /// `1/1, 1/2, ..., 1/k` on the real line.
    ReciprocalSet { k: usize },
    /// `1, 1 + 1/2, 2, 2 + 1/3, ...`: the first `2k` points.
    AtsujiPairs { k: usize },
    /// The origin plus `(t/steps)·e_i` for `t = 1..=steps` on each of `rays`
    /// orthonormal directions, Euclidean distance.
    OrthonormalRays { rays: usize, steps: usize },
    /// Integer grid `{0..side}^dims`, Euclidean distance.
    Lattice { dims: usize, side: usize },
    /// Uniform points in the unit cube, Euclidean distance.
    RandomCloud { n: usize, dim: usize, seed: u64 },
    /// Cartesian product with the max of the factor distances; with `cap`
    /// the first factor's distance is truncated at 1.
    ProductSup {
        first: Box<SpaceSpec>,
        second: Box<SpaceSpec>,
        cap: bool,
    },
}

/// A generated space, plus the second metric for families that carry one.
#[derive(Clone, Debug)]
pub struct GeneratedSpace {
    pub space: FiniteMetricSpace,
    pub companion: Option<FiniteMetricSpace>,
}

impl SpaceSpec {
    pub fn family(&self) -> &'static str {
        match self {
            SpaceSpec::Discrete01 { .. } => "discrete01",
            SpaceSpec::SqrtInterval { .. } => "sqrt_interval",
            SpaceSpec::ReciprocalSet { .. } => "reciprocal_set",
            SpaceSpec::AtsujiPairs { .. } => "atsuji_pairs",
            SpaceSpec::OrthonormalRays { .. } => "orthonormal_rays",
            SpaceSpec::Lattice { .. } => "lattice",
            SpaceSpec::RandomCloud { .. } => "random_cloud",
            SpaceSpec::ProductSup { .. } => "product_sup",
        }
    }

    /// Number of points the spec generates, after parameter checks.
    pub fn point_count(&self) -> Result<usize> {
        let count = match self {
            SpaceSpec::Discrete01 { k } | SpaceSpec::ReciprocalSet { k } => positive("k", *k)?,
            SpaceSpec::AtsujiPairs { k } => 2 * positive("k", *k)?,
            SpaceSpec::SqrtInterval { radius, step } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::domain("sqrt_interval: radius must be positive"));
                }
                if !(*step > 0.0) || !step.is_finite() {
                    return Err(Error::domain("sqrt_interval: step must be positive"));
                }
                (radius / step + 1e-9).floor() as usize + 1
            }
            SpaceSpec::OrthonormalRays { rays, steps } => {
                1 + positive("rays", *rays)? * positive("steps", *steps)?
            }
            SpaceSpec::Lattice { dims, side } => {
                let dims = positive("dims", *dims)?;
                let side = positive("side", *side)?;
                u32::try_from(dims)
                    .ok()
                    .and_then(|d| side.checked_pow(d))
                    .ok_or_else(|| Error::domain("lattice: side^dims overflows"))?
            }
            SpaceSpec::RandomCloud { n, dim, .. } => {
                positive("dim", *dim)?;
                positive("n", *n)?
            }
            SpaceSpec::ProductSup { first, second, .. } => first
                .point_count()?
                .checked_mul(second.point_count()?)
                .ok_or_else(|| Error::domain("product_sup: size overflows"))?,
        };
        if count > MAX_GENERATED_POINTS {
            return Err(Error::domain(format!(
                "{}: {count} points exceeds the generator cap {MAX_GENERATED_POINTS}",
                self.family()
            )));
        }
        Ok(count)
    }
}

fn positive(field: &str, v: usize) -> Result<usize> {
    if v == 0 {
        return Err(Error::domain(format!("parameter '{field}' must be at least 1")));
    }
    Ok(v)
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Discrete01 { k } => write!(f, "discrete01(k={k})"),
            SpaceSpec::SqrtInterval { radius, step } => {
                write!(f, "sqrt_interval(radius={radius},step={step})")
            }
            SpaceSpec::ReciprocalSet { k } => write!(f, "reciprocal_set(k={k})"),
            SpaceSpec::AtsujiPairs { k } => write!(f, "atsuji_pairs(k={k})"),
            SpaceSpec::OrthonormalRays { rays, steps } => {
                write!(f, "orthonormal_rays(rays={rays},steps={steps})")
            }
            SpaceSpec::Lattice { dims, side } => write!(f, "lattice(dims={dims},side={side})"),
            SpaceSpec::RandomCloud { n, dim, seed } => {
                write!(f, "random_cloud(n={n},dim={dim},seed={seed})")
            }
            SpaceSpec::ProductSup { first, second, cap } => {
                write!(f, "product_sup(first={first},second={second},cap={cap})")
            }
        }
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Splits on commas that are not nested inside parentheses.
fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::domain(format!("unbalanced parentheses in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(Error::domain(format!("unbalanced parentheses in '{s}'")));
    }
    let last = s[start..].trim();
    if !last.is_empty() {
        parts.push(last);
    }
    Ok(parts)
}

struct Params<'s> {
    family: &'s str,
    values: BTreeMap<&'s str, &'s str>,
}

impl<'s> Params<'s> {
    fn parse(family: &'s str, body: &'s str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for part in split_top_level(body)? {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Error::domain(format!("{family}: expected key=value, got '{part}'"))
            })?;
            if values.insert(key.trim(), value.trim()).is_some() {
                return Err(Error::domain(format!("{family}: parameter '{}' given twice", key.trim())));
            }
        }
        Ok(Self { family, values })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::domain(format!("{}: invalid value '{raw}' for parameter '{key}'", self.family))
            }),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?
            .ok_or_else(|| Error::domain(format!("{}: missing parameter '{key}'", self.family)))
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(extra) => Err(Error::domain(format!(
                "{}: unknown parameter '{extra}'",
                self.family
            ))),
            None => Ok(()),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, body) = match s.find('(') {
            Some(open) if s.ends_with(')') => (s[..open].trim(), &s[open + 1..s.len() - 1]),
            Some(_) => return Err(Error::domain(format!("malformed space spec '{s}'"))),
            None => (s, ""),
        };
        Self::from_parts(family, body)
    }
}

impl SpaceSpec {
    /// Builds a spec from a family name and its `key=value,...` parameter list.
    pub fn from_parts(family: &str, params: &str) -> Result<Self> {
        let mut p = Params::parse(family, params)?;
        let spec = match family {
            "discrete01" => SpaceSpec::Discrete01 { k: p.require("k")? },
            "sqrt_interval" => SpaceSpec::SqrtInterval {
                radius: p.require("radius")?,
                step: p.require("step")?,
            },
            "reciprocal_set" => SpaceSpec::ReciprocalSet { k: p.require("k")? },
            "atsuji_pairs" => SpaceSpec::AtsujiPairs { k: p.require("k")? },
            "orthonormal_rays" => SpaceSpec::OrthonormalRays {
                rays: p.require("rays")?,
                steps: p.require("steps")?,
            },
            "lattice" => SpaceSpec::Lattice {
                dims: p.require("dims")?,
                side: p.require("side")?,
            },
            "random_cloud" => SpaceSpec::RandomCloud {
                n: p.require("n")?,
                dim: p.require("dim")?,
                seed: p.take("seed")?.unwrap_or(0),
            },
            "product_sup" => SpaceSpec::ProductSup {
                first: Box::new(p.require::<String>("first")?.parse()?),
                second: Box::new(p.require::<String>("second")?.parse()?),
                cap: p.take("cap")?.unwrap_or(true),
            },
            other => return Err(Error::domain(format!("unknown space family '{other}'"))),
        };
        p.finish()?;
        spec.point_count()?;
        Ok(spec)
    }
}

fn real_line(values: &[f64]) -> impl Fn(usize, usize) -> f64 + '_ {
    move |i, j| (values[i] - values[j]).abs()
}

fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Indices of the ray tips `e_1, ..., e_rays` in an `orthonormal_rays` space.
pub fn orthonormal_tips(rays: usize, steps: usize) -> SubsetHandle {
    SubsetHandle::from_sorted_unchecked((0..rays).map(|i| 1 + i * steps + steps - 1).collect())
}

/// Generates the space described by `spec`; identical specs give identical tables.
pub fn generate(spec: &SpaceSpec) -> Result<GeneratedSpace> {
    let n = spec.point_count()?;
    let plain = |space| GeneratedSpace {
        space,
        companion: None,
    };
    match spec {
        SpaceSpec::Discrete01 { k } => {
            let space = FiniteMetricSpace::from_fn(*k, |i, j| if i == j { 0.0 } else { 1.0 })?;
            Ok(plain(space))
        }
        SpaceSpec::SqrtInterval { step, .. } => {
            let grid: Vec<f64> = (0..n).map(|t| t as f64 * step).collect();
            let roots: Vec<f64> = grid.iter().map(|x| x.sqrt()).collect();
            let labels: Vec<String> = grid.iter().map(|&x| short(x)).collect();
            let space = FiniteMetricSpace::from_fn(n, real_line(&grid))?.with_labels(labels.clone())?;
            let companion = FiniteMetricSpace::from_fn(n, real_line(&roots))?.with_labels(labels)?;
            Ok(GeneratedSpace {
                space,
                companion: Some(companion),
            })
        }
        SpaceSpec::ReciprocalSet { k } => {
            let values: Vec<f64> = (1..=*k).map(|i| 1.0 / i as f64).collect();
            let labels = (1..=*k).map(|i| format!("1/{i}")).collect();
            Ok(plain(FiniteMetricSpace::from_fn(n, real_line(&values))?.with_labels(labels)?))
        }
        SpaceSpec::AtsujiPairs { k } => {
            let mut values = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for i in 1..=*k {
                values.push(i as f64);
                labels.push(i.to_string());
                values.push(i as f64 + 1.0 / (i + 1) as f64);
                labels.push(format!("{i}+1/{}", i + 1));
            }
            Ok(plain(FiniteMetricSpace::from_fn(n, real_line(&values))?.with_labels(labels)?))
        }
        SpaceSpec::OrthonormalRays { steps, .. } => {
            // index 0 is the origin; 1 + i*steps + (t-1) is (t/steps)·e_i
            let locate = |p: usize| -> Option<(usize, f64)> {
                (p > 0).then(|| ((p - 1) / steps, ((p - 1) % steps + 1) as f64 / *steps as f64))
            };
            let dist = |a: usize, b: usize| match (locate(a), locate(b)) {
                _ if a == b => 0.0,
                (None, Some((_, t))) | (Some((_, t)), None) => t,
                (Some((ra, ta)), Some((rb, tb))) if ra == rb => (ta - tb).abs(),
                (Some((_, ta)), Some((_, tb))) => (ta * ta + tb * tb).sqrt(),
                (None, None) => 0.0,
            };
            let labels = (0..n)
                .map(|p| match locate(p) {
                    None => "0".to_string(),
                    Some((ray, _)) => {
                        let t = (p - 1) % steps + 1;
                        if t == *steps {
                            format!("e{}", ray + 1)
                        } else {
                            format!("{t}/{steps}e{}", ray + 1)
                        }
                    }
                })
                .collect();
            Ok(plain(FiniteMetricSpace::from_fn(n, dist)?.with_labels(labels)?))
        }
        SpaceSpec::Lattice { dims, side } => {
            let coords = (0..n)
                .map(|mut idx| {
                    (0..*dims)
                        .map(|_| {
                            let c = (idx % side) as f64;
                            idx /= side;
                            c
                        })
                        .collect()
                })
                .collect();
            Ok(plain(FiniteMetricSpace::from_points(coords, Norm::Euclidean)?))
        }
        SpaceSpec::RandomCloud { n, dim, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let coords = (0..*n)
                .map(|_| (0..*dim).map(|_| rng.random::<f64>()).collect())
                .collect();
            Ok(plain(FiniteMetricSpace::from_points(coords, Norm::Euclidean)?))
        }
        SpaceSpec::ProductSup { first, second, cap } => {
            let a = generate(first)?.space;
            let b = generate(second)?.space;
            let nb = b.len();
            let dist = |p: usize, q: usize| {
                let da = a.dist(p / nb, q / nb);
                let da = if *cap { da.min(1.0) } else { da };
                da.max(b.dist(p % nb, q % nb))
            };
            let labels = (0..n)
                .map(|p| format!("({},{})", a.label(p / nb), b.label(p % nb)))
                .collect();
            Ok(plain(FiniteMetricSpace::from_fn(n, dist)?.with_labels(labels)?))
        }
    }
}

fn looks_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        column: 0,
        message: err.to_string(),
    }
}

/// Parses every field of a record as a finite float.
fn numeric_row(record: &csv::StringRecord, line: usize) -> Result<Vec<f64>> {
    record
        .iter()
        .enumerate()
        .map(|(col, field)| match field.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(Error::Parse {
                line,
                column: col + 1,
                message: format!("non-finite value '{field}'"),
            }),
            Err(_) => Err(Error::Parse {
                line,
                column: col + 1,
                message: format!("'{field}' is not a number"),
            }),
        })
        .collect()
}

/// Reads an N×N distance matrix, with an optional first row of labels.
pub fn load_distance_csv<R: Read>(reader: R) -> Result<FiniteMetricSpace> {
    let mut records = Vec::new();
    for (k, record) in csv_reader(reader).records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(k + 1);
        if !(record.len() == 1 && record[0].is_empty()) {
            records.push((line, record));
        }
    }
    // The first row is a label header when any field is not a number, or when
    // the labels happen to be numeric but the table is one row too long.
    let has_header = records.first().is_some_and(|(_, first)| {
        !first.iter().all(looks_numeric) || records.len() == first.len() + 1
    });
    let labels = has_header.then(|| records[0].1.iter().map(str::to_string).collect::<Vec<_>>());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in records.iter().skip(usize::from(has_header)) {
        let row = numeric_row(record, *line)?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(Error::Parse {
                    line: *line,
                    column: row.len().min(first) + 1,
                    message: format!("row has {} fields, expected {first}", row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no distance rows".into(),
        });
    }
    if rows[0].len() != rows.len() {
        return Err(Error::structural(format!(
            "distance matrix has {} rows and {} columns",
            rows.len(),
            rows[0].len()
        )));
    }
    let space = FiniteMetricSpace::from_table(&rows)?;
    match labels {
        Some(labels) => space.with_labels(labels),
        None => Ok(space),
    }
}

pub fn load_distance_csv_path(path: impl AsRef<Path>) -> Result<FiniteMetricSpace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_distance_csv(BufReader::new(file))
}

/// Reads one point per row and computes distances under `norm`.
pub fn load_points_csv<R: Read>(reader: R, norm: Norm) -> Result<FiniteMetricSpace> {
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for (k, record) in csv_reader(reader).records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(k + 1);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = numeric_row(&record, line)?;
        if let Some(dim) = coords.first().map(Vec::len) {
            if row.len() != dim {
                return Err(Error::Parse {
                    line,
                    column: row.len().min(dim) + 1,
                    message: format!("ragged row: {} coordinates, expected {dim}", row.len()),
                });
            }
        }
        coords.push(row);
    }
    if coords.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no points".into(),
        });
    }
    FiniteMetricSpace::from_points(coords, norm)
}

pub fn load_points_csv_path(path: impl AsRef<Path>, norm: Norm) -> Result<FiniteMetricSpace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_points_csv(BufReader::new(file), norm)
}

/// Writes the distance table, preceded by a label row when the space has labels.
/// Values use the shortest representation that parses back to the same float.
pub fn save_distance_csv<W: Write>(space: &FiniteMetricSpace, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let wrap = |e: csv::Error| Error::structural(format!("csv write failed: {e}"));
    if let Some(labels) = space.labels() {
        out.write_record(labels).map_err(wrap)?;
    }
    for i in 0..space.len() {
        out.write_record((0..space.len()).map(|j| space.dist(i, j).to_string()))
            .map_err(wrap)?;
    }
    out.flush().map_err(|e| Error::structural(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn save_distance_csv_path(space: &FiniteMetricSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    save_distance_csv(space, file)
}

/// Reads a subset file: one point index per line, blank lines and `#` comments ignored.
pub fn load_subset<R: Read>(reader: R, n: usize) -> Result<SubsetHandle> {
    let mut indices = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: k + 1,
            column: 1,
            message: e.to_string(),
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let idx = body.parse::<usize>().map_err(|_| Error::Parse {
            line: k + 1,
            column: 1,
            message: format!("'{body}' is not a point index"),
        })?;
        indices.push(idx);
    }
    SubsetHandle::new(n, indices)
}

pub fn load_subset_path(path: impl AsRef<Path>, n: usize) -> Result<SubsetHandle> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_subset(file, n)
}

/// Reads component labels: positive integers separated by commas, whitespace or newlines.
pub fn load_labels<R: Read>(reader: R) -> Result<Vec<u64>> {
    let mut values = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: k + 1,
            column: 1,
            message: e.to_string(),
        })?;
        for (col, token) in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .enumerate()
        {
            values.push(token.parse::<u64>().map_err(|_| Error::Parse {
                line: k + 1,
                column: col + 1,
                message: format!("'{token}' is not a nonnegative integer"),
            })?);
        }
    }
    Ok(values)
}

pub fn load_labels_path(path: impl AsRef<Path>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_labels(file)
}

fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn round_numbers(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            if let Some(rounded) = serde_json::Number::from_f64(round_significant(x, 12)) {
                *num = rounded;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_numbers),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Renders a report as pretty JSON with sorted keys and floats rounded to 12
/// significant digits. Parsing the output and rendering it again is byte-identical.
pub fn report_to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    round_numbers(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

pub fn save_report_json<T: Serialize>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = report_to_json(report)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
