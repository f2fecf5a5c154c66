//! `hypermetric`: quantitative ball-intersection analyses of finite metric
//! spaces from the command line.
//!
//! Subcommands: `validate`, `generate`, `analyze`, `tightspan`, `persist`,
//! `gap`. Reports are pretty-printed JSON with sorted keys and embed the
//! resolved configuration, so re-runs are byte-identical. The environment
//! variable `HYPERMETRIC_THREADS` caps internal parallelism (0 = auto).

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypermetric_core::comparison::{curvature_verdict, CURVATURE_TOL};
use hypermetric_core::complex::{cech_filtration, persistence, vr_cech_gap, vr_filtration};
use hypermetric_core::io;
use hypermetric_core::scaling::{
    delta_scaling, helly_defect, max_triple_deviation, rho_triple, scaling_report,
    triple_gromov_radii, BallFamily, DegeneratePolicy, RadiiRule, ScalingError, ScanConfig,
};
use hypermetric_core::space::{
    graph_metric, metric_tolerance, point_cloud_metric, random_metric, sample_circle, Norm,
};
use hypermetric_core::tightspan::{enumerate_faces, TightSpanError};
use hypermetric_core::{FiniteMetricSpace, PointId};

// exit codes: 0 success, 1 domain violation, 2 I/O or parse, 3 resource cap
struct CliError {
    code: u8,
    msg: String,
}

fn domain(e: impl Display) -> CliError {
    CliError {
        code: 1,
        msg: e.to_string(),
    }
}

fn io_error(e: impl Display) -> CliError {
    CliError {
        code: 2,
        msg: e.to_string(),
    }
}

fn cap_error(e: impl Display) -> CliError {
    CliError {
        code: 3,
        msg: e.to_string(),
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        match e {
            io::IoError::Metric(m) => domain(m),
            other => io_error(other),
        }
    }
}

impl From<ScalingError> for CliError {
    fn from(e: ScalingError) -> Self {
        domain(e)
    }
}

impl From<TightSpanError> for CliError {
    fn from(e: TightSpanError) -> Self {
        match e {
            TightSpanError::SizeCapExceeded { .. } => cap_error(e),
            other => domain(other),
        }
    }
}

impl From<hypermetric_core::complex::ComplexError> for CliError {
    fn from(e: hypermetric_core::complex::ComplexError) -> Self {
        domain(e)
    }
}

impl From<hypermetric_core::comparison::ComparisonError> for CliError {
    fn from(e: hypermetric_core::comparison::ComparisonError) -> Self {
        domain(e)
    }
}

#[derive(Parser)]
#[command(
    name = "hypermetric",
    version,
    about = "Ball-intersection geometry of finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    Circle,
    Tree,
    Cloud,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Euclidean,
    Max,
    Sum,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexKind {
    Vr,
    Cech,
    CechHull,
}

#[derive(Subcommand)]
enum Command {
    /// Check a distance matrix against the metric axioms.
    Validate { space: PathBuf },
    /// Write a generated space as CSV.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        /// Circle: number of samples.
        #[arg(long)]
        m: Option<usize>,
        /// Circle: circumference.
        #[arg(long = "L")]
        circumference: Option<f64>,
        /// Random: number of points.
        #[arg(long)]
        n: Option<usize>,
        /// Random: RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tree: weighted-edge JSON ({"n": int, "edges": [[i, j, w], ...]}).
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Cloud: points JSON ({"points": [[...], ...]}).
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "euclidean")]
        norm: NormArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Per-triple and summary scaling quantities, with optional curvature
    /// verdicts and Helly-type (n, k) scans.
    Analyze {
        space: PathBuf,
        /// "all" or an explicit triple "i,j,k".
        #[arg(long, default_value = "all")]
        triples: String,
        /// Add Euclidean-comparison verdicts to non-degenerate triples.
        #[arg(long)]
        curvature: bool,
        /// Helly scan "n,k" over the landmark set.
        #[arg(long)]
        helly: Option<String>,
        /// "all", "i,j,k", or "sample:COUNT:SEED".
        #[arg(long, default_value = "all")]
        landmarks: String,
        #[arg(long, default_value = "all")]
        witnesses: String,
        /// "gromov", "uniform:R", or a JSON file with one radius per point.
        #[arg(long, default_value = "gromov")]
        radii: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate the compact faces of the tight span (small spaces).
    Tightspan {
        space: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write faces of dimension <= 2 as an OFF file.
        #[arg(long)]
        off: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        cap: usize,
    },
    /// Persistence barcode of a uniform-radius filtration.
    Persist {
        space: PathBuf,
        #[arg(long, value_enum)]
        complex: ComplexKind,
        #[arg(long, default_value = "all")]
        landmarks: String,
        #[arg(long, default_value = "all")]
        witnesses: String,
        #[arg(long = "max-dim", default_value_t = 3)]
        max_dim: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Scales at which to print Betti curves, e.g. "0.25,0.5,1".
        #[arg(long)]
        scales: Option<String>,
        /// Also write the filtered complex as JSON.
        #[arg(long = "complex-out")]
        complex_out: Option<PathBuf>,
    },
    /// VR simplices missing from the witnessed Cech complex, with the
    /// enlargement scale that fills each.
    Gap {
        space: PathBuf,
        #[arg(long, default_value = "all")]
        landmarks: String,
        #[arg(long, default_value = "all")]
        witnesses: String,
        #[arg(long, default_value = "gromov")]
        radii: String,
        #[arg(long = "max-dim", default_value_t = 2)]
        max_dim: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("HYPERMETRIC_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k > 0 {
                // ignore failure if a pool already exists
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

/// Full validation up to 256 points; beyond that the cubic triangle scan is
/// skipped and only the quadratic axioms are checked.
fn load_space(path: &Path) -> Result<FiniteMetricSpace, CliError> {
    let raw = io::load_space(path)?;
    let n = raw.dist.len();
    let tol = metric_tolerance(&raw.dist);
    if n <= 256 {
        return raw.validate(tol).map_err(domain);
    }
    for (i, row) in raw.dist.iter().enumerate() {
        if row.len() != n {
            return Err(domain(format!(
                "NotSquare: row {i} has {} entries",
                row.len()
            )));
        }
        if row[i].abs() > tol {
            return Err(domain(format!("NonzeroDiagonal({i}): {}", row[i])));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (f, b) = (raw.dist[i][j], raw.dist[j][i]);
            if f < -tol {
                return Err(domain(format!("NegativeEntry({i},{j}): {f}")));
            }
            if (f - b).abs() > tol {
                return Err(domain(format!("Asymmetric({i},{j}): {f} vs {b}")));
            }
            if f <= tol {
                return Err(domain(format!("DuplicatePoints({i},{j})")));
            }
        }
    }
    eprintln!("note: n = {n} > 256, triangle inequality taken on trust");
    let flat: Vec<f64> = raw.dist.iter().flatten().copied().collect();
    Ok(FiniteMetricSpace::trusted(raw.labels, flat, n))
}

/// "all", "i,j,k", or "sample:COUNT:SEED" (deterministic index shuffle).
fn parse_selection(spec: &str, n: usize) -> Result<Vec<PointId>, CliError> {
    if spec == "all" {
        return Ok((0..n).map(PointId).collect());
    }
    if let Some(rest) = spec.strip_prefix("sample:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(domain(format!(
                "bad selection {spec:?}: want sample:COUNT:SEED"
            )));
        }
        let count: usize = parts[0].parse().map_err(|_| domain("bad sample count"))?;
        let seed: u64 = parts[1].parse().map_err(|_| domain("bad sample seed"))?;
        if count == 0 || count > n {
            return Err(domain(format!("sample count {count} out of range 1..={n}")));
        }
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let mut take: Vec<usize> = idx.into_iter().take(count).collect();
        take.sort_unstable();
        return Ok(take.into_iter().map(PointId).collect());
    }
    let mut out = Vec::new();
    for tok in spec.split(',') {
        let i: usize = tok
            .trim()
            .parse()
            .map_err(|_| domain(format!("bad index {tok:?} in selection")))?;
        if i >= n {
            return Err(domain(format!("index {i} out of range 0..{n}")));
        }
        let p = PointId(i);
        if out.contains(&p) {
            return Err(domain(format!("repeated index {i} in selection")));
        }
        out.push(p);
    }
    if out.is_empty() {
        return Err(domain("empty selection"));
    }
    out.sort();
    Ok(out)
}

enum RadiiSpec {
    Gromov,
    PerPoint(Vec<f64>),
}

fn resolve_radii(arg: &str, n: usize) -> Result<RadiiSpec, CliError> {
    if arg == "gromov" {
        return Ok(RadiiSpec::Gromov);
    }
    if let Some(v) = arg.strip_prefix("uniform:") {
        let r: f64 = v
            .parse()
            .map_err(|_| domain(format!("bad uniform radius {v:?}")))?;
        if !(r >= 0.0) {
            return Err(domain(format!("radius {r} must be nonnegative")));
        }
        return Ok(RadiiSpec::PerPoint(vec![r; n]));
    }
    let text = std::fs::read_to_string(arg).map_err(io_error)?;
    let value: Value = serde_json::from_str(&text).map_err(io_error)?;
    let array = value.get("radii").cloned().unwrap_or(value);
    let radii: Vec<f64> = serde_json::from_value(array)
        .map_err(|e| domain(format!("radii file must hold an array: {e}")))?;
    if radii.len() != n {
        return Err(domain(format!(
            "radii file has {} entries for {n} points",
            radii.len()
        )));
    }
    Ok(RadiiSpec::PerPoint(radii))
}

fn emit(output: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(io_error)?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text).map_err(io_error)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn float_or_inf(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { space } => {
            let raw = io::load_space(&space)?;
            let tol = metric_tolerance(&raw.dist);
            let s = raw.validate(tol).map_err(domain)?;
            println!("ok: {} points, diameter {}", s.len(), s.diameter());
            Ok(())
        }
        Command::Generate {
            kind,
            m,
            circumference,
            n,
            seed,
            edges,
            points,
            norm,
            output,
        } => {
            let space = match kind {
                GenerateKind::Circle => {
                    let m = m.ok_or_else(|| domain("circle needs --m"))?;
                    let len = circumference.ok_or_else(|| domain("circle needs --L"))?;
                    sample_circle(m, len).map_err(domain)?
                }
                GenerateKind::Random => {
                    let n = n.ok_or_else(|| domain("random needs --n"))?;
                    random_metric(n, seed).map_err(domain)?
                }
                GenerateKind::Tree => {
                    let path = edges.ok_or_else(|| domain("tree needs --edges"))?;
                    let graph = io::load_graph_json(&path)?;
                    graph_metric(graph.n, &graph.edges).map_err(domain)?
                }
                GenerateKind::Cloud => {
                    let path = points.ok_or_else(|| domain("cloud needs --points"))?;
                    let text = std::fs::read_to_string(&path).map_err(io_error)?;
                    let value: Value = serde_json::from_str(&text).map_err(io_error)?;
                    let array = value.get("points").cloned().unwrap_or(value);
                    let pts: Vec<Vec<f64>> = serde_json::from_value(array)
                        .map_err(|e| domain(format!("points file must hold arrays: {e}")))?;
                    let norm = match norm {
                        NormArg::Euclidean => Norm::Euclidean,
                        NormArg::Max => Norm::Max,
                        NormArg::Sum => Norm::Sum,
                    };
                    point_cloud_metric(&pts, norm).map_err(domain)?
                }
            };
            io::save_csv(&space, &output)?;
            println!("wrote {} points to {}", space.len(), output.display());
            Ok(())
        }
        Command::Analyze {
            space: path,
            triples,
            curvature,
            helly,
            landmarks,
            witnesses,
            radii,
            seed,
            output,
        } => {
            let space = load_space(&path)?;
            let n = space.len();
            let lm = parse_selection(&landmarks, n)?;
            let wit = parse_selection(&witnesses, n)?;
            let config = json!({
                "command": "analyze",
                "input": path.display().to_string(),
                "triples": triples,
                "curvature": curvature,
                "helly": helly,
                "landmarks": landmarks,
                "witnesses": witnesses,
                "radii": radii,
                "seed": seed,
                "landmark_count": lm.len(),
                "witness_count": wit.len(),
            });

            let chosen: Option<Vec<[PointId; 3]>> = if triples == "all" {
                let count = lm.len() * lm.len().saturating_sub(1) * lm.len().saturating_sub(2) / 6;
                if count <= 100_000 {
                    let mut list = Vec::with_capacity(count);
                    for a in 0..lm.len() {
                        for b in (a + 1)..lm.len() {
                            for c in (b + 1)..lm.len() {
                                list.push([lm[a], lm[b], lm[c]]);
                            }
                        }
                    }
                    Some(list)
                } else {
                    None
                }
            } else {
                let idx = parse_selection(&triples, n)?;
                if idx.len() != 3 {
                    return Err(domain(format!(
                        "--triples wants 3 indices, got {}",
                        idx.len()
                    )));
                }
                Some(vec![[idx[0], idx[1], idx[2]]])
            };

            let tau = 1e-12 * space.diameter();
            let mut entries = Vec::new();
            let mut max_rho: Option<(f64, [PointId; 3], PointId)> = None;
            if let Some(list) = &chosen {
                for &[i, j, k] in list {
                    let (r1, r2, r3) = triple_gromov_radii(&space, i, j, k).map_err(domain)?;
                    let degenerate = r1.min(r2).min(r3) <= tau;
                    let mut entry = json!({
                        "triple": [i.0, j.0, k.0],
                        "degenerate": degenerate,
                        "gromov_radii": [r1, r2, r3],
                    });
                    let centers = [i, j, k];
                    let radii3 = [r1, r2, r3];
                    let rho = rho_triple(&space, i, j, k, &wit, DegeneratePolicy::Report);
                    match rho {
                        Ok(r) => {
                            entry["rho"] = scaling_report("rho3", &centers, &radii3, &r);
                            if !degenerate {
                                let family =
                                    BallFamily::new(&space, centers.to_vec(), radii3.to_vec())
                                        .map_err(domain)?;
                                let d = delta_scaling(&family, &wit).map_err(domain)?;
                                entry["delta"] = scaling_report("delta", &centers, &radii3, &d);
                                if curvature {
                                    let v = curvature_verdict(&space, centers, &wit, CURVATURE_TOL)
                                        .map_err(domain)?;
                                    entry["rho_bar"] = json!(v.rho_bar);
                                    entry["margin"] = json!(v.margin);
                                    entry["nonpositive"] = json!(v.nonpositive);
                                }
                                let better = match max_rho {
                                    None => true,
                                    Some((best, t, _)) => {
                                        r.value > best || (r.value == best && centers < t)
                                    }
                                };
                                if better {
                                    max_rho = Some((r.value, centers, r.witness));
                                }
                            }
                        }
                        Err(ScalingError::NoExactWitness(p)) => {
                            entry["rho"] = Value::Null;
                            entry["unwitnessed_at"] = json!(p.0);
                        }
                        Err(e) => return Err(domain(e)),
                    }
                    entries.push(entry);
                }
            }

            let summary = if let Some((value, t, w)) = max_rho {
                json!({
                    "max_rho": value,
                    "argmax": [t[0].0, t[1].0, t[2].0],
                    "witness": w.0,
                    "exhaustive": true,
                })
            } else if chosen.is_none() {
                // too many triples to list: summary via the capped scan
                let dev = max_triple_deviation(
                    &space,
                    &wit,
                    &ScanConfig {
                        cap: 2_000_000,
                        seed,
                    },
                )
                .map_err(domain)?;
                serde_json::to_value(&dev).map_err(io_error)?
            } else {
                Value::Null
            };

            let helly_value = match helly {
                None => Value::Null,
                Some(spec) => {
                    let parts: Vec<&str> = spec.split(',').collect();
                    if parts.len() != 2 {
                        return Err(domain(format!("--helly wants n,k, got {spec:?}")));
                    }
                    let n_size: usize =
                        parts[0].trim().parse().map_err(|_| domain("bad helly n"))?;
                    let k_size: usize =
                        parts[1].trim().parse().map_err(|_| domain("bad helly k"))?;
                    let rule = match resolve_radii(&radii, n)? {
                        RadiiSpec::Gromov => RadiiRule::Gromov,
                        RadiiSpec::PerPoint(r) => RadiiRule::Explicit(r),
                    };
                    let report = helly_defect(
                        &space,
                        n_size,
                        k_size,
                        &wit,
                        &rule,
                        1e-9 * space.diameter(),
                        &ScanConfig {
                            cap: 2_000_000,
                            seed,
                        },
                    )
                    .map_err(domain)?;
                    serde_json::to_value(&report).map_err(io_error)?
                }
            };

            let report = json!({
                "config": config,
                "triples": entries,
                "summary": summary,
                "helly": helly_value,
            });
            emit(output.as_deref(), &report)
        }
        Command::Tightspan {
            space: path,
            output,
            off,
            cap,
        } => {
            let space = load_space(&path)?;
            let complex = enumerate_faces(&space, cap)?;
            let faces: Vec<Value> = complex
                .faces
                .iter()
                .map(|f| {
                    json!({
                        "edges": f.equality_edges.iter().map(|&(a, b)| json!([a.0, b.0])).collect::<Vec<_>>(),
                        "dim": f.dimension,
                        "sample": f.sample_point.values(),
                    })
                })
                .collect();
            let report = json!({
                "config": {
                    "command": "tightspan",
                    "input": path.display().to_string(),
                    "cap": cap,
                },
                "faces": faces,
                "comb_dim": complex.combinatorial_dimension,
            });
            if let Some(off_path) = off {
                std::fs::write(&off_path, off_export(&complex)).map_err(io_error)?;
            }
            emit(output.as_deref(), &report)
        }
        Command::Persist {
            space: path,
            complex,
            landmarks,
            witnesses,
            max_dim,
            output,
            scales,
            complex_out,
        } => {
            let space = load_space(&path)?;
            let n = space.len();
            let lm = parse_selection(&landmarks, n)?;
            let filtration = match complex {
                ComplexKind::Vr => vr_filtration(&space, &lm, max_dim)?,
                ComplexKind::Cech => {
                    let wit = parse_selection(&witnesses, n)?;
                    cech_filtration(&space, &lm, &wit, max_dim)?
                }
                // hull witnesses make Cech coincide with VR, values included
                ComplexKind::CechHull => vr_filtration(&space, &lm, max_dim)?,
            };
            if let Some(cpath) = complex_out {
                let simplices: Vec<Value> = filtration
                    .simplices
                    .iter()
                    .map(|s| {
                        json!({
                            "v": s.vertices.iter().map(|p| p.0).collect::<Vec<_>>(),
                            "t": s.value,
                        })
                    })
                    .collect();
                let value = json!({"simplices": simplices, "max_dim": filtration.max_dim});
                emit(Some(&cpath), &value)?;
            }
            let out = persistence(&filtration)?;
            let mut csv = String::from("dimension,birth,death\n");
            for p in &out.pairs {
                let death = if p.death.is_finite() {
                    format!("{}", p.death)
                } else {
                    "inf".into()
                };
                csv.push_str(&format!("{},{},{}\n", p.dimension, p.birth, death));
            }
            std::fs::write(&output, csv).map_err(io_error)?;
            let finite = out.pairs.iter().filter(|p| !p.is_essential()).count();
            println!(
                "wrote {} pairs ({} finite, {} essential), {} column additions",
                out.pairs.len(),
                finite,
                out.pairs.len() - finite,
                out.column_additions
            );
            if let Some(spec) = scales {
                let mut curves = Vec::new();
                for tok in spec.split(',') {
                    let r: f64 = tok
                        .trim()
                        .parse()
                        .map_err(|_| domain(format!("bad scale {tok:?}")))?;
                    let betti: Vec<usize> = (0..=max_dim).map(|d| out.betti_at(d, r)).collect();
                    curves.push(json!({"scale": r, "betti": betti}));
                }
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({"betti_curves": curves}))
                        .map_err(io_error)?
                );
            }
            Ok(())
        }
        Command::Gap {
            space: path,
            landmarks,
            witnesses,
            radii,
            max_dim,
            output,
        } => {
            let space = load_space(&path)?;
            let n = space.len();
            let lm = parse_selection(&landmarks, n)?;
            let wit = parse_selection(&witnesses, n)?;
            let per_landmark: Vec<f64> = match resolve_radii(&radii, n)? {
                RadiiSpec::PerPoint(r) => lm.iter().map(|&p| r[p.0]).collect(),
                RadiiSpec::Gromov => {
                    if lm.len() != 3 {
                        return Err(domain(format!(
                            "gromov radii need exactly 3 landmarks, got {}",
                            lm.len()
                        )));
                    }
                    let (r1, r2, r3) =
                        triple_gromov_radii(&space, lm[0], lm[1], lm[2]).map_err(domain)?;
                    vec![r1, r2, r3]
                }
            };
            let report = vr_cech_gap(&space, &lm, &wit, &per_landmark, max_dim)?;
            let entries: Vec<Value> = report
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "simplex": e.simplex.iter().map(|p| p.0).collect::<Vec<_>>(),
                        "lambda": float_or_inf(e.lambda),
                        "witness": e.witness.0,
                    })
                })
                .collect();
            let value = json!({
                "config": {
                    "command": "gap",
                    "input": path.display().to_string(),
                    "landmarks": landmarks,
                    "witnesses": witnesses,
                    "radii": radii,
                    "max_dim": max_dim,
                },
                "entries": entries,
                "max_lambda": report.max_lambda.map_or(Value::Null, float_or_inf),
            });
            emit(output.as_deref(), &value)
        }
    }
}

/// OFF export of the 0/1/2-dimensional faces, embedded by the first three
/// coordinates of their vertex radius functions.
fn off_export(complex: &hypermetric_core::tightspan::TightSpanComplex) -> String {
    let key =
        |v: &[f64]| -> Vec<i64> { v.iter().take(3).map(|x| (x * 1e9).round() as i64).collect() };
    let mut coords: Vec<[f64; 3]> = Vec::new();
    let mut index: std::collections::HashMap<Vec<i64>, usize> = std::collections::HashMap::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for face in complex.faces.iter().filter(|f| f.dimension <= 2) {
        let mut poly = Vec::new();
        for v in &face.vertices {
            let mut p = [0.0; 3];
            for (slot, &x) in p.iter_mut().zip(v.values().iter().take(3)) {
                *slot = x;
            }
            let k = key(v.values());
            let id = *index.entry(k).or_insert_with(|| {
                coords.push(p);
                coords.len() - 1
            });
            poly.push(id);
        }
        if !poly.is_empty() {
            faces.push(poly);
        }
    }
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} 0\n", coords.len(), faces.len()));
    for c in &coords {
        out.push_str(&format!("{} {} {}\n", c[0], c[1], c[2]));
    }
    for f in &faces {
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("{} {}\n", f.len(), idx.join(" ")));
    }
    out
}
