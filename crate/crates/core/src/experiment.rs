//! Experiment orchestration: seeded replica runs, CSV artifacts, the run manifest and reports.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::config::{parse_config, ExperimentConfig, ExperimentKind, Statistic, StatsSelection};
use crate::ensemble::run_replicas_partial;
use crate::error::{Error, Result};
use crate::fbm::{sample_fbm_cholesky, CirculantSampler, FbmMethod, FbmSpec, KPZ_FBM_SCALE};
use crate::io::{boxes_csv, paths_csv, parse_paths_csv, profile_csv, report_csv};
use crate::noise::sample_noise;
use crate::path::Path;
use crate::solver::{solve, Mode, SolveOptions};
use crate::stats::{
    alpha_variation, box_dimension, exceptional_sets, ks_normality, lil_profile, mean_and_se, membership_scales,
    moc_profile, standardized_increments, variance_and_se, BoxCountResult, ScalingProfile, LIL_CONSTANT,
    QUARTIC_VARIATION_RATE, STANDARDIZING_FACTOR,
};
use crate::suite::{Suite, TITLES};
use crate::verify::CheckReport;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_HEADER: &str = "statistic,alpha,epsilon,level,mean,se,target,replicas";

/// One emitted file and its SHA-256.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Record of a completed (or partially completed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub kind: ExperimentKind,
    pub config_echo: String,
    pub out_dir: PathBuf,
    /// `(seed, stream_id)` per replica, in stream order.
    pub replica_seeds: Vec<(u64, u64)>,
    pub outputs: Vec<OutputFile>,
    /// Wall-clock seconds per stage.
    pub wall_seconds: Vec<(String, f64)>,
    /// `(stream_id, message)` for replicas that failed.
    pub failures: Vec<(u64, String)>,
}

impl RunManifest {
    pub fn checksum(&self, name: &str) -> Option<&str> {
        self.outputs.iter().find(|o| o.name == name).map(|o| o.sha256.as_str())
    }

    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        let mut run = Table::new();
        run.insert("version".into(), self.version.clone().into());
        run.insert("kind".into(), self.kind.name().into());
        run.insert("out".into(), self.out_dir.display().to_string().into());
        root.insert("run".into(), run.into());
        root.insert("config".into(), self.config_echo.clone().into());
        let seeds = self
            .replica_seeds
            .iter()
            .map(|(s, r)| Value::Array(vec![Value::Integer(*s as i64), Value::Integer(*r as i64)]))
            .collect();
        root.insert("replica_seeds".into(), Value::Array(seeds));
        let outputs = self
            .outputs
            .iter()
            .map(|o| {
                let mut t = Table::new();
                t.insert("name".into(), o.name.clone().into());
                t.insert("sha256".into(), o.sha256.clone().into());
                t.insert("bytes".into(), Value::Integer(o.bytes as i64));
                Value::Table(t)
            })
            .collect();
        root.insert("outputs".into(), Value::Array(outputs));
        let mut wall = Table::new();
        for (k, v) in &self.wall_seconds {
            wall.insert(k.clone(), (*v).into());
        }
        root.insert("wall_seconds".into(), wall.into());
        let failures = self
            .failures
            .iter()
            .map(|(s, m)| {
                let mut t = Table::new();
                t.insert("stream".into(), Value::Integer(*s as i64));
                t.insert("error".into(), m.clone().into());
                Value::Table(t)
            })
            .collect();
        root.insert("failures".into(), Value::Array(failures));
        root.to_string()
    }
}

/// Reads a manifest written by [`run_experiment`].
pub fn parse_manifest(text: &str) -> Result<RunManifest> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Format(e.to_string()))?;
    let bad = |what: &str| Error::Format(format!("manifest: missing or malformed {what}"));
    let run = root.get("run").and_then(Value::as_table).ok_or_else(|| bad("[run]"))?;
    let str_of = |t: &Table, k: &str| t.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(|| bad(k));
    let int = |v: &Value| v.as_integer().map(|i| i as u64);
    let kind = str_of(run, "kind")?.parse::<ExperimentKind>().map_err(Error::Format)?;
    let replica_seeds = root
        .get("replica_seeds")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("replica_seeds"))?
        .iter()
        .map(|p| match p.as_array().map(|a| a.as_slice()) {
            Some([s, r]) => Ok((int(s).ok_or_else(|| bad("seed"))?, int(r).ok_or_else(|| bad("stream"))?)),
            _ => Err(bad("replica_seeds entry")),
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = root
        .get("outputs")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("outputs"))?
        .iter()
        .map(|o| {
            let t = o.as_table().ok_or_else(|| bad("outputs entry"))?;
            Ok(OutputFile {
                name: str_of(t, "name")?,
                sha256: str_of(t, "sha256")?,
                bytes: t.get("bytes").and_then(int).ok_or_else(|| bad("bytes"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let wall_seconds = root
        .get("wall_seconds")
        .and_then(Value::as_table)
        .map(|t| t.iter().filter_map(|(k, v)| v.as_float().map(|f| (k.clone(), f))).collect())
        .unwrap_or_default();
    let failures = root
        .get("failures")
        .and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .filter_map(|f| {
                    let t = f.as_table()?;
                    Some((t.get("stream").and_then(int)?, t.get("error")?.as_str()?.to_string()))
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(RunManifest {
        version: str_of(run, "version")?,
        kind,
        config_echo: root.get("config").and_then(Value::as_str).ok_or_else(|| bad("config"))?.to_string(),
        out_dir: PathBuf::from(str_of(run, "out")?),
        replica_seeds,
        outputs,
        wall_seconds,
        failures,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One row of the statistics summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub statistic: String,
    pub alpha: f64,
    pub epsilon: f64,
    pub level: Option<u32>,
    pub mean: f64,
    pub se: f64,
    pub target: f64,
    pub replicas: usize,
}

fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    let num = |v: f64| if v.is_nan() { String::new() } else { format!("{v:?}") };
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.statistic,
            num(r.alpha),
            num(r.epsilon),
            r.level.map(|l| l.to_string()).unwrap_or_default(),
            num(r.mean),
            num(r.se),
            num(r.target),
            r.replicas
        );
    }
    out
}

fn parse_summary(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SUMMARY_HEADER) {
        return Err(Error::Format(format!("{SUMMARY_FILE} has an unexpected header")));
    }
    let num = |s: &str| -> Result<f64> {
        if s.is_empty() {
            Ok(f64::NAN)
        } else {
            s.parse().map_err(|_| Error::Format(format!("bad number '{s}' in {SUMMARY_FILE}")))
        }
    };
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            if c.len() != 8 {
                return Err(Error::Format(format!("bad {SUMMARY_FILE} row '{l}'")));
            }
            Ok(SummaryRow {
                statistic: c[0].to_string(),
                alpha: num(c[1])?,
                epsilon: num(c[2])?,
                level: if c[3].is_empty() { None } else { Some(c[3].parse().map_err(|_| Error::Format(l.to_string()))?) },
                mean: num(c[4])?,
                se: num(c[5])?,
                target: num(c[6])?,
                replicas: c[7].parse().map_err(|_| Error::Format(l.to_string()))?,
            })
        })
        .collect()
}

/// Files produced by the statistics stage, as `(name, contents)`.
type Artifacts = Vec<(String, String)>;

fn mean_profile(profiles: &[ScalingProfile]) -> ScalingProfile {
    let n = profiles.len() as f64;
    let mut out = profiles[0].clone();
    for (j, s) in out.statistics.iter_mut().enumerate() {
        *s = profiles.iter().map(|p| p.statistics[j]).sum::<f64>() / n;
    }
    out
}

fn profile_rows(name: &str, profiles: &[ScalingProfile]) -> Vec<SummaryRow> {
    let first = &profiles[0];
    (0..first.levels.len())
        .map(|j| {
            let col: Vec<f64> = profiles.iter().map(|p| p.statistics[j]).collect();
            let (mean, se) = mean_and_se(&col);
            SummaryRow {
                statistic: name.into(),
                alpha: f64::NAN,
                epsilon: first.epsilons[j],
                level: Some(first.levels[j]),
                mean,
                se,
                target: first.target,
                replicas: col.len(),
            }
        })
        .collect()
}

/// Computes the selected statistics over a path family.
pub fn compute_statistics(paths: &[Path], sel: &StatsSelection) -> Result<(Vec<SummaryRow>, Artifacts)> {
    let mut rows = Vec::new();
    let mut files = Vec::new();
    if sel.compute.is_empty() {
        return Ok((rows, files));
    }
    if paths.is_empty() {
        return Err(Error::Insufficient("no paths to analyse".into()));
    }
    let n = paths.len();
    let (a, b) = sel.interval;
    for st in &sel.compute {
        match st {
            Statistic::Variation => {
                for alpha in &sel.alpha {
                    for eps in &sel.epsilon {
                        let v = paths
                            .par_iter()
                            .map(|p| Ok(alpha_variation(p, *alpha, *eps, sel.interval)?.value))
                            .collect::<Result<Vec<f64>>>()?;
                        let (mean, se) = mean_and_se(&v);
                        let target = if *alpha == 4.0 { QUARTIC_VARIATION_RATE * (b - a) } else { f64::NAN };
                        rows.push(SummaryRow { statistic: "variation".into(), alpha: *alpha, epsilon: *eps, level: None, mean, se, target, replicas: n });
                    }
                }
            }
            Statistic::Increments => {
                for eps in &sel.epsilon {
                    let inc = standardized_increments(paths, sel.t, *eps)?;
                    let (var, se) = if n >= 4 { variance_and_se(&inc) } else { (f64::NAN, f64::NAN) };
                    rows.push(SummaryRow { statistic: "increment_variance".into(), alpha: f64::NAN, epsilon: *eps, level: None, mean: var, se, target: 1.0, replicas: n });
                    if n >= 50 {
                        let ks = ks_normality(&inc)?;
                        rows.push(SummaryRow { statistic: "increment_ks".into(), alpha: f64::NAN, epsilon: *eps, level: None, mean: ks.statistic, se: f64::NAN, target: ks.threshold, replicas: n });
                    }
                }
            }
            Statistic::Lil => {
                let depth = *sel.depths.iter().max().expect("validated");
                let profiles = paths
                    .par_iter()
                    .map(|p| lil_profile(p, sel.t, depth, sel.min_steps))
                    .collect::<Result<Vec<_>>>()?;
                rows.extend(profile_rows("lil", &profiles));
                files.push(("profile_lil.csv".into(), profile_csv(&mean_profile(&profiles))));
            }
            Statistic::Moc => {
                let mut levels = sel.depths.clone();
                levels.sort_unstable();
                levels.dedup();
                let profiles = paths
                    .par_iter()
                    .map(|p| moc_profile(p, sel.interval, &levels, sel.min_steps))
                    .collect::<Result<Vec<_>>>()?;
                rows.extend(profile_rows("moc", &profiles));
                files.push(("profile_moc.csv".into(), profile_csv(&mean_profile(&profiles))));
            }
            Statistic::Exceptional => {
                let j = sel.resolution.expect("validated");
                let levels: Vec<u32> = membership_scales(j).collect();
                let per_path = paths
                    .par_iter()
                    .map(|p| {
                        exceptional_sets(p, &sel.exceptional_alphas, j, sel.interval)?
                            .iter()
                            .map(|s| box_dimension(s, &levels))
                            .collect::<Result<Vec<BoxCountResult>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (k, alpha) in sel.exceptional_alphas.iter().enumerate() {
                    let slopes: Vec<f64> = per_path.iter().map(|r| r[k].slope).collect();
                    let (mean, se) = mean_and_se(&slopes);
                    rows.push(SummaryRow {
                        statistic: "box_dimension".into(),
                        alpha: *alpha,
                        epsilon: f64::NAN,
                        level: Some(j),
                        mean,
                        se,
                        target: 1.0 - alpha * alpha,
                        replicas: n,
                    });
                    let mut avg = per_path[0][k].clone();
                    // Mean count per scale over replicas, rounded to the nearest box.
                    for (s, c) in avg.counts.iter_mut().enumerate() {
                        *c = (per_path.iter().map(|r| r[k].counts[s] as f64).sum::<f64>() / n as f64).round() as u64;
                    }
                    files.push((format!("boxes_alpha_{alpha}.csv"), boxes_csv(&avg)));
                }
            }
        }
    }
    Ok((rows, files))
}

struct Outputs {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

impl Outputs {
    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.files.push(OutputFile { name: name.to_string(), sha256: sha256_hex(contents), bytes: contents.len() as u64 });
        Ok(())
    }
}

fn fbm_paths(cfg: &ExperimentConfig) -> Result<Vec<Result<Path>>> {
    let g = cfg.grid.expect("validated");
    let dt = g.dt();
    let steps = (g.t_end / dt).round() as usize;
    let f = &cfg.fbm;
    let finish = |p: Path| -> Result<Path> {
        let p = if f.rescale { p.scaled(KPZ_FBM_SCALE) } else { p };
        if g.t_start > 0.0 {
            p.restrict(g.t_start, g.t_end)
        } else {
            Ok(p)
        }
    };
    match f.method {
        FbmMethod::Cholesky => {
            let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
            run_replicas_partial(cfg.replicas, cfg.threads, |stream| {
                let spec = FbmSpec { hurst: f.hurst, times: times.clone(), method: FbmMethod::Cholesky, seed: cfg.seed, stream };
                finish(Path::new(0.0, dt, sample_fbm_cholesky(&spec)?)?)
            })
        }
        FbmMethod::Circulant => {
            let sampler = CirculantSampler::new(f.hurst, steps.next_power_of_two(), dt)?;
            run_replicas_partial(cfg.replicas, cfg.threads, |stream| {
                let full = sampler.sample(cfg.seed, stream);
                finish(Path::new(0.0, dt, full.values()[..=steps].to_vec())?)
            })
        }
    }
}

/// Executes the configured experiment and writes its artifacts and manifest under `cfg.out`.
///
/// Replica failures do not abort the run: successful replicas are still written and each
/// failure is listed in the manifest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let total = Instant::now();
    fs::create_dir_all(&cfg.out)?;
    let mut out = Outputs { dir: cfg.out.clone(), files: Vec::new() };
    let mut wall = Vec::new();
    let mut failures = Vec::new();
    let mut replica_seeds = Vec::new();

    let stage = Instant::now();
    let analysed: Option<Vec<Path>> = match cfg.kind {
        ExperimentKind::SimulateShe => {
            let grid = cfg.grid_spec()?;
            let ic = cfg.initial_datum()?;
            let opts = SolveOptions { snapshot_times: vec![], origin_stride: cfg.origin_stride };
            let results = run_replicas_partial(cfg.replicas, cfg.threads, |stream| {
                let noise = sample_noise(&grid, cfg.seed, stream);
                let mut traj = solve(&grid, &ic, &noise, cfg.mode, &opts)?;
                traj.seed = Some(cfg.seed);
                traj.stream_id = Some(stream);
                let height = if cfg.mode == Mode::Multiplicative { Some(traj.height_path()?) } else { None };
                Ok((traj.origin_path()?, height, cfg.save_trajectories.then_some(traj)))
            })?;
            let mut origin = Vec::new();
            let mut heights = Vec::new();
            for (stream, r) in results.into_iter().enumerate() {
                replica_seeds.push((cfg.seed, stream as u64));
                match r {
                    Ok((z, h, traj)) => {
                        origin.push(z);
                        heights.extend(h);
                        if let Some(t) = traj {
                            let name = format!("trajectories/replica_{stream:05}.kpz");
                            out.write(&name, &crate::io::encode_trajectory(&t))?;
                        }
                    }
                    Err(e) => failures.push((stream as u64, e.to_string())),
                }
            }
            out.write("paths.csv", paths_csv(&origin).as_bytes())?;
            if cfg.mode == Mode::Multiplicative {
                out.write("heights.csv", paths_csv(&heights).as_bytes())?;
                Some(heights)
            } else {
                Some(origin)
            }
        }
        ExperimentKind::SimulateFbm => {
            let mut paths = Vec::new();
            for (stream, r) in fbm_paths(cfg)?.into_iter().enumerate() {
                replica_seeds.push((cfg.seed, stream as u64));
                match r {
                    Ok(p) => paths.push(p),
                    Err(e) => failures.push((stream as u64, e.to_string())),
                }
            }
            out.write("paths.csv", paths_csv(&paths).as_bytes())?;
            Some(paths)
        }
        ExperimentKind::Stats => {
            let input = cfg.stats.input.as_ref().expect("validated");
            let text = fs::read_to_string(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            Some(parse_paths_csv(&text)?)
        }
        ExperimentKind::Verify => {
            let suite = Suite::new(cfg.seed, cfg.threads);
            let mut verdicts = Vec::new();
            let mut rows = Vec::new();
            let mut text = String::new();
            for id in &cfg.checks {
                match suite.run(*id) {
                    Ok(o) => {
                        let _ = writeln!(text, "{}", o.line());
                        let r = o.report_rows();
                        verdicts.push(r[0].clone());
                        rows.extend(r);
                    }
                    Err(e) => {
                        failures.push((*id as u64, e.to_string()));
                        let _ = writeln!(text, "criterion {id:>2} FAIL error: {e}");
                        let name = format!("criterion {id}: {}", TITLES[*id as usize - 1]);
                        verdicts.push(CheckReport::property(&name, false, 0, Duration::ZERO));
                    }
                }
            }
            out.write("report.csv", report_csv(&verdicts).as_bytes())?;
            out.write("report_checks.csv", report_csv(&rows).as_bytes())?;
            out.write("report.txt", text.as_bytes())?;
            None
        }
    };
    wall.push(("simulate".to_string(), stage.elapsed().as_secs_f64()));

    if let Some(paths) = analysed {
        let stage = Instant::now();
        let (rows, files) = if paths.is_empty() { (Vec::new(), Vec::new()) } else { compute_statistics(&paths, &cfg.stats)? };
        out.write(SUMMARY_FILE, summary_csv(&rows).as_bytes())?;
        for (name, contents) in files {
            out.write(&name, contents.as_bytes())?;
        }
        wall.push(("statistics".to_string(), stage.elapsed().as_secs_f64()));
    }
    wall.push(("total".to_string(), total.elapsed().as_secs_f64()));

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: cfg.kind,
        config_echo: cfg.to_toml(),
        out_dir: cfg.out.clone(),
        replica_seeds,
        outputs: out.files,
        wall_seconds: wall,
        failures,
    };
    fs::write(cfg.out.join(MANIFEST_FILE), manifest.to_toml())?;
    Ok(manifest)
}

/// Re-runs the experiment echoed in a manifest, optionally into another directory.
pub fn rerun_from_manifest(manifest: &RunManifest, out: Option<&FsPath>) -> Result<RunManifest> {
    let mut cfg = parse_config(&manifest.config_echo)?;
    if let Some(dir) = out {
        cfg.out = dir.to_path_buf();
    }
    run_experiment(&cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    TextTable,
}

fn target_label(row: &SummaryRow) -> String {
    match row.statistic.as_str() {
        "variation" if row.alpha == 4.0 => "6/pi (t-s)".into(),
        "increment_variance" => format!("1 after (pi/2)^1/4 = {STANDARDIZING_FACTOR:.6} eps^-1/4 scaling"),
        "increment_ks" => "1.63/sqrt(n)".into(),
        "lil" | "moc" => "(8/pi)^1/4".into(),
        "box_dimension" => format!("1-alpha^2 = {:.4}", 1.0 - row.alpha * row.alpha),
        _ => String::new(),
    }
}

/// Writes `report.csv` or `report.txt` next to the manifest's outputs and returns its path.
///
/// For verify runs the acceptance report is already the report; it is re-emitted in the
/// requested format after its checksum is confirmed.
pub fn emit_report(manifest: &RunManifest, format: ReportFormat) -> Result<PathBuf> {
    let dir = &manifest.out_dir;
    let read_checked = |name: &str| -> Result<String> {
        let expected = manifest
            .checksum(name)
            .ok_or_else(|| Error::Io(format!("manifest lists no {name}")))?;
        let text = fs::read_to_string(dir.join(name)).map_err(|e| Error::Io(format!("{name}: {e}")))?;
        if sha256_hex(text.as_bytes()) != expected {
            return Err(Error::Format(format!("{name} does not match its manifest checksum")));
        }
        Ok(text)
    };
    if manifest.kind == ExperimentKind::Verify {
        let (name, text) = match format {
            ReportFormat::Csv => ("report.csv", read_checked("report.csv")?),
            ReportFormat::TextTable => ("report.txt", read_checked("report.txt")?),
        };
        let path = dir.join(name);
        fs::write(&path, text)?;
        return Ok(path);
    }
    let rows = parse_summary(&read_checked(SUMMARY_FILE)?)?;
    let fmt = |v: f64| if v.is_nan() { "-".to_string() } else { format!("{v:.6}") };
    let (name, text) = match format {
        ReportFormat::Csv => {
            let mut s = String::from("statistic,alpha,epsilon,level,mean,se,target,target_label\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},\"{}\"",
                    r.statistic,
                    fmt(r.alpha),
                    fmt(r.epsilon),
                    r.level.map(|l| l.to_string()).unwrap_or_default(),
                    fmt(r.mean),
                    fmt(r.se),
                    fmt(r.target),
                    target_label(r)
                );
            }
            ("report_table.csv", s)
        }
        ReportFormat::TextTable => {
            let header = ["statistic", "alpha", "epsilon", "level", "mean", "se", "target", "constant"];
            let body: Vec<[String; 8]> = rows
                .iter()
                .map(|r| {
                    [
                        r.statistic.clone(),
                        fmt(r.alpha),
                        fmt(r.epsilon),
                        r.level.map(|l| l.to_string()).unwrap_or_else(|| "-".into()),
                        fmt(r.mean),
                        fmt(r.se),
                        fmt(r.target),
                        target_label(r),
                    ]
                })
                .collect();
            let mut width = header.map(str::len);
            for row in &body {
                for (w, c) in width.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: &[String]| {
                cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            let mut s = line(&header.map(String::from)) + "\n";
            for row in &body {
                s += &line(row);
                s.push('\n');
            }
            ("report.txt", s)
        }
    };
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

/// Reference constants annotated in reports.
pub fn reference_constants() -> [(&'static str, f64); 3] {
    [("6/pi", 6.0 / PI), ("(8/pi)^1/4", LIL_CONSTANT), ("(pi/2)^1/4", STANDARDIZING_FACTOR)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fbm_config(out: &FsPath, threads: usize, extra: &str) -> ExperimentConfig {
        let text = format!(
            "[run]\nkind = \"simulate-fbm\"\nseed = 5\nreplicas = 6\nthreads = {threads}\nout = \"{}\"\n\
             [grid]\nt_end = 2.25\nnt = 36864\n{extra}",
            out.display()
        );
        parse_config(&text).unwrap()
    }

    const STATS: &str = "[stats]\ncompute = [\"variation\", \"lil\", \"moc\", \"exceptional\"]\nalpha = [4]\n\
                         epsilon = [0.0078125]\ndepths = [4, 6]\nresolution = 14\nexceptional_alphas = [0.3, 0.5]\nmin_steps = 1\n";

    #[test]
    fn thread_count_does_not_change_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let a = run_experiment(&fbm_config(&dir.path().join("a"), 1, STATS)).unwrap();
        let b = run_experiment(&fbm_config(&dir.path().join("b"), 8, STATS)).unwrap();
        assert_eq!(a.outputs, b.outputs);
        assert!(a.outputs.iter().any(|o| o.name == "profile_lil.csv"));
        assert!(a.failures.is_empty());
        assert_eq!(a.replica_seeds.len(), 6);
    }

    #[test]
    fn manifest_round_trip_reproduces_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_experiment(&fbm_config(&dir.path().join("a"), 2, STATS)).unwrap();
        let text = fs::read_to_string(dir.path().join("a").join(MANIFEST_FILE)).unwrap();
        let parsed = parse_manifest(&text).unwrap();
        assert_eq!(parsed, m);
        let again = rerun_from_manifest(&parsed, Some(&dir.path().join("b"))).unwrap();
        assert_eq!(again.outputs, m.outputs);
        for o in &m.outputs {
            let bytes = fs::read(dir.path().join("a").join(&o.name)).unwrap();
            assert_eq!(sha256_hex(&bytes), o.sha256);
        }
    }

    #[test]
    fn reports_annotate_targets() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_experiment(&fbm_config(&dir.path().join("a"), 1, STATS)).unwrap();
        let txt = fs::read_to_string(emit_report(&m, ReportFormat::TextTable).unwrap()).unwrap();
        let quartic = txt.lines().find(|l| l.starts_with("variation")).unwrap();
        assert!(quartic.contains("4.000000") && quartic.contains("1.909859") && quartic.contains("6/pi"), "{quartic}");
        assert!(txt.lines().filter(|l| l.starts_with("lil")).all(|l| l.contains("1.263238")));
        assert!(txt.contains("1-alpha^2 = 0.7500"));
        let csv = fs::read_to_string(emit_report(&m, ReportFormat::Csv).unwrap()).unwrap();
        assert!(csv.starts_with("statistic,alpha,epsilon,level,mean,se,target,target_label\n"));

        // tampered summary is refused
        fs::write(dir.path().join("a").join(SUMMARY_FILE), "x").unwrap();
        assert!(emit_report(&m, ReportFormat::Csv).is_err());
    }

    #[test]
    fn empty_selection_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_experiment(&fbm_config(&dir.path().join("a"), 1, "")).unwrap();
        let txt = fs::read_to_string(emit_report(&m, ReportFormat::TextTable).unwrap()).unwrap();
        assert_eq!(txt.lines().count(), 1);
        assert!(txt.starts_with("statistic"));
    }

    #[test]
    fn she_run_with_stats_and_trajectories() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "run.kind = \"simulate-she\"\nrun.seed = 3\nrun.replicas = 3\nrun.out = \"{}\"\nrun.save_trajectories = true\n\
             run.origin_stride = 4\n\
             grid.x_min = -6.0\ngrid.x_max = 6.0\ngrid.nx = 96\ngrid.t_start = 0.015625\ngrid.t_end = 1.015625\ngrid.nt = 256\n\
             ic.kind = \"narrow-wedge\"\nstats.compute = [\"variation\"]\nstats.epsilon = [0.0625]\nstats.interval = [0.5, 1.0]\n",
            dir.path().display()
        );
        let m = run_experiment(&parse_config(&text).unwrap()).unwrap();
        let names: Vec<&str> = m.outputs.iter().map(|o| o.name.as_str()).collect();
        assert!(names.contains(&"heights.csv") && names.contains(&"trajectories/replica_00002.kpz"), "{names:?}");
        let t = crate::io::read_trajectory(&dir.path().join("trajectories/replica_00001.kpz")).unwrap();
        assert_eq!(t.stream_id, Some(1));
        let stats_cfg = format!(
            "[run]\nkind = \"stats\"\nseed = 1\nout = \"{}\"\n[stats]\ninput = \"{}\"\ncompute = [\"variation\"]\nepsilon = [0.0625]\ninterval = [0.5, 1.0]\n",
            dir.path().join("s").display(),
            dir.path().join("heights.csv").display()
        );
        let s = run_experiment(&parse_config(&stats_cfg).unwrap()).unwrap();
        let rerun = fs::read_to_string(dir.path().join("s").join(SUMMARY_FILE)).unwrap();
        let orig = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(rerun, orig);
        assert_eq!(s.kind, ExperimentKind::Stats);
    }

    #[test]
    fn failing_replicas_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        // A huge multiplicative datum overflows the initial field on every replica.
        let text = format!(
            "run.kind = \"simulate-she\"\nrun.seed = 3\nrun.replicas = 2\nrun.out = \"{}\"\n\
             grid.x_min = -6.0\ngrid.x_max = 6.0\ngrid.nx = 48\ngrid.t_end = 0.25\ngrid.nt = 16\n\
             ic.kind = \"function\"\nic.expr = \"x^2 * 100\"\n",
            dir.path().display()
        );
        let m = run_experiment(&parse_config(&text).unwrap()).unwrap();
        assert_eq!(m.failures.len(), 2);
        assert!(fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap().contains("failures"));
    }
}
