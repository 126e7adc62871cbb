//! Persistence: a binary container for full trajectories and the CSV tables.
//!
//! Container layout (all integers and floats little-endian):
//!
//! ```text
//! magic "KPZTRAJ\0" | version u32
//! grid: x_min x_max f64, nx u64, t_start t_end f64, nt u64
//! mode u8 | seed (u8 flag, u64) | stream (u8 flag, u64)
//! initial datum (tag u8 + payload)
//! origin_t0 origin_dt f64 | origin [f64] | origin_log_scale [f64]
//! snapshots: count u64, each t_abs f64, log_scale f64, values [f64]
//! ```
//!
//! `[f64]` is a u64 length followed by the values.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path as FsPath;

use crate::error::{Error, Result};
use crate::grid::make_grid;
use crate::initial::{FunctionDescriptor, InitialDatum, SampleTable};
use crate::path::Path;
use crate::solver::{FieldState, Mode, Trajectory};
use crate::stats::{BoxCountResult, ScalingProfile};
use crate::verify::CheckReport;

const MAGIC: &[u8; 8] = b"KPZTRAJ\0";
const VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.u64(v.len() as u64);
        v.iter().for_each(|x| self.f64(*x));
    }
    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn opt(&mut self, v: Option<u64>) {
        self.u8(v.is_some() as u8);
        self.u64(v.unwrap_or(0));
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!("truncated container at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self, width: usize) -> Result<usize> {
        let n = self.u64()? as usize;
        if n.saturating_mul(width) > self.buf.len() - self.pos {
            return Err(Error::Format(format!("length {n} at byte {} exceeds the container", self.pos)));
        }
        Ok(n)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn str(&mut self) -> Result<String> {
        let n = self.len(1)?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Format("invalid UTF-8 in container".into()))
    }
    fn opt(&mut self) -> Result<Option<u64>> {
        let flag = self.u8()?;
        let v = self.u64()?;
        Ok((flag != 0).then_some(v))
    }
}

fn mode_tag(mode: Mode) -> u8 {
    match mode {
        Mode::Multiplicative => 0,
        Mode::Additive => 1,
    }
}

fn mode_from(tag: u8) -> Result<Mode> {
    match tag {
        0 => Ok(Mode::Multiplicative),
        1 => Ok(Mode::Additive),
        t => Err(Error::Format(format!("unknown mode tag {t}"))),
    }
}

/// Serializes a trajectory into the container format.
pub fn encode_trajectory(traj: &Trajectory) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(VERSION);
    let g = &traj.grid;
    w.f64(g.x_min());
    w.f64(g.x_max());
    w.u64(g.nx() as u64);
    w.f64(g.t_start());
    w.f64(g.t_end());
    w.u64(g.nt() as u64);
    w.u8(mode_tag(traj.mode));
    w.opt(traj.seed);
    w.opt(traj.stream_id);
    match &traj.ic {
        InitialDatum::NarrowWedge { t0 } => {
            w.u8(0);
            w.f64(*t0);
        }
        InitialDatum::Brownian { seed } => {
            w.u8(1);
            w.u64(*seed);
        }
        InitialDatum::Function(FunctionDescriptor::Expr(e)) => {
            w.u8(2);
            w.str(&e.to_string());
        }
        InitialDatum::Function(FunctionDescriptor::Table(t)) => {
            w.u8(3);
            w.f64s(t.xs());
            w.f64s(t.fs());
        }
    }
    w.f64(traj.origin_t0);
    w.f64(traj.origin_dt);
    w.f64s(&traj.origin);
    w.f64s(&traj.origin_log_scale);
    w.u64(traj.snapshots.len() as u64);
    for s in &traj.snapshots {
        w.f64(s.t_abs);
        w.f64(s.log_scale);
        w.f64s(&s.values);
    }
    w.0
}

/// Inverse of [`encode_trajectory`].
pub fn decode_trajectory(bytes: &[u8]) -> Result<Trajectory> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Format("not a trajectory container (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported container version {version}")));
    }
    let (x_min, x_max, nx) = (r.f64()?, r.f64()?, r.u64()? as usize);
    let (t_start, t_end, nt) = (r.f64()?, r.f64()?, r.u64()? as usize);
    let grid = make_grid(x_min, x_max, nx, t_start, t_end, nt, true)?;
    let mode = mode_from(r.u8()?)?;
    let seed = r.opt()?;
    let stream_id = r.opt()?;
    let ic = match r.u8()? {
        0 => InitialDatum::NarrowWedge { t0: r.f64()? },
        1 => InitialDatum::Brownian { seed: r.u64()? },
        2 => InitialDatum::expr(&r.str()?)?,
        3 => {
            let xs = r.f64s()?;
            let fs = r.f64s()?;
            InitialDatum::Function(FunctionDescriptor::Table(SampleTable::new(xs, fs)?))
        }
        t => return Err(Error::Format(format!("unknown initial-datum tag {t}"))),
    };
    let origin_t0 = r.f64()?;
    let origin_dt = r.f64()?;
    let origin = r.f64s()?;
    let origin_log_scale = r.f64s()?;
    let count = r.len(24)?;
    let mut snapshots = Vec::with_capacity(count);
    for _ in 0..count {
        let t_abs = r.f64()?;
        let log_scale = r.f64()?;
        let values = r.f64s()?;
        snapshots.push(FieldState { t_abs, values, mode, log_scale });
    }
    if r.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(Trajectory { grid, ic, mode, seed, stream_id, origin, origin_log_scale, origin_t0, origin_dt, snapshots })
}

pub fn write_trajectory(path: &FsPath, traj: &Trajectory) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_trajectory(traj))?;
    Ok(())
}

pub fn read_trajectory(path: &FsPath) -> Result<Trajectory> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_trajectory(&buf)
}

/// Shortest decimal that reads back to the same `f64`.
fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:?}")
    }
}

/// `replica,t,value` rows; replica `r` is the `r`-th path.
pub fn paths_csv(paths: &[Path]) -> String {
    let mut out = String::from("replica,t,value\n");
    for (r, p) in paths.iter().enumerate() {
        for (i, v) in p.values().iter().enumerate() {
            let _ = writeln!(out, "{r},{},{}", num(p.t(i)), num(*v));
        }
    }
    out
}

/// Reads a `replica,t,value` table back into paths; rows of a replica must be in time order.
pub fn parse_paths_csv(text: &str) -> Result<Vec<Path>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("replica,t,value") {
        return Err(Error::Format("paths CSV must start with header replica,t,value".into()));
    }
    let mut rows: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || Error::Format(format!("paths CSV line {}: '{line}'", k + 2));
        if cols.len() != 3 {
            return Err(bad());
        }
        let r: usize = cols[0].trim().parse().map_err(|_| bad())?;
        let t: f64 = cols[1].trim().parse().map_err(|_| bad())?;
        let v: f64 = cols[2].trim().parse().map_err(|_| bad())?;
        match rows.last_mut() {
            Some((last, pts)) if *last == r => pts.push((t, v)),
            _ => rows.push((r, vec![(t, v)])),
        }
    }
    rows.into_iter()
        .map(|(r, pts)| {
            if pts.len() < 2 {
                return Err(Error::Format(format!("replica {r} has fewer than two samples")));
            }
            let dt = pts[1].0 - pts[0].0;
            Path::new(pts[0].0, dt, pts.into_iter().map(|p| p.1).collect())
        })
        .collect()
}

/// `level,epsilon,statistic,target` rows.
pub fn profile_csv(profile: &ScalingProfile) -> String {
    let mut out = String::from("level,epsilon,statistic,target\n");
    for ((l, e), s) in profile.levels.iter().zip(&profile.epsilons).zip(&profile.statistics) {
        let _ = writeln!(out, "{l},{},{},{}", num(*e), num(*s), num(profile.target));
    }
    out
}

/// `scale,count` rows.
pub fn boxes_csv(result: &BoxCountResult) -> String {
    let mut out = String::from("scale,count\n");
    for (s, c) in result.scales.iter().zip(&result.counts) {
        let _ = writeln!(out, "{},{c}", num(*s));
    }
    out
}

/// `check,target,measured,se,tolerance,pass` rows.
pub fn report_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check,target,measured,se,tolerance,pass\n");
    for r in reports {
        let name = r.name.replace('"', "'");
        let _ = writeln!(
            out,
            "\"{name}\",{},{},{},{},{}",
            num(r.target),
            num(r.measured),
            num(r.se),
            num(r.tolerance),
            r.pass
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::noise::sample_noise;
    use crate::solver::{solve, SolveOptions};
    use crate::stats::{box_dimension, lil_profile, ExceptionalSet};
    use crate::verify::Tolerance;
    use std::time::Duration;

    fn trajectory(ic: InitialDatum) -> Trajectory {
        let grid = GridSpec::symmetric(4.0, 1.0 / 8.0, 1.0 / 64.0, 1.0 / 256.0, 32).unwrap();
        let noise = sample_noise(&grid, 9, 2);
        let opts = SolveOptions { snapshot_times: vec![grid.t(8), grid.t(32)], origin_stride: 4 };
        let mut t = solve(&grid, &ic, &noise, Mode::Multiplicative, &opts).unwrap();
        t.seed = Some(9);
        t.stream_id = Some(2);
        t
    }

    #[test]
    fn container_round_trip() {
        let table = SampleTable::new(vec![-10.0, 0.0, 10.0], vec![f64::NEG_INFINITY, 0.5, -1.0]).unwrap();
        for ic in [
            InitialDatum::narrow_wedge(1.0 / 64.0).unwrap(),
            InitialDatum::Brownian { seed: 4 },
            InitialDatum::expr("-|x|^1.5 + 0.25*x").unwrap(),
            InitialDatum::Function(FunctionDescriptor::Table(table.clone())),
        ] {
            let t = trajectory(ic);
            let bytes = encode_trajectory(&t);
            assert_eq!(decode_trajectory(&bytes).unwrap(), t);
        }
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("t.kpz");
        let t = trajectory(InitialDatum::expr("0").unwrap());
        write_trajectory(&file, &t).unwrap();
        assert_eq!(read_trajectory(&file).unwrap(), t);
    }

    #[test]
    fn container_rejects_damage() {
        let bytes = encode_trajectory(&trajectory(InitialDatum::expr("0").unwrap()));
        assert!(matches!(decode_trajectory(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_trajectory(&bad).is_err());
        let mut long = bytes;
        long.push(0);
        assert!(decode_trajectory(&long).is_err());
    }

    #[test]
    fn paths_csv_round_trip() {
        let a = Path::from_fn(0.5, 0.125, 8, |t| t.sin()).unwrap();
        let b = Path::from_fn(0.5, 0.125, 8, |t| -t / 3.0).unwrap();
        let text = paths_csv(&[a.clone(), b.clone()]);
        assert!(text.starts_with("replica,t,value\n0,0.5,"));
        let back = parse_paths_csv(&text).unwrap();
        assert_eq!(back[0].values(), a.values());
        assert_eq!(back[1].values(), b.values());
        assert!(parse_paths_csv("r,t,v\n").is_err());
    }

    #[test]
    fn table_headers() {
        let p = Path::from_fn(0.0, 1.0 / 256.0, 512, |u| u).unwrap();
        let prof = lil_profile(&p, 1.0, 4, 16).unwrap();
        let csv = profile_csv(&prof);
        assert_eq!(csv.lines().next(), Some("level,epsilon,statistic,target"));
        assert_eq!(csv.lines().count(), prof.levels.len() + 1);
        let set = ExceptionalSet { alpha: 0.5, resolution: 8, interval: (1.0, 2.0), members: (0..=256).collect() };
        let boxes = box_dimension(&set, &[1, 3, 5, 7, 8]).unwrap();
        assert_eq!(boxes_csv(&boxes).lines().nth(1), Some("0.5,2"));
        let rep = CheckReport::new("a \"b\"", 1.0, 1.5, 0.1, Tolerance::Absolute(0.2), 5, Duration::ZERO);
        assert_eq!(report_csv(&[rep]), "check,target,measured,se,tolerance,pass\n\"a 'b'\",1.0,1.5,0.1,0.2,false\n");
    }
}
