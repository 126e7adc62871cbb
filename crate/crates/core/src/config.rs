//! Experiment configuration: a TOML document with flat dotted sections.
//!
//! ```toml
//! [run]
//! kind = "simulate-fbm"
//! seed = 7
//! replicas = 16
//!
//! [grid]
//! t_end = 2.0
//! nt = 4096
//!
//! [stats]
//! compute = ["variation"]
//! alpha = 4
//! epsilon = [0.0078125]
//! interval = [1.0, 2.0]
//! ```
//!
//! Parsing reports every violation at once; unknown keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use toml::{Table, Value};

use crate::error::{steps_of, Error, Result};
use crate::fbm::{FbmMethod, KPZ_HURST};
use crate::grid::{make_grid, GridSpec};
use crate::initial::{FunctionDescriptor, HypParams, InitialDatum, SampleTable};
use crate::solver::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SimulateShe,
    SimulateFbm,
    Stats,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SimulateShe => "simulate-she",
            ExperimentKind::SimulateFbm => "simulate-fbm",
            ExperimentKind::Stats => "stats",
            ExperimentKind::Verify => "verify",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "simulate-she" => Ok(ExperimentKind::SimulateShe),
            "simulate-fbm" => Ok(ExperimentKind::SimulateFbm),
            "stats" => Ok(ExperimentKind::Stats),
            "verify" => Ok(ExperimentKind::Verify),
            _ => Err(format!("unknown experiment kind '{s}' (simulate-she, simulate-fbm, stats, verify)")),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Statistics that can be requested under `stats.compute`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Statistic {
    Variation,
    Increments,
    Lil,
    Moc,
    Exceptional,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Variation => "variation",
            Statistic::Increments => "increments",
            Statistic::Lil => "lil",
            Statistic::Moc => "moc",
            Statistic::Exceptional => "exceptional",
        }
    }
}

impl FromStr for Statistic {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "variation" => Ok(Statistic::Variation),
            "increments" => Ok(Statistic::Increments),
            "lil" => Ok(Statistic::Lil),
            "moc" => Ok(Statistic::Moc),
            "exceptional" => Ok(Statistic::Exceptional),
            _ => Err(format!("unknown statistic '{s}' (variation, increments, lil, moc, exceptional)")),
        }
    }
}

/// Raw grid keys; validated into a [`GridSpec`] by [`ExperimentConfig::grid_spec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub nt: usize,
}

impl GridParams {
    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.nt as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsSelection {
    pub compute: Vec<Statistic>,
    pub alpha: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub interval: (f64, f64),
    /// Time at which increments and the LIL profile are evaluated.
    pub t: f64,
    pub depths: Vec<u32>,
    pub resolution: Option<u32>,
    pub exceptional_alphas: Vec<f64>,
    pub min_steps: usize,
    pub input: Option<PathBuf>,
}

impl Default for StatsSelection {
    fn default() -> Self {
        StatsSelection {
            compute: Vec::new(),
            alpha: vec![4.0],
            epsilon: Vec::new(),
            interval: (1.0, 2.0),
            t: 1.0,
            depths: Vec::new(),
            resolution: None,
            exceptional_alphas: Vec::new(),
            min_steps: crate::stats::DEFAULT_MIN_STEPS,
            input: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FbmParams {
    pub hurst: f64,
    pub method: FbmMethod,
    /// Multiply samples by `(2/pi)^{1/4}`.
    pub rescale: bool,
}

impl Default for FbmParams {
    fn default() -> Self {
        FbmParams { hurst: KPZ_HURST, method: FbmMethod::Circulant, rescale: true }
    }
}

/// Initial-datum keys as written, so the echo reproduces them.
#[derive(Debug, Clone, PartialEq)]
pub struct IcParams {
    pub kind: String,
    pub t0: Option<f64>,
    pub expr: Option<String>,
    pub table: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub replicas: u64,
    /// Worker count; `None` means one worker per available core.
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub mode: Mode,
    pub override_boundary_guard: bool,
    pub origin_stride: usize,
    pub save_trajectories: bool,
    pub grid: Option<GridParams>,
    pub ic: Option<IcParams>,
    pub hyp: Option<HypParams>,
    pub fbm: FbmParams,
    pub stats: StatsSelection,
    /// Acceptance criteria to run for the verify kind (1-based).
    pub checks: Vec<u32>,
}

/// Number of acceptance criteria known to the verify kind.
pub const CHECK_COUNT: u32 = 11;

struct Fields {
    values: BTreeMap<String, Value>,
    errors: Vec<String>,
}

fn flatten(prefix: &str, table: &Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            v => {
                out.insert(key, v.clone());
            }
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.values.remove(key)
    }

    fn bad(&mut self, key: &str, want: &str, got: &Value) {
        self.errors.push(format!("{key}: expected {want}, got {got}"));
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let v = self.take(key)?;
        as_f64(&v).or_else(|| {
            self.bad(key, "a number", &v);
            None
        })
    }

    fn u64(&mut self, key: &str) -> Option<u64> {
        let v = self.take(key)?;
        match v {
            Value::Integer(i) if i >= 0 => Some(i as u64),
            _ => {
                self.bad(key, "a non-negative integer", &v);
                None
            }
        }
    }

    fn bool(&mut self, key: &str) -> Option<bool> {
        let v = self.take(key)?;
        match v {
            Value::Boolean(b) => Some(b),
            _ => {
                self.bad(key, "true or false", &v);
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        let v = self.take(key)?;
        match v {
            Value::String(s) => Some(s),
            _ => {
                self.bad(key, "a string", &v);
                None
            }
        }
    }

    fn parsed<T: FromStr<Err = String>>(&mut self, key: &str) -> Option<T> {
        let s = self.string(key)?;
        s.parse().map_err(|e| self.errors.push(format!("{key}: {e}"))).ok()
    }

    /// A number or an array of numbers.
    fn f64s(&mut self, key: &str) -> Option<Vec<f64>> {
        let v = self.take(key)?;
        if let Some(x) = as_f64(&v) {
            return Some(vec![x]);
        }
        match &v {
            Value::Array(a) if a.iter().all(|x| as_f64(x).is_some()) => Some(a.iter().filter_map(as_f64).collect()),
            _ => {
                self.bad(key, "a number or an array of numbers", &v);
                None
            }
        }
    }

    fn u32s(&mut self, key: &str) -> Option<Vec<u32>> {
        let v = self.take(key)?;
        let one = |x: &Value| match x {
            Value::Integer(i) if *i >= 0 && *i <= u32::MAX as i64 => Some(*i as u32),
            _ => None,
        };
        if let Some(x) = one(&v) {
            return Some(vec![x]);
        }
        match &v {
            Value::Array(a) if a.iter().all(|x| one(x).is_some()) => Some(a.iter().filter_map(one).collect()),
            _ => {
                self.bad(key, "a non-negative integer or an array of them", &v);
                None
            }
        }
    }

    fn strings(&mut self, key: &str) -> Option<Vec<String>> {
        let v = self.take(key)?;
        match &v {
            Value::String(s) => Some(vec![s.clone()]),
            Value::Array(a) if a.iter().all(|x| x.is_str()) => {
                Some(a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect())
            }
            _ => {
                self.bad(key, "a string or an array of strings", &v);
                None
            }
        }
    }
}

/// Parses and validates a configuration document, collecting all violations.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))?;
    let mut values = BTreeMap::new();
    flatten("", &table, &mut values);
    let mut f = Fields { values, errors: Vec::new() };

    let kind = f.parsed::<ExperimentKind>("run.kind");
    if kind.is_none() && !f.errors.iter().any(|e| e.starts_with("run.kind")) {
        f.errors.push("run.kind is required".into());
    }
    let seed = f.u64("run.seed");
    if seed.is_none() && !f.errors.iter().any(|e| e.starts_with("run.seed")) {
        f.errors.push("run.seed is required (there is no implicit entropy source)".into());
    }
    let replicas = f.u64("run.replicas").unwrap_or(1);
    if replicas == 0 {
        f.errors.push("run.replicas must be at least 1".into());
    }
    let threads = match f.u64("run.threads") {
        Some(0) => {
            f.errors.push("run.threads must be at least 1".into());
            None
        }
        t => t.map(|t| t as usize),
    };
    let out = PathBuf::from(f.string("run.out").unwrap_or_else(|| "out".into()));
    let mode = match f.string("run.mode").as_deref() {
        None | Some("multiplicative") => Mode::Multiplicative,
        Some("additive") => Mode::Additive,
        Some(m) => {
            f.errors.push(format!("run.mode: unknown mode '{m}' (multiplicative, additive)"));
            Mode::Multiplicative
        }
    };
    let override_boundary_guard = f.bool("run.override_boundary_guard").unwrap_or(false);
    let origin_stride = f.u64("run.origin_stride").unwrap_or(1).max(1) as usize;
    let save_trajectories = f.bool("run.save_trajectories").unwrap_or(false);

    let grid_keys = ["grid.x_min", "grid.x_max", "grid.nx", "grid.t_start", "grid.t_end", "grid.nt"];
    let any_grid = grid_keys.iter().any(|k| f.values.contains_key(*k));
    let grid = if any_grid {
        let x_min = f.f64("grid.x_min").unwrap_or(-1.0);
        let x_max = f.f64("grid.x_max").unwrap_or(1.0);
        let nx = f.u64("grid.nx").unwrap_or(1) as usize;
        let t_start = f.f64("grid.t_start").unwrap_or(0.0);
        let t_end = f.f64("grid.t_end");
        let nt = f.u64("grid.nt");
        match (t_end, nt) {
            (Some(t_end), Some(nt)) if nt > 0 => Some(GridParams { x_min, x_max, nx, t_start, t_end, nt: nt as usize }),
            _ => {
                f.errors.push("grid.t_end and a positive grid.nt are required when a grid is given".into());
                None
            }
        }
    } else {
        None
    };

    let ic = f.string("ic.kind").map(|kind| IcParams {
        kind,
        t0: None,
        expr: None,
        table: None,
        seed: None,
    });
    let ic = ic.map(|mut ic| {
        ic.t0 = f.f64("ic.t0");
        ic.expr = f.string("ic.expr");
        ic.table = f.string("ic.table");
        ic.seed = f.u64("ic.seed");
        ic
    });
    if ic.is_none() {
        for k in ["ic.t0", "ic.expr", "ic.table", "ic.seed"] {
            if f.values.contains_key(k) {
                f.errors.push(format!("{k} given without ic.kind"));
                f.take(k);
            }
        }
    }

    let hyp_keys = ["hyp.theta", "hyp.delta", "hyp.lambda", "hyp.kappa", "hyp.M"];
    let hyp = if hyp_keys.iter().any(|k| f.values.contains_key(*k)) {
        let vals: Vec<Option<f64>> = hyp_keys.iter().map(|k| f.f64(k)).collect();
        if vals.iter().any(Option::is_none) {
            f.errors.push("hyp needs all of theta, delta, lambda, kappa, M".into());
            None
        } else {
            let v: Vec<f64> = vals.into_iter().flatten().collect();
            HypParams::new(v[0], v[1], v[2], v[3], v[4]).map_err(|e| f.errors.push(format!("hyp: {e}"))).ok()
        }
    } else {
        None
    };

    let mut fbm = FbmParams::default();
    if let Some(h) = f.f64("fbm.hurst") {
        fbm.hurst = h;
    }
    match f.string("fbm.method").as_deref() {
        None => {}
        Some("cholesky") => fbm.method = FbmMethod::Cholesky,
        Some("circulant") => fbm.method = FbmMethod::Circulant,
        Some(m) => f.errors.push(format!("fbm.method: unknown method '{m}' (cholesky, circulant)")),
    }
    if let Some(r) = f.bool("fbm.rescale") {
        fbm.rescale = r;
    }

    let mut stats = StatsSelection::default();
    if let Some(list) = f.strings("stats.compute") {
        for s in list {
            match s.parse::<Statistic>() {
                Ok(st) => stats.compute.push(st),
                Err(e) => f.errors.push(format!("stats.compute: {e}")),
            }
        }
        stats.compute.sort();
        stats.compute.dedup();
    }
    if let Some(a) = f.f64s("stats.alpha") {
        stats.alpha = a;
    }
    if let Some(e) = f.f64s("stats.epsilon") {
        stats.epsilon = e;
    }
    if let Some(iv) = f.f64s("stats.interval") {
        match iv.as_slice() {
            [a, b] if b > a => stats.interval = (*a, *b),
            _ => f.errors.push(format!("stats.interval: expected [a, b] with a < b, got {iv:?}")),
        }
    }
    if let Some(t) = f.f64("stats.t") {
        stats.t = t;
    }
    if let Some(d) = f.u32s("stats.depths") {
        stats.depths = d;
    }
    stats.resolution = f.u64("stats.resolution").map(|r| r as u32);
    if let Some(a) = f.f64s("stats.exceptional_alphas") {
        stats.exceptional_alphas = a;
    }
    if let Some(m) = f.u64("stats.min_steps") {
        stats.min_steps = m as usize;
    }
    stats.input = f.string("stats.input").map(PathBuf::from);

    let checks = match f.u32s("verify.checks") {
        Some(c) => c,
        None => (1..=CHECK_COUNT).collect(),
    };

    for key in f.values.keys() {
        f.errors.push(format!("unknown key '{key}'"));
    }
    let mut errors = f.errors;

    let cfg = ExperimentConfig {
        kind: kind.unwrap_or(ExperimentKind::Verify),
        seed: seed.unwrap_or(0),
        replicas,
        threads,
        out,
        mode,
        override_boundary_guard,
        origin_stride,
        save_trajectories,
        grid,
        ic,
        hyp,
        fbm,
        stats,
        checks,
    };
    errors.extend(cfg.semantic_errors());
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errors))
    }
}

impl ExperimentConfig {
    /// Cross-field rules: kind requirements, epsilon divisibility, value ranges.
    fn semantic_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let s = &self.stats;
        if s.alpha.iter().any(|a| !(*a > 0.0)) {
            errors.push("stats.alpha entries must be positive".into());
        }
        if s.epsilon.iter().any(|e| !(*e > 0.0)) {
            errors.push("stats.epsilon entries must be positive".into());
        }
        if s.exceptional_alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            errors.push("stats.exceptional_alphas entries must lie in (0, 1)".into());
        }
        if let Some(c) = self.checks.iter().find(|c| **c == 0 || **c > CHECK_COUNT) {
            errors.push(format!("verify.checks: no criterion {c} (1..={CHECK_COUNT})"));
        }
        let needs = |st: Statistic| s.compute.contains(&st);
        if (needs(Statistic::Variation) || needs(Statistic::Increments)) && s.epsilon.is_empty() {
            errors.push("stats.epsilon is required for variation and increment statistics".into());
        }
        if (needs(Statistic::Lil) || needs(Statistic::Moc)) && s.depths.is_empty() {
            errors.push("stats.depths is required for lil and moc statistics".into());
        }
        if needs(Statistic::Exceptional) && (s.exceptional_alphas.is_empty() || s.resolution.is_none()) {
            errors.push("stats.exceptional_alphas and stats.resolution are required for exceptional sets".into());
        }
        match self.kind {
            ExperimentKind::SimulateShe => {
                if self.grid.is_none() {
                    errors.push("simulate-she needs a [grid] section".into());
                }
                if self.ic.is_none() {
                    errors.push("simulate-she needs ic.kind".into());
                }
            }
            ExperimentKind::SimulateFbm => {
                if self.grid.is_none() {
                    errors.push("simulate-fbm needs grid.t_end and grid.nt".into());
                }
                if !(self.fbm.hurst > 0.0 && self.fbm.hurst < 1.0) {
                    errors.push(format!("fbm.hurst = {} must lie in (0, 1)", self.fbm.hurst));
                }
            }
            ExperimentKind::Stats => {
                if s.input.is_none() {
                    errors.push("stats kind needs stats.input (a paths CSV)".into());
                }
            }
            ExperimentKind::Verify => {}
        }
        if let Some(g) = &self.grid {
            if !(g.t_end > g.t_start) {
                errors.push(format!("grid: t_end = {} must exceed t_start = {}", g.t_end, g.t_start));
            } else if self.kind != ExperimentKind::Stats {
                let path_dt = match self.kind {
                    ExperimentKind::SimulateShe => g.dt() * self.origin_stride as f64,
                    _ => g.dt(),
                };
                for e in &s.epsilon {
                    if steps_of("epsilon", *e, path_dt).is_err() {
                        errors.push(format!("stats.epsilon = {e} is not an integer multiple of the path step {path_dt}"));
                    }
                }
            }
            if self.kind == ExperimentKind::SimulateShe {
                if let Err(e) = make_grid(g.x_min, g.x_max, g.nx, g.t_start, g.t_end, g.nt, self.override_boundary_guard) {
                    errors.push(format!("grid: {e}"));
                }
            }
        }
        if let Some(ic) = &self.ic {
            if let Err(e) = self.initial_datum_of(ic) {
                errors.push(format!("ic: {e}"));
            }
        }
        errors
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = self.grid.ok_or_else(|| Error::Config(vec!["no grid configured".into()]))?;
        make_grid(g.x_min, g.x_max, g.nx, g.t_start, g.t_end, g.nt, self.override_boundary_guard)
    }

    fn initial_datum_of(&self, ic: &IcParams) -> Result<InitialDatum> {
        match ic.kind.as_str() {
            "narrow-wedge" => match ic.t0 {
                Some(t0) => InitialDatum::narrow_wedge(t0),
                None => match &self.grid {
                    Some(g) => InitialDatum::narrow_wedge(g.t_start),
                    None => Err(Error::InvalidArgument("narrow wedge needs ic.t0 or grid.t_start".into())),
                },
            },
            "brownian" => Ok(InitialDatum::Brownian { seed: ic.seed.unwrap_or(self.seed) }),
            "function" => match (&ic.expr, &ic.table) {
                (Some(e), None) => InitialDatum::expr(e),
                (None, Some(t)) => {
                    let text = if t.contains('\n') { t.clone() } else { std::fs::read_to_string(t)? };
                    Ok(InitialDatum::Function(FunctionDescriptor::Table(SampleTable::parse(&text)?)))
                }
                _ => Err(Error::InvalidArgument("function datum needs exactly one of ic.expr, ic.table".into())),
            },
            k => Err(Error::InvalidArgument(format!("unknown ic.kind '{k}' (narrow-wedge, brownian, function)"))),
        }
    }

    pub fn initial_datum(&self) -> Result<InitialDatum> {
        let ic = self.ic.as_ref().ok_or_else(|| Error::Config(vec!["no initial datum configured".into()]))?;
        self.initial_datum_of(ic)
    }

    /// Canonical TOML echo with every default filled in; parses back to `self`.
    pub fn to_toml(&self) -> String {
        fn floats(v: &[f64]) -> Value {
            Value::Array(v.iter().map(|x| Value::Float(*x)).collect())
        }
        fn ints(v: &[u32]) -> Value {
            Value::Array(v.iter().map(|x| Value::Integer(*x as i64)).collect())
        }
        let mut root = Table::new();
        let mut run = Table::new();
        run.insert("kind".into(), self.kind.name().into());
        run.insert("seed".into(), Value::Integer(self.seed as i64));
        run.insert("replicas".into(), Value::Integer(self.replicas as i64));
        if let Some(t) = self.threads {
            run.insert("threads".into(), Value::Integer(t as i64));
        }
        run.insert("out".into(), self.out.display().to_string().into());
        run.insert("mode".into(), self.mode.name().into());
        run.insert("override_boundary_guard".into(), self.override_boundary_guard.into());
        run.insert("origin_stride".into(), Value::Integer(self.origin_stride as i64));
        run.insert("save_trajectories".into(), self.save_trajectories.into());
        root.insert("run".into(), run.into());
        if let Some(g) = &self.grid {
            let mut t = Table::new();
            t.insert("x_min".into(), g.x_min.into());
            t.insert("x_max".into(), g.x_max.into());
            t.insert("nx".into(), Value::Integer(g.nx as i64));
            t.insert("t_start".into(), g.t_start.into());
            t.insert("t_end".into(), g.t_end.into());
            t.insert("nt".into(), Value::Integer(g.nt as i64));
            root.insert("grid".into(), t.into());
        }
        if let Some(ic) = &self.ic {
            let mut t = Table::new();
            t.insert("kind".into(), ic.kind.clone().into());
            if let Some(v) = ic.t0 {
                t.insert("t0".into(), v.into());
            }
            if let Some(v) = &ic.expr {
                t.insert("expr".into(), v.clone().into());
            }
            if let Some(v) = &ic.table {
                t.insert("table".into(), v.clone().into());
            }
            if let Some(v) = ic.seed {
                t.insert("seed".into(), Value::Integer(v as i64));
            }
            root.insert("ic".into(), t.into());
        }
        if let Some(h) = &self.hyp {
            let mut t = Table::new();
            t.insert("theta".into(), h.theta.into());
            t.insert("delta".into(), h.delta.into());
            t.insert("lambda".into(), h.lambda.into());
            t.insert("kappa".into(), h.kappa.into());
            t.insert("M".into(), h.m.into());
            root.insert("hyp".into(), t.into());
        }
        let mut fbm = Table::new();
        fbm.insert("hurst".into(), self.fbm.hurst.into());
        let method = match self.fbm.method {
            FbmMethod::Cholesky => "cholesky",
            FbmMethod::Circulant => "circulant",
        };
        fbm.insert("method".into(), method.into());
        fbm.insert("rescale".into(), self.fbm.rescale.into());
        root.insert("fbm".into(), fbm.into());
        let s = &self.stats;
        let mut st = Table::new();
        st.insert(
            "compute".into(),
            Value::Array(s.compute.iter().map(|c| Value::String(c.name().into())).collect()),
        );
        st.insert("alpha".into(), floats(&s.alpha));
        st.insert("epsilon".into(), floats(&s.epsilon));
        st.insert("interval".into(), floats(&[s.interval.0, s.interval.1]));
        st.insert("t".into(), s.t.into());
        st.insert("depths".into(), ints(&s.depths));
        if let Some(r) = s.resolution {
            st.insert("resolution".into(), Value::Integer(r as i64));
        }
        st.insert("exceptional_alphas".into(), floats(&s.exceptional_alphas));
        st.insert("min_steps".into(), Value::Integer(s.min_steps as i64));
        if let Some(p) = &s.input {
            st.insert("input".into(), p.display().to_string().into());
        }
        root.insert("stats".into(), st.into());
        let mut verify = Table::new();
        verify.insert("checks".into(), ints(&self.checks));
        root.insert("verify".into(), verify.into());
        root.to_string()
    }
}
