//! Initial data: narrow wedge, two-sided Brownian, and deterministic
//! functions with values in `R ∪ {-inf}`, plus the growth-class checks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kernel::kernel_unchecked;
use crate::noise::{fill_standard_normal, KeyDomain};
use crate::solver::{FieldState, Mode};

/// Parameters `(theta, delta, lambda, kappa, M)` of the admissible class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub theta: f64,
    pub delta: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub m: f64,
}

impl HypParams {
    pub fn new(theta: f64, delta: f64, lambda: f64, kappa: f64, m: f64) -> Result<Self> {
        let p = HypParams { theta, delta, lambda, kappa, m };
        if [theta, delta, lambda, kappa, m].iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("class parameters must be positive: {p:?}")));
        }
        Ok(p)
    }

    /// Growth bound `lambda (1 + |x|^{2 - delta})`.
    pub fn growth_bound(&self, x: f64) -> f64 {
        self.lambda * (1.0 + x.abs().powf(2.0 - self.delta))
    }
}

/// Closed-form function of `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Abs(Box<Expr>),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Abs(e) => e.eval(x).abs(),
            Expr::Exp(e) => e.eval(x).exp(),
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Mul(a, b) => {
                let (u, v) = (a.eval(x), b.eval(x));
                // 0 * (-inf) is taken as 0 so that indicator-style products stay finite.
                if u == 0.0 || v == 0.0 {
                    0.0
                } else {
                    u * v
                }
            }
            Expr::Pow(a, b) => a.eval(x).powf(b.eval(x)),
        }
    }
}

/// Fully parenthesized form that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c == f64::INFINITY => write!(f, "inf"),
            Expr::Const(c) if *c == f64::NEG_INFINITY => write!(f, "(-inf)"),
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => write!(f, "x"),
            Expr::Abs(e) => write!(f, "|{e}|"),
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    /// Grammar (precedence low to high):
    ///
    /// ```text
    /// sum     := product (('+' | '-') product)*
    /// product := unary (('*' | '/') unary)*
    /// unary   := '-' unary | power
    /// power   := atom ('^' unary)?
    /// atom    := number | 'inf' | 'x' | '|' sum '|' | 'abs(' sum ')' | 'exp(' sum ')' | '(' sum ')'
    /// ```
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Expr(format!("unexpected '{}' at offset {}", &s[p.pos..], p.pos)));
        }
        Ok(e)
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        e => Expr::Neg(Box::new(e)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Expr(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut acc = self.product()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat(b'-') {
                acc = Expr::Add(Box::new(acc), Box::new(negate(self.product()?)));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                let inv = Expr::Pow(Box::new(self.unary()?), Box::new(Expr::Const(-1.0)));
                acc = Expr::Mul(Box::new(acc), Box::new(inv));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(negate(self.unary()?));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(Error::Expr("unexpected end of expression".into())),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'|') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b'|')?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    let exp_sign = (c == b'-' || c == b'+')
                        && matches!(self.src[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                text.parse::<f64>()
                    .map(Expr::Const)
                    .map_err(|_| Error::Expr(format!("bad number '{text}'")))
            }
            Some(_) => {
                if self.keyword("abs") {
                    self.expect(b'(')?;
                    let e = self.sum()?;
                    self.expect(b')')?;
                    Ok(Expr::Abs(Box::new(e)))
                } else if self.keyword("exp") {
                    self.expect(b'(')?;
                    let e = self.sum()?;
                    self.expect(b')')?;
                    Ok(Expr::Exp(Box::new(e)))
                } else if self.keyword("inf") {
                    Ok(Expr::Const(f64::INFINITY))
                } else if self.keyword("x") {
                    Ok(Expr::X)
                } else {
                    Err(Error::Expr(format!("unexpected input at offset {}", self.pos)))
                }
            }
        }
    }
}

/// Two-column table `(x, f(x))`, linearly interpolated, strictly increasing in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl SampleTable {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() || xs.len() < 2 {
            return Err(Error::Expr("table needs at least two (x, f) rows".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Expr("table abscissae must be finite and strictly increasing".into()));
        }
        if fs.iter().any(|f| f.is_nan() || *f == f64::INFINITY) {
            return Err(Error::Expr("table values must be real or -inf".into()));
        }
        Ok(SampleTable { xs, fs })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn fs(&self) -> &[f64] {
        &self.fs
    }

    /// Parses rows `x,f` or `x f`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| Error::Expr(format!("table line {}: bad number '{s}'", lineno + 1)))
            };
            match cols.as_slice() {
                [x, f] => {
                    xs.push(parse(x)?);
                    fs.push(parse(f)?);
                }
                _ => return Err(Error::Expr(format!("table line {} needs two columns", lineno + 1))),
            }
        }
        SampleTable::new(xs, fs)
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        let last = self.xs.len() - 1;
        if x < self.xs[0] || x > self.xs[last] {
            return None;
        }
        let j = self.xs.partition_point(|v| *v <= x).clamp(1, last);
        let (x0, x1, f0, f1) = (self.xs[j - 1], self.xs[j], self.fs[j - 1], self.fs[j]);
        if x == x1 {
            return Some(f1);
        }
        if f0 == f64::NEG_INFINITY || f1 == f64::NEG_INFINITY {
            return Some(if x == x0 { f0 } else { f64::NEG_INFINITY });
        }
        Some(f0 + (f1 - f0) * (x - x0) / (x1 - x0))
    }
}

/// A deterministic function `f: R -> R ∪ {-inf}`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionDescriptor {
    Expr(Expr),
    Table(SampleTable),
}

impl FunctionDescriptor {
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            FunctionDescriptor::Expr(e) => Some(e.eval(x)),
            FunctionDescriptor::Table(t) => t.eval(x),
        };
        match v {
            Some(v) if !v.is_nan() && v != f64::INFINITY => Ok(v),
            Some(v) => Err(Error::Expr(format!("f({x}) = {v} is not in R ∪ {{-inf}}"))),
            None => Err(Error::Expr(format!("table does not cover x = {x}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// Delta at the origin, realized as `p_{t0}` at absolute time `t0`.
    NarrowWedge { t0: f64 },
    /// `exp(B(x))` with `B` a two-sided Brownian motion pinned at the origin.
    Brownian { seed: u64 },
    /// `exp(f(x))`.
    Function(FunctionDescriptor),
}

impl InitialDatum {
    pub fn narrow_wedge(t0: f64) -> Result<Self> {
        if !(t0 > 0.0) {
            return Err(Error::InvalidArgument(format!("narrow wedge needs t0 > 0, got {t0}")));
        }
        Ok(InitialDatum::NarrowWedge { t0 })
    }

    /// Narrow wedge with the default smoothing time `10 dt`.
    pub fn narrow_wedge_for(grid: &GridSpec) -> Self {
        InitialDatum::NarrowWedge { t0: 10.0 * grid.dt() }
    }

    pub fn expr(text: &str) -> Result<Self> {
        Ok(InitialDatum::Function(FunctionDescriptor::Expr(text.parse()?)))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InitialDatum::NarrowWedge { .. } => "narrow-wedge",
            InitialDatum::Brownian { .. } => "brownian",
            InitialDatum::Function(_) => "function",
        }
    }
}

impl fmt::Display for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDatum::NarrowWedge { t0 } => write!(f, "narrow-wedge(t0={t0})"),
            InitialDatum::Brownian { seed } => write!(f, "brownian(seed={seed})"),
            InitialDatum::Function(FunctionDescriptor::Expr(e)) => write!(f, "function({e})"),
            InitialDatum::Function(FunctionDescriptor::Table(t)) => write!(f, "table({} rows)", t.xs.len()),
        }
    }
}

/// Outcome of the probe-based class check.
#[derive(Debug, Clone, PartialEq)]
pub struct HypReport {
    pub probe_extent: f64,
    pub probe_step: f64,
    /// First probe point violating `f(x) <= lambda (1 + |x|^{2-delta})`, with `(x, f(x), bound)`.
    pub growth_violation: Option<(f64, f64, f64)>,
    /// A subinterval of `[-M, M]` of length `theta` on which `f >= -kappa`, if one was found.
    pub floor_interval: Option<(f64, f64)>,
}

impl HypReport {
    pub fn growth_ok(&self) -> bool {
        self.growth_violation.is_none()
    }
    pub fn floor_ok(&self) -> bool {
        self.floor_interval.is_some()
    }
    pub fn passes(&self) -> bool {
        self.growth_ok() && self.floor_ok()
    }
}

/// Probe spacing used by [`validate_hyp`].
pub fn probe_step(p: &HypParams) -> f64 {
    (p.theta / 16.0).min(1.0 / 64.0)
}

/// Checks the growth condition on `[-probe_extent, probe_extent]` and the
/// interval floor condition on `[-M, M]`, both on a uniform probe mesh.
pub fn validate_hyp(f: &InitialDatum, p: &HypParams, probe_extent: f64) -> Result<HypReport> {
    let InitialDatum::Function(desc) = f else {
        return Err(Error::Incompatible(format!("class check needs a function datum, got {}", f.kind())));
    };
    if !(probe_extent >= p.m) {
        return Err(Error::InvalidArgument(format!("probe extent {probe_extent} < M = {}", p.m)));
    }
    let h = probe_step(p);

    let n = (probe_extent / h).ceil() as i64;
    let mut growth_violation = None;
    for j in -n..=n {
        let x = (j as f64 * h).clamp(-probe_extent, probe_extent);
        let v = desc.eval(x)?;
        let bound = p.growth_bound(x);
        if v > bound {
            growth_violation = Some((x, v, bound));
            break;
        }
    }

    // Longest run of consecutive probes with f >= -kappa; a run covering theta certifies (b).
    let mut floor_interval = None;
    if p.theta <= 2.0 * p.m {
        let steps = (2.0 * p.m / h).ceil() as usize;
        let mut run_start: Option<f64> = None;
        for j in 0..=steps {
            let x = (-p.m + j as f64 * h).min(p.m);
            if desc.eval(x)? >= -p.kappa {
                let start = *run_start.get_or_insert(x);
                if x - start >= p.theta - 1e-12 {
                    floor_interval = Some((start, start + p.theta));
                    break;
                }
            } else {
                run_start = None;
            }
        }
    }

    Ok(HypReport { probe_extent, probe_step: h, growth_violation, floor_interval })
}

/// Sampled `log M_k(x) = log E[e^{k f(x)}]` and the smallest ladder constants bounding it.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentBound {
    pub k: u32,
    pub lambda_k: f64,
    pub delta_k: f64,
    pub probes: Vec<f64>,
    pub values: Vec<f64>,
    pub satisfied: bool,
}

/// Candidate growth constants `{k^2/2, 2 k lambda, max of both}`, ascending.
pub fn lambda_ladder(k: u32, p: &HypParams) -> [f64; 3] {
    let k = k as f64;
    let mut l = [2.0 * k * p.lambda, 0.5 * k * k, (2.0 * k * p.lambda).max(0.5 * k * k)];
    l.sort_by(f64::total_cmp);
    l
}

pub fn log_moment_bound(f: &InitialDatum, k: u32, probes: &[f64], p: &HypParams) -> Result<MomentBound> {
    if k == 0 {
        return Err(Error::InvalidArgument("moment order k must be at least 1".into()));
    }
    let kf = k as f64;
    let values: Vec<f64> = match f {
        InitialDatum::NarrowWedge { .. } => {
            return Err(Error::Incompatible("narrow wedge is not a function; moments are undefined".into()))
        }
        InitialDatum::Brownian { .. } => probes.iter().map(|x| 0.5 * kf * kf * x.abs()).collect(),
        InitialDatum::Function(desc) => probes.iter().map(|x| desc.eval(*x).map(|v| kf * v)).collect::<Result<_>>()?,
    };
    let delta_k = p.delta.min(1.0);
    let holds = |lambda_k: f64| {
        probes
            .iter()
            .zip(&values)
            .all(|(x, v)| *v <= lambda_k * (1.0 + x.abs().powf(2.0 - delta_k)))
    };
    let ladder = lambda_ladder(k, p);
    let chosen = ladder.iter().copied().find(|l| holds(*l));
    Ok(MomentBound {
        k,
        lambda_k: chosen.unwrap_or(ladder[2]),
        delta_k,
        probes: probes.to_vec(),
        values,
        satisfied: chosen.is_some(),
    })
}

/// Initial multiplicative field `Z(t_start, x_i)` for a datum.
pub fn make_initial_field(grid: &GridSpec, ic: &InitialDatum) -> Result<FieldState> {
    let nx = grid.nx();
    let values = match ic {
        InitialDatum::Function(desc) => {
            let mut out = Vec::with_capacity(nx);
            for i in 0..nx {
                let x = grid.x(i);
                let z = desc.eval(x)?.exp();
                if !z.is_finite() {
                    return Err(Error::Overflow { x });
                }
                out.push(z);
            }
            out
        }
        InitialDatum::Brownian { seed } => {
            let origin = grid.origin_index()?;
            let mut steps = vec![0.0; nx];
            fill_standard_normal(KeyDomain::BrownianInitial, *seed, 0, 0, &mut steps);
            let sd = grid.dx().sqrt();
            let mut b = vec![0.0; nx];
            for i in origin + 1..nx {
                b[i] = b[i - 1] + sd * steps[i];
            }
            for i in (0..origin).rev() {
                b[i] = b[i + 1] + sd * steps[i];
            }
            let mut out = Vec::with_capacity(nx);
            for (i, v) in b.iter().enumerate() {
                let z = v.exp();
                if !z.is_finite() {
                    return Err(Error::Overflow { x: grid.x(i) });
                }
                out.push(z);
            }
            out
        }
        InitialDatum::NarrowWedge { t0 } => {
            if *t0 < 4.0 * grid.dt() * (1.0 - 1e-12) {
                return Err(Error::Incompatible(format!(
                    "narrow wedge smoothing time {t0} < 4 dt = {}",
                    4.0 * grid.dt()
                )));
            }
            if (grid.t_start() - t0).abs() > 1e-9 * t0.max(1.0) {
                return Err(Error::Incompatible(format!(
                    "narrow wedge grid must start at absolute time t0 = {t0}, starts at {}",
                    grid.t_start()
                )));
            }
            (0..nx).map(|i| kernel_unchecked(*t0, grid.x(i))).collect()
        }
    };
    Ok(FieldState::new(grid.t_start(), values, Mode::Multiplicative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn params(lambda: f64, delta: f64, kappa: f64) -> HypParams {
        HypParams::new(0.5, delta, lambda, kappa, 2.0).unwrap()
    }

    #[test]
    fn parses_grammar() {
        let cases: &[(&str, f64, f64)] = &[
            ("0", 3.0, 0.0),
            ("x", -2.0, -2.0),
            ("|x|^1.5", -4.0, 8.0),
            ("abs(x) ^ 1.5", 4.0, 8.0),
            ("-x^2 + 3*x", 2.0, 2.0),
            ("exp(-x) * 2", 0.0, 2.0),
            ("2 - x", 5.0, -3.0),
            ("1e-1 * x", 10.0, 1.0),
            ("x/4", 2.0, 0.5),
        ];
        for (text, x, want) in cases {
            let e: Expr = text.parse().unwrap();
            assert!((e.eval(*x) - want).abs() < 1e-12, "{text} at {x}: {}", e.eval(*x));
        }
        assert_eq!("-inf".parse::<Expr>().unwrap().eval(0.0), f64::NEG_INFINITY);
        assert!("x +".parse::<Expr>().is_err());
        assert!("y".parse::<Expr>().is_err());
        assert!("(x".parse::<Expr>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["-x^2 + 3*x", "exp(-|x|) / 2", "-inf", "2 - -x", "x^-0.5 * 1e-3", "abs(x - 1)^(1/3)"] {
            let e: Expr = text.parse().unwrap();
            let back: Expr = e.to_string().parse().unwrap();
            assert_eq!(back, e, "{text} -> {e}");
        }
    }

    #[test]
    fn table_interpolates() {
        let t = SampleTable::parse("# x f\n-1, 2\n0 0\n1,-inf\n").unwrap();
        assert_eq!(t.eval(-0.5), Some(1.0));
        assert_eq!(t.eval(0.0), Some(0.0));
        assert_eq!(t.eval(0.5), Some(f64::NEG_INFINITY));
        assert_eq!(t.eval(2.0), None);
        assert!(SampleTable::parse("0 1\n0 2\n").is_err());
    }

    #[test]
    fn zero_function_is_admissible() {
        let r = validate_hyp(&InitialDatum::expr("0").unwrap(), &params(0.1, 0.3, 0.1), 10.0).unwrap();
        assert!(r.passes());
    }

    #[test]
    fn parabola_fails_growth() {
        let p = params(1.0, 0.5, 1.0);
        let r = validate_hyp(&InitialDatum::expr("x^2").unwrap(), &p, 10.0).unwrap();
        assert!(!r.growth_ok());
        assert!(r.floor_ok());
        let (x, v, bound) = r.growth_violation.unwrap();
        assert!(v > bound && x.abs() <= 10.0);
        // At x = 3: 9 > 1 + 3^1.5 ~ 6.196
        assert!((p.growth_bound(3.0) - 6.196_152_422_706_632).abs() < 1e-12);
        assert!(9.0 > p.growth_bound(3.0));
    }

    #[test]
    fn minus_infinity_fails_floor() {
        let r = validate_hyp(&InitialDatum::expr("-inf").unwrap(), &params(1.0, 0.5, 1.0), 4.0).unwrap();
        assert!(r.growth_ok());
        assert!(!r.floor_ok());
    }

    #[test]
    fn validation_preconditions() {
        let p = params(1.0, 0.5, 1.0);
        assert!(validate_hyp(&InitialDatum::NarrowWedge { t0: 0.1 }, &p, 4.0).is_err());
        assert!(validate_hyp(&InitialDatum::expr("0").unwrap(), &p, 1.0).is_err());
    }

    #[test]
    fn validation_is_monotone() {
        let f = InitialDatum::expr("|x|^1.8 - 3 + x").unwrap();
        let mut last = (false, false);
        for (i, scale) in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0].iter().enumerate() {
            let r = validate_hyp(&f, &params(*scale, 0.3, *scale), 6.0).unwrap();
            let now = (r.growth_ok(), r.floor_ok());
            if i > 0 {
                assert!(now.0 >= last.0 && now.1 >= last.1);
            }
            last = now;
        }
        assert_eq!(last, (true, true));
    }

    #[test]
    fn moment_bounds() {
        let p = params(1.0, 0.5, 1.0);
        let probes: Vec<f64> = (-40..=40).map(|j| j as f64 * 0.25).collect();

        let zero = log_moment_bound(&InitialDatum::expr("0").unwrap(), 3, &probes, &p).unwrap();
        assert!(zero.satisfied);
        assert!(zero.values.iter().all(|v| *v == 0.0));

        let bm = log_moment_bound(&InitialDatum::Brownian { seed: 1 }, 2, &[4.0], &p).unwrap();
        assert_eq!(bm.values, vec![8.0]);
        assert!(bm.satisfied);

        let f = log_moment_bound(&InitialDatum::expr("|x|^1.5").unwrap(), 2, &probes, &p).unwrap();
        assert!(f.satisfied);
        assert_eq!((f.lambda_k, f.delta_k), (2.0, 0.5));
        assert!((f.values[0] - 2.0 * 10f64.powf(1.5)).abs() < 1e-9);

        assert!(log_moment_bound(&InitialDatum::NarrowWedge { t0: 0.1 }, 2, &probes, &p).is_err());
        assert!(!log_moment_bound(&InitialDatum::expr("x^2").unwrap(), 1, &probes, &p).unwrap().satisfied);
    }

    #[test]
    fn initial_fields() {
        let g = make_grid(-8.0, 8.0, 512, 0.0, 0.5, 100, false).unwrap();
        let ones = make_initial_field(&g, &InitialDatum::expr("0").unwrap()).unwrap();
        assert!(ones.values.iter().all(|v| *v == 1.0));

        let bm = make_initial_field(&g, &InitialDatum::Brownian { seed: 3 }).unwrap();
        assert_eq!(bm.values[g.origin_index().unwrap()], 1.0);
        assert!(bm.values.iter().all(|v| *v > 0.0));

        let hole = make_initial_field(&g, &InitialDatum::expr("-inf * |x|").unwrap()).unwrap();
        assert_eq!(hole.values[g.origin_index().unwrap()], 1.0);
        assert_eq!(hole.values[0], 0.0);

        assert!(matches!(
            make_initial_field(&g, &InitialDatum::expr("exp(x)^2").unwrap()),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn narrow_wedge_peak() {
        let t0 = 0.01;
        let g = make_grid(-8.0, 8.0, 512, t0, 1.01, 400, false).unwrap();
        let z = make_initial_field(&g, &InitialDatum::narrow_wedge(t0).unwrap()).unwrap();
        assert!((z.values[g.origin_index().unwrap()] - 3.989_42).abs() < 1e-5);
        assert_eq!(z.t_abs, t0);
        // t0 below 4 dt
        let coarse = make_grid(-8.0, 8.0, 512, t0, 1.01, 10, false).unwrap();
        assert!(make_initial_field(&coarse, &InitialDatum::NarrowWedge { t0 }).is_err());
    }

    #[test]
    fn brownian_increments_have_variance_dx() {
        let g = make_grid(-8.0, 8.0, 512, 0.0, 0.5, 10, false).unwrap();
        let mut acc = 0.0;
        let mut count = 0.0;
        for seed in 0..40 {
            let z = make_initial_field(&g, &InitialDatum::Brownian { seed }).unwrap();
            for w in z.values.windows(2) {
                acc += (w[1].ln() - w[0].ln()).powi(2);
                count += 1.0;
            }
        }
        let var = acc / count;
        // SE of a chi-square mean with ~20000 terms is dx * sqrt(2 / 20440) ~ 1% of dx.
        assert!((var / g.dx() - 1.0).abs() < 0.04, "{}", var / g.dx());
    }
}
