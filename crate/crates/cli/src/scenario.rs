//! Scenario files: parsing, overrides and validation.
//!
//! A scenario is a TOML document. Every problem found during validation is
//! collected, so a bad file is reported in one pass with the path of each
//! offending field.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use anyhow::Context;
use cocycle_lab::base::{
    periodic_base_points, PeriodicLeaf, SkewProduct, TorusAutomorphism, TrigPoly, TrigTerm,
};
use cocycle_lab::cocycle::{
    sampler_registry, CocycleField, Factor, LyapunovConfig, ScalarField, SkewCocycle,
};
use cocycle_lab::diagnostics::{MonotoneConfig, PinchingConfig, SearchConfig, TwistingConfig};
use cocycle_lab::cocycle::FrameConfig;
use cocycle_lab::seeding;
use cocycle_lab::symplectic::SymplecticMatrix;
use nalgebra::DMatrix;
use serde::Serialize;
use toml::{Table, Value};

/// Every validation problem in a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioErrors(pub Vec<String>);

impl fmt::Display for ScenarioErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario has {} problem(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioErrors {}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafSelector {
    pub period: u32,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumParams {
    pub iterations: usize,
    pub orbits: usize,
    pub burn_in: Option<usize>,
    pub sampler: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BunchingParams {
    pub horizon: usize,
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbParams {
    pub theta_start: f64,
    pub theta_steps: usize,
    pub eta: f64,
    pub kappa: f64,
    pub delta_total: f64,
    pub separation_delta: f64,
    pub bump_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepParams {
    /// `theta` for the rotation block, otherwise a dotted scenario path.
    pub parameter: String,
    pub values: Vec<f64>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub base: [[i64; 2]; 2],
    pub skew: SkewProduct,
    pub field: CocycleField,
    pub leaf: LeafSelector,
    pub homoclinic: Vec<usize>,
    pub spectrum: SpectrumParams,
    pub bunching: BunchingParams,
    pub pinching: PinchingConfig,
    pub twisting: TwistingConfig,
    pub monotone: MonotoneConfig,
    pub perturb: PerturbParams,
    pub sweep: SweepParams,
    /// The document after overrides, echoed in reports.
    pub document: Table,
}

/// Stream indices for per-stage seeds.
mod stream {
    pub const SPECTRUM: u64 = 1;
    pub const PINCHING: u64 = 2;
    pub const TWISTING: u64 = 3;
    pub const MONOTONE: u64 = 4;
    pub const PERTURB: u64 = 5;
    pub const FRAMES: u64 = 6;
}

impl Scenario {
    pub fn load(path: &Path, seed: Option<u64>, overrides: &[String]) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario {}", path.display()))?;
        Self::parse(&text, seed, overrides)
    }

    pub fn parse(text: &str, seed: Option<u64>, overrides: &[String]) -> anyhow::Result<Self> {
        let mut doc: Table = toml::from_str(text).context("scenario is not valid TOML")?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        if let Some(s) = seed {
            doc.insert("seed".into(), Value::Integer(s as i64));
        }
        Ok(validate(doc)?)
    }

    pub fn cocycle(&self) -> SkewCocycle {
        SkewCocycle::new(self.field.clone(), self.skew.clone())
    }

    pub fn leaf(&self) -> anyhow::Result<PeriodicLeaf> {
        let points = periodic_base_points(self.skew.base(), self.leaf.period)?;
        let point = points.get(self.leaf.index).copied().ok_or_else(|| {
            anyhow::anyhow!(
                "leaf.index {} out of range: {} points of period {}",
                self.leaf.index,
                points.len(),
                self.leaf.period
            )
        })?;
        Ok(PeriodicLeaf::new(&self.skew, point, self.leaf.period as usize)?)
    }

    pub fn lyapunov_config(&self) -> LyapunovConfig {
        LyapunovConfig {
            iterations: self.spectrum.iterations,
            orbits: self.spectrum.orbits,
            seed: seeding::derive(self.seed, stream::SPECTRUM),
            burn_in: self.spectrum.burn_in,
        }
    }

    pub fn pinching_config(&self) -> PinchingConfig {
        PinchingConfig {
            seed: seeding::derive(self.seed, stream::PINCHING),
            ..self.pinching
        }
    }

    pub fn twisting_config(&self) -> TwistingConfig {
        TwistingConfig {
            seed: seeding::derive(self.seed, stream::TWISTING),
            frame: FrameConfig {
                seed: seeding::derive(self.seed, stream::FRAMES),
                ..self.twisting.frame
            },
            ..self.twisting
        }
    }

    pub fn monotone_config(&self) -> MonotoneConfig {
        MonotoneConfig {
            seed: seeding::derive(self.seed, stream::MONOTONE),
            ..self.monotone
        }
    }

    pub fn search_config(&self) -> SearchConfig {
        let p = &self.perturb;
        SearchConfig {
            homoclinic_indices: self.homoclinic.clone(),
            pinching: self.pinching_config(),
            twisting: self.twisting_config(),
            global: self.lyapunov_config(),
            theta_schedule: cocycle_lab::diagnostics::theta_schedule(p.theta_start, p.theta_steps),
            generic_eta: p.eta,
            generic_kappa: p.kappa,
            delta_total: p.delta_total,
            separation_delta: p.separation_delta,
            bump_radius: p.bump_radius,
            bunching_horizon: self.bunching.horizon,
            bunching_grid: self.bunching.grid,
            sampler: self.spectrum.sampler.clone(),
            seed: seeding::derive(self.seed, stream::PERTURB),
        }
    }
}

/// Parse `a.b.0.c=value` and write it into the document.
pub fn apply_override(doc: &mut Table, spec: &str) -> anyhow::Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| anyhow::anyhow!("override '{spec}' is not of the form key=value"))?;
    let path = path.trim();
    if path.is_empty() {
        anyhow::bail!("override '{spec}' has an empty key");
    }
    let value = parse_value(raw.trim());
    set_path(doc, path, value).with_context(|| format!("cannot apply override '{spec}'"))
}

fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Write `value` at a dotted path; numeric segments index arrays.
pub fn set_path(doc: &mut Table, path: &str, value: Value) -> anyhow::Result<()> {
    let segs: Vec<&str> = path.split('.').collect();
    let mut cur: &mut Value = doc
        .entry(segs[0].to_string())
        .or_insert_with(|| if segs.len() > 1 { Value::Table(Table::new()) } else { Value::Boolean(false) });
    for (i, seg) in segs.iter().enumerate().skip(1) {
        let last = i + 1 == segs.len();
        cur = match cur {
            Value::Table(t) => t
                .entry(seg.to_string())
                .or_insert_with(|| if last { Value::Boolean(false) } else { Value::Table(Table::new()) }),
            Value::Array(a) => {
                let k: usize = seg
                    .parse()
                    .map_err(|_| anyhow::anyhow!("'{seg}' is not an array index"))?;
                let len = a.len();
                a.get_mut(k)
                    .ok_or_else(|| anyhow::anyhow!("index {k} out of range (length {len})"))?
            }
            _ => anyhow::bail!("'{}' is not a table or array", segs[..i].join(".")),
        };
    }
    *cur = value;
    Ok(())
}

/// Collects errors while reading typed values with defaults.
struct Checker {
    errors: Vec<String>,
}

impl Checker {
    fn err(&mut self, path: &str, msg: impl fmt::Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn keys(&mut self, t: &Table, path: &str, allowed: &[&str]) {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for k in t.keys() {
            if !allowed.contains(k.as_str()) {
                let at = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                self.err(&at, format!("unknown key (expected one of: {})", allowed.iter().copied().collect::<Vec<_>>().join(", ")));
            }
        }
    }

    fn section<'a>(&mut self, doc: &'a Table, key: &str, allowed: &[&str]) -> Option<&'a Table> {
        match doc.get(key) {
            None => None,
            Some(Value::Table(t)) => {
                self.keys(t, key, allowed);
                Some(t)
            }
            Some(_) => {
                self.err(key, "expected a table");
                None
            }
        }
    }

    fn float(&mut self, t: Option<&Table>, path: &str, key: &str, default: f64, ok: impl Fn(f64) -> bool, rule: &str) -> f64 {
        let at = format!("{path}.{key}");
        match t.and_then(|t| t.get(key)) {
            None => default,
            Some(v) => match as_f64(v) {
                Some(x) if x.is_finite() && ok(x) => x,
                Some(x) => {
                    self.err(&at, format!("{x} violates {rule}"));
                    default
                }
                None => {
                    self.err(&at, "expected a number");
                    default
                }
            },
        }
    }

    fn int(&mut self, t: Option<&Table>, path: &str, key: &str, default: i64, min: i64) -> i64 {
        let at = format!("{path}.{key}");
        match t.and_then(|t| t.get(key)) {
            None => default,
            Some(Value::Integer(x)) if *x >= min => *x,
            Some(Value::Integer(x)) => {
                self.err(&at, format!("{x} is below the minimum {min}"));
                default
            }
            Some(_) => {
                self.err(&at, "expected an integer");
                default
            }
        }
    }

    fn string(&mut self, t: Option<&Table>, path: &str, key: &str, default: &str) -> String {
        match t.and_then(|t| t.get(key)) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => {
                self.err(&format!("{path}.{key}"), "expected a string");
                default.to_string()
            }
        }
    }

    fn float_list(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let Value::Array(a) = v else {
            self.err(path, "expected an array of numbers");
            return None;
        };
        let out: Option<Vec<f64>> = a.iter().map(as_f64).collect();
        if out.is_none() {
            self.err(path, "expected an array of numbers");
        }
        out
    }

    fn int_list(&mut self, v: &Value, path: &str) -> Option<Vec<i64>> {
        let Value::Array(a) = v else {
            self.err(path, "expected an array of integers");
            return None;
        };
        let out: Option<Vec<i64>> = a.iter().map(Value::as_integer).collect();
        if out.is_none() {
            self.err(path, "expected an array of integers");
        }
        out
    }

    fn matrix(&mut self, v: &Value, path: &str, n: usize) -> Option<DMatrix<f64>> {
        let Value::Array(rows) = v else {
            self.err(path, format!("expected a {n}×{n} array of rows"));
            return None;
        };
        if rows.len() != n {
            self.err(path, format!("expected {n} rows, found {}", rows.len()));
            return None;
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            let row = self.float_list(r, &format!("{path}[{i}]"))?;
            if row.len() != n {
                self.err(&format!("{path}[{i}]"), format!("expected {n} entries, found {}", row.len()));
                return None;
            }
            for (j, x) in row.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Some(m)
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn trig_poly(ck: &mut Checker, t: &Table, path: &str, dim: usize) -> Option<TrigPoly> {
    let constant = ck.float(Some(t), path, "constant", 0.0, |_| true, "finiteness");
    let mut terms = Vec::new();
    match t.get("terms") {
        None => {}
        Some(Value::Array(a)) => {
            for (i, term) in a.iter().enumerate() {
                let at = format!("{path}.terms[{i}]");
                let Value::Table(tt) = term else {
                    ck.err(&at, "expected a table with wave, cos, sin");
                    continue;
                };
                ck.keys(tt, &at, &["wave", "cos", "sin"]);
                let wave = match tt.get("wave") {
                    Some(w) => ck.int_list(w, &format!("{at}.wave")),
                    None => {
                        ck.err(&format!("{at}.wave"), "missing");
                        None
                    }
                };
                let cos = ck.float(Some(tt), &at, "cos", 0.0, |_| true, "finiteness");
                let sin = ck.float(Some(tt), &at, "sin", 0.0, |_| true, "finiteness");
                if let Some(w) = wave {
                    if w.len() != dim {
                        ck.err(&format!("{at}.wave"), format!("expected {dim} integers, found {}", w.len()));
                    } else {
                        terms.push(TrigTerm { wave: w, cos, sin });
                    }
                }
            }
        }
        Some(_) => ck.err(&format!("{path}.terms"), "expected an array of tables"),
    }
    Some(TrigPoly::new(dim, constant, terms))
}

fn factor(ck: &mut Checker, v: &Value, path: &str, d: usize) -> Option<Factor> {
    let Value::Table(t) = v else {
        ck.err(path, "expected a table");
        return None;
    };
    let kind = ck.string(Some(t), path, "kind", "");
    let n = 2 * d;
    match kind.as_str() {
        "fixed" => {
            ck.keys(t, path, &["kind", "matrix"]);
            let m = match t.get("matrix") {
                Some(m) => ck.matrix(m, &format!("{path}.matrix"), n)?,
                None => {
                    ck.err(&format!("{path}.matrix"), "missing");
                    return None;
                }
            };
            match SymplecticMatrix::new(m) {
                Ok(matrix) => Some(Factor::Fixed { matrix }),
                Err(e) => {
                    ck.err(&format!("{path}.matrix"), e);
                    None
                }
            }
        }
        "rotation" => {
            ck.keys(t, path, &["kind", "angle"]);
            let angle = ck.float(Some(t), path, "angle", 0.0, |_| true, "finiteness");
            Some(Factor::Fixed {
                matrix: SymplecticMatrix::block_rotation(d, angle),
            })
        }
        "exp" => {
            ck.keys(t, path, &["kind", "generator", "scale", "field"]);
            let generator = match t.get("generator") {
                Some(m) => ck.matrix(m, &format!("{path}.generator"), n),
                None => {
                    ck.err(&format!("{path}.generator"), "missing");
                    None
                }
            };
            let scale = ck.float(Some(t), path, "scale", 1.0, |_| true, "finiteness");
            let fpath = format!("{path}.field");
            let field = match t.get("field") {
                Some(Value::Table(ft)) => {
                    let fk = ck.string(Some(ft), &fpath, "kind", "");
                    match fk.as_str() {
                        "trig" => {
                            ck.keys(ft, &fpath, &["kind", "constant", "terms"]);
                            trig_poly(ck, ft, &fpath, 3).map(|poly| ScalarField::Trig { poly })
                        }
                        "coordinate" => {
                            ck.keys(ft, &fpath, &["kind", "index"]);
                            let index = ck.int(Some(ft), &fpath, "index", 0, 0);
                            if index > 2 {
                                ck.err(&format!("{fpath}.index"), "must be 0, 1 (base) or 2 (fiber)");
                                None
                            } else {
                                Some(ScalarField::Coordinate { index: index as usize })
                            }
                        }
                        other => {
                            ck.err(&format!("{fpath}.kind"), format!("'{other}' is not one of: trig, coordinate"));
                            None
                        }
                    }
                }
                Some(_) => {
                    ck.err(&fpath, "expected a table");
                    None
                }
                None => {
                    ck.err(&fpath, "missing");
                    None
                }
            };
            Some(Factor::Exp {
                generator: generator? * scale,
                field: field?,
            })
        }
        other => {
            ck.err(&format!("{path}.kind"), format!("'{other}' is not one of: fixed, rotation, exp"));
            None
        }
    }
}

const TOP_KEYS: &[&str] = &[
    "name", "seed", "base", "cocycle", "leaf", "homoclinic", "spectrum", "bunching", "pinching",
    "twisting", "monotone", "perturb", "sweep",
];

pub fn validate(doc: Table) -> Result<Scenario, ScenarioErrors> {
    let mut ck = Checker { errors: Vec::new() };
    ck.keys(&doc, "", TOP_KEYS);
    let name = ck.string(Some(&doc), "", "name", "unnamed").trim_start_matches('.').to_string();
    let seed = match doc.get("seed") {
        Some(Value::Integer(s)) if *s >= 0 => *s as u64,
        Some(_) => {
            ck.err("seed", "expected a non-negative integer");
            0
        }
        None => {
            ck.err("seed", "missing; every scenario must state its master seed");
            0
        }
    };

    // base
    let base_t = ck.section(&doc, "base", &["matrix", "theta"]);
    let mut base = [[2, 1], [1, 1]];
    let mut automorphism = None;
    match base_t.and_then(|t| t.get("matrix")) {
        None => ck.err("base.matrix", "missing"),
        Some(v) => {
            if let Some(m) = ck.matrix(v, "base.matrix", 2) {
                if m.iter().any(|x| x.fract() != 0.0) {
                    ck.err("base.matrix", "entries must be integers");
                } else {
                    base = [[m[(0, 0)] as i64, m[(0, 1)] as i64], [m[(1, 0)] as i64, m[(1, 1)] as i64]];
                    match TorusAutomorphism::new(base) {
                        Ok(g) => automorphism = Some(g),
                        Err(e) => ck.err("base.matrix", e),
                    }
                }
            }
        }
    }
    let theta = match base_t.and_then(|t| t.get("theta")) {
        None => Some(TrigPoly::zero(2)),
        Some(Value::Table(tt)) => {
            ck.keys(tt, "base.theta", &["constant", "terms"]);
            trig_poly(&mut ck, tt, "base.theta", 2)
        }
        Some(_) => {
            ck.err("base.theta", "expected a table");
            None
        }
    };

    // cocycle
    let ct = ck.section(&doc, "cocycle", &["half_dim", "alpha", "factors"]);
    if ct.is_none() {
        ck.err("cocycle", "missing");
    }
    let d = ck.int(ct, "cocycle", "half_dim", 1, 1) as usize;
    let alpha = ck.float(ct, "cocycle", "alpha", 1.0, |a| a > 0.0 && a <= 1.0, "α ∈ (0, 1]");
    let mut factors = Vec::new();
    match ct.and_then(|t| t.get("factors")) {
        None => {}
        Some(Value::Array(a)) => {
            for (i, f) in a.iter().enumerate() {
                if let Some(f) = factor(&mut ck, f, &format!("cocycle.factors[{i}]"), d) {
                    factors.push(f);
                }
            }
        }
        Some(_) => ck.err("cocycle.factors", "expected an array of tables"),
    }
    let field = match CocycleField::new(d, factors, alpha) {
        Ok(f) => Some(f),
        Err(e) => {
            ck.err("cocycle", e);
            None
        }
    };

    // leaf, homoclinic
    let lt = ck.section(&doc, "leaf", &["period", "index"]);
    let leaf = LeafSelector {
        period: ck.int(lt, "leaf", "period", 1, 1).min(u32::MAX as i64) as u32,
        index: ck.int(lt, "leaf", "index", 0, 0) as usize,
    };
    let ht = ck.section(&doc, "homoclinic", &["indices"]);
    let homoclinic = match ht.and_then(|t| t.get("indices")) {
        None => vec![0],
        Some(v) => match ck.int_list(v, "homoclinic.indices") {
            Some(l) if l.iter().all(|&i| i >= 0) && !l.is_empty() => l.into_iter().map(|i| i as usize).collect(),
            Some(_) => {
                ck.err("homoclinic.indices", "expected a non-empty list of non-negative integers");
                vec![0]
            }
            None => vec![0],
        },
    };

    // test parameters
    let st = ck.section(&doc, "spectrum", &["iterations", "orbits", "burn_in", "sampler"]);
    let sampler = ck.string(st, "spectrum", "sampler", "lebesgue");
    let names: Vec<&str> = sampler_registry::<cocycle_lab::base::SkewPoint>().iter().map(|s| s.name()).collect();
    if !names.contains(&sampler.as_str()) {
        ck.err("spectrum.sampler", format!("'{sampler}' is not one of: {}", names.join(", ")));
    }
    let spectrum = SpectrumParams {
        iterations: ck.int(st, "spectrum", "iterations", 100_000, 10) as usize,
        orbits: ck.int(st, "spectrum", "orbits", 8, 2) as usize,
        burn_in: st.and_then(|t| t.get("burn_in")).map(|_| ck.int(st, "spectrum", "burn_in", 0, 0) as usize),
        sampler,
    };
    let bt = ck.section(&doc, "bunching", &["horizon", "grid"]);
    let bunching = BunchingParams {
        horizon: ck.int(bt, "bunching", "horizon", 20, 10) as usize,
        grid: ck.int(bt, "bunching", "grid", 4, 1) as usize,
    };
    let pt = ck.section(&doc, "pinching", &["iterations", "orbits", "grid"]);
    let pd = PinchingConfig::default();
    let pinching = PinchingConfig {
        iterations: ck.int(pt, "pinching", "iterations", pd.iterations as i64, 10) as usize,
        orbits: ck.int(pt, "pinching", "orbits", pd.orbits as i64, 2) as usize,
        grid: ck.int(pt, "pinching", "grid", pd.grid as i64, 4) as usize,
        seed: 0,
    };
    let tt = ck.section(
        &doc,
        "twisting",
        &["j_max", "samples", "epsilon_angle", "floor", "frame_iterations", "gap_tol"],
    );
    let td = TwistingConfig::default();
    let twisting = TwistingConfig {
        j_max: ck.int(tt, "twisting", "j_max", td.j_max as i64, 1) as usize,
        samples: ck.int(tt, "twisting", "samples", td.samples as i64, 1) as usize,
        epsilon_angle: ck.float(tt, "twisting", "epsilon_angle", td.epsilon_angle, |x| x > 0.0, "ε_angle > 0"),
        floor: ck.float(tt, "twisting", "floor", td.floor, |x| x > 0.0 && x <= 1.0, "floor ∈ (0, 1]"),
        seed: 0,
        frame: FrameConfig {
            iterations: ck.int(tt, "twisting", "frame_iterations", td.frame.iterations as i64, 2) as usize,
            gap_tol: ck.float(tt, "twisting", "gap_tol", td.frame.gap_tol, |x| x >= 0.0, "gap_tol ≥ 0"),
            seed: 0,
        },
    };
    let mt = ck.section(&doc, "monotone", &["epsilon", "grid", "directions", "window"]);
    let md = MonotoneConfig::default();
    let monotone = MonotoneConfig {
        epsilon: ck.float(mt, "monotone", "epsilon", md.epsilon, |x| x > 0.0, "ε > 0"),
        grid: ck.int(mt, "monotone", "grid", md.grid as i64, 2) as usize,
        directions: ck.int(mt, "monotone", "directions", md.directions as i64, 1) as usize,
        window: ck.float(mt, "monotone", "window", md.window, |x| x > 0.0 && x <= 1.0, "window ∈ (0, 1]"),
        seed: 0,
    };
    let ut = ck.section(
        &doc,
        "perturb",
        &["theta_start", "theta_steps", "eta", "kappa", "delta_total", "separation_delta", "bump_radius"],
    );
    let sd = SearchConfig::default();
    let perturb = PerturbParams {
        theta_start: ck.float(ut, "perturb", "theta_start", 0.5, |x| x > 0.0, "θ₀ > 0"),
        theta_steps: ck.int(ut, "perturb", "theta_steps", 6, 1) as usize,
        eta: ck.float(ut, "perturb", "eta", sd.generic_eta, |x| x > 0.0, "η > 0"),
        kappa: ck.float(ut, "perturb", "kappa", sd.generic_kappa, |x| x > 0.0 && x != 1.0, "κ > 0, κ ≠ 1"),
        delta_total: ck.float(ut, "perturb", "delta_total", sd.delta_total, |x| x > 0.0, "δ_total > 0"),
        separation_delta: ck.float(ut, "perturb", "separation_delta", sd.separation_delta, |x| x > 0.0, "δ > 0"),
        bump_radius: ck.float(ut, "perturb", "bump_radius", sd.bump_radius, |x| x > 0.0 && x < 0.5, "radius ∈ (0, 0.5)"),
    };
    let wt = ck.section(&doc, "sweep", &["parameter", "values", "start", "stop", "count"]);
    let parameter = ck.string(wt, "sweep", "parameter", "theta");
    let values = match (wt.and_then(|t| t.get("values")), wt.map(|t| t.contains_key("start"))) {
        (Some(v), _) => ck.float_list(v, "sweep.values").unwrap_or_default(),
        (None, Some(true)) => {
            let start = ck.float(wt, "sweep", "start", 0.0, |_| true, "finiteness");
            let stop = ck.float(wt, "sweep", "stop", 0.5, |_| true, "finiteness");
            let count = ck.int(wt, "sweep", "count", 11, 2) as usize;
            (0..count)
                .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                .collect()
        }
        _ => (0..=10).map(|k| 0.05 * k as f64).collect(),
    };
    if values.is_empty() {
        ck.err("sweep.values", "the sweep grid is empty");
    }
    if parameter != "theta" {
        let mut probe = doc.clone();
        if set_path(&mut probe, &parameter, Value::Float(0.0)).is_err() || lookup(&doc, &parameter).is_none() {
            ck.err("sweep.parameter", format!("'{parameter}' is neither 'theta' nor an existing numeric field"));
        }
    }
    let sweep = SweepParams { parameter, values };

    if !ck.errors.is_empty() {
        return Err(ScenarioErrors(ck.errors));
    }
    let skew = SkewProduct::new(automorphism.expect("validated"), theta.expect("validated"));
    Ok(Scenario {
        name,
        seed,
        base,
        skew,
        field: field.expect("validated"),
        leaf,
        homoclinic,
        spectrum,
        bunching,
        pinching,
        twisting,
        monotone,
        perturb,
        sweep,
        document: doc,
    })
}

/// Numeric value at a dotted path.
pub fn lookup(doc: &Table, path: &str) -> Option<f64> {
    let mut segs = path.split('.');
    let mut cur = doc.get(segs.next()?)?;
    for seg in segs {
        cur = match cur {
            Value::Table(t) => t.get(seg)?,
            Value::Array(a) => a.get(seg.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    as_f64(cur)
}
