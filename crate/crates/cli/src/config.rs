//! Scenario files: JSON with a `kind` tag, validated field by field.
//!
//! Every problem is collected with its key path instead of stopping at the
//! first one. Values are normalized to atomic units on the way in.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use qfield_core::constants::units;
use qfield_core::pulse::{Envelope, PulseSpec, DEFAULT_BOX_FACTOR, DEFAULT_SPECTRAL_FLOOR};
use qfield_core::FieldModeState;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Default)]
struct Issues(RefCell<Vec<Issue>>);

impl Issues {
    fn push(&self, path: String, message: impl Into<String>) {
        self.0.borrow_mut().push(Issue {
            path,
            message: message.into(),
        });
    }
}

struct Obj<'a> {
    map: &'a Map<String, Value>,
    path: String,
    seen: RefCell<Vec<&'static str>>,
    issues: &'a Issues,
}

impl<'a> Obj<'a> {
    fn new(value: &'a Value, path: String, issues: &'a Issues) -> Option<Self> {
        match value.as_object() {
            Some(map) => Some(Self {
                map,
                path,
                seen: RefCell::new(Vec::new()),
                issues,
            }),
            None => {
                issues.push(display_path(&path), "expected an object");
                None
            }
        }
    }

    fn at(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn get(&self, key: &'static str) -> Option<&'a Value> {
        self.seen.borrow_mut().push(key);
        self.map.get(key)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn issue(&self, key: &str, message: impl Into<String>) {
        self.issues.push(self.at(key), message);
    }

    fn missing(&self, key: &str) {
        self.issue(key, "missing required key");
    }

    /// Required number; NaN after reporting if absent or not a number.
    fn num(&self, key: &'static str) -> f64 {
        match self.get(key) {
            None => {
                self.missing(key);
                f64::NAN
            }
            Some(v) => self.as_num(key, v),
        }
    }

    fn num_or(&self, key: &'static str, default: f64) -> f64 {
        match self.get(key) {
            None => default,
            Some(v) => self.as_num(key, v),
        }
    }

    fn as_num(&self, key: &str, v: &Value) -> f64 {
        match v.as_f64() {
            Some(x) if x.is_finite() => x,
            _ => {
                self.issue(key, format!("expected a finite number, got {v}"));
                f64::NAN
            }
        }
    }

    fn int(&self, key: &'static str) -> usize {
        match self.get(key) {
            None => {
                self.missing(key);
                0
            }
            Some(v) => self.as_int(key, v),
        }
    }

    fn int_or(&self, key: &'static str, default: usize) -> usize {
        self.get(key).map_or(default, |v| self.as_int(key, v))
    }

    fn as_int(&self, key: &str, v: &Value) -> usize {
        match v.as_u64() {
            Some(x) => x as usize,
            None => {
                self.issue(key, format!("expected a non-negative integer, got {v}"));
                0
            }
        }
    }

    fn list(&self, key: &'static str) -> Vec<&'a Value> {
        match self.get(key) {
            None => {
                self.missing(key);
                Vec::new()
            }
            Some(Value::Array(a)) if !a.is_empty() => a.iter().collect(),
            Some(v) => {
                self.issue(key, format!("expected a non-empty array, got {v}"));
                Vec::new()
            }
        }
    }

    fn num_list(&self, key: &'static str) -> Vec<f64> {
        self.list(key)
            .into_iter()
            .enumerate()
            .map(|(i, v)| self.as_num(&format!("{key}[{i}]"), v))
            .collect()
    }

    fn int_list(&self, key: &'static str) -> Vec<usize> {
        self.list(key)
            .into_iter()
            .enumerate()
            .map(|(i, v)| self.as_int(&format!("{key}[{i}]"), v))
            .collect()
    }

    fn text(&self, key: &'static str) -> Option<&'a str> {
        match self.get(key) {
            None => {
                self.missing(key);
                None
            }
            Some(Value::String(s)) => Some(s.as_str()),
            Some(v) => {
                self.issue(key, format!("expected a string, got {v}"));
                None
            }
        }
    }

    fn obj(&self, key: &'static str) -> Option<Obj<'a>> {
        match self.get(key) {
            None => {
                self.missing(key);
                None
            }
            Some(v) => Obj::new(v, self.at(key), self.issues),
        }
    }

    fn opt_obj(&self, key: &'static str) -> Option<Obj<'a>> {
        self.get(key).and_then(|v| Obj::new(v, self.at(key), self.issues))
    }

    fn positive(&self, key: &str, v: f64) -> f64 {
        if v <= 0.0 {
            self.issue(key, format!("must be > 0, got {v}"));
        }
        v
    }

    fn non_negative(&self, key: &str, v: f64) -> f64 {
        if v < 0.0 {
            self.issue(key, format!("must be >= 0, got {v}"));
        }
        v
    }

    /// Exactly one of the keys must be present; returns its name.
    fn one_of(&self, keys: &[&'static str]) -> Option<&'static str> {
        let present: Vec<&'static str> = keys.iter().copied().filter(|k| self.has(k)).collect();
        match present.as_slice() {
            [k] => Some(k),
            [] => {
                self.issues
                    .push(self.at(&keys.join("|")), format!("missing required key (one of {})", keys.join(", ")));
                None
            }
            _ => {
                self.issues
                    .push(self.at(&present.join("|")), "keys are alternatives; give only one");
                for k in present {
                    self.get(k);
                }
                None
            }
        }
    }

    fn finish(self) {
        let seen = self.seen.borrow();
        for key in self.map.keys() {
            if !seen.iter().any(|s| s == key) {
                self.issues.push(self.at(key), "unknown key");
            }
        }
    }
}

fn display_path(path: &str) -> String {
    if path.is_empty() {
        "<root>".into()
    } else {
        path.into()
    }
}

/// Keys that replace one another when merging overrides.
const ALTERNATIVES: &[&[&str]] = &[
    &["omega", "lambda_nm"],
    &["energy_j", "energy_uj"],
    &["waist_m", "waist_um"],
    &["t_box", "t_box_fs", "t_box_factor"],
    &["stop", "cycles"],
    &["lo_rel", "lo_nm"],
    &["hi_rel", "hi_nm"],
    &["a0", "e0"],
];

/// Applies `path=value` overrides. The value is parsed as JSON and falls
/// back to a plain string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), Issue> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| Issue {
        path: assignment.into(),
        message: "override must look like key.path=value".into(),
    })?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Issue {
            path: path.into(),
            message: "empty key in override path".into(),
        });
    }
    let mut node = root;
    for (i, key) in keys.iter().enumerate() {
        if !node.is_object() {
            return Err(Issue {
                path: keys[..i].join("."),
                message: "cannot set a key inside a non-object".into(),
            });
        }
        let map = node.as_object_mut().unwrap();
        if i + 1 == keys.len() {
            for group in ALTERNATIVES {
                if group.contains(key) {
                    for other in group.iter().filter(|o| *o != key) {
                        map.remove(*other);
                    }
                }
            }
            map.insert(key.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectronSpec {
    pub sigma_x: f64,
    pub p0: f64,
    pub x0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Explicit sample times; when present start/stop/points describe them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        match &self.values {
            Some(v) => v.clone(),
            None => (0..self.points)
                .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.points - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StateSpec {
    Vacuum,
    Coherent { alpha: [f64; 2] },
    Squeezed { alpha: [f64; 2], r: f64, theta: f64 },
    Fock { n: u32 },
    Thermal { temperature: f64 },
}

impl StateSpec {
    pub fn to_state(self) -> FieldModeState {
        match self {
            Self::Vacuum => FieldModeState::Vacuum,
            Self::Coherent { alpha } => FieldModeState::coherent(alpha[0], alpha[1]),
            Self::Squeezed { alpha, r, theta } => FieldModeState::SqueezedCoherent {
                alpha: C64::new(alpha[0], alpha[1]),
                r,
                theta,
            },
            Self::Fock { n } => FieldModeState::Fock { n },
            Self::Thermal { temperature } => FieldModeState::Thermal { temperature },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvelopeSpec {
    Sin2,
    Flat,
    Gaussian { fwhm: f64 },
}

/// Pulse parameters in atomic units, except the wavelength (nm) and energy (J)
/// which the quantizer takes directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseConfig {
    pub lambda0_nm: f64,
    pub omega0: f64,
    pub n_cycles: f64,
    pub envelope: EnvelopeSpec,
    pub energy_j: f64,
    pub cep: f64,
    pub waist_m: f64,
    pub t_box: f64,
    pub n_modes: usize,
    pub spectral_floor: f64,
}

impl PulseConfig {
    pub fn to_spec(&self) -> PulseSpec {
        PulseSpec {
            lambda0_nm: self.lambda0_nm,
            n_cycles: self.n_cycles,
            envelope: match self.envelope {
                EnvelopeSpec::Sin2 => Envelope::Sin2,
                EnvelopeSpec::Flat => Envelope::Flat,
                EnvelopeSpec::Gaussian { fwhm } => Envelope::Gaussian { fwhm },
            },
            energy_j: self.energy_j,
            cep: self.cep,
            waist_m: self.waist_m,
            t_box: self.t_box,
            n_modes: self.n_modes,
            spectral_floor: self.spectral_floor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min_points: usize,
    /// Explicit (points, dp); overrides the automatic choice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit: Option<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WaveformSpec {
    /// A(t) = a0 cos(ωt + phase).
    Monochromatic { a0: f64, omega: f64, phase: f64 },
    Pulse(PulseConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    SingleMode {
        omega: f64,
        gamma: f64,
        r_list: Vec<f64>,
        theta: f64,
        alpha: [f64; 2],
        electron: ElectronSpec,
        t_grid: TimeGrid,
    },
    ZeroMean {
        omega: f64,
        gamma: f64,
        bsv_r: f64,
        bsv_theta_list: Vec<f64>,
        fock_n_list: Vec<u32>,
        thermal_t: f64,
        electron: ElectronSpec,
        t_grid: TimeGrid,
    },
    Multimode {
        pulse: PulseConfig,
        r_list: Vec<f64>,
        theta: f64,
        /// Squeezed band in a.u.; all modes when absent.
        band: Option<(f64, f64)>,
        electron: ElectronSpec,
        t_grid: TimeGrid,
    },
    OracleCompare {
        omega: f64,
        gamma: f64,
        state: StateSpec,
        electron: ElectronSpec,
        t_grid: TimeGrid,
        /// None searches for the smallest truncation with enough headroom.
        n_fock: Option<usize>,
        grid: GridSpec,
        tolerance: f64,
    },
    Classical {
        waveform: WaveformSpec,
        x0: f64,
        p0: f64,
        t_grid: TimeGrid,
    },
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::SingleMode { .. } => "single_mode",
            Self::ZeroMean { .. } => "zero_mean",
            Self::Multimode { .. } => "multimode",
            Self::OracleCompare { .. } => "oracle_compare",
            Self::Classical { .. } => "classical",
        }
    }
}

pub const KINDS: [&str; 5] = ["single_mode", "zero_mean", "multimode", "oracle_compare", "classical"];

fn frequency(o: &Obj) -> f64 {
    match o.one_of(&["omega", "lambda_nm"]) {
        Some("omega") => {
            let w = o.num("omega");
            o.positive("omega", w)
        }
        Some(_) => {
            let l = o.num("lambda_nm");
            units::wavelength_nm_to_omega(o.positive("lambda_nm", l))
        }
        None => f64::NAN,
    }
}

fn electron(o: &Obj) -> ElectronSpec {
    let Some(e) = o.obj("electron") else {
        return ElectronSpec {
            sigma_x: f64::NAN,
            p0: 0.0,
            x0: 0.0,
        };
    };
    let sigma_x = e.num("sigma_x");
    let spec = ElectronSpec {
        sigma_x: e.positive("sigma_x", sigma_x),
        p0: e.num_or("p0", 0.0),
        x0: e.num_or("x0", 0.0),
    };
    e.finish();
    spec
}

/// `{start, stop, points}`, `{start, cycles, points}` (cycles of `omega_ref`) or `{values}`.
fn time_grid(o: &Obj, omega_ref: f64) -> TimeGrid {
    let bad = TimeGrid {
        start: 0.0,
        stop: 0.0,
        points: 0,
        values: None,
    };
    let Some(g) = o.obj("t_grid") else { return bad };
    let grid = if g.has("values") {
        let v = g.num_list("values");
        for (i, w) in v.windows(2).enumerate() {
            if w[1] <= w[0] {
                g.issue(&format!("values[{}]", i + 1), "times must be strictly increasing");
                break;
            }
        }
        if v.first().is_some_and(|&t| t < 0.0) {
            g.issue("values[0]", "times must be >= 0");
        }
        TimeGrid {
            start: v.first().copied().unwrap_or(0.0),
            stop: v.last().copied().unwrap_or(0.0),
            points: v.len(),
            values: Some(v),
        }
    } else {
        let start = g.num_or("start", 0.0);
        g.non_negative("start", start);
        let stop = match g.one_of(&["stop", "cycles"]) {
            Some("stop") => g.num("stop"),
            Some(_) => {
                let c = g.num("cycles");
                start + g.positive("cycles", c) * 2.0 * PI / omega_ref
            }
            None => f64::NAN,
        };
        let points = g.int("points");
        if points < 2 {
            g.issue("points", format!("must be >= 2, got {points}"));
        }
        if stop <= start {
            g.issue("stop", format!("must exceed start ({start}), got {stop}"));
        }
        TimeGrid {
            start,
            stop,
            points,
            values: None,
        }
    };
    g.finish();
    grid
}

fn theta_value(o: &Obj, key: &'static str) -> f64 {
    o.num(key)
}

fn r_list(o: &Obj) -> Vec<f64> {
    let r = o.num_list("r_list");
    for (i, &x) in r.iter().enumerate() {
        o.non_negative(&format!("r_list[{i}]"), x);
    }
    r
}

fn pair(o: &Obj, key: &'static str) -> [f64; 2] {
    match o.get(key) {
        None => [0.0, 0.0],
        Some(Value::Array(a)) if a.len() == 2 => [o.as_num(&format!("{key}[0]"), &a[0]), o.as_num(&format!("{key}[1]"), &a[1])],
        Some(v) => {
            o.issue(key, format!("expected [re, im], got {v}"));
            [f64::NAN, f64::NAN]
        }
    }
}

fn pulse(o: &Obj) -> PulseConfig {
    let lambda0_nm = o.num("lambda0_nm");
    o.positive("lambda0_nm", lambda0_nm);
    let omega0 = units::wavelength_nm_to_omega(lambda0_nm);
    let n_cycles = o.num("n_cycles");
    o.positive("n_cycles", n_cycles);
    let envelope = match o.get("envelope") {
        None => {
            o.missing("envelope");
            EnvelopeSpec::Sin2
        }
        Some(Value::String(s)) if s == "sin2" => EnvelopeSpec::Sin2,
        Some(Value::String(s)) if s == "flat" => EnvelopeSpec::Flat,
        Some(v @ Value::Object(_)) => match Obj::new(v, o.at("envelope"), o.issues) {
            Some(e) => {
                let kind = e.text("type");
                let spec = match kind {
                    Some("gaussian") => {
                        let fwhm = match e.one_of(&["fwhm", "fwhm_fs"]) {
                            Some("fwhm") => e.num("fwhm"),
                            Some(_) => units::fs_to_au(e.num("fwhm_fs")),
                            None => f64::NAN,
                        };
                        EnvelopeSpec::Gaussian {
                            fwhm: e.positive("fwhm", fwhm),
                        }
                    }
                    Some("sin2") => EnvelopeSpec::Sin2,
                    Some("flat") => EnvelopeSpec::Flat,
                    Some(other) => {
                        e.issue("type", format!("expected sin2, flat or gaussian, got \"{other}\""));
                        EnvelopeSpec::Sin2
                    }
                    None => EnvelopeSpec::Sin2,
                };
                e.finish();
                spec
            }
            None => EnvelopeSpec::Sin2,
        },
        Some(v) => {
            o.issue("envelope", format!("expected \"sin2\", \"flat\" or {{\"type\": \"gaussian\", \"fwhm_fs\": ..}}, got {v}"));
            EnvelopeSpec::Sin2
        }
    };
    let energy_j = match o.one_of(&["energy_j", "energy_uj"]) {
        Some("energy_j") => o.num("energy_j"),
        Some(_) => o.num("energy_uj") * 1e-6,
        None => f64::NAN,
    };
    o.positive("energy", energy_j);
    let waist_m = match o.one_of(&["waist_m", "waist_um"]) {
        Some("waist_m") => o.num("waist_m"),
        Some(_) => o.num("waist_um") * 1e-6,
        None => f64::NAN,
    };
    o.positive("waist", waist_m);
    let duration = n_cycles * 2.0 * PI / omega0;
    let t_box = if o.has("t_box") || o.has("t_box_fs") || o.has("t_box_factor") {
        match o.one_of(&["t_box", "t_box_fs", "t_box_factor"]) {
            Some("t_box") => o.num("t_box"),
            Some("t_box_fs") => units::fs_to_au(o.num("t_box_fs")),
            Some(_) => o.num("t_box_factor") * duration,
            None => f64::NAN,
        }
    } else {
        DEFAULT_BOX_FACTOR * duration
    };
    if t_box <= duration {
        o.issue("t_box", format!("quantization time {t_box} must exceed the pulse duration {duration}"));
    }
    let n_modes = o.int("n_modes");
    if n_modes == 0 {
        o.issue("n_modes", "must be >= 1");
    }
    let spectral_floor = o.num_or("spectral_floor", DEFAULT_SPECTRAL_FLOOR);
    if !(spectral_floor > 0.0 && spectral_floor < 1.0) {
        o.issue("spectral_floor", format!("must lie in (0, 1), got {spectral_floor}"));
    }
    PulseConfig {
        lambda0_nm,
        omega0,
        n_cycles,
        envelope,
        energy_j,
        cep: o.num_or("cep", 0.0),
        waist_m,
        t_box,
        n_modes,
        spectral_floor,
    }
}

fn pulse_block(o: &Obj) -> PulseConfig {
    match o.obj("pulse") {
        Some(p) => {
            let spec = pulse(&p);
            p.finish();
            spec
        }
        None => pulse_placeholder(),
    }
}

fn pulse_placeholder() -> PulseConfig {
    PulseConfig {
        lambda0_nm: f64::NAN,
        omega0: f64::NAN,
        n_cycles: f64::NAN,
        envelope: EnvelopeSpec::Sin2,
        energy_j: f64::NAN,
        cep: 0.0,
        waist_m: f64::NAN,
        t_box: f64::NAN,
        n_modes: 0,
        spectral_floor: DEFAULT_SPECTRAL_FLOOR,
    }
}

/// `{lo_rel, hi_rel}` in units of ω₀ or `{lo_nm, hi_nm}` wavelengths.
fn band(o: &Obj, omega0: f64) -> Option<(f64, f64)> {
    let b = o.opt_obj("band")?;
    let edge = |rel: &'static str, nm: &'static str| match b.one_of(&[rel, nm]) {
        Some(k) if k == rel => b.num(rel) * omega0,
        Some(_) => units::wavelength_nm_to_omega(b.num(nm)),
        None => f64::NAN,
    };
    let x = edge("lo_rel", "lo_nm");
    let y = edge("hi_rel", "hi_nm");
    let (lo, hi) = (x.min(y), x.max(y));
    if x.is_finite() && y.is_finite() && !(lo > 0.0 && hi > lo) {
        o.issue("band", format!("band must be a positive interval, got [{lo}, {hi}] a.u."));
    }
    b.finish();
    Some((lo, hi))
}

fn state(o: &Obj) -> StateSpec {
    let Some(s) = o.obj("state") else { return StateSpec::Vacuum };
    let spec = match s.text("type") {
        Some("vacuum") => StateSpec::Vacuum,
        Some("coherent") => StateSpec::Coherent { alpha: pair(&s, "alpha") },
        Some("squeezed") => {
            let r = s.num("r");
            StateSpec::Squeezed {
                alpha: pair(&s, "alpha"),
                r: s.non_negative("r", r),
                theta: s.num("theta"),
            }
        }
        Some("fock") => {
            let n = s.int("n");
            StateSpec::Fock { n: n as u32 }
        }
        Some("thermal") => {
            let t = s.num("temperature");
            StateSpec::Thermal {
                temperature: s.positive("temperature", t),
            }
        }
        Some(other) => {
            s.issue("type", format!("expected vacuum, coherent, squeezed, fock or thermal, got \"{other}\""));
            StateSpec::Vacuum
        }
        None => StateSpec::Vacuum,
    };
    s.finish();
    spec
}

fn waveform(o: &Obj) -> WaveformSpec {
    let fallback = WaveformSpec::Monochromatic {
        a0: f64::NAN,
        omega: f64::NAN,
        phase: 0.0,
    };
    let Some(w) = o.obj("waveform") else { return fallback };
    let spec = match w.text("type") {
        Some("monochromatic") => {
            let omega = frequency(&w);
            let a0 = match w.one_of(&["a0", "e0"]) {
                Some("a0") => w.num("a0"),
                Some(_) => w.num("e0") / omega,
                None => f64::NAN,
            };
            WaveformSpec::Monochromatic {
                a0,
                omega,
                phase: w.num_or("phase", 0.0),
            }
        }
        Some("pulse") => WaveformSpec::Pulse(pulse_block(&w)),
        Some(other) => {
            w.issue("type", format!("expected monochromatic or pulse, got \"{other}\""));
            fallback
        }
        None => fallback,
    };
    w.finish();
    spec
}

fn gamma(o: &Obj) -> f64 {
    let g = o.num("gamma");
    o.non_negative("gamma", g)
}

/// Validates a scenario document and normalizes it to atomic units.
pub fn parse_scenario(doc: &Value) -> Result<Scenario, Vec<Issue>> {
    let issues = Issues::default();
    let scenario = Obj::new(doc, String::new(), &issues).and_then(|o| {
        let kind = o.text("kind")?;
        let s = match kind {
            "single_mode" => {
                let omega = frequency(&o);
                Scenario::SingleMode {
                    omega,
                    gamma: gamma(&o),
                    r_list: r_list(&o),
                    theta: theta_value(&o, "theta"),
                    alpha: pair(&o, "alpha"),
                    electron: electron(&o),
                    t_grid: time_grid(&o, omega),
                }
            }
            "zero_mean" => {
                let omega = frequency(&o);
                let (bsv_r, bsv_theta_list) = match o.obj("bsv") {
                    Some(b) => {
                        let r = b.num("r");
                        let out = (b.non_negative("r", r), b.num_list("theta_list"));
                        b.finish();
                        out
                    }
                    None => (f64::NAN, Vec::new()),
                };
                let t = o.num("thermal_t");
                Scenario::ZeroMean {
                    omega,
                    gamma: gamma(&o),
                    bsv_r,
                    bsv_theta_list,
                    fock_n_list: o.int_list("fock_n_list").into_iter().map(|n| n as u32).collect(),
                    thermal_t: o.positive("thermal_t", t),
                    electron: electron(&o),
                    t_grid: time_grid(&o, omega),
                }
            }
            "multimode" => {
                let pulse = pulse_block(&o);
                Scenario::Multimode {
                    band: band(&o, pulse.omega0),
                    r_list: r_list(&o),
                    theta: theta_value(&o, "theta"),
                    electron: electron(&o),
                    t_grid: time_grid(&o, pulse.omega0),
                    pulse,
                }
            }
            "oracle_compare" => {
                let (omega, gamma) = match o.obj("mode") {
                    Some(m) => {
                        let out = (frequency(&m), gamma(&m));
                        m.finish();
                        out
                    }
                    None => (f64::NAN, f64::NAN),
                };
                let st = state(&o);
                let n_fock = match o.get("n_fock") {
                    None => {
                        o.missing("n_fock");
                        None
                    }
                    Some(Value::String(s)) if s == "auto" => None,
                    Some(v) => {
                        let n = o.as_int("n_fock", v);
                        if n <= 8 {
                            o.issue("n_fock", format!("must be > 8 or \"auto\", got {n}"));
                        }
                        Some(n)
                    }
                };
                let grid = match o.opt_obj("m_grid") {
                    Some(g) => {
                        let min_points = g.int_or("min_points", 513);
                        let explicit = if g.has("points") || g.has("dp") {
                            let points = g.int("points");
                            let dp = g.num("dp");
                            if points % 2 == 0 || points < 3 {
                                g.issue("points", format!("must be odd and >= 3, got {points}"));
                            }
                            g.positive("dp", dp);
                            Some((points, dp))
                        } else {
                            None
                        };
                        g.finish();
                        GridSpec { min_points, explicit }
                    }
                    None => GridSpec {
                        min_points: 513,
                        explicit: None,
                    },
                };
                let default_tol = if matches!(st, StateSpec::Thermal { .. }) { 1e-5 } else { 1e-6 };
                let tolerance = o.num_or("tolerance", default_tol);
                Scenario::OracleCompare {
                    omega,
                    gamma,
                    state: st,
                    electron: electron(&o),
                    t_grid: time_grid(&o, omega),
                    n_fock,
                    grid,
                    tolerance: o.positive("tolerance", tolerance),
                }
            }
            "classical" => {
                let w = waveform(&o);
                let omega_ref = match w {
                    WaveformSpec::Monochromatic { omega, .. } => omega,
                    WaveformSpec::Pulse(p) => p.omega0,
                };
                Scenario::Classical {
                    waveform: w,
                    x0: o.num_or("x0", 0.0),
                    p0: o.num_or("p0", 0.0),
                    t_grid: time_grid(&o, omega_ref),
                }
            }
            other => {
                o.issue("kind", format!("unknown scenario kind \"{other}\"; expected one of {}", KINDS.join(", ")));
                return None;
            }
        };
        o.finish();
        Some(s)
    });
    let list = issues.0.into_inner();
    match scenario {
        Some(s) if list.is_empty() => Ok(s),
        _ => Err(list),
    }
}
