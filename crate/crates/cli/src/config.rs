//! INI-style scenario configuration.
//!
//! ```text
//! # comment
//! [dephasing-qsl]          # exactly one scenario section
//! lambda = 0.2
//! bloch = 1, 0, 0
//!
//! [sweep]                  # up to two axes, first one outermost
//! t = 0:3:31               # min:max:count
//! temperature = 0.5, 1, 5  # explicit list
//!
//! [numerics]
//! heom_tol = 1e-6
//!
//! [output]
//! path = fig1a.csv
//! ```

use std::fmt::Write as _;

use crate::LabError;

type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    DephasingQsl,
    DephasingRatio,
    BangbangQsl,
    HeomQsl,
    HeomCoherence,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::DephasingQsl,
        ScenarioKind::DephasingRatio,
        ScenarioKind::BangbangQsl,
        ScenarioKind::HeomQsl,
        ScenarioKind::HeomCoherence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::DephasingQsl => "dephasing-qsl",
            ScenarioKind::DephasingRatio => "dephasing-ratio",
            ScenarioKind::BangbangQsl => "bangbang-qsl",
            ScenarioKind::HeomQsl => "heom-qsl",
            ScenarioKind::HeomCoherence => "heom-coherence",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_heom(self) -> bool {
        matches!(self, ScenarioKind::HeomQsl | ScenarioKind::HeomCoherence)
    }

    /// CSV output columns, after the swept axes.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::DephasingQsl | ScenarioKind::BangbangQsl => {
                &["tau_qsl_ratio", "relative_purity", "l1_coherence", "gamma"]
            }
            ScenarioKind::DephasingRatio => {
                &["qsl_coherence_ratio", "tau_qsl_ratio", "l1_coherence"]
            }
            ScenarioKind::HeomQsl => &[
                "tau_qsl_ratio",
                "relative_purity",
                "l1_coherence",
                "jsd_coherence",
            ],
            ScenarioKind::HeomCoherence => &["l1_coherence", "jsd_coherence", "purity"],
        }
    }

    pub fn allows(self, axis: Axis) -> bool {
        match axis {
            Axis::Time | Axis::Temperature | Axis::Lambda => true,
            Axis::S => !self.is_heom(),
            Axis::PulseInterval => self == ScenarioKind::BangbangQsl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Time,
    Temperature,
    Lambda,
    S,
    PulseInterval,
}

impl Axis {
    pub const ALL: [Axis; 5] = [
        Axis::Time,
        Axis::Temperature,
        Axis::Lambda,
        Axis::S,
        Axis::PulseInterval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Time => "t",
            Axis::Temperature => "temperature",
            Axis::Lambda => "lambda",
            Axis::S => "s",
            Axis::PulseInterval => "pulse_interval",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    fn check(self, v: f64) -> std::result::Result<(), String> {
        let ok = match self {
            Axis::Time | Axis::Temperature | Axis::Lambda => v >= 0.0,
            Axis::S | Axis::PulseInterval => v > 0.0,
        };
        if v.is_finite() && ok {
            Ok(())
        } else {
            Err(format!("value {v} out of range for axis `{}`", self.name()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Range { min: f64, max: f64, count: usize },
    List(Vec<f64>),
}

impl AxisValues {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisValues::Range { min, max, count } => (0..*count)
                .map(|i| {
                    if i + 1 == *count {
                        *max
                    } else {
                        min + (max - min) * i as f64 / (*count - 1) as f64
                    }
                })
                .collect(),
            AxisValues::List(v) => v.clone(),
        }
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", s.trim()))
        };
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err("range must be `min:max:count`".into());
            }
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not a count", parts[2].trim()))?;
            let (min, max) = (num(parts[0])?, num(parts[1])?);
            if !(min.is_finite() && max.is_finite()) {
                return Err("sweep bounds must be finite".into());
            }
            if count < 2 {
                return Err("sweep count must be at least 2".into());
            }
            if !(min < max) {
                return Err("sweep range needs min < max".into());
            }
            Ok(AxisValues::Range { min, max, count })
        } else {
            let v = text
                .split(',')
                .map(num)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if v.len() < 2 {
                return Err("a sweep list needs at least 2 values".into());
            }
            Ok(AxisValues::List(v))
        }
    }

    fn render(&self) -> String {
        match self {
            AxisValues::Range { min, max, count } => format!("{min}:{max}:{count}"),
            AxisValues::List(v) => v
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Physics {
    pub lambda: f64,
    pub omega_c: f64,
    pub s: f64,
    pub temperature: f64,
    pub omega: f64,
    pub tau_d: f64,
    pub g0: f64,
    pub pulse_interval: f64,
    /// Start of the window when `t` is not swept.
    pub t: f64,
    pub bloch: [f64; 3],
}

impl Physics {
    /// Default physical parameters of each scenario.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let base = Physics {
            lambda: 0.2,
            omega_c: 50.0,
            s: 1.0,
            temperature: 1.0,
            omega: 1.0,
            tau_d: 1.0,
            g0: 0.1,
            pulse_interval: 0.005,
            t: 0.0,
            bloch: [1.0, 0.0, 0.0],
        };
        match kind {
            ScenarioKind::DephasingQsl | ScenarioKind::DephasingRatio => base,
            ScenarioKind::BangbangQsl => Physics {
                omega_c: 20.0,
                ..base
            },
            ScenarioKind::HeomQsl | ScenarioKind::HeomCoherence => Physics {
                lambda: 0.005,
                omega_c: 5.0,
                temperature: 5.0,
                tau_d: 10.0,
                ..base
            },
        }
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Time => self.t,
            Axis::Temperature => self.temperature,
            Axis::Lambda => self.lambda,
            Axis::S => self.s,
            Axis::PulseInterval => self.pulse_interval,
        }
    }

    pub fn set(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::Time => self.t = v,
            Axis::Temperature => self.temperature = v,
            Axis::Lambda => self.lambda = v,
            Axis::S => self.s = v,
            Axis::PulseInterval => self.pulse_interval = v,
        }
    }
}

/// System operator coupling qubit B to the bath in the HEOM scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    SigmaZB,
    SigmaXB,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::SigmaZB => "sigma_z_b",
            Coupling::SigmaXB => "sigma_x_b",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub heom_tol: f64,
    pub heom_depth: Option<usize>,
    pub heom_cutoff: Option<usize>,
    pub heom_dt: Option<f64>,
    pub heom_output_step: f64,
    pub heom_coupling: Coupling,
    pub heom_tail_correction: bool,
    pub matsubara_tol: f64,
    pub ado_budget: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            heom_tol: 1e-6,
            heom_depth: None,
            heom_cutoff: None,
            heom_dt: None,
            heom_output_step: 0.05,
            heom_coupling: Coupling::SigmaZB,
            heom_tail_correction: true,
            matsubara_tol: qsl_core::bath::DEFAULT_MATSUBARA_TOL,
            ado_budget: qsl_core::heom::DEFAULT_ADO_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub physics: Physics,
    pub sweep: Vec<(Axis, AxisValues)>,
    pub numerics: Numerics,
    pub output: Option<String>,
}

impl ScenarioConfig {
    /// Values taken by `axis`: the sweep values, or the fixed parameter.
    pub fn axis_values(&self, axis: Axis) -> Vec<f64> {
        self.sweep
            .iter()
            .find(|(a, _)| *a == axis)
            .map(|(_, v)| v.values())
            .unwrap_or_else(|| vec![self.physics.get(axis)])
    }
}

fn config_err(line: usize, key: &str, message: impl Into<String>) -> LabError {
    LabError::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

fn is_snake(key: &str) -> bool {
    let mut chars = key.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_err(line, content, "unterminated section header"))?
                .trim();
            if sections.iter().any(|s| s.name == name) {
                return Err(config_err(line, name, "duplicate section"));
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, content, "expected `key = value`"))?;
        let key = key.trim();
        if !is_snake(key) {
            return Err(config_err(line, key, "keys must be snake_case ASCII"));
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| config_err(line, key, "key outside of any section"))?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(config_err(line, key, "duplicate key"));
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(sections)
}

const PHYSICS_KEYS: [&str; 10] = [
    "lambda",
    "omega_c",
    "s",
    "temperature",
    "omega",
    "tau_d",
    "g0",
    "pulse_interval",
    "t",
    "bloch",
];
const NUMERICS_KEYS: [&str; 9] = [
    "heom_tol",
    "heom_depth",
    "heom_cutoff",
    "heom_dt",
    "heom_output_step",
    "heom_coupling",
    "heom_tail_correction",
    "matsubara_tol",
    "ado_budget",
];

/// Applies `section.key=value` (or unqualified `key=value` for scenario,
/// numerics and output keys) on top of the parsed sections.
fn apply_override(sections: &mut Vec<Section>, spec: &str) -> Result<()> {
    let (lhs, value) = spec
        .split_once('=')
        .ok_or_else(|| config_err(0, spec, "override must be `key=value`"))?;
    let lhs = lhs.trim();
    let scenario = sections
        .iter()
        .find(|s| ScenarioKind::from_name(&s.name).is_some())
        .map(|s| s.name.clone());
    let (section, key) = match lhs.split_once('.') {
        Some((s, k)) => (s.to_string(), k.to_string()),
        None if PHYSICS_KEYS.contains(&lhs) => (
            scenario.ok_or_else(|| config_err(0, lhs, "no scenario section to override"))?,
            lhs.to_string(),
        ),
        None if NUMERICS_KEYS.contains(&lhs) => ("numerics".to_string(), lhs.to_string()),
        None if lhs == "path" => ("output".to_string(), lhs.to_string()),
        None => return Err(config_err(0, lhs, "unknown key")),
    };
    if !is_snake(&key) {
        return Err(config_err(0, &key, "keys must be snake_case ASCII"));
    }
    let idx = match sections.iter().position(|s| s.name == section) {
        Some(i) => i,
        None => {
            sections.push(Section {
                name: section,
                line: 0,
                entries: Vec::new(),
            });
            sections.len() - 1
        }
    };
    let entries = &mut sections[idx].entries;
    let entry = Entry {
        key: key.clone(),
        value: value.trim().to_string(),
        line: 0,
    };
    match entries.iter_mut().find(|e| e.key == key) {
        Some(e) => *e = entry,
        None => entries.push(entry),
    }
    Ok(())
}

fn number(e: &Entry) -> Result<f64> {
    let v: f64 = e
        .value
        .parse()
        .map_err(|_| config_err(e.line, &e.key, format!("`{}` is not a number", e.value)))?;
    if !v.is_finite() {
        return Err(config_err(e.line, &e.key, "must be finite"));
    }
    Ok(v)
}

fn bounded(e: &Entry, ok: impl Fn(f64) -> bool, what: &str) -> Result<f64> {
    let v = number(e)?;
    if ok(v) {
        Ok(v)
    } else {
        Err(config_err(
            e.line,
            &e.key,
            format!("{v} out of range: must be {what}"),
        ))
    }
}

fn count(e: &Entry, min: usize) -> Result<usize> {
    let v: usize = e.value.parse().map_err(|_| {
        config_err(
            e.line,
            &e.key,
            format!("`{}` is not a non-negative integer", e.value),
        )
    })?;
    if v < min {
        return Err(config_err(
            e.line,
            &e.key,
            format!("{v} out of range: must be ≥ {min}"),
        ));
    }
    Ok(v)
}

fn parse_physics(kind: ScenarioKind, entries: &[Entry]) -> Result<Physics> {
    let mut p = Physics::defaults(kind);
    for e in entries {
        match e.key.as_str() {
            "lambda" => p.lambda = bounded(e, |v| v >= 0.0, "≥ 0")?,
            "omega_c" => p.omega_c = bounded(e, |v| v > 0.0, "> 0")?,
            "s" => p.s = bounded(e, |v| v > 0.0, "> 0")?,
            "temperature" => p.temperature = bounded(e, |v| v >= 0.0, "≥ 0")?,
            "omega" => p.omega = bounded(e, |v| v > 0.0, "> 0")?,
            "tau_d" => p.tau_d = bounded(e, |v| v > 0.0, "> 0")?,
            "g0" => p.g0 = number(e)?,
            "pulse_interval" => p.pulse_interval = bounded(e, |v| v > 0.0, "> 0")?,
            "t" => p.t = bounded(e, |v| v >= 0.0, "≥ 0")?,
            "bloch" => {
                let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(config_err(
                        e.line,
                        &e.key,
                        "expected three components `vx, vy, vz`",
                    ));
                }
                let mut v = [0.0; 3];
                for (slot, part) in v.iter_mut().zip(&parts) {
                    *slot = part
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| {
                            config_err(e.line, &e.key, format!("`{part}` is not a finite number"))
                        })?;
                }
                if v.iter().map(|x| x * x).sum::<f64>() > 1.0 + 1e-12 {
                    return Err(config_err(
                        e.line,
                        &e.key,
                        "Bloch vector must have length ≤ 1",
                    ));
                }
                p.bloch = v;
            }
            _ => return Err(config_err(e.line, &e.key, "unknown key")),
        }
    }
    Ok(p)
}

fn parse_numerics(entries: &[Entry]) -> Result<Numerics> {
    let mut n = Numerics::default();
    for e in entries {
        match e.key.as_str() {
            "heom_tol" => n.heom_tol = bounded(e, |v| v > 0.0, "> 0")?,
            "heom_depth" => n.heom_depth = Some(count(e, 1)?),
            "heom_cutoff" => n.heom_cutoff = Some(count(e, 0)?),
            "heom_dt" => n.heom_dt = Some(bounded(e, |v| v > 0.0, "> 0")?),
            "heom_output_step" => n.heom_output_step = bounded(e, |v| v > 0.0, "> 0")?,
            "heom_coupling" => {
                n.heom_coupling = match e.value.as_str() {
                    "sigma_z_b" => Coupling::SigmaZB,
                    "sigma_x_b" => Coupling::SigmaXB,
                    other => {
                        return Err(config_err(
                            e.line,
                            &e.key,
                            format!("unknown operator `{other}` (sigma_z_b or sigma_x_b)"),
                        ))
                    }
                }
            }
            "heom_tail_correction" => {
                n.heom_tail_correction = match e.value.as_str() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(config_err(
                            e.line,
                            &e.key,
                            format!("`{other}` is not true/false"),
                        ))
                    }
                }
            }
            "matsubara_tol" => n.matsubara_tol = bounded(e, |v| v > 0.0, "> 0")?,
            "ado_budget" => n.ado_budget = count(e, 1)?,
            _ => return Err(config_err(e.line, &e.key, "unknown key")),
        }
    }
    Ok(n)
}

fn parse_sweep(kind: ScenarioKind, entries: &[Entry]) -> Result<Vec<(Axis, AxisValues)>> {
    if entries.len() > 2 {
        return Err(config_err(
            entries[2].line,
            &entries[2].key,
            "at most two sweep axes",
        ));
    }
    let mut axes = Vec::new();
    for e in entries {
        let axis = Axis::from_name(&e.key)
            .ok_or_else(|| config_err(e.line, &e.key, "unknown sweep axis"))?;
        if !kind.allows(axis) {
            return Err(config_err(
                e.line,
                &e.key,
                format!("axis not available for scenario {}", kind.name()),
            ));
        }
        let values = AxisValues::parse(&e.value).map_err(|m| config_err(e.line, &e.key, m))?;
        for v in values.values() {
            axis.check(v).map_err(|m| config_err(e.line, &e.key, m))?;
        }
        axes.push((axis, values));
    }
    Ok(axes)
}

fn line_of(sections: &[Section], section: &str, key: &str) -> usize {
    sections
        .iter()
        .find(|s| s.name == section)
        .and_then(|s| s.entries.iter().find(|e| e.key == key))
        .map_or(0, |e| e.line)
}

fn build(sections: &[Section]) -> Result<ScenarioConfig> {
    let mut kind = None;
    for s in sections {
        if let Some(k) = ScenarioKind::from_name(&s.name) {
            if kind.is_some() {
                return Err(config_err(
                    s.line,
                    &s.name,
                    "only one scenario section is allowed",
                ));
            }
            kind = Some((k, s));
        } else if !matches!(s.name.as_str(), "sweep" | "numerics" | "output") {
            return Err(config_err(s.line, &s.name, "unknown section"));
        }
    }
    let (kind, scen) = kind.ok_or_else(|| {
        let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
        config_err(
            0,
            "scenario",
            format!("missing scenario section (one of {})", names.join(", ")),
        )
    })?;
    let entries = |name: &str| -> &[Entry] {
        sections
            .iter()
            .find(|s| s.name == name)
            .map_or(&[], |s| s.entries.as_slice())
    };
    let physics = parse_physics(kind, &scen.entries)?;
    let sweep = parse_sweep(kind, entries("sweep"))?;
    let numerics = parse_numerics(entries("numerics"))?;
    let mut output = None;
    for e in entries("output") {
        match e.key.as_str() {
            "path" if !e.value.is_empty() => output = Some(e.value.clone()),
            "path" => return Err(config_err(e.line, &e.key, "empty path")),
            _ => return Err(config_err(e.line, &e.key, "unknown key")),
        }
    }
    let cfg = ScenarioConfig {
        kind,
        physics,
        sweep,
        numerics,
        output,
    };
    validate(&cfg, sections, &scen.name)?;
    Ok(cfg)
}

/// Constraints spanning several keys.
fn validate(cfg: &ScenarioConfig, sections: &[Section], scen: &str) -> Result<()> {
    let p = &cfg.physics;
    let key_line = |axis: Axis| {
        if cfg.sweep.iter().any(|(a, _)| *a == axis) {
            line_of(sections, "sweep", axis.name())
        } else {
            line_of(sections, scen, axis.name())
        }
    };
    if p.bloch[0].hypot(p.bloch[1]) <= 1e-14 {
        return Err(config_err(
            line_of(sections, scen, "bloch"),
            "bloch",
            "the initial state needs transverse coherence",
        ));
    }
    if cfg.kind == ScenarioKind::BangbangQsl {
        for dt in cfg.axis_values(Axis::PulseInterval) {
            let cycles = p.tau_d / (2.0 * dt);
            if (cycles - cycles.round()).abs() > 1e-9 * cycles.max(1.0) || cycles.round() < 1.0 {
                return Err(config_err(
                    key_line(Axis::PulseInterval),
                    "pulse_interval",
                    format!(
                        "tau_d = {} is not a whole number of cycles 2Δt for Δt = {dt}",
                        p.tau_d
                    ),
                ));
            }
        }
    }
    if cfg.kind.is_heom() {
        if cfg.axis_values(Axis::Temperature).iter().any(|&t| t <= 0.0) {
            return Err(config_err(
                key_line(Axis::Temperature),
                "temperature",
                "the hierarchy needs T > 0",
            ));
        }
        let step = cfg.numerics.heom_output_step;
        let on_grid = |x: f64| {
            let n = (x / step).round();
            (n * step - x).abs() <= 1e-9 * x.max(1.0)
        };
        if let Some(t) = cfg
            .axis_values(Axis::Time)
            .into_iter()
            .find(|&t| !on_grid(t))
        {
            return Err(config_err(
                key_line(Axis::Time),
                "t",
                format!("t = {t} is not on the output grid of step {step}"),
            ));
        }
        if !on_grid(p.tau_d) {
            return Err(config_err(
                line_of(sections, scen, "tau_d"),
                "tau_d",
                format!("tau_d must be a multiple of the output step {step}"),
            ));
        }
    }
    Ok(())
}

/// Parses and validates a configuration, applying defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    build(&parse_sections(text)?)
}

/// As [`parse_config`], with `key=value` overrides applied first.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut sections = parse_sections(text)?;
    for o in overrides {
        apply_override(&mut sections, o)?;
    }
    build(&sections)
}

/// Parses `file` layered over `base` (a preset), then applies overrides.
/// Keys in `file` replace those of `base` section by section; a `[sweep]`
/// section or a different scenario section in `file` replaces the base one
/// outright. Lines refer to `file`; errors in base keys report line 0.
pub fn parse_layered(base: &str, file: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut sections = parse_sections(base)?;
    for s in &mut sections {
        s.line = 0;
        for e in &mut s.entries {
            e.line = 0;
        }
    }
    for top in parse_sections(file)? {
        if top.name == "sweep" {
            sections.retain(|s| s.name != "sweep");
        } else if ScenarioKind::from_name(&top.name).is_some() {
            sections.retain(|s| s.name == top.name || ScenarioKind::from_name(&s.name).is_none());
        }
        match sections.iter_mut().find(|s| s.name == top.name) {
            Some(s) => {
                for e in top.entries {
                    match s.entries.iter_mut().find(|x| x.key == e.key) {
                        Some(x) => *x = e,
                        None => s.entries.push(e),
                    }
                }
            }
            None => sections.push(top),
        }
    }
    for o in overrides {
        apply_override(&mut sections, o)?;
    }
    build(&sections)
}

/// Canonical text of a configuration, with every value spelled out.
pub fn serialize(cfg: &ScenarioConfig) -> String {
    let p = &cfg.physics;
    let n = &cfg.numerics;
    let mut out = String::new();
    let _ = writeln!(out, "[{}]", cfg.kind.name());
    for (k, v) in [
        ("lambda", p.lambda),
        ("omega_c", p.omega_c),
        ("s", p.s),
        ("temperature", p.temperature),
        ("omega", p.omega),
        ("tau_d", p.tau_d),
        ("g0", p.g0),
        ("pulse_interval", p.pulse_interval),
        ("t", p.t),
    ] {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(
        out,
        "bloch = {}, {}, {}",
        p.bloch[0], p.bloch[1], p.bloch[2]
    );
    if !cfg.sweep.is_empty() {
        let _ = writeln!(out, "\n[sweep]");
        for (axis, values) in &cfg.sweep {
            let _ = writeln!(out, "{} = {}", axis.name(), values.render());
        }
    }
    let _ = writeln!(out, "\n[numerics]");
    let _ = writeln!(out, "heom_tol = {}", n.heom_tol);
    if let Some(d) = n.heom_depth {
        let _ = writeln!(out, "heom_depth = {d}");
    }
    if let Some(k) = n.heom_cutoff {
        let _ = writeln!(out, "heom_cutoff = {k}");
    }
    if let Some(dt) = n.heom_dt {
        let _ = writeln!(out, "heom_dt = {dt}");
    }
    let _ = writeln!(out, "heom_output_step = {}", n.heom_output_step);
    let _ = writeln!(out, "heom_coupling = {}", n.heom_coupling.name());
    let _ = writeln!(out, "heom_tail_correction = {}", n.heom_tail_correction);
    let _ = writeln!(out, "matsubara_tol = {}", n.matsubara_tol);
    let _ = writeln!(out, "ado_budget = {}", n.ado_budget);
    if let Some(path) = &cfg.output {
        let _ = writeln!(out, "\n[output]\npath = {path}");
    }
    out
}
