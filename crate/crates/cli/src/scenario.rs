//! Evaluation of a configured sweep into CSV rows and a metadata sidecar.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qsl_core::bath::{DrudeSpec, OhmicLikeSpec, GAMMA_TOLERANCE};
use qsl_core::coherence::{jsd_coherence, l1_coherence};
use qsl_core::dephasing::{coherence_factor, BlochState, PulseTrain};
use qsl_core::heom::{converge, evolve, HeomConfig, IntegrationReport};
use qsl_core::linalg::DensityMatrix;
use qsl_core::qsl::{qsl_dephasing_closed, qsl_generic, QslResult, CLOSED_FORM_TOL};
use qsl_core::{Error as CoreError, Execution};

use crate::config::{serialize, Axis, Coupling, Physics, ScenarioConfig, ScenarioKind};
use crate::LabError;

type Result<T> = std::result::Result<T, LabError>;

/// CSV text and its metadata sidecar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub csv: String,
    pub meta: String,
}

const RATIO_SLACK: f64 = 1e-6;
const UNIT_SLACK: f64 = 1e-9;

/// Every sweep point, first axis outermost.
fn grid(cfg: &ScenarioConfig) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for (_, values) in &cfg.sweep {
        let vals = values.values();
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

fn physics_at(cfg: &ScenarioConfig, coords: &[f64]) -> Physics {
    let mut p = cfg.physics.clone();
    for ((axis, _), &v) in cfg.sweep.iter().zip(coords) {
        p.set(*axis, v);
    }
    p
}

fn describe(cfg: &ScenarioConfig, coords: &[f64]) -> String {
    if cfg.sweep.is_empty() {
        return "the single point".into();
    }
    cfg.sweep
        .iter()
        .zip(coords)
        .map(|((a, _), v)| format!("{} = {v}", a.name()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Runs `f(i)` for `i < n` on `workers` threads (or inline for `None`);
/// the earliest failure in index order wins, as in a serial loop.
fn execute<T, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match workers {
        #[cfg(feature = "parallel")]
        Some(w) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| LabError::Argument {
                    name: "workers",
                    message: e.to_string(),
                })?;
            pool.install(|| (0..n).into_par_iter().map(&f).collect::<Vec<_>>())
                .into_iter()
                .collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

fn core_err(cfg: &ScenarioConfig, coords: &[f64]) -> impl Fn(CoreError) -> LabError {
    let coords = describe(cfg, coords);
    move |source| LabError::Point {
        coords: coords.clone(),
        source,
    }
}

fn bloch(p: &Physics) -> std::result::Result<BlochState, CoreError> {
    BlochState::new(p.bloch[0], p.bloch[1], p.bloch[2])
}

/// Row of a single-qubit scenario; the first entry is the (possibly snapped)
/// start time when `t` is swept.
fn dephasing_row(
    cfg: &ScenarioConfig,
    p: &Physics,
) -> std::result::Result<(f64, Vec<f64>), CoreError> {
    let spec = OhmicLikeSpec::new(p.lambda, p.omega_c, p.s)?;
    let init = bloch(p)?;
    let (t, pulse) = match cfg.kind {
        ScenarioKind::BangbangQsl => {
            let train = PulseTrain::new(p.pulse_interval)?;
            let n = (p.t / train.cycle()).round().max(0.0);
            (n * train.cycle(), Some(train))
        }
        _ => (p.t, None),
    };
    let res: QslResult =
        qsl_dephasing_closed(spec, p.temperature, p.omega, init, t, p.tau_d, pulse)?;
    let start = coherence_factor(spec, p.temperature, p.omega, t, pulse)?;
    let l1 = init.transverse() * start.q.norm();
    let row = match cfg.kind {
        ScenarioKind::DephasingRatio => {
            if l1 < 1e-14 {
                return Err(CoreError::Degenerate(format!(
                    "coherence {l1:e} at t = {t} is too small"
                )));
            }
            vec![res.tau_qsl / (p.tau_d * l1), res.ratio, l1]
        }
        _ => vec![res.ratio, res.f_final, l1, start.gamma],
    };
    Ok((t, row))
}

struct HeomGroup {
    rows: Vec<Vec<f64>>,
    report: IntegrationReport,
    last_delta: Option<f64>,
}

fn heom_config(
    cfg: &ScenarioConfig,
    p: &Physics,
    t_end: f64,
    exec: Execution,
) -> std::result::Result<HeomConfig, CoreError> {
    let drude = DrudeSpec::new(p.lambda, p.omega_c)?;
    let base = match cfg.numerics.heom_coupling {
        Coupling::SigmaZB => HeomConfig::literal(p.omega, p.g0, drude, p.temperature),
        Coupling::SigmaXB => HeomConfig::transverse(p.omega, p.g0, drude, p.temperature),
    };
    let n = &cfg.numerics;
    let step = n.heom_output_step;
    Ok(HeomConfig {
        cutoff: n.heom_cutoff,
        depth: n.heom_depth.unwrap_or(1),
        dt: n.heom_dt,
        t_max: ((t_end + p.tau_d) / step).round() * step,
        output_step: step,
        tail_correction: n.heom_tail_correction,
        matsubara_tol: n.matsubara_tol,
        ado_budget: n.ado_budget,
        exec,
        ..base
    })
}

/// One hierarchy run covering every swept start time at fixed bath
/// parameters.
fn heom_group(
    cfg: &ScenarioConfig,
    p: &Physics,
    times: &[f64],
    exec: Execution,
) -> std::result::Result<HeomGroup, CoreError> {
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let hc = heom_config(cfg, p, t_end, exec)?;
    let single = DensityMatrix::from_bloch(p.bloch)?;
    let rho0 = DensityMatrix::product(&single, &single)?;
    let (run, last_delta) = match cfg.numerics.heom_depth {
        Some(_) => (evolve(&hc, &rho0)?, None),
        None => {
            let c = converge(&hc, &rho0, cfg.numerics.heom_tol)?;
            let last = c.deltas.last().copied();
            (c.run, last)
        }
    };
    let a = run.trajectory.reduce_to_first()?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let i = a
            .node(t)
            .ok_or_else(|| CoreError::Range(format!("t = {t} is not on the output grid")))?;
        let state = &a.states()[i];
        let l1 = l1_coherence(state);
        let jsd = jsd_coherence(state)?;
        rows.push(match cfg.kind {
            ScenarioKind::HeomQsl => {
                let q = qsl_generic(&a, t, p.tau_d)?;
                vec![q.ratio, q.f_final, l1, jsd]
            }
            _ => vec![l1, jsd, state.purity()],
        });
    }
    Ok(HeomGroup {
        rows,
        report: run.report,
        last_delta,
    })
}

/// Re-checks the physical range of every emitted value.
fn check_row(cfg: &ScenarioConfig, coords: &[f64], row: &[f64]) -> Result<()> {
    for (name, &v) in cfg.kind.outputs().iter().zip(row) {
        let ok = match *name {
            "tau_qsl_ratio" => (0.0..=1.0 + RATIO_SLACK).contains(&v),
            "l1_coherence" | "jsd_coherence" | "purity" => (0.0..=1.0 + UNIT_SLACK).contains(&v),
            _ => v.is_finite() && v >= 0.0,
        };
        if !ok {
            return Err(LabError::Invariant {
                coords: describe(cfg, coords),
                message: format!("{name} = {v} outside its physical range"),
            });
        }
    }
    Ok(())
}

fn fmt_value(v: f64) -> String {
    format!("{v:.11e}")
}

fn evaluate(cfg: &ScenarioConfig, workers: Option<usize>) -> Result<Artifact> {
    let exec = if workers.is_some() {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let points = grid(cfg);
    let t_axis = cfg.sweep.iter().position(|(a, _)| *a == Axis::Time);
    let mut report = String::new();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = if cfg.kind.is_heom() {
        // group the points by everything except t
        let key = |c: &[f64]| -> Vec<u64> {
            c.iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != t_axis)
                .map(|(_, v)| v.to_bits())
                .collect()
        };
        let mut groups: Vec<Vec<f64>> = Vec::new();
        let mut slot_of: HashMap<Vec<u64>, usize> = HashMap::new();
        for c in &points {
            slot_of.entry(key(c)).or_insert_with(|| {
                groups.push(c.clone());
                groups.len() - 1
            });
        }
        let times = cfg.axis_values(Axis::Time);
        let results = execute(groups.len(), workers, |g| {
            let p = physics_at(cfg, &groups[g]);
            heom_group(cfg, &p, &times, exec).map_err(core_err(cfg, &groups[g]))
        })?;
        for (g, res) in groups.iter().zip(&results) {
            let r = &res.report;
            let fixed: Vec<String> = cfg
                .sweep
                .iter()
                .zip(g)
                .filter(|((a, _), _)| *a != Axis::Time)
                .map(|((a, _), v)| format!("{}={v}", a.name()))
                .collect();
            let _ = writeln!(
                report,
                "hierarchy[{}] = depth {} cutoff {} ados {} dt {:e} steps {} trace_drift {:e} hermiticity_drift {:e}{}",
                fixed.join(" "),
                r.depth,
                r.cutoff,
                r.ado_count,
                r.dt,
                r.steps,
                r.trace_drift,
                r.hermiticity_drift,
                res.last_delta.map(|d| format!(" last_delta {d:e}")).unwrap_or_default()
            );
        }
        points
            .iter()
            .map(|c| {
                let g = slot_of[&key(c)];
                let ti = t_axis.map_or(0, |i| {
                    times.iter().position(|&t| t == c[i]).expect("swept time")
                });
                (c.clone(), results[g].rows[ti].clone())
            })
            .collect()
    } else {
        let _ = writeln!(
            report,
            "gamma_tolerance = abs {:e} rel {:e}",
            GAMMA_TOLERANCE.abs, GAMMA_TOLERANCE.rel
        );
        let _ = writeln!(report, "closed_form_tol = {CLOSED_FORM_TOL:e}");
        execute(points.len(), workers, |i| {
            let p = physics_at(cfg, &points[i]);
            let (t, row) = dephasing_row(cfg, &p).map_err(core_err(cfg, &points[i]))?;
            let mut coords = points[i].clone();
            if let Some(ti) = t_axis {
                coords[ti] = t;
            }
            Ok((coords, row))
        })?
    };
    let mut csv = String::new();
    let header: Vec<&str> = cfg
        .sweep
        .iter()
        .map(|(a, _)| a.name())
        .chain(cfg.kind.outputs().iter().copied())
        .collect();
    csv.push_str(&header.join(","));
    csv.push('\n');
    for (coords, row) in &rows {
        check_row(cfg, coords, row)?;
        let fields: Vec<String> = coords.iter().chain(row).map(|&v| fmt_value(v)).collect();
        csv.push_str(&fields.join(","));
        csv.push('\n');
    }
    let meta = format!(
        "# resolved configuration\n{}\n# numerics report\nscenario = {}\nrows = {}\n{}",
        serialize(cfg),
        cfg.kind.name(),
        rows.len(),
        report
    );
    Ok(Artifact { csv, meta })
}

/// Evaluates every sweep point serially.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Artifact> {
    evaluate(cfg, None)
}

/// Evaluates the sweep on `worker_count` threads; the output is identical to
/// [`run_scenario`].
pub fn sweep_parallel(cfg: &ScenarioConfig, worker_count: usize) -> Result<Artifact> {
    if worker_count == 0 {
        return Err(LabError::Argument {
            name: "workers",
            message: "worker count must be at least 1".into(),
        });
    }
    evaluate(cfg, Some(worker_count))
}

/// Writes the CSV to `path` and the metadata to `path` with `.meta` appended.
pub fn write_artifact(artifact: &Artifact, path: &Path) -> Result<PathBuf> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| LabError::Io { path: p, source }
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    std::fs::write(path, &artifact.csv).map_err(io(path))?;
    let mut meta = path.as_os_str().to_owned();
    meta.push(".meta");
    let meta = PathBuf::from(meta);
    std::fs::write(&meta, &artifact.meta).map_err(io(&meta))?;
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn grid_order_is_row_major() {
        let cfg =
            parse_config("[dephasing-qsl]\n[sweep]\nt = 0, 1\ntemperature = 1, 2, 3\n").unwrap();
        let g = grid(&cfg);
        assert_eq!(g.len(), 6);
        assert_eq!(g[1], vec![0.0, 2.0]);
        assert_eq!(g[3], vec![1.0, 1.0]);
    }

    #[test]
    fn zero_coupling_gives_constant_ratio() {
        let cfg = parse_config("[dephasing-qsl]\nlambda = 0\n[sweep]\nt = 0:2:5\n").unwrap();
        let art = run_scenario(&cfg).unwrap();
        let ratios: Vec<&str> = art
            .csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(ratios.len(), 5);
        assert!(ratios.iter().all(|r| *r == ratios[0]));
        assert!(art
            .csv
            .starts_with("t,tau_qsl_ratio,relative_purity,l1_coherence,gamma\n"));
    }

    #[test]
    fn zero_workers_rejected() {
        let cfg = parse_config("[dephasing-qsl]\n").unwrap();
        assert_eq!(sweep_parallel(&cfg, 0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn bangbang_times_snap_to_lattice() {
        let cfg = parse_config("[bangbang-qsl]\npulse_interval = 0.05\n[sweep]\nt = 0.04, 0.31\n")
            .unwrap();
        let art = run_scenario(&cfg).unwrap();
        let ts: Vec<f64> = art
            .csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(ts, vec![0.0, 0.3]);
    }

    #[test]
    fn heom_rows_and_report() {
        let cfg = parse_config(
            "[heom-coherence]\ntau_d = 1\n[sweep]\nt = 0:1:3\nlambda = 0, 0.05\n[numerics]\nheom_depth = 3\n",
        )
        .unwrap();
        let art = run_scenario(&cfg).unwrap();
        assert_eq!(art.csv.lines().count(), 7);
        assert_eq!(art.meta.matches("hierarchy[").count(), 2);
        let first: Vec<f64> = art
            .csv
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert!((first[2] - 1.0).abs() < 1e-12);
    }
}
