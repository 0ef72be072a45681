//! Exact pure-dephasing evolution of a single qubit.
//!
//! The off-diagonal element is multiplied by the coherence factor
//! `q_t = e^{iΩt − Γ_t}`; populations never change.

use num_complex::Complex64;

use crate::bath::{decoherence_factor_and_rate, decoherence_factor_pulsed, OhmicLikeSpec};
use crate::linalg::{CMatrix, DensityMatrix, MatrixDerivative};
use crate::qsl::StateTrajectory;
use crate::{Error, Execution, Result};

/// Default number of samples for a plotted time window.
pub const DEFAULT_GRID_POINTS: usize = 601;

const LATTICE_TOL: f64 = 1e-9;

/// Bloch vector of the initial qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl BlochState {
    pub fn new(vx: f64, vy: f64, vz: f64) -> Result<Self> {
        let state = Self { vx, vy, vz };
        state.validate()?;
        Ok(state)
    }

    /// `|+⟩`, the equal superposition used throughout the dephasing study.
    pub fn plus() -> Self {
        Self {
            vx: 1.0,
            vy: 0.0,
            vz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n2 = self.vx * self.vx + self.vy * self.vy + self.vz * self.vz;
        if !n2.is_finite() || n2 > 1.0 + 1e-12 {
            return Err(Error::param(
                "init",
                format!("Bloch vector length² {n2} exceeds 1"),
            ));
        }
        Ok(())
    }

    /// `√(v_x² + v_y²)`, the initial l1 coherence.
    pub fn transverse(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    fn off_diagonal(&self) -> Complex64 {
        Complex64::new(0.5 * self.vx, -0.5 * self.vy)
    }
}

/// Bang-bang π pulses spaced by `interval`; one cycle lasts `2·interval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    pub interval: f64,
}

impl PulseTrain {
    pub fn new(interval: f64) -> Result<Self> {
        if !(interval.is_finite() && interval > 0.0) {
            return Err(Error::param(
                "delta_t",
                format!("pulse interval must be positive, got {interval}"),
            ));
        }
        Ok(Self { interval })
    }

    pub fn cycle(&self) -> f64 {
        2.0 * self.interval
    }

    /// Number of complete cycles at `t`, if `t` lies on the lattice `2NΔt`.
    pub fn cycles_at(&self, t: f64) -> Result<u32> {
        let n = (t / self.cycle()).round();
        if !(n >= 0.0)
            || (n * self.cycle() - t).abs() > LATTICE_TOL * t.abs().max(1.0)
            || n > u32::MAX as f64
        {
            return Err(Error::Domain(format!(
                "t = {t} is not a lattice point 2NΔt with Δt = {}",
                self.interval
            )));
        }
        Ok(n as u32)
    }

    pub fn lattice_time(&self, cycles: u32) -> f64 {
        cycles as f64 * self.cycle()
    }
}

/// Sampled coherence factor together with `Γ` and its rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSample {
    pub q: Complex64,
    pub q_dot: Complex64,
    pub gamma: f64,
    pub gamma_rate: f64,
}

fn free_sample(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    t: f64,
) -> Result<CoherenceSample> {
    let d = decoherence_factor_and_rate(spec, temperature, t)?;
    let q = Complex64::new(-d.gamma, omega * t).exp();
    Ok(CoherenceSample {
        q,
        q_dot: Complex64::new(-d.rate, omega) * q,
        gamma: d.gamma,
        gamma_rate: d.rate,
    })
}

fn lattice_q(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    pulse: &PulseTrain,
    n: u32,
) -> Result<(Complex64, f64)> {
    let t = pulse.lattice_time(n);
    let gamma = if n == 0 {
        0.0
    } else {
        decoherence_factor_pulsed(spec, temperature, n, pulse.interval)?
    };
    Ok((Complex64::new(-gamma, omega * t).exp(), gamma))
}

fn pulsed_sample(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    pulse: &PulseTrain,
    n: u32,
    next: (Complex64, f64),
) -> Result<CoherenceSample> {
    let (q, gamma) = lattice_q(spec, temperature, omega, pulse, n)?;
    let h = pulse.cycle();
    Ok(CoherenceSample {
        q,
        q_dot: (next.0 - q) / h,
        gamma,
        gamma_rate: (next.1 - gamma) / h,
    })
}

/// `q_t` and `q̇_t`. Under a pulse train `t` must be a lattice point and `q̇`
/// is the forward difference over one cycle.
pub fn coherence_factor(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    t: f64,
    pulse: Option<PulseTrain>,
) -> Result<CoherenceSample> {
    match pulse {
        None => free_sample(spec, temperature, omega, t),
        Some(p) => {
            let n = p.cycles_at(t)?;
            let next = lattice_q(spec, temperature, omega, &p, n + 1)?;
            pulsed_sample(spec, temperature, omega, &p, n, next)
        }
    }
}

/// `ρ = ½[[1+v_z, (v_x − iv_y)q], [(v_x + iv_y)q*, 1−v_z]]`.
pub fn reduced_state(init: &BlochState, q: Complex64) -> Result<DensityMatrix> {
    init.validate()?;
    if q.norm() > 1.0 + 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "|q| = {} exceeds 1",
            q.norm()
        )));
    }
    let c = init.off_diagonal() * q;
    let m = CMatrix::from_rows(&[
        vec![Complex64::new(0.5 * (1.0 + init.vz), 0.0), c],
        vec![c.conj(), Complex64::new(0.5 * (1.0 - init.vz), 0.0)],
    ])?;
    DensityMatrix::new(m)
}

/// `dρ/dt`, the state's derivative for a given `q̇`.
pub fn state_derivative(init: &BlochState, q_dot: Complex64) -> Result<MatrixDerivative> {
    let c = init.off_diagonal() * q_dot;
    let zero = Complex64::new(0.0, 0.0);
    MatrixDerivative::new(CMatrix::from_rows(&[vec![zero, c], vec![c.conj(), zero]])?)
}

/// `points` equally spaced times on `[start, end]`.
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        end
                    } else {
                        start + h * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Sampled dephasing evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingTrajectory {
    grid: Vec<f64>,
    q: Vec<Complex64>,
    q_dot: Vec<Complex64>,
    gamma: Vec<f64>,
    gamma_rate: Vec<f64>,
    init: BlochState,
    omega: f64,
    pulse: Option<PulseTrain>,
}

impl DephasingTrajectory {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn q(&self) -> &[Complex64] {
        &self.q
    }
    pub fn q_dot(&self) -> &[Complex64] {
        &self.q_dot
    }
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
    pub fn gamma_rate(&self) -> &[f64] {
        &self.gamma_rate
    }
    pub fn init(&self) -> BlochState {
        self.init
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn pulse(&self) -> Option<PulseTrain> {
        self.pulse
    }
    pub fn len(&self) -> usize {
        self.grid.len()
    }
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn state(&self, i: usize) -> Result<DensityMatrix> {
        reduced_state(&self.init, self.q[i])
    }

    pub fn derivative(&self, i: usize) -> Result<MatrixDerivative> {
        state_derivative(&self.init, self.q_dot[i])
    }

    /// Density matrices and derivatives on the same grid.
    pub fn to_state_trajectory(&self) -> Result<StateTrajectory> {
        let states = (0..self.len())
            .map(|i| self.state(i))
            .collect::<Result<Vec<_>>>()?;
        let derivatives = (0..self.len())
            .map(|i| self.derivative(i))
            .collect::<Result<Vec<_>>>()?;
        if self.pulse.is_some() {
            StateTrajectory::lattice(self.grid.clone(), states, derivatives)
        } else {
            StateTrajectory::new(self.grid.clone(), states, derivatives)
        }
    }
}

/// Samples `q`, `q̇` and `Γ` on `grid`, one independent quadrature per point.
pub fn build_trajectory(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    init: BlochState,
    grid: &[f64],
    pulse: Option<PulseTrain>,
    exec: Execution,
) -> Result<DephasingTrajectory> {
    spec.validate()?;
    init.validate()?;
    if grid.is_empty() {
        return Err(Error::param("grid", "at least one time is required"));
    }
    if !(grid[0] >= 0.0)
        || grid.windows(2).any(|w| !(w[1] > w[0]))
        || grid.iter().any(|t| !t.is_finite())
    {
        return Err(Error::param(
            "grid",
            "times must be finite, non-negative and strictly increasing",
        ));
    }
    let samples: Vec<CoherenceSample> = match pulse {
        None => exec
            .map(grid.len(), |i| {
                free_sample(spec, temperature, omega, grid[i]).map_err(|e| e.at_time(grid[i]))
            })
            .into_iter()
            .collect::<Result<_>>()?,
        Some(p) => {
            let cycles = grid
                .iter()
                .map(|&t| p.cycles_at(t))
                .collect::<Result<Vec<_>>>()?;
            // every lattice point and its successor, computed once
            let mut needed: Vec<u32> = cycles.iter().flat_map(|&n| [n, n + 1]).collect();
            needed.sort_unstable();
            needed.dedup();
            let values = exec
                .map(needed.len(), |i| {
                    lattice_q(spec, temperature, omega, &p, needed[i])
                        .map_err(|e| e.at_time(p.lattice_time(needed[i])))
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let lookup = |n: u32| values[needed.binary_search(&n).expect("lattice point computed")];
            cycles
                .iter()
                .map(|&n| {
                    let (q, gamma) = lookup(n);
                    let (qn, gn) = lookup(n + 1);
                    let h = p.cycle();
                    CoherenceSample {
                        q,
                        q_dot: (qn - q) / h,
                        gamma,
                        gamma_rate: (gn - gamma) / h,
                    }
                })
                .collect()
        }
    };
    for (s, &t) in samples.iter().zip(grid) {
        if s.q.norm() > 1.0 + 1e-10 || s.gamma < -1e-12 {
            return Err(Error::InvariantViolation(format!("|q| = {} > 1", s.q.norm())).at_time(t));
        }
    }
    Ok(DephasingTrajectory {
        grid: grid.to_vec(),
        q: samples.iter().map(|s| s.q).collect(),
        q_dot: samples.iter().map(|s| s.q_dot).collect(),
        gamma: samples.iter().map(|s| s.gamma).collect(),
        gamma_rate: samples.iter().map(|s| s.gamma_rate).collect(),
        init,
        omega,
        pulse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::l1_coherence;
    use proptest::prelude::*;

    fn fig1(lambda: f64) -> OhmicLikeSpec {
        OhmicLikeSpec::new(lambda, 50.0, 1.0).unwrap()
    }

    #[test]
    fn free_bath_precesses() {
        let s = coherence_factor(fig1(0.0), 1.0, 1.0, 2.0, None).unwrap();
        assert!((s.q - Complex64::new(0.0, 2.0).exp()).norm() < 1e-15);
        assert!((s.q.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn origin_sample() {
        let s = coherence_factor(fig1(0.2), 3.0, 1.0, 0.0, None).unwrap();
        assert_eq!(s.q, Complex64::new(1.0, 0.0));
        assert_eq!(s.q_dot, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn vacuum_magnitude_example() {
        let s = coherence_factor(fig1(0.2), 0.0, 1.0, 0.3, None).unwrap();
        assert!((s.q.norm() - (-0.4 * 226f64.ln()).exp()).abs() < 1e-10);
        assert!((s.q.norm() - 0.1144).abs() < 1e-4);
    }

    #[test]
    fn pulsed_time_must_be_on_lattice() {
        let p = PulseTrain::new(0.05).unwrap();
        assert!(matches!(
            coherence_factor(fig1(0.2), 1.0, 1.0, 0.15, Some(p)),
            Err(Error::Domain(_))
        ));
        assert!(coherence_factor(fig1(0.2), 1.0, 1.0, 0.2, Some(p)).is_ok());
    }

    #[test]
    fn reduced_state_examples() {
        let plus = BlochState::plus();
        let rho = reduced_state(&plus, Complex64::new(1.0, 0.0)).unwrap();
        for &(i, j) in &[(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((rho.matrix()[(i, j)] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let tilted = BlochState::new(0.3, 0.4, 0.5).unwrap();
        let rho = reduced_state(&tilted, Complex64::new(0.0, 0.0)).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.75).abs() < 1e-15);
        assert_eq!(rho.matrix()[(0, 1)], Complex64::new(0.0, 0.0));
        let polar = BlochState::new(0.0, 0.0, 0.6).unwrap();
        let a = reduced_state(&polar, Complex64::new(0.3, 0.1)).unwrap();
        let b = reduced_state(&polar, Complex64::new(-0.7, 0.2)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            reduced_state(&plus, Complex64::new(1.1, 0.0)),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn single_point_grid() {
        let traj = build_trajectory(
            fig1(0.2),
            1.0,
            1.0,
            BlochState::plus(),
            &[0.0],
            None,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(traj.q(), &[Complex64::new(1.0, 0.0)]);
        assert_eq!(traj.gamma(), &[0.0]);
    }

    #[test]
    fn strong_coupling_magnitude_decreases() {
        for &temp in &[0.5, 1.0, 5.0] {
            let grid = uniform_grid(0.0, 3.0, 61);
            let traj = build_trajectory(
                fig1(0.2),
                temp,
                1.0,
                BlochState::plus(),
                &grid,
                None,
                Execution::Parallel,
            )
            .unwrap();
            assert!(traj.q().windows(2).all(|w| w[1].norm() < w[0].norm()));
        }
    }

    #[test]
    fn refined_grid_reproduces_shared_points() {
        let coarse = uniform_grid(0.0, 2.0, 11);
        let fine = uniform_grid(0.0, 2.0, 21);
        let a = build_trajectory(
            fig1(0.001),
            1.0,
            1.0,
            BlochState::plus(),
            &coarse,
            None,
            Execution::Parallel,
        )
        .unwrap();
        let b = build_trajectory(
            fig1(0.001),
            1.0,
            1.0,
            BlochState::plus(),
            &fine,
            None,
            Execution::Sequential,
        )
        .unwrap();
        for i in 0..coarse.len() {
            assert!((a.gamma()[i] - b.gamma()[2 * i]).abs() < 1e-9);
        }
    }

    #[test]
    fn q_dot_matches_central_difference() {
        let spec = OhmicLikeSpec::new(0.1, 20.0, 1.0).unwrap();
        let h = 1e-4;
        let t = 0.7;
        let grid = [t - h, t, t + h];
        let traj = build_trajectory(
            spec,
            1.0,
            1.0,
            BlochState::plus(),
            &grid,
            None,
            Execution::Sequential,
        )
        .unwrap();
        let fd = (traj.q()[2] - traj.q()[0]) / (2.0 * h);
        assert!((fd - traj.q_dot()[1]).norm() < 1e-6);
    }

    #[test]
    fn pulsed_trajectory_uses_forward_differences() {
        let p = PulseTrain::new(0.05).unwrap();
        let grid: Vec<f64> = (0..5).map(|n| p.lattice_time(n)).collect();
        let traj = build_trajectory(
            fig1(0.2),
            1.0,
            1.0,
            BlochState::plus(),
            &grid,
            Some(p),
            Execution::Parallel,
        )
        .unwrap();
        for i in 0..4 {
            let fd = (traj.q()[i + 1] - traj.q()[i]) / p.cycle();
            assert!((fd - traj.q_dot()[i]).norm() < 1e-12);
        }
        assert!(traj.to_state_trajectory().unwrap().is_lattice());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let grid = uniform_grid(0.0, 1.0, 9);
        let a = build_trajectory(
            fig1(0.2),
            2.0,
            1.0,
            BlochState::plus(),
            &grid,
            None,
            Execution::Sequential,
        )
        .unwrap();
        let b = build_trajectory(
            fig1(0.2),
            2.0,
            1.0,
            BlochState::plus(),
            &grid,
            None,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_grids_are_rejected() {
        for grid in [&[][..], &[0.5, 0.2][..], &[-1.0, 0.0][..]] {
            assert!(build_trajectory(
                fig1(0.2),
                1.0,
                1.0,
                BlochState::plus(),
                grid,
                None,
                Execution::Sequential
            )
            .is_err());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn invariants_hold_on_random_trajectories(
            lambda in 0.0f64..0.3,
            s in 0.4f64..1.5,
            temp in 0.0f64..5.0,
            theta in 0.0f64..std::f64::consts::PI,
            phi in 0.0f64..std::f64::consts::TAU,
            r in 0.0f64..1.0,
        ) {
            let init = BlochState::new(r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()).unwrap();
            let spec = OhmicLikeSpec::new(lambda, 20.0, s).unwrap();
            let grid = uniform_grid(0.0, 2.0, 9);
            let traj = build_trajectory(spec, temp, 1.0, init, &grid, None, Execution::Sequential).unwrap();
            prop_assert_eq!(traj.gamma()[0], 0.0);
            prop_assert!((traj.q()[0].norm() - 1.0).abs() < 1e-15);
            let rho0 = traj.state(0).unwrap();
            for i in 0..traj.len() {
                let q = traj.q()[i];
                prop_assert!(traj.gamma()[i] >= 0.0);
                prop_assert!((q.norm() - (-traj.gamma()[i]).exp()).abs() < 1e-14);
                let expected = Complex64::new(-traj.gamma_rate()[i], 1.0) * q;
                prop_assert!((traj.q_dot()[i] - expected).norm() < 1e-8);
                let rho = traj.state(i).unwrap();
                prop_assert_eq!(rho.matrix()[(0, 0)], rho0.matrix()[(0, 0)]);
                let l1 = l1_coherence(&rho);
                prop_assert!((l1 - init.transverse() * q.norm()).abs() < 1e-10);
            }
        }
    }
}
