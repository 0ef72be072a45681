//! Quantum speed limit times.
//!
//! The unified bound for an evolution from `ρ_t` to `ρ_{t+τ_D}` is
//!
//! ```text
//! τ_QSL = max{ 1/⟨Σ_i σ_i ρ_i⟩, 1/⟨√(Σ_i σ_i²)⟩ } · |f − 1| · Tr ρ_t²
//! ```
//!
//! where `σ_i` and `ρ_i` are the ordered singular values of `ρ̇` and `ρ`,
//! `⟨·⟩` is the time average over the window and `f` the relative purity.

use num_complex::Complex64;

use crate::bath::OhmicLikeSpec;
use crate::dephasing::{coherence_factor, reduced_state, BlochState, PulseTrain};
use crate::linalg::{
    hilbert_schmidt_product, partial_trace_b_matrix, singular_values, DensityMatrix,
    MatrixDerivative,
};
use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

/// Relative tolerance of the closed-form time average.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

const GRID_MATCH_TOL: f64 = 1e-9;

/// Which argument of the max set the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `1/⟨Σ σ_i ρ_i⟩`, the operator-norm (Margolus–Levitin type) argument.
    OperatorSum,
    /// `1/⟨√Σ σ_i²⟩`, the Hilbert–Schmidt (Mandelstam–Tamm type) argument.
    RootSumSquare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslResult {
    pub tau_qsl: f64,
    pub tau_d: f64,
    pub ratio: f64,
    pub branch: Branch,
    pub f_final: f64,
}

impl QslResult {
    fn new(tau_qsl: f64, tau_d: f64, branch: Branch, f_final: f64) -> Result<Self> {
        let ratio = tau_qsl / tau_d;
        if !(0.0..=1.0 + 1e-6).contains(&ratio) {
            return Err(Error::InvariantViolation(format!(
                "speed-limit ratio {ratio} outside [0, 1]"
            )));
        }
        Ok(Self {
            tau_qsl,
            tau_d,
            ratio,
            branch,
            f_final,
        })
    }
}

/// `Tr[ρ_final ρ_initial] / Tr[ρ_initial²]`.
pub fn relative_purity(initial: &DensityMatrix, fin: &DensityMatrix) -> Result<f64> {
    if initial.dim() != fin.dim() {
        return Err(Error::Dimension(format!(
            "relative purity of {}×{} and {}×{} states",
            initial.dim(),
            initial.dim(),
            fin.dim(),
            fin.dim()
        )));
    }
    let overlap = hilbert_schmidt_product(initial.matrix(), fin.matrix())?.re;
    Ok(overlap / initial.purity())
}

/// States with their exact time derivatives on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    grid: Vec<f64>,
    states: Vec<DensityMatrix>,
    derivatives: Vec<MatrixDerivative>,
    lattice: bool,
}

impl StateTrajectory {
    pub fn new(
        grid: Vec<f64>,
        states: Vec<DensityMatrix>,
        derivatives: Vec<MatrixDerivative>,
    ) -> Result<Self> {
        Self::build(grid, states, derivatives, false)
    }

    /// A trajectory sampled only on a pulse lattice, with difference
    /// derivatives. Only the closed-form bound accepts it.
    pub fn lattice(
        grid: Vec<f64>,
        states: Vec<DensityMatrix>,
        derivatives: Vec<MatrixDerivative>,
    ) -> Result<Self> {
        Self::build(grid, states, derivatives, true)
    }

    fn build(
        grid: Vec<f64>,
        states: Vec<DensityMatrix>,
        derivatives: Vec<MatrixDerivative>,
        lattice: bool,
    ) -> Result<Self> {
        if grid.len() != states.len() || grid.len() != derivatives.len() {
            return Err(Error::Dimension(format!(
                "{} times, {} states, {} derivatives",
                grid.len(),
                states.len(),
                derivatives.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("grid", "times must be strictly increasing"));
        }
        if let Some(first) = states.first() {
            let d = first.dim();
            if states.iter().any(|s| s.dim() != d) || derivatives.iter().any(|m| m.dim() != d) {
                return Err(Error::Dimension("mixed dimensions in trajectory".into()));
            }
        }
        Ok(Self {
            grid,
            states,
            derivatives,
            lattice,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }
    pub fn derivatives(&self) -> &[MatrixDerivative] {
        &self.derivatives
    }
    pub fn is_lattice(&self) -> bool {
        self.lattice
    }
    pub fn len(&self) -> usize {
        self.grid.len()
    }
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the grid node at `t`, if there is one.
    pub fn node(&self, t: f64) -> Option<usize> {
        let tol = GRID_MATCH_TOL * t.abs().max(1.0);
        let i = self.grid.partition_point(|&g| g < t - tol);
        (i < self.grid.len() && (self.grid[i] - t).abs() <= tol).then_some(i)
    }

    /// The trajectory of the first qubit of a two-qubit trajectory.
    pub fn reduce_to_first(&self) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| DensityMatrix::new(partial_trace_b_matrix(s.matrix())?))
            .collect::<Result<Vec<_>>>()?;
        let derivatives = self
            .derivatives
            .iter()
            .map(|d| MatrixDerivative::new(partial_trace_b_matrix(d.matrix())?))
            .collect::<Result<Vec<_>>>()?;
        Self::build(self.grid.clone(), states, derivatives, self.lattice)
    }
}

/// Unified bound from trajectory samples, with trapezoidal time averages.
/// Both window ends must be grid nodes.
pub fn qsl_generic(traj: &StateTrajectory, t: f64, tau_d: f64) -> Result<QslResult> {
    if traj.is_lattice() {
        return Err(Error::Domain(
            "the sampled bound needs exact derivatives; use the closed form for pulsed dynamics"
                .into(),
        ));
    }
    if !(tau_d > 0.0 && tau_d.is_finite()) {
        return Err(Error::param(
            "tau_d",
            format!("driving time must be positive, got {tau_d}"),
        ));
    }
    let (Some(&first), Some(&last)) = (traj.grid.first(), traj.grid.last()) else {
        return Err(Error::Range("empty trajectory".into()));
    };
    let end = t + tau_d;
    let tol = GRID_MATCH_TOL * end.abs().max(1.0);
    if t < first - tol || end > last + tol {
        return Err(Error::Range(format!(
            "window [{t}, {end}] exceeds trajectory [{first}, {last}]"
        )));
    }
    let (Some(i0), Some(i1)) = (traj.node(t), traj.node(end)) else {
        return Err(Error::Range(format!(
            "window ends {t} and {end} must be grid nodes"
        )));
    };

    let mut op_sum = Vec::with_capacity(i1 - i0 + 1);
    let mut rss = Vec::with_capacity(i1 - i0 + 1);
    for i in i0..=i1 {
        let sigma = singular_values(traj.derivatives[i].matrix())?;
        // singular values of a PSD matrix are its eigenvalues
        let rho = traj.states[i].eigenvalues();
        op_sum.push(
            sigma
                .iter()
                .zip(&rho)
                .map(|(s, r)| s * r.max(0.0))
                .sum::<f64>(),
        );
        rss.push(sigma.iter().map(|s| s * s).sum::<f64>().sqrt());
    }
    let times = &traj.grid[i0..=i1];
    let avg = |v: &[f64]| trapezoid(times, v) / (times[times.len() - 1] - times[0]);
    let (a, b) = (avg(&op_sum), avg(&rss));

    let rho_t = &traj.states[i0];
    let f = relative_purity(rho_t, &traj.states[i1])?;
    let branch = if a <= b {
        Branch::OperatorSum
    } else {
        Branch::RootSumSquare
    };
    if (f - 1.0).abs() <= 1e-12 {
        return QslResult::new(0.0, tau_d, branch, f);
    }
    if a <= 0.0 {
        return Err(Error::Inconsistency(format!(
            "frozen dynamics on [{t}, {end}] but relative purity changed to {f}"
        )));
    }
    let speed = a.min(b);
    QslResult::new((f - 1.0).abs() * rho_t.purity() / speed, tau_d, branch, f)
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Closed-form bound for the dephasing qubit:
///
/// ```text
/// τ_QSL = ½√(v_x²+v_y²)·|(q_t − q_{t+τ_D}) q_t* + c.c.| / ((1/τ_D)∫|q̇|)
/// ```
///
/// with `|q̇| = e^{−Γ}√(Γ̇² + Ω²)` integrated by adaptive Simpson. Under a pulse
/// train the window must sit on the lattice and the average speed is the
/// chord length of `q` over the window divided by `τ_D`.
pub fn qsl_dephasing_closed(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    init: BlochState,
    t: f64,
    tau_d: f64,
    pulse: Option<PulseTrain>,
) -> Result<QslResult> {
    init.validate()?;
    let r = init.transverse();
    if r <= 1e-14 {
        return Err(Error::Degenerate(
            "initial state has no coherence; the bound is identically zero".into(),
        ));
    }
    if !(tau_d > 0.0 && tau_d.is_finite()) {
        return Err(Error::param(
            "tau_d",
            format!("driving time must be positive, got {tau_d}"),
        ));
    }
    let start = coherence_factor(spec, temperature, omega, t, pulse)?;
    let stop = coherence_factor(spec, temperature, omega, t + tau_d, pulse)?;
    let speed = match pulse {
        None => {
            let integral = adaptive_simpson(
                |s| {
                    let smp = coherence_factor(spec, temperature, omega, s, None)
                        .map_err(|e| e.at_time(s))?;
                    Ok(smp.q_dot.norm())
                },
                t,
                t + tau_d,
                CLOSED_FORM_TOL,
                4,
                40,
            )?;
            integral / tau_d
        }
        Some(p) => {
            let n0 = p.cycles_at(t)?;
            let n1 = p.cycles_at(t + tau_d)?;
            let mut prev = start.q;
            let mut chord = 0.0;
            for n in n0 + 1..=n1 {
                let q = coherence_factor(spec, temperature, omega, p.lattice_time(n), Some(p))?.q;
                chord += (q - prev).norm();
                prev = q;
            }
            chord / tau_d
        }
    };
    let cross = (start.q - stop.q) * start.q.conj();
    let numerator = 0.5 * r * (2.0 * cross.re).abs();
    let rho_t = reduced_state(&init, start.q)?;
    let f = relative_purity(&rho_t, &reduced_state(&init, stop.q)?)?;
    // `numerator` is free of the cancellation in `1 − f`, so it stays
    // meaningful for strongly decohered starts
    if numerator == 0.0 {
        return QslResult::new(0.0, tau_d, Branch::OperatorSum, f);
    }
    if speed <= 0.0 {
        return Err(Error::Inconsistency(format!(
            "zero speed on [{t}, {}] with f = {f}",
            t + tau_d
        )));
    }
    QslResult::new(numerator / speed, tau_d, Branch::OperatorSum, f)
}

/// `τ_QSL / (τ_D · C_t)` with `C_t = √(v_x²+v_y²) e^{−Γ_t}` the l1 coherence at
/// the start of the window.
pub fn qsl_coherence_ratio(
    spec: OhmicLikeSpec,
    temperature: f64,
    omega: f64,
    init: BlochState,
    t: f64,
    tau_d: f64,
) -> Result<f64> {
    let res = qsl_dephasing_closed(spec, temperature, omega, init, t, tau_d, None)?;
    let q: Complex64 = coherence_factor(spec, temperature, omega, t, None)?.q;
    let c = init.transverse() * q.norm();
    if c < 1e-14 {
        return Err(Error::Degenerate(format!(
            "coherence {c:e} at t = {t} is too small"
        )));
    }
    Ok(res.tau_qsl / (tau_d * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::{build_trajectory, uniform_grid};
    use crate::Execution;
    use proptest::prelude::*;

    fn fig1(lambda: f64) -> OhmicLikeSpec {
        OhmicLikeSpec::new(lambda, 50.0, 1.0).unwrap()
    }

    fn pure_plus() -> DensityMatrix {
        DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn relative_purity_examples() {
        let plus = pure_plus();
        let minus = DensityMatrix::from_bloch([-1.0, 0.0, 0.0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((relative_purity(&plus, &plus).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_purity(&plus, &mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!(relative_purity(&plus, &minus).unwrap().abs() < 1e-15);
        let four = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(
            relative_purity(&plus, &four),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn stationary_trajectory_has_zero_bound() {
        let grid = vec![0.0, 0.5, 1.0];
        let states = vec![pure_plus(); 3];
        let derivs = vec![MatrixDerivative::zero(2); 3];
        let traj = StateTrajectory::new(grid, states, derivs).unwrap();
        let res = qsl_generic(&traj, 0.0, 1.0).unwrap();
        assert_eq!(res.tau_qsl, 0.0);
        assert!(matches!(qsl_generic(&traj, 0.5, 1.0), Err(Error::Range(_))));
        assert!(matches!(qsl_generic(&traj, 0.2, 0.5), Err(Error::Range(_))));
    }

    #[test]
    fn free_precession_closed_form() {
        for &t in &[0.0, 0.4, 2.0] {
            let res = qsl_dephasing_closed(fig1(0.0), 1.0, 1.0, BlochState::plus(), t, 1.0, None)
                .unwrap();
            assert!((res.tau_qsl - (1.0 - 1f64.cos())).abs() < 1e-9);
            assert_eq!(res.branch, Branch::OperatorSum);
        }
    }

    #[test]
    fn incoherent_start_is_degenerate() {
        let init = BlochState::new(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            qsl_dephasing_closed(fig1(0.2), 1.0, 1.0, init, 0.0, 1.0, None),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn generic_matches_closed_form_on_dephasing() {
        for &(lambda, temp, t) in &[(0.2, 1.0, 0.3), (0.001, 5.0, 1.0), (0.05, 0.0, 0.5)] {
            let spec = fig1(lambda);
            let grid = uniform_grid(t, t + 1.0, 2001);
            let traj = build_trajectory(
                spec,
                temp,
                1.0,
                BlochState::plus(),
                &grid,
                None,
                Execution::Parallel,
            )
            .unwrap()
            .to_state_trajectory()
            .unwrap();
            let generic = qsl_generic(&traj, t, 1.0).unwrap();
            let closed =
                qsl_dephasing_closed(spec, temp, 1.0, BlochState::plus(), t, 1.0, None).unwrap();
            assert_eq!(generic.branch, Branch::OperatorSum);
            assert!(
                ((generic.tau_qsl - closed.tau_qsl) / closed.tau_qsl).abs() < 1e-4,
                "Λ={lambda}, T={temp}, t={t}: {} vs {}",
                generic.tau_qsl,
                closed.tau_qsl
            );
        }
    }

    #[test]
    fn generic_refuses_pulsed_trajectories() {
        let p = PulseTrain::new(0.05).unwrap();
        let grid: Vec<f64> = (0..=10).map(|n| p.lattice_time(n)).collect();
        let traj = build_trajectory(
            fig1(0.2),
            1.0,
            1.0,
            BlochState::plus(),
            &grid,
            Some(p),
            Execution::Parallel,
        )
        .unwrap()
        .to_state_trajectory()
        .unwrap();
        assert!(matches!(
            qsl_generic(&traj, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
        let closed =
            qsl_dephasing_closed(fig1(0.2), 1.0, 1.0, BlochState::plus(), 0.0, 1.0, Some(p))
                .unwrap();
        assert!(closed.ratio > 0.0 && closed.ratio <= 1.0);
    }

    #[test]
    fn coherence_ratio_at_origin_and_free_bath() {
        let init = BlochState::new(0.6, 0.0, 0.0).unwrap();
        let at0 = qsl_coherence_ratio(fig1(0.2), 1.0, 1.0, init, 0.0, 1.0).unwrap();
        let res = qsl_dephasing_closed(fig1(0.2), 1.0, 1.0, init, 0.0, 1.0, None).unwrap();
        assert!((at0 - res.tau_qsl / 0.6).abs() < 1e-12);
        let a = qsl_coherence_ratio(fig1(0.0), 1.0, 1.0, init, 0.0, 1.0).unwrap();
        let b = qsl_coherence_ratio(fig1(0.0), 1.0, 1.0, init, 1.7, 1.0).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn strong_coupling_ratio_falls_with_temperature() {
        let mut prev = f64::INFINITY;
        for &temp in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let r = qsl_dephasing_closed(fig1(0.2), temp, 1.0, BlochState::plus(), 0.3, 1.0, None)
                .unwrap()
                .ratio;
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn reduce_to_first_traces_out_second_qubit() {
        let ab = DensityMatrix::product(&pure_plus(), &DensityMatrix::maximally_mixed(2).unwrap())
            .unwrap();
        let traj =
            StateTrajectory::new(vec![0.0], vec![ab], vec![MatrixDerivative::zero(4)]).unwrap();
        let a = traj.reduce_to_first().unwrap();
        assert_eq!(a.states()[0].dim(), 2);
        assert!((a.states()[0].matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn ratio_never_exceeds_one(
            lambda in 0.0f64..0.3,
            temp in 0.0f64..5.0,
            t in 0.0f64..2.0,
            tau_d in 0.2f64..2.0,
            phi in 0.0f64..std::f64::consts::TAU,
        ) {
            let init = BlochState::new(phi.cos() * 0.9, phi.sin() * 0.9, 0.1).unwrap();
            let res = qsl_dephasing_closed(fig1(lambda), temp, 1.0, init, t, tau_d, None).unwrap();
            prop_assert!(res.ratio >= 0.0 && res.ratio <= 1.0 + 1e-6);
            prop_assert_eq!(res.branch, Branch::OperatorSum);
        }
    }
}
