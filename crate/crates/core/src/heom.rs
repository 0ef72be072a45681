//! Hierarchical equations of motion for two qubits `A ⊗ B`, with qubit B
//! coupled to a Drude bath through the system operator `f`.
//!
//! For every multi-index `l = (l_0, …, l_K)` with `Σ l_k ≤ L`,
//!
//! ```text
//! ρ̇_l = −(i H_s^× + l·ν) ρ_l + i f^× Σ_k ρ_{l+e_k}
//!       + Σ_k l_k (i ζ_k^R f^× − ζ_k^I f^∘) ρ_{l−e_k}
//!       − δ(t) f^× f^× ρ_l
//! ```
//!
//! The last line accounts for the Matsubara terms beyond the cutoff `K`,
//! treated as instantaneous with the accumulated weight
//! `δ(t) = Σ_{k>K} ζ_k (1 − e^{−ν_k t})/ν_k`; it can be switched off.
//! Operators act on row-major 4×4 matrices flattened to 16 components; the
//! basis index is `2a + b` with `a` the state of qubit A.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::bath::{
    decoherence_factor, drude_expansion, matsubara_cutoff, DrudeSpec, ExponentialExpansion,
    DEFAULT_MATSUBARA_TOL,
};
use crate::linalg::{
    eigvalsh, pauli, singular_values, CMatrix, DensityMatrix, MatrixDerivative,
    ENTROPY_POSITIVITY_TOL,
};
use crate::qsl::StateTrajectory;
use crate::{Error, Execution, Result};

const DIM: usize = 4;
const SUPER: usize = DIM * DIM;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const SLOTS_PER_TASK: usize = 32;

/// Marker for a neighbour outside the hierarchy.
pub const NO_NEIGHBOR: u32 = u32::MAX;

/// Default cap on the number of auxiliary operators.
pub const DEFAULT_ADO_BUDGET: usize = 200_000;

/// `σ_z` acting on qubit B.
pub fn sigma_z_b() -> CMatrix {
    pauli::identity().kron(&pauli::z())
}

/// `σ_x` acting on qubit B.
pub fn sigma_x_b() -> CMatrix {
    pauli::identity().kron(&pauli::x())
}

/// `σ_z ⊗ σ_z`.
pub fn zz() -> CMatrix {
    pauli::z().kron(&pauli::z())
}

/// `|+⟩⊗|+⟩`, every entry equal to 1/4.
pub fn plus_plus() -> DensityMatrix {
    let h = Complex64::new(0.5, 0.0);
    DensityMatrix::pure(&[h, h, h, h]).expect("normalised product state")
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeomConfig {
    /// Frequency shared by both qubits.
    pub omega: f64,
    pub g0: f64,
    pub drude: DrudeSpec,
    pub temperature: f64,
    /// Matsubara cutoff `K`; `None` applies [`matsubara_cutoff`].
    pub cutoff: Option<usize>,
    /// Hierarchy depth `L`.
    pub depth: usize,
    /// System operator `f` coupled to the bath.
    pub coupling_op: CMatrix,
    /// Two-qubit interaction, multiplied by `g0` in `H_s`.
    pub interaction_op: CMatrix,
    /// Integrator step; `None` picks one from the stability guards.
    pub dt: Option<f64>,
    pub t_max: f64,
    pub output_step: f64,
    pub tail_correction: bool,
    pub matsubara_tol: f64,
    pub ado_budget: usize,
    pub exec: Execution,
}

impl HeomConfig {
    /// `f = σ_z^B`, interaction `σ_z ⊗ σ_z`.
    pub fn literal(omega: f64, g0: f64, drude: DrudeSpec, temperature: f64) -> Self {
        Self {
            omega,
            g0,
            drude,
            temperature,
            cutoff: None,
            depth: 4,
            coupling_op: sigma_z_b(),
            interaction_op: zz(),
            dt: None,
            t_max: 10.0,
            output_step: 0.05,
            tail_correction: true,
            matsubara_tol: DEFAULT_MATSUBARA_TOL,
            ado_budget: DEFAULT_ADO_BUDGET,
            exec: Execution::default(),
        }
    }

    /// As [`HeomConfig::literal`] but with `f = σ_x^B`, which does not commute
    /// with `H_s` and lets qubit A feel the bath temperature through B.
    pub fn transverse(omega: f64, g0: f64, drude: DrudeSpec, temperature: f64) -> Self {
        Self {
            coupling_op: sigma_x_b(),
            ..Self::literal(omega, g0, drude, temperature)
        }
    }

    /// `H_s = (Ω/2)(σ_z^A + σ_z^B) + g0·interaction_op`.
    pub fn hamiltonian(&self) -> CMatrix {
        let free = &pauli::z().kron(&pauli::identity()) + &pauli::identity().kron(&pauli::z());
        &free.scale_real(0.5 * self.omega) + &self.interaction_op.scale_real(self.g0)
    }

    pub fn validate(&self) -> Result<()> {
        self.drude.validate()?;
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !self.omega.is_finite() {
            return Err(Error::param("omega", "must be finite"));
        }
        if !self.g0.is_finite() {
            return Err(Error::param("g0", "must be finite"));
        }
        if !finite_pos(self.temperature) {
            return Err(Error::param("temperature", "the hierarchy needs T > 0"));
        }
        if self.depth < 1 {
            return Err(Error::param(
                "depth",
                "hierarchy depth L must be at least 1",
            ));
        }
        if !finite_pos(self.t_max) {
            return Err(Error::param("t_max", "must be positive"));
        }
        if !finite_pos(self.output_step) {
            return Err(Error::param("output_step", "must be positive"));
        }
        if let Some(dt) = self.dt {
            if !finite_pos(dt) {
                return Err(Error::param("dt", "must be positive"));
            }
        }
        if !(self.matsubara_tol > 0.0) {
            return Err(Error::param("matsubara_tol", "must be positive"));
        }
        for (name, op) in [
            ("coupling_op", &self.coupling_op),
            ("interaction_op", &self.interaction_op),
        ] {
            if op.dim() != DIM || op.hermiticity_defect() > 1e-12 * op.max_abs().max(1.0) {
                return Err(Error::param(name, "must be a Hermitian 4×4 operator"));
            }
        }
        Ok(())
    }

    fn spectral_radius(m: &CMatrix) -> Result<f64> {
        Ok(eigvalsh(m)?.iter().fold(0.0f64, |a, v| a.max(v.abs())))
    }

    /// `K` from the configuration or the cutoff rule.
    pub fn resolved_cutoff(&self) -> Result<usize> {
        if let Some(k) = self.cutoff {
            return Ok(k);
        }
        let f = &self.coupling_op;
        let comm = self.hamiltonian().commutator(f)?;
        let scale = 2.0 * singular_values(f)?[0] * singular_values(&comm)?[0];
        matsubara_cutoff(
            self.drude,
            self.temperature,
            self.omega,
            scale,
            self.matsubara_tol,
        )
    }

    fn is_literal(&self) -> bool {
        let close = |a: &CMatrix, b: &CMatrix| (a - b).max_abs() <= 1e-12;
        close(&self.coupling_op, &sigma_z_b()) && close(&self.interaction_op, &zz())
    }
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Number of multi-indices over `modes` terms with total at most `depth`.
pub fn ado_count(modes: usize, depth: usize) -> Option<usize> {
    binomial(depth + modes, modes)
}

/// Enumeration of the multi-indices in graded lexicographic order (by total,
/// then lexicographically with larger leading entries first), with
/// neighbour tables for `l ± e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyIndex {
    modes: usize,
    depth: usize,
    indices: Vec<u16>,
    up: Vec<u32>,
    down: Vec<u32>,
}

impl HierarchyIndex {
    pub fn new(modes: usize, depth: usize, budget: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::param(
                "cutoff",
                "at least one exponential term is required",
            ));
        }
        if depth > u16::MAX as usize {
            return Err(Error::param("depth", "too deep"));
        }
        let count = ado_count(modes, depth).unwrap_or(usize::MAX);
        if count > budget || count >= NO_NEIGHBOR as usize {
            return Err(Error::Capacity {
                requested: count,
                budget,
            });
        }
        let mut indices = Vec::with_capacity(count * modes);
        let mut cur = vec![0u16; modes];
        for total in 0..=depth {
            compositions(total, 0, &mut cur, &mut indices);
        }
        let lookup: HashMap<&[u16], u32> = indices
            .chunks_exact(modes)
            .enumerate()
            .map(|(slot, l)| (l, slot as u32))
            .collect();
        let mut up = vec![NO_NEIGHBOR; count * modes];
        let mut down = vec![NO_NEIGHBOR; count * modes];
        let mut probe = vec![0u16; modes];
        for (slot, l) in indices.chunks_exact(modes).enumerate() {
            let total: usize = l.iter().map(|&v| v as usize).sum();
            for k in 0..modes {
                probe.copy_from_slice(l);
                if total < depth {
                    probe[k] += 1;
                    up[slot * modes + k] = lookup[probe.as_slice()];
                    probe[k] -= 1;
                }
                if l[k] > 0 {
                    probe[k] -= 1;
                    down[slot * modes + k] = lookup[probe.as_slice()];
                }
            }
        }
        Ok(Self {
            modes,
            depth,
            indices,
            up,
            down,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len() / self.modes
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn multi_index(&self, slot: usize) -> &[u16] {
        &self.indices[slot * self.modes..(slot + 1) * self.modes]
    }

    pub fn slot(&self, l: &[u16]) -> Option<usize> {
        self.indices.chunks_exact(self.modes).position(|c| c == l)
    }

    /// Slot of `l + e_k`, or [`NO_NEIGHBOR`] beyond the truncation.
    pub fn up(&self, slot: usize, k: usize) -> u32 {
        self.up[slot * self.modes + k]
    }

    /// Slot of `l − e_k`, or [`NO_NEIGHBOR`] when `l_k = 0`.
    pub fn down(&self, slot: usize, k: usize) -> u32 {
        self.down[slot * self.modes + k]
    }
}

fn compositions(remaining: usize, pos: usize, cur: &mut [u16], out: &mut Vec<u16>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining as u16;
        out.extend_from_slice(cur);
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v as u16;
        compositions(remaining - v, pos + 1, cur, out);
    }
}

/// Auxiliary operators over a hierarchy; slot 0 is the physical state.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyState {
    index: Arc<HierarchyIndex>,
    ados: Vec<Complex64>,
    t: f64,
}

impl HierarchyState {
    pub fn index(&self) -> &HierarchyIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn ado(&self, slot: usize) -> CMatrix {
        CMatrix::from_slice(DIM, &self.ados[slot * SUPER..(slot + 1) * SUPER]).expect("4×4 block")
    }

    pub fn set_ado(&mut self, slot: usize, m: &CMatrix) -> Result<()> {
        if m.dim() != DIM {
            return Err(Error::Dimension(format!(
                "ADO must be 4×4, got {0}×{0}",
                m.dim()
            )));
        }
        self.ados[slot * SUPER..(slot + 1) * SUPER].copy_from_slice(m.as_slice());
        Ok(())
    }
}

/// Physical state in slot 0, every auxiliary operator zero.
pub fn build_hierarchy(config: &HeomConfig, rho0: &DensityMatrix) -> Result<HierarchyState> {
    config.validate()?;
    if rho0.dim() != DIM {
        return Err(Error::Dimension(format!(
            "two-qubit state required, got dim {}",
            rho0.dim()
        )));
    }
    let modes = config.resolved_cutoff()? + 1;
    let index = Arc::new(HierarchyIndex::new(modes, config.depth, config.ado_budget)?);
    let mut ados = vec![ZERO; index.len() * SUPER];
    ados[..SUPER].copy_from_slice(rho0.matrix().as_slice());
    Ok(HierarchyState {
        index,
        ados,
        t: 0.0,
    })
}

/// Sparse 16×16 superoperator as (target, source, coefficient) triples.
#[derive(Debug, Clone, Default)]
struct Sparse {
    entries: Vec<(u8, u8, Complex64)>,
}

impl Sparse {
    fn from_dense(m: &[[Complex64; SUPER]; SUPER]) -> Self {
        let mut entries = Vec::new();
        for (t, row) in m.iter().enumerate() {
            for (s, &c) in row.iter().enumerate() {
                if c != ZERO {
                    entries.push((t as u8, s as u8, c));
                }
            }
        }
        Self { entries }
    }

    #[inline]
    fn apply(&self, x: &[Complex64], out: &mut [Complex64], scale: f64) {
        for &(t, s, c) in &self.entries {
            out[t as usize] += c * x[s as usize] * scale;
        }
    }
}

/// `a·(A X) + b·(X A)` as a dense superoperator.
fn sandwich(a_left: Complex64, a_right: Complex64, m: &CMatrix) -> [[Complex64; SUPER]; SUPER] {
    let mut s = [[ZERO; SUPER]; SUPER];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                s[i * DIM + j][k * DIM + j] += a_left * m[(i, k)];
                s[i * DIM + j][i * DIM + k] += a_right * m[(k, j)];
            }
        }
    }
    s
}

fn compose(
    a: &[[Complex64; SUPER]; SUPER],
    b: &[[Complex64; SUPER]; SUPER],
) -> [[Complex64; SUPER]; SUPER] {
    let mut c = [[ZERO; SUPER]; SUPER];
    for i in 0..SUPER {
        for k in 0..SUPER {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..SUPER {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// A configuration compiled into the objects the right-hand side needs.
#[derive(Debug, Clone)]
pub struct HeomSystem {
    index: Arc<HierarchyIndex>,
    expansion: ExponentialExpansion,
    zeta_re: Vec<f64>,
    zeta_im: Vec<f64>,
    damping: Vec<f64>,
    liouvillian: Sparse,
    couple_op: Sparse,
    anti_op: Sparse,
    tail_op: Sparse,
    tail: bool,
    /// Width of the graded start, in time units.
    layer: f64,
    exec: Execution,
    h_radius: f64,
    f_norm: f64,
}

impl HeomSystem {
    pub fn new(config: &HeomConfig) -> Result<Self> {
        config.validate()?;
        let cutoff = config.resolved_cutoff()?;
        let index = Arc::new(HierarchyIndex::new(
            cutoff + 1,
            config.depth,
            config.ado_budget,
        )?);
        Self::with_index(config, index)
    }

    fn with_index(config: &HeomConfig, index: Arc<HierarchyIndex>) -> Result<Self> {
        let expansion = drude_expansion(config.drude, config.temperature, index.modes() - 1)?;
        let nu: Vec<f64> = expansion.terms().iter().map(|t| t.nu).collect();
        let damping = (0..index.len())
            .map(|slot| {
                index
                    .multi_index(slot)
                    .iter()
                    .zip(&nu)
                    .map(|(&l, v)| l as f64 * v)
                    .sum()
            })
            .collect();
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let h = config.hamiltonian();
        let f = &config.coupling_op;
        let f_comm = sandwich(one, -one, f);
        let f_comm_sq = compose(&f_comm, &f_comm);
        let neg = |m: [[Complex64; SUPER]; SUPER]| m.map(|row| row.map(|c| -c));
        Ok(Self {
            zeta_re: expansion.terms().iter().map(|t| t.zeta.re).collect(),
            zeta_im: expansion.terms().iter().map(|t| t.zeta.im).collect(),
            damping,
            liouvillian: Sparse::from_dense(&sandwich(-i, i, &h)),
            couple_op: Sparse::from_dense(&sandwich(i, -i, f)),
            anti_op: Sparse::from_dense(&sandwich(-one, -one, f)),
            tail_op: Sparse::from_dense(&neg(f_comm_sq)),
            tail: config.tail_correction,
            layer: TAIL_LAYER_DECAYS
                / (2.0 * std::f64::consts::PI * config.temperature * index.modes() as f64),
            exec: config.exec,
            h_radius: HeomConfig::spectral_radius(&h)?,
            f_norm: singular_values(f)?[0],
            index,
            expansion,
        })
    }

    pub fn index(&self) -> &HierarchyIndex {
        &self.index
    }

    pub fn expansion(&self) -> &ExponentialExpansion {
        &self.expansion
    }

    /// Largest step allowed by the stability guards:
    /// `dt·(ν_max + ρ(H_s)) < 0.5` and, for the whole hierarchy,
    /// `dt·(L·ν_max + 2ρ(H_s) + 2‖f‖√((L+1)Σ|ζ_k|) + 4δ_∞‖f‖²) ≤ 2.5`.
    pub fn max_stable_step(&self) -> f64 {
        let nu_max = self.expansion.nu_max();
        let l = self.index.depth() as f64;
        let zsum: f64 = self.expansion.terms().iter().map(|t| t.zeta.norm()).sum();
        let tail = if self.tail {
            self.expansion.residual_weight().abs()
        } else {
            0.0
        };
        let spread = l * nu_max
            + 2.0 * self.h_radius
            + 2.0 * self.f_norm * ((l + 1.0) * zsum).sqrt()
            + 4.0 * tail * self.f_norm * self.f_norm;
        (0.5 / (nu_max + self.h_radius)).min(2.5 / spread)
    }

    fn check_step(&self, dt: f64) -> Result<()> {
        let limit = self.max_stable_step();
        if dt >= limit * (1.0 + 1e-12) {
            return Err(Error::param(
                "dt",
                format!("step {dt} violates the stability guard (limit {limit:.3e})"),
            ));
        }
        Ok(())
    }

    /// Derivative of every ADO at time `t`, written into `out`.
    pub fn rhs_into(&self, t: f64, y: &[Complex64], out: &mut [Complex64]) {
        self.rhs_with_tail(self.tail_weight(t), y, out);
    }

    fn tail_weight(&self, t: f64) -> f64 {
        if self.tail {
            self.expansion.residual(t)
        } else {
            0.0
        }
    }

    /// Tail weight for the two midpoint stages of a step from `t` to `t + h`,
    /// chosen so the RK4 quadrature weights reproduce `∫δ` over the step.
    /// `δ` grows like `t ln(1/t)` at the origin, and sampling it pointwise
    /// there costs two orders of accuracy.
    fn tail_midpoint(&self, t: f64, h: f64, start: f64, end: f64) -> f64 {
        if !self.tail {
            return 0.0;
        }
        let mean =
            (self.expansion.residual_integral(t + h) - self.expansion.residual_integral(t)) / h;
        (6.0 * mean - start - end) / 4.0
    }

    fn rhs_with_tail(&self, delta: f64, y: &[Complex64], out: &mut [Complex64]) {
        self.exec
            .for_each_chunk(out, SUPER * SLOTS_PER_TASK, |chunk, block| {
                let first = chunk * SLOTS_PER_TASK;
                for (j, o) in block.chunks_exact_mut(SUPER).enumerate() {
                    self.slot_rhs(first + j, delta, y, o);
                }
            });
    }

    fn slot_rhs(&self, slot: usize, delta: f64, y: &[Complex64], out: &mut [Complex64]) {
        let me = &y[slot * SUPER..(slot + 1) * SUPER];
        let g = self.damping[slot];
        for (o, &x) in out.iter_mut().zip(me) {
            *o = -g * x;
        }
        self.liouvillian.apply(me, out, 1.0);
        if delta != 0.0 {
            self.tail_op.apply(me, out, delta);
        }
        let l = self.index.multi_index(slot);
        let mut couple = [ZERO; SUPER];
        let mut anti = [ZERO; SUPER];
        let mut has_anti = false;
        for (k, &lk) in l.iter().enumerate() {
            let u = self.index.up(slot, k);
            if u != NO_NEIGHBOR {
                let src = &y[u as usize * SUPER..(u as usize + 1) * SUPER];
                couple.iter_mut().zip(src).for_each(|(c, &x)| *c += x);
            }
            if lk > 0 {
                let d = self.index.down(slot, k) as usize;
                let src = &y[d * SUPER..(d + 1) * SUPER];
                let w = lk as f64;
                let re = w * self.zeta_re[k];
                couple.iter_mut().zip(src).for_each(|(c, &x)| *c += x * re);
                if self.zeta_im[k] != 0.0 {
                    let im = w * self.zeta_im[k];
                    anti.iter_mut().zip(src).for_each(|(c, &x)| *c += x * im);
                    has_anti = true;
                }
            }
        }
        self.couple_op.apply(&couple, out, 1.0);
        if has_anti {
            self.anti_op.apply(&anti, out, 1.0);
        }
    }

    /// Substep nodes for the step `[t, t + dt]`. Inside the layer where the
    /// discarded Matsubara terms still vary, `δ` has derivatives growing like
    /// `t^{1−n}`; unless `δ f^×f^×` commutes with the rest of the generator
    /// that costs one order. Local steps of `dt·√(t/τ)` over a layer of width
    /// `τ` restore fourth order while at most doubling the work there.
    fn graded_nodes(&self, t: f64, dt: f64) -> Vec<f64> {
        if !self.tail || t >= self.layer {
            return vec![t, t + dt];
        }
        let width = (self.layer / dt).ceil();
        let j = (t / dt).round();
        if j == 0.0 {
            let m = (2.0 * width.sqrt()).ceil() as usize;
            (0..=m)
                .map(|i| {
                    let u = i as f64 / m as f64;
                    t + dt * u * u
                })
                .collect()
        } else {
            let m = (width / j).sqrt().ceil() as usize;
            (0..=m).map(|i| t + dt * i as f64 / m as f64).collect()
        }
    }

    /// Classical RK4 from `y` at `t0`, recording slot 0 and its derivative at
    /// `t0` and after every `substeps` steps of size `dt`, `outputs` times.
    fn propagate(
        &self,
        mut y: Vec<Complex64>,
        t0: f64,
        dt: f64,
        substeps: usize,
        outputs: usize,
    ) -> (Vec<f64>, Vec<[Complex64; SUPER]>, Vec<[Complex64; SUPER]>) {
        let n = y.len();
        let mut k1 = vec![ZERO; n];
        let mut k2 = vec![ZERO; n];
        let mut k3 = vec![ZERO; n];
        let mut k4 = vec![ZERO; n];
        let mut tmp = vec![ZERO; n];
        let mut times = Vec::with_capacity(outputs + 1);
        let mut states = Vec::with_capacity(outputs + 1);
        let mut derivs = Vec::with_capacity(outputs + 1);
        let head =
            |v: &[Complex64]| -> [Complex64; SUPER] { v[..SUPER].try_into().expect("slot 0") };
        let mut step = 0usize;
        let time = |step: usize| t0 + dt * step as f64;
        self.rhs_into(time(0), &y, &mut k1);
        for out in 0..=outputs {
            times.push(time(step));
            states.push(head(&y));
            derivs.push(head(&k1));
            if out == outputs {
                break;
            }
            for _ in 0..substeps {
                let t = time(step);
                let nodes = self.graded_nodes(t, dt);
                for w in nodes.windows(2) {
                    if w[0] > t {
                        self.rhs_into(w[0], &y, &mut k1);
                    }
                    let (s, h) = (w[0], w[1] - w[0]);
                    let (start, end) = (self.tail_weight(s), self.tail_weight(s + h));
                    let mid = self.tail_midpoint(s, h, start, end);
                    for i in 0..n {
                        tmp[i] = y[i] + k1[i] * (0.5 * h);
                    }
                    self.rhs_with_tail(mid, &tmp, &mut k2);
                    for i in 0..n {
                        tmp[i] = y[i] + k2[i] * (0.5 * h);
                    }
                    self.rhs_with_tail(mid, &tmp, &mut k3);
                    for i in 0..n {
                        tmp[i] = y[i] + k3[i] * h;
                    }
                    self.rhs_with_tail(end, &tmp, &mut k4);
                    for i in 0..n {
                        y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
                    }
                }
                step += 1;
                self.rhs_into(time(step), &y, &mut k1);
            }
        }
        (times, states, derivs)
    }
}

/// Derivative of every ADO of `state` under `config`.
pub fn heom_rhs(state: &HierarchyState, config: &HeomConfig) -> Result<Vec<CMatrix>> {
    config.validate()?;
    let system = HeomSystem::with_index(config, state.index.clone())?;
    let mut out = vec![ZERO; state.ados.len()];
    system.rhs_into(state.t, &state.ados, &mut out);
    out.chunks_exact(SUPER)
        .map(|c| CMatrix::from_slice(DIM, c))
        .collect()
}

/// Diagnostics of a propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationReport {
    pub dt: f64,
    pub steps: usize,
    pub depth: usize,
    pub cutoff: usize,
    pub ado_count: usize,
    /// `max_t |Tr ρ(t) − Tr ρ(0)|`.
    pub trace_drift: f64,
    /// `max_t ‖ρ(t) − ρ(t)†‖_max`.
    pub hermiticity_drift: f64,
}

/// Physical-state samples without validation: times, `ρ(t)` and `ρ̇(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRun {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub derivatives: Vec<CMatrix>,
    pub report: IntegrationReport,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct HeomRun {
    pub trajectory: StateTrajectory,
    pub report: IntegrationReport,
}

fn output_count(config: &HeomConfig) -> Result<usize> {
    let n = (config.t_max / config.output_step).round();
    if n < 1.0 || (n * config.output_step - config.t_max).abs() > 1e-9 * config.t_max {
        return Err(Error::param(
            "output_step",
            format!("must divide t_max = {} evenly", config.t_max),
        ));
    }
    Ok(n as usize)
}

/// Step size and the number of steps per output interval.
fn resolve_step(config: &HeomConfig, system: &HeomSystem) -> Result<(f64, usize)> {
    match config.dt {
        Some(dt) => {
            system.check_step(dt)?;
            let sub = (config.output_step / dt).round();
            if sub < 1.0 || (sub * dt - config.output_step).abs() > 1e-9 * config.output_step {
                return Err(Error::param("dt", "must divide the output step evenly"));
            }
            Ok((dt, sub as usize))
        }
        None => {
            let target = 0.9 * system.max_stable_step();
            let sub = (config.output_step / target).ceil().max(1.0) as usize;
            Ok((config.output_step / sub as f64, sub))
        }
    }
}

/// Integrates from an arbitrary (possibly unnormalised) 4×4 initial matrix
/// and reports slot 0 on the output grid, unvalidated.
pub fn evolve_raw(config: &HeomConfig, rho0: &CMatrix) -> Result<RawRun> {
    if rho0.dim() != DIM {
        return Err(Error::Dimension(format!(
            "two-qubit state required, got dim {}",
            rho0.dim()
        )));
    }
    let system = HeomSystem::new(config)?;
    evolve_with(config, &system, rho0)
}

fn evolve_with(config: &HeomConfig, system: &HeomSystem, rho0: &CMatrix) -> Result<RawRun> {
    let outputs = output_count(config)?;
    let (dt, substeps) = resolve_step(config, system)?;
    let mut y = vec![ZERO; system.index.len() * SUPER];
    y[..SUPER].copy_from_slice(rho0.as_slice());
    let (mut times, states, derivs) = system.propagate(y, 0.0, dt, substeps, outputs);
    if let Some(last) = times.last_mut() {
        *last = config.t_max;
    }
    let states: Vec<CMatrix> = states
        .iter()
        .map(|s| CMatrix::from_slice(DIM, s))
        .collect::<Result<_>>()?;
    let derivatives: Vec<CMatrix> = derivs
        .iter()
        .map(|s| CMatrix::from_slice(DIM, s))
        .collect::<Result<_>>()?;
    let tr0 = rho0.trace();
    let trace_drift = states
        .iter()
        .map(|s| (s.trace() - tr0).norm())
        .fold(0.0, f64::max);
    let hermiticity_drift = states
        .iter()
        .map(|s| s.hermiticity_defect())
        .fold(0.0, f64::max);
    Ok(RawRun {
        times,
        states,
        derivatives,
        report: IntegrationReport {
            dt,
            steps: substeps * outputs,
            depth: system.index.depth(),
            cutoff: system.index.modes() - 1,
            ado_count: system.index.len(),
            trace_drift,
            hermiticity_drift,
        },
    })
}

/// Decay lengths of the first discarded Matsubara term covered by the graded
/// start.
const TAIL_LAYER_DECAYS: f64 = 10.0;

/// Negative eigenvalues of the physical state tolerated as truncation noise;
/// rank-deficient states pick these up at any finite depth.
pub const POSITIVITY_SLACK: f64 = ENTROPY_POSITIVITY_TOL;

/// Trace drift allowed over a run.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Hermiticity drift allowed over a run.
pub const HERMITICITY_DRIFT_TOL: f64 = 1e-10;

/// Integrates the hierarchy and validates every sample of the physical state.
pub fn evolve(config: &HeomConfig, rho0: &DensityMatrix) -> Result<HeomRun> {
    let system = HeomSystem::new(config)?;
    let raw = evolve_with(config, &system, rho0.matrix())?;
    validate_run(raw)
}

fn validate_run(raw: RawRun) -> Result<HeomRun> {
    let r = raw.report;
    if r.trace_drift > TRACE_DRIFT_TOL {
        return Err(Error::InvariantViolation(format!(
            "trace drift {:e}",
            r.trace_drift
        )));
    }
    if r.hermiticity_drift > HERMITICITY_DRIFT_TOL {
        return Err(Error::InvariantViolation(format!(
            "Hermiticity drift {:e}",
            r.hermiticity_drift
        )));
    }
    let mut states = Vec::with_capacity(raw.states.len());
    let mut derivatives = Vec::with_capacity(raw.states.len());
    for ((&t, s), d) in raw.times.iter().zip(raw.states).zip(raw.derivatives) {
        // absorb the sub-tolerance asymmetry before validation
        let sym = (&s + &s.adjoint()).scale_real(0.5);
        let state = DensityMatrix::with_slack(sym, POSITIVITY_SLACK).map_err(|e| match e {
            Error::Positivity { min_eigenvalue } => Error::TruncationTooSmall {
                time: t,
                min_eigenvalue,
            },
            other => other.at_time(t),
        })?;
        let dsym = (&d + &d.adjoint()).scale_real(0.5);
        derivatives.push(MatrixDerivative::new(dsym).map_err(|e| e.at_time(t))?);
        states.push(state);
    }
    Ok(HeomRun {
        trajectory: StateTrajectory::new(raw.times, states, derivatives)?,
        report: r,
    })
}

/// Closed-form evolution of the literal model, in which every term commutes
/// with `σ_z^A` and `σ_z^B`: element `(ab, a'b')` rotates with the sector
/// energies `E_ab = (Ω/2)(z_a + z_b) + g0 z_a z_b` and decays by `e^{−Γ(t)}`
/// when `b ≠ b'`, with `Γ` the Drude decoherence factor.
pub fn exact_commuting_solution(
    config: &HeomConfig,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    if !config.is_literal() {
        return Err(Error::OracleInapplicable(
            "closed form needs f = σ_z^B and a σ_z⊗σ_z interaction".into(),
        ));
    }
    if rho0.dim() != DIM {
        return Err(Error::Dimension(format!(
            "two-qubit state required, got dim {}",
            rho0.dim()
        )));
    }
    let gamma = decoherence_factor(config.drude, config.temperature, t)?;
    let z = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
    let energy = |idx: usize| {
        let (za, zb) = (z(idx / 2), z(idx % 2));
        0.5 * config.omega * (za + zb) + config.g0 * za * zb
    };
    let m0 = rho0.matrix();
    let mut m = CMatrix::zeros(DIM);
    for i in 0..DIM {
        for j in 0..DIM {
            let decay = if i % 2 != j % 2 { (-gamma).exp() } else { 1.0 };
            m[(i, j)] = m0[(i, j)] * Complex64::from_polar(decay, -(energy(i) - energy(j)) * t);
        }
    }
    DensityMatrix::new(m)
}

/// Outcome of [`converge`].
#[derive(Debug, Clone, PartialEq)]
pub struct Converged {
    pub run: HeomRun,
    pub depth: usize,
    pub cutoff: usize,
    /// `max_t ‖ρ_L(t) − ρ_{L+1}(t)‖_F` for `L = 1, 2, …`.
    pub deltas: Vec<f64>,
}

/// Deepest hierarchy tried by [`converge`].
pub const MAX_CONVERGE_DEPTH: usize = 24;

/// Raises `L` from 1 until the next depth changes the physical trajectory by
/// less than `tol` (max Frobenius distance over the grid), and returns the
/// run at the accepted depth. `K` follows the configuration or cutoff rule.
pub fn converge(config: &HeomConfig, rho0: &DensityMatrix, tol: f64) -> Result<Converged> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    config.validate()?;
    let cutoff = config.resolved_cutoff()?;
    let run_at = |depth: usize| -> Result<RawRun> {
        let cfg = HeomConfig {
            depth,
            cutoff: Some(cutoff),
            ..config.clone()
        };
        let system = HeomSystem::new(&cfg)?;
        evolve_with(&cfg, &system, rho0.matrix())
    };
    let mut deltas = Vec::new();
    let mut prev = run_at(1)?;
    for depth in 2..=MAX_CONVERGE_DEPTH + 1 {
        let next = match run_at(depth) {
            Ok(r) => r,
            Err(Error::Capacity { .. }) => break,
            Err(e) => return Err(e),
        };
        let delta = prev
            .states
            .iter()
            .zip(&next.states)
            .map(|(a, b)| (a - b).frobenius_norm())
            .fold(0.0, f64::max);
        deltas.push(delta);
        if delta < tol {
            return Ok(Converged {
                run: validate_run(prev)?,
                depth: depth - 1,
                cutoff,
                deltas,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        last_delta: deltas.last().copied().unwrap_or(f64::INFINITY),
        depth: prev.report.depth,
        cutoff,
    })
}

/// Step-halving probe: changes of the trajectory under `dt → dt/2` and
/// `dt/2 → dt/4`, and their ratio (16 for a fourth-order method).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDoubling {
    pub dt: f64,
    pub coarse_change: f64,
    pub fine_change: f64,
    pub final_change: f64,
    pub ratio: f64,
}

pub fn step_doubling(config: &HeomConfig, rho0: &DensityMatrix) -> Result<StepDoubling> {
    let system = HeomSystem::new(config)?;
    let (dt, _) = resolve_step(config, &system)?;
    let run = |h: f64| {
        let cfg = HeomConfig {
            dt: Some(h),
            ..config.clone()
        };
        evolve_with(&cfg, &system, rho0.matrix())
    };
    let (a, b, c) = (run(dt)?, run(0.5 * dt)?, run(0.25 * dt)?);
    let change = |x: &RawRun, y: &RawRun| {
        x.states
            .iter()
            .zip(&y.states)
            .map(|(p, q)| (p - q).frobenius_norm())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (change(&a, &b), change(&b, &c));
    let final_change =
        (a.states.last().expect("samples") - b.states.last().expect("samples")).frobenius_norm();
    Ok(StepDoubling {
        dt,
        coarse_change: coarse,
        fine_change: fine,
        final_change,
        ratio: coarse / fine,
    })
}
