//! Matsubara expansion of the Drude correlation function,
//! `C(t) = Σ_k ζ_k e^{−ν_k t}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_temperature, DrudeSpec, ZERO_TEMPERATURE};
use crate::{Error, Result};

/// Default residual tolerance for [`matsubara_cutoff`].
pub const DEFAULT_MATSUBARA_TOL: f64 = 1e-4;

const MAX_CUTOFF: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub zeta: Complex64,
    pub nu: f64,
}

/// Terms `k = 0..=K` of the expansion, plus enough context to evaluate the
/// discarded remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialExpansion {
    drude: DrudeSpec,
    temperature: f64,
    terms: Vec<ExpTerm>,
}

impl ExponentialExpansion {
    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn cutoff(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn drude(&self) -> DrudeSpec {
        self.drude
    }

    pub fn nu_max(&self) -> f64 {
        self.terms.iter().map(|t| t.nu).fold(0.0, f64::max)
    }

    /// Truncated sum `Σ_{k≤K} ζ_k e^{−ν_k t}`.
    pub fn correlation(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.zeta * (-term.nu * t).exp())
            .sum()
    }

    /// `∫₀^∞ Re C(τ) dτ = 2ΛT/ω_c` of the untruncated expansion.
    pub fn integrated_real(&self) -> f64 {
        2.0 * self.drude.lambda * self.temperature / self.drude.omega_c
    }

    /// Weight `Σ_{k>K} ζ_k/ν_k` of the discarded terms.
    pub fn residual_weight(&self) -> f64 {
        self.integrated_real() - self.terms.iter().map(|t| t.zeta.re / t.nu).sum::<f64>()
    }

    /// `δ(t) = Σ_{k>K} ζ_k (1 − e^{−ν_k t})/ν_k`, the discarded terms integrated
    /// from 0 to `t`.
    pub fn residual(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k0 = self.cutoff() + 1;
        let step = 2.0 * PI * self.temperature;
        let ratio = (-step * t).exp();
        let mut decay = (-matsubara_nu(self.temperature, k0) * t).exp();
        let mut pending = 0.0;
        let mut k = k0;
        // e^{−ν_k t} below 1e-17 no longer moves the sum
        while decay > 1e-17 && k < k0 + 50_000_000 {
            pending += matsubara_zeta(&self.drude, self.temperature, k)
                / matsubara_nu(self.temperature, k)
                * decay;
            decay *= ratio;
            k += 1;
        }
        self.residual_weight() - pending
    }

    /// `∫_0^t δ(s) ds = δ_∞ t − Σ_{k>K} ζ_k (1 − e^{−ν_k t})/ν_k²`.
    pub fn residual_integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k0 = self.cutoff() + 1;
        let step = 2.0 * PI * self.temperature;
        let ratio = (-step * t).exp();
        let mut decay = (-matsubara_nu(self.temperature, k0) * t).exp();
        let mut pending = 0.0;
        let mut k = k0;
        while decay > 1e-17 && k < k0 + 50_000_000 {
            let nu = matsubara_nu(self.temperature, k);
            pending += matsubara_zeta(&self.drude, self.temperature, k) / (nu * nu) * decay;
            decay *= ratio;
            k += 1;
        }
        self.residual_weight() * t - self.residual_second_moment() + pending
    }

    /// `Σ_{k>K} ζ_k/ν_k²`.
    fn residual_second_moment(&self) -> f64 {
        let k0 = self.cutoff() + 1;
        let explicit = 4000;
        let mut sum = 0.0;
        for k in (k0..k0 + explicit).rev() {
            let nu = matsubara_nu(self.temperature, k);
            sum += matsubara_zeta(&self.drude, self.temperature, k) / (nu * nu);
        }
        // ζ_k/ν_k² = c/k³ · (1 + a/k² + …) with Euler–Maclaurin tails
        let n = (k0 + explicit - 1) as f64;
        let step = 2.0 * PI * self.temperature;
        let c = 4.0 * self.drude.lambda * self.drude.omega_c * self.temperature / step.powi(3);
        let a = (self.drude.omega_c / step).powi(2);
        let tail3 = 1.0 / (2.0 * n * n) - 1.0 / (2.0 * n.powi(3)) + 1.0 / (4.0 * n.powi(4));
        let tail5 = 1.0 / (4.0 * n.powi(4)) - 1.0 / (2.0 * n.powi(5));
        sum + c * (tail3 + a * tail5)
    }

    /// Bound on `Σ_{k>K} |ζ_k|/ν_k²`, the size of the error left by treating
    /// the discarded terms as instantaneous.
    pub fn residual_memory(&self) -> f64 {
        let k0 = self.cutoff() + 1;
        let explicit = 2000;
        let mut sum = 0.0;
        for k in k0..k0 + explicit {
            let nu = matsubara_nu(self.temperature, k);
            sum += matsubara_zeta(&self.drude, self.temperature, k).abs() / (nu * nu);
        }
        // beyond: ν² − ω_c² ≥ ν²/2, and Σ_{k>n} k^{−3} ≤ 1/(2n²)
        let last = (k0 + explicit - 1) as f64;
        let step = 2.0 * PI * self.temperature;
        sum + 8.0 * self.drude.lambda * self.drude.omega_c * self.temperature
            / step.powi(3)
            / (2.0 * last * last)
    }
}

fn matsubara_nu(temperature: f64, k: usize) -> f64 {
    2.0 * PI * temperature * k as f64
}

/// Real amplitude of term `k ≥ 1`.
fn matsubara_zeta(spec: &DrudeSpec, temperature: f64, k: usize) -> f64 {
    let nu = matsubara_nu(temperature, k);
    4.0 * spec.lambda * spec.omega_c * temperature * nu / (nu * nu - spec.omega_c * spec.omega_c)
}

/// Builds `ζ_0 = Λω_c[cot(ω_c/2T) − i]`, `ν_0 = ω_c` and the Matsubara terms
/// `k = 1..=K`.
pub fn drude_expansion(
    spec: DrudeSpec,
    temperature: f64,
    cutoff: usize,
) -> Result<ExponentialExpansion> {
    spec.validate()?;
    check_temperature(temperature)?;
    if temperature < ZERO_TEMPERATURE {
        return Err(Error::param(
            "temperature",
            "the Matsubara expansion diverges at T = 0; use a positive temperature",
        ));
    }
    let step = 2.0 * PI * temperature;
    let nearest = (spec.omega_c / step).round();
    if nearest >= 1.0 && (nearest * step - spec.omega_c).abs() < 1e-9 * spec.omega_c.max(1.0) {
        return Err(Error::param(
            "temperature",
            format!(
                "Matsubara frequency ν_{nearest} coincides with ω_c = {}; perturb the temperature slightly",
                spec.omega_c
            ),
        ));
    }
    let lw = spec.lambda * spec.omega_c;
    let mut terms = Vec::with_capacity(cutoff + 1);
    terms.push(ExpTerm {
        zeta: Complex64::new(lw / (spec.omega_c / (2.0 * temperature)).tan(), -lw),
        nu: spec.omega_c,
    });
    for k in 1..=cutoff {
        terms.push(ExpTerm {
            zeta: Complex64::new(matsubara_zeta(&spec, temperature, k), 0.0),
            nu: matsubara_nu(temperature, k),
        });
    }
    Ok(ExponentialExpansion {
        drude: spec,
        temperature,
        terms,
    })
}

/// Matsubara cutoff for a system of characteristic frequency `omega_sys`.
///
/// Starts at the smallest `K` with `ν_K > 10·max(ω_c, Ω)` and doubles `K`
/// while `coupling_scale · Σ_{k>K}|ζ_k|/ν_k²` exceeds `tol`. For a hierarchy
/// with coupling operator `f`, `coupling_scale = 2‖f‖·‖[H_s, f]‖`: it vanishes
/// when `f` commutes with the system Hamiltonian, in which case instantaneous
/// treatment of the discarded terms is exact.
pub fn matsubara_cutoff(
    spec: DrudeSpec,
    temperature: f64,
    omega_sys: f64,
    coupling_scale: f64,
    tol: f64,
) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::param("matsubara_tol", "must be positive"));
    }
    let step = 2.0 * PI * temperature;
    if !(step > 0.0) {
        return Err(Error::param(
            "temperature",
            "must be positive for a Matsubara cutoff",
        ));
    }
    let target = 10.0 * spec.omega_c.max(omega_sys.abs());
    let mut k = ((target / step).floor() as usize + 1).max(1);
    loop {
        let exp = drude_expansion(spec, temperature, k)?;
        if coupling_scale * exp.residual_memory() <= tol {
            return Ok(k);
        }
        if k >= MAX_CUTOFF {
            return Err(Error::param(
                "matsubara_tol",
                format!("no cutoff up to {MAX_CUTOFF} meets tolerance {tol:e}"),
            ));
        }
        k = (2 * k).min(MAX_CUTOFF);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drude() -> DrudeSpec {
        DrudeSpec::new(0.05, 5.0).unwrap()
    }

    #[test]
    fn leading_term_example() {
        let exp = drude_expansion(drude(), 5.0, 3).unwrap();
        let z0 = exp.terms()[0].zeta;
        assert!((z0.re - 0.25 / 0.5f64.tan()).abs() < 1e-14);
        assert!((z0.re - 0.4576).abs() < 1e-4);
        assert_eq!(z0.im, -0.25);
        assert_eq!(exp.terms()[0].nu, 5.0);
        assert!((exp.terms()[2].nu - 20.0 * PI).abs() < 1e-12);
        assert!(exp.terms()[1..].iter().all(|t| t.zeta.im == 0.0));
    }

    #[test]
    fn free_bath_has_zero_amplitudes() {
        let exp = drude_expansion(DrudeSpec::new(0.0, 5.0).unwrap(), 2.0, 5).unwrap();
        assert!(exp
            .terms()
            .iter()
            .all(|t| t.zeta == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn resonance_and_zero_temperature_are_rejected() {
        let t_res = 5.0 / (2.0 * PI);
        assert!(matches!(
            drude_expansion(drude(), t_res, 3),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            drude_expansion(drude(), 0.0, 3),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn partial_sums_converge() {
        let short = drude_expansion(drude(), 5.0, 40).unwrap();
        let long = drude_expansion(drude(), 5.0, 80).unwrap();
        for i in 0..=40 {
            let t = 0.05 + 0.05 * i as f64;
            assert!((short.correlation(t) - long.correlation(t)).norm() < 1e-8);
        }
    }

    #[test]
    fn imaginary_part_is_single_exponential() {
        let exp = drude_expansion(drude(), 1.0, 10).unwrap();
        for &t in &[0.0, 0.2, 1.5] {
            assert!((exp.correlation(t).im + 0.25 * (-5.0 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn residual_interpolates_between_zero_and_weight() {
        let exp = drude_expansion(drude(), 1.0, 8).unwrap();
        assert_eq!(exp.residual(0.0), 0.0);
        // long times: every discarded exponential has died out
        assert!((exp.residual(50.0) - exp.residual_weight()).abs() < 1e-15);
        // oracle: explicit partial sum over many discarded terms
        let t = 0.01;
        let big = drude_expansion(drude(), 1.0, 200_000).unwrap();
        let direct: f64 = big.terms()[9..]
            .iter()
            .map(|term| term.zeta.re * (-(-term.nu * t).exp_m1()) / term.nu)
            .sum();
        let rest = big.residual_weight();
        assert!((exp.residual(t) - direct - rest).abs() < 1e-12);
    }

    #[test]
    fn residual_integral_matches_quadrature() {
        let exp = drude_expansion(drude(), 1.0, 8).unwrap();
        assert_eq!(exp.residual_integral(0.0), 0.0);
        for &t in &[1e-3, 0.02, 0.3, 2.0] {
            let tol = crate::quadrature::Tolerance::new(1e-16, 1e-11);
            let (quad, _) =
                crate::quadrature::integrate_scalar(|s| exp.residual(s), 0.0, t, &tol).unwrap();
            let v = exp.residual_integral(t);
            assert!(
                (v - quad).abs() < 1e-9 * quad.abs().max(1e-12),
                "t = {t}: {v} vs {quad}"
            );
        }
    }

    #[test]
    fn cutoff_rule() {
        assert_eq!(matsubara_cutoff(drude(), 1.0, 1.0, 0.0, 1e-4).unwrap(), 8);
        assert_eq!(matsubara_cutoff(drude(), 5.0, 1.0, 0.0, 1e-4).unwrap(), 2);
        assert_eq!(matsubara_cutoff(drude(), 20.0, 1.0, 0.0, 1e-4).unwrap(), 1);
        let loose = matsubara_cutoff(drude(), 1.0, 1.0, 4.0, 1e-4).unwrap();
        let tight = matsubara_cutoff(drude(), 1.0, 1.0, 4.0, 1e-8).unwrap();
        assert!(tight > loose);
    }
}
