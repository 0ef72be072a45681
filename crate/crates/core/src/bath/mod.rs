//! Bosonic environments: spectral densities, correlation functions,
//! decoherence factors and the Matsubara expansion of the Drude bath.
//!
//! Temperatures are in energy units with `k_B = ħ = 1`. A temperature below
//! [`ZERO_TEMPERATURE`] selects the vacuum branch `coth(ω/2T) = 1`.

mod decoherence;
mod matsubara;

pub use decoherence::{
    correlation_function, decoherence_factor, decoherence_factor_and_rate,
    decoherence_factor_pulsed, pulse_filter, DecoherenceSample, GAMMA_TOLERANCE,
};
pub use matsubara::{
    drude_expansion, matsubara_cutoff, ExpTerm, ExponentialExpansion, DEFAULT_MATSUBARA_TOL,
};

use std::f64::consts::PI;

use crate::{Error, Result};

/// Temperatures below this are treated as exactly zero.
pub const ZERO_TEMPERATURE: f64 = 1e-12;

/// `J(ω) = Λ ω^s ω_c^{1−s} e^{−ω/ω_c}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicLikeSpec {
    pub lambda: f64,
    pub omega_c: f64,
    pub s: f64,
}

impl OhmicLikeSpec {
    pub fn new(lambda: f64, omega_c: f64, s: f64) -> Result<Self> {
        let spec = Self { lambda, omega_c, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_coupling(self.lambda)?;
        check_cutoff(self.omega_c)?;
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::param(
                "s",
                format!("must be positive, got {}", self.s),
            ));
        }
        Ok(())
    }

    fn density(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        self.lambda
            * self.omega_c
            * (omega / self.omega_c).powf(self.s)
            * (-omega / self.omega_c).exp()
    }
}

/// `J(ω) = 2Λω_c ω / (π(ω_c² + ω²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeSpec {
    pub lambda: f64,
    pub omega_c: f64,
}

impl DrudeSpec {
    pub fn new(lambda: f64, omega_c: f64) -> Result<Self> {
        let spec = Self { lambda, omega_c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_coupling(self.lambda)?;
        check_cutoff(self.omega_c)
    }

    fn density(&self, omega: f64) -> f64 {
        2.0 * self.lambda * self.omega_c * omega
            / (PI * (self.omega_c * self.omega_c + omega * omega))
    }
}

/// Either spectral family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathSpec {
    OhmicLike(OhmicLikeSpec),
    Drude(DrudeSpec),
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            BathSpec::OhmicLike(s) => s.validate(),
            BathSpec::Drude(s) => s.validate(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            BathSpec::OhmicLike(s) => s.lambda,
            BathSpec::Drude(s) => s.lambda,
        }
    }

    pub fn omega_c(&self) -> f64 {
        match self {
            BathSpec::OhmicLike(s) => s.omega_c,
            BathSpec::Drude(s) => s.omega_c,
        }
    }
}

impl From<OhmicLikeSpec> for BathSpec {
    fn from(s: OhmicLikeSpec) -> Self {
        BathSpec::OhmicLike(s)
    }
}

impl From<DrudeSpec> for BathSpec {
    fn from(s: DrudeSpec) -> Self {
        BathSpec::Drude(s)
    }
}

/// `J(ω)` on the non-negative half line.
pub fn spectral_density(spec: impl Into<BathSpec>, omega: f64) -> Result<f64> {
    let spec = spec.into();
    spec.validate()?;
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "spectral density needs ω ≥ 0, got {omega}"
        )));
    }
    Ok(match spec {
        BathSpec::OhmicLike(s) => s.density(omega),
        BathSpec::Drude(s) => s.density(omega),
    })
}

/// `coth(ω/2T)`, with the vacuum value 1 at `T = 0` and a Taylor form for
/// small arguments.
pub(crate) fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    if temperature < ZERO_TEMPERATURE {
        return 1.0;
    }
    let x = omega / (2.0 * temperature);
    if x < 1e-2 {
        let x2 = x * x;
        (1.0 + x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * 2.0 / 945.0))) / x
    } else {
        1.0 / x.tanh()
    }
}

pub(crate) fn check_temperature(temperature: f64) -> Result<()> {
    if temperature.is_finite() && temperature >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            "temperature",
            format!("must be finite and ≥ 0, got {temperature}"),
        ))
    }
}

fn check_coupling(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            "lambda",
            format!("must be finite and ≥ 0, got {lambda}"),
        ))
    }
}

fn check_cutoff(omega_c: f64) -> Result<()> {
    if omega_c.is_finite() && omega_c > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            "omega_c",
            format!("must be positive, got {omega_c}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ohmic_density_examples() {
        let spec = OhmicLikeSpec::new(0.2, 50.0, 1.0).unwrap();
        assert_eq!(spectral_density(spec, 0.0).unwrap(), 0.0);
        let j = spectral_density(spec, 50.0).unwrap();
        assert!((j - 10.0 * (-1f64).exp()).abs() < 1e-12);
        assert!((j - 3.679).abs() < 1e-3);
    }

    #[test]
    fn drude_density_example() {
        // 2·0.05·5·5 / (π·50) = 1/(20π)
        let j = spectral_density(DrudeSpec::new(0.05, 5.0).unwrap(), 5.0).unwrap();
        assert!((j - 1.0 / (20.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn negative_frequency_is_rejected() {
        let spec = OhmicLikeSpec::new(0.2, 50.0, 1.0).unwrap();
        assert!(matches!(
            spectral_density(spec, -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(OhmicLikeSpec::new(0.2, 50.0, 0.0).is_err());
        assert!(OhmicLikeSpec::new(-0.1, 50.0, 1.0).is_err());
        assert!(DrudeSpec::new(0.1, 0.0).is_err());
    }

    #[test]
    fn thermal_factor_branches_agree() {
        let t = 0.7;
        for &w in &[1e-6f64, 1e-3, 0.013_999, 0.014_001, 1.0, 50.0] {
            let direct = 1.0 / (w / (2.0 * t)).tanh();
            assert!(
                (thermal_factor(w, t) - direct).abs() <= 1e-13 * direct,
                "ω = {w}"
            );
        }
        assert_eq!(thermal_factor(3.0, 0.0), 1.0);
        assert_eq!(thermal_factor(3.0, 1e-13), 1.0);
    }
}
