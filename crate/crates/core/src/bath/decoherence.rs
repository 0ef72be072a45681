//! Frequency integrals over the spectral density: `Γ(t)`, `Γ̇(t)`, the pulsed
//! factor `Γ_p` and the correlation function `C(t)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_temperature, thermal_factor, BathSpec, DrudeSpec, OhmicLikeSpec};
use crate::quadrature::{self, Estimate, Oscillator, Tolerance};
use crate::{Error, Result};

/// Tolerance used for every decoherence-factor integral.
pub const GAMMA_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-10);

const CORRELATION_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-10);

/// `Γ(t)` together with its time derivative and quadrature error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceSample {
    pub gamma: f64,
    pub rate: f64,
    pub gamma_error: f64,
    pub rate_error: f64,
}

impl DecoherenceSample {
    const ZERO: Self = Self {
        gamma: 0.0,
        rate: 0.0,
        gamma_error: 0.0,
        rate_error: 0.0,
    };
}

/// `Γ(t) = 4∫₀^∞ J(ω) coth(ω/2T) (1 − cos ωt)/ω² dω`.
pub fn decoherence_factor(spec: impl Into<BathSpec>, temperature: f64, t: f64) -> Result<f64> {
    Ok(decoherence_factor_and_rate(spec, temperature, t)?.gamma)
}

/// `Γ(t)` and `Γ̇(t) = 4∫₀^∞ J(ω) coth(ω/2T) sin(ωt)/ω dω`, sharing abscissae.
pub fn decoherence_factor_and_rate(
    spec: impl Into<BathSpec>,
    temperature: f64,
    t: f64,
) -> Result<DecoherenceSample> {
    let spec = spec.into();
    spec.validate()?;
    check_temperature(temperature)?;
    check_time(t)?;
    if t == 0.0 || spec.lambda() == 0.0 {
        return Ok(DecoherenceSample::ZERO);
    }
    match spec {
        BathSpec::OhmicLike(s) => ohmic_pair(&s, temperature, t),
        BathSpec::Drude(s) => drude_pair(&s, temperature, t),
    }
}

/// `Γ_p` at the lattice time `t = 2NΔt` of `N` bang-bang cycles with pulse
/// interval `Δt`: the free integrand filtered by `tan²(ωΔt/2)`.
pub fn decoherence_factor_pulsed(
    spec: OhmicLikeSpec,
    temperature: f64,
    cycles: u32,
    interval: f64,
) -> Result<f64> {
    spec.validate()?;
    check_temperature(temperature)?;
    if cycles == 0 {
        return Err(Error::param(
            "cycles",
            "at least one pulse cycle is required",
        ));
    }
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::param(
            "delta_t",
            format!("pulse interval must be positive, got {interval}"),
        ));
    }
    if spec.lambda == 0.0 {
        return Ok(0.0);
    }
    let t = 2.0 * cycles as f64 * interval;
    let base = ohmic_base(&spec, temperature);
    let f = |w: f64| [base(w) / w * pulse_filter(w, cycles, interval)];

    let h = panel_width(spec.omega_c, t);
    let n2 = 4.0 * (cycles as f64).powi(2);
    let w_max = ohmic_upper_limit(&spec, temperature, |w| {
        // filter ≤ 8N², twice the bound (1 − cos) ≤ 2 used by the free tail
        n2 * ohmic_tail_bound(&spec, temperature, w)[0]
    });
    let mut breaks = uniform_breaks(w_max, h);
    let pole_spacing = 2.0 * PI / interval;
    let mut pole = PI / interval;
    while pole < w_max {
        breaks.push(pole);
        pole += pole_spacing;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let tol = GAMMA_TOLERANCE;
    let est = integrate_with_origin(f, spec.s, &breaks, &tol)?;
    Ok(est.value[0])
}

/// `(1 − cos(ω t_{2N}))·tan²(ωΔt/2)` with `t_{2N} = 2NΔt`, finite at the poles
/// `ωΔt = (2k+1)π` where it takes the value `8N²`.
///
/// With `x = ωΔt/2` and `δ` the distance from `x` to the nearest odd multiple
/// of `π/2`, the product equals `2 sin²x · (sin(2Nδ)/sin δ)²`.
pub fn pulse_filter(omega: f64, cycles: u32, interval: f64) -> f64 {
    let x = 0.5 * omega * interval;
    let a = 2.0 * cycles as f64;
    let m = (x / PI - 0.5).round();
    let pole = (m + 0.5) * PI;
    let delta = x - pole;
    let ratio = if delta.abs() < (1e-7 * pole.abs()).min(1e-3 / a) {
        let d2 = delta * delta;
        let a2 = a * a;
        a * (1.0 + d2 * (1.0 - a2) / 6.0 + d2 * d2 * (7.0 - 10.0 * a2 + 3.0 * a2 * a2) / 360.0)
    } else {
        (a * delta).sin() / delta.sin()
    };
    let sx = x.sin();
    2.0 * sx * sx * ratio * ratio
}

/// `C(t) = ∫₀^∞ J(ω)[coth(ω/2T) cos ωt − i sin ωt] dω`.
pub fn correlation_function(
    spec: impl Into<BathSpec>,
    temperature: f64,
    t: f64,
) -> Result<Complex64> {
    let spec = spec.into();
    spec.validate()?;
    check_temperature(temperature)?;
    check_time(t)?;
    if spec.lambda() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    match spec {
        BathSpec::OhmicLike(s) => ohmic_correlation(&s, temperature, t),
        BathSpec::Drude(s) => drude_correlation(&s, temperature, t),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "time must be finite and ≥ 0, got {t}"
        )))
    }
}

fn spec_upper_limit(omega_c: f64, temperature: f64, t: f64) -> f64 {
    let resolution = if t > 0.0 { 20.0 * PI / t } else { 0.0 };
    (50.0 * omega_c).max(40.0 * temperature).max(resolution)
}

fn panel_width(omega_c: f64, t: f64) -> f64 {
    if t > 0.0 {
        (4.0 * PI / t).min(omega_c)
    } else {
        omega_c
    }
}

fn uniform_breaks(w_max: f64, h: f64) -> Vec<f64> {
    let n = (w_max / h).ceil() as usize;
    let mut breaks: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    breaks.push(w_max);
    breaks
}

/// `∫_W^∞ ω^p e^{−ω/ω_c} dω ≤ 2ω_c W^p e^{−W/ω_c}` once the integrand is
/// decaying at half the exponential rate, i.e. `W ≥ 2pω_c`.
fn exp_tail(p: f64, w: f64, omega_c: f64) -> f64 {
    if p > 0.0 && w < 2.0 * p * omega_c {
        return f64::INFINITY;
    }
    2.0 * omega_c * w.powf(p) * (-w / omega_c).exp()
}

/// Tail bounds beyond `w` for the Γ and Γ̇ integrands (`coth x ≤ 1 + 1/x`).
fn ohmic_tail_bound(spec: &OhmicLikeSpec, temperature: f64, w: f64) -> [f64; 2] {
    let pref = spec.lambda * spec.omega_c.powf(1.0 - spec.s);
    let (s, wc, t2) = (spec.s, spec.omega_c, 2.0 * temperature);
    [
        8.0 * pref * (exp_tail(s - 2.0, w, wc) + t2 * exp_tail(s - 3.0, w, wc)),
        4.0 * pref * (exp_tail(s - 1.0, w, wc) + t2 * exp_tail(s - 2.0, w, wc)),
    ]
}

/// Extends the nominal cutoff until the analytic tail is negligible.
/// The bound ignores the oscillating factor, so no `1/t` resolution term is
/// needed; at tiny `t` one would only pile up roundoff over idle panels.
fn ohmic_upper_limit(spec: &OhmicLikeSpec, temperature: f64, tail: impl Fn(f64) -> f64) -> f64 {
    let mut w = (50.0 * spec.omega_c).max(40.0 * temperature);
    for _ in 0..200 {
        if tail(w) <= 1e-3 * GAMMA_TOLERANCE.abs {
            break;
        }
        w *= 1.25;
    }
    w
}

/// `4 J(ω) coth(ω/2T) / ω` for the Ohmic-like family.
fn ohmic_base(spec: &OhmicLikeSpec, temperature: f64) -> impl Fn(f64) -> f64 {
    let pref = 4.0 * spec.lambda * spec.omega_c.powf(1.0 - spec.s);
    let (s, wc) = (spec.s, spec.omega_c);
    move |w: f64| pref * w.powf(s - 1.0) * (-w / wc).exp() * thermal_factor(w, temperature)
}

/// Integrates over the breakpoints; for `s < 1` the first panel `[0, a]` is
/// mapped by `ω = a·u^{1/s}` to remove the `ω^{s−1}` endpoint behaviour.
fn integrate_with_origin<const N: usize, F>(
    f: F,
    s: f64,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<Estimate<N>>
where
    F: Fn(f64) -> [f64; N],
{
    if s >= 1.0 || breaks.len() < 2 {
        return quadrature::integrate(f, breaks, tol);
    }
    let a = breaks[1];
    let inv = 1.0 / s;
    let head = quadrature::integrate(
        |u: f64| {
            let jac = a * inv * u.powf(inv - 1.0);
            let mut v = f(a * u.powf(inv));
            v.iter_mut().for_each(|x| *x *= jac);
            v
        },
        &[0.0, 1.0],
        tol,
    )?;
    let rest = quadrature::integrate(&f, &breaks[1..], tol)?;
    Ok(head.combine(&rest))
}

fn ohmic_pair(spec: &OhmicLikeSpec, temperature: f64, t: f64) -> Result<DecoherenceSample> {
    let base = ohmic_base(spec, temperature);
    let f = |w: f64| {
        let b = base(w);
        let sh = (0.5 * w * t).sin();
        [b * 2.0 * sh * sh / w, b * (w * t).sin()]
    };
    let w_max = ohmic_upper_limit(spec, temperature, |w| {
        let b = ohmic_tail_bound(spec, temperature, w);
        b[0].max(b[1])
    });
    let breaks = uniform_breaks(w_max, panel_width(spec.omega_c, t));
    let est = integrate_with_origin(f, spec.s, &breaks, &GAMMA_TOLERANCE)?;
    let tail = ohmic_tail_bound(spec, temperature, w_max);
    Ok(DecoherenceSample {
        gamma: est.value[0],
        rate: est.value[1],
        gamma_error: est.error[0] + tail[0],
        rate_error: est.error[1] + tail[1],
    })
}

/// Head on `[0, W]` plus semi-infinite tails: the non-oscillatory part through
/// `ω = W/u`, the oscillatory parts by half-period extrapolation.
fn drude_pair(spec: &DrudeSpec, temperature: f64, t: f64) -> Result<DecoherenceSample> {
    let pref = 8.0 * spec.lambda * spec.omega_c / PI;
    let wc2 = spec.omega_c * spec.omega_c;
    // 4 J(ω) coth(ω/2T) / ω
    let g = |w: f64| pref * thermal_factor(w, temperature) / (wc2 + w * w);
    let f = |w: f64| {
        let b = g(w);
        let sh = (0.5 * w * t).sin();
        [b * 2.0 * sh * sh / w, b * (w * t).sin()]
    };
    let w_max = spec_upper_limit(spec.omega_c, temperature, t);
    let tol = GAMMA_TOLERANCE;
    let head = quadrature::integrate(
        f,
        &uniform_breaks(w_max, panel_width(spec.omega_c, t)),
        &tol,
    )?;
    let flat = quadrature::integrate(|u: f64| [g(w_max / u) / u], &[0.0, 1.0], &tol)?;
    let (cos_tail, cos_err) =
        quadrature::oscillatory_tail(|w| g(w) / w, w_max, t, Oscillator::Cos, &tol)?;
    let (sin_tail, sin_err) = quadrature::oscillatory_tail(g, w_max, t, Oscillator::Sin, &tol)?;
    Ok(DecoherenceSample {
        gamma: head.value[0] + flat.value[0] - cos_tail,
        rate: head.value[1] + sin_tail,
        gamma_error: head.error[0] + flat.error[0] + cos_err,
        rate_error: head.error[1] + sin_err,
    })
}

fn ohmic_correlation(spec: &OhmicLikeSpec, temperature: f64, t: f64) -> Result<Complex64> {
    let f = |w: f64| {
        let j = spec.density(w);
        let (s, c) = (w * t).sin_cos();
        [j * thermal_factor(w, temperature) * c, -j * s]
    };
    let pref = spec.lambda * spec.omega_c.powf(1.0 - spec.s);
    let tail = |w: f64| {
        pref * (exp_tail(spec.s, w, spec.omega_c)
            + 2.0 * temperature * exp_tail(spec.s - 1.0, w, spec.omega_c))
    };
    let mut w_max = spec_upper_limit(spec.omega_c, temperature, t);
    for _ in 0..200 {
        if tail(w_max) <= 1e-3 * CORRELATION_TOLERANCE.abs {
            break;
        }
        w_max *= 1.25;
    }
    let breaks = uniform_breaks(w_max, panel_width(spec.omega_c, t));
    let est = integrate_with_origin(f, spec.s, &breaks, &CORRELATION_TOLERANCE)?;
    Ok(Complex64::new(est.value[0], est.value[1]))
}

fn drude_correlation(spec: &DrudeSpec, temperature: f64, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Err(Error::Domain(
            "the Drude correlation function diverges logarithmically at t = 0".into(),
        ));
    }
    let real = |w: f64| spec.density(w) * thermal_factor(w, temperature);
    let imag = |w: f64| spec.density(w);
    let f = |w: f64| {
        let (s, c) = (w * t).sin_cos();
        [real(w) * c, -imag(w) * s]
    };
    let w_max = spec_upper_limit(spec.omega_c, temperature, t);
    let tol = CORRELATION_TOLERANCE;
    let head = quadrature::integrate(
        f,
        &uniform_breaks(w_max, panel_width(spec.omega_c, t)),
        &tol,
    )?;
    let (re_tail, _) = quadrature::oscillatory_tail(real, w_max, t, Oscillator::Cos, &tol)?;
    let (im_tail, _) = quadrature::oscillatory_tail(imag, w_max, t, Oscillator::Sin, &tol)?;
    Ok(Complex64::new(
        head.value[0] + re_tail,
        head.value[1] - im_tail,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::drude_expansion;
    use proptest::prelude::*;

    fn ohmic(lambda: f64, omega_c: f64, s: f64) -> OhmicLikeSpec {
        OhmicLikeSpec::new(lambda, omega_c, s).unwrap()
    }

    fn vacuum_ohmic(lambda: f64, omega_c: f64, t: f64) -> f64 {
        2.0 * lambda * (omega_c * omega_c * t * t).ln_1p()
    }

    #[test]
    fn vanishes_at_origin_and_for_free_bath() {
        assert_eq!(
            decoherence_factor(ohmic(0.2, 50.0, 1.0), 1.0, 0.0).unwrap(),
            0.0
        );
        assert_eq!(
            decoherence_factor(ohmic(0.0, 50.0, 1.0), 1.0, 2.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn vacuum_ohmic_matches_closed_form() {
        let v = decoherence_factor(ohmic(0.2, 50.0, 1.0), 0.0, 0.3).unwrap();
        assert!((v - 0.4 * 226f64.ln()).abs() < 1e-9);
        assert!((v - 2.1682).abs() < 1e-4);
        for &t in &[1e-3, 3e-3, 0.01, 0.05, 0.3, 1.0, 2.7, 10.0] {
            let v = decoherence_factor(ohmic(0.05, 50.0, 1.0), 0.0, t).unwrap();
            let exact = vacuum_ohmic(0.05, 50.0, t);
            assert!((v - exact).abs() <= 1e-8 * exact, "t = {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn vacuum_ohmic_rate_matches_closed_form() {
        for &t in &[0.01, 0.3, 2.0] {
            let smp = decoherence_factor_and_rate(ohmic(0.2, 50.0, 1.0), 0.0, t).unwrap();
            let x = 50.0 * t;
            let exact = 4.0 * 0.2 * 50.0 * x / (1.0 + x * x);
            assert!((smp.rate - exact).abs() <= 1e-8 * exact);
        }
    }

    #[test]
    fn high_temperature_asymptote() {
        let (lambda, wc, temp, t) = (0.001, 50.0, 100.0, 1.0);
        let v = decoherence_factor(ohmic(lambda, wc, 1.0), temp, t).unwrap();
        let asym =
            8.0 * lambda * temp * (t * (wc * t).atan() - (wc * wc * t * t).ln_1p() / (2.0 * wc));
        assert!(((v - asym) / asym).abs() < 0.02);
    }

    #[test]
    fn rate_matches_central_difference() {
        for &(s, temp) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
            let spec = ohmic(0.1, 20.0, s);
            let (t, h) = (0.4, 1e-4);
            let r = decoherence_factor_and_rate(spec, temp, t).unwrap().rate;
            let fd = (decoherence_factor(spec, temp, t + h).unwrap()
                - decoherence_factor(spec, temp, t - h).unwrap())
                / (2.0 * h);
            assert!(
                (r - fd).abs() < 1e-6 * r.abs().max(1.0),
                "s = {s}: {r} vs {fd}"
            );
        }
    }

    #[test]
    fn drude_factor_matches_matsubara_double_integral() {
        // Γ = 4∫₀^t∫₀^τ C_R with C_R summed term by term; Σ_k ζ_k/ν_k = 2ΛT/ω_c.
        let spec = DrudeSpec::new(0.05, 5.0).unwrap();
        let temp = 1.3;
        let exp = drude_expansion(spec, temp, 200_000).unwrap();
        for &t in &[0.05, 0.7, 4.0] {
            let mut curved = 0.0;
            for term in exp.terms() {
                curved += term.zeta.re * (-(-term.nu * t).exp_m1()) / (term.nu * term.nu);
            }
            let oracle = 4.0 * (t * 2.0 * spec.lambda * temp / spec.omega_c - curved);
            let v = decoherence_factor(spec, temp, t).unwrap();
            assert!(
                (v - oracle).abs() < 1e-8 * oracle,
                "t = {t}: {v} vs {oracle}"
            );
        }
    }

    #[test]
    fn ohmic_imaginary_part_is_temperature_free() {
        let (lambda, wc, t): (f64, f64, f64) = (0.2, 5.0, 0.4);
        let x = wc * t;
        let exact = -lambda * 2.0 * wc.powi(3) * t / (1.0 + x * x).powi(2);
        for &temp in &[0.0, 1.0, 10.0] {
            let c = correlation_function(ohmic(lambda, wc, 1.0), temp, t).unwrap();
            assert!((c.im - exact).abs() < 1e-9 * exact.abs());
        }
        assert_eq!(
            correlation_function(ohmic(0.0, wc, 1.0), 1.0, t).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn drude_imaginary_part_identity() {
        let spec = DrudeSpec::new(0.05, 5.0).unwrap();
        for &t in &[0.05, 0.3, 1.0] {
            let c = correlation_function(spec, 5.0, t).unwrap();
            let exact = -spec.lambda * spec.omega_c * (-spec.omega_c * t).exp();
            assert!((c.im - exact).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn pulse_filter_is_finite_at_poles() {
        let (n, dt) = (7u32, 0.05);
        let pole = PI / dt;
        let limit = 8.0 * (n as f64).powi(2);
        assert!((pulse_filter(pole, n, dt) - limit).abs() < 1e-9 * limit);
        for &off in &[1e-6, -1e-6] {
            let v = pulse_filter(pole + off, n, dt);
            assert!(((v - limit) / limit).abs() < 1e-4);
        }
    }

    #[test]
    fn pulse_filter_matches_naive_product_off_pole() {
        let (n, dt) = (3u32, 0.1);
        for &w in &[0.3, 5.0, 29.0, 33.0, 95.0] {
            let x = 0.5 * w * dt;
            let naive = (1.0 - (w * 2.0 * n as f64 * dt).cos()) * x.tan().powi(2);
            assert!((pulse_filter(w, n, dt) - naive).abs() < 1e-9 * naive.max(1e-3));
        }
    }

    #[test]
    fn pulsed_factor_matches_naive_quadrature() {
        let spec = ohmic(0.2, 20.0, 1.0);
        let (temp, n, dt) = (1.0, 5u32, 0.05);
        let v = decoherence_factor_pulsed(spec, temp, n, dt).unwrap();
        let t = 2.0 * n as f64 * dt;
        // naive integrand, never evaluated at the poles (GK nodes are interior)
        let naive = |w: f64| {
            let x = 0.5 * w * dt;
            4.0 * spec.density(w) * thermal_factor(w, temp) / (w * w)
                * (1.0 - (w * t).cos())
                * x.tan().powi(2)
        };
        let mut breaks: Vec<f64> = (0..=200).map(|k| k as f64 * 5.0).collect();
        breaks.extend((0..16).map(|k| (2 * k + 1) as f64 * PI / dt));
        breaks.sort_by(f64::total_cmp);
        let (oracle, _) = (
            quadrature::integrate(|w| [naive(w)], &breaks, &Tolerance::new(1e-12, 1e-9))
                .unwrap()
                .value[0],
            0,
        );
        assert!((v - oracle).abs() < 1e-7 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn shorter_pulse_interval_suppresses_decoherence() {
        let spec = ohmic(0.2, 20.0, 1.0);
        let fine = decoherence_factor_pulsed(spec, 1.0, 100, 0.005).unwrap();
        let coarse = decoherence_factor_pulsed(spec, 1.0, 10, 0.05).unwrap();
        assert!(fine < coarse);
        assert_eq!(
            decoherence_factor_pulsed(ohmic(0.0, 20.0, 1.0), 1.0, 3, 0.05).unwrap(),
            0.0
        );
        assert!(decoherence_factor_pulsed(spec, 1.0, 3, 0.0).is_err());
    }

    #[test]
    fn halving_tolerance_changes_less_than_error_estimate() {
        let spec = ohmic(0.2, 50.0, 0.7);
        let smp = decoherence_factor_and_rate(spec, 2.0, 0.8).unwrap();
        let base = ohmic_base(&spec, 2.0);
        let t = 0.8;
        let f = |w: f64| {
            let sh = (0.5 * w * t).sin();
            [base(w) * 2.0 * sh * sh / w]
        };
        let breaks = uniform_breaks(spec_upper_limit(50.0, 2.0, t), panel_width(50.0, t));
        let fine = integrate_with_origin(f, spec.s, &breaks, &GAMMA_TOLERANCE.scaled(0.5)).unwrap();
        assert!((fine.value[0] - smp.gamma).abs() <= smp.gamma_error);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn nondecreasing_in_temperature(
            lambda in 0.001f64..0.3,
            s in 0.3f64..2.0,
            wc in 1.0f64..60.0,
            t in 0.01f64..3.0,
            t1 in 0.0f64..5.0,
            dt in 0.01f64..5.0,
        ) {
            let spec = ohmic(lambda, wc, s);
            let lo = decoherence_factor(spec, t1, t).unwrap();
            let hi = decoherence_factor(spec, t1 + dt, t).unwrap();
            prop_assert!(lo >= 0.0);
            prop_assert!(hi >= lo * (1.0 - 1e-10));
        }

        #[test]
        fn linear_in_coupling(
            lambda in 0.001f64..0.3,
            s in 0.3f64..2.0,
            wc in 1.0f64..60.0,
            t in 0.01f64..3.0,
            temp in 0.0f64..5.0,
        ) {
            let one = decoherence_factor(ohmic(lambda, wc, s), temp, t).unwrap();
            let two = decoherence_factor(ohmic(2.0 * lambda, wc, s), temp, t).unwrap();
            prop_assert!((two - 2.0 * one).abs() <= 1e-10 * two);
        }
    }
}
