//! Numerical integration.
//!
//! * [`integrate`]: globally adaptive 15-point Gauss–Kronrod over a set of
//!   breakpoints, for vector-valued integrands (several integrals sharing the
//!   same abscissae are refined together);
//! * [`oscillatory_tail`]: `∫_a^∞ g(ω) cos(ωt) dω` (or `sin`) for slowly
//!   decaying `g`, summed over half periods and extrapolated with Wynn's
//!   epsilon algorithm;
//! * [`adaptive_simpson`]: Richardson-corrected adaptive Simpson for smooth
//!   one-dimensional time integrals whose integrand is itself expensive.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Cap on the number of subintervals kept by [`integrate`].
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 200_000,
        }
    }

    /// The same rule with both tolerances scaled by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            abs: self.abs * factor,
            rel: self.rel * factor,
            ..self
        }
    }

    #[inline]
    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-13, 1e-10)
    }
}

/// Integral estimate with its (conservative) absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
}

impl<const N: usize> Estimate<N> {
    fn zero() -> Self {
        Self {
            value: [0.0; N],
            error: [0.0; N],
            evaluations: 0,
        }
    }

    /// Component-wise sum of two estimates.
    pub fn combine(mut self, other: &Self) -> Self {
        for j in 0..N {
            self.value[j] += other.value[j];
            self.error[j] += other.error[j];
        }
        self.evaluations += other.evaluations;
        self
    }
}

#[derive(Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk15<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> Segment<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        fv1[j] = f(center - x);
        fv2[j] = f(center + x);
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        let mut res_g = fc[c] * WG[3];
        let mut res_k = fc[c] * WGK[7];
        let mut res_abs = res_k.abs();
        for j in 0..7 {
            let sum = fv1[j][c] + fv2[j][c];
            res_k += WGK[j] * sum;
            res_abs += WGK[j] * (fv1[j][c].abs() + fv2[j][c].abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * sum;
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[7] * (fc[c] - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j][c] - mean).abs() + (fv2[j][c] - mean).abs());
        }
        let err = (res_k - res_g) * half;
        value[c] = res_k * half;
        error[c] = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    }
    Segment { a, b, value, error }
}

struct Ranked {
    priority: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.priority.total_cmp(&other.priority) == Ordering::Equal && self.index == other.index
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over the union of the
/// intervals delimited by `breakpoints` (sorted, at least two).
///
/// Every component `j` must satisfy `error[j] <= max(abs, rel·|value[j]|)`.
pub fn integrate<const N: usize, F>(
    f: F,
    breakpoints: &[f64],
    tol: &Tolerance,
) -> Result<Estimate<N>>
where
    F: Fn(f64) -> [f64; N],
{
    if breakpoints.len() < 2 {
        return Ok(Estimate::zero());
    }
    let mut segments: Vec<Segment<N>> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * segments.len();
    let mut total = [0.0; N];
    let mut total_err = [0.0; N];
    for s in &segments {
        for j in 0..N {
            total[j] += s.value[j];
            total_err[j] += s.error[j];
        }
    }

    let priority = |s: &Segment<N>, total: &[f64; N]| -> f64 {
        (0..N)
            .map(|j| s.error[j] / tol.target(total[j]).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    };
    let mut heap: BinaryHeap<Ranked> = segments
        .iter()
        .enumerate()
        .map(|(index, s)| Ranked {
            priority: priority(s, &total),
            index,
        })
        .collect();

    let converged =
        |total: &[f64; N], err: &[f64; N]| (0..N).all(|j| err[j] <= tol.target(total[j]));

    while !converged(&total, &total_err) {
        let Some(Ranked { index, .. }) = heap.pop() else {
            break;
        };
        if segments.len() >= tol.max_intervals {
            break;
        }
        let s = segments[index];
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) || (s.b - s.a) <= 8.0 * f64::EPSILON * mid.abs() {
            // unsplittable; leave it out of the queue
            continue;
        }
        let left = gk15(&f, s.a, mid);
        let right = gk15(&f, mid, s.b);
        evaluations += 30;
        for j in 0..N {
            total[j] += left.value[j] + right.value[j] - s.value[j];
            total_err[j] += left.error[j] + right.error[j] - s.error[j];
        }
        segments[index] = left;
        segments.push(right);
        let right_index = segments.len() - 1;
        heap.push(Ranked {
            priority: priority(&left, &total),
            index,
        });
        heap.push(Ranked {
            priority: priority(&right, &total),
            index: right_index,
        });
    }

    // resum to shed the drift of incremental updates
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for s in &segments {
        for j in 0..N {
            value[j] += s.value[j];
            error[j] += s.error[j];
        }
    }
    if let Some(j) = (0..N).find(|&j| error[j] > tol.target(value[j])) {
        return Err(Error::Accuracy {
            requested: tol.target(value[j]),
            achieved: error[j],
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Scalar convenience wrapper around [`integrate`] on `[a, b]`.
pub fn integrate_scalar<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    let est = integrate(|x| [f(x)], &[a, b], tol)?;
    Ok((est.value[0], est.error[0]))
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
///
/// Returns the extrapolated limit and an error estimate taken from the
/// spread of the last two even-column entries.
pub fn wynn_epsilon(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    match n {
        0 => return (0.0, f64::INFINITY),
        1 => return (partial_sums[0], f64::INFINITY),
        _ => {}
    }
    // prev = column k−1, cur = column k; columns shrink by one each step
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    let mut best_err = (partial_sums[n - 1] - partial_sums[n - 2]).abs();
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                // exact convergence in this column
                if k % 2 == 0 {
                    return (cur[i + 1], 0.0);
                }
                next.push(f64::INFINITY);
                continue;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        k += 1;
        if k % 2 == 0 && next.len() >= 2 {
            let last = next[next.len() - 1];
            let before = next[next.len() - 2];
            if last.is_finite() && before.is_finite() {
                let err = (last - before).abs();
                if err < best_err {
                    best = last;
                    best_err = err;
                }
            }
        }
        prev = cur;
        cur = next;
    }
    (best, best_err)
}

/// Trigonometric weight used by [`oscillatory_tail`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillator {
    Cos,
    Sin,
}

impl Oscillator {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Oscillator::Cos => x.cos(),
            Oscillator::Sin => x.sin(),
        }
    }
}

/// `∫_start^∞ g(ω)·osc(ωt) dω` for smooth, slowly decaying `g` and `t > 0`.
///
/// The range is cut at the zeros of the oscillator; half-period contributions
/// alternate in sign and their partial sums are extrapolated with
/// [`wynn_epsilon`].
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    g: F,
    start: f64,
    t: f64,
    osc: Oscillator,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    if t <= 0.0 {
        return Err(Error::Domain(format!(
            "oscillatory tail needs t > 0, got {t}"
        )));
    }
    const MIN_PANELS: usize = 12;
    const MAX_PANELS: usize = 400;
    let half_period = std::f64::consts::PI / t;
    let offset = match osc {
        Oscillator::Cos => 0.5,
        Oscillator::Sin => 0.0,
    };
    // first zero strictly after start
    let mut k = ((start / half_period) - offset).floor() + 1.0;
    let mut left = start;
    let panel_tol = Tolerance::new(0.1 * tol.abs, (0.1 * tol.rel).max(100.0 * f64::EPSILON));
    let integrand = |w: f64| [g(w) * osc.eval(w * t)];
    let mut sums = Vec::with_capacity(64);
    let mut running = 0.0;
    let mut last_estimate = f64::NAN;
    let mut quad_err = 0.0;
    for n in 0..MAX_PANELS {
        let right = (k + offset) * half_period;
        let est = integrate(integrand, &[left, right], &panel_tol)?;
        running += est.value[0];
        quad_err += est.error[0];
        sums.push(running);
        left = right;
        k += 1.0;
        if n + 1 >= MIN_PANELS {
            // keep the table modest; long tables amplify rounding
            let window = &sums[sums.len().saturating_sub(40)..];
            let (estimate, err) = wynn_epsilon(window);
            let target = tol.target(estimate);
            let stable = (estimate - last_estimate).abs() <= target;
            if (err <= target && stable) || est.value[0].abs() <= 1e-3 * target {
                return Ok((
                    estimate,
                    err.max((estimate - last_estimate).abs()) + quad_err,
                ));
            }
            last_estimate = estimate;
        }
    }
    let (estimate, err) = wynn_epsilon(&sums[sums.len().saturating_sub(40)..]);
    Err(Error::Accuracy {
        requested: tol.target(estimate),
        achieved: err,
    })
}

/// Adaptive Simpson quadrature of a fallible integrand on `[a, b]`, to
/// relative accuracy `rel_tol` (measured against the integral of `|f|`).
///
/// The interval is first cut into `2^min_depth` panels so that features
/// narrower than the interval are not missed.
pub fn adaptive_simpson<F>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    min_depth: u32,
    max_depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if b == a {
        return Ok(0.0);
    }
    let panels = 1usize << min_depth;
    let h = (b - a) / panels as f64;
    // values at the 2·panels + 1 equispaced points
    let mut vals = Vec::with_capacity(2 * panels + 1);
    for i in 0..=2 * panels {
        vals.push(f(a + 0.5 * h * i as f64)?);
    }
    let coarse: f64 = (0..panels)
        .map(|p| {
            h / 6.0 * (vals[2 * p].abs() + 4.0 * vals[2 * p + 1].abs() + vals[2 * p + 2].abs())
        })
        .sum();
    let eps_total = rel_tol * coarse.max(f64::MIN_POSITIVE);

    struct Task {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    }
    let mut stack: Vec<Task> = (0..panels)
        .rev()
        .map(|p| {
            let (fa, fm, fb) = (vals[2 * p], vals[2 * p + 1], vals[2 * p + 2]);
            let pa = a + h * p as f64;
            Task {
                a: pa,
                b: pa + h,
                fa,
                fm,
                fb,
                whole: h / 6.0 * (fa + 4.0 * fm + fb),
                eps: eps_total / panels as f64,
                depth: min_depth,
            }
        })
        .collect();
    let mut result = 0.0;
    while let Some(t) = stack.pop() {
        let m = 0.5 * (t.a + t.b);
        let lm = 0.5 * (t.a + m);
        let rm = 0.5 * (m + t.b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let hh = 0.5 * (t.b - t.a);
        let left = hh / 6.0 * (t.fa + 4.0 * flm + t.fm);
        let right = hh / 6.0 * (t.fm + 4.0 * frm + t.fb);
        let delta = left + right - t.whole;
        if delta.abs() <= 15.0 * t.eps {
            result += left + right + delta / 15.0;
        } else if t.depth >= max_depth {
            return Err(Error::Accuracy {
                requested: t.eps,
                achieved: delta.abs() / 15.0,
            });
        } else {
            stack.push(Task {
                a: m,
                b: t.b,
                fa: t.fm,
                fm: frm,
                fb: t.fb,
                whole: right,
                eps: 0.5 * t.eps,
                depth: t.depth + 1,
            });
            stack.push(Task {
                a: t.a,
                b: m,
                fa: t.fa,
                fm: flm,
                fb: t.fm,
                whole: left,
                eps: 0.5 * t.eps,
                depth: t.depth + 1,
            });
        }
    }
    Ok(result)
}
