//! Mode quantities, the Fourier-series kernel of the linearized Neumann
//! problem and its Green function, with rigorous truncation control.
//!
//! Mode `n` of the remainder problem evolves with
//! `gamma_n = n pi / ell`, `h_n = (alpha + eps gamma_n^2) / 2` and time factor
//! `H_n(t) = exp(-h_n t) sinh(omega_n t) / omega_n`, `omega_n^2 = h_n^2 - gamma_n^2`.
//! When `omega_n^2 < 0` the real continuation `exp(-h_n t) sin(w t) / w`
//! with `w^2 = gamma_n^2 - h_n^2` is used, and `exp(-h_n t) t` at the
//! degenerate point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Below this value of `|freq * t|` the `sinh(z)/z` (resp. `sin(z)/z`)
/// factor is replaced by its series.
const SMALL_ARG: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Hyperbolic,
    Trigonometric,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub n: u64,
    pub gamma_n: f64,
    pub h_n: f64,
    pub disc: f64,
    pub regime: Regime,
    pub freq: f64,
}

/// Spectral data of mode `n >= 1`.
pub fn mode_data(params: &ModelParams, n: u64) -> ModeData {
    debug_assert!(n >= 1);
    let gamma_n = n as f64 * PI / params.ell;
    let h_n = 0.5 * (params.alpha + params.eps * gamma_n * gamma_n);
    // factored form keeps the sign exact near the band edges
    let disc = (h_n - gamma_n) * (h_n + gamma_n);
    let (regime, freq) = if disc > 0.0 {
        (Regime::Hyperbolic, disc.sqrt())
    } else if disc < 0.0 {
        (Regime::Trigonometric, (-disc).sqrt())
    } else {
        (Regime::Degenerate, 0.0)
    };
    ModeData {
        n,
        gamma_n,
        h_n,
        disc,
        regime,
        freq,
    }
}

/// Thresholds separating hyperbolic and trigonometric modes.
///
/// Modes `n1..=n2` are trigonometric, all others hyperbolic. `defined` is
/// false when `alpha * eps >= 1` (no trigonometric band) or `eps == 0`
/// (the band never closes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSplit {
    pub n1: u64,
    pub n2: u64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub defined: bool,
}

pub fn regime_split(params: &ModelParams) -> RegimeSplit {
    let ae = params.alpha * params.eps;
    if params.eps <= 0.0 || ae >= 1.0 {
        return RegimeSplit {
            n1: 0,
            n2: 0,
            lower_bound: f64::NAN,
            upper_bound: f64::NAN,
            defined: false,
        };
    }
    let root = (1.0 - ae).sqrt();
    let scale = params.ell / (PI * params.eps);
    // 1 - sqrt(1 - x) without cancellation
    let lower_bound = scale * ae / (1.0 + root);
    let upper_bound = scale * (1.0 + root);
    let n1 = (lower_bound.floor() as u64 + 1).max(1);
    let n2 = (upper_bound.ceil() as u64).saturating_sub(1);
    RegimeSplit {
        n1,
        n2,
        lower_bound,
        upper_bound,
        defined: true,
    }
}

/// Index after which every mode is non-trigonometric.
pub fn hyperbolic_start(params: &ModelParams) -> Result<u64> {
    if params.eps <= 0.0 {
        return Err(Error::PreconditionViolation(
            "with eps = 0 the trigonometric band is unbounded; no hyperbolic tail exists".into(),
        ));
    }
    let split = regime_split(params);
    Ok(if split.defined { split.n2 } else { 0 })
}

/// Series-truncation controls: at most `max_modes` terms, stop at the first
/// index whose analytic tail bound drops below `tail_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub max_modes: u64,
    pub tail_tol: f64,
}

impl TruncationPolicy {
    pub fn new(max_modes: u64, tail_tol: f64) -> Result<Self> {
        if max_modes < 1 {
            return Err(Error::InvalidParams("max_modes must be >= 1".into()));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParams("tail_tol must be > 0".into()));
        }
        Ok(TruncationPolicy {
            max_modes,
            tail_tol,
        })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_modes: 20_000_000,
            tail_tol: 1e-8,
        }
    }
}

/// `H_n(t)` from precomputed mode data.
pub fn kernel_value(mode: &ModeData, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let z = mode.freq * t;
    match mode.regime {
        Regime::Degenerate => (-mode.h_n * t).exp() * t,
        Regime::Trigonometric => {
            if z < SMALL_ARG {
                (-mode.h_n * t).exp() * t * (1.0 - z * z / 6.0)
            } else {
                (-mode.h_n * t).exp() * z.sin() / mode.freq
            }
        }
        Regime::Hyperbolic => {
            if z < SMALL_ARG {
                (-mode.h_n * t).exp() * t * (1.0 + z * z / 6.0)
            } else {
                // e^{-(h-w)t} (1 - e^{-2wt}) / (2w), with h - w = gamma^2 / (h + w)
                let decay = mode.gamma_n * mode.gamma_n / (mode.h_n + mode.freq);
                (-decay * t).exp() * (-(-2.0 * z).exp_m1()) / (2.0 * mode.freq)
            }
        }
    }
}

/// `H_n(t)` for mode `n`.
pub fn kernel_mode(params: &ModelParams, n: u64, t: f64) -> f64 {
    kernel_value(&mode_data(params, n), t)
}

/// `ln H_n(t)` for a non-trigonometric mode, finite even where `H_n`
/// underflows.
pub fn ln_kernel_value(mode: &ModeData, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::PreconditionViolation("ln H_n needs t > 0".into()));
    }
    match mode.regime {
        Regime::Trigonometric => Err(Error::PreconditionViolation(format!(
            "mode {} is trigonometric; H_n can change sign",
            mode.n
        ))),
        Regime::Degenerate => Ok(t.ln() - mode.h_n * t),
        Regime::Hyperbolic => {
            let z = mode.freq * t;
            if z < SMALL_ARG {
                Ok(t.ln() - mode.h_n * t + (z * z / 6.0).ln_1p())
            } else {
                let decay = mode.gamma_n * mode.gamma_n / (mode.h_n + mode.freq);
                Ok(-decay * t + (-(-2.0 * z).exp_m1()).ln() - (2.0 * mode.freq).ln())
            }
        }
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// First mode index from which `h_n >= 2 gamma_n` holds for all larger
/// modes, so that `omega_n >= (sqrt 3 / 2) h_n`.
fn strong_damping_start(params: &ModelParams) -> u64 {
    let ae = params.alpha * params.eps;
    if ae > 4.0 {
        return 1;
    }
    let root = (2.0 + (4.0 - ae).sqrt()) / params.eps;
    let mut k = ((root * params.ell / PI).ceil() as u64).max(1);
    while {
        let m = mode_data(params, k);
        m.h_n < 2.0 * m.gamma_n
    } {
        k += 1;
    }
    k
}

/// `ln` of the per-mode majorant `sup_{s >= t} min(s, 1/(2 omega)) e^{-a s}`
/// with `a = gamma^2 / (2 h)`. Nonincreasing in `t` by construction.
fn ln_mode_majorant(mode: &ModeData, t: f64) -> f64 {
    let a = mode.gamma_n * mode.gamma_n / (2.0 * mode.h_n);
    let cap = if mode.freq > 0.0 {
        0.5 / mode.freq
    } else {
        f64::INFINITY
    };
    let peak = cap.min(1.0 / a);
    let s = t.max(peak);
    s.min(cap).ln() - a * s
}

/// `ln` of [`tail_bound`].
pub fn ln_tail_bound(params: &ModelParams, n_cut: u64, t: f64) -> Result<f64> {
    let start = hyperbolic_start(params)?;
    if n_cut < start {
        return Err(Error::PreconditionViolation(format!(
            "tail bound needs N >= N2 = {start}, got N = {n_cut}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "tail bound needs t > 0, got {t}"
        )));
    }
    let k_star = strong_damping_start(params);
    let k = k_star.max(n_cut + 1);
    let mut acc = f64::NEG_INFINITY;
    for n in (n_cut + 1)..k {
        acc = ln_add(acc, ln_mode_majorant(&mode_data(params, n), t));
    }
    // n >= k: 1/(2 omega_n) <= 2 ell^2 / (sqrt(3) eps pi^2 n^2), and
    // sum_{n >= k} n^-2 <= 1/k^2 + 1/k; the exponential factor is largest at n = k.
    let mk = mode_data(params, k);
    let a_k = mk.gamma_n * mk.gamma_n / (2.0 * mk.h_n);
    let kf = k as f64;
    let coef = 2.0 * params.ell * params.ell / (3f64.sqrt() * params.eps * PI * PI);
    let closed = -a_k * t + coef.ln() + (1.0 / (kf * kf) + 1.0 / kf).ln();
    Ok(ln_add(acc, closed))
}

/// Rigorous upper bound for `sum_{n > N} |H_n(t)|` (hence for the tail of
/// any cosine-weighted series). Needs `N >= N2` so the tail is entirely
/// non-trigonometric. Nonincreasing in `N` and in `t`.
pub fn tail_bound(params: &ModelParams, n_cut: u64, t: f64) -> Result<f64> {
    Ok(ln_tail_bound(params, n_cut, t)?.exp())
}

/// Smallest admissible cutoff meeting the policy at time `t`, with its
/// tail bound.
pub fn modes_needed(params: &ModelParams, t: f64, policy: &TruncationPolicy) -> Result<(u64, f64)> {
    let ln_tol = policy.tail_tol.ln();
    let start = hyperbolic_start(params)?;
    if policy.max_modes < start {
        return Err(Error::TailNotConverged {
            t,
            modes: policy.max_modes,
            bound: f64::INFINITY,
            tol: policy.tail_tol,
        });
    }
    let at = |n: u64| ln_tail_bound(params, n, t);
    let first = at(start)?;
    if first < ln_tol {
        return Ok((start, first.exp()));
    }
    let last = at(policy.max_modes)?;
    if last >= ln_tol {
        return Err(Error::TailNotConverged {
            t,
            modes: policy.max_modes,
            bound: last.exp(),
            tol: policy.tail_tol,
        });
    }
    // exponential bracket then bisection; the bound is monotone in N
    let mut lo = start;
    let mut hi = start.max(1);
    loop {
        hi = hi.saturating_mul(2).min(policy.max_modes);
        if at(hi)? < ln_tol {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid)? < ln_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, at(hi)?.exp()))
}

/// A truncated series value with its truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub modes: u64,
    pub tail_bound: f64,
}

/// `H(x, xi, t) = sum_n H_n(t) cos(gamma_n xi) cos(gamma_n x)`, truncated
/// per `policy`.
pub fn theta_sum(
    params: &ModelParams,
    x: f64,
    xi: f64,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    check_position(params, x)?;
    check_position(params, xi)?;
    if t < 0.0 {
        return Err(Error::PreconditionViolation(format!(
            "t must be >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            modes: 0,
            tail_bound: 0.0,
        });
    }
    let (modes, tail) = modes_needed(params, t, policy)?;
    let kx = PI * x / params.ell;
    let kxi = PI * xi / params.ell;
    let value = (1..=modes)
        .map(|n| {
            let nf = n as f64;
            kernel_mode(params, n, t) * (nf * kx).cos() * (nf * kxi).cos()
        })
        .sum();
    Ok(SeriesValue {
        value,
        modes,
        tail_bound: tail,
    })
}

fn check_position(params: &ModelParams, x: f64) -> Result<()> {
    if !(0.0..=params.ell).contains(&x) {
        return Err(Error::PreconditionViolation(format!(
            "position {x} outside [0, {}]",
            params.ell
        )));
    }
    Ok(())
}

/// Zero-mode part of the Green function, `(1 - e^{-alpha t}) / alpha`.
pub fn zero_mode(alpha: f64, t: f64) -> f64 {
    -(-alpha * t).exp_m1() / alpha
}

/// Green function of the remainder problem:
/// `G = (1/ell)(1 - e^{-alpha t})/alpha + (2/ell) H(x, xi, t)`.
pub fn green(
    params: &ModelParams,
    x: f64,
    xi: f64,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let series = theta_sum(params, x, xi, t, policy)?;
    Ok(zero_mode(params.alpha, t) / params.ell + 2.0 * series.value / params.ell)
}

/// Exponential rates of the decay envelope: `max{alpha/4, alpha ell^2/(2 pi^2)}`
/// and the `min` variant.
pub fn envelope_rates(params: &ModelParams) -> (f64, f64) {
    let a = params.alpha / 4.0;
    let b = params.alpha * params.ell * params.ell / (2.0 * PI * PI);
    (a.max(b), a.min(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub t: f64,
    /// Truncated `sum_n H_n(t)` plus its tail bound.
    pub sum_h: f64,
    pub tail_bound: f64,
    pub modes: u64,
    /// `e^{-m t}` with `m` the max rate.
    pub envelope: f64,
    pub ratio: f64,
    /// `e^{-m t}` with `m` the min rate.
    pub envelope_min: f64,
    pub ratio_min: f64,
}

/// `sum_n H_n(t)` (upper-bounded by adding the tail bound) against the
/// envelope `e^{-m t}` for every `t >= 1` of `t_grid`.
pub fn decay_profile(
    params: &ModelParams,
    t_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<Vec<DecayPoint>> {
    let (m_max, m_min) = envelope_rates(params);
    t_grid
        .iter()
        .map(|&t| {
            if !(t >= 1.0) {
                return Err(Error::PreconditionViolation(format!(
                    "decay profile is defined for t >= 1, got {t}"
                )));
            }
            let (modes, tail) = modes_needed(params, t, policy)?;
            let partial: f64 = (1..=modes).map(|n| kernel_mode(params, n, t)).sum();
            let sum_h = partial + tail;
            Ok(DecayPoint {
                t,
                sum_h,
                tail_bound: tail,
                modes,
                envelope: (-m_max * t).exp(),
                ratio: sum_h * (m_max * t).exp(),
                envelope_min: (-m_min * t).exp(),
                ratio_min: sum_h * (m_min * t).exp(),
            })
        })
        .collect()
}

/// Difference between the trigonometric factor of mode `n` and the
/// reference oscillation
/// `R(n,t) = e^{-h_n t} sin(w_n t)/w_n - e^{-h_1 t} sin(w0 t)/w0`
/// with `w0 = sqrt(gamma_n^2 - alpha^2/4)` and `h_1 = (alpha + eps pi^2/ell^2)/2`.
pub fn lemma2_difference(params: &ModelParams, n: u64, t: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::PreconditionViolation(
            "mode index starts at 1".into(),
        ));
    }
    let mode = mode_data(params, n);
    if mode.regime != Regime::Trigonometric {
        return Err(Error::PreconditionViolation(format!(
            "mode {n} is {:?}, outside the trigonometric band",
            mode.regime
        )));
    }
    let w0_sq = mode.gamma_n * mode.gamma_n - 0.25 * params.alpha * params.alpha;
    if !(w0_sq > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "reference frequency is not real for mode {n}"
        )));
    }
    let w0 = w0_sq.sqrt();
    let h1 = 0.5 * (params.alpha + params.eps * PI * PI / (params.ell * params.ell));
    Ok(kernel_value(&mode, t) - (-h1 * t).exp() * (w0 * t).sin() / w0)
}

/// Values of `H(x_i, xi_j, s)` on the uniform grid `x_i = i ell / (nx - 1)`.
#[derive(Debug, Clone)]
pub struct GridKernel {
    pub nx: usize,
    /// Row-major `nx * nx` matrix.
    pub values: Vec<f64>,
    pub modes: u64,
    pub tail_bound: f64,
}

impl GridKernel {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nx + j]
    }
}

/// Evaluates the kernel on all grid node pairs at lag `s`.
///
/// On the grid `cos(gamma_n x_i) = cos(n pi i / M)` with `M = nx - 1` is
/// periodic in `n` with period `2M`, so the modes are folded into `2M`
/// residue classes before the cosine transform. Every pair sees the same
/// truncation and the same tail bound.
pub fn grid_kernel(
    params: &ModelParams,
    nx: usize,
    s: f64,
    policy: &TruncationPolicy,
) -> Result<GridKernel> {
    if nx < 2 {
        return Err(Error::InvalidParams("grid kernel needs nx >= 2".into()));
    }
    if s == 0.0 {
        return Ok(GridKernel {
            nx,
            values: vec![0.0; nx * nx],
            modes: 0,
            tail_bound: 0.0,
        });
    }
    let (modes, tail) = modes_needed(params, s, policy)?;
    let m = nx - 1;
    let period = 2 * m;
    let mut folded = vec![0.0; period];
    for n in 1..=modes {
        folded[(n % period as u64) as usize] += kernel_mode(params, n, s);
    }
    let cos_table: Vec<f64> = (0..period)
        .flat_map(|r| (0..nx).map(move |i| ((r * i) as f64 * PI / m as f64).cos()))
        .collect();
    let mut values = vec![0.0; nx * nx];
    for (r, &a_r) in folded.iter().enumerate() {
        if a_r == 0.0 {
            continue;
        }
        let row = &cos_table[r * nx..(r + 1) * nx];
        for i in 0..nx {
            let ci = a_r * row[i];
            let out = &mut values[i * nx..(i + 1) * nx];
            for (o, &cj) in out.iter_mut().zip(row) {
                *o += ci * cj;
            }
        }
    }
    Ok(GridKernel {
        nx,
        values,
        modes,
        tail_bound: tail,
    })
}
