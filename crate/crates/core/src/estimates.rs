//! Desk-scale checks of the decay estimates: kernel envelope, the three
//! band lemmas, the Gronwall bound and the boundary-layer scaling of the
//! remainder `d = u - U`.
//!
//! Every verdict is a pure function of numbers stored in the returned
//! report, so a report written to JSON can be re-checked externally.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{boundedness_certificate, neumann_data_from, BoundCertificate, KinkFamily};
use crate::params::ModelParams;
use crate::pde::{remainder_field, solve_hyperbolic, solve_parabolic, sup_profile, Grid};
use crate::spectral_kernel::{
    decay_profile, envelope_rates, kernel_mode, lemma2_difference, ln_kernel_value, ln_tail_bound,
    mode_data, regime_split, DecayPoint, Regime, TruncationPolicy,
};

/// Default order-of-magnitude gate for "independent of eps".
pub const UNIFORMITY_GATE: f64 = 10.0;

/// `C eps^(1 - k/alpha) ln(1/eps^k) e^(B/m)`.
pub fn gronwall_bound(c: f64, b: f64, m: f64, alpha: f64, k: f64, eps: f64) -> Result<f64> {
    let ok = c > 0.0
        && b >= 0.0
        && m > 0.0
        && alpha > 0.0
        && k > 0.0
        && k < alpha
        && eps > 0.0
        && eps < 1.0
        && [c, b, m, alpha, k, eps].iter().all(|v| v.is_finite());
    if !ok {
        return Err(Error::DomainError(format!(
            "gronwall bound needs C > 0, B >= 0, m > 0, 0 < k < alpha, 0 < eps < 1; \
             got C={c}, B={b}, m={m}, alpha={alpha}, k={k}, eps={eps}"
        )));
    }
    Ok(c * eps.powf(1.0 - k / alpha) * (k * (1.0 / eps).ln()) * (b / m).exp())
}

/// Least-squares slope of `ln values` against `ln eps_list`.
pub fn fit_exponent(eps_list: &[f64], values: &[f64]) -> Result<f64> {
    if eps_list.len() != values.len() {
        return Err(Error::DegenerateFit(format!(
            "{} abscissae for {} values",
            eps_list.len(),
            values.len()
        )));
    }
    if eps_list.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 points, got {}",
            eps_list.len()
        )));
    }
    if eps_list
        .iter()
        .chain(values)
        .any(|v| !(*v > 0.0 && v.is_finite()))
    {
        return Err(Error::DegenerateFit(
            "all points must be positive and finite".into(),
        ));
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 1e-300 {
        return Err(Error::DegenerateFit("abscissae have zero variance".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// `n` equally spaced times on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// A named PASS/FAIL decision with the statistic it was taken on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Gate {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Gate {
            name: name.into(),
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

// ---------------------------------------------------------------------------
// kernel envelope

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem3Row {
    pub eps: f64,
    pub m_max: f64,
    pub m_min: f64,
    pub sup_ratio: f64,
    pub sup_ratio_min: f64,
    pub points: Vec<DecayPoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub ell: f64,
    pub alpha: f64,
    pub rows: Vec<Theorem3Row>,
    /// `max_eps sup_t r / sup_t r` at the first (largest) eps, `m` as printed.
    pub gate: Gate,
    /// Same statistic with the `min` rate.
    pub gate_min: Gate,
    /// `sum H_n` at the last time is below its value at the first time, per eps.
    pub decays: bool,
}

/// Sup over `t_grid` of `(sum_n H_n(t) + tail) e^{m t}` for every eps of the
/// sweep (first entry is the reference).
pub fn theorem3_check(
    base: &ModelParams,
    eps_list: &[f64],
    t_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<Theorem3Report> {
    if eps_list.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParams("empty eps list or time grid".into()));
    }
    let rows = eps_list
        .par_iter()
        .map(|&eps| -> Result<Theorem3Row> {
            let p = base.with_eps(eps);
            p.require_estimate_regime()?;
            let points = decay_profile(&p, t_grid, policy)?;
            let (m_max, m_min) = envelope_rates(&p);
            let sup =
                |f: fn(&DecayPoint) -> f64| points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            Ok(Theorem3Row {
                eps,
                m_max,
                m_min,
                sup_ratio: sup(|d| d.ratio),
                sup_ratio_min: sup(|d| d.ratio_min),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spread = |f: fn(&Theorem3Row) -> f64| {
        let reference = f(&rows[0]);
        rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max) / reference
    };
    let decays = rows.iter().all(|r| {
        let first = r.points.first().map(|p| p.sum_h);
        let last = r.points.last().map(|p| p.sum_h);
        matches!((first, last), (Some(a), Some(b)) if b < a)
    });
    Ok(Theorem3Report {
        ell: base.ell,
        alpha: base.alpha,
        gate: Gate::at_most(
            "theorem3 sup-ratio spread (m = max)",
            spread(|r| r.sup_ratio),
            UNIFORMITY_GATE,
        ),
        gate_min: Gate::at_most(
            "theorem3 sup-ratio spread (m = min)",
            spread(|r| r.sup_ratio_min),
            UNIFORMITY_GATE,
        ),
        rows,
        decays,
    })
}

// ---------------------------------------------------------------------------
// band lemmas

/// Free constants of the circular-band lemma; `rho = min{eta, 1-eta, 1/2-h, 3/2-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaConstants {
    pub eta: f64,
    pub h: f64,
    pub k: f64,
}

impl Default for LemmaConstants {
    fn default() -> Self {
        LemmaConstants {
            eta: 0.5,
            h: 0.25,
            k: 1.25,
        }
    }
}

impl LemmaConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0
            && self.eta < 1.0
            && self.h > 0.0
            && self.h < 0.5
            && self.k > 1.0
            && self.k < 1.5)
        {
            return Err(Error::DomainError(format!(
                "need 0 < eta < 1, 0 < h < 1/2, 1 < k < 3/2; got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.eta
            .min(1.0 - self.eta)
            .min(0.5 - self.h)
            .min(1.5 - self.k)
    }
}

/// Fitted constant of one band at one eps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BandFit {
    Fitted {
        /// Index range summed directly.
        n_lo: u64,
        n_hi: u64,
        /// Smallest constant making the inequality hold on the time grid,
        /// and its logarithm (the constant itself may overflow).
        constant: f64,
        ln_constant: f64,
        /// Time at which the constant is attained.
        t_star: f64,
    },
    /// The band has no modes at this eps.
    SkippedBand { reason: String },
}

impl BandFit {
    pub fn ln_constant(&self) -> Option<f64> {
        match self {
            BandFit::Fitted { ln_constant, .. } => Some(*ln_constant),
            BandFit::SkippedBand { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaRow {
    pub eps: f64,
    pub n1: u64,
    pub n2: u64,
    /// `sum_{n > N2} H_n <= B1 e^{-t/(4 eps)}`.
    pub hyperbolic_tail: BandFit,
    /// `sum_{n < N1} H_n <= B2 e^{-t ell^2/(2 eps pi^2)}`.
    pub low_band: BandFit,
    /// `sum_{n <= N2} [trigonometric difference] <= B3 eps^rho e^{-alpha t/4}`.
    pub circular_band: BandFit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandGate {
    pub band: String,
    /// `ln(max_eps B / B at the first eps with a fit)`; `None` when every eps skipped.
    pub ln_spread: Option<f64>,
    pub gate: Option<Gate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaReport {
    pub ell: f64,
    pub alpha: f64,
    pub constants: LemmaConstants,
    pub rho: f64,
    /// Upper mode index of the directly summed hyperbolic tail; the rest is
    /// covered by the rigorous tail bound.
    pub tail_modes: u64,
    pub rows: Vec<LemmaRow>,
    pub gates: Vec<BandGate>,
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Fits `sup_t [ln lhs(t) + rate t]`; `ln_lhs = -inf` means `lhs <= 0`.
fn fit_envelope(
    t_grid: &[f64],
    n_lo: u64,
    n_hi: u64,
    mut ln_lhs: impl FnMut(f64) -> Result<f64>,
    rate: f64,
    ln_scale: f64,
) -> Result<BandFit> {
    let mut best = (f64::NEG_INFINITY, t_grid[0]);
    for &t in t_grid {
        let v = ln_lhs(t)? + rate * t - ln_scale;
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(BandFit::Fitted {
        n_lo,
        n_hi,
        constant: best.0.exp(),
        ln_constant: best.0,
        t_star: best.1,
    })
}

/// Fits the smallest constants of the three band inequalities per eps on
/// `t_grid` (all `t >= 1`) and gates their growth as eps decreases.
///
/// The hyperbolic tail is summed in log space over `N2 < n <= tail_modes`
/// with the remainder covered by the rigorous tail bound. A non-positive
/// circular-band sum on the whole grid fits the constant 0.
pub fn lemma_checks(
    base: &ModelParams,
    eps_list: &[f64],
    constants: LemmaConstants,
    t_grid: &[f64],
    tail_modes: u64,
) -> Result<LemmaReport> {
    constants.validate()?;
    if eps_list.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParams("empty eps list or time grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 1.0)) {
        return Err(Error::PreconditionViolation(format!(
            "lemma checks need t >= 1, got {t}"
        )));
    }
    let rho = constants.rho();
    let rows = eps_list
        .par_iter()
        .map(|&eps| -> Result<LemmaRow> {
            let p = base.with_eps(eps);
            p.require_estimate_regime()?;
            let split = regime_split(&p);
            let (n1, n2) = (split.n1, split.n2);
            let n_hi = tail_modes.max(n2 + 1);

            let hyperbolic_tail = fit_envelope(
                t_grid,
                n2 + 1,
                n_hi,
                |t| {
                    let mut terms = Vec::with_capacity((n_hi - n2) as usize + 1);
                    for n in n2 + 1..=n_hi {
                        terms.push(ln_kernel_value(&mode_data(&p, n), t)?);
                    }
                    terms.push(ln_tail_bound(&p, n_hi, t)?);
                    Ok(log_sum_exp(&terms))
                },
                1.0 / (4.0 * eps),
                0.0,
            )?;

            let low_band = if n1 <= 1 {
                BandFit::SkippedBand {
                    reason: format!("N1 = {n1}: no modes below the trigonometric band"),
                }
            } else {
                fit_envelope(
                    t_grid,
                    1,
                    n1 - 1,
                    |t| {
                        let terms = (1..n1)
                            .map(|n| ln_kernel_value(&mode_data(&p, n), t))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(log_sum_exp(&terms))
                    },
                    p.ell * p.ell / (2.0 * eps * std::f64::consts::PI.powi(2)),
                    0.0,
                )?
            };

            let circ: Vec<u64> = (n1.max(1)..=n2)
                .filter(|&n| {
                    let m = mode_data(&p, n);
                    m.regime == Regime::Trigonometric && m.gamma_n > 0.5 * p.alpha
                })
                .collect();
            let circular_band = if circ.is_empty() {
                BandFit::SkippedBand {
                    reason: "no trigonometric modes with gamma_n > alpha/2".into(),
                }
            } else {
                fit_envelope(
                    t_grid,
                    circ[0],
                    *circ.last().expect("nonempty"),
                    |t| {
                        let mut s = 0.0;
                        for &n in &circ {
                            s += lemma2_difference(&p, n, t)?;
                        }
                        Ok(if s > 0.0 { s.ln() } else { f64::NEG_INFINITY })
                    },
                    0.25 * p.alpha,
                    rho * eps.ln(),
                )?
            };
            Ok(LemmaRow {
                eps,
                n1,
                n2,
                hyperbolic_tail,
                low_band,
                circular_band,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let band_gate = |name: &str, pick: fn(&LemmaRow) -> &BandFit| {
        let lns: Vec<f64> = rows.iter().filter_map(|r| pick(r).ln_constant()).collect();
        let ln_spread = lns.first().map(|&first| {
            let max = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if first == f64::NEG_INFINITY {
                if max == f64::NEG_INFINITY {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                max - first
            }
        });
        BandGate {
            band: name.into(),
            ln_spread,
            gate: ln_spread.map(|s| {
                Gate::at_most(&format!("{name} constant spread"), s.exp(), UNIFORMITY_GATE)
            }),
        }
    };
    let gates = vec![
        band_gate("hyperbolic tail", |r| &r.hyperbolic_tail),
        band_gate("low band", |r| &r.low_band),
        band_gate("circular band", |r| &r.circular_band),
    ];
    Ok(LemmaReport {
        ell: base.ell,
        alpha: base.alpha,
        constants,
        rho,
        tail_modes,
        rows,
        gates,
    })
}

/// Direct sum `sum_{n = lo}^{hi} H_n(t)`.
pub fn direct_mode_sum(params: &ModelParams, lo: u64, hi: u64, t: f64) -> f64 {
    (lo..=hi).map(|n| kernel_mode(params, n, t)).sum()
}

// ---------------------------------------------------------------------------
// boundary-layer scaling

/// Sweep definition for the remainder scaling law
/// `S(t) <= Gamma eps^(1 - k/alpha) ln(1/eps^k)` on `[1, T_eps)`,
/// `T_eps = k ln(1/eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub k: f64,
    pub alpha: f64,
    pub eps_list: Vec<f64>,
}

impl ScalingParams {
    /// Validates and sorts `eps_list` in descending order.
    pub fn new(k: f64, alpha: f64, mut eps_list: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParams(format!(
                "scaling needs 0 < alpha < 1, got {alpha}"
            )));
        }
        if !(k > 0.0 && k < alpha) {
            return Err(Error::InvalidParams(format!(
                "scaling needs 0 < k < alpha, got k = {k}"
            )));
        }
        if eps_list.is_empty() {
            return Err(Error::InvalidParams("eps list is empty".into()));
        }
        if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::InvalidParams(format!(
                "sweep needs 0 < eps < 1, got eps = {e}"
            )));
        }
        eps_list.sort_by(|a, b| b.total_cmp(a));
        eps_list.dedup();
        Ok(ScalingParams { k, alpha, eps_list })
    }

    pub fn t_eps(&self, eps: f64) -> f64 {
        self.k * (1.0 / eps).ln()
    }

    /// `eps^(1 - k/alpha) ln(1/eps^k)`.
    pub fn bound_shape(&self, eps: f64) -> f64 {
        eps.powf(1.0 - self.k / self.alpha) * self.t_eps(eps)
    }

    /// `[1, T_eps)` when `T_eps > 1`, otherwise `(0, T_eps]` with the clip flag.
    pub fn window(&self, eps: f64) -> (f64, f64, bool) {
        let t = self.t_eps(eps);
        if t > 1.0 {
            (1.0, t, false)
        } else {
            (0.0, t, true)
        }
    }
}

/// Grid refinement policy of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPolicy {
    pub ell: f64,
    pub nx_start: usize,
    pub nx_max: usize,
    /// `dt / dx`, at most 1.
    pub courant: f64,
    /// Relative change of `sup S` accepted between two refinements.
    pub stabilization: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            ell: std::f64::consts::PI,
            nx_start: 65,
            nx_max: 1025,
            courant: 0.5,
            stabilization: 0.05,
        }
    }
}

impl GridPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.ell > 0.0 && self.nx_start >= 5 && self.nx_max >= self.nx_start) {
            return Err(Error::InvalidParams(format!("bad grid policy {self:?}")));
        }
        if !(self.courant > 0.0 && self.courant <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "courant must be in (0, 1], got {}",
                self.courant
            )));
        }
        if !(self.stabilization > 0.0 && self.stabilization < 1.0) {
            return Err(Error::InvalidParams(
                "stabilization must be in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    fn grid(&self, nx: usize, horizon: f64) -> Result<Grid> {
        let dx = self.ell / (nx - 1) as f64;
        let nt = (horizon / (self.courant * dx)).ceil().max(2.0) as usize;
        Grid::new(self.ell, horizon, nx, nt)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub t_eps: f64,
    pub window: (f64, f64),
    pub window_clipped: bool,
    /// `(t, S(t))` on the accepted grid, whole run.
    pub profile: Vec<(f64, f64)>,
    pub sup_s: f64,
    pub t_at_sup: f64,
    /// `eps^(1 - k/alpha) ln(1/eps^k)`.
    pub bound_value: f64,
    pub ratio: f64,
    pub nx: usize,
    pub nt: usize,
    /// `|sup S(fine) - sup S(coarse)| / sup S(fine)` at acceptance.
    pub grid_rel_change: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub scaling: ScalingParams,
    pub family: KinkFamily,
    pub grid_policy: GridPolicy,
    pub certificate: BoundCertificate,
    /// Sorted by eps descending.
    pub per_eps: Vec<SweepPoint>,
    /// Slope of `ln sup_S` against `ln eps`; `None` when the fit is degenerate.
    pub fitted_exponent: Option<f64>,
    pub fit_error: Option<String>,
    /// `1 - k/alpha`, the exponent of the bound.
    pub bound_exponent: f64,
    /// `max_eps sup_S / bound_value`.
    pub fitted_gamma: f64,
    /// Max over min of the ratios.
    pub ratio_spread: Gate,
    pub sup_s_strictly_decreasing: bool,
    pub pass: bool,
}

/// Sup of `S` on the window, ignoring levels outside it.
fn window_sup(profile: &[(f64, f64)], (lo, hi): (f64, f64), clipped: bool) -> (f64, f64) {
    let tol = 1e-12 * hi;
    profile
        .iter()
        .filter(|(t, _)| {
            if clipped {
                *t > 0.0 && *t <= hi + tol
            } else {
                *t >= lo - tol && *t < hi - tol
            }
        })
        .fold((f64::NEG_INFINITY, f64::NAN), |b, &(t, s)| {
            if s > b.0 {
                (s, t)
            } else {
                b
            }
        })
}

struct Measured {
    grid: Grid,
    profile: Vec<(f64, f64)>,
    sup_s: f64,
    t_at_sup: f64,
}

fn run_point(
    scaling: &ScalingParams,
    family: &KinkFamily,
    policy: &GridPolicy,
    eps: f64,
) -> Result<SweepPoint> {
    let t_eps = scaling.t_eps(eps);
    let (lo, hi, clipped) = scaling.window(eps);
    let params = ModelParams::new(policy.ell, scaling.alpha, eps, 0.0, t_eps)?;
    let data = neumann_data_from(family, &params)?;
    let measure = |nx: usize| -> Result<Measured> {
        let grid = policy.grid(nx, t_eps)?;
        let u = solve_parabolic(&params, &data, &grid)?;
        let big_u = solve_hyperbolic(&params.with_eps(0.0), &data, &grid)?;
        let profile = sup_profile(&remainder_field(&u, &big_u)?);
        let (sup_s, t_at_sup) = window_sup(&profile, (lo, hi), clipped);
        if !(sup_s > 0.0) {
            return Err(Error::DegenerateFit(format!("empty window at eps = {eps}")));
        }
        Ok(Measured {
            grid,
            profile,
            sup_s,
            t_at_sup,
        })
    };
    let mut prev = measure(policy.nx_start)?;
    let mut last_rel = f64::NAN;
    loop {
        let next_nx = 2 * prev.grid.nx - 1;
        if next_nx > policy.nx_max {
            return Err(Error::GridNotConverged {
                eps,
                rel_change: last_rel,
            });
        }
        let cur = measure(next_nx)?;
        last_rel = (cur.sup_s - prev.sup_s).abs() / cur.sup_s;
        if last_rel < policy.stabilization {
            let bound_value = scaling.bound_shape(eps);
            return Ok(SweepPoint {
                eps,
                t_eps,
                window: (lo, hi),
                window_clipped: clipped,
                profile: cur.profile,
                sup_s: cur.sup_s,
                t_at_sup: cur.t_at_sup,
                bound_value,
                ratio: cur.sup_s / bound_value,
                nx: cur.grid.nx,
                nt: cur.grid.nt,
                grid_rel_change: last_rel,
            });
        }
        prev = cur;
    }
}

/// Runs the parabolic and hyperbolic solvers on the data of `family` for
/// each eps with horizon `T_eps`, forms `S(t)` and fits the scaling law.
pub fn boundary_layer_sweep(
    scaling: &ScalingParams,
    family: &KinkFamily,
    policy: &GridPolicy,
) -> Result<SweepReport> {
    policy.validate()?;
    if (family.alpha - scaling.alpha).abs() > 1e-12 * scaling.alpha {
        return Err(Error::PreconditionViolation(format!(
            "family alpha {} differs from sweep alpha {}",
            family.alpha, scaling.alpha
        )));
    }
    if family.family.required_gamma() != 0.0 {
        return Err(Error::PreconditionViolation(
            "the sweep runs with gamma = 0 and needs a gamma = 0 family".into(),
        ));
    }
    let certificate = boundedness_certificate(family.alpha)?;
    if !certificate.bound.is_finite() {
        return Err(Error::PreconditionViolation("U_xxt is not bounded".into()));
    }
    let per_eps = scaling
        .eps_list
        .par_iter()
        .map(|&eps| run_point(scaling, family, policy, eps))
        .collect::<Result<Vec<_>>>()?;

    let sups: Vec<f64> = per_eps.iter().map(|p| p.sup_s).collect();
    let (fitted_exponent, fit_error) = match fit_exponent(&scaling.eps_list, &sups) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ratios: Vec<f64> = per_eps.iter().map(|p| p.ratio).collect();
    let fitted_gamma = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio_spread = Gate::at_most(
        "sup_S / bound ratio spread",
        fitted_gamma / min_ratio,
        UNIFORMITY_GATE,
    );
    let sup_s_strictly_decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let pass = fitted_gamma.is_finite() && ratio_spread.pass && sup_s_strictly_decreasing;
    Ok(SweepReport {
        scaling: scaling.clone(),
        family: *family,
        grid_policy: *policy,
        certificate,
        per_eps,
        fitted_exponent,
        fit_error,
        bound_exponent: 1.0 - scaling.k / scaling.alpha,
        fitted_gamma,
        ratio_spread,
        sup_s_strictly_decreasing,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gronwall_reference_and_monotonicity() {
        let v = gronwall_bound(1.0, 0.0, 1.0, 0.5, 0.25, 0.01).unwrap();
        assert!((v - 0.1 * 0.25 * 100f64.ln()).abs() < 1e-14);
        assert!((v - 0.11513).abs() < 1e-5);
        assert!(gronwall_bound(1.0, 0.0, 1.0, 0.5, 1e-12, 0.01).unwrap() < 1e-11);
        assert!(v < gronwall_bound(1.0, 0.0, 1.0, 0.5, 0.25, 0.1).unwrap());
        assert!(gronwall_bound(1.1, 0.0, 1.0, 0.5, 0.25, 0.01).unwrap() > v);
        let b = gronwall_bound(1.0, 0.5, 1.0, 0.5, 0.25, 0.01).unwrap();
        assert!(b > v);
        assert!(gronwall_bound(1.0, 0.5, 1.2, 0.5, 0.25, 0.01).unwrap() < b);
        for bad in [
            gronwall_bound(0.0, 0.0, 1.0, 0.5, 0.25, 0.01),
            gronwall_bound(1.0, 0.0, 1.0, 0.5, 0.5, 0.01),
            gronwall_bound(1.0, 0.0, 1.0, 0.5, 0.25, 1.0),
            gronwall_bound(1.0, -1.0, 1.0, 0.5, 0.25, 0.1),
        ] {
            assert!(matches!(bad, Err(Error::DomainError(_))));
        }
    }

    #[test]
    fn fit_exponent_cases() {
        let e = [0.1, 0.01, 0.001];
        assert!((fit_exponent(&e, &e).unwrap() - 1.0).abs() < 1e-12);
        assert!(fit_exponent(&e, &[2.0; 3]).unwrap().abs() < 1e-12);
        let v: Vec<f64> = e.iter().map(|x| x.sqrt() * x.ln().abs()).collect();
        assert!((fit_exponent(&e, &v).unwrap() - 0.2614).abs() < 1e-4);
        assert!(matches!(
            fit_exponent(&e[..2], &e[..2]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_exponent(&[0.1; 3], &e),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn theorem3_single_eps_decays() {
        let p = ModelParams::new(PI, 0.5, 0.1, 0.0, 20.0).unwrap();
        let r = theorem3_check(&p, &[0.1], &[1.0, 20.0], &TruncationPolicy::default()).unwrap();
        assert!(r.decays);
        assert!(r.rows[0].points.iter().all(|d| d.ratio.is_finite()));
        assert!(r.gate.pass && r.gate.value == 1.0);
        assert!(matches!(
            theorem3_check(&p, &[0.1], &[0.5], &TruncationPolicy::default()),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn lemma_reference_case() {
        let p = ModelParams::new(PI, 0.5, 0.1, 0.0, 20.0).unwrap();
        let t = linspace(1.0, 20.0, 40);
        let r = lemma_checks(&p, &[0.1], LemmaConstants::default(), &t, 10_000).unwrap();
        assert_eq!(r.rho, 0.25);
        let row = &r.rows[0];
        assert!(matches!(row.low_band, BandFit::SkippedBand { .. }));
        let BandFit::Fitted { n_lo, constant, .. } = row.hyperbolic_tail else {
            panic!("tail fitted")
        };
        assert_eq!(n_lo, 20);
        assert!(constant > 0.0 && constant.is_finite());
        let direct = direct_mode_sum(&p, 20, 10_000, 4.0);
        assert!(direct > 0.0);
        assert!(direct <= constant * (-10.0f64).exp() * (1.0 + 1e-12));
        let BandFit::Fitted { constant: c3, .. } = row.circular_band else {
            panic!("circular band fitted")
        };
        assert!(c3 > 0.0 && c3.is_finite());
        assert!(lemma_checks(
            &p,
            &[0.1],
            LemmaConstants {
                eta: 1.0,
                ..Default::default()
            },
            &t,
            100
        )
        .is_err());
    }

    #[test]
    fn low_band_envelope_grows_when_band_is_nonempty() {
        let p = ModelParams::new(30.0, 0.5, 0.2, 0.0, 20.0).unwrap();
        let t = linspace(1.0, 20.0, 20);
        let r = lemma_checks(&p, &[0.2, 0.1], LemmaConstants::default(), &t, 2_000).unwrap();
        assert_eq!(r.rows[0].n1, 3);
        let gate = r.gates[1].gate.as_ref().unwrap();
        assert!(!gate.pass);
        let ln = |i: usize| r.rows[i].low_band.ln_constant().unwrap();
        assert!(ln(1) > 1.9 * ln(0));
    }

    #[test]
    fn scaling_params_and_window() {
        let s = ScalingParams::new(0.25, 0.5, vec![0.01, 0.1, 0.05]).unwrap();
        assert_eq!(s.eps_list, vec![0.1, 0.05, 0.01]);
        assert!(s.window(0.1).2);
        let (lo, hi, clipped) = s.window(0.01);
        assert!(!clipped && lo == 1.0 && (hi - 0.25 * 100f64.ln()).abs() < 1e-14);
        assert!(ScalingParams::new(0.5, 0.5, vec![0.1]).is_err());
        assert!(ScalingParams::new(0.25, 0.5, vec![1.5]).is_err());
    }

    #[test]
    fn window_sup_respects_bounds() {
        let prof = vec![(0.0, 0.0), (0.5, 1.0), (1.0, 2.0), (1.5, 5.0)];
        assert_eq!(window_sup(&prof, (1.0, 1.5), false).0, 2.0);
        assert_eq!(window_sup(&prof, (0.0, 1.0), true).0, 2.0);
    }
}
