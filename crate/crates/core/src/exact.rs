//! Closed-form traveling-wave solutions of the damped hyperbolic equation
//! `U_xx - U_tt - alpha U_t = sin U + gamma`, finite-difference residual
//! oracles that certify them, and Neumann data generated from them.
//!
//! All families depend on `(x, t)` only through `xi = (x - t) / alpha`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Pole guard for the gamma = 1 family.
pub const POLE_GUARD: f64 = 1e-8;

/// `2 arctan(e^f)`, with `sin = sech f` and `cos = -tanh f`.
pub fn pi_transform(f: f64) -> f64 {
    2.0 * f.exp().atan()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `U = 4 arctan(y + sqrt(y^2 + 1))`, `y = r0 e^{-xi}`, for `gamma = 0`.
    Gamma0,
    /// `U = 4 arctan(y + sqrt(y^2 + 1))`, `y = (2 + r0 - xi)/(r0 - xi)`, for `gamma = 1`.
    Gamma1,
    /// `U = 2 arctan(e^xi)`, for `gamma = 0`.
    Basic,
}

impl Family {
    pub fn required_gamma(self) -> f64 {
        match self {
            Family::Gamma1 => 1.0,
            Family::Gamma0 | Family::Basic => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Gamma0 => "gamma0",
            Family::Gamma1 => "gamma1",
            Family::Basic => "basic",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkFamily {
    pub family: Family,
    pub alpha: f64,
    /// Integration constant of the traveling-wave reduction (unused by `Basic`).
    pub r0: f64,
}

impl KinkFamily {
    pub fn new(family: Family, alpha: f64, r0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "kink families need alpha > 0, got {alpha}"
            )));
        }
        if !r0.is_finite() {
            return Err(Error::InvalidParams("r0 must be finite".into()));
        }
        Ok(KinkFamily { family, alpha, r0 })
    }

    pub fn basic(alpha: f64) -> Result<Self> {
        Self::new(Family::Basic, alpha, 0.0)
    }

    pub fn xi(&self, x: f64, t: f64) -> f64 {
        (x - t) / self.alpha
    }

    fn check_pole(&self, xi: f64) -> Result<()> {
        if self.family == Family::Gamma1 && (xi - self.r0).abs() < POLE_GUARD {
            return Err(Error::PoleError { xi, r0: self.r0 });
        }
        Ok(())
    }

    /// Profile `f(xi)` with `U = 2 Pi(f)`; `Basic` has no such profile.
    pub fn profile(&self, xi: f64) -> Result<f64> {
        self.check_pole(xi)?;
        match self.family {
            Family::Gamma0 => Ok((self.r0 * (-xi).exp()).asinh()),
            Family::Gamma1 => Ok(((2.0 + self.r0 - xi) / (self.r0 - xi)).asinh()),
            Family::Basic => Err(Error::PreconditionViolation(
                "the basic kink 2 arctan e^xi is not of the form 2 Pi(f)".into(),
            )),
        }
    }

    /// `U` as a function of `xi`.
    pub fn value_xi(&self, xi: f64) -> Result<f64> {
        match self.family {
            Family::Basic => Ok(pi_transform(xi)),
            // 4 arctan(y + sqrt(y^2+1)) = 4 arctan(e^{asinh y})
            _ => Ok(2.0 * pi_transform(self.profile(xi)?)),
        }
    }

    /// `dU/dxi` from the closed form.
    pub fn dvalue_dxi(&self, xi: f64) -> Result<f64> {
        match self.family {
            Family::Basic => Ok(sech(xi)),
            Family::Gamma0 => {
                let f = self.profile(xi)?;
                Ok(2.0 * sech(f) * (-f.tanh()))
            }
            Family::Gamma1 => {
                let f = self.profile(xi)?;
                let s = self.r0 - xi;
                let y = (2.0 + s) / s;
                let dy = 2.0 / (s * s);
                Ok(2.0 * sech(f) * dy / (1.0 + y * y).sqrt())
            }
        }
    }
}

fn sech(z: f64) -> f64 {
    1.0 / z.cosh()
}

/// Value of a kink at `(x, t)`.
pub fn kink_value(family: &KinkFamily, x: f64, t: f64) -> Result<f64> {
    family.value_xi(family.xi(x, t))
}

/// Right-hand side of the traveling-wave reduction `df/dxi = -tanh f + (gamma/2) cosh f`.
pub fn reduction_rhs(f: f64, gamma_bias: f64) -> f64 {
    -f.tanh() + 0.5 * gamma_bias * f.cosh()
}

/// `df/dxi - rhs(f)` for the family's profile, with `df/dxi` taken by a
/// fourth-order central difference of the profile (independent of the
/// right-hand side being checked).
pub fn reduction_residual(family: &KinkFamily, xi: f64) -> Result<f64> {
    let f = family.profile(xi)?;
    let rhs = reduction_rhs(f, family.family.required_gamma());
    if rhs == 0.0 {
        return Err(Error::DenominatorZero { f });
    }
    let h = 1e-4;
    let p = |s: f64| family.profile(xi + s);
    let df = (-p(2.0 * h)? + 8.0 * p(h)? - 8.0 * p(-h)? + p(-2.0 * h)?) / (12.0 * h);
    Ok(df - rhs)
}

/// `U_xxt` of the basic kink, `-(2/alpha^3)(e^{2xi} - 6 + e^{-2xi})/(e^xi + e^{-xi})^3`.
pub fn u_xxt_basic(alpha: f64, x: f64, t: f64) -> f64 {
    let xi = (x - t) / alpha;
    let a3 = alpha * alpha * alpha;
    if xi.abs() <= 30.0 {
        let ep = xi.exp();
        let em = (-xi).exp();
        -(2.0 / a3) * (ep * ep - 6.0 + em * em) / (ep + em).powi(3)
    } else {
        // same expression as -(1/alpha^3) sech(xi) (1 - 2 sech^2 xi), overflow-free
        let s = sech(xi);
        -(s * (1.0 - 2.0 * s * s)) / a3
    }
}

/// Sup bound of `|U_xxt|` for the basic kink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub bound: f64,
    pub argmax_xi: f64,
}

/// Global maximum over `xi` of `|U_xxt|` for the basic kink: coarse scan of
/// `xi in [-40, 40]` followed by golden-section refinement.
pub fn boundedness_certificate(alpha: f64) -> Result<BoundCertificate> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParams(format!(
            "alpha must be > 0, got {alpha}"
        )));
    }
    let g = |xi: f64| u_xxt_basic(alpha, alpha * xi, 0.0).abs();
    let step = 0.01;
    let mut best = (f64::NEG_INFINITY, 0.0);
    let steps = (80.0 / step) as i64;
    for k in 0..=steps {
        let xi = -40.0 + k as f64 * step;
        let v = g(xi);
        if v > best.0 {
            best = (v, xi);
        }
    }
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let a = hi - inv_phi * (hi - lo);
        let b = lo + inv_phi * (hi - lo);
        if g(a) >= g(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let xi = 0.5 * (lo + hi);
    let (bound, argmax_xi) = if g(xi) >= best.0 { (g(xi), xi) } else { best };
    Ok(BoundCertificate { bound, argmax_xi })
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Initial displacement/velocity on `[0, ell]` and boundary fluxes on `[0, T]`.
#[derive(Clone)]
pub struct NeumannData {
    pub h0: ScalarFn,
    pub h1: ScalarFn,
    pub phi0: ScalarFn,
    pub phi1: ScalarFn,
}

impl fmt::Debug for NeumannData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NeumannData").finish_non_exhaustive()
    }
}

impl NeumannData {
    pub fn new(
        h0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi1: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        NeumannData {
            h0: Arc::new(h0),
            h1: Arc::new(h1),
            phi0: Arc::new(phi0),
            phi1: Arc::new(phi1),
        }
    }

    /// Constant state at rest with zero flux.
    pub fn equilibrium(value: f64) -> Self {
        Self::new(move |_| value, |_| 0.0, |_| 0.0, |_| 0.0)
    }

    /// Corner mismatch `max(|h0'(0) - phi0(0)|, |h0'(ell) - phi1(0)|)` with
    /// `h0'` by central differences.
    pub fn corner_mismatch(&self, ell: f64) -> f64 {
        let h = 1e-5;
        let d = |x: f64| ((self.h0)(x + h) - (self.h0)(x - h)) / (2.0 * h);
        ((d(0.0) - (self.phi0)(0.0)).abs()).max((d(ell) - (self.phi1)(0.0)).abs())
    }
}

/// Neumann data generated by a kink: `h0 = U(x,0)`, `h1 = U_t(x,0)`,
/// `phi0 = U_x(0,t)`, `phi1 = U_x(ell,t)`, all from the closed form.
pub fn neumann_data_from(family: &KinkFamily, params: &ModelParams) -> Result<NeumannData> {
    params.validate()?;
    let need = family.family.required_gamma();
    if params.gamma_bias != need {
        return Err(Error::PreconditionViolation(format!(
            "family {} requires gamma = {need}, got {}",
            family.family, params.gamma_bias
        )));
    }
    if (family.alpha - params.alpha).abs() > 1e-12 * params.alpha {
        return Err(Error::PreconditionViolation(format!(
            "family alpha {} differs from model alpha {}",
            family.alpha, params.alpha
        )));
    }
    if family.family == Family::Gamma1 {
        let lo = -params.horizon / family.alpha;
        let hi = params.ell / family.alpha;
        if family.r0 >= lo - POLE_GUARD && family.r0 <= hi + POLE_GUARD {
            return Err(Error::PoleError {
                xi: family.r0,
                r0: family.r0,
            });
        }
    }
    let k = *family;
    let ell = params.ell;
    let a = family.alpha;
    // the pole is excluded above, so the closures cannot fail
    let u = move |xi: f64| k.value_xi(xi).expect("pole excluded");
    let du = move |xi: f64| k.dvalue_dxi(xi).expect("pole excluded");
    Ok(NeumannData::new(
        move |x| u(x / a),
        move |x| -du(x / a) / a,
        move |t| du(-t / a) / a,
        move |t| du((ell - t) / a) / a,
    ))
}

/// Evaluation of the residual `U_xx - U_tt - alpha U_t - sin U - gamma` on a
/// rectangular grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualField {
    pub nx: usize,
    pub nt: usize,
    /// Row-major by space node.
    pub values: Vec<f64>,
    pub max_abs: f64,
    /// Largest change of the residual between steps `h_fd` and `h_fd/2`.
    pub richardson_gap: f64,
}

fn fd_residual<F>(u: &F, params: &ModelParams, x: f64, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let c = u(x, t)?;
    let xp1 = u(x + h, t)?;
    let xp2 = u(x + 2.0 * h, t)?;
    let xm1 = u(x - h, t)?;
    let xm2 = u(x - 2.0 * h, t)?;
    let tp1 = u(x, t + h)?;
    let tp2 = u(x, t + 2.0 * h)?;
    let tm1 = u(x, t - h)?;
    let tm2 = u(x, t - 2.0 * h)?;
    let u_xx = (-xp2 + 16.0 * xp1 - 30.0 * c + 16.0 * xm1 - xm2) / (12.0 * h * h);
    let u_tt = (-tp2 + 16.0 * tp1 - 30.0 * c + 16.0 * tm1 - tm2) / (12.0 * h * h);
    let u_t = (-tp2 + 8.0 * tp1 - 8.0 * tm1 + tm2) / (12.0 * h);
    Ok(u_xx - u_tt - params.alpha * u_t - c.sin() - params.gamma_bias)
}

/// Residual of the hyperbolic equation for a closed form `u(x, t)` on the
/// `nx x nt` uniform grid of `[x0, x1] x [t0, t1]`, with fourth-order
/// central differences of step `h_fd` (stencils may reach `2 h_fd` outside
/// the rectangle).
pub fn residual<F>(
    u: F,
    params: &ModelParams,
    (x0, x1): (f64, f64),
    (t0, t1): (f64, f64),
    (nx, nt): (usize, usize),
    h_fd: f64,
) -> Result<ResidualField>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if nx < 2 || nt < 2 || !(h_fd > 0.0) {
        return Err(Error::InvalidParams(
            "residual grid needs nx, nt >= 2 and h_fd > 0".into(),
        ));
    }
    let mut values = Vec::with_capacity(nx * nt);
    let mut max_abs = 0.0f64;
    let mut gap = 0.0f64;
    for i in 0..nx {
        let x = x0 + (x1 - x0) * i as f64 / (nx - 1) as f64;
        for j in 0..nt {
            let t = t0 + (t1 - t0) * j as f64 / (nt - 1) as f64;
            let r = fd_residual(&u, params, x, t, h_fd)?;
            let r_half = fd_residual(&u, params, x, t, 0.5 * h_fd)?;
            max_abs = max_abs.max(r.abs());
            gap = gap.max((r - r_half).abs());
            values.push(r);
        }
    }
    Ok(ResidualField {
        nx,
        nt,
        values,
        max_abs,
        richardson_gap: gap,
    })
}

/// Wraps a kink as a closure suitable for [`residual`].
pub fn kink_fn(family: KinkFamily) -> impl Fn(f64, f64) -> Result<f64> {
    move |x, t| kink_value(&family, x, t)
}

/// `U_x` of a kink.
pub fn kink_dx(family: &KinkFamily, x: f64, t: f64) -> Result<f64> {
    Ok(family.dvalue_dxi(family.xi(x, t))? / family.alpha)
}

/// Exact equilibrium phase levels of `sin U = 0`.
pub fn equilibrium_level(k: i32) -> f64 {
    k as f64 * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_transform_values() {
        assert!((pi_transform(0.0) - PI / 2.0).abs() < 1e-15);
        assert!((pi_transform(800.0) - PI).abs() < 1e-15);
        assert!(pi_transform(-800.0).abs() < 1e-15);
    }

    #[test]
    fn kink_reference_values() {
        let basic = KinkFamily::basic(0.5).unwrap();
        assert!((kink_value(&basic, 1.3, 1.3).unwrap() - PI / 2.0).abs() < 1e-15);

        let g0 = KinkFamily::new(Family::Gamma0, 0.5, 1.0).unwrap();
        let v = kink_value(&g0, 0.7, 0.7).unwrap();
        assert!((v - 3.0 * PI / 2.0).abs() < 1e-14);
        assert!((v - 4.0 * (1.0 + 2f64.sqrt()).atan()).abs() < 1e-14);

        let flat = KinkFamily::new(Family::Gamma0, 0.5, 0.0).unwrap();
        for &(x, t) in &[(0.0, 0.0), (2.0, 0.3), (-1.0, 5.0)] {
            assert!((kink_value(&flat, x, t).unwrap() - PI).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma1_pole_is_an_error() {
        let g1 = KinkFamily::new(Family::Gamma1, 0.5, 0.25).unwrap();
        // xi = (x - t)/alpha = 0.25 at x = 0.125, t = 0
        assert!(matches!(
            kink_value(&g1, 0.125, 0.0),
            Err(Error::PoleError { .. })
        ));
        assert!(kink_value(&g1, 1.0, 0.0).is_ok());
    }

    #[test]
    fn reduction_checks() {
        let g0 = KinkFamily::new(Family::Gamma0, 0.5, 1.0).unwrap();
        let f = g0.profile(0.0).unwrap();
        assert!((f - 1f64.asinh()).abs() < 1e-15);
        assert!((reduction_rhs(f, 0.0) + 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!(reduction_residual(&g0, 0.0).unwrap().abs() < 1e-10);

        assert_eq!(reduction_rhs(0.0, 0.0), 0.0);

        let g1 = KinkFamily::new(Family::Gamma1, 0.5, 0.0).unwrap();
        let f = g1.profile(-2.0).unwrap();
        assert!((f - 2f64.asinh()).abs() < 1e-15);
        assert!(reduction_residual(&g1, -2.0).unwrap().abs() < 1e-10);

        // r0 = 0 with gamma = 0 puts the profile at the equilibrium f = 0
        let flat = KinkFamily::new(Family::Gamma0, 0.5, 0.0).unwrap();
        assert!(matches!(
            reduction_residual(&flat, 1.0),
            Err(Error::DenominatorZero { .. })
        ));
    }

    #[test]
    fn u_xxt_reference_values() {
        assert!((u_xxt_basic(0.5, 0.0, 0.0) - 8.0).abs() < 1e-12);
        assert!((u_xxt_basic(0.5, 1.0, 1.0) - 1.0 / 0.125).abs() < 1e-12);
        assert_eq!(u_xxt_basic(0.5, 1000.0, 0.0), 0.0);
        assert_eq!(u_xxt_basic(0.5, 0.0, 1000.0), 0.0);
        let inner = u_xxt_basic(1.0, 30.0, 0.0);
        let outer = u_xxt_basic(1.0, 30.0 + 1e-9, 0.0);
        assert!((inner - outer).abs() < 1e-20);
    }

    #[test]
    fn certificate_scales_with_alpha_cubed() {
        let b1 = boundedness_certificate(1.0).unwrap();
        assert!(b1.bound >= 1.0);
        assert!((b1.bound - 1.0).abs() < 1e-12);
        assert!(b1.argmax_xi.abs() < 1e-6);
        for &a in &[0.25, 0.5, 2.0] {
            let b = boundedness_certificate(a).unwrap();
            assert!((b.bound * a * a * a - b1.bound).abs() < 1e-10, "alpha {a}");
        }
    }

    #[test]
    fn basic_neumann_data() {
        let p = ModelParams::new(PI, 0.5, 0.0, 0.0, 2.0).unwrap();
        let k = KinkFamily::basic(0.5).unwrap();
        let d = neumann_data_from(&k, &p).unwrap();
        assert!(((d.phi0)(0.0) - 2.0).abs() < 1e-14);
        // traveling wave: U_t = -U_x
        for &x in &[0.0, 0.4, 1.9, PI] {
            let ux = kink_dx(&k, x, 0.0).unwrap();
            assert!(((d.h1)(x) + ux).abs() < 1e-14);
            let paper = -(2.0 / 0.5) * (x / 0.5).exp() / (1.0 + (2.0 * x / 0.5).exp());
            assert!(((d.h1)(x) - paper).abs() < 1e-12);
        }
        let t = 0.7;
        let paper_phi1 =
            (2.0 / 0.5) * ((PI - t) / 0.5).exp() / (1.0 + (2.0 * (PI - t) / 0.5).exp());
        assert!(((d.phi1)(t) - paper_phi1).abs() < 1e-12);
        assert!(d.corner_mismatch(PI) < 1e-8);
    }

    #[test]
    fn neumann_data_rejects_wrong_gamma_and_pole() {
        let p = ModelParams::new(PI, 0.5, 0.0, 0.0, 2.0).unwrap();
        let g1 = KinkFamily::new(Family::Gamma1, 0.5, 1.0).unwrap();
        assert!(neumann_data_from(&g1, &p).is_err());
        let p1 = ModelParams {
            gamma_bias: 1.0,
            ..p
        };
        assert!(matches!(
            neumann_data_from(&g1, &p1),
            Err(Error::PoleError { .. })
        ));
        let g1_far = KinkFamily::new(Family::Gamma1, 0.5, 20.0).unwrap();
        assert!(neumann_data_from(&g1_far, &p1).is_ok());
    }

    #[test]
    fn constant_fields_have_zero_residual() {
        let p = ModelParams::new(PI, 0.5, 0.0, 0.0, 2.0).unwrap();
        for level in [0.0, PI] {
            let r = residual(|_, _| Ok(level), &p, (0.0, PI), (0.0, 2.0), (5, 5), 1e-3).unwrap();
            assert!(r.max_abs < 1e-15);
        }
    }

    #[test]
    fn all_families_satisfy_the_hyperbolic_equation() {
        let p0 = ModelParams::new(PI, 0.5, 0.0, 0.0, 2.0).unwrap();
        let p1 = ModelParams {
            gamma_bias: 1.0,
            ..p0
        };
        let cases = [
            (KinkFamily::basic(0.5).unwrap(), p0),
            (KinkFamily::new(Family::Gamma0, 0.5, 1.0).unwrap(), p0),
            (KinkFamily::new(Family::Gamma0, 0.5, -3.0).unwrap(), p0),
            (KinkFamily::new(Family::Gamma1, 0.5, 20.0).unwrap(), p1),
        ];
        for (k, p) in cases {
            let r = residual(kink_fn(k), &p, (0.0, PI), (0.0, 2.0), (20, 20), 1e-3).unwrap();
            assert!(r.max_abs < 1e-6, "{:?}: {}", k.family, r.max_abs);
        }
    }

    proptest! {
        #[test]
        fn pi_transform_identities(f in -20.0f64..20.0) {
            let u = pi_transform(f);
            prop_assert!((u.sin() - 1.0 / f.cosh()).abs() < 1e-12);
            prop_assert!((u.cos() + f.tanh()).abs() < 1e-12);
        }

        #[test]
        fn kinks_are_traveling_waves(
            x in -3.0f64..3.0, t in 0.0f64..3.0, c in -2.0f64..2.0, r0 in -3.0f64..3.0,
        ) {
            for fam in [Family::Gamma0, Family::Basic] {
                let k = KinkFamily::new(fam, 0.5, r0).unwrap();
                let a = kink_value(&k, x, t).unwrap();
                let b = kink_value(&k, x + c, t + c).unwrap();
                prop_assert!((a - b).abs() < 1e-12);
                prop_assert!(a > 0.0 && a < 2.0 * PI);
            }
        }
    }
}
