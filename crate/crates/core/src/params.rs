//! Physical parameters of the junction model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the Neumann problem on `[0, ell] x [0, horizon]`.
///
/// `alpha` is the dissipation coefficient, `eps` the coefficient of the
/// third-order surface damping term and `gamma_bias` the constant forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub ell: f64,
    pub alpha: f64,
    pub eps: f64,
    pub gamma_bias: f64,
    pub horizon: f64,
}

impl ModelParams {
    /// Builds parameters accepted by the solvers: `ell, horizon > 0`,
    /// `alpha > 0`, `eps >= 0`.
    pub fn new(ell: f64, alpha: f64, eps: f64, gamma_bias: f64, horizon: f64) -> Result<Self> {
        let p = ModelParams {
            ell,
            alpha,
            eps,
            gamma_bias,
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return Err(Error::InvalidParams(format!(
                "ell must be > 0, got {}",
                self.ell
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParams(format!(
                "horizon T must be > 0, got {}",
                self.horizon
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "eps must be >= 0, got {}",
                self.eps
            )));
        }
        if !self.gamma_bias.is_finite() {
            return Err(Error::InvalidParams("gamma must be finite".into()));
        }
        Ok(())
    }

    /// The standing hypothesis `0 < alpha < 1`, `0 < eps < 1` required by
    /// every estimate-verification routine.
    pub fn require_estimate_regime(&self) -> Result<()> {
        self.validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParams(format!(
                "estimates require 0 < alpha < 1, got alpha = {}",
                self.alpha
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParams(format!(
                "estimates require 0 < eps < 1, got eps = {}",
                self.eps
            )));
        }
        Ok(())
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        ModelParams { eps, ..*self }
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        ModelParams { horizon, ..*self }
    }
}

/// Coefficients of the integro-differential memory form obtained from
/// `(alpha, eps)`: `a = alpha - 1/eps`, `delta = -a/eps`, `beta = 1/eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryParams {
    pub a_coef: f64,
    pub delta: f64,
    pub beta: f64,
}

impl MemoryParams {
    pub fn from_model(params: &ModelParams) -> Result<Self> {
        if !(params.eps > 0.0) {
            return Err(Error::InvalidParams(
                "memory form requires eps > 0".to_string(),
            ));
        }
        let a_coef = params.alpha - 1.0 / params.eps;
        Ok(MemoryParams {
            a_coef,
            delta: -a_coef / params.eps,
            beta: 1.0 / params.eps,
        })
    }
}
