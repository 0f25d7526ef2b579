use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Controls for the cone projection and its inner orthant quadratic solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    /// Stop when the truncated gradient of the inner quadratic is below this norm.
    pub inner_eps: f64,
    pub inner_max_iter: usize,
    /// Quadratic-descent stepsize constant `c_q`; `alpha <= c_q * |p|^2 / p'Gp`.
    pub step_constant: f64,
    /// Coefficients at or below this value count as sitting on the orthant boundary.
    pub zero_tol: f64,
    /// Gram matrices with reciprocal condition below this are rejected.
    pub cond_tol: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig { inner_eps: 1e-10, inner_max_iter: 100_000, step_constant: 1.5, zero_tol: 1e-12, cond_tol: 1e-12 }
    }
}

/// Tolerances and limits for [`solve`](crate::solve).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest trial stepsize.
    pub tau: f64,
    /// Terminate once `|d| < eps`.
    pub eps: f64,
    /// Strictly inactive constraints must satisfy `g_i < -feas_tol` at trial points.
    pub feas_tol: f64,
    /// `|g_i(u)| <= active_tol` puts `i` in the active set.
    pub active_tol: f64,
    /// `|<g'_i, d>| <= wis_rel_tol * |d|` puts an active `i` in the working set.
    pub wis_rel_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub max_outer_iter: usize,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Step along `d / max(1, |d|)` instead of `d`.
    pub normalize_direction: bool,
    pub projection: ProjectionConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tau: 1.0,
            eps: 1e-4,
            feas_tol: 1e-7,
            active_tol: 1e-5,
            wis_rel_tol: 1e-5,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            max_outer_iter: 10_000,
            backtrack_factor: 0.5,
            max_backtracks: 60,
            normalize_direction: false,
            projection: ProjectionConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau", self.tau),
            ("eps", self.eps),
            ("feas_tol", self.feas_tol),
            ("active_tol", self.active_tol),
            ("wis_rel_tol", self.wis_rel_tol),
            ("newton_tol", self.newton_tol),
            ("inner_eps", self.projection.inner_eps),
            ("step_constant", self.projection.step_constant),
            ("zero_tol", self.projection.zero_tol),
            ("cond_tol", self.projection.cond_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidConfig(format!("backtrack_factor must lie in (0, 1), got {}", self.backtrack_factor)));
        }
        if self.feas_tol > self.active_tol {
            return Err(Error::InvalidConfig("feas_tol must not exceed active_tol".into()));
        }
        for (name, v) in [
            ("newton_max_iter", self.newton_max_iter),
            ("max_outer_iter", self.max_outer_iter),
            ("max_backtracks", self.max_backtracks),
            ("inner_max_iter", self.projection.inner_max_iter),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_backtrack_factor() {
        let cfg = SolverConfig { backtrack_factor: 1.0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let cfg = SolverConfig { eps: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
