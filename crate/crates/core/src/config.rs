use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scale-aware tolerance block shared by all operations.
///
/// Fields suffixed `_factor` are multiplied by the matrix dimension `n`;
/// fields suffixed `_rel` are multiplied by the relevant scale (operator
/// norm, top singular value or spectral diameter) at the point of use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative threshold below which a singular value counts as zero
    /// (times the top singular value / operator scale).
    pub eps_sing_rel: f64,
    /// Factorization residual: `|U R U* - T| <= eps_fact_factor * n * |T|`.
    pub eps_fact_factor: f64,
    /// Idempotency/Hermiticity budget for projections, times `n`.
    pub eps_proj_factor: f64,
    /// Residual budget for linear solves, times `n`.
    pub eps_solve_factor: f64,
    /// Invariance budget `|(1-P) T P| <= eps_inv_factor * n * |T|`.
    pub eps_inv_factor: f64,
    /// Unitarity budget `|U*U - I| <= eps_unit_factor * n`.
    pub eps_unit_factor: f64,
    /// Eigenvalues closer than `classify_tol_rel * spectral_diameter` to a
    /// region boundary abort classification.
    pub classify_tol_rel: f64,
    /// Agreement budget when two routes to the same projection are compared.
    pub proj_agree_tol: f64,
    /// Relative singular-value threshold used for numerical rank decisions.
    pub rank_tol: f64,
    /// Required ratio across the rank threshold; smaller gaps are ambiguous.
    pub rank_gap_factor: f64,
    /// Additive slack allowed in log-submajorization comparisons.
    pub submajorization_slack: f64,
    /// Default grid regularization, times the operator scale.
    pub grid_eps_rel: f64,
    /// Allowed excess when grid cell masses are summed against 1.
    pub mass_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_sing_rel: 1e-8,
            eps_fact_factor: 1e-9,
            eps_proj_factor: 1e-9,
            eps_solve_factor: 1e-9,
            eps_inv_factor: 1e-9,
            eps_unit_factor: 1e-10,
            classify_tol_rel: 1e-8,
            proj_agree_tol: 1e-8,
            rank_tol: 1e-3,
            rank_gap_factor: 1e2,
            submajorization_slack: 1e-9,
            grid_eps_rel: 1e-6,
            mass_tol: 0.05,
        }
    }
}

impl Tolerances {
    pub fn eps_fact(&self, n: usize) -> f64 {
        self.eps_fact_factor * n as f64
    }

    pub fn eps_proj(&self, n: usize) -> f64 {
        self.eps_proj_factor * n as f64
    }

    pub fn eps_solve(&self, n: usize) -> f64 {
        self.eps_solve_factor * n as f64
    }

    pub fn eps_inv(&self, n: usize) -> f64 {
        self.eps_inv_factor * n as f64
    }

    pub fn eps_unit(&self, n: usize) -> f64 {
        self.eps_unit_factor * n as f64
    }

    /// Fails if any tolerance is non-positive or non-finite.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_sing_rel", self.eps_sing_rel),
            ("eps_fact_factor", self.eps_fact_factor),
            ("eps_proj_factor", self.eps_proj_factor),
            ("eps_solve_factor", self.eps_solve_factor),
            ("eps_inv_factor", self.eps_inv_factor),
            ("eps_unit_factor", self.eps_unit_factor),
            ("classify_tol_rel", self.classify_tol_rel),
            ("proj_agree_tol", self.proj_agree_tol),
            ("rank_tol", self.rank_tol),
            ("rank_gap_factor", self.rank_gap_factor),
            ("submajorization_slack", self.submajorization_slack),
            ("grid_eps_rel", self.grid_eps_rel),
            ("mass_tol", self.mass_tol),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}
