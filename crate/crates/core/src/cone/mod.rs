//! Model cones `dr^2 + r^(2c) g_L` over a link of dimension `d` and volume `V`.
//!
//! The volume density of such a cone is `V r^alpha dr` with `alpha = c d`,
//! which is all the radial capacity and the cutoff estimates depend on.

mod capacity;
mod cutoff;

pub use capacity::{
    holder_downgrade, q1_capacity, radial_capacity_exact, radial_capacity_exact_ln,
    radial_capacity_numeric, sublevel_capacity_bound, vertex_parabolic,
};
pub use cutoff::{
    cutoff_gamma, cutoff_gamma_ln, edge_norm_bound, eps_n, epsp_n_ln, gradient_bound_ln,
    local_cutoff_norm, sequence_terms, sequence_terms_numeric, CutoffPoint, CutoffTerms,
    NumericTerms,
};

use thiserror::Error;

use crate::quad::QuadratureError;

#[derive(Debug, Error, PartialEq)]
pub enum ConeError {
    #[error("invalid cone model: {0}")]
    InvalidModel(String),
    #[error("invalid condenser: need 0 < eps < R < inf, got eps = {eps}, R = {outer}")]
    InvalidCondenser { eps: f64, outer: f64 },
    #[error("q = {0} is outside the domain of this operation")]
    Domain(f64),
    #[error("grid size {0} is below the minimum of 16")]
    GridTooSmall(usize),
    #[error("multiplier solve did not converge: {0}")]
    Convergence(String),
    #[error(
        "condition c (k - q) > -1 violated: exponent {exponent} makes the radial integral diverge"
    )]
    Condition2Violated { exponent: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeModel {
    c: f64,
    d: usize,
    link_volume: f64,
}

impl ConeModel {
    pub fn new(c: f64, d: usize, link_volume: f64) -> Result<Self, ConeError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(ConeError::InvalidModel(format!(
                "warping exponent must be positive, got {c}"
            )));
        }
        if d == 0 {
            return Err(ConeError::InvalidModel(
                "link dimension must be at least 1".into(),
            ));
        }
        if !(link_volume.is_finite() && link_volume > 0.0) {
            return Err(ConeError::InvalidModel(format!(
                "link volume must be positive and finite, got {link_volume}"
            )));
        }
        Ok(ConeModel { c, d, link_volume })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn link_volume(&self) -> f64 {
        self.link_volume
    }

    /// Volume exponent `c d`.
    pub fn alpha(&self) -> f64 {
        self.c * self.d as f64
    }

    pub fn with_link_volume(&self, link_volume: f64) -> Result<Self, ConeError> {
        ConeModel::new(self.c, self.d, link_volume)
    }
}

/// Radial condenser `{eps <= r <= R}`: test functions equal 1 for `r <= eps`
/// and vanish for `r >= R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Condenser {
    eps: f64,
    outer: f64,
}

impl Condenser {
    pub fn new(eps: f64, outer: f64) -> Result<Self, ConeError> {
        if eps > 0.0 && eps < outer && outer.is_finite() {
            Ok(Condenser { eps, outer })
        } else {
            Err(ConeError::InvalidCondenser { eps, outer })
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }
}
