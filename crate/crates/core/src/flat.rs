//! Flat tori with coordinate subtori removed, and a two-dimensional
//! discrete capacity on model cones that does not assume radial symmetry.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::checker::QInterval;
use crate::cone::{cutoff_gamma, sequence_terms, Condenser, ConeError, ConeModel};
use crate::logspace::LogValue;

#[derive(Debug, Error, PartialEq)]
pub enum FlatError {
    #[error("invalid torus model: {0}")]
    InvalidModel(String),
    #[error("precondition failed: q = {q} exceeds the minimal codimension {z_min}")]
    Precondition { q: f64, z_min: usize },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("conjugate gradient stalled after {iterations} iterations at gradient norm {gradient_norm:e}")]
    Convergence {
        iterations: usize,
        gradient_norm: f64,
    },
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// `{x : x_j = offset_j for j in normal_axes}` inside the unit flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateSubtorus {
    pub normal_axes: Vec<usize>,
    pub offsets: Vec<f64>,
}

fn periodic_gap(x: f64, y: f64) -> f64 {
    let t = (x - y).rem_euclid(1.0);
    t.min(1.0 - t)
}

impl CoordinateSubtorus {
    pub fn codim(&self) -> usize {
        self.normal_axes.len()
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.normal_axes
            .iter()
            .zip(&self.offsets)
            .map(|(&j, &o)| periodic_gap(x[j], o).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusModel {
    m: usize,
    subtori: Vec<CoordinateSubtorus>,
}

impl TorusModel {
    pub fn new(m: usize, subtori: Vec<CoordinateSubtorus>) -> Result<Self, FlatError> {
        for (i, s) in subtori.iter().enumerate() {
            let z = s.codim();
            if z < 2 || z > m {
                return Err(FlatError::InvalidModel(format!(
                    "submanifold {i} has codimension {z}, need 2 <= z <= {m}"
                )));
            }
            if s.offsets.len() != z {
                return Err(FlatError::InvalidModel(format!(
                    "submanifold {i} has {} offsets for {z} normal axes",
                    s.offsets.len()
                )));
            }
            let mut axes = s.normal_axes.clone();
            axes.sort_unstable();
            axes.dedup();
            if axes.len() != z || axes.iter().any(|&j| j >= m) {
                return Err(FlatError::InvalidModel(format!(
                    "submanifold {i} normal axes must be distinct and below {m}"
                )));
            }
            if s.offsets.iter().any(|o| !(0.0..1.0).contains(o)) {
                return Err(FlatError::InvalidModel(format!(
                    "submanifold {i} offsets must lie in [0, 1)"
                )));
            }
        }
        Ok(TorusModel { m, subtori })
    }

    /// Submanifold `i` is normal to the first `z_i` axes at offset `i/N`, so
    /// distinct submanifolds are at least `1/N` apart.
    pub fn from_codims(m: usize, codims: &[usize]) -> Result<Self, FlatError> {
        let count = codims.len();
        let subtori = codims
            .iter()
            .enumerate()
            .map(|(i, &z)| CoordinateSubtorus {
                normal_axes: (0..z).collect(),
                offsets: vec![i as f64 / count as f64; z],
            })
            .collect();
        TorusModel::new(m, subtori)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn subtori(&self) -> &[CoordinateSubtorus] {
        &self.subtori
    }

    pub fn z_min(&self) -> Option<usize> {
        self.subtori.iter().map(CoordinateSubtorus::codim).min()
    }
}

/// Surface area of the unit `k`-sphere.
pub fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// `psi_n(x) = prod_i gamma_n(dist(x, S_i))`.
pub fn product_cutoff(model: &TorusModel, x: &[f64], n: u32) -> f64 {
    assert_eq!(x.len(), model.m, "point dimension must match the torus");
    model
        .subtori
        .iter()
        .map(|s| cutoff_gamma(n, s.distance(x)).value)
        .product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusBound {
    pub n: u32,
    pub total: f64,
    pub contributions: Vec<f64>,
}

/// Upper bound on `||d psi_n||_q^q`: `N^(q-1) sum_i |S^(z_i - 1)| (a + b)`
/// with the cone terms for `c = 1`, `k = z_i - 1`. Each subtorus has unit
/// volume.
pub fn torus_cutoff_norm(model: &TorusModel, q: f64, n: u32) -> Result<TorusBound, FlatError> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(ConeError::Domain(q).into());
    }
    if n < 2 {
        return Err(FlatError::InvalidModel(format!(
            "cutoff index must be at least 2, got {n}"
        )));
    }
    if let Some(z_min) = model.z_min() {
        if q > z_min as f64 {
            return Err(FlatError::Precondition { q, z_min });
        }
    }
    let count = model.subtori.len() as f64;
    let contributions: Vec<f64> = model
        .subtori
        .iter()
        .map(|s| {
            let k = s.codim() - 1;
            (LogValue::from_f64(sphere_area(k)) * sequence_terms(n, q, 1.0, k).total()).to_f64()
        })
        .collect();
    let total = if contributions.is_empty() {
        0.0
    } else {
        count.powf(q - 1.0) * contributions.iter().sum::<f64>()
    };
    Ok(TorusBound {
        n,
        total,
        contributions,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusSequence {
    pub rows: Vec<TorusBound>,
    /// Smallest `n` from which the bound is nonincreasing.
    pub monotone_from: u32,
}

pub fn torus_bound_sequence(
    model: &TorusModel,
    q: f64,
    n_max: u32,
) -> Result<TorusSequence, FlatError> {
    let rows = (2..=n_max.max(2))
        .map(|n| torus_cutoff_norm(model, q, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut monotone_from = rows.last().map_or(2, |r| r.n);
    for w in rows.windows(2).rev() {
        if w[1].total <= w[0].total {
            monotone_from = w[0].n;
        } else {
            break;
        }
    }
    Ok(TorusSequence {
        rows,
        monotone_from,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComplementRange {
    Interval(QInterval),
    CompactManifold,
}

impl fmt::Display for ComplementRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplementRange::Interval(i) => write!(f, "q-parabolic for q in {i}"),
            ComplementRange::CompactManifold => write!(f, "compact manifold, parabolic for all q"),
        }
    }
}

pub fn complement_q_range(model: &TorusModel) -> ComplementRange {
    match model.z_min() {
        Some(z) => ComplementRange::Interval(QInterval {
            upper: z as f64,
            upper_closed: true,
        }),
        None => ComplementRange::CompactManifold,
    }
}

const MAX_GRID: usize = 256;
const GRADIENT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GridCapacity {
    pub value: f64,
    pub iterations: usize,
    /// Optimal nodal values, `(n_r + 1) x n_theta`, row `i` at radius `r_i`.
    pub profile: Vec<f64>,
}

fn power_integral(beta: f64, a: f64, b: f64) -> f64 {
    if beta == -1.0 {
        (b / a).ln()
    } else {
        (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0)
    }
}

struct GridOperator {
    n_r: usize,
    n_t: usize,
    radial: Vec<f64>,
    angular: Vec<f64>,
}

impl GridOperator {
    fn unknown(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.n_t + j
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let nt = self.n_t;
        for i in 1..self.n_r {
            for j in 0..nt {
                let u = self.unknown(i, j);
                let mut v = (self.radial[i - 1] + self.radial[i]) * x[u];
                if i > 1 {
                    v -= self.radial[i - 1] * x[self.unknown(i - 1, j)];
                }
                if i + 1 < self.n_r {
                    v -= self.radial[i] * x[self.unknown(i + 1, j)];
                }
                let w = self.angular[i];
                v += w
                    * (2.0 * x[u]
                        - x[self.unknown(i, (j + nt - 1) % nt)]
                        - x[self.unknown(i, (j + 1) % nt)]);
                out[u] = v;
            }
        }
    }

    fn diagonal(&self, i: usize) -> f64 {
        self.radial[i - 1] + self.radial[i] + 2.0 * self.angular[i]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimum of the discrete 2-energy over all nodal functions on a log-spaced
/// `(r, theta)` grid, equal to 1 at `eps` and 0 at `R`.
///
/// The link is modelled by a periodic angle of length `2 pi` carrying the
/// density `V / (2 pi) r^alpha`; angular differences are weighted by
/// `r^(-2c)`. Radial edges use the exact P1 cell integral, so a
/// `theta`-independent profile reproduces the 1-D piecewise-linear energy.
pub fn grid_capacity_2d(
    cone: &ConeModel,
    cond: &Condenser,
    n_r: usize,
    n_theta: usize,
    initial: Option<&[f64]>,
) -> Result<GridCapacity, FlatError> {
    if !(2..=MAX_GRID).contains(&n_r) || !(1..=MAX_GRID).contains(&n_theta) {
        return Err(FlatError::Grid(format!(
            "need 2 <= n_r <= {MAX_GRID} and 1 <= n_theta <= {MAX_GRID}, got {n_r} x {n_theta}"
        )));
    }
    let unknowns = (n_r - 1) * n_theta;
    if let Some(init) = initial {
        if init.len() != unknowns {
            return Err(FlatError::Grid(format!(
                "initial guess has {} values, expected {unknowns}",
                init.len()
            )));
        }
    }

    let alpha = cone.alpha();
    let span = (cond.outer() / cond.eps()).ln();
    let r: Vec<f64> = (0..=n_r)
        .map(|i| cond.eps() * (span * i as f64 / n_r as f64).exp())
        .collect();
    let share = cone.link_volume() / n_theta as f64;
    let dtheta = 2.0 * PI / n_theta as f64;
    let radial: Vec<f64> = (0..n_r)
        .map(|i| {
            let h = r[i + 1] - r[i];
            share * power_integral(alpha, r[i], r[i + 1]) / (h * h)
        })
        .collect();
    let beta = alpha - 2.0 * cone.c();
    let angular: Vec<f64> = (0..=n_r)
        .map(|i| {
            if i == 0 || i == n_r || n_theta == 1 {
                0.0
            } else {
                let lo = 0.5 * (r[i - 1] + r[i]);
                let hi = 0.5 * (r[i] + r[i + 1]);
                share * power_integral(beta, lo, hi) / (dtheta * dtheta)
            }
        })
        .collect();
    let op = GridOperator {
        n_r,
        n_t: n_theta,
        radial,
        angular,
    };

    let mut rhs = vec![0.0; unknowns];
    for j in 0..n_theta {
        rhs[op.unknown(1, j)] = op.radial[0];
    }
    let mut x: Vec<f64> = match initial {
        Some(init) => init.to_vec(),
        None => (1..n_r)
            .flat_map(|i| std::iter::repeat_n(1.0 - i as f64 / n_r as f64, n_theta))
            .collect(),
    };
    let inv_diag: Vec<f64> = (1..n_r)
        .flat_map(|i| std::iter::repeat_n(1.0 / op.diagonal(i), n_theta))
        .collect();

    let mut ax = vec![0.0; unknowns];
    op.apply(&x, &mut ax);
    let mut res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = res.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&res, &z);
    let max_iter = 20 * unknowns + 100;
    let mut iterations = 0;
    // energy gradient is 2 (A x - b)
    while 2.0 * dot(&res, &res).sqrt() > GRADIENT_TOL {
        if iterations == max_iter {
            return Err(FlatError::Convergence {
                iterations,
                gradient_norm: 2.0 * dot(&res, &res).sqrt(),
            });
        }
        op.apply(&p, &mut ax);
        let step = rz / dot(&p, &ax);
        for k in 0..unknowns {
            x[k] += step * p[k];
            res[k] -= step * ax[k];
        }
        for k in 0..unknowns {
            z[k] = res[k] * inv_diag[k];
        }
        let rz_next = dot(&res, &z);
        let ratio = rz_next / rz;
        rz = rz_next;
        for k in 0..unknowns {
            p[k] = z[k] + ratio * p[k];
        }
        iterations += 1;
        if iterations % 50 == 0 {
            op.apply(&x, &mut ax);
            for k in 0..unknowns {
                res[k] = rhs[k] - ax[k];
            }
        }
    }

    let mut profile = vec![1.0; n_theta];
    profile.extend_from_slice(&x);
    profile.extend(std::iter::repeat_n(0.0, n_theta));
    let at = |i: usize, j: usize| profile[i * n_theta + j];
    let mut value = 0.0;
    for i in 0..n_r {
        for j in 0..n_theta {
            value += op.radial[i] * (at(i + 1, j) - at(i, j)).powi(2);
            value += op.angular[i] * (at(i, (j + 1) % n_theta) - at(i, j)).powi(2);
        }
    }
    Ok(GridCapacity {
        value,
        iterations,
        profile,
    })
}
