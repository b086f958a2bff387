//! Comparing q-parabolicity of two metrics on the same manifold.
//!
//! With `g1(A v, w) = g2(v, w)`, parabolicity passes from `g1` to `g2` when
//! `s = det(A)^(1/2) |(A^-1)^t|^(q/2)` is bounded. In a `g1`-orthonormal frame
//! `A` is symmetric with eigenvalues `lambda_1 <= ... <= lambda_m`, and
//! `s = (prod lambda_i)^(1/2) lambda_1^(-q/2)`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

const MAX_CONDITION: f64 = 1e12;
const SYMMETRY_TOL: f64 = 1e-10;
const COMPAT_TOL: f64 = 1e-10;
const ORDER_TOL: f64 = 1e-10;
const CLUSTER_GAP: f64 = 1e-8;
const COMMUTE_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum StabilityError {
    #[error("no samples")]
    Empty,
    #[error("point {id}: {reason}")]
    Shape { id: String, reason: String },
    #[error("point {id}: {which} is not symmetric positive definite")]
    NotSpd { id: String, which: &'static str },
    #[error("point {id}: G1 condition number {condition:e} exceeds 1e12")]
    Numerical { id: String, condition: f64 },
    #[error("point {id}: {what} (defect {defect:e})")]
    Compatibility {
        id: String,
        what: &'static str,
        defect: f64,
    },
    #[error(
        "point {id}: G2 <= c G1 fails, smallest normalized eigenvalue of c G1 - G2 is {min_eig:e}"
    )]
    Order { id: String, min_eig: f64 },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSamplePair {
    pub id: String,
    pub g1: DMatrix<f64>,
    pub g2: DMatrix<f64>,
    pub j: Option<DMatrix<f64>>,
}

fn relative_defect(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

impl MetricSamplePair {
    pub fn dim(&self) -> usize {
        self.g1.nrows()
    }

    fn check_shapes(&self) -> Result<(), StabilityError> {
        let n = self.g1.nrows();
        let square = |m: &DMatrix<f64>| m.nrows() == n && m.ncols() == n;
        if n == 0
            || !square(&self.g1)
            || !square(&self.g2)
            || self.j.as_ref().is_some_and(|j| !square(j))
        {
            return Err(StabilityError::Shape {
                id: self.id.clone(),
                reason: "matrices must be square and of equal size".into(),
            });
        }
        for (m, which) in [(&self.g1, "G1"), (&self.g2, "G2")] {
            if relative_defect(&m.transpose(), m) > SYMMETRY_TOL {
                return Err(StabilityError::NotSpd {
                    id: self.id.clone(),
                    which,
                });
            }
        }
        Ok(())
    }

    /// Eigenvalues of `G1^-1 G2`, ascending, from `L^-1 G2 L^-T` with
    /// `G1 = L L^T`.
    pub fn endomorphism_eigenvalues(&self) -> Result<Vec<f64>, StabilityError> {
        self.check_shapes()?;
        let g1_eig = SymmetricEigen::new(self.g1.clone()).eigenvalues;
        let lo = g1_eig.min();
        let hi = g1_eig.max();
        if lo <= 0.0 {
            return Err(StabilityError::NotSpd {
                id: self.id.clone(),
                which: "G1",
            });
        }
        if hi / lo > MAX_CONDITION {
            return Err(StabilityError::Numerical {
                id: self.id.clone(),
                condition: hi / lo,
            });
        }
        let chol = self
            .g1
            .clone()
            .cholesky()
            .ok_or_else(|| StabilityError::NotSpd {
                id: self.id.clone(),
                which: "G1",
            })?;
        let l = chol.l();
        let y = l
            .solve_lower_triangular(&self.g2)
            .expect("Cholesky factor of an SPD matrix is invertible");
        let m = l
            .solve_lower_triangular(&y.transpose())
            .expect("Cholesky factor of an SPD matrix is invertible");
        let sym = (&m + m.transpose()) * 0.5;
        let mut eig: Vec<f64> = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        if eig[0] <= 0.0 {
            return Err(StabilityError::NotSpd {
                id: self.id.clone(),
                which: "G2",
            });
        }
        Ok(eig)
    }
}

fn transfer_from_eigenvalues(eig: &[f64], q: f64) -> f64 {
    let ln_det: f64 = eig.iter().map(|l| l.ln()).sum();
    (0.5 * ln_det - 0.5 * q * eig[0].ln()).exp()
}

pub fn transfer_value(sample: &MetricSamplePair, q: f64) -> Result<f64, StabilityError> {
    Ok(transfer_from_eigenvalues(
        &sample.endomorphism_eigenvalues()?,
        q,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferVerdict {
    Guaranteed,
    NotGuaranteed,
}

impl fmt::Display for TransferVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransferVerdict::Guaranteed => "transfer guaranteed",
            TransferVerdict::NotGuaranteed => "not guaranteed",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub q: f64,
    pub threshold: f64,
    pub points: Vec<(String, f64)>,
    pub sup: f64,
    pub verdict: TransferVerdict,
}

impl TransferReport {
    pub fn point_verdict(&self, s: f64) -> TransferVerdict {
        if s <= self.threshold {
            TransferVerdict::Guaranteed
        } else {
            TransferVerdict::NotGuaranteed
        }
    }
}

/// `s` at every sample, its supremum, and whether the supremum stays below
/// `threshold`.
pub fn transfer_bound(
    samples: &[MetricSamplePair],
    q: f64,
    threshold: f64,
) -> Result<TransferReport, StabilityError> {
    if samples.is_empty() {
        return Err(StabilityError::Empty);
    }
    let points = samples
        .iter()
        .map(|s| transfer_value(s, q).map(|v| (s.id.clone(), v)))
        .collect::<Result<Vec<_>, _>>()?;
    let sup = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let verdict = if sup <= threshold {
        TransferVerdict::Guaranteed
    } else {
        TransferVerdict::NotGuaranteed
    };
    Ok(TransferReport {
        q,
        threshold,
        points,
        sup,
        verdict,
    })
}

/// `g2 = f^2 g1` with `f^2 <= f_sq_sup`: `s = f^(m - q)`, bounded iff `m >= q`.
pub fn conformal_transfer(m: usize, q: f64, f_sq_sup: f64) -> bool {
    f_sq_sup.is_finite() && f_sq_sup > 0.0 && m as f64 >= q
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostComplexReport {
    pub id: String,
    pub eigenvalues: Vec<f64>,
    pub s: f64,
    pub bound: f64,
    pub commutes: bool,
    pub paired: bool,
    pub within_bound: bool,
}

impl AlmostComplexReport {
    pub fn passed(&self) -> bool {
        self.commutes && self.paired && self.within_bound
    }
}

/// Groups ascending eigenvalues whose relative gap is below `1e-8` and
/// returns the group sizes.
pub fn eigenvalue_multiplicities(sorted: &[f64]) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut run = 0;
    for (i, &x) in sorted.iter().enumerate() {
        if i > 0 && (x - sorted[i - 1]) > CLUSTER_GAP * x.abs().max(sorted[i - 1].abs()) {
            sizes.push(run);
            run = 0;
        }
        run += 1;
    }
    if run > 0 {
        sizes.push(run);
    }
    sizes
}

/// For `J`-compatible `g1 = h`, `g2 = rho` with `rho <= c h` on a real
/// `2m`-dimensional space, `A` commutes with `J`, its eigenvalues pair up and
/// the `q = 2` transfer satisfies `s <= c^(m-1)`.
pub fn almost_complex_check(
    sample: &MetricSamplePair,
    c: f64,
) -> Result<AlmostComplexReport, StabilityError> {
    sample.check_shapes()?;
    let id = sample.id.clone();
    let Some(j) = &sample.j else {
        return Err(StabilityError::Shape {
            id,
            reason: "almost-complex check needs J".into(),
        });
    };
    let n = sample.dim();
    if !n.is_multiple_of(2) {
        return Err(StabilityError::Shape {
            id,
            reason: format!("real dimension {n} is odd"),
        });
    }
    let ident = DMatrix::<f64>::identity(n, n);
    let defect = relative_defect(&(j * j), &(-&ident));
    if defect > COMPAT_TOL {
        return Err(StabilityError::Compatibility {
            id,
            what: "J^2 != -I",
            defect,
        });
    }
    for (g, what) in [
        (&sample.g1, "J^t G1 J != G1"),
        (&sample.g2, "J^t G2 J != G2"),
    ] {
        let defect = relative_defect(&(j.transpose() * g * j), g);
        if defect > COMPAT_TOL {
            return Err(StabilityError::Compatibility { id, what, defect });
        }
    }
    let gap = &sample.g1 * c - &sample.g2;
    let min_eig = SymmetricEigen::new((&gap + gap.transpose()) * 0.5)
        .eigenvalues
        .min()
        / (&sample.g1 * c).trace();
    if min_eig < -ORDER_TOL {
        return Err(StabilityError::Order { id, min_eig });
    }

    let eigenvalues = sample.endomorphism_eigenvalues()?;
    let a = sample
        .g1
        .clone()
        .cholesky()
        .expect("checked positive definite")
        .solve(&sample.g2);
    let commutes = relative_defect(&(j * &a), &(&a * j)) <= COMMUTE_TOL;
    let paired = eigenvalue_multiplicities(&eigenvalues)
        .iter()
        .all(|k| k % 2 == 0);
    let s = transfer_from_eigenvalues(&eigenvalues, 2.0);
    let bound = c.powi(n as i32 / 2 - 1);
    Ok(AlmostComplexReport {
        id,
        eigenvalues,
        s,
        bound,
        commutes,
        paired,
        within_bound: s <= bound * (1.0 + 1e-9),
    })
}

fn square_root_exact(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

/// One record per line: point id, then the row-major entries of `G1`, `G2`
/// and optionally `J`. Tokens are separated by whitespace or commas; `#`
/// starts a comment.
pub fn parse_samples(text: &str) -> Result<Vec<MetricSamplePair>, StabilityError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|t| !t.is_empty());
        let id = tokens
            .next()
            .expect("nonempty line has a token")
            .to_string();
        let values = tokens
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| StabilityError::Parse {
                        line,
                        reason: format!("'{t}' is not a finite number"),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let total = values.len();
        let (n, with_j) = if total % 2 == 0 && square_root_exact(total / 2).is_some_and(|n| n > 0) {
            (square_root_exact(total / 2).unwrap(), false)
        } else if total % 3 == 0 && square_root_exact(total / 3).is_some_and(|n| n > 0) {
            (square_root_exact(total / 3).unwrap(), true)
        } else {
            return Err(StabilityError::Parse {
                line,
                reason: format!("{total} entries is neither 2 n^2 nor 3 n^2"),
            });
        };
        let block = |k: usize| DMatrix::from_row_slice(n, n, &values[k * n * n..(k + 1) * n * n]);
        out.push(MetricSamplePair {
            id,
            g1: block(0),
            g2: block(1),
            j: with_j.then(|| block(2)),
        });
    }
    if out.is_empty() {
        return Err(StabilityError::Empty);
    }
    Ok(out)
}
