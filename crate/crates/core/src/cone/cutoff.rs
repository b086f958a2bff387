//! The explicit cutoff sequence near a singular stratum and its energy terms.
//!
//! With `eps_n = 1/n^2` and `eps'_n = exp(-n^4)` the radial cutoff is
//!
//! ```text
//! gamma_n(r) = 1                                       r >= eps_n
//!              (r/eps_n)^eps_n                         2 eps'_n <= r <= eps_n
//!              (2 eps'_n/eps_n)^eps_n (r/eps'_n - 1)   eps'_n <= r <= 2 eps'_n
//!              0                                       r <= eps'_n
//! ```
//!
//! Integrating the q-th power of its gradient bound against `r^alpha dr`
//! over the two nontrivial branches gives the terms `a_{n,q}` (linear
//! branch) and `b_{n,q}` (power branch), per unit base and link volume.
//! `eps'_n` leaves the double range at `n = 7`, so everything is in log space.

use crate::logspace::LogValue;
use crate::quad;

use super::ConeError;

const E_SWITCH: f64 = 1e-14;

pub fn eps_n(n: u32) -> f64 {
    assert!(n >= 2, "cutoff index must be at least 2");
    1.0 / (f64::from(n) * f64::from(n))
}

/// `ln eps'_n = -n^4`.
pub fn epsp_n_ln(n: u32) -> f64 {
    assert!(n >= 2, "cutoff index must be at least 2");
    -f64::from(n).powi(4)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffPoint {
    pub value: f64,
    pub gradient_bound: LogValue,
}

/// Cutoff value and gradient bound at `r = exp(ln_r)`.
pub fn cutoff_gamma_ln(n: u32, ln_r: f64) -> CutoffPoint {
    let eps = eps_n(n);
    let ln_eps = eps.ln();
    let ln_epsp = epsp_n_ln(n);
    let ln_2epsp = std::f64::consts::LN_2 + ln_epsp;
    if ln_r >= ln_eps {
        CutoffPoint {
            value: 1.0,
            gradient_bound: LogValue::ZERO,
        }
    } else if ln_r >= ln_2epsp {
        let x = ln_r - ln_eps;
        CutoffPoint {
            value: (eps * x).exp(),
            gradient_bound: LogValue::from_ln((eps - 1.0) * x),
        }
    } else if ln_r >= ln_epsp {
        let ln_scale = eps * (ln_2epsp - ln_eps);
        CutoffPoint {
            value: ln_scale.exp() * (ln_r - ln_epsp).exp_m1(),
            gradient_bound: LogValue::from_ln(ln_scale - ln_epsp),
        }
    } else {
        CutoffPoint {
            value: 0.0,
            gradient_bound: LogValue::ZERO,
        }
    }
}

pub fn cutoff_gamma(n: u32, r: f64) -> CutoffPoint {
    assert!(r >= 0.0, "radius must be nonnegative");
    cutoff_gamma_ln(n, r.ln())
}

pub fn gradient_bound_ln(n: u32, ln_r: f64) -> LogValue {
    cutoff_gamma_ln(n, ln_r).gradient_bound
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffTerms {
    pub n: u32,
    pub eps_n: f64,
    pub epsp_n: LogValue,
    pub a: LogValue,
    pub b: LogValue,
}

impl CutoffTerms {
    pub fn total(&self) -> LogValue {
        self.a + self.b
    }
}

/// Closed forms of `a_{n,q}` and `b_{n,q}` for volume exponent `alpha = c k`.
pub fn sequence_terms(n: u32, q: f64, c: f64, k: usize) -> CutoffTerms {
    let alpha = c * k as f64;
    let eps = eps_n(n);
    let eps_l = LogValue::from_f64(eps);
    let epsp = LogValue::from_ln(epsp_n_ln(n));
    let two = LogValue::from_f64(2.0);
    let two_epsp = two * epsp;

    // a = (2 eps'/eps)^(q eps) eps'^(-q) eps'^(alpha+1) (2^(alpha+1) - 1)/(alpha+1)
    let shell = LogValue::from_ln(((alpha + 1.0) * std::f64::consts::LN_2).exp_m1().ln())
        / LogValue::from_f64(alpha + 1.0);
    let a = (two_epsp / eps_l).powf(q * eps) * epsp.powf(alpha + 1.0 - q) * shell;

    // b = (1/eps)^(q eps - q) (eps^E - (2 eps')^E) / E
    let e = q * eps - q + 1.0 + alpha;
    let prefactor = eps_l.recip().powf(q * eps - q);
    let b = if e.abs() < E_SWITCH {
        prefactor * LogValue::from_f64(eps_l.ln_abs() - two_epsp.ln_abs())
    } else {
        prefactor * (eps_l.powf(e) - two_epsp.powf(e)) / LogValue::from_f64(e)
    };

    CutoffTerms {
        n,
        eps_n: eps,
        epsp_n: epsp,
        a,
        b,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericTerms {
    pub a: LogValue,
    pub b: LogValue,
}

const QUAD_TOL: f64 = 1e-9;
const QUAD_SEGMENTS: usize = 20_000;

/// ∫ exp(f(t)) dt over `[lo, hi]` for `f` affine-like in `t`, scaled by the
/// larger endpoint value.
fn ln_integral<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<LogValue, ConeError> {
    let inset = 1e-12 * (hi - lo);
    let scale = f(lo + inset).max(f(hi - inset));
    let v = quad::integrate(|t| (f(t) - scale).exp(), lo, hi, QUAD_TOL, QUAD_SEGMENTS)?;
    Ok(LogValue::from_ln(scale) * LogValue::from_f64(v))
}

/// Quadrature of `∫ |gradient bound|^q r^alpha dr` over each nontrivial
/// branch, after the substitution `r = e^t`.
pub fn sequence_terms_numeric(n: u32, q: f64, c: f64, k: usize) -> Result<NumericTerms, ConeError> {
    let alpha = c * k as f64;
    let ln_eps = eps_n(n).ln();
    let ln_epsp = epsp_n_ln(n);
    let ln_2epsp = std::f64::consts::LN_2 + ln_epsp;
    let integrand = |t: f64| q * gradient_bound_ln(n, t).ln_abs() + (alpha + 1.0) * t;
    let a = ln_integral(integrand, ln_epsp, ln_2epsp)?;
    let b = ln_integral(integrand, ln_2epsp, ln_eps)?;
    Ok(NumericTerms { a, b })
}

/// Bound on `||gamma dbeta||_q^q` over the edge neighbourhood of a deep
/// stratum: the link term times `∫_0^1 r^(c (k - q)) dr`.
pub fn edge_norm_bound(
    link_dnorm_q: f64,
    c: f64,
    k: usize,
    q: f64,
    base_vol: f64,
) -> Result<f64, ConeError> {
    let exponent = c * (k as f64 - q);
    if exponent <= -1.0 {
        return Err(ConeError::Condition2Violated { exponent });
    }
    Ok(base_vol * link_dnorm_q / (exponent + 1.0))
}

/// `L^q` norm bound for the local cutoff `gamma_n beta_n` near a stratum:
/// `(base V (a + b))^(1/q) + (edge term)^(1/q)`. `link_dnorm_q` is `None`
/// for depth-1 strata, where `beta_n = 1`.
pub fn local_cutoff_norm(
    n: u32,
    q: f64,
    c: f64,
    k: usize,
    link_volume: f64,
    base_vol: f64,
    link_dnorm_q: Option<f64>,
) -> Result<f64, ConeError> {
    let terms = sequence_terms(n, q, c, k);
    let radial = (LogValue::from_f64(base_vol * link_volume) * terms.total()).powf(1.0 / q);
    let edge = match link_dnorm_q {
        None => 0.0,
        Some(norm) => edge_norm_bound(norm, c, k, q, base_vol)?.powf(1.0 / q),
    };
    Ok(radial.to_f64() + edge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knots() {
        let p = cutoff_gamma(2, 0.25);
        assert_eq!(p.value, 1.0);
        assert!(p.gradient_bound.is_zero());
        let p = cutoff_gamma_ln(2, -16.0);
        assert_eq!(p.value, 0.0);
        assert_eq!(cutoff_gamma(2, 0.0).value, 0.0);
    }

    #[test]
    fn power_branch_value() {
        // (1/2)^(1/4)
        let v = cutoff_gamma(2, 0.125).value;
        assert!((v - 0.840_896_415_253_714_5).abs() < 1e-15);
        // gradient (r/eps)^(eps - 1) = (1/2)^(-3/4)
        let g = cutoff_gamma(2, 0.125).gradient_bound.to_f64();
        assert!((g - 2f64.powf(0.75)).abs() < 1e-14);
    }

    #[test]
    fn continuity_at_knots_in_log_domain() {
        for n in [2u32, 3, 5, 10, 20] {
            let ln_eps = eps_n(n).ln();
            let ln_2epsp = std::f64::consts::LN_2 + epsp_n_ln(n);
            let ln_epsp = epsp_n_ln(n);
            for knot in [ln_eps, ln_2epsp] {
                let h = 1e-13 * knot.abs().max(1.0);
                let below = cutoff_gamma_ln(n, knot - h).value;
                let at = cutoff_gamma_ln(n, knot).value;
                // log-slope of gamma is at most 2 on either side
                assert!(
                    (below.ln() - at.ln()).abs() < 2.0 * h + 1e-12,
                    "n={n} knot={knot}"
                );
            }
            let above = cutoff_gamma_ln(n, ln_epsp + 1e-300).value;
            assert!(above.abs() < 1e-12);
        }
    }

    #[test]
    fn value_in_unit_interval_and_nondecreasing() {
        for n in [2u32, 3, 4, 8] {
            let lo = epsp_n_ln(n) - 2.0;
            let mut prev = -1.0;
            for i in 0..=20_000 {
                let t = lo + (1.0 - lo) * f64::from(i) / 20_000.0;
                let v = cutoff_gamma_ln(n, t).value;
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn a_term_at_n2() {
        let t = sequence_terms(2, 2.0, 1.0, 1);
        let expected = 8f64.sqrt() * (-8f64).exp() * 1.5;
        assert!((t.a.to_f64() / expected - 1.0).abs() < 1e-13);
        assert!(LogValue::from_f64(2.0) * t.epsp_n < LogValue::from_f64(t.eps_n));
    }

    #[test]
    fn closed_form_matches_quadrature_small_n() {
        for (n, q, c, k) in [
            (2u32, 2.0, 1.0, 1usize),
            (3, 1.5, 0.25, 2),
            (4, 3.0, 2.0, 1),
        ] {
            let t = sequence_terms(n, q, c, k);
            let num = sequence_terms_numeric(n, q, c, k).unwrap();
            assert!((t.a.ln_abs() - num.a.ln_abs()).abs() < 1e-8);
            assert!((t.b.ln_abs() - num.b.ln_abs()).abs() < 1e-8);
        }
    }

    #[test]
    fn log_antiderivative_branch() {
        // E = q/n^2 - q + 1 + alpha = 0 for q = 2, n = 2, alpha = 0.5.
        let t = sequence_terms(2, 2.0, 0.5, 1);
        let num = sequence_terms_numeric(2, 2.0, 0.5, 1).unwrap();
        assert!((t.b.ln_abs() - num.b.ln_abs()).abs() < 1e-8);
    }

    #[test]
    fn sign_of_growth() {
        // alpha < q - 1: the linear-branch term grows like exp((q - 1 - alpha) n^4).
        let small = sequence_terms(3, 2.0, 0.4, 1).a.ln_abs();
        let large = sequence_terms(6, 2.0, 0.4, 1).a.ln_abs();
        assert!(large > small + 100.0);
        // alpha >= q - 1: both terms decay.
        let t = sequence_terms(60, 2.0, 1.0, 1);
        assert!(t.a.log10_abs() < -1000.0);
        assert!(t.b.to_f64() < 1e-3);
    }

    #[test]
    fn edge_bound() {
        assert_eq!(edge_norm_bound(5.0, 1.0, 2, 2.0, 1.0).unwrap(), 5.0);
        assert_eq!(edge_norm_bound(5.0, 1.0, 3, 2.0, 1.0).unwrap(), 2.5);
        assert!(matches!(
            edge_norm_bound(5.0, 1.0, 3, 4.0, 1.0),
            Err(ConeError::Condition2Violated { exponent }) if exponent == -1.0
        ));
    }

    #[test]
    fn edge_bound_matches_quadrature() {
        let (c, k, q) = (0.7, 4usize, 2.5);
        let num = quad::integrate(|r| r.powf(c * (k as f64 - q)), 0.0, 1.0, 1e-12, 1000).unwrap();
        assert!((edge_norm_bound(1.0, c, k, q, 1.0).unwrap() - num).abs() < 1e-10);
    }

    #[test]
    fn local_norm_combines_both_parts() {
        let depth_one = local_cutoff_norm(10, 2.0, 1.0, 2, 4.0, 1.0, None).unwrap();
        let deep = local_cutoff_norm(10, 2.0, 1.0, 2, 4.0, 1.0, Some(0.04)).unwrap();
        assert!((deep - depth_one - 0.2).abs() < 1e-12);
        assert!(local_cutoff_norm(10, 4.0, 1.0, 2, 4.0, 1.0, Some(0.04)).is_err());
    }
}
