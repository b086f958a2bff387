use super::{Condenser, ConeError, ConeModel};

/// `ln(sum(exp(xs)))`.
pub(crate) fn ln_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Natural log of the radial q-capacity of the condenser, `q > 1`.
///
/// Radial minimizers satisfy `f' ∝ r^(-alpha/(q-1))`, giving
/// `Cap = V I^(1-q)` with `I = ∫_eps^R r^(-alpha/(q-1)) dr`. `I` is evaluated
/// through `expm1` in log form so exponents far from 1 neither overflow nor
/// cancel.
pub fn radial_capacity_exact_ln(
    cone: &ConeModel,
    q: f64,
    cond: &Condenser,
) -> Result<f64, ConeError> {
    if !(q.is_finite() && q > 1.0) {
        return Err(ConeError::Domain(q));
    }
    let s = 1.0 - cone.alpha() / (q - 1.0);
    let span = (cond.outer() / cond.eps()).ln();
    let ln_i = if s == 0.0 {
        span.ln()
    } else if s > 0.0 {
        // R^s (1 - (eps/R)^s) / s
        s * cond.outer().ln() + (-(-s * span).exp_m1() / s).ln()
    } else {
        // eps^s (1 - (R/eps)^s) / (-s)
        let x = -s * span;
        s * cond.eps().ln() + (-(-x).exp_m1()).ln() - (-s).ln()
    };
    Ok(cone.link_volume().ln() + (1.0 - q) * ln_i)
}

pub fn radial_capacity_exact(cone: &ConeModel, q: f64, cond: &Condenser) -> Result<f64, ConeError> {
    radial_capacity_exact_ln(cone, q, cond).map(f64::exp)
}

/// q = 1: the transition concentrates at the inner radius, where the
/// density `V r^alpha` is smallest.
pub fn q1_capacity(cone: &ConeModel, cond: &Condenser) -> f64 {
    cone.link_volume() * cond.eps().powf(cone.alpha())
}

/// The vertex has vanishing capacity iff `alpha >= q - 1`.
pub fn vertex_parabolic(cone: &ConeModel, q: f64) -> bool {
    cone.alpha() >= q - 1.0
}

/// Capacity of `{|f| > a}` is at most `(2/a)^q ||df||_q^q`, since
/// `min(2f/a, 1)` is admissible for it.
pub fn sublevel_capacity_bound(a: f64, energy: f64, q: f64) -> f64 {
    (2.0 / a).powf(q) * energy
}

/// `||u||_{q1} <= ||u||_{q2} M^(1/q1 - 1/q2)` on a space of total measure `M`.
pub fn holder_downgrade(norm_q2: f64, q1: f64, q2: f64, total_measure: f64) -> f64 {
    norm_q2 * total_measure.powf(1.0 / q1 - 1.0 / q2)
}

const LAMBDA_TOL: f64 = 1e-12;
const LAMBDA_MAX_ITER: usize = 200;

/// Discrete radial capacity on a log-spaced grid of `n` cells.
///
/// Profiles are piecewise linear in `r` with `f(eps) = 1`, `f(R) = 0`. Each
/// cell carries the effective weight `w_i` for which `w_i^(-1/(q-1)) dr_i`
/// equals the Simpson rule (in `ln r`) for `∫_cell w^(-1/(q-1)) dr`, where
/// `w = V r^alpha`. The discrete energy `Σ |d_i|^q w_i dr_i` is minimized
/// exactly: optimal slopes satisfy `|d_i|^(q-1) w_i = λ`, and the multiplier
/// `λ` is found by a safeguarded Newton iteration on the total drop.
pub fn radial_capacity_numeric(
    cone: &ConeModel,
    q: f64,
    cond: &Condenser,
    n: usize,
) -> Result<f64, ConeError> {
    if !(q.is_finite() && q > 1.0) {
        return Err(ConeError::Domain(q));
    }
    if n < 16 {
        return Err(ConeError::GridTooSmall(n));
    }
    let p = 1.0 / (q - 1.0);
    let alpha = cone.alpha();
    let ln_v = cone.link_volume().ln();
    let t0 = cond.eps().ln();
    let h = (cond.outer().ln() - t0) / n as f64;
    let ln_expm1_h = h.exp_m1().ln();

    // ln of the integrand of ∫ w^(-p) dr after r = e^t.
    let g = |t: f64| t - p * (ln_v + alpha * t);
    let mut ln_w = Vec::with_capacity(n);
    let mut ln_dr = Vec::with_capacity(n);
    for i in 0..n {
        let a = t0 + i as f64 * h;
        let b = a + h;
        let (ga, gm, gb) = (g(a), g(a + 0.5 * h), g(b));
        let m = ga.max(gm).max(gb);
        let ln_j = m + (((ga - m).exp() + 4.0 * (gm - m).exp() + (gb - m).exp()) * h / 6.0).ln();
        let ldr = a + ln_expm1_h;
        ln_dr.push(ldr);
        ln_w.push(-(ln_j - ldr) / p);
    }

    // ln of the total drop for multiplier exp(t); its slope in t is exactly p.
    let ln_drop = |t: f64| {
        let terms: Vec<f64> = ln_w
            .iter()
            .zip(&ln_dr)
            .map(|(lw, ldr)| p * (t - lw) + ldr)
            .collect();
        ln_sum_exp(&terms)
    };

    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut t = ln_w.iter().sum::<f64>() / n as f64;
    let mut converged = false;
    for _ in 0..LAMBDA_MAX_ITER {
        let r = ln_drop(t);
        if !r.is_finite() {
            return Err(ConeError::Convergence(format!(
                "non-finite drop at ln λ = {t}"
            )));
        }
        if r.abs() <= LAMBDA_TOL {
            converged = true;
            break;
        }
        if r > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        let mut next = t - r / p;
        if !(next > lo && next < hi) && lo.is_finite() && hi.is_finite() {
            next = 0.5 * (lo + hi);
        }
        t = next;
    }
    if !converged {
        return Err(ConeError::Convergence(format!(
            "|total drop - 1| above {LAMBDA_TOL:e} after {LAMBDA_MAX_ITER} iterations"
        )));
    }

    let energy_terms: Vec<f64> = ln_w
        .iter()
        .zip(&ln_dr)
        .map(|(lw, ldr)| q * p * (t - lw) + lw + ldr)
        .collect();
    Ok(ln_sum_exp(&energy_terms).exp())
}
