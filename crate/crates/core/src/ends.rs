//! Warped-product ends `dr^2 + phi(r)^2 g_L` with `phi = C r^a e^(b r)`.
//!
//! A radial test function on the end costs `V ∫ |f'|^q phi^d dr`, whose
//! infimum over profiles dropping by 1 is `V (∫ phi^(-d/(q-1)) dr)^(1-q)`.
//! The end is q-parabolic iff that integral diverges. For `q = 2`, `d = 1`
//! this is the classical `∫ 1/phi = ∞`.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::stability::{transfer_value, MetricSamplePair};

#[derive(Debug, Error, PartialEq)]
pub enum EndsError {
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),
    #[error("q = {0} must exceed 1")]
    Domain(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Vertex,
    Infinity,
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Vertex => "vertex",
            End::Infinity => "infinity",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpProfile {
    amplitude: f64,
    a: f64,
    b: f64,
    end: End,
    d: usize,
    link_volume: f64,
}

impl WarpProfile {
    pub fn new(
        amplitude: f64,
        a: f64,
        b: f64,
        end: End,
        d: usize,
        link_volume: f64,
    ) -> Result<Self, EndsError> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(EndsError::UnsupportedProfile(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(EndsError::UnsupportedProfile(format!(
                "exponents must be finite, got a = {a}, b = {b}"
            )));
        }
        if d == 0 {
            return Err(EndsError::UnsupportedProfile(
                "link dimension must be at least 1".into(),
            ));
        }
        if !(link_volume.is_finite() && link_volume > 0.0) {
            return Err(EndsError::UnsupportedProfile(format!(
                "link volume must be positive, got {link_volume}"
            )));
        }
        Ok(WarpProfile {
            amplitude,
            a,
            b,
            end,
            d,
            link_volume,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn end(&self) -> End {
        self.end
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn link_volume(&self) -> f64 {
        self.link_volume
    }

    pub fn ln_phi(&self, r: f64) -> f64 {
        self.amplitude.ln() + self.a * r.ln() + self.b * r
    }
}

impl fmt::Display for WarpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi = {} r^{} e^({} r)", self.amplitude, self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndVerdict {
    Parabolic,
    NonParabolic,
}

impl fmt::Display for EndVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndVerdict::Parabolic => "parabolic",
            EndVerdict::NonParabolic => "non-parabolic",
        })
    }
}

/// Divergence of `∫ phi^(-d/(q-1))` towards the end. Near the vertex only
/// the power matters; at infinity the exponential rate decides unless it is
/// zero. The vertex comparison is written `a d >= q - 1` so it coincides
/// bit for bit with the cone criterion `alpha >= q - 1`.
pub fn end_parabolic(p: &WarpProfile, q: f64) -> Result<EndVerdict, EndsError> {
    if !(q.is_finite() && q > 1.0) {
        return Err(EndsError::Domain(q));
    }
    let ad = p.a * p.d as f64;
    let divergent = match p.end {
        End::Vertex => ad >= q - 1.0,
        End::Infinity => p.b < 0.0 || (p.b == 0.0 && ad <= q - 1.0),
    };
    Ok(if divergent {
        EndVerdict::Parabolic
    } else {
        EndVerdict::NonParabolic
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub name: &'static str,
    pub metric: &'static str,
    pub profile: WarpProfile,
    pub verdict: EndVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub members: Vec<Member>,
    pub chain: Vec<&'static str>,
    /// `h <= c g` on the collar `x <= 1`.
    pub comparison_constant: f64,
    /// `(x, s(x))` for `g1 = g`, `g2 = h`, `q = 2`.
    pub transfer: Vec<(f64, f64)>,
}

impl CounterexampleReport {
    pub fn verdict(&self, name: &str) -> Option<EndVerdict> {
        self.members
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.verdict)
    }
}

/// The collar `(0, 1] x Z` of a surface with a circle link `Z`. `g` is a
/// cone, `h = x^2 (dx^2 + g')` lies below it, and `h` is conformal to the
/// cylinder `h'`, which is not 2-parabolic.
pub fn counterexample_report() -> CounterexampleReport {
    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
    let member = |name, metric, a, b, end| {
        let profile = WarpProfile::new(1.0, a, b, end, 1, TWO_PI).expect("fixed profile is valid");
        let verdict = end_parabolic(&profile, 2.0).expect("q = 2 is in range");
        Member {
            name,
            metric,
            profile,
            verdict,
        }
    };
    let members = vec![
        member("g", "dx^2 + x^2 g'", 1.0, 0.0, End::Vertex),
        member("h'", "dx^2 + g'", 0.0, 0.0, End::Vertex),
        member("rho'", "dr^2 + e^(2r) g'", 0.0, 1.0, End::Infinity),
    ];
    let chain = vec![
        "h' on (0,1] x Z is isometric to rho = e^(-2r) dr^2 + g' on [0,inf) x Z via x = e^(-r)",
        "rho' = e^(2r) rho, and the 2-energy of a surface is conformally invariant",
        "h = x^2 h' is conformal to h', so h, h', rho and rho' share one verdict",
        "h = x^2 dx^2 + x^2 g' <= dx^2 + x^2 g' = g for x <= 1",
    ];
    // g = diag(1, x^2), h = diag(x^2, x^2) in the frame (dx, dtheta)
    let transfer = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&x: &f64| {
            let sample = MetricSamplePair {
                id: format!("x={x:e}"),
                g1: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x * x]),
                g2: DMatrix::from_row_slice(2, 2, &[x * x, 0.0, 0.0, x * x]),
                j: None,
            };
            (
                x,
                transfer_value(&sample, 2.0).expect("diagonal SPD sample"),
            )
        })
        .collect();
    CounterexampleReport {
        members,
        chain,
        comparison_constant: 1.0,
        transfer,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{vertex_parabolic, ConeModel};
    use proptest::prelude::*;

    fn profile(a: f64, b: f64, end: End) -> WarpProfile {
        WarpProfile::new(1.0, a, b, end, 1, 1.0).unwrap()
    }

    #[test]
    fn named_examples() {
        assert_eq!(
            end_parabolic(&profile(0.0, 1.0, End::Infinity), 2.0).unwrap(),
            EndVerdict::NonParabolic
        );
        assert_eq!(
            end_parabolic(&profile(1.0, 0.0, End::Vertex), 2.0).unwrap(),
            EndVerdict::Parabolic
        );
        assert_eq!(
            end_parabolic(&profile(0.0, 0.0, End::Infinity), 2.0).unwrap(),
            EndVerdict::Parabolic
        );
    }

    #[test]
    fn borderline_at_infinity_is_parabolic() {
        // ∫ r^-1 dr diverges
        assert_eq!(
            end_parabolic(&profile(1.0, 0.0, End::Infinity), 2.0).unwrap(),
            EndVerdict::Parabolic
        );
        assert_eq!(
            end_parabolic(&profile(1.0 + 1e-12, 0.0, End::Infinity), 2.0).unwrap(),
            EndVerdict::NonParabolic
        );
        // decaying exponential beats any power
        assert_eq!(
            end_parabolic(&profile(50.0, -1e-3, End::Infinity), 2.0).unwrap(),
            EndVerdict::Parabolic
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WarpProfile::new(0.0, 1.0, 0.0, End::Vertex, 1, 1.0).is_err());
        assert!(WarpProfile::new(1.0, f64::NAN, 0.0, End::Vertex, 1, 1.0).is_err());
        assert!(WarpProfile::new(1.0, 1.0, 0.0, End::Vertex, 0, 1.0).is_err());
        assert_eq!(
            end_parabolic(&profile(1.0, 0.0, End::Vertex), 1.0),
            Err(EndsError::Domain(1.0))
        );
    }

    #[test]
    fn counterexample() {
        let r = counterexample_report();
        let verdicts: Vec<_> = r.members.iter().map(|m| (m.name, m.verdict)).collect();
        assert_eq!(
            verdicts,
            vec![
                ("g", EndVerdict::Parabolic),
                ("h'", EndVerdict::NonParabolic),
                ("rho'", EndVerdict::NonParabolic)
            ]
        );
        for (x, s) in &r.transfer {
            assert!((s * x - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.verdict("rho'"), Some(EndVerdict::NonParabolic));
    }

    proptest! {
        #[test]
        fn vertex_matches_cone(a in 0.01f64..4.0, d in 1usize..6, q in 1.01f64..5.0) {
            let p = WarpProfile::new(1.0, a, 0.0, End::Vertex, d, 1.0).unwrap();
            let cone = ConeModel::new(a, d, 1.0).unwrap();
            prop_assert_eq!(end_parabolic(&p, q).unwrap() == EndVerdict::Parabolic, vertex_parabolic(&cone, q));
        }

        #[test]
        fn amplitude_and_volume_do_not_matter(a in -3.0f64..3.0, b in -2.0f64..2.0, amp in 0.01f64..100.0,
                                              vol in 0.01f64..100.0, vertex in any::<bool>()) {
            let end = if vertex { End::Vertex } else { End::Infinity };
            let base = WarpProfile::new(1.0, a, b, end, 1, 1.0).unwrap();
            let scaled = WarpProfile::new(amp, a, b, end, 1, vol).unwrap();
            prop_assert_eq!(end_parabolic(&base, 2.0).unwrap(), end_parabolic(&scaled, 2.0).unwrap());
        }
    }
}
