//! Per-stratum evaluation of the sufficient conditions for q-parabolicity of
//! an iterated edge metric, and the maximal admissible exponent.
//!
//! For a singular stratum of codimension `k` with exponent `c = c_k`:
//!
//! * every stratum needs `c (k - 1) >= q - 1`, i.e. `q <= 1 + c (k - 1)`;
//! * strata of depth > 1 additionally need `c (k - 1 - q) > -1`, i.e.
//!   `q < (k - 1) + 1 / c`.
//!
//! Both are evaluated in the bound form so that `check_q` and `admissible_q`
//! agree exactly at the interval endpoint. A failed condition means the
//! criterion is silent, never that the space fails to be parabolic.

use std::fmt;

use thiserror::Error;

use crate::strata::ValidatedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Guaranteed,
    TheoremSilent,
    InvalidInput,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Guaranteed => "guaranteed",
            Verdict::TheoremSilent => "theorem-silent",
            Verdict::InvalidInput => "invalid-input",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumCondition {
    pub stratum: String,
    pub codim: usize,
    pub depth: usize,
    pub c: f64,
    pub cond1: bool,
    /// `None` for depth-1 strata, where the second condition does not apply.
    pub cond2: Option<bool>,
    /// `c (k - 1) - (q - 1)`.
    pub margin1: f64,
    /// `c (k - 1 - q) + 1`.
    pub margin2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub q: f64,
    pub records: Vec<StratumCondition>,
    pub verdict: Verdict,
}

/// `[1, upper]` or `[1, upper)`. `upper` is `+inf` for a space without
/// singular strata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QInterval {
    pub upper: f64,
    pub upper_closed: bool,
}

impl QInterval {
    pub fn contains(&self, q: f64) -> bool {
        q >= 1.0 && (q < self.upper || (q == self.upper && self.upper_closed))
    }
}

impl fmt::Display for QInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.upper.is_infinite() {
            write!(f, "[1, inf)")
        } else if self.upper_closed {
            write!(f, "[1, {}]", self.upper)
        } else {
            write!(f, "[1, {})", self.upper)
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CheckerError {
    #[error("internal invariant violated: admissible interval is empty (Q = {0})")]
    EmptyInterval(f64),
}

fn cond1_bound(c: f64, codim: usize) -> f64 {
    1.0 + c * (codim as f64 - 1.0)
}

fn cond2_bound(c: f64, codim: usize) -> f64 {
    (codim as f64 - 1.0) + 1.0 / c
}

pub fn check_q(space: &ValidatedSpace, q: f64) -> ConditionReport {
    if !(q.is_finite() && q >= 1.0) {
        return ConditionReport {
            q,
            records: vec![],
            verdict: Verdict::InvalidInput,
        };
    }
    let records: Vec<StratumCondition> = space
        .strata()
        .map(|s| {
            let k = s.codim as f64;
            let deep = s.depth > 1;
            StratumCondition {
                stratum: s.name.to_string(),
                codim: s.codim,
                depth: s.depth,
                c: s.c,
                cond1: q <= cond1_bound(s.c, s.codim),
                cond2: deep.then(|| q < cond2_bound(s.c, s.codim)),
                margin1: s.c * (k - 1.0) - (q - 1.0),
                margin2: deep.then_some(s.c * (k - 1.0 - q) + 1.0),
            }
        })
        .collect();
    let ok = records.iter().all(|r| r.cond1 && r.cond2.unwrap_or(true));
    ConditionReport {
        q,
        records,
        verdict: if ok {
            Verdict::Guaranteed
        } else {
            Verdict::TheoremSilent
        },
    }
}

/// The largest interval `[1, Q]` (or `[1, Q)`) on which the conditions hold.
/// When a closed and a strict bound tie at the minimum the endpoint is
/// excluded.
pub fn admissible_q(space: &ValidatedSpace) -> Result<QInterval, CheckerError> {
    let mut upper = f64::INFINITY;
    let mut closed_hit = false;
    let mut open_hit = false;
    let mut consider = |bound: f64, closed: bool| {
        if bound < upper {
            upper = bound;
            closed_hit = closed;
            open_hit = !closed;
        } else if bound == upper {
            if closed {
                closed_hit = true;
            } else {
                open_hit = true;
            }
        }
    };
    for s in space.strata() {
        consider(cond1_bound(s.c, s.codim), true);
        if s.depth > 1 {
            consider(cond2_bound(s.c, s.codim), false);
        }
    }
    if upper < 1.0 || upper.is_nan() {
        return Err(CheckerError::EmptyInterval(upper));
    }
    Ok(QInterval {
        upper,
        upper_closed: upper.is_finite() && closed_hit && !open_hit,
    })
}

/// True when the admissible interval contains 2. The regular part of a
/// compact space has finite volume, so 2-parabolicity gives stochastic
/// completeness. `false` only means no guarantee.
pub fn stochastic_completeness_flag(space: &ValidatedSpace) -> bool {
    admissible_q(space)
        .map(|i| i.contains(2.0))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::{validate, StratifiedSpaceSpec, Stratum};
    use proptest::prelude::*;

    fn space(
        m: usize,
        c_hat: Vec<f64>,
        strata: &[(&str, usize, usize, &[&str])],
    ) -> ValidatedSpace {
        let spec = StratifiedSpaceSpec {
            name: "t".into(),
            m,
            c_hat,
            strata: strata
                .iter()
                .map(|(n, dim, depth, cl)| Stratum {
                    name: n.to_string(),
                    dim: *dim,
                    depth: *depth,
                    closure_contains: cl.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        };
        validate(&spec).unwrap()
    }

    #[test]
    fn point_in_four_space() {
        let s = space(4, vec![1.0; 3], &[("p", 0, 1, &[])]);
        let r = check_q(&s, 2.0);
        assert_eq!(r.verdict, Verdict::Guaranteed);
        assert!(r.records[0].cond1);
        assert_eq!(r.records[0].cond2, None);
        assert_eq!(r.records[0].margin1, 2.0);
        let i = admissible_q(&s).unwrap();
        assert_eq!(
            i,
            QInterval {
                upper: 4.0,
                upper_closed: true
            }
        );
    }

    #[test]
    fn q_one_only_depends_on_cond2() {
        let s = space(4, vec![0.01, 0.01, 0.01], &[("p", 0, 1, &[])]);
        assert_eq!(check_q(&s, 1.0).verdict, Verdict::Guaranteed);
        assert_eq!(check_q(&s, 1.1).verdict, Verdict::TheoremSilent);
    }

    #[test]
    fn mixed_codims_with_deep_stratum() {
        // Codim-2 edge Y with a codim-3 stratum Z in its closure.
        let s = space(5, vec![1.0; 4], &[("Y", 3, 1, &["Z"]), ("Z", 2, 2, &[])]);
        let i = admissible_q(&s).unwrap();
        assert_eq!(
            i,
            QInterval {
                upper: 2.0,
                upper_closed: true
            }
        );
        let r = check_q(&s, 2.0);
        assert_eq!(r.verdict, Verdict::Guaranteed);
        let z = r.records.iter().find(|r| r.stratum == "Z").unwrap();
        assert_eq!(z.cond2, Some(true));
        assert_eq!(z.margin2, Some(1.0 * (3.0 - 1.0 - 2.0) + 1.0));
    }

    #[test]
    fn strict_bound_opens_interval() {
        // Deep stratum with small exponent: cond2 bound (k-1)+1/c below cond1 bound.
        let s = space(8, vec![4.0; 7], &[("Y", 5, 1, &["Z"]), ("Z", 3, 2, &[])]);
        // Y: codim 3, cond1 1 + 8 = 9. Z: codim 5, cond1 17, cond2 4.25.
        let i = admissible_q(&s).unwrap();
        assert_eq!(
            i,
            QInterval {
                upper: 4.25,
                upper_closed: false
            }
        );
        assert_eq!(check_q(&s, 4.25).verdict, Verdict::TheoremSilent);
        assert_eq!(check_q(&s, 4.249).verdict, Verdict::Guaranteed);
    }

    #[test]
    fn scaling_up_can_shrink_when_strict_bound_binds() {
        // The strict bound (k - 1) + 1/c decreases in c.
        let base = space(8, vec![4.0; 7], &[("Y", 5, 1, &["Z"]), ("Z", 3, 2, &[])]);
        let scaled = space(8, vec![8.0; 7], &[("Y", 5, 1, &["Z"]), ("Z", 3, 2, &[])]);
        assert_eq!(admissible_q(&base).unwrap().upper, 4.25);
        assert_eq!(admissible_q(&scaled).unwrap().upper, 4.125);
    }

    #[test]
    fn tie_between_closed_and_strict_is_open() {
        // Z: codim 3, c = 1: cond1 bound 3, cond2 bound 2 + 1 = 3.
        let s = space(
            5,
            vec![5.0, 1.0, 1.0, 1.0],
            &[("Y", 3, 1, &["Z"]), ("Z", 2, 2, &[])],
        );
        let i = admissible_q(&s).unwrap();
        assert_eq!(
            i,
            QInterval {
                upper: 3.0,
                upper_closed: false
            }
        );
    }

    #[test]
    fn conic_corollary() {
        for (n, c) in [(2usize, 1.0), (3, 0.25), (5, 2.0), (4, 0.3)] {
            let s = validate(&StratifiedSpaceSpec::conic(n, c)).unwrap();
            let i = admissible_q(&s).unwrap();
            assert_eq!(i.upper, 1.0 + c * (n as f64 - 1.0));
            assert!(i.upper_closed);
            assert_eq!(
                stochastic_completeness_flag(&s),
                c * (n as f64 - 1.0) >= 1.0
            );
        }
    }

    #[test]
    fn manifold_is_unbounded() {
        let s = space(3, vec![1.0, 1.0], &[]);
        let i = admissible_q(&s).unwrap();
        assert!(i.upper.is_infinite());
        assert!(stochastic_completeness_flag(&s));
        assert_eq!(check_q(&s, 100.0).verdict, Verdict::Guaranteed);
    }

    #[test]
    fn small_q_upper_has_no_guarantee() {
        let s = validate(&StratifiedSpaceSpec::conic(2, 0.5)).unwrap();
        assert_eq!(admissible_q(&s).unwrap().upper, 1.5);
        assert!(!stochastic_completeness_flag(&s));
    }

    #[test]
    fn invalid_q() {
        let s = space(4, vec![1.0; 3], &[("p", 0, 1, &[])]);
        assert_eq!(check_q(&s, 0.5).verdict, Verdict::InvalidInput);
        assert_eq!(check_q(&s, f64::NAN).verdict, Verdict::InvalidInput);
    }

    fn arb_space() -> impl Strategy<Value = ValidatedSpace> {
        (
            4usize..9,
            proptest::collection::vec(0.05f64..4.0, 8),
            0usize..4,
        )
            .prop_map(|(m, cs, extra)| {
                let c_hat = cs[..m - 1].to_vec();
                // Chain of strata with decreasing dimensions; each lies in the
                // closure of the previous one.
                let chain_len = (extra + 1).min(m - 1);
                let mut strata = Vec::new();
                for j in 0..chain_len {
                    let dim = m - 2 - j;
                    let closure = if j + 1 < chain_len {
                        vec![format!("s{}", j + 1)]
                    } else {
                        vec![]
                    };
                    strata.push(Stratum {
                        name: format!("s{j}"),
                        dim,
                        depth: j + 1,
                        closure_contains: closure,
                    });
                }
                validate(&StratifiedSpaceSpec {
                    name: "r".into(),
                    m,
                    c_hat,
                    strata,
                })
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn monotone_in_q(s in arb_space(), q1 in 1.0f64..8.0, q2 in 1.0f64..8.0) {
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            if check_q(&s, hi).verdict == Verdict::Guaranteed {
                prop_assert_eq!(check_q(&s, lo).verdict, Verdict::Guaranteed);
            }
        }

        #[test]
        fn interval_matches_pointwise_check(s in arb_space(), q in 1.0f64..10.0) {
            let i = admissible_q(&s).unwrap();
            prop_assert_eq!(check_q(&s, q).verdict == Verdict::Guaranteed, i.contains(q));
            prop_assert_eq!(check_q(&s, i.upper).verdict == Verdict::Guaranteed, i.upper_closed);
        }

        #[test]
        fn scaling_exponents_up_never_shrinks_depth_one(
            m in 3usize..9,
            cs in proptest::collection::vec(0.05f64..4.0, 8),
            dims in proptest::collection::vec(0usize..7, 1..5),
            lambda in 1.0f64..5.0,
        ) {
            let strata: Vec<(String, usize)> = dims
                .iter()
                .enumerate()
                .map(|(i, d)| (format!("s{i}"), d % (m - 1)))
                .collect();
            let borrowed: Vec<(&str, usize, usize, &[&str])> =
                strata.iter().map(|(n, d)| (n.as_str(), *d, 1, &[][..])).collect();
            let s = space(m, cs[..m - 1].to_vec(), &borrowed);
            let scaled = space(m, cs[..m - 1].iter().map(|c| c * lambda).collect(), &borrowed);
            prop_assert!(admissible_q(&scaled).unwrap().upper >= admissible_q(&s).unwrap().upper);
        }
    }
}
