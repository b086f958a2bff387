//! Combinatorial model of a compact Thom-Mather stratified pseudomanifold.
//!
//! Only what the parabolicity conditions consume is represented: the total
//! dimension, the exponent tuple indexed by codimension, and the singular
//! strata with their dimensions, declared depths and closure relations. The
//! regular (top) stratum is implicit.
//!
//! Depth follows the chain definition: the regular stratum has depth 0 and a
//! singular stratum `Y` has depth `1 + max depth(S)` over the singular strata
//! `S` whose closure contains `Y` (depth 1 when only the regular stratum does).
//!
//! Space files are line oriented:
//!
//! ```text
//! # a 4-dimensional space with one isolated singular point
//! dim 4
//! c 1 1 1
//! stratum p dim=0 depth=1
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    pub name: String,
    pub dim: usize,
    pub depth: usize,
    /// Strata contained in the closure of this one.
    pub closure_contains: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedSpaceSpec {
    pub name: String,
    pub m: usize,
    /// `(c_2, ..., c_m)`; `c_hat[k - 2]` applies to strata of codimension `k`.
    pub c_hat: Vec<f64>,
    pub strata: Vec<Stratum>,
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    fn new(line: usize, reason: impl Into<String>) -> Self {
        ParseError {
            line,
            reason: reason.into(),
        }
    }
}

/// A single axiom violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    NonPositiveDimension,
    CHatLength {
        expected: usize,
        found: usize,
    },
    NonPositiveExponent {
        codim: usize,
    },
    DuplicateStratum(String),
    CodimensionOne(String),
    DimensionTooLarge {
        stratum: String,
        dim: usize,
    },
    ZeroDepth(String),
    UnknownClosureMember {
        stratum: String,
        member: String,
    },
    SelfClosure(String),
    ClosureDimension {
        stratum: String,
        member: String,
    },
    ClosureCycle(Vec<String>),
    DepthMismatch {
        stratum: String,
        declared: usize,
        computed: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveDimension => write!(f, "total dimension must be positive"),
            Violation::CHatLength { expected, found } => {
                write!(f, "c_hat length mismatch: expected {expected}, found {found}")
            }
            Violation::NonPositiveExponent { codim } => {
                write!(f, "exponent c_{codim} must be positive and finite")
            }
            Violation::DuplicateStratum(s) => write!(f, "duplicate stratum name `{s}`"),
            Violation::CodimensionOne(s) => {
                write!(f, "stratum `{s}`: codimension-1 stratum forbidden")
            }
            Violation::DimensionTooLarge { stratum, dim } => {
                write!(f, "stratum `{stratum}`: dimension {dim} not below the total dimension minus one")
            }
            Violation::ZeroDepth(s) => write!(f, "stratum `{s}`: singular strata have depth >= 1"),
            Violation::UnknownClosureMember { stratum, member } => {
                write!(f, "stratum `{stratum}`: closure lists unknown stratum `{member}`")
            }
            Violation::SelfClosure(s) => write!(f, "stratum `{s}`: closure lists itself"),
            Violation::ClosureDimension { stratum, member } => write!(
                f,
                "stratum `{stratum}`: closure member `{member}` must have strictly smaller dimension"
            ),
            Violation::ClosureCycle(names) => {
                write!(f, "closure relation has a cycle through {}", names.join(", "))
            }
            Violation::DepthMismatch {
                stratum,
                declared,
                computed,
            } => write!(
                f,
                "stratum `{stratum}`: depth must increase along closure chains (declared {declared}, longest chain gives {computed})"
            ),
        }
    }
}

/// A spec that passed [`validate`]. Immutable.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedSpace {
    spec: StratifiedSpaceSpec,
}

/// Read-only view of a singular stratum of a validated space.
#[derive(Clone, Copy, Debug)]
pub struct StratumView<'a> {
    pub name: &'a str,
    pub dim: usize,
    pub codim: usize,
    pub depth: usize,
    /// The exponent `c_codim` assigned to this stratum.
    pub c: f64,
}

impl ValidatedSpace {
    pub fn spec(&self) -> &StratifiedSpaceSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.m
    }

    pub fn exponent(&self, codim: usize) -> f64 {
        self.spec.c_hat[codim - 2]
    }

    pub fn strata(&self) -> impl Iterator<Item = StratumView<'_>> + '_ {
        self.spec.strata.iter().map(move |s| {
            let codim = self.spec.m - s.dim;
            StratumView {
                name: &s.name,
                dim: s.dim,
                codim,
                depth: s.depth,
                c: self.exponent(codim),
            }
        })
    }

    /// Depth of the space: the maximal stratum depth, 0 for a manifold.
    pub fn depth(&self) -> usize {
        self.spec.strata.iter().map(|s| s.depth).max().unwrap_or(0)
    }
}

impl StratifiedSpaceSpec {
    /// Compact `n`-manifold with a single isolated conical point of exponent `c`.
    pub fn conic(n: usize, c: f64) -> Self {
        StratifiedSpaceSpec {
            name: format!("conic{n}"),
            m: n,
            c_hat: vec![c; n.saturating_sub(1)],
            strata: vec![Stratum {
                name: "p".into(),
                dim: 0,
                depth: 1,
                closure_contains: vec![],
            }],
        }
    }

    /// Renders the spec in the line format accepted by [`parse_space_spec`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# space {}\n", self.name));
        out.push_str(&format!("dim {}\n", self.m));
        out.push('c');
        for c in &self.c_hat {
            out.push_str(&format!(" {c:?}"));
        }
        out.push('\n');
        for s in &self.strata {
            out.push_str(&format!(
                "stratum {} dim={} depth={}",
                s.name, s.dim, s.depth
            ));
            if !s.closure_contains.is_empty() {
                out.push_str(&format!(" closure={}", s.closure_contains.join(",")));
            }
            out.push('\n');
        }
        out
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

/// Parses a space file. The `name` of the result is taken from a leading
/// `# space <name>` comment when present, otherwise it is `"space"`.
pub fn parse_space_spec(text: &str) -> Result<StratifiedSpaceSpec, ParseError> {
    let mut name = None;
    let mut m: Option<(usize, usize)> = None;
    let mut c_hat: Option<(usize, Vec<f64>)> = None;
    let mut strata: Vec<(usize, Stratum)> = Vec::new();
    let mut seen = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if name.is_none() {
                if let Some(n) = comment.trim().strip_prefix("space ") {
                    name = Some(n.trim().to_string());
                }
            }
            continue;
        }
        let line = match line.find('#') {
            Some(pos) => line[..pos].trim(),
            None => line,
        };
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap_or_default();
        match key {
            "dim" => {
                if m.is_some() {
                    return Err(ParseError::new(line_no, "duplicate `dim` line"));
                }
                let v = tokens
                    .next()
                    .ok_or_else(|| ParseError::new(line_no, "`dim` needs a value"))?;
                let v: usize = v
                    .parse()
                    .map_err(|_| ParseError::new(line_no, format!("malformed dimension `{v}`")))?;
                if v == 0 {
                    return Err(ParseError::new(line_no, "dimension must be positive"));
                }
                if let Some(extra) = tokens.next() {
                    return Err(ParseError::new(
                        line_no,
                        format!("unexpected token `{extra}`"),
                    ));
                }
                m = Some((line_no, v));
            }
            "c" => {
                if c_hat.is_some() {
                    return Err(ParseError::new(line_no, "duplicate `c` line"));
                }
                let mut values = Vec::new();
                for t in tokens {
                    let v: f64 = t
                        .parse()
                        .map_err(|_| ParseError::new(line_no, format!("malformed number `{t}`")))?;
                    if !(v.is_finite() && v > 0.0) {
                        return Err(ParseError::new(
                            line_no,
                            format!("exponent `{t}` must be positive"),
                        ));
                    }
                    values.push(v);
                }
                c_hat = Some((line_no, values));
            }
            "stratum" => {
                let sname = tokens
                    .next()
                    .ok_or_else(|| ParseError::new(line_no, "`stratum` needs a name"))?;
                if !valid_name(sname) || sname.contains('=') {
                    return Err(ParseError::new(
                        line_no,
                        format!("invalid stratum name `{sname}`"),
                    ));
                }
                let mut dim = None;
                let mut depth = None;
                let mut closure = Vec::new();
                for t in tokens {
                    let (k, v) = t.split_once('=').ok_or_else(|| {
                        ParseError::new(line_no, format!("expected key=value, got `{t}`"))
                    })?;
                    match k {
                        "dim" => {
                            dim = Some(v.parse::<usize>().map_err(|_| {
                                ParseError::new(line_no, format!("malformed dimension `{v}`"))
                            })?)
                        }
                        "depth" => {
                            depth = Some(v.parse::<usize>().map_err(|_| {
                                ParseError::new(line_no, format!("malformed depth `{v}`"))
                            })?)
                        }
                        "closure" => {
                            for member in v.split(',') {
                                if !valid_name(member) {
                                    return Err(ParseError::new(
                                        line_no,
                                        format!("invalid closure member `{member}`"),
                                    ));
                                }
                                closure.push(member.to_string());
                            }
                        }
                        other => {
                            return Err(ParseError::new(line_no, format!("unknown key `{other}`")))
                        }
                    }
                }
                let dim =
                    dim.ok_or_else(|| ParseError::new(line_no, "stratum is missing `dim=`"))?;
                let depth =
                    depth.ok_or_else(|| ParseError::new(line_no, "stratum is missing `depth=`"))?;
                if seen.insert(sname.to_string(), line_no).is_some() {
                    return Err(ParseError::new(
                        line_no,
                        format!("duplicate stratum name `{sname}`"),
                    ));
                }
                strata.push((
                    line_no,
                    Stratum {
                        name: sname.to_string(),
                        dim,
                        depth,
                        closure_contains: closure,
                    },
                ));
            }
            other => return Err(ParseError::new(line_no, format!("unknown key `{other}`"))),
        }
    }

    let (_, m) =
        m.ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing `dim` line"))?;
    let (c_line, c_hat) =
        c_hat.ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing `c` line"))?;
    if c_hat.len() != m - 1 {
        return Err(ParseError::new(
            c_line,
            format!(
                "c_hat length mismatch: expected {}, found {}",
                m - 1,
                c_hat.len()
            ),
        ));
    }
    for (line_no, s) in &strata {
        if s.dim + 1 == m {
            return Err(ParseError::new(
                *line_no,
                Violation::CodimensionOne(s.name.clone()).to_string(),
            ));
        }
        if s.dim + 1 > m {
            return Err(ParseError::new(
                *line_no,
                Violation::DimensionTooLarge {
                    stratum: s.name.clone(),
                    dim: s.dim,
                }
                .to_string(),
            ));
        }
    }
    Ok(StratifiedSpaceSpec {
        name: name.unwrap_or_else(|| "space".to_string()),
        m,
        c_hat,
        strata: strata.into_iter().map(|(_, s)| s).collect(),
    })
}

/// Longest-chain depths over the closure relation. `Err` carries the strata
/// lying on a cycle.
fn chain_depths(strata: &[Stratum]) -> Result<BTreeMap<&str, usize>, Vec<String>> {
    let names: BTreeSet<&str> = strata.iter().map(|s| s.name.as_str()).collect();
    // Edges S -> Z for Z in closure(S); depth(Z) >= depth(S) + 1.
    let mut indegree: BTreeMap<&str, usize> = names.iter().map(|n| (*n, 0)).collect();
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in strata {
        let members: BTreeSet<&str> = s
            .closure_contains
            .iter()
            .map(String::as_str)
            .filter(|z| names.contains(z) && *z != s.name)
            .collect();
        for z in members {
            *indegree.get_mut(z).expect("known name") += 1;
            children.entry(s.name.as_str()).or_default().push(z);
        }
    }
    let mut depth: BTreeMap<&str, usize> = names.iter().map(|n| (*n, 1)).collect();
    let mut ready: Vec<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    let mut done = 0;
    while let Some(n) = ready.pop() {
        done += 1;
        let d = depth[n];
        for &z in children.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            let e = depth.get_mut(z).expect("known name");
            *e = (*e).max(d + 1);
            let deg = indegree.get_mut(z).expect("known name");
            *deg -= 1;
            if *deg == 0 {
                ready.push(z);
            }
        }
    }
    if done == names.len() {
        Ok(depth)
    } else {
        Err(indegree
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(n, _)| n.to_string())
            .collect())
    }
}

/// Checks every axiom the combinatorial model can express and reports all
/// violations, sorted, or the validated space.
pub fn validate(spec: &StratifiedSpaceSpec) -> Result<ValidatedSpace, Vec<Violation>> {
    let mut v = BTreeSet::new();
    let m = spec.m;
    if m == 0 {
        v.insert(Violation::NonPositiveDimension);
    }
    if spec.c_hat.len() != m.saturating_sub(1) {
        v.insert(Violation::CHatLength {
            expected: m.saturating_sub(1),
            found: spec.c_hat.len(),
        });
    }
    for (i, c) in spec.c_hat.iter().enumerate() {
        if !(c.is_finite() && *c > 0.0) {
            v.insert(Violation::NonPositiveExponent { codim: i + 2 });
        }
    }
    let mut by_name: HashMap<&str, &Stratum> = HashMap::new();
    for s in &spec.strata {
        if by_name.insert(s.name.as_str(), s).is_some() {
            v.insert(Violation::DuplicateStratum(s.name.clone()));
        }
        if m > 0 && s.dim + 1 == m {
            v.insert(Violation::CodimensionOne(s.name.clone()));
        } else if s.dim + 2 > m {
            v.insert(Violation::DimensionTooLarge {
                stratum: s.name.clone(),
                dim: s.dim,
            });
        }
        if s.depth == 0 {
            v.insert(Violation::ZeroDepth(s.name.clone()));
        }
    }
    for s in &spec.strata {
        for member in &s.closure_contains {
            if *member == s.name {
                v.insert(Violation::SelfClosure(s.name.clone()));
                continue;
            }
            match by_name.get(member.as_str()) {
                None => {
                    v.insert(Violation::UnknownClosureMember {
                        stratum: s.name.clone(),
                        member: member.clone(),
                    });
                }
                Some(z) if z.dim >= s.dim => {
                    v.insert(Violation::ClosureDimension {
                        stratum: s.name.clone(),
                        member: member.clone(),
                    });
                }
                Some(_) => {}
            }
        }
    }
    match chain_depths(&spec.strata) {
        Ok(depths) => {
            for s in &spec.strata {
                let computed = depths[s.name.as_str()];
                if s.depth != 0 && s.depth != computed {
                    v.insert(Violation::DepthMismatch {
                        stratum: s.name.clone(),
                        declared: s.depth,
                        computed,
                    });
                }
            }
        }
        Err(cycle) => {
            v.insert(Violation::ClosureCycle(cycle));
        }
    }
    if v.is_empty() {
        Ok(ValidatedSpace { spec: spec.clone() })
    } else {
        Err(v.into_iter().collect())
    }
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid space: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Parse and validate in one step.
pub fn load_space(text: &str) -> Result<ValidatedSpace, SpaceError> {
    let spec = parse_space_spec(text)?;
    validate(&spec).map_err(SpaceError::Invalid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stratum(name: &str, dim: usize, depth: usize, closure: &[&str]) -> Stratum {
        Stratum {
            name: name.into(),
            dim,
            depth,
            closure_contains: closure.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn minimal_document() {
        let spec = parse_space_spec("dim 4\nc 1 1 1\nstratum p dim=0 depth=1\n").unwrap();
        assert_eq!(spec.m, 4);
        assert_eq!(spec.c_hat, vec![1.0; 3]);
        assert_eq!(spec.strata.len(), 1);
        let space = validate(&spec).unwrap();
        let p = space.strata().next().unwrap();
        assert_eq!((p.codim, p.depth, p.c), (4, 1, 1.0));
    }

    #[test]
    fn codim_one_is_a_parse_error() {
        let err = parse_space_spec("dim 4\nc 1 1 1\nstratum w dim=3 depth=1\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.reason.contains("codimension-1"), "{err}");
    }

    #[test]
    fn c_hat_arity() {
        let err = parse_space_spec("dim 4\nc 1 1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.reason.contains("c_hat length mismatch"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("dim 4\nc 1 x 1\n", 2, "malformed number"),
            (
                "dim 4\nc 1 1 1\nstratum p dim=0 depth=1\nstratum p dim=1 depth=1\n",
                4,
                "duplicate",
            ),
            ("c 1 1 1\nstratum p dim=0 depth=1\n", 2, "missing `dim`"),
            (
                "dim 4\nc 1 1 1\nstratum p dim=0 depth=1 colour=red\n",
                3,
                "unknown key",
            ),
            ("dim 4\nc 1 1 1\nshape torus\n", 3, "unknown key"),
            ("dim 4\nc 1 1 1\nstratum p depth=1\n", 3, "missing `dim=`"),
            ("dim four\n", 1, "malformed"),
        ];
        for (text, line, needle) in cases {
            let err = parse_space_spec(text).unwrap_err();
            assert_eq!(err.line, line, "{text:?}: {err}");
            assert!(err.reason.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# space demo\n\ndim 3 # total\nc 0.5 2\nstratum p dim=0 depth=1 # apex\n";
        let spec = parse_space_spec(text).unwrap();
        assert_eq!(spec.name, "demo");
        assert_eq!(spec.c_hat, vec![0.5, 2.0]);
    }

    #[test]
    fn codim_one_violation_from_struct() {
        let spec = StratifiedSpaceSpec {
            name: "x".into(),
            m: 5,
            c_hat: vec![1.0; 4],
            strata: vec![stratum("w", 4, 1, &[])],
        };
        let v = validate(&spec).unwrap_err();
        assert_eq!(v, vec![Violation::CodimensionOne("w".into())]);
        assert!(v[0].to_string().contains("codimension-1 stratum forbidden"));
    }

    #[test]
    fn inverted_depths_are_reported() {
        // Z lies in the closure of Y, so the chain regular > Y > Z gives
        // depth(Y) = 1 and depth(Z) = 2, the opposite of what is declared.
        let spec = StratifiedSpaceSpec {
            name: "x".into(),
            m: 6,
            c_hat: vec![1.0; 5],
            strata: vec![stratum("Y", 2, 2, &["Z"]), stratum("Z", 0, 1, &[])],
        };
        let v = validate(&spec).unwrap_err();
        assert_eq!(
            v,
            vec![
                Violation::DepthMismatch {
                    stratum: "Y".into(),
                    declared: 2,
                    computed: 1
                },
                Violation::DepthMismatch {
                    stratum: "Z".into(),
                    declared: 1,
                    computed: 2
                },
            ]
        );
        let fixed = StratifiedSpaceSpec {
            strata: vec![stratum("Y", 2, 1, &["Z"]), stratum("Z", 0, 2, &[])],
            ..spec
        };
        let space = validate(&fixed).unwrap();
        assert_eq!(space.depth(), 2);
    }

    #[test]
    fn all_violations_are_collected() {
        let spec = StratifiedSpaceSpec {
            name: "x".into(),
            m: 5,
            c_hat: vec![1.0, -1.0, 1.0, 1.0],
            strata: vec![
                stratum("a", 4, 1, &[]),
                stratum("b", 1, 1, &["ghost", "b", "c"]),
                stratum("c", 2, 1, &[]),
            ],
        };
        let v = validate(&spec).unwrap_err();
        assert!(v.contains(&Violation::NonPositiveExponent { codim: 3 }));
        assert!(v.contains(&Violation::CodimensionOne("a".into())));
        assert!(v.contains(&Violation::SelfClosure("b".into())));
        assert!(v.contains(&Violation::UnknownClosureMember {
            stratum: "b".into(),
            member: "ghost".into()
        }));
        assert!(v.contains(&Violation::ClosureDimension {
            stratum: "b".into(),
            member: "c".into()
        }));
        assert!(v.contains(&Violation::DepthMismatch {
            stratum: "c".into(),
            declared: 1,
            computed: 2
        }));
    }

    #[test]
    fn cycles_are_detected() {
        let spec = StratifiedSpaceSpec {
            name: "x".into(),
            m: 6,
            c_hat: vec![1.0; 5],
            strata: vec![stratum("a", 2, 1, &["b"]), stratum("b", 1, 2, &["a"])],
        };
        let v = validate(&spec).unwrap_err();
        assert!(v.contains(&Violation::ClosureCycle(vec!["a".into(), "b".into()])));
    }

    #[test]
    fn conic_builder_validates() {
        let space = validate(&StratifiedSpaceSpec::conic(3, 0.7)).unwrap();
        let p = space.strata().next().unwrap();
        assert_eq!((p.codim, p.c), (3, 0.7));
    }

    fn arb_space() -> impl Strategy<Value = StratifiedSpaceSpec> {
        (3usize..9)
            .prop_flat_map(|m| {
                (
                    Just(m),
                    proptest::collection::vec(0.05f64..5.0, m - 1),
                    proptest::collection::vec((0usize..m - 1, proptest::bits::u8::ANY), 0..6),
                )
            })
            .prop_map(|(m, c_hat, raw)| {
                let mut strata: Vec<Stratum> = raw
                    .iter()
                    .enumerate()
                    .map(|(i, (dim, _))| stratum(&format!("s{i}"), *dim, 1, &[]))
                    .collect();
                // Closure edges only towards strictly smaller dimension.
                for (i, (_, bits)) in raw.iter().enumerate() {
                    for (j, (dj, _)) in raw.iter().enumerate() {
                        if bits & (1 << (j % 8)) != 0 && *dj < strata[i].dim {
                            strata[i].closure_contains.push(format!("s{j}"));
                        }
                    }
                }
                let mut spec = StratifiedSpaceSpec {
                    name: "rand".into(),
                    m,
                    c_hat,
                    strata,
                };
                let depths: BTreeMap<String, usize> = chain_depths(&spec.strata)
                    .unwrap()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect();
                for s in &mut spec.strata {
                    s.depth = depths[&s.name];
                }
                spec
            })
    }

    proptest! {
        #[test]
        fn text_round_trip(spec in arb_space()) {
            let space = validate(&spec).unwrap();
            let back = parse_space_spec(&space.spec().to_text()).unwrap();
            prop_assert_eq!(back, spec);
        }

        #[test]
        fn codim_bounds(spec in arb_space()) {
            let space = validate(&spec).unwrap();
            for s in space.strata() {
                prop_assert!(s.codim >= 2 && s.codim <= space.dim());
            }
        }

        #[test]
        fn violations_are_order_independent(spec in arb_space(), rot in 0usize..6, bump in 0usize..6) {
            let mut broken = spec.clone();
            if !broken.strata.is_empty() {
                let i = bump % broken.strata.len();
                broken.strata[i].depth += 1;
            }
            let mut permuted = broken.clone();
            let n = permuted.strata.len().max(1);
            permuted.strata.rotate_left(rot % n);
            permuted.strata.reverse();
            prop_assert_eq!(validate(&broken).err(), validate(&permuted).err());
        }
    }
}
