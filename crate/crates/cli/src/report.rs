//! Text and CSV rendering. Floats use 12 significant digits in scientific
//! notation so that identical inputs give identical bytes.

use std::fmt::Write as _;

use qparab::checker::{ConditionReport, QInterval};
use qparab::cone::CutoffTerms;
use qparab::ends::CounterexampleReport;
use qparab::flat::{ComplementRange, TorusSequence};
use qparab::stability::{AlmostComplexReport, TransferReport};

pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn check_text(
    name: &str,
    m: usize,
    report: &ConditionReport,
    interval: &QInterval,
    stochastic: bool,
) -> String {
    let mut out = String::new();
    writeln!(out, "space {name} (dimension {m})").unwrap();
    writeln!(
        out,
        "{:<16} {:>5} {:>19} {:>5} {:>5} {:>19} {:>19}",
        "stratum", "codim", "c", "cond1", "cond2", "margin1", "margin2"
    )
    .unwrap();
    for r in &report.records {
        writeln!(
            out,
            "{:<16} {:>5} {:>19} {:>5} {:>5} {:>19} {:>19}",
            r.stratum,
            r.codim,
            sci(r.c),
            yes_no(r.cond1),
            r.cond2.map_or("-", yes_no),
            sci(r.margin1),
            r.margin2.map_or_else(|| "-".to_string(), sci),
        )
        .unwrap();
    }
    writeln!(out, "admissible q: {interval}").unwrap();
    writeln!(out, "q = {}: {}", report.q, report.verdict).unwrap();
    let mut summary = if report.verdict == qparab::checker::Verdict::Guaranteed {
        format!("{}-parabolic", report.q)
    } else {
        format!("no guarantee at q = {}", report.q)
    };
    if stochastic {
        summary.push_str("; stochastically complete");
    }
    writeln!(out, "{summary}").unwrap();
    out
}

pub fn check_csv(report: &ConditionReport) -> Vec<u8> {
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .map(|r| {
            vec![
                r.stratum.clone(),
                r.codim.to_string(),
                sci(r.c),
                r.cond1.to_string(),
                r.cond2.map_or_else(String::new, |b| b.to_string()),
                sci(r.margin1),
                r.margin2.map_or_else(String::new, sci),
            ]
        })
        .collect();
    to_csv(
        &[
            "stratum", "codim", "c", "cond1", "cond2", "margin1", "margin2",
        ],
        &rows,
    )
}

fn sequence_row(t: &CutoffTerms) -> Vec<String> {
    vec![
        t.n.to_string(),
        sci(t.eps_n.log10()),
        sci(t.epsp_n.log10_abs()),
        sci(t.a.log10_abs()),
        sci(t.b.log10_abs()),
        sci(t.total().log10_abs()),
    ]
}

const SEQUENCE_HEADER: [&str; 6] = [
    "n",
    "log10_eps_n",
    "log10_epsp_n",
    "log10_a",
    "log10_b",
    "log10_total",
];

pub fn sequence_text(terms: &[CutoffTerms], alpha: f64, q: f64) -> String {
    let mut out = String::new();
    writeln!(out, "alpha = {}, q = {}", sci(alpha), q).unwrap();
    writeln!(
        out,
        "{:>6} {:>19} {:>19} {:>19}",
        "n", "log10_a", "log10_b", "log10_total"
    )
    .unwrap();
    for t in terms {
        writeln!(
            out,
            "{:>6} {:>19} {:>19} {:>19}",
            t.n,
            sci(t.a.log10_abs()),
            sci(t.b.log10_abs()),
            sci(t.total().log10_abs())
        )
        .unwrap();
    }
    if alpha >= q - 1.0 {
        writeln!(out, "alpha >= q - 1: the terms tend to 0").unwrap();
    } else {
        writeln!(
            out,
            "alpha < q - 1: the bound diverges; the theorem does not apply"
        )
        .unwrap();
    }
    out
}

pub fn sequence_csv(terms: &[CutoffTerms]) -> Vec<u8> {
    let rows: Vec<_> = terms.iter().map(sequence_row).collect();
    to_csv(&SEQUENCE_HEADER, &rows)
}

pub fn torus_text(seq: &TorusSequence, range: &ComplementRange) -> String {
    let mut out = String::new();
    writeln!(out, "{:>6} {:>19}", "n", "bound").unwrap();
    for r in &seq.rows {
        writeln!(out, "{:>6} {:>19}", r.n, sci(r.total)).unwrap();
    }
    writeln!(out, "nonincreasing from n = {}", seq.monotone_from).unwrap();
    writeln!(out, "complement: {range}").unwrap();
    out
}

pub fn torus_csv(seq: &TorusSequence) -> Vec<u8> {
    let count = seq.rows.first().map_or(0, |r| r.contributions.len());
    let mut header = vec!["n".to_string(), "bound".to_string()];
    header.extend((0..count).map(|i| format!("contrib_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = seq
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string(), sci(r.total)];
            row.extend(r.contributions.iter().map(|&c| sci(c)));
            row
        })
        .collect();
    to_csv(&header, &rows)
}

pub fn stability_text(report: &TransferReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "q = {}, threshold = {}",
        report.q,
        sci(report.threshold)
    )
    .unwrap();
    for (id, s) in &report.points {
        writeln!(
            out,
            "{:<16} s = {}  {}",
            id,
            sci(*s),
            report.point_verdict(*s)
        )
        .unwrap();
    }
    writeln!(out, "sup s = {}: {}", sci(report.sup), report.verdict).unwrap();
    out
}

pub fn stability_csv(report: &TransferReport) -> Vec<u8> {
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|(id, s)| vec![id.clone(), sci(*s), report.point_verdict(*s).to_string()])
        .collect();
    to_csv(&["point", "s", "verdict"], &rows)
}

pub fn almost_complex_text(reports: &[AlmostComplexReport], c: f64) -> String {
    let mut out = String::new();
    writeln!(out, "almost-complex check, c = {}", sci(c)).unwrap();
    for r in reports {
        writeln!(
            out,
            "{:<16} s = {}  bound = {}  commutes {}  paired {}  within bound {}",
            r.id,
            sci(r.s),
            sci(r.bound),
            yes_no(r.commutes),
            yes_no(r.paired),
            yes_no(r.within_bound)
        )
        .unwrap();
    }
    out
}

pub fn counterexample_text(report: &CounterexampleReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "h <= c g with c = {}, but the 2-parabolicity of g does not pass to h",
        report.comparison_constant
    )
    .unwrap();
    writeln!(out, "members:").unwrap();
    for m in &report.members {
        writeln!(
            out,
            "  {:<5} {:<20} {:<9} {:<28} {}",
            m.name,
            m.metric,
            m.profile.end().to_string(),
            m.profile.to_string(),
            m.verdict
        )
        .unwrap();
    }
    writeln!(out, "chain:").unwrap();
    for step in &report.chain {
        writeln!(out, "  {step}").unwrap();
    }
    writeln!(
        out,
        "transfer s(x) for g1 = g, g2 = h, q = 2 (unbounded as x -> 0):"
    )
    .unwrap();
    for (x, s) in &report.transfer {
        writeln!(out, "  x = {}  s = {}", sci(*x), sci(*s)).unwrap();
    }
    out
}
