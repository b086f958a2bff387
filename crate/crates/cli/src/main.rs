//! `qparab`: q-parabolicity checks for stratified spaces and model metrics.
//!
//! Exit status is 0 when the requested guarantee holds, 1 when it does not
//! (or the theorem is silent) and 2 on input errors.

mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qparab::checker::{admissible_q, check_q, stochastic_completeness_flag, Verdict};
use qparab::cone::{
    q1_capacity, radial_capacity_exact, radial_capacity_numeric, sequence_terms, vertex_parabolic,
    Condenser, ConeModel,
};
use qparab::ends::{counterexample_report, end_parabolic, End, EndVerdict, WarpProfile};
use qparab::flat::{complement_q_range, torus_bound_sequence, TorusModel};
use qparab::stability::{almost_complex_check, parse_samples, transfer_bound, TransferVerdict};
use qparab::strata::load_space;

use report::sci;

#[derive(Parser, Debug)]
#[command(
    name = "qparab",
    version,
    about = "q-parabolicity of stratified spaces and model metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the curvature-exponent conditions of a stratified space at q
    Check {
        /// Space description file
        #[arg(long)]
        space: PathBuf,
        /// Exponent q >= 1
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Write per-stratum results as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Radial q-capacity of the condenser eps <= r <= R on a model cone
    Capacity {
        /// Warping exponent c of dr^2 + r^(2c) g_L
        #[arg(long)]
        c: f64,
        /// Link dimension
        #[arg(long)]
        d: usize,
        /// Exponent q >= 1
        #[arg(long)]
        q: f64,
        /// Inner radius
        #[arg(long)]
        eps: f64,
        /// Outer radius
        #[arg(long = "R")]
        outer: f64,
        /// Link volume
        #[arg(long = "V", default_value_t = 1.0)]
        volume: f64,
        /// Also solve the discrete problem on this many log-spaced cells
        #[arg(long = "N")]
        grid: Option<usize>,
    },
    /// Log10 of the cutoff energy terms a_n, b_n for n = 2..n_max
    Sequence {
        #[arg(long)]
        c: f64,
        /// Link dimension k
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: f64,
        #[arg(long = "n-max", default_value_t = 50)]
        n_max: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cutoff-norm bounds on a flat torus with coordinate subtori removed
    Torus {
        /// Torus dimension
        #[arg(long)]
        m: usize,
        /// Codimensions of the removed subtori, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        codims: Vec<usize>,
        #[arg(long)]
        q: f64,
        #[arg(long = "n-max", default_value_t = 100)]
        n_max: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Transfer bound s = det(A)^(1/2) |A^-1|^(q/2) over sampled metric pairs
    Stability {
        /// Sample file: id, then row-major G1, G2 and optionally J per line
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Largest s accepted as bounded
        #[arg(long, default_value_t = 1e6)]
        threshold: f64,
        /// Run the almost-complex check with comparison constant c (q = 2)
        #[arg(long = "almost-complex")]
        almost_complex: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Parabolicity of a warped end dr^2 + phi(r)^2 g_L with phi = C r^a e^(b r)
    Ends {
        #[arg(long = "phi-C", default_value_t = 1.0)]
        phi_c: f64,
        #[arg(long = "phi-a", default_value_t = 0.0, allow_hyphen_values = true)]
        phi_a: f64,
        #[arg(long = "phi-b", default_value_t = 0.0, allow_hyphen_values = true)]
        phi_b: f64,
        #[arg(long, value_enum)]
        end: EndArg,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
    },
    /// A metric below a 2-parabolic one that is not 2-parabolic
    Counterexample,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EndArg {
    Vertex,
    Infinity,
}

struct Outcome {
    text: String,
    csv: Option<(PathBuf, Vec<u8>)>,
    success: bool,
}

fn csv_target(
    path: Option<PathBuf>,
    bytes: impl FnOnce() -> Vec<u8>,
) -> Option<(PathBuf, Vec<u8>)> {
    path.map(|p| (p, bytes()))
}

fn run(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Check { space, q, csv } => {
            let text = fs::read_to_string(&space)
                .map_err(|e| format!("--space {}: {e}", space.display()))?;
            let space = load_space(&text).map_err(|e| format!("--space: {e}"))?;
            let report = check_q(&space, q);
            if report.verdict == Verdict::InvalidInput {
                return Err(format!("--q: must be a finite number >= 1, got {q}"));
            }
            let interval = admissible_q(&space).map_err(|e| e.to_string())?;
            let stochastic = stochastic_completeness_flag(&space);
            let text = report::check_text(
                &space.spec().name,
                space.dim(),
                &report,
                &interval,
                stochastic,
            );
            Ok(Outcome {
                csv: csv_target(csv, || report::check_csv(&report)),
                text,
                success: report.verdict == Verdict::Guaranteed,
            })
        }
        Command::Capacity {
            c,
            d,
            q,
            eps,
            outer,
            volume,
            grid,
        } => {
            let cone = ConeModel::new(c, d, volume).map_err(|e| format!("--c/--d/--V: {e}"))?;
            let cond = Condenser::new(eps, outer).map_err(|e| format!("--eps/--R: {e}"))?;
            if !(q.is_finite() && q >= 1.0) {
                return Err(format!("--q: must be a finite number >= 1, got {q}"));
            }
            let mut text = String::new();
            let exact = if q == 1.0 {
                q1_capacity(&cone, &cond)
            } else {
                radial_capacity_exact(&cone, q, &cond).map_err(|e| e.to_string())?
            };
            text.push_str(&format!("alpha = c d = {}\n", sci(cone.alpha())));
            text.push_str(&format!("capacity = {}\n", sci(exact)));
            if let Some(n) = grid {
                if q == 1.0 {
                    return Err("--N: the discrete solver needs q > 1".into());
                }
                let num =
                    radial_capacity_numeric(&cone, q, &cond, n).map_err(|e| format!("--N: {e}"))?;
                text.push_str(&format!("discrete capacity (N = {n}) = {}\n", sci(num)));
            }
            let parabolic = vertex_parabolic(&cone, q);
            text.push_str(if parabolic {
                "vertex: parabolic (capacity -> 0 as eps -> 0)\n"
            } else {
                "vertex: non-parabolic (capacity stays positive as eps -> 0)\n"
            });
            Ok(Outcome {
                text,
                csv: None,
                success: parabolic,
            })
        }
        Command::Sequence {
            c,
            k,
            q,
            n_max,
            csv,
        } => {
            if !(c.is_finite() && c > 0.0) {
                return Err(format!("--c: must be positive, got {c}"));
            }
            if k == 0 {
                return Err("--k: link dimension must be at least 1".into());
            }
            if !(q.is_finite() && q >= 1.0) {
                return Err(format!("--q: must be a finite number >= 1, got {q}"));
            }
            if n_max < 2 {
                return Err(format!("--n-max: must be at least 2, got {n_max}"));
            }
            let terms: Vec<_> = (2..=n_max).map(|n| sequence_terms(n, q, c, k)).collect();
            let alpha = c * k as f64;
            Ok(Outcome {
                text: report::sequence_text(&terms, alpha, q),
                csv: csv_target(csv, || report::sequence_csv(&terms)),
                success: alpha >= q - 1.0,
            })
        }
        Command::Torus {
            m,
            codims,
            q,
            n_max,
            csv,
        } => {
            let model =
                TorusModel::from_codims(m, &codims).map_err(|e| format!("--codims: {e}"))?;
            let seq = torus_bound_sequence(&model, q, n_max).map_err(|e| format!("--q: {e}"))?;
            let range = complement_q_range(&model);
            Ok(Outcome {
                text: report::torus_text(&seq, &range),
                csv: csv_target(csv, || report::torus_csv(&seq)),
                success: true,
            })
        }
        Command::Stability {
            samples,
            q,
            threshold,
            almost_complex,
            csv,
        } => {
            let text = fs::read_to_string(&samples)
                .map_err(|e| format!("--samples {}: {e}", samples.display()))?;
            let pairs = parse_samples(&text).map_err(|e| format!("--samples: {e}"))?;
            if !(q.is_finite() && q >= 1.0) {
                return Err(format!("--q: must be a finite number >= 1, got {q}"));
            }
            let transfer =
                transfer_bound(&pairs, q, threshold).map_err(|e| format!("--samples: {e}"))?;
            let mut out = report::stability_text(&transfer);
            let mut success = transfer.verdict == TransferVerdict::Guaranteed;
            if let Some(c) = almost_complex {
                if q != 2.0 {
                    return Err("--almost-complex: only defined for q = 2".into());
                }
                let reports = pairs
                    .iter()
                    .map(|p| almost_complex_check(p, c))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| format!("--almost-complex: {e}"))?;
                out.push_str(&report::almost_complex_text(&reports, c));
                success &= reports.iter().all(|r| r.passed());
            }
            Ok(Outcome {
                text: out,
                csv: csv_target(csv, || report::stability_csv(&transfer)),
                success,
            })
        }
        Command::Ends {
            phi_c,
            phi_a,
            phi_b,
            end,
            d,
            q,
        } => {
            let end = match end {
                EndArg::Vertex => End::Vertex,
                EndArg::Infinity => End::Infinity,
            };
            let profile = WarpProfile::new(phi_c, phi_a, phi_b, end, d, 1.0)
                .map_err(|e| format!("--phi-*: {e}"))?;
            let verdict = end_parabolic(&profile, q).map_err(|e| format!("--q: {e}"))?;
            Ok(Outcome {
                text: format!("{profile}, end at {end}, d = {d}, q = {q}: {verdict}\n"),
                csv: None,
                success: verdict == EndVerdict::Parabolic,
            })
        }
        Command::Counterexample => Ok(Outcome {
            text: report::counterexample_text(&counterexample_report()),
            csv: None,
            success: true,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            if let Some((path, bytes)) = &outcome.csv {
                if let Err(e) = fs::write(path, bytes) {
                    eprintln!("error: --csv {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            print!("{}", outcome.text);
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
