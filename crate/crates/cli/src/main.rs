//! `thetaflex`: theta constants, bitangent orbits, hyperflex roots and divisor
//! classes from the command line.
//!
//! Exit codes: 0 success, 2 malformed input, 3 numerical failure (precision or
//! hyperelliptic guard), 4 no root in the bracket, 5 inconclusive fit or
//! cancellation check, 1 anything else.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use commands::FormChoice;
use config::{Format, RunConfig, DEFAULT_CAP, DEFAULT_MAX_RADIUS, DEFAULT_TOL};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use thetaflex::Error;

#[derive(Parser)]
#[command(name = "thetaflex", version, about = "Genus-three theta constants, hyperflex and Clebsch modular forms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Absolute error target for theta sums.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Largest extent of the theta summation ellipsoid.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_RADIUS)]
    max_radius: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Live-monomial cap for symbolic expansions.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    monomial_cap: usize,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Theta constant (and gradient, for odd m) at a period matrix.
    Theta {
        /// Characteristic as two octal digits, e.g. 77.
        #[arg(long = "char")]
        characteristic: String,
        /// JSON file {"re": [[..]], "im": [[..]]}.
        #[arg(long)]
        tau: PathBuf,
    },
    /// Odd/even counts and their splits on a boundary divisor and a subspace.
    Orbits {
        #[arg(long, default_value = "04")]
        boundary: String,
        /// V0, V1, or two labels "n1,n2".
        #[arg(long, default_value = "V0")]
        subspace: String,
    },
    /// Locates a zero of the hyperflex form along τ(t) = i(I + tS) and tests the line a = 0.
    Hyperflex {
        /// Upper triangle s11,s12,s13,s22,s23,s33 of S; random from --seed if omitted.
        #[arg(long, value_delimiter = ',')]
        direction: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5])]
        bracket: Vec<f64>,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = FormChoice::Corrected)]
        form: FormChoice,
        /// Also compare Ψ with the theta expressions near the root.
        #[arg(long)]
        verify_psi: bool,
        /// Path offset of the comparison point.
        #[arg(long, default_value_t = 0.05)]
        offset: f64,
    },
    /// Divisor classes of the hyperflex locus and (optionally) the Clebsch locus.
    Classes {
        #[arg(long)]
        show_exponents: bool,
        /// Clebsch class from streaming expansions on the boundary.
        #[arg(long)]
        clebsch: bool,
        /// Full symbolic expansion of det Cat₂ with monomial statistics.
        #[arg(long)]
        expand: bool,
    },
    /// Log-log slopes of Ω77 near the corner of a banana family.
    Banana {
        /// JSON parameter set; defaults if omitted.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Largest residual accepted for each fit.
        #[arg(long, default_value_t = 0.05)]
        fit_tol: f64,
        /// Samples per fit.
        #[arg(long, default_value_t = thetaflex::boundary::DEFAULT_BANANA_POINTS)]
        points: usize,
    },
    /// Catalecticant determinant and Clebsch verdict for a quartic.
    Catalecticant {
        /// JSON list of {"exponents": [i, j, k], "re": .., "im": ..}.
        #[arg(long)]
        quartic: Option<PathBuf>,
        /// Use the quartic reconstructed from this period matrix.
        #[arg(long)]
        tau: Option<PathBuf>,
        /// Threshold on |det| / max|entry|⁶.
        #[arg(long, default_value_t = 1e-8)]
        clebsch_tol: f64,
    },
}

#[derive(Serialize)]
struct Versions {
    thetaflex: &'static str,
    cli: &'static str,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    versions: Versions,
    config: &'a RunConfig,
    result: T,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Domain(_)
        | Error::InvalidElement(_)
        | Error::InvalidBoundaryLabel(_)
        | Error::InvalidSubspace(_)
        | Error::UnsupportedDimension(_)
        | Error::ParameterRange(_)
        | Error::Precondition(_) => 2,
        Error::PrecisionExhausted(_) | Error::HyperellipticProximity(_) => 3,
        Error::RootNotBracketed(_) => 4,
        Error::Inconclusive(_) => 5,
        _ => 1,
    }
}

fn emit<T: Serialize>(cfg: &RunConfig, command: &str, result: T, table: impl FnOnce(&T)) -> thetaflex::Result<()> {
    match cfg.format {
        Format::Json => {
            let r = Report { command, versions: Versions { thetaflex: thetaflex::VERSION, cli: env!("CARGO_PKG_VERSION") }, config: cfg, result };
            let s = serde_json::to_string_pretty(&r).map_err(|e| Error::InternalConsistency(e.to_string()))?;
            // a closed pipe on the reader's side is not our failure
            let _ = writeln!(std::io::stdout(), "{s}");
        }
        Format::Table => {
            table(&result);
            println!("seed {}  tol {:e}  max-radius {}", cfg.seed, cfg.tol, cfg.max_radius);
        }
    }
    Ok(())
}

fn cval(c: &thetaflex::theta::CertifiedComplex) -> String {
    format!("{:+.12e} {:+.12e}i  (err {:.1e})", c.value.re, c.value.im, c.err)
}

fn run(cli: Cli) -> thetaflex::Result<()> {
    let g = &cli.global;
    let format = if g.json { Format::Json } else { g.format };
    let cfg = RunConfig::new(g.tol, g.max_radius, g.seed, g.monomial_cap, format)?;
    match cli.command {
        Command::Theta { characteristic, tau } => {
            let r = commands::theta(&cfg, &characteristic, &tau)?;
            emit(&cfg, "theta", r, |r| {
                println!("θ{}  parity {:+}", r.characteristic, r.parity);
                println!("value     {}", cval(&r.value));
                if let Some(gr) = &r.gradient {
                    for (k, c) in gr.components.iter().enumerate() {
                        println!("∂{}θ       {}", k + 1, cval(c));
                    }
                }
            })
        }
        Command::Orbits { boundary, subspace } => {
            let r = commands::orbits(&boundary, &subspace)?;
            emit(&cfg, "orbits", r, |r| {
                let c = &r.counts;
                println!("odd {}  even {}", c.odd, c.even);
                println!("n = {}: m+n even {}, m+n odd {}", c.boundary, c.boundary_split.0, c.boundary_split.1);
                let (a, b) = c.subspace.generators();
                println!("V = span({a}, {b}): one even coset {}, three even {}", c.subspace_split.0, c.subspace_split.1);
                println!("pair orbits {}  |Sp(6, F2)| {}", r.pair_orbits, r.group_order);
            })
        }
        Command::Hyperflex { direction, bracket, samples, form, verify_psi, offset } => {
            let direction = match direction {
                None => None,
                Some(d) => Some(<[f64; 6]>::try_from(d.as_slice()).map_err(|_| Error::Parse(format!("--direction needs 6 values, got {}", d.len())))?),
            };
            let [a, b] = bracket[..] else {
                return Err(Error::Parse(format!("--bracket needs 2 values, got {}", bracket.len())));
            };
            let args = commands::HyperflexArgs {
                direction,
                bracket: (a, b),
                samples,
                form,
                verify_psi,
                offset,
            };
            let r = commands::hyperflex(&cfg, &args)?;
            emit(&cfg, "hyperflex", r, |r| {
                println!("root t = {:.12} {:+.3e}i ({:?}, {} steps)", r.root.t.re, r.root.t.im, r.root.method, r.root.iterations);
                println!("|form| at root {:.3e} (scan max {:.3e})", r.root.value.value.norm(), r.root.scan_max);
                println!(
                    "line a = 0 at root: {:?}, tangency distance {:.3e}, square residual {:.3e}",
                    r.at_root.verdict, r.at_root.tangency_distance, r.at_root.square_residual
                );
                println!("at t = {:.4}: {:?}, tangency distance {:.3e}", r.nearby_t, r.nearby.verdict, r.nearby.tangency_distance);
                println!("hyperflex: {}", r.is_hyperflex);
                if let Some(p) = &r.psi_check {
                    println!("Ψ / (θ66θ73θ41θ50θ04·Ω77) = {:+.9} {:+.9}i  holds: {}", p.printed_ratio[0], p.printed_ratio[1], p.printed_identity_holds);
                    println!("Ψ / ((θ66θ41θ50)²·Ω′)      = {:+.9} {:+.9}i  holds: {}", p.corrected_ratio[0], p.corrected_ratio[1], p.corrected_identity_holds);
                }
            })
        }
        Command::Classes { show_exponents, clebsch, expand } => {
            let r = commands::classes(&cfg, show_exponents, clebsch, expand)?;
            emit(&cfg, "classes", r, |r| {
                println!("hyperflex  {}   (weight {})", r.hyperflex.display, r.hyperflex.weight);
                println!("abelian    {}", r.hyperflex.abelian_display);
                if let Some(e) = &r.exponents {
                    println!("d0 = {}  d1 = {}  p1 = {}  p3 = {}", e.d0, e.d1, e.p1, e.p3);
                    for c in &e.checks {
                        println!(
                            "  min-plus {:?}, {} leading monomials, cancelled {}",
                            c.min_plus_order.map(|o| o.to_string()),
                            c.leading_monomials,
                            c.cancelled
                        );
                    }
                }
                if let Some(c) = &r.clebsch {
                    println!("clebsch    {}   (weight {})", c.class, c.weight);
                    println!(
                        "  δ0 order {} (tropical bound {}, {} leading terms, fitted {}), live per row {:?}",
                        c.delta0.order, c.delta0.tropical_bound, c.delta0.leading_terms, c.delta0_fit.order, c.delta0.stats.live_per_row
                    );
                    println!(
                        "  δ1 order {} (tropical bound {}, {} leading terms, fitted {}), live per row {:?}",
                        c.delta1.order, c.delta1.tropical_bound, c.delta1.leading_terms, c.delta1_fit.order, c.delta1.stats.live_per_row
                    );
                    if let Some(d) = &c.discrepancy {
                        println!("  FALSIFICATION: {d}");
                    }
                }
                if let Some(x) = &r.clebsch_expansion {
                    println!(
                        "det Cat2: {} monomials, symbol counts {:?}, weight {:?}, live per row {:?}, common factor {}",
                        x.monomials,
                        x.symbol_counts,
                        x.weight.map(|w| w.to_string()),
                        x.stats.live_per_row,
                        !x.common_factor.no_common_factor()
                    );
                }
            })
        }
        Command::Banana { params, fit_tol, points } => {
            let (p, r) = commands::banana(params.as_deref(), fit_tol, points)?;
            #[derive(Serialize)]
            struct Out {
                params: thetaflex::boundary::BananaFamilyParams,
                report: thetaflex::boundary::BananaReport,
            }
            emit(&cfg, "banana", Out { params: p, report: r }, |o| {
                let r = &o.report;
                for (name, f) in [
                    ("Ω77 in s1", &r.omega_s1),
                    ("Ω77 in s2", &r.omega_s2),
                    ("Ω77 diagonal", &r.omega_diagonal),
                    ("θ43 in s1", &r.theta_eps1),
                    ("θ33 diagonal", &r.corner_factor),
                ] {
                    println!("{name:<14} slope {:.4}  expected {:.4}  residual {:.2e}", f.slope, f.expected, f.residual);
                }
            })
        }
        Command::Catalecticant { quartic, tau, clebsch_tol } => {
            let r = commands::catalecticant(&cfg, quartic.as_deref(), tau.as_deref(), clebsch_tol)?;
            emit(&cfg, "catalecticant", r, |r| {
                let v = &r.verdict;
                println!("det Cat2   {}", cval(&r.determinant));
                println!("scaled |det| {:.3e}  rank {}  Clebsch {}", v.scaled_det, v.rank, v.is_clebsch);
                println!("singular values {:?}", v.singular_values.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>());
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
