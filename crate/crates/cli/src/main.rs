//! Command-line front-end: every subcommand reads inputs, runs the
//! corresponding library operation and prints a single JSON document on
//! stdout. Diagnostics go to stderr.
//!
//! Exit codes: 0 success; 1 invalid input; 2 inadmissible or
//! not-realizable configuration; 3 resource cap hit (partial certificate
//! still emitted).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use k3fano::enumerate::{self, Checkpoint, SearchConfig};
use k3fano::fano::ColoredGraph;
use k3fano::{arith, mwl, nsmodel, polarize};

#[derive(Parser)]
#[command(
    name = "k3fano",
    about = "Exact lattice and graph computations for rational curves on quasi-polarized K3 surfaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a colored graph as elliptic, parabolic, hyperbolic or
    /// overpositive.
    Classify(ClassifyArgs),
    /// Intrinsic polarization and degree-bound certificate of a graph.
    Polarize(GraphArg),
    /// Certified maximum of the polarization square over parabolic graphs
    /// plus one hyperbolic vertex.
    Bound(BoundArgs),
    /// Enumerate the parabolic graphs under the given caps.
    Enumerate(BoundArgs),
    /// Witness generators for the degree-realization bounds.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Quasi-ampleness report and overlattice checks on the fibration
    /// models.
    NsCheck(NsCheckArgs),
    /// Mordell-Weil heights and pairings from a fibre configuration.
    Mwl(MwlArgs),
    /// Number-theoretic gates.
    #[command(subcommand)]
    Arith(ArithCommand),
}

#[derive(Args)]
struct GraphArg {
    /// Path to a graph JSON file.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Also run the admissibility report for degree 2h.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    h: Option<u64>,
    /// Write a Graphviz rendering to this path.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    d: u32,
    #[arg(long = "max-vertices")]
    max_vertices: usize,
    #[arg(long = "color-budget")]
    color_budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    #[arg(long = "node-limit")]
    node_limit: Option<u64>,
    /// Resumable checkpoint file (created if missing).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Fibration witness for degrees 2h, h >= d^2 - 1.
    Iii(WitnessIiiArgs),
    /// Unconditional witness for degrees 2h, h >= 2d^2 + d + 1.
    Unconditional(WitnessUncArgs),
}

#[derive(Args)]
struct WitnessIiiArgs {
    #[arg(long)]
    d: i64,
    #[arg(long)]
    h: i64,
    #[arg(long)]
    r: usize,
    /// Cross-check every closed formula through the intersection pairing.
    #[arg(long)]
    verify: bool,
    /// Write the fibre-cycle Graphviz rendering to this path.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessUncArgs {
    #[arg(long)]
    d: i64,
    #[arg(long)]
    h: i64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    r: u32,
}

#[derive(Args)]
struct NsCheckArgs {
    /// Check the index-3 overlattice gluing instead of quasi-ampleness.
    #[arg(long = "overlattice-a17")]
    overlattice: bool,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    c0: i64,
    #[arg(long = "N")]
    n: Option<i64>,
    #[arg(long)]
    d: Option<i64>,
}

#[derive(Args)]
struct MwlArgs {
    /// Height/pairing query JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run the height-8 section verification instead.
    #[arg(long)]
    claim: bool,
}

#[derive(Subcommand)]
enum ArithCommand {
    /// Legendre symbol (a/p).
    Legendre {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        p: u64,
    },
    /// Smallest prime not dividing 2d.
    P0 {
        #[arg(long)]
        d: u64,
    },
    /// Shift c0 by multiples of d to a non-square (mod p with --p).
    Shift {
        #[arg(long)]
        c0: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Four-square decomposition.
    FourSquares {
        #[arg(long)]
        c0: u64,
    },
    /// Split r = r1 + r2 + r3 under the witness constraints.
    RSplit {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        p: u64,
    },
    /// Size gate p^2 > 16 c0.
    Gz {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        c0: u64,
    },
    /// Class number and reduced forms of a negative discriminant.
    ClassNumber {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        forms: bool,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_NOT_REALIZABLE: u8 = 2;
const EXIT_RESOURCE_CAP: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if e.downcast_ref::<NotRealizable>().is_some() {
                ExitCode::from(EXIT_NOT_REALIZABLE)
            } else {
                ExitCode::from(EXIT_INVALID)
            }
        }
    }
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn load_graph(path: &PathBuf) -> anyhow::Result<ColoredGraph> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    ColoredGraph::from_json(&text).map_err(|e| match e {
        k3fano::Error::Json(je) => {
            anyhow::anyhow!("{}: malformed graph JSON: {je}", path.display())
        }
        other => anyhow::anyhow!("{}: {other}", path.display()),
    })
}

/// Marker for "the request was well-formed but the configuration is
/// rejected": exit code 2 instead of 1.
#[derive(Debug)]
struct NotRealizable(String);

impl std::fmt::Display for NotRealizable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for NotRealizable {}

fn not_realizable(e: k3fano::Error) -> NotRealizable {
    NotRealizable(e.to_string())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Classify(args) => {
            let graph = load_graph(&args.graph)?;
            if let Some(dot) = &args.dot {
                fs::write(dot, graph.to_dot())?;
            }
            #[derive(Serialize)]
            struct Out {
                schema_version: u32,
                class: String,
                #[serde(skip_serializing_if = "Option::is_none")]
                admissible: Option<bool>,
                #[serde(skip_serializing_if = "Option::is_none")]
                violations: Option<serde_json::Value>,
            }
            let mut out = Out {
                schema_version: 1,
                class: graph.classify().to_string(),
                admissible: None,
                violations: None,
            };
            let mut code = EXIT_OK;
            if let Some(h) = args.h {
                let report = graph.admissible(h);
                out.admissible = Some(report.is_admissible());
                if !report.is_admissible() {
                    code = EXIT_NOT_REALIZABLE;
                }
                out.violations = Some(serde_json::to_value(&report.violations)?);
            }
            emit(&out)?;
            Ok(code)
        }
        Command::Polarize(args) => {
            let graph = load_graph(&args.graph)?;
            emit(&polarize::finiteness_certificate(&graph))?;
            Ok(EXIT_OK)
        }
        Command::Bound(args) => {
            let cfg = search_config(&args);
            let cert = match &args.checkpoint {
                None => enumerate::effective_bound(&cfg)?,
                Some(path) => {
                    let resume = if path.exists() {
                        let text = fs::read_to_string(path)?;
                        Some(serde_json::from_str::<Checkpoint>(&text)?)
                    } else {
                        None
                    };
                    enumerate::effective_bound_resumable(&cfg, resume, |cp| {
                        let tmp = path.with_extension("tmp");
                        fs::write(&tmp, serde_json::to_string(cp).expect("serializable"))
                            .and_then(|_| fs::rename(&tmp, path))
                            .map_err(|e| {
                                k3fano::Error::InvalidInput(format!("checkpoint write: {e}"))
                            })
                    })?
                }
            };
            let exhausted = cert.exhausted;
            emit(&cert)?;
            Ok(if exhausted { EXIT_OK } else { EXIT_RESOURCE_CAP })
        }
        Command::Enumerate(args) => {
            let cfg = search_config(&args);
            let out = enumerate::enumerate_parabolic(&cfg)?;
            #[derive(Serialize)]
            struct Out {
                schema_version: u32,
                count: usize,
                exhausted: bool,
                graphs: Vec<ColoredGraph>,
            }
            let exhausted = out.exhausted;
            emit(&Out {
                schema_version: 1,
                count: out.graphs.len(),
                exhausted,
                graphs: out.graphs,
            })?;
            Ok(if exhausted { EXIT_OK } else { EXIT_RESOURCE_CAP })
        }
        Command::Witness(WitnessCommand::Iii(args)) => {
            let witness = nsmodel::witness_iii(args.d, args.h, args.r).map_err(not_realizable)?;
            if let Some(dot) = &args.dot {
                fs::write(dot, nsmodel::fibre_cycle_dot(args.r))?;
            }
            if args.verify {
                #[derive(Serialize)]
                struct Verified {
                    #[serde(flatten)]
                    witness: nsmodel::WitnessIii,
                    #[serde(rename = "formulaCrossChecks")]
                    cross: Vec<nsmodel::Check>,
                    verified: bool,
                }
                let cross =
                    nsmodel::witness_iii_formula_cross_checks(&witness).map_err(not_realizable)?;
                let verified = cross.iter().all(|c| c.pass) && witness.pass;
                emit(&Verified {
                    witness,
                    cross,
                    verified,
                })?;
                return Ok(if verified { EXIT_OK } else { EXIT_NOT_REALIZABLE });
            }
            let code = if witness.pass { EXIT_OK } else { EXIT_NOT_REALIZABLE };
            emit(&witness)?;
            Ok(code)
        }
        Command::Witness(WitnessCommand::Unconditional(args)) => {
            let witness = nsmodel::witness_unconditional(args.d, args.h, args.p, args.r)
                .map_err(not_realizable)?;
            let code = if witness.pass { EXIT_OK } else { EXIT_NOT_REALIZABLE };
            emit(&witness)?;
            Ok(code)
        }
        Command::NsCheck(args) => {
            if args.overlattice {
                let report = nsmodel::overlattice_a17(args.c0).map_err(not_realizable)?;
                let code = if report.pass { EXIT_OK } else { EXIT_NOT_REALIZABLE };
                emit(&report)?;
                return Ok(code);
            }
            let (Some(r), Some(n), Some(d)) = (args.r, args.n, args.d) else {
                anyhow::bail!("ns-check requires --r, --N and --d (or --overlattice-a17)");
            };
            let report = nsmodel::quasi_ample_check(r, args.c0, n, d).map_err(not_realizable)?;
            let code = if report.pass { EXIT_OK } else { EXIT_NOT_REALIZABLE };
            emit(&report)?;
            Ok(code)
        }
        Command::Mwl(args) => {
            if args.claim {
                let report = mwl::verify_height8_claim();
                let code = if report.pass { EXIT_OK } else { EXIT_NOT_REALIZABLE };
                emit(&report)?;
                return Ok(code);
            }
            let Some(path) = &args.config else {
                anyhow::bail!("mwl requires --config FILE or --claim");
            };
            let text = fs::read_to_string(path)?;
            let query = mwl::parse_query(&text).map_err(|e| match e {
                k3fano::Error::Json(je) => {
                    anyhow::anyhow!("{}: malformed configuration JSON: {je}", path.display())
                }
                other => anyhow::anyhow!("{}: {other}", path.display()),
            })?;
            #[derive(Serialize)]
            struct Out {
                schema_version: u32,
                euler: u32,
                #[serde(rename = "k3Consistent")]
                k3_consistent: bool,
                #[serde(rename = "heightP")]
                height_p: String,
                #[serde(skip_serializing_if = "Option::is_none", rename = "heightQ")]
                height_q: Option<String>,
                #[serde(skip_serializing_if = "Option::is_none")]
                pairing: Option<String>,
            }
            let height_p = mwl::height(&query.cfg, &query.p).map_err(not_realizable)?;
            let (height_q, pairing) = match &query.q {
                None => (None, None),
                Some(q) => (
                    Some(mwl::height(&query.cfg, q).map_err(not_realizable)?.to_string()),
                    Some(
                        mwl::pairing(&query.cfg, &query.p, q, query.pq)
                            .map_err(not_realizable)?
                            .to_string(),
                    ),
                ),
            };
            emit(&Out {
                schema_version: 1,
                euler: query.cfg.euler_total(),
                k3_consistent: query.cfg.k3_consistent(),
                height_p: height_p.to_string(),
                height_q,
                pairing,
            })?;
            Ok(EXIT_OK)
        }
        Command::Arith(cmd) => run_arith(cmd),
    }
}

fn search_config(args: &BoundArgs) -> SearchConfig {
    SearchConfig {
        d: args.d,
        max_vertices: args.max_vertices,
        color_budget: args.color_budget,
        parallelism: args.parallelism,
        node_limit: args.node_limit,
    }
}

fn run_arith(cmd: ArithCommand) -> anyhow::Result<u8> {
    #[derive(Serialize)]
    struct Out<T: Serialize> {
        schema_version: u32,
        #[serde(flatten)]
        value: T,
    }
    fn ok<T: Serialize>(value: T) -> anyhow::Result<u8> {
        println!(
            "{}",
            serde_json::to_string(&Out {
                schema_version: 1,
                value
            })?
        );
        Ok(EXIT_OK)
    }
    match cmd {
        ArithCommand::Legendre { a, p } => {
            #[derive(Serialize)]
            struct V {
                a: i64,
                p: u64,
                symbol: i32,
            }
            let symbol = arith::legendre(a, p).map_err(not_realizable)?;
            ok(V { a, p, symbol })
        }
        ArithCommand::P0 { d } => {
            #[derive(Serialize)]
            struct V {
                d: u64,
                p0: u64,
            }
            let p0 = arith::p0(d).map_err(not_realizable)?;
            ok(V { d, p0 })
        }
        ArithCommand::Shift { c0, d, p } => {
            #[derive(Serialize)]
            struct V {
                c0: u64,
                d: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                p: Option<u64>,
                j: u64,
                shifted: u64,
            }
            let (j, shifted) = match p {
                None => arith::nonsquare_shift(c0, d).map_err(not_realizable)?,
                Some(p) => arith::nonsquare_shift_mod_p(c0, d, p).map_err(not_realizable)?,
            };
            ok(V {
                c0,
                d,
                p,
                j,
                shifted,
            })
        }
        ArithCommand::FourSquares { c0 } => {
            #[derive(Serialize)]
            struct V {
                c0: u64,
                squares: [u64; 4],
            }
            let (a, b, c, d) = arith::four_squares(c0);
            ok(V {
                c0,
                squares: [a, b, c, d],
            })
        }
        ArithCommand::RSplit { r, p } => {
            #[derive(Serialize)]
            struct V {
                r: u32,
                p: u64,
                split: Option<[u32; 3]>,
            }
            let split = arith::r_split(r, p).map_err(not_realizable)?;
            let out = V {
                r,
                p,
                split: split.map(|(a, b, c)| [a, b, c]),
            };
            let code = if out.split.is_some() {
                EXIT_OK
            } else {
                EXIT_NOT_REALIZABLE
            };
            println!(
                "{}",
                serde_json::to_string(&Out {
                    schema_version: 1,
                    value: out
                })?
            );
            Ok(code)
        }
        ArithCommand::Gz { p, c0 } => {
            #[derive(Serialize)]
            struct V {
                p: u64,
                c0: u64,
                pass: bool,
            }
            ok(V {
                p,
                c0,
                pass: arith::gz_gate(p, c0),
            })
        }
        ArithCommand::ClassNumber { disc, forms } => {
            #[derive(Serialize)]
            struct V {
                disc: i64,
                #[serde(rename = "classNumber")]
                class_number: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                forms: Option<Vec<arith::BinaryForm>>,
            }
            let list = arith::reduced_forms(disc).map_err(not_realizable)?;
            ok(V {
                disc,
                class_number: list.len() as u64,
                forms: forms.then_some(list),
            })
        }
    }
}
