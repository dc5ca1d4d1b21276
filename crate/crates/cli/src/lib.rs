//! `blf` command-line front end.
//!
//! Every verb is a thin adapter over `blf_core`. Results go to the output
//! stream, diagnostics to the error stream. Exit codes: `0` success, `1` I/O,
//! usage or parse errors, `2` domain errors (invalid diagram, inadmissible
//! family member, rejected dual-pair evidence, failed verification).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use blf_core::catalog::{self, EntryName, InvariantReport, Manifest};
use blf_core::chartforms::{self, DEFAULT_SEED};
use blf_core::diagram::{self, CornerRef, DualPairEvidence, GcsMode, LefschetzRef};
use blf_core::io::format::to_canonical_json;
use blf_core::io::{parse_diagram, render, serialize_diagram};
use blf_core::{Cycle, FibrationDiagram};
use clap::{Args, Parser, Subcommand};

pub const SEED_ENV: &str = "BLF_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "blf",
    version,
    about = "Boundary Lefschetz fibration diagrams and surgery calculus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Building blocks and connected-sum families.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Corner connected sum of two diagrams.
    Sum {
        first: PathBuf,
        second: PathBuf,
        /// Corner on each diagram, e.g. `A:0 B:2` (index or label).
        #[arg(long, num_args = 2, required = true, value_names = ["A:CORNER", "B:CORNER"])]
        at: Vec<String>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Self-connected sum at two corners.
    Selfsum {
        diagram: PathBuf,
        #[arg(long, num_args = 2, required = true, value_names = ["CORNER", "CORNER"])]
        at: Vec<String>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Singularity trades.
    #[command(subcommand)]
    Trade(TradeCommand),
    /// Euler characteristic, corner and Lefschetz counts, parity, GCS flags.
    Invariants { diagram: PathBuf },
    /// Predicates on a diagram.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Draw the base diagram as SVG.
    Render {
        diagram: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the sample-based chart-model identity checks.
    VerifyCharts {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Overridden by the BLF_SEED environment variable when set.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct OutputArg {
    /// Write the resulting diagram here instead of the output stream.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// Build one entry: a block name, `X`, `Y`, `sphere_bundle_family`, or
    /// a full name such as `X(2,1)`.
    Build {
        name: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        h: Option<u32>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Print the manifest of standard entries with their expected invariants.
    List {
        #[arg(long, default_value_t = 6)]
        max: u32,
    },
    /// Build and check every manifest entry; one JSON object per entry.
    Verify {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum TradeCommand {
    /// Trade a corner for a Lefschetz singularity.
    Smooth {
        diagram: PathBuf,
        #[arg(long)]
        corner: String,
        /// Record vanishing cycles (1,1) / (1,0) in a fresh basis tag.
        #[arg(long)]
        record_cycles: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Trade a Lefschetz singularity for a corner.
    Singularize {
        diagram: PathBuf,
        #[arg(long)]
        lefschetz: String,
        #[arg(long)]
        circle: usize,
        #[arg(long, conflicts_with = "evidence")]
        assert_dual_pair: bool,
        /// Lefschetz cycle, elliptic cycle and basis tag, e.g. `1,1 1,0 t0`.
        #[arg(long, num_args = 3, value_names = ["LEF", "ELL", "TAG"])]
        evidence: Option<Vec<String>>,
        #[command(flatten)]
        output: OutputArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Stable generalized complex structure criterion.
    Gcs {
        diagram: PathBuf,
        #[arg(long, default_value = "total")]
        mode: GcsMode,
    },
    /// Elliptic symplectic structure criterion.
    Elliptic { diagram: PathBuf },
    /// List invariant violations; exit 2 if there are any.
    Valid { diagram: PathBuf },
}

/// Error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn io(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }

    fn domain(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_diagram(path: &Path) -> CliResult<FibrationDiagram> {
    let bytes = fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::io)?;
    parse_diagram(&bytes)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::io)
}

fn read_valid_diagram(path: &Path) -> CliResult<FibrationDiagram> {
    let d = read_diagram(path)?;
    diagram::ensure_valid(&d)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::domain)?;
    Ok(d)
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    out.write_all(bytes)
        .context("writing output")
        .map_err(Failure::io)
}

fn emit_diagram(out: &mut dyn Write, d: &FibrationDiagram, target: &OutputArg) -> CliResult<()> {
    let bytes = serialize_diagram(d);
    match &target.output {
        Some(path) => fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::io),
        None => emit(out, &bytes),
    }
}

fn parse_cycle(s: &str) -> CliResult<Cycle> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok(Cycle::new(a, b)),
            _ => Err(Failure::io(anyhow!("bad cycle {s:?}, expected a,b"))),
        },
        _ => Err(Failure::io(anyhow!("bad cycle {s:?}, expected a,b"))),
    }
}

/// Split `A:ref`/`B:ref` forms; unprefixed values keep their position.
fn sum_refs(at: &[String]) -> CliResult<(CornerRef, CornerRef)> {
    let mut slots: [Option<CornerRef>; 2] = [None, None];
    for (pos, raw) in at.iter().enumerate() {
        let (slot, body) = match raw.split_once(':') {
            Some((p, body)) if p.eq_ignore_ascii_case("a") => (0, body),
            Some((p, body)) if p.eq_ignore_ascii_case("b") => (1, body),
            _ => (pos, raw.as_str()),
        };
        if slots[slot].is_some() {
            return Err(Failure::io(anyhow!(
                "corner for diagram {} given twice",
                ["A", "B"][slot]
            )));
        }
        slots[slot] = Some(body.parse().expect("infallible"));
    }
    match slots {
        [Some(a), Some(b)] => Ok((a, b)),
        _ => Err(Failure::io(anyhow!(
            "--at needs one corner for each diagram"
        ))),
    }
}

fn entry_name(
    name: &str,
    n: Option<u32>,
    m: Option<u32>,
    l: Option<u32>,
    g: Option<u32>,
    h: Option<u32>,
) -> CliResult<EntryName> {
    let need =
        |v: Option<u32>, flag: &str| v.ok_or_else(|| Failure::io(anyhow!("{name} needs --{flag}")));
    match name {
        "X" | "x" => Ok(EntryName::X {
            n: need(n, "n")?,
            l: l.unwrap_or(0),
        }),
        "Y" | "y" => Ok(EntryName::Y {
            n: n.unwrap_or(0),
            m: m.unwrap_or(0),
            l: l.unwrap_or(0),
        }),
        "sphere_bundle_family" => Ok(EntryName::SphereBundleFamily {
            g: need(g, "g")?,
            h: need(h, "h")?,
        }),
        other => other.parse().map_err(catalog_failure),
    }
}

fn catalog_failure(e: catalog::CatalogError) -> Failure {
    match e {
        catalog::CatalogError::UnknownName(_) => Failure::io(e.into()),
        other => Failure::domain(other),
    }
}

fn run_catalog(cmd: CatalogCommand, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        CatalogCommand::Build {
            name,
            n,
            m,
            l,
            g,
            h,
            output,
        } => {
            let entry_name = entry_name(&name, n, m, l, g, h)?;
            let entry = catalog::building_block(entry_name).map_err(catalog_failure)?;
            emit_diagram(out, &entry.diagram, &output)
        }
        CatalogCommand::List { max } => {
            let m = catalog::manifest(&catalog::standard_names(max)).map_err(catalog_failure)?;
            emit(out, &to_canonical_json(&m))
        }
        CatalogCommand::Verify { manifest, max } => {
            let m: Manifest = match manifest {
                Some(path) => {
                    let bytes = fs::read(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(Failure::io)?;
                    serde_json::from_slice(&bytes)
                        .with_context(|| format!("parsing {}", path.display()))
                        .map_err(Failure::io)?
                }
                None => {
                    catalog::manifest(&catalog::standard_names(max)).map_err(catalog_failure)?
                }
            };
            let mut failed = 0usize;
            for line in &m.entries {
                let report = catalog::verify_manifest_entry(line).map_err(catalog_failure)?;
                if !report.pass {
                    failed += 1;
                }
                emit(out, &to_canonical_json(&report))?;
            }
            if failed > 0 {
                return Err(Failure::domain(anyhow!(
                    "{failed} of {} entries disagree with their expected invariants",
                    m.entries.len()
                )));
            }
            Ok(())
        }
    }
}

fn run_trade(cmd: TradeCommand, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        TradeCommand::Smooth {
            diagram: path,
            corner,
            record_cycles,
            output,
        } => {
            let d = read_valid_diagram(&path)?;
            let corner: CornerRef = corner.parse().expect("infallible");
            let r = diagram::trade_corner_to_lefschetz(&d, &corner, record_cycles)
                .map_err(Failure::domain)?;
            emit_diagram(out, &r, &output)
        }
        TradeCommand::Singularize {
            diagram: path,
            lefschetz,
            circle,
            assert_dual_pair,
            evidence,
            output,
        } => {
            let d = read_valid_diagram(&path)?;
            let evidence = match (assert_dual_pair, evidence) {
                (true, _) => DualPairEvidence::Asserted,
                (false, Some(ev)) => DualPairEvidence::Cycles {
                    lefschetz: parse_cycle(&ev[0])?,
                    elliptic: parse_cycle(&ev[1])?,
                    basis_tag: ev[2].clone(),
                },
                (false, None) => {
                    return Err(Failure::domain(anyhow!(
                        "dual-pair evidence required: pass --evidence LEF ELL TAG or --assert-dual-pair"
                    )))
                }
            };
            let lef: LefschetzRef = lefschetz.parse().expect("infallible");
            let r = diagram::trade_lefschetz_to_corner(&d, &lef, circle, &evidence)
                .map_err(Failure::domain)?;
            emit_diagram(out, &r, &output)
        }
    }
}

fn bool_line(b: bool) -> &'static [u8] {
    if b {
        b"true\n"
    } else {
        b"false\n"
    }
}

fn dispatch(cli: Cli, env_seed: Option<String>, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Catalog(cmd) => run_catalog(cmd, out),
        Command::Sum {
            first,
            second,
            at,
            output,
        } => {
            let (a, b) = sum_refs(&at)?;
            let d1 = read_valid_diagram(&first)?;
            let d2 = read_valid_diagram(&second)?;
            let r = diagram::corner_connected_sum(&d1, &a, &d2, &b).map_err(Failure::domain)?;
            emit_diagram(out, &r, &output)
        }
        Command::Selfsum {
            diagram: path,
            at,
            output,
        } => {
            let d = read_valid_diagram(&path)?;
            let a: CornerRef = at[0].parse().expect("infallible");
            let b: CornerRef = at[1].parse().expect("infallible");
            let r = diagram::self_connected_sum(&d, &a, &b).map_err(Failure::domain)?;
            emit_diagram(out, &r, &output)
        }
        Command::Trade(cmd) => run_trade(cmd, out),
        Command::Invariants { diagram: path } => {
            let d = read_valid_diagram(&path)?;
            let report = InvariantReport::of(&d).map_err(Failure::domain)?;
            emit(out, &to_canonical_json(&report))
        }
        Command::Check(CheckCommand::Gcs {
            diagram: path,
            mode,
        }) => {
            let d = read_valid_diagram(&path)?;
            emit(out, bool_line(diagram::admits_stable_gcs(&d, mode)))
        }
        Command::Check(CheckCommand::Elliptic { diagram: path }) => {
            let d = read_valid_diagram(&path)?;
            emit(out, bool_line(diagram::admits_elliptic_symplectic(&d)))
        }
        Command::Check(CheckCommand::Valid { diagram: path }) => {
            let d = read_diagram(&path)?;
            let violations = diagram::validate(&d);
            for v in &violations {
                emit(out, format!("{v}\n").as_bytes())?;
            }
            if violations.is_empty() {
                emit(out, b"valid\n")
            } else {
                Err(Failure::domain(anyhow!("{} violations", violations.len())))
            }
        }
        Command::Render {
            diagram: path,
            output,
        } => {
            let d = read_valid_diagram(&path)?;
            let svg = render(&d).map_err(Failure::domain)?;
            match output {
                Some(p) => fs::write(&p, svg)
                    .with_context(|| format!("writing {}", p.display()))
                    .map_err(Failure::io),
                None => emit(out, svg.as_bytes()),
            }
        }
        Command::VerifyCharts { samples, seed } => {
            let seed = match env_seed {
                Some(s) => s
                    .trim()
                    .parse::<u64>()
                    .with_context(|| format!("{SEED_ENV}={s:?} is not an unsigned integer"))
                    .map_err(Failure::io)?,
                None => seed.unwrap_or(DEFAULT_SEED),
            };
            let reports = [
                chartforms::verify_corner_sum_model(samples, seed),
                chartforms::verify_focus_focus_model(samples, seed),
            ];
            for r in &reports {
                emit(out, &to_canonical_json(r))?;
            }
            if reports.iter().all(|r| r.pass) {
                Ok(())
            } else {
                Err(Failure::domain(anyhow!("chart-model verification failed")))
            }
        }
    }
}

/// Run one invocation with an explicit seed override; returns the exit code.
pub fn run_with_env<I, T>(
    args: I,
    env_seed: Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() {
                1
            } else {
                // --help / --version
                let _ = write!(out, "{}", e.render());
                0
            };
        }
    };
    match dispatch(cli, env_seed, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

/// Run with `BLF_SEED` taken from the process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, std::env::var(SEED_ENV).ok(), out, err)
}
