//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal contract violation, 2 usage or parse
//! error, 3 network too large for cut enumeration, 4 non-layered topology.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::achievability::{estimate_rate, validate_layered};
use crate::channels::{det_region_corners, gauss_bc_boundary, gauss_mac_boundary, SnrDb};
use crate::detnet::DetNetwork;
use crate::format::sig9;
use crate::gaussian_gap::{diamond_gap_batch, random_diamond_db, relay_gap_sweep};
use crate::par::Exec;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_NOT_LAYERED: i32 = 4;

/// Boundary samples printed by `region`.
const BOUNDARY_POINTS: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "detcap",
    version,
    about = "Capacity analysis for deterministic relay networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Min-cut capacity of a network file
    Capacity(FileArgs),
    /// Every cut of a network file with its rank
    Cuts(FileArgs),
    /// Random linear coding trials on a layered network
    Simulate(SimulateArgs),
    /// Relay channel gap sweep as CSV
    RelayGap(RelayGapArgs),
    /// Diamond network gaps as CSV
    DiamondGap(DiamondGapArgs),
    /// Two-user MAC or BC regions
    Region(RegionArgs),
}

#[derive(Debug, Args)]
pub struct FileArgs {
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub file: PathBuf,
    /// Block lengths, comma separated
    #[arg(long = "block-k", value_delimiter = ',', required = true)]
    pub block_k: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RelayGapArgs {
    /// Direct link SNR in dB
    #[arg(long = "sd-db", default_value_t = 0.0, allow_hyphen_values = true)]
    pub sd_db: f64,
    /// Grid start, dB relative to the direct link
    #[arg(long = "lo-db", default_value_t = -20.0, allow_hyphen_values = true)]
    pub lo_db: f64,
    #[arg(long = "hi-db", default_value_t = 60.0, allow_hyphen_values = true)]
    pub hi_db: f64,
    #[arg(long = "step-db", default_value_t = 1.0, allow_hyphen_values = true)]
    pub step_db: f64,
}

#[derive(Debug, Args)]
pub struct DiamondGapArgs {
    /// Link SNRs in dB: SA1 SA2 A1D A2D
    #[arg(
        num_args = 4,
        allow_negative_numbers = true,
        conflicts_with = "random",
        required_unless_present = "random"
    )]
    pub gains_db: Vec<f64>,
    /// Number of random draws, uniform in [-20, 60] dB per link
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKind {
    Mac,
    Bc,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, value_enum)]
    pub kind: RegionKind,
    #[arg(long)]
    pub n1: u32,
    #[arg(long)]
    pub n2: u32,
    #[arg(long = "snr1-db", requires = "snr2_db", allow_hyphen_values = true)]
    pub snr1_db: Option<f64>,
    #[arg(long = "snr2-db", requires = "snr1_db", allow_hyphen_values = true)]
    pub snr2_db: Option<f64>,
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidNetwork(_) | Error::Domain(_) => EXIT_USAGE,
            Error::TooLarge { .. } => EXIT_TOO_LARGE,
            Error::NotLayered { .. } => EXIT_NOT_LAYERED,
            Error::Dimension(_) | Error::InvalidCut(_) => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: format!("write failed: {e}"),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Capacity(a) => cmd_capacity(&a.file, out),
        Command::Cuts(a) => cmd_cuts(&a.file, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::RelayGap(a) => cmd_relay_gap(a, out, err),
        Command::DiamondGap(a) => cmd_diamond_gap(a, out, err),
        Command::Region(a) => cmd_region(a, out),
    }
}

fn load_network(path: &Path) -> std::result::Result<DetNetwork, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    text.parse::<DetNetwork>().map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_capacity(path: &Path, out: &mut dyn Write) -> CmdResult {
    let net = load_network(path)?;
    let (capacity, cut) = net.min_cut_capacity()?;
    writeln!(out, "nodes: {}", net.node_count())?;
    writeln!(out, "q: {}", net.q())?;
    writeln!(out, "capacity: {capacity}")?;
    writeln!(out, "min cut: {}", cut.display(&net))?;
    Ok(())
}

fn cmd_cuts(path: &Path, out: &mut dyn Write) -> CmdResult {
    let net = load_network(path)?;
    let mut cuts = net.enumerate_cuts()?;
    cuts.sort_by_key(|c| (c.value, c.mask));
    let min = cuts.first().map(|c| c.value).unwrap_or(0);
    writeln!(out, "q: {}", net.q())?;
    writeln!(out, "cuts: {}", cuts.len())?;
    for c in &cuts {
        let flag = if c.value == min { " *" } else { "" };
        writeln!(out, "{} {}{flag}", c.display(&net), c.value)?;
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let net = load_network(&a.file)?;
    let sched = validate_layered(&net)?;
    let (capacity, _) = net.min_cut_capacity()?;
    writeln!(out, "K,trials,best_rate,mean_rate,capacity")?;
    for &k in &a.block_k {
        let est = estimate_rate(&net, &sched, k, a.trials, a.seed)?;
        writeln!(
            out,
            "{k},{},{},{},{capacity}",
            a.trials,
            sig9(est.best_rate),
            sig9(est.mean_rate)
        )?;
    }
    Ok(())
}

fn cmd_relay_gap(a: &RelayGapArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let rows = relay_gap_sweep(a.sd_db, a.lo_db, a.hi_db, a.step_db)?;
    writeln!(out, "sr_db,rd_db,gap_bits")?;
    for r in &rows {
        writeln!(out, "{},{},{}", sig9(r.sr_db), sig9(r.rd_db), sig9(r.gap))?;
    }
    let max = rows.iter().map(|r| r.gap).fold(f64::NEG_INFINITY, f64::max);
    let mean = rows.iter().map(|r| r.gap).sum::<f64>() / rows.len() as f64;
    writeln!(
        err,
        "rows: {}, max gap: {}, mean gap: {}",
        rows.len(),
        sig9(max),
        sig9(mean)
    )?;
    Ok(())
}

fn cmd_diamond_gap(a: &DiamondGapArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let draws: Vec<[f64; 4]> = match a.random {
        Some(n) => random_diamond_db(n, a.seed, -20.0, 60.0),
        None => vec![[a.gains_db[0], a.gains_db[1], a.gains_db[2], a.gains_db[3]]],
    };
    let results = diamond_gap_batch(Exec::default(), &draws)?;
    writeln!(
        out,
        "sa1_db,sa2_db,a1d_db,a2d_db,swapped,alpha,r_pdf,r_star,c_bar,gap"
    )?;
    let mut violations = 0;
    for (g, res) in draws.iter().zip(&results) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            sig9(g[0]),
            sig9(g[1]),
            sig9(g[2]),
            sig9(g[3]),
            u8::from(res.report.swapped),
            sig9(res.report.argmax.unwrap_or(f64::NAN)),
            sig9(res.r_pdf()),
            sig9(res.r_star),
            sig9(res.c_bar()),
            sig9(res.report.gap),
        )?;
        if !res.sandwich_holds() {
            violations += 1;
        }
    }
    let max = results
        .iter()
        .map(|r| r.report.gap)
        .fold(f64::NEG_INFINITY, f64::max);
    writeln!(err, "instances: {}, max gap: {}", results.len(), sig9(max))?;
    if violations > 0 {
        return Err(Failure {
            code: EXIT_INTERNAL,
            message: format!("{violations} instance(s) violate the gap sandwich"),
        });
    }
    Ok(())
}

fn cmd_region(a: &RegionArgs, out: &mut dyn Write) -> CmdResult {
    let corners = det_region_corners(a.n1, a.n2)?;
    let kind = match a.kind {
        RegionKind::Mac => "mac",
        RegionKind::Bc => "bc",
    };
    writeln!(out, "kind: {kind}")?;
    writeln!(out, "n1: {}", a.n1)?;
    writeln!(out, "n2: {}", a.n2)?;
    let list: Vec<String> = corners
        .iter()
        .map(|p| format!("({},{})", sig9(p.r1), sig9(p.r2)))
        .collect();
    writeln!(out, "corners: {}", list.join(" "))?;

    let (Some(d1), Some(d2)) = (a.snr1_db, a.snr2_db) else {
        return Ok(());
    };
    let (s1, s2) = (SnrDb::from_db(d1)?, SnrDb::from_db(d2)?);
    if a.kind == RegionKind::Bc && s2.linear() > s1.linear() {
        return Err(
            Error::Domain("snr2 exceeds snr1; label the stronger user as user 1".into()).into(),
        );
    }
    writeln!(out, "snr1_db: {}", sig9(d1))?;
    writeln!(out, "snr2_db: {}", sig9(d2))?;
    let samples: Vec<(f64, f64, f64)> = match a.kind {
        RegionKind::Mac => gauss_mac_boundary(s1, s2, BOUNDARY_POINTS)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i as f64 / (BOUNDARY_POINTS - 1) as f64, p.r1, p.r2))
            .collect(),
        RegionKind::Bc => gauss_bc_boundary(s1, s2, BOUNDARY_POINTS)
            .into_iter()
            .map(|(alpha, p)| (alpha, p.r1, p.r2))
            .collect(),
    };
    writeln!(out, "param,r1,r2")?;
    for (t, r1, r2) in samples {
        writeln!(out, "{},{},{}", sig9(t), sig9(r1), sig9(r2))?;
    }
    Ok(())
}
