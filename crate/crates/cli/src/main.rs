//! `bianchi`: construct, verify and regress compression witnesses.
//!
//! Exit status: 0 success, 1 verification mismatch, 2 bad input,
//! 3 internal consistency failure.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use bianchi_core::appendix::{check_golden, AppendixError, GOLDEN};
use bianchi_core::circles::residue_classes;
use bianchi_core::pipeline::{construct_series, validate_fig8, verify, GeneralParams, Params, PipelineError};
use bianchi_core::witness::{from_machine, to_machine, to_text};
use bianchi_core::QuadInt;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

const MISMATCH: u8 = 1;
const BAD_INPUT: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "bianchi", version, about = "Compression witnesses in Bianchi groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct witnesses g_k for a range of k
    Construct {
        #[command(subcommand)]
        mode: ConstructMode,
    },
    /// Re-derive and check every witness in a machine-format file
    Verify { path: PathBuf },
    /// List quadratic residues and non-residues mod an odd prime d
    Residues { d: u64 },
    /// Compare the (20, 7) construction with the golden table
    Appendix {
        /// Golden table to compare against instead of the built-in one
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructMode {
    /// Figure-eight knot complement, d = 3, slope p/q
    Fig8 {
        #[arg(long, allow_hyphen_values = true)]
        p: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        q: BigInt,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Prime d >= 3 with a translation xi in O_d
    General {
        #[arg(long)]
        d: u64,
        /// xi, e.g. `1+7*eta` or `3-2*sqrt(-11)`
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["p", "q"])]
        xi: Option<String>,
        /// with --q: xi = p + q*tau
        #[arg(long, allow_hyphen_values = true, requires = "q")]
        p: Option<BigInt>,
        #[arg(long, allow_hyphen_values = true, requires = "p")]
        q: Option<BigInt>,
        /// quadratic non-residue mod d (default: the smallest)
        #[arg(long)]
        x: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// inclusive range `A..B`, or a single `k`
    #[arg(long, default_value = "1..1", value_parser = parse_k_range)]
    k: RangeInclusive<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// write to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

fn parse_k_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad k {t:?}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 || a > b {
        return Err(format!("k range {s:?} must satisfy 1 <= A <= B"));
    }
    Ok(a..=b)
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn pipeline_exit(e: PipelineError) -> ExitCode {
    match e {
        PipelineError::InvalidParams(_) => fail(BAD_INPUT, e),
        PipelineError::CheckFailed(_) => fail(INTERNAL, e),
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> ExitCode {
    let res = match output {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(BAD_INPUT, format!("writing output: {e}")),
    }
}

fn cmd_construct(mode: ConstructMode) -> ExitCode {
    let (params, out) = match mode {
        ConstructMode::Fig8 { p, q, out } => (validate_fig8(p, q).map(Params::Fig8), out),
        ConstructMode::General { d, xi, p, q, x, out } => {
            let params = match (xi, p, q) {
                (Some(s), None, None) => match QuadInt::parse(&s, d) {
                    Ok(xi) => GeneralParams::new(d, xi, x),
                    Err(e) => return fail(BAD_INPUT, e),
                },
                (None, Some(p), Some(q)) => GeneralParams::from_pq(d, p, q, x),
                _ => return fail(BAD_INPUT, "give either --xi or both --p and --q"),
            };
            (params.map(Params::General), out)
        }
    };
    let params = match params {
        Ok(p) => p,
        Err(e) => return pipeline_exit(e),
    };
    let ws = match construct_series(&params, out.k.clone()) {
        Ok(ws) => ws,
        Err(e) => return pipeline_exit(e),
    };
    let text = match out.format {
        Format::Text => to_text(&ws),
        Format::Machine => to_machine(&ws),
    };
    emit(&text, out.output.as_ref())
}

fn cmd_verify(path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(BAD_INPUT, format!("{}: {e}", path.display())),
    };
    let ws = match from_machine(&text) {
        Ok(ws) => ws,
        Err(e) => return fail(BAD_INPUT, e),
    };
    let mut all = true;
    for (i, w) in ws.iter().enumerate() {
        let report = verify(w);
        all &= report.all_pass();
        println!("witness {i} ({}, d = {}, k = {})", w.mode, w.d, w.k);
        for (name, ok) in &report.results {
            println!("  {} {name}", if *ok { "pass" } else { "FAIL" });
        }
    }
    if all {
        println!("all {} witnesses verified", ws.len());
        ExitCode::SUCCESS
    } else {
        println!("verification failed");
        ExitCode::from(MISMATCH)
    }
}

fn cmd_residues(d: u64) -> ExitCode {
    let (res, non) = match residue_classes(d) {
        Ok(r) => r,
        Err(e) => return fail(BAD_INPUT, e),
    };
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    println!("residues mod {d}: {}", join(&res));
    println!("non-residues mod {d}: {}", join(&non));
    println!("smallest non-residue: {}", non[0]);
    ExitCode::SUCCESS
}

fn cmd_appendix(golden: Option<&PathBuf>) -> ExitCode {
    let text = match golden {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(BAD_INPUT, format!("{}: {e}", path.display())),
        },
        None => GOLDEN.to_string(),
    };
    match check_golden(&text) {
        Ok(report) => match report.mismatch {
            None => {
                println!("appendix: h and {} rows match exactly", report.rows);
                ExitCode::SUCCESS
            }
            Some(m) => {
                println!("appendix mismatch at {m}");
                ExitCode::from(MISMATCH)
            }
        },
        Err(AppendixError::Pipeline(e)) => pipeline_exit(e),
        Err(e) => fail(BAD_INPUT, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Construct { mode } => cmd_construct(mode),
        Command::Verify { path } => cmd_verify(&path),
        Command::Residues { d } => cmd_residues(d),
        Command::Appendix { golden } => cmd_appendix(golden.as_ref()),
    }
}
