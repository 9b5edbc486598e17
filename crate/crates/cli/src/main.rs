use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use slicegemm_cli::{
    cmd_bench, cmd_ffops, cmd_search, cmd_verify, default_seed, parse_algorithms, parse_dims, parse_rings,
    BenchOptions, FfopsOptions, Format, SearchCmd, VerifyOptions,
};

/// Dense linear algebra over very small finite fields.
#[derive(Parser)]
#[command(name = "slicegemm", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check kernels exhaustively and products against the oracle
    Verify {
        #[arg(long, default_value = "f2,f3,f5,f7,f4,f8,f9,f25,f27")]
        fields: String,
        #[arg(long, default_value_t = 65)]
        max_dim: usize,
        /// Defaults to $SLICEGEMM_SEED, else 0
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply comparisons per field
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Time multiplications of square matrices
    Bench {
        #[arg(long, default_value = "f2,f3,f5,f7")]
        fields: String,
        #[arg(long, default_value = "100,500,1000")]
        dims: String,
        #[arg(long, default_value = "m4rm,classical")]
        algorithms: String,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// `table` or `csv`
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Effective GFFops over a dimension sweep, as CSV
    Ffops {
        #[arg(long, default_value = "f3")]
        field: String,
        #[arg(long, default_value_t = 64)]
        min: usize,
        #[arg(long, default_value_t = 192)]
        max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long, default_value = "m4rm")]
        algorithms: String,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Search for a shortest and/or/xor program
    Search {
        /// Builtin name (e.g. f3-add, fold5) or a spec file
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Add an all-ones input so NOT is expressible
        #[arg(long)]
        const1: bool,
        /// List builtin targets and exit
        #[arg(long)]
        list: bool,
    },
}

fn run(cli: Cli) -> Result<bool> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Verify {
            fields,
            max_dim,
            seed,
            trials,
            inject_fault,
        } => {
            let opts = VerifyOptions {
                fields: parse_rings(&fields)?,
                max_dim,
                seed: seed.unwrap_or_else(default_seed),
                trials,
                inject_fault,
            };
            Ok(cmd_verify(&opts, &mut out)?.passed())
        }
        Cmd::Bench {
            fields,
            dims,
            algorithms,
            reps,
            seed,
            threads,
            format,
        } => {
            let opts = BenchOptions {
                fields: parse_rings(&fields)?,
                dims: parse_dims(&dims)?,
                algorithms: parse_algorithms(&algorithms)?,
                reps,
                seed: seed.unwrap_or_else(default_seed),
                threads,
                format: format.parse::<Format>()?,
            };
            cmd_bench(&opts, &mut out)?;
            Ok(true)
        }
        Cmd::Ffops {
            field,
            min,
            max,
            step,
            algorithms,
            reps,
            seed,
            threads,
        } => {
            let opts = FfopsOptions {
                field: field.parse().map_err(anyhow::Error::from)?,
                min,
                max,
                step,
                algorithms: parse_algorithms(&algorithms)?,
                reps,
                seed: seed.unwrap_or_else(default_seed),
                threads,
            };
            cmd_ffops(&opts, &mut out)?;
            Ok(true)
        }
        Cmd::Search {
            target,
            max_len,
            threads,
            const1,
            list,
        } => {
            if list {
                for name in slicegemm::FunctionSpec::builtin_names() {
                    writeln!(out, "{name}")?;
                }
                return Ok(true);
            }
            let cmd = SearchCmd {
                target,
                max_len,
                threads,
                const_one: const1,
            };
            Ok(cmd_search(&cmd, &mut out)?.program.is_some())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
