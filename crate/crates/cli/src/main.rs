//! `ncrank`: command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when an audit or check fails,
//! 2 on usage or input errors.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncrank::exactmat::DEFAULT_MODULUS;

use report::{OutputMode, Record, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "ncrank",
    version,
    about = "Commutative, blow-up and non-commutative ranks of matrix pencils"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Prime modulus for randomized and modular computations.
    #[arg(long, global = true, default_value_t = DEFAULT_MODULUS)]
    modulus: u64,
    /// Seed for every random draw. Required by randomized commands.
    #[arg(long, global = true, env = "NCRANK_SEED")]
    seed: Option<u64>,
    /// Random trials per rank estimate.
    #[arg(long, global = true, default_value_t = 8)]
    trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Human)]
    output: OutputMode,
    /// Shorthand for `--output json`.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank estimates for a pencil file.
    #[command(subcommand)]
    Rank(RankCmd),
    /// Property audits over a pencil file or a random batch.
    Audit(AuditArgs),
    /// The exterior-algebra pencil family.
    #[command(subcommand)]
    Wedge(WedgeCmd),
    /// Border-rank lower bounds for 3-tensors.
    #[command(subcommand)]
    Brank(BrankCmd),
    /// Non-commutative rational formulas.
    #[command(subcommand)]
    Ncf(NcfCmd),
}

#[derive(Subcommand, Debug)]
enum RankCmd {
    Pencil {
        file: String,
        /// `crk`, `ncrk`, `blowup=<d>` or `profile=<p>x<q>`.
        #[arg(long, value_parser = commands::parse_mode)]
        mode: commands::Mode,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AuditKind {
    Regularity,
    Monotone,
    Concavity,
    Ratio,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(value_enum)]
    kind: AuditKind,
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    input: Option<String>,
    /// `rows=R cols=C vars=V count=K`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    random: Option<Vec<String>>,
    /// Largest blow-up size (or profile side) examined.
    #[arg(long, default_value_t = 4)]
    d_max: usize,
}

#[derive(Subcommand, Debug)]
enum WedgeCmd {
    Build {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        emit: Option<String>,
    },
    CheckBlocks {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
    },
    Witness {
        #[arg(long)]
        p: usize,
    },
    Ratio {
        #[arg(long)]
        p: usize,
    },
    Egfamily {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BrankCmd {
    Certify {
        #[arg(long)]
        tensor: String,
        #[arg(long)]
        p: usize,
        /// Exact rational arithmetic instead of the prime field.
        #[arg(long)]
        exact: bool,
    },
    Explicit {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        emit: Option<String>,
        #[arg(long)]
        certify: bool,
    },
    Equations {
        #[arg(long)]
        p: usize,
    },
}

#[derive(Subcommand, Debug)]
enum NcfCmd {
    Eval {
        /// Expression text, or `@path` to read it from a file.
        #[arg(long)]
        expr: String,
        #[arg(long)]
        dim: usize,
    },
    Bergman {
        #[arg(long)]
        dim: usize,
    },
    Linearize {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        emit_pencils: Option<String>,
    },
    Counterexample,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let config = RunConfig {
        modulus: g.modulus,
        seed: g.seed,
        trials: g.trials,
        output: if g.json { OutputMode::Json } else { g.output },
    };
    let outcome = match commands::run(&cli.command, &config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut failed = false;
    for (result, passed) in outcome.items {
        failed |= passed == Some(false);
        let record = Record {
            tool: "ncrank",
            version: env!("CARGO_PKG_VERSION"),
            command: outcome.command.clone(),
            config: config.clone(),
            input_hash: outcome.input_hash.clone(),
            passed,
            result,
        };
        print!("{}", record.render());
    }
    if failed {
        if outcome.randomized {
            eprintln!(
                "hint: randomized ranks are lower bounds; a failure can mean undersampling. \
                 Rerun with more --trials or another --seed."
            );
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
