//! `dmac`: key generation, tagging, verification, analysis, benchmarking
//! and known-answer tests for DMAC-1 / DMAC-2.
//!
//! Exit status: 0 on success, 1 when a tag does not verify or an analysed
//! property does not hold, 2 on usage or parameter errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dmac_core::{Encoding, Padding, TagMode, Variant};

#[derive(Parser, Debug)]
#[command(name = "dmac", version, about = "Keyed hashing by walks on the graphs D(n, Q)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random key (IV and password) for a parameter set.
    Keygen {
        #[command(flatten)]
        profile: Profile,
        /// Password length s; at most half the girth of D(n, Q).
        #[arg(long, default_value_t = 10)]
        password_length: usize,
        /// Write the key here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tag of a message.
    Mac {
        #[command(flatten)]
        profile: Profile,
        #[arg(long)]
        key: PathBuf,
        /// Message file, or `-` for standard input.
        #[arg(long = "in", default_value = "-")]
        input: String,
        /// Comma-separated walk directions M_i, used instead of a message.
        #[arg(long, value_delimiter = ',', conflicts_with = "input")]
        blocks: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a tag; exits 0 on match and 1 on mismatch.
    Verify {
        #[command(flatten)]
        profile: Profile,
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in", default_value = "-")]
        input: String,
        /// Candidate tag: h/4 hex digits, or h binary digits when 4 does not divide h.
        #[arg(long)]
        tag: String,
    },
    /// Property checks on small graphs and statistical tests of tags.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Throughput and field-operation counts.
    Bench {
        #[command(flatten)]
        profile: Profile,
        #[command(flatten)]
        keying: Keying,
        /// Message size in bytes.
        #[arg(long, default_value_t = 1 << 20)]
        bytes: usize,
    },
    /// Run a known-answer test file.
    Kat {
        file: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum Analysis {
    /// Girth, regularity, bipartiteness, components and spectrum of D(n, q).
    Graph {
        #[arg(long)]
        n: usize,
        /// Prime field size.
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean tag Hamming distance after single-bit message flips.
    Avalanche {
        #[command(flatten)]
        profile: Profile,
        #[command(flatten)]
        keying: Keying,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 256)]
        message_bits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monobit and 2-bit chi-square tests over concatenated tags.
    Bits {
        #[command(flatten)]
        profile: Profile,
        #[command(flatten)]
        keying: Keying,
        /// Number of tags; by default enough for 10^6 bits.
        #[arg(long)]
        trials: Option<usize>,
        /// Write the raw tag bit stream here.
        #[arg(long)]
        emit_bits: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive tag collisions on a tiny instance over D(n, q).
    Collisions {
        #[arg(long)]
        n: usize,
        /// Prime field size Q of the graph; blocks have floor(log2 Q) bits.
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        max_blocks: usize,
        #[arg(long, default_value = "dmac1")]
        variant: Variant,
        #[command(flatten)]
        keying: Keying,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parameter file plus mode overrides.
#[derive(Args, Debug, Clone, Default)]
pub struct Profile {
    /// Parameter file; the default profile when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub encoding: Option<Encoding>,
    #[arg(long)]
    pub padding: Option<Padding>,
    #[arg(long)]
    pub tag_mode: Option<TagMode>,
}

/// A key file, or a key drawn from a seeded generator.
#[derive(Args, Debug, Clone, Default)]
pub struct Keying {
    #[arg(long)]
    pub key: Option<PathBuf>,
    /// Seed for the generated key and random messages.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Password length of a generated key.
    #[arg(long, default_value_t = 1)]
    pub password_length: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
