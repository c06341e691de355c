mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use microcalc::Error;
use serde_json::Value;

use config::{Config, FileConfig, Output};

/// Infinitesimal calculus toolkit: series fields, sequence germs and their
/// analytic applications.
#[derive(Debug, Parser)]
#[command(name = "microcalc", version)]
struct Cli {
    /// Print JSON instead of `key: value` lines.
    #[arg(long, global = true)]
    json: bool,
    /// TOML file with default settings.
    #[arg(long, global = true, env = "MICROCALC_CONFIG")]
    config: Option<PathBuf>,
    /// Series cutoff exponent.
    #[arg(long, global = true)]
    trunc: Option<i64>,
    /// Decimal digits claimed for approximate values.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Comma-separated sampling horizons, strictly increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    horizons: Option<Vec<u64>>,
    /// Bound on the order search, `|r| <= r_max`.
    #[arg(long, global = true)]
    r_max: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order of an infinitesimal expression in `i` as `i -> 0+`.
    Order {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value = "i")]
        var: String,
    },
    /// Standard part of a series written in `eps`.
    St {
        #[arg(long)]
        lc: String,
    },
    /// Derivative at a point from series and/or dual numbers.
    Deriv {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value = "both", value_parser = ["lc", "dual", "both"])]
        method: String,
    },
    /// Microcontinuity at one probe: standard:X0, boundary:A+, boundary:A- or infinite.
    Microcont {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        probe: String,
        /// Optional interval the probe must be admissible for.
        #[arg(long)]
        domain: Option<String>,
    },
    /// Uniform-continuity classification over an interval such as "(0,1)".
    Uniform {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 11)]
        grid: usize,
    },
    /// Series remainders along a diagonal sequence.
    Sumthm {
        /// Series term in `k` and `x`.
        #[arg(long)]
        term: String,
        /// Point sequence in `n`.
        #[arg(long)]
        xseq: String,
    },
    /// Term-by-term expansion of cos(v) as cos(n * v/n) at a large n.
    Euler {
        #[arg(long)]
        v: String,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        horizon: u64,
    },
    /// Eventual comparison of two sequences in `n`.
    Compare {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Limit of a sequence in `n`.
    Limit {
        #[arg(long)]
        germ: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Order { .. } => "order",
            Command::St { .. } => "st",
            Command::Deriv { .. } => "deriv",
            Command::Microcont { .. } => "microcont",
            Command::Uniform { .. } => "uniform",
            Command::Sumthm { .. } => "sumthm",
            Command::Euler { .. } => "euler",
            Command::Compare { .. } => "compare",
            Command::Limit { .. } => "limit",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Parse(_) => 2,
        _ => 3,
    }
}

fn render_text(fields: &serde_json::Map<String, Value>) -> String {
    let mut out = String::new();
    for (k, v) in fields {
        match v {
            Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
            Value::Null => out.push_str(&format!("{k}: none\n")),
            other => out.push_str(&format!("{k}: {other}\n")),
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            trunc: cli.trunc,
            precision: cli.precision,
            horizons: cli.horizons.clone(),
            r_max: cli.r_max,
            output: cli.json.then_some(Output::Json),
        };
        let config = Config::resolve(file, flags)?;
        let mut fields = commands::run(&cli.command, &config)?;
        fields.insert("command".into(), Value::String(cli.command.name().into()));
        fields.insert("config".into(), config.echo());
        Ok::<_, Error>((config.output, fields))
    })();
    match result {
        Ok((Output::Json, fields)) => {
            println!("{}", Value::Object(fields));
            ExitCode::SUCCESS
        }
        Ok((Output::Text, fields)) => {
            print!("{}", render_text(&fields));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
