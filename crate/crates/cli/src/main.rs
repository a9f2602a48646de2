mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use freeproj::complex::DEFAULT_VERTEX_CAP;
use freeproj::Flavor;

#[derive(Parser, Debug)]
#[command(
    name = "freeproj",
    version,
    about = "Free projective spaces over Z/p^r and F_p[t]/t^r"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Ring flavor: zmod (Z/p^r) or tpoly (F_p[t]/t^r)
    #[arg(long, global = true, default_value = "zmod", value_parser = parse_flavor)]
    ring: Flavor,
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    #[arg(long, global = true, default_value_t = 2)]
    r: u32,
    #[arg(long, global = true, default_value_t = 3)]
    d: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Upper bound on enumerated vertices
    #[arg(long, global = true, default_value_t = DEFAULT_VERTEX_CAP)]
    cap: u64,
    /// Worker threads; defaults to the machine's parallelism
    #[arg(long, global = true)]
    threads: Option<usize>,
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse().map_err(|e: freeproj::RingError| e.to_string())
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Closed,
    Recursive,
    Graph,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GroupCheck {
    Orders,
    Psi,
    PsiControl,
    NotBn,
    Cayley,
    Kernel,
    Transfer,
    All,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
enum Command {
    /// Enumerate n-spaces (or the graph between colors m and n) and check the counts
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: Option<u32>,
        /// Also write the graph in edge-list format to this path
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Spectrum of the graph between lines and n-spaces
    Spectrum {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Compare the graphs over two ring flavors: spectra and isomorphism
    Isocheck {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Second flavor; defaults to the other one
        #[arg(long, value_parser = parse_flavor)]
        other: Option<Flavor>,
    },
    /// Rebuild the full complex from a two-color graph and compare fingerprints
    Reconstruct {
        /// The two input colors, as m,n
        #[arg(long, value_parser = parse_pair, default_value = "1,2")]
        from: (u32, u32),
        /// Read the input graph from an edge list instead of generating it
        #[arg(long)]
        input: Option<PathBuf>,
        /// Seed for the random relabeling of the generated input
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the reconstructed graph in edge-list format to this path
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Group orders and the exceptional checks in rank three
    Groups {
        #[arg(long, value_enum, default_value_t = GroupCheck::All)]
        check: GroupCheck,
    },
    /// Compare spectra of the m,n graphs across ring flavors; reports only
    Conjecture {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Number of primes for the characteristic polynomial comparison
        #[arg(long, default_value_t = 4)]
        primes: usize,
    },
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected m,n")?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad color {a:?}"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad color {b:?}"))?;
    Ok((a, b))
}

/// Exit statuses: 0 all checks pass, 1 a check failed, 2 invalid
/// configuration, 3 a computation could not be completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    Pass,
    Fail,
    Report,
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a RunConfig,
    verdict: Verdict,
    result: serde_json::Value,
}

#[derive(Serialize, Debug)]
struct RunConfig {
    command: Command,
    #[serde(flatten)]
    common: Common,
    ring_label: String,
    threads_resolved: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.common.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let spec = match freeproj::RingSpec::new(cli.common.ring, cli.common.p, cli.common.r) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config = RunConfig {
        command: cli.command.clone(),
        common: cli.common.clone(),
        ring_label: spec.label(),
        threads_resolved: rayon::current_num_threads(),
    };
    let outcome = match commands::run(&cli.command, &cli.common, spec) {
        Ok(o) => o,
        Err(commands::CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let body = match cli.common.format {
        Format::Json => {
            let env = Envelope {
                config: &config,
                verdict: outcome.verdict,
                result: outcome.result,
            };
            serde_json::to_string_pretty(&env).expect("serializable") + "\n"
        }
        Format::Text => {
            let mut s = format!(
                "# {}\n",
                serde_json::to_string(&config).expect("serializable")
            );
            for line in &outcome.text {
                s.push_str(line);
                s.push('\n');
            }
            s.push_str(&format!("verdict: {:?}\n", outcome.verdict).to_lowercase());
            s
        }
    };
    let written = match &cli.common.output {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(3);
    }
    match outcome.verdict {
        Verdict::Pass | Verdict::Report => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
    }
}
