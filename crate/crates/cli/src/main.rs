use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyonwalk::topo::bracket::kauffman_bracket;
use anyonwalk::topo::invariants::{jones_at_i, normalised_bracket};
use anyonwalk::{BracketConvention, BracketMethod, BraidWord};
use anyonwalk_cli::{config, exit, run, verify, CliError, Overrides};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "anyonwalk", version, about = "Seeded anyonic quantum-walk experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        /// Override a config value, e.g. `--set geometry.t=100`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Output directory; takes precedence over ANYWALK_OUT_DIR and the file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite at reduced sizes.
    Verify {
        /// Argument of the bracket root A in radians, for fault injection.
        #[arg(long, allow_hyphen_values = true)]
        bracket_root: Option<f64>,
    },
    /// Evaluate the Kauffman bracket of a closed braid.
    BracketEval {
        #[arg(long)]
        strands: usize,
        /// Signed generator indices, e.g. "1 1 -2".
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, value_enum, default_value_t = MethodArg::StateSum)]
        method: MethodArg,
        #[arg(long, allow_hyphen_values = true)]
        bracket_root: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Skein,
    StateSum,
}

fn convention(root: Option<f64>) -> BracketConvention {
    match root {
        Some(angle) => BracketConvention::from_angle(angle),
        None => BracketConvention::calibrated().unwrap_or_else(|_| BracketConvention::ising()),
    }
}

/// Writes a line to stdout; a closed pipe is not an error worth a panic.
fn emit(line: String) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn configure_workers() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("ANYWALK_WORKERS") {
        let workers: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| CliError::Schema(format!("ANYWALK_WORKERS = {raw:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    match cli.command {
        Command::Run { config: path, set, seed, samples, out } => {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let out_dir = out.or_else(|| std::env::var_os("ANYWALK_OUT_DIR").map(PathBuf::from));
            let overrides = Overrides { set, seed, samples, out_dir };
            let cfg = config::parse(&text, &overrides)?;
            let report = run::run(&cfg, convention(None))?;
            emit(serde_json::to_string_pretty(&report.summary).unwrap_or_default());
            eprintln!("wrote {} files to {}", report.files.len() + 1, report.out_dir.display());
            Ok(())
        }
        Command::Verify { bracket_root } => {
            let conv = convention(bracket_root);
            emit(format!("bracket root {}", conv.label()));
            let checks = verify::run_suite(&conv);
            emit(verify::render(&checks).trim_end().to_string());
            match checks.iter().filter(|c| !c.pass).count() {
                0 => Ok(()),
                n => Err(CliError::Verify(n)),
            }
        }
        Command::BracketEval { strands, word, method, bracket_root } => {
            let conv = convention(bracket_root);
            let word = BraidWord::parse(strands, &word)?;
            let method = match method {
                MethodArg::Skein => BracketMethod::Skein,
                MethodArg::StateSum => BracketMethod::StateSum,
            };
            let b = kauffman_bracket(&word, method, &conv)?;
            let norm = normalised_bracket(&word, &conv)?;
            let jones = jones_at_i(&word, &conv)?;
            emit(format!("root        {}", conv.label()));
            emit(format!("word        {word}"));
            emit(format!("components  {}", word.closure().components()));
            emit(format!("writhe      {}", word.writhe()));
            emit(format!("bracket     {:+.12} {:+.12}i", b.re, b.im));
            emit(format!("normalised  {:+.12} {:+.12}i", norm.re, norm.im));
            emit(format!("jones(q=i)  {:+.12} {:+.12}i", jones.re, jones.im));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("anyonwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
