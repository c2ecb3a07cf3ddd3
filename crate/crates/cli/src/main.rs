use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use finmodel_cli::workspace::ModeArg;
use finmodel_cli::{parse_document, run, serialize_document, validate, RunOptions, WorkspaceError, BUDGET_ENV};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Naive,
    Marked,
}

/// Runs the commands of a workspace document and prints a report.
#[derive(Parser, Debug)]
#[command(name = "finmodel", version)]
struct Args {
    /// Workspace file; reads stdin when omitted or `-`.
    file: Option<PathBuf>,
    /// Iteration cap of the small object argument.
    #[arg(long)]
    cap: Option<usize>,
    /// Search budget in visited nodes.
    #[arg(long, env = BUDGET_ENV)]
    budget: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Probe objects for e-image, check-full-faithful and phantom commands.
    #[arg(long = "A", value_delimiter = ',')]
    probes: Option<Vec<String>>,
    /// Print the canonical form of the document instead of running it.
    #[arg(long)]
    normalize: bool,
}

fn read_input(file: &Option<PathBuf>) -> std::io::Result<String> {
    match file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn report_errors(errors: &[WorkspaceError]) -> ExitCode {
    for e in errors {
        eprintln!("{e}");
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match read_input(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read input: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(e) => return report_errors(&[e]),
    };
    let ws = match validate(doc) {
        Ok(ws) => ws,
        Err(errors) => return report_errors(&errors),
    };
    if let Some(names) = &args.probes {
        let missing: Vec<WorkspaceError> = names
            .iter()
            .filter(|n| !ws.objects.contains_key(*n))
            .map(|n| WorkspaceError::Unresolved { path: "--A".into(), name: n.clone() })
            .collect();
        if !missing.is_empty() {
            return report_errors(&missing);
        }
    }
    if args.normalize {
        println!("{}", serialize_document(&ws.document));
        return ExitCode::SUCCESS;
    }
    let opts = RunOptions {
        cap: args.cap,
        budget: args.budget,
        mode: args.mode.map(|m| match m {
            Mode::Naive => ModeArg::Naive,
            Mode::Marked => ModeArg::Marked,
        }),
        probes: args.probes,
    };
    let report = run(&ws, &opts);
    print!("{}", report.text);
    if report.errors > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
