use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};

use staged_edsl::codegen::c::emit_c;
use staged_edsl::codegen::pseudo::render_program;
use staged_edsl::corpus::{self, ExampleProgram};
use staged_edsl::runtime::run;
use staged_edsl::translate::{translate_high, translate_high_with, LetStrategy, LoweringConfig, UnrollPolicy};

#[derive(Parser)]
#[command(name = "staged-edsl", about = "Run and compile the bundled EDSL examples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List example names
    List,
    /// Run an example against stdin/stdout
    Run { example: String },
    /// Print the compiled form of an example
    Compile {
        example: String,
        #[arg(long, value_enum, default_value_t = Backend::Pseudo)]
        backend: Backend,
        #[arg(long = "let", value_enum, default_value_t = LetArg::ByValue)]
        let_strategy: LetArg,
        #[arg(long, value_enum, default_value_t = UnrollArg::None)]
        unroll: UnrollArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Pseudo,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum LetArg {
    ByValue,
    ByName,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnrollArg {
    None,
    Even2,
}

fn example(name: &str) -> Result<ExampleProgram> {
    corpus::find(name)
        .map(|e| e.program)
        .ok_or_else(|| anyhow!("unknown example `{name}` (try `list`)"))
}

fn execute(command: Command) -> Result<()> {
    let stdout = io::stdout();
    match command {
        Command::List => {
            let mut out = stdout.lock();
            for e in corpus::corpus() {
                writeln!(out, "{}", e.name)?;
            }
        }
        Command::Run { example: name } => {
            let prog = match example(&name)? {
                ExampleProgram::Low(p) => p,
                ExampleProgram::High(p) => translate_high(&p),
            };
            run(&prog, io::stdin().lock(), stdout.lock())?;
        }
        Command::Compile {
            example: name,
            backend,
            let_strategy,
            unroll,
        } => {
            let cfg = LoweringConfig {
                let_strategy: match let_strategy {
                    LetArg::ByValue => LetStrategy::ByValue,
                    LetArg::ByName => LetStrategy::ByName,
                },
                unroll: match unroll {
                    UnrollArg::None => UnrollPolicy::NoUnroll,
                    UnrollArg::Even2 => UnrollPolicy::UnrollEvenBy2,
                },
            };
            let prog = match example(&name)? {
                ExampleProgram::Low(p) => p,
                ExampleProgram::High(p) => translate_high_with(cfg, &p),
            };
            let text = match backend {
                Backend::Pseudo => render_program(&prog)?,
                Backend::C => emit_c(&prog)?,
            };
            stdout.lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
