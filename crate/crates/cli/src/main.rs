use std::io::{self, BufRead, IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pmatch::{Error, Interpreter, PrintOptions, Value};

#[derive(Parser)]
#[command(name = "pmatch", version, about = "Pattern-matching interpreter")]
struct Cli {
    /// Run a program given on the command line and print the value of each expression.
    #[arg(short = 'e', long = "eval", value_name = "EXPR", global = true)]
    expr: Option<String>,

    /// Start with builtins only.
    #[arg(long, global = true)]
    no_prelude: bool,

    /// Load only the named prelude section (repeatable).
    #[arg(long = "prelude-section", value_name = "NAME", global = true)]
    prelude_sections: Vec<String>,

    /// Print at most this many elements of any collection.
    #[arg(long, default_value_t = 1000, global = true)]
    max_results: usize,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a script; `-` reads standard input.
    Run { file: PathBuf },
    /// Interactive session.
    Repl,
    /// Time the seq-k query over n zeros.
    Bench {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=4))]
        k: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
        n: u64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
    },
    /// Print the matching machine's states round by round.
    Trace {
        #[arg(long, default_value_t = 8)]
        rounds: usize,
    },
}

fn interpreter(cli: &Cli) -> pmatch::Result<Interpreter> {
    if cli.no_prelude {
        Ok(Interpreter::bare())
    } else if !cli.prelude_sections.is_empty() {
        Interpreter::with_sections(cli.prelude_sections.iter().map(String::as_str))
    } else {
        Interpreter::new()
    }
}

fn show(value: &Value, max_results: usize) -> pmatch::Result<String> {
    value.show_with(&PrintOptions {
        max_elements: Some(max_results),
        matcher_labels: false,
    })
}

fn run_source(interp: &Interpreter, source: &str, max_results: usize) -> pmatch::Result<()> {
    let stdout = io::stdout();
    for form in pmatch::read_program(source)? {
        if let Some(value) = interp.run_form(form)? {
            let text = show(&value, max_results)?;
            let _ = writeln!(stdout.lock(), "{text}");
        }
    }
    Ok(())
}

fn read_script(file: &PathBuf) -> pmatch::Result<String> {
    let io_err = |e: io::Error| Error::Runtime(format!("{}: {e}", file.display()));
    if file.as_os_str() == "-" {
        let mut source = String::new();
        io::stdin().read_to_string(&mut source).map_err(io_err)?;
        Ok(source)
    } else {
        std::fs::read_to_string(file).map_err(io_err)
    }
}

fn repl(interp: &Interpreter, max_results: usize) {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let prompt = |continued: bool| {
        if interactive {
            print!("{}", if continued { ". " } else { "> " });
            let _ = io::stdout().flush();
        }
    };
    let mut buffer = String::new();
    prompt(false);
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        buffer.push_str(&line);
        buffer.push('\n');
        if pmatch::lexer::needs_more_input(&buffer) {
            prompt(true);
            continue;
        }
        match pmatch::read_program(&buffer) {
            Err(e) => eprintln!("error: {e}"),
            Ok(forms) => {
                for form in forms {
                    match interp
                        .run_form(form)
                        .and_then(|v| v.map(|v| show(&v, max_results)).transpose())
                    {
                        Ok(Some(text)) => println!("{text}"),
                        Ok(None) => {}
                        Err(e) => eprintln!("error: {e}"),
                    }
                }
            }
        }
        buffer.clear();
        prompt(false);
    }
    if !buffer.trim().is_empty() {
        if let Err(e) = pmatch::read_program(&buffer) {
            eprintln!("error: {e}");
        }
    }
    if interactive {
        println!();
    }
}

fn main_inner(cli: Cli) -> pmatch::Result<()> {
    let interp = interpreter(&cli)?;
    match (&cli.command, &cli.expr) {
        (Some(Command::Run { file }), None) => {
            run_source(&interp, &read_script(file)?, cli.max_results)
        }
        (Some(Command::Repl), None) => {
            repl(&interp, cli.max_results);
            Ok(())
        }
        (Some(Command::Bench { k, n, reps }), None) => {
            let report = pmatch::bench::run_in(&interp, *k as usize, *n as usize, *reps)?;
            println!("{}", report.line());
            Ok(())
        }
        (Some(Command::Trace { rounds }), Some(expr)) => {
            print!("{}", interp.trace(expr, *rounds)?);
            Ok(())
        }
        (Some(Command::Trace { .. }), None) => Err(Error::Runtime(
            "trace needs an expression: trace -e \"(match-all …)\"".into(),
        )),
        (None, Some(expr)) => run_source(&interp, expr, cli.max_results),
        (None, None) => {
            repl(&interp, cli.max_results);
            Ok(())
        }
        (Some(_), Some(_)) => Err(Error::Runtime(
            "-e only applies to trace or on its own".into(),
        )),
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
