use clap::Parser;
use frac_cli::{run, Cli, ExitCode};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; --help and --version succeed
            let code = if e.use_stderr() {
                ExitCode::InputError
            } else {
                ExitCode::Success
            };
            std::process::exit(code.code());
        }
    };
    let code = frac_cli::commands::configure_threads()
        .and_then(|()| run(cli))
        .unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        });
    std::process::exit(code.code());
}
