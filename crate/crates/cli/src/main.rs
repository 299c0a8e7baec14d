use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::Parser;
use randturn_cli::args::{Cli, Command};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let stop = Arc::new(AtomicBool::new(false));
    if matches!(cli.command, Command::Selfplay(_) | Command::Scaling(_)) {
        let flag = stop.clone();
        // A second interrupt kills the process outright.
        let _ = ctrlc::set_handler(move || {
            if flag.swap(true, Ordering::SeqCst) {
                std::process::exit(130);
            }
        });
    }
    let invocation: Vec<String> = argv.into_iter().skip(1).collect();
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = randturn_cli::run(cli, &invocation, &stop, &mut stdout) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
