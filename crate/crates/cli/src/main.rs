use std::process::ExitCode;

use monochrome_cli::plan::RunPlan;
use monochrome_cli::run::{self, exit};

fn main() -> ExitCode {
    let plan = match RunPlan::parse_args(std::env::args_os()) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run::execute(&plan) {
        Ok(done) => {
            print!("{}", done.report);
            ExitCode::from(done.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}
