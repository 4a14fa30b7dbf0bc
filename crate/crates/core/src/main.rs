use std::process::ExitCode;

fn main() -> ExitCode {
    chsh_vertical::cli::main_entry()
}
