//! `flexcon design|evaluate|simulate|sweep --config <path> …`

fn main() {
    std::process::exit(flexcon::cli::main_with_args(std::env::args_os()));
}
