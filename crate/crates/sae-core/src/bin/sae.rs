use std::process::exit;

fn main() {
    exit(sae_core::cli::dispatch(std::env::args_os()));
}
