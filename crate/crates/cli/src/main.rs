use clap::Parser;

use privgp_cli::{error_json, execute, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PRIVGP_LOG")).init();
    let cli = Cli::parse();
    if let Err(err) = execute(&cli) {
        eprintln!("{}", error_json(&err));
        std::process::exit(1);
    }
}
