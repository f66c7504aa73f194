use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = vecticon_cli::Cli::parse();
    if let Err(e) = vecticon_cli::run(cli) {
        eprintln!("{}", e.line());
        std::process::exit(e.exit_code());
    }
}
