use clap::Parser;

fn main() {
    let cli = grad2_cli::Cli::parse();
    if let Err(e) = grad2_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
