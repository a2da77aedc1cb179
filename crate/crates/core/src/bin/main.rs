use clap::Parser;
use mvgallery::cli::{run, Cli, JobConfig, Violation};

fn main() {
    let cli = Cli::parse();
    let code = match JobConfig::from_cli(cli) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let v = Violation::from_error(&e);
            eprintln!(
                "{}",
                serde_json::to_string(&v).expect("violation serializes")
            );
            v.exit_code
        }
    };
    std::process::exit(code);
}
