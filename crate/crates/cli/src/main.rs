use illposed_cli::config::parse_config;
use illposed_cli::runner::run;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let config = match parse_config(&args) {
        Ok(config) => config,
        Err(errors) => {
            for error in &errors {
                eprintln!("error: {error}");
            }
            std::process::exit(2);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            println!("{} -> {}: {}", config.experiment, outcome.path, outcome.summary);
        }
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(1);
        }
    }
}
