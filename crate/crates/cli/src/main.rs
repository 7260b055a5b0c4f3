use clap::Parser;
use satt_cli::{classify, run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(_) => {}
        Err(e) => {
            let record = classify(&e);
            eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
            std::process::exit(record.code);
        }
    }
}
