use clap::Parser;
use primel_cli::{execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let record = serde_json::json!({
                "error": "config",
                "exit_code": 2,
                "message": e.to_string().trim(),
            });
            eprintln!("{record}");
            std::process::exit(2);
        }
    };
    if let Err(e) = execute(&cli) {
        eprintln!("{}", e.record());
        std::process::exit(e.exit_code());
    }
}
