use clap::Parser;
use slly_cli::args::Cli;

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SLLY_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SLLY_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("configuration error: {msg}");
        std::process::exit(2);
    }
    let code = match slly_cli::execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
