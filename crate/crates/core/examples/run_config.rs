//! Drives the runner from an inline TOML config, as the CLI does.
//!
//! ```bash
//! cargo run --release --example run_config -- /tmp/pucci-out
//! ```

use pucci_lab::config::{parse_config, Command};
use pucci_lab::runner;

const CONFIG: &str = r#"
command = "exhaust"
seed = 1

[domain]
kind = "interval"
a = 0
b = "pi"

[bounds]
theta = 2.0
Theta = 8.0

[exhaust]
n_max = 6
known_limit = 1.0
"#;

fn main() -> pucci_lab::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/run_config".into());
    let cfg = parse_config(CONFIG)?;
    let outcome = runner::run(&cfg, Command::Exhaust, out.as_ref())?;
    println!("status {} (exit {})", outcome.manifest["status"], outcome.exit_code);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
