//! Runs a named suite and prints its manifest.
//!
//! ```text
//! cargo run --release --example suite -- spg-all /tmp/spg-all
//! ```

use clap::ValueEnum;
use gqcov::suites::{run_suite, SuiteName, SuiteOptions};

fn main() -> gqcov::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "spg-all".into());
    let name = SuiteName::from_str(&name, false).map_err(gqcov::Error::input)?;
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join(format!("gqcov-{}", name.as_str())).display().to_string());
    let manifest = run_suite(name, &SuiteOptions::new(out))?;
    for c in &manifest.checks {
        println!("{:<40} {:?}  {}", c.name, c.verdict, c.detail);
    }
    println!("{}: {:?}", name.as_str(), manifest.verdict);
    std::process::exit(manifest.exit_code());
}
