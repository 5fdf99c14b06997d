//! Drive the command-line front end in-process.
//!
//! ```text
//! cargo run --example run_cli -- gen fixture ex2
//! ```

fn main() {
    let args: Vec<String> = std::iter::once("manna".to_string()).chain(std::env::args().skip(1)).collect();
    let args = if args.len() == 1 { vec!["manna".into(), "gen".into(), "fixture".into(), "ex2".into()] } else { args };
    std::process::exit(manna::cli::run(args));
}
