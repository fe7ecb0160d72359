//! Drives the command-line entry point on a small configuration: synth, sweep,
//! recover-source and near-field, all into a temporary output directory.

use std::path::PathBuf;

use migr_scatter::cli::run_command;

fn main() {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/small.ini");
    let out = std::env::temp_dir().join("migr-cli-pipeline");
    let (cfg, out) = (config.display().to_string(), out.display().to_string());
    let steps: [&[&str]; 4] = [
        &["synth", "--config", &cfg, "--out", &format!("{out}/mu.rsgf")],
        &["sweep", "--config", &cfg, "--out", &format!("{out}/sweep")],
        &["recover-source", "--config", &cfg, "--data", &format!("{out}/sweep"), "--out", &format!("{out}/rec")],
        &["nearfield", "--config", &cfg, "--out", &format!("{out}/nearfield.csv")],
    ];
    for args in steps {
        let log = format!("{out}/run.log");
        let code = run_command(["migr", "--log", &log].into_iter().chain(args.iter().copied()));
        println!("migr {} -> exit {code}", args[0]);
        if code != 0 {
            std::process::exit(code);
        }
    }
    match std::fs::read_to_string(format!("{out}/rec/summary.txt")) {
        Ok(s) => print!("{s}"),
        Err(e) => eprintln!("no summary: {e}"),
    }
}
