//! Pile-up experiments for the four preset families, optionally writing one
//! CSV series per preset.
//!
//! ```text
//! cargo run --example pile_experiment
//! cargo run --example pile_experiment -- /tmp/series 42
//! ```

use std::path::PathBuf;

use encapsulation::{run_experiment, write_series_csv, ExperimentConfig, Preset};

fn main() {
    let mut args = std::env::args().skip(1);
    let out_dir = args.next().map(PathBuf::from);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    println!(
        "{:<6} {:>6} {:>7} {:>10} {:>10} {:>10} {:>10}",
        "preset", "target", "steps", "sd start", "sd end", "ce start", "ce end"
    );
    for preset in Preset::ALL {
        let series = run_experiment(&ExperimentConfig::preset(preset, seed)).unwrap();
        let (first, last) = (series.first(), series.last());
        println!(
            "{:<6} {:>6} {:>7} {:>10.4} {:>10.4} {:>10.6} {:>10.6}",
            preset.name(),
            series.target,
            series.steps(),
            first.stddev,
            last.stddev,
            first.ce,
            last.ce
        );
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir).unwrap();
            let path = dir.join(format!("{}.csv", preset.name()));
            std::fs::write(&path, write_series_csv(&series)).unwrap();
        }
    }
    if let Some(dir) = out_dir {
        println!("series written to {}", dir.display());
    }
}
