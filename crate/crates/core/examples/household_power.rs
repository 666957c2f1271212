//! Loads a household power consumption file, splits it across four users
//! and prints original against perturbed readings.
//!
//! cargo run -p cldp --example household_power -- [path/to/household_power_consumption.txt]

use std::path::PathBuf;

use cldp::data::DEFAULT_COLUMN;
use cldp::harness::run_pipeline;
use cldp::{load_power_csv, split_users, CldpConfig};

fn main() -> cldp::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/household_power_excerpt.txt")
        });
    let data = load_power_csv(&path, DEFAULT_COLUMN)?;
    println!(
        "{}: {} readings of {}, {} rows skipped",
        data.source,
        data.len(),
        data.column_name,
        data.rows_skipped
    );

    let split = split_users(&data, 4)?;
    let cfg = CldpConfig::builder(4, 40, 200, 3.0).seed(2006).build()?;
    let run = run_pipeline(&cfg, &split.users)?;

    for (orig, pert) in split.users.iter().zip(&run.perturbed) {
        println!(
            "\nuser {} (first 8 of {} samples, kW)",
            orig.user_index,
            pert.samples.len()
        );
        for (x, y) in orig.samples.iter().zip(&pert.samples).take(8) {
            println!("  {x:7.3} -> {y:7.3}");
        }
    }
    println!("\nper-user mse: {:?}", run.mse_per_user);
    println!(
        "aggregate error at the collector: {:.3e}",
        run.aggregate_error
    );
    Ok(())
}
