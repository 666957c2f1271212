//! A meter reports 0.5 kWh every minute with i.i.d. Laplace noise. Summing
//! each hour of noisy readings recovers the hourly total anyway; the
//! cooperative mechanism's window totals carry a partition-dependent offset
//! that only cancels across users.
//!
//! cargo run -p cldp --example laplace_window_attack

use cldp::baseline::{laplace_perturb, LaplaceConfig};
use cldp::{aggregate, perturb_all, CldpConfig, UserSeries};

fn main() -> cldp::Result<()> {
    let hours = 24 * 30;
    let meter = UserSeries::new(1, vec![0.5; 60 * hours]);

    let noisy = laplace_perturb(&meter, &LaplaceConfig::new(1.0, 1.0, 11)?)?;
    let hourly: Vec<f64> = noisy
        .samples
        .chunks_exact(60)
        .map(|w| w.iter().sum())
        .collect();
    let mean = hourly.iter().sum::<f64>() / hourly.len() as f64;
    println!("laplace: mean noisy hourly total over {hours} hours = {mean:.3} (true 30)");

    let users: Vec<UserSeries> = (1..=4)
        .map(|i| UserSeries::new(i, meter.samples.clone()))
        .collect();
    let cfg = CldpConfig::builder(4, 12, 60, 2.0).seed(11).build()?;
    let perturbed = perturb_all(&users, &cfg)?;
    for p in &perturbed {
        let hourly: Vec<f64> = p.samples.chunks_exact(60).map(|w| w.iter().sum()).collect();
        let mean = hourly.iter().sum::<f64>() / hourly.len() as f64;
        println!("cldp user {}: mean hourly total = {mean:.3}", p.user_index);
    }
    let report = aggregate(&perturbed, 4)?;
    println!(
        "cldp collector: mean hourly total across 4 users = {:.3} (true 120)",
        report.per_window_total.iter().sum::<f64>() / report.window_count() as f64
    );
    Ok(())
}
