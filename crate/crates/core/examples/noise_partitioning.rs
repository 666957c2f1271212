//! Shows how one sine period is divided among users and what noise each
//! user may draw.
//!
//! cargo run -p cldp --example noise_partitioning

use cldp::{partition_interval, sample_noise_vector, tossing_grid, CldpConfig, NoiseMode};

fn main() -> cldp::Result<()> {
    let cfg = CldpConfig::builder(4, 5, 10, 3.0).seed(42).build()?;
    println!("{cfg}\n");

    let mut total = 0.0;
    for user in 1..=cfg.num_users() {
        let part = partition_interval(user, &cfg)?;
        let grid = tossing_grid(user, &cfg)?;
        total += grid.amplitudes.iter().sum::<f64>();
        println!("user {user}: interval [{:.3}, {:.3})", part.start, part.end);
        for (t, a) in grid.points.iter().zip(&grid.amplitudes) {
            println!("    t = {t:.3}   y(t) = {a:+.4}");
        }
    }
    println!("\nsum of all grid amplitudes: {total:+.2e}\n");

    let shuffled = sample_noise_vector(2, &cfg)?;
    println!("user 2, shuffle: {:?}", round(&shuffled.values));
    let tossed = sample_noise_vector(2, &cfg.to_builder().mode(NoiseMode::Toss).build()?)?;
    println!("user 2, toss:    {:?}", round(&tossed.values));
    Ok(())
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e3).round() / 1e3).collect()
}
