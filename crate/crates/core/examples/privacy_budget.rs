//! Tabulates the epsilon proxy and the break probability over a few
//! parameter settings.
//!
//! cargo run -p cldp --example privacy_budget

use cldp::PrivacyReport;

fn main() -> cldp::Result<()> {
    println!(
        "{:>4} {:>5} {:>4} {:>5} {:>12} {:>14}",
        "k", "l", "u", "A", "eps proxy", "log10 Pbreak"
    );
    for (k, l, u, a) in [
        (10, 5, 3, 3.0),
        (1, 200, 4, 3.0),
        (2, 200, 4, 3.0),
        (40, 200, 4, 3.0),
        (40, 200, 16, 3.0),
        (40, 200, 4, 4.0),
    ] {
        let r = PrivacyReport::compute(k, l, u, a, 1.0)?;
        println!(
            "{k:>4} {l:>5} {u:>4} {a:>5} {:>12.4} {:>14.1}{}",
            r.epsilon_proxy,
            r.break_probability.log10,
            if r.no_tossing_entropy() {
                "  (no tossing entropy)"
            } else {
                ""
            }
        );
    }
    Ok(())
}
