//! Closed-form bounds on the expected number of events: the rate interval
//! translates directly into `x + rate * duration` at both ends.
//!
//! ```bash
//! cargo run --release -p impois --example expected_counts
//! ```

use impois::{expected_count_bounds, RateInterval};

fn main() -> impois::Result<()> {
    let rates = RateInterval::new(1.0, 2.0)?;
    println!("rate interval [1, 2], starting from 3 events at time 0:");
    for s in [0.5, 1.0, 2.0, 4.0] {
        let (lo, hi) = expected_count_bounds(&rates, 0.0, s, 3)?;
        println!("  E(X_{s}) in [{lo}, {hi}]");
    }

    let degenerate = RateInterval::degenerate(1.3)?;
    let (lo, hi) = expected_count_bounds(&degenerate, 0.0, 2.0, 0)?;
    println!("\ndegenerate interval [1.3, 1.3]: both ends agree at {lo} = {hi}");
    Ok(())
}
