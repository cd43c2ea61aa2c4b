//! The no-event and one-event probability curves over a time range, for
//! both process sets, as CSV on standard output. Pipe into a plotter to
//! see the bands.
//!
//! ```bash
//! cargo run --release -p impois --example transition_probability_curves > curves.csv
//! ```

use impois::{lower_expectation, FunctionSpec, RateInterval, SetKind};

fn main() -> impois::Result<()> {
    let rates = RateInterval::new(1.0, 2.0)?;
    let eps = 1e-5;
    let functions = [
        ("no_event", FunctionSpec::indicator_eq(0)),
        ("one_event", FunctionSpec::indicator_eq(1)),
    ];

    println!(
        "target,t,lower_consistent,upper_consistent,lower_poisson,\
         upper_poisson"
    );
    for (name, f) in &functions {
        for i in 0..=16 {
            let t = 0.25 * i as f64;
            let c = lower_expectation(SetKind::ConsistentSet, &rates, 0.0, t, 0, f, eps)?;
            let p = lower_expectation(SetKind::PoissonSet, &rates, 0.0, t, 0, f, eps)?;
            println!(
                "{name},{t},{:.9},{:.9},{:.9},{:.9}",
                c.lower, c.upper, p.lower, p.upper
            );
        }
    }
    Ok(())
}
