//! Unbounded functions under a growth envelope: the engine evaluates ever
//! wider truncations until the envelope's tail bound and the successive
//! values both settle under the tolerance.
//!
//! ```bash
//! cargo run --release -p impois --example growth_functions
//! ```

use impois::{lower_prevision_growth, upper_prevision, FunctionSpec, RateInterval};

fn main() -> impois::Result<()> {
    let rates = RateInterval::new(0.8, 1.6)?;
    let eps = 1e-3;

    // identity: expected count, also available in closed form
    let identity = FunctionSpec::identity();
    let r = lower_prevision_growth(&rates, 0.0, 1.5, 2, &identity, eps)?;
    println!("E(X_1.5 | X_0 = 2), rates in [0.8, 1.6]:");
    println!(
        "  recursion:   [{:.6}, {:.6}]  (window top {}, {} steps)",
        r.lower, r.upper, r.truncation_top, r.steps
    );
    println!(
        "  closed form: [{:.6}, {:.6}]",
        2.0 + 0.8 * 1.5,
        2.0 + 1.6 * 1.5
    );

    // a quadratic: second moments of the count
    let square = FunctionSpec::polynomial(0.0, 1.0, 2)?;
    let r = upper_prevision(&rates, 0.0, 1.0, 0, &square, eps)?;
    println!("\nE(X_1^2 | X_0 = 0):");
    println!("  bounds [{:.6}, {:.6}]", r.lower, r.upper);
    println!(
        "  precise values at the endpoints: {:.6} and {:.6}",
        0.8 + 0.8 * 0.8,
        1.6 + 1.6 * 1.6
    );
    Ok(())
}
