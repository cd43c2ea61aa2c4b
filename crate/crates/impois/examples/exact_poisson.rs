//! Exact quantities of the precise Poisson process: pmf values, transition
//! probabilities and series expectations.
//!
//! ```bash
//! cargo run --release -p impois --example exact_poisson
//! ```

use impois::{pmf, poisson_expectation, transition_probability, FunctionSpec, PoissonMean};

fn main() -> impois::Result<()> {
    let mean = PoissonMean::new(2.0)?;
    println!("pmf with mean 2:");
    for k in 0..=6 {
        println!("  P(K = {k}) = {:.10}", pmf(mean, k));
    }

    println!("\ntransition probabilities at rate 1.5 over 0.8 time units:");
    for y in 2..=6 {
        let p = transition_probability(1.5, 0.8, 2, y)?;
        println!("  P(X_0.8 = {y} | X_0 = 2) = {p:.10}");
    }
    println!(
        "  backward moves are impossible: P(X_0.8 = 1 | X_0 = 2) = {}",
        transition_probability(1.5, 0.8, 2, 1)?
    );

    // series expectation with an a-priori truncation guarantee
    let second_moment = FunctionSpec::polynomial(0.0, 1.0, 2)?;
    let v = poisson_expectation(1.0, 0.0, 1.0, 0, &second_moment, 1e-10)?;
    println!("\nE(X_1^2 | X_0 = 0) at rate 1 = {v:.10} (exact: 2)");
    Ok(())
}
