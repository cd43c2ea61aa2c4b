//! Brute-force verification of the recursion engine: on small windows and
//! coarse grids, enumerate every endpoint rate assignment per step and
//! state, take the componentwise minimum, and compare with the engine.
//!
//! ```bash
//! cargo run --release -p impois --example oracle_check
//! ```

use impois::{brute_force_phi, phi_apply, OracleBudget, RateInterval, TimeGrid, WindowFunction};

fn main() -> impois::Result<()> {
    let rates = RateInterval::new(0.7, 1.9)?;
    let g = WindowFunction::new(0, vec![1.0, -0.5, 2.0, 0.25], 0.25)?;
    let grid = TimeGrid::uniform(0.0, 0.6, 3)?;
    let budget = OracleBudget::new(4, 3)?;

    let engine = phi_apply(&rates, &grid, &g)?;
    let oracle = brute_force_phi(&rates, &grid, &g, &budget)?;

    println!("window function    {:?}", g.values());
    println!("engine recursion   {:?}", engine.values());
    println!("enumeration (2^9 assignments) {:?}", oracle.values());

    let worst = engine
        .values()
        .iter()
        .zip(oracle.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("largest deviation  {worst:e}");
    assert!(worst <= 1e-12);
    println!("engine and enumeration agree.");
    Ok(())
}
