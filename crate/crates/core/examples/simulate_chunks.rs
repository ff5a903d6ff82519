//! Expected largest chunk size under random arrangements of 1-1 beads:
//! Monte Carlo next to exact enumeration, then a sweep over n as CSV.
//!
//!     cargo run --release --example simulate_chunks

use dacalign::simulator::{self, SimConfig};

fn main() -> dacalign::Result<()> {
    println!("n  r     monte-carlo          exact");
    for (n, r) in [(4, 0.5), (8, 0.75), (12, 0.9)] {
        let est = simulator::expected_max_chunk(&SimConfig {
            n,
            r,
            trials: 100_000,
            seed: simulator::DEFAULT_SEED,
        })?;
        let exact = simulator::exhaustive_expected_max_chunk(n, r)?;
        println!("{n:<2} {r:<5} {:.4} +- {:.4}    {exact:.4}", est.mean, est.stderr);
    }
    println!("worst case n=14, 2 non-1-1 beads: {}", simulator::worst_case_max_chunk(14, 2)?);

    let rows = simulator::sweep(&[100, 1_000, 10_000], &[0.9], 10_000, simulator::DEFAULT_SEED, false)?;
    simulator::write_csv(&rows, std::io::stdout().lock()).map_err(|e| dacalign::Error::io("<stdout>", e))?;
    Ok(())
}
