//! Full versus banded bead DP on one large chunk. The band follows the
//! gold 1-1 beads as anchors; a narrow band may cost more than the optimum.
//!
//!     cargo run --release --example banded_dp -- [beads]

use std::time::Instant;

use dacalign::dp::{align_chunk, banded_align, sequence_cost, BeadSet, GaleChurch};
use dacalign::synth::{generate, SynthConfig};
use dacalign::{Chunk, Priors};

fn main() -> dacalign::Result<()> {
    let beads = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    let pair = generate(&SynthConfig {
        beads,
        seed: 3,
        ..SynthConfig::default()
    });
    let chunk = Chunk::whole(pair.src.len(), pair.tgt.len());
    let scorer = GaleChurch::from_sentences(&pair.src, &pair.tgt, &Priors::default());
    let set = BeadSet::standard();

    let anchors: Vec<(usize, usize)> = pair
        .gold
        .beads
        .iter()
        .filter(|b| b.src.len() == 1 && b.tgt.len() == 1)
        .step_by(10)
        .map(|b| (b.src.start, b.tgt.start))
        .collect();

    let t = Instant::now();
    let full = align_chunk(&chunk, &scorer, &set)?;
    println!("full        cost {:>12.3}  {:?}", full.cost, t.elapsed());

    for band in [2, 5, 10, 40] {
        let t = Instant::now();
        let banded = banded_align(&chunk, &scorer, &set, &anchors, band)?;
        println!("band {band:>3}    cost {:>12.3}  {:?}", banded.cost, t.elapsed());
    }
    println!("gold        cost {:>12.3}", sequence_cost(&scorer, &pair.gold.beads));
    Ok(())
}
