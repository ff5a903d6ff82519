//! End-to-end divide-and-conquer alignment of a synthetic document pair,
//! compared with whole-document Gale-Church.
//!
//!     cargo run --release --example align_pipeline -- [beads] [seed]

use std::time::Instant;

use dacalign::dp::{align_chunk, GaleChurch};
use dacalign::evaluation::strict_prf;
use dacalign::synth::{generate, SynthConfig};
use dacalign::{AlignmentSet, Chunk, DacConfig, Priors};

fn main() -> dacalign::Result<()> {
    let mut args = std::env::args().skip(1);
    let beads = args.next().and_then(|a| a.parse().ok()).unwrap_or(500);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let pair = generate(&SynthConfig {
        beads,
        seed,
        ..SynthConfig::default()
    });
    let (n, m) = (pair.src.len(), pair.tgt.len());
    println!("{n} source / {m} target sentences, {} gold beads", pair.gold.beads.len());

    let scorer = GaleChurch::from_sentences(&pair.src, &pair.tgt, &Priors::default());
    let config = DacConfig::default();

    let t = Instant::now();
    let dac = dacalign::dac_align(&pair.src_emb, &pair.tgt_emb, &scorer, &config)?;
    let dac_time = t.elapsed();

    let t = Instant::now();
    let full = align_chunk(&Chunk::whole(n, m), &scorer, &config.beads)?;
    let full_time = t.elapsed();
    let full = AlignmentSet::new(full.beads, n, m);

    println!(
        "dac:  {} delimiters, {} leaves ({} banded), largest leaf {}",
        dac.delimiters.len(),
        dac.stats.leaves,
        dac.stats.banded_leaves,
        dac.stats.largest_leaf
    );
    println!("      P/R/F1 {}  in {:?}", strict_prf(&dac.alignment, &pair.gold)?, dac_time);
    println!("full: P/R/F1 {}  in {:?}", strict_prf(&full, &pair.gold)?, full_time);
    Ok(())
}
