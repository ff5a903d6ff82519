//! Bitext mining on planted embeddings: candidates, the longest monotone
//! chain, hard delimiters and the chunks they induce, scored against gold.
//!
//!     cargo run --release --example mine_delimiters -- [beads] [noise]

use dacalign::evaluation::{delimiter_prf, true_hard_delimiters};
use dacalign::miner::{self, IndexPair};
use dacalign::synth::{generate, SynthConfig};

fn main() -> dacalign::Result<()> {
    let mut args = std::env::args().skip(1);
    let beads = args.next().and_then(|a| a.parse().ok()).unwrap_or(300);
    let noise = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.3);

    let pair = generate(&SynthConfig {
        beads,
        noise,
        seed: 11,
        ..SynthConfig::default()
    });
    let mined = miner::mine(&pair.src_emb, &pair.tgt_emb, miner::DEFAULT_K_NN, miner::DEFAULT_COS_THRESHOLD)?;
    println!("candidates       {}", mined.candidates.len());
    println!("monotone chain   {}", mined.chain.len());
    println!("hard delimiters  {}", mined.delimiters.len());

    let seg = miner::segment(pair.src.len(), pair.tgt.len(), &mined.delimiters);
    let largest = seg.chunks.iter().map(|c| c.size()).max().unwrap_or(0);
    println!("chunks           {} (largest side {largest})", seg.chunks.len());

    for d in mined.delimiters.iter().take(5) {
        println!("  {}\t{}\t{:.6}\t{:.6}", d.src_idx, d.tgt_idx, d.cosine, d.margin);
    }

    let found: Vec<(usize, usize)> = mined.delimiters.iter().map(IndexPair::pair).collect();
    println!("gold delimiters  {}", true_hard_delimiters(&pair.gold).len());
    println!("P/R/F1           {}", delimiter_prf(&found, &pair.gold));
    Ok(())
}
