//! Writes a synthetic pair (sentences, raw f32 embeddings, gold alignment and
//! a matching translation table) for use with the `dacalign` binary.
//!
//!     cargo run --example make_synthetic -- out_dir [beads] [seed]
//!     dacalign align --src out_dir/src.txt --tgt out_dir/tgt.txt \
//!         --src-emb out_dir/src.emb --tgt-emb out_dir/tgt.emb --dim 32

use std::path::PathBuf;

use dacalign::synth::{generate, synthetic_ttable, SynthConfig};

fn main() -> dacalign::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic".into()));
    let beads = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    std::fs::create_dir_all(&dir).map_err(|e| dacalign::Error::io(&dir, e))?;
    let cfg = SynthConfig {
        beads,
        seed,
        ..SynthConfig::default()
    };
    let pair = generate(&cfg);
    let files = pair.write_to_dir(&dir)?;

    let ttable = dir.join("ttable.txt");
    let table = synthetic_ttable();
    std::fs::write(&ttable, table.to_text()).map_err(|e| dacalign::Error::io(&ttable, e))?;

    println!("{} / {} sentences, dim {}", pair.src.len(), pair.tgt.len(), cfg.dim);
    for p in [&files.src, &files.tgt, &files.src_emb, &files.tgt_emb, &files.gold, &ttable] {
        println!("  {}", p.display());
    }
    Ok(())
}
