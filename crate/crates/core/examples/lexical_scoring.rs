//! Lexical (translation-table) scoring versus Gale-Church length scoring on
//! the same synthetic pair, with the full DP and inside divide and conquer.
//!
//!     cargo run --release --example lexical_scoring

use dacalign::dp::{align_chunk, BeadSet, GaleChurch};
use dacalign::evaluation::strict_prf;
use dacalign::lexical::{lexical_bead_cost, tokenize, LexicalScorer};
use dacalign::synth::{generate, synthetic_ttable, SynthConfig};
use dacalign::{AlignmentSet, BeadType, Chunk, DacConfig, Priors};

fn main() -> dacalign::Result<()> {
    let pair = generate(&SynthConfig {
        beads: 200,
        one_to_one: 0.8,
        seed: 5,
        ..SynthConfig::default()
    });
    let table = synthetic_ttable();
    let priors = Priors::default();
    let (n, m) = (pair.src.len(), pair.tgt.len());
    let chunk = Chunk::whole(n, m);
    let set = BeadSet::standard();

    let s = vec![tokenize(&pair.src[0])];
    let t = vec![tokenize(&pair.tgt[0])];
    println!("first sentence pair: {:?} -> {:?}", s[0], t[0]);
    println!("1-1 cost of first pair: {:.3}", lexical_bead_cost(&s, &t, &table, &priors)?);
    println!("1-0 prior-only cost:    {:.3}", priors.neg_log(BeadType::new(1, 0))?);

    let lexical = LexicalScorer::new(&pair.src, &pair.tgt, &table, &priors);
    let lex = AlignmentSet::new(align_chunk(&chunk, &lexical, &set)?.beads, n, m);
    let gc = GaleChurch::from_sentences(&pair.src, &pair.tgt, &priors);
    let len = AlignmentSet::new(align_chunk(&chunk, &gc, &set)?.beads, n, m);

    let dac_lex = dacalign::dac_align(&pair.src_emb, &pair.tgt_emb, &lexical, &DacConfig::default())?;

    println!("lexical      P/R/F1 {}", strict_prf(&lex, &pair.gold)?);
    println!("gale-church  P/R/F1 {}", strict_prf(&len, &pair.gold)?);
    println!("dac+lexical  P/R/F1 {}", strict_prf(&dac_lex.alignment, &pair.gold)?);
    Ok(())
}
