//! Strict P/R/F1 and delimiter metrics on small hand-written alignments in
//! the text format (`src indices:tgt indices`, one bead per line).
//!
//!     cargo run --example evaluate_alignment

use dacalign::evaluation::{delimiter_prf, strict_prf, true_hard_delimiters};
use dacalign::AlignmentSet;

const GOLD: &str = "0:0\n1:1\n2:2\n3,4:3\n5:4\n6:5\n7:6\n8:\n";
const TEST: &str = "0:0\n1:1\n2:2\n3:3\n4:4\n5:5\n6:6\n7:\n8:\n";

fn main() -> dacalign::Result<()> {
    let gold = AlignmentSet::parse(GOLD)?;
    let test = AlignmentSet::parse(TEST)?;
    gold.validate()?;
    test.validate()?;
    println!("P\tR\tF1");
    println!("{}", strict_prf(&test, &gold)?);

    let truth = true_hard_delimiters(&gold);
    println!("gold hard delimiters: {truth:?}");
    println!("delimiters {}", delimiter_prf(&[(1, 1), (5, 4)], &gold));
    Ok(())
}
