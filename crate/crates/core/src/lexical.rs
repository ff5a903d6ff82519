//! Bag-of-words lexical bead scorer backed by a word-translation table.
//!
//! The cost of a bead is the negative log of the bead prior plus, for each
//! target token `t`, the negative log of the IBM-1 style likelihood
//!
//! ```text
//! (floor + sum_s p(t | s)) / (|source tokens| + 1)
//! ```
//!
//! where the `+ 1` is the NULL slot. There is no length term. Null beads pay
//! only the prior.
//!
//! Because every target token of a non-null bead costs at least
//! `ln(|source tokens| + 1)`, long sentences are cheaper to leave unaligned
//! than to pair. The scorer is therefore most useful inside divide and conquer,
//! where mined delimiters pin most 1-1 beads.

use std::collections::HashMap;
use std::path::Path;

use crate::alignment::{BeadType, Span};
use crate::dp::{BeadScorer, PriorTable, Priors};
use crate::error::{Error, Result};

pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Word translation probabilities `p(target | source)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TTable {
    entries: HashMap<(String, String), f64>,
    floor: f64,
}

impl Default for TTable {
    fn default() -> Self {
        TTable {
            entries: HashMap::new(),
            floor: DEFAULT_FLOOR,
        }
    }
}

impl TTable {
    pub fn with_floor(floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor.is_finite()) {
            return Err(Error::out_of_range("floor", floor, "positive"));
        }
        Ok(TTable {
            entries: HashMap::new(),
            floor,
        })
    }

    pub fn insert(&mut self, src: &str, tgt: &str, prob: f64) -> Result<()> {
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::out_of_range("probability", prob, "in (0, 1]"));
        }
        self.entries.insert((src.to_owned(), tgt.to_owned()), prob);
        Ok(())
    }

    /// `p(tgt | src)`, or the floor for unseen pairs.
    pub fn prob(&self, src: &str, tgt: &str) -> f64 {
        // TODO: avoid the two allocations per lookup with a borrowed-pair key.
        self.entries
            .get(&(src.to_owned(), tgt.to_owned()))
            .copied()
            .unwrap_or(self.floor)
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `src tgt prob` lines; later duplicates overwrite earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = TTable::default();
        for (lineno, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let [src, tgt, prob] = fields[..] else {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            };
            let prob: f64 = prob
                .parse()
                .map_err(|_| err(format!("bad probability {prob:?}")))?;
            if !(prob > 0.0 && prob <= 1.0) {
                return Err(err(format!("probability {prob} outside (0, 1]")));
            }
            table.entries.insert((src.to_owned(), tgt.to_owned()), prob);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Entries as `src tgt prob` lines, sorted by word pair.
    pub fn to_text(&self) -> String {
        let mut entries: Vec<_> = self.entries.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        entries
            .into_iter()
            .map(|((s, t), p)| format!("{s} {t} {p}\n"))
            .collect()
    }
}

/// Whitespace tokenisation.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_owned).collect()
}

/// Lexical cost of pairing the given source sentences with the given target
/// sentences (each as a token list).
pub fn lexical_bead_cost<S: AsRef<str>>(
    src: &[Vec<S>],
    tgt: &[Vec<S>],
    table: &TTable,
    priors: &Priors,
) -> Result<f64> {
    let bead = BeadType::new(src.len(), tgt.len());
    let prior = priors.neg_log(bead)?;
    if bead.is_null() {
        return Ok(prior);
    }
    let src_tokens: Vec<&str> = src.iter().flatten().map(AsRef::as_ref).collect();
    let norm = (src_tokens.len() + 1) as f64;
    let mut cost = prior;
    for t in tgt.iter().flatten() {
        let mass: f64 = src_tokens.iter().map(|s| table.prob(s, t.as_ref())).sum();
        cost -= ((table.floor + mass) / norm).ln();
    }
    Ok(cost)
}

/// [`BeadScorer`] over two tokenised documents with interned vocabularies.
#[derive(Debug, Clone)]
pub struct LexicalScorer {
    src: Vec<Vec<u32>>,
    tgt: Vec<Vec<u32>>,
    probs: HashMap<(u32, u32), f64>,
    floor: f64,
    priors: PriorTable,
}

fn intern<S: AsRef<str>>(doc: &[S], vocab: &mut HashMap<String, u32>) -> Vec<Vec<u32>> {
    doc.iter()
        .map(|sent| {
            sent.as_ref()
                .split_whitespace()
                .map(|tok| {
                    let next = vocab.len() as u32;
                    *vocab.entry(tok.to_owned()).or_insert(next)
                })
                .collect()
        })
        .collect()
}

impl LexicalScorer {
    pub fn new<S: AsRef<str>>(src: &[S], tgt: &[S], table: &TTable, priors: &Priors) -> Self {
        let mut src_vocab = HashMap::new();
        let mut tgt_vocab = HashMap::new();
        let src_ids = intern(src, &mut src_vocab);
        let tgt_ids = intern(tgt, &mut tgt_vocab);
        let probs = table
            .entries
            .iter()
            .filter_map(|((s, t), &p)| Some(((*src_vocab.get(s)?, *tgt_vocab.get(t)?), p)))
            .collect();
        LexicalScorer {
            src: src_ids,
            tgt: tgt_ids,
            probs,
            floor: table.floor,
            priors: priors.table(),
        }
    }
}

impl BeadScorer for LexicalScorer {
    fn doc_sizes(&self) -> (usize, usize) {
        (self.src.len(), self.tgt.len())
    }

    fn supports(&self, bead: BeadType) -> bool {
        self.priors.supports(bead)
    }

    fn cost(&self, src: Span, tgt: Span) -> f64 {
        let prior = self.priors.neg_log(src.len(), tgt.len());
        if src.is_empty() || tgt.is_empty() {
            return prior;
        }
        let src_tokens = || self.src[src.indices()].iter().flatten();
        let norm = (src_tokens().count() + 1) as f64;
        let mut cost = prior;
        for &t in self.tgt[tgt.indices()].iter().flatten() {
            let mass: f64 = src_tokens()
                .map(|&s| self.probs.get(&(s, t)).copied().unwrap_or(self.floor))
                .sum();
            cost -= ((self.floor + mass) / norm).ln();
        }
        cost
    }
}
