//! Synthetic document pairs with planted gold alignments.
//!
//! Each gold bead gets a latent unit vector. Sentences of a 1-1 bead embed as
//! the latent plus noise; sentences on a multi-sentence side also get a
//! private component, so they only partially resemble their counterpart.
//! Null-bead sentences embed at random. Text is built from a synthetic
//! vocabulary where source word `k` translates to target word `k`, with
//! per-word spelling lengths that differ between the two languages.

use std::path::{Path, PathBuf};

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::alignment::{AlignmentSet, Bead, BeadType, Span};
use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::lexical::TTable;

const VOCAB: usize = 500;
const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Number of gold beads.
    pub beads: usize,
    /// Probability that a bead is 1-to-1.
    pub one_to_one: f64,
    pub dim: usize,
    /// Norm of the per-sentence embedding noise relative to the latent.
    pub noise: f32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            beads: 100,
            one_to_one: 0.9,
            dim: 32,
            noise: 0.3,
            seed: 0,
        }
    }
}

/// Non-1-1 bead shapes and their relative weights.
const OTHER_BEADS: [((usize, usize), f64); 5] = [
    ((1, 2), 0.3),
    ((2, 1), 0.3),
    ((1, 0), 0.15),
    ((0, 1), 0.15),
    ((2, 2), 0.1),
];

#[derive(Debug, Clone)]
pub struct SynthPair {
    pub src: Vec<String>,
    pub tgt: Vec<String>,
    pub src_emb: EmbeddingMatrix,
    pub tgt_emb: EmbeddingMatrix,
    pub gold: AlignmentSet,
}

fn spell(word: usize, salt: usize) -> String {
    let len = 2 + (word * 7 + salt * 13) % 9;
    (0..len)
        .map(|k| LETTERS[(word * 31 + k * 17 + salt * 5) % LETTERS.len()] as char)
        .collect()
}

fn src_word(k: usize) -> String {
    format!("{}{}", spell(k, 0), k)
}

fn tgt_word(k: usize) -> String {
    format!("{}{}", spell(k, 1), k)
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    loop {
        let v: Vec<f32> = (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn combine(parts: &[(&[f32], f32)], dim: usize) -> Vec<f32> {
    let mut out = vec![0f32; dim];
    for (v, w) in parts {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += w * x;
        }
    }
    out
}

fn split_words(words: Vec<usize>, parts: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    debug_assert!(words.len() >= parts);
    let mut cuts: Vec<usize> = (1..words.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for c in cuts.into_iter().chain([words.len()]) {
        out.push(words[start..c].to_vec());
        start = c;
    }
    out
}

/// Generates one document pair.
pub fn generate(cfg: &SynthConfig) -> SynthPair {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let others = WeightedIndex::new(OTHER_BEADS.iter().map(|(_, w)| *w)).expect("positive weights");
    let dim = cfg.dim;

    let mut src_words: Vec<Vec<usize>> = Vec::new();
    let mut tgt_words: Vec<Vec<usize>> = Vec::new();
    let mut src_rows: Vec<Vec<f32>> = Vec::new();
    let mut tgt_rows: Vec<Vec<f32>> = Vec::new();
    let mut beads = Vec::with_capacity(cfg.beads);

    for _ in 0..cfg.beads {
        let (a, b) = if rng.gen_bool(cfg.one_to_one) {
            (1, 1)
        } else {
            OTHER_BEADS[others.sample(&mut rng)].0
        };
        let src_span = Span::new(src_words.len(), src_words.len() + a);
        let tgt_span = Span::new(tgt_words.len(), tgt_words.len() + b);
        let latent = unit(&mut rng, dim);

        let content: Vec<usize> = (0..rng.gen_range(4..24) * a.max(b).max(1))
            .map(|_| rng.gen_range(0..VOCAB))
            .collect();
        for (side, count, words_out, rows_out) in [
            (0, a, &mut src_words, &mut src_rows),
            (1, b, &mut tgt_words, &mut tgt_rows),
        ] {
            if count == 0 {
                continue;
            }
            let mut words = content.clone();
            if side == 1 {
                // light translation noise: drop or insert a word now and then
                words.retain(|_| !rng.gen_bool(0.08));
                while words.len() < count {
                    words.push(rng.gen_range(0..VOCAB));
                }
                if rng.gen_bool(0.3) {
                    let at = rng.gen_range(0..=words.len());
                    words.insert(at, rng.gen_range(0..VOCAB));
                }
            }
            let null_bead = a == 0 || b == 0;
            for part in split_words(words, count, &mut rng) {
                let noise = unit(&mut rng, dim);
                let row = if null_bead {
                    unit(&mut rng, dim)
                } else if count == 1 {
                    combine(&[(&latent, 1.0), (&noise, cfg.noise)], dim)
                } else {
                    let private = unit(&mut rng, dim);
                    let w = 1.5 * ((count - 1) as f32).sqrt();
                    combine(&[(&latent, 1.0), (&private, w), (&noise, cfg.noise)], dim)
                };
                words_out.push(part);
                rows_out.push(row);
            }
        }
        beads.push(Bead::new(src_span, tgt_span));
    }

    let render = |doc: &[Vec<usize>], word: fn(usize) -> String| -> Vec<String> {
        doc.iter()
            .map(|ws| ws.iter().map(|&k| word(k)).collect::<Vec<_>>().join(" "))
            .collect()
    };
    let src = render(&src_words, src_word);
    let tgt = render(&tgt_words, tgt_word);
    let n_src = src.len();
    let n_tgt = tgt.len();
    SynthPair {
        src,
        tgt,
        src_emb: EmbeddingMatrix::from_rows(&src_rows, dim).expect("finite rows"),
        tgt_emb: EmbeddingMatrix::from_rows(&tgt_rows, dim).expect("finite rows"),
        gold: AlignmentSet::new(beads, n_src, n_tgt),
    }
}

/// Generates pairs until the gold has at least `min_src` source sentences;
/// convenient for size-targeted benchmarks.
pub fn generate_with_sentences(min_src: usize, one_to_one: f64, noise: f32, seed: u64) -> SynthPair {
    let mut beads = min_src;
    loop {
        let pair = generate(&SynthConfig {
            beads,
            one_to_one,
            noise,
            seed,
            ..SynthConfig::default()
        });
        if pair.src.len() >= min_src {
            return pair;
        }
        beads += (min_src - pair.src.len()).max(1);
    }
}

/// Translation table for the synthetic vocabulary: each word translates to
/// its counterpart with probability 0.8, plus a few confusable neighbours.
pub fn synthetic_ttable() -> TTable {
    let mut table = TTable::default();
    for k in 0..VOCAB {
        table.insert(&src_word(k), &tgt_word(k), 0.8).expect("valid probability");
        table
            .insert(&src_word(k), &tgt_word((k + 1) % VOCAB), 0.05)
            .expect("valid probability");
    }
    table
}

/// Random documents of the given sizes with random embeddings, some rows
/// zeroed. No meaningful gold; used for fuzzing.
pub fn random_pair(n_src: usize, n_tgt: usize, dim: usize, zero_fraction: f64, seed: u64) -> (Vec<String>, Vec<String>, EmbeddingMatrix, EmbeddingMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = |n: usize, word: fn(usize) -> String| -> Vec<String> {
        (0..n)
            .map(|_| {
                (0..rng.gen_range(0..20))
                    .map(|_| word(rng.gen_range(0..VOCAB)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    };
    let src = doc(n_src, src_word);
    let tgt = doc(n_tgt, tgt_word);
    let mut emb = |n: usize| {
        let data: Vec<f32> = (0..n)
            .flat_map(|_| {
                let zero = rng.gen_bool(zero_fraction);
                (0..dim)
                    .map(|_| if zero { 0.0 } else { rng.gen_range(-1.0f32..1.0) })
                    .collect::<Vec<_>>()
            })
            .collect();
        EmbeddingMatrix::from_raw(data, dim).expect("finite rows")
    };
    let src_emb = emb(n_src);
    let tgt_emb = emb(n_tgt);
    (src, tgt, src_emb, tgt_emb)
}

/// Paths written by [`SynthPair::write_to_dir`].
#[derive(Debug, Clone)]
pub struct SynthFiles {
    pub src: PathBuf,
    pub tgt: PathBuf,
    pub src_emb: PathBuf,
    pub tgt_emb: PathBuf,
    pub gold: PathBuf,
}

impl SynthPair {
    pub fn gold_types(&self) -> impl Iterator<Item = BeadType> + '_ {
        self.gold.beads.iter().map(Bead::bead_type)
    }

    /// Writes sentences, raw embeddings and the gold alignment under `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<SynthFiles> {
        let files = SynthFiles {
            src: dir.join("src.txt"),
            tgt: dir.join("tgt.txt"),
            src_emb: dir.join("src.emb"),
            tgt_emb: dir.join("tgt.emb"),
            gold: dir.join("gold.txt"),
        };
        let write = |path: &Path, text: String| std::fs::write(path, text).map_err(|e| Error::io(path, e));
        let lines = |doc: &[String]| doc.iter().map(|s| format!("{s}\n")).collect::<String>();
        write(&files.src, lines(&self.src))?;
        write(&files.tgt, lines(&self.tgt))?;
        write(&files.gold, self.gold.to_text())?;
        self.src_emb.save(&files.src_emb)?;
        self.tgt_emb.save(&files.tgt_emb)?;
        Ok(files)
    }
}
