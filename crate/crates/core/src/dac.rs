//! Divide-and-conquer alignment.
//!
//! 1. Mine hard delimiters over the whole document pair and cut it into
//!    chunks.
//! 2. Chunks no larger than `max_chunk` on either side are aligned with the
//!    full DP.
//! 3. Larger chunks are re-mined locally. New delimiters split them further
//!    (up to `max_depth` levels); otherwise the local monotone chain, without
//!    the triple rule, serves as anchors for the banded DP. With no anchors at
//!    all the chunk falls back to the full DP.
//! 4. Delimiter beads and chunk alignments are merged in document order.
//!
//! Planning (all mining) happens before alignment, and chunk alignments run on
//! a pool of `jobs` workers. Results are collected in chunk order, so the
//! output does not depend on the worker count.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::alignment::{sort_beads, AlignmentSet, Bead, Chunk, Delimiter};
use crate::dp::{align_chunk, banded_align, Aligned, BeadScorer, BeadSet};
use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::miner::{self, IndexPair};

#[derive(Debug, Clone)]
pub struct DacConfig {
    /// Minimum cosine for a mined 1-to-1 candidate.
    pub cos_threshold: f32,
    /// Neighbourhood size for margin denominators.
    pub k_nn: usize,
    /// Largest chunk side length aligned with the full DP.
    pub max_chunk: usize,
    /// Half-width of the band around anchors.
    pub band: usize,
    /// Maximum levels of local re-mining.
    pub max_depth: usize,
    /// Worker threads for chunk alignment and k-NN rows.
    pub jobs: usize,
    pub beads: BeadSet,
}

impl Default for DacConfig {
    fn default() -> Self {
        DacConfig {
            cos_threshold: miner::DEFAULT_COS_THRESHOLD,
            k_nn: miner::DEFAULT_K_NN,
            max_chunk: 200,
            band: 10,
            max_depth: 3,
            jobs: 1,
            beads: BeadSet::default(),
        }
    }
}

impl DacConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.cos_threshold) {
            return Err(Error::out_of_range("cos_threshold", self.cos_threshold, "in [-1, 1]"));
        }
        if self.k_nn == 0 {
            return Err(Error::out_of_range("k_nn", self.k_nn, "positive"));
        }
        if self.max_chunk == 0 {
            return Err(Error::out_of_range("max_chunk", self.max_chunk, "positive"));
        }
        if self.jobs == 0 {
            return Err(Error::out_of_range("jobs", self.jobs, "positive"));
        }
        Ok(())
    }

    /// Runs `f` on a dedicated pool of `jobs` threads.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// How a leaf chunk is aligned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Leaf {
    Full(Chunk),
    Banded { chunk: Chunk, anchors: Vec<(usize, usize)> },
}

impl Leaf {
    pub fn chunk(&self) -> &Chunk {
        match self {
            Leaf::Full(c) | Leaf::Banded { chunk: c, .. } => c,
        }
    }

    fn align<S: BeadScorer + ?Sized>(&self, scorer: &S, config: &DacConfig) -> Result<Aligned> {
        match self {
            Leaf::Full(chunk) => align_chunk(chunk, scorer, &config.beads),
            Leaf::Banded { chunk, anchors } => banded_align(chunk, scorer, &config.beads, anchors, config.band),
        }
    }
}

/// Every delimiter (global and local) plus the leaves left to align.
#[derive(Debug, Clone, Default)]
pub struct Plan {
    pub delimiters: Vec<Delimiter>,
    pub leaves: Vec<Leaf>,
}

impl Plan {
    fn extend(&mut self, other: Plan) {
        self.delimiters.extend(other.delimiters);
        self.leaves.extend(other.leaves);
    }

    fn fixed_beads(&self) -> Vec<Bead> {
        self.delimiters
            .iter()
            .map(|d| Bead::one_to_one(d.src_idx, d.tgt_idx))
            .collect()
    }
}

fn check_embeddings(src: &EmbeddingMatrix, tgt: &EmbeddingMatrix, sizes: (usize, usize)) -> Result<()> {
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch {
            left: src.dim(),
            right: tgt.dim(),
        });
    }
    for (side, emb, n) in [("source", src, sizes.0), ("target", tgt, sizes.1)] {
        if emb.n() != n {
            return Err(Error::Validation(format!(
                "{side} embeddings have {} rows but the document has {n} sentences",
                emb.n()
            )));
        }
    }
    Ok(())
}

/// Local re-mining inside an oversized chunk. Returns the sub-plan for it.
fn refine(chunk: Chunk, src: &EmbeddingMatrix, tgt: &EmbeddingMatrix, config: &DacConfig, depth: usize) -> Result<Plan> {
    if chunk.src.is_empty() || chunk.tgt.is_empty() {
        return Ok(Plan {
            delimiters: Vec::new(),
            leaves: vec![Leaf::Full(chunk)],
        });
    }
    let local_src = src.slice(chunk.src.indices());
    let local_tgt = tgt.slice(chunk.tgt.indices());
    let mined = miner::mine(&local_src, &local_tgt, config.k_nn, config.cos_threshold)?;
    let shift = |(i, j): (usize, usize)| (i + chunk.src.start, j + chunk.tgt.start);

    if !mined.delimiters.is_empty() && depth < config.max_depth {
        let delimiters: Vec<Delimiter> = mined
            .delimiters
            .iter()
            .map(|d| {
                let (src_idx, tgt_idx) = shift(d.pair());
                Delimiter { src_idx, tgt_idx, ..*d }
            })
            .collect();
        let seg = miner::segment_range(chunk, &delimiters);
        let mut plan = Plan {
            delimiters,
            leaves: Vec::new(),
        };
        for sub in seg.chunks {
            if sub.size() <= config.max_chunk {
                plan.leaves.push(Leaf::Full(sub));
            } else {
                plan.extend(refine(sub, src, tgt, config, depth + 1)?);
            }
        }
        return Ok(plan);
    }

    let anchors: Vec<(usize, usize)> = mined.chain.iter().map(|c| shift(c.pair())).collect();
    let leaf = if anchors.is_empty() {
        Leaf::Full(chunk)
    } else {
        Leaf::Banded { chunk, anchors }
    };
    Ok(Plan {
        delimiters: Vec::new(),
        leaves: vec![leaf],
    })
}

/// Mines delimiters globally and recursively; no alignment is done.
/// Must be called inside the worker pool to honour `config.jobs`.
fn plan_in_pool(src: &EmbeddingMatrix, tgt: &EmbeddingMatrix, config: &DacConfig) -> Result<Plan> {
    let mined = miner::mine(src, tgt, config.k_nn, config.cos_threshold)?;
    let seg = miner::segment(src.n(), tgt.n(), &mined.delimiters);
    let sub_plans: Vec<Plan> = seg
        .chunks
        .par_iter()
        .map(|&chunk| {
            if chunk.size() <= config.max_chunk {
                Ok(Plan {
                    delimiters: Vec::new(),
                    leaves: vec![Leaf::Full(chunk)],
                })
            } else {
                refine(chunk, src, tgt, config, 0)
            }
        })
        .collect::<Result<_>>()?;
    let mut plan = Plan {
        delimiters: mined.delimiters,
        leaves: Vec::new(),
    };
    for p in sub_plans {
        plan.extend(p);
    }
    plan.delimiters.sort_by_key(|d| d.pair());
    Ok(plan)
}

/// The global-plus-recursive delimiter set and leaf chunks for a pair.
pub fn plan(src: &EmbeddingMatrix, tgt: &EmbeddingMatrix, config: &DacConfig) -> Result<Plan> {
    config.validate()?;
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch {
            left: src.dim(),
            right: tgt.dim(),
        });
    }
    config.install(|| plan_in_pool(src, tgt, config))?
}

/// Concatenates delimiter beads and chunk alignments into one validated set.
pub fn merge(fixed: &[Bead], chunk_alignments: &[Vec<Bead>], n_src: usize, n_tgt: usize) -> Result<AlignmentSet> {
    let mut beads: Vec<Bead> = fixed.to_vec();
    for a in chunk_alignments {
        beads.extend_from_slice(a);
    }
    sort_beads(&mut beads);
    let set = AlignmentSet::new(beads, n_src, n_tgt);
    set.validate()?;
    Ok(set)
}

#[derive(Debug, Clone, Default)]
pub struct DacStats {
    pub leaves: usize,
    pub banded_leaves: usize,
    pub largest_leaf: usize,
    pub mining_time: Duration,
    pub alignment_time: Duration,
}

#[derive(Debug, Clone)]
pub struct DacOutput {
    pub alignment: AlignmentSet,
    /// Every hard delimiter used, sorted; each appears as a 1-1 bead.
    pub delimiters: Vec<Delimiter>,
    pub stats: DacStats,
}

/// Aligns a document pair by divide and conquer. `scorer` supplies the
/// document sizes, which must match the embedding row counts.
pub fn dac_align<S: BeadScorer + ?Sized>(
    src_emb: &EmbeddingMatrix,
    tgt_emb: &EmbeddingMatrix,
    scorer: &S,
    config: &DacConfig,
) -> Result<DacOutput> {
    config.validate()?;
    let sizes = scorer.doc_sizes();
    check_embeddings(src_emb, tgt_emb, sizes)?;
    config.install(|| {
        let t0 = Instant::now();
        let plan = plan_in_pool(src_emb, tgt_emb, config)?;
        let mining_time = t0.elapsed();

        let t1 = Instant::now();
        let aligned: Vec<Vec<Bead>> = plan
            .leaves
            .par_iter()
            .map(|leaf| leaf.align(scorer, config).map(|a| a.beads))
            .collect::<Result<_>>()?;
        let alignment = merge(&plan.fixed_beads(), &aligned, sizes.0, sizes.1)?;
        let alignment_time = t1.elapsed();

        let stats = DacStats {
            leaves: plan.leaves.len(),
            banded_leaves: plan.leaves.iter().filter(|l| matches!(l, Leaf::Banded { .. })).count(),
            largest_leaf: plan.leaves.iter().map(|l| l.chunk().size()).max().unwrap_or(0),
            mining_time,
            alignment_time,
        };
        Ok(DacOutput {
            alignment,
            delimiters: plan.delimiters,
            stats,
        })
    })?
}

/// Chunk-level result of [`recurse_or_band`].
#[derive(Debug, Clone)]
pub struct ChunkOutcome {
    pub beads: Vec<Bead>,
    /// Delimiters found inside the chunk.
    pub delimiters: Vec<Delimiter>,
    pub leaves: Vec<Leaf>,
}

/// Aligns an oversized chunk: local re-mining and recursion while new hard
/// delimiters appear and `depth < config.max_depth`, otherwise the banded DP
/// around the local monotone chain, otherwise the full DP. Runs sequentially.
pub fn recurse_or_band<S: BeadScorer + ?Sized>(
    chunk: Chunk,
    src_emb: &EmbeddingMatrix,
    tgt_emb: &EmbeddingMatrix,
    scorer: &S,
    config: &DacConfig,
    depth: usize,
) -> Result<ChunkOutcome> {
    config.validate()?;
    check_embeddings(src_emb, tgt_emb, scorer.doc_sizes())?;
    let plan = refine(chunk, src_emb, tgt_emb, config, depth)?;
    let mut beads = plan.fixed_beads();
    for leaf in &plan.leaves {
        beads.extend(leaf.align(scorer, config)?.beads);
    }
    sort_beads(&mut beads);
    Ok(ChunkOutcome {
        beads,
        delimiters: plan.delimiters,
        leaves: plan.leaves,
    })
}
