//! Bead dynamic programming over a chunk.
//!
//! The recurrence is the classic sentence-alignment DP: cell `(i, j)` holds
//! the cheapest way to consume `i` source and `j` target sentences of the
//! chunk, and every allowed bead `(a, b)` is a transition from `(i-a, j-b)`.
//! [`align_chunk`] runs it over the full grid, [`banded_align`] over a band
//! around the piecewise-linear path through a set of anchors. Both share the
//! same engine, so a band that covers the grid reproduces the full result
//! exactly.

use std::collections::HashMap;

use statrs::function::erf::erfc;

use crate::alignment::{Bead, BeadType, Chunk, Span};
use crate::error::{Error, Result};

/// Allowed bead shapes, in tie-break order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeadSet {
    types: Vec<BeadType>,
}

const REQUIRED: [BeadType; 3] = [BeadType::new(1, 1), BeadType::new(1, 0), BeadType::new(0, 1)];

impl BeadSet {
    /// `{1-1, 1-0, 0-1, 1-2, 2-1, 2-2}`.
    pub fn standard() -> Self {
        BeadSet {
            types: [(1, 1), (1, 0), (0, 1), (1, 2), (2, 1), (2, 2)]
                .into_iter()
                .map(|(a, b)| BeadType::new(a, b))
                .collect(),
        }
    }

    /// The standard set plus 1-to-n and n-to-1 beads up to n = 5.
    pub fn extended() -> Self {
        let mut set = Self::standard();
        for n in 3..=5 {
            set.types.push(BeadType::new(1, n));
            set.types.push(BeadType::new(n, 1));
        }
        set
    }

    /// Custom set; must contain 1-1, 1-0 and 0-1 and never 0-0.
    pub fn new(types: impl IntoIterator<Item = BeadType>) -> Result<Self> {
        let mut out: Vec<BeadType> = Vec::new();
        for t in types {
            if t.src == 0 && t.tgt == 0 {
                return Err(Error::Validation("bead type 0-0 is not allowed".into()));
            }
            if !out.contains(&t) {
                out.push(t);
            }
        }
        if let Some(missing) = REQUIRED.iter().find(|t| !out.contains(t)) {
            return Err(Error::Validation(format!("bead set must contain {missing}")));
        }
        Ok(BeadSet { types: out })
    }

    pub fn types(&self) -> &[BeadType] {
        &self.types
    }

    pub fn contains(&self, t: BeadType) -> bool {
        self.types.contains(&t)
    }

    fn max_src(&self) -> usize {
        self.types.iter().map(|t| t.src).max().unwrap_or(1)
    }
}

impl Default for BeadSet {
    fn default() -> Self {
        Self::standard()
    }
}

/// Prior probability per bead type, used as a relative weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Priors {
    probs: HashMap<BeadType, f64>,
}

impl Priors {
    pub fn new(probs: impl IntoIterator<Item = (BeadType, f64)>) -> Self {
        Priors {
            probs: probs.into_iter().collect(),
        }
    }

    pub fn get(&self, t: BeadType) -> Option<f64> {
        self.probs.get(&t).copied()
    }

    /// `-ln prior`, or an unknown-bead error.
    pub fn neg_log(&self, t: BeadType) -> Result<f64> {
        self.get(t).map(|p| -p.ln()).ok_or(Error::UnknownBeadType(t))
    }

    pub(crate) fn table(&self) -> PriorTable {
        let mut table = PriorTable([[f64::NAN; PRIOR_DIM]; PRIOR_DIM]);
        for (t, p) in &self.probs {
            if t.src < PRIOR_DIM && t.tgt < PRIOR_DIM {
                table.0[t.src][t.tgt] = -p.ln();
            }
        }
        table
    }
}

impl Default for Priors {
    /// Gale & Church's bead probabilities; 1-to-n / n-to-1 beads for n in
    /// 3..=5 share the 2-2 value.
    fn default() -> Self {
        let mut probs = vec![
            (BeadType::new(1, 1), 0.89),
            (BeadType::new(1, 0), 0.0099),
            (BeadType::new(0, 1), 0.0099),
            (BeadType::new(2, 1), 0.089),
            (BeadType::new(1, 2), 0.089),
            (BeadType::new(2, 2), 0.011),
        ];
        for n in 3..=5 {
            probs.push((BeadType::new(1, n), 0.011));
            probs.push((BeadType::new(n, 1), 0.011));
        }
        Priors::new(probs)
    }
}

const PRIOR_DIM: usize = 8;

#[derive(Debug, Clone)]
pub(crate) struct PriorTable([[f64; PRIOR_DIM]; PRIOR_DIM]);

impl PriorTable {
    #[inline]
    pub(crate) fn neg_log(&self, a: usize, b: usize) -> f64 {
        if a < PRIOR_DIM && b < PRIOR_DIM {
            self.0[a][b]
        } else {
            f64::NAN
        }
    }

    pub(crate) fn supports(&self, t: BeadType) -> bool {
        !self.neg_log(t.src, t.tgt).is_nan()
    }
}

/// Cost of aligning a source span with a target span; lower is better.
pub trait BeadScorer: Sync {
    /// Sentence counts of the source and target documents.
    fn doc_sizes(&self) -> (usize, usize);

    fn supports(&self, bead: BeadType) -> bool;

    fn cost(&self, src: Span, tgt: Span) -> f64;
}

impl<S: BeadScorer + ?Sized> BeadScorer for &S {
    fn doc_sizes(&self) -> (usize, usize) {
        (**self).doc_sizes()
    }
    fn supports(&self, bead: BeadType) -> bool {
        (**self).supports(bead)
    }
    fn cost(&self, src: Span, tgt: Span) -> f64 {
        (**self).cost(src, tgt)
    }
}

const GC_RATIO: f64 = 1.0;
const GC_VARIANCE: f64 = 6.8;
const TAIL_FLOOR: f64 = 1e-12;

/// Length-mismatch term `-ln(2 (1 - Phi(|z|)))` of the Gale–Church cost.
#[inline]
fn length_penalty(l1: f64, l2: f64) -> f64 {
    let mean = (l1 + l2 / GC_RATIO) / 2.0;
    let z = if mean > 0.0 {
        (GC_RATIO * l1 - l2) / (GC_VARIANCE * mean).sqrt()
    } else {
        0.0
    };
    // 2 (1 - Phi(|z|)) = erfc(|z| / sqrt 2)
    let tail = erfc(z.abs() / std::f64::consts::SQRT_2).max(TAIL_FLOOR);
    -tail.ln()
}

/// Gale–Church bead cost from character counts.
pub fn gale_church_cost(l1: f64, l2: f64, bead: BeadType, priors: &Priors) -> Result<f64> {
    Ok(length_penalty(l1, l2) + priors.neg_log(bead)?)
}

/// Length-based scorer over two documents' character counts.
#[derive(Debug, Clone)]
pub struct GaleChurch {
    src_prefix: Vec<u64>,
    tgt_prefix: Vec<u64>,
    priors: PriorTable,
}

fn prefix_sums(lengths: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut acc = 0u64;
    for l in lengths {
        acc += l as u64;
        out.push(acc);
    }
    out
}

impl GaleChurch {
    pub fn new(src_lengths: &[usize], tgt_lengths: &[usize], priors: &Priors) -> Self {
        GaleChurch {
            src_prefix: prefix_sums(src_lengths.iter().copied()),
            tgt_prefix: prefix_sums(tgt_lengths.iter().copied()),
            priors: priors.table(),
        }
    }

    /// Character counts (Unicode scalar values) of each sentence.
    pub fn from_sentences<S: AsRef<str>>(src: &[S], tgt: &[S], priors: &Priors) -> Self {
        let count = |s: &[S]| s.iter().map(|x| x.as_ref().chars().count()).collect::<Vec<_>>();
        Self::new(&count(src), &count(tgt), priors)
    }
}

impl BeadScorer for GaleChurch {
    fn doc_sizes(&self) -> (usize, usize) {
        (self.src_prefix.len() - 1, self.tgt_prefix.len() - 1)
    }

    fn supports(&self, bead: BeadType) -> bool {
        self.priors.supports(bead)
    }

    #[inline]
    fn cost(&self, src: Span, tgt: Span) -> f64 {
        let l1 = (self.src_prefix[src.end] - self.src_prefix[src.start]) as f64;
        let l2 = (self.tgt_prefix[tgt.end] - self.tgt_prefix[tgt.start]) as f64;
        length_penalty(l1, l2) + self.priors.neg_log(src.len(), tgt.len())
    }
}

/// Beads for one chunk together with their summed cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub beads: Vec<Bead>,
    pub cost: f64,
}

/// Inclusive target-offset bounds per source row of the DP grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Band {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl Band {
    fn full(n: usize, m: usize) -> Self {
        Band {
            lo: vec![0; n + 1],
            hi: vec![m; n + 1],
        }
    }

    fn cells(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l + 1).sum()
    }

    /// Cells within Chebyshev distance `width` of the polyline through
    /// `(0,0)`, each anchor's unit diagonal, and `(n,m)`; rounded outward and
    /// widened so that consecutive rows always connect.
    fn around_anchors(n: usize, m: usize, anchors: &[(usize, usize)], width: usize) -> Self {
        let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(2 * anchors.len() + 2);
        nodes.push((0.0, 0.0));
        for &(i, j) in anchors {
            nodes.push((i as f64, j as f64));
            nodes.push(((i + 1) as f64, (j + 1) as f64));
        }
        nodes.push((n as f64, m as f64));

        let first_y_from = |x: f64| {
            let p = nodes.partition_point(|&(nx, _)| nx < x);
            if p == 0 {
                return nodes[0].1;
            }
            let (x0, y0) = nodes[p - 1];
            let (x1, y1) = nodes[p];
            y0 + (x - x0) / (x1 - x0) * (y1 - y0)
        };
        let last_y_upto = |x: f64| {
            let q = nodes.partition_point(|&(nx, _)| nx <= x);
            if q == nodes.len() {
                return nodes[q - 1].1;
            }
            let (x0, y0) = nodes[q - 1];
            let (x1, y1) = nodes[q];
            y0 + (x - x0) / (x1 - x0) * (y1 - y0)
        };

        let w = width as f64;
        let mut lo = Vec::with_capacity(n + 1);
        let mut hi = Vec::with_capacity(n + 1);
        for x in 0..=n {
            let x = x as f64;
            let y_lo = first_y_from((x - w).max(0.0));
            let y_hi = last_y_upto((x + w).min(n as f64));
            let l = (y_lo - w).floor().max(0.0) as usize;
            let h = ((y_hi + w).ceil().max(0.0) as usize).min(m);
            lo.push(l.min(h));
            hi.push(h);
        }
        for x in 1..=n {
            hi[x] = hi[x].max(hi[x - 1]);
            lo[x] = lo[x].max(lo[x - 1]).min(hi[x - 1]);
        }
        lo[0] = 0;
        hi[n] = m;
        Band { lo, hi }
    }
}

const NO_BEAD: u8 = u8::MAX;

fn check_chunk<S: BeadScorer + ?Sized>(chunk: &Chunk, scorer: &S, beads: &BeadSet) -> Result<()> {
    let (n_src, n_tgt) = scorer.doc_sizes();
    if chunk.src.end > n_src || chunk.tgt.end > n_tgt {
        return Err(Error::Validation(format!(
            "chunk {:?}x{:?} outside documents of {n_src}/{n_tgt} sentences",
            chunk.src, chunk.tgt
        )));
    }
    if let Some(&t) = beads.types().iter().find(|&&t| !scorer.supports(t)) {
        return Err(Error::UnknownBeadType(t));
    }
    Ok(())
}

fn run_dp<S: BeadScorer + ?Sized>(chunk: &Chunk, scorer: &S, beads: &BeadSet, band: &Band) -> Result<Aligned> {
    let (n, m) = (chunk.src.len(), chunk.tgt.len());
    let (s0, t0) = (chunk.src.start, chunk.tgt.start);
    let types = beads.types();
    debug_assert!(types.len() < NO_BEAD as usize);

    let ring = beads.max_src() + 1;
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); ring];
    let mut offsets = Vec::with_capacity(n + 2);
    offsets.push(0usize);
    for i in 0..=n {
        offsets.push(offsets[i] + band.hi[i] - band.lo[i] + 1);
    }
    let mut back = vec![NO_BEAD; band.cells()];

    for i in 0..=n {
        let (lo, hi) = (band.lo[i], band.hi[i]);
        let mut row = std::mem::take(&mut rows[i % ring]);
        row.clear();
        row.resize(hi - lo + 1, f64::INFINITY);
        let back_row = &mut back[offsets[i]..offsets[i + 1]];
        for j in lo..=hi {
            if i == 0 && j == 0 {
                row[0] = 0.0;
                continue;
            }
            let mut best = f64::INFINITY;
            let mut best_k = NO_BEAD;
            for (k, t) in types.iter().enumerate() {
                if t.src > i || t.tgt > j {
                    continue;
                }
                let (pi, pj) = (i - t.src, j - t.tgt);
                let prev = if pi == i {
                    if pj < lo {
                        continue;
                    }
                    row[pj - lo]
                } else {
                    if pj < band.lo[pi] || pj > band.hi[pi] {
                        continue;
                    }
                    rows[pi % ring][pj - band.lo[pi]]
                };
                if prev == f64::INFINITY {
                    continue;
                }
                let c = prev
                    + scorer.cost(
                        Span::new(s0 + pi, s0 + i),
                        Span::new(t0 + pj, t0 + j),
                    );
                if c < best {
                    best = c;
                    best_k = k as u8;
                }
            }
            row[j - lo] = best;
            back_row[j - lo] = best_k;
        }
        rows[i % ring] = row;
    }

    let total = rows[n % ring][m - band.lo[n]];
    if !total.is_finite() {
        return Err(Error::Validation(format!(
            "no finite-cost alignment for chunk {:?}x{:?}",
            chunk.src, chunk.tgt
        )));
    }

    let mut out = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let k = back[offsets[i] + j - band.lo[i]];
        debug_assert_ne!(k, NO_BEAD);
        let t = types[k as usize];
        let (pi, pj) = (i - t.src, j - t.tgt);
        out.push(Bead::new(
            Span::new(s0 + pi, s0 + i),
            Span::new(t0 + pj, t0 + j),
        ));
        i = pi;
        j = pj;
    }
    out.reverse();
    Ok(Aligned {
        beads: out,
        cost: total,
    })
}

/// Globally cheapest monotone bead sequence covering the chunk. Ties go to
/// the bead type listed first in `beads`.
pub fn align_chunk<S: BeadScorer + ?Sized>(chunk: &Chunk, scorer: &S, beads: &BeadSet) -> Result<Aligned> {
    check_chunk(chunk, scorer, beads)?;
    run_dp(chunk, scorer, beads, &Band::full(chunk.src.len(), chunk.tgt.len()))
}

/// [`align_chunk`] restricted to cells within `band` of the path through
/// `anchors` (absolute `(source, target)` 1-to-1 pairs inside the chunk).
pub fn banded_align<S: BeadScorer + ?Sized>(
    chunk: &Chunk,
    scorer: &S,
    beads: &BeadSet,
    anchors: &[(usize, usize)],
    band: usize,
) -> Result<Aligned> {
    check_chunk(chunk, scorer, beads)?;
    let mut rel = Vec::with_capacity(anchors.len());
    for (k, &(i, j)) in anchors.iter().enumerate() {
        if !chunk.src.contains(i) || !chunk.tgt.contains(j) {
            return Err(Error::Validation(format!(
                "anchor ({i}, {j}) outside chunk {:?}x{:?}",
                chunk.src, chunk.tgt
            )));
        }
        if k > 0 && (i <= anchors[k - 1].0 || j <= anchors[k - 1].1) {
            return Err(Error::Validation(format!("anchors not strictly monotone at ({i}, {j})")));
        }
        rel.push((i - chunk.src.start, j - chunk.tgt.start));
    }
    let (n, m) = (chunk.src.len(), chunk.tgt.len());
    run_dp(chunk, scorer, beads, &Band::around_anchors(n, m, &rel, band))
}

/// Sum of `scorer` costs over `beads`, accumulated left to right.
pub fn sequence_cost<S: BeadScorer + ?Sized>(scorer: &S, beads: &[Bead]) -> f64 {
    beads.iter().fold(0.0, |acc, b| acc + scorer.cost(b.src, b.tgt))
}
