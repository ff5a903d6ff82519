//! Hard-delimiter mining.
//!
//! Candidates are mutual-best pairs under the ratio margin
//!
//! ```text
//! margin(x, y) = cos(x, y) / (mean_k cos(x, NN_k(x)) / 2 + mean_k cos(y, NN_k(y)) / 2)
//! ```
//!
//! filtered by a cosine threshold. The candidates are reduced to their
//! longest chain increasing in both coordinates, and a chain element becomes
//! a hard delimiter when its diagonal predecessor and successor are in the
//! chain too.

use rayon::prelude::*;

use crate::alignment::{Bead, Chunk, Delimiter, Span};
use crate::embed::{dot, unit_cosine, EmbeddingMatrix, TopK};
use crate::error::{Error, Result};

pub const DEFAULT_K_NN: usize = 4;
pub const DEFAULT_COS_THRESHOLD: f32 = 0.6;

const MIN_DENOMINATOR: f64 = 1e-9;
const ROW_BLOCK: usize = 64;

/// A mined 1-to-1 candidate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub src_idx: usize,
    pub tgt_idx: usize,
    pub cosine: f32,
    pub margin: f32,
}

impl From<Candidate> for Delimiter {
    fn from(c: Candidate) -> Self {
        Delimiter {
            src_idx: c.src_idx,
            tgt_idx: c.tgt_idx,
            cosine: c.cosine,
            margin: c.margin,
        }
    }
}

/// Anything carrying a `(source, target)` index pair.
pub trait IndexPair {
    fn pair(&self) -> (usize, usize);
}

impl IndexPair for (usize, usize) {
    fn pair(&self) -> (usize, usize) {
        *self
    }
}

impl IndexPair for Candidate {
    fn pair(&self) -> (usize, usize) {
        (self.src_idx, self.tgt_idx)
    }
}

impl IndexPair for Delimiter {
    fn pair(&self) -> (usize, usize) {
        (self.src_idx, self.tgt_idx)
    }
}

fn check_dims(src: &EmbeddingMatrix, tgt: &EmbeddingMatrix) -> Result<()> {
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch {
            left: src.dim(),
            right: tgt.dim(),
        });
    }
    Ok(())
}

/// Mean cosine of each query row to its `k` nearest keys.
fn neighbor_means(queries: &EmbeddingMatrix, keys: &EmbeddingMatrix, k: usize) -> Vec<f64> {
    (0..queries.n())
        .into_par_iter()
        .map(|q| {
            if queries.is_zero(q) {
                return 0.0;
            }
            let row = queries.row(q);
            let mut top = TopK::new(k);
            for j in 0..keys.n() {
                top.push((j, unit_cosine(row, keys.row(j))));
            }
            top.mean_score()
        })
        .collect()
}

#[inline]
fn ratio_margin(cos: f32, src_mean: f64, tgt_mean: f64) -> f64 {
    let denom = src_mean / 2.0 + tgt_mean / 2.0;
    if denom <= MIN_DENOMINATOR {
        return 0.0;
    }
    (f64::from(cos) / denom).max(0.0)
}

/// Ratio-margin score of source row `i` against target row `j`.
pub fn margin_score(
    i: usize,
    j: usize,
    src: &EmbeddingMatrix,
    tgt: &EmbeddingMatrix,
    k_nn: usize,
) -> Result<f32> {
    check_dims(src, tgt)?;
    if k_nn == 0 || k_nn > src.n().min(tgt.n()) {
        return Err(Error::out_of_range("k_nn", k_nn, "1 <= k_nn <= min(n_src, n_tgt)"));
    }
    if i >= src.n() {
        return Err(Error::out_of_range("i", i, "a source row"));
    }
    if j >= tgt.n() {
        return Err(Error::out_of_range("j", j, "a target row"));
    }
    let mut src_top = TopK::new(k_nn);
    for z in 0..tgt.n() {
        src_top.push((z, unit_cosine(src.row(i), tgt.row(z))));
    }
    let mut tgt_top = TopK::new(k_nn);
    for z in 0..src.n() {
        tgt_top.push((z, unit_cosine(tgt.row(j), src.row(z))));
    }
    let cos = unit_cosine(src.row(i), tgt.row(j));
    Ok(ratio_margin(cos, src_top.mean_score(), tgt_top.mean_score()) as f32)
}

#[derive(Clone, Copy)]
struct Best {
    idx: usize,
    margin: f64,
}

impl Best {
    const NONE: Best = Best {
        idx: usize::MAX,
        margin: f64::NEG_INFINITY,
    };

    #[inline]
    fn offer(&mut self, idx: usize, margin: f64) {
        if margin > self.margin || (margin == self.margin && idx < self.idx) {
            *self = Best { idx, margin };
        }
    }
}

/// Mutual-best pairs by margin whose cosine reaches `cos_threshold`, sorted
/// by source index. `k_nn` is clamped to the smaller side so small chunks can
/// still be mined. Zero rows never take part.
pub fn mine_candidates(
    src: &EmbeddingMatrix,
    tgt: &EmbeddingMatrix,
    k_nn: usize,
    cos_threshold: f32,
) -> Result<Vec<Candidate>> {
    check_dims(src, tgt)?;
    if k_nn == 0 {
        return Err(Error::out_of_range("k_nn", k_nn, "positive"));
    }
    if src.is_empty() || tgt.is_empty() {
        return Ok(Vec::new());
    }
    let k = k_nn.min(src.n()).min(tgt.n());
    let src_means = neighbor_means(src, tgt, k);
    let tgt_means = neighbor_means(tgt, src, k);
    let m = tgt.n();

    let blocks: Vec<(Vec<Best>, Vec<Best>)> = (0..src.n())
        .collect::<Vec<_>>()
        .par_chunks(ROW_BLOCK)
        .map(|rows| {
            let mut row_best = Vec::with_capacity(rows.len());
            let mut col_best = vec![Best::NONE; m];
            for &i in rows {
                let mut best = Best::NONE;
                if !src.is_zero(i) {
                    let x = src.row(i);
                    for j in 0..m {
                        if tgt.is_zero(j) {
                            continue;
                        }
                        let margin = ratio_margin(dot(x, tgt.row(j)).clamp(-1.0, 1.0), src_means[i], tgt_means[j]);
                        best.offer(j, margin);
                        col_best[j].offer(i, margin);
                    }
                }
                row_best.push(best);
            }
            (row_best, col_best)
        })
        .collect();

    let mut row_best = Vec::with_capacity(src.n());
    let mut col_best = vec![Best::NONE; m];
    for (rows, cols) in blocks {
        row_best.extend(rows);
        for (acc, b) in col_best.iter_mut().zip(cols) {
            acc.offer(b.idx, b.margin);
        }
    }

    let mut out = Vec::new();
    for (i, best) in row_best.iter().enumerate() {
        let j = best.idx;
        if j == usize::MAX || col_best[j].idx != i {
            continue;
        }
        let cos = unit_cosine(src.row(i), tgt.row(j));
        if cos >= cos_threshold {
            out.push(Candidate {
                src_idx: i,
                tgt_idx: j,
                cosine: cos,
                margin: best.margin as f32,
            });
        }
    }
    Ok(out)
}

/// Longest subsequence strictly increasing in both coordinates.
///
/// Input is ordered by source index (ascending) and, for equal source
/// indices, by target index descending so that equal sources cannot chain.
/// Patience piles keep their most recent element and the result is rebuilt
/// from stored predecessors, so the output depends only on the input.
pub fn longest_monotone_chain<T: IndexPair + Clone>(pairs: &[T]) -> Vec<T> {
    let mut sorted: Vec<T> = pairs.to_vec();
    sorted.sort_by(|a, b| {
        let (ai, aj) = a.pair();
        let (bi, bj) = b.pair();
        ai.cmp(&bi).then(bj.cmp(&aj))
    });
    let mut piles: Vec<usize> = Vec::new();
    let mut pred: Vec<Option<usize>> = vec![None; sorted.len()];
    for (idx, item) in sorted.iter().enumerate() {
        let j = item.pair().1;
        let pos = piles.partition_point(|&top| sorted[top].pair().1 < j);
        pred[idx] = pos.checked_sub(1).map(|p| piles[p]);
        if pos == piles.len() {
            piles.push(idx);
        } else {
            piles[pos] = idx;
        }
    }
    let mut chain = Vec::with_capacity(piles.len());
    let mut cur = piles.last().copied();
    while let Some(idx) = cur {
        chain.push(sorted[idx].clone());
        cur = pred[idx];
    }
    chain.reverse();
    chain
}

/// Chain elements whose diagonal neighbours `(i-1, j-1)` and `(i+1, j+1)`
/// are both in the chain. Document-boundary sentences never qualify.
pub fn select_hard_delimiters<T: IndexPair + Clone>(chain: &[T], n_src: usize, n_tgt: usize) -> Vec<T> {
    chain
        .windows(3)
        .filter(|w| {
            let (pi, pj) = w[0].pair();
            let (i, j) = w[1].pair();
            let (ni, nj) = w[2].pair();
            i > 0
                && j > 0
                && i + 1 < n_src
                && j + 1 < n_tgt
                && (pi, pj) == (i - 1, j - 1)
                && (ni, nj) == (i + 1, j + 1)
        })
        .map(|w| w[1].clone())
        .collect()
}

/// Fixed 1-to-1 beads for the delimiters plus the chunks between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub fixed: Vec<Bead>,
    pub chunks: Vec<Chunk>,
}

/// Splits `[0, n_src) × [0, n_tgt)` at the delimiters. Chunks empty on both
/// sides are dropped.
pub fn segment<T: IndexPair>(n_src: usize, n_tgt: usize, delimiters: &[T]) -> Segmentation {
    segment_range(Chunk::whole(n_src, n_tgt), delimiters)
}

/// Same as [`segment`], inside an enclosing chunk; delimiter indices are
/// absolute.
pub fn segment_range<T: IndexPair>(outer: Chunk, delimiters: &[T]) -> Segmentation {
    let mut fixed = Vec::with_capacity(delimiters.len());
    let mut chunks = Vec::with_capacity(delimiters.len() + 1);
    let (mut s, mut t) = (outer.src.start, outer.tgt.start);
    let mut push = |chunk: Chunk| {
        if !chunk.is_empty() {
            chunks.push(chunk);
        }
    };
    for d in delimiters {
        let (i, j) = d.pair();
        debug_assert!(i >= s && j >= t, "delimiters must be strictly monotone");
        push(Chunk::new(Span::new(s, i), Span::new(t, j)));
        fixed.push(Bead::one_to_one(i, j));
        s = i + 1;
        t = j + 1;
    }
    push(Chunk::new(Span::new(s, outer.src.end), Span::new(t, outer.tgt.end)));
    Segmentation { fixed, chunks }
}

/// Output of one mining pass.
#[derive(Debug, Clone, Default)]
pub struct Mined {
    pub candidates: Vec<Candidate>,
    pub chain: Vec<Candidate>,
    pub delimiters: Vec<Delimiter>,
}

/// Candidates, chain and hard delimiters for a full matrix pair.
pub fn mine(src: &EmbeddingMatrix, tgt: &EmbeddingMatrix, k_nn: usize, cos_threshold: f32) -> Result<Mined> {
    let candidates = mine_candidates(src, tgt, k_nn, cos_threshold)?;
    let chain = longest_monotone_chain(&candidates);
    let delimiters = select_hard_delimiters(&chain, src.n(), tgt.n())
        .into_iter()
        .map(Delimiter::from)
        .collect();
    Ok(Mined {
        candidates,
        chain,
        delimiters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity(n: usize) -> EmbeddingMatrix {
        let rows: Vec<Vec<f32>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        EmbeddingMatrix::from_rows(&rows, n).unwrap()
    }

    fn random(rng: &mut ChaCha8Rng, n: usize, d: usize) -> EmbeddingMatrix {
        let data = (0..n * d).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        EmbeddingMatrix::from_raw(data, d).unwrap()
    }

    // Second implementation of the margin: full cosine table, full sort.
    fn oracle_margins(src: &EmbeddingMatrix, tgt: &EmbeddingMatrix, k: usize) -> Vec<Vec<f64>> {
        let cos: Vec<Vec<f64>> = (0..src.n())
            .map(|i| {
                (0..tgt.n())
                    .map(|j| {
                        let s: f64 = src
                            .row(i)
                            .iter()
                            .zip(tgt.row(j))
                            .map(|(a, b)| f64::from(*a) * f64::from(*b))
                            .sum();
                        s
                    })
                    .collect()
            })
            .collect();
        let topk_mean = |mut v: Vec<f64>| {
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            v[..k].iter().sum::<f64>() / k as f64
        };
        let a: Vec<f64> = cos.iter().map(|r| topk_mean(r.clone())).collect();
        let b: Vec<f64> = (0..tgt.n())
            .map(|j| topk_mean(cos.iter().map(|r| r[j]).collect()))
            .collect();
        cos.iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let d = a[i] / 2.0 + b[j] / 2.0;
                        if d <= 1e-9 { 0.0 } else { (c / d).max(0.0) }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn margin_identity() {
        let m = identity(3);
        assert!((margin_score(0, 0, &m, &m, 1).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn margin_zero_row() {
        let src = EmbeddingMatrix::from_rows(&[[0.0f32, 0.0], [1.0, 0.0]], 2).unwrap();
        let tgt = identity(2);
        assert_eq!(margin_score(0, 0, &src, &tgt, 1).unwrap(), 0.0);
    }

    #[test]
    fn margin_parameter_errors() {
        let m = identity(2);
        assert!(margin_score(0, 0, &m, &m, 3).is_err());
        assert!(margin_score(0, 0, &m, &m, 0).is_err());
        assert!(margin_score(2, 0, &m, &m, 1).is_err());
    }

    #[test]
    fn margin_matches_oracle_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let src = random(&mut rng, 6, 4);
        let tgt = random(&mut rng, 6, 4);
        let want = oracle_margins(&src, &tgt, 3);
        for i in 0..6 {
            for j in 0..6 {
                let got = f64::from(margin_score(i, j, &src, &tgt, 3).unwrap());
                assert!((got - want[i][j]).abs() < 1e-5, "({i},{j}) {got} vs {}", want[i][j]);
            }
        }
    }

    #[test]
    fn mine_identity() {
        let m = identity(3);
        let c = mine_candidates(&m, &m, 1, 0.6).unwrap();
        let pairs: Vec<_> = c.iter().map(|c| c.pair()).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert!(c.iter().all(|c| c.cosine == 1.0));
    }

    #[test]
    fn mine_threshold_excludes_weak_pair() {
        // cos((1,0), (0.5, sqrt(0.75))) = 0.5
        let src = EmbeddingMatrix::from_rows(&[[1.0f32, 0.0]], 2).unwrap();
        let tgt = EmbeddingMatrix::from_rows(&[[0.5f32, 0.75f32.sqrt()]], 2).unwrap();
        assert!(mine_candidates(&src, &tgt, 1, 0.6).unwrap().is_empty());
        assert_eq!(mine_candidates(&src, &tgt, 1, 0.4).unwrap().len(), 1);
    }

    #[test]
    fn mine_matches_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..20 {
            let src = random(&mut rng, 8, 5);
            let tgt = random(&mut rng, 8, 5);
            let margins = oracle_margins(&src, &tgt, 4);
            let argmax = |vals: Vec<f64>| {
                let mut best = 0;
                for (k, v) in vals.iter().enumerate() {
                    if *v > vals[best] {
                        best = k;
                    }
                }
                best
            };
            let threshold = if round % 2 == 0 { 0.0 } else { 0.3 };
            let mut want = Vec::new();
            for i in 0..8 {
                let j = argmax(margins[i].clone());
                let back = argmax((0..8).map(|r| margins[r][j]).collect());
                let cos = unit_cosine(src.row(i), tgt.row(j));
                if back == i && cos >= threshold {
                    want.push((i, j));
                }
            }
            let got: Vec<_> = mine_candidates(&src, &tgt, 4, threshold)
                .unwrap()
                .iter()
                .map(|c| c.pair())
                .collect();
            assert_eq!(got, want, "round {round}");
        }
    }

    #[test]
    fn chain_examples() {
        assert_eq!(
            longest_monotone_chain(&[(0, 0), (1, 1), (2, 2)]),
            vec![(0, 0), (1, 1), (2, 2)]
        );
        assert_eq!(longest_monotone_chain(&[(0, 1), (1, 0)]), vec![(1, 0)]);
        assert_eq!(longest_monotone_chain::<(usize, usize)>(&[]), vec![]);
        // unsorted input is sorted first
        assert_eq!(longest_monotone_chain(&[(2, 2), (0, 0), (1, 1)]).len(), 3);
    }

    fn lis_oracle(pairs: &[(usize, usize)]) -> usize {
        let mut p = pairs.to_vec();
        p.sort();
        let mut best = vec![1usize; p.len()];
        for a in 0..p.len() {
            for b in 0..a {
                if p[b].0 < p[a].0 && p[b].1 < p[a].1 {
                    best[a] = best[a].max(best[b] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    #[test]
    fn chain_length_matches_quadratic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut is: Vec<usize> = (0..80).collect();
            let mut js: Vec<usize> = (0..80).collect();
            rand::seq::SliceRandom::shuffle(&mut is[..], &mut rng);
            rand::seq::SliceRandom::shuffle(&mut js[..], &mut rng);
            let pairs: Vec<(usize, usize)> = is.into_iter().zip(js).take(50).collect();
            let chain = longest_monotone_chain(&pairs);
            assert_eq!(chain.len(), lis_oracle(&pairs));
            assert!(chain.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        }
    }

    #[test]
    fn hard_delimiter_examples() {
        assert_eq!(select_hard_delimiters(&[(0, 0), (1, 1), (2, 2)], 3, 3), vec![(1, 1)]);
        assert!(select_hard_delimiters(&[(0, 0), (1, 1), (3, 3), (4, 4)], 5, 5).is_empty());
        let run: Vec<(usize, usize)> = (0..5).map(|i| (i, i)).collect();
        assert_eq!(select_hard_delimiters(&run, 5, 5), vec![(1, 1), (2, 2), (3, 3)]);
        // applying twice trims one more from each end
        let once = select_hard_delimiters(&run, 5, 5);
        assert_eq!(select_hard_delimiters(&once, 5, 5), vec![(2, 2)]);
    }

    #[test]
    fn segment_examples() {
        let seg = segment(5, 5, &[(2, 2)]);
        assert_eq!(seg.fixed, vec![Bead::one_to_one(2, 2)]);
        assert_eq!(
            seg.chunks,
            vec![
                Chunk::new(Span::new(0, 2), Span::new(0, 2)),
                Chunk::new(Span::new(3, 5), Span::new(3, 5))
            ]
        );

        let seg = segment::<(usize, usize)>(4, 6, &[]);
        assert!(seg.fixed.is_empty());
        assert_eq!(seg.chunks, vec![Chunk::whole(4, 6)]);

        let seg = segment(4, 4, &[(1, 1), (2, 2)]);
        assert_eq!(seg.fixed.len(), 2);
        assert_eq!(
            seg.chunks,
            vec![
                Chunk::new(Span::new(0, 1), Span::new(0, 1)),
                Chunk::new(Span::new(3, 4), Span::new(3, 4))
            ]
        );
    }

    #[test]
    fn segment_keeps_one_sided_chunks() {
        let seg = segment(5, 4, &[(1, 1), (3, 2)]);
        assert_eq!(seg.chunks[1], Chunk::new(Span::new(2, 3), Span::new(2, 2)));
    }
}
