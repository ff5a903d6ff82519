//! Domain types shared across the crate: spans, beads, alignment sets,
//! delimiters and chunks, plus the line-oriented alignment text format.
//!
//! The text format has one bead per line, `i1,i2,...:j1,j2,...`, with 0-based
//! ascending indices. An empty side is written as the empty string, so `:3` is
//! a 0-to-1 bead and `2:` is a 1-to-0 bead.

use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Half-open range of sentence indices. Empty spans keep a position so that
/// null beads still sort into document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "span start {start} > end {end}");
        Span { start, end }
    }

    pub fn empty_at(pos: usize) -> Self {
        Span {
            start: pos,
            end: pos,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.start <= idx && idx < self.end
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Bead shape `(a, b)`: `a` source sentences paired with `b` target sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeadType {
    pub src: usize,
    pub tgt: usize,
}

impl BeadType {
    pub const fn new(src: usize, tgt: usize) -> Self {
        BeadType { src, tgt }
    }

    pub fn is_null(&self) -> bool {
        self.src == 0 || self.tgt == 0
    }
}

impl fmt::Display for BeadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

/// One alignment unit: a contiguous source span paired with a contiguous
/// target span. At most one side may be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bead {
    pub src: Span,
    pub tgt: Span,
}

impl Bead {
    pub fn new(src: Span, tgt: Span) -> Self {
        Bead { src, tgt }
    }

    /// The `(1,1)` bead pairing source `i` with target `j`.
    pub fn one_to_one(i: usize, j: usize) -> Self {
        Bead {
            src: Span::new(i, i + 1),
            tgt: Span::new(j, j + 1),
        }
    }

    pub fn bead_type(&self) -> BeadType {
        BeadType::new(self.src.len(), self.tgt.len())
    }

    pub fn is_null(&self) -> bool {
        self.src.is_empty() || self.tgt.is_empty()
    }

    fn order_key(&self) -> (usize, usize) {
        (self.src.start + self.tgt.start, self.src.start)
    }
}

impl fmt::Display for Bead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, self.src)?;
        f.write_str(":")?;
        write_side(f, self.tgt)
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, span: Span) -> fmt::Result {
    for (k, idx) in span.indices().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{idx}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

/// First violated [`AlignmentSet`] invariant.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("bead {bead} has both sides empty")]
    EmptyBead { bead: usize },
    #[error("{side} span of bead {bead} exceeds document length {len}")]
    OutOfBounds { side: Side, bead: usize, len: usize },
    #[error("{side} index {index} uncovered")]
    Gap { side: Side, index: usize },
    #[error("{side} overlap at bead {bead}")]
    Overlap { side: Side, bead: usize },
    #[error("bead {bead} has type {bead_type} outside the bead set")]
    DisallowedType { bead: usize, bead_type: BeadType },
}

/// Ordered, non-crossing sequence of beads partitioning both documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentSet {
    pub beads: Vec<Bead>,
    pub n_src: usize,
    pub n_tgt: usize,
}

impl AlignmentSet {
    pub fn new(beads: Vec<Bead>, n_src: usize, n_tgt: usize) -> Self {
        AlignmentSet {
            beads,
            n_src,
            n_tgt,
        }
    }

    /// Checks coverage and monotonicity, naming the first violation.
    pub fn validate(&self) -> Result<(), Violation> {
        let mut cursor = [0usize; 2];
        let lens = [self.n_src, self.n_tgt];
        for (k, bead) in self.beads.iter().enumerate() {
            if bead.src.is_empty() && bead.tgt.is_empty() {
                return Err(Violation::EmptyBead { bead: k });
            }
            for (s, (side, span)) in [(Side::Source, bead.src), (Side::Target, bead.tgt)]
                .into_iter()
                .enumerate()
            {
                if span.is_empty() {
                    continue;
                }
                if span.end > lens[s] {
                    return Err(Violation::OutOfBounds {
                        side,
                        bead: k,
                        len: lens[s],
                    });
                }
                if span.start > cursor[s] {
                    return Err(Violation::Gap {
                        side,
                        index: cursor[s],
                    });
                }
                if span.start < cursor[s] {
                    return Err(Violation::Overlap { side, bead: k });
                }
                cursor[s] = span.end;
            }
        }
        for (s, side) in [Side::Source, Side::Target].into_iter().enumerate() {
            if cursor[s] < lens[s] {
                return Err(Violation::Gap {
                    side,
                    index: cursor[s],
                });
            }
        }
        Ok(())
    }

    /// Checks that every bead type is admitted by `allowed`.
    pub fn check_bead_types(&self, allowed: impl Fn(BeadType) -> bool) -> Result<(), Violation> {
        match self
            .beads
            .iter()
            .enumerate()
            .find(|(_, b)| !allowed(b.bead_type()))
        {
            Some((k, b)) => Err(Violation::DisallowedType {
                bead: k,
                bead_type: b.bead_type(),
            }),
            None => Ok(()),
        }
    }

    /// Parses the alignment text format. Document sizes are taken to be one
    /// past the largest index seen on each side.
    pub fn parse(text: &str) -> Result<Self> {
        let mut beads = Vec::new();
        let mut cursor = (0usize, 0usize);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let (src, tgt) = line
                .split_once(':')
                .ok_or_else(|| err(format!("missing ':' in {line:?}")))?;
            let src = parse_side(src, cursor.0).map_err(&err)?;
            let tgt = parse_side(tgt, cursor.1).map_err(&err)?;
            if src.is_empty() && tgt.is_empty() {
                return Err(err("bead with both sides empty".into()));
            }
            if !src.is_empty() {
                cursor.0 = src.end;
            }
            if !tgt.is_empty() {
                cursor.1 = tgt.end;
            }
            beads.push(Bead::new(src, tgt));
        }
        let n_src = beads.iter().map(|b| b.src.end).max().unwrap_or(0);
        let n_tgt = beads.iter().map(|b| b.tgt.end).max().unwrap_or(0);
        Ok(AlignmentSet::new(beads, n_src, n_tgt))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for bead in &self.beads {
            writeln!(out, "{bead}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("alignment text is ASCII")
    }
}

fn parse_side(text: &str, cursor: usize) -> std::result::Result<Span, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Span::empty_at(cursor));
    }
    let mut indices = text.split(',').map(|tok| {
        tok.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad index {tok:?}"))
    });
    let first = indices.next().expect("split yields at least one item")?;
    let mut last = first;
    for idx in indices {
        let idx = idx?;
        if idx != last + 1 {
            return Err(format!("indices must be ascending and contiguous: {text:?}"));
        }
        last = idx;
    }
    Ok(Span::new(first, last + 1))
}

/// Sorts beads into document order. Valid sequences have strictly increasing
/// `src.start + tgt.start`, so the key is a total order on them.
pub(crate) fn sort_beads(beads: &mut [Bead]) {
    beads.sort_by_key(Bead::order_key);
}

/// A mined or gold 1-to-1 pair used as a hard split point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delimiter {
    pub src_idx: usize,
    pub tgt_idx: usize,
    pub cosine: f32,
    pub margin: f32,
}

impl Delimiter {
    pub fn pair(&self) -> (usize, usize) {
        (self.src_idx, self.tgt_idx)
    }
}

/// Rectangular sub-problem: source range × target range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    pub src: Span,
    pub tgt: Span,
}

impl Chunk {
    pub fn new(src: Span, tgt: Span) -> Self {
        Chunk { src, tgt }
    }

    pub fn whole(n_src: usize, n_tgt: usize) -> Self {
        Chunk::new(Span::new(0, n_src), Span::new(0, n_tgt))
    }

    /// Larger of the two side lengths.
    pub fn size(&self) -> usize {
        self.src.len().max(self.tgt.len())
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty() && self.tgt.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(beads: &[(&[usize], &[usize])], n_src: usize, n_tgt: usize) -> AlignmentSet {
        let span = |ix: &[usize]| match ix {
            [] => Span::empty_at(0),
            _ => Span::new(ix[0], ix[ix.len() - 1] + 1),
        };
        let beads = beads.iter().map(|(s, t)| Bead::new(span(s), span(t))).collect();
        AlignmentSet::new(beads, n_src, n_tgt)
    }

    #[test]
    fn identity_is_valid() {
        assert_eq!(set(&[(&[0], &[0]), (&[1], &[1])], 2, 2).validate(), Ok(()));
    }

    #[test]
    fn coverage_gap() {
        let v = set(&[(&[0], &[0])], 2, 1).validate().unwrap_err();
        assert_eq!(
            v,
            Violation::Gap {
                side: Side::Source,
                index: 1
            }
        );
        assert_eq!(v.to_string(), "source index 1 uncovered");
    }

    #[test]
    fn source_overlap() {
        let v = set(&[(&[0, 1], &[0]), (&[1], &[1])], 2, 2)
            .validate()
            .unwrap_err();
        assert_eq!(v.to_string(), "source overlap at bead 1");
    }

    #[test]
    fn empty_bead_and_bounds() {
        let a = AlignmentSet::new(vec![Bead::new(Span::empty_at(0), Span::empty_at(0))], 0, 0);
        assert_eq!(a.validate(), Err(Violation::EmptyBead { bead: 0 }));
        let b = set(&[(&[0, 1], &[0])], 1, 1);
        assert!(matches!(b.validate(), Err(Violation::OutOfBounds { .. })));
    }

    #[test]
    fn text_format_round_trip() {
        let text = "0:0\n1,2:1\n:2\n3:\n4:3,4\n";
        let a = AlignmentSet::parse(text).unwrap();
        assert_eq!(a.n_src, 5);
        assert_eq!(a.n_tgt, 5);
        assert_eq!(a.validate(), Ok(()));
        assert_eq!(a.beads[2].bead_type(), BeadType::new(0, 1));
        assert_eq!(a.beads[3].bead_type(), BeadType::new(1, 0));
        assert_eq!(a.to_text(), text);
    }

    #[test]
    fn parse_rejects_bad_lines() {
        assert!(matches!(
            AlignmentSet::parse("0:0\n1,3:1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(AlignmentSet::parse("0 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(AlignmentSet::parse(":\n"), Err(Error::Parse { .. })));
        assert!(matches!(AlignmentSet::parse("x:0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn bead_type_check() {
        let a = set(&[(&[0, 1, 2], &[0])], 3, 1);
        let allowed = |t: BeadType| t.src <= 2 && t.tgt <= 2;
        assert_eq!(
            a.check_bead_types(allowed),
            Err(Violation::DisallowedType {
                bead: 0,
                bead_type: BeadType::new(3, 1)
            })
        );
    }
}
