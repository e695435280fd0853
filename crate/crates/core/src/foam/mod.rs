//! Foams presented as movies of planar webs, and their closed evaluation.

mod assemble;
mod eval;
mod ops;

pub use assemble::{assemble, Assembled, FacetShape, FoamShape, PreFoam};
pub use eval::{evaluate, facet_weight, seam_table, SeamTable};
pub use ops::{apply, splice, Strand};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::web::{EdgeId, PlanarWeb, Side, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoamError {
    #[error("movie move {index} is not applicable: {reason}")]
    NotApplicable { index: usize, reason: String },

    #[error("foam is not closed")]
    NotClosed,

    #[error("evaluation strategy incomplete: {0}")]
    Incomplete(String),

    #[error("foam assembly is inconsistent: {0}")]
    Inconsistent(String),
}

/// Zip two parallel strands into a wide edge.
///
/// `left` has the face between the strands on its right. The result has a
/// sink with rotation `(right_lo, mid, left_lo)` and a source with rotation
/// `(right_hi, left_hi, mid)`; a loop strand needs `lo == hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZipMove {
    pub left: EdgeId,
    pub right: EdgeId,
    pub left_lo: EdgeId,
    pub left_hi: EdgeId,
    pub right_lo: EdgeId,
    pub right_hi: EdgeId,
    pub mid: EdgeId,
    pub sink: VertexId,
    pub source: VertexId,
}

/// Collapse a wide edge; the strand through the ccw successor of `mid` at the
/// sink is named `left`, the other `right` (ignored if they coincide).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnzipMove {
    pub mid: EdgeId,
    pub left: EdgeId,
    pub right: EdgeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SaddleMove {
    /// Two antiparallel strands facing each other on `side` become
    /// `tail(a) -> head(b)` (named `ab`) and `tail(b) -> head(a)` (named `ba`).
    /// If only one strand results it is named `ab`.
    Merge { a: EdgeId, b: EdgeId, side: Side, ab: EdgeId, ba: EdgeId },
    /// A strand pinched against itself on `side`, leaving `keep` and a new
    /// loop.
    Split { edge: EdgeId, side: Side, keep: EdgeId, new_loop: EdgeId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MovieMove {
    Birth { edge: EdgeId },
    Death { edge: EdgeId },
    Dot { edge: EdgeId },
    Saddle(SaddleMove),
    Zip(ZipMove),
    Unzip(UnzipMove),
}

impl MovieMove {
    pub fn degree(&self) -> i64 {
        match self {
            MovieMove::Birth { .. } | MovieMove::Death { .. } => -2,
            MovieMove::Dot { .. } | MovieMove::Saddle(_) => 2,
            MovieMove::Zip(_) | MovieMove::Unzip(_) => 1,
        }
    }
}

/// A foam from `source` to the web reached by playing `moves`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Movie {
    pub source: PlanarWeb,
    pub moves: Vec<MovieMove>,
}

impl Movie {
    pub fn new(source: PlanarWeb, moves: Vec<MovieMove>) -> Self {
        Movie { source, moves }
    }

    pub fn identity(source: PlanarWeb) -> Self {
        Movie { source, moves: Vec::new() }
    }

    pub fn degree(&self) -> i64 {
        self.moves.iter().map(MovieMove::degree).sum()
    }

    /// All frames, starting with the source.
    pub fn frames(&self) -> Result<Vec<PlanarWeb>, FoamError> {
        let mut w = self.source.clone();
        let mut out = vec![w.clone()];
        for (i, m) in self.moves.iter().enumerate() {
            apply(&mut w, m).map_err(|reason| FoamError::NotApplicable { index: i, reason })?;
            out.push(w.clone());
        }
        Ok(out)
    }

    pub fn target(&self) -> Result<PlanarWeb, FoamError> {
        let mut w = self.source.clone();
        for (i, m) in self.moves.iter().enumerate() {
            apply(&mut w, m).map_err(|reason| FoamError::NotApplicable { index: i, reason })?;
        }
        Ok(w)
    }

    /// `self` followed by `next`. The caller guarantees `next.source` is the
    /// target of `self`.
    pub fn then(&self, next: &Movie) -> Movie {
        let mut moves = self.moves.clone();
        moves.extend_from_slice(&next.moves);
        Movie { source: self.source.clone(), moves }
    }

    /// The same foam read backwards.
    pub fn reverse(&self) -> Result<Movie, FoamError> {
        let frames = self.frames()?;
        let mut moves = Vec::with_capacity(self.moves.len());
        for (i, m) in self.moves.iter().enumerate().rev() {
            let before = &frames[i];
            let after = &frames[i + 1];
            moves.push(reverse_move(m, before, after));
        }
        Ok(Movie { source: frames.last().unwrap().clone(), moves })
    }

    /// The movie without dots, and each dot as (index of the following
    /// undotted move, edge).
    pub fn skeleton(&self) -> (Movie, Vec<(usize, EdgeId)>) {
        let mut moves = Vec::new();
        let mut dots = Vec::new();
        for m in &self.moves {
            match m {
                MovieMove::Dot { edge } => dots.push((moves.len(), *edge)),
                _ => moves.push(*m),
            }
        }
        (Movie { source: self.source.clone(), moves }, dots)
    }
}

fn reverse_move(m: &MovieMove, before: &PlanarWeb, after: &PlanarWeb) -> MovieMove {
    match *m {
        MovieMove::Birth { edge } => MovieMove::Death { edge },
        MovieMove::Death { edge } => MovieMove::Birth { edge },
        MovieMove::Dot { edge } => MovieMove::Dot { edge },
        MovieMove::Zip(z) => MovieMove::Unzip(UnzipMove { mid: z.mid, left: z.left, right: z.right }),
        MovieMove::Unzip(u) => {
            let mid = before.edge(u.mid).expect("unzip edge");
            let (s, t) = (mid.head.unwrap(), mid.tail.unwrap());
            let sv = before.vertex(s).unwrap();
            let tv = before.vertex(t).unwrap();
            let ks = sv.position(u.mid).unwrap();
            let kt = tv.position(u.mid).unwrap();
            let left_lo = sv.rotation[(ks + 1) % 3];
            let right_lo = sv.rotation[(ks + 2) % 3];
            let left_hi = tv.rotation[(kt + 2) % 3];
            let right_hi = tv.rotation[(kt + 1) % 3];
            let right = if after.edge(u.right).is_some() && u.right != u.left { u.right } else { u.left };
            MovieMove::Zip(ZipMove {
                left: u.left,
                right,
                left_lo,
                left_hi,
                right_lo,
                right_hi,
                mid: u.mid,
                sink: s,
                source: t,
            })
        }
        MovieMove::Saddle(SaddleMove::Merge { a, b, ab, ba, .. }) => {
            let ea = before.edge(a).unwrap();
            let eb = before.edge(b).unwrap();
            match (ea.is_loop(), eb.is_loop()) {
                (false, false) => {
                    let side = ops::facing_side(after, ab, ba);
                    MovieMove::Saddle(SaddleMove::Merge { a: ab, b: ba, side, ab: a, ba: b })
                }
                (true, false) => MovieMove::Saddle(SaddleMove::Split { edge: ab, side: Side::Left, keep: b, new_loop: a }),
                (false, true) | (true, true) => {
                    MovieMove::Saddle(SaddleMove::Split { edge: ab, side: Side::Left, keep: a, new_loop: b })
                }
            }
        }
        MovieMove::Saddle(SaddleMove::Split { edge, keep, new_loop, .. }) => {
            let side = ops::facing_side(after, keep, new_loop);
            MovieMove::Saddle(SaddleMove::Merge { a: keep, b: new_loop, side, ab: edge, ba: edge })
        }
    }
}
