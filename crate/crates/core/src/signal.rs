//! Signal structures a sender can commit to.
//!
//! Monotone signals never separate a state pair while pooling a state
//! between them: for discrete priors they are consecutive-block partitions
//! of the support, for continuous priors they pool a family of disjoint
//! intervals and reveal everything else.

use crate::error::{Error, Result};

/// Partition of `{0, .., n-1}` into consecutive index blocks, stored as
/// inclusive `(lo, hi)` ranges covering the support in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonePartition {
    n: usize,
    blocks: Vec<(usize, usize)>,
}

impl MonotonePartition {
    pub fn new(blocks: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("partition of empty support".into()));
        }
        if blocks.is_empty() {
            return Err(Error::MalformedSignal("no blocks".into()));
        }
        let mut expect = 0usize;
        for &(lo, hi) in &blocks {
            if lo != expect || hi < lo || hi >= n {
                return Err(Error::MalformedSignal(format!(
                    "blocks must be consecutive and cover 0..{}, got block ({lo}, {hi}) where {expect} was expected",
                    n - 1
                )));
            }
            expect = hi + 1;
        }
        if expect != n {
            return Err(Error::MalformedSignal(format!(
                "blocks cover only 0..{}",
                expect.saturating_sub(1)
            )));
        }
        Ok(Self { n, blocks })
    }

    /// Every state revealed: n singleton blocks.
    pub fn full_disclosure(n: usize) -> Self {
        Self::new((0..n).map(|i| (i, i)).collect(), n).expect("singletons are consecutive")
    }

    /// Every state pooled into one block.
    pub fn no_disclosure(n: usize) -> Self {
        Self::new(vec![(0, n - 1)], n).expect("one block is consecutive")
    }

    /// States below index `cutoff` revealed, states from `cutoff` up pooled.
    pub fn upper_censorship(cutoff: usize, n: usize) -> Result<Self> {
        if cutoff >= n {
            return Err(Error::MalformedSignal(format!(
                "cutoff index {cutoff} out of range for {n} states"
            )));
        }
        let mut blocks: Vec<(usize, usize)> = (0..cutoff).map(|i| (i, i)).collect();
        blocks.push((cutoff, n - 1));
        Self::new(blocks, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// Index of the first pooled state when the partition is singletons
    /// followed by one terminal block; `None` otherwise. Full disclosure
    /// reports the last index.
    pub fn upper_censorship_cutoff(&self) -> Option<usize> {
        let last = self.blocks.len() - 1;
        for (k, &(lo, hi)) in self.blocks.iter().enumerate() {
            if k < last && lo != hi {
                return None;
            }
        }
        Some(self.blocks[last].0)
    }
}

/// Disjoint intervals of positive length inside `[0, 1]`, each pooled to its
/// conditional mean; states outside every interval are revealed. Intervals
/// may share endpoints (a cutoff rule pools `[0, x]` and `[x, 1]`).
#[derive(Debug, Clone, PartialEq)]
pub struct PoolingSet {
    intervals: Vec<(f64, f64)>,
}

impl PoolingSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev_end = 0.0f64;
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > 1.0 {
                return Err(Error::MalformedSignal(format!(
                    "pooling interval ({a}, {b}) leaves [0, 1]"
                )));
            }
            if a >= b {
                return Err(Error::MalformedSignal(format!(
                    "pooling interval ({a}, {b}) has no length"
                )));
            }
            if a < prev_end {
                return Err(Error::MalformedSignal(format!(
                    "pooling intervals overlap near {a}"
                )));
            }
            prev_end = b;
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Intervals of `[0, 1]` outside every pooled interval, in order;
    /// zero-length gaps are dropped.
    pub fn revealed_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cursor = 0.0f64;
        for &(a, b) in &self.intervals {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < 1.0 {
            out.push((cursor, 1.0));
        }
        out
    }
}

/// Upper censorship with a randomized cutoff state: states below the cutoff
/// are revealed, states above are pooled, and the cutoff state itself is
/// revealed with probability `q` (pooled otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticUcSignal {
    pub cutoff_state: f64,
    pub q: f64,
}

impl StochasticUcSignal {
    pub fn new(cutoff_state: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::MalformedSignal(format!(
                "separation probability {q} outside [0, 1]"
            )));
        }
        if !cutoff_state.is_finite() {
            return Err(Error::MalformedSignal("non-finite cutoff state".into()));
        }
        Ok(Self { cutoff_state, q })
    }
}

/// Any signal accepted by [`crate::prior::induce_distribution`].
#[derive(Debug, Clone)]
pub enum Signal {
    Partition(MonotonePartition),
    Pooling(PoolingSet),
    StochasticUc(StochasticUcSignal),
}

impl From<MonotonePartition> for Signal {
    fn from(p: MonotonePartition) -> Self {
        Signal::Partition(p)
    }
}

impl From<PoolingSet> for Signal {
    fn from(p: PoolingSet) -> Self {
        Signal::Pooling(p)
    }
}

impl From<StochasticUcSignal> for Signal {
    fn from(s: StochasticUcSignal) -> Self {
        Signal::StochasticUc(s)
    }
}
