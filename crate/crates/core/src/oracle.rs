//! Brute-force baselines the solvers are checked against.
//!
//! Enumeration covers monotone (consecutive-block) partitions and all set
//! partitions of the support; the latter may pool non-adjacent states, which
//! is deliberately outside what the solvers produce. Continuous instances
//! get dense grid searches over the relevant signal families.

use crate::error::{Error, Result};
use crate::objective::ObjectiveFn;
use crate::prior::{DiscretePrior, Prior};
use crate::signal::MonotonePartition;

/// Enumeration cap for monotone partitions (2^(n-1) of them).
pub const MONOTONE_CAP: usize = 25;
/// Enumeration cap for all set partitions (Bell-number growth).
pub const ALL_CAP: usize = 10;
/// Argmaxes within this of the maximum are reported as ties.
pub const TIE_TOL: f64 = 1e-12;

/// Which family of deterministic signals to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    /// Consecutive blocks only.
    Monotone,
    /// Every set partition, including nonmonotone poolings.
    All,
}

/// A deterministic signal as a set partition of support indices.
///
/// Blocks need not be consecutive. Canonical form: each block sorted
/// ascending, blocks ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl SetPartition {
    /// Validates that `blocks` are disjoint, cover `0..n`, and canonicalizes.
    pub fn new(mut blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut count = 0usize;
        for block in &mut blocks {
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n || seen[i] {
                    return Err(Error::MalformedSignal(format!(
                        "index {i} out of range or repeated in set partition"
                    )));
                }
                seen[i] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::MalformedSignal(format!(
                "set partition covers {count} of {n} indices"
            )));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { blocks, n })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Converts to a monotone partition if every block is consecutive.
    pub fn to_monotone(&self) -> Option<MonotonePartition> {
        let mut ranges = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let (lo, hi) = (block[0], *block.last().unwrap());
            if hi - lo + 1 != block.len() {
                return None;
            }
            ranges.push((lo, hi));
        }
        MonotonePartition::new(ranges, self.n).ok()
    }
}

impl From<&MonotonePartition> for SetPartition {
    fn from(p: &MonotonePartition) -> Self {
        let blocks = p
            .blocks()
            .iter()
            .map(|&(lo, hi)| (lo..=hi).collect())
            .collect();
        Self { blocks, n: p.n() }
    }
}

/// Expected payoff of pooling each block to its conditional mean.
pub fn set_partition_value(prior: &DiscretePrior, v: &ObjectiveFn, p: &SetPartition) -> Result<f64> {
    if p.n() != prior.n() {
        return Err(Error::MalformedSignal(format!(
            "partition of {} states applied to {}-state prior",
            p.n(),
            prior.n()
        )));
    }
    let omega = prior.support();
    let f = prior.probs();
    let mut total = 0.0;
    for block in p.blocks() {
        let mut mass = 0.0;
        let mut weighted = 0.0;
        for &i in block {
            mass += f[i];
            weighted += f[i] * omega[i];
        }
        total += mass * v.eval(weighted / mass);
    }
    Ok(total)
}

fn check_cap(n: usize, kind: PartitionKind) -> Result<()> {
    let cap = match kind {
        PartitionKind::Monotone => MONOTONE_CAP,
        PartitionKind::All => ALL_CAP,
    };
    if n > cap {
        return Err(Error::TooLarge {
            detail: format!("{n} states for {kind:?} partition enumeration"),
            cap,
        });
    }
    Ok(())
}

/// Streams partitions of `0..n` in a deterministic order.
///
/// Monotone partitions are indexed by cut masks (2^(n-1) of them); all set
/// partitions follow restricted-growth-string order (Bell(n) of them).
pub fn enumerate_partitions(n: usize, kind: PartitionKind) -> Result<PartitionIter> {
    if n == 0 {
        return Err(Error::InvalidInput("empty support".into()));
    }
    check_cap(n, kind)?;
    let inner = match kind {
        PartitionKind::Monotone => IterKind::Mask { next: 0, n },
        PartitionKind::All => IterKind::Rgs(RgsIter::new(n)),
    };
    Ok(PartitionIter { inner })
}

pub struct PartitionIter {
    inner: IterKind,
}

enum IterKind {
    Mask { next: u64, n: usize },
    Rgs(RgsIter),
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        match &mut self.inner {
            IterKind::Mask { next, n } => {
                if *next >= 1u64 << (*n - 1) {
                    return None;
                }
                let p = decode_mask(*next, *n);
                *next += 1;
                Some(p)
            }
            IterKind::Rgs(rgs) => {
                let a = rgs.step()?;
                Some(decode_rgs(a))
            }
        }
    }
}

/// Restricted growth strings: a[0] = 0 and a[i] <= max(a[..i]) + 1.
struct RgsIter {
    a: Vec<u8>,
    started: bool,
    done: bool,
}

impl RgsIter {
    fn new(n: usize) -> Self {
        Self {
            a: vec![0; n],
            started: false,
            done: false,
        }
    }

    /// Advances in place and returns the current string.
    fn step(&mut self) -> Option<&[u8]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.a);
        }
        let n = self.a.len();
        for i in (1..n).rev() {
            let prefix_max = *self.a[..i].iter().max().unwrap();
            if self.a[i] <= prefix_max {
                self.a[i] += 1;
                self.a[i + 1..].fill(0);
                return Some(&self.a);
            }
        }
        self.done = true;
        None
    }
}

/// Bit i of `mask` set means a cut between states i and i+1.
fn decode_mask(mask: u64, n: usize) -> SetPartition {
    let mut blocks = Vec::new();
    let mut current = Vec::new();
    for i in 0..n {
        current.push(i);
        if i + 1 == n || (mask >> i) & 1 == 1 {
            blocks.push(std::mem::take(&mut current));
        }
    }
    SetPartition { blocks, n }
}

fn decode_rgs(a: &[u8]) -> SetPartition {
    let labels = 1 + usize::from(*a.iter().max().unwrap());
    let mut blocks = vec![Vec::new(); labels];
    for (i, &label) in a.iter().enumerate() {
        blocks[usize::from(label)].push(i);
    }
    // RGS labels appear in order of first occurrence, so blocks are already
    // sorted by smallest element
    SetPartition {
        blocks,
        n: a.len(),
    }
}

fn mask_value(prior: &DiscretePrior, v: &ObjectiveFn, mask: u64) -> f64 {
    let omega = prior.support();
    let f = prior.probs();
    let n = omega.len();
    let mut total = 0.0;
    let mut mass = 0.0;
    let mut weighted = 0.0;
    for i in 0..n {
        mass += f[i];
        weighted += f[i] * omega[i];
        if i + 1 == n || (mask >> i) & 1 == 1 {
            total += mass * v.eval(weighted / mass);
            mass = 0.0;
            weighted = 0.0;
        }
    }
    total
}

fn rgs_value(prior: &DiscretePrior, v: &ObjectiveFn, a: &[u8]) -> f64 {
    let omega = prior.support();
    let f = prior.probs();
    let mut mass = [0.0f64; ALL_CAP];
    let mut weighted = [0.0f64; ALL_CAP];
    let mut labels = 0usize;
    for (i, &label) in a.iter().enumerate() {
        let k = usize::from(label);
        mass[k] += f[i];
        weighted[k] += f[i] * omega[i];
        labels = labels.max(k + 1);
    }
    (0..labels).map(|k| mass[k] * v.eval(weighted[k] / mass[k])).sum()
}

/// Exhaustive maximum over a partition family.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub value: f64,
    /// Every argmax within [`TIE_TOL`] of the maximum, in lexicographic
    /// partition order.
    pub best: Vec<SetPartition>,
}

/// Worker count: `MP_SOLVER_THREADS` when set and valid, otherwise 1.
pub fn solver_threads() -> usize {
    std::env::var("MP_SOLVER_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .map(|t| t.clamp(1, 256))
        .unwrap_or(1)
}

/// Maximizes the partition value exhaustively.
///
/// Work is sharded across [`solver_threads`] workers by enumeration index;
/// the merge re-filters ties against the global maximum and sorts them, so
/// the result does not depend on the worker count.
pub fn brute_force(
    prior: &DiscretePrior,
    v: &ObjectiveFn,
    kind: PartitionKind,
) -> Result<BruteForceResult> {
    brute_force_with_threads(prior, v, kind, solver_threads())
}

pub fn brute_force_with_threads(
    prior: &DiscretePrior,
    v: &ObjectiveFn,
    kind: PartitionKind,
    threads: usize,
) -> Result<BruteForceResult> {
    let n = prior.n();
    check_cap(n, kind)?;
    let threads = threads.max(1);

    let shards: Vec<(f64, Vec<(f64, SetPartition)>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || match kind {
                    PartitionKind::Monotone => {
                        let mut shard = Shard::new();
                        let total = 1u64 << (n - 1);
                        let mut mask = t as u64;
                        while mask < total {
                            let value = mask_value(prior, v, mask);
                            shard.offer(value, || decode_mask(mask, n));
                            mask += threads as u64;
                        }
                        shard.finish()
                    }
                    PartitionKind::All => {
                        let mut shard = Shard::new();
                        let mut rgs = RgsIter::new(n);
                        let mut idx = 0usize;
                        while let Some(a) = rgs.step() {
                            if idx % threads == t {
                                let value = rgs_value(prior, v, a);
                                shard.offer(value, || decode_rgs(a));
                            }
                            idx += 1;
                        }
                        shard.finish()
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let value = shards
        .iter()
        .map(|&(m, _)| m)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut best: Vec<SetPartition> = shards
        .into_iter()
        .flat_map(|(_, ties)| ties)
        .filter(|&(v, _)| v >= value - TIE_TOL)
        .map(|(_, p)| p)
        .collect();
    best.sort();
    Ok(BruteForceResult { value, best })
}

/// Running max plus all candidates within [`TIE_TOL`] of it.
struct Shard {
    max: f64,
    ties: Vec<(f64, SetPartition)>,
}

impl Shard {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            ties: Vec::new(),
        }
    }

    fn offer(&mut self, value: f64, decode: impl FnOnce() -> SetPartition) {
        if value < self.max - TIE_TOL {
            return;
        }
        if value > self.max {
            self.max = value;
            self.ties.retain(|&(v, _)| v >= self.max - TIE_TOL);
        }
        self.ties.push((value, decode()));
    }

    fn finish(self) -> (f64, Vec<(f64, SetPartition)>) {
        (self.max, self.ties)
    }
}

/// Signal family a continuous grid search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFamily {
    /// Pool [0, a] and [b, 1], reveal the middle.
    IntervalDisclosure,
    /// Pool the middle [a, b] to one posterior and the two outer pieces to
    /// another (a nonmonotone two-atom signal).
    BipoolingPairs,
    /// The cutoff walk for a discrete prior, gridded in z.
    StochasticUcZ,
}

impl GridFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            GridFamily::IntervalDisclosure => "interval_disclosure",
            GridFamily::BipoolingPairs => "bipooling_pairs",
            GridFamily::StochasticUcZ => "stochastic_uc_z",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub family: GridFamily,
    /// Grid argmax: `[a, b]` cutoffs for the pair families, `[z]` for the
    /// cutoff walk.
    pub params: Vec<f64>,
    pub value: f64,
}

/// Exhaustive evaluation over a K-point (or K×K) parameter grid.
pub fn grid_search_continuous(
    prior: &Prior,
    v: &ObjectiveFn,
    k: usize,
    family: GridFamily,
) -> Result<GridSearchResult> {
    if k < 100 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 100 points, got {k}"
        )));
    }
    match (family, prior) {
        (GridFamily::StochasticUcZ, Prior::Discrete(d)) => grid_uc_z(d, v, k),
        (GridFamily::IntervalDisclosure, Prior::Continuous(c)) => grid_pairs(c, v, k, family),
        (GridFamily::BipoolingPairs, Prior::Continuous(c)) => grid_pairs(c, v, k, family),
        _ => Err(Error::InvalidInput(format!(
            "family {} does not apply to this prior kind",
            family.as_str()
        ))),
    }
}

fn grid_uc_z(prior: &DiscretePrior, v: &ObjectiveFn, k: usize) -> Result<GridSearchResult> {
    let omega = prior.support();
    let (lo, hi) = (omega[0], omega[omega.len() - 1]);
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..k {
        let z = if k == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        };
        let value = crate::discrete::uc_walk(prior, v, z).value;
        if value > best.0 {
            best = (value, z);
        }
    }
    Ok(GridSearchResult {
        family: GridFamily::StochasticUcZ,
        params: vec![best.1],
        value: best.0,
    })
}

fn grid_pairs(
    prior: &crate::prior::ContinuousPrior,
    v: &ObjectiveFn,
    k: usize,
    family: GridFamily,
) -> Result<GridSearchResult> {
    const MASS_FLOOR: f64 = 1e-14;
    let mean = prior.mean();
    let xs: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
    let cdf: Vec<f64> = xs.iter().map(|&x| prior.cdf(x)).collect();
    let pmean: Vec<f64> = xs.iter().map(|&x| prior.partial_mean(x)).collect();
    // cumulative revealed payoff, needed only when the middle is revealed
    let reveal: Vec<f64> = if family == GridFamily::IntervalDisclosure {
        let mut acc = Vec::with_capacity(k);
        let mut c = 0.0;
        acc.push(0.0);
        for i in 1..k {
            c += prior.integrate_objective(v, xs[i - 1], xs[i], 1e-12);
            acc.push(c);
        }
        acc
    } else {
        Vec::new()
    };

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..k {
        for j in i..k {
            let value = match family {
                GridFamily::IntervalDisclosure => {
                    let left_mass = cdf[i];
                    let right_mass = 1.0 - cdf[j];
                    let left = if left_mass > MASS_FLOOR {
                        left_mass * v.eval(pmean[i] / left_mass)
                    } else {
                        0.0
                    };
                    let right = if right_mass > MASS_FLOOR {
                        right_mass * v.eval((mean - pmean[j]) / right_mass)
                    } else {
                        0.0
                    };
                    left + (reveal[j] - reveal[i]) + right
                }
                GridFamily::BipoolingPairs => {
                    let mid_mass = cdf[j] - cdf[i];
                    let outer_mass = 1.0 - mid_mass;
                    let mid_weighted = pmean[j] - pmean[i];
                    let mid = if mid_mass > MASS_FLOOR {
                        mid_mass * v.eval(mid_weighted / mid_mass)
                    } else {
                        0.0
                    };
                    let outer = if outer_mass > MASS_FLOOR {
                        outer_mass * v.eval((mean - mid_weighted) / outer_mass)
                    } else {
                        0.0
                    };
                    mid + outer
                }
                GridFamily::StochasticUcZ => unreachable!(),
            };
            if value > best.0 {
                best = (value, xs[i], xs[j]);
            }
        }
    }
    Ok(GridSearchResult {
        family,
        params: vec![best.1, best.2],
        value: best.0,
    })
}
