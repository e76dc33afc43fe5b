//! Optimal signals for discrete priors and s-shaped payoffs.
//!
//! For an s-shaped `V`, the optimal unrestricted signal is a stochastic
//! upper censorship: states below a cutoff are revealed, states above are
//! pooled, and the cutoff state itself is revealed with some probability
//! `q`. The search runs along a single scalar parameter `z` that interpolates
//! the censorship cutoff through the support; the derivative of the value
//! along this walk is proportional to the tangent gap at the cutoff state,
//! which crosses zero at most once (from above).
//!
//! The optimal monotone signal is then one of the two deterministic
//! roundings of the stochastic optimum (`q = 0` or `q = 1`).

use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::objective::{classify_shape, tangent_gap, ObjectiveFn, ShapeKind};
use crate::prior::DiscretePrior;
use crate::signal::{MonotonePartition, StochasticUcSignal};

/// Values within this of each other count as a tie between partitions.
pub const VALUE_TIE_TOL: f64 = 1e-12;
/// Bisection bracket width for the cutoff walk.
const WALK_WIDTH: f64 = 1e-12;
const SHAPE_GRID: usize = 1001;
const SHAPE_TOL: f64 = 1e-12;

/// One point of the cutoff walk at parameter `z`.
///
/// With `j` the index of the last support point at or below `z` and
/// `q = (z - omega_j) / (omega_{j+1} - omega_j)`, states below `j` are
/// revealed, state `j` is revealed with probability `q`, and everything else
/// pools to `pooled_mean`.
#[derive(Debug, Clone, Copy)]
pub struct UcPoint {
    pub z: f64,
    pub cutoff_index: usize,
    pub cutoff_state: f64,
    pub q: f64,
    pub pooled_mean: f64,
    /// Expected payoff of this signal.
    pub value: f64,
    /// Tangent gap at the cutoff state; the walk's value derivative has this
    /// sign.
    pub gap: f64,
}

/// Evaluates the cutoff walk at `z` (clamped to the support range).
pub fn uc_walk(prior: &DiscretePrior, v: &ObjectiveFn, z: f64) -> UcPoint {
    let omega = prior.support();
    let n = omega.len();
    let z = z.clamp(omega[0], omega[n - 1]);
    let j = match omega.partition_point(|&w| w <= z) {
        0 => 0,
        k => k - 1,
    };
    let q = if j + 1 < n {
        (z - omega[j]) / (omega[j + 1] - omega[j])
    } else {
        0.0
    };
    let separated: f64 = (0..j)
        .map(|i| prior.probs()[i] * v.eval(omega[i]))
        .sum();
    point_at(prior, v, j, q, separated)
}

fn point_at(
    prior: &DiscretePrior,
    v: &ObjectiveFn,
    j: usize,
    q: f64,
    separated_value: f64,
) -> UcPoint {
    let omega = prior.support();
    let f = prior.probs();
    let n = omega.len();
    let retained = (1.0 - q) * f[j];
    let pooled_mass = retained + prior.tail_mass(j + 1);
    let pooled_mean = if pooled_mass > 0.0 {
        (retained * omega[j] + prior.tail_weighted(j + 1)) / pooled_mass
    } else {
        omega[j]
    };
    let value = separated_value + q * f[j] * v.eval(omega[j]) + pooled_mass * v.eval(pooled_mean);
    let z = if j + 1 < n {
        omega[j] + q * (omega[j + 1] - omega[j])
    } else {
        omega[j]
    };
    UcPoint {
        z,
        cutoff_index: j,
        cutoff_state: omega[j],
        q,
        pooled_mean,
        value,
        gap: tangent_gap(v, omega[j], pooled_mean),
    }
}

/// Optimal stochastic upper censorship.
#[derive(Debug, Clone, Copy)]
pub struct StochasticUpperCensorship {
    pub cutoff_index: usize,
    pub cutoff_state: f64,
    pub q: f64,
    pub z: f64,
    pub pooled_mean: f64,
    pub value: f64,
    /// Tangent gap at the optimum: zero at interior solutions, weakly
    /// negative when pooling everything is already optimal.
    pub tangency_gap: f64,
}

impl StochasticUpperCensorship {
    pub fn signal(&self) -> StochasticUcSignal {
        StochasticUcSignal {
            cutoff_state: self.cutoff_state,
            q: self.q,
        }
    }
}

/// Solves for the optimal unrestricted signal under an s-shaped payoff.
///
/// Walks the cutoff parameter across the support, finds the single sign
/// change of the tangent gap, and refines it within the bracketing segment
/// by bisection.
pub fn solve_stochastic_uc(
    prior: &DiscretePrior,
    v: &ObjectiveFn,
) -> Result<StochasticUpperCensorship> {
    let shape = classify_shape(v, SHAPE_GRID, SHAPE_TOL)?;
    if shape.kind != ShapeKind::SShaped {
        return Err(Error::ShapeError {
            expected: "s_shaped",
            found: shape.kind.as_str().to_string(),
        });
    }
    let omega = prior.support();
    let f = prior.probs();
    let n = omega.len();
    if n == 1 {
        return Ok(from_point(point_at(prior, v, 0, 0.0, 0.0)));
    }

    let mut separated = 0.0f64;
    for k in 0..n - 1 {
        let left = point_at(prior, v, k, 0.0, separated);
        if left.gap <= 0.0 {
            // at k = 0 nothing is separated yet (pool everything); at an
            // interior knot the gap jumped through zero between segments
            return Ok(from_point(left));
        }
        // gap at the right edge of segment k, still with cutoff state k
        let next_mean = if k + 1 == n - 1 {
            omega[n - 1]
        } else {
            prior.tail_weighted(k + 1) / prior.tail_mass(k + 1)
        };
        let right_gap = tangent_gap(v, omega[k], next_mean);
        if right_gap <= 0.0 {
            let g = |z: f64| {
                let q = (z - omega[k]) / (omega[k + 1] - omega[k]);
                point_at(prior, v, k, q, separated).gap
            };
            let z = bisect(g, omega[k], omega[k + 1], WALK_WIDTH)
                .expect("gap changes sign inside the bracketing segment");
            let q = ((z - omega[k]) / (omega[k + 1] - omega[k])).clamp(0.0, 1.0);
            return Ok(from_point(point_at(prior, v, k, q, separated)));
        }
        separated += f[k] * v.eval(omega[k]);
    }
    // the gap stayed positive through the whole walk: reveal everything
    Ok(from_point(point_at(prior, v, n - 1, 0.0, separated)))
}

fn from_point(p: UcPoint) -> StochasticUpperCensorship {
    StochasticUpperCensorship {
        cutoff_index: p.cutoff_index,
        cutoff_state: p.cutoff_state,
        q: p.q,
        z: p.z,
        pooled_mean: p.pooled_mean,
        value: p.value,
        tangency_gap: p.gap,
    }
}

/// Expected payoff of a monotone partition: block masses times `V` at block
/// means.
pub fn partition_value(
    prior: &DiscretePrior,
    v: &ObjectiveFn,
    partition: &MonotonePartition,
) -> Result<f64> {
    if partition.n() != prior.n() {
        return Err(Error::MalformedSignal(format!(
            "partition of {} states applied to {}-state prior",
            partition.n(),
            prior.n()
        )));
    }
    Ok(partition
        .blocks()
        .iter()
        .map(|&(lo, hi)| prior.block_mass(lo, hi) * v.eval(prior.block_mean(lo, hi)))
        .sum())
}

/// A deterministic upper censorship candidate: the partition, its value, and
/// its `(cutoff_state, q)` label relative to the stochastic optimum.
#[derive(Debug, Clone)]
pub struct UcCandidate {
    pub partition: MonotonePartition,
    pub cutoff_state: f64,
    pub q: f64,
    pub value: f64,
}

/// Optimal monotone signal, possibly tied.
#[derive(Debug, Clone)]
pub struct MonotoneSolutionDiscrete {
    pub value: f64,
    /// Tied-optimal candidates, the one with fewest blocks (most pooling)
    /// first.
    pub best: Vec<UcCandidate>,
    /// The stochastic optimum the candidates round.
    pub stochastic: StochasticUpperCensorship,
}

/// Solves the monotone-restricted problem by rounding the stochastic
/// optimum's cutoff probability to 0 and 1 and keeping the better value
/// (both on a tie within [`VALUE_TIE_TOL`]).
pub fn solve_monotone_discrete(
    prior: &DiscretePrior,
    v: &ObjectiveFn,
) -> Result<MonotoneSolutionDiscrete> {
    let stochastic = solve_stochastic_uc(prior, v)?;
    let n = prior.n();
    let j = stochastic.cutoff_index;

    let pool_from_j = MonotonePartition::upper_censorship(j, n)?;
    let value_a = partition_value(prior, v, &pool_from_j)?;
    let mut candidates = vec![UcCandidate {
        partition: pool_from_j,
        cutoff_state: stochastic.cutoff_state,
        q: 0.0,
        value: value_a,
    }];
    if j + 1 < n {
        let pool_above_j = MonotonePartition::upper_censorship(j + 1, n)?;
        let value_b = partition_value(prior, v, &pool_above_j)?;
        candidates.push(UcCandidate {
            partition: pool_above_j,
            cutoff_state: stochastic.cutoff_state,
            q: 1.0,
            value: value_b,
        });
    }

    let best_value = candidates
        .iter()
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let best: Vec<UcCandidate> = candidates
        .into_iter()
        .filter(|c| best_value - c.value <= VALUE_TIE_TOL)
        .collect();
    Ok(MonotoneSolutionDiscrete {
        value: best_value,
        best,
        stochastic,
    })
}
