//! Media-control application: censorship policies over a set of outlets and
//! their equivalence with monotone signals on the induced state.
//!
//! Each outlet sits at a position in (0, 1) and reports whether the
//! underlying quality clears that position, so the messages of all outlets
//! cut [0, 1] into cells; the induced state is the conditional mean of
//! quality within a cell. Censoring an outlet merges the two cells it
//! separates, which is exactly pooling adjacent states. Censorship policies
//! and monotone partitions therefore implement the same outcome
//! distributions, and optimal censorship reduces to the discrete monotone
//! solver for finitely many outlets, or to the continuous solver when the
//! outlets form a continuum over the whole interval.

use std::collections::BTreeSet;

use crate::continuous::{
    solve_monotone_continuous, unrestricted_value, Branch, IntervalDisclosure,
    UnrestrictedSolution,
};
use crate::discrete::{partition_value, solve_monotone_discrete, StochasticUpperCensorship};
use crate::error::{Error, Result};
use crate::objective::ObjectiveFn;
use crate::oracle::SetPartition;
use crate::prior::{ContinuousPrior, DiscretePrior};
use crate::signal::MonotonePartition;

/// Hard cap on outlet count for exhaustive policy enumeration.
pub const POLICY_ENUM_CAP: usize = 12;
/// Two induced atoms closer than this count as the same outcome.
pub const ATOM_TOL: f64 = 1e-12;
/// Grid for the nondecreasing check on the citizens' distribution.
const CDF_GRID: usize = 1001;
/// Slack for that check.
const CDF_TOL: f64 = 1e-9;
/// A cell thinner than this in mass cannot carry a conditional mean.
const CELL_MASS_TOL: f64 = 1e-12;

/// The set of outlet positions: finitely many interior cut points, or every
/// point of the interval.
#[derive(Debug, Clone)]
pub enum Outlets {
    Finite(Vec<f64>),
    Continuum,
}

/// Mass and first moment of quality over one cell between adjacent outlets.
#[derive(Debug, Clone, Copy)]
struct Cell {
    mass: f64,
    weighted: f64,
}

impl Cell {
    fn mean(&self) -> f64 {
        self.weighted / self.mass
    }
}

/// The persuasion environment: quality distribution, the citizens' type
/// distribution (aggregate support at posterior mean `y` is `citizens(y)`),
/// and the outlet set.
#[derive(Debug, Clone)]
pub struct MediaEnvironment {
    quality: ContinuousPrior,
    citizens: ObjectiveFn,
    outlets: Outlets,
    /// Cell masses and first moments, cached once so every downstream pooled
    /// mean is the same ratio of the same partial sums.
    cells: Vec<Cell>,
}

impl MediaEnvironment {
    pub fn new(quality: ContinuousPrior, citizens: ObjectiveFn, outlets: Outlets) -> Result<Self> {
        let mut prev = citizens.eval(0.0);
        for i in 1..CDF_GRID {
            let x = i as f64 / (CDF_GRID - 1) as f64;
            let y = citizens.eval(x);
            if y < prev - CDF_TOL {
                return Err(Error::InvalidInput(format!(
                    "citizens' distribution decreases near {x:.4}: {y:.6e} < {prev:.6e}"
                )));
            }
            prev = prev.max(y);
        }
        let cells = match &outlets {
            Outlets::Continuum => Vec::new(),
            Outlets::Finite(cuts) => {
                for w in cuts.windows(2) {
                    if !(w[0] < w[1]) {
                        return Err(Error::InvalidInput(
                            "outlet positions must be strictly increasing".into(),
                        ));
                    }
                }
                if cuts.iter().any(|&c| !(0.0 < c && c < 1.0)) {
                    return Err(Error::InvalidInput(
                        "outlet positions must lie strictly inside (0, 1)".into(),
                    ));
                }
                let mut bounds = Vec::with_capacity(cuts.len() + 2);
                bounds.push(0.0);
                bounds.extend_from_slice(cuts);
                bounds.push(1.0);
                let mut cells = Vec::with_capacity(bounds.len() - 1);
                for w in bounds.windows(2) {
                    let mass = quality.cdf(w[1]) - quality.cdf(w[0]);
                    let weighted = quality.partial_mean(w[1]) - quality.partial_mean(w[0]);
                    if mass <= CELL_MASS_TOL {
                        return Err(Error::EmptyInterval {
                            lo: w[0],
                            hi: w[1],
                            mass,
                        });
                    }
                    cells.push(Cell { mass, weighted });
                }
                cells
            }
        };
        Ok(Self {
            quality,
            citizens,
            outlets,
            cells,
        })
    }

    pub fn quality(&self) -> &ContinuousPrior {
        &self.quality
    }

    pub fn citizens(&self) -> &ObjectiveFn {
        &self.citizens
    }

    pub fn outlets(&self) -> &Outlets {
        &self.outlets
    }

    pub fn is_continuum(&self) -> bool {
        matches!(self.outlets, Outlets::Continuum)
    }

    /// Outlet positions for a finite outlet set.
    pub fn outlet_positions(&self) -> Option<&[f64]> {
        match &self.outlets {
            Outlets::Finite(cuts) => Some(cuts),
            Outlets::Continuum => None,
        }
    }

    fn finite_outlet_count(&self) -> Result<usize> {
        self.outlet_positions()
            .map(<[f64]>::len)
            .ok_or_else(|| Error::InvalidInput("operation needs finitely many outlets".into()))
    }
}

/// A censorship policy: which outlet indices are silenced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensorshipPolicy {
    censored: Vec<usize>,
    n_outlets: usize,
}

impl CensorshipPolicy {
    pub fn new(mut censored: Vec<usize>, n_outlets: usize) -> Result<Self> {
        censored.sort_unstable();
        censored.dedup();
        if censored.last().is_some_and(|&i| i >= n_outlets) {
            return Err(Error::InvalidInput(format!(
                "censored index out of range for {n_outlets} outlets"
            )));
        }
        Ok(Self {
            censored,
            n_outlets,
        })
    }

    /// Bit `i` set censors outlet `i`.
    pub fn from_bitmask(mask: u64, n_outlets: usize) -> Result<Self> {
        if n_outlets < 64 && mask >> n_outlets != 0 {
            return Err(Error::InvalidInput(format!(
                "bitmask {mask:#b} has bits beyond {n_outlets} outlets"
            )));
        }
        let censored = (0..n_outlets).filter(|i| mask >> i & 1 == 1).collect();
        Ok(Self {
            censored,
            n_outlets,
        })
    }

    pub fn censored(&self) -> &[usize] {
        &self.censored
    }

    pub fn n_outlets(&self) -> usize {
        self.n_outlets
    }

    pub fn censors(&self, outlet: usize) -> bool {
        self.censored.binary_search(&outlet).is_ok()
    }

    pub fn bitmask(&self) -> u64 {
        debug_assert!(self.n_outlets < 64);
        self.censored.iter().fold(0, |m, &i| m | 1 << i)
    }
}

fn check_policy_fits(env: &MediaEnvironment, policy: &CensorshipPolicy) -> Result<usize> {
    let k = env.finite_outlet_count()?;
    if policy.n_outlets != k {
        return Err(Error::InvalidInput(format!(
            "policy is for {} outlets, environment has {k}",
            policy.n_outlets
        )));
    }
    Ok(k)
}

/// The prior over induced states: one atom per cell, at the cell's
/// conditional mean, with the cell's mass.
pub fn induced_state_prior(env: &MediaEnvironment) -> Result<DiscretePrior> {
    env.finite_outlet_count()?;
    let support = env.cells.iter().map(Cell::mean).collect();
    let probs = env.cells.iter().map(|c| c.mass).collect();
    DiscretePrior::new(support, probs)
}

/// The monotone partition a policy implements: adjacent cells merge exactly
/// when the outlet separating them is censored.
pub fn policy_to_partition(
    env: &MediaEnvironment,
    policy: &CensorshipPolicy,
) -> Result<MonotonePartition> {
    let k = check_policy_fits(env, policy)?;
    let n = k + 1;
    let mut blocks = Vec::new();
    let mut start = 0;
    for outlet in 0..k {
        if !policy.censors(outlet) {
            blocks.push((start, outlet));
            start = outlet + 1;
        }
    }
    blocks.push((start, n - 1));
    MonotonePartition::new(blocks, n)
}

/// The policy implementing a partition of the induced states: censor exactly
/// the outlets interior to blocks. Fails when the blocks are not consecutive
/// runs, since merging cells can only pool adjacent states.
pub fn partition_to_policy(
    env: &MediaEnvironment,
    partition: &SetPartition,
) -> Result<CensorshipPolicy> {
    let k = env.finite_outlet_count()?;
    if partition.n() != k + 1 {
        return Err(Error::InvalidInput(format!(
            "partition is over {} states, environment induces {}",
            partition.n(),
            k + 1
        )));
    }
    let monotone = partition.to_monotone().ok_or_else(|| {
        Error::NonmonotoneSignal(
            "blocks pool non-adjacent states; no censorship policy implements that".into(),
        )
    })?;
    let censored = monotone
        .blocks()
        .iter()
        .flat_map(|&(lo, hi)| lo..hi)
        .collect();
    CensorshipPolicy::new(censored, k)
}

/// Outcome distribution of a policy, straight from the cached cells: one
/// atom per run of merged cells.
pub fn policy_distribution(
    env: &MediaEnvironment,
    policy: &CensorshipPolicy,
) -> Result<Vec<(f64, f64)>> {
    let k = check_policy_fits(env, policy)?;
    let mut atoms = Vec::new();
    let (mut mass, mut weighted) = (0.0, 0.0);
    for (i, cell) in env.cells.iter().enumerate() {
        mass += cell.mass;
        weighted += cell.weighted;
        if i == k || !policy.censors(i) {
            atoms.push((weighted / mass, mass));
            mass = 0.0;
            weighted = 0.0;
        }
    }
    Ok(atoms)
}

/// Government's value of a policy, defined through the partition it
/// implements so the policy/partition equivalence is exact by construction.
pub fn policy_value(env: &MediaEnvironment, policy: &CensorshipPolicy) -> Result<f64> {
    let induced = induced_state_prior(env)?;
    let partition = policy_to_partition(env, policy)?;
    partition_value(&induced, &env.citizens, &partition)
}

/// Exhaustive check that policies and monotone partitions induce the same
/// outcome distributions, pairwise under the merge construction.
#[derive(Debug, Clone)]
pub struct OutcomeEquivalence {
    /// Number of policies enumerated (= number of monotone partitions).
    pub policies: usize,
    /// Distinct partitions hit by the policy map; equals `policies` exactly
    /// when the map is a bijection.
    pub distinct_partitions: usize,
    pub max_mean_gap: f64,
    pub max_mass_gap: f64,
    /// Every policy survives partition round-tripping unchanged.
    pub round_trip_ok: bool,
    pub passed: bool,
}

/// Enumerates all policies, maps each to its partition, and compares the
/// outcome distributions atom-by-atom; also checks the map is a bijection
/// onto the monotone partitions and round-trips exactly.
pub fn verify_outcome_equivalence(env: &MediaEnvironment) -> Result<OutcomeEquivalence> {
    let k = env.finite_outlet_count()?;
    if k > POLICY_ENUM_CAP {
        return Err(Error::TooLarge {
            detail: format!("{k} outlets means 2^{k} policies"),
            cap: POLICY_ENUM_CAP,
        });
    }
    let induced = induced_state_prior(env)?;
    let mut seen = BTreeSet::new();
    let (mut max_mean_gap, mut max_mass_gap) = (0.0f64, 0.0f64);
    let mut round_trip_ok = true;
    let total = 1u64 << k;
    for mask in 0..total {
        let policy = CensorshipPolicy::from_bitmask(mask, k)?;
        let partition = policy_to_partition(env, &policy)?;
        let direct = policy_distribution(env, &policy)?;
        let blocks = partition.blocks();
        if direct.len() != blocks.len() {
            return Err(Error::MalformedSignal(format!(
                "policy {mask:#b} induced {} atoms but its partition has {} blocks",
                direct.len(),
                blocks.len()
            )));
        }
        for (&(mean, mass), &(lo, hi)) in direct.iter().zip(blocks) {
            max_mean_gap = max_mean_gap.max((mean - induced.block_mean(lo, hi)).abs());
            max_mass_gap = max_mass_gap.max((mass - induced.block_mass(lo, hi)).abs());
        }
        round_trip_ok &= partition_to_policy(env, &SetPartition::from(&partition))? == policy;
        seen.insert(partition.blocks().to_vec());
    }
    let report = OutcomeEquivalence {
        policies: total as usize,
        distinct_partitions: seen.len(),
        max_mean_gap,
        max_mass_gap,
        round_trip_ok,
        passed: seen.len() as u64 == total
            && max_mean_gap <= ATOM_TOL
            && max_mass_gap <= ATOM_TOL
            && round_trip_ok,
    };
    Ok(report)
}

/// What the government does with a continuum of outlets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuumPolicy {
    /// Silence every outlet; citizens learn nothing.
    CensorAll,
    /// Permit exactly one outlet; citizens learn which side of it quality
    /// falls on.
    PermitSingle { outlet: f64 },
    /// Permit every outlet positioned inside the window and silence the
    /// extremes on both sides.
    PermitInterval { lo: f64, hi: f64 },
}

impl ContinuumPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContinuumPolicy::CensorAll => "censor_all",
            ContinuumPolicy::PermitSingle { .. } => "permit_single",
            ContinuumPolicy::PermitInterval { .. } => "permit_interval",
        }
    }
}

/// Optimal censorship with finitely many outlets.
#[derive(Debug, Clone)]
pub struct FiniteCensorship {
    pub policy: CensorshipPolicy,
    pub partition: MonotonePartition,
    pub value: f64,
    /// Every value-tied optimal policy, canonical first.
    pub ties: Vec<CensorshipPolicy>,
    /// Unrestricted benchmark. Randomizing one outlet's report attains it,
    /// but no censorship policy does when the mix weight is interior.
    pub stochastic_reference: StochasticUpperCensorship,
}

/// Optimal censorship with a continuum of outlets.
#[derive(Debug, Clone)]
pub struct ContinuumCensorship {
    pub policy: ContinuumPolicy,
    pub solution: IntervalDisclosure,
    pub value: f64,
    /// Unrestricted benchmark with its two-atom-split certificate; attainable
    /// by randomized or non-adjacent pooling devices, not by censorship.
    pub unrestricted: UnrestrictedSolution,
}

#[derive(Debug, Clone)]
pub enum CensorshipOutcome {
    Finite(FiniteCensorship),
    Continuum(ContinuumCensorship),
}

impl CensorshipOutcome {
    pub fn value(&self) -> f64 {
        match self {
            CensorshipOutcome::Finite(f) => f.value,
            CensorshipOutcome::Continuum(c) => c.value,
        }
    }
}

/// Computes the optimal censorship policy.
///
/// Finitely many outlets: solve the monotone problem on the induced states;
/// the optimum censors the outlets interior to the terminal pooled block,
/// which is always a suffix of the outlet list. Continuum: solve the
/// monotone problem on quality directly; pooling the two tails maps to
/// permitting the window of outlets between them, a cutoff rule maps to
/// permitting the single outlet at the cutoff, and pooling everything maps
/// to censoring every outlet.
pub fn optimal_censorship(env: &MediaEnvironment) -> Result<CensorshipOutcome> {
    if env.is_continuum() {
        let solution = solve_monotone_continuous(&env.quality, &env.citizens)?;
        let policy = match solution.branch {
            Branch::Interval => ContinuumPolicy::PermitInterval {
                lo: solution.omega_l_star,
                hi: solution.omega_r_star,
            },
            Branch::Cutoff => ContinuumPolicy::PermitSingle {
                outlet: solution.omega_l_star,
            },
            Branch::NoDisclosure => ContinuumPolicy::CensorAll,
        };
        let unrestricted = unrestricted_value(&env.quality, &env.citizens)?;
        return Ok(CensorshipOutcome::Continuum(ContinuumCensorship {
            policy,
            value: solution.value,
            solution,
            unrestricted,
        }));
    }
    let induced = induced_state_prior(env)?;
    let solution = solve_monotone_discrete(&induced, &env.citizens)?;
    let ties: Vec<CensorshipPolicy> = solution
        .best
        .iter()
        .map(|c| partition_to_policy(env, &SetPartition::from(&c.partition)))
        .collect::<Result<_>>()?;
    let primary = &solution.best[0];
    Ok(CensorshipOutcome::Finite(FiniteCensorship {
        policy: ties[0].clone(),
        partition: primary.partition.clone(),
        value: solution.value,
        ties,
        stochastic_reference: solution.stochastic,
    }))
}
