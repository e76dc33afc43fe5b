//! Solvers for linear Bayesian persuasion restricted to monotone signals.
//!
//! A sender commits to a signal about a one-dimensional state in `[0, 1]`;
//! the sender's payoff is a function `V` of the induced posterior mean. This
//! crate solves for optimal signals when the signal is required to be
//! monotone (it pools states into intervals, or consecutive blocks in the
//! discrete case) and benchmarks them against unrestricted signals.
//!
//! Module map:
//!
//! - [`objective`]: payoff functions of the posterior mean, shape
//!   classification (s-shaped, m-shaped, ...), tangency gaps, bitangents.
//! - [`prior`]: discrete and continuous state distributions, conditional
//!   means, induced posterior-mean distributions, mean-preserving
//!   contraction checks.
//! - [`signal`]: monotone partitions, interval pooling sets, stochastic
//!   upper-censorship signals.
//! - [`discrete`]: optimal signals for discrete priors and s-shaped
//!   objectives (stochastic upper censorship and its deterministic
//!   monotone counterpart).
//! - [`continuous`]: optimal monotone signals for continuous priors and
//!   m-shaped objectives (interval disclosure, cutoff rule, no
//!   disclosure), plus bipooling benchmarks for the unrestricted problem.
//! - [`oracle`]: exhaustive enumeration and grid-search baselines used to
//!   certify solver output on small instances.
//! - [`censorship`]: media-market application mapping censorship policies
//!   to monotone signals over an induced state distribution.
//! - [`config`] / [`report`]: JSON-facing problem descriptions and solver
//!   reports consumed and emitted by the CLI.

pub mod censorship;
pub mod config;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod numeric;
pub mod objective;
pub mod oracle;
pub mod prior;
pub mod report;
pub mod signal;

pub use censorship::{
    induced_state_prior, optimal_censorship, partition_to_policy, policy_distribution,
    policy_to_partition, policy_value, verify_outcome_equivalence, CensorshipOutcome,
    CensorshipPolicy, ContinuumCensorship, ContinuumPolicy, FiniteCensorship, MediaEnvironment,
    OutcomeEquivalence, Outlets,
};
pub use config::{
    EnvironmentConfig, ObjectiveConfig, OutletsConfig, OutputConfig, PriorConfig, ProblemConfig,
    SweepConfig, SweepFamily, Task, Tolerances,
};
pub use continuous::{
    check_bipooling_condition, construct_bipooling, pooling_value, solve_cutoff_rule,
    solve_interval_disclosure, solve_monotone_continuous, unrestricted_value,
    BipoolingCertificate, BipoolingForm, BipoolingMode, BipoolingSignal, Branch,
    IntervalDisclosure, UnrestrictedSolution,
};
pub use discrete::{
    partition_value, solve_monotone_discrete, solve_stochastic_uc, uc_walk,
    MonotoneSolutionDiscrete, StochasticUpperCensorship, UcCandidate, UcPoint,
};
pub use error::{Error, Result};
pub use objective::{classify_shape, concavify_at, solve_bitangent, tangent_gap};
pub use objective::{Bitangent, ObjectiveFn, ShapeKind, ShapeReport};
pub use oracle::{
    brute_force, enumerate_partitions, grid_search_continuous, set_partition_value,
    solver_threads, BruteForceResult, GridFamily, GridSearchResult, PartitionKind, SetPartition,
};
pub use report::{
    fmt12, sig12, CensorshipReport, Condition1Report, ContinuousReport, DiscreteReport,
};
pub use prior::{
    conditional_mean, induce_distribution, verify_contraction, ContinuousPrior, DiscretePrior,
    PosteriorDistribution, Prior,
};
pub use signal::{MonotonePartition, PoolingSet, Signal, StochasticUcSignal};
