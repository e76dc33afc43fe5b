//! State distributions and the posterior-mean distributions signals induce.
//!
//! A signal is feasible for a receiver who acts on the posterior mean iff
//! the distribution it induces over posterior means is a mean-preserving
//! contraction of the prior. This module owns both prior representations
//! (discrete and continuous), conditional means, the map from signals to
//! induced distributions, and the contraction verifier used to certify
//! every emitted distribution.

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, bisect};
use crate::objective::ObjectiveFn;
use crate::signal::Signal;
use statrs::distribution::{Beta, ContinuousCDF};

/// Atoms closer than this are merged when building induced distributions.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
/// Mass sums must match 1 this tightly at construction.
const MASS_TOL: f64 = 1e-12;
/// Conditional means over sets with less mass than this are refused.
const EMPTY_MASS_TOL: f64 = 1e-12;
/// Mean-preserving-contraction tolerance.
const CONTRACTION_TOL: f64 = 1e-9;

/// Finite-support distribution on `[0, 1]` with strictly increasing support
/// and strictly positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePrior {
    support: Vec<f64>,
    probs: Vec<f64>,
    // tail_mass[i] = sum of probs from i on; one extra trailing zero
    tail_mass: Vec<f64>,
    tail_weighted: Vec<f64>,
    mean: f64,
}

impl DiscretePrior {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidInput(
                "support and probability lists must be nonempty and equal length".into(),
            ));
        }
        for w in support.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidInput(
                    "support must be strictly increasing".into(),
                ));
            }
        }
        if support[0] < 0.0 || *support.last().unwrap() > 1.0 {
            return Err(Error::InvalidInput("support must lie in [0, 1]".into()));
        }
        if probs.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput(
                "probabilities must be strictly positive".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let n = support.len();
        let mut tail_mass = vec![0.0; n + 1];
        let mut tail_weighted = vec![0.0; n + 1];
        for i in (0..n).rev() {
            tail_mass[i] = tail_mass[i + 1] + probs[i];
            tail_weighted[i] = tail_weighted[i + 1] + probs[i] * support[i];
        }
        let mean = tail_weighted[0];
        Ok(Self {
            support,
            probs,
            tail_mass,
            tail_weighted,
            mean,
        })
    }

    pub fn n(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Mass on states `lo..=hi`.
    pub fn block_mass(&self, lo: usize, hi: usize) -> f64 {
        self.tail_mass[lo] - self.tail_mass[hi + 1]
    }

    /// Conditional mean of states `lo..=hi`.
    pub fn block_mean(&self, lo: usize, hi: usize) -> f64 {
        (self.tail_weighted[lo] - self.tail_weighted[hi + 1]) / self.block_mass(lo, hi)
    }

    /// Mass on states with index `>= i`.
    pub fn tail_mass(&self, i: usize) -> f64 {
        self.tail_mass[i]
    }

    /// Probability-weighted state sum over indices `>= i`.
    pub fn tail_weighted(&self, i: usize) -> f64 {
        self.tail_weighted[i]
    }

    /// Index of the support point equal to `x` up to `tol`.
    pub fn index_of(&self, x: f64, tol: f64) -> Option<usize> {
        self.support.iter().position(|&s| (s - x).abs() <= tol)
    }
}

#[derive(Debug, Clone)]
struct UniformPiece {
    lo: f64,
    hi: f64,
    density: f64,
    // cdf and partial mean at lo
    cum_f: f64,
    cum_m: f64,
}

#[derive(Debug, Clone)]
struct LinearPiece {
    lo: f64,
    // density(t) = c + s * t up to the next knot
    c: f64,
    s: f64,
    cum_f: f64,
    cum_m: f64,
}

#[derive(Debug, Clone)]
struct BetaComponent {
    alpha: f64,
    beta: f64,
    weight: f64,
    dist: Beta,
}

#[derive(Debug, Clone)]
enum ContinuousRepr {
    PiecewiseUniform(Vec<UniformPiece>),
    PiecewiseLinear(Vec<LinearPiece>),
    BetaMixture(Vec<BetaComponent>),
}

/// Absolutely continuous distribution on `[0, 1]` with positive density.
#[derive(Debug, Clone)]
pub struct ContinuousPrior {
    repr: ContinuousRepr,
    breakpoints: Vec<f64>,
    mean: f64,
}

impl ContinuousPrior {
    /// Builds from `(lo, hi, mass)` pieces that tile `[0, 1]` in order.
    pub fn piecewise_uniform(pieces: &[(f64, f64, f64)]) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("no density pieces".into()));
        }
        let mut built = Vec::with_capacity(pieces.len());
        let mut cursor = 0.0f64;
        let (mut cum_f, mut cum_m) = (0.0f64, 0.0f64);
        for &(lo, hi, mass) in pieces {
            if (lo - cursor).abs() > 1e-14 || hi <= lo {
                return Err(Error::InvalidInput(format!(
                    "pieces must tile [0, 1] in order; got piece [{lo}, {hi}] after {cursor}"
                )));
            }
            if !(mass > 0.0) || !mass.is_finite() {
                return Err(Error::InvalidInput(
                    "piece masses must be strictly positive".into(),
                ));
            }
            let density = mass / (hi - lo);
            built.push(UniformPiece {
                lo,
                hi,
                density,
                cum_f,
                cum_m,
            });
            cum_f += mass;
            cum_m += density * (hi * hi - lo * lo) / 2.0;
            cursor = hi;
        }
        if (cursor - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidInput("pieces must end at 1".into()));
        }
        if (cum_f - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "piece masses sum to {cum_f}, not 1"
            )));
        }
        let mut breakpoints: Vec<f64> = built.iter().map(|p| p.lo).collect();
        breakpoints.push(1.0);
        Ok(Self {
            repr: ContinuousRepr::PiecewiseUniform(built),
            breakpoints,
            mean: cum_m,
        })
    }

    /// Density interpolates linearly between strictly positive values at the
    /// knots; knots must run from 0 to 1 and the density must integrate to 1.
    pub fn piecewise_linear(knots: &[f64], values: &[f64]) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidInput(
                "need matching knot and value lists with at least two knots".into(),
            ));
        }
        if (knots[0] - 0.0).abs() > 1e-14 || (knots[knots.len() - 1] - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidInput("knots must run from 0 to 1".into()));
        }
        for w in knots.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidInput("knots must be strictly increasing".into()));
            }
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(
                "density values must be strictly positive".into(),
            ));
        }
        let mut built = Vec::with_capacity(knots.len() - 1);
        let (mut cum_f, mut cum_m) = (0.0f64, 0.0f64);
        for i in 0..knots.len() - 1 {
            let (lo, hi) = (knots[i], knots[i + 1]);
            let s = (values[i + 1] - values[i]) / (hi - lo);
            let c = values[i] - s * lo;
            built.push(LinearPiece {
                lo,
                c,
                s,
                cum_f,
                cum_m,
            });
            cum_f += c * (hi - lo) + s * (hi * hi - lo * lo) / 2.0;
            cum_m += c * (hi * hi - lo * lo) / 2.0 + s * (hi * hi * hi - lo * lo * lo) / 3.0;
        }
        if (cum_f - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "density integrates to {cum_f}, not 1"
            )));
        }
        Ok(Self {
            repr: ContinuousRepr::PiecewiseLinear(built),
            breakpoints: knots.to_vec(),
            mean: cum_m,
        })
    }

    /// Builds from `(alpha, beta, weight)` components.
    pub fn beta_mixture(components: &[(f64, f64, f64)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("no mixture components".into()));
        }
        let mut built = Vec::with_capacity(components.len());
        let mut total = 0.0f64;
        let mut mean = 0.0f64;
        for &(alpha, beta, weight) in components {
            if !(alpha > 0.0 && beta > 0.0 && weight > 0.0)
                || !alpha.is_finite()
                || !beta.is_finite()
                || !weight.is_finite()
            {
                return Err(Error::InvalidInput(
                    "beta parameters and weights must be strictly positive".into(),
                ));
            }
            let dist = Beta::new(alpha, beta)
                .map_err(|e| Error::InvalidInput(format!("beta({alpha}, {beta}): {e}")))?;
            total += weight;
            mean += weight * alpha / (alpha + beta);
            built.push(BetaComponent {
                alpha,
                beta,
                weight,
                dist,
            });
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            repr: ContinuousRepr::BetaMixture(built),
            breakpoints: vec![0.0, 1.0],
            mean,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Piece boundaries, including 0 and 1. Quadratures split here.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn density(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        match &self.repr {
            ContinuousRepr::PiecewiseUniform(pieces) => {
                pieces[self.piece_index(x)].density
            }
            ContinuousRepr::PiecewiseLinear(pieces) => {
                let p = &pieces[self.piece_index(x)];
                p.c + p.s * x
            }
            ContinuousRepr::BetaMixture(comps) => comps
                .iter()
                .map(|c| {
                    let b = statrs::function::beta::ln_beta(c.alpha, c.beta);
                    let ln = (c.alpha - 1.0) * x.ln() + (c.beta - 1.0) * (1.0 - x).ln() - b;
                    c.weight * ln.exp()
                })
                .sum(),
        }
    }

    fn piece_index(&self, x: f64) -> usize {
        let k = self
            .breakpoints
            .partition_point(|&b| b <= x)
            .saturating_sub(1);
        k.min(self.breakpoints.len() - 2)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match &self.repr {
            ContinuousRepr::PiecewiseUniform(pieces) => {
                let p = &pieces[self.piece_index(x)];
                p.cum_f + p.density * (x - p.lo)
            }
            ContinuousRepr::PiecewiseLinear(pieces) => {
                let p = &pieces[self.piece_index(x)];
                p.cum_f + p.c * (x - p.lo) + p.s * (x * x - p.lo * p.lo) / 2.0
            }
            ContinuousRepr::BetaMixture(comps) => {
                comps.iter().map(|c| c.weight * c.dist.cdf(x)).sum()
            }
        }
    }

    /// Lower partial mean `integral of t dF(t) over [0, x]`.
    pub fn partial_mean(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return self.mean;
        }
        match &self.repr {
            ContinuousRepr::PiecewiseUniform(pieces) => {
                let p = &pieces[self.piece_index(x)];
                p.cum_m + p.density * (x * x - p.lo * p.lo) / 2.0
            }
            ContinuousRepr::PiecewiseLinear(pieces) => {
                let p = &pieces[self.piece_index(x)];
                p.cum_m
                    + p.c * (x * x - p.lo * p.lo) / 2.0
                    + p.s * (x * x * x - p.lo * p.lo * p.lo) / 3.0
            }
            ContinuousRepr::BetaMixture(comps) => comps
                .iter()
                .map(|c| {
                    // t * f_{a,b}(t) integrates to mean * I_x(a+1, b)
                    let shifted = Beta::new(c.alpha + 1.0, c.beta).expect("valid shifted beta");
                    c.weight * (c.alpha / (c.alpha + c.beta)) * shifted.cdf(x)
                })
                .sum(),
        }
    }

    /// `E[t | t <= x]`, falling back to `x` when the region carries no mass.
    pub fn lower_mean(&self, x: f64) -> f64 {
        let mass = self.cdf(x);
        if mass <= MASS_TOL {
            return x.clamp(0.0, 1.0);
        }
        (self.partial_mean(x) / mass).clamp(0.0, x)
    }

    /// `E[t | t >= x]`, falling back to `x` when the region carries no mass.
    pub fn upper_mean(&self, x: f64) -> f64 {
        let mass = 1.0 - self.cdf(x);
        if mass <= MASS_TOL {
            return x.clamp(0.0, 1.0);
        }
        ((self.mean - self.partial_mean(x)) / mass).clamp(x, 1.0)
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        if let ContinuousRepr::PiecewiseUniform(pieces) = &self.repr {
            let i = pieces.partition_point(|pc| pc.cum_f <= p).saturating_sub(1);
            let pc = &pieces[i];
            return (pc.lo + (p - pc.cum_f) / pc.density).clamp(pc.lo, pc.hi);
        }
        bisect(|x| self.cdf(x) - p, 0.0, 1.0, 1e-14).unwrap_or(p)
    }

    /// `integral of v(t) dF(t)` over `[a, b]`, split at density kinks.
    ///
    /// Piecewise densities use adaptive Simpson per smooth piece. Beta
    /// mixtures expand the polynomial against component moments, which stays
    /// exact even when the density is unbounded at an endpoint.
    pub fn integrate_objective(&self, v: &ObjectiveFn, a: f64, b: f64, tol: f64) -> f64 {
        let a = a.max(0.0);
        let b = b.min(1.0);
        if a >= b {
            return 0.0;
        }
        match &self.repr {
            ContinuousRepr::BetaMixture(comps) => {
                let mut total = 0.0;
                for c in comps {
                    let mut ratio = 1.0f64;
                    for (k, &coef) in v.coeffs().iter().enumerate() {
                        if k > 0 {
                            let j = (k - 1) as f64;
                            ratio *= (c.alpha + j) / (c.alpha + c.beta + j);
                        }
                        if coef == 0.0 {
                            continue;
                        }
                        let shifted =
                            Beta::new(c.alpha + k as f64, c.beta).expect("valid shifted beta");
                        total += c.weight * coef * ratio * (shifted.cdf(b) - shifted.cdf(a));
                    }
                }
                total
            }
            _ => {
                let mut total = 0.0;
                let mut lo = a;
                for &bp in &self.breakpoints {
                    if bp <= lo {
                        continue;
                    }
                    let hi = bp.min(b);
                    if hi > lo {
                        let seg_tol = tol * ((hi - lo) / (b - a)).max(1e-3);
                        total +=
                            adaptive_simpson(|t| v.eval(t) * self.density(t), lo, hi, seg_tol);
                        lo = hi;
                    }
                    if lo >= b {
                        break;
                    }
                }
                total
            }
        }
    }
}

/// Prior over states: either representation.
#[derive(Debug, Clone)]
pub enum Prior {
    Discrete(DiscretePrior),
    Continuous(ContinuousPrior),
}

impl Prior {
    pub fn mean(&self) -> f64 {
        match self {
            Prior::Discrete(p) => p.mean(),
            Prior::Continuous(p) => p.mean(),
        }
    }

    /// `integral of F(t) dt` over `[0, x]`; equals `E[(x - omega)^+]`.
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        match self {
            Prior::Discrete(p) => p
                .support()
                .iter()
                .zip(p.probs())
                .map(|(&s, &f)| f * (x - s).max(0.0))
                .sum(),
            Prior::Continuous(p) => {
                if x <= 0.0 {
                    0.0
                } else {
                    let xc = x.min(1.0);
                    let tail = if x > 1.0 { x - 1.0 } else { 0.0 };
                    xc * p.cdf(xc) - p.partial_mean(xc) + tail
                }
            }
        }
    }
}

impl From<DiscretePrior> for Prior {
    fn from(p: DiscretePrior) -> Self {
        Prior::Discrete(p)
    }
}

impl From<ContinuousPrior> for Prior {
    fn from(p: ContinuousPrior) -> Self {
        Prior::Continuous(p)
    }
}

/// Conditional mean `E[omega | omega in [lo, hi]]`.
pub fn conditional_mean(prior: &Prior, lo: f64, hi: f64) -> Result<f64> {
    let (mass, weighted) = match prior {
        Prior::Discrete(p) => p
            .support()
            .iter()
            .zip(p.probs())
            .filter(|(&s, _)| lo <= s && s <= hi)
            .fold((0.0, 0.0), |(m, w), (&s, &f)| (m + f, w + f * s)),
        Prior::Continuous(p) => (
            p.cdf(hi) - p.cdf(lo),
            p.partial_mean(hi) - p.partial_mean(lo),
        ),
    };
    if mass < EMPTY_MASS_TOL {
        return Err(Error::EmptyInterval { lo, hi, mass });
    }
    Ok(weighted / mass)
}

/// Distribution over posterior means: atoms plus regions where the prior
/// passes through untouched.
#[derive(Debug, Clone)]
pub struct PosteriorDistribution {
    atoms: Vec<(f64, f64)>,
    pieces: Vec<(f64, f64)>,
    carrier: Option<ContinuousPrior>,
}

impl PosteriorDistribution {
    /// Purely atomic distribution; atoms are sorted and near-duplicates
    /// (within [`ATOM_MERGE_TOL`]) are merged mass-weightedly.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let merged = merge_atoms(atoms)?;
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "atom masses sum to {total}, not 1"
            )));
        }
        Ok(Self {
            atoms: merged,
            pieces: vec![],
            carrier: None,
        })
    }

    fn with_pieces(
        atoms: Vec<(f64, f64)>,
        pieces: Vec<(f64, f64)>,
        carrier: ContinuousPrior,
    ) -> Result<Self> {
        Ok(Self {
            atoms: merge_atoms(atoms)?,
            pieces,
            carrier: Some(carrier),
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Intervals on which the prior is revealed state-by-state.
    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|a| a.1).sum();
        let piece_mass: f64 = match &self.carrier {
            Some(f) => self
                .pieces
                .iter()
                .map(|&(a, b)| f.cdf(b) - f.cdf(a))
                .sum(),
            None => 0.0,
        };
        atom_mass + piece_mass
    }

    pub fn mean(&self) -> f64 {
        let atom_mean: f64 = self.atoms.iter().map(|&(m, p)| p * m).sum();
        let piece_mean: f64 = match &self.carrier {
            Some(f) => self
                .pieces
                .iter()
                .map(|&(a, b)| f.partial_mean(b) - f.partial_mean(a))
                .sum(),
            None => 0.0,
        };
        atom_mean + piece_mean
    }

    /// Expected payoff `E[V(m)]` under this distribution.
    pub fn value_under(&self, v: &ObjectiveFn) -> f64 {
        let atom_value: f64 = self.atoms.iter().map(|&(m, p)| p * v.eval(m)).sum();
        let piece_value: f64 = match &self.carrier {
            Some(f) => self
                .pieces
                .iter()
                .map(|&(a, b)| f.integrate_objective(v, a, b, 1e-10))
                .sum(),
            None => 0.0,
        };
        atom_value + piece_value
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let atom_part: f64 = self
            .atoms
            .iter()
            .filter(|&&(m, _)| m <= t)
            .map(|a| a.1)
            .sum();
        let piece_part: f64 = match &self.carrier {
            Some(f) => self
                .pieces
                .iter()
                .filter(|&&(a, _)| a < t)
                .map(|&(a, b)| f.cdf(t.min(b)) - f.cdf(a))
                .sum(),
            None => 0.0,
        };
        atom_part + piece_part
    }

    /// `integral of G(t) dt` over `[0, x]`, i.e. `E[(x - m)^+]`.
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        let atom_part: f64 = self
            .atoms
            .iter()
            .map(|&(m, p)| p * (x - m).max(0.0))
            .sum();
        let piece_part: f64 = match &self.carrier {
            Some(f) => self
                .pieces
                .iter()
                .map(|&(a, b)| {
                    if x <= a {
                        0.0
                    } else {
                        let t = x.min(b);
                        x * (f.cdf(t) - f.cdf(a)) - (f.partial_mean(t) - f.partial_mean(a))
                    }
                })
                .sum(),
            None => 0.0,
        };
        atom_part + piece_part
    }
}

fn merge_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    for &(m, p) in &atoms {
        if !m.is_finite() || !(0.0..=1.0).contains(&m) {
            return Err(Error::InvalidInput(format!("atom mean {m} outside [0, 1]")));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("atom mass {p} not positive")));
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (m, p) in atoms {
        match merged.last_mut() {
            Some((lm, lp)) if (m - *lm).abs() <= ATOM_MERGE_TOL => {
                let w = *lp + p;
                *lm = (*lm * *lp + m * p) / w;
                *lp = w;
            }
            _ => merged.push((m, p)),
        }
    }
    Ok(merged)
}

/// Distribution over posterior means induced by `signal` under `prior`.
///
/// Monotone partitions and stochastic upper censorship apply to discrete
/// priors; pooling sets apply to continuous priors. Anything else is a
/// malformed pairing.
pub fn induce_distribution(prior: &Prior, signal: &Signal) -> Result<PosteriorDistribution> {
    match (prior, signal) {
        (Prior::Discrete(f), Signal::Partition(p)) => {
            if p.n() != f.n() {
                return Err(Error::MalformedSignal(format!(
                    "partition of {} states applied to {}-state prior",
                    p.n(),
                    f.n()
                )));
            }
            let atoms = p
                .blocks()
                .iter()
                .map(|&(lo, hi)| (f.block_mean(lo, hi), f.block_mass(lo, hi)))
                .collect();
            PosteriorDistribution::from_atoms(atoms)
        }
        (Prior::Discrete(f), Signal::StochasticUc(s)) => {
            let j = f.index_of(s.cutoff_state, ATOM_MERGE_TOL).ok_or_else(|| {
                Error::MalformedSignal(format!(
                    "cutoff state {} is not in the support",
                    s.cutoff_state
                ))
            })?;
            let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(j + 2);
            for i in 0..j {
                atoms.push((f.support()[i], f.probs()[i]));
            }
            let sep = s.q * f.probs()[j];
            if sep > 0.0 {
                atoms.push((f.support()[j], sep));
            }
            let pooled_mass = (1.0 - s.q) * f.probs()[j] + f.tail_mass(j + 1);
            if pooled_mass > 0.0 {
                let pooled_mean = ((1.0 - s.q) * f.probs()[j] * f.support()[j]
                    + f.tail_weighted(j + 1))
                    / pooled_mass;
                atoms.push((pooled_mean, pooled_mass));
            }
            PosteriorDistribution::from_atoms(atoms)
        }
        (Prior::Continuous(f), Signal::Pooling(p)) => {
            let mut atoms = Vec::with_capacity(p.intervals().len());
            for &(a, b) in p.intervals() {
                let mass = f.cdf(b) - f.cdf(a);
                if mass > 0.0 {
                    atoms.push(((f.partial_mean(b) - f.partial_mean(a)) / mass, mass));
                }
            }
            let pieces = p
                .revealed_intervals()
                .into_iter()
                .filter(|&(a, b)| b - a > 0.0)
                .collect();
            PosteriorDistribution::with_pieces(atoms, pieces, f.clone())
        }
        _ => Err(Error::MalformedSignal(
            "signal kind does not match prior kind".into(),
        )),
    }
}

/// Outcome of a mean-preserving-contraction check at tolerance 1e-9.
#[derive(Debug, Clone, Copy)]
pub struct ContractionReport {
    pub ok: bool,
    /// `|E_G[m] - E_F[omega]|`.
    pub mean_gap: f64,
    /// Worst violation of `integral G <= integral F` over the grid.
    pub max_violation: f64,
    /// `|G total mass - 1|`.
    pub mass_gap: f64,
}

/// Checks that `g` is a mean-preserving contraction of `prior` by comparing
/// integrated CDFs on a uniform grid.
pub fn verify_contraction(
    g: &PosteriorDistribution,
    prior: &Prior,
    grid_points: usize,
) -> ContractionReport {
    let n = grid_points.max(2);
    let mean_gap = (g.mean() - prior.mean()).abs();
    let mass_gap = (g.total_mass() - 1.0).abs();
    let mut max_violation = 0.0f64;
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let excess = g.integrated_cdf(x) - prior.integrated_cdf(x);
        max_violation = max_violation.max(excess);
    }
    ContractionReport {
        ok: mean_gap <= CONTRACTION_TOL
            && max_violation <= CONTRACTION_TOL
            && mass_gap <= CONTRACTION_TOL,
        mean_gap,
        max_violation,
        mass_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{MonotonePartition, PoolingSet, StochasticUcSignal};
    use approx::assert_abs_diff_eq;

    fn three_state() -> DiscretePrior {
        DiscretePrior::new(vec![0.0, 0.5, 1.0], vec![0.2, 0.3, 0.5]).unwrap()
    }

    fn polarized() -> ContinuousPrior {
        ContinuousPrior::piecewise_uniform(&[
            (0.0, 0.1, 0.45),
            (0.1, 0.9, 0.10),
            (0.9, 1.0, 0.45),
        ])
        .unwrap()
    }

    #[test]
    fn discrete_validation() {
        assert!(DiscretePrior::new(vec![0.5, 0.5], vec![0.5, 0.5]).is_err());
        assert!(DiscretePrior::new(vec![0.2, 0.1], vec![0.5, 0.5]).is_err());
        assert!(DiscretePrior::new(vec![0.0, 1.0], vec![0.6, 0.6]).is_err());
        assert!(DiscretePrior::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(DiscretePrior::new(vec![0.0, 1.5], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn discrete_conditional_mean() {
        let p = Prior::Discrete(three_state());
        assert_abs_diff_eq!(conditional_mean(&p, 0.4, 1.0).unwrap(), 0.8125, epsilon = 1e-15);
        assert!(matches!(
            conditional_mean(&p, 0.1, 0.2),
            Err(Error::EmptyInterval { .. })
        ));
    }

    #[test]
    fn block_means_and_masses() {
        let p = three_state();
        assert_abs_diff_eq!(p.mean(), 0.65, epsilon = 1e-15);
        assert_abs_diff_eq!(p.block_mass(1, 2), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(p.block_mean(1, 2), 0.8125, epsilon = 1e-15);
    }

    #[test]
    fn piecewise_uniform_closed_forms() {
        let f = polarized();
        assert_abs_diff_eq!(f.mean(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.cdf(0.1), 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(f.cdf(0.5), 0.5, epsilon = 1e-15);
        let p = Prior::Continuous(f);
        // mass 0.45 sits uniformly on [0.9, 1]
        assert_abs_diff_eq!(conditional_mean(&p, 0.9, 1.0).unwrap(), 0.95, epsilon = 1e-14);
        assert_abs_diff_eq!(conditional_mean(&p, 0.0, 0.5).unwrap(), 0.075, epsilon = 1e-14);
    }

    #[test]
    fn piecewise_uniform_quantile_inverts_cdf() {
        let f = polarized();
        for p in [0.01, 0.3, 0.45, 0.5, 0.77, 0.99] {
            assert_abs_diff_eq!(f.cdf(f.quantile(p)), p, epsilon = 1e-13);
        }
    }

    #[test]
    fn piecewise_linear_matches_hand_integrals() {
        // density 0.5 + t integrates to 1 on [0, 1]
        let f = ContinuousPrior::piecewise_linear(&[0.0, 1.0], &[0.5, 1.5]).unwrap();
        assert_abs_diff_eq!(f.cdf(0.5), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(f.mean(), 0.5 / 2.0 + 1.0 / 3.0, epsilon = 1e-15);
        assert!(ContinuousPrior::piecewise_linear(&[0.0, 1.0], &[1.0, 1.5]).is_err());
    }

    #[test]
    fn beta_mixture_cdf_and_partial_mean() {
        let f = ContinuousPrior::beta_mixture(&[(1.0, 1.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(f.cdf(0.3), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(f.partial_mean(0.5), 0.125, epsilon = 1e-12);

        let g = ContinuousPrior::beta_mixture(&[(2.0, 2.0, 0.5), (1.0, 3.0, 0.5)]).unwrap();
        assert_abs_diff_eq!(g.mean(), 0.5 * 0.5 + 0.5 * 0.25, epsilon = 1e-12);
        // cross-check the incomplete-beta identity against direct quadrature
        for x in [0.2, 0.5, 0.8] {
            let quad = adaptive_simpson(|t| t * g.density(t), 1e-9, x, 1e-13);
            assert_abs_diff_eq!(g.partial_mean(x), quad, epsilon = 1e-8);
        }
    }

    #[test]
    fn beta_mixture_integrates_polynomials_exactly() {
        let g = ContinuousPrior::beta_mixture(&[(2.0, 3.0, 0.7), (4.0, 1.5, 0.3)]).unwrap();
        let v = ObjectiveFn::polynomial(&[0.25, -1.0, 3.0, -2.0]).unwrap();
        let quad = adaptive_simpson(|t| v.eval(t) * g.density(t), 0.0, 1.0, 1e-13);
        assert_abs_diff_eq!(g.integrate_objective(&v, 0.0, 1.0, 1e-10), quad, epsilon = 1e-10);
    }

    #[test]
    fn full_disclosure_value_is_exact_support_sum() {
        let f = three_state();
        let v = ObjectiveFn::polynomial(&[0.0, 0.0, 3.0, -2.0]).unwrap();
        let g = induce_distribution(
            &Prior::Discrete(f.clone()),
            &MonotonePartition::full_disclosure(3).into(),
        )
        .unwrap();
        let direct: f64 = f
            .support()
            .iter()
            .zip(f.probs())
            .map(|(&s, &p)| p * v.eval(s))
            .sum();
        assert_eq!(g.value_under(&v), direct);
    }

    #[test]
    fn partition_induces_block_mean_atoms() {
        let f = Prior::Discrete(three_state());
        let p = MonotonePartition::new(vec![(0, 0), (1, 2)], 3).unwrap();
        let g = induce_distribution(&f, &p.into()).unwrap();
        assert_eq!(g.atoms().len(), 2);
        assert_abs_diff_eq!(g.atoms()[0].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.atoms()[1].0, 0.8125, epsilon = 1e-15);
        assert_abs_diff_eq!(g.mean(), 0.65, epsilon = 1e-15);
    }

    #[test]
    fn stochastic_uc_preserves_the_mean() {
        // two equal-mass states at 0 and 1; cutoff 0 revealed w.p. 2/3
        let f = DiscretePrior::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let s = StochasticUcSignal::new(0.0, 2.0 / 3.0).unwrap();
        let g = induce_distribution(&Prior::Discrete(f), &s.into()).unwrap();
        assert_eq!(g.atoms().len(), 2);
        assert_abs_diff_eq!(g.atoms()[0].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.atoms()[0].1, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.atoms()[1].0, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(g.atoms()[1].1, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.mean(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn stochastic_uc_at_top_state_is_full_disclosure() {
        let f = DiscretePrior::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let s = StochasticUcSignal::new(1.0, 0.25).unwrap();
        let g = induce_distribution(&Prior::Discrete(f), &s.into()).unwrap();
        // the separated and pooled shares of the top state merge back together
        assert_eq!(g.atoms().len(), 2);
        assert_abs_diff_eq!(g.atoms()[1].0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.atoms()[1].1, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pooling_keeps_revealed_regions_continuous() {
        let f = ContinuousPrior::piecewise_uniform(&[(0.0, 1.0, 1.0)]).unwrap();
        let p = PoolingSet::new(vec![(0.0, 0.3)]).unwrap();
        let g = induce_distribution(&Prior::Continuous(f), &p.into()).unwrap();
        assert_eq!(g.atoms().len(), 1);
        assert_abs_diff_eq!(g.atoms()[0].0, 0.15, epsilon = 1e-14);
        assert_abs_diff_eq!(g.atoms()[0].1, 0.3, epsilon = 1e-14);
        assert_eq!(g.pieces(), &[(0.3, 1.0)]);
        assert_abs_diff_eq!(g.mean(), 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(g.total_mass(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn signal_prior_mismatch_is_malformed() {
        let f = Prior::Discrete(three_state());
        let p = PoolingSet::new(vec![(0.0, 0.5)]).unwrap();
        assert!(matches!(
            induce_distribution(&f, &p.into()),
            Err(Error::MalformedSignal(_))
        ));
        let c = Prior::Continuous(polarized());
        let mp = MonotonePartition::full_disclosure(3);
        assert!(matches!(
            induce_distribution(&c, &mp.into()),
            Err(Error::MalformedSignal(_))
        ));
    }

    #[test]
    fn contraction_accepts_induced_and_rejects_mean_shift() {
        let f = Prior::Discrete(three_state());
        let g = induce_distribution(&f, &MonotonePartition::no_disclosure(3).into()).unwrap();
        let report = verify_contraction(&g, &f, 1000);
        assert!(report.ok, "no disclosure must contract: {report:?}");

        let shifted = PosteriorDistribution::from_atoms(vec![(0.7, 1.0)]).unwrap();
        assert!(!verify_contraction(&shifted, &f, 1000).ok);

        // correct mean but a spread instead of a contraction
        let spread = PosteriorDistribution::from_atoms(vec![(0.0, 0.35), (1.0, 0.65)]).unwrap();
        assert!(!verify_contraction(&spread, &f, 1000).ok);
    }

    #[test]
    fn integrated_cdf_matches_expectation_identity() {
        let f = Prior::Continuous(polarized());
        let g = induce_distribution(
            &f,
            &PoolingSet::new(vec![(0.0, 0.5), (0.5, 1.0)]).unwrap().into(),
        )
        .unwrap();
        assert_abs_diff_eq!(g.integrated_cdf(1.0), 1.0 - g.mean(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.integrated_cdf(1.0), 1.0 - f.mean(), epsilon = 1e-12);
    }
}
