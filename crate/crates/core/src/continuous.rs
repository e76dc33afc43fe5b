//! Optimal signals for continuous priors and m-shaped payoffs.
//!
//! For an m-shaped `V` (concave, then convex, then concave), the optimal
//! monotone signal takes one of three forms, tried in order:
//!
//! 1. interval disclosure: pool `[0, a]` and `[b, 1]`, reveal the middle,
//!    with both cutoffs pinned by tangency conditions;
//! 2. a cutoff rule: pool `[0, c]` and `[c, 1]`, the cutoff pinned by the
//!    two pools' tangent lines meeting at `c`, accepted only if it beats
//!    revealing nothing;
//! 3. no disclosure.
//!
//! Unrestricted signals can do strictly better when the bitangent to `V`
//! admits a mean-preserving split of the prior onto its two touch points
//! (two-atom "bipooling", in a deterministic nonmonotone form and a
//! stochastic monotone form). This module solves both.

use crate::error::{Error, Result};
use crate::numeric::{bisect, scan_roots};
use crate::objective::{classify_shape, concavify_at, solve_bitangent, Bitangent, ObjectiveFn, ShapeKind, ShapeReport};
use crate::prior::{ContinuousPrior, PosteriorDistribution};
use crate::signal::PoolingSet;

/// Grid intervals for tangency-residual sign scans.
const SCAN_POINTS: usize = 400;
/// Bracket width for root refinement.
const ROOT_WIDTH: f64 = 1e-12;
/// Cutoff pairs closer than this collapse to a cutoff rule.
const DEGENERATE_TOL: f64 = 1e-10;
const SHAPE_GRID: usize = 1001;
const SHAPE_TOL: f64 = 1e-12;
/// Quadrature target for payoff integrals over revealed regions.
const REVEAL_TOL: f64 = 1e-10;
/// Relative slack under which two candidate values count as tied.
const VALUE_TIE_TOL: f64 = 1e-12;
/// A pooled tail must carry at least this much mass to be a real pool.
const POOL_MASS_TOL: f64 = 1e-10;

/// Which form the monotone optimum took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Interval,
    Cutoff,
    NoDisclosure,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Interval => "interval",
            Branch::Cutoff => "cutoff",
            Branch::NoDisclosure => "none",
        }
    }
}

/// A monotone solution: pool `[0, omega_l_star]` to `m_l_star`, pool
/// `[omega_r_star, 1]` to `m_r_star`, reveal everything between.
///
/// A cutoff rule has `omega_l_star == omega_r_star`; no disclosure is
/// encoded as the pair `(0, 1)` with both pooled means at the prior mean,
/// read as pooling everything.
#[derive(Debug, Clone, Copy)]
pub struct IntervalDisclosure {
    pub branch: Branch,
    pub omega_l_star: f64,
    pub omega_r_star: f64,
    pub m_l_star: f64,
    pub m_r_star: f64,
    pub value: f64,
}

fn tangent_line(v: &ObjectiveFn, m: f64, x: f64) -> f64 {
    v.eval(m) + v.deriv1(m) * (x - m)
}

/// Expected payoff of pooling each interval of `pools` to its conditional
/// mean while revealing the complement.
pub fn pooling_value(prior: &ContinuousPrior, v: &ObjectiveFn, pools: &PoolingSet) -> f64 {
    let mut total = 0.0;
    for &(a, b) in pools.intervals() {
        let mass = prior.cdf(b) - prior.cdf(a);
        if mass > 1e-14 {
            let mean = (prior.partial_mean(b) - prior.partial_mean(a)) / mass;
            total += mass * v.eval(mean);
        }
    }
    for (a, b) in pools.revealed_intervals() {
        total += prior.integrate_objective(v, a, b, REVEAL_TOL);
    }
    total
}

fn require_m_shaped(shape: &ShapeReport) -> Result<(f64, f64)> {
    if shape.kind != ShapeKind::MShaped {
        return Err(Error::ShapeError {
            expected: "m_shaped",
            found: shape.kind.as_str().to_string(),
        });
    }
    Ok((shape.inflections[0], shape.inflections[1]))
}

/// Tangency residual pinning the left pooling cutoff: the tangent to `V`
/// at the pooled mean of `[0, w]` must pass through `(w, V(w))`.
fn left_residual(prior: &ContinuousPrior, v: &ObjectiveFn, w: f64) -> f64 {
    tangent_line(v, prior.lower_mean(w), w) - v.eval(w)
}

/// Mirror-image residual for the right pooling cutoff.
fn right_residual(prior: &ContinuousPrior, v: &ObjectiveFn, w: f64) -> f64 {
    tangent_line(v, prior.upper_mean(w), w) - v.eval(w)
}

/// Solves the two decoupled tangency conditions for interval disclosure.
///
/// Each condition is scanned for sign changes over the convex region and
/// refined by bisection. With several roots on a side, the value-maximal
/// admissible pair wins; exact value ties (symmetric instances) go to the
/// lexicographically smallest pair so reruns and affine shifts agree.
/// Returns `None` when no pair with `omega_l_star < omega_r_star` exists.
pub fn solve_interval_disclosure(
    prior: &ContinuousPrior,
    v: &ObjectiveFn,
    shape: &ShapeReport,
) -> Result<Option<IntervalDisclosure>> {
    let (lo, hi) = require_m_shaped(shape)?;
    let inset = 1e-9 * (hi - lo);
    let left_roots = scan_roots(
        |w| left_residual(prior, v, w),
        lo + inset,
        hi - inset,
        SCAN_POINTS,
        ROOT_WIDTH,
    );
    let right_roots = scan_roots(
        |w| right_residual(prior, v, w),
        lo + inset,
        hi - inset,
        SCAN_POINTS,
        ROOT_WIDTH,
    );

    // a tangency root on a side whose pool carries no mass is an artifact of
    // the conditional-mean fallback, not a signal
    let mut best: Option<IntervalDisclosure> = None;
    for &a in &left_roots {
        if prior.cdf(a) <= POOL_MASS_TOL {
            continue;
        }
        for &b in &right_roots {
            if a >= b || 1.0 - prior.cdf(b) <= POOL_MASS_TOL {
                continue;
            }
            let pools = PoolingSet::new(vec![(0.0, a), (b, 1.0)])?;
            let value = pooling_value(prior, v, &pools);
            if best.map_or(true, |s| beats(value, s.value)) {
                best = Some(IntervalDisclosure {
                    branch: Branch::Interval,
                    omega_l_star: a,
                    omega_r_star: b,
                    m_l_star: prior.lower_mean(a),
                    m_r_star: prior.upper_mean(b),
                    value,
                });
            }
        }
    }
    Ok(best)
}

/// Candidates are scored in ascending cutoff order; a later candidate must
/// beat the incumbent by more than the tie tolerance to replace it, so exact
/// ties resolve to the smallest cutoff deterministically.
fn beats(value: f64, incumbent: f64) -> bool {
    value > incumbent + VALUE_TIE_TOL * (1.0 + incumbent.abs())
}

/// Solves the cutoff-rule condition: the tangent lines at the two pooled
/// means meet at the cutoff itself.
///
/// Every grid-bracketed root is refined and scored; the best cutoff is
/// returned only if its value strictly beats revealing nothing. A symmetric
/// prior under an even payoff yields mirror-image optima with equal values;
/// the smaller cutoff is reported.
pub fn solve_cutoff_rule(
    prior: &ContinuousPrior,
    v: &ObjectiveFn,
    shape: &ShapeReport,
) -> Result<Option<IntervalDisclosure>> {
    require_m_shaped(shape)?;
    let delta = |w: f64| {
        tangent_line(v, prior.lower_mean(w), w) - tangent_line(v, prior.upper_mean(w), w)
    };
    let roots = scan_roots(delta, 1e-6, 1.0 - 1e-6, SCAN_POINTS, ROOT_WIDTH);

    let mut best: Option<IntervalDisclosure> = None;
    for &w in &roots {
        let mass = prior.cdf(w);
        let (m_l, m_r) = (prior.lower_mean(w), prior.upper_mean(w));
        let value = mass * v.eval(m_l) + (1.0 - mass) * v.eval(m_r);
        if best.map_or(true, |s| beats(value, s.value)) {
            best = Some(IntervalDisclosure {
                branch: Branch::Cutoff,
                omega_l_star: w,
                omega_r_star: w,
                m_l_star: m_l,
                m_r_star: m_r,
                value,
            });
        }
    }
    Ok(best.filter(|s| s.value > v.eval(prior.mean())))
}

/// No disclosure encoded in the same shape as the other branches.
fn no_disclosure(prior: &ContinuousPrior, v: &ObjectiveFn) -> IntervalDisclosure {
    let mean = prior.mean();
    IntervalDisclosure {
        branch: Branch::NoDisclosure,
        omega_l_star: 0.0,
        omega_r_star: 1.0,
        m_l_star: mean,
        m_r_star: mean,
        value: v.eval(mean),
    }
}

/// Optimal monotone signal for an m-shaped payoff: interval disclosure if
/// its tangency conditions admit an interior pair, else the best cutoff
/// rule if one beats no disclosure, else no disclosure.
pub fn solve_monotone_continuous(
    prior: &ContinuousPrior,
    v: &ObjectiveFn,
) -> Result<IntervalDisclosure> {
    let shape = classify_shape(v, SHAPE_GRID, SHAPE_TOL)?;
    require_m_shaped(&shape)?;
    if let Some(sol) = solve_interval_disclosure(prior, v, &shape)? {
        // a pair collapsing to a point is really a cutoff rule
        if sol.omega_r_star - sol.omega_l_star > DEGENERATE_TOL {
            return Ok(sol);
        }
        let w = 0.5 * (sol.omega_l_star + sol.omega_r_star);
        let mass = prior.cdf(w);
        let (m_l, m_r) = (prior.lower_mean(w), prior.upper_mean(w));
        return Ok(IntervalDisclosure {
            branch: Branch::Cutoff,
            omega_l_star: w,
            omega_r_star: w,
            m_l_star: m_l,
            m_r_star: m_r,
            value: mass * v.eval(m_l) + (1.0 - mass) * v.eval(m_r),
        });
    }
    if let Some(sol) = solve_cutoff_rule(prior, v, &shape)? {
        return Ok(sol);
    }
    Ok(no_disclosure(prior, v))
}

/// Whether a two-atom split onto the bitangent touch points is feasible
/// for this prior, with the quantities that witness it.
///
/// Feasibility needs the touch points to straddle the prior mean and the
/// prior to put enough mass high: with `omega_2star` the state below which
/// the conditional mean is `m_l`, the upper conditional mean must strictly
/// exceed `m_r`.
#[derive(Debug, Clone)]
pub struct BipoolingCertificate {
    pub holds: bool,
    pub bitangent: Option<Bitangent>,
    /// State with `E[w | w <= omega_2star] = m_l`.
    pub omega_2star: Option<f64>,
    /// `E[w | w >= omega_2star] - m_r`; positive when the split is feasible.
    pub excess: Option<f64>,
    pub reason: Option<String>,
}

impl BipoolingCertificate {
    fn fail(self, reason: String) -> Self {
        Self {
            holds: false,
            reason: Some(reason),
            ..self
        }
    }
}

/// Checks two-atom feasibility for `prior` against the bitangent of `v`.
pub fn check_bipooling_condition(prior: &ContinuousPrior, v: &ObjectiveFn) -> BipoolingCertificate {
    let mut cert = BipoolingCertificate {
        holds: false,
        bitangent: None,
        omega_2star: None,
        excess: None,
        reason: None,
    };
    let shape = match classify_shape(v, SHAPE_GRID, SHAPE_TOL) {
        Ok(s) => s,
        Err(e) => return cert.fail(e.to_string()),
    };
    let bt = match solve_bitangent(v, &shape) {
        Ok(b) => b,
        Err(e) => return cert.fail(e.to_string()),
    };
    cert.bitangent = Some(bt);
    let mean = prior.mean();
    if !(0.0 < bt.m_l && bt.m_l < mean && mean < bt.m_r && bt.m_r < 1.0) {
        return cert.fail(format!(
            "bitangent means {:.6} and {:.6} do not straddle the prior mean {mean:.6} inside (0, 1)",
            bt.m_l, bt.m_r
        ));
    }
    // the lower conditional mean rises from below m_l at 0.5*m_l to the
    // prior mean at 1, so the bracket is guaranteed
    let omega_2star = match bisect(
        |w| prior.lower_mean(w) - bt.m_l,
        0.5 * bt.m_l,
        1.0,
        1e-13,
    ) {
        Some(w) => w,
        None => {
            return cert.fail("no state splits the prior at the lower bitangent mean".into());
        }
    };
    cert.omega_2star = Some(omega_2star);
    if !(bt.m_l < omega_2star && omega_2star < 1.0) {
        return cert.fail(format!(
            "split state {omega_2star:.6} is not interior above the lower bitangent mean"
        ));
    }
    if 1.0 - prior.cdf(omega_2star) <= 1e-12 {
        return cert.fail("no prior mass above the split state".into());
    }
    let excess = prior.upper_mean(omega_2star) - bt.m_r;
    cert.excess = Some(excess);
    if excess <= 0.0 {
        return cert.fail(format!(
            "upper conditional mean falls short of the upper bitangent mean by {:.6}",
            -excess
        ));
    }
    cert.holds = true;
    cert
}

/// How to realize a two-atom bipooling signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipoolingMode {
    /// Pool a middle interval to the low atom and the (disconnected) outer
    /// set to the high atom.
    DeterministicNonmonotone,
    /// Reveal "high" above a cutoff; below it, randomize between the two
    /// atom labels.
    StochasticMonotone,
}

impl BipoolingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BipoolingMode::DeterministicNonmonotone => "deterministic_nonmonotone",
            BipoolingMode::StochasticMonotone => "stochastic_monotone",
        }
    }
}

/// Parameters of a constructed bipooling signal.
#[derive(Debug, Clone, Copy)]
pub enum BipoolingForm {
    Deterministic {
        /// Middle pooling interval mapped to the low atom.
        omega_l_2star: f64,
        omega_r_2star: f64,
    },
    Stochastic {
        /// States below report the low atom with probability `q_2star`.
        omega_2star: f64,
        q_2star: f64,
    },
}

/// A two-atom signal achieving the concavified payoff at the prior mean.
#[derive(Debug, Clone)]
pub struct BipoolingSignal {
    pub mode: BipoolingMode,
    pub form: BipoolingForm,
    pub induced: PosteriorDistribution,
    pub value: f64,
}

/// Builds a bipooling signal for a prior certified by
/// [`check_bipooling_condition`].
pub fn construct_bipooling(
    prior: &ContinuousPrior,
    v: &ObjectiveFn,
    cert: &BipoolingCertificate,
    mode: BipoolingMode,
) -> Result<BipoolingSignal> {
    if !cert.holds {
        return Err(Error::CertificateRequired(
            cert.reason
                .clone()
                .unwrap_or_else(|| "bipooling certificate does not hold".into()),
        ));
    }
    let bt = cert.bitangent.expect("holding certificate has a bitangent");
    let omega_2star = cert.omega_2star.expect("holding certificate has a split");
    let mean = prior.mean();
    let p = (bt.m_r - mean) / (bt.m_r - bt.m_l);

    let (form, atoms) = match mode {
        BipoolingMode::DeterministicNonmonotone => {
            // middle window [a, b] of mass p whose conditional mean is m_l;
            // sliding the window right raises its mean, and the certificate
            // puts the target between the bracket endpoints' means
            let window_gap = |a: f64| {
                let b = prior.quantile(prior.cdf(a) + p);
                let mass = prior.cdf(b) - prior.cdf(a);
                (prior.partial_mean(b) - prior.partial_mean(a)) / mass - bt.m_l
            };
            let hi = prior.quantile(1.0 - p);
            let a = bisect(window_gap, 0.0, hi, 1e-13).ok_or_else(|| {
                Error::InvalidInput("no middle window matches the low bitangent mean".into())
            })?;
            let b = prior.quantile(prior.cdf(a) + p);
            let mid_mass = prior.cdf(b) - prior.cdf(a);
            let mid_weighted = prior.partial_mean(b) - prior.partial_mean(a);
            let mid_mean = mid_weighted / mid_mass;
            let outer_mass = 1.0 - mid_mass;
            let outer_mean = (mean - mid_weighted) / outer_mass;
            (
                BipoolingForm::Deterministic {
                    omega_l_2star: a,
                    omega_r_2star: b,
                },
                vec![(mid_mean, mid_mass), (outer_mean, outer_mass)],
            )
        }
        BipoolingMode::StochasticMonotone => {
            let below_mass = prior.cdf(omega_2star);
            let q = p / below_mass;
            let low_mean = prior.lower_mean(omega_2star);
            // the high atom pools the whole upper tail plus the non-separated
            // share of the lower region
            let high_mean = (mean - q * prior.partial_mean(omega_2star)) / (1.0 - p);
            (
                BipoolingForm::Stochastic {
                    omega_2star,
                    q_2star: q,
                },
                vec![(low_mean, p), (high_mean, 1.0 - p)],
            )
        }
    };

    let value = atoms.iter().map(|&(m, mass)| mass * v.eval(m)).sum();
    let induced = PosteriorDistribution::from_atoms(atoms)?;
    Ok(BipoolingSignal {
        mode,
        form,
        induced,
        value,
    })
}

/// Best achievable value with no monotonicity restriction.
#[derive(Debug, Clone)]
pub struct UnrestrictedSolution {
    pub value: f64,
    pub certificate: BipoolingCertificate,
    /// Present when bipooling is infeasible and the monotone optimum is
    /// already unrestricted-optimal.
    pub monotone: Option<IntervalDisclosure>,
}

impl UnrestrictedSolution {
    pub fn kind(&self) -> &'static str {
        if self.monotone.is_none() {
            "bipooling"
        } else {
            "monotone"
        }
    }
}

/// Computes the unrestricted optimum: the concavified payoff at the prior
/// mean when bipooling is feasible, otherwise the monotone optimum.
pub fn unrestricted_value(prior: &ContinuousPrior, v: &ObjectiveFn) -> Result<UnrestrictedSolution> {
    let shape = classify_shape(v, SHAPE_GRID, SHAPE_TOL)?;
    require_m_shaped(&shape)?;
    let certificate = check_bipooling_condition(prior, v);
    if certificate.holds {
        let bt = certificate.bitangent.expect("holding certificate");
        return Ok(UnrestrictedSolution {
            value: concavify_at(v, &bt, prior.mean()),
            certificate,
            monotone: None,
        });
    }
    let monotone = solve_monotone_continuous(prior, v)?;
    Ok(UnrestrictedSolution {
        value: monotone.value,
        certificate,
        monotone: Some(monotone),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::verify_contraction;
    use crate::prior::Prior;
    use approx::assert_abs_diff_eq;

    /// Quartic with convex region (0.3, 0.7), even about 0.5.
    fn even_quartic() -> ObjectiveFn {
        ObjectiveFn::m_family(0.3, 0.7)
            .unwrap()
            .with_affine(13.0 / 600.0, 0.0)
    }

    fn uniform() -> ContinuousPrior {
        ContinuousPrior::piecewise_uniform(&[(0.0, 1.0, 1.0)]).unwrap()
    }

    fn polarized() -> ContinuousPrior {
        ContinuousPrior::piecewise_uniform(&[
            (0.0, 0.1, 0.45),
            (0.1, 0.9, 0.10),
            (0.9, 1.0, 0.45),
        ])
        .unwrap()
    }

    fn ultra_polarized() -> ContinuousPrior {
        ContinuousPrior::piecewise_uniform(&[
            (0.0, 0.01, 0.495),
            (0.01, 0.99, 0.01),
            (0.99, 1.0, 0.495),
        ])
        .unwrap()
    }

    fn shape_of(v: &ObjectiveFn) -> ShapeReport {
        classify_shape(v, 1001, 1e-12).unwrap()
    }

    #[test]
    fn quartic_benchmark_values() {
        let v = even_quartic();
        assert_abs_diff_eq!(v.eval(0.5), 0.0002083333333, epsilon = 1e-12);
        assert_abs_diff_eq!(v.eval(0.075), 0.0011020507812, epsilon = 1e-12);
        assert_abs_diff_eq!(v.eval(0.25), 0.0011328125, epsilon = 1e-12);
    }

    #[test]
    fn pooling_value_trivial_cases() {
        let f = uniform();
        let v = even_quartic();
        let all = PoolingSet::new(vec![(0.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(pooling_value(&f, &v, &all), v.eval(0.5), epsilon = 1e-12);
        let none = PoolingSet::new(vec![]).unwrap();
        let full = f.integrate_objective(&v, 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(pooling_value(&f, &v, &none), full, epsilon = 1e-10);
    }

    #[test]
    fn pooling_value_split_halves() {
        let f = uniform();
        let v = even_quartic();
        let halves = PoolingSet::new(vec![(0.0, 0.5), (0.5, 1.0)]).unwrap();
        // both halves pool to means where V is equal by symmetry
        assert_abs_diff_eq!(
            pooling_value(&f, &v, &halves),
            0.0011328125,
            epsilon = 1e-12
        );
    }

    #[test]
    fn uniform_quartic_gets_interval_disclosure() {
        let f = uniform();
        let v = even_quartic();
        let sol = solve_monotone_continuous(&f, &v).unwrap();
        assert_eq!(sol.branch, Branch::Interval);
        // even instance: cutoffs mirror around 0.5
        assert_abs_diff_eq!(sol.omega_r_star, 1.0 - sol.omega_l_star, epsilon = 1e-9);
        assert!(0.3 < sol.omega_l_star && sol.omega_l_star < 0.5);
        // pooled means sit strictly inside the outer concave regions
        assert!(0.0 < sol.m_l_star && sol.m_l_star < 0.3);
        assert!(0.7 < sol.m_r_star && sol.m_r_star < 1.0);
        // tangency residuals
        assert!(left_residual(&f, &v, sol.omega_l_star).abs() < 1e-8);
        assert!(right_residual(&f, &v, sol.omega_r_star).abs() < 1e-8);
        // beats both trivial signals
        assert!(sol.value > v.eval(0.5));
        assert!(sol.value > f.integrate_objective(&v, 0.0, 1.0, 1e-12));
    }

    #[test]
    fn polarized_quartic_gets_cutoff_rule() {
        let f = polarized();
        let v = even_quartic();
        let shape = shape_of(&v);
        assert!(solve_interval_disclosure(&f, &v, &shape).unwrap().is_none());
        let sol = solve_monotone_continuous(&f, &v).unwrap();
        assert_eq!(sol.branch, Branch::Cutoff);
        // mirror-symmetric optima at 0.0965 and 0.9035; ties go to the
        // smaller cutoff
        assert_abs_diff_eq!(sol.omega_l_star, 0.096504312856, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.omega_r_star, sol.omega_l_star, epsilon = 0.0);
        assert_abs_diff_eq!(sol.m_l_star, 0.048252156428, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.m_r_star, 0.846773307382, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.value, 1.152516967714e-3, epsilon = 1e-12);
        let w = 1.0 - sol.omega_l_star;
        let mirror = PoolingSet::new(vec![(0.0, w), (w, 1.0)]).unwrap();
        assert_abs_diff_eq!(pooling_value(&f, &v, &mirror), sol.value, epsilon = 1e-12);
        // the symmetric stationary cutoff is a local minimum of the cutoff
        // value curve and loses to both edge optima
        let symmetric = PoolingSet::new(vec![(0.0, 0.5), (0.5, 1.0)]).unwrap();
        assert_abs_diff_eq!(
            pooling_value(&f, &v, &symmetric),
            1.10205078125e-3,
            epsilon = 1e-12
        );
        assert!(sol.value > 1.10205078125e-3 + 5e-5);
        assert!(sol.value > v.eval(f.mean()));
    }

    #[test]
    fn ultra_polarized_quartic_prefers_edge_cutoff() {
        let f = ultra_polarized();
        let v = even_quartic();
        let sol = solve_monotone_continuous(&f, &v).unwrap();
        assert_eq!(sol.branch, Branch::Cutoff);
        assert_abs_diff_eq!(sol.omega_l_star, 0.008010903040, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.m_l_star, 0.004005451520, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.m_r_star, 0.825922898065, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.value, 8.740818732954e-4, epsilon = 1e-12);
        // pooled means land in the outer concave regions
        assert!(0.0 < sol.m_l_star && sol.m_l_star < 0.3);
        assert!(0.7 < sol.m_r_star && sol.m_r_star < 1.0);
        // the symmetric cutoff is dominated even by revealing nothing here;
        // only the edge cutoffs beat the prior mean
        let symmetric = PoolingSet::new(vec![(0.0, 0.5), (0.5, 1.0)]).unwrap();
        let w_half = pooling_value(&f, &v, &symmetric);
        assert_abs_diff_eq!(w_half, 1.566637988281e-4, epsilon = 1e-12);
        assert!(w_half < v.eval(0.5));
        assert!(sol.value > v.eval(0.5));
    }

    #[test]
    fn s_shaped_objective_is_rejected() {
        let f = uniform();
        let v = ObjectiveFn::polynomial(&[0.0, 0.0, 3.0, -2.0]).unwrap();
        assert!(matches!(
            solve_monotone_continuous(&f, &v),
            Err(Error::ShapeError { .. })
        ));
    }

    #[test]
    fn cutoff_rule_cutoffs_are_affine_invariant() {
        let f = polarized();
        let v = even_quartic();
        let shifted = even_quartic().with_affine(2.0, -1.0);
        let a = solve_monotone_continuous(&f, &v).unwrap();
        let b = solve_monotone_continuous(&f, &shifted).unwrap();
        assert_eq!(a.branch, b.branch);
        assert_abs_diff_eq!(a.omega_l_star, b.omega_l_star, epsilon = 1e-9);
        // values shift by a*mean + b
        assert_abs_diff_eq!(b.value, a.value + 2.0 * f.mean() - 1.0, epsilon = 1e-9);
    }

    #[test]
    fn polarized_certificate_holds_with_expected_witnesses() {
        let f = polarized();
        let v = even_quartic();
        let cert = check_bipooling_condition(&f, &v);
        assert!(cert.holds, "reason: {:?}", cert.reason);
        let bt = cert.bitangent.unwrap();
        let m_l = (1.0 - 0.48f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(bt.m_l, m_l, epsilon = 1e-9);
        assert_abs_diff_eq!(bt.m_r, 1.0 - m_l, epsilon = 1e-9);
        let w = cert.omega_2star.unwrap();
        assert_abs_diff_eq!(w, 0.9035566, epsilon = 1e-6);
        // split consistency: lower conditional mean hits m_l exactly
        assert_abs_diff_eq!(f.lower_mean(w), bt.m_l, epsilon = 1e-10);
        assert_abs_diff_eq!(cert.excess.unwrap(), 0.1053680, epsilon = 1e-6);
    }

    #[test]
    fn uniform_certificate_fails_on_the_tail_mean() {
        let f = uniform();
        let v = even_quartic();
        let cert = check_bipooling_condition(&f, &v);
        assert!(!cert.holds);
        // bitangent still reported for diagnostics
        let bt = cert.bitangent.unwrap();
        // split state is twice the lower mean under a uniform prior
        let w = cert.omega_2star.unwrap();
        assert_abs_diff_eq!(w, 2.0 * bt.m_l, epsilon = 1e-9);
        assert!(cert.excess.unwrap() < 0.0);
        assert!(cert.reason.is_some());
    }

    #[test]
    fn s_shaped_objective_yields_no_certificate() {
        let f = uniform();
        let v = ObjectiveFn::polynomial(&[0.0, 0.0, 3.0, -2.0]).unwrap();
        let cert = check_bipooling_condition(&f, &v);
        assert!(!cert.holds);
        assert!(cert.bitangent.is_none());
    }

    #[test]
    fn construction_requires_a_holding_certificate() {
        let f = uniform();
        let v = even_quartic();
        let cert = check_bipooling_condition(&f, &v);
        assert!(matches!(
            construct_bipooling(&f, &v, &cert, BipoolingMode::DeterministicNonmonotone),
            Err(Error::CertificateRequired(_))
        ));
    }

    #[test]
    fn deterministic_bipooling_matches_hand_solution() {
        let f = polarized();
        let v = even_quartic();
        let cert = check_bipooling_condition(&f, &v);
        let sig =
            construct_bipooling(&f, &v, &cert, BipoolingMode::DeterministicNonmonotone).unwrap();
        let BipoolingForm::Deterministic {
            omega_l_2star: a,
            omega_r_2star: b,
        } = sig.form
        else {
            panic!("wrong form")
        };
        assert_abs_diff_eq!(a, 0.0122543, epsilon = 1e-6);
        assert_abs_diff_eq!(b, 0.9011432, epsilon = 1e-6);
        let bt = cert.bitangent.unwrap();
        let atoms = sig.induced.atoms();
        assert_eq!(atoms.len(), 2);
        assert_abs_diff_eq!(atoms[0].0, bt.m_l, epsilon = 1e-8);
        assert_abs_diff_eq!(atoms[1].0, bt.m_r, epsilon = 1e-8);
        assert_abs_diff_eq!(atoms[0].1, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(atoms[1].1, 0.5, epsilon = 1e-9);
        // value reaches the concavified payoff at the prior mean
        assert_abs_diff_eq!(sig.value, concavify_at(&v, &bt, 0.5), epsilon = 1e-10);
        assert_abs_diff_eq!(sig.value, 0.0014083, epsilon = 1e-6);
        // nonmonotone witness: the interior window maps strictly lower
        assert!(0.0 < a && a < b && b < 1.0);
        assert!(atoms[0].0 < atoms[1].0);
        let report = verify_contraction(&sig.induced, &Prior::from(f), 1000);
        assert!(report.ok, "contraction violated: {report:?}");
    }

    #[test]
    fn stochastic_bipooling_matches_hand_solution() {
        let f = polarized();
        let v = even_quartic();
        let cert = check_bipooling_condition(&f, &v);
        let sig = construct_bipooling(&f, &v, &cert, BipoolingMode::StochasticMonotone).unwrap();
        let BipoolingForm::Stochastic { omega_2star, q_2star } = sig.form else {
            panic!("wrong form")
        };
        assert_abs_diff_eq!(omega_2star, 0.9035566, epsilon = 1e-6);
        assert_abs_diff_eq!(q_2star, 0.8833852, epsilon = 1e-6);
        // monotone-in-distribution witness: high states get the high atom
        // for sure, low states a nondegenerate mixture
        assert!(0.0 < q_2star && q_2star < 1.0);
        let det =
            construct_bipooling(&f, &v, &cert, BipoolingMode::DeterministicNonmonotone).unwrap();
        assert_abs_diff_eq!(sig.value, det.value, epsilon = 1e-10);
        for (a, b) in sig.induced.atoms().iter().zip(det.induced.atoms()) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-8);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-8);
        }
        let report = verify_contraction(&sig.induced, &Prior::from(f), 1000);
        assert!(report.ok, "contraction violated: {report:?}");
    }

    #[test]
    fn unrestricted_beats_monotone_exactly_when_certified() {
        let v = even_quartic();

        let f = polarized();
        let unrestricted = unrestricted_value(&f, &v).unwrap();
        assert_eq!(unrestricted.kind(), "bipooling");
        assert_abs_diff_eq!(unrestricted.value, 0.0014083, epsilon = 1e-6);
        let monotone = solve_monotone_continuous(&f, &v).unwrap();
        assert!(unrestricted.value > monotone.value + 1e-9);

        let f = uniform();
        let unrestricted = unrestricted_value(&f, &v).unwrap();
        assert_eq!(unrestricted.kind(), "monotone");
        let monotone = solve_monotone_continuous(&f, &v).unwrap();
        assert_abs_diff_eq!(unrestricted.value, monotone.value, epsilon = 1e-12);
    }
}
