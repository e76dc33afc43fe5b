//! Sender payoff as a function of the posterior mean.
//!
//! Everything downstream keys on the curvature of the payoff `V` on `[0, 1]`:
//! s-shaped payoffs (convex then concave) drive the discrete upper-censorship
//! solver, m-shaped payoffs (concave, convex, concave) drive the continuous
//! interval-disclosure solver and the bitangent constructions.

use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Polynomial payoff of the posterior mean, with cached derivative
/// coefficients. All supported constructions (raw coefficients, the
/// canonical curvature families, affine addends) stay inside this class,
/// which keeps evaluation exact and derivatives consistent by construction.
#[derive(Debug, Clone)]
pub struct ObjectiveFn {
    coeffs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    label: String,
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

impl ObjectiveFn {
    /// Builds a payoff from polynomial coefficients, lowest degree first.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty coefficient list".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self::from_coeffs(
            coeffs.to_vec(),
            format!("poly(deg {})", coeffs.len().saturating_sub(1)),
        ))
    }

    /// Canonical s-shaped family: `V''(m) = omega_m - m`, integrated twice
    /// with zero constants. Convex below `omega_m`, concave above.
    pub fn s_family(omega_m: f64) -> Result<Self> {
        if !(0.0 < omega_m && omega_m < 1.0) {
            return Err(Error::InvalidInput(format!(
                "s-family inflection must lie in (0, 1), got {omega_m}"
            )));
        }
        let coeffs = vec![0.0, 0.0, omega_m / 2.0, -1.0 / 6.0];
        Ok(Self::from_coeffs(coeffs, format!("s-family({omega_m})")))
    }

    /// Canonical m-shaped family: `V''(m) = (m - omega_l) * (omega_r - m)`,
    /// integrated twice with zero constants. Concave outside
    /// `[omega_l, omega_r]`, convex inside.
    pub fn m_family(omega_l: f64, omega_r: f64) -> Result<Self> {
        if !(0.0 < omega_l && omega_l < omega_r && omega_r < 1.0) {
            return Err(Error::InvalidInput(format!(
                "m-family inflections must satisfy 0 < {omega_l} < {omega_r} < 1"
            )));
        }
        let coeffs = vec![
            0.0,
            0.0,
            -omega_l * omega_r / 2.0,
            (omega_l + omega_r) / 6.0,
            -1.0 / 12.0,
        ];
        Ok(Self::from_coeffs(
            coeffs,
            format!("m-family({omega_l}, {omega_r})"),
        ))
    }

    /// Adds the affine term `a * m + b`. Affine terms shift expected payoffs
    /// by `a * E[omega] + b` under any mean-preserving signal and leave every
    /// curvature-driven quantity unchanged.
    pub fn with_affine(mut self, a: f64, b: f64) -> Self {
        self.coeffs[0] += b;
        if self.coeffs.len() < 2 {
            self.coeffs.push(a);
        } else {
            self.coeffs[1] += a;
        }
        let label = format!("{} + affine({a}, {b})", self.label);
        Self::from_coeffs(self.coeffs, label)
    }

    fn from_coeffs(coeffs: Vec<f64>, label: String) -> Self {
        let d1 = poly_deriv(&coeffs);
        let d2 = poly_deriv(&d1);
        Self {
            coeffs,
            d1,
            d2,
            label,
        }
    }

    pub fn eval(&self, m: f64) -> f64 {
        horner(&self.coeffs, m)
    }

    pub fn deriv1(&self, m: f64) -> f64 {
        horner(&self.d1, m)
    }

    pub fn deriv2(&self, m: f64) -> f64 {
        horner(&self.d2, m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Curvature class of a payoff on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Convex,
    Concave,
    Affine,
    SShaped,
    MShaped,
    /// A recognizable single- or double-crossing pattern no solver targets
    /// (e.g. concave-then-convex).
    Other,
}

impl ShapeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Convex => "convex",
            ShapeKind::Concave => "concave",
            ShapeKind::Affine => "affine",
            ShapeKind::SShaped => "s_shaped",
            ShapeKind::MShaped => "m_shaped",
            ShapeKind::Other => "other",
        }
    }
}

/// Classification result: the curvature class plus refined inflection
/// points (one for s-shaped, two for m-shaped).
#[derive(Debug, Clone)]
pub struct ShapeReport {
    pub kind: ShapeKind,
    pub inflections: Vec<f64>,
}

/// Classifies the curvature of `v` from the sign pattern of `V''` sampled on
/// a uniform grid. Samples with `|V''| <= tol` count as zero; sign changes
/// are refined to inflection points by bisection.
///
/// Rejects payoffs whose `V''` vanishes on a whole interval (without being
/// affine) and payoffs with more than two sign changes.
pub fn classify_shape(v: &ObjectiveFn, grid_points: usize, tol: f64) -> Result<ShapeReport> {
    if grid_points < 3 {
        return Err(Error::InvalidInput(
            "shape classification needs at least 3 grid points".into(),
        ));
    }
    let n = grid_points;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let signs: Vec<i8> = xs
        .iter()
        .map(|&x| {
            let d2 = v.deriv2(x);
            if d2.abs() <= tol {
                0
            } else if d2 > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    if signs.iter().all(|&s| s == 0) {
        return Ok(ShapeReport {
            kind: ShapeKind::Affine,
            inflections: vec![],
        });
    }
    let mut zero_run = 0usize;
    for &s in &signs {
        if s == 0 {
            zero_run += 1;
            if zero_run >= 2 {
                return Err(Error::ShapeUnrecognized(
                    "second derivative vanishes on an interval".into(),
                ));
            }
        } else {
            zero_run = 0;
        }
    }

    // runs of nonzero signs, remembering the last grid index of each run
    let mut runs: Vec<(i8, usize, usize)> = Vec::new();
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        match runs.last_mut() {
            Some((sign, _, last)) if *sign == s => *last = i,
            _ => runs.push((s, i, i)),
        }
    }

    let pattern: Vec<i8> = runs.iter().map(|r| r.0).collect();
    let kind = match pattern.as_slice() {
        [1] => ShapeKind::Convex,
        [-1] => ShapeKind::Concave,
        [1, -1] => ShapeKind::SShaped,
        [-1, 1, -1] => ShapeKind::MShaped,
        [-1, 1] | [1, -1, 1] => ShapeKind::Other,
        _ => {
            return Err(Error::ShapeUnrecognized(format!(
                "{} sign changes in second derivative",
                pattern.len().saturating_sub(1)
            )))
        }
    };

    let mut inflections = Vec::new();
    for w in runs.windows(2) {
        let (lo_i, hi_i) = (w[0].2, w[1].1);
        let (lo, hi) = (xs[lo_i], xs[hi_i]);
        let root = bisect(|x| v.deriv2(x), lo, hi, 1e-12).unwrap_or(0.5 * (lo + hi));
        inflections.push(root);
    }
    Ok(ShapeReport { kind, inflections })
}

/// Gap between the payoff at `omega` and the tangent line to `V` at `m`:
/// `V(omega) - V(m) - V'(m) * (omega - m)`.
///
/// Positive gaps mean `omega` sits above the tangent drawn at the pooled
/// mean, so separating more of the state raises the sender's payoff; the
/// discrete walk's derivative is proportional to this gap.
pub fn tangent_gap(v: &ObjectiveFn, omega: f64, m: f64) -> f64 {
    v.eval(omega) - v.eval(m) - v.deriv1(m) * (omega - m)
}

/// Common tangent line touching an m-shaped payoff on both concave branches.
#[derive(Debug, Clone, Copy)]
pub struct Bitangent {
    pub m_l: f64,
    pub m_r: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Bitangent {
    pub fn line_at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

const BITANGENT_GRID: usize = 1001;
const NEWTON_ITERS: usize = 200;

/// Solves for the unique interior bitangent of an m-shaped payoff.
///
/// Solves the two tangency residuals (equal slopes at both touch points and
/// chord slope matching them) with a damped Newton iteration. The starting
/// point is taken from the concave-branch maximizers of `V` minus its
/// endpoint chord, which makes initialization invariant to affine addends.
pub fn solve_bitangent(v: &ObjectiveFn, shape: &ShapeReport) -> Result<Bitangent> {
    if shape.kind != ShapeKind::MShaped {
        return Err(Error::NoBitangent(format!(
            "objective is {}, not m_shaped",
            shape.kind.as_str()
        )));
    }
    let (omega_l, omega_r) = (shape.inflections[0], shape.inflections[1]);
    let chord_slope = v.eval(1.0) - v.eval(0.0);
    let tilted = |x: f64| v.eval(x) - chord_slope * x;
    let argmax_on = |lo: f64, hi: f64| {
        let mut best = (lo, tilted(lo));
        for i in 1..BITANGENT_GRID {
            let x = lo + (hi - lo) * i as f64 / (BITANGENT_GRID - 1) as f64;
            let y = tilted(x);
            if y > best.1 {
                best = (x, y);
            }
        }
        best.0
    };
    let mut m_l = argmax_on(0.0, omega_l);
    let mut m_r = argmax_on(omega_r, 1.0);

    let residual = |m_l: f64, m_r: f64| {
        let r1 = v.deriv1(m_l) - v.deriv1(m_r);
        let r2 = v.eval(m_r) - v.eval(m_l) - v.deriv1(m_l) * (m_r - m_l);
        (r1, r2)
    };
    let norm = |(r1, r2): (f64, f64)| r1.abs().max(r2.abs());

    let mut res = residual(m_l, m_r);
    for _ in 0..NEWTON_ITERS {
        if norm(res) < 1e-13 {
            break;
        }
        let (a, b) = (v.deriv2(m_l), -v.deriv2(m_r));
        let (c, d) = (-v.deriv2(m_l) * (m_r - m_l), v.deriv1(m_r) - v.deriv1(m_l));
        let det = a * d - b * c;
        if det.abs() < 1e-18 {
            return Err(Error::NoBitangent("singular tangency system".into()));
        }
        let dl = (-res.0 * d + res.1 * b) / det;
        let dr = (-a * res.1 + c * res.0) / det;
        // damped step: halve until the residual shrinks and ordering holds
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-8 {
            let nl = (m_l + t * dl).clamp(1e-12, 1.0 - 1e-12);
            let nr = (m_r + t * dr).clamp(1e-12, 1.0 - 1e-12);
            if nl < nr {
                let nres = residual(nl, nr);
                if norm(nres) < norm(res) {
                    m_l = nl;
                    m_r = nr;
                    res = nres;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let slack = 1e-9;
    if norm(res) > 1e-8
        || !(m_l > 0.0 && m_r < 1.0 && m_l < m_r)
        || m_l > omega_l + slack
        || m_r < omega_r - slack
    {
        return Err(Error::NoBitangent(format!(
            "tangency iteration did not converge to an interior pair (m_l={m_l}, m_r={m_r})"
        )));
    }
    let slope = v.deriv1(m_l);
    Ok(Bitangent {
        m_l,
        m_r,
        slope,
        intercept: v.eval(m_l) - slope * m_l,
    })
}

/// Concave envelope of `v` evaluated at `x`, given its bitangent: the
/// tangent line on `[m_l, m_r]` and `v` itself outside.
pub fn concavify_at(v: &ObjectiveFn, bitangent: &Bitangent, x: f64) -> f64 {
    if x < bitangent.m_l || x > bitangent.m_r {
        v.eval(x)
    } else {
        bitangent.line_at(x)
    }
}
