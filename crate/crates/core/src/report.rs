//! Machine-readable result reports emitted by the command-line front end.
//!
//! Every float is rounded to 12 significant digits before serialization, so
//! a given config always produces byte-identical report files.

use serde::Serialize;

use crate::censorship::{CensorshipOutcome, ContinuumPolicy, MediaEnvironment};
use crate::continuous::{BipoolingCertificate, IntervalDisclosure, UnrestrictedSolution};
use crate::discrete::MonotoneSolutionDiscrete;
use crate::signal::MonotonePartition;

/// Rounds to 12 significant digits. Zero stays positive zero so reruns agree
/// bytewise.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("f64 round-trips")
}

/// Fixed-format float for CSV cells: 12 significant digits, '.' separator.
pub fn fmt12(x: f64) -> String {
    format!("{}", sig12(x))
}

fn pair_blocks(p: &MonotonePartition) -> Vec<[usize; 2]> {
    p.blocks().iter().map(|&(lo, hi)| [lo, hi]).collect()
}

/// Result of a discrete solve: the optimal randomized cutoff signal plus
/// every value-tied deterministic partition.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteReport {
    pub method: &'static str,
    pub omega_star: f64,
    pub q_star: f64,
    pub m_star: f64,
    pub value: f64,
    /// Tied optimal partitions, each a list of `[lo, hi]` index blocks
    /// (0-based, inclusive).
    pub partitions: Vec<Vec<[usize; 2]>>,
}

impl DiscreteReport {
    pub fn from_solution(method: &'static str, solution: &MonotoneSolutionDiscrete) -> Self {
        let s = &solution.stochastic;
        Self {
            method,
            omega_star: sig12(s.cutoff_state),
            q_star: sig12(s.q),
            m_star: sig12(s.pooled_mean),
            value: sig12(s.value),
            partitions: solution
                .best
                .iter()
                .map(|c| pair_blocks(&c.partition))
                .collect(),
        }
    }

    pub fn from_parts(
        method: &'static str,
        omega_star: f64,
        q_star: f64,
        m_star: f64,
        value: f64,
        partitions: Vec<Vec<[usize; 2]>>,
    ) -> Self {
        Self {
            method,
            omega_star: sig12(omega_star),
            q_star: sig12(q_star),
            m_star: sig12(m_star),
            value: sig12(value),
            partitions,
        }
    }
}

/// Two-atom feasibility certificate as serialized inside continuous reports.
#[derive(Debug, Clone, Serialize)]
pub struct Condition1Report {
    pub holds: bool,
    #[serde(rename = "m_L")]
    pub m_l: Option<f64>,
    #[serde(rename = "m_R")]
    pub m_r: Option<f64>,
    pub omega_2star: Option<f64>,
    pub excess: Option<f64>,
    pub reason: Option<String>,
}

impl From<&BipoolingCertificate> for Condition1Report {
    fn from(cert: &BipoolingCertificate) -> Self {
        Self {
            holds: cert.holds,
            m_l: cert.bitangent.map(|b| sig12(b.m_l)),
            m_r: cert.bitangent.map(|b| sig12(b.m_r)),
            omega_2star: cert.omega_2star.map(sig12),
            excess: cert.excess.map(sig12),
            reason: cert.reason.clone(),
        }
    }
}

/// Result of a continuous solve plus the unrestricted benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuousReport {
    pub method: &'static str,
    pub branch: &'static str,
    #[serde(rename = "omega_L_star")]
    pub omega_l_star: f64,
    #[serde(rename = "omega_R_star")]
    pub omega_r_star: f64,
    #[serde(rename = "m_L_star")]
    pub m_l_star: f64,
    #[serde(rename = "m_R_star")]
    pub m_r_star: f64,
    pub value: f64,
    pub condition1: Condition1Report,
    pub unrestricted_value: f64,
}

impl ContinuousReport {
    pub fn from_solution(
        method: &'static str,
        solution: &IntervalDisclosure,
        unrestricted: &UnrestrictedSolution,
    ) -> Self {
        Self {
            method,
            branch: solution.branch.as_str(),
            omega_l_star: sig12(solution.omega_l_star),
            omega_r_star: sig12(solution.omega_r_star),
            m_l_star: sig12(solution.m_l_star),
            m_r_star: sig12(solution.m_r_star),
            value: sig12(solution.value),
            condition1: Condition1Report::from(&unrestricted.certificate),
            unrestricted_value: sig12(unrestricted.value),
        }
    }
}

/// Result of a censorship solve: which outlets are silenced, which speak,
/// and how the value compares to the unrestricted benchmark.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CensorshipReport {
    Finite(FiniteCensorshipReport),
    Continuum(ContinuumCensorshipReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteCensorshipReport {
    pub method: &'static str,
    pub kind: &'static str,
    /// Positions of silenced outlets.
    pub censored: Vec<f64>,
    /// Positions of outlets left free to report.
    pub permitted: Vec<f64>,
    pub value: f64,
    pub unrestricted_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuumCensorshipReport {
    pub method: &'static str,
    pub kind: &'static str,
    pub policy: &'static str,
    /// Silenced outlet positions, as closed intervals.
    pub censored: Vec<[f64; 2]>,
    /// Permitted outlet positions, as closed intervals; a singleton is a
    /// degenerate interval.
    pub permitted: Vec<[f64; 2]>,
    pub value: f64,
    pub unrestricted_value: f64,
}

impl CensorshipReport {
    pub fn from_outcome(
        method: &'static str,
        env: &MediaEnvironment,
        outcome: &CensorshipOutcome,
    ) -> Self {
        match outcome {
            CensorshipOutcome::Finite(out) => {
                let positions = env.outlet_positions().unwrap_or(&[]);
                let (censored, permitted) = positions
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| (i, sig12(c)))
                    .partition::<Vec<_>, _>(|&(i, _)| out.policy.censors(i));
                let strip = |v: Vec<(usize, f64)>| v.into_iter().map(|(_, c)| c).collect();
                CensorshipReport::Finite(FiniteCensorshipReport {
                    method,
                    kind: "finite",
                    censored: strip(censored),
                    permitted: strip(permitted),
                    value: sig12(out.value),
                    unrestricted_value: sig12(out.stochastic_reference.value),
                })
            }
            CensorshipOutcome::Continuum(out) => {
                let (censored, permitted) = match out.policy {
                    ContinuumPolicy::CensorAll => (vec![[0.0, 1.0]], vec![]),
                    ContinuumPolicy::PermitSingle { outlet } => {
                        let c = sig12(outlet);
                        (vec![[0.0, c], [c, 1.0]], vec![[c, c]])
                    }
                    ContinuumPolicy::PermitInterval { lo, hi } => {
                        let (lo, hi) = (sig12(lo), sig12(hi));
                        (vec![[0.0, lo], [hi, 1.0]], vec![[lo, hi]])
                    }
                };
                CensorshipReport::Continuum(ContinuumCensorshipReport {
                    method,
                    kind: "continuum",
                    policy: out.policy.as_str(),
                    censored,
                    permitted,
                    value: sig12(out.value),
                    unrestricted_value: sig12(out.unrestricted.value),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::censorship::{optimal_censorship, Outlets};
    use crate::continuous::{solve_monotone_continuous, unrestricted_value};
    use crate::discrete::solve_monotone_discrete;
    use crate::objective::ObjectiveFn;
    use crate::prior::{ContinuousPrior, DiscretePrior};

    #[test]
    fn sig12_rounds_to_twelve_significant_digits() {
        assert_eq!(sig12(2.0 / 3.0), 0.666666666667);
        assert_eq!(sig12(0.0001234567891234), 1.23456789123e-4);
        assert_eq!(sig12(-2.0 / 3.0), -0.666666666667);
        assert_eq!(sig12(0.5625), 0.5625);
        assert_eq!(sig12(0.0), 0.0);
        assert!(sig12(-0.0).is_sign_positive());
        assert_eq!(sig12(sig12(1.0 / 7.0)), sig12(1.0 / 7.0));
    }

    #[test]
    fn fmt12_uses_plain_decimal_notation() {
        assert_eq!(fmt12(0.5625), "0.5625");
        assert_eq!(fmt12(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt12(0.0), "0");
    }

    #[test]
    fn discrete_report_carries_the_randomized_optimum_and_ties() {
        let prior = DiscretePrior::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let v = ObjectiveFn::polynomial(&[0.0, 0.0, 3.0, -2.0]).unwrap();
        let solution = solve_monotone_discrete(&prior, &v).unwrap();
        let report = DiscreteReport::from_solution("solver", &solution);
        assert_eq!(report.omega_star, 0.0);
        assert_eq!(report.q_star, 0.666666666667);
        assert_eq!(report.m_star, 0.75);
        assert_eq!(report.value, 0.5625);
        assert_eq!(report.partitions.len(), 2);

        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["method"], "solver");
        assert!(json["partitions"].is_array());
        assert_eq!(json["partitions"][0][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn continuous_report_uses_the_documented_field_names() {
        let prior = ContinuousPrior::piecewise_uniform(&[
            (0.0, 0.1, 0.45),
            (0.1, 0.9, 0.10),
            (0.9, 1.0, 0.45),
        ])
        .unwrap();
        let v = ObjectiveFn::m_family(0.3, 0.7)
            .unwrap()
            .with_affine(13.0 / 600.0, 0.0);
        let solution = solve_monotone_continuous(&prior, &v).unwrap();
        let unrestricted = unrestricted_value(&prior, &v).unwrap();
        let report = ContinuousReport::from_solution("solver", &solution, &unrestricted);
        let json = serde_json::to_value(&report).unwrap();
        for key in [
            "branch",
            "omega_L_star",
            "omega_R_star",
            "m_L_star",
            "m_R_star",
            "value",
            "condition1",
            "unrestricted_value",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(json["branch"], "cutoff");
        assert_eq!(json["condition1"]["holds"], true);
        assert_eq!(json["condition1"]["m_L"], 0.153589838486);
    }

    #[test]
    fn censorship_reports_cover_both_outlet_kinds() {
        let quality = ContinuousPrior::piecewise_uniform(&[(0.0, 1.0, 1.0)]).unwrap();
        let citizens = ObjectiveFn::polynomial(&[0.0, 0.0, 3.0, -2.0]).unwrap();
        let env = MediaEnvironment::new(
            quality.clone(),
            citizens.clone(),
            Outlets::Finite(vec![0.25, 0.75]),
        )
        .unwrap();
        let outcome = optimal_censorship(&env).unwrap();
        let report = CensorshipReport::from_outcome("solver", &env, &outcome);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["kind"], "finite");
        assert_eq!(json["censored"], serde_json::json!([0.75]));
        assert_eq!(json["permitted"], serde_json::json!([0.25]));
        assert_eq!(json["value"], 0.5234375);

        let v = ObjectiveFn::m_family(0.3, 0.7).unwrap().with_affine(0.045, 0.0);
        let env = MediaEnvironment::new(quality, v, Outlets::Continuum).unwrap();
        let outcome = optimal_censorship(&env).unwrap();
        let report = CensorshipReport::from_outcome("solver", &env, &outcome);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["kind"], "continuum");
        assert_eq!(json["policy"], "permit_interval");
        assert_eq!(json["permitted"].as_array().unwrap().len(), 1);
        assert_eq!(json["censored"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn identical_inputs_serialize_identically() {
        let prior = DiscretePrior::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.25, 0.5]).unwrap();
        let v = ObjectiveFn::polynomial(&[0.0, 0.0, 3.0, -2.0]).unwrap();
        let one = serde_json::to_string(&DiscreteReport::from_solution(
            "solver",
            &solve_monotone_discrete(&prior, &v).unwrap(),
        ))
        .unwrap();
        let two = serde_json::to_string(&DiscreteReport::from_solution(
            "solver",
            &solve_monotone_discrete(&prior, &v).unwrap(),
        ))
        .unwrap();
        assert_eq!(one, two);
    }
}
