//! Step-size and weight rules: the subgradient step size `alpha_s`, the
//! gliding step size `beta_s`, and the ergodic weight `w_s`.
//!
//! Alpha families:
//!
//! * `ConstantHorizon` — `R/(L sqrt(t))` with the horizon fixed up front;
//! * `DecayingRl` — `R/(L sqrt(s))`;
//! * `Normalized` — `R/(||g_s|| sqrt(s))`, no Lipschitz constant needed;
//! * `AdaptiveG` — `R/(G_s s^(a/2))` with the running maximum
//!   `G_s = max(G_{s-1}, ||g_s|| s^((1-a)/2))`, `G_0 = -inf`;
//! * `StronglyConvexJoint` — the coupling `alpha_s beta_s = 2/(mu (s+1))`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScheduleError {
    /// A normalized rule received `||g|| = 0`. The solver treats this as an
    /// early-convergence signal (0 is a subgradient, so the point is optimal).
    #[error("zero subgradient norm passed to a normalized step-size rule")]
    ZeroSubgradient,
    #[error("searched-set gliding rule needs a candidate evaluator")]
    MissingEvaluator,
    #[error("invalid schedule: {0}")]
    InvalidRule(String),
}

/// Subgradient step-size family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AlphaRule {
    ConstantHorizon {
        #[serde(rename = "R")]
        r: f64,
        #[serde(rename = "L")]
        l: f64,
        t_total: u64,
    },
    DecayingRl {
        #[serde(rename = "R")]
        r: f64,
        #[serde(rename = "L")]
        l: f64,
    },
    Normalized {
        #[serde(rename = "R")]
        r: f64,
    },
    AdaptiveG {
        #[serde(rename = "R")]
        r: f64,
        a: f64,
    },
    StronglyConvexJoint {
        mu: f64,
    },
}

impl AlphaRule {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        let bad = |msg: &str| Err(ScheduleError::InvalidRule(msg.into()));
        match *self {
            AlphaRule::ConstantHorizon { r, l, t_total } => {
                if r <= 0.0 || l <= 0.0 || t_total < 1 {
                    return bad("constant-horizon needs R > 0, L > 0, t >= 1");
                }
            }
            AlphaRule::DecayingRl { r, l } => {
                if r <= 0.0 || l <= 0.0 {
                    return bad("decaying-rl needs R > 0 and L > 0");
                }
            }
            AlphaRule::Normalized { r } => {
                if r <= 0.0 {
                    return bad("normalized needs R > 0");
                }
            }
            AlphaRule::AdaptiveG { r, a } => {
                if r <= 0.0 || !(0.0..=1.0).contains(&a) {
                    return bad("adaptive-g needs R > 0 and a in [0, 1]");
                }
            }
            AlphaRule::StronglyConvexJoint { mu } => {
                if mu <= 0.0 {
                    return bad("strongly-convex-joint needs mu > 0");
                }
            }
        }
        Ok(())
    }

    /// True when `alpha_s` depends on the gliding step size (the (C3)
    /// coupling), which fixes the solver's evaluation order to beta-first.
    pub fn depends_on_beta(&self) -> bool {
        matches!(self, AlphaRule::StronglyConvexJoint { .. })
    }
}

/// Evolving state of an alpha rule. One instance per solver run; cheap to
/// clone for parallel trials.
#[derive(Debug, Clone)]
pub struct AlphaState {
    rule: AlphaRule,
    g_running: f64,
}

impl AlphaState {
    pub fn new(rule: AlphaRule) -> Self {
        AlphaState {
            rule,
            g_running: f64::NEG_INFINITY,
        }
    }

    pub fn rule(&self) -> &AlphaRule {
        &self.rule
    }

    /// Running maximum `G_s`; `-inf` before the first adaptive step.
    pub fn g_running(&self) -> f64 {
        self.g_running
    }

    /// Computes `alpha_s`. For `AdaptiveG` the state update
    /// `G := max(G, ||g_s|| s^((1-a)/2))` happens exactly once per call.
    pub fn alpha_next(&mut self, s: u64, g_norm: f64, beta_s: f64) -> Result<f64, ScheduleError> {
        debug_assert!(s >= 1);
        match self.rule {
            AlphaRule::ConstantHorizon { r, l, t_total } => Ok(r / (l * (t_total as f64).sqrt())),
            AlphaRule::DecayingRl { r, l } => Ok(r / (l * (s as f64).sqrt())),
            AlphaRule::Normalized { r } => {
                if g_norm <= 0.0 {
                    return Err(ScheduleError::ZeroSubgradient);
                }
                Ok(r / (g_norm * (s as f64).sqrt()))
            }
            AlphaRule::AdaptiveG { r, a } => {
                if g_norm <= 0.0 {
                    return Err(ScheduleError::ZeroSubgradient);
                }
                let s_f = s as f64;
                self.g_running = self.g_running.max(g_norm * s_f.powf((1.0 - a) / 2.0));
                Ok(r / (self.g_running * s_f.powf(a / 2.0)))
            }
            AlphaRule::StronglyConvexJoint { mu } => {
                debug_assert!(beta_s > 0.0 && beta_s <= 1.0);
                Ok(2.0 / (mu * (s as f64 + 1.0) * beta_s))
            }
        }
    }
}

/// Gliding step-size rule. `One` recovers the classical projected subgradient
/// method; `Constant` and `SearchedSet` keep iterates strictly interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum BetaRule {
    One,
    Constant { value: f64 },
    SearchedSet { candidates: Vec<f64> },
}

impl BetaRule {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match self {
            BetaRule::One => Ok(()),
            BetaRule::Constant { value } => {
                if *value > 0.0 && *value < 1.0 {
                    Ok(())
                } else {
                    Err(ScheduleError::InvalidRule(
                        "constant gliding step needs beta in (0, 1)".into(),
                    ))
                }
            }
            BetaRule::SearchedSet { candidates } => {
                if candidates.is_empty() || candidates.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
                    Err(ScheduleError::InvalidRule(
                        "searched-set candidates must lie in (0, 1)".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The uniform floor `c` of condition (C2+): `beta` itself for a
    /// constant rule, the smallest candidate for a searched set, 1 for the
    /// PSG rule.
    pub fn floor_c(&self) -> f64 {
        match self {
            BetaRule::One => 1.0,
            BetaRule::Constant { value } => *value,
            BetaRule::SearchedSet { candidates } => {
                candidates.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Initial provisional beta used before the first searched step: the
    /// median candidate (beta itself for deterministic rules).
    pub fn provisional_start(&self) -> f64 {
        match self {
            BetaRule::One => 1.0,
            BetaRule::Constant { value } => *value,
            BetaRule::SearchedSet { candidates } => {
                let mut sorted = candidates.clone();
                sorted.sort_by(f64::total_cmp);
                sorted[sorted.len() / 2]
            }
        }
    }
}

/// Selects `beta_s`. A `SearchedSet` rule evaluates the trial objective at
/// each candidate and picks the minimizer, breaking ties toward the smallest
/// beta (the most conservative choice, staying deepest in the interior).
pub fn beta_next(
    rule: &BetaRule,
    _s: u64,
    mut candidates_evaluator: Option<&mut dyn FnMut(f64) -> f64>,
) -> Result<f64, ScheduleError> {
    match rule {
        BetaRule::One => Ok(1.0),
        BetaRule::Constant { value } => Ok(*value),
        BetaRule::SearchedSet { candidates } => {
            let eval = candidates_evaluator
                .as_mut()
                .ok_or(ScheduleError::MissingEvaluator)?;
            let mut sorted = candidates.clone();
            sorted.sort_by(f64::total_cmp);
            let mut best = (sorted[0], eval(sorted[0]));
            for &b in &sorted[1..] {
                let v = eval(b);
                if v < best.1 {
                    best = (b, v);
                }
            }
            Ok(best.0)
        }
    }
}

/// Ergodic weight rule. `StronglyConvexLinear` produces the unnormalized
/// weight `w_s = s`; the readout normalizer `t(t+1)/2` is applied by the
/// ergodic average itself, yielding `sum 2s/(t(t+1)) x_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum WeightRule {
    #[serde(rename = "constant")]
    ConstantW,
    PowerK {
        k: f64,
    },
    InverseAlphaK {
        k: f64,
    },
    #[serde(rename = "alpha")]
    AlphaW,
    #[serde(rename = "beta")]
    BetaW,
    #[serde(rename = "alpha-beta")]
    AlphaBetaW,
    StronglyConvexLinear,
}

impl WeightRule {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match *self {
            WeightRule::PowerK { k } => {
                if k < -1.0 {
                    return Err(ScheduleError::InvalidRule("power-k needs k >= -1".into()));
                }
            }
            WeightRule::InverseAlphaK { k } if !(-1.0..=0.0).contains(&k) => {
                return Err(ScheduleError::InvalidRule(
                    "inverse-alpha-k needs k in [-1, 0]".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn weight_next(&self, s: u64, alpha_s: f64, beta_s: f64) -> f64 {
        debug_assert!(alpha_s > 0.0 && beta_s > 0.0);
        match *self {
            WeightRule::ConstantW => 1.0,
            WeightRule::PowerK { k } => (s as f64).powf(k / 2.0),
            WeightRule::InverseAlphaK { k } => alpha_s.powf(-k),
            WeightRule::AlphaW => alpha_s,
            WeightRule::BetaW => beta_s,
            WeightRule::AlphaBetaW => alpha_s * beta_s,
            WeightRule::StronglyConvexLinear => s as f64,
        }
    }
}

/// The weight family `w_s^(k)`: the `1/alpha^k` branch for `-1 <= k <= 0`
/// (including the coincident `k = 0`) and `s^(k/2)` for `k > 0`.
pub fn eq12_weight(k: f64) -> WeightRule {
    if k <= 0.0 {
        WeightRule::InverseAlphaK { k }
    } else {
        WeightRule::PowerK { k }
    }
}

/// Checks condition (C1): `w_s/(alpha_s beta_s)` monotonically nondecreasing
/// across the history, allowing relative decreases up to 1e-12 to absorb
/// floating-point jitter in analytically constant ratios.
pub fn check_c1(history: &[(f64, f64, f64)]) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for &(w, alpha, beta) in history {
        debug_assert!(w > 0.0 && alpha > 0.0 && beta > 0.0);
        let ratio = w / (alpha * beta);
        if ratio < prev - 1e-12 * prev.abs() {
            return false;
        }
        prev = ratio;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alpha_formula_examples() {
        let mut st = AlphaState::new(AlphaRule::DecayingRl { r: 10.0, l: 2.0 });
        assert_eq!(st.alpha_next(4, 1.0, 0.5).unwrap(), 2.5);

        let mut st = AlphaState::new(AlphaRule::AdaptiveG { r: 1.0, a: 1.0 });
        let a = st.alpha_next(1, 3.0, 0.5).unwrap();
        assert!((st.g_running() - 3.0).abs() < 1e-15);
        assert!((a - 1.0 / 3.0).abs() < 1e-15);

        // hand-trace of the G recursion with a = 0: after G = 5, a norm of 2
        // at s = 4 contributes 2 * sqrt(4) = 4 <= 5, so G stays 5
        let mut st = AlphaState::new(AlphaRule::AdaptiveG { r: 1.0, a: 0.0 });
        st.g_running = 5.0;
        let a = st.alpha_next(4, 2.0, 0.5).unwrap();
        assert_eq!(st.g_running(), 5.0);
        assert!((a - 0.2).abs() < 1e-15);

        let mut st = AlphaState::new(AlphaRule::StronglyConvexJoint { mu: 0.5 });
        assert!((st.alpha_next(1, 1.0, 0.5).unwrap() - 4.0).abs() < 1e-15);

        let mut st = AlphaState::new(AlphaRule::ConstantHorizon {
            r: 1.0,
            l: 1.0,
            t_total: 100,
        });
        assert!((st.alpha_next(7, 9.0, 0.5).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_subgradient_raises_early_convergence_signal() {
        let mut st = AlphaState::new(AlphaRule::Normalized { r: 1.0 });
        assert!(matches!(
            st.alpha_next(1, 0.0, 0.5),
            Err(ScheduleError::ZeroSubgradient)
        ));
        let mut st = AlphaState::new(AlphaRule::AdaptiveG { r: 1.0, a: 0.5 });
        assert!(st.alpha_next(1, 0.0, 0.5).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_next(&BetaRule::One, 3, None).unwrap(), 1.0);
        assert_eq!(
            beta_next(&BetaRule::Constant { value: 0.5 }, 3, None).unwrap(),
            0.5
        );

        let rule = BetaRule::SearchedSet {
            candidates: vec![0.1, 0.5, 0.9],
        };
        let vals = [(0.1, 3.0), (0.5, 1.0), (0.9, 2.0)];
        let mut eval = |b: f64| vals.iter().find(|(c, _)| *c == b).unwrap().1;
        assert_eq!(beta_next(&rule, 1, Some(&mut eval)).unwrap(), 0.5);

        let vals = [(0.1, 1.0), (0.5, 1.0), (0.9, 2.0)];
        let mut eval = |b: f64| vals.iter().find(|(c, _)| *c == b).unwrap().1;
        assert_eq!(beta_next(&rule, 1, Some(&mut eval)).unwrap(), 0.1);

        assert!(matches!(
            beta_next(&rule, 1, None),
            Err(ScheduleError::MissingEvaluator)
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(WeightRule::PowerK { k: 2.0 }.weight_next(9, 1.0, 1.0), 9.0);
        assert_eq!(
            WeightRule::InverseAlphaK { k: -1.0 }.weight_next(3, 0.25, 1.0),
            0.25
        );
        assert!((WeightRule::AlphaBetaW.weight_next(3, 0.2, 0.5) - 0.1).abs() < 1e-16);
        assert_eq!(
            WeightRule::StronglyConvexLinear.weight_next(7, 1.0, 1.0),
            7.0
        );
        assert_eq!(eq12_weight(0.0), WeightRule::InverseAlphaK { k: 0.0 });
        assert_eq!(eq12_weight(2.0), WeightRule::PowerK { k: 2.0 });
    }

    #[test]
    fn c1_examples() {
        // decaying alpha, w = beta, constant beta: ratio 1/alpha nondecreasing
        let mut st = AlphaState::new(AlphaRule::DecayingRl { r: 1.0, l: 1.0 });
        let mut hist = Vec::new();
        for s in 1..=100 {
            let a = st.alpha_next(s, 1.0, 0.5).unwrap();
            hist.push((0.5, a, 0.5));
        }
        assert!(check_c1(&hist));

        // normalized alpha with w = alpha * beta: ratio identically 1
        let mut st = AlphaState::new(AlphaRule::Normalized { r: 1.0 });
        let mut hist = Vec::new();
        for s in 1..=100 {
            let g = 1.0 + (s as f64).sin().abs();
            let a = st.alpha_next(s, g, 0.5).unwrap();
            hist.push((a * 0.5, a, 0.5));
        }
        assert!(check_c1(&hist));

        assert!(!check_c1(&[(2.0, 1.0, 1.0), (1.0, 1.0, 1.0)]));
    }

    proptest! {
        /// Closed-form equivalence: the running maximum equals
        /// `max_{j<=s} ||g_j|| j^((1-a)/2)` exactly.
        #[test]
        fn prop_adaptive_g_closed_form(
            norms in proptest::collection::vec(0.01f64..100.0, 1..200),
            a in 0.0f64..=1.0
        ) {
            let mut st = AlphaState::new(AlphaRule::AdaptiveG { r: 1.0, a });
            for (i, &g) in norms.iter().enumerate() {
                let s = (i + 1) as u64;
                st.alpha_next(s, g, 0.5).unwrap();
                let expected = norms[..=i]
                    .iter()
                    .enumerate()
                    .map(|(j, &gj)| gj * ((j + 1) as f64).powf((1.0 - a) / 2.0))
                    .fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(st.g_running(), expected);
            }
        }

        /// G never decreases and every rule returns alpha > 0 for positive norms.
        #[test]
        fn prop_positivity_and_monotonicity(
            norms in proptest::collection::vec(1e-6f64..1e6, 1..100)
        ) {
            let rules = [
                AlphaRule::ConstantHorizon { r: 2.0, l: 3.0, t_total: 50 },
                AlphaRule::DecayingRl { r: 2.0, l: 3.0 },
                AlphaRule::Normalized { r: 2.0 },
                AlphaRule::AdaptiveG { r: 2.0, a: 0.5 },
                AlphaRule::StronglyConvexJoint { mu: 0.7 },
            ];
            for rule in rules {
                let mut st = AlphaState::new(rule);
                let mut last_g = f64::NEG_INFINITY;
                for (i, &g) in norms.iter().enumerate() {
                    let alpha = st.alpha_next((i + 1) as u64, g, 0.5).unwrap();
                    prop_assert!(alpha > 0.0);
                    prop_assert!(st.g_running() >= last_g);
                    last_g = st.g_running();
                }
            }
        }

        /// (C3) identity: alpha * beta == 2/(mu (s+1)) to machine precision.
        #[test]
        fn prop_c3_identity(
            mu in 0.01f64..10.0,
            beta in 0.001f64..=1.0,
            s in 1u64..10_000
        ) {
            let mut st = AlphaState::new(AlphaRule::StronglyConvexJoint { mu });
            let alpha = st.alpha_next(s, 1.0, beta).unwrap();
            let target = 2.0 / (mu * (s as f64 + 1.0));
            prop_assert!(((alpha * beta) - target).abs() <= 4.0 * f64::EPSILON * target);
        }

        /// (C1) holds for every alpha/weight pairing used by the gliding and
        /// joint designs, on arbitrary positive subgradient-norm sequences.
        #[test]
        fn prop_c1_for_named_pairings(
            norms in proptest::collection::vec(1e-3f64..1e3, 1..1000),
            beta in 0.05f64..0.95
        ) {
            let t = norms.len() as u64;
            let pairings: Vec<(AlphaRule, WeightRule)> = vec![
                (AlphaRule::ConstantHorizon { r: 1.0, l: 2.0, t_total: t }, WeightRule::ConstantW),
                (AlphaRule::ConstantHorizon { r: 1.0, l: 2.0, t_total: t }, WeightRule::BetaW),
                (AlphaRule::DecayingRl { r: 1.0, l: 2.0 }, eq12_weight(-1.0)),
                (AlphaRule::DecayingRl { r: 1.0, l: 2.0 }, eq12_weight(0.0)),
                (AlphaRule::DecayingRl { r: 1.0, l: 2.0 }, eq12_weight(2.0)),
                (AlphaRule::DecayingRl { r: 1.0, l: 2.0 }, WeightRule::BetaW),
                (AlphaRule::Normalized { r: 1.0 }, WeightRule::AlphaW),
                (AlphaRule::Normalized { r: 1.0 }, WeightRule::AlphaBetaW),
                (AlphaRule::AdaptiveG { r: 1.0, a: 0.5 }, eq12_weight(0.0)),
                (AlphaRule::AdaptiveG { r: 1.0, a: 1.0 }, eq12_weight(2.0)),
                (AlphaRule::AdaptiveG { r: 1.0, a: 0.0 }, WeightRule::BetaW),
                (AlphaRule::StronglyConvexJoint { mu: 0.5 }, WeightRule::StronglyConvexLinear),
            ];
            for (rule, weight) in pairings {
                let mut st = AlphaState::new(rule);
                let mut hist = Vec::with_capacity(norms.len());
                for (i, &g) in norms.iter().enumerate() {
                    let s = (i + 1) as u64;
                    let alpha = st.alpha_next(s, g, beta).unwrap();
                    let w = weight.weight_next(s, alpha, beta);
                    hist.push((w, alpha, beta));
                }
                prop_assert!(check_c1(&hist), "C1 failed for {:?}/{:?}", st.rule(), weight);
            }
        }
    }

    #[test]
    fn rules_serialize_as_documented() {
        let alpha: AlphaRule =
            serde_json::from_str(r#"{"type":"adaptive-g","R":10.0,"a":0.5}"#).unwrap();
        assert_eq!(alpha, AlphaRule::AdaptiveG { r: 10.0, a: 0.5 });
        let beta: BetaRule = serde_json::from_str(r#"{"type":"constant","value":0.5}"#).unwrap();
        assert_eq!(beta, BetaRule::Constant { value: 0.5 });
        let weight: WeightRule = serde_json::from_str(r#"{"type":"power-k","k":0.0}"#).unwrap();
        assert_eq!(weight, WeightRule::PowerK { k: 0.0 });
        let joint: AlphaRule =
            serde_json::from_str(r#"{"type":"strongly-convex-joint","mu":0.5}"#).unwrap();
        assert!(joint.depends_on_beta());
    }
}
