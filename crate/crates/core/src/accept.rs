//! Metropolis-Hastings and Barker acceptance rules.
//!
//! Both rules consume the log ratio `alpha` produced by the proposal
//! schemes: `A_MH = min(1, exp(-alpha))` and
//! `A_Barker = exp(-alpha) / (1 + exp(-alpha))`. Working in log space until
//! this point keeps everything finite for arbitrarily large `|alpha|`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AcceptanceRule {
    MetropolisHastings,
    Barker,
}

impl AcceptanceRule {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "metropolis" => Some(AcceptanceRule::MetropolisHastings),
            "barker" => Some(AcceptanceRule::Barker),
            _ => None,
        }
    }
}

/// Quadrature prefactor `a` and timestep-bias exponent of a scheme.
///
/// `a` is the factor in front of the generator in the weak-type expansion
/// of the discrete semigroup: 1 for Metropolis-based methods and 1/2 for
/// Barker-based ones (whose acceptance rate tends to 1/2 as `dt -> 0`).
/// `alpha_bias` is the order in `dt` of the bias on the self-diffusion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeBiasProfile {
    pub a: f64,
    pub alpha_bias: f64,
}

/// Acceptance probability for the given rule and log ratio.
///
/// The Metropolis branch returns exactly 1 for `alpha <= 0`; the Barker
/// branch is evaluated as `1 / (1 + exp(alpha))`, which saturates cleanly
/// instead of producing NaN for `|alpha|` up to 1e6 and beyond.
pub fn acceptance_probability(rule: AcceptanceRule, alpha: f64) -> f64 {
    match rule {
        AcceptanceRule::MetropolisHastings => {
            if alpha <= 0.0 {
                1.0
            } else {
                (-alpha).exp()
            }
        }
        AcceptanceRule::Barker => 1.0 / (1.0 + alpha.exp()),
    }
}

/// Accept iff `u <= a`; the boundary is included, matching the indicator
/// `1_{U <= A}` convention of the Metropolized update.
pub fn decide(acceptance: f64, u: f64) -> bool {
    u <= acceptance
}

#[cfg(test)]
mod tests {
    use super::*;
    use AcceptanceRule::{Barker, MetropolisHastings as Mh};

    #[test]
    fn values_at_zero_and_ln_two() {
        assert_eq!(acceptance_probability(Mh, 0.0), 1.0);
        assert_eq!(acceptance_probability(Barker, 0.0), 0.5);
        let l2 = std::f64::consts::LN_2;
        assert!((acceptance_probability(Mh, l2) - 0.5).abs() < 1e-15);
        assert!((acceptance_probability(Barker, l2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn limits_do_not_overflow() {
        assert_eq!(acceptance_probability(Mh, -5.0), 1.0);
        assert_eq!(acceptance_probability(Mh, 1e6), 0.0);
        assert_eq!(acceptance_probability(Mh, -1e6), 1.0);
        assert_eq!(acceptance_probability(Barker, 1e6), 0.0);
        assert_eq!(acceptance_probability(Barker, -1e6), 1.0);
        let a = acceptance_probability(Barker, -50.0);
        assert!(a > 1.0 - 1e-15 && a.is_finite());
        for alpha in [f64::MIN_POSITIVE, -1e308, 1e308, 0.0] {
            assert!(acceptance_probability(Barker, alpha).is_finite());
            assert!(acceptance_probability(Mh, alpha).is_finite());
        }
    }

    #[test]
    fn metropolis_is_exactly_one_for_nonpositive_alpha() {
        for i in 0..1000 {
            let alpha = -30.0 * i as f64 / 999.0;
            assert_eq!(acceptance_probability(Mh, alpha), 1.0);
        }
    }

    #[test]
    fn barker_strictly_interior() {
        for i in 0..=600 {
            let alpha = -30.0 + i as f64 * 0.1;
            let a = acceptance_probability(Barker, alpha);
            assert!(a > 0.0 && a < 1.0, "alpha = {alpha}");
        }
    }

    #[test]
    fn reversibility_identity() {
        // A(alpha) = exp(-alpha) A(-alpha) is what makes both rules sample
        // the Gibbs measure.
        for rule in [Mh, Barker] {
            for i in 0..=600 {
                let alpha = -30.0 + i as f64 * 0.1;
                let lhs = acceptance_probability(rule, alpha);
                let rhs = (-alpha).exp() * acceptance_probability(rule, -alpha);
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0),
                    "rule {rule:?}, alpha {alpha}"
                );
            }
        }
    }

    #[test]
    fn decide_boundary() {
        assert!(decide(1.0, 0.999999));
        assert!(!decide(0.0, 0.5));
        assert!(decide(0.5, 0.5));
    }

    proptest::proptest! {
        #[test]
        fn acceptance_is_a_probability(alpha in -1e6f64..1e6) {
            for rule in [Mh, Barker] {
                let a = acceptance_probability(rule, alpha);
                proptest::prop_assert!((0.0..=1.0).contains(&a));
            }
        }
    }
}
