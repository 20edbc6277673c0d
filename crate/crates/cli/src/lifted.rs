//! Piecewise-linear and birational orbits of one seeded labeling.

use fences_core::lifted::{
    cesaro_homomesy_estimate, check_label_bounds, check_trace_identities, monotone_random_labeling, orbit_exact,
    FiniteOrder, IdentityFailure, Labeling, LiftedStat, Realm, DEFAULT_STEP_LIMIT,
};
use fences_core::spaces::{antichain_basis, ideal_basis};
use fences_core::stats::StatExpr;
use fences_core::{Fence, FenceShape, Rational};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCheck {
    pub statistic: String,
    pub target: f64,
    pub mean: f64,
    /// Averaged exactly over one full period rather than estimated.
    pub exact: bool,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedReport {
    pub fence: String,
    pub realm: Realm,
    pub seed: u64,
    pub steps: usize,
    pub exact_steps: usize,
    pub order: FiniteOrder,
    pub identity_failure: Option<IdentityFailure>,
    /// First label outside the analytic bounds along the exact birational
    /// trace.
    pub bounds_violation: Option<String>,
    pub means: Vec<MeanCheck>,
}

impl LiftedReport {
    pub fn passed(&self) -> bool {
        self.identity_failure.is_none()
            && self.bounds_violation.is_none()
            && self.means.iter().all(|m| m.within)
    }
}

/// `T_p` for every element, then the antichain and ideal basis statistics,
/// each with its constant.
pub fn lifted_statistics(fence: &Fence) -> Vec<(String, StatExpr, Rational)> {
    let mut out: Vec<(String, StatExpr, Rational)> = (1..=fence.n())
        .map(|p| (format!("T[{p}]"), StatExpr::new().with_toggle(p, Rational::one()), Rational::zero()))
        .collect();
    for b in antichain_basis(fence).into_iter().chain(ideal_basis(fence)) {
        out.push((b.label, b.statistic, b.certificate.constant));
    }
    out
}

fn lifted_constant(realm: Realm, pi: &Labeling<Rational>, c: &Rational) -> Rational {
    match realm {
        Realm::PiecewiseLinear => c * (&pi.top - &pi.bottom),
        Realm::Birational => {
            let e = c.to_integer().to_i64().expect("integer constant");
            let ratio = &pi.top / &pi.bottom;
            let mut v = Rational::one();
            for _ in 0..e.unsigned_abs() {
                v *= &ratio;
            }
            if e < 0 {
                v.recip()
            } else {
                v
            }
        }
    }
}

/// Period-exact check: the sum (PL) or product (birational) over one period
/// against the constant raised to the period length.
fn period_mean(
    fence: &Fence,
    stat: &LiftedStat,
    period: &[Labeling<Rational>],
    target: &Rational,
) -> (bool, f64) {
    let n = period.len();
    let values = period.iter().map(|pi| stat.evaluate(fence, pi));
    match stat.realm() {
        Realm::PiecewiseLinear => {
            let total: Rational = values.sum();
            let mean = total / Rational::from_integer((n as i64).into());
            (mean == *target, mean.to_f64().unwrap_or(f64::NAN))
        }
        Realm::Birational => {
            let product: Rational = values.product();
            let expected = (0..n).fold(Rational::one(), |acc, _| acc * target);
            let mean = (product.to_f64().unwrap_or(f64::NAN)).powf(1.0 / n as f64);
            (product == expected, mean)
        }
    }
}

/// Exact trace of `exact_steps` steps (all `steps` in the PL realm), finite
/// order detection along it, the exact identities, and the means of every
/// statistic from [`lifted_statistics`].
pub fn lifted(
    shape: &FenceShape,
    realm: Realm,
    seed: u64,
    steps: usize,
    exact_steps: usize,
    tol: Tolerances,
) -> Result<(Vec<Labeling<Rational>>, LiftedReport), CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let fence = Fence::new(shape.clone())?;
    let pi = monotone_random_labeling(&fence, realm, seed);
    let exact_steps = match realm {
        Realm::PiecewiseLinear => steps,
        Realm::Birational => exact_steps.min(steps),
    };
    let trace = orbit_exact(&fence, realm, &pi, exact_steps, DEFAULT_STEP_LIMIT)?;
    let order = match (1..trace.len()).find(|&k| trace[k] == pi) {
        Some(k) => FiniteOrder::Order(k),
        None => FiniteOrder::Unknown(exact_steps),
    };
    let identity_failure = check_trace_identities(&fence, realm, &trace, exact_steps, exact_steps).err();
    let bounds_violation = match realm {
        Realm::Birational => check_label_bounds(&fence, &trace).err().map(|e| e.to_string()),
        Realm::PiecewiseLinear => None,
    };
    let mut means = Vec::new();
    for (name, expr, c) in lifted_statistics(&fence) {
        let stat = LiftedStat::new(&fence, &expr, realm)?;
        let target = lifted_constant(realm, &pi, &c);
        let target_f = target.to_f64().unwrap_or(f64::NAN);
        let check = match order {
            FiniteOrder::Order(k) => {
                let (within, mean) = period_mean(&fence, &stat, &trace[..k], &target);
                MeanCheck {
                    statistic: name,
                    target: target_f,
                    mean,
                    exact: true,
                    within,
                }
            }
            FiniteOrder::Unknown(_) => {
                let est = cesaro_homomesy_estimate(&fence, &stat, &pi, steps);
                let bound = if expr.toggle.is_empty() { tol.basis } else { tol.toggle };
                MeanCheck {
                    statistic: name,
                    target: target_f,
                    mean: est.mean,
                    exact: false,
                    within: (est.mean - target_f).abs() < bound,
                }
            }
        };
        means.push(check);
    }
    let report = LiftedReport {
        fence: shape.to_string(),
        realm,
        seed,
        steps,
        exact_steps,
        order,
        identity_failure,
        bounds_violation,
        means,
    };
    Ok((trace, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_fence_has_exact_period_means() {
        let shape: FenceShape = "F(2,2)".parse().unwrap();
        let (trace, report) = lifted(&shape, Realm::Birational, 7, 100, 20, Tolerances::default()).unwrap();
        // the orbit of a particular labeling may be shorter than the order of ρ
        let FiniteOrder::Order(k) = report.order else { panic!("{:?}", report.order) };
        assert_eq!(6 % k, 0);
        assert_eq!(trace.len(), 21);
        assert!(report.means.iter().all(|m| m.exact));
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn general_fence_uses_time_averages() {
        let shape: FenceShape = "F(2,2,2)".parse().unwrap();
        let (trace, report) = lifted(&shape, Realm::Birational, 3, 2000, 12, Tolerances::default()).unwrap();
        assert_eq!(report.order, FiniteOrder::Unknown(12));
        assert_eq!(trace.len(), 13);
        assert!(report.means.iter().all(|m| !m.exact));
        assert!(report.passed(), "{report:?}");
    }
}
