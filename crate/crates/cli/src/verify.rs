//! Identity suites over every fence up to a size bound.

use std::collections::BTreeMap;

use fences_core::lifted::{
    check_trace_identities, indicator_labeling, modular_identity_suite, orbit_exact, pl_rowmotion, random_labeling,
    IdentityFailure, Labeling, Realm, DEFAULT_STEP_LIMIT,
};
use fences_core::selfdual::{involution_of, verify_self_dual};
use fences_core::spaces::{
    antichain_basis, antichain_toggle_rank, homomesy_constant, ideal_basis, verify_basis,
    verify_cardinality_peak_valley_equiv, verify_peak_valley_antichain_identity,
};
use fences_core::stats::{chi, chi_hat, dict_ac_to_oic, dict_oic_to_ac};
use fences_core::{DynamicsMap, Fence, FenceError, FenceShape, IdealIndex, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::sweep_shapes;

/// Steps checked per fence in rational arithmetic; birational labels grow
/// too fast for more in a full sweep.
pub const EXACT_LIFTED_STEPS: usize = 4;
/// Steps checked per fence on the images modulo large primes, and in the
/// piecewise-linear realm.
pub const LIFTED_STEPS: usize = 30;
/// The antichain-toggle rank identity is only checked up to this size.
pub const RANK_IDENTITY_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checked: usize,
    /// One line per failure, naming the fence and the witness.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub max_n: usize,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures.is_empty())
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let verdict = if s.failures.is_empty() { "pass" } else { "FAIL" };
            out.push_str(&format!("{:<28} {verdict} ({} checked)\n", s.suite, s.checked));
            for f in &s.failures {
                out.push_str(&format!("    {f}\n"));
            }
        }
        out
    }
}

type Outcome = (&'static str, Result<(), String>);

fn outcome(suite: &'static str, r: Result<(), FenceError>) -> Outcome {
    (suite, r.map_err(|e| e.to_string()))
}

fn dictionary(index: &IdealIndex) -> Result<(), String> {
    let fence = index.fence();
    for p in 1..=fence.n() {
        if dict_oic_to_ac(fence, p).evaluate(index) != chi_hat(index, p) {
            return Err(format!("order-ideal indicator of {p}"));
        }
        if dict_ac_to_oic(fence, p).evaluate(index) != chi(index, p) {
            return Err(format!("antichain indicator of {p}"));
        }
    }
    Ok(())
}

/// `R` is a bijection and `pro ∘ R = R ∘ ρ`.
pub fn recombination(index: &IdealIndex) -> Result<(), String> {
    let fence = index.fence();
    let mut image = Vec::with_capacity(index.len());
    for &i in index.ideals() {
        let r = fence.recombination(i).map_err(|e| e.to_string())?;
        let next = fence.recombination(fence.rowmotion(i)).map_err(|e| e.to_string())?;
        if fence.promotion(r) != next {
            return Err(format!("promotion does not intertwine at {i}"));
        }
        image.push(r.bits());
    }
    image.sort_unstable();
    image.dedup();
    if image.len() != index.len() {
        return Err(format!("{} distinct images for {} ideals", image.len(), index.len()));
    }
    Ok(())
}

/// Every ideal-basis statistic has the same average on every promotion
/// orbit.
pub fn promotion_basis_homomesy(index: &IdealIndex) -> Result<(), String> {
    let orbits = index.orbits(DynamicsMap::Promotion);
    for b in ideal_basis(index.fence()) {
        if homomesy_constant(&b.statistic.evaluate(index), &orbits).is_none() {
            return Err(format!("{} is not homomesic under promotion", b.label));
        }
    }
    Ok(())
}

pub fn specialization(index: &IdealIndex) -> Result<(), String> {
    let fence = index.fence();
    for &i in index.ideals() {
        if pl_rowmotion(fence, &indicator_labeling(fence, i)) != indicator_labeling(fence, fence.rowmotion(i)) {
            return Err(format!("indicator labeling of {i}"));
        }
    }
    Ok(())
}

fn lifted_identities(fence: &Fence, seed: u64) -> Result<(), String> {
    let describe = |realm: Realm, pi: &Labeling<Rational>, f: IdentityFailure| {
        let at = f.element.map(|p| format!(" element {p}")).unwrap_or_default();
        format!("{realm} {} at step {}{at}, seed {seed}, start {}", f.identity, f.step, pi.to_json(0))
    };
    for (realm, steps) in [(Realm::Birational, EXACT_LIFTED_STEPS), (Realm::PiecewiseLinear, LIFTED_STEPS)] {
        let pi = random_labeling(fence, realm, seed);
        let trace = orbit_exact(fence, realm, &pi, steps, DEFAULT_STEP_LIMIT).map_err(|e| e.to_string())?;
        check_trace_identities(fence, realm, &trace, steps, steps).map_err(|f| describe(realm, &pi, f))?;
    }
    let pi = random_labeling(fence, Realm::Birational, seed);
    modular_identity_suite(fence, &pi, LIFTED_STEPS, LIFTED_STEPS)
        .map_err(|f| format!("modular image: {}", describe(Realm::Birational, &pi, f)))
}

fn rank_identity(index: &IdealIndex) -> Result<(), String> {
    let rank = antichain_toggle_rank(index);
    let orbits = index.orbits(DynamicsMap::Rowmotion).len();
    if rank + orbits != index.len() {
        return Err(format!("rank {rank}, {} ideals, {orbits} orbits", index.len()));
    }
    Ok(())
}

fn per_fence(shape: &FenceShape, seed: u64) -> Result<Vec<Outcome>, FenceError> {
    let fence = Fence::new(shape.clone())?;
    let index = IdealIndex::new(&fence);
    let mut out = vec![
        outcome("antichain-basis", verify_basis(&index, &antichain_basis(&fence))),
        outcome("ideal-basis", verify_basis(&index, &ideal_basis(&fence))),
        ("dictionary", dictionary(&index)),
        ("recombination", recombination(&index)),
        ("promotion-basis-homomesy", promotion_basis_homomesy(&index)),
        ("specialization", specialization(&index)),
        ("lifted-identities", lifted_identities(&fence, seed)),
    ];
    if fence.n() <= RANK_IDENTITY_MAX_N {
        out.push(("antichain-rank", rank_identity(&index)));
    }
    if involution_of(&fence).is_ok() {
        out.push(outcome("self-dual", verify_self_dual(&index).map(|_| ())));
    }
    Ok(out)
}

fn uniform_checks(max_n: usize) -> Vec<Outcome> {
    let mut out = Vec::new();
    for t in (3..=max_n).step_by(2) {
        for a in 2.. {
            if a * t - 1 > max_n {
                break;
            }
            let label = format!("F({a}^{t})");
            let r = verify_cardinality_peak_valley_equiv(a, t).map(|_| ());
            out.push(("cardinality-peak-valley", r.map_err(|e| format!("{label}: {e}"))));
        }
    }
    for a in 2.. {
        if 3 * a - 1 > max_n {
            break;
        }
        let ok = verify_peak_valley_antichain_identity(a);
        let label = format!("F({a},{a},{a})");
        out.push(match ok {
            Ok(true) => ("peak-valley-antichain", Ok(())),
            Ok(false) => ("peak-valley-antichain", Err(format!("{label}: identity fails"))),
            Err(e) => ("peak-valley-antichain", Err(format!("{label}: {e}"))),
        });
    }
    out
}

const SUITE_ORDER: [&str; 11] = [
    "antichain-basis",
    "ideal-basis",
    "dictionary",
    "cardinality-peak-valley",
    "antichain-rank",
    "peak-valley-antichain",
    "self-dual",
    "recombination",
    "promotion-basis-homomesy",
    "specialization",
    "lifted-identities",
];

/// Runs every suite on every fence with at most `max_n` elements.
pub fn verify(max_n: usize, seed: u64) -> Result<VerifyReport, FenceError> {
    let shapes = sweep_shapes(None, max_n);
    let per: Vec<(String, Vec<Outcome>)> = shapes
        .par_iter()
        .map(|s| per_fence(s, seed).map(|o| (s.to_string(), o)))
        .collect::<Result<_, _>>()?;
    let mut suites: BTreeMap<&str, SuiteResult> = SUITE_ORDER
        .iter()
        .map(|&name| {
            let r = SuiteResult {
                suite: name.to_string(),
                checked: 0,
                failures: Vec::new(),
            };
            (name, r)
        })
        .collect();
    let tagged = per
        .into_iter()
        .flat_map(|(fence, outs)| outs.into_iter().map(move |(s, r)| (s, r.map_err(|e| format!("{fence}: {e}")))));
    for (suite, r) in tagged.chain(uniform_checks(max_n)) {
        let entry = suites.get_mut(suite).expect("known suite");
        entry.checked += 1;
        if let Err(w) = r {
            entry.failures.push(w);
        }
    }
    let suites = SUITE_ORDER.iter().map(|name| suites.remove(name).unwrap()).collect();
    Ok(VerifyReport { max_n, seed, suites })
}
