//! Self-dual fences: ideal complement, the prime map, dihedral orbits, and
//! orbit-average scanners for the open homomesy conjectures.
//!
//! The involution used throughout is the index reversal `k ↦ n + 1 − k`,
//! which reverses the order exactly when the composition is palindromic with
//! an odd number of parts.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{FenceError, Result};
use crate::fence::{Fence, FenceShape, Involution};
use crate::ideals::{DynamicsMap, Ideal, IdealIndex, OrbitDecomposition};
use crate::linalg::{rat, ratio, Rational};
use crate::spaces::{homomesy_dim, toggleability_dim, Indicator};
use crate::stats::{chi, chi_hat, ideal_cardinality, StatFn};

/// `Ī = κ(F ∖ I)`.
pub fn ideal_complement(fence: &Fence, kappa: &Involution, ideal: Ideal) -> Ideal {
    Ideal(kappa.apply_mask(fence.full_mask() & !ideal.0))
}

/// `I′ = ⟨κ(max I)⟩`.
pub fn prime_map(fence: &Fence, kappa: &Involution, ideal: Ideal) -> Ideal {
    fence.generate(kappa.apply_mask(fence.maximal(ideal)))
}

pub fn involution_of(fence: &Fence) -> Result<Involution> {
    fence
        .self_dual_involution()
        .ok_or_else(|| FenceError::NotSelfDual(fence.shape().to_string()))
}

/// Orbits of the group generated by rowmotion and the prime map.
pub fn dihedral_orbits(index: &IdealIndex, kappa: &Involution) -> OrbitDecomposition {
    let fence = index.fence();
    let rho = index.permutation(DynamicsMap::Rowmotion);
    let prime = index.permutation_by(|i| prime_map(fence, kappa, i));
    OrbitDecomposition::from_generators(&[&rho, &prime])
}

fn fail(what: &str, fence: &Fence, ideal: Ideal) -> FenceError {
    FenceError::AssertionFailure(format!("{what} fails on {fence} at ideal {ideal}"))
}

/// Outcome of the exhaustive self-dual checks on one fence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDualReport {
    pub fence: String,
    pub ideals: usize,
    pub rowmotion_orbits: usize,
    pub dihedral_orbits: usize,
    /// Rowmotion orbits that contain the prime of each of their members.
    pub closed_orbits: usize,
}

/// Checks, on every ideal:
/// both maps are involutions producing ideals, `ρ⁻¹(Ī) = (ρ(I))‾`,
/// `ρ⁻¹(I′) = (ρ(I))′ = Ī`, the orbit pairing under the prime map, the
/// union-of-at-most-two structure of dihedral orbits, and that
/// `χ_ℓ − χ_{κ(ℓ)}` sums to zero on every dihedral orbit.
pub fn verify_self_dual(index: &IdealIndex) -> Result<SelfDualReport> {
    let fence = index.fence();
    let kappa = involution_of(fence)?;
    for &i in index.ideals() {
        let bar = ideal_complement(fence, &kappa, i);
        let prime = prime_map(fence, &kappa, i);
        if !fence.is_ideal(bar.0) || ideal_complement(fence, &kappa, bar) != i {
            return Err(fail("ideal complement involution", fence, i));
        }
        if !fence.is_ideal(prime.0) || prime_map(fence, &kappa, prime) != i {
            return Err(fail("prime map involution", fence, i));
        }
        let r = fence.rowmotion(i);
        if fence.rowmotion_inverse(bar) != ideal_complement(fence, &kappa, r) {
            return Err(fail("complement intertwines rowmotion", fence, i));
        }
        let lhs = fence.rowmotion_inverse(prime);
        if lhs != prime_map(fence, &kappa, r) || lhs != bar {
            return Err(fail("prime map intertwines rowmotion", fence, i));
        }
    }

    let rho = index.orbits(DynamicsMap::Rowmotion);
    let mut closed = 0;
    for orbit in rho.orbits() {
        let partner = rho.orbit_of(
            index
                .position(prime_map(fence, &kappa, index.get(orbit[0])))
                .expect("prime of an ideal is an ideal"),
        );
        // every member of the orbit must land in the same partner orbit
        for &k in orbit {
            let p = index.position(prime_map(fence, &kappa, index.get(k))).unwrap();
            if rho.orbit_of(p) != partner {
                return Err(fail("prime map respects orbits", fence, index.get(k)));
            }
        }
        if rho.orbits()[partner].len() != orbit.len() {
            return Err(fail("paired orbits have equal size", fence, index.get(orbit[0])));
        }
        if partner == rho.orbit_of(orbit[0]) {
            closed += 1;
        }
    }

    let dihedral = dihedral_orbits(index, &kappa);
    for d in dihedral.orbits() {
        let mut parts: Vec<usize> = d.iter().map(|&k| rho.orbit_of(k)).collect();
        parts.sort_unstable();
        parts.dedup();
        if parts.len() > 2 {
            return Err(fail("dihedral orbit is a union of at most two orbits", fence, index.get(d[0])));
        }
    }
    for l in 1..=fence.n() {
        let diff = &chi(index, l) - &chi(index, kappa.apply(l));
        for d in dihedral.orbits() {
            if !diff.sum_over(d).is_zero() {
                return Err(fail(&format!("zero sum of chi[{l}] - chi[kappa({l})] on dihedral orbits"), fence, index.get(d[0])));
            }
        }
        for (o, orbit) in rho.orbits().iter().enumerate() {
            let partner = rho.orbit_of(index.position(prime_map(fence, &kappa, index.get(orbit[0]))).unwrap());
            let total = if partner == o {
                diff.sum_over(orbit)
            } else {
                diff.sum_over(orbit) + diff.sum_over(&rho.orbits()[partner])
            };
            if !total.is_zero() {
                return Err(fail(&format!("pairing sum for chi[{l}]"), fence, index.get(orbit[0])));
            }
        }
    }

    Ok(SelfDualReport {
        fence: fence.shape().to_string(),
        ideals: index.len(),
        rowmotion_orbits: rho.len(),
        dihedral_orbits: dihedral.len(),
        closed_orbits: closed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Conjecture {
    /// `χ̂` is `n/2`-mesic on `F(a^t)`, `t` odd.
    #[serde(rename = "C5_1")]
    IdealCardinality,
    /// `Σ χ_peaks − Σ χ_valleys` is 0-mesic on `F(a^t)`, `t` odd.
    #[serde(rename = "C5_2")]
    PeaksMinusValleys,
    /// `χ_{s_i} − χ_{s_{t−i}}` is 0-mesic on `F(a^t)`, `t` odd.
    #[serde(rename = "C5_3")]
    OppositeShared,
    /// Every codimension `0..=t−1` of the toggleability space inside the
    /// homomesy space occurs for some fence with `t` segments.
    #[serde(rename = "C7_2")]
    AllCodimensions,
}

impl Conjecture {
    pub fn id(self) -> &'static str {
        match self {
            Conjecture::IdealCardinality => "C5_1",
            Conjecture::PeaksMinusValleys => "C5_2",
            Conjecture::OppositeShared => "C5_3",
            Conjecture::AllCodimensions => "C7_2",
        }
    }
}

impl std::str::FromStr for Conjecture {
    type Err = FenceError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('.', "_").as_str() {
            "C5_1" => Ok(Conjecture::IdealCardinality),
            "C5_2" => Ok(Conjecture::PeaksMinusValleys),
            "C5_3" => Ok(Conjecture::OppositeShared),
            "C7_2" => Ok(Conjecture::AllCodimensions),
            _ => Err(FenceError::Parse {
                what: "conjecture id",
                input: s.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for Conjecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// An orbit whose average misses the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub orbit: Vec<String>,
    pub average: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatVerdict {
    pub statistic: String,
    pub target: String,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub fence: String,
    pub conjecture: Conjecture,
    pub holds: bool,
    pub orbits: usize,
    pub statistics: Vec<StatVerdict>,
    /// Codimension → number of fences, for the codimension scan.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub codimensions: Option<BTreeMap<usize, usize>>,
}

/// Checks that `f` averages to `target` on every orbit; the first orbit that
/// does not is kept as the witness.
pub fn check_orbit_average(
    index: &IdealIndex,
    orbits: &OrbitDecomposition,
    name: &str,
    f: &StatFn,
    target: &Rational,
) -> StatVerdict {
    let witness = orbits.orbits().iter().find_map(|o| {
        let avg = f.sum_over(o) / rat(o.len() as i64);
        (avg != *target).then(|| Witness {
            orbit: o.iter().map(|&k| index.get(k).to_string()).collect(),
            average: avg.to_string(),
        })
    });
    StatVerdict {
        statistic: name.to_string(),
        target: target.to_string(),
        holds: witness.is_none(),
        witness,
    }
}

fn uniform_statistics(index: &IdealIndex, conj: Conjecture) -> Vec<(String, StatFn, Rational)> {
    let fence = index.fence();
    let t = fence.t();
    match conj {
        Conjecture::IdealCardinality => vec![(
            "chihat".into(),
            ideal_cardinality(index),
            ratio(fence.n() as i64, 2),
        )],
        Conjecture::PeaksMinusValleys => {
            let mut f = StatFn::zero(index.len());
            for p in fence.peaks() {
                f = &f + &chi(index, p);
            }
            for v in fence.valleys() {
                f = &f - &chi(index, v);
            }
            vec![("sum chi[peaks] - sum chi[valleys]".into(), f, rat(0))]
        }
        Conjecture::OppositeShared => (1..t)
            .map(|i| {
                let (a, b) = (fence.shared(i), fence.shared(t - i));
                (
                    format!("chi[s{i}] - chi[s{}]", t - i),
                    &chi(index, a) - &chi(index, b),
                    rat(0),
                )
            })
            .collect(),
        Conjecture::AllCodimensions => Vec::new(),
    }
}

/// Scans one uniform fence `F(a^t)` for the orbit-average conjectures.
pub fn check_uniform_conjecture(conj: Conjecture, a: usize, t: usize) -> Result<ConjectureReport> {
    if conj == Conjecture::AllCodimensions {
        return Err(FenceError::Parse {
            what: "uniform-fence conjecture id",
            input: conj.id().to_string(),
        });
    }
    let fence = Fence::new(FenceShape::uniform(a, t)?)?;
    let index = IdealIndex::new(&fence);
    let orbits = index.orbits(DynamicsMap::Rowmotion);
    let statistics: Vec<StatVerdict> = uniform_statistics(&index, conj)
        .iter()
        .map(|(name, f, target)| check_orbit_average(&index, &orbits, name, f, target))
        .collect();
    Ok(ConjectureReport {
        fence: fence.shape().to_string(),
        conjecture: conj,
        holds: statistics.iter().all(|s| s.holds),
        orbits: orbits.len(),
        statistics,
        codimensions: None,
    })
}

/// Uniform shapes `(a, t)` with `a ≥ 2`, `t ≥ 3` odd and `a + t ≤ max_apt`,
/// ordered by `t` then `a`.
pub fn uniform_range(max_apt: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut t = 3;
    while t + 2 <= max_apt {
        for a in 2..=max_apt - t {
            out.push((a, t));
        }
        t += 2;
    }
    out
}

/// Range for a conjecture scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanRange {
    /// Uniform fences with `a + t` at most this value.
    MaxAPlusT(usize),
    /// All fences with `t` segments and at most `max_n` elements.
    Segments { t: usize, max_n: usize },
}

/// Runs a conjecture over its range; never stops at the first failure.
pub fn scan_conjecture(conj: Conjecture, range: ScanRange) -> Result<Vec<ConjectureReport>> {
    match (conj, range) {
        (Conjecture::AllCodimensions, ScanRange::Segments { t, max_n }) => {
            Ok(vec![scan_codimensions(t, max_n)?])
        }
        (Conjecture::AllCodimensions, ScanRange::MaxAPlusT(_)) => Err(FenceError::Parse {
            what: "range for C7_2 (needs t and max n)",
            input: format!("{range:?}"),
        }),
        (_, ScanRange::MaxAPlusT(m)) => uniform_range(m)
            .into_iter()
            .map(|(a, t)| check_uniform_conjecture(conj, a, t))
            .collect(),
        (_, ScanRange::Segments { .. }) => Err(FenceError::Parse {
            what: "range for uniform-fence conjectures (needs max a+t)",
            input: format!("{range:?}"),
        }),
    }
}

/// `dim I_H − dim I_T` over all fences with `t` segments and `n ≤ max_n`.
pub fn scan_codimensions(t: usize, max_n: usize) -> Result<ConjectureReport> {
    let mut codims: BTreeMap<usize, usize> = BTreeMap::new();
    let mut orbit_total = 0;
    for shape in FenceShape::all_with_segments(t, max_n) {
        let fence = Fence::new(shape)?;
        let index = IdealIndex::new(&fence);
        let orbits = index.orbits(DynamicsMap::Rowmotion);
        orbit_total += orbits.len();
        let ih = homomesy_dim(&index, &orbits, Indicator::Ideal);
        let it = toggleability_dim(&index, Indicator::Ideal);
        *codims.entry(ih - it).or_default() += 1;
    }
    let holds = (0..t).all(|c| codims.contains_key(&c));
    Ok(ConjectureReport {
        fence: format!("t={t}, n<={max_n}"),
        conjecture: Conjecture::AllCodimensions,
        holds,
        orbits: orbit_total,
        statistics: Vec::new(),
        codimensions: Some(codims),
    })
}

/// Empirical check, on a palindromic fence with an odd number of segments,
/// that homomesy of the shared differences or sums forces homomesy of the
/// antichain and ideal families. The shared-element
/// hypothesis is read as `χ_{s_i} − χ_{s_{t−i}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyReport {
    pub fence: String,
    pub shared_differences: bool,
    pub shared_sums: bool,
    pub antichain_family: bool,
    pub ideal_family: bool,
    /// Both implications and the equivalence are consistent with the data.
    pub consistent: bool,
}

pub fn verify_sufficient_conditions(index: &IdealIndex) -> Result<SufficiencyReport> {
    let fence = index.fence();
    let kappa = involution_of(fence)?;
    let (n, t) = (fence.n(), fence.t());
    let orbits = index.orbits(DynamicsMap::Rowmotion);
    let mesic = |f: &StatFn, c: Rational| {
        orbits
            .orbits()
            .iter()
            .all(|o| f.sum_over(o) == &c * rat(o.len() as i64))
    };
    let shared_differences = (1..t).all(|i| {
        mesic(&(&chi(index, fence.shared(i)) - &chi(index, fence.shared(t - i))), rat(0))
    });
    let shared_sums = (1..t).all(|i| {
        mesic(&(&chi_hat(index, fence.shared(i)) + &chi_hat(index, fence.shared(t - i))), rat(1))
    });
    let antichain_family =
        (1..=n).all(|k| mesic(&(&chi(index, k) - &chi(index, kappa.apply(k))), rat(0)));
    let ideal_family =
        (1..=n).all(|k| mesic(&(&chi_hat(index, k) + &chi_hat(index, kappa.apply(k))), rat(1)));
    let both = antichain_family && ideal_family;
    let consistent = (!shared_differences || both)
        && (!shared_sums || both)
        && antichain_family == ideal_family;
    Ok(SufficiencyReport {
        fence: fence.shape().to_string(),
        shared_differences,
        shared_sums,
        antichain_family,
        ideal_family,
        consistent,
    })
}
