//! Statistics on `J(F)` as exact rational vectors indexed by [`IdealIndex`]
//! position.
//!
//! Statistics indexed by an element that does not exist (a missing peak or
//! valley, a rank past the end of a segment) are the zero function.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FenceError, Result};
use crate::fence::{bit, ones, ElementClass, Fence};
use crate::ideals::{write_set, Ideal, IdealIndex};
use crate::linalg::{rat, to_i64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatFn {
    values: Vec<Rational>,
}

impl StatFn {
    pub fn zero(len: usize) -> Self {
        StatFn {
            values: vec![Rational::zero(); len],
        }
    }

    pub fn constant(len: usize, c: Rational) -> Self {
        StatFn {
            values: vec![c; len],
        }
    }

    pub fn from_values(values: Vec<Rational>) -> Self {
        StatFn { values }
    }

    pub fn from_ints(values: impl IntoIterator<Item = i64>) -> Self {
        StatFn {
            values: values.into_iter().map(rat).collect(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, k: &Rational) -> StatFn {
        StatFn {
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &StatFn, k: &Rational) {
        assert_eq!(self.len(), other.len(), "statistics on different fences");
        if k.is_zero() {
            return;
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            if !b.is_zero() {
                *a += b * k;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Sum over a set of positions.
    pub fn sum_over(&self, positions: &[usize]) -> Rational {
        positions
            .iter()
            .fold(Rational::zero(), |acc, &p| acc + &self.values[p])
    }
}

impl Add for &StatFn {
    type Output = StatFn;

    fn add(self, rhs: &StatFn) -> StatFn {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &StatFn {
    type Output = StatFn;

    fn sub(self, rhs: &StatFn) -> StatFn {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &StatFn {
    type Output = StatFn;

    fn neg(self) -> StatFn {
        self.scale(&-Rational::one())
    }
}

fn exists(fence: &Fence, p: Option<usize>) -> Option<usize> {
    p.filter(|&p| p >= 1 && p <= fence.n())
}

fn tabulate(index: &IdealIndex, f: impl Fn(Ideal) -> i64) -> StatFn {
    StatFn::from_ints(index.ideals().iter().map(|&i| f(i)))
}

pub(crate) fn chi_hat_value(ideal: Ideal, p: usize) -> i64 {
    i64::from(ideal.contains(p))
}

pub(crate) fn chi_value(fence: &Fence, ideal: Ideal, p: usize) -> i64 {
    i64::from(ideal.contains(p) && fence.upper_mask(p) & ideal.0 == 0)
}

pub(crate) fn togg_plus_value(fence: &Fence, ideal: Ideal, p: usize) -> i64 {
    i64::from(!ideal.contains(p) && fence.lower_mask(p) & !ideal.0 == 0)
}

pub(crate) fn togg_value(fence: &Fence, ideal: Ideal, p: usize) -> i64 {
    togg_plus_value(fence, ideal, p) - chi_value(fence, ideal, p)
}

/// Order ideal indicator `χ̂_p`.
pub fn chi_hat(index: &IdealIndex, p: impl Into<Option<usize>>) -> StatFn {
    match exists(index.fence(), p.into()) {
        Some(p) => tabulate(index, |i| chi_hat_value(i, p)),
        None => StatFn::zero(index.len()),
    }
}

/// Antichain indicator `χ_p`: `1` when `p ∈ max(I)`.
pub fn chi(index: &IdealIndex, p: impl Into<Option<usize>>) -> StatFn {
    let fence = index.fence();
    match exists(fence, p.into()) {
        Some(p) => tabulate(index, |i| chi_value(fence, i, p)),
        None => StatFn::zero(index.len()),
    }
}

/// `T_p⁺`: `1` when `p` can be toggled in.
pub fn togg_plus(index: &IdealIndex, p: impl Into<Option<usize>>) -> StatFn {
    let fence = index.fence();
    match exists(fence, p.into()) {
        Some(p) => tabulate(index, |i| togg_plus_value(fence, i, p)),
        None => StatFn::zero(index.len()),
    }
}

/// `T_p⁻`, identical to `χ_p`.
pub fn togg_minus(index: &IdealIndex, p: impl Into<Option<usize>>) -> StatFn {
    chi(index, p)
}

/// Toggleability `T_p = T_p⁺ − T_p⁻`.
pub fn togg(index: &IdealIndex, p: impl Into<Option<usize>>) -> StatFn {
    let fence = index.fence();
    match exists(fence, p.into()) {
        Some(p) => tabulate(index, |i| togg_value(fence, i, p)),
        None => StatFn::zero(index.len()),
    }
}

/// `χ̂ = #I`.
pub fn ideal_cardinality(index: &IdealIndex) -> StatFn {
    tabulate(index, |i| i.len() as i64)
}

/// `χ = #max(I)`.
pub fn antichain_cardinality(index: &IdealIndex) -> StatFn {
    let fence = index.fence();
    tabulate(index, |i| fence.maximal(i).count_ones() as i64)
}

/// A set of pairwise incomparable elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antichain(pub u64);

impl Antichain {
    pub fn new(fence: &Fence, elements: &[usize]) -> Result<Self> {
        let mask = elements.iter().fold(0, |m, &k| m | bit(k));
        let a = Antichain(mask);
        for &k in elements {
            fence.check(k)?;
        }
        if !is_antichain(fence, mask) {
            return Err(FenceError::NotAntichain(a.to_string()));
        }
        Ok(a)
    }

    pub fn elements(self) -> Vec<usize> {
        ones(self.0).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, self.0)
    }
}

pub fn is_antichain(fence: &Fence, mask: u64) -> bool {
    ones(mask).all(|k| (fence.down_mask(k) | fence.up_mask(k)) & mask == bit(k))
}

/// All antichains (the empty one included), ascending as bit patterns.
pub fn enumerate_antichains(index: &IdealIndex) -> Vec<Antichain> {
    let fence = index.fence();
    let mut out: Vec<Antichain> = index
        .ideals()
        .iter()
        .map(|&i| Antichain(fence.maximal(i)))
        .collect();
    out.sort_unstable();
    out
}

/// `T_A`: `+1` when `A ⊆ min(F∖I)`, `−1` when `A ⊆ max(I)`.
pub fn togg_antichain(index: &IdealIndex, a: Antichain) -> Result<StatFn> {
    let fence = index.fence();
    if a.is_empty() {
        return Err(FenceError::EmptyAntichain);
    }
    if a.0 & !fence.full_mask() != 0 || !is_antichain(fence, a.0) {
        return Err(FenceError::NotAntichain(a.to_string()));
    }
    Ok(tabulate(index, |i| togg_antichain_value(fence, i, a)))
}

pub(crate) fn togg_antichain_value(fence: &Fence, ideal: Ideal, a: Antichain) -> i64 {
    if fence.minimal_outside(ideal) & a.0 == a.0 {
        1
    } else if fence.maximal(ideal) & a.0 == a.0 {
        -1
    } else {
        0
    }
}

/// `c + Σ a_p χ̂_p + Σ b_p χ_p + Σ c_p T_p`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatExpr {
    pub ideal: BTreeMap<usize, Rational>,
    pub antichain: BTreeMap<usize, Rational>,
    pub toggle: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

fn bump(map: &mut BTreeMap<usize, Rational>, key: Option<usize>, k: Rational) {
    let Some(key) = key else { return };
    let entry = map.entry(key).or_insert_with(Rational::zero);
    *entry += k;
    if entry.is_zero() {
        map.remove(&key);
    }
}

impl StatExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        StatExpr {
            constant: c,
            ..Self::default()
        }
    }

    /// Missing elements (`None`) contribute nothing.
    pub fn with_ideal(mut self, p: impl Into<Option<usize>>, k: Rational) -> Self {
        bump(&mut self.ideal, p.into(), k);
        self
    }

    pub fn with_antichain(mut self, p: impl Into<Option<usize>>, k: Rational) -> Self {
        bump(&mut self.antichain, p.into(), k);
        self
    }

    pub fn with_toggle(mut self, p: impl Into<Option<usize>>, k: Rational) -> Self {
        bump(&mut self.toggle, p.into(), k);
        self
    }

    pub fn add_scaled(&mut self, other: &StatExpr, k: &Rational) {
        for (map, src) in [
            (&mut self.ideal, &other.ideal),
            (&mut self.antichain, &other.antichain),
            (&mut self.toggle, &other.toggle),
        ] {
            for (&p, v) in src {
                bump(map, Some(p), v * k);
            }
        }
        self.constant += &other.constant * k;
    }

    pub fn evaluate(&self, index: &IdealIndex) -> StatFn {
        if let Some(int) = IntExpr::from_expr(self) {
            let fence = index.fence();
            return tabulate(index, |i| int.value(fence, i));
        }
        let mut out = StatFn::constant(index.len(), self.constant.clone());
        for (&p, k) in &self.ideal {
            out.add_scaled(&chi_hat(index, p), k);
        }
        for (&p, k) in &self.antichain {
            out.add_scaled(&chi(index, p), k);
        }
        for (&p, k) in &self.toggle {
            out.add_scaled(&togg(index, p), k);
        }
        out
    }

    /// Replaces every `χ_y` by its expression in ideal indicators.
    pub fn antichains_to_ideals(&self, fence: &Fence) -> StatExpr {
        let mut out = StatExpr {
            antichain: BTreeMap::new(),
            ..self.clone()
        };
        for (&p, k) in &self.antichain {
            out.add_scaled(&dict_ac_to_oic(fence, p), k);
        }
        out
    }

    /// Replaces every `χ̂_y` by its expression in antichain indicators.
    pub fn ideals_to_antichains(&self, fence: &Fence) -> StatExpr {
        let mut out = StatExpr {
            ideal: BTreeMap::new(),
            ..self.clone()
        };
        for (&p, k) in &self.ideal {
            out.add_scaled(&dict_oic_to_ac(fence, p), k);
        }
        out
    }
}

/// Integer-coefficient form of a [`StatExpr`] for fast pointwise evaluation.
pub(crate) struct IntExpr {
    ideal: Vec<(usize, i64)>,
    antichain: Vec<(usize, i64)>,
    toggle: Vec<(usize, i64)>,
    constant: i64,
}

impl IntExpr {
    pub(crate) fn from_expr(e: &StatExpr) -> Option<Self> {
        let conv = |m: &BTreeMap<usize, Rational>| -> Option<Vec<(usize, i64)>> {
            m.iter().map(|(&p, k)| to_i64(k).map(|k| (p, k))).collect()
        };
        Some(IntExpr {
            ideal: conv(&e.ideal)?,
            antichain: conv(&e.antichain)?,
            toggle: conv(&e.toggle)?,
            constant: to_i64(&e.constant)?,
        })
    }

    pub(crate) fn value(&self, fence: &Fence, ideal: Ideal) -> i64 {
        let n = fence.n();
        let mut v = self.constant;
        for &(p, k) in &self.ideal {
            if p <= n {
                v += k * chi_hat_value(ideal, p);
            }
        }
        for &(p, k) in &self.antichain {
            if p <= n {
                v += k * chi_value(fence, ideal, p);
            }
        }
        for &(p, k) in &self.toggle {
            if p <= n {
                v += k * togg_value(fence, ideal, p);
            }
        }
        v
    }
}

/// `χ̂_p` written with antichain indicators, toggles and a constant.
pub fn dict_oic_to_ac(fence: &Fence, p: usize) -> StatExpr {
    let one = Rational::one();
    match fence.classes()[p - 1] {
        ElementClass::Peak => StatExpr::new().with_antichain(p, one),
        ElementClass::Unshared { .. } => ones(fence.up_mask(p))
            .fold(StatExpr::new(), |e, y| e.with_antichain(y, one.clone())),
        ElementClass::Valley => StatExpr::constant(one.clone())
            .with_toggle(p, -one.clone())
            .with_antichain(p, -one),
    }
}

/// `χ_p` written with ideal indicators, toggles and a constant.
pub fn dict_ac_to_oic(fence: &Fence, p: usize) -> StatExpr {
    let one = Rational::one();
    match fence.classes()[p - 1] {
        ElementClass::Peak => StatExpr::new().with_ideal(p, one),
        ElementClass::Unshared { .. } => {
            // an unshared element has at most one upper cover
            let above = ones(fence.upper_mask(p)).next();
            StatExpr::new()
                .with_ideal(p, one.clone())
                .with_ideal(above, -one)
        }
        ElementClass::Valley => StatExpr::constant(one.clone())
            .with_toggle(p, -one.clone())
            .with_ideal(p, -one),
    }
}

#[derive(Serialize, Deserialize)]
struct StatExprRepr {
    ideal: BTreeMap<String, String>,
    antichain: BTreeMap<String, String>,
    #[serde(rename = "const")]
    constant: String,
    toggle: BTreeMap<String, String>,
}

fn to_repr(map: &BTreeMap<usize, Rational>) -> BTreeMap<String, String> {
    map.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn from_repr(map: BTreeMap<String, String>) -> std::result::Result<BTreeMap<usize, Rational>, String> {
    map.into_iter()
        .map(|(k, v)| {
            let key = k.parse::<usize>().map_err(|e| format!("key {k:?}: {e}"))?;
            let val = v.parse::<Rational>().map_err(|e| format!("value {v:?}: {e}"))?;
            Ok((key, val))
        })
        .filter(|r| r.as_ref().map_or(true, |(_, v)| !v.is_zero()))
        .collect()
}

impl Serialize for StatExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StatExprRepr {
            ideal: to_repr(&self.ideal),
            antichain: to_repr(&self.antichain),
            constant: self.constant.to_string(),
            toggle: to_repr(&self.toggle),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StatExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = StatExprRepr::deserialize(d)?;
        Ok(StatExpr {
            ideal: from_repr(repr.ideal).map_err(D::Error::custom)?,
            antichain: from_repr(repr.antichain).map_err(D::Error::custom)?,
            toggle: from_repr(repr.toggle).map_err(D::Error::custom)?,
            constant: repr.constant.parse().map_err(|e| D::Error::custom(format!("{e}")))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fence::FenceShape;
    use crate::ideals::DynamicsMap;
    use crate::linalg::ratio;
    use proptest::prelude::*;

    fn index(parts: &[usize]) -> IdealIndex {
        IdealIndex::new(&Fence::new(FenceShape::new(parts.to_vec()).unwrap()).unwrap())
    }

    fn at(index: &IdealIndex, f: &StatFn, elements: &[usize]) -> Rational {
        let pos = index.position(Ideal::from_elements(elements)).unwrap();
        f.values()[pos].clone()
    }

    #[test]
    fn worked_example_values() {
        let idx = index(&[3, 3, 2]);
        let i = [1, 2, 5, 6];
        assert_eq!(at(&idx, &ideal_cardinality(&idx), &i), rat(4));
        assert_eq!(at(&idx, &antichain_cardinality(&idx), &i), rat(2));
        assert_eq!(
            idx.fence().maximal(Ideal::from_elements(&i)),
            Ideal::from_elements(&[2, 5]).0
        );
        let expect = [0, -1, 0, 1, -1, 0, 1];
        for p in 1..=7 {
            assert_eq!(at(&idx, &togg(&idx, p), &i), rat(expect[p - 1]), "T_{p}");
        }
    }

    #[test]
    fn indicators_on_extremes() {
        let idx = index(&[3, 3, 2]);
        let full: Vec<usize> = (1..=7).collect();
        for p in 1..=7 {
            assert_eq!(at(&idx, &chi_hat(&idx, p), &[]), rat(0));
            assert_eq!(at(&idx, &chi_hat(&idx, p), &full), rat(1));
            assert_eq!(at(&idx, &chi(&idx, p), &[]), rat(0));
            let minimal = idx.fence().lower_mask(p) == 0;
            assert_eq!(at(&idx, &togg(&idx, p), &[]), rat(i64::from(minimal)));
        }
        assert!(chi_hat(&idx, None).is_zero());
        assert!(togg(&idx, 9).is_zero());
    }

    #[test]
    fn antichain_cardinality_is_sum_of_indicators() {
        let idx = index(&[2, 3, 2]);
        let mut sum = StatFn::zero(idx.len());
        for p in 1..=idx.fence().n() {
            sum = &sum + &chi(&idx, p);
        }
        assert_eq!(sum, antichain_cardinality(&idx));
    }

    #[test]
    fn togg_splits_into_plus_and_minus() {
        let idx = index(&[3, 2, 3]);
        for p in 1..=idx.fence().n() {
            assert_eq!(togg(&idx, p), &togg_plus(&idx, p) - &togg_minus(&idx, p));
            assert_eq!(togg_minus(&idx, p), chi(&idx, p));
        }
    }

    #[test]
    fn toggleability_sums_to_zero_on_orbits() {
        let idx = index(&[3, 3, 2]);
        let orbits = idx.orbits(DynamicsMap::Rowmotion);
        for p in 1..=7 {
            let t = togg(&idx, p);
            for o in orbits.orbits() {
                assert!(t.sum_over(o).is_zero());
            }
        }
    }

    #[test]
    fn plus_equals_minus_after_rowmotion() {
        let idx = index(&[2, 3, 1, 3]);
        let f = idx.fence();
        for &i in idx.ideals() {
            let r = f.rowmotion(i);
            for p in 1..=f.n() {
                assert_eq!(togg_plus_value(f, i, p), chi_value(f, r, p));
            }
        }
    }

    #[test]
    fn antichains_of_smallest_fence() {
        let idx = index(&[2, 2]);
        let got: Vec<Vec<usize>> = enumerate_antichains(&idx).iter().map(|a| a.elements()).collect();
        // brute force over all subsets
        let f = idx.fence();
        let mut brute: Vec<u64> = (0u64..8).filter(|&m| is_antichain(f, m)).collect();
        brute.sort();
        assert_eq!(
            got,
            brute.iter().map(|&m| ones(m).collect::<Vec<_>>()).collect::<Vec<_>>()
        );
        assert_eq!(got, vec![vec![], vec![1], vec![2], vec![3], vec![1, 3]]);
    }

    #[test]
    fn antichain_toggle_examples() {
        let idx = index(&[3, 3, 3]);
        let a = Antichain::new(idx.fence(), &[1, 6]).unwrap();
        assert_eq!(at(&idx, &togg_antichain(&idx, a).unwrap(), &[]), rat(1));

        let idx = index(&[3, 3, 2]);
        let f = idx.fence();
        let a = Antichain::new(f, &[2, 4]).unwrap();
        let i = Ideal::from_elements(&[1, 2, 4, 5, 6]);
        // brute evaluation from the definition
        let max: Vec<usize> = ones(f.maximal(i)).collect();
        let min_out: Vec<usize> = ones(f.minimal_outside(i)).collect();
        let expect = if [2, 4].iter().all(|x| min_out.contains(x)) {
            1
        } else if [2, 4].iter().all(|x| max.contains(x)) {
            -1
        } else {
            0
        };
        assert_eq!(max, vec![2, 4]);
        assert_eq!(expect, -1);
        assert_eq!(at(&idx, &togg_antichain(&idx, a).unwrap(), &[1, 2, 4, 5, 6]), rat(expect));

        assert!(matches!(
            Antichain::new(f, &[1, 2]),
            Err(FenceError::NotAntichain(_))
        ));
        assert!(matches!(
            togg_antichain(&idx, Antichain(0)),
            Err(FenceError::EmptyAntichain)
        ));
    }

    #[test]
    fn singleton_antichain_toggle_is_toggle() {
        let idx = index(&[2, 3, 2]);
        for p in 1..=idx.fence().n() {
            let a = Antichain::new(idx.fence(), &[p]).unwrap();
            assert_eq!(togg_antichain(&idx, a).unwrap(), togg(&idx, p));
        }
    }

    #[test]
    fn dictionary_examples() {
        let idx = index(&[2, 2, 2]);
        let f = idx.fence();
        // peak
        assert_eq!(dict_oic_to_ac(f, 2), StatExpr::new().with_antichain(2, rat(1)));
        // unshared x1 lies below x2 only
        assert_eq!(
            dict_oic_to_ac(f, 1),
            StatExpr::new().with_antichain(1, rat(1)).with_antichain(2, rat(1))
        );
        // valley x4, compared componentwise
        let valley = dict_oic_to_ac(f, 4).evaluate(&idx);
        let direct = &(&StatFn::constant(idx.len(), rat(1)) - &togg(&idx, 4)) - &chi(&idx, 4);
        assert_eq!(valley, direct);
        for p in 1..=f.n() {
            assert_eq!(dict_oic_to_ac(f, p).evaluate(&idx), chi_hat(&idx, p));
            assert_eq!(dict_ac_to_oic(f, p).evaluate(&idx), chi(&idx, p));
        }
    }

    #[test]
    fn dictionary_directions_invert() {
        for parts in [&[2, 2, 2][..], &[3, 1, 4], &[4, 2, 3, 2]] {
            let idx = index(parts);
            let f = idx.fence();
            for p in 1..=f.n() {
                let back = dict_oic_to_ac(f, p).antichains_to_ideals(f);
                assert_eq!(back, StatExpr::new().with_ideal(p, rat(1)));
                assert_eq!(back.evaluate(&idx), chi_hat(&idx, p));
            }
        }
    }

    #[test]
    fn stat_expr_json_shape() {
        let e = StatExpr::constant(rat(0)).with_ideal(3, ratio(1, 2)).with_toggle(1, rat(-2));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"ideal":{"3":"1/2"},"antichain":{},"const":"0","toggle":{"1":"-2"}}"#
        );
    }

    proptest! {
        #[test]
        fn stat_expr_json_round_trip(
            entries in prop::collection::vec((1usize..10, -5i64..5, 1i64..5, 0usize..3), 0..8),
            c in -5i64..5,
        ) {
            let mut e = StatExpr::constant(rat(c));
            for (p, num, den, kind) in entries {
                let k = ratio(num, den);
                e = match kind {
                    0 => e.with_ideal(p, k),
                    1 => e.with_antichain(p, k),
                    _ => e.with_toggle(p, k),
                };
            }
            let back: StatExpr = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
            prop_assert_eq!(back, e);
        }
    }
}
