//! Toggleability and homomesy spaces: the `≡ const` solver, explicit bases
//! with toggle certificates, and the four space dimensions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{FenceError, Result};
use crate::fence::{Fence, FenceShape};
use crate::ideals::{DynamicsMap, IdealIndex, OrbitDecomposition};
use crate::linalg::{integer_rank, integer_rank_of_columns, rat, ratio, solve, RatMatrix, Rational};
use crate::stats::{
    chi, chi_hat, chi_hat_value, chi_value, enumerate_antichains, ideal_cardinality,
    togg, togg_antichain_value, togg_value, Antichain, IntExpr, StatExpr, StatFn,
};

/// `f = c + Σ c_p T_p`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EquivCertificate {
    pub constant: Rational,
    pub toggles: BTreeMap<usize, Rational>,
}

impl EquivCertificate {
    pub fn to_expr(&self) -> StatExpr {
        self.toggles
            .iter()
            .fold(StatExpr::constant(self.constant.clone()), |e, (&p, k)| {
                e.with_toggle(p, k.clone())
            })
    }

    pub fn evaluate(&self, index: &IdealIndex) -> StatFn {
        self.to_expr().evaluate(index)
    }

    pub fn holds_for(&self, index: &IdealIndex, f: &StatFn) -> bool {
        &self.evaluate(index) == f
    }

    fn add(&mut self, p: Option<usize>, k: Rational) {
        let Some(p) = p else { return };
        if k.is_zero() {
            return;
        }
        let e = self.toggles.entry(p).or_insert_with(Rational::zero);
        *e += k;
        if e.is_zero() {
            self.toggles.remove(&p);
        }
    }
}

impl Serialize for EquivCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_expr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EquivCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let e = StatExpr::deserialize(d)?;
        if !e.ideal.is_empty() || !e.antichain.is_empty() {
            return Err(D::Error::custom("certificate may only contain toggles and a constant"));
        }
        Ok(EquivCertificate {
            constant: e.constant,
            toggles: e.toggle,
        })
    }
}

/// Solves `f = c + Σ c_p T_p` exactly; `None` when `f` is not `≡` a constant.
pub fn equiv_const_solve(index: &IdealIndex, f: &StatFn) -> Option<EquivCertificate> {
    let n = index.fence().n();
    let mut columns = vec![StatFn::constant(index.len(), Rational::one()).values().to_vec()];
    for p in 1..=n {
        columns.push(togg(index, p).values().to_vec());
    }
    let m = RatMatrix::from_columns(&columns).expect("columns share a length");
    let x = solve(&m, f.values()).expect("dimensions agree")?;
    let mut cert = EquivCertificate {
        constant: x[0].clone(),
        toggles: BTreeMap::new(),
    };
    for (p, k) in x.into_iter().enumerate().skip(1) {
        cert.add(Some(p), k);
    }
    Some(cert)
}

/// A basis statistic together with its toggle expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub statistic: StatExpr,
    pub certificate: EquivCertificate,
}

/// `α_i χ_x + χ_v + χ_p ≡ 1` for every unshared `x = s_(i,j)`.
pub fn antichain_basis(fence: &Fence) -> Vec<BasisElement> {
    let mut out = Vec::new();
    for seg in fence.segments() {
        let alpha = seg.alpha() as i64;
        let beta = seg.unshared.len() as i64;
        for (j0, &x) in seg.unshared.iter().enumerate() {
            let j = j0 as i64 + 1;
            let statistic = StatExpr::new()
                .with_antichain(x, rat(alpha))
                .with_antichain(seg.valley, rat(1))
                .with_antichain(seg.peak, rat(1));
            let mut cert = EquivCertificate {
                constant: rat(1),
                toggles: BTreeMap::new(),
            };
            cert.add(seg.valley, rat(-1));
            for (k0, &u) in seg.unshared.iter().enumerate() {
                let k = k0 as i64 + 1;
                let c = if k <= j { -k } else { beta - k + 1 };
                cert.add(Some(u), rat(c));
            }
            out.push(BasisElement {
                label: format!("{alpha}*chi[{x}] + chi[valley S{}] + chi[peak S{}]", seg.number, seg.number),
                statistic,
                certificate: cert,
            });
        }
    }
    out
}

/// `α_i χ̂_(i,j) − j χ̂_p − (α_i − j) χ̂_v ≡ 𝟙(no valley)(α_i − j)`.
pub fn ideal_basis(fence: &Fence) -> Vec<BasisElement> {
    let mut out = Vec::new();
    for seg in fence.segments() {
        let alpha = seg.alpha() as i64;
        let beta = seg.unshared.len() as i64;
        for (j0, &x) in seg.unshared.iter().enumerate() {
            let j = j0 as i64 + 1;
            let statistic = StatExpr::new()
                .with_ideal(x, rat(alpha))
                .with_ideal(seg.peak, rat(-j))
                .with_ideal(seg.valley, rat(-(alpha - j)));
            let constant = if seg.valley.is_none() { alpha - j } else { 0 };
            let mut cert = EquivCertificate {
                constant: rat(constant),
                toggles: BTreeMap::new(),
            };
            for (k0, &u) in seg.unshared.iter().enumerate() {
                let k = k0 as i64 + 1;
                let c = if k <= j { -(alpha - j) * k } else { -j * (beta - k + 1) };
                cert.add(Some(u), rat(c));
            }
            out.push(BasisElement {
                label: format!("{alpha}*chihat[{x}] - {j}*chihat[peak S{}] - {}*chihat[valley S{}]", seg.number, alpha - j, seg.number),
                statistic,
                certificate: cert,
            });
        }
    }
    out
}

/// Checks every certificate pointwise on `J(F)`.
pub fn verify_basis(index: &IdealIndex, basis: &[BasisElement]) -> Result<()> {
    let fence = index.fence();
    for b in basis {
        let cert = b.certificate.to_expr();
        let lhs = IntExpr::from_expr(&b.statistic);
        let rhs = IntExpr::from_expr(&cert);
        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
            for &i in index.ideals() {
                if lhs.value(fence, i) != rhs.value(fence, i) {
                    return Err(FenceError::CertificateMismatch {
                        label: b.label.clone(),
                        ideal: i.to_string(),
                    });
                }
            }
        } else {
            let l = b.statistic.evaluate(index);
            let r = cert.evaluate(index);
            if let Some(pos) = (0..index.len()).find(|&k| l.values()[k] != r.values()[k]) {
                return Err(FenceError::CertificateMismatch {
                    label: b.label.clone(),
                    ideal: index.get(pos).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Which family of indicator statistics spans a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indicator {
    Ideal,
    Antichain,
}

fn indicator_value(fence: &Fence, kind: Indicator, ideal: crate::ideals::Ideal, p: usize) -> i64 {
    match kind {
        Indicator::Ideal => chi_hat_value(ideal, p),
        Indicator::Antichain => chi_value(fence, ideal, p),
    }
}

/// `dim(span{indicators} ∩ (span{T_p} + span{𝟙}))` by direct rank computation.
pub fn toggleability_dim(index: &IdealIndex, kind: Indicator) -> usize {
    let fence = index.fence();
    let n = fence.n();
    let rows: Vec<Vec<i64>> = index
        .ideals()
        .iter()
        .map(|&i| {
            let mut row = Vec::with_capacity(2 * n + 1);
            row.extend((1..=n).map(|p| indicator_value(fence, kind, i, p)));
            row.extend((1..=n).map(|p| togg_value(fence, i, p)));
            row.push(1);
            row
        })
        .collect();
    let u: Vec<usize> = (0..n).collect();
    let w: Vec<usize> = (n..=2 * n).collect();
    let rank_u = integer_rank_of_columns(&rows, &u);
    let rank_w = integer_rank_of_columns(&rows, &w);
    let rank_sum = integer_rank(&rows);
    rank_u + rank_w - rank_sum
}

/// Dimension of the coefficient vectors whose indicator combination has
/// equal averages on every orbit.
pub fn homomesy_dim(index: &IdealIndex, orbits: &OrbitDecomposition, kind: Indicator) -> usize {
    let fence = index.fence();
    let n = fence.n();
    let sums: Vec<Vec<i64>> = orbits
        .orbits()
        .iter()
        .map(|o| {
            (1..=n)
                .map(|p| o.iter().map(|&k| indicator_value(fence, kind, index.get(k), p)).sum())
                .collect()
        })
        .collect();
    let Some((first, rest)) = sums.split_first() else {
        return n;
    };
    let len0 = orbits.orbits()[0].len() as i64;
    let rows: Vec<Vec<i64>> = rest
        .iter()
        .zip(&orbits.orbits()[1..])
        .map(|(s, o)| {
            let len = o.len() as i64;
            (0..n).map(|p| len0 * s[p] - len * first[p]).collect()
        })
        .collect();
    n - integer_rank(&rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceReport {
    pub fence: String,
    pub n: usize,
    pub t: usize,
    pub ideals: usize,
    pub orbits: usize,
    pub dim_it: usize,
    pub dim_at: usize,
    pub dim_ih: usize,
    pub dim_ah: usize,
    /// `n − (t − 1)`.
    pub formula_dim: usize,
    pub antichain_basis_verified: Option<bool>,
    pub ideal_basis_verified: Option<bool>,
}

impl SpaceReport {
    pub fn single_orbit(&self) -> bool {
        self.orbits == 1
    }

    pub fn ih_equals_it(&self) -> bool {
        self.dim_ih == self.dim_it
    }

    pub fn formula_agrees(&self) -> bool {
        self.dim_it == self.formula_dim && self.dim_at == self.formula_dim
    }
}

pub fn space_dims(index: &IdealIndex, verify_bases: bool) -> SpaceReport {
    let fence = index.fence();
    let orbits = index.orbits(DynamicsMap::Rowmotion);
    let check = |basis: Vec<BasisElement>| verify_bases.then(|| verify_basis(index, &basis).is_ok());
    SpaceReport {
        fence: fence.shape().to_string(),
        n: fence.n(),
        t: fence.t(),
        ideals: index.len(),
        orbits: orbits.len(),
        dim_it: toggleability_dim(index, Indicator::Ideal),
        dim_at: toggleability_dim(index, Indicator::Antichain),
        dim_ih: homomesy_dim(index, &orbits, Indicator::Ideal),
        dim_ah: homomesy_dim(index, &orbits, Indicator::Antichain),
        formula_dim: fence.n() + 1 - fence.t(),
        antichain_basis_verified: check(antichain_basis(fence)),
        ideal_basis_verified: check(ideal_basis(fence)),
    }
}

/// Exact average of `f` on each orbit.
pub fn orbit_averages(f: &StatFn, orbits: &OrbitDecomposition) -> Vec<Rational> {
    orbits
        .orbits()
        .iter()
        .map(|o| f.sum_over(o) / rat(o.len() as i64))
        .collect()
}

/// The common orbit average, if `f` is homomesic.
pub fn homomesy_constant(f: &StatFn, orbits: &OrbitDecomposition) -> Option<Rational> {
    let avgs = orbit_averages(f, orbits);
    let first = avgs.first()?.clone();
    avgs.iter().all(|a| *a == first).then_some(first)
}

/// `f = c + Σ_A c_A T_A`; one valid expression, the coefficients are not
/// canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntichainExpression {
    pub constant: Rational,
    pub coefficients: BTreeMap<Antichain, Rational>,
}

fn antichain_toggle_rows(index: &IdealIndex) -> (Vec<Antichain>, Vec<Vec<i64>>) {
    let fence = index.fence();
    let antichains: Vec<Antichain> = enumerate_antichains(index)
        .into_iter()
        .filter(|a| !a.is_empty())
        .collect();
    let rows = index
        .ideals()
        .iter()
        .map(|&i| antichains.iter().map(|&a| togg_antichain_value(fence, i, a)).collect())
        .collect();
    (antichains, rows)
}

pub fn express_in_antichain_toggle_span(
    index: &IdealIndex,
    f: &StatFn,
) -> Option<AntichainExpression> {
    let (antichains, rows) = antichain_toggle_rows(index);
    let m = RatMatrix::from_rows(
        rows.into_iter()
            .map(|r| std::iter::once(Rational::one()).chain(r.into_iter().map(rat)).collect())
            .collect(),
    )
    .expect("rows share a length");
    let x = solve(&m, f.values()).expect("dimensions agree")?;
    let coefficients = antichains
        .into_iter()
        .zip(x.iter().skip(1))
        .filter(|(_, k)| !k.is_zero())
        .map(|(a, k)| (a, k.clone()))
        .collect();
    Some(AntichainExpression {
        constant: x[0].clone(),
        coefficients,
    })
}

impl AntichainExpression {
    pub fn evaluate(&self, index: &IdealIndex) -> StatFn {
        let fence = index.fence();
        StatFn::from_values(
            index
                .ideals()
                .iter()
                .map(|&i| {
                    self.coefficients.iter().fold(self.constant.clone(), |acc, (&a, k)| {
                        acc + k * rat(togg_antichain_value(fence, i, a))
                    })
                })
                .collect(),
        )
    }
}

/// `dim span{T_A : A ≠ ∅}`.
pub fn antichain_toggle_rank(index: &IdealIndex) -> usize {
    integer_rank(&antichain_toggle_rows(index).1)
}

/// The antichain-toggle combination equal to `χ_a − χ_{2a}` on `F(a,a,a)`.
pub fn peak_valley_antichain_combination(a: usize) -> Vec<(Vec<usize>, i64)> {
    let ai = a as i64;
    let mut terms: Vec<(Vec<usize>, i64)> = Vec::new();
    for i in 1..=a {
        terms.push((vec![i], -(i as i64)));
    }
    terms.push((vec![2 * a], -(ai - 1)));
    for i in 1..a {
        terms.push((vec![3 * a - i], -(i as i64)));
    }
    for i in 1..a {
        for j in 0..=i {
            terms.push((vec![i, 2 * a + j], ai));
        }
    }
    for j in 1..a {
        terms.push((vec![a, 2 * a + j], ai));
    }
    for i in 1..a {
        terms.push((vec![i, 2 * a - i, 2 * a + i], -ai));
    }
    terms
}

/// Checks `χ_a − χ_{2a} = Σ c_A T_A` on every ideal of `F(a,a,a)`, for the
/// given combination.
pub fn verify_antichain_combination(
    index: &IdealIndex,
    lhs: &StatExpr,
    terms: &[(Vec<usize>, i64)],
) -> Result<bool> {
    let fence = index.fence();
    let resolved = terms
        .iter()
        .map(|(els, k)| Antichain::new(fence, els).map(|a| (a, *k)))
        .collect::<Result<Vec<_>>>()?;
    let lhs = lhs.evaluate(index);
    Ok(index.ideals().iter().zip(lhs.values()).all(|(&i, l)| {
        let r: i64 = resolved.iter().map(|&(a, k)| k * togg_antichain_value(fence, i, a)).sum();
        *l == rat(r)
    }))
}

pub fn verify_peak_valley_antichain_identity(a: usize) -> Result<bool> {
    if a < 2 {
        return Err(FenceError::ShapeInvalid {
            shape: vec![a, a, a],
            reason: "segment length must be at least 2".into(),
        });
    }
    let fence = Fence::new(FenceShape::uniform(a, 3)?)?;
    let index = IdealIndex::new(&fence);
    let lhs = StatExpr::new().with_antichain(a, rat(1)).with_antichain(2 * a, rat(-1));
    verify_antichain_combination(&index, &lhs, &peak_valley_antichain_combination(a))
}

/// `χ̂ − a(Σ χ_peaks − Σ χ_valleys) ≡ n/2` on `F(a^t)` with `t` odd.
pub fn verify_cardinality_peak_valley_equiv(a: usize, t: usize) -> Result<EquivCertificate> {
    if t.is_multiple_of(2) {
        return Err(FenceError::ShapeInvalid {
            shape: vec![a; t],
            reason: "number of segments must be odd".into(),
        });
    }
    let fence = Fence::new(FenceShape::uniform(a, t)?)?;
    let index = IdealIndex::new(&fence);
    let ai = rat(a as i64);
    let mut f = ideal_cardinality(&index);
    for p in fence.peaks() {
        f.add_scaled(&chi(&index, p), &-ai.clone());
    }
    for v in fence.valleys() {
        f.add_scaled(&chi(&index, v), &ai);
    }
    let cert = equiv_const_solve(&index, &f).ok_or_else(|| {
        FenceError::AssertionFailure(format!("{} is not equivalent to a constant on {fence}", "cardinality difference"))
    })?;
    let half = ratio(fence.n() as i64, 2);
    if cert.constant != half {
        return Err(FenceError::AssertionFailure(format!(
            "constant {} differs from n/2 = {half} on {fence}",
            cert.constant
        )));
    }
    Ok(cert)
}

/// Evaluates an indicator combination `Σ a_p χ̂_p` as a statistic.
pub fn ideal_combination(index: &IdealIndex, coeffs: &[(usize, Rational)]) -> StatFn {
    let mut f = StatFn::zero(index.len());
    for (p, k) in coeffs {
        f.add_scaled(&chi_hat(index, *p), k);
    }
    f
}
