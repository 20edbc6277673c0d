//! Piecewise-linear and birational toggles and rowmotion on labelings of
//! `F̂`, lifted statistics, and time-average estimates.
//!
//! Labelings are generic over a [`Scalar`]: exact [`Rational`] for identity
//! checks and bounded-length orbits, `f64` for long Cesàro runs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FenceError, Result};
use crate::fence::{ones, Fence};
use crate::ideals::Ideal;
use crate::linalg::{rat, ratio, to_i64, Rational};
use crate::stats::StatExpr;

/// Default cap on exact birational iteration.
pub const DEFAULT_STEP_LIMIT: usize = 200;

pub trait Scalar: Num + Clone + PartialOrd + fmt::Debug {
    fn from_rational(q: &Rational) -> Self;
    fn ln(&self) -> f64;
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn ln(&self) -> f64 {
        big_ln(self.numer()) - big_ln(self.denom())
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
}

fn big_ln(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (&x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Residue modulo the prime `P < 2^63`. Orbits computed with it are exact
/// images of rational orbits whenever no denominator is divisible by `P`.
/// The ordering compares canonical representatives and carries no meaning;
/// it exists only so the type fits [`Scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModP<const P: u64>(u64);

/// Three primes below `2^63` used for modular orbit images.
pub const MODULAR_PRIMES: [u64; 3] = [2305843009213693951, 4611686018427387847, 9223372036854775783];

impl<const P: u64> ModP<P> {
    pub fn new(v: u64) -> Self {
        ModP(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut out = ModP(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            e >>= 1;
        }
        out
    }

    /// Inverse by Fermat; the inverse of zero is reported as zero.
    pub fn inverse(self) -> Self {
        self.pow(P - 2)
    }

    fn from_big(x: &BigInt) -> Self {
        let r = x.mod_floor(&BigInt::from(P));
        ModP(r.to_u64().expect("reduced below P"))
    }
}

impl<const P: u64> std::ops::Add for ModP<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = self.0 + o.0;
        ModP(if s >= P { s - P } else { s })
    }
}

impl<const P: u64> std::ops::Sub for ModP<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ModP(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P - o.0 })
    }
}

impl<const P: u64> std::ops::Mul for ModP<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ModP(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> std::ops::Div for ModP<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inverse()
    }
}

impl<const P: u64> std::ops::Rem for ModP<P> {
    type Output = Self;
    fn rem(self, _o: Self) -> Self {
        ModP(0)
    }
}

impl<const P: u64> num_traits::Zero for ModP<P> {
    fn zero() -> Self {
        ModP(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> num_traits::One for ModP<P> {
    fn one() -> Self {
        ModP(1 % P)
    }
}

impl<const P: u64> Num for ModP<P> {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        u64::from_str_radix(s, radix).map(ModP::new)
    }
}

impl<const P: u64> Scalar for ModP<P> {
    fn from_rational(q: &Rational) -> Self {
        Self::from_big(q.numer()) / Self::from_big(q.denom())
    }

    fn ln(&self) -> f64 {
        f64::NAN
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realm {
    PiecewiseLinear,
    Birational,
}

impl Realm {
    /// `(α, ω)` used when the caller does not override them.
    pub fn default_bounds(self) -> (Rational, Rational) {
        match self {
            Realm::PiecewiseLinear => (rat(0), rat(1)),
            Realm::Birational => (rat(1), rat(2)),
        }
    }
}

impl FromStr for Realm {
    type Err = FenceError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pl" | "piecewise-linear" | "piecewise_linear" => Ok(Realm::PiecewiseLinear),
            "b" | "birational" => Ok(Realm::Birational),
            _ => Err(FenceError::Parse {
                what: "realm",
                input: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Realm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Realm::PiecewiseLinear => "piecewise-linear",
            Realm::Birational => "birational",
        })
    }
}

/// A labeling `π` of the fence, with `π(0̂) = bottom` and `π(1̂) = top`.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeling<S> {
    values: Vec<S>,
    pub bottom: S,
    pub top: S,
}

impl<S: Scalar> Labeling<S> {
    pub fn new(fence: &Fence, values: Vec<S>, bottom: S, top: S) -> Result<Self> {
        if values.len() != fence.n() {
            return Err(FenceError::DimensionMismatch {
                expected: fence.n(),
                got: values.len(),
            });
        }
        Ok(Labeling { values, bottom, top })
    }

    pub fn get(&self, p: usize) -> &S {
        &self.values[p - 1]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn is_positive(&self) -> bool {
        let zero = S::zero();
        self.bottom > zero && self.top > zero && self.values.iter().all(|v| *v > zero)
    }
}

impl Labeling<Rational> {
    pub fn to_f64(&self) -> Labeling<f64> {
        self.convert()
    }

    pub fn convert<S: Scalar>(&self) -> Labeling<S> {
        Labeling {
            values: self.values.iter().map(S::from_rational).collect(),
            bottom: S::from_rational(&self.bottom),
            top: S::from_rational(&self.top),
        }
    }

    /// One JSON object per labeling, rationals as `"num/den"`.
    pub fn to_json(&self, step: usize) -> serde_json::Value {
        let q = |v: &Rational| format!("{}/{}", v.numer(), v.denom());
        serde_json::json!({
            "step": step,
            "bottom": q(&self.bottom),
            "top": q(&self.top),
            "labels": self.values.iter().map(q).collect::<Vec<_>>(),
        })
    }
}

/// `π_I`: the indicator of `F ∖ I` with `α = 0`, `ω = 1`.
pub fn indicator_labeling(fence: &Fence, ideal: Ideal) -> Labeling<Rational> {
    Labeling {
        values: (1..=fence.n()).map(|p| rat(i64::from(!ideal.contains(p)))).collect(),
        bottom: rat(0),
        top: rat(1),
    }
}

/// Labels of the elements of `F̂` covered by `p`.
fn below<'a, S: Scalar>(fence: &Fence, pi: &'a Labeling<S>, p: usize) -> Vec<&'a S> {
    let m = fence.lower_mask(p);
    if m == 0 {
        vec![&pi.bottom]
    } else {
        ones(m).map(|r| pi.get(r)).collect()
    }
}

/// Labels of the elements of `F̂` covering `p`.
fn above<'a, S: Scalar>(fence: &Fence, pi: &'a Labeling<S>, p: usize) -> Vec<&'a S> {
    let m = fence.upper_mask(p);
    if m == 0 {
        vec![&pi.top]
    } else {
        ones(m).map(|r| pi.get(r)).collect()
    }
}

fn max_of<S: Scalar>(xs: Vec<&S>) -> S {
    xs.into_iter()
        .fold(None::<&S>, |m, x| match m {
            Some(m) if m >= x => Some(m),
            _ => Some(x),
        })
        .expect("every element has a neighbour in F̂")
        .clone()
}

fn min_of<S: Scalar>(xs: Vec<&S>) -> S {
    xs.into_iter()
        .fold(None::<&S>, |m, x| match m {
            Some(m) if m <= x => Some(m),
            _ => Some(x),
        })
        .expect("every element has a neighbour in F̂")
        .clone()
}

fn sum_of<S: Scalar>(xs: Vec<&S>) -> S {
    xs.into_iter().fold(S::zero(), |acc, x| acc + x.clone())
}

fn sum_inverse<S: Scalar>(xs: Vec<&S>) -> S {
    xs.into_iter().fold(S::zero(), |acc, x| acc + S::one() / x.clone())
}

fn toggled_value<S: Scalar>(fence: &Fence, realm: Realm, pi: &Labeling<S>, p: usize) -> S {
    let here = pi.get(p).clone();
    match realm {
        Realm::PiecewiseLinear => {
            min_of(above(fence, pi, p)) + max_of(below(fence, pi, p)) - here
        }
        Realm::Birational => {
            sum_of(below(fence, pi, p)) / (here * sum_inverse(above(fence, pi, p)))
        }
    }
}

pub fn toggle<S: Scalar>(fence: &Fence, realm: Realm, pi: &Labeling<S>, p: usize) -> Labeling<S> {
    let mut out = pi.clone();
    out.values[p - 1] = toggled_value(fence, realm, pi, p);
    out
}

/// Toggles from the top of the linear extension down.
pub fn rowmotion<S: Scalar>(fence: &Fence, realm: Realm, pi: &Labeling<S>) -> Labeling<S> {
    let mut out = pi.clone();
    for &p in fence.linear_extension().iter().rev() {
        out.values[p - 1] = toggled_value(fence, realm, &out, p);
    }
    out
}

pub fn pl_toggle<S: Scalar>(fence: &Fence, pi: &Labeling<S>, p: usize) -> Labeling<S> {
    toggle(fence, Realm::PiecewiseLinear, pi, p)
}

pub fn pl_rowmotion<S: Scalar>(fence: &Fence, pi: &Labeling<S>) -> Labeling<S> {
    rowmotion(fence, Realm::PiecewiseLinear, pi)
}

pub fn b_toggle<S: Scalar>(fence: &Fence, pi: &Labeling<S>, p: usize) -> Labeling<S> {
    toggle(fence, Realm::Birational, pi, p)
}

pub fn b_rowmotion<S: Scalar>(fence: &Fence, pi: &Labeling<S>) -> Labeling<S> {
    rowmotion(fence, Realm::Birational, pi)
}

/// `γ(π) = Σ_{r ⋖ s in F̂} π(r)/π(s)`.
pub fn gamma<S: Scalar>(fence: &Fence, pi: &Labeling<S>) -> S {
    let mut g = S::zero();
    for &(r, s) in fence.covers() {
        g = g + pi.get(r).clone() / pi.get(s).clone();
    }
    for p in 1..=fence.n() {
        if fence.lower_mask(p) == 0 {
            g = g + pi.bottom.clone() / pi.get(p).clone();
        }
        if fence.upper_mask(p) == 0 {
            g = g + pi.get(p).clone() / pi.top.clone();
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
    Net,
}

/// Lifted toggleability: `T⁺`, `T⁻`, and `T⁺ − T⁻` (PL) or `T⁺ / T⁻` (B).
pub fn togg_lift<S: Scalar>(fence: &Fence, realm: Realm, pi: &Labeling<S>, p: usize, sign: Sign) -> S {
    let here = pi.get(p).clone();
    let plus = || match realm {
        Realm::PiecewiseLinear => here.clone() - max_of(below(fence, pi, p)),
        Realm::Birational => here.clone() / sum_of(below(fence, pi, p)),
    };
    let minus = || match realm {
        Realm::PiecewiseLinear => min_of(above(fence, pi, p)) - here.clone(),
        Realm::Birational => S::one() / (here.clone() * sum_inverse(above(fence, pi, p))),
    };
    match (sign, realm) {
        (Sign::Plus, _) => plus(),
        (Sign::Minus, _) => minus(),
        (Sign::Net, Realm::PiecewiseLinear) => plus() - minus(),
        (Sign::Net, Realm::Birational) => plus() / minus(),
    }
}

/// `χ̂_p` lifted: `ω − π(p)` or `ω / π(p)`.
pub fn chi_hat_lift<S: Scalar>(realm: Realm, pi: &Labeling<S>, p: usize) -> S {
    match realm {
        Realm::PiecewiseLinear => pi.top.clone() - pi.get(p).clone(),
        Realm::Birational => pi.top.clone() / pi.get(p).clone(),
    }
}

/// `χ_p` lifted, equal to `T_p⁻`.
pub fn chi_lift<S: Scalar>(fence: &Fence, realm: Realm, pi: &Labeling<S>, p: usize) -> S {
    togg_lift(fence, realm, pi, p, Sign::Minus)
}

/// A [`StatExpr`] lifted to one realm. A constant `c` lifts to `c(ω − α)` or
/// `(ω/α)^c`; birational lifts need integer coefficients throughout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedStat {
    realm: Realm,
    expr: StatExpr,
}

enum Term {
    Ideal,
    Antichain,
    Toggle,
}

impl LiftedStat {
    pub fn new(fence: &Fence, expr: &StatExpr, realm: Realm) -> Result<Self> {
        for p in expr.ideal.keys().chain(expr.antichain.keys()).chain(expr.toggle.keys()) {
            fence.check(*p)?;
            // fences have at most two upper and two lower covers per element
            debug_assert!(fence.upper_mask(*p).count_ones() <= 2 && fence.lower_mask(*p).count_ones() <= 2);
        }
        if realm == Realm::Birational {
            let all = expr
                .ideal
                .values()
                .chain(expr.antichain.values())
                .chain(expr.toggle.values())
                .chain(std::iter::once(&expr.constant));
            for k in all {
                if !k.is_integer() {
                    return Err(FenceError::NonIntegerExponent(k.to_string()));
                }
            }
        }
        Ok(LiftedStat {
            realm,
            expr: expr.clone(),
        })
    }

    pub fn realm(&self) -> Realm {
        self.realm
    }

    fn terms(&self) -> impl Iterator<Item = (Term, usize, &Rational)> {
        self.expr
            .ideal
            .iter()
            .map(|(&p, k)| (Term::Ideal, p, k))
            .chain(self.expr.antichain.iter().map(|(&p, k)| (Term::Antichain, p, k)))
            .chain(self.expr.toggle.iter().map(|(&p, k)| (Term::Toggle, p, k)))
    }

    fn factor<S: Scalar>(&self, fence: &Fence, term: &Term, pi: &Labeling<S>, p: usize) -> S {
        match term {
            Term::Ideal => chi_hat_lift(self.realm, pi, p),
            Term::Antichain => chi_lift(fence, self.realm, pi, p),
            Term::Toggle => togg_lift(fence, self.realm, pi, p, Sign::Net),
        }
    }

    pub fn evaluate<S: Scalar>(&self, fence: &Fence, pi: &Labeling<S>) -> S {
        match self.realm {
            Realm::PiecewiseLinear => {
                let span = pi.top.clone() - pi.bottom.clone();
                let mut v = S::from_rational(&self.expr.constant) * span;
                for (term, p, k) in self.terms() {
                    v = v + S::from_rational(k) * self.factor(fence, &term, pi, p);
                }
                v
            }
            Realm::Birational => {
                let ratio = pi.top.clone() / pi.bottom.clone();
                let mut v = int_pow(ratio, &self.expr.constant);
                for (term, p, k) in self.terms() {
                    v = v * int_pow(self.factor(fence, &term, pi, p), k);
                }
                v
            }
        }
    }

    /// `ln f^B` for birational statistics, `f^PL` otherwise.
    pub fn log_or_value(&self, fence: &Fence, pi: &Labeling<f64>) -> f64 {
        match self.realm {
            Realm::PiecewiseLinear => self.evaluate(fence, pi),
            Realm::Birational => {
                let k0 = self.expr.constant.to_f64().unwrap_or(f64::NAN);
                let mut v = k0 * (pi.top / pi.bottom).ln();
                for (term, p, k) in self.terms() {
                    v += k.to_f64().unwrap_or(f64::NAN) * self.factor(fence, &term, pi, p).ln();
                }
                v
            }
        }
    }
}

fn int_pow<S: Scalar>(base: S, k: &Rational) -> S {
    let e = to_i64(k).expect("exponents validated as integers");
    let mut out = S::one();
    for _ in 0..e.unsigned_abs() {
        out = out * base.clone();
    }
    if e < 0 {
        S::one() / out
    } else {
        out
    }
}

/// Seeded labeling with entries `m/k`, `1 ≤ m, k ≤ 20`, and the realm's
/// default boundary values.
pub fn random_labeling(fence: &Fence, realm: Realm, seed: u64) -> Labeling<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (bottom, top) = realm.default_bounds();
    Labeling {
        values: (0..fence.n())
            .map(|_| ratio(rng.gen_range(1..=20), rng.gen_range(1..=20)))
            .collect(),
        bottom,
        top,
    }
}

/// Seeded order-preserving labeling with entries `m/k` (`1 ≤ m, k ≤ 20`)
/// inside `[α, ω]`, the realm's defaults. Sorted values are laid along the
/// linear extension, so `x ≤ y` implies `π(x) ≤ π(y)`.
pub fn monotone_random_labeling(fence: &Fence, realm: Realm, seed: u64) -> Labeling<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (bottom, top) = realm.default_bounds();
    let mut vals: Vec<Rational> = (0..fence.n())
        .map(|_| loop {
            let q = ratio(rng.gen_range(1..=20), rng.gen_range(1..=20));
            if q >= bottom && q <= top {
                break q;
            }
        })
        .collect();
    vals.sort();
    let mut values = vec![rat(0); fence.n()];
    for (&p, v) in fence.linear_extension().iter().zip(vals) {
        values[p - 1] = v;
    }
    Labeling { values, bottom, top }
}

/// Which identity of [`exact_identity_suite`] failed, and where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityFailure {
    pub identity: String,
    pub step: usize,
    pub element: Option<usize>,
}

/// Exact checks along one orbit: `γ` invariance over `gamma_steps` steps
/// (birational only), `T⁺(π) = T⁻(ρπ)` at every visited labeling, and the
/// telescoping of `T` over the first `telescope_steps` labelings
/// (product for birational, sum for PL).
pub fn exact_identity_suite<S: Scalar>(
    fence: &Fence,
    realm: Realm,
    pi: &Labeling<S>,
    gamma_steps: usize,
    telescope_steps: usize,
) -> std::result::Result<(), IdentityFailure> {
    let total = gamma_steps.max(telescope_steps);
    let mut trace = vec![pi.clone()];
    for _ in 0..total {
        let next = rowmotion(fence, realm, trace.last().unwrap());
        trace.push(next);
    }
    check_trace_identities(fence, realm, &trace, gamma_steps, telescope_steps)
}

/// The checks of [`exact_identity_suite`] on an orbit that is already
/// computed; `trace` must hold at least `max(gamma_steps, telescope_steps) + 1`
/// labelings and adjacency is checked along all of it.
pub fn check_trace_identities<S: Scalar>(
    fence: &Fence,
    realm: Realm,
    trace: &[Labeling<S>],
    gamma_steps: usize,
    telescope_steps: usize,
) -> std::result::Result<(), IdentityFailure> {
    assert!(trace.len() > gamma_steps.max(telescope_steps), "trace too short");
    let total = trace.len() - 1;
    let pi = &trace[0];
    let fail = |identity: &str, step, element| IdentityFailure {
        identity: identity.to_string(),
        step,
        element,
    };
    if realm == Realm::Birational {
        let g0 = gamma(fence, pi);
        if let Some(step) = (1..=gamma_steps).find(|&k| gamma(fence, &trace[k]) != g0) {
            return Err(fail("gamma invariance", step, None));
        }
    }
    for step in 0..total {
        for p in 1..=fence.n() {
            let plus = togg_lift(fence, realm, &trace[step], p, Sign::Plus);
            if plus != togg_lift(fence, realm, &trace[step + 1], p, Sign::Minus) {
                return Err(fail("plus/minus adjacency", step, Some(p)));
            }
        }
    }
    if telescope_steps > 0 {
        let last = &trace[telescope_steps - 1];
        for p in 1..=fence.n() {
            let nets = trace[..telescope_steps]
                .iter()
                .map(|x| togg_lift(fence, realm, x, p, Sign::Net));
            let (lhs, rhs) = match realm {
                Realm::Birational => (
                    nets.fold(S::one(), |acc, v| acc * v),
                    togg_lift(fence, realm, last, p, Sign::Plus)
                        / togg_lift(fence, realm, pi, p, Sign::Minus),
                ),
                Realm::PiecewiseLinear => (
                    nets.fold(S::zero(), |acc, v| acc + v),
                    togg_lift(fence, realm, last, p, Sign::Plus)
                        - togg_lift(fence, realm, pi, p, Sign::Minus),
                ),
            };
            if lhs != rhs {
                return Err(fail("telescoping", telescope_steps, Some(p)));
            }
        }
    }
    Ok(())
}

/// Runs [`exact_identity_suite`] on the images of a rational birational
/// labeling modulo each of [`MODULAR_PRIMES`].
pub fn modular_identity_suite(
    fence: &Fence,
    pi: &Labeling<Rational>,
    gamma_steps: usize,
    telescope_steps: usize,
) -> std::result::Result<(), IdentityFailure> {
    const P0: u64 = MODULAR_PRIMES[0];
    const P1: u64 = MODULAR_PRIMES[1];
    const P2: u64 = MODULAR_PRIMES[2];
    let r = Realm::Birational;
    exact_identity_suite(fence, r, &pi.convert::<ModP<P0>>(), gamma_steps, telescope_steps)?;
    exact_identity_suite(fence, r, &pi.convert::<ModP<P1>>(), gamma_steps, telescope_steps)?;
    exact_identity_suite(fence, r, &pi.convert::<ModP<P2>>(), gamma_steps, telescope_steps)
}

/// `π, ρπ, …, ρ^steps π`, exactly. Birational orbits longer than `limit`
/// are refused.
pub fn orbit_exact(
    fence: &Fence,
    realm: Realm,
    pi: &Labeling<Rational>,
    steps: usize,
    limit: usize,
) -> Result<Vec<Labeling<Rational>>> {
    if realm == Realm::Birational && steps > limit {
        return Err(FenceError::StepLimit {
            limit,
            requested: steps,
        });
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(pi.clone());
    for _ in 0..steps {
        let next = rowmotion(fence, realm, out.last().unwrap());
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiniteOrder {
    Order(usize),
    /// No return within this many steps.
    Unknown(usize),
}

/// Smallest `N ≤ max_iter` with `ρ^N π = π`, compared exactly.
pub fn detect_finite_order(
    fence: &Fence,
    realm: Realm,
    pi: &Labeling<Rational>,
    max_iter: usize,
    limit: usize,
) -> Result<FiniteOrder> {
    if realm == Realm::Birational && max_iter > limit {
        return Err(FenceError::StepLimit {
            limit,
            requested: max_iter,
        });
    }
    let mut cur = pi.clone();
    for n in 1..=max_iter {
        cur = rowmotion(fence, realm, &cur);
        if cur == *pi {
            return Ok(FiniteOrder::Order(n));
        }
    }
    Ok(FiniteOrder::Unknown(max_iter))
}

/// Running time averages of a lifted statistic: arithmetic for PL,
/// geometric (through logarithms) for birational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroEstimate {
    pub realm: Realm,
    pub steps: usize,
    pub mean: f64,
    /// Mean after `1, 2, …, steps` terms.
    pub running: Vec<f64>,
}

pub fn cesaro_homomesy_estimate(
    fence: &Fence,
    stat: &LiftedStat,
    pi: &Labeling<Rational>,
    steps: usize,
) -> CesaroEstimate {
    let realm = stat.realm();
    let mut cur = pi.to_f64();
    let mut total = 0.0;
    let mut running = Vec::with_capacity(steps);
    for n in 1..=steps.max(1) {
        total += stat.log_or_value(fence, &cur);
        let m = total / n as f64;
        running.push(match realm {
            Realm::PiecewiseLinear => m,
            Realm::Birational => m.exp(),
        });
        cur = rowmotion(fence, realm, &cur);
    }
    CesaroEstimate {
        realm,
        steps,
        mean: *running.last().unwrap(),
        running,
    }
}

/// Analytic label bounds along a birational orbit:
/// `min(α, α γ^{−M}) ≤ π(p) ≤ max(ω, ω γ^M)` with `M` the size of a
/// longest chain.
pub fn birational_label_bounds(fence: &Fence, pi: &Labeling<Rational>) -> (Rational, Rational) {
    let g = gamma(fence, pi);
    let m = fence.longest_chain() as i64;
    let gm = int_pow(g, &rat(m));
    let lo = pi.bottom.clone() / gm.clone();
    let hi = pi.top.clone() * gm;
    (lo.min(pi.bottom.clone()), hi.max(pi.top.clone()))
}

/// Checks every label of the trace against [`birational_label_bounds`].
pub fn check_label_bounds(fence: &Fence, trace: &[Labeling<Rational>]) -> Result<()> {
    let Some(first) = trace.first() else { return Ok(()) };
    let (lo, hi) = birational_label_bounds(fence, first);
    for (step, pi) in trace.iter().enumerate() {
        if let Some(v) = pi.values().iter().find(|v| **v < lo || **v > hi) {
            return Err(FenceError::AssertionFailure(format!(
                "label {v} at step {step} outside [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// One JSON object per line.
pub fn trace_json_lines(trace: &[Labeling<Rational>]) -> String {
    let mut out = String::new();
    for (i, pi) in trace.iter().enumerate() {
        out.push_str(&pi.to_json(i).to_string());
        out.push('\n');
    }
    out
}
