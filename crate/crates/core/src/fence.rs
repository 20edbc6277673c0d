//! Fence posets built from a composition.
//!
//! Elements are numbered `1..=n` along the zigzag. The first segment
//! ascends, and directions alternate from there. Shared elements join
//! consecutive segments; a shared element is a peak when it covers two
//! elements and a valley when it is covered by two.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FenceError, Result};

/// Largest element count handled by the bit-field ideal representation.
pub const MAX_ELEMENTS: usize = 64;

/// The composition `(α₁, …, α_t)` describing a fence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FenceShape(Vec<usize>);

impl FenceShape {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let invalid = |reason: &str| FenceError::ShapeInvalid {
            shape: parts.clone(),
            reason: reason.to_string(),
        };
        if parts.len() < 2 {
            return Err(invalid("at least two segments are required"));
        }
        if parts[0] < 2 || parts[parts.len() - 1] < 2 {
            return Err(invalid("the first and last parts must be at least 2"));
        }
        if parts.iter().any(|&a| a < 1) {
            return Err(invalid("every part must be positive"));
        }
        Ok(FenceShape(parts))
    }

    /// `(a, a, …, a)` with `t` parts.
    pub fn uniform(a: usize, t: usize) -> Result<Self> {
        Self::new(vec![a; t])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn segments(&self) -> usize {
        self.0.len()
    }

    pub fn element_count(&self) -> usize {
        self.0.iter().sum::<usize>() - 1
    }

    pub fn is_palindromic(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    /// All shapes with exactly `t` segments and at most `max_n` elements,
    /// in lexicographic order of the parts.
    pub fn all_with_segments(t: usize, max_n: usize) -> Vec<FenceShape> {
        let mut out = Vec::new();
        if t < 2 {
            return out;
        }
        // sum of parts is at most max_n + 1
        let mut parts = Vec::with_capacity(t);
        fn rec(t: usize, budget: usize, parts: &mut Vec<usize>, out: &mut Vec<FenceShape>) {
            let i = parts.len();
            if i == t {
                out.push(FenceShape(parts.clone()));
                return;
            }
            let min_here = if i == 0 || i == t - 1 { 2 } else { 1 };
            // reserve room for the parts still to come
            let remaining: usize = (i + 1..t).map(|j| if j == t - 1 { 2 } else { 1 }).sum();
            if budget < min_here + remaining {
                return;
            }
            for a in min_here..=budget - remaining {
                parts.push(a);
                rec(t, budget - a, parts, out);
                parts.pop();
            }
        }
        rec(t, max_n + 1, &mut parts, &mut out);
        out
    }

    /// All shapes with at most `max_n` elements, ordered by segment count.
    pub fn all_up_to(max_n: usize) -> Vec<FenceShape> {
        (2..=max_n.saturating_sub(1).max(2))
            .flat_map(|t| Self::all_with_segments(t, max_n))
            .collect()
    }
}

impl TryFrom<Vec<usize>> for FenceShape {
    type Error = FenceError;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        FenceShape::new(parts)
    }
}

impl From<FenceShape> for Vec<usize> {
    fn from(shape: FenceShape) -> Self {
        shape.0
    }
}

impl fmt::Display for FenceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for FenceShape {
    type Err = FenceError;

    /// Accepts `F(3,3,2)` as well as a bare `3,3,2`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || FenceError::Parse {
            what: "fence",
            input: s.to_string(),
        };
        let trimmed = s.trim();
        let inner = match trimmed.strip_prefix("F(").or_else(|| trimmed.strip_prefix("f(")) {
            Some(rest) => rest.strip_suffix(')').ok_or_else(err)?,
            None => trimmed,
        };
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| err()))
            .collect::<Result<Vec<_>>>()?;
        FenceShape::new(parts)
    }
}

/// Role of a single element within the fence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementClass {
    Peak,
    Valley,
    /// The `rank`-th minimal unshared element of segment `segment` (both 1-based).
    Unshared { segment: usize, rank: usize },
}

/// One maximal chain of the fence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// 1-based segment number.
    pub number: usize,
    pub ascending: bool,
    /// Elements in zigzag order, shared endpoints included.
    pub elements: Vec<usize>,
    /// Unshared elements, poset-minimal first.
    pub unshared: Vec<usize>,
    pub peak: Option<usize>,
    pub valley: Option<usize>,
}

impl Segment {
    /// `α_i` for this segment.
    pub fn alpha(&self) -> usize {
        self.unshared.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fence {
    shape: FenceShape,
    n: usize,
    covers: Vec<(usize, usize)>,
    classes: Vec<ElementClass>,
    shared: Vec<usize>,
    columns: Vec<usize>,
    segments: Vec<Segment>,
    lower: Vec<u64>,
    upper: Vec<u64>,
    down: Vec<u64>,
    up: Vec<u64>,
    heights: Vec<usize>,
    extension: Vec<usize>,
}

#[inline]
pub(crate) fn bit(k: usize) -> u64 {
    1u64 << (k - 1)
}

pub fn build_fence(shape: &FenceShape) -> Result<Fence> {
    Fence::new(shape.clone())
}

impl Fence {
    pub fn new(shape: FenceShape) -> Result<Self> {
        // revalidate in case the shape was deserialized around the constructor
        let shape = FenceShape::new(shape.0)?;
        let n = shape.element_count();
        if n > MAX_ELEMENTS {
            return Err(FenceError::TooLarge {
                n,
                limit: MAX_ELEMENTS,
            });
        }
        let t = shape.segments();
        let parts = shape.parts();

        let mut shared = Vec::with_capacity(t - 1);
        let mut acc = 0;
        for &a in &parts[..t - 1] {
            acc += a;
            shared.push(acc);
        }

        let mut covers = Vec::with_capacity(n - 1);
        let mut segments = Vec::with_capacity(t);
        let mut classes = vec![ElementClass::Peak; n];
        for i in 1..=t {
            let start = if i == 1 { 1 } else { shared[i - 2] };
            let end = if i == t { n } else { shared[i - 1] };
            let ascending = i % 2 == 1;
            let elements: Vec<usize> = (start..=end).collect();
            for k in start..end {
                covers.push(if ascending { (k, k + 1) } else { (k + 1, k) });
            }
            let lo = if i == 1 { start } else { start + 1 };
            let hi = if i == t { end } else { end - 1 };
            let mut unshared: Vec<usize> = if lo <= hi { (lo..=hi).collect() } else { Vec::new() };
            if !ascending {
                unshared.reverse();
            }
            for (j, &x) in unshared.iter().enumerate() {
                classes[x - 1] = ElementClass::Unshared {
                    segment: i,
                    rank: j + 1,
                };
            }
            let (peak, valley) = if ascending {
                (
                    (i < t).then(|| shared[i - 1]),
                    (i > 1).then(|| shared[i - 2]),
                )
            } else {
                (Some(shared[i - 2]), (i < t).then(|| shared[i - 1]))
            };
            segments.push(Segment {
                number: i,
                ascending,
                elements,
                unshared,
                peak,
                valley,
            });
        }
        for (idx, &s) in shared.iter().enumerate() {
            classes[s - 1] = if idx % 2 == 0 {
                ElementClass::Peak
            } else {
                ElementClass::Valley
            };
        }

        let mut lower = vec![0u64; n + 1];
        let mut upper = vec![0u64; n + 1];
        for &(lo, hi) in &covers {
            lower[hi] |= bit(lo);
            upper[lo] |= bit(hi);
        }

        let mut columns = vec![0usize; n];
        for k in 1..n {
            columns[k] = columns[k - 1] + usize::from(upper[k] & bit(k + 1) != 0);
        }

        // longest chain below each element; elements in a fence are reachable
        // from a minimal one by monotone runs, so two sweeps suffice
        let mut heights = vec![0usize; n + 1];
        for _ in 0..2 {
            for k in 1..=n {
                for j in ones(lower[k]) {
                    heights[k] = heights[k].max(heights[j] + 1);
                }
            }
            for k in (1..=n).rev() {
                for j in ones(lower[k]) {
                    heights[k] = heights[k].max(heights[j] + 1);
                }
            }
        }
        let mut extension: Vec<usize> = (1..=n).collect();
        extension.sort_by_key(|&k| (heights[k], k));

        let mut down = vec![0u64; n + 1];
        for &k in &extension {
            down[k] = bit(k) | ones(lower[k]).fold(0, |m, j| m | down[j]);
        }
        let mut up = vec![0u64; n + 1];
        for &k in extension.iter().rev() {
            up[k] = bit(k) | ones(upper[k]).fold(0, |m, j| m | up[j]);
        }

        Ok(Fence {
            shape,
            n,
            covers,
            classes,
            shared,
            columns,
            segments,
            lower,
            upper,
            down,
            up,
            heights,
            extension,
        })
    }

    pub fn shape(&self) -> &FenceShape {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.shape.segments()
    }

    /// Cover relations `(low, high)`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Element index of the shared element `s_i`, `i ∈ 1..t`.
    pub fn shared(&self, i: usize) -> Option<usize> {
        if i == 0 {
            return None;
        }
        self.shared.get(i - 1).copied()
    }

    pub fn shared_elements(&self) -> &[usize] {
        &self.shared
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, i: usize) -> Option<&Segment> {
        i.checked_sub(1).and_then(|i| self.segments.get(i))
    }

    /// `s_{(i,j)}`, or `None` when it does not exist.
    pub fn unshared(&self, segment: usize, rank: usize) -> Option<usize> {
        let seg = self.segment(segment)?;
        rank.checked_sub(1).and_then(|j| seg.unshared.get(j)).copied()
    }

    pub fn element_class(&self, k: usize) -> Result<ElementClass> {
        self.check(k)?;
        Ok(self.classes[k - 1])
    }

    pub fn classes(&self) -> &[ElementClass] {
        &self.classes
    }

    pub fn peaks(&self) -> impl Iterator<Item = usize> + '_ {
        self.shared.iter().step_by(2).copied()
    }

    pub fn valleys(&self) -> impl Iterator<Item = usize> + '_ {
        self.shared.iter().skip(1).step_by(2).copied()
    }

    pub fn column(&self, k: usize) -> Result<usize> {
        self.check(k)?;
        Ok(self.columns[k - 1])
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn column_count(&self) -> usize {
        self.columns[self.n - 1] + 1
    }

    /// Bit mask of the elements in column `c`.
    pub fn column_mask(&self, c: usize) -> u64 {
        (1..=self.n)
            .filter(|&k| self.columns[k - 1] == c)
            .fold(0, |m, k| m | bit(k))
    }

    /// Lower covers of `k` as a bit mask.
    pub fn lower_mask(&self, k: usize) -> u64 {
        self.lower[k]
    }

    pub fn upper_mask(&self, k: usize) -> u64 {
        self.upper[k]
    }

    /// Principal ideal generated by `k`.
    pub fn down_mask(&self, k: usize) -> u64 {
        self.down[k]
    }

    /// Principal filter generated by `k`.
    pub fn up_mask(&self, k: usize) -> u64 {
        self.up[k]
    }

    pub fn lower_covers(&self, k: usize) -> Vec<usize> {
        ones(self.lower[k]).collect()
    }

    pub fn upper_covers(&self, k: usize) -> Vec<usize> {
        ones(self.upper[k]).collect()
    }

    pub fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.down[y] & bit(x) != 0
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// Length (in elements) of the longest chain below and including `k`.
    pub fn height(&self, k: usize) -> usize {
        self.heights[k]
    }

    /// Number of elements in a longest chain.
    pub fn longest_chain(&self) -> usize {
        (1..=self.n).map(|k| self.heights[k] + 1).max().unwrap_or(0)
    }

    /// Linear extension sorted by height, ties by index.
    pub fn linear_extension(&self) -> &[usize] {
        &self.extension
    }

    /// The index reversal `k ↦ n+1−k` when it is an order-reversing involution.
    pub fn self_dual_involution(&self) -> Option<Involution> {
        if !self.shape.is_palindromic() {
            return None;
        }
        let perm: Vec<usize> = (1..=self.n).map(|k| self.n + 1 - k).collect();
        let reverses = self
            .covers
            .iter()
            .all(|&(lo, hi)| self.upper[perm[hi - 1]] & bit(perm[lo - 1]) != 0);
        reverses.then_some(Involution { perm })
    }

    pub(crate) fn check(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(FenceError::IndexOutOfRange {
                index: k,
                n: self.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Fence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.shape.fmt(f)
    }
}

/// An order-reversing involution on the elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    perm: Vec<usize>,
}

impl Involution {
    pub fn apply(&self, k: usize) -> usize {
        self.perm[k - 1]
    }

    pub fn apply_mask(&self, mask: u64) -> u64 {
        ones(mask).fold(0, |m, k| m | bit(self.perm[k - 1]))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }
}

/// 1-based positions of the set bits.
pub(crate) fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let k = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(k + 1)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fence(parts: &[usize]) -> Fence {
        Fence::new(FenceShape::new(parts.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn three_three_two_layout() {
        let f = fence(&[3, 3, 2]);
        assert_eq!(f.n(), 7);
        assert_eq!(f.segments()[0].elements, vec![1, 2, 3]);
        assert_eq!(f.segments()[1].elements, vec![3, 4, 5, 6]);
        assert_eq!(f.segments()[2].elements, vec![6, 7]);
        assert_eq!(f.element_class(3).unwrap(), ElementClass::Peak);
        assert_eq!(f.element_class(6).unwrap(), ElementClass::Valley);
        let unshared: Vec<usize> = (1..=7)
            .filter(|&k| matches!(f.element_class(k).unwrap(), ElementClass::Unshared { .. }))
            .collect();
        assert_eq!(unshared, vec![1, 2, 4, 5, 7]);
    }

    #[test]
    fn descending_segment_ranks_from_the_bottom() {
        let f = fence(&[3, 3, 2]);
        // brute check: x5 < x4 in the poset, so x5 is the first minimal
        assert!(f.leq(5, 4));
        assert_eq!(
            f.element_class(4).unwrap(),
            ElementClass::Unshared { segment: 2, rank: 2 }
        );
        assert_eq!(
            f.element_class(5).unwrap(),
            ElementClass::Unshared { segment: 2, rank: 1 }
        );
        assert_eq!(f.unshared(2, 1), Some(5));
        assert_eq!(f.unshared(2, 3), None);
    }

    #[test]
    fn smallest_fence() {
        let f = fence(&[2, 2]);
        assert_eq!(f.n(), 3);
        assert_eq!(f.covers(), &[(1, 2), (3, 2)]);
        assert_eq!(f.peaks().collect::<Vec<_>>(), vec![2]);
        assert_eq!(f.valleys().count(), 0);
    }

    #[test]
    fn columns_of_rotated_drawing() {
        let f = fence(&[3, 2, 2]);
        assert_eq!(f.columns(), &[0, 1, 2, 2, 2, 3]);
        assert_eq!(f.column_count(), 4);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(FenceShape::new(vec![3]).is_err());
        assert!(FenceShape::new(vec![1, 3]).is_err());
        assert!(FenceShape::new(vec![3, 1]).is_err());
        assert!(FenceShape::new(vec![2, 0, 2]).is_err());
        assert!(FenceShape::new(vec![2, 1, 2]).is_ok());
    }

    #[test]
    fn index_out_of_range() {
        let f = fence(&[2, 2]);
        assert!(matches!(
            f.element_class(0),
            Err(FenceError::IndexOutOfRange { .. })
        ));
        assert!(f.element_class(4).is_err());
    }

    #[test]
    fn involution_examples() {
        let f = fence(&[2, 2, 2]);
        let k = f.self_dual_involution().unwrap();
        assert_eq!(k.as_slice(), &[5, 4, 3, 2, 1]);
        // every cover reverses
        for &(lo, hi) in f.covers() {
            assert!(f.covers().contains(&(k.apply(hi), k.apply(lo))));
        }
        assert!(fence(&[3, 3, 2]).self_dual_involution().is_none());
        let k = fence(&[3, 3, 3]).self_dual_involution().unwrap();
        assert!((1..=8).all(|x| k.apply(x) == 9 - x));
        // palindromic but with an even number of segments: the reversal
        // preserves order instead of reversing it
        assert!(fence(&[2, 2]).self_dual_involution().is_none());
    }

    #[test]
    fn parse_and_display() {
        let s: FenceShape = "F(3,3,2)".parse().unwrap();
        assert_eq!(s.parts(), &[3, 3, 2]);
        assert_eq!(s.to_string(), "F(3,3,2)");
        assert_eq!("2, 2".parse::<FenceShape>().unwrap().to_string(), "F(2,2)");
        assert!("F(3,3".parse::<FenceShape>().is_err());
        assert!("F(1,2)".parse::<FenceShape>().is_err());
    }

    #[test]
    fn shape_counts() {
        // compositions with t parts, end parts >= 2, sum <= n + 1
        assert_eq!(FenceShape::all_with_segments(3, 20).len(), 969);
        assert_eq!(FenceShape::all_with_segments(4, 20).len(), 3876);
        assert_eq!(FenceShape::all_with_segments(7, 15).len(), 3432);
        assert_eq!(FenceShape::all_up_to(4).len(), 4);
    }

    #[test]
    fn too_large() {
        let shape = FenceShape::new(vec![33, 33]).unwrap();
        assert!(matches!(Fence::new(shape), Err(FenceError::TooLarge { .. })));
    }
}
