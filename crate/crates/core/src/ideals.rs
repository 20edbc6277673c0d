//! Order ideals, toggles, rowmotion, promotion and recombination.

use std::fmt;
use std::str::FromStr;

use crate::error::{FenceError, Result};
use crate::fence::{bit, ones, Fence};

/// An order ideal stored as a bit field; bit `k-1` is element `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ideal(pub u64);

impl Ideal {
    pub const EMPTY: Ideal = Ideal(0);

    pub fn from_elements(elements: &[usize]) -> Self {
        Ideal(elements.iter().fold(0, |m, &k| m | bit(k)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 & bit(k) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn elements(self) -> Vec<usize> {
        ones(self.0).collect()
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, self.0)
    }
}

pub(crate) fn write_set(f: &mut fmt::Formatter<'_>, mask: u64) -> fmt::Result {
    write!(f, "{{")?;
    for (i, k) in ones(mask).enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{k}")?;
    }
    write!(f, "}}")
}

pub(crate) fn parse_set(s: &str, what: &'static str) -> Result<u64> {
    let err = || FenceError::Parse {
        what,
        input: s.to_string(),
    };
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(err)?;
    let mut mask = 0u64;
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let k: usize = part.parse().map_err(|_| err())?;
        if k == 0 || k > 64 {
            return Err(err());
        }
        mask |= bit(k);
    }
    Ok(mask)
}

impl FromStr for Ideal {
    type Err = FenceError;

    /// Parses `{1,5,6}`; downward closure is checked by [`Fence::ideal`].
    fn from_str(s: &str) -> Result<Self> {
        parse_set(s, "ideal").map(Ideal)
    }
}

impl Fence {
    pub fn is_ideal(&self, mask: u64) -> bool {
        mask & !self.full_mask() == 0 && ones(mask).all(|k| self.lower_mask(k) & !mask == 0)
    }

    /// Validates a raw element set as an ideal of this fence.
    pub fn ideal(&self, mask: u64) -> Result<Ideal> {
        if self.is_ideal(mask) {
            Ok(Ideal(mask))
        } else {
            Err(FenceError::NotAnIdeal(Ideal(mask).to_string()))
        }
    }

    /// `max(I)` as a mask.
    pub fn maximal(&self, ideal: Ideal) -> u64 {
        ones(ideal.0)
            .filter(|&k| self.upper_mask(k) & ideal.0 == 0)
            .fold(0, |m, k| m | bit(k))
    }

    /// `min(F \ I)` as a mask.
    pub fn minimal_outside(&self, ideal: Ideal) -> u64 {
        ones(self.full_mask() & !ideal.0)
            .filter(|&k| self.lower_mask(k) & !ideal.0 == 0)
            .fold(0, |m, k| m | bit(k))
    }

    /// Ideal generated by a set of elements.
    pub fn generate(&self, mask: u64) -> Ideal {
        Ideal(ones(mask).fold(0, |m, k| m | self.down_mask(k)))
    }

    /// Filter generated by a set of elements.
    pub fn generate_filter(&self, mask: u64) -> u64 {
        ones(mask).fold(0, |m, k| m | self.up_mask(k))
    }

    pub fn toggle(&self, ideal: Ideal, p: usize) -> Result<Ideal> {
        self.check(p)?;
        Ok(self.toggle_unchecked(ideal, p))
    }

    #[inline]
    pub(crate) fn toggle_unchecked(&self, ideal: Ideal, p: usize) -> Ideal {
        let b = bit(p);
        if ideal.0 & b == 0 {
            if self.lower_mask(p) & !ideal.0 == 0 {
                return Ideal(ideal.0 | b);
            }
        } else if self.upper_mask(p) & ideal.0 == 0 {
            return Ideal(ideal.0 & !b);
        }
        ideal
    }

    /// Ideal generated by the minimal elements of the complement.
    pub fn rowmotion(&self, ideal: Ideal) -> Ideal {
        self.generate(self.minimal_outside(ideal))
    }

    /// Rowmotion as toggles swept from the top of the linear extension down.
    pub fn rowmotion_by_toggles(&self, ideal: Ideal) -> Ideal {
        self.linear_extension()
            .iter()
            .rev()
            .fold(ideal, |i, &p| self.toggle_unchecked(i, p))
    }

    /// Complement of the filter generated by `max(I)`.
    pub fn rowmotion_inverse(&self, ideal: Ideal) -> Ideal {
        Ideal(self.full_mask() & !self.generate_filter(self.maximal(ideal)))
    }

    /// `τ_n ∘ ⋯ ∘ τ_1`: toggles left to right, `τ_1` first.
    pub fn promotion(&self, ideal: Ideal) -> Ideal {
        (1..=self.n()).fold(ideal, |i, p| self.toggle_unchecked(i, p))
    }

    pub fn promotion_inverse(&self, ideal: Ideal) -> Ideal {
        (1..=self.n()).rev().fold(ideal, |i, p| self.toggle_unchecked(i, p))
    }

    /// Column `j` of the result is column `j` of `ρ^j(I)`.
    pub fn recombination(&self, ideal: Ideal) -> Result<Ideal> {
        let mut current = ideal;
        let mut mask = 0u64;
        for c in 0..self.column_count() {
            mask |= current.0 & self.column_mask(c);
            current = self.rowmotion(current);
        }
        self.ideal(mask)
    }

    pub fn apply(&self, map: DynamicsMap, ideal: Ideal) -> Ideal {
        match map {
            DynamicsMap::Rowmotion => self.rowmotion(ideal),
            DynamicsMap::Promotion => self.promotion(ideal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynamicsMap {
    Rowmotion,
    Promotion,
}

impl FromStr for DynamicsMap {
    type Err = FenceError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rowmotion" | "row" | "rho" => Ok(DynamicsMap::Rowmotion),
            "promotion" | "pro" => Ok(DynamicsMap::Promotion),
            _ => Err(FenceError::Parse {
                what: "map",
                input: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for DynamicsMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DynamicsMap::Rowmotion => "rowmotion",
            DynamicsMap::Promotion => "promotion",
        })
    }
}

/// Every ideal of a fence, sorted ascending as unsigned bit patterns.
#[derive(Debug, Clone)]
pub struct IdealIndex {
    fence: Fence,
    ideals: Vec<Ideal>,
}

pub fn enumerate_ideals(fence: &Fence) -> IdealIndex {
    IdealIndex::new(fence)
}

impl IdealIndex {
    pub fn new(fence: &Fence) -> Self {
        let ext = fence.linear_extension();
        let mut ideals = Vec::new();
        // include/exclude each element along the linear extension; an element
        // may join only once its lower covers are present
        let mut stack = vec![(0usize, 0u64)];
        while let Some((depth, mask)) = stack.pop() {
            if depth == ext.len() {
                ideals.push(Ideal(mask));
                continue;
            }
            let p = ext[depth];
            stack.push((depth + 1, mask));
            if fence.lower_mask(p) & !mask == 0 {
                stack.push((depth + 1, mask | bit(p)));
            }
        }
        ideals.sort_unstable();
        IdealIndex {
            fence: fence.clone(),
            ideals,
        }
    }

    pub fn fence(&self) -> &Fence {
        &self.fence
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn ideals(&self) -> &[Ideal] {
        &self.ideals
    }

    pub fn get(&self, pos: usize) -> Ideal {
        self.ideals[pos]
    }

    pub fn position(&self, ideal: Ideal) -> Option<usize> {
        self.ideals.binary_search(&ideal).ok()
    }

    /// Image of every position under `map`.
    pub fn permutation(&self, map: DynamicsMap) -> Vec<usize> {
        self.permutation_by(|i| self.fence.apply(map, i))
    }

    pub fn permutation_by(&self, f: impl Fn(Ideal) -> Ideal) -> Vec<usize> {
        self.ideals
            .iter()
            .map(|&i| {
                self.position(f(i))
                    .expect("map must send ideals to ideals")
            })
            .collect()
    }

    pub fn orbits(&self, map: DynamicsMap) -> OrbitDecomposition {
        OrbitDecomposition::from_permutation(&self.permutation(map))
    }
}

/// Cycles of a permutation of ideal positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

pub fn orbit_decomposition(index: &IdealIndex, map: DynamicsMap) -> OrbitDecomposition {
    index.orbits(map)
}

impl OrbitDecomposition {
    /// Each cycle starts at its smallest position; cycles are listed by that
    /// starting position.
    pub fn from_permutation(perm: &[usize]) -> Self {
        let mut orbit_of = vec![usize::MAX; perm.len()];
        let mut orbits = Vec::new();
        for start in 0..perm.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut cycle = Vec::new();
            let mut pos = start;
            loop {
                orbit_of[pos] = id;
                cycle.push(pos);
                pos = perm[pos];
                if pos == start {
                    break;
                }
                assert!(orbit_of[pos] == usize::MAX, "map is not a permutation");
            }
            orbits.push(cycle);
        }
        OrbitDecomposition { orbits, orbit_of }
    }

    /// Orbits of the group generated by several permutations.
    pub fn from_generators(perms: &[&[usize]]) -> Self {
        let len = perms.first().map_or(0, |p| p.len());
        let mut orbit_of = vec![usize::MAX; len];
        let mut orbits = Vec::new();
        for start in 0..len {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut members = vec![start];
            orbit_of[start] = id;
            let mut cursor = 0;
            while cursor < members.len() {
                let pos = members[cursor];
                cursor += 1;
                for perm in perms {
                    let next = perm[pos];
                    if orbit_of[next] == usize::MAX {
                        orbit_of[next] = id;
                        members.push(next);
                    }
                }
            }
            members.sort_unstable();
            orbits.push(members);
        }
        OrbitDecomposition { orbits, orbit_of }
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, pos: usize) -> usize {
        self.orbit_of[pos]
    }

    /// Orbit sizes, sorted.
    pub fn size_multiset(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.orbits.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        sizes
    }
}
