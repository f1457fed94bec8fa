//! Safety signatures and the exact path safety score.
//!
//! A signature stores, per safety level `s`, the total length of path edges
//! whose ESS equals `s`. Lexicographic order on signatures is the safety
//! order: smaller is safer. The scalar score is only materialized for
//! reporting, as an exact rational `1 / den`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{domain, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SafetySignature(SmallVec<[u64; INLINE_LEVELS]>);

/// Levels stored without a heap allocation.
const INLINE_LEVELS: usize = 12;

impl SafetySignature {
    pub fn zero(s_max: u32) -> Self {
        SafetySignature(SmallVec::from_elem(0, s_max as usize))
    }

    /// Builds a signature from `d[1..=s_max]` given in level order.
    pub fn from_levels(levels: Vec<u64>) -> Self {
        SafetySignature(SmallVec::from_slice(&levels))
    }

    pub fn s_max(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn levels(&self) -> &[u64] {
        &self.0
    }

    /// The `s`-distance, 1-based.
    pub fn s_distance(&self, s: u32) -> Result<u64> {
        if s == 0 || s > self.s_max() {
            return domain(format!("level {s} outside [1, {}]", self.s_max()));
        }
        Ok(self.0[s as usize - 1])
    }

    pub fn length(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn add_edge(&mut self, ess: u32, length: u64) {
        self.0[ess as usize - 1] += length;
    }

    pub fn with_edge(&self, ess: u32, length: u64) -> Self {
        let mut s = self.clone();
        s.add_edge(ess, length);
        s
    }

    pub fn concat(&self, other: &SafetySignature) -> Self {
        SafetySignature(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Lowest level with a positive distance.
    pub fn min_ess(&self) -> Result<u32> {
        match self.0.iter().position(|&d| d > 0) {
            Some(i) => Ok(i as u32 + 1),
            None => domain("minimum ESS of an empty path"),
        }
    }

    /// Denominator of the score: `sum_s d_c^(s_max - s) * d[s]`.
    pub fn pss_den(&self, d_c: u64) -> BigUint {
        let base = BigUint::from(d_c);
        let mut acc = BigUint::zero();
        for &d in self.0.iter() {
            acc = acc * &base + BigUint::from(d);
        }
        acc
    }

    /// Scales every level by `f`.
    pub fn scaled(&self, f: u64) -> Self {
        SafetySignature(self.0.iter().map(|d| d * f).collect())
    }

    /// Divides every level by `f`; callers guarantee divisibility.
    pub fn unscaled(&self, f: u64) -> Self {
        SafetySignature(self.0.iter().map(|d| d / f).collect())
    }
}

impl fmt::Debug for SafetySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

impl fmt::Display for SafetySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Lexicographic safety comparison; `Less` means `a` is safer.
pub fn compare_safety(a: &SafetySignature, b: &SafetySignature) -> Result<Ordering> {
    if a.s_max() != b.s_max() {
        return domain(format!("signatures with s_max {} and {}", a.s_max(), b.s_max()));
    }
    Ok(a.cmp(b))
}

/// Exact path safety score. The numerator is always one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Pss {
    /// The empty path from a POI to itself.
    Infinite,
    Finite { den: BigUint },
}

impl Pss {
    pub fn to_f64(&self) -> f64 {
        match self {
            Pss::Infinite => f64::INFINITY,
            Pss::Finite { den } => 1.0 / den.to_f64().unwrap_or(f64::INFINITY),
        }
    }
}

impl Ord for Pss {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Pss::Infinite, Pss::Infinite) => Ordering::Equal,
            (Pss::Infinite, _) => Ordering::Greater,
            (_, Pss::Infinite) => Ordering::Less,
            (Pss::Finite { den: a }, Pss::Finite { den: b }) => b.cmp(a),
        }
    }
}

impl PartialOrd for Pss {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pss::Infinite => write!(f, "inf"),
            Pss::Finite { den } => write!(f, "1/{den}"),
        }
    }
}

impl fmt::Debug for Pss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Score of a valid path under `d_c`.
pub fn pss(sig: &SafetySignature, d_c: u64) -> Result<Pss> {
    if d_c <= 1 {
        return domain(format!("d_c must exceed 1, got {d_c}"));
    }
    if sig.length() >= d_c {
        return domain(format!("path of length {} is not valid under d_c {d_c}", sig.length()));
    }
    if sig.is_empty() {
        return Ok(Pss::Infinite);
    }
    Ok(Pss::Finite { den: sig.pss_den(d_c) })
}

/// Total search order on paths: signature first, then the additive edge
/// tie-break sum, which separates distinct simple paths with equal signatures.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct PathCost {
    pub sig: SafetySignature,
    pub tie: u128,
}

impl PathCost {
    pub fn zero(s_max: u32) -> Self {
        PathCost { sig: SafetySignature::zero(s_max), tie: 0 }
    }

    pub fn with_edge(&self, ess: u32, length: u64, tie: u64) -> Self {
        PathCost { sig: self.sig.with_edge(ess, length), tie: self.tie + tie as u128 }
    }

    pub fn concat(&self, other: &PathCost) -> Self {
        PathCost { sig: self.sig.concat(&other.sig), tie: self.tie + other.tie }
    }

    pub fn length(&self) -> u64 {
        self.sig.length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[u64]) -> SafetySignature {
        SafetySignature::from_levels(v.to_vec())
    }

    #[test]
    fn scores_of_the_three_example_paths() {
        let p1 = sig(&[0, 0, 0, 4, 5]);
        let p2 = sig(&[1, 1, 0, 1, 2]);
        let p3 = sig(&[1, 4, 0, 0, 4]);
        assert_eq!(pss(&p1, 10).unwrap().to_string(), "1/45");
        assert_eq!(pss(&p2, 10).unwrap().to_string(), "1/11012");
        assert_eq!(pss(&p3, 10).unwrap().to_string(), "1/14004");
        assert_eq!(compare_safety(&p1, &p2).unwrap(), Ordering::Less);
        assert_eq!(compare_safety(&p2, &p3).unwrap(), Ordering::Less);
        assert_eq!(compare_safety(&p1, &p1).unwrap(), Ordering::Equal);
        assert!(pss(&p1, 10).unwrap() > pss(&p2, 10).unwrap());
    }

    #[test]
    fn s_distance_and_min_ess() {
        let p1 = sig(&[0, 0, 0, 4, 5]);
        assert_eq!(p1.s_distance(4).unwrap(), 4);
        assert_eq!(p1.s_distance(1).unwrap(), 0);
        assert!(p1.s_distance(0).is_err());
        assert!(p1.s_distance(6).is_err());
        assert_eq!(SafetySignature::zero(5).s_distance(3).unwrap(), 0);
        assert_eq!(p1.min_ess().unwrap(), 4);
        assert_eq!(sig(&[1, 1, 0, 1, 2]).min_ess().unwrap(), 1);
        assert!(SafetySignature::zero(5).min_ess().is_err());
    }

    #[test]
    fn pss_domain_errors() {
        assert!(pss(&sig(&[0, 10]), 10).is_err());
        assert!(pss(&sig(&[0, 1]), 1).is_err());
        assert_eq!(pss(&SafetySignature::zero(3), 5).unwrap(), Pss::Infinite);
        assert!(compare_safety(&sig(&[1]), &sig(&[1, 0])).is_err());
    }

    #[test]
    fn edge_extension() {
        let a = SafetySignature::zero(5).with_edge(4, 1);
        assert_eq!(a.with_edge(4, 3).s_distance(4).unwrap(), 4);
    }
}
