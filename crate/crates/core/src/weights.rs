//! Weight sequences `ζ = (ζ_i)` and the four Schröder families.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Ordered trees are counted by ordinary generating functions, leaf-labeled
/// trees by exponential ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Ordered,
    Labeled,
}

/// `ζ_i = coeff · ratio^(i − start)` for every `i ≥ start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricTail {
    pub start: usize,
    pub coeff: BigRational,
    pub ratio: BigRational,
}

/// A sequence of non-negative rational weights indexed by out-degree: an
/// explicit head, optionally followed by a geometric tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSeq {
    flavor: Flavor,
    head: Vec<BigRational>,
    tail: Option<GeometricTail>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl WeightSeq {
    /// Weights with finite support given by `head`.
    pub fn finite(flavor: Flavor, head: Vec<BigRational>) -> Result<Self> {
        Self::build(flavor, head, None)
    }

    /// Weights `head` followed by `ζ_i = coeff · ratio^(i − head.len())`.
    pub fn with_tail(
        flavor: Flavor,
        head: Vec<BigRational>,
        coeff: BigRational,
        ratio: BigRational,
    ) -> Result<Self> {
        let start = head.len();
        Self::build(flavor, head, Some(GeometricTail { start, coeff, ratio }))
    }

    fn build(flavor: Flavor, mut head: Vec<BigRational>, tail: Option<GeometricTail>) -> Result<Self> {
        let tail = tail.filter(|t| !t.coeff.is_zero());
        if tail.is_none() {
            while head.len() > 1 && head.last().is_some_and(Zero::is_zero) {
                head.pop();
            }
        }
        let seq = WeightSeq { flavor, head, tail };
        seq.check()?;
        Ok(seq)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidWeights(m.into()));
        if self.head.iter().any(Signed::is_negative) {
            return bad("weights must be non-negative");
        }
        if self.weight(0).is_zero() {
            return bad("ζ_0 must be positive");
        }
        if !self.weight(1).is_zero() {
            // Unary vertices make the number of trees with n leaves infinite
            // (or the weighted sum convergent only conditionally); not supported.
            return bad("ζ_1 must be zero");
        }
        if let Some(t) = &self.tail {
            if t.coeff.is_negative() || !t.ratio.is_positive() {
                return bad("tail coefficient must be non-negative and ratio positive");
            }
            if t.start < 2 {
                return bad("tail must start at degree 2 or later");
            }
        }
        Ok(())
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn head(&self) -> &[BigRational] {
        &self.head
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    /// `ζ_i`.
    pub fn weight(&self, i: usize) -> BigRational {
        if let Some(t) = &self.tail {
            if i >= t.start {
                return &t.coeff * pow_rat(&t.ratio, i - t.start);
            }
        }
        self.head.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The weight of an out-degree `i` vertex in the ordered tree counting
    /// that has the same generating function: `ζ_i` for ordered weights,
    /// `ζ_i / i!` for labeled ones.
    pub fn ordered_weight(&self, i: usize) -> BigRational {
        match self.flavor {
            Flavor::Ordered => self.weight(i),
            Flavor::Labeled => self.weight(i) / BigRational::from_integer(factorial(i)),
        }
    }

    /// Largest out-degree with positive weight, or `None` for infinite support.
    pub fn max_degree(&self) -> Option<usize> {
        if self.tail.is_some() {
            return None;
        }
        Some(self.head.iter().rposition(|w| !w.is_zero()).unwrap_or(0))
    }

    /// Degrees `2 ≤ k ≤ limit` with positive weight.
    pub fn branching_degrees(&self, limit: usize) -> Vec<usize> {
        let top = self.max_degree().map_or(limit, |d| d.min(limit));
        (2..=top).filter(|&k| !self.weight(k).is_zero()).collect()
    }

    /// Whether the leaf-counting series is aperiodic: the gcd of `k − 1` over
    /// degrees `k ≥ 2` with positive weight is one.
    pub fn is_aperiodic(&self) -> bool {
        let mut g = 0usize;
        let probe = self.max_degree().unwrap_or_else(|| self.tail.as_ref().map_or(0, |t| t.start + 1));
        for k in 2..=probe.max(2) {
            if !self.weight(k).is_zero() {
                g = g.gcd(&(k - 1));
                if g == 1 {
                    return true;
                }
            }
        }
        g == 1
    }

    /// The restricted setting for the asymptotic analysis: `ζ_0 = 1`,
    /// `ζ_1 = 0`, an aperiodic series and at least one branching degree.
    pub fn check_analytic(&self) -> Result<()> {
        if !self.weight(0).is_one() {
            return Err(Error::InvalidWeights("asymptotics need ζ_0 = 1".into()));
        }
        if self.branching_degrees(self.head.len() + 2).is_empty() {
            return Err(Error::InvalidWeights("no out-degree ≥ 2 has positive weight".into()));
        }
        if !self.is_aperiodic() {
            return Err(Error::InvalidWeights("leaf-counting series is periodic".into()));
        }
        Ok(())
    }

    /// The tilted sequence `ζ̃_0 = a ζ_0`, `ζ̃_i = b^(i−1) ζ_i` for `i ≥ 1`.
    pub fn tilt(&self, a: &BigRational, b: &BigRational) -> Result<WeightSeq> {
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::InvalidWeights("tilting parameters must be positive".into()));
        }
        let head = self
            .head
            .iter()
            .enumerate()
            .map(|(i, w)| if i == 0 { a * w } else { w * pow_rat(b, i - 1) })
            .collect();
        let tail = self.tail.as_ref().map(|t| GeometricTail {
            start: t.start,
            coeff: &t.coeff * pow_rat(b, t.start - 1),
            ratio: &t.ratio * b,
        });
        Self::build(self.flavor, head, tail)
    }
}

pub(crate) fn pow_rat(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}

/// Schröder's four problems, or an arbitrary weight sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Binary word bracketings: ordered binary trees.
    P1,
    /// General word bracketings: ordered trees without unary vertices.
    P2,
    /// Binary set bracketings: leaf-labeled unordered binary trees.
    P3,
    /// General set bracketings: leaf-labeled unordered trees without unary vertices.
    P4,
    Custom(WeightSeq),
}

impl Family {
    pub const SCHRODER: [Family; 4] = [Family::P1, Family::P2, Family::P3, Family::P4];

    pub fn weights(&self) -> WeightSeq {
        let binary = |flavor| WeightSeq::finite(flavor, vec![rat(1), rat(0), rat(1)]);
        let general = |flavor| WeightSeq::with_tail(flavor, vec![rat(1), rat(0)], rat(1), rat(1));
        match self {
            Family::P1 => binary(Flavor::Ordered),
            Family::P2 => general(Flavor::Ordered),
            Family::P3 => binary(Flavor::Labeled),
            Family::P4 => general(Flavor::Labeled),
            Family::Custom(w) => Ok(w.clone()),
        }
        .expect("built-in weights are valid")
    }

    pub fn flavor(&self) -> Flavor {
        self.weights().flavor()
    }

    pub fn is_labeled(&self) -> bool {
        self.flavor() == Flavor::Labeled
    }

    pub fn is_binary(&self) -> bool {
        self.weights().max_degree() == Some(2)
    }

    /// The bracketing kind whose trees this family describes, if any.
    pub fn bracketing_kind(&self) -> Option<crate::bracket::BracketingKind> {
        use crate::bracket::BracketingKind::*;
        match self {
            Family::P1 => Some(WordBinary),
            Family::P2 => Some(WordGeneral),
            Family::P3 => Some(SetBinary),
            Family::P4 => Some(SetGeneral),
            Family::Custom(_) => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::P3 => "P3",
            Family::P4 => "P4",
            Family::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P1" | "p1" => Ok(Family::P1),
            "P2" | "p2" => Ok(Family::P2),
            "P3" | "p3" => Ok(Family::P3),
            "P4" | "p4" => Ok(Family::P4),
            _ => Err(Error::InvalidWeights(format!("unknown family '{s}' (expected P1..P4)"))),
        }
    }
}
