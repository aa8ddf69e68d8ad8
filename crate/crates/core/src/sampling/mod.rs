//! Exact samplers for `Q_n^ζ`.
//!
//! The recursive method draws the root out-degree `k` with weight
//! `ω_k [z^m]C^k` and then the child sizes one at a time, the first of `j`
//! siblings sharing `rem` leaves having size `i` with weight
//! `[z^i]C · [z^(rem−i)]C^(j−1)`. Labeled weights are handled by sampling
//! the ordered tree for `ω_k = ζ_k/k!` and labeling its leaves uniformly.

mod exact;
mod float;
pub mod gw;

use std::str::FromStr;

use rand::Rng;

use crate::analytics;
use crate::counting::CountTable;
use crate::error::{Error, Result};
use crate::tree::Tree;
use crate::weights::{Family, Flavor, WeightSeq};

use exact::ExactTables;
use float::FloatTables;

pub use gw::{sample_gw_conditioned, OffspringTable};

/// Sizes up to which `Arithmetic::Auto` uses exact integer tables.
pub const AUTO_EXACT_MAX: usize = 40;

/// Default rejection budget for the Galton–Watson method.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Arithmetic of the recursive method's tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Arithmetic {
    /// Exact big-integer tables; building them costs `O(K n³)` big-number
    /// operations.
    Exact,
    /// Rescaled `f64` tables; requires the characteristic system.
    Float,
    /// Exact up to [`AUTO_EXACT_MAX`] leaves, floating point beyond.
    #[default]
    Auto,
}

/// Sampling method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Counting,
    Gw,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counting" => Ok(Method::Counting),
            "gw" => Ok(Method::Gw),
            _ => Err(Error::Config(format!("unknown sampling method '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Tables {
    Exact(ExactTables),
    Float(FloatTables),
}

/// Precomputed tables for sampling trees with exactly `n` leaves.
#[derive(Clone, Debug)]
pub struct Sampler {
    flavor: Flavor,
    n: usize,
    tables: Tables,
}

impl Sampler {
    pub fn new(w: &WeightSeq, n: usize, arithmetic: Arithmetic) -> Result<Self> {
        if n == 0 {
            return Err(Error::UndefinedMeasure { n });
        }
        let exact = || -> Result<Tables> {
            let table = CountTable::new(w, n);
            if table.partition_sum(n) == num_traits::Zero::zero() {
                return Err(Error::UndefinedMeasure { n });
            }
            Ok(Tables::Exact(ExactTables::new(&table, n)))
        };
        let float = || -> Result<Tables> {
            let sol = analytics::solve(w)?;
            let (r, s) = (sol.r.to_f64(), sol.s.to_f64());
            Ok(Tables::Float(FloatTables::new(w, n, r, s)?))
        };
        let tables = match arithmetic {
            Arithmetic::Exact => exact()?,
            Arithmetic::Float => float()?,
            Arithmetic::Auto if n <= AUTO_EXACT_MAX => exact()?,
            Arithmetic::Auto => match float() {
                Ok(t) => t,
                Err(Error::InvalidWeights(_)) | Err(Error::Solver(_)) => exact()?,
                Err(e) => return Err(e),
            },
        };
        Ok(Sampler { flavor: w.flavor(), n, tables })
    }

    pub fn for_family(f: &Family, n: usize) -> Result<Self> {
        Self::new(&f.weights(), n, Arithmetic::Auto)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.tables, Tables::Exact(_))
    }

    fn degree<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> usize {
        match &self.tables {
            Tables::Exact(t) => t.degree(m, rng),
            Tables::Float(t) => t.degree(m, rng),
        }
    }

    fn first_child<R: Rng + ?Sized>(&self, j: usize, rem: usize, rng: &mut R) -> usize {
        match &self.tables {
            Tables::Exact(t) => t.first_child(j, rem, rng),
            Tables::Float(t) => t.first_child(j, rem, rng),
        }
    }

    /// Out-degrees in preorder of an ordered tree drawn from the ordered
    /// weights `ω`.
    pub fn sample_degrees<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut degrees = Vec::with_capacity(2 * self.n);
        let mut pending = vec![self.n];
        let mut sizes = Vec::new();
        while let Some(m) = pending.pop() {
            if m == 1 {
                degrees.push(0);
                continue;
            }
            let k = self.degree(m, rng);
            degrees.push(k);
            sizes.clear();
            let mut rem = m;
            for j in (2..=k).rev() {
                let i = self.first_child(j, rem, rng);
                sizes.push(i);
                rem -= i;
            }
            sizes.push(rem);
            pending.extend(sizes.iter().rev());
        }
        degrees
    }

    /// An unlabeled ordered tree drawn from the ordered weights.
    pub fn sample_shape<R: Rng + ?Sized>(&self, rng: &mut R) -> Tree {
        Tree::from_preorder_degrees(&self.sample_degrees(rng)).expect("sampler emits valid degree sequences")
    }

    /// A tree drawn from `Q_n^ζ`: the ordered tree itself for ordered
    /// weights, a uniformly labeled canonical tree for labeled ones.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Tree {
        let shape = self.sample_shape(rng);
        match self.flavor {
            Flavor::Ordered => shape,
            Flavor::Labeled => shape.label_uniformly(rng).expect("fresh shape is unlabeled").canonicalize(),
        }
    }
}

/// One draw from `Q_n^ζ` for ordered weights.
pub fn sample_ordered<R: Rng + ?Sized>(w: &WeightSeq, n: usize, rng: &mut R) -> Result<Tree> {
    if w.flavor() != Flavor::Ordered {
        return Err(Error::InvalidWeights("expected ordered weights".into()));
    }
    Ok(Sampler::new(w, n, Arithmetic::Auto)?.sample(rng))
}

/// One draw from `Q_n^ζ` for labeled weights.
pub fn sample_labeled<R: Rng + ?Sized>(w: &WeightSeq, n: usize, rng: &mut R) -> Result<Tree> {
    if w.flavor() != Flavor::Labeled {
        return Err(Error::InvalidWeights("expected labeled weights".into()));
    }
    Ok(Sampler::new(w, n, Arithmetic::Auto)?.sample(rng))
}

/// A uniform tree of family `f` with `n` leaves.
pub fn sample_family<R: Rng + ?Sized>(f: &Family, n: usize, rng: &mut R) -> Result<Tree> {
    Ok(Sampler::for_family(f, n)?.sample(rng))
}

/// A uniform tree of family `f` by conditioned Galton–Watson rejection.
pub fn sample_family_gw<R: Rng + ?Sized>(f: &Family, n: usize, rng: &mut R, max_attempts: u64) -> Result<Tree> {
    let xi = analytics::family_offspring(f)?;
    sample_gw_conditioned(&xi, n, f.is_labeled(), rng, max_attempts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::enumerate;
    use crate::rng::stream;
    use std::collections::HashMap;

    #[test]
    fn single_leaf() {
        let mut rng = stream(1, 0);
        assert_eq!(sample_family(&Family::P1, 1, &mut rng).unwrap(), Tree::leaf());
        assert_eq!(sample_family(&Family::P4, 1, &mut rng).unwrap(), Tree::labeled_leaf(1));
    }

    #[test]
    fn support_and_determinism() {
        for f in Family::SCHRODER {
            let support = enumerate(&f, 5).unwrap();
            let s = Sampler::for_family(&f, 5).unwrap();
            let mut rng = stream(9, 0);
            let mut seen: HashMap<Tree, usize> = HashMap::new();
            for _ in 0..3000 {
                *seen.entry(s.sample(&mut rng)).or_default() += 1;
            }
            assert!(seen.keys().all(|t| support.contains(t)), "{f}");
            assert_eq!(seen.len(), support.len(), "{f}");
            let a = s.sample(&mut stream(3, 5));
            assert_eq!(a, s.sample(&mut stream(3, 5)));
        }
    }

    #[test]
    fn float_tables_agree_in_support() {
        for f in Family::SCHRODER {
            let s = Sampler::new(&f.weights(), 6, Arithmetic::Float).unwrap();
            assert!(!s.is_exact());
            let support = enumerate(&f, 6).unwrap();
            let mut rng = stream(2, 0);
            for _ in 0..200 {
                assert!(support.contains(&s.sample(&mut rng)), "{f}");
            }
        }
    }

    #[test]
    fn gw_support() {
        for f in Family::SCHRODER {
            let support = enumerate(&f, 4).unwrap();
            let mut rng = stream(5, 0);
            for _ in 0..200 {
                let t = sample_family_gw(&f, 4, &mut rng, 100_000).unwrap();
                assert!(support.contains(&t), "{f}");
            }
        }
    }

    #[test]
    fn retry_budget() {
        let mut rng = stream(5, 0);
        let err = sample_family_gw(&Family::P1, 501, &mut rng, 3).unwrap_err();
        assert!(matches!(err, Error::RetryBudget { attempts: 3 }));
    }

    #[test]
    fn large_sizes_stay_in_family() {
        let mut rng = stream(11, 0);
        for f in Family::SCHRODER {
            let s = Sampler::for_family(&f, 300).unwrap();
            let t = s.sample_shape(&mut rng);
            assert_eq!(t.leaf_count(), 300);
            assert!(!t.has_unary_vertex());
            if f.is_binary() {
                assert!(t.is_binary());
            }
        }
    }
}
