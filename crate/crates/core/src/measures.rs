//! Weighted measures `Q_n^ζ`, Galton–Watson offspring laws, and the Gibbs
//! fragmentation model.
//!
//! Exact-rational paths (`tree_weight`, `QMeasure`, `GibbsModel`) and
//! high-precision real paths (`OffspringDist`) are kept apart; the only
//! bridge is `OffspringDist::exact`, filled when `(r, s)` are rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::counting::CountTable;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::tree::Tree;
use crate::weights::{factorial, Flavor, WeightSeq};

/// `w_ζ(t) = ∏_v ζ_{deg(v)}`.
pub fn tree_weight(w: &WeightSeq, t: &Tree) -> BigRational {
    t.out_degrees().into_iter().fold(BigRational::one(), |acc, d| acc * w.weight(d))
}

/// The tilted weights `ζ̃_0 = aζ_0`, `ζ̃_i = b^(i−1)ζ_i`.
pub fn tilt(w: &WeightSeq, a: &BigRational, b: &BigRational) -> Result<WeightSeq> {
    w.tilt(a, b)
}

/// `Q_n^ζ` for every `n` up to a fixed order, with cached partition sums.
#[derive(Clone, Debug)]
pub struct QMeasure {
    table: CountTable,
}

impl QMeasure {
    pub fn new(w: &WeightSeq, max_n: usize) -> Self {
        QMeasure { table: CountTable::new(w, max_n) }
    }

    pub fn weights(&self) -> &WeightSeq {
        self.table.weights()
    }

    /// Exact probability of `t`. Labeled weights expect a valid leaf-labeled
    /// tree (compared up to child order), ordered weights an unlabeled one.
    pub fn probability(&self, t: &Tree) -> Result<BigRational> {
        let w = self.table.weights();
        match (w.flavor(), t.is_labeled()) {
            (Flavor::Labeled, false) => return Err(Error::Labels("labeled weights need a leaf-labeled tree".into())),
            (Flavor::Ordered, true) => return Err(Error::Labels("ordered weights need an unlabeled tree".into())),
            _ => t.validate()?,
        }
        let n = t.leaf_count();
        if n > self.table.order() {
            return Err(Error::CapExceeded { n, cap: self.table.order() });
        }
        let z = self.table.partition_sum(n);
        if z.is_zero() {
            return Err(Error::UndefinedMeasure { n });
        }
        Ok(tree_weight(w, t) / z)
    }
}

/// `Q_n^ζ(t)` with `n` the leaf count of `t`.
pub fn q_probability(w: &WeightSeq, t: &Tree) -> Result<BigRational> {
    QMeasure::new(w, t.leaf_count()).probability(t)
}

/// How the probabilities continue past the explicit head.
#[derive(Clone, Debug)]
pub enum OffspringTail {
    /// `ξ_{start+i} = first · ratio^i`.
    Geometric { start: usize, first: Real, ratio: Real },
    /// `ξ_{start}` = first, `ξ_{i+1} = ξ_i · rate / (i+1)`.
    Factorial { start: usize, first: Real, rate: Real },
}

/// An offspring law `ξ` on `{0, 1, 2, …}`.
#[derive(Clone, Debug)]
pub struct OffspringDist {
    head: Vec<Real>,
    tail: Option<OffspringTail>,
    exact: Option<Vec<BigRational>>,
    mean: Real,
    variance: Real,
    critical: bool,
}

/// Absolute tolerance on `Σ ξ_i = 1`.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Tolerance on `mean = 1` for the criticality flag.
pub const CRITICAL_TOLERANCE: f64 = 1e-10;

impl OffspringDist {
    /// `ξ_0 = ζ_0 r/s` and `ξ_j = s^(j−1) ω_j` for `j ≥ 1`, where `ω_j` is
    /// `ζ_j/j!` for labeled weights and `ζ_j` for ordered ones.
    pub fn from_weights(w: &WeightSeq, r: &Real, s: &Real) -> Result<Self> {
        if !r.is_positive() || !s.is_positive() {
            return Err(Error::Inconsistent("r and s must be positive".into()));
        }
        let omega = |j: usize| Real::from_rational(&w.ordered_weight(j));
        let tail_start = w.tail().map(|t| t.start);
        let head_len = tail_start.unwrap_or(w.max_degree().unwrap_or(0) + 1);
        let mut head = Vec::with_capacity(head_len);
        head.push(&(&Real::from_rational(&w.weight(0)) * r) / s);
        for j in 1..head_len {
            head.push(&s.powi(j - 1) * &omega(j));
        }
        let tail = w.tail().map(|t| {
            let first = &s.powi(t.start - 1) * &omega(t.start);
            let q = &Real::from_rational(&t.ratio) * s;
            match w.flavor() {
                Flavor::Ordered => OffspringTail::Geometric { start: t.start, first, ratio: q },
                Flavor::Labeled => OffspringTail::Factorial { start: t.start, first, rate: q },
            }
        });
        Self::assemble(head, tail, None)
    }

    /// As [`from_weights`](Self::from_weights), exactly, for finitely
    /// supported weights and rational `(r, s)`.
    pub fn from_weights_exact(w: &WeightSeq, r: &BigRational, s: &BigRational) -> Result<Self> {
        let top = w
            .max_degree()
            .ok_or_else(|| Error::Inconsistent("exact offspring laws need finitely supported weights".into()))?;
        if !r.is_positive() || !s.is_positive() {
            return Err(Error::Inconsistent("r and s must be positive".into()));
        }
        let mut exact = vec![w.weight(0) * r / s];
        for j in 1..=top {
            exact.push(num_traits::pow(s.clone(), j - 1) * w.ordered_weight(j));
        }
        let total: BigRational = exact.iter().sum();
        if !total.is_one() {
            return Err(Error::Inconsistent(format!("probabilities sum to {total}, not 1")));
        }
        let head = exact.iter().map(Real::from_rational).collect();
        Self::assemble(head, None, Some(exact))
    }

    fn assemble(head: Vec<Real>, tail: Option<OffspringTail>, exact: Option<Vec<BigRational>>) -> Result<Self> {
        if head.iter().any(|p| !p.is_finite() || *p < Real::zero()) {
            return Err(Error::Inconsistent("negative or non-finite probability".into()));
        }
        let mut m0 = Real::zero();
        let mut m1 = Real::zero();
        let mut m2 = Real::zero();
        for (j, p) in head.iter().enumerate() {
            let jr = Real::from_u64(j as u64);
            m0 = &m0 + p;
            m1 = &m1 + &(&jr * p);
            m2 = &m2 + &(&(&jr * &jr) * p);
        }
        if let Some(t) = &tail {
            let (t0, t1, t2) = tail_moments(t)?;
            m0 = &m0 + &t0;
            m1 = &m1 + &t1;
            m2 = &m2 + &t2;
        }
        if (m0.to_f64() - 1.0).abs() >= MASS_TOLERANCE {
            return Err(Error::Inconsistent(format!(
                "probabilities sum to {}, not 1: (r, s) do not solve the characteristic equation",
                m0.to_sig_digits(20)
            )));
        }
        let variance = &m2 - &(&m1 * &m1);
        let critical = (m1.to_f64() - 1.0).abs() < CRITICAL_TOLERANCE;
        Ok(OffspringDist { head, tail, exact, mean: m1, variance, critical })
    }

    /// `ξ_i`.
    pub fn prob(&self, i: usize) -> Real {
        if let Some(p) = self.head.get(i) {
            return p.clone();
        }
        match &self.tail {
            Some(OffspringTail::Geometric { start, first, ratio }) if i >= *start => first * &ratio.powi(i - start),
            Some(OffspringTail::Factorial { start, first, rate }) if i >= *start => {
                let mut p = first.clone();
                for k in *start..i {
                    p = &(&p * rate) / &Real::from_u64(k as u64 + 1);
                }
                p
            }
            _ => Real::zero(),
        }
    }

    /// Exact probabilities when the law is rational with finite support.
    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn head(&self) -> &[Real] {
        &self.head
    }

    pub fn tail(&self) -> Option<&OffspringTail> {
        self.tail.as_ref()
    }

    pub fn mean(&self) -> &Real {
        &self.mean
    }

    pub fn variance(&self) -> &Real {
        &self.variance
    }

    pub fn is_critical(&self) -> bool {
        self.critical
    }
}

/// `(Σ ξ, Σ jξ, Σ j²ξ)` over the tail.
fn tail_moments(t: &OffspringTail) -> Result<(Real, Real, Real)> {
    match t {
        OffspringTail::Geometric { start, first, ratio } => {
            if ratio.partial_cmp(&Real::one()) != Some(std::cmp::Ordering::Less) {
                return Err(Error::Inconsistent("geometric tail does not converge (s·ratio ≥ 1)".into()));
            }
            let one = Real::one();
            let q = ratio;
            let om = &one - q;
            let sr = Real::from_u64(*start as u64);
            let m0 = first / &om;
            let m1 = first * &(&(&sr / &om) + &(q / &(&om * &om)));
            let m2 = first
                * &(&(&(&(&sr * &sr) / &om) + &(&(&Real::from_u64(2) * &sr) * &(q / &(&om * &om))))
                    + &(&(q * &(&one + q)) / &om.powi(3)));
            Ok((m0, m1, m2))
        }
        OffspringTail::Factorial { start, first, rate } => {
            let eps = Real::parse("1e-90").expect("literal");
            let (mut m0, mut m1, mut m2) = (Real::zero(), Real::zero(), Real::zero());
            let mut p = first.clone();
            let mut j = *start;
            loop {
                let jr = Real::from_u64(j as u64);
                m0 = &m0 + &p;
                m1 = &m1 + &(&jr * &p);
                m2 = &m2 + &(&(&jr * &jr) * &p);
                // Terms decay super-exponentially once j exceeds the rate.
                if j > *start + 4 && Real::from_u64(j as u64) > rate.abs() && p < eps {
                    break;
                }
                if j > 100_000 {
                    return Err(Error::Inconsistent("offspring tail does not converge".into()));
                }
                j += 1;
                p = &(&p * rate) / &Real::from_u64(j as u64);
            }
            Ok((m0, m1, m2))
        }
    }
}

/// Largest size accepted by [`gibbs_from_weights`].
pub const GIBBS_CAP: usize = 50;

/// The Gibbs fragmentation model with `α_k = ζ_k` and `g(k) = k![z^k]C`.
#[derive(Clone, Debug)]
pub struct GibbsModel {
    alpha: Vec<BigRational>,
    g: Vec<BigRational>,
    z: Vec<BigRational>,
}

impl GibbsModel {
    /// Model from explicit `α` (indexed by `k`) and `g` (indexed by size,
    /// `g[0] = 0`), computing `Z(n)` by summing over integer partitions.
    pub fn new(alpha: Vec<BigRational>, g: Vec<BigRational>) -> Result<Self> {
        let max_n = g.len().saturating_sub(1);
        if max_n > GIBBS_CAP {
            return Err(Error::CapExceeded { n: max_n, cap: GIBBS_CAP });
        }
        let mut z = vec![BigRational::zero(); max_n + 1];
        for (n, zn) in z.iter_mut().enumerate().skip(2) {
            *zn = partition_sum(n, &alpha, &g);
        }
        Ok(GibbsModel { alpha, g, z })
    }

    pub fn max_n(&self) -> usize {
        self.g.len() - 1
    }

    pub fn alpha(&self, k: usize) -> BigRational {
        self.alpha.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn g(&self, n: usize) -> &BigRational {
        &self.g[n]
    }

    /// `Z(n)` for `2 ≤ n ≤ max_n`.
    pub fn z(&self, n: usize) -> &BigRational {
        &self.z[n]
    }

    /// Whether `Z(n) = g(n)` for every computed `n ≥ 2`.
    pub fn is_combinatorial(&self) -> bool {
        (2..=self.max_n()).all(|n| self.z[n] == self.g[n])
    }

    /// Probability of a leaf-labeled fragmentation tree: the product over
    /// internal vertices of `α_k ∏ g(#B_j) / Z(#B)`.
    pub fn tree_probability(&self, t: &Tree) -> Result<BigRational> {
        if !t.is_labeled() {
            return Err(Error::Labels("fragmentation trees are leaf-labeled".into()));
        }
        t.validate()?;
        if t.has_unary_vertex() {
            return Err(Error::InvalidTree("fragmentation trees have no out-degree-one vertex".into()));
        }
        let n = t.leaf_count();
        if n > self.max_n() {
            return Err(Error::CapExceeded { n, cap: self.max_n() });
        }
        let mut p = BigRational::one();
        for v in t.preorder().filter(|v| !v.is_leaf()) {
            let zn = &self.z[v.leaf_count()];
            if zn.is_zero() {
                return Err(Error::UndefinedMeasure { n: v.leaf_count() });
            }
            let blocks: BigRational = v.children().iter().map(|c| self.g[c.leaf_count()].clone()).product();
            p *= self.alpha(v.degree()) * blocks / zn;
        }
        Ok(p)
    }
}

/// `α_k = ζ_k`, `g(k) = k![z^k]C` for `k ≤ max_n`.
pub fn gibbs_from_weights(w: &WeightSeq, max_n: usize) -> Result<GibbsModel> {
    if w.flavor() != Flavor::Labeled {
        return Err(Error::InvalidWeights("the Gibbs model is defined for labeled weights".into()));
    }
    if max_n > GIBBS_CAP {
        return Err(Error::CapExceeded { n: max_n, cap: GIBBS_CAP });
    }
    let table = CountTable::new(w, max_n.max(1));
    let mut g = vec![BigRational::zero()];
    g.extend((1..=max_n).map(|k| table.partition_sum(k)));
    let alpha = (0..=max_n).map(|k| w.weight(k)).collect();
    GibbsModel::new(alpha, g)
}

/// `Z(n) = Σ` over set partitions of `[n]` into `k ≥ 2` blocks of
/// `α_k ∏ g(#B_j)`, grouped by block-size multiset: a multiset `λ` stands
/// for `n! / (∏ λ_j! ∏ mult_m!)` set partitions.
fn partition_sum(n: usize, alpha: &[BigRational], g: &[BigRational]) -> BigRational {
    let nf = factorial(n);
    let mut total = BigRational::zero();
    let mut parts = Vec::new();
    visit_partitions(n, n - 1, &mut parts, &mut |lambda| {
        let k = lambda.len();
        let a = alpha.get(k).cloned().unwrap_or_else(BigRational::zero);
        if a.is_zero() {
            return;
        }
        let mut denom = BigInt::one();
        let mut prod = BigRational::one();
        let mut run = 0usize;
        for (i, &p) in lambda.iter().enumerate() {
            denom *= factorial(p);
            prod *= &g[p];
            run += 1;
            if i + 1 == k || lambda[i + 1] != p {
                denom *= factorial(run);
                run = 0;
            }
        }
        total += a * prod * BigRational::new(nf.clone(), denom);
    });
    total
}

/// Calls `f` on every non-increasing sequence of positive parts summing to
/// `n` with largest part at most `max_part`.
fn visit_partitions(n: usize, max_part: usize, parts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if n == 0 {
        f(parts);
        return;
    }
    for p in (1..=max_part.min(n)).rev() {
        parts.push(p);
        visit_partitions(n - p, p, parts, f);
        parts.pop();
    }
}

/// Converts a probability to `f64`, for reporting.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::parse_set;
    use crate::weights::{rat, Family};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn weights_and_probabilities() {
        let w = WeightSeq::finite(Flavor::Ordered, vec![rat(1), rat(0), rat(3)]).unwrap();
        let cherry = Tree::node(vec![Tree::leaf(), Tree::leaf()]);
        assert_eq!(tree_weight(&w, &cherry), rat(3));
        assert_eq!(tree_weight(&w, &Tree::leaf()), rat(1));
        assert_eq!(q_probability(&Family::P1.weights(), &cherry).unwrap(), rat(1));
        let star = parse_set("{1,2,3}").unwrap();
        assert_eq!(q_probability(&Family::P4.weights(), &star).unwrap(), q(1, 4));
        let fig2 = parse_set("{{1,3},{2,4}}").unwrap();
        assert_eq!(q_probability(&Family::P3.weights(), &fig2).unwrap(), q(1, 15));
        assert!(q_probability(&Family::P4.weights(), &star.forget_labels()).is_err());
    }

    #[test]
    fn tilted_star_weight() {
        let t = tilt(&Family::P4.weights(), &rat(2), &q(1, 2)).unwrap();
        assert_eq!(tree_weight(&t, &parse_set("{1,2,3}").unwrap()), rat(2));
    }

    #[test]
    fn two_point_offspring_is_exact() {
        let d = OffspringDist::from_weights_exact(&Family::P3.weights(), &q(1, 2), &rat(1)).unwrap();
        assert_eq!(d.exact().unwrap(), &[q(1, 2), rat(0), q(1, 2)]);
        assert!(d.is_critical());
        assert!((d.variance().to_f64() - 1.0).abs() < 1e-15);
        assert!(OffspringDist::from_weights_exact(&Family::P3.weights(), &q(1, 3), &rat(1)).is_err());
    }

    #[test]
    fn inconsistent_parameters_rejected() {
        let r = Real::from_f64(0.3);
        let s = Real::from_f64(0.6);
        assert!(matches!(
            OffspringDist::from_weights(&Family::P4.weights(), &r, &s),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn fourth_problem_offspring() {
        let ln2 = Real::from_u64(2).ln();
        let r = &(&Real::from_u64(2) * &ln2) - &Real::one();
        let d = OffspringDist::from_weights(&Family::P4.weights(), &r, &ln2).unwrap();
        assert!(d.is_critical());
        assert!((d.variance().to_f64() - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
        assert!((d.prob(3).to_f64() - std::f64::consts::LN_2.powi(2) / 6.0).abs() < 1e-16);
    }

    #[test]
    fn gibbs_partition_function() {
        let m = gibbs_from_weights(&Family::P4.weights(), 8).unwrap();
        assert_eq!(m.z(3), &rat(4));
        assert!(m.is_combinatorial());
        let star = parse_set("{1,2,3}").unwrap();
        assert_eq!(m.tree_probability(&star).unwrap(), q(1, 4));
        let t = parse_set("{1,{2,3}}").unwrap();
        assert_eq!(m.tree_probability(&t).unwrap(), q(1, 4));
        let p3 = gibbs_from_weights(&Family::P3.weights(), 2).unwrap();
        assert_eq!(p3.z(2), &rat(1));
    }

    #[test]
    fn partitions_count() {
        let mut count = 0;
        visit_partitions(10, 10, &mut Vec::new(), &mut |_| count += 1);
        assert_eq!(count, 42);
    }
}
