//! Exact counting through the functional equation `C = ζ_0 z + G(C)`,
//! exact expectations of additive functionals, and a brute-force
//! enumeration oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{AddAssign, Mul};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::tree::Tree;
use crate::weights::{factorial, Family, Flavor, WeightSeq};

/// Default enumeration caps.
pub const ORDERED_ENUM_CAP: usize = 8;
pub const LABELED_ENUM_CAP: usize = 7;

/// Coefficients of `C` together with its power table, up to a fixed order.
///
/// Internally the table is kept in the form that stays integral for
/// integer weights: for ordered weights `u_m = [z^m]C` and
/// `T[k][m] = [z^m]C^k`; for labeled weights `u_m = m![z^m]C` and
/// `T[k][m] = m![z^m]C^k / k!` (partial Bell numbers in the `u_m`).
#[derive(Clone, Debug)]
pub struct CountTable {
    weights: WeightSeq,
    order: usize,
    u: Vec<BigRational>,
    table: Vec<Vec<BigRational>>,
    binom: Vec<Vec<BigInt>>,
}

fn pascal(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![BigInt::one(); m + 1];
        for i in 1..m {
            row[i] = &rows[m - 1][i - 1] + &rows[m - 1][i];
        }
        rows.push(row);
    }
    rows
}

/// The recurrence behind [`CountTable`], generic so that integral weights
/// can run on plain integers. `mult[k]` is `ζ_k` (labeled) or `ω_k`
/// (ordered) and `binom` is Pascal's triangle (labeled only).
fn build_table<T>(n: usize, kmax: usize, degs: &[usize], leaf: T, mult: &[T], binom: &[Vec<T>]) -> (Vec<T>, Vec<Vec<T>>)
where
    T: Clone + Zero + One + AddAssign,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let labeled = !binom.is_empty();
    let mut u = vec![T::zero(); n + 1];
    let mut table = vec![vec![T::zero(); n + 1]; kmax + 1];
    table[0][0] = T::one();
    for m in 1..=n {
        // Rows k ≥ 2 only involve u_1 … u_{m−1}.
        for k in (2..=kmax.min(m)).rev() {
            let mut acc = T::zero();
            for j in 1..=m + 1 - k {
                let prev = &table[k - 1][m - j];
                if prev.is_zero() || u[j].is_zero() {
                    continue;
                }
                let term = &u[j] * prev;
                acc += if labeled { &term * &binom[m - 1][j - 1] } else { term };
            }
            table[k][m] = acc;
        }
        let mut um = if m == 1 { leaf.clone() } else { T::zero() };
        for &k in degs.iter().filter(|&&k| k <= m) {
            um += &mult[k] * &table[k][m];
        }
        u[m] = um.clone();
        if kmax >= 1 {
            table[1][m] = um;
        }
    }
    (u, table)
}

impl CountTable {
    pub fn new(weights: &WeightSeq, order: usize) -> Self {
        let n = order.max(1);
        let kmax = weights.max_degree().map_or(n, |d| d.min(n));
        let labeled = weights.flavor() == Flavor::Labeled;
        let binom = if labeled { pascal(n) } else { Vec::new() };
        let degs = weights.branching_degrees(kmax);
        let mult: Vec<BigRational> =
            (0..=kmax).map(|k| if labeled { weights.weight(k) } else { weights.ordered_weight(k) }).collect();
        let leaf = weights.weight(0);

        let integral = leaf.is_integer() && degs.iter().all(|&k| mult[k].is_integer());
        let (u, table) = if integral {
            // Far cheaper than rationals: no normalization after each step.
            let mult: Vec<BigInt> = mult.iter().map(|q| q.to_integer()).collect();
            let (u, table) = build_table(n, kmax, &degs, leaf.to_integer(), &mult, &binom);
            let lift = |v: Vec<BigInt>| v.into_iter().map(BigRational::from_integer).collect::<Vec<_>>();
            (lift(u), table.into_iter().map(lift).collect())
        } else {
            let binom_q: Vec<Vec<BigRational>> =
                binom.iter().map(|row| row.iter().cloned().map(BigRational::from_integer).collect()).collect();
            build_table(n, kmax, &degs, leaf, &mult, &binom_q)
        };
        CountTable { weights: weights.clone(), order: n, u, table, binom }
    }

    pub fn weights(&self) -> &WeightSeq {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Largest out-degree represented in the table.
    pub fn max_degree(&self) -> usize {
        self.table.len() - 1
    }

    fn labeled(&self) -> bool {
        self.weights.flavor() == Flavor::Labeled
    }

    /// `[z^n]C`.
    pub fn coeff(&self, n: usize) -> BigRational {
        if self.labeled() {
            &self.u[n] / BigRational::from_integer(factorial(n))
        } else {
            self.u[n].clone()
        }
    }

    /// Total weight of all trees with `n` leaves: `[z^n]C` for ordered
    /// weights, `n![z^n]C` for labeled ones.
    pub fn partition_sum(&self, n: usize) -> BigRational {
        self.u[n].clone()
    }

    /// Relative weight of root degree `k` among trees with `m` leaves
    /// (any positive multiple of `ζ_k·[z^m]C^k` that is common to all `k`).
    pub fn degree_weight(&self, k: usize, m: usize) -> BigRational {
        if k < 2 || k > self.max_degree() || k > m {
            return BigRational::zero();
        }
        let w = if self.labeled() { self.weights.weight(k) } else { self.weights.ordered_weight(k) };
        w * &self.table[k][m]
    }

    /// Relative weight of the first of `j` sibling subtrees having `i`
    /// leaves when the `j` subtrees hold `rem` leaves in total.
    pub fn first_child_weight(&self, i: usize, j: usize, rem: usize) -> BigRational {
        if i == 0 || i > rem || j == 0 || rem - i < j - 1 {
            return BigRational::zero();
        }
        let w = &self.u[i] * &self.table[j - 1][rem - i];
        if self.labeled() {
            w * BigRational::from_integer(self.binom[rem][i].clone())
        } else {
            w
        }
    }

    /// `C` as a truncated series of this table's order.
    pub fn series(&self) -> TruncatedSeries {
        TruncatedSeries::from_coeffs((0..=self.order).map(|m| self.coeff(m)).collect(), self.order)
    }
}

/// The prefix `c_0 … c_N` of the solution of `C = ζ_0 z + G(C)`.
pub fn series_c(weights: &WeightSeq, order: usize) -> TruncatedSeries {
    CountTable::new(weights, order).series().truncate(order)
}

/// `G_ζ` as a truncated series, `G(w) = Σ_{k≥2} ω_k w^k`.
pub fn series_g(weights: &WeightSeq, order: usize) -> TruncatedSeries {
    let coeffs = (0..=order).map(|k| if k < 2 { BigRational::zero() } else { weights.ordered_weight(k) }).collect();
    TruncatedSeries::from_coeffs(coeffs, order)
}

/// Exact number of trees of family `f` with `n` leaves.
pub fn family_count(f: &Family, n: usize) -> Result<BigInt> {
    let w = f.weights();
    integral(CountTable::new(&w, n).partition_sum(n))
}

/// Counts for sizes `1..=n`.
pub fn family_counts(f: &Family, n: usize) -> Result<Vec<BigInt>> {
    let table = CountTable::new(&f.weights(), n);
    (1..=n).map(|m| integral(table.partition_sum(m))).collect()
}

fn integral(x: BigRational) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::Inconsistent(format!("total weight {x} is not an integer count")))
    }
}

/// All trees with positive weight and `n` leaves, canonical, sorted and
/// without duplicates.
pub fn enumerate(f: &Family, n: usize) -> Result<Vec<Tree>> {
    enumerate_weights(&f.weights(), n, ORDERED_ENUM_CAP, LABELED_ENUM_CAP)
}

pub fn enumerate_weights(w: &WeightSeq, n: usize, ordered_cap: usize, labeled_cap: usize) -> Result<Vec<Tree>> {
    match w.flavor() {
        Flavor::Ordered => {
            if n > ordered_cap {
                return Err(Error::CapExceeded { n, cap: ordered_cap });
            }
            let mut out = ordered_trees(w, n);
            out.sort();
            Ok(out)
        }
        Flavor::Labeled => {
            if n > labeled_cap {
                return Err(Error::CapExceeded { n, cap: labeled_cap });
            }
            let shapes: BTreeSet<Tree> = ordered_trees(w, n).iter().map(Tree::canonicalize).collect();
            let mut out = BTreeSet::new();
            for shape in &shapes {
                for perm in (1..=n as u32).permutations(n) {
                    out.insert(shape.with_leaf_labels(&perm).canonicalize());
                }
            }
            Ok(out.into_iter().collect())
        }
    }
}

/// Ordered unlabeled trees with `n` leaves whose out-degrees all carry
/// positive weight, by composition recursion.
pub(crate) fn ordered_trees(w: &WeightSeq, n: usize) -> Vec<Tree> {
    let mut memo: Vec<Vec<Tree>> = vec![Vec::new(); n + 1];
    for m in 1..=n {
        let mut here = Vec::new();
        if m == 1 && !w.weight(0).is_zero() {
            here.push(Tree::leaf());
        }
        for k in w.branching_degrees(m) {
            for comp in compositions(m, k) {
                let lists: Vec<&Vec<Tree>> = comp.iter().map(|&p| &memo[p]).collect();
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                for kids in lists.into_iter().map(|l| l.iter()).multi_cartesian_product() {
                    here.push(Tree::node(kids.into_iter().cloned().collect()));
                }
            }
        }
        memo[m] = here;
    }
    std::mem::take(&mut memo[n])
}

/// Compositions of `m` into `k` positive parts.
fn compositions(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    if m < k {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 1..=m - (k - 1) {
        for mut rest in compositions(m - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exact expectations of additive functionals under `Q_n^ζ` as ratios of
/// series coefficients. Series are built once, to a fixed order.
#[derive(Clone, Debug)]
pub struct ExactExpectations {
    zeta0: BigRational,
    c: TruncatedSeries,
    g_prime_c: TruncatedSeries,
    c_prime: TruncatedSeries,
}

impl ExactExpectations {
    pub fn new(weights: &WeightSeq, order: usize) -> Self {
        let order = order.max(1);
        let c = series_c(weights, order);
        let g_prime = series_g(weights, order + 1).derivative().truncate(order);
        let g_prime_c = g_prime.compose(&c);
        let c_prime = c.derivative();
        ExactExpectations { zeta0: weights.weight(0), c, g_prime_c, c_prime }
    }

    pub fn order(&self) -> usize {
        self.c.order()
    }

    fn ratio(&self, numer: &TruncatedSeries, n: usize) -> Result<BigRational> {
        if n == 0 || n > self.order() {
            return Err(Error::UndefinedMeasure { n });
        }
        let d = self.c.coeff(n);
        if d.is_zero() {
            return Err(Error::UndefinedMeasure { n });
        }
        Ok(numer.coeff(n) / d)
    }

    /// `Ξ_k = ζ_0 z [G′(C)]^k`: leaves at height `k`.
    pub fn leaf_profile_series(&self, k: usize) -> TruncatedSeries {
        self.g_prime_c.pow(k).shift(1).scale(&self.zeta0)
    }

    /// `Λ_k = C [G′(C)]^k`: vertices at height `k`.
    pub fn node_profile_series(&self, k: usize) -> TruncatedSeries {
        &self.c * &self.g_prime_c.pow(k)
    }

    /// Sum of leaf heights: `z (C′)² / ζ_0 − z C′`.
    pub fn sum_heights_series(&self) -> TruncatedSeries {
        let sq = (&self.c_prime * &self.c_prime).scale(&(BigRational::one() / &self.zeta0));
        (&sq - &self.c_prime).shift(1)
    }

    pub fn leaf_profile(&self, n: usize, k: usize) -> Result<BigRational> {
        self.ratio(&self.leaf_profile_series(k), n)
    }

    pub fn node_profile(&self, n: usize, k: usize) -> Result<BigRational> {
        self.ratio(&self.node_profile_series(k), n)
    }

    pub fn sum_leaf_heights(&self, n: usize) -> Result<BigRational> {
        self.ratio(&self.sum_heights_series(), n)
    }
}

/// `E[#leaves at height k]` under `Q_n^ζ`.
pub fn exact_leaf_profile_expectation(w: &WeightSeq, n: usize, k: usize) -> Result<BigRational> {
    ExactExpectations::new(w, n).leaf_profile(n, k)
}

/// `E[#vertices at height k]` under `Q_n^ζ`.
pub fn exact_node_profile_expectation(w: &WeightSeq, n: usize, k: usize) -> Result<BigRational> {
    ExactExpectations::new(w, n).node_profile(n, k)
}

/// `E[φ]`, the expected sum of leaf heights under `Q_n^ζ`.
pub fn exact_sum_leaf_heights_expectation(w: &WeightSeq, n: usize) -> Result<BigRational> {
    ExactExpectations::new(w, n).sum_leaf_heights(n)
}

/// Brute-force check that for each leaf-labeled tree `t` without unary
/// vertices, (#ordered trees of its shape) × (#labelings of one ordered
/// representative giving `t`) equals `∏ deg(v)!` over the shape.
pub fn ordered_label_identity_check(n: usize) -> Result<bool> {
    if n > 6 {
        return Err(Error::CapExceeded { n, cap: 6 });
    }
    let ordered_w = Family::P2.weights();
    let mut embeddings: HashMap<Tree, u64> = HashMap::new();
    for t in ordered_trees(&ordered_w, n) {
        *embeddings.entry(t.canonicalize()).or_default() += 1;
    }
    let mut labelings: BTreeMap<Tree, u64> = BTreeMap::new();
    let labeled = enumerate(&Family::P4, n)?;
    for t in &labeled {
        let shape = t.forget_labels().canonicalize();
        let hits = (1..=n as u32)
            .permutations(n)
            .filter(|p| shape.with_leaf_labels(p).canonicalize() == *t)
            .count() as u64;
        labelings.insert(t.clone(), hits);
    }
    Ok(labeled.iter().all(|t| {
        let shape = t.forget_labels().canonicalize();
        let lhs = BigInt::from(embeddings.get(&shape).copied().unwrap_or(0) * labelings[t]);
        let rhs = shape.out_degrees().into_iter().fold(BigInt::one(), |acc, d| acc * factorial(d));
        lhs == rhs
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::rat;

    fn ints(s: &TruncatedSeries) -> Vec<BigRational> {
        s.coeffs().to_vec()
    }

    #[test]
    fn catalan_and_double_factorial() {
        let c = series_c(&Family::P1.weights(), 5);
        assert_eq!(ints(&c), [0, 1, 1, 2, 5, 14].map(rat).to_vec());
        let counts = family_counts(&Family::P3, 5).unwrap();
        assert_eq!(counts, [1, 1, 3, 15, 105].map(BigInt::from).to_vec());
    }

    #[test]
    fn only_leaves() {
        let w = WeightSeq::finite(Flavor::Ordered, vec![rat(1)]).unwrap();
        assert_eq!(series_c(&w, 6), TruncatedSeries::monomial(rat(1), 1, 6));
    }

    #[test]
    fn functional_equation_holds() {
        for f in Family::SCHRODER {
            let w = f.weights();
            let c = series_c(&w, 12);
            let rhs = &TruncatedSeries::monomial(w.weight(0), 1, 12) + &series_g(&w, 12).compose(&c);
            assert_eq!(c, rhs, "{f}");
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(family_count(&Family::P4, 3).unwrap(), BigInt::from(4));
        assert_eq!(family_count(&Family::P2, 4).unwrap(), BigInt::from(11));
        assert_eq!(family_count(&Family::P3, 1).unwrap(), BigInt::from(1));
    }

    #[test]
    fn enumeration_matches_counts() {
        for f in Family::SCHRODER {
            for n in 1..=5 {
                let trees = enumerate(&f, n).unwrap();
                assert_eq!(BigInt::from(trees.len()), family_count(&f, n).unwrap(), "{f} n={n}");
            }
        }
        assert!(matches!(enumerate(&Family::P3, 8), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn three_leaf_expectations() {
        let w = Family::P4.weights();
        assert_eq!(exact_leaf_profile_expectation(&w, 3, 1).unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(exact_node_profile_expectation(&w, 3, 1).unwrap(), BigRational::new(9.into(), 4.into()));
        assert_eq!(exact_sum_leaf_heights_expectation(&w, 3).unwrap(), BigRational::new(9.into(), 2.into()));
        let p3 = Family::P3.weights();
        assert_eq!(exact_sum_leaf_heights_expectation(&p3, 3).unwrap(), rat(5));
        assert_eq!(exact_leaf_profile_expectation(&p3, 2, 1).unwrap(), rat(2));
        assert_eq!(exact_node_profile_expectation(&p3, 4, 1).unwrap(), rat(2));
        assert_eq!(exact_node_profile_expectation(&p3, 7, 0).unwrap(), rat(1));
        assert_eq!(exact_sum_leaf_heights_expectation(&p3, 1).unwrap(), rat(0));
    }

    #[test]
    fn undefined_measure() {
        let ternary = WeightSeq::finite(Flavor::Ordered, vec![rat(1), rat(0), rat(0), rat(1)]).unwrap();
        assert!(matches!(exact_leaf_profile_expectation(&ternary, 2, 1), Err(Error::UndefinedMeasure { n: 2 })));
    }

    #[test]
    fn label_identity_small() {
        for n in 1..=4 {
            assert!(ordered_label_identity_check(n).unwrap());
        }
    }
}
