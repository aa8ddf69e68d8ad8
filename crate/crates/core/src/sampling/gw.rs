//! Conditioned Galton–Watson trees by rejection.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measures::{OffspringDist, OffspringTail};
use crate::real::Real;
use crate::tree::Tree;

const FULL: u128 = 1 << 64;

/// Inverse-CDF table for an offspring law on 64-bit fixed-point uniforms.
///
/// With `T_i = ⌊F(i)·2^64⌋`, outcome `i` is drawn for `u ∈ [T_{i−1}, T_i)`
/// (left-closed, right-open). A geometric tail beyond the table is drawn by
/// inverting its distribution function; any other tail is tabulated until
/// its remaining mass is below `1e-40`, with the last interval closed at `2^64`.
#[derive(Clone, Debug)]
pub struct OffspringTable {
    thresholds: Vec<u128>,
    geometric: Option<(usize, f64)>,
    unary: bool,
}

impl OffspringTable {
    pub fn new(xi: &OffspringDist) -> Self {
        let mut probs: Vec<Real> = xi.head().to_vec();
        let mut geometric = None;
        match xi.tail() {
            Some(OffspringTail::Geometric { start, ratio, .. }) => {
                geometric = Some((*start, ratio.to_f64().ln()));
            }
            Some(OffspringTail::Factorial { start, rate, .. }) => {
                let eps = Real::parse("1e-40").expect("literal");
                let mut j = *start;
                loop {
                    let p = xi.prob(j);
                    let done = p < eps && Real::from_u64(j as u64) > *rate;
                    probs.push(p);
                    if done {
                        break;
                    }
                    j += 1;
                }
            }
            None => {}
        }
        if let Some(ex) = xi.exact() {
            probs = ex.iter().map(Real::from_rational).collect();
        }
        let mut acc = Real::zero();
        let mut thresholds: Vec<u128> = probs
            .iter()
            .map(|p| {
                acc = &acc + p;
                acc.to_fixed64()
            })
            .collect();
        if geometric.is_none() {
            if let Some(last) = thresholds.last_mut() {
                *last = FULL;
            }
        }
        let unary = xi.prob(1).is_positive();
        OffspringTable { thresholds, geometric, unary }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.next_u64() as u128;
        let i = self.thresholds.partition_point(|&t| t <= u);
        if i < self.thresholds.len() {
            return i;
        }
        let (start, ln_q) = self.geometric.expect("tail beyond the table");
        // P(X = start + i | X ≥ start) = (1 − q) q^i.
        let v = 1.0 - rng.gen::<f64>();
        start + (v.ln() / ln_q).floor() as usize
    }
}

/// Draws unconditioned trees in depth-first order until one has exactly
/// `n` leaves. An attempt is abandoned as soon as its leaves plus its
/// pending subtrees (each of which holds at least one leaf) exceed `n`, or
/// its vertices exceed the cap (`2n − 1` without unary vertices, `64n`
/// otherwise).
pub fn sample_gw_conditioned<R: Rng + ?Sized>(
    xi: &OffspringDist,
    n: usize,
    labeled: bool,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Tree> {
    let table = OffspringTable::new(xi);
    sample_gw_with_table(&table, n, labeled, rng, max_attempts)
}

pub fn sample_gw_with_table<R: Rng + ?Sized>(
    table: &OffspringTable,
    n: usize,
    labeled: bool,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Tree> {
    if n == 0 || max_attempts == 0 {
        return Err(Error::Inconsistent("need n ≥ 1 and at least one attempt".into()));
    }
    let cap = if table.unary { 64 * n } else { 2 * n - 1 };
    let mut degrees = Vec::with_capacity(2 * n);
    for _ in 0..max_attempts {
        degrees.clear();
        let mut open = 1usize;
        let mut leaves = 0usize;
        let mut ok = true;
        while open > 0 {
            let d = table.draw(rng);
            degrees.push(d);
            open = open - 1 + d;
            if d == 0 {
                leaves += 1;
            }
            // Every pending subtree holds at least one more leaf.
            if leaves + open > n || degrees.len() > cap {
                ok = false;
                break;
            }
        }
        if ok && leaves == n {
            let tree = Tree::from_preorder_degrees(&degrees)?;
            return if labeled { Ok(tree.label_uniformly(rng)?.canonicalize()) } else { Ok(tree) };
        }
    }
    Err(Error::RetryBudget { attempts: max_attempts })
}
