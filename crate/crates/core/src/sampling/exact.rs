//! Integer cumulative tables for the recursive method.
//!
//! Every draw is an exact uniform integer below a table total, so the
//! sampled law is exactly `Q_n^ζ` for rational weights.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::counting::CountTable;

/// Cumulative integer weights: entry `i` covers `[cum[i−1], cum[i])`.
#[derive(Clone, Debug)]
pub(crate) struct CumTable {
    values: Vec<usize>,
    cum: Vec<BigUint>,
}

impl CumTable {
    fn new(entries: Vec<(usize, BigRational)>) -> Self {
        let entries: Vec<_> = entries.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        let lcm = entries.iter().fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
        let mut total = BigUint::zero();
        let mut values = Vec::with_capacity(entries.len());
        let mut cum = Vec::with_capacity(entries.len());
        for (v, w) in entries {
            let scaled = (w * BigRational::from_integer(lcm.clone())).to_integer();
            total += scaled.to_biguint().expect("weights are non-negative");
            values.push(v);
            cum.push(total.clone());
        }
        CumTable { values, cum }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.values.len() == 1 {
            return self.values[0];
        }
        let total = self.cum.last().expect("non-empty table");
        let u = rng.gen_biguint_below(total);
        let i = self.cum.partition_point(|c| *c <= u);
        self.values[i]
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ExactTables {
    /// `degree[m]`: root out-degree of an `m`-leaf tree.
    degree: Vec<Option<CumTable>>,
    /// `first[j][rem]`: size of the first of `j ≥ 2` siblings holding `rem` leaves.
    first: Vec<Vec<Option<CumTable>>>,
}

impl ExactTables {
    pub(crate) fn new(table: &CountTable, n: usize) -> Self {
        let kmax = table.max_degree().min(n);
        let degree = (0..=n)
            .map(|m| {
                if m < 2 {
                    return None;
                }
                let e: Vec<_> = (2..=kmax.min(m)).map(|k| (k, table.degree_weight(k, m))).collect();
                let t = CumTable::new(e);
                (!t.values.is_empty()).then_some(t)
            })
            .collect();
        let first = (0..=kmax)
            .map(|j| {
                (0..=n)
                    .map(|rem| {
                        if j < 2 || rem < j {
                            return None;
                        }
                        let e: Vec<_> = (1..=rem + 1 - j).map(|i| (i, table.first_child_weight(i, j, rem))).collect();
                        let t = CumTable::new(e);
                        (!t.values.is_empty()).then_some(t)
                    })
                    .collect()
            })
            .collect();
        ExactTables { degree, first }
    }

    pub(crate) fn degree<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> usize {
        self.degree[m].as_ref().expect("positive weight at this size").draw(rng)
    }

    pub(crate) fn first_child<R: Rng + ?Sized>(&self, j: usize, rem: usize, rng: &mut R) -> usize {
        self.first[j][rem].as_ref().expect("positive weight for this split").draw(rng)
    }
}
