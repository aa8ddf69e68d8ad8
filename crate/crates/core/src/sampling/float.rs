//! Floating-point tables for the recursive method at large sizes.
//!
//! Coefficients are rescaled by `r^m` so that they stay of order
//! `m^(−3/2)` instead of growing like `r^(−m)`: `ĉ_m = [z^m]C · r^m` and
//! `P̂[k][m] = [z^m]C^k · r^m`. Degrees above `K` are dropped, with `K`
//! chosen so that the omitted mass `Σ_{k>K} ω_k s^k` is below `1e-30`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::weights::WeightSeq;

const TAIL_MASS: f64 = 1e-30;

#[derive(Clone, Debug)]
pub(crate) struct FloatTables {
    omega: Vec<f64>,
    /// `pow[k][m] = P̂[k][m]`; row 1 is `ĉ`.
    pow: Vec<Vec<f64>>,
}

impl FloatTables {
    pub(crate) fn new(w: &WeightSeq, n: usize, r: f64, s: f64) -> Result<Self> {
        let omega_at = |k: usize| num_traits::ToPrimitive::to_f64(&w.ordered_weight(k)).unwrap_or(f64::NAN);
        let kmax = match w.max_degree() {
            Some(d) => d.min(n),
            None => {
                // Smallest K whose tail mass is negligible; terms eventually decrease.
                let mut k = 2;
                loop {
                    let tail: f64 = (k + 1..k + 400).map(|j| omega_at(j) * s.powi(j as i32)).sum();
                    if tail <= TAIL_MASS || k >= n {
                        break k.min(n.max(2));
                    }
                    k += 1;
                }
            }
        };
        let omega: Vec<f64> = (0..=kmax).map(omega_at).collect();
        if omega.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidWeights("weights out of floating-point range".into()));
        }
        let zeta0 = num_traits::ToPrimitive::to_f64(&w.weight(0)).unwrap_or(f64::NAN);
        let mut pow = vec![vec![0.0f64; n + 1]; kmax + 1];
        pow[0][0] = 1.0;
        for m in 1..=n {
            for k in (2..=kmax.min(m)).rev() {
                let (lower, upper) = pow.split_at_mut(k);
                let c = &lower[1];
                let prev = &lower[k - 1];
                let mut acc = 0.0;
                for j in 1..=m + 1 - k {
                    acc += c[j] * prev[m - j];
                }
                upper[0][m] = acc;
            }
            let mut cm = if m == 1 { zeta0 * r } else { 0.0 };
            for k in 2..=kmax.min(m) {
                cm += omega[k] * pow[k][m];
            }
            if kmax >= 1 {
                pow[1][m] = cm;
            }
        }
        let cn = pow.get(1).map_or(0.0, |row| row[n]);
        if cn.is_nan() || cn <= 0.0 || !cn.is_finite() {
            return Err(Error::UndefinedMeasure { n });
        }
        // The dropped degrees must be negligible even for the smallest coefficient.
        let min_c = pow[1][1..=n].iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        if w.max_degree().is_none() && TAIL_MASS > 1e-12 * min_c {
            return Err(Error::Inconsistent("degree truncation is not negligible at this size".into()));
        }
        Ok(FloatTables { omega, pow })
    }

    pub(crate) fn degree<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> usize {
        let top = (self.omega.len() - 1).min(m);
        let total: f64 = (2..=top).map(|k| self.omega[k] * self.pow[k][m]).sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut last = 2;
        for k in 2..=top {
            let wk = self.omega[k] * self.pow[k][m];
            if wk > 0.0 {
                acc += wk;
                last = k;
                if target < acc {
                    return k;
                }
            }
        }
        last
    }

    /// Size of the first of `j` siblings holding `rem` leaves, visiting the
    /// candidates alternately from both ends (`1, L, 2, L−1, …`), which
    /// finds the typical split (one small, one large part) quickly.
    pub(crate) fn first_child<R: Rng + ?Sized>(&self, j: usize, rem: usize, rng: &mut R) -> usize {
        let c = &self.pow[1];
        let prev = &self.pow[j - 1];
        let total = self.pow[j][rem];
        let target = rng.gen::<f64>() * total;
        let hi_max = rem + 1 - j;
        let (mut lo, mut hi) = (1usize, hi_max);
        let mut acc = 0.0;
        let mut last = 1;
        let mut from_low = true;
        while lo <= hi {
            let i = if from_low { lo } else { hi };
            let wi = c[i] * prev[rem - i];
            if wi > 0.0 {
                acc += wi;
                last = i;
                if target < acc {
                    return i;
                }
            }
            if from_low {
                lo += 1;
            } else {
                hi -= 1;
            }
            from_low = !from_low;
        }
        last
    }
}
