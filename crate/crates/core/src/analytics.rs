//! The characteristic system `s = ζ_0 r + G(s)`, `G′(s) = 1`, the constants
//! derived from it, and checks of coefficient asymptotics.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::counting::CountTable;
use crate::error::{Error, Result};
use crate::measures::OffspringDist;
use crate::real::Real;
use crate::weights::{factorial, Family, Flavor, WeightSeq};

/// Residual tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-40;

/// `G^(d)(w)` for `d ≤ 2`, with `G(w) = Σ_{k≥2} ω_k w^k`.
///
/// Geometric tails use closed forms: `c w^K / (1 − ρw)` for ordered
/// weights (domain `ρw < 1`) and `c ρ^(−K) (e^(ρw) − Σ_{k<K} (ρw)^k/k!)`
/// for labeled ones.
pub fn g_derivative(w: &WeightSeq, x: &Real, d: usize) -> Result<Real> {
    assert!(d <= 2, "only derivatives up to order two are needed");
    let mut acc = Real::zero();
    let top = w.tail().map_or(w.max_degree().unwrap_or(0) + 1, |t| t.start);
    for k in 2..top {
        let om = w.ordered_weight(k);
        if om.is_zero() {
            continue;
        }
        let falling = (0..d).fold(1u64, |a, i| a * (k - i) as u64);
        let term = &(&Real::from_rational(&om) * &Real::from_u64(falling)) * &x.powi(k - d);
        acc = &acc + &term;
    }
    let Some(t) = w.tail() else { return Ok(acc) };
    let c = Real::from_rational(&t.coeff);
    let rho = Real::from_rational(&t.ratio);
    let big_k = t.start;
    let tail = match w.flavor() {
        Flavor::Ordered => {
            let one_minus = &Real::one() - &(&rho * x);
            if !one_minus.is_positive() {
                return Err(Error::Solver(format!(
                    "G is singular at w = {} (need w < {})",
                    x.to_sig_digits(12),
                    (&Real::one() / &rho).to_sig_digits(12)
                )));
            }
            let kf = |e: usize| -> Real {
                if e > big_k {
                    Real::zero()
                } else {
                    let falling = (0..e).fold(1u64, |a, i| a * (big_k - i) as u64);
                    &Real::from_u64(falling) * &x.powi(big_k - e)
                }
            };
            let gf = |e: usize| -> Real {
                let falling = (1..=e).fold(1u64, |a, i| a * i as u64);
                &(&Real::from_u64(falling) * &rho.powi(e)) / &one_minus.powi(e + 1)
            };
            let sum = match d {
                0 => &kf(0) * &gf(0),
                1 => &(&kf(1) * &gf(0)) + &(&kf(0) * &gf(1)),
                _ => &(&(&kf(2) * &gf(0)) + &(&Real::from_u64(2) * &(&kf(1) * &gf(1)))) + &(&kf(0) * &gf(2)),
            };
            &c * &sum
        }
        Flavor::Labeled => {
            let y = &rho * x;
            let mut partial = Real::zero();
            for k in 0..big_k - d {
                partial = &partial + &(&y.powi(k) / &Real::from_rational(&BigRational::from_integer(factorial(k))));
            }
            let scale = if big_k >= d {
                &c / &rho.powi(big_k - d)
            } else {
                &c * &rho.powi(d - big_k)
            };
            &scale * &(&y.exp() - &partial)
        }
    };
    Ok(&acc + &tail)
}

/// Upper end of the domain of `G` on the positive axis, if finite.
fn domain_bound(w: &WeightSeq) -> Option<Real> {
    match (w.flavor(), w.tail()) {
        (Flavor::Ordered, Some(t)) => Some(&Real::one() / &Real::from_rational(&t.ratio)),
        _ => None,
    }
}

/// Solves `G′(s) = 1`, `r = (s − G(s))/ζ_0` by Newton's method safeguarded
/// with bisection on a bracket `[10⁻⁶, s_hi]`, doubling `s_hi` (within the
/// domain of `G`) until `G′(s_hi) > 1`.
pub fn solve_characteristic(w: &WeightSeq, tol: f64) -> Result<(Real, Real)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Solver("tolerance must be positive".into()));
    }
    if w.branching_degrees(w.head().len() + 2).is_empty() {
        return Err(Error::Solver("G is identically zero: no out-degree ≥ 2 has positive weight".into()));
    }
    let one = Real::one();
    let gp = |x: &Real| -> Result<Real> { Ok(&g_derivative(w, x, 1)? - &one) };
    let mut lo = Real::parse("1e-6").expect("literal");
    if gp(&lo)?.is_positive() {
        return Err(Error::Solver("G′(10⁻⁶) already exceeds 1".into()));
    }
    let bound = domain_bound(w);
    let mut hi = Real::one();
    let mut found = false;
    for _ in 0..4000 {
        if let Some(b) = &bound {
            if hi >= *b {
                hi = &(&lo + b) / &Real::from_u64(2);
            }
        }
        if gp(&hi)?.is_positive() {
            found = true;
            break;
        }
        lo = hi.clone();
        hi = match &bound {
            Some(b) => {
                let doubled = &hi * &Real::from_u64(2);
                if doubled < *b {
                    doubled
                } else {
                    &(&hi + b) / &Real::from_u64(2)
                }
            }
            None => &hi * &Real::from_u64(2),
        };
    }
    if !found {
        return Err(Error::Solver("no sign change of G′(s) − 1 found".into()));
    }
    let fine = Real::parse("1e-80").expect("literal");
    let mut s = &(&lo + &hi) / &Real::from_u64(2);
    for _ in 0..400 {
        let f = gp(&s)?;
        if f.abs() < fine {
            break;
        }
        if f.is_positive() {
            hi = s.clone();
        } else {
            lo = s.clone();
        }
        let fp = g_derivative(w, &s, 2)?;
        let newton = if fp.is_positive() { Some(&s - &(&f / &fp)) } else { None };
        s = match newton {
            Some(x) if x > lo && x < hi => x,
            _ => &(&lo + &hi) / &Real::from_u64(2),
        };
        if (&hi - &lo) < fine {
            break;
        }
    }
    let r = &(&s - &g_derivative(w, &s, 0)?) / &Real::from_rational(&w.weight(0));
    let residual = characteristic_residuals(w, &r, &s)?;
    if !(residual.0 < tol && residual.1 < tol) || !r.is_positive() {
        return Err(Error::Solver(format!(
            "residuals {:.3e}, {:.3e} above tolerance {tol:e}",
            residual.0, residual.1
        )));
    }
    Ok((r, s))
}

/// `(|G′(s) − 1|, |s − ζ_0 r − G(s)|)`.
pub fn characteristic_residuals(w: &WeightSeq, r: &Real, s: &Real) -> Result<(f64, f64)> {
    let a = (&g_derivative(w, s, 1)? - &Real::one()).abs().to_f64();
    let zr = &Real::from_rational(&w.weight(0)) * r;
    let b = (&(s - &zr) - &g_derivative(w, s, 0)?).abs().to_f64();
    Ok((a, b))
}

/// Exact `(r, s)` when `G(w) = ω_2 w²`: `s = 1/(2ω_2)`, `r = 1/(4ω_2 ζ_0)`.
pub fn exact_characteristic(w: &WeightSeq) -> Option<(BigRational, BigRational)> {
    if w.max_degree() != Some(2) {
        return None;
    }
    let om = w.ordered_weight(2);
    let two = BigRational::from_integer(2.into());
    let s = BigRational::one() / (&two * &om);
    let r = (&s - &om * &s * &s) / w.weight(0);
    Some((r, s))
}

/// `(r, s)` and every constant derived from them.
#[derive(Clone, Debug)]
pub struct CharacteristicSolution {
    pub r: Real,
    pub s: Real,
    /// `G″(s)`.
    pub g2: Real,
    /// `√(2r/G″(s))`.
    pub gamma: Real,
    /// Offspring variance `σ²`.
    pub sigma2: Real,
    /// `ξ_0 = r/s`.
    pub xi0: Real,
    /// `√(G″(s) r)`.
    pub lambda: Real,
    /// `√(π / (2 r G″(s)))`.
    pub height_const: Real,
    /// `2 / (σ √ξ_0)`.
    pub scaling_const: Real,
}

/// `f64` view of a [`CharacteristicSolution`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub r: f64,
    pub s: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub lambda: f64,
    #[serde(rename = "heightConst")]
    pub height_const: f64,
    #[serde(rename = "scalingConst")]
    pub scaling_const: f64,
}

impl CharacteristicSolution {
    pub fn to_f64(&self) -> Constants {
        Constants {
            r: self.r.to_f64(),
            s: self.s.to_f64(),
            gamma: self.gamma.to_f64(),
            sigma2: self.sigma2.to_f64(),
            lambda: self.lambda.to_f64(),
            height_const: self.height_const.to_f64(),
            scaling_const: self.scaling_const.to_f64(),
        }
    }

    /// The named fields as `(name, value)` pairs, in output order.
    pub fn named(&self) -> [(&'static str, &Real); 7] {
        [
            ("r", &self.r),
            ("s", &self.s),
            ("gamma", &self.gamma),
            ("sigma2", &self.sigma2),
            ("lambda", &self.lambda),
            ("heightConst", &self.height_const),
            ("scalingConst", &self.scaling_const),
        ]
    }

    /// Limit of the expected number of leaves at height `k`: `G″(s) r k`.
    pub fn leaf_profile_asymptote(&self, k: usize) -> f64 {
        (&(&self.g2 * &self.r) * &Real::from_u64(k as u64)).to_f64()
    }

    /// Limit of the expected number of vertices at height `k`: `s G″(s) k + 1`.
    pub fn node_profile_asymptote(&self, k: usize) -> f64 {
        (&(&(&self.s * &self.g2) * &Real::from_u64(k as u64)) + &Real::one()).to_f64()
    }
}

/// All constants for `(r, s)`. Requires `ζ_0 = 1` and `G″(s) > 0`.
pub fn derive_constants(w: &WeightSeq, r: &Real, s: &Real) -> Result<CharacteristicSolution> {
    if !w.weight(0).is_one() {
        return Err(Error::InvalidWeights("constants are defined for ζ_0 = 1".into()));
    }
    let g2 = g_derivative(w, s, 2)?;
    if !g2.is_positive() {
        return Err(Error::Solver("G″(s) must be positive".into()));
    }
    let xi = OffspringDist::from_weights(w, r, s)?;
    derive_with_offspring(r.clone(), s.clone(), g2, &xi)
}

fn derive_with_offspring(r: Real, s: Real, g2: Real, xi: &OffspringDist) -> Result<CharacteristicSolution> {
    let two = Real::from_u64(2);
    let gamma = (&(&two * &r) / &g2).sqrt();
    let lambda = (&g2 * &r).sqrt();
    let height_const = (&Real::pi() / &(&(&two * &r) * &g2)).sqrt();
    let sigma2 = xi.variance().clone();
    let xi0 = xi.prob(0);
    if !sigma2.is_positive() {
        return Err(Error::Solver("offspring variance must be positive".into()));
    }
    let scaling_const = &two / &(&sigma2.sqrt() * &xi0.sqrt());
    Ok(CharacteristicSolution { r, s, g2, gamma, sigma2, xi0, lambda, height_const, scaling_const })
}

/// Solves the characteristic system for `w` and derives every constant.
pub fn solve(w: &WeightSeq) -> Result<CharacteristicSolution> {
    w.check_analytic()?;
    let (r, s) = solve_characteristic(w, DEFAULT_TOL)?;
    derive_constants(w, &r, &s)
}

/// Constants for a family.
pub fn family_constants(f: &Family) -> Result<CharacteristicSolution> {
    solve(&f.weights())
}

/// The critical offspring law of a family, exact when `G` is quadratic.
pub fn family_offspring(f: &Family) -> Result<OffspringDist> {
    let w = f.weights();
    w.check_analytic()?;
    if let Some((r, s)) = exact_characteristic(&w) {
        return OffspringDist::from_weights_exact(&w, &r, &s);
    }
    let (r, s) = solve_characteristic(&w, DEFAULT_TOL)?;
    OffspringDist::from_weights(&w, &r, &s)
}

/// The offspring law `ξ^u` whose conditioned Galton–Watson tree is uniform
/// over general word bracketings.
pub fn uniform_ordered_offspring() -> OffspringDist {
    family_offspring(&Family::P2).expect("the second family has a critical offspring law")
}

/// `[z^n]C ÷ (γ r^(−n) / (2√(π n³)))`, evaluated in log space.
pub fn asymptotic_count_ratio(f: &Family, n: usize) -> Result<Real> {
    let w = f.weights();
    let sol = solve(&w)?;
    let exact = CountTable::new(&w, n).coeff(n);
    asymptotic_ratio_of(&exact, &sol, n)
}

/// The same ratio for a precomputed coefficient `[z^n]C`.
pub fn asymptotic_ratio_of(coeff: &BigRational, sol: &CharacteristicSolution, n: usize) -> Result<Real> {
    if coeff.is_zero() {
        return Err(Error::UndefinedMeasure { n });
    }
    let nn = Real::from_u64(n as u64);
    let two = Real::from_u64(2);
    let ln_exact = &ln_big(coeff.numer()) - &ln_big(coeff.denom());
    let ln_asym = &(&(&sol.gamma.ln() - &(&nn * &sol.r.ln())) - &two.ln())
        - &(&(&Real::pi().ln() / &two) + &(&(&Real::from_u64(3) / &two) * &nn.ln()));
    Ok((&ln_exact - &ln_asym).exp())
}

fn ln_big(x: &num_bigint::BigInt) -> Real {
    Real::parse(&x.to_string()).expect("integer literal").ln()
}

/// Rayleigh(1) density `x e^(−x²/2)` on `x ≥ 0`.
pub fn rayleigh_density(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x * (-x * x / 2.0).exp()
    }
}

/// Rayleigh(1) distribution function `1 − e^(−x²/2)` on `x ≥ 0`.
pub fn rayleigh_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x * x / 2.0).exp_m1()
    }
}
