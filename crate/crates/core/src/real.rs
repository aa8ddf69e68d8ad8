//! High-precision reals for irrational constants (√2, log 2, …).
//!
//! A thin wrapper over `astro_float::BigFloat` at a fixed working precision
//! of 320 bits (about 96 decimal digits).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_rational::BigRational;

pub const PRECISION_BITS: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn from_u64(x: u64) -> Self {
        Real(BigFloat::from_u64(x, PRECISION_BITS))
    }

    pub fn from_i64(x: i64) -> Self {
        let r = Self::from_u64(x.unsigned_abs());
        if x < 0 {
            -r
        } else {
            r
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Real(BigFloat::from_f64(x, PRECISION_BITS))
    }

    /// Parses a decimal literal such as `"-12.5e-3"`.
    pub fn parse(s: &str) -> Option<Self> {
        let x = with_cc(|cc| BigFloat::parse(s, Radix::Dec, PRECISION_BITS, RM, cc));
        (!x.is_nan()).then_some(Real(x))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let n = Self::parse(&q.numer().to_string()).expect("integer literal");
        let d = Self::parse(&q.denom().to_string()).expect("integer literal");
        &n / &d
    }

    pub fn zero() -> Self {
        Self::from_u64(0)
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn pi() -> Self {
        Real(with_cc(|cc| cc.pi(PRECISION_BITS, RM)))
    }

    pub fn ln(&self) -> Self {
        Real(with_cc(|cc| self.0.ln(PRECISION_BITS, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        Real(with_cc(|cc| self.0.exp(PRECISION_BITS, RM, cc)))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(PRECISION_BITS, RM))
    }

    pub fn powi(&self, n: usize) -> Self {
        Real(self.0.powi(n, PRECISION_BITS, RM))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `⌊self · 2^64⌋` for `0 ≤ self ≤ 1`, as a fixed-point threshold.
    pub fn to_fixed64(&self) -> u128 {
        let scaled = Real(self.0.mul(&BigFloat::from_u64(1 << 32, PRECISION_BITS).powi(2, PRECISION_BITS, RM), PRECISION_BITS, RM));
        if !scaled.is_positive() {
            return 0;
        }
        let floor = scaled.0.floor();
        Real(floor).to_sig_digits(60).parse::<u128>().map_or(1u128 << 64, |v| v.min(1u128 << 64))
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        self.0.to_string().parse().unwrap_or(f64::NAN)
    }

    /// Decimal rendering rounded to `digits` significant digits, in plain
    /// notation for moderate magnitudes and `d.ddde±x` otherwise. The
    /// output is always a valid JSON number.
    pub fn to_sig_digits(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.0.is_zero() {
            return "0".into();
        }
        let s = self.0.to_string();
        let (neg, s) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, s),
        };
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let mut exp: i64 = exp.parse().unwrap_or(0);
        let mut ds: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
        ds.resize(ds.len().max(digits + 1), 0);
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let body: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
        let sign = if neg { "-" } else { "" };
        let out = if (-6..=20).contains(&exp) {
            if exp >= 0 {
                let e = exp as usize;
                if body.len() > e + 1 {
                    format!("{}.{}", &body[..=e], &body[e + 1..])
                } else {
                    format!("{body}{}", "0".repeat(e + 1 - body.len()))
                }
            } else {
                format!("0.{}{body}", "0".repeat((-exp - 1) as usize))
            }
        } else {
            format!("{}.{}e{exp}", &body[..1], &body[1..])
        };
        format!("{sign}{}", trim_fraction(out))
    }
}

fn trim_fraction(s: String) -> String {
    if let Some((m, e)) = s.split_once('e') {
        return format!("{}e{e}", trim_fraction(m.to_string()));
    }
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sig_digits(30))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real(self.0.$m(&rhs.0, PRECISION_BITS, RM))
            }
        }
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}
