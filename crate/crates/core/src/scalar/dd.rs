//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| <= ulp(hi) / 2`, giving a 106-bit significand (about 31
//! significant decimal digits).
//!
//! Only the operations the solvers need are provided: the four field
//! operations, `sqrt`, integer powers, decimal parsing and formatting.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// Error returned when a decimal string cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDoubleDoubleError(String);

impl fmt::Display for ParseDoubleDoubleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal `{}`", self.0)
    }
}

impl std::error::Error for ParseDoubleDoubleError {}

#[derive(Clone, Copy, Debug, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

// Dekker split; 2^27 + 1.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0;
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() {
        return (p, 0.0);
    }
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    /// 2^-104.
    pub const EPSILON: Self = Self { hi: 4.930_380_657_631_324e-32, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn signum(self) -> f64 {
        if self.hi > 0.0 {
            1.0
        } else if self.hi < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (s, e) = quick_two_sum(hi, self.lo.floor());
            Self { hi: s, lo: e }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            -(-self).floor()
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::from_f64(f64::NAN) };
        }
        // One Newton correction of the f64 root (Karp's trick).
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let diff = self - Self::from_f64(ax).sqr();
        Self::from_f64(ax) + Self::from_f64(diff.hi * (x * 0.5))
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            Self::ONE / acc
        } else {
            acc
        }
    }

    /// `10^n`, exact for `0 <= n <= 22`.
    pub fn pow10(n: i32) -> Self {
        if (0..=22).contains(&n) {
            Self::from_f64(10f64.powi(n))
        } else {
            Self::from_f64(10.0).powi(n)
        }
    }

    /// Render with `digits` significant decimal digits in scientific notation.
    pub fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.hi == 0.0 {
            return format!("{:.*}e0", digits - 1, 0.0);
        }
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut exp = x.hi.log10().floor() as i32;
        x = x / Self::pow10(exp);
        // Correct an off-by-one exponent estimate.
        while x.hi >= 10.0 {
            x = x / Self::from_f64(10.0);
            exp += 1;
        }
        while x.hi < 1.0 {
            x = x.mul_f64(10.0);
            exp -= 1;
        }
        // One extra guard digit, then round half up on the digit array.
        let mut ds = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.floor().hi.clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Self::from_f64(d)).mul_f64(10.0);
        }
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
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
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&exp.to_string());
        s
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $f(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Product for DoubleDouble {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseDoubleDoubleError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseDoubleDoubleError(s.to_owned()));
        }
        s.parse()
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        // i64 may exceed 53 bits.
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::from_f64(x))
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        if !t.hi.is_finite() {
            return None;
        }
        Some(t.hi as i64 + t.lo as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDoubleDoubleError(s.to_owned());
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "nan" => return Ok(Self::from_f64(f64::NAN)),
            "inf" | "+inf" | "infinity" => return Ok(Self::from_f64(f64::INFINITY)),
            "-inf" | "-infinity" => return Ok(Self::from_f64(f64::NEG_INFINITY)),
            _ => {}
        }
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp_part) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let mut exp: i32 = match exp_part {
            Some(e) => e.parse().map_err(|_| err())?,
            None => 0,
        };
        let mut acc = Self::ZERO;
        let mut seen_digit = false;
        let mut seen_point = false;
        // Digits beyond the 40th cannot change a 106-bit value; track them in
        // the exponent instead.
        let mut significant = 0usize;
        for c in mant.chars() {
            match c {
                '0'..='9' => {
                    seen_digit = true;
                    let d = f64::from(c as u8 - b'0');
                    if significant < 40 {
                        if !(acc.is_zero() && d == 0.0) {
                            significant += 1;
                        }
                        acc = acc.mul_f64(10.0) + Self::from_f64(d);
                        if seen_point {
                            exp -= 1;
                        }
                    } else if !seen_point {
                        exp += 1;
                    }
                }
                '.' if !seen_point => seen_point = true,
                '_' => {}
                _ => return Err(err()),
            }
        }
        if !seen_digit {
            return Err(err());
        }
        let v = if exp >= 0 {
            acc * Self::pow10(exp)
        } else {
            acc / Self::pow10(-exp)
        };
        Ok(if neg { -v } else { v })
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map_or(32, |p| p + 1);
        f.pad(&self.to_sci_string(digits))
    }
}

impl DoubleDouble {
    pub fn classify(self) -> FpCategory {
        self.hi.classify()
    }
}
