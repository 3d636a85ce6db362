//! Fixed-point arbitrary-precision reals: `mant * 2^-bits`.
//!
//! Addition and subtraction are exact; multiplication, division and square
//! root round the result to the output scale with at most one ulp of error.
//! The absolute error of a computation is therefore bounded by (ops) ulps,
//! which is what makes the global tolerance `2^-(bits/2)` easy to honor: at
//! the default 256 fraction bits there are ~2^128 spare ulps below it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    bits: u32,
}

/// Round `x / 2^k` to the nearest integer (ties toward +inf).
fn rshift_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let half = BigInt::from(1) << (k - 1);
    (x + half) >> k
}

/// Round `a / b` to the nearest integer (ties away from zero). `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 >= *b {
        if a.is_negative() {
            q - 1u8
        } else {
            q + 1u8
        }
    } else {
        q
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, bits: u32) -> Self {
        Dyadic { mant, bits }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), bits: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { mant: BigInt::from(v), bits: 0 }
    }

    pub fn from_int_bits(v: i64, bits: u32) -> Self {
        Dyadic { mant: BigInt::from(v) << bits, bits }
    }

    /// 2^e at the given scale; `e` may be negative.
    pub fn two_pow(e: i64, bits: u32) -> Self {
        let shift = e + bits as i64;
        assert!(shift >= 0, "2^{e} is below one ulp at {bits} bits");
        Dyadic { mant: BigInt::from(1) << (shift as u64), bits }
    }

    /// Nearest representable value of `num/den` at the given scale. `den != 0`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero());
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        Dyadic { mant: round_div(&(num << bits), &den), bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Exact rescale to a higher precision, or rounded to a lower one.
    pub fn with_bits(&self, bits: u32) -> Self {
        if bits >= self.bits {
            Dyadic { mant: &self.mant << (bits - self.bits), bits }
        } else {
            Dyadic { mant: rshift_round(&self.mant, self.bits - bits), bits }
        }
    }

    fn align(&self, o: &Self) -> (BigInt, BigInt, u32) {
        let bits = self.bits.max(o.bits);
        let a = &self.mant << (bits - self.bits);
        let b = &o.mant << (bits - o.bits);
        (a, b, bits)
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b, bits) = self.align(o);
        Dyadic { mant: a + b, bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b, bits) = self.align(o);
        Dyadic { mant: a - b, bits }
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let bits = self.bits.max(o.bits);
        let prod = &self.mant * &o.mant;
        Dyadic { mant: rshift_round(&prod, self.bits + o.bits - bits), bits }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Dyadic { mant: &self.mant * k, bits: self.bits }
    }

    /// `self / o`, rounded at scale `max(bits)`. `o` must be nonzero.
    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.mant.is_zero(), "division by zero");
        let bits = self.bits.max(o.bits);
        // (mant_a * 2^(bits + bits_b - bits_a)) / mant_b, at scale `bits`.
        let num = &self.mant << (bits + o.bits - self.bits);
        let (num, den) = if o.mant.is_negative() {
            (-num, -&o.mant)
        } else {
            (num, o.mant.clone())
        };
        Dyadic { mant: round_div(&num, &den), bits }
    }

    /// Floor square root at the operand's scale; panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of a negative value");
        let scaled = &self.mant << self.bits;
        Dyadic { mant: scaled.sqrt(), bits: self.bits }
    }

    pub fn cmp_val(&self, o: &Self) -> std::cmp::Ordering {
        let (a, b, _) = self.align(o);
        a.cmp(&b)
    }

    /// `|self| < 2^-(bits/2)` at this value's own precision.
    pub fn is_negligible(&self) -> bool {
        let k = self.bits / 2;
        self.mant.abs() < (BigInt::from(1) << (self.bits - k))
    }

    /// Decimal rendering with a fixed number of fractional digits, rounded;
    /// exact and therefore byte-stable across runs.
    pub fn to_decimal(&self, frac_digits: u32) -> String {
        let scale = BigInt::from(10).pow(frac_digits);
        let scaled = round_div(&(&self.mant * &scale), &(BigInt::from(1) << self.bits));
        let neg = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let digits = if digits.len() <= frac_digits as usize {
            format!("{}{}", "0".repeat(frac_digits as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = digits.len() - frac_digits as usize;
        let (int_part, frac_part) = digits.split_at(split);
        if frac_digits == 0 {
            format!("{}{}", if neg { "-" } else { "" }, int_part)
        } else {
            format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
        }
    }

    /// Nearest i64 (for values known to be near small integers).
    pub fn round_to_i64(&self) -> i64 {
        let r = rshift_round(&self.mant, self.bits);
        i64::try_from(&r).expect("value out of i64 range")
    }
}

impl std::fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}", self.to_decimal(12), self.bits)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_val(other))
    }
}
