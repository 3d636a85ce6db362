//! High-precision complex numbers over the dyadic fixed-point reals, plus the
//! transcendental constants needed to embed roots of unity.

use super::dyadic::Dyadic;
use super::{Field, FieldSqrt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Guard bits used by internal transcendental routines before rounding back
/// to the requested precision.
const GUARD: u32 = 64;

#[derive(Clone, PartialEq)]
pub struct PrecComplex {
    re: Dyadic,
    im: Dyadic,
}

impl PrecComplex {
    pub fn new(re: Dyadic, im: Dyadic) -> Self {
        let bits = re.bits().max(im.bits());
        PrecComplex { re: re.with_bits(bits), im: im.with_bits(bits) }
    }

    pub fn from_real(re: Dyadic) -> Self {
        let im = Dyadic::from_int_bits(0, re.bits());
        PrecComplex { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_real(Dyadic::from_int(v))
    }

    pub fn from_int_bits(v: i64, bits: u32) -> Self {
        Self::from_real(Dyadic::from_int_bits(v, bits))
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        Self::from_real(Dyadic::from_ratio(r.numer(), r.denom(), bits))
    }

    pub fn i(bits: u32) -> Self {
        PrecComplex {
            re: Dyadic::from_int_bits(0, bits),
            im: Dyadic::from_int_bits(1, bits),
        }
    }

    pub fn re(&self) -> &Dyadic {
        &self.re
    }

    pub fn im(&self) -> &Dyadic {
        &self.im
    }

    pub fn precision_bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        PrecComplex { re: self.re.with_bits(bits), im: self.im.with_bits(bits) }
    }

    pub fn conj(&self) -> Self {
        PrecComplex { re: self.re.clone(), im: self.im.neg() }
    }

    /// `re^2 + im^2` as a dyadic real.
    pub fn norm2(&self) -> Dyadic {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Dyadic {
        self.norm2().sqrt()
    }

    pub fn scale(&self, s: &Dyadic) -> Self {
        PrecComplex { re: self.re.mul(s), im: self.im.mul(s) }
    }

    /// Max-norm distance to another value.
    pub fn dist(&self, o: &Self) -> Dyadic {
        let d = self.sub(o);
        if d.re.abs().cmp_val(&d.im.abs()) == std::cmp::Ordering::Less {
            d.im.abs()
        } else {
            d.re.abs()
        }
    }

    /// Tolerance attached to this value's precision: `2^-(bits/2)`.
    pub fn tau(&self) -> Dyadic {
        Dyadic::two_pow(-((self.precision_bits() / 2) as i64), self.precision_bits())
    }

    pub fn eq_within(&self, o: &Self, tol: &Dyadic) -> bool {
        self.dist(o).cmp_val(tol) != std::cmp::Ordering::Greater
    }

    /// Result precision for inexact unary operations: never below the guard
    /// width, so that inverting or rooting an integer literal (carried at
    /// zero fraction bits) still produces a usable value.
    fn out_bits(&self) -> u32 {
        self.precision_bits().max(GUARD)
    }

    /// Principal square root: real part >= 0; on the branch cut (negative
    /// reals) the root with positive imaginary part.
    pub fn sqrt(&self) -> Self {
        let bits = self.precision_bits() + GUARD;
        let z = self.with_bits(bits);
        let r = z.norm2().sqrt();
        // w = sqrt((r+re)/2) + i sgn(im) sqrt((r-re)/2); both radicands are
        // nonnegative up to rounding, so clamp the ulp-sized dips on the axes
        let half = |x: Dyadic| {
            let h = x.div(&Dyadic::from_int(2));
            if h.is_negative() {
                Dyadic::from_int_bits(0, h.bits())
            } else {
                h
            }
        };
        let wr = half(r.add(&z.re)).sqrt();
        let wi_mag = half(r.sub(&z.re)).sqrt();
        let wi = if z.im.is_negative() { wi_mag.neg() } else { wi_mag };
        PrecComplex { re: wr, im: wi }.with_bits(self.out_bits())
    }
}

impl Field for PrecComplex {
    fn zero() -> Self {
        PrecComplex { re: Dyadic::zero(), im: Dyadic::zero() }
    }

    fn one() -> Self {
        PrecComplex { re: Dyadic::from_int(1), im: Dyadic::from_int(0) }
    }

    fn from_i64(v: i64) -> Self {
        PrecComplex::from_int(v)
    }

    fn add(&self, o: &Self) -> Self {
        PrecComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    fn sub(&self, o: &Self) -> Self {
        PrecComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        PrecComplex { re, im }
    }

    fn neg(&self) -> Self {
        PrecComplex { re: self.re.neg(), im: self.im.neg() }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_negligible() {
            return None;
        }
        let bits = self.precision_bits() + GUARD;
        let z = self.with_bits(bits);
        let n2 = z.norm2();
        let c = z.conj();
        Some(
            PrecComplex { re: c.re.div(&n2), im: c.im.div(&n2) }
                .with_bits(self.out_bits()),
        )
    }

    fn is_zero_strict(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn is_negligible(&self) -> bool {
        if self.is_zero_strict() {
            return true;
        }
        // norm2 < tau^2, computed on exact mantissas
        let bits = self.precision_bits();
        let k = bits / 2;
        let n2 = self.norm2();
        // n2 value = mant * 2^-n2bits; compare to 2^-2k
        let thr = n2.bits() as i64 - 2 * k as i64;
        if thr < 0 {
            false
        } else {
            *n2.mant() < (BigInt::from(1) << (thr as u64))
        }
    }
}

impl FieldSqrt for PrecComplex {
    fn sqrt_principal(&self) -> Self {
        self.sqrt()
    }
}

impl std::fmt::Debug for PrecComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} + {}i)", self.re.to_decimal(12), self.im.to_decimal(12))
    }
}

/// pi at `bits` fraction bits, by Machin's formula with guard bits.
pub fn pi(bits: u32) -> Dyadic {
    static CACHE: OnceLock<Mutex<HashMap<u32, Dyadic>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&bits) {
        return v.clone();
    }
    let work = bits + GUARD;
    // atan(1/m) = sum (-1)^k / ((2k+1) m^(2k+1)), all in integers scaled 2^work
    let atan_inv = |m: i64| -> BigInt {
        let m2 = BigInt::from(m) * m;
        let mut p = (BigInt::from(1) << work) / m;
        let mut k: i64 = 0;
        let mut acc = BigInt::zero();
        while !p.is_zero() {
            let term = &p / (2 * k + 1);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            p /= &m2;
            k += 1;
        }
        acc
    };
    let scaled = atan_inv(5) * 16 - atan_inv(239) * 4;
    let v = Dyadic::new(scaled, work).with_bits(bits);
    cache.lock().unwrap().insert(bits, v.clone());
    v
}

/// exp(i theta) for |theta| < 1/1024, by Taylor series at working precision.
fn cis_small(theta: &Dyadic) -> PrecComplex {
    let bits = theta.bits();
    let z = PrecComplex::new(Dyadic::from_int_bits(0, bits), theta.clone());
    let mut term = PrecComplex::one().with_bits(bits);
    let mut acc = term.clone();
    let mut k: i64 = 1;
    loop {
        term = term.mul(&z);
        term = PrecComplex {
            re: term.re().div(&Dyadic::from_int(k)),
            im: term.im().div(&Dyadic::from_int(k)),
        };
        if term.re().is_zero() && term.im().is_zero() {
            break;
        }
        acc = acc.add(&term);
        k += 1;
        assert!(k < 10_000, "cis series failed to converge");
    }
    acc
}

/// The primitive N-th root of unity exp(2 pi i / N) at `bits` precision.
pub fn primitive_root(n: u64, bits: u32) -> PrecComplex {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), PrecComplex>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(n, bits)) {
        return v.clone();
    }
    assert!(n >= 1);
    let v = if n == 1 {
        PrecComplex::from_int_bits(1, bits)
    } else if n == 2 {
        PrecComplex::from_int_bits(-1, bits)
    } else if n == 4 {
        PrecComplex::i(bits)
    } else {
        // theta = 2 pi / n, halved k times until < 2^-10, then squared back
        let work = bits + 2 * GUARD;
        let theta = pi(work).mul_i64(2).div(&Dyadic::from_int(n as i64));
        let mut k = 0u32;
        let mut t = theta;
        while t.abs().cmp_val(&Dyadic::two_pow(-10, work)) == std::cmp::Ordering::Greater {
            t = t.div(&Dyadic::from_int(2));
            k += 1;
        }
        let mut w = cis_small(&t);
        for _ in 0..k {
            w = w.mul(&w);
        }
        w.with_bits(bits)
    };
    cache.lock().unwrap().insert((n, bits), v.clone());
    v
}

/// exp(2 pi i j / N) at `bits` precision, via binary powering of the cached
/// primitive root at guarded precision.
pub fn root_of_unity(n: u64, j: i64, bits: u32) -> PrecComplex {
    let jr = j.rem_euclid(n as i64) as u64;
    if jr == 0 {
        return PrecComplex::from_int_bits(1, bits);
    }
    let g = num_integer::gcd(jr, n);
    let (n_red, j_red) = (n / g, jr / g);
    let base = primitive_root(n_red, bits + GUARD);
    let mut acc = PrecComplex::from_int_bits(1, bits + GUARD);
    let mut b = base;
    let mut e = j_red;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        b = b.mul(&b);
        e >>= 1;
    }
    acc.with_bits(bits)
}
