//! Exact arithmetic in cyclotomic fields Q(zeta_N), power-basis vectors of
//! length phi(N) reduced modulo the N-th cyclotomic polynomial.

use super::complex::{root_of_unity, PrecComplex};
use super::Field;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

fn divisors(n: u64) -> Vec<u64> {
    let mut d = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            d.push(i);
            if i != n / i {
                d.push(n / i);
            }
        }
        i += 1;
    }
    d.sort_unstable();
    d
}

/// Monic integer coefficients of the N-th cyclotomic polynomial, low to high.
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for all proper divisors d of n
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let q = cyclotomic_poly(d);
        p = int_poly_div_exact(&p, &q);
    }
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// Exact division of integer polynomials, divisor monic.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn].clone();
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Reduce a rational-coefficient polynomial modulo the monic Phi_n.
fn reduce_mod_phi(mut poly: Vec<BigRational>, n: u64) -> Vec<BigRational> {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    while poly.len() > deg {
        let c = poly.pop().unwrap();
        if !c.is_zero() {
            let k = poly.len() - deg;
            for (j, pcoef) in phi.iter().enumerate().take(deg) {
                let delta = &c * BigRational::from(pcoef.clone());
                poly[k + j] -= delta;
            }
        }
    }
    poly.resize(deg, BigRational::zero());
    poly
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_deg(a: &[BigRational]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

/// Extended gcd over Q[x]: returns (g, u) with u*a = g mod m, g the gcd of
/// (a, m) normalized monic. Used for inversion modulo the irreducible Phi_n.
fn poly_inv_mod(a: &[BigRational], n: u64) -> Option<Vec<BigRational>> {
    let phi: Vec<BigRational> =
        cyclotomic_poly(n).into_iter().map(BigRational::from).collect();
    // standard extended Euclid on (a, phi) tracking only the a-cofactor
    let mut r0: Vec<BigRational> = a.to_vec();
    let mut r1 = phi.clone();
    let mut u0 = vec![BigRational::one()];
    let mut u1: Vec<BigRational> = vec![];
    while poly_deg(&r1).is_some() {
        // quotient of r0 by r1
        let d1 = poly_deg(&r1).unwrap();
        let lead = r1[d1].clone();
        let mut q = vec![BigRational::zero(); poly_deg(&r0).map(|d| d.saturating_sub(d1)).unwrap_or(0) + 1];
        let mut rem = r0.clone();
        while let Some(dr) = poly_deg(&rem) {
            if dr < d1 {
                break;
            }
            let c = &rem[dr] / &lead;
            let shift = dr - d1;
            q[shift] = c.clone();
            for j in 0..=d1 {
                let delta = &c * &r1[j];
                rem[shift + j] -= delta;
            }
        }
        let u2 = poly_sub(&u0, &poly_mul(&q, &u1));
        r0 = r1;
        r1 = rem;
        u0 = u1;
        u1 = u2;
    }
    let d0 = poly_deg(&r0)?;
    if d0 != 0 {
        return None; // nontrivial gcd: a was zero mod a factor (cannot happen, Phi irreducible)
    }
    let g = r0[0].clone();
    Some(u0.iter().map(|c| c / &g).collect())
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    out
}

/// An element of Q(zeta_N) in the power basis 1, zeta, ..., zeta^(phi(N)-1).
#[derive(Clone)]
pub struct CycloRational {
    conductor: u64,
    coeffs: Vec<BigRational>,
}

impl CycloRational {
    pub fn from_rational(r: BigRational) -> Self {
        CycloRational { conductor: 1, coeffs: vec![r] }
    }

    pub fn from_ratio_i64(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// zeta_n^k.
    pub fn zeta(n: u64, k: i64) -> Self {
        assert!(n >= 1);
        let kr = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![BigRational::zero(); kr + 1];
        poly[kr] = BigRational::one();
        CycloRational { conductor: n, coeffs: reduce_mod_phi(poly, n) }.normalized()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Drop to the smallest representation when the element is rational.
    fn normalized(self) -> Self {
        if self.conductor > 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            CycloRational { conductor: 1, coeffs: vec![self.coeffs[0].clone()] }
        } else {
            self
        }
    }

    /// Rewrite in Q(zeta_m); requires conductor | m.
    pub fn promote(&self, m: u64) -> Self {
        if m == self.conductor {
            return self.clone();
        }
        assert!(m % self.conductor == 0);
        let step = (m / self.conductor) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        CycloRational { conductor: m, coeffs: reduce_mod_phi(poly, m) }
    }

    fn unify(&self, o: &Self) -> (Self, Self) {
        let m = num_integer::lcm(self.conductor, o.conductor);
        (self.promote(m), o.promote(m))
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            let inv = self.inv().expect("negative power of zero");
            super::pow_i64(&inv, e.unsigned_abs())
        } else {
            super::pow_i64(self, e as u64)
        }
    }

    /// If the element is a root of unity, its exact multiplicative order.
    /// The torsion of Q(zeta_N) is the M-th roots for M = lcm(2, N).
    pub fn root_of_unity_order(&self) -> Option<u64> {
        if self.is_zero_strict() {
            return None;
        }
        let m = num_integer::lcm(2, self.conductor);
        let one = Self::one();
        if self.pow(m as i64) != one {
            return None;
        }
        divisors(m).into_iter().find(|&d| self.pow(d as i64) == one)
    }

    /// Numeric image under zeta_N -> exp(2 pi i / N).
    pub fn embed(&self, bits: u32) -> PrecComplex {
        let mut acc = PrecComplex::from_int_bits(0, bits);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = root_of_unity(self.conductor, i as i64, bits)
                .scale(&super::Dyadic::from_ratio(c.numer(), c.denom(), bits));
            acc = acc.add(&term);
        }
        acc
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }
}

impl PartialEq for CycloRational {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.unify(other);
        a.coeffs == b.coeffs
    }
}

impl Field for CycloRational {
    fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(v)))
    }

    fn add(&self, o: &Self) -> Self {
        let (mut a, b) = self.unify(o);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a.normalized()
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.unify(o);
        let prod = poly_mul(&a.coeffs, &b.coeffs);
        CycloRational { conductor: a.conductor, coeffs: reduce_mod_phi(prod, a.conductor) }
            .normalized()
    }

    fn neg(&self) -> Self {
        CycloRational {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero_strict() {
            return None;
        }
        if self.conductor == 1 {
            return Some(Self::from_rational(self.coeffs[0].recip()));
        }
        let u = poly_inv_mod(&self.coeffs, self.conductor)?;
        let coeffs = reduce_mod_phi(u, self.conductor);
        Some(CycloRational { conductor: self.conductor, coeffs }.normalized())
    }

    fn is_zero_strict(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn is_negligible(&self) -> bool {
        self.is_zero_strict()
    }
}

impl std::fmt::Debug for CycloRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero_strict() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{}*z{}^{}", c, self.conductor, i)?;
            }
        }
        Ok(())
    }
}
