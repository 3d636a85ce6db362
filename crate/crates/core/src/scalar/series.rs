//! Truncated Laurent series with tracked valuation bounds.
//!
//! Representation: `sum coeffs[k] x^(shift+k)` plus a zero tail up to
//! `order`, plus an unknown tail `O(x^order)`. Exact polynomials use the
//! `EXACT` sentinel order (no unknown tail). Coefficients below `shift` are
//! zero by representation; `val_lb <= actual valuation` is maintained soundly
//! through every operation, so coefficients below `val_lb` may be discarded
//! even when rounding noise makes them numerically nonzero.

use super::{Field, FieldSqrt, ScalarError};

/// Sentinel order for elements with no unknown tail (polynomials, zero).
pub const EXACT: i64 = i64::MAX / 4;

fn cap(v: i64) -> i64 {
    v.min(EXACT)
}

#[derive(Clone)]
pub struct TruncSeries<C: Field> {
    shift: i64,
    coeffs: Vec<C>,
    order: i64,
    val_lb: i64,
}

impl<C: Field> TruncSeries<C> {
    fn build(shift: i64, coeffs: Vec<C>, order: i64, val_lb: i64) -> Self {
        TruncSeries { shift, coeffs, order, val_lb }.normalized()
    }

    fn normalized(mut self) -> Self {
        // drop coefficients proven zero by the valuation bound
        while !self.coeffs.is_empty() && self.shift < self.val_lb.min(self.order) {
            self.coeffs.remove(0);
            self.shift += 1;
        }
        // trim structural zeros at both ends
        while self.coeffs.first().map(|c| c.is_zero_strict()).unwrap_or(false) {
            self.coeffs.remove(0);
            self.shift += 1;
        }
        while self.coeffs.last().map(|c| c.is_zero_strict()).unwrap_or(false) {
            self.coeffs.pop();
        }
        // clip anything at or beyond the truncation order
        if self.shift + self.coeffs.len() as i64 > self.order {
            let keep = (self.order - self.shift).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        if self.coeffs.is_empty() {
            self.shift = 0;
            self.val_lb = self.order;
        }
        self
    }

    pub fn constant(c: C) -> Self {
        Self::build(0, vec![c], EXACT, 0)
    }

    /// `c * x^e`, exact.
    pub fn monomial(c: C, e: i64) -> Self {
        Self::build(e, vec![c], EXACT, e)
    }

    /// Polynomial from low-to-high coefficients starting at exponent `shift`.
    pub fn poly(shift: i64, coeffs: Vec<C>) -> Self {
        Self::build(shift, coeffs, EXACT, shift)
    }

    /// The all-unknown series `O(x^order)`.
    pub fn unknown(order: i64) -> Self {
        Self::build(0, vec![], order, order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn val_lb(&self) -> i64 {
        self.val_lb
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    /// Known coefficient window as (first exponent, slice).
    pub fn window(&self) -> (i64, &[C]) {
        (self.shift, &self.coeffs)
    }

    /// Coefficient of x^e. `None` when e is at or beyond the unknown tail.
    pub fn coeff(&self, e: i64) -> Option<C> {
        if e >= self.order {
            return None;
        }
        if e < self.shift || e >= self.shift + self.coeffs.len() as i64 {
            Some(C::zero())
        } else {
            Some(self.coeffs[(e - self.shift) as usize].clone())
        }
    }

    /// Forget everything at or beyond x^order.
    pub fn truncated(&self, order: i64) -> Self {
        let mut s = self.clone();
        s.order = s.order.min(order);
        s.val_lb = s.val_lb.min(s.order);
        s.normalized()
    }

    pub fn shifted(&self, e: i64) -> Self {
        Self::build(
            self.shift + e,
            self.coeffs.clone(),
            cap(self.order.saturating_add(e)),
            cap(self.val_lb.saturating_add(e)),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::build(
            self.shift,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
            self.order,
            self.val_lb,
        )
    }

    /// Exponent of the first coefficient that cannot be dismissed as zero,
    /// or `None` when the whole known window is negligible.
    pub fn lead_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_negligible())
            .map(|k| self.shift + k as i64)
    }

    /// A unit in the series ring proper: valuation 0 with certified nonzero
    /// constant term.
    pub fn is_unit(&self) -> bool {
        self.lead_exponent() == Some(0)
    }

    /// Constant term under the precondition that no negative power survives.
    pub fn specialize_zero(&self) -> Result<C, ScalarError> {
        if self.order <= 0 {
            return Err(ScalarError::TruncationExhausted);
        }
        if self.val_lb < 0 {
            for (k, c) in self.coeffs.iter().enumerate() {
                if self.shift + (k as i64) < 0 && !c.is_negligible() {
                    return Err(ScalarError::NegativeValuation);
                }
            }
        }
        Ok(self.coeff(0).expect("checked above"))
    }

    /// Inverse as a Laurent series, computed through x^(max_order). The
    /// leading coefficient must be certified nonzero.
    pub fn laurent_inv(&self, max_order: i64) -> Result<Self, ScalarError> {
        let v = self.lead_exponent().ok_or(ScalarError::NotAUnit)?;
        let u0 = self.coeff(v).unwrap();
        let u0i = u0.inv().ok_or(ScalarError::NotAUnit)?;
        // unit part u = x^-v * self, known through x^(self.order - v);
        // its inverse is computable to the same order
        let out_order = cap(self.order.saturating_sub(2 * v)).min(cap(max_order.saturating_sub(v)));
        let len = (out_order + v).max(0) as usize;
        let mut b: Vec<C> = Vec::with_capacity(len);
        b.push(u0i.clone());
        for k in 1..len {
            let mut acc = C::zero();
            for j in 1..=k {
                let uj = self.coeff(v + j as i64).unwrap_or_else(C::zero);
                if uj.is_zero_strict() {
                    continue;
                }
                acc = acc.add(&uj.mul(&b[k - j]));
            }
            b.push(acc.mul(&u0i).neg());
        }
        Ok(Self::build(-v, b, out_order, -v))
    }

    /// Square root with an explicitly chosen branch for the constant term.
    /// Requires a unit (valuation 0) argument.
    pub fn sqrt_branch(&self, branch: &C, max_order: i64) -> Result<Self, ScalarError> {
        if self.lead_exponent() != Some(0) {
            return Err(ScalarError::NotAUnit);
        }
        let c0 = self.coeff(0).unwrap();
        if !branch.mul(branch).sub(&c0).is_negligible() {
            return Err(ScalarError::BranchMismatch);
        }
        let two_y0_inv = branch.add(branch).inv().ok_or(ScalarError::NotAUnit)?;
        let out_order = self.order.min(cap(max_order));
        let len = out_order.max(0) as usize;
        let mut y: Vec<C> = Vec::with_capacity(len);
        y.push(branch.clone());
        for k in 1..len {
            let mut acc = self.coeff(k as i64).unwrap_or_else(C::zero);
            for j in 1..k {
                acc = acc.sub(&y[j].mul(&y[k - j]));
            }
            y.push(acc.mul(&two_y0_inv));
        }
        Ok(Self::build(0, y, out_order, 0))
    }

    /// Evaluate at a point by Horner over the known window. Negative shifts
    /// use the inverse point. The unknown tail is ignored, so this is only
    /// meaningful when |x0|^order is below the working tolerance.
    pub fn eval_at(&self, x0: &C) -> Option<C> {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x0).add(c);
        }
        if self.shift >= 0 {
            Some(acc.mul(&super::pow_i64(x0, self.shift as u64)))
        } else {
            let xi = x0.inv()?;
            Some(acc.mul(&super::pow_i64(&xi, self.shift.unsigned_abs())))
        }
    }
}

/// Square roots of even-valuation series, branch fixed as the principal root
/// of the leading coefficient. This is the form the deformed eigenvalues use:
/// the parameter perturbation keeps every valuation even.
impl<C: FieldSqrt> TruncSeries<C> {
    pub fn laurent_sqrt(&self, max_order: i64) -> Result<Self, ScalarError> {
        let v = self.lead_exponent().ok_or(ScalarError::NotAUnit)?;
        assert!(v % 2 == 0, "square root of odd-valuation series");
        let unit = self.shifted(-v);
        let branch = unit.coeff(0).unwrap().sqrt_principal();
        let root = unit.sqrt_branch(&branch, cap(max_order.saturating_sub(v / 2)))?;
        Ok(root.shifted(v / 2))
    }
}

impl<C: Field> PartialEq for TruncSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        let lo = self.shift.min(other.shift);
        let hi = (self.shift + self.coeffs.len() as i64)
            .max(other.shift + other.coeffs.len() as i64)
            .min(self.order)
            .min(other.order);
        (lo..hi).all(|e| match (self.coeff(e), other.coeff(e)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
    }
}

impl<C: Field> Field for TruncSeries<C> {
    fn zero() -> Self {
        Self::build(0, vec![], EXACT, EXACT)
    }

    fn one() -> Self {
        Self::constant(C::one())
    }

    fn from_i64(v: i64) -> Self {
        Self::constant(C::from_i64(v))
    }

    fn add(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let lo = self.shift.min(o.shift);
        let hi = (self.shift + self.coeffs.len() as i64)
            .max(o.shift + o.coeffs.len() as i64)
            .min(order);
        let mut coeffs = Vec::new();
        for e in lo..hi {
            let a = self.coeff(e).unwrap_or_else(C::zero);
            let b = o.coeff(e).unwrap_or_else(C::zero);
            coeffs.push(a.add(&b));
        }
        Self::build(lo, coeffs, order, self.val_lb.min(o.val_lb))
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        let order = cap(self.order.saturating_add(o.val_lb))
            .min(cap(o.order.saturating_add(self.val_lb)));
        let val_lb = cap(self.val_lb.saturating_add(o.val_lb));
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::build(0, vec![], order, val_lb);
        }
        let shift = self.shift + o.shift;
        let len = ((self.coeffs.len() + o.coeffs.len() - 1) as i64)
            .min(order.saturating_sub(shift))
            .max(0) as usize;
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_strict() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero_strict() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Self::build(shift, coeffs, order, val_lb)
    }

    fn neg(&self) -> Self {
        Self::build(
            self.shift,
            self.coeffs.iter().map(|c| c.neg()).collect(),
            self.order,
            self.val_lb,
        )
    }

    /// Inverse through the operand's own truncation window. Exact inputs must
    /// be monomials; engine series are truncated by construction, so a
    /// non-monomial exact input indicates a bug at the call site.
    fn inv(&self) -> Option<Self> {
        if self.is_exact() {
            let nonzero: Vec<usize> = (0..self.coeffs.len())
                .filter(|&k| !self.coeffs[k].is_negligible())
                .collect();
            return match nonzero.len() {
                0 => None,
                1 => {
                    let e = self.shift + nonzero[0] as i64;
                    let c = self.coeffs[nonzero[0]].inv()?;
                    Some(Self::monomial(c, -e))
                }
                _ => panic!("inverse of a non-monomial exact polynomial needs an explicit truncation order"),
            };
        }
        self.laurent_inv(EXACT).ok()
    }

    fn is_zero_strict(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_strict())
    }

    fn is_negligible(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible())
    }
}

impl<C: Field> std::fmt::Debug for TruncSeries<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (k, c) in self.coeffs.iter().enumerate() {
                if k > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({:?})x^{}", c, self.shift + k as i64)?;
            }
        }
        if self.is_exact() {
            Ok(())
        } else {
            write!(f, " + O(x^{})", self.order)
        }
    }
}
