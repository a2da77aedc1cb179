//! Truncated Laurent series over the rationals and square matrices of them.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::root_system::Rat;

/// Converts a machine rational to an exact big rational.
pub fn big(r: Rat) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// Valuation of a series as far as its precision allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// Exactly zero.
    Infinite,
    Known(i64),
    /// All known coefficients vanish; the valuation is at least this.
    AtLeast(i64),
}

/// `sum_k c_k t^k` with `c_k` known for `k < prec` (all `k` when exact).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    lo: i64,
    coeffs: Vec<BigRational>,
    prec: Option<i64>,
}

impl LaurentSeries {
    fn build(lo: i64, coeffs: Vec<BigRational>, prec: Option<i64>) -> Self {
        let mut s = LaurentSeries { lo, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(n) = self.prec {
            let keep = (n - self.lo).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    pub fn zero() -> Self {
        LaurentSeries {
            lo: 0,
            coeffs: Vec::new(),
            prec: None,
        }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c t^e`, exact.
    pub fn monomial(c: BigRational, e: i64) -> Self {
        Self::build(e, vec![c], None)
    }

    /// Exact Laurent polynomial with `coeffs[k]` at `t^(lo + k)`.
    pub fn polynomial(lo: i64, coeffs: Vec<BigRational>) -> Self {
        Self::build(lo, coeffs, None)
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Drops everything from `t^n` on.
    pub fn truncate(&self, n: i64) -> Self {
        let prec = Some(self.prec.map_or(n, |p| p.min(n)));
        Self::build(self.lo, self.coeffs.clone(), prec)
    }

    pub fn coefficient(&self, e: i64) -> BigRational {
        let k = e - self.lo;
        if k < 0 || k >= self.coeffs.len() as i64 {
            BigRational::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn valuation(&self) -> Valuation {
        match (self.coeffs.is_empty(), self.prec) {
            (false, _) => Valuation::Known(self.lo),
            (true, None) => Valuation::Infinite,
            (true, Some(n)) => Valuation::AtLeast(n),
        }
    }

    /// Lower bound for the valuation, `None` for exact zero.
    fn valuation_bound(&self) -> Option<i64> {
        match self.valuation() {
            Valuation::Infinite => None,
            Valuation::Known(v) | Valuation::AtLeast(v) => Some(v),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.valuation() == Valuation::Infinite
    }

    /// Leading coefficient when the valuation is known.
    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.first()
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::build(
            self.lo,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.prec,
        )
    }

    /// Multiplication by `t^e`.
    pub fn shift(&self, e: i64) -> Self {
        if self.coeffs.is_empty() && self.prec.is_none() {
            return self.clone();
        }
        LaurentSeries {
            lo: self.lo + e,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + e),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = match (self.prec, other.prec) {
            (None, p) | (p, None) => p,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        if self.coeffs.is_empty() {
            return Self::build(other.lo, other.coeffs.clone(), prec);
        }
        if other.coeffs.is_empty() {
            return Self::build(self.lo, self.coeffs.clone(), prec);
        }
        let lo = self.lo.min(other.lo);
        let hi = (self.lo + self.coeffs.len() as i64).max(other.lo + other.coeffs.len() as i64);
        let hi = prec.map_or(hi, |p| hi.min(p));
        let coeffs = (lo..hi.max(lo))
            .map(|e| self.coefficient(e) + other.coefficient(e))
            .collect();
        Self::build(lo, coeffs, prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (Some(va), Some(vb)) = (self.valuation_bound(), other.valuation_bound()) else {
            return Self::zero();
        };
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (None, Some(nb)) => Some(va + nb),
            (Some(na), None) => Some(vb + na),
            (Some(na), Some(nb)) => Some((va + nb).min(vb + na)),
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::build(0, Vec::new(), prec);
        }
        let lo = self.lo + other.lo;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - lo).max(0) as usize);
        }
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self::build(lo, coeffs, prec)
    }

    /// Inverse of a unit. Exact monomials invert exactly; other exact
    /// series are inverted to relative order `order`.
    pub fn inv(&self, order: i64) -> Result<Self> {
        let v = match self.valuation() {
            Valuation::Known(v) => v,
            Valuation::Infinite => return Err(Error::Invariant("inverse of zero".into())),
            Valuation::AtLeast(n) => return Err(Error::PrecisionExhausted(n)),
        };
        let c = &self.coeffs[0];
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(c.recip(), -v));
        }
        let rel = match self.prec {
            Some(n) => n - v,
            None => order,
        };
        if rel <= 0 {
            return Err(Error::PrecisionExhausted(order));
        }
        let rel_us = rel as usize;
        let cinv = c.recip();
        let mut b: Vec<BigRational> = Vec::with_capacity(rel_us);
        b.push(cinv.clone());
        for k in 1..rel_us {
            let mut s = BigRational::zero();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                s += &self.coeffs[i] * &b[k - i];
            }
            b.push(-(s * &cinv));
        }
        Ok(Self::build(-v, b, Some(-v + rel)))
    }

    /// Integer power; negative exponents go through [`Self::inv`].
    pub fn pow(&self, e: i64, order: i64) -> Result<Self> {
        let base = if e < 0 {
            self.inv(order)?
        } else {
            self.clone()
        };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Agreement on every exponent below both precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let d = self.sub(other);
        d.coeffs.is_empty()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("{}*t^{}", c, self.lo + k as i64));
            }
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        if let Some(n) = self.prec {
            terms.push(format!("O(t^{n})"));
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Square matrix over truncated Laurent series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    n: usize,
    entries: Vec<LaurentSeries>,
}

impl LaurentMatrix {
    pub fn zero(n: usize) -> Self {
        LaurentMatrix {
            n,
            entries: vec![LaurentSeries::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, LaurentSeries::one());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentSeries::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !(a.is_zero() || b.is_zero()) {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn product<'a>(n: usize, factors: impl IntoIterator<Item = &'a LaurentMatrix>) -> Self {
        factors
            .into_iter()
            .fold(Self::identity(n), |acc, m| acc.mul(m))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Cofactor expansion; the matrices here are at most 4 x 4.
    pub fn det(&self) -> LaurentSeries {
        fn rec(m: &LaurentMatrix, rows: &[usize], cols: &[usize]) -> LaurentSeries {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc = LaurentSeries::zero();
            for (k, &c) in cols.iter().enumerate() {
                let a = m.get(rows[0], c);
                if a.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = a.mul(&rec(m, &rows[1..], &rest));
                acc = if k % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.n).collect();
        rec(self, &idx, &idx)
    }

    /// Entrywise agreement up to precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.agrees_with(b))
    }

    /// Smallest precision among the entries, `None` when all are exact.
    pub fn precision(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.precision()).min()
    }

    fn entries_at_least(&self, bound: impl Fn(usize, usize) -> i64) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| match self.get(i, j).valuation() {
                Valuation::Infinite => true,
                Valuation::Known(v) | Valuation::AtLeast(v) => v >= bound(i, j),
            })
        })
    }

    fn det_is_unit(&self) -> bool {
        let d = self.det();
        d.valuation() == Valuation::Known(0)
    }

    /// Membership in `G(O)`.
    pub fn in_g_o(&self) -> bool {
        self.entries_at_least(|_, _| 0) && self.det_is_unit()
    }

    /// Membership in the Iwahori subgroup of the upper triangular Borel.
    pub fn in_iwahori(&self) -> bool {
        self.entries_at_least(|i, j| i64::from(i > j)) && self.det_is_unit()
    }

    /// Smallest known entry valuation.
    pub fn min_valuation(&self) -> Option<i64> {
        self.entries
            .iter()
            .filter_map(|e| match e.valuation() {
                Valuation::Known(v) => Some(v),
                _ => None,
            })
            .min()
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 - t) = 1 + t + t^2 + ...
        let s = LaurentSeries::polynomial(0, vec![q(1), q(-1)]);
        let inv = s.inv(5).unwrap();
        assert_eq!(inv.precision(), Some(5));
        for e in 0..5 {
            assert_eq!(inv.coefficient(e), q(1));
        }
        let back = s.mul(&inv);
        assert!(back.agrees_with(&LaurentSeries::one()));
        assert_eq!(back.precision(), Some(5));
    }

    #[test]
    fn monomials_invert_exactly() {
        let s = LaurentSeries::monomial(q(3), -2);
        let inv = s.inv(1).unwrap();
        assert!(inv.is_exact());
        assert_eq!(s.mul(&inv), LaurentSeries::one());
    }

    #[test]
    fn unknown_valuation() {
        let s = LaurentSeries::polynomial(0, vec![q(0), q(0), q(1)]).truncate(2);
        assert_eq!(s.valuation(), Valuation::AtLeast(2));
        assert!(matches!(s.inv(4), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn det_of_unipotent() {
        let mut m = LaurentMatrix::identity(3);
        m.set(0, 2, LaurentSeries::monomial(q(5), -3));
        m.set(1, 0, LaurentSeries::monomial(q(2), 1));
        assert_eq!(m.det(), LaurentSeries::one());
        assert!(!m.in_g_o());
        m.set(2, 1, LaurentSeries::monomial(q(1), 0));
        // The cycle 0 -> 2 -> 1 -> 0 contributes 5 t^-3 * 2 t * 1.
        assert_eq!(
            m.det(),
            LaurentSeries::polynomial(-2, vec![q(10), q(0), q(1)])
        );
    }

    fn series() -> impl Strategy<Value = LaurentSeries> {
        (-3i64..3, prop::collection::vec(-5i64..6, 1..5))
            .prop_map(|(lo, cs)| LaurentSeries::polynomial(lo, cs.into_iter().map(q).collect()))
    }

    proptest! {
        #[test]
        fn ring_laws(a in series(), b in series(), c in series()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn inverse_is_inverse(a in series()) {
            prop_assume!(!a.is_zero());
            let inv = a.inv(6).unwrap();
            let one = a.mul(&inv);
            prop_assert!(one.agrees_with(&LaurentSeries::one()));
            prop_assert!(one.precision().map_or(true, |p| p >= 6));
        }
    }
}
