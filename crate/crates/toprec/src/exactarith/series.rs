//! Truncated Laurent series at a finite rational center.
//!
//! A series knows its coefficients on a window [k_min, k_max] of exponents
//! of u = z − center. The window bottom is a true valuation bound:
//! coefficients below k_min are known zeros. Coefficients above k_max are
//! UNKNOWN — asking for one is an error, never a silent zero — and every
//! operation shrinks the top of the window to the range on which the
//! result is fully determined by the inputs.

use num::{One, Zero};
use std::fmt;

use super::rat::{rat_sqrt, Rat};
use super::{ArithError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSeries {
    center: Rat,
    k_min: i64,
    /// coeffs[i] is the coefficient of u^(k_min + i); the window is
    /// [k_min, k_min + len − 1]. Zero entries are known zeros.
    coeffs: Vec<Rat>,
}

impl LSeries {
    pub fn new(center: Rat, k_min: i64, coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "series window must be nonempty");
        LSeries {
            center,
            k_min,
            coeffs,
        }
    }

    /// The known-zero series on a window.
    pub fn zero(center: Rat, k_min: i64, k_max: i64) -> Self {
        assert!(k_min <= k_max);
        LSeries {
            center,
            k_min,
            coeffs: vec![Rat::zero(); (k_max - k_min + 1) as usize],
        }
    }

    /// c·u^k known on [min(k, k_min), k_max].
    pub fn monomial(center: Rat, c: Rat, k: i64, k_min: i64, k_max: i64) -> Self {
        let lo = k_min.min(k);
        let mut s = LSeries::zero(center, lo, k_max.max(k));
        s.coeffs[(k - lo) as usize] = c;
        s
    }

    pub fn from_terms(center: Rat, terms: &[(i64, Rat)], k_min: i64, k_max: i64) -> Self {
        let mut s = LSeries::zero(center, k_min, k_max);
        for (k, c) in terms {
            assert!(*k >= k_min && *k <= k_max);
            s.coeffs[(k - k_min) as usize] = c.clone();
        }
        s
    }

    pub fn center(&self) -> &Rat {
        &self.center
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of u^k. Below the window it is a known zero; above the
    /// window it is unknown and an error.
    pub fn coeff(&self, k: i64) -> Result<Rat> {
        if k < self.k_min {
            return Ok(Rat::zero());
        }
        if k > self.k_max() {
            return Err(ArithError::UnknownCoefficient(k, self.k_min, self.k_max()));
        }
        Ok(self.coeffs[(k - self.k_min) as usize].clone())
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.k_min + i as i64)
    }

    pub fn is_known_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// The residue: coefficient of u^{-1}. Errors when −1 exceeds the known
    /// top — the signal to widen truncation and retry.
    pub fn residue(&self) -> Result<Rat> {
        if self.k_max() < -1 {
            return Err(ArithError::ResidueWindow(self.k_min, self.k_max()));
        }
        self.coeff(-1)
    }

    fn check_center(&self, other: &LSeries) -> Result<()> {
        if self.center != other.center {
            return Err(ArithError::CenterMismatch(
                self.center.to_string(),
                other.center.to_string(),
            ));
        }
        Ok(())
    }

    /// Restricts the top of the window.
    pub fn truncate_top(&self, k_max: i64) -> Result<LSeries> {
        if k_max > self.k_max() {
            return Err(ArithError::UnknownCoefficient(
                k_max,
                self.k_min,
                self.k_max(),
            ));
        }
        if k_max < self.k_min {
            // everything below the window is known zero
            return Ok(LSeries::zero(self.center.clone(), k_max, k_max));
        }
        Ok(LSeries {
            center: self.center.clone(),
            k_min: self.k_min,
            coeffs: self.coeffs[..=(k_max - self.k_min) as usize].to_vec(),
        })
    }

    /// Drops known-zero leading entries so that k_min equals the valuation
    /// (no-op on a known-zero series).
    fn normalized(&self) -> LSeries {
        match self.valuation() {
            None => self.clone(),
            Some(v) => LSeries {
                center: self.center.clone(),
                k_min: v,
                coeffs: self.coeffs[(v - self.k_min) as usize..].to_vec(),
            },
        }
    }

    pub fn add(&self, other: &LSeries) -> Result<LSeries> {
        self.check_center(other)?;
        let k_min = self.k_min.min(other.k_min);
        let k_max = self.k_max().min(other.k_max());
        if k_min > k_max {
            return Err(ArithError::EmptyWindow);
        }
        let mut coeffs = Vec::with_capacity((k_max - k_min + 1) as usize);
        for k in k_min..=k_max {
            coeffs.push(self.coeff(k)? + other.coeff(k)?);
        }
        Ok(LSeries::new(self.center.clone(), k_min, coeffs))
    }

    pub fn sub(&self, other: &LSeries) -> Result<LSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LSeries {
        LSeries {
            center: self.center.clone(),
            k_min: self.k_min,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> LSeries {
        LSeries {
            center: self.center.clone(),
            k_min: self.k_min,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by u^n (exact window shift).
    pub fn shift_exponents(&self, n: i64) -> LSeries {
        LSeries {
            center: self.center.clone(),
            k_min: self.k_min + n,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Product on the largest determined window:
    /// [a0+b0, min(a0+b1, a1+b0)] for windows [a0,a1], [b0,b1].
    pub fn mul(&self, other: &LSeries) -> Result<LSeries> {
        self.check_center(other)?;
        let a = self.normalized();
        let b = other.normalized();
        let (a0, a1) = (a.k_min, a.k_max());
        let (b0, b1) = (b.k_min, b.k_max());
        let k_min = a0 + b0;
        let k_max = (a0 + b1).min(a1 + b0);
        if k_min > k_max {
            return Err(ArithError::EmptyWindow);
        }
        let mut coeffs = vec![Rat::zero(); (k_max - k_min + 1) as usize];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ka = a0 + i as i64;
            for (j, cb) in b.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let k = ka + b0 + j as i64;
                if k > k_max {
                    break;
                }
                coeffs[(k - k_min) as usize] += ca * cb;
            }
        }
        Ok(LSeries::new(self.center.clone(), k_min, coeffs))
    }

    /// Quotient. The divisor needs a nonzero leading coefficient within its
    /// known window.
    pub fn div(&self, other: &LSeries) -> Result<LSeries> {
        self.check_center(other)?;
        let v = other.valuation().ok_or(ArithError::SeriesDivByZero)?;
        let b = other.normalized().shift_exponents(-v); // valuation 0
        let lead = b.coeff(0)?;
        let a = self.normalized();
        let (a0, a1) = (a.k_min, a.k_max());
        let b1 = b.k_max();
        // q_k for k in [a0 - v, min(a1 - v, a0 - 2v + b1 ... )]:
        // need a_{k+v} known (k <= a1 - v) and b-indices up to
        // k - (a0 - v) <= b1 (k <= a0 - v + b1).
        let q_min = a0 - v;
        let q_max = (a1 - v).min(a0 - v + b1);
        if q_min > q_max {
            return Err(ArithError::EmptyWindow);
        }
        let n = (q_max - q_min + 1) as usize;
        let mut q = vec![Rat::zero(); n];
        for i in 0..n {
            let k = q_min + i as i64;
            let mut s = a.coeff(k + v)?;
            for j in 0..i {
                let bk = b.coeff((i - j) as i64)?;
                if !bk.is_zero() && !q[j].is_zero() {
                    s -= &q[j] * &bk;
                }
            }
            q[i] = s / &lead;
        }
        Ok(LSeries::new(self.center.clone(), q_min, q))
    }

    /// Square root with positive leading coefficient; requires even
    /// valuation and a rational-square leading coefficient.
    pub fn sqrt(&self) -> Result<LSeries> {
        let v = self.valuation().ok_or(ArithError::SeriesDivByZero)?;
        if v % 2 != 0 {
            return Err(ArithError::OddValuation(v));
        }
        let lead = self.coeff(v)?;
        let s0 = rat_sqrt(&lead)?;
        let l = (self.k_max() - v) as usize;
        let mut s = vec![Rat::zero(); l + 1];
        s[0] = s0.clone();
        let two_s0 = &s0 + &s0;
        for k in 1..=l {
            let mut acc = self.coeff(v + k as i64)?;
            for i in 1..k {
                if !s[i].is_zero() && !s[k - i].is_zero() {
                    acc -= &s[i] * &s[k - i];
                }
            }
            s[k] = acc / &two_s0;
        }
        Ok(LSeries::new(self.center.clone(), v / 2, s))
    }

    /// Termwise antiderivative with constant term 0; errors on a nonzero
    /// residue term (a logarithm would be required).
    pub fn integrate(&self) -> Result<LSeries> {
        if self.k_min <= -1 && self.k_max() >= -1 {
            let r = self.coeff(-1)?;
            if !r.is_zero() {
                return Err(ArithError::ResidueObstruction(r.to_string()));
            }
        }
        let k_min = self.k_min + 1;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.k_min + i as i64;
            if k == -1 {
                coeffs.push(Rat::zero()); // lands at exponent 0
            } else {
                coeffs.push(c / Rat::from_integer((k + 1).into()));
            }
        }
        Ok(LSeries::new(self.center.clone(), k_min, coeffs))
    }

    /// Termwise derivative.
    pub fn differentiate(&self) -> LSeries {
        let k_min = self.k_min - 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rat::from_integer((self.k_min + i as i64).into()))
            .collect();
        LSeries::new(self.center.clone(), k_min, coeffs)
    }

    /// Composition self ∘ g for g of valuation ≥ 1, both series read as
    /// maps of the local coordinate (centers of self are ignored; the
    /// result carries g's center). Horner over series powers.
    pub fn compose(&self, g: &LSeries) -> Result<LSeries> {
        let gv = g.valuation().unwrap_or(i64::MAX);
        assert!(gv >= 1, "composition requires a valuation >= 1 argument");
        let top_cap = g.k_max().min((self.k_max() + 1) * gv - 1);
        let one = LSeries::monomial(g.center.clone(), Rat::one(), 0, 0, g.k_max());
        let mut acc = LSeries::zero(g.center.clone(), self.k_min.min(0) * gv.max(1), top_cap);
        // regular part
        let mut p = one.clone();
        for k in 0..=self.k_max().max(-1) {
            if k > 0 {
                p = p.mul(g)?;
            }
            let c = self.coeff(k)?;
            if !c.is_zero() {
                acc = acc.add(&p.scale(&c))?;
            }
        }
        // principal part
        if self.k_min < 0 {
            let mut q = one;
            for k in 1..=(-self.k_min) {
                q = q.div(g)?;
                let c = self.coeff(-k)?;
                if !c.is_zero() {
                    acc = acc.add(&q.scale(&c))?;
                }
            }
        }
        acc.truncate_top(acc.k_max().min(top_cap))
    }

    /// Lagrange reversion by Newton iteration on the composition equation:
    /// returns b with self ∘ b = identity to the available order.
    pub fn revert(&self) -> Result<LSeries> {
        match self.valuation() {
            Some(1) => {}
            _ => return Err(ArithError::BadReversionInput),
        }
        let a1 = self.coeff(1)?;
        if a1.is_zero() {
            return Err(ArithError::BadReversionInput);
        }
        let order = self.k_max();
        let center = self.center.clone();
        let mut b = LSeries::monomial(center.clone(), a1.recip(), 1, 1, order);
        let da = self.differentiate();
        for _ in 0..64 {
            let ab = self.compose(&b)?;
            let idw = LSeries::monomial(center.clone(), Rat::one(), 1, ab.k_min(), ab.k_max());
            let f = ab.sub(&idw)?;
            if f.is_known_zero() && f.k_max() >= order {
                break;
            }
            let dab = da.compose(&b)?;
            let corr = f.div(&dab)?;
            let hi = b.k_max().min(corr.k_max()).min(order);
            let lo = b.k_min.min(corr.k_min());
            let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
            for k in lo..=hi {
                coeffs.push(b.coeff(k)? - corr.coeff(k)?);
            }
            let nb = LSeries::new(center.clone(), lo, coeffs);
            if nb == b {
                break;
            }
            b = nb;
        }
        Ok(b)
    }

    /// Raises to an integer power (n may be negative if invertible).
    pub fn pow(&self, n: i64) -> Result<LSeries> {
        let width = self.k_max() - self.k_min;
        if n == 0 {
            return Ok(LSeries::monomial(self.center.clone(), Rat::one(), 0, 0, width));
        }
        let mut base = self.clone();
        if n < 0 {
            let one = LSeries::monomial(self.center.clone(), Rat::one(), 0, 0, width);
            base = one.div(&base)?;
        }
        let mut e = n.unsigned_abs();
        let mut acc: Option<LSeries> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(acc.unwrap())
    }
}

impl fmt::Display for LSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in self.k_min..=self.k_max() {
            let c = self.coeffs[(k - self.k_min) as usize].clone();
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "u^{}", k)?;
            } else {
                write!(f, "({})*u^{}", c, k)?;
            }
        }
        if first {
            write!(f, "O(u^{}..u^{})", self.k_min, self.k_max())?;
        } else {
            write!(f, " + O(u^{})", self.k_max() + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::rat::rat;
    use super::*;

    fn s(terms: &[(i64, i64, i64)], k_min: i64, k_max: i64) -> LSeries {
        let t: Vec<(i64, Rat)> = terms.iter().map(|(k, p, q)| (*k, rat(*p, *q))).collect();
        LSeries::from_terms(Rat::zero(), &t, k_min, k_max)
    }

    #[test]
    fn mul_difference_of_squares() {
        // (1+u)(1-u) = 1 - u^2
        let a = s(&[(0, 1, 1), (1, 1, 1)], 0, 4);
        let b = s(&[(0, 1, 1), (1, -1, 1)], 0, 4);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeff(0).unwrap(), rat(1, 1));
        assert_eq!(p.coeff(1).unwrap(), rat(0, 1));
        assert_eq!(p.coeff(2).unwrap(), rat(-1, 1));
        assert_eq!(p.k_max(), 4);
    }

    #[test]
    fn unknown_tail_is_error_not_zero() {
        let a = s(&[(0, 1, 1)], 0, 2);
        assert!(matches!(
            a.coeff(3),
            Err(ArithError::UnknownCoefficient(3, 0, 2))
        ));
        assert_eq!(a.coeff(-5).unwrap(), rat(0, 1)); // below: known zero
    }

    #[test]
    fn mul_window_shrinks_conservatively() {
        // a known to u^2, b known to u^5: product known to u^2 only
        let a = s(&[(0, 1, 1), (1, 1, 1)], 0, 2);
        let b = s(&[(0, 1, 1)], 0, 5);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.k_max(), 2);
    }

    #[test]
    fn div_geometric() {
        // 1/(1-u) on [0,3] = 1 + u + u^2 + u^3
        let one = s(&[(0, 1, 1)], 0, 3);
        let d = s(&[(0, 1, 1), (1, -1, 1)], 0, 3);
        let q = one.div(&d).unwrap();
        for k in 0..=3 {
            assert_eq!(q.coeff(k).unwrap(), rat(1, 1));
        }
    }

    #[test]
    fn div_valuation_shift() {
        // (u + u^2)/u = 1 + u
        let a = s(&[(1, 1, 1), (2, 1, 1)], 1, 4);
        let b = s(&[(1, 1, 1)], 1, 4);
        let q = a.div(&b).unwrap();
        assert_eq!(q.coeff(0).unwrap(), rat(1, 1));
        assert_eq!(q.coeff(1).unwrap(), rat(1, 1));
    }

    #[test]
    fn div_self_is_one() {
        let a = s(&[(2, 3, 1), (3, -1, 2), (5, 7, 3)], 2, 8);
        let q = a.div(&a).unwrap();
        assert_eq!(q.coeff(0).unwrap(), rat(1, 1));
        for k in 1..=q.k_max() {
            assert_eq!(q.coeff(k).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn div_by_unknown_leading_is_error() {
        let a = s(&[(0, 1, 1)], 0, 2);
        let zero = LSeries::zero(Rat::zero(), 0, 2);
        assert!(matches!(a.div(&zero), Err(ArithError::SeriesDivByZero)));
    }

    #[test]
    fn center_mismatch_is_error() {
        let a = s(&[(0, 1, 1)], 0, 2);
        let b = LSeries::monomial(rat(1, 1), rat(1, 1), 0, 0, 2);
        assert!(matches!(a.add(&b), Err(ArithError::CenterMismatch(_, _))));
    }

    #[test]
    fn sqrt_perfect_square() {
        // 1 + 2u + u^2 -> 1 + u
        let a = s(&[(0, 1, 1), (1, 2, 1), (2, 1, 1)], 0, 5);
        let r = a.sqrt().unwrap();
        assert_eq!(r.coeff(0).unwrap(), rat(1, 1));
        assert_eq!(r.coeff(1).unwrap(), rat(1, 1));
        assert_eq!(r.coeff(2).unwrap(), rat(0, 1));
        // 4u^2 -> 2u
        let a = s(&[(2, 4, 1)], 0, 4);
        let r = a.sqrt().unwrap();
        assert_eq!(r.valuation(), Some(1));
        assert_eq!(r.coeff(1).unwrap(), rat(2, 1));
    }

    #[test]
    fn sqrt_irrational_is_error() {
        let a = s(&[(2, 2, 1)], 0, 4);
        assert!(matches!(a.sqrt(), Err(ArithError::NotARationalSquare(_))));
        let odd = s(&[(1, 1, 1)], 0, 4);
        assert!(matches!(odd.sqrt(), Err(ArithError::OddValuation(1))));
    }

    #[test]
    fn sqrt_squares_back() {
        let a = s(&[(2, 9, 4), (3, 1, 1), (4, -2, 7), (6, 1, 3)], 2, 9);
        let r = a.sqrt().unwrap();
        let sq = r.mul(&r).unwrap();
        for k in sq.k_min()..=sq.k_max() {
            assert_eq!(sq.coeff(k).unwrap(), a.coeff(k).unwrap());
        }
    }

    #[test]
    fn integrate_examples() {
        // 2u -> u^2
        let a = s(&[(1, 2, 1)], 0, 3);
        let i = a.integrate().unwrap();
        assert_eq!(i.coeff(2).unwrap(), rat(1, 1));
        assert_eq!(i.coeff(0).unwrap(), rat(0, 1));
        // u^{-2} -> -u^{-1}
        let a = s(&[(-2, 1, 1)], -2, 1);
        let i = a.integrate().unwrap();
        assert_eq!(i.coeff(-1).unwrap(), rat(-1, 1));
        // u^{-1} -> error
        let a = s(&[(-1, 1, 1)], -2, 1);
        assert!(matches!(
            a.integrate(),
            Err(ArithError::ResidueObstruction(_))
        ));
    }

    #[test]
    fn residue_read_off() {
        let a = s(&[(-1, 1, 1)], -3, 0);
        assert_eq!(a.residue().unwrap(), rat(1, 1));
        let b = s(&[(-2, 1, 1)], -3, 0);
        assert_eq!(b.residue().unwrap(), rat(0, 1));
        // (u^2+1)/u^3 has residue 1
        let c = s(&[(-3, 1, 1), (-1, 1, 1)], -3, 0);
        assert_eq!(c.residue().unwrap(), rat(1, 1));
        let short = s(&[(-3, 1, 1)], -3, -2);
        assert!(matches!(short.residue(), Err(ArithError::ResidueWindow(_, _))));
    }

    #[test]
    fn revert_quadratic() {
        // revert(u + u^2) = u - u^2 + 2u^3 - 5u^4  (checked by composition)
        let a = s(&[(1, 1, 1), (2, 1, 1)], 1, 4);
        let b = a.revert().unwrap();
        assert_eq!(b.coeff(1).unwrap(), rat(1, 1));
        assert_eq!(b.coeff(2).unwrap(), rat(-1, 1));
        assert_eq!(b.coeff(3).unwrap(), rat(2, 1));
        assert_eq!(b.coeff(4).unwrap(), rat(-5, 1));
        let comp = a.compose(&b).unwrap();
        assert_eq!(comp.coeff(1).unwrap(), rat(1, 1));
        for k in 2..=comp.k_max() {
            assert_eq!(comp.coeff(k).unwrap(), rat(0, 1), "exponent {}", k);
        }
    }

    #[test]
    fn revert_linear() {
        let a = s(&[(1, 3, 1)], 1, 4);
        let b = a.revert().unwrap();
        assert_eq!(b.coeff(1).unwrap(), rat(1, 3));
    }

    #[test]
    fn revert_log_gives_exp_minus_one() {
        // log(1+u) = u - u^2/2 + u^3/3 - ...; revert = e^u - 1
        let a = LSeries::from_terms(
            Rat::zero(),
            &[
                (1, rat(1, 1)),
                (2, rat(-1, 2)),
                (3, rat(1, 3)),
                (4, rat(-1, 4)),
            ],
            1,
            4,
        );
        let b = a.revert().unwrap();
        assert_eq!(b.coeff(1).unwrap(), rat(1, 1));
        assert_eq!(b.coeff(2).unwrap(), rat(1, 2));
        assert_eq!(b.coeff(3).unwrap(), rat(1, 6));
        assert_eq!(b.coeff(4).unwrap(), rat(1, 24));
    }

    #[test]
    fn zero_linear_reversion_is_error() {
        let a = s(&[(2, 1, 1)], 1, 4);
        assert!(matches!(a.revert(), Err(ArithError::BadReversionInput)));
    }

    #[test]
    fn integrate_then_differentiate_round_trip() {
        let a = s(&[(0, 3, 1), (1, -2, 7), (3, 1, 5)], 0, 5);
        let i = a.integrate().unwrap();
        let d = i.differentiate();
        for k in 0..=5 {
            assert_eq!(d.coeff(k).unwrap(), a.coeff(k).unwrap());
        }
    }

    #[test]
    fn compose_laurent_with_linear() {
        // f = u^{-2} + u, g = 2u: f∘g = (1/4)u^{-2} + 2u
        let f = s(&[(-2, 1, 1), (1, 1, 1)], -2, 3);
        let g = s(&[(1, 2, 1)], 1, 6);
        let c = f.compose(&g).unwrap();
        assert_eq!(c.coeff(-2).unwrap(), rat(1, 4));
        assert_eq!(c.coeff(1).unwrap(), rat(2, 1));
    }
}
