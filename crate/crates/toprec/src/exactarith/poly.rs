//! Univariate polynomials over the rationals, lowest degree first,
//! with no trailing zero coefficient (the zero polynomial is the empty list).

use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::rat::{rat_pow, Rat};
use super::{ArithError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial c·x^n.
    pub fn monomial(c: Rat, n: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = c;
        Poly { coeffs }
    }

    pub fn x() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, n: usize) -> Rat {
        self.coeffs.get(n).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rat::from_integer((i as i64 + 1).into()))
                .collect(),
        )
    }

    /// Taylor shift: returns p(c + x).
    pub fn shift(&self, c: &Rat) -> Poly {
        // Horner in the shifted variable.
        let mut acc = Poly::zero();
        let shift = Poly::new(vec![c.clone(), Rat::one()]);
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &shift) + &Poly::constant(a.clone());
        }
        acc
    }

    /// Substitutes another polynomial: p(q(x)).
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(a.clone());
        }
        acc
    }

    /// Euclidean division: (quotient, remainder).
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(ArithError::PolyDivByZero);
        }
        let dd = d.degree().unwrap();
        let lead = d.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let q = rem.leading().unwrap() / &lead;
            let k = rd - dd;
            quot[k] = q.clone();
            rem = &rem - &d.scale(&q).mul_xn(k);
        }
        Ok((Poly::new(quot), rem))
    }

    fn mul_xn(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match a.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.recip();
                a.scale(&inv)
            }
        }
    }

    /// All rational roots with multiplicities, plus the root-free cofactor.
    ///
    /// Uses the rational root theorem on the primitive integer form.
    pub fn rational_roots(&self) -> (Vec<(Rat, usize)>, Poly) {
        let mut p = self.clone();
        let mut roots: Vec<(Rat, usize)> = Vec::new();
        if p.is_zero() {
            return (roots, p);
        }
        // strip x = 0 roots first
        let mut zero_mult = 0usize;
        while !p.coeffs.is_empty() && p.coeffs[0].is_zero() {
            p.coeffs.remove(0);
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Rat::zero(), zero_mult));
        }
        if p.degree().unwrap_or(0) == 0 {
            return (roots, p);
        }
        // primitive integer coefficients
        let den_lcm = p
            .coeffs
            .iter()
            .fold(num::BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()));
        let ints: Vec<num::BigInt> = p
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let a0 = ints[0].clone().abs();
        let an = ints.last().unwrap().clone().abs();
        let mut candidates: Vec<Rat> = Vec::new();
        for pnum in divisors(&a0) {
            for pden in divisors(&an) {
                let c = Rat::new(pnum.clone(), pden.clone());
                if !candidates.contains(&c) {
                    candidates.push(c.clone());
                    candidates.push(-c);
                }
            }
        }
        for cand in candidates {
            let mut mult = 0usize;
            while p.degree().unwrap_or(0) >= 1 && p.eval(&cand).is_zero() {
                let lin = Poly::new(vec![-cand.clone(), Rat::one()]);
                let (q, r) = p.div_rem(&lin).unwrap();
                debug_assert!(r.is_zero());
                p = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((cand, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, p)
    }

    /// Evaluates on a Laurent-polynomial argument given as (exponent, coeff)
    /// pairs; used by curve presets. Result exponent map.
    pub fn eval_laurent(&self, arg: &std::collections::BTreeMap<i64, Rat>) -> std::collections::BTreeMap<i64, Rat> {
        let mut acc: std::collections::BTreeMap<i64, Rat> = std::collections::BTreeMap::new();
        for a in self.coeffs.iter().rev() {
            // acc = acc * arg
            let mut next: std::collections::BTreeMap<i64, Rat> = std::collections::BTreeMap::new();
            for (e1, c1) in &acc {
                for (e2, c2) in arg {
                    let e = e1 + e2;
                    let v = c1 * c2;
                    *next.entry(e).or_insert_with(Rat::zero) += v;
                }
            }
            if !a.is_zero() {
                *next.entry(0).or_insert_with(Rat::zero) += a.clone();
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
        }
        acc
    }

    /// c^deg-weighted scaling of the variable: p(c·x).
    pub fn scale_var(&self, c: &Rat) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * rat_pow(c, i as i64))
                .collect(),
        )
    }
}

fn divisors(n: &num::BigInt) -> Vec<num::BigInt> {
    use num::ToPrimitive;
    if n.is_zero() {
        return vec![num::BigInt::one()];
    }
    // Desk scale: the preset/file polynomials have small integer content.
    // Fall back to |n| and 1 only if n is too large to factor naively.
    if let Some(m) = n.abs().to_u64() {
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= m {
            if m % d == 0 {
                out.push(num::BigInt::from(d));
                if d != m / d {
                    out.push(num::BigInt::from(m / d));
                }
            }
            d += 1;
            if d > 1_000_000 {
                // give up on full factorization; rational-root candidates
                // may be incomplete for absurdly large content
                break;
            }
        }
        out.sort();
        out
    } else {
        vec![num::BigInt::one(), n.abs()]
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
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
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "x^{}", i)?;
            } else {
                write!(f, "{}*x^{}", c, i)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(coeffs)
    }
}

impl<'a> Sub for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::new(coeffs)
    }
}

impl<'a> Mul for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::rat::rat;
    use super::*;

    #[test]
    fn no_trailing_zeros() {
        let p = Poly::new(vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Poly::new(vec![rat(0, 1)]).is_zero());
    }

    #[test]
    fn div_rem_exact() {
        // (x^2 - 1) / (x - 1) = x + 1
        let num = Poly::new(vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        let den = Poly::new(vec![rat(-1, 1), rat(1, 1)]);
        let (q, r) = num.div_rem(&den).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Poly::new(vec![rat(1, 1), rat(1, 1)]));
    }

    #[test]
    fn gcd_monic() {
        // gcd(2(x-1)(x-2), 4(x-1)) = x - 1
        let a = Poly::new(vec![rat(4, 1), rat(-6, 1), rat(2, 1)]);
        let b = Poly::new(vec![rat(-4, 1), rat(4, 1)]);
        let g = a.gcd(&b);
        assert_eq!(g, Poly::new(vec![rat(-1, 1), rat(1, 1)]));
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // x^2(2x - 1)(x + 3)
        let p = &Poly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)])
            * &(&Poly::new(vec![rat(-1, 1), rat(2, 1)]) * &Poly::new(vec![rat(3, 1), rat(1, 1)]));
        let (roots, rest) = p.rational_roots();
        assert_eq!(rest.degree(), Some(0));
        assert!(roots.contains(&(rat(0, 1), 2)));
        assert!(roots.contains(&(rat(1, 2), 1)));
        assert!(roots.contains(&(rat(-3, 1), 1)));
    }

    #[test]
    fn shift_is_taylor() {
        // p(x) = x^2, p(1 + x) = 1 + 2x + x^2
        let p = Poly::monomial(rat(1, 1), 2);
        assert_eq!(
            p.shift(&rat(1, 1)),
            Poly::new(vec![rat(1, 1), rat(2, 1), rat(1, 1)])
        );
    }
}
