//! Reduced rational functions over the rationals: den monic, gcd(num, den) = 1.

use num::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::poly::Poly;
use super::rat::Rat;
use super::series::LSeries;
use super::{ArithError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(ArithError::PolyDivByZero);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) >= 1 {
            let (n, rn) = num.div_rem(&g)?;
            let (d, rd) = den.div_rem(&g)?;
            debug_assert!(rn.is_zero() && rd.is_zero());
            (n, d)
        } else {
            (num, den)
        };
        // make den monic
        let lead = den.leading().unwrap().clone();
        let inv = lead.recip();
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        RatFunc::new(n, d).expect("nonzero denominator")
    }

    /// Exact evaluation; errors at a pole.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(ArithError::PolyDivByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let ev = |p: &Poly| {
            let mut acc = 0.0f64;
            for c in p.coeffs().iter().rev() {
                acc = acc * x + super::rat::rat_to_f64(c);
            }
            acc
        };
        ev(&self.num) / ev(&self.den)
    }

    /// Substitutes a rational function: self(g(x)).
    pub fn compose(&self, g: &RatFunc) -> Result<RatFunc> {
        // p(g) = sum p_i g^i = (sum p_i num^i den^{dp-i}) / den^dp
        let sub = |p: &Poly| -> Poly {
            let dp = p.degree().unwrap_or(0);
            let mut acc = Poly::zero();
            for i in 0..=dp {
                let c = p.coeff(i);
                if c.is_zero() {
                    continue;
                }
                let mut term = Poly::constant(c);
                for _ in 0..i {
                    term = &term * &g.num;
                }
                for _ in i..dp {
                    term = &term * &g.den;
                }
                acc = &acc + &term;
            }
            acc
        };
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let mut n = sub(&self.num);
        let mut d = sub(&self.den);
        // bring both over den^max(dn,dd)
        if dn < dd {
            for _ in dn..dd {
                n = &n * &g.den;
            }
        } else {
            for _ in dd..dn {
                d = &d * &g.den;
            }
        }
        RatFunc::new(n, d)
    }

    /// Exact Laurent coefficients at a center on a window; a pole at the
    /// center just yields negative exponents.
    pub fn expand(&self, center: &Rat, k_min: i64, k_max: i64) -> Result<LSeries> {
        assert!(k_min <= k_max, "window must be well ordered");
        let n = self.num.shift(center);
        let d = self.den.shift(center);
        if self.num.is_zero() {
            return Ok(LSeries::zero(center.clone(), k_min, k_max));
        }
        // valuations at 0 of shifted polys
        let vn = val_at_zero(&n);
        let vd = val_at_zero(&d);
        let v = vn as i64 - vd as i64;
        // build series for num and den on enough terms
        let need = (k_max - v) + 1;
        let ns = poly_to_series(&n, center, k_max.max(0) + need.max(0) + vd as i64 + 1);
        let ds = poly_to_series(&d, center, k_max.max(0) + need.max(0) + vd as i64 + 1);
        let q = ns.div(&ds)?;
        // q is exact to high order; clip to the requested window
        let lo = q.k_min().min(k_min);
        let mut out = LSeries::zero(center.clone(), lo.min(k_min), k_max);
        for k in out.k_min()..=k_max {
            let c = q.coeff(k)?;
            if !c.is_zero() {
                out = out.add(&LSeries::monomial(center.clone(), c, k, out.k_min(), k_max))?;
            }
        }
        Ok(out)
    }

    /// The antiderivative when it is again rational (no log terms), i.e.
    /// all residues vanish. Requires the denominator to split over Q.
    pub fn integrate_rational(&self) -> Result<RatFunc> {
        // polynomial part integrates termwise
        let (q, r) = self.num.div_rem(&self.den)?;
        let mut poly_part = Vec::with_capacity(q.coeffs().len() + 1);
        poly_part.push(Rat::zero());
        for (i, c) in q.coeffs().iter().enumerate() {
            poly_part.push(c / Rat::from_integer((i as i64 + 1).into()));
        }
        let mut acc = RatFunc::from_poly(Poly::new(poly_part));
        if r.is_zero() {
            return Ok(acc);
        }
        // proper part via partial fractions over rational roots
        let (roots, rest) = self.den.rational_roots();
        if rest.degree().unwrap_or(0) >= 1 {
            return Err(ArithError::BadRational(format!(
                "denominator has a non-rational factor: {}",
                rest
            )));
        }
        let proper = RatFunc::new(r, self.den.clone())?;
        for (root, mult) in &roots {
            // coefficients c_j of (x-root)^{-j}, j = 1..mult, from the
            // Laurent expansion at the root
            let s = proper.expand(root, -(*mult as i64), 0)?;
            let c1 = s.coeff(-1)?;
            if !c1.is_zero() {
                return Err(ArithError::ResidueObstruction(format!(
                    "residue {} at {}",
                    c1, root
                )));
            }
            for j in 2..=(*mult as i64) {
                let cj = s.coeff(-j)?;
                if cj.is_zero() {
                    continue;
                }
                // integral of (x-root)^{-j} is (x-root)^{1-j}/(1-j)
                let lin = Poly::new(vec![-root.clone(), Rat::one()]);
                let mut den = Poly::one();
                for _ in 0..(j - 1) {
                    den = &den * &lin;
                }
                let coeff = cj / Rat::from_integer((1 - j).into());
                acc = &acc + &RatFunc::new(Poly::constant(coeff), den)?;
            }
        }
        Ok(acc)
    }

    /// self(c·x) — variable rescaling.
    pub fn scale_var(&self, c: &Rat) -> RatFunc {
        RatFunc::new(self.num.scale_var(c), self.den.scale_var(c)).expect("nonzero denominator")
    }

    pub fn pow(&self, k: i64) -> Result<RatFunc> {
        if k == 0 {
            return Ok(RatFunc::constant(Rat::one()));
        }
        let base = if k > 0 { self.clone() } else { self.recip()? };
        let mut acc = RatFunc::constant(Rat::one());
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

fn val_at_zero(p: &Poly) -> usize {
    p.coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .unwrap_or(0)
}

fn poly_to_series(p: &Poly, center: &Rat, k_max: i64) -> LSeries {
    let deg = p.degree().unwrap_or(0) as i64;
    let top = k_max.max(deg);
    let terms: Vec<(i64, Rat)> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| (i as i64, c.clone()))
        .collect();
    LSeries::from_terms(center.clone(), &terms, 0, top)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl<'a> Add for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &'a RatFunc) -> RatFunc {
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let d = &self.den * &rhs.den;
        RatFunc::new(n, d).expect("nonzero denominator")
    }
}

impl<'a> Sub for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &'a RatFunc) -> RatFunc {
        self.add(&rhs.neg())
    }
}

impl<'a> Mul for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &'a RatFunc) -> RatFunc {
        let n = &self.num * &rhs.num;
        let d = &self.den * &rhs.den;
        RatFunc::new(n, d).expect("nonzero denominator")
    }
}

impl<'a> Div for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &'a RatFunc) -> RatFunc {
        let n = &self.num * &rhs.den;
        let d = &self.den * &rhs.num;
        RatFunc::new(n, d).expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// Scales by a rational constant.
impl Mul<&Rat> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::super::rat::rat;
    use super::*;

    fn rf(num: &[(i64, i64)], den: &[(i64, i64)]) -> RatFunc {
        let p = Poly::new(num.iter().map(|(a, b)| rat(*a, *b)).collect());
        let q = Poly::new(den.iter().map(|(a, b)| rat(*a, *b)).collect());
        RatFunc::new(p, q).unwrap()
    }

    #[test]
    fn reduces_and_monic() {
        // (2x^2 - 2) / (4x - 4) = (x + 1)/2
        let f = rf(&[(-2, 1), (0, 1), (2, 1)], &[(-4, 1), (4, 1)]);
        assert_eq!(f.den(), &Poly::one());
        assert_eq!(f.num(), &Poly::new(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn expand_geometric() {
        // 1/(1-z) at 0 on [0,2] -> 1 + z + z^2
        let f = rf(&[(1, 1)], &[(1, 1), (-1, 1)]);
        let s = f.expand(&rat(0, 1), 0, 2).unwrap();
        for k in 0..=2 {
            assert_eq!(s.coeff(k).unwrap(), rat(1, 1));
        }
    }

    #[test]
    fn expand_with_pole() {
        // 1/z^3 + 1/z at 0 on [-3,0]
        let f = rf(&[(1, 1), (0, 1), (1, 1)], &[(0, 1), (0, 1), (0, 1), (1, 1)]);
        let s = f.expand(&rat(0, 1), -3, 0).unwrap();
        assert_eq!(s.coeff(-3).unwrap(), rat(1, 1));
        assert_eq!(s.coeff(-2).unwrap(), rat(0, 1));
        assert_eq!(s.coeff(-1).unwrap(), rat(1, 1));
        assert_eq!(s.coeff(0).unwrap(), rat(0, 1));
    }

    #[test]
    fn expand_shifted_double_pole() {
        // 1/(z-2)^2 at 0 on [0,1] -> 1/4 + z/4
        let f = rf(&[(1, 1)], &[(4, 1), (-4, 1), (1, 1)]);
        let s = f.expand(&rat(0, 1), 0, 1).unwrap();
        assert_eq!(s.coeff(0).unwrap(), rat(1, 4));
        assert_eq!(s.coeff(1).unwrap(), rat(1, 4));
    }

    #[test]
    fn compose_rational() {
        // f(x) = 1/x, g(x) = (x+1)/(x-1): f(g) = (x-1)/(x+1)
        let f = rf(&[(1, 1)], &[(0, 1), (1, 1)]);
        let g = rf(&[(1, 1), (1, 1)], &[(-1, 1), (1, 1)]);
        let h = f.compose(&g).unwrap();
        let expect = rf(&[(-1, 1), (1, 1)], &[(1, 1), (1, 1)]);
        assert_eq!(h, expect);
    }

    #[test]
    fn integrate_rational_simple() {
        // d/dx of 1/(x-1) is -1/(x-1)^2; integrating back recovers it
        let f = rf(&[(-1, 1)], &[(1, 1), (-2, 1), (1, 1)]);
        let int = f.integrate_rational().unwrap();
        assert_eq!(int.derivative(), f);
        // 1/x has a residue: error
        let g = rf(&[(1, 1)], &[(0, 1), (1, 1)]);
        assert!(g.integrate_rational().is_err());
    }

    #[test]
    fn expand_times_reciprocal_is_one() {
        let f = rf(&[(1, 1), (3, 2), (0, 1), (1, 1)], &[(2, 1), (0, 1), (1, 1)]);
        let g = f.recip().unwrap();
        let sf = f.expand(&rat(1, 2), -2, 6).unwrap();
        let sg = g.expand(&rat(1, 2), -2, 6).unwrap();
        let p = sf.mul(&sg).unwrap();
        assert_eq!(p.coeff(0).unwrap(), rat(1, 1));
        for k in p.k_min()..=p.k_max() {
            if k != 0 {
                assert_eq!(p.coeff(k).unwrap(), rat(0, 1), "exponent {}", k);
            }
        }
    }
}
