//! The genus-0 spectral-curve data model.
//!
//! A curve is the z-line with a rational differential dx/dz and a rational
//! function y, together with per-branch-point local data: the Taylor
//! expansion of x − x(a), the local deck involution series z̄(u), and the
//! hardness classification read from the valuation of y(z) − y(z̄).
//! The Bergman kernel is fixed to dz₁dz₂/(z₁−z₂)² throughout.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactarith::{rat, rat_from_str, rat_to_string, ArithError, LSeries, Poly, Rat, RatFunc};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CurveError {
    #[error("xprime is identically zero")]
    ZeroXprime,
    #[error("branch point {0} is a zero of xprime with multiplicity {1} (non-simple ramification unsupported)")]
    NonSimpleRamification(String, usize),
    #[error("exact mode requires rational branch points; residual factor {0}")]
    IrrationalBranchPoints(String),
    #[error("y dx has a pole at branch point {0} (inadmissible curve)")]
    YdxSingular(String),
    #[error("no branch points found")]
    NoBranchPoints,
    #[error("y(z) - y(zbar) vanishes identically at {0} to the truncation order (degenerate curve)")]
    DegenerateBranchPoint(String),
    #[error("declared branch point {0} is not a simple zero of xprime")]
    BadDeclaredBranchPoint(String),
    #[error("global involution does not preserve x: {0}")]
    BadInvolution(String),
    #[error("invalid preset parameter: {0}")]
    BadParameter(String),
    #[error("branch values are not distinct: x({0}) = x({1})")]
    CoincidentBranchValues(String, String),
    #[error("arithmetic failure: {0}")]
    Arith(#[from] ArithError),
    #[error("curve file: {0}")]
    File(String),
}

pub type Result<T> = std::result::Result<T, CurveError>;

/// Per-branch-point local data, all series in u = z − a.
#[derive(Debug, Clone)]
pub struct BranchData {
    pub point: Rat,
    /// Taylor series of x − x(a), valuation exactly 2.
    pub x_series: LSeries,
    /// The local involution z̄ − a as a series in u, leading term −u.
    pub involution: LSeries,
    /// Expansion of y(z) − y(z̄(z)); valuation 2m − 1.
    pub ydiff_series: LSeries,
    /// Expansion of xprime at a (simple zero).
    pub xprime_series: LSeries,
    /// Hardness: m = 1 soft, m = 0 hard.
    pub hardness_m: i64,
}

/// A genus-0 spectral curve with global coordinate z.
#[derive(Debug, Clone)]
pub struct SpectralCurve {
    pub label: String,
    /// dx/dz as a rational function.
    pub xprime: RatFunc,
    pub y: RatFunc,
    pub branch_points: Vec<Rat>,
    /// A global rational involution with x∘σ = x, when one exists.
    pub global_involution: Option<RatFunc>,
    /// x itself, when rationally available (presets; used by the (0,2)
    /// linear loop-equation identity). x-differences elsewhere come from
    /// integrating xprime as a series.
    pub x: Option<RatFunc>,
}

impl SpectralCurve {
    /// Validates and assembles a curve: finds/validates branch points,
    /// checks y dx regularity, checks the declared global involution, and
    /// checks distinctness of branch values when x is available.
    pub fn new(
        label: impl Into<String>,
        xprime: RatFunc,
        y: RatFunc,
        branch_points: Option<Vec<Rat>>,
        global_involution: Option<RatFunc>,
        x: Option<RatFunc>,
    ) -> Result<Self> {
        let found = find_branch_points(&xprime, &y)?;
        let branch_points = match branch_points {
            None => found,
            Some(decl) => {
                for b in &decl {
                    if !found.contains(b) {
                        return Err(CurveError::BadDeclaredBranchPoint(rat_to_string(b)));
                    }
                }
                let mut d = decl;
                d.sort();
                d
            }
        };
        if branch_points.is_empty() {
            return Err(CurveError::NoBranchPoints);
        }
        let curve = SpectralCurve {
            label: label.into(),
            xprime,
            y,
            branch_points,
            global_involution,
            x,
        };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        // y dx regular at each branch point
        let ydx = &self.y * &self.xprime;
        for a in &self.branch_points {
            if ydx.den().eval(a).is_zero() {
                return Err(CurveError::YdxSingular(rat_to_string(a)));
            }
        }
        // global involution must satisfy x'(sigma(z)) sigma'(z) = x'(z)
        // and sigma(sigma(z)) = z, as exact rational identities
        if let Some(sigma) = &self.global_involution {
            let lhs = &self.xprime.compose(sigma)? * &sigma.derivative();
            if lhs != self.xprime {
                return Err(CurveError::BadInvolution("d(x∘σ) ≠ dx".into()));
            }
            let ss = sigma.compose(sigma)?;
            if ss != RatFunc::x() {
                return Err(CurveError::BadInvolution("σ∘σ ≠ id".into()));
            }
        }
        // distinct branch values when x is rationally available
        if let Some(x) = &self.x {
            let mut vals: Vec<(Rat, Rat)> = Vec::new();
            for a in &self.branch_points {
                let v = x.eval(a)?;
                for (b, w) in &vals {
                    if *w == v {
                        return Err(CurveError::CoincidentBranchValues(
                            rat_to_string(b),
                            rat_to_string(a),
                        ));
                    }
                }
                vals.push((a.clone(), v));
            }
        }
        Ok(())
    }

    /// Local data at a branch point, series to the requested order in u.
    pub fn branch_data(&self, a: &Rat, order: i64) -> Result<BranchData> {
        if !self.branch_points.contains(a) {
            return Err(CurveError::BadDeclaredBranchPoint(rat_to_string(a)));
        }
        let xprime_series = self.xprime.expand(a, 0, order)?;
        // x - x(a) by integrating xprime's expansion (valuation exactly 2)
        let x_series = xprime_series.integrate()?;
        debug_assert_eq!(x_series.valuation(), Some(2));
        let involution = local_involution_from_x_series(&x_series)?;
        // ydiff = y(a+u) - y(a+zbar(u))
        let y_series = self.y.expand(a, -order, order)?;
        let y_at_zbar = y_series.compose(&involution)?;
        let ydiff_series = y_series.sub(&y_at_zbar)?;
        let m = match ydiff_series.valuation() {
            None => return Err(CurveError::DegenerateBranchPoint(rat_to_string(a))),
            Some(1) => 1,
            Some(-1) => 0,
            Some(v) => {
                return Err(CurveError::DegenerateBranchPoint(format!(
                    "{} (ydiff valuation {})",
                    rat_to_string(a),
                    v
                )))
            }
        };
        Ok(BranchData {
            point: a.clone(),
            x_series,
            involution,
            ydiff_series,
            xprime_series,
            hardness_m: m,
        })
    }

    /// The local involution series z̄(u) = −u + c₂u² + … at a branch point.
    pub fn local_involution(&self, a: &Rat, order: i64) -> Result<LSeries> {
        let xprime_series = self.xprime.expand(a, 0, order)?;
        let x_series = xprime_series.integrate()?;
        local_involution_from_x_series(&x_series)
    }
}

/// All rational roots of the numerator of xprime that are simple zeros and
/// not poles of y·xprime, sorted. Errors on multiplicity ≥ 2 and on a
/// residual factor with no rational roots.
pub fn find_branch_points(xprime: &RatFunc, y: &RatFunc) -> Result<Vec<Rat>> {
    if xprime.is_zero() {
        return Err(CurveError::ZeroXprime);
    }
    let (roots, rest) = xprime.num().rational_roots();
    if rest.degree().unwrap_or(0) >= 1 {
        return Err(CurveError::IrrationalBranchPoints(format!("{}", rest)));
    }
    let ydx = y * xprime;
    let mut out = Vec::new();
    for (r, mult) in roots {
        if mult >= 2 {
            return Err(CurveError::NonSimpleRamification(rat_to_string(&r), mult));
        }
        if ydx.den().eval(&r).is_zero() {
            continue;
        }
        out.push(r);
    }
    out.sort();
    Ok(out)
}

/// Solves x(z̄) = x(z) locally from the Taylor series of x − X (valuation
/// exactly 2): with x − X = h(0)·ξ̃² and ξ̃ = u·sqrt(h/h(0)) (leading
/// coefficient 1, always a rational square), the nontrivial sheet swap is
/// z̄ = ξ̃⁻¹ ∘ (−ξ̃).
pub fn local_involution_from_x_series(x_series: &LSeries) -> Result<LSeries> {
    let v = x_series.valuation();
    if v != Some(2) {
        return Err(CurveError::NonSimpleRamification(
            rat_to_string(x_series.center()),
            v.unwrap_or(0).unsigned_abs() as usize,
        ));
    }
    let h0 = x_series.coeff(2)?;
    let normalized = x_series.scale(&h0.recip());
    let xi = normalized.sqrt()?; // valuation 1, leading coefficient 1
    let xi_inv = xi.revert()?;
    Ok(xi_inv.compose(&xi.neg())?)
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// x = z², y = z; the single soft branch point is z = 0.
pub fn airy() -> SpectralCurve {
    let xprime = RatFunc::from_poly(Poly::new(vec![Rat::zero(), rat(2, 1)]));
    let y = RatFunc::x();
    SpectralCurve::new(
        "airy",
        xprime,
        y,
        None,
        Some(-&RatFunc::x()),
        Some(RatFunc::from_poly(Poly::monomial(Rat::one(), 2))),
    )
    .expect("airy preset is valid")
}

/// x = ζ², y = ζ − 1/ζ; the single branch point ζ = 0 is hard.
pub fn tracy_widom() -> SpectralCurve {
    let xprime = RatFunc::from_poly(Poly::new(vec![Rat::zero(), rat(2, 1)]));
    let y = RatFunc::new(
        Poly::new(vec![rat(-1, 1), Rat::zero(), Rat::one()]),
        Poly::x(),
    )
    .unwrap();
    SpectralCurve::new(
        "tracy_widom",
        xprime,
        y,
        None,
        Some(-&RatFunc::x()),
        Some(RatFunc::from_poly(Poly::monomial(Rat::one(), 2))),
    )
    .expect("tracy_widom preset is valid")
}

/// The Lambert curve e^x = z e^{−z} with global coordinate z = y:
/// xprime = 1/z − 1, y = z; soft branch point at z = 1, no global
/// involution, and x itself is not rational.
pub fn lambert() -> SpectralCurve {
    let xprime = RatFunc::new(Poly::new(vec![Rat::one(), rat(-1, 1)]), Poly::x()).unwrap();
    SpectralCurve::new("lambert", xprime, RatFunc::x(), None, None, None)
        .expect("lambert preset is valid")
}

/// x = α + γ(z + 1/z), y = Σ u_k (z^k − z^{−k}); branch points ±1, global
/// involution z ↦ 1/z.
pub fn joukowski(alpha: &Rat, gamma: &Rat, u: &[Rat]) -> Result<SpectralCurve> {
    if gamma.is_zero() {
        return Err(CurveError::BadParameter("gamma = 0".into()));
    }
    if u.is_empty() || u.iter().all(|c| c.is_zero()) {
        return Err(CurveError::BadParameter(
            "y needs at least one nonzero u_k".into(),
        ));
    }
    // xprime = gamma (1 - 1/z^2) = gamma (z^2 - 1)/z^2
    let xprime = RatFunc::new(
        Poly::new(vec![-gamma.clone(), Rat::zero(), gamma.clone()]),
        Poly::monomial(Rat::one(), 2),
    )
    .unwrap();
    // y = sum u_k (z^k - z^{-k}) over common denominator z^d
    let d = u.len();
    let mut num = vec![Rat::zero(); 2 * d + 1];
    for (i, uk) in u.iter().enumerate() {
        let k = i + 1;
        num[d + k] += uk;
        num[d - k] -= uk;
    }
    let y = RatFunc::new(Poly::new(num), Poly::monomial(Rat::one(), d))?;
    // x = alpha + gamma (z + 1/z)
    let x = RatFunc::new(
        Poly::new(vec![gamma.clone(), alpha.clone(), gamma.clone()]),
        Poly::x(),
    )
    .unwrap();
    let sigma = RatFunc::new(Poly::one(), Poly::x()).unwrap(); // 1/z
    SpectralCurve::new(
        format!(
            "joukowski(α={},γ={})",
            rat_to_string(alpha),
            rat_to_string(gamma)
        ),
        xprime,
        y,
        None,
        Some(sigma),
        Some(x),
    )
}

/// x = z² with odd y: y = Σ_j c_j z^{2j−1} (j ≥ 0; c₀/z is the hard-edge
/// channel). Global involution z ↦ −z.
pub fn kontsevich(c: &[Rat]) -> Result<SpectralCurve> {
    if c.is_empty() || c.iter().all(|v| v.is_zero()) {
        return Err(CurveError::BadParameter(
            "y needs at least one nonzero coefficient".into(),
        ));
    }
    let xprime = RatFunc::from_poly(Poly::new(vec![Rat::zero(), rat(2, 1)]));
    // y = (c0 + c1 z^2 + c2 z^4 + ...)/z
    let mut num = vec![Rat::zero(); 2 * c.len() - 1];
    for (j, cj) in c.iter().enumerate() {
        num[2 * j] = cj.clone();
    }
    let y = RatFunc::new(Poly::new(num), Poly::x())?;
    SpectralCurve::new(
        "kontsevich",
        xprime,
        y,
        None,
        Some(-&RatFunc::x()),
        Some(RatFunc::from_poly(Poly::monomial(Rat::one(), 2))),
    )
}

/// Looks up a preset by CLI name.
pub fn preset(name: &str) -> Result<SpectralCurve> {
    match name {
        "airy" => Ok(airy()),
        "tracy_widom" | "tw" => Ok(tracy_widom()),
        "lambert" => Ok(lambert()),
        "joukowski" => joukowski(&Rat::zero(), &Rat::one(), &[Rat::one()]),
        _ => Err(CurveError::BadParameter(format!("unknown preset {name:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Curve file (JSON)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RatFuncFile {
    num: Vec<String>,
    den: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BranchSpec {
    Auto(String),
    List(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    label: String,
    xprime: RatFuncFile,
    y: RatFuncFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    involution: Option<RatFuncFile>,
    branch_points: BranchSpec,
}

fn poly_from_strings(v: &[String]) -> Result<Poly> {
    let coeffs = v
        .iter()
        .map(|s| rat_from_str(s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Poly::new(coeffs))
}

fn ratfunc_from_file(f: &RatFuncFile) -> Result<RatFunc> {
    Ok(RatFunc::new(
        poly_from_strings(&f.num)?,
        poly_from_strings(&f.den)?,
    )?)
}

/// Parses the JSON curve file format.
pub fn curve_from_json(text: &str) -> Result<SpectralCurve> {
    let f: CurveFile = serde_json::from_str(text).map_err(|e| CurveError::File(e.to_string()))?;
    let xprime = ratfunc_from_file(&f.xprime)?;
    let y = ratfunc_from_file(&f.y)?;
    let involution = match &f.involution {
        None => None,
        Some(s) => Some(ratfunc_from_file(s)?),
    };
    let branch_points = match &f.branch_points {
        BranchSpec::Auto(s) if s == "auto" => None,
        BranchSpec::Auto(other) => {
            return Err(CurveError::File(format!(
                "branch_points must be \"auto\" or a list, got {other:?}"
            )))
        }
        BranchSpec::List(v) => Some(
            v.iter()
                .map(|s| rat_from_str(s))
                .collect::<std::result::Result<Vec<_>, _>>()?,
        ),
    };
    // attempt a rational antiderivative of xprime so the (0,2) identity
    // check is available for file curves too
    let x = xprime.integrate_rational().ok();
    SpectralCurve::new(f.label, xprime, y, branch_points, involution, x)
}

/// Serializes a curve back to the file format.
pub fn curve_to_json(c: &SpectralCurve) -> String {
    let to_file = |f: &RatFunc| RatFuncFile {
        num: f.num().coeffs().iter().map(rat_to_string).collect(),
        den: f.den().coeffs().iter().map(rat_to_string).collect(),
    };
    let file = CurveFile {
        label: c.label.clone(),
        xprime: to_file(&c.xprime),
        y: to_file(&c.y),
        involution: c.global_involution.as_ref().map(to_file),
        branch_points: BranchSpec::List(c.branch_points.iter().map(rat_to_string).collect()),
    };
    serde_json::to_string_pretty(&file).expect("curve file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::rat;

    #[test]
    fn find_branch_points_presets() {
        assert_eq!(airy().branch_points, vec![Rat::zero()]);
        let j = joukowski(&Rat::zero(), &Rat::one(), &[Rat::one()]).unwrap();
        assert_eq!(j.branch_points, vec![rat(-1, 1), rat(1, 1)]);
        assert_eq!(lambert().branch_points, vec![rat(1, 1)]);
    }

    #[test]
    fn non_simple_ramification_is_error() {
        // xprime = 3z^2 has a double zero
        let xprime = RatFunc::from_poly(Poly::monomial(rat(3, 1), 2));
        let err = find_branch_points(&xprime, &RatFunc::x());
        assert!(matches!(err, Err(CurveError::NonSimpleRamification(_, 2))));
    }

    #[test]
    fn irrational_branch_points_are_error() {
        // xprime = z^2 - 2
        let xprime = RatFunc::from_poly(Poly::new(vec![rat(-2, 1), Rat::zero(), Rat::one()]));
        let err = find_branch_points(&xprime, &RatFunc::x());
        assert!(matches!(err, Err(CurveError::IrrationalBranchPoints(_))));
    }

    #[test]
    fn airy_involution_is_exactly_minus_u() {
        let c = airy();
        let inv = c.local_involution(&Rat::zero(), 12).unwrap();
        assert_eq!(inv.coeff(1).unwrap(), rat(-1, 1));
        for k in 2..=inv.k_max() {
            assert_eq!(inv.coeff(k).unwrap(), Rat::zero(), "exponent {}", k);
        }
    }

    #[test]
    fn joukowski_involution_matches_global() {
        // at a=1: zbar = 1/z, so zbar - 1 = -u + u^2 - u^3 + ...
        let c = joukowski(&Rat::zero(), &Rat::one(), &[Rat::one()]).unwrap();
        let inv = c.local_involution(&rat(1, 1), 10).unwrap();
        for k in 1..=inv.k_max() {
            let expect = if k % 2 == 1 { rat(-1, 1) } else { rat(1, 1) };
            assert_eq!(inv.coeff(k).unwrap(), expect, "exponent {}", k);
        }
    }

    #[test]
    fn lambert_involution_series() {
        // zbar = -u + (2/3)u^2 - (4/9)u^3 + ...
        let c = lambert();
        let inv = c.local_involution(&rat(1, 1), 8).unwrap();
        assert_eq!(inv.coeff(1).unwrap(), rat(-1, 1));
        assert_eq!(inv.coeff(2).unwrap(), rat(2, 3));
        assert_eq!(inv.coeff(3).unwrap(), rat(-4, 9));
        // idempotence to truncation order
        let twice = inv.compose(&inv).unwrap();
        assert_eq!(twice.coeff(1).unwrap(), rat(1, 1));
        for k in 2..=twice.k_max() {
            assert_eq!(twice.coeff(k).unwrap(), Rat::zero(), "exponent {}", k);
        }
    }

    #[test]
    fn classification_soft_and_hard() {
        let a = airy().branch_data(&Rat::zero(), 10).unwrap();
        assert_eq!(a.hardness_m, 1);
        assert_eq!(a.ydiff_series.coeff(1).unwrap(), rat(2, 1));
        let t = tracy_widom().branch_data(&Rat::zero(), 10).unwrap();
        assert_eq!(t.hardness_m, 0);
        assert_eq!(t.ydiff_series.coeff(-1).unwrap(), rat(-2, 1));
        let l = lambert().branch_data(&rat(1, 1), 10).unwrap();
        assert_eq!(l.hardness_m, 1);
        assert_eq!(l.ydiff_series.coeff(1).unwrap(), rat(2, 1));
    }

    #[test]
    fn x_invariance_under_involution() {
        for c in [
            airy(),
            tracy_widom(),
            lambert(),
            joukowski(&rat(1, 2), &rat(3, 1), &[rat(1, 1), rat(-1, 5)]).unwrap(),
        ] {
            for a in c.branch_points.clone() {
                let bd = c.branch_data(&a, 16).unwrap();
                let xz = bd.x_series.clone();
                let xzbar = xz.compose(&bd.involution).unwrap();
                let diff = xz.sub(&xzbar).unwrap();
                assert!(diff.is_known_zero(), "curve {} at {}", c.label, a);
            }
        }
    }

    #[test]
    fn involution_idempotent_on_randomized_joukowski() {
        // a light version of the preset property battery: randomized small
        // rational parameters, idempotence and x-invariance to order 40
        let params = [
            (rat(0, 1), rat(1, 1), vec![rat(1, 1)]),
            (rat(1, 3), rat(2, 1), vec![rat(1, 2), rat(1, 7)]),
            (rat(-2, 5), rat(1, 2), vec![rat(3, 1), rat(0, 1), rat(1, 4)]),
        ];
        for (al, ga, u) in params {
            let c = joukowski(&al, &ga, &u).unwrap();
            for a in c.branch_points.clone() {
                let bd = c.branch_data(&a, 40).unwrap();
                let twice = bd.involution.compose(&bd.involution).unwrap();
                assert_eq!(twice.coeff(1).unwrap(), rat(1, 1));
                for k in 2..=twice.k_max() {
                    assert_eq!(twice.coeff(k).unwrap(), Rat::zero());
                }
            }
        }
    }

    #[test]
    fn ydx_regular_at_branch_points() {
        for c in [airy(), tracy_widom(), lambert()] {
            for a in c.branch_points.clone() {
                let bd = c.branch_data(&a, 10).unwrap();
                let y = c.y.expand(&a, -10, 10).unwrap();
                let prod = y.mul(&bd.xprime_series).unwrap();
                assert!(prod.valuation().unwrap_or(0) >= 0);
            }
        }
    }

    #[test]
    fn global_involution_expansion_matches_local_series() {
        for c in [
            airy(),
            tracy_widom(),
            joukowski(&rat(1, 2), &rat(3, 1), &[rat(1, 1), rat(-1, 5)]).unwrap(),
        ] {
            let sigma = c.global_involution.clone().unwrap();
            for a in c.branch_points.clone() {
                let local = c.local_involution(&a, 20).unwrap();
                // expand sigma(a+u) - a
                let glob = sigma.expand(&a, 0, 20).unwrap();
                let shifted = glob.sub(&LSeries::monomial(a.clone(), a.clone(), 0, 0, 20)).unwrap();
                for k in 1..=local.k_max().min(shifted.k_max()) {
                    assert_eq!(
                        local.coeff(k).unwrap(),
                        shifted.coeff(k).unwrap(),
                        "curve {} at {} exponent {}",
                        c.label,
                        a,
                        k
                    );
                }
            }
        }
    }

    #[test]
    fn curve_file_round_trip() {
        let c = tracy_widom();
        let json = curve_to_json(&c);
        let back = curve_from_json(&json).unwrap();
        assert_eq!(back.branch_points, c.branch_points);
        assert_eq!(back.y, c.y);
        assert_eq!(back.xprime, c.xprime);
        assert_eq!(back.x, c.x);
    }

    #[test]
    fn bad_preset_params() {
        assert!(joukowski(&Rat::zero(), &Rat::zero(), &[Rat::one()]).is_err());
        assert!(kontsevich(&[]).is_err());
    }

    #[test]
    fn tracy_widom_via_kontsevich_family() {
        let tw = kontsevich(&[rat(-1, 1), rat(1, 1)]).unwrap();
        assert_eq!(tw.y, tracy_widom().y);
    }
}
