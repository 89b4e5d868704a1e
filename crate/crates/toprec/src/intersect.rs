//! ψ-class intersection numbers ⟨τ_{d₁}⋯τ_{d_n}⟩_g two ways: extraction
//! from the Airy-curve correlators, and an independent Virasoro/DVV
//! three-term recursion with string and dilaton reductions.
//!
//! The extraction reads the pole-basis coefficient of Π dz_i/z_i^{2d_i+2}
//! in ω_n^(g)[airy], divides by Π (2d_i+1)!!, and applies the calibration
//! constant λ_K^{2−2g−n}. λ_K absorbs the global kernel-convention factor;
//! it is determined once from ⟨τ₀³⟩ = 1 and then enters every other (g,n)
//! with a different exponent, so agreement across the table is a genuine
//! multi-point test.

use num::{One, Zero};
use std::collections::BTreeMap;

use crate::curve;
use crate::exactarith::{rat_pow, rat_to_string, Rat};
use crate::trcore::{stable, Engine, TrError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntersectError {
    #[error("unstable (g,n) = ({0},{1})")]
    Unstable(i64, i64),
    #[error("size limit exceeded: g = {0}, n = {1} (oracle desk scale is g ≤ 4, n ≤ 6)")]
    SizeLimit(i64, i64),
    #[error("recursion engine: {0}")]
    Engine(#[from] TrError),
}

pub type Result<T> = std::result::Result<T, IntersectError>;

/// (2d+1)!! as an exact integer-valued rational.
pub fn double_factorial_odd(d: i64) -> Rat {
    let mut acc = Rat::one();
    let mut k = 2 * d + 1;
    while k > 1 {
        acc *= Rat::from_integer(k.into());
        k -= 2;
    }
    acc
}

fn dim_ok(g: i64, d: &[i64]) -> bool {
    let n = d.len() as i64;
    d.iter().sum::<i64>() == 3 * g - 3 + n
}

/// The DVV / Virasoro oracle for ⟨τ_{d₁}⋯τ_{d_n}⟩_g, memoized on
/// (g, sorted d). String and dilaton handle d₁ ∈ {0,1}; the three-term
/// recursion handles d₁ ≥ 2 with only stable factors in the splitting sum.
pub struct DvvOracle {
    memo: BTreeMap<(i64, Vec<i64>), Rat>,
}

impl Default for DvvOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl DvvOracle {
    pub fn new() -> Self {
        DvvOracle {
            memo: BTreeMap::new(),
        }
    }

    pub fn value(&mut self, g: i64, d: &[i64]) -> Result<Rat> {
        let n = d.len() as i64;
        if !stable(g, n) {
            return Err(IntersectError::Unstable(g, n));
        }
        if g > 4 || n > 6 + 3 {
            return Err(IntersectError::SizeLimit(g, n));
        }
        if !dim_ok(g, d) {
            return Ok(Rat::zero());
        }
        let mut key: Vec<i64> = d.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a)); // descending
        if let Some(v) = self.memo.get(&(g, key.clone())) {
            return Ok(v.clone());
        }
        let v = self.compute(g, &key)?;
        self.memo.insert((g, key), v.clone());
        Ok(v)
    }

    fn compute(&mut self, g: i64, d: &[i64]) -> Result<Rat> {
        // d sorted descending, dimension already checked
        let n = d.len() as i64;
        if (g, n) == (0, 3) {
            return Ok(Rat::one()); // ⟨τ₀³⟩₀ = 1
        }
        let last = *d.last().unwrap();
        if last == 0 {
            // string equation: ⟨τ₀ Π τ_{d_i}⟩ = Σ_j ⟨… τ_{d_j−1} …⟩
            let rest = &d[..d.len() - 1];
            let mut acc = Rat::zero();
            for j in 0..rest.len() {
                if rest[j] == 0 {
                    continue;
                }
                let mut e: Vec<i64> = rest.to_vec();
                e[j] -= 1;
                acc += self.value(g, &e)?;
            }
            return Ok(acc);
        }
        if last == 1 {
            // dilaton equation: ⟨τ₁ Π⟩_g = (2g−2+(n−1))⟨Π⟩_g + (1/24)δ
            let rest = &d[..d.len() - 1];
            if rest.is_empty() {
                // ⟨τ₁⟩₁ = 1/24
                return Ok(Rat::new(1.into(), 24.into()));
            }
            let chi = Rat::from_integer((2 * g - 2 + rest.len() as i64).into());
            return Ok(&chi * &self.value(g, rest)?);
        }
        // three-term DVV for d₁ ≥ 2 (k = d₁ − 1 ≥ 1: no extra delta terms)
        let d1 = d[0];
        let k = d1 - 1;
        let rest = &d[1..];
        let mut acc = Rat::zero();
        // first sum: slide τ_{d₁} onto each other insertion
        for j in 0..rest.len() {
            let mut e: Vec<i64> = rest.to_vec();
            e[j] = k + rest[j];
            let w = &double_factorial_odd(k + rest[j]) / &double_factorial_odd(rest[j] - 1);
            acc += &w * &self.value(g, &e)?;
        }
        // second sum: boundary terms over a + b = k − 1
        let half = Rat::new(1.into(), 2.into());
        for a in 0..=(k - 1) {
            let b = k - 1 - a;
            let w = &double_factorial_odd(a) * &double_factorial_odd(b);
            // genus reduction
            if g >= 1 {
                let mut e: Vec<i64> = rest.to_vec();
                e.push(a);
                e.push(b);
                if stable(g - 1, e.len() as i64) {
                    acc += &(&half * &w) * &self.value(g - 1, &e)?;
                }
            }
            // stable splittings
            let subsets = 1u32 << rest.len();
            for mask in 0..subsets {
                let mut left = vec![a];
                let mut right = vec![b];
                for (j, dj) in rest.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        left.push(*dj);
                    } else {
                        right.push(*dj);
                    }
                }
                for h in 0..=g {
                    if !stable(h, left.len() as i64) || !stable(g - h, right.len() as i64) {
                        continue;
                    }
                    let lv = self.value(h, &left)?;
                    if lv.is_zero() {
                        continue;
                    }
                    let rv = self.value(g - h, &right)?;
                    acc += &(&half * &w) * &(&lv * &rv);
                }
            }
        }
        Ok(acc / double_factorial_odd(d1))
    }
}

/// Intersection numbers extracted from the Airy-curve recursion, with the
/// calibration constant λ_K fixed once by ⟨τ₀³⟩ = 1.
pub struct PsiExtractor {
    engine: Engine,
    lambda_k: Option<Rat>,
}

impl PsiExtractor {
    pub fn new(g_max: i64, n_max: i64) -> Result<Self> {
        let engine = Engine::new(curve::airy(), g_max.max(1), n_max.max(3))?;
        Ok(PsiExtractor {
            engine,
            lambda_k: None,
        })
    }

    /// The calibration constant, determined from ⟨τ₀³⟩ = 1: the raw
    /// coefficient r of Π dz_i/z_i² satisfies r·λ_K^{−1} = 1.
    pub fn lambda_k(&mut self) -> Result<Rat> {
        if let Some(l) = &self.lambda_k {
            return Ok(l.clone());
        }
        let raw = self.extract_raw(0, &[0, 0, 0])?;
        if raw.is_zero() {
            return Err(IntersectError::Engine(TrError::Invariant(
                "vanishing ⟨τ₀³⟩ anchor".into(),
            )));
        }
        self.lambda_k = Some(raw.clone());
        Ok(raw)
    }

    /// Raw pole-basis read-off: coefficient of Π dz_i/z_i^{2d_i+2} in
    /// ω_n^(g)[airy], divided by Π (2d_i+1)!!.
    fn extract_raw(&mut self, g: i64, d: &[i64]) -> Result<Rat> {
        let n = d.len() as i64;
        let cor = self.engine.omega(g, n)?;
        let mut key: Vec<(usize, i64)> = d.iter().map(|di| (0usize, 2 * di + 2)).collect();
        key.sort();
        let coeff = match cor.terms.get(&key) {
            Some(c) => c.clone(),
            None => Rat::zero(),
        };
        let mut denom = Rat::one();
        for di in d {
            denom *= double_factorial_odd(*di);
        }
        Ok(coeff / denom)
    }

    /// ⟨τ_{d₁}⋯τ_{d_n}⟩_g from the recursion. A dimension mismatch returns
    /// 0 (flagged by the caller if desired); unstable requests are errors.
    pub fn extract_psi(&mut self, g: i64, d: &[i64]) -> Result<Rat> {
        let n = d.len() as i64;
        if !stable(g, n) {
            return Err(IntersectError::Unstable(g, n));
        }
        if !dim_ok(g, d) {
            return Ok(Rat::zero());
        }
        let lam = self.lambda_k()?;
        let raw = self.extract_raw(g, d)?;
        Ok(&raw * &rat_pow(&lam, 2 - 2 * g - n))
    }

    /// Asserts that every pole-basis coefficient off the dimension shell
    /// Σ d_i = 3g−3+n vanishes exactly in ω_n^(g)[airy].
    pub fn dimension_selection_holds(&mut self, g: i64, n: i64) -> Result<bool> {
        let cor = self.engine.omega(g, n)?;
        let want: i64 = 2 * (3 * g - 3 + n) + 2 * n;
        for key in cor.terms.keys() {
            let total: i64 = key.iter().map(|(_, k)| *k).sum();
            if total != want {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A populated table row.
#[derive(Debug, Clone)]
pub struct IntersectionRow {
    pub g: i64,
    pub d: Vec<i64>,
    pub value: Rat,
    pub source: &'static str,
}

/// The table over all stable (g,n) with 2g−2+n ≤ chi_max and the per-row
/// agreement of extraction vs oracle.
pub struct IntersectionTable {
    pub rows: Vec<IntersectionRow>,
    pub lambda_k: Rat,
}

/// All weakly-decreasing d-vectors of length n summing to s.
pub fn dimension_vectors(n: usize, s: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, s: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 0 {
            if s == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = max.min(s);
        for v in (0..=hi).rev() {
            cur.push(v);
            rec(n - 1, s - v, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, s, s, &mut Vec::new(), &mut out);
    out
}

/// Builds the golden intersection table for 2g−2+n ≤ chi_max, checking
/// recursion extraction against the DVV oracle on every row.
pub fn build_table(chi_max: i64) -> Result<IntersectionTable> {
    let mut oracle = DvvOracle::new();
    let g_hi = (chi_max + 2) / 2;
    let mut extractor = PsiExtractor::new(g_hi, chi_max + 2)?;
    let lambda_k = extractor.lambda_k()?;
    let mut rows = Vec::new();
    for g in 0..=g_hi {
        for n in 1..=(chi_max - 2 * g + 2) {
            if !stable(g, n) {
                continue;
            }
            let s = 3 * g - 3 + n;
            if s < 0 {
                continue;
            }
            for d in dimension_vectors(n as usize, s) {
                let ex = extractor.extract_psi(g, &d)?;
                let or = oracle.value(g, &d)?;
                if ex != or {
                    return Err(IntersectError::Engine(TrError::Invariant(format!(
                        "extraction {} != oracle {} at g={} d={:?}",
                        rat_to_string(&ex),
                        rat_to_string(&or),
                        g,
                        d
                    ))));
                }
                rows.push(IntersectionRow {
                    g,
                    d,
                    value: ex,
                    source: "recursion+oracle",
                });
            }
        }
    }
    Ok(IntersectionTable { rows, lambda_k })
}

/// String and dilaton consistency over a dimension-closed table slice:
/// ⟨τ₀ Π τ_{d_i}⟩ = Σ_j ⟨… τ_{d_j−1} …⟩ and ⟨τ₁ Π⟩ = (2g−2+n)⟨Π⟩.
pub fn verify_string_dilaton(oracle: &mut DvvOracle, chi_max: i64) -> Result<Vec<(String, bool)>> {
    let mut report = Vec::new();
    for g in 0..=((chi_max + 2) / 2) {
        for n in 1..=(chi_max - 2 * g + 2) {
            if !stable(g, n) {
                continue;
            }
            let s = 3 * g - 3 + n;
            if s < 0 {
                continue;
            }
            for d in dimension_vectors(n as usize, s) {
                // string: prepend a τ₀
                let mut with0 = d.clone();
                with0.push(0);
                let lhs = oracle.value(g, &with0)?;
                let mut rhs = Rat::zero();
                for j in 0..d.len() {
                    if d[j] == 0 {
                        continue;
                    }
                    let mut e = d.clone();
                    e[j] -= 1;
                    rhs += oracle.value(g, &e)?;
                }
                report.push((format!("string g={} d={:?}", g, d), lhs == rhs));
                // dilaton: prepend a τ₁
                let mut with1 = d.clone();
                with1.push(1);
                let lhs = oracle.value(g, &with1)?;
                let chi = Rat::from_integer((2 * g - 2 + n).into());
                let rhs = &chi * &oracle.value(g, &d)?;
                report.push((format!("dilaton g={} d={:?}", g, d), lhs == rhs));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::rat;

    #[test]
    fn oracle_base_cases() {
        let mut o = DvvOracle::new();
        assert_eq!(o.value(0, &[0, 0, 0]).unwrap(), rat(1, 1));
        assert_eq!(o.value(0, &[1, 0, 0, 0]).unwrap(), rat(1, 1));
        assert_eq!(o.value(1, &[1]).unwrap(), rat(1, 24));
    }

    #[test]
    fn oracle_known_values() {
        let mut o = DvvOracle::new();
        // ⟨τ₂⟩₁ is off-shell for n=1? dim 3g-3+n = 1, so ⟨τ₁⟩₁ only.
        assert_eq!(o.value(2, &[4]).unwrap(), rat(1, 1152));
        assert_eq!(o.value(0, &[2, 0, 0, 0, 0]).unwrap(), rat(1, 1));
        assert_eq!(o.value(0, &[1, 1, 0, 0, 0]).unwrap(), rat(2, 1));
        assert_eq!(o.value(1, &[2, 0]).unwrap(), rat(1, 24));
        // genus 2, n = 2: ⟨τ₄τ₁⟩₂ and friends are exercised through the
        // table builder; spot-check ⟨τ₃τ₀⟩₂? dim = 5: ⟨τ₅τ₀⟩₂ = ⟨τ₄⟩₂
        assert_eq!(o.value(2, &[5, 0]).unwrap(), rat(1, 1152));
        // dilaton: ⟨τ₄τ₁⟩₂ = (2·2−2+1)·⟨τ₄⟩₂ = 3/1152 = 1/384
        assert_eq!(o.value(2, &[4, 1]).unwrap(), rat(1, 384));
    }

    #[test]
    fn oracle_dimension_mismatch_is_zero() {
        let mut o = DvvOracle::new();
        assert_eq!(o.value(0, &[1, 1, 1]).unwrap(), Rat::zero());
        assert_eq!(o.value(1, &[0]).unwrap(), Rat::zero());
    }

    #[test]
    fn lambda_k_is_one_half() {
        // the thesis-literal kernel gives ω₃^(0)[airy] = (1/2)Πdz/z², so
        // the ⟨τ₀³⟩ = 1 anchor forces λ_K = 1/2
        let mut ex = PsiExtractor::new(1, 3).unwrap();
        assert_eq!(ex.lambda_k().unwrap(), rat(1, 2));
    }

    #[test]
    fn extraction_matches_oracle_small() {
        let mut ex = PsiExtractor::new(2, 4).unwrap();
        let mut o = DvvOracle::new();
        for (g, d) in [
            (0i64, vec![0i64, 0, 0]),
            (1, vec![1]),
            (0, vec![1, 0, 0, 0]),
            (1, vec![2, 0]),
            (1, vec![1, 1]),
            (2, vec![4]),
        ] {
            assert_eq!(
                ex.extract_psi(g, &d).unwrap(),
                o.value(g, &d).unwrap(),
                "g={} d={:?}",
                g,
                d
            );
        }
    }

    #[test]
    fn positivity_and_dimension_selection() {
        let mut ex = PsiExtractor::new(2, 4).unwrap();
        assert!(ex.dimension_selection_holds(0, 4).unwrap());
        assert!(ex.dimension_selection_holds(1, 2).unwrap());
        assert!(ex.dimension_selection_holds(2, 1).unwrap());
        for (g, d) in [(0i64, vec![0i64, 0, 0]), (1, vec![1]), (2, vec![4])] {
            assert!(ex.extract_psi(g, &d).unwrap().is_positive());
        }
    }

    #[test]
    fn string_dilaton_report_all_pass() {
        let mut o = DvvOracle::new();
        for (name, ok) in verify_string_dilaton(&mut o, 3).unwrap() {
            assert!(ok, "{}", name);
        }
    }

    #[test]
    fn unstable_requests_rejected() {
        let mut ex = PsiExtractor::new(1, 3).unwrap();
        assert!(matches!(
            ex.extract_psi(0, &[0, 0]),
            Err(IntersectError::Unstable(0, 2))
        ));
        let mut o = DvvOracle::new();
        assert!(matches!(
            o.value(0, &[0]),
            Err(IntersectError::Unstable(0, 1))
        ));
    }

    #[test]
    fn dimension_vectors_enumeration() {
        let v = dimension_vectors(3, 2);
        assert_eq!(v, vec![vec![2, 0, 0], vec![1, 1, 0]]);
        assert_eq!(dimension_vectors(1, 0), vec![vec![0]]);
    }
}
