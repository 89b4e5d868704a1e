//! Simple Hurwitz numbers two ways.
//!
//! The oracle counts transposition factorizations in the symmetric group
//! directly: H_{g;μ} = #{(σ, τ₁,…,τ_b) : σ of type μ, τ_i transpositions,
//! τ_b⋯τ₁σ = id, ⟨σ,τ᛫⟩ transitive} / (b!·Πμ_i), with σ run over one
//! representative per cycle type (class size folded into the prefactor) and
//! b = 2g−2+|μ|+ℓ(μ). The recursion route extracts the same numbers from
//! the Lambert-curve correlators: divide each slot by dx, substitute the
//! tree series z = T(w) with w = ze^{−z}, read the coefficient of Πw_i^{μ_i}
//! and divide by Πμ_i. A single calibration constant λ_H (anchored at
//! H_{0;(1,1,1)} = 1, entering other (g,ℓ) with exponent 2−2g−ℓ) absorbs
//! the kernel-convention factor.

use num::{One, Zero};
use std::collections::BTreeMap;

use crate::curve;
use crate::exactarith::{rat_pow, LSeries, Rat};
use crate::trcore::{stable, Engine, TrError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HurwitzError {
    #[error("partition must be nonempty with positive parts")]
    BadPartition,
    #[error("size limit: |μ| = {0} > 6 or b = {1} > 8 (oracle desk scale)")]
    SizeLimit(usize, i64),
    #[error("unstable (g,ℓ) = ({0},{1}): the recursion route needs 2g−2+ℓ > 0")]
    Unstable(i64, i64),
    #[error("engine: {0}")]
    Engine(#[from] TrError),
    #[error("arithmetic: {0}")]
    Arith(#[from] crate::exactarith::ArithError),
}

pub type Result<T> = std::result::Result<T, HurwitzError>;

/// A partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(|p| *p == 0) {
            return Err(HurwitzError::BadPartition);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// |μ| = Σ parts, the degree of the cover.
    pub fn size(&self) -> usize {
        self.parts.iter().map(|p| *p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// |Aut μ| = Π (multiplicity of each part value)!.
    pub fn aut(&self) -> u64 {
        let mut mult: BTreeMap<u32, u64> = BTreeMap::new();
        for p in &self.parts {
            *mult.entry(*p).or_insert(0) += 1;
        }
        mult.values().map(|m| factorial(*m)).product()
    }
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// b_{g;μ} = 2g − 2 + |μ| + ℓ(μ), the number of simple branch points.
pub fn riemann_hurwitz_b(g: i64, mu: &Partition) -> i64 {
    2 * g - 2 + mu.size() as i64 + mu.len() as i64
}

// ---------------------------------------------------------------------------
// Oracle: transposition factorizations
// ---------------------------------------------------------------------------

/// One permutation of cycle type μ on {0..n−1}: consecutive cycles.
fn representative(mu: &Partition) -> Vec<usize> {
    let n = mu.size();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut start = 0usize;
    for p in mu.parts() {
        let p = *p as usize;
        for i in 0..p {
            perm[start + i] = start + (i + 1) % p;
        }
        start += p;
    }
    perm
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(i) = a(b(i))
    b.iter().map(|i| a[*i]).collect()
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, v)| i == *v)
}

/// Transitivity of the subgroup generated by σ and the transpositions,
/// via union-find over the moved points.
fn transitive(n: usize, sigma: &[usize], taus: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            parent[ra] = rb;
        }
    };
    for (i, v) in sigma.iter().enumerate() {
        union(&mut parent, i, *v);
    }
    for (a, b) in taus {
        union(&mut parent, *a, *b);
    }
    let root = find(&mut parent, 0);
    (1..n).all(|i| find(&mut parent, i) == root)
}

/// z_μ = Π v^{m_v} m_v! (the centralizer order), so that the class size is
/// n!/z_μ.
fn z_mu(mu: &Partition) -> u64 {
    let mut mult: BTreeMap<u32, u64> = BTreeMap::new();
    for p in mu.parts() {
        *mult.entry(*p).or_insert(0) += 1;
    }
    mult.iter()
        .map(|(v, m)| (*v as u64).pow(*m as u32) * factorial(*m))
        .product()
}

/// Counts tuples (τ₁,…,τ_b) of transpositions with τ_b⋯τ₁σ = id for the
/// representative σ, optionally filtered by transitivity. DFS over
/// τ₁..τ_{b−1} with τ_b determined by the product condition.
fn count_factorizations(n: usize, sigma: &[usize], b: i64, require_transitive: bool) -> u64 {
    if b < 0 {
        return 0;
    }
    let transpositions: Vec<(usize, usize)> = {
        let mut t = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                t.push((i, j));
            }
        }
        t
    };
    let apply_tau = |perm: &[usize], t: (usize, usize)| -> Vec<usize> {
        // τ ∘ perm
        let tau: Vec<usize> = (0..n)
            .map(|i| {
                if i == t.0 {
                    t.1
                } else if i == t.1 {
                    t.0
                } else {
                    i
                }
            })
            .collect();
        compose(&tau, perm)
    };
    if b == 0 {
        let ok = is_identity(sigma)
            && (!require_transitive || transitive(n, sigma, &[]));
        return ok as u64;
    }
    // DFS over the first b−1 transpositions; the last is determined as the
    // inverse of the running product (must itself be a transposition).
    fn dfs(
        n: usize,
        sigma: &[usize],
        prod: &[usize],
        chosen: &mut Vec<(usize, usize)>,
        remaining: i64,
        transpositions: &[(usize, usize)],
        apply_tau: &dyn Fn(&[usize], (usize, usize)) -> Vec<usize>,
        require_transitive: bool,
    ) -> u64 {
        if remaining == 1 {
            // need τ_b with τ_b ∘ prod = id, i.e. τ_b = prod^{-1}:
            // prod must be a transposition
            let moved: Vec<usize> = (0..n).filter(|i| prod[*i] != *i).collect();
            if moved.len() != 2 {
                return 0;
            }
            let t = (moved[0], moved[1]);
            chosen.push(t);
            let ok = !require_transitive || transitive(n, sigma, chosen);
            chosen.pop();
            return ok as u64;
        }
        let mut acc = 0u64;
        for t in transpositions {
            chosen.push(*t);
            let next = apply_tau(prod, *t);
            acc += dfs(
                n,
                sigma,
                &next,
                chosen,
                remaining - 1,
                transpositions,
                apply_tau,
                require_transitive,
            );
            chosen.pop();
        }
        acc
    }
    dfs(
        n,
        sigma,
        sigma,
        &mut Vec::new(),
        b,
        &transpositions,
        &apply_tau,
        require_transitive,
    )
}

/// The factorization oracle H_{g;μ} = #tuples/(b!·Πμ_i).
pub fn hurwitz_oracle(g: i64, mu: &Partition) -> Result<Rat> {
    let n = mu.size();
    let b = riemann_hurwitz_b(g, mu);
    if n > 6 || b > 8 {
        return Err(HurwitzError::SizeLimit(n, b));
    }
    if b < 0 {
        return Ok(Rat::zero());
    }
    let sigma = representative(mu);
    let count = count_factorizations(n, &sigma, b, true);
    let mut denom = Rat::from_integer(factorial(b as u64).into());
    for p in mu.parts() {
        denom *= Rat::from_integer((*p as u64).into());
    }
    Ok(Rat::from_integer(count.into()) / denom)
}

/// Disconnected count (transitivity filter dropped), normalized per cover:
/// (1/n!)·|C_μ|·#tuples = #tuples / z_μ.
pub fn disconnected_count(g: i64, mu: &Partition) -> Result<Rat> {
    let n = mu.size();
    let b = riemann_hurwitz_b(g, mu);
    if n > 6 || b > 8 {
        return Err(HurwitzError::SizeLimit(n, b));
    }
    if b < 0 {
        return Ok(Rat::zero());
    }
    let sigma = representative(mu);
    let count = count_factorizations(n, &sigma, b, false);
    Ok(Rat::from_integer(count.into()) / Rat::from_integer(z_mu(mu).into()))
}

/// Independent cross-check for μ = 1^n: counts b-step transposition walks
/// returning to the identity by direct convolution in the group algebra of
/// S_n (n ≤ 4), normalized by n!.
pub fn convolution_identity_walks(n: usize, b: u32) -> Rat {
    assert!(n <= 4, "convolution cross-check is desk scale");
    // enumerate S_n
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        perms.push(idx.clone());
        // next permutation
        let mut i = n.wrapping_sub(1);
        while i > 0 && idx[i - 1] >= idx[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while idx[j] <= idx[i - 1] {
            j -= 1;
        }
        idx.swap(i - 1, j);
        idx[i..].reverse();
    }
    let index_of = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
    let mut vec = vec![0u64; perms.len()];
    vec[index_of(&(0..n).collect())] = 1;
    let mut taus: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(i, j);
            taus.push(t);
        }
    }
    for _ in 0..b {
        let mut next = vec![0u64; perms.len()];
        for (pi, c) in vec.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            for t in &taus {
                let q = compose(t, &perms[pi]);
                next[index_of(&q)] += c;
            }
        }
        vec = next;
    }
    let id_count = vec[index_of(&(0..n).collect())];
    Rat::from_integer(id_count.into()) / Rat::from_integer(factorial(n as u64).into())
}

// ---------------------------------------------------------------------------
// Recursion route: Lambert-curve extraction
// ---------------------------------------------------------------------------

/// The tree series T(w) solving w = T e^{−T}: coefficients m^{m−1}/m!.
/// Built by reverting the truncated series of z e^{−z}.
pub fn tree_series(order: i64) -> LSeries {
    assert!(order >= 1);
    // z e^{-z} = Σ (−1)^k z^{k+1}/k!
    let mut terms = Vec::new();
    let mut kfact = Rat::one();
    for k in 0..order {
        if k > 0 {
            kfact *= Rat::from_integer(k.into());
        }
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        terms.push((k + 1, sign / &kfact));
    }
    let w_of_z = LSeries::from_terms(Rat::zero(), &terms, 1, order);
    w_of_z.revert().expect("valuation-1 series reverts")
}

/// Hurwitz numbers from the Lambert-curve recursion.
pub struct HurwitzExtractor {
    engine: Engine,
    lambda_h: Option<Rat>,
    max_part: i64,
}

impl HurwitzExtractor {
    pub fn new(g_max: i64, l_max: i64, max_part: i64) -> Result<Self> {
        let engine = Engine::new(curve::lambert(), g_max.max(1), l_max.max(3))?;
        Ok(HurwitzExtractor {
            engine,
            lambda_h: None,
            max_part,
        })
    }

    /// λ_H anchored at H_{0;(1,1,1)} = 1 and then frozen.
    pub fn lambda_h(&mut self) -> Result<Rat> {
        if let Some(l) = &self.lambda_h {
            return Ok(l.clone());
        }
        let anchor = Partition::new(vec![1, 1, 1])?;
        let raw = self.extract_raw(0, &anchor)?;
        if raw.is_zero() {
            return Err(HurwitzError::Engine(TrError::Invariant(
                "vanishing H_{0;(1,1,1)} anchor".into(),
            )));
        }
        // raw · λ^{2−2g−ℓ} = 1 at (g,ℓ) = (0,3): λ^{−1} = 1/raw
        self.lambda_h = Some(raw.clone());
        Ok(raw)
    }

    /// Per-slot substitution series φ_k(w) = [T/(1−T)]·(T−1)^{−k} to the
    /// needed order; the coefficient of w^{μ_i} is the slot's contribution
    /// for pole order k.
    fn slot_series(&self, k_max: i64, order: i64) -> Result<Vec<LSeries>> {
        let t = tree_series(order + 2);
        let one = LSeries::monomial(Rat::zero(), Rat::one(), 0, 0, t.k_max());
        let one_minus_t = one.sub(&t)?;
        // dz/dx = z/(1−z) evaluated on z = T(w)
        let dzdx = t.div(&one_minus_t)?;
        // (z−1)^{-1} on z = T: −1/(1−T)
        let inv_tm1 = one.div(&one_minus_t)?.neg();
        let mut out = Vec::with_capacity(k_max as usize + 1);
        // index k: φ_k for pole order k (k ≥ 2); fill 0,1 with placeholders
        let mut pow = one.clone();
        for k in 0..=k_max {
            if k > 0 {
                pow = pow.mul(&inv_tm1)?;
            }
            out.push(dzdx.mul(&pow)?);
        }
        Ok(out)
    }

    /// Raw extraction before calibration: Σ_terms coeff·Π_i [w^{μ_i}]φ_{k_i},
    /// divided by Π μ_i.
    fn extract_raw(&mut self, g: i64, mu: &Partition) -> Result<Rat> {
        let l = mu.len() as i64;
        if !stable(g, l) {
            return Err(HurwitzError::Unstable(g, l));
        }
        let cor = self.engine.omega(g, l)?;
        let order = mu.parts()[0] as i64 + 1;
        let k_max = cor
            .terms
            .keys()
            .flat_map(|key| key.iter().map(|(_, k)| *k))
            .max()
            .unwrap_or(2);
        let slots = self.slot_series(k_max, order)?;
        let mut total = Rat::zero();
        for (key, coeff) in &cor.terms {
            // sum over distinct assignments of the channel multiset to slots
            for perm in crate::trcore::distinct_permutations(key) {
                let mut prod = coeff.clone();
                let mut zero = false;
                for (slot, (_bi, k)) in perm.iter().enumerate() {
                    let c = slots[*k as usize].coeff(mu.parts()[slot] as i64)?;
                    if c.is_zero() {
                        zero = true;
                        break;
                    }
                    prod *= c;
                }
                if !zero {
                    total += prod;
                }
            }
        }
        for p in mu.parts() {
            total /= Rat::from_integer((*p).into());
        }
        Ok(total)
    }

    /// H_{g;μ} from the recursion, calibrated.
    pub fn extract_hurwitz(&mut self, g: i64, mu: &Partition) -> Result<Rat> {
        let l = mu.len() as i64;
        if !stable(g, l) {
            return Err(HurwitzError::Unstable(g, l));
        }
        if mu.parts()[0] as i64 > self.max_part {
            return Err(HurwitzError::SizeLimit(mu.size(), self.max_part));
        }
        let lam = self.lambda_h()?;
        let raw = self.extract_raw(g, mu)?;
        Ok(&raw * &rat_pow(&lam, 2 - 2 * g - l))
    }
}

/// All partitions of every size 1..=max_size.
pub fn partitions_up_to(max_size: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::new(cur.clone()).unwrap());
            return;
        }
        for p in (1..=max_part.min(remaining)).rev() {
            cur.push(p as u32);
            rec(remaining - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for n in 1..=max_size {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::rat;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn partition_invariants() {
        let mu = p(&[1, 2, 1]);
        assert_eq!(mu.parts(), &[2, 1, 1]);
        assert_eq!(mu.size(), 4);
        assert_eq!(mu.len(), 3);
        assert_eq!(mu.aut(), 2);
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![0, 1]).is_err());
    }

    #[test]
    fn riemann_hurwitz_examples() {
        assert_eq!(riemann_hurwitz_b(0, &p(&[1, 1, 1])), 4);
        assert_eq!(riemann_hurwitz_b(1, &p(&[2])), 3);
        assert_eq!(riemann_hurwitz_b(0, &p(&[1])), 0);
    }

    #[test]
    fn tree_series_closed_form() {
        // m^{m−1}/m!: w + w² + (3/2)w³ + (8/3)w⁴ + (125/24)w⁵
        let t = tree_series(5);
        assert_eq!(t.coeff(1).unwrap(), rat(1, 1));
        assert_eq!(t.coeff(2).unwrap(), rat(1, 1));
        assert_eq!(t.coeff(3).unwrap(), rat(3, 2));
        assert_eq!(t.coeff(4).unwrap(), rat(8, 3));
        assert_eq!(t.coeff(5).unwrap(), rat(125, 24));
    }

    #[test]
    fn oracle_trivial_and_small_covers() {
        // degree-1 identity cover
        assert_eq!(hurwitz_oracle(0, &p(&[1])).unwrap(), rat(1, 1));
        // three 3-cycle factorizations: H = 3/(2!·3) = 1/2
        assert_eq!(hurwitz_oracle(0, &p(&[3])).unwrap(), rat(1, 2));
        // the S₂ tower: H_{1;(2)} = 1/12
        assert_eq!(hurwitz_oracle(1, &p(&[2])).unwrap(), rat(1, 12));
        // S₁ has no transpositions
        assert_eq!(hurwitz_oracle(1, &p(&[1])).unwrap(), Rat::zero());
        // the 4-tuple count over S₃: H_{0;(1,1,1)} = 1
        assert_eq!(hurwitz_oracle(0, &p(&[1, 1, 1])).unwrap(), rat(1, 1));
    }

    #[test]
    fn oracle_size_limits() {
        assert!(matches!(
            hurwitz_oracle(2, &p(&[4, 3])),
            Err(HurwitzError::SizeLimit(_, _))
        ));
    }

    #[test]
    fn disconnected_matches_convolution_for_trivial_profile() {
        // with σ = id the unfiltered factorization count is exactly the
        // number of b-step transposition walks returning to the identity,
        // which the group-algebra convolution computes independently
        for n in 1..=4usize {
            for b in 0..=4i64 {
                let mu = p(&vec![1; n]);
                let sigma = representative(&mu);
                let tuples = count_factorizations(n, &sigma, b, false);
                let walks = convolution_identity_walks(n, b as u32);
                assert_eq!(
                    Rat::from_integer(tuples.into()),
                    walks * Rat::from_integer(factorial(n as u64).into()),
                    "n={} b={}",
                    n,
                    b
                );
            }
        }
        // and the normalized disconnected count for 1^n at a valid genus
        let mu = p(&[1, 1]);
        // b = 2g−2+|μ|+ℓ = 2g+2: g=0 → b=2
        let d = disconnected_count(0, &mu).unwrap();
        assert_eq!(d, convolution_identity_walks(2, 2));
    }

    #[test]
    fn lambda_h_anchor() {
        let mut ex = HurwitzExtractor::new(1, 3, 4).unwrap();
        let lam = ex.lambda_h().unwrap();
        // the anchor then reproduces itself exactly
        let h = ex.extract_hurwitz(0, &p(&[1, 1, 1])).unwrap();
        assert_eq!(h, rat(1, 1));
        assert!(!lam.is_zero());
    }

    #[test]
    fn extraction_matches_oracle_spot() {
        // stable (g,ℓ) only: the recursion defines ω for 2g−2+ℓ > 0; the
        // unstable rows (0,ℓ≤2) stay oracle-only
        let mut ex = HurwitzExtractor::new(1, 3, 4).unwrap();
        for (g, mu) in [
            (0i64, p(&[1, 1, 1])),
            (0, p(&[2, 1, 1])),
            (1, p(&[1])),
            (1, p(&[2])),
            (1, p(&[1, 1])),
        ] {
            let h_rec = ex.extract_hurwitz(g, &mu).unwrap();
            let h_or = hurwitz_oracle(g, &mu).unwrap();
            assert_eq!(h_rec, h_or, "g={} mu={:?}", g, mu.parts());
        }
        // unstable extraction request is an error
        assert!(matches!(
            ex.extract_hurwitz(0, &p(&[2, 1])),
            Err(HurwitzError::Unstable(0, 2))
        ));
    }

    #[test]
    fn partitions_enumeration() {
        let all = partitions_up_to(4);
        assert_eq!(all.len(), 1 + 2 + 3 + 5);
    }
}
