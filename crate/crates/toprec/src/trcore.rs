//! The topological recursion engine.
//!
//! Correlators ω_n^(g) are stored as symmetric tensors over the pole basis
//! {dz/(z−a)^k : a branch point, k ≥ 2}: one coefficient per unordered
//! multiset of per-slot channels. The residue formula is evaluated branch
//! point by branch point with all local objects as exact Laurent series;
//! free energies come from the dilation equation. The module also houses
//! the structural checkers: loop equations (exact rational-function
//! arithmetic, no truncation), dilaton identity, homogeneity probe, pole
//! bounds and the symmetry / first-variable-independence assertion.

use num::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::curve::{BranchData, CurveError, SpectralCurve};
use crate::exactarith::{rat_from_str, rat_pow, rat_to_string, ArithError, LSeries, Poly, Rat, RatFunc};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrError {
    #[error("unstable (g,n) = ({0},{1}) requested; the recursion defines stable correlators only")]
    Unstable(i64, i64),
    #[error("truncation exhausted after {0} widenings: {1}")]
    TruncationExhausted(u32, String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("curve: {0}")]
    Curve(#[from] CurveError),
    #[error("arithmetic: {0}")]
    Arith(#[from] ArithError),
    #[error("evaluation at a branch point {0}")]
    EvalAtBranchPoint(String),
    #[error("hard branch point present at {0}; the direct triple-B formula needs all-soft curves")]
    HardPoint(String),
}

pub type Result<T> = std::result::Result<T, TrError>;

/// One slot's pole-basis channel: (branch point index, pole order k ≥ 2).
pub type Chan = (usize, i64);

/// A stable correlator as a symmetric tensor: one coefficient per sorted
/// multiset of channels (the common value of every ordered arrangement).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correlator {
    pub g: i64,
    pub n: i64,
    pub terms: BTreeMap<Vec<Chan>, Rat>,
}

impl Correlator {
    pub fn zero(g: i64, n: i64) -> Self {
        Correlator {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ coeff Π (z_i − a_i)^{−k_i} with the dz_i divided out.
    pub fn eval(&self, curve: &SpectralCurve, points: &[Rat]) -> Result<Rat> {
        assert_eq!(points.len() as i64, self.n);
        for p in points {
            if curve.branch_points.contains(p) {
                return Err(TrError::EvalAtBranchPoint(rat_to_string(p)));
            }
        }
        let mut total = Rat::zero();
        for (key, coeff) in &self.terms {
            for perm in distinct_permutations(key) {
                let mut prod = coeff.clone();
                for (slot, (bi, k)) in perm.iter().enumerate() {
                    let base = &points[slot] - &curve.branch_points[*bi];
                    prod *= rat_pow(&base, -k);
                }
                total += prod;
            }
        }
        Ok(total)
    }

    /// JSON per the external interface: terms in canonical order.
    pub fn to_json(&self, curve: &SpectralCurve) -> String {
        let mut out = String::from("{");
        let _ = write!(out, "\"g\":{},\"n\":{},\"terms\":[", self.g, self.n);
        let mut first = true;
        for (key, coeff) in &self.terms {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str("{\"poles\":[");
            for (i, (bi, k)) in key.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(
                    out,
                    "[\"{}\",\"{}\"]",
                    rat_to_string(&curve.branch_points[*bi]),
                    k
                );
            }
            let _ = write!(out, "],\"coeff\":\"{}\"}}", rat_to_string(coeff));
        }
        out.push_str("]}");
        out
    }
}

/// Free energies F^(g) for 2 ≤ g ≤ g_max with the calibration constant.
#[derive(Debug, Clone)]
pub struct FreeEnergyTable {
    pub curve_label: String,
    pub entries: BTreeMap<i64, Rat>,
    pub lambda: Rat,
}

impl FreeEnergyTable {
    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        let _ = write!(out, "\"curve\":{:?},\"F\":{{", self.curve_label);
        let mut first = true;
        for (g, v) in &self.entries {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "\"{}\":\"{}\"", g, rat_to_string(v));
        }
        let _ = write!(out, "}},\"lambda\":\"{}\"}}", rat_to_string(&self.lambda));
        out
    }
}

/// Distinct permutations of a sorted multiset (each ordered arrangement once).
pub fn distinct_permutations(key: &[Chan]) -> Vec<Vec<Chan>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(key.len());
    let mut pool: Vec<(Chan, usize)> = Vec::new();
    for c in key {
        match pool.iter_mut().find(|(v, _)| v == c) {
            Some((_, m)) => *m += 1,
            None => pool.push((*c, 1)),
        }
    }
    fn rec(
        pool: &mut Vec<(Chan, usize)>,
        current: &mut Vec<Chan>,
        len: usize,
        out: &mut Vec<Vec<Chan>>,
    ) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for i in 0..pool.len() {
            if pool[i].1 == 0 {
                continue;
            }
            pool[i].1 -= 1;
            current.push(pool[i].0);
            rec(pool, current, len, out);
            current.pop();
            pool[i].1 += 1;
        }
    }
    rec(&mut pool, &mut current, key.len(), &mut out);
    out
}

/// Number of ways to realize `part` as a label subset inside `whole`:
/// Π_v C(mult_whole(v), mult_part(v)).
fn split_multiplicity(whole: &[Chan], part: &[Chan]) -> u64 {
    let mut counts: BTreeMap<Chan, (u64, u64)> = BTreeMap::new();
    for c in whole {
        counts.entry(*c).or_insert((0, 0)).0 += 1;
    }
    for c in part {
        counts.entry(*c).or_insert((0, 0)).1 += 1;
    }
    let mut mult = 1u64;
    for (_, (w, p)) in counts {
        if p > w {
            return 0;
        }
        mult *= binomial(w, p);
    }
    mult
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn multiset_minus(key: &[Chan], remove: Chan) -> Vec<Chan> {
    let mut out = Vec::with_capacity(key.len().saturating_sub(1));
    let mut removed = false;
    for c in key {
        if !removed && *c == remove {
            removed = true;
        } else {
            out.push(*c);
        }
    }
    debug_assert!(removed);
    out
}

fn multiset_union(a: &[Chan], b: &[Chan]) -> Vec<Chan> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort();
    out
}

fn distinct_values(key: &[Chan]) -> Vec<Chan> {
    let mut out: Vec<Chan> = Vec::new();
    for c in key {
        if !out.contains(c) {
            out.push(*c);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Left/right factor identifiers in the residue integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Factor {
    /// Expansion of 1/(z−b)^k: the z (or z̄) slot carries channel (b, k).
    Pole(Chan),
    /// The recursion-variable slot of a Bergman kernel attached to an
    /// external variable: power p of u (or of z̄−a), generating the
    /// external channel (a, p+2) with weight p+1.
    BPow(i64),
}

struct BranchCtx {
    data: BranchData,
    /// K_m(u) coefficient series, index m (pole order m+1 in z₀).
    kernel: Vec<LSeries>,
    /// (z̄ − a)^m, cached alongside the kernel for extension.
    zb_pow_last: LSeries,
    /// Φ = ∫ y dx as a series at this branch point.
    phi: LSeries,
    /// z̄'(u).
    dzbar: LSeries,
    /// B(z, z̄)/du² = z̄'(u)/(z − z̄)².
    b_diag: LSeries,
    left_cache: HashMap<Factor, LSeries>,
    right_cache: HashMap<Factor, LSeries>,
    /// residues[(left,right)][m] = Res_u K_m · S_left · S_right.
    res_cache: HashMap<(Factor, Factor), Vec<Rat>>,
    res_diag: Vec<Rat>,
}

pub struct Engine {
    pub curve: SpectralCurve,
    order: i64,
    /// Negative control: flips the recursion-kernel sign when set.
    pub sabotage_kernel_sign: bool,
    memo: HashMap<(i64, i64), Correlator>,
    branch: Vec<BranchCtx>,
    widenings: u32,
}

pub fn stable(g: i64, n: i64) -> bool {
    g >= 0 && n >= 1 && 2 * g - 2 + n > 0
}

/// Per-slot pole-order bound at a branch point of hardness m.
pub fn pole_bound(m: i64, g: i64, n: i64) -> i64 {
    (2 * m * (2 * g - 2 + n) + 2 * g).max(0)
}

const GUARD: i64 = 6;
const MAX_WIDENINGS: u32 = 3;

impl Engine {
    /// Builds an engine sized for runs up to (g_max, n_max); series windows
    /// auto-widen on truncation errors, so larger requests still succeed.
    pub fn new(curve: SpectralCurve, g_max: i64, n_max: i64) -> Result<Self> {
        let order = 2 * (6 * g_max.max(1) + 2 * n_max.max(1)) + 8;
        let mut e = Engine {
            curve,
            order,
            sabotage_kernel_sign: false,
            memo: HashMap::new(),
            branch: Vec::new(),
            widenings: 0,
        };
        e.prepare_branches()?;
        Ok(e)
    }

    /// Overrides the truncation order (clears all caches).
    pub fn with_order(mut self, order: i64) -> Result<Self> {
        self.order = order;
        self.memo.clear();
        self.prepare_branches()?;
        Ok(self)
    }

    pub fn set_sabotage(&mut self, on: bool) -> Result<()> {
        self.sabotage_kernel_sign = on;
        self.memo.clear();
        self.prepare_branches()?;
        Ok(())
    }

    fn prepare_branches(&mut self) -> Result<()> {
        self.branch.clear();
        let points = self.curve.branch_points.clone();
        let w = self.order;
        for a in &points {
            let data = self.curve.branch_data(a, w)?;
            let dzbar = data.involution.differentiate();
            let y = self.curve.y.expand(a, -w, w)?;
            let ydx = y.mul(&data.xprime_series)?;
            let phi = ydx.integrate()?;
            let u = LSeries::monomial(a.clone(), Rat::one(), 1, 1, w);
            let zdiff = u.sub(&data.involution)?;
            let b_diag = dzbar.mul(&zdiff.pow(-2)?)?;
            let zb_pow_last = LSeries::monomial(a.clone(), Rat::one(), 0, 0, w);
            self.branch.push(BranchCtx {
                data,
                kernel: Vec::new(),
                zb_pow_last,
                phi,
                dzbar,
                b_diag,
                left_cache: HashMap::new(),
                right_cache: HashMap::new(),
                res_cache: HashMap::new(),
                res_diag: Vec::new(),
            });
        }
        // seed a handful of kernel orders; extended on demand
        let nb = self.branch.len();
        for bi in 0..nb {
            self.ensure_kernel(bi, 8)?;
        }
        Ok(())
    }

    /// Extends K_m computation so that orders m = 0..=m_top exist.
    fn ensure_kernel(&mut self, bi: usize, m_top: i64) -> Result<()> {
        let have = self.branch[bi].kernel.len() as i64;
        if have > m_top {
            return Ok(());
        }
        let a = self.curve.branch_points[bi].clone();
        let w = self.order;
        let den = {
            let b = &self.branch[bi];
            b.data.ydiff_series.mul(&b.data.xprime_series)?
        };
        let half = crate::exactarith::rat(-1, 2);
        let sign = if self.sabotage_kernel_sign { -half } else { half };
        for m in have..=m_top {
            if m > 0 {
                let zb = self.branch[bi].data.involution.clone();
                let next = self.branch[bi].zb_pow_last.mul(&zb)?;
                self.branch[bi].zb_pow_last = next;
            }
            let um = LSeries::monomial(a.clone(), Rat::one(), m, 0, w);
            let nm = um.sub(&self.branch[bi].zb_pow_last)?;
            let km = nm.div(&den)?.scale(&sign);
            self.branch[bi].kernel.push(km);
        }
        // freshly extended kernels invalidate cached residue vectors
        self.branch[bi].res_cache.clear();
        self.branch[bi].res_diag.clear();
        Ok(())
    }

    fn widen(&mut self) -> Result<()> {
        if self.widenings >= MAX_WIDENINGS {
            return Err(TrError::TruncationExhausted(
                self.widenings,
                "series windows exhausted".into(),
            ));
        }
        self.widenings += 1;
        self.order += self.order / 2;
        self.memo.clear();
        self.prepare_branches()
    }

    fn hardness(&self, bi: usize) -> i64 {
        self.branch[bi].data.hardness_m
    }

    // -- factor series ------------------------------------------------------

    fn left_series(&mut self, bi: usize, f: Factor) -> Result<LSeries> {
        if let Some(s) = self.branch[bi].left_cache.get(&f) {
            return Ok(s.clone());
        }
        let a = self.curve.branch_points[bi].clone();
        let w = self.order;
        let s = match f {
            Factor::Pole((bj, k)) => {
                if bj == bi {
                    LSeries::monomial(a.clone(), Rat::one(), -k, -k, w)
                } else {
                    let b = self.curve.branch_points[bj].clone();
                    let base = LSeries::from_terms(
                        a.clone(),
                        &[(0, &a - &b), (1, Rat::one())],
                        0,
                        w,
                    );
                    base.pow(-k)?
                }
            }
            Factor::BPow(p) => LSeries::monomial(a.clone(), Rat::one(), p, 0, w.max(p)),
        };
        self.branch[bi].left_cache.insert(f, s.clone());
        Ok(s)
    }

    fn right_series(&mut self, bi: usize, f: Factor) -> Result<LSeries> {
        if let Some(s) = self.branch[bi].right_cache.get(&f) {
            return Ok(s.clone());
        }
        let a = self.curve.branch_points[bi].clone();
        let w = self.order;
        let zb = self.branch[bi].data.involution.clone();
        let dzb = self.branch[bi].dzbar.clone();
        let s = match f {
            Factor::Pole((bj, k)) => {
                let shifted = if bj == bi {
                    zb
                } else {
                    let b = self.curve.branch_points[bj].clone();
                    zb.add(&LSeries::monomial(a.clone(), &a - &b, 0, 0, w))?
                };
                shifted.pow(-k)?.mul(&dzb)?
            }
            Factor::BPow(p) => zb.pow(p)?.mul(&dzb)?,
        };
        self.branch[bi].right_cache.insert(f, s.clone());
        Ok(s)
    }

    /// Residues Res_u K_m · S_L · S_R for all prepared kernel orders m.
    fn residues(&mut self, bi: usize, l: Factor, r: Factor) -> Result<Vec<Rat>> {
        let klen = self.branch[bi].kernel.len();
        if let Some(v) = self.branch[bi].res_cache.get(&(l, r)) {
            if v.len() == klen {
                return Ok(v.clone());
            }
        }
        let sl = self.left_series(bi, l)?;
        let sr = self.right_series(bi, r)?;
        let prod = sl.mul(&sr)?;
        let v = self.residues_against(bi, &prod)?;
        self.branch[bi].res_cache.insert((l, r), v.clone());
        Ok(v)
    }

    fn residues_against(&self, bi: usize, prod: &LSeries) -> Result<Vec<Rat>> {
        let mut out = Vec::with_capacity(self.branch[bi].kernel.len());
        for km in &self.branch[bi].kernel {
            if km.is_known_zero() {
                out.push(Rat::zero());
                continue;
            }
            let s = km.mul(prod)?;
            out.push(s.residue()?);
        }
        Ok(out)
    }

    fn residues_diag(&mut self, bi: usize) -> Result<Vec<Rat>> {
        let klen = self.branch[bi].kernel.len();
        if self.branch[bi].res_diag.len() == klen {
            return Ok(self.branch[bi].res_diag.clone());
        }
        let d = self.branch[bi].b_diag.clone();
        let v = self.residues_against(bi, &d)?;
        self.branch[bi].res_diag = v.clone();
        Ok(v)
    }

    // -- the recursion ------------------------------------------------------

    /// The correlator ω_n^(g). Stable (g,n) only; memoized.
    pub fn omega(&mut self, g: i64, n: i64) -> Result<Correlator> {
        if !stable(g, n) {
            return Err(TrError::Unstable(g, n));
        }
        if let Some(c) = self.memo.get(&(g, n)) {
            return Ok(c.clone());
        }
        loop {
            match self.compute_omega(g, n) {
                Ok(c) => {
                    self.memo.insert((g, n), c.clone());
                    return Ok(c);
                }
                Err(TrError::Arith(ArithError::ResidueWindow(_, _)))
                | Err(TrError::Arith(ArithError::UnknownCoefficient(_, _, _)))
                | Err(TrError::Arith(ArithError::EmptyWindow)) => {
                    self.widen()?;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn compute_omega(&mut self, g: i64, n: i64) -> Result<Correlator> {
        // lower correlators first (recursion over 2g−2+n)
        let mut lower: HashMap<(i64, i64), Correlator> = HashMap::new();
        if g >= 1 && stable(g - 1, n + 1) {
            lower.insert((g - 1, n + 1), self.omega(g - 1, n + 1)?);
        }
        for h in 0..=g {
            for m in 1..=n {
                if stable(h, m) && 2 * h - 2 + m < 2 * g - 2 + n {
                    lower.insert((h, m), self.omega(h, m)?);
                }
            }
        }

        let n_ext = (n - 1) as usize;
        let nb = self.curve.branch_points.len();
        // raw accumulator: (slot-0 channel, sorted externals) → coefficient
        let mut acc: BTreeMap<(Chan, Vec<Chan>), Rat> = BTreeMap::new();

        for bi in 0..nb {
            let slot_bound = pole_bound(self.hardness(bi), g, n);
            let m_top = slot_bound + GUARD - 1; // output orders m+1 ≤ bound+GUARD
            self.ensure_kernel(bi, m_top.max(1))?;
            let ext_top = slot_bound + GUARD; // generated external channels

            let add = |acc: &mut BTreeMap<(Chan, Vec<Chan>), Rat>,
                       res: &[Rat],
                       ext: &[Chan],
                       scale: &Rat| {
                for (m, r) in res.iter().enumerate() {
                    if r.is_zero() {
                        continue;
                    }
                    let k_out = m as i64 + 1;
                    let v = r * scale;
                    let entry = acc
                        .entry(((bi, k_out), ext.to_vec()))
                        .or_insert_with(Rat::zero);
                    *entry += v;
                }
            };

            // (g−1) term: ω_{n+1}^{(g−1)}(z, z̄, z_I)
            if g >= 1 {
                if stable(g - 1, n + 1) {
                    let cor = lower.get(&(g - 1, n + 1)).unwrap().clone();
                    for (key, coeff) in &cor.terms {
                        for cl in distinct_values(key) {
                            let rest1 = multiset_minus(key, cl);
                            for cr in distinct_values(&rest1) {
                                let ext = multiset_minus(&rest1, cr);
                                let res =
                                    self.residues(bi, Factor::Pole(cl), Factor::Pole(cr))?;
                                add(&mut acc, &res, &ext, coeff);
                            }
                        }
                    }
                } else if g == 1 && n == 1 {
                    // ω₂^(0)(z, z̄) = B(z, z̄)
                    let res = self.residues_diag(bi)?;
                    add(&mut acc, &res, &[], &Rat::one());
                }
            }

            // splitting terms ω_{1+|J|}^{(h)}(z, ·) ω_{n−|J|}^{(g−h)}(z̄, ·);
            // ω₁^(0) is excluded, ω₂^(0) = B enters through BPow factors.
            #[derive(Clone)]
            struct SideTerm {
                h: i64,
                ext: Vec<Chan>,
                coeff: Rat,
                factor: Factor,
            }
            let mut sides: Vec<SideTerm> = Vec::new();
            for ((h, m), cor) in &lower {
                if *m > n {
                    continue;
                }
                for (key, coeff) in &cor.terms {
                    for c in distinct_values(key) {
                        sides.push(SideTerm {
                            h: *h,
                            ext: multiset_minus(key, c),
                            coeff: coeff.clone(),
                            factor: Factor::Pole(c),
                        });
                    }
                }
            }
            if n >= 2 {
                for p in 0..=(ext_top - 2) {
                    sides.push(SideTerm {
                        h: 0,
                        ext: vec![(bi, p + 2)],
                        coeff: Rat::from_integer((p + 1).into()),
                        factor: Factor::BPow(p),
                    });
                }
            }

            for left in &sides {
                for right in &sides {
                    if left.h + right.h != g {
                        continue;
                    }
                    if left.ext.len() + right.ext.len() != n_ext {
                        continue;
                    }
                    let ext = multiset_union(&left.ext, &right.ext);
                    let mult = split_multiplicity(&ext, &left.ext);
                    if mult == 0 {
                        continue;
                    }
                    let res = self.residues(bi, left.factor, right.factor)?;
                    let scale =
                        &(&left.coeff * &right.coeff) * &Rat::from_integer(mult.into());
                    add(&mut acc, &res, &ext, &scale);
                }
            }

            // slot-0 assertions at this branch point: no residue channels,
            // and the guard orders beyond the pole bound vanish exactly
            for (((b2, k), _ext), v) in acc.iter() {
                if *b2 != bi || v.is_zero() {
                    continue;
                }
                if *k == 1 {
                    return Err(TrError::Invariant(format!(
                        "residue term dz/(z−a) with coefficient {} at branch index {}",
                        v, bi
                    )));
                }
                if *k > slot_bound {
                    return Err(TrError::Invariant(format!(
                        "pole bound violated at branch index {}: order {} > bound {} (coeff {})",
                        bi, k, slot_bound, v
                    )));
                }
            }
        }

        // assemble the symmetric tensor; every (slot-0 channel, externals)
        // decomposition of an orbit must carry the same coefficient, which
        // is also the first-variable-independence statement.
        let mut tensor: BTreeMap<Vec<Chan>, Rat> = BTreeMap::new();
        for (((bk, k), ext), v) in &acc {
            if v.is_zero() {
                continue;
            }
            let key = multiset_union(&[(*bk, *k)], ext);
            match tensor.get(&key) {
                None => {
                    tensor.insert(key, v.clone());
                }
                Some(prev) => {
                    if prev != v {
                        return Err(TrError::Invariant(format!(
                            "symmetry violated for orbit {:?}: {} vs {}",
                            key, prev, v
                        )));
                    }
                }
            }
        }
        for (key, v) in &tensor {
            for c in distinct_values(key) {
                let ext = multiset_minus(key, c);
                match acc.get(&(c, ext)) {
                    Some(w) if w == v => {}
                    other => {
                        return Err(TrError::Invariant(format!(
                            "first-variable independence violated for orbit {:?} at channel {:?}: {:?} vs {}",
                            key,
                            c,
                            other.map(rat_to_string),
                            v
                        )));
                    }
                }
            }
        }
        Ok(Correlator {
            g,
            n,
            terms: tensor,
        })
    }

    /// F^(g) for g ≥ 2 from the dilation equation specialized to n = 0:
    /// (2g−2) F^(g) = Σ_a Res_{z→a} Φ(z) ω₁^(g)(z) with Φ = ∫ y dx.
    /// This is the normalization consistent with the stable-(g,n) dilaton
    /// identity (see `check_dilaton`), which pins the prefactor sign.
    pub fn free_energy(&mut self, g: i64) -> Result<Rat> {
        assert!(g >= 2, "free_energy is defined for g >= 2");
        let w1 = self.omega(g, 1)?;
        let mut total = Rat::zero();
        for (key, coeff) in &w1.terms {
            let (bi, k) = key[0];
            // Res_{z→a} Φ(z) dz/(z−a)^k = [u^{k−1}] Φ
            let c = self.branch[bi].phi.coeff(k - 1)?;
            total += coeff * &c;
        }
        Ok(total / Rat::from_integer((2 * g - 2).into()))
    }

    /// Free-energy table for 2 ≤ g ≤ g_max.
    pub fn free_energy_table(&mut self, g_max: i64, lambda: Rat) -> Result<FreeEnergyTable> {
        let mut entries = BTreeMap::new();
        for g in 2..=g_max {
            entries.insert(g, self.free_energy(g)?);
        }
        Ok(FreeEnergyTable {
            curve_label: self.curve.label.clone(),
            entries,
            lambda,
        })
    }

    /// ω₃^(0) by the direct triple-Bergman residue formula
    /// Σ_a Res_{z→a} B(z₀,z)B(z₁,z)B(z₂,z)/(dx(z)dy(z)); valid when every
    /// branch point is soft. Must equal the recursion output.
    pub fn omega3_direct(&mut self) -> Result<Correlator> {
        for (bi, a) in self.curve.branch_points.clone().iter().enumerate() {
            if self.hardness(bi) == 0 {
                return Err(TrError::HardPoint(rat_to_string(a)));
            }
        }
        let w = self.order;
        let mut tensor: BTreeMap<Vec<Chan>, Rat> = BTreeMap::new();
        let yprime = self.curve.y.derivative();
        let top = pole_bound(1, 0, 3) + GUARD - 2;
        for (bi, a) in self.curve.branch_points.clone().iter().enumerate() {
            let xp = self.branch[bi].data.xprime_series.clone();
            let yp = yprime.expand(a, -w, w)?;
            let den = xp.mul(&yp)?;
            let inv_den = LSeries::monomial(a.clone(), Rat::one(), 0, 0, w).div(&den)?;
            for p in 0..=top {
                for q in p..=top {
                    for r in q..=top {
                        // residue of u^{p+q+r}/(x'y') = [u^{−1−p−q−r}] of 1/(x'y')
                        let c = inv_den.coeff(-1 - p - q - r)?;
                        if c.is_zero() {
                            continue;
                        }
                        let mult = Rat::from_integer(((p + 1) * (q + 1) * (r + 1)).into());
                        let key = vec![(bi, p + 2), (bi, q + 2), (bi, r + 2)];
                        let e = tensor.entry(key).or_insert_with(Rat::zero);
                        *e += &mult * &c;
                    }
                }
            }
        }
        tensor.retain(|_, v| !v.is_zero());
        Ok(Correlator {
            g: 0,
            n: 3,
            terms: tensor,
        })
    }

    /// The recursion kernel's expansion at a branch point: entry m is the
    /// u-series multiplying the pole channel 1/(z₀−a)^{m+1}.
    pub fn kernel_expansion(&mut self, a: &Rat, m_top: i64) -> Result<Vec<LSeries>> {
        let bi = self
            .curve
            .branch_points
            .iter()
            .position(|p| p == a)
            .ok_or_else(|| {
                TrError::Curve(CurveError::BadDeclaredBranchPoint(rat_to_string(a)))
            })?;
        self.ensure_kernel(bi, m_top)?;
        Ok(self.branch[bi].kernel[..=(m_top as usize)].to_vec())
    }

    /// Parses a correlator back from the JSON interchange format.
    pub fn correlator_from_json(&self, text: &str) -> Result<Correlator> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| TrError::Invariant(format!("bad correlator JSON: {e}")))?;
        let g = v["g"]
            .as_i64()
            .ok_or_else(|| TrError::Invariant("missing g".into()))?;
        let n = v["n"]
            .as_i64()
            .ok_or_else(|| TrError::Invariant("missing n".into()))?;
        let mut terms = BTreeMap::new();
        for t in v["terms"].as_array().into_iter().flatten() {
            let mut key = Vec::new();
            for p in t["poles"].as_array().into_iter().flatten() {
                let a = rat_from_str(p[0].as_str().unwrap_or_default()).map_err(TrError::Arith)?;
                let k: i64 = p[1]
                    .as_str()
                    .unwrap_or_default()
                    .parse()
                    .map_err(|_| TrError::Invariant("bad pole order".into()))?;
                let bi = self
                    .curve
                    .branch_points
                    .iter()
                    .position(|q| *q == a)
                    .ok_or_else(|| TrError::Invariant(format!("unknown branch point {a}")))?;
                key.push((bi, k));
            }
            key.sort();
            let coeff =
                rat_from_str(t["coeff"].as_str().unwrap_or_default()).map_err(TrError::Arith)?;
            terms.insert(key, coeff);
        }
        Ok(Correlator { g, n, terms })
    }
}

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

/// One checker finding; all-zero residuals = pass.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            detail: "ok".into(),
        }
    }
    pub fn fail(name: impl Into<String>, detail: String) -> Self {
        CheckReport {
            name: name.into(),
            passed: false,
            detail,
        }
    }
}

/// ω_n^(g)(z, spectators)/dz as an exact rational function of z, all but
/// the first slot evaluated at the given spectator points.
fn omega_ratfunc(curve: &SpectralCurve, cor: &Correlator, spectators: &[Rat]) -> Result<RatFunc> {
    assert_eq!(spectators.len() as i64, cor.n - 1);
    let mut total = RatFunc::zero();
    for (key, coeff) in &cor.terms {
        for c in distinct_values(key) {
            let rest = multiset_minus(key, c);
            let mut spec_sum = Rat::zero();
            for perm in distinct_permutations(&rest) {
                let mut prod = Rat::one();
                for (j, (bj, k)) in perm.iter().enumerate() {
                    let base = &spectators[j] - &curve.branch_points[*bj];
                    prod *= rat_pow(&base, -k);
                }
                spec_sum += prod;
            }
            if spec_sum.is_zero() {
                continue;
            }
            let (bi, k) = c;
            total = &total
                + &RatFunc::new(
                    Poly::constant(coeff * &spec_sum),
                    linear_power(&curve.branch_points[bi], k),
                )?;
        }
    }
    Ok(total)
}

fn linear_power(a: &Rat, k: i64) -> Poly {
    let lin = Poly::new(vec![-a.clone(), Rat::one()]);
    let mut den = Poly::one();
    for _ in 0..k {
        den = &den * &lin;
    }
    den
}

/// σ-pullback of a differential f(z)dz: f(σ(z))σ'(z).
fn pullback(f: &RatFunc, sigma: &RatFunc) -> Result<RatFunc> {
    Ok(&f.compose(sigma)? * &sigma.derivative())
}

fn poles_at_branch_points(curve: &SpectralCurve, f: &RatFunc) -> Vec<(Rat, i64)> {
    let mut out = Vec::new();
    for a in &curve.branch_points {
        let mut mult = 0i64;
        let mut d = f.den().clone();
        while d.eval(a).is_zero() {
            let lin = Poly::new(vec![-a.clone(), Rat::one()]);
            let (q, r) = d.div_rem(&lin).unwrap();
            debug_assert!(r.is_zero());
            d = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((a.clone(), mult));
        }
    }
    out
}

/// Deterministic spectator points, seed-shiftable, kept away from branch
/// points and their σ-images.
pub fn spectator_points(curve: &SpectralCurve, count: usize, seed: u64) -> Vec<Rat> {
    let mut out = Vec::new();
    let mut k = 0u64;
    while out.len() < count {
        k += 1;
        let p = Rat::new(
            (5 + 2 * (seed % 97) + 3 * k).into(),
            (2 + (k + seed) % 5).into(),
        );
        let bad = curve.branch_points.contains(&p)
            || out.contains(&p)
            || match &curve.global_involution {
                Some(s) => match s.eval(&p) {
                    Ok(img) => {
                        curve.branch_points.contains(&img) || out.contains(&img) || img == p
                    }
                    Err(_) => true,
                },
                None => false,
            };
        if !bad {
            out.push(p);
        }
    }
    out
}

impl Engine {
    /// Linear and quadratic loop equations at (g,n) for curves with a
    /// global involution. All arithmetic here is exact rational-function
    /// arithmetic; truncation never enters.
    pub fn check_loop_equations(&mut self, g: i64, n: i64, seed: u64) -> Result<Vec<CheckReport>> {
        let sigma = match self.curve.global_involution.clone() {
            Some(s) => s,
            None => {
                return Ok(vec![CheckReport::fail(
                    format!("loop-equations({},{})", g, n),
                    "curve has no global involution".into(),
                )])
            }
        };
        let mut reports = Vec::new();
        let spect = spectator_points(&self.curve, (n - 1).max(0) as usize, seed);
        let curve = self.curve.clone();

        if (g, n) == (0, 2) {
            // B(z,z₂) + σ*B(z,z₂) = dx(z)dx(z₂)/(x(z)−x(z₂))² exactly
            let report = match &curve.x {
                Some(x) => {
                    let z2 = spectator_points(&curve, 1, seed).remove(0);
                    let b = b_ratfunc(&z2)?;
                    let sb = pullback(&b, &sigma)?;
                    let xp2 = curve.xprime.eval(&z2)?;
                    let xv2 = x.eval(&z2)?;
                    let dx = &curve.xprime * &xp2;
                    let xdiff = x - &RatFunc::constant(xv2);
                    let rhs = &dx / &(&xdiff * &xdiff);
                    let resid = &(&b + &sb) - &rhs;
                    if resid.is_zero() {
                        CheckReport::pass("linear-loop(0,2)=bergman")
                    } else {
                        CheckReport::fail(
                            "linear-loop(0,2)=bergman",
                            format!("residual {}", resid),
                        )
                    }
                }
                None => CheckReport::fail(
                    "linear-loop(0,2)=bergman",
                    "x not rationally available".into(),
                ),
            };
            reports.push(report);
            return Ok(reports);
        }

        if !stable(g, n) {
            return Err(TrError::Unstable(g, n));
        }

        // linear: ω(z,·) + ω(σz,·) pole-free at branch points
        let cor = self.omega(g, n)?;
        let f = omega_ratfunc(&curve, &cor, &spect)?;
        let total = &f + &pullback(&f, &sigma)?;
        let poles = poles_at_branch_points(&curve, &total);
        if poles.is_empty() {
            reports.push(CheckReport::pass(format!("linear-loop({},{})", g, n)));
        } else {
            reports.push(CheckReport::fail(
                format!("linear-loop({},{})", g, n),
                format!(
                    "poles at {:?}",
                    poles
                        .iter()
                        .map(|(a, m)| (rat_to_string(a), *m))
                        .collect::<Vec<_>>()
                ),
            ));
        }

        // quadratic combination pole-free at branch points
        let q = self.quadratic_combination(g, n, &sigma, &spect)?;
        let poles = poles_at_branch_points(&curve, &q);
        if poles.is_empty() {
            reports.push(CheckReport::pass(format!("quadratic-loop({},{})", g, n)));
        } else {
            reports.push(CheckReport::fail(
                format!("quadratic-loop({},{})", g, n),
                format!(
                    "poles at {:?}",
                    poles
                        .iter()
                        .map(|(a, m)| (rat_to_string(a), *m))
                        .collect::<Vec<_>>()
                ),
            ));
        }
        Ok(reports)
    }

    /// The unrestricted quadratic loop-equation combination
    /// ω_{n+1}^{(g−1)}(z, σz, ·) + Σ_{J,h} ω(z, ẑ_J) ω(σz, ẑ_{I∖J})
    /// as an exact rational function of z (spectators fixed).
    fn quadratic_combination(
        &mut self,
        g: i64,
        n: i64,
        sigma: &RatFunc,
        spect: &[Rat],
    ) -> Result<RatFunc> {
        let curve = self.curve.clone();
        let n_ext = (n - 1) as usize;
        let mut total = RatFunc::zero();

        if g >= 1 {
            if stable(g - 1, n + 1) {
                let cor = self.omega(g - 1, n + 1)?;
                total = &total + &two_slot_ratfunc(&curve, &cor, sigma, spect)?;
            } else if g == 1 && n == 1 {
                // B(z, σz) = σ'(z)/(z − σz)²
                let num = sigma.derivative();
                let diff = &RatFunc::x() - sigma;
                total = &total + &(&num / &(&diff * &diff));
            }
        }

        for mask in 0u32..(1 << n_ext) {
            let j: Vec<usize> = (0..n_ext).filter(|i| mask & (1 << i) != 0).collect();
            let rest: Vec<usize> = (0..n_ext).filter(|i| mask & (1 << i) == 0).collect();
            for h in 0..=g {
                let left = self.one_side_ratfunc(h, &j, spect)?;
                let right = self.one_side_ratfunc(g - h, &rest, spect)?;
                if let (Some(l), Some(r)) = (left, right) {
                    let r = pullback(&r, sigma)?;
                    total = &total + &(&l * &r);
                }
            }
        }
        Ok(total)
    }

    /// ω_{1+|labels|}^{(h)}(z, spectators at labels) as a rational function
    /// of z, including the unstable cases ω₁^(0) = −y·x' and ω₂^(0) = B.
    fn one_side_ratfunc(
        &mut self,
        h: i64,
        labels: &[usize],
        spect: &[Rat],
    ) -> Result<Option<RatFunc>> {
        let m = labels.len() as i64 + 1;
        let curve = self.curve.clone();
        if h == 0 && m == 1 {
            return Ok(Some(-&(&curve.y * &curve.xprime)));
        }
        if h == 0 && m == 2 {
            return Ok(Some(b_ratfunc(&spect[labels[0]])?));
        }
        if !stable(h, m) {
            return Ok(None);
        }
        let cor = self.omega(h, m)?;
        let pts: Vec<Rat> = labels.iter().map(|i| spect[*i].clone()).collect();
        Ok(Some(omega_ratfunc(&curve, &cor, &pts)?))
    }

    /// Dilaton identity: (2g−2+n) ω_n^(g) = Σ_a Res Φ ω_{n+1}^(g),
    /// coefficientwise in the pole basis.
    pub fn check_dilaton(&mut self, g: i64, n: i64) -> Result<CheckReport> {
        let name = format!("dilaton({},{})", g, n);
        if !stable(g, n) {
            return Err(TrError::Unstable(g, n));
        }
        let lhs_cor = self.omega(g, n)?;
        let rhs_cor = self.omega(g, n + 1)?;
        let mut rhs: BTreeMap<Vec<Chan>, Rat> = BTreeMap::new();
        for (key, coeff) in &rhs_cor.terms {
            for c in distinct_values(key) {
                let (bi, k) = c;
                let phi_c = self.branch[bi].phi.coeff(k - 1)?;
                if phi_c.is_zero() {
                    continue;
                }
                let rest = multiset_minus(key, c);
                let e = rhs.entry(rest).or_insert_with(Rat::zero);
                *e += coeff * &phi_c;
            }
        }
        rhs.retain(|_, v| !v.is_zero());
        let chi = Rat::from_integer((2 * g - 2 + n).into());
        let mut lhs: BTreeMap<Vec<Chan>, Rat> = BTreeMap::new();
        for (k, v) in &lhs_cor.terms {
            lhs.insert(k.clone(), v * &chi);
        }
        if lhs == rhs {
            Ok(CheckReport::pass(name))
        } else {
            Ok(CheckReport::fail(
                name,
                format!("lhs {:?} != rhs {:?}", lhs, rhs),
            ))
        }
    }

    /// Homogeneity probe: recompute with y ↦ λy and compare
    /// ω ↦ λ^{2−2g−n} ω and F ↦ λ^{2−2g} F coefficientwise.
    pub fn homogeneity_probe(&mut self, lambda: &Rat, g: i64, n: i64) -> Result<CheckReport> {
        let name = format!("homogeneity(λ={},g={},n={})", rat_to_string(lambda), g, n);
        assert!(!lambda.is_zero());
        let scaled = SpectralCurve::new(
            format!("{}·λ", self.curve.label),
            self.curve.xprime.clone(),
            &self.curve.y * lambda,
            Some(self.curve.branch_points.clone()),
            self.curve.global_involution.clone(),
            self.curve.x.clone(),
        )?;
        let mut e2 = Engine::new(scaled, g.max(2), n + 1)?.with_order(self.order)?;
        e2.sabotage_kernel_sign = self.sabotage_kernel_sign;
        if stable(g, n) {
            let base = self.omega(g, n)?;
            let probe = e2.omega(g, n)?;
            let factor = rat_pow(lambda, 2 - 2 * g - n);
            let mut expect = BTreeMap::new();
            for (k, v) in &base.terms {
                expect.insert(k.clone(), v * &factor);
            }
            if expect != probe.terms {
                return Ok(CheckReport::fail(name, "ω scaling mismatch".into()));
            }
        }
        if g >= 2 {
            let f = self.free_energy(g)?;
            let fp = e2.free_energy(g)?;
            if fp != &f * &rat_pow(lambda, 2 - 2 * g) {
                return Ok(CheckReport::fail(name, "F scaling mismatch".into()));
            }
        }
        Ok(CheckReport::pass(name))
    }
}

/// B(z, w)/dz dw = 1/(z−w)² as a rational function of z for fixed w.
fn b_ratfunc(w: &Rat) -> Result<RatFunc> {
    Ok(RatFunc::new(Poly::one(), linear_power(w, 2))?)
}

/// ω_m^(g)(z, σz, spectators) as a rational function of z (the first two
/// slots both live).
fn two_slot_ratfunc(
    curve: &SpectralCurve,
    cor: &Correlator,
    sigma: &RatFunc,
    spect: &[Rat],
) -> Result<RatFunc> {
    let n_ext = cor.n as usize - 2;
    assert!(spect.len() >= n_ext);
    let dsigma = sigma.derivative();
    let mut total = RatFunc::zero();
    for (key, coeff) in &cor.terms {
        for cl in distinct_values(key) {
            let rest1 = multiset_minus(key, cl);
            for cr in distinct_values(&rest1) {
                let ext = multiset_minus(&rest1, cr);
                let mut spec_sum = Rat::zero();
                for perm in distinct_permutations(&ext) {
                    let mut prod = Rat::one();
                    for (j, (bj, k)) in perm.iter().enumerate() {
                        let base = &spect[j] - &curve.branch_points[*bj];
                        prod *= rat_pow(&base, -k);
                    }
                    spec_sum += prod;
                }
                if spec_sum.is_zero() {
                    continue;
                }
                let (bl, kl) = cl;
                let (br, kr) = cr;
                let left = RatFunc::new(
                    Poly::constant(coeff * &spec_sum),
                    linear_power(&curve.branch_points[bl], kl),
                )?;
                let right_base =
                    RatFunc::new(Poly::one(), linear_power(&curve.branch_points[br], kr))?;
                let right = &right_base.compose(sigma)? * &dsigma;
                total = &total + &(&left * &right);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve;
    use crate::exactarith::rat;

    fn airy_engine() -> Engine {
        Engine::new(curve::airy(), 3, 3).unwrap()
    }

    #[test]
    fn airy_omega03_is_half_over_squares() {
        let mut e = airy_engine();
        let c = e.omega(0, 3).unwrap();
        assert_eq!(c.terms.len(), 1);
        let key = vec![(0usize, 2i64), (0, 2), (0, 2)];
        assert_eq!(c.terms.get(&key).unwrap(), &rat(1, 2));
    }

    #[test]
    fn airy_omega11_is_one_sixteenth() {
        let mut e = airy_engine();
        let c = e.omega(1, 1).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert_eq!(c.terms.get(&vec![(0usize, 4i64)]).unwrap(), &rat(1, 16));
    }

    #[test]
    fn tracy_widom_genus_zero_correlators_vanish() {
        let mut e = Engine::new(curve::tracy_widom(), 2, 5).unwrap();
        for n in 3..=5 {
            let c = e.omega(0, n).unwrap();
            assert!(c.is_zero(), "ω_{}^(0) should be regular at a hard point", n);
        }
    }

    #[test]
    fn airy_free_energies_vanish() {
        let mut e = airy_engine();
        assert_eq!(e.free_energy(2).unwrap(), Rat::zero());
        assert_eq!(e.free_energy(3).unwrap(), Rat::zero());
    }

    #[test]
    fn tracy_widom_free_energies_match_closed_values() {
        let mut e = Engine::new(curve::tracy_widom(), 3, 1).unwrap();
        assert_eq!(e.free_energy(2).unwrap(), rat(3, 512));
        assert_eq!(e.free_energy(3).unwrap(), rat(63, 16384));
    }

    #[test]
    fn rauch_formula_matches_recursion() {
        for c in [
            curve::airy(),
            curve::joukowski(&rat(0, 1), &rat(1, 1), &[rat(1, 1)]).unwrap(),
        ] {
            let mut e = Engine::new(c, 1, 3).unwrap();
            let direct = e.omega3_direct().unwrap();
            let rec = e.omega(0, 3).unwrap();
            assert_eq!(direct.terms, rec.terms);
        }
    }

    #[test]
    fn rauch_rejects_hard_points() {
        let mut e = Engine::new(curve::tracy_widom(), 1, 3).unwrap();
        assert!(matches!(e.omega3_direct(), Err(TrError::HardPoint(_))));
    }

    #[test]
    fn joukowski_omega03_closed_form() {
        // ω₃^(0) = (1/4)Π dz_i/(z_i−1)² − (1/4)Π dz_i/(z_i+1)²
        let c = curve::joukowski(&rat(0, 1), &rat(1, 1), &[rat(1, 1)]).unwrap();
        let mut e = Engine::new(c, 1, 3).unwrap();
        let cor = e.omega(0, 3).unwrap();
        assert_eq!(cor.terms.len(), 2);
        // branch points sorted: index 0 is −1, index 1 is +1
        assert_eq!(
            cor.terms.get(&vec![(1usize, 2i64), (1, 2), (1, 2)]).unwrap(),
            &rat(1, 4)
        );
        assert_eq!(
            cor.terms.get(&vec![(0usize, 2i64), (0, 2), (0, 2)]).unwrap(),
            &rat(-1, 4)
        );
    }

    #[test]
    fn eval_correlator_examples() {
        let mut e = airy_engine();
        let w11 = e.omega(1, 1).unwrap();
        assert_eq!(w11.eval(&e.curve, &[rat(1, 1)]).unwrap(), rat(1, 16));
        let w03 = e.omega(0, 3).unwrap();
        assert_eq!(
            w03.eval(&e.curve, &[rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap(),
            rat(1, 72)
        );
        assert!(matches!(
            w11.eval(&e.curve, &[rat(0, 1)]),
            Err(TrError::EvalAtBranchPoint(_))
        ));
        let z = Correlator::zero(0, 3);
        assert_eq!(
            z.eval(&e.curve, &[rat(5, 1), rat(6, 1), rat(7, 1)]).unwrap(),
            Rat::zero()
        );
    }

    #[test]
    fn unstable_rejected() {
        let mut e = airy_engine();
        assert!(matches!(e.omega(0, 2), Err(TrError::Unstable(0, 2))));
        assert!(matches!(e.omega(0, 1), Err(TrError::Unstable(0, 1))));
    }

    #[test]
    fn kernel_expansion_airy_closed_form() {
        // K(z₀,z) = −dz₀/(4z(z₀²−z²)dz): the 1/(z₀)^{m+1} channel carries
        // −u^{m−2}/4 for odd m, 0 for even m
        let mut e = airy_engine();
        let ks = e.kernel_expansion(&Rat::zero(), 8).unwrap();
        for (m, km) in ks.iter().enumerate() {
            for j in km.k_min()..=km.k_max().min(6) {
                let expect = if m % 2 == 1 && j == m as i64 - 2 {
                    rat(-1, 4)
                } else {
                    rat(0, 1)
                };
                assert_eq!(km.coeff(j).unwrap(), expect, "m={} exponent {}", m, j);
            }
        }
    }

    #[test]
    fn kernel_vanishes_linearly_at_hard_point() {
        // TW: K₁(u) = −u/(4(u²−1)) = (u/4)(1 + u² + …)
        let mut e = Engine::new(curve::tracy_widom(), 2, 1).unwrap();
        let ks = e.kernel_expansion(&Rat::zero(), 2).unwrap();
        assert_eq!(ks[1].valuation(), Some(1));
        assert_eq!(ks[1].coeff(1).unwrap(), rat(1, 4));
    }

    #[test]
    fn kernel_odd_in_z_for_symmetric_curves() {
        // z̄ = −z curves: K(z₀,z) odd in z, i.e. even-m channels vanish and
        // odd-m channels have parity (−1)^m... the full statement reads off
        // as N_m ≡ 0 for even m.
        let mut e = airy_engine();
        let ks = e.kernel_expansion(&Rat::zero(), 9).unwrap();
        for (m, km) in ks.iter().enumerate() {
            if m % 2 == 0 {
                assert!(km.is_known_zero(), "even channel m={} must vanish", m);
            }
        }
    }

    #[test]
    fn dilaton_identity_airy() {
        let mut e = airy_engine();
        assert!(e.check_dilaton(1, 1).unwrap().passed);
        assert!(e.check_dilaton(0, 3).unwrap().passed);
    }

    #[test]
    fn loop_equations_pass_on_presets() {
        for c in [
            curve::airy(),
            curve::tracy_widom(),
            curve::joukowski(&rat(0, 1), &rat(1, 1), &[rat(1, 1)]).unwrap(),
        ] {
            let label = c.label.clone();
            let mut e = Engine::new(c, 2, 3).unwrap();
            for (g, n) in [(0i64, 3i64), (1, 1), (1, 2), (2, 1)] {
                for r in e.check_loop_equations(g, n, 1).unwrap() {
                    assert!(r.passed, "{} {}: {}", label, r.name, r.detail);
                }
            }
        }
    }

    #[test]
    fn bergman_identity_linear_02() {
        for c in [
            curve::airy(),
            curve::tracy_widom(),
            curve::joukowski(&rat(1, 2), &rat(2, 1), &[rat(1, 1), rat(1, 3)]).unwrap(),
        ] {
            let mut e = Engine::new(c, 1, 2).unwrap();
            let r = e.check_loop_equations(0, 2, 7).unwrap();
            assert!(r[0].passed, "{}: {}", r[0].name, r[0].detail);
        }
    }

    #[test]
    fn sabotaged_kernel_fails_loop_equations() {
        let mut e = Engine::new(curve::airy(), 1, 1).unwrap();
        e.set_sabotage(true).unwrap();
        let reports = e.check_loop_equations(1, 1, 1).unwrap();
        assert!(
            reports.iter().any(|r| !r.passed),
            "sabotage must break a loop equation"
        );
    }

    #[test]
    fn homogeneity_probe_airy() {
        let mut e = airy_engine();
        for lam in [rat(2, 1), rat(-1, 1), rat(1, 3)] {
            let r = e.homogeneity_probe(&lam, 1, 1).unwrap();
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        let r = e.homogeneity_probe(&rat(1, 1), 0, 3).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn correlator_json_round_trip() {
        let mut e = airy_engine();
        let c = e.omega(1, 1).unwrap();
        let json = c.to_json(&e.curve);
        assert_eq!(
            json,
            "{\"g\":1,\"n\":1,\"terms\":[{\"poles\":[[\"0\",\"4\"]],\"coeff\":\"1/16\"}]}"
        );
        let back = e.correlator_from_json(&json).unwrap();
        assert_eq!(back.terms, c.terms);
    }
}
