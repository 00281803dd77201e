//! Truncated multivariate power series in the times and Laurent tails in z⁻¹.
//!
//! Series are graded by weight(t_k) = k. Each series carries its own weight
//! bound: binary operations keep the smaller one and ∂/∂t₁ lowers it by one,
//! so a coefficient is only ever stored when it is known exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mpoly::{add_exps, fmt_monomial, fmt_terms, monomials_up_to, weight, Exps, MPoly};
use crate::scalar::{binomial, factorial, Field};

/// Truncation orders: weight bound D on t-monomials, number M of times, and
/// the lowest retained z power −K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncOrders {
    pub t_weight_bound: u32,
    pub t_var_count: usize,
    pub z_neg_bound: u32,
}

impl TruncOrders {
    pub fn new(t_weight_bound: u32, t_var_count: usize, z_neg_bound: u32) -> Result<Self> {
        if t_var_count == 0 {
            return Err(Error::Invalid("at least one time variable is required".into()));
        }
        Ok(TruncOrders { t_weight_bound, t_var_count, z_neg_bound })
    }

    /// Default desk scale: D = 8, M = 4, K = 6.
    pub fn desk() -> Self {
        TruncOrders { t_weight_bound: 8, t_var_count: 4, z_neg_bound: 6 }
    }

    pub fn low(&self) -> i32 {
        -(self.z_neg_bound as i32)
    }
}

/// Series in `nvars` times, exact for all monomials of weight ≤ `bound`.
/// A negative bound means nothing is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries<F: Field> {
    nvars: usize,
    bound: i32,
    terms: BTreeMap<Exps, F>,
}

impl<F: Field> TruncatedSeries<F> {
    pub fn zero(nvars: usize, bound: i32) -> Self {
        TruncatedSeries { nvars, bound, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, bound: i32, c: F) -> Self {
        let mut s = Self::zero(nvars, bound);
        if bound >= 0 {
            s.add_term(vec![0; nvars], c);
        }
        s
    }

    pub fn one(nvars: usize, bound: i32) -> Self {
        Self::constant(nvars, bound, F::one())
    }

    pub fn from_mpoly(p: &MPoly<F>, bound: i32) -> Self {
        let mut s = Self::zero(p.nvars(), bound);
        for (e, c) in p.terms() {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    pub fn from_terms(nvars: usize, bound: i32, terms: impl IntoIterator<Item = (Exps, F)>) -> Self {
        let mut s = Self::zero(nvars, bound);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            s.add_term(e, c);
        }
        s
    }

    /// exp(Σ_k b_k t_k), coefficientwise Π b_k^{e_k}/e_k!.
    pub fn exp_linear(b: &[F], bound: i32) -> Self {
        let nvars = b.len();
        let mut s = Self::zero(nvars, bound);
        for e in monomials_up_to(nvars, bound) {
            let mut c = F::one();
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    c = c * b[k].pow(x) * factorial::<F>(x).try_inv().expect("factorial");
                }
            }
            s.add_term(e, c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> i32 {
        self.bound
    }

    pub fn terms(&self) -> &BTreeMap<Exps, F> {
        &self.terms
    }

    pub fn add_term(&mut self, e: Exps, c: F) {
        if c.is_zero() || weight(&e) as i32 > self.bound {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> F {
        self.terms.get(e).cloned().unwrap_or_else(F::zero)
    }

    pub fn constant_term(&self) -> F {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn truncate(&self, bound: i32) -> Self {
        let bound = bound.min(self.bound);
        TruncatedSeries {
            nvars: self.nvars,
            bound,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| weight(e) as i32 <= bound)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into `nvars` variables; monomials in dropped variables vanish.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        let mut s = Self::zero(nvars, self.bound);
        for (e, c) in &self.terms {
            if e.iter().skip(nvars).any(|&x| x > 0) {
                continue;
            }
            let mut e2 = e.clone();
            e2.resize(nvars, 0);
            s.add_term(e2, c.clone());
        }
        s
    }

    /// Truncates to the given orders (weight bound and variable count).
    pub fn restrict(&self, orders: &TruncOrders) -> Self {
        self.with_nvars(orders.t_var_count).truncate(orders.t_weight_bound as i32)
    }

    /// Restriction t₂ = t₃ = … = 0 (variable count unchanged).
    pub fn restrict_t1(&self) -> Self {
        let mut s = Self::zero(self.nvars, self.bound);
        for (e, c) in &self.terms {
            if e.iter().skip(1).all(|&x| x == 0) {
                s.add_term(e.clone(), c.clone());
            }
        }
        s
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut s = Self::zero(self.nvars, self.bound);
        if c.is_zero() {
            return s;
        }
        for (e, x) in &self.terms {
            s.terms.insert(e.clone(), x.clone() * c.clone());
        }
        s
    }

    /// ∂/∂t₁; the result is known to one weight less.
    pub fn derivative_t1(&self) -> Self {
        let mut s = Self::zero(self.nvars, self.bound - 1);
        for (e, c) in &self.terms {
            if e[0] > 0 {
                let mut e2 = e.clone();
                e2[0] -= 1;
                s.add_term(e2, c.clone() * F::from_i64(e[0] as i64));
            }
        }
        s
    }

    /// Product requiring identical orders.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.nvars != rhs.nvars || self.bound != rhs.bound {
            return Err(Error::OrderMismatch(format!(
                "(M={}, D={}) vs (M={}, D={})",
                self.nvars, self.bound, rhs.nvars, rhs.bound
            )));
        }
        Ok(self.clone() * rhs.clone())
    }

    /// Σ aⁿ/n!, for a with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonZeroConstant);
        }
        let mut sum = Self::one(self.nvars, self.bound);
        let mut term = Self::one(self.nvars, self.bound);
        for n in 1..=self.bound.max(0) {
            term = (term * self.clone()).scale(&F::from_ratio(1, n as i64));
            if term.is_zero() {
                break;
            }
            sum = sum + term.clone();
        }
        Ok(sum)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn invert(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NonUnitSeries);
        }
        let cinv = c.try_inv()?;
        // a = c(1 + b), a⁻¹ = c⁻¹ Σ (−b)ⁿ
        let mut nb = self.scale(&cinv);
        nb.terms.remove(&vec![0; self.nvars]);
        let nb = -nb;
        let mut sum = Self::one(self.nvars, self.bound);
        let mut term = Self::one(self.nvars, self.bound);
        for _ in 1..=self.bound.max(0) {
            term = term * nb.clone();
            if term.is_zero() {
                break;
            }
            sum = sum + term.clone();
        }
        Ok(sum.scale(&cinv))
    }

    pub fn pow_i(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(Self::one(self.nvars, self.bound), |acc, _| acc * base.clone()))
    }

    /// First monomial (in lexicographic order) where the two series differ on
    /// their common range.
    pub fn first_difference(&self, other: &Self) -> Option<(Exps, F, F)> {
        let b = self.bound.min(other.bound);
        let keys: std::collections::BTreeSet<&Exps> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for e in keys {
            if weight(e) as i32 > b {
                continue;
            }
            let (x, y) = (self.coeff(e), other.coeff(e));
            if x != y {
                return Some((e.clone(), x, y));
            }
        }
        None
    }

    /// Equality on the common known range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// First nonzero coefficient in lexicographic monomial order.
    pub fn leading_coeff(&self) -> Option<(Exps, F)> {
        self.terms.iter().next().map(|(e, c)| (e.clone(), c.clone()))
    }
}

impl<F: Field> Add for TruncatedSeries<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let bound = self.bound.min(rhs.bound);
        let mut s = self.truncate(bound);
        for (e, c) in rhs.terms {
            s.add_term(e, c);
        }
        s
    }
}

impl<F: Field> Sub for TruncatedSeries<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for TruncatedSeries<F> {
    type Output = Self;
    fn neg(self) -> Self {
        TruncatedSeries {
            nvars: self.nvars,
            bound: self.bound,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl<F: Field> Mul for TruncatedSeries<F> {
    type Output = Self;
    /// Truncates to the smaller of the two bounds.
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let bound = self.bound.min(rhs.bound);
        let mut s = Self::zero(self.nvars, bound);
        let rb: Vec<(u32, &Exps, &F)> = rhs.terms.iter().map(|(e, c)| (weight(e), e, c)).collect();
        for (ea, ca) in &self.terms {
            let wa = weight(ea) as i32;
            if wa > bound {
                continue;
            }
            for (wb, eb, cb) in &rb {
                if wa + *wb as i32 > bound {
                    continue;
                }
                s.add_term(add_exps(ea, eb), ca.clone() * (*cb).clone());
            }
        }
        s
    }
}

impl<F: Field> fmt::Display for TruncatedSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(w>{})", fmt_terms(self.terms.iter()), self.bound)
    }
}

// ---------------------------------------------------------------------------
// Laurent tails
// ---------------------------------------------------------------------------

/// Σ_j c_j(t) z^j with series coefficients, exact for z-powers ≥ `low`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTail<F: Field> {
    nvars: usize,
    low: i32,
    coeffs: BTreeMap<i32, TruncatedSeries<F>>,
}

impl<F: Field> LaurentTail<F> {
    pub fn zero(nvars: usize, low: i32) -> Self {
        LaurentTail { nvars, low, coeffs: BTreeMap::new() }
    }

    pub fn from_series(s: TruncatedSeries<F>, power: i32, low: i32) -> Self {
        let mut t = Self::zero(s.nvars(), low);
        t.set(power, s);
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, TruncatedSeries<F>> {
        &self.coeffs
    }

    pub fn top(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn set(&mut self, power: i32, s: TruncatedSeries<F>) {
        if power < self.low || s.is_zero() {
            self.coeffs.remove(&power);
        } else {
            self.coeffs.insert(power, s);
        }
    }

    pub fn coeff(&self, power: i32, bound: i32) -> TruncatedSeries<F> {
        self.coeffs
            .get(&power)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(self.nvars, bound))
    }

    fn accumulate(&mut self, power: i32, s: TruncatedSeries<F>) {
        if power < self.low {
            return;
        }
        let new = match self.coeffs.remove(&power) {
            Some(old) => old + s,
            None => s,
        };
        self.set(power, new);
    }

    pub fn truncate(&self, low: i32, bound: i32) -> Self {
        let low = low.max(self.low);
        let mut t = Self::zero(self.nvars, low);
        for (&p, s) in &self.coeffs {
            t.set(p, s.truncate(bound));
        }
        t
    }

    pub fn restrict(&self, orders: &TruncOrders) -> Self {
        let low = orders.low().max(self.low);
        let mut t = Self::zero(orders.t_var_count, low);
        for (&p, s) in &self.coeffs {
            t.set(p, s.restrict(orders));
        }
        t
    }

    pub fn restrict_t1(&self) -> Self {
        let mut t = Self::zero(self.nvars, self.low);
        for (&p, s) in &self.coeffs {
            t.set(p, s.restrict_t1());
        }
        t
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut t = Self::zero(self.nvars, self.low);
        for (&p, s) in &self.coeffs {
            t.set(p, s.scale(c));
        }
        t
    }

    pub fn mul_series(&self, s: &TruncatedSeries<F>) -> Self {
        let mut t = Self::zero(self.nvars, self.low);
        for (&p, c) in &self.coeffs {
            t.set(p, c.clone() * s.clone());
        }
        t
    }

    /// Multiplication by z^j.
    pub fn shift(&self, j: i32) -> Self {
        LaurentTail {
            nvars: self.nvars,
            low: self.low + j,
            coeffs: self.coeffs.iter().map(|(&p, s)| (p + j, s.clone())).collect(),
        }
    }

    pub fn derivative_t1(&self) -> Self {
        let mut t = Self::zero(self.nvars, self.low);
        for (&p, s) in &self.coeffs {
            t.set(p, s.derivative_t1());
        }
        t
    }

    /// (z + ∂_{t₁}) applied to the tail: the action of ∂_x on e^{xz}·tail.
    pub fn z_plus_d(&self) -> Self {
        self.shift(1).truncate(self.low, i32::MAX) + self.derivative_t1()
    }

    /// Multiplication by a polynomial in z (coefficients ascending); raises the low bound.
    pub fn mul_zpoly(&self, p: &crate::poly::Poly<F>) -> Self {
        let deg = p.deg() as i32;
        let mut t = Self::zero(self.nvars, self.low + deg);
        for (i, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (&q, s) in &self.coeffs {
                t.accumulate(q + i as i32, s.scale(c));
            }
        }
        t
    }

    /// Division by a polynomial g(z) of degree n, expanding 1/g in z⁻¹.
    /// The low bound drops by n.
    pub fn div_zpoly(&self, g: &crate::poly::Poly<F>) -> Result<Self> {
        let n = g.deg() as i32;
        let lead = g.lead().try_inv()?;
        let low = self.low - n;
        // 1/g = z^{-n} Σ_i r_i z^{-i}
        let span = (self.top().unwrap_or(self.low) - self.low).max(0) + n + 1;
        let inv = zpoly_inverse_coeffs(g, span as usize)?;
        let mut t = Self::zero(self.nvars, low);
        for (&q, s) in &self.coeffs {
            for (i, r) in inv.iter().enumerate() {
                let p = q - n - i as i32;
                if p < low {
                    break;
                }
                if !r.is_zero() {
                    t.accumulate(p, s.scale(&(r.clone() * lead.clone())));
                }
            }
        }
        Ok(t)
    }

    /// First differing (z-power, monomial) on the common known range.
    pub fn first_difference(&self, other: &Self) -> Option<(i32, Exps, F, F)> {
        let low = self.low.max(other.low);
        let powers: std::collections::BTreeSet<i32> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        for p in powers.into_iter().rev() {
            if p < low {
                continue;
            }
            let a = self.coeffs.get(&p);
            let b = other.coeffs.get(&p);
            let bound = a.map_or(i32::MAX, |s| s.bound()).min(b.map_or(i32::MAX, |s| s.bound()));
            let a = a.cloned().unwrap_or_else(|| TruncatedSeries::zero(self.nvars, bound));
            let b = b.cloned().unwrap_or_else(|| TruncatedSeries::zero(self.nvars, bound));
            if let Some((e, x, y)) = a.first_difference(&b) {
                return Some((p, e, x, y));
            }
        }
        None
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// Smallest weight bound over stored coefficients.
    pub fn min_bound(&self) -> i32 {
        self.coeffs.values().map(|s| s.bound()).min().unwrap_or(i32::MAX)
    }
}

/// Coefficients r_0, r_1, … with 1/(g/lead) = z^{-n} Σ r_i z^{-i}.
pub(crate) fn zpoly_inverse_coeffs<F: Field>(g: &crate::poly::Poly<F>, count: usize) -> Result<Vec<F>> {
    let n = g.deg();
    let lead_inv = g.lead().try_inv()?;
    // monic h(w) = 1 + Σ_{k≥1} (g_{n-k}/lead) w^k with w = z⁻¹
    let h: Vec<F> = (0..=n).map(|k| g.coeff(n - k) * lead_inv.clone()).collect();
    let mut r: Vec<F> = Vec::with_capacity(count);
    for i in 0..count {
        let mut acc = if i == 0 { F::one() } else { F::zero() };
        for k in 1..=i.min(n) {
            acc = acc - h[k].clone() * r[i - k].clone();
        }
        r.push(acc);
    }
    Ok(r)
}

impl<F: Field> Add for LaurentTail<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let low = self.low.max(rhs.low);
        let mut t = self.truncate(low, i32::MAX);
        for (p, s) in rhs.coeffs {
            t.accumulate(p, s);
        }
        t
    }
}

impl<F: Field> Sub for LaurentTail<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for LaurentTail<F> {
    type Output = Self;
    fn neg(self) -> Self {
        LaurentTail {
            nvars: self.nvars,
            low: self.low,
            coeffs: self.coeffs.into_iter().map(|(p, s)| (p, -s)).collect(),
        }
    }
}

impl<F: Field> Mul for LaurentTail<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let top_a = self.top().unwrap_or(self.low);
        let top_b = rhs.top().unwrap_or(rhs.low);
        let low = (self.low + top_b).max(rhs.low + top_a);
        let mut t = Self::zero(self.nvars, low);
        for (&p, a) in &self.coeffs {
            for (&q, b) in &rhs.coeffs {
                if p + q >= low {
                    t.accumulate(p + q, a.clone() * b.clone());
                }
            }
        }
        t
    }
}

impl<F: Field> fmt::Display for LaurentTail<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, s) in self.coeffs.iter().rev() {
            writeln!(f, "z^{p}: {s}")?;
        }
        write!(f, "+ O(z^{})", self.low - 1)
    }
}

/// Ψ(t, z) = e^{Σ t_k z^k} · tail(t, z). With a nonzero base point the series
/// variable t₁ is measured from that point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveFunction<F: Field> {
    pub tail: LaurentTail<F>,
    pub base_point: F,
}

impl<F: Field> WaveFunction<F> {
    pub fn new(tail: LaurentTail<F>, base_point: F) -> Self {
        WaveFunction { tail, base_point }
    }

    /// e^{Σ t_k z^k} · 1
    pub fn free(nvars: usize, orders: &TruncOrders) -> Self {
        let one = TruncatedSeries::one(nvars, orders.t_weight_bound as i32);
        WaveFunction::new(LaurentTail::from_series(one, 0, orders.low()), F::zero())
    }

    pub fn restrict(&self, orders: &TruncOrders) -> Self {
        WaveFunction::new(self.tail.restrict(orders), self.base_point.clone())
    }
}

/// τ(t − [z⁻¹]) with [z⁻¹] = (z⁻¹, z⁻²/2, z⁻³/3, …), truncated at z^{−K}.
///
/// The z^{−j} coefficient is known to weight bound(τ) − j; shifts of times
/// beyond the series' variable count are not available, so callers wanting
/// exactness to z^{−K} supply τ in at least K variables.
pub fn miwa_shift<F: Field>(tau: &TruncatedSeries<F>, orders: &TruncOrders) -> LaurentTail<F> {
    let nvars = tau.nvars();
    let mut out = LaurentTail::zero(nvars, orders.low());
    let mut acc: BTreeMap<i32, TruncatedSeries<F>> = BTreeMap::new();
    for j in 0..=orders.z_neg_bound as i32 {
        acc.insert(-j, TruncatedSeries::zero(nvars, tau.bound() - j));
    }
    for (e, c) in tau.terms() {
        // Π_k (t_k − z^{-k}/k)^{e_k}
        let mut partial: Vec<(Exps, i32, F)> = vec![(vec![0; nvars], 0, c.clone())];
        for (k, &ek) in e.iter().enumerate() {
            if ek == 0 {
                continue;
            }
            let kk = k as i32 + 1;
            let mut next = Vec::new();
            for (pe, pz, pc) in &partial {
                for l in 0..=ek {
                    let z = pz - kk * l as i32;
                    if z < orders.low() {
                        break;
                    }
                    let mut ne = pe.clone();
                    ne[k] += ek - l;
                    let coef = pc.clone()
                        * binomial::<F>(ek as i64, l)
                        * F::from_ratio(-1, kk as i64).pow(l);
                    next.push((ne, z, coef));
                }
            }
            partial = next;
        }
        for (pe, pz, pc) in partial {
            if let Some(s) = acc.get_mut(&pz) {
                s.add_term(pe, pc);
            }
        }
    }
    for (p, s) in acc {
        out.set(p, s);
    }
    out
}

/// Exact Miwa shift of a polynomial τ: Laurent polynomial in z⁻¹ with
/// polynomial coefficients (no truncation).
pub fn miwa_shift_poly<F: Field>(tau: &MPoly<F>) -> BTreeMap<i32, MPoly<F>> {
    let nvars = tau.nvars();
    let mut acc: BTreeMap<i32, MPoly<F>> = BTreeMap::new();
    for (e, c) in tau.terms() {
        let mut partial: Vec<(Exps, i32, F)> = vec![(vec![0; nvars], 0, c.clone())];
        for (k, &ek) in e.iter().enumerate() {
            if ek == 0 {
                continue;
            }
            let kk = k as i32 + 1;
            let mut next = Vec::new();
            for (pe, pz, pc) in &partial {
                for l in 0..=ek {
                    let mut ne = pe.clone();
                    ne[k] += ek - l;
                    let coef = pc.clone()
                        * binomial::<F>(ek as i64, l)
                        * F::from_ratio(-1, kk as i64).pow(l);
                    next.push((ne, pz - kk * l as i32, coef));
                }
            }
            partial = next;
        }
        for (pe, pz, pc) in partial {
            acc.entry(pz).or_insert_with(|| MPoly::zero(nvars)).add_term(pe, pc);
        }
    }
    acc.retain(|_, p| !p.is_zero());
    acc
}

pub(crate) fn fmt_series_witness(e: &[u32]) -> String {
    let m = fmt_monomial(e);
    if m.is_empty() {
        "1".into()
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use num_rational::BigRational;

    type Q = BigRational;
    fn q(p: i64, d: i64) -> Q {
        Q::from_ratio(p, d)
    }
    fn t(nvars: usize, bound: i32, terms: &[(&[u32], Q)]) -> TruncatedSeries<Q> {
        TruncatedSeries::from_terms(nvars, bound, terms.iter().map(|(e, c)| (e.to_vec(), c.clone())))
    }

    #[test]
    fn product_examples() {
        let a = t(1, 3, &[(&[0], q(1, 1)), (&[1], q(1, 1))]);
        let b = t(1, 3, &[(&[0], q(1, 1)), (&[1], q(-1, 1))]);
        assert_eq!(a * b, t(1, 3, &[(&[0], q(1, 1)), (&[2], q(-1, 1))]));
        let t2 = t(2, 3, &[(&[0, 1], q(1, 1))]);
        assert!((t2.clone() * t2).is_zero());
        let e = t(1, 2, &[(&[0], q(1, 1)), (&[1], q(1, 1)), (&[2], q(1, 2))]);
        let f = t(1, 2, &[(&[0], q(1, 1)), (&[1], q(-1, 1)), (&[2], q(1, 2))]);
        assert_eq!(e * f, TruncatedSeries::one(1, 2));
    }

    #[test]
    fn checked_mul_rejects_mismatch() {
        let a = TruncatedSeries::<Q>::one(2, 3);
        let b = TruncatedSeries::<Q>::one(2, 4);
        assert!(matches!(a.checked_mul(&b), Err(Error::OrderMismatch(_))));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(TruncatedSeries::<Q>::zero(2, 2).exp().unwrap(), TruncatedSeries::one(2, 2));
        let a = t(2, 2, &[(&[1, 0], q(2, 1))]);
        assert_eq!(
            a.exp().unwrap(),
            t(2, 2, &[(&[0, 0], q(1, 1)), (&[1, 0], q(2, 1)), (&[2, 0], q(2, 1))])
        );
        // brute-force Taylor: exp(t1 + t2) to weight 2 = 1 + t1 + t2 + t1^2/2
        let b = t(2, 2, &[(&[1, 0], q(1, 1)), (&[0, 1], q(1, 1))]);
        assert_eq!(
            b.exp().unwrap(),
            t(2, 2, &[(&[0, 0], q(1, 1)), (&[1, 0], q(1, 1)), (&[0, 1], q(1, 1)), (&[2, 0], q(1, 2))])
        );
        assert_eq!(TruncatedSeries::<Q>::one(1, 2).exp(), Err(Error::NonZeroConstant));
        assert_eq!(
            TruncatedSeries::exp_linear(&[q(1, 1), q(1, 1)], 2),
            b.exp().unwrap()
        );
    }

    #[test]
    fn invert_examples() {
        assert_eq!(TruncatedSeries::<Q>::one(1, 3).invert().unwrap(), TruncatedSeries::one(1, 3));
        let a = t(1, 3, &[(&[0], q(1, 1)), (&[1], q(-1, 1))]);
        assert_eq!(
            a.invert().unwrap(),
            t(1, 3, &[(&[0], q(1, 1)), (&[1], q(1, 1)), (&[2], q(1, 1)), (&[3], q(1, 1))])
        );
        let b = t(2, 2, &[(&[0, 0], q(1, 1)), (&[1, 0], q(1, 1)), (&[0, 1], q(1, 1))]);
        let binv = t(2, 2, &[(&[0, 0], q(1, 1)), (&[1, 0], q(-1, 1)), (&[0, 1], q(-1, 1)), (&[2, 0], q(1, 1))]);
        assert_eq!(b.invert().unwrap(), binv);
        assert_eq!(b * binv, TruncatedSeries::one(2, 2));
        assert_eq!(TruncatedSeries::<Q>::zero(1, 2).invert(), Err(Error::NonUnitSeries));
    }

    #[test]
    fn miwa_examples() {
        let o = TruncOrders::new(4, 2, 4).unwrap();
        let one = TruncatedSeries::<Q>::one(2, 4);
        assert_eq!(miwa_shift(&one, &o).coeffs().len(), 1);
        let t1 = t(2, 4, &[(&[1, 0], q(1, 1))]);
        let m = miwa_shift(&t1, &o);
        assert_eq!(m.coeff(0, 4), t1);
        assert_eq!(m.coeff(-1, 3).constant_term(), q(-1, 1));
        let t2 = t(2, 4, &[(&[0, 1], q(1, 1))]);
        let m2 = miwa_shift(&t2, &o);
        assert_eq!(m2.coeff(-2, 2).constant_term(), q(-1, 2));
    }

    #[test]
    fn divide_by_zpoly() {
        // e^{xz}(z-2)/z = 1 - 2/z
        let one = TruncatedSeries::<Q>::one(1, 2);
        let tail = LaurentTail::from_series(one.clone(), 0, -4);
        let num = tail.mul_zpoly(&Poly::new(vec![q(-2, 1), q(1, 1)]));
        let back = num.div_zpoly(&Poly::new(vec![q(0, 1), q(1, 1)])).unwrap();
        assert_eq!(back.coeff(0, 2), one);
        assert_eq!(back.coeff(-1, 2).constant_term(), q(-2, 1));
        assert_eq!(back.coeffs().len(), 2);
        assert_eq!(back.low(), -4);
    }
}
