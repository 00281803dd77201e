//! Ordinary differential operators Σ c_i(x) ∂^i with exact fractional
//! coefficients, and truncated pseudo-differential operators acting on wave
//! function tails.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expfun::{wronskian_cofactors, ExpPoly};
use crate::fraction::ExpPolyFraction;
use crate::poly::Poly;
use crate::scalar::{binomial, Field};
use crate::series::{LaurentTail, TruncatedSeries};

type Frac<F> = ExpPolyFraction<F>;

/// Coefficients ascending: coeffs[i] multiplies ∂^i. No trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp<F: Field> {
    coeffs: Vec<Frac<F>>,
}

impl<F: Field> DiffOp<F> {
    pub fn new(mut coeffs: Vec<Frac<F>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn identity() -> Self {
        Self::scalar(F::one())
    }

    pub fn scalar(c: F) -> Self {
        Self::new(vec![Frac::constant(c)])
    }

    pub fn multiplication(f: Frac<F>) -> Self {
        Self::new(vec![f])
    }

    /// ∂^n
    pub fn d_pow(n: usize) -> Self {
        let mut c = vec![Frac::zero(); n + 1];
        c[n] = Frac::one();
        Self::new(c)
    }

    /// Σ c_i ∂^i from scalar coefficients.
    pub fn constant_coeffs(p: &Poly<F>) -> Self {
        Self::new(p.coeffs().iter().map(|c| Frac::constant(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[Frac<F>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Frac<F> {
        self.coeffs.get(i).cloned().unwrap_or_else(Frac::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order; the zero operator reports 0.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.scale(c)).collect())
    }

    /// (a ∘ b) = Σ_i Σ_j Σ_k C(i,k) a_i b_j^{(k)} ∂^{i+j−k}
    pub fn compose(&self, b: &Self) -> Self {
        if self.is_zero() || b.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Frac::zero(); self.order() + b.order() + 1];
        // derivatives of b's coefficients, computed once
        let mut ders: Vec<Vec<Frac<F>>> = vec![b.coeffs.clone()];
        for _ in 0..self.order() {
            let next = ders.last().unwrap().iter().map(|c| c.derivative()).collect();
            ders.push(next);
        }
        for (i, ai) in self.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (k, dk) in ders.iter().enumerate().take(i + 1) {
                let bin = binomial::<F>(i as i64, k as u32);
                for (j, bj) in dk.iter().enumerate() {
                    if bj.is_zero() {
                        continue;
                    }
                    let idx = i + j - k;
                    out[idx] = out[idx].clone() + (ai.clone() * bj.clone()).scale(&bin);
                }
            }
        }
        Self::new(out)
    }

    pub fn apply(&self, f: &Frac<F>) -> Frac<F> {
        let mut acc = Frac::zero();
        let mut d = f.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                d = d.derivative();
            }
            if !c.is_zero() {
                acc = acc + c.clone() * d.clone();
            }
        }
        acc
    }

    pub fn apply_exppoly(&self, f: &ExpPoly<F>) -> Frac<F> {
        self.apply(&Frac::from_exppoly(f.clone()))
    }

    /// h(L) = Σ h_i L^i
    pub fn poly_of(h: &Poly<F>, l: &Self) -> Self {
        let mut acc = Self::new(Vec::new());
        for c in h.coeffs().iter().rev() {
            acc = acc.compose(l) + Self::scalar(c.clone());
        }
        acc
    }

    /// Σ_i c_i(x) (z + ∂_{t₁})^i applied to a tail, coefficients expanded about x₀.
    pub fn apply_to_tail(&self, tail: &LaurentTail<F>, x0: &F) -> Result<LaurentTail<F>> {
        let nvars = tail.nvars();
        let bound = tail.coeffs().values().map(|s| s.bound()).max().unwrap_or(0);
        let mut acc: Option<LaurentTail<F>> = None;
        let mut cur = tail.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                cur = cur.z_plus_d();
            }
            if c.is_zero() {
                continue;
            }
            let cs = c.to_series(nvars, bound, x0)?;
            let term = cur.mul_series(&cs);
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        let low = tail.low() + self.order() as i32;
        Ok(acc.unwrap_or_else(|| LaurentTail::zero(nvars, low)).truncate(low, i32::MAX))
    }

    pub fn fmt_with(&self, var: &str) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let d = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(match (c.as_constant(), d.is_empty()) {
                (Some(k), false) if k.is_one() => d,
                (_, true) => format!("{c}"),
                (Some(k), false) => format!("{k}*{d}"),
                (None, false) => format!("[{c}]*{d}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<F: Field> Add for DiffOp<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<F: Field> Sub for DiffOp<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for DiffOp<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<F: Field> Mul for DiffOp<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<F: Field> fmt::Display for DiffOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("D"))
    }
}

/// The monic operator g ↦ Wr(f_0, …, f_{n−1}, g) / Wr(f_0, …, f_{n−1}).
pub fn operator_with_kernel<F: Field>(fs: &[Frac<F>], x0: &F) -> Result<DiffOp<F>> {
    let w = crate::expfun::wronskian(fs, Frac::one());
    if w.eval(x0)?.is_zero() {
        return Err(Error::VanishingWronskian(x0.to_string()));
    }
    kernel_operator(fs)
}

/// As [`operator_with_kernel`], allowing a Wronskian that vanishes at the base
/// point; the coefficients then have poles there.
pub fn kernel_operator<F: Field>(fs: &[Frac<F>]) -> Result<DiffOp<F>> {
    let cof = wronskian_cofactors(fs, Frac::one());
    let w = cof.last().expect("cofactors").clone();
    if w.is_zero() {
        return Err(Error::DegenerateSpectralData("kernel functions are linearly dependent".into()));
    }
    let inv = w.try_inv()?;
    let coeffs = cof.iter().map(|c| c.clone() * inv.clone()).collect();
    Ok(DiffOp::new(coeffs))
}

/// L = Q ∘ P + R with ord R < ord P, for monic P.
pub fn right_divide<F: Field>(l: &DiffOp<F>, p: &DiffOp<F>) -> Result<(DiffOp<F>, DiffOp<F>)> {
    right_division(l, p, true)
}

/// Q with L = Q ∘ P, for monic P with ker P spanned by `kernel`.
///
/// The remainder has order below ord P and agrees with L on ker P, so it
/// vanishes iff L kills the kernel; that test avoids expanding the remainder.
pub fn exact_right_divide<F: Field>(l: &DiffOp<F>, p: &DiffOp<F>, kernel: &[Frac<F>]) -> Result<DiffOp<F>> {
    if kernel.len() != p.order() {
        return Err(Error::Precondition("kernel basis size differs from the order".into()));
    }
    if let Some(f) = kernel.iter().find(|f| !l.apply(f).is_zero()) {
        return Err(Error::KernelNotInvariant(format!("L does not kill {f}")));
    }
    Ok(right_division(l, p, false)?.0)
}

/// Solves for the coefficients of Q from the top: the ∂^{k+n} coefficient of
/// Q ∘ P is q_k plus terms in q_{k'} with k' > k, by the Leibniz rule.
fn right_division<F: Field>(l: &DiffOp<F>, p: &DiffOp<F>, with_rem: bool) -> Result<(DiffOp<F>, DiffOp<F>)> {
    if !p.is_monic() {
        return Err(Error::Precondition("right division needs a monic divisor".into()));
    }
    let n = p.order();
    if l.is_zero() || l.order() < n {
        return Ok((DiffOp::new(Vec::new()), l.clone()));
    }
    let top = l.order() - n;
    // ders[j][i] = p_i^{(j)}
    let mut ders: Vec<Vec<Frac<F>>> = vec![p.coeffs.clone()];
    for _ in 0..top {
        let next = ders.last().unwrap().iter().map(|c| c.derivative()).collect();
        ders.push(next);
    }
    // Coefficient of ∂^m in L − Σ_{k' ∈ ks} q_{k'} ∂^{k'} ∘ P.
    let residue = |m: usize, q: &[Frac<F>], ks: std::ops::RangeInclusive<usize>| {
        let mut acc = l.coeff(m);
        for kp in ks {
            for (j, dj) in ders.iter().enumerate().take(kp + 1) {
                let i = m as i64 - kp as i64 + j as i64;
                if i < 0 || i as usize > n || q[kp].is_zero() || dj[i as usize].is_zero() {
                    continue;
                }
                acc = acc - (q[kp].clone() * dj[i as usize].clone()).scale(&binomial::<F>(kp as i64, j as u32));
            }
        }
        acc
    };
    let mut q = vec![Frac::zero(); top + 1];
    for k in (0..=top).rev() {
        q[k] = residue(k + n, &q, k + 1..=top);
    }
    let r: Vec<Frac<F>> = if with_rem { (0..n).map(|m| residue(m, &q, 0..=top)).collect() } else { Vec::new() };
    Ok((DiffOp::new(q), DiffOp::new(r)))
}

/// L̄ with L̄ ∘ P = P ∘ L; requires L(ker P) ⊂ ker P.
pub fn conjugate<F: Field>(p: &DiffOp<F>, l: &DiffOp<F>) -> Result<DiffOp<F>> {
    let (q, r) = right_divide(&p.compose(l), p)?;
    if !r.is_zero() {
        return Err(Error::KernelNotInvariant(format!("remainder {r}")));
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Pseudo-differential operators
// ---------------------------------------------------------------------------

/// Σ_j c_j(t) ∂^j for orders from the top down to `min_order`; terms below
/// are discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoDiffOp<F: Field> {
    pub terms: BTreeMap<i32, TruncatedSeries<F>>,
    pub min_order: i32,
}

impl<F: Field> PseudoDiffOp<F> {
    pub fn new(min_order: i32) -> Self {
        PseudoDiffOp { terms: BTreeMap::new(), min_order }
    }

    pub fn monomial(c: TruncatedSeries<F>, order: i32, min_order: i32) -> Self {
        let mut p = Self::new(min_order);
        p.add(order, c);
        p
    }

    pub fn add(&mut self, order: i32, c: TruncatedSeries<F>) {
        if order < self.min_order {
            return;
        }
        let s = match self.terms.remove(&order) {
            Some(old) => old + c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(order, s);
        }
    }

    pub fn coeff(&self, order: i32) -> Option<&TruncatedSeries<F>> {
        self.terms.get(&order)
    }

    /// Leibniz rule a∂^i ∘ b∂^j = Σ_k C(i,k) a b^{(k)} ∂^{i+j−k}, valid for negative i.
    pub fn compose(&self, b: &Self) -> Self {
        let min_order = self.min_order.max(b.min_order);
        let mut out = Self::new(min_order);
        for (&i, a) in &self.terms {
            for (&j, c) in &b.terms {
                let mut d = c.clone();
                let mut k = 0u32;
                while i + j - k as i32 >= min_order && !d.is_zero() {
                    let bin = binomial::<F>(i as i64, k);
                    if bin.is_zero() {
                        break;
                    }
                    out.add(i + j - k as i32, (a.clone() * d.clone()).scale(&bin));
                    d = d.derivative_t1();
                    k += 1;
                }
            }
        }
        out
    }

    /// Inverse of 1 + X with X of negative order, as Σ_m (−X)^m.
    pub fn inverse_unipotent(&self) -> Result<Self> {
        let one = self.terms.get(&0).ok_or(Error::NotNormalized)?;
        if self.terms.keys().any(|&k| k > 0) || !one.constant_term().is_one() || one.terms().len() != 1 {
            return Err(Error::NotNormalized);
        }
        let nvars = one.nvars();
        let bound = one.bound();
        let mut x = self.clone();
        x.terms.remove(&0);
        let neg_x = Self { terms: x.terms.iter().map(|(&k, s)| (k, -s.clone())).collect(), min_order: self.min_order };
        let mut acc = Self::monomial(TruncatedSeries::one(nvars, bound), 0, self.min_order);
        let mut power = acc.clone();
        for _ in 0..(-self.min_order).max(0) {
            power = power.compose(&neg_x);
            if power.terms.is_empty() {
                break;
            }
            for (k, s) in power.terms.clone() {
                acc.add(k, s);
            }
        }
        Ok(acc)
    }

    /// Action on e^{ξ}·tail: ∂^i ↦ (z + ∂)^i on the tail, for any integer i.
    pub fn apply_to_tail(&self, tail: &LaurentTail<F>, low: i32) -> LaurentTail<F> {
        let mut acc = LaurentTail::zero(tail.nvars(), low);
        let top = self.terms.keys().next_back().copied().unwrap_or(0).max(0);
        let mut pos = vec![tail.clone()];
        for _ in 0..top {
            let n = pos.last().unwrap().z_plus_d();
            pos.push(n);
        }
        let mut neg = tail.clone();
        let mut neg_order = 0;
        for (&i, c) in self.terms.iter().rev() {
            let v = if i >= 0 {
                pos[i as usize].clone()
            } else {
                while neg_order > i {
                    neg = inv_z_plus_d(&neg, low);
                    neg_order -= 1;
                }
                neg.clone()
            };
            acc = acc + v.mul_series(c).truncate(low, i32::MAX);
        }
        acc
    }
}

/// (z + ∂)^{-1} w = Σ_k (−1)^k z^{−1−k} ∂^k w, down to z^{low}.
pub fn inv_z_plus_d<F: Field>(w: &LaurentTail<F>, low: i32) -> LaurentTail<F> {
    let out_low = (w.low() - 1).max(low);
    let mut acc = LaurentTail::zero(w.nvars(), out_low);
    let top = w.top().unwrap_or(w.low());
    let mut d = w.clone();
    let mut k = 0;
    while top - 1 - k >= out_low {
        let term = d.shift(-1 - k);
        let term = if k % 2 == 1 { -term } else { term };
        acc = acc + term.truncate(out_low, i32::MAX);
        d = d.derivative_t1();
        k += 1;
    }
    LaurentTail::zero(w.nvars(), out_low) + acc
}

/// Reads K = 1 + Σ a_j ∂^{−j} off a normalized tail 1 + Σ a_j z^{−j} and
/// returns (K, K ∂ K⁻¹).
pub fn dress<F: Field>(tail: &LaurentTail<F>) -> Result<(PseudoDiffOp<F>, PseudoDiffOp<F>)> {
    if tail.top() != Some(0) || !tail.coeff(0, 0).constant_term().is_one() || tail.coeff(0, 0).terms().len() != 1 {
        return Err(Error::NotNormalized);
    }
    let min_order = tail.low();
    let mut k = PseudoDiffOp::new(min_order);
    for (&p, s) in tail.coeffs() {
        k.add(p, s.clone());
    }
    let kinv = k.inverse_unipotent()?;
    let one = tail.coeff(0, 0);
    let d = PseudoDiffOp::monomial(one, 1, min_order);
    let p = k.compose(&d).compose(&kinv);
    Ok((k, p))
}
