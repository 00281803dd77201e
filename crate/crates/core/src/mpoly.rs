//! Exact multivariate polynomials in the times t₁..t_M.
//!
//! Exponent vectors have fixed length M; variable index `k` stands for t_{k+1}
//! and carries weight k+1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::poly::Poly;
use crate::scalar::{binomial, Field};

pub type Exps = Vec<u32>;

pub fn weight(e: &[u32]) -> u32 {
    e.iter().enumerate().map(|(k, &x)| (k as u32 + 1) * x).sum()
}

pub(crate) fn add_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All exponent vectors in `nvars` variables with weight ≤ `bound`, in
/// ascending lexicographic order.
pub fn monomials_up_to(nvars: usize, bound: i32) -> Vec<Exps> {
    let mut out = Vec::new();
    if bound < 0 {
        return out;
    }
    let mut cur = vec![0u32; nvars];
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exps>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        let w = k as u32 + 1;
        for e in 0..=left / w {
            cur[k] = e;
            rec(k + 1, left - e * w, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, bound as u32, &mut cur, &mut out);
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MPoly<F: Field> {
    nvars: usize,
    terms: BTreeMap<Exps, F>,
}

impl<F: Field> MPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, F::one())
    }

    /// c · t_{k+1}
    pub fn var(nvars: usize, k: usize, c: F) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, F)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    /// Polynomial in t₁ only.
    pub fn from_t1_poly(nvars: usize, p: &Poly<F>) -> Self {
        let mut out = Self::zero(nvars);
        for (i, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[0] = i as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, F> {
        &self.terms
    }

    pub fn add_term(&mut self, e: Exps, c: F) {
        if c.is_zero() {
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

    /// Maximal weight of a monomial (0 for the zero polynomial).
    pub fn weight(&self) -> u32 {
        self.terms.keys().map(|e| weight(e)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x.clone() * c.clone())).collect(),
        }
    }

    /// ∂/∂t_{k+1}
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut e2 = e.clone();
                e2[k] -= 1;
                out.add_term(e2, c.clone() * F::from_i64(e[k] as i64));
            }
        }
        out
    }

    /// t₁ ↦ t₁ + a
    pub fn shift_t1(&self, a: &F) -> Self {
        if a.is_zero() {
            return self.clone();
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let n = e[0];
            for j in 0..=n {
                let mut e2 = e.clone();
                e2[0] = j;
                let coef = c.clone() * binomial::<F>(n as i64, n - j) * a.pow(n - j);
                out.add_term(e2, coef);
            }
        }
        out
    }

    /// Restriction t₂ = t₃ = … = 0, as a polynomial in t₁.
    pub fn restrict_t1(&self) -> Poly<F> {
        let mut v: Vec<F> = Vec::new();
        for (e, c) in &self.terms {
            if e.iter().skip(1).all(|&x| x == 0) {
                let i = e[0] as usize;
                if v.len() <= i {
                    v.resize(i + 1, F::zero());
                }
                v[i] = v[i].clone() + c.clone();
            }
        }
        Poly::new(v)
    }

    /// Value at t = (a, 0, 0, …).
    pub fn eval_on_t1(&self, a: &F) -> F {
        self.restrict_t1().eval(a)
    }

    /// Re-embeds into `nvars` variables. Dropped variables are set to zero.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            if e.iter().skip(nvars).any(|&x| x > 0) {
                continue;
            }
            let mut e2 = e.clone();
            e2.resize(nvars, 0);
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.nvars), |acc, _| acc * self.clone())
    }
}

impl<F: Field> Add for MPoly<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl<F: Field> Sub for MPoly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for MPoly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        MPoly { nvars: self.nvars, terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl<F: Field> Mul for MPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(add_exps(ea, eb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

pub fn fmt_monomial(e: &[u32]) -> String {
    let mut s = Vec::new();
    for (k, &x) in e.iter().enumerate() {
        match x {
            0 => {}
            1 => s.push(format!("t{}", k + 1)),
            _ => s.push(format!("t{}^{}", k + 1, x)),
        }
    }
    s.join("*")
}

pub(crate) fn fmt_terms<'a, F: Field>(terms: impl Iterator<Item = (&'a Exps, &'a F)>) -> String {
    let mut parts = Vec::new();
    for (e, c) in terms {
        let m = fmt_monomial(e);
        parts.push(if m.is_empty() {
            c.to_string()
        } else if c.is_one() {
            m
        } else {
            format!("{c}*{m}")
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl<F: Field> fmt::Display for MPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_terms(self.terms.iter()))
    }
}
