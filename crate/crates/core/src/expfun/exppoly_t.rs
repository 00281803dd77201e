//! Exponential polynomials in all the times: Σ_b e^{b·t} P_b(t) with
//! frequency vectors b ∈ F^M and polynomial coefficients P_b.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expfun::ExpPoly;
use crate::mpoly::MPoly;
use crate::scalar::Field;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpPolyT<F: Field> {
    nvars: usize,
    terms: BTreeMap<Vec<F>, MPoly<F>>,
}

impl<F: Field> ExpPolyT<F> {
    pub fn zero(nvars: usize) -> Self {
        ExpPolyT { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_mpoly(MPoly::one(nvars))
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        Self::from_mpoly(MPoly::constant(nvars, c))
    }

    pub fn from_mpoly(p: MPoly<F>) -> Self {
        let nvars = p.nvars();
        let mut e = Self::zero(nvars);
        e.add_term(vec![F::zero(); nvars], p);
        e
    }

    /// e^{b·t}
    pub fn exp_linear(b: Vec<F>) -> Self {
        let nvars = b.len();
        let mut e = Self::zero(nvars);
        e.add_term(b, MPoly::one(nvars));
        e
    }

    /// e^{ξ(t,λ)} with ξ(t,λ) = Σ_k t_k λ^k.
    pub fn exp_xi(lambda: &F, nvars: usize) -> Self {
        Self::exp_linear(xi_vector(lambda, nvars))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<F>, MPoly<F>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: Vec<F>, p: MPoly<F>) {
        assert_eq!(b.len(), self.nvars, "frequency vector length");
        if p.is_zero() {
            return;
        }
        let s = match self.terms.remove(&b) {
            Some(old) => old + p,
            None => p,
        };
        if !s.is_zero() {
            self.terms.insert(b, s);
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero(self.nvars);
        for (b, p) in &self.terms {
            out.add_term(b.clone(), p.scale(c));
        }
        out
    }

    pub fn mul_mpoly(&self, q: &MPoly<F>) -> Self {
        let mut out = Self::zero(self.nvars);
        for (b, p) in &self.terms {
            out.add_term(b.clone(), p.clone() * q.clone());
        }
        out
    }

    /// Multiplication by e^{c·t}.
    pub fn shift_freq(&self, c: &[F]) -> Self {
        ExpPolyT {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(b, p)| (b.iter().zip(c).map(|(x, y)| x.clone() + y.clone()).collect(), p.clone()))
                .collect(),
        }
    }

    /// ∂/∂t₁
    pub fn derivative_t1(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (b, p) in &self.terms {
            out.add_term(b.clone(), p.scale(&b[0]) + p.derivative(0));
        }
        out
    }

    /// Restriction to t = (x, 0, 0, …).
    pub fn restrict_x(&self) -> ExpPoly<F> {
        let mut out = ExpPoly::zero();
        for (b, p) in &self.terms {
            out.add_term(b[0].clone(), p.restrict_t1());
        }
        out
    }

    /// Drops or pads times; dropped times are set to zero.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (b, p) in &self.terms {
            let mut b2 = b.clone();
            b2.resize(nvars, F::zero());
            out.add_term(b2, p.with_nvars(nvars));
        }
        out
    }

    pub fn has_t1_frequency(&self) -> bool {
        self.terms.keys().any(|b| !b[0].is_zero())
    }

    fn check_base_point(&self, x0: &F) -> Result<()> {
        if !x0.is_zero() && self.has_t1_frequency() {
            return Err(Error::TranscendentalBasePoint(x0.to_string()));
        }
        Ok(())
    }

    /// Expansion in `nvars` times about t = (x₀, 0, …), exact to weight `bound`.
    pub fn to_series(&self, nvars: usize, bound: i32, x0: &F) -> Result<TruncatedSeries<F>> {
        self.check_base_point(x0)?;
        let mut out = TruncatedSeries::zero(nvars, bound);
        for (b, p) in &self.terms {
            let mut b2 = b.clone();
            b2.resize(nvars, F::zero());
            let poly = p.with_nvars(nvars).shift_t1(x0);
            let s = TruncatedSeries::from_mpoly(&poly, bound);
            let all_zero = b2.iter().all(|x| x.is_zero());
            out = out + if all_zero { s } else { TruncatedSeries::exp_linear(&b2, bound) * s };
        }
        Ok(out)
    }

    /// Value at t = (x₀, 0, …).
    pub fn eval_base(&self, x0: &F) -> Result<F> {
        self.check_base_point(x0)?;
        Ok(self.terms.values().fold(F::zero(), |acc, p| acc + p.eval_on_t1(x0)))
    }

    /// Some(c, b) when self = c·e^{b·t}.
    pub fn as_exponential(&self) -> Option<(F, Vec<F>)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (b, p) = self.terms.iter().next().unwrap();
        let c = p.constant_term();
        (p.terms().len() == 1 && !c.is_zero()).then(|| (c, b.clone()))
    }

    /// Coefficient of the last monomial in the last frequency.
    pub fn leading_coeff(&self) -> Option<F> {
        let (_, p) = self.terms.iter().next_back()?;
        p.terms().values().next_back().cloned()
    }
}

/// (λ, λ², …, λ^n)
pub fn xi_vector<F: Field>(lambda: &F, n: usize) -> Vec<F> {
    (1..=n as u32).map(|k| lambda.pow(k)).collect()
}

impl<F: Field> Add for ExpPolyT<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (b, p) in rhs.terms {
            self.add_term(b, p);
        }
        self
    }
}

impl<F: Field> Sub for ExpPolyT<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for ExpPolyT<F> {
    type Output = Self;
    fn neg(self) -> Self {
        ExpPolyT { nvars: self.nvars, terms: self.terms.into_iter().map(|(b, p)| (b, -p)).collect() }
    }
}

impl<F: Field> Mul for ExpPolyT<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (ba, pa) in &self.terms {
            for (bb, pb) in &rhs.terms {
                let b = ba.iter().zip(bb).map(|(x, y)| x.clone() + y.clone()).collect();
                out.add_term(b, pa.clone() * pb.clone());
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for ExpPolyT<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, p)| {
                if b.iter().all(|x| x.is_zero()) {
                    return format!("{p}");
                }
                let lin: Vec<String> = b
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(k, x)| format!("{x}*t{}", k + 1))
                    .collect();
                let e = format!("exp({})", lin.join(" + "));
                if p.terms().len() == 1 && p.constant_term().is_one() {
                    e
                } else {
                    format!("{e}*({p})")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn exp_xi_series_matches_exp_linear() {
        let e = ExpPolyT::exp_xi(&q(2), 3);
        let s = e.to_series(3, 4, &q(0)).unwrap();
        assert_eq!(s, TruncatedSeries::exp_linear(&[q(2), q(4), q(8)], 4));
        assert_eq!(e.derivative_t1(), e.scale(&q(2)));
    }

    #[test]
    fn restriction_to_x() {
        let t1 = MPoly::var(2, 0, q(1));
        let t2 = MPoly::var(2, 1, q(1));
        let e = ExpPolyT::exp_xi(&q(1), 2).mul_mpoly(&(t1 + t2));
        assert_eq!(e.restrict_x(), ExpPoly::exp(q(1)) * ExpPoly::x());
    }

    #[test]
    fn polynomial_base_point() {
        let t1 = ExpPolyT::from_mpoly(MPoly::var(2, 0, q(1)));
        let s = t1.to_series(2, 2, &q(1)).unwrap();
        assert_eq!(s.constant_term(), q(1));
        assert!(ExpPolyT::exp_xi(&q(1), 2).to_series(2, 2, &q(1)).is_err());
    }
}
