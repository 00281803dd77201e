//! Exponential polynomials Σ_μ e^{μx} p_μ(x) in the single variable x.
//!
//! Monomials e^{μx}x^k are ordered lexicographically by (μ, k). The order on
//! frequencies is additive, so this is a monomial order: leading terms of a
//! product are the products of leading terms, which is what exact division
//! relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::poly::Poly;
use crate::scalar::Field;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpPoly<F: Field> {
    terms: BTreeMap<F, Poly<F>>,
}

impl<F: Field> ExpPoly<F> {
    pub fn constant(c: F) -> Self {
        Self::term(F::zero(), Poly::constant(c))
    }

    /// e^{μx}
    pub fn exp(mu: F) -> Self {
        Self::term(mu, Poly::one())
    }

    /// The function x.
    pub fn x() -> Self {
        Self::term(F::zero(), Poly::monomial(F::one(), 1))
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        Self::term(F::zero(), p)
    }

    pub fn term(mu: F, p: Poly<F>) -> Self {
        let mut e = Self::zero();
        e.add_term(mu, p);
        e
    }

    pub fn terms(&self) -> &BTreeMap<F, Poly<F>> {
        &self.terms
    }

    pub fn add_term(&mut self, mu: F, p: Poly<F>) {
        if p.is_zero() {
            return;
        }
        let s = match self.terms.remove(&mu) {
            Some(old) => old + p,
            None => p,
        };
        if !s.is_zero() {
            self.terms.insert(mu, s);
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero();
        for (mu, p) in &self.terms {
            out.add_term(mu.clone(), p.scale(c));
        }
        out
    }

    /// Multiplication by e^{νx}.
    pub fn shift_freq(&self, nu: &F) -> Self {
        ExpPoly { terms: self.terms.iter().map(|(m, p)| (m.clone() + nu.clone(), p.clone())).collect() }
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (mu, p) in &self.terms {
            out.add_term(mu.clone(), p.scale(mu) + p.derivative());
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.terms.values().map(|p| p.deg()).max().unwrap_or(0)
    }

    /// The value as a scalar when the function is constant.
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => {
                let (mu, p) = self.terms.iter().next().unwrap();
                (mu.is_zero() && p.deg() == 0).then(|| p.coeff(0))
            }
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.is_zero())
    }

    /// Leading monomial (μ, k) and its coefficient.
    pub fn leading(&self) -> Option<(F, usize, F)> {
        let (mu, p) = self.terms.iter().next_back()?;
        Some((mu.clone(), p.deg(), p.lead()))
    }

    /// Lowest monomial (μ, k) and its coefficient.
    pub fn lowest(&self) -> Option<(F, usize, F)> {
        let (mu, p) = self.terms.iter().next()?;
        let k = p.coeffs().iter().position(|c| !c.is_zero())?;
        Some((mu.clone(), k, p.coeff(k)))
    }

    /// Exact quotient self / d, or `None` when d does not divide self.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (dmu, dk, dc) = d.leading()?;
        let dinv = dc.try_inv().ok()?;
        let (amu, ak, _) = self.lowest()?;
        let (lmu, lk, _) = d.lowest()?;
        if ak < lk {
            return None;
        }
        let floor = (amu - lmu, ak - lk);
        let mut q = Self::zero();
        let mut r = self.clone();
        for _ in 0..4096 {
            let Some((rmu, rk, rc)) = r.leading() else {
                return Some(q);
            };
            if rk < dk {
                return None;
            }
            let tmu = rmu - dmu.clone();
            let tk = rk - dk;
            if (tmu.clone(), tk) < floor {
                return None;
            }
            let tc = rc * dinv.clone();
            // r −= c e^{μx} x^k · d, touching only the terms of d
            let neg = Poly::monomial(-tc.clone(), tk);
            for (mb, pb) in &d.terms {
                r.add_term(mb.clone() + tmu.clone(), pb.clone() * neg.clone());
            }
            q.add_term(tmu, Poly::monomial(tc, tk));
        }
        None
    }

    /// Splits self = c · e^{νx} · rest with rest having lowest frequency 0 and
    /// leading coefficient 1.
    pub fn unit_normalize(&self) -> Option<(F, F, Self)> {
        let (nu, _, _) = self.lowest()?;
        let rest = self.shift_freq(&-nu.clone());
        let (_, _, c) = rest.leading()?;
        let inv = c.try_inv().ok()?;
        Some((c, nu, rest.scale(&inv)))
    }

    /// Exact value at x₀. Needs x₀ = 0 unless every frequency is zero.
    pub fn eval(&self, x0: &F) -> Result<F> {
        if !x0.is_zero() && !self.is_polynomial() {
            return Err(Error::TranscendentalBasePoint(x0.to_string()));
        }
        Ok(self.terms.values().fold(F::zero(), |acc, p| acc + p.eval(x0)))
    }

    /// Taylor expansion about x₀ as a series in t₁ (the other times absent).
    pub fn to_series(&self, nvars: usize, bound: i32, x0: &F) -> Result<TruncatedSeries<F>> {
        if !x0.is_zero() && !self.is_polynomial() {
            return Err(Error::TranscendentalBasePoint(x0.to_string()));
        }
        let mut out = TruncatedSeries::zero(nvars, bound);
        for (mu, p) in &self.terms {
            let mut b = vec![F::zero(); nvars];
            b[0] = mu.clone();
            let e = TruncatedSeries::exp_linear(&b, bound);
            let poly = TruncatedSeries::from_mpoly(&MPoly::from_t1_poly(nvars, &p.shift(x0)), bound);
            out = out + e * poly;
        }
        Ok(out)
    }

    /// Replaces x by x + a when every frequency is zero.
    pub fn shift_x(&self, a: &F) -> Result<Self> {
        if !a.is_zero() && !self.is_polynomial() {
            return Err(Error::TranscendentalBasePoint(a.to_string()));
        }
        Ok(ExpPoly { terms: self.terms.iter().map(|(m, p)| (m.clone(), p.shift(a))).collect() })
    }

    /// Coordinates against a list of monomials (μ, k), for linear algebra.
    pub fn coefficient(&self, mu: &F, k: usize) -> F {
        self.terms.get(mu).map_or_else(F::zero, |p| p.coeff(k))
    }

    pub fn monomials(&self) -> impl Iterator<Item = (F, usize)> + '_ {
        self.terms.iter().flat_map(|(mu, p)| {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(k, _)| (mu.clone(), k))
        })
    }
}

impl<F: Field> Zero for ExpPoly<F> {
    fn zero() -> Self {
        ExpPoly { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<F: Field> One for ExpPoly<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

impl<F: Field> Add for ExpPoly<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (mu, p) in rhs.terms {
            self.add_term(mu, p);
        }
        self
    }
}

impl<F: Field> Sub for ExpPoly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for ExpPoly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        ExpPoly { terms: self.terms.into_iter().map(|(m, p)| (m, -p)).collect() }
    }
}

impl<F: Field> Mul for ExpPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (ma, pa) in &self.terms {
            for (mb, pb) in &rhs.terms {
                out.add_term(ma.clone() + mb.clone(), pa.clone() * pb.clone());
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for ExpPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(mu, p)| {
                let poly = p.fmt_var("x");
                if mu.is_zero() {
                    poly
                } else if p.is_one() {
                    format!("e^({mu}*x)")
                } else {
                    format!("e^({mu}*x)*({poly})")
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
    fn derivative_and_products() {
        let f = ExpPoly::exp(q(2)) * ExpPoly::x();
        // (x e^{2x})' = e^{2x}(2x + 1)
        assert_eq!(f.derivative(), ExpPoly::term(q(2), Poly::new(vec![q(1), q(2)])));
        let c = ExpPoly::exp(q(1)) + ExpPoly::exp(q(-1));
        assert_eq!(c.derivative().derivative(), c);
    }

    #[test]
    fn exact_division() {
        let a = ExpPoly::exp(q(1)) + ExpPoly::exp(q(-1));
        let b = ExpPoly::exp(q(2)) - ExpPoly::one();
        let prod = a.clone() * b.clone();
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(a.div_exact(&b), None);
        assert_eq!(ExpPoly::<Q>::one().div_exact(&ExpPoly::x()), None);
    }

    #[test]
    fn unit_normalization() {
        let a = (ExpPoly::exp(q(3)) + ExpPoly::exp(q(1))).scale(&q(5));
        let (c, nu, rest) = a.unit_normalize().unwrap();
        assert_eq!((c, nu), (q(5), q(1)));
        assert_eq!(rest, ExpPoly::exp(q(2)) + ExpPoly::one());
    }

    #[test]
    fn expansion_about_base_point() {
        let x = ExpPoly::<Q>::x();
        let s = (x.clone() * x).to_series(2, 3, &q(1)).unwrap();
        assert_eq!(s.coeff(&[0, 0]), q(1));
        assert_eq!(s.coeff(&[1, 0]), q(2));
        assert!(ExpPoly::exp(q(1)).to_series(2, 3, &q(1)).is_err());
        assert_eq!(ExpPoly::exp(q(2)).eval(&q(0)).unwrap(), q(1));
    }
}
