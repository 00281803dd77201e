//! Dense univariate polynomials, used for f, g, h in z and for polynomial parts in x.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Coefficients in ascending order, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Poly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: F, deg: usize) -> Self {
        let mut v = vec![F::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    /// x − r
    pub fn linear_root(r: F) -> Self {
        Self::new(vec![-r, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// p(x) ↦ p(x^n)
    pub fn inflate(&self, n: usize) -> Self {
        let mut v = vec![F::zero(); self.coeffs.len().saturating_sub(1) * n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * n] = c.clone();
        }
        Self::new(v)
    }

    /// p(x) ↦ p(x + a)
    pub fn shift(&self, a: &F) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * Self::new(vec![a.clone(), F::one()]) + Self::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc * self.clone())
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv = d.lead().try_inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![F::zero(); rem.len() - dd];
        for i in (0..q.len()).rev() {
            let c = rem[i + dd].clone() * inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * dj.clone();
            }
            q[i] = c;
        }
        Ok((Self::new(q), Self::new(rem)))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let inv = a.lead().try_inv()?;
        Ok(a.scale(&inv))
    }

    /// Power sums p_k = Σ r_i^k of the roots of a monic polynomial, k = 1..=count,
    /// via Newton's identities.
    pub fn root_power_sums(&self, count: usize) -> Result<Vec<F>> {
        if !self.is_monic() {
            return Err(Error::Precondition("power sums need a monic polynomial".into()));
        }
        let n = self.deg();
        // e_k from x^n + c_{n-1}x^{n-1} + … : c_{n-k} = (−1)^k e_k
        let e = |k: usize| -> F {
            if k > n {
                return F::zero();
            }
            let c = self.coeff(n - k);
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        };
        let mut p: Vec<F> = Vec::with_capacity(count);
        for k in 1..=count {
            let mut acc = if k <= n { e(k) * F::from_i64(k as i64) } else { F::zero() };
            if k % 2 == 0 {
                acc = -acc;
            }
            for i in 1..k {
                let term = e(i) * p[k - i - 1].clone();
                if i % 2 == 1 {
                    acc = acc + term;
                } else {
                    acc = acc - term;
                }
            }
            p.push(acc);
        }
        Ok(p)
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono
            } else if *c == -F::one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl<F: Field> Zero for Poly<F> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Field> One for Poly<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

impl<F: Field> Add for Poly<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<F: Field> Sub for Poly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<F: Field> Mul for Poly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(v)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("z"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn p(c: &[i64]) -> Poly<BigRational> {
        Poly::new(c.iter().map(|&x| BigRational::from_i64(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[0, -2, 1]); // z^2 - 2z
        let (q, r) = a.div_rem(&p(&[-2, 1])).unwrap();
        assert_eq!(q, p(&[0, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[0, 0, 1])).unwrap(), p(&[0, 1]));
    }

    #[test]
    fn newton_power_sums() {
        // roots 2 and 3
        let g = p(&[-2, 1]) * p(&[-3, 1]);
        let s = g.root_power_sums(3).unwrap();
        assert_eq!(s, vec![BigRational::from_i64(5), BigRational::from_i64(13), BigRational::from_i64(35)]);
        assert_eq!(p(&[0, 0, 1]).root_power_sums(2).unwrap(), vec![BigRational::from_i64(0); 2]);
    }

    #[test]
    fn shift_and_inflate() {
        assert_eq!(p(&[0, 0, 1]).shift(&BigRational::from_i64(1)), p(&[1, 2, 1]));
        assert_eq!(p(&[1, 1]).inflate(2), p(&[1, 0, 1]));
    }
}
