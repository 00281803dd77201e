//! Quotients of exponential polynomials, the coefficient field of the
//! differential operators.
//!
//! The denominator is kept as a product of canonical factors (lowest
//! frequency 0, leading coefficient 1) with multiplicities. Derivatives raise
//! each multiplicity by one instead of squaring the denominator, and factors
//! are cancelled whenever exact division succeeds. The representation is not
//! canonical; equality is decided by cross-multiplication.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expfun::{Differential, ExpPoly};
use crate::scalar::Field;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug)]
pub struct ExpPolyFraction<F: Field> {
    num: ExpPoly<F>,
    den: Vec<(ExpPoly<F>, u32)>,
}

impl<F: Field> ExpPolyFraction<F> {
    pub fn from_exppoly(a: ExpPoly<F>) -> Self {
        ExpPolyFraction { num: a, den: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_exppoly(ExpPoly::constant(c))
    }

    pub fn new(num: ExpPoly<F>, den: ExpPoly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut f = Self::from_exppoly(num);
        f.divide_by_factor(&den, 1);
        f.reduce();
        Ok(f)
    }

    pub fn num(&self) -> &ExpPoly<F> {
        &self.num
    }

    pub fn den_factors(&self) -> &[(ExpPoly<F>, u32)] {
        &self.den
    }

    /// Expanded denominator Π d_i^{e_i}.
    pub fn den(&self) -> ExpPoly<F> {
        self.den.iter().fold(ExpPoly::one(), |acc, (d, e)| acc * pow(d, *e))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    /// The value as an ExpPoly when the denominator has cancelled.
    pub fn as_exppoly(&self) -> Option<&ExpPoly<F>> {
        self.den.is_empty().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<F> {
        self.as_exppoly().and_then(|a| a.as_constant())
    }

    fn divide_by_factor(&mut self, d: &ExpPoly<F>, e: u32) {
        if e == 0 {
            return;
        }
        let (c, nu, rest) = d.unit_normalize().expect("nonzero factor");
        let cinv = c.pow(e).try_inv().expect("nonzero scalar");
        let e_f = F::from_i64(e as i64);
        self.num = self.num.shift_freq(&-(nu * e_f)).scale(&cinv);
        if rest.is_one() {
            return;
        }
        match self.den.iter_mut().find(|(f, _)| *f == rest) {
            Some((_, k)) => *k += e,
            None => {
                self.den.push((rest, e));
                self.den.sort_by(|a, b| a.0.cmp(&b.0));
            }
        }
    }

    /// Cancels factors of the denominator that divide the numerator exactly.
    pub fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
    }

    /// Brings both to the denominator with the larger multiplicity of each
    /// factor; returns the two numerators and the common factors.
    fn common(&self, other: &Self) -> (ExpPoly<F>, ExpPoly<F>, Vec<(ExpPoly<F>, u32)>) {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => den.push((f.clone(), *e)),
            }
        }
        den.sort_by(|a, b| a.0.cmp(&b.0));
        let lift = |x: &Self| {
            den.iter().fold(x.num.clone(), |acc, (f, e)| {
                let have = x.den.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k);
                acc * pow(f, e - have)
            })
        };
        (lift(self), lift(other), den)
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = Self::from_exppoly(self.den());
        out.divide_by_factor(&self.num, 1);
        out.reduce();
        Ok(out)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.try_inv()?)
    }

    pub fn scale(&self, c: &F) -> Self {
        ExpPolyFraction { num: self.num.scale(c), den: if c.is_zero() { Vec::new() } else { self.den.clone() } }
    }

    /// (a / Π d_i^{e_i})' = (a' Π d_i − a Σ e_i d_i' Π_{j≠i} d_j) / Π d_i^{e_i+1}
    pub fn derivative(&self) -> Self {
        if self.den.is_empty() {
            return Self::from_exppoly(self.num.derivative());
        }
        let all = self.den.iter().fold(ExpPoly::one(), |acc, (d, _)| acc * d.clone());
        let mut n = self.num.derivative() * all;
        for (i, (d, e)) in self.den.iter().enumerate() {
            let others = self
                .den
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(ExpPoly::one(), |acc, (_, (g, _))| acc * g.clone());
            n = n - (self.num.clone() * d.derivative() * others).scale(&F::from_i64(*e as i64));
        }
        // No cancellation attempt: for reduced input the new numerator is
        // prime to the raised factors except in degenerate cases.
        ExpPolyFraction { num: n, den: self.den.iter().map(|(d, e)| (d.clone(), e + 1)).collect() }
    }

    pub fn eval(&self, x0: &F) -> Result<F> {
        let d = self.den().eval(x0)?;
        self.num.eval(x0)?.try_div(&d)
    }

    pub fn to_series(&self, nvars: usize, bound: i32, x0: &F) -> Result<TruncatedSeries<F>> {
        let mut s = self.num.to_series(nvars, bound, x0)?;
        for (d, e) in &self.den {
            let inv = d.to_series(nvars, bound, x0)?.invert()?;
            for _ in 0..*e {
                s = s * inv.clone();
            }
        }
        Ok(s)
    }

    pub fn shift_x(&self, a: &F) -> Result<Self> {
        let mut out = Self::from_exppoly(self.num.shift_x(a)?);
        for (d, e) in &self.den {
            out.divide_by_factor(&d.shift_x(a)?, *e);
        }
        Ok(out)
    }
}

fn pow<F: Field>(d: &ExpPoly<F>, e: u32) -> ExpPoly<F> {
    (0..e).fold(ExpPoly::one(), |acc, _| acc * d.clone())
}

impl<F: Field> PartialEq for ExpPolyFraction<F> {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = self.common(other);
        a == b
    }
}

impl<F: Field> Eq for ExpPolyFraction<F> {}

impl<F: Field> Zero for ExpPolyFraction<F> {
    fn zero() -> Self {
        Self::from_exppoly(ExpPoly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for ExpPolyFraction<F> {
    fn one() -> Self {
        Self::from_exppoly(ExpPoly::one())
    }
}

impl<F: Field> From<ExpPoly<F>> for ExpPolyFraction<F> {
    fn from(a: ExpPoly<F>) -> Self {
        Self::from_exppoly(a)
    }
}

impl<F: Field> Add for ExpPolyFraction<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let (a, b, den) = self.common(&rhs);
        let mut out = ExpPolyFraction { num: a + b, den };
        out.reduce();
        out
    }
}

impl<F: Field> Sub for ExpPolyFraction<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for ExpPolyFraction<F> {
    type Output = Self;
    fn neg(self) -> Self {
        ExpPolyFraction { num: -self.num, den: self.den }
    }
}

impl<F: Field> Mul for ExpPolyFraction<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut den = self.den;
        for (f, e) in rhs.den {
            match den.iter_mut().find(|(g, _)| *g == f) {
                Some((_, k)) => *k += e,
                None => den.push((f, e)),
            }
        }
        den.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = ExpPolyFraction { num: self.num * rhs.num, den };
        out.reduce();
        out
    }
}

impl<F: Field> Differential for ExpPolyFraction<F> {
    fn diff(&self) -> Self {
        self.derivative()
    }
}

impl<F: Field> fmt::Display for ExpPolyFraction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(d, e)| if *e == 1 { format!("({d})") } else { format!("({d})^{e}") })
            .collect();
        write!(f, "({}) / {}", self.num, den.join("*"))
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

    fn cosh2() -> ExpPoly<Q> {
        ExpPoly::exp(q(1)) + ExpPoly::exp(q(-1))
    }

    #[test]
    fn field_like_arithmetic() {
        let a = ExpPolyFraction::new(ExpPoly::x(), cosh2()).unwrap();
        let b = ExpPolyFraction::from_exppoly(cosh2());
        assert_eq!(a.clone() * b, ExpPolyFraction::from_exppoly(ExpPoly::x()));
        assert_eq!((a.clone() * a.try_inv().unwrap()), ExpPolyFraction::one());
        assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn cancellation_and_unit_factors() {
        // (e^{2x} − 1)/(e^x − e^{-x}) = e^x
        let n = ExpPoly::exp(q(2)) - ExpPoly::one();
        let d = ExpPoly::exp(q(1)) - ExpPoly::exp(q(-1));
        let f = ExpPolyFraction::new(n, d).unwrap();
        assert_eq!(f.as_exppoly(), Some(&ExpPoly::exp(q(1))));
    }

    #[test]
    fn quotient_rule() {
        // (1/c)' = −c'/c² with c = e^x + e^{-x}
        let f = ExpPolyFraction::new(ExpPoly::one(), cosh2()).unwrap();
        let expect = ExpPolyFraction::new(-cosh2().derivative(), cosh2() * cosh2()).unwrap();
        assert_eq!(f.derivative(), expect);
        assert_eq!(f.derivative().den_factors()[0].1, 2);
    }

    #[test]
    fn series_expansion() {
        // 1/(1 + x) about 0
        let f = ExpPolyFraction::new(ExpPoly::one(), ExpPoly::one() + ExpPoly::x()).unwrap();
        let s = f.to_series(1, 3, &q(0)).unwrap();
        assert_eq!(s.coeff(&[3]), q(-1));
        assert_eq!(f.eval(&q(1)).unwrap(), Q::from_ratio(1, 2));
    }
}
