//! Exponential-polynomial functions, Wronskians, and point-supported
//! spectral conditions applied to closed-form wave functions.

mod exppoly;
mod exppoly_t;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;
use serde::{Deserialize, Serialize};

pub use exppoly::ExpPoly;
pub use exppoly_t::{xi_vector, ExpPolyT};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mpoly::MPoly;
use crate::poly::Poly;
use crate::scalar::{binomial, factorial, Field};
use crate::series::{miwa_shift_poly, LaurentTail, TruncOrders, TruncatedSeries};

/// A ring element with a derivation, the only structure a Wronskian needs.
pub trait Differential:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn diff(&self) -> Self;
}

impl<F: Field> Differential for ExpPoly<F> {
    fn diff(&self) -> Self {
        self.derivative()
    }
}

impl<F: Field> Differential for ExpPolyT<F> {
    fn diff(&self) -> Self {
        self.derivative_t1()
    }
}

impl<F: Field> Differential for TruncatedSeries<F> {
    fn diff(&self) -> Self {
        self.derivative_t1()
    }
}

/// Determinant by Laplace expansion along the first row; no division, so it
/// works over any commutative ring. `None` for the empty matrix.
pub fn det_laplace<R: Clone + Add<Output = R> + Sub<Output = R> + Mul<Output = R>>(m: &[Vec<R>]) -> Option<R> {
    let n = m.len();
    match n {
        0 => None,
        1 => Some(m[0][0].clone()),
        _ => {
            let mut acc: Option<R> = None;
            for j in 0..n {
                let minor: Vec<Vec<R>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][j].clone() * det_laplace(&minor).expect("nonempty minor");
                acc = Some(match acc {
                    None if j % 2 == 0 => term,
                    None => unreachable!(),
                    Some(a) if j % 2 == 0 => a + term,
                    Some(a) => a - term,
                });
            }
            acc
        }
    }
}

/// Rows 0..rows of successive derivatives of each function (column k = f_k).
pub fn derivative_matrix<R: Differential>(fs: &[R], rows: usize) -> Vec<Vec<R>> {
    let mut out: Vec<Vec<R>> = Vec::with_capacity(rows);
    let mut cur = fs.to_vec();
    for _ in 0..rows {
        let next = cur.iter().map(|f| f.diff()).collect();
        out.push(std::mem::replace(&mut cur, next));
    }
    out
}

/// Wr(f_0, …, f_{n−1}); the empty Wronskian is `one`.
pub fn wronskian<R: Differential>(fs: &[R], one: R) -> R {
    det_laplace(&derivative_matrix(fs, fs.len())).unwrap_or(one)
}

/// Cofactors C_0..C_n with Wr(f_0, …, f_{n−1}, y) = Σ_r C_r y^{(r)}; C_n = Wr(f).
pub fn wronskian_cofactors<R: Differential>(fs: &[R], one: R) -> Vec<R> {
    let n = fs.len();
    let rows = derivative_matrix(fs, n + 1);
    (0..=n)
        .map(|r| {
            let minor: Vec<Vec<R>> = rows.iter().enumerate().filter(|(i, _)| *i != r).map(|(_, row)| row.clone()).collect();
            let d = det_laplace(&minor).unwrap_or_else(|| one.clone());
            if (n + r) % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Conditions
// ---------------------------------------------------------------------------

/// Σ_j α_j ∂_z^j |_{z=λ}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionPoint<F: Field> {
    pub lambda: F,
    pub alphas: Vec<F>,
}

/// A point-supported functional Σ_i Σ_j α_ij ∂_z^j |_{z=λ_i}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition<F: Field> {
    pub points: Vec<ConditionPoint<F>>,
}

impl<F: Field> Condition<F> {
    pub fn new(points: Vec<ConditionPoint<F>>) -> Result<Self> {
        if !points.iter().any(|p| p.alphas.iter().any(|a| !a.is_zero())) {
            return Err(Error::Invalid("condition with all weights zero".into()));
        }
        Ok(Condition { points })
    }

    /// e(k, λ) = ∂_z^k |_{z=λ}
    pub fn eval(k: usize, lambda: F) -> Self {
        let mut alphas = vec![F::zero(); k + 1];
        alphas[k] = F::one();
        Condition { points: vec![ConditionPoint { lambda, alphas }] }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.points.extend(other.points);
        self
    }
}

/// Ψ(t, z) = e^{ξ(t,z)} · numer(t, z) / (denom(t) · g(z)), with numer a Laurent
/// polynomial in z. This closed form is shared by H₊, polynomial-tau planes
/// and every plane reached from them by Darboux transformations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveForm<F: Field> {
    pub numer: BTreeMap<i32, ExpPolyT<F>>,
    pub denom: ExpPolyT<F>,
    pub g: Poly<F>,
}

impl<F: Field> WaveForm<F> {
    pub fn h_plus(nvars: usize) -> Self {
        WaveForm { numer: BTreeMap::from([(0, ExpPolyT::one(nvars))]), denom: ExpPolyT::one(nvars), g: Poly::one() }
    }

    /// Ψ = e^ξ τ(t − [z⁻¹]) / τ(t), exact for polynomial τ.
    pub fn from_tau(tau: &MPoly<F>) -> Self {
        let numer = miwa_shift_poly(tau).into_iter().map(|(p, c)| (p, ExpPolyT::from_mpoly(c))).collect();
        WaveForm { numer, denom: ExpPolyT::from_mpoly(tau.clone()), g: Poly::one() }
    }

    pub fn nvars(&self) -> usize {
        self.denom.nvars()
    }

    pub fn lowest_power(&self) -> i32 {
        self.numer.keys().next().copied().unwrap_or(0)
    }

    /// (z + ∂_{t₁}) applied to the numerator: the action of ∂_x modulo e^ξ.
    pub fn z_plus_d(numer: &BTreeMap<i32, ExpPolyT<F>>) -> BTreeMap<i32, ExpPolyT<F>> {
        let mut out: BTreeMap<i32, ExpPolyT<F>> = BTreeMap::new();
        for (&p, c) in numer {
            add_coeff(&mut out, p + 1, c.clone());
            add_coeff(&mut out, p, c.derivative_t1());
        }
        out
    }

    /// The series tail numer / (denom · g) in orders.t_var_count times about x₀.
    pub fn tail_series(&self, orders: &TruncOrders, x0: &F) -> Result<LaurentTail<F>> {
        let nv = orders.t_var_count;
        let bound = orders.t_weight_bound as i32;
        let den = self.denom.to_series(nv, bound, x0)?.invert()?;
        let n = self.g.deg() as i32;
        let mut t = LaurentTail::zero(nv, orders.low() + n);
        for (&p, c) in &self.numer {
            t.set(p, c.to_series(nv, bound, x0)? * den.clone());
        }
        t.div_zpoly(&self.g)
    }
}

pub(crate) fn add_coeff<F: Field>(m: &mut BTreeMap<i32, ExpPolyT<F>>, p: i32, c: ExpPolyT<F>) {
    let s = match m.remove(&p) {
        Some(old) => old + c,
        None => c,
    };
    if !s.is_zero() {
        m.insert(p, s);
    }
}

/// f(t) = num(t) / den(t): a condition applied to a wave function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TFunction<F: Field> {
    pub num: ExpPolyT<F>,
    pub den: ExpPolyT<F>,
}

impl<F: Field> TFunction<F> {
    pub fn to_series(&self, nvars: usize, bound: i32, x0: &F) -> Result<TruncatedSeries<F>> {
        let n = self.num.to_series(nvars, bound, x0)?;
        if self.den == ExpPolyT::one(self.den.nvars()) {
            return Ok(n);
        }
        Ok(n * self.den.to_series(nvars, bound, x0)?.invert()?)
    }

    /// The x-only function as numerator and denominator.
    pub fn x_only(&self) -> (ExpPoly<F>, ExpPoly<F>) {
        (self.num.restrict_x(), self.den.restrict_x())
    }
}

/// Power series in u with coefficients in a ring, truncated after u^len−1.
fn u_mul<R: Clone + Add<Output = R> + Mul<Output = R>>(a: &[R], b: &[R], zero: &R) -> Vec<R> {
    (0..a.len())
        .map(|j| (0..=j).fold(zero.clone(), |acc, i| acc + a[i].clone() * b[j - i].clone()))
        .collect()
}

/// ⟨c, e^{ξ(t,z)} numer(t,z)/g(z)⟩ — the numerator G of f = G / denom.
pub fn apply_condition_numer<F: Field>(c: &Condition<F>, wave: &WaveForm<F>) -> Result<ExpPolyT<F>> {
    let nv = wave.nvars();
    let mut total = ExpPolyT::zero(nv);
    for pt in &c.points {
        let lam = &pt.lambda;
        let jmax = pt.alphas.len();
        if jmax == 0 {
            continue;
        }
        if lam.is_zero() && wave.lowest_power() < 0 {
            return Err(Error::ConditionPoint(lam.to_string()));
        }
        // exp(ξ(t,λ+u) − ξ(t,λ)) = Σ_j E_j(t) u^j
        let a: Vec<MPoly<F>> = (0..jmax)
            .map(|l| {
                if l == 0 {
                    return MPoly::zero(nv);
                }
                let mut s = MPoly::zero(nv);
                for k in l..=nv {
                    let c = binomial::<F>(k as i64, l as u32) * lam.pow((k - l) as u32);
                    s = s + MPoly::var(nv, k - 1, c);
                }
                s
            })
            .collect();
        let mut e: Vec<MPoly<F>> = vec![MPoly::one(nv)];
        for j in 1..jmax {
            let mut acc = MPoly::zero(nv);
            for l in 1..=j {
                acc = acc + (a[l].clone() * e[j - l].clone()).scale(&F::from_i64(l as i64));
            }
            e.push(acc.scale(&F::from_i64(j as i64).try_inv()?));
        }
        // numer(t, λ+u)
        let mut b: Vec<ExpPolyT<F>> = vec![ExpPolyT::zero(nv); jmax];
        for (&p, coef) in &wave.numer {
            for (j, bj) in b.iter_mut().enumerate() {
                let bin = binomial::<F>(p as i64, j as u32);
                if bin.is_zero() {
                    continue;
                }
                let e = p - j as i32;
                let lp = if e >= 0 { lam.pow(e as u32) } else { lam.pow((-e) as u32).try_inv()? };
                *bj = bj.clone() + coef.scale(&(bin * lp));
            }
        }
        // 1 / g(λ+u)
        let gs = wave.g.shift(lam);
        let g0 = gs.coeff(0).try_inv().map_err(|_| Error::ConditionPoint(lam.to_string()))?;
        let mut ginv: Vec<F> = vec![g0.clone()];
        for j in 1..jmax {
            let mut acc = F::zero();
            for i in 1..=j {
                acc = acc + gs.coeff(i) * ginv[j - i].clone();
            }
            ginv.push(-(acc * g0.clone()));
        }
        let eb: Vec<ExpPolyT<F>> = (0..jmax)
            .map(|j| (0..=j).fold(ExpPolyT::zero(nv), |acc, i| acc + b[j - i].mul_mpoly(&e[i])))
            .collect();
        let ginv_t: Vec<ExpPolyT<F>> = ginv.into_iter().map(|x| ExpPolyT::constant(nv, x)).collect();
        let full = u_mul(&eb, &ginv_t, &ExpPolyT::zero(nv));
        let mut part = ExpPolyT::zero(nv);
        for (j, alpha) in pt.alphas.iter().enumerate() {
            if !alpha.is_zero() {
                part = part + full[j].scale(&(alpha.clone() * factorial::<F>(j as u32)));
            }
        }
        total = total + part.shift_freq(&xi_vector(lam, nv));
    }
    Ok(total)
}

/// f(t) = ⟨c, Ψ(t, z)⟩.
pub fn apply_condition<F: Field>(c: &Condition<F>, wave: &WaveForm<F>) -> Result<TFunction<F>> {
    Ok(TFunction { num: apply_condition_numer(c, wave)?, den: wave.denom.clone() })
}

/// One element ∂_z^k Ψ|_{z=ε^j λ_i} of the ambient kernel basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelFunction<F: Field> {
    pub point: usize,
    pub root: u32,
    pub order: u32,
    pub z: F,
    pub function: TFunction<F>,
}

/// ε^j = e^{2πij/N} inside Q(ζ_m).
pub fn root_of_unity<F: Field>(n: u32, j: u32, m: u32) -> Result<F> {
    if n == 0 || m % n != 0 {
        return Err(Error::Precondition(format!("cyclotomic index {m} is not a multiple of N = {n}")));
    }
    F::root_of_unity(m, (j % n) * (m / n))
}

/// Index layout (point i, root j, derivative order k) of the ambient kernel
/// basis. A zero point has a single root and N·d derivative orders.
pub fn kernel_layout<F: Field>(points: &[(F, u32)], n: u32) -> Vec<(usize, u32, u32)> {
    let mut out = Vec::new();
    for (i, (lam, d)) in points.iter().enumerate() {
        let (roots, orders) = if lam.is_zero() { (1, n * d) } else { (n, *d) };
        for j in 0..roots {
            for k in 0..orders {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Basis of ker Π(L_V − λ_i^N)^{d_i}, ordered by point i, then root j, then
/// derivative order k.
pub fn kernel_basis<F: Field>(
    wave: &WaveForm<F>,
    points: &[(F, u32)],
    n: u32,
    m: u32,
) -> Result<Vec<KernelFunction<F>>> {
    let mut out = Vec::new();
    for (i, j, k) in kernel_layout(points, n) {
        let z = root_of_unity::<F>(n, j, m)? * points[i].0.clone();
        let function = apply_condition(&Condition::eval(k as usize, z.clone()), wave)?;
        out.push(KernelFunction { point: i, root: j, order: k, z, function });
    }
    let nums: Vec<ExpPolyT<F>> = out.iter().map(|k| k.function.num.clone()).collect();
    if exp_poly_t_rank(&nums)? < nums.len() {
        return Err(Error::DegenerateSpectralData("kernel functions are linearly dependent".into()));
    }
    Ok(out)
}

/// Rank of a family of ExpPolyT over F, from their coefficient vectors.
pub fn exp_poly_t_rank<F: Field>(fs: &[ExpPolyT<F>]) -> Result<usize> {
    let mut keys = std::collections::BTreeSet::new();
    for f in fs {
        for (b, p) in f.terms() {
            for e in p.terms().keys() {
                keys.insert((b.clone(), e.clone()));
            }
        }
    }
    let keys: Vec<_> = keys.into_iter().collect();
    let m: Vec<Vec<F>> = keys
        .iter()
        .map(|(b, e)| fs.iter().map(|f| f.terms().get(b).map_or_else(F::zero, |p| p.coeff(e))).collect())
        .collect();
    if m.is_empty() {
        return Ok(0);
    }
    linalg::rank(&m)
}

/// The constant polynomial one as an ExpPoly (used as the empty Wronskian).
pub fn one_x<F: Field>() -> ExpPoly<F> {
    ExpPoly::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn wronskian_examples() {
        let e2 = ExpPoly::exp(q(2));
        assert_eq!(wronskian(&[e2.clone()], one_x()), e2);
        let w = wronskian(&[ExpPoly::exp(q(1)), ExpPoly::exp(q(-1))], one_x());
        assert_eq!(w, ExpPoly::constant(q(-2)));
        assert_eq!(wronskian(&[ExpPoly::<Q>::one(), ExpPoly::x()], one_x()), ExpPoly::one());
        assert_eq!(wronskian::<ExpPoly<Q>>(&[], one_x()), ExpPoly::one());
    }

    #[test]
    fn cofactor_expansion_matches_wronskian() {
        let fs = [ExpPoly::exp(q(1)), ExpPoly::x()];
        let y = ExpPoly::exp(q(3)) * ExpPoly::x();
        let cof = wronskian_cofactors(&fs, one_x());
        let mut ys = vec![y.clone()];
        for _ in 0..2 {
            let d = ys.last().unwrap().derivative();
            ys.push(d);
        }
        let lhs = cof.iter().zip(&ys).fold(ExpPoly::zero(), |acc, (c, y)| acc + c.clone() * y.clone());
        let mut all = fs.to_vec();
        all.push(y);
        assert_eq!(lhs, wronskian(&all, one_x()));
        assert_eq!(cof[2], wronskian(&fs, one_x()));
    }

    #[test]
    fn conditions_on_h_plus() {
        let w = WaveForm::<Q>::h_plus(3);
        let f = apply_condition(&Condition::eval(0, q(2)), &w).unwrap();
        assert_eq!(f.x_only().0, ExpPoly::exp(q(2)));
        assert_eq!(f.num, ExpPolyT::exp_xi(&q(2), 3));
        let f = apply_condition(&Condition::eval(1, q(0)), &w).unwrap();
        assert_eq!(f.num, ExpPolyT::from_mpoly(MPoly::var(3, 0, q(1))));
        let c = Condition::eval(0, q(1)).plus(Condition::eval(0, q(-1)));
        let f = apply_condition(&c, &w).unwrap();
        assert_eq!(f.x_only().0, ExpPoly::exp(q(1)) + ExpPoly::exp(q(-1)));
    }

    #[test]
    fn second_derivative_at_zero_is_schur() {
        // ∂_z² e^{ξ(t,z)}|₀ = t₁² + 2t₂
        let w = WaveForm::<Q>::h_plus(2);
        let f = apply_condition(&Condition::eval(2, q(0)), &w).unwrap();
        let t1 = MPoly::var(2, 0, q(1));
        let expect = t1.clone() * t1 + MPoly::var(2, 1, q(2));
        assert_eq!(f.num, ExpPolyT::from_mpoly(expect));
    }

    #[test]
    fn kernel_bases() {
        let w = WaveForm::<Q>::h_plus(2);
        let b = kernel_basis(&w, &[(q(1), 1)], 2, 2).unwrap();
        let xs: Vec<_> = b.iter().map(|k| k.function.x_only().0).collect();
        assert_eq!(xs, vec![ExpPoly::exp(q(1)), ExpPoly::exp(q(-1))]);
        let b = kernel_basis(&w, &[(q(0), 2)], 1, 1).unwrap();
        let xs: Vec<_> = b.iter().map(|k| k.function.x_only().0).collect();
        assert_eq!(xs, vec![ExpPoly::one(), ExpPoly::x()]);
        assert!(matches!(
            kernel_basis(&w, &[(q(2), 1), (q(2), 1)], 1, 1),
            Err(Error::DegenerateSpectralData(_))
        ));
    }

    #[test]
    fn condition_point_zero_needs_polynomial_tail() {
        let t1 = MPoly::var(2, 0, q(1));
        let w = WaveForm::from_tau(&t1);
        assert!(matches!(apply_condition(&Condition::eval(0, q(0)), &w), Err(Error::ConditionPoint(_))));
        // away from zero: ⟨e(0,2), e^ξ (t₁ − z⁻¹)⟩ = e^{ξ(2)}(t₁ − 1/2)
        let f = apply_condition(&Condition::eval(0, q(2)), &w).unwrap();
        let expect = ExpPolyT::exp_xi(&q(2), 2).mul_mpoly(&(t1 - MPoly::constant(2, Q::from_ratio(1, 2))));
        assert_eq!(f.num, expect);
    }

    #[test]
    fn division_by_g_in_conditions() {
        // Ψ = e^ξ (z − 2)/z, condition at 3: e^{ξ(3)}/3
        let mut w = WaveForm::<Q>::h_plus(2);
        w.numer = BTreeMap::from([(1, ExpPolyT::one(2)), (0, ExpPolyT::constant(2, q(-2)))]);
        w.g = Poly::monomial(q(1), 1);
        let f = apply_condition(&Condition::eval(0, q(3)), &w).unwrap();
        assert_eq!(f.num, ExpPolyT::exp_xi(&q(3), 2).scale(&Q::from_ratio(1, 3)));
        // derivative at 3: d/dz [e^{ξ}(1 − 2/z)] = e^ξ(ξ'(1 − 2/z) + 2/z²)
        let f = apply_condition(&Condition::eval(1, q(3)), &w).unwrap();
        let x = f.x_only().0;
        assert_eq!(x, ExpPoly::term(q(3), Poly::new(vec![Q::from_ratio(2, 9), Q::from_ratio(1, 3)])));
    }
}
