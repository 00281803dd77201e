//! The Darboux engine: builds (P, Q, f, g, h) from spectral data, the wave
//! function and tau function of the new plane, and its spectral algebra.
//!
//! Everything about W is held in closed form over the base plane: with
//! f_k = G_k / D (D the denominator of Ψ_V),
//!
//!   Ψ_W = e^ξ Σ_r C_r(G) (z+∂)^r N_V / (D · Wr(G) · g_V · g),
//!   τ_W ∝ Wr(G) · D^{−n} · τ_V,
//!
//! where C_r are the cofactors of the last row of Wr(G_0, …, G_{n−1}, ·) and
//! N_V is the base numerator. Series are only formed at the output.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::diffop::{conjugate, kernel_operator, exact_right_divide, DiffOp};
use crate::error::{Error, Result};
use crate::expfun::{
    add_coeff, kernel_basis, kernel_layout, root_of_unity, wronskian, wronskian_cofactors, Condition, ExpPolyT,
    KernelFunction, WaveForm,
};
use crate::fraction::ExpPolyFraction;
use crate::linalg::{self, Matrix};
use crate::plane::{BaseKind, PlaneSpec};
use crate::mpoly::MPoly;
use crate::poly::Poly;
use crate::scalar::{binomial, factorial, Field};
use crate::series::{LaurentTail, TruncOrders, TruncatedSeries, WaveFunction};

// ---------------------------------------------------------------------------
// Closed-form tau functions
// ---------------------------------------------------------------------------

/// scale · e^{Σ c_k t_k} · Π factor^exponent. Factors have lowest frequency
/// zero and leading coefficient one, so equal factors merge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauForm<F: Field> {
    nvars: usize,
    scale: F,
    exp: Vec<F>,
    factors: Vec<(ExpPolyT<F>, i32)>,
}

impl<F: Field> TauForm<F> {
    pub fn one(nvars: usize) -> Self {
        TauForm { nvars, scale: F::one(), exp: vec![F::zero(); nvars], factors: Vec::new() }
    }

    pub fn exponential(c: Vec<F>) -> Self {
        let mut t = Self::one(c.len());
        t.exp = c;
        t
    }

    /// p^e; panics on p = 0.
    pub fn factor(p: ExpPolyT<F>, e: i32) -> Self {
        let mut t = Self::one(p.nvars());
        t.push(p, e);
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn scale(&self) -> &F {
        &self.scale
    }

    pub fn exponent(&self) -> &[F] {
        &self.exp
    }

    pub fn factors(&self) -> &[(ExpPolyT<F>, i32)] {
        &self.factors
    }

    fn push(&mut self, p: ExpPolyT<F>, e: i32) {
        assert!(!p.is_zero(), "zero tau factor");
        if e == 0 {
            return;
        }
        let b0 = p.terms().keys().next().expect("nonzero").clone();
        let ei = F::from_i64(e as i64);
        for (x, b) in self.exp.iter_mut().zip(&b0) {
            *x = x.clone() + ei.clone() * b.clone();
        }
        let neg: Vec<F> = b0.iter().map(|b| -b.clone()).collect();
        let p = p.shift_freq(&neg);
        if let Some((c, _)) = p.as_exponential() {
            self.scale = self.scale.clone() * pow_i(&c, e);
            return;
        }
        let lc = p.leading_coeff().expect("nonzero");
        let p = p.scale(&lc.try_inv().expect("nonzero leading coefficient"));
        self.scale = self.scale.clone() * pow_i(&lc, e);
        match self.factors.iter().position(|(q, _)| *q == p) {
            Some(i) => {
                self.factors[i].1 += e;
                if self.factors[i].1 == 0 {
                    self.factors.remove(i);
                }
            }
            None => {
                self.factors.push((p, e));
                self.factors.sort();
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t.scale = t.scale * other.scale.clone();
        for (x, y) in t.exp.iter_mut().zip(&other.exp) {
            *x = x.clone() + y.clone();
        }
        for (p, e) in &other.factors {
            t.push(p.clone(), *e);
        }
        t
    }

    pub fn scaled(&self, c: &F) -> Self {
        let mut t = self.clone();
        t.scale = t.scale * c.clone();
        t
    }

    pub fn is_one(&self) -> bool {
        self.scale.is_one() && self.exp.iter().all(|x| x.is_zero()) && self.factors.is_empty()
    }

    /// The form as a polynomial, when it is one.
    pub fn as_polynomial(&self) -> Option<MPoly<F>> {
        if self.exp.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut acc = MPoly::constant(self.nvars, self.scale.clone());
        for (p, e) in &self.factors {
            if *e < 0 || p.terms().len() != 1 {
                return None;
            }
            let (b, q) = p.terms().iter().next()?;
            if b.iter().any(|x| !x.is_zero()) {
                return None;
            }
            acc = acc * q.pow(*e as u32);
        }
        Some(acc)
    }

    fn exp_part(&self) -> ExpPolyT<F> {
        ExpPolyT::exp_linear(self.exp.clone())
    }

    /// Value at t = (x₀, 0, …).
    pub fn value_at(&self, x0: &F) -> Result<F> {
        let mut v = self.scale.clone() * self.exp_part().eval_base(x0)?;
        for (p, e) in &self.factors {
            let c = p.eval_base(x0)?;
            v = v * if *e >= 0 { c.pow(*e as u32) } else { c.try_inv()?.pow((-*e) as u32) };
        }
        Ok(v)
    }

    /// Rescaled to value 1 at the base point; the flag is false (and the form
    /// unchanged) when the value vanishes.
    pub fn normalized(&self, x0: &F) -> Result<(Self, bool)> {
        let v = self.value_at(x0)?;
        if v.is_zero() {
            return Ok((self.clone(), false));
        }
        Ok((self.scaled(&v.try_inv()?), true))
    }

    pub fn to_series(&self, nvars: usize, bound: i32, x0: &F) -> Result<TruncatedSeries<F>> {
        let mut s = TruncatedSeries::constant(nvars, bound, self.scale.clone());
        if self.exp.iter().any(|x| !x.is_zero()) {
            s = s * self.exp_part().to_series(nvars, bound, x0)?;
        }
        for (p, e) in &self.factors {
            s = s * p.to_series(nvars, bound, x0)?.pow_i(*e)?;
        }
        Ok(s)
    }

    /// τ(x, 0, 0, …) as an exact quotient.
    pub fn restrict_x(&self) -> Result<ExpPolyFraction<F>> {
        let mut num = crate::expfun::ExpPoly::exp(self.exp.first().cloned().unwrap_or_else(F::zero)).scale(&self.scale);
        let mut den = crate::expfun::ExpPoly::one();
        for (p, e) in &self.factors {
            let x = p.restrict_x();
            for _ in 0..e.unsigned_abs() {
                if *e > 0 {
                    num = num * x.clone();
                } else {
                    den = den * x.clone();
                }
            }
        }
        ExpPolyFraction::new(num, den)
    }
}

fn pow_i<F: Field>(c: &F, e: i32) -> F {
    if e >= 0 {
        c.pow(e as u32)
    } else {
        c.try_inv().expect("nonzero").pow((-e) as u32)
    }
}

impl<F: Field> fmt::Display for TauForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![self.scale.to_string()];
        if self.exp.iter().any(|x| !x.is_zero()) {
            let lin: Vec<String> = self
                .exp
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("{c}*t{}", k + 1))
                .collect();
            parts.push(format!("exp({})", lin.join(" + ")));
        }
        for (p, e) in &self.factors {
            parts.push(if *e == 1 { format!("({p})") } else { format!("({p})^{e}") });
        }
        f.write_str(&parts.join(" * "))
    }
}

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

/// Points (λ_i, d_i), one per orbit λ ↦ ελ, and the n × dN matrix A selecting
/// f_k = Σ_i a_ki Φ_i from the ambient kernel basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec<F: Field> {
    pub points: Vec<(F, u32)>,
    pub matrix: Matrix<F>,
}

impl<F: Field> KernelSpec<F> {
    pub fn empty() -> Self {
        KernelSpec { points: Vec::new(), matrix: Vec::new() }
    }

    /// The whole ambient kernel: A = identity.
    pub fn full(points: Vec<(F, u32)>, n: u32) -> Self {
        let dim = kernel_layout(&points, n).len();
        KernelSpec { points, matrix: linalg::identity(dim) }
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    /// Groups the condition points into orbits and writes each condition as a
    /// row over the ambient kernel basis.
    pub fn from_conditions(conds: &[Condition<F>], n: u32, m: u32) -> Result<Self> {
        let mut points: Vec<(F, u32)> = Vec::new();
        let mut located: Vec<Vec<(usize, u32)>> = Vec::new();
        for c in conds {
            let mut loc = Vec::new();
            for pt in &c.points {
                let order = pt.alphas.iter().rposition(|a| !a.is_zero()).map_or(0, |i| i as u32 + 1);
                let w = pt.lambda.pow(n);
                let i = match points.iter().position(|(l, _)| l.pow(n) == w) {
                    Some(i) => i,
                    None => {
                        points.push((pt.lambda.clone(), 0));
                        points.len() - 1
                    }
                };
                let j = if pt.lambda.is_zero() {
                    0
                } else {
                    let base = points[i].0.clone();
                    (0..n)
                        .map(|j| root_of_unity::<F>(n, j, m).map(|e| (j, e * base.clone() == pt.lambda)))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .find(|(_, hit)| *hit)
                        .map(|(j, _)| j)
                        .ok_or_else(|| Error::Internal("orbit root not found".into()))?
                };
                let need = if pt.lambda.is_zero() { order.div_ceil(n) } else { order };
                points[i].1 = points[i].1.max(need);
                loc.push((i, j));
            }
            located.push(loc);
        }
        for p in points.iter_mut() {
            p.1 = p.1.max(1);
        }
        let layout = kernel_layout(&points, n);
        let mut matrix = Vec::new();
        for (c, loc) in conds.iter().zip(&located) {
            let mut row = vec![F::zero(); layout.len()];
            for (pt, &(i, j)) in c.points.iter().zip(loc) {
                for (k, a) in pt.alphas.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let col = layout
                        .iter()
                        .position(|&(ii, jj, kk)| ii == i && jj == j && kk == k as u32)
                        .ok_or_else(|| Error::Internal("kernel index".into()))?;
                    row[col] = row[col].clone() + a.clone();
                }
            }
            matrix.push(row);
        }
        Ok(KernelSpec { points, matrix })
    }

    fn validate(&self, n: u32) -> Result<usize> {
        let dim = kernel_layout(&self.points, n).len();
        if self.points.iter().any(|(_, d)| *d == 0) {
            return Err(Error::Invalid("point multiplicity must be positive".into()));
        }
        for (a, i) in self.points.iter().enumerate() {
            for b in &self.points[a + 1..] {
                if i.0.pow(n) == b.0.pow(n) {
                    return Err(Error::Invalid(format!("points {} and {} lie in one orbit", i.0, b.0)));
                }
            }
        }
        if self.matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid(format!("kernel matrix rows must have length {dim}")));
        }
        if !self.matrix.is_empty() && linalg::rank(&self.matrix)? < self.matrix.len() {
            return Err(Error::DegenerateSpectralData("rows of the kernel matrix are dependent".into()));
        }
        Ok(dim)
    }

    /// Π_i (w − λ_i^N)^{d_i}: the characteristic polynomial of L_V on the
    /// ambient kernel, in w = z^N.
    pub fn default_h(&self, n: u32) -> Poly<F> {
        self.points
            .iter()
            .fold(Poly::one(), |acc, (l, d)| acc * Poly::linear_root(l.pow(n)).pow(*d))
    }

    /// L_V on the ambient kernel basis: column c holds the coordinates of
    /// L_V Φ_c, from ∂_z^k(z^N Ψ) = Σ_l C(k,l) ∂_z^l(z^N) ∂_z^{k−l}Ψ.
    pub fn l_matrix(&self, n: u32, m: u32) -> Result<Matrix<F>> {
        let layout = kernel_layout(&self.points, n);
        let dim = layout.len();
        let mut mat = vec![vec![F::zero(); dim]; dim];
        for (c, &(i, j, k)) in layout.iter().enumerate() {
            let z = root_of_unity::<F>(n, j, m)? * self.points[i].0.clone();
            for l in 0..=k.min(n) {
                let zp = if n == l { F::one() } else { z.pow(n - l) };
                let coef = binomial::<F>(k as i64, l) * factorial::<F>(n) * factorial::<F>(n - l).try_inv()? * zp;
                if coef.is_zero() {
                    continue;
                }
                let r = layout
                    .iter()
                    .position(|&t| t == (i, j, k - l))
                    .ok_or_else(|| Error::Internal("kernel index".into()))?;
                mat[r][c] = mat[r][c].clone() + coef;
            }
        }
        Ok(mat)
    }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// The kernel side of a transform built from spectral data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelData<F: Field> {
    pub spec: KernelSpec<F>,
    pub basis: Vec<KernelFunction<F>>,
    /// G_k with f_k = G_k / D.
    pub numerators: Vec<ExpPolyT<F>>,
    pub denom: ExpPolyT<F>,
}

impl<F: Field> KernelData<F> {
    /// f_k(x) as exact quotients.
    pub fn x_functions(&self) -> Result<Vec<ExpPolyFraction<F>>> {
        let d = self.denom.restrict_x();
        self.numerators.iter().map(|g| ExpPolyFraction::new(g.restrict_x(), d.clone())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DarbouxTransform<F: Field> {
    /// The base plane V.
    pub plane: PlaneSpec<F>,
    /// Number of times carried by the closed forms.
    pub nvars: usize,
    /// Absent for composites and inverses.
    pub kernel: Option<KernelData<F>>,
    pub g: Poly<F>,
    /// Absent in forward-only mode.
    pub f: Option<Poly<F>>,
    pub h: Poly<F>,
    pub p: DiffOp<F>,
    pub q: Option<DiffOp<F>>,
    pub l_v: Option<DiffOp<F>>,
    pub l_w: Option<DiffOp<F>>,
    pub wave_w: WaveForm<F>,
    pub tau_w: TauForm<F>,
    pub normalized: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TransformInput<F: Field> {
    pub plane: PlaneSpec<F>,
    pub kernel: KernelSpec<F>,
    /// Defaults to z^n.
    pub g: Option<Poly<F>>,
    /// Defaults to the characteristic polynomial; must be a multiple of it.
    pub h: Option<Poly<F>>,
    pub nvars: usize,
}

pub fn build_transform<F: Field>(input: TransformInput<F>) -> Result<DarbouxTransform<F>> {
    let TransformInput { plane, kernel, g, h, nvars } = input;
    let nr = plane.n_reduction;
    let x0 = plane.base_point.clone();
    if nr == 0 {
        return Err(Error::Invalid("N must be positive".into()));
    }
    kernel.validate(nr)?;
    let n = kernel.rows();
    let mut notes = Vec::new();

    let wave_v = plane.wave_form(nvars)?;
    let tau_v = plane.tau_form(nvars)?;
    let basis = kernel_basis(&wave_v, &kernel.points, nr, plane.cyclotomic)?;
    let numerators: Vec<ExpPolyT<F>> = kernel
        .matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(&basis)
                .filter(|(a, _)| !a.is_zero())
                .fold(ExpPolyT::zero(nvars), |acc, (a, b)| acc + b.function.num.scale(a))
        })
        .collect();
    let kd = KernelData { spec: kernel, basis, numerators, denom: wave_v.denom.clone() };

    let g = g.unwrap_or_else(|| Poly::monomial(F::one(), n));
    if !g.is_monic() || g.deg() != n {
        return Err(Error::Invalid(format!("g must be monic of degree {n}")));
    }

    let fx = kd.x_functions()?;
    let wr0 = wronskian(&fx, ExpPolyFraction::one()).eval(&x0)?;
    if wr0.is_zero() && !plane.unnormalized {
        return Err(Error::VanishingWronskian(x0.to_string()));
    }
    let p = kernel_operator(&fx)?;

    let h_min = kd.spec.default_h(nr);
    let h = match h {
        None => h_min,
        Some(h) => {
            if !h.is_monic() || !h.div_rem(&h_min)?.1.is_zero() {
                return Err(Error::Invalid(format!("h must be a monic multiple of {}", h_min.fmt_var("w"))));
            }
            h
        }
    };
    let (fq, rem) = h.inflate(nr as usize).div_rem(&g)?;
    let l_v = match plane.l_operator() {
        Ok(l) => Some(l),
        Err(e) => {
            notes.push(format!("base operator unavailable: {e}"));
            None
        }
    };
    let (f, q) = if !rem.is_zero() {
        notes.push("forward-only: g does not divide h(z^N)".into());
        (None, None)
    } else if let Some(l) = &l_v {
        let q = exact_right_divide(&DiffOp::poly_of(&h, l), &p, &fx)
            .map_err(|e| Error::Internal(format!("h(L_V) is not divisible by P: {e}")))?;
        (Some(fq), Some(q))
    } else {
        (Some(fq), None)
    };

    let cof = wronskian_cofactors(&kd.numerators, ExpPolyT::one(nvars));
    let mut numer: BTreeMap<i32, ExpPolyT<F>> = BTreeMap::new();
    let mut shifted = wave_v.numer.clone();
    for (r, c) in cof.iter().enumerate() {
        if r > 0 {
            shifted = WaveForm::z_plus_d(&shifted);
        }
        for (&pw, x) in &shifted {
            add_coeff(&mut numer, pw, x.clone() * c.clone());
        }
    }
    let wr_g = cof[n].clone();
    let wave_w = WaveForm { numer, denom: wave_v.denom.clone() * wr_g.clone(), g: wave_v.g.clone() * g.clone() };

    let mut tau = tau_v.mul(&TauForm::factor(wr_g, 1)).mul(&TauForm::factor(wave_v.denom.clone(), -(n as i32)));
    if g != Poly::monomial(F::one(), n) {
        let ps = g.root_power_sums(nvars)?;
        tau = tau.mul(&TauForm::exponential(ps.into_iter().map(|x| -x).collect()));
    }
    let (tau_w, normalized) = tau.normalized(&x0)?;
    if !normalized {
        notes.push("unnormalized: tau vanishes at the base point".into());
    }

    let l_w = l_v.as_ref().and_then(|l| conjugate(&p, l).ok());
    Ok(DarbouxTransform {
        plane,
        nvars,
        kernel: Some(kd),
        g,
        f,
        h,
        p,
        q,
        l_v,
        l_w,
        wave_w,
        tau_w,
        normalized,
        notes,
    })
}

impl<F: Field> DarbouxTransform<F> {
    pub fn n(&self) -> usize {
        self.g.deg()
    }

    pub fn is_forward_only(&self) -> bool {
        self.f.is_none()
    }

    /// The plane W as a base for further transforms.
    pub fn target_plane(&self) -> PlaneSpec<F> {
        PlaneSpec::transformed(self.clone())
    }
}

impl<F: Field> KernelSpec<F> {
    /// The conditions c_k = Σ_i a_ki ∂_z^{k_i}|_{z_i} dual to the rows of A.
    pub fn conditions(&self, n: u32, m: u32) -> Result<Vec<Condition<F>>> {
        let layout = kernel_layout(&self.points, n);
        let mut out = Vec::new();
        for row in &self.matrix {
            let mut pts = Vec::new();
            for (a, &(i, j, k)) in row.iter().zip(&layout) {
                if a.is_zero() {
                    continue;
                }
                let z = root_of_unity::<F>(n, j, m)? * self.points[i].0.clone();
                let mut alphas = vec![F::zero(); k as usize + 1];
                alphas[k as usize] = a.clone();
                pts.push(crate::expfun::ConditionPoint { lambda: z, alphas });
            }
            out.push(Condition::new(pts)?);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Routes to Ψ_W and τ_W
// ---------------------------------------------------------------------------

fn check_orders<F: Field>(t: &DarbouxTransform<F>, orders: &TruncOrders) -> Result<()> {
    if orders.t_var_count > t.nvars {
        return Err(Error::OrderMismatch(format!(
            "transform carries {} times, {} requested",
            t.nvars, orders.t_var_count
        )));
    }
    Ok(())
}

fn kernel_of<F: Field>(t: &DarbouxTransform<F>) -> Result<&KernelData<F>> {
    t.kernel
        .as_ref()
        .ok_or_else(|| Error::Unsupported("composite transforms carry no kernel data".into()))
}

fn is_z_power<F: Field>(g: &Poly<F>) -> bool {
    *g == Poly::monomial(F::one(), g.deg())
}

fn deeper(orders: &TruncOrders, extra: u32) -> TruncOrders {
    TruncOrders { t_weight_bound: orders.t_weight_bound + extra, ..*orders }
}

/// Ψ_W = Wr(f, Ψ_V) / (g Wr(f)), from the closed form.
pub fn psi_wronskian<F: Field>(t: &DarbouxTransform<F>, orders: &TruncOrders) -> Result<WaveFunction<F>> {
    check_orders(t, orders)?;
    let x0 = &t.plane.base_point;
    Ok(WaveFunction::new(t.wave_w.tail_series(orders, x0)?, x0.clone()))
}

/// Ψ_W = Σ_I det A^I Wr(Φ_I, Ψ_V) / (g Σ_I det A^I Wr(Φ_I)), over the n-subsets
/// I of the kernel basis in lexicographic order, at the series level.
pub fn psi_superposition<F: Field>(t: &DarbouxTransform<F>, orders: &TruncOrders) -> Result<WaveFunction<F>> {
    check_orders(t, orders)?;
    let kd = kernel_of(t)?;
    let n = t.n();
    let x0 = &t.plane.base_point;
    let nv = orders.t_var_count;
    let deep = deeper(orders, n as u32);
    let bound = deep.t_weight_bound as i32;
    let phis: Vec<TruncatedSeries<F>> =
        kd.basis.iter().map(|b| b.function.to_series(nv, bound, x0)).collect::<Result<_>>()?;
    let tail_v = t.plane.wave_form(t.nvars)?.tail_series(&deep, x0)?;
    let mut shifted = vec![tail_v];
    for _ in 0..n {
        let next = shifted.last().unwrap().z_plus_d();
        shifted.push(next);
    }
    let mut num: Option<LaurentTail<F>> = None;
    let mut den = TruncatedSeries::zero(nv, bound);
    for (c, subset) in minors(&kd.spec.matrix, kd.basis.len(), n)? {
        let fs: Vec<TruncatedSeries<F>> = subset.iter().map(|&i| phis[i].clone()).collect();
        let cof = wronskian_cofactors(&fs, TruncatedSeries::one(nv, bound));
        let mut term: Option<LaurentTail<F>> = None;
        for (r, cr) in cof.iter().enumerate() {
            let x = shifted[r].mul_series(&cr.scale(&c));
            term = Some(match term {
                None => x,
                Some(a) => a + x,
            });
        }
        let term = term.expect("n + 1 cofactors");
        num = Some(match num {
            None => term,
            Some(a) => a + term,
        });
        den = den + cof[n].scale(&c);
    }
    let num = num.ok_or_else(|| Error::DegenerateSpectralData("every maximal minor of A vanishes".into()))?;
    if den.constant_term().is_zero() {
        return Err(Error::NonUnitSeries);
    }
    let tail = num.mul_series(&den.invert()?).div_zpoly(&t.g)?;
    Ok(WaveFunction::new(tail.restrict(orders).truncate(orders.low(), orders.t_weight_bound as i32), x0.clone()))
}

/// (det A^I, I) for the n-subsets I with nonzero minor, lexicographically.
fn minors<F: Field>(a: &Matrix<F>, dim: usize, n: usize) -> Result<Vec<(F, Vec<usize>)>> {
    let mut out = Vec::new();
    for s in linalg::subsets(dim, n) {
        let sub: Matrix<F> = a.iter().map(|row| s.iter().map(|&i| row[i].clone()).collect()).collect();
        let d = linalg::det(&sub)?;
        if !d.is_zero() {
            out.push((d, s));
        }
    }
    Ok(out)
}

/// τ_W = Wr(f_k(t)) / Wr(f_k(0)) · τ_V; only for g = z^n.
pub fn tau_wronskian<F: Field>(t: &DarbouxTransform<F>, orders: &TruncOrders) -> Result<TruncatedSeries<F>> {
    check_orders(t, orders)?;
    if !is_z_power(&t.g) {
        return Err(Error::Unsupported("the Wronskian tau route needs g = z^n; use tau_superposition".into()));
    }
    t.tau_w.to_series(orders.t_var_count, orders.t_weight_bound as i32, &t.plane.base_point)
}

/// Σ_I det A^I Wr(Φ_I(t)) · τ_V(t), normalized at the base point when
/// possible. For g ≠ z^n the factor e^{−Σ p_k(g) t_k} is applied, p_k the
/// power sums of the roots of g. The flag reports normalization.
pub fn tau_superposition<F: Field>(
    t: &DarbouxTransform<F>,
    orders: &TruncOrders,
) -> Result<(TruncatedSeries<F>, bool)> {
    check_orders(t, orders)?;
    let kd = kernel_of(t)?;
    let n = t.n();
    let x0 = &t.plane.base_point;
    let nv = orders.t_var_count;
    let bound = (orders.t_weight_bound + n as u32) as i32;
    let phis: Vec<TruncatedSeries<F>> =
        kd.basis.iter().map(|b| b.function.to_series(nv, bound, x0)).collect::<Result<_>>()?;
    let mut sum = TruncatedSeries::zero(nv, bound);
    for (c, subset) in minors(&kd.spec.matrix, kd.basis.len(), n)? {
        let fs: Vec<TruncatedSeries<F>> = subset.iter().map(|&i| phis[i].clone()).collect();
        sum = sum + wronskian(&fs, TruncatedSeries::one(nv, bound)).scale(&c);
    }
    let mut tau = sum * t.plane.tau_form(t.nvars)?.to_series(nv, bound, x0)?;
    if !is_z_power(&t.g) {
        let ps: Vec<F> = t.g.root_power_sums(nv)?.into_iter().map(|x| -x).collect();
        tau = tau * TruncatedSeries::exp_linear(&ps, bound);
    }
    let tau = tau.truncate(orders.t_weight_bound as i32);
    let c = tau.constant_term();
    if c.is_zero() {
        return Ok((tau, false));
    }
    Ok((tau.scale(&c.try_inv()?), true))
}

/// Wr(f_k(x)) / Wr(f_k(x₀)) · τ_V(x) as a series in the single time x − x₀.
pub fn tau_x_only<F: Field>(t: &DarbouxTransform<F>, bound: u32) -> Result<TruncatedSeries<F>> {
    if !is_z_power(&t.g) {
        return Err(Error::Unsupported("the Wronskian tau route needs g = z^n; use tau_superposition".into()));
    }
    let kd = kernel_of(t)?;
    let x0 = &t.plane.base_point;
    let w = wronskian(&kd.x_functions()?, ExpPolyFraction::one()) * t.plane.tau_form(t.nvars)?.restrict_x()?;
    let v = w.eval(x0)?;
    let w = if v.is_zero() { w } else { w.scale(&v.try_inv()?) };
    w.to_series(1, bound as i32, x0)
}

/// (1/f) Q Ψ_W in the single time x − x₀: should reproduce Ψ_V.
pub fn apply_inverse<F: Field>(t: &DarbouxTransform<F>, orders: &TruncOrders) -> Result<LaurentTail<F>> {
    let (f, q) = match (&t.f, &t.q) {
        (Some(f), Some(q)) => (f, q),
        _ => return Err(Error::Precondition("forward-only transform has no inverse".into())),
    };
    let x0 = &t.plane.base_point;
    let o = TruncOrders { t_var_count: 1, ..deeper(orders, q.order() as u32) };
    let deep = TruncOrders { z_neg_bound: o.z_neg_bound + f.deg() as u32, ..o };
    let psi = t.wave_w.tail_series(&deep, x0)?;
    let out = q.apply_to_tail(&psi, x0)?.div_zpoly(f)?;
    Ok(out.truncate(orders.low(), orders.t_weight_bound as i32))
}

// ---------------------------------------------------------------------------
// Spectral algebra
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralAlgebra<F: Field> {
    /// Row-reduced basis of A_W ∩ C[z^N] up to the degree bound, ascending.
    pub basis: Vec<Poly<F>>,
    /// gcd of the nonconstant degrees; 0 when there are none.
    pub rank: u32,
    /// (u, L_u) with L_u Ψ_W = u(z) Ψ_W, for the nonconstant basis elements.
    pub operators: Vec<(Poly<F>, DiffOp<F>)>,
    pub deg_bound: usize,
}

/// A_W with the operators L_u for its nonconstant basis elements.
pub fn spectral_algebra<F: Field>(t: &DarbouxTransform<F>, deg_bound: usize) -> Result<SpectralAlgebra<F>> {
    let mut alg = spectral_basis(t, deg_bound)?;
    if let Some(l) = &t.l_v {
        let nr = t.plane.n_reduction as usize;
        let fx = kernel_of(t)?.x_functions()?;
        for u in alg.basis.iter().filter(|p| p.deg() > 0) {
            let uw = Poly::new(u.coeffs().iter().step_by(nr).cloned().collect());
            let op = exact_right_divide(&t.p.compose(&DiffOp::poly_of(&uw, l)), &t.p, &fx)
                .map_err(|e| Error::KernelNotInvariant(format!("u = {u}: {e}")))?;
            alg.operators.push((u.clone(), op));
        }
    }
    Ok(alg)
}

/// A_W without operators. u ∈ C[z^N] lies in A_W iff u(M) maps the row
/// space of A into itself, M the matrix of L_V on the ambient kernel.
pub fn spectral_basis<F: Field>(t: &DarbouxTransform<F>, deg_bound: usize) -> Result<SpectralAlgebra<F>> {
    let kd = kernel_of(t)?;
    let nr = t.plane.n_reduction as usize;
    let lmax = deg_bound / nr;
    let dim = kd.basis.len();
    let mut rows: Matrix<F> = Vec::new();
    if t.n() > 0 && dim > t.n() {
        let m = kd.spec.l_matrix(nr as u32, t.plane.cyclotomic)?;
        let ys = linalg::nullspace(&kd.spec.matrix, dim)?;
        for a in &kd.spec.matrix {
            let mut powers = vec![a.clone()];
            for _ in 0..lmax {
                let next = linalg::mat_vec(&m, powers.last().unwrap());
                powers.push(next);
            }
            for y in &ys {
                rows.push(powers.iter().map(|v| dot(y, v)).collect());
            }
        }
    }
    let ns = if rows.iter().all(|r| r.iter().all(|x| x.is_zero())) {
        linalg::identity(lmax + 1)
    } else {
        linalg::nullspace(&rows, lmax + 1)?
    };
    let vecs: Vec<Vec<F>> = ns
        .iter()
        .map(|v| {
            let mut z = vec![F::zero(); lmax * nr + 1];
            for (l, c) in v.iter().enumerate() {
                z[l * nr] = c.clone();
            }
            z
        })
        .collect();
    let basis = crate::plane::canonical_poly_basis(&vecs);
    let rank = basis.iter().map(|p| p.deg() as u32).filter(|&d| d > 0).fold(0, crate::scalar::gcd_u32);
    Ok(SpectralAlgebra { basis, rank, operators: Vec::new(), deg_bound })
}

fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

// ---------------------------------------------------------------------------
// Composition and inversion
// ---------------------------------------------------------------------------

/// T₂ ∘ T₁ for T₂ built over the plane reached by T₁.
pub fn compose_transforms<F: Field>(
    t1: &DarbouxTransform<F>,
    t2: &DarbouxTransform<F>,
) -> Result<DarbouxTransform<F>> {
    let chained = match &t2.plane.kind {
        BaseKind::Transformed(b) => b.wave_w == t1.wave_w && b.tau_w == t1.tau_w && b.nvars == t1.nvars,
        _ => false,
    };
    if !chained {
        return Err(Error::Precondition("the second transform must be built over the plane of the first".into()));
    }
    let f = match (&t1.f, &t2.f) {
        (Some(a), Some(b)) => Some(a.clone() * b.clone()),
        _ => None,
    };
    let q = match (&t1.q, &t2.q) {
        (Some(a), Some(b)) => Some(a.compose(b)),
        _ => None,
    };
    let mut notes = t1.notes.clone();
    notes.extend(t2.notes.iter().cloned());
    Ok(DarbouxTransform {
        plane: t1.plane.clone(),
        nvars: t1.nvars,
        kernel: None,
        g: t1.g.clone() * t2.g.clone(),
        f,
        h: t1.h.clone() * t2.h.clone(),
        p: t2.p.compose(&t1.p),
        q,
        l_v: t1.l_v.clone(),
        l_w: t2.l_w.clone(),
        wave_w: t2.wave_w.clone(),
        tau_w: t2.tau_w.clone(),
        normalized: t2.normalized,
        notes,
    })
}

/// W → V with the roles of (P, g) and (Q, f) exchanged.
pub fn inverse<F: Field>(t: &DarbouxTransform<F>) -> Result<DarbouxTransform<F>> {
    let (f, q) = match (&t.f, &t.q) {
        (Some(f), Some(q)) => (f.clone(), q.clone()),
        _ => return Err(Error::Precondition("forward-only transform has no inverse".into())),
    };
    let x0 = &t.plane.base_point;
    let (tau_w, normalized) = t.plane.tau_form(t.nvars)?.normalized(x0)?;
    Ok(DarbouxTransform {
        plane: t.target_plane(),
        nvars: t.nvars,
        kernel: None,
        g: f,
        f: Some(t.g.clone()),
        h: t.h.clone(),
        p: q,
        q: Some(t.p.clone()),
        l_v: t.l_w.clone(),
        l_w: t.l_v.clone(),
        wave_w: t.plane.wave_form(t.nvars)?,
        tau_w,
        normalized,
        notes: t.notes.clone(),
    })
}
