//! Planes of the Grassmannian at finite truncation: base planes, admissible
//! bases read off wave functions, and membership tests.
//!
//! A plane is represented by the echelon basis w_j = z^j + (lower powers),
//! j = 0..=J, each known down to some z-power. Membership of a vector is
//! decided by reducing its non-negative part against the basis; the vector
//! lies in the plane iff the remaining negative part vanishes on the known
//! range. Every verdict carries that range.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::darboux::{DarbouxTransform, TauForm};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::expfun::{apply_condition_numer, Condition, ExpPolyT, WaveForm};
use crate::fraction::ExpPolyFraction;
use crate::linalg;
use crate::mpoly::MPoly;
use crate::poly::Poly;
use crate::scalar::Field;
use crate::series::{LaurentTail, TruncOrders, WaveFunction};

#[derive(Clone, Debug)]
pub enum BaseKind<F: Field> {
    HPlus,
    PolyTau(MPoly<F>),
    Transformed(Box<DarbouxTransform<F>>),
}

#[derive(Clone, Debug)]
pub struct PlaneSpec<F: Field> {
    pub kind: BaseKind<F>,
    /// N with z^N in the spectral algebra of the plane.
    pub n_reduction: u32,
    pub base_point: F,
    /// Cyclotomic index m; a multiple of N.
    pub cyclotomic: u32,
    pub unnormalized: bool,
}

impl<F: Field> PlaneSpec<F> {
    pub fn h_plus(n_reduction: u32) -> Self {
        PlaneSpec { kind: BaseKind::HPlus, n_reduction, base_point: F::zero(), cyclotomic: n_reduction.max(1), unnormalized: false }
    }

    pub fn poly_tau(tau: MPoly<F>, n_reduction: u32, base_point: F) -> Self {
        PlaneSpec {
            kind: BaseKind::PolyTau(tau),
            n_reduction,
            base_point,
            cyclotomic: n_reduction.max(1),
            unnormalized: false,
        }
    }

    /// The plane reached by a transform, as a base for the next one.
    pub fn transformed(t: DarbouxTransform<F>) -> Self {
        let v = &t.plane;
        PlaneSpec {
            n_reduction: v.n_reduction,
            base_point: v.base_point.clone(),
            cyclotomic: v.cyclotomic,
            unnormalized: v.unnormalized,
            kind: BaseKind::Transformed(Box::new(t)),
        }
    }

    pub fn wave_form(&self, nvars: usize) -> Result<WaveForm<F>> {
        match &self.kind {
            BaseKind::HPlus => Ok(WaveForm::h_plus(nvars)),
            BaseKind::PolyTau(tau) => Ok(WaveForm::from_tau(&tau.with_nvars(nvars))),
            BaseKind::Transformed(t) => {
                if t.nvars != nvars {
                    return Err(Error::OrderMismatch(format!(
                        "base transform built with {} times, requested {nvars}",
                        t.nvars
                    )));
                }
                Ok(t.wave_w.clone())
            }
        }
    }

    pub fn tau_form(&self, nvars: usize) -> Result<TauForm<F>> {
        match &self.kind {
            BaseKind::HPlus => Ok(TauForm::one(nvars)),
            BaseKind::PolyTau(tau) => Ok(TauForm::factor(ExpPolyT::from_mpoly(tau.with_nvars(nvars)), 1)),
            BaseKind::Transformed(t) => Ok(t.tau_w.clone()),
        }
    }

    /// The operator L_V with L_V Ψ_V = z^N Ψ_V.
    pub fn l_operator(&self) -> Result<DiffOp<F>> {
        let n = self.n_reduction as usize;
        match &self.kind {
            BaseKind::HPlus => Ok(DiffOp::d_pow(n)),
            BaseKind::PolyTau(tau) => solve_l_operator(&WaveForm::from_tau(tau), n),
            BaseKind::Transformed(t) => t
                .l_w
                .clone()
                .ok_or_else(|| Error::Precondition("z^N is not in the spectral algebra of the transformed plane".into())),
        }
    }

    /// Ψ_V(t, z) as a series tail about the base point.
    pub fn base_wave(&self, orders: &TruncOrders) -> Result<WaveFunction<F>> {
        let wf = self.wave_form(orders.t_var_count.max(self.min_nvars()))?;
        let d0 = wf.denom.eval_base(&self.base_point)?;
        if d0.is_zero() && !self.unnormalized {
            return Err(Error::NotNormalized);
        }
        let tail = wf.tail_series(orders, &self.base_point)?;
        Ok(WaveFunction::new(tail, self.base_point.clone()))
    }

    fn min_nvars(&self) -> usize {
        match &self.kind {
            BaseKind::Transformed(t) => t.nvars,
            _ => 1,
        }
    }
}

/// Solves (z+∂)^N w + Σ_{j<N} u_j (z+∂)^j w = z^N w for the coefficients u_j of
/// L = ∂^N + Σ u_j ∂^j, from the top z-power down, and checks every remaining
/// power vanishes. The tail w = numer/denom must be a finite Laurent polynomial.
pub fn solve_l_operator<F: Field>(wave: &WaveForm<F>, n: usize) -> Result<DiffOp<F>> {
    if !wave.g.is_one() {
        return Err(Error::Unsupported("operator of a plane with a z-denominator".into()));
    }
    let den = wave.denom.restrict_x();
    let mut w: BTreeMap<i32, ExpPolyFraction<F>> = BTreeMap::new();
    for (&p, c) in &wave.numer {
        w.insert(p, ExpPolyFraction::new(c.restrict_x(), den.clone())?);
    }
    // T[j] = (z+∂)^j w as z-power → coefficient
    let mut t: Vec<BTreeMap<i32, ExpPolyFraction<F>>> = vec![w.clone()];
    for _ in 0..n {
        let prev = t.last().unwrap();
        let mut next: BTreeMap<i32, ExpPolyFraction<F>> = BTreeMap::new();
        for (&p, c) in prev {
            add_frac(&mut next, p + 1, c.clone());
            add_frac(&mut next, p, c.derivative());
        }
        t.push(next);
    }
    let mut resid = t[n].clone();
    for (&p, c) in &w {
        add_frac(&mut resid, p + n as i32, -c.clone());
    }
    let mut u = vec![ExpPolyFraction::zero(); n + 1];
    u[n] = ExpPolyFraction::one();
    for j in (0..n).rev() {
        let c = resid.get(&(j as i32)).cloned().unwrap_or_else(ExpPolyFraction::zero);
        let uj = -c;
        for (&p, tc) in &t[j] {
            add_frac(&mut resid, p, uj.clone() * tc.clone());
        }
        u[j] = uj;
    }
    if let Some((p, _)) = resid.iter().find(|(_, c)| !c.is_zero()) {
        return Err(Error::Precondition(format!(
            "z^{n} is not in the spectral algebra of the base plane (residual at z^{p})"
        )));
    }
    Ok(DiffOp::new(u))
}

fn add_frac<F: Field>(m: &mut BTreeMap<i32, ExpPolyFraction<F>>, p: i32, c: ExpPolyFraction<F>) {
    let s = match m.remove(&p) {
        Some(old) => old + c,
        None => c,
    };
    if !s.is_zero() {
        m.insert(p, s);
    }
}

// ---------------------------------------------------------------------------
// Scalar Laurent vectors and truncated planes
// ---------------------------------------------------------------------------

/// Σ c_p z^p with scalar coefficients, known for p ≥ `low`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentVec<F: Field> {
    pub low: i32,
    pub coeffs: BTreeMap<i32, F>,
}

impl<F: Field> LaurentVec<F> {
    pub fn zero(low: i32) -> Self {
        LaurentVec { low, coeffs: BTreeMap::new() }
    }

    pub fn monomial(p: i32, low: i32) -> Self {
        let mut v = Self::zero(low);
        v.add(p, F::one());
        v
    }

    /// Constant terms of a series tail: the vector at t = base point.
    pub fn from_tail(tail: &LaurentTail<F>) -> Self {
        let mut v = Self::zero(tail.low());
        for (&p, s) in tail.coeffs() {
            if s.bound() < 0 {
                v.low = v.low.max(p + 1);
            }
            v.add(p, s.constant_term());
        }
        v.coeffs.retain(|&p, _| p >= v.low);
        v
    }

    pub fn add(&mut self, p: i32, c: F) {
        if p < self.low || c.is_zero() {
            return;
        }
        let s = self.coeffs.remove(&p).map_or(c.clone(), |o| o + c);
        if !s.is_zero() {
            self.coeffs.insert(p, s);
        }
    }

    pub fn coeff(&self, p: i32) -> F {
        self.coeffs.get(&p).cloned().unwrap_or_else(F::zero)
    }

    pub fn top(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn axpy(&self, a: &F, other: &Self) -> Self {
        let mut out = Self::zero(self.low.max(other.low));
        for (&p, c) in &self.coeffs {
            out.add(p, c.clone());
        }
        for (&p, c) in &other.coeffs {
            out.add(p, a.clone() * c.clone());
        }
        out
    }

    pub fn scale(&self, a: &F) -> Self {
        Self::zero(self.low).axpy(a, self)
    }

    pub fn mul_zpoly(&self, f: &Poly<F>) -> Self {
        let mut out = Self::zero(self.low + f.deg() as i32);
        for (i, c) in f.coeffs().iter().enumerate() {
            for (&p, x) in &self.coeffs {
                out.add(p + i as i32, c.clone() * x.clone());
            }
        }
        out
    }

    /// Division by g(z), expanding 1/g in z⁻¹; the known range drops by deg g.
    pub fn div_zpoly(&self, g: &Poly<F>) -> Result<Self> {
        let n = g.deg() as i32;
        let lead = g.lead().try_inv()?;
        let mut rem = self.clone();
        let mut out = Self::zero(self.low - n);
        while let Some(top) = rem.top() {
            let c = rem.coeff(top) * lead.clone();
            let p = top - n;
            if p < out.low {
                break;
            }
            out.add(p, c.clone());
            for (i, gi) in g.coeffs().iter().enumerate() {
                rem.add(p + i as i32, -(c.clone() * gi.clone()));
            }
            rem.coeffs.retain(|&q, _| q < top);
        }
        Ok(out)
    }
}

impl<F: Field> fmt::Display for LaurentVec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().rev().map(|(p, c)| format!("{c}*z^{p}")).collect();
        write!(f, "{} + O(z^{})", if parts.is_empty() { "0".into() } else { parts.join(" + ") }, self.low - 1)
    }
}

/// Echelon basis w_j = z^j + lower powers, j = 0..=J.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPlane<F: Field> {
    pub basis: Vec<LaurentVec<F>>,
}

/// Outcome of one membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership<F: Field> {
    /// Reduced to zero on z-powers ≥ low.
    In { low: i32 },
    /// Residual coefficient at the given power.
    Out { power: i32, value: F },
    /// Needs basis vectors beyond the truncation, or no negative power is known.
    Untestable,
}

impl<F: Field> TruncatedPlane<F> {
    /// w_j = ∂_x^j Ψ|_{x = x₀}, j = 0..=J, then fully row-reduced.
    pub fn admissible_basis(tail: &LaurentTail<F>, j_max: usize) -> Result<Self> {
        let mut cur = tail.clone();
        let mut basis = Vec::with_capacity(j_max + 1);
        for j in 0..=j_max {
            if j > 0 {
                cur = cur.z_plus_d();
            }
            let v = LaurentVec::from_tail(&cur);
            if v.top() != Some(j as i32) || !v.coeff(j as i32).is_one() {
                return Err(Error::NotNormalized);
            }
            basis.push(v);
        }
        Ok(Self::from_echelon(basis))
    }

    /// Clears every coefficient of z^i (0 ≤ i < j) in w_j using w_i.
    pub fn from_echelon(mut basis: Vec<LaurentVec<F>>) -> Self {
        for j in 0..basis.len() {
            for i in (0..j).rev() {
                let c = basis[j].coeff(i as i32);
                if !c.is_zero() {
                    basis[j] = basis[j].axpy(&-c, &basis[i]);
                }
            }
        }
        TruncatedPlane { basis }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Negative part of v after reducing against the basis, or `None` when v
    /// has powers beyond the basis.
    pub fn residual(&self, v: &LaurentVec<F>) -> Option<LaurentVec<F>> {
        let mut r = v.clone();
        let top = r.top().unwrap_or(-1);
        if top >= self.basis.len() as i32 {
            return None;
        }
        for p in (0..=top.max(-1)).rev() {
            let c = r.coeff(p);
            if !c.is_zero() {
                r = r.axpy(&-c, &self.basis[p as usize]);
            }
        }
        Some(r)
    }

    pub fn membership(&self, v: &LaurentVec<F>) -> Membership<F> {
        match self.residual(v) {
            None => Membership::Untestable,
            Some(r) if r.low >= 0 => Membership::Untestable,
            Some(r) => match r.coeffs.iter().next_back() {
                Some((&p, c)) => Membership::Out { power: p, value: c.clone() },
                None => Membership::In { low: r.low },
            },
        }
    }

    /// Compares two planes on their common basis indices and known range.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, i32, F, F)> {
        for (j, (a, b)) in self.basis.iter().zip(&other.basis).enumerate() {
            let low = a.low.max(b.low);
            let powers: std::collections::BTreeSet<i32> = a.coeffs.keys().chain(b.coeffs.keys()).copied().collect();
            for p in powers.into_iter().rev().filter(|&p| p >= low) {
                if a.coeff(p) != b.coeff(p) {
                    return Some((j, p, a.coeff(p), b.coeff(p)));
                }
            }
        }
        None
    }
}

/// Result of testing fV ⊂ W ⊂ (1/g)V on the truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionReport<F: Field> {
    /// (j, verdict) for f·v_j ∈ W.
    pub f_side: Vec<(usize, Membership<F>)>,
    /// (j, verdict) for g·w_j ∈ V.
    pub g_side: Vec<(usize, Membership<F>)>,
}

impl<F: Field> InclusionReport<F> {
    pub fn passed(&self) -> bool {
        self.f_side.iter().chain(&self.g_side).all(|(_, m)| !matches!(m, Membership::Out { .. }))
    }

    pub fn tested(&self) -> usize {
        self.f_side.iter().chain(&self.g_side).filter(|(_, m)| matches!(m, Membership::In { .. } | Membership::Out { .. })).count()
    }

    pub fn first_failure(&self) -> Option<(char, usize, i32, F)> {
        let side = |tag: char, xs: &[(usize, Membership<F>)]| {
            xs.iter().find_map(|(j, m)| match m {
                Membership::Out { power, value } => Some((tag, *j, *power, value.clone())),
                _ => None,
            })
        };
        side('f', &self.f_side).or_else(|| side('g', &self.g_side))
    }
}

pub fn check_inclusion<F: Field>(
    f: &Poly<F>,
    w: &TruncatedPlane<F>,
    g: &Poly<F>,
    v: &TruncatedPlane<F>,
) -> Result<InclusionReport<F>> {
    let f_side = v.basis.iter().enumerate().map(|(j, vj)| (j, w.membership(&vj.mul_zpoly(f)))).collect();
    let g_side = w.basis.iter().enumerate().map(|(j, wj)| (j, v.membership(&wj.mul_zpoly(g)))).collect();
    let r = InclusionReport { f_side, g_side };
    if r.tested() == 0 {
        return Err(Error::TruncationTooShallow("no basis vector can be tested".into()));
    }
    Ok(r)
}

/// Basis of W from the conditions: w_j = (1/g)(v_{j+n} − Σ_{i<n} (C₍ₙ₎⁻¹C)_{i,j+n} v_i),
/// where C_{kj} = ⟨c_k, v_j⟩ = f_k^{(j)}(x₀).
pub fn basis_from_conditions<F: Field>(
    fs: &[ExpPolyFraction<F>],
    x0: &F,
    g: &Poly<F>,
    v: &TruncatedPlane<F>,
) -> Result<TruncatedPlane<F>> {
    let n = fs.len();
    let jv = v.len();
    if jv < n {
        return Err(Error::TruncationTooShallow("fewer base vectors than conditions".into()));
    }
    let mut c: Vec<Vec<F>> = vec![Vec::with_capacity(jv); n];
    for (k, f) in fs.iter().enumerate() {
        let mut d = f.clone();
        for j in 0..jv {
            if j > 0 {
                d = d.derivative();
            }
            c[k].push(d.eval(x0)?);
        }
    }
    let cn: Vec<Vec<F>> = c.iter().map(|row| row[..n].to_vec()).collect();
    if n > 0 && linalg::det(&cn)?.is_zero() {
        return Err(Error::VanishingWronskian(x0.to_string()));
    }
    let mut basis = Vec::new();
    for j in 0..(jv - n) {
        let col: Vec<F> = c.iter().map(|row| row[j + n].clone()).collect();
        let y = if n == 0 { Vec::new() } else { linalg::solve(&cn, &col)?.ok_or(Error::DivisionByZero)? };
        let mut u = v.basis[j + n].clone();
        for (i, yi) in y.iter().enumerate() {
            u = u.axpy(&-yi.clone(), &v.basis[i]);
        }
        basis.push(u.div_zpoly(g)?);
    }
    Ok(TruncatedPlane::from_echelon(basis))
}

/// ⟨c_k, g(z)Ψ_W⟩ for each condition, as the exact numerators G_k of
/// f_k = G_k / denom. Every entry vanishes when W is cut out by the conditions.
pub fn conditions_annihilate<F: Field>(
    conds: &[Condition<F>],
    g: &Poly<F>,
    wave_w: &WaveForm<F>,
) -> Result<Vec<ExpPolyT<F>>> {
    let (quot, rem) = wave_w.g.div_rem(g)?;
    let gw = if rem.is_zero() {
        WaveForm { numer: wave_w.numer.clone(), denom: wave_w.denom.clone(), g: quot }
    } else {
        let mut numer = BTreeMap::new();
        for (&p, c) in &wave_w.numer {
            for (i, gi) in g.coeffs().iter().enumerate() {
                if !gi.is_zero() {
                    crate::expfun::add_coeff(&mut numer, p + i as i32, c.scale(gi));
                }
            }
        }
        WaveForm { numer, denom: wave_w.denom.clone(), g: wave_w.g.clone() }
    };
    conds.iter().map(|c| apply_condition_numer(c, &gw)).collect()
}

/// Polynomials u of degree ≤ `deg_bound` with u·W ⊂ W on the tested range;
/// returned in row-reduced form, pivots at the highest degree, ascending.
pub fn invariance_algebra<F: Field>(w: &TruncatedPlane<F>, deg_bound: usize) -> Result<Vec<Poly<F>>> {
    let jmax = w.len();
    if jmax <= deg_bound {
        return Err(Error::TruncationTooShallow(format!(
            "{jmax} basis vectors cannot test degree {deg_bound}"
        )));
    }
    // rows: constraints (basis index j, residual power p); columns: degree l
    let mut rows: BTreeMap<(usize, i32), Vec<F>> = BTreeMap::new();
    for (j, wj) in w.basis.iter().enumerate().take(jmax - deg_bound) {
        for l in 0..=deg_bound {
            let r = w.residual(&wj.mul_zpoly(&Poly::monomial(F::one(), l))).expect("degree within basis");
            for (&p, c) in &r.coeffs {
                rows.entry((j, p)).or_insert_with(|| vec![F::zero(); deg_bound + 1])[l] = c.clone();
            }
        }
    }
    let m: Vec<Vec<F>> = rows.into_values().collect();
    let ns = if m.is_empty() {
        linalg::identity(deg_bound + 1)
    } else {
        linalg::nullspace(&m, deg_bound + 1)?
    };
    Ok(canonical_poly_basis(&ns))
}

/// Row-reduces coefficient vectors (index = degree) with pivots at the
/// highest degree and returns the polynomials in ascending degree.
pub fn canonical_poly_basis<F: Field>(vs: &[Vec<F>]) -> Vec<Poly<F>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let width = vs[0].len();
    let mut rev: Vec<Vec<F>> = vs.iter().map(|v| v.iter().rev().cloned().collect()).collect();
    let pivots = linalg::rref(&mut rev).expect("exact field");
    let mut out: Vec<Poly<F>> = rev
        .into_iter()
        .take(pivots.len())
        .map(|r| Poly::new(r.into_iter().rev().collect()))
        .collect();
    out.sort_by_key(|p| p.deg());
    debug_assert!(out.iter().all(|p| p.deg() < width));
    out
}
