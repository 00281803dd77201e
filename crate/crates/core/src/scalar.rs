//! Exact coefficient fields.
//!
//! Everything in the engine is generic over [`Field`]. Two implementations are
//! provided: [`BigRational`] for plain rationals and [`Cyclotomic`] for
//! elements of Q(ζ_m), stored as polynomials in ζ reduced modulo the m-th
//! cyclotomic polynomial.
//!
//! The `Ord` bound is not the field order (cyclotomic fields have none). It is
//! a total order compatible with addition, used for canonical keys and as the
//! frequency order in exponential polynomials.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub trait Field:
    Clone
    + fmt::Debug
    + fmt::Display
    + Eq
    + Ord
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: BigRational) -> Self;

    fn try_inv(&self) -> Result<Self>;

    /// ζ_m^k, failing when the implementation cannot represent it.
    fn root_of_unity(m: u32, k: u32) -> Result<Self>;

    /// The value as a rational, when it lies in Q.
    fn to_rational(&self) -> Option<BigRational>;

    /// Cyclotomic index of the representation (1 for rationals).
    fn field_index(&self) -> u32 {
        1
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.try_inv()?)
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not an exact rational: `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

impl Field for BigRational {
    fn from_rational(q: BigRational) -> Self {
        q
    }

    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }

    fn root_of_unity(m: u32, k: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("cyclotomic index must be positive".into()));
        }
        let k = k % m;
        if k == 0 {
            Ok(Self::one())
        } else if 2 * k == m {
            Ok(-Self::one())
        } else {
            Err(Error::RootOfUnity { order: m, power: k, index: 1 })
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic polynomials
// ---------------------------------------------------------------------------

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of Φ_m (ascending, monic). Computed as (x^m − 1) / Π_{d|m, d<m} Φ_d.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<i64>> {
    assert!(m > 0, "cyclotomic index must be positive");
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let den = cyclotomic_polynomial(d);
            num = exact_int_div(&num, &den);
        }
    }
    let p = Arc::new(num);
    cyclotomic_cache().lock().unwrap().insert(m, p.clone());
    p
}

fn exact_int_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    q
}

pub fn euler_phi(m: u32) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

// ---------------------------------------------------------------------------
// Cyclotomic field elements
// ---------------------------------------------------------------------------

/// An element of Q(ζ_m).
///
/// Canonical form: rational values always use `m = 1`; otherwise `coeffs`
/// has no trailing zeros and length at most φ(m). Equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    m: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn rational(q: BigRational) -> Self {
        let coeffs = if q.is_zero() { Vec::new() } else { vec![q] };
        Cyclotomic { m: 1, coeffs }
    }

    /// Builds Σ c_i ζ_m^i, reducing modulo Φ_m.
    pub fn from_coeffs(m: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("cyclotomic index must be positive".into()));
        }
        Ok(Self::reduce(m, coeffs))
    }

    /// ζ_m itself.
    pub fn zeta(m: u32) -> Self {
        Self::reduce(m, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn index(&self) -> u32 {
        self.m
    }

    /// Inverse of `Display`: a rational `p/q`, or a sum of terms `c`,
    /// `c*zeta{m}`, `c*zeta{m}^i`, optionally parenthesized. Every ζ must use
    /// the index `m`.
    pub fn parse(s: &str, m: u32) -> Result<Self> {
        let bad = || Error::Invalid(format!("not an exact scalar: `{s}`"));
        let body = s.trim();
        let body = match body.strip_prefix('(') {
            Some(b) => b.strip_suffix(')').ok_or_else(bad)?,
            None => body,
        };
        if !body.contains("zeta") {
            return Ok(Self::rational(parse_rational(body)?));
        }
        let mut coeffs = Vec::new();
        for term in body.split(" + ") {
            let (c, power) = match term.split_once("zeta") {
                None => (parse_rational(term)?, 0usize),
                Some((c, z)) => {
                    let c = match c.trim() {
                        "" => BigRational::one(),
                        "-" => -BigRational::one(),
                        c => parse_rational(c.strip_suffix('*').ok_or_else(bad)?)?,
                    };
                    let (idx, power) = match z.split_once('^') {
                        Some((i, p)) => (i, p.trim().parse::<usize>().map_err(|_| bad())?),
                        None => (z, 1),
                    };
                    if idx.trim().parse::<u32>().map_err(|_| bad())? != m {
                        return Err(Error::FieldMismatch(idx.trim().parse().unwrap_or(0), m));
                    }
                    (c, power)
                }
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigRational::zero());
            }
            coeffs[power] += c;
        }
        Self::from_coeffs(m, coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.m == 1
    }

    fn reduce(m: u32, mut c: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        while c.len() > deg {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - deg;
            for (j, pj) in phi.iter().take(deg).enumerate() {
                if *pj != 0 {
                    c[shift + j] -= top.clone() * BigRational::from_integer(BigInt::from(*pj));
                }
            }
        }
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        let m = if c.len() <= 1 { 1 } else { m };
        Cyclotomic { m, coeffs: c }
    }

    fn common_index(a: u32, b: u32) -> Result<u32> {
        match (a, b) {
            (1, x) | (x, 1) => Ok(x),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(Error::FieldMismatch(x, y)),
        }
    }

    fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let m = Self::common_index(self.m, rhs.m)?;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Ok(Self::reduce(m, c))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&-rhs.clone())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let m = Self::common_index(self.m, rhs.m)?;
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Ok(Self::zero());
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a.clone() * b.clone();
            }
        }
        Ok(Self::reduce(m, c))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Self::common_index(self.m, rhs.m)?;
        self.checked_mul(&rhs.try_inv()?)
    }

    /// Padded coefficient vector of length φ(m).
    fn padded(&self, m: u32) -> Vec<BigRational> {
        let n = if m == 1 { 1 } else { euler_phi(m) };
        (0..n).map(|i| self.coeff(i)).collect()
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { m: 1, coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
}

impl Add for Cyclotomic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("cyclotomic addition")
    }
}

impl Sub for Cyclotomic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("cyclotomic subtraction")
    }
}

impl Mul for Cyclotomic {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("cyclotomic multiplication")
    }
}

impl Neg for Cyclotomic {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic { m: self.m, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl PartialOrd for Cyclotomic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cyclotomic {
    /// Lexicographic on the coefficient vector padded to the common φ(m);
    /// elements of unrelated fields are ordered by index.
    fn cmp(&self, other: &Self) -> Ordering {
        match Self::common_index(self.m, other.m) {
            Ok(m) => self.padded(m).cmp(&other.padded(m)),
            Err(_) => self.m.cmp(&other.m),
        }
    }
}

impl Field for Cyclotomic {
    fn from_rational(q: BigRational) -> Self {
        Self::rational(q)
    }

    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.m == 1 {
            return Ok(Self::rational(self.coeffs[0].recip()));
        }
        // Solve a·u = 1 in the basis 1, ζ, …, ζ^{φ-1}.
        let n = euler_phi(self.m);
        let mut cols = Vec::with_capacity(n);
        let mut basis = Self::one();
        let zeta = Self::zeta(self.m);
        for _ in 0..n {
            cols.push(self.clone().checked_mul(&basis)?.padded(self.m));
            basis = basis.checked_mul(&zeta)?;
        }
        let mut mat = vec![vec![BigRational::zero(); n]; n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                mat[i][j] = col[i].clone();
            }
        }
        let mut rhs = vec![BigRational::zero(); n];
        rhs[0] = BigRational::one();
        let u = crate::linalg::solve(&mat, &rhs)?.ok_or(Error::DivisionByZero)?;
        Ok(Self::reduce(self.m, u))
    }

    fn root_of_unity(m: u32, k: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("cyclotomic index must be positive".into()));
        }
        let k = (k % m) as usize;
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Ok(Self::reduce(m, c))
    }

    fn to_rational(&self) -> Option<BigRational> {
        if self.m == 1 {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    fn field_index(&self) -> u32 {
        self.m
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            let q = self.coeff(0);
            if q.is_integer() {
                return write!(f, "{}", q.numer());
            }
            return write!(f, "{}/{}", q.numer(), q.denom());
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = if c.is_integer() {
                c.numer().to_string()
            } else {
                format!("{}/{}", c.numer(), c.denom())
            };
            parts.push(match i {
                0 => cs,
                1 => format!("{cs}*zeta{}", self.m),
                _ => format!("{cs}*zeta{}^{i}", self.m),
            });
        }
        write!(f, "({})", parts.join(" + "))
    }
}

/// Integer gcd used for rank computations.
pub fn gcd_u32(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

pub(crate) fn binomial<F: Field>(n: i64, k: u32) -> F {
    // Generalized binomial n(n-1)…(n-k+1)/k!, valid for negative n.
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    F::from_rational(BigRational::new(num, den))
}

pub(crate) fn factorial<F: Field>(n: u32) -> F {
    let mut acc = BigInt::one();
    for i in 2..=n as i64 {
        acc *= BigInt::from(i);
    }
    F::from_rational(BigRational::from_integer(acc))
}
