//! Serializable records of transforms, spectral algebras and reports.
//!
//! Records are built from ordered containers only, so identical inputs give
//! identical bytes. Scalars are written through `Display`, which
//! `Cyclotomic::parse` inverts.

use serde::Serialize;

use sato_darboux::darboux::{psi_wronskian, DarbouxTransform, SpectralAlgebra, TauForm};
use sato_darboux::diffop::DiffOp;
use sato_darboux::mpoly::{fmt_monomial, weight};
use sato_darboux::poly::Poly;
use sato_darboux::series::{LaurentTail, TruncOrders, TruncatedSeries};
use sato_darboux::verify::VerifyReport;
use sato_darboux::Scalar;

use crate::spec::SpecFile;

pub const TRANSFORM_SCHEMA: &str = "sato-darboux/transform/1";
pub const COMPOSE_SCHEMA: &str = "sato-darboux/compose/1";
pub const SPECTRAL_SCHEMA: &str = "sato-darboux/spectral/1";
pub const VERIFY_SCHEMA: &str = "sato-darboux/verify/1";

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub t: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesRecord {
    /// Largest weight carried exactly.
    pub weight_bound: i32,
    pub terms: Vec<Term>,
    pub text: String,
}

impl SeriesRecord {
    pub fn new(s: &TruncatedSeries<Scalar>) -> Self {
        let terms: Vec<Term> = by_weight(s).into_iter().map(|(e, c)| Term { t: e.clone(), coeff: c.to_string() }).collect();
        SeriesRecord { weight_bound: s.bound(), text: series_text(s), terms }
    }
}

/// Terms by ascending weight; within a weight, higher powers of t₁ first.
fn by_weight(s: &TruncatedSeries<Scalar>) -> Vec<(&Vec<u32>, &Scalar)> {
    let mut v: Vec<_> = s.terms().iter().collect();
    v.sort_by(|(a, _), (b, _)| weight(a).cmp(&weight(b)).then_with(|| b.cmp(a)));
    v
}

pub fn series_text(s: &TruncatedSeries<Scalar>) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = by_weight(s)
        .into_iter()
        .map(|(e, c)| {
            let m = fmt_monomial(e);
            match (m.is_empty(), c.to_string().as_str()) {
                (true, cs) => cs.to_string(),
                (false, "1") => m,
                (false, cs) => format!("{cs}*{m}"),
            }
        })
        .collect();
    parts.join(" + ")
}

#[derive(Clone, Debug, Serialize)]
pub struct TailCoeff {
    pub power: i32,
    pub series: SeriesRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRecord {
    /// Lowest z-power carried exactly.
    pub low: i32,
    /// Nonzero coefficients, from z^0 downwards.
    pub coeffs: Vec<TailCoeff>,
}

impl TailRecord {
    pub fn new(t: &LaurentTail<Scalar>) -> Self {
        let coeffs = t
            .coeffs()
            .iter()
            .rev()
            .filter(|(_, s)| !s.is_zero())
            .map(|(&power, s)| TailCoeff { power, series: SeriesRecord::new(s) })
            .collect();
        TailRecord { low: t.low(), coeffs }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyRecord {
    /// Ascending degree.
    pub coeffs: Vec<String>,
    pub text: String,
}

impl PolyRecord {
    pub fn new(p: &Poly<Scalar>) -> Self {
        PolyRecord { coeffs: p.coeffs().iter().map(|c| c.to_string()).collect(), text: p.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorRecord {
    pub order: usize,
    /// Coefficient of D^i at index i, as functions of x.
    pub coeffs: Vec<String>,
    pub text: String,
}

impl OperatorRecord {
    pub fn new(op: &DiffOp<Scalar>) -> Self {
        OperatorRecord {
            order: op.order(),
            coeffs: op.coeffs().iter().map(|c| c.to_string()).collect(),
            text: op.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Factor {
    pub factor: String,
    pub power: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct TauRecord {
    /// scale · exp(Σ exponent_k t_k) · Π factor^power
    pub closed_form: String,
    pub scale: String,
    pub exponent: Vec<String>,
    pub factors: Vec<Factor>,
    pub normalized: bool,
    /// Expansion about the base point; absent when it does not exist there.
    pub series: Option<SeriesRecord>,
}

impl TauRecord {
    pub fn new(tau: &TauForm<Scalar>, normalized: bool, series: Option<&TruncatedSeries<Scalar>>) -> Self {
        TauRecord {
            closed_form: tau.to_string(),
            scale: tau.scale().to_string(),
            exponent: tau.exponent().iter().map(|c| c.to_string()).collect(),
            factors: tau.factors().iter().map(|(p, e)| Factor { factor: p.to_string(), power: *e }).collect(),
            normalized,
            series: series.map(SeriesRecord::new),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrdersRecord {
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: u32,
}

impl OrdersRecord {
    pub fn new(o: &TruncOrders) -> Self {
        OrdersRecord { d: o.t_weight_bound, m: o.t_var_count, k: o.z_neg_bound }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformRecord {
    pub schema: &'static str,
    pub version: &'static str,
    /// The effective spec; rebuilding from it reproduces this record.
    pub spec: SpecFile,
    pub orders: OrdersRecord,
    #[serde(rename = "N")]
    pub n_reduction: u32,
    pub conditions: usize,
    pub forward_only: bool,
    pub g: PolyRecord,
    pub f: Option<PolyRecord>,
    pub h: PolyRecord,
    #[serde(rename = "P")]
    pub p: OperatorRecord,
    #[serde(rename = "Q")]
    pub q: Option<OperatorRecord>,
    #[serde(rename = "L_V")]
    pub l_v: Option<OperatorRecord>,
    #[serde(rename = "L_W")]
    pub l_w: Option<OperatorRecord>,
    pub tau: TauRecord,
    pub psi_tail: Option<TailRecord>,
    /// Set for compositions: fV ⊂ W ⊂ V/g for the combined data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inclusion: Option<VerifyReport>,
    pub warnings: Vec<String>,
}

impl TransformRecord {
    pub fn new(spec: &SpecFile, t: &DarbouxTransform<Scalar>) -> Self {
        let orders = spec.orders();
        let x0 = &t.plane.base_point;
        let mut warnings: Vec<String> = Vec::new();
        for n in &t.notes {
            if !warnings.contains(n) {
                warnings.push(n.clone());
            }
        }
        let tau_series = match t.tau_w.to_series(orders.t_var_count, orders.t_weight_bound as i32, x0) {
            Ok(s) => Some(s),
            Err(e) => {
                warnings.push(format!("tau series omitted: {e}"));
                None
            }
        };
        let psi_tail = match psi_wronskian(t, &orders) {
            Ok(w) => Some(TailRecord::new(&w.tail)),
            Err(e) => {
                warnings.push(format!("Psi tail omitted: {e}"));
                None
            }
        };
        TransformRecord {
            schema: TRANSFORM_SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            spec: spec.clone(),
            orders: OrdersRecord::new(&orders),
            n_reduction: t.plane.n_reduction,
            conditions: t.n(),
            forward_only: t.is_forward_only(),
            g: PolyRecord::new(&t.g),
            f: t.f.as_ref().map(PolyRecord::new),
            h: PolyRecord::new(&t.h),
            p: OperatorRecord::new(&t.p),
            q: t.q.as_ref().map(OperatorRecord::new),
            l_v: t.l_v.as_ref().map(OperatorRecord::new),
            l_w: t.l_w.as_ref().map(OperatorRecord::new),
            tau: TauRecord::new(&t.tau_w, t.normalized, tau_series.as_ref()),
            psi_tail,
            inclusion: None,
            warnings,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralOperator {
    pub u: PolyRecord,
    #[serde(rename = "L")]
    pub op: OperatorRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralRecord {
    pub schema: &'static str,
    pub version: &'static str,
    pub deg_bound: usize,
    /// Ascending degree; z^N-polynomials only.
    pub basis: Vec<PolyRecord>,
    /// gcd of the nonconstant degrees; 0 when there are none.
    pub rank: u32,
    /// Set when no nonconstant element exists within the bound.
    pub empty: bool,
    pub operators: Vec<SpectralOperator>,
}

impl SpectralRecord {
    pub fn new(a: &SpectralAlgebra<Scalar>) -> Self {
        SpectralRecord {
            schema: SPECTRAL_SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            deg_bound: a.deg_bound,
            basis: a.basis.iter().map(PolyRecord::new).collect(),
            rank: a.rank,
            empty: a.basis.iter().all(|p| p.deg() == 0),
            operators: a
                .operators
                .iter()
                .map(|(u, l)| SpectralOperator { u: PolyRecord::new(u), op: OperatorRecord::new(l) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRecord {
    pub schema: &'static str,
    pub version: &'static str,
    pub orders: OrdersRecord,
    pub reports: Vec<VerifyReport>,
    pub failures: usize,
}

impl VerifyRecord {
    pub fn new(orders: &TruncOrders, reports: Vec<VerifyReport>) -> Self {
        let failures = reports.iter().filter(|r| r.verdict.is_fail()).count();
        VerifyRecord { schema: VERIFY_SCHEMA, version: env!("CARGO_PKG_VERSION"), orders: OrdersRecord::new(orders), reports, failures }
    }
}
