//! The transformation specification file and its translation into engine
//! inputs. All scalars are exact strings; nothing is computed before the
//! whole file has been validated.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use sato_darboux::darboux::{build_transform, DarbouxTransform, KernelSpec, TransformInput};
use sato_darboux::expfun::{Condition, ConditionPoint};
use sato_darboux::mpoly::MPoly;
use sato_darboux::plane::PlaneSpec;
use sato_darboux::poly::Poly;
use sato_darboux::series::TruncOrders;
use sato_darboux::Scalar;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub base: BaseSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclotomic: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<GSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<OrdersSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKindSpec {
    HPlus,
    PolyTau,
    Transformed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub kind: BaseKindSpec,
    #[serde(rename = "N", default = "one")]
    pub n: u32,
    /// Terms of a polynomial τ_V; required for `poly_tau` only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub unnormalized: bool,
    /// For `transformed`: the spec whose output plane is the base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Box<SpecFile>>,
}

/// coeff · t₁^{t[0]} t₂^{t[1]} ⋯
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: String,
    pub t: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSpec {
    pub points: Vec<PointSpec>,
}

/// Σ_j alphas[j] ∂_z^j at z = lambda.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub lambda: String,
    pub alphas: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelInput {
    pub points: Vec<KernelPoint>,
    /// Rows over the ambient kernel basis; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelPoint {
    pub lambda: String,
    pub multiplicity: u32,
}

/// Either z^n or a monic coefficient list in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GSpec {
    Zn { zn: u32 },
    Coeffs(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrdersSpec {
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Latex,
}

fn one() -> u32 {
    1
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub t_order: Option<u32>,
    pub t_vars: Option<usize>,
    pub z_order: Option<u32>,
    pub cyclotomic: Option<u32>,
    pub base_point: Option<String>,
    pub unnormalized: bool,
}

/// Reads a spec, or the spec embedded in an artifact.
pub fn load(path: &str) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    parse(&text).map_err(|e| match e {
        CliError::Schema { pointer, message } => CliError::Schema { pointer, message: format!("{path}: {message}") },
        other => other,
    })
}

pub fn parse(text: &str) -> Result<SpecFile, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Schema { pointer: String::new(), message: format!("malformed JSON: {e}") })?;
    let (value, prefix) = match value {
        Value::Object(mut o) if o.contains_key("schema") => match o.remove("spec") {
            Some(s) => (s, "/spec"),
            None => return Err(CliError::Schema { pointer: "/spec".into(), message: "artifact without a spec".into() }),
        },
        v => (v, ""),
    };
    let spec: SpecFile = serde_path_to_error::deserialize(value).map_err(|e| CliError::Schema {
        pointer: format!("{prefix}{}", pointer_of(e.path())),
        message: e.into_inner().to_string(),
    })?;
    spec.validate(prefix)?;
    Ok(spec)
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema { pointer: pointer.into(), message: message.into() }
}

impl SpecFile {
    /// Structural checks that need no field index.
    fn validate(&self, at: &str) -> Result<(), CliError> {
        let b = &self.base;
        if b.n == 0 {
            return Err(schema(format!("{at}/base/N"), "N must be positive"));
        }
        match b.kind {
            BaseKindSpec::PolyTau if b.tau.is_empty() => {
                return Err(schema(format!("{at}/base/tau"), "poly_tau base needs tau terms"))
            }
            BaseKindSpec::HPlus | BaseKindSpec::Transformed if !b.tau.is_empty() => {
                return Err(schema(format!("{at}/base/tau"), "tau terms are only allowed for poly_tau"))
            }
            BaseKindSpec::HPlus | BaseKindSpec::PolyTau if b.from.is_some() => {
                return Err(schema(format!("{at}/base/from"), "`from` is only allowed for transformed bases"))
            }
            _ => {}
        }
        if let Some(inner) = &b.from {
            inner.validate(&format!("{at}/base/from"))?;
        }
        if !self.conditions.is_empty() && self.kernel.is_some() {
            return Err(schema(format!("{at}/kernel"), "give either conditions or kernel, not both"));
        }
        if let Some(m) = self.cyclotomic {
            if m == 0 || m % b.n != 0 {
                return Err(schema(format!("{at}/cyclotomic"), "cyclotomic index must be a positive multiple of N"));
            }
        }
        if let Some(GSpec::Coeffs(c)) = &self.g {
            if c.is_empty() {
                return Err(schema(format!("{at}/g"), "empty coefficient list"));
            }
        }
        if let Some(o) = &self.orders {
            if o.m == 0 {
                return Err(schema(format!("{at}/orders/M"), "at least one time variable is required"));
            }
        }
        Ok(())
    }

    /// The spec with every default and override written out, so that an
    /// artifact carrying it rebuilds identically.
    pub fn effective(&self, ov: &Overrides) -> Result<SpecFile, CliError> {
        let mut s = self.clone();
        let o = s.orders.unwrap_or(OrdersSpec { d: 8, m: 4, k: 6 });
        s.orders = Some(OrdersSpec {
            d: ov.t_order.unwrap_or(o.d),
            m: ov.t_vars.unwrap_or(o.m),
            k: ov.z_order.unwrap_or(o.k),
        });
        if s.orders.unwrap().m == 0 {
            return Err(CliError::Usage("--t-vars must be positive".into()));
        }
        let m = ov.cyclotomic.or(s.cyclotomic).unwrap_or(s.base.n);
        if m == 0 || m % s.base.n != 0 {
            return Err(CliError::Usage(format!("cyclotomic index {m} is not a positive multiple of N = {}", s.base.n)));
        }
        s.cyclotomic = Some(m);
        if let Some(x0) = &ov.base_point {
            s.base.base_point = Some(x0.clone());
        }
        s.base.base_point.get_or_insert_with(|| "0".into());
        s.base.unnormalized |= ov.unnormalized;
        if s.g.is_none() {
            s.g = Some(GSpec::Zn { zn: s.rows() as u32 });
        }
        s.output = None;
        Ok(s)
    }

    /// Number of conditions n.
    pub fn rows(&self) -> usize {
        match &self.kernel {
            Some(k) => match &k.matrix {
                Some(a) => a.len(),
                None => k.points.iter().map(|p| p.multiplicity as usize).sum::<usize>() * self.base.n as usize,
            },
            None => self.conditions.len(),
        }
    }

    pub fn orders(&self) -> TruncOrders {
        let o = self.orders.unwrap_or(OrdersSpec { d: 8, m: 4, k: 6 });
        TruncOrders { t_weight_bound: o.d, t_var_count: o.m, z_neg_bound: o.k }
    }

    /// Times carried internally: the Miwa shift down to z^{−K} needs t₁..t_K.
    pub fn nvars(&self) -> usize {
        let o = self.orders();
        o.t_var_count.max(o.z_neg_bound as usize).max(1)
    }

    pub fn format(&self) -> Option<Format> {
        self.output.as_ref().and_then(|o| o.format)
    }
}

struct Ctx {
    m: u32,
    nvars: usize,
}

impl Ctx {
    fn scalar(&self, s: &str, pointer: String) -> Result<Scalar, CliError> {
        Scalar::parse(s, self.m).map_err(|e| schema(pointer, e.to_string()))
    }

    fn monic(&self, cs: &[String], pointer: &str) -> Result<Poly<Scalar>, CliError> {
        let v = cs
            .iter()
            .enumerate()
            .map(|(i, c)| self.scalar(c, format!("{pointer}/{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let p = Poly::new(v);
        if !p.is_monic() || p.degree() != Some(cs.len() - 1) {
            return Err(schema(pointer, "expected a monic coefficient list in ascending degree"));
        }
        Ok(p)
    }
}

/// Builds the transform of an effective spec (see `SpecFile::effective`).
pub fn build(spec: &SpecFile, at: &str) -> Result<DarbouxTransform<Scalar>, CliError> {
    let m = spec.cyclotomic.unwrap_or(spec.base.n);
    let cx = Ctx { m, nvars: spec.nvars() };
    let b = &spec.base;
    let x0 = cx.scalar(b.base_point.as_deref().unwrap_or("0"), format!("{at}/base/base_point"))?;
    let mut plane = match b.kind {
        BaseKindSpec::HPlus => PlaneSpec::h_plus(b.n),
        BaseKindSpec::PolyTau => {
            let mut tau = MPoly::zero(cx.nvars);
            for (i, term) in b.tau.iter().enumerate() {
                let at_t = format!("{at}/base/tau/{i}");
                if term.t.len() > cx.nvars && term.t[cx.nvars..].iter().any(|&e| e > 0) {
                    return Err(schema(format!("{at_t}/t"), format!("uses a time beyond t_{}", cx.nvars)));
                }
                let mut e = term.t.clone();
                e.resize(cx.nvars, 0);
                tau.add_term(e, cx.scalar(&term.coeff, format!("{at_t}/coeff"))?);
            }
            PlaneSpec::poly_tau(tau, b.n, x0.clone())
        }
        BaseKindSpec::Transformed => {
            let inner = b
                .from
                .as_ref()
                .ok_or_else(|| schema(format!("{at}/base/from"), "transformed base needs `from`; or use compose"))?;
            PlaneSpec::transformed(build(&inherit(inner, spec), &format!("{at}/base/from"))?)
        }
    };
    if let BaseKindSpec::Transformed = b.kind {
        if plane.n_reduction != b.n {
            return Err(schema(format!("{at}/base/N"), "N differs from the base transform"));
        }
    }
    plane.base_point = x0;
    plane.cyclotomic = m;
    plane.unnormalized = b.unnormalized;
    build_over(spec, plane, &cx, at)
}

/// Builds `spec` over an already constructed base plane.
pub fn build_over_plane(
    spec: &SpecFile,
    mut plane: PlaneSpec<Scalar>,
    at: &str,
) -> Result<DarbouxTransform<Scalar>, CliError> {
    let m = spec.cyclotomic.unwrap_or(spec.base.n);
    let cx = Ctx { m, nvars: spec.nvars() };
    if plane.n_reduction != spec.base.n {
        return Err(CliError::Math(sato_darboux::Error::Precondition(format!(
            "base N = {} but the first transform has N = {}",
            spec.base.n, plane.n_reduction
        ))));
    }
    plane.cyclotomic = m;
    plane.unnormalized |= spec.base.unnormalized;
    build_over(spec, plane, &cx, at)
}

fn build_over(
    spec: &SpecFile,
    plane: PlaneSpec<Scalar>,
    cx: &Ctx,
    at: &str,
) -> Result<DarbouxTransform<Scalar>, CliError> {
    let n = spec.base.n;
    let kernel = match &spec.kernel {
        Some(k) => {
            let points = k
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| Ok((cx.scalar(&p.lambda, format!("{at}/kernel/points/{i}/lambda"))?, p.multiplicity)))
                .collect::<Result<Vec<_>, CliError>>()?;
            match &k.matrix {
                None => KernelSpec::full(points, n),
                Some(rows) => {
                    let matrix = rows
                        .iter()
                        .enumerate()
                        .map(|(i, r)| {
                            r.iter()
                                .enumerate()
                                .map(|(j, c)| cx.scalar(c, format!("{at}/kernel/matrix/{i}/{j}")))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    KernelSpec { points, matrix }
                }
            }
        }
        None => {
            let mut conds = Vec::new();
            for (i, c) in spec.conditions.iter().enumerate() {
                let mut pts = Vec::new();
                for (j, p) in c.points.iter().enumerate() {
                    let here = format!("{at}/conditions/{i}/points/{j}");
                    let lambda = cx.scalar(&p.lambda, format!("{here}/lambda"))?;
                    let alphas = p
                        .alphas
                        .iter()
                        .enumerate()
                        .map(|(k, a)| cx.scalar(a, format!("{here}/alphas/{k}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    pts.push(ConditionPoint { lambda, alphas });
                }
                conds.push(Condition::new(pts).map_err(|e| schema(format!("{at}/conditions/{i}"), e.to_string()))?);
            }
            KernelSpec::from_conditions(&conds, n, cx.m)?
        }
    };
    let g = match &spec.g {
        None | Some(GSpec::Zn { .. }) => match &spec.g {
            Some(GSpec::Zn { zn }) if *zn as usize != kernel.rows() => {
                return Err(schema(format!("{at}/g/zn"), format!("deg g must equal the number of conditions, {}", kernel.rows())))
            }
            _ => None,
        },
        Some(GSpec::Coeffs(c)) => Some(cx.monic(c, &format!("{at}/g"))?),
    };
    let h = spec.h.as_ref().map(|c| cx.monic(c, &format!("{at}/h"))).transpose()?;
    Ok(build_transform(TransformInput { plane, kernel, g, h, nvars: cx.nvars })?)
}

/// A nested base spec inherits the orders, field index and base point of
/// the spec built over it, so both carry the same number of times.
pub fn inherit(inner: &SpecFile, outer: &SpecFile) -> SpecFile {
    let mut s = inner.clone();
    s.orders = outer.orders;
    s.cyclotomic = outer.cyclotomic;
    s.base.base_point = outer.base.base_point.clone();
    s.g.get_or_insert_with(|| GSpec::Zn { zn: inner.rows() as u32 });
    s
}
