//! Instance verification and parameter sweeps.

use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::dsl::format_predicate;
use crate::error::Error;
use crate::eval::{eval_exact, eval_predicate, guard_fires};
use crate::exact::PiValue;
use crate::expr::{rat, Identity, ParamBinding, ParamKind, SumExpr};
use crate::numeric;
use crate::numeric_eval::eval_numeric;

/// Precision used when an exact check has to fall back to floating point.
pub const FALLBACK_DIGITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Numeric { digits: u32 },
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Numeric { .. } => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    ExactEqual,
    NumericEqual { relerr: f64 },
    Mismatch,
    Skipped { reason: String },
    /// Evaluation raised an error on an admissible binding.
    Failed { reason: String },
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::ExactEqual => "ExactEqual",
            Status::NumericEqual { .. } => "NumericEqual",
            Status::Mismatch => "Mismatch",
            Status::Skipped { .. } => "Skipped",
            Status::Failed { .. } => "Failed",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Status::ExactEqual | Status::NumericEqual { .. })
    }

    pub fn is_bad(&self) -> bool {
        matches!(self, Status::Mismatch | Status::Failed { .. })
    }
}

/// One side of a checked instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(PiValue),
    Numeric(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Numeric(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationResult {
    pub id: String,
    pub binding: ParamBinding,
    pub status: Status,
    pub lhs: Option<Value>,
    pub rhs: Option<Value>,
    pub note: Option<String>,
}

impl VerificationResult {
    fn new(identity: &Identity, binding: &ParamBinding, status: Status) -> Self {
        Self { id: identity.id.clone(), binding: binding.clone(), status, lhs: None, rhs: None, note: None }
    }

    pub fn relerr(&self) -> Option<f64> {
        match self.status {
            Status::NumericEqual { relerr } => Some(relerr),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("id".into(), self.id.clone().into());
        m.insert("binding".into(), serde_json::to_value(&self.binding).expect("binding serializes"));
        m.insert("status".into(), self.status.name().into());
        if let Some(v) = &self.lhs {
            m.insert("lhs".into(), v.to_string().into());
        }
        if let Some(v) = &self.rhs {
            m.insert("rhs".into(), v.to_string().into());
        }
        if let Some(r) = self.relerr() {
            m.insert("relerr".into(), format!("{r:.3e}").into());
        }
        if let Status::Skipped { reason } | Status::Failed { reason } = &self.status {
            m.insert("reason".into(), reason.clone().into());
        }
        if let Some(n) = &self.note {
            m.insert("note".into(), n.clone().into());
        }
        serde_json::Value::Object(m)
    }
}

/// Check one binding of `identity`.
pub fn verify_instance(identity: &Identity, binding: &ParamBinding, mode: Mode) -> VerificationResult {
    let fail = |reason: String| VerificationResult::new(identity, binding, Status::Failed { reason });
    let skip = |reason: String| VerificationResult::new(identity, binding, Status::Skipped { reason });

    for p in &identity.params {
        match binding.get(&p.name) {
            None => return fail(format!("parameter {} unbound", p.name)),
            Some(q) if !p.kind.admits(q) => {
                return skip(format!("{} = {q} is not admissible for {}", p.name, p.kind.keyword()))
            }
            Some(_) => {}
        }
    }
    match eval_predicate(&identity.validity, binding) {
        Ok(true) => {}
        Ok(false) | Err(_) => return skip(format!("requires {}", format_predicate(&identity.validity))),
    }
    let mut fired = Vec::new();
    for c in &identity.rhs {
        match guard_fires(&c.guard, binding) {
            Ok(true) => fired.push(&c.expr),
            Ok(false) => {}
            Err(e) => return fail(format!("guard: {e}")),
        }
    }
    let rhs = match fired.as_slice() {
        [one] => *one,
        [] => return fail("no guard fires".into()),
        _ => return fail(format!("{} guards fire", fired.len())),
    };

    match mode {
        Mode::Exact => match (eval_exact(&identity.lhs, binding), eval_exact(rhs, binding)) {
            (Ok(l), Ok(r)) => {
                let status = if l == r { Status::ExactEqual } else { Status::Mismatch };
                VerificationResult {
                    lhs: Some(Value::Exact(l)),
                    rhs: Some(Value::Exact(r)),
                    ..VerificationResult::new(identity, binding, status)
                }
            }
            (Err(Error::OffGrid(why)), _) | (_, Err(Error::OffGrid(why))) => {
                let mut out = numeric_check(identity, binding, rhs, FALLBACK_DIGITS);
                out.note = Some(format!("numeric fallback at {FALLBACK_DIGITS} digits: {why}"));
                out
            }
            (Err(e), _) | (_, Err(e)) => fail(e.to_string()),
        },
        Mode::Numeric { digits } => numeric_check(identity, binding, rhs, digits),
    }
}

/// Relative tolerance accepted in numeric mode.
pub fn numeric_threshold(digits: u32) -> Float {
    numeric::ten_pow_neg(digits as i32 - 6, numeric::bits_for(digits))
}

fn numeric_check(identity: &Identity, binding: &ParamBinding, rhs: &SumExpr, digits: u32) -> VerificationResult {
    let (l, r) = match (eval_numeric(&identity.lhs, binding, digits), eval_numeric(rhs, binding, digits)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) => {
            return VerificationResult::new(identity, binding, Status::Failed { reason: e.to_string() })
        }
    };
    let err = numeric::relerr(&l, &r);
    let status = if err <= numeric_threshold(digits) {
        Status::NumericEqual { relerr: err.to_f64() }
    } else {
        Status::Mismatch
    };
    VerificationResult {
        lhs: Some(Value::Numeric(numeric::format_float(&l, digits))),
        rhs: Some(Value::Numeric(numeric::format_float(&r, digits))),
        ..VerificationResult::new(identity, binding, status)
    }
}

/// Outcome of comparing two identities at one binding.
#[derive(Debug, Clone, PartialEq)]
pub enum Agreement {
    Exact,
    /// Compared in floating point because an argument left the half-integer grid.
    Numeric,
    /// The binding is inadmissible or outside a validity domain for one of the two.
    NotApplicable,
    Disagree(String),
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        matches!(self, Agreement::Exact | Agreement::Numeric)
    }
}

fn applicable<'a>(id: &'a Identity, b: &ParamBinding) -> std::result::Result<Option<&'a SumExpr>, String> {
    for p in &id.params {
        match b.get(&p.name) {
            Some(q) if p.kind.admits(q) => {}
            _ => return Ok(None),
        }
    }
    if !eval_predicate(&id.validity, b).unwrap_or(false) {
        return Ok(None);
    }
    let mut fired = None;
    for c in &id.rhs {
        if guard_fires(&c.guard, b).map_err(|e| e.to_string())? {
            fired = Some(&c.expr);
        }
    }
    fired.map(Some).ok_or_else(|| format!("no guard of {} fires", id.id))
}

/// Whether `a.lhs = factor * b.lhs` and `a.rhs = factor * b.rhs` at `binding`, with `b`'s sides
/// exchanged when `swapped`.
pub fn sides_agree(a: &Identity, b: &Identity, binding: &ParamBinding, swapped: bool, factor: Option<&SumExpr>) -> Agreement {
    let (ar, br) = match (applicable(a, binding), applicable(b, binding)) {
        (Ok(Some(x)), Ok(Some(y))) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Agreement::Disagree(e),
        _ => return Agreement::NotApplicable,
    };
    let (bl, br) = if swapped { (br, &b.lhs) } else { (&b.lhs, br) };
    let one = SumExpr::int(1);
    let factor = factor.unwrap_or(&one);
    let exprs = [&a.lhs, ar, bl, br, factor];
    let exact: std::result::Result<Vec<PiValue>, Error> = exprs.iter().map(|e| eval_exact(e, binding)).collect();
    match exact {
        Ok(v) => {
            let (l, r) = (v[4].clone() * v[2].clone(), v[4].clone() * v[3].clone());
            if v[0] == l && v[1] == r {
                Agreement::Exact
            } else {
                Agreement::Disagree(format!("at {binding}: ({}, {}) vs ({l}, {r})", v[0], v[1]))
            }
        }
        Err(Error::OffGrid(_)) => {
            let num: std::result::Result<Vec<Float>, Error> =
                exprs.iter().map(|e| eval_numeric(e, binding, FALLBACK_DIGITS)).collect();
            match num {
                Ok(v) => {
                    let l = Float::with_val(v[0].prec(), &v[4] * &v[2]);
                    let r = Float::with_val(v[0].prec(), &v[4] * &v[3]);
                    let tol = numeric_threshold(FALLBACK_DIGITS);
                    if numeric::relerr(&v[0], &l) <= tol && numeric::relerr(&v[1], &r) <= tol {
                        Agreement::Numeric
                    } else {
                        Agreement::Disagree(format!(
                            "at {binding}: ({}, {}) vs ({}, {})",
                            numeric::format_float(&v[0], 20),
                            numeric::format_float(&v[1], 20),
                            numeric::format_float(&l, 20),
                            numeric::format_float(&r, 20)
                        ))
                    }
                }
                Err(e) => Agreement::Disagree(format!("at {binding}: {e}")),
            }
        }
        Err(e) => Agreement::Disagree(format!("at {binding}: {e}")),
    }
}

/// Per-parameter value lists in declared parameter order.
pub type Ranges = Vec<(String, Vec<BigRational>)>;

pub fn int_range(lo: i64, hi: i64) -> Vec<BigRational> {
    (lo..=hi).map(|n| BigRational::from_integer(n.into())).collect()
}

/// Default grid samples for `grid` parameters.
pub fn default_v_grid() -> Vec<BigRational> {
    [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (5, 2), (3, 1), (4, 1)].iter().map(|&(n, d)| rat(n, d)).collect()
}

/// Default samples for free rational variables.
pub fn default_x_samples() -> Vec<BigRational> {
    [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1), (3, 1)].iter().map(|&(n, d)| rat(n, d)).collect()
}

/// Default off-grid samples for numeric evidence.
pub fn default_numeric_v() -> Vec<BigRational> {
    [(3, 10), (3, 4), (11, 5)].iter().map(|&(n, d)| rat(n, d)).collect()
}

/// Ranges derived from parameter kinds alone.
pub fn default_ranges(identity: &Identity) -> Ranges {
    let nat_hi = if identity.params.len() == 1 { 25 } else { 15 };
    identity
        .params
        .iter()
        .map(|p| {
            let values = match p.kind {
                ParamKind::Natural => int_range(0, nat_hi),
                ParamKind::Grid => default_v_grid(),
                ParamKind::Rational => default_x_samples(),
            };
            (p.name.clone(), values)
        })
        .collect()
}

/// Cartesian product of `ranges`, earlier parameters varying slowest.
pub fn bindings(ranges: &Ranges) -> Vec<ParamBinding> {
    let mut out = vec![ParamBinding::new()];
    for (name, values) in ranges {
        out = out
            .into_iter()
            .flat_map(|b| values.iter().map(move |v| b.clone().with(name, v.clone())))
            .collect();
    }
    out
}

/// Verify every binding in the product of `ranges`; order is deterministic.
pub fn sweep(identity: &Identity, ranges: &Ranges, mode: Mode) -> Vec<VerificationResult> {
    bindings(ranges).par_iter().map(|b| verify_instance(identity, b, mode)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub exact: usize,
    pub numeric: usize,
    pub mismatch: usize,
    pub skipped: usize,
    pub failed: usize,
}

impl Summary {
    pub fn of(results: &[VerificationResult]) -> Summary {
        let mut s = Summary::default();
        for r in results {
            s.add(r.status.name());
        }
        s
    }

    pub fn add(&mut self, status: &str) {
        self.total += 1;
        match status {
            "ExactEqual" => self.exact += 1,
            "NumericEqual" => self.numeric += 1,
            "Mismatch" => self.mismatch += 1,
            "Skipped" => self.skipped += 1,
            _ => self.failed += 1,
        }
    }

    pub fn ok(&self) -> bool {
        self.mismatch == 0 && self.failed == 0
    }
}
