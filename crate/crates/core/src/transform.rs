//! Transforms of polynomial identities in standard form
//! `sum_{k=s..n} f(k) (1+t)^p(k) == sum_{k=m..r} g(k) t^q(k)` into new sum identities.
//!
//! Each operation renders its result as DSL text and parses it back, so every emitted identity
//! round-trips through the formatter and parser by construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dsl::{format_expr, format_predicate, parse_expr, parse_identity};
use crate::error::{Error, Result};
use crate::eval::{eval_exact, eval_exact_with_vars};
use crate::expr::{rat, Guard, Identity, Param, ParamBinding, ParamKind, Predicate, SumExpr};
use crate::verify::{bindings, int_range, sweep, verify_instance, Mode, Ranges, Status};

/// The affine exponent map `k -> a*k + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexMap {
    pub a: i64,
    pub b: i64,
}

impl IndexMap {
    /// The map as an expression in `var`.
    pub fn apply(&self, var: &str) -> SumExpr {
        let k = SumExpr::var(var);
        let ak = match self.a {
            0 => None,
            1 => Some(k),
            -1 => Some(SumExpr::neg(k)),
            a => Some(SumExpr::mul(vec![SumExpr::int(a), k])),
        };
        match (ak, self.b) {
            (None, b) => SumExpr::int(b),
            (Some(e), 0) => e,
            (Some(e), b) if b < 0 => SumExpr::add(vec![e, SumExpr::neg(SumExpr::int(-b))]),
            (Some(e), b) => SumExpr::add(vec![e, SumExpr::int(b)]),
        }
    }

    /// `self` after substituting `k -> c*k + d`.
    fn compose(&self, c: i64, d: i64) -> IndexMap {
        IndexMap { a: self.a * c, b: self.a * d + self.b }
    }
}

/// A registered polynomial identity with the rational parameter `t` factored out.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormIdentity {
    pub name: String,
    /// Parameters other than `t`.
    pub params: Vec<Param>,
    pub validity: Predicate,
    pub f: SumExpr,
    pub g: SumExpr,
    pub p: IndexMap,
    pub q: IndexMap,
    pub s: SumExpr,
    pub n: SumExpr,
    pub m: SumExpr,
    pub r: SumExpr,
}

const T: &str = "t";
const K: &str = "k";

fn shape(msg: impl Into<String>) -> Error {
    Error::ShapeMismatch(msg.into())
}

fn as_sum(e: &SumExpr) -> Result<(&str, &SumExpr, &SumExpr, &SumExpr)> {
    match e {
        SumExpr::Sum { index, lo, hi, body } => Ok((index.as_str(), lo.as_ref(), hi.as_ref(), body.as_ref())),
        _ => Err(shape("both sides must be a single sum")),
    }
}

fn is_one_plus_t(e: &SumExpr) -> bool {
    let is_t = |x: &SumExpr| *x == SumExpr::param(T);
    let is_one = |x: &SumExpr| *x == SumExpr::int(1);
    matches!(e, SumExpr::Add(v) if v.len() == 2 && ((is_one(&v[0]) && is_t(&v[1])) || (is_t(&v[0]) && is_one(&v[1]))))
}

/// Split `body` into the product of the remaining factors and the exponent picked by `pick`.
fn split(body: &SumExpr, pick: &dyn Fn(&SumExpr) -> Option<SumExpr>, what: &str) -> Result<(SumExpr, SumExpr)> {
    let items: Vec<SumExpr> = match body {
        SumExpr::Mul(v) => v.clone(),
        other => vec![other.clone()],
    };
    let hits: Vec<usize> = items.iter().enumerate().filter(|(_, e)| pick(e).is_some()).map(|(i, _)| i).collect();
    let [i] = hits[..] else {
        return Err(shape(format!("expected exactly one factor {what}")));
    };
    let exp = pick(&items[i]).expect("picked");
    let rest: Vec<SumExpr> = items.into_iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e).collect();
    let f = match rest.len() {
        0 => SumExpr::int(1),
        1 => rest.into_iter().next().expect("one factor"),
        _ => SumExpr::Mul(rest),
    };
    Ok((f, exp))
}

fn affine(e: &SumExpr, index: &str) -> Result<IndexMap> {
    if !e.params().is_empty() || e.free_vars().iter().any(|v| v != index) {
        return Err(shape(format!("exponent {} must depend on the index only", format_expr(e))));
    }
    let at = |k: i64| -> Result<BigInt> {
        eval_exact_with_vars(e, &ParamBinding::new(), &[(index.to_string(), BigInt::from(k))])?
            .as_integer()
            .ok_or_else(|| shape(format!("exponent {} is not integer-valued", format_expr(e))))
    };
    let (v0, v1, v2) = (at(0)?, at(1)?, at(2)?);
    let a = &v1 - &v0;
    if &v2 - &v1 != a {
        return Err(shape(format!("exponent {} is not affine in {index}", format_expr(e))));
    }
    let small = |x: &BigInt| x.to_i64().ok_or_else(|| shape("exponent coefficients too large"));
    Ok(IndexMap { a: small(&a)?, b: small(&v0)? })
}

fn mentions_t(e: &SumExpr) -> bool {
    e.params().iter().any(|p| p == T)
}

fn pred_mentions_t(p: &Predicate) -> bool {
    match p {
        Predicate::True => false,
        Predicate::Cmp(a, _, b) => mentions_t(a) || mentions_t(b),
        Predicate::And(v) => v.iter().any(pred_mentions_t),
        Predicate::ForAll { lo, hi, body, .. } => mentions_t(lo) || mentions_t(hi) || pred_mentions_t(body),
    }
}

impl StandardFormIdentity {
    /// Recognise `identity` as a polynomial identity in its rational parameter `t`.
    pub fn from_identity(identity: &Identity) -> Result<Self> {
        match identity.param(T) {
            Some(p) if p.kind == ParamKind::Rational => {}
            _ => return Err(shape("needs a rational parameter t")),
        }
        let [crate::expr::Case { guard: Guard::Always, expr: rhs }] = &identity.rhs[..] else {
            return Err(shape("right side must be a single unguarded expression"));
        };
        let (li, s, n, lbody) = as_sum(&identity.lhs)?;
        let (ri, m, r, rbody) = as_sum(rhs)?;
        let lpick = |e: &SumExpr| match e {
            SumExpr::Pow(b, x) if is_one_plus_t(b) => Some((**x).clone()),
            _ => None,
        };
        let rpick = |e: &SumExpr| match e {
            SumExpr::Pow(b, x) if **b == SumExpr::param(T) => Some((**x).clone()),
            SumExpr::Param(name) if name == T => Some(SumExpr::int(1)),
            _ => None,
        };
        let (f, pe) = split(lbody, &lpick, "(1+t)^p")?;
        let (g, qe) = split(rbody, &rpick, "t^q")?;
        for e in [&f, &g, s, n, m, r] {
            if mentions_t(e) {
                return Err(shape(format!("{} depends on t outside the power", format_expr(e))));
            }
        }
        if pred_mentions_t(&identity.validity) {
            return Err(shape("validity depends on t"));
        }
        let k = SumExpr::var(K);
        Ok(StandardFormIdentity {
            name: identity.id.clone(),
            params: identity.params.iter().filter(|p| p.name != T).cloned().collect(),
            validity: identity.validity.clone(),
            f: f.substitute_var(li, &k),
            g: g.substitute_var(ri, &k),
            p: affine(&pe, li)?,
            q: affine(&qe, ri)?,
            s: s.clone(),
            n: n.clone(),
            m: m.clone(),
            r: r.clone(),
        })
    }

    /// Recognise `identity` and check it exactly at a sample of bindings.
    pub fn register(identity: &Identity) -> Result<Self> {
        let sf = Self::from_identity(identity)?;
        let mut ranges: Ranges = identity
            .params
            .iter()
            .map(|p| {
                let vals = match (p.name.as_str(), p.kind) {
                    (T, _) => vec![rat(0, 1), rat(1, 1), rat(-1, 2)],
                    (_, ParamKind::Natural) => int_range(0, 6),
                    (_, ParamKind::Grid) => vec![rat(0, 1), rat(1, 2), rat(1, 1)],
                    (_, ParamKind::Rational) => vec![rat(-1, 1), rat(1, 2), rat(2, 1)],
                };
                (p.name.clone(), vals)
            })
            .collect();
        ranges.sort_by_key(|(name, _)| identity.params.iter().position(|p| &p.name == name));
        for b in bindings(&ranges) {
            let res = verify_instance(identity, &b, Mode::Exact);
            if res.status.is_bad() {
                return Err(shape(format!("{} does not hold at {b}", identity.id)));
            }
            if matches!(res.status, Status::Skipped { .. }) {
                continue;
            }
            for (lo, hi, map) in [(&sf.s, &sf.n, sf.p), (&sf.m, &sf.r, sf.q)] {
                let (lo, hi) = (int_at(lo, &b)?, int_at(hi, &b)?);
                for k in lo..=hi {
                    if map.a * k + map.b < 0 {
                        return Err(shape(format!("negative exponent at k = {k}, {b}")));
                    }
                }
            }
        }
        Ok(sf)
    }
}

fn int_at(e: &SumExpr, b: &ParamBinding) -> Result<i64> {
    eval_exact(e, b)?
        .as_integer()
        .and_then(|n| n.to_i64())
        .ok_or_else(|| Error::NonInteger(format_expr(e)))
}

const INPUTS: &[(&str, &str)] = &[
    ("binomial", "identity binomial(n: nat, t: rat) : sum(k=n..n) (1+t)^k == sum(k=0..n) C(n,k) * t^k"),
    (
        "binomial-x",
        "identity binomial-x(n: nat, x: rat, t: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * (1+t)^k * (1-x)^(n-k) == sum(k=0..n) C(n,k) * t^k * x^(n-k)",
    ),
    (
        "binomial-xy",
        "identity binomial-xy(n: nat, x: rat, t: rat) : sum(k=0..n) C(n,k) * (1-x)^k * (1+t)^k * x^(n-k) == sum(k=0..n) C(n,k) * t^k * (1-x)^k",
    ),
    (
        "waring",
        "identity waring(n: nat, t: rat) requires n >= 1 : sum(k=0..floor(n/2)) 2^(1-n) * C(n,2*k) * (1+t)^k == sum(k=0..floor(n/2)) n/(n-k) * C(n-k,k) * 2^(-2*k) * t^k",
    ),
    (
        "waring-dual",
        "identity waring-dual(n: nat, t: rat) : sum(k=0..floor(n/2)) 2^(-n) * C(n+1,2*k+1) * (1+t)^k == sum(k=0..floor(n/2)) C(n-k,k) * 2^(-2*k) * t^k",
    ),
    (
        "simons",
        "identity simons(n: nat, t: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * C(n+k,k) * (1+t)^k == sum(k=0..n) C(n,k) * C(n+k,k) * t^k",
    ),
];

/// Names of the registered inputs.
pub fn input_names() -> Vec<&'static str> {
    INPUTS.iter().map(|(n, _)| *n).collect()
}

/// The registered input `name` in standard form.
pub fn input_form(name: &str) -> Result<StandardFormIdentity> {
    let (_, text) = INPUTS.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownId(name.to_string()))?;
    StandardFormIdentity::register(&parse_identity(text)?)
}

/// Which side of `t = -sin^2` carries the cosine-parity filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Integrate against `t^q`; the `q` side keeps only even exponents.
    ForwardOnQ,
    /// Integrate against `(1+t)^p`; the `p` side keeps only even exponents.
    ReverseOnP,
}

/// The transform operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Beta01,
    XyPair,
    YMinus1,
    SinSub,
    CosParity(Side),
    PowerForm,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Beta01 => "beta01",
            Op::XyPair => "xy",
            Op::YMinus1 => "y-minus1",
            Op::SinSub => "sin-sub",
            Op::CosParity(Side::ForwardOnQ) => "cos-parity",
            Op::CosParity(Side::ReverseOnP) => "cos-parity-rev",
            Op::PowerForm => "power-form",
        }
    }

    pub fn parse(name: &str) -> Result<Op> {
        Ok(match name {
            "beta01" => Op::Beta01,
            "xy" | "xy-pair" => Op::XyPair,
            "y-minus1" => Op::YMinus1,
            "sin-sub" => Op::SinSub,
            "cos-parity" => Op::CosParity(Side::ForwardOnQ),
            "cos-parity-rev" => Op::CosParity(Side::ReverseOnP),
            "power-form" => Op::PowerForm,
            other => return Err(Error::UnknownId(other.to_string())),
        })
    }

    pub fn all() -> [Op; 7] {
        [
            Op::Beta01,
            Op::XyPair,
            Op::YMinus1,
            Op::SinSub,
            Op::CosParity(Side::ForwardOnQ),
            Op::CosParity(Side::ReverseOnP),
            Op::PowerForm,
        ]
    }
}

/// Apply `op`; `u` and `v` fix those parameters to expressions, `None` leaves them free on the grid.
pub fn apply(sf: &StandardFormIdentity, op: Op, u: Option<SumExpr>, v: Option<SumExpr>) -> Result<Vec<Identity>> {
    Ok(match op {
        Op::Beta01 => vec![t_beta01(sf, u, v)?],
        Op::XyPair => {
            let (a, b) = t_xy_pair(sf, u, v)?;
            vec![a, b]
        }
        Op::YMinus1 => vec![t_y_minus1(sf, u, v)?],
        Op::SinSub => vec![t_sin_sub(sf, u, v)?],
        Op::CosParity(side) => vec![t_cos_parity(sf, side, v)?],
        Op::PowerForm => {
            let (a, b) = t_power_form(sf, v)?;
            vec![a, b]
        }
    })
}

/// Parse a `--u`/`--v` style argument in the scope of `sf`'s parameters.
pub fn parse_shift(sf: &StandardFormIdentity, text: &str) -> Result<SumExpr> {
    let names: Vec<&str> = sf.params.iter().map(|p| p.name.as_str()).collect();
    Ok(parse_expr(text, &names)?)
}

/// Source text of `e`, parenthesised unless it is a single token.
fn atom(e: &SumExpr) -> String {
    let s = format_expr(e);
    if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        s
    } else {
        format!("({s})")
    }
}

fn constant(e: &SumExpr) -> Option<BigRational> {
    if !e.params().is_empty() || !e.free_vars().is_empty() {
        return None;
    }
    eval_exact(e, &ParamBinding::new()).ok()?.as_rational()
}

fn tag(e: &SumExpr) -> String {
    match constant(e) {
        Some(q) => {
            let sign = if q.is_negative() { "m" } else { "" };
            let (num, den) = (q.numer().abs(), q.denom().clone());
            if den.is_one() {
                format!("{sign}{num}")
            } else {
                format!("{sign}{num}_{den}")
            }
        }
        None => format_expr(e).chars().filter(|c| c.is_ascii_alphanumeric()).collect(),
    }
}

fn is_zero(e: &Option<SumExpr>) -> bool {
    e.as_ref().and_then(constant).is_some_and(|q| q.is_zero())
}

/// Shared scaffolding for one emitted identity.
struct Emit<'a> {
    sf: &'a StandardFormIdentity,
    id: String,
    params: Vec<String>,
    conds: Vec<String>,
    u: String,
    v: String,
}

impl<'a> Emit<'a> {
    fn new(sf: &'a StandardFormIdentity, op: &str, u: Option<&Option<SumExpr>>, v: &Option<SumExpr>) -> Result<Self> {
        let mut id = format!("{}-{op}", sf.name);
        let mut params: Vec<String> = sf.params.iter().map(|p| format!("{}: {}", p.name, p.kind.keyword())).collect();
        let mut shift = |name: &str, e: &Option<SumExpr>| -> Result<String> {
            match e {
                Some(e) => {
                    id.push_str(&format!("-{name}{}", tag(e)));
                    Ok(atom(e))
                }
                None => {
                    if sf.params.iter().any(|p| p.name == name) {
                        return Err(shape(format!("input already has a parameter {name}")));
                    }
                    params.push(format!("{name}: grid"));
                    Ok(name.to_string())
                }
            }
        };
        let u = match u {
            Some(u) => shift("u", u)?,
            None => String::new(),
        };
        let v = shift("v", v)?;
        let conds = match &sf.validity {
            Predicate::True => vec![],
            p => vec![format_predicate(p)],
        };
        Ok(Emit { sf, id, params, conds, u, v })
    }

    /// Require `e > -1` eagerly when `e` is constant, and in the validity otherwise.
    fn above_minus_one(&mut self, text: &str, what: &str) -> Result<()> {
        if self.params.contains(&format!("{text}: grid")) {
            return Ok(());
        }
        let names: Vec<&str> = self.sf.params.iter().map(|p| p.name.as_str()).collect();
        if let Ok(e) = parse_expr(text, &names) {
            if let Some(q) = constant(&e) {
                if q <= rat(-1, 1) {
                    return Err(Error::OutOfDomain(format!("{what} = {q} must exceed -1")));
                }
                return Ok(());
            }
        }
        self.conds.push(format!("{text} > -1"));
        Ok(())
    }

    /// `body(j) > -1` for every `j` in `lo..hi`.
    fn forall(&mut self, lo: &SumExpr, hi: &SumExpr, body: &str) {
        self.conds.push(format!("forall(j={}..{}) {body} > -1", format_expr(lo), format_expr(hi)));
    }

    fn finish(self, lhs: String, rhs: String) -> Result<Identity> {
        let requires = if self.conds.is_empty() { String::new() } else { format!(" requires {}", self.conds.join(" and ")) };
        let text = format!("identity {}({}){requires} : {lhs} == {rhs}", self.id, self.params.join(", "));
        let id = parse_identity(&text)?;
        closure_check(&id)?;
        Ok(id)
    }
}

/// `c * map(k)` as source text.
fn km(map: IndexMap, c: i64) -> String {
    format_expr(&IndexMap { a: map.a * c, b: map.b * c }.apply(K))
}

/// `map(k)` as a single operand.
fn pk(map: IndexMap) -> String {
    atom(&map.apply(K))
}

fn pj(map: IndexMap) -> String {
    atom(&map.apply("j"))
}

/// `map(k) / 2`, simplified when both coefficients are even.
fn half(map: IndexMap) -> String {
    if map.a % 2 == 0 && map.b % 2 == 0 {
        km(IndexMap { a: map.a / 2, b: map.b / 2 }, 1)
    } else {
        format!("({})/2", km(map, 1))
    }
}

/// Source text of `e` as one factor of a product.
fn weight(e: &SumExpr) -> String {
    match e {
        SumExpr::Add(_) | SumExpr::Neg(_) | SumExpr::Sum { .. } => format!("({})", format_expr(e)),
        _ => format_expr(e),
    }
}

/// Sweep `identity` over a small grid and fail on any mismatch or evaluation failure.
pub fn closure_check(identity: &Identity) -> Result<()> {
    let ranges: Ranges = identity
        .params
        .iter()
        .map(|p| {
            let vals = match p.kind {
                ParamKind::Natural if p.name == "n" => int_range(0, 6),
                ParamKind::Natural => int_range(0, 3),
                ParamKind::Grid => vec![rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1)],
                ParamKind::Rational => vec![rat(-1, 1), rat(1, 2), rat(2, 1)],
            };
            (p.name.clone(), vals)
        })
        .collect();
    let bad: Vec<String> = sweep(identity, &ranges, Mode::Exact)
        .into_iter()
        .filter(|r| r.status.is_bad())
        .take(3)
        .map(|r| format!("{} at {}", r.status.name(), r.binding))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::TransformVerification(format!("{}: {}", identity.id, bad.join("; "))))
    }
}

/// Integrate against `x^u (1-x)^v` on `[0, 1]` with `t = -x`.
pub fn t_beta01(sf: &StandardFormIdentity, u: Option<SumExpr>, v: Option<SumExpr>) -> Result<Identity> {
    let particular = is_zero(&u) && is_zero(&v);
    let mut e = Emit::new(sf, "beta01", Some(&u), &v)?;
    let (us, vs) = (e.u.clone(), e.v.clone());
    e.above_minus_one(&us, "u")?;
    e.above_minus_one(&vs, "v")?;
    let (f, g, p, q) = (weight(&sf.f), weight(&sf.g), km(sf.p, 1), km(sf.q, 1));
    let sq = pk(sf.q);
    let (s, n, m, r) = (format_expr(&sf.s), format_expr(&sf.n), format_expr(&sf.m), format_expr(&sf.r));
    let (lhs, rhs) = if particular {
        (format!("sum(k={s}..{n}) {f} / ({p} + 1)"), format!("sum(k={m}..{r}) (-1)^{sq} * {g} / ({q} + 1)"))
    } else {
        (
            format!("sum(k={s}..{n}) {f} * Cinv({p} + {us} + {vs} + 1, {us} + 1)"),
            format!("({us} + 1)/({vs} + 1) * sum(k={m}..{r}) (-1)^{sq} * {g} * Cinv({q} + {us} + {vs} + 1, {vs} + 1)"),
        )
    };
    e.finish(lhs, rhs)
}

/// Integrate both sides over a quarter period of `sin^(2u+v) cos^v` with `t = -sin^2`, once
/// in each direction.
pub fn t_xy_pair(sf: &StandardFormIdentity, u: Option<SumExpr>, v: Option<SumExpr>) -> Result<(Identity, Identity)> {
    let particular = is_zero(&v);
    let build = |mirror: bool| -> Result<Identity> {
        let mut e = Emit::new(sf, if mirror { "xy-mirror" } else { "xy" }, Some(&u), &v)?;
        let (us, vs) = (e.u.clone(), e.v.clone());
        e.above_minus_one(&vs, "v")?;
        e.above_minus_one(&format!("{us} + {vs}"), "u + v")?;
        e.forall(&sf.s, &sf.n, &format!("2*({us} - {}) + {vs}", pj(sf.p)));
        e.forall(&sf.m, &sf.r, &format!("2*({us} - {}) + {vs}", pj(sf.q)));
        e.forall(&sf.m, &sf.r, &format!("2*{} + {vs}", pj(sf.q)));
        e.forall(&sf.s, &sf.n, &format!("2*{} + {vs}", pj(sf.p)));
        let (s, n, m, r) = (format_expr(&sf.s), format_expr(&sf.n), format_expr(&sf.m), format_expr(&sf.r));
        // weight, exponent, range and sign of the side carrying 2^(2e), then of the other side
        let (a, am, (alo, ahi), asign, b, bm, (blo, bhi), bsign) = if mirror {
            (&sf.g, sf.q, (m, r), format!("(-1)^{} * ", pk(sf.q)), &sf.f, sf.p, (s, n), format!("(-1)^{} * ", pk(sf.p)))
        } else {
            (&sf.f, sf.p, (s, n), String::new(), &sf.g, sf.q, (m, r), String::new())
        };
        let (a, b) = (weight(a), weight(b));
        let (ae, be) = (pk(am), pk(bm));
        let (a2, b2, b1) = (km(am, 2), km(bm, 2), km(bm, 1));
        let (lhs, rhs) = if particular {
            (
                format!("sum(k={alo}..{ahi}) {asign}{a} * 2^({a2}) * C(2*({us} - {ae}), {us} - {ae})"),
                format!("sum(k={blo}..{bhi}) {bsign}{b} * C(2*({us} - {be}), {us} - {be}) * C({b2}, {b1}) * Cinv({us}, {b1})"),
            )
        } else {
            let top = |x: &str| format!("2*({us} - {x}) + {vs}");
            (
                format!(
                    "sum(k={alo}..{ahi}) {asign}{a} * 2^({a2}) * C({t}, ({t})/2) * Cinv({us} - {ae} + {vs}, {vs}/2)",
                    t = top(&ae)
                ),
                format!(
                    "Cinv({vs}, {vs}/2) * sum(k={blo}..{bhi}) {bsign}{b} * C({t}, ({t})/2) * C({l}, ({l})/2) * Cinv({us} + {vs}, ({l})/2)",
                    t = top(&be),
                    l = format!("{b2} + {vs}")
                ),
            )
        };
        e.finish(lhs, rhs)
    };
    Ok((build(false)?, build(true)?))
}

/// Integrate against `x^(u-p) (1-x)^(p+v)` style weights with `t = -1/(1-x)`, reading the
/// polynomial at `y = -1`.
pub fn t_y_minus1(sf: &StandardFormIdentity, u: Option<SumExpr>, v: Option<SumExpr>) -> Result<Identity> {
    let particular = is_zero(&v);
    let mut e = Emit::new(sf, "y-minus1", Some(&u), &v)?;
    let (us, vs) = (e.u.clone(), e.v.clone());
    e.above_minus_one(&vs, "v")?;
    e.forall(&sf.s, &sf.n, &format!("{us} - {}", pj(sf.p)));
    e.forall(&sf.s, &sf.n, &format!("{} + {vs}", pj(sf.p)));
    e.forall(&sf.m, &sf.r, &format!("{us} - {}", pj(sf.q)));
    let (f, g, p, q) = (weight(&sf.f), weight(&sf.g), pk(sf.p), pk(sf.q));
    let p1 = km(sf.p, 1);
    let (s, n, m, r) = (format_expr(&sf.s), format_expr(&sf.n), format_expr(&sf.m), format_expr(&sf.r));
    let (lhs, rhs) = if particular {
        (
            format!("sum(k={s}..{n}) (-1)^{p} * {f} * Cinv({us}, {p1})"),
            format!("({us} + 1) * sum(k={m}..{r}) (-1)^{q} * {g} / ({us} - {q} + 1)"),
        )
    } else {
        (
            format!("sum(k={s}..{n}) (-1)^{p} * {f} * Cinv({us} + {vs}, {us} - {p})"),
            format!(
                "({us} + {vs} + 1)/({vs} + 1) * sum(k={m}..{r}) (-1)^{q} * {g} * Cinv({us} - {q} + {vs} + 1, {vs} + 1)"
            ),
        )
    };
    e.finish(lhs, rhs)
}

/// Integrate against `sin^u cos^v` over a quarter period with `t = -sin^2`.
pub fn t_sin_sub(sf: &StandardFormIdentity, u: Option<SumExpr>, v: Option<SumExpr>) -> Result<Identity> {
    let particular = is_zero(&u) && is_zero(&v);
    let mut e = Emit::new(sf, "sin-sub", Some(&u), &v)?;
    let (us, vs) = (e.u.clone(), e.v.clone());
    e.above_minus_one(&us, "u")?;
    e.above_minus_one(&vs, "v")?;
    let (f, g, sq) = (weight(&sf.f), weight(&sf.g), pk(sf.q));
    let (p1, p2, pm2) = (km(sf.p, 1), km(sf.p, 2), km(sf.p, -2));
    let (q1, q2, qm2) = (km(sf.q, 1), km(sf.q, 2), km(sf.q, -2));
    let (s, n, m, r) = (format_expr(&sf.s), format_expr(&sf.n), format_expr(&sf.m), format_expr(&sf.r));
    let (lhs, rhs) = if particular {
        (
            format!("sum(k={s}..{n}) {f} * 2^({pm2}) * C({p2}, {p1})"),
            format!("sum(k={m}..{r}) (-1)^{sq} * {g} * 2^({qm2}) * C({q2}, {q1})"),
        )
    } else {
        (
            format!(
                "sum(k={s}..{n}) {f} * 2^({pm2}) * C({vs}, {vs}/2) * C({p2} + {us}, ({p2} + {us})/2) * Cinv(({p2} + {us} + {vs})/2, {vs}/2)"
            ),
            format!(
                "sum(k={m}..{r}) (-1)^{sq} * {g} * 2^({qm2}) * C({us}, {us}/2) * C({q2} + {vs}, ({q2} + {vs})/2) * Cinv(({q2} + {us} + {vs})/2, {us}/2)"
            ),
        )
    };
    e.finish(lhs, rhs)
}

/// Terms of `map` over `lo..hi` with even exponent: `None` when there are none, otherwise the
/// substitution `k -> c*k + d` and the new bounds.
fn survivors(map: IndexMap, lo: &SumExpr, hi: &SumExpr) -> Option<((i64, i64), String, String)> {
    let fold = |e: &SumExpr, shift: i64, ceil: bool| -> String {
        if let Some(q) = constant(e) {
            if q.is_integer() {
                let x = q.to_integer() + shift;
                let h = if ceil { x.div_ceil(&BigInt::from(2)) } else { x.div_floor(&BigInt::from(2)) };
                return h.to_string();
            }
        }
        let arg = if shift == 0 { atom(e) } else { format!("({} + {shift})", format_expr(e)) };
        format!("{}({arg}/2)", if ceil { "ceil" } else { "floor" })
    };
    match (map.a.rem_euclid(2), map.b.rem_euclid(2)) {
        (0, 0) => Some(((1, 0), format_expr(lo), format_expr(hi))),
        (0, _) => None,
        (_, 0) => Some(((2, 0), fold(lo, 0, true), fold(hi, 0, false))),
        _ => Some(((2, -1), fold(lo, 2, false), fold(hi, 0, true))),
    }
}

/// Integrate against `cos^v` over a half period with `t = -sin^2` (or `t = -cos^2`), where odd
/// powers of the cosine integrate to zero.
pub fn t_cos_parity(sf: &StandardFormIdentity, side: Side, v: Option<SumExpr>) -> Result<Identity> {
    let particular = is_zero(&v);
    let op = Op::CosParity(side).name();
    let mut e = Emit::new(sf, op, None, &v)?;
    let vs = e.v.clone();
    e.above_minus_one(&vs, "v")?;
    let (full, fmap, (flo, fhi), fsign, part, pmap, (plo, phi)) = match side {
        Side::ForwardOnQ => (&sf.f, sf.p, (&sf.s, &sf.n), String::new(), &sf.g, sf.q, (&sf.m, &sf.r)),
        Side::ReverseOnP => (&sf.g, sf.q, (&sf.m, &sf.r), format!("(-1)^{} * ", pk(sf.q)), &sf.f, sf.p, (&sf.s, &sf.n)),
    };
    let (x1, x2, xm) = (km(fmap, 1), km(fmap, 2), km(fmap, -1));
    let (lo, hi, w) = (format_expr(flo), format_expr(fhi), weight(full));
    let lhs = if particular {
        format!("sum(k={lo}..{hi}) {fsign}{w} * 2^({xm}) * C({x2}, {x1})")
    } else {
        format!("sum(k={lo}..{hi}) {fsign}{w} * 2^({xm}) * C({x2} + {vs}, ({x2} + {vs})/2) * Cinv({x1} + {vs}, {vs}/2)")
    };
    let rhs = match survivors(pmap, plo, phi) {
        None => "0".to_string(),
        Some(((c, d), lo, hi)) => {
            let w = weight(&part.substitute_var(K, &IndexMap { a: c, b: d }.apply(K)));
            let y = pmap.compose(c, d);
            let (y1, ym, yh) = (km(y, 1), km(y, -1), half(y));
            if particular {
                format!("sum(k={lo}..{hi}) {w} * 2^({ym}) * C({y1}, {yh})")
            } else {
                format!("sum(k={lo}..{hi}) {w} * 2^({ym}) * C({y1}, {yh}) * Cinv(({y1} + {vs})/2, {vs}/2)")
            }
        }
    };
    e.finish(lhs, rhs)
}

/// Both cosine-parity transforms of an input whose exponents are both the identity map.
pub fn t_power_form(sf: &StandardFormIdentity, v: Option<SumExpr>) -> Result<(Identity, Identity)> {
    let id = IndexMap { a: 1, b: 0 };
    if sf.p != id || sf.q != id {
        return Err(shape("power form needs p(k) = q(k) = k"));
    }
    let rename = |mut i: Identity, from: &str, to: &str| {
        i.id = i.id.replacen(from, to, 1);
        i
    };
    let fwd = t_cos_parity(sf, Side::ForwardOnQ, v.clone())?;
    let rev = t_cos_parity(sf, Side::ReverseOnP, v)?;
    Ok((
        rename(fwd, "-cos-parity", "-power-form"),
        rename(rev, "-cos-parity-rev", "-power-form-mirror"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::dsl::format_identity;
    use crate::verify::{sides_agree, Agreement, Value};
    use crate::PiValue;

    fn lit(n: i64, d: i64) -> Option<SumExpr> {
        Some(SumExpr::rat(rat(n, d)))
    }

    #[test]
    fn inputs_register() {
        for name in input_names() {
            let sf = input_form(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(sf.name, name);
        }
        let w = input_form("waring").unwrap();
        assert_eq!(w.p, IndexMap { a: 1, b: 0 });
        assert_eq!(format_expr(&w.n), "floor(n / 2)");
        let b = input_form("binomial").unwrap();
        assert_eq!(b.f, SumExpr::int(1));
    }

    #[test]
    fn index_map_text() {
        assert_eq!(format_expr(&IndexMap { a: 2, b: -1 }.apply("k")), "2 * k - 1");
        assert_eq!(format_expr(&IndexMap { a: 1, b: 0 }.apply("k")), "k");
        assert_eq!(format_expr(&IndexMap { a: 0, b: 3 }.apply("k")), "3");
    }

    #[test]
    fn rejects_non_standard_shapes() {
        let bad = [
            "identity a(n: nat) : sum(k=0..n) C(n,k) == 2^n",
            "identity b(n: nat, t: rat) : sum(k=0..n) C(n,k) * t^k == (1+t)^n",
            "identity c(n: nat, t: rat) : sum(k=0..n) C(n,k) * (1+t)^(k*k) == sum(k=0..n) t^k",
            "identity d(n: nat, t: rat) : sum(k=0..n) t * (1+t)^k == sum(k=0..n) t^k",
        ];
        for text in bad {
            let id = parse_identity(text).unwrap();
            assert!(matches!(StandardFormIdentity::from_identity(&id), Err(Error::ShapeMismatch(_))), "{text}");
        }
        let wrong = parse_identity("identity e(n: nat, t: rat) : sum(k=0..n) (1+t)^k == sum(k=0..n) t^k").unwrap();
        assert!(matches!(StandardFormIdentity::register(&wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn power_form_needs_identity_maps() {
        let w = input_form("waring").unwrap();
        assert!(t_power_form(&w, None).is_ok());
        let sf = StandardFormIdentity::register(
            &parse_identity("identity q2(n: nat, t: rat) : sum(k=n..n) (1+t)^(2*k) == sum(k=0..2*n) C(2*n,k) * t^k")
                .unwrap(),
        )
        .unwrap();
        assert!(matches!(t_power_form(&sf, None), Err(Error::ShapeMismatch(_))));
        // every exponent of 2*k is even, so the full range survives
        let id = t_cos_parity(&sf, Side::ReverseOnP, lit(0, 1)).unwrap();
        let rhs = crate::dsl::format_expr(&id.rhs[0].expr);
        assert!(rhs.starts_with("sum(k=n..n)"), "{rhs}");
    }

    #[test]
    fn beta01_spot_value() {
        let sf = input_form("binomial-x").unwrap();
        let id = t_beta01(&sf, lit(0, 1), lit(0, 1)).unwrap();
        assert_eq!(id.id, "binomial-x-beta01-u0-v0");
        let b = ParamBinding::new().with_int("n", 1).with("x", rat(0, 1));
        let r = verify_instance(&id, &b, Mode::Exact);
        assert_eq!(r.status, Status::ExactEqual);
        assert_eq!(r.lhs, Some(Value::Exact(PiValue::from_rational(rat(-1, 2)))));
    }

    #[test]
    fn literal_domain_violations() {
        let sf = input_form("binomial").unwrap();
        assert!(matches!(t_beta01(&sf, lit(-1, 1), None), Err(Error::OutOfDomain(_))));
        assert!(matches!(t_sin_sub(&sf, None, lit(-3, 2)), Err(Error::OutOfDomain(_))));
        let id = t_beta01(&sf, lit(-1, 2), None).unwrap();
        assert_eq!(id.id, "binomial-beta01-um1_2");
    }

    #[test]
    fn xy_domain_skips() {
        let sf = input_form("binomial").unwrap();
        let (a, b) = t_xy_pair(&sf, None, None).unwrap();
        let bind = ParamBinding::new().with_int("n", 6).with_int("u", 1).with_int("v", 0);
        assert!(matches!(verify_instance(&a, &bind, Mode::Exact).status, Status::Skipped { .. }));
        let ok = ParamBinding::new().with_int("n", 3).with_int("u", 4).with_int("v", 2);
        assert_eq!(verify_instance(&b, &ok, Mode::Exact).status, Status::ExactEqual);
        let (a0, _) = t_xy_pair(&sf, Some(parse_shift(&sf, "n").unwrap()), lit(0, 1)).unwrap();
        assert_eq!(a0.id, "binomial-xy-un-v0");
        for n in 0..10 {
            let r = verify_instance(&a0, &ParamBinding::new().with_int("n", n), Mode::Exact);
            assert_eq!(r.status, Status::ExactEqual, "{n}");
        }
    }

    #[test]
    fn y_minus1_particular() {
        let sf = input_form("binomial").unwrap();
        let id = t_y_minus1(&sf, Some(parse_shift(&sf, "n").unwrap()), lit(0, 1)).unwrap();
        for n in 0..=10 {
            let r = verify_instance(&id, &ParamBinding::new().with_int("n", n), Mode::Exact);
            assert_eq!(r.status, Status::ExactEqual, "{n}");
        }
        let empty = StandardFormIdentity::register(
            &parse_identity("identity empty(n: nat, t: rat) : sum(k=1..0) (1+t)^k == sum(k=1..0) t^k").unwrap(),
        )
        .unwrap();
        let id = t_y_minus1(&empty, None, None).unwrap();
        let r = verify_instance(&id, &ParamBinding::new().with_int("n", 2).with_int("u", 1).with_int("v", 1), Mode::Exact);
        assert_eq!(r.lhs, Some(Value::Exact(PiValue::zero())));
        assert_eq!(r.status, Status::ExactEqual);
    }

    #[test]
    fn printed_y_minus1_form_fails() {
        // the right-hand binomial written as C(u-q+1, v+1) does not hold
        let text = "identity printed(n: nat, u: grid, v: grid) requires forall(j=0..n) u - j > -1 : \
                    sum(k=0..n) (-1)^k * C(n,k) * Cinv(u + v, u - k) == \
                    (u + v + 1)/(v + 1) * sum(k=n..n) (-1)^k * Cinv(u - k + 1, v + 1)";
        let id = parse_identity(text).unwrap();
        assert!(closure_check(&id).is_err());
        let sf = input_form("binomial").unwrap();
        let good = t_y_minus1(&sf, None, None).unwrap();
        let bind = ParamBinding::new().with_int("n", 2).with_int("u", 3).with_int("v", 1);
        assert_eq!(verify_instance(&good, &bind, Mode::Exact).status, Status::ExactEqual);
    }

    #[test]
    fn every_op_closes_on_every_input() {
        for name in input_names() {
            let sf = input_form(name).unwrap();
            for op in Op::all() {
                match apply(&sf, op, None, None) {
                    Ok(ids) => {
                        for id in ids {
                            let text = format_identity(&id);
                            assert_eq!(parse_identity(&text).unwrap(), id, "{text}");
                        }
                    }
                    Err(Error::ShapeMismatch(_)) if op == Op::PowerForm => {}
                    Err(e) => panic!("{name} {}: {e}", op.name()),
                }
            }
        }
    }

    fn extensional(emitted: &Identity, target: &str, swapped: bool) {
        let entry = lookup(target).unwrap();
        let mut agree = 0;
        for b in bindings(&entry.ranges) {
            match sides_agree(emitted, &entry.identity, &b, swapped, None) {
                Agreement::Exact | Agreement::Numeric => agree += 1,
                Agreement::NotApplicable => {}
                Agreement::Disagree(d) => panic!("{} vs {target}: {d}", emitted.id),
            }
        }
        assert!(agree > 0);
    }

    #[test]
    fn reproduces_catalog_entries() {
        let restrict = |id: &str| {
            let mut e = lookup(id).unwrap().clone();
            for (_, vals) in e.ranges.iter_mut() {
                vals.truncate(5);
            }
            e
        };
        let bx = input_form("binomial-x").unwrap();
        let id = t_beta01(&bx, None, None).unwrap();
        let entry = restrict("sf62i7f");
        for b in bindings(&entry.ranges) {
            assert!(!matches!(sides_agree(&id, &entry.identity, &b, false, None), Agreement::Disagree(_)));
        }
        let (pf, _) = t_power_form(&bx, None).unwrap();
        extensional(&pf, "qd43spp", false);
        let w = input_form("waring").unwrap();
        extensional(&t_sin_sub(&w, lit(0, 1), None).unwrap(), "rvlh5im", true);
        let s = input_form("simons").unwrap();
        extensional(&t_cos_parity(&s, Side::ForwardOnQ, None).unwrap(), "s9xhgba", false);
    }
}
