//! Expression trees for finite parameterized sums and the identity objects built from them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SumExpr {
    Int(BigInt),
    Rat(BigRational),
    /// A declared parameter of the owning identity.
    Param(String),
    /// A summation or quantifier index.
    Var(String),
    Neg(Box<SumExpr>),
    Add(Vec<SumExpr>),
    Mul(Vec<SumExpr>),
    Div(Box<SumExpr>, Box<SumExpr>),
    /// Integer power; the exponent must evaluate to an integer.
    Pow(Box<SumExpr>, Box<SumExpr>),
    /// `(-1)^e`.
    AltSign(Box<SumExpr>),
    /// Generalized binomial `C(top, bottom)`; integer arguments use the integer definition.
    Binom(Box<SumExpr>, Box<SumExpr>),
    /// `C(top, bottom)^{-1}`.
    BinomInv(Box<SumExpr>, Box<SumExpr>),
    Catalan(Box<SumExpr>),
    /// `floor(e/2)`.
    FloorHalf(Box<SumExpr>),
    /// `ceil(e/2)`.
    CeilHalf(Box<SumExpr>),
    Sum { index: String, lo: Box<SumExpr>, hi: Box<SumExpr>, body: Box<SumExpr> },
}

impl SumExpr {
    pub fn int(n: i64) -> Self {
        SumExpr::Int(n.into())
    }

    pub fn rat(q: BigRational) -> Self {
        if q.is_integer() {
            SumExpr::Int(q.to_integer())
        } else {
            SumExpr::Rat(q)
        }
    }

    pub fn param(name: &str) -> Self {
        SumExpr::Param(name.to_string())
    }

    pub fn var(name: &str) -> Self {
        SumExpr::Var(name.to_string())
    }

    pub fn add(items: Vec<SumExpr>) -> Self {
        match items.len() {
            0 => SumExpr::int(0),
            1 => items.into_iter().next().expect("one item"),
            _ => SumExpr::Add(items),
        }
    }

    pub fn mul(items: Vec<SumExpr>) -> Self {
        match items.len() {
            0 => SumExpr::int(1),
            1 => items.into_iter().next().expect("one item"),
            _ => SumExpr::Mul(items),
        }
    }

    pub fn neg(e: SumExpr) -> Self {
        SumExpr::Neg(Box::new(e))
    }

    pub fn div(a: SumExpr, b: SumExpr) -> Self {
        SumExpr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(base: SumExpr, exp: SumExpr) -> Self {
        SumExpr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn alt(e: SumExpr) -> Self {
        SumExpr::AltSign(Box::new(e))
    }

    pub fn binom(top: SumExpr, bottom: SumExpr) -> Self {
        SumExpr::Binom(Box::new(top), Box::new(bottom))
    }

    pub fn binom_inv(top: SumExpr, bottom: SumExpr) -> Self {
        SumExpr::BinomInv(Box::new(top), Box::new(bottom))
    }

    pub fn sum(index: &str, lo: SumExpr, hi: SumExpr, body: SumExpr) -> Self {
        SumExpr::Sum { index: index.to_string(), lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body) }
    }

    /// Direct children in evaluation order.
    pub fn children(&self) -> Vec<&SumExpr> {
        match self {
            SumExpr::Int(_) | SumExpr::Rat(_) | SumExpr::Param(_) | SumExpr::Var(_) => vec![],
            SumExpr::Neg(e) | SumExpr::AltSign(e) | SumExpr::Catalan(e) | SumExpr::FloorHalf(e) | SumExpr::CeilHalf(e) => {
                vec![e]
            }
            SumExpr::Add(v) | SumExpr::Mul(v) => v.iter().collect(),
            SumExpr::Div(a, b) | SumExpr::Pow(a, b) | SumExpr::Binom(a, b) | SumExpr::BinomInv(a, b) => vec![a, b],
            SumExpr::Sum { lo, hi, body, .. } => vec![lo, hi, body],
        }
    }

    /// Every node of the tree, pre-order.
    pub fn subexprs(&self) -> Vec<&SumExpr> {
        let mut out = vec![self];
        for c in self.children() {
            out.extend(c.subexprs());
        }
        out
    }

    /// Names of `Var` nodes not bound by an enclosing `Sum` inside this expression.
    pub fn free_vars(&self) -> Vec<String> {
        fn walk(e: &SumExpr, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match e {
                SumExpr::Var(v) => {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                SumExpr::Sum { index, lo, hi, body } => {
                    walk(lo, bound, out);
                    walk(hi, bound, out);
                    bound.push(index.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
                other => {
                    for c in other.children() {
                        walk(c, bound, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn params(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in self.subexprs() {
            if let SumExpr::Param(p) = e {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        out
    }

    /// Replace free occurrences of the index `var` by `with`.
    pub fn substitute_var(&self, var: &str, with: &SumExpr) -> SumExpr {
        self.map_leaves(&|e| match e {
            SumExpr::Var(v) if v == var => Some(with.clone()),
            _ => None,
        }, Some(var))
    }

    /// Replace the parameter `name` by `with`.
    pub fn substitute_param(&self, name: &str, with: &SumExpr) -> SumExpr {
        self.map_leaves(&|e| match e {
            SumExpr::Param(p) if p == name => Some(with.clone()),
            _ => None,
        }, None)
    }

    fn map_leaves(&self, f: &dyn Fn(&SumExpr) -> Option<SumExpr>, shadow: Option<&str>) -> SumExpr {
        if let Some(r) = f(self) {
            return r;
        }
        let m = |e: &SumExpr| Box::new(e.map_leaves(f, shadow));
        match self {
            SumExpr::Int(_) | SumExpr::Rat(_) | SumExpr::Param(_) | SumExpr::Var(_) => self.clone(),
            SumExpr::Neg(e) => SumExpr::Neg(m(e)),
            SumExpr::AltSign(e) => SumExpr::AltSign(m(e)),
            SumExpr::Catalan(e) => SumExpr::Catalan(m(e)),
            SumExpr::FloorHalf(e) => SumExpr::FloorHalf(m(e)),
            SumExpr::CeilHalf(e) => SumExpr::CeilHalf(m(e)),
            SumExpr::Add(v) => SumExpr::Add(v.iter().map(|e| e.map_leaves(f, shadow)).collect()),
            SumExpr::Mul(v) => SumExpr::Mul(v.iter().map(|e| e.map_leaves(f, shadow)).collect()),
            SumExpr::Div(a, b) => SumExpr::Div(m(a), m(b)),
            SumExpr::Pow(a, b) => SumExpr::Pow(m(a), m(b)),
            SumExpr::Binom(a, b) => SumExpr::Binom(m(a), m(b)),
            SumExpr::BinomInv(a, b) => SumExpr::BinomInv(m(a), m(b)),
            SumExpr::Sum { index, lo, hi, body } => {
                let body = if shadow == Some(index.as_str()) { body.clone() } else { m(body) };
                SumExpr::Sum { index: index.clone(), lo: m(lo), hi: m(hi), body }
            }
        }
    }
}

impl From<i64> for SumExpr {
    fn from(n: i64) -> Self {
        SumExpr::int(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamKind {
    /// Non-negative integer.
    Natural,
    /// Real number greater than -1; exact evaluation needs the half-integer grid.
    Grid,
    /// Free rational variable.
    Rational,
}

impl ParamKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ParamKind::Natural => "nat",
            ParamKind::Grid => "grid",
            ParamKind::Rational => "rat",
        }
    }

    pub fn admits(self, q: &BigRational) -> bool {
        match self {
            ParamKind::Natural => q.is_integer() && !q.is_negative(),
            ParamKind::Grid => *q > -BigRational::one(),
            ParamKind::Rational => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
}

impl Param {
    pub fn new(name: &str, kind: ParamKind) -> Self {
        Self { name: name.to_string(), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Always,
    Even(String),
    Odd(String),
    NonZero(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    True,
    Cmp(SumExpr, CmpOp, SumExpr),
    And(Vec<Predicate>),
    ForAll { index: String, lo: SumExpr, hi: SumExpr, body: Box<Predicate> },
}

impl Predicate {
    pub fn and(items: Vec<Predicate>) -> Predicate {
        let mut flat = Vec::new();
        for p in items {
            match p {
                Predicate::True => {}
                Predicate::And(v) => flat.extend(v),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Predicate::True,
            1 => flat.pop().expect("one item"),
            _ => Predicate::And(flat),
        }
    }

    pub fn cmp(a: SumExpr, op: CmpOp, b: SumExpr) -> Predicate {
        Predicate::Cmp(a, op, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Case {
    pub guard: Guard,
    pub expr: SumExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub id: String,
    pub params: Vec<Param>,
    pub validity: Predicate,
    pub lhs: SumExpr,
    pub rhs: Vec<Case>,
}

impl Identity {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    /// A copy with `name` fixed to a literal value and removed from the parameter list.
    pub fn specialize(&self, name: &str, value: &BigRational) -> Identity {
        let lit = SumExpr::rat(value.clone());
        let sub = |e: &SumExpr| e.substitute_param(name, &lit);
        Identity {
            id: self.id.clone(),
            params: self.params.iter().filter(|p| p.name != name).cloned().collect(),
            validity: subst_pred(&self.validity, &sub),
            lhs: sub(&self.lhs),
            rhs: self.rhs.iter().map(|c| Case { guard: c.guard.clone(), expr: sub(&c.expr) }).collect(),
        }
    }
}

fn subst_pred(p: &Predicate, f: &dyn Fn(&SumExpr) -> SumExpr) -> Predicate {
    match p {
        Predicate::True => Predicate::True,
        Predicate::Cmp(a, op, b) => Predicate::Cmp(f(a), *op, f(b)),
        Predicate::And(v) => Predicate::And(v.iter().map(|q| subst_pred(q, f)).collect()),
        Predicate::ForAll { index, lo, hi, body } => Predicate::ForAll {
            index: index.clone(),
            lo: f(lo),
            hi: f(hi),
            body: Box::new(subst_pred(body, f)),
        },
    }
}

/// Parameter values; every value is an exact rational (decimal inputs included).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ParamBinding {
    values: BTreeMap<String, BigRational>,
}

impl ParamBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: BigRational) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn with_int(self, name: &str, value: i64) -> Self {
        self.with(name, BigRational::from_integer(value.into()))
    }

    pub fn set(&mut self, name: &str, value: BigRational) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&BigRational> {
        self.values.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.values.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for ParamBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Serialize for ParamBinding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, String> = self.values.iter().map(|(k, v)| (k, v.to_string())).collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamBinding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let m = BTreeMap::<String, String>::deserialize(d)?;
        let mut out = ParamBinding::new();
        for (k, v) in m {
            let q = crate::numeric::parse_decimal_rational(&v).ok_or_else(|| D::Error::custom(format!("bad value {v}")))?;
            out.set(&k, q);
        }
        Ok(out)
    }
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_respects_shadowing() {
        let inner = SumExpr::sum("k", SumExpr::int(0), SumExpr::var("k"), SumExpr::var("k"));
        let e = SumExpr::Add(vec![SumExpr::var("k"), inner.clone()]);
        let s = e.substitute_var("k", &SumExpr::int(3));
        let expected_inner = SumExpr::sum("k", SumExpr::int(0), SumExpr::int(3), SumExpr::var("k"));
        assert_eq!(s, SumExpr::Add(vec![SumExpr::int(3), expected_inner]));
    }

    #[test]
    fn free_vars_exclude_bound() {
        let e = SumExpr::sum("k", SumExpr::var("j"), SumExpr::param("n"), SumExpr::var("k"));
        assert_eq!(e.free_vars(), vec!["j".to_string()]);
        assert_eq!(e.params(), vec!["n".to_string()]);
    }

    #[test]
    fn kinds_admit() {
        assert!(ParamKind::Natural.admits(&rat(3, 1)));
        assert!(!ParamKind::Natural.admits(&rat(-1, 1)));
        assert!(!ParamKind::Natural.admits(&rat(1, 2)));
        assert!(ParamKind::Grid.admits(&rat(-1, 2)));
        assert!(!ParamKind::Grid.admits(&rat(-1, 1)));
        assert!(ParamKind::Rational.admits(&rat(-7, 3)));
    }
}
