use num_traits::{One, Signed};

use crate::expr::{Case, Guard, Identity, Predicate, SumExpr};

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

/// Canonical text of an expression; reparses to the same tree.
pub fn format_expr(e: &SumExpr) -> String {
    fmt(e, 0, true)
}

pub fn format_predicate(p: &Predicate) -> String {
    match p {
        Predicate::True => "0 == 0".to_string(),
        Predicate::Cmp(a, op, b) => format!("{} {} {}", format_expr(a), op.symbol(), format_expr(b)),
        Predicate::And(items) => items.iter().map(format_predicate).collect::<Vec<_>>().join(" and "),
        Predicate::ForAll { index, lo, hi, body } => {
            let head = format!("forall({index}={}..{})", format_expr(lo), format_expr(hi));
            match body.as_ref() {
                Predicate::And(items) => items
                    .iter()
                    .map(|q| format!("{head} {}", format_predicate(q)))
                    .collect::<Vec<_>>()
                    .join(" and "),
                other => format!("{head} {}", format_predicate(other)),
            }
        }
    }
}

fn format_guard(g: &Guard) -> String {
    match g {
        Guard::Always => "always".to_string(),
        Guard::Even(n) => format!("even({n})"),
        Guard::Odd(n) => format!("odd({n})"),
        Guard::NonZero(n) => format!("nonzero({n})"),
    }
}

fn format_rhs(cases: &[Case]) -> String {
    if let [Case { guard: Guard::Always, expr }] = cases {
        return format_expr(expr);
    }
    let parts: Vec<String> =
        cases.iter().map(|c| format!("{} => {}", format_guard(&c.guard), format_expr(&c.expr))).collect();
    format!("cases {{ {} }}", parts.join("; "))
}

pub fn format_identity(id: &Identity) -> String {
    let params: Vec<String> = id.params.iter().map(|p| format!("{}: {}", p.name, p.kind.keyword())).collect();
    let requires = match &id.validity {
        Predicate::True => String::new(),
        p => format!(" requires {}", format_predicate(p)),
    };
    format!(
        "identity {}({}){} :\n    {}\n    == {}",
        id.id,
        params.join(", "),
        requires,
        format_expr(&id.lhs),
        format_rhs(&id.rhs)
    )
}

fn prec(e: &SumExpr) -> u8 {
    match e {
        SumExpr::Add(_) => ADD,
        SumExpr::Mul(_) | SumExpr::Div(..) => MUL,
        SumExpr::Neg(_) | SumExpr::Sum { .. } => UNARY,
        SumExpr::Int(n) if n.is_negative() => UNARY,
        SumExpr::Rat(q) if q.is_negative() => UNARY,
        SumExpr::Pow(..) | SumExpr::AltSign(_) => 4,
        _ => ATOM,
    }
}

fn is_literal(e: &SumExpr) -> bool {
    matches!(e, SumExpr::Int(_) | SumExpr::Rat(_))
}

/// `ctx` is the binding strength required by the surrounding position; `tail` is true when nothing
/// at product level follows, so a bare `sum` body cannot swallow a later factor.
fn fmt(e: &SumExpr, ctx: u8, tail: bool) -> String {
    let needs_parens = prec(e) < ctx || (matches!(e, SumExpr::Sum { .. }) && !tail);
    if needs_parens {
        return format!("({})", fmt(e, 0, true));
    }
    match e {
        SumExpr::Int(n) => n.to_string(),
        SumExpr::Rat(q) => format!("{}/{}", q.numer(), q.denom()),
        SumExpr::Param(p) | SumExpr::Var(p) => p.clone(),
        SumExpr::Neg(x) if is_literal(x) && !x_is_negative(x) => format!("-({})", fmt(x, 0, true)),
        SumExpr::Neg(x) => format!("-{}", fmt(x, UNARY, tail)),
        SumExpr::Add(items) => {
            let mut s = String::new();
            for (i, x) in items.iter().enumerate() {
                match x {
                    SumExpr::Neg(inner) if i > 0 => {
                        s.push_str(" - ");
                        s.push_str(&fmt(inner, MUL, true));
                    }
                    _ => {
                        if i > 0 {
                            s.push_str(" + ");
                        }
                        s.push_str(&fmt(x, MUL, true));
                    }
                }
            }
            s
        }
        SumExpr::Mul(items) => {
            let n = items.len();
            items
                .iter()
                .enumerate()
                .map(|(i, x)| fmt(x, UNARY, tail && i + 1 == n))
                .collect::<Vec<_>>()
                .join(" * ")
        }
        SumExpr::Div(a, b) => format!("{} / {}", fmt(a, MUL, false), fmt(b, UNARY, tail)),
        SumExpr::Pow(b, x) => {
            let base = if **b == SumExpr::Int(-num_bigint::BigInt::one()) {
                "((-1))".to_string()
            } else {
                fmt(b, ATOM, false)
            };
            format!("{base}^{}", exponent(x))
        }
        SumExpr::AltSign(x) => format!("(-1)^{}", exponent(x)),
        SumExpr::Binom(a, b) => format!("C({}, {})", format_expr(a), format_expr(b)),
        SumExpr::BinomInv(a, b) => format!("Cinv({}, {})", format_expr(a), format_expr(b)),
        SumExpr::Catalan(x) => format!("Cat({})", format_expr(x)),
        SumExpr::FloorHalf(x) => format!("floor({} / 2)", fmt(x, MUL, false)),
        SumExpr::CeilHalf(x) => format!("ceil({} / 2)", fmt(x, MUL, false)),
        SumExpr::Sum { index, lo, hi, body } => {
            format!("sum({index}={}..{}) {}", format_expr(lo), format_expr(hi), fmt(body, MUL, tail))
        }
    }
}

fn x_is_negative(e: &SumExpr) -> bool {
    match e {
        SumExpr::Int(n) => n.is_negative(),
        SumExpr::Rat(q) => q.is_negative(),
        _ => false,
    }
}

fn exponent(x: &SumExpr) -> String {
    if prec(x) == ATOM {
        fmt(x, ATOM, true)
    } else {
        format!("({})", format_expr(x))
    }
}
