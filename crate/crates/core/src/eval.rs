//! Exact evaluation of expressions, predicates and guards.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::PiValue;
use crate::expr::{CmpOp, Guard, ParamBinding, Predicate, SumExpr};
use crate::special::{self, binom_general, to_grid};

/// Index variables bound by enclosing sums, innermost last.
#[derive(Default)]
pub(crate) struct Scope {
    vars: Vec<(String, BigInt)>,
}

impl Scope {
    pub(crate) fn get(&self, name: &str) -> Option<&BigInt> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
    pub(crate) fn push(&mut self, name: &str, v: BigInt) {
        self.vars.push((name.to_string(), v));
    }
    pub(crate) fn pop(&mut self) {
        self.vars.pop();
    }
}

fn to_int(v: &PiValue, what: &str) -> Result<BigInt> {
    v.as_integer().ok_or_else(|| Error::NonInteger(format!("{what} = {v}")))
}

fn to_rat(v: &PiValue, what: &str) -> Result<BigRational> {
    v.as_rational().ok_or_else(|| Error::OffGrid(format!("{what} = {v} is not rational")))
}

pub(crate) fn small(n: &BigInt, what: &str) -> Result<i64> {
    n.to_i64().ok_or_else(|| Error::OutOfDomain(format!("{what} {n} too large")))
}

/// Exact value of `expr` under `binding`.
pub fn eval_exact(expr: &SumExpr, binding: &ParamBinding) -> Result<PiValue> {
    eval_in(expr, binding, &mut Scope::default())
}

/// Exact value with additional index variables already in scope.
pub fn eval_exact_with_vars(expr: &SumExpr, binding: &ParamBinding, vars: &[(String, BigInt)]) -> Result<PiValue> {
    let mut scope = Scope::default();
    for (n, v) in vars {
        scope.push(n, v.clone());
    }
    eval_in(expr, binding, &mut scope)
}

fn eval_int(expr: &SumExpr, b: &ParamBinding, s: &mut Scope, what: &str) -> Result<BigInt> {
    to_int(&eval_in(expr, b, s)?, what)
}

fn eval_in(expr: &SumExpr, b: &ParamBinding, s: &mut Scope) -> Result<PiValue> {
    match expr {
        SumExpr::Int(n) => Ok(PiValue::from_integer(n.clone())),
        SumExpr::Rat(q) => Ok(PiValue::from_rational(q.clone())),
        SumExpr::Param(p) => b
            .get(p)
            .map(|q| PiValue::from_rational(q.clone()))
            .ok_or_else(|| Error::UnboundParam(p.clone())),
        SumExpr::Var(v) => s
            .get(v)
            .map(|n| PiValue::from_integer(n.clone()))
            .ok_or_else(|| Error::UnboundParam(v.clone())),
        SumExpr::Neg(e) => Ok(-eval_in(e, b, s)?),
        SumExpr::Add(items) => {
            let mut acc = PiValue::zero();
            for e in items {
                acc = &acc + &eval_in(e, b, s)?;
            }
            Ok(acc)
        }
        SumExpr::Mul(items) => {
            let mut acc = PiValue::one();
            for e in items {
                acc = &acc * &eval_in(e, b, s)?;
            }
            Ok(acc)
        }
        SumExpr::Div(num, den) => {
            let n = eval_in(num, b, s)?;
            let d = eval_in(den, b, s)?.invert()?;
            Ok(n.mul_scalar(&d))
        }
        SumExpr::Pow(base, exp) => {
            let e = eval_int(exp, b, s, "exponent")?;
            let base = eval_in(base, b, s)?;
            base.pow(small(&e, "exponent")?)
        }
        SumExpr::AltSign(e) => {
            let e = eval_int(e, b, s, "sign exponent")?;
            Ok(PiValue::from_integer(if e.is_even() { 1 } else { -1 }))
        }
        SumExpr::Binom(top, bottom) => {
            let t = to_rat(&eval_in(top, b, s)?, "binomial top")?;
            let u = to_rat(&eval_in(bottom, b, s)?, "binomial bottom")?;
            Ok(binom_general(to_grid(&t)?, to_grid(&u)?)?.to_value())
        }
        SumExpr::BinomInv(top, bottom) => {
            let t = to_rat(&eval_in(top, b, s)?, "binomial top")?;
            let u = to_rat(&eval_in(bottom, b, s)?, "binomial bottom")?;
            Ok(binom_general(to_grid(&t)?, to_grid(&u)?)?.invert()?.to_value())
        }
        SumExpr::Catalan(e) => {
            let j = eval_int(e, b, s, "Catalan index")?;
            if j.is_negative() {
                return Err(Error::Undefined(format!("Catalan number of negative index {j}")));
            }
            let j = small(&j, "Catalan index")? as u64;
            Ok(PiValue::from_integer(special::catalan(j)))
        }
        SumExpr::FloorHalf(e) => Ok(PiValue::from_integer(special::floor_half(&eval_int(e, b, s, "floor argument")?))),
        SumExpr::CeilHalf(e) => Ok(PiValue::from_integer(special::ceil_half(&eval_int(e, b, s, "ceil argument")?))),
        SumExpr::Sum { index, lo, hi, body } => {
            let lo = eval_int(lo, b, s, "lower bound")?;
            let hi = eval_int(hi, b, s, "upper bound")?;
            let mut acc = PiValue::zero();
            let mut k = lo;
            while k <= hi {
                s.push(index, k.clone());
                let term = eval_in(body, b, s);
                s.pop();
                acc = &acc + &term?;
                k += 1;
            }
            Ok(acc)
        }
    }
}

/// Exact comparison of two values; values carrying powers of π are compared numerically.
fn compare(a: &PiValue, op: CmpOp, c: &PiValue) -> bool {
    match op {
        CmpOp::Eq => a == c,
        CmpOp::Ne => a != c,
        _ => match (a.as_rational(), c.as_rational()) {
            (Some(x), Some(y)) => op.holds(&x, &y),
            _ => {
                let x = a.to_float(40);
                let y = c.to_float(40);
                op.holds(&x, &y)
            }
        },
    }
}

/// Evaluate a validity predicate. Errors inside the predicate count as violations.
pub fn eval_predicate(p: &Predicate, binding: &ParamBinding) -> Result<bool> {
    pred_in(p, binding, &mut Scope::default())
}

fn pred_in(p: &Predicate, b: &ParamBinding, s: &mut Scope) -> Result<bool> {
    match p {
        Predicate::True => Ok(true),
        Predicate::Cmp(l, op, r) => Ok(compare(&eval_in(l, b, s)?, *op, &eval_in(r, b, s)?)),
        Predicate::And(items) => {
            for q in items {
                if !pred_in(q, b, s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Predicate::ForAll { index, lo, hi, body } => {
            let lo = eval_int(lo, b, s, "lower bound")?;
            let hi = eval_int(hi, b, s, "upper bound")?;
            let mut k = lo;
            while k <= hi {
                s.push(index, k.clone());
                let ok = pred_in(body, b, s);
                s.pop();
                if !ok? {
                    return Ok(false);
                }
                k += 1;
            }
            Ok(true)
        }
    }
}

/// Whether `guard` fires for `binding`.
pub fn guard_fires(guard: &Guard, binding: &ParamBinding) -> Result<bool> {
    let int_param = |name: &str| -> Result<BigInt> {
        let q = binding.get(name).ok_or_else(|| Error::UnboundParam(name.to_string()))?;
        if !q.is_integer() {
            return Err(Error::NonInteger(format!("{name} = {q}")));
        }
        Ok(q.to_integer())
    };
    Ok(match guard {
        Guard::Always => true,
        Guard::Even(n) => int_param(n)?.is_even(),
        Guard::Odd(n) => int_param(n)?.is_odd(),
        Guard::NonZero(n) => !binding.get(n).ok_or_else(|| Error::UnboundParam(n.clone()))?.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn e_knuth_lhs() -> SumExpr {
        let k = || SumExpr::var("k");
        let n = || SumExpr::param("n");
        SumExpr::sum(
            "k",
            SumExpr::int(0),
            n(),
            SumExpr::Mul(vec![
                SumExpr::alt(k()),
                SumExpr::binom(n(), k()),
                SumExpr::pow(SumExpr::int(2), SumExpr::Neg(Box::new(k()))),
                SumExpr::binom(SumExpr::Mul(vec![SumExpr::int(2), k()]), k()),
            ]),
        )
    }

    #[test]
    fn knuth_values() {
        let b = ParamBinding::new().with_int("n", 2);
        assert_eq!(eval_exact(&e_knuth_lhs(), &b).unwrap(), PiValue::from_rational(rat(1, 2)));
        let b = ParamBinding::new().with_int("n", 3);
        assert!(eval_exact(&e_knuth_lhs(), &b).unwrap().is_zero());
    }

    #[test]
    fn empty_sum_is_zero() {
        let e = SumExpr::sum("k", SumExpr::int(1), SumExpr::int(0), SumExpr::Div(
            Box::new(SumExpr::int(1)),
            Box::new(SumExpr::int(0)),
        ));
        assert!(eval_exact(&e, &ParamBinding::new()).unwrap().is_zero());
    }

    #[test]
    fn errors_surface() {
        let b = ParamBinding::new();
        assert_eq!(eval_exact(&SumExpr::param("n"), &b), Err(Error::UnboundParam("n".into())));
        let off = SumExpr::binom(SumExpr::rat(rat(1, 4)), SumExpr::int(0));
        assert!(matches!(eval_exact(&off, &b), Err(Error::OffGrid(_))));
        let zero_inv = SumExpr::binom_inv(SumExpr::int(2), SumExpr::int(5));
        assert_eq!(eval_exact(&zero_inv, &b), Err(Error::ZeroValue));
        let frac_pow = SumExpr::pow(SumExpr::int(2), SumExpr::rat(rat(1, 2)));
        assert!(matches!(eval_exact(&frac_pow, &b), Err(Error::NonInteger(_))));
        let zero_pow = SumExpr::pow(SumExpr::int(0), SumExpr::int(0));
        assert_eq!(eval_exact(&zero_pow, &b).unwrap(), PiValue::one());
    }

    #[test]
    fn floor_ceil_negative() {
        let b = ParamBinding::new();
        let f = |n: i64| eval_exact(&SumExpr::FloorHalf(Box::new(SumExpr::int(n))), &b).unwrap();
        let c = |n: i64| eval_exact(&SumExpr::CeilHalf(Box::new(SumExpr::int(n))), &b).unwrap();
        assert_eq!(f(-3), PiValue::from_integer(-2));
        assert_eq!(c(-3), PiValue::from_integer(-1));
        assert_eq!(f(5), PiValue::from_integer(2));
        assert_eq!(c(5), PiValue::from_integer(3));
    }

    #[test]
    fn predicates() {
        let b = ParamBinding::new().with_int("n", 3);
        let p = Predicate::ForAll {
            index: "j".into(),
            lo: SumExpr::int(0),
            hi: SumExpr::param("n"),
            body: Box::new(Predicate::cmp(SumExpr::var("j"), CmpOp::Le, SumExpr::int(3))),
        };
        assert!(eval_predicate(&p, &b).unwrap());
        let q = Predicate::cmp(SumExpr::param("n"), CmpOp::Ge, SumExpr::int(4));
        assert!(!eval_predicate(&q, &b).unwrap());
        assert!(guard_fires(&Guard::Odd("n".into()), &b).unwrap());
        assert!(!guard_fires(&Guard::Even("n".into()), &b).unwrap());
    }
}
