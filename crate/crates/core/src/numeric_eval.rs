//! Multiprecision evaluation for parameters off the half-integer grid.

use num_bigint::BigInt;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::expr::{ParamBinding, SumExpr};
use crate::numeric;
use crate::quadrature::{binom_numeric, GUARD_DIGITS};
use crate::special;

struct Ctx<'a> {
    binding: &'a ParamBinding,
    digits: u32,
    prec: u32,
    vars: Vec<(String, i64)>,
}

/// Value of `expr` with all arithmetic in floating point at `digits + 10` decimal digits.
pub fn eval_numeric(expr: &SumExpr, binding: &ParamBinding, digits: u32) -> Result<Float> {
    let mut ctx = Ctx { binding, digits, prec: numeric::bits_for(digits + GUARD_DIGITS), vars: Vec::new() };
    ctx.eval(expr)
}

fn as_i64(x: &Float, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::NonInteger(format!("{what} = {}", numeric::format_float(x, 20))));
    }
    x.to_integer()
        .and_then(|n| n.to_i64())
        .ok_or_else(|| Error::OutOfDomain(format!("{what} too large")))
}

impl Ctx<'_> {
    fn f(&self, v: impl Into<f64>) -> Float {
        Float::with_val(self.prec, v.into())
    }

    fn from_bigint(&self, n: &BigInt) -> Float {
        numeric::bigint_to_float(n, self.prec)
    }

    fn eval_int(&mut self, e: &SumExpr, what: &str) -> Result<i64> {
        let v = self.eval(e)?;
        as_i64(&v, what)
    }

    fn eval(&mut self, expr: &SumExpr) -> Result<Float> {
        let prec = self.prec;
        match expr {
            SumExpr::Int(n) => Ok(self.from_bigint(n)),
            SumExpr::Rat(q) => Ok(numeric::rational_to_float(q, prec)),
            SumExpr::Param(p) => self
                .binding
                .get(p)
                .map(|q| numeric::rational_to_float(q, prec))
                .ok_or_else(|| Error::UnboundParam(p.clone())),
            SumExpr::Var(v) => self
                .vars
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, k)| Float::with_val(prec, *k))
                .ok_or_else(|| Error::UnboundParam(v.clone())),
            SumExpr::Neg(e) => Ok(-self.eval(e)?),
            SumExpr::Add(items) => {
                let mut acc = self.f(0.0);
                for e in items {
                    acc += self.eval(e)?;
                }
                Ok(acc)
            }
            SumExpr::Mul(items) => {
                let mut acc = self.f(1.0);
                for e in items {
                    acc *= self.eval(e)?;
                }
                Ok(acc)
            }
            SumExpr::Div(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                if den.is_zero() {
                    return Err(Error::ZeroValue);
                }
                Ok(num / den)
            }
            SumExpr::Pow(base, exp) => {
                let e = self.eval_int(exp, "exponent")?;
                let b = self.eval(base)?;
                if b.is_zero() && e < 0 {
                    return Err(Error::ZeroValue);
                }
                let e = i32::try_from(e).map_err(|_| Error::OutOfDomain("exponent too large".into()))?;
                Ok(Float::with_val(prec, b.pow(e)))
            }
            SumExpr::AltSign(e) => {
                let e = self.eval_int(e, "sign exponent")?;
                Ok(self.f(if e % 2 == 0 { 1.0 } else { -1.0 }))
            }
            SumExpr::Binom(t, b) => self.binom(t, b),
            SumExpr::BinomInv(t, b) => {
                let c = self.binom(t, b)?;
                if c.is_zero() {
                    return Err(Error::ZeroValue);
                }
                Ok(c.recip())
            }
            SumExpr::Catalan(e) => {
                let j = self.eval_int(e, "Catalan index")?;
                if j < 0 {
                    return Err(Error::Undefined(format!("Catalan number of negative index {j}")));
                }
                Ok(self.from_bigint(&special::catalan(j as u64)))
            }
            SumExpr::FloorHalf(e) => {
                let n = self.eval_int(e, "floor argument")?;
                Ok(self.f(n.div_euclid(2) as f64))
            }
            SumExpr::CeilHalf(e) => {
                let n = self.eval_int(e, "ceil argument")?;
                Ok(self.f(-((-n).div_euclid(2)) as f64))
            }
            SumExpr::Sum { index, lo, hi, body } => {
                let lo = self.eval_int(lo, "lower bound")?;
                let hi = self.eval_int(hi, "upper bound")?;
                let mut acc = self.f(0.0);
                for k in lo..=hi {
                    self.vars.push((index.clone(), k));
                    let term = self.eval(body);
                    self.vars.pop();
                    acc += term?;
                }
                Ok(acc)
            }
        }
    }

    fn binom(&mut self, t: &SumExpr, b: &SumExpr) -> Result<Float> {
        let top = self.eval(t)?;
        let bottom = self.eval(b)?;
        if top.is_integer() && bottom.is_integer() && top >= 0 {
            let m = as_i64(&top, "binomial top")?;
            let n = as_i64(&bottom, "binomial bottom")?;
            return Ok(self.from_bigint(&special::binom_int(m as u64, n)));
        }
        binom_numeric(&top, &bottom, self.digits + GUARD_DIGITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval_exact;
    use crate::expr::rat;

    #[test]
    fn binom_at_half_matches_exact() {
        let e = SumExpr::binom(SumExpr::int(1), SumExpr::rat(rat(1, 2)));
        let b = ParamBinding::new();
        let num = eval_numeric(&e, &b, 30).unwrap();
        let exact = eval_exact(&e, &b).unwrap().to_float(30);
        assert!(numeric::relerr(&num, &exact) < 1e-28);
        assert!(num.to_string_radix(10, Some(9)).starts_with("1.2732395"));
    }

    #[test]
    fn near_pole_is_reported() {
        let e = SumExpr::binom_inv(SumExpr::rat(rat(1, 2)), SumExpr::param("v"));
        let v = num_rational::BigRational::new(BigInt::from(-3) * BigInt::from(10).pow(30) + 1, BigInt::from(10).pow(30));
        let b = ParamBinding::new().with("v", v);
        assert!(matches!(eval_numeric(&e, &b, 30), Err(Error::NumericPole(_))));
    }
}
