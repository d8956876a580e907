//! A deliberately naive second evaluator used to cross-check [`crate::eval::eval_exact`].
//!
//! It shares nothing with the main evaluator except big-integer primitives: values are
//! unsorted lists of `(pihalf, num, den)` terms, Gamma values are rebuilt from raw products on
//! every call, and nothing is cached.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::PiValue;
use crate::expr::{ParamBinding, SumExpr};

#[derive(Debug, Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn new(num: BigInt, den: BigInt) -> Frac {
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_zero() { (num, den) } else { (num / &g, den / &g) };
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Frac { num: n, den: d }
    }
    fn int(n: BigInt) -> Frac {
        Frac { num: n, den: BigInt::one() }
    }
    fn add(&self, o: &Frac) -> Frac {
        Frac::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }
    fn mul(&self, o: &Frac) -> Frac {
        Frac::new(&self.num * &o.num, &self.den * &o.den)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// Sum of `coeff · π^{pihalf/2}` terms, merged lazily.
#[derive(Debug, Clone, Default)]
struct Naive {
    terms: Vec<(i32, Frac)>,
}

impl Naive {
    fn scalar(pihalf: i32, c: Frac) -> Naive {
        Naive { terms: vec![(pihalf, c)] }
    }
    fn rat(c: Frac) -> Naive {
        Naive::scalar(0, c)
    }
    fn int(n: i64) -> Naive {
        Naive::rat(Frac::int(n.into()))
    }
    fn add(&self, o: &Naive) -> Naive {
        let mut terms = self.terms.clone();
        for (h, c) in &o.terms {
            match terms.iter_mut().find(|(g, _)| g == h) {
                Some((_, acc)) => *acc = acc.add(c),
                None => terms.push((*h, c.clone())),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Naive { terms }
    }
    fn mul(&self, o: &Naive) -> Naive {
        let mut out = Naive::default();
        for (ha, ca) in &self.terms {
            for (hb, cb) in &o.terms {
                out = out.add(&Naive::scalar(ha + hb, ca.mul(cb)));
            }
        }
        out
    }
    fn neg(&self) -> Naive {
        Naive { terms: self.terms.iter().map(|(h, c)| (*h, Frac::new(-&c.num, c.den.clone()))).collect() }
    }
    fn nonzero_terms(&self) -> Vec<&(i32, Frac)> {
        self.terms.iter().filter(|(_, c)| !c.is_zero()).collect()
    }
    fn reciprocal(&self) -> Result<Naive> {
        let t = self.nonzero_terms();
        match t.len() {
            0 => Err(Error::ZeroValue),
            1 => Ok(Naive::scalar(-t[0].0, Frac::new(t[0].1.den.clone(), t[0].1.num.clone()))),
            _ => Err(Error::NotMonomial),
        }
    }
    fn rational(&self) -> Option<Frac> {
        let t = self.nonzero_terms();
        match t.len() {
            0 => Some(Frac::int(BigInt::zero())),
            1 if t[0].0 == 0 => Some(t[0].1.clone()),
            _ => None,
        }
    }
    fn integer(&self, what: &str) -> Result<i64> {
        let f = self.rational().ok_or_else(|| Error::NonInteger(what.to_string()))?;
        if !f.den.is_one() {
            return Err(Error::NonInteger(format!("{what} = {}/{}", f.num, f.den)));
        }
        f.num.to_i64().ok_or_else(|| Error::OutOfDomain(format!("{what} too large")))
    }
    fn into_pivalue(self) -> PiValue {
        self.terms.into_iter().fold(PiValue::zero(), |acc, (h, c)| {
            &acc + &PiValue::monomial(BigRational::new(c.num, c.den), h)
        })
    }
}

/// `Γ(twice/2)` from raw products, or `None` at a pole.
fn gamma_raw(twice: i64) -> Option<Naive> {
    if twice % 2 == 0 {
        let n = twice / 2;
        if n <= 0 {
            return None;
        }
        let mut p = BigInt::one();
        for j in 1..n {
            p *= j;
        }
        return Some(Naive::rat(Frac::int(p)));
    }
    // Γ(1/2) = √π; move up or down in unit steps.
    let mut c = Frac::int(BigInt::one());
    if twice > 0 {
        let mut z = 1; // twice of the current argument
        while z < twice {
            c = c.mul(&Frac::new(z.into(), 2.into()));
            z += 2;
        }
    } else {
        let mut z = 1;
        while z > twice {
            z -= 2;
            c = c.mul(&Frac::new(2.into(), z.into()));
        }
    }
    Some(Naive::scalar(1, c))
}

fn twice_of(f: &Frac, what: &str) -> Result<i64> {
    let doubled = Frac::new(&f.num * 2, f.den.clone());
    if !doubled.den.is_one() {
        return Err(Error::OffGrid(format!("{what} = {}/{}", f.num, f.den)));
    }
    doubled.num.to_i64().ok_or_else(|| Error::OutOfDomain(format!("{what} too large")))
}

fn binom_raw(top: &Naive, bottom: &Naive) -> Result<Naive> {
    let t = top.rational().ok_or_else(|| Error::OffGrid("binomial top".into()))?;
    let b = bottom.rational().ok_or_else(|| Error::OffGrid("binomial bottom".into()))?;
    let (tt, bt) = (twice_of(&t, "binomial top")?, twice_of(&b, "binomial bottom")?);
    if tt % 2 == 0 && bt % 2 == 0 && tt >= 0 {
        // Counting definition.
        let (m, n) = (tt / 2, bt / 2);
        if n < 0 || n > m {
            return Ok(Naive::int(0));
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for j in 0..n {
            num *= m - j;
            den *= j + 1;
        }
        return Ok(Naive::rat(Frac::new(num, den)));
    }
    let g = gamma_raw(tt + 2).ok_or_else(|| Error::Undefined("numerator pole".into()))?;
    let (Some(d1), Some(d2)) = (gamma_raw(bt + 2), gamma_raw(tt - bt + 2)) else {
        return Ok(Naive::int(0));
    };
    Ok(g.mul(&d1.mul(&d2).reciprocal()?))
}

struct Oracle<'a> {
    binding: &'a ParamBinding,
    vars: Vec<(String, i64)>,
}

impl Oracle<'_> {
    fn eval(&mut self, e: &SumExpr) -> Result<Naive> {
        match e {
            SumExpr::Int(n) => Ok(Naive::rat(Frac::int(n.clone()))),
            SumExpr::Rat(q) => Ok(Naive::rat(Frac::new(q.numer().clone(), q.denom().clone()))),
            SumExpr::Param(p) => {
                let q = self.binding.get(p).ok_or_else(|| Error::UnboundParam(p.clone()))?;
                Ok(Naive::rat(Frac::new(q.numer().clone(), q.denom().clone())))
            }
            SumExpr::Var(v) => {
                let k = self.vars.iter().rev().find(|(n, _)| n == v).ok_or_else(|| Error::UnboundParam(v.clone()))?;
                Ok(Naive::int(k.1))
            }
            SumExpr::Neg(x) => Ok(self.eval(x)?.neg()),
            SumExpr::Add(xs) => {
                let mut acc = Naive::default();
                for x in xs {
                    acc = acc.add(&self.eval(x)?);
                }
                Ok(acc)
            }
            SumExpr::Mul(xs) => {
                let mut acc = Naive::int(1);
                for x in xs {
                    acc = acc.mul(&self.eval(x)?);
                }
                Ok(acc)
            }
            SumExpr::Div(a, b) => {
                let n = self.eval(a)?;
                let d = self.eval(b)?.reciprocal()?;
                Ok(n.mul(&d))
            }
            SumExpr::Pow(b, x) => {
                let e = self.eval(x)?.integer("exponent")?;
                let base = self.eval(b)?;
                let (base, count) = if e < 0 { (base.reciprocal()?, -e) } else { (base, e) };
                let mut acc = Naive::int(1);
                for _ in 0..count {
                    acc = acc.mul(&base);
                }
                Ok(acc)
            }
            SumExpr::AltSign(x) => {
                let e = self.eval(x)?.integer("sign exponent")?;
                Ok(Naive::int(if e.rem_euclid(2) == 0 { 1 } else { -1 }))
            }
            SumExpr::Binom(t, b) => {
                let (t, b) = (self.eval(t)?, self.eval(b)?);
                binom_raw(&t, &b)
            }
            SumExpr::BinomInv(t, b) => {
                let (t, b) = (self.eval(t)?, self.eval(b)?);
                binom_raw(&t, &b)?.reciprocal()
            }
            SumExpr::Catalan(x) => {
                let j = self.eval(x)?.integer("Catalan index")?;
                if j < 0 {
                    return Err(Error::Undefined("negative Catalan index".into()));
                }
                let c = binom_raw(&Naive::int(2 * j), &Naive::int(j))?;
                Ok(c.mul(&Naive::rat(Frac::new(1.into(), (j + 1).into()))))
            }
            SumExpr::FloorHalf(x) => {
                let n = self.eval(x)?.integer("floor argument")?;
                Ok(Naive::int(n.div_euclid(2)))
            }
            SumExpr::CeilHalf(x) => {
                let n = self.eval(x)?.integer("ceil argument")?;
                Ok(Naive::int((n + 1).div_euclid(2)))
            }
            SumExpr::Sum { index, lo, hi, body } => {
                let lo = self.eval(lo)?.integer("lower bound")?;
                let hi = self.eval(hi)?.integer("upper bound")?;
                let mut acc = Naive::default();
                let mut k = lo;
                while k <= hi {
                    self.vars.push((index.clone(), k));
                    let t = self.eval(body);
                    self.vars.pop();
                    acc = acc.add(&t?);
                    k += 1;
                }
                Ok(acc)
            }
        }
    }
}

/// Independent exact evaluation.
pub fn eval_oracle(expr: &SumExpr, binding: &ParamBinding) -> Result<PiValue> {
    eval_oracle_with_vars(expr, binding, &[])
}

pub fn eval_oracle_with_vars(expr: &SumExpr, binding: &ParamBinding, vars: &[(String, i64)]) -> Result<PiValue> {
    let mut o = Oracle { binding, vars: vars.to_vec() };
    Ok(o.eval(expr)?.into_pivalue())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_raw_values() {
        let g = gamma_raw(5).unwrap().into_pivalue();
        assert_eq!(g, PiValue::monomial(BigRational::new(3.into(), 4.into()), 1));
        let g = gamma_raw(-3).unwrap().into_pivalue();
        assert_eq!(g, PiValue::monomial(BigRational::new(4.into(), 3.into()), 1));
        assert!(gamma_raw(0).is_none());
        assert_eq!(gamma_raw(8).unwrap().into_pivalue(), PiValue::from_integer(6));
    }

    #[test]
    fn half_binomial() {
        let c = binom_raw(&Naive::int(1), &Naive::rat(Frac::new(1.into(), 2.into()))).unwrap();
        assert_eq!(c.into_pivalue(), PiValue::monomial(BigRational::from_integer(4.into()), -2));
    }
}
