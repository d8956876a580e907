//! Exact numbers of the form `Σ q_h · π^{h/2}` with rational `q_h`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric;

/// A single graded monomial `coeff · π^{pihalf/2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiScalar {
    coeff: BigRational,
    pihalf: i32,
}

impl PiScalar {
    pub fn new(coeff: BigRational, pihalf: i32) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self { coeff, pihalf }
        }
    }

    pub fn zero() -> Self {
        Self { coeff: BigRational::zero(), pihalf: 0 }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(q: BigRational) -> Self {
        Self::new(q, 0)
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn pihalf(&self) -> i32 {
        self.pihalf
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn mul(&self, other: &PiScalar) -> PiScalar {
        PiScalar::new(&self.coeff * &other.coeff, self.pihalf + other.pihalf)
    }

    pub fn scale(&self, q: &BigRational) -> PiScalar {
        PiScalar::new(&self.coeff * q, self.pihalf)
    }

    pub fn invert(&self) -> Result<PiScalar> {
        if self.is_zero() {
            return Err(Error::ZeroValue);
        }
        Ok(PiScalar { coeff: self.coeff.recip(), pihalf: -self.pihalf })
    }

    pub fn to_value(&self) -> PiValue {
        PiValue::from(self.clone())
    }
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_value(), f)
    }
}

/// A finite sum of graded monomials in canonical form: no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PiValue {
    terms: BTreeMap<i32, BigRational>,
}

impl PiValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        PiScalar::rational(q).into()
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// `coeff · π^{pihalf/2}` for a single grade.
    pub fn monomial(coeff: BigRational, pihalf: i32) -> Self {
        PiScalar::new(coeff, pihalf).into()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(h, q)| (*h, q))
    }

    pub fn coeff(&self, pihalf: i32) -> Option<&BigRational> {
        self.terms.get(&pihalf)
    }

    /// The value as a rational when it carries no power of π.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// The value as a monomial; zero maps to the canonical zero scalar.
    pub fn as_monomial(&self) -> Option<PiScalar> {
        match self.terms.len() {
            0 => Some(PiScalar::zero()),
            1 => self.terms.iter().next().map(|(h, q)| PiScalar::new(q.clone(), *h)),
            _ => None,
        }
    }

    pub fn invert(&self) -> Result<PiScalar> {
        match self.terms.len() {
            0 => Err(Error::ZeroValue),
            1 => self.as_monomial().expect("single term").invert(),
            _ => Err(Error::NotMonomial),
        }
    }

    pub fn scale(&self, q: &BigRational) -> PiValue {
        if q.is_zero() {
            return PiValue::zero();
        }
        PiValue { terms: self.terms.iter().map(|(h, c)| (*h, c * q)).collect() }
    }

    pub fn mul_scalar(&self, s: &PiScalar) -> PiValue {
        if s.is_zero() {
            return PiValue::zero();
        }
        PiValue {
            terms: self.terms.iter().map(|(h, c)| (h + s.pihalf, c * &s.coeff)).collect(),
        }
    }

    /// Integer power; negative exponents require a monomial base.
    pub fn pow(&self, e: i64) -> Result<PiValue> {
        if e < 0 {
            let inv = self.invert()?.to_value();
            return inv.pow(-e);
        }
        let mut result = PiValue::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    fn add_term(&mut self, h: i32, q: &BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(h).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&h);
        }
    }

    /// Approximation with a relative error below `10^{1-digits}`.
    pub fn to_float(&self, digits: u32) -> Float {
        let prec = numeric::bits_for(digits + 10);
        let sqrt_pi = Float::with_val(prec, rug::float::Constant::Pi).sqrt();
        let mut acc = Float::with_val(prec, 0);
        for (h, q) in &self.terms {
            let mut t = numeric::rational_to_float(q, prec);
            t *= Float::with_val(prec, (&sqrt_pi).pow(*h));
            acc += t;
        }
        acc
    }
}

impl From<PiScalar> for PiValue {
    fn from(s: PiScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !s.coeff.is_zero() {
            terms.insert(s.pihalf, s.coeff);
        }
        PiValue { terms }
    }
}

impl Add for &PiValue {
    type Output = PiValue;
    fn add(self, rhs: &PiValue) -> PiValue {
        let mut out = self.clone();
        for (h, q) in &rhs.terms {
            out.add_term(*h, q);
        }
        out
    }
}

impl Add for PiValue {
    type Output = PiValue;
    fn add(self, rhs: PiValue) -> PiValue {
        &self + &rhs
    }
}

impl Neg for &PiValue {
    type Output = PiValue;
    fn neg(self) -> PiValue {
        PiValue { terms: self.terms.iter().map(|(h, q)| (*h, -q)).collect() }
    }
}

impl Neg for PiValue {
    type Output = PiValue;
    fn neg(self) -> PiValue {
        -&self
    }
}

impl Sub for &PiValue {
    type Output = PiValue;
    fn sub(self, rhs: &PiValue) -> PiValue {
        self + &(-rhs)
    }
}

impl Sub for PiValue {
    type Output = PiValue;
    fn sub(self, rhs: PiValue) -> PiValue {
        &self - &rhs
    }
}

impl Mul for &PiValue {
    type Output = PiValue;
    fn mul(self, rhs: &PiValue) -> PiValue {
        let mut out = PiValue::zero();
        for (ha, qa) in &self.terms {
            for (hb, qb) in &rhs.terms {
                out.add_term(ha + hb, &(qa * qb));
            }
        }
        out
    }
}

impl Mul for PiValue {
    type Output = PiValue;
    fn mul(self, rhs: PiValue) -> PiValue {
        &self * &rhs
    }
}

impl fmt::Display for PiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (h, q)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if q.is_negative() { '-' } else { '+' })?;
            } else if q.is_negative() {
                write!(f, "-")?;
            }
            let a = q.abs();
            match *h {
                0 => write!(f, "{a}")?,
                2 if a.is_one() => write!(f, "pi")?,
                2 => write!(f, "{a}*pi")?,
                h => {
                    let e = if h % 2 == 0 { format!("{}", h / 2) } else { format!("{h}/2") };
                    if a.is_one() {
                        write!(f, "pi^({e})")?
                    } else {
                        write!(f, "{a}*pi^({e})")?
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    pihalf: i32,
    num: String,
    den: String,
}

impl Serialize for PiValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(h, q)| TermRepr { pihalf: *h, num: q.numer().to_string(), den: q.denom().to_string() })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut out = PiValue::zero();
        for t in terms {
            let num: BigInt = t.num.parse().map_err(D::Error::custom)?;
            let den: BigInt = t.den.parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            out.add_term(t.pihalf, &BigRational::new(num, den));
        }
        Ok(out)
    }
}

/// A pair of exact values `re + i·im`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ComplexPiValue {
    pub re: PiValue,
    pub im: PiValue,
}

impl ComplexPiValue {
    pub fn new(re: PiValue, im: PiValue) -> Self {
        Self { re, im }
    }

    pub fn real(re: PiValue) -> Self {
        Self { re, im: PiValue::zero() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn add_examples() {
        let a = PiValue::monomial(q(3, 4), 2);
        let b = PiValue::monomial(q(1, 4), 2);
        assert_eq!(&a + &b, PiValue::monomial(q(1, 1), 2));
        let c = &PiValue::from_rational(q(1, 2)) + &PiValue::monomial(q(1, 2), 1);
        assert_eq!(c.terms().count(), 2);
        assert!((&c - &c).is_zero());
    }

    #[test]
    fn mul_examples() {
        let a = PiValue::monomial(q(4, 1), -2);
        let b = PiValue::monomial(q(1, 4), 2);
        assert_eq!(&a * &b, PiValue::one());
        let s = PiValue::monomial(q(1, 1), 1);
        assert_eq!(&s * &s, PiValue::monomial(q(1, 1), 2));
        let x = PiValue::monomial(q(2, 3), -1);
        let y = PiValue::monomial(q(3, 1), 3);
        assert_eq!(&x * &y, PiValue::monomial(q(2, 1), 2));
    }

    #[test]
    fn invert_examples() {
        let a = PiValue::monomial(q(4, 1), -2);
        assert_eq!(a.invert().unwrap(), PiScalar::new(q(1, 4), 2));
        let two = &PiValue::from_rational(q(1, 2)) + &PiValue::monomial(q(1, 2), 1);
        assert_eq!(two.invert(), Err(Error::NotMonomial));
        assert_eq!(PiValue::zero().invert(), Err(Error::ZeroValue));
    }

    #[test]
    fn to_float_examples() {
        let pi = PiValue::monomial(q(1, 1), 2).to_float(30);
        assert!(pi.to_string_radix(10, Some(28)).starts_with("3.14159265358979323846264338"));
        assert_eq!(PiValue::from_rational(q(1, 2)).to_float(20).to_f64(), 0.5);
        let v = PiValue::monomial(q(4, 1), -2).to_float(15);
        assert!(v.to_string_radix(10, Some(15)).starts_with("1.27323954473516"));
    }

    #[test]
    fn canonical_zero_scalar() {
        let z = PiScalar::new(q(0, 1), 5);
        assert_eq!(z, PiScalar::zero());
        assert_eq!(z.pihalf(), 0);
    }

    #[test]
    fn json_round_trip() {
        let v = &PiValue::from_rational(q(-7, 3)) + &PiValue::monomial(q(5, 2), -2);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"[{"pihalf":-2,"num":"5","den":"2"},{"pihalf":0,"num":"-7","den":"3"}]"#
        );
        let back: PiValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn pow_negative_monomial() {
        let two = PiValue::from_integer(2);
        assert_eq!(two.pow(-3).unwrap(), PiValue::from_rational(q(1, 8)));
        assert_eq!(PiValue::zero().pow(0).unwrap(), PiValue::one());
        assert_eq!(PiValue::zero().pow(-1), Err(Error::ZeroValue));
    }

    fn arb_value() -> impl Strategy<Value = PiValue> {
        prop::collection::vec((-4i32..5, -20i64..21, 1i64..9), 0..4).prop_map(|ts| {
            ts.into_iter()
                .fold(PiValue::zero(), |acc, (h, n, d)| &acc + &PiValue::monomial(q(n, d), h))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_value(), b in arb_value(), c in arb_value()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &PiValue::zero(), a.clone());
            prop_assert_eq!(&a * &PiValue::one(), a.clone());
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn invert_round_trip(h in -6i32..7, n in 1i64..50, d in 1i64..50, neg in any::<bool>()) {
            let c = if neg { q(-n, d) } else { q(n, d) };
            let a = PiValue::monomial(c, h);
            let inv = a.invert().unwrap().to_value();
            prop_assert_eq!(&a * &inv, PiValue::one());
            prop_assert_eq!(inv.invert().unwrap().to_value(), a);
        }

        #[test]
        fn to_float_additive(a in arb_value(), b in arb_value()) {
            let digits = 40;
            let lhs = (&a + &b).to_float(digits);
            let rhs = Float::with_val(lhs.prec(), a.to_float(digits) + b.to_float(digits));
            let diff = Float::with_val(lhs.prec(), &lhs - &rhs).abs();
            let scale = Float::with_val(lhs.prec(), a.to_float(digits).abs() + b.to_float(digits).abs());
            let bound = Float::with_val(lhs.prec(), &scale * Float::with_val(lhs.prec(), 1e-45));
            prop_assert!(diff <= bound);
        }
    }
}
