//! Closed forms of the trigonometric Beta-type integrals.
//!
//! * `K(u,v) = ∫_0^{π/2} cos^u x sin^v x dx`
//! * `I(u,v) = ∫_0^{π} cos^u(x/2) sin^v(x/2) dx`
//! * `J(m,v) = ∫_0^{π} cos^m x sin^v x dx`
//! * `B01(x,y) = ∫_0^1 (1-t)^x t^y dt`

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ComplexPiValue, PiScalar};
use crate::numeric;
use crate::quadrature;
use crate::special::{binom_general, HalfInt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntegralKind {
    /// `K(u,v)` over `[0, π/2]`.
    KQuarter,
    /// `I(u,v)` over `[0, π]` with half angles.
    IHalfAngle,
    /// `J(u,v)` over `[0, π]`, complex for fractional `u`.
    JFull,
    /// `∫_0^π cos^m x dx`.
    CosPower,
    /// `∫_0^1 (1-t)^x t^y dt`.
    Beta01,
}

impl IntegralKind {
    pub const ALL: [IntegralKind; 5] = [
        IntegralKind::KQuarter,
        IntegralKind::IHalfAngle,
        IntegralKind::JFull,
        IntegralKind::CosPower,
        IntegralKind::Beta01,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegralKind::KQuarter => "K",
            IntegralKind::IHalfAngle => "I",
            IntegralKind::JFull => "J-general",
            IntegralKind::CosPower => "J",
            IntegralKind::Beta01 => "beta01",
        }
    }

    pub fn from_name(s: &str) -> Option<IntegralKind> {
        IntegralKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

fn check_domain(name: &str, a: HalfInt) -> Result<()> {
    if a.twice <= -2 {
        return Err(Error::OutOfDomain(format!("{name} = {a} must exceed -1")));
    }
    Ok(())
}

fn pow2(e: i64) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    if e >= 0 {
        num_traits::pow(two, e as usize)
    } else {
        num_traits::pow(two, (-e) as usize).recip()
    }
}

fn half(a: HalfInt) -> Result<HalfInt> {
    a.halve().ok_or_else(|| Error::OffGrid(format!("{a}/2")))
}

/// Shared shape `2^{-u-v-1+shift} π C(u,u/2) C(v,v/2) C((u+v)/2,u/2)^{-1}`.
fn beta_shape(u: HalfInt, v: HalfInt, shift: i64) -> Result<PiScalar> {
    check_domain("u", u)?;
    check_domain("v", v)?;
    let (hu, hv, huv) = (half(u)?, half(v)?, half(u + v)?);
    // u and v are integers here, so the power of two is rational.
    let e = -(u.twice + v.twice) / 2 - 1 + shift;
    let c = binom_general(u, hu)?.mul(&binom_general(v, hv)?).mul(&binom_general(huv, hu)?.invert()?);
    Ok(PiScalar::new(pow2(e), 2).mul(&c))
}

pub fn beta_k(u: HalfInt, v: HalfInt) -> Result<PiScalar> {
    beta_shape(u, v, 0)
}

pub fn int_i(u: HalfInt, v: HalfInt) -> Result<PiScalar> {
    beta_shape(u, v, 1)
}

pub fn int_j(m: u64, v: HalfInt) -> Result<PiScalar> {
    check_domain("v", v)?;
    if m % 2 == 1 {
        return Ok(PiScalar::zero());
    }
    beta_shape(HalfInt::int(m as i64), v, 1)
}

/// `K(u,v) · (2cos²(πu/2) + i sin(πu))`.
pub fn int_j_general(u: HalfInt, v: HalfInt) -> Result<ComplexPiValue> {
    check_domain("u", u)?;
    check_domain("v", v)?;
    let (re_factor, im_factor) = match u.twice.rem_euclid(4) {
        0 => (2, 0),
        2 => (0, 0),
        1 => (1, 1),
        _ => (1, -1),
    };
    if re_factor == 0 && im_factor == 0 {
        return Ok(ComplexPiValue::default());
    }
    let k = beta_k(u, v)?.to_value();
    Ok(ComplexPiValue::new(
        k.scale(&BigRational::from_integer(re_factor.into())),
        k.scale(&BigRational::from_integer(im_factor.into())),
    ))
}

pub fn beta01(x: HalfInt, y: HalfInt) -> Result<PiScalar> {
    check_domain("x", x)?;
    check_domain("y", y)?;
    let one = HalfInt::int(1);
    let c = binom_general(x + y + one, x + one)?.invert()?;
    Ok(c.scale(&(x.to_rational() + BigRational::one()).recip()))
}

/// Exact closed form for `kind`; for `CosPower`, `u` is the integer exponent and `v` is ignored.
pub fn closed_form_exact(kind: IntegralKind, u: HalfInt, v: HalfInt) -> Result<ComplexPiValue> {
    let real = |s: PiScalar| ComplexPiValue::real(s.to_value());
    match kind {
        IntegralKind::KQuarter => beta_k(u, v).map(real),
        IntegralKind::IHalfAngle => int_i(u, v).map(real),
        IntegralKind::JFull => int_j_general(u, v),
        IntegralKind::CosPower => {
            let m = u
                .as_integer()
                .filter(|m| *m >= 0)
                .ok_or_else(|| Error::OutOfDomain(format!("cos power {u} must be a natural number")))?;
            int_j(m as u64, HalfInt::int(0)).map(real)
        }
        IntegralKind::Beta01 => beta01(u, v).map(real),
    }
}

/// A real or complex multiprecision value.
#[derive(Debug, Clone)]
pub struct ComplexFloat {
    pub re: Float,
    pub im: Float,
}

impl ComplexFloat {
    pub fn real(re: Float) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Self { re, im }
    }

    pub fn from_exact(v: &ComplexPiValue, digits: u32) -> Self {
        Self { re: v.re.to_float(digits), im: v.im.to_float(digits) }
    }

    pub fn abs(&self) -> Float {
        let prec = self.re.prec();
        Float::with_val(prec, self.re.hypot_ref(&self.im))
    }

    /// `|a-b| / max(|a|,|b|,1)`, matching the numeric verifier's measure.
    pub fn relerr(&self, other: &ComplexFloat) -> Float {
        let prec = self.re.prec().max(other.re.prec());
        let dre = Float::with_val(prec, &self.re - &other.re);
        let dim = Float::with_val(prec, &self.im - &other.im);
        let diff = dre.hypot(&dim);
        let mut scale = self.abs();
        let o = other.abs();
        if o > scale {
            scale = o;
        }
        if scale < 1 {
            scale = Float::with_val(prec, 1);
        }
        diff / scale
    }
}

fn rat_float(q: &BigRational, prec: u32) -> Float {
    numeric::rational_to_float(q, prec)
}

/// Closed forms built from the numeric Gamma, valid off the half-integer grid.
pub fn closed_form_numeric(kind: IntegralKind, u: &BigRational, v: &BigRational, digits: u32) -> Result<ComplexFloat> {
    let prec = numeric::bits_for(digits + 10);
    let uf = rat_float(u, prec);
    let vf = rat_float(v, prec);
    let pi = numeric::pi(prec);
    let minus_one = BigRational::from_integer((-1).into());
    for (name, x) in [("u", u), ("v", v)] {
        if *x <= minus_one && kind != IntegralKind::CosPower {
            return Err(Error::OutOfDomain(format!("{name} = {x} must exceed -1")));
        }
    }
    let binom = |a: &Float, b: &Float| quadrature::binom_numeric(a, b, digits + 10);
    let k_of = |a: &Float, b: &Float| -> Result<Float> {
        let two = Float::with_val(prec, 2);
        let e = Float::with_val(prec, -(Float::with_val(prec, a + b)) - 1u32);
        let p = Float::with_val(prec, two.pow(&e));
        let ha = Float::with_val(prec, a / 2u32);
        let hb = Float::with_val(prec, b / 2u32);
        let hab = Float::with_val(prec, Float::with_val(prec, a + b) / 2u32);
        let c1 = binom(a, &ha)?;
        let c2 = binom(b, &hb)?;
        let c3 = binom(&hab, &ha)?;
        Ok(p * &pi * c1 * c2 / c3)
    };
    match kind {
        IntegralKind::KQuarter => Ok(ComplexFloat::real(k_of(&uf, &vf)?)),
        IntegralKind::IHalfAngle => Ok(ComplexFloat::real(k_of(&uf, &vf)? * 2u32)),
        IntegralKind::CosPower => {
            if !u.is_integer() || *u < BigRational::zero() {
                return Err(Error::OutOfDomain(format!("cos power {u} must be a natural number")));
            }
            if u.to_integer() % 2 != BigInt::zero() {
                return Ok(ComplexFloat::real(Float::with_val(prec, 0)));
            }
            let zero = Float::with_val(prec, 0);
            Ok(ComplexFloat::real(k_of(&uf, &zero)? * 2u32))
        }
        IntegralKind::JFull => {
            let k = k_of(&uf, &vf)?;
            let arg = Float::with_val(prec, &uf * &pi);
            let half_arg = Float::with_val(prec, &arg / 2u32);
            let cos2 = Float::with_val(prec, half_arg.cos().square()) * 2u32;
            let sin = arg.sin();
            Ok(ComplexFloat { re: Float::with_val(prec, &k * cos2), im: k * sin })
        }
        IntegralKind::Beta01 => {
            let one = Float::with_val(prec, 1);
            let top = Float::with_val(prec, &uf + &vf) + 1u32;
            let bottom = Float::with_val(prec, &uf + 1u32);
            let c = binom(&top, &bottom)?;
            Ok(ComplexFloat::real(one / bottom / c))
        }
    }
}

/// A quadrature value next to its closed form.
#[derive(Debug, Clone)]
pub struct QuadCheck {
    pub kind: IntegralKind,
    pub u: BigRational,
    pub v: BigRational,
    pub quad: ComplexFloat,
    pub closed: ComplexFloat,
    pub relerr: Float,
}

/// Integrate `kind` at `(u, v)` and compare with the exact closed form, or the numeric one off the grid.
pub fn quad_check(kind: IntegralKind, u: &BigRational, v: &BigRational, digits: u32) -> Result<QuadCheck> {
    let spec = quadrature::QuadratureSpec { kind, u: u.clone(), v: v.clone(), digits };
    let quad = quadrature::integrate(&spec)?.value;
    let on_grid = match (crate::special::to_grid(u), crate::special::to_grid(v)) {
        (Ok(hu), Ok(hv)) => match closed_form_exact(kind, hu, hv) {
            Ok(c) => Some(ComplexFloat::from_exact(&c, digits + 10)),
            Err(Error::OffGrid(_)) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let closed = match on_grid {
        Some(c) => c,
        None => closed_form_numeric(kind, u, v, digits)?,
    };
    let relerr = quad.relerr(&closed);
    Ok(QuadCheck { kind, u: u.clone(), v: v.clone(), quad, closed, relerr })
}

/// Tolerance for [`quad_check`] at `digits`.
pub fn quad_tolerance(digits: u32) -> Float {
    numeric::ten_pow_neg(digits as i32 - 4, numeric::bits_for(digits + 10))
}
