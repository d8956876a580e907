//! Tanh-sinh quadrature of the trigonometric Beta integrals and a Spouge Gamma.
//!
//! The oracle integrates the literal integrands; it never touches the closed forms in
//! [`crate::integrals`].

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::BigRational;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{ComplexFloat, IntegralKind};
use crate::numeric;

/// Highest refinement level before giving up.
pub const LEVEL_CAP: u32 = 12;
/// Decimal guard digits added to the requested precision.
pub const GUARD_DIGITS: u32 = 10;
const MIN_LEVELS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub kind: IntegralKind,
    /// Exponent of the cosine (or `1-t`) factor; the integer power for `CosPower`.
    pub u: BigRational,
    /// Exponent of the sine (or `t`) factor; ignored for `CosPower`.
    pub v: BigRational,
    pub digits: u32,
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: ComplexFloat,
    pub error_estimate: Float,
    pub levels: u32,
}

struct Node {
    weight: Float,
    /// `1 - tanh(s)`, computed without cancellation.
    one_minus: Float,
    /// `1 + tanh(s)`.
    one_plus: Float,
    at_zero: bool,
}

type NodeCache = RwLock<HashMap<(u32, u32), Arc<Vec<Node>>>>;

fn node_cache() -> &'static NodeCache {
    static CACHE: OnceLock<NodeCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Nodes first introduced at `level` (non-negative abscissae only).
fn nodes(level: u32, prec: u32) -> Arc<Vec<Node>> {
    if let Some(n) = node_cache().read().expect("node cache poisoned").get(&(level, prec)) {
        return n.clone();
    }
    let h = Float::with_val(prec, 2).pow(-(level as i32));
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    // Stop once 1 - tanh(s) drops far below anything the integrand can resolve.
    let cutoff = Float::with_val(prec, 2).pow(-(8 * prec as i32));
    let mut out = Vec::new();
    let mut j: u64 = if level == 0 { 0 } else { 1 };
    loop {
        let t = Float::with_val(prec, &h * j);
        let s = Float::with_val(prec, &half_pi * Float::with_val(prec, t.sinh_ref()));
        let e2s = Float::with_val(prec, s.clone() * 2u32).exp();
        let one_minus = Float::with_val(prec, 2) / Float::with_val(prec, &e2s + 1u32);
        let one_plus = Float::with_val(prec, 2) - &one_minus;
        let cosh_s = s.cosh();
        let weight = Float::with_val(prec, &half_pi * Float::with_val(prec, t.cosh_ref())) / cosh_s.square();
        if one_minus < cutoff {
            break;
        }
        out.push(Node { weight, one_minus, one_plus, at_zero: j == 0 });
        j += if level == 0 { 1 } else { 2 };
    }
    let arc = Arc::new(out);
    node_cache().write().expect("node cache poisoned").insert((level, prec), arc.clone());
    arc
}

/// `∫_a^b f` where `f` receives the distances `(x-a, b-x)` to both endpoints.
pub fn tanh_sinh<F>(length: &Float, digits: u32, f: F) -> Result<(Float, Float, u32)>
where
    F: Fn(&Float, &Float) -> Float,
{
    let prec = numeric::bits_for(digits + GUARD_DIGITS);
    let half = Float::with_val(prec, length / 2u32);
    let tol = numeric::ten_pow_neg(digits as i32, prec);
    let mut sum = Float::with_val(prec, 0);
    let mut abs_sum = Float::with_val(prec, 0);
    let mut prev: Option<Float> = None;
    let mut last_err = Float::with_val(prec, f64::INFINITY);
    for level in 0..=LEVEL_CAP {
        let mut new_sum = Float::with_val(prec, 0);
        let mut new_abs = Float::with_val(prec, 0);
        for node in nodes(level, prec).iter() {
            let dl = Float::with_val(prec, &half * &node.one_plus);
            let dr = Float::with_val(prec, &half * &node.one_minus);
            let mut contrib = Float::with_val(prec, &node.weight * f(&dl, &dr));
            if !node.at_zero {
                contrib += Float::with_val(prec, &node.weight * f(&dr, &dl));
            }
            new_abs += Float::with_val(prec, contrib.abs_ref());
            new_sum += &contrib;
        }
        let h = Float::with_val(prec, 2).pow(-(level as i32));
        if level == 0 {
            sum = new_sum;
            abs_sum = new_abs;
        } else {
            sum = sum / 2u32 + Float::with_val(prec, &new_sum * &h);
            abs_sum = abs_sum / 2u32 + Float::with_val(prec, &new_abs * &h);
        }
        let estimate = Float::with_val(prec, &sum * &half);
        if let Some(p) = &prev {
            let err = Float::with_val(prec, &estimate - p).abs();
            let scale = Float::with_val(prec, &abs_sum * &half);
            let bound = Float::with_val(prec, &scale * &tol);
            last_err = err.clone();
            if level >= MIN_LEVELS && err <= bound {
                return Ok((estimate, err, level));
            }
        }
        prev = Some(estimate);
    }
    Err(Error::NoConvergence { levels: LEVEL_CAP, estimate: numeric::format_float(&last_err, 6) })
}

fn pow_pos(base: &Float, e: &Float) -> Float {
    if e.is_zero() {
        return Float::with_val(base.prec(), 1);
    }
    Float::with_val(base.prec(), base.pow(e))
}

/// Evaluate the literal integral described by `spec`.
pub fn integrate(spec: &QuadratureSpec) -> Result<QuadResult> {
    if !(10..=100).contains(&spec.digits) {
        return Err(Error::OutOfDomain(format!("digits {} outside [10, 100]", spec.digits)));
    }
    let minus_one = BigRational::from_integer((-1).into());
    if spec.u <= minus_one || (spec.kind != IntegralKind::CosPower && spec.v <= minus_one) {
        return Err(Error::OutOfDomain(format!("exponents ({}, {}) must exceed -1", spec.u, spec.v)));
    }
    let digits = spec.digits;
    let prec = numeric::bits_for(digits + GUARD_DIGITS);
    let u = numeric::rational_to_float(&spec.u, prec);
    let v = match spec.kind {
        IntegralKind::CosPower => Float::with_val(prec, 0),
        _ => numeric::rational_to_float(&spec.v, prec),
    };
    let pi = numeric::pi(prec);
    let half_pi = Float::with_val(prec, &pi / 2u32);
    let sin_pow = |d: &Float, e: &Float| pow_pos(&Float::with_val(prec, d.sin_ref()), e);
    match spec.kind {
        IntegralKind::KQuarter => {
            // cos x = sin(π/2 - x)
            let (val, err, lv) = tanh_sinh(&half_pi, digits, |dl, dr| sin_pow(dr, &u) * sin_pow(dl, &v))?;
            Ok(QuadResult { value: ComplexFloat::real(val), error_estimate: err, levels: lv })
        }
        IntegralKind::IHalfAngle => {
            let (val, err, lv) = tanh_sinh(&pi, digits, |dl, dr| {
                let hl = Float::with_val(prec, dl / 2u32);
                let hr = Float::with_val(prec, dr / 2u32);
                sin_pow(&hr, &u) * sin_pow(&hl, &v)
            })?;
            Ok(QuadResult { value: ComplexFloat::real(val), error_estimate: err, levels: lv })
        }
        IntegralKind::JFull | IntegralKind::CosPower => {
            // [0, π/2]: cos x = sin(π/2 - x) ≥ 0.
            let (a, ea, la) = tanh_sinh(&half_pi, digits, |dl, dr| sin_pow(dr, &u) * sin_pow(dl, &v))?;
            // [π/2, π]: cos x = -sin(x - π/2) ≤ 0 and sin x = sin(π - x).
            let (b, eb, lb) = tanh_sinh(&half_pi, digits, |dl, dr| sin_pow(dl, &u) * sin_pow(dr, &v))?;
            // Principal power of the negative cosine: |cos x|^u e^{iπu}.
            let phase = Float::with_val(prec, &u * &pi);
            let (s, c) = phase.sin_cos(Float::new(prec));
            let re = Float::with_val(prec, &a + Float::with_val(prec, &b * &c));
            let im = Float::with_val(prec, &b * &s);
            let err = Float::with_val(prec, &ea + &eb);
            Ok(QuadResult { value: ComplexFloat { re, im }, error_estimate: err, levels: la.max(lb) })
        }
        IntegralKind::Beta01 => {
            let one = Float::with_val(prec, 1);
            let (val, err, lv) = tanh_sinh(&one, digits, |dl, dr| pow_pos(dr, &u) * pow_pos(dl, &v))?;
            Ok(QuadResult { value: ComplexFloat::real(val), error_estimate: err, levels: lv })
        }
    }
}

struct SpougeCoeffs {
    a: u32,
    wprec: u32,
    c: Vec<Float>,
    bound: Float,
}

type SpougeCache = RwLock<HashMap<u32, Arc<SpougeCoeffs>>>;

fn spouge_cache() -> &'static SpougeCache {
    static CACHE: OnceLock<SpougeCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn spouge_coeffs(digits: u32) -> Arc<SpougeCoeffs> {
    if let Some(c) = spouge_cache().read().expect("spouge cache poisoned").get(&digits) {
        return c.clone();
    }
    // Push the truncation error below one ulp of the returned precision.
    let target = (digits + GUARD_DIGITS) as f64 + 4.0;
    let a = (target * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI).ln()).ceil() as u32 + 1;
    // The alternating coefficients cancel heavily; carry roughly twice the target precision.
    let wprec = 2 * numeric::bits_for(digits + GUARD_DIGITS) + 64;
    let two_pi = Float::with_val(wprec, Constant::Pi) * 2u32;
    let mut c = Vec::with_capacity(a as usize);
    c.push(Float::with_val(wprec, two_pi.sqrt_ref()));
    let mut fact = Float::with_val(wprec, 1);
    for k in 1..a {
        if k > 1 {
            fact *= k - 1;
        }
        let base = Float::with_val(wprec, a - k);
        let e = Float::with_val(wprec, k) - 0.5f64;
        let mut term = Float::with_val(wprec, (&base).pow(&e));
        term *= Float::with_val(wprec, a - k).exp();
        term /= &fact;
        if k % 2 == 0 {
            term = -term;
        }
        c.push(term);
    }
    let two_pi_f = Float::with_val(wprec, Constant::Pi) * 2u32;
    let bound = Float::with_val(wprec, a).sqrt().recip()
        * Float::with_val(wprec, two_pi_f.pow(-(Float::with_val(wprec, a) + 0.5f64)));
    let out = Arc::new(SpougeCoeffs { a, wprec, c, bound });
    spouge_cache().write().expect("spouge cache poisoned").insert(digits, out.clone());
    out
}

/// `Γ(x)` for `x > 0` together with a bound on the relative truncation error.
pub fn gamma_numeric_with_bound(x: &Float, digits: u32) -> (Float, Float) {
    let coeffs = spouge_coeffs(digits);
    let wprec = coeffs.wprec;
    let mut x = Float::with_val(wprec, x);
    // Shift up so that z = x - 1 ≥ 1, dividing the recurrence back out at the end.
    let mut divisor = Float::with_val(wprec, 1);
    while x < 2 {
        divisor *= &x;
        x += 1u32;
    }
    let z = Float::with_val(wprec, &x - 1u32);
    let mut series = coeffs.c[0].clone();
    for k in 1..coeffs.a {
        series += Float::with_val(wprec, &coeffs.c[k as usize] / Float::with_val(wprec, &z + k));
    }
    let za = Float::with_val(wprec, &z + coeffs.a);
    let e = Float::with_val(wprec, &z + 0.5f64);
    let mut g = Float::with_val(wprec, (&za).pow(&e));
    g *= Float::with_val(wprec, -za).exp();
    g *= series;
    g /= divisor;
    let out_prec = numeric::bits_for(digits + GUARD_DIGITS);
    (Float::with_val(out_prec, g), Float::with_val(out_prec, &coeffs.bound))
}

/// `Γ(x)` for `x > 0`.
pub fn gamma_numeric(x: &Float, digits: u32) -> Float {
    gamma_numeric_with_bound(x, digits).0
}

fn nearest_int(x: &Float) -> Float {
    Float::with_val(x.prec(), x.round_ref())
}

/// `Γ(x)` on the real line, using reflection for negative non-integers.
fn gamma_real(x: &Float, digits: u32) -> Result<Float> {
    if *x > 0 {
        return Ok(gamma_numeric(x, digits));
    }
    if x.is_integer() {
        return Err(Error::GammaPole(numeric::format_float(x, 10)));
    }
    let prec = x.prec();
    let pi = numeric::pi(prec);
    let one_minus = Float::with_val(prec, 1 - x.clone());
    let s = Float::with_val(prec, Float::with_val(prec, &pi * x).sin());
    Ok(pi / (s * gamma_numeric(&one_minus, digits)))
}

/// Generalized binomial `Γ(a+1) / (Γ(b+1) Γ(a-b+1))` for real arguments.
///
/// An exact non-positive integer in a denominator Gamma gives 0; one that is merely close
/// (within `10^{-digits/2}`) is reported as a pole.
pub fn binom_numeric(a: &Float, b: &Float, digits: u32) -> Result<Float> {
    let prec = a.prec().max(b.prec()).max(numeric::bits_for(digits));
    let top = Float::with_val(prec, a + 1u32);
    let d1 = Float::with_val(prec, b + 1u32);
    let d2 = Float::with_val(prec, Float::with_val(prec, a - b) + 1u32);
    let near = numeric::ten_pow_neg((digits / 2) as i32, prec);
    let near_pole = |x: &Float| -> bool {
        let n = nearest_int(x);
        n <= 0 && Float::with_val(prec, x - &n).abs() < near
    };
    if top.is_integer() && top <= 0 {
        return Err(Error::Undefined(format!(
            "binomial with top {} has a numerator pole",
            numeric::format_float(a, 10)
        )));
    }
    if near_pole(&top) {
        return Err(Error::NumericPole(numeric::format_float(a, 20)));
    }
    for d in [&d1, &d2] {
        if d.is_integer() && *d <= 0 {
            return Ok(Float::with_val(prec, 0));
        }
        if near_pole(d) {
            return Err(Error::NumericPole(numeric::format_float(d, 20)));
        }
    }
    let g = gamma_real(&top, digits)?;
    let g1 = gamma_real(&d1, digits)?;
    let g2 = gamma_real(&d2, digits)?;
    Ok(g / (g1 * g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::closed_form_exact;
    use crate::special::HalfInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn spec(kind: IntegralKind, u: BigRational, v: BigRational, digits: u32) -> QuadratureSpec {
        QuadratureSpec { kind, u, v, digits }
    }

    #[test]
    fn full_period_cos_powers() {
        // the negative-cosine half must enter with phase e^{i pi u}
        let pi = numeric::pi(200);
        let whole = integrate(&spec(IntegralKind::CosPower, q(0, 1), q(0, 1), 30)).unwrap().value;
        assert!(numeric::relerr(&whole.re, &pi) < 1e-28);
        let odd = integrate(&spec(IntegralKind::CosPower, q(1, 1), q(0, 1), 30)).unwrap().value;
        assert!(odd.re.clone().abs() < 1e-28 && odd.im.clone().abs() < 1e-28);
        // cos^(1/2) over [0, pi]: the second half is i times the first
        let j = integrate(&spec(IntegralKind::JFull, q(1, 2), q(0, 1), 30)).unwrap().value;
        assert!(numeric::relerr(&j.re, &j.im) < 1e-28);
    }

    #[test]
    fn i_of_zero_is_pi() {
        let r = integrate(&spec(IntegralKind::IHalfAngle, q(0, 1), q(0, 1), 30)).unwrap();
        let pi = numeric::pi(r.value.re.prec());
        assert!(numeric::relerr(&r.value.re, &pi) < 1e-29);
    }

    #[test]
    fn k_one_one_is_half() {
        let r = integrate(&spec(IntegralKind::KQuarter, q(1, 1), q(1, 1), 30)).unwrap();
        let half = Float::with_val(r.value.re.prec(), 0.5);
        assert!(numeric::relerr(&r.value.re, &half) < 1e-28);
    }

    #[test]
    fn singular_endpoint_matches_numeric_closed_form() {
        let s = spec(IntegralKind::KQuarter, q(-1, 2), q(0, 1), 30);
        let r = integrate(&s).unwrap();
        let cf = crate::integrals::closed_form_numeric(IntegralKind::KQuarter, &s.u, &s.v, 30).unwrap();
        assert!(r.value.relerr(&cf) < 1e-25);
    }

    #[test]
    fn matches_exact_closed_forms() {
        let digits = 30;
        for (u, v) in [(0, 0), (1, 2), (4, 3), (-1, 1), (3, -1)] {
            for kind in [IntegralKind::KQuarter, IntegralKind::IHalfAngle, IntegralKind::Beta01] {
                let (hu, hv) = (HalfInt::from_twice(u), HalfInt::from_twice(v));
                let Ok(exact) = closed_form_exact(kind, hu, hv) else { continue };
                let r = integrate(&spec(kind, hu.to_rational(), hv.to_rational(), digits)).unwrap();
                let err = r.value.relerr(&ComplexFloat::from_exact(&exact, digits));
                assert!(err < 1e-26, "{kind:?} ({u}/2,{v}/2): {err}");
            }
        }
    }

    #[test]
    fn doubling_digits_refines() {
        let exact = closed_form_exact(IntegralKind::KQuarter, HalfInt::int(3), HalfInt::from_twice(-1)).unwrap_err();
        assert!(matches!(exact, Error::OffGrid(_)));
        let truth = ComplexFloat::from_exact(
            &closed_form_exact(IntegralKind::KQuarter, HalfInt::int(3), HalfInt::int(5)).unwrap(),
            80,
        );
        let e20 = integrate(&spec(IntegralKind::KQuarter, q(3, 1), q(5, 1), 20)).unwrap().value.relerr(&truth);
        let e40 = integrate(&spec(IntegralKind::KQuarter, q(3, 1), q(5, 1), 40)).unwrap().value.relerr(&truth);
        assert!(e40 <= e20);
    }

    #[test]
    fn gamma_examples() {
        let prec = numeric::bits_for(30);
        let half = Float::with_val(prec, 0.5);
        let sqrt_pi = numeric::pi(prec).sqrt();
        assert!(numeric::relerr(&gamma_numeric(&half, 20), &sqrt_pi) < 1e-20);
        let five = Float::with_val(prec, 5);
        assert!(numeric::relerr(&gamma_numeric(&five, 20), &Float::with_val(prec, 24)) < 1e-20);
        let quarter = Float::with_val(prec, 0.25);
        let three_quarter = Float::with_val(prec, 0.75);
        let prod = gamma_numeric(&quarter, 25) * gamma_numeric(&three_quarter, 25);
        let pi = numeric::pi(prec);
        let rhs = Float::with_val(prec, &pi / Float::with_val(prec, &pi / 4u32).sin());
        assert!(numeric::relerr(&prod, &rhs) < 1e-25);
    }

    #[test]
    fn gamma_matches_mpfr() {
        for digits in [15u32, 30, 60] {
            let prec = numeric::bits_for(digits + GUARD_DIGITS);
            for x in [0.1f64, 0.25, 0.3, 1.0, 1.7, 6.5, 13.25, 40.0] {
                let xf = Float::with_val(prec, x);
                let ours = gamma_numeric(&xf, digits);
                let mpfr = Float::with_val(prec, xf.gamma_ref());
                let tol = numeric::ten_pow_neg(digits as i32, prec);
                assert!(numeric::relerr(&ours, &mpfr) < tol, "x={x} digits={digits}");
            }
        }
    }

    #[test]
    fn gamma_recurrence() {
        let digits = 40;
        let prec = numeric::bits_for(digits + GUARD_DIGITS);
        for x in [0.25f64, 0.3, 1.7, 6.5] {
            let xf = Float::with_val(prec, x);
            let lhs = gamma_numeric(&Float::with_val(prec, &xf + 1u32), digits);
            let rhs = Float::with_val(prec, &xf * gamma_numeric(&xf, digits));
            let diff = Float::with_val(prec, &lhs - &rhs).abs();
            let ulp = Float::with_val(prec, lhs.abs_ref()) * Float::with_val(prec, 2).pow(-(prec as i32));
            assert!(diff <= ulp * 4u32, "x={x}");
        }
    }

    #[test]
    fn binom_numeric_conventions() {
        let prec = numeric::bits_for(40);
        let f = |x: f64| Float::with_val(prec, x);
        let c = binom_numeric(&f(1.0), &f(0.5), 30).unwrap();
        let four_over_pi = Float::with_val(prec, 4) / numeric::pi(prec);
        assert!(numeric::relerr(&c, &four_over_pi) < 1e-28);
        assert_eq!(binom_numeric(&f(2.0), &f(5.0), 30).unwrap(), 0);
        assert!(matches!(binom_numeric(&f(-1.0), &f(0.5), 30), Err(Error::Undefined(_))));
        let nearly = Float::with_val(prec, -2) + Float::with_val(prec, 1e-20);
        assert!(matches!(binom_numeric(&f(0.5), &nearly, 30), Err(Error::NumericPole(_))));
        // Negative non-integer arguments go through reflection.
        let c = binom_numeric(&f(-0.5), &f(1.0), 30).unwrap();
        assert!(numeric::relerr(&c, &f(-0.5)) < 1e-28);
    }
}
