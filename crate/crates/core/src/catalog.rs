//! Registry of the known identities with their sweep ranges and consistency links.

use std::sync::OnceLock;

use num_rational::BigRational;

use crate::dsl::{parse_expr, parse_identity};
use crate::error::{Error, Result};
use rayon::prelude::*;

use crate::expr::{Identity, ParamBinding};
use crate::verify::{bindings, default_ranges, int_range, sides_agree, Agreement, Ranges};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub identity: Identity,
    /// Short description of where the identity comes from and what it says.
    pub anchor: String,
    pub ranges: Ranges,
    pub tags: Vec<String>,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        &self.identity.id
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }

    pub fn manifest_json(&self) -> serde_json::Value {
        let params: Vec<serde_json::Value> = self
            .identity
            .params
            .iter()
            .map(|p| serde_json::json!({"name": p.name, "kind": p.kind.keyword()}))
            .collect();
        let ranges: serde_json::Map<String, serde_json::Value> = self
            .ranges
            .iter()
            .map(|(n, vs)| (n.clone(), vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().into()))
            .collect();
        serde_json::json!({
            "id": self.id(),
            "anchor": self.anchor,
            "params": params,
            "ranges": ranges,
            "tags": self.tags,
        })
    }
}

/// `(text, anchor, tags, n upper bound override)`.
type Row = (&'static str, &'static str, &'static [&'static str], Option<i64>);

const ROWS: &[Row] = &[
    (
        "identity knuth(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k) * C(2*k,k) == cases { even(n) => 2^(-n)*C(n,n/2); odd(n) => 0 }",
        "Knuth's old sum, the Reed-Dawson identity",
        &["knuth-family", "central-binomial"],
        None,
    ),
    (
        "identity knuth-gen(n: nat, m: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k-m) * C(2*(k+m), k+m) == cases { even(n) => sum(k=0..floor(m/2)) C(m,2*k) * 2^(-n-2*k) * C(2*k+n, (2*k+n)/2); odd(n) => -sum(k=1..ceil(m/2)) C(m,2*k-1) * 2^(-n-2*k+1) * C(2*k+n-1, (2*k+n-1)/2) }",
        "shifted central binomials 2^(-k-m) C(2k+2m,k+m) in Knuth's sum",
        &["knuth-family", "central-binomial"],
        None,
    ),
    (
        "identity ilslov7(n: nat) : sum(k=0..floor(n/2)) C(n,2*k) * 2^(n-2*k) * C(2*k,k) == C(2*n,n)",
        "even-index companion of Knuth's sum, also in Riordan's book",
        &["knuth-family", "central-binomial"],
        None,
    ),
    (
        "identity ef9et5k(n: nat) : sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(n-2*k) * C(2*k,k) == 1/2 * C(2*n+2,n+1) - C(2*n,n)",
        "odd-index companion of Knuth's sum, difference form",
        &["knuth-family", "central-binomial"],
        None,
    ),
    (
        "identity ef9et5k-alt(n: nat) : sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(n-2*k) * C(2*k,k) == n/(n+1) * C(2*n,n)",
        "odd-index companion of Knuth's sum, product form",
        &["knuth-family", "central-binomial"],
        Some(30),
    ),
    (
        "identity complement1(n: nat) : sum(k=0..n) (-1)^k * C(2*k,k) * C(2*(n-k),n-k) == cases { even(n) => 2^n*C(n,n/2); odd(n) => 0 }",
        "alternating convolution of central binomial coefficients",
        &["complement", "central-binomial"],
        Some(30),
    ),
    (
        "identity complement2(n: nat) : sum(k=0..n) C(2*(n-k), n-k) * C(2*k, k) == 4^n",
        "convolution of central binomial coefficients",
        &["complement", "convolution", "central-binomial"],
        Some(30),
    ),
    (
        "identity l5xib79(n: nat, x: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(-k) * C(2*k,k) * (1-x)^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) * x^(n-2*k)",
        "polynomial form of Knuth's sum, v = 0 case of the x-family",
        &["knuth-family", "polynomial"],
        None,
    ),
    (
        "identity r9e10tq(n: nat, m: nat, v: grid) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k-m) * C(2*k+2*m+v, (2*k+2*m+v)/2) * Cinv(k+m+v, v/2) == cases { even(n) => sum(k=0..floor(m/2)) C(m,2*k) * 2^(-n-2*k) * C(2*k+n, (2*k+n)/2) * Cinv((2*k+n+v)/2, (2*k+n)/2); odd(n) => -sum(k=1..ceil(m/2)) C(m,2*k-1) * 2^(-n-2*k+1) * C(2*k+n-1, (2*k+n-1)/2) * Cinv((2*k+n-1+v)/2, (2*k+n-1)/2) }",
        "two-parameter generalization in m and v, by termwise integration",
        &["knuth-family", "beta"],
        None,
    ),
    (
        "identity hdj69wz(n: nat, v: grid) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) == cases { even(n) => 2^(-n) * C(n,n/2) * Cinv((n+v)/2, v/2); odd(n) => 0 }",
        "v-generalization of Knuth's sum",
        &["knuth-family", "beta"],
        None,
    ),
    (
        "identity y6pnymc(n: nat, v: grid) : sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) * Cinv((2*k+v)/2, k) == 2^(-n) * C(2*n+v, (2*n+v)/2) * Cinv(n+v, v/2)",
        "v-generalization of the even-index companion",
        &["knuth-family", "beta"],
        None,
    ),
    (
        "identity wf0mlz9(n: nat, v: grid) : sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(n-2*k) * C(2*k,k) * Cinv((2*k+v)/2, k) == 1/2 * C(2*n+v+2, (2*n+v+2)/2) * Cinv(n+v+1, v/2) - C(2*n+v, (2*n+v)/2) * Cinv(n+v, v/2)",
        "v-generalization of the odd-index companion",
        &["knuth-family", "beta"],
        None,
    ),
    (
        "identity amk3put(n: nat) : sum(k=1..ceil(n/2)) C(n,2*k-1) / (2*k+1) == 2^(n+1)/(n+2) - 2^n/(n+1)",
        "odd-index companion at v = 1",
        &["knuth-family"],
        None,
    ),
    (
        "identity ct31is7(n: nat) : sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(n-2*k) * Cat(k) == 1/2 * Cat(n+2) - Cat(n+1)",
        "odd-index companion at v = 2, Catalan form",
        &["knuth-family", "catalan"],
        None,
    ),
    (
        "identity ratio-prop(n: nat, m: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(k+m) / (k+m+1) == cases { even(n) => sum(k=0..floor(m/2)) C(m,2*k) / (2*k+n+1); odd(n) => -sum(k=1..ceil(m/2)) C(m,2*k-1) / (2*k+n) }",
        "two-parameter family at v = 1 with weights 2^(k+m)/(k+m+1)",
        &["knuth-family"],
        None,
    ),
    (
        "identity ratio-prop-m0(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^k / (k+1) == cases { even(n) => 1/(n+1); odd(n) => 0 }",
        "weights 2^k/(k+1), m = 0",
        &["knuth-family"],
        None,
    ),
    (
        "identity ratio-prop-m1(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(k+1) / (k+2) == cases { even(n) => 1/(n+1); odd(n) => -1/(n+2) }",
        "weights 2^(k+1)/(k+2), m = 1",
        &["knuth-family"],
        None,
    ),
    (
        "identity complement1-v(n: nat, v: grid) : sum(k=0..n) (-1)^k * C(n,k) * C(2*k+v, (2*k+v)/2) * C(2*n-2*k+v, (2*n-2*k+v)/2) * Cinv(n+v, (2*k+v)/2) == cases { even(n) => 2^n * C(n,n/2) * C(v,v/2) * Cinv((n+v)/2, v/2); odd(n) => 0 }",
        "v-generalization of the alternating convolution",
        &["complement", "beta"],
        None,
    ),
    (
        "identity complement2-v(n: nat, v: grid) : sum(k=0..n) C(n,k) * C(2*k+v, (2*k+v)/2) * C(2*n-2*k+v, (2*n-2*k+v)/2) * Cinv(n+v, (2*k+v)/2) == 2^(2*n) * C(v, v/2)",
        "v-generalization of the convolution",
        &["complement", "convolution", "beta"],
        None,
    ),
    (
        "identity sf62i7f(n: nat, u: grid, v: grid, x: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * Cinv(k+u+v+1, u+1) * (1-x)^(n-k) == (u+1)/(v+1) * sum(k=0..n) (-1)^k * C(n,k) * Cinv(k+u+v+1, v+1) * x^(n-k)",
        "variation on the binomial theorem through the Beta integral on [0,1]",
        &["polynomial", "transform", "beta"],
        None,
    ),
    (
        "identity sf62i7f-uv0(n: nat, x: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) / (k+1) * (1-x)^(n-k) == sum(k=0..n) (-1)^k * C(n,k) / (k+1) * x^(n-k)",
        "Beta-integral variation at u = v = 0",
        &["polynomial", "transform"],
        None,
    ),
    (
        "identity sf62i7f-x0(n: nat, u: grid, v: grid) : sum(k=0..n) (-1)^k * C(n,k) * Cinv(k+u+v+1, u+1) == (u+1)/(v+1) * Cinv(n+u+v+1, v+1)",
        "Beta-integral variation at x = 0",
        &["transform", "beta"],
        None,
    ),
    (
        "identity qd43spp(n: nat, v: grid, x: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(-k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) * (1-x)^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) * Cinv((2*k+v)/2, k) * x^(n-2*k)",
        "polynomial x-family from the cosine substitution",
        &["knuth-family", "polynomial", "transform", "beta"],
        None,
    ),
    (
        "identity hmx1w7h(n: nat, x: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^k / (k+1) * (1-x)^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) / (2*k+1) * x^(n-2*k)",
        "x-family at v = 1",
        &["polynomial", "transform"],
        None,
    ),
    (
        "identity bv1inky(n: nat, x: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) / (k+2) * 2^(-k) * C(2*(k+1), k+1) * (1-x)^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) / (k+1) * 2^(-2*k) * C(2*k,k) * x^(n-2*k)",
        "x-family at v = 2",
        &["polynomial", "transform", "catalan"],
        None,
    ),
    (
        "identity tnrm6l2(n: nat, u: grid, v: grid, x: rat) : C(v, v/2) * sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(-2*k) * C(2*k+u, (2*k+u)/2) * Cinv((2*k+u+v)/2, v/2) * (1-x)^(n-k) == C(u, u/2) * sum(k=0..n) (-1)^k * C(n,k) * 2^(-2*k) * C(2*k+v, (2*k+v)/2) * Cinv((2*k+u+v)/2, u/2) * x^(n-k)",
        "sine-squared substitution applied to the binomial theorem",
        &["polynomial", "transform", "beta"],
        None,
    ),
    (
        "identity tnrm6l2-u0v0(n: nat, x: rat) : sum(k=0..n) (-1)^(n-k) * C(2*k,k) * 2^(-2*k) * C(n,k) * (1-x)^(n-k) == sum(k=0..n) (-1)^k * C(2*k,k) * 2^(-2*k) * C(n,k) * x^(n-k)",
        "sine-squared substitution at u = v = 0",
        &["polynomial", "transform", "central-binomial"],
        None,
    ),
    (
        "identity tnrm6l2-u2v2(n: nat, x: rat) : sum(k=0..n) (-1)^(n-k) * 2^(-2*k) * C(n,k) * Cat(k+1) * (1-x)^(n-k) == sum(k=0..n) (-1)^k * 2^(-2*k) * C(n,k) * Cat(k+1) * x^(n-k)",
        "sine-squared substitution at u = v = 2, Catalan form",
        &["polynomial", "transform", "catalan"],
        None,
    ),
    (
        "identity p9vcynz(n: nat, v: grid, x: rat) : sum(k=0..n) C(n,k) * 2^(-k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) * (1-x)^k * x^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) * Cinv((2*k+v)/2, k) * (1-x)^(2*k)",
        "second variation on the binomial theorem, in x and 1 - x",
        &["polynomial", "transform", "beta"],
        None,
    ),
    (
        "identity yvskdge(n: nat, x: rat) : sum(k=0..n) C(n,k) * 2^(-k) * C(2*k,k) * (1-x)^k * x^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) * (1-x)^(2*k)",
        "second variation at v = 0",
        &["polynomial", "transform", "central-binomial"],
        None,
    ),
    (
        "identity ni2yglt(n: nat, x: rat) : sum(k=0..n) C(n,k) * 2^k / (k+1) * (1-x)^k * x^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) / (2*k+1) * (1-x)^(2*k)",
        "second variation at v = 1",
        &["polynomial", "transform"],
        None,
    ),
    (
        "identity fe8atkt(n: nat, x: rat) : sum(k=0..n) C(n,k) * 2^(-k) * Cat(k+1) * (1-x)^k * x^(n-k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * Cat(k) * (1-x)^(2*k)",
        "second variation at v = 2, Catalan form",
        &["polynomial", "transform", "catalan"],
        None,
    ),
    (
        "identity ilndvr6(n: nat, v: grid) : sum(k=0..n) (-1)^k * C(n,k) * 2^(n-2*k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) * Cinv((2*k+v)/2, k)",
        "x-family evaluated at x = -1",
        &["x-evaluation", "beta"],
        None,
    ),
    (
        "identity alpigwp(n: nat, v: grid) : sum(k=0..n) C(n,k) * 2^(-k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(n-4*k) * C(2*k,k) * Cinv((2*k+v)/2, k)",
        "x-family evaluated at x = 2",
        &["x-evaluation", "beta"],
        None,
    ),
    (
        "identity prop-xm1-a(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(n-2*k) * C(2*k,k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k)",
        "x = -1 in the v = 0 member of the x-family",
        &["x-evaluation", "central-binomial"],
        None,
    ),
    (
        "identity prop-xm1-b(n: nat) requires n != 0 : sum(k=0..floor(n/2)) C(n,2*k) / (2*k+1) == 2^(n-1)/(2^n-1) * sum(k=1..ceil(n/2)) C(n,2*k-1) / k",
        "x = -1 in the v = 1 member of the x-family",
        &["x-evaluation"],
        None,
    ),
    (
        "identity prop-xm1-c(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * (2*k+1)/(k+2) * 2^(n-2*k+1) * Cat(k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * Cat(k)",
        "x = -1 in the v = 2 member of the x-family",
        &["x-evaluation", "catalan"],
        None,
    ),
    (
        "identity prop-x1-a(n: nat) : sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(2*k,k) == 2^(-n) * C(2*n,n)",
        "x = 1 in the v = 0 member of the x-family",
        &["x-evaluation", "central-binomial"],
        None,
    ),
    (
        "identity prop-x1-b(n: nat) : sum(k=0..floor(n/2)) C(n,2*k) / (2*k+1) == 2^n/(n+1)",
        "x = 1 in the v = 1 member of the x-family",
        &["x-evaluation"],
        None,
    ),
    (
        "identity prop-x1-c(n: nat) : sum(k=0..floor(n/2)) C(n,2*k) / (k+1) * 2^(-2*k) * C(2*k,k) == 2^(-n+1)/(n+2) * (2*n+1) * Cat(n)",
        "x = 1 in the v = 2 member of the x-family",
        &["x-evaluation", "catalan"],
        None,
    ),
    (
        "identity prop-x2-a(n: nat) : sum(k=0..n) C(n,k) * 2^(-k) * C(2*k,k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(n-4*k) * C(2*k,k)",
        "x = 2 in the v = 0 member of the x-family",
        &["x-evaluation", "central-binomial"],
        None,
    ),
    (
        "identity prop-x2-b(n: nat) : sum(k=0..floor(n/2)) C(n,2*k) * (2^(n-2*k+1) - 2^(2*k+1))/(2*k+1) == sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(2*k-1)/k",
        "x = 2 in the v = 1 member of the x-family",
        &["x-evaluation"],
        None,
    ),
    (
        "identity prop-x2-c(n: nat) : sum(k=0..n) C(n,k) * (2*k+1)/(k+2) * 2^(-k+1) * Cat(k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(n-4*k) * Cat(k)",
        "x = 2 in the v = 2 member of the x-family",
        &["x-evaluation", "catalan"],
        None,
    ),
    (
        "identity yveoyay(n: nat, v: grid) : sum(k=0..n) (-1)^(n-k) * C(n,k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) == sum(k=0..floor(n/2)) C(n,2*k) * C(2*k,k) * Cinv((2*k+v)/2, k)",
        "second variation evaluated at x = -1",
        &["x-evaluation", "beta"],
        None,
    ),
    (
        "identity vq5bsch-a(n: nat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * C(2*k,k) == sum(k=0..floor(n/2)) C(n,k) * C(n-k,k)",
        "x = -1 second variation at v = 0, central trinomial form",
        &["x-evaluation", "central-binomial"],
        None,
    ),
    (
        "identity vq5bsch-b(n: nat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(2*k)/(k+1) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(2*k)/(2*k+1)",
        "x = -1 second variation at v = 1",
        &["x-evaluation"],
        None,
    ),
    (
        "identity vq5bsch-c(n: nat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2*(2*k+1)/(k+2) * Cat(k) == sum(k=0..floor(n/2)) C(n,2*k) * Cat(k)",
        "x = -1 second variation at v = 2, Catalan form",
        &["x-evaluation", "catalan"],
        None,
    ),
    (
        "identity ei75ly5(n: nat, v: grid) : sum(k=0..n) C(2*n,2*k) * C(2*(n-k),n-k) * C(2*k+v, (2*k+v)/2) * Cinv((2*n+v)/2, n-k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(2*n-2*k) * C(2*k,k) * C(2*k+v, (2*k+v)/2) * Cinv((4*k+v)/2, k)",
        "even part of the double-angle expansion, integrated against a sine power",
        &["double-angle", "beta"],
        None,
    ),
    (
        "identity lwx1yzw(n: nat, v: grid) : sum(k=1..n) C(2*n,2*k-1) * C(2*(n-k+1),n-k+1) * C(2*k-1+v, (2*k-1+v)/2) * Cinv((2*n+v+1)/2, n-k+1) == sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(2*n+1-2*k) * C(2*k,k) * C(2*k-1+v, (2*k-1+v)/2) * Cinv((4*k+v-1)/2, k)",
        "odd part of the double-angle expansion, after multiplying by the cosine",
        &["double-angle", "beta"],
        None,
    ),
    (
        "identity ei75ly5-v0(n: nat) : sum(k=0..n) C(2*n,2*k) * C(2*(n-k),n-k) * C(2*k,k) * Cinv(n,k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(2*n-2*k) * C(2*k,k)",
        "even double-angle identity at v = 0",
        &["double-angle", "central-binomial"],
        None,
    ),
    (
        "identity lwx1yzw-v0(n: nat) : sum(k=1..n) C(2*n,2*k-1) * C(2*(n-k+1),n-k+1) * C(2*k-1, (2*k-1)/2) * Cinv((2*n+1)/2, n-k+1) == sum(k=1..ceil(n/2)) C(n,2*k-1) * 2^(2*n+1-2*k) * C(2*k,k) * C(2*k-1, (2*k-1)/2) * Cinv((4*k-1)/2, k)",
        "odd double-angle identity at v = 0",
        &["double-angle"],
        None,
    ),
    (
        "identity h35j76y(n: nat, x: rat, y: rat) requires n >= 1 : sum(k=0..floor(n/2)) (-1)^k * n/(n-k) * C(n-k,k) * (x*y)^k * (x+y)^(n-2*k) == x^n + y^n",
        "Waring's formula for power sums",
        &["waring", "polynomial"],
        Some(12),
    ),
    (
        "identity amsa61r(n: nat, x: rat, y: rat) requires x != y : sum(k=0..floor(n/2)) (-1)^k * C(n-k,k) * (x*y)^k * (x+y)^(n-2*k) == (x^(n+1) - y^(n+1))/(x - y)",
        "dual of Waring's formula",
        &["waring", "polynomial"],
        Some(12),
    ),
    (
        "identity rvlh5im(n: nat, v: grid) requires n >= 1 : sum(k=0..floor(n/2)) (-1)^k * n/(n-k) * C(n-k,k) * 2^(-4*k) * C(2*k+v, (2*k+v)/2) == C(2*n+v, (2*n+v)/2) * C(v, v/2) * 2^(1-2*n) * Cinv(n+v, v/2)",
        "Waring's formula under the half-angle sine substitution",
        &["waring", "transform", "beta"],
        None,
    ),
    (
        "identity rvlh5im-v0(n: nat) requires n >= 1 : sum(k=0..floor(n/2)) (-1)^k * n/(n-k) * C(n-k,k) * 2^(-4*k) * C(2*k,k) == 2^(1-2*n) * C(2*n,n)",
        "Waring substitution at v = 0",
        &["waring", "central-binomial"],
        None,
    ),
    (
        "identity oli5mgr(n: nat, t: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * C(n+k,k) * (1+t)^k == sum(k=0..n) C(n,k) * C(n+k,k) * t^k",
        "Simons' identity in standard polynomial form",
        &["simons", "polynomial"],
        Some(12),
    ),
    (
        "identity s9xhgba(n: nat, v: grid) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(-k) * C(n+k,k) * C(2*k+v, (2*k+v)/2) * Cinv(k+v, v/2) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(n+2*k,2*k) * C(2*k,k) * Cinv((2*k+v)/2, v/2)",
        "Simons' identity under the cosine substitution",
        &["simons", "transform", "beta"],
        None,
    ),
    (
        "identity s9xhgba-v0(n: nat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(-k) * C(n+k,k) * C(2*k,k) == sum(k=0..floor(n/2)) C(n,2*k) * 2^(-2*k) * C(n+2*k,2*k) * C(2*k,k)",
        "Simons cosine substitution at v = 0",
        &["simons", "central-binomial"],
        None,
    ),
    (
        "identity simons-uv(n: nat, u: grid, v: grid) : sum(k=0..n) (-1)^(n-k) * C(n,k) * 2^(-2*k) * C(n+k,k) * C(v, v/2) * C(2*k+u, (2*k+u)/2) * Cinv((2*k+u+v)/2, v/2) == sum(k=0..n) (-1)^k * C(n,k) * 2^(-2*k) * C(n+k,k) * C(u, u/2) * C(2*k+v, (2*k+v)/2) * Cinv((2*k+u+v)/2, u/2)",
        "Simons' identity under the sine-squared substitution, two parameters",
        &["simons", "transform", "beta"],
        None,
    ),
    (
        "identity ltr1okl(n: nat, x: rat, t: rat) : sum(k=0..n) (-1)^(n-k) * C(n,k) * (1+t)^k * (1-x)^(n-k) == sum(k=0..n) C(n,k) * t^k * x^(n-k)",
        "binomial theorem rewritten in standard form with a shift x",
        &["polynomial", "input"],
        Some(10),
    ),
    (
        "identity n47svms(n: nat, x: rat, y: rat) : sum(k=0..n) C(n,k) * (1-x)^k * (1+y)^k * x^(n-k) == sum(k=0..n) C(n,k) * y^k * (1-x)^k",
        "binomial theorem in x and (1-x)(1+y)",
        &["polynomial", "input"],
        Some(10),
    ),
];

fn build_entry(row: &Row) -> CatalogEntry {
    let (text, anchor, tags, n_hi) = row;
    let identity = parse_identity(text).unwrap_or_else(|e| panic!("catalog text does not parse: {e}\n{text}"));
    let mut ranges = default_ranges(&identity);
    if let Some(hi) = n_hi {
        for (name, values) in ranges.iter_mut() {
            if name == "n" {
                *values = int_range(0, *hi);
            }
        }
    }
    CatalogEntry {
        identity,
        anchor: anchor.to_string(),
        ranges,
        tags: tags.iter().map(|t| t.to_string()).collect(),
    }
}

/// Every registered identity, in a fixed order.
pub fn catalog_entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| ROWS.iter().map(build_entry).collect())
}

pub fn lookup(id: &str) -> Result<&'static CatalogEntry> {
    catalog_entries().iter().find(|e| e.id() == id).ok_or_else(|| Error::UnknownId(id.to_string()))
}

pub fn manifest_json() -> serde_json::Value {
    catalog_entries().iter().map(CatalogEntry::manifest_json).collect::<Vec<_>>().into()
}

/// `source` with some parameters fixed agrees with `target` up to a factor, possibly with sides swapped:
/// `source.lhs = factor * target.lhs` and `source.rhs = factor * target.rhs`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub source: &'static str,
    pub fixed: Vec<(&'static str, BigRational)>,
    pub target: &'static str,
    /// Expression in the target's parameters; `None` means 1.
    pub factor: Option<&'static str>,
    pub swapped: bool,
}

impl Reduction {
    fn new(source: &'static str, fixed: &[(&'static str, i64)], target: &'static str) -> Self {
        Reduction {
            source,
            fixed: fixed.iter().map(|&(n, v)| (n, BigRational::from_integer(v.into()))).collect(),
            target,
            factor: None,
            swapped: false,
        }
    }

    fn factor(mut self, f: &'static str) -> Self {
        self.factor = Some(f);
        self
    }

    fn swapped(mut self) -> Self {
        self.swapped = true;
        self
    }

    pub fn name(&self) -> String {
        let fixed: Vec<String> = self.fixed.iter().map(|(n, v)| format!("{n}={v}")).collect();
        if fixed.is_empty() {
            format!("{} ~ {}", self.source, self.target)
        } else {
            format!("{}{{{}}} ~ {}", self.source, fixed.join(","), self.target)
        }
    }
}

pub fn reductions() -> Vec<Reduction> {
    vec![
        Reduction::new("knuth-gen", &[("m", 0)], "knuth"),
        Reduction::new("hdj69wz", &[("v", 0)], "knuth"),
        Reduction::new("qd43spp", &[("x", 0)], "hdj69wz"),
        Reduction::new("qd43spp", &[("x", 1)], "y6pnymc").swapped(),
        Reduction::new("y6pnymc", &[("v", 0)], "ilslov7").factor("2^(-n)"),
        Reduction::new("wf0mlz9", &[("v", 0)], "ef9et5k"),
        Reduction::new("wf0mlz9", &[("v", 1)], "amk3put").factor("2^n"),
        Reduction::new("wf0mlz9", &[("v", 2)], "ct31is7"),
        Reduction::new("ef9et5k", &[], "ef9et5k-alt"),
        Reduction::new("r9e10tq", &[("v", 0)], "knuth-gen"),
        Reduction::new("r9e10tq", &[("m", 0)], "hdj69wz"),
        Reduction::new("r9e10tq", &[("v", 1)], "ratio-prop"),
        Reduction::new("ratio-prop", &[("m", 0)], "ratio-prop-m0"),
        Reduction::new("ratio-prop", &[("m", 1)], "ratio-prop-m1"),
        Reduction::new("complement1-v", &[("v", 0)], "complement1"),
        Reduction::new("complement2-v", &[("v", 0)], "complement2"),
        Reduction::new("sf62i7f", &[("u", 0), ("v", 0)], "sf62i7f-uv0"),
        Reduction::new("sf62i7f", &[("x", 0)], "sf62i7f-x0").factor("(-1)^n"),
        Reduction::new("qd43spp", &[("v", 0)], "l5xib79"),
        Reduction::new("qd43spp", &[("v", 1)], "hmx1w7h"),
        Reduction::new("qd43spp", &[("v", 2)], "bv1inky"),
        Reduction::new("tnrm6l2", &[("u", 0), ("v", 0)], "tnrm6l2-u0v0"),
        Reduction::new("tnrm6l2", &[("u", 2), ("v", 2)], "tnrm6l2-u2v2").factor("2"),
        Reduction::new("p9vcynz", &[("v", 0)], "yvskdge"),
        Reduction::new("p9vcynz", &[("v", 1)], "ni2yglt"),
        Reduction::new("p9vcynz", &[("v", 2)], "fe8atkt"),
        Reduction::new("qd43spp", &[("x", -1)], "ilndvr6").factor("(-1)^n"),
        Reduction::new("qd43spp", &[("x", 2)], "alpigwp"),
        Reduction::new("ilndvr6", &[("v", 0)], "prop-xm1-a"),
        Reduction::new("alpigwp", &[("v", 0)], "prop-x2-a"),
        Reduction::new("p9vcynz", &[("x", -1)], "yveoyay"),
        Reduction::new("yveoyay", &[("v", 0)], "vq5bsch-a"),
        Reduction::new("yveoyay", &[("v", 1)], "vq5bsch-b"),
        Reduction::new("yveoyay", &[("v", 2)], "vq5bsch-c"),
        Reduction::new("y6pnymc", &[("v", 0)], "prop-x1-a"),
        Reduction::new("ei75ly5", &[("v", 0)], "ei75ly5-v0"),
        Reduction::new("lwx1yzw", &[("v", 0)], "lwx1yzw-v0"),
        Reduction::new("rvlh5im", &[("v", 0)], "rvlh5im-v0"),
        Reduction::new("s9xhgba", &[("v", 0)], "s9xhgba-v0"),
    ]
}

/// Check `r` at one binding of the target's parameters.
pub fn check_reduction_at(r: &Reduction, b: &ParamBinding) -> Agreement {
    let (source, target) = match (lookup(r.source), lookup(r.target)) {
        (Ok(s), Ok(t)) => (s, t),
        (Err(e), _) | (_, Err(e)) => return Agreement::Disagree(e.to_string()),
    };
    let mut source = source.identity.clone();
    for (name, v) in &r.fixed {
        source = source.specialize(name, v);
    }
    let factor = match r.factor {
        Some(text) => {
            let names: Vec<&str> = target.identity.params.iter().map(|p| p.name.as_str()).collect();
            match parse_expr(text, &names) {
                Ok(e) => Some(e),
                Err(e) => return Agreement::Disagree(e.to_string()),
            }
        }
        None => None,
    };
    sides_agree(&source, &target.identity, b, r.swapped, factor.as_ref())
}

/// Check `r` over the target's default ranges, or `ranges` when given.
pub fn check_reduction(r: &Reduction, ranges: Option<&Ranges>) -> Vec<(ParamBinding, Agreement)> {
    let target = match lookup(r.target) {
        Ok(t) => t,
        Err(e) => return vec![(ParamBinding::new(), Agreement::Disagree(e.to_string()))],
    };
    let ranges = ranges.unwrap_or(&target.ranges);
    bindings(ranges).into_par_iter().map(|b| {
        let a = check_reduction_at(r, &b);
        (b, a)
    }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;
    use crate::dsl::{format_identity, parse_identity};
    use crate::expr::{CmpOp, ParamKind, Predicate, SumExpr};
    use crate::verify::{sweep, verify_instance, Mode, Status};

    fn half(n: i64) -> BigRational {
        rat(n, 2)
    }

    #[test]
    fn registry_shape() {
        let entries = catalog_entries();
        assert!(entries.len() >= 45, "{}", entries.len());
        let mut ids: Vec<&str> = entries.iter().map(|e| e.id()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), entries.len(), "duplicate ids");
        for e in entries {
            assert!(!e.anchor.is_empty());
            let names: Vec<&str> = e.identity.params.iter().map(|p| p.name.as_str()).collect();
            let ranged: Vec<&str> = e.ranges.iter().map(|(n, _)| n.as_str()).collect();
            assert_eq!(names, ranged, "{}", e.id());
        }
    }

    #[test]
    fn lookups() {
        let knuth = lookup("knuth").unwrap();
        assert_eq!(knuth.identity.params.len(), 1);
        assert_eq!(knuth.identity.params[0].name, "n");
        assert_eq!(knuth.identity.params[0].kind, ParamKind::Natural);
        assert_eq!(lookup("nonsense").unwrap_err(), Error::UnknownId("nonsense".into()));
        let c2 = lookup("complement2").unwrap();
        assert!(c2.has_tag("convolution"));
        assert!(!c2.has_tag("knuth-family"));
        let rv = lookup("rvlh5im").unwrap();
        assert_eq!(rv.identity.validity, Predicate::cmp(SumExpr::param("n"), CmpOp::Ge, SumExpr::int(1)));
    }

    #[test]
    fn dsl_texts_match_entries() {
        let knuth = parse_identity("identity knuth(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k) * C(2*k,k) == cases { even(n) => 2^(-n)*C(n,n/2); odd(n) => 0 }").unwrap();
        assert_eq!(knuth, lookup("knuth").unwrap().identity);
        let conv = parse_identity("identity conv(n: nat) : sum(k=0..n) C(2*(n-k), n-k) * C(2*k, k) == 4^n").unwrap();
        let c2 = &lookup("complement2").unwrap().identity;
        assert_eq!(conv.lhs, c2.lhs);
        assert_eq!(conv.rhs, c2.rhs);
        assert_eq!(conv.params, c2.params);
    }

    #[test]
    fn round_trip_all() {
        for e in catalog_entries() {
            let text = format_identity(&e.identity);
            assert_eq!(parse_identity(&text).unwrap(), e.identity, "{text}");
        }
    }

    #[test]
    fn spot_values() {
        let check = |id: &str, n: i64, expect: BigRational| {
            let r = verify_instance(&lookup(id).unwrap().identity, &ParamBinding::new().with_int("n", n), Mode::Exact);
            assert_eq!(r.status, Status::ExactEqual, "{id}");
            assert_eq!(r.lhs, Some(crate::verify::Value::Exact(crate::exact::PiValue::from_rational(expect))), "{id}");
        };
        check("knuth", 2, rat(1, 2));
        check("ilslov7", 2, rat(6, 1));
        check("ef9et5k", 2, rat(4, 1));
        check("amk3put", 2, rat(2, 3));
        check("ct31is7", 1, rat(1, 2));
        check("complement2", 2, rat(16, 1));
    }

    #[test]
    fn waring_skips_n0() {
        let h = &lookup("h35j76y").unwrap().identity;
        let b = ParamBinding::new().with_int("n", 0).with_int("x", 1).with_int("y", 2);
        let r = verify_instance(h, &b, Mode::Exact);
        assert_eq!(r.status, Status::Skipped { reason: "requires n >= 1".into() });
    }

    #[test]
    fn small_sweeps_pass() {
        for e in catalog_entries() {
            let ranges: Ranges = e
                .ranges
                .iter()
                .map(|(n, vs)| (n.clone(), vs.iter().filter(|v| v.is_integer()).take(4).cloned().collect()))
                .collect();
            for r in sweep(&e.identity, &ranges, Mode::Exact) {
                assert!(!r.status.is_bad(), "{} {}: {:?}", r.id, r.binding, r.status);
            }
        }
    }

    #[test]
    fn grid_half_values() {
        let hd = &lookup("hdj69wz").unwrap().identity;
        let b = ParamBinding::new().with_int("n", 4).with_int("v", 3);
        assert_eq!(verify_instance(hd, &b, Mode::Exact).status, Status::ExactEqual);
        let b = ParamBinding::new().with_int("n", 4).with("v", half(1));
        assert!(matches!(verify_instance(hd, &b, Mode::Exact).status, Status::NumericEqual { .. }));
        let lw = &lookup("lwx1yzw").unwrap().identity;
        let b = ParamBinding::new().with_int("n", 3).with_int("v", 0);
        assert_eq!(verify_instance(lw, &b, Mode::Exact).status, Status::ExactEqual);
    }

    #[test]
    fn core_reductions() {
        for r in reductions() {
            let ranges: Option<Ranges> = {
                let t = lookup(r.target).unwrap();
                Some(
                    t.ranges
                        .iter()
                        .map(|(n, vs)| (n.clone(), vs.iter().take(5).cloned().collect()))
                        .collect(),
                )
            };
            let out = check_reduction(&r, ranges.as_ref());
            let agree = out.iter().filter(|(_, o)| *o == Agreement::Exact).count();
            assert!(agree > 0, "{} never applicable", r.name());
            for (_, o) in &out {
                assert!(!matches!(o, Agreement::Disagree(_)), "{}: {o:?}", r.name());
            }
        }
    }
}
