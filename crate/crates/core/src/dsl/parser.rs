use num_bigint::BigInt;
use num_rational::BigRational;

use super::lexer::{lex, Tok, Token};
use super::{DslError, ParseError, SourceSpan};
use crate::expr::{Case, CmpOp, Guard, Identity, Param, ParamKind, Predicate, SumExpr};

const RESERVED: &[&str] = &[
    "identity", "requires", "cases", "even", "odd", "nonzero", "always", "forall", "and", "sum", "floor", "ceil", "C",
    "Cinv", "Cat", "nat", "grid", "rat",
];

/// Parse a single identity.
pub fn parse_identity(text: &str) -> Result<Identity, DslError> {
    let mut p = Parser::new(text)?;
    let id = p.identity()?;
    p.eat(&Tok::Semi);
    p.expect_eof()?;
    Ok(id)
}

/// Parse every identity in a file, optionally separated by `;`.
pub fn parse_file(text: &str) -> Result<Vec<Identity>, DslError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        out.push(p.identity()?);
        p.eat(&Tok::Semi);
    }
    Ok(out)
}

/// Parse a bare expression over the given parameter names.
pub fn parse_expr(text: &str, params: &[&str]) -> Result<SumExpr, DslError> {
    let mut p = Parser::new(text)?;
    p.params = params.iter().map(|n| Param::new(n, ParamKind::Rational)).collect();
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    params: Vec<Param>,
    scope: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, DslError> {
        Ok(Self { text, toks: lex(text)?, pos: 0, params: Vec::new(), scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> DslError {
        self.error_at(self.pos, expected)
    }

    fn error_at(&self, pos: usize, expected: &str) -> DslError {
        let t = &self.toks[pos];
        let found = if t.tok == Tok::Eof { t.tok.describe() } else { self.text[t.start..t.end].to_string() };
        DslError::Parse(ParseError {
            span: SourceSpan::new(self.text, t.start, t.end),
            expected: expected.to_string(),
            found,
        })
    }

    fn bind_error(&self, tok: &Token, name: &str, message: &str) -> DslError {
        DslError::Bind {
            name: name.to_string(),
            span: SourceSpan::new(self.text, tok.start, tok.end),
            message: message.to_string(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Token, DslError> {
        if *self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.error(&format!("`{}`", t.symbol())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Token, DslError> {
        match self.peek() {
            Tok::Name(n) if n == kw => Ok(self.bump()),
            _ => Err(self.error(&format!("`{kw}`"))),
        }
    }

    fn expect_eof(&self) -> Result<(), DslError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    /// A fresh identifier that is not a reserved word.
    fn ident(&mut self, what: &str) -> Result<(Token, String), DslError> {
        match self.peek().clone() {
            Tok::Name(n) if !RESERVED.contains(&n.as_str()) => Ok((self.bump(), n)),
            _ => Err(self.error(what)),
        }
    }

    fn identity(&mut self) -> Result<Identity, DslError> {
        self.params.clear();
        self.scope.clear();
        self.expect_keyword("identity")?;
        let (_, mut id) = self.ident("an identity name")?;
        while *self.peek() == Tok::Minus {
            self.bump();
            match self.peek().clone() {
                Tok::Name(n) => {
                    self.bump();
                    id.push('-');
                    id.push_str(&n);
                }
                Tok::Int(n) => {
                    self.bump();
                    id.push('-');
                    id.push_str(&n.to_string());
                }
                _ => return Err(self.error("an identity name segment")),
            }
        }
        self.expect(Tok::LParen)?;
        if *self.peek() != Tok::RParen {
            loop {
                let (tok, name) = self.ident("a parameter name")?;
                if self.params.iter().any(|p| p.name == name) {
                    return Err(self.bind_error(&tok, &name, "duplicate parameter"));
                }
                self.expect(Tok::Colon)?;
                let kind = match self.peek() {
                    Tok::Name(k) if k == "nat" => ParamKind::Natural,
                    Tok::Name(k) if k == "grid" => ParamKind::Grid,
                    Tok::Name(k) if k == "rat" => ParamKind::Rational,
                    _ => return Err(self.error("`nat`, `grid` or `rat`")),
                };
                self.bump();
                self.params.push(Param { name, kind });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let validity = if self.is_keyword("requires") {
            self.bump();
            self.predicate()?
        } else {
            Predicate::True
        };
        self.expect(Tok::Colon)?;
        let lhs = self.expr()?;
        self.expect(Tok::EqEq)?;
        let rhs = if self.is_keyword("cases") {
            self.bump();
            self.cases()?
        } else {
            vec![Case { guard: Guard::Always, expr: self.expr()? }]
        };
        Ok(Identity { id, params: self.params.clone(), validity, lhs, rhs })
    }

    fn cases(&mut self) -> Result<Vec<Case>, DslError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        loop {
            let guard = self.guard()?;
            self.expect(Tok::Arrow)?;
            let expr = self.expr()?;
            out.push(Case { guard, expr });
            if !self.eat(&Tok::Semi) || *self.peek() == Tok::RBrace {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn guard(&mut self) -> Result<Guard, DslError> {
        let kw = match self.peek() {
            Tok::Name(n) if ["even", "odd", "nonzero", "always"].contains(&n.as_str()) => n.clone(),
            _ => return Err(self.error("`even`, `odd`, `nonzero` or `always`")),
        };
        self.bump();
        if kw == "always" {
            return Ok(Guard::Always);
        }
        self.expect(Tok::LParen)?;
        let (tok, name) = self.ident("a parameter name")?;
        if !self.params.iter().any(|p| p.name == name) {
            return Err(self.bind_error(&tok, &name, "unbound parameter"));
        }
        self.expect(Tok::RParen)?;
        Ok(match kw.as_str() {
            "even" => Guard::Even(name),
            "odd" => Guard::Odd(name),
            _ => Guard::NonZero(name),
        })
    }

    fn predicate(&mut self) -> Result<Predicate, DslError> {
        let mut items = vec![self.pred_atom()?];
        while self.is_keyword("and") {
            self.bump();
            items.push(self.pred_atom()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one item") } else { Predicate::And(items) })
    }

    fn pred_atom(&mut self) -> Result<Predicate, DslError> {
        if self.is_keyword("forall") {
            self.bump();
            let (index, lo, hi) = self.range_header()?;
            let body = self.pred_atom();
            self.scope.pop();
            return Ok(Predicate::ForAll { index, lo, hi, body: Box::new(body?) });
        }
        let a = self.expr()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            _ => return Err(self.error("a comparison operator")),
        };
        self.bump();
        let b = self.expr()?;
        Ok(Predicate::Cmp(a, op, b))
    }

    /// `(NAME = lo .. hi)`; pushes the index onto the scope.
    fn range_header(&mut self) -> Result<(String, SumExpr, SumExpr), DslError> {
        self.expect(Tok::LParen)?;
        let (tok, index) = self.ident("an index name")?;
        if self.scope.contains(&index) {
            return Err(self.bind_error(&tok, &index, "duplicate index"));
        }
        if self.params.iter().any(|p| p.name == index) {
            return Err(self.bind_error(&tok, &index, "index shadows parameter"));
        }
        self.expect(Tok::Assign)?;
        let lo = self.expr()?;
        self.expect(Tok::DotDot)?;
        let hi = self.expr()?;
        self.expect(Tok::RParen)?;
        self.scope.push(index.clone());
        Ok((index, lo, hi))
    }

    fn expr(&mut self) -> Result<SumExpr, DslError> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    items.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    items.push(SumExpr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(SumExpr::add(items))
    }

    fn term(&mut self) -> Result<SumExpr, DslError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    let num = SumExpr::mul(std::mem::take(&mut factors));
                    factors.push(SumExpr::div(num, self.unary()?));
                }
                _ => break,
            }
        }
        Ok(SumExpr::mul(factors))
    }

    fn unary(&mut self) -> Result<SumExpr, DslError> {
        if *self.peek() != Tok::Minus {
            return self.power();
        }
        let folded = match (self.peek_at(1), self.peek_at(2)) {
            (Tok::Int(n), next) if *next != Tok::Caret => Some(SumExpr::Int(-n.clone())),
            (Tok::Rat(p, q), next) if *next != Tok::Caret => {
                Some(SumExpr::rat(BigRational::new(-p.clone(), q.clone())))
            }
            _ => None,
        };
        self.bump();
        match folded {
            Some(lit) => {
                self.bump();
                Ok(lit)
            }
            None => Ok(SumExpr::neg(self.unary()?)),
        }
    }

    fn power(&mut self) -> Result<SumExpr, DslError> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            return Ok(SumExpr::pow(base, self.unary()?));
        }
        Ok(base)
    }

    fn is_alt_sign(&self) -> bool {
        *self.peek() == Tok::LParen
            && *self.peek_at(1) == Tok::Minus
            && *self.peek_at(2) == Tok::Int(BigInt::from(1))
            && *self.peek_at(3) == Tok::RParen
            && *self.peek_at(4) == Tok::Caret
    }

    fn args2(&mut self) -> Result<(SumExpr, SumExpr), DslError> {
        self.expect(Tok::LParen)?;
        let a = self.expr()?;
        self.expect(Tok::Comma)?;
        let b = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok((a, b))
    }

    fn args1(&mut self) -> Result<SumExpr, DslError> {
        self.expect(Tok::LParen)?;
        let a = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(a)
    }

    /// `floor(X / 2)` or `ceil(X / 2)`; returns `X`.
    fn half_arg(&mut self) -> Result<SumExpr, DslError> {
        self.expect(Tok::LParen)?;
        let start = self.pos;
        let inner = self.expr()?;
        let x = match inner {
            SumExpr::Div(x, d) if *d == SumExpr::int(2) => *x,
            SumExpr::Rat(q) if *q.denom() == BigInt::from(2) => SumExpr::Int(q.numer().clone()),
            _ => return Err(self.error_at(start, "an argument of the form `x / 2`")),
        };
        self.expect(Tok::RParen)?;
        Ok(x)
    }

    fn primary(&mut self) -> Result<SumExpr, DslError> {
        if self.is_alt_sign() {
            for _ in 0..5 {
                self.bump();
            }
            return Ok(SumExpr::alt(self.primary()?));
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(SumExpr::Int(n))
            }
            Tok::Rat(p, q) => {
                self.bump();
                Ok(SumExpr::rat(BigRational::new(p, q)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Name(n) => match n.as_str() {
                "C" => {
                    self.bump();
                    let (a, b) = self.args2()?;
                    Ok(SumExpr::binom(a, b))
                }
                "Cinv" => {
                    self.bump();
                    let (a, b) = self.args2()?;
                    Ok(SumExpr::binom_inv(a, b))
                }
                "Cat" => {
                    self.bump();
                    Ok(SumExpr::Catalan(Box::new(self.args1()?)))
                }
                "floor" => {
                    self.bump();
                    Ok(SumExpr::FloorHalf(Box::new(self.half_arg()?)))
                }
                "ceil" => {
                    self.bump();
                    Ok(SumExpr::CeilHalf(Box::new(self.half_arg()?)))
                }
                "sum" => {
                    self.bump();
                    let (index, lo, hi) = self.range_header()?;
                    let body = self.term();
                    self.scope.pop();
                    Ok(SumExpr::sum(&index, lo, hi, body?))
                }
                _ if RESERVED.contains(&n.as_str()) => Err(self.error("an expression")),
                _ => {
                    let tok = self.bump();
                    if self.scope.contains(&n) {
                        Ok(SumExpr::Var(n))
                    } else if self.params.iter().any(|p| p.name == n) {
                        Ok(SumExpr::Param(n))
                    } else {
                        Err(self.bind_error(&tok, &n, "unbound name"))
                    }
                }
            },
            _ => Err(self.error("an expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KNUTH: &str = "identity knuth(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k) * C(2*k,k) == cases { even(n) => 2^(-n)*C(n,n/2); odd(n) => 0 }";

    #[test]
    fn knuth_structure() {
        let id = parse_identity(KNUTH).unwrap();
        assert_eq!(id.id, "knuth");
        assert_eq!(id.params, vec![Param::new("n", ParamKind::Natural)]);
        assert_eq!(id.rhs.len(), 2);
        assert_eq!(id.rhs[0].guard, Guard::Even("n".into()));
        let SumExpr::Sum { index, body, .. } = &id.lhs else { panic!("lhs not a sum") };
        assert_eq!(index, "k");
        let SumExpr::Mul(f) = body.as_ref() else { panic!("body not a product") };
        assert_eq!(f.len(), 4);
        assert_eq!(f[0], SumExpr::alt(SumExpr::var("k")));
        assert_eq!(f[2], SumExpr::pow(SumExpr::int(2), SumExpr::neg(SumExpr::var("k"))));
    }

    #[test]
    fn unbound_index_is_bind_error() {
        let e = parse_identity("identity bad(n: nat) : sum(k=0..n) C(n,j) == 0").unwrap_err();
        match e {
            DslError::Bind { name, span, .. } => {
                assert_eq!(name, "j");
                assert_eq!(span.start + 1, span.end);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_index_rejected() {
        let e = parse_identity("identity d(n: nat) : sum(k=0..n) sum(k=0..n) 1 == 0").unwrap_err();
        assert!(matches!(e, DslError::Bind { ref message, .. } if message == "duplicate index"));
        let e = parse_identity("identity d(n: nat) : sum(n=0..3) 1 == 0").unwrap_err();
        assert!(matches!(e, DslError::Bind { .. }));
    }

    #[test]
    fn precedence_and_literals() {
        let p = |s: &str| parse_expr(s, &["n", "a", "b", "c"]).unwrap();
        assert_eq!(p("-2"), SumExpr::int(-2));
        assert_eq!(p("-2^n"), SumExpr::neg(SumExpr::pow(SumExpr::int(2), SumExpr::param("n"))));
        assert_eq!(p("(-1)^n"), SumExpr::alt(SumExpr::param("n")));
        assert_eq!(p("(-1)"), SumExpr::int(-1));
        assert_eq!(p("1/2"), SumExpr::rat(BigRational::new(1.into(), 2.into())));
        assert_eq!(p("4/2"), SumExpr::int(2));
        assert_eq!(
            p("a*b/c"),
            SumExpr::div(SumExpr::Mul(vec![SumExpr::param("a"), SumExpr::param("b")]), SumExpr::param("c"))
        );
        assert_eq!(
            p("a - b"),
            SumExpr::Add(vec![SumExpr::param("a"), SumExpr::neg(SumExpr::param("b"))])
        );
        assert_eq!(p("floor(n/2)"), SumExpr::FloorHalf(Box::new(SumExpr::param("n"))));
        assert_eq!(p("ceil(3/2)"), SumExpr::CeilHalf(Box::new(SumExpr::int(3))));
        let s = p("sum(k=0..n) a*k + 1");
        assert!(matches!(s, SumExpr::Add(ref v) if matches!(v[0], SumExpr::Sum { .. })));
    }

    #[test]
    fn requires_and_forall() {
        let id = parse_identity(
            "identity r(n: nat, x: rat, y: rat) requires n >= 1 and forall(j=0..n) x != j : x == x",
        )
        .unwrap();
        let Predicate::And(v) = &id.validity else { panic!() };
        assert!(matches!(v[1], Predicate::ForAll { .. }));
    }

    #[test]
    fn file_of_several() {
        let f = "# two\nidentity a-1(n: nat) : n == n\nidentity b-x(n: nat) : n == n;";
        let ids = parse_file(f).unwrap();
        assert_eq!(ids.iter().map(|i| i.id.as_str()).collect::<Vec<_>>(), vec!["a-1", "b-x"]);
    }
}
