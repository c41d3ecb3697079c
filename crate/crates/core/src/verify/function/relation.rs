//! A small grammar for `y = f(x)` relations.
//!
//! ```text
//! relation  := ["y" "="] expr | "piecewise(" piece (";" piece)* ")"
//! piece     := "x" ("<" | "<=") number ":" expr | "else" ":" expr
//! expr      := term (("+" | "-") term)*
//! term      := unary (("*" | "/") unary | unary)*      // juxtaposition multiplies
//! unary     := "-" unary | power
//! power     := primary ("^" integer)?                  // integer in 0..=3
//! primary   := number | "x" | "(" expr ")" | "abs(" expr ")" | "|" expr "|"
//! ```

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::lsq::solve_least_squares;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelationError {
    #[error("cannot parse relation at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("relation is outside the supported families: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Abs(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, k) => {
                let v = a.eval(x);
                (0..*k).fold(1.0, |acc, _| acc * v)
            }
            Expr::Abs(a) => libm::fabs(a.eval(x)),
        }
    }

    /// Coefficients `[c0, c1, ...]` when the expression is a polynomial of
    /// degree at most 3.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        fn trim(mut p: Vec<f64>) -> Vec<f64> {
            while p.len() > 1 && p[p.len() - 1] == 0.0 {
                p.pop();
            }
            p
        }
        fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
            let mut out = vec![0.0; a.len().max(b.len())];
            for (i, v) in a.iter().enumerate() {
                out[i] += v;
            }
            for (i, v) in b.iter().enumerate() {
                out[i] += sign * v;
            }
            trim(out)
        }
        fn mul(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, u) in a.iter().enumerate() {
                for (j, v) in b.iter().enumerate() {
                    out[i + j] += u * v;
                }
            }
            let out = trim(out);
            (out.len() <= 4).then_some(out)
        }
        match self {
            Expr::Num(v) => Some(vec![*v]),
            Expr::X => Some(vec![0.0, 1.0]),
            Expr::Neg(a) => Some(a.polynomial()?.iter().map(|v| -v).collect()),
            Expr::Add(a, b) => Some(add(&a.polynomial()?, &b.polynomial()?, 1.0)),
            Expr::Sub(a, b) => Some(add(&a.polynomial()?, &b.polynomial()?, -1.0)),
            Expr::Mul(a, b) => mul(&a.polynomial()?, &b.polynomial()?),
            Expr::Div(a, b) => {
                let d = b.polynomial()?;
                (d.len() == 1 && d[0] != 0.0).then(|| ())?;
                Some(a.polynomial()?.iter().map(|v| v / d[0]).collect())
            }
            Expr::Pow(a, k) => {
                let base = a.polynomial()?;
                (0..*k).try_fold(vec![1.0], |acc, _| mul(&acc, &base))
            }
            Expr::Abs(_) => None,
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::X => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }
}

/// A parsed relation: a single expression or linear pieces split at
/// ascending breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum Relation {
    Expr(Expr),
    Piecewise { breaks: Vec<f64>, pieces: Vec<Expr> },
}

impl Relation {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Relation::Expr(e) => e.eval(x),
            Relation::Piecewise { breaks, pieces } => {
                let i = breaks.iter().position(|b| x < *b).unwrap_or(breaks.len());
                pieces[i].eval(x)
            }
        }
    }
}

/// Model families the curve fitter knows how to estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `Σ c_k x^k`, `k ≤ degree`.
    Polynomial { degree: usize },
    /// `c0 + c1·x + c2·|x − vertex|`.
    Abs { vertex: f64 },
    /// `(c·x + d) / (x − pole)`, with the pole estimated from data.
    Reciprocal { pole: f64 },
    /// Independent lines between breakpoints.
    Piecewise { breaks: Vec<f64> },
}

impl Family {
    /// Discontinuity of the given relation, if any.
    pub fn pole(&self) -> Option<f64> {
        match self {
            Family::Reciprocal { pole } => Some(*pole),
            _ => None,
        }
    }
}

fn linear_root(e: &Expr) -> Option<f64> {
    let p = e.polynomial()?;
    (p.len() == 2 && p[1] != 0.0).then(|| -p[0] / p[1])
}

/// Sample abscissae across the usual plotting window, skipping `avoid`.
fn probe_points(avoid: f64) -> Vec<f64> {
    (0..41).map(|i| -9.75 + 0.4875 * i as f64).filter(|x| libm::fabs(x - avoid) > 0.05).collect()
}

/// Whether `f` lies exactly in the span of `basis` on sample points.
fn spans(f: impl Fn(f64) -> f64, basis: impl Fn(f64) -> Vec<f64>, avoid: f64) -> bool {
    let xs = probe_points(avoid);
    let rows: Vec<Vec<f64>> = xs.iter().map(|x| basis(*x)).collect();
    let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return false;
    }
    let Some(c) = solve_least_squares(&rows, &ys) else {
        return false;
    };
    let scale = 1.0 + ys.iter().fold(0.0f64, |m, y| m.max(libm::fabs(*y)));
    rows.iter()
        .zip(&ys)
        .all(|(r, y)| libm::fabs(r.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() - y) <= 1e-7 * scale)
}

/// Decides which family a relation belongs to.
pub fn classify(rel: &Relation) -> Result<Family, RelationError> {
    let e = match rel {
        Relation::Piecewise { breaks, pieces } => {
            for (i, p) in pieces.iter().enumerate() {
                if p.polynomial().is_none_or(|c| c.len() > 2) {
                    return Err(RelationError::Unsupported(format!("piece {} is not linear", i + 1)));
                }
            }
            return Ok(Family::Piecewise { breaks: breaks.clone() });
        }
        Relation::Expr(e) => e,
    };
    if let Some(p) = e.polynomial() {
        return Ok(Family::Polynomial { degree: p.len() - 1 });
    }
    let mut abs_roots = Vec::new();
    let mut pole_roots = Vec::new();
    let mut bad = false;
    e.visit(&mut |node| match node {
        Expr::Abs(a) => match linear_root(a) {
            Some(r) => abs_roots.push(r),
            None => bad = true,
        },
        Expr::Div(_, d) if d.polynomial().is_none_or(|p| p.len() > 1) => match linear_root(d) {
            Some(r) => pole_roots.push(r),
            None => bad = true,
        },
        _ => {}
    });
    let same = |v: &[f64]| v.windows(2).all(|w| libm::fabs(w[0] - w[1]) < 1e-9);
    if !bad && !abs_roots.is_empty() && pole_roots.is_empty() && same(&abs_roots) {
        let h = abs_roots[0];
        if spans(|x| e.eval(x), |x| vec![1.0, x, libm::fabs(x - h)], f64::INFINITY) {
            return Ok(Family::Abs { vertex: h });
        }
    }
    if !bad && !pole_roots.is_empty() && abs_roots.is_empty() && same(&pole_roots) {
        let h = pole_roots[0];
        if spans(|x| e.eval(x), |x| vec![1.0, 1.0 / (x - h)], h) {
            return Ok(Family::Reciprocal { pole: h });
        }
    }
    Err(RelationError::Unsupported(
        "expected a polynomial of degree ≤ 3, a |x − h| combination, c + k/(x − h), or linear pieces".into(),
    ))
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
    abs_depth: usize,
}

impl<'s> Parser<'s> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, RelationError> {
        Err(RelationError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), RelationError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected {s:?}"))
        }
    }

    fn number(&mut self) -> Result<f64, RelationError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut len = rest.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(rest.len());
        if let Some(exp) = rest[len..].strip_prefix(['e', 'E']) {
            let signed = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            let digits = signed.find(|c: char| !c.is_ascii_digit()).unwrap_or(signed.len());
            if digits > 0 {
                len += 1 + (exp.len() - signed.len()) + digits;
            }
        }
        match rest[..len].parse() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.err("expected a number"),
        }
    }

    fn signed_number(&mut self) -> Result<f64, RelationError> {
        let neg = self.eat("-");
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Expr, RelationError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_primary(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' || c == '(' || c == 'x' => true,
            Some('a') => self.src[self.pos..].starts_with("abs"),
            Some('|') => self.abs_depth == 0,
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Expr, RelationError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if self.starts_primary() {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, RelationError> {
        if self.eat("-") {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat("+") {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, RelationError> {
        let base = self.primary()?;
        if self.eat("^") || self.eat("**") {
            let k = self.number()?;
            if libm::floor(k) != k || !(0.0..=3.0).contains(&k) {
                return self.err("exponent must be an integer from 0 to 3");
            }
            return Ok(Expr::Pow(Box::new(base), k as u32));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, RelationError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let saved = core::mem::replace(&mut self.abs_depth, 0);
                let e = self.expr()?;
                self.abs_depth = saved;
                self.expect(")")?;
                Ok(e)
            }
            Some('|') => {
                self.pos += 1;
                self.abs_depth += 1;
                let e = self.expr()?;
                self.abs_depth -= 1;
                self.expect("|")?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Some('x') => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Some('a') if self.eat("abs") => {
                self.expect("(")?;
                let saved = core::mem::replace(&mut self.abs_depth, 0);
                let e = self.expr()?;
                self.abs_depth = saved;
                self.expect(")")?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::Num(self.number()?)),
            Some(c) => self.err(format!("unexpected {c:?}")),
            None => self.err("unexpected end of input"),
        }
    }

    fn piecewise(&mut self) -> Result<Relation, RelationError> {
        self.expect("(")?;
        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        loop {
            if self.eat("else") {
                self.expect(":")?;
                pieces.push(self.expr()?);
                self.eat(";");
                self.expect(")")?;
                break;
            }
            self.expect("x")?;
            if !self.eat("<=") {
                self.expect("<")?;
            }
            let b = self.signed_number()?;
            if breaks.last().is_some_and(|p| *p >= b) {
                return self.err("breakpoints must increase");
            }
            breaks.push(b);
            self.expect(":")?;
            pieces.push(self.expr()?);
            if !self.eat(";") {
                return self.err("expected ';' or 'else'");
            }
        }
        if breaks.is_empty() || pieces.len() > 3 {
            return self.err("piecewise needs 2 or 3 pieces");
        }
        Ok(Relation::Piecewise { breaks, pieces })
    }
}

/// Parses a relation such as `2*x + 1`, `y = |x - 2|`, `1/(x-3) + 1` or
/// `piecewise(x < 0: -x; else: 2x)`.
pub fn parse_relation(src: &str) -> Result<Relation, RelationError> {
    let mut p = Parser { src, pos: 0, abs_depth: 0 };
    p.skip_ws();
    if p.src[p.pos..].starts_with('y') {
        p.pos += 1;
        p.expect("=")?;
    }
    let rel = if p.eat("piecewise") { p.piecewise()? } else { Relation::Expr(p.expr()?) };
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("trailing input");
    }
    Ok(rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str, x: f64) -> f64 {
        parse_relation(s).unwrap().eval(x)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(f("2*x+1", 3.0), 7.0);
        assert_eq!(f("y = 2x + 1", 3.0), 7.0);
        assert_eq!(f("x^2 - 3x", 2.0), -2.0);
        assert_eq!(f("-x^2", 3.0), -9.0);
        assert_eq!(f("|x - 2| + 1", -1.0), 4.0);
        assert_eq!(f("2|x|", -1.5), 3.0);
        assert_eq!(f("abs(x) * 2", -1.5), 3.0);
        assert_eq!(f("1/(x-3)", 4.0), 1.0);
        assert_eq!(f("1.5e1 - x", 5.0), 10.0);
        assert_eq!(f("piecewise(x < 0: -x; x < 2: x; else: 4 - x)", 3.0), 1.0);
        assert_eq!(f("piecewise(x < 0: -x; x < 2: x; else: 4 - x)", -3.0), 3.0);
    }

    #[test]
    fn syntax_errors() {
        assert!(parse_relation("2*").is_err());
        assert!(parse_relation("x^4").is_err());
        assert!(parse_relation("sin(x)").is_err());
        assert!(parse_relation("(x").is_err());
        assert!(parse_relation("piecewise(x < 2: x; x < 1: 1; else: 0)").is_err());
    }

    #[test]
    fn families() {
        let fam = |s: &str| classify(&parse_relation(s).unwrap());
        assert_eq!(fam("2*x+1"), Ok(Family::Polynomial { degree: 1 }));
        assert_eq!(fam("(x-1)(x+1)x"), Ok(Family::Polynomial { degree: 3 }));
        assert_eq!(fam("x/2"), Ok(Family::Polynomial { degree: 1 }));
        assert_eq!(fam("|x-2| + x"), Ok(Family::Abs { vertex: 2.0 }));
        assert_eq!(fam("1/x"), Ok(Family::Reciprocal { pole: 0.0 }));
        assert_eq!(fam("2 + 3/(2x-6)"), Ok(Family::Reciprocal { pole: 3.0 }));
        assert_eq!(fam("piecewise(x < 0: 1; else: x)"), Ok(Family::Piecewise { breaks: vec![0.0] }));
        assert!(matches!(fam("x*x*x*x"), Err(RelationError::Unsupported(_))));
        assert!(matches!(fam("1/x^2"), Err(RelationError::Unsupported(_))));
        assert!(matches!(fam("|x| + |x-1|"), Err(RelationError::Unsupported(_))));
        assert!(matches!(fam("piecewise(x < 0: x^2; else: x)"), Err(RelationError::Unsupported(_))));
    }
}
