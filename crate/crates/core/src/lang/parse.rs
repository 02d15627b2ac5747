//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-u^2` is
//! `-(u^2)` and `x^-1` is `x^(-1)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::expr::{Expr, FnSym, Number};
use crate::jet;

const RESERVED: [&str; 3] = ["exp", "ln", "sqrt"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{name}` at line {line}, column {col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },
}

/// Names known to the parser.
///
/// Declared functions resolve bare (`f`, `f_xu`) and in call form
/// (`f(x, W)`). An undeclared identifier in call form whose arguments are
/// distinct plain symbols declares a new unknown function over those symbols,
/// so `F(u)` and `F_u(u)` need no declaration. With `allowed` set, any other
/// identifier must be listed there.
#[derive(Clone, Debug)]
pub struct Scope {
    functions: BTreeMap<String, Vec<String>>,
    allowed: Option<BTreeSet<String>>,
    forbidden: BTreeSet<String>,
}

impl Scope {
    /// Permissive scope: `f`, `h`, `k` over `(x, u)`; `xi`, `eta`, `phi` over
    /// `(x, t, u)`; any other identifier is a plain symbol.
    pub fn standard() -> Self {
        let mut functions = BTreeMap::new();
        for (name, slots) in standard_functions() {
            functions.insert(name.to_string(), slots.iter().map(|s| s.to_string()).collect());
        }
        Scope {
            functions,
            allowed: None,
            forbidden: BTreeSet::new(),
        }
    }

    /// Permissive scope without any declared functions.
    pub fn bare() -> Self {
        Scope {
            functions: BTreeMap::new(),
            allowed: None,
            forbidden: BTreeSet::new(),
        }
    }

    /// Strict scope: only `x`, `t`, `u`, jet coordinates and `symbols` are
    /// accepted as plain symbols.
    pub fn strict<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut allowed: BTreeSet<String> = symbols.into_iter().map(Into::into).collect();
        for s in ["x", "t", "u"] {
            allowed.insert(s.to_string());
        }
        allowed.extend(jet::all_jet_names(3));
        Scope {
            functions: BTreeMap::new(),
            allowed: Some(allowed),
            forbidden: BTreeSet::new(),
        }
    }

    pub fn declare_function(&mut self, name: &str, slots: &[&str]) -> &mut Self {
        self.functions
            .insert(name.to_string(), slots.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn allow(&mut self, symbol: &str) -> &mut Self {
        if let Some(a) = &mut self.allowed {
            a.insert(symbol.to_string());
        }
        self
    }

    /// Symbols that parse but are rejected by problem-file validation.
    pub fn forbid<I: IntoIterator<Item = String>>(&mut self, symbols: I) -> &mut Self {
        self.forbidden.extend(symbols);
        self
    }

    pub fn forbidden(&self) -> &BTreeSet<String> {
        &self.forbidden
    }

    pub fn is_strict(&self) -> bool {
        self.allowed.is_some()
    }
}

impl Default for Scope {
    fn default() -> Self {
        Scope::standard()
    }
}

/// The functions the standard scope declares, with their slots.
pub fn standard_functions() -> [(&'static str, &'static [&'static str]); 6] {
    [
        ("f", &["x", "u"]),
        ("h", &["x", "u"]),
        ("k", &["x", "u"]),
        ("xi", &["x", "t", "u"]),
        ("eta", &["x", "t", "u"]),
        ("phi", &["x", "t", "u"]),
    ]
}

/// Parse in the standard scope.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_in(src, &Scope::standard())
}

pub fn parse_in(src: &str, scope: &Scope) -> Result<Expr, ParseError> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        scope,
        implicit: BTreeMap::new(),
    };
    let e = p.expr()?;
    let t = p.peek();
    if t.kind != Tok::End {
        return Err(p.err_at(t, format!("unexpected {}", t.kind.describe())));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Float(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) | Tok::Float(s) => format!("number `{}`", s),
            Tok::Ident(s) => format!("identifier `{}`", s),
            Tok::Op(c) => format!("`{}`", c),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, col: &mut usize| *col += n;
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            advance(1, &mut col);
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut float = false;
            if i < chars.len() && chars[i] == '.' {
                float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            advance(i - start, &mut col);
            out.push(Token {
                kind: if float { Tok::Float(text) } else { Tok::Int(text) },
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            advance(i - start, &mut col);
            out.push(Token {
                kind: Tok::Ident(text),
                line: tl,
                col: tc,
            });
            continue;
        }
        let kind = match c {
            '+' | '-' | '/' | '^' => Tok::Op(c),
            '*' => {
                if chars.get(i + 1) == Some(&'*') {
                    return Err(ParseError::Syntax {
                        line: tl,
                        col: tc,
                        msg: "`**` is not an operator; use `^` for powers".into(),
                    });
                }
                Tok::Op('*')
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            other => {
                return Err(ParseError::Syntax {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character `{}`", other),
                })
            }
        };
        out.push(Token { kind, line: tl, col: tc });
        i += 1;
        advance(1, &mut col);
    }
    out.push(Token {
        kind: Tok::End,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
    implicit: BTreeMap<String, Vec<String>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, t: &Token, msg: String) -> ParseError {
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg,
        }
    }

    fn expect(&mut self, kind: Tok) -> Result<Token, ParseError> {
        let t = self.next();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(self.err_at(&t, format!("expected {}, found {}", kind.describe(), t.kind.describe())))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().kind {
                Tok::Op('+') => {
                    self.next();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.next();
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek().kind {
                Tok::Op('*') => {
                    self.next();
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.next();
                    factors.push(self.unary()?.recip());
                }
                _ => break,
            }
        }
        Ok(Expr::mul(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().kind == Tok::Op('-') {
            self.next();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().kind == Tok::Op('^') {
            self.next();
            let exp = self.unary()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.kind {
            Tok::Int(s) => Ok(Expr::Num(Number::Rat(BigRational::from_integer(
                s.parse::<BigInt>().map_err(|e| self.err_at(&t, e.to_string()))?,
            )))),
            Tok::Float(s) => Ok(Expr::float(s.parse::<f64>().map_err(|e| self.err_at(&t, e.to_string()))?)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let name = name.clone();
                if self.peek().kind == Tok::LParen {
                    self.next();
                    let mut args = vec![self.expr()?];
                    while self.peek().kind == Tok::Comma {
                        self.next();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    self.call(&t, &name, args)
                } else {
                    self.bare(&t, &name)
                }
            }
            other => Err(self.err_at(&t, format!("unexpected {}", other.describe()))),
        }
    }

    fn lookup(&self, name: &str) -> Option<&Vec<String>> {
        self.implicit.get(name).or_else(|| self.scope.functions.get(name))
    }

    /// Split `ident` into a known function name and a derivative suffix that
    /// decodes against `letters`.
    fn split_derivative(&self, ident: &str, letters: Option<&[String]>) -> Option<(String, Vec<String>, Vec<u32>)> {
        for (p, _) in ident.match_indices('_') {
            let (name, suffix) = (&ident[..p], &ident[p + 1..]);
            if let Some(slots) = self.lookup(name) {
                let by_args = letters.filter(|l| l.len() == slots.len()).and_then(|l| decode_suffix(suffix, l));
                if let Some(d) = by_args.or_else(|| decode_suffix(suffix, slots)) {
                    return Some((name.to_string(), slots.clone(), d));
                }
            }
        }
        None
    }

    fn bare(&mut self, t: &Token, name: &str) -> Result<Expr, ParseError> {
        if RESERVED.contains(&name) {
            return Err(self.err_at(t, format!("`{}` must be applied to an argument", name)));
        }
        if let Some(slots) = self.lookup(name) {
            let slots: Vec<&str> = slots.iter().map(String::as_str).collect();
            return Ok(Expr::Fn(FnSym::new(name, &slots)));
        }
        if let Some((fname, slots, d)) = self.split_derivative(name, None) {
            let slots: Vec<&str> = slots.iter().map(String::as_str).collect();
            return Ok(Expr::Fn(FnSym::new(&fname, &slots).with_d(&d)));
        }
        if let Some(allowed) = &self.scope.allowed {
            if !allowed.contains(name) {
                return Err(ParseError::UnknownIdentifier {
                    name: name.to_string(),
                    line: t.line,
                    col: t.col,
                });
            }
        }
        Ok(Expr::sym(name))
    }

    fn call(&mut self, t: &Token, name: &str, args: Vec<Expr>) -> Result<Expr, ParseError> {
        if RESERVED.contains(&name) {
            if args.len() != 1 {
                return Err(self.err_at(t, format!("`{}` takes exactly one argument", name)));
            }
            let a = args.into_iter().next().unwrap();
            return Ok(match name {
                "exp" => Expr::exp(a),
                "ln" => Expr::ln(a),
                _ => Expr::sqrt(a),
            });
        }
        let arg_names: Option<Vec<String>> = {
            let names: Vec<String> = args.iter().filter_map(|a| a.as_sym().map(str::to_string)).collect();
            let mut uniq = names.clone();
            uniq.sort();
            uniq.dedup();
            (names.len() == args.len() && uniq.len() == names.len()).then_some(names)
        };
        let resolved = if let Some(slots) = self.lookup(name) {
            Some((name.to_string(), slots.clone(), vec![0; slots.len()]))
        } else {
            self.split_derivative(name, arg_names.as_deref())
        };
        let (fname, slots, d) = match resolved {
            Some(r) => r,
            None => {
                let Some(names) = arg_names.clone() else {
                    return Err(self.err_at(
                        t,
                        format!("cannot infer the variables of undeclared function `{}`", name),
                    ));
                };
                // Implicit declaration; `F_u(u)` declares `F` over `(u)`.
                let mut found = None;
                for (p, _) in name.match_indices('_') {
                    if let Some(d) = decode_suffix(&name[p + 1..], &names) {
                        found = Some((name[..p].to_string(), d));
                        break;
                    }
                }
                let (fname, d) = found.unwrap_or_else(|| (name.to_string(), vec![0; names.len()]));
                self.implicit.insert(fname.clone(), names.clone());
                (fname, names, d)
            }
        };
        if slots.len() != args.len() {
            return Err(self.err_at(
                t,
                format!("`{}` takes {} argument(s), found {}", fname, slots.len(), args.len()),
            ));
        }
        Ok(Expr::Fn(FnSym {
            name: fname,
            slots,
            d,
            args,
        }))
    }
}

/// Decode a derivative suffix such as `xu` against slot names.
fn decode_suffix(suffix: &str, slots: &[String]) -> Option<Vec<u32>> {
    if suffix.is_empty() {
        return None;
    }
    let mut d = vec![0u32; slots.len()];
    let mut rest = suffix;
    while !rest.is_empty() {
        let (i, s) = slots
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty() && rest.starts_with(s.as_str()))
            .max_by_key(|(_, s)| s.len())?;
        d[i] += 1;
        rest = &rest[s.len()..];
    }
    Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::simplify;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn negative_exponent() {
        let e = p("x*u^-1");
        assert_eq!(
            e,
            Expr::Mul(vec![Expr::sym("x"), Expr::pow(Expr::sym("u"), -Expr::int(1))])
        );
    }

    #[test]
    fn exp_node() {
        let e = p("a*x*exp(-u/b)");
        match e {
            Expr::Mul(v) => assert!(matches!(v[2], Expr::Exp(_))),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(p("-u^2"), -Expr::powi(Expr::sym("u"), 2));
    }

    #[test]
    fn precedence_fixtures() {
        let e = simplify(&p("a*x^4*u"));
        let expected = simplify(&(Expr::sym("a") * Expr::powi(Expr::sym("x"), 4) * Expr::sym("u")));
        assert_eq!(e, expected);
        assert_eq!(simplify(&p("u/t")), simplify(&(Expr::sym("u") * Expr::powi(Expr::sym("t"), -1))));
        assert_eq!(simplify(&p("2^3^2")), Expr::int(512));
    }

    #[test]
    fn error_position() {
        match parse("x+*u") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 3)),
            other => panic!("{:?}", other),
        }
        match parse("x\n + u**2") {
            Err(ParseError::Syntax { line, col, msg }) => {
                assert_eq!((line, col), (2, 5));
                assert!(msg.contains('^'));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn unknown_identifier_in_strict_scope() {
        let scope = Scope::strict(["a"]);
        assert!(parse_in("a*x*u_x", &scope).is_ok());
        match parse_in("a*z", &scope) {
            Err(ParseError::UnknownIdentifier { name, .. }) => assert_eq!(name, "z"),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn function_derivatives() {
        let e = p("f_xu");
        let expected = Expr::Fn(FnSym::new("f", &["x", "u"]).with_d(&[1, 1]));
        assert_eq!(e, expected);
        assert_eq!(p("phi_uu"), Expr::Fn(FnSym::new("phi", &["x", "t", "u"]).with_d(&[0, 0, 2])));
        let g = p("F(u) + F_u(u)");
        assert_eq!(g.function_labels().into_iter().collect::<Vec<_>>(), vec!["F", "F_u"]);
        let w = p("f_u(x, W)");
        match w {
            Expr::Fn(f) => assert_eq!(f.d, vec![0, 1]),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn floats_only_with_decimal_point() {
        assert_eq!(p("2"), Expr::int(2));
        assert_eq!(p("2.5"), Expr::float(2.5));
    }

    #[test]
    fn reserved_words() {
        assert!(parse("exp").is_err());
        assert!(parse("ln(x, t)").is_err());
    }
}
