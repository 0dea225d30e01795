//! Text format for models, map pairs, jet tables and run settings.
//!
//! Grammar sketch (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! document := { model | map | jets | settings }
//! model    := "model" NAME "{" "m" "=" INT "d" "=" INT body "}"
//! body     := "Q1" "=" expr ";" .. "Qd" "=" expr ";"
//!           | "graph" "phi1" "=" expr ";" .. "phid" "=" expr ";"
//! map      := "map" NAME ":" NAME "->" NAME "{" comps "}"
//! jets     := "jets" NAME ":" NAME "->" NAME "{" "order" "=" INT ";" comps "}"
//! comps    := "f1" "=" expr ";" .. "g1" .. "tf1" .. "tg1" .. (strict order)
//! settings := "settings" "{" entries "}"   (degree_cap, seed, bracket_bound)
//! expr     := sums/products/quotients/powers of rational literals `p/q`,
//!             the imaginary unit `i`, fixed-name variables, and
//!             `binom_pow(expr, p/q)` for principal-branch fractional powers
//! ```
//!
//! Variable families are fixed names: model bodies use `z1..`, `chi1..` and
//! `tau1..` (graph bodies use `s1..` for the real part of `w`, with `s`
//! accepted when `d = 1`); map components `f1.., g1..` use `z1.., w1..` and
//! `tf1.., tg1..` use `chi1.., tau1..`. Everything elaborates into the
//! degree-capped series ring, so terms above the cap are truncated by
//! definition of the ring. Invariants:
//!
//! * parse and elaboration errors carry line and column,
//! * division requires a nonzero constant term in the denominator,
//! * `binom_pow` requires constant term exactly 1 in its base,
//! * jet components must be polynomial, vanish at 0 and stay within the
//!   declared order,
//! * `parse_document(serialize_document(doc)) == doc` for every valid `doc`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use segrekit_core::hspm::{JetPair, SegrePreservingMap};
use segrekit_core::model::{model_var_names, GenericModel};
use segrekit_core::multiindex::monomials_in_range;
use segrekit_core::rational::GaussianRational;
use segrekit_core::series::TruncatedSeries;
use segrekit_core::{Result, SegreError};
use std::collections::BTreeMap;

/// Degree cap used when neither the caller nor the document fixes one.
pub const DEFAULT_DEGREE: u32 = 8;

/// A named map declaration with resolved endpoint models.
#[derive(Clone, Debug, PartialEq)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub map: SegrePreservingMap,
}

/// A named jet-table declaration with resolved endpoint models.
#[derive(Clone, Debug, PartialEq)]
pub struct JetDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub jets: JetPair,
}

/// A fully elaborated document: every expression has been expanded in the
/// ring capped at `degree`, and every reference resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct DslDocument {
    pub degree: u32,
    pub seed: Option<u64>,
    pub bracket_bound: Option<u32>,
    pub models: Vec<(String, GenericModel)>,
    pub maps: Vec<MapDecl>,
    pub jets: Vec<JetDecl>,
}

impl DslDocument {
    pub fn model(&self, name: &str) -> Option<&GenericModel> {
        self.models
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }

    pub fn map(&self, name: &str) -> Option<&MapDecl> {
        self.maps.iter().find(|m| m.name == name)
    }

    pub fn jet(&self, name: &str) -> Option<&JetDecl> {
        self.jets.iter().find(|j| j.name == name)
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Ident(String),
    Int(BigInt),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eq,
    Semi,
    Comma,
    Colon,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn parse_err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(SegreError::Parse {
        line,
        col,
        msg: msg.into(),
    })
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>,
                    line: &mut usize,
                    col: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            while let Some(&c2) = chars.peek() {
                if c2 == '\n' {
                    break;
                }
                bump(&mut chars, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    name.push(bump(&mut chars, &mut line, &mut col));
                } else {
                    break;
                }
            }
            toks.push(Token {
                kind: TokKind::Ident(name),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_digit() {
                    digits.push(bump(&mut chars, &mut line, &mut col));
                } else {
                    break;
                }
            }
            let value: BigInt = digits.parse().expect("digit run parses as an integer");
            toks.push(Token {
                kind: TokKind::Int(value),
                line: tline,
                col: tcol,
            });
            continue;
        }
        let kind = match c {
            '{' => TokKind::LBrace,
            '}' => TokKind::RBrace,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            '=' => TokKind::Eq,
            ';' => TokKind::Semi,
            ',' => TokKind::Comma,
            ':' => TokKind::Colon,
            '+' => TokKind::Plus,
            '*' => TokKind::Star,
            '/' => TokKind::Slash,
            '^' => TokKind::Caret,
            '-' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars, &mut line, &mut col);
                    toks.push(Token {
                        kind: TokKind::Arrow,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    toks.push(Token {
                        kind: TokKind::Minus,
                        line: tline,
                        col: tcol,
                    });
                }
                continue;
            }
            other => return parse_err(tline, tcol, format!("unexpected character `{}`", other)),
        };
        bump(&mut chars, &mut line, &mut col);
        toks.push(Token {
            kind,
            line: tline,
            col: tcol,
        });
    }
    toks.push(Token {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Expression AST
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Expr {
    kind: ExprKind,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug)]
enum ExprKind {
    Int(BigInt),
    Imag,
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    BinomPow(Box<Expr>, BigRational),
}

// ---------------------------------------------------------------------------
// Raw declarations (parsed, not yet elaborated)
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct RawModel {
    name: String,
    line: usize,
    col: usize,
    m: usize,
    d: usize,
    graph: bool,
    comps: Vec<Expr>,
}

#[derive(Debug)]
struct RawEntry {
    key: String,
    line: usize,
    col: usize,
    expr: Expr,
}

#[derive(Debug)]
struct RawMap {
    name: String,
    line: usize,
    col: usize,
    source: String,
    target: String,
    order: Option<u32>,
    entries: Vec<RawEntry>,
}

#[derive(Debug, Default)]
struct RawSettings {
    degree_cap: Option<u32>,
    seed: Option<u64>,
    bracket_bound: Option<u32>,
}

#[derive(Debug)]
enum RawDecl {
    Model(RawModel),
    Map(RawMap),
    Jets(RawMap),
    Settings(RawSettings, usize, usize),
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        parse_err(t.line, t.col, msg)
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Token> {
        if self.peek().kind == kind {
            Ok(self.next())
        } else {
            self.err_here(format!("expected {}", what))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize)> {
        let t = self.next();
        match t.kind {
            TokKind::Ident(name) => Ok((name, t.line, t.col)),
            _ => parse_err(t.line, t.col, "expected an identifier"),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Token> {
        let t = self.next();
        match &t.kind {
            TokKind::Ident(name) if name == word => Ok(t),
            _ => parse_err(t.line, t.col, format!("expected `{}`", word)),
        }
    }

    fn expect_uint(&mut self, what: &str) -> Result<(u64, usize, usize)> {
        let t = self.next();
        match &t.kind {
            TokKind::Int(v) => {
                let parts = v.to_u64_digits();
                if parts.1.len() > 1 {
                    return parse_err(t.line, t.col, format!("{} is out of range", what));
                }
                Ok((
                    parts.1.first().copied().unwrap_or(0),
                    t.line,
                    t.col,
                ))
            }
            _ => parse_err(t.line, t.col, format!("expected an integer {}", what)),
        }
    }

    fn document(&mut self) -> Result<Vec<RawDecl>> {
        let mut decls = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.kind {
                TokKind::Eof => return Ok(decls),
                TokKind::Ident(word) => match word.as_str() {
                    "model" => decls.push(RawDecl::Model(self.model_decl()?)),
                    "map" => decls.push(RawDecl::Map(self.map_decl(false)?)),
                    "jets" => decls.push(RawDecl::Jets(self.map_decl(true)?)),
                    "settings" => {
                        self.next();
                        let s = self.settings_block()?;
                        decls.push(RawDecl::Settings(s, t.line, t.col));
                    }
                    other => {
                        return parse_err(
                            t.line,
                            t.col,
                            format!(
                                "expected `model`, `map`, `jets` or `settings`, found `{}`",
                                other
                            ),
                        )
                    }
                },
                _ => {
                    return self
                        .err_here("expected `model`, `map`, `jets` or `settings`")
                }
            }
        }
    }

    fn model_decl(&mut self) -> Result<RawModel> {
        self.expect_keyword("model")?;
        let (name, line, col) = self.expect_ident()?;
        self.expect(TokKind::LBrace, "`{`")?;
        self.expect_keyword("m")?;
        self.expect(TokKind::Eq, "`=`")?;
        let (m, mline, mcol) = self.expect_uint("for m")?;
        self.expect_keyword("d")?;
        self.expect(TokKind::Eq, "`=`")?;
        let (d, dline, dcol) = self.expect_uint("for d")?;
        if m == 0 || m > 16 {
            return parse_err(mline, mcol, "m must be between 1 and 16");
        }
        if d == 0 || d > 16 {
            return parse_err(dline, dcol, "d must be between 1 and 16");
        }
        let (m, d) = (m as usize, d as usize);
        let graph = matches!(&self.peek().kind, TokKind::Ident(w) if w == "graph");
        if graph {
            self.next();
        }
        let prefix = if graph { "phi" } else { "Q" };
        let mut comps = Vec::new();
        for r in 1..=d {
            let expected = format!("{}{}", prefix, r);
            let t = self.peek().clone();
            match &t.kind {
                TokKind::Ident(w) if *w == expected => {
                    self.next();
                }
                _ => {
                    return parse_err(
                        t.line,
                        t.col,
                        format!("expected component `{}`", expected),
                    )
                }
            }
            self.expect(TokKind::Eq, "`=`")?;
            let e = self.expr()?;
            self.expect(TokKind::Semi, "`;`")?;
            comps.push(e);
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(RawModel {
            name,
            line,
            col,
            m,
            d,
            graph,
            comps,
        })
    }

    fn map_decl(&mut self, with_order: bool) -> Result<RawMap> {
        self.next(); // `map` or `jets`, already matched
        let (name, line, col) = self.expect_ident()?;
        self.expect(TokKind::Colon, "`:`")?;
        let (source, ..) = self.expect_ident()?;
        self.expect(TokKind::Arrow, "`->`")?;
        let (target, ..) = self.expect_ident()?;
        self.expect(TokKind::LBrace, "`{`")?;
        let order = if with_order {
            self.expect_keyword("order")?;
            self.expect(TokKind::Eq, "`=`")?;
            let (k, kline, kcol) = self.expect_uint("for order")?;
            self.expect(TokKind::Semi, "`;`")?;
            if k == 0 || k > 64 {
                return parse_err(kline, kcol, "order must be between 1 and 64");
            }
            Some(k as u32)
        } else {
            None
        };
        let mut entries = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            let (key, kline, kcol) = self.expect_ident()?;
            self.expect(TokKind::Eq, "`=`")?;
            let expr = self.expr()?;
            self.expect(TokKind::Semi, "`;`")?;
            entries.push(RawEntry {
                key,
                line: kline,
                col: kcol,
                expr,
            });
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(RawMap {
            name,
            line,
            col,
            source,
            target,
            order,
            entries,
        })
    }

    fn settings_block(&mut self) -> Result<RawSettings> {
        self.expect(TokKind::LBrace, "`{`")?;
        let mut out = RawSettings::default();
        while self.peek().kind != TokKind::RBrace {
            let (key, line, col) = self.expect_ident()?;
            self.expect(TokKind::Eq, "`=`")?;
            let (value, ..) = self.expect_uint(&format!("for {}", key))?;
            self.expect(TokKind::Semi, "`;`")?;
            match key.as_str() {
                "degree_cap" => {
                    if out.degree_cap.replace(value as u32).is_some() {
                        return parse_err(line, col, "duplicate `degree_cap`");
                    }
                }
                "seed" => {
                    if out.seed.replace(value).is_some() {
                        return parse_err(line, col, "duplicate `seed`");
                    }
                }
                "bracket_bound" => {
                    if out.bracket_bound.replace(value as u32).is_some() {
                        return parse_err(line, col, "duplicate `bracket_bound`");
                    }
                }
                other => {
                    return parse_err(
                        line,
                        col,
                        format!(
                            "unknown setting `{}` (expected degree_cap, seed or bracket_bound)",
                            other
                        ),
                    )
                }
            }
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let t = self.peek().clone();
            let make = match t.kind {
                TokKind::Plus => ExprKind::Add as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                TokKind::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            lhs = Expr {
                kind: make(Box::new(lhs), Box::new(rhs)),
                line: t.line,
                col: t.col,
            };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let t = self.peek().clone();
            let make = match t.kind {
                TokKind::Star => ExprKind::Mul as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                TokKind::Slash => ExprKind::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr {
                kind: make(Box::new(lhs), Box::new(rhs)),
                line: t.line,
                col: t.col,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        if t.kind == TokKind::Minus {
            self.next();
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                line: t.line,
                col: t.col,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().kind == TokKind::Caret {
            let caret = self.next();
            let (e, eline, ecol) = self.expect_uint("exponent")?;
            if e > 1024 {
                return parse_err(eline, ecol, "exponent is too large");
            }
            return Ok(Expr {
                kind: ExprKind::Pow(Box::new(base), e as u32),
                line: caret.line,
                col: caret.col,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next();
        match t.kind {
            TokKind::Int(v) => Ok(Expr {
                kind: ExprKind::Int(v),
                line: t.line,
                col: t.col,
            }),
            TokKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokKind::Ident(name) => {
                if name == "i" {
                    return Ok(Expr {
                        kind: ExprKind::Imag,
                        line: t.line,
                        col: t.col,
                    });
                }
                if name == "binom_pow" {
                    self.expect(TokKind::LParen, "`(`")?;
                    let base = self.expr()?;
                    self.expect(TokKind::Comma, "`,`")?;
                    let p = self.rational_literal()?;
                    self.expect(TokKind::RParen, "`)`")?;
                    return Ok(Expr {
                        kind: ExprKind::BinomPow(Box::new(base), p),
                        line: t.line,
                        col: t.col,
                    });
                }
                Ok(Expr {
                    kind: ExprKind::Var(name),
                    line: t.line,
                    col: t.col,
                })
            }
            _ => parse_err(t.line, t.col, "expected an expression"),
        }
    }

    /// A signed rational literal `[-] INT [/ INT]` (the exponent slot of
    /// `binom_pow`).
    fn rational_literal(&mut self) -> Result<BigRational> {
        let negative = if self.peek().kind == TokKind::Minus {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let numer = match t.kind {
            TokKind::Int(v) => v,
            _ => return parse_err(t.line, t.col, "expected a rational literal"),
        };
        let denom = if self.peek().kind == TokKind::Slash {
            self.next();
            let t2 = self.next();
            match t2.kind {
                TokKind::Int(v) if !v.is_zero() => v,
                TokKind::Int(_) => return parse_err(t2.line, t2.col, "zero denominator"),
                _ => return parse_err(t2.line, t2.col, "expected a denominator"),
            }
        } else {
            BigInt::one()
        };
        let mut value = BigRational::new(numer, denom);
        if negative {
            value = -value;
        }
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

struct ElabCtx {
    arity: usize,
    cap: u32,
    vars: BTreeMap<String, usize>,
}

impl ElabCtx {
    fn new(cap: u32, names: &[String]) -> Self {
        let vars = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        ElabCtx {
            arity: names.len(),
            cap,
            vars,
        }
    }

    fn elaborate(&self, e: &Expr) -> Result<TruncatedSeries> {
        match &e.kind {
            ExprKind::Int(v) => Ok(TruncatedSeries::constant(
                self.arity,
                self.cap,
                GaussianRational::new(
                    BigRational::from_integer(v.clone()),
                    BigRational::zero(),
                ),
            )),
            ExprKind::Imag => Ok(TruncatedSeries::constant(
                self.arity,
                self.cap,
                GaussianRational::i(),
            )),
            ExprKind::Var(name) => match self.vars.get(name) {
                Some(&v) => Ok(TruncatedSeries::variable(self.arity, self.cap, v)),
                None => parse_err(
                    e.line,
                    e.col,
                    format!("unknown variable `{}` in this context", name),
                ),
            },
            ExprKind::Neg(inner) => Ok(self.elaborate(inner)?.neg()),
            ExprKind::Add(a, b) => Ok(self.elaborate(a)?.add(&self.elaborate(b)?)),
            ExprKind::Sub(a, b) => Ok(self.elaborate(a)?.sub(&self.elaborate(b)?)),
            ExprKind::Mul(a, b) => Ok(self.elaborate(a)?.mul(&self.elaborate(b)?)),
            ExprKind::Div(a, b) => {
                let denom = self.elaborate(b)?;
                match denom.invert_unit() {
                    Some(inv) => Ok(self.elaborate(a)?.mul(&inv)),
                    None => parse_err(
                        e.line,
                        e.col,
                        "division needs a nonzero constant term in the denominator",
                    ),
                }
            }
            ExprKind::Pow(base, k) => Ok(self.elaborate(base)?.pow(*k)),
            ExprKind::BinomPow(base, p) => {
                let base = self.elaborate(base)?;
                match base.binom_pow(p) {
                    Some(s) => Ok(s),
                    None => parse_err(
                        e.line,
                        e.col,
                        "binom_pow needs constant term exactly 1 in its base",
                    ),
                }
            }
        }
    }
}

/// Total-degree bound of a polynomial expression; errors on `/` and
/// `binom_pow`, which jet components may not use.
fn poly_degree_bound(e: &Expr) -> Result<u32> {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Imag => Ok(0),
        ExprKind::Var(_) => Ok(1),
        ExprKind::Neg(inner) => poly_degree_bound(inner),
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
            Ok(poly_degree_bound(a)?.max(poly_degree_bound(b)?))
        }
        ExprKind::Mul(a, b) => Ok(poly_degree_bound(a)? + poly_degree_bound(b)?),
        ExprKind::Pow(base, k) => Ok(poly_degree_bound(base)? * k),
        ExprKind::Div(..) | ExprKind::BinomPow(..) => parse_err(
            e.line,
            e.col,
            "jet components must be polynomial (no `/` or `binom_pow`)",
        ),
    }
}

fn map_side_names(dims: (usize, usize), tilde: bool) -> Vec<String> {
    let (m, d) = dims;
    let mut names = Vec::with_capacity(m + d);
    let (a, b) = if tilde { ("chi", "tau") } else { ("z", "w") };
    for i in 1..=m {
        names.push(format!("{}{}", a, i));
    }
    for r in 1..=d {
        names.push(format!("{}{}", b, r));
    }
    names
}

fn component_keys(tn: usize, te: usize) -> Vec<String> {
    let mut keys = Vec::new();
    for j in 1..=tn {
        keys.push(format!("f{}", j));
    }
    for r in 1..=te {
        keys.push(format!("g{}", r));
    }
    for j in 1..=tn {
        keys.push(format!("tf{}", j));
    }
    for r in 1..=te {
        keys.push(format!("tg{}", r));
    }
    keys
}

fn elaborate_model(raw: &RawModel, cap: u32) -> Result<GenericModel> {
    let mut names = model_var_names(raw.m, raw.d);
    if raw.graph {
        for r in 0..raw.d {
            names[2 * raw.m + r] = format!("s{}", r + 1);
        }
    }
    let mut ctx = ElabCtx::new(cap, &names);
    if raw.graph && raw.d == 1 {
        ctx.vars.insert("s".into(), 2 * raw.m);
    }
    let comps: Vec<TruncatedSeries> = raw
        .comps
        .iter()
        .map(|e| ctx.elaborate(e))
        .collect::<Result<_>>()?;
    let built = if raw.graph {
        GenericModel::from_real_graph(raw.m, raw.d, comps)
    } else {
        GenericModel::from_normal(raw.m, raw.d, comps)
    };
    built.map_err(|err| SegreError::Parse {
        line: raw.line,
        col: raw.col,
        msg: format!("model `{}`: {}", raw.name, err),
    })
}

struct ModelScope<'a> {
    local: &'a [(String, GenericModel)],
    external: &'a [(String, GenericModel)],
}

impl<'a> ModelScope<'a> {
    fn get(&self, name: &str) -> Option<&'a GenericModel> {
        self.local
            .iter()
            .chain(self.external.iter())
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }
}

fn resolve_endpoints<'a>(
    raw: &RawMap,
    scope: &ModelScope<'a>,
) -> Result<(&'a GenericModel, &'a GenericModel)> {
    let src = scope.get(&raw.source).ok_or_else(|| SegreError::Parse {
        line: raw.line,
        col: raw.col,
        msg: format!("unknown model `{}`", raw.source),
    })?;
    let tgt = scope.get(&raw.target).ok_or_else(|| SegreError::Parse {
        line: raw.line,
        col: raw.col,
        msg: format!("unknown model `{}`", raw.target),
    })?;
    Ok((src, tgt))
}

/// Checks entry keys against the strict canonical order and returns the
/// entries grouped as (f, g, tf, tg).
fn check_components<'a>(
    raw: &'a RawMap,
    tn: usize,
    te: usize,
) -> Result<Vec<&'a RawEntry>> {
    let keys = component_keys(tn, te);
    if raw.entries.len() != keys.len() {
        return parse_err(
            raw.line,
            raw.col,
            format!(
                "`{}` needs exactly the components {} (got {} entries)",
                raw.name,
                keys.join(", "),
                raw.entries.len()
            ),
        );
    }
    for (entry, expected) in raw.entries.iter().zip(&keys) {
        if &entry.key != expected {
            return parse_err(
                entry.line,
                entry.col,
                format!("expected component `{}`, found `{}`", expected, entry.key),
            );
        }
    }
    Ok(raw.entries.iter().collect())
}

fn elaborate_map(raw: &RawMap, scope: &ModelScope, cap: u32) -> Result<MapDecl> {
    let (src, tgt) = resolve_endpoints(raw, scope)?;
    let (sm, sd) = (src.m(), src.d());
    let (tn, te) = (tgt.m(), tgt.d());
    let entries = check_components(raw, tn, te)?;
    let left_ctx = ElabCtx::new(cap, &map_side_names((sm, sd), false));
    let right_ctx = ElabCtx::new(cap, &map_side_names((sm, sd), true));
    let mut comps = Vec::with_capacity(entries.len());
    for (pos, entry) in entries.iter().enumerate() {
        let ctx = if pos < tn + te { &left_ctx } else { &right_ctx };
        comps.push(ctx.elaborate(&entry.expr)?);
    }
    let tf_at = tn + te;
    let map = SegrePreservingMap::new(
        (sm, sd),
        (tn, te),
        comps[0..tn].to_vec(),
        comps[tn..tn + te].to_vec(),
        comps[tf_at..tf_at + tn].to_vec(),
        comps[tf_at + tn..].to_vec(),
    )
    .map_err(|err| SegreError::Parse {
        line: raw.line,
        col: raw.col,
        msg: format!("map `{}`: {}", raw.name, err),
    })?;
    Ok(MapDecl {
        name: raw.name.clone(),
        source: raw.source.clone(),
        target: raw.target.clone(),
        map,
    })
}

fn elaborate_jets(raw: &RawMap, scope: &ModelScope) -> Result<JetDecl> {
    let (src, tgt) = resolve_endpoints(raw, scope)?;
    let (sm, sd) = (src.m(), src.d());
    let (tn, te) = (tgt.m(), tgt.d());
    let order = raw.order.expect("jets declarations parse an order");
    let entries = check_components(raw, tn, te)?;
    let arity = sm + sd;
    let left_ctx = ElabCtx::new(order, &map_side_names((sm, sd), false));
    let right_ctx = ElabCtx::new(order, &map_side_names((sm, sd), true));
    let idxs = monomials_in_range(arity, 1, order);
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (pos, entry) in entries.iter().enumerate() {
        let tilde = pos >= tn + te;
        let ctx = if tilde { &right_ctx } else { &left_ctx };
        let bound = poly_degree_bound(&entry.expr)?;
        if bound > order {
            return parse_err(
                entry.line,
                entry.col,
                format!(
                    "jet component `{}` can carry degree {} beyond the declared order {}",
                    entry.key, bound, order
                ),
            );
        }
        let series = ctx.elaborate(&entry.expr)?;
        if !series.constant_term().is_zero() {
            return parse_err(
                entry.line,
                entry.col,
                format!("jet component `{}` must vanish at 0", entry.key),
            );
        }
        let comp = pos % (tn + te);
        let table = if tilde { &mut right } else { &mut left };
        for idx in &idxs {
            let fact = GaussianRational::new(
                BigRational::from_integer(idx.factorial()),
                BigRational::zero(),
            );
            table.insert((comp, idx.clone()), &series.coeff(idx) * &fact);
        }
    }
    Ok(JetDecl {
        name: raw.name.clone(),
        source: raw.source.clone(),
        target: raw.target.clone(),
        jets: JetPair {
            order,
            source_dims: (sm, sd),
            target_dims: (tn, te),
            left,
            right,
        },
    })
}

/// Parses and elaborates a document; references resolve against the
/// document itself.
pub fn parse_document(text: &str, degree_override: Option<u32>) -> Result<DslDocument> {
    parse_document_with(text, degree_override, &[])
}

/// Parses and elaborates a document; map and jet endpoint references resolve
/// against the document's own models first, then against `externals` (for
/// example the built-in corpus models).
pub fn parse_document_with(
    text: &str,
    degree_override: Option<u32>,
    externals: &[(String, GenericModel)],
) -> Result<DslDocument> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let decls = parser.document()?;

    let mut settings: Option<RawSettings> = None;
    for d in &decls {
        if let RawDecl::Settings(s, line, col) = d {
            if settings.is_some() {
                return parse_err(*line, *col, "duplicate settings block");
            }
            settings = Some(RawSettings {
                degree_cap: s.degree_cap,
                seed: s.seed,
                bracket_bound: s.bracket_bound,
            });
        }
    }
    let settings = settings.unwrap_or_default();
    let degree = degree_override
        .or(settings.degree_cap)
        .unwrap_or(DEFAULT_DEGREE);

    let mut models: Vec<(String, GenericModel)> = Vec::new();
    for d in &decls {
        if let RawDecl::Model(raw) = d {
            if models.iter().any(|(n, _)| n == &raw.name) {
                return parse_err(
                    raw.line,
                    raw.col,
                    format!("duplicate model `{}`", raw.name),
                );
            }
            let model = elaborate_model(raw, degree)?;
            models.push((raw.name.clone(), model));
        }
    }

    let scope = ModelScope {
        local: &models,
        external: externals,
    };
    let mut maps = Vec::new();
    let mut jets = Vec::new();
    for d in &decls {
        match d {
            RawDecl::Map(raw) => {
                if maps.iter().any(|m: &MapDecl| m.name == raw.name) {
                    return parse_err(raw.line, raw.col, format!("duplicate map `{}`", raw.name));
                }
                maps.push(elaborate_map(raw, &scope, degree)?);
            }
            RawDecl::Jets(raw) => {
                if jets.iter().any(|j: &JetDecl| j.name == raw.name) {
                    return parse_err(
                        raw.line,
                        raw.col,
                        format!("duplicate jets `{}`", raw.name),
                    );
                }
                jets.push(elaborate_jets(raw, &scope)?);
            }
            _ => {}
        }
    }

    Ok(DslDocument {
        degree,
        seed: settings.seed,
        bracket_bound: settings.bracket_bound,
        models,
        maps,
        jets,
    })
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

fn render_series(s: &TruncatedSeries, names: &[String]) -> String {
    let refs: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
    s.render(&refs)
}

/// Renders the canonical text form. Graph-declared models serialize in the
/// solved `Q`-form, which parses back to the same model, so
/// `parse_document(serialize_document(doc), None) == doc`.
pub fn serialize_document(doc: &DslDocument) -> String {
    let mut out = String::new();
    for (name, model) in &doc.models {
        let names = model_var_names(model.m(), model.d());
        out.push_str(&format!("model {} {{\n  m={} d={}\n", name, model.m(), model.d()));
        for (r, q) in model.q().iter().enumerate() {
            out.push_str(&format!("  Q{} = {};\n", r + 1, render_series(q, &names)));
        }
        out.push_str("}\n\n");
    }
    for decl in &doc.maps {
        let map = &decl.map;
        let left = map_side_names(map.source_dims(), false);
        let right = map_side_names(map.source_dims(), true);
        out.push_str(&format!(
            "map {} : {} -> {} {{\n",
            decl.name, decl.source, decl.target
        ));
        for (j, s) in map.f().iter().enumerate() {
            out.push_str(&format!("  f{} = {};\n", j + 1, render_series(s, &left)));
        }
        for (r, s) in map.g().iter().enumerate() {
            out.push_str(&format!("  g{} = {};\n", r + 1, render_series(s, &left)));
        }
        for (j, s) in map.ft().iter().enumerate() {
            out.push_str(&format!("  tf{} = {};\n", j + 1, render_series(s, &right)));
        }
        for (r, s) in map.gt().iter().enumerate() {
            out.push_str(&format!("  tg{} = {};\n", r + 1, render_series(s, &right)));
        }
        out.push_str("}\n\n");
    }
    for decl in &doc.jets {
        let jets = &decl.jets;
        let left = map_side_names(jets.source_dims, false);
        let right = map_side_names(jets.source_dims, true);
        let (f, g, tf, tg) = jets.to_polynomial_components(jets.order);
        out.push_str(&format!(
            "jets {} : {} -> {} {{\n  order = {};\n",
            decl.name, decl.source, decl.target, jets.order
        ));
        for (j, s) in f.iter().enumerate() {
            out.push_str(&format!("  f{} = {};\n", j + 1, render_series(s, &left)));
        }
        for (r, s) in g.iter().enumerate() {
            out.push_str(&format!("  g{} = {};\n", r + 1, render_series(s, &left)));
        }
        for (j, s) in tf.iter().enumerate() {
            out.push_str(&format!("  tf{} = {};\n", j + 1, render_series(s, &right)));
        }
        for (r, s) in tg.iter().enumerate() {
            out.push_str(&format!("  tg{} = {};\n", r + 1, render_series(s, &right)));
        }
        out.push_str("}\n\n");
    }
    out.push_str(&format!("settings {{\n  degree_cap = {};\n", doc.degree));
    if let Some(seed) = doc.seed {
        out.push_str(&format!("  seed = {};\n", seed));
    }
    if let Some(b) = doc.bracket_bound {
        out.push_str(&format!("  bracket_bound = {};\n", b));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use segrekit_core::multiindex::MultiIndex;

    #[test]
    fn parses_the_lewy_model() {
        let doc = parse_document("model Lewy { m=1 d=1 Q1 = tau1 + 2*i*z1*chi1; }", None)
            .expect("valid document");
        assert_eq!(doc.degree, DEFAULT_DEGREE);
        let model = doc.model("Lewy").expect("model present");
        assert_eq!((model.m(), model.d()), (1, 1));
        let q = &model.q()[0];
        let idx = MultiIndex::new(vec![1, 1, 0]);
        assert_eq!(q.coeff(&idx), GaussianRational::from_parts(0, 1, 2, 1));
    }

    #[test]
    fn rejects_non_normal_q_with_the_monomial() {
        let err = parse_document("model Bad { m=1 d=1 Q1 = tau1 + z1; }", None)
            .expect_err("normality must fail");
        let msg = err.to_string();
        assert!(
            msg.contains("z1") && msg.contains("normality"),
            "error should surface the offending monomial: {}",
            msg
        );
    }

    #[test]
    fn binom_pow_expands_binomial_series() {
        let text = "model Lewy { m=1 d=1 Q1 = tau1 + 2*i*z1*chi1; }\n\
                    map h : Lewy -> Lewy {\n\
                      f1 = z1; g1 = w1;\n\
                      tf1 = binom_pow(1 + tau1, -1/2) * chi1;\n\
                      tg1 = tau1;\n\
                    }";
        let doc = parse_document(text, Some(6)).expect("valid document");
        let tf = &doc.map("h").expect("map present").map.ft()[0];
        // (1 + tau)^{-1/2} chi = chi - 1/2 chi tau + 3/8 chi tau^2 - ...
        assert_eq!(
            tf.coeff(&MultiIndex::new(vec![1, 1])),
            GaussianRational::from_ratio(-1, 2)
        );
        assert_eq!(
            tf.coeff(&MultiIndex::new(vec![1, 2])),
            GaussianRational::from_ratio(3, 8)
        );
    }

    #[test]
    fn division_by_nonunit_is_an_error_with_position() {
        let text = "model Lewy { m=1 d=1 Q1 = tau1 + 2*i*z1*chi1; }\n\
                    map h : Lewy -> Lewy { f1 = z1 / w1; g1 = w1; tf1 = chi1; tg1 = tau1; }";
        let err = parse_document(text, None).expect_err("division must fail");
        match err {
            SegreError::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("constant term"), "got: {}", msg);
            }
            other => panic!("expected a parse error, got {}", other),
        }
    }

    #[test]
    fn jets_declaration_builds_a_jet_table() {
        let text = "model Lewy { m=1 d=1 Q1 = tau1 + 2*i*z1*chi1; }\n\
                    jets j : Lewy -> Lewy {\n\
                      order = 2;\n\
                      f1 = z1 + z1^2; g1 = w1; tf1 = chi1; tg1 = tau1;\n\
                    }";
        let doc = parse_document(text, None).expect("valid document");
        let jets = &doc.jet("j").expect("jets present").jets;
        assert_eq!(jets.order, 2);
        // Derivative value, not the raw coefficient: d^2/dz^2 (z + z^2) = 2.
        assert_eq!(
            jets.left[&(0usize, MultiIndex::new(vec![2, 0]))],
            GaussianRational::from_int(2)
        );
        // Zero entries are materialized.
        assert_eq!(
            jets.left[&(1usize, MultiIndex::new(vec![2, 0]))],
            GaussianRational::zero()
        );
    }

    #[test]
    fn round_trips_a_document_through_the_serializer() {
        let text = "model Lewy { m=1 d=1 Q1 = tau1 + 2*i*z1*chi1; }\n\
                    model Quartic { m=1 d=1 Q1 = tau1 + 2*i*z1^2*chi1^2; }\n\
                    map member : Lewy -> Lewy {\n\
                      f1 = (z1 + 1/2*w1) / (1 - w1 - 2*i*z1);\n\
                      g1 = w1 / (1 - w1 - 2*i*z1);\n\
                      tf1 = (chi1 + 1/3*tau1) / (1 - tau1 + 2*i*chi1);\n\
                      tg1 = tau1 / (1 - tau1 + 2*i*chi1);\n\
                    }\n\
                    jets j : Lewy -> Quartic { order = 2; f1 = z1; g1 = w1; tf1 = -chi1; tg1 = tau1; }\n\
                    settings { degree_cap = 6; seed = 11; }";
        let doc = parse_document(text, None).expect("valid document");
        assert_eq!(doc.degree, 6);
        assert_eq!(doc.seed, Some(11));
        let round = parse_document(&serialize_document(&doc), None).expect("round-trip parses");
        assert_eq!(doc, round);
    }

    #[test]
    fn unknown_variable_reports_its_name() {
        let err = parse_document("model M { m=1 d=1 Q1 = tau1 + 2*i*z1*chi2; }", None)
            .expect_err("chi2 is out of range for m=1");
        assert!(err.to_string().contains("chi2"), "got: {}", err);
    }
}
