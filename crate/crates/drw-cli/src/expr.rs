//! Expression language for the CLI: atoms `g`, variables, integers, the
//! operators `T, V, F, R, d, dlog, C`, and `+ - * ^`.
//!
//! Parsing is a recursive descent with column-annotated syntax errors;
//! elaboration turns an AST into a tower element or a normal form in an
//! explicit `(p, r, depth, m)` context.

use drw_core::cartier;
use drw_core::error::Error as CoreError;
use drw_core::forms::{self, DrwForm};
use drw_core::tower::{Tower, TowerElem};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Ident(String),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Teich,
    V,
    F,
    R,
    D,
    Dlog,
    C,
}

impl Func {
    fn name(&self) -> &'static str {
        match self {
            Func::Teich => "T",
            Func::V => "V",
            Func::F => "F",
            Func::R => "R",
            Func::D => "d",
            Func::Dlog => "dlog",
            Func::C => "C",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "T" => Func::Teich,
            "V" => Func::V,
            "F" => Func::F,
            "R" => Func::R,
            "d" => Func::D,
            "dlog" => Func::Dlog,
            "C" => Func::C,
            _ => return None,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Ident(s) => write!(f, "{s}"),
            Expr::Neg(e) => write!(f, "-{}", paren_factor(e)),
            Expr::Pow(b, e) => write!(f, "{}^{}", paren_factor(b), e),
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => write!(f, "{a} - {}", paren_term(b)),
            Expr::Mul(a, b) => write!(f, "{}*{}", paren_term(a), paren_term(b)),
            Expr::Call(op, e) => write!(f, "{}({e})", op.name()),
        }
    }
}

fn paren_term(e: &Expr) -> String {
    match e {
        Expr::Add(..) | Expr::Sub(..) => format!("({e})"),
        _ => format!("{e}"),
    }
}

fn paren_factor(e: &Expr) -> String {
    match e {
        Expr::Add(..) | Expr::Sub(..) | Expr::Mul(..) | Expr::Neg(..) => format!("({e})"),
        _ => format!("{e}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub col: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = vec![];
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' => {
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse::<i64>().map_err(|_| SyntaxError {
                    col,
                    message: format!("integer literal {text} out of range"),
                })?;
                out.push((Tok::Int(n), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(SyntaxError { col, message: format!("unexpected character '{other}'") })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(SyntaxError { col: self.col(), message: format!("expected {what}") })
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let neg = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e = if neg { -n } else { n };
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => {
                    return Err(SyntaxError {
                        col: self.col().saturating_sub(1),
                        message: "expected integer exponent after '^'".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Expr::Int(n)),
            Some(Tok::Minus) => {
                let inner = self.factor()?;
                Ok(Expr::Neg(Box::new(inner)))
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::from_name(&name).ok_or_else(|| SyntaxError {
                        col,
                        message: format!("unknown operator '{name}'"),
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(SyntaxError { col, message: "expected an expression".into() }),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, SyntaxError> {
    let toks = tokenize(src)?;
    let end_col = src.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, end_col };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(SyntaxError { col: p.col(), message: "trailing input".into() });
    }
    Ok(e)
}

/// Elaborated values.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Elem(TowerElem),
    Form(DrwForm),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElabError {
    UnknownSymbol(String),
    DegreeMismatch { left: u8, right: u8 },
    LengthMismatch { left: u8, right: u8 },
    Arity(String),
    Core(CoreError),
}

impl fmt::Display for ElabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElabError::UnknownSymbol(s) => write!(f, "unknown symbol '{s}'"),
            ElabError::DegreeMismatch { left, right } => {
                write!(f, "degree mismatch: q = {left} vs q = {right}")
            }
            ElabError::LengthMismatch { left, right } => {
                write!(f, "length mismatch: m = {left} vs m = {right}")
            }
            ElabError::Arity(s) => write!(f, "{s}"),
            ElabError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl ElabError {
    pub fn code(&self) -> &'static str {
        match self {
            ElabError::UnknownSymbol(_) => "UnknownSymbol",
            ElabError::DegreeMismatch { .. } => "DegreeMismatch",
            ElabError::LengthMismatch { .. } => "LengthMismatch",
            ElabError::Arity(_) => "ArityError",
            ElabError::Core(e) => e.code(),
        }
    }
}

impl From<CoreError> for ElabError {
    fn from(e: CoreError) -> Self {
        ElabError::Core(e)
    }
}

pub struct ElabCtx<'a> {
    pub tower: &'a Tower,
    pub m: u8,
}

impl<'a> ElabCtx<'a> {
    fn coerce_form(&self, v: Value, m: u8) -> Result<DrwForm, ElabError> {
        match v {
            Value::Form(f) => Ok(f),
            Value::Elem(x) => Ok(forms::teich_form(self.tower, &x, m)?),
            Value::Int(n) => Ok(forms::scalar_int(
                self.tower,
                n,
                &forms::one_form(self.tower, self.tower.depth(), m),
            )),
        }
    }

    fn coerce_elem(&self, v: Value) -> Result<TowerElem, ElabError> {
        match v {
            Value::Elem(x) => Ok(x),
            Value::Int(n) => Ok(self.tower.int(n, self.tower.depth())),
            Value::Form(_) => Err(ElabError::Arity(
                "expected a ring element, found a differential form".into(),
            )),
        }
    }

    fn check_shapes(&self, a: &DrwForm, b: &DrwForm) -> Result<(), ElabError> {
        if a.q != b.q {
            return Err(ElabError::DegreeMismatch { left: a.q, right: b.q });
        }
        if a.m != b.m {
            return Err(ElabError::LengthMismatch { left: a.m, right: b.m });
        }
        Ok(())
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, ElabError> {
        let tower = self.tower;
        Ok(match e {
            Expr::Int(n) => Value::Int(*n),
            Expr::Ident(name) => {
                if name == "g" {
                    Value::Elem(tower.scalar(tower.fq.gen(), tower.depth()))
                } else if let Some(idx) =
                    tower.spec.var_names.iter().position(|v| v == name)
                {
                    Value::Elem(tower.embed(tower.var(idx as u8 + 1, 1), tower.depth()))
                } else {
                    return Err(ElabError::UnknownSymbol(name.clone()));
                }
            }
            Expr::Neg(inner) => match self.eval(inner)? {
                Value::Int(n) => Value::Int(-n),
                Value::Elem(x) => Value::Elem(tower.neg(&x)),
                Value::Form(f) => Value::Form(forms::neg(tower, &f)),
            },
            Expr::Pow(base, exp) => match self.eval(base)? {
                Value::Int(n) => {
                    if *exp < 0 {
                        return Err(ElabError::Arity("negative power of an integer".into()));
                    }
                    Value::Int(n.pow(*exp as u32))
                }
                Value::Elem(x) => {
                    if *exp >= 0 {
                        Value::Elem(tower.pow(&x, *exp as u32)?)
                    } else {
                        let inv = tower.inv_unit(&x)?;
                        Value::Elem(tower.pow(&inv, (-exp) as u32)?)
                    }
                }
                Value::Form(f) => {
                    if *exp < 0 {
                        return Err(ElabError::Arity("negative power of a form".into()));
                    }
                    let mut acc = forms::one_form(tower, f.level, f.m);
                    for _ in 0..*exp {
                        acc = forms::mul(tower, &acc, &f)?;
                    }
                    Value::Form(acc)
                }
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let is_sub = matches!(e, Expr::Sub(..));
                let va = self.eval(a)?;
                let vb = self.eval(b)?;
                match (va, vb) {
                    (Value::Int(x), Value::Int(y)) => {
                        Value::Int(if is_sub { x - y } else { x + y })
                    }
                    (Value::Form(x), y) => {
                        let y = self.coerce_form(y, x.m)?;
                        self.check_shapes(&x, &y)?;
                        let y = if is_sub { forms::neg(tower, &y) } else { y };
                        Value::Form(forms::add(tower, &x, &y)?)
                    }
                    (x, Value::Form(y)) => {
                        let x = self.coerce_form(x, y.m)?;
                        self.check_shapes(&x, &y)?;
                        let y = if is_sub { forms::neg(tower, &y) } else { y };
                        Value::Form(forms::add(tower, &x, &y)?)
                    }
                    (x, y) => {
                        let x = self.coerce_elem(x)?;
                        let y = self.coerce_elem(y)?;
                        let y = if is_sub { tower.neg(&y) } else { y };
                        Value::Elem(tower.add(&x, &y)?)
                    }
                }
            }
            Expr::Mul(a, b) => {
                let va = self.eval(a)?;
                let vb = self.eval(b)?;
                match (va, vb) {
                    (Value::Int(x), Value::Int(y)) => Value::Int(x * y),
                    (Value::Int(n), Value::Form(f)) | (Value::Form(f), Value::Int(n)) => {
                        Value::Form(forms::scalar_int(tower, n, &f))
                    }
                    (Value::Form(x), y) => {
                        let y = self.coerce_form(y, x.m)?;
                        if x.m != y.m {
                            return Err(ElabError::LengthMismatch { left: x.m, right: y.m });
                        }
                        Value::Form(forms::mul(tower, &x, &y)?)
                    }
                    (x, Value::Form(y)) => {
                        let x = self.coerce_form(x, y.m)?;
                        Value::Form(forms::mul(tower, &x, &y)?)
                    }
                    (x, y) => {
                        let x = self.coerce_elem(x)?;
                        let y = self.coerce_elem(y)?;
                        Value::Elem(tower.mul(&x, &y)?)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let v = self.eval(arg)?;
                match func {
                    Func::Teich => {
                        let x = self.coerce_elem(v)?;
                        Value::Form(forms::teich_form(tower, &x, self.m)?)
                    }
                    Func::Dlog => {
                        let x = self.coerce_elem(v)?;
                        Value::Form(forms::dlog_unit(tower, &x, self.m)?)
                    }
                    Func::V => Value::Form(forms::apply_v(tower, &self.coerce_form(v, self.m)?)?),
                    Func::F => Value::Form(forms::apply_f(tower, &self.coerce_form(v, self.m)?)?),
                    Func::R => Value::Form(forms::apply_r(tower, &self.coerce_form(v, self.m)?)?),
                    Func::D => Value::Form(forms::apply_d(tower, &self.coerce_form(v, self.m)?)?),
                    Func::C => {
                        let f = self.coerce_form(v, self.m)?;
                        Value::Form(cartier::cartier_c(tower, &f)?)
                    }
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use drw_core::tower::TowerSpec;

    fn tower(p: u8, r: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, r, depth).unwrap()).unwrap()
    }

    #[test]
    fn parse_print_roundtrip() {
        for src in [
            "V(T(t^-1)) + dlog(t)",
            "d(d(T(t)))",
            "T(t^-3)*dlog(u) - 2*V(T(u))",
            "C(F(T(t^2)))",
            "-(t + 1)^3",
        ] {
            let ast = parse(src).unwrap();
            let printed = ast.to_string();
            assert_eq!(parse(&printed).unwrap(), ast, "roundtrip failed for {src}");
        }
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse("T(t").unwrap_err();
        assert_eq!(err.col, 4);
        assert!(parse("T(t))").is_err());
        assert!(parse("@").is_err());
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let tw = tower(2, 1, 1);
        let ctx = ElabCtx { tower: &tw, m: 2 };
        let ast = parse("V(T(t^-1)) + dlog(t)").unwrap();
        let err = ctx.eval(&ast).unwrap_err();
        assert_eq!(err.code(), "DegreeMismatch");
    }

    #[test]
    fn dd_elaborates_to_zero() {
        let tw = tower(2, 1, 1);
        let ctx = ElabCtx { tower: &tw, m: 2 };
        let ast = parse("d(d(T(t)))").unwrap();
        match ctx.eval(&ast).unwrap() {
            Value::Form(f) => assert!(f.is_zero()),
            _ => panic!("expected a form"),
        }
    }

    #[test]
    fn unknown_symbol() {
        let tw = tower(2, 1, 1);
        let ctx = ElabCtx { tower: &tw, m: 1 };
        let ast = parse("T(w)").unwrap();
        assert_eq!(ctx.eval(&ast).unwrap_err().code(), "UnknownSymbol");
    }

    #[test]
    fn teichmuller_eval_example() {
        // d(T(t)) at p=2, m=2: single component {n=2, b=[1]}
        let tw = tower(2, 1, 1);
        let ctx = ElabCtx { tower: &tw, m: 2 };
        let ast = parse("d(T(t))").unwrap();
        match ctx.eval(&ast).unwrap() {
            Value::Form(f) => {
                let comps = f.components().unwrap();
                assert_eq!(comps.len(), 1);
                assert!(comps.contains_key(&2));
            }
            _ => panic!(),
        }
    }
}
