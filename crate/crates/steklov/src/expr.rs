//! A small complex-valued expression language for refractive-index profiles
//! and polar inclusion boundaries.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-')? atom ('^' exponent)?
//! atom   := number | 'i' | var | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `r`, `theta`, `x`, `y`; functions are `sin`, `cos`, `exp`,
//! `sqrt`, `abs`. Exponents are integers; boundary-radius expressions may
//! additionally use rational exponents written as `^(p/q)`, which is what
//! the rounded-square shape needs. Parse failures report the 1-based byte
//! offset of the first invalid token.

use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_INPUT_BYTES: usize = 4096;
const DIV_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    R,
    Theta,
    X,
    Y,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::R => "r",
            Var::Theta => "theta",
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(Complex64),
    Imaginary,
    Var(Var),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    PowInt(Box<ExprAst>, i32),
    PowRational(Box<ExprAst>, i32, u32),
    Func(Func, Box<ExprAst>),
}

impl ExprAst {
    /// Constant expression helper.
    pub fn constant(v: Complex64) -> ExprAst {
        ExprAst::Const(v)
    }

    /// Evaluate at polar coordinates; `x` and `y` derive from `(r, theta)`.
    pub fn eval(&self, r: f64, theta: f64) -> Result<Complex64> {
        let value = self.eval_inner(r, theta)?;
        Ok(value)
    }

    fn eval_inner(&self, r: f64, theta: f64) -> Result<Complex64> {
        use ExprAst::*;
        Ok(match self {
            Const(v) => *v,
            Imaginary => Complex64::new(0.0, 1.0),
            Var(v) => match v {
                self::Var::R => Complex64::new(r, 0.0),
                self::Var::Theta => Complex64::new(theta, 0.0),
                self::Var::X => Complex64::new(r * theta.cos(), 0.0),
                self::Var::Y => Complex64::new(r * theta.sin(), 0.0),
            },
            Neg(a) => -a.eval_inner(r, theta)?,
            Add(a, b) => a.eval_inner(r, theta)? + b.eval_inner(r, theta)?,
            Sub(a, b) => a.eval_inner(r, theta)? - b.eval_inner(r, theta)?,
            Mul(a, b) => a.eval_inner(r, theta)? * b.eval_inner(r, theta)?,
            Div(a, b) => {
                let den = b.eval_inner(r, theta)?;
                if den.norm() < DIV_EPS {
                    return Err(Error::Eval {
                        message: format!("division by near-zero value {den}"),
                        r,
                        theta,
                    });
                }
                a.eval_inner(r, theta)? / den
            }
            PowInt(a, n) => a.eval_inner(r, theta)?.powi(*n),
            PowRational(a, num, den) => {
                let base = a.eval_inner(r, theta)?;
                if base.norm() < DIV_EPS && *num < 0 {
                    return Err(Error::Eval {
                        message: "negative rational power of near-zero value".into(),
                        r,
                        theta,
                    });
                }
                base.powf(f64::from(*num) / f64::from(*den))
            }
            Func(f, a) => {
                let v = a.eval_inner(r, theta)?;
                match f {
                    self::Func::Sin => v.sin(),
                    self::Func::Cos => v.cos(),
                    self::Func::Exp => v.exp(),
                    self::Func::Sqrt => v.sqrt(),
                    self::Func::Abs => Complex64::new(v.norm(), 0.0),
                }
            }
        })
    }

    /// Fully parenthesized form that re-parses to a structurally identical
    /// tree.
    pub fn pretty(&self) -> String {
        use ExprAst::*;
        match self {
            Const(v) => {
                if v.im == 0.0 {
                    format!("{}", v.re)
                } else {
                    format!("({}+{}*i)", v.re, v.im)
                }
            }
            Imaginary => "i".into(),
            Var(v) => v.name().into(),
            Neg(a) => format!("(-({}))", a.pretty()),
            Add(a, b) => format!("({}+{})", a.pretty(), b.pretty()),
            Sub(a, b) => format!("({}-{})", a.pretty(), b.pretty()),
            Mul(a, b) => format!("({}*{})", a.pretty(), b.pretty()),
            Div(a, b) => format!("({}/{})", a.pretty(), b.pretty()),
            PowInt(a, n) => format!("({})^{}", a.pretty(), n),
            PowRational(a, p, q) => format!("({})^({}/{})", a.pretty(), p, q),
            Func(f, a) => format!("{}({})", f.name(), a.pretty()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    /// 1-based byte offset of the first byte of the token.
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        let offset = i + 1;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                tokens.push(Token { tok: Tok::Plus, offset });
                i += 1;
            }
            b'-' => {
                tokens.push(Token { tok: Tok::Minus, offset });
                i += 1;
            }
            b'*' => {
                tokens.push(Token { tok: Tok::Star, offset });
                i += 1;
            }
            b'/' => {
                tokens.push(Token { tok: Tok::Slash, offset });
                i += 1;
            }
            b'^' => {
                tokens.push(Token { tok: Tok::Caret, offset });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { tok: Tok::LParen, offset });
                i += 1;
            }
            b')' => {
                tokens.push(Token { tok: Tok::RParen, offset });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // optional exponent part
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice.parse().map_err(|_| Error::Parse {
                    offset,
                    message: format!("invalid number literal '{slice}'"),
                })?;
                tokens.push(Token { tok: Tok::Number(value), offset });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset,
                });
            }
            _ => {
                return Err(Error::Parse {
                    offset,
                    message: format!("unexpected character '{}'", text[i..].chars().next().unwrap()),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
    allow_rational_pow: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.offset)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst> {
        let negated = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut node = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            node = self.exponent(node)?;
        }
        Ok(if negated {
            ExprAst::Neg(Box::new(node))
        } else {
            node
        })
    }

    fn signed_int(&mut self) -> Result<i32> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Number(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                let n = v as i32;
                Ok(if neg { -n } else { n })
            }
            _ => Err(Error::Parse {
                offset,
                message: "expected integer exponent".into(),
            }),
        }
    }

    fn exponent(&mut self, base: ExprAst) -> Result<ExprAst> {
        // '^' already consumed; accept INT, -INT, or (p/q) when allowed
        if self.peek() == Some(&Tok::LParen) {
            let paren_offset = self.offset();
            self.pos += 1;
            let num = self.signed_int()?;
            if self.peek() == Some(&Tok::Slash) {
                if !self.allow_rational_pow {
                    return Err(Error::Parse {
                        offset: self.offset(),
                        message: "rational exponents are only allowed in boundary-radius \
                                  expressions"
                            .into(),
                    });
                }
                self.pos += 1;
                let den_offset = self.offset();
                let den = self.signed_int()?;
                if den <= 0 {
                    return Err(Error::Parse {
                        offset: den_offset,
                        message: "exponent denominator must be positive".into(),
                    });
                }
                self.expect(Tok::RParen, "')' after rational exponent")?;
                return Ok(ExprAst::PowRational(Box::new(base), num, den as u32));
            }
            self.expect(Tok::RParen, "')' after exponent")?;
            let _ = paren_offset;
            return Ok(ExprAst::PowInt(Box::new(base), num));
        }
        let n = self.signed_int()?;
        Ok(ExprAst::PowInt(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<ExprAst> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Number(v)) => Ok(ExprAst::Const(Complex64::new(v, 0.0))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(ExprAst::Imaginary),
                "r" => Ok(ExprAst::Var(Var::R)),
                "theta" => Ok(ExprAst::Var(Var::Theta)),
                "x" => Ok(ExprAst::Var(Var::X)),
                "y" => Ok(ExprAst::Var(Var::Y)),
                "sin" | "cos" | "exp" | "sqrt" | "abs" => {
                    let func = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "exp" => Func::Exp,
                        "sqrt" => Func::Sqrt,
                        _ => Func::Abs,
                    };
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(ExprAst::Func(func, Box::new(arg)))
                }
                _ => Err(Error::Parse {
                    offset,
                    message: format!("unknown identifier '{name}'"),
                }),
            },
            Some(_) => Err(Error::Parse {
                offset,
                message: "expected number, variable, function or '('".into(),
            }),
            None => Err(Error::Parse {
                offset,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

fn parse_with_options(text: &str, allow_rational_pow: bool) -> Result<ExprAst> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(Error::Config(format!(
            "expression longer than {MAX_INPUT_BYTES} bytes"
        )));
    }
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            offset: 1,
            message: "empty input".into(),
        });
    }
    let end_offset = text.len() + 1;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_offset,
        allow_rational_pow,
    };
    let ast = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse {
            offset: parser.offset(),
            message: "trailing input after expression".into(),
        });
    }
    Ok(ast)
}

/// Parse a refractive-index expression over `r`, `theta`, `x`, `y`.
pub fn parse_expression(text: &str) -> Result<ExprAst> {
    parse_with_options(text, false)
}

/// Parse a polar boundary-radius expression `rho(theta)`; this variant also
/// accepts rational `^(p/q)` exponents.
pub fn parse_boundary_expression(text: &str) -> Result<ExprAst> {
    parse_with_options(text, true)
}
