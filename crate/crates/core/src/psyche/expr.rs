//! Arithmetic over named feature-vector fields, used by item equations.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | primary
//! primary := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Functions: `min(a, b)`, `max(a, b)`, `abs(a)`.

use std::fmt;

use thiserror::Error;

use crate::kinematics::{FeatureVector, EPS_ALPHA};

/// Denominators smaller than this in magnitude are replaced by it.
pub const DIVISION_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("unexpected character `{ch}` at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected `{found}` at offset {pos}")]
    UnexpectedToken { found: String, pos: usize },
    #[error("unknown feature `{0}`")]
    UnknownVariable(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("invalid number `{0}`")]
    BadNumber(String),
}

/// A feature-vector field visible to expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature {
    Speed,
    /// Mean angular variation, floored at [`EPS_ALPHA`].
    Alpha,
    X,
    Y,
    Isolation,
    Socialization,
    Collectivity,
    PathLength,
    NetDisplacement,
    SpeedStd,
    HeadingStd,
    MeanDistance,
    MeanNeighbors,
}

impl Feature {
    pub const ALL: [Feature; 13] = [
        Feature::Speed,
        Feature::Alpha,
        Feature::X,
        Feature::Y,
        Feature::Isolation,
        Feature::Socialization,
        Feature::Collectivity,
        Feature::PathLength,
        Feature::NetDisplacement,
        Feature::SpeedStd,
        Feature::HeadingStd,
        Feature::MeanDistance,
        Feature::MeanNeighbors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Speed => "s",
            Feature::Alpha => "alpha",
            Feature::X => "x",
            Feature::Y => "y",
            Feature::Isolation => "iso",
            Feature::Socialization => "soc",
            Feature::Collectivity => "col",
            Feature::PathLength => "path_length",
            Feature::NetDisplacement => "net_displacement",
            Feature::SpeedStd => "speed_std",
            Feature::HeadingStd => "heading_std",
            Feature::MeanDistance => "mean_distance",
            Feature::MeanNeighbors => "mean_neighbors",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn value(self, v: &FeatureVector) -> f64 {
        match self {
            Feature::Speed => v.mean_speed,
            Feature::Alpha => v.mean_angular_variation.max(EPS_ALPHA),
            Feature::X => v.mean_position.x,
            Feature::Y => v.mean_position.y,
            Feature::Isolation => v.isolation,
            Feature::Socialization => v.socialization,
            Feature::Collectivity => v.collectivity,
            Feature::PathLength => v.path_length,
            Feature::NetDisplacement => v.net_displacement,
            Feature::SpeedStd => v.speed_std,
            Feature::HeadingStd => v.heading_std,
            Feature::MeanDistance => v.mean_distance,
            Feature::MeanNeighbors => v.mean_neighbors,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Min,
    Max,
    Abs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Feature),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.tokens.get(p.pos) {
            None => Ok(e),
            Some((t, pos)) => Err(ExprError::UnexpectedToken {
                found: t.to_string(),
                pos: *pos,
            }),
        }
    }

    /// Division by (near) zero uses [`DIVISION_FLOOR`] with the sign of the
    /// denominator, so evaluation never produces an infinity from a pole.
    pub fn eval(&self, v: &FeatureVector) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(f) => f.value(v),
            Expr::Neg(e) => -e.eval(v),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(v), b.eval(v));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        let d = if b.abs() < DIVISION_FLOOR {
                            DIVISION_FLOOR.copysign(b)
                        } else {
                            b
                        };
                        a / d
                    }
                }
            }
            Expr::Call(f, args) => {
                let vals: Vec<f64> = args.iter().map(|a| a.eval(v)).collect();
                match f {
                    Func::Min => vals[0].min(vals[1]),
                    Func::Max => vals[0].max(vals[1]),
                    Func::Abs => vals[0].abs(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(n) => write!(f, "{n}"),
            Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
            Token::Comma => f.write_str(","),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        match c {
            c if c.is_whitespace() => k += 1,
            '+' | '*' | '/' => {
                out.push((Token::Op(c), pos));
                k += 1;
            }
            '-' | '\u{2212}' => {
                out.push((Token::Op('-'), pos));
                k += 1;
            }
            '\u{00d7}' => {
                out.push((Token::Op('*'), pos));
                k += 1;
            }
            '(' => {
                out.push((Token::LParen, pos));
                k += 1;
            }
            ')' => {
                out.push((Token::RParen, pos));
                k += 1;
            }
            ',' => {
                out.push((Token::Comma, pos));
                k += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = k;
                while k < chars.len() && (chars[k].1.is_ascii_digit() || chars[k].1 == '.') {
                    k += 1;
                }
                // exponent
                if k < chars.len() && matches!(chars[k].1, 'e' | 'E') {
                    let mut j = k + 1;
                    if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].1.is_ascii_digit() {
                        k = j;
                        while k < chars.len() && chars[k].1.is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let text: String = chars[start..k].iter().map(|(_, c)| c).collect();
                let n = text.parse::<f64>().map_err(|_| ExprError::BadNumber(text.clone()))?;
                out.push((Token::Num(n), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = k;
                while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                    k += 1;
                }
                out.push((Token::Ident(chars[start..k].iter().map(|(_, c)| c).collect()), pos));
            }
            ch => return Err(ExprError::UnexpectedChar { ch, pos }),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Result<(Token, usize), ExprError> {
        let t = self.tokens.get(self.pos).cloned().ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Token) -> Result<(), ExprError> {
        let (t, pos) = self.next()?;
        if t == want {
            Ok(())
        } else {
            Err(ExprError::UnexpectedToken {
                found: t.to_string(),
                pos,
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Num(n) => Ok(Expr::Const(n)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Token::Ident(name) if self.peek() == Some(&Token::LParen) => {
                self.pos += 1;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(&Token::Comma) {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(Token::RParen)?;
                let (func, arity) = match name.as_str() {
                    "min" => (Func::Min, 2),
                    "max" => (Func::Max, 2),
                    "abs" => (Func::Abs, 1),
                    _ => return Err(ExprError::UnknownFunction(name)),
                };
                if args.len() != arity {
                    return Err(ExprError::Arity {
                        name,
                        expected: arity,
                        got: args.len(),
                    });
                }
                Ok(Expr::Call(func, args))
            }
            Token::Ident(name) => Feature::from_name(&name)
                .map(Expr::Var)
                .ok_or(ExprError::UnknownVariable(name)),
            other => Err(ExprError::UnexpectedToken {
                found: other.to_string(),
                pos,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn features() -> FeatureVector {
        FeatureVector {
            pedestrian_id: 0,
            mean_position: Point::new(1.0, 2.0),
            mean_speed: 0.05,
            mean_angular_variation: 10.0,
            isolation: 0.2,
            socialization: 0.8,
            collectivity: 0.6,
            path_length: 4.0,
            net_displacement: 3.0,
            speed_std: 0.01,
            heading_std: 5.0,
            mean_distance: 1.5,
            mean_neighbors: 2.0,
        }
    }

    fn eval(src: &str) -> f64 {
        Expr::parse(src).unwrap().eval(&features())
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3"), 7.0);
        assert_eq!(eval("(1 + 2) * 3"), 9.0);
        assert_eq!(eval("8 / 4 / 2"), 1.0);
        assert_eq!(eval("10 - 4 - 3"), 3.0);
        assert_eq!(eval("-2 * -3"), 6.0);
        assert_eq!(eval("2 \u{00d7} 3 \u{2212} 1"), 5.0);
        assert_eq!(eval("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn variables_and_functions() {
        assert!((eval("s + 1 / alpha") - 0.15).abs() < 1e-15);
        assert_eq!(eval("soc"), 0.8);
        assert_eq!(eval("max(path_length, net_displacement)"), 4.0);
        assert_eq!(eval("min(x, y)"), 1.0);
        assert_eq!(eval("abs(0 - mean_neighbors)"), 2.0);
    }

    #[test]
    fn alpha_is_floored() {
        let mut v = features();
        v.mean_angular_variation = 0.0;
        let q1 = Expr::parse("s + 1/alpha").unwrap().eval(&v);
        assert!((q1 - 10.05).abs() < 1e-12);
    }

    #[test]
    fn division_by_zero_is_finite() {
        assert!(eval("1 / (x - 1)").is_finite());
    }

    #[test]
    fn errors() {
        assert_eq!(Expr::parse("speed"), Err(ExprError::UnknownVariable("speed".into())));
        assert_eq!(Expr::parse("log(s)"), Err(ExprError::UnknownFunction("log".into())));
        assert!(matches!(Expr::parse("max(s)"), Err(ExprError::Arity { .. })));
        assert_eq!(Expr::parse("1 +"), Err(ExprError::UnexpectedEnd));
        assert!(matches!(Expr::parse("(1"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(Expr::parse("1 2"), Err(ExprError::UnexpectedToken { .. })));
        assert!(matches!(Expr::parse("s $ 2"), Err(ExprError::UnexpectedChar { ch: '$', .. })));
        assert!(matches!(Expr::parse("1..2"), Err(ExprError::BadNumber(_))));
    }

    #[test]
    fn every_feature_name_resolves() {
        for f in Feature::ALL {
            assert_eq!(Expr::parse(f.name()).unwrap(), Expr::Var(f));
        }
    }
}
