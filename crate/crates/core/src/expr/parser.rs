//! Recursive-descent parser.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | constant | variable | call | "(" expr ")" ;
//! call    = function "(" expr { "," expr } ")" ;
//! ```

use std::fmt;

use thiserror::Error;

use super::lexer::{tokenize, Spanned, Token};
use super::{BinOp, Constant, Expr, Func, Var, VarSet};

/// 1-based source location.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Position, message: String },
    #[error("unknown variable '{name}' at {pos} (allowed: {allowed})")]
    UnknownVariable {
        name: String,
        pos: Position,
        allowed: String,
    },
    #[error("unknown function '{name}' at {pos}")]
    UnknownFunction { name: String, pos: Position },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownVariable { pos, .. }
            | ParseError::UnknownFunction { pos, .. } => *pos,
        }
    }
}

/// Parses `source`, rejecting any variable outside `allowed`.
pub fn parse(source: &str, allowed: VarSet) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        allowed,
    };
    let e = p.expr()?;
    match p.peek() {
        Token::Eof => Ok(e),
        other => Err(p.error(format!(
            "expected operator or end of input, found {}",
            other.describe()
        ))),
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    idx: usize,
    allowed: VarSet,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx].token
    }

    fn pos(&self) -> Position {
        self.tokens[self.idx].pos
    }

    fn advance(&mut self) -> Spanned {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            message,
        }
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Token::Minus {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Token::Caret {
            self.advance();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Spanned { token, pos } = self.advance();
        match token {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Token::Ident(name) if *self.peek() == Token::LParen => {
                let func =
                    Func::from_name(&name).ok_or(ParseError::UnknownFunction { name, pos })?;
                self.advance();
                let mut args = vec![self.expr()?];
                while *self.peek() == Token::Comma {
                    self.advance();
                    args.push(self.expr()?);
                }
                self.expect(Token::RParen)?;
                if args.len() != func.arity() {
                    return Err(ParseError::Syntax {
                        pos,
                        message: format!(
                            "{}() takes {} argument(s), got {}",
                            func.name(),
                            func.arity(),
                            args.len()
                        ),
                    });
                }
                Ok(Expr::Call { func, args })
            }
            Token::Ident(name) => match name.as_str() {
                "pi" => Ok(Expr::Const(Constant::Pi)),
                "e" => Ok(Expr::Const(Constant::E)),
                _ => match Var::from_name(&name) {
                    Some(v) if self.allowed.contains(v) => Ok(Expr::Var(v)),
                    _ => Err(ParseError::UnknownVariable {
                        name,
                        pos,
                        allowed: self.allowed.names().join(", "),
                    }),
                },
            },
            other => Err(ParseError::Syntax {
                pos,
                message: format!("expected expression, found {}", other.describe()),
            }),
        }
    }
}
