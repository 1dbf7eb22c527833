//! Scalar expression language for problem data.
//!
//! Problem files describe `f(t,u)`, `k(t,s,u)`, `psi(t)` and `phi(t)` as
//! infix expressions. This module parses them into an [`Expr`] tree and
//! evaluates that tree in IEEE-754 double precision. The function catalog is
//! fixed: `exp log sin cos sqrt abs` (one argument) and `pow` (two).
//!
//! ```
//! use frac_core::expr::{parse, Bindings, VarSet};
//!
//! let e = parse("t + u*u", VarSet::TU).unwrap();
//! let v = e.eval(&Bindings::new().t(2.0).u(3.0)).unwrap();
//! assert_eq!(v, 11.0);
//! ```

mod eval;
mod lexer;
mod parser;

use std::fmt;

pub use eval::{Bindings, EvalError};
pub use parser::{parse, ParseError, Position};

/// A free variable of the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    S,
    U,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
            Var::U => "u",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "t" => Some(Var::T),
            "s" => Some(Var::S),
            "u" => Some(Var::U),
            _ => None,
        }
    }
}

/// The set of variables an expression may reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    t: bool,
    s: bool,
    u: bool,
}

impl VarSet {
    pub const NONE: VarSet = VarSet {
        t: false,
        s: false,
        u: false,
    };
    /// `psi(t)`, `phi(t)` and perturbations.
    pub const T: VarSet = VarSet {
        t: true,
        s: false,
        u: false,
    };
    /// Source term `f(t,u)`.
    pub const TU: VarSet = VarSet {
        t: true,
        s: false,
        u: true,
    };
    /// Kernel `k(t,s,u)`.
    pub const TSU: VarSet = VarSet {
        t: true,
        s: true,
        u: true,
    };

    pub fn contains(self, var: Var) -> bool {
        match var {
            Var::T => self.t,
            Var::S => self.s,
            Var::U => self.u,
        }
    }

    pub fn names(self) -> Vec<&'static str> {
        [Var::T, Var::S, Var::U]
            .into_iter()
            .filter(|v| self.contains(*v))
            .map(Var::name)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sqrt,
        Func::Abs,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Expression tree. Literals are always non-negative; a leading minus sign
/// parses to [`Expr::Neg`].
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
    },
}

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// True for the literal `0`, which lets callers skip work for an
    /// identically vanishing kernel.
    pub fn is_literal_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// Whether the tree references `var` anywhere.
    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Neg(e) => e.mentions(var),
            Expr::Binary { lhs, rhs, .. } => lhs.mentions(var) || rhs.mentions(var),
            Expr::Call { args, .. } => args.iter().any(|a| a.mentions(var)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Const(_) | Expr::Call { .. } => PREC_ATOM,
            Expr::Neg(_) => PREC_NEG,
            Expr::Binary { op, .. } => op.precedence(),
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses needed to re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` is the shortest representation that round-trips.
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Const(c) => f.write_str(c.name()),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_wrapped(f, e, e.precedence() < PREC_NEG)
            }
            Expr::Binary {
                op: BinOp::Pow,
                lhs,
                rhs,
            } => {
                // base must be a primary, exponent may be any unary chain
                write_wrapped(f, lhs, lhs.precedence() < PREC_ATOM)?;
                f.write_str("^")?;
                write_wrapped(f, rhs, rhs.precedence() < PREC_NEG)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                write_wrapped(f, lhs, lhs.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_wrapped(f, rhs, rhs.precedence() <= p)
            }
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
