use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("variable '{}' is not bound", .0.name())]
    UnboundVariable(Var),
    #[error("{reason} in '{expr}'")]
    Domain { expr: String, reason: String },
}

/// Values for the free variables `t`, `s`, `u`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Bindings {
    t: Option<f64>,
    s: Option<f64>,
    u: Option<f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn t(mut self, v: f64) -> Self {
        self.t = Some(v);
        self
    }

    pub fn s(mut self, v: f64) -> Self {
        self.s = Some(v);
        self
    }

    pub fn u(mut self, v: f64) -> Self {
        self.u = Some(v);
        self
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        match var {
            Var::T => self.t,
            Var::S => self.s,
            Var::U => self.u,
        }
    }

    /// Builds bindings from `(name, value)` pairs; unknown names are ignored.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        pairs
            .into_iter()
            .fold(Self::new(), |b, (name, v)| match Var::from_name(name) {
                Some(Var::T) => b.t(v),
                Some(Var::S) => b.s(v),
                Some(Var::U) => b.u(v),
                None => b,
            })
    }
}

fn domain(e: &Expr, reason: impl Into<String>) -> EvalError {
    EvalError::Domain {
        expr: e.to_string(),
        reason: reason.into(),
    }
}

fn finite(e: &Expr, v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(e, "non-finite result"))
    }
}

impl Expr {
    /// Evaluates in double precision. Division by zero, `log`/`sqrt` outside
    /// their domain and any non-finite intermediate are errors, never NaN.
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Const(c) => Ok(c.value()),
            Expr::Var(v) => b.get(*v).ok_or(EvalError::UnboundVariable(*v)),
            Expr::Neg(e) => Ok(-e.eval(b)?),
            Expr::Binary { op, lhs, rhs } => {
                let x = lhs.eval(b)?;
                let y = rhs.eval(b)?;
                let v = match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => x.powf(y),
                };
                finite(self, v)
            }
            Expr::Call { func, args } => {
                let x = args[0].eval(b)?;
                let v = match func {
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(domain(self, "log of non-positive value"));
                        }
                        x.ln()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(self, "sqrt of negative value"));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                    Func::Pow => x.powf(args[1].eval(b)?),
                };
                finite(self, v)
            }
        }
    }
}
