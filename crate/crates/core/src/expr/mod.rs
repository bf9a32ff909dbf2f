//! A small expression language over `z`, `r = |z|` and the cylinder
//! parameter `t`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? INT)*
//! atom   := NUMBER | NUMBER 'i' | 'i' | 'z' | 'r' | 't'
//!         | FUNC '(' expr ')' | '(' expr ')'
//! FUNC   := exp | sqrt | abs | conj | re | im | arg
//! ```
//!
//! `sqrt` is the principal branch and `arg` takes values in `(-π, π]`.
//! Evaluation never takes limits: `0/0` is an error, and callers supply
//! explicit values at removable singularities.

mod parser;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub use parser::{parse, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// The complex coordinate.
    Z,
    /// `|z|`.
    R,
    /// Cylinder parameter.
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sqrt,
    Abs,
    Conj,
    Re,
    Im,
    Arg,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Conj => "conj",
            Func::Re => "re",
            Func::Im => "im",
            Func::Arg => "arg",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "conj" => Func::Conj,
            "re" => Func::Re,
            "im" => Func::Im,
            "arg" => Func::Arg,
            _ => return None,
        })
    }

    pub fn apply(self, v: Complex64) -> Complex64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => Complex64::new(v.norm(), 0.0),
            Func::Conj => v.conj(),
            Func::Re => Complex64::new(v.re, 0.0),
            Func::Im => Complex64::new(v.im, 0.0),
            Func::Arg => {
                let a = v.arg();
                Complex64::new(if a == -PI { PI } else { a }, 0.0)
            }
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

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("division by zero at z = {z}, t = {t}")]
    DivisionByZero { z: Complex64, t: f64 },
    #[error("non-finite result at z = {z}, t = {t}")]
    NonFinite { z: Complex64, t: f64 },
}

impl Expr {
    pub fn constant(v: Complex64) -> Self {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.mentions(var),
            Expr::Binary(_, a, b) => a.mentions(var) || b.mentions(var),
        }
    }

    /// Evaluates at `z` with `r = |z|`.
    pub fn eval(&self, z: Complex64, t: f64) -> Result<Complex64, EvalError> {
        self.eval_with_radius(z, z.norm(), t)
    }

    /// Evaluates with an independent value for `r`. On the cone spectrum `r`
    /// is replaced by the height `t` of the point `(w, t)`.
    pub fn eval_with_radius(&self, z: Complex64, r: f64, t: f64) -> Result<Complex64, EvalError> {
        let v = self.eval_inner(z, r, t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { z, t })
        }
    }

    fn eval_inner(&self, z: Complex64, r: f64, t: f64) -> Result<Complex64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::Z) => z,
            Expr::Var(Var::R) => Complex64::new(r, 0.0),
            Expr::Var(Var::T) => Complex64::new(t, 0.0),
            Expr::Neg(e) => -e.eval_inner(z, r, t)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_inner(z, r, t)?;
                let b = b.eval_inner(z, r, t)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(EvalError::DivisionByZero { z, t });
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(base, n) => {
                let b = base.eval_inner(z, r, t)?;
                if *n < 0 && b == Complex64::new(0.0, 0.0) {
                    return Err(EvalError::DivisionByZero { z, t });
                }
                b.powi(*n)
            }
            Expr::Call(f, arg) => f.apply(arg.eval_inner(z, r, t)?),
        })
    }

    /// True when `z` only enters through `+ - *`, non-negative integer
    /// powers, `exp`, and divisions by `z`-free denominators. For such
    /// expressions every slice `w ↦ e(w, r := t, t)` is an entire function
    /// of `w`, so substituting the height for `r` gives the holomorphic
    /// extension of each circle restriction.
    pub fn is_slice_holomorphic(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Neg(e) => e.is_slice_holomorphic(),
            Expr::Binary(BinOp::Div, a, b) => a.is_slice_holomorphic() && !b.mentions(Var::Z),
            Expr::Binary(_, a, b) => a.is_slice_holomorphic() && b.is_slice_holomorphic(),
            Expr::Pow(e, n) => {
                if e.mentions(Var::Z) {
                    *n >= 0 && e.is_slice_holomorphic()
                } else {
                    true
                }
            }
            Expr::Call(Func::Exp, e) => e.is_slice_holomorphic(),
            Expr::Call(_, e) => !e.mentions(Var::Z),
        }
    }
}

fn fmt_real(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // Debug formatting of f64 is the shortest round-trip representation.
    write!(f, "{v:?}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.im == 0.0 {
                    fmt_real(c.re, f)
                } else if c.re == 0.0 {
                    fmt_real(c.im, f)?;
                    write!(f, "i")
                } else {
                    write!(f, "(")?;
                    fmt_real(c.re, f)?;
                    write!(f, " + ")?;
                    fmt_real(c.im, f)?;
                    write!(f, "i)")
                }
            }
            Expr::Var(Var::Z) => write!(f, "z"),
            Expr::Var(Var::R) => write!(f, "r"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(e, n) => write!(f, "({e}^{n})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}
