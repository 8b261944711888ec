//! Minimal computer-algebra layer over the jet alphabet `u1..v3` and their
//! `t`-derivatives: parsing, canonical rational forms, differentiation,
//! exact equality and evaluation.

mod compiled;
mod eval;
mod matrix;
mod parse;
mod poly;
mod rational;
mod symbol;

pub use compiled::CompiledExpr;
pub use eval::PointState;
pub use matrix::{CompiledMatrix, ExprMatrix};
pub use parse::{parse, parse_expr, parse_with, ExprAst};
pub use poly::{Monomial, Poly};
pub use rational::RationalExpr;
pub use symbol::{Base, KernelConfig, Symbol, DEFAULT_MAX_ORDER};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("exponent at byte {offset} is not an integer")]
    NonIntegerExponent { offset: usize },
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("derivative of `{symbol}` exceeds the maximum order {max}")]
    OrderOverflow { symbol: String, max: u8 },
    #[error("division by zero at the evaluation point")]
    DivisionByZero,
    #[error("no value for symbol `{0}` at the evaluation point")]
    MissingSymbol(Symbol),
}

/// Plain symbol `u_i` / `v_i` as an expression.
pub fn sym(b: Base) -> RationalExpr {
    RationalExpr::symbol(Symbol::plain(b))
}
