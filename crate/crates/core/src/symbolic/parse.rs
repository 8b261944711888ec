//! Recursive-descent parser for the expression surface grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := number | symbol | '(' expr ')'
//! symbol := ('u' | 'v') ('1' | '2' | '3') '\''*
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::rational::RationalExpr;
use super::symbol::{Base, KernelConfig, Symbol};
use super::SymbolicError;

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Const(BigRational),
    Sym(Symbol),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i32),
    Neg(Box<ExprAst>),
}

impl ExprAst {
    pub fn sym(s: Symbol) -> Self {
        ExprAst::Sym(s)
    }

    pub fn int(n: i64) -> Self {
        ExprAst::Const(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn canonicalize(&self) -> Result<RationalExpr, SymbolicError> {
        Ok(match self {
            ExprAst::Const(c) => RationalExpr::constant(c.clone()),
            ExprAst::Sym(s) => RationalExpr::symbol(*s),
            ExprAst::Add(a, b) => &a.canonicalize()? + &b.canonicalize()?,
            ExprAst::Sub(a, b) => &a.canonicalize()? - &b.canonicalize()?,
            ExprAst::Mul(a, b) => &a.canonicalize()? * &b.canonicalize()?,
            ExprAst::Div(a, b) => a.canonicalize()?.checked_div(&b.canonicalize()?)?,
            ExprAst::Pow(a, e) => a.canonicalize()?.powi(*e)?,
            ExprAst::Neg(a) => -&a.canonicalize()?,
        })
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(c) if c.is_integer() && !c.is_negative() => write!(f, "{}", c.numer()),
            ExprAst::Const(c) if c.is_integer() => write!(f, "({})", c.numer()),
            ExprAst::Const(c) => write!(f, "({}/{})", c.numer(), c.denom()),
            ExprAst::Sym(s) => write!(f, "{s}"),
            ExprAst::Add(a, b) => write!(f, "({a} + {b})"),
            ExprAst::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprAst::Mul(a, b) => write!(f, "({a} * {b})"),
            ExprAst::Div(a, b) => write!(f, "({a} / {b})"),
            ExprAst::Pow(a, e) => write!(f, "({a})^{e}"),
            ExprAst::Neg(a) => write!(f, "(-{a})"),
        }
    }
}

pub fn parse(text: &str) -> Result<ExprAst, SymbolicError> {
    parse_with(text, &KernelConfig::default())
}

pub fn parse_with(text: &str, cfg: &KernelConfig) -> Result<ExprAst, SymbolicError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        cfg,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// `parse` followed by `canonicalize`.
pub fn parse_expr(text: &str) -> Result<RationalExpr, SymbolicError> {
    parse(text)?.canonicalize()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cfg: &'a KernelConfig,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> SymbolicError {
        SymbolicError::Syntax {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprAst, SymbolicError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, SymbolicError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = ExprAst::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ExprAst, SymbolicError> {
        if self.eat(b'-') {
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, SymbolicError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let non_integer = self.pos == start
            || matches!(self.src.get(self.pos), Some(b'.') | Some(b'/'))
            || self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic());
        if non_integer {
            return Err(SymbolicError::NonIntegerExponent { offset: at });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let e: i32 = digits
            .parse()
            .map_err(|_| self.syntax("exponent out of range"))?;
        if self.peek() == Some(b'^') {
            return Err(self.syntax("chained '^' is ambiguous; add parentheses"));
        }
        Ok(ExprAst::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<ExprAst, SymbolicError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.symbol(),
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<ExprAst, SymbolicError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let mut value = BigRational::from_integer(int_part.parse::<BigInt>().expect("digits"));
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if fs == self.pos {
                return Err(self.syntax("expected digits after '.'"));
            }
            let frac = std::str::from_utf8(&self.src[fs..self.pos]).expect("ascii digits");
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            value += BigRational::new(frac.parse::<BigInt>().expect("digits"), scale);
        }
        Ok(ExprAst::Const(value))
    }

    fn symbol(&mut self) -> Result<ExprAst, SymbolicError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        let base = Base::from_name(name).ok_or_else(|| SymbolicError::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        })?;
        let mut order = 0u8;
        while self.src.get(self.pos) == Some(&b'\'') {
            order = order.saturating_add(1);
            self.pos += 1;
        }
        if order > self.cfg.max_order {
            return Err(SymbolicError::OrderOverflow {
                symbol: std::str::from_utf8(&self.src[start..self.pos])
                    .expect("ascii")
                    .to_string(),
                max: self.cfg.max_order,
            });
        }
        Ok(ExprAst::Sym(Symbol::new(base, order)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(b: Base, o: u8) -> Box<ExprAst> {
        Box::new(ExprAst::Sym(Symbol::new(b, o)))
    }

    #[test]
    fn product_of_two_symbols() {
        assert_eq!(
            parse("u1*v2").unwrap(),
            ExprAst::Mul(sym(Base::U1, 0), sym(Base::V2, 0))
        );
    }

    #[test]
    fn derivative_suffix() {
        assert_eq!(parse("u1''").unwrap(), ExprAst::Sym(Symbol::new(Base::U1, 2)));
    }

    #[test]
    fn quotient_rule_entry() {
        let ast = parse("u1'/v3 - u1*v3'/v3^2").unwrap();
        let expected = ExprAst::Sub(
            Box::new(ExprAst::Div(sym(Base::U1, 1), sym(Base::V3, 0))),
            Box::new(ExprAst::Div(
                Box::new(ExprAst::Mul(sym(Base::U1, 0), sym(Base::V3, 1))),
                Box::new(ExprAst::Pow(sym(Base::V3, 0), 2)),
            )),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(
            parse("-u1^2").unwrap(),
            ExprAst::Neg(Box::new(ExprAst::Pow(sym(Base::U1, 0), 2)))
        );
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse(" u1 *\tv2 ").unwrap(), parse("u1*v2").unwrap());
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("u1 + + ") {
            Err(SymbolicError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse("u1 * w7") {
            Err(SymbolicError::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "w7");
                assert_eq!(offset, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("u1^1.5"),
            Err(SymbolicError::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse("u1^v1"),
            Err(SymbolicError::NonIntegerExponent { .. })
        ));
        assert!(matches!(parse("(u1"), Err(SymbolicError::Syntax { .. })));
        assert!(matches!(parse("u1'''"), Err(SymbolicError::OrderOverflow { .. })));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(parse_expr("(u1*v1)/(v1)").unwrap().to_string(), "(u1)/(1)");
        assert!(parse_expr("u1/u2 - u1/u2").unwrap().is_zero());
        assert_eq!(
            parse_expr("(u1+v1)^2").unwrap().to_string(),
            "(u1^2 + 2*u1*v1 + v1^2)/(1)"
        );
        assert_eq!(parse_expr("0.25*u2").unwrap().to_string(), "(u2)/(4)");
    }

    #[test]
    fn zero_denominator_detected() {
        assert!(matches!(
            parse_expr("u1/(v1 - v1)"),
            Err(SymbolicError::ZeroDenominator)
        ));
    }
}
