use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::eval::PointState;
use super::poly::{Monomial, Poly};
use super::symbol::{KernelConfig, Symbol};
use super::SymbolicError;

/// Quotient of two polynomials in the derivative-jet alphabet.
///
/// Normal form: integer coefficients with unit content, no common monomial
/// factor, denominator with positive leading coefficient, zero as `0/1`.
/// Non-monomial common factors may remain; equality is decided by
/// cross-multiplication so they are harmless.
#[derive(Clone, Debug)]
pub struct RationalExpr {
    num: Poly,
    den: Poly,
}

impl RationalExpr {
    pub fn new(num: Poly, den: Poly) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::normalized(p, Poly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::from_poly(Poly::symbol(s))
    }

    pub fn zero() -> Self {
        RationalExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let common = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if common.is_one() {
            (num, den)
        } else {
            (
                num.div_monomial(&common).expect("content divides"),
                den.div_monomial(&common).expect("content divides"),
            )
        };
        let lcm = num_integer::lcm(num.denominator_lcm(), den.denominator_lcm());
        if !lcm.is_one() {
            let s = BigRational::from_integer(lcm);
            num = num.scale(&s);
            den = den.scale(&s);
        }
        let g = num_integer::gcd(num.numerator_gcd(), den.numerator_gcd());
        let mut factor = BigRational::new(BigInt::one(), g);
        if den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            factor = -factor;
        }
        if !factor.is_one() {
            num = num.scale(&factor);
            den = den.scale(&factor);
        }
        RationalExpr { num, den }
    }

    /// Sound and complete equality: `a.num * b.den - b.num * a.den == 0`.
    pub fn equals(&self, other: &RationalExpr) -> bool {
        self.num.mul(&other.den).sub(&other.num.mul(&self.den)).is_zero()
    }

    pub fn recip(&self) -> Result<Self, SymbolicError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &RationalExpr) -> Result<Self, SymbolicError> {
        if other.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(Self::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn powi(&self, e: i32) -> Result<Self, SymbolicError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Self::normalized(base.num.pow(k), base.den.pow(k)))
    }

    /// Total derivative `d/dt`, each symbol advancing one derivative order.
    pub fn differentiate_t(&self, cfg: &KernelConfig) -> Result<Self, SymbolicError> {
        let dn = total_derivative(&self.num, cfg)?;
        let dd = total_derivative(&self.den, cfg)?;
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Ok(Self::normalized(num, self.den.mul(&self.den)))
    }

    /// Partial derivative with respect to one symbol.
    pub fn partial(&self, s: Symbol) -> Self {
        let v = s.var();
        let num = self
            .num
            .partial(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(v)));
        Self::normalized(num, self.den.mul(&self.den))
    }

    /// Replaces symbols by expressions; symbols mapped to `None` are kept.
    pub fn substitute(
        &self,
        map: &dyn Fn(Symbol) -> Option<RationalExpr>,
    ) -> Result<RationalExpr, SymbolicError> {
        let lookup = |v: u16| {
            let s = Symbol::from_var(v);
            Some(map(s).unwrap_or_else(|| RationalExpr::symbol(s)))
        };
        let n = self
            .num
            .eval_with(lookup, |c| RationalExpr::constant(c.clone()))
            .expect("lookup is total");
        let d = self
            .den
            .eval_with(lookup, |c| RationalExpr::constant(c.clone()))
            .expect("lookup is total");
        n.checked_div(&d)
    }

    /// Highest derivative order appearing, if any symbol appears.
    pub fn max_order(&self) -> Option<u8> {
        let v = self.num.max_var().max(self.den.max_var())?;
        Some(Symbol::from_var(v).order)
    }

    pub fn evaluate_exact(&self, p: &PointState<BigRational>) -> Result<BigRational, SymbolicError> {
        let d = eval_poly(&self.den, p, |c| c.clone())?;
        if d.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        let n = eval_poly(&self.num, p, |c| c.clone())?;
        Ok(n / d)
    }

    /// IEEE double evaluation; coefficients are rounded once to `f64`.
    pub fn evaluate_f64(&self, p: &PointState<f64>) -> Result<f64, SymbolicError> {
        let d = eval_poly(&self.den, p, rational_to_f64)?;
        if d == 0.0 {
            return Err(SymbolicError::DivisionByZero);
        }
        let n = eval_poly(&self.num, p, rational_to_f64)?;
        Ok(n / d)
    }
}

fn eval_poly<T>(
    poly: &Poly,
    p: &PointState<T>,
    from_coeff: impl Fn(&BigRational) -> T,
) -> Result<T, SymbolicError>
where
    T: Clone + Zero + One + Mul<Output = T> + Add<Output = T>,
{
    let mut missing = None;
    let out = poly.eval_with(
        |v| {
            let s = Symbol::from_var(v);
            let x = p.value(s).cloned();
            if x.is_none() {
                missing = Some(s);
            }
            x
        },
        from_coeff,
    );
    match (out, missing) {
        (Some(x), _) => Ok(x),
        (None, Some(s)) => Err(SymbolicError::MissingSymbol(s)),
        (None, None) => unreachable!("lookup failure always records the symbol"),
    }
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

fn total_derivative(p: &Poly, cfg: &KernelConfig) -> Result<Poly, SymbolicError> {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        for &(v, e) in m.factors() {
            let s = Symbol::from_var(v);
            if s.order >= cfg.max_order {
                return Err(SymbolicError::OrderOverflow {
                    symbol: s.to_string(),
                    max: cfg.max_order,
                });
            }
            let ds = s.derivative();
            let reduced = m.div(&Monomial::var(v)).expect("factor present");
            let term = Poly::term(
                c * BigRational::from_integer(BigInt::from(e)),
                reduced.mul(&Monomial::var(ds.var())),
            );
            out = out.add(&term);
        }
    }
    Ok(out)
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl Add for &RationalExpr {
    type Output = RationalExpr;
    fn add(self, rhs: &RationalExpr) -> RationalExpr {
        if self.den == rhs.den {
            return RationalExpr::normalized(self.num.add(&rhs.num), self.den.clone());
        }
        RationalExpr::normalized(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &RationalExpr {
    type Output = RationalExpr;
    fn sub(self, rhs: &RationalExpr) -> RationalExpr {
        self + &(-rhs)
    }
}

impl Mul for &RationalExpr {
    type Output = RationalExpr;
    fn mul(self, rhs: &RationalExpr) -> RationalExpr {
        if self.is_zero() || rhs.is_zero() {
            return RationalExpr::zero();
        }
        RationalExpr::normalized(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

/// Panics on division by the zero expression; use [`RationalExpr::checked_div`]
/// when the divisor is not known to be nonzero.
impl Div for &RationalExpr {
    type Output = RationalExpr;
    fn div(self, rhs: &RationalExpr) -> RationalExpr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

impl Zero for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalExpr {
    fn one() -> Self {
        RationalExpr::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::symbol::Base;

    fn s(b: Base) -> RationalExpr {
        RationalExpr::symbol(Symbol::plain(b))
    }

    #[test]
    fn zero_is_unique() {
        let a = &s(Base::U1) / &s(Base::U2);
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "(0)/(1)");
    }

    #[test]
    fn monomial_factor_cancels() {
        let e = &(&s(Base::U1) * &s(Base::V1)) / &s(Base::V1);
        assert_eq!(e.to_string(), "(u1)/(1)");
    }

    #[test]
    fn denominator_sign_is_positive() {
        let e = &s(Base::U1) / &(-&s(Base::U2));
        assert_eq!(e.to_string(), "(-u1)/(u2)");
    }

    #[test]
    fn cross_multiplication_equality() {
        let a = &s(Base::U1) / &s(Base::U2);
        let sum = &s(Base::U2) + &s(Base::V3);
        let b = &(&s(Base::U1) * &sum) / &(&s(Base::U2) * &sum);
        assert!(a.equals(&b));
        assert!(!s(Base::U1).equals(&RationalExpr::symbol(Symbol::new(Base::U1, 1))));
    }

    #[test]
    fn quotient_rule() {
        let cfg = KernelConfig::default();
        let e = &s(Base::U1) / &s(Base::U2);
        let d = e.differentiate_t(&cfg).unwrap();
        let u1p = RationalExpr::symbol(Symbol::new(Base::U1, 1));
        let u2p = RationalExpr::symbol(Symbol::new(Base::U2, 1));
        let expected = &(&u1p / &s(Base::U2))
            - &(&(&s(Base::U1) * &u2p) / &s(Base::U2).powi(2).unwrap());
        assert!(d.equals(&expected));
        assert!(RationalExpr::int(7).differentiate_t(&cfg).unwrap().is_zero());
    }

    #[test]
    fn order_overflow_is_reported() {
        let cfg = KernelConfig::with_max_order(1);
        let e = RationalExpr::symbol(Symbol::new(Base::V2, 1));
        assert!(matches!(
            e.differentiate_t(&cfg),
            Err(SymbolicError::OrderOverflow { .. })
        ));
    }
}
