use super::poly::Poly;
use super::rational::{rational_to_f64, RationalExpr};

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Poly) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(m, c)| {
                    let factors = m
                        .factors()
                        .iter()
                        .map(|&(v, e)| (v as usize, e as i32))
                        .collect();
                    (rational_to_f64(c), factors)
                })
                .collect(),
        }
    }

    fn eval(&self, vars: &[f64]) -> Option<f64> {
        let mut acc = 0.0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(v, e) in factors {
                t *= vars.get(v)?.powi(e);
            }
            acc += t;
        }
        Some(acc)
    }

    fn max_var(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(_, f)| f.iter().map(|&(v, _)| v + 1))
            .max()
            .unwrap_or(0)
    }
}

/// A rational expression lowered to `f64` coefficients for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    num: CompiledPoly,
    den: CompiledPoly,
}

impl CompiledExpr {
    pub fn new(e: &RationalExpr) -> Self {
        CompiledExpr {
            num: CompiledPoly::new(e.numerator()),
            den: CompiledPoly::new(e.denominator()),
        }
    }

    /// Number of flat variables (see `Symbol::var`) the expression reads.
    pub fn arity(&self) -> usize {
        self.num.max_var().max(self.den.max_var())
    }

    /// Evaluates against flat variables; `None` if a variable is missing.
    pub fn eval(&self, vars: &[f64]) -> Option<f64> {
        Some(self.num.eval(vars)? / self.den.eval(vars)?)
    }
}
