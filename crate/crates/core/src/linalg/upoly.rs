use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Univariate polynomial over Q, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<BigRational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Newton divided-difference interpolation through `(xs[i], ys[i])`.
    pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        // expand the Newton form from the innermost coefficient outwards
        let mut acc = UPoly::zero();
        for i in (0..n).rev() {
            acc = acc.mul_linear(&xs[i]);
            acc = acc.add_constant(&dd[i]);
        }
        acc
    }

    fn mul_linear(&self, root: &BigRational) -> Self {
        // (x - root) * self
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= c * root;
        }
        UPoly::new(out)
    }

    fn add_constant(&self, c: &BigRational) -> Self {
        let mut out = self.coeffs.clone();
        if out.is_empty() {
            out.push(BigRational::zero());
        }
        out[0] += c;
        UPoly::new(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => UPoly::zero(),
            Some(lead) => UPoly::new(self.coeffs.iter().map(|c| c / lead).collect()),
        }
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dl = d.coeffs.last().expect("division by zero polynomial");
        let dn = d.coeffs.len();
        let mut r = self.coeffs.clone();
        if r.len() < dn {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = &r[k + dn - 1] / dl;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        r.truncate(dn - 1);
        (UPoly::new(q), UPoly::new(r))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors.
    pub fn square_free(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Complex roots with multiplicity one each (square-free part).
    pub fn roots(&self) -> Vec<Complex64> {
        let sf = self.square_free();
        let c: Vec<f64> = sf.coeffs.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        match c.len() {
            0 | 1 => Vec::new(),
            2 => vec![Complex64::new(-c[0] / c[1], 0.0)],
            3 => quadratic_roots(c[2], c[1], c[0]),
            n => {
                let deg = n - 1;
                let lead = c[deg];
                let mut comp = nalgebra::DMatrix::<f64>::zeros(deg, deg);
                for i in 1..deg {
                    comp[(i, i - 1)] = 1.0;
                }
                for i in 0..deg {
                    comp[(i, deg - 1)] = -c[i] / lead;
                }
                comp.complex_eigenvalues()
                    .iter()
                    .map(|z| Complex64::new(z.re, z.im))
                    .collect()
            }
        }
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
}

/// Roots of `a x^2 + b x + c` without cancellation in the real case.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        }
        vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn interpolation_recovers_cubic() {
        // 2 - x + 3x^3
        let f = |x: &BigRational| q(2) - x + q(3) * x * x * x;
        let xs: Vec<_> = (0..5).map(q).collect();
        let ys: Vec<_> = xs.iter().map(f).collect();
        let p = UPoly::interpolate(&xs, &ys);
        assert_eq!(p.coeffs(), &[q(2), q(-1), q(0), q(3)]);
    }

    #[test]
    fn gcd_and_square_free() {
        // (x-1)^2 (x+2) and (x-1)(x-3)
        let a = UPoly::new(vec![q(2), q(-3), q(0), q(1)]);
        let b = UPoly::new(vec![q(3), q(-4), q(1)]);
        assert_eq!(a.gcd(&b), UPoly::new(vec![q(-1), q(1)]));
        assert_eq!(a.square_free(), UPoly::new(vec![q(-2), q(1), q(1)]));
    }

    #[test]
    fn roots_of_quadratic() {
        let p = UPoly::new(vec![q(-25), q(0), q(16)]);
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 1.25).abs() < 1e-15 && (r[1] - 1.25).abs() < 1e-15);
    }
}
