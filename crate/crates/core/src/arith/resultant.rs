//! Resultants over Q: univariate by the Euclidean remainder sequence, and
//! bivariate (eliminating one variable) by evaluation and interpolation.

use super::ratpoly::{rat, RationalPoly};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Res(f, g) for univariate f, g over Q.
pub fn resultant(f: &RationalPoly, g: &RationalPoly) -> Result<BigRational> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut f = f.clone();
    let mut g = g.clone();
    let mut acc = BigRational::one();
    loop {
        let m = f.deg();
        let n = g.deg();
        if n == 0 {
            return Ok(acc * num_traits::pow(g.lead(), m));
        }
        let r = f.rem(&g);
        if r.is_zero() {
            return Ok(BigRational::zero());
        }
        let k = r.deg();
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(g.lead(), m - k);
        f = g;
        g = r;
    }
}

/// A polynomial in two variables, stored as coefficients in t (the variable to
/// eliminate) of polynomials in x.
pub type Bivariate = Vec<RationalPoly>;

fn eval_x(f: &Bivariate, x: &BigRational) -> RationalPoly {
    RationalPoly::new(f.iter().map(|c| c.eval(x)).collect())
}

fn deg_t(f: &Bivariate) -> usize {
    f.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn deg_x(f: &Bivariate) -> usize {
    f.iter().map(|c| c.deg()).max().unwrap_or(0)
}

/// Res_t(f, g) as a polynomial in x.
pub fn resultant_in_t(f: &Bivariate, g: &Bivariate) -> Result<RationalPoly> {
    let df = deg_t(f);
    let dg = deg_t(g);
    if f.iter().all(|c| c.is_zero()) || g.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroPolynomial);
    }
    let bound = df * deg_x(g) + dg * deg_x(f);
    let lf = &f[df];
    let lg = &g[dg];
    let mut xs = Vec::with_capacity(bound + 1);
    let mut ys = Vec::with_capacity(bound + 1);
    let mut k = 0i64;
    while xs.len() <= bound {
        let x = rat(k);
        k += 1;
        // Points where a leading coefficient vanishes would change the formal degree.
        if lf.eval(&x).is_zero() || lg.eval(&x).is_zero() {
            continue;
        }
        let fx = eval_x(f, &x);
        let gx = eval_x(g, &x);
        ys.push(resultant(&fx, &gx)?);
        xs.push(x);
    }
    Ok(interpolate(&xs, &ys))
}

/// Newton interpolation through the points (xs[i], ys[i]).
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> RationalPoly {
    let n = xs.len();
    let mut dd: Vec<BigRational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = RationalPoly::zero();
    for i in (0..n).rev() {
        let lin = RationalPoly::new(vec![-xs[i].clone(), BigRational::one()]);
        p = p.mul(&lin).add(&RationalPoly::constant(dd[i].clone()));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_of_quadratics() {
        let f = RationalPoly::from_i64(&[-2, 0, 1]);
        let g = RationalPoly::from_i64(&[-3, 0, 1]);
        assert_eq!(resultant(&f, &g).unwrap(), rat(1));
        assert!(resultant(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn resultant_of_linears_is_difference() {
        let f = RationalPoly::from_i64(&[-5, 1]);
        let g = RationalPoly::from_i64(&[-2, 1]);
        // Res(x - a, x - b) = a - b.
        assert_eq!(resultant(&f, &g).unwrap(), rat(3));
    }

    #[test]
    fn bivariate_specialisation() {
        // Res_t(t - x, t - 3) = x - 3.
        let f: Bivariate = vec![RationalPoly::from_i64(&[0, -1]), RationalPoly::one()];
        let g: Bivariate = vec![RationalPoly::from_i64(&[-3]), RationalPoly::one()];
        assert_eq!(resultant_in_t(&f, &g).unwrap(), RationalPoly::from_i64(&[-3, 1]));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = RationalPoly::from_i64(&[7, -3, 0, 2, 1]);
        let xs: Vec<_> = (0..5).map(rat).collect();
        let ys: Vec<_> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }
}
