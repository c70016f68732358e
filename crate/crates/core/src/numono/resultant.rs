//! Exact `y`-resultants of bivariate rational polynomials by evaluation at
//! integer points and Newton interpolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{PlanePolynomial, QPoly};

/// Determinant over `Q` by Gaussian elimination with exact pivots.
pub fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Sylvester resultant of `f` (formal degree `df`) and `g` (formal degree
/// `dg`); coefficient lists are low to high and may have zero leading terms.
pub fn sylvester_resultant(f: &[BigRational], df: usize, g: &[BigRational], dg: usize) -> BigRational {
    let n = df + dg;
    if n == 0 {
        return BigRational::one();
    }
    let coeff = |v: &[BigRational], k: usize| v.get(k).cloned().unwrap_or_else(BigRational::zero);
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for row in 0..dg {
        for k in 0..=df {
            m[row][row + k] = coeff(f, df - k);
        }
    }
    for row in 0..df {
        for k in 0..=dg {
            m[dg + row][row + k] = coeff(g, dg - k);
        }
    }
    determinant(m)
}

/// `Res_y(p, q)` with formal `y`-degrees taken from the inputs.
pub fn resultant_y(p: &PlanePolynomial, q: &PlanePolynomial) -> QPoly {
    let dp = p.degree_y().unwrap_or(0) as usize;
    let dq = q.degree_y().unwrap_or(0) as usize;
    let bound = p.degree_x().unwrap_or(0) as usize * dq + q.degree_x().unwrap_or(0) as usize * dp;
    let xs: Vec<BigRational> = (0..=bound)
        .map(|k| BigRational::from_integer(BigInt::from(k)))
        .collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|x| sylvester_resultant(&p.specialize_x(x), dp, &q.specialize_x(x), dq))
        .collect();
    interpolate(&xs, &ys)
}

/// Discriminant-type resultant `Res_y(p, ∂p/∂y)`.
pub fn discriminant_resultant(p: &PlanePolynomial) -> QPoly {
    resultant_y(p, &p.derivative_y())
}

/// Newton interpolation through `(xs[k], ys[k])`.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for k in (level..n).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / (&xs[k] - &xs[k - level]);
        }
    }
    // expand Σ dd[k] Π_{m<k} (x - xs[m]) by Horner from the top
    let mut acc: Vec<BigRational> = Vec::new();
    for k in (0..n).rev() {
        // acc = acc * (x - xs[k]) + dd[k]
        let mut next = vec![BigRational::zero(); acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * &xs[k];
        }
        next[0] += &dd[k];
        acc = next;
    }
    QPoly::new(acc)
}
