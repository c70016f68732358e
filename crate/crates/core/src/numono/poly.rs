//! Exact polynomials with rational coefficients: bivariate in `x, y` and
//! univariate helpers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumonoError;

/// `Σ a_ij x^i y^j` keyed by `(i, j)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PlanePolynomial {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl PlanePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn x() -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, BigRational::one());
        p
    }

    pub fn y() -> Self {
        let mut p = Self::zero();
        p.add_term(0, 1, BigRational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigRational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coefficient(&self, j: u32) -> QPoly {
        let deg = self.degree_x().unwrap_or(0) as usize;
        let mut c = vec![BigRational::zero(); deg + 1];
        for (&(a, b), v) in &self.terms {
            if b == j {
                c[a as usize] = v.clone();
            }
        }
        QPoly::new(c)
    }

    /// Coefficient list in `y` (low to high) after substituting `x = x0`.
    pub fn specialize_x(&self, x0: &BigRational) -> Vec<BigRational> {
        let deg = self.degree_y().unwrap_or(0) as usize;
        let mut out = vec![BigRational::zero(); deg + 1];
        for (&(i, j), c) in &self.terms {
            out[j as usize] += c * pow_rational(x0, i);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c * k);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative_x(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, j, c * BigRational::from_integer(BigInt::from(i)));
            }
        }
        out
    }

    pub fn derivative_y(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.add_term(i, j - 1, c * BigRational::from_integer(BigInt::from(j)));
            }
        }
        out
    }

    /// Substitutes `x ← x + λ·y`.
    pub fn shear(&self, lambda: &BigRational) -> Self {
        let sx = Self::x().add(&Self::y().scale(lambda));
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let term = sx.pow(i).mul(&Self::y().pow(j)).scale(c);
            out = out.add(&term);
        }
        out
    }

    /// Complex coefficients in `y` (low to high) at `x`.
    pub fn eval_y_coeffs(&self, x: Complex64) -> Vec<Complex64> {
        let deg = self.degree_y().unwrap_or(0) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (&(i, j), c) in &self.terms {
            out[j as usize] += x.powu(i) * rational_to_f64(c);
        }
        out
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| x.powu(i) * y.powu(j) * rational_to_f64(c))
            .sum()
    }

    /// Parses text in `x`, `y` with rational constants, `+ - * / ^` and
    /// parentheses. Division is by nonzero constants only.
    pub fn parse(text: &str) -> Result<Self, NumonoError> {
        let p = Parser::new(text).parse_all()?;
        if p.is_zero() {
            return Err(NumonoError::ZeroPolynomial);
        }
        match p.degree_y() {
            Some(d) if d >= 2 => Ok(p),
            d => Err(NumonoError::DegreeTooLow(d.unwrap_or(0))),
        }
    }

    /// Same grammar as [`parse`](Self::parse) without the degree checks.
    pub fn parse_any(text: &str) -> Result<Self, NumonoError> {
        Parser::new(text).parse_all()
    }
}

impl fmt::Display for PlanePolynomial {
    /// Terms by descending `y` power, then descending `x` power.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.1.cmp(&a.1).then(b.0.cmp(&a.0)));
        for (k, &&(i, j)) in keys.iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || (i == 0 && j == 0) {
                factors.push(abs.to_string());
            }
            match i {
                0 => {}
                1 => factors.push("x".into()),
                _ => factors.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => factors.push("y".into()),
                _ => factors.push(format!("y^{j}")),
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PlanePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlanePolynomial({self})")
    }
}

pub(crate) fn pow_rational(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // very large numerators or denominators: divide as floats of the parts
        let n = c.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = c.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: &'static str) -> NumonoError {
        NumonoError::Syntax { pos: self.pos, msg }
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

    fn parse_all(mut self) -> Result<PlanePolynomial, NumonoError> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<PlanePolynomial, NumonoError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PlanePolynomial, NumonoError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    let c = constant_value(&d).ok_or(NumonoError::Syntax {
                        pos: at,
                        msg: "division by a non-constant",
                    })?;
                    if c.is_zero() {
                        return Err(NumonoError::Syntax {
                            pos: at,
                            msg: "division by zero",
                        });
                    }
                    acc = acc.scale(&c.recip());
                }
                // juxtaposition: 3x, 2(x+1), x y
                Some(b'0'..=b'9' | b'.' | b'x' | b'y' | b'(') => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<PlanePolynomial, NumonoError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PlanePolynomial, NumonoError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a non-negative integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| NumonoError::Syntax {
                    pos: start,
                    msg: "exponent too large",
                })?;
            if e > 64 {
                return Err(NumonoError::Syntax {
                    pos: start,
                    msg: "exponent too large",
                });
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<PlanePolynomial, NumonoError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(PlanePolynomial::x())
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(PlanePolynomial::y())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'0'..=b'9' | b'.') => self.number(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<PlanePolynomial, NumonoError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = &self.src[start..self.pos];
        let mut frac_part: &[u8] = &[];
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac_part = &self.src[fs..self.pos];
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(NumonoError::Syntax {
                pos: start,
                msg: "malformed number",
            });
        }
        let digits: String = int_part
            .iter()
            .chain(frac_part.iter())
            .map(|&b| b as char)
            .collect();
        let numer: BigInt = digits.parse().map_err(|_| NumonoError::Syntax {
            pos: start,
            msg: "malformed number",
        })?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(PlanePolynomial::constant(BigRational::new(numer, denom)))
    }
}

fn constant_value(p: &PlanePolynomial) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    if p.terms.len() == 1 {
        if let Some(c) = p.terms.get(&(0, 0)) {
            return Some(c.clone());
        }
    }
    None
}

/// Univariate polynomial over `Q`, coefficients low to high, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_integers(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn rem(&self, divisor: &QPoly) -> QPoly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let q = &r[k] / &lead;
            if !q.is_zero() {
                for (t, c) in divisor.coeffs.iter().enumerate() {
                    r[k - dd + t] -= &q * c;
                }
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        QPoly::new(r)
    }

    fn monic(&self) -> QPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                QPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| Complex64::new(rational_to_f64(c), 0.0))
            .collect()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ((k as u32, 0u32), c.clone()));
        write!(f, "{}", PlanePolynomial::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn parse_examples() {
        let p = PlanePolynomial::parse("y^2 - x").unwrap();
        assert_eq!(p.coefficient(0, 2), q(1));
        assert_eq!(p.coefficient(1, 0), q(-1));
        assert_eq!(p.terms().count(), 2);
        assert_eq!(p.degree_y(), Some(2));
        assert_eq!(PlanePolynomial::parse("y^3 - 3*y + x").unwrap().degree_y(), Some(3));
        assert_eq!(
            PlanePolynomial::parse("y + 1"),
            Err(NumonoError::DegreeTooLow(1))
        );
        assert_eq!(PlanePolynomial::parse("y^2 - y^2"), Err(NumonoError::ZeroPolynomial));
    }

    #[test]
    fn parse_arithmetic() {
        let p = PlanePolynomial::parse("(x - 1)*(x + 1) + y^2/2 + 0.25 y^2 + 3x y").unwrap();
        assert_eq!(p.coefficient(2, 0), q(1));
        assert_eq!(p.coefficient(0, 0), q(-1));
        assert_eq!(p.coefficient(0, 2), BigRational::new(BigInt::from(3), BigInt::from(4)));
        assert_eq!(p.coefficient(1, 1), q(3));
        assert_eq!(
            PlanePolynomial::parse("-x^2 + y^2").unwrap().coefficient(2, 0),
            q(-1)
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(
            PlanePolynomial::parse("y^2 + z"),
            Err(NumonoError::Syntax {
                pos: 6,
                msg: "unexpected character"
            })
        );
        assert!(matches!(
            PlanePolynomial::parse("(y^2 - x"),
            Err(NumonoError::Syntax { pos: 8, .. })
        ));
        assert!(matches!(
            PlanePolynomial::parse("y^2 / x"),
            Err(NumonoError::Syntax { .. })
        ));
        assert!(matches!(
            PlanePolynomial::parse("y^2 / 0"),
            Err(NumonoError::Syntax { .. })
        ));
        assert!(matches!(
            PlanePolynomial::parse("y^x"),
            Err(NumonoError::Syntax { .. })
        ));
    }

    #[test]
    fn printer_round_trips() {
        for s in [
            "y^3 - 3*y + x",
            "y^2 - x^5 + 10*x^4 - 35*x^3 + 50*x^2 - 24*x",
            "-1/2*x*y^2 + 7/3",
        ] {
            let p = PlanePolynomial::parse(s).unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(PlanePolynomial::parse(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn derivatives_and_shear() {
        let p = PlanePolynomial::parse("y^3 + x^3 - 1").unwrap();
        assert_eq!(p.derivative_y().to_string(), "3*y^2");
        assert_eq!(p.derivative_x().to_string(), "3*x^2");
        let s = p.shear(&q(1));
        // (x + y)^3 + y^3 - 1
        assert_eq!(s.to_string(), "2*y^3 + 3*x*y^2 + 3*x^2*y + x^3 - 1");
    }

    #[test]
    fn univariate_gcd() {
        // (x - 1)^2 (x + 2)
        let f = QPoly::from_integers(&[2, -3, 0, 1]);
        assert!(!f.is_squarefree());
        assert_eq!(f.gcd(&f.derivative()), QPoly::from_integers(&[-1, 1]));
        assert!(QPoly::from_integers(&[-108, 0, 27]).is_squarefree());
        assert_eq!(f.eval(&q(1)), q(0));
    }
}
