//! Simultaneous root finding for complex univariate polynomials
//! (Aberth–Ehrlich iteration followed by Newton polishing).

use num_complex::Complex64;

/// Value and derivative by Horner; coefficients low to high.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)|` divided by `Σ |a_k| |z|^k`.
pub fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = eval_with_derivative(coeffs, z);
    let r = z.norm();
    let scale: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * r.powi(k as i32))
        .sum();
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == Complex64::new(0.0, 0.0) {
        n -= 1;
    }
    &coeffs[..n]
}

/// Initial guesses on a circle of the Fujiwara-type radius bound, rotated
/// off the axes.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let radius = (0..n)
        .map(|k| (coeffs[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// All roots of the polynomial. `start` seeds the iteration (for warm
/// starts along a path); `tol` is the relative step size at which a root is
/// considered converged. Returns `None` when the iteration does not settle.
pub fn aberth(
    coeffs: &[Complex64],
    start: Option<&[Complex64]>,
    tol: f64,
    max_iter: usize,
) -> Option<Vec<Complex64>> {
    let coeffs = trim(coeffs);
    if coeffs.len() <= 1 {
        return Some(Vec::new());
    }
    let n = coeffs.len() - 1;
    let mut z: Vec<Complex64> = match start {
        Some(s) if s.len() == n => s.to_vec(),
        _ => initial_guesses(coeffs),
    };
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(coeffs, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    repulsion += 1.0 / (z[k] - zj);
                }
            }
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[k] -= step;
            if step.norm() <= tol * (1.0 + z[k].norm())
                || relative_residual(coeffs, z[k]) <= 8.0 * f64::EPSILON
            {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            for zk in z.iter_mut() {
                *zk = polish(coeffs, *zk);
            }
            return Some(z);
        }
    }
    None
}

/// A few Newton steps, stopping when the residual stops improving.
pub fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = relative_residual(coeffs, z);
    for _ in 0..4 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp == Complex64::new(0.0, 0.0) {
            break;
        }
        let cand = z - p / dp;
        let r = relative_residual(coeffs, cand);
        if !(r < best) {
            break;
        }
        best = r;
        z = cand;
    }
    z
}

/// Smallest pairwise distance, `+∞` for fewer than two points.
pub fn min_separation(z: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            best = best.min((z[i] - z[j]).norm());
        }
    }
    best
}

/// Sorts by real part, then imaginary part.
pub fn sort_lex(z: &mut [Complex64]) {
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}
