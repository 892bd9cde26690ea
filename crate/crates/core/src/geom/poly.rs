//! Low-degree univariate polynomials: evaluation and real-root isolation on
//! an interval.
//!
//! Coefficients are stored lowest degree first.

/// Horner evaluation.
pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// Drops leading coefficients that are negligible relative to the largest.
pub fn trim(c: &[f64]) -> Vec<f64> {
    let m = c.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if m == 0.0 {
        return Vec::new();
    }
    let mut n = c.len();
    while n > 0 && c[n - 1].abs() <= 1e-14 * m {
        n -= 1;
    }
    c[..n].to_vec()
}

/// Real roots of `a x² + b x + c`, ascending. Falls back to the linear case
/// when the leading coefficient is negligible.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let m = a.abs().max(b.abs()).max(c.abs());
    if m == 0.0 {
        return Vec::new();
    }
    // Power-of-two scaling keeps the normalization exact.
    let s = 2f64.powi(-(m.log2().floor() as i32));
    let (a, b, c) = (a * s, b * s, c * s);
    if a.abs() < 1e-13 {
        if b.abs() < 1e-300 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-14 {
            return vec![-b / (2.0 * a)];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut r = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    r.sort_by(f64::total_cmp);
    r
}

/// Real roots of the polynomial in `[lo, hi]`, ascending.
///
/// Roots of the derivative split the interval into monotone pieces; each
/// piece holds at most one root, found by bisection. Even-multiplicity
/// roots that do not change sign are reported only when the polynomial
/// vanishes at a critical point to within rounding.
pub fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c);
    if c.len() <= 1 || lo > hi {
        return Vec::new();
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        return if r >= lo && r <= hi { vec![r] } else { Vec::new() };
    }
    let crit = real_roots(&derivative(&c), lo, hi);
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    knots.push(hi);
    // Rounding bound for Horner evaluation at x.
    let abs_c: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    let err = |x: f64| 4.0 * c.len() as f64 * f64::EPSILON * eval(&abs_c, x.abs());
    let mut roots: Vec<f64> = Vec::new();
    let push = |roots: &mut Vec<f64>, x: f64| {
        if roots.last().is_none_or(|&l| (x - l).abs() > 1e-14 * (1.0 + x.abs())) {
            roots.push(x);
        }
    };
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = eval(&c, a);
        let fb = eval(&c, b);
        if fa == 0.0 {
            push(&mut roots, a);
            continue;
        }
        if fa.abs() <= err(a) && a != lo {
            push(&mut roots, a);
            continue;
        }
        if fb == 0.0 {
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) {
            push(&mut roots, bisect(&c, a, b, fa));
        }
    }
    if eval(&c, hi) == 0.0 {
        push(&mut roots, hi);
    }
    roots
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Product of two polynomials.
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

/// `a + s·b`, padding the shorter operand.
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + s * b.get(i).copied().unwrap_or(0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        assert_eq!(solve_quadratic(1.0, -3.0, 2.0), vec![1.0, 2.0]);
        assert!(solve_quadratic(1.0, 0.0, 1.0).is_empty());
        assert_eq!(solve_quadratic(0.0, 2.0, -4.0), vec![2.0]);
    }

    #[test]
    fn quartic_roots_in_interval() {
        // (x-1)(x-2)(x+0.5)(x-3.25)
        let c = mul(&mul(&[-1.0, 1.0], &[-2.0, 1.0]), &mul(&[0.5, 1.0], &[-3.25, 1.0]));
        let r = real_roots(&c, -10.0, 10.0);
        let want = [-0.5, 1.0, 2.0, 3.25];
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let r = real_roots(&c, 0.0, 2.5);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn close_roots_are_separated() {
        let c = mul(&[-1.0, 1.0], &[-(1.0 + 1e-6), 1.0]);
        let r = real_roots(&c, 0.0, 2.0);
        assert_eq!(r.len(), 2);
        assert!((r[1] - r[0] - 1e-6).abs() < 1e-9);
        // A double root is reported once.
        let d = mul(&[-1.0, 1.0], &[-1.0, 1.0]);
        assert_eq!(real_roots(&d, 0.0, 2.0), vec![1.0]);
    }
}
