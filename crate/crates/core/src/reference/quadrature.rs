//! Composite quadrature on the unit interval and Gauss-Hermite rules.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    Trapezoid,
    Simpson,
}

/// Grid for the reference quadratures: `n_points` subintervals of `[0, 1)`,
/// a power of two of at least 16 (so Simpson's even-interval requirement
/// always holds).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub n_points: usize,
    pub rule: QuadRule,
}

impl QuadratureGrid {
    pub fn new(n_points: usize, rule: QuadRule) -> Self {
        assert!(n_points >= 16, "need at least 16 quadrature points");
        assert!(n_points.is_power_of_two(), "n_points must be a power of two");
        Self { n_points, rule }
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::new(4096, QuadRule::Simpson)
    }
}

/// Weights for the n nodes `i/n` of a periodic integrand on `[0, 1)`.
pub fn periodic_weights(rule: QuadRule, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    match rule {
        QuadRule::Trapezoid => vec![h; n],
        QuadRule::Simpson => (0..n)
            .map(|i| if i % 2 == 0 { 2.0 * h / 3.0 } else { 4.0 * h / 3.0 })
            .collect(),
    }
}

/// Weights for the n+1 nodes `j/n` of a closed composite rule on `[0, 1]`;
/// needed when the integrand is not periodic.
pub fn closed_weights(rule: QuadRule, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    match rule {
        QuadRule::Trapezoid => (0..=n)
            .map(|j| if j == 0 || j == n { 0.5 * h } else { h })
            .collect(),
        QuadRule::Simpson => {
            assert!(n % 2 == 0);
            (0..=n)
                .map(|j| {
                    if j == 0 || j == n {
                        h / 3.0
                    } else if j % 2 == 1 {
                        4.0 * h / 3.0
                    } else {
                        2.0 * h / 3.0
                    }
                })
                .collect()
        }
    }
}

/// Integrate a periodic function over one period with `n` nodes.
pub fn integrate_periodic(rule: QuadRule, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    periodic_weights(rule, n)
        .iter()
        .enumerate()
        .map(|(i, w)| w * f(i as f64 / n as f64))
        .sum()
}

/// Nodes and weights of the n-point Gauss-Hermite rule for the standard
/// normal weight: `integral f(g) exp(-g^2/2)/sqrt(2 pi) dg ~ sum w_i f(g_i)`.
///
/// Built by Golub-Welsch: the nodes are the eigenvalues of the Jacobi
/// matrix of the probabilists' Hermite polynomials (zero diagonal,
/// off-diagonal sqrt(k)), and the weights follow from the Christoffel
/// function 1 / sum_k p_k(x_i)^2 evaluated with the orthonormal recurrence.
/// Extreme nodes whose weight underflows get weight zero.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (1..n).map(|k| (k as f64).sqrt()).collect();
    off.push(0.0);
    tridiag_eigenvalues(&mut diag, &mut off);
    diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weights = diag
        .iter()
        .map(|&x| {
            // sum of squared orthonormal polynomials p_0..p_{n-1}
            let mut p_prev = 0.0f64;
            let mut p = 1.0f64;
            let mut total = 1.0f64;
            for k in 0..n - 1 {
                let p_next = (x * p - (k as f64).sqrt() * p_prev) / ((k + 1) as f64).sqrt();
                p_prev = p;
                p = p_next;
                total += p * p;
            }
            if total.is_finite() {
                1.0 / total
            } else {
                0.0
            }
        })
        .collect();
    (diag, weights)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the QL algorithm with
/// implicit shifts (EISPACK tql1). `d` holds the diagonal and is replaced
/// by the eigenvalues in no particular order; `e` holds the off-diagonal in
/// `e[0..n-1]` and is destroyed.
fn tridiag_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
