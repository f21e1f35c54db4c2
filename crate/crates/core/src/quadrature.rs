//! Gauss rules on `[0, 1]` from their Jacobi matrices (Golub-Welsch).

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights from recurrence coefficients `alpha[0..n]`, `beta[0..n]`
/// of the monic orthogonal polynomials, `beta[0]` being the total mass.
fn golub_welsch(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = alpha.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = alpha[i];
        if i + 1 < n {
            let b = beta[i + 1].sqrt();
            j[(i, i + 1)] = b;
            j[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], beta[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Recurrence of the monic shifted Legendre polynomials on `[0, 1]`.
fn legendre_recurrence(n: usize) -> (Vec<f64>, Vec<f64>) {
    let alpha = vec![0.5; n];
    let beta = (0..n)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                let k = k as f64;
                k * k / (4.0 * (4.0 * k * k - 1.0))
            }
        })
        .collect();
    (alpha, beta)
}

/// `n`-point Gauss-Legendre rule for `int_0^1 f(x) dx`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = legendre_recurrence(n);
    golub_welsch(&a, &b)
}

/// `n`-point Gauss rule for `int_0^1 f(x) (-ln x) dx`.
///
/// Recurrence coefficients come from the modified Chebyshev algorithm fed
/// with moments of the weight against shifted Legendre polynomials,
/// `int_0^1 P_l(2x-1) (-ln x) dx = (-1)^l / (l (l+1))` for `l >= 1`.
pub fn gauss_log(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = 2 * n;
    let (a, b) = legendre_recurrence(m);
    // leading coefficient of P_l(2x-1) is binom(2l, l)
    let mut lead = 1.0;
    let mut nu = vec![0.0; m];
    for (l, nu_l) in nu.iter_mut().enumerate() {
        if l > 0 {
            let lf = l as f64;
            lead *= (2.0 * lf) * (2.0 * lf - 1.0) / (lf * lf);
        }
        let raw = if l == 0 {
            1.0
        } else {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            sign / (l as f64 * (l as f64 + 1.0))
        };
        *nu_l = raw / lead;
    }

    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut prev = vec![0.0; m + 1];
    let mut cur: Vec<f64> = nu.clone();
    cur.push(0.0);
    alpha[0] = a[0] + nu[1] / nu[0];
    beta[0] = nu[0];
    for k in 1..n {
        let mut next = vec![0.0; m + 1];
        for l in k..(m - k) {
            next[l] = cur[l + 1] - (alpha[k - 1] - a[l]) * cur[l] - beta[k - 1] * prev[l]
                + b[l] * cur[l - 1];
        }
        alpha[k] = a[k] + next[k + 1] / next[k] - cur[k] / cur[k - 1];
        beta[k] = next[k] / cur[k - 1];
        prev = cur;
        cur = next;
    }
    golub_welsch(&alpha, &beta)
}
