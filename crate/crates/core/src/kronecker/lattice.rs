//! LLL reduction for simultaneous approximation lattices.
//!
//! Basis vectors are kept as integer coefficient vectors `(q, p_1, ..)`; the
//! real embedding of a vector is recomputed from its coefficients by a
//! caller-supplied map, so rounding never accumulates across reduction steps.

/// LLL-reduces `basis` (integer coefficient vectors) under `embed`.
pub(crate) fn lll<F>(mut basis: Vec<Vec<i128>>, embed: F, delta: f64) -> Vec<Vec<i128>>
where
    F: Fn(&[i128]) -> Vec<f64>,
{
    let n = basis.len();
    if n < 2 {
        return basis;
    }
    let mut vecs: Vec<Vec<f64>> = basis.iter().map(|b| embed(b)).collect();
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        let (mut mu, mut bstar) = gram_schmidt(&vecs);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i128;
                for c in 0..basis[k].len() {
                    basis[k][c] -= qi * basis[j][c];
                }
                vecs[k] = embed(&basis[k]);
                let gs = gram_schmidt(&vecs);
                mu = gs.0;
                bstar = gs.1;
            }
        }
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            vecs.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    basis
}

/// Gram–Schmidt coefficients `mu` and squared norms of the orthogonalized
/// vectors.
fn gram_schmidt(v: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = v.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        let mut w = v[i].clone();
        for j in 0..i {
            let m = if b[j] > 0.0 { dot(&v[i], &star[j]) / b[j] } else { 0.0 };
            mu[i][j] = m;
            for (wc, sc) in w.iter_mut().zip(&star[j]) {
                *wc -= m * sc;
            }
        }
        b[i] = dot(&w, &w);
        star.push(w);
    }
    (mu, b)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
