use alloc::vec;
use alloc::vec::Vec;

/// Least-squares solution of `rows · c ≈ ys` by Householder QR. Returns
/// `None` for rank-deficient systems or when there are fewer rows than
/// unknowns.
pub fn solve_least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Option<Vec<f64>> {
    let m = rows.len();
    let n = rows.first()?.len();
    if m < n || n == 0 || ys.len() != m {
        return None;
    }
    // column-major copy
    let mut a: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut b = ys.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(libm::fabs(*v))).max(1.0);
    for k in 0..n {
        let norm = libm::sqrt(a[k][k..].iter().map(|v| v * v).sum());
        if norm <= 1e-12 * scale {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v = a[k][k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        if vv == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vv;
            for (c, p) in col[k..].iter_mut().zip(&v) {
                *c -= f * p;
            }
        }
        let dot: f64 = v.iter().zip(&b[k..]).map(|(p, q)| p * q).sum();
        let f = 2.0 * dot / vv;
        for (c, p) in b[k..].iter_mut().zip(&v) {
            *c -= f * p;
        }
    }
    let mut c = vec![0.0; n];
    for i in (0..n).rev() {
        let diag = a[i][i];
        if libm::fabs(diag) <= 1e-12 * scale {
            return None;
        }
        let s: f64 = (i + 1..n).map(|j| a[j][i] * c[j]).sum();
        c[i] = (b[i] - s) / diag;
    }
    Some(c)
}
