//! Shared oracles for the integration tests. These stay independent of
//! the library's own linear-algebra kernels: the eigensolver is a classic
//! two-sided Jacobi iteration written directly against the definition.

use crospec_core::mat::{CMat, RMat};

/// Eigenvalues of a symmetric real matrix via cyclic two-sided Jacobi.
pub fn jacobi_eigenvalues(a: &RMat) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut m = a.clone();
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q) * m.get(p, q);
            }
        }
        if off < 1e-28 * (1.0 + m.frobenius_norm()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotate rows and columns p, q.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

/// Eigenvalues of a complex Hermitian matrix through the real embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of the input doubled.
#[allow(dead_code)]
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    assert_eq!(h.rows(), h.cols());
    let n = h.rows();
    let embedded = RMat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => h.get(bi, bj).re,
            (true, false) => -h.get(bi, bj).im,
            (false, true) => h.get(bi, bj).im,
        }
    });
    let doubled = jacobi_eigenvalues(&embedded);
    // Every eigenvalue appears twice; keep one representative of each pair.
    doubled.into_iter().step_by(2).collect()
}

#[allow(dead_code)]
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
