//! Shared brute-force oracles for the integration suites. Everything here
//! is deliberately independent of the library's own linear algebra paths.

use bellpulse::model::Matrix4C;
use bellpulse::su2::Matrix2C;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for sweep in 0..100 {
        let mut off = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                off += m[r][c] * m[r][c];
            }
        }
        if off < 1e-26 {
            break;
        }
        assert!(sweep < 99, "Jacobi failed to converge");
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    eigs
}

/// Eigenvalues of a complex Hermitian 4×4 matrix via the real-symmetric
/// embedding [[Re, -Im], [Im, Re]]; each eigenvalue of H appears twice.
pub fn hermitian4_eigenvalues(h: &Matrix4C) -> Vec<f64> {
    let mut embedded = vec![vec![0.0; 8]; 8];
    for r in 0..4 {
        for c in 0..4 {
            let e = h.get(r, c);
            embedded[r][c] = e.re;
            embedded[r + 4][c + 4] = e.re;
            embedded[r][c + 4] = -e.im;
            embedded[r + 4][c] = e.im;
        }
    }
    let doubled = jacobi_eigenvalues(embedded);
    // Keep every other entry of the sorted, doubled spectrum.
    doubled.into_iter().step_by(2).collect()
}

/// Eigenvalues of a complex Hermitian 2×2 matrix, closed form, ascending.
pub fn hermitian2_eigenvalues(m: &Matrix2C) -> Vec<f64> {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let off = m.get(0, 1).norm();
    let mid = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + off * off).sqrt();
    vec![mid - radius, mid + radius]
}
