#![allow(dead_code)]

use locsme::{CMat64, CVec64, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cvec(v: &[(f64, f64)]) -> CVec64 {
    CVec64::from_iterator(v.len(), v.iter().map(|&(r, i)| c(r, i)))
}

pub fn fro(m: &CMat64) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(v: &CVec64) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `u^H v`, written out.
pub fn dot(u: &CVec64, v: &CVec64) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Gauss-Jordan inverse with partial pivoting, written independently of the
/// library's factorizations.
pub fn gauss_jordan_inverse(a: &CMat64) -> CMat64 {
    let n = a.nrows();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|r| {
            let mut row: Vec<C64> = (0..n).map(|k| a[(r, k)]).collect();
            row.extend((0..n).map(|k| if k == r { c(1.0, 0.0) } else { c(0.0, 0.0) }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].norm().partial_cmp(&m[y][col].norm()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    CMat64::from_fn(n, n, |r, k| m[r][n + k])
}

/// Eigenvalues of a Hermitian matrix via nalgebra's real-symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is each eigenvalue twice.
pub fn hermitian_spectrum(a: &CMat64) -> Vec<f64> {
    let n = a.nrows();
    let big = nalgebra::DMatrix::<f64>::from_fn(2 * n, 2 * n, |r, k| {
        let z = a[(r % n, k % n)];
        match (r < n, k < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(big).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}
