#![allow(dead_code)]

use corsing_core::numkit::{ComplexMatrix, RandomStream};
use corsing_core::C64;

/// Eigenvalues of a Hermitian matrix through its real symmetric embedding
/// `[[A, -B], [B, A]]`, by cyclic Jacobi rotations. Each eigenvalue of the
/// Hermitian matrix appears twice in the embedding; one copy is kept.
pub fn jacobi_eigenvalues(h: &ComplexMatrix<f64>) -> Vec<f64> {
    let n = h.rows();
    let k = 2 * n;
    let mut a = vec![vec![0.0; k]; k];
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..k).map(|i| a[i][i]).collect();
    vals.sort_by(f64::total_cmp);
    vals.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

/// `||A_S^H A_S - I||_2` via the Jacobi oracle, from explicit column products.
pub fn support_deviation(a: &ComplexMatrix<f64>, support: &[usize]) -> f64 {
    let k = support.len();
    let g = ComplexMatrix::from_fn(k, k, |i, j| {
        (0..a.rows()).map(|r| a.get(r, support[i]).conj() * a.get(r, support[j])).sum()
    });
    jacobi_eigenvalues(&g).iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max)
}

/// All `k`-subsets of `0..n` by bitmask, independent of the library's
/// combination iterator.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&j| m >> j & 1 == 1).collect())
        .collect()
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix<f64> {
    let mut r = RandomStream::new(seed, 99);
    let scale = 1.0 / (rows as f64).sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| r.complex_normal() * scale)
}

pub fn random_real_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix<f64> {
    let mut r = RandomStream::new(seed, 98);
    let scale = 1.0 / (rows as f64).sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(r.normal() * scale, 0.0))
}

pub fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Solves a small dense complex system by Gaussian elimination with
/// partial pivoting.
pub fn solve_dense(a: &[Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    let n = b.len();
    let mut m: Vec<Vec<C64>> = a.iter().zip(b).map(|(r, v)| {
        let mut r = r.clone();
        r.push(*v);
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm()))?;
        if m[p][c].norm() < 1e-13 {
            return None;
        }
        m.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    let v = m[c][k];
                    m[r][k] -= f * v;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Least squares by the normal equations `A^H A x = A^H y`.
pub fn normal_equations(a: &ComplexMatrix<f64>, y: &[C64]) -> Option<Vec<C64>> {
    let n = a.cols();
    let g: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| (0..a.rows()).map(|r| a.get(r, i).conj() * a.get(r, j)).sum()).collect())
        .collect();
    let rhs: Vec<C64> = (0..n).map(|i| (0..a.rows()).map(|r| a.get(r, i).conj() * y[r]).sum()).collect();
    solve_dense(&g, &rhs)
}
