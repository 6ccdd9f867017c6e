use num_complex::Complex;

use super::{support_of, RecoveryOutcome};
use crate::error::{Error, Result};
use crate::numkit::{least_squares, ComplexMatrix};
use crate::scalar::{norm1, norm2, Real};

/// Orthogonal matching pursuit on the column-normalized matrix `B = A R`,
/// `R = diag(1 / ||a_j||)`, de-normalizing the result at the end.
///
/// Runs `k` greedy steps, stopping early only once the residual vanishes.
/// Already selected and all-zero columns are never selected; the latter set
/// the degeneracy flag.
pub fn omp<T: Real>(a: &ComplexMatrix<T>, y: &[Complex<T>], k: usize) -> Result<RecoveryOutcome<T>> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::dim(format!("A has {m} rows, y has {} entries", y.len())));
    }
    if k > m.min(n) {
        return Err(Error::arg(format!("k = {k} exceeds min(m, N) = {}", m.min(n))));
    }
    let norms: Vec<T> = (0..n).map(|j| a.column_norm(j)).collect();
    if norms.iter().all(|&c| c == T::zero()) {
        return Err(Error::arg("every column of A is zero"));
    }
    let mut degenerate = norms.iter().any(|&c| c == T::zero());
    let inv: Vec<T> = norms
        .iter()
        .map(|&c| if c == T::zero() { T::zero() } else { T::one() / c })
        .collect();
    let b = a.scale_columns(&inv);

    let zero = Complex::new(T::zero(), T::zero());
    let mut eligible: Vec<bool> = norms.iter().map(|&c| c > T::zero()).collect();
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut coeffs: Vec<Complex<T>> = Vec::new();
    let mut residual = y.to_vec();
    let mut history = Vec::with_capacity(k);
    let stop = T::epsilon() * norm2(y);

    for _ in 0..k {
        if norm2(&residual) <= stop {
            break;
        }
        let corr = b.adjoint_matvec(&residual)?;
        let pick = (0..n)
            .filter(|&j| eligible[j])
            .fold(None::<(usize, T)>, |best, j| {
                let c = corr[j].norm();
                match best {
                    Some((_, bc)) if bc >= c => best,
                    _ => Some((j, c)),
                }
            });
        let Some((j, _)) = pick else { break };
        eligible[j] = false;
        selected.push(j);
        let sub = b.select_columns(&selected);
        let ls = least_squares(&sub, y)?;
        degenerate |= ls.rank_deficient;
        coeffs = ls.solution;
        let fit = sub.matvec(&coeffs)?;
        residual = y.iter().zip(&fit).map(|(u, v)| u - v).collect();
        history.push(norm2(&residual));
    }

    let mut estimate = vec![zero; n];
    for (&j, &c) in selected.iter().zip(&coeffs) {
        estimate[j] = c * inv[j];
    }
    let fit = a.matvec(&estimate)?;
    let residual_l2 = norm2(&y.iter().zip(&fit).map(|(u, v)| u - v).collect::<Vec<_>>());
    Ok(RecoveryOutcome {
        support: support_of(&estimate),
        objective: norm1(&estimate),
        estimate,
        residual_l2,
        iterations: selected.len(),
        converged: true,
        degenerate,
        selection_path: selected,
        residual_history: history,
        duality_gap: None,
    })
}
