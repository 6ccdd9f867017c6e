use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::RandomStream;
use crate::C64;

const MAX_ATTEMPTS: usize = 64;

/// Inputs shared by all targets of one cover.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverParams {
    pub s: usize,
    pub rho: f64,
    pub delta: f64,
    /// Coordinate bound `K`; defaults to the largest `|X_ij|`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetCover {
    pub target: usize,
    pub net_index: usize,
    /// Exception set `I`, ascending.
    pub exceptions: Vec<usize>,
    /// `max_{i not in I} |<X_i, f - x>|`.
    pub width: f64,
    pub attempts: usize,
    pub covered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakCover {
    pub net_points: Vec<Vec<C64>>,
    pub per_target: Vec<TargetCover>,
    pub rho: f64,
    #[serde(rename = "M_cap")]
    pub m_cap: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub s: usize,
    #[serde(rename = "K")]
    pub k_bound: f64,
    pub delta: f64,
    /// `L log2(2N)`: log2 of the realization count bound `(2N)^L`.
    pub realizations_log2: f64,
    /// `2 log2(sK^2/delta) log2(2N) s K^2 / rho^2`.
    pub covering_log_bound: f64,
    /// Targets not covered within the attempt cap.
    pub failures: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub passed: bool,
    pub failures: Vec<(usize, String)>,
    pub max_width: f64,
    pub max_exceptions: usize,
}

/// `<X_i, x>` as the measurement `sum_j X_ij x_j`.
fn pairing(row: &[C64], x: &[C64]) -> C64 {
    row.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Exception set and width of `x` against the rows at level `rho`.
fn exceptions(rows: &[Vec<C64>], diff: &[C64], rho: f64) -> (Vec<usize>, f64) {
    let mut out = Vec::new();
    let mut width = 0.0f64;
    for (i, row) in rows.iter().enumerate() {
        let v = pairing(row, diff).norm();
        if v > rho {
            out.push(i);
        } else {
            width = width.max(v);
        }
    }
    (out, width)
}

/// Vertex `v = 4j + k` of `V`: `k` = 0, 1, 2, 3 for `+e_j`, `-e_j`, `+i e_j`,
/// `-i e_j`, all times `sqrt(s)`.
fn vertex_value(v: usize, sqrt_s: f64) -> (usize, C64) {
    let unit = match v % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(-1.0, 0.0),
        2 => C64::new(0.0, 1.0),
        _ => C64::new(0.0, -1.0),
    };
    (v / 4, unit * sqrt_s)
}

/// Convex weights over `V` reproducing `f`; `None` if `f` is outside the hull.
fn convex_weights(f: &[C64], sqrt_s: f64) -> Option<Vec<(usize, f64)>> {
    let mut w = Vec::new();
    let mut mass = 0.0;
    for (j, z) in f.iter().enumerate() {
        for (k, part) in [(0, z.re), (2, z.im)] {
            if part != 0.0 {
                let v = 4 * j + k + usize::from(part < 0.0);
                let lam = part.abs() / sqrt_s;
                mass += lam;
                w.push((v, lam));
            }
        }
    }
    if mass > 1.0 + 1e-12 {
        return None;
    }
    let rest = (1.0 - mass).max(0.0);
    if rest > 0.0 {
        // Zero as the midpoint of +-sqrt(s) e_0.
        w.push((0, rest / 2.0));
        w.push((1, rest / 2.0));
    }
    Some(w)
}

/// `count` random targets in `conv V`: Gaussian entries on a random
/// support, rescaled so that `sum_j |Re f_j| + |Im f_j| = u sqrt(s)` with
/// `u` uniform on `(0, 1]`. Target `t` draws from `rng.child(t)`.
pub fn random_hull_targets(n: usize, s: usize, count: usize, rng: &RandomStream) -> Vec<Vec<C64>> {
    let sqrt_s = (s as f64).sqrt();
    (0..count)
        .map(|t| {
            let mut r = rng.child(t as u64);
            let k = 1 + r.index(n);
            let mut f = vec![C64::new(0.0, 0.0); n];
            for j in r.subset(n, k) {
                f[j] = r.complex_normal();
            }
            let mass: f64 = f.iter().map(|z| z.re.abs() + z.im.abs()).sum();
            let radius = sqrt_s * (1.0 - r.uniform());
            f.iter().map(|z| z * (radius / mass)).collect()
        })
        .collect()
}

/// Builds a weak cover of `targets` with Maurey's empirical method.
pub fn maurey_weak_cover(
    targets: &[Vec<C64>],
    rows: &[Vec<C64>],
    params: CoverParams,
    rng: &RandomStream,
) -> Result<WeakCover> {
    let CoverParams { s, rho, delta, k_bound } = params;
    if s == 0 {
        return Err(Error::arg("s must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Range { parameter: "delta", value: delta, interval: "(0, 1)".into() });
    }
    if !(rho > 0.0) {
        return Err(Error::Range { parameter: "rho", value: rho, interval: "(0, inf)".into() });
    }
    let m = rows.len();
    if m == 0 {
        return Err(Error::dim("no sample vectors"));
    }
    let n = rows[0].len();
    if n == 0 || rows.iter().any(|r| r.len() != n) || targets.iter().any(|t| t.len() != n) {
        return Err(Error::dim("sample vectors and targets must share one length N >= 1"));
    }
    let k = match k_bound {
        Some(k) => k,
        None => rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max),
    };
    if !(k > 0.0) {
        return Err(Error::arg("coordinate bound K must be positive"));
    }
    let sf = s as f64;
    let sk2 = sf * k * k;
    let lg = (sk2 / delta).log2();
    if !(lg > 0.0) {
        return Err(Error::arg("need s K^2 / delta > 1"));
    }
    let l = ((sk2 * (sk2 * lg / delta).log2()) / (rho * rho)).floor().max(1.0) as usize;
    let m_cap = 4.0 * delta * m as f64 / (sk2 * lg);
    let sqrt_s = sf.sqrt();

    let mut net_points: Vec<Vec<C64>> = Vec::new();
    let mut index: BTreeMap<Vec<(usize, u32)>, usize> = BTreeMap::new();
    let mut per_target = Vec::with_capacity(targets.len());
    let mut failures = Vec::new();
    for (t, f) in targets.iter().enumerate() {
        let weights = convex_weights(f, sqrt_s).ok_or_else(|| {
            Error::arg(format!(
                "target {t} is not a convex combination of +-sqrt(s) e_j, +-i sqrt(s) e_j (needs sum |Re| + |Im| <= sqrt(s))"
            ))
        })?;
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &(_, w) in &weights {
            acc += w;
            cumulative.push(acc);
        }
        let mut best: Option<(Vec<(usize, u32)>, Vec<C64>, Vec<usize>, f64)> = None;
        let mut attempts = 0;
        let stream = rng.child(t as u64);
        while attempts < MAX_ATTEMPTS {
            let mut r = stream.child(attempts as u64);
            attempts += 1;
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for _ in 0..l {
                *counts.entry(weights[r.categorical(&cumulative)].0).or_insert(0) += 1;
            }
            let key: Vec<(usize, u32)> = counts.into_iter().collect();
            let mut x = vec![C64::new(0.0, 0.0); n];
            for &(v, c) in &key {
                let (j, val) = vertex_value(v, sqrt_s);
                x[j] += val * (c as f64 / l as f64);
            }
            let diff: Vec<C64> = f.iter().zip(&x).map(|(a, b)| a - b).collect();
            let (exc, width) = exceptions(rows, &diff, rho);
            let ok = exc.len() as f64 <= m_cap;
            let better = best.as_ref().map_or(true, |b| exc.len() < b.2.len());
            if better {
                best = Some((key, x, exc, width));
            }
            if ok {
                break;
            }
        }
        let (key, x, exc, width) = best.expect("at least one attempt");
        let covered = exc.len() as f64 <= m_cap;
        if !covered {
            failures.push(t);
        }
        let net_index = *index.entry(key).or_insert_with(|| {
            net_points.push(x);
            net_points.len() - 1
        });
        per_target.push(TargetCover { target: t, net_index, exceptions: exc, width, attempts, covered });
    }
    let log2_2n = (2.0 * n as f64).log2();
    Ok(WeakCover {
        net_points,
        per_target,
        rho,
        m_cap,
        l,
        s,
        k_bound: k,
        delta,
        realizations_log2: l as f64 * log2_2n,
        covering_log_bound: 2.0 * lg * log2_2n * sk2 / (rho * rho),
        failures,
    })
}

/// Recomputes every exception set and width of `cover` from scratch.
pub fn verify_weak_cover(cover: &WeakCover, targets: &[Vec<C64>], rows: &[Vec<C64>]) -> CoverCheck {
    let mut failures = Vec::new();
    let mut max_width = 0.0f64;
    let mut max_exceptions = 0;
    if cover.per_target.len() != targets.len() {
        failures.push((
            usize::MAX,
            format!("cover lists {} targets, {} given", cover.per_target.len(), targets.len()),
        ));
    }
    for (t, f) in targets.iter().enumerate() {
        let Some(entry) = cover.per_target.iter().find(|e| e.target == t) else {
            failures.push((t, "target missing from cover".into()));
            continue;
        };
        let Some(x) = cover.net_points.get(entry.net_index) else {
            failures.push((t, format!("net index {} out of range", entry.net_index)));
            continue;
        };
        if x.len() != f.len() || rows.iter().any(|r| r.len() != f.len()) {
            failures.push((t, "dimension mismatch".into()));
            continue;
        }
        let diff: Vec<C64> = f.iter().zip(x).map(|(a, b)| a - b).collect();
        let mut width = 0.0f64;
        for (i, row) in rows.iter().enumerate() {
            if entry.exceptions.binary_search(&i).is_err() {
                width = width.max(pairing(row, &diff).norm());
            }
        }
        max_width = max_width.max(width);
        max_exceptions = max_exceptions.max(entry.exceptions.len());
        if entry.exceptions.len() as f64 > cover.m_cap {
            failures.push((
                t,
                format!("target {t}: {} exceptions exceed M_cap = {}", entry.exceptions.len(), cover.m_cap),
            ));
        }
        if entry.exceptions.iter().any(|&i| i >= rows.len()) {
            failures.push((t, format!("target {t}: exception index out of range")));
        }
        if width > cover.rho {
            failures.push((t, format!("target {t}: width {width} exceeds rho = {}", cover.rho)));
        }
    }
    CoverCheck { passed: failures.is_empty(), failures, max_width, max_exceptions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: usize, n: usize, seed: u64) -> Vec<Vec<C64>> {
        let mut r = RandomStream::new(seed, 0);
        (0..m)
            .map(|_| {
                let w = r.uniform();
                (0..n)
                    .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * w * j as f64))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn vertex_target_is_exact() {
        let x = rows(20, 6, 1);
        let mut f = vec![C64::new(0.0, 0.0); 6];
        f[1] = C64::new(2.0, 0.0);
        let p = CoverParams { s: 4, rho: 1.0, delta: 0.25, k_bound: None };
        let c = maurey_weak_cover(&[f.clone()], &x, p, &RandomStream::new(0, 0)).unwrap();
        assert_eq!(c.net_points[0], f);
        assert!(c.per_target[0].exceptions.is_empty());
        assert!(verify_weak_cover(&c, &[f], &x).passed);
    }

    #[test]
    fn weights_reproduce_target() {
        let f = vec![C64::new(0.3, -0.2), C64::new(0.0, 0.5), C64::new(-0.1, 0.0)];
        let w = convex_weights(&f, 2.0).unwrap();
        assert!((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-15);
        let mut back = vec![C64::new(0.0, 0.0); 3];
        for (v, lam) in w {
            let (j, val) = vertex_value(v, 2.0);
            back[j] += val * lam;
        }
        for (a, b) in back.iter().zip(&f) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn random_targets_cover_and_verify() {
        let x = rows(64, 16, 2);
        let targets = random_hull_targets(16, 4, 10, &RandomStream::new(4, 0));
        for t in &targets {
            assert!(convex_weights(t, 2.0).is_some());
        }
        let p = CoverParams { s: 4, rho: 1.0, delta: 0.25, k_bound: None };
        let c = maurey_weak_cover(&targets, &x, p, &RandomStream::new(5, 0)).unwrap();
        assert!(c.failures.is_empty());
        assert!(verify_weak_cover(&c, &targets, &x).passed);
    }

    #[test]
    fn outside_hull_is_rejected() {
        let f = vec![C64::new(1.5, 1.5)];
        let x = rows(4, 1, 0);
        let p = CoverParams { s: 4, rho: 1.0, delta: 0.25, k_bound: None };
        assert!(maurey_weak_cover(&[f], &x, p, &RandomStream::new(0, 0)).is_err());
    }
}
