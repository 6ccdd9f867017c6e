use crate::error::{Error, Result};

/// Largest number of supports any exhaustive scan may visit.
pub const ENUMERATION_CAP: u128 = 2_000_000;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Refuses scans above [`ENUMERATION_CAP`].
pub fn check_enumeration(count: u128, hint: &'static str) -> Result<()> {
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { count, cap: ENUMERATION_CAP, hint });
    }
    Ok(())
}

/// Lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let cur = self.current.as_mut().expect("checked above");
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for t in i + 1..k {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        for n in 0..9 {
            for k in 0..=n {
                assert_eq!(Combinations::new(n, k).count() as u128, binomial(n, k));
            }
        }
        assert_eq!(binomial(64, 3), 41_664);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn lexicographic_order() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
