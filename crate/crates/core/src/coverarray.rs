//! Covering arrays for strengths 2 and 3 over binary and ternary alphabets.
//!
//! A covering array CA(N; t, k, v) is an N×k matrix over {0, …, v−1} in
//! which every t columns exhibit all v^t tuples.  Construction prefers
//! provably optimal constructions (Kleitman-Spencer for t = 2, v = 2;
//! orthogonal arrays and the even-parity code for small k), then embedded
//! arrays found by offline search, then Roux doubling for binary strength
//! 3, and finally a deterministic density-greedy fallback.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod tables;

/// Covering array with parameters (t, k, v) and N rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringArray {
    pub t: usize,
    pub k: usize,
    pub v: usize,
    pub rows: Vec<Vec<u8>>,
}

/// Report of a tuple absent from some column selection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingTuple {
    pub columns: Vec<usize>,
    pub tuple: Vec<u8>,
}

impl fmt::Display for MissingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "columns {:?} never show tuple {:?}", self.columns, self.tuple)
    }
}

impl CoveringArray {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Exhaustively check the covering property over all C(k,t)·v^t
    /// tuples; reports the first missing tuple on failure.
    pub fn verify(&self) -> std::result::Result<(), MissingTuple> {
        for row in &self.rows {
            assert_eq!(row.len(), self.k, "ragged covering array");
            assert!(row.iter().all(|&s| (s as usize) < self.v));
        }
        let mut cols = vec![0usize; self.t];
        self.verify_columns(&mut cols, 0, 0)
    }

    fn verify_columns(
        &self,
        cols: &mut Vec<usize>,
        depth: usize,
        start: usize,
    ) -> std::result::Result<(), MissingTuple> {
        if depth == self.t {
            let tuples = self.v.pow(self.t as u32);
            let mut seen = vec![false; tuples];
            for row in &self.rows {
                let mut idx = 0usize;
                for &c in cols.iter() {
                    idx = idx * self.v + row[c] as usize;
                }
                seen[idx] = true;
            }
            if let Some(missing) = seen.iter().position(|&s| !s) {
                let mut tuple = vec![0u8; self.t];
                let mut m = missing;
                for i in (0..self.t).rev() {
                    tuple[i] = (m % self.v) as u8;
                    m /= self.v;
                }
                return Err(MissingTuple { columns: cols.clone(), tuple });
            }
            return Ok(());
        }
        for c in start..self.k {
            cols[depth] = c;
            self.verify_columns(cols, depth + 1, c + 1)?;
        }
        Ok(())
    }

    /// Keep only the first `k` columns (column prefixes of covering arrays
    /// are covering arrays).
    fn truncate_columns(mut self, k: usize) -> Self {
        assert!(k <= self.k);
        for row in &mut self.rows {
            row.truncate(k);
        }
        self.k = k;
        self
    }
}

impl fmt::Display for CoveringArray {
    /// Text format: header `t k v N`, then one row of symbols per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {} {}", self.t, self.k, self.v, self.rows.len())?;
        for row in &self.rows {
            for &s in row {
                write!(f, "{s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for CoveringArray {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidConfig(format!("covering array text: {m}"));
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| bad("bad header")))
            .collect::<Result<_>>()?;
        let [t, k, v, n] = nums[..] else {
            return Err(bad("header must be 't k v N'"));
        };
        let rows: Vec<Vec<u8>> = lines
            .map(|l| {
                l.trim()
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .filter(|&d| (d as usize) < v)
                            .map(|d| d as u8)
                            .ok_or_else(|| bad("invalid symbol"))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.len() != n || rows.iter().any(|r| r.len() != k) {
            return Err(bad("dimension mismatch"));
        }
        Ok(CoveringArray { t, k, v, rows })
    }
}

/// Build a verified covering array for the supported parameter range
/// (t ∈ {2,3}, v ∈ {2,3}, t ≤ k).
pub fn construct(t: usize, k: usize, v: usize) -> Result<CoveringArray> {
    if !matches!((t, v), (1, 2) | (1, 3) | (2, 2) | (2, 3) | (3, 2) | (3, 3)) || k < t {
        return Err(Error::UnsupportedCoveringArray { t, k, v });
    }
    let ca = construct_unverified(t, k, v)?;
    debug_assert_eq!((ca.t, ca.k, ca.v), (t, k, v));
    if let Err(missing) = ca.verify() {
        panic!("internal construction for ({t},{k},{v}) failed verification: {missing}");
    }
    Ok(ca)
}

fn construct_unverified(t: usize, k: usize, v: usize) -> Result<CoveringArray> {
    match (t, v) {
        // strength 1: one constant row per symbol
        (1, _) => {
            let rows = (0..v as u8).map(|s| vec![s; k]).collect();
            return Ok(CoveringArray { t, k, v, rows });
        }
        (2, 2) => return Ok(kleitman_spencer(k)),
        (2, 3) if k <= 4 => return Ok(oa9().truncate_columns(k)),
        (3, 2) if k <= 4 => return Ok(even_parity8(k.max(3)).truncate_columns(k)),
        (3, 3) if k <= 4 => return Ok(oa27().truncate_columns(k)),
        _ => {}
    }
    if let Some(ca) = tables::lookup(t, k, v) {
        return Ok(ca.truncate_columns(k));
    }
    if (t, v) == (3, 2) && k > 4 {
        // Roux doubling: CA(3,2m,2) from CA(3,m,2) stacked over CA(2,m,2)
        // with complemented copy
        let m = k.div_ceil(2);
        if m < k {
            let a = construct_unverified(3, m, 2)?;
            let b = construct_unverified(2, m, 2)?;
            let mut rows: Vec<Vec<u8>> = a
                .rows
                .iter()
                .map(|r| r.iter().chain(r.iter()).copied().collect())
                .collect();
            rows.extend(b.rows.iter().map(|r| {
                r.iter().copied().chain(r.iter().map(|&s| 1 - s)).collect::<Vec<u8>>()
            }));
            let doubled = CoveringArray { t: 3, k: 2 * m, v: 2, rows };
            return Ok(doubled.truncate_columns(k));
        }
    }
    Ok(greedy_density(t, k, v))
}

/// Optimal CA(N; 2, k, 2): columns are the lexicographically first `k`
/// ⌈N/2⌉-subsets of an (N−1)-set, with an extra all-zero row index.
fn kleitman_spencer(k: usize) -> CoveringArray {
    assert!(k >= 2);
    let mut n = 4usize;
    loop {
        let m = n.div_ceil(2);
        if binomial(n - 1, m) >= k as u128 {
            break;
        }
        n += 1;
        assert!(n < 200, "kleitman_spencer: k too large");
    }
    let m = n.div_ceil(2);
    let mut rows = vec![vec![0u8; k]; n];
    for (col, subset) in subsets_lex(n - 1, m).take(k).enumerate() {
        for idx in subset {
            // subset elements index rows 1..N; row 0 stays all-zero
            rows[idx + 1][col] = 1;
        }
    }
    CoveringArray { t: 2, k, v: 2, rows }
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r.min(n - r) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic r-subsets of {0, …, n−1}.
fn subsets_lex(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = Some((0..r).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        if out.last().copied() == Some(n - 1) && out[0] == n - r {
            cur = None;
        } else {
            let mut next = out.clone();
            let mut i = r;
            loop {
                i -= 1;
                if next[i] != i + n - r {
                    break;
                }
            }
            next[i] += 1;
            for j in i + 1..r {
                next[j] = next[j - 1] + 1;
            }
            cur = Some(next);
        }
        Some(out)
    })
}

/// Orthogonal array OA(9; 2, 4, 3): rows (i, j, i+j, i+2j) mod 3.
fn oa9() -> CoveringArray {
    let rows = (0..3u8)
        .flat_map(|i| (0..3u8).map(move |j| vec![i, j, (i + j) % 3, (i + 2 * j) % 3]))
        .collect();
    CoveringArray { t: 2, k: 4, v: 3, rows }
}

/// Orthogonal array OA(27; 3, 4, 3): rows (a, b, c, a+b+c) mod 3.
fn oa27() -> CoveringArray {
    let mut rows = Vec::with_capacity(27);
    for a in 0..3u8 {
        for b in 0..3u8 {
            for c in 0..3u8 {
                rows.push(vec![a, b, c, (a + b + c) % 3]);
            }
        }
    }
    CoveringArray { t: 3, k: 4, v: 3, rows }
}

/// CA(8; 3, 4, 2): the even-weight vectors of F₂⁴.
fn even_parity8(k: usize) -> CoveringArray {
    assert!((3..=4).contains(&k));
    let rows = (0..16u8)
        .filter(|x| x.count_ones() % 2 == 0)
        .map(|x| (0..4).map(|b| x >> b & 1).collect())
        .collect();
    CoveringArray { t: 3, k: 4, v: 2, rows }
}

/// Deterministic density-greedy fallback: grow one row at a time, seeding
/// each row with the first uncovered tuple and filling remaining columns
/// to maximize newly covered tuples.
fn greedy_density(t: usize, k: usize, v: usize) -> CoveringArray {
    let col_sets: Vec<Vec<usize>> = subsets_lex(k, t).collect();
    let tuples_per_set = v.pow(t as u32);
    let mut covered = vec![vec![false; tuples_per_set]; col_sets.len()];
    let tuple_index = |row: &[u8], cols: &[usize]| -> usize {
        cols.iter().fold(0usize, |acc, &c| acc * v + row[c] as usize)
    };
    let mut rows: Vec<Vec<u8>> = Vec::new();
    loop {
        // first uncovered (column set, tuple)
        let mut seed: Option<(usize, usize)> = None;
        'outer: for (si, cov) in covered.iter().enumerate() {
            for (ti, &c) in cov.iter().enumerate() {
                if !c {
                    seed = Some((si, ti));
                    break 'outer;
                }
            }
        }
        let Some((si, ti)) = seed else { break };
        let mut row = vec![u8::MAX; k];
        let mut m = ti;
        for &c in col_sets[si].iter().rev() {
            row[c] = (m % v) as u8;
            m /= v;
        }
        // fill remaining columns one at a time, best symbol by new coverage
        for c in 0..k {
            if row[c] != u8::MAX {
                continue;
            }
            let mut best = (0u8, -1i64);
            for s in 0..v as u8 {
                row[c] = s;
                let gain: i64 = col_sets
                    .iter()
                    .enumerate()
                    .filter(|(_, cols)| {
                        cols.contains(&c) && cols.iter().all(|&cc| row[cc] != u8::MAX)
                    })
                    .filter(|(sj, cols)| !covered[*sj][tuple_index(&row, cols)])
                    .count() as i64;
                if gain > best.1 {
                    best = (s, gain);
                }
            }
            row[c] = best.0;
        }
        for (sj, cols) in col_sets.iter().enumerate() {
            covered[sj][tuple_index(&row, cols)] = true;
        }
        rows.push(row);
    }
    CoveringArray { t, k, v, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Table of smallest known covering array sizes, k = 2..=20.
    pub const CAN_2K2: [usize; 19] =
        [4, 4, 5, 6, 6, 6, 6, 6, 6, 7, 7, 7, 7, 7, 8, 8, 8, 8, 8];
    pub const CAN_2K3: [usize; 19] =
        [9, 9, 9, 11, 12, 12, 13, 13, 14, 15, 15, 15, 15, 15, 15, 15, 15, 15, 15];
    pub const CAN_3K2: [usize; 18] =
        [8, 8, 10, 12, 12, 12, 12, 12, 12, 15, 16, 16, 17, 17, 18, 18, 18, 18];

    #[test]
    fn binary_strength_two_is_optimal() {
        for k in 2..=20 {
            let ca = construct(2, k, 2).unwrap();
            assert_eq!(ca.n_rows(), CAN_2K2[k - 2], "k = {k}");
            assert!(ca.verify().is_ok());
        }
    }

    #[test]
    fn construct_examples() {
        assert_eq!(construct(2, 4, 2).unwrap().n_rows(), 5);
        assert_eq!(construct(2, 10, 2).unwrap().n_rows(), 6);
        assert_eq!(construct(2, 2, 3).unwrap().n_rows(), 9);
        assert_eq!(construct(3, 4, 2).unwrap().n_rows(), 8);
        assert_eq!(construct(3, 3, 3).unwrap().n_rows(), 27);
    }

    #[test]
    fn ternary_strength_two_within_slack() {
        for k in 2..=20 {
            let ca = construct(2, k, 3).unwrap();
            assert!(ca.verify().is_ok());
            assert!(
                ca.n_rows() <= CAN_2K3[k - 2] + 2,
                "k = {k}: {} > {} + 2",
                ca.n_rows(),
                CAN_2K3[k - 2]
            );
        }
    }

    #[test]
    fn binary_strength_three_within_slack() {
        for k in 3..=20 {
            let ca = construct(3, k, 2).unwrap();
            assert!(ca.verify().is_ok());
            assert!(
                ca.n_rows() <= CAN_3K2[k - 3] + 2,
                "k = {k}: {} > {} + 2",
                ca.n_rows(),
                CAN_3K2[k - 3]
            );
        }
    }

    #[test]
    fn verify_detects_missing_tuples() {
        let good: CoveringArray = "2 3 2 4\n000\n011\n101\n110\n".parse().unwrap();
        assert!(good.verify().is_ok());
        let mut bad = good.clone();
        bad.t = 3;
        let missing = bad.verify().unwrap_err();
        assert_eq!(missing.columns, vec![0, 1, 2]);
        // dropping a row from a minimal array must break coverage
        let mut dropped = good;
        dropped.rows.pop();
        assert!(dropped.verify().is_err());
    }

    #[test]
    fn permutations_preserve_verification() {
        let ca = construct(2, 6, 3).unwrap();
        // row shuffle (reverse), column swap, symbol relabel
        let rows: Vec<Vec<u8>> = ca
            .rows
            .iter()
            .rev()
            .map(|r| {
                let mut r2: Vec<u8> = r.iter().map(|&s| (s + 1) % 3).collect();
                r2.swap(0, 5);
                r2
            })
            .collect();
        let permuted = CoveringArray { rows, ..ca };
        assert!(permuted.verify().is_ok());
    }

    #[test]
    fn text_round_trip() {
        let ca = construct(2, 5, 3).unwrap();
        let text = ca.to_string();
        let back: CoveringArray = text.parse().unwrap();
        assert_eq!(ca, back);
        assert!("2 3".parse::<CoveringArray>().is_err());
        assert!("2 2 2 1\n09\n".parse::<CoveringArray>().is_err());
    }

    #[test]
    fn unsupported_parameters_rejected() {
        assert!(matches!(
            construct(4, 5, 2),
            Err(Error::UnsupportedCoveringArray { .. })
        ));
        assert!(construct(2, 5, 4).is_err());
        assert!(construct(3, 2, 2).is_err());
    }

    #[test]
    fn greedy_fallback_terminates_and_verifies() {
        let ca = greedy_density(2, 22, 3);
        assert!(ca.verify().is_ok());
        let ca = construct(2, 25, 2).unwrap();
        assert!(ca.verify().is_ok());
    }
}
