//! Offline simulated-annealing search for covering arrays CA(N; t, k, v).
//!
//! Usage: ca_anneal t k v N [n_seeds] [iters]
//! Prints the found array (header + digit rows) to stdout, or exits 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Instance {
    t: usize,
    k: usize,
    v: usize,
    col_sets: Vec<Vec<usize>>,
    by_col: Vec<Vec<usize>>,
}

impl Instance {
    fn new(t: usize, k: usize, v: usize) -> Self {
        let mut col_sets = Vec::new();
        let mut idx = (0..t).collect::<Vec<usize>>();
        loop {
            col_sets.push(idx.clone());
            let mut i = t;
            while i > 0 && idx[i - 1] == i - 1 + k - t {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..t {
                idx[j] = idx[j - 1] + 1;
            }
        }
        let mut by_col = vec![Vec::new(); k];
        for (ci, cs) in col_sets.iter().enumerate() {
            for &c in cs {
                by_col[c].push(ci);
            }
        }
        Instance { t, k, v, col_sets, by_col }
    }

    fn tuple_index(&self, rows: &[Vec<u8>], r: usize, ci: usize) -> usize {
        self.col_sets[ci]
            .iter()
            .fold(0usize, |acc, &c| acc * self.v + rows[r][c] as usize)
    }

    fn anneal(&self, n: usize, seed: u64, iters: u64) -> Option<Vec<Vec<u8>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tuples = self.v.pow(self.t as u32);
        let mut rows: Vec<Vec<u8>> =
            (0..n).map(|_| (0..self.k).map(|_| rng.gen_range(0..self.v as u8)).collect()).collect();
        // counts[ci][tuple] = how many rows show the tuple
        let mut counts = vec![vec![0u16; tuples]; self.col_sets.len()];
        let mut missing: i64 = (self.col_sets.len() * tuples) as i64;
        for r in 0..n {
            for ci in 0..self.col_sets.len() {
                let ti = self.tuple_index(&rows, r, ci);
                if counts[ci][ti] == 0 {
                    missing -= 1;
                }
                counts[ci][ti] += 1;
            }
        }
        let mut temp = 1.5f64;
        for _ in 0..iters {
            if missing == 0 {
                return Some(rows);
            }
            let r = rng.gen_range(0..n);
            let c = rng.gen_range(0..self.k);
            let old = rows[r][c];
            let mut new = rng.gen_range(0..self.v as u8 - 1);
            if new >= old {
                new += 1;
            }
            // remove old tuples, add new, tracking delta
            let mut delta: i64 = 0;
            for &ci in &self.by_col[c] {
                let ti = self.tuple_index(&rows, r, ci);
                counts[ci][ti] -= 1;
                if counts[ci][ti] == 0 {
                    delta += 1;
                }
            }
            rows[r][c] = new;
            for &ci in &self.by_col[c] {
                let ti = self.tuple_index(&rows, r, ci);
                if counts[ci][ti] == 0 {
                    delta -= 1;
                }
                counts[ci][ti] += 1;
            }
            let accept = delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / temp.max(1e-9)).exp();
            if !accept {
                // revert
                for &ci in &self.by_col[c] {
                    let ti = self.tuple_index(&rows, r, ci);
                    counts[ci][ti] -= 1;
                }
                rows[r][c] = old;
                for &ci in &self.by_col[c] {
                    let ti = self.tuple_index(&rows, r, ci);
                    counts[ci][ti] += 1;
                }
            } else {
                missing += delta;
            }
            temp = (temp * 0.999_999_5).max(0.02);
        }
        None
    }

    fn verify(&self, rows: &[Vec<u8>]) -> bool {
        let tuples = self.v.pow(self.t as u32);
        for ci in 0..self.col_sets.len() {
            let mut seen = vec![false; tuples];
            for r in 0..rows.len() {
                seen[self.tuple_index(rows, r, ci)] = true;
            }
            if seen.iter().any(|&s| !s) {
                return false;
            }
        }
        true
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let t: usize = args[1].parse().unwrap();
    let k: usize = args[2].parse().unwrap();
    let v: usize = args[3].parse().unwrap();
    let n: usize = args[4].parse().unwrap();
    let n_seeds: u64 = args.get(5).map_or(64, |s| s.parse().unwrap());
    let iters: u64 = args.get(6).map_or(200_000_000, |s| s.parse().unwrap());

    let inst = Instance::new(t, k, v);
    eprintln!("CA({n}; {t}, {k}, {v}): {} column sets, {n_seeds} seeds", inst.col_sets.len());
    let found = (0..n_seeds).into_par_iter().find_map_any(|seed| {
        inst.anneal(n, 0xC0FFEE ^ seed.wrapping_mul(0x9E3779B97F4A7C15), iters)
    });
    match found {
        Some(rows) => {
            assert!(inst.verify(&rows), "verification failed");
            println!("{t} {k} {v} {n}");
            for row in rows {
                println!("{}", row.iter().map(|s| (b'0' + s) as char).collect::<String>());
            }
        }
        None => std::process::exit(1),
    }
}
