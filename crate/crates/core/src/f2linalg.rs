//! Incremental linear systems over 𝔽₂ on packed bit rows.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Added,
    Redundant,
    Conflict,
}

/// Rows are kept fully reduced; the pivot of a row is its highest variable,
/// so setting all free variables to 0 gives the lexicographically smallest
/// solution (variable 0 most significant).
#[derive(Clone, Debug)]
pub struct F2System {
    nvars: usize,
    words: usize,
    rows: Vec<(Vec<u64>, bool)>,
    pivot_row: Vec<Option<usize>>,
}

impl F2System {
    pub fn new(nvars: usize) -> Self {
        let words = nvars.div_ceil(64).max(1);
        F2System { nvars, words, rows: Vec::new(), pivot_row: vec![None; nvars] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn row_from(&self, vars: &[usize]) -> Vec<u64> {
        let mut r = vec![0u64; self.words];
        for &v in vars {
            r[v / 64] ^= 1 << (v % 64);
        }
        r
    }

    fn reduce(&self, row: &mut [u64], rhs: &mut bool) {
        for w in (0..self.words).rev() {
            loop {
                let bits = row[w];
                if bits == 0 {
                    break;
                }
                // walk set bits from the top; stop at the first non-pivot
                let mut rest = bits;
                let mut hit = None;
                while rest != 0 {
                    let b = 63 - rest.leading_zeros() as usize;
                    let v = w * 64 + b;
                    if let Some(r) = self.pivot_row[v] {
                        hit = Some(r);
                        break;
                    }
                    rest &= !(1u64 << b);
                }
                match hit {
                    Some(r) => {
                        let (pr, prhs) = &self.rows[r];
                        for (a, b) in row.iter_mut().zip(pr) {
                            *a ^= b;
                        }
                        *rhs ^= prhs;
                    }
                    None => break,
                }
            }
        }
    }

    /// Whether the equation `Σ vars = rhs` is implied, new, or contradictory.
    pub fn check(&self, vars: &[usize], rhs: bool) -> Outcome {
        let mut row = self.row_from(vars);
        let mut r = rhs;
        self.reduce(&mut row, &mut r);
        if row.iter().all(|&w| w == 0) {
            if r {
                Outcome::Conflict
            } else {
                Outcome::Redundant
            }
        } else {
            Outcome::Added
        }
    }

    /// Adds `Σ vars = rhs` unless it contradicts the system.
    pub fn add(&mut self, vars: &[usize], rhs: bool) -> Outcome {
        let row = self.row_from(vars);
        self.add_row(row, rhs)
    }

    pub fn add_row(&mut self, mut row: Vec<u64>, mut rhs: bool) -> Outcome {
        self.reduce(&mut row, &mut rhs);
        let top = (0..self.words).rev().find(|&w| row[w] != 0);
        let Some(w) = top else {
            return if rhs { Outcome::Conflict } else { Outcome::Redundant };
        };
        let p = w * 64 + 63 - row[w].leading_zeros() as usize;
        let bit = 1u64 << (p % 64);
        for (r, r_rhs) in self.rows.iter_mut() {
            if r[p / 64] & bit != 0 {
                for (a, b) in r.iter_mut().zip(&row) {
                    *a ^= b;
                }
                *r_rhs ^= rhs;
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push((row, rhs));
        Outcome::Added
    }

    pub fn is_determined(&self, v: usize) -> bool {
        self.pivot_row[v].is_some()
    }

    /// The lexicographically smallest solution.
    pub fn solve_lexmin(&self) -> Vec<bool> {
        let mut x = vec![false; self.nvars];
        for v in 0..self.nvars {
            if let Some(r) = self.pivot_row[v] {
                let (row, rhs) = &self.rows[r];
                let mut val = *rhs;
                for u in 0..v {
                    if x[u] && row[u / 64] >> (u % 64) & 1 == 1 {
                        val ^= true;
                    }
                }
                x[v] = val;
            }
        }
        x
    }
}
