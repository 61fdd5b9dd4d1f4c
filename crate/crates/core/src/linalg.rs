//! Dense linear algebra over `F_p` on small matrices of residues.

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod(a, p - 2, p)
}

/// Null space of `matrix` (rows of equal length, entries in `[0, p)`), as a
/// list of basis vectors of length `cols`.
pub(crate) fn null_space(matrix: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = matrix.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(found) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, found);
        let inv = inv_mod(m[row][col], p);
        for v in m[row].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..cols {
                    m[r][c] = (m[r][c] + (p - f) * m[row][c]) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][fc]) % p;
            }
            v
        })
        .collect()
}

/// An incrementally built row-echelon basis, used to test linear
/// independence of vectors over `F_p`.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub(crate) fn new(p: u64) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let p = self.p;
        for (pc, row) in &self.rows {
            let f = v[*pc];
            if f != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - f) * r) % p;
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current rows; reports whether it was.
    pub(crate) fn insert(&mut self, v: Vec<u64>) -> bool {
        let mut v = self.reduce(v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[pc], self.p);
        for x in v.iter_mut() {
            *x = *x * inv % self.p;
        }
        // keep earlier rows reduced against the new pivot
        for (_, row) in self.rows.iter_mut() {
            let f = row[pc];
            if f != 0 {
                for (x, &r) in row.iter_mut().zip(&v) {
                    *x = (*x + (self.p - f) * r) % self.p;
                }
            }
        }
        self.rows.push((pc, v));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_small_matrix() {
        // x + y + z = 0 over F_3: a 2-dimensional kernel
        let ker = null_space(&[vec![1, 1, 1]], 3, 3);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert_eq!(v.iter().sum::<u64>() % 3, 0);
        }
        assert!(null_space(&[vec![1, 0], vec![0, 1]], 2, 5).is_empty());
    }

    #[test]
    fn echelon_rank() {
        let mut e = Echelon::new(2);
        assert!(e.insert(vec![1, 1, 0]));
        assert!(e.insert(vec![0, 1, 1]));
        assert!(!e.insert(vec![1, 0, 1]));
        assert!(!e.insert(vec![0, 0, 0]));
        assert_eq!(e.rows.len(), 2);
    }
}
