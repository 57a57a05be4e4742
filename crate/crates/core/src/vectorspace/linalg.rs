//! Row reduction over `GF(p)` on digit vectors.

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u32);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// `row -= c * pivot_row` in place.
fn axpy(row: &mut [u8], c: u32, pivot_row: &[u8], p: u32) {
    if c == 0 {
        return;
    }
    for (r, &q) in row.iter_mut().zip(pivot_row) {
        *r = ((*r as u32 + p * p - c * q as u32) % p) as u8;
    }
}

fn normalize(row: &mut [u8], col: usize, p: u32) {
    let inv = inv_mod(row[col] as u32, p);
    for r in row.iter_mut() {
        *r = (*r as u32 * inv % p) as u8;
    }
}

/// Canonical reduced echelon basis with pivots taken at the highest nonzero
/// coordinate of each row.
///
/// Returns `(rows, pivots)` sorted by ascending pivot. Every row is zero above
/// its pivot, has a 1 at its pivot and is zero at every other row's pivot.
/// With this convention reducing a vector against the basis yields the
/// minimal flat index in its coset.
pub(crate) fn rref_high_pivot(mut rows: Vec<Vec<u8>>, p: u32, n: usize) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut done: Vec<(usize, Vec<u8>)> = Vec::new();
    for col in (0..n).rev() {
        let Some(pos) = rows.iter().position(|r| r[col] != 0) else {
            continue;
        };
        let mut pivot_row = rows.swap_remove(pos);
        normalize(&mut pivot_row, col, p);
        for r in rows.iter_mut() {
            let c = r[col] as u32;
            axpy(r, c, &pivot_row, p);
        }
        for (_, r) in done.iter_mut() {
            let c = r[col] as u32;
            axpy(r, c, &pivot_row, p);
        }
        done.push((col, pivot_row));
    }
    done.sort_by_key(|(c, _)| *c);
    let pivots = done.iter().map(|(c, _)| *c).collect();
    (done.into_iter().map(|(_, r)| r).collect(), pivots)
}

/// Basis of `{c in GF(p)^cols : M c = 0}` for the matrix given by `rows`.
pub(crate) fn nullspace(rows: Vec<Vec<u8>>, p: u32, cols: usize) -> Vec<Vec<u8>> {
    let (reduced, pivots) = rref_high_pivot(rows, p, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; cols];
            v[f] = 1;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                // row[pc] = 1 and row is zero at other pivots: v[pc] = -row[f]
                v[pc] = ((p - row[f] as u32) % p) as u8;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        for p in [3u32, 5, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn nullspace_is_annihilated() {
        let p = 5;
        let m = vec![vec![1u8, 2, 3, 4], vec![0, 1, 1, 0]];
        let ns = nullspace(m.clone(), p, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &m {
                let dot: u32 = r.iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
                assert_eq!(dot % p, 0);
            }
        }
    }
}
