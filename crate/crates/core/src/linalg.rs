//! Exact linear algebra over the rationals and the integers: reduced row
//! echelon solving, and Smith normal form with both transform matrices for
//! integer systems, ranks, and elementary divisors.

use crate::Rat;
use num::{BigInt, Integer, One, Signed, Zero};

/// Reduces `mat` to reduced row echelon form in place. Returns the pivot
/// column of each pivot row.
#[allow(clippy::needless_range_loop)] // index loops touch two rows of one matrix
pub fn rref(mat: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = mat[row][col].clone();
        for v in mat[row].iter_mut() {
            *v /= &inv;
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..cols {
                    let sub = &factor * &mat[row][c];
                    mat[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    pivots
}

/// Solves `A x = b` over the rationals. Returns the particular solution with
/// all free variables 0, or `None` when inconsistent.
pub fn solve_rational(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug[row][cols].clone();
    }
    Some(x)
}

pub fn rational_rank(a: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = a.to_vec();
    rref(&mut m).len()
}

/// Smith normal form `D = U A V` with unimodular `U`, `V`; `divisors` holds
/// the nonzero diagonal entries, each dividing the next.
///
/// Sized for the weight systems this crate produces: a handful of rows (one
/// per cyclic class), any number of columns, small entries. Intermediate
/// entries can swell exponentially in the rank, so dense square matrices
/// beyond ~5 rows of random data are out of scope.
pub struct Snf {
    pub d: Vec<Vec<BigInt>>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

#[allow(clippy::needless_range_loop)] // same: paired row/column operations
pub fn smith_normal_form(a: &[Vec<BigInt>]) -> Snf {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block into position (t, t)
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        if pj != t {
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
        }

        loop {
            let mut clean = true;
            for i in (t + 1)..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * &d[t][j];
                        d[i][j] -= sub;
                    }
                    for j in 0..rows {
                        let sub = &q * &u[t][j];
                        u[i][j] -= sub;
                    }
                }
                if !d[i][t].is_zero() {
                    // remainder is smaller than the pivot; swap it up
                    d.swap(t, i);
                    u.swap(t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let sub = &q * &d[i][t];
                        d[i][j] -= sub;
                    }
                    for i in 0..cols {
                        let sub = &q * &v[i][t];
                        v[i][j] -= sub;
                    }
                }
                if !d[t][j].is_zero() {
                    for row in d.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }

        // divisibility: fold any non-multiple into the pivot's column
        let mut redo = false;
        'scan: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !(&d[i][j] % &d[t][t]).is_zero() {
                    for c in 0..cols {
                        let add = d[i][c].clone();
                        d[t][c] += add;
                    }
                    for c in 0..rows {
                        let add = u[i][c].clone();
                        u[t][c] += add;
                    }
                    redo = true;
                    break 'scan;
                }
            }
        }
        if redo {
            continue;
        }

        if d[t][t].is_negative() {
            for j in 0..cols {
                d[t][j] = -d[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }

    let rank = t;
    let divisors = (0..rank).map(|i| d[i][i].clone()).collect();
    Snf {
        d,
        u,
        v,
        divisors,
        rank,
    }
}

/// Solves `A y = b` over the integers. Returns a particular solution and an
/// integral basis of the kernel, or `None` when no integer solution exists.
pub fn solve_integer(
    a: &[Vec<BigInt>],
    b: &[BigInt],
) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let snf = smith_normal_form(a);
    // c = U b
    let c: Vec<BigInt> = (0..rows)
        .map(|i| (0..rows).map(|j| &snf.u[i][j] * &b[j]).sum())
        .collect();
    let mut z = vec![BigInt::zero(); cols];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = ci.div_rem(&snf.divisors[i]);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    // y = V z
    let y: Vec<BigInt> = (0..cols)
        .map(|i| (0..cols).map(|j| &snf.v[i][j] * &z[j]).sum())
        .collect();
    let kernel: Vec<Vec<BigInt>> = (snf.rank..cols)
        .map(|k| (0..cols).map(|i| snf.v[i][k].clone()).collect())
        .collect();
    Some((y, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| bi(x)).collect()).collect()
    }

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rref_solves_a_square_system() {
        let a = vec![
            vec![ratio(2, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(-1, 1)],
        ];
        let b = vec![ratio(4, 1), ratio(-1, 1)];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![ratio(1, 1), ratio(2, 1)]);
    }

    #[test]
    fn inconsistent_system_returns_none() {
        let a = vec![vec![ratio(1, 1)], vec![ratio(1, 1)]];
        let b = vec![ratio(1, 1), ratio(2, 1)];
        assert!(solve_rational(&a, &b).is_none());
    }

    #[test]
    fn underdetermined_uses_zero_free_vars() {
        let a = vec![vec![ratio(1, 1), ratio(1, 1)]];
        let b = vec![ratio(3, 1)];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![ratio(3, 1), Rat::zero()]);
    }

    #[test]
    fn snf_reproduces_the_matrix() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let snf = smith_normal_form(&a);
        assert_eq!(mul(&mul(&snf.u, &a), &snf.v), snf.d);
        assert_eq!(snf.divisors, vec![bi(2), bi(2), bi(156)]);
        for i in 1..snf.divisors.len() {
            assert!((&snf.divisors[i] % &snf.divisors[i - 1]).is_zero());
        }
    }

    #[test]
    fn snf_rank_of_rank_deficient_matrix() {
        let a = mat(&[&[1, 2], &[2, 4], &[3, 6]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.rank, 1);
        assert_eq!(snf.divisors, vec![bi(1)]);
        assert_eq!(mul(&mul(&snf.u, &a), &snf.v), snf.d);
    }

    #[test]
    fn integer_solve_feasible() {
        let a = mat(&[&[2, 0], &[0, 3]]);
        let b = vec![bi(4), bi(9)];
        let (y, kernel) = solve_integer(&a, &b).unwrap();
        assert_eq!(y, vec![bi(2), bi(3)]);
        assert!(kernel.is_empty());
    }

    #[test]
    fn integer_solve_catches_divisibility_obstruction() {
        let a = mat(&[&[4]]);
        assert!(solve_integer(&a, &[bi(1)]).is_none());
        assert!(solve_integer(&a, &[bi(8)]).is_some());
    }

    #[test]
    fn integer_kernel_spans_solutions() {
        // x + y + z = 6 over Z: kernel rank 2
        let a = mat(&[&[1, 1, 1]]);
        let (y, kernel) = solve_integer(&a, &[bi(6)]).unwrap();
        assert_eq!(y.iter().sum::<BigInt>(), bi(6));
        assert_eq!(kernel.len(), 2);
        for k in &kernel {
            assert_eq!(k.iter().sum::<BigInt>(), bi(0));
        }
    }

    #[test]
    fn rational_rank_matches_snf_rank() {
        let a = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let rat_rows: Vec<Vec<Rat>> = a
            .iter()
            .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        assert_eq!(rational_rank(&rat_rows), 2);
        assert_eq!(smith_normal_form(&a).rank, 2);
    }
}
