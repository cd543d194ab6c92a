//! Exact Gauss-Jordan elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

pub(crate) struct Solution {
    /// A particular solution with free variables set to zero.
    pub values: Vec<Rational>,
    pub rank: usize,
}

/// Solves `matrix * x = rhs`; `None` when the system is inconsistent.
pub(crate) fn solve(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>, ncols: usize) -> Option<Solution> {
    debug_assert_eq!(matrix.len(), rhs.len());
    let mut rows: Vec<Vec<Rational>> = matrix
        .into_iter()
        .zip(rhs)
        .map(|(mut r, b)| {
            debug_assert_eq!(r.len(), ncols);
            r.push(b);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        let Some(p) = (top..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(top, p);
        let inv = rows[top][col].recip();
        for x in rows[top][col..].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[top].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == top || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..=ncols {
                if !pivot_row[c].is_zero() {
                    row[c] -= &pivot_row[c] * &f;
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    if rows[top..].iter().any(|r| !r[ncols].is_zero()) {
        return None;
    }
    let mut values = vec![Rational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        values[c] = rows[r][ncols].clone();
    }
    Some(Solution {
        values,
        rank: pivots.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn unique_solution() {
        let s = solve(m(&[&[2, 1], &[1, 3]]), vec![int(3), int(4)], 2).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(s.values, vec![int(1), int(1)]);
        let s = solve(m(&[&[2, 0], &[0, 3]]), vec![int(1), int(1)], 2).unwrap();
        assert_eq!(s.values, vec![ratio(1, 2), ratio(1, 3)]);
    }

    #[test]
    fn inconsistent_and_underdetermined() {
        assert!(solve(m(&[&[1, 1], &[2, 2]]), vec![int(1), int(3)], 2).is_none());
        let s = solve(m(&[&[1, 1], &[2, 2]]), vec![int(1), int(2)], 2).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.values, vec![int(1), int(0)]);
    }
}
