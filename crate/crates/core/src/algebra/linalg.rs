//! Exact dense linear algebra over the coefficient field — enough for the
//! directrix computation (nullspaces of derivative matrices) and the small
//! linear systems that appear when matching leading-form coefficients.

use super::coeff::{Field, K};
use crate::Result;

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row, top to bottom.
pub fn rref(mat: &mut Vec<Vec<K>>) -> Result<Vec<usize>> {
    let rows = mat.len();
    if rows == 0 {
        return Ok(vec![]);
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, pr);
        let inv = mat[r][c].inv()?;
        for j in c..cols {
            mat[r][j] = mat[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let factor = mat[i][c].clone();
                for j in c..cols {
                    let t = mat[i][j].sub(&factor.mul(&mat[r][j]));
                    mat[i][j] = t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    Ok(pivots)
}

pub fn rank(mut mat: Vec<Vec<K>>) -> Result<usize> {
    Ok(rref(&mut mat)?.len())
}

/// A basis of the right nullspace { v : M v = 0 }.
pub fn nullspace(field: &Field, mut mat: Vec<Vec<K>>, cols: usize) -> Result<Vec<Vec<K>>> {
    let pivots = rref(&mut mat)?;
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); cols];
        v[free] = field.one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = mat[row][free].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// One solution of M x = b if the system is consistent.
pub fn solve(field: &Field, mat: &[Vec<K>], b: &[K]) -> Result<Option<Vec<K>>> {
    let cols = mat.first().map(|r| r.len()).unwrap_or(0);
    let mut aug: Vec<Vec<K>> = mat
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug)?;
    if pivots.contains(&cols) {
        return Ok(None); // pivot in the constant column: inconsistent
    }
    let mut x = vec![field.zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;

    fn qm(rows: &[&[i64]]) -> Vec<Vec<K>> {
        rows.iter()
            .map(|r| r.iter().map(|&c| Field::Q.from_i64(c)).collect())
            .collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(m.clone()).unwrap(), 2);
        let ns = nullspace(&Field::Q, m.clone(), 3).unwrap();
        assert_eq!(ns.len(), 1);
        // Check M v = 0.
        for row in &m {
            let mut acc = Field::Q.zero();
            for (a, v) in row.iter().zip(ns[0].iter()) {
                acc = acc.add(&a.mul(v));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = qm(&[&[1, 1], &[1, -1]]);
        let b = vec![Field::Q.from_i64(3), Field::Q.from_i64(1)];
        let x = solve(&Field::Q, &m, &b).unwrap().unwrap();
        assert_eq!(x[0], Field::Q.from_i64(2));
        assert_eq!(x[1], Field::Q.from_i64(1));
        let m2 = qm(&[&[1, 1], &[2, 2]]);
        let b2 = vec![Field::Q.from_i64(1), Field::Q.from_i64(3)];
        assert!(solve(&Field::Q, &m2, &b2).unwrap().is_none());
    }

    #[test]
    fn nullspace_char_2() {
        let f2 = Field::Fq(FqField::prime(2).unwrap());
        // x + y = 0 over F_2 has nullspace spanned by (1,1).
        let m = vec![vec![f2.one(), f2.one()]];
        let ns = nullspace(&f2, m, 2).unwrap();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![f2.one(), f2.one()]);
    }
}
