//! Small dense linear algebra used by the QP and centering kernels: LU with
//! partial pivoting and a symmetric-matrix helper. Systems here are tiny KKT
//! blocks (working-set size), so no blocking or sparsity is attempted.

use super::LpError;

/// Solve `A x = b` in place via LU with partial pivoting. `a` is row-major
/// `n x n` and is destroyed.
pub fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Result<(), LpError> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best < 1e-12 {
            return Err(LpError::NumericalBreakdown(
                "singular matrix in dense solve".into(),
            ));
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        let d = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                b[i] -= f * b[k];
            }
            a[i * n + k] = 0.0;
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i * n + j] * b[j];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(())
}

/// Rank check by LU with partial pivoting: returns true if the `k x n`
/// row-major matrix (k <= n) has full row rank.
pub fn rows_independent(rows: &[f64], k: usize, n: usize) -> bool {
    if k == 0 {
        return true;
    }
    if k > n {
        return false;
    }
    let mut a = rows.to_vec();
    for step in 0..k {
        // Find the largest remaining entry in rows step..k.
        let mut bi = step;
        let mut bj = 0;
        let mut best = 0.0;
        for i in step..k {
            for j in 0..n {
                let v = a[i * n + j].abs();
                if v > best {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if best < 1e-9 {
            return false;
        }
        if bi != step {
            for j in 0..n {
                a.swap(step * n + j, bi * n + j);
            }
        }
        let d = a[step * n + bj];
        for i in step + 1..k {
            let f = a[i * n + bj] / d;
            if f != 0.0 {
                for j in 0..n {
                    a[i * n + j] -= f * a[step * n + j];
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = vec![2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let mut b = vec![8.0, -11.0, -3.0];
        lu_solve(&mut a, &mut b, 3).unwrap();
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] - 3.0).abs() < 1e-12);
        assert!((b[2] - -1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(lu_solve(&mut a, &mut b, 2).is_err());
    }

    #[test]
    fn rank_detection() {
        let rows = vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        assert!(rows_independent(&rows, 2, 3));
        let dep = vec![1.0, 1.0, 0.0, 2.0, 2.0, 0.0];
        assert!(!rows_independent(&dep, 2, 3));
    }
}
