//! Sparse LU factorization of the simplex basis with product-form updates.
//!
//! Left-looking factorization with partial pivoting; the symbolic step
//! uses depth-first reach on the L pattern so the cost is proportional
//! to the arithmetic actually performed. Basis changes are absorbed into
//! an eta file and the factorization is rebuilt once the file grows past
//! a threshold.

use super::sparse::CscMat;

const PIVOT_ZERO: f64 = 1e-11;
const DROP_TOL: f64 = 1e-13;

const NONE: usize = usize::MAX;

/// One product-form update: basis position `q` replaced, `w = B^-1 a`.
struct Eta {
    q: usize,
    wq: f64,
    entries: Vec<(usize, f64)>, // positions != q
}

pub struct Basis {
    m: usize,
    // pivot-space factors: L unit lower (entries i > k), U upper with diagonal
    l_cols: Vec<Vec<(usize, f64)>>,
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    perm: Vec<usize>, // pivot order -> original row
    pos: Vec<usize>,  // original row -> pivot order
    etas: Vec<Eta>,
    // scratch
    work: Vec<f64>,
    row_seen: Vec<u32>,
    pivot_seen: Vec<u32>,
    stamp: u32,
}

/// DFS over the L pattern collecting every pivot reachable from `start`.
/// Edges lead to strictly larger pivot indices, so sorting the result
/// yields a valid elimination order.
fn dfs_reach(
    l_cols: &[Vec<(usize, f64)>],
    pos: &[usize],
    pivot_seen: &mut [u32],
    stamp: u32,
    start: usize,
    reach: &mut Vec<usize>,
    stack: &mut Vec<(usize, usize)>,
) {
    stack.clear();
    pivot_seen[start] = stamp;
    stack.push((start, 0));
    while let Some((node, mut idx)) = stack.pop() {
        let col = &l_cols[node];
        let mut descended = false;
        while idx < col.len() {
            let r = col[idx].0;
            idx += 1;
            let p = pos[r];
            if p != NONE && pivot_seen[p] != stamp {
                pivot_seen[p] = stamp;
                stack.push((node, idx));
                stack.push((p, 0));
                descended = true;
                break;
            }
        }
        if !descended {
            reach.push(node);
        }
    }
}

impl Basis {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            l_cols: Vec::new(),
            u_cols: Vec::new(),
            u_diag: Vec::new(),
            perm: Vec::new(),
            pos: vec![NONE; m],
            etas: Vec::new(),
            work: vec![0.0; m],
            row_seen: vec![0; m],
            pivot_seen: vec![0; m],
            stamp: 0,
        }
    }

    pub fn num_etas(&self) -> usize {
        self.etas.len()
    }

    /// Rows that have not been assigned a pivot. Only meaningful right
    /// after a failed factorization, where it identifies the rows the
    /// dependent prefix of the basis does not cover.
    pub fn unpivoted_rows(&self) -> Vec<usize> {
        (0..self.m).filter(|&r| self.pos[r] == NONE).collect()
    }

    /// Factorizes the basis given by `basic` (column indices into `mat`).
    /// On failure reports the basis position of the first column that
    /// turned out to be linearly dependent on its predecessors, so the
    /// caller can repair the basis.
    pub fn factorize_inner(&mut self, mat: &CscMat, basic: &[usize]) -> Result<(), usize> {
        let m = self.m;
        debug_assert_eq!(basic.len(), m);
        self.l_cols.clear();
        self.u_cols.clear();
        self.u_diag.clear();
        self.perm.clear();
        self.etas.clear();
        self.pos.iter_mut().for_each(|p| *p = NONE);
        self.l_cols.reserve(m);
        self.u_cols.reserve(m);

        let mut touched: Vec<usize> = Vec::with_capacity(64);
        let mut reach: Vec<usize> = Vec::with_capacity(64);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for (k, &col) in basic.iter().enumerate() {
            touched.clear();
            reach.clear();
            self.stamp += 1;
            let stamp = self.stamp;
            let (rows, vals) = mat.col(col);
            for (&r, &v) in rows.iter().zip(vals) {
                self.work[r] = v;
                self.row_seen[r] = stamp;
                touched.push(r);
            }
            for &r in rows {
                let p = self.pos[r];
                if p != NONE && self.pivot_seen[p] != stamp {
                    dfs_reach(
                        &self.l_cols,
                        &self.pos,
                        &mut self.pivot_seen,
                        stamp,
                        p,
                        &mut reach,
                        &mut stack,
                    );
                }
            }
            reach.sort_unstable();
            // numeric forward elimination in increasing pivot order
            for &pk in &reach {
                let pr = self.perm[pk];
                let xv = self.work[pr];
                if xv == 0.0 {
                    continue;
                }
                for &(er, ev) in &self.l_cols[pk] {
                    if self.row_seen[er] != stamp {
                        self.row_seen[er] = stamp;
                        self.work[er] = 0.0;
                        touched.push(er);
                    }
                    self.work[er] -= xv * ev;
                }
            }
            // partial pivot among unpivoted touched rows
            let mut piv_row = NONE;
            let mut piv_val = 0.0f64;
            for &r in &touched {
                if self.pos[r] == NONE && self.work[r].abs() > piv_val.abs() {
                    piv_row = r;
                    piv_val = self.work[r];
                }
            }
            if piv_row == NONE || piv_val.abs() < PIVOT_ZERO {
                for &r in &touched {
                    self.work[r] = 0.0;
                }
                return Err(k);
            }
            let mut ucol = Vec::new();
            let mut lcol = Vec::new();
            for &pk in &reach {
                let v = self.work[self.perm[pk]];
                if v.abs() > DROP_TOL {
                    ucol.push((pk, v));
                }
            }
            for &r in &touched {
                if self.pos[r] == NONE && r != piv_row {
                    let v = self.work[r];
                    if v.abs() > DROP_TOL {
                        lcol.push((r, v / piv_val));
                    }
                }
            }
            for &r in &touched {
                self.work[r] = 0.0;
            }
            self.pos[piv_row] = k;
            self.perm.push(piv_row);
            self.u_cols.push(ucol);
            self.u_diag.push(piv_val);
            self.l_cols.push(lcol);
        }
        // remap L row indices into pivot space; every row is pivoted now
        for col in self.l_cols.iter_mut() {
            for e in col.iter_mut() {
                e.0 = self.pos[e.0];
            }
            col.sort_unstable_by_key(|e| e.0);
        }
        Ok(())
    }

    /// Solves `B x = b`. Input is dense in row space, output dense in
    /// basis-position space.
    pub fn ftran(&self, b: &[f64], out: &mut [f64]) {
        let m = self.m;
        let mut z = vec![0.0; m];
        for k in 0..m {
            z[k] = b[self.perm[k]];
        }
        for k in 0..m {
            let v = z[k];
            if v != 0.0 {
                for &(i, lv) in &self.l_cols[k] {
                    z[i] -= v * lv;
                }
            }
        }
        for k in (0..m).rev() {
            if z[k] != 0.0 {
                let xv = z[k] / self.u_diag[k];
                z[k] = xv;
                for &(i, uv) in &self.u_cols[k] {
                    z[i] -= xv * uv;
                }
            }
        }
        out.copy_from_slice(&z);
        for eta in &self.etas {
            let xq = out[eta.q] / eta.wq;
            if xq != 0.0 {
                for &(i, v) in &eta.entries {
                    out[i] -= v * xq;
                }
            }
            out[eta.q] = xq;
        }
    }

    /// Solves `B' y = c`. Input is dense in basis-position space, output
    /// dense in row space.
    pub fn btran(&self, c: &[f64], out: &mut [f64]) {
        let m = self.m;
        let mut y = c.to_vec();
        for eta in self.etas.iter().rev() {
            let mut s = y[eta.q];
            for &(i, v) in &eta.entries {
                s -= v * y[i];
            }
            y[eta.q] = s / eta.wq;
        }
        let mut z = vec![0.0; m];
        for k in 0..m {
            let mut s = y[k];
            for &(i, uv) in &self.u_cols[k] {
                s -= uv * z[i];
            }
            z[k] = s / self.u_diag[k];
        }
        for k in (0..m).rev() {
            let mut s = z[k];
            for &(i, lv) in &self.l_cols[k] {
                s -= lv * z[i];
            }
            z[k] = s;
        }
        for k in 0..m {
            out[self.perm[k]] = z[k];
        }
    }

    /// Records a basis change at position `q` with ftran column `w`.
    /// Returns false when the pivot element is too small to absorb; the
    /// caller must refactorize in that case.
    pub fn push_eta(&mut self, q: usize, w: &[f64]) -> bool {
        let wq = w[q];
        if wq.abs() < PIVOT_ZERO {
            return false;
        }
        let mut entries = Vec::new();
        for (i, &v) in w.iter().enumerate() {
            if i != q && v.abs() > DROP_TOL {
                entries.push((i, v));
            }
        }
        self.etas.push(Eta { q, wq, entries });
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_and_solve_small() {
        // B = [[2,1,0],[0,3,1],[1,0,4]] as columns of a CSC matrix
        let cols = vec![
            vec![(0, 2.0), (2, 1.0)],
            vec![(0, 1.0), (1, 3.0)],
            vec![(1, 1.0), (2, 4.0)],
        ];
        let mat = CscMat::from_columns(3, &cols);
        let mut basis = Basis::new(3);
        basis.factorize_inner(&mat, &[0, 1, 2]).unwrap();

        let b = vec![5.0, 7.0, 9.0];
        let mut x = vec![0.0; 3];
        basis.ftran(&b, &mut x);
        // reconstruct B x
        let mut bx = vec![0.0; 3];
        for (j, col) in cols.iter().enumerate() {
            for &(r, v) in col {
                bx[r] += v * x[j];
            }
        }
        for i in 0..3 {
            assert!((bx[i] - b[i]).abs() < 1e-12);
        }

        let c = vec![1.0, -2.0, 0.5];
        let mut y = vec![0.0; 3];
        basis.btran(&c, &mut y);
        // check B' y = c: component j is col_j . y
        for (j, col) in cols.iter().enumerate() {
            let mut s = 0.0;
            for &(r, v) in col {
                s += v * y[r];
            }
            assert!((s - c[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_update_matches_refactorization() {
        let cols = vec![
            vec![(0, 1.0)],
            vec![(1, 1.0)],
            vec![(2, 1.0)],
            vec![(0, 2.0), (1, 1.0), (2, -1.0)],
        ];
        let mat = CscMat::from_columns(3, &cols);
        let mut basis = Basis::new(3);
        basis.factorize_inner(&mat, &[0, 1, 2]).unwrap();
        // replace position 1 with column 3
        let mut w = vec![0.0; 3];
        let a: Vec<f64> = vec![2.0, 1.0, -1.0];
        basis.ftran(&a, &mut w);
        assert!(basis.push_eta(1, &w));

        let b = vec![3.0, -1.0, 2.0];
        let mut x_eta = vec![0.0; 3];
        basis.ftran(&b, &mut x_eta);

        let mut fresh = Basis::new(3);
        fresh.factorize_inner(&mat, &[0, 3, 2]).unwrap();
        let mut x_ref = vec![0.0; 3];
        fresh.ftran(&b, &mut x_ref);
        for i in 0..3 {
            assert!((x_eta[i] - x_ref[i]).abs() < 1e-12);
        }

        let c = vec![0.5, 1.5, -2.0];
        let mut y_eta = vec![0.0; 3];
        basis.btran(&c, &mut y_eta);
        let mut y_ref = vec![0.0; 3];
        fresh.btran(&c, &mut y_ref);
        for i in 0..3 {
            assert!((y_eta[i] - y_ref[i]).abs() < 1e-12);
        }
    }
}
