//! Integer matrices and Smith normal form over `Z/N`.
//!
//! Every finite abelian group handled by this crate is killed by some
//! modulus `N`, so all lattice computations (kernels, cokernels, solving)
//! are done over the principal ideal ring `Z/N`. Entries are kept in
//! `[0, N)` and products are formed in `i128`, so no intermediate value can
//! overflow regardless of how many elimination steps are performed.

use std::fmt;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row(&self, r: usize) -> Vec<i64> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Plain integer product (entries are expected to stay small).
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as i128;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j) as i128;
                    if b != 0 {
                        let idx = i * out.cols + j;
                        out.data[idx] = (out.data[idx] as i128 + a * b) as i64;
                    }
                }
            }
        }
        out
    }

    /// Product followed by reduction of row `i` modulo `moduli[i]`.
    pub fn mul_reduce(&self, other: &Mat, moduli: &[u64]) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        assert_eq!(moduli.len(), self.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let m = moduli[i] as i128;
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    let a = self.get(i, k) as i128;
                    if a != 0 {
                        acc = (acc + a * other.get(k, j) as i128) % m;
                    }
                }
                out.set(i, j, acc.rem_euclid(m) as i64);
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc: i128 = 0;
                for (c, &x) in v.iter().enumerate() {
                    acc += self.get(r, c) as i128 * x as i128;
                }
                acc as i64
            })
            .collect()
    }

    pub fn apply_reduce(&self, v: &[i64], moduli: &[u64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let m = moduli[r] as i128;
                let mut acc: i128 = 0;
                for (c, &x) in v.iter().enumerate() {
                    acc = (acc + self.get(r, c) as i128 * x as i128) % m;
                }
                acc.rem_euclid(m) as i64
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: i64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Reduces row `i` modulo `moduli[i]` into `[0, moduli[i])`.
    pub fn reduce_rows(&mut self, moduli: &[u64]) {
        assert_eq!(moduli.len(), self.rows);
        for r in 0..self.rows {
            let m = moduli[r] as i64;
            for c in 0..self.cols {
                let v = self.get(r, c).rem_euclid(m);
                self.set(r, c, v);
            }
        }
    }

    pub fn reduced_rows(mut self, moduli: &[u64]) -> Mat {
        self.reduce_rows(moduli);
        self
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Mat::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c));
            }
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, b: &Mat, sign: i64) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                let v = self.get(r0 + r, c0 + c) + sign * b.get(r, c);
                self.set(r0 + r, c0 + c, v);
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut out = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r0 + r, c0 + c));
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(idx.len(), self.cols);
        for (i, &r) in idx.iter().enumerate() {
            for c in 0..self.cols {
                out.set(i, c, self.get(r, c));
            }
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src] (mod n)
    fn row_axpy(&mut self, dst: usize, src: usize, q: i64, n: i64) {
        for c in 0..self.cols {
            let v = self.get(dst, c) as i128 - q as i128 * self.get(src, c) as i128;
            self.set(dst, c, v.rem_euclid(n as i128) as i64);
        }
    }

    /// col[dst] -= q * col[src] (mod n)
    fn col_axpy(&mut self, dst: usize, src: usize, q: i64, n: i64) {
        for r in 0..self.rows {
            let v = self.get(r, dst) as i128 - q as i128 * self.get(r, src) as i128;
            self.set(r, dst, v.rem_euclid(n as i128) as i64);
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Least common multiple of a list, `1` for the empty list.
pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a u64>) -> u64 {
    xs.into_iter().fold(1, |acc, &x| lcm(acc, x))
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd((a as i128).rem_euclid(m as i128), m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as i64)
}

/// Smallest non-negative solution of `d * z = b (mod n)`, if any.
pub fn solve_scalar(d: i64, b: i64, n: i64) -> Option<i64> {
    let d = d.rem_euclid(n);
    let b = b.rem_euclid(n);
    let g = gcd(d as u64, n as u64) as i64; // gcd(0, n) = n
    if b % g != 0 {
        return None;
    }
    let m = n / g;
    let inv = inv_mod(d / g, m)?;
    Some(((b / g) as i128 * inv as i128).rem_euclid(m as i128) as i64)
}

/// `P * A * Q = D` over `Z/N` with `D` diagonal.
#[derive(Clone, Debug)]
pub struct SmithMod {
    pub modulus: i64,
    pub p: Mat,
    pub p_inv: Mat,
    pub q: Mat,
    /// Diagonal of `D`; length `min(rows, cols)`, zero entries allowed.
    pub diag: Vec<i64>,
}

impl SmithMod {
    pub fn new(a: &Mat, modulus: u64) -> Self {
        assert!(modulus >= 1 && modulus < (1 << 40), "modulus out of range");
        let n = modulus as i64;
        let (r, c) = (a.rows(), a.cols());
        let mut m = a.clone();
        for v in m.data.iter_mut() {
            *v = v.rem_euclid(n);
        }
        let mut p = Mat::identity(r);
        let mut p_inv = Mat::identity(r);
        let mut q = Mat::identity(c);
        let k = r.min(c);
        let mut t = 0;
        while t < k {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(i64, usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let v = m.get(i, j);
                    if v != 0 && best.map_or(true, |(b, _, _)| v < b) {
                        best = Some((v, i, j));
                        if v == 1 {
                            break;
                        }
                    }
                }
            }
            let Some((_, bi, bj)) = best else { break };
            m.swap_rows(t, bi);
            p.swap_rows(t, bi);
            p_inv.swap_cols(t, bi);
            m.swap_cols(t, bj);
            q.swap_cols(t, bj);
            loop {
                let piv = m.get(t, t);
                for i in t + 1..r {
                    let v = m.get(i, t);
                    if v != 0 {
                        let qt = v / piv;
                        m.row_axpy(i, t, qt, n);
                        p.row_axpy(i, t, qt, n);
                        // inverse op on the columns of p_inv: col_t += qt * col_i
                        p_inv.col_axpy(t, i, -qt, n);
                    }
                }
                for j in t + 1..c {
                    let v = m.get(t, j);
                    if v != 0 {
                        let qt = v / piv;
                        m.col_axpy(j, t, qt, n);
                        q.col_axpy(j, t, qt, n);
                    }
                }
                // any remainder left in the pivot row/column becomes the new pivot
                let mut next: Option<(i64, usize, bool)> = None;
                for i in t + 1..r {
                    let v = m.get(i, t);
                    if v != 0 && next.map_or(true, |(b, _, _)| v < b) {
                        next = Some((v, i, true));
                    }
                }
                for j in t + 1..c {
                    let v = m.get(t, j);
                    if v != 0 && next.map_or(true, |(b, _, _)| v < b) {
                        next = Some((v, j, false));
                    }
                }
                match next {
                    None => break,
                    Some((_, i, true)) => {
                        m.swap_rows(t, i);
                        p.swap_rows(t, i);
                        p_inv.swap_cols(t, i);
                    }
                    Some((_, j, false)) => {
                        m.swap_cols(t, j);
                        q.swap_cols(t, j);
                    }
                }
            }
            t += 1;
        }
        let diag = (0..k).map(|i| m.get(i, i)).collect();
        SmithMod { modulus: n, p, p_inv, q, diag }
    }

    fn d(&self, i: usize) -> i64 {
        self.diag.get(i).copied().unwrap_or(0)
    }

    /// Generators (as columns) of `{x : A x = 0 (mod N)}`.
    pub fn kernel_gens(&self) -> Mat {
        let n = self.modulus;
        let c = self.q.rows();
        let mut cols = Vec::new();
        for t in 0..c {
            let g = gcd(self.d(t).rem_euclid(n) as u64, n as u64) as i64;
            let mult = n / g;
            if mult % n == 0 {
                continue;
            }
            cols.push(
                self.q
                    .column(t)
                    .into_iter()
                    .map(|v| ((v as i128 * mult as i128).rem_euclid(n as i128)) as i64)
                    .collect::<Vec<_>>(),
            );
        }
        Mat::from_cols(c, &cols)
    }

    /// Some `x` with `A x = b (mod N)`.
    pub fn solve(&self, b: &[i64]) -> Option<Vec<i64>> {
        let n = self.modulus;
        let r = self.p.rows();
        let c = self.q.rows();
        let pb: Vec<i64> = self.p.apply_reduce(b, &vec![n as u64; r]);
        let mut z = vec![0i64; c];
        for (t, &v) in pb.iter().enumerate() {
            if t < c {
                z[t] = solve_scalar(self.d(t), v, n)?;
            } else if v.rem_euclid(n) != 0 {
                return None;
            }
        }
        Some(self.q.apply_reduce(&z, &vec![n as u64; c]))
    }

    /// Presentation of `(Z/N)^rows / image(A)` as a direct sum of cyclic groups.
    pub fn cokernel(&self) -> Presentation {
        let n = self.modulus;
        let r = self.p.rows();
        let mut orders = Vec::new();
        let mut keep = Vec::new();
        for t in 0..r {
            let o = gcd(self.d(t).rem_euclid(n) as u64, n as u64);
            if o > 1 {
                orders.push(o);
                keep.push(t);
            }
        }
        let to_canon = self.p.select_rows(&keep).reduced_rows(&orders);
        let mut from_canon = self.p_inv.select_cols(&keep);
        from_canon.reduce_rows(&vec![n as u64; r]);
        Presentation { orders, to_canon, from_canon }
    }
}

/// A finite abelian group `⊕ Z/orders[i]` together with mutually inverse
/// coordinate changes to and from an ambient presentation.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub orders: Vec<u64>,
    /// ambient coordinates -> canonical coordinates
    pub to_canon: Mat,
    /// canonical coordinates -> ambient representatives
    pub from_canon: Mat,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_factorization(a: &Mat, n: u64) {
        let s = SmithMod::new(a, n);
        let d = s.p.mul(a).mul(&s.q);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let v = d.get(i, j).rem_euclid(n as i64);
                let expect = if i == j { s.diag[i].rem_euclid(n as i64) } else { 0 };
                assert_eq!(v, expect, "PAQ not diagonal at ({i},{j})");
            }
        }
        let pp = s.p.mul(&s.p_inv);
        for i in 0..pp.rows() {
            for j in 0..pp.cols() {
                assert_eq!(pp.get(i, j).rem_euclid(n as i64), (i == j) as i64);
            }
        }
    }

    #[test]
    fn smith_of_diag_2_3_mod_6() {
        let a = Mat::from_rows(&[vec![2, 0], vec![0, 3]]);
        check_factorization(&a, 6);
        let pres = SmithMod::new(&a, 6).cokernel();
        let mut o = pres.orders.clone();
        o.sort();
        assert_eq!(o, vec![2, 3]);
    }

    #[test]
    fn kernel_of_mult_by_two_mod_four() {
        let a = Mat::from_rows(&[vec![2]]);
        let s = SmithMod::new(&a, 4);
        let k = s.kernel_gens();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.get(0, 0).rem_euclid(4), 2);
    }

    #[test]
    fn solve_and_fail() {
        let a = Mat::from_rows(&[vec![2, 4], vec![0, 6]]);
        let s = SmithMod::new(&a, 8);
        let x = s.solve(&[2, 6]).expect("solvable");
        let y = a.apply(&x);
        assert_eq!(y[0].rem_euclid(8), 2);
        assert_eq!(y[1].rem_euclid(8), 6);
        assert!(s.solve(&[1, 0]).is_none());
    }

    #[test]
    fn scalar_solver() {
        assert_eq!(solve_scalar(0, 0, 5), Some(0));
        assert_eq!(solve_scalar(0, 1, 5), None);
        assert_eq!(solve_scalar(3, 1, 4), Some(3));
        assert_eq!(solve_scalar(2, 2, 4), Some(1));
    }

    proptest::proptest! {
        #[test]
        fn smith_factorization_holds(entries in proptest::collection::vec(0i64..36, 12), n in 2u64..37) {
            let a = Mat::from_rows(&[entries[0..4].to_vec(), entries[4..8].to_vec(), entries[8..12].to_vec()]);
            check_factorization(&a, n);
            let s = SmithMod::new(&a, n);
            let k = s.kernel_gens();
            let ak = a.mul(&k);
            for v in ak.data.iter() {
                proptest::prop_assert_eq!(v.rem_euclid(n as i64), 0);
            }
        }
    }
}
