//! Small dense real linear algebra (systems of size ≤ a few dozen).

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |s, i| s + self[(i, j)].abs()))
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Factorizes a square matrix; `None` when a pivot vanishes exactly.
    pub fn new(a: &Matrix<T>) -> Option<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().partial_cmp(&lu[(j, k)].abs()).expect("NaN pivot"))?;
            if lu[(p, k)] == T::zero() {
                return None;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * v;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.lu.rows;
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Solves `a x = b` and returns `(x, κ₁(a))`. Singular matrices report an
/// infinite condition number.
pub fn solve_with_condition<T: Real>(a: &Matrix<T>, b: &[T]) -> (Option<Vec<T>>, T) {
    match Lu::new(a) {
        None => (None, T::infinity()),
        Some(lu) => {
            let cond = a.norm_1() * lu.inverse().norm_1();
            let x = lu.solve(b);
            if x.iter().all(|v| v.is_finite()) {
                (Some(x), cond)
            } else {
                (None, T::infinity())
            }
        }
    }
}

/// Linear least squares `min ‖a x − b‖₂` by Householder QR, with column
/// equilibration. Returns the solution and the ratio of extreme `|R_ii|`
/// (a cheap condition estimate of the scaled problem).
pub fn least_squares<T: Real>(a: &Matrix<T>, b: &[T]) -> (Vec<T>, T) {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n && b.len() == m);
    let scales: Vec<T> = (0..n)
        .map(|j| {
            let s = (0..m).fold(T::zero(), |s, i| s + a[(i, j)] * a[(i, j)]).sqrt();
            if s > T::zero() { s } else { T::one() }
        })
        .collect();
    let mut r = a.clone();
    for j in 0..n {
        for i in 0..m {
            r[(i, j)] = r[(i, j)] / scales[j];
        }
    }
    let mut qtb = b.to_vec();
    for k in 0..n {
        let alpha = (k..m).fold(T::zero(), |s, i| s + r[(i, k)] * r[(i, k)]).sqrt();
        let alpha = if r[(k, k)] > T::zero() { -alpha } else { alpha };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k..n {
            let s = (k..m).fold(T::zero(), |s, i| s + v[i - k] * r[(i, j)]);
            let f = T::lit(2.0) * s / vnorm2;
            for i in k..m {
                r[(i, j)] = r[(i, j)] - f * v[i - k];
            }
        }
        let s = (k..m).fold(T::zero(), |s, i| s + v[i - k] * qtb[i]);
        let f = T::lit(2.0) * s / vnorm2;
        for i in k..m {
            qtb[i] = qtb[i] - f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for j in i + 1..n {
            s = s - r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    let diag: Vec<T> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let dmax = diag.iter().copied().fold(T::zero(), T::max);
    let dmin = diag.iter().copied().fold(T::infinity(), T::min);
    let cond = if dmin > T::zero() { dmax / dmin } else { T::infinity() };
    for j in 0..n {
        x[j] = x[j] / scales[j];
    }
    (x, cond)
}

/// Singular values `(σ_min, σ_max)` of a 2×n matrix from the eigenvalues of `J Jᵀ`.
pub fn singular_values_2xn<T: Real>(j: &Matrix<T>) -> (T, T) {
    assert_eq!(j.rows, 2);
    let a = dot(j.row(0), j.row(0));
    let b = dot(j.row(0), j.row(1));
    let d = dot(j.row(1), j.row(1));
    let tr = a + d;
    let det = a * d - b * b;
    let disc = (tr * tr * T::lit(0.25) - det).max(T::zero()).sqrt();
    let hi = tr * T::lit(0.5) + disc;
    // Use det/hi for the small eigenvalue to avoid cancellation.
    let lo = if hi > T::zero() { (det / hi).max(T::zero()) } else { T::zero() };
    (lo.sqrt(), hi.sqrt())
}

/// Orthonormal basis of the orthogonal complement of the row space of `j`
/// (rows assumed linearly independent). Deterministic: candidates are the
/// coordinate axes, taken greedily by largest residual.
pub fn null_space<T: Real>(j: &Matrix<T>) -> Vec<Vec<T>> {
    let n = j.cols;
    let mut basis: Vec<Vec<T>> = Vec::new();
    for i in 0..j.rows {
        let mut v = j.row(i).to_vec();
        orthogonalize(&mut v, &basis);
        let nv = norm2(&v);
        if nv > T::zero() {
            basis.push(v.iter().map(|&x| x / nv).collect());
        }
    }
    let row_rank = basis.len();
    let mut out = Vec::new();
    while basis.len() < n {
        let mut best: Option<(T, Vec<T>)> = None;
        for k in 0..n {
            let mut v = vec![T::zero(); n];
            v[k] = T::one();
            orthogonalize(&mut v, &basis);
            orthogonalize(&mut v, &basis);
            let nv = norm2(&v);
            if best.as_ref().is_none_or(|(b, _)| nv > *b) {
                best = Some((nv, v));
            }
        }
        let (nv, v) = best.expect("n > 0");
        let u: Vec<T> = v.iter().map(|&x| x / nv).collect();
        basis.push(u.clone());
        out.push(u);
    }
    debug_assert_eq!(out.len(), n - row_rank);
    out
}

fn orthogonalize<T: Real>(v: &mut [T], basis: &[Vec<T>]) {
    for q in basis {
        let s = dot(v, q);
        for (x, &qi) in v.iter_mut().zip(q) {
            *x = *x - s * qi;
        }
    }
}
