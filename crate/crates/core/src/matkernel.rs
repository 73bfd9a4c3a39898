//! Dense complex-matrix primitives: operator norm, Hilbert-Schmidt pairing,
//! Hermitian eigensolver, SVD and least squares.
//!
//! Every algebraic module consumes these; nothing here knows about triple
//! products. Tolerances are relative and default to [`Real::default_tol`].

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

const MAX_JACOBI_SWEEPS: usize = 80;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self[(i, j)];
                write!(f, "({:?}, {:?}) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    /// Matrix unit with a one at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = C::one();
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real rows; convenient for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| re(T::lit(rows[i][j])))
    }

    /// A column vector.
    pub fn column(v: &[C<T>]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<C<T>>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for i in 0..rows {
                m[(i, j)] = col[i];
            }
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C<T>>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C<T>]) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(C::zero(), |a, b| a + b)
    }

    pub fn fro_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `self * v` for a vector `v`.
    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols, "mul_vec shape");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).fold(C::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * *b;
                }
            }
        }
        Ok(out)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Assembles `[[a, b], [c, d]]` from four conforming blocks.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let mut m = Self::zeros(a.rows + c.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        m.set_block(a.rows, 0, c);
        m.set_block(a.rows, a.cols, d);
        m
    }

    /// Relative distance from Hermitian: `‖H − H*‖_F / max(‖H‖_F, tiny)`.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let scale = self.fro_norm().max(T::min_positive_value());
        (self - &self.adjoint()).fro_norm() / scale
    }

    /// Inverse of a square matrix, or `NoSolution` when it is numerically singular.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let svd = svd(self);
        let smax = svd.singular_values.first().copied().unwrap_or(T::zero());
        let smin = svd.singular_values.last().copied().unwrap_or(T::zero());
        if n > 0 && (smax.is_zero() || smin <= smax * T::epsilon() * T::lit(16.0 * n as f64)) {
            return Err(Error::NoSolution(f64::INFINITY));
        }
        // A = U Σ V*  =>  A⁻¹ = V Σ⁻¹ U*
        let mut vs = svd.v.clone();
        for j in 0..n {
            let inv = re(svd.singular_values[j].recip());
            for i in 0..n {
                vs[(i, j)] = vs[(i, j)] * inv;
            }
        }
        vs.matmul(&svd.u.adjoint())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Real> Add for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "add shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<'a, T: Real> Sub for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<'a, T: Real> Mul for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.matmul(rhs).expect("matrix product shape")
    }
}

impl<'a, T: Real> Neg for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.scale(-C::one())
    }
}

impl<T: Real> AddAssign<&Matrix<T>> for Matrix<T> {
    fn add_assign(&mut self, rhs: &Matrix<T>) {
        assert_eq!(self.shape(), rhs.shape(), "add shape");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
    }
}

impl<T: Real> SubAssign<&Matrix<T>> for Matrix<T> {
    fn sub_assign(&mut self, rhs: &Matrix<T>) {
        assert_eq!(self.shape(), rhs.shape(), "sub shape");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
    }
}

// ---------------------------------------------------------------------------
// vectors

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn vdot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub fn vnorm<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

pub fn vsub<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn vadd<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn vscale<T: Real>(a: &[C<T>], s: C<T>) -> Vec<C<T>> {
    a.iter().map(|x| *x * s).collect()
}

/// `y += s·x`.
pub fn vaxpy<T: Real>(y: &mut [C<T>], s: C<T>, x: &[C<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * *xi;
    }
}

// ---------------------------------------------------------------------------
// norms and pairings

/// Largest singular value.
pub fn op_norm<T: Real>(a: &Matrix<T>) -> Result<T> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    Ok(op_norm_unchecked(a))
}

pub(crate) fn op_norm_unchecked<T: Real>(a: &Matrix<T>) -> T {
    if a.rows == 0 || a.cols == 0 {
        return T::zero();
    }
    singular_values(a).first().copied().unwrap_or(T::zero())
}

/// Hilbert-Schmidt pairing `⟨A, B⟩ = tr(B* A)`.
pub fn hs_inner<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<C<T>> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "hs_inner of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(vdot(&b.data, &a.data))
}

// ---------------------------------------------------------------------------
// SVD (one-sided Jacobi)

/// `A = U diag(s) V*` with singular values in descending order.
///
/// `v` is always square (`cols × cols`) and unitary; `u` is `rows × cols`
/// and its columns for zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub singular_values: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    /// Numerical rank at relative threshold `rel_tol`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(T::zero());
        if smax.is_zero() {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > smax * rel_tol).count()
    }
}

pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    svd(a).singular_values
}

pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = a.shape();
    // pad with zero rows so the column count never exceeds the row count
    let mp = m.max(n);
    let mut u = Matrix::zeros(mp, n);
    u.set_block(0, 0, a);
    let mut v = Matrix::<T>::identity(n);
    let eps = T::epsilon();

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = C::<T>::zero();
                for i in 0..mp {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                let g = gamma.norm();
                if g.is_zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = (T::one() + t * t).sqrt().recip();
                let sn = cs * t;
                rotate_columns(&mut u, p, q, cs, sn, phase);
                rotate_columns(&mut v, p, q, cs, sn, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<(T, usize)> = (0..n)
        .map(|j| {
            let s = (0..mp).map(|i| u[(i, j)].norm_sqr()).sum::<T>().sqrt();
            (s, j)
        })
        .collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let smax = sv.first().map_or(T::zero(), |x| x.0);
    let cutoff = smax * eps * T::lit(mp.max(1) as f64);
    let mut uo = Matrix::zeros(m, n);
    let mut vo = Matrix::zeros(n, n);
    let mut s_out = Vec::with_capacity(n);
    for (k, &(s, j)) in sv.iter().enumerate() {
        s_out.push(s);
        for i in 0..n {
            vo[(i, k)] = v[(i, j)];
        }
        if s > cutoff && !s.is_zero() {
            let inv = re(s.recip());
            for i in 0..m {
                uo[(i, k)] = u[(i, j)] * inv;
            }
        }
    }
    Svd { u: uo, singular_values: s_out, v: vo }
}

/// Applies the rotation that orthogonalizes columns `p` and `q`:
/// `x_p ← c x_p − s φ̄ x_q`, `x_q ← s φ x_p + c x_q`.
fn rotate_columns<T: Real>(x: &mut Matrix<T>, p: usize, q: usize, cs: T, sn: T, phase: C<T>) {
    let c = re(cs);
    let s = re(sn);
    for i in 0..x.rows {
        let xp = x[(i, p)];
        let xq = x[(i, q)];
        let wq = phase.conj() * xq;
        x[(i, p)] = c * xp - s * wq;
        x[(i, q)] = phase * (s * xp + c * wq);
    }
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic Jacobi)

#[derive(Clone, Debug)]
pub struct HermEigResult<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermEigResult<T> {
    /// `‖H − V Λ V*‖_F`.
    pub fn reconstruction_residual(&self, h: &Matrix<T>) -> T {
        let v = &self.eigenvectors;
        let mut vl = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            for i in 0..vl.rows {
                vl[(i, j)] = vl[(i, j)] * re(l);
            }
        }
        (h - &(&vl * &v.adjoint())).fro_norm()
    }
}

/// Eigen-decomposition of a Hermitian matrix. Rejects inputs whose relative
/// anti-Hermitian part exceeds `tol` (default [`Real::default_tol`]).
pub fn herm_eig<T: Real>(h: &Matrix<T>, tol: Option<T>) -> Result<HermEigResult<T>> {
    if !h.is_square() {
        return Err(Error::Shape("herm_eig needs a square matrix".into()));
    }
    if !h.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let tol = tol.unwrap_or_else(T::default_tol);
    let defect = h.hermitian_defect();
    if defect > tol {
        return Err(Error::NotHermitian(defect.to_f64_lossy()));
    }
    let n = h.rows;
    // work on the exactly Hermitian part
    let mut a = (h + &h.adjoint()).scale_real(T::lit(0.5));
    let mut v = Matrix::<T>::identity(n);
    let scale = a.fro_norm();
    let eps = T::epsilon();

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= eps * scale || scale.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g.is_zero() || g <= eps * T::lit(0.01) * scale {
                    continue;
                }
                let phase = apq.unscale(g);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = (T::one() + t * t).sqrt().recip();
                let sn = cs * t;
                // G = diag(1, φ)·[[c, s], [−s, c]] with φ = conj(phase):
                // the phase makes a_pq real, the rotation then zeroes it.
                let ph = phase.conj();
                let g_pp = re(cs);
                let g_pq = re(sn);
                let g_qp = re(-sn) * ph;
                let g_qq = re(cs) * ph;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = re(a[(p, p)].re);
                a[(q, q)] = re(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermEigResult { eigenvalues, eigenvectors })
}

/// `f(H)` for Hermitian `H` via its eigen-decomposition.
pub fn herm_function<T: Real>(h: &Matrix<T>, f: impl Fn(T) -> T) -> Result<Matrix<T>> {
    let eig = herm_eig(h, None)?;
    let n = h.rows;
    let v = &eig.eigenvectors;
    let mut vf = v.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let fl = re(f(l));
        for i in 0..n {
            vf[(i, j)] = vf[(i, j)] * fl;
        }
    }
    Ok(&vf * &v.adjoint())
}

// ---------------------------------------------------------------------------
// least squares

#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub x: Vec<C<T>>,
    /// `‖Ax − b‖`.
    pub residual: T,
    /// `‖A‖‖x‖ + ‖b‖`, the scale the residual is judged against.
    pub scale: T,
}

impl<T: Real> LeastSquares<T> {
    pub fn relative_residual(&self) -> T {
        if self.scale.is_zero() {
            self.residual
        } else {
            self.residual / self.scale
        }
    }
}

/// Minimum-norm least-squares solution of `Ax ≈ b`.
pub fn least_squares<T: Real>(a: &Matrix<T>, b: &[C<T>]) -> Result<LeastSquares<T>> {
    let rel_cut = T::epsilon() * T::lit((a.rows.max(a.cols).max(1) * 4) as f64);
    least_squares_truncated(a, b, rel_cut)
}

/// Least squares treating singular values below `rel_cut · σ_max` as zero.
pub fn least_squares_truncated<T: Real>(a: &Matrix<T>, b: &[C<T>], rel_cut: T) -> Result<LeastSquares<T>> {
    if a.rows != b.len() {
        return Err(Error::Shape(format!("{} rows but rhs of length {}", a.rows, b.len())));
    }
    let svd = svd(a);
    let n = a.cols;
    let smax = svd.singular_values.first().copied().unwrap_or(T::zero());
    let cutoff = smax * rel_cut;
    let utb: Vec<C<T>> = (0..n)
        .map(|k| {
            let s = svd.singular_values[k];
            if s > cutoff && !s.is_zero() {
                let coef = (0..a.rows).fold(C::<T>::zero(), |acc, i| acc + svd.u[(i, k)].conj() * b[i]);
                coef.unscale(s)
            } else {
                C::zero()
            }
        })
        .collect();
    let x = svd.v.mul_vec(&utb);
    let residual = vnorm(&vsub(&a.mul_vec(&x), b));
    let scale = smax * vnorm(&x) + vnorm(b);
    Ok(LeastSquares { x, residual, scale })
}

/// Solves `Ax = b`, accepting the least-squares solution only when
/// `‖Ax − b‖ ≤ tol·(‖A‖‖x‖ + ‖b‖)`.
pub fn solve_linear<T: Real>(a: &Matrix<T>, b: &[C<T>], tol: Option<T>) -> Result<Vec<C<T>>> {
    let tol = tol.unwrap_or_else(T::default_tol);
    let ls = least_squares(a, b)?;
    if ls.residual <= tol * ls.scale {
        Ok(ls.x)
    } else {
        Err(Error::NoSolution(ls.relative_residual().to_f64_lossy()))
    }
}

/// Moore-Penrose pseudo-inverse with singular values below `rel_cut · σ_max` dropped.
pub fn pseudo_inverse<T: Real>(a: &Matrix<T>, rel_cut: T) -> Matrix<T> {
    let (m, n) = a.shape();
    let s = svd(a);
    let smax = s.singular_values.first().copied().unwrap_or(T::zero());
    let mut out = Matrix::zeros(n, m);
    for k in 0..n {
        let sk = s.singular_values[k];
        if sk.is_zero() || sk <= smax * rel_cut {
            continue;
        }
        for i in 0..n {
            let vik = s.v[(i, k)].unscale(sk);
            if vik.is_zero() {
                continue;
            }
            for j in 0..m {
                out[(i, j)] += vik * s.u[(j, k)].conj();
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// subspaces

/// Orthonormal basis (columns) of the null space of `a` at relative threshold `rel_tol`.
pub fn null_space<T: Real>(a: &Matrix<T>, rel_tol: T) -> Matrix<T> {
    let n = a.cols;
    if a.rows == 0 {
        return Matrix::identity(n);
    }
    let svd = svd(a);
    let rank = svd.rank(rel_tol);
    Matrix::from_fn(n, n - rank, |i, j| svd.v[(i, rank + j)])
}

/// Orthonormal basis (columns) of the span of the given vectors, dropping
/// directions whose singular value is below `rel_tol` times the largest.
pub fn orthonormal_basis<T: Real>(dim: usize, vectors: &[Vec<C<T>>], rel_tol: T) -> Matrix<T> {
    if vectors.is_empty() {
        return Matrix::zeros(dim, 0);
    }
    let m = Matrix::from_columns(dim, vectors);
    let svd = svd(&m.adjoint());
    // columns of V of the adjoint are the left singular vectors of m
    let rank = svd.rank(rel_tol);
    Matrix::from_fn(dim, rank, |i, j| svd.v[(i, j)])
}

/// Like [`orthonormal_basis`] but with an absolute singular value cutoff.
pub fn orthonormal_basis_abs<T: Real>(dim: usize, vectors: &[Vec<C<T>>], abs_tol: T) -> Matrix<T> {
    if vectors.is_empty() {
        return Matrix::zeros(dim, 0);
    }
    let m = Matrix::from_columns(dim, vectors);
    let svd = svd(&m.adjoint());
    let rank = svd.singular_values.iter().filter(|&&s| s > abs_tol).count();
    Matrix::from_fn(dim, rank, |i, j| svd.v[(i, j)])
}

/// Distance `‖v − QQ*v‖` of `v` from the span of the orthonormal columns of `q`.
pub fn distance_to_span<T: Real>(q: &Matrix<T>, v: &[C<T>]) -> T {
    let mut r = v.to_vec();
    for j in 0..q.cols {
        let col = q.col(j);
        let coef = vdot(&col, v);
        vaxpy(&mut r, -coef, &col);
    }
    vnorm(&r)
}

/// Spectral distance `‖P_a − P_b‖` between the spans of two orthonormal column sets.
pub fn subspace_distance<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    let pa = a * &a.adjoint();
    let pb = b * &b.adjoint();
    op_norm_unchecked(&(&pa - &pb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rand_matrix(rng: &mut ChaCha8Rng, r: usize, cc: usize) -> Matrix<f64> {
        Matrix::from_fn(r, cc, |_, _| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Complex::new(a, b)
        })
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm(&Matrix::<f64>::zeros(3, 2)).unwrap(), 0.0);
        assert!((op_norm(&Matrix::<f64>::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        let a = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!((op_norm(&a).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn op_norm_rejects_nan() {
        let mut a = Matrix::<f64>::identity(2);
        a[(0, 1)] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(op_norm(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = Matrix::<f64>::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
        let e11 = Matrix::<f64>::unit(2, 2, 0, 0);
        let e22 = Matrix::<f64>::unit(2, 2, 1, 1);
        assert_eq!(hs_inner(&e11, &e22).unwrap(), c(0.0, 0.0));
        let a = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(hs_inner(&a, &e11).unwrap(), c(1.0, 0.0));
        assert!(matches!(hs_inner(&a, &Matrix::zeros(1, 2)), Err(Error::Shape(_))));
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = rand_matrix(&mut rng, 3, 4);
        let b = rand_matrix(&mut rng, 3, 4);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
        assert!(hs_inner(&a, &a).unwrap().re > 0.0);
    }

    #[test]
    fn herm_eig_examples() {
        let d = Matrix::<f64>::from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(herm_eig(&d, None).unwrap().eigenvalues, vec![-1.0, 1.0]);
        let x = Matrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = herm_eig(&x, None).unwrap().eigenvalues;
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        let z = herm_eig(&Matrix::<f64>::zeros(2, 2), None).unwrap().eigenvalues;
        assert_eq!(z, vec![0.0, 0.0]);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let a = Matrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&a, None), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn herm_eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let n = 1 + trial % 16;
            let a = rand_matrix(&mut rng, n, n);
            let h = (&a + &a.adjoint()).scale_real(0.5);
            let eig = herm_eig(&h, None).unwrap();
            let scale = op_norm(&h).unwrap().max(1e-300);
            assert!(eig.reconstruction_residual(&h) <= 1e-10 * scale, "trial {trial}");
            let v = &eig.eigenvectors;
            let gram = &v.adjoint() * v;
            assert!((&gram - &Matrix::identity(n)).max_abs() <= 1e-10, "trial {trial}");
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(r, cc) in &[(3, 3), (5, 2), (2, 5), (1, 4), (6, 6)] {
            let a = rand_matrix(&mut rng, r, cc);
            let s = svd(&a);
            let k = s.singular_values.len();
            let sig = Matrix::from_fn(k, k, |i, j| {
                if i == j {
                    re(s.singular_values[i])
                } else {
                    C::zero()
                }
            });
            let rec = &(&s.u * &sig) * &s.v.adjoint();
            assert!((&rec - &a).max_abs() < 1e-12, "{r}x{cc}");
        }
    }

    #[test]
    fn norm_sandwich_for_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, cc) = (1 + rng_usize(&mut rng, 6), 1 + rng_usize(&mut rng, 6));
            let a = rand_matrix(&mut rng, r, cc);
            let op = op_norm(&a).unwrap();
            let hs = hs_inner(&a, &a).unwrap().re;
            let k = a.rows().min(a.cols()) as f64;
            assert!(op * op <= hs * (1.0 + 1e-9));
            assert!(hs <= k * op * op * (1.0 + 1e-9));
        }
    }

    fn rng_usize(rng: &mut ChaCha8Rng, n: usize) -> usize {
        use rand::RngExt;
        rng.random_range(0..n)
    }

    #[test]
    fn solve_linear_examples() {
        let b = vec![c::<f64>(1.0, 2.0), c(-3.0, 0.5)];
        assert_eq!(solve_linear(&Matrix::identity(2), &b, None).unwrap(), b);
        assert!(matches!(
            solve_linear(&Matrix::<f64>::zeros(2, 2), &b, None),
            Err(Error::NoSolution(_))
        ));
        let x = solve_linear(&Matrix::<f64>::from_real_rows(&[&[2.0]]), &[c(1.0, 0.0)], None).unwrap();
        assert!((x[0] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_linear_rectangular_consistent() {
        // overdetermined but consistent
        let a = Matrix::<f64>::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let x = solve_linear(&a, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], None).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12 && (x[1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(solve_linear(&a, &[c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], None).is_err());
    }

    #[test]
    fn inverse_and_null_space() {
        let a = Matrix::<f64>::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let inv = a.inverse().unwrap();
        assert!((&(&a * &inv) - &Matrix::identity(2)).max_abs() < 1e-14);
        let s = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(s.inverse().is_err());
        let ns = null_space(&s, 1e-12);
        assert_eq!(ns.cols(), 1);
        assert!(vnorm(&s.mul_vec(&ns.col(0))) < 1e-14);
    }

    #[test]
    fn f32_kernel_smoke() {
        let a = Matrix::<f32>::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!((op_norm(&a).unwrap() - 2f32.sqrt()).abs() < 1e-5);
        let h = Matrix::<f32>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = herm_eig(&h, None).unwrap().eigenvalues;
        assert!((e[0] + 1.0).abs() < 1e-5 && (e[1] - 1.0).abs() < 1e-5);
    }
}
