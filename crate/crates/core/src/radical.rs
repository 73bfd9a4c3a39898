//! Quasi-inverses in homotopes and Jacobson radicals.
//!
//! `x` is quasi-invertible in the homotope `A_u` when some `y` satisfies
//! `y − x = x u y = y u x`; the ternary analogue is `y − x = [y u x] = [x u y]`.
//! Both equations are linear in `y` and are solved jointly by truncated
//! least squares, so an exactly singular homotope reports "no quasi-inverse"
//! rather than a huge approximate one.
//!
//! Radicals are computed by the trace-form criterion: over a field of
//! characteristic zero `Rad A = {x : tr L_{xa} = 0 for all a ∈ A⁺}`, where
//! `A⁺` is the unitization. Sampled quasi-invertibility audits the result.

use num_traits::{One, Zero};

use crate::embedding::{build_embedding, peirce_split, CornerLayout, EmbeddingElement, StandardEmbedding};
use crate::error::{Error, Result};
use crate::matkernel::{
    distance_to_span, least_squares, least_squares_truncated, null_space, orthonormal_basis, pseudo_inverse,
    vnorm, vsub, Matrix,
};
use crate::rng::{self, Rng};
use crate::scalar::{Real, C};
use crate::ternary::{Sign, TernaryElement, TernarySpace};

/// Relative singular value cutoff of the quasi-inverse solves.
const QI_RANK_CUT: f64 = 1e-10;
/// Relative residual accepted as a quasi-inverse.
const QI_ACCEPT: f64 = 1e-9;
/// Relative residuals in `(QI_ACCEPT, QI_BORDERLINE]` are reported as borderline.
const QI_BORDERLINE: f64 = 1e-6;

/// Finite-dimensional associative algebra: `e_a e_b = Σ_k c[a][b][k] e_k`.
#[derive(Clone, Debug)]
pub struct AssocAlgebra<T> {
    dim: usize,
    c: Vec<C<T>>,
    /// Conjugate-linear involution `x* = J x̄`, if any.
    star: Option<Matrix<T>>,
}

impl<T: Real> AssocAlgebra<T> {
    /// Validates shape, finiteness and associativity on the basis.
    pub fn new(dim: usize, c: Vec<C<T>>, star: Option<Matrix<T>>) -> Result<Self> {
        if c.len() != dim.pow(3) {
            return Err(Error::Shape(format!("{} structure constants for dimension {dim}", c.len())));
        }
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite structure constant".into()));
        }
        if let Some(j) = &star {
            if j.shape() != (dim, dim) {
                return Err(Error::Shape("involution matrix shape".into()));
            }
        }
        let a = Self { dim, c, star };
        let r = a.associativity_residual(200, 0);
        if r > T::default_tol() {
            return Err(Error::InvalidInput(format!(
                "product is not associative (residual {:.3e})",
                r.to_f64_lossy()
            )));
        }
        Ok(a)
    }

    pub(crate) fn new_unchecked(dim: usize, c: Vec<C<T>>, star: Option<Matrix<T>>) -> Self {
        Self { dim, c, star }
    }

    /// `M_n(ℂ)` with basis `E_ij` (index `i·n + j`) and the adjoint.
    pub fn full_matrix(n: usize) -> Self {
        let d = n * n;
        let mut c = vec![C::zero(); d * d * d];
        let mut star = Matrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    c[((i * n + j) * d + (j * n + l)) * d + (i * n + l)] = C::one();
                }
                star[(j * n + i, i * n + j)] = C::one();
            }
        }
        Self { dim: d, c, star: Some(star) }
    }

    /// `span{1, n}` with `n² = 0`.
    pub fn dual_numbers() -> Self {
        let mut c = vec![C::zero(); 8];
        c[0] = C::one(); // 1·1 = 1
        c[3] = C::one(); // 1·n = n
        c[5] = C::one(); // n·1 = n
        Self { dim: 2, c, star: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constants(&self) -> &[C<T>] {
        &self.c
    }

    pub fn involution(&self) -> Option<&Matrix<T>> {
        self.star.as_ref()
    }

    #[inline]
    pub fn constant(&self, a: usize, b: usize, k: usize) -> C<T> {
        self.c[(a * self.dim + b) * self.dim + k]
    }

    pub fn basis_element(&self, i: usize) -> Vec<C<T>> {
        let mut v = vec![C::zero(); self.dim];
        v[i] = C::one();
        v
    }

    pub fn random_element(&self, rng: &mut Rng) -> Vec<C<T>> {
        rng::gaussian_vec(rng, self.dim)
    }

    pub fn mul(&self, x: &[C<T>], y: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim;
        let mut out = vec![C::zero(); n];
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..n {
                let s = x[a] * y[b];
                if s.is_zero() {
                    continue;
                }
                let base = (a * n + b) * n;
                for (o, c) in out.iter_mut().zip(&self.c[base..base + n]) {
                    *o += s * *c;
                }
            }
        }
        out
    }

    pub fn mul3(&self, x: &[C<T>], y: &[C<T>], z: &[C<T>]) -> Vec<C<T>> {
        self.mul(&self.mul(x, y), z)
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_matrix(&self, x: &[C<T>]) -> Matrix<T> {
        let n = self.dim;
        let cols: Vec<Vec<C<T>>> = (0..n).map(|j| self.mul(x, &self.basis_element(j))).collect();
        Matrix::from_columns(n, &cols)
    }

    /// Matrix of `y ↦ y x`.
    pub fn right_matrix(&self, x: &[C<T>]) -> Matrix<T> {
        let n = self.dim;
        let cols: Vec<Vec<C<T>>> = (0..n).map(|j| self.mul(&self.basis_element(j), x)).collect();
        Matrix::from_columns(n, &cols)
    }

    pub fn star(&self, x: &[C<T>]) -> Option<Vec<C<T>>> {
        let j = self.star.as_ref()?;
        Some(j.mul_vec(&x.iter().map(|z| z.conj()).collect::<Vec<_>>()))
    }

    /// Largest relative associativity defect: exhaustive over basis triples
    /// for `dim ≤ 16`, otherwise over `samples` random triples.
    pub fn associativity_residual(&self, samples: usize, seed: u64) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        let check = |x: &[C<T>], y: &[C<T>], z: &[C<T>]| -> T {
            let l = self.mul(&self.mul(x, y), z);
            let r = self.mul(x, &self.mul(y, z));
            let scale = vnorm(x) * vnorm(y) * vnorm(z);
            vnorm(&vsub(&l, &r)) / scale.max(T::min_positive_value())
        };
        if n <= 16 {
            let e: Vec<Vec<C<T>>> = (0..n).map(|i| self.basis_element(i)).collect();
            for x in &e {
                for y in &e {
                    for z in &e {
                        worst = worst.max(check(x, y, z));
                    }
                }
            }
        } else {
            let mut rng = rng::seeded(seed);
            for _ in 0..samples {
                let (x, y, z) = (self.random_element(&mut rng), self.random_element(&mut rng), self.random_element(&mut rng));
                worst = worst.max(check(&x, &y, &z));
            }
        }
        worst
    }

    /// The unit, if the algebra has one.
    pub fn unit(&self) -> Option<Vec<C<T>>> {
        let n = self.dim;
        if n == 0 {
            return Some(vec![]);
        }
        // e·e_j = e_j and e_j·e = e_j for all j: linear in e
        let mut rows = Matrix::zeros(2 * n * n, n);
        let mut rhs = vec![C::zero(); 2 * n * n];
        for j in 0..n {
            for k in 0..n {
                for a in 0..n {
                    rows[(j * n + k, a)] = self.constant(a, j, k);
                    rows[(n * n + j * n + k, a)] = self.constant(j, a, k);
                }
                if j == k {
                    rhs[j * n + k] = C::one();
                    rhs[n * n + j * n + k] = C::one();
                }
            }
        }
        let ls = least_squares(&rows, &rhs).ok()?;
        (ls.relative_residual() <= T::default_tol()).then_some(ls.x)
    }

    /// Largest distance from `span(Q)` of `e_i q` and `q e_i` over basis
    /// elements and the orthonormal columns `q` of `Q`.
    pub fn ideal_residual(&self, q: &Matrix<T>) -> T {
        let mut worst = T::zero();
        for s in q.columns() {
            for i in 0..self.dim {
                let e = self.basis_element(i);
                worst = worst.max(distance_to_span(q, &self.mul(&e, &s)));
                worst = worst.max(distance_to_span(q, &self.mul(&s, &e)));
            }
        }
        worst
    }

    /// `A/I` on the orthogonal complement of the ideal spanned by the
    /// orthonormal columns of `ideal`; also returns the complement basis.
    pub fn quotient(&self, ideal: &Matrix<T>) -> Result<(Self, Matrix<T>)> {
        let n = self.dim;
        let res = self.ideal_residual(ideal);
        if res > T::tol_times(10.0) {
            return Err(Error::NotAnIdeal(res.to_f64_lossy()));
        }
        let comp = if ideal.cols() == 0 {
            Matrix::identity(n)
        } else {
            null_space(&ideal.adjoint(), T::default_tol())
        };
        let k = comp.cols();
        let cols = comp.columns();
        let qh = comp.adjoint();
        let mut c = vec![C::zero(); k * k * k];
        for a in 0..k {
            for b in 0..k {
                let p = qh.mul_vec(&self.mul(&cols[a], &cols[b]));
                c[(a * k + b) * k..(a * k + b + 1) * k].copy_from_slice(&p);
            }
        }
        let star = self.star.as_ref().map(|j| {
            let sc: Vec<Vec<C<T>>> = cols
                .iter()
                .map(|v| qh.mul_vec(&j.mul_vec(&v.iter().map(|z| z.conj()).collect::<Vec<_>>())))
                .collect();
            Matrix::from_columns(k, &sc)
        });
        Ok((Self { dim: k, c, star }, comp))
    }
}

/// Result of a quasi-inverse solve.
#[derive(Clone, Debug)]
pub enum QiOutcome<T> {
    /// `y` satisfies both equations to the acceptance tolerance.
    Invertible(QuasiInverseCertificate<T>),
    /// Relative residual in `(1e−9, 1e−6]`: not decided.
    Borderline(QuasiInverseCertificate<T>),
    /// No quasi-inverse; carries the relative residual of the best attempt.
    NotInvertible(T),
}

impl<T: Real> QiOutcome<T> {
    pub fn is_invertible(&self) -> bool {
        matches!(self, QiOutcome::Invertible(_))
    }

    pub fn is_borderline(&self) -> bool {
        matches!(self, QiOutcome::Borderline(_))
    }

    pub fn certificate(&self) -> Option<&QuasiInverseCertificate<T>> {
        match self {
            QiOutcome::Invertible(c) | QiOutcome::Borderline(c) => Some(c),
            QiOutcome::NotInvertible(_) => None,
        }
    }
}

/// A quasi-inverse `y` with the relative residuals of its two equations.
#[derive(Clone, Debug)]
pub struct QuasiInverseCertificate<T> {
    pub y: Vec<C<T>>,
    /// `‖y − x − (left product)‖`, relative.
    pub residual_left: T,
    /// `‖y − x − (right product)‖`, relative.
    pub residual_right: T,
}

/// Solves `(I − P) y = x` and `(I − Q) y = x` jointly.
fn solve_qi<T: Real>(p: &Matrix<T>, q: &Matrix<T>, x: &[C<T>]) -> QiOutcome<T> {
    let n = x.len();
    if n == 0 {
        return QiOutcome::Invertible(QuasiInverseCertificate {
            y: vec![],
            residual_left: T::zero(),
            residual_right: T::zero(),
        });
    }
    let id = Matrix::<T>::identity(n);
    let top = &id - p;
    let bottom = &id - q;
    let mut a = Matrix::zeros(2 * n, n);
    a.set_block(0, 0, &top);
    a.set_block(n, 0, &bottom);
    let mut b = x.to_vec();
    b.extend_from_slice(x);
    let ls = least_squares_truncated(&a, &b, T::lit(QI_RANK_CUT)).expect("shapes agree");
    let scale = |m: &Matrix<T>| crate::matkernel::op_norm_unchecked(m) * vnorm(&ls.x) + vnorm(x);
    let rel = |m: &Matrix<T>| {
        let r = vnorm(&vsub(&m.mul_vec(&ls.x), x));
        let s = scale(m);
        if s.is_zero() {
            r
        } else {
            r / s
        }
    };
    let cert = QuasiInverseCertificate { residual_left: rel(&top), residual_right: rel(&bottom), y: ls.x.clone() };
    let worst = cert.residual_left.max(cert.residual_right);
    if worst <= T::lit(QI_ACCEPT) {
        QiOutcome::Invertible(cert)
    } else if worst <= T::lit(QI_BORDERLINE) {
        QiOutcome::Borderline(cert)
    } else {
        QiOutcome::NotInvertible(worst)
    }
}

/// Quasi-inverse of `x` in the homotope `A_u`: `y − x = x u y = y u x`.
pub fn quasi_inverse_assoc<T: Real>(a: &AssocAlgebra<T>, x: &[C<T>], u: &[C<T>]) -> Result<QiOutcome<T>> {
    if x.len() != a.dim() || u.len() != a.dim() {
        return Err(Error::Shape("element length differs from algebra dimension".into()));
    }
    let xu = a.mul(x, u);
    let ux = a.mul(u, x);
    Ok(solve_qi(&a.left_matrix(&xu), &a.right_matrix(&ux), x))
}

/// Quasi-inverse of `x` in the ternary homotope `M_u`: `y − x = [y u x] = [x u y]`.
pub fn quasi_inverse_ternary<T: Real>(
    m: &TernarySpace<T>,
    x: &TernaryElement<T>,
    u: &TernaryElement<T>,
) -> Result<QiOutcome<T>> {
    if x.dim() != m.dim() || u.dim() != m.dim() {
        return Err(Error::Shape("element length differs from space dimension".into()));
    }
    let left = m.left_multiplication(x, u); // y ↦ [x u y]
    let right = m.right_multiplication(u, x); // y ↦ [y u x]
    Ok(solve_qi(&right, &left, &x.coords))
}

/// Orthonormal basis (columns) of the Jacobson radical.
pub fn jacobson_radical<T: Real>(a: &AssocAlgebra<T>) -> Matrix<T> {
    let n = a.dim();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    // t_k = tr L_{e_k}; T_ij = tr L_{e_i e_j} = Σ_k c_ijk t_k
    let t: Vec<C<T>> = (0..n).map(|k| (0..n).map(|m| a.constant(k, m, m)).sum()).collect();
    // rows of K^T: one per a ∈ basis of A⁺ (basis of A plus the adjoined unit)
    let mut kt = Matrix::zeros(n + 1, n);
    for i in 0..n {
        for j in 0..n {
            let tij: C<T> = (0..n).map(|k| a.constant(i, j, k) * t[k]).sum();
            kt[(j, i)] = tij;
        }
        kt[(n, i)] = t[i];
    }
    let scale = kt.max_abs();
    if scale.is_zero() {
        return Matrix::identity(n);
    }
    null_space(&kt, T::tol_times(10.0))
}

/// Audit of a computed radical.
#[derive(Clone, Debug)]
pub struct RadicalAudit<T> {
    pub dim: usize,
    /// Ideal defect of the radical subspace.
    pub ideal_residual: T,
    /// Dimension of `Rad(A / Rad A)`; zero when the computation is consistent.
    pub quotient_radical_dim: usize,
    /// Sampled `(x, u)` with `x` in the radical that were not quasi-invertible.
    pub qi_failures: usize,
    pub borderline: usize,
    /// Radical elements whose adjoint left the radical (`None` without involution).
    pub star_residual: Option<T>,
}

impl<T: Real> RadicalAudit<T> {
    pub fn passed(&self) -> bool {
        self.ideal_residual <= T::tol_times(10.0)
            && self.quotient_radical_dim == 0
            && self.qi_failures == 0
            && self.star_residual.is_none_or(|r| r <= T::tol_times(10.0))
    }
}

/// Checks the radical `rad` of `a` with `samples` homotope solves per basis vector.
pub fn audit_radical<T: Real>(a: &AssocAlgebra<T>, rad: &Matrix<T>, samples: usize, seed: u64) -> Result<RadicalAudit<T>> {
    let ideal_residual = a.ideal_residual(rad);
    let (q, _) = a.quotient(rad)?;
    let quotient_radical_dim = jacobson_radical(&q).cols();
    let mut rng = rng::seeded(seed);
    let mut qi_failures = 0;
    let mut borderline = 0;
    for x in rad.columns() {
        for _ in 0..samples {
            let u = a.random_element(&mut rng);
            match quasi_inverse_assoc(a, &x, &u)? {
                QiOutcome::Invertible(_) => {}
                QiOutcome::Borderline(_) => borderline += 1,
                QiOutcome::NotInvertible(_) => qi_failures += 1,
            }
        }
    }
    let star_residual = a.star.as_ref().map(|_| {
        rad.columns()
            .iter()
            .map(|x| distance_to_span(rad, &a.star(x).expect("involution")))
            .fold(T::zero(), T::max)
    });
    Ok(RadicalAudit { dim: rad.cols(), ideal_residual, quotient_radical_dim, qi_failures, borderline, star_residual })
}

/// Associative envelope `[[L, M], [M̄, R]]` of an abstract triple system.
///
/// `L = span{ℓ(x, y) : h ↦ [x y h]}` and `R = span{r(u, v) : h ↦ [h u v]}`
/// act on coordinates of `M`; the product is
///
/// ```text
/// (A, f, ḡ, B)(A', f', ḡ', B') = (A∘A' + ℓ(f, g'),  A f' + B' f,
///                                 (A'^♯ g + B^♯ g')‾,  r(g, f') + B'∘B)
/// ```
///
/// with `ℓ(x, y)^♯ = ℓ(y, x)` and `r(u, v)^♯ = r(v, u)`. The `M̄` slot stores
/// `conj(g)` so the product is bilinear in coordinates.
#[derive(Clone, Debug)]
pub struct AbstractEnvelope<T> {
    pub algebra: AssocAlgebra<T>,
    pub layout: CornerLayout,
}

struct OperatorSpan<T> {
    mats: Vec<Matrix<T>>,
    /// `conj` of the matrix of `(basis_k)^♯`.
    sharp_conj: Vec<Matrix<T>>,
    pinv: Matrix<T>,
}

impl<T: Real> OperatorSpan<T> {
    /// `ops[a][b]` is the operator attached to the pair `(e_a, e_b)`.
    fn new(ops: &[Vec<Matrix<T>>]) -> Self {
        let n = ops.len();
        let scale = ops.iter().flatten().map(|m| m.fro_norm()).fold(T::zero(), T::max);
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        let mut q = Matrix::zeros(n * n, 0);
        if scale > T::zero() {
            for a in 0..n {
                for b in 0..n {
                    let v = ops[a][b].as_slice().to_vec();
                    if distance_to_span(&q, &v) > scale * T::tol_times(10.0) {
                        chosen.push((a, b));
                        let mut cols = q.columns();
                        cols.push(v);
                        q = orthonormal_basis(n * n, &cols, T::default_tol());
                    }
                }
            }
        }
        let mats: Vec<Matrix<T>> = chosen.iter().map(|&(a, b)| ops[a][b].clone()).collect();
        let stacked = Matrix::from_columns(n * n, &mats.iter().map(|m| m.as_slice().to_vec()).collect::<Vec<_>>());
        let pinv = pseudo_inverse(&stacked, T::tol_times(1.0));
        let sharp_conj = chosen.iter().map(|&(a, b)| ops[b][a].conj()).collect();
        Self { mats, sharp_conj, pinv }
    }

    fn dim(&self) -> usize {
        self.mats.len()
    }

    fn combine(&self, coords: &[C<T>], n: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(n, n);
        for (c, b) in coords.iter().zip(&self.mats) {
            if !c.is_zero() {
                m += &b.scale(*c);
            }
        }
        m
    }

    fn sharp_conj_combine(&self, coords: &[C<T>], n: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(n, n);
        for (c, b) in coords.iter().zip(&self.sharp_conj) {
            if !c.is_zero() {
                m += &b.scale(*c);
            }
        }
        m
    }

    fn project(&self, m: &Matrix<T>) -> Vec<C<T>> {
        self.pinv.mul_vec(m.as_slice())
    }
}

/// Builds the [`AbstractEnvelope`] of any presentation of `M`.
pub fn abstract_envelope<T: Real>(m: &TernarySpace<T>) -> Result<AbstractEnvelope<T>> {
    let n = m.dim();
    let e = m.basis_elements();
    let lops: Vec<Vec<Matrix<T>>> = (0..n)
        .map(|a| (0..n).map(|b| m.left_multiplication(&e[a], &e[b])).collect())
        .collect();
    let rops: Vec<Vec<Matrix<T>>> = (0..n)
        .map(|a| (0..n).map(|b| m.right_multiplication(&e[a], &e[b])).collect())
        .collect();
    let l = OperatorSpan::new(&lops);
    let r = OperatorSpan::new(&rops);
    let (dl, dr) = (l.dim(), r.dim());
    let dim = dl + 2 * n + dr;
    let (fo, wo, ro) = (dl, dl + n, dl + 2 * n);
    let split = |x: &[C<T>]| -> (Vec<C<T>>, Vec<C<T>>, Vec<C<T>>, Vec<C<T>>) {
        (x[..fo].to_vec(), x[fo..wo].to_vec(), x[wo..ro].to_vec(), x[ro..].to_vec())
    };
    let mul = |x: &[C<T>], y: &[C<T>]| -> Vec<C<T>> {
        let (la, f, w, lb) = split(x);
        let (la2, f2, w2, lb2) = split(y);
        let a = l.combine(&la, n);
        let a2 = l.combine(&la2, n);
        let b = r.combine(&lb, n);
        let b2 = r.combine(&lb2, n);
        // ℓ(f, g') = Σ f_a w'_b ℓ_ab and r(g, f') = Σ w_a f'_b r_ab
        let mut lfg = &a * &a2;
        let mut rgf = &b2 * &b;
        for i in 0..n {
            for j in 0..n {
                let s = f[i] * w2[j];
                if !s.is_zero() {
                    lfg += &lops[i][j].scale(s);
                }
                let t = w[i] * f2[j];
                if !t.is_zero() {
                    rgf += &rops[i][j].scale(t);
                }
            }
        }
        let ur = crate::matkernel::vadd(&a.mul_vec(&f2), &b2.mul_vec(&f));
        let ll = crate::matkernel::vadd(
            &l.sharp_conj_combine(&la2, n).mul_vec(&w),
            &r.sharp_conj_combine(&lb, n).mul_vec(&w2),
        );
        let mut out = l.project(&lfg);
        out.extend(ur);
        out.extend(ll);
        out.extend(r.project(&rgf));
        out
    };
    let basis = |i: usize| {
        let mut v = vec![C::zero(); dim];
        v[i] = C::one();
        v
    };
    let mut c = vec![C::zero(); dim * dim * dim];
    for a in 0..dim {
        let ea = basis(a);
        for b in 0..dim {
            let p = mul(&ea, &basis(b));
            c[(a * dim + b) * dim..(a * dim + b + 1) * dim].copy_from_slice(&p);
        }
    }
    // involution (A, f, ḡ, B) ↦ (A^♯, g, f̄, B^♯), conjugate-linear
    let mut star = Matrix::zeros(dim, dim);
    for k in 0..dl {
        let s = l.project(&l.sharp_conj[k].conj());
        for (i, v) in s.into_iter().enumerate() {
            star[(i, k)] = v;
        }
    }
    for k in 0..dr {
        let s = r.project(&r.sharp_conj[k].conj());
        for (i, v) in s.into_iter().enumerate() {
            star[(ro + i, ro + k)] = v;
        }
    }
    for i in 0..n {
        // f-coordinate i becomes conj(f_i) in the w slot; w_i becomes conj(w_i) as g in the f slot
        star[(wo + i, fo + i)] = C::one();
        star[(fo + i, wo + i)] = C::one();
    }
    let layout = CornerLayout {
        l: (0..dl).collect(),
        m: (fo..wo).collect(),
        mbar: (wo..ro).collect(),
        r: (ro..dim).collect(),
    };
    Ok(AbstractEnvelope { algebra: AssocAlgebra::new_unchecked(dim, c, Some(star)), layout })
}

/// Radical of a ternary ring with its audit.
#[derive(Clone, Debug)]
pub struct TernaryRadical<T> {
    pub basis: Vec<TernaryElement<T>>,
    /// Dimension of the Jacobson radical of the envelope.
    pub envelope_radical_dim: usize,
    pub envelope_dim: usize,
    /// Sampled `(x, u)` with `x` in the radical that were not quasi-invertible in `M_u`.
    pub qi_failures: usize,
    pub borderline: usize,
}

impl<T: Real> TernaryRadical<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_semisimple(&self) -> bool {
        self.basis.is_empty()
    }
}

/// `Rad M = Rad 𝒜(M) ∩ M`, computed on the standard embedding for block
/// presentations and on the [`AbstractEnvelope`] otherwise. Each radical
/// basis element is audited with `samples` ternary homotope solves.
pub fn ternary_radical<T: Real>(m: &TernarySpace<T>, samples: usize, seed: u64) -> Result<TernaryRadical<T>> {
    let n = m.dim();
    let (alg, envelope_dim, basis) = match m {
        TernarySpace::Blocks(_) => {
            let e = build_embedding(m)?;
            let (alg, _) = e.to_assoc_algebra()?;
            let rad = jacobson_radical(&alg);
            let split = peirce_split(&e, &rad.columns().into_iter().map(EmbeddingElement::new).collect::<Vec<_>>())?;
            let basis = split.m_part(&e);
            (alg, e.dim(), basis)
        }
        TernarySpace::Structure(_) => {
            let env = abstract_envelope(m)?;
            let rad = jacobson_radical(&env.algebra);
            let vecs: Vec<Vec<C<T>>> = rad
                .columns()
                .into_iter()
                .map(|c| env.layout.m.iter().map(|&i| c[i]).collect())
                .collect();
            let q = orthonormal_basis(n, &vecs, T::tol_times(10.0));
            let basis = q.columns().into_iter().map(TernaryElement::new).collect();
            let d = env.algebra.dim();
            (env.algebra, d, basis)
        }
    };
    let envelope_radical_dim = jacobson_radical(&alg).cols();
    let mut rng = rng::seeded(seed);
    let mut qi_failures = 0;
    let mut borderline = 0;
    for x in &basis {
        for _ in 0..samples {
            let u = m.random_element(&mut rng);
            match quasi_inverse_ternary(m, x, &u)? {
                QiOutcome::Invertible(_) => {}
                QiOutcome::Borderline(_) => borderline += 1,
                QiOutcome::NotInvertible(_) => qi_failures += 1,
            }
        }
    }
    Ok(TernaryRadical { basis, envelope_radical_dim, envelope_dim, qi_failures, borderline })
}

/// Outcomes of the two sides of an equivalence.
#[derive(Clone, Debug)]
pub struct EquivalenceCheck<T> {
    pub left: QiOutcome<T>,
    pub right: QiOutcome<T>,
}

impl<T: Real> EquivalenceCheck<T> {
    /// `Some(true)` if both sides agree, `Some(false)` on a counterexample,
    /// `None` if either side is borderline.
    pub fn verdict(&self) -> Option<bool> {
        if self.left.is_borderline() || self.right.is_borderline() {
            None
        } else {
            Some(self.left.is_invertible() == self.right.is_invertible())
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict() == Some(true)
    }
}

/// `x` quasi-invertible in `M_u` versus `[[0, x], [0, 0]]` quasi-invertible
/// in `𝒜(M)` at `[[0, 0], [ū, 0]]`.
pub fn check_corner_qi_equivalence<T: Real>(
    e: &StandardEmbedding<T>,
    alg: &AssocAlgebra<T>,
    x: &TernaryElement<T>,
    u: &TernaryElement<T>,
) -> Result<EquivalenceCheck<T>> {
    let left = quasi_inverse_ternary(e.base(), x, u)?;
    let right = quasi_inverse_assoc(alg, &e.embed_m(x).coords, &e.embed_mbar(u).coords)?;
    Ok(EquivalenceCheck { left, right })
}

/// `x` quasi-invertible in `A_y` versus `y` quasi-invertible in `A_x`.
pub fn check_symmetry_principle<T: Real>(a: &AssocAlgebra<T>, x: &[C<T>], y: &[C<T>]) -> Result<EquivalenceCheck<T>> {
    Ok(EquivalenceCheck { left: quasi_inverse_assoc(a, x, y)?, right: quasi_inverse_assoc(a, y, x)? })
}

/// Linear maps `φ, ψ` on an algebra satisfying `φ(x) z φ(y) = φ(x ψ(z) y)`
/// and `ψ(x) z ψ(y) = ψ(x φ(z) y)`.
#[derive(Clone, Debug)]
pub struct ShiftingPair<T> {
    pub phi: Matrix<T>,
    pub psi: Matrix<T>,
    /// Largest defect of the two identities over basis triples.
    pub defect: T,
}

impl<T: Real> ShiftingPair<T> {
    /// Validates both identities on all basis triples.
    pub fn new(a: &AssocAlgebra<T>, phi: Matrix<T>, psi: Matrix<T>) -> Result<Self> {
        let n = a.dim();
        if phi.shape() != (n, n) || psi.shape() != (n, n) {
            return Err(Error::Shape("endomorphism matrices must be dim × dim".into()));
        }
        let e: Vec<Vec<C<T>>> = (0..n).map(|i| a.basis_element(i)).collect();
        let pe: Vec<Vec<C<T>>> = e.iter().map(|v| phi.mul_vec(v)).collect();
        let se: Vec<Vec<C<T>>> = e.iter().map(|v| psi.mul_vec(v)).collect();
        let mut defect = T::zero();
        for x in 0..n {
            for z in 0..n {
                let pxz = a.mul(&pe[x], &e[z]);
                let sxz = a.mul(&se[x], &e[z]);
                let x_psi_z = a.mul(&e[x], &se[z]);
                let x_phi_z = a.mul(&e[x], &pe[z]);
                for y in 0..n {
                    let l1 = a.mul(&pxz, &pe[y]);
                    let r1 = phi.mul_vec(&a.mul(&x_psi_z, &e[y]));
                    let l2 = a.mul(&sxz, &se[y]);
                    let r2 = psi.mul_vec(&a.mul(&x_phi_z, &e[y]));
                    defect = defect.max(vnorm(&vsub(&l1, &r1))).max(vnorm(&vsub(&l2, &r2)));
                }
            }
        }
        if defect > T::tol_times(10.0) {
            return Err(Error::PreconditionFailed(format!(
                "shifting identities fail on the basis (defect {:.3e})",
                defect.to_f64_lossy()
            )));
        }
        Ok(Self { phi, psi, defect })
    }

    /// `x` quasi-invertible in `A_{ψ(y)}` versus `φ(x)` quasi-invertible in `A_y`.
    pub fn check(&self, a: &AssocAlgebra<T>, x: &[C<T>], y: &[C<T>]) -> Result<EquivalenceCheck<T>> {
        let left = quasi_inverse_assoc(a, x, &self.psi.mul_vec(y))?;
        let right = quasi_inverse_assoc(a, &self.phi.mul_vec(x), y)?;
        Ok(EquivalenceCheck { left, right })
    }
}

pub fn check_shifting_principle<T: Real>(
    a: &AssocAlgebra<T>,
    phi: &Matrix<T>,
    psi: &Matrix<T>,
    x: &[C<T>],
    y: &[C<T>],
) -> Result<EquivalenceCheck<T>> {
    ShiftingPair::new(a, phi.clone(), psi.clone())?.check(a, x, y)
}

/// Coordinate projection onto the given indices.
pub fn coordinate_projection<T: Real>(dim: usize, idx: &[usize]) -> Matrix<T> {
    let mut p = Matrix::zeros(dim, dim);
    for &i in idx {
        p[(i, i)] = C::one();
    }
    p
}

/// `u` with `x` not quasi-invertible in `M_u`: per block `u = ±x/‖x‖²`, so
/// `y ↦ [x u y]` fixes the top left singular directions of `x`.
pub fn critical_ternary_partner<T: Real>(m: &TernarySpace<T>, x: &TernaryElement<T>) -> Result<TernaryElement<T>> {
    let mats = m.element_matrices(x)?;
    let bs = m.blocks().ok_or(Error::NormUnavailable)?;
    let mut u = Vec::with_capacity(mats.len());
    for (xm, b) in mats.iter().zip(bs) {
        let s = crate::matkernel::op_norm_unchecked(xm);
        if s.is_zero() {
            u.push(xm.clone());
        } else {
            let f = match b.sign() {
                Sign::Plus => T::one(),
                Sign::Minus => -T::one(),
            };
            u.push(xm.scale_real(f / (s * s)));
        }
    }
    Ok(m.element_from_matrices(&u)?.0)
}

/// `y` with `x y = q`, so that `x` is not quasi-invertible in `A_y` when
/// `q` is an idempotent with `q x ≠ 0`. `None` if `x` has no such partner.
pub fn critical_assoc_partner<T: Real>(a: &AssocAlgebra<T>, x: &[C<T>], q: &[C<T>]) -> Option<Vec<C<T>>> {
    let ls = least_squares(&a.left_matrix(x), q).ok()?;
    (ls.relative_residual() <= T::lit(1e-12).max(T::epsilon() * T::lit(100.0))).then_some(ls.x)
}

/// Tally of one sampled lemma check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrialCounts {
    pub trials: usize,
    pub agreements: usize,
    pub counterexamples: usize,
    pub borderline: usize,
    /// Trials in which both sides were not quasi-invertible.
    pub both_fail: usize,
}

impl TrialCounts {
    fn record<T: Real>(&mut self, c: &EquivalenceCheck<T>) {
        self.trials += 1;
        match c.verdict() {
            Some(true) => {
                self.agreements += 1;
                if !c.left.is_invertible() {
                    self.both_fail += 1;
                }
            }
            Some(false) => self.counterexamples += 1,
            None => self.borderline += 1,
        }
    }

    pub fn passed(&self) -> bool {
        self.trials > 0 && self.counterexamples == 0 && self.borderline == 0
    }
}

/// Results of [`lemma_suite`].
#[derive(Clone, Debug, Default)]
pub struct LemmaSuiteReport {
    pub corner: TrialCounts,
    pub symmetry: TrialCounts,
    pub shifting_diagonal: TrialCounts,
    pub shifting_off_diagonal: TrialCounts,
}

impl LemmaSuiteReport {
    pub fn passed(&self) -> bool {
        self.corner.passed() && self.symmetry.passed() && self.shifting_diagonal.passed() && self.shifting_off_diagonal.passed()
    }
}

/// Runs `trials` seeded checks of each equivalence lemma on `𝒜(M)`.
///
/// Every other trial is constructed to sit on the singular set (a critical
/// homotope), so both directions of each equivalence are exercised.
pub fn lemma_suite<T: Real>(m: &TernarySpace<T>, trials: usize, seed: u64) -> Result<LemmaSuiteReport> {
    let e = build_embedding(m)?;
    let (alg, layout) = e.to_assoc_algebra()?;
    let n = alg.dim();
    let mut rng = rng::seeded(seed);
    let mut report = LemmaSuiteReport::default();
    let one = e.identity().coords;
    let e1: Vec<C<T>> = (0..n).map(|i| if layout.l.contains(&i) { one[i] } else { C::zero() }).collect();
    let e2: Vec<C<T>> = (0..n).map(|i| if layout.r.contains(&i) { one[i] } else { C::zero() }).collect();
    let idempotents = [one.clone(), e1.clone(), e2];

    for t in 0..trials {
        let critical = t % 2 == 1;
        let x = m.random_element(&mut rng);
        let u = if critical { critical_ternary_partner(m, &x)? } else { m.random_element(&mut rng) };
        report.corner.record(&check_corner_qi_equivalence(&e, &alg, &x, &u)?);
    }

    for t in 0..trials {
        let x = alg.random_element(&mut rng);
        let y = if t % 2 == 1 {
            let q = &idempotents[(t / 2) % idempotents.len()];
            critical_assoc_partner(&alg, &x, q).unwrap_or_else(|| alg.random_element(&mut rng))
        } else {
            alg.random_element(&mut rng)
        };
        report.symmetry.record(&check_symmetry_principle(&alg, &x, &y)?);
    }

    let p_l = coordinate_projection::<T>(n, &layout.l);
    let diag = ShiftingPair::new(&alg, p_l.clone(), p_l)?;
    let l_alg = corner_algebra(&alg, &layout.l);
    for t in 0..trials {
        let x = alg.random_element(&mut rng);
        let y = if t % 2 == 1 {
            // φ(x) y = E₁ inside the corner L
            let px: Vec<C<T>> = layout.l.iter().map(|&i| x[i]).collect();
            let q: Vec<C<T>> = layout.l.iter().map(|&i| e1[i]).collect();
            match critical_assoc_partner(&l_alg, &px, &q) {
                Some(yl) => {
                    let mut y = vec![C::zero(); n];
                    for (k, &i) in layout.l.iter().enumerate() {
                        y[i] = yl[k];
                    }
                    y
                }
                None => alg.random_element(&mut rng),
            }
        } else {
            alg.random_element(&mut rng)
        };
        report.shifting_diagonal.record(&diag.check(&alg, &x, &y)?);
    }

    let off = ShiftingPair::new(
        &alg,
        coordinate_projection(n, &layout.m),
        coordinate_projection(n, &layout.mbar),
    )?;
    for t in 0..trials {
        let x = alg.random_element(&mut rng);
        let y = if t % 2 == 1 {
            let f = e.corner_m(&EmbeddingElement::new(x.clone()));
            e.embed_mbar(&critical_ternary_partner(m, &f)?).coords
        } else {
            alg.random_element(&mut rng)
        };
        report.shifting_off_diagonal.record(&off.check(&alg, &x, &y)?);
    }
    Ok(report)
}

/// The subalgebra on a coordinate subset closed under the product.
fn corner_algebra<T: Real>(a: &AssocAlgebra<T>, idx: &[usize]) -> AssocAlgebra<T> {
    let k = idx.len();
    let mut c = vec![C::zero(); k * k * k];
    for (ia, &a_) in idx.iter().enumerate() {
        for (ib, &b_) in idx.iter().enumerate() {
            for (ic, &c_) in idx.iter().enumerate() {
                c[(ia * k + ib) * k + ic] = a.constant(a_, b_, c_);
            }
        }
    }
    AssocAlgebra::new_unchecked(k, c, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::scalar::c;
    use crate::ternary::structure_constants_of;

    fn cv(v: &[f64]) -> Vec<C<f64>> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn scalar_algebra() -> AssocAlgebra<f64> {
        AssocAlgebra::full_matrix(1)
    }

    #[test]
    fn assoc_quasi_inverse_examples() {
        let a = scalar_algebra();
        let r = quasi_inverse_assoc(&a, &cv(&[0.0]), &cv(&[3.0])).unwrap();
        assert!(r.is_invertible() && r.certificate().unwrap().y[0].norm() < 1e-15);
        assert!(matches!(quasi_inverse_assoc(&a, &cv(&[1.0]), &cv(&[1.0])).unwrap(), QiOutcome::NotInvertible(_)));
        let r = quasi_inverse_assoc(&a, &cv(&[1.0]), &cv(&[0.5])).unwrap();
        assert!((r.certificate().unwrap().y[0] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ternary_quasi_inverse_examples() {
        let tro = instances::scalar::<f64>(Sign::Plus);
        let one = TernaryElement::new(cv(&[1.0]));
        let half = TernaryElement::new(cv(&[0.5]));
        let r = quasi_inverse_ternary(&tro, &one, &half).unwrap();
        assert!((r.certificate().unwrap().y[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(!quasi_inverse_ternary(&tro, &one, &one).unwrap().is_invertible());
        let anti = instances::scalar::<f64>(Sign::Minus);
        let r = quasi_inverse_ternary(&anti, &one, &one).unwrap();
        assert!((r.certificate().unwrap().y[0] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn radical_examples() {
        assert_eq!(jacobson_radical(&AssocAlgebra::<f64>::full_matrix(2)).cols(), 0);
        let d = AssocAlgebra::<f64>::dual_numbers();
        let rad = jacobson_radical(&d);
        assert_eq!(rad.cols(), 1);
        assert!(rad[(0, 0)].norm() < 1e-12 && (rad[(1, 0)].norm() - 1.0).abs() < 1e-12);
        let audit = audit_radical(&d, &rad, 50, 1).unwrap();
        assert!(audit.passed(), "{audit:?}");
        let e = build_embedding(&instances::scalar::<f64>(Sign::Minus)).unwrap();
        let (alg, _) = e.to_assoc_algebra().unwrap();
        assert_eq!(jacobson_radical(&alg).cols(), 0);
    }

    #[test]
    fn non_unital_nilpotent_radical() {
        // strictly upper triangular 3×3 matrices: the whole algebra is its radical
        let n = 3;
        let full = AssocAlgebra::<f64>::full_matrix(n);
        let idx: Vec<usize> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| i * n + j)).collect();
        let sub = corner_algebra(&full, &idx);
        assert_eq!(jacobson_radical(&sub).cols(), idx.len());
        // upper triangular: radical is the strictly upper part
        let idx: Vec<usize> = (0..n).flat_map(|i| (i..n).map(move |j| i * n + j)).collect();
        let up = corner_algebra(&full, &idx);
        let rad = jacobson_radical(&up);
        assert_eq!(rad.cols(), 3);
        assert!(audit_radical(&up, &rad, 20, 2).unwrap().passed());
    }

    #[test]
    fn quotient_by_radical_is_semisimple() {
        let d = AssocAlgebra::<f64>::dual_numbers();
        let rad = jacobson_radical(&d);
        let (q, _) = d.quotient(&rad).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(jacobson_radical(&q).cols(), 0);
        let bad = Matrix::from_columns(2, &[cv(&[1.0, 0.0])]);
        assert!(matches!(d.quotient(&bad), Err(Error::NotAnIdeal(_))));
    }

    #[test]
    fn units_of_algebras() {
        let u = AssocAlgebra::<f64>::full_matrix(2).unit().unwrap();
        assert!(vnorm(&vsub(&u, &cv(&[1.0, 0.0, 0.0, 1.0]))) < 1e-12);
        let full = AssocAlgebra::<f64>::full_matrix(2);
        let nil = corner_algebra(&full, &[1]);
        assert!(nil.unit().is_none());
    }

    #[test]
    fn ternary_radicals_of_semisimple_blocks() {
        for m in [
            instances::full_block::<f64>(2, 2, Sign::Plus),
            instances::full_block::<f64>(2, 2, Sign::Minus),
            instances::mixed_scalars::<f64>(),
        ] {
            let r = ternary_radical(&m, 10, 1).unwrap();
            assert!(r.is_semisimple());
            assert_eq!(r.envelope_radical_dim, 0);
        }
    }

    #[test]
    fn envelope_matches_embedding_for_structure_input() {
        for m in [instances::mixed_scalars::<f64>(), instances::full_block::<f64>(1, 2, Sign::Minus)] {
            let s = TernarySpace::Structure(structure_constants_of(&m));
            let env = abstract_envelope(&s).unwrap();
            let e = build_embedding(&m).unwrap();
            assert_eq!(env.algebra.dim(), e.dim());
            assert!(env.algebra.associativity_residual(100, 1) < 1e-10);
            let j = env.algebra.involution().unwrap();
            // anti-multiplicative involution
            let mut rng = rng::seeded(4);
            for _ in 0..10 {
                let (x, y) = (env.algebra.random_element(&mut rng), env.algebra.random_element(&mut rng));
                let lhs = env.algebra.star(&env.algebra.mul(&x, &y)).unwrap();
                let rhs = env.algebra.mul(&env.algebra.star(&y).unwrap(), &env.algebra.star(&x).unwrap());
                assert!(vnorm(&vsub(&lhs, &rhs)) < 1e-9 * (1.0 + vnorm(&lhs)), "{j:?}");
            }
            let r = ternary_radical(&s, 10, 1).unwrap();
            assert!(r.is_semisimple());
        }
    }

    #[test]
    fn zero_triple_product_is_its_own_radical() {
        let s = TernarySpace::Structure(crate::ternary::StructureConstants::<f64>::zeros(2));
        let r = ternary_radical(&s, 5, 1).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.qi_failures, 0);
    }

    #[test]
    fn symmetry_examples() {
        let a = scalar_algebra();
        assert!(check_symmetry_principle(&a, &cv(&[0.0]), &cv(&[7.0])).unwrap().holds());
        let c11 = check_symmetry_principle(&a, &cv(&[1.0]), &cv(&[1.0])).unwrap();
        assert!(c11.holds() && !c11.left.is_invertible());
    }

    #[test]
    fn shifting_rejects_bad_maps() {
        let a = AssocAlgebra::<f64>::full_matrix(2);
        let id = Matrix::identity(4);
        assert!(check_shifting_principle(&a, &id, &id, &cv(&[1.0, 0.0, 0.0, 0.0]), &cv(&[0.0, 1.0, 0.0, 0.0])).unwrap().holds());
        let twice = id.scale_real(2.0);
        assert!(matches!(ShiftingPair::new(&a, twice, id), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn corner_examples() {
        let m = instances::scalar::<f64>(Sign::Plus);
        let e = build_embedding(&m).unwrap();
        let (alg, _) = e.to_assoc_algebra().unwrap();
        let one = TernaryElement::new(cv(&[1.0]));
        let half = TernaryElement::new(cv(&[0.5]));
        let ok = check_corner_qi_equivalence(&e, &alg, &one, &half).unwrap();
        assert!(ok.holds() && ok.left.is_invertible());
        let bad = check_corner_qi_equivalence(&e, &alg, &one, &one).unwrap();
        assert!(bad.holds() && !bad.left.is_invertible());
    }

    #[test]
    fn lemma_suite_small() {
        let mut rng = rng::seeded(21);
        let m = instances::random_instance::<f64>(&mut rng, instances::InstanceKind::Mixed, 5);
        let r = lemma_suite(&m, 40, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.corner.both_fail > 0 && r.symmetry.both_fail > 0);
        assert!(r.shifting_diagonal.both_fail > 0 && r.shifting_off_diagonal.both_fail > 0);
    }
}
