//! Finite-dimensional C*-ternary rings.
//!
//! A [`TernarySpace`] is either a direct sum of [`SignedBlock`]s, each a
//! span of equally shaped matrices closed under `(x, y, z) ↦ ±x y* z`, or an
//! abstract tensor of [`StructureConstants`]. Elements are coordinate
//! vectors over the concatenated basis.
//!
//! The triple product is linear in the outer arguments and conjugate-linear
//! in the middle one. Norms exist only for the block presentation: the norm of
//! an element is the largest operator norm over its block components.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matkernel::{
    self, distance_to_span, herm_eig, herm_function, hs_inner, op_norm_unchecked, orthonormal_basis, orthonormal_basis_abs,
    svd, vdot, vnorm, vsub, Matrix,
};
use crate::rng::{self, Rng};
use crate::scalar::{re, Real, C};

/// Sign of a block's triple product: `+` for a TRO, `−` for an anti-TRO.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(s: i64) -> Result<Self> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("sign must be +1 or -1, got {other}"))),
        }
    }
}

/// A TRO (sign `+`) or anti-TRO (sign `−`) given by a basis of equally shaped matrices.
#[derive(Clone, Debug)]
pub struct SignedBlock<T> {
    sign: Sign,
    rows: usize,
    cols: usize,
    basis: Vec<Matrix<T>>,
    gram_inv: Matrix<T>,
}

impl<T: Real> SignedBlock<T> {
    /// Validates shape, finiteness, linear independence and closure of the span.
    pub fn new(sign: Sign, basis: Vec<Matrix<T>>) -> Result<Self> {
        let block = Self::new_unchecked_closure(sign, basis)?;
        let closure = block.closure_residual();
        if closure > T::tol_times(10.0) {
            return Err(Error::InvalidInput(format!(
                "span is not closed under x y* z (residual {:.3e})",
                closure.to_f64_lossy()
            )));
        }
        Ok(block)
    }

    /// Like [`SignedBlock::new`] without the closure check (which costs `dim³` products).
    pub(crate) fn new_unchecked_closure(sign: Sign, basis: Vec<Matrix<T>>) -> Result<Self> {
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidInput("a block needs at least one basis matrix".into()))?;
        let (rows, cols) = first.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("empty block shape".into()));
        }
        for b in &basis {
            if b.shape() != (rows, cols) {
                return Err(Error::Shape(format!(
                    "basis matrices of shapes {rows}x{cols} and {}x{}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput("non-finite basis entry".into()));
            }
        }
        let gram = gram_of(&basis);
        let eig = herm_eig(&gram, None)?;
        let lmax = eig.eigenvalues.last().copied().unwrap_or(T::zero());
        let lmin = eig.eigenvalues.first().copied().unwrap_or(T::zero());
        if lmax <= T::zero() || lmin <= lmax * T::default_tol() {
            return Err(Error::InvalidInput("block basis is linearly dependent".into()));
        }
        let gram_inv = gram.inverse()?;
        Ok(Self { sign, rows, cols, basis, gram_inv })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix<T>] {
        &self.basis
    }

    pub fn with_sign(&self, sign: Sign) -> Self {
        Self { sign, ..self.clone() }
    }

    /// Hilbert-Schmidt Gram matrix, `G_ij = ⟨b_j, b_i⟩`.
    pub fn gram(&self) -> Matrix<T> {
        gram_of(&self.basis)
    }

    /// `Σ c_i b_i`.
    pub fn combine(&self, coords: &[C<T>]) -> Matrix<T> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (ci, b) in coords.iter().zip(&self.basis) {
            if !ci.is_zero() {
                m += &b.scale(*ci);
            }
        }
        m
    }

    /// Coordinates of the HS-orthogonal projection of `m` onto the span,
    /// together with the Frobenius distance from `m` to the span.
    pub fn project(&self, m: &Matrix<T>) -> (Vec<C<T>>, T) {
        let rhs: Vec<C<T>> = self
            .basis
            .iter()
            .map(|b| hs_inner(m, b).expect("block shape"))
            .collect();
        let coords = self.gram_inv.mul_vec(&rhs);
        let residual = (m - &self.combine(&coords)).fro_norm();
        (coords, residual)
    }

    /// `sign · x y* z` as a matrix.
    pub fn raw_triple(&self, x: &Matrix<T>, y: &Matrix<T>, z: &Matrix<T>) -> Matrix<T> {
        (&(x * &y.adjoint()) * z).scale_real(self.sign.factor())
    }

    /// Largest relative projection residual of basis triple products.
    pub fn closure_residual(&self) -> T {
        let mut worst = T::zero();
        for x in &self.basis {
            for y in &self.basis {
                let xy = x * &y.adjoint();
                for z in &self.basis {
                    let p = &xy * z;
                    let scale = x.fro_norm() * y.fro_norm() * z.fro_norm();
                    let (_, r) = self.project(&p);
                    worst = worst.max(r / scale.max(T::min_positive_value()));
                }
            }
        }
        worst
    }

    /// Orthogonal projection onto the column space of the span (unit of `span(MM*)`).
    pub fn left_support(&self) -> Matrix<T> {
        support_projection(self.rows, self.basis.iter().flat_map(|b| b.columns()).collect())
    }

    /// Orthogonal projection onto the row space of the span (unit of `span(M*M)`).
    pub fn right_support(&self) -> Matrix<T> {
        support_projection(
            self.cols,
            self.basis.iter().flat_map(|b| b.adjoint().columns()).collect(),
        )
    }
}

fn gram_of<T: Real>(basis: &[Matrix<T>]) -> Matrix<T> {
    let n = basis.len();
    Matrix::from_fn(n, n, |i, j| hs_inner(&basis[j], &basis[i]).expect("block shape"))
}

fn support_projection<T: Real>(dim: usize, vectors: Vec<Vec<C<T>>>) -> Matrix<T> {
    let q = orthonormal_basis(dim, &vectors, T::default_tol());
    &q * &q.adjoint()
}

/// `[b_i b_j b_k] = Σ_l c[i][j][k][l] b_l`, conjugate-linear in `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<T> {
    dim: usize,
    c: Vec<C<T>>,
}

impl<T: Real> StructureConstants<T> {
    /// Checks only the tensor shape and finiteness; the associativity
    /// identities are reported by [`check_axioms`].
    pub fn new(dim: usize, c: Vec<C<T>>) -> Result<Self> {
        if c.len() != dim.pow(4) {
            return Err(Error::Shape(format!(
                "structure tensor of length {} for dimension {dim}",
                c.len()
            )));
        }
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite structure constant".into()));
        }
        Ok(Self { dim, c })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, c: vec![C::zero(); dim.pow(4)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C<T> {
        self.c[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: C<T>) {
        let ix = self.idx(i, j, k, l);
        self.c[ix] = v;
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.c
    }

    pub fn negated(&self) -> Self {
        Self { dim: self.dim, c: self.c.iter().map(|z| -*z).collect() }
    }

    /// `Σ x_i ȳ_j z_k c_ijkl`.
    pub fn triple(&self, x: &[C<T>], y: &[C<T>], z: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim;
        let mut out = vec![C::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j].conj();
                if xy.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let xyz = xy * z[k];
                    if xyz.is_zero() {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    for (o, cc) in out.iter_mut().zip(&self.c[base..base + n]) {
                        *o += xyz * *cc;
                    }
                }
            }
        }
        out
    }

    /// Structure constants in the basis `p_a = Σ_i P[i][a] e_i` given by the
    /// (invertible) columns of `p`.
    pub fn change_basis(&self, p: &Matrix<T>) -> Result<Self> {
        let n = self.dim;
        if p.shape() != (n, n) {
            return Err(Error::Shape("change of basis must be square".into()));
        }
        let pinv = p.inverse()?;
        let cols = p.columns();
        let mut out = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    let prod = self.triple(&cols[a], &cols[b], &cols[cc]);
                    let new = pinv.mul_vec(&prod);
                    for (d, v) in new.into_iter().enumerate() {
                        out.set(a, b, cc, d, v);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A finite-dimensional C*-ternary ring in one of its two presentations.
#[derive(Clone, Debug)]
pub enum TernarySpace<T> {
    /// Direct sum of signed blocks; the zero space is the empty list.
    Blocks(Vec<SignedBlock<T>>),
    Structure(StructureConstants<T>),
}

/// Coordinates over the basis of a [`TernarySpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryElement<T> {
    pub coords: Vec<C<T>>,
}

impl<T: Real> TernaryElement<T> {
    pub fn new(coords: Vec<C<T>>) -> Self {
        Self { coords }
    }

    pub fn zero(dim: usize) -> Self {
        Self { coords: vec![C::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coords[i] = C::one();
        e
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_norm(&self) -> T {
        vnorm(&self.coords)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { coords: self.coords.iter().map(|z| *z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coords: matkernel::vadd(&self.coords, &other.coords) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { coords: vsub(&self.coords, &other.coords) }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.is_zero())
    }
}

impl<T: Real> TernarySpace<T> {
    pub fn zero_blocks() -> Self {
        TernarySpace::Blocks(Vec::new())
    }

    /// Single-block space; validates the block.
    pub fn block(sign: Sign, basis: Vec<Matrix<T>>) -> Result<Self> {
        Ok(TernarySpace::Blocks(vec![SignedBlock::new(sign, basis)?]))
    }

    pub fn dim(&self) -> usize {
        match self {
            TernarySpace::Blocks(bs) => bs.iter().map(|b| b.dim()).sum(),
            TernarySpace::Structure(sc) => sc.dim(),
        }
    }

    pub fn is_blocks(&self) -> bool {
        matches!(self, TernarySpace::Blocks(_))
    }

    pub fn blocks(&self) -> Option<&[SignedBlock<T>]> {
        match self {
            TernarySpace::Blocks(bs) => Some(bs),
            TernarySpace::Structure(_) => None,
        }
    }

    /// Coordinate offset of each block.
    pub fn block_offsets(&self) -> Vec<usize> {
        match self {
            TernarySpace::Blocks(bs) => bs
                .iter()
                .scan(0, |acc, b| {
                    let o = *acc;
                    *acc += b.dim();
                    Some(o)
                })
                .collect(),
            TernarySpace::Structure(_) => vec![0],
        }
    }

    pub fn zero_element(&self) -> TernaryElement<T> {
        TernaryElement::zero(self.dim())
    }

    pub fn basis_element(&self, i: usize) -> TernaryElement<T> {
        TernaryElement::basis(self.dim(), i)
    }

    pub fn basis_elements(&self) -> Vec<TernaryElement<T>> {
        (0..self.dim()).map(|i| self.basis_element(i)).collect()
    }

    pub fn element(&self, coords: Vec<C<T>>) -> Result<TernaryElement<T>> {
        if coords.len() != self.dim() {
            return Err(Error::Shape(format!(
                "element with {} coordinates in a space of dimension {}",
                coords.len(),
                self.dim()
            )));
        }
        Ok(TernaryElement::new(coords))
    }

    pub fn random_element(&self, rng: &mut Rng) -> TernaryElement<T> {
        TernaryElement::new(rng::gaussian_vec(rng, self.dim()))
    }

    fn check(&self, x: &TernaryElement<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "element of dimension {} in a space of dimension {}",
                x.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Block components `Σ x_i b_i` of an element (block presentation only).
    pub fn element_matrices(&self, x: &TernaryElement<T>) -> Result<Vec<Matrix<T>>> {
        self.check(x)?;
        let bs = self.blocks().ok_or(Error::NormUnavailable)?;
        Ok(bs
            .iter()
            .zip(self.block_offsets())
            .map(|(b, o)| b.combine(&x.coords[o..o + b.dim()]))
            .collect())
    }

    /// Projects per-block matrices back to coordinates; returns the largest
    /// Frobenius projection residual.
    pub fn element_from_matrices(&self, mats: &[Matrix<T>]) -> Result<(TernaryElement<T>, T)> {
        let bs = self.blocks().ok_or(Error::NormUnavailable)?;
        if mats.len() != bs.len() {
            return Err(Error::Shape("one matrix per block expected".into()));
        }
        let mut coords = Vec::with_capacity(self.dim());
        let mut worst = T::zero();
        for (b, m) in bs.iter().zip(mats) {
            if m.shape() != (b.rows(), b.cols()) {
                return Err(Error::Shape("block matrix shape".into()));
            }
            let (c, r) = b.project(m);
            coords.extend(c);
            worst = worst.max(r);
        }
        Ok((TernaryElement::new(coords), worst))
    }

    /// Operator norm of an element: max over blocks.
    pub fn norm(&self, x: &TernaryElement<T>) -> Result<T> {
        Ok(self
            .element_matrices(x)?
            .iter()
            .map(op_norm_unchecked)
            .fold(T::zero(), T::max))
    }

    /// Positive inner product on coordinates: block-diagonal HS Gram for
    /// blocks, the identity for structure constants.
    pub fn gram(&self) -> Matrix<T> {
        let n = self.dim();
        match self {
            TernarySpace::Structure(_) => Matrix::identity(n),
            TernarySpace::Blocks(bs) => {
                let mut g = Matrix::zeros(n, n);
                for (b, o) in bs.iter().zip(self.block_offsets()) {
                    g.set_block(o, o, &b.gram());
                }
                g
            }
        }
    }

    pub fn triple(
        &self,
        x: &TernaryElement<T>,
        y: &TernaryElement<T>,
        z: &TernaryElement<T>,
    ) -> Result<TernaryElement<T>> {
        self.check(x)?;
        self.check(y)?;
        self.check(z)?;
        Ok(self.triple_unchecked(x, y, z))
    }

    pub(crate) fn triple_unchecked(
        &self,
        x: &TernaryElement<T>,
        y: &TernaryElement<T>,
        z: &TernaryElement<T>,
    ) -> TernaryElement<T> {
        match self {
            TernarySpace::Structure(sc) => TernaryElement::new(sc.triple(&x.coords, &y.coords, &z.coords)),
            TernarySpace::Blocks(bs) => {
                let mut out = Vec::with_capacity(self.dim());
                let mut o = 0;
                for b in bs {
                    let d = b.dim();
                    let (xs, ys, zs) = (&x.coords[o..o + d], &y.coords[o..o + d], &z.coords[o..o + d]);
                    if xs.iter().all(|c| c.is_zero())
                        || ys.iter().all(|c| c.is_zero())
                        || zs.iter().all(|c| c.is_zero())
                    {
                        out.extend(std::iter::repeat_n(C::zero(), d));
                    } else {
                        let m = b.raw_triple(&b.combine(xs), &b.combine(ys), &b.combine(zs));
                        out.extend(b.project(&m).0);
                    }
                    o += d;
                }
                TernaryElement::new(out)
            }
        }
    }

    /// Matrix of the complex-linear map `g ↦ [g y z]` in coordinates.
    pub fn right_multiplication(&self, y: &TernaryElement<T>, z: &TernaryElement<T>) -> Matrix<T> {
        let n = self.dim();
        let cols: Vec<Vec<C<T>>> = (0..n)
            .map(|k| self.triple_unchecked(&self.basis_element(k), y, z).coords)
            .collect();
        Matrix::from_columns(n, &cols)
    }

    /// Matrix of the complex-linear map `g ↦ [x y g]` in coordinates.
    pub fn left_multiplication(&self, x: &TernaryElement<T>, y: &TernaryElement<T>) -> Matrix<T> {
        let n = self.dim();
        let cols: Vec<Vec<C<T>>> = (0..n)
            .map(|k| self.triple_unchecked(x, y, &self.basis_element(k)).coords)
            .collect();
        Matrix::from_columns(n, &cols)
    }
}

/// `[x y z]`.
pub fn triple<T: Real>(
    m: &TernarySpace<T>,
    x: &TernaryElement<T>,
    y: &TernaryElement<T>,
    z: &TernaryElement<T>,
) -> Result<TernaryElement<T>> {
    m.triple(x, y, z)
}

/// Smallest sub-TRO (or anti-TRO, by `sign`) containing the generators; the
/// returned block has an HS-orthonormal basis.
pub fn ternary_closure<T: Real>(generators: &[Matrix<T>], sign: Sign) -> Result<TernarySpace<T>> {
    const MAX_ROUNDS: usize = 64;
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidInput("empty generator list".into()))?;
    let (rows, cols) = first.shape();
    for g in generators {
        if g.shape() != (rows, cols) {
            return Err(Error::Shape("generators of different shapes".into()));
        }
        if !g.is_finite() {
            return Err(Error::InvalidInput("non-finite generator entry".into()));
        }
    }
    let scale = generators.iter().map(|g| g.fro_norm()).fold(T::zero(), T::max);
    if scale.is_zero() {
        return Err(Error::InvalidInput("generators span the zero space".into()));
    }
    let abs_tol = scale * T::default_tol();
    let size = rows * cols;
    let to_vec = |m: &Matrix<T>| m.as_slice().to_vec();
    let from_vec = |v: Vec<C<T>>| Matrix::from_vec(rows, cols, v).expect("shape");

    let mut vectors: Vec<Vec<C<T>>> = generators.iter().map(|g| to_vec(&g.scale_real(scale.recip()))).collect();
    let mut basis = matkernel::orthonormal_basis_abs(size, &vectors, T::default_tol());
    if basis.cols() == 0 {
        return Err(Error::InvalidInput("generators span the zero space".into()));
    }
    for _round in 0..MAX_ROUNDS {
        let mats: Vec<Matrix<T>> = basis.columns().into_iter().map(from_vec).collect();
        vectors = mats.iter().map(to_vec).collect();
        for x in &mats {
            for y in &mats {
                let xy = x * &y.adjoint();
                for z in &mats {
                    let p = &xy * z;
                    if distance_to_span(&basis, p.as_slice()) > abs_tol.min(T::default_tol()) {
                        vectors.push(to_vec(&p));
                    }
                }
            }
        }
        let next = matkernel::orthonormal_basis_abs(size, &vectors, T::default_tol());
        if next.cols() == basis.cols() {
            let mats: Vec<Matrix<T>> = next.columns().into_iter().map(from_vec).collect();
            return Ok(TernarySpace::Blocks(vec![SignedBlock::new_unchecked_closure(sign, mats)?]));
        }
        basis = next;
    }
    Err(Error::ClosureDidNotStabilize(MAX_ROUNDS))
}

/// Maximum residuals of the C*-ternary ring axioms over random and basis samples.
#[derive(Clone, Debug)]
pub struct AxiomReport<T> {
    pub samples: usize,
    pub basis_quintuples: usize,
    /// `‖[x, λy, z] − λ̄[x, y, z]‖`, relative.
    pub conjugate_linearity: T,
    /// `[[xyz]uv] = [x[uzy]v]`, relative.
    pub associativity_outer: T,
    /// `[x[uzy]v] = [xy[zuv]]`, relative.
    pub associativity_inner: T,
    /// `max(0, ‖[xyz]‖ − ‖x‖‖y‖‖z‖)` over `‖x‖‖y‖‖z‖`; `None` without norms.
    pub norm_bound: Option<T>,
    /// `|‖[xxx]‖ − ‖x‖³|` over `‖x‖³`; `None` without norms.
    pub cube_norm: Option<T>,
    pub norms_available: bool,
    pub tolerance: T,
}

impl<T: Real> AxiomReport<T> {
    /// Names of the identities whose residual exceeds the tolerance.
    pub fn failing(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let tol = self.tolerance;
        if !(self.conjugate_linearity <= tol) {
            out.push("conjugate_linearity");
        }
        if !(self.associativity_outer <= tol) {
            out.push("associativity_outer");
        }
        if !(self.associativity_inner <= tol) {
            out.push("associativity_inner");
        }
        if let Some(r) = self.norm_bound {
            if !(r <= tol) {
                out.push("norm_bound");
            }
        }
        if let Some(r) = self.cube_norm {
            if !(r <= tol) {
                out.push("cube_norm");
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failing().is_empty()
    }
}

const EXHAUSTIVE_QUINTUPLE_BUDGET: usize = 8000;

/// Checks the C*-ternary ring axioms on `samples` random tuples (and on all
/// basis quintuples when there are few). Norm axioms are skipped, and flagged,
/// for the structure-constant presentation.
pub fn check_axioms<T: Real>(m: &TernarySpace<T>, samples: usize, seed: u64) -> AxiomReport<T> {
    let mut rng = rng::seeded(seed);
    let n = m.dim();
    let norms_available = m.is_blocks();
    let size = |x: &TernaryElement<T>| -> T {
        if norms_available {
            m.norm(x).unwrap_or(T::zero())
        } else {
            x.coord_norm()
        }
    };
    let tiny = T::min_positive_value();
    let mut conj = T::zero();
    let mut outer = T::zero();
    let mut inner = T::zero();
    let mut nbound = T::zero();
    let mut cube = T::zero();

    let assoc = |x: &TernaryElement<T>,
                     y: &TernaryElement<T>,
                     z: &TernaryElement<T>,
                     u: &TernaryElement<T>,
                     v: &TernaryElement<T>| {
        let scale = (size(x) * size(y) * size(z) * size(u) * size(v)).max(tiny);
        let a = m.triple_unchecked(&m.triple_unchecked(x, y, z), u, v);
        let b = m.triple_unchecked(x, &m.triple_unchecked(u, z, y), v);
        let c = m.triple_unchecked(x, y, &m.triple_unchecked(z, u, v));
        let r1 = size(&a.sub(&b)) / scale;
        let r2 = size(&b.sub(&c)) / scale;
        (r1, r2)
    };

    let mut basis_quintuples = 0;
    if n > 0 && n.pow(5) <= EXHAUSTIVE_QUINTUPLE_BUDGET {
        let e = m.basis_elements();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for p in 0..n {
                        for q in 0..n {
                            let (r1, r2) = assoc(&e[i], &e[j], &e[k], &e[p], &e[q]);
                            outer = outer.max(r1);
                            inner = inner.max(r2);
                            basis_quintuples += 1;
                        }
                    }
                }
            }
        }
    }

    if n > 0 {
        for _ in 0..samples {
            let x = m.random_element(&mut rng);
            let y = m.random_element(&mut rng);
            let z = m.random_element(&mut rng);
            let u = m.random_element(&mut rng);
            let v = m.random_element(&mut rng);
            let lambda = rng::gaussian::<T>(&mut rng);

            let xyz = m.triple_unchecked(&x, &y, &z);
            let scaled = m.triple_unchecked(&x, &y.scale(lambda), &z);
            let sxyz = size(&x) * size(&y) * size(&z);
            let r = size(&scaled.sub(&xyz.scale(lambda.conj()))) / (sxyz * lambda.norm()).max(tiny);
            conj = conj.max(r);

            let (r1, r2) = assoc(&x, &y, &z, &u, &v);
            outer = outer.max(r1);
            inner = inner.max(r2);

            if norms_available {
                let excess = (size(&xyz) - sxyz).max(T::zero()) / sxyz.max(tiny);
                nbound = nbound.max(excess);
                let nx = size(&x);
                let xxx = m.triple_unchecked(&x, &x, &x);
                let c3 = nx * nx * nx;
                cube = cube.max((size(&xxx) - c3).abs() / c3.max(tiny));
            }
        }
    }

    AxiomReport {
        samples,
        basis_quintuples,
        conjugate_linearity: conj,
        associativity_outer: outer,
        associativity_inner: inner,
        norm_bound: norms_available.then_some(nbound),
        cube_norm: norms_available.then_some(cube),
        norms_available,
        tolerance: T::tol_times(10.0),
    }
}

/// `b` with `[bbb] = a`: per TRO block `U Σ^{1/3} V*`, negated on anti blocks.
pub fn cube_root<T: Real>(m: &TernarySpace<T>, a: &TernaryElement<T>) -> Result<TernaryElement<T>> {
    let mats = m.element_matrices(a)?;
    let bs = m.blocks().ok_or(Error::NormUnavailable)?;
    let third = T::one() / T::lit(3.0);
    let roots: Vec<Matrix<T>> = mats
        .iter()
        .zip(bs)
        .map(|(x, b)| {
            let s = svd(x);
            let k = s.singular_values.len();
            let mut us = s.u.clone();
            for j in 0..k {
                let f = re(s.singular_values[j].powf(third) * b.sign().factor());
                for i in 0..us.rows() {
                    us[(i, j)] = us[(i, j)] * f;
                }
            }
            &us * &s.v.adjoint()
        })
        .collect();
    Ok(m.element_from_matrices(&roots)?.0)
}

/// `M^op`: the same space with the negated triple product.
pub fn opposite<T: Real>(m: &TernarySpace<T>) -> TernarySpace<T> {
    match m {
        TernarySpace::Blocks(bs) => TernarySpace::Blocks(bs.iter().map(|b| b.with_sign(b.sign().flip())).collect()),
        TernarySpace::Structure(sc) => TernarySpace::Structure(sc.negated()),
    }
}

/// Structure constants reproducing the triple product on basis elements.
pub fn structure_constants_of<T: Real>(m: &TernarySpace<T>) -> StructureConstants<T> {
    match m {
        TernarySpace::Structure(sc) => sc.clone(),
        TernarySpace::Blocks(_) => {
            let n = m.dim();
            let e = m.basis_elements();
            let mut sc = StructureConstants::zeros(n);
            let offsets = m.block_offsets();
            let block_of = |i: usize| offsets.iter().rposition(|&o| o <= i).unwrap_or(0);
            for i in 0..n {
                for j in 0..n {
                    if block_of(i) != block_of(j) {
                        continue;
                    }
                    for k in 0..n {
                        if block_of(k) != block_of(i) {
                            continue;
                        }
                        let p = m.triple_unchecked(&e[i], &e[j], &e[k]);
                        for (l, v) in p.coords.into_iter().enumerate() {
                            sc.set(i, j, k, l, v);
                        }
                    }
                }
            }
            sc
        }
    }
}

/// Sub-triple-system spanned by `basis` (coordinates in `m`) as structure
/// constants over that basis; also returns the worst projection residual.
pub fn restrict_to_subspace<T: Real>(
    m: &TernarySpace<T>,
    basis: &[TernaryElement<T>],
) -> Result<(StructureConstants<T>, T)> {
    let k = basis.len();
    let n = m.dim();
    let q = Matrix::from_columns(n, &basis.iter().map(|b| b.coords.clone()).collect::<Vec<_>>());
    let mut sc = StructureConstants::zeros(k);
    let mut worst = T::zero();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let p = m.triple_unchecked(&basis[a], &basis[b], &basis[c]);
                let ls = matkernel::least_squares(&q, &p.coords)?;
                worst = worst.max(ls.residual);
                for (d, v) in ls.x.into_iter().enumerate() {
                    sc.set(a, b, c, d, v);
                }
            }
        }
    }
    Ok((sc, worst))
}

/// The split `M = M₊ ⊕ M₋`.
#[derive(Clone, Debug)]
pub struct ZettlSplit<T> {
    pub plus: TernarySpace<T>,
    pub minus: TernarySpace<T>,
    /// Basis of `M₊` in the coordinates of the input space.
    pub plus_basis: Vec<TernaryElement<T>>,
    /// Basis of `M₋` in the coordinates of the input space.
    pub minus_basis: Vec<TernaryElement<T>>,
    /// Sampling batches consumed (each batch draws `8·dim` elements).
    pub batches: usize,
    /// Worst eigenvalue of `r(f, f)` on the wrong side of zero over the
    /// returned basis vectors, relative to its spectral radius.
    pub sign_violation: T,
}

impl<T: Real> ZettlSplit<T> {
    pub fn dims(&self) -> (usize, usize) {
        (self.plus_basis.len(), self.minus_basis.len())
    }
}

const ZETTL_MAX_BATCHES: usize = 4;

/// Splits `M` into its TRO-like part `M₊` (where `r(f, f) : g ↦ [g f f]` is
/// positive) and anti-TRO-like part `M₋` (where it is negative).
///
/// Sums `r(f, f)` over `8·dim` random `f`; on `M₊` the sum is positive
/// definite and on `M₋` negative definite, so its positive and negative
/// spectral subspaces are the two parts. The block presentation reads the
/// spectrum off the operator Hermitized with the HS Gram; the structure
/// presentation has no a-priori positive form and uses the matrix sign
/// function instead. Zero eigenvalues trigger another batch.
pub fn zettl_decompose<T: Real>(m: &TernarySpace<T>, seed: u64) -> Result<ZettlSplit<T>> {
    let n = m.dim();
    if n == 0 {
        return Ok(ZettlSplit {
            plus: m.clone(),
            minus: m.clone(),
            plus_basis: vec![],
            minus_basis: vec![],
            batches: 0,
            sign_violation: T::zero(),
        });
    }
    let mut rng = rng::seeded(seed);
    let mut acc = Matrix::<T>::zeros(n, n);
    let gram = m.gram();
    let g_half = herm_function(&gram, |l| l.max(T::zero()).sqrt())?;
    let g_half_inv = herm_function(&gram, |l| if l > T::zero() { l.sqrt().recip() } else { T::zero() })?;

    for batch in 1..=ZETTL_MAX_BATCHES {
        for _ in 0..8 * n {
            let f = m.random_element(&mut rng);
            let nf = f.coord_norm();
            let f = f.scale(re(nf.recip()));
            acc += &m.right_multiplication(&f, &f);
        }
        let split = match m {
            TernarySpace::Blocks(_) => split_hermitized(&acc, &g_half, &g_half_inv)?,
            TernarySpace::Structure(_) => split_by_sign_function(&acc)?,
        };
        let Some((plus_q, minus_q)) = split else {
            continue;
        };
        let plus_basis: Vec<TernaryElement<T>> = plus_q.columns().into_iter().map(TernaryElement::new).collect();
        let minus_basis: Vec<TernaryElement<T>> = minus_q.columns().into_iter().map(TernaryElement::new).collect();
        let sign_violation = verify_split(m, &plus_basis, &minus_basis)?;
        if sign_violation > T::tol_times(10.0) {
            return Err(Error::DecompositionInconclusive(format!(
                "r(f,f) has eigenvalues of the wrong sign (relative {:.3e})",
                sign_violation.to_f64_lossy()
            )));
        }
        let (plus, minus) = assemble_parts(m, &plus_basis, &minus_basis)?;
        return Ok(ZettlSplit { plus, minus, plus_basis, minus_basis, batches: batch, sign_violation });
    }
    Err(Error::DecompositionInconclusive(format!(
        "kernel of the accumulated r(f,f) unresolved after {ZETTL_MAX_BATCHES} batches"
    )))
}

type Split<T> = Option<(Matrix<T>, Matrix<T>)>;

fn split_hermitized<T: Real>(s: &Matrix<T>, g_half: &Matrix<T>, g_half_inv: &Matrix<T>) -> Result<Split<T>> {
    let h = &(g_half * s) * g_half_inv;
    let eig = herm_eig(&h, Some(T::tol_times(10.0)))
        .map_err(|e| Error::DecompositionInconclusive(format!("Hermitized r(f,f): {e}")))?;
    let scale = eig.eigenvalues.iter().map(|l| l.abs()).fold(T::zero(), T::max);
    let cut = scale * T::tol_times(10.0);
    if eig.eigenvalues.iter().any(|l| l.abs() <= cut) {
        return Ok(None);
    }
    let n = s.rows();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let v = g_half_inv.mul_vec(&eig.eigenvectors.col(k));
        if l > T::zero() {
            plus.push(v);
        } else {
            minus.push(v);
        }
    }
    Ok(Some((
        orthonormal_basis(n, &plus, T::default_tol()),
        orthonormal_basis(n, &minus, T::default_tol()),
    )))
}

fn split_by_sign_function<T: Real>(s: &Matrix<T>) -> Result<Split<T>> {
    let n = s.rows();
    let sv = matkernel::singular_values(s);
    let smax = sv[0];
    if smax.is_zero() || sv[n - 1] <= smax * T::tol_times(10.0) {
        return Ok(None);
    }
    // Newton iteration X ← (μX + (μX)⁻¹)/2 converges to sign(S) when S has no
    // eigenvalues on the imaginary axis.
    let mut x = s.scale_real(smax.recip());
    let id = Matrix::<T>::identity(n);
    let mut converged = false;
    for _ in 0..100 {
        let xi = match x.inverse() {
            Ok(xi) => xi,
            Err(_) => return Ok(None),
        };
        let mu = (xi.fro_norm() / x.fro_norm()).sqrt();
        let next = (&x.scale_real(mu) + &xi.scale_real(mu.recip())).scale_real(T::lit(0.5));
        let delta = (&next - &x).fro_norm();
        x = next;
        if delta <= T::epsilon() * T::lit(100.0 * n as f64) {
            converged = true;
            break;
        }
    }
    let involution_defect = (&(&x * &x) - &id).fro_norm();
    if !converged && involution_defect > T::tol_times(1.0) {
        return Err(Error::DecompositionInconclusive(
            "sign iteration did not converge (spectrum not real?)".into(),
        ));
    }
    if involution_defect > T::tol_times(10.0) * T::lit(n as f64) {
        return Err(Error::DecompositionInconclusive(format!(
            "sign function is not an involution (defect {:.3e})",
            involution_defect.to_f64_lossy()
        )));
    }
    let half = T::lit(0.5);
    let p_plus = (&id + &x).scale_real(half);
    let p_minus = (&id - &x).scale_real(half);
    // nonzero singular values of a projection are at least 1
    Ok(Some((
        orthonormal_basis_abs(n, &p_plus.columns(), T::lit(1e-3)),
        orthonormal_basis_abs(n, &p_minus.columns(), T::lit(1e-3)),
    )))
}

/// Gram matrix of the trace form `τ(x, y) = tr(g ↦ [g y x])`.
fn trace_form<T: Real>(m: &TernarySpace<T>) -> Matrix<T> {
    let n = m.dim();
    let e = m.basis_elements();
    Matrix::from_fn(n, n, |a, b| m.right_multiplication(&e[a], &e[b]).trace())
}

/// Checks the postcondition: for basis vectors of `M₊`, `r(f, f)` has no
/// negative spectrum, for `M₋` no positive spectrum, in a positive form for
/// which `r(f, f)` is self-adjoint. Returns the worst relative violation.
fn verify_split<T: Real>(
    m: &TernarySpace<T>,
    plus: &[TernaryElement<T>],
    minus: &[TernaryElement<T>],
) -> Result<T> {
    let n = m.dim();
    if plus.len() + minus.len() != n {
        return Err(Error::DecompositionInconclusive(format!(
            "parts of dimensions {} + {} do not span a space of dimension {n}",
            plus.len(),
            minus.len()
        )));
    }
    let form = match m {
        TernarySpace::Blocks(_) => m.gram(),
        TernarySpace::Structure(_) => {
            // |τ| = τ on M₊ and −τ on M₋, written in the original coordinates.
            let q = Matrix::from_columns(
                n,
                &plus.iter().chain(minus).map(|e| e.coords.clone()).collect::<Vec<_>>(),
            );
            let mut signs = Matrix::zeros(n, n);
            for i in 0..n {
                signs[(i, i)] = if i < plus.len() { C::one() } else { -C::<T>::one() };
            }
            let qi = q.inverse()?;
            let j = &(&q * &signs) * &qi;
            let t = trace_form(m);
            // y* T J x
            let k = &t * &j;
            let k = (&k + &k.adjoint()).scale_real(T::lit(0.5));
            let eig = herm_eig(&k, None)?;
            if eig.eigenvalues[0] <= T::zero() {
                return Err(Error::DecompositionInconclusive(
                    "trace form is not definite on the recovered parts".into(),
                ));
            }
            k
        }
    };
    let k_half = herm_function(&form, |l| l.max(T::zero()).sqrt())?;
    let k_half_inv = herm_function(&form, |l| if l > T::zero() { l.sqrt().recip() } else { T::zero() })?;
    let mut worst = T::zero();
    for (f, want_positive) in plus.iter().map(|f| (f, true)).chain(minus.iter().map(|f| (f, false))) {
        let r = m.right_multiplication(f, f);
        let h = &(&k_half * &r) * &k_half_inv;
        let eig = herm_eig(&h, Some(T::tol_times(1000.0)))
            .map_err(|e| Error::DecompositionInconclusive(format!("r(f,f) not self-adjoint: {e}")))?;
        let scale = eig.eigenvalues.iter().map(|l| l.abs()).fold(T::zero(), T::max).max(T::min_positive_value());
        let bad = if want_positive {
            (-eig.eigenvalues[0]).max(T::zero())
        } else {
            eig.eigenvalues[n - 1].max(T::zero())
        };
        worst = worst.max(bad / scale);
    }
    Ok(worst)
}

fn assemble_parts<T: Real>(
    m: &TernarySpace<T>,
    plus: &[TernaryElement<T>],
    minus: &[TernaryElement<T>],
) -> Result<(TernarySpace<T>, TernarySpace<T>)> {
    match m {
        TernarySpace::Structure(_) => {
            let (sp, _) = restrict_to_subspace(m, plus)?;
            let (sm, _) = restrict_to_subspace(m, minus)?;
            Ok((TernarySpace::Structure(sp), TernarySpace::Structure(sm)))
        }
        TernarySpace::Blocks(bs) => {
            let n = m.dim();
            let qp = Matrix::from_columns(n, &plus.iter().map(|e| e.coords.clone()).collect::<Vec<_>>());
            let qm = Matrix::from_columns(n, &minus.iter().map(|e| e.coords.clone()).collect::<Vec<_>>());
            let tol = T::tol_times(100.0);
            let mut pb = Vec::new();
            let mut mb = Vec::new();
            for (b, o) in bs.iter().zip(m.block_offsets()) {
                let coords: Vec<Vec<C<T>>> = (0..b.dim()).map(|i| m.basis_element(o + i).coords).collect();
                let in_plus = coords.iter().all(|v| distance_to_span(&qp, v) <= tol);
                let in_minus = coords.iter().all(|v| distance_to_span(&qm, v) <= tol);
                match (in_plus, in_minus) {
                    (true, false) => pb.push(b.clone()),
                    (false, true) => mb.push(b.clone()),
                    _ => {
                        return Err(Error::DecompositionInconclusive(
                            "a block straddles the recovered parts".into(),
                        ))
                    }
                }
            }
            Ok((TernarySpace::Blocks(pb), TernarySpace::Blocks(mb)))
        }
    }
}

/// Spectrum of the realified operator `x ↦ {a a x}` with `{abc} = ([abc] + [bca])/2`.
#[derive(Clone, Debug)]
pub struct SpectrumReport<T> {
    pub eigenvalues: Vec<T>,
    pub min: T,
    /// `min ≥ −tol·max(1, ‖a‖²)`: the necessary condition for a JB*-triple.
    pub passed: bool,
}

/// Evaluates the necessary JB*-triple condition that `x ↦ {aax}` has nonnegative
/// spectrum, with the symmetrized product `{abc} = ([abc] + [bca])/2`.
pub fn jbstar_box_check<T: Real>(m: &TernarySpace<T>, a: &TernaryElement<T>) -> Result<SpectrumReport<T>> {
    if !m.is_blocks() {
        return Err(Error::NormUnavailable);
    }
    m.check(a)?;
    let n = m.dim();
    if n == 0 {
        return Ok(SpectrumReport { eigenvalues: vec![], min: T::zero(), passed: true });
    }
    let gram = m.gram();
    // orthonormal coordinates: x_b = W x_q with W = G^{-1/2}
    let w = herm_function(&gram, |l| l.sqrt().recip())?;
    let w_inv = herm_function(&gram, |l| l.sqrt())?;
    let half = re(T::lit(0.5));
    let mut d = Matrix::<T>::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let mut q = vec![C::<T>::zero(); n];
        q[col / 2] = if col % 2 == 0 { C::one() } else { Complex::i() };
        let x = TernaryElement::new(w.mul_vec(&q));
        let aax = m.triple_unchecked(a, a, &x);
        let axa = m.triple_unchecked(a, &x, a);
        let image: Vec<C<T>> = aax.add(&axa).coords.iter().map(|z| *z * half).collect();
        let image_q = w_inv.mul_vec(&image);
        for (k, z) in image_q.iter().enumerate() {
            d[(2 * k, col)] = re(z.re);
            d[(2 * k + 1, col)] = re(z.im);
        }
    }
    let eig = herm_eig(&d, Some(T::tol_times(1000.0)))?;
    let min = eig.eigenvalues.first().copied().unwrap_or(T::zero());
    let na = m.norm(a)?;
    let passed = min >= -T::tol_times(10.0) * (na * na).max(T::one());
    Ok(SpectrumReport { eigenvalues: eig.eigenvalues, min, passed })
}

/// HS-orthonormal inner product of two elements of a block space.
pub fn inner<T: Real>(m: &TernarySpace<T>, x: &TernaryElement<T>, y: &TernaryElement<T>) -> C<T> {
    vdot(&y.coords, &m.gram().mul_vec(&x.coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::scalar::c;

    fn el(v: &[f64]) -> TernaryElement<f64> {
        TernaryElement::new(v.iter().map(|&x| c(x, 0.0)).collect())
    }

    #[test]
    fn scalar_triples() {
        let tro = instances::scalar(Sign::Plus);
        let one = el(&[1.0]);
        assert_eq!(tro.triple(&one, &one, &one).unwrap(), el(&[1.0]));
        let anti = instances::scalar(Sign::Minus);
        assert_eq!(anti.triple(&one, &one, &one).unwrap(), el(&[-1.0]));
        let mixed = instances::mixed_scalars();
        let x = el(&[1.0, 2.0]);
        let p = mixed.triple(&x, &x, &x).unwrap();
        assert!((p.coords[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((p.coords[1] - c(-8.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn triple_is_conjugate_linear_in_the_middle() {
        let m = instances::full_block::<f64>(2, 3, Sign::Minus);
        let mut rng = rng::seeded(4);
        for _ in 0..100 {
            let (x, y, z) = (m.random_element(&mut rng), m.random_element(&mut rng), m.random_element(&mut rng));
            let l = rng::gaussian::<f64>(&mut rng);
            let lhs = m.triple(&x, &y.scale(l), &z).unwrap();
            let rhs = m.triple(&x, &y, &z).unwrap().scale(l.conj());
            assert!(lhs.sub(&rhs).coord_norm() <= 1e-10 * (1.0 + rhs.coord_norm()));
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let m = instances::scalar::<f64>(Sign::Plus);
        let bad = el(&[1.0, 2.0]);
        assert!(matches!(m.triple(&bad, &bad, &bad), Err(Error::Shape(_))));
    }

    #[test]
    fn closure_examples() {
        let e11 = Matrix::<f64>::unit(2, 2, 0, 0);
        let s = ternary_closure(&[e11], Sign::Plus).unwrap();
        assert_eq!(s.dim(), 1);

        let e12 = Matrix::<f64>::unit(2, 2, 0, 1);
        let e21 = Matrix::<f64>::unit(2, 2, 1, 0);
        let s = ternary_closure(&[e12.clone(), e21.clone()], Sign::Plus).unwrap();
        assert_eq!(s.dim(), 2);
        let block = &s.blocks().unwrap()[0];
        for g in [&e12, &e21] {
            assert!(block.project(g).1 < 1e-12);
        }

        assert!(matches!(
            ternary_closure(&[Matrix::<f64>::zeros(2, 2)], Sign::Plus),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(ternary_closure::<f64>(&[], Sign::Plus), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn closure_of_generic_matrix_is_full_block() {
        let mut rng = rng::seeded(9);
        let g = rng::gaussian_matrix::<f64>(&mut rng, 2, 3);
        let h = rng::gaussian_matrix::<f64>(&mut rng, 2, 3);
        // a single generic element spans g·p(g*g): one direction per singular value
        assert_eq!(ternary_closure(&[g.clone()], Sign::Minus).unwrap().dim(), 2);
        assert_eq!(ternary_closure(&[g, h], Sign::Minus).unwrap().dim(), 6);
    }

    #[test]
    fn block_rejects_non_closed_span() {
        // a b* b = E11 lies outside span{a, b}
        let a = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let b = Matrix::<f64>::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(SignedBlock::new(Sign::Plus, vec![a, b]).is_err());
        let d = Matrix::<f64>::unit(2, 2, 0, 0);
        assert!(SignedBlock::new(Sign::Plus, vec![d.clone(), d]).is_err());
    }

    #[test]
    fn axioms_hold_for_blocks() {
        for sign in [Sign::Plus, Sign::Minus] {
            let m = instances::full_block::<f64>(2, 3, sign);
            let r = check_axioms(&m, 100, 1);
            assert!(r.passed(), "{r:?}");
            assert!(r.norms_available);
        }
    }

    #[test]
    fn corrupted_structure_fails_axioms() {
        let m = instances::diag::<f64>(2, Sign::Plus);
        let mut sc = structure_constants_of(&m);
        let v = sc.get(0, 0, 0, 1);
        sc.set(0, 0, 0, 1, v + c(0.1, 0.0));
        let r = check_axioms(&TernarySpace::Structure(sc), 100, 1);
        assert!(!r.passed());
        assert!(!r.norms_available && r.norm_bound.is_none());
        assert!(r.associativity_outer.max(r.associativity_inner) >= 0.05, "{r:?}");
    }

    #[test]
    fn cube_root_examples() {
        let tro = instances::scalar::<f64>(Sign::Plus);
        let b = cube_root(&tro, &el(&[8.0])).unwrap();
        assert!((b.coords[0] - c(2.0, 0.0)).norm() < 1e-12);
        let anti = instances::scalar::<f64>(Sign::Minus);
        let b = cube_root(&anti, &el(&[8.0])).unwrap();
        assert!((b.coords[0] - c(-2.0, 0.0)).norm() < 1e-12);
        let z = cube_root(&anti, &el(&[0.0])).unwrap();
        assert!(z.coord_norm() == 0.0);
        let sc = TernarySpace::Structure(structure_constants_of(&anti));
        assert!(matches!(cube_root(&sc, &el(&[1.0])), Err(Error::NormUnavailable)));
    }

    #[test]
    fn cube_root_round_trips() {
        let m = instances::mixed_blocks::<f64>();
        let mut rng = rng::seeded(2);
        for _ in 0..200 {
            let a = m.random_element(&mut rng);
            let b = cube_root(&m, &a).unwrap();
            let bbb = m.triple(&b, &b, &b).unwrap();
            let na = m.norm(&a).unwrap();
            assert!(m.norm(&bbb.sub(&a)).unwrap() <= 1e-8 * na.max(1.0));
        }
    }

    #[test]
    fn structure_constants_examples() {
        assert_eq!(structure_constants_of(&instances::scalar::<f64>(Sign::Plus)).get(0, 0, 0, 0), c(1.0, 0.0));
        assert_eq!(structure_constants_of(&instances::scalar::<f64>(Sign::Minus)).get(0, 0, 0, 0), c(-1.0, 0.0));
        let sc = structure_constants_of(&instances::diag::<f64>(2, Sign::Plus));
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let want = if i == j && j == k && k == l { 1.0 } else { 0.0 };
                        assert!((sc.get(i, j, k, l) - c(want, 0.0)).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn structure_constants_reproduce_triple() {
        let m = instances::mixed_blocks::<f64>();
        let s = TernarySpace::Structure(structure_constants_of(&m));
        let mut rng = rng::seeded(5);
        for _ in 0..20 {
            let (x, y, z) = (m.random_element(&mut rng), m.random_element(&mut rng), m.random_element(&mut rng));
            let a = m.triple(&x, &y, &z).unwrap();
            let b = s.triple(&x, &y, &z).unwrap();
            assert!(a.sub(&b).coord_norm() <= 1e-10 * (1.0 + a.coord_norm()));
        }
    }

    #[test]
    fn opposite_is_an_involution() {
        let m = instances::mixed_blocks::<f64>();
        let op = opposite(&m);
        assert_eq!(op.blocks().unwrap()[0].sign(), Sign::Minus);
        let back = opposite(&op);
        for (a, b) in back.blocks().unwrap().iter().zip(m.blocks().unwrap()) {
            assert_eq!(a.sign(), b.sign());
            assert_eq!(a.basis(), b.basis());
        }
        let s = TernarySpace::Structure(structure_constants_of(&m));
        if let (TernarySpace::Structure(a), TernarySpace::Structure(b)) = (opposite(&opposite(&s)), &s) {
            assert_eq!(&a, b);
        }
    }

    #[test]
    fn zettl_pure_parts() {
        let tro = instances::full_block::<f64>(2, 2, Sign::Plus);
        let z = zettl_decompose(&tro, 1).unwrap();
        assert_eq!(z.dims(), (4, 0));
        let anti = instances::full_block::<f64>(1, 3, Sign::Minus);
        let z = zettl_decompose(&anti, 1).unwrap();
        assert_eq!(z.dims(), (0, 3));
    }

    #[test]
    fn zettl_on_mixed_basis_structure() {
        // ℂ₊ ⊕ ℂ₋ in the basis {(1,1), (1,−1)}
        let m = instances::mixed_scalars::<f64>();
        let sc = structure_constants_of(&m);
        let p = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let mixed = TernarySpace::Structure(sc.change_basis(&p).unwrap());
        let z = zettl_decompose(&mixed, 3).unwrap();
        assert_eq!(z.dims(), (1, 1));
        // map recovered coordinates back to the standard basis
        let back = |e: &TernaryElement<f64>| p.mul_vec(&e.coords);
        let plus = Matrix::from_columns(2, &[back(&z.plus_basis[0])]);
        let minus = Matrix::from_columns(2, &[back(&z.minus_basis[0])]);
        let plus = orthonormal_basis(2, &plus.columns(), 1e-12);
        let minus = orthonormal_basis(2, &minus.columns(), 1e-12);
        let e0 = Matrix::from_columns(2, &[vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let e1 = Matrix::from_columns(2, &[vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matkernel::subspace_distance(&plus, &e0) <= 1e-8);
        assert!(matkernel::subspace_distance(&minus, &e1) <= 1e-8);
    }

    #[test]
    fn zettl_is_idempotent_and_swapped_by_opposite() {
        let m = instances::mixed_blocks::<f64>();
        let z = zettl_decompose(&m, 8).unwrap();
        let (dp, dm) = z.dims();
        assert!(dp > 0 && dm > 0);
        let again = zettl_decompose(&z.plus, 9).unwrap();
        assert_eq!(again.dims(), (dp, 0));
        let zo = zettl_decompose(&opposite(&m), 8).unwrap();
        assert_eq!(zo.dims(), (dm, dp));
    }

    #[test]
    fn jbstar_examples() {
        let one = el(&[1.0]);
        let r = jbstar_box_check(&instances::scalar::<f64>(Sign::Plus), &one).unwrap();
        assert!(r.passed);
        assert!((r.eigenvalues[0]).abs() < 1e-12 && (r.eigenvalues[1] - 1.0).abs() < 1e-12);
        let r = jbstar_box_check(&instances::scalar::<f64>(Sign::Minus), &one).unwrap();
        assert!(!r.passed);
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-12 && r.eigenvalues[1].abs() < 1e-12);
        let m = instances::full_block::<f64>(2, 2, Sign::Minus);
        let r = jbstar_box_check(&m, &m.zero_element()).unwrap();
        assert!(r.passed && r.eigenvalues.iter().all(|l| l.abs() < 1e-14));
    }

    #[test]
    fn f32_scalar_smoke() {
        let m = instances::full_block::<f32>(2, 2, Sign::Minus);
        let r = check_axioms(&m, 20, 3);
        assert!(r.associativity_outer < 1e-3, "{r:?}");
        let z = zettl_decompose(&m, 1).unwrap();
        assert_eq!(z.dims(), (0, 4));
    }
}
