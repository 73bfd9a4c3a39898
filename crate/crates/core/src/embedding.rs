//! The standard embedding `𝒜(M)` of a block-presented C*-ternary ring.
//!
//! Each block `M ⊆ B(H, K)` contributes the 2×2 block space
//! `[[span(MM*), M], [M*, span(M*M)]]`. TRO blocks multiply as ordinary
//! block matrices (the linking algebra); anti-TRO blocks use the twisted
//! product
//!
//! ```text
//! [α z; v β]·[α' z'; v' β'] = [−αα' + zv'   −αz' − zβ';
//!                             −vα' − βv'    vz' − ββ']
//! ```
//!
//! with `v = w*` in the lower-left corner. Both share the involution
//! `[α z; v β]* = [α* v*; z* β*]`.
//!
//! An [`EmbeddingElement`] is a flat coordinate vector. Per block the layout
//! is `alpha` (HS-orthonormal basis of `span(MM*)`), `f` (the block's basis of
//! `M`), `w` (lower-left corner `Σ w_i b_i*`) and `beta` (HS-orthonormal basis
//! of `span(M*M)`).

use std::ops::Range;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matkernel::{
    distance_to_span, herm_eig, hs_inner, op_norm_unchecked, orthonormal_basis, orthonormal_basis_abs, vnorm,
    Matrix,
};
use crate::radical::AssocAlgebra;
use crate::rng::{self, Rng};
use crate::scalar::{re, Real, C};
use crate::ternary::{Sign, SignedBlock, TernaryElement, TernarySpace};

/// Product rule of one block of the embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductRule {
    /// Ordinary block-matrix product (TRO blocks).
    Linking,
    /// Sign-twisted product (anti-TRO blocks).
    Anti,
}

/// HS-orthonormal basis of a span of equally shaped matrices.
#[derive(Clone, Debug)]
pub struct MatrixSpan<T> {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix<T>>,
}

impl<T: Real> MatrixSpan<T> {
    fn spanned_by(rows: usize, cols: usize, mats: &[Matrix<T>]) -> Self {
        let vecs: Vec<Vec<C<T>>> = mats.iter().map(|m| m.as_slice().to_vec()).collect();
        let scale = mats.iter().map(|m| m.fro_norm()).fold(T::zero(), T::max);
        let q = orthonormal_basis_abs(rows * cols, &vecs, scale * T::default_tol());
        let basis = q
            .columns()
            .into_iter()
            .map(|v| Matrix::from_vec(rows, cols, v).expect("shape"))
            .collect();
        Self { rows, cols, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix<T>] {
        &self.basis
    }

    pub fn combine(&self, coords: &[C<T>]) -> Matrix<T> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                m += &b.scale(*c);
            }
        }
        m
    }

    pub fn project(&self, m: &Matrix<T>) -> Vec<C<T>> {
        self.basis.iter().map(|b| hs_inner(m, b).expect("shape")).collect()
    }
}

/// One block of the embedding with its coordinate ranges.
#[derive(Clone, Debug)]
pub struct EmbeddingBlock<T> {
    pub block: SignedBlock<T>,
    pub left: MatrixSpan<T>,
    pub right: MatrixSpan<T>,
    pub offset: usize,
    /// Offset of this block's coordinates in the base ternary space.
    pub base_offset: usize,
}

impl<T: Real> EmbeddingBlock<T> {
    pub fn rule(&self) -> ProductRule {
        match self.block.sign() {
            Sign::Plus => ProductRule::Linking,
            Sign::Minus => ProductRule::Anti,
        }
    }

    pub fn dim(&self) -> usize {
        self.left.dim() + 2 * self.block.dim() + self.right.dim()
    }

    pub fn alpha_range(&self) -> Range<usize> {
        self.offset..self.offset + self.left.dim()
    }

    pub fn f_range(&self) -> Range<usize> {
        let s = self.offset + self.left.dim();
        s..s + self.block.dim()
    }

    pub fn w_range(&self) -> Range<usize> {
        let s = self.offset + self.left.dim() + self.block.dim();
        s..s + self.block.dim()
    }

    pub fn beta_range(&self) -> Range<usize> {
        let s = self.offset + self.left.dim() + 2 * self.block.dim();
        s..s + self.right.dim()
    }

    fn corners(&self, a: &[C<T>]) -> [Matrix<T>; 4] {
        let alpha = self.left.combine(&a[self.alpha_range()]);
        let z = self.block.combine(&a[self.f_range()]);
        let v = self.block.combine(&a[self.w_range()].iter().map(|c| c.conj()).collect::<Vec<_>>()).adjoint();
        let beta = self.right.combine(&a[self.beta_range()]);
        [alpha, z, v, beta]
    }

    fn write_corners(&self, out: &mut [C<T>], [alpha, z, v, beta]: [Matrix<T>; 4]) {
        let r = self.alpha_range();
        out[r].copy_from_slice(&self.left.project(&alpha));
        let r = self.f_range();
        out[r].copy_from_slice(&self.block.project(&z).0);
        let r = self.w_range();
        let wc: Vec<C<T>> = self.block.project(&v.adjoint()).0.iter().map(|c| c.conj()).collect();
        out[r].copy_from_slice(&wc);
        let r = self.beta_range();
        out[r].copy_from_slice(&self.right.project(&beta));
    }

    /// `[[α, z], [v, β]]` as one `(rows+cols)²` matrix.
    pub fn block_matrix(&self, a: &[C<T>]) -> Matrix<T> {
        let [alpha, z, v, beta] = self.corners(a);
        Matrix::block2x2(&alpha, &z, &v, &beta)
    }
}

/// `𝒜(M)` for a block-presented `M`.
#[derive(Clone, Debug)]
pub struct StandardEmbedding<T> {
    base: TernarySpace<T>,
    blocks: Vec<EmbeddingBlock<T>>,
    dim: usize,
}

/// Coordinates over the basis of a [`StandardEmbedding`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingElement<T> {
    pub coords: Vec<C<T>>,
}

impl<T: Real> EmbeddingElement<T> {
    pub fn new(coords: Vec<C<T>>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_norm(&self) -> T {
        vnorm(&self.coords)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(crate::matkernel::vadd(&self.coords, &o.coords))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(crate::matkernel::vsub(&self.coords, &o.coords))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::new(self.coords.iter().map(|c| *c * s).collect())
    }
}

/// Builds `𝒜(M)`; requires the block presentation.
pub fn build_embedding<T: Real>(m: &TernarySpace<T>) -> Result<StandardEmbedding<T>> {
    let bs = m.blocks().ok_or(Error::NormUnavailable)?;
    let mut blocks = Vec::with_capacity(bs.len());
    let mut offset = 0;
    for (b, base_offset) in bs.iter().zip(m.block_offsets()) {
        let basis = b.basis();
        let mut lgen = Vec::new();
        let mut rgen = Vec::new();
        for x in basis {
            for y in basis {
                lgen.push(x * &y.adjoint());
                rgen.push(&x.adjoint() * y);
            }
        }
        let left = MatrixSpan::spanned_by(b.rows(), b.rows(), &lgen);
        let right = MatrixSpan::spanned_by(b.cols(), b.cols(), &rgen);
        let eb = EmbeddingBlock { block: b.clone(), left, right, offset, base_offset };
        offset += eb.dim();
        blocks.push(eb);
    }
    Ok(StandardEmbedding { base: m.clone(), blocks, dim: offset })
}

/// Coordinate index sets of the four Peirce corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerLayout {
    pub l: Vec<usize>,
    pub m: Vec<usize>,
    pub mbar: Vec<usize>,
    pub r: Vec<usize>,
}

impl<T: Real> StandardEmbedding<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &TernarySpace<T> {
        &self.base
    }

    pub fn blocks(&self) -> &[EmbeddingBlock<T>] {
        &self.blocks
    }

    pub fn has_anti_block(&self) -> bool {
        self.blocks.iter().any(|b| b.rule() == ProductRule::Anti)
    }

    pub fn layout(&self) -> CornerLayout {
        let mut out = CornerLayout { l: vec![], m: vec![], mbar: vec![], r: vec![] };
        for b in &self.blocks {
            out.l.extend(b.alpha_range());
            out.m.extend(b.f_range());
            out.mbar.extend(b.w_range());
            out.r.extend(b.beta_range());
        }
        out
    }

    pub fn zero(&self) -> EmbeddingElement<T> {
        EmbeddingElement::new(vec![C::zero(); self.dim])
    }

    pub fn basis_element(&self, i: usize) -> EmbeddingElement<T> {
        let mut e = self.zero();
        e.coords[i] = C::one();
        e
    }

    pub fn random_element(&self, rng: &mut Rng) -> EmbeddingElement<T> {
        EmbeddingElement::new(rng::gaussian_vec(rng, self.dim))
    }

    fn check(&self, a: &EmbeddingElement<T>) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::Shape(format!(
                "embedding element of dimension {} in an algebra of dimension {}",
                a.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `x ∈ M` placed in the upper-right corner.
    pub fn embed_m(&self, x: &TernaryElement<T>) -> EmbeddingElement<T> {
        let mut out = self.zero();
        for b in &self.blocks {
            let src = &x.coords[b.base_offset..b.base_offset + b.block.dim()];
            out.coords[b.f_range()].copy_from_slice(src);
        }
        out
    }

    /// `x ∈ M` placed in the lower-left corner as `x*`.
    pub fn embed_mbar(&self, x: &TernaryElement<T>) -> EmbeddingElement<T> {
        let mut out = self.zero();
        for b in &self.blocks {
            let src = &x.coords[b.base_offset..b.base_offset + b.block.dim()];
            for (o, s) in out.coords[b.w_range()].iter_mut().zip(src) {
                *o = s.conj();
            }
        }
        out
    }

    /// Upper-right corner as an element of `M`.
    pub fn corner_m(&self, a: &EmbeddingElement<T>) -> TernaryElement<T> {
        let mut out = self.base.zero_element();
        for b in &self.blocks {
            out.coords[b.base_offset..b.base_offset + b.block.dim()].copy_from_slice(&a.coords[b.f_range()]);
        }
        out
    }

    /// Per-block `(rows+cols)²` realizations.
    pub fn block_matrices(&self, a: &EmbeddingElement<T>) -> Result<Vec<Matrix<T>>> {
        self.check(a)?;
        Ok(self.blocks.iter().map(|b| b.block_matrix(&a.coords)).collect())
    }

    /// Block operator norm: the largest operator norm of the block realizations.
    pub fn norm(&self, a: &EmbeddingElement<T>) -> Result<T> {
        Ok(self.block_matrices(a)?.iter().map(op_norm_unchecked).fold(T::zero(), T::max))
    }

    pub fn mul(&self, a: &EmbeddingElement<T>, b: &EmbeddingElement<T>) -> Result<EmbeddingElement<T>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &EmbeddingElement<T>, b: &EmbeddingElement<T>) -> EmbeddingElement<T> {
        let mut out = vec![C::zero(); self.dim];
        for blk in &self.blocks {
            let r = blk.offset..blk.offset + blk.dim();
            if a.coords[r.clone()].iter().all(|c| c.is_zero()) || b.coords[r].iter().all(|c| c.is_zero()) {
                continue;
            }
            let [al, z, v, be] = blk.corners(&a.coords);
            let [al2, z2, v2, be2] = blk.corners(&b.coords);
            let s = match blk.rule() {
                ProductRule::Linking => T::one(),
                ProductRule::Anti => -T::one(),
            };
            let ul = &(&al * &al2).scale_real(s) + &(&z * &v2);
            let ur = (&(&al * &z2) + &(&z * &be2)).scale_real(s);
            let ll = (&(&v * &al2) + &(&be * &v2)).scale_real(s);
            let lr = &(&v * &z2) + &(&be * &be2).scale_real(s);
            blk.write_corners(&mut out, [ul, ur, ll, lr]);
        }
        EmbeddingElement::new(out)
    }

    pub fn star(&self, a: &EmbeddingElement<T>) -> Result<EmbeddingElement<T>> {
        self.check(a)?;
        let mut out = vec![C::zero(); self.dim];
        for blk in &self.blocks {
            let [al, z, v, be] = blk.corners(&a.coords);
            blk.write_corners(&mut out, [al.adjoint(), v.adjoint(), z.adjoint(), be.adjoint()]);
        }
        Ok(EmbeddingElement::new(out))
    }

    /// Unit: support projections per block, negated on anti blocks.
    pub fn identity(&self) -> EmbeddingElement<T> {
        let mut out = vec![C::zero(); self.dim];
        for blk in &self.blocks {
            let s = match blk.rule() {
                ProductRule::Linking => T::one(),
                ProductRule::Anti => -T::one(),
            };
            let pl = blk.block.left_support().scale_real(s);
            let pr = blk.block.right_support().scale_real(s);
            let z = Matrix::zeros(blk.block.rows(), blk.block.cols());
            blk.write_corners(&mut out, [pl, z.clone(), z.adjoint(), pr]);
        }
        EmbeddingElement::new(out)
    }

    /// Structure constants of the product (and the involution) as an
    /// [`AssocAlgebra`], plus the corner layout of the coordinates.
    pub fn to_assoc_algebra(&self) -> Result<(AssocAlgebra<T>, CornerLayout)> {
        let n = self.dim;
        let e: Vec<EmbeddingElement<T>> = (0..n).map(|i| self.basis_element(i)).collect();
        let mut c = vec![C::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                let p = self.mul_unchecked(&e[a], &e[b]);
                c[(a * n + b) * n..(a * n + b + 1) * n].copy_from_slice(&p.coords);
            }
        }
        let star_cols: Vec<Vec<C<T>>> = e
            .iter()
            .map(|x| self.star(x).map(|s| s.coords))
            .collect::<Result<_>>()?;
        // star is conjugate-linear: a* = J · conj(a) with J's columns the stars of basis vectors
        let j = Matrix::from_columns(n, &star_cols);
        Ok((AssocAlgebra::new_unchecked(n, c, Some(j)), self.layout()))
    }
}

pub fn emb_mul<T: Real>(
    e: &StandardEmbedding<T>,
    a: &EmbeddingElement<T>,
    b: &EmbeddingElement<T>,
) -> Result<EmbeddingElement<T>> {
    e.mul(a, b)
}

pub fn emb_star<T: Real>(e: &StandardEmbedding<T>, a: &EmbeddingElement<T>) -> Result<EmbeddingElement<T>> {
    e.star(a)
}

pub fn identity_of<T: Real>(e: &StandardEmbedding<T>) -> EmbeddingElement<T> {
    e.identity()
}

/// Left multiplication by `a` on the column ideal `{[[0, f'], [0, B']]} ≅ M ⊕ R`.
///
/// Coordinates of `M ⊕ R` are, per block, the block's `M` coordinates
/// followed by its `R` coordinates.
#[derive(Clone, Debug)]
pub struct PiOperator<T> {
    pub matrix: Matrix<T>,
    /// Per block: `(M range, R range)` in `M ⊕ R` coordinates.
    pub ranges: Vec<(Range<usize>, Range<usize>)>,
}

fn column_ranges<T: Real>(e: &StandardEmbedding<T>) -> Vec<(Range<usize>, Range<usize>)> {
    let mut o = 0;
    e.blocks
        .iter()
        .map(|b| {
            let m = o..o + b.block.dim();
            let r = m.end..m.end + b.right.dim();
            o = r.end;
            (m, r)
        })
        .collect()
}

fn column_to_embedding<T: Real>(e: &StandardEmbedding<T>, xi: &[C<T>]) -> EmbeddingElement<T> {
    let mut out = e.zero();
    for (b, (mr, rr)) in e.blocks.iter().zip(column_ranges(e)) {
        out.coords[b.f_range()].copy_from_slice(&xi[mr]);
        out.coords[b.beta_range()].copy_from_slice(&xi[rr]);
    }
    out
}

fn embedding_to_column<T: Real>(e: &StandardEmbedding<T>, a: &EmbeddingElement<T>) -> Vec<C<T>> {
    let mut out = Vec::new();
    for b in &e.blocks {
        out.extend_from_slice(&a.coords[b.f_range()]);
        out.extend_from_slice(&a.coords[b.beta_range()]);
    }
    out
}

/// `(‖f'‖² + ‖B'‖²)^{1/2}` with block-maximal operator norms.
pub fn column_norm<T: Real>(e: &StandardEmbedding<T>, xi: &[C<T>]) -> T {
    let mut nf = T::zero();
    let mut nb = T::zero();
    for (b, (mr, rr)) in e.blocks.iter().zip(column_ranges(e)) {
        nf = nf.max(op_norm_unchecked(&b.block.combine(&xi[mr])));
        nb = nb.max(op_norm_unchecked(&b.right.combine(&xi[rr])));
    }
    (nf * nf + nb * nb).sqrt()
}

pub fn pi_represent<T: Real>(e: &StandardEmbedding<T>, a: &EmbeddingElement<T>) -> Result<PiOperator<T>> {
    e.check(a)?;
    let ranges = column_ranges(e);
    let n = ranges.last().map(|(_, r)| r.end).unwrap_or(0);
    let cols: Vec<Vec<C<T>>> = (0..n)
        .map(|k| {
            let mut xi = vec![C::zero(); n];
            xi[k] = C::one();
            embedding_to_column(e, &e.mul_unchecked(a, &column_to_embedding(e, &xi)))
        })
        .collect();
    Ok(PiOperator { matrix: Matrix::from_columns(n, &cols), ranges })
}

/// Largest `‖π(ab) − π(a)π(b)‖_F / (1 + ‖π(ab)‖_F)` over `pairs` random pairs.
pub fn pi_homomorphism_residual<T: Real>(e: &StandardEmbedding<T>, pairs: usize, seed: u64) -> Result<T> {
    let mut rng = rng::seeded(seed);
    let mut worst = T::zero();
    for _ in 0..pairs {
        let (a, b) = (e.random_element(&mut rng), e.random_element(&mut rng));
        let pab = pi_represent(e, &e.mul(&a, &b)?)?.matrix;
        let prod = &pi_represent(e, &a)?.matrix * &pi_represent(e, &b)?.matrix;
        worst = worst.max((&pab - &prod).fro_norm() / (T::one() + pab.fro_norm()));
    }
    Ok(worst)
}

/// Smallest singular value of `a ↦ π(a)` relative to the largest.
pub fn pi_injectivity<T: Real>(e: &StandardEmbedding<T>) -> Result<T> {
    let n = e.dim();
    let cols: Vec<Vec<C<T>>> = (0..n)
        .map(|i| pi_represent(e, &e.basis_element(i)).map(|p| p.matrix.into_vec()))
        .collect::<Result<_>>()?;
    if n == 0 {
        return Ok(T::one());
    }
    let big = Matrix::from_columns(cols[0].len(), &cols);
    let s = crate::matkernel::singular_values(&big);
    Ok(s[n - 1] / s[0])
}

/// Norms of the four corners of `a` and a lower estimate of `‖π(a)‖` on `M ⊕ R`.
#[derive(Clone, Debug)]
pub struct BoundsReport<T> {
    pub a_norm: T,
    pub b_norm: T,
    pub f_norm: T,
    pub g_norm: T,
    /// Largest `‖π(a)ξ‖ / ‖ξ‖` over witness and sampled vectors `ξ`.
    pub estimate: T,
    /// Estimate reached via each witness (`A`, `B`, `f`, `g`).
    pub witness_values: [T; 4],
    /// `estimate ≥ max(‖A‖, ‖B‖, ‖f‖, ‖g‖) − 1e−8`.
    pub certified: bool,
}

/// Certifies `‖π(a)‖ ≥ max(‖A‖, ‖B‖, ‖f‖, ‖g‖)` by explicit witness vectors,
/// then improves the estimate with `samples` random directions.
pub fn pi_norm_lower_bounds<T: Real>(
    e: &StandardEmbedding<T>,
    a: &EmbeddingElement<T>,
    samples: usize,
    seed: u64,
) -> Result<BoundsReport<T>> {
    e.check(a)?;
    let ranges = column_ranges(e);
    let n = ranges.last().map(|(_, r)| r.end).unwrap_or(0);
    let mut norms = [T::zero(); 4];
    let mut wit_a = vec![C::zero(); n];
    let mut wit_b = vec![C::zero(); n];
    let mut wit_g = vec![C::zero(); n];
    let mut g_mats = Vec::new();
    for (blk, (mr, rr)) in e.blocks.iter().zip(&ranges) {
        let [alpha, z, v, beta] = blk.corners(&a.coords);
        let na = op_norm_unchecked(&alpha);
        norms[0] = norms[0].max(na);
        norms[1] = norms[1].max(op_norm_unchecked(&beta));
        norms[2] = norms[2].max(op_norm_unchecked(&z));
        let g = v.adjoint();
        norms[3] = norms[3].max(op_norm_unchecked(&g));
        // A: f' = P m with P the top spectral projection of α*α
        if na > T::zero() {
            let eig = herm_eig(&(&alpha.adjoint() * &alpha), None)?;
            let top = *eig.eigenvalues.last().expect("nonempty");
            let vecs: Vec<Vec<C<T>>> = (0..eig.eigenvalues.len())
                .filter(|&k| eig.eigenvalues[k] >= top * (T::one() - T::tol_times(1.0)))
                .map(|k| eig.eigenvectors.col(k))
                .collect();
            let q = orthonormal_basis(alpha.rows(), &vecs, T::default_tol());
            let p = &q * &q.adjoint();
            let best = blk
                .block
                .basis()
                .iter()
                .map(|m| &p * m)
                .max_by(|x, y| op_norm_unchecked(x).partial_cmp(&op_norm_unchecked(y)).expect("finite"))
                .expect("nonempty basis");
            let nb = op_norm_unchecked(&best);
            if nb > T::zero() {
                let (coords, _) = blk.block.project(&best.scale_real(nb.recip()));
                wit_a[mr.clone()].copy_from_slice(&coords);
            }
        }
        // B and f: B' = P_R
        let pr = blk.right.project(&blk.block.right_support());
        wit_b[rr.clone()].copy_from_slice(&pr);
        g_mats.push(g);
    }
    // g: f' = g / ‖g‖
    if norms[3] > T::zero() {
        for ((blk, (mr, _)), g) in e.blocks.iter().zip(&ranges).zip(&g_mats) {
            let (coords, _) = blk.block.project(&g.scale_real(norms[3].recip()));
            wit_g[mr.clone()].copy_from_slice(&coords);
        }
    }
    let pi = pi_represent(e, a)?;
    let ratio = |xi: &[C<T>]| -> T {
        let nx = column_norm(e, xi);
        if nx <= T::zero() {
            T::zero()
        } else {
            column_norm(e, &pi.matrix.mul_vec(xi)) / nx
        }
    };
    let wa = ratio(&wit_a);
    let wb = ratio(&wit_b);
    let wg = ratio(&wit_g);
    let witness_values = [wa, wb, wb, wg];
    let mut estimate = wa.max(wb).max(wg);
    let mut rng = rng::seeded(seed);
    for _ in 0..samples {
        let xi = rng::gaussian_vec::<T>(&mut rng, n);
        estimate = estimate.max(ratio(&xi));
    }
    let target = norms.iter().copied().fold(T::zero(), T::max);
    let certified = estimate >= target - T::tol_times(10.0);
    Ok(BoundsReport {
        a_norm: norms[0],
        b_norm: norms[1],
        f_norm: norms[2],
        g_norm: norms[3],
        estimate,
        witness_values,
        certified,
    })
}

/// Orthonormal bases (in embedding coordinates) of the four corners of an ideal.
#[derive(Clone, Debug)]
pub struct PeirceSplit<T> {
    pub l: Matrix<T>,
    pub m: Matrix<T>,
    pub mbar: Matrix<T>,
    pub r: Matrix<T>,
}

impl<T: Real> PeirceSplit<T> {
    pub fn dims(&self) -> [usize; 4] {
        [self.l.cols(), self.m.cols(), self.mbar.cols(), self.r.cols()]
    }

    /// `S ∩ M` as elements of the base ternary ring.
    pub fn m_part(&self, e: &StandardEmbedding<T>) -> Vec<TernaryElement<T>> {
        self.m.columns().into_iter().map(|c| e.corner_m(&EmbeddingElement::new(c))).collect()
    }
}

/// Largest distance from `span(S)` of the products `e_i s` and `s e_i`,
/// relative to `‖s‖`, over basis elements `e_i` and orthonormal `s`.
pub fn ideal_residual<T: Real>(e: &StandardEmbedding<T>, q: &Matrix<T>) -> T {
    let mut worst = T::zero();
    for s in q.columns() {
        let s = EmbeddingElement::new(s);
        for i in 0..e.dim() {
            let b = e.basis_element(i);
            for p in [e.mul_unchecked(&b, &s), e.mul_unchecked(&s, &b)] {
                worst = worst.max(distance_to_span(q, &p.coords));
            }
        }
    }
    worst
}

/// Splits a two-sided ideal `S` of `𝒜(M)` into its Peirce corners.
pub fn peirce_split<T: Real>(e: &StandardEmbedding<T>, s: &[EmbeddingElement<T>]) -> Result<PeirceSplit<T>> {
    for x in s {
        e.check(x)?;
    }
    let n = e.dim();
    let q = orthonormal_basis(n, &s.iter().map(|x| x.coords.clone()).collect::<Vec<_>>(), T::default_tol());
    let res = ideal_residual(e, &q);
    if res > T::tol_times(10.0) {
        return Err(Error::NotAnIdeal(res.to_f64_lossy()));
    }
    let layout = e.layout();
    let corner = |idx: &[usize]| -> Result<Matrix<T>> {
        let vecs: Vec<Vec<C<T>>> = q
            .columns()
            .into_iter()
            .map(|c| {
                let mut v = vec![C::zero(); n];
                for &i in idx {
                    v[i] = c[i];
                }
                v
            })
            .collect();
        let basis = orthonormal_basis_abs(n, &vecs, T::tol_times(10.0));
        for v in basis.columns() {
            let d = distance_to_span(&q, &v);
            if d > T::tol_times(10.0) {
                return Err(Error::NotAnIdeal(d.to_f64_lossy()));
            }
        }
        Ok(basis)
    };
    Ok(PeirceSplit { l: corner(&layout.l)?, m: corner(&layout.m)?, mbar: corner(&layout.mbar)?, r: corner(&layout.r)? })
}

/// `|‖a*·a‖ − ‖a‖²|` in the block operator norm.
pub fn cstar_gap<T: Real>(e: &StandardEmbedding<T>, a: &EmbeddingElement<T>) -> Result<T> {
    let na = e.norm(a)?;
    let asa = e.mul(&e.star(a)?, a)?;
    Ok((e.norm(&asa)? - na * na).abs())
}

/// An element violating the C*-identity.
#[derive(Clone, Debug)]
pub struct CStarWitness<T> {
    /// Normalized to block operator norm 1.
    pub a: EmbeddingElement<T>,
    pub gap: T,
}

/// Searches the unit sphere of `𝒜(M)` for `a` with `|‖a*·a‖ − ‖a‖²| > 0.1`.
///
/// Candidates are random elements supported on one anti block plus, per anti
/// block, the elements `[[xx*, x], [0, 0]]` for basis elements `x`; the best
/// candidates are refined by a shrinking random-direction ascent.
pub fn cstar_identity_witness<T: Real>(e: &StandardEmbedding<T>, seed: u64) -> Result<CStarWitness<T>> {
    if !e.has_anti_block() {
        return Err(Error::NoWitness("no anti block: the C*-identity holds".into()));
    }
    let mut rng = rng::seeded(seed);
    let normalized = |a: EmbeddingElement<T>| -> Option<EmbeddingElement<T>> {
        let n = e.norm(&a).ok()?;
        (n > T::zero()).then(|| a.scale(re(n.recip())))
    };
    let gap = |a: &EmbeddingElement<T>| cstar_gap(e, a).unwrap_or(T::zero());
    let mut candidates = Vec::new();
    for blk in e.blocks.iter().filter(|b| b.rule() == ProductRule::Anti) {
        let r = blk.offset..blk.offset + blk.dim();
        for x in blk.block.basis() {
            let mut out = vec![C::zero(); e.dim];
            let zero = Matrix::zeros(blk.block.rows(), blk.block.cols());
            let zr = Matrix::zeros(blk.block.cols(), blk.block.cols());
            blk.write_corners(&mut out, [x * &x.adjoint(), x.clone(), zero.adjoint(), zr]);
            candidates.extend(normalized(EmbeddingElement::new(out)));
        }
        for _ in 0..32 {
            let mut a = e.zero();
            for i in r.clone() {
                a.coords[i] = rng::gaussian(&mut rng);
            }
            candidates.extend(normalized(a));
        }
    }
    let mut best = candidates
        .into_iter()
        .map(|a| (gap(&a), a))
        .max_by(|x, y| x.0.partial_cmp(&y.0).expect("finite gap"))
        .ok_or_else(|| Error::NoWitness("no candidates".into()))?;
    let mut step = T::lit(0.5);
    for _ in 0..200 {
        let dir = e.random_element(&mut rng);
        let dn = dir.coord_norm();
        let trial = best.1.add(&dir.scale(re(step / dn)));
        if let Some(t) = normalized(trial) {
            let g = gap(&t);
            if g > best.0 {
                best = (g, t);
                continue;
            }
        }
        step = (step * T::lit(0.9)).max(T::lit(1e-3));
    }
    if best.0 > T::lit(0.1) {
        Ok(CStarWitness { a: best.1, gap: best.0 })
    } else {
        Err(Error::NoWitness(format!("largest gap found {:.3e}", best.0.to_f64_lossy())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::scalar::c;

    fn el(v: &[f64]) -> EmbeddingElement<f64> {
        EmbeddingElement::new(v.iter().map(|&x| c(x, 0.0)).collect())
    }

    fn close(a: &EmbeddingElement<f64>, b: &EmbeddingElement<f64>, tol: f64) -> bool {
        a.sub(b).coord_norm() <= tol
    }

    // For ℂ the coordinates are (α, z, w, β) = the 2×2 matrix [[α, z], [w, β]] read row-major.
    fn unit4(i: usize) -> EmbeddingElement<f64> {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        el(&v)
    }

    #[test]
    fn anti_scalar_table() {
        let e = build_embedding(&instances::scalar::<f64>(Sign::Minus)).unwrap();
        assert_eq!(e.dim(), 4);
        let (e11, e12, e21, e22) = (unit4(0), unit4(1), unit4(2), unit4(3));
        let m = |a: &EmbeddingElement<f64>, b: &EmbeddingElement<f64>| e.mul(a, b).unwrap();
        assert!(close(&m(&e12, &e21), &e11, 0.0));
        assert!(close(&m(&e11, &e11), &e11.scale(c(-1.0, 0.0)), 0.0));
        assert!(close(&m(&e21, &e12), &e22, 0.0));
        assert!(close(&m(&e22, &e21), &e21.scale(c(-1.0, 0.0)), 0.0));
        let a = el(&[0.0, 1.0, 1.0, 0.0]);
        assert!(close(&m(&a, &a), &el(&[1.0, 0.0, 0.0, 1.0]), 1e-15));
    }

    #[test]
    fn tro_scalar_is_matrix_algebra() {
        let e = build_embedding(&instances::scalar::<f64>(Sign::Plus)).unwrap();
        let mut rng = rng::seeded(1);
        for _ in 0..20 {
            let (a, b) = (e.random_element(&mut rng), e.random_element(&mut rng));
            let p = e.mul(&a, &b).unwrap();
            let ma = Matrix::from_vec(2, 2, a.coords.clone()).unwrap();
            let mb = Matrix::from_vec(2, 2, b.coords.clone()).unwrap();
            let want = &ma * &mb;
            assert!(crate::matkernel::vnorm(&crate::matkernel::vsub(&p.coords, want.as_slice())) < 1e-12);
        }
    }

    #[test]
    fn star_examples() {
        let e = build_embedding(&instances::scalar::<f64>(Sign::Minus)).unwrap();
        let s = e.star(&unit4(1)).unwrap();
        assert!(close(&s, &unit4(2), 0.0));
        let p = e.mul(&unit4(0), &unit4(1)).unwrap();
        assert!(close(&e.star(&p).unwrap(), &unit4(2).scale(c(-1.0, 0.0)), 0.0));
    }

    #[test]
    fn units() {
        let e = build_embedding(&instances::scalar::<f64>(Sign::Minus)).unwrap();
        assert!(close(&e.identity(), &el(&[-1.0, 0.0, 0.0, -1.0]), 1e-14));
        let e = build_embedding(&instances::scalar::<f64>(Sign::Plus)).unwrap();
        assert!(close(&e.identity(), &el(&[1.0, 0.0, 0.0, 1.0]), 1e-14));
        let e = build_embedding(&instances::mixed_scalars::<f64>()).unwrap();
        assert_eq!(e.dim(), 8);
        assert!(close(&e.identity(), &el(&[1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0]), 1e-14));
    }

    #[test]
    fn unit_on_random_blocks() {
        let mut rng = rng::seeded(3);
        let m = instances::random_instance::<f64>(&mut rng, instances::InstanceKind::Mixed, 8);
        let e = build_embedding(&m).unwrap();
        let one = e.identity();
        for i in 0..e.dim() {
            let b = e.basis_element(i);
            assert!(close(&e.mul(&one, &b).unwrap(), &b, 1e-10));
            assert!(close(&e.mul(&b, &one).unwrap(), &b, 1e-10));
        }
    }

    #[test]
    fn structure_presentation_rejected() {
        let m = instances::scalar::<f64>(Sign::Plus);
        let s = TernarySpace::Structure(crate::ternary::structure_constants_of(&m));
        assert!(matches!(build_embedding(&s), Err(Error::NormUnavailable)));
    }

    #[test]
    fn triple_product_is_a_corner() {
        let m = instances::mixed_blocks::<f64>();
        let e = build_embedding(&m).unwrap();
        let mut rng = rng::seeded(5);
        for _ in 0..50 {
            let (x, y, z) = (m.random_element(&mut rng), m.random_element(&mut rng), m.random_element(&mut rng));
            let p = e.mul(&e.mul(&e.embed_m(&x), &e.embed_mbar(&y)).unwrap(), &e.embed_m(&z)).unwrap();
            let want = m.triple(&x, &y, &z).unwrap();
            assert!(e.corner_m(&p).sub(&want).coord_norm() <= 1e-9 * (1.0 + want.coord_norm()));
            let rest = p.sub(&e.embed_m(&want));
            assert!(rest.coord_norm() <= 1e-9 * (1.0 + want.coord_norm()));
        }
    }

    #[test]
    fn pi_examples() {
        let e = build_embedding(&instances::scalar::<f64>(Sign::Plus)).unwrap();
        let p = pi_represent(&e, &el(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let want = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!((&p.matrix - &want).fro_norm() < 1e-14);
        let p = pi_represent(&e, &e.identity()).unwrap();
        assert!((&p.matrix - &Matrix::identity(2)).fro_norm() < 1e-14);
    }

    #[test]
    fn pi_is_injective_homomorphism() {
        let m = instances::mixed_blocks::<f64>();
        let e = build_embedding(&m).unwrap();
        assert!(pi_injectivity(&e).unwrap() > 1e-9);
        assert!(pi_homomorphism_residual(&e, 20, 3).unwrap() <= 1e-12);
        let mut rng = rng::seeded(6);
        for _ in 0..20 {
            let (a, b) = (e.random_element(&mut rng), e.random_element(&mut rng));
            let pab = pi_represent(&e, &e.mul(&a, &b).unwrap()).unwrap().matrix;
            let prod = &pi_represent(&e, &a).unwrap().matrix * &pi_represent(&e, &b).unwrap().matrix;
            assert!((&pab - &prod).fro_norm() <= 1e-9 * (1.0 + pab.fro_norm()));
        }
    }

    #[test]
    fn pi_bounds() {
        let m = instances::mixed_blocks::<f64>();
        let e = build_embedding(&m).unwrap();
        let r = pi_norm_lower_bounds(&e, &e.zero(), 10, 1).unwrap();
        assert!(r.estimate == 0.0 && r.a_norm == 0.0 && r.certified);
        let mut rng = rng::seeded(7);
        for _ in 0..20 {
            let a = e.random_element(&mut rng);
            let r = pi_norm_lower_bounds(&e, &a, 10, 2).unwrap();
            assert!(r.certified, "{r:?}");
            assert!(r.witness_values[0] >= r.a_norm - 1e-8);
            assert!(r.witness_values[3] >= r.g_norm - 1e-8);
        }
        // only f nonzero
        let f_only = e.embed_m(&m.random_element(&mut rng));
        let r = pi_norm_lower_bounds(&e, &f_only, 0, 0).unwrap();
        assert!(r.estimate >= r.f_norm - 1e-8 && r.f_norm > 0.0);
    }

    #[test]
    fn peirce_examples() {
        let m = instances::diag::<f64>(2, Sign::Plus);
        let e = build_embedding(&m).unwrap();
        let all: Vec<_> = (0..e.dim()).map(|i| e.basis_element(i)).collect();
        let split = peirce_split(&e, &all).unwrap();
        let b = &e.blocks()[0];
        assert_eq!(split.dims(), [b.left.dim(), 2, 2, b.right.dim()]);
        let zero = peirce_split(&e, &[]).unwrap();
        assert_eq!(zero.dims(), [0, 0, 0, 0]);
        // one matrix unit of the linking algebra is not an ideal
        assert!(matches!(peirce_split(&e, &[e.basis_element(0)]), Err(Error::NotAnIdeal(_))));
    }

    #[test]
    fn cstar_gap_examples() {
        let e = build_embedding(&instances::scalar::<f64>(Sign::Minus)).unwrap();
        let g = cstar_gap(&e, &el(&[1.0, 1.0, 0.0, 0.0])).unwrap();
        assert!((g - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!(cstar_gap(&e, &unit4(0)).unwrap() < 1e-14);
        let w = cstar_identity_witness(&e, 1).unwrap();
        assert!(w.gap > 0.1);
        let tro = build_embedding(&instances::full_block::<f64>(2, 2, Sign::Plus)).unwrap();
        assert!(matches!(cstar_identity_witness(&tro, 1), Err(Error::NoWitness(_))));
        let mut rng = rng::seeded(8);
        for _ in 0..20 {
            let a = tro.random_element(&mut rng);
            let n = tro.norm(&a).unwrap();
            assert!(cstar_gap(&tro, &a).unwrap() <= 1e-8 * n * n);
        }
    }
}
