//! Ideals of ternary rings, their associative envelopes, and quotients.

use num_traits::Zero;

use crate::embedding::{ideal_residual, EmbeddingElement, StandardEmbedding};
use crate::error::{Error, Result};
use crate::matkernel::{
    distance_to_span, herm_function, hs_inner, least_squares, null_space, op_norm_unchecked, orthonormal_basis, svd,
    vnorm, Matrix,
};
use crate::rng;
use crate::scalar::{re, Real, C};
use crate::ternary::{Sign, StructureConstants, TernaryElement, TernarySpace};

const MAX_ROUNDS: usize = 64;

/// Ideal of a ternary ring; `basis` holds orthonormal coordinate columns.
#[derive(Clone, Debug)]
pub struct TernaryIdeal<T> {
    parent: TernarySpace<T>,
    basis: Matrix<T>,
}

impl<T: Real> TernaryIdeal<T> {
    /// Validates the three containments.
    pub fn new(parent: &TernarySpace<T>, elements: &[TernaryElement<T>]) -> Result<Self> {
        let q = span_of(parent, elements)?;
        let r = ternary_ideal_residual(parent, &q);
        if r > T::tol_times(10.0) {
            return Err(Error::NotAnIdeal(r.to_f64_lossy()));
        }
        Ok(Self { parent: parent.clone(), basis: q })
    }

    pub fn parent(&self) -> &TernarySpace<T> {
        &self.parent
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis_matrix(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn basis(&self) -> Vec<TernaryElement<T>> {
        self.basis.columns().into_iter().map(TernaryElement::new).collect()
    }

    pub fn contains(&self, x: &TernaryElement<T>) -> bool {
        distance_to_span(&self.basis, &x.coords) <= T::tol_times(10.0) * x.coord_norm().max(T::one())
    }

    /// `(dim J ∩ M₊, dim J ∩ M₋)` for block presentations.
    pub fn sign_dims(&self) -> Result<(usize, usize)> {
        let bs = self.parent.blocks().ok_or(Error::NormUnavailable)?;
        let n = self.parent.dim();
        let mut dims = (0, 0);
        for sign in [Sign::Plus, Sign::Minus] {
            let idx: Vec<usize> = bs
                .iter()
                .zip(self.parent.block_offsets())
                .filter(|(b, _)| b.sign() == sign)
                .flat_map(|(b, o)| o..o + b.dim())
                .collect();
            let vecs: Vec<Vec<C<T>>> = self
                .basis
                .columns()
                .into_iter()
                .map(|c| (0..n).map(|i| if idx.contains(&i) { c[i] } else { C::zero() }).collect())
                .collect();
            let d = orthonormal_basis(n, &vecs, T::tol_times(10.0)).cols();
            match sign {
                Sign::Plus => dims.0 = d,
                Sign::Minus => dims.1 = d,
            }
        }
        Ok(dims)
    }
}

fn span_of<T: Real>(m: &TernarySpace<T>, elements: &[TernaryElement<T>]) -> Result<Matrix<T>> {
    for x in elements {
        if x.dim() != m.dim() {
            return Err(Error::Shape("element outside the space".into()));
        }
    }
    let vecs: Vec<Vec<C<T>>> = elements.iter().map(|x| x.coords.clone()).collect();
    let scale = vecs.iter().map(|v| vnorm(v)).fold(T::zero(), T::max);
    Ok(crate::matkernel::orthonormal_basis_abs(m.dim(), &vecs, scale * T::default_tol()))
}

/// Largest distance from `span(Q)` of `[a b s]`, `[s a b]` and `[a s b]`
/// over basis elements `a, b` and orthonormal columns `s`, relative to the
/// largest basis product.
pub fn ternary_ideal_residual<T: Real>(m: &TernarySpace<T>, q: &Matrix<T>) -> T {
    let e = m.basis_elements();
    let mut worst = T::zero();
    let mut scale = T::zero();
    for s in q.columns() {
        let s = TernaryElement::new(s);
        for a in &e {
            for b in &e {
                for p in [m.triple_unchecked(a, b, &s), m.triple_unchecked(&s, a, b), m.triple_unchecked(a, &s, b)] {
                    scale = scale.max(p.coord_norm());
                    worst = worst.max(distance_to_span(q, &p.coords));
                }
            }
        }
    }
    if scale > T::one() {
        worst / scale
    } else {
        worst
    }
}

/// `[M M S] ⊆ S`, `[S M M] ⊆ S` and `[M S M] ⊆ S`.
pub fn is_ideal<T: Real>(m: &TernarySpace<T>, s: &[TernaryElement<T>]) -> bool {
    match span_of(m, s) {
        Ok(q) => ternary_ideal_residual(m, &q) <= T::tol_times(10.0),
        Err(_) => false,
    }
}

/// Smallest ideal containing `gens`.
pub fn generated_ideal<T: Real>(m: &TernarySpace<T>, gens: &[TernaryElement<T>]) -> Result<TernaryIdeal<T>> {
    let n = m.dim();
    let mut q = span_of(m, gens)?;
    let e = m.basis_elements();
    for _ in 0..MAX_ROUNDS {
        let mut vecs = q.columns();
        let scale = e.iter().map(|x| x.coord_norm()).fold(T::one(), T::max);
        for s in q.columns() {
            let s = TernaryElement::new(s);
            for a in &e {
                for b in &e {
                    for p in [m.triple_unchecked(a, b, &s), m.triple_unchecked(&s, a, b), m.triple_unchecked(a, &s, b)] {
                        if distance_to_span(&q, &p.coords) > T::tol_times(10.0) * scale {
                            vecs.push(p.coords);
                        }
                    }
                }
            }
        }
        if vecs.len() == q.cols() {
            return Ok(TernaryIdeal { parent: m.clone(), basis: q });
        }
        q = orthonormal_basis(n, &vecs, T::tol_times(10.0));
    }
    Err(Error::ClosureDidNotStabilize(MAX_ROUNDS))
}

/// `𝒜(I) = span{L(I), I, Ī, R(I)}` inside `𝒜(M)` as orthonormal columns.
pub fn embed_ideal<T: Real>(e: &StandardEmbedding<T>, ideal: &TernaryIdeal<T>) -> Result<Matrix<T>> {
    let r = ternary_ideal_residual(e.base(), &ideal.basis);
    if r > T::tol_times(10.0) {
        return Err(Error::NotAnIdeal(r.to_f64_lossy()));
    }
    let basis = ideal.basis();
    let up: Vec<EmbeddingElement<T>> = basis.iter().map(|x| e.embed_m(x)).collect();
    let down: Vec<EmbeddingElement<T>> = basis.iter().map(|x| e.embed_mbar(x)).collect();
    let mut vecs: Vec<Vec<C<T>>> = Vec::new();
    for x in &up {
        vecs.push(x.coords.clone());
    }
    for x in &down {
        vecs.push(x.coords.clone());
    }
    for x in &up {
        for y in &down {
            vecs.push(e.mul(x, y)?.coords);
            vecs.push(e.mul(y, x)?.coords);
        }
    }
    let q = orthonormal_basis(e.dim(), &vecs, T::tol_times(10.0));
    let res = ideal_residual(e, &q);
    if res > T::tol_times(10.0) {
        return Err(Error::NotAnIdeal(res.to_f64_lossy()));
    }
    Ok(q)
}

/// `M/J` as structure constants on a complement of `J`.
#[derive(Clone, Debug)]
pub struct Quotient<T> {
    pub space: TernarySpace<T>,
    /// Complement basis (columns, in `M` coordinates) representing the cosets.
    pub complement: Matrix<T>,
    /// Largest quotient coordinate of a triple product with one factor in `J`.
    pub well_defined_residual: T,
}

impl<T: Real> Quotient<T> {
    /// Quotient coordinates of the coset of `x`.
    pub fn coset(&self, ideal: &TernaryIdeal<T>, x: &TernaryElement<T>) -> Result<Vec<C<T>>> {
        coset_coords(&self.complement, &ideal.basis, &x.coords)
    }
}

fn coset_coords<T: Real>(comp: &Matrix<T>, ideal: &Matrix<T>, x: &[C<T>]) -> Result<Vec<C<T>>> {
    let k = comp.cols();
    let mut cols = comp.columns();
    cols.extend(ideal.columns());
    let full = Matrix::from_columns(x.len(), &cols);
    let ls = least_squares(&full, x)?;
    Ok(ls.x[..k].to_vec())
}

/// Complement of `J` orthogonal for the space's positive form (HS for
/// blocks), orthonormal for that form.
fn complement<T: Real>(m: &TernarySpace<T>, j: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.dim();
    let g = m.gram();
    let comp = if j.cols() == 0 {
        Matrix::identity(n)
    } else {
        null_space(&(&j.adjoint() * &g), T::default_tol())
    };
    if comp.cols() == 0 {
        return Ok(comp);
    }
    // G-orthonormalize: C (C* G C)^{-1/2}
    let gram_c = &(&comp.adjoint() * &g) * &comp;
    let w = herm_function(&gram_c, |l| l.sqrt().recip())?;
    Ok(&comp * &w)
}

/// `M/J` with the triple product induced on a form-orthogonal complement.
pub fn quotient<T: Real>(m: &TernarySpace<T>, j: &TernaryIdeal<T>) -> Result<Quotient<T>> {
    let r = ternary_ideal_residual(m, &j.basis);
    if r > T::tol_times(10.0) {
        return Err(Error::NotAnIdeal(r.to_f64_lossy()));
    }
    let comp = complement(m, &j.basis)?;
    let k = comp.cols();
    let cols: Vec<TernaryElement<T>> = comp.columns().into_iter().map(TernaryElement::new).collect();
    let mut sc = StructureConstants::zeros(k);
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let p = m.triple_unchecked(&cols[a], &cols[b], &cols[c]);
                let q = coset_coords(&comp, &j.basis, &p.coords)?;
                for (d, v) in q.into_iter().enumerate() {
                    sc.set(a, b, c, d, v);
                }
            }
        }
    }
    let mut well = T::zero();
    for jv in j.basis.columns() {
        let jv = TernaryElement::new(jv);
        for a in &cols {
            for b in &cols {
                for p in [m.triple_unchecked(&jv, a, b), m.triple_unchecked(a, &jv, b), m.triple_unchecked(a, b, &jv)] {
                    well = well.max(vnorm(&coset_coords(&comp, &j.basis, &p.coords)?));
                }
            }
        }
    }
    Ok(Quotient { space: TernarySpace::Structure(sc), complement: comp, well_defined_residual: well })
}

/// Bounds on `inf_{j ∈ J} ‖f − j‖`.
#[derive(Clone, Debug)]
pub struct QuotientNorm<T> {
    /// `‖f − j*‖` at the best `j*` found.
    pub upper: T,
    /// Dual certificate value `|⟨W, f⟩| / ‖W‖_*` with `W ⊥ J`.
    pub lower: T,
    pub gap: T,
}

/// Upper bound by minimizing a smoothed maximal singular value over `J`
/// (BFGS with decreasing smoothing, several starts), lower bound from the
/// dual certificate built from the top singular vectors at the minimizer.
pub fn quotient_norm<T: Real>(
    m: &TernarySpace<T>,
    j: &TernaryIdeal<T>,
    f: &TernaryElement<T>,
    seed: u64,
) -> Result<QuotientNorm<T>> {
    m.blocks().ok_or(Error::NormUnavailable)?;
    if f.dim() != m.dim() {
        return Err(Error::Shape("element outside the space".into()));
    }
    let fm = m.element_matrices(f)?;
    let jm: Vec<Vec<Matrix<T>>> = j.basis().iter().map(|x| m.element_matrices(x)).collect::<Result<_>>()?;
    let k = jm.len();
    let fnorm = fm.iter().map(op_norm_unchecked).fold(T::zero(), T::max);
    if k == 0 || fnorm.is_zero() {
        return Ok(QuotientNorm { upper: fnorm, lower: fnorm, gap: T::zero() });
    }
    let problem = NormProblem { f: &fm, j: &jm };

    // warm start: HS projection of f onto J
    let g = m.gram();
    let jb = j.basis_matrix();
    let a = &(&jb.adjoint() * &g) * jb;
    let rhs = (&jb.adjoint() * &g).mul_vec(&f.coords);
    let t0 = least_squares(&a, &rhs)?.x;

    let mut rng = rng::seeded(seed);
    let mut starts = vec![t0.clone(), vec![C::zero(); k]];
    for _ in 0..2 {
        starts.push(
            t0.iter()
                .map(|z| *z + rng::gaussian::<T>(&mut rng) * re(fnorm * T::lit(0.5)))
                .collect(),
        );
    }
    let mut best_t = t0;
    let mut best = problem.value(&best_t);
    for s in starts {
        let t = problem.minimize(s, fnorm);
        let v = problem.value(&t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let lower = problem.dual_bound(&best_t, best);
    Ok(QuotientNorm { upper: best, lower, gap: (best - lower).max(T::zero()) })
}

struct NormProblem<'a, T> {
    f: &'a [Matrix<T>],
    /// `j[k][b]`: block `b` of the `k`-th ideal basis element.
    j: &'a [Vec<Matrix<T>>],
}

impl<T: Real> NormProblem<'_, T> {
    fn residual(&self, t: &[C<T>]) -> Vec<Matrix<T>> {
        self.f
            .iter()
            .enumerate()
            .map(|(b, fb)| {
                let mut x = fb.clone();
                for (tk, jk) in t.iter().zip(self.j) {
                    if !tk.is_zero() {
                        x -= &jk[b].scale(*tk);
                    }
                }
                x
            })
            .collect()
    }

    fn value(&self, t: &[C<T>]) -> T {
        self.residual(t).iter().map(op_norm_unchecked).fold(T::zero(), T::max)
    }

    /// `μ log Σ exp(σ_i/μ)` over all singular values of all blocks and its
    /// gradient with respect to `(Re t, Im t)`.
    fn smoothed(&self, t: &[C<T>], mu: T) -> (T, Vec<T>) {
        let k = t.len();
        let blocks = self.residual(t);
        let svds: Vec<_> = blocks.iter().map(svd).collect();
        let smax = svds
            .iter()
            .flat_map(|s| s.singular_values.iter().copied())
            .fold(T::zero(), T::max);
        let mut z = T::zero();
        for s in &svds {
            for &sv in &s.singular_values {
                z += ((sv - smax) / mu).exp();
            }
        }
        let value = smax + mu * z.ln();
        let mut grad = vec![T::zero(); 2 * k];
        for (b, s) in svds.iter().enumerate() {
            for (i, &sv) in s.singular_values.iter().enumerate() {
                let w = ((sv - smax) / mu).exp() / z;
                if w < T::epsilon() {
                    continue;
                }
                let u = s.u.col(i);
                let v = s.v.col(i);
                for (kk, jk) in self.j.iter().enumerate() {
                    // dσ = Re(u* dX v), dX = −dt J
                    let ujv = crate::matkernel::vdot(&u, &jk[b].mul_vec(&v));
                    grad[kk] -= w * ujv.re;
                    grad[k + kk] += w * ujv.im;
                }
            }
        }
        (value, grad)
    }

    fn minimize(&self, start: Vec<C<T>>, scale: T) -> Vec<C<T>> {
        let k = start.len();
        let to_real = |t: &[C<T>]| -> Vec<T> { t.iter().map(|z| z.re).chain(t.iter().map(|z| z.im)).collect() };
        let to_complex = |x: &[T]| -> Vec<C<T>> { (0..k).map(|i| C::new(x[i], x[k + i])).collect() };
        let mut x = to_real(&start);
        let mut mu = scale * T::lit(0.1);
        let floor = scale * T::lit(1e-12);
        while mu >= floor {
            x = bfgs(|y| self.smoothed(&to_complex(y), mu), x, 200, scale * T::lit(1e-14));
            mu = mu * T::lit(0.1);
        }
        to_complex(&x)
    }

    /// Builds `W` from the top singular pairs of the residual, projects it
    /// HS-orthogonally to `J`, and returns `|⟨W, f⟩| / ‖W‖_*`.
    fn dual_bound(&self, t: &[C<T>], value: T) -> T {
        let blocks = self.residual(t);
        let mut best = T::zero();
        for rel in [1e-9, 1e-7, 1e-5, 1e-3] {
            let cut = value * (T::one() - T::lit(rel));
            let mut w: Vec<Matrix<T>> = blocks
                .iter()
                .map(|x| {
                    let s = svd(x);
                    let mut acc = Matrix::zeros(x.rows(), x.cols());
                    for (i, &sv) in s.singular_values.iter().enumerate() {
                        if sv >= cut && sv > T::zero() {
                            let u = Matrix::column(&s.u.col(i));
                            let v = Matrix::column(&s.v.col(i));
                            acc += &(&u * &v.adjoint());
                        }
                    }
                    acc
                })
                .collect();
            // project ⊥ J: Gram of J in the summed HS inner product
            let k = self.j.len();
            let ip = |a: &[Matrix<T>], b: &[Matrix<T>]| -> C<T> {
                a.iter().zip(b).map(|(x, y)| hs_inner(x, y).expect("shape")).sum()
            };
            let gram = Matrix::from_fn(k, k, |p, q| ip(&self.j[q], &self.j[p]));
            let rhs: Vec<C<T>> = (0..k).map(|p| ip(&w, &self.j[p])).collect();
            if let Ok(ls) = least_squares(&gram, &rhs) {
                for (c, jk) in ls.x.iter().zip(self.j) {
                    for (wb, jb) in w.iter_mut().zip(jk) {
                        *wb -= &jb.scale(*c);
                    }
                }
            }
            let nuc: T = w.iter().map(|x| crate::matkernel::singular_values(x).into_iter().sum::<T>()).sum();
            if nuc > T::zero() {
                let val = ip(self.f, &w).norm() / nuc;
                best = best.max(val);
            }
        }
        best
    }
}

/// BFGS with Armijo backtracking.
fn bfgs<T: Real>(f: impl Fn(&[T]) -> (T, Vec<T>), mut x: Vec<T>, iters: usize, gtol: T) -> Vec<T> {
    let n = x.len();
    let mut h = vec![vec![T::zero(); n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let (mut fx, mut g) = f(&x);
    for _ in 0..iters {
        let gn = g.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if gn <= gtol {
            break;
        }
        let mut d: Vec<T> = (0..n).map(|i| -(0..n).map(|j| h[i][j] * g[j]).sum::<T>()).collect();
        let mut slope: T = d.iter().zip(&g).map(|(a, b)| *a * *b).sum();
        if slope >= T::zero() {
            for (i, row) in h.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { T::one() } else { T::zero() };
                }
            }
            d = g.iter().map(|v| -*v).collect();
            slope = -gn * gn;
        }
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<T> = x.iter().zip(&d).map(|(a, b)| *a + step * *b).collect();
            let (fn_, gn_) = f(&xn);
            if fn_ <= fx + T::lit(1e-4) * step * slope {
                accepted = Some((xn, fn_, gn_));
                break;
            }
            step = step * T::lit(0.5);
        }
        let Some((xn, fn_, gn_)) = accepted else { break };
        let s: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = gn_.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy: T = s.iter().zip(&y).map(|(a, b)| *a * *b).sum();
        if sy > T::epsilon() {
            let hy: Vec<T> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: T = y.iter().zip(&hy).map(|(a, b)| *a * *b).sum();
            let rho = sy.recip();
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += (T::one() + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let done = fx - fn_ <= T::epsilon() * fx.abs();
        x = xn;
        fx = fn_;
        g = gn_;
        if done {
            break;
        }
    }
    x
}
