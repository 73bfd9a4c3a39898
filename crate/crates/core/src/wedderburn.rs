//! Numerical algebra isomorphisms onto full matrix algebras.
//!
//! A linear map `φ: A → M_n(ℂ)` is stored as an `n² × dim A` matrix whose
//! column `k` is `φ(e_k)` flattened row-major, so `a_ijpq` for the source
//! basis element `E_ij` sits at row `p·n + q`, column `i·n + j`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matkernel::{
    least_squares, least_squares_truncated, null_space, orthonormal_basis, singular_values, vnorm, vsub, Matrix,
};
use crate::radical::{jacobson_radical, AssocAlgebra};
use crate::rng::{self, Rng};
use crate::scalar::{re, Real, C};

const RESTARTS: usize = 64;
const ITERATIONS: usize = 200;
const ACCEPT: f64 = 1e-8;
const DET_CUT: f64 = 1e-10;
const SOLVE_ACCEPT: f64 = 1e-8;

/// `(M₂(ℂ), ·)`: 2×2 matrices `[[α, z], [w, β]]` with the sign-twisted
/// product of the anti-linking algebra over `ℂ` and the adjoint as
/// involution. Basis `E11, E12, E21, E22`.
pub fn anti_m2<T: Real>() -> AssocAlgebra<T> {
    let e: Vec<Matrix<T>> = (0..4).map(|k| Matrix::unit(2, 2, k / 2, k % 2)).collect();
    let mut c = vec![C::zero(); 64];
    for a in 0..4 {
        for b in 0..4 {
            let p = anti_product(&e[a], &e[b]);
            for k in 0..4 {
                c[(a * 4 + b) * 4 + k] = p[(k / 2, k % 2)];
            }
        }
    }
    let star = AssocAlgebra::<T>::full_matrix(2).involution().cloned();
    AssocAlgebra::new(4, c, star).expect("associative")
}

/// `[[α,z],[w,β]] · [[α',z'],[w',β']]` in `(M₂(ℂ), ·)`.
pub fn anti_product<T: Real>(x: &Matrix<T>, y: &Matrix<T>) -> Matrix<T> {
    let (a, z, w, b) = (x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]);
    let (a2, z2, w2, b2) = (y[(0, 0)], y[(0, 1)], y[(1, 0)], y[(1, 1)]);
    Matrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => -a * a2 + z * w2,
        (0, 1) => -(a * z2 + z * b2),
        (1, 0) => -(w * a2 + b * w2),
        _ => w * z2 - b * b2,
    })
}

/// `φ([[α,z],[w,β]]) = [[−α,−z],[w,−β]]` as a map matrix.
pub fn closed_form_m2<T: Real>() -> Matrix<T> {
    let mut phi = Matrix::zeros(4, 4);
    for (k, s) in [-1.0, -1.0, 1.0, -1.0].into_iter().enumerate() {
        phi[(k, k)] = re(T::lit(s));
    }
    phi
}

/// `e_a · e_b = ε e_c` for the matrix-unit basis `E_ij` (index `i·n+j`).
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonEntry<T> {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub value: C<T>,
}

/// Reads `ε(ijl)` from `E_ij · E_jl = ε(ijl) E_il`. `None` if the source
/// is not of that shape (dimension not a square, or a product leaves the
/// line of `E_il`, or a product `E_ij · E_kl` with `j ≠ k` is nonzero).
pub fn epsilon_table<T: Real>(a: &AssocAlgebra<T>) -> Option<Vec<EpsilonEntry<T>>> {
    let n = square_root(a.dim())?;
    let tol = T::default_tol();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let (x, y) = (i * n + j, k * n + l);
                    let target = i * n + l;
                    for c in 0..a.dim() {
                        let v = a.constant(x, y, c);
                        if (j != k || c != target) && v.norm() > tol {
                            return None;
                        }
                    }
                    if j == k {
                        out.push(EpsilonEntry { i, j, l, value: a.constant(x, y, target) });
                    }
                }
            }
        }
    }
    Some(out)
}

fn square_root(d: usize) -> Option<usize> {
    let n = (d as f64).sqrt().round() as usize;
    (n * n == d).then_some(n)
}

/// A verified algebra isomorphism `A → M_n(ℂ)`.
#[derive(Clone, Debug)]
pub struct WedderburnSolution<T> {
    /// `n² × dim A`; column `k` is `φ(e_k)` flattened row-major.
    pub map: Matrix<T>,
    pub target_dim: usize,
    /// Largest homomorphism defect over basis pairs.
    pub residual: T,
    /// `‖φ(1_A) − I‖_F` (zero when `A` has no unit).
    pub unit_residual: T,
    /// Condition number of `map`.
    pub condition: T,
    /// Restart on which the solver converged (1-based; 0 if not solved).
    pub restart: usize,
    pub epsilon: Option<Vec<EpsilonEntry<T>>>,
}

impl<T: Real> WedderburnSolution<T> {
    /// `a_ijpq`: the `E_pq` coefficient of `φ(E_ij)`.
    pub fn coefficient(&self, i: usize, j: usize, p: usize, q: usize) -> C<T> {
        let n = self.target_dim;
        self.map[(p * n + q, i * n + j)]
    }

    /// `φ(x)` as an `n × n` matrix.
    pub fn apply(&self, x: &[C<T>]) -> Matrix<T> {
        unflatten(&self.map.mul_vec(x), self.target_dim)
    }

    /// Largest defect of `Σ_q a_ijpq a_jlqs = ε(ijl) a_ilps`, or `None`
    /// without an ε table.
    pub fn epsilon_residual(&self) -> Option<T> {
        let eps = self.epsilon.as_ref()?;
        let n = self.target_dim;
        let mut worst = T::zero();
        for e in eps {
            for p in 0..n {
                for s in 0..n {
                    let lhs: C<T> =
                        (0..n).map(|q| self.coefficient(e.i, e.j, p, q) * self.coefficient(e.j, e.l, q, s)).sum();
                    let rhs = e.value * self.coefficient(e.i, e.l, p, s);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        Some(worst)
    }
}

fn unflatten<T: Real>(v: &[C<T>], n: usize) -> Matrix<T> {
    Matrix::from_vec(n, n, v.to_vec()).expect("n² entries")
}

/// Homomorphism residual and invertibility of a linear map between algebras.
#[derive(Clone, Debug)]
pub struct IsoReport<T> {
    /// `max_{a,b} ‖φ(e_a e_b) − φ(e_a) φ(e_b)‖` (coordinate 2-norm).
    pub residual: T,
    pub min_singular: T,
    pub condition: T,
    pub invertible: bool,
}

impl<T: Real> IsoReport<T> {
    pub fn passed(&self, tol: T) -> bool {
        self.invertible && self.residual <= tol
    }
}

/// Checks `φ` (a `dim B × dim A` matrix) on all basis pairs.
pub fn verify_isomorphism<T: Real>(phi: &Matrix<T>, a: &AssocAlgebra<T>, b: &AssocAlgebra<T>) -> Result<IsoReport<T>> {
    if phi.shape() != (b.dim(), a.dim()) {
        return Err(Error::Shape(format!(
            "map is {}x{}, expected {}x{}",
            phi.rows(),
            phi.cols(),
            b.dim(),
            a.dim()
        )));
    }
    let images = phi.columns();
    let mut residual = T::zero();
    for x in 0..a.dim() {
        for y in 0..a.dim() {
            let lhs = phi.mul_vec(&a.mul(&a.basis_element(x), &a.basis_element(y)));
            let rhs = b.mul(&images[x], &images[y]);
            residual = residual.max(vnorm(&vsub(&lhs, &rhs)));
        }
    }
    let sv = singular_values(phi);
    let smax = sv.first().copied().unwrap_or_else(T::zero);
    let smin = if a.dim() == b.dim() { sv.last().copied().unwrap_or_else(T::zero) } else { T::zero() };
    let condition = if smin > T::zero() { smax / smin } else { T::infinity() };
    let invertible = a.dim() == b.dim() && smin > smax * T::tol_times(1.0);
    Ok(IsoReport { residual, min_singular: smin, condition, invertible })
}

/// Solves for `φ: A → M_n(ℂ)` with `φ(xy) = φ(x)φ(y)` on the basis (and
/// `φ(1) = I` when `A` is unital) by damped Gauss–Newton from random
/// complex starts.
pub fn solve_wedderburn<T: Real>(a: &AssocAlgebra<T>, target_dim: usize, seed: u64) -> Result<WedderburnSolution<T>> {
    let n = target_dim;
    if a.dim() != n * n || n == 0 {
        return Err(Error::Shape(format!("algebra of dimension {} cannot map onto M_{n}", a.dim())));
    }
    let rad = jacobson_radical(a);
    if rad.cols() > 0 {
        return Err(Error::PreconditionFailed(format!("algebra has a radical of dimension {}", rad.cols())));
    }
    let b = AssocAlgebra::<T>::full_matrix(n);
    let system = System::new(a, n);
    let mut rng = rng::seeded(seed);
    let mut best = T::infinity();
    for restart in 1..=RESTARTS {
        // Gaussian starts are often drawn to the rank-one map x ↦ λ(x)·I for
        // n ≥ 3, so every other restart starts from a spectral idempotent.
        let x0 = match (restart % 2 == 0).then(|| spectral_start(a, n, &mut rng)).flatten() {
            Some(x0) => x0,
            None => rng::gaussian_vec::<T>(&mut rng, n * n * a.dim()),
        };
        let x = system.levenberg_marquardt(x0);
        let phi = Matrix::from_fn(n * n, a.dim(), |r, k| x[k * n * n + r]);
        let report = verify_isomorphism(&phi, a, &b)?;
        let unit_residual = vnorm(&system.unit_defect(&x));
        best = best.min(report.residual.max(unit_residual));
        if report.residual <= T::lit(ACCEPT) && unit_residual <= T::lit(ACCEPT) && report.invertible {
            return Ok(WedderburnSolution {
                map: phi,
                target_dim: n,
                residual: report.residual,
                unit_residual,
                condition: report.condition,
                restart,
                epsilon: epsilon_table(a),
            });
        }
    }
    Err(Error::SolverBudgetExceeded(format!(
        "{RESTARTS} restarts of {ITERATIONS} iterations, best residual {:.3e}",
        best.to_f64_lossy()
    )))
}

/// Wraps a given map (e.g. a closed form) as a solution after verifying it.
pub fn solution_from_map<T: Real>(a: &AssocAlgebra<T>, target_dim: usize, map: Matrix<T>) -> Result<WedderburnSolution<T>> {
    let b = AssocAlgebra::<T>::full_matrix(target_dim);
    let report = verify_isomorphism(&map, a, &b)?;
    let unit_residual = match a.unit() {
        Some(u) => vnorm(&vsub(&map.mul_vec(&u), &Matrix::<T>::identity(target_dim).into_vec())),
        None => T::zero(),
    };
    Ok(WedderburnSolution {
        map,
        target_dim,
        residual: report.residual,
        unit_residual,
        condition: report.condition,
        restart: 0,
        epsilon: epsilon_table(a),
    })
}

/// Representation of `A` on the left ideal `A·e`, where `e` is the spectral
/// idempotent of a random element for one root of its minimal polynomial.
/// Returns unknowns in the solver layout, or `None` if the random element
/// has repeated eigenvalues or the ideal has the wrong dimension.
fn spectral_start<T: Real>(a: &AssocAlgebra<T>, n: usize, rng: &mut Rng) -> Option<Vec<C<T>>> {
    let d = a.dim();
    let unit = a.unit()?;
    let x = a.random_element(rng);
    let mut powers = vec![unit.clone()];
    for k in 0..n {
        powers.push(a.mul(&powers[k], &x));
    }
    let ns = null_space(&Matrix::from_columns(d, &powers), T::lit(1e-9));
    if ns.cols() != 1 {
        return None;
    }
    let coeffs = ns.col(0);
    let lead = coeffs[n];
    if lead.norm() < T::lit(1e-8) {
        return None;
    }
    let monic: Vec<C<T>> = coeffs.iter().map(|z| *z / lead).collect();
    let roots = polynomial_roots(&monic);
    let spread = roots.iter().map(|z| z.norm()).fold(T::one(), T::max);
    let mut e = unit.clone();
    for r in &roots[1..] {
        let gap = roots[0] - *r;
        if gap.norm() < spread * T::lit(1e-6) {
            return None;
        }
        let factor: Vec<C<T>> = x.iter().zip(&unit).map(|(xi, ui)| (*xi - *r * *ui) / gap).collect();
        e = a.mul(&e, &factor);
    }
    let vecs: Vec<Vec<C<T>>> = (0..d).map(|k| a.mul(&a.basis_element(k), &e)).collect();
    let v = orthonormal_basis(d, &vecs, T::lit(1e-8));
    if v.cols() != n {
        return None;
    }
    let vh = v.adjoint();
    let mut out = Vec::with_capacity(d * n * n);
    for k in 0..d {
        let img = &(&vh * &a.left_matrix(&a.basis_element(k))) * &v;
        out.extend(img.into_vec());
    }
    Some(out)
}

/// Roots of the monic polynomial `Σ_k c_k z^k` (`c_n = 1`) by
/// Durand–Kerner iteration.
fn polynomial_roots<T: Real>(c: &[C<T>]) -> Vec<C<T>> {
    let n = c.len() - 1;
    let eval = |z: C<T>| -> C<T> { c.iter().rev().fold(C::zero(), |acc, ck| acc * z + *ck) };
    let radius = T::one() + c[..n].iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let seed = C::new(T::lit(0.4), T::lit(0.9));
    let mut z: Vec<C<T>> = (0..n).map(|k| seed.powu(k as u32) * re(radius)).collect();
    for _ in 0..500 {
        let mut moved = T::zero();
        for k in 0..n {
            let denom = (0..n).filter(|&j| j != k).fold(C::one(), |acc, j| acc * (z[k] - z[j]));
            if denom.is_zero() {
                continue;
            }
            let step = eval(z[k]) / denom;
            z[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved <= T::epsilon() * radius {
            break;
        }
    }
    z
}

/// Unknowns `x[k·n² + r]` = entry `r` of `φ(e_k)`.
struct System<'a, T> {
    a: &'a AssocAlgebra<T>,
    n: usize,
    unit: Option<Vec<C<T>>>,
}

impl<'a, T: Real> System<'a, T> {
    fn new(a: &'a AssocAlgebra<T>, n: usize) -> Self {
        Self { a, n, unit: a.unit() }
    }

    fn image(&self, x: &[C<T>], k: usize) -> Matrix<T> {
        let nn = self.n * self.n;
        unflatten(&x[k * nn..(k + 1) * nn], self.n)
    }

    fn unit_defect(&self, x: &[C<T>]) -> Vec<C<T>> {
        let Some(u) = &self.unit else { return Vec::new() };
        let nn = self.n * self.n;
        let mut out = Matrix::<T>::identity(self.n).into_vec();
        for z in out.iter_mut() {
            *z = -*z;
        }
        for (k, uk) in u.iter().enumerate() {
            for r in 0..nn {
                out[r] += *uk * x[k * nn + r];
            }
        }
        out
    }

    fn residual(&self, x: &[C<T>]) -> Vec<C<T>> {
        let d = self.a.dim();
        let nn = self.n * self.n;
        let imgs: Vec<Matrix<T>> = (0..d).map(|k| self.image(x, k)).collect();
        let mut out = Vec::with_capacity(d * d * nn + nn);
        for p in 0..d {
            for q in 0..d {
                let mut m = &imgs[p] * &imgs[q];
                for (k, img) in imgs.iter().enumerate() {
                    let c = self.a.constant(p, q, k);
                    if !c.is_zero() {
                        m -= &img.scale(c);
                    }
                }
                out.extend(m.into_vec());
            }
        }
        out.extend(self.unit_defect(x));
        out
    }

    /// The residual is holomorphic in `x`, so its complex Jacobian drives
    /// the Newton step directly.
    fn jacobian(&self, x: &[C<T>]) -> Matrix<T> {
        let d = self.a.dim();
        let n = self.n;
        let nn = n * n;
        let rows = d * d * nn + if self.unit.is_some() { nn } else { 0 };
        let mut jac = Matrix::zeros(rows, d * nn);
        let imgs: Vec<Matrix<T>> = (0..d).map(|k| self.image(x, k)).collect();
        for p in 0..d {
            for q in 0..d {
                let base = (p * d + q) * nn;
                // d(Φ_p Φ_q)_{is} = Σ_t dΦ_p[i,t] Φ_q[t,s] + Φ_p[i,t] dΦ_q[t,s]
                for i in 0..n {
                    for s in 0..n {
                        let row = base + i * n + s;
                        for t in 0..n {
                            jac[(row, p * nn + i * n + t)] += imgs[q][(t, s)];
                            jac[(row, q * nn + t * n + s)] += imgs[p][(i, t)];
                        }
                        for k in 0..d {
                            let c = self.a.constant(p, q, k);
                            if !c.is_zero() {
                                jac[(row, k * nn + i * n + s)] -= c;
                            }
                        }
                    }
                }
            }
        }
        if let Some(u) = &self.unit {
            let base = d * d * nn;
            for (k, uk) in u.iter().enumerate() {
                for r in 0..nn {
                    jac[(base + r, k * nn + r)] = *uk;
                }
            }
        }
        jac
    }

    /// Levenberg–Marquardt on the normal equations `(J*J + λI) δ = −J*r`.
    fn levenberg_marquardt(&self, mut x: Vec<C<T>>) -> Vec<C<T>> {
        let m = x.len();
        let mut r = self.residual(&x);
        let mut cost = vnorm(&r);
        let mut lambda = T::lit(1e-3);
        let mut normal: Option<(Matrix<T>, Vec<C<T>>)> = None;
        for _ in 0..ITERATIONS {
            if cost <= T::lit(ACCEPT * 1e-3) {
                break;
            }
            let (jtj, jtr) = normal.get_or_insert_with(|| {
                let jac = self.jacobian(&x);
                let jh = jac.adjoint();
                let jtr: Vec<C<T>> = jh.mul_vec(&r).into_iter().map(|z| -z).collect();
                (&jh * &jac, jtr)
            });
            let mut a = jtj.clone();
            let scale = (0..m).map(|i| a[(i, i)].re).fold(T::zero(), T::max).max(T::one());
            for i in 0..m {
                a[(i, i)] += re(lambda * scale);
            }
            let Ok(step) = least_squares_truncated(&a, jtr, T::lit(1e-14)) else { break };
            let trial: Vec<C<T>> = x.iter().zip(&step.x).map(|(a, b)| *a + *b).collect();
            let tr = self.residual(&trial);
            let tc = vnorm(&tr);
            if tc < cost {
                x = trial;
                r = tr;
                cost = tc;
                normal = None;
                lambda = (lambda * T::lit(0.3)).max(T::lit(1e-15));
            } else {
                lambda = lambda * T::lit(10.0);
                if lambda > T::lit(1e12) {
                    break;
                }
            }
        }
        x
    }
}

/// Element maximizing `‖φ(x*) − φ(x)*‖` over unit-norm basis elements
/// and random samples.
#[derive(Clone, Debug)]
pub struct StarObstruction<T> {
    pub witness: Vec<C<T>>,
    pub deviation: T,
}

pub fn star_obstruction<T: Real>(
    phi: &Matrix<T>,
    a: &AssocAlgebra<T>,
    b: &AssocAlgebra<T>,
    samples: usize,
    seed: u64,
) -> Result<StarObstruction<T>> {
    if phi.shape() != (b.dim(), a.dim()) {
        return Err(Error::Shape("map shape does not match the algebras".into()));
    }
    if a.involution().is_none() || b.involution().is_none() {
        return Err(Error::PreconditionFailed("both algebras need an involution".into()));
    }
    let deviation = |x: &[C<T>]| -> T {
        let lhs = phi.mul_vec(&a.star(x).expect("involution"));
        let rhs = b.star(&phi.mul_vec(x)).expect("involution");
        vnorm(&vsub(&lhs, &rhs))
    };
    let mut rng: Rng = rng::seeded(seed);
    let mut candidates: Vec<Vec<C<T>>> = (0..a.dim()).map(|k| a.basis_element(k)).collect();
    for _ in 0..samples {
        let x = a.random_element(&mut rng);
        let nx = vnorm(&x);
        candidates.push(x.iter().map(|z| *z / re(nx)).collect());
    }
    let mut best = StarObstruction { witness: vec![C::zero(); a.dim()], deviation: T::zero() };
    for x in candidates {
        let d = deviation(&x);
        if d > best.deviation {
            best = StarObstruction { witness: x, deviation: d };
        }
    }
    Ok(best)
}

/// `ad + bc ≠ 0` for `x = [[a, b], [c, d]]` in `(M₂(ℂ), ·)`.
pub fn det_invertibility<T: Real>(x: &Matrix<T>) -> Result<bool> {
    if x.shape() != (2, 2) {
        return Err(Error::Shape("expected a 2x2 matrix".into()));
    }
    let det = x[(0, 0)] * x[(1, 1)] + x[(0, 1)] * x[(1, 0)];
    Ok(det.norm() > T::lit(DET_CUT))
}

/// Solves `x·y = 1 = y·x` by least squares; `Some(y)` when the relative
/// residual is at most `1e-8`.
pub fn two_sided_inverse<T: Real>(a: &AssocAlgebra<T>, x: &[C<T>]) -> Result<Option<Vec<C<T>>>> {
    let e = a.unit().ok_or_else(|| Error::PreconditionFailed("algebra has no unit".into()))?;
    let d = a.dim();
    let l = a.left_matrix(x);
    let r = a.right_matrix(x);
    let mut stacked = Matrix::zeros(2 * d, d);
    stacked.set_block(0, 0, &l);
    stacked.set_block(d, 0, &r);
    let mut rhs = e.clone();
    rhs.extend(e.iter().copied());
    let ls = least_squares(&stacked, &rhs)?;
    let rel = ls.residual / vnorm(&rhs).max(T::one());
    Ok((rel <= T::lit(SOLVE_ACCEPT)).then_some(ls.x))
}

/// Coordinates of a 2×2 matrix in the basis `E11, E12, E21, E22`.
pub fn m2_coords<T: Real>(x: &Matrix<T>) -> Vec<C<T>> {
    x.as_slice().to_vec()
}

/// The unit `diag(−1, −1)` of `(M₂(ℂ), ·)`.
pub fn anti_m2_unit<T: Real>() -> Matrix<T> {
    Matrix::identity(2).scale(-C::<T>::one())
}
