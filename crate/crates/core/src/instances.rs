//! Standard small instances and random instance generators.

use rand::RngExt;

use crate::matkernel::{svd, Matrix};
use crate::rng::{self, Rng};
use crate::scalar::Real;
use crate::ternary::{structure_constants_of, Sign, SignedBlock, StructureConstants, TernarySpace};

/// All `rows × cols` matrix units `E_ij`, row-major.
pub fn matrix_units<T: Real>(rows: usize, cols: usize) -> Vec<Matrix<T>> {
    (0..rows)
        .flat_map(|i| (0..cols).map(move |j| Matrix::unit(rows, cols, i, j)))
        .collect()
}

/// `ℂ` with product `±x ȳ z`.
pub fn scalar<T: Real>(sign: Sign) -> TernarySpace<T> {
    full_block(1, 1, sign)
}

/// `M_{rows×cols}(ℂ)` as a single block.
pub fn full_block<T: Real>(rows: usize, cols: usize, sign: Sign) -> TernarySpace<T> {
    TernarySpace::Blocks(vec![
        SignedBlock::new_unchecked_closure(sign, matrix_units(rows, cols)).expect("matrix units")
    ])
}

/// Diagonal `n × n` matrices as a single block.
pub fn diag<T: Real>(n: usize, sign: Sign) -> TernarySpace<T> {
    let basis = (0..n).map(|i| Matrix::unit(n, n, i, i)).collect();
    TernarySpace::Blocks(vec![SignedBlock::new_unchecked_closure(sign, basis).expect("diagonal units")])
}

/// `ℂ₊ ⊕ ℂ₋`.
pub fn mixed_scalars<T: Real>() -> TernarySpace<T> {
    join(&[scalar(Sign::Plus), scalar(Sign::Minus)])
}

/// `M_{1×2}(ℂ)₊ ⊕ M_2(ℂ)₋`, dimension 6.
pub fn mixed_blocks<T: Real>() -> TernarySpace<T> {
    join(&[full_block(1, 2, Sign::Plus), full_block(2, 2, Sign::Minus)])
}

/// Direct sum of block presentations.
pub fn join<T: Real>(parts: &[TernarySpace<T>]) -> TernarySpace<T> {
    TernarySpace::Blocks(
        parts
            .iter()
            .flat_map(|p| p.blocks().expect("block presentation").to_vec())
            .collect(),
    )
}

/// Named demo instances.
pub fn demo<T: Real>(name: &str) -> Option<TernarySpace<T>> {
    Some(match name {
        "m2-anti" => full_block(2, 2, Sign::Minus),
        "scalar-tro" => scalar(Sign::Plus),
        "scalar-anti" => scalar(Sign::Minus),
        "mixed-2" => mixed_scalars(),
        "diag-tro-2" => diag(2, Sign::Plus),
        _ => return None,
    })
}

pub const DEMO_NAMES: [&str; 5] = ["m2-anti", "scalar-tro", "scalar-anti", "mixed-2", "diag-tro-2"];

/// Which signs a random instance may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    Tro,
    AntiTro,
    Mixed,
}

/// Isometry `n × k` (`k ≤ n`) with random orthonormal columns.
pub fn random_isometry<T: Real>(rng: &mut Rng, n: usize, k: usize) -> Matrix<T> {
    let g = rng::gaussian_matrix::<T>(rng, n, k);
    let s = svd(&g);
    &s.u.submatrix(0, 0, n, k) * &s.v.adjoint()
}

/// `M_{r×c}` realized inside `(r+pr) × (c+pc)` matrices as `U E_ij V*` for
/// random isometries, with the basis further mixed by a random invertible
/// (well-conditioned) change of coordinates.
pub fn random_block<T: Real>(rng: &mut Rng, r: usize, c: usize, pr: usize, pc: usize, sign: Sign) -> SignedBlock<T> {
    let u = random_isometry::<T>(rng, r + pr, r);
    let v = random_isometry::<T>(rng, c + pc, c);
    let units: Vec<Matrix<T>> = matrix_units::<T>(r, c).iter().map(|e| &(&u * e) * &v.adjoint()).collect();
    let d = units.len();
    let mix = well_conditioned(rng, d);
    let basis = (0..d)
        .map(|a| {
            let mut m = Matrix::zeros(r + pr, c + pc);
            for (i, e) in units.iter().enumerate() {
                m += &e.scale(mix[(i, a)]);
            }
            m
        })
        .collect();
    SignedBlock::new_unchecked_closure(sign, basis).expect("independent basis")
}

/// Diagonal units `U E_ii V*` of size `k`, realized inside
/// `(k+pad) × (k+pad)` matrices and mixed like [`random_block`].
pub fn random_diag_block<T: Real>(rng: &mut Rng, k: usize, pad: usize, sign: Sign) -> SignedBlock<T> {
    let u = random_isometry::<T>(rng, k + pad, k);
    let v = random_isometry::<T>(rng, k + pad, k);
    let units: Vec<Matrix<T>> = (0..k).map(|i| &(&u * &Matrix::unit(k, k, i, i)) * &v.adjoint()).collect();
    let mix = well_conditioned(rng, k);
    let basis = (0..k)
        .map(|a| {
            let mut m = Matrix::zeros(k + pad, k + pad);
            for (i, e) in units.iter().enumerate() {
                m += &e.scale(mix[(i, a)]);
            }
            m
        })
        .collect();
    SignedBlock::new_unchecked_closure(sign, basis).expect("independent basis")
}

/// Random `n × n` matrix with singular values in `[1, 2]`.
pub fn well_conditioned<T: Real>(rng: &mut Rng, n: usize) -> Matrix<T> {
    let a = random_isometry::<T>(rng, n, n);
    let b = random_isometry::<T>(rng, n, n);
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = crate::scalar::re(rng::uniform::<T>(rng, 1.0, 2.0));
    }
    &(&a * &d) * &b
}

/// Random instance of total dimension at most `max_dim` built from one to
/// three blocks: full matrix blocks with shapes up to 3 × 3, or (with
/// probability 1/3) commutative diagonal blocks of size up to 3.
pub fn random_instance<T: Real>(rng: &mut Rng, kind: InstanceKind, max_dim: usize) -> TernarySpace<T> {
    assert!(max_dim >= 2, "max_dim must be at least 2");
    loop {
        let nblocks = rng.random_range(1..=3usize);
        let mut blocks = Vec::new();
        let mut total = 0;
        for k in 0..nblocks {
            let diagonal = rng.random_bool(1.0 / 3.0);
            let r = rng.random_range(1..=3usize);
            let c = if diagonal { 1 } else { rng.random_range(1..=3usize) };
            if total + r * c > max_dim {
                continue;
            }
            let pr = rng.random_range(0..=1usize);
            let pc = rng.random_range(0..=1usize);
            let sign = match kind {
                InstanceKind::Tro => Sign::Plus,
                InstanceKind::AntiTro => Sign::Minus,
                InstanceKind::Mixed if k == 0 => Sign::Plus,
                InstanceKind::Mixed if k == 1 => Sign::Minus,
                InstanceKind::Mixed => {
                    if rng.random_bool(0.5) {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                }
            };
            blocks.push(if diagonal {
                random_diag_block(rng, r, pr, sign)
            } else {
                random_block(rng, r, c, pr, pc, sign)
            });
            total += r * c;
        }
        let has_both = blocks.iter().any(|b| b.sign() == Sign::Plus) && blocks.iter().any(|b| b.sign() == Sign::Minus);
        if !blocks.is_empty() && (kind != InstanceKind::Mixed || has_both) {
            return TernarySpace::Blocks(blocks);
        }
    }
}

/// Structure constants of a block space after a random well-conditioned
/// change of basis that mixes all blocks. Returns the scrambled space and
/// the change of basis `P` (columns are the new basis in old coordinates).
pub fn scrambled<T: Real>(rng: &mut Rng, m: &TernarySpace<T>) -> (TernarySpace<T>, Matrix<T>) {
    let p = well_conditioned(rng, m.dim());
    let sc: StructureConstants<T> = structure_constants_of(m).change_basis(&p).expect("invertible");
    (TernarySpace::Structure(sc), p)
}
