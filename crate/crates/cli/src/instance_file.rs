//! JSON instance and ideal files. Complex numbers are `[re, im]` pairs.

use serde::{Deserialize, Serialize};
use ternlab::matkernel::Matrix;
use ternlab::ternary::{Sign, SignedBlock, StructureConstants, TernaryElement, TernarySpace};
use ternlab::C;

use crate::CliError;

pub type Complex = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<StructureSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub sign: i64,
    pub rows: usize,
    pub cols: usize,
    /// Basis matrices, each given as rows of entries.
    pub basis: Vec<Vec<Vec<Complex>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub dim: usize,
    /// `c[i][j][k][l]`: coefficient of `b_l` in `[b_i b_j b_k]`.
    pub c: Vec<Vec<Vec<Vec<Complex>>>>,
}

/// Coordinates of ideal elements: either an explicit basis (checked to be an
/// ideal) or generators (closed up).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Complex>>>,
}

fn cplx(z: &Complex) -> C<f64> {
    C::new(z[0], z[1])
}

fn pair(z: &C<f64>) -> Complex {
    [z.re, z.im]
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed instance file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_space(&self) -> Result<TernarySpace<f64>, CliError> {
        match (&self.blocks, &self.structure_constants) {
            (Some(blocks), None) => {
                let mut out = Vec::with_capacity(blocks.len());
                for (b, spec) in blocks.iter().enumerate() {
                    out.push(spec.to_block().map_err(|e| invalid(format!("block {b}: {e}")))?);
                }
                Ok(TernarySpace::Blocks(out))
            }
            (None, Some(sc)) => Ok(TernarySpace::Structure(sc.to_constants()?)),
            _ => Err(invalid("instance needs exactly one of `blocks` or `structure_constants`")),
        }
    }

    pub fn from_space(name: &str, m: &TernarySpace<f64>) -> Self {
        match m {
            TernarySpace::Blocks(bs) => Self {
                name: name.to_string(),
                blocks: Some(bs.iter().map(BlockSpec::from_block).collect()),
                structure_constants: None,
            },
            TernarySpace::Structure(sc) => Self {
                name: name.to_string(),
                blocks: None,
                structure_constants: Some(StructureSpec::from_constants(sc)),
            },
        }
    }
}

impl BlockSpec {
    fn to_block(&self) -> Result<SignedBlock<f64>, CliError> {
        let sign = Sign::from_i64(self.sign).map_err(|e| invalid(e.to_string()))?;
        let mut basis = Vec::with_capacity(self.basis.len());
        for (k, m) in self.basis.iter().enumerate() {
            if m.len() != self.rows || m.iter().any(|row| row.len() != self.cols) {
                return Err(invalid(format!("basis matrix {k} is not {}x{}", self.rows, self.cols)));
            }
            basis.push(Matrix::from_fn(self.rows, self.cols, |i, j| cplx(&m[i][j])));
        }
        SignedBlock::new(sign, basis).map_err(|e| invalid(e.to_string()))
    }

    fn from_block(b: &SignedBlock<f64>) -> Self {
        Self {
            sign: b.sign().as_i8() as i64,
            rows: b.rows(),
            cols: b.cols(),
            basis: b
                .basis()
                .iter()
                .map(|m| (0..m.rows()).map(|i| (0..m.cols()).map(|j| pair(&m[(i, j)])).collect()).collect())
                .collect(),
        }
    }
}

impl StructureSpec {
    fn to_constants(&self) -> Result<StructureConstants<f64>, CliError> {
        let n = self.dim;
        let shape_ok = self.c.len() == n
            && self.c.iter().all(|a| {
                a.len() == n && a.iter().all(|b| b.len() == n && b.iter().all(|c| c.len() == n))
            });
        if !shape_ok {
            return Err(invalid(format!("structure_constants.c must have shape {n}x{n}x{n}x{n}")));
        }
        let flat: Vec<C<f64>> = self.c.iter().flatten().flatten().flatten().map(cplx).collect();
        StructureConstants::new(n, flat).map_err(|e| invalid(e.to_string()))
    }

    fn from_constants(sc: &StructureConstants<f64>) -> Self {
        let n = sc.dim();
        let c = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| (0..n).map(|l| pair(&sc.get(i, j, k, l))).collect()).collect()).collect())
            .collect();
        Self { dim: n, c }
    }
}

/// Whether the ideal file lists a basis or generators.
pub enum IdealSpec {
    Basis(Vec<TernaryElement<f64>>),
    Generators(Vec<TernaryElement<f64>>),
}

impl IdealFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed ideal file: {e}")))
    }

    pub fn elements(&self, dim: usize) -> Result<IdealSpec, CliError> {
        let convert = |vs: &[Vec<Complex>]| -> Result<Vec<TernaryElement<f64>>, CliError> {
            vs.iter()
                .enumerate()
                .map(|(k, v)| {
                    if v.len() != dim {
                        return Err(invalid(format!("ideal element {k} has {} coordinates, expected {dim}", v.len())));
                    }
                    Ok(TernaryElement::new(v.iter().map(cplx).collect()))
                })
                .collect()
        };
        match (&self.basis, &self.generators) {
            (Some(b), None) => Ok(IdealSpec::Basis(convert(b)?)),
            (None, Some(g)) => Ok(IdealSpec::Generators(convert(g)?)),
            _ => Err(invalid("ideal file needs exactly one of `basis` or `generators`")),
        }
    }
}
