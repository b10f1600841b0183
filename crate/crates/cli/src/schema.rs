//! Input files. A top-level `"kind"` selects one of three shapes.
//!
//! Matrices may be given either as a flat row-major array or as a list of
//! rows; either way they are checked against the declared size before any
//! numerics run, and a mismatch names the offending matrix and row.

use copolarity_core::numkernel::{Matrix, TolerancePolicy, Vector};
use copolarity_core::symmpair::{cartan_decompose, Embedding};
use copolarity_core::{LieRep, StructureConstants, Subspace, SymPair, TripleDatum};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl MatrixData {
    fn to_matrix(&self, rows: usize, cols: usize, what: &str) -> Result<Matrix, CliError> {
        match self {
            MatrixData::Flat(v) => {
                if v.len() != rows * cols {
                    return Err(CliError::Schema(format!(
                        "{what}: flat array has {} entries, expected {rows}x{cols} = {}",
                        v.len(),
                        rows * cols
                    )));
                }
                Ok(Matrix::from_row_slice(rows, cols, v))
            }
            MatrixData::Rows(r) => {
                if r.len() != rows {
                    return Err(CliError::Schema(format!("{what}: {} rows, expected {rows}", r.len())));
                }
                for (i, row) in r.iter().enumerate() {
                    if row.len() != cols {
                        return Err(CliError::Schema(format!(
                            "{what}: row {i} has length {}, expected {cols}",
                            row.len()
                        )));
                    }
                }
                Ok(Matrix::from_fn(rows, cols, |i, j| r[i][j]))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearRepInput {
    pub ambient_dim: usize,
    pub generators: Vec<MatrixData>,
    #[serde(default)]
    pub discrete_elements: Vec<MatrixData>,
    pub orthogonal: bool,
    /// Optional spanning vectors of a user-supplied section.
    #[serde(default)]
    pub section: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymPairInput {
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    pub involution: MatrixData,
    pub inner: MatrixData,
    /// One matrix per basis vector of g.
    #[serde(default)]
    pub embedding: Option<Vec<MatrixData>>,
    /// Spanning vectors of m inside p; p itself when absent.
    #[serde(default)]
    pub triple_basis: Option<Vec<Vec<f64>>>,
    /// Spanning vectors of h for the H x K orbit spaces.
    #[serde(default)]
    pub h_basis: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDatumInput {
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    pub h_indices: Vec<usize>,
    pub n_indices: Vec<usize>,
    /// Inner product fixing the complement of h; the identity when absent.
    #[serde(default)]
    pub inner: Option<MatrixData>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Input {
    LinearRep(LinearRepInput),
    SymPair(SymPairInput),
    TripleDatum(TripleDatumInput),
}

impl Input {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Input::LinearRep(_) => "linear_rep",
            Input::SymPair(_) => "sym_pair",
            Input::TripleDatum(_) => "triple_datum",
        }
    }
}

fn vectors(list: &[Vec<f64>], dim: usize, what: &str) -> Result<Matrix, CliError> {
    for (i, v) in list.iter().enumerate() {
        if v.len() != dim {
            return Err(CliError::Schema(format!(
                "{what} vector {i} has length {}, expected {dim}",
                v.len()
            )));
        }
    }
    Ok(Matrix::from_fn(dim, list.len(), |i, j| list[j][i]))
}

fn span(list: &[Vec<f64>], dim: usize, what: &str, policy: &TolerancePolicy) -> Result<Subspace, CliError> {
    let m = vectors(list, dim, what)?;
    Ok(Subspace::span(&m, policy)?)
}

fn structure(tensor: &[Vec<Vec<f64>>]) -> Result<StructureConstants, CliError> {
    let d = tensor.len();
    for (i, slab) in tensor.iter().enumerate() {
        if slab.len() != d {
            return Err(CliError::Schema(format!(
                "structure_constants[{i}] has {} entries, expected {d}",
                slab.len()
            )));
        }
        for (j, row) in slab.iter().enumerate() {
            if row.len() != d {
                return Err(CliError::Schema(format!(
                    "structure_constants[{i}][{j}] has length {}, expected {d}",
                    row.len()
                )));
            }
        }
    }
    Ok(StructureConstants::from_tensor(tensor)?)
}

impl LinearRepInput {
    pub fn build(&self, policy: TolerancePolicy) -> Result<LieRep, CliError> {
        let n = self.ambient_dim;
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| g.to_matrix(n, n, &format!("generator {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let discrete = self
            .discrete_elements
            .iter()
            .enumerate()
            .map(|(i, g)| g.to_matrix(n, n, &format!("discrete element {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LieRep::new(n, gens, discrete, self.orthogonal, policy)?)
    }

    pub fn section(&self, policy: &TolerancePolicy) -> Result<Option<Subspace>, CliError> {
        self.section
            .as_ref()
            .map(|s| span(s, self.ambient_dim, "section", policy))
            .transpose()
    }
}

pub struct PairData {
    pub pair: SymPair,
    pub embedding: Option<Embedding>,
    pub m_basis: Matrix,
    pub h_alg: Subspace,
}

impl SymPairInput {
    pub fn build(&self, policy: TolerancePolicy) -> Result<PairData, CliError> {
        let sc = structure(&self.structure_constants)?;
        let d = sc.dim();
        let inner = self.inner.to_matrix(d, d, "inner")?;
        let sigma = self.involution.to_matrix(d, d, "involution")?;
        let pair = cartan_decompose(&sc, &inner, &sigma, &policy)?;
        let embedding = match &self.embedding {
            None => None,
            Some(list) => {
                if list.len() != d {
                    return Err(CliError::Schema(format!(
                        "embedding has {} matrices, expected one per basis vector ({d})",
                        list.len()
                    )));
                }
                let size = match &list.first() {
                    Some(MatrixData::Rows(r)) => r.len(),
                    Some(MatrixData::Flat(v)) => (v.len() as f64).sqrt().round() as usize,
                    None => 0,
                };
                let mats = list
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_matrix(size, size, &format!("embedding matrix {i}")))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Embedding::new(mats, &sc, &policy)?)
            }
        };
        let m_basis = match &self.triple_basis {
            Some(list) => vectors(list, d, "triple_basis")?,
            None => pair.p_space().basis().clone(),
        };
        let h_alg = match &self.h_basis {
            Some(list) => span(list, d, "h_basis", &policy)?,
            None => Subspace::zero(d),
        };
        Ok(PairData {
            pair,
            embedding,
            m_basis,
            h_alg,
        })
    }
}

impl TripleDatumInput {
    pub fn build(&self, policy: TolerancePolicy) -> Result<TripleDatum, CliError> {
        let sc = structure(&self.structure_constants)?;
        let d = sc.dim();
        let inner = self.inner.as_ref().map(|m| m.to_matrix(d, d, "inner")).transpose()?;
        Ok(TripleDatum::from_indices(sc, &self.h_indices, &self.n_indices, inner, policy)?)
    }
}

/// Parses a `--point` argument: comma-separated reals.
pub fn parse_point(text: &str, dim: usize) -> Result<Vector, CliError> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Schema(format!("--point: {e}")))?;
    if values.len() != dim {
        return Err(CliError::Schema(format!(
            "--point has {} coordinates, expected {dim}",
            values.len()
        )));
    }
    Ok(Vector::from_vec(values))
}
