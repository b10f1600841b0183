//! Tolerance-aware dense linear algebra.
//!
//! Every rank decision in the crate goes through [`rank_split`], which reads
//! singular values against a [`TolerancePolicy`]. Subspaces are carried as
//! orthonormal bases together with the tolerance that certified their rank.

use faer::Side;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Thresholds used for rank, zero and containment decisions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Singular values at or below `rel_rank_tol * sigma_max` count as zero.
    pub rel_rank_tol: f64,
    /// A matrix whose largest singular value is at most this is the zero matrix.
    pub abs_zero_tol: f64,
    /// Residual bound for "subspace A lies inside subspace B".
    pub containment_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rel_rank_tol: 1e-8,
            abs_zero_tol: 1e-10,
            containment_tol: 1e-7,
        }
    }
}

impl TolerancePolicy {
    pub fn new(rel_rank_tol: f64, abs_zero_tol: f64, containment_tol: f64) -> Result<Self> {
        let policy = Self {
            rel_rank_tol,
            abs_zero_tol,
            containment_tol,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.rel_rank_tol, self.abs_zero_tol, self.containment_tol];
        if all.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidPolicy(
                "all tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.rel_rank_tol >= 1.0 {
            return Err(Error::InvalidPolicy("rel_rank_tol must be < 1".into()));
        }
        Ok(())
    }
}

/// A linear subspace of R^n stored as an orthonormal basis (n x k).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Matrix,
    tol_used: f64,
}

impl Subspace {
    /// The zero subspace of R^n.
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::zeros(ambient_dim, 0),
            tol_used: TolerancePolicy::default().rel_rank_tol,
        }
    }

    /// All of R^n.
    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::identity(ambient_dim, ambient_dim),
            tol_used: TolerancePolicy::default().rel_rank_tol,
        }
    }

    /// Wraps a basis that is already orthonormal. Callers own that guarantee.
    pub(crate) fn from_orthonormal(basis: Matrix, tol_used: f64) -> Self {
        debug_assert!(
            basis.ncols() == 0
                || (basis.transpose() * &basis - Matrix::identity(basis.ncols(), basis.ncols()))
                    .amax()
                    < 1e-8
        );
        Self { basis, tol_used }
    }

    /// Span of the given vectors (columns), rank-decided by `policy`.
    pub fn span(vectors: &Matrix, policy: &TolerancePolicy) -> Result<Self> {
        orthonormal_basis(vectors, policy)
    }

    /// Span of the coordinate axes with the given indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut basis = Matrix::zeros(ambient_dim, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            basis[(i, col)] = 1.0;
        }
        let policy = TolerancePolicy::default();
        orthonormal_basis(&basis, &policy).expect("finite coordinate basis")
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn tol_used(&self) -> f64 {
        self.tol_used
    }

    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Coordinates of `v` in the orthonormal basis.
    pub fn coordinates(&self, v: &Vector) -> Vector {
        self.basis.transpose() * v
    }

    /// Distance from `v` to the subspace.
    pub fn vector_residual(&self, v: &Vector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// How far `other` is from lying inside `self`: the largest distance of
    /// a unit vector of `other` to `self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        if other.dim() == 0 {
            return 0.0;
        }
        let outside = &other.basis - &self.basis * (self.basis.transpose() * &other.basis);
        spectral_norm(&outside)
    }

    /// Projector distance `||P_a - P_b||_2`; equals 1 when the dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        spectral_norm(&(self.projector() - other.projector()))
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.dim();
        if k == 0 {
            return 0.0;
        }
        (self.basis.transpose() * &self.basis - Matrix::identity(k, k)).amax()
    }
}

pub fn check_finite(m: &Matrix, context: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}

pub fn check_finite_vec(v: &Vector, context: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}

/// Largest singular value; 0 for empty matrices.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Column space, null space and rank from a single SVD, so the two are
/// always consistent (`rank + dim null = ncols`).
#[derive(Clone, Debug)]
pub struct RankSplit {
    pub range: Subspace,
    pub null: Subspace,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl RankSplit {
    pub fn rank(&self) -> usize {
        self.range.dim()
    }
}

fn to_faer(m: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full singular value decomposition `m = u diag(s) v^T`, singular values
/// nonincreasing. `u` is rows x rows and `v` is cols x cols.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(m: &Matrix) -> Result<Svd> {
    check_finite(m, "svd input")?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: Matrix::identity(rows, rows),
            s: Vec::new(),
            v: Matrix::identity(cols, cols),
        });
    }
    let f = to_faer(m).svd().map_err(|_| Error::NoConvergence { what: "svd".into() })?;
    let k = rows.min(cols);
    Ok(Svd {
        u: from_faer(f.U()),
        s: (0..k).map(|i| f.S()[i]).collect(),
        v: from_faer(f.V()),
    })
}

/// Minimum-norm solution of `m x = b`, dropping singular values at or below
/// `rel_cut * sigma_max`.
pub fn pseudo_solve(m: &Matrix, b: &Matrix, rel_cut: f64) -> Result<Matrix> {
    let Svd { u, s, v } = svd(m)?;
    let top = s.first().copied().unwrap_or(0.0);
    let mut x = Matrix::zeros(m.ncols(), b.ncols());
    for (i, &si) in s.iter().enumerate() {
        if si > rel_cut * top && si > 0.0 {
            let coeff = u.column(i).transpose() * b / si;
            x += v.column(i) * coeff;
        }
    }
    Ok(x)
}

/// Rank decision relative to the largest singular value.
pub fn rank_split(m: &Matrix, policy: &TolerancePolicy) -> Result<RankSplit> {
    rank_split_with_scale(m, policy, None)
}

/// Rank decision where `scale` replaces `sigma_max` as the reference
/// magnitude (used for stacked projectors whose natural scale is 1).
pub fn rank_split_with_scale(
    m: &Matrix,
    policy: &TolerancePolicy,
    scale: Option<f64>,
) -> Result<RankSplit> {
    check_finite(m, "rank_split input")?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(RankSplit {
            range: Subspace::zero(rows),
            null: Subspace::full(cols),
            singular_values: Vec::new(),
            threshold: 0.0,
        });
    }
    let Svd { u, s: sv, v } = svd(m)?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let threshold = match scale {
        Some(s) => policy.rel_rank_tol * s,
        None if sigma_max <= policy.abs_zero_tol => f64::INFINITY,
        None => policy.rel_rank_tol * sigma_max,
    };
    // Ties at the threshold round down.
    let rank = sv.iter().filter(|&&s| s > threshold).count();

    let range_basis = u.view((0, 0), (rows, rank)).into_owned();
    let null_basis = v.columns(rank, cols - rank).into_owned();
    Ok(RankSplit {
        range: Subspace::from_orthonormal(range_basis, policy.rel_rank_tol),
        null: Subspace::from_orthonormal(null_basis, policy.rel_rank_tol),
        singular_values: sv,
        threshold,
    })
}

/// Orthonormal basis of the numerically significant column space.
pub fn orthonormal_basis(vectors: &Matrix, policy: &TolerancePolicy) -> Result<Subspace> {
    Ok(rank_split(vectors, policy)?.range)
}

/// Null space of `m` as a subspace of R^{ncols}.
pub fn null_space(m: &Matrix, policy: &TolerancePolicy) -> Result<Subspace> {
    Ok(rank_split(m, policy)?.null)
}

fn require_same_ambient(a: &Subspace, b: &Subspace, context: &str) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: context.to_string(),
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    Ok(())
}

/// `a ∩ b` as the null space of the stacked complementary projectors.
pub fn subspace_intersect(a: &Subspace, b: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
    require_same_ambient(a, b, "subspace_intersect")?;
    let n = a.ambient_dim();
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    let id = Matrix::identity(n, n);
    let mut stacked = Matrix::zeros(2 * n, n);
    stacked.rows_mut(0, n).copy_from(&(&id - a.projector()));
    stacked.rows_mut(n, n).copy_from(&(&id - b.projector()));
    Ok(rank_split_with_scale(&stacked, policy, Some(1.0))?.null)
}

pub fn subspace_sum(a: &Subspace, b: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
    require_same_ambient(a, b, "subspace_sum")?;
    let n = a.ambient_dim();
    let mut joined = Matrix::zeros(n, a.dim() + b.dim());
    joined.columns_mut(0, a.dim()).copy_from(a.basis());
    joined.columns_mut(a.dim(), b.dim()).copy_from(b.basis());
    if joined.ncols() == 0 {
        return Ok(Subspace::zero(n));
    }
    // Orthonormal inputs: the natural scale of the joined matrix is 1.
    Ok(rank_split_with_scale(&joined, policy, Some(1.0))?.range)
}

/// Orthogonal complement in the ambient space.
pub fn complement(a: &Subspace, policy: &TolerancePolicy) -> Subspace {
    let n = a.ambient_dim();
    if a.dim() == 0 {
        return Subspace::full(n);
    }
    rank_split_with_scale(&a.basis().transpose(), policy, Some(1.0))
        .expect("orthonormal basis is finite")
        .null
}

/// `ab - ba`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            context: "commutator".into(),
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            context: "commutator".into(),
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

fn one_norm(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low(a: &Matrix, coeffs: &[f64]) -> (Matrix, Matrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = Matrix::identity(n, n);
    let mut u_inner = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for (k, &b) in coeffs.iter().enumerate() {
        if k % 2 == 0 {
            v += &power * b;
        } else {
            u_inner += &power * b;
            power = &power * &a2;
        }
    }
    (a * u_inner, v)
}

fn pade13(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.nrows();
    let b = &PADE13;
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_tail = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (u_tail + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let v_tail = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = v_tail + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

fn pade_solve(u: &Matrix, v: &Matrix) -> Matrix {
    let numerator = v + u;
    let denominator = v - u;
    denominator
        .lu()
        .solve(&numerator)
        .expect("Pade denominator is nonsingular inside the theta bounds")
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree 3..13 chosen from the 1-norm.
pub fn mat_exp(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            context: "mat_exp".into(),
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    check_finite(a, "mat_exp input")?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    for (m, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(a, coeffs);
            return Ok(pade_solve(&u, &v));
        }
    }
    let s = ((norm / THETA13).log2().ceil()).max(0.0) as i32;
    let scaled = a / 2f64.powi(s);
    let (u, v) = pade13(&scaled);
    let mut result = pade_solve(&u, &v);
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
pub fn sym_eigen_sorted(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let sym = to_faer(&((m + m.transpose()) * 0.5));
    // Symmetric input always converges; a failure here is a bug in the backend.
    let eig = sym.self_adjoint_eigen(Side::Lower).expect("symmetric eigendecomposition");
    let values = (0..n).map(|i| eig.S()[i]).collect();
    (values, from_faer(eig.U()))
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    sym_eigen_sorted(m).0.first().copied().unwrap_or(f64::INFINITY)
}

/// Least-squares coefficients `c` minimizing `||basis * c - target||`.
pub fn least_squares(basis: &Matrix, target: &Vector) -> Vector {
    if basis.ncols() == 0 {
        return Vector::zeros(0);
    }
    let target = Matrix::from_column_slice(target.len(), 1, target.as_slice());
    let c = pseudo_solve(basis, &target, 1e-13).expect("finite least-squares input");
    c.column(0).into_owned()
}

/// Row-major flattening of a square matrix into a vector.
pub fn vec_of(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.transpose().iter().copied())
}

/// Inverse of [`vec_of`].
pub fn mat_of(v: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_slice(rows, cols, v.as_slice())
}
