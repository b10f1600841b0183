//! Symmetric pairs, Lie triple systems and the related tangent-space and
//! Gram-matrix computations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::StructureConstants;
use crate::numkernel::{
    check_finite, complement, least_squares, mat_exp, min_eigenvalue, null_space, orthonormal_basis,
    rank_split, subspace_intersect, subspace_sum, sym_eigen_sorted, vec_of, Matrix, Subspace,
    TolerancePolicy, Vector,
};

const INVOLUTION_TOL: f64 = 1e-10;
const AUTOMORPHISM_TOL: f64 = 1e-9;
const INVARIANCE_TOL: f64 = 1e-9;
const EIGEN_RELATION_TOL: f64 = 1e-8;
/// Allowed disagreement between the quadrature and closed-form Gram matrices.
pub const GRAM_AGREEMENT_TOL: f64 = 1e-8;
/// Subspace distance accepted by the tangent formula check.
pub const TANGENT_FORMULA_TOL: f64 = 1e-7;

/// A Lie algebra with an involutive automorphism and an invariant inner
/// product, split into the ±1 eigenspaces `k` and `p`.
#[derive(Clone, Debug)]
pub struct SymPair {
    sc: StructureConstants,
    inner: Matrix,
    sigma_inv: Matrix,
    k_space: Subspace,
    p_space: Subspace,
    policy: TolerancePolicy,
}

impl SymPair {
    pub fn structure_constants(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn inner(&self) -> &Matrix {
        &self.inner
    }

    pub fn involution(&self) -> &Matrix {
        &self.sigma_inv
    }

    pub fn k_space(&self) -> &Subspace {
        &self.k_space
    }

    pub fn p_space(&self) -> &Subspace {
        &self.p_space
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    pub fn dim(&self) -> usize {
        self.sc.dim()
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Vector {
        self.sc.bracket(x, y)
    }

    /// `inner`-orthogonal complement of a subspace of the algebra.
    pub fn inner_complement(&self, s: &Subspace) -> Result<Subspace> {
        if s.dim() == 0 {
            return Ok(Subspace::full(self.dim()));
        }
        null_space(&(s.basis().transpose() * &self.inner), &self.policy)
    }
}

fn square_check(m: &Matrix, d: usize, context: &str) -> Result<()> {
    if m.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            context: context.into(),
            expected: d,
            found: if m.nrows() != d { m.nrows() } else { m.ncols() },
        });
    }
    check_finite(m, context)
}

/// Worst component of `[a, b]` outside `target`, over basis pairs.
fn bracket_escape(sc: &StructureConstants, a: &Subspace, b: &Subspace, target: &Subspace) -> f64 {
    let mut worst: f64 = 0.0;
    for x in a.basis().column_iter() {
        for y in b.basis().column_iter() {
            let br = sc.bracket(&x.into_owned(), &y.into_owned());
            worst = worst.max(target.vector_residual(&br));
        }
    }
    worst
}

/// Splits `g` into the ±1 eigenspaces of `sigma_inv`, checking that it is
/// an involutive automorphism, that the grading holds and that `inner` is
/// positive definite and ad-invariant.
pub fn cartan_decompose(
    sc: &StructureConstants,
    inner: &Matrix,
    sigma_inv: &Matrix,
    policy: &TolerancePolicy,
) -> Result<SymPair> {
    let d = sc.dim();
    square_check(inner, d, "inner product")?;
    square_check(sigma_inv, d, "involution")?;
    let id = Matrix::identity(d, d);

    let asym = (inner - inner.transpose()).amax();
    let min_eig = min_eigenvalue(inner);
    let mut inv_res = asym;
    for i in 0..d {
        let ad = sc.ad_basis(i);
        inv_res = inv_res.max((ad.transpose() * inner + inner * &ad).amax());
    }
    if inv_res > INVARIANCE_TOL || (d > 0 && min_eig <= policy.abs_zero_tol) {
        return Err(Error::NotInvariant {
            residual: inv_res.max(-min_eig.min(0.0)),
        });
    }

    let residual = (sigma_inv * sigma_inv - &id).amax();
    if residual > INVOLUTION_TOL {
        return Err(Error::NotInvolution { residual });
    }
    let mut residual: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let lhs = sigma_inv * sc.ad_basis(i).column(j);
            let rhs = sc.bracket(&sigma_inv.column(i).into_owned(), &sigma_inv.column(j).into_owned());
            residual = residual.max((lhs - rhs).amax());
        }
    }
    if residual > AUTOMORPHISM_TOL {
        return Err(Error::NotAutomorphism { residual });
    }

    let k_space = null_space(&(sigma_inv - &id), policy)?;
    let p_space = null_space(&(sigma_inv + &id), policy)?;
    if k_space.dim() + p_space.dim() != d {
        return Err(Error::NotInvolution {
            residual: (d - k_space.dim() - p_space.dim()) as f64,
        });
    }
    let tol = policy.containment_tol;
    for (which, a, b, target) in [
        ("[k,k] not inside k", &k_space, &k_space, &k_space),
        ("[k,p] not inside p", &k_space, &p_space, &p_space),
        ("[p,p] not inside k", &p_space, &p_space, &k_space),
    ] {
        let residual = bracket_escape(sc, a, b, target);
        if residual > tol {
            return Err(Error::BadGrading {
                which: which.into(),
                residual,
            });
        }
    }
    Ok(SymPair {
        sc: sc.clone(),
        inner: inner.clone(),
        sigma_inv: sigma_inv.clone(),
        k_space,
        p_space,
        policy: *policy,
    })
}

/// A Lie triple system `m ⊆ p` with `[m,m]` and `s = [m,m] ⊕ m`.
#[derive(Clone, Debug)]
pub struct TripleSystem {
    pub m: Subspace,
    pub bracket_span: Subspace,
    pub s_alg: Subspace,
    pub triple_residual: f64,
}

/// Span of all pairwise brackets of a subspace.
fn bracket_span(sc: &StructureConstants, m: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
    let cols: Vec<Vector> = (0..m.dim())
        .flat_map(|i| (i + 1..m.dim()).map(move |j| (i, j)))
        .map(|(i, j)| sc.bracket(&m.basis().column(i).into_owned(), &m.basis().column(j).into_owned()))
        .collect();
    if cols.is_empty() {
        return Ok(Subspace::zero(sc.dim()));
    }
    orthonormal_basis(&Matrix::from_columns(&cols), policy)
}

pub fn triple_system(pair: &SymPair, m_basis: &Matrix) -> Result<TripleSystem> {
    let d = pair.dim();
    if m_basis.nrows() != d {
        return Err(Error::DimensionMismatch {
            context: "triple system basis".into(),
            expected: d,
            found: m_basis.nrows(),
        });
    }
    let policy = &pair.policy;
    let m = Subspace::span(m_basis, policy)?;
    let outside = pair.p_space.containment_residual(&m);
    if outside > policy.containment_tol {
        return Err(Error::Precondition {
            what: "m is not contained in p".into(),
            residual: outside,
        });
    }
    let brackets = bracket_span(&pair.sc, &m, policy)?;
    let triple_residual = bracket_escape(&pair.sc, &brackets, &m, &m);
    if triple_residual > policy.containment_tol {
        return Err(Error::NotTriple {
            residual: triple_residual,
        });
    }
    let s_alg = subspace_sum(&brackets, &m, policy)?;
    let closure = bracket_escape(&pair.sc, &s_alg, &s_alg, &s_alg);
    if closure > policy.containment_tol {
        return Err(Error::NotSubalgebra {
            which: "[m,m] + m".into(),
            residual: closure,
        });
    }
    Ok(TripleSystem {
        m,
        bracket_span: brackets,
        s_alg,
        triple_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSectionReport {
    pub copolarity: usize,
    pub m_dim: usize,
    pub s_dim: usize,
    /// `copolarity + dim m == dim s`.
    pub identity_holds: bool,
}

/// `dim [m,m]`, with the section dimension `dim s`.
pub fn ksection_copolarity(ts: &TripleSystem) -> KSectionReport {
    let copolarity = ts.bracket_span.dim();
    KSectionReport {
        copolarity,
        m_dim: ts.m.dim(),
        s_dim: ts.s_alg.dim(),
        identity_holds: copolarity + ts.m.dim() == ts.s_alg.dim(),
    }
}

/// Basis vectors `e_i` with `i` in `indices`, as columns.
pub fn basis_columns(d: usize, indices: &[usize]) -> Matrix {
    Matrix::from_fn(d, indices.len(), |r, c| if r == indices[c] { 1.0 } else { 0.0 })
}

/// A faithful matrix realization `e_i -> E_i` of the algebra.
#[derive(Clone, Debug)]
pub struct Embedding {
    matrices: Vec<Matrix>,
    stacked: Matrix,
}

impl Embedding {
    /// Checks that the matrices are square of one size, independent and
    /// realize the structure constants.
    pub fn new(matrices: Vec<Matrix>, sc: &StructureConstants, policy: &TolerancePolicy) -> Result<Self> {
        if matrices.len() != sc.dim() {
            return Err(Error::DimensionMismatch {
                context: "embedding".into(),
                expected: sc.dim(),
                found: matrices.len(),
            });
        }
        let size = matrices.first().map_or(0, |m| m.nrows());
        for (i, m) in matrices.iter().enumerate() {
            square_check(m, size, &format!("embedding matrix {i}"))?;
        }
        let stacked = if matrices.is_empty() {
            Matrix::zeros(0, 0)
        } else {
            Matrix::from_columns(&matrices.iter().map(vec_of).collect::<Vec<_>>())
        };
        if !matrices.is_empty() {
            let rank = rank_split(&stacked, policy)?.rank();
            if rank < matrices.len() {
                return Err(Error::DependentGenerators {
                    rank,
                    count: matrices.len(),
                });
            }
        }
        let emb = Self { matrices, stacked };
        for i in 0..sc.dim() {
            for j in 0..sc.dim() {
                let lhs = &emb.matrices[i] * &emb.matrices[j] - &emb.matrices[j] * &emb.matrices[i];
                let rhs = emb.matrix(&sc.ad_basis(i).column(j).into_owned());
                let residual = (lhs - rhs).amax();
                if residual > policy.containment_tol {
                    return Err(Error::NotClosed { i, j, residual });
                }
            }
        }
        Ok(emb)
    }

    pub fn size(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, x: &Vector) -> Matrix {
        let n = self.size();
        let mut m = Matrix::zeros(n, n);
        for (c, e) in x.iter().zip(&self.matrices) {
            m += e * *c;
        }
        m
    }

    /// Coefficients of a matrix lying in the embedded algebra.
    pub fn coefficients(&self, m: &Matrix) -> (Vector, f64) {
        let v = vec_of(m);
        let c = least_squares(&self.stacked, &v);
        let residual = (&self.stacked * &c - v).amax();
        (c, residual)
    }

    /// `Ad_g` as a matrix on coefficient space, with the worst residual of
    /// the images leaving the algebra.
    pub fn adjoint(&self, g: &Matrix, g_inv: &Matrix) -> (Matrix, f64) {
        let d = self.matrices.len();
        let mut ad = Matrix::zeros(d, d);
        let mut worst: f64 = 0.0;
        for (j, e) in self.matrices.iter().enumerate() {
            let (c, r) = self.coefficients(&(g * e * g_inv));
            ad.set_column(j, &c);
            worst = worst.max(r);
        }
        (ad, worst)
    }
}

/// Tangent and normal spaces of the orbit `H g K` at `g`.
#[derive(Clone, Debug)]
pub struct HkSpaces {
    /// `h g + g k` in matrix space (row-major flattening).
    pub tangent: Subspace,
    /// `g (Ad_{g^-1}(h^⊥) ∩ k^⊥)` in matrix space.
    pub normal: Subspace,
    /// Left-translated coordinates of the two spaces in the algebra.
    pub tangent_coords: Subspace,
    pub normal_coords: Subspace,
    /// Largest `|<ξ, η>|` under the inner product between the two bases.
    pub orthogonality: f64,
    /// Isotropy of the lifted action, from the kernel of `(X, Y) -> Xg - gY`.
    pub isotropy_dim: usize,
    /// `dim(h ∩ Ad_g k)`, computed on coefficient space.
    pub intersection_dim: usize,
}

/// Orbit spaces of `(h, k) · g = h g k^{-1}` for `H x K` acting on `G`.
pub fn hk_orbit_spaces(pair: &SymPair, emb: &Embedding, h_alg: &Subspace, g_elt: &Matrix) -> Result<HkSpaces> {
    let policy = &pair.policy;
    let n = emb.size();
    square_check(g_elt, n, "group element")?;
    let orth = (g_elt.transpose() * g_elt - Matrix::identity(n, n)).amax();
    if orth > 1e-9 {
        return Err(Error::NotInGroup { residual: orth });
    }
    let g_inv = g_elt.transpose();
    let (ad_g, res_g) = emb.adjoint(g_elt, &g_inv);
    let (ad_ginv, res_ginv) = emb.adjoint(&g_inv, g_elt);
    let residual = res_g.max(res_ginv);
    if residual > policy.containment_tol {
        return Err(Error::NotInGroup { residual });
    }
    let k = &pair.k_space;
    let closure = bracket_escape(&pair.sc, h_alg, h_alg, h_alg);
    if closure > policy.containment_tol {
        return Err(Error::NotSubalgebra {
            which: "h".into(),
            residual: closure,
        });
    }

    // Left-translated coordinates: g^{-1}(X g + g Y) = Ad_{g^-1} X + Y.
    let h_pulled = Subspace::span(&(&ad_ginv * h_alg.basis()), policy)?;
    let tangent_coords = subspace_sum(&h_pulled, k, policy)?;
    let h_perp = pair.inner_complement(h_alg)?;
    let k_perp = pair.inner_complement(k)?;
    let h_perp_pulled = Subspace::span(&(&ad_ginv * h_perp.basis()), policy)?;
    let normal_coords = subspace_intersect(&h_perp_pulled, &k_perp, policy)?;
    let orthogonality = if tangent_coords.dim() == 0 || normal_coords.dim() == 0 {
        0.0
    } else {
        (tangent_coords.basis().transpose() * &pair.inner * normal_coords.basis()).amax()
    };

    let to_matrix_space = |s: &Subspace| -> Result<Subspace> {
        let cols: Vec<Vector> = s
            .basis()
            .column_iter()
            .map(|c| vec_of(&(g_elt * emb.matrix(&c.into_owned()))))
            .collect();
        if cols.is_empty() {
            return Ok(Subspace::zero(n * n));
        }
        Subspace::span(&Matrix::from_columns(&cols), policy)
    };

    // Kernel of (X, Y) -> X g - g Y on h x k.
    let mut cols: Vec<Vector> = Vec::new();
    for c in h_alg.basis().column_iter() {
        cols.push(vec_of(&(emb.matrix(&c.into_owned()) * g_elt)));
    }
    for c in k.basis().column_iter() {
        cols.push(-vec_of(&(g_elt * emb.matrix(&c.into_owned()))));
    }
    let isotropy_dim = if cols.is_empty() {
        0
    } else {
        null_space(&Matrix::from_columns(&cols), policy)?.dim()
    };
    let k_pushed = Subspace::span(&(&ad_g * k.basis()), policy)?;
    let intersection_dim = subspace_intersect(h_alg, &k_pushed, policy)?.dim();

    Ok(HkSpaces {
        tangent: to_matrix_space(&tangent_coords)?,
        normal: to_matrix_space(&normal_coords)?,
        tangent_coords,
        normal_coords,
        orthogonality,
        isotropy_dim,
        intersection_dim,
    })
}

/// Derivative of `exp` at `a` in direction `v`, from the exponential of the
/// block matrix `[[a, v], [0, a]]`.
pub fn exp_derivative(a: &Matrix, v: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let mut block = Matrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(a);
    block.view_mut((n, n), (n, n)).copy_from(a);
    block.view_mut((0, n), (n, n)).copy_from(v);
    let e = mat_exp(&block)?;
    Ok(e.view((0, n), (n, n)).into_owned())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangentFormulaReport {
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub distance: f64,
    pub passed: bool,
}

/// Compares the tangent space of `exp(m)` at `exp(2X)` with
/// `exp(X) m exp(X)`, both in matrix space.
pub fn tangent_formula_check(ts: &TripleSystem, x: &Vector, emb: &Embedding, policy: &TolerancePolicy) -> Result<TangentFormulaReport> {
    let residual = ts.m.vector_residual(x);
    if residual > policy.containment_tol * x.norm().max(1.0) {
        return Err(Error::Precondition {
            what: "X must lie in m".into(),
            residual,
        });
    }
    let xm = emb.matrix(x);
    let two_x = &xm * 2.0;
    let half = mat_exp(&xm)?;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for v in ts.m.basis().column_iter() {
        let vm = emb.matrix(&v.into_owned());
        lhs.push(vec_of(&exp_derivative(&two_x, &vm)?));
        rhs.push(vec_of(&(&half * &vm * &half)));
    }
    let size = emb.size();
    let (l, r) = if lhs.is_empty() {
        (Subspace::zero(size * size), Subspace::zero(size * size))
    } else {
        (
            Subspace::span(&Matrix::from_columns(&lhs), policy)?,
            Subspace::span(&Matrix::from_columns(&rhs), policy)?,
        )
    };
    let distance = if l.dim() == r.dim() { l.distance(&r) } else { 1.0 };
    Ok(TangentFormulaReport {
        lhs_dim: l.dim(),
        rhs_dim: r.dim(),
        distance,
        passed: l.dim() == r.dim() && distance < TANGENT_FORMULA_TOL,
    })
}

/// `p_1 = 3, p_2 = 5, ...`.
pub fn odd_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 3u64;
    while out.len() < count {
        if (3..).step_by(2).take_while(|f| f * f <= c).all(|f| !c.is_multiple_of(f)) {
            out.push(c);
        }
        c += 2;
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule on [0, 1] with `points` nodes, split into
/// panels of 16 when `points` is a multiple of 16.
pub fn composite_rule(points: usize) -> (Vec<f64>, Vec<f64>) {
    let points = points.max(1);
    let (panels, per) = if points.is_multiple_of(16) { (points / 16, 16) } else { (1, points) };
    let (x, w) = gauss_legendre(per);
    let h = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(points);
    let mut weights = Vec::with_capacity(points);
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaugeGram {
    pub primes: Vec<u64>,
    /// `c` in `(ad_X)^2 Y = -c Y`.
    pub c: f64,
    pub delta: f64,
    pub quadrature: Vec<Vec<f64>>,
    pub closed_form: Vec<Vec<f64>>,
    pub discrepancy: f64,
    pub min_eig_quadrature: f64,
    pub min_eig_closed_form: f64,
    pub quadrature_points: usize,
}

impl GaugeGram {
    pub fn paths_agree(&self) -> bool {
        self.discrepancy < GRAM_AGREEMENT_TOL
    }
}

fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// X and Y for the Gram test: X is `scale` times the first basis vector of
/// m (unit length under the inner product), Y the unit eigenvector of
/// `-(ad_X)^2` on m with the largest eigenvalue.
pub fn gauge_vectors(pair: &SymPair, ts: &TripleSystem, scale: f64) -> Result<(Vector, Vector)> {
    if ts.m.dim() == 0 {
        return Err(Error::EigenRelationFails { residual: 0.0 });
    }
    let inner = &pair.inner;
    let b = ts.m.basis();
    let x0 = b.column(0).into_owned();
    let x = &x0 * (scale / x0.dot(&(inner * &x0)).sqrt());
    let ad = pair.sc.ad(&x);
    // -(ad_X)^2 restricted to m, symmetric in inner-orthonormal coordinates.
    let gram = b.transpose() * inner * b;
    let chol = gram.clone().cholesky().ok_or(Error::NotInvariant { residual: 0.0 })?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse().expect("cholesky factor is invertible");
    let q = b * l_inv.transpose();
    let op = -(q.transpose() * inner * &ad * &ad * &q);
    let (vals, vecs) = sym_eigen_sorted(&op);
    let top = *vals.last().expect("m is nonzero");
    if top <= EIGEN_RELATION_TOL {
        return Err(Error::EigenRelationFails { residual: top.abs() });
    }
    let y = &q * vecs.column(vecs.ncols() - 1);
    Ok((x, y))
}

/// Gram matrix of `t -> exp(((1 - t)/p_i) ad_X) Y` in L²([0,1]), by
/// quadrature on the flows and from the closed cosine form.
pub fn gauge_gram(pair: &SymPair, ts: &TripleSystem, x: &Vector, y: &Vector, n_terms: usize, quadrature_points: usize) -> Result<GaugeGram> {
    let d = pair.dim();
    for (name, v) in [("X", x), ("Y", y)] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                context: format!("gauge_gram {name}"),
                expected: d,
                found: v.len(),
            });
        }
    }
    if n_terms == 0 {
        return Err(Error::Precondition {
            what: "n_terms must be at least 1".into(),
            residual: 0.0,
        });
    }
    let policy = &pair.policy;
    for (name, v) in [("X", x), ("Y", y)] {
        let r = ts.m.vector_residual(v);
        if r > policy.containment_tol * v.norm().max(1.0) {
            return Err(Error::Precondition {
                what: format!("{name} must lie in m"),
                residual: r,
            });
        }
    }
    let inner = &pair.inner;
    let norm = y.dot(&(inner * y)).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition {
            what: "Y must have unit length".into(),
            residual: (norm - 1.0).abs(),
        });
    }
    let ad = pair.sc.ad(x);
    let w = &ad * &ad * y;
    let c = -w.dot(&(inner * y));
    let residual = (&w + y * c).norm();
    if c <= EIGEN_RELATION_TOL || residual > EIGEN_RELATION_TOL {
        return Err(Error::EigenRelationFails { residual: residual.max(c.min(0.0).abs()) });
    }
    let delta = c.sqrt();
    let primes = odd_primes(n_terms);

    let closed = Matrix::from_fn(n_terms, n_terms, |i, j| {
        sinc(delta * (1.0 / primes[i] as f64 - 1.0 / primes[j] as f64))
    });

    let (nodes, weights) = composite_rule(quadrature_points);
    let mut quad = Matrix::zeros(n_terms, n_terms);
    for (t, wt) in nodes.iter().zip(&weights) {
        let flows: Vec<Vector> = primes
            .iter()
            .map(|&p| mat_exp(&(&ad * ((1.0 - t) / p as f64))).expect("square") * y)
            .collect();
        for i in 0..n_terms {
            for j in i..n_terms {
                let v = wt * flows[i].dot(&(inner * &flows[j]));
                quad[(i, j)] += v;
                if i != j {
                    quad[(j, i)] += v;
                }
            }
        }
    }
    let discrepancy = (&quad - &closed).amax();
    Ok(GaugeGram {
        primes,
        c,
        delta,
        min_eig_quadrature: min_eigenvalue(&quad),
        min_eig_closed_form: min_eigenvalue(&closed),
        quadrature: to_rows(&quad),
        closed_form: to_rows(&closed),
        discrepancy,
        quadrature_points: nodes.len(),
    })
}

/// Orthogonal complement within p, used to pick directions off m.
pub fn p_complement(pair: &SymPair, m: &Subspace) -> Result<Subspace> {
    let c = complement(m, &pair.policy);
    subspace_intersect(&c, &pair.p_space, &pair.policy)
}
