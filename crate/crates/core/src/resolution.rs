//! Isotropy and dimension bookkeeping for the resolution of a fat section,
//! and invariant scalar products on `g/h`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::liealg::{LieRep, StructureConstants};
use crate::numkernel::{
    check_finite, complement, mat_exp, min_eigenvalue, null_space, subspace_intersect, subspace_sum,
    Matrix, Subspace, TolerancePolicy, Vector,
};
use crate::orbits::{analyze_point, certify_principal_orbit, PointContext};
use crate::sections::{regular_point_in, ReductionData};

/// Skewness residual accepted for invariant metrics.
pub const SKEW_TOL: f64 = 1e-8;
/// Residual accepted by the quotient isometry check.
pub const ISOMETRY_TOL: f64 = 1e-9;

fn point_in_section(rep: &LieRep, red: &ReductionData, s: &Vector) -> Result<PointContext> {
    let residual = red.sigma.vector_residual(s);
    if residual > rep.policy().containment_tol * s.norm().max(1.0) {
        return Err(Error::AnchorNotInSection { residual });
    }
    analyze_point(rep, s)
}

/// `dim(n ∩ g_s)`: the isotropy dimension of the resolved action at `s`.
pub fn resolution_isotropy(rep: &LieRep, red: &ReductionData, s: &Vector) -> Result<usize> {
    let ctx = point_in_section(rep, red, s)?;
    Ok(subspace_intersect(&red.normalizer_alg, &ctx.isotropy_alg, rep.policy())?.dim())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalDiffeoReport {
    pub point: Vec<f64>,
    /// `dim(T_s(G·s) + Σ)`.
    pub sum_dim: usize,
    pub ambient_dim: usize,
    /// Containment residual of `ν_s(G·s)` in Σ.
    pub normal_residual: f64,
    pub isotropy_dim: usize,
    pub resolved_isotropy_dim: usize,
    pub form_a: bool,
    pub form_b: bool,
    pub form_c: bool,
}

impl LocalDiffeoReport {
    pub fn forms_agree(&self) -> bool {
        self.form_a == self.form_b && self.form_b == self.form_c
    }

    pub fn holds(&self) -> bool {
        self.forms_agree() && self.form_a
    }
}

/// Three equivalent forms of the local-diffeomorphism criterion at `s`:
/// orbit tangent plus Σ spans, the normal space lies in Σ, and the
/// isotropy algebra lies in the normalizer.
pub fn local_diffeo_criterion(rep: &LieRep, red: &ReductionData, s: &Vector) -> Result<LocalDiffeoReport> {
    let policy = rep.policy();
    let ctx = point_in_section(rep, red, s)?;
    let sum_dim = subspace_sum(&ctx.orbit_tangent, &red.sigma, policy)?.dim();
    let normal_residual = red.sigma.containment_residual(&ctx.normal);
    let resolved = subspace_intersect(&red.normalizer_alg, &ctx.isotropy_alg, policy)?.dim();
    let n = rep.ambient_dim();
    Ok(LocalDiffeoReport {
        point: s.iter().copied().collect(),
        sum_dim,
        ambient_dim: n,
        normal_residual,
        isotropy_dim: ctx.isotropy_alg.dim(),
        resolved_isotropy_dim: resolved,
        form_a: sum_dim == n,
        form_b: normal_residual < policy.containment_tol,
        form_c: ctx.isotropy_alg.dim() == resolved,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalDiffeoSuite {
    pub reports: Vec<LocalDiffeoReport>,
    /// Every sample passes all three forms.
    pub global_certified: bool,
    pub forms_agree: bool,
}

pub fn local_diffeo_suite(rep: &LieRep, red: &ReductionData, points: &[Vector]) -> Result<LocalDiffeoSuite> {
    let reports = points
        .iter()
        .map(|s| local_diffeo_criterion(rep, red, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalDiffeoSuite {
        global_certified: reports.iter().all(|r| r.holds()),
        forms_agree: reports.iter().all(|r| r.forms_agree()),
        reports,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionAudit {
    pub ambient_dim: usize,
    pub sigma_dim: usize,
    pub orbit_dim: usize,
    pub weyl_orbit_dim: usize,
    pub cohomogeneity: usize,
    pub weyl_dim: usize,
    pub principal_weyl_isotropy_dim: usize,
    pub ambient_identity: Check,
    pub section_identity: Check,
}

/// At a regular point of Σ: `N = dim Σ + (dim G·s - dim W·s)` and
/// `dim Σ = cohomogeneity + dim W - dim W_s`.
pub fn dimension_audit(rep: &LieRep, red: &ReductionData, seed: u64) -> Result<DimensionAudit> {
    let cert = certify_principal_orbit(rep, 200, seed)?;
    let ctx = regular_point_in(rep, &red.sigma, &cert, seed)?;
    if !ctx.regular {
        return Err(Error::NotRegular);
    }
    let w_ctx = analyze_point(&red.reduced_rep, &red.to_section(&ctx.p))?;
    let n = rep.ambient_dim();
    let sigma_dim = red.sigma.dim();
    let orbit_dim = ctx.orbit_dim();
    let w_orbit = w_ctx.orbit_dim();
    let cohom = n - cert.principal_orbit_dim;
    let w_iso = red.weyl_dim - w_orbit;
    Ok(DimensionAudit {
        ambient_dim: n,
        sigma_dim,
        orbit_dim,
        weyl_orbit_dim: w_orbit,
        cohomogeneity: cohom,
        weyl_dim: red.weyl_dim,
        principal_weyl_isotropy_dim: w_iso,
        ambient_identity: Check::equal("ambient_dim_equals_section_plus_orbit_excess", n, sigma_dim + orbit_dim - w_orbit),
        section_identity: Check::equal(
            "section_dim_equals_cohomogeneity_plus_weyl_orbit",
            sigma_dim,
            cohom + red.weyl_dim - w_iso,
        ),
    })
}

/// Lie algebra `g` with subalgebras `h ⊴ n` and an inner product fixing
/// the complement used for `g/h`.
#[derive(Clone, Debug)]
pub struct TripleDatum {
    sc: StructureConstants,
    h_alg: Subspace,
    n_alg: Subspace,
    inner: Matrix,
    policy: TolerancePolicy,
}

fn escape(sc: &StructureConstants, a: &Subspace, b: &Subspace, target: &Subspace) -> f64 {
    let mut worst: f64 = 0.0;
    for x in a.basis().column_iter() {
        for y in b.basis().column_iter() {
            worst = worst.max(target.vector_residual(&sc.bracket(&x.into_owned(), &y.into_owned())));
        }
    }
    worst
}

impl TripleDatum {
    pub fn new(
        sc: StructureConstants,
        h_alg: Subspace,
        n_alg: Subspace,
        inner: Matrix,
        policy: TolerancePolicy,
    ) -> Result<Self> {
        let d = sc.dim();
        for (name, s) in [("h", &h_alg), ("n", &n_alg)] {
            if s.ambient_dim() != d {
                return Err(Error::DimensionMismatch {
                    context: format!("triple datum {name}"),
                    expected: d,
                    found: s.ambient_dim(),
                });
            }
        }
        if inner.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                context: "triple datum inner product".into(),
                expected: d,
                found: inner.nrows(),
            });
        }
        check_finite(&inner, "triple datum inner product")?;
        let asym = (&inner - inner.transpose()).amax();
        if asym > 1e-12 || (d > 0 && min_eigenvalue(&inner) <= policy.abs_zero_tol) {
            return Err(Error::Precondition {
                what: "inner product must be symmetric positive definite".into(),
                residual: asym,
            });
        }
        let tol = policy.containment_tol;
        let checks = [
            ("h not inside n", n_alg.containment_residual(&h_alg)),
            ("h not closed", escape(&sc, &h_alg, &h_alg, &h_alg)),
            ("n not closed", escape(&sc, &n_alg, &n_alg, &n_alg)),
            ("h not an ideal of n", escape(&sc, &n_alg, &h_alg, &h_alg)),
        ];
        for (which, residual) in checks {
            if residual > tol {
                return Err(Error::NotSubalgebra {
                    which: which.into(),
                    residual,
                });
            }
        }
        Ok(Self {
            sc,
            h_alg,
            n_alg,
            inner,
            policy,
        })
    }

    pub fn from_indices(sc: StructureConstants, h: &[usize], n: &[usize], inner: Option<Matrix>, policy: TolerancePolicy) -> Result<Self> {
        let d = sc.dim();
        for &i in h.iter().chain(n) {
            if i >= d {
                return Err(Error::DimensionMismatch {
                    context: "basis index".into(),
                    expected: d,
                    found: i,
                });
            }
        }
        let inner = inner.unwrap_or_else(|| Matrix::identity(d, d));
        Self::new(sc, Subspace::coordinate(d, h), Subspace::coordinate(d, n), inner, policy)
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn h_alg(&self) -> &Subspace {
        &self.h_alg
    }

    pub fn n_alg(&self) -> &Subspace {
        &self.n_alg
    }

    pub fn quotient_dim(&self) -> usize {
        self.sc.dim() - self.h_alg.dim()
    }

    /// Inner-orthonormal basis of the inner-orthogonal complement of `sub`.
    fn complement_basis(&self, sub: &Subspace) -> Result<Matrix> {
        let c = if sub.dim() == 0 {
            Subspace::full(self.sc.dim())
        } else {
            null_space(&(sub.basis().transpose() * &self.inner), &self.policy)?
        };
        let b = c.basis().clone();
        if b.ncols() == 0 {
            return Ok(b);
        }
        let gram = b.transpose() * &self.inner * &b;
        let l = gram.cholesky().expect("inner product is positive definite").l();
        let l_inv = l.try_inverse().expect("cholesky factor is invertible");
        Ok(b * l_inv.transpose())
    }

    /// Basis of `g/h` (columns in g) and the quotient coordinate map.
    pub fn quotient_basis(&self) -> Result<Matrix> {
        self.complement_basis(&self.h_alg)
    }

    /// `ad_X` acting on `g/h` in the quotient basis.
    pub fn quotient_ad(&self, x: &Vector) -> Result<Matrix> {
        let q = self.quotient_basis()?;
        Ok(q.transpose() * &self.inner * self.sc.ad(x) * &q)
    }

    fn n_actions(&self) -> Result<Vec<Matrix>> {
        self.n_alg
            .basis()
            .column_iter()
            .map(|c| self.quotient_ad(&c.into_owned()))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSolution {
    pub s_matrix: Vec<Vec<f64>>,
    pub feasible: bool,
    pub min_eig: f64,
    pub skew_residual: f64,
    pub solution_space_dim: usize,
    pub iterations: usize,
}

impl MetricSolution {
    pub fn matrix(&self) -> Matrix {
        let q = self.s_matrix.len();
        Matrix::from_fn(q, q, |i, j| self.s_matrix[i][j])
    }
}

fn sym_basis(q: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..q {
        for j in i..q {
            let mut m = Matrix::zeros(q, q);
            if i == j {
                m[(i, i)] = 1.0;
            } else {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
            out.push(m);
        }
    }
    out
}

/// Largest `|S A + A^T S|` over the given actions.
pub fn skew_residual(s: &Matrix, actions: &[Matrix]) -> f64 {
    actions
        .iter()
        .map(|a| (s * a + a.transpose() * s).amax())
        .fold(0.0, f64::max)
}

fn normalized_min_eig(s: &Matrix) -> f64 {
    let norm = s.norm();
    if norm == 0.0 {
        return f64::NEG_INFINITY;
    }
    min_eigenvalue(&(s / norm))
}

const ASCENT_ITERATIONS: usize = 200;

/// Symmetric `S` on `g/h` with `ad_X` skew for all `X ∈ n`, positive
/// definite if the search finds one.
pub fn gw_metric(td: &TripleDatum) -> Result<MetricSolution> {
    let q = td.quotient_dim();
    let actions = td.n_actions()?;
    if q == 0 {
        return Ok(MetricSolution {
            s_matrix: Vec::new(),
            feasible: true,
            min_eig: f64::MAX,
            skew_residual: 0.0,
            solution_space_dim: 0,
            iterations: 0,
        });
    }
    let basis = sym_basis(q);
    // Linear map from symmetric coordinates to the stacked constraints.
    let rows = q * q * actions.len();
    let cols: Vec<Vector> = basis
        .iter()
        .map(|b| {
            let mut v = Vector::zeros(rows);
            for (k, a) in actions.iter().enumerate() {
                let c = b * a + a.transpose() * b;
                for (idx, val) in c.iter().enumerate() {
                    v[k * q * q + idx] = *val;
                }
            }
            v
        })
        .collect();
    let solutions = if rows == 0 {
        Subspace::full(basis.len())
    } else {
        null_space(&Matrix::from_columns(&cols), &td.policy)?
    };
    let r = solutions.dim();
    if r == 0 {
        return Err(Error::InfeasibleNumerically {
            best_min_eig: f64::NEG_INFINITY,
        });
    }
    let sol_mats: Vec<Matrix> = solutions
        .basis()
        .column_iter()
        .map(|c| {
            basis
                .iter()
                .zip(c.iter())
                .fold(Matrix::zeros(q, q), |acc, (b, w)| acc + b * *w)
        })
        .collect();
    let combine = |alpha: &Vector| -> Matrix {
        sol_mats
            .iter()
            .zip(alpha.iter())
            .fold(Matrix::zeros(q, q), |acc, (m, a)| acc + m * *a)
    };
    // The solution matrices are Frobenius-orthonormal, so projecting the
    // identity is a set of traces.
    let mut alpha = Vector::from_fn(r, |k, _| sol_mats[k].trace());
    if alpha.norm() == 0.0 {
        alpha[0] = 1.0;
    }
    let mut best = normalized_min_eig(&combine(&alpha));
    let mut step = 0.5 * alpha.norm().max(1.0);
    let mut iterations = 0;
    while best <= 0.0 && iterations < ASCENT_ITERATIONS {
        iterations += 1;
        let mut improved = false;
        for k in 0..r {
            for sign in [1.0, -1.0] {
                let mut trial = alpha.clone();
                trial[k] += sign * step;
                let val = normalized_min_eig(&combine(&trial));
                if val > best {
                    best = val;
                    alpha = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    let s = combine(&alpha);
    let s = &s / s.norm() * (q as f64).sqrt();
    let min_eig = min_eigenvalue(&s);
    let residual = skew_residual(&s, &actions);
    if min_eig <= td.policy.abs_zero_tol {
        return Err(Error::InfeasibleNumerically { best_min_eig: min_eig });
    }
    Ok(MetricSolution {
        s_matrix: s.row_iter().map(|r| r.iter().copied().collect()).collect(),
        feasible: residual < SKEW_TOL,
        min_eig,
        skew_residual: residual,
        solution_space_dim: r,
        iterations,
    })
}

/// Skewness of `S` under `Ad` of sampled elements of the subgroup generated
/// by n, measured as `|M^T S M - S|` for `M = exp(sum t_i ad_{X_i})` on g/h.
pub fn group_invariance_residual(td: &TripleDatum, sol: &MetricSolution, samples: usize, seed: u64) -> Result<f64> {
    let s = sol.matrix();
    let actions = td.n_actions()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut m = Matrix::identity(s.nrows(), s.nrows());
        for a in &actions {
            let t: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            m = mat_exp(&(a * t))? * m;
        }
        worst = worst.max((m.transpose() * &s * &m - &s).amax());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsometryReport {
    pub complement_dim: usize,
    pub residual: f64,
    pub passed: bool,
}

/// The S-orthogonal complement of `n/h` in `g/h`, pushed to `g/n`, carries
/// the quotient scalar product.
pub fn metric_isometry_check(td: &TripleDatum, sol: &MetricSolution) -> Result<IsometryReport> {
    if !sol.feasible {
        return Err(Error::InfeasibleNumerically { best_min_eig: sol.min_eig });
    }
    let s = sol.matrix();
    let q = td.quotient_dim();
    if q == 0 {
        return Ok(IsometryReport {
            complement_dim: 0,
            residual: 0.0,
            passed: true,
        });
    }
    let qb = td.quotient_basis()?;
    // n/h inside g/h, in quotient coordinates.
    let nh_coords = qb.transpose() * &td.inner * td.n_alg.basis();
    let nh = Subspace::span(&nh_coords, &td.policy)?;
    let c = complement(&nh, &td.policy);
    let w = if nh.dim() == 0 {
        Subspace::full(q)
    } else {
        null_space(&(nh.basis().transpose() * &s), &td.policy)?
    };
    if w.dim() == 0 {
        return Ok(IsometryReport {
            complement_dim: 0,
            residual: 0.0,
            passed: true,
        });
    }
    // Quotient metric on g/n in the coordinates of c: Schur complement of
    // the n/h block.
    let (vc, vn) = (c.basis(), nh.basis());
    let s_cc = vc.transpose() * &s * vc;
    let schur = if vn.ncols() == 0 {
        s_cc
    } else {
        let s_cn = vc.transpose() * &s * vn;
        let s_nn = vn.transpose() * &s * vn;
        let inv = s_nn.try_inverse().ok_or(Error::InfeasibleNumerically { best_min_eig: sol.min_eig })?;
        &s_cc - &s_cn * inv * s_cn.transpose()
    };
    let wb = w.basis();
    let pushed = vc.transpose() * wb;
    let lhs = wb.transpose() * &s * wb;
    let rhs = pushed.transpose() * schur * &pushed;
    let residual = (lhs - rhs).amax();
    Ok(IsometryReport {
        complement_dim: w.dim(),
        residual,
        passed: residual < ISOMETRY_TOL,
    })
}
