//! Orbit geometry of linear actions on R^N.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::descent::{all_components, multistart};
use crate::error::{Error, Result};
use crate::liealg::LieRep;
use crate::numkernel::{
    check_finite_vec, complement, pseudo_solve, rank_split, subspace_intersect, svd, Matrix, Subspace, Svd,
    TolerancePolicy,
    Vector,
};

/// Outcome of sampling orbit dimensions at Gaussian points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub principal_orbit_dim: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct PointContext {
    pub p: Vector,
    pub orbit_tangent: Subspace,
    pub normal: Subspace,
    /// Subspace of the coefficient space R^d.
    pub isotropy_alg: Subspace,
    pub regular: bool,
    pub certificate: Option<RegularityCertificate>,
}

impl PointContext {
    pub fn orbit_dim(&self) -> usize {
        self.orbit_tangent.dim()
    }

    /// Marks the point regular iff its orbit dimension reaches the certified
    /// principal dimension.
    pub fn certified(mut self, cert: &RegularityCertificate) -> Self {
        self.regular = self.orbit_dim() == cert.principal_orbit_dim;
        self.certificate = Some(cert.clone());
        self
    }
}

/// Tangent, normal and isotropy spaces at `p`. The result is not yet
/// certified regular.
pub fn analyze_point(rep: &LieRep, p: &Vector) -> Result<PointContext> {
    if p.len() != rep.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "analyze_point".into(),
            expected: rep.ambient_dim(),
            found: p.len(),
        });
    }
    check_finite_vec(p, "analyze_point")?;
    let policy = rep.policy();
    let split = rank_split(&rep.orbit_map(p), policy)?;
    let normal = complement(&split.range, policy);
    Ok(PointContext {
        p: p.clone(),
        orbit_tangent: split.range,
        normal,
        isotropy_alg: split.null,
        regular: false,
        certificate: None,
    })
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Maximal orbit dimension over `trials` Gaussian points.
pub fn certify_principal_orbit(rep: &LieRep, trials: usize, seed: u64) -> Result<RegularityCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials.max(1) {
        let p = gaussian(rep.ambient_dim(), &mut rng);
        let rank = rank_split(&rep.orbit_map(&p), rep.policy())?.rank();
        best = best.max(rank);
    }
    Ok(RegularityCertificate {
        principal_orbit_dim: best,
        samples: trials.max(1),
        seed,
    })
}

/// A Gaussian point attaining the maximal sampled orbit dimension.
pub fn find_regular(rep: &LieRep, trials: usize, seed: u64) -> Result<PointContext> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<PointContext> = None;
    for _ in 0..trials.max(1) {
        let p = gaussian(rep.ambient_dim(), &mut rng);
        let ctx = analyze_point(rep, &p)?;
        if best.as_ref().is_none_or(|b| ctx.orbit_dim() > b.orbit_dim()) {
            best = Some(ctx);
        }
    }
    let best = best.expect("at least one trial");
    let cert = RegularityCertificate {
        principal_orbit_dim: best.orbit_dim(),
        samples: trials.max(1),
        seed,
    };
    Ok(best.certified(&cert))
}

/// `N - dim` of the principal orbit.
pub fn cohomogeneity(rep: &LieRep, cert: &RegularityCertificate) -> usize {
    rep.ambient_dim() - cert.principal_orbit_dim
}

/// Budget of the randomized searches over group components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 8,
        }
    }
}

/// Nearest orthogonal matrix (polar factor).
pub(crate) fn orthogonalize(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return m.clone();
    }
    let Svd { u, s, v } = svd(m).expect("finite matrix");
    let k = s.len();
    u.columns(0, k) * v.columns(0, k).transpose()
}

fn fixes(h: &Matrix, q: &Vector) -> f64 {
    (h * q - q).norm()
}

/// For every supplied discrete element δ, an element of `G°·δ` fixing `q`
/// if the search finds one. Representatives found for different δ may lie
/// in the same component of the isotropy group.
pub fn discrete_isotropy(rep: &LieRep, q: &Vector, cfg: &SearchConfig) -> Vec<Matrix> {
    let n = rep.ambient_dim();
    let tol = rep.policy().containment_tol * q.norm().max(1.0);
    let mut found = Vec::new();
    for delta in rep.discrete_elements() {
        if fixes(delta, q) <= tol {
            found.push(delta.clone());
            continue;
        }
        // Search G° for h with h (δ q) = q.
        let shifted = delta * q;
        let id = [Matrix::identity(n, n)];
        let (_, h) = multistart(rep, &shifted, None, q, &id, cfg.restarts.max(1), cfg.seed);
        let g = orthogonalize(&(h * delta));
        if fixes(&g, q) <= tol {
            found.push(g);
        }
    }
    found
}

/// Isotropy representation on the normal space, with the ineffective
/// kernel removed and discrete isotropy found with the default search.
pub fn slice_rep(rep: &LieRep, ctx: &PointContext) -> Result<LieRep> {
    slice_rep_with(rep, ctx, &SearchConfig::default())
}

pub fn slice_rep_with(rep: &LieRep, ctx: &PointContext, cfg: &SearchConfig) -> Result<LieRep> {
    let v = ctx.normal.basis();
    let discrete: Vec<Matrix> = discrete_isotropy(rep, &ctx.p, cfg)
        .into_iter()
        .map(|h| orthogonalize(&(v.transpose() * h * v)))
        .collect();
    let (slice, _) = rep.restrict(&ctx.isotropy_alg, &ctx.normal, discrete)?;
    Ok(slice)
}

/// The d x d matrix `<v, sym(X_i X_j) p>`.
fn second_form_coeffs(rep: &LieRep, p: &Vector, v: &Vector) -> Matrix {
    let d = rep.dim();
    let gens = rep.generators();
    let xp: Vec<Vector> = gens.iter().map(|x| x * p).collect();
    let xv: Vec<Vector> = gens.iter().map(|x| x.transpose() * v).collect();
    // <v, X_i X_j p> = <X_i^T v, X_j p>
    let mut b = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let val = 0.5 * (xv[i].dot(&xp[j]) + xv[j].dot(&xp[i]));
            b[(i, j)] = val;
            b[(j, i)] = val;
        }
    }
    b
}

/// Shape operator `A_v` of the orbit through `ctx.p`, as a symmetric matrix
/// in the orthonormal basis of `ctx.orbit_tangent`.
pub fn shape_operator(rep: &LieRep, ctx: &PointContext, v: &Vector) -> Result<Matrix> {
    let policy = rep.policy();
    if v.len() != rep.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "shape_operator direction".into(),
            expected: rep.ambient_dim(),
            found: v.len(),
        });
    }
    let residual = ctx.orbit_tangent.project(v).norm();
    if residual > policy.containment_tol * v.norm().max(1.0) {
        return Err(Error::NotNormal { residual });
    }
    let m = ctx.orbit_dim();
    if m == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let t = rep.orbit_map(&ctx.p);
    let u = ctx.orbit_tangent.basis();
    let c = pseudo_solve(&t, u, policy.rel_rank_tol)?;
    let b = second_form_coeffs(rep, &ctx.p, v);
    let a = c.transpose() * b * &c;
    Ok((&a + a.transpose()) * 0.5)
}

/// Shape operator extended by zero to an N x N operator on R^N.
pub fn shape_operator_ambient(rep: &LieRep, ctx: &PointContext, v: &Vector) -> Result<Matrix> {
    let a = shape_operator(rep, ctx, v)?;
    let u = ctx.orbit_tangent.basis();
    Ok(u * a * u.transpose())
}

/// `t -> a + t b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineField {
    pub a: Vector,
    pub b: Vector,
}

impl AffineField {
    pub fn at(&self, t: f64) -> Vector {
        &self.a + &self.b * t
    }
}

#[derive(Clone, Debug)]
pub struct JacobiTriple {
    pub j0: AffineField,
    pub jd: AffineField,
    pub je: AffineField,
    /// Largest `|<JE(t), s>|` over the sampled `t` and unit `s` in the section.
    pub section_orthogonality: f64,
    /// Largest `|<(J0 + JD)(t), JE(t)>|` over the sampled `t`.
    pub split_orthogonality: f64,
}

/// D = T ∩ Σ and E = T ∩ Σ^⊥ at a point.
pub fn tangent_split(ctx: &PointContext, sigma: &Subspace, policy: &TolerancePolicy) -> Result<(Subspace, Subspace)> {
    let d = subspace_intersect(&ctx.orbit_tangent, sigma, policy)?;
    let e = subspace_intersect(&ctx.orbit_tangent, &complement(sigma, policy), policy)?;
    Ok((d, e))
}

/// Splits the orbit-Jacobi field `t -> a + t b` along the normal geodesic
/// `t -> p + t v` into `J0 + JD + JE`.
pub fn jacobi_split(
    rep: &LieRep,
    sigma: &Subspace,
    ctx: &PointContext,
    v: &Vector,
    a: &Vector,
    b: &Vector,
) -> Result<JacobiTriple> {
    let policy = rep.policy();
    let n = rep.ambient_dim();
    for (name, x) in [("v", v), ("a", a), ("b", b)] {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                context: format!("jacobi_split {name}"),
                expected: n,
                found: x.len(),
            });
        }
        check_finite_vec(x, "jacobi_split")?;
    }
    let scale = |x: &Vector| policy.containment_tol * x.norm().max(1.0);
    if !ctx.regular {
        return Err(Error::NotRegular);
    }
    let anchor = sigma.vector_residual(&ctx.p);
    if anchor > scale(&ctx.p) {
        return Err(Error::AnchorNotInSection { residual: anchor });
    }
    let v_res = ctx.orbit_tangent.project(v).norm().max(sigma.vector_residual(v));
    if v_res > scale(v) {
        return Err(Error::Precondition {
            what: "v must lie in the normal space and in the section".into(),
            residual: v_res,
        });
    }
    let a_res = ctx.normal.project(a).norm();
    if a_res > scale(a) {
        return Err(Error::Precondition {
            what: "a must be tangent to the orbit".into(),
            residual: a_res,
        });
    }
    let shape = shape_operator_ambient(rep, ctx, v)?;
    let b_res = ctx.orbit_tangent.project(&(b + &shape * a)).norm();
    if b_res > scale(b) {
        return Err(Error::Precondition {
            what: "b + A_v a must be normal to the orbit".into(),
            residual: b_res,
        });
    }
    let (dsp, esp) = tangent_split(ctx, sigma, policy)?;
    let deficit = ctx.orbit_dim() as i64 - (dsp.dim() + esp.dim()) as i64;
    if deficit != 0 {
        return Err(Error::Decomposition {
            deficit: deficit.unsigned_abs() as usize,
            residual: 0.0,
        });
    }
    let ad = dsp.project(a);
    let ae = esp.project(a);
    let jd = AffineField {
        b: -(&shape * &ad),
        a: ad,
    };
    let je = AffineField {
        b: -(&shape * &ae),
        a: ae,
    };
    let j0 = AffineField {
        a: Vector::zeros(n),
        b: b + &shape * a,
    };
    let mut section_orthogonality: f64 = 0.0;
    let mut split_orthogonality: f64 = 0.0;
    for k in 0..10 {
        let t = -1.0 + 2.0 * k as f64 / 9.0;
        let e_t = je.at(t);
        section_orthogonality = section_orthogonality.max((sigma.basis().transpose() * &e_t).amax());
        split_orthogonality = split_orthogonality.max((j0.at(t) + jd.at(t)).dot(&e_t).abs());
    }
    Ok(JacobiTriple {
        j0,
        jd,
        je,
        section_orthogonality,
        split_orthogonality,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub distance: f64,
    /// Best distance after each restart.
    pub history: Vec<f64>,
    /// Best value unchanged over the second half of the restarts.
    pub stable: bool,
    pub budget: usize,
    pub seed: u64,
}

/// Upper-bound estimate of `min_g |g p - q|` from `budget` restarts of a
/// local search over every supplied component of the group.
pub fn orbit_distance(rep: &LieRep, p: &Vector, q: &Vector, budget: usize, seed: u64) -> DistanceEstimate {
    let budget = budget.max(1);
    let (values, _) = multistart(rep, p, None, q, &all_components(rep), budget, seed);
    let mut history = Vec::with_capacity(budget);
    let mut best = f64::INFINITY;
    for f in values {
        best = best.min((2.0 * f).max(0.0).sqrt());
        history.push(best);
    }
    let half = history[(budget - 1) / 2];
    let stable = half - best <= 1e-9;
    DistanceEstimate {
        distance: best,
        history,
        stable,
        budget,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_relative_eq;

    fn e(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn so3_at_e1() {
        let rep = catalog::so_n_copies(3, 1);
        let ctx = analyze_point(&rep, &e(3, 0)).unwrap();
        assert_eq!(ctx.orbit_dim(), 2);
        assert_eq!(ctx.isotropy_alg.dim(), 1);
        assert!(ctx.orbit_tangent.distance(&Subspace::coordinate(3, &[1, 2])) < 1e-12);
        assert!(ctx.normal.distance(&Subspace::coordinate(3, &[0])) < 1e-12);
    }

    #[test]
    fn origin_has_full_isotropy() {
        let rep = catalog::so_n_copies(4, 2);
        let ctx = analyze_point(&rep, &Vector::zeros(8)).unwrap();
        assert_eq!(ctx.orbit_dim(), 0);
        assert_eq!(ctx.isotropy_alg.dim(), 6);
        assert_eq!(ctx.normal.dim(), 8);
    }

    #[test]
    fn so4_two_copies_dims() {
        let rep = catalog::so_n_copies(4, 2);
        let mut p = Vector::zeros(8);
        p[0] = 1.0;
        p[5] = 1.0;
        let ctx = analyze_point(&rep, &p).unwrap();
        assert_eq!(ctx.orbit_dim(), 5);
        assert_eq!(ctx.isotropy_alg.dim(), 1);

        let reg = find_regular(&rep, 100, 3).unwrap();
        assert!(reg.regular);
        assert_eq!(reg.orbit_dim(), 5);
        assert_eq!(cohomogeneity(&rep, reg.certificate.as_ref().unwrap()), 3);
    }

    #[test]
    fn trivial_and_so3_regular() {
        let t = catalog::trivial(4);
        let ctx = find_regular(&t, 5, 0).unwrap();
        assert_eq!(ctx.orbit_dim(), 0);
        assert!(ctx.regular);
        let so3 = catalog::so_n_copies(3, 1);
        let ctx = find_regular(&so3, 10, 0).unwrap();
        assert_eq!(ctx.orbit_dim(), 2);
        assert_eq!(cohomogeneity(&so3, ctx.certificate.as_ref().unwrap()), 1);
    }

    #[test]
    fn slice_reps() {
        let so3 = catalog::so_n_copies(3, 1);
        let at_zero = analyze_point(&so3, &Vector::zeros(3)).unwrap();
        let s = slice_rep(&so3, &at_zero).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.ambient_dim(), 3);

        let reg = find_regular(&so3, 10, 1).unwrap();
        assert_eq!(slice_rep(&so3, &reg).unwrap().dim(), 0);

        // SO(4) on 2R^4 at (e1, 0): so(3) on R^4 + R^1.
        let so4 = catalog::so_n_copies(4, 2);
        let ctx = analyze_point(&so4, &e(8, 0)).unwrap();
        let s = slice_rep(&so4, &ctx).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.ambient_dim(), 5);
        // R^4 of the second copy splits as standard R^3 plus a line, and the
        // first copy contributes another fixed line.
        let stack = Matrix::from_rows(
            &s.generators()
                .iter()
                .flat_map(|g| g.row_iter().map(|r| r.into_owned()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        let kernel = crate::numkernel::null_space(&stack, s.policy()).unwrap();
        assert_eq!(kernel.dim(), 2);
    }

    #[test]
    fn sphere_shape_operator() {
        let rep = catalog::so_n_copies(3, 1);
        let ctx = analyze_point(&rep, &e(3, 0)).unwrap();
        let a = shape_operator(&rep, &ctx, &e(3, 0)).unwrap();
        assert_relative_eq!(a, -Matrix::identity(2, 2), epsilon = 1e-12);
        let z = shape_operator(&rep, &ctx, &Vector::zeros(3)).unwrap();
        assert_eq!(z, Matrix::zeros(2, 2));
        assert!(matches!(
            shape_operator(&rep, &ctx, &e(3, 1)),
            Err(Error::NotNormal { .. })
        ));
    }

    #[test]
    fn sphere_distances() {
        let rep = catalog::so_n_copies(3, 1);
        let p = e(3, 0);
        assert!(orbit_distance(&rep, &p, &p, 1, 0).distance < 1e-12);
        let est = orbit_distance(&rep, &p, &(e(3, 1) * 2.0), 6, 0);
        assert!((est.distance - 1.0).abs() < 1e-9);
        assert!(est.stable);
        assert!(est.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn distance_monotone_in_budget() {
        let rep = catalog::so_n_copies(4, 2);
        let p = Vector::from_fn(8, |i, _| (i as f64 * 0.7).sin());
        let q = Vector::from_fn(8, |i, _| (i as f64 * 1.3).cos());
        let small = orbit_distance(&rep, &p, &q, 4, 7);
        let large = orbit_distance(&rep, &p, &q, 12, 7);
        assert!(large.distance <= small.distance);
        assert_eq!(&large.history[..4], &small.history[..]);
    }

    #[test]
    fn jacobi_sphere_cases() {
        let rep = catalog::so_n_copies(3, 1);
        let ctx = find_regular(&rep, 10, 0).unwrap();
        let ctx = analyze_point(&rep, &e(3, 0))
            .unwrap()
            .certified(ctx.certificate.as_ref().unwrap());
        let sigma = Subspace::coordinate(3, &[0]);
        let v = e(3, 0);
        // a = 0, b normal: pure J0.
        let t = jacobi_split(&rep, &sigma, &ctx, &v, &Vector::zeros(3), &e(3, 0)).unwrap();
        assert_eq!(t.jd.a.norm() + t.jd.b.norm() + t.je.a.norm() + t.je.b.norm(), 0.0);
        assert_relative_eq!(t.j0.b, e(3, 0), epsilon = 1e-14);
        // Polar: everything tangent is E.
        let a = e(3, 1);
        let shape = shape_operator_ambient(&rep, &ctx, &v).unwrap();
        let b = -(&shape * &a);
        let t = jacobi_split(&rep, &sigma, &ctx, &v, &a, &b).unwrap();
        assert!(t.j0.b.norm() < 1e-12);
        assert_relative_eq!(t.je.a, a, epsilon = 1e-12);
        assert!(t.section_orthogonality < 1e-12);
    }
}
