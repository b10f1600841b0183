//! Fat sections of linear actions: canonical sections, copolarity, axiom
//! checks, reductions and the identities tying them together.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::descent::{all_components, multistart};
use crate::error::{Error, Result};
use crate::liealg::{sample_subgroup_element, stream_rng, LieRep};
use crate::numkernel::{
    complement, null_space, rank_split, spectral_norm, subspace_intersect, Matrix, Subspace, Vector,
};
use crate::orbits::{
    analyze_point, certify_principal_orbit, discrete_isotropy, find_regular, orthogonalize,
    shape_operator_ambient, slice_rep_with, tangent_split, PointContext, RegularityCertificate,
    SearchConfig,
};

/// Tolerance of the Monte-Carlo axiom residuals.
pub const AXIOM_TOL: f64 = 1e-6;
/// Tolerance of the shape-operator and decomposition residuals.
pub const GEOMETRY_TOL: f64 = 1e-8;
/// Upper bound on the number of Weyl group components collected.
pub const MAX_WEYL_COMPONENTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionSource {
    Canonical,
    UserSupplied,
}

#[derive(Clone, Debug)]
pub struct SectionCandidate {
    pub sigma: Subspace,
    pub source: SectionSource,
    /// Number of discrete isotropy elements intersected into the section.
    pub discrete_used: usize,
}

impl SectionCandidate {
    pub fn user_supplied(sigma: Subspace) -> Self {
        Self {
            sigma,
            source: SectionSource::UserSupplied,
            discrete_used: 0,
        }
    }
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Common fixed space of a family of matrices inside `within`.
fn fixed_within(maps: &[Matrix], within: &Subspace, rep: &LieRep) -> Result<Subspace> {
    if maps.is_empty() || within.dim() == 0 {
        return Ok(within.clone());
    }
    let n = within.ambient_dim();
    let b = within.basis();
    let mut stacked = Matrix::zeros(n * maps.len(), within.dim());
    for (k, m) in maps.iter().enumerate() {
        stacked.rows_mut(k * n, n).copy_from(&(m * b));
    }
    let local = null_space(&stacked, rep.policy())?;
    Subspace::span(&(b * local.basis()), rep.policy())
}

fn anchor_check(sigma: &Subspace, p: &Vector, tol: f64) -> Result<()> {
    let residual = sigma.vector_residual(p);
    if residual > tol * p.norm().max(1.0) {
        return Err(Error::AnchorNotInSection { residual });
    }
    Ok(())
}

/// Fixed space of the isotropy at a regular point: the common kernel of
/// the isotropy algebra, cut down by any discrete isotropy the search finds.
pub fn canonical_section(rep: &LieRep, ctx: &PointContext) -> Result<SectionCandidate> {
    canonical_section_with(rep, ctx, &SearchConfig::default())
}

pub fn canonical_section_with(rep: &LieRep, ctx: &PointContext, cfg: &SearchConfig) -> Result<SectionCandidate> {
    if !ctx.regular {
        return Err(Error::NotRegular);
    }
    let n = rep.ambient_dim();
    let iso: Vec<Matrix> = ctx
        .isotropy_alg
        .basis()
        .column_iter()
        .map(|c| rep.element(&c.into_owned()))
        .collect();
    let fix = fixed_within(&iso, &Subspace::full(n), rep)?;
    let id = Matrix::identity(n, n);
    let discrete: Vec<Matrix> = discrete_isotropy(rep, &ctx.p, cfg)
        .into_iter()
        .map(|h| h - &id)
        .collect();
    let sigma = fixed_within(&discrete, &fix, rep)?;
    Ok(SectionCandidate {
        sigma,
        source: SectionSource::Canonical,
        discrete_used: discrete.len(),
    })
}

/// `dim(T_p(G·p) ∩ Σ)` at the regular anchor `ctx.p ∈ Σ`.
pub fn copolarity(rep: &LieRep, cand: &SectionCandidate, ctx: &PointContext) -> Result<usize> {
    if !ctx.regular {
        return Err(Error::NotRegular);
    }
    anchor_check(&cand.sigma, &ctx.p, rep.policy().containment_tol)?;
    Ok(subspace_intersect(&ctx.orbit_tangent, &cand.sigma, rep.policy())?.dim())
}

/// Gaussian point of Σ, certified against `cert`.
pub fn regular_point_in(rep: &LieRep, sigma: &Subspace, cert: &RegularityCertificate, seed: u64) -> Result<PointContext> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..16 {
        let p = sigma.basis() * gaussian(sigma.dim(), &mut rng);
        let ctx = analyze_point(rep, &p)?.certified(cert);
        if ctx.regular {
            return Ok(ctx);
        }
        last = Some(ctx);
    }
    Ok(last.expect("sixteen attempts"))
}

/// `{X : X Σ ⊆ Σ}` as a subspace of the coefficient space.
pub fn normalizer_alg(rep: &LieRep, sigma: &Subspace) -> Result<Subspace> {
    let n = rep.ambient_dim();
    let perp = Matrix::identity(n, n) - sigma.projector();
    coefficient_kernel(rep, |x| &perp * x * sigma.basis())
}

/// `{X : X v = 0 for all v ∈ Σ}`.
pub fn centralizer_alg(rep: &LieRep, sigma: &Subspace) -> Result<Subspace> {
    coefficient_kernel(rep, |x| x * sigma.basis())
}

fn coefficient_kernel(rep: &LieRep, f: impl Fn(&Matrix) -> Matrix) -> Result<Subspace> {
    let d = rep.dim();
    if d == 0 {
        return Ok(Subspace::zero(0));
    }
    let images: Vec<Vector> = rep
        .generators()
        .iter()
        .map(|x| {
            let m = f(x);
            Vector::from_iterator(m.len(), m.iter().copied())
        })
        .collect();
    null_space(&Matrix::from_columns(&images), rep.policy())
}

/// Axiom verdicts with residuals. (A) holds for every linear subspace;
/// (D) is only checked on the subgroup generated by the normalizer algebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub a: Check,
    pub b: Check,
    pub c: Check,
    pub d: Check,
    pub d_fully_verified: bool,
    pub regular_samples: usize,
    pub samples: usize,
    pub seed: u64,
}

impl AxiomReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }
}

/// Smallest `|(I - P_Σ) g q|` found over the group.
pub fn distance_to_section(rep: &LieRep, sigma: &Subspace, q: &Vector, cfg: &SearchConfig) -> (f64, Matrix) {
    let n = rep.ambient_dim();
    let perp = Matrix::identity(n, n) - sigma.projector();
    let zero = Vector::zeros(n);
    let (values, g) = multistart(rep, q, Some(&perp), &zero, &all_components(rep), cfg.restarts.max(1), cfg.seed);
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    ((2.0 * best).max(0.0).sqrt(), g)
}

pub fn verify_axioms(rep: &LieRep, cand: &SectionCandidate, samples: usize, seed: u64) -> Result<AxiomReport> {
    let samples = samples.max(1);
    let n = rep.ambient_dim();
    let sigma = &cand.sigma;
    let cert = certify_principal_orbit(rep, samples.max(100), seed)?;

    // (B): every orbit meets Σ.
    let mut b_res: f64 = 0.0;
    for i in 0..samples {
        let mut rng = stream_rng(seed, 1_000_000 + i as u64);
        let q = gaussian(n, &mut rng);
        let cfg = SearchConfig {
            seed: seed.wrapping_add(i as u64),
            restarts: 4,
        };
        let (dist, _) = distance_to_section(rep, sigma, &q, &cfg);
        b_res = b_res.max(dist / q.norm().max(1.0));
    }

    // (C): normal spaces at regular points of Σ lie in Σ.
    let mut c_res: f64 = 0.0;
    let mut regular = 0;
    let mut rng = stream_rng(seed, 2);
    let mut regular_points = Vec::new();
    for _ in 0..samples {
        let p = sigma.basis() * gaussian(sigma.dim(), &mut rng);
        let ctx = analyze_point(rep, &p)?.certified(&cert);
        if ctx.regular {
            regular += 1;
            c_res = c_res.max(sigma.containment_residual(&ctx.normal));
            regular_points.push(ctx);
        }
    }

    // (D) surrogate: the normalizer subgroup maps Σ to itself and contains
    // the isotropy algebras of regular points of Σ.
    let norm = normalizer_alg(rep, sigma)?;
    let perp = Matrix::identity(n, n) - sigma.projector();
    let mut d_res: f64 = 0.0;
    let radius = rep.sampling_radius();
    for _ in 0..samples.min(50) {
        let g = sample_subgroup_element(rep, &norm, radius, &mut rng);
        d_res = d_res.max(spectral_norm(&(&perp * g * sigma.basis())));
    }
    for ctx in regular_points.iter().take(50) {
        d_res = d_res.max(norm.containment_residual(&ctx.isotropy_alg));
    }

    let c_check = if regular == 0 {
        Check::flag("axiom_c_normal_in_section", false)
    } else {
        Check::below("axiom_c_normal_in_section", c_res, AXIOM_TOL)
    };
    Ok(AxiomReport {
        a: Check::flag("axiom_a_complete_totally_geodesic", true),
        b: Check::below("axiom_b_meets_all_orbits", b_res, AXIOM_TOL),
        c: c_check,
        d: Check::below("axiom_d_normalizer_surrogate", d_res, AXIOM_TOL),
        d_fully_verified: false,
        regular_samples: regular,
        samples,
        seed,
    })
}

#[derive(Clone, Debug)]
pub struct ReductionData {
    pub sigma: Subspace,
    pub normalizer_alg: Subspace,
    pub centralizer_alg: Subspace,
    pub weyl_dim: usize,
    /// The identity component of the Weyl group acting on Σ (in the
    /// coordinates of `sigma.basis()`), with found representatives of
    /// further components as discrete elements.
    pub reduced_rep: LieRep,
    /// Coefficient subspace of g whose restrictions generate `reduced_rep`.
    pub effective_alg: Subspace,
}

impl ReductionData {
    pub fn weyl_components(&self) -> usize {
        1 + self.reduced_rep.discrete_elements().len()
    }

    /// Coordinates of an ambient point of Σ.
    pub fn to_section(&self, p: &Vector) -> Vector {
        self.sigma.coordinates(p)
    }

    pub fn from_section(&self, x: &Vector) -> Vector {
        self.sigma.basis() * x
    }
}

pub fn reduction(rep: &LieRep, cand: &SectionCandidate) -> Result<ReductionData> {
    reduction_with(rep, cand, &SearchConfig { seed: 0, restarts: 16 })
}

/// Normalizer, centralizer and the reduced action on Σ. Components of the
/// Weyl group are found by driving random group elements back into Σ at a
/// generic point and identifying the results up to the identity component.
pub fn reduction_with(rep: &LieRep, cand: &SectionCandidate, cfg: &SearchConfig) -> Result<ReductionData> {
    let sigma = cand.sigma.clone();
    let policy = rep.policy();
    let norm = normalizer_alg(rep, &sigma)?;
    let cent = centralizer_alg(rep, &sigma)?;
    let residual = norm.containment_residual(&cent);
    if residual > policy.containment_tol {
        return Err(Error::NotSubalgebra {
            which: "centralizer not inside normalizer".into(),
            residual,
        });
    }
    let (identity_part, effective) = rep.restrict(&norm, &sigma, Vec::new())?;
    let weyl_dim = norm.dim() - cent.dim();
    let components = weyl_components(rep, &sigma, &identity_part, cfg)?;
    let reduced_rep = identity_part.with_discrete_elements(components)?;
    Ok(ReductionData {
        sigma,
        normalizer_alg: norm,
        centralizer_alg: cent,
        weyl_dim,
        reduced_rep,
        effective_alg: effective,
    })
}

fn weyl_components(rep: &LieRep, sigma: &Subspace, w0: &LieRep, cfg: &SearchConfig) -> Result<Vec<Matrix>> {
    let k = sigma.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = rep.ambient_dim();
    let mut rng = stream_rng(cfg.seed, u64::MAX);
    let x = gaussian(k, &mut rng);
    let p = sigma.basis() * &x;
    let perp = Matrix::identity(n, n) - sigma.projector();
    let zero = Vector::zeros(n);
    let tol = rep.policy().containment_tol * p.norm().max(1.0);
    let id_k = [Matrix::identity(k, k)];
    let mut found: Vec<Matrix> = Vec::new();
    let comps = all_components(rep);
    for r in 0..cfg.restarts.max(1) {
        for (c, delta) in comps.iter().enumerate() {
            // Start from a random element in the component and descend to
            // the set of g with g p ∈ Σ.
            let mut srng = stream_rng(cfg.seed, (r * comps.len() + c) as u64);
            let start = crate::liealg::sample_element_with(rep, rep.sampling_radius(), &mut srng);
            let shifted = delta * &p;
            let (g, f) = crate::descent::descend(
                rep,
                &crate::descent::Objective {
                    x0: &shifted,
                    proj: Some(&perp),
                    target: &zero,
                },
                start,
            );
            if (2.0 * f).sqrt() > tol {
                continue;
            }
            let full = g * delta;
            let restricted = orthogonalize(&(sigma.basis().transpose() * full * sigma.basis()));
            let image = &restricted * &x;
            let known = std::iter::once(Matrix::identity(k, k))
                .chain(found.iter().cloned())
                .any(|m| {
                    let (vals, _) = multistart(w0, &image, None, &(&m * &x), &id_k, 4, cfg.seed);
                    let best = vals.iter().copied().fold(f64::INFINITY, f64::min);
                    (2.0 * best).sqrt() <= tol
                });
            if !known {
                found.push(restricted);
                if found.len() + 1 >= MAX_WEYL_COMPONENTS {
                    return Ok(found);
                }
            }
        }
    }
    Ok(found)
}

/// D = T ∩ Σ and E = T ∩ Σ^⊥ at a point of Σ.
#[derive(Clone, Debug)]
pub struct DeSplit {
    pub d: Subspace,
    pub e: Subspace,
    pub orthogonality: f64,
}

pub fn de_decompose(rep: &LieRep, cand: &SectionCandidate, q: &Vector) -> Result<DeSplit> {
    let policy = rep.policy();
    anchor_check(&cand.sigma, q, policy.containment_tol)?;
    let ctx = analyze_point(rep, q)?;
    let (d, e) = tangent_split(&ctx, &cand.sigma, policy)?;
    let orthogonality = (d.basis().transpose() * e.basis()).amax();
    let total = d.dim() + e.dim();
    if total != ctx.orbit_dim() || orthogonality > GEOMETRY_TOL {
        return Err(Error::Decomposition {
            deficit: ctx.orbit_dim().abs_diff(total),
            residual: orthogonality,
        });
    }
    Ok(DeSplit { d, e, orthogonality })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TotallyGeodesicReport {
    pub directions: usize,
    pub d_dim: usize,
    pub e_dim: usize,
    pub d_invariance: Check,
    pub e_invariance: Check,
}

impl TotallyGeodesicReport {
    pub fn passed(&self) -> bool {
        self.d_invariance.passed && self.e_invariance.passed
    }
}

/// Shape operators in directions of `ν_q ∩ Σ` must preserve D and E.
pub fn check_totally_geodesic(rep: &LieRep, cand: &SectionCandidate, ctx: &PointContext) -> Result<TotallyGeodesicReport> {
    let policy = rep.policy();
    anchor_check(&cand.sigma, &ctx.p, policy.containment_tol)?;
    let (d, e) = tangent_split(ctx, &cand.sigma, policy)?;
    let dirs = subspace_intersect(&ctx.normal, &cand.sigma, policy)?;
    let n = rep.ambient_dim();
    let id = Matrix::identity(n, n);
    let (pd, pe) = (d.projector(), e.projector());
    let mut d_res: f64 = 0.0;
    let mut e_res: f64 = 0.0;
    for eta in dirs.basis().column_iter() {
        let a = shape_operator_ambient(rep, ctx, &eta.into_owned())?;
        d_res = d_res.max(spectral_norm(&((&id - &pd) * &a * &pd)));
        e_res = e_res.max(spectral_norm(&((&id - &pe) * &a * &pe)));
    }
    Ok(TotallyGeodesicReport {
        directions: dirs.dim(),
        d_dim: d.dim(),
        e_dim: e.dim(),
        d_invariance: Check::below("shape_operator_preserves_d", d_res, GEOMETRY_TOL),
        e_invariance: Check::below("shape_operator_preserves_e", e_res, GEOMETRY_TOL),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceSample {
    pub point: Vec<f64>,
    pub g_orbit_dim: usize,
    pub w_orbit_dim: usize,
    pub g_regular: bool,
    pub w_regular: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityEquivalenceReport {
    pub samples: usize,
    pub seed: u64,
    pub g_principal_dim: usize,
    pub w_principal_dim: usize,
    pub g_regular_count: usize,
    pub w_regular_count: usize,
    pub counterexamples: Vec<EquivalenceSample>,
}

impl RegularityEquivalenceReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Number of supplied non-identity components meeting the isotropy at q.
fn discrete_isotropy_count(rep: &LieRep, q: &Vector, cfg: &SearchConfig) -> usize {
    if rep.discrete_elements().is_empty() {
        return 0;
    }
    discrete_isotropy(rep, q, cfg).len()
}

fn regular_with_components(
    rep: &LieRep,
    q: &Vector,
    principal: usize,
    generic_components: usize,
    cfg: &SearchConfig,
) -> Result<(usize, bool)> {
    let dim = analyze_point(rep, q)?.orbit_dim();
    if dim != principal {
        return Ok((dim, false));
    }
    Ok((dim, discrete_isotropy_count(rep, q, cfg) == generic_components))
}

/// Sample points of Σ: the origin, generic points, and points of Σ fixed by
/// single generators (typically singular).
pub fn section_samples(rep: &LieRep, sigma: &Subspace, samples: usize, seed: u64) -> Result<Vec<Vector>> {
    let n = rep.ambient_dim();
    let mut rng = stream_rng(seed, 3);
    let mut fixed: Vec<Subspace> = Vec::new();
    for x in rep.generators() {
        let f = fixed_within(std::slice::from_ref(x), sigma, rep)?;
        if f.dim() > 0 && f.dim() < sigma.dim() {
            fixed.push(f);
        }
    }
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let q = if i == 0 {
            Vector::zeros(n)
        } else if i % 4 == 0 && !fixed.is_empty() {
            let f = &fixed[(i / 4) % fixed.len()];
            f.basis() * gaussian(f.dim(), &mut rng)
        } else {
            sigma.basis() * gaussian(sigma.dim(), &mut rng)
        };
        out.push(q);
    }
    Ok(out)
}

/// Compares G-regularity with regularity for the reduced action at sample
/// points of Σ. Regularity means maximal orbit dimension and, when the
/// group has supplied components, the generic number of components meeting
/// the isotropy.
pub fn regularity_equivalence(rep: &LieRep, red: &ReductionData, samples: usize, seed: u64) -> Result<RegularityEquivalenceReport> {
    let g_cert = certify_principal_orbit(rep, 200, seed)?;
    let w = &red.reduced_rep;
    let w_cert = certify_principal_orbit(w, 200, seed)?;
    let cfg = SearchConfig { seed, restarts: 6 };
    let generic = regular_point_in(rep, &red.sigma, &g_cert, seed)?;
    let g_generic = discrete_isotropy_count(rep, &generic.p, &cfg);
    let w_generic = discrete_isotropy_count(w, &red.to_section(&generic.p), &cfg);

    let points = section_samples(rep, &red.sigma, samples, seed)?;
    let mut report = RegularityEquivalenceReport {
        samples: points.len(),
        seed,
        g_principal_dim: g_cert.principal_orbit_dim,
        w_principal_dim: w_cert.principal_orbit_dim,
        g_regular_count: 0,
        w_regular_count: 0,
        counterexamples: Vec::new(),
    };
    for q in points {
        let (gd, greg) = regular_with_components(rep, &q, g_cert.principal_orbit_dim, g_generic, &cfg)?;
        let x = red.to_section(&q);
        let (wd, wreg) = regular_with_components(w, &x, w_cert.principal_orbit_dim, w_generic, &cfg)?;
        report.g_regular_count += greg as usize;
        report.w_regular_count += wreg as usize;
        if greg != wreg {
            report.counterexamples.push(EquivalenceSample {
                point: q.iter().copied().collect(),
                g_orbit_dim: gd,
                w_orbit_dim: wd,
                g_regular: greg,
                w_regular: wreg,
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub copolarity: usize,
    pub reduced_copolarity: usize,
    pub sigma_dim: usize,
    pub cohomogeneity: usize,
    pub weyl_dim: usize,
    pub copolarity_check: Check,
    pub dimension_check: Check,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.copolarity_check.passed && self.dimension_check.passed
    }
}

/// Copolarity of the reduced action against the original, and
/// `dim Σ = cohomogeneity + copolarity`.
pub fn stability_check(rep: &LieRep, red: &ReductionData, cfg: &SearchConfig) -> Result<StabilityReport> {
    let cert = certify_principal_orbit(rep, 200, cfg.seed)?;
    let cand = SectionCandidate::user_supplied(red.sigma.clone());
    let ctx = regular_point_in(rep, &red.sigma, &cert, cfg.seed)?;
    let copol = copolarity(rep, &cand, &ctx)?;
    let w_ctx = find_regular(&red.reduced_rep, 200, cfg.seed)?;
    let w_cand = canonical_section_with(&red.reduced_rep, &w_ctx, cfg)?;
    let w_copol = copolarity(&red.reduced_rep, &w_cand, &w_ctx)?;
    let cohom = rep.ambient_dim() - cert.principal_orbit_dim;
    Ok(StabilityReport {
        copolarity: copol,
        reduced_copolarity: w_copol,
        sigma_dim: red.sigma.dim(),
        cohomogeneity: cohom,
        weyl_dim: red.weyl_dim,
        copolarity_check: Check::equal("reduced_copolarity_equals_copolarity", w_copol, copol),
        dimension_check: Check::equal("section_dim_equals_cohomogeneity_plus_copolarity", red.sigma.dim(), cohom + copol),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceEntry {
    pub point: Vec<f64>,
    pub orbit_dim: usize,
    pub slice_dim: usize,
    pub slice_algebra_dim: usize,
    pub slice_copolarity: usize,
    /// Largest containment residual of slice normal spaces in ν_q ∩ Σ;
    /// `None` if no slice-regular sample was found there.
    pub presection_residual: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceInequalityReport {
    pub copolarity: usize,
    pub entries: Vec<SliceEntry>,
}

impl SliceInequalityReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

/// Slice copolarity at each point against the global copolarity, plus the
/// normal-space condition for `ν_q ∩ Σ` inside the slice representation.
pub fn slice_inequality(
    rep: &LieRep,
    cand: &SectionCandidate,
    points: &[Vector],
    cfg: &SearchConfig,
) -> Result<SliceInequalityReport> {
    let policy = rep.policy();
    let cert = certify_principal_orbit(rep, 200, cfg.seed)?;
    let anchor = regular_point_in(rep, &cand.sigma, &cert, cfg.seed)?;
    let global = copolarity(rep, cand, &anchor)?;
    let mut entries = Vec::with_capacity(points.len());
    for (i, q) in points.iter().enumerate() {
        anchor_check(&cand.sigma, q, policy.containment_tol)?;
        let ctx = analyze_point(rep, q)?;
        let slice = slice_rep_with(rep, &ctx, cfg)?;
        let s_ctx = find_regular(&slice, 100, cfg.seed.wrapping_add(i as u64))?;
        let s_cert = s_ctx.certificate.clone().expect("find_regular certifies");
        let s_cand = canonical_section_with(&slice, &s_ctx, cfg)?;
        let s_copol = copolarity(&slice, &s_cand, &s_ctx)?;

        // ν_q ∩ Σ in the coordinates of the normal basis.
        let v_amb = subspace_intersect(&ctx.normal, &cand.sigma, policy)?;
        let v_loc = Subspace::span(&(ctx.normal.basis().transpose() * v_amb.basis()), policy)?;
        let mut rng = stream_rng(cfg.seed, 10_000 + i as u64);
        let mut worst: Option<f64> = None;
        for _ in 0..8 {
            let x = v_loc.basis() * gaussian(v_loc.dim(), &mut rng);
            let sc = analyze_point(&slice, &x)?.certified(&s_cert);
            if sc.regular {
                let r = v_loc.containment_residual(&sc.normal);
                worst = Some(worst.map_or(r, |w: f64| w.max(r)));
            }
        }
        let presection_ok = worst.is_some_and(|w| w < AXIOM_TOL);
        entries.push(SliceEntry {
            point: q.iter().copied().collect(),
            orbit_dim: ctx.orbit_dim(),
            slice_dim: slice.ambient_dim(),
            slice_algebra_dim: slice.dim(),
            slice_copolarity: s_copol,
            presection_residual: worst,
            passed: s_copol <= global && presection_ok,
        });
    }
    Ok(SliceInequalityReport {
        copolarity: global,
        entries,
    })
}

/// Random subspace of R^N (a negative control for the section checks).
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Subspace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Matrix::from_fn(n, k, |_, _| StandardNormal.sample(&mut rng));
    rank_split(&m, &Default::default())
        .expect("finite gaussian")
        .range
}

/// `span{p}` plus `normal_dirs` random normal and `tangent_dirs` random
/// tangent directions at a point: a subspace that contains the point but
/// is not a section.
pub fn mixed_subspace(ctx: &PointContext, normal_dirs: usize, tangent_dirs: usize, seed: u64) -> Result<Subspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols = vec![ctx.p.clone()];
    let nb = ctx.normal.basis();
    let tb = ctx.orbit_tangent.basis();
    for _ in 0..normal_dirs {
        cols.push(nb * gaussian(nb.ncols(), &mut rng));
    }
    for _ in 0..tangent_dirs {
        cols.push(tb * gaussian(tb.ncols(), &mut rng));
    }
    Subspace::span(&Matrix::from_columns(&cols), &Default::default())
}

/// Orthogonal complement of Σ, used for E directions.
pub fn section_complement(cand: &SectionCandidate, rep: &LieRep) -> Subspace {
    complement(&cand.sigma, rep.policy())
}
