use copolarity_core::catalog;
use copolarity_core::numkernel::{mat_exp, Matrix, Subspace, TolerancePolicy, Vector};
use copolarity_core::orbits::{certify_principal_orbit, PointContext};
use copolarity_core::resolution::{group_invariance_residual, local_diffeo_criterion, resolution_isotropy};
use copolarity_core::sections::{
    distance_to_section, random_subspace, regular_point_in, section_samples, stability_check, verify_axioms,
};
use copolarity_core::symmpair::{
    cartan_decompose, gauge_gram, gauge_vectors, hk_orbit_spaces, triple_system, Embedding,
};
use copolarity_core::{
    analyze_point, canonical_section, find_regular, gw_metric, orbit_distance, reduction, sample_element, LieRep,
    SearchConfig, SectionCandidate, TripleDatum,
};

fn canonical(rep: &LieRep) -> (PointContext, SectionCandidate) {
    let ctx = find_regular(rep, 200, 0).unwrap();
    let cand = canonical_section(rep, &ctx).unwrap();
    (ctx, cand)
}

#[test]
fn so5_three_copies_is_stable() {
    let rep = catalog::so_n_copies(5, 3);
    let (_, cand) = canonical(&rep);
    let red = reduction(&rep, &cand).unwrap();
    let report = stability_check(&rep, &red, &SearchConfig::default()).unwrap();
    assert_eq!((report.copolarity, report.reduced_copolarity), (3, 3));
    // 15 - (10 - 1) = 6: the principal isotropy is so(2).
    assert_eq!((report.sigma_dim, report.cohomogeneity), (9, 6));
    assert!(report.passed());
}

#[test]
fn axioms_hold_for_canonical_section() {
    let rep = catalog::so_n_copies(4, 2);
    let (_, cand) = canonical(&rep);
    let report = verify_axioms(&rep, &cand, 200, 1).unwrap();
    assert!(report.b.passed && report.b.residual < 1e-6, "{:?}", report.b);
    assert!(report.c.passed && report.c.residual < 1e-6, "{:?}", report.c);
    assert!(report.d.passed && !report.d_fully_verified);

    let bogus = SectionCandidate::user_supplied(random_subspace(8, 3, 9));
    let report = verify_axioms(&rep, &bogus, 50, 1).unwrap();
    assert!(!report.c.passed && report.c.residual > 0.1);
}

#[test]
fn centralizer_is_principal_isotropy() {
    let rep = catalog::so_n_copies(4, 2);
    let (_, cand) = canonical(&rep);
    let red = reduction(&rep, &cand).unwrap();
    let cert = certify_principal_orbit(&rep, 200, 0).unwrap();
    for seed in 0..10 {
        let ctx = regular_point_in(&rep, &cand.sigma, &cert, seed).unwrap();
        assert!(ctx.regular);
        assert!(red.centralizer_alg.distance(&ctx.isotropy_alg) < 1e-7);
    }
}

#[test]
fn section_intersections_lie_on_reduced_orbits() {
    let rep = catalog::so_n_copies(4, 2);
    let (_, cand) = canonical(&rep);
    let red = reduction(&rep, &cand).unwrap();
    let points = section_samples(&rep, &cand.sigma, 8, 3).unwrap();
    let cfg = SearchConfig { seed: 4, restarts: 8 };
    for (i, q) in points.iter().enumerate().skip(1) {
        let h = sample_element(&rep, 3.0, 100 + i as u64);
        let moved = &h * q;
        let (dist, g) = distance_to_section(&rep, &cand.sigma, &moved, &cfg);
        assert!(dist < 1e-8, "no way back into the section: {dist:e}");
        let back = &g * &moved;
        let d = orbit_distance(&red.reduced_rep, &red.to_section(q), &red.to_section(&back), 16, 5);
        assert!(d.distance < 1e-6, "sample {i}: {:e}", d.distance);
    }
}

#[test]
fn resolved_isotropy_matches_criterion() {
    let rep = catalog::so_n_copies(4, 2);
    let (_, cand) = canonical(&rep);
    let red = reduction(&rep, &cand).unwrap();
    let mut singular_seen = false;
    for q in section_samples(&rep, &cand.sigma, 40, 2).unwrap() {
        let full = analyze_point(&rep, &q).unwrap().isotropy_alg.dim();
        let resolved = resolution_isotropy(&rep, &red, &q).unwrap();
        let crit = local_diffeo_criterion(&rep, &red, &q).unwrap();
        assert!(resolved <= full);
        assert!(crit.forms_agree());
        assert_eq!(resolved == full, crit.holds());
        singular_seen |= !crit.holds();
    }
    assert!(singular_seen, "the origin is always sampled");
}

#[test]
fn invariant_metric_survives_group_sampling() {
    let td = TripleDatum::from_indices(catalog::so3_structure(), &[], &[0], None, TolerancePolicy::default()).unwrap();
    let sol = gw_metric(&td).unwrap();
    assert!(group_invariance_residual(&td, &sol, 50, 7).unwrap() < 1e-8);

    // g = so(3) ⊕ R with n = so(3): the metric must be bi-invariant on the
    // first factor and free on the second.
    let mut tensor = vec![vec![vec![0.0; 4]; 4]; 4];
    let so3 = catalog::so3_structure();
    for (i, slab) in tensor.iter_mut().take(3).enumerate() {
        for (j, row) in slab.iter_mut().take(3).enumerate() {
            for (k, c) in row.iter_mut().take(3).enumerate() {
                *c = so3.get(i, j, k);
            }
        }
    }
    let sc = copolarity_core::StructureConstants::from_tensor(&tensor).unwrap();
    let td = TripleDatum::from_indices(sc, &[3], &[0, 1, 2, 3], None, TolerancePolicy::default()).unwrap();
    let sol = gw_metric(&td).unwrap();
    assert_eq!(td.quotient_dim(), 3);
    assert!(sol.feasible && sol.min_eig > 0.0);
    assert!(group_invariance_residual(&td, &sol, 50, 8).unwrap() < 1e-8);
}

fn su2() -> (copolarity_core::SymPair, Embedding) {
    let ep = catalog::su2_pair();
    let policy = TolerancePolicy::default();
    let pair = cartan_decompose(&ep.structure, &ep.inner, &ep.involution, &policy).unwrap();
    let emb = Embedding::new(ep.embedding, &ep.structure, &policy).unwrap();
    (pair, emb)
}

#[test]
fn gauge_gram_loses_conditioning_with_more_terms() {
    let (pair, _) = su2();
    let ts = triple_system(&pair, pair.p_space().basis()).unwrap();
    let (x, y) = gauge_vectors(&pair, &ts, 2.0 * std::f64::consts::PI).unwrap();
    let mut last = f64::INFINITY;
    for n in 1..=6 {
        let g = gauge_gram(&pair, &ts, &x, &y, n, 64).unwrap();
        assert!(g.paths_agree(), "n = {n}: {:e}", g.discrepancy);
        assert!(g.min_eig_closed_form > 0.0, "n = {n}");
        assert!(g.min_eig_closed_form < last, "n = {n}");
        last = g.min_eig_closed_form;
    }
}

#[test]
fn hk_spaces_for_su2_with_trivial_h() {
    let (pair, emb) = su2();
    let x = Vector::from_vec(vec![0.4, -0.7, 1.1]);
    let g = mat_exp(&emb.matrix(&x)).unwrap();
    let spaces = hk_orbit_spaces(&pair, &emb, &Subspace::zero(3), &g).unwrap();
    assert_eq!((spaces.tangent.dim(), spaces.normal.dim()), (1, 2));
    assert!(spaces.orthogonality < 1e-10);
    assert_eq!(spaces.isotropy_dim, spaces.intersection_dim);

    let not_unitary = Matrix::identity(4, 4) * 1.5;
    assert!(hk_orbit_spaces(&pair, &emb, &Subspace::zero(3), &not_unitary).is_err());
}
