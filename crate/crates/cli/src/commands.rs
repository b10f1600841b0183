use copolarity_core::numkernel::{mat_exp, Matrix, TolerancePolicy, Vector};
use copolarity_core::orbits::{certify_principal_orbit, cohomogeneity, RegularityCertificate};
use copolarity_core::resolution::{
    dimension_audit, group_invariance_residual, local_diffeo_suite, resolution_isotropy,
};
use copolarity_core::sections::{
    canonical_section_with, check_totally_geodesic, de_decompose, regular_point_in, regularity_equivalence,
    section_samples, slice_inequality, stability_check, verify_axioms,
};
use copolarity_core::symmpair::{
    gauge_gram, gauge_vectors, hk_orbit_spaces, ksection_copolarity, tangent_formula_check, triple_system,
};
use copolarity_core::{
    analyze_point, check_closure, copolarity, find_regular, gw_metric, metric_isometry_check, reduction, Check,
    Error, LieRep, PointContext, SearchConfig, SectionCandidate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::Section;
use crate::schema::{parse_point, Input, LinearRepInput, PairData, SymPairInput};
use crate::{CliError, Command, RunConfig};

/// Skewness and group-sampling bound for invariant metrics.
const METRIC_TOL: f64 = 1e-8;
const ISOMETRY_TOL: f64 = 1e-9;
const GRAM_AGREEMENT_TOL: f64 = 1e-8;
const TANGENT_FORMULA_TOL: f64 = 1e-7;
/// Singular points examined by `slice` when no point is given.
const SLICE_POINTS: usize = 10;

pub(crate) fn dispatch(config: &RunConfig, input: &Input, policy: TolerancePolicy) -> Result<Section, CliError> {
    let wrong = || CliError::WrongKind {
        command: config.command.name(),
        kind: input.kind(),
    };
    match (config.command, input) {
        (Command::Analyze, Input::LinearRep(i)) => analyze(config, i, policy),
        (Command::Copolarity, Input::LinearRep(i)) => copolarity_cmd(config, i, policy),
        (Command::Reduce, Input::LinearRep(i)) => reduce(config, i, policy),
        (Command::Slice, Input::LinearRep(i)) => slice(config, i, policy),
        (Command::Verify, Input::LinearRep(i)) => verify(config, i, policy),
        (Command::Resolution, Input::LinearRep(i)) => resolution_rep(config, i, policy),
        (Command::Resolution, Input::TripleDatum(i)) => {
            let td = i.build(policy)?;
            resolution_metric(config, &td)
        }
        (Command::Sympair, Input::SymPair(i)) => sympair(config, i, policy),
        (Command::Gauge, Input::SymPair(i)) => gauge(config, i, policy),
        _ => Err(wrong()),
    }
}

fn vec_json(v: &Vector) -> Value {
    json!(v.iter().copied().collect::<Vec<_>>())
}

fn columns_json(m: &Matrix) -> Value {
    json!(m.column_iter().map(|c| c.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn rows_json(m: &Matrix) -> Value {
    json!(m.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn search(config: &RunConfig) -> SearchConfig {
    SearchConfig {
        seed: config.seed,
        ..SearchConfig::default()
    }
}

/// The analysed section with a regular anchor point in it.
struct Anchored {
    rep: LieRep,
    cert: RegularityCertificate,
    ctx: PointContext,
    cand: SectionCandidate,
}

fn anchored(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Anchored, CliError> {
    let rep = input.build(policy)?;
    let cert = certify_principal_orbit(&rep, 200, config.seed)?;
    let (ctx, cand) = match input.section(&policy)? {
        Some(sigma) => {
            let ctx = regular_point_in(&rep, &sigma, &cert, config.seed)?;
            if !ctx.regular {
                return Err(Error::NotRegular.into());
            }
            (ctx, SectionCandidate::user_supplied(sigma))
        }
        None => {
            let ctx = find_regular(&rep, 200, config.seed)?;
            let cand = canonical_section_with(&rep, &ctx, &search(config))?;
            (ctx, cand)
        }
    };
    Ok(Anchored { rep, cert, ctx, cand })
}

fn section_json(a: &Anchored) -> Value {
    json!({
        "dim": a.cand.sigma.dim(),
        "source": a.cand.source,
        "discrete_elements_used": a.cand.discrete_used,
        "basis": columns_json(a.cand.sigma.basis()),
        "anchor": vec_json(&a.ctx.p),
    })
}

fn analyze(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let rep = input.build(policy)?;
    check_closure(&rep)?;
    let cert = certify_principal_orbit(&rep, config.samples, config.seed)?;
    let ctx = find_regular(&rep, config.samples, config.seed)?;
    let mut results = json!({
        "ambient_dim": rep.ambient_dim(),
        "algebra_dim": rep.dim(),
        "discrete_elements": rep.discrete_elements().len(),
        "principal_orbit_dim": cert.principal_orbit_dim,
        "principal_isotropy_dim": rep.dim() - cert.principal_orbit_dim,
        "cohomogeneity": cohomogeneity(&rep, &cert),
        "regular_point": vec_json(&ctx.p),
    });
    let mut checks = vec![Check::flag("regular_point_found", ctx.regular)];
    if let Some(text) = &config.point {
        let p = parse_point(text, rep.ambient_dim())?;
        let pc = analyze_point(&rep, &p)?.certified(&cert);
        results["point"] = json!({
            "coordinates": vec_json(&p),
            "orbit_dim": pc.orbit_dim(),
            "isotropy_dim": pc.isotropy_alg.dim(),
            "regular": pc.regular,
        });
        checks.push(Check::equal(
            "point_orbit_plus_isotropy_equals_algebra_dim",
            pc.orbit_dim() + pc.isotropy_alg.dim(),
            rep.dim(),
        ));
    }
    Ok(Section { results, checks })
}

fn copolarity_cmd(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let a = anchored(config, input, policy)?;
    let copol = copolarity(&a.rep, &a.cand, &a.ctx)?;
    let red = reduction(&a.rep, &a.cand)?;
    let cohom = cohomogeneity(&a.rep, &a.cert);
    let normal_residual = a.cand.sigma.containment_residual(&a.ctx.normal);
    let results = json!({
        "copolarity": copol,
        "weyl_dim": red.weyl_dim,
        "cohomogeneity": cohom,
        "principal_orbit_dim": a.cert.principal_orbit_dim,
        "section": section_json(&a),
        "minimality_identity_holds": a.cand.sigma.dim() == cohom + red.weyl_dim,
    });
    let checks = vec![
        Check::below("anchor_normal_space_in_section", normal_residual, policy.containment_tol),
        Check::equal("weyl_dim_equals_copolarity", red.weyl_dim, copol),
    ];
    Ok(Section { results, checks })
}

fn reduce(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let a = anchored(config, input, policy)?;
    let red = reduction(&a.rep, &a.cand)?;
    let stability = stability_check(&a.rep, &red, &search(config))?;
    let equivalence = regularity_equivalence(&a.rep, &red, config.samples, config.seed)?;
    let audit = dimension_audit(&a.rep, &red, config.seed)?;
    let reduced = &red.reduced_rep;
    let results = json!({
        "section": section_json(&a),
        "normalizer_dim": red.normalizer_alg.dim(),
        "centralizer_dim": red.centralizer_alg.dim(),
        "weyl_dim": red.weyl_dim,
        "weyl_components_found": red.weyl_components(),
        "reduced_rep": {
            "ambient_dim": reduced.ambient_dim(),
            "generators": reduced.generators().iter().map(rows_json).collect::<Vec<_>>(),
            "discrete_elements": reduced.discrete_elements().iter().map(rows_json).collect::<Vec<_>>(),
        },
        "stability": stability,
        "regularity_equivalence": {
            "samples": equivalence.samples,
            "g_regular": equivalence.g_regular_count,
            "reduced_regular": equivalence.w_regular_count,
            "counterexamples": equivalence.counterexamples,
        },
        "dimension_audit": audit,
    });
    let checks = vec![
        stability.copolarity_check.clone(),
        stability.dimension_check.clone(),
        Check::equal("regularity_counterexamples", equivalence.counterexamples.len(), 0),
        audit.ambient_identity.clone(),
        audit.section_identity.clone(),
    ];
    Ok(Section { results, checks })
}

fn slice(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let a = anchored(config, input, policy)?;
    let points = match &config.point {
        Some(text) => vec![parse_point(text, a.rep.ambient_dim())?],
        None => {
            let mut pts = Vec::new();
            for q in section_samples(&a.rep, &a.cand.sigma, config.samples, config.seed)? {
                if pts.len() == SLICE_POINTS {
                    break;
                }
                if analyze_point(&a.rep, &q)?.orbit_dim() < a.cert.principal_orbit_dim {
                    pts.push(q);
                }
            }
            pts.push(a.ctx.p.clone());
            pts
        }
    };
    let report = slice_inequality(&a.rep, &a.cand, &points, &search(config))?;
    let checks = report
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| Check::flag(format!("slice_{i}_copolarity_bounded_and_presection"), e.passed))
        .collect();
    Ok(Section {
        results: json!({ "section": section_json(&a), "slice_inequality": report }),
        checks,
    })
}

fn verify(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let a = anchored(config, input, policy)?;
    let axioms = verify_axioms(&a.rep, &a.cand, config.samples, config.seed)?;
    let mut checks = axioms.checks();
    let mut results = json!({ "section": section_json(&a), "axioms": axioms });
    match de_decompose(&a.rep, &a.cand, &a.ctx.p) {
        Ok(de) => {
            results["de_split"] = json!({ "d_dim": de.d.dim(), "e_dim": de.e.dim(), "orthogonality": de.orthogonality });
            checks.push(Check::below("de_split_orthogonal", de.orthogonality, 1e-8));
        }
        Err(e @ Error::Decomposition { .. }) => {
            results["de_split"] = json!({ "error": e.to_string() });
            checks.push(Check::flag("de_split_orthogonal", false));
        }
        Err(e) => return Err(e.into()),
    }
    let tg = check_totally_geodesic(&a.rep, &a.cand, &a.ctx)?;
    checks.push(tg.d_invariance.clone());
    checks.push(tg.e_invariance.clone());
    results["totally_geodesic"] = json!(tg);
    Ok(Section { results, checks })
}

fn resolution_rep(config: &RunConfig, input: &LinearRepInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let a = anchored(config, input, policy)?;
    let red = reduction(&a.rep, &a.cand)?;
    let points = section_samples(&a.rep, &a.cand.sigma, config.samples, config.seed)?;
    let suite = local_diffeo_suite(&a.rep, &red, &points)?;
    let mut bounded = true;
    for (q, r) in points.iter().zip(&suite.reports) {
        bounded &= resolution_isotropy(&a.rep, &red, q)? <= r.isotropy_dim;
    }
    let failing: Vec<&Vec<f64>> = suite.reports.iter().filter(|r| !r.holds()).map(|r| &r.point).collect();
    let audit = dimension_audit(&a.rep, &red, config.seed)?;
    let results = json!({
        "section": section_json(&a),
        "points": points.len(),
        "global_certified": suite.global_certified,
        "forms_agree": suite.forms_agree,
        "points_where_criterion_fails": failing,
        "isotropy_at_origin": {
            "full": analyze_point(&a.rep, &Vector::zeros(a.rep.ambient_dim()))?.isotropy_alg.dim(),
            "resolved": resolution_isotropy(&a.rep, &red, &Vector::zeros(a.rep.ambient_dim()))?,
        },
        "dimension_audit": audit,
    });
    let checks = vec![
        Check::flag("criterion_forms_agree", suite.forms_agree),
        Check::flag("resolved_isotropy_bounded", bounded),
        audit.ambient_identity.clone(),
        audit.section_identity.clone(),
    ];
    Ok(Section { results, checks })
}

fn resolution_metric(config: &RunConfig, td: &copolarity_core::TripleDatum) -> Result<Section, CliError> {
    let sol = gw_metric(td)?;
    let iso = metric_isometry_check(td, &sol)?;
    let group = group_invariance_residual(td, &sol, 50, config.seed)?;
    let results = json!({
        "quotient_dim": td.quotient_dim(),
        "metric": sol,
        "isometry": iso,
        "group_invariance_samples": 50,
        "group_invariance_residual": group,
    });
    let checks = vec![
        Check::below("ad_skewness", sol.skew_residual, METRIC_TOL),
        Check::flag("positive_definite", sol.min_eig > 0.0),
        Check::below("quotient_isometry", iso.residual, ISOMETRY_TOL),
        Check::below("group_invariance", group, METRIC_TOL),
    ];
    Ok(Section { results, checks })
}

fn pair_data(input: &SymPairInput, policy: TolerancePolicy) -> Result<PairData, CliError> {
    input.build(policy)
}

fn sympair(config: &RunConfig, input: &SymPairInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let data = pair_data(input, policy)?;
    let pair = &data.pair;
    let ts = triple_system(pair, &data.m_basis)?;
    let ks = ksection_copolarity(&ts);
    let mut results = json!({
        "algebra_dim": pair.dim(),
        "k_dim": pair.k_space().dim(),
        "p_dim": pair.p_space().dim(),
        "triple_system": {
            "m_dim": ts.m.dim(),
            "bracket_dim": ts.bracket_span.dim(),
            "s_dim": ts.s_alg.dim(),
            "triple_residual": ts.triple_residual,
        },
        "copolarity": ks,
    });
    let mut checks = vec![
        Check::flag("copolarity_plus_m_dim_equals_s_dim", ks.identity_holds),
        Check::below("triple_closure", ts.triple_residual, policy.containment_tol),
    ];
    if let Some(emb) = &data.embedding {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let coeffs = Vector::from_fn(ts.m.dim(), |_, _| rng.random_range(-0.5..0.5));
        let x = ts.m.basis() * coeffs;
        let tf = tangent_formula_check(&ts, &x, emb, &policy)?;
        checks.push(Check::below("tangent_formula", tf.distance, TANGENT_FORMULA_TOL));
        let g = mat_exp(&emb.matrix(&x))?;
        let hk = hk_orbit_spaces(pair, emb, &data.h_alg, &g)?;
        checks.push(Check::below("hk_tangent_normal_orthogonal", hk.orthogonality, policy.containment_tol));
        checks.push(Check::equal(
            "hk_isotropy_matches_intersection",
            hk.isotropy_dim,
            hk.intersection_dim,
        ));
        results["tangent_formula"] = json!({ "x": vec_json(&x), "report": tf });
        results["hk_orbit_spaces"] = json!({
            "g": rows_json(&g),
            "tangent_dim": hk.tangent.dim(),
            "normal_dim": hk.normal.dim(),
            "orthogonality": hk.orthogonality,
            "isotropy_dim": hk.isotropy_dim,
            "intersection_dim": hk.intersection_dim,
        });
    }
    Ok(Section { results, checks })
}

fn gauge(config: &RunConfig, input: &SymPairInput, policy: TolerancePolicy) -> Result<Section, CliError> {
    let data = pair_data(input, policy)?;
    let ts = triple_system(&data.pair, &data.m_basis)?;
    let (x, y) = gauge_vectors(&data.pair, &ts, config.x_scale)?;
    let g = gauge_gram(&data.pair, &ts, &x, &y, config.terms, config.quad_points)?;
    let checks = vec![
        Check::below("quadrature_matches_closed_form", g.discrepancy, GRAM_AGREEMENT_TOL),
        Check::flag(
            "gram_positive_definite",
            g.min_eig_quadrature > 0.0 && g.min_eig_closed_form > 0.0,
        ),
    ];
    Ok(Section {
        results: json!({ "x": vec_json(&x), "y": vec_json(&y), "gram": g }),
        checks,
    })
}
