//! Batch verification and reconstruction drivers with machine-readable
//! reports.
//!
//! `verify_instance` runs every structural check of an instance — the exact
//! ones (lattice identities, polarity relations, membership on B, bisecant
//! pattern, branch count) byte-reproducibly, the numeric ones (fit, nodes,
//! collinearity, sum-of-squares certificates) at the precision selected by
//! `precision_bits`. `reconstruct_instance` drives the solver and the four
//! certificates, optionally after a seeded projective scramble.

use crate::lattice::{classify_sextic, verify_theta_identities, PicZ, SexticCase};
use crate::lines::{line_to_numeric, polar_pairing};
use crate::pipeline::{
    bisecant_report, branch_report, collinearity_report, factor_search_residual, fit_sextic,
    instance_to_file, node_certificate, trisecant_pencil_of_sample, vsp_sweep, CTInstance,
    NumCfg,
};
use crate::reconstruction::{
    certify_reconstruction, model_from_instance, scramble_model, solve_q, ConicQ, ReconError,
};
use crate::scalar::{Cplx, Real};
use crate::wedge::on_b;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, pass: bool, measured: serde_json::Value) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass,
        measured,
    }
}

/// Runs the full verification suite on an instance.
pub fn verify_instance(inst: &CTInstance, cfg: &NumCfg) -> VerifyReport {
    let mut checks = vec![];

    // --- exact lattice identities and the trichotomy -----------------------
    let theta = verify_theta_identities();
    checks.push(check(
        "theta_identities",
        theta.all_hold(),
        serde_json::to_value(&theta).unwrap(),
    ));
    let tri_ok = classify_sextic(&PicZ::lambda(2)) == Ok(SexticCase::III)
        && classify_sextic(&PicZ::new(5, [2, 2, 2, 3])) == Ok(SexticCase::II)
        && classify_sextic(&PicZ::new(4, [1, 1, 1, 3])) == Ok(SexticCase::II);
    checks.push(check(
        "lattice_trichotomy",
        tri_ok,
        json!({"conic_type": "III", "cremona_equivalent": "II"}),
    ));

    // --- exact instance invariants -----------------------------------------
    let mut eps_ok = true;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if polar_pairing(inst.eps[i].form(), inst.eps[j].form()).is_zero() {
                eps_ok = false;
            }
        }
    }
    let mut beta_ok = true;
    for (k, &(i, j)) in crate::lattice::TRANSPOSITIONS.iter().enumerate() {
        if !polar_pairing(inst.beta[k].form(), inst.eps[i - 1].form()).is_zero()
            || !polar_pairing(inst.beta[k].form(), inst.eps[j - 1].form()).is_zero()
        {
            beta_ok = false;
        }
    }
    checks.push(check(
        "instance_invariants",
        eps_ok && beta_ok,
        json!({"eps_pairwise_nonpolar": eps_ok, "beta_incidences": beta_ok}),
    ));

    // --- samples: exact membership and reproducibility ---------------------
    let mut on_b_ok = true;
    let mut reproduce_ok = true;
    for s in &inst.samples {
        if !on_b(&s.b).unwrap_or(false) {
            on_b_ok = false;
            continue;
        }
        match trisecant_pencil_of_sample(inst, &s.t) {
            Some(b) => {
                if b != s.b {
                    reproduce_ok = false;
                }
            }
            None => reproduce_ok = false,
        }
    }
    checks.push(check(
        "samples_on_b",
        on_b_ok,
        json!({"count": inst.samples.len()}),
    ));
    checks.push(check("samples_reproduce", reproduce_ok, json!({})));

    // --- exact fiber / bisecant / branch certificates -----------------------
    let fiber_ok = exact_fiber_checks(inst);
    checks.push(check(
        "fiber_distinct_lines",
        fiber_ok,
        json!({"per_sample_discriminant": "nonzero"}),
    ));
    match bisecant_report(inst) {
        Ok(b) => checks.push(check(
            "bisecant_pattern",
            b.all_two_simple,
            serde_json::to_value(&b).unwrap(),
        )),
        Err(e) => checks.push(check("bisecant_pattern", false, json!(e.to_string()))),
    }
    match branch_report(inst) {
        Ok(b) => {
            let pass = b.count == 12 && b.all_simple && b.hurwitz_genus == 4;
            checks.push(check("branch_count", pass, serde_json::to_value(&b).unwrap()));
        }
        Err(e) => checks.push(check("branch_count", false, json!(e.to_string()))),
    }

    // --- numeric lane -------------------------------------------------------
    if cfg.precision_bits <= 53 {
        numeric_checks::<f64>(inst, cfg, &mut checks);
    } else {
        numeric_checks::<crate::scalar::Dd>(inst, cfg, &mut checks);
    }

    let passed = checks.iter().all(|c| c.pass);
    VerifyReport {
        schema_version: 1,
        seed: inst.seed,
        passed,
        checks,
    }
}

fn exact_fiber_checks(inst: &CTInstance) -> bool {
    use crate::wedge::{pencil_of, rank_drop_cubic};
    for s in &inst.samples {
        let Ok(p) = pencil_of(&s.b) else { return false };
        let Ok(c) = rank_drop_cubic(&p) else {
            return false;
        };
        if c.has_repeated_root() {
            return false;
        }
    }
    true
}

fn numeric_checks<R: Real>(inst: &CTInstance, cfg: &NumCfg, checks: &mut Vec<CheckResult>) {
    let tol = cfg.tolerance;
    // stored triples against recomputation, and pairwise polarity
    let mut stored_worst = 0.0f64;
    let mut polar_worst = 0.0f64;
    for s in &inst.samples {
        if let Some(triple) =
            crate::pipeline::triple_at_complex::<f64>(inst, Cplx::real(crate::scalar::rat_to_f64(&s.t)))
        {
            for a in &triple {
                let best = s
                    .triple
                    .iter()
                    .map(|b| crate::lines::line_dist(a, b))
                    .fold(f64::INFINITY, f64::min);
                stored_worst = stored_worst.max(best);
            }
        } else {
            stored_worst = f64::INFINITY;
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let p = polar_pairing(s.triple[i].form(), s.triple[j].form());
                polar_worst = polar_worst.max(p.abs());
            }
        }
    }
    checks.push(check(
        "stored_triples_match",
        stored_worst < tol.max(1e-9),
        json!({"worst_distance": stored_worst}),
    ));
    checks.push(check(
        "triples_pairwise_polar",
        polar_worst < tol.max(1e-9),
        json!({"worst_pairing": polar_worst}),
    ));

    match fit_sextic::<R>(inst, cfg) {
        Err(e) => checks.push(check("sextic_fit", false, json!(e.to_string()))),
        Ok(fit) => {
            let mut node_vals = vec![];
            let mut nodes_ok = true;
            for b in &inst.beta {
                let bn = line_to_numeric::<R>(b);
                let v = bn.to_vec();
                let cert = node_certificate(&fit.coeffs, &[v[0], v[1], v[2]]);
                if cert.value > tol || cert.gradient > tol.sqrt() || cert.hessian_det < 1e-9 {
                    nodes_ok = false;
                }
                node_vals.push(cert);
            }
            // smoothness along the curve: the gradient must not vanish at
            // sample points away from the nodes (samples can legitimately
            // pass arbitrarily close to a node)
            let mut smooth_ok = true;
            let nodes: Vec<Vec<Cplx<R>>> = inst
                .beta
                .iter()
                .map(|b| line_to_numeric::<R>(b).to_vec())
                .collect();
            for s in inst.samples.iter() {
                let p = s.triple[0].to_vec();
                let pr: [Cplx<R>; 3] =
                    std::array::from_fn(|i| Cplx::from_f64s(p[i].re, p[i].im));
                let near_node = nodes
                    .iter()
                    .any(|n| crate::numeric::proj_dist(&pr, n).to_f64() < 0.05);
                if near_node {
                    continue;
                }
                let cert = node_certificate(&fit.coeffs, &pr);
                if cert.gradient < 1e-8 {
                    smooth_ok = false;
                }
            }
            let factor_resid = factor_search_residual(&fit.coeffs, inst.seed);
            let irreducible = factor_resid > 1e-3;
            // exact (4,6) incidence: nodes three-by-three on the polar lines
            let mut incidence_ok = true;
            for (k, &(i, j)) in crate::lattice::TRANSPOSITIONS.iter().enumerate() {
                for t in 1..=4usize {
                    let on = crate::lines::m_of_line(&inst.eps[t - 1])
                        .eval(&inst.beta[k].coords())
                        .is_zero();
                    if on != (t == i || t == j) {
                        incidence_ok = false;
                    }
                }
            }
            let pass = fit.residual < tol && nodes_ok && smooth_ok && irreducible && incidence_ok;
            checks.push(check(
                "sextic_fit",
                pass,
                json!({
                    "residual": fit.residual,
                    "gap": fit.gap,
                    "nodes": node_vals,
                    "smooth_at_samples": smooth_ok,
                    "factor_search_residual": factor_resid,
                    "config_incidence_exact": incidence_ok,
                }),
            ));
        }
    }

    match collinearity_report::<R>(inst, cfg) {
        Err(e) => checks.push(check("collinearity", false, json!(e.to_string()))),
        Ok(rep) => checks.push(check(
            "collinearity",
            rep.max_ratio < tol,
            serde_json::to_value(&rep).unwrap(),
        )),
    }

    let sweep = vsp_sweep::<R>(inst);
    checks.push(check(
        "vsp_certificates",
        sweep.solvable == sweep.total && sweep.min_coeff > tol,
        serde_json::to_value(&sweep).unwrap(),
    ));
}

// ---------------------------------------------------------------------------
// Reconstruction driver.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructReport {
    pub schema_version: u32,
    pub seed: u64,
    pub scrambled: bool,
    pub converged: bool,
    pub residual: f64,
    /// Recovered conic, row-major, complex entries as "re,im".
    pub q: Vec<Vec<String>>,
    pub certificates: serde_json::Value,
    pub all_certificates_pass: bool,
    pub trace_length: usize,
    pub diagnostics: serde_json::Value,
}

/// Fits the plane model of an instance, optionally scrambles it by a seeded
/// projectivity, solves for the identification conic and certifies it.
pub fn reconstruct_instance(
    inst: &CTInstance,
    cfg: &NumCfg,
    scramble_seed: Option<u64>,
) -> Result<ReconstructReport, String> {
    if cfg.precision_bits <= 53 {
        reconstruct_lane::<f64>(inst, cfg, scramble_seed)
    } else {
        reconstruct_lane::<crate::scalar::Dd>(inst, cfg, scramble_seed)
    }
}

fn reconstruct_lane<R: Real>(
    inst: &CTInstance,
    cfg: &NumCfg,
    scramble_seed: Option<u64>,
) -> Result<ReconstructReport, String> {
    let fit = fit_sextic::<R>(inst, cfg).map_err(|e| e.to_string())?;
    let model = model_from_instance::<R>(inst, &fit, cfg.tolerance.max(1e-7))
        .map_err(|e| e.to_string())?;
    let model = match scramble_seed {
        None => model,
        Some(s) => {
            let g = random_projectivity::<R>(s);
            scramble_model(&model, &g).map_err(|e| e.to_string())?
        }
    };
    let sol = match solve_q(&model, None, cfg, inst.seed) {
        Ok(s) => s,
        Err(ReconError::NoConvergence(best)) => {
            return Ok(ReconstructReport {
                schema_version: 1,
                seed: inst.seed,
                scrambled: scramble_seed.is_some(),
                converged: false,
                residual: best,
                q: vec![],
                certificates: serde_json::Value::Null,
                all_certificates_pass: false,
                trace_length: 0,
                diagnostics: json!({"error": "no convergent start"}),
            })
        }
        Err(e) => return Err(e.to_string()),
    };
    let cert = certify_reconstruction(&model, &sol.q, cfg).map_err(|e| e.to_string())?;
    let qs: Vec<Vec<String>> = sol
        .q
        .m
        .iter()
        .map(|row| {
            row.iter()
                .map(|z| crate::pipeline::c64_to_string(&z.to_c64()))
                .collect()
        })
        .collect();
    Ok(ReconstructReport {
        schema_version: 1,
        seed: inst.seed,
        scrambled: scramble_seed.is_some(),
        converged: sol.residual < cfg.tolerance,
        residual: sol.residual,
        q: qs,
        certificates: serde_json::to_value(&cert).unwrap(),
        all_certificates_pass: cert.all_pass(),
        trace_length: sol.diagnostics.trace_length,
        diagnostics: serde_json::to_value(&sol.diagnostics).unwrap(),
    })
}

/// Seeded well-conditioned projectivity with small integer entries.
pub fn random_projectivity<R: Real>(seed: u64) -> [[Cplx<R>; 3]; 3] {
    let mut rng = crate::numeric::Rng::new(seed ^ 0x09c4_a317);
    loop {
        let g: [[f64; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.int(-4, 4) as f64));
        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        let scale = g.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale > 0.0 && det.abs() > 0.02 * scale * scale * scale {
            return std::array::from_fn(|i| {
                std::array::from_fn(|j| Cplx::from_f64s(g[i][j], 0.0))
            });
        }
    }
}

/// The identification conic of an unscrambled instance, for seeding tests.
pub fn true_conic<R: Real>() -> ConicQ<R> {
    crate::reconstruction::ground_truth_conic()
}

/// Serializes an instance (with optional attached reports) to canonical JSON.
pub fn instance_json(inst: &CTInstance, reports: Option<serde_json::Value>) -> String {
    let mut file = instance_to_file(inst);
    if let Some(r) = reports {
        file.reports = r;
    }
    serde_json::to_string_pretty(&file).expect("serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::build_instance;

    fn cfg() -> NumCfg {
        NumCfg {
            samples: 30,
            threads: 1,
            multistart: 24,
            precision_bits: 53,
            ..NumCfg::default()
        }
    }

    #[test]
    fn verify_passes_on_fresh_instance() {
        let inst = build_instance(101, &cfg()).unwrap();
        let rep = verify_instance(&inst, &cfg());
        for c in &rep.checks {
            assert!(c.pass, "check {} failed: {}", c.name, c.measured);
        }
        assert!(rep.passed);
    }

    #[test]
    fn verify_fails_on_corrupted_sample() {
        let inst = build_instance(103, &cfg()).unwrap();
        let mut file = crate::pipeline::instance_to_file(&inst);
        file.samples[1].b[3] = "7/1".into();
        let bad = crate::pipeline::instance_from_file(&file).unwrap();
        let rep = verify_instance(&bad, &cfg());
        assert!(!rep.passed);
        assert!(!rep.check("samples_on_b").unwrap().pass);
    }

    #[test]
    fn reconstruct_roundtrip_with_report() {
        let inst = build_instance(107, &cfg()).unwrap();
        let rep = reconstruct_instance(&inst, &cfg(), None).unwrap();
        assert!(rep.converged, "{:?}", rep.residual);
        assert!(rep.all_certificates_pass, "{}", rep.certificates);
        let scr = reconstruct_instance(&inst, &cfg(), Some(11)).unwrap();
        assert!(scr.converged && scr.all_certificates_pass);
    }

    #[test]
    fn dd_lane_verifies_too() {
        let mut c = cfg();
        c.precision_bits = 128;
        let inst = build_instance(109, &c).unwrap();
        let rep = verify_instance(&inst, &c);
        assert!(rep.passed, "{}", serde_json::to_string_pretty(&rep.checks).unwrap());
    }
}
