//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured values. Exact checks carry no tolerance; numeric checks
//! use the stated ones.

use b5core::lattice::{classify_sextic, hurwitz_genus, verify_theta_identities, PicZ, SexticCase};
use b5core::lines::{
    ambient_line, ambient_lines_meet, lines_through_point_numeric, polar_line_points,
    polar_pairing, vsp_certificate_numeric, LinePoint,
};
use b5core::numeric::Rng;
use b5core::pipeline::{
    bisecant_report, branch_report, build_instance, collinearity_report, fit_sextic,
    instance_to_file, node_certificate, CTInstance, NumCfg,
};
use b5core::scalar::{Rat, C64};
use b5core::verify::{reconstruct_instance, verify_instance};
use b5core::wedge::{b_from_point, pencil_of, rank_drop_cubic};
use b5core::BinaryForm;
use num_traits::Zero;
use std::sync::OnceLock;
use std::time::Instant;

fn base_cfg() -> NumCfg {
    NumCfg::default()
}

fn random_line_point(rng: &mut Rng) -> LinePoint<Rat> {
    loop {
        let f = BinaryForm::new(vec![rng.small_rat0(), rng.small_rat0(), rng.small_rat0()]);
        if f.is_zero() {
            continue;
        }
        return LinePoint::new(f).unwrap();
    }
}

/// Criterion 1: polarity coincides with ambient-line incidence on 500 line
/// pairs (half generic, half constructed polar), exact rank oracle, zero
/// mismatches, under 10 seconds.
#[test]
fn criterion_1_polarity_equals_incidence() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xc1);
    let mut mismatches = 0;
    let mut polar_count = 0;
    for k in 0..500 {
        let p = random_line_point(&mut rng);
        let q = if k % 2 == 0 {
            random_line_point(&mut rng)
        } else {
            // a point on the polar line of p: guaranteed polar partner
            let pts = polar_line_points(&b5core::lines::m_of_line(&p));
            let combo = pts[0]
                .form()
                .scale(&rng.small_rat())
                .add(&pts[1].form().scale(&rng.small_rat()));
            if combo.is_zero() {
                continue;
            }
            LinePoint::new(combo).unwrap()
        };
        let polar = polar_pairing(p.form(), q.form()).is_zero();
        let meet = ambient_lines_meet(&ambient_line(&p), &ambient_line(&q));
        if polar != meet {
            mismatches += 1;
        }
        if polar {
            polar_count += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = mismatches == 0 && polar_count >= 200 && secs < 10.0;
    println!(
        "{}: criterion 1 — polarity = incidence on 500 pairs ({} polar, {} mismatches, {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        polar_count,
        mismatches,
        secs
    );
    assert!(pass);
}

/// Criterion 2: through 200 random points of B off the branch divisor pass
/// exactly 3 lines, pairwise polar, with a solvable sum-of-three-squares
/// certificate; zero failures, under 30 seconds.
#[test]
fn criterion_2_triple_cover_structure() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xc2);
    let mut done = 0;
    let mut failures = 0;
    while done < 200 {
        let f = BinaryForm::new((0..5).map(|_| rng.small_rat0()).collect());
        if f.is_zero() {
            continue;
        }
        let Ok(b) = b_from_point(&f) else { continue };
        let Ok(pencil) = pencil_of(&b) else { continue };
        let Ok(cubic) = rank_drop_cubic(&pencil) else {
            continue;
        };
        if cubic.has_repeated_root() {
            continue; // on the branch divisor: resample
        }
        done += 1;
        let Ok(lines) = lines_through_point_numeric::<f64>(&b) else {
            failures += 1;
            continue;
        };
        if lines.len() != 3 {
            failures += 1;
            continue;
        }
        let mut ok = true;
        for i in 0..3 {
            for j in (i + 1)..3 {
                if polar_pairing(lines[i].form(), lines[j].form()).abs() > 1e-8 {
                    ok = false;
                }
            }
        }
        let triple: [LinePoint<C64>; 3] = [lines[0].clone(), lines[1].clone(), lines[2].clone()];
        let (coeffs, resid) = vsp_certificate_numeric(&triple);
        match coeffs {
            Some(c) if resid < 1e-8 && c.iter().all(|z| z.abs() > 1e-10) => {}
            _ => ok = false,
        }
        if !ok {
            failures += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = failures == 0 && secs < 30.0;
    println!(
        "{}: criterion 2 — triple cover on 200 points of B ({} failures, {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        failures,
        secs
    );
    assert!(pass);
}

fn suite_instances() -> &'static Vec<CTInstance> {
    static INSTANCES: OnceLock<Vec<CTInstance>> = OnceLock::new();
    INSTANCES.get_or_init(|| {
        let cfg = base_cfg();
        (1..=20u64)
            .map(|s| build_instance(s, &cfg).expect("instance"))
            .collect()
    })
}

/// Criterion 3: on 20 seeds, the six bisecant classes are hit exactly twice
/// each (exact), and the fitted plane curve is a degree-6 curve with the six
/// certified nodes sitting three-by-three on the four polar lines, residual
/// below 1e-8; under 2 minutes.
#[test]
fn criterion_3_conic_type_suite() {
    let t0 = Instant::now();
    let cfg = base_cfg();
    let mut failures = vec![];
    for inst in suite_instances() {
        let bis = bisecant_report(inst).expect("bisecant report");
        if !bis.all_two_simple {
            failures.push((inst.seed, "bisecant pattern"));
            continue;
        }
        let fit = fit_sextic::<f64>(inst, &cfg).expect("fit");
        if fit.residual >= 1e-8 {
            failures.push((inst.seed, "fit residual"));
            continue;
        }
        // six certified nodes, three-by-three on the four polar lines
        let mut ok = true;
        for (k, &(i, j)) in b5core::lattice::TRANSPOSITIONS.iter().enumerate() {
            let bn = b5core::lines::line_to_numeric::<f64>(&inst.beta[k]);
            let v = bn.to_vec();
            let cert = node_certificate(&fit.coeffs, &[v[0], v[1], v[2]]);
            if cert.value > 1e-8 || cert.gradient > 1e-6 || cert.hessian_det < 1e-9 {
                ok = false;
            }
            for t in 1..=4usize {
                let on = b5core::lines::m_of_line(&inst.eps[t - 1])
                    .eval(&inst.beta[k].coords())
                    .is_zero();
                if on != (t == i || t == j) {
                    ok = false;
                }
            }
        }
        if !ok {
            failures.push((inst.seed, "node certificates / (4,6) incidence"));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 120.0;
    println!(
        "{}: criterion 3 — conic-type instance suite on 20 seeds ({:?} failures, {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        failures,
        secs
    );
    assert!(pass);
}

/// Criterion 4: the branch polynomial has degree 12 with all zeros simple
/// and the Hurwitz genus is 4, on the same 20 seeds; zero failures.
#[test]
fn criterion_4_branch_count_and_genus() {
    let mut failures = vec![];
    for inst in suite_instances() {
        let br = branch_report(inst).expect("branch report");
        if br.count != 12 || !br.all_simple || br.hurwitz_genus != 4 {
            failures.push(inst.seed);
        }
    }
    let pass = failures.is_empty();
    println!(
        "{}: criterion 4 — branch count 12, all simple, genus 4 on 20 seeds ({:?} failures)",
        if pass { "PASS" } else { "FAIL" },
        failures
    );
    assert!(pass);
}

/// Criterion 5: residual trigonal points are collinear through the opposite
/// node for all six index choices on 20 seeds, rank tolerance 1e-8.
#[test]
fn criterion_5_residual_collinearity() {
    let cfg = base_cfg();
    let mut worst = 0.0f64;
    let mut failures = vec![];
    for inst in suite_instances() {
        match collinearity_report::<f64>(inst, &cfg) {
            Ok(rep) => {
                worst = worst.max(rep.max_ratio);
                if rep.rank_ratios.len() != 6 || rep.max_ratio >= 1e-8 {
                    failures.push(inst.seed);
                }
            }
            Err(_) => failures.push(inst.seed),
        }
    }
    let pass = failures.is_empty();
    println!(
        "{}: criterion 5 — collinearity through the opposite node, 6 choices × 20 seeds (worst ratio {:.3e})",
        if pass { "PASS" } else { "FAIL" },
        worst
    );
    assert!(pass);
}

/// Criterion 6: the divisor-class identities hold exactly and the sextic
/// trichotomy classifies the reference classes, including the Cremona
/// equivalence.
#[test]
fn criterion_6_lattice_identities() {
    let theta = verify_theta_identities();
    let tri = classify_sextic(&PicZ::lambda(2)) == Ok(SexticCase::III)
        && classify_sextic(&PicZ::new(5, [2, 2, 2, 3])) == Ok(SexticCase::II)
        && classify_sextic(&PicZ::new(4, [1, 1, 1, 3])) == Ok(SexticCase::II);
    let hurwitz = hurwitz_genus(3, 0, 12) == Ok(4);
    let pass = theta.all_hold() && tri && hurwitz;
    println!(
        "{}: criterion 6 — theta identities (a)–(c) exact, trichotomy with Cremona equivalence",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

/// Criterion 7: reconstruction round trip on 100 seeded instances with
/// search budget 64 — solver residual below 1e-8 and all four certificates,
/// a quarter of the runs after a random projective scramble; at least 95
/// successes, under 15 minutes.
#[test]
fn criterion_7_reconstruction_round_trip() {
    let t0 = Instant::now();
    let mut cfg = base_cfg();
    cfg.samples = 32;
    cfg.multistart = 64;
    let mut successes = 0;
    let mut runs = 0;
    let mut failures = vec![];
    for seed in 1..=100u64 {
        let inst = match build_instance(seed, &cfg) {
            Ok(i) => i,
            Err(_) => {
                failures.push((seed, "instance".to_string()));
                runs += 1;
                continue;
            }
        };
        let scramble = (seed % 4 == 0).then_some(seed);
        runs += 1;
        match reconstruct_instance(&inst, &cfg, scramble) {
            Ok(rep) if rep.converged && rep.all_certificates_pass && rep.residual < 1e-8 => {
                successes += 1;
            }
            Ok(rep) => failures.push((seed, format!("residual {:.3e}", rep.residual))),
            Err(e) => failures.push((seed, e)),
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = successes >= 95 && secs < 900.0;
    println!(
        "{}: criterion 7 — reconstruction round trip {}/{} (25 scrambled, {:.1}s){}",
        if pass { "PASS" } else { "FAIL" },
        successes,
        runs,
        secs,
        if failures.is_empty() {
            String::new()
        } else {
            format!(" failures: {:?}", failures)
        }
    );
    assert!(pass);
}

/// Criterion 8: identical seeds reproduce instance files byte-identically
/// and verify reports identically across worker-pool sizes.
#[test]
fn criterion_8_determinism() {
    let mut cfg1 = base_cfg();
    cfg1.samples = 32;
    cfg1.threads = 1;
    let mut cfg4 = cfg1.clone();
    cfg4.threads = 4;
    let a = build_instance(424242, &cfg1).unwrap();
    let b = build_instance(424242, &cfg4).unwrap();
    let ja = serde_json::to_string(&instance_to_file(&a)).unwrap();
    let jb = serde_json::to_string(&instance_to_file(&b)).unwrap();
    let files_equal = ja == jb;
    let ra = verify_instance(&a, &cfg1);
    let rb = verify_instance(&b, &cfg4);
    let reports_equal =
        serde_json::to_string(&ra).unwrap() == serde_json::to_string(&rb).unwrap();
    let pass = files_equal && reports_equal && ra.passed;
    println!(
        "{}: criterion 8 — byte-identical files and reports across worker pools",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}
