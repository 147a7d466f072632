//! Acceptance gate: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines; any failure fails the corresponding test.

use std::time::Instant;

use fodlab::gen::{GenParams, Rng};
use fodlab::harness;
use fodlab::lens::{reverse_section_r, rho};
use fodlab::linearity::{
    diff_from_lin, dt_axiom_suite, enumerate_monomials, enumerate_polys, gen_trivialization,
    is_diff_linear_map, is_linear_map, lin_from_diff, DifferentialObject, Trivialization,
};
use fodlab::poly::rat_int;
use fodlab::polymap::PolyMap;
use fodlab::report::AxiomReport;
use fodlab::simple::forward_section_d;

fn gate(criterion: u32, name: &str, passed: bool) {
    println!(
        "criterion {criterion} ({name}): {}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} ({name}) failed");
}

fn assert_suite(criterion: u32, name: &str, report: &AxiomReport, budget_s: u64) {
    let ok = report.all_passed();
    if !ok {
        eprintln!("{}", report.render_text());
    }
    gate(criterion, name, ok && report.wall_ms <= (budget_s * 1000).into());
}

fn default_params() -> GenParams {
    GenParams::default()
}

#[test]
fn criterion_1_cdc_suite() {
    let start = Instant::now();
    let mut report = fodlab::simple::cdc_axiom_suite(&default_params(), 200);
    report.wall_ms = start.elapsed().as_millis();
    assert_eq!(report.laws.len(), 5);
    assert!(report.laws.iter().all(|l| l.trials >= 200));
    assert_suite(1, "CDC.1-5 exact, 200 trials, under 2 minutes", &report, 120);
}

#[test]
fn criterion_2_rdc_suite() {
    let start = Instant::now();
    let mut report = fodlab::lens::rdc_axiom_suite(&default_params(), 200);
    report.wall_ms = start.elapsed().as_millis();
    assert_eq!(report.laws.len(), 5);

    // The displayed special cases, verbatim.
    let verbatim = (0..=4).all(|a| {
        let id_ok = rho(&PolyMap::identity(a)) == PolyMap::projection(&[a, a], 1);
        (0..=4).all(|b| {
            let pi_a = PolyMap::projection(&[a, b], 0);
            let expect = PolyMap::projection(&[a, b, a], 2)
                .pair(&PolyMap::zero(a + b + a, b))
                .unwrap();
            id_ok && rho(&pi_a) == expect
        })
    });
    gate(
        2,
        "RDC.1-5 exact with verbatim identity/projection cases",
        report.all_passed() && verbatim && report.wall_ms <= 120_000,
    );
}

#[test]
fn criterion_3_rdc_to_cdc_agreement() {
    let report = fodlab::rdc2cdc::equivalence_suite(&default_params(), 200);
    assert!(report.laws.iter().all(|l| l.trials == 200));
    if !report.all_passed() {
        eprintln!("{}", report.render_text());
    }
    gate(
        3,
        "pipeline, closed form, and direct derivative agree exactly on 200 maps",
        report.all_passed(),
    );
}

#[test]
fn criterion_4_gcdc_suite() {
    let report = fodlab::splus::gcdc_axiom_suite(
        &fodlab::splus::GcdcInstance::Standard,
        &default_params(),
        200,
    )
    .expect("standard instance is well-formed");
    assert_eq!(report.laws.len(), 5);
    // The monoid-structure and projection laws embed the displayed
    // special cases; they must be individually green.
    let g1 = report.laws.iter().find(|l| l.law == "gCDC.1").unwrap();
    let g3 = report.laws.iter().find(|l| l.law == "gCDC.3").unwrap();
    gate(
        4,
        "gCDC.1-5 exact on the standard instance, 200 trials",
        report.all_passed() && g1.passed && g3.passed,
    );
}

#[test]
fn criterion_5_tangent_suite() {
    let report = fodlab::tangent::tangent_axiom_suite(&default_params(), 100);
    assert!(report.laws.iter().all(|l| l.trials >= 100));
    let powers = report.laws.iter().find(|l| l.law == "T.powers").unwrap();
    if !report.all_passed() {
        eprintln!("{}", report.render_text());
    }
    gate(
        5,
        "tangent functoriality, naturality, monoid, and power preservation",
        report.all_passed() && powers.passed,
    );
}

#[test]
fn criterion_6_linearity() {
    // Exhaustive: linear = additive = degree-one-homogeneous, decided
    // per component over every polynomial of arity 1 and 2 with degree
    // at most 2 and coefficients in {-1, 0, 1}. All three predicates are
    // componentwise (tuple equality is componentwise), so this decides
    // every 1 -> 1 and 2 -> 2 map over the same support; a sampled
    // slice of full 2 -> 2 maps re-checks the predicates directly.
    let coeffs = [-1i64, 0, 1];
    let t1 = Trivialization::identity(1);
    for p in enumerate_polys(1, &enumerate_monomials(1, 2), &coeffs) {
        let f = PolyMap::new(1, 1, vec![p]).unwrap();
        let lin = is_linear_map(&f, &t1, &t1).unwrap();
        assert_eq!(lin, f.is_additive(), "map {f}");
        assert_eq!(f.is_additive(), f.is_additive_by_degree(), "map {f}");
    }
    let polys2 = enumerate_polys(2, &enumerate_monomials(2, 2), &coeffs);
    assert_eq!(polys2.len(), 729);
    let verdicts: Vec<(bool, bool, bool)> = polys2
        .iter()
        .map(|p| {
            let f = PolyMap::new(2, 1, vec![p.clone()]).unwrap();
            let add = f.is_additive();
            let shape = f.is_additive_by_degree();
            // Componentwise linearity: the tangent action must equal the
            // component applied to the tangent block.
            let df = fodlab::simple::delta(&f);
            let second = PolyMap::projection(&[2, 2], 1);
            let lin = df == f.compose(&second).unwrap();
            (lin, add, shape)
        })
        .collect();
    for (i, &(lin, add, shape)) in verdicts.iter().enumerate() {
        assert_eq!(lin, add, "component {i}");
        assert_eq!(add, shape, "component {i}");
    }
    let t2 = Trivialization::identity(2);
    let mut full_checked = 0usize;
    for i in 0..polys2.len() {
        for j in 0..polys2.len() {
            let expect = verdicts[i].0 && verdicts[j].0;
            let all_agree = (verdicts[i].0 && verdicts[j].0) == (verdicts[i].1 && verdicts[j].1)
                && (verdicts[i].1 && verdicts[j].1) == (verdicts[i].2 && verdicts[j].2);
            assert!(all_agree, "pair ({i}, {j})");
            if (i * 729 + j) % 40961 == 0 {
                let f = PolyMap::new(2, 2, vec![polys2[i].clone(), polys2[j].clone()]).unwrap();
                assert_eq!(is_linear_map(&f, &t2, &t2).unwrap(), expect, "pair ({i}, {j})");
                assert_eq!(f.is_additive(), expect, "pair ({i}, {j})");
                assert_eq!(f.is_additive_by_degree(), expect, "pair ({i}, {j})");
                full_checked += 1;
            }
        }
    }
    assert!(full_checked > 10);

    // Round-trip equivalences on 100 random instances.
    for trial in 0..100u64 {
        let mut rng = Rng::for_trial(default_params().seed, 0xacc6, trial);
        let dim = (rng.below(3) + 1) as usize;
        let t = gen_trivialization(&mut rng, dim, 4);
        let std = DifferentialObject::standard(dim);
        let d = diff_from_lin(dim, &t, std.monoid_zero(), std.monoid_plus()).unwrap();
        assert_eq!(lin_from_diff(&d).unwrap(), t, "round trip, trial {trial}");

        let t_b = gen_trivialization(&mut rng, dim, 4);
        let d_b = diff_from_lin(dim, &t_b, std.monoid_zero(), std.monoid_plus()).unwrap();
        let f = fodlab::gen::gen_polymap_with(&mut rng, &default_params(), dim, dim);
        // Internally asserts agreement with is_linear_map.
        let _ = is_diff_linear_map(&f, &d, &d_b).unwrap();
    }

    // Induced derivative passes the forward axioms for 100 random
    // additive trivialization assignments.
    let report = dt_axiom_suite(&default_params(), 100);
    if !report.all_passed() {
        eprintln!("{}", report.render_text());
    }
    gate(
        6,
        "linearity characterization, round trips, induced-derivative axioms",
        report.all_passed(),
    );
}

#[test]
fn criterion_7_oracles() {
    // 200 dual-number and transpose-identity checks.
    let report = harness::oracle_suite(&default_params(), 200);
    let dual = report.laws.iter().find(|l| l.law == "oracle.dual").unwrap();
    let adjoint = report.laws.iter().find(|l| l.law == "oracle.adjoint").unwrap();
    assert!(dual.trials >= 200 && adjoint.trials >= 200);

    // 100 finite-difference evaluations at the stated step and gate.
    let params = default_params();
    let mut fd_ok = true;
    for trial in 0..100u64 {
        let mut rng = Rng::for_trial(params.seed, 0xfd, trial);
        let a = fodlab::gen::gen_dim_pos(&mut rng, &params);
        let b = fodlab::gen::gen_dim_pos(&mut rng, &params);
        let f = fodlab::gen::gen_polymap_with(&mut rng, &params, a, b);
        let p: Vec<f64> = (0..a).map(|_| rng.range_i64(-2, 2) as f64 / 8.0).collect();
        let v: Vec<f64> = (0..a).map(|_| rng.range_i64(-2, 2) as f64 / 8.0).collect();
        fd_ok &= harness::fd_check(&f, &p, &v, 1e-4, 1e-3);
    }
    gate(
        7,
        "dual-number and adjoint oracles exact; finite differences within 1e-3",
        report.all_passed() && fd_ok,
    );
}

#[test]
fn criterion_8_mutation_sensitivity() {
    let params = default_params();
    let cdc = harness::cdc_suite_corrupt(&params, 200);
    let cdc_caught = cdc
        .laws
        .iter()
        .any(|l| !l.passed && l.counterexample.is_some());
    let chain_caught = cdc
        .laws
        .iter()
        .find(|l| l.law == "CDC.5")
        .is_some_and(|l| !l.passed);

    let rdc = harness::rdc_suite_corrupt(&params, 200);
    let rdc_caught = rdc
        .laws
        .iter()
        .any(|l| !l.passed && l.counterexample.is_some());

    gate(
        8,
        "corrupted derivative operators produce reported counterexamples",
        cdc_caught && chain_caught && rdc_caught,
    );
}

#[test]
fn criterion_9_determinism() {
    // End to end through the CLI: two runs of `check --suite all` with
    // the same seed must emit byte-identical JSON once the timing lines
    // are stripped.
    let run_cli = || {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_fodlab"))
            .args([
                "check", "--suite", "all", "--trials", "40", "--seed", "7", "--format", "json",
            ])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "suite run must pass");
        let text = String::from_utf8(out.stdout).expect("utf8 output");
        text.lines()
            .filter(|l| !l.trim_start().starts_with("\"wall_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let first = run_cli();
    let second = run_cli();
    assert!(first.contains("\"suite\": \"cdc\""));
    gate(9, "byte-identical reports modulo timing", first == second);
}

#[test]
fn acceptance_smoke_reference_values() {
    // Reference derivative values used throughout the criteria are
    // anchored once more against the dual-number oracle.
    let f = fodlab::expr::parse_map("[x0^2] : 1 -> 1").unwrap();
    let d = forward_section_d(&f);
    let r = reverse_section_r(&f);
    let (v, dv) = f.eval_dual(&[rat_int(3)], &[rat_int(1)]).unwrap();
    assert_eq!(v, vec![rat_int(9)]);
    assert_eq!(dv, vec![rat_int(6)]);
    assert_eq!(
        d.fib().eval(&[rat_int(3), rat_int(1)]).unwrap(),
        vec![rat_int(6)]
    );
    assert_eq!(
        r.fib().eval(&[rat_int(3), rat_int(1)]).unwrap(),
        vec![rat_int(6)]
    );
}
