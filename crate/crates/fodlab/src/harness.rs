//! Suite orchestration, the numeric cross-checks, and the dispatch used
//! by the command line.
//!
//! Everything except [`fd_check`] is exact. The finite-difference check
//! runs in floating point over a small sampling box: with coordinates
//! bounded by 1/4, degree at most 4, at most 6 terms, and coefficients
//! bounded by 9, the forward-difference truncation error at `h = 1e-4`
//! stays two orders of magnitude under the 1e-3 gate.

use crate::gen::{gen_dim_pos, gen_polymap_with, GenParams, Rng};
use crate::lens::{reverse_section_r, rho, rho_corrupt_no_transpose};
use crate::poly::Rational;
use crate::polymap::PolyMap;
use crate::report::{AxiomReport, Counterexample, LawTracker};
use crate::simple::{delta, delta_corrupt_no_chain, forward_section_d};
use crate::{Error, Result};

/// Forward-difference error of the Jacobian action:
/// `max_i |(f_i(p + h v) - f_i(p)) / h - delta f_i (p, v)|`.
pub fn fd_error(f: &PolyMap, point: &[f64], direction: &[f64], h: f64) -> f64 {
    assert_eq!(point.len(), f.dom());
    assert_eq!(direction.len(), f.dom());
    let stepped: Vec<f64> = point
        .iter()
        .zip(direction)
        .map(|(p, v)| p + h * v)
        .collect();
    let at = f.eval_f64(point);
    let at_stepped = f.eval_f64(&stepped);
    let mut args = point.to_vec();
    args.extend_from_slice(direction);
    let exact = delta(f).eval_f64(&args);
    at_stepped
        .iter()
        .zip(&at)
        .zip(&exact)
        .map(|((fs, f0), d)| ((fs - f0) / h - d).abs())
        .fold(0.0, f64::max)
}

/// True iff the forward difference matches the exact directional
/// derivative within `tol`.
pub fn fd_check(f: &PolyMap, point: &[f64], direction: &[f64], h: f64, tol: f64) -> bool {
    assert!(h > 0.0 && tol > 0.0);
    fd_error(f, point, direction, h) <= tol
}

const ORACLE_TAG: u64 = 0x0c1e;

/// Entries `n/8` with `n` in `[-2, 2]`: the bounded box for the float
/// oracle.
fn gen_small_f64_vec(rng: &mut Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.range_i64(-2, 2) as f64 / 8.0).collect()
}

/// Cross-validation of the differentiation oracles: dual numbers against
/// the Jacobian action assembled from formal partials, the transpose
/// identity between forward and reverse actions, and the float
/// finite-difference gate.
pub fn oracle_suite(params: &GenParams, trials: u64) -> AxiomReport {
    let mut dual = LawTracker::new(
        "oracle.dual",
        "dual-number derivative equals the assembled Jacobian action",
    );
    let mut adjoint = LawTracker::new(
        "oracle.adjoint",
        "pairing the forward push equals pairing the reverse pull",
    );
    let mut fd = LawTracker::new(
        "oracle.fd",
        "finite differences within 1e-3 of the exact derivative at h = 1e-4",
    );

    for trial in 0..trials {
        let mut rng = Rng::for_trial(params.seed, ORACLE_TAG, trial);
        let a = gen_dim_pos(&mut rng, params);
        let b = gen_dim_pos(&mut rng, params);
        let f = gen_polymap_with(&mut rng, params, a, b);

        // Dual numbers vs sum_j df_i/dx_j(p) v_j, assembled from partials.
        {
            let p = crate::gen::gen_point(&mut rng, a, params.coeff_bound);
            let v = crate::gen::gen_point(&mut rng, a, params.coeff_bound);
            let (_, oracle) = f.eval_dual(&p, &v).expect("lengths match");
            let jac = f.jacobian();
            let assembled: Vec<Rational> = jac
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&v)
                        .map(|(dij, vj)| dij.eval(&p).expect("lengths match") * vj)
                        .sum()
                })
                .collect();
            let witness = (oracle != assembled).then(|| Counterexample {
                inputs: vec![f.to_string(), format!("{p:?}"), format!("{v:?}")],
                lhs: format!("{oracle:?}"),
                rhs: format!("{assembled:?}"),
            });
            dual.observe(witness);
        }

        // <delta f (a, v), w> = <v, rho f (a, w)>.
        {
            let p = crate::gen::gen_point(&mut rng, a, params.coeff_bound);
            let v = crate::gen::gen_point(&mut rng, a, params.coeff_bound);
            let w = crate::gen::gen_point(&mut rng, b, params.coeff_bound);
            let mut fwd_args = p.clone();
            fwd_args.extend(v.clone());
            let push = delta(&f).eval(&fwd_args).expect("lengths match");
            let mut rev_args = p.clone();
            rev_args.extend(w.clone());
            let pull = rho(&f).eval(&rev_args).expect("lengths match");
            let lhs: Rational = push.iter().zip(&w).map(|(x, y)| x * y).sum();
            let rhs: Rational = v.iter().zip(&pull).map(|(x, y)| x * y).sum();
            let witness = (lhs != rhs).then(|| Counterexample {
                inputs: vec![f.to_string(), format!("{p:?}"), format!("{v:?}"), format!("{w:?}")],
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
            adjoint.observe(witness);
        }

        // Finite differences in the bounded box.
        {
            let p = gen_small_f64_vec(&mut rng, a);
            let v = gen_small_f64_vec(&mut rng, a);
            let err = fd_error(&f, &p, &v, 1e-4);
            let witness = (err > 1e-3).then(|| Counterexample {
                inputs: vec![f.to_string(), format!("{p:?}"), format!("{v:?}")],
                lhs: format!("{err:e}"),
                rhs: "1e-3".into(),
            });
            fd.observe(witness);
        }
    }

    let mut report = AxiomReport::new("oracle");
    report.push(dual.finish());
    report.push(adjoint.finish());
    report.push(fd.finish());
    report
}

/// The forward suite run against the corrupted derivative; used by the
/// mutation-sensitivity gate, which requires reported counterexamples.
pub fn cdc_suite_corrupt(params: &GenParams, trials: u64) -> AxiomReport {
    crate::simple::cdc_axiom_suite_with("cdc[corrupt-delta]", &delta_corrupt_no_chain, params, trials)
}

/// The reverse suite run against the transpose-dropping mutant.
pub fn rdc_suite_corrupt(params: &GenParams, trials: u64) -> AxiomReport {
    crate::lens::rdc_axiom_suite_with("rdc[corrupt-rho]", &rho_corrupt_no_transpose, params, trials)
}

pub const SUITE_IDS: [&str; 7] = ["cdc", "rdc", "gcdc", "tangent", "dT", "rdc2cdc", "oracle"];

/// Runs one suite (or `all`) and stamps wall time on each report. Exit
/// semantics live with the caller: a failed law is report content, an
/// unknown suite id is an error.
pub fn run(suite: &str, params: &GenParams, trials: u64) -> Result<Vec<AxiomReport>> {
    let ids: Vec<&str> = if suite == "all" {
        SUITE_IDS.to_vec()
    } else {
        vec![suite]
    };
    let mut reports = Vec::with_capacity(ids.len());
    for id in ids {
        let start = std::time::Instant::now();
        let mut report = match id {
            "cdc" => crate::simple::cdc_axiom_suite(params, trials),
            "rdc" => crate::lens::rdc_axiom_suite(params, trials),
            "gcdc" => crate::splus::gcdc_axiom_suite(&crate::splus::GcdcInstance::Standard, params, trials)?,
            "tangent" => crate::tangent::tangent_axiom_suite(params, trials),
            "dT" => crate::linearity::dt_axiom_suite(params, trials),
            "rdc2cdc" => crate::rdc2cdc::equivalence_suite(params, trials),
            "oracle" => oracle_suite(params, trials),
            other => return Err(Error::UnknownSuite(other.to_string())),
        };
        report.wall_ms = start.elapsed().as_millis();
        reports.push(report);
    }
    Ok(reports)
}

/// Derivative of a map, printed the way the CLI reports it.
pub fn describe_forward(f: &PolyMap) -> String {
    let d = forward_section_d(f);
    format!("base: {}\nfib:  {}", d.base(), d.fib())
}

pub fn describe_reverse(f: &PolyMap) -> String {
    let r = reverse_section_r(f);
    format!("base: {}\nfib:  {}", r.base(), r.fib())
}
