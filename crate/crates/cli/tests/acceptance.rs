//! Acceptance harness. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Tolerances and time limits are pinned
//! below.

use std::f64::consts::PI;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use strongsum::norms::remez::{best_approx_periodic, remez_exchange};
use strongsum::seqclass::{self, MatrixRow};
use strongsum::summation::{self, GammaSequence, QuadratureSpec};
use strongsum::{
    norms, APFunction, BoundCase, BoundReport, Error, Majorant, NormSpace, PeriodicFunction, Statement,
    SummabilityMatrix, Verifier,
};

const N_MAX: usize = 128;
const CONSTANT_TOL: f64 = 1e-12;
const REPRESENTATION_REL_TOL: f64 = 1e-3;
const QUAD_REL_TOL: f64 = 1e-6;
const NORMALIZATION_TOL: f64 = 1e-4;
const REMEZ_TOL: f64 = 1e-6;
const REMEZ_ZERO_TOL: f64 = 1e-8;
const MODULUS_TOL: f64 = 1e-6;
const CLASS_TOL: f64 = 1e-12;
const GM2BETA_LIMIT: f64 = 2.0 + 1e-9;
const CONSISTENCY_TOL: f64 = 1e-9;
const GROWTH_FACTOR: f64 = 1.25;
const SCALING_REL_TOL: f64 = 1e-9;
const REMARK_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn builtin_t1_matrices() -> Vec<SummabilityMatrix> {
    ["cesaro", "riesz", "riesz:0", "riesz:2", "riesz:0.5"]
        .iter()
        .map(|m| SummabilityMatrix::builtin(m).unwrap())
        .collect()
}

fn constant_reproduction() -> Outcome {
    let mut worst_t = 0.0f64;
    let mut worst_s = 0.0f64;
    for c in [1.0, 2.5, -1.75, 0.0] {
        let f = APFunction::constant(c);
        let gammas = GammaSequence::half_alpha(f.alpha()).map_err(e2s)?;
        for m in builtin_t1_matrices() {
            for n in 0..=N_MAX {
                let row = m.row(n).map_err(e2s)?;
                check(seqclass::check_t1(&row), format!("{} row {n} fails T1", m.name()))?;
                for i in 0..4 {
                    let x = -3.0 + 1.7 * i as f64;
                    let t = summation::matrix_transform(&f, &row, &gammas, x).map_err(e2s)?;
                    worst_t = worst_t.max((t - c).norm());
                    for q in [1.0, 2.0] {
                        let s = summation::strong_mean(&f, &row, &gammas, q, x).map_err(e2s)?;
                        worst_s = worst_s.max(s.abs());
                    }
                }
            }
        }
    }
    check(worst_t <= CONSTANT_TOL && worst_s <= CONSTANT_TOL, format!("transform err {worst_t:.2e}, mean {worst_s:.2e}"))?;
    Ok(format!("max |T - c| = {worst_t:.1e}, max strong mean = {worst_s:.1e}"))
}

fn representation() -> Outcome {
    let f = APFunction::real_trig(1.0, 0.0, &[(1.0, 0.0, 1.0), (3.0, 0.0, 0.5)]).map_err(e2s)?;
    let xs: Vec<f64> = (0..32).map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / 32.0).collect();
    let scale = f.amplitude_bound();
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for lambda in [0.5, 2.0, 4.0] {
        // at lambda = 0.5 the exponent 1 lies inside (0.5, 1.5), so the
        // full width alpha is inadmissible there
        let width = if lambda == 0.5 { 0.5 } else { f.alpha() };
        if width != f.alpha() {
            let quad = QuadratureSpec::from_tail_bound(f.alpha(), QUAD_REL_TOL).map_err(e2s)?;
            match summation::integral_partial_sum(&f, 0.0, lambda, f.alpha(), &quad) {
                Err(Error::PreconditionViolation(_)) => notes.push(format!("width {} at {lambda} rejected", f.alpha())),
                other => return Err(format!("width alpha at lambda {lambda} not rejected: {other:?}")),
            }
        }
        let quad = QuadratureSpec::from_tail_bound(width, QUAD_REL_TOL).map_err(e2s)?;
        let reps = summation::integral_partial_sums(&f, &xs, lambda, width, &quad).map_err(e2s)?;
        let direct = summation::partial_sum(&f, lambda);
        for (x, r) in xs.iter().zip(&reps) {
            let d = direct.evaluate(*x);
            let err = (r.value - d).norm() / d.norm().max(scale);
            worst = worst.max(err);
        }
    }
    check(worst <= REPRESENTATION_REL_TOL, format!("max relative error {worst:.2e}"))?;
    notes.push(format!("max relative error {worst:.2e} (scale max(|S f|, {scale}))"));
    Ok(notes.join("; "))
}

fn kernel_normalization() -> Outcome {
    let one = APFunction::constant(1.0);
    let mut worst = 0.0f64;
    for (lambda, alpha) in [(0.5, 1.0), (2.0, 1.0), (5.0, 2.0)] {
        let quad = QuadratureSpec::from_tail_bound(alpha, QUAD_REL_TOL).map_err(e2s)?;
        let r = summation::integral_partial_sum(&one, 0.3, lambda, alpha, &quad).map_err(e2s)?;
        worst = worst.max((r.value.re - 1.0).abs().max(r.value.im.abs()));
    }
    check(worst <= NORMALIZATION_TOL, format!("max |value - 1| = {worst:.2e}"))?;
    Ok(format!("max |value - 1| = {worst:.1e}"))
}

fn remez() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..=8 {
        let f = PeriodicFunction::harmonic(k + 1, 1.0, 0.0);
        let e = best_approx_periodic(&f, k).map_err(e2s)?;
        worst = worst.max((e.value - 1.0).abs());
    }
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_zero = 0.0f64;
    for k in 0..=8 {
        for deg in 0..=k {
            let pairs: Vec<(f64, f64)> = (0..deg).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = PeriodicFunction::new(rng.gen_range(-1.0..1.0), pairs).map_err(e2s)?;
            worst_zero = worst_zero.max(best_approx_periodic(&f, k).map_err(e2s)?.value.abs());
            if deg == k && k > 0 {
                worst_zero = worst_zero.max(remez_exchange(&f, k).map_err(e2s)?.deviation.abs());
            }
        }
    }
    check(worst <= REMEZ_TOL, format!("max |E_k - 1| = {worst:.2e}"))?;
    check(worst_zero <= REMEZ_ZERO_TOL, format!("max E_k on degree <= k = {worst_zero:.2e}"))?;
    Ok(format!("max |E_k(cos (k+1)x) - 1| = {worst:.1e}, max E_k(deg <= k) = {worst_zero:.1e}"))
}

fn modulus() -> Outcome {
    let f = strongsum::fixtures::builtin("sine").map_err(e2s)?.function;
    let mut worst = 0.0f64;
    for delta in [PI / 8.0, PI / 4.0, PI / 2.0, PI] {
        let m = norms::modulus(&f, delta, &NormSpace::uniform()).map_err(e2s)?;
        worst = worst.max((m.value - 2.0 * (delta / 2.0).sin()).abs());
    }
    check(worst <= MODULUS_TOL, format!("max error {worst:.2e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

fn class_analyzer() -> Outcome {
    let m = SummabilityMatrix::cesaro();
    let mut rbvs_err = 0.0f64;
    let mut gm2 = 0.0f64;
    for n in 0..=N_MAX {
        let row = m.row(n).map_err(e2s)?;
        check(seqclass::ms_check(&row), format!("Cesaro row {n} not MS"))?;
        for k in seqclass::rbvs_profile(&row) {
            rbvs_err = rbvs_err.max((k - 1.0).abs());
        }
        gm2 = gm2.max(seqclass::gm2beta_constant(&row, 2.0).map_err(e2s)?);
    }
    check(rbvs_err <= CLASS_TOL, format!("rbvs profile off by {rbvs_err:.2e}"))?;
    check(gm2 <= GM2BETA_LIMIT, format!("Cesaro gm2beta {gm2}"))?;
    let mut rng = StdRng::seed_from_u64(2024);
    let mut gm2_random = 0.0f64;
    for i in 0..100 {
        let len = rng.gen_range(1..=200);
        let mut w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
        w.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let row = MatrixRow::new(i, w).map_err(e2s)?;
        gm2_random = gm2_random.max(seqclass::gm2beta_constant(&row, 2.0).map_err(e2s)?);
    }
    check(gm2_random <= GM2BETA_LIMIT, format!("random gm2beta {gm2_random}"))?;
    Ok(format!("rbvs err {rbvs_err:.1e}, Cesaro gm2beta {gm2:.4}, random max {gm2_random:.4}"))
}

const BOUND_FIXTURES: [&str; 3] = ["sine", "sine-quarter-4", "lacunary-cosine"];

fn bound_cases() -> Vec<BoundCase> {
    let mut cases = Vec::new();
    for fx in BOUND_FIXTURES {
        let fixture = strongsum::fixtures::builtin(fx).unwrap();
        for matrix in ["cesaro", "riesz"] {
            let m = SummabilityMatrix::builtin(matrix).unwrap();
            for p in [2.0, f64::INFINITY] {
                for q in [1.0, 2.0] {
                    for st in [
                        Statement::Prop1,
                        Statement::Prop2,
                        Statement::Thm4,
                        Statement::Thm5,
                        Statement::Thm6,
                        Statement::Thm2E,
                        Statement::Thm2Omega,
                        Statement::Thm2Ms,
                    ] {
                        // block rows do not depend on the matrix, the periodic
                        // statements do not depend on p
                        if matches!(st, Statement::Prop1 | Statement::Prop2) && matrix != "cesaro" {
                            continue;
                        }
                        if st.is_periodic() && p != f64::INFINITY {
                            continue;
                        }
                        cases.push(BoundCase {
                            statement: st,
                            fixture: fixture.clone(),
                            matrix: m.clone(),
                            p,
                            q,
                            c: 2.0,
                            n_start: 0,
                            n_end: N_MAX,
                            majorant: Majorant::Truncation,
                        });
                    }
                }
            }
        }
    }
    cases
}

fn needs_ms(st: Statement) -> bool {
    matches!(st, Statement::Thm6 | Statement::Thm2Ms)
}

fn case_label(c: &BoundCase) -> String {
    format!("{} {} {} p={} q={}", c.statement.id(), c.fixture.name, c.matrix.name(), c.p, c.q)
}

/// Runs every case; non-MS matrices must be rejected by the MS statements.
fn run_cases(verifier: &mut Verifier, cases: &[BoundCase]) -> Result<Vec<Option<BoundReport>>, String> {
    let mut out = Vec::new();
    for case in cases {
        let ms = case.matrix.name() == "cesaro";
        match verifier.run(case) {
            Ok(r) => {
                check(ms || !needs_ms(case.statement), format!("{} ran without MS", case_label(case)))?;
                out.push(Some(r));
            }
            Err(Error::HypothesisViolation(_)) if !ms && needs_ms(case.statement) => out.push(None),
            Err(e) => return Err(format!("{}: {e}", case_label(case))),
        }
    }
    Ok(out)
}

fn bound_boundedness(cases: &[BoundCase], reports: &mut Vec<Option<BoundReport>>) -> Outcome {
    let mut verifier = Verifier::new();
    *reports = run_cases(&mut verifier, cases)?;
    let mut worst_growth = 0.0f64;
    let mut worst_sup = 0.0f64;
    let mut ran = 0;
    for (case, r) in cases.iter().zip(reports.iter()) {
        let Some(r) = r else { continue };
        ran += 1;
        let label = case_label(case);
        check(r.is_consistent(), format!("{label}: flags {:?}", r.flags))?;
        for row in &r.rows {
            if row.rhs == 0.0 {
                check(row.lhs <= CONSISTENCY_TOL, format!("{label}: n={} rhs 0, lhs {:e}", row.n, row.lhs))?;
            }
        }
        check(r.sup_ratio.is_finite(), format!("{label}: sup ratio {}", r.sup_ratio))?;
        let s64 = r.sup_ratio_upto(64);
        let s128 = r.sup_ratio_upto(N_MAX);
        let growth = if s64 > 0.0 { s128 / s64 } else if s128 == 0.0 { 1.0 } else { f64::INFINITY };
        check(growth <= GROWTH_FACTOR, format!("{label}: sup(128)/sup(64) = {growth}"))?;
        worst_growth = worst_growth.max(growth);
        worst_sup = worst_sup.max(r.sup_ratio);
    }
    Ok(format!(
        "{ran} reports ({} MS-gated skips), largest sup ratio {worst_sup:.4}, largest growth {worst_growth:.4}",
        reports.len() - ran
    ))
}

fn scaling(cases: &[BoundCase], reports: &[Option<BoundReport>]) -> Outcome {
    let scaled: Vec<BoundCase> = cases
        .iter()
        .map(|c| BoundCase {
            fixture: c.fixture.scaled(3.0),
            ..c.clone()
        })
        .collect();
    let mut verifier = Verifier::new();
    let again = run_cases(&mut verifier, &scaled)?;
    let mut worst = 0.0f64;
    for ((case, a), b) in cases.iter().zip(reports).zip(&again) {
        let (Some(a), Some(b)) = (a, b) else {
            check(a.is_none() && b.is_none(), format!("{}: gating differs", case_label(case)))?;
            continue;
        };
        check(a.rows.len() == b.rows.len(), format!("{}: row count differs", case_label(case)))?;
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            let d = if ra.ratio == rb.ratio {
                0.0
            } else {
                (ra.ratio - rb.ratio).abs() / ra.ratio.abs().max(rb.ratio.abs())
            };
            worst = worst.max(d);
        }
        check(a.flags.len() == b.flags.len(), format!("{}: flags differ", case_label(case)))?;
    }
    check(worst <= SCALING_REL_TOL, format!("max relative ratio change {worst:.2e}"))?;
    Ok(format!("{} reports, max relative ratio change {worst:.1e}", again.iter().flatten().count()))
}

fn remark7() -> Outcome {
    let mut verifier = Verifier::new();
    let mut worst = 0.0f64;
    let mut runs = 0;
    for fx in BOUND_FIXTURES.iter().chain(&["sine-half-3", "constant:2"]) {
        // the comparison is stated for q >= 2 only
        for q in [2.0, 3.0] {
            let case = BoundCase {
                statement: Statement::Remark7,
                fixture: strongsum::fixtures::builtin(fx).map_err(e2s)?,
                matrix: SummabilityMatrix::cesaro(),
                p: f64::INFINITY,
                q,
                c: 2.0,
                n_start: 0,
                n_end: N_MAX,
                majorant: Majorant::Truncation,
            };
            let r = verifier.run(&case).map_err(e2s)?;
            let norm = r.reference_norm.ok_or("no reference norm")?;
            for row in &r.rows {
                let expected = norm / ((row.n + 1) as f64).powf(1.0 / q);
                worst = worst.max(((row.rhs - row.lhs) - expected).abs());
            }
            runs += 1;
        }
    }
    check(worst <= REMARK_TOL, format!("max deviation {worst:.2e}"))?;
    Ok(format!("{runs} reports, max |old - new - norm/(n+1)^(1/q)| = {worst:.1e}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.toml");
    let text = format!(
        "statement = \"prop1,prop2,thm4,thm5,thm6,thm2-E\"\nfixture = \"sine-quarter-4\"\nmatrix = \"cesaro\"\np = 2.0\nq = 2.0\nc = 2.0\nn = \"0..64\"\nout = {:?}\n",
        out.to_str().unwrap()
    );
    fs::write(&cfg, text).map_err(|e| e.to_string())?;
    let mut tables = Vec::new();
    for _ in 0..2 {
        let o = Command::new(env!("CARGO_BIN_EXE_strongsum"))
            .arg("verify")
            .arg("--config")
            .arg(&cfg)
            .output()
            .map_err(|e| e.to_string())?;
        check(o.status.success(), format!("verify failed: {}", String::from_utf8_lossy(&o.stderr)))?;
        tables.push(fs::read(out.join("verify.csv")).map_err(|e| e.to_string())?);
        fs::remove_dir_all(&out).map_err(|e| e.to_string())?;
    }
    check(tables[0] == tables[1], "CSV output differs between runs")?;
    Ok(format!("{} identical bytes", tables[0].len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "constant reproduction", limit: Some(Duration::from_secs(1)) },
        Criterion { id: 2, name: "representation oracle", limit: Some(Duration::from_secs(30)) },
        Criterion { id: 3, name: "kernel normalization", limit: Some(Duration::from_secs(10)) },
        Criterion { id: 4, name: "remez correctness", limit: Some(Duration::from_secs(5)) },
        Criterion { id: 5, name: "modulus oracle", limit: Some(Duration::from_secs(5)) },
        Criterion { id: 6, name: "class analyzer", limit: Some(Duration::from_secs(10)) },
        Criterion { id: 7, name: "bound boundedness", limit: Some(Duration::from_secs(300)) },
        Criterion { id: 8, name: "scaling invariance", limit: None },
        Criterion { id: 9, name: "old versus new bound", limit: None },
        Criterion { id: 10, name: "determinism", limit: None },
    ];
    let cases = bound_cases();
    let mut reports = Vec::new();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = match c.id {
            1 => constant_reproduction(),
            2 => representation(),
            3 => kernel_normalization(),
            4 => remez(),
            5 => modulus(),
            6 => class_analyzer(),
            7 => bound_boundedness(&cases, &mut reports),
            8 if reports.is_empty() => Err("no reports from criterion 7".into()),
            8 => scaling(&cases, &reports),
            9 => remark7(),
            _ => determinism(),
        };
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(msg), Some(limit)) if elapsed > limit => Err(format!("{msg}; took {elapsed:.2?} > {limit:?}")),
            (o, _) => o,
        };
        let time = match c.limit {
            Some(limit) => format!("{elapsed:.2?} of {limit:?}"),
            None => format!("{elapsed:.2?}"),
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {} [{time}]: {msg}", c.id, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {} [{time}]: {msg}", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
