//! Exit criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fracroot::dixit_pindyck::{
    back_substitute, derive_constants, full_residual, reduced_residual, relative_full_residual,
    solve_thresholds, EconomicPrimitives,
};
use fracroot::kernel::{constant_frac_deriv, FractionalOrder};
use fracroot::reference::REFERENCE_ROWS;
use fracroot::solver::{
    alpha_sweep, default_grid, distance2, estimate_order, fixed_point_solve, fpn_step, newton_step,
    norm2, ClassicalNewton, Infallible, ResidualFunction, SolverSettings,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{mat_vec, oracle_kernel, rel_err};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn initial_residuals() -> Check {
    let mut worst = 0.0f64;
    for row in &REFERENCE_ROWS {
        let k = row.constants();
        let start = Instant::now();
        let r = reduced_residual(&k, row.x0).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let err = rel_err(norm2(&r), row.initial_residual_norm);
        worst = worst.max(err);
        ensure(err <= 1e-5, || format!("row {}: ‖f(x₀)‖₂ = {} rel err {err:e}", row.row, norm2(&r)))?;
        ensure(elapsed < Duration::from_millis(1), || format!("row {}: took {elapsed:?}", row.row))?;
    }
    Ok(format!("5 rows, worst rel err {worst:.2e} (bound 1e-5)"))
}

fn reference_solutions() -> Check {
    let mut worst = 0.0f64;
    let mut counts = Vec::new();
    for row in &REFERENCE_ROWS {
        let start = Instant::now();
        let sol = solve_thresholds(&row.problem(), &row.settings()).map_err(|e| format!("row {}: {e}", row.row))?;
        let elapsed = start.elapsed();
        let err = rel_err(sol.h, row.solution[0]).max(rel_err(sol.l, row.solution[1]));
        worst = worst.max(err);
        ensure(err <= 1e-4, || format!("row {}: ({}, {}) rel err {err:e}", row.row, sol.h, sol.l))?;
        ensure(sol.outcome.final_residual_norm <= 1e-4, || {
            format!("row {}: ‖f(xₙ)‖₂ = {}", row.row, sol.outcome.final_residual_norm)
        })?;
        ensure(sol.outcome.iterations <= 300, || format!("row {}: n = {}", row.row, sol.outcome.iterations))?;
        ensure(elapsed < Duration::from_secs(1), || format!("row {}: took {elapsed:?}", row.row))?;
        counts.push(format!("{} (published {})", sol.outcome.iterations, row.iterations));
    }
    Ok(format!("worst rel err {worst:.2e} (bound 1e-4); iterations {}", counts.join(", ")))
}

fn reduction_consistency() -> Check {
    let mut worst = 0.0f64;
    for row in &REFERENCE_ROWS {
        let sol = solve_thresholds(&row.problem(), &row.settings()).map_err(|e| e.to_string())?;
        let k = row.constants();
        let (a, b) = back_substitute(&k, [sol.h, sol.l]).map_err(|e| e.to_string())?;
        let full = full_residual(&k, sol.h, sol.l, a, b).map_err(|e| e.to_string())?;
        let rel = relative_full_residual(&k, &full, sol.h, sol.l);
        worst = worst.max(rel);
        ensure(rel <= 1e-3, || format!("row {}: relative full residual {rel:e}", row.row))?;
    }
    Ok(format!("worst relative full residual {worst:.2e} (bound 1e-3)"))
}

fn kernel_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65726e);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let beta: f64 = rng.gen_range(-2.0..=2.0);
        if (beta - beta.round()).abs() < 1e-9 {
            continue;
        }
        let x = 10f64.powf(rng.gen_range(-3.0..=5.0));
        let got = constant_frac_deriv(beta, x).map_err(|e| e.to_string())?;
        let err = rel_err(got, oracle_kernel(beta, x));
        worst = worst.max(err);
        ensure(err <= 1e-10, || format!("β = {beta}, x = {x}: rel err {err:e}"))?;
        n += 1;
    }
    let at_one = constant_frac_deriv(1.0, 0.0).map_err(|e| e.to_string())?;
    ensure(at_one == 0.0, || format!("β = 1 gave {at_one}"))?;
    Ok(format!("1000 samples, worst rel err {worst:.2e} (bound 1e-10); β = 1 → 0"))
}

fn fixed_point_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x66697865);
    let mut converged = 0;
    for case in 0..1000 {
        let n = [1, 2, 4][case % 3];
        let root: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..10.0)).collect();
        let mut m = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                m[j * n + k] = if j == k { 1.0 } else { 0.0 } + rng.gen_range(-0.2..0.2);
            }
        }
        let f = Infallible(|x: &[f64]| {
            let d: Vec<f64> = x.iter().zip(&root).map(|(a, b)| a - b).collect();
            mat_vec(&m, &d)
        });
        let alpha = FractionalOrder::new(rng.gen_range(0.05..0.95)).unwrap();
        let at_root = fpn_step(&f, &root, alpha, 1e-4).map_err(|e| e.to_string())?;
        ensure(at_root == root, || format!("case {case}: fpn_step moved the root"))?;

        let start: Vec<f64> = root.iter().map(|r| r * rng.gen_range(0.5..1.5)).collect();
        let mut settings = SolverSettings::new(alpha);
        settings.record_trace = true;
        let out = fixed_point_solve(
            &fracroot::solver::FractionalPseudoNewton::new(alpha, settings.epsilon),
            &f,
            &start,
            &settings,
        )
        .map_err(|e| e.to_string())?;
        if out.converged() {
            converged += 1;
            let trace = out.trace.as_ref().unwrap();
            let prev = &trace.iterates[trace.iterates.len() - 2];
            let step = distance2(&out.x_final, prev);
            let residual = norm2(&f.evaluate(&out.x_final).unwrap());
            ensure(step <= settings.tol_step && residual <= settings.tol_residual, || {
                format!("case {case}: step {step:e}, residual {residual:e}")
            })?;
        }
    }
    ensure(converged > 0, || "no perturbed start converged".into())?;
    Ok(format!("1000 roots fixed exactly; {converged} converged solves re-verified"))
}

fn constant_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x636f6e73);
    let mut n = 0;
    while n < 1000 {
        let p = EconomicPrimitives {
            mu: rng.gen_range(-0.1..0.1),
            sigma: rng.gen_range(0.01..1.0),
            l: rng.gen_range(0.001..0.3),
            c: rng.gen_range(0.0..1e3),
            kappa: rng.gen_range(0.0..1e2),
            chi: rng.gen_range(0.0..1e2),
        };
        if p.l <= p.mu {
            continue;
        }
        let k = derive_constants(&p).map_err(|e| e.to_string())?;
        let checks = [
            k.a3 - k.a1 - 1.0,
            k.a2 - k.a4 - 1.0,
            k.a1 + k.a2 - 2.0 * k.rho,
            k.a6 - k.a7 - (p.kappa + p.chi),
        ];
        ensure(checks.iter().all(|d| d.abs() <= 1e-10), || format!("{p:?}: {checks:?}"))?;
        n += 1;
    }
    let hand = EconomicPrimitives { mu: 0.0, sigma: 1.0, l: 0.5, c: 1.0, kappa: 0.1, chi: 0.05 };
    let k = derive_constants(&hand).map_err(|e| e.to_string())?;
    let expected = [
        (k.rho, 1.118_033_989),
        (k.a1, 0.618_033_989),
        (k.a2, 1.618_033_989),
        (k.a3, 1.618_033_989),
        (k.a4, 0.618_033_989),
        (k.a5, 2.0),
        (k.a6, 2.1),
        (k.a7, 1.95),
    ];
    for (got, want) in expected {
        ensure((got - want).abs() <= 1e-9, || format!("hand example: {got} vs {want}"))?;
    }
    Ok("1000 random primitives within 1e-10; hand example within 1e-9".into())
}

fn multi_root_discovery() -> Check {
    let f = Infallible(|x: &[f64]| vec![x[0] * x[0] - 1.0]);
    let mut settings = SolverSettings::new(FractionalOrder::new(0.5).unwrap());
    settings.aitken = true;
    settings.tol_step = 1e-10;
    settings.tol_residual = 1e-10;
    let start = Instant::now();
    let set = alpha_sweep(&f, &[2.0], &default_grid(), &settings).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let neg = set.find_near(&[-1.0], 1e-6).ok_or_else(|| format!("-1 missing: {:?}", roots(&set)))?;
    let pos = set.find_near(&[1.0], 1e-6).ok_or_else(|| format!("+1 missing: {:?}", roots(&set)))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "roots {:?}; -1 found by {} orders, +1 by {}; {elapsed:.2?}",
        roots(&set),
        neg.found_by.len(),
        pos.found_by.len()
    ))
}

fn roots(set: &fracroot::solver::RootSet) -> Vec<f64> {
    set.roots.iter().map(|r| r.x[0]).collect()
}

fn convergence_order() -> Check {
    let mut per_row = Vec::new();
    let mut selected = None;
    for row in &REFERENCE_ROWS {
        let mut settings = row.settings();
        settings.record_trace = true;
        let sol = solve_thresholds(&row.problem(), &settings).map_err(|e| e.to_string())?;
        let steps = &sol.outcome.trace.as_ref().unwrap().step_norms;
        let p = estimate_order(steps);
        per_row.push(match &p {
            Ok(p) => format!("row {}: {p:.3}", row.row),
            Err(e) => format!("row {}: {e}", row.row),
        });
        if row.row == 2 {
            selected = Some(p.map_err(|e| e.to_string())?);
        }
    }
    let linear = selected.unwrap();
    ensure((linear - 1.0).abs() <= 0.05, || format!("row 2 order {linear}"))?;

    let mut e = vec![0.5f64];
    for _ in 0..5 {
        let last = *e.last().unwrap();
        e.push(last * last);
    }
    let quadratic = estimate_order(&e).map_err(|e| e.to_string())?;
    ensure((quadratic - 2.0).abs() <= 0.05, || format!("quadratic order {quadratic}"))?;
    Ok(format!("row 2 step norms → {linear:.4}; squaring sequence → {quadratic:.4} [{}]", per_row.join("; ")))
}

fn newton_baseline() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e657774);
    let mut cases = 0;
    let mut worst = 0.0f64;
    while cases < 500 {
        let n = rng.gen_range(1..=6);
        let m: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let root: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let b: Vec<f64> = mat_vec(&m, &root).iter().map(|v| -v).collect();
        let mat = nalgebra::DMatrix::from_row_slice(n, n, &m);
        let sv = mat.singular_values();
        if sv.min() / sv.max() < 1e-3 {
            continue;
        }
        let f = Infallible(|x: &[f64]| mat_vec(&m, x).iter().zip(&b).map(|(a, c)| a + c).collect());
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let x1 = newton_step(&f, &x0).map_err(|e| e.to_string())?;
        let err = distance2(&x1, &root) / norm2(&root).max(1.0);
        worst = worst.max(err);
        ensure(err <= 1e-6, || format!("n = {n}: rel err {err:e}"))?;
        cases += 1;
    }

    let f = Infallible(|x: &[f64]| vec![x[0] * x[0] - 2.0]);
    let mut settings = SolverSettings::new(FractionalOrder::new(0.5).unwrap());
    settings.tol_step = 1e-12;
    settings.tol_residual = 1e-12;
    settings.max_iter = 8;
    let out = fixed_point_solve(&ClassicalNewton::default(), &f, &[1.5], &settings).map_err(|e| e.to_string())?;
    let err = (out.x_final[0] - 2f64.sqrt()).abs();
    ensure(out.converged() && err <= 1e-10, || format!("√2 solve: {:?}, err {err:e}", out.status))?;
    Ok(format!(
        "{cases} affine systems, worst rel err {worst:.2e}; √2 in {} iterations (err {err:.1e})",
        out.iterations
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("initial residual reproduction", initial_residuals),
        ("reference solution reproduction", reference_solutions),
        ("reduction consistency", reduction_consistency),
        ("kernel oracle suite", kernel_oracle),
        ("fixed-point property suite", fixed_point_properties),
        ("constant-identity suite", constant_identities),
        ("multi-root discovery", multi_root_discovery),
        ("convergence-order diagnostic", convergence_order),
        ("newton baseline", newton_baseline),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
