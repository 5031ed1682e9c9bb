//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdlyap::app::execute;
use rdlyap::config::preset;
use rdlyap::diagnostics::GateStatus;
use rdlyap::integrator::StepFailure;
use rdlyap::{
    binom, choose_coefficients, eval_i_j, eval_l, evaluate_gates, quadratic_form_certificate, run,
    step_rk4, BoundarySpec, DtPolicy, FaceLambdas, FieldState, Grid, LyapCoefficients, Monitor,
    PairTerm, ReactionSpec, ReversibleParams, RunOptions, RunRecord, RunStatus, SignClass,
    StepStats, Tolerances, TripledParams, Variant,
};

use common::*;

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// 1 ------------------------------------------------------------------------

fn coefficient_certificate() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let margins = [1.1, 2.0, 5.0];
    let (mut worst_ratio, mut worst_theta) = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    let mut count = 0;
    for n in 0..200 {
        let a: f64 = rng.gen_range(0.1..10.0);
        let b: f64 = rng.gen_range(0.1..10.0);
        let p: u32 = rng.gen_range(1..=8);
        let margin = margins[n % 3];
        let (dec, inc) = choose_coefficients(a, b, p, margin).map_err(|e| e.to_string())?;
        let k = (margin * (a + b) * (a + b) / (4.0 * a * b)).sqrt();
        let c = 0.5 / k.powi(2 * p as i32 + 1);
        let big_c = 2.0 / k;
        for (coeffs, scale) in [(&dec, c), (&inc, big_c)] {
            count += 1;
            let th = coeffs.thetas();
            for (i, t) in th.iter().enumerate() {
                let want = scale.powi(i as i32 + 1) * k.powi((i * i) as i32);
                worst_theta = worst_theta.max(rel(*t, want));
            }
            for i in 0..th.len().saturating_sub(2) {
                let r = rel(th[i] * th[i + 2] / (th[i + 1] * th[i + 1]), k * k);
                worst_ratio = worst_ratio.max(r);
            }
            let cert = quadratic_form_certificate(a, b, coeffs);
            let oracle_neg = (0..th.len().saturating_sub(2)).all(|i| {
                (a + b).powi(2) * th[i + 1].powi(2) - 4.0 * a * b * th[i] * th[i + 2] < 0.0
            });
            if !(cert.pass && oracle_neg && cert.discriminants.iter().all(|d| *d < 0.0)) {
                failures.push(format!("D_i >= 0 at a={a}, b={b}, p={p}, margin={margin}"));
            }
        }
        let ck = dec.scale() * dec.k().powi(2 * p as i32 + 1);
        let bk = inc.scale() * inc.k();
        if ck > 0.5 + 1e-12 {
            failures.push(format!("c K^(2p+1) = {ck}"));
        }
        if bk < 2.0 - 1e-12 {
            failures.push(format!("C K = {bk}"));
        }
    }
    if worst_ratio > 1e-12 {
        failures.push(format!("ratio identity off by {worst_ratio:e}"));
    }
    if worst_theta > 1e-12 {
        failures.push(format!("thetas differ from scale^(i+1) K^(i^2) by {worst_theta:e}"));
    }
    check(
        failures.is_empty(),
        format!(
            "{count} sequences; worst ratio error {worst_ratio:.1e}, worst theta error {worst_theta:.1e}{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

// 2 ------------------------------------------------------------------------

fn boundary_sharpness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.1..10.0);
        let b: f64 = rng.gen_range(0.1..10.0);
        let p: u32 = rng.gen_range(2..=8);
        let k = ((a + b) * (a + b) / (4.0 * a * b)).sqrt();
        for (variant, scale) in [
            (Variant::Decreasing, 0.5 / k.powi(2 * p as i32 + 1)),
            (Variant::Increasing, 2.0 / k),
        ] {
            let coeffs = LyapCoefficients::new(p, k, variant, scale).map_err(|e| e.to_string())?;
            cases += 1;
            let cert = quadratic_form_certificate(a, b, &coeffs);
            let th = coeffs.thetas();
            for (i, d) in cert.discriminants.iter().enumerate() {
                let scale = (a + b).powi(2) * th[i + 1].powi(2);
                worst = worst.max(d.abs() / scale);
            }
        }
    }
    check(
        worst <= 1e-10,
        format!("{cases} sequences at K^2 = (a+b)^2/(4ab); max |D_i| relative {worst:.1e}"),
    )
}

// 3 ------------------------------------------------------------------------

fn reversible_preset_state() -> (FieldState, ReactionSpec, BoundarySpec) {
    let cfg = preset("pair_reversible").unwrap();
    assert_eq!(cfg.grid.cells, vec![128]);
    let s = cfg.build().unwrap();
    (s.initial, s.spec, s.bc)
}

fn mass_drift(record: &RunRecord) -> f64 {
    let m0 = record.samples[0].masses[0];
    record
        .samples
        .iter()
        .map(|s| (s.masses[0] - m0).abs() / m0.abs().max(1e-30))
        .fold(0.0, f64::max)
}

fn mass_conservation() -> Verdict {
    let (initial, spec, bc) = reversible_preset_state();
    let steps = 100_000;
    let limit = rdlyap::cfl_dt(&initial.grid, &initial.diffusion, 1.0);
    let dt = 0.5 * limit;
    let opts = RunOptions {
        horizon: dt * steps as f64,
        dt: DtPolicy::Fixed { dt },
        cadence: 1000,
        ..RunOptions::default()
    };
    let res = run(&initial, &spec, &bc, &opts).map_err(|e| e.to_string())?;
    let drift = mass_drift(&res.record);

    let broken = ReactionSpec::unbalanced(spec.clone(), 0.5);
    let control = run(&initial, &broken, &bc, &opts).map_err(|e| e.to_string())?;
    let control_drift = mass_drift(&control.record);
    let gates = evaluate_gates(&control.record, &Tolerances::default());
    let gate_fails = gates.gate("mass_0_1").map(|g| g.status) == Some(GateStatus::Fail);
    check(
        res.step_count == steps && drift <= 1e-8 && control_drift > 1e-4 && gate_fails,
        format!(
            "{} steps: drift {drift:.1e}; broken pairing drift {control_drift:.1e} (mass gate fails: {gate_fails})",
            res.step_count
        ),
    )
}

// 4, 5 ---------------------------------------------------------------------

/// `f = sign · u v`, a = 1, b = 4, p = 4 with the given θ variant.
fn descent_scenario(sign: f64, variant: Variant) -> (FieldState, ReactionSpec, BoundarySpec, Monitor) {
    let initial = bump_pair(64, 1.0, 4.0);
    // generic pairs evolve f = −φ.
    let spec = ReactionSpec::generic_pair(vec![PairTerm::new(-sign, 1.0, 1.0)]).unwrap();
    let (dec, inc) = choose_coefficients(1.0, 4.0, 4, 2.0).unwrap();
    let coeffs = match variant {
        Variant::Decreasing => dec,
        Variant::Increasing => inc,
    };
    let monitor = Monitor {
        label: "0_1".into(),
        pair: (0, 1),
        coeffs,
    };
    (initial, spec, BoundarySpec::neumann(2), monitor)
}

fn descent_run(sign: f64, variant: Variant) -> Result<(RunRecord, String), String> {
    let (initial, spec, bc, monitor) = descent_scenario(sign, variant);
    let opts = RunOptions {
        horizon: 0.1,
        cadence: 1,
        monitors: vec![monitor],
        ..RunOptions::default()
    };
    let res = run(&initial, &spec, &bc, &opts).map_err(|e| e.to_string())?;
    let rec = res.record;
    let mut bad = Vec::new();
    for w in rec.samples.windows(2) {
        let (l0, l1) = (w[0].monitors[0].l, w[1].monitors[0].l);
        if l1 > l0 * (1.0 + 1e-10) + 1e-14 {
            bad.push(format!("L rises at t={}", w[1].t));
            break;
        }
    }
    let (mut max_i, mut max_j) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in &rec.samples {
        let m = &s.monitors[0];
        let (i, j) = (m.i.unwrap(), m.j.unwrap());
        max_i = max_i.max(i / m.i_scale.unwrap().max(f64::MIN_POSITIVE));
        max_j = max_j.max(j / m.j_scale.unwrap().max(f64::MIN_POSITIVE));
        if i > 1e-12 * m.i_scale.unwrap() {
            bad.push(format!("I > 0 at t={}", s.t));
            break;
        }
        if j > 1e-12 * m.j_scale.unwrap() {
            bad.push(format!("J > 0 at t={}", s.t));
            break;
        }
    }
    let detail = format!(
        "{} samples, max I/|I| {max_i:.2}, max J/|J| {max_j:.2}",
        rec.samples.len()
    );
    if bad.is_empty() {
        Ok((rec, detail))
    } else {
        Err(format!("{detail}; {}", bad.join(", ")))
    }
}

fn lyapunov_descent(records: &mut Vec<RunRecord>) -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for (sign, variant, name) in [
        (-1.0, Variant::Increasing, "f=-uv"),
        (1.0, Variant::Decreasing, "f=+uv"),
    ] {
        match descent_run(sign, variant) {
            Ok((rec, d)) => {
                let signs_ok = rec.samples.iter().all(|s| variant.matches(s.signs[0]));
                ok &= signs_ok;
                details.push(format!("{name} with {} theta: {d}", variant.label()));
                records.push(rec);
            }
            Err(d) => {
                ok = false;
                details.push(format!("{name} with {} theta: {d}", variant.label()));
            }
        }
    }
    check(ok, details.join(" | "))
}

/// The literal pairing (f <= 0 with decreasing θ) for comparison.
fn literal_pairing_note() -> String {
    let (initial, spec, bc, monitor) = descent_scenario(-1.0, Variant::Decreasing);
    let t = eval_i_j(&initial, (0, 1), &monitor.coeffs, &spec, 0.0, &bc).unwrap();
    format!(
        "f=-uv with decreasing theta gives J = {:.3e} > 0 (J/|J| = {:.2}); the sign-matched pairing is used above",
        t.j,
        t.j / t.j_scale
    )
}

fn derivative_consistency() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for (sign, variant, name) in [
        (-1.0, Variant::Increasing, "f=-uv"),
        (1.0, Variant::Decreasing, "f=+uv"),
    ] {
        let (initial, spec, bc, monitor) = descent_scenario(sign, variant);
        // Snapshot after a short transient.
        let opts = RunOptions {
            horizon: 0.01,
            cadence: usize::MAX,
            ..RunOptions::default()
        };
        let snap = run(&initial, &spec, &bc, &opts).map_err(|e| e.to_string())?.final_state;
        let c = &monitor.coeffs;
        let ij = eval_i_j(&snap, (0, 1), c, &spec, snap.t, &bc).map_err(|e| e.to_string())?;
        let l0 = eval_l(&snap, (0, 1), c).unwrap();
        let dt0 = 0.5 * rdlyap::cfl_dt(&snap.grid, &snap.diffusion, 1.0);
        let mut errs = Vec::new();
        for k in 0..3 {
            let dt = dt0 / f64::from(1 << k);
            let mut stats = StepStats::default();
            let next = step_rk4(&snap, dt, &spec, &bc, &mut stats).map_err(|e| match e {
                StepFailure::BlowUp { t } => format!("blow-up at {t}"),
                StepFailure::Invalid(e) => e.to_string(),
            })?;
            let l1 = eval_l(&next, (0, 1), c).unwrap();
            errs.push(((l1 - l0) / dt - (ij.i + ij.j)).abs());
        }
        let bound = 0.1 * (ij.i.abs() + ij.j.abs() + 1e-12);
        let shrinks = errs.windows(2).all(|w| w[1] < w[0]);
        ok &= errs[2] <= bound && shrinks;
        details.push(format!(
            "{name}: |dL/dt - (I+J)| = {:.2e}, {:.2e}, {:.2e} vs bound {bound:.2e}",
            errs[0], errs[1], errs[2]
        ));
    }
    check(ok, details.join(" | "))
}

// 6 ------------------------------------------------------------------------

fn lp_bound(records: &[RunRecord]) -> Verdict {
    let mut worst = 0.0f64;
    let mut n = 0;
    for rec in records {
        for s in &rec.samples {
            for m in &s.monitors {
                worst = worst.max(m.lp_ratio);
                n += 1;
            }
        }
    }
    check(
        n > 0 && worst <= 1.0 + 1e-12,
        format!("{} runs, {n} monitor samples, max ratio {worst:.6}", records.len()),
    )
}

// 7 ------------------------------------------------------------------------

fn max_principle() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["pair_generic", "pair_spacetime", "pair_reversible"] {
        let mut cfg = preset(name).unwrap();
        cfg.species.diffusion = vec![1.5, 1.5];
        cfg.lyapunov.enabled = false;
        let s = cfg.build().unwrap();
        let opts = RunOptions {
            horizon: 0.05,
            cadence: 1,
            lp_orders: vec![f64::INFINITY],
            ..RunOptions::default()
        };
        let res = run(&s.initial, &s.spec, &s.bc, &opts).map_err(|e| e.to_string())?;
        let sup: Vec<f64> = res.record.samples.iter().map(|s| s.norms[2]).collect();
        let worst = sup
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= worst <= 1e-12;
        details.push(format!("{name}: {} steps, max rise {worst:.1e}", res.step_count));
    }
    check(ok, details.join(" | "))
}

// 8 ------------------------------------------------------------------------

fn ode_oracle() -> Verdict {
    let (h1, h2, l, q, r, s) = (1.0, 1.0, 2.0, 1.0, 1.0, 2.0);
    let spec = ReactionSpec::reversible_pair(ReversibleParams { h1, h2, l, q, r, s }).unwrap();
    let initial = homogeneous_pair(8, 1.5, 0.5, 0.0, 0.0);
    let bc = BoundarySpec::neumann(2);
    let dt = 0.05;
    let steps = 1000;
    let opts = RunOptions {
        horizon: dt * steps as f64,
        dt: DtPolicy::Fixed { dt },
        cadence: 1,
        ..RunOptions::default()
    };
    let res = run(&initial, &spec, &bc, &opts).map_err(|e| e.to_string())?;
    let reference = rk4_ode(reversible_rhs(h1, h2, l, q, r, s), [1.5, 0.5], dt, steps);
    let mut worst = 0.0f64;
    for smp in &res.record.samples {
        // Homogeneous data: the sup over cells is the common cell value.
        let y = reference[smp.step];
        worst = worst.max(rel(smp.linf[0], y[0])).max(rel(smp.linf[1], y[1]));
    }
    let fin = &res.final_state;
    let homogeneous = fin.species.iter().all(|s| s.iter().all(|v| *v == s[0]));
    let (u, v) = (fin.species[0][0], fin.species[1][0]);
    let residual = (h1 * u.powf(l) * v.powf(q) - h2 * u.powf(r) * v.powf(s)).abs();
    check(
        res.step_count == steps && worst <= 1e-8 && residual <= 1e-6 && homogeneous,
        format!(
            "{} steps to t={}: max relative error {worst:.1e}, equilibrium residual {residual:.1e} at (u, v) = ({u:.6}, {v:.6})",
            res.step_count, res.final_time
        ),
    )
}

// 9 ------------------------------------------------------------------------

fn tripled_bit_exact(spec: &ReactionSpec) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut out = [0.0; 3];
    (0..10_000).all(|n| {
        let c = [
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
        ];
        spec.eval_rhs(0.0, n, &[0.5, 0.0], &c, &mut out).unwrap();
        out[0] == out[1] && out[0] == -out[2]
    })
}

fn tripled_run(cfg: rdlyap::config::RunConfig, label: &str, records: &mut Vec<RunRecord>) -> (bool, String) {
    let spec = cfg.build().unwrap().spec;
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => return (false, format!("{label}: {e}")),
    };
    let rec = &outcome.result.record;
    let completed = outcome.result.status == RunStatus::Completed;
    let certs = outcome.certificates.iter().all(|c| c.certificate.pass);
    let want = [
        "mass_0_2",
        "mass_1_2",
        "lyapunov_descent_0_2",
        "lyapunov_descent_1_2",
        "i_nonpositive_0_2",
        "i_nonpositive_1_2",
        "j_nonpositive_0_2",
        "j_nonpositive_1_2",
        "lp_ratio_0_2",
        "lp_ratio_1_2",
        "no_blowup",
    ];
    let missing: Vec<&str> = want
        .iter()
        .copied()
        .filter(|g| outcome.gates.gate(g).map(|g| g.status) != Some(GateStatus::Pass))
        .collect();
    let bit_exact = tripled_bit_exact(&spec);
    let signs: Vec<&str> = rec.samples.last().unwrap().signs.iter().map(SignClass::label).collect();
    records.push(rec.clone());
    (
        completed && certs && missing.is_empty() && bit_exact,
        format!(
            "{label}: t={}, signs {signs:?}, certificates {certs}, f_u = f_v = -f_w bit-exact {bit_exact}{}",
            outcome.result.final_time,
            if missing.is_empty() { String::new() } else { format!(", gates not passing: {missing:?}") }
        ),
    )
}

fn tripled_system(records: &mut Vec<RunRecord>) -> Verdict {
    let mut cfg = preset("tripled").unwrap();
    cfg.time.horizon = 5.0;
    assert_eq!(cfg.grid.cells, vec![64]);
    let (ok_a, a) = tripled_run(cfg.clone(), "unit preset", records);
    // The unit preset's two channels cancel; a non-degenerate variant too.
    cfg.reaction = rdlyap::ReactionKind::Tripled(TripledParams {
        a1: 2.0,
        p2: 2.0,
        ..TripledParams::unit()
    });
    let (ok_b, b) = tripled_run(cfg, "a1=2, p2=2", records);
    check(ok_a && ok_b, format!("{a} | {b}"))
}

// 10 -----------------------------------------------------------------------

fn stencil_error(n: usize, neumann: bool) -> f64 {
    let g = Grid::unit_interval(n).unwrap();
    let pi = std::f64::consts::PI;
    let (w, faces) = if neumann {
        (g.sample(|x| (pi * x[0]).cos()), FaceLambdas::NEUMANN)
    } else {
        (g.sample(|x| (pi * x[0]).sin()), FaceLambdas::DIRICHLET)
    };
    let mut out = vec![0.0; n];
    g.laplacian_into(&w, &faces, &mut out).unwrap();
    out.iter()
        .zip(&w)
        .map(|(l, w)| (l + pi * pi * w).abs())
        .fold(0.0, f64::max)
}

fn rk4_error(dt: f64, reference: &FieldState) -> f64 {
    let spec = ReactionSpec::reversible_pair(ReversibleParams {
        h1: 1.0,
        h2: 1.0,
        l: 2.0,
        q: 1.0,
        r: 1.0,
        s: 2.0,
    })
    .unwrap();
    let initial = homogeneous_pair(4, 1.5, 0.5, 0.0, 0.0);
    let opts = RunOptions {
        horizon: 1.0,
        dt: DtPolicy::Fixed { dt },
        cadence: usize::MAX,
        ..RunOptions::default()
    };
    let fin = run(&initial, &spec, &BoundarySpec::neumann(2), &opts).unwrap().final_state;
    (fin.species[0][0] - reference.species[0][0]).abs()
}

fn discretization_orders() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (neumann, name) in [(false, "sin Dirichlet"), (true, "cos Neumann")] {
        let e: Vec<f64> = [16, 32, 64].iter().map(|&n| stencil_error(n, neumann)).collect();
        let r = [e[0] / e[1], e[1] / e[2]];
        ok &= r.iter().all(|r| (3.2..=4.8).contains(r));
        parts.push(format!("stencil {name} ratios {:.3}, {:.3}", r[0], r[1]));
    }
    let spec = ReactionSpec::reversible_pair(ReversibleParams {
        h1: 1.0,
        h2: 1.0,
        l: 2.0,
        q: 1.0,
        r: 1.0,
        s: 2.0,
    })
    .unwrap();
    let dt = 0.1;
    let reference = run(
        &homogeneous_pair(4, 1.5, 0.5, 0.0, 0.0),
        &spec,
        &BoundarySpec::neumann(2),
        &RunOptions {
            horizon: 1.0,
            dt: DtPolicy::Fixed { dt: dt / 8.0 },
            cadence: usize::MAX,
            ..RunOptions::default()
        },
    )
    .map_err(|e| e.to_string())?
    .final_state;
    let ratio = rk4_error(dt, &reference) / rk4_error(dt / 2.0, &reference);
    ok &= (8.0..=32.0).contains(&ratio);
    parts.push(format!("RK4 ratio {ratio:.2}"));
    check(ok, parts.join(", "))
}

// 11 -----------------------------------------------------------------------

fn binomial_machinery() -> Verdict {
    let tri = pascal(30);
    let mut checked = 0;
    for p in 0..=30u32 {
        for i in 0..=p {
            let b = binom(p, i).map_err(|e| e.to_string())?;
            if b != tri[p as usize][i as usize] {
                return Err(format!("binom({p},{i}) = {b}, Pascal gives {}", tri[p as usize][i as usize]));
            }
            if i >= 1 {
                let lhs = u128::from(i) * u128::from(b);
                let rhs = u128::from(p) * u128::from(binom(p - 1, i - 1).unwrap());
                if lhs != rhs {
                    return Err(format!("absorption fails at p={p}, i={i}"));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} coefficients match Pascal's triangle; absorption identity exact"))
}

// 12 -----------------------------------------------------------------------

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = preset("pair_reversible").unwrap();
    cfg.time.horizon = 0.05;
    cfg.species.noise = 0.05;
    cfg.species.seed = 1234;
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, cfg.serialize()).unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_rdlyap"))
            .args(["run", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if status.status.code() != Some(0) {
            return Err(format!(
                "run exited with {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        outputs.push(read(&out.join("record.csv"))?);
    }
    check(
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!("two CLI runs, record.csv {} bytes each, identical: {}", outputs[0].len(), outputs[0] == outputs[1]),
    )
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() {
    let mut records = Vec::new();
    let mut results: Vec<(u32, &str, Verdict, f64)> = Vec::new();
    let mut time = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        results.push((n, name, v, start.elapsed().as_secs_f64()));
    };
    time(1, "coefficient certificate", &mut coefficient_certificate);
    time(2, "boundary sharpness", &mut boundary_sharpness);
    time(3, "mass conservation", &mut mass_conservation);
    time(4, "Lyapunov descent", &mut || lyapunov_descent(&mut records));
    time(5, "descent-derivative consistency", &mut derivative_consistency);
    time(9, "tripled system", &mut || tripled_system(&mut records));
    time(6, "L^p bound", &mut || lp_bound(&records));
    time(7, "equal-diffusion maximum principle", &mut max_principle);
    time(8, "ODE oracle", &mut ode_oracle);
    time(10, "discretization orders", &mut discretization_orders);
    time(11, "binomial machinery", &mut binomial_machinery);
    time(12, "determinism", &mut determinism);
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, name, verdict, secs) in &results {
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name} ({secs:.1}s): {detail}");
        if *n == 4 {
            println!("             note: {}", literal_pairing_note());
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
