//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kgpilot::guidance::DEFAULT_SCAN_POINTS;
use kgpilot::{
    charge_conjugation_check, eigen_flow, eval_field, gauss_flux, integrate_classical, j0,
    residuals, roots_of_s0, stress_tensor, v_debroglie, v_energy, v_theta, BoxConfig,
    ClassicalState, EigenFlow, EventKind, ModeSpec, PotentialSpec, Sector, SpacetimeRect,
    TabulatedPotential, TwoVector, WaveState,
};
use kgpilot_cli::commands::{cmd_scan, cmd_trace, scan_rows, trace_batch, TraceItem};
use kgpilot_cli::{Preset, RunConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

/// Name, check and runtime limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn two_mode() -> WaveState<f64> {
    WaveState::equal_superposition(BoxConfig::unit_pi(), &[1, 2]).unwrap()
}

fn preset(p: Preset) -> RunConfig {
    let mut cfg = RunConfig::default();
    p.apply(&mut cfg);
    cfg
}

fn traces(cfg: &RunConfig) -> Result<Vec<TraceItem>, String> {
    let batch = trace_batch(cfg).map_err(|e| e.to_string())?;
    for (i, item) in batch.iter().enumerate() {
        if let Err(e) = &item.record {
            return Err(format!("initial condition {i} failed: {e}"));
        }
    }
    Ok(batch)
}

fn s0_roots() -> Outcome {
    let s = two_mode();
    let roots = roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS);
    check!(roots.len() == 2, "expected two roots, got {roots:?}");
    for (r, want) in roots.iter().zip([1.898, 2.086]) {
        check!((r - want).abs() <= 2e-3, "root {r} vs {want}");
        let v = s.polar_at(*r, 0.1, 0.0).unwrap().s_cov[0];
        check!(v.abs() < 1e-8, "|S0| = {v:e} at {r}");
    }
    Ok(format!("roots {:.5}, {:.5}", roots[0], roots[1]))
}

fn superluminal() -> Outcome {
    let s = two_mode();
    let cfg = RunConfig {
        grid_n: DEFAULT_SCAN_POINTS,
        ..Default::default()
    };
    let rows = scan_rows(&cfg).map_err(|e| e.to_string())?;
    let peak = rows
        .iter()
        .filter_map(|r| r.v_debroglie)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    check!(peak > 1.0, "scan max |v| = {peak}");
    let mut closest = f64::INFINITY;
    for r in roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS) {
        let mut last = 0.0;
        for d in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let speed = |x: f64| v_debroglie(&s.polar_at(x, 0.1, 0.0).unwrap()).map(f64::abs);
            let (lo, hi) = (
                speed(r - d).map_err(|e| e.to_string())?,
                speed(r + d).map_err(|e| e.to_string())?,
            );
            check!(
                lo > last && hi > last,
                "|v| not growing toward root {r} at offset {d}"
            );
            last = lo.min(hi);
        }
        check!(last > 1e4, "|v| only {last} at 1e-6 from root {r}");
        closest = closest.min(last);
    }
    Ok(format!(
        "scan max |v| = {peak:.3}, |v| >= {closest:.3e} at 1e-6 from roots"
    ))
}

fn loop_dichotomy() -> Outcome {
    let run = |p: Preset| {
        let mut cfg = preset(p);
        cfg.step = 1e-4;
        traces(&cfg)
    };
    let (db, md) = rayon::join(|| run(Preset::Fig2), || run(Preset::Fig5));
    let (db, md) = (db?, md?);
    let loops: usize = db
        .iter()
        .map(|i| {
            i.record
                .as_ref()
                .unwrap()
                .count(EventKind::SelfIntersection)
        })
        .sum();
    let backwards = db
        .iter()
        .filter(|i| !i.record.as_ref().unwrap().t_is_monotone())
        .count();
    check!(loops >= 1, "de Broglie produced no self-intersections");
    check!(backwards >= 1, "every de Broglie path has monotone t");
    for (k, item) in md.iter().enumerate() {
        let r = item.record.as_ref().unwrap();
        check!(
            r.count(EventKind::SelfIntersection) == 0,
            "modified path {k} self-intersects"
        );
        check!(
            r.samples.iter().all(|p| p.dtau_t >= 0.0),
            "modified path {k} has dt/dtau < 0"
        );
    }
    Ok(format!(
        "de Broglie: {loops} self-intersections, {backwards} non-monotone; modified: none"
    ))
}

fn energy_timelike() -> Outcome {
    let s = two_mode();
    let mut worst = 0.0f64;
    for i in 1..4096 {
        let p = s.polar_at(PI * i as f64 / 4096.0, 0.1, 1e-10).unwrap();
        if p.near_node {
            continue;
        }
        if let Ok(v) = stress_tensor(&p, 1.0).and_then(|t| v_energy(&t)) {
            worst = worst.max(v.abs());
        }
    }
    check!(worst < 1.0, "max |v_energy| = {worst}");
    let batch = traces(&preset(Preset::Fig7))?;
    let mut along = 0.0f64;
    for item in &batch {
        for p in &item.record.as_ref().unwrap().samples {
            along = along.max((p.dtau_x / p.dtau_t).abs());
        }
    }
    check!(along < 1.0, "trajectory |dx/dt| reached {along}");
    Ok(format!(
        "grid max |v| = {worst:.4}, path max |dx/dt| = {along:.4}"
    ))
}

/// Non-node test point: amplitude above 1e-3 of the box maximum.
fn random_point(rng: &mut StdRng, s: &WaveState<f64>) -> (f64, f64) {
    loop {
        let (x, t) = (
            rng.gen_range(0.01..0.99) * s.length(),
            rng.gen_range(-5.0..5.0),
        );
        if eval_field(s, x, t).unwrap().value.norm() > 1e-3 * s.max_amplitude(t, 512) {
            return (x, t);
        }
    }
}

fn identity_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let states = [
        (PI, 1.0, 0.5f64.sqrt(), 0.5f64.sqrt()),
        (2.0, 0.6, 0.3, -1.1),
    ];
    let (mut cont, mut hj, mut kg, mut cur) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let (len, m0, a1, a2) = states[k % 2];
        let s = WaveState::new(
            BoxConfig::new(len, m0).unwrap(),
            vec![ModeSpec::real(1, a1), ModeSpec::real(2, a2)],
        )
        .unwrap();
        let (x, t) = random_point(&mut rng, &s);
        let f = eval_field(&s, x, t).unwrap();
        kg = kg.max((f.dtt - f.dxx + f.value * m0 * m0).norm());
        let r = residuals(&s, x, t, 0.0).map_err(|e| e.to_string())?;
        cont = cont.max(r.continuity.abs());
        hj = hj.max(r.hamilton_jacobi.abs());
        let w = |n: f64| ((n * PI / len).powi(2) + m0 * m0).sqrt();
        let mode = |n: f64| (2.0 / len).sqrt() * (n * PI * x / len).sin();
        let (p1, p2) = (mode(1.0), mode(2.0));
        let closed = (w(1.0) * a1 * a1 * p1 * p1
            + w(2.0) * a2 * a2 * p2 * p2
            + (w(1.0) + w(2.0)) * a1 * a2 * p1 * p2 * ((w(1.0) - w(2.0)) * t).cos())
            / m0;
        cur = cur.max((j0(&s, x, t).unwrap() - closed).abs());
    }
    check!(cont < 1e-8, "continuity residual {cont:e}");
    check!(hj < 1e-8, "Hamilton-Jacobi residual {hj:e}");
    check!(kg < 1e-8, "Klein-Gordon residual {kg:e}");
    check!(cur < 1e-10, "J0 closed form deviation {cur:e}");
    Ok(format!(
        "continuity {cont:.1e}, HJ {hj:.1e}, KG {kg:.1e}, J0 {cur:.1e}"
    ))
}

fn eigen_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let s = two_mode();
    let apply = |m: &[[f64; 2]; 2], w: &TwoVector<f64>| {
        TwoVector::new(m[0][0] * w.t + m[0][1] * w.x, m[1][0] * w.t + m[1][1] * w.x)
    };
    let (mut res, mut orth, mut tr, mut route) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut n = 0;
    while n < 1000 {
        let (x, t) = random_point(&mut rng, &s);
        let p = s.polar_at(x, t, 0.0).unwrap();
        let tensor = stress_tensor(&p, 1.0).map_err(|e| e.to_string())?;
        let pair = match eigen_flow(&tensor) {
            EigenFlow::Real(pair) if !pair.is_degenerate() => pair,
            EigenFlow::Real(_) => continue,
            EigenFlow::Complex { .. } => return Err(format!("complex eigenvalues at ({x}, {t})")),
        };
        n += 1;
        let m = tensor.mixed();
        let norm = tensor.max_abs();
        for (l, w) in [
            (pair.lambda_time, pair.w_time),
            (pair.lambda_space, pair.w_space),
        ] {
            let r =
                apply(&m, &w).sub(&w.scale(l)).euclid_sq().sqrt() / (norm * w.euclid_sq().sqrt());
            res = res.max(r);
        }
        check!(
            pair.w_time.norm_sq() > 0.0 && pair.w_time.t > 0.0,
            "time-like branch not future time-like"
        );
        check!(
            pair.w_space.norm_sq() < 0.0,
            "space-like branch not space-like"
        );
        if (pair.lambda_time - pair.lambda_space).abs() > 1e-9 * norm {
            let a = pair.w_time.scale(1.0 / pair.w_time.norm_sq().sqrt());
            let b = pair.w_space.scale(1.0 / (-pair.w_space.norm_sq()).sqrt());
            orth = orth.max(a.dot(&b).abs());
        }
        tr = tr.max((pair.lambda_time + pair.lambda_space - (tensor.t00 - tensor.t11)).abs());
        if let (Ok(a), Ok(b)) = (v_energy(&tensor), v_theta(&p)) {
            route = route.max((a - b).abs());
        }
    }
    check!(res < 1e-9, "eigen residual {res:e} relative to |T|");
    check!(orth < 1e-9, "orthogonality {orth:e}");
    check!(tr < 1e-10, "trace identity {tr:e}");
    check!(route < 1e-10, "v_theta vs v_energy {route:e}");
    Ok(format!(
        "residual {res:.1e}, orthogonality {orth:.1e}, trace {tr:.1e}, routes {route:.1e}"
    ))
}

fn gauss() -> Outcome {
    let s = two_mode();
    let cfg = RunConfig::default();
    check!(
        cfg.rect == [1.5, 2.5, 0.0, 0.2],
        "default rectangle changed: {:?}",
        cfg.rect
    );
    let rect = SpacetimeRect::new(1.5, 2.5, 0.0, 0.2);
    let coarse: Vec<f64> = [10, 20, 40, 80]
        .iter()
        .map(|&n| gauss_flux(&s, &rect, n).unwrap().net.abs())
        .collect();
    for w in coarse.windows(2) {
        check!(
            w[1] < w[0],
            "flux not shrinking with refinement: {coarse:?}"
        );
    }
    let fine = gauss_flux(&s, &rect, 2000).map_err(|e| e.to_string())?;
    check!(fine.net.abs() < 1e-6, "net flux {:e}", fine.net);
    Ok(format!(
        "net {:.1e} at 2000 points, {:.1e} at 10",
        fine.net, coarse[0]
    ))
}

fn fermi() -> Outcome {
    let run = |h: f64| -> Result<Vec<kgpilot::DyadFrame<f64>>, String> {
        let mut cfg = preset(Preset::Fig3);
        cfg.step = h;
        let item = traces(&cfg)?.into_iter().next().unwrap();
        let r = item.record.unwrap();
        check!(
            r.count(EventKind::SelfIntersection) >= 1,
            "fig3 preset path has no loop at h = {h}"
        );
        item.dyad.unwrap().map_err(|e| e.to_string())
    };
    let frames = [run(1e-3)?, run(5e-4)?, run(2.5e-4)?];
    let drift = frames[0].iter().map(|f| f.drift()).fold(0.0, f64::max);
    check!(drift < 1e-8, "dyad drift {drift:e} at h = 1e-3");
    let end = |f: &[kgpilot::DyadFrame<f64>]| *f.last().unwrap();
    let diff = |a: kgpilot::DyadFrame<f64>, b: kgpilot::DyadFrame<f64>| {
        a.e_time
            .sub(&b.e_time)
            .euclid_sq()
            .sqrt()
            .max(a.e_space.sub(&b.e_space).euclid_sq().sqrt())
    };
    let order =
        (diff(end(&frames[0]), end(&frames[1])) / diff(end(&frames[1]), end(&frames[2]))).log2();
    check!(order >= 3.5, "convergence order {order}");
    Ok(format!("drift {drift:.1e}, order {order:.2}"))
}

fn classical() -> Outcome {
    let rest: ClassicalState<f64> = ClassicalState {
        x: 0.4,
        momentum: 0.0,
        sector: Sector::Particle,
        time: 0.0,
        charge: 1.0,
        mass: 1.0,
    };
    let (mut err, mut drift) = (0.0f64, 0.0f64);
    for e in [0.25f64, 1.0, 3.0] {
        let path = integrate_classical(
            &rest,
            &PotentialSpec::ConstantElectric { field: e },
            5.0,
            1e-3,
        )
        .map_err(|e| e.to_string())?;
        check!(
            (path.samples.last().unwrap().time - 5.0).abs() < 1e-12,
            "path stops short of X = 5"
        );
        for p in &path.samples {
            let exact = rest.x + ((1.0 + (e * p.time).powi(2)).sqrt() - 1.0) / e;
            err = err.max((p.x - exact).abs());
        }
        drift = drift.max(path.max_shell_drift());
    }
    check!(err < 1e-8, "hyperbola deviation {err:e}");
    check!(drift < 1e-9, "mass-shell drift {drift:e}");
    let wavy = TabulatedPotential::sample(
        |x: f64| 0.8 * (2.0 * x).sin(),
        |x: f64| 1.6 * (2.0 * x).cos(),
        (-30.0, 30.0),
        1201,
    )
    .map_err(|e| e.to_string())?;
    let mut conj = 0.0f64;
    for pot in [
        PotentialSpec::ConstantElectric { field: 1.0 },
        PotentialSpec::Tabulated(wavy),
    ] {
        let s = ClassicalState {
            momentum: 0.3,
            sector: Sector::Antiparticle,
            ..rest
        };
        let report = charge_conjugation_check(&s, &pot, 5.0, 1e-3).map_err(|e| e.to_string())?;
        conj = conj.max(report.max_deviation);
    }
    check!(conj < 1e-12, "conjugate sectors differ by {conj:e}");
    Ok(format!(
        "hyperbola {err:.1e}, shell drift {drift:.1e}, conjugation {conj:.1e}"
    ))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scan = RunConfig {
        out: tmp.path().join("scan"),
        ..Default::default()
    };
    let mut fig2 = preset(Preset::Fig2);
    fig2.out = tmp.path().join("fig2");
    let mut fig3 = preset(Preset::Fig3);
    fig3.out = tmp.path().join("fig3");
    let mut files = 0;
    for (name, cfg, trace) in [
        ("scan", &scan, false),
        ("fig2 trace", &fig2, true),
        ("fig3 trace", &fig3, true),
    ] {
        let go = || if trace { cmd_trace(cfg) } else { cmd_scan(cfg) };
        go().map_err(|e| e.to_string())?;
        let first = snapshot(&cfg.out);
        go().map_err(|e| e.to_string())?;
        let second = snapshot(&cfg.out);
        check!(
            first.len() > 1 && first == second,
            "{name} output differs between runs"
        );
        files += first.len();
    }
    Ok(format!("{files} files byte-identical across reruns"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("S0 root regression", s0_roots, Some(1)),
        ("superluminal pathology", superluminal, Some(1)),
        ("loop/no-loop dichotomy", loop_dichotomy, Some(30)),
        ("time-like energy flow", energy_timelike, Some(10)),
        ("analytic identity suite", identity_suite, Some(5)),
        ("eigen-decomposition suite", eigen_suite, Some(5)),
        ("Gauss flux", gauss, Some(5)),
        ("Fermi transport", fermi, Some(10)),
        ("classical sector", classical, Some(5)),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = f();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(s)) = (&result, limit) {
            if elapsed > Duration::from_secs(*s) {
                result = Err(format!("took {elapsed:.2?}, limit {s} s"));
            }
        }
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{:>2}] {name}: {detail} ({elapsed:.2?})", k + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
