use kgpilot::guidance::{flow_from_polar, DEFAULT_SCAN_POINTS};
use kgpilot::{
    effective_mass_negative_intervals, eval_field, flow_field, negativity_scan, polar, roots_of_s0,
    superluminal_intervals, v_debroglie, v_modified, BoxConfig, Complex, Error, ModeSpec,
    VelocityLaw, WaveState,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn two_mode() -> WaveState<f64> {
    WaveState::equal_superposition(BoxConfig::unit_pi(), &[1, 2]).unwrap()
}

fn s0(s: &WaveState<f64>, x: f64, t: f64) -> f64 {
    s.polar_at(x, t, 0.0).unwrap().s_cov[0]
}

#[test]
fn roots_at_reference_time() {
    let s = two_mode();
    let roots = roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS);
    assert_eq!(roots.len(), 2, "{roots:?}");
    assert!((roots[0] - 1.898).abs() < 2e-3, "{}", roots[0]);
    assert!((roots[1] - 2.086).abs() < 2e-3, "{}", roots[1]);
    for r in roots {
        assert!(s0(&s, r, 0.1).abs() < 1e-8);
        assert!(s0(&s, r - 1e-6, 0.1) * s0(&s, r + 1e-6, 0.1) < 0.0);
    }
}

#[test]
fn roots_agree_with_dense_scan() {
    let s = two_mode();
    for &t in &[0.0, 0.1, 0.35, 1.2] {
        let n = 400_000;
        let mut dense = Vec::new();
        let mut prev = s0(&s, PI / n as f64, t);
        for k in 2..n {
            let x = PI * k as f64 / n as f64;
            let v = s0(&s, x, t);
            if v * prev < 0.0 {
                dense.push(x);
            }
            prev = v;
        }
        let found = roots_of_s0(&s, t, (0.0, PI), DEFAULT_SCAN_POINTS);
        assert_eq!(found.len(), dense.len(), "t = {t}");
        for (a, b) in found.iter().zip(&dense) {
            assert!((a - b).abs() < 2.0 * PI / n as f64);
        }
    }
}

#[test]
fn de_broglie_speed_is_superluminal_and_diverges() {
    let s = two_mode();
    let speeds: Vec<f64> = (1..4096)
        .filter_map(|i| {
            let p = s.polar_at(PI * i as f64 / 4096.0, 0.1, 1e-10).ok()?;
            v_debroglie(&p).ok()
        })
        .collect();
    assert!(speeds.iter().any(|v| v.abs() > 1.0));
    for r in roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS) {
        let mut last = 0.0;
        for d in [1e-2, 1e-3, 1e-4, 1e-5] {
            let lo = v_debroglie(&s.polar_at(r - d, 0.1, 1e-10).unwrap())
                .unwrap()
                .abs();
            let hi = v_debroglie(&s.polar_at(r + d, 0.1, 1e-10).unwrap())
                .unwrap()
                .abs();
            assert!(lo > last && hi > last);
            last = lo.min(hi);
        }
        assert!(last > 1e3);
    }
    assert!(!superluminal_intervals(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS).is_empty());
}

#[test]
fn pole_is_reported_not_returned() {
    let s = two_mode();
    let r = roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS)[0];
    let mut p = s.polar_at(r, 0.1, 1e-10).unwrap();
    p.s_cov[0] = 0.0;
    assert!(matches!(v_debroglie(&p), Err(Error::Pole { .. })));
    assert!(matches!(v_modified(&p), Err(Error::Pole { .. })));
}

#[test]
fn pathology_windows_coincide() {
    // J⁰ < 0 exactly where S⁰ > 0, and the effective mass squared equals
    // S·S, negative exactly where the de Broglie speed exceeds 1.
    let s = two_mode();
    for &t in &[0.1, 0.3] {
        let roots = roots_of_s0(&s, t, (0.0, PI), DEFAULT_SCAN_POINTS);
        let neg = negativity_scan(&s, t, (0.0, PI), DEFAULT_SCAN_POINTS);
        assert_eq!(neg.len() * 2, roots.len());
        for (w, pair) in neg.iter().zip(roots.chunks(2)) {
            assert!((w.0 - pair[0]).abs() < 1e-8 && (w.1 - pair[1]).abs() < 1e-8);
        }
        let sup = superluminal_intervals(&s, t, (0.0, PI), DEFAULT_SCAN_POINTS);
        let eff = effective_mass_negative_intervals(&s, t, (0.0, PI), DEFAULT_SCAN_POINTS);
        assert_eq!(sup.len(), eff.len());
        for (a, b) in sup.iter().zip(&eff) {
            assert!((a.0 - b.0).abs() < 1e-7 && (a.1 - b.1).abs() < 1e-7);
        }
    }
}

#[test]
fn single_mode_has_no_pathologies() {
    let s = WaveState::new(BoxConfig::unit_pi(), vec![ModeSpec::real(2, 1.0)]).unwrap();
    let iv = (0.0, PI);
    assert!(roots_of_s0(&s, 0.1, iv, DEFAULT_SCAN_POINTS).is_empty());
    assert!(negativity_scan(&s, 0.1, iv, DEFAULT_SCAN_POINTS).is_empty());
    assert!(superluminal_intervals(&s, 0.1, iv, DEFAULT_SCAN_POINTS).is_empty());
    assert!(effective_mass_negative_intervals(&s, 0.1, iv, DEFAULT_SCAN_POINTS).is_empty());
}

#[test]
fn energy_flow_slope_bounded_on_reference_grid() {
    let s = two_mode();
    for i in 1..DEFAULT_SCAN_POINTS {
        let x = PI * i as f64 / DEFAULT_SCAN_POINTS as f64;
        if let Ok(v) = flow_field(&s, VelocityLaw::EnergyFlow, x, 0.1, 1e-10) {
            assert!(v.slope().abs() < 1.0, "x = {x}");
        }
    }
}

fn arb_state() -> impl Strategy<Value = WaveState<f64>> {
    proptest::collection::btree_map(1u32..6, (-1.0..1.0f64, -1.0..1.0f64), 1..4).prop_filter_map(
        "amplitude",
        |m| {
            let modes: Vec<_> = m
                .into_iter()
                .map(|(n, (a, b))| ModeSpec::new(n, Complex::new(a, b)))
                .collect();
            if modes.iter().all(|m| m.amplitude.norm() < 0.05) {
                return None;
            }
            WaveState::new(BoxConfig::unit_pi(), modes).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn modified_law_relations(s in arb_state(), u in 0.01..0.99f64, t in -3.0..3.0f64) {
        let p = polar(&eval_field(&s, u * PI, t).unwrap(), 1e-6);
        prop_assume!(!p.near_node);
        let (Ok(a), Ok(b)) = (v_debroglie(&p), v_modified(&p)) else { return Ok(()); };
        prop_assert_eq!(a.abs(), b.abs());
        if p.s_cov[0] < 0.0 {
            prop_assert_eq!(a, b);
        }
        let f = flow_from_polar(&p, VelocityLaw::ModifiedAbs, 1.0).unwrap();
        prop_assert!(f.dtau_t >= 0.0);
        let g = flow_from_polar(&p, VelocityLaw::DeBroglie, 1.0).unwrap();
        prop_assert!((g.slope() - a).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
