use dnls_wasm::{damping_curves, damping_summary, gn_ascent, Simulation};

#[test]
fn simulation_follows_the_mass_law() {
    let mut sim = Simulation::new("constant:a=0.3", 3.0, 1.0, 1.0, 256, 24.0, 1e-3).unwrap();
    sim.advance(500).unwrap();
    let d = sim.diagnostics().unwrap();
    assert!((d[0] - 0.5).abs() < 1e-12);
    assert!(d[4].abs() < 1e-10, "{d:?}");
    assert_eq!(sim.density().len(), sim.x().len());
}

#[test]
fn constant_damping_curves_are_linear() {
    let v = damping_curves("constant:a=0.5", 10.0, 11).unwrap();
    for i in 0..11 {
        assert_eq!(v[i], 0.5);
        assert!((v[11 + i] - 0.5 * i as f64).abs() < 1e-12);
    }
    let s = damping_summary("constant:a=0.5").unwrap();
    assert!((s[0] - 0.5).abs() < 1e-12 && s[1] == 1.0);
}

#[test]
fn ascent_reaches_the_cubic_constant() {
    let v = gn_ascent(3.0, 256, 20.0).unwrap();
    assert!((v[0] - 1.0 / 3f64.sqrt()).abs() < 1e-2 * v[0]);
    assert_eq!(v.len(), 258);
}
