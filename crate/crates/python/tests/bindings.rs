use blfq_vqe_py::compute_observables;

#[test]
fn ground_state_observables() {
    let o = compute_observables(None).unwrap();
    assert!((o.f_pi_mev - 54.06).abs() < 0.05, "{}", o.f_pi_mev);
    assert!((o.charge_radius_per_mev / 6.31e-3 - 1.0).abs() < 0.01);
    assert_eq!(o.pdf.len(), 99);
    assert_eq!(o.form_factor[0].0, 0.0);
    assert!((o.form_factor[0].1 - 1.0).abs() < 1e-6);
}

#[test]
fn unnormalized_state_is_scaled() {
    let a = compute_observables(Some(vec![1.0, 2.0, -2.0, 1.0])).unwrap();
    let b = compute_observables(Some(vec![0.5, 1.0, -1.0, 0.5])).unwrap();
    assert_eq!(a.r2_fm2, b.r2_fm2);
    assert!(compute_observables(Some(vec![0.0; 4])).is_err());
    assert!(compute_observables(Some(vec![1.0; 3])).is_err());
}
