use dwdm_qkd::noise::{
    sasrs_band_power, sasrs_per_mode, ComponentParams, GainPolicy, HomodyneReceiver, LinkParams,
    NoiseBudget,
};
use dwdm_qkd::units::{PLANCK, SPEED_OF_LIGHT};
use proptest::prelude::*;

const RX: HomodyneReceiver = HomodyneReceiver {
    eta_bob: 0.6,
    n_lo: 1e8,
    bandwidth_hz: 1e6,
};

fn budget(z_km: f64, p_out_w: f64, m: u32) -> NoiseBudget {
    let link = LinkParams {
        fiber_length_km: z_km,
        p_out_w,
        classical_channel_count: m,
        ..LinkParams::default()
    };
    NoiseBudget::compute(&link, &ComponentParams::default(), 1e-9, Some(&RX)).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn raman_band_width_cancels() {
    let lambda = 1550e-9;
    let hnu = PLANCK * SPEED_OF_LIGHT / lambda;
    for &dl in &[0.1, 0.6, 1.0] {
        let dnu = SPEED_OF_LIGHT * dl * 1e-9 / (lambda * lambda);
        for &z in &[1.0, 20.0, 80.0] {
            let via_band = sasrs_band_power(1e-3, 4e-9, z, dl) / (hnu * dnu) * 0.71;
            let closed = sasrs_per_mode(1e-3, 4e-9, z, 0.71, lambda);
            assert!(
                close(closed, via_band, 1e-12),
                "Δλ = {dl}, z = {z}: {closed} vs {via_band}"
            );
        }
    }
}

#[test]
fn window_noise_at_twenty_km() {
    let b = budget(20.0, 1e-3, 1);
    assert!((b.n_spd_window - 0.345).abs() < 0.005, "{}", b.n_spd_window);
    assert!(b.window.sasrs > b.window.leak);
    assert!(b.window.ase < 0.01 * b.n_spd_window);
}

proptest! {
    #[test]
    fn every_term_is_nonnegative(z in 0.0f64..150.0, p in 0.0f64..0.02, m in 0u32..80) {
        let b = budget(z, p, m);
        for v in [
            b.n_ase_per_mode_at_a, b.n_leak_per_s_at_c, b.n_sasrs_per_mode_at_c,
            b.window.ase, b.window.leak, b.window.sasrs, b.n_spd_window,
            b.n_gmcs_matched, b.n_gmcs_unmatched, b.eps_in, b.eps_out,
        ] {
            prop_assert!(v >= 0.0 && v.is_finite());
        }
    }

    #[test]
    fn leakage_and_raman_scale_with_power(z in 0.5f64..100.0, p in 1e-5f64..1e-2, k in 0.1f64..10.0) {
        let a = budget(z, p, 1);
        let b = budget(z, k * p, 1);
        prop_assert!(close(b.window.leak, k * a.window.leak, 1e-12));
        prop_assert!(close(b.window.sasrs, k * a.window.sasrs, 1e-12));
        prop_assert!(close(b.window.ase, a.window.ase, 1e-15));
    }

    #[test]
    fn raman_grows_linearly_with_length(z in 0.5f64..100.0, k in 0.1f64..3.0) {
        let a = budget(z, 1e-3, 1);
        let b = budget(k * z, 1e-3, 1);
        prop_assert!(close(b.n_sasrs_per_mode_at_c, k * a.n_sasrs_per_mode_at_c, 1e-12));
    }

    #[test]
    fn matched_noise_scales_with_channel_count(z in 0.0f64..100.0, m in 1u32..60) {
        let one = budget(z, 1e-3, 1);
        let many = budget(z, 1e-3, m);
        prop_assert!(close(many.eps_in, f64::from(m) * one.eps_in, 1e-12));
        prop_assert!(close(many.n_spd_window, f64::from(m) * one.n_spd_window, 1e-12));
    }

    #[test]
    fn window_noise_nondecreasing_under_gain_schedule(z in 0.0f64..120.0, dz in 0.0f64..20.0, p in 1e-6f64..1e-2) {
        let a = budget(z, p, 1);
        let b = budget(z + dz, p, 1);
        prop_assert!(b.n_spd_window >= a.n_spd_window * (1.0 - 1e-12));
    }
}

#[test]
fn dark_link_is_silent() {
    let link = LinkParams {
        fiber_length_km: 30.0,
        p_out_w: 0.0,
        classical_channel_count: 0,
        ..LinkParams::default()
    };
    let comp = ComponentParams {
        gain: GainPolicy::Fixed(1.0),
        ..ComponentParams::default()
    };
    let b = NoiseBudget::compute(&link, &comp, 1e-9, Some(&RX)).unwrap();
    assert_eq!(b.n_spd_window, 0.0);
    assert_eq!(b.eps_in, 0.0);
    assert_eq!(b.eps_out, 0.0);
}
