use contact_thermo::models::{
    cw_from_barred, cw_point_from_p, cw_to_barred, gas_from_barred, gas_to_barred, phi_gas, phi_gas_prime,
};
use contact_thermo::phase_space::{reduce_point, PhasePoint};
use contact_thermo::*;
use proptest::prelude::*;

fn vec_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

fn extended_point(n: usize) -> impl Strategy<Value = ExtendedPoint> {
    (-5.0..5.0f64, 0.0..5.0f64, 0.1..5.0f64, vec_of(n), vec_of(n))
        .prop_map(|(z, s, t, p, q)| ExtendedPoint::new(z, s, t, p, q).unwrap())
}

fn extended_velocity(n: usize) -> impl Strategy<Value = ExtendedVelocity> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, vec_of(n), vec_of(n)).prop_map(|(dz, d_entropy, d_temperature, dp, dq)| {
        ExtendedVelocity {
            dz,
            d_entropy,
            d_temperature,
            dp,
            dq,
        }
    })
}

fn combine(a: f64, u: &ExtendedVelocity, b: f64, v: &ExtendedVelocity) -> ExtendedVelocity {
    let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| a * x + b * y).collect();
    ExtendedVelocity {
        dz: a * u.dz + b * v.dz,
        d_entropy: a * u.d_entropy + b * v.d_entropy,
        d_temperature: a * u.d_temperature + b * v.d_temperature,
        dp: mix(&u.dp, &v.dp),
        dq: mix(&u.dq, &v.dq),
    }
}

proptest! {
    #[test]
    fn extended_form_is_linear(
        (pt, u, v) in (1usize..4).prop_flat_map(|n| (extended_point(n), extended_velocity(n), extended_velocity(n))),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let lhs = eval_extended_form(&pt, &combine(a, &u, b, &v)).unwrap();
        let rhs = a * eval_extended_form(&pt, &u).unwrap() + b * eval_extended_form(&pt, &v).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn extended_form_ignores_dp_and_ds(pt in extended_point(2), v in extended_velocity(2), dp in vec_of(2), ds in -5.0..5.0f64) {
        let moved = ExtendedVelocity { dp, d_entropy: ds, ..v.clone() };
        prop_assert_eq!(eval_extended_form(&pt, &v).unwrap(), eval_extended_form(&pt, &moved).unwrap());
    }

    #[test]
    fn gas_legendrian_is_tangent(t in 0.1..10.0f64, p_back in -3.0..3.0f64, x in 0.05..10.0f64) {
        // points (φ(q - P), φ'(q - P), q) on Λ(T, P_back)
        let q = p_back - x;
        let h = 1e-5;
        let z = |q: f64| phi_gas(t, q - p_back);
        let pt = ReducedPoint::scalar(z(q), phi_gas_prime(t, q - p_back), q);
        let v = ReducedVelocity::scalar((z(q + h) - z(q - h)) / (2.0 * h), 0.0, 1.0);
        prop_assert!(eval_reduced_form(&pt, &v).unwrap().abs() < 1e-8 * (1.0 + pt.p[0].abs()));
    }

    #[test]
    fn cw_legendrian_is_tangent(t in 0.2..5.0f64, h_back in -2.0..2.0f64, b in 0.1..3.0f64, p in -0.95..0.95f64) {
        let par = CurieWeissParams::new(t, h_back, b).unwrap();
        let h = 1e-5;
        let (a, m, c) = (
            cw_point_from_p(p + h, par).unwrap(),
            cw_point_from_p(p, par).unwrap(),
            cw_point_from_p(p - h, par).unwrap(),
        );
        let v = ReducedVelocity::scalar((a.z - c.z) / (2.0 * h), 1.0, (a.q - c.q) / (2.0 * h));
        let form = eval_reduced_form(&ReducedPoint::scalar(m.z, m.p, m.q), &v).unwrap();
        prop_assert!(form.abs() < 1e-8 * (1.0 + v.dq[0].abs()), "form {form}");
    }

    #[test]
    fn barred_charts_round_trip(z in -5.0..5.0f64, p in -0.99..0.99f64, q in -5.0..-0.01f64, t0 in 0.2..4.0f64, b in 0.1..3.0f64) {
        let pt = ReducedPoint::scalar(z, p, q);
        let back = cw_from_barred(&cw_to_barred(&pt, t0, b).unwrap(), t0, b).unwrap();
        prop_assert!((back.z - z).abs() < 1e-9 && (back.p[0] - p).abs() < 1e-12 && (back.q[0] - q).abs() < 1e-12);
        let back = gas_from_barred(&gas_to_barred(&pt, t0).unwrap(), t0).unwrap();
        prop_assert!((back.z - z).abs() < 1e-12 && (back.p[0] - p).abs() < 1e-12 && back.q[0] == q);
    }

    #[test]
    fn gibbs_is_normalised_and_minimal(
        energies in prop::collection::vec(-3.0..3.0f64, 2..20),
        t in 0.1..5.0f64,
        seed in prop::collection::vec(0.001..1.0f64, 20),
    ) {
        let m = energies.len();
        let sp = MicrostateSpace::counting(m).unwrap();
        let h = AffineHamiltonian::new(energies, vec![vec![0.0; m]]).unwrap();
        let g = gibbs(&sp, &h, t, &[0.0]).unwrap();
        prop_assert!((sp.integrate(g.rho_g.values()) - 1.0).abs() < 1e-12);
        let rho = Density::normalized(&sp, seed[..m].to_vec()).unwrap();
        let g_min = free_energy(&sp, &h, t, &[0.0], &g.rho_g).unwrap();
        prop_assert!(free_energy(&sp, &h, t, &[0.0], &rho).unwrap() >= g_min - 1e-12);
        prop_assert!((g.free_energy(t) - g_min).abs() < 1e-10);
    }

    #[test]
    fn refinement_keeps_chord_paths_nonnegative(length in 0.01..5.0f64, samples in 3usize..50, p in -3.0..3.0f64, q in -3.0..3.0f64) {
        let path = |n: usize| {
            let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
            let pts = times.iter().map(|t| ReducedPoint::scalar(length * t * t + length * t, p, q)).collect();
            SampledPath::new(times, pts).unwrap()
        };
        prop_assert!(check_path_nonnegative(&path(samples), 1e-9).unwrap().is_nonnegative());
        prop_assert!(check_path_nonnegative(&path(2 * samples), 1e-9).unwrap().is_nonnegative());
    }

    #[test]
    fn reduction_keeps_kept_coordinates(pt in extended_point(3), q_frozen in -5.0..5.0f64) {
        let mut pt = pt;
        pt.q[1] = q_frozen;
        pt.p[2] = 0.0;
        let spec = ReductionSpec { k: 1, frozen: vec![(1, q_frozen)], zeroed: vec![2], temperature: None, tol: 1e-9 };
        let r = reduce_point(&pt, &spec).unwrap();
        prop_assert_eq!(r.coords(), vec![pt.z, pt.p[0], pt.q[0]]);
    }
}
