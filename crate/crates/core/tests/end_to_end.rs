use contact_thermo::figures::{isotopy_outputs, relax_outputs, stirling_outputs};
use contact_thermo::microstate::{read_densities_csv, SystemSpec};
use contact_thermo::processes::{fokker_planck_relax, Admissibility, FormSign};
use contact_thermo::*;

const TWO_LEVEL: &str = r#"{
    "labels": ["down", "up"],
    "weights": [1.0, 1.0],
    "v_int": [0.0, 1.0],
    "v_bar": [[1.0, -1.0]]
}"#;

#[test]
fn system_spec_round_trip() {
    let spec = SystemSpec::from_json(TWO_LEVEL).unwrap();
    let (sp, h) = spec.build().unwrap();
    assert_eq!(SystemSpec::from_parts(&sp, &h), spec);
    assert!(SystemSpec::from_json(r#"{"labels": [], "weights": [], "v_int": [], "v_bar": [], "extra": 1}"#).is_err());
}

#[test]
fn densities_csv_is_validated() {
    let (sp, _) = SystemSpec::from_json(TWO_LEVEL).unwrap().build().unwrap();
    let ds = read_densities_csv(&sp, "0.25, 0.75\n0.5,0.5\n".as_bytes()).unwrap();
    assert_eq!(ds.len(), 2);
    assert!(read_densities_csv(&sp, "0.3,0.3\n".as_bytes()).is_err());
    assert!(read_densities_csv(&sp, "0.5,x\n".as_bytes()).is_err());
}

#[test]
fn two_stage_scenario_ends_on_terminal_equilibrium() {
    let (sp, h) = SystemSpec::from_json(TWO_LEVEL).unwrap().build().unwrap();
    let jump = ultrafast_jump(&sp, &h, 0.8, 1.2, &[0.1], &[0.3]).unwrap();
    assert!(!jump.is_ultrafast);
    assert_eq!(jump.before.p, jump.after_stage1.p);
    let trace = fokker_planck_relax(
        &sp,
        &jump.terminal_hamiltonian,
        &[0.1],
        TemperatureProfile::constant(1.2),
        &jump.density,
        0.1,
        80.0,
    )
    .unwrap();
    let end = trace.reduced_path.points().last().unwrap();
    assert!((end.z + jump.terminal.free_energy(1.2)).abs() < 1e-10);
    assert!(trace.form_values.iter().all(|v| *v >= -1e-8));

    let tv = trace.terminal_density().total_variation(&sp, &jump.terminal.rho_g);
    let out = relax_outputs(&sp, &trace, tv).unwrap();
    let names: Vec<&str> = out.names().collect();
    assert_eq!(
        names,
        ["relax_path.csv", "relax_extended.csv", "relax_densities.csv", "relax_series.csv", "relax_summary.json"]
    );
    let header = std::str::from_utf8(out.get("relax_densities.csv").unwrap()).unwrap().lines().next().unwrap();
    assert_eq!(header, "t,rho_1,rho_2");
}

#[test]
fn isotopy_bundle_lists_reports() {
    let sched = Schedule::linear(1.0, (1.0, 5.0), (0.0, 2.0), 21).unwrap();
    let trace = run_slow_isotopy(SlowModel::Gas, &sched, &[-0.5, -1.0], 1e-8).unwrap();
    let out = isotopy_outputs(&trace).unwrap();
    let manifest: serde_json::Value = serde_json::from_slice(out.get("isotopy_manifest.json").unwrap()).unwrap();
    assert_eq!(manifest["model"]["model"], "gas");
    assert_eq!(manifest["paths"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["paths"][0]["report"]["verdict"], "nonnegative");
    assert!(manifest["paths"][0]["report"].get("per_step_values").is_none());
    assert!(out.get("isotopy_path_0.csv").is_some());
}

#[test]
fn stirling_cycle_labels() {
    let cycle = stirling_cycle(1.0, 5.0, 1.5, 2.0, 33).unwrap();
    let signs: Vec<FormSign> = cycle.segments.iter().map(|s| s.form_sign).collect();
    assert_eq!(signs, [FormSign::Zero, FormSign::Negative, FormSign::Zero, FormSign::Positive]);
    let admissible: Vec<Admissibility> = cycle.segments.iter().map(|s| s.admissibility).collect();
    assert_eq!(admissible[1], Admissibility::TemperatureDecreasing);
    assert!(cycle.closure_residual() < 1e-9);
    assert!(cycle.total_delta_g().abs() < 1e-9);
    // heating chord gains (T_H - T_C) ln v_max in z
    assert!((cycle.segments[3].delta_g + 4.0 * 2f64.ln()).abs() < 1e-12);
    let out = stirling_outputs(&cycle).unwrap();
    assert_eq!(out.len(), 6);
}
