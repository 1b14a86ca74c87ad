//! Plot-ready data sets and trace bundles.

use serde::Serialize;
use serde_json::json;

use crate::chords::{find_chords, gas_chord, cw_chord, Chord};
use crate::error::{Result, ThermoError};
use crate::io::{chords_to_csv, path_to_csv, table_to_bytes, OutputSet};
use crate::microstate::{entropy, MicrostateSpace};
use crate::models::{
    cw_entropy, cw_point_from_p, difference_front, phi_gas, phi_gas_prime, CurieWeissParams, FrontFunction,
    IdealGasParams, ModelKind,
};
use crate::phase_space::NonnegReport;
use crate::processes::{IsotopyTrace, RelaxTrace, StirlingCycleTrace};
use crate::roots::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig3,
    Fig4,
    Stirling,
}

impl std::str::FromStr for Figure {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "stirling" => Ok(Figure::Stirling),
            other => Err(ThermoError::invalid(format!(
                "unknown figure {other:?} (expected fig1, fig3, fig4 or stirling)"
            ))),
        }
    }
}

const LEGENDRIAN_HEADER: [&str; 3] = ["q", "p", "z"];

/// Lagrangian projections of `Λ(T0, 0)` and `Λ(T1, c)` for the gas plus the
/// chord marker: `fig1_lambda0.csv`, `fig1_lambda1.csv`, `fig1_chord.csv`.
pub fn fig1(t0: f64, t1: f64, c: f64, n: usize) -> Result<OutputSet> {
    let chord = gas_chord(t0, t1, c)?;
    check_samples(n)?;
    let hi = -0.05 * chord.q.abs();
    let lo = 8.0 * chord.q;
    let grid = linspace(lo, hi, n);
    let curve = |t: f64, p_back: f64| {
        grid.iter()
            .map(|&q| vec![q, phi_gas_prime(t, q - p_back), phi_gas(t, q - p_back)])
            .collect::<Vec<_>>()
    };
    let mut out = OutputSet::new();
    out.add("fig1_lambda0.csv", table_to_bytes(&LEGENDRIAN_HEADER, curve(t0, 0.0))?);
    out.add("fig1_lambda1.csv", table_to_bytes(&LEGENDRIAN_HEADER, curve(t1, c))?);
    out.add("fig1_chord.csv", chords_to_csv(&[chord])?);
    Ok(out)
}

/// Barred fronts `f0 ≡ 0` and `ψ` with the vertical chord segment.
fn barred_figure(prefix: &str, psi: &FrontFunction, lo: f64, hi: f64, n: usize) -> Result<(OutputSet, Vec<Chord>)> {
    check_samples(n)?;
    let grid = linspace(lo, hi, n);
    let front_rows = |f: &FrontFunction| -> Result<Vec<Vec<f64>>> {
        grid.iter()
            .map(|&x| {
                let (z, p) = f.eval(x)?;
                Ok(vec![x, p, z])
            })
            .collect()
    };
    let chords = find_chords(&FrontFunction::zero(), psi, lo, hi, n.max(2000), 1e-12)?;
    let segment: Vec<Vec<f64>> = chords
        .iter()
        .flat_map(|ch| [vec![ch.q, ch.z_start], vec![ch.q, ch.z_end]])
        .collect();
    let mut out = OutputSet::new();
    out.add(format!("{prefix}_f0.csv"), table_to_bytes(&LEGENDRIAN_HEADER, front_rows(&FrontFunction::zero())?)?);
    out.add(format!("{prefix}_psi.csv"), table_to_bytes(&LEGENDRIAN_HEADER, front_rows(psi)?)?);
    out.add(format!("{prefix}_chord.csv"), table_to_bytes(&["q", "z"], segment)?);
    Ok((out, chords))
}

/// Gas pair in barred coordinates: `fig3_f0.csv`, `fig3_psi.csv`,
/// `fig3_chord.csv`.
pub fn fig3(t0: f64, t1: f64, c: f64, n: usize) -> Result<OutputSet> {
    let chord = gas_chord(t0, t1, c)?;
    let psi = difference_front(ModelKind::Gas, t0, t1, c, None)?;
    let (out, _) = barred_figure("fig3", &psi, 8.0 * chord.q, -0.05 * chord.q.abs(), n)?;
    Ok(out)
}

/// Curie-Weiss pair in barred coordinates: `fig4_f0.csv`, `fig4_psi.csv`,
/// `fig4_chord.csv`.
pub fn fig4(t0: f64, t1: f64, c: f64, b: f64, n: usize) -> Result<OutputSet> {
    cw_chord(t0, t1, c, b)?;
    let psi = difference_front(ModelKind::Cw, t0, t1, c, Some(b))?;
    let half = 10.0 * (c.abs() * t0 / (t1 - t0)).max(1.0);
    let (out, _) = barred_figure("fig4", &psi, -half, half, n)?;
    Ok(out)
}

/// Samples of `Λ(T, P_back)` for the gas: `legendrian.csv` with `q,p,z`,
/// volumes `v = P_back - q` spaced geometrically over `[0.05, 50]`.
pub fn gas_legendrian(par: IdealGasParams, n: usize) -> Result<OutputSet> {
    check_samples(n)?;
    let (lo, hi) = (0.05f64.ln(), 50f64.ln());
    let rows = linspace(hi, lo, n).into_iter().map(|u| {
        let x = -u.exp();
        vec![x + par.p_back, phi_gas_prime(par.temperature, x), phi_gas(par.temperature, x)]
    });
    let mut out = OutputSet::new();
    out.add("legendrian.csv", table_to_bytes(&LEGENDRIAN_HEADER, rows)?);
    Ok(out)
}

/// Samples of `Λ(T, H_back)` for the Curie-Weiss magnet, parameterised by
/// magnetisation `p ∈ [-0.999, 0.999]`: `legendrian.csv` with `q,p,z,S`.
pub fn cw_legendrian(par: CurieWeissParams, n: usize) -> Result<OutputSet> {
    check_samples(n)?;
    let rows = linspace(-0.999, 0.999, n)
        .into_iter()
        .map(|p| {
            let pt = cw_point_from_p(p, par)?;
            Ok(vec![pt.q, p, pt.z, cw_entropy(p)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = OutputSet::new();
    out.add("legendrian.csv", table_to_bytes(&["q", "p", "z", "S"], rows)?);
    Ok(out)
}

fn check_samples(n: usize) -> Result<()> {
    if n < 3 {
        return Err(ThermoError::invalid(format!("need at least 3 samples per curve, got {n}")));
    }
    Ok(())
}

/// Stirling cycle bundle: one reduced-path CSV per segment, the joined
/// polyline `stirling_cycle.csv` and `stirling_manifest.json`.
pub fn stirling_outputs(trace: &StirlingCycleTrace) -> Result<OutputSet> {
    let mut out = OutputSet::new();
    let mut polyline = Vec::new();
    let mut segments = Vec::new();
    for (i, seg) in trace.segments.iter().enumerate() {
        let file = format!("stirling_{}_{}.csv", i + 1, seg.name);
        out.add(file.clone(), path_to_csv(&seg.path)?);
        for (s, pt) in seg.path.times().iter().zip(seg.path.points()) {
            polyline.push(vec![(i + 1) as f64, *s, pt.z, pt.p[0], pt.q[0]]);
        }
        segments.push(json!({
            "index": i + 1,
            "name": seg.name,
            "kind": seg.kind,
            "file": file,
            "temperature_start": seg.temperature_start,
            "temperature_end": seg.temperature_end,
            "form_sign": seg.form_sign,
            "admissibility": seg.admissibility,
            "delta_g": seg.delta_g,
            "chord": seg.chord,
        }));
    }
    out.add("stirling_cycle.csv", table_to_bytes(&["segment", "s", "z", "p", "q"], polyline)?);
    out.add_json(
        "stirling_manifest.json",
        &json!({
            "T_C": trace.cold,
            "T_H": trace.hot,
            "v_min": trace.v_min,
            "v_max": trace.v_max,
            "closure_residual": trace.closure_residual(),
            "total_delta_g": trace.total_delta_g(),
            "segments": segments,
        }),
    )?;
    Ok(out)
}

#[derive(Serialize)]
struct PathEntry<'a> {
    x: f64,
    file: String,
    report: &'a NonnegReport,
}

/// Isotopy bundle: `isotopy_path_<i>.csv` per initial point and
/// `isotopy_manifest.json` with the non-negativity reports.
pub fn isotopy_outputs(trace: &IsotopyTrace) -> Result<OutputSet> {
    let mut out = OutputSet::new();
    let mut entries = Vec::new();
    let width = trace.paths.len().to_string().len();
    for (i, ((x, path), report)) in trace.x_grid.iter().zip(&trace.paths).zip(&trace.reports).enumerate() {
        let file = format!("isotopy_path_{i:0width$}.csv");
        out.add(file.clone(), path_to_csv(path)?);
        entries.push(PathEntry { x: *x, file, report });
    }
    let sched = &trace.schedule;
    let sched_rows = (0..sched.len()).map(|i| vec![sched.times()[i], sched.temperatures()[i], sched.backgrounds()[i]]);
    out.add("isotopy_schedule.csv", table_to_bytes(&["t", "T", "background"], sched_rows)?);
    out.add_json(
        "isotopy_manifest.json",
        &json!({
            "model": trace.model,
            "temperature_nondecreasing": sched.is_temperature_nondecreasing(),
            "max_slice_residual": trace.max_slice_residual(),
            "paths": entries,
        }),
    )?;
    Ok(out)
}

/// Relaxation bundle: `relax_path.csv` (reduced path), `relax_extended.csv`,
/// `relax_densities.csv` (`t,rho_1..rho_m`), `relax_series.csv`
/// (`t,T,G,S`) and `relax_summary.json`.
pub fn relax_outputs(space: &MicrostateSpace, trace: &RelaxTrace, terminal_tv: f64) -> Result<OutputSet> {
    let mut out = OutputSet::new();
    out.add("relax_path.csv", path_to_csv(&trace.reduced_path)?);
    out.add("relax_extended.csv", path_to_csv(&trace.extended_path)?);
    let mut header = vec!["t".to_string()];
    header.extend((1..=space.len()).map(|i| format!("rho_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = trace.t_grid.iter().zip(&trace.densities).map(|(t, d)| {
        let mut row = vec![*t];
        row.extend(d.values());
        row
    });
    out.add("relax_densities.csv", table_to_bytes(&header, rows)?);
    let series = (0..trace.t_grid.len()).map(|i| {
        vec![
            trace.t_grid[i],
            trace.temperatures[i],
            trace.g_values[i],
            entropy(space, &trace.densities[i]),
        ]
    });
    out.add("relax_series.csv", table_to_bytes(&["t", "T", "G", "S"], series)?);
    let min_form = trace.form_values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_increment = trace.g_frozen_increments.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.add_json(
        "relax_summary.json",
        &json!({
            "steps": trace.t_grid.len() - 1,
            "t_end": trace.t_grid.last(),
            "final_free_energy": trace.g_values.last(),
            "min_form_value": min_form,
            "max_frozen_g_increment": max_increment,
            "max_mass_error": trace.max_mass_error(space),
            "min_density": trace.min_density(),
            "terminal_tv_to_gibbs": terminal_tv,
            "empirical_decay_rate": trace.empirical_decay_rate(),
        }),
    )?;
    Ok(out)
}
