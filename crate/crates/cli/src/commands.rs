use std::path::{Path, PathBuf};

use clap::Args;
use contact_thermo::chords::default_scan;
use contact_thermo::figures::{self, fig1, fig3, fig4, isotopy_outputs, relax_outputs, stirling_outputs};
use contact_thermo::io::{chords_to_csv, path_to_csv, read_path_csv, table_to_bytes, OutputFormat, OutputSet};
use contact_thermo::microstate::{read_densities_csv, SystemSpec};
use contact_thermo::phase_space::{reduce_path, ExtendedPath, DEFAULT_REDUCTION_TOL};
use contact_thermo::processes::{ultrafast_jump, JumpRecord};
use contact_thermo::verify::{self, DEFAULT_SEED};
use contact_thermo::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{CliError, Context};

/// What a subcommand produced: staged files, the summary line and the exit
/// status to report once the files are written.
pub struct Outcome {
    pub files: OutputSet,
    pub summary: String,
    pub status: u8,
}

impl Outcome {
    fn ok(files: OutputSet, summary: String) -> Self {
        Outcome { files, summary, status: 0 }
    }
}

fn required<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Invalid(format!("missing required value `{key}` (flag or config key)")))
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Invalid(msg.into()))
}

/// Compact rendering for summary lines; files always carry full precision.
fn short(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{x:.3e}")
    }
}

fn short_list(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|x| short(*x)).collect::<Vec<_>>().join(", "))
}

fn load_system(path: &Path) -> Result<(MicrostateSpace, AffineHamiltonian), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read system {}: {e}", path.display())))?;
    Ok(SystemSpec::from_json(&text)?.build()?)
}

fn load_densities(path: &Path, space: &MicrostateSpace) -> Result<Vec<Density>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Invalid(format!("cannot read densities {}: {e}", path.display())))?;
    Ok(read_densities_csv(space, file)?)
}

fn check_positive(value: f64, key: &str) -> Result<f64, CliError> {
    if !value.is_finite() || value <= 0.0 {
        return invalid(format!("`{key}` must be positive and finite, got {value}"));
    }
    Ok(value)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsArgs {
    /// Finite system description (JSON)
    #[arg(long, value_name = "FILE")]
    pub system: Option<PathBuf>,
    /// Closed-form model instead of a finite system: gas or cw
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Temperature
    #[arg(long = "temperature", short = 'T')]
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    /// Intensive variables q (comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Densities to compare against the Gibbs state, one per CSV row
    #[arg(long, value_name = "FILE")]
    pub densities: Option<PathBuf>,
    /// Background pressure of the gas model
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "P_back")]
    pub p_back: Option<f64>,
    /// Background field of the Curie-Weiss model
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "H_back")]
    pub h_back: Option<f64>,
    /// Curie-Weiss coupling
    #[arg(long)]
    pub b: Option<f64>,
    /// Legendrian samples
    #[arg(long)]
    pub samples: Option<usize>,
}

pub fn gibbs(a: GibbsArgs, _: &Context) -> Result<Outcome, CliError> {
    let temperature = check_positive(required(a.temperature, "T")?, "T")?;
    match (&a.system, a.model) {
        (Some(path), None) => gibbs_system(path, temperature, &a),
        (None, Some(model)) => gibbs_model(model, temperature, &a),
        (Some(_), Some(_)) => invalid("give either `system` or `model`, not both"),
        (None, None) => invalid("missing required value `system` or `model`"),
    }
}

fn gibbs_system(path: &Path, temperature: f64, a: &GibbsArgs) -> Result<Outcome, CliError> {
    let (space, h) = load_system(path)?;
    let q = a.q.clone().unwrap_or_default();
    let densities = match &a.densities {
        Some(p) => load_densities(p, &space)?,
        None => Vec::new(),
    };
    let g = contact_thermo::gibbs(&space, &h, temperature, &q)?;
    let g_star = g.free_energy(temperature);
    let s = entropy(&space, &g.rho_g);
    let p = pressures(&space, &h, &g.rho_g)?;
    let energies = h.energies(&q)?;

    let mut out = OutputSet::new();
    let rows = (0..space.len()).map(|i| vec![(i + 1) as f64, space.weights()[i], energies[i], g.rho_g.values()[i]]);
    out.add("gibbs_state.csv", table_to_bytes(&["index", "weight", "energy", "rho"], rows)?);
    out.add_json(
        "gibbs_point.json",
        &json!({
            "labels": space.labels(),
            "T": temperature,
            "q": q,
            "G": g_star,
            "z": -g_star,
            "S": s,
            "U": internal_energy(&space, &h, &g.rho_g)?,
            "p": p,
            "log_partition": g.log_z,
        }),
    )?;
    let mut min_excess = f64::INFINITY;
    if !densities.is_empty() {
        let rows = densities
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let gd = free_energy(&space, &h, temperature, &q, d)?;
                min_excess = min_excess.min(gd - g_star);
                Ok(vec![(i + 1) as f64, gd, gd - g_star])
            })
            .collect::<Result<Vec<_>>>()?;
        out.add("gibbs_free_energies.csv", table_to_bytes(&["row", "G", "excess"], rows)?);
    }
    let mut summary = format!(
        "gibbs: m={} n={} T={} G*={} S={} p={}",
        space.len(),
        h.n_intensive(),
        short(temperature),
        short(g_star),
        short(s),
        short_list(&p)
    );
    if !densities.is_empty() {
        summary += &format!(", {} densities, min G-G*={}", densities.len(), short(min_excess));
    }
    Ok(Outcome::ok(out, summary))
}

fn gibbs_model(model: ModelKind, temperature: f64, a: &GibbsArgs) -> Result<Outcome, CliError> {
    let n = a.samples.unwrap_or(401);
    match model {
        ModelKind::Gas => {
            if a.h_back.is_some() || a.b.is_some() {
                return invalid("`H_back` and `b` apply to the cw model only");
            }
            let par = IdealGasParams::new(temperature, a.p_back.unwrap_or(0.0))?;
            let out = figures::gas_legendrian(par, n)?;
            Ok(Outcome::ok(
                out,
                format!("gibbs gas: T={} P_back={}, {n} Legendrian samples", short(temperature), short(par.p_back)),
            ))
        }
        ModelKind::Cw => {
            if a.p_back.is_some() {
                return invalid("`P_back` applies to the gas model only");
            }
            let par = CurieWeissParams::new(temperature, a.h_back.unwrap_or(0.0), required(a.b, "b")?)?;
            let out = figures::cw_legendrian(par, n)?;
            let shape = if par.b > temperature { "multivalued over q" } else { "graph over q" };
            Ok(Outcome::ok(
                out,
                format!(
                    "gibbs cw: T={} H_back={} b={}, {n} Legendrian samples ({shape})",
                    short(temperature),
                    short(par.h_back),
                    short(par.b)
                ),
            ))
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordArgs {
    /// gas or cw
    #[arg(value_name = "MODEL")]
    pub model: Option<ModelKind>,
    /// Initial temperature
    #[arg(long)]
    pub t0: Option<f64>,
    /// Terminal temperature
    #[arg(long)]
    pub t1: Option<f64>,
    /// Background jump (pressure for gas, field for cw)
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Curie-Weiss coupling
    #[arg(long)]
    pub b: Option<f64>,
    /// Samples per figure curve
    #[arg(long)]
    pub samples: Option<usize>,
    /// Scan grid of the generic chord finder
    #[arg(long)]
    pub grid: Option<usize>,
    /// Degeneracy tolerance of the generic chord finder
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn chord(a: ChordArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let model = required(a.model, "model")?;
    let (t0, t1, c) = (required(a.t0, "t0")?, required(a.t1, "t1")?, required(a.c, "c")?);
    let n = a.samples.unwrap_or(401);
    let grid = a.grid.unwrap_or(4000);
    let tol = a.tol.unwrap_or(1e-13);
    if grid < 3 {
        return invalid(format!("`grid` must be at least 3, got {grid}"));
    }
    let (closed, b, mut out, head) = match model {
        ModelKind::Gas => {
            if a.b.is_some() {
                return invalid("`b` applies to the cw model only");
            }
            let chord = gas_chord(t0, t1, c)?;
            let mut out = fig1(t0, t1, c, n)?;
            for (name, bytes) in fig3(t0, t1, c, n)?.into_files() {
                out.add(name, bytes);
            }
            let head = format!("chord gas: P0={} v={}", short(-chord.q), short(chord.p));
            (chord, None, out, head)
        }
        ModelKind::Cw => {
            let b = required(a.b, "b")?;
            let chord = cw_chord(t0, t1, c, b)?;
            let out = fig4(t0, t1, c, b, n)?;
            let head = format!(
                "chord cw: Q*={} p=tanh({})={} q={}",
                short(chord.q + b * chord.p),
                short(c / (t1 - t0)),
                short(chord.p),
                short(chord.q)
            );
            (chord, Some(b), out, head)
        }
    };
    let found = find_model_chords(model, t0, t1, c, b, default_scan(model, t0, t1, c), grid, tol)?;
    let nearest = found
        .iter()
        .min_by(|x, y| (x.q - closed.q).abs().total_cmp(&(y.q - closed.q).abs()));
    let check = match nearest {
        Some(f) => format!(
            "finder: {} chord(s), |dq|={} |dL|={}",
            found.len(),
            short((f.q - closed.q).abs()),
            short((f.length - closed.length).abs())
        ),
        None => "finder: no chord".to_string(),
    };
    match ctx.format {
        OutputFormat::Csv => {
            out.add("chord.csv", chords_to_csv(&[closed])?);
            out.add("chord_finder.csv", chords_to_csv(&found)?);
        }
        OutputFormat::Json => {
            out.add_json("chord.json", &[closed])?;
            out.add_json("chord_finder.json", &found)?;
        }
    }
    let summary = format!(
        "{head} length={} direction={:+}; {check}",
        short(closed.length),
        closed.direction
    );
    Ok(Outcome::ok(out, summary))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxArgs {
    /// Finite system description (JSON)
    #[arg(long, value_name = "FILE")]
    pub system: Option<PathBuf>,
    /// Intensive variables q (comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Temperature of the initial Gibbs state
    #[arg(long)]
    pub t_init: Option<f64>,
    /// Reservoir temperature after the jump (or at the end of the ramp)
    #[arg(long = "temperature", short = 'T')]
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    /// Ramp the temperature linearly from t_init over this duration instead of jumping
    #[arg(long)]
    pub ramp: Option<f64>,
    /// Jump of the background intensive variables (comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub background_jump: Option<Vec<f64>>,
    /// Initial density: first row of this CSV instead of the initial Gibbs state
    #[arg(long, value_name = "FILE")]
    pub rho0: Option<PathBuf>,
    /// Initial step size
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration horizon
    #[arg(long)]
    pub t_end: Option<f64>,
}

fn jump_json(j: &JumpRecord) -> serde_json::Value {
    json!({
        "before": j.before,
        "after_stage1": j.after_stage1,
        "is_ultrafast": j.is_ultrafast,
        "terminal_log_partition": j.terminal.log_z,
    })
}

pub fn relax(a: RelaxArgs, _: &Context) -> Result<Outcome, CliError> {
    let (space, h) = load_system(&required(a.system.clone(), "system")?)?;
    let temperature = check_positive(required(a.temperature, "T")?, "T")?;
    let t_init = check_positive(a.t_init.unwrap_or(temperature), "t_init")?;
    if temperature < t_init {
        return invalid(format!("reservoir temperature {temperature} is below the initial temperature {t_init}"));
    }
    let q = a.q.clone().unwrap_or_default();
    let jump = a.background_jump.clone().unwrap_or_else(|| vec![0.0; h.n_intensive()]);
    let dt = check_positive(a.dt.unwrap_or(0.05), "dt")?;
    let t_end = check_positive(a.t_end.unwrap_or(50.0), "t_end")?;
    let profile = match a.ramp {
        Some(duration) => TemperatureProfile::Ramp {
            t0: t_init,
            t1: temperature,
            duration: check_positive(duration, "ramp")?,
        },
        None => TemperatureProfile::constant(temperature),
    };
    profile.validate()?;
    let rho0 = match &a.rho0 {
        Some(path) => Some(
            load_densities(path, &space)?
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Invalid(format!("{} holds no density", path.display())))?,
        ),
        None => None,
    };

    let record = ultrafast_jump(&space, &h, t_init, profile.at(0.0), &q, &jump)?;
    let rho = rho0.unwrap_or_else(|| record.density.clone());
    let trace = fokker_planck_relax(&space, &record.terminal_hamiltonian, &q, profile, &rho, dt, t_end)?;
    let t_final = *trace.temperatures.last().unwrap_or(&temperature);
    let terminal = contact_thermo::gibbs(&space, &record.terminal_hamiltonian, t_final, &q)?;
    let tv = trace.terminal_density().total_variation(&space, &terminal.rho_g);
    let mut out = relax_outputs(&space, &trace, tv)?;
    out.add_json("relax_jump.json", &jump_json(&record))?;

    let min_form = trace.form_values.iter().copied().fold(f64::INFINITY, f64::min);
    let g_first = trace.g_values.first().copied().unwrap_or(f64::NAN);
    let g_last = trace.g_values.last().copied().unwrap_or(f64::NAN);
    let summary = format!(
        "relax: m={} {} steps to t={}, G {} -> {}, min form={}, TV to Gibbs={}",
        space.len(),
        trace.t_grid.len() - 1,
        short(t_end),
        short(g_first),
        short(g_last),
        short(min_form),
        short(tv)
    );
    Ok(Outcome::ok(out, summary))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotopyArgs {
    /// gas or cw
    #[arg(value_name = "MODEL")]
    pub model: Option<ModelKind>,
    /// Curie-Weiss coupling
    #[arg(long)]
    pub b: Option<f64>,
    /// Temperature at the start of the schedule
    #[arg(long)]
    pub t0: Option<f64>,
    /// Temperature at the end of the schedule
    #[arg(long)]
    pub t1: Option<f64>,
    /// Background at the start of the schedule
    #[arg(long, allow_negative_numbers = true)]
    pub back0: Option<f64>,
    /// Background at the end of the schedule
    #[arg(long, allow_negative_numbers = true)]
    pub back1: Option<f64>,
    /// Schedule duration
    #[arg(long)]
    pub tau: Option<f64>,
    /// Schedule nodes
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Initial q (gas) or initial magnetisation (cw), comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x_grid: Option<Vec<f64>>,
    /// Slack of the non-negativity certificate
    #[arg(long)]
    pub slack: Option<f64>,
}

pub fn isotopy(a: IsotopyArgs, _: &Context) -> Result<Outcome, CliError> {
    let model = match required(a.model, "model")? {
        ModelKind::Gas if a.b.is_some() => return invalid("`b` applies to the cw model only"),
        ModelKind::Gas => SlowModel::Gas,
        ModelKind::Cw => SlowModel::Cw {
            b: check_positive(required(a.b, "b")?, "b")?,
        },
    };
    let x_grid = a.x_grid.clone().unwrap_or_else(|| match model {
        SlowModel::Gas => vec![-2.0, -1.0, -0.5, -0.25],
        SlowModel::Cw { .. } => vec![0.2, 0.5, 0.8],
    });
    let sched = Schedule::linear(
        a.tau.unwrap_or(1.0),
        (a.t0.unwrap_or(1.0), a.t1.unwrap_or(5.0)),
        (a.back0.unwrap_or(0.0), a.back1.unwrap_or(2.0)),
        a.nodes.unwrap_or(101),
    )?;
    let trace = run_slow_isotopy(model, &sched, &x_grid, a.slack.unwrap_or(1e-9))?;
    let out = isotopy_outputs(&trace)?;
    let passing = trace.reports.iter().filter(|r| r.is_nonnegative()).count();
    let min_form = trace.reports.iter().map(|r| r.min_form_value).fold(f64::INFINITY, f64::min);
    let name = match model {
        SlowModel::Gas => "gas",
        SlowModel::Cw { .. } => "cw",
    };
    let summary = format!(
        "isotopy {name}: {} paths x {} nodes, {passing}/{} non-negative, min form={}, max slice residual={}",
        trace.paths.len(),
        sched.len(),
        trace.paths.len(),
        short(min_form),
        short(trace.max_slice_residual())
    );
    Ok(Outcome::ok(out, summary))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StirlingArgs {
    /// Cold reservoir temperature
    #[arg(long)]
    pub t_cold: Option<f64>,
    /// Hot reservoir temperature
    #[arg(long)]
    pub t_hot: Option<f64>,
    /// Smallest volume
    #[arg(long)]
    pub v_min: Option<f64>,
    /// Largest volume
    #[arg(long)]
    pub v_max: Option<f64>,
    /// Samples per segment
    #[arg(long)]
    pub samples: Option<usize>,
}

pub fn stirling(a: StirlingArgs, _: &Context) -> Result<Outcome, CliError> {
    let trace = stirling_cycle(
        a.t_cold.unwrap_or(1.0),
        a.t_hot.unwrap_or(5.0),
        a.v_min.unwrap_or(1.5),
        a.v_max.unwrap_or(2.0),
        a.samples.unwrap_or(65),
    )?;
    let out = stirling_outputs(&trace)?;
    let signs: Vec<String> = trace
        .segments
        .iter()
        .map(|s| format!("{}={}", s.name, serde_json::to_value(s.form_sign).unwrap_or_default().as_str().unwrap_or("?")))
        .collect();
    let summary = format!(
        "stirling: T_C={} T_H={} v=[{}, {}], {}, closure={}",
        short(trace.cold),
        short(trace.hot),
        short(trace.v_min),
        short(trace.v_max),
        signs.join(" "),
        short(trace.closure_residual())
    );
    Ok(Outcome::ok(out, summary))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceArgs {
    /// Extended path CSV (t,z,S,T,p_1..,q_1..)
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Number of kept (p, q) pairs; pairs 1..=k are kept
    #[arg(long)]
    pub k: Option<usize>,
    /// Frozen intensive variables as INDEX=VALUE (1-based, comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub frozen: Option<Vec<String>>,
    /// Indices whose p is constrained to zero (1-based, comma separated)
    #[arg(long, value_delimiter = ',')]
    pub zeroed: Option<Vec<usize>>,
    /// Pin the temperature to this value
    #[arg(long = "temperature", short = 'T')]
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    /// Constraint tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Slack of the non-negativity certificate
    #[arg(long)]
    pub slack: Option<f64>,
}

fn one_based(i: usize, what: &str) -> Result<usize, CliError> {
    i.checked_sub(1)
        .ok_or_else(|| CliError::Invalid(format!("{what} indices are 1-based, got 0")))
}

pub fn reduce(a: ReduceArgs, _: &Context) -> Result<Outcome, CliError> {
    let input = required(a.input.clone(), "input")?;
    let file = std::fs::File::open(&input)
        .map_err(|e| CliError::Invalid(format!("cannot read path {}: {e}", input.display())))?;
    let path: ExtendedPath = read_path_csv(file)?;
    let frozen = a
        .frozen
        .clone()
        .unwrap_or_default()
        .iter()
        .map(|item| {
            let (i, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Invalid(format!("frozen entry {item:?} is not INDEX=VALUE")))?;
            let i: usize = i.trim().parse().map_err(|_| CliError::Invalid(format!("bad frozen index in {item:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Invalid(format!("bad frozen value in {item:?}")))?;
            Ok((one_based(i, "frozen")?, v))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let zeroed = a
        .zeroed
        .clone()
        .unwrap_or_default()
        .into_iter()
        .map(|i| one_based(i, "zeroed"))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = ReductionSpec {
        k: required(a.k, "k")?,
        frozen,
        zeroed,
        temperature: a.temperature,
        tol: a.tol.unwrap_or(DEFAULT_REDUCTION_TOL),
    };
    spec.validate(path.dim())?;
    let slack = a.slack.unwrap_or(1e-9);
    let reduced = reduce_path(&path, &spec)?;
    let extended_report = check_path_nonnegative(&path, slack)?;
    let reduced_report = check_path_nonnegative(&reduced, slack)?;

    let mut out = OutputSet::new();
    out.add("reduce_path.csv", path_to_csv(&reduced)?);
    out.add_json(
        "reduce_report.json",
        &json!({
            "input": input.file_name().map(|n| n.to_string_lossy()),
            "samples": path.len(),
            "n": path.dim(),
            "spec": spec,
            "extended": extended_report,
            "reduced": reduced_report,
        }),
    )?;
    let verdict = |r: &NonnegReport| if r.is_nonnegative() { "non-negative" } else { "violated" };
    let summary = format!(
        "reduce: {} samples, n={} -> k={}; extended min form={} ({}), reduced min form={} ({})",
        path.len(),
        path.dim(),
        spec.k,
        short(extended_report.min_form_value),
        verdict(&extended_report),
        short(reduced_report.min_form_value),
        verdict(&reduced_report)
    );
    Ok(Outcome::ok(out, summary))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Seed of the random draws
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn verify(a: VerifyArgs, _: &Context) -> Result<Outcome, CliError> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let outcomes = verify::run_all(seed);
    for o in &outcomes {
        eprintln!("[{}] {:>2} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut out = OutputSet::new();
    out.add_json("verify_report.json", &json!({ "seed": seed, "checks": outcomes }))?;
    Ok(Outcome {
        files: out,
        summary: format!("verify: {passed}/{} checks passed (seed {seed})", outcomes.len()),
        status: if passed == outcomes.len() { 0 } else { 2 },
    })
}
