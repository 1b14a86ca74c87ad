//! Extended and reduced thermodynamic phase spaces.
//!
//! The extended space has coordinates `(z, S, T, p, q)` with `z = -G` the
//! negative free energy, and carries the Gibbs form `dz - S dT - p·dq`. The
//! reduced space is the 1-jet space `(z, p, q)` with `dz - p·dq`. A path is
//! thermodynamically admissible when the relevant form is non-negative on
//! its velocity.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, ThermoError};

/// Default absolute slack for non-negativity verdicts on sampled paths.
pub const DEFAULT_SLACK: f64 = 1e-9;

/// Default absolute tolerance for membership in the reduction subspace.
pub const DEFAULT_REDUCTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPoint {
    pub z: f64,
    pub entropy: f64,
    pub temperature: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ExtendedPoint {
    pub fn new(z: f64, entropy: f64, temperature: f64, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(ThermoError::invalid(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        if !(entropy >= 0.0) || !entropy.is_finite() {
            return Err(ThermoError::invalid(format!(
                "entropy must be non-negative and finite, got {entropy}"
            )));
        }
        if p.is_empty() {
            return Err(ThermoError::invalid("extended point needs n >= 1"));
        }
        check_len("extended q", p.len(), q.len())?;
        if !z.is_finite() || p.iter().chain(&q).any(|x| !x.is_finite()) {
            return Err(ThermoError::invalid("extended point has non-finite coordinates"));
        }
        Ok(ExtendedPoint {
            z,
            entropy,
            temperature,
            p,
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExtendedVelocity {
    pub dz: f64,
    pub d_entropy: f64,
    pub d_temperature: f64,
    pub dp: Vec<f64>,
    pub dq: Vec<f64>,
}

impl ExtendedVelocity {
    /// Velocity with only `dz` set; the Reeb direction.
    pub fn reeb(n: usize, dz: f64) -> Self {
        ExtendedVelocity {
            dz,
            d_entropy: 0.0,
            d_temperature: 0.0,
            dp: vec![0.0; n],
            dq: vec![0.0; n],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint {
    pub z: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ReducedPoint {
    pub fn new(z: f64, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(ThermoError::invalid("reduced point needs k >= 1"));
        }
        check_len("reduced q", p.len(), q.len())?;
        Ok(ReducedPoint { z, p, q })
    }

    /// Point of `J^1 R` (k = 1).
    pub fn scalar(z: f64, p: f64, q: f64) -> Self {
        ReducedPoint {
            z,
            p: vec![p],
            q: vec![q],
        }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReducedVelocity {
    pub dz: f64,
    pub dp: Vec<f64>,
    pub dq: Vec<f64>,
}

impl ReducedVelocity {
    pub fn scalar(dz: f64, dp: f64, dq: f64) -> Self {
        ReducedVelocity {
            dz,
            dp: vec![dp],
            dq: vec![dq],
        }
    }
}

/// `dz - S dT - Σ p_j dq_j`.
pub fn eval_extended_form(pt: &ExtendedPoint, v: &ExtendedVelocity) -> Result<f64> {
    check_len("velocity dp", pt.dim(), v.dp.len())?;
    check_len("velocity dq", pt.dim(), v.dq.len())?;
    let work: f64 = pt.p.iter().zip(&v.dq).map(|(p, dq)| p * dq).sum();
    Ok(v.dz - pt.entropy * v.d_temperature - work)
}

/// `dz - Σ p_j dq_j`.
pub fn eval_reduced_form(pt: &ReducedPoint, v: &ReducedVelocity) -> Result<f64> {
    check_len("velocity dp", pt.dim(), v.dp.len())?;
    check_len("velocity dq", pt.dim(), v.dq.len())?;
    let work: f64 = pt.p.iter().zip(&v.dq).map(|(p, dq)| p * dq).sum();
    Ok(v.dz - work)
}

/// Irreversible entropy production rate `λ̂(v) / T`.
pub fn irreversible_entropy_rate(pt: &ExtendedPoint, v: &ExtendedVelocity) -> Result<f64> {
    Ok(eval_extended_form(pt, v)? / pt.temperature)
}

/// A point of either phase space, viewed as a flat coordinate vector.
///
/// Coordinate order matches the CSV column order: `z, S, T, p.., q..` for the
/// extended space and `z, p.., q..` for the reduced one.
pub trait PhasePoint: Clone {
    fn dim(&self) -> usize;
    fn coords(&self) -> Vec<f64>;
    fn from_coords(coords: &[f64], dim: usize) -> Result<Self>;
    /// Contact form evaluated on a velocity given in flat coordinates.
    fn form_on(&self, velocity: &[f64]) -> Result<f64>;
    fn csv_header(dim: usize) -> Vec<String>;
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |j| format!("{prefix}_{j}"))
}

impl PhasePoint for ExtendedPoint {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(3 + 2 * self.dim());
        c.extend([self.z, self.entropy, self.temperature]);
        c.extend(&self.p);
        c.extend(&self.q);
        c
    }

    fn from_coords(c: &[f64], n: usize) -> Result<Self> {
        check_len("extended coordinates", 3 + 2 * n, c.len())?;
        ExtendedPoint::new(c[0], c[1], c[2], c[3..3 + n].to_vec(), c[3 + n..].to_vec())
    }

    fn form_on(&self, d: &[f64]) -> Result<f64> {
        let n = self.dim();
        check_len("extended velocity", 3 + 2 * n, d.len())?;
        let v = ExtendedVelocity {
            dz: d[0],
            d_entropy: d[1],
            d_temperature: d[2],
            dp: d[3..3 + n].to_vec(),
            dq: d[3 + n..].to_vec(),
        };
        eval_extended_form(self, &v)
    }

    fn csv_header(n: usize) -> Vec<String> {
        ["t", "z", "S", "T"]
            .into_iter()
            .map(String::from)
            .chain(indexed("p", n))
            .chain(indexed("q", n))
            .collect()
    }
}

impl PhasePoint for ReducedPoint {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(1 + 2 * self.dim());
        c.push(self.z);
        c.extend(&self.p);
        c.extend(&self.q);
        c
    }

    fn from_coords(c: &[f64], k: usize) -> Result<Self> {
        check_len("reduced coordinates", 1 + 2 * k, c.len())?;
        ReducedPoint::new(c[0], c[1..1 + k].to_vec(), c[1 + k..].to_vec())
    }

    fn form_on(&self, d: &[f64]) -> Result<f64> {
        let k = self.dim();
        check_len("reduced velocity", 1 + 2 * k, d.len())?;
        let v = ReducedVelocity {
            dz: d[0],
            dp: d[1..1 + k].to_vec(),
            dq: d[1 + k..].to_vec(),
        };
        eval_reduced_form(self, &v)
    }

    fn csv_header(k: usize) -> Vec<String> {
        ["t", "z"]
            .into_iter()
            .map(String::from)
            .chain(indexed("p", k))
            .chain(indexed("q", k))
            .collect()
    }
}

/// A time-sampled path in one of the phase spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath<P> {
    times: Vec<f64>,
    points: Vec<P>,
}

pub type ExtendedPath = SampledPath<ExtendedPoint>;
pub type ReducedPath = SampledPath<ReducedPoint>;

impl<P: PhasePoint> SampledPath<P> {
    pub fn new(times: Vec<f64>, points: Vec<P>) -> Result<Self> {
        check_len("path points", times.len(), points.len())?;
        if times.len() < 2 {
            return Err(ThermoError::invalid("a sampled path needs at least 2 samples"));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ThermoError::invalid("path times must be finite and strictly increasing"));
        }
        let dim = points[0].dim();
        for pt in &points {
            check_len("path point dimension", dim, pt.dim())?;
        }
        Ok(SampledPath { times, points })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Velocity estimates in flat coordinates, one per sample.
    ///
    /// Three-point (non-uniform) central differences at interior nodes and
    /// three-point one-sided differences at the ends; a two-sample path falls
    /// back to the forward difference.
    pub fn velocities(&self) -> Vec<Vec<f64>> {
        let coords: Vec<Vec<f64>> = self.points.iter().map(P::coords).collect();
        let t = &self.times;
        let n = t.len();
        let width = coords[0].len();
        // weighted sum of two consecutive increments, so constant coordinates
        // give exactly zero
        let combine = |i: usize, a: f64, b: f64| -> Vec<f64> {
            (0..width)
                .map(|c| a * (coords[i + 1][c] - coords[i][c]) + b * (coords[i + 2][c] - coords[i + 1][c]))
                .collect()
        };
        if n == 2 {
            let h = t[1] - t[0];
            let d: Vec<f64> = (0..width).map(|c| (coords[1][c] - coords[0][c]) / h).collect();
            return vec![d.clone(), d];
        }
        let mut out = Vec::with_capacity(n);
        {
            let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
            out.push(combine(0, (2.0 * h1 + h2) / (h1 * (h1 + h2)), -h1 / (h2 * (h1 + h2))));
        }
        for i in 1..n - 1 {
            let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            let den = h1 * h2 * (h1 + h2);
            out.push(combine(i - 1, h2 * h2 / den, h1 * h1 / den));
        }
        {
            let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
            out.push(combine(n - 3, -h2 / (h1 * (h1 + h2)), (2.0 * h2 + h1) / (h2 * (h1 + h2))));
        }
        out
    }

    /// Contact-form values on the estimated velocities, one per sample.
    pub fn form_values(&self) -> Result<Vec<f64>> {
        self.points
            .iter()
            .zip(self.velocities())
            .map(|(pt, v)| pt.form_on(&v))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Nonnegative,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonnegReport {
    pub min_form_value: f64,
    #[serde(rename = "violations")]
    pub violating_indices: Vec<usize>,
    #[serde(skip)]
    pub per_step_values: Vec<f64>,
    pub verdict: Verdict,
}

impl NonnegReport {
    pub fn is_nonnegative(&self) -> bool {
        self.verdict == Verdict::Nonnegative
    }
}

/// Certifies `form(γ̇) >= -slack` along a sampled path.
///
/// The form is the one native to the path's phase space.
pub fn check_path_nonnegative<P: PhasePoint>(path: &SampledPath<P>, slack: f64) -> Result<NonnegReport> {
    if !(slack >= 0.0) {
        return Err(ThermoError::invalid(format!("slack must be >= 0, got {slack}")));
    }
    if path.len() < 2 {
        return Err(ThermoError::invalid("a sampled path needs at least 2 samples"));
    }
    let values = path.form_values()?;
    let min_form_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let violating_indices: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !(**v >= -slack))
        .map(|(i, _)| i)
        .collect();
    let verdict = if violating_indices.is_empty() {
        Verdict::Nonnegative
    } else {
        Verdict::Violated
    };
    Ok(NonnegReport {
        min_form_value,
        violating_indices,
        per_step_values: values,
        verdict,
    })
}

/// Which coordinates are frozen, zeroed and kept by a reduction.
///
/// With `k` kept pairs the reduced point is `(z, p_1..p_k, q_1..q_k)`. Every
/// remaining index is either frozen (`q_i = q_i^0`, the `I` set) or zeroed
/// (`p_e = 0`, the `E` set). Indices are 0-based. Temperature is always
/// projected out together with the entropy; `temperature` pins it to a fixed
/// value when set, otherwise it is treated as an external parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSpec {
    pub k: usize,
    pub frozen: Vec<(usize, f64)>,
    pub zeroed: Vec<usize>,
    pub temperature: Option<f64>,
    pub tol: f64,
}

impl ReductionSpec {
    /// Reduce only the temperature, keeping all `n` pairs.
    pub fn temperature_only(n: usize, temperature: Option<f64>) -> Self {
        ReductionSpec {
            k: n,
            frozen: Vec::new(),
            zeroed: Vec::new(),
            temperature,
            tol: DEFAULT_REDUCTION_TOL,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(ThermoError::invalid("reduction must keep k >= 1 pairs"));
        }
        if !(self.tol >= 0.0) {
            return Err(ThermoError::invalid("reduction tolerance must be >= 0"));
        }
        let mut seen = vec![false; n];
        let kept = 0..self.k.min(n);
        let others = self.frozen.iter().map(|(i, _)| *i).chain(self.zeroed.iter().copied());
        for i in kept.chain(others) {
            if i >= n {
                return Err(ThermoError::invalid(format!("reduction index {i} out of range for n = {n}")));
            }
            if seen[i] {
                return Err(ThermoError::invalid(format!("reduction index {i} assigned twice")));
            }
            seen[i] = true;
        }
        if self.k > n || seen.iter().any(|s| !s) {
            return Err(ThermoError::invalid(
                "kept, frozen and zeroed index sets must partition 0..n",
            ));
        }
        if self.frozen.iter().any(|(_, v)| !v.is_finite()) {
            return Err(ThermoError::invalid("frozen values must be finite"));
        }
        if let Some(t0) = self.temperature {
            if !(t0 > 0.0) {
                return Err(ThermoError::invalid("fixed temperature must be positive"));
            }
        }
        Ok(())
    }
}

/// Free-energy decrement `A = S dT + Σ_{i∈I} p_i dq_i` due to the reduced
/// intensive variables.
pub fn admissibility_decrement(pt: &ExtendedPoint, v: &ExtendedVelocity, spec: &ReductionSpec) -> Result<f64> {
    spec.validate(pt.dim())?;
    check_len("velocity dq", pt.dim(), v.dq.len())?;
    let frozen: f64 = spec.frozen.iter().map(|&(i, _)| pt.p[i] * v.dq[i]).sum();
    Ok(pt.entropy * v.d_temperature + frozen)
}

pub fn reduce_point(pt: &ExtendedPoint, spec: &ReductionSpec) -> Result<ReducedPoint> {
    spec.validate(pt.dim())?;
    let violation = |constraint: String, value: f64| ThermoError::ConstraintViolation {
        constraint,
        value,
        tol: spec.tol,
    };
    if let Some(t0) = spec.temperature {
        if !((pt.temperature - t0).abs() <= spec.tol) {
            return Err(violation(format!("T = {t0}"), pt.temperature));
        }
    }
    for &(i, q0) in &spec.frozen {
        if !((pt.q[i] - q0).abs() <= spec.tol) {
            return Err(violation(format!("q_{} = {q0}", i + 1), pt.q[i]));
        }
    }
    for &e in &spec.zeroed {
        if !(pt.p[e].abs() <= spec.tol) {
            return Err(violation(format!("p_{} = 0", e + 1), pt.p[e]));
        }
    }
    ReducedPoint::new(pt.z, pt.p[..spec.k].to_vec(), pt.q[..spec.k].to_vec())
}

pub fn reduce_path(path: &ExtendedPath, spec: &ReductionSpec) -> Result<ReducedPath> {
    let points = path
        .points()
        .iter()
        .map(|pt| reduce_point(pt, spec))
        .collect::<Result<Vec<_>>>()?;
    SampledPath::new(path.times().to_vec(), points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(z: f64, s: f64, t: f64, p: f64, q: f64) -> ExtendedPoint {
        ExtendedPoint::new(z, s, t, vec![p], vec![q]).unwrap()
    }

    #[test]
    fn reeb_direction_evaluates_to_one() {
        let pt = ext(0.3, 1.0, 2.0, 0.5, -1.0);
        assert_eq!(eval_extended_form(&pt, &ExtendedVelocity::reeb(1, 1.0)).unwrap(), 1.0);
        let rp = ReducedPoint::scalar(0.0, 2.0, 1.0);
        assert_eq!(eval_reduced_form(&rp, &ReducedVelocity::scalar(1.0, 0.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn contact_plane_vector_evaluates_to_zero() {
        let pt = ext(0.0, 2.0, 1.0, 3.0, 0.0);
        let v = ExtendedVelocity {
            dz: 2.0 * 1.0 + 3.0 * 1.0,
            d_entropy: 0.0,
            d_temperature: 1.0,
            dp: vec![0.0],
            dq: vec![1.0],
        };
        assert_eq!(eval_extended_form(&pt, &v).unwrap(), 0.0);
    }

    #[test]
    fn temperature_rise_at_constant_z_is_negative() {
        let pt = ext(0.0, 1.0, 1.0, 0.0, 0.0);
        let v = ExtendedVelocity {
            d_temperature: 1.0,
            ..ExtendedVelocity::reeb(1, 0.0)
        };
        assert_eq!(eval_extended_form(&pt, &v).unwrap(), -1.0);
    }

    #[test]
    fn reduced_form_arithmetic_and_legendrian_tangency() {
        let pt = ReducedPoint::scalar(0.0, 2.0, 0.3);
        assert_eq!(eval_reduced_form(&pt, &ReducedVelocity::scalar(1.0, 0.0, 1.0)).unwrap(), -1.0);
        // f(q) = q^3 / 3: tangent to its 1-jet graph
        let q: f64 = 0.7;
        let dq = 0.4;
        let pt = ReducedPoint::scalar(q.powi(3) / 3.0, q * q, q);
        let v = ReducedVelocity::scalar(q * q * dq, 2.0 * q * dq, dq);
        assert!(eval_reduced_form(&pt, &v).unwrap().abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let pt = ext(0.0, 1.0, 1.0, 0.0, 0.0);
        let v = ExtendedVelocity::reeb(2, 1.0);
        assert!(matches!(
            eval_extended_form(&pt, &v),
            Err(ThermoError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn point_invariants() {
        assert!(ExtendedPoint::new(0.0, 1.0, 0.0, vec![0.0], vec![0.0]).is_err());
        assert!(ExtendedPoint::new(0.0, -0.1, 1.0, vec![0.0], vec![0.0]).is_err());
        assert!(ExtendedPoint::new(0.0, 0.0, 1.0, vec![], vec![]).is_err());
        assert!(ReducedPoint::new(0.0, vec![1.0], vec![1.0, 2.0]).is_err());
    }

    fn chord_path(length: f64) -> ReducedPath {
        let times: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let points = times
            .iter()
            .map(|t| ReducedPoint::scalar(0.5 + t * length, 2.0, -0.5))
            .collect();
        SampledPath::new(times, points).unwrap()
    }

    #[test]
    fn vertical_chord_is_nonnegative_with_min_equal_length() {
        let report = check_path_nonnegative(&chord_path(2.5), DEFAULT_SLACK).unwrap();
        assert!(report.is_nonnegative());
        assert!((report.min_form_value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn reversed_chord_is_violated() {
        let report = check_path_nonnegative(&chord_path(-2.5), DEFAULT_SLACK).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert_eq!(report.violating_indices.len(), 11);
    }

    #[test]
    fn path_validation() {
        let p = ReducedPoint::scalar(0.0, 0.0, 0.0);
        assert!(SampledPath::new(vec![0.0], vec![p.clone()]).is_err());
        assert!(SampledPath::new(vec![0.0, 0.0], vec![p.clone(), p.clone()]).is_err());
        assert!(SampledPath::new(vec![1.0, 0.0], vec![p.clone(), p]).is_err());
    }

    #[test]
    fn velocities_exact_for_quadratics_on_nonuniform_grid() {
        let times = vec![0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
        let points = times
            .iter()
            .map(|&t| ReducedPoint::scalar(t * t - 3.0 * t, 2.0 * t, 1.0))
            .collect();
        let path = SampledPath::new(times.clone(), points).unwrap();
        for (t, v) in times.iter().zip(path.velocities()) {
            assert!((v[0] - (2.0 * t - 3.0)).abs() < 1e-12);
            assert!((v[1] - 2.0).abs() < 1e-12);
            assert!(v[2].abs() < 1e-12);
        }
    }

    #[test]
    fn report_json_fields() {
        let report = check_path_nonnegative(&chord_path(-1.0), 0.0).unwrap();
        let json: serde_json::Value = serde_json::to_value(&report).unwrap();
        let obj = json.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["min_form_value", "verdict", "violations"]);
        assert_eq!(obj["verdict"], "violated");
    }

    #[test]
    fn decrement_cases() {
        let spec = ReductionSpec::temperature_only(1, None);
        let pt = ext(0.0, 2.0, 1.0, 0.3, 0.0);
        let v = ExtendedVelocity {
            d_temperature: 0.5,
            ..ExtendedVelocity::reeb(1, 0.0)
        };
        assert_eq!(admissibility_decrement(&pt, &v, &spec).unwrap(), 1.0);
        let still = ExtendedVelocity {
            dq: vec![3.0],
            ..ExtendedVelocity::reeb(1, 0.0)
        };
        assert_eq!(admissibility_decrement(&pt, &still, &spec).unwrap(), 0.0);
    }

    #[test]
    fn reduce_projects_and_rejects() {
        let spec = ReductionSpec {
            k: 1,
            frozen: vec![],
            zeroed: vec![1],
            temperature: Some(2.0),
            tol: DEFAULT_REDUCTION_TOL,
        };
        let pt = ExtendedPoint::new(1.5, 0.7, 2.0, vec![0.4, 0.0], vec![-0.2, 9.0]).unwrap();
        assert_eq!(reduce_point(&pt, &spec).unwrap(), ReducedPoint::scalar(1.5, 0.4, -0.2));

        let off = ExtendedPoint::new(1.5, 0.7, 2.0, vec![0.4, 0.1], vec![-0.2, 9.0]).unwrap();
        match reduce_point(&off, &spec) {
            Err(ThermoError::ConstraintViolation { constraint, .. }) => assert_eq!(constraint, "p_2 = 0"),
            other => panic!("expected constraint violation, got {other:?}"),
        }
        let hot = ExtendedPoint::new(1.5, 0.7, 2.1, vec![0.4, 0.0], vec![-0.2, 9.0]).unwrap();
        assert!(reduce_point(&hot, &spec).is_err());
    }

    #[test]
    fn frozen_reduction_with_two_pairs() {
        let spec = ReductionSpec {
            k: 1,
            frozen: vec![(1, 3.0)],
            zeroed: vec![],
            temperature: None,
            tol: DEFAULT_REDUCTION_TOL,
        };
        let pt = ExtendedPoint::new(0.0, 1.0, 1.0, vec![1.0, 5.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(reduce_point(&pt, &spec).unwrap(), ReducedPoint::scalar(0.0, 1.0, 2.0));
        let v = ExtendedVelocity {
            d_temperature: 0.25,
            dq: vec![0.0, 2.0],
            ..ExtendedVelocity::reeb(2, 0.0)
        };
        assert_eq!(admissibility_decrement(&pt, &v, &spec).unwrap(), 0.25 + 10.0);
    }

    #[test]
    fn bad_partitions() {
        let mk = |k, frozen: Vec<(usize, f64)>, zeroed| ReductionSpec {
            k,
            frozen,
            zeroed,
            temperature: None,
            tol: 1e-9,
        };
        assert!(mk(1, vec![], vec![]).validate(2).is_err());
        assert!(mk(1, vec![(0, 1.0)], vec![1]).validate(2).is_err());
        assert!(mk(0, vec![(0, 1.0)], vec![1]).validate(2).is_err());
        assert!(mk(1, vec![(1, 1.0)], vec![]).validate(2).is_ok());
    }

    #[test]
    fn entropy_rate() {
        let pt = ext(0.0, 1.0, 2.0, 0.0, 0.0);
        assert_eq!(irreversible_entropy_rate(&pt, &ExtendedVelocity::reeb(1, 1.0)).unwrap(), 0.5);
    }
}
