//! Closed-form equilibrium Legendrians of the lattice (ideal) gas and the
//! Curie-Weiss magnet, in reduced coordinates `(z, p, q)`.
//!
//! Gas: `p = v` (volume per particle), `q = -P`, and
//! `Λ(T, P_back) = { z = φ_T(q - P_back), p = φ_T'(q - P_back) }` with
//! `φ_T(x) = -T ln(-x / T)`.
//!
//! Curie-Weiss: `p = M`, `q = H`, and
//! `z = T ln 2cosh((q + H_back + b p) / T) - b p² / 2` subject to the
//! self-consistency `p = tanh((q + H_back + b p) / T)`. For `b > T` the
//! Legendrian is multivalued over `q`, so it is parameterised by `p`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoError};
use crate::phase_space::ReducedPoint;
use crate::roots::bisect;

/// `φ_T(x) = -T ln(-x / T)`, the gas front for `x < 0`.
pub fn phi_gas(temperature: f64, x: f64) -> f64 {
    -temperature * (-x / temperature).ln()
}

pub fn phi_gas_prime(temperature: f64, x: f64) -> f64 {
    -temperature / x
}

/// `φ_T(x) = T ln(2 cosh(x / T))`, evaluated without overflow.
pub fn phi_cw(temperature: f64, x: f64) -> f64 {
    let y = (x / temperature).abs();
    temperature * (y + (-2.0 * y).exp().ln_1p())
}

pub fn phi_cw_prime(temperature: f64, x: f64) -> f64 {
    (x / temperature).tanh()
}

/// `u(p) = atanh(p)`.
pub fn cw_u(p: f64) -> f64 {
    0.5 * ((1.0 + p) / (1.0 - p)).ln()
}

type FrontEval = dyn Fn(f64) -> (f64, f64) + Send + Sync;
type SlopeScale = dyn Fn(f64) -> f64 + Send + Sync;

/// A scalar generating function `f` with its derivative, cutting out the
/// graphical Legendrian `{ z = f(q), p = f'(q) }` over an open interval.
#[derive(Clone)]
pub struct FrontFunction {
    eval: Arc<FrontEval>,
    scale: Option<Arc<SlopeScale>>,
    lo: f64,
    hi: f64,
}

impl fmt::Debug for FrontFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrontFunction")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish_non_exhaustive()
    }
}

impl FrontFunction {
    /// `eval(x)` must return `(f(x), f'(x))` for `x` in `(lo, hi)`.
    pub fn new<F>(lo: f64, hi: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        if !(lo < hi) {
            return Err(ThermoError::invalid(format!("empty front domain ({lo}, {hi})")));
        }
        Ok(FrontFunction {
            eval: Arc::new(eval),
            scale: None,
            lo,
            hi,
        })
    }

    /// Attaches the magnitude of the terms whose sum is `f'`, so that
    /// cancellation noise in `f'` can be told apart from a genuine zero.
    pub fn with_slope_scale<S>(mut self, scale: S) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.scale = Some(Arc::new(scale));
        self
    }

    /// Magnitude against which rounding in `f'(x)` is measured; `|f'(x)|`
    /// unless a scale was attached.
    pub fn slope_scale(&self, x: f64) -> Result<f64> {
        match &self.scale {
            Some(scale) if self.contains(x) => Ok(scale(x)),
            _ => Ok(self.derivative(x)?.abs()),
        }
    }

    pub fn constant(c: f64) -> Self {
        FrontFunction {
            eval: Arc::new(move |_| (c, 0.0)),
            scale: None,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// The zero section `{ z = 0, p = 0 }`.
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        if !self.contains(x) {
            return Err(ThermoError::Domain {
                what: "front function",
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok((self.eval)(x))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.0)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.1)
    }

    /// `|f'(x) - (f(x+h) - f(x-h)) / 2h|` with `h = step · max(1, |x|)`.
    pub fn derivative_residual(&self, x: f64, step: f64) -> Result<f64> {
        let h = step * x.abs().max(1.0);
        let fd = (self.value(x + h)? - self.value(x - h)?) / (2.0 * h);
        Ok((self.derivative(x)? - fd).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealGasParams {
    pub temperature: f64,
    pub p_back: f64,
}

impl IdealGasParams {
    pub fn new(temperature: f64, p_back: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() || !p_back.is_finite() {
            return Err(ThermoError::invalid(format!(
                "gas parameters need T > 0 and finite P_back, got T = {temperature}, P_back = {p_back}"
            )));
        }
        Ok(IdealGasParams { temperature, p_back })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurieWeissParams {
    pub temperature: f64,
    pub h_back: f64,
    pub b: f64,
}

impl CurieWeissParams {
    pub fn new(temperature: f64, h_back: f64, b: f64) -> Result<Self> {
        if !(temperature > 0.0) || !(b > 0.0) || !temperature.is_finite() || !b.is_finite() || !h_back.is_finite() {
            return Err(ThermoError::invalid(format!(
                "Curie-Weiss parameters need T > 0 and b > 0, got T = {temperature}, b = {b}, H_back = {h_back}"
            )));
        }
        Ok(CurieWeissParams { temperature, h_back, b })
    }
}

/// Equilibrium front `f(q) = φ_T(q - P_back)` on `q < P_back`.
pub fn gas_front(par: IdealGasParams) -> FrontFunction {
    let IdealGasParams { temperature, p_back } = par;
    FrontFunction {
        eval: Arc::new(move |q| (phi_gas(temperature, q - p_back), phi_gas_prime(temperature, q - p_back))),
        scale: None,
        lo: f64::NEG_INFINITY,
        hi: p_back,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    GlobalMin,
    LocalMin,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CWBranchPoint {
    pub p: f64,
    pub q: f64,
    pub z: f64,
    pub stability: Stability,
}

/// `z = T ln 2cosh((q + H_back + b p) / T) - b p² / 2`.
pub fn cw_z(p: f64, q: f64, par: CurieWeissParams) -> f64 {
    phi_cw(par.temperature, q + par.h_back + par.b * p) - 0.5 * par.b * p * p
}

/// `|p - tanh((q + H_back + b p) / T)|`.
pub fn cw_self_consistency_residual(p: f64, q: f64, par: CurieWeissParams) -> f64 {
    (p - phi_cw_prime(par.temperature, q + par.h_back + par.b * p)).abs()
}

/// Second-order stability margin `1 - (b / T)(1 - p²)`; negative on the
/// unstable middle branch.
pub fn cw_stability_margin(p: f64, par: CurieWeissParams) -> f64 {
    1.0 - par.b / par.temperature * (1.0 - p * p)
}

fn check_open_unit(p: f64) -> Result<()> {
    if !(p.abs() < 1.0) {
        return Err(ThermoError::Domain {
            what: "magnetisation",
            x: p,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Field at which `p` is a self-consistent magnetisation:
/// `q = -b p + T u(p) - H_back`.
pub fn cw_q_of_p(p: f64, par: CurieWeissParams) -> Result<f64> {
    check_open_unit(p)?;
    Ok(-par.b * p + par.temperature * cw_u(p) - par.h_back)
}

/// Branch point of `Λ(T, H_back)` with magnetisation `p`.
pub fn cw_point_from_p(p: f64, par: CurieWeissParams) -> Result<CWBranchPoint> {
    let q = cw_q_of_p(p, par)?;
    let z = cw_z(p, q, par);
    let stability = cw_magnetization_roots(q, par)
        .into_iter()
        .min_by(|a, b| (a.p - p).abs().total_cmp(&(b.p - p).abs()))
        .filter(|r| (r.p - p).abs() < 1e-6)
        .map(|r| r.stability)
        .unwrap_or(if cw_stability_margin(p, par) < 0.0 {
            Stability::Unstable
        } else {
            Stability::LocalMin
        });
    Ok(CWBranchPoint { p, q, z, stability })
}

/// Grid resolution and bisection tolerance of the magnetisation root scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootScan {
    pub nodes: usize,
    pub tol: f64,
}

impl Default for RootScan {
    fn default() -> Self {
        RootScan {
            nodes: 10_000,
            tol: 1e-12,
        }
    }
}

pub fn cw_magnetization_roots(q: f64, par: CurieWeissParams) -> Vec<CWBranchPoint> {
    cw_magnetization_roots_with(q, par, RootScan::default())
}

/// All solutions of `p = tanh((q + H_back + b p) / T)` in `(-1, 1)`, labelled
/// by stability.
///
/// Roots are bracketed by sign changes of `T atanh(p) - b p - (q + H_back)`
/// on a uniform `p`-grid including the endpoints `±1` (where the function is
/// `∓∞`), then refined by bisection.
pub fn cw_magnetization_roots_with(q: f64, par: CurieWeissParams, scan: RootScan) -> Vec<CWBranchPoint> {
    let h = q + par.h_back;
    let f = |p: f64| {
        if p <= -1.0 {
            f64::NEG_INFINITY
        } else if p >= 1.0 {
            f64::INFINITY
        } else {
            par.temperature * cw_u(p) - par.b * p - h
        }
    };
    let n = scan.nodes.max(2);
    let grid: Vec<f64> = (0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
    let mut ps = Vec::new();
    for k in 0..n {
        let (a, b) = (grid[k], grid[k + 1]);
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            ps.push(a);
        } else if fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            let r = bisect(f, a, b, scan.tol, 0.0);
            ps.push(r.clamp(a, b).min(f64::from_bits(1f64.to_bits() - 1)));
        }
    }
    let mut points: Vec<CWBranchPoint> = ps
        .into_iter()
        .map(|p| CWBranchPoint {
            p,
            q,
            z: cw_z(p, q, par),
            stability: if cw_stability_margin(p, par) < 0.0 {
                Stability::Unstable
            } else {
                Stability::LocalMin
            },
        })
        .collect();
    label_global(&mut points);
    points
}

/// Marks the largest-`z` (lowest free energy) stable root as global;
/// symmetric ties go to the non-negative magnetisation.
fn label_global(points: &mut [CWBranchPoint]) {
    let mut best: Option<usize> = None;
    for (i, pt) in points.iter().enumerate() {
        if pt.stability == Stability::Unstable {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(j) => {
                let other = &points[j];
                let tie = (pt.z - other.z).abs() <= 1e-12 * pt.z.abs().max(1.0);
                if (tie && pt.p >= 0.0 && other.p < 0.0) || (!tie && pt.z > other.z) {
                    Some(i)
                } else {
                    Some(j)
                }
            }
        };
    }
    if let Some(i) = best {
        points[i].stability = Stability::GlobalMin;
    }
}

/// The free-energy minimising equilibrium at field `q`.
pub fn cw_equilibrium(q: f64, par: CurieWeissParams) -> Result<CWBranchPoint> {
    cw_magnetization_roots(q, par)
        .into_iter()
        .find(|r| r.stability == Stability::GlobalMin)
        .ok_or_else(|| ThermoError::invalid(format!("no stable magnetisation at q = {q}")))
}

/// Binary mixing entropy of magnetisation `p`.
pub fn cw_entropy(p: f64) -> Result<f64> {
    check_open_unit(p)?;
    let (a, b) = ((1.0 - p) / 2.0, (1.0 + p) / 2.0);
    Ok(-a * a.ln() - b * b.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gas,
    Cw,
}

impl std::str::FromStr for ModelKind {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gas" => Ok(ModelKind::Gas),
            "cw" => Ok(ModelKind::Cw),
            other => Err(ThermoError::invalid(format!("unknown model {other:?}, expected gas or cw"))),
        }
    }
}

fn check_temperature_pair(t0: f64, t1: f64) -> Result<()> {
    if !(t0 > 0.0) || !(t1 > t0) || !t1.is_finite() {
        return Err(ThermoError::invalid(format!("need T1 > T0 > 0, got T0 = {t0}, T1 = {t1}")));
    }
    Ok(())
}

/// Front of the terminal Legendrian in the barred chart where the initial
/// one is the zero section.
///
/// Gas: `ψ(x) = φ_{T1}(x - c) - φ_{T0}(x)` on `x < min(0, c)`.
/// Curie-Weiss: `ψ(Q) = φ_{T1}(Q + c) - φ_{T0}(Q)` on the whole line.
pub fn difference_front(model: ModelKind, t0: f64, t1: f64, c: f64, b: Option<f64>) -> Result<FrontFunction> {
    check_temperature_pair(t0, t1)?;
    if !c.is_finite() {
        return Err(ThermoError::invalid("background jump must be finite"));
    }
    match model {
        ModelKind::Gas => Ok(FrontFunction::new(f64::NEG_INFINITY, c.min(0.0), move |x| {
            (
                phi_gas(t1, x - c) - phi_gas(t0, x),
                phi_gas_prime(t1, x - c) - phi_gas_prime(t0, x),
            )
        })?
        .with_slope_scale(move |x| phi_gas_prime(t1, x - c).abs() + phi_gas_prime(t0, x).abs())),
        ModelKind::Cw => {
            match b {
                Some(b) if b > 0.0 => {}
                _ => return Err(ThermoError::invalid("Curie-Weiss difference front needs b > 0")),
            }
            Ok(FrontFunction::new(f64::NEG_INFINITY, f64::INFINITY, move |x| {
                (
                    phi_cw(t1, x + c) - phi_cw(t0, x),
                    phi_cw_prime(t1, x + c) - phi_cw_prime(t0, x),
                )
            })?
            .with_slope_scale(move |x| phi_cw_prime(t1, x + c).abs() + phi_cw_prime(t0, x).abs()))
        }
    }
}

fn check_scalar(pt: &ReducedPoint) -> Result<()> {
    if pt.dim() != 1 {
        return Err(ThermoError::DimensionMismatch {
            what: "barred change of variables",
            expected: 1,
            got: pt.dim(),
        });
    }
    Ok(())
}

/// `(z, p, q) ↦ (Z, P, Q)` with `Q = q + b p`, `P = p - φ'_{T0}(Q)`,
/// `Z = z - φ_{T0}(Q) + b p² / 2`; sends `Λ(T0, 0)` to the zero section.
pub fn cw_to_barred(pt: &ReducedPoint, t0: f64, b: f64) -> Result<ReducedPoint> {
    check_scalar(pt)?;
    let (z, p, q) = (pt.z, pt.p[0], pt.q[0]);
    let big_q = q + b * p;
    Ok(ReducedPoint::scalar(
        z - phi_cw(t0, big_q) + 0.5 * b * p * p,
        p - phi_cw_prime(t0, big_q),
        big_q,
    ))
}

pub fn cw_from_barred(pt: &ReducedPoint, t0: f64, b: f64) -> Result<ReducedPoint> {
    check_scalar(pt)?;
    let (big_z, big_p, big_q) = (pt.z, pt.p[0], pt.q[0]);
    let p = big_p + phi_cw_prime(t0, big_q);
    Ok(ReducedPoint::scalar(
        big_z + phi_cw(t0, big_q) - 0.5 * b * p * p,
        p,
        big_q - b * p,
    ))
}

fn check_negative_q(q: f64) -> Result<()> {
    if !(q < 0.0) {
        return Err(ThermoError::Domain {
            what: "gas barred chart",
            x: q,
            lo: f64::NEG_INFINITY,
            hi: 0.0,
        });
    }
    Ok(())
}

/// `(z, p, q) ↦ (z - φ_{T0}(q), p - φ'_{T0}(q), q)` on `q < 0`.
pub fn gas_to_barred(pt: &ReducedPoint, t0: f64) -> Result<ReducedPoint> {
    check_scalar(pt)?;
    let q = pt.q[0];
    check_negative_q(q)?;
    Ok(ReducedPoint::scalar(pt.z - phi_gas(t0, q), pt.p[0] - phi_gas_prime(t0, q), q))
}

pub fn gas_from_barred(pt: &ReducedPoint, t0: f64) -> Result<ReducedPoint> {
    check_scalar(pt)?;
    let q = pt.q[0];
    check_negative_q(q)?;
    Ok(ReducedPoint::scalar(pt.z + phi_gas(t0, q), pt.p[0] + phi_gas_prime(t0, q), q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingDerivatives {
    pub dz_db: f64,
    pub db_dp: f64,
}

/// Response of the Curie-Weiss equilibrium to the coupling `b` at fixed
/// `(T, q)`: `dz/db = p²/2` and `db/dp = (T (p u'(p) - u(p)) + q) / p²`.
pub fn cw_coupling_derivatives(p: f64, temperature: f64, q: f64) -> Result<CouplingDerivatives> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ThermoError::Domain {
            what: "coupling derivatives",
            x: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(temperature > 0.0) {
        return Err(ThermoError::invalid("temperature must be positive"));
    }
    let u_prime = 1.0 / (1.0 - p * p);
    let db_dp = temperature * ((p * u_prime - cw_u(p)) + q / temperature) / (p * p);
    Ok(CouplingDerivatives {
        dz_db: 0.5 * p * p,
        db_dp,
    })
}

/// `∂z/∂T` at fixed `(p, q)`: `ln 2 + ln cosh(A/T) - (A/T) tanh(A/T)` with
/// `A = q + b p`. Evaluated as `|x|(1 - tanh|x|) + ln(1 + e^{-2|x|})`, which
/// is a sum of positive terms.
pub fn cw_dz_dt(p: f64, q: f64, temperature: f64, b: f64) -> Result<f64> {
    check_open_unit(p)?;
    if !(temperature > 0.0) {
        return Err(ThermoError::invalid("temperature must be positive"));
    }
    let x = ((q + b * p) / temperature).abs();
    Ok(x * (1.0 - x.tanh()) + (-2.0 * x).exp().ln_1p())
}
