//! Statistical mechanics on a finite microstate set.
//!
//! A macroscopic state is a density `rho` with respect to the weights `w`
//! (`Σ w_i rho_i = 1`). Hamiltonians are affine in the intensive variables:
//! `H(q, m_i) = v_int_i + Σ_j q_j v_bar[j][i]`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, ThermoError};
use crate::phase_space::ExtendedPoint;

/// Normalisation tolerance accepted by [`Density::new`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrostateSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl MicrostateSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(ThermoError::invalid("microstate space needs at least one state"));
        }
        check_len("labels", weights.len(), labels.len())?;
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(ThermoError::invalid("microstate weights must be positive and finite"));
        }
        Ok(MicrostateSpace { labels, weights })
    }

    /// `m` unit-weight states labelled `m0, m1, ...`.
    pub fn counting(m: usize) -> Result<Self> {
        Self::new((0..m).map(|i| format!("m{i}")).collect(), vec![1.0; m])
    }

    pub fn with_weights(weights: Vec<f64>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| format!("m{i}")).collect();
        Self::new(labels, weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_i f_i`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, x)| w * x).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    rho: Vec<f64>,
}

impl Density {
    pub fn new(space: &MicrostateSpace, rho: Vec<f64>) -> Result<Self> {
        check_len("density", space.len(), rho.len())?;
        if rho.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(ThermoError::invalid("density entries must be finite and non-negative"));
        }
        let mass = space.integrate(&rho);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ThermoError::invalid(format!("density has mass {mass}, expected 1")));
        }
        Ok(Density { rho })
    }

    /// Rescales non-negative values so that `Σ w_i rho_i = 1`.
    pub fn normalized(space: &MicrostateSpace, values: Vec<f64>) -> Result<Self> {
        check_len("density", space.len(), values.len())?;
        let mass = space.integrate(&values);
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ThermoError::invalid("cannot normalise a density with zero mass"));
        }
        Self::new(space, values.into_iter().map(|v| v / mass).collect())
    }

    pub fn uniform(space: &MicrostateSpace) -> Self {
        let total = space.total_weight();
        Density {
            rho: vec![1.0 / total; space.len()],
        }
    }

    /// Unit mass concentrated on state `i`.
    pub fn point_mass(space: &MicrostateSpace, i: usize) -> Result<Self> {
        if i >= space.len() {
            return Err(ThermoError::invalid(format!("state {i} out of range")));
        }
        let mut rho = vec![0.0; space.len()];
        rho[i] = 1.0 / space.weights()[i];
        Ok(Density { rho })
    }

    /// Wraps values without the normalisation check; used by integrators
    /// whose mass is tracked separately.
    pub(crate) fn from_raw(rho: Vec<f64>) -> Self {
        Density { rho }
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.rho.iter().all(|r| *r > 0.0)
    }

    /// Total variation distance `½ Σ w_i |rho_i - other_i|`.
    pub fn total_variation(&self, space: &MicrostateSpace, other: &Density) -> f64 {
        0.5 * space
            .weights()
            .iter()
            .zip(self.rho.iter().zip(&other.rho))
            .map(|(w, (a, b))| w * (a - b).abs())
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineHamiltonian {
    v_int: Vec<f64>,
    v_bar: Vec<Vec<f64>>,
}

impl AffineHamiltonian {
    /// `v_bar` is `n × m`: one row per intensive variable.
    pub fn new(v_int: Vec<f64>, v_bar: Vec<Vec<f64>>) -> Result<Self> {
        if v_bar.is_empty() {
            return Err(ThermoError::invalid("hamiltonian needs n >= 1 intensive variables"));
        }
        for row in &v_bar {
            check_len("v_bar row", v_int.len(), row.len())?;
        }
        if v_int.iter().chain(v_bar.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(ThermoError::invalid("hamiltonian entries must be finite"));
        }
        Ok(AffineHamiltonian { v_int, v_bar })
    }

    pub fn n_intensive(&self) -> usize {
        self.v_bar.len()
    }

    pub fn n_states(&self) -> usize {
        self.v_int.len()
    }

    pub fn v_int(&self) -> &[f64] {
        &self.v_int
    }

    pub fn v_bar(&self) -> &[Vec<f64>] {
        &self.v_bar
    }

    /// Tabulates `H(q, m_i)`.
    pub fn energies(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_len("q", self.n_intensive(), q.len())?;
        let mut h = self.v_int.clone();
        for (qj, row) in q.iter().zip(&self.v_bar) {
            for (hi, vi) in h.iter_mut().zip(row) {
                *hi += qj * vi;
            }
        }
        Ok(h)
    }

    /// Hamiltonian with internal energy `v_int + shift·v_bar`, i.e. the
    /// intensive variables offset by a background `shift`.
    pub fn shifted(&self, shift: &[f64]) -> Result<Self> {
        let v_int = self.energies(shift)?;
        Ok(AffineHamiltonian {
            v_int,
            v_bar: self.v_bar.clone(),
        })
    }

    fn check(&self, space: &MicrostateSpace) -> Result<()> {
        check_len("hamiltonian states", space.len(), self.n_states())
    }
}

fn check_density(space: &MicrostateSpace, d: &Density) -> Result<()> {
    check_len("density", space.len(), d.len())
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(ThermoError::invalid(format!("temperature must be positive, got {t}")));
    }
    Ok(())
}

/// `-Σ w_i rho_i ln rho_i` with `0 ln 0 = 0`.
pub fn entropy(space: &MicrostateSpace, d: &Density) -> f64 {
    -space
        .weights()
        .iter()
        .zip(d.values())
        .map(|(w, &r)| if r > 0.0 { w * r * r.ln() } else { 0.0 })
        .sum::<f64>()
}

pub fn internal_energy(space: &MicrostateSpace, h: &AffineHamiltonian, d: &Density) -> Result<f64> {
    h.check(space)?;
    check_density(space, d)?;
    Ok(space
        .weights()
        .iter()
        .zip(h.v_int().iter().zip(d.values()))
        .map(|(w, (v, r))| w * v * r)
        .sum())
}

/// Generalised pressures `p_j = -Σ w_i v_bar[j][i] rho_i`.
pub fn pressures(space: &MicrostateSpace, h: &AffineHamiltonian, d: &Density) -> Result<Vec<f64>> {
    h.check(space)?;
    check_density(space, d)?;
    Ok(h.v_bar()
        .iter()
        .map(|row| {
            -space
                .weights()
                .iter()
                .zip(row.iter().zip(d.values()))
                .map(|(w, (v, r))| w * v * r)
                .sum::<f64>()
        })
        .collect())
}

/// `G = -T S + <H(q, ·)>`.
pub fn free_energy(space: &MicrostateSpace, h: &AffineHamiltonian, temperature: f64, q: &[f64], d: &Density) -> Result<f64> {
    check_temperature(temperature)?;
    h.check(space)?;
    check_density(space, d)?;
    let energies = h.energies(q)?;
    let mean: f64 = space
        .weights()
        .iter()
        .zip(energies.iter().zip(d.values()))
        .map(|(w, (e, r))| w * e * r)
        .sum();
    Ok(-temperature * entropy(space, d) + mean)
}

/// `G = U - T S - Σ p_j q_j`; the thermodynamic route to the same value.
pub fn free_energy_via_potentials(
    space: &MicrostateSpace,
    h: &AffineHamiltonian,
    temperature: f64,
    q: &[f64],
    d: &Density,
) -> Result<f64> {
    check_temperature(temperature)?;
    check_len("q", h.n_intensive(), q.len())?;
    let u = internal_energy(space, h, d)?;
    let p = pressures(space, h, d)?;
    let pq: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    Ok(u - temperature * entropy(space, d) - pq)
}

/// `ln Σ exp(x_i)` without overflow.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsResult {
    pub rho_g: Density,
    pub log_z: f64,
}

impl GibbsResult {
    /// Equilibrium free energy `G* = -T ln Z`.
    pub fn free_energy(&self, temperature: f64) -> f64 {
        -temperature * self.log_z
    }
}

/// Gibbs distribution `rho_i = exp(-H_i / T) / Z`, `Z = Σ w_i exp(-H_i / T)`.
pub fn gibbs(space: &MicrostateSpace, h: &AffineHamiltonian, temperature: f64, q: &[f64]) -> Result<GibbsResult> {
    check_temperature(temperature)?;
    h.check(space)?;
    let energies = h.energies(q)?;
    let exponents: Vec<f64> = space
        .weights()
        .iter()
        .zip(&energies)
        .map(|(w, e)| w.ln() - e / temperature)
        .collect();
    let log_z = log_sum_exp(&exponents);
    let rho = energies.iter().map(|e| (-e / temperature - log_z).exp()).collect();
    Ok(GibbsResult {
        rho_g: Density::from_raw(rho),
        log_z,
    })
}

/// Variational derivative `T (1 + ln rho_i) + H(q, m_i)` of `G` (per unit
/// weight). Constant across states exactly at the Gibbs distribution.
pub fn variational_derivative(
    space: &MicrostateSpace,
    h: &AffineHamiltonian,
    temperature: f64,
    q: &[f64],
    d: &Density,
) -> Result<Vec<f64>> {
    h.check(space)?;
    check_density(space, d)?;
    if !d.is_strictly_positive() {
        return Err(ThermoError::invalid("variational derivative needs a strictly positive density"));
    }
    let energies = h.energies(q)?;
    Ok(d.values()
        .iter()
        .zip(&energies)
        .map(|(r, e)| temperature * (1.0 + r.ln()) + e)
        .collect())
}

/// The point `(-G, S, T, p, q)` of the extended phase space.
pub fn lift_to_extended(
    space: &MicrostateSpace,
    h: &AffineHamiltonian,
    temperature: f64,
    q: &[f64],
    d: &Density,
) -> Result<ExtendedPoint> {
    let g = free_energy(space, h, temperature, q, d)?;
    let s = entropy(space, d);
    let p = pressures(space, h, d)?;
    ExtendedPoint::new(-g, s, temperature, p, q.to_vec())
}

/// JSON document describing a microstate space and an affine Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
    pub v_int: Vec<f64>,
    pub v_bar: Vec<Vec<f64>>,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<(MicrostateSpace, AffineHamiltonian)> {
        let space = MicrostateSpace::new(self.labels.clone(), self.weights.clone())?;
        let h = AffineHamiltonian::new(self.v_int.clone(), self.v_bar.clone())?;
        h.check(&space)?;
        Ok((space, h))
    }

    pub fn from_parts(space: &MicrostateSpace, h: &AffineHamiltonian) -> Self {
        SystemSpec {
            labels: space.labels().to_vec(),
            weights: space.weights().to_vec(),
            v_int: h.v_int().to_vec(),
            v_bar: h.v_bar().to_vec(),
        }
    }
}

/// Reads densities stored one per CSV row (no header), validating each.
pub fn read_densities_csv<R: std::io::Read>(space: &MicrostateSpace, reader: R) -> Result<Vec<Density>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let values = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| ThermoError::invalid(format!("bad density entry {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Density::new(space, values)?);
    }
    Ok(out)
}
