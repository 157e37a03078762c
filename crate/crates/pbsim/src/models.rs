//! Physical models: parameter sets, derived coupling rates, Hamiltonian and
//! channel builders for the single-cavity and two-cavity configurations.
//!
//! All rates are stored in units of the atom damping rate `kappa`; the atom
//! occupies tensor slot 0 and the mechanical mode slot 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{C64, HilbertSpace, Operator, annihilation, embed, pauli_ops};
use crate::liouvillian::{CollapseChannel, RotatingDrive};

/// Parameters of the single-cavity model: one driven mechanical mode coupled
/// to a two-level atom through the cavity-mediated interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneCavityParams {
    /// Atom damping rate; the unit of account.
    pub kappa: f64,
    /// Mechanical damping rate.
    pub gamma_m: f64,
    /// Cavity damping rate.
    pub gamma_c: f64,
    /// Tripartite atom-photon-phonon rate.
    pub gamma_tri: f64,
    /// Mechanical frequency.
    pub omega_m: f64,
    /// Cavity-drive detuning.
    #[serde(default)]
    pub delta_c: f64,
    /// Cavity drive amplitude.
    pub omega_drive: f64,
    /// Mechanical drive amplitude.
    pub eps: f64,
    /// Atom-drive detuning.
    #[serde(default)]
    pub delta: f64,
    /// Thermal phonon occupation of the mechanical bath.
    #[serde(default)]
    pub n_bth: f64,
    /// Fock truncation of the mechanical mode.
    #[serde(default = "default_n_trunc")]
    pub n_trunc: usize,
}

fn default_n_trunc() -> usize {
    15
}

impl Default for OneCavityParams {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            gamma_m: 0.01,
            gamma_c: 1.0,
            gamma_tri: 0.003,
            omega_m: 280.0,
            delta_c: 0.0,
            omega_drive: 83.33,
            eps: 0.01,
            delta: 0.0,
            n_bth: 0.0,
            n_trunc: 15,
        }
    }
}

impl OneCavityParams {
    /// Rejects parameter sets outside the model's domain.
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("kappa", self.kappa),
            ("gamma_m", self.gamma_m),
            ("gamma_c", self.gamma_c),
            ("gamma_tri", self.gamma_tri),
            ("omega_m", self.omega_m),
            ("omega_drive", self.omega_drive),
            ("eps", self.eps),
            ("n_bth", self.n_bth),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if !self.delta.is_finite() || !self.delta_c.is_finite() {
            return Err(Error::Config("detunings must be finite".into()));
        }
        if self.n_trunc < 2 {
            return Err(Error::Config(format!(
                "n_trunc must be at least 2, got {}",
                self.n_trunc
            )));
        }
        Ok(())
    }

    /// Atom ⊗ phonon space for this truncation.
    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(&[("atom", 2), ("phonon", self.n_trunc)])
    }

    /// The cavity-mediated atom-phonon coupling `G` at these parameters.
    pub fn coupling(&self) -> Result<f64> {
        let n_cav = cavity_mean_photon(self.omega_drive, self.delta_c, self.gamma_c)?;
        Ok(effective_coupling_one_cavity(self.gamma_tri, n_cav))
    }
}

/// Parameters of the two-cavity model: the antisymmetric mechanical supermode
/// coupled to the atom through the optical supermodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoCavityParams {
    /// Atom-photon coupling rate.
    pub g: f64,
    /// Optomechanical coupling rate.
    pub g0: f64,
    /// Cavity-cavity tunneling rate.
    pub j: f64,
    /// Mechanical-mechanical tunneling rate.
    #[serde(default)]
    pub jm: f64,
    /// Mechanical frequency.
    pub omega_m: f64,
    /// Mean photon number of the symmetric optical supermode.
    pub n_plus: f64,
    /// Mean photon number of the antisymmetric optical supermode.
    pub n_minus: f64,
    /// Mechanical drive amplitude (physical, before the supermode 1/√2 factor).
    pub eps: f64,
    /// Atom damping rate; the unit of account.
    pub kappa: f64,
    /// Supermode mechanical damping rate.
    pub gamma_m: f64,
    /// Fock truncation of the mechanical supermode.
    #[serde(default = "default_n_trunc")]
    pub n_trunc: usize,
}

impl Default for TwoCavityParams {
    fn default() -> Self {
        Self {
            g: 0.08,
            g0: 0.4,
            j: 0.8,
            jm: 0.002,
            omega_m: 280.0,
            n_plus: 2601.0,
            n_minus: 1.0,
            eps: 0.03,
            kappa: 1.0,
            gamma_m: 0.01,
            n_trunc: 15,
        }
    }
}

impl TwoCavityParams {
    /// Rejects parameter sets outside the model's domain.
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("g0", self.g0),
            ("jm", self.jm),
            ("omega_m", self.omega_m),
            ("eps", self.eps),
            ("kappa", self.kappa),
            ("gamma_m", self.gamma_m),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if !(self.j > 0.0) || !self.j.is_finite() {
            return Err(Error::Config(format!("j must be positive, got {}", self.j)));
        }
        if !(self.n_plus >= self.n_minus && self.n_minus >= 0.0) {
            return Err(Error::Config(format!(
                "supermode populations need n_plus >= n_minus >= 0, got {} and {}",
                self.n_plus, self.n_minus
            )));
        }
        if self.n_trunc < 2 {
            return Err(Error::Config(format!(
                "n_trunc must be at least 2, got {}",
                self.n_trunc
            )));
        }
        Ok(())
    }

    /// Atom ⊗ supermode space for this truncation.
    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(&[("atom", 2), ("supermode", self.n_trunc)])
    }

    /// Tripartite rate `γ = g g0 / (4J)` at these parameters.
    pub fn tripartite_rate(&self) -> Result<f64> {
        tripartite_rate_two_cavity(self.g, self.g0, self.j)
    }

    /// Supermode-enhanced atom-phonon coupling `G'` at these parameters.
    pub fn coupling(&self) -> Result<f64> {
        let gamma = self.tripartite_rate()?;
        Ok(effective_coupling_two_cavity(
            gamma,
            self.n_plus,
            self.n_minus,
        ))
    }
}

/// A rotating-wave validity concern raised by a model builder.
#[derive(Debug, Clone, PartialEq)]
pub enum RwaWarning {
    /// The tripartite rate is not small against the effective coupling.
    TripartiteComparable { gamma_tri: f64, coupling: f64 },
    /// The effective coupling is not small against the mechanical frequency.
    CouplingNearMechanical { coupling: f64, omega_m: f64 },
    /// The dropped fast term of the two-cavity model is not negligible.
    FastTermComparable { ratio: f64 },
}

impl std::fmt::Display for RwaWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RwaWarning::TripartiteComparable { gamma_tri, coupling } => write!(
                f,
                "rotating-wave validity: gamma_tri = {gamma_tri:.4} is not small against the coupling {coupling:.4}"
            ),
            RwaWarning::CouplingNearMechanical { coupling, omega_m } => write!(
                f,
                "rotating-wave validity: coupling {coupling:.4} is not small against omega_m = {omega_m:.4}"
            ),
            RwaWarning::FastTermComparable { ratio } => write!(
                f,
                "fast-term validity: (g/omega_m)(sqrt(n+) - sqrt(n-)) = {ratio:.4} exceeds 0.1"
            ),
        }
    }
}

/// Mean intracavity photon number of a driven damped cavity,
/// `n_cav = Ω² / (δ_c² + (Γ_c/2)²)`.
pub fn cavity_mean_photon(omega_drive: f64, delta_c: f64, gamma_c: f64) -> Result<f64> {
    let denom = delta_c * delta_c + 0.25 * gamma_c * gamma_c;
    if denom == 0.0 {
        return Err(Error::DivergentDrive);
    }
    Ok(omega_drive * omega_drive / denom)
}

/// Cavity-mediated atom-phonon coupling `G = γ √n_cav`.
pub fn effective_coupling_one_cavity(gamma_tri: f64, n_cav: f64) -> f64 {
    assert!(n_cav >= 0.0, "mean photon number must be nonnegative");
    gamma_tri * n_cav.sqrt()
}

/// Tripartite atom-photon-phonon rate `γ = g g0 / (4J)`.
pub fn tripartite_rate_two_cavity(g: f64, g0: f64, j: f64) -> Result<f64> {
    if j == 0.0 {
        return Err(Error::DivisionByZero("J"));
    }
    Ok(g * g0 / (4.0 * j))
}

/// Supermode-enhanced atom-phonon coupling `G' = γ(√n₊ − √n₋)`.
pub fn effective_coupling_two_cavity(gamma_eff: f64, n_plus: f64, n_minus: f64) -> f64 {
    assert!(
        n_plus >= n_minus && n_minus >= 0.0,
        "supermode populations need n_plus >= n_minus >= 0"
    );
    gamma_eff * (n_plus.sqrt() - n_minus.sqrt())
}

/// Coupling that minimizes the steady-state two-phonon correlation,
/// `G_opt = (1/2)√(κ(κ + γ))`.
pub fn optimal_coupling(kappa: f64, gamma_tri: f64) -> f64 {
    assert!(kappa > 0.0, "kappa must be positive");
    assert!(gamma_tri >= 0.0, "gamma_tri must be nonnegative");
    0.5 * (kappa * (kappa + gamma_tri)).sqrt()
}

/// Which form of the optical-supermode mixing coefficients to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    Exact,
    FirstOrder,
}

/// Optical-supermode mixing coefficients `(α, β)` at mechanical displacement
/// `δ_b`. The exact form is
/// `α = J[(√(δ_b²+J²)+δ_b)² + J²]^{-1/2}`, `β = (α/J)(√(δ_b²+J²)+δ_b)`;
/// the first-order form is `α = (1 − δ_b/2J)/√2`, `β = (1 + δ_b/2J)/√2`.
pub fn supermode_coefficients(delta_b: f64, j: f64, order: ExpansionOrder) -> Result<(f64, f64)> {
    if !(j > 0.0) {
        return Err(Error::DivisionByZero("J"));
    }
    match order {
        ExpansionOrder::Exact => {
            let s = (delta_b * delta_b + j * j).sqrt();
            let alpha = j / ((s + delta_b).powi(2) + j * j).sqrt();
            let beta = alpha / j * (s + delta_b);
            Ok((alpha, beta))
        }
        ExpansionOrder::FirstOrder => {
            let ratio = delta_b.abs() / j;
            if ratio >= 0.2 {
                return Err(Error::ExpansionInvalid { ratio });
            }
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            Ok((
                inv_sqrt2 * (1.0 - delta_b / (2.0 * j)),
                inv_sqrt2 * (1.0 + delta_b / (2.0 * j)),
            ))
        }
    }
}

/// Single-cavity Hamiltonian
/// `H = (Δ/2)σ_z + Δ b†b + G(σ₊b + σ₋b†) + ε(b† + b)`
/// in the frame rotating with the mechanical drive.
pub fn build_one_cavity_hamiltonian(p: &OneCavityParams) -> Result<Operator> {
    p.validate()?;
    let space = p.space()?;
    let (sp, sm, sz) = pauli_ops();
    let b = annihilation(p.n_trunc)?;
    let sz_l = embed(&sz, &space, 0)?;
    let sp_l = embed(&sp, &space, 0)?;
    let sm_l = embed(&sm, &space, 0)?;
    let b_l = embed(&b, &space, 1)?;
    let bd_l = b_l.dagger();
    let g = p.coupling()?;

    let mut h = sz_l.scale(C64::new(0.5 * p.delta, 0.0));
    h = h.add(&bd_l.dot(&b_l).scale(C64::new(p.delta, 0.0)));
    h = h.add(
        &sp_l
            .dot(&b_l)
            .add(&sm_l.dot(&bd_l))
            .scale(C64::new(g, 0.0)),
    );
    h = h.add(&bd_l.add(&b_l).scale(C64::new(p.eps, 0.0)));
    Ok(h)
}

/// Validity concerns for the single-cavity rotating-wave reduction,
/// triggered when `γ > G/10` or `G > ω_m/10`.
pub fn one_cavity_rwa_warnings(p: &OneCavityParams) -> Result<Vec<RwaWarning>> {
    let g = p.coupling()?;
    let mut warnings = Vec::new();
    if p.gamma_tri > g / 10.0 {
        warnings.push(RwaWarning::TripartiteComparable {
            gamma_tri: p.gamma_tri,
            coupling: g,
        });
    }
    if g > p.omega_m / 10.0 {
        warnings.push(RwaWarning::CouplingNearMechanical {
            coupling: g,
            omega_m: p.omega_m,
        });
    }
    Ok(warnings)
}

/// Default damping channels of the single-cavity model:
/// `(b, Γ_m(n̄+1))`, `(b†, Γ_m n̄)`, `(σ₋, κ)`.
pub fn one_cavity_channels(p: &OneCavityParams) -> Result<Vec<CollapseChannel>> {
    p.validate()?;
    let space = p.space()?;
    let (_, sm, _) = pauli_ops();
    let b_l = embed(&annihilation(p.n_trunc)?, &space, 1)?;
    let sm_l = embed(&sm, &space, 0)?;
    Ok(vec![
        CollapseChannel::new(b_l.clone(), p.gamma_m * (p.n_bth + 1.0))?,
        CollapseChannel::new(b_l.dagger(), p.gamma_m * p.n_bth)?,
        CollapseChannel::new(sm_l, p.kappa)?,
    ])
}

/// Two-cavity Hamiltonian with the fast term dropped:
/// `H = -G'(σ₊b₋ + σ₋b₋†) + (ε/√2)(b₋† + b₋)`.
pub fn build_two_cavity_hamiltonian_reduced(p: &TwoCavityParams) -> Result<Operator> {
    p.validate()?;
    let space = p.space()?;
    let (sp, sm, _) = pauli_ops();
    let b = annihilation(p.n_trunc)?;
    let sp_l = embed(&sp, &space, 0)?;
    let sm_l = embed(&sm, &space, 0)?;
    let b_l = embed(&b, &space, 1)?;
    let bd_l = b_l.dagger();
    let g_prime = p.coupling()?;

    let mut h = sp_l
        .dot(&b_l)
        .add(&sm_l.dot(&bd_l))
        .scale(C64::new(-g_prime, 0.0));
    h = h.add(
        &bd_l
            .add(&b_l)
            .scale(C64::new(p.eps * std::f64::consts::FRAC_1_SQRT_2, 0.0)),
    );
    Ok(h)
}

/// The fast atomic term of the two-cavity model,
/// `(g/√2)(G'/γ)(σ₊ e^{iω_m t} + σ₋ e^{-iω_m t})`, in rotating form.
/// The amplitude is evaluated as `(g/√2)(√n₊ − √n₋)`, which equals the
/// quoted ratio and stays finite as the tripartite rate goes to zero.
pub fn two_cavity_drive_term(p: &TwoCavityParams) -> Result<RotatingDrive> {
    p.validate()?;
    let space = p.space()?;
    let (sp, _, _) = pauli_ops();
    Ok(RotatingDrive {
        op: embed(&sp, &space, 0)?,
        amplitude: p.g * std::f64::consts::FRAC_1_SQRT_2 * (p.n_plus.sqrt() - p.n_minus.sqrt()),
        frequency: p.omega_m,
    })
}

/// Two-cavity Hamiltonian with the fast term retained, evaluated at time `t`.
pub fn build_two_cavity_hamiltonian_full(p: &TwoCavityParams, t: f64) -> Result<Operator> {
    let base = build_two_cavity_hamiltonian_reduced(p)?;
    let drive = two_cavity_drive_term(p)?;
    Ok(base.add(&drive.at(t)))
}

/// Validity concern for dropping the fast term, triggered when
/// `(g/ω_m)(√n₊ − √n₋) > 0.1`.
pub fn two_cavity_rwa_warnings(p: &TwoCavityParams) -> Result<Vec<RwaWarning>> {
    p.validate()?;
    if p.omega_m == 0.0 {
        return Err(Error::InvalidFrequency(
            "omega_m must be positive for the fast-term validity check".into(),
        ));
    }
    let ratio = p.g / p.omega_m * (p.n_plus.sqrt() - p.n_minus.sqrt());
    let mut warnings = Vec::new();
    if ratio > 0.1 {
        warnings.push(RwaWarning::FastTermComparable { ratio });
    }
    Ok(warnings)
}

/// Damping channels of the two-cavity model at zero mechanical bath
/// temperature: `(b₋, Γ_m)`, `(σ₋, κ)`.
pub fn two_cavity_channels(p: &TwoCavityParams) -> Result<Vec<CollapseChannel>> {
    p.validate()?;
    let space = p.space()?;
    let (_, sm, _) = pauli_ops();
    let b_l = embed(&annihilation(p.n_trunc)?, &space, 1)?;
    let sm_l = embed(&sm, &space, 0)?;
    Ok(vec![
        CollapseChannel::new(b_l, p.gamma_m)?,
        CollapseChannel::new(sm_l, p.kappa)?,
    ])
}
