//! Phonon-number correlation functions and the blockade/tunneling classifier.
//!
//! `g_n` evaluates the normally-ordered moment ratio
//! `g⁽ⁿ⁾(0) = <(b†)ⁿ bⁿ> / <b†b>ⁿ` on one tensor slot; `classify` maps the
//! `(g2, g3, g4)` triple to a region label and the descending ordering of
//! `{1, g2, g3, g4}`.

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;

/// Mean occupation below which correlation ratios are treated as undefined.
pub const OCCUPATION_FLOOR: f64 = 1e-12;

/// Region taxonomy for the phonon statistics of a steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    StandardPb,
    NonStandardPb,
    PhononInducedTunneling,
    Unclassified,
}

impl RegionLabel {
    /// Stable string form used in CSV output.
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::StandardPb => "standard_PB",
            RegionLabel::NonStandardPb => "non_standard_PB",
            RegionLabel::PhononInducedTunneling => "phonon_induced_tunneling",
            RegionLabel::Unclassified => "unclassified",
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which tunneling criterion [`classify_with`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TunnelingCriterion {
    /// `g4 > g3 > g2 > 1`.
    Full,
    /// `g3 > g2 > 1`, the weaker published variant.
    Weak,
}

/// Correlation summary of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub mean_phonon: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub region_label: RegionLabel,
    pub ordering: String,
}

fn fock_index(flat: usize, dims: &[usize], slot: usize) -> usize {
    let stride: usize = dims[slot + 1..].iter().product();
    (flat / stride) % dims[slot]
}

/// Normally-ordered moment `<(b†)ⁿ bⁿ>` of the mode at `slot`, evaluated from
/// the diagonal populations.
fn falling_moment(rho: &DensityMatrix, slot: usize, n: u32) -> Result<f64> {
    let space = rho.space();
    if slot >= space.n_subsystems() {
        return Err(Error::InvalidDimension(format!(
            "subsystem index {slot} out of range for a {}-subsystem space",
            space.n_subsystems()
        )));
    }
    let dims: Vec<usize> = (0..space.n_subsystems()).map(|k| space.dim(k)).collect();
    let d = space.total_dim();
    let mut acc = 0.0;
    for flat in 0..d {
        let m = fock_index(flat, &dims, slot) as f64;
        let mut ff = 1.0;
        for k in 0..n {
            ff *= m - k as f64;
        }
        if ff != 0.0 {
            acc += ff * rho.matrix()[[flat, flat]].re;
        }
    }
    Ok(acc)
}

/// Mean occupation `<b†b>` of the mode at `slot`.
pub fn mean_phonon(rho: &DensityMatrix, slot: usize) -> Result<f64> {
    let v = falling_moment(rho, slot, 1)?;
    Ok(clamp_tiny_negative(v)?)
}

fn clamp_tiny_negative(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v > -1e-8 {
        Ok(0.0)
    } else {
        Err(Error::Solver(format!(
            "population moment is negative beyond tolerance: {v:.3e}"
        )))
    }
}

/// Equal-time correlation `g⁽ⁿ⁾(0) = <(b†)ⁿ bⁿ> / <b†b>ⁿ` for `n` in 2..=4
/// on the mode at `slot`.
pub fn g_n(rho: &DensityMatrix, slot: usize, n: u32) -> Result<f64> {
    if !(2..=4).contains(&n) {
        return Err(Error::Config(format!(
            "correlation order must be 2, 3, or 4, got {n}"
        )));
    }
    let occupation = clamp_tiny_negative(falling_moment(rho, slot, 1)?)?;
    if occupation <= OCCUPATION_FLOOR {
        return Err(Error::UndefinedCorrelation { occupation });
    }
    let numerator = clamp_tiny_negative(falling_moment(rho, slot, n)?)?;
    Ok(numerator / occupation.powi(n as i32))
}

/// `g⁽²⁾(0)` of the antisymmetric mechanical supermode; the state must carry
/// a subsystem labeled `supermode`.
pub fn supermode_g2(rho: &DensityMatrix) -> Result<f64> {
    let slot = rho.space().position_of("supermode").ok_or_else(|| {
        Error::InvalidDimension("state has no subsystem labeled 'supermode'".into())
    })?;
    g_n(rho, slot, 2)
}

/// Descending ordering of `{1, g2, g3, g4}` as a string like `g4>1>g2>g3`.
pub fn ordering_string(g2: f64, g3: f64, g4: f64) -> String {
    let mut entries = [("1", 1.0), ("g2", g2), ("g3", g3), ("g4", g4)];
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite correlation values"));
    entries
        .iter()
        .map(|(name, _)| *name)
        .collect::<Vec<_>>()
        .join(">")
}

/// Classifies a correlation triple with the stated tunneling criterion.
pub fn classify_with(
    g2: f64,
    g3: f64,
    g4: f64,
    criterion: TunnelingCriterion,
) -> (RegionLabel, String) {
    assert!(
        g2 >= 0.0 && g3 >= 0.0 && g4 >= 0.0,
        "correlation values must be nonnegative"
    );
    let ordering = ordering_string(g2, g3, g4);
    let label = if g2 < 1.0 && g3 < 1.0 && g4 < 1.0 {
        RegionLabel::StandardPb
    } else if g2 < 1.0 && (g3 > 1.0 || g4 > 1.0) {
        RegionLabel::NonStandardPb
    } else {
        let tunneling = match criterion {
            TunnelingCriterion::Full => g4 > g3 && g3 > g2 && g2 > 1.0,
            TunnelingCriterion::Weak => g3 > g2 && g2 > 1.0,
        };
        if tunneling {
            RegionLabel::PhononInducedTunneling
        } else {
            RegionLabel::Unclassified
        }
    };
    (label, ordering)
}

/// Classifies a correlation triple with the full tunneling criterion
/// `g4 > g3 > g2 > 1`.
pub fn classify(g2: f64, g3: f64, g4: f64) -> (RegionLabel, String) {
    classify_with(g2, g3, g4, TunnelingCriterion::Full)
}

/// Computes the full correlation summary of a state's mode at `slot`.
pub fn correlation_report(rho: &DensityMatrix, slot: usize) -> Result<CorrelationReport> {
    let mean = mean_phonon(rho, slot)?;
    let g2 = g_n(rho, slot, 2)?;
    let g3 = g_n(rho, slot, 3)?;
    let g4 = g_n(rho, slot, 4)?;
    let (region_label, ordering) = classify(g2, g3, g4);
    Ok(CorrelationReport {
        mean_phonon: mean,
        g2,
        g3,
        g4,
        region_label,
        ordering,
    })
}
