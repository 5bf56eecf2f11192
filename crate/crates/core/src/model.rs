//! Parameter and state types shared by the analytic and time-domain routes.
//!
//! Every frequency and rate is dimensionless, measured in units of the
//! decay rate γ₂ of level |2⟩. Conversion to laboratory units is a labelling
//! concern handled by the command-line layer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Norm deviation accepted without touching the amplitudes.
pub const NORM_EXACT_TOL: f64 = 1e-12;
/// Norm deviation beyond which a state is rejected.
pub const NORM_REJECT_TOL: f64 = 1e-9;

/// Rabi frequencies and laser detunings.
///
/// Ω₁₂ couples |1⟩↔|2⟩, Ω₂₄ couples |4⟩↔|2⟩ and Ω₂₃ couples |2⟩↔|3⟩.
/// Detunings follow δ₁ = ν₁ − ω₂₁, δ₂ = ν₂ − ω₂₄, δ₃ = ν₃ − ω₃₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParameters {
    pub omega12: C64,
    pub omega24: C64,
    pub omega23: C64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl DriveParameters {
    /// Real Rabi frequencies, all lasers on resonance.
    pub fn resonant(omega12: f64, omega24: f64, omega23: f64) -> Self {
        Self {
            omega12: C64::new(omega12, 0.0),
            omega24: C64::new(omega24, 0.0),
            omega23: C64::new(omega23, 0.0),
            delta1: 0.0,
            delta2: 0.0,
            delta3: 0.0,
        }
    }

    pub fn with_detunings(mut self, delta1: f64, delta2: f64, delta3: f64) -> Self {
        self.delta1 = delta1;
        self.delta2 = delta2;
        self.delta3 = delta3;
        self
    }

    pub fn max_detuning(&self) -> f64 {
        self.delta1.abs().max(self.delta2.abs()).max(self.delta3.abs())
    }

    pub fn is_resonant(&self, tol: f64) -> bool {
        self.max_detuning() <= tol
    }

    /// Every parameter multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega12: self.omega12 * factor,
            omega24: self.omega24 * factor,
            omega23: self.omega23 * factor,
            delta1: self.delta1 * factor,
            delta2: self.delta2 * factor,
            delta3: self.delta3 * factor,
        }
    }

    fn check_finite(&self) -> Result<()> {
        let complex = [
            ("omega12", self.omega12),
            ("omega24", self.omega24),
            ("omega23", self.omega23),
        ];
        for (name, z) in complex {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteParameter { name });
            }
        }
        let real = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("delta3", self.delta3),
        ];
        for (name, x) in real {
            if !x.is_finite() {
                return Err(Error::NonFiniteParameter { name });
            }
        }
        Ok(())
    }
}

/// Radiative decay rates of |2⟩ and |3⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    pub gamma2: f64,
    pub gamma3: f64,
}

impl DecayRates {
    pub fn new(gamma2: f64, gamma3: f64) -> Self {
        Self { gamma2, gamma3 }
    }

    /// γ₂ = γ₃ = 1.
    pub fn equal() -> Self {
        Self::new(1.0, 1.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.gamma2 * factor, self.gamma3 * factor)
    }

    fn check(&self) -> Result<()> {
        if !self.gamma2.is_finite() {
            return Err(Error::NonFiniteParameter { name: "gamma2" });
        }
        if !self.gamma3.is_finite() {
            return Err(Error::NonFiniteParameter { name: "gamma3" });
        }
        if self.gamma2 <= 0.0 {
            return Err(Error::NegativeRate {
                name: "gamma2",
                value: self.gamma2,
                requirement: "must be > 0",
            });
        }
        if self.gamma3 < 0.0 {
            return Err(Error::NegativeRate {
                name: "gamma3",
                value: self.gamma3,
                requirement: "must be >= 0",
            });
        }
        Ok(())
    }
}

/// Initial probability amplitudes of the four atomic levels. The
/// one-photon sectors start empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialAmplitudes {
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub a4: C64,
}

impl InitialAmplitudes {
    pub fn new(a1: C64, a2: C64, a3: C64, a4: C64) -> Self {
        Self { a1, a2, a3, a4 }
    }

    pub fn real(a1: f64, a2: f64, a3: f64, a4: f64) -> Self {
        Self::new(a1.into(), a2.into(), a3.into(), a4.into())
    }

    /// Population entirely in `level` (1..=4).
    ///
    /// # Panics
    /// If `level` is not in 1..=4.
    pub fn basis(level: usize) -> Self {
        let mut a = [C64::new(0.0, 0.0); 4];
        assert!((1..=4).contains(&level), "level must be 1..=4, got {level}");
        a[level - 1] = C64::new(1.0, 0.0);
        Self::from_array(a)
    }

    pub fn from_array(a: [C64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.as_array().iter().map(|a| a.norm_sqr()).sum()
    }
}

/// A drive, decay and initial-state triple that passed validation.
///
/// Fields are private so that every instance satisfies the invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    drive: DriveParameters,
    decay: DecayRates,
    init: InitialAmplitudes,
}

impl Scenario {
    pub fn new(
        drive: DriveParameters,
        decay: DecayRates,
        init: InitialAmplitudes,
    ) -> Result<Self> {
        validate_scenario(drive, decay, init)
    }

    pub fn drive(&self) -> &DriveParameters {
        &self.drive
    }

    pub fn decay(&self) -> &DecayRates {
        &self.decay
    }

    pub fn init(&self) -> &InitialAmplitudes {
        &self.init
    }

    /// All frequencies and rates scaled by `factor > 0`; amplitudes unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.drive.scaled(factor),
            self.decay.scaled(factor),
            self.init,
        )
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            drive: DriveParameters,
            decay: DecayRates,
            init: InitialAmplitudes,
        }
        let raw = Raw::deserialize(d)?;
        validate_scenario(raw.drive, raw.decay, raw.init).map_err(serde::de::Error::custom)
    }
}

/// Checks every invariant of the three parameter types.
///
/// A norm within [`NORM_EXACT_TOL`] of one is accepted as-is. Deviations up
/// to [`NORM_REJECT_TOL`] (typically decimal round-off in hand-written
/// amplitudes) are renormalized; anything larger is rejected.
pub fn validate_scenario(
    drive: DriveParameters,
    decay: DecayRates,
    init: InitialAmplitudes,
) -> Result<Scenario> {
    drive.check_finite()?;
    decay.check()?;
    let a = init.as_array();
    let names = ["a1", "a2", "a3", "a4"];
    for (name, z) in names.iter().zip(a.iter()) {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFiniteParameter { name });
        }
    }
    let norm = init.norm_sqr();
    let deviation = (norm - 1.0).abs();
    let init = if deviation <= NORM_EXACT_TOL {
        init
    } else if deviation <= NORM_REJECT_TOL {
        let scale = norm.sqrt().recip();
        InitialAmplitudes::from_array(a.map(|z| z * scale))
    } else {
        return Err(Error::NonNormalizedInitialState { norm });
    };
    Ok(Scenario { drive, decay, init })
}

/// Emission channel: |2⟩→|g⟩ photons (S₂) or |3⟩→|e⟩ photons (S₃).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    S2,
    S3,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::S2 => f.write_str("s2"),
            Channel::S3 => f.write_str("s3"),
        }
    }
}

impl FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s2" => Ok(Channel::S2),
            "s3" => Ok(Channel::S3),
            other => Err(format!("unknown channel '{other}' (expected s2 or s3)")),
        }
    }
}

/// Uniform grid of emission detunings δ_k (or δ_q), endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    delta_min: f64,
    delta_max: f64,
    n_points: usize,
}

impl SpectrumGrid {
    pub const DEFAULT_MIN: f64 = -10.0;
    pub const DEFAULT_MAX: f64 = 10.0;
    pub const DEFAULT_POINTS: usize = 2001;

    pub fn new(delta_min: f64, delta_max: f64, n_points: usize) -> Result<Self> {
        if !delta_min.is_finite() || !delta_max.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if delta_min >= delta_max {
            return Err(Error::InvalidGrid(format!(
                "delta_min ({delta_min}) must be below delta_max ({delta_max})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        Ok(Self {
            delta_min,
            delta_max,
            n_points,
        })
    }

    /// Symmetric grid on [−half_width, half_width].
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.delta_max - self.delta_min) / (self.n_points - 1) as f64
    }

    /// The j-th grid point. Computed as a ratio so that e.g. the midpoint of
    /// a symmetric grid is exactly zero.
    pub fn point(&self, j: usize) -> f64 {
        let span = self.delta_max - self.delta_min;
        self.delta_min + span * j as f64 / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.point(j))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.delta_min * factor, self.delta_max * factor, self.n_points)
    }
}

impl Default for SpectrumGrid {
    fn default() -> Self {
        Self {
            delta_min: Self::DEFAULT_MIN,
            delta_max: Self::DEFAULT_MAX,
            n_points: Self::DEFAULT_POINTS,
        }
    }
}

/// Sampled spectral density on a grid, in units of 1/γ₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: SpectrumGrid,
    pub values: Vec<f64>,
    pub channel: Channel,
}

impl Spectrum {
    pub fn new(grid: SpectrumGrid, values: Vec<f64>, channel: Channel) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self {
            grid,
            values,
            channel,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.points().zip(self.values.iter().copied())
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        let h = self.grid.step();
        let n = self.values.len();
        let inner: f64 = self.values[1..n - 1].iter().sum();
        h * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
    }
}
