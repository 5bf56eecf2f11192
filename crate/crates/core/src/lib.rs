//! Spontaneous-emission spectra of an inverted-Y four-level atom.
//!
//! Level |1⟩ and |4⟩ are ground states coupled to the excited level |2⟩ by
//! the fields Ω₁₂ and Ω₂₄; a third field Ω₂₃ couples |2⟩ to the upper level
//! |3⟩. Levels |2⟩ and |3⟩ decay radiatively at rates γ₂ and γ₃ into
//! auxiliary levels, and the emitted photon spectra S₂ and S₃ are computed
//! two ways:
//!
//! * [`laplace`] evaluates the closed-form Laplace-domain amplitudes and the
//!   spectra they imply, for arbitrary detunings and initial states;
//! * [`resonant`] specialises to resonant driving, where the denominator is a
//!   real cubic whose roots give the line positions and widths;
//! * [`oracle`] integrates the amplitude equations in time and Fourier
//!   transforms the result, as an independent check on both.
//!
//! All frequencies are dimensionless, in units of γ₂.

pub mod cli;
pub mod cubic;
pub mod error;
pub mod laplace;
pub mod model;
pub mod oracle;
pub mod peaks;
pub mod presets;
pub mod resonant;

pub use error::{Error, Result};
pub use model::{
    validate_scenario, Channel, DecayRates, DriveParameters, InitialAmplitudes, Scenario,
    Spectrum, SpectrumGrid, C64,
};
