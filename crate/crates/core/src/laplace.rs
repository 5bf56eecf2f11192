//! Closed-form Laplace-domain amplitudes C̃₂(s), C̃₃(s) and the emission
//! spectra obtained from them by the final value theorem.
//!
//! Eliminating C̃₁, C̃₃, C̃₄ from the transformed amplitude equations leaves
//!
//! ```text
//!           a₂ + Σⱼ nⱼ / (s − pⱼ)
//! C̃₂(s) = ─────────────────────────────────
//!          s + γ₂/2 − iδ₁ + Σⱼ wⱼ / (s − pⱼ)
//! ```
//!
//! with one inner pole per coupled level:
//!
//! | level | pole pⱼ            | numerator nⱼ  | weight wⱼ  |
//! |-------|--------------------|---------------|------------|
//! | 1     | 0                  | iΩ₁₂a₁/2      | \|Ω₁₂/2\|² |
//! | 4     | i(δ₁−δ₂)           | iΩ₂₄a₄/2      | \|Ω₂₄/2\|² |
//! | 3     | i(δ₁+δ₃) − γ₃/2    | iΩ₂₃*a₃/2     | \|Ω₂₃/2\|² |
//!
//! Inner poles lie on or near the physical axis s = −iω, so the nested form
//! has removable 0/0 points on ordinary grid points. Evaluation goes through
//! the cleared form instead: coincident poles are merged, uncoupled poles
//! dropped, and numerator and denominator multiplied by the product of the
//! remaining distinct factors.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Channel, Scenario, Spectrum, SpectrumGrid, C64};

/// |D(s)| below this is treated as a genuine pole.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Inner poles closer than this (relative to 1 + |p|) are merged.
const POLE_MERGE_TOL: f64 = 1e-14;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
struct InnerPole {
    location: C64,
    numerator: C64,
    weight: f64,
}

/// C̃₂ as a ratio of two polynomials in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearedAmplitude {
    a2: C64,
    shift: C64,
    poles: Vec<InnerPole>,
}

impl ClearedAmplitude {
    pub fn new(scenario: &Scenario) -> Self {
        let d = scenario.drive();
        let g = scenario.decay();
        let a = scenario.init();
        let raw = [
            InnerPole {
                location: C64::new(0.0, 0.0),
                numerator: I * d.omega12 * a.a1 / 2.0,
                weight: (d.omega12 / 2.0).norm_sqr(),
            },
            InnerPole {
                location: C64::new(0.0, d.delta1 - d.delta2),
                numerator: I * d.omega24 * a.a4 / 2.0,
                weight: (d.omega24 / 2.0).norm_sqr(),
            },
            InnerPole {
                location: C64::new(-g.gamma3 / 2.0, d.delta1 + d.delta3),
                numerator: I * d.omega23.conj() * a.a3 / 2.0,
                weight: (d.omega23 / 2.0).norm_sqr(),
            },
        ];
        let mut poles: Vec<InnerPole> = Vec::with_capacity(3);
        for p in raw.into_iter().filter(|p| p.weight > 0.0) {
            let tol = POLE_MERGE_TOL * (1.0 + p.location.norm());
            match poles
                .iter_mut()
                .find(|q| (q.location - p.location).norm() <= tol)
            {
                Some(q) => {
                    q.numerator += p.numerator;
                    q.weight += p.weight;
                }
                None => poles.push(p),
            }
        }
        Self {
            a2: a.a2,
            shift: C64::new(g.gamma2 / 2.0, -d.delta1),
            poles,
        }
    }

    /// Number of distinct inner poles kept after merging.
    pub fn distinct_poles(&self) -> usize {
        self.poles.len()
    }

    /// Cleared numerator and denominator at `s`.
    pub fn parts(&self, s: C64) -> (C64, C64) {
        let factors: Vec<C64> = self.poles.iter().map(|p| s - p.location).collect();
        let full: C64 = factors.iter().product();
        let mut num = self.a2 * full;
        let mut den = (s + self.shift) * full;
        for (j, p) in self.poles.iter().enumerate() {
            let others: C64 = factors
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != j)
                .map(|(_, f)| *f)
                .product();
            num += p.numerator * others;
            den += p.weight * others;
        }
        (num, den)
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        let (num, den) = self.parts(s);
        if den.norm() < SINGULAR_TOL {
            return Err(Error::SingularEvaluation { s, index: None });
        }
        Ok(num / den)
    }
}

/// C̃₂(s) for a validated scenario.
pub fn evaluate_c2_tilde(s: C64, scenario: &Scenario) -> Result<C64> {
    ClearedAmplitude::new(scenario).eval(s)
}

/// C̃₃(s) = (a₃ + iΩ₂₃C̃₂(s)/2) / (s − i(δ₁+δ₃) + γ₃/2).
pub fn evaluate_c3_tilde(s: C64, scenario: &Scenario) -> Result<C64> {
    c3_from(&ClearedAmplitude::new(scenario), s, scenario)
}

fn c3_from(c2: &ClearedAmplitude, s: C64, scenario: &Scenario) -> Result<C64> {
    let d = scenario.drive();
    let a3 = scenario.init().a3;
    if a3 == C64::new(0.0, 0.0) && d.omega23 == C64::new(0.0, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    let denom = s - I * (d.delta1 + d.delta3) + scenario.decay().gamma3 / 2.0;
    if denom.norm() < SINGULAR_TOL {
        return Err(Error::SingularEvaluation { s, index: None });
    }
    let c2v = c2.eval(s)?;
    Ok((a3 + I * d.omega23 * c2v / 2.0) / denom)
}

/// Reference evaluation of C̃₂ straight from the nested fractions, with no
/// pole clearing. Undefined at inner poles; used to check the cleared form.
pub fn c2_tilde_nested(s: C64, scenario: &Scenario) -> C64 {
    let d = scenario.drive();
    let g = scenario.decay();
    let a = scenario.init();
    let d1 = s;
    let d4 = s - I * (d.delta1 - d.delta2);
    let d3 = s - I * (d.delta1 + d.delta3) + g.gamma3 / 2.0;
    let num = a.a2 + I * d.omega12 / 2.0 * a.a1 / d1 + I * d.omega23.conj() / 2.0 * a.a3 / d3
        + I * d.omega24 / 2.0 * a.a4 / d4;
    let den = s + g.gamma2 / 2.0 - I * d.delta1
        + (d.omega12 / 2.0).norm_sqr() / d1
        + (d.omega24 / 2.0).norm_sqr() / d4
        + (d.omega23 / 2.0).norm_sqr() / d3;
    num / den
}

/// S₂(δ_k) = γ₂/2π · |C̃₂(s = −i(δ_k − δ₁))|² on every grid point.
pub fn spectrum_s2(grid: &SpectrumGrid, scenario: &Scenario) -> Result<Spectrum> {
    let amp = ClearedAmplitude::new(scenario);
    let delta1 = scenario.drive().delta1;
    let prefactor = scenario.decay().gamma2 / (2.0 * PI);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let s = C64::new(0.0, -(grid.point(j) - delta1));
            amp.eval(s)
                .map(|c| prefactor * c.norm_sqr())
                .map_err(|e| with_index(e, j))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Spectrum::new(*grid, values, Channel::S2))
}

/// S₃(δ_q) = γ₃/2π · |C̃₃(s = −i(δ_q − δ₁ − δ₃))|². Identically zero for
/// γ₃ = 0, where level |3⟩ does not radiate.
pub fn spectrum_s3(grid: &SpectrumGrid, scenario: &Scenario) -> Result<Spectrum> {
    let gamma3 = scenario.decay().gamma3;
    if gamma3 == 0.0 {
        return Ok(Spectrum::new(*grid, vec![0.0; grid.len()], Channel::S3));
    }
    let amp = ClearedAmplitude::new(scenario);
    let d = scenario.drive();
    let offset = d.delta1 + d.delta3;
    let prefactor = gamma3 / (2.0 * PI);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let s = C64::new(0.0, -(grid.point(j) - offset));
            c3_from(&amp, s, scenario)
                .map(|c| prefactor * c.norm_sqr())
                .map_err(|e| with_index(e, j))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Spectrum::new(*grid, values, Channel::S3))
}

pub fn spectrum(grid: &SpectrumGrid, scenario: &Scenario, channel: Channel) -> Result<Spectrum> {
    match channel {
        Channel::S2 => spectrum_s2(grid, scenario),
        Channel::S3 => spectrum_s3(grid, scenario),
    }
}

fn with_index(e: Error, j: usize) -> Error {
    match e {
        Error::SingularEvaluation { s, .. } => Error::SingularEvaluation { s, index: Some(j) },
        other => other,
    }
}

/// Long-time ground-state populations (|C₁(∞)|², |C₄(∞)|²).
///
/// Integrating Ċ₁ and the rotating-frame Ċ₄ from zero to infinity gives
/// C₁(∞) = a₁ + iΩ₁₂*C̃₂(0)/2 and, up to a phase that rotates at δ₁ − δ₂,
/// C₄(∞) = a₄ + iΩ₂₄*C̃₂(i(δ₁−δ₂))/2.
pub fn trapped_population(scenario: &Scenario) -> Result<(f64, f64)> {
    let d = scenario.drive();
    let a = scenario.init();
    let amp = ClearedAmplitude::new(scenario);
    let c1 = if d.omega12 == C64::new(0.0, 0.0) {
        a.a1
    } else {
        a.a1 + I * d.omega12.conj() / 2.0 * amp.eval(C64::new(0.0, 0.0))?
    };
    let c4 = if d.omega24 == C64::new(0.0, 0.0) {
        a.a4
    } else {
        a.a4 + I * d.omega24.conj() / 2.0 * amp.eval(C64::new(0.0, d.delta1 - d.delta2))?
    };
    Ok((c1.norm_sqr(), c4.norm_sqr()))
}

/// Total emitted probability ∫S dδ over the whole line.
///
/// The sampled part is integrated with the trapezoid rule. Beyond the grid
/// the spectrum falls off as γ|a|²/(2π(δ − δ_c)²), where a is the initial
/// amplitude of the emitting level and δ_c the line centre, and that tail is
/// added in closed form. Tails of lines fed only through the drives fall off
/// as δ⁻⁴ and are negligible on any grid wider than a few linewidths.
pub fn emitted_probability(spectrum: &Spectrum, scenario: &Scenario) -> f64 {
    let d = scenario.drive();
    let (rate, amplitude, centre) = match spectrum.channel {
        Channel::S2 => (scenario.decay().gamma2, scenario.init().a2, d.delta1),
        Channel::S3 => (
            scenario.decay().gamma3,
            scenario.init().a3,
            d.delta1 + d.delta3,
        ),
    };
    let lo = spectrum.grid.delta_min() - centre;
    let hi = spectrum.grid.delta_max() - centre;
    let tail = if lo < 0.0 && hi > 0.0 {
        rate * amplitude.norm_sqr() / (2.0 * PI) * (1.0 / hi - 1.0 / lo)
    } else {
        0.0
    };
    spectrum.integral() + tail
}
