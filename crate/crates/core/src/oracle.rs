//! Time-domain reference: integrate the amplitude equations and Fourier
//! transform the result.
//!
//! In the frame rotating with the lasers the four bound amplitudes obey the
//! linear system Ċ = M C with
//!
//! ```text
//! Ċ₁ = iΩ₁₂*/2 C₂
//! Ċ₂ = (iδ₁ − γ₂/2) C₂ + iΩ₁₂/2 C₁ + iΩ₂₃*/2 C₃ + iΩ₂₄/2 C₄
//! Ċ₃ = (i(δ₁+δ₃) − γ₃/2) C₃ + iΩ₂₃/2 C₂
//! Ċ₄ = i(δ₁−δ₂) C₄ + iΩ₂₄*/2 C₂
//! ```
//!
//! and the photon amplitude emitted from |2⟩ at detuning δ_k tends to
//! ∫₀^∞ e^{i(δ_k−δ₁)t} C₂(t) dt. Nothing here shares code with the
//! Laplace-domain route beyond the parameter types.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Channel, Scenario, Spectrum, SpectrumGrid, C64};

/// Amplitudes below this at the end of the run count as decayed.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Stability limit on dt times the largest rate in the generator.
pub const STEP_LIMIT: f64 = 0.1;
/// Allowed growth of the total norm between stored samples.
pub const NORM_GROWTH_TOL: f64 = 1e-9;
/// Floor under the denominator of relative deviations.
pub const RELATIVE_FLOOR: f64 = 1e-10;

/// Horizon in units of the slowest decay time.
const HORIZON_DECAYS: f64 = 40.0;
/// Longest horizon ever chosen automatically.
const MAX_T_END: f64 = 1e4;
/// Target spacing of stored samples.
const SAMPLE_SPACING: f64 = 0.02;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

type State = [C64; 4];

/// The 4x4 generator M, row i holding the coefficients of Ċᵢ.
pub fn generator(scenario: &Scenario) -> [[C64; 4]; 4] {
    let d = scenario.drive();
    let g = scenario.decay();
    let half = |w: C64| I * w / 2.0;
    [
        [ZERO, half(d.omega12.conj()), ZERO, ZERO],
        [
            half(d.omega12),
            C64::new(-g.gamma2 / 2.0, d.delta1),
            half(d.omega23.conj()),
            half(d.omega24),
        ],
        [
            ZERO,
            half(d.omega23),
            C64::new(-g.gamma3 / 2.0, d.delta1 + d.delta3),
            ZERO,
        ],
        [ZERO, half(d.omega24.conj()), ZERO, C64::new(0.0, d.delta1 - d.delta2)],
    ]
}

fn apply(m: &[[C64; 4]; 4], c: &State) -> State {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(c).map(|(a, b)| a * b).sum();
    }
    out
}

fn matmul(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Largest |δ|, |Ω| or γ appearing in the scenario.
fn max_rate(scenario: &Scenario) -> f64 {
    let d = scenario.drive();
    let g = scenario.decay();
    [
        g.gamma2,
        g.gamma3,
        d.omega12.norm(),
        d.omega24.norm(),
        d.omega23.norm(),
        d.delta1.abs(),
        d.delta2.abs(),
        d.delta3.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Fixed-step integration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub t_end: f64,
    pub dt: f64,
    /// Keep every `stride`-th step.
    pub stride: usize,
}

impl IntegrationSettings {
    /// Stores every step.
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, stride: 1 }
    }

    /// dt = 0.01 over the fastest rate, and a horizon of 40 decay times of
    /// the slowest decaying eigenmode of M.
    pub fn for_scenario(scenario: &Scenario) -> Self {
        let dt = 0.01 / max_rate(scenario);
        let t_end = (HORIZON_DECAYS / slowest_decay_rate(scenario)).min(MAX_T_END);
        let stride = ((SAMPLE_SPACING / dt).round() as usize).max(1);
        Self { t_end, dt, stride }
    }
}

/// Smallest −Re λ over the eigenvalues λ of M, ignoring modes that do not
/// decay at all (dark superpositions).
pub fn slowest_decay_rate(scenario: &Scenario) -> f64 {
    let fastest = max_rate(scenario);
    let m = generator(scenario);
    let matrix = Matrix4::from_fn(|i, j| m[i][j]);
    matrix
        .eigenvalues()
        .map(|ev| {
            ev.iter()
                .map(|l| -l.re)
                .filter(|&r| r > 1e-9 * fastest)
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|r| r.is_finite())
        .unwrap_or(scenario.decay().gamma2 / 2.0)
}

/// Stored samples C(t_k), t_k = k·h.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    /// [C₁, C₂, C₃, C₄] at each stored time.
    pub amplitudes: Vec<[C64; 4]>,
    generator: [[C64; 4]; 4],
    gamma2: f64,
    gamma3: f64,
}

impl AmplitudeTrajectory {
    /// Spacing of stored samples.
    pub fn spacing(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn final_state(&self) -> [C64; 4] {
        *self.amplitudes.last().expect("trajectory has at least one sample")
    }

    pub fn norms(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// The total norm never grows by more than [`NORM_GROWTH_TOL`] between
    /// samples.
    pub fn norm_is_monotone(&self) -> bool {
        self.norms()
            .windows(2)
            .all(|w| w[1] <= w[0] + NORM_GROWTH_TOL)
    }

    /// |C|² plus the probability already radiated, γ₂∫|C₂|² + γ₃∫|C₃|², at
    /// every stored time. Should equal one throughout.
    pub fn probability_ledger(&self) -> Vec<f64> {
        let h = self.spacing();
        let rate = |c: &State| self.gamma2 * c[1].norm_sqr() + self.gamma3 * c[2].norm_sqr();
        let rate_slope = |c: &State| {
            let dc = apply(&self.generator, c);
            2.0 * (self.gamma2 * (c[1].conj() * dc[1]).re + self.gamma3 * (c[2].conj() * dc[2]).re)
        };
        let start_slope = rate_slope(&self.amplitudes[0]);
        let mut radiated = 0.0;
        let mut out = Vec::with_capacity(self.amplitudes.len());
        for (k, c) in self.amplitudes.iter().enumerate() {
            if k > 0 {
                radiated += h / 2.0 * (rate(&self.amplitudes[k - 1]) + rate(c));
            }
            let corrected = radiated - h * h / 12.0 * (rate_slope(c) - start_slope);
            out.push(c.iter().map(|a| a.norm_sqr()).sum::<f64>() + corrected);
        }
        out
    }

    fn check_converged(&self, channel: Channel) -> Result<()> {
        let last = self.final_state();
        let residual = match channel {
            Channel::S2 => last[1].norm(),
            Channel::S3 if self.gamma3 > 0.0 => last[2].norm(),
            Channel::S3 => 0.0,
        };
        if residual < CONVERGENCE_TOL {
            Ok(())
        } else {
            Err(Error::NotConverged { channel, residual })
        }
    }

    /// True when both excited amplitudes have decayed.
    pub fn is_converged(&self) -> bool {
        self.check_converged(Channel::S2).is_ok() && self.check_converged(Channel::S3).is_ok()
    }
}

/// Classical fourth-order Runge–Kutta with a fixed step. For a linear
/// system the four stages collapse to the propagator
/// 1 + hM + (hM)²/2 + (hM)³/6 + (hM)⁴/24, which is applied directly.
pub fn integrate_amplitudes(
    scenario: &Scenario,
    settings: &IntegrationSettings,
) -> Result<AmplitudeTrajectory> {
    let IntegrationSettings { t_end, dt, stride } = *settings;
    if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite()) || stride == 0 {
        return Err(Error::InvalidSettings(format!(
            "t_end = {t_end}, dt = {dt}, stride = {stride}"
        )));
    }
    let product = dt * max_rate(scenario);
    if product >= STEP_LIMIT {
        return Err(Error::StepTooLarge {
            dt,
            product,
            limit: STEP_LIMIT,
        });
    }
    let m = generator(scenario);
    let mut hm = m;
    for row in hm.iter_mut() {
        for v in row.iter_mut() {
            *v *= dt;
        }
    }
    let mut propagator = [[ZERO; 4]; 4];
    let mut term = [[ZERO; 4]; 4];
    for i in 0..4 {
        term[i][i] = C64::new(1.0, 0.0);
    }
    for k in 0..=4 {
        if k > 0 {
            term = matmul(&term, &hm);
            for row in term.iter_mut() {
                for v in row.iter_mut() {
                    *v /= k as f64;
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                propagator[i][j] += term[i][j];
            }
        }
    }

    let samples = ((t_end / (dt * stride as f64)).ceil() as usize).max(1);
    let h = dt * stride as f64;
    let mut times = Vec::with_capacity(samples + 1);
    let mut amplitudes = Vec::with_capacity(samples + 1);
    let mut c = scenario.init().as_array();
    times.push(0.0);
    amplitudes.push(c);
    for k in 1..=samples {
        for _ in 0..stride {
            c = apply(&propagator, &c);
        }
        times.push(k as f64 * h);
        amplitudes.push(c);
    }
    Ok(AmplitudeTrajectory {
        times,
        amplitudes,
        generator: m,
        gamma2: scenario.decay().gamma2,
        gamma3: scenario.decay().gamma3,
    })
}

/// Integrates with [`IntegrationSettings::for_scenario`].
pub fn integrate_default(scenario: &Scenario) -> Result<AmplitudeTrajectory> {
    integrate_amplitudes(scenario, &IntegrationSettings::for_scenario(scenario))
}

/// Spectrum as (γ/2π)|∫₀^T e^{iωt} C(t) dt|².
///
/// The integral uses the trapezoid rule on the stored samples with the
/// h² and h⁴ Euler–Maclaurin end corrections; the derivatives of the
/// integrand at both ends come from the generator, so the rule stays sixth
/// order even for fast phases ωh.
pub fn spectrum_from_trajectory(
    traj: &AmplitudeTrajectory,
    scenario: &Scenario,
    grid: &SpectrumGrid,
    channel: Channel,
) -> Result<Spectrum> {
    let d = scenario.drive();
    let g = scenario.decay();
    let (index, rate, centre) = match channel {
        Channel::S2 => (1, g.gamma2, d.delta1),
        Channel::S3 => (2, g.gamma3, d.delta1 + d.delta3),
    };
    if rate == 0.0 {
        return Ok(Spectrum::new(*grid, vec![0.0; grid.len()], channel));
    }
    traj.check_converged(channel)?;

    let h = traj.spacing();
    let n = traj.amplitudes.len() - 1;
    let t_end = traj.times[n];
    let series: Vec<C64> = traj.amplitudes.iter().map(|c| c[index]).collect();
    let derivatives = |c: &State| {
        let d1 = apply(&traj.generator, c);
        let d2 = apply(&traj.generator, &d1);
        let d3 = apply(&traj.generator, &d2);
        [c[index], d1[index], d2[index], d3[index]]
    };
    let start = derivatives(&traj.amplitudes[0]);
    let end = derivatives(&traj.amplitudes[n]);
    let prefactor = rate / (2.0 * PI);

    let values = grid
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&delta| {
            let w = delta - centre;
            let iw = I * w;
            // f', f''' of f(t) = e^{iwt} c(t), without the phase
            let slopes = |c: [C64; 4]| {
                (
                    iw * c[0] + c[1],
                    iw * iw * iw * c[0] + 3.0 * iw * iw * c[1] + 3.0 * iw * c[2] + c[3],
                )
            };
            let (f1_start, f3_start) = slopes(start);
            let (f1_end, f3_end) = slopes(end);
            let phase_end = C64::from_polar(1.0, w * t_end);

            let rot = C64::from_polar(1.0, w * h);
            let mut phase = C64::new(1.0, 0.0);
            let mut sum = series[0] / 2.0;
            for (k, c) in series.iter().enumerate().skip(1) {
                phase = if k % 1024 == 0 {
                    C64::from_polar(1.0, w * traj.times[k])
                } else {
                    phase * rot
                };
                sum += if k == n { phase * c / 2.0 } else { phase * c };
            }
            let integral = h * sum - h * h / 12.0 * (phase_end * f1_end - f1_start)
                + h.powi(4) / 720.0 * (phase_end * f3_end - f3_start);
            prefactor * integral.norm_sqr()
        })
        .collect();
    Ok(Spectrum::new(*grid, values, channel))
}

/// Integrates and transforms in one go.
pub fn oracle_spectrum(scenario: &Scenario, grid: &SpectrumGrid, channel: Channel) -> Result<Spectrum> {
    let traj = integrate_default(scenario)?;
    spectrum_from_trajectory(&traj, scenario, grid, channel)
}

/// Final ground-state populations (|C₁(T)|², |C₄(T)|²).
pub fn trapped_population(traj: &AmplitudeTrajectory) -> Result<(f64, f64)> {
    traj.check_converged(Channel::S2)?;
    let c = traj.final_state();
    Ok((c[0].norm_sqr(), c[3].norm_sqr()))
}

/// max_j |a_j − b_j| / max(|a_j|, |b_j|, [`RELATIVE_FLOOR`]).
pub fn max_relative_deviation(a: &Spectrum, b: &Spectrum) -> f64 {
    assert_eq!(a.values.len(), b.values.len(), "spectra on different grids");
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(RELATIVE_FLOOR))
        .fold(0.0, f64::max)
}
