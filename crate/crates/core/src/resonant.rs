//! Resonant driving (δ₁ = δ₂ = δ₃ = 0).
//!
//! On resonance the cleared denominator of C̃₂ collapses to the real cubic
//!
//! ```text
//! P(s) = s³ + s²(γ₂+γ₃)/2 + s(|Ω₁₂|²+|Ω₂₄|²+|Ω₂₃|²+γ₂γ₃)/4 + (γ₃/2)(|Ω₁₂|²+|Ω₂₄|²)/4
//! ```
//!
//! and S₂ becomes a quadratic numerator over ∏ⱼ(−iδ_k − Λⱼ), with Λⱼ the
//! roots of P. Real parts of the roots are the half-widths of the spectral
//! components and the imaginary part of the complex pair is the sideband
//! offset.

use std::f64::consts::PI;

use crate::cubic::{self, CardanoRoots, CubeRootBranch, MonicCubic};
use crate::error::{Error, Result};
use crate::model::{
    Channel, DecayRates, DriveParameters, InitialAmplitudes, Scenario, Spectrum, SpectrumGrid,
    C64,
};

/// Largest |δᵢ| treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-12;
/// Roots closer than this (times (γ₂+γ₃)/2) count as coincident.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// |Ω₁₂a₁ + Ω₂₄a₄| below this is a dark superposition.
pub const DARK_TOL: f64 = 1e-12;
/// Cardano and the working solver must agree to this (times (γ₂+γ₃)/2).
pub const CARDANO_TOL: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn require_resonant(drive: &DriveParameters) -> Result<()> {
    if drive.is_resonant(RESONANCE_TOL) {
        Ok(())
    } else {
        Err(Error::NotResonant {
            max_detuning: drive.max_detuning(),
        })
    }
}

/// Non-leading coefficients of P(s).
pub fn cubic_coefficients(drive: &DriveParameters, decay: &DecayRates) -> Result<MonicCubic> {
    require_resonant(drive)?;
    let ground = drive.omega12.norm_sqr() + drive.omega24.norm_sqr();
    let c2 = (decay.gamma2 + decay.gamma3) / 2.0;
    let c1 = (ground + drive.omega23.norm_sqr() + decay.gamma2 * decay.gamma3) / 4.0;
    let c0 = decay.gamma3 / 2.0 * (ground / 4.0);
    Ok(MonicCubic::new(c2, c1, c0))
}

/// Roots Λⱼ and, when they are distinct, the partial-fraction weights βⱼ of
/// 1/∏ⱼ(δ_k + iΛⱼ) = Σⱼ βⱼ/(δ_k + iΛⱼ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicDecomposition {
    /// Real (or most nearly real) root first, then the root with positive
    /// imaginary part, then its conjugate.
    pub roots: [C64; 3],
    pub weights: Option<[C64; 3]>,
    pub degenerate: bool,
}

impl CubicDecomposition {
    pub fn min_separation(&self) -> f64 {
        min_separation(&self.roots)
    }

    pub fn has_zero_root(&self) -> bool {
        self.roots.iter().any(|r| *r == C64::new(0.0, 0.0))
    }
}

fn min_separation(roots: &[C64; 3]) -> f64 {
    let r = roots;
    (r[0] - r[1])
        .norm()
        .min((r[1] - r[2]).norm())
        .min((r[0] - r[2]).norm())
}

/// Roots of P(s), ordered; weights are left empty.
pub fn cubic_roots(coefficients: MonicCubic) -> CubicDecomposition {
    let roots = cubic::solve_monic_cubic(coefficients);
    let scale = coefficients.c2.abs().max(f64::MIN_POSITIVE);
    CubicDecomposition {
        roots,
        weights: None,
        degenerate: min_separation(&roots) <= DEGENERACY_TOL * scale,
    }
}

/// βᵢ = 1/∏_{j≠i}(iΛⱼ − iΛᵢ), the residues of 1/∏ⱼ(x + iΛⱼ).
pub fn partial_fractions(roots: &[C64; 3]) -> Result<[C64; 3]> {
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let separation = min_separation(roots);
    if separation <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateRoots { separation });
    }
    let mut beta = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        let mut denom = C64::new(1.0, 0.0);
        for j in (0..3).filter(|&j| j != i) {
            denom *= I * roots[j] - I * roots[i];
        }
        beta[i] = denom.inv();
    }
    Ok(beta)
}

/// The cyclic Vandermonde form (Λ_{i+1} − Λ_{i+2}) / V with
/// V = Λ₁²(Λ₂−Λ₃) + Λ₂²(Λ₃−Λ₁) + Λ₃²(Λ₁−Λ₂).
///
/// These are the residues of 1/∏ⱼ(x − Λⱼ) and equal −βᵢ from
/// [`partial_fractions`]; the sign is invisible in |Σ|².
pub fn vandermonde_weights(roots: &[C64; 3]) -> [C64; 3] {
    let [l1, l2, l3] = *roots;
    let v = l1 * l1 * (l2 - l3) + l2 * l2 * (l3 - l1) + l3 * l3 * (l1 - l2);
    [(l2 - l3) / v, (l3 - l1) / v, (l1 - l2) / v]
}

/// Roots and weights for a resonant drive. Degenerate roots leave
/// `weights` empty rather than failing.
pub fn decompose(drive: &DriveParameters, decay: &DecayRates) -> Result<CubicDecomposition> {
    let mut dec = cubic_roots(cubic_coefficients(drive, decay)?);
    if !dec.degenerate {
        dec.weights = partial_fractions(&dec.roots).ok();
        dec.degenerate = dec.weights.is_none();
    }
    Ok(dec)
}

/// The depressed-cubic quantities p and q written directly in terms of the
/// physical parameters, and the roots they give through Cardano's formulas.
pub fn cardano_roots(drive: &DriveParameters, decay: &DecayRates) -> Result<CardanoRoots> {
    require_resonant(drive)?;
    let (g2, g3) = (decay.gamma2, decay.gamma3);
    let ground = drive.omega12.norm_sqr() + drive.omega24.norm_sqr();
    let linear = (ground + drive.omega23.norm_sqr() + g2 * g3) / 4.0;
    let shift = (g2 + g3) / 6.0;
    let p = linear - (g2 + g3).powi(2) / 12.0;
    let q = -shift * linear + g3 / 2.0 * (ground / 4.0) + 2.0 * shift.powi(3);
    Ok(cubic::cardano(p, q, shift))
}

/// Outcome of comparing [`cardano_roots`] against [`cubic_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardanoCheck {
    pub cardano: CardanoRoots,
    /// Largest distance from a Cardano root to the nearest solver root.
    pub deviation: f64,
    /// Both radicands real, so no cube-root branch had to be chosen.
    pub unambiguous: bool,
    pub agrees: bool,
}

pub fn cardano_cross_check(drive: &DriveParameters, decay: &DecayRates) -> Result<CardanoCheck> {
    let coefficients = cubic_coefficients(drive, decay)?;
    let robust = cubic_roots(coefficients).roots;
    let cardano = cardano_roots(drive, decay)?;
    let deviation = cubic::root_set_distance(&cardano.roots, &robust)
        .max(cubic::root_set_distance(&robust, &cardano.roots));
    let scale = coefficients.c2.max(f64::MIN_POSITIVE);
    Ok(CardanoCheck {
        cardano,
        deviation,
        unambiguous: cardano.branch == CubeRootBranch::RealRadicands,
        agrees: deviation <= CARDANO_TOL * scale,
    })
}

/// Coefficients of the resonant S₂ numerator in powers of x = δ_k:
/// (u − a₂x)(x + iγ₃/2) + v·x with u = (Ω₁₂a₁ + Ω₂₄a₄)/2 and v = Ω₂₃*a₃/2.
fn numerator_coefficients(
    drive: &DriveParameters,
    decay: &DecayRates,
    init: &InitialAmplitudes,
) -> [C64; 3] {
    let u = (drive.omega12 * init.a1 + drive.omega24 * init.a4) / 2.0;
    let v = drive.omega23.conj() * init.a3 / 2.0;
    let half = I * (decay.gamma3 / 2.0);
    [u * half, u - init.a2 * half + v, -init.a2]
}

/// Evaluates the resonant S₂ ratio at every grid point. When P(s) has an
/// exact root at s = 0 (γ₃ = 0, or Ω₁₂ = Ω₂₄ = 0) the numerator vanishes at
/// δ_k = 0 too, and the common factor is cancelled before evaluation.
struct ResonantRatio {
    numerator: [C64; 3],
    roots: Vec<C64>,
    cancelled: bool,
    prefactor: f64,
}

impl ResonantRatio {
    fn new(scenario: &Scenario, dec: &CubicDecomposition) -> Self {
        let numerator = numerator_coefficients(scenario.drive(), scenario.decay(), scenario.init());
        let zero = dec.roots.iter().position(|r| *r == C64::new(0.0, 0.0));
        let (roots, cancelled) = match zero {
            Some(k) if numerator[0] == C64::new(0.0, 0.0) => (
                dec.roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, r)| *r)
                    .collect(),
                true,
            ),
            _ => (dec.roots.to_vec(), false),
        };
        Self {
            numerator,
            roots,
            cancelled,
            prefactor: scenario.decay().gamma2 / (2.0 * PI),
        }
    }

    fn numerator_at(&self, x: f64) -> C64 {
        let [n0, n1, n2] = self.numerator;
        if self.cancelled {
            n1 + n2 * x
        } else {
            n0 + (n1 + n2 * x) * x
        }
    }

    fn product_at(&self, x: f64) -> C64 {
        let s = C64::new(0.0, -x);
        let p: C64 = self.roots.iter().map(|r| s - r).product();
        if self.cancelled {
            // the removed factor (−ix − 0) contributes −i after dividing out x
            -I * p
        } else {
            p
        }
    }

    fn value(&self, x: f64) -> f64 {
        self.prefactor * (self.numerator_at(x) / self.product_at(x)).norm_sqr()
    }
}

/// S₂ on resonance as numerator over the product of root factors
/// ∏ⱼ(−iδ_k − Λⱼ) = P(−iδ_k). Never fails for a resonant scenario.
pub fn resonant_spectrum_s2(grid: &SpectrumGrid, scenario: &Scenario) -> Result<Spectrum> {
    let dec = decompose(scenario.drive(), scenario.decay())?;
    let ratio = ResonantRatio::new(scenario, &dec);
    let values = grid.points().map(|x| ratio.value(x)).collect();
    Ok(Spectrum::new(*grid, values, Channel::S2))
}

/// S₂ on resonance with the denominator written as the coherent sum of three
/// complex Lorentzian amplitudes Σⱼ βⱼ/(δ_k + iΛⱼ). Degenerate roots, or an
/// exact root at zero, fall back to the product form.
pub fn partial_fraction_spectrum_s2(grid: &SpectrumGrid, scenario: &Scenario) -> Result<Spectrum> {
    let dec = decompose(scenario.drive(), scenario.decay())?;
    let ratio = ResonantRatio::new(scenario, &dec);
    let values = match dec.weights {
        Some(beta) if !dec.has_zero_root() => grid
            .points()
            .map(|x| {
                let sum: C64 = beta
                    .iter()
                    .zip(dec.roots.iter())
                    .map(|(b, l)| b / (x + I * l))
                    .sum();
                ratio.prefactor * (ratio.numerator_at(x) * sum).norm_sqr()
            })
            .collect(),
        _ => grid.points().map(|x| ratio.value(x)).collect(),
    };
    Ok(Spectrum::new(*grid, values, Channel::S2))
}

/// Root structure of the resonant cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootRegime {
    /// One real root and a complex-conjugate pair: central line plus two
    /// symmetric sidebands.
    ConjugatePair,
    /// Three real roots: three overlapping lines at δ_k = 0, no sidebands.
    AllReal,
}

/// Positions and half-widths of the resonant spectral components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFeatures {
    /// Sideband offset |Im Λ₂|; zero when all roots are real.
    pub delta_lambda: f64,
    /// |Γ₁| = |Re Λ₁|, half-width of the central component.
    pub gamma_central: f64,
    /// |Γ₂| = |Re Λ₂|, half-width of each sideband.
    pub gamma_sideband: f64,
    pub regime: RootRegime,
    pub degenerate: bool,
    pub roots: [C64; 3],
}

impl SpectralFeatures {
    pub fn central_width(&self) -> f64 {
        2.0 * self.gamma_central
    }

    pub fn sideband_width(&self) -> f64 {
        2.0 * self.gamma_sideband
    }

    /// Half-widths |Re Λⱼ| of all three components.
    pub fn widths(&self) -> [f64; 3] {
        self.roots.map(|r| r.re.abs())
    }

    /// Sidebands count as resolved when δ_λ exceeds both half-widths.
    pub fn resolved(&self) -> bool {
        self.regime == RootRegime::ConjugatePair
            && self.delta_lambda > self.gamma_central.max(self.gamma_sideband)
    }
}

/// Line positions and widths from the roots of P(s). Three real roots are
/// reported with [`RootRegime::AllReal`], not as an error.
pub fn spectral_features(drive: &DriveParameters, decay: &DecayRates) -> Result<SpectralFeatures> {
    let dec = decompose(drive, decay)?;
    let roots = dec.roots;
    let regime = if roots[1].im > 0.0 {
        RootRegime::ConjugatePair
    } else {
        RootRegime::AllReal
    };
    let delta_lambda = match regime {
        RootRegime::ConjugatePair => roots[1].im.abs(),
        RootRegime::AllReal => 0.0,
    };
    Ok(SpectralFeatures {
        delta_lambda,
        gamma_central: roots[0].re.abs(),
        gamma_sideband: roots[1].re.abs(),
        regime,
        degenerate: dec.degenerate,
        roots,
    })
}

/// The three-Lorentzian form of S₂ for an atom starting in |1⟩:
///
/// ```text
///            γ₂/2π |Ω₁₂/2|² (δ² + γ₃²/4)
/// S₂ = ─────────────────────────────────────────────
///      [δ² + Γ₁²][(δ − δ_λ)² + Γ₂²][(δ + δ_λ)² + Γ₂²]
/// ```
pub fn three_lorentzian_s2(
    grid: &SpectrumGrid,
    drive: &DriveParameters,
    decay: &DecayRates,
) -> Result<Spectrum> {
    let f = spectral_features(drive, decay)?;
    if f.regime != RootRegime::ConjugatePair {
        return Err(Error::AllRealRoots);
    }
    let amp = (drive.omega12 / 2.0).norm_sqr() * decay.gamma2 / (2.0 * PI);
    let g3 = decay.gamma3 / 2.0;
    let (g1, g2, dl) = (f.gamma_central, f.gamma_sideband, f.delta_lambda);
    let values = grid
        .points()
        .map(|x| {
            amp * (x * x + g3 * g3)
                / ((x * x + g1 * g1)
                    * ((x - dl).powi(2) + g2 * g2)
                    * ((x + dl).powi(2) + g2 * g2))
        })
        .collect();
    Ok(Spectrum::new(*grid, values, Channel::S2))
}

/// True when the ground-state superposition is decoupled from |2⟩:
/// no excited-state population, Raman resonance δ₁ = δ₂ and
/// |Ω₁₂a₁ + Ω₂₄a₄| below [`DARK_TOL`].
pub fn dark_state_check(drive: &DriveParameters, init: &InitialAmplitudes) -> bool {
    let excited = init.a2.norm() > DARK_TOL || init.a3.norm() > DARK_TOL;
    let raman = (drive.delta1 - drive.delta2).abs() <= RESONANCE_TOL;
    !excited && raman && (drive.omega12 * init.a1 + drive.omega24 * init.a4).norm() < DARK_TOL
}

/// True when the atom starts with no ground-state population, in which case
/// the resonant S₂ has an exact zero at δ_k = 0.
pub fn dark_line_check(init: &InitialAmplitudes) -> bool {
    init.a1.norm() <= DARK_TOL && init.a4.norm() <= DARK_TOL
}
