//! Named parameter sets for the standard spectra.
//!
//! All presets are resonant with γ₂ = 1 and real Rabi frequencies.

use crate::model::{DecayRates, DriveParameters, InitialAmplitudes, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    /// Source figure label shown by `list-presets`.
    pub panel: &'static str,
    pub description: &'static str,
    pub omega12: f64,
    pub omega24: f64,
    pub omega23: f64,
    pub gamma3: f64,
    /// Real initial amplitudes a₁..a₄.
    pub init: [f64; 4],
}

impl Preset {
    pub fn scenario(&self) -> Scenario {
        let [a1, a2, a3, a4] = self.init;
        Scenario::new(
            DriveParameters::resonant(self.omega12, self.omega24, self.omega23),
            DecayRates::new(1.0, self.gamma3),
            InitialAmplitudes::real(a1, a2, a3, a4),
        )
        .expect("presets are valid")
    }
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;
// sqrt(0.8), sqrt(0.2)
const SQRT_08: f64 = 0.894_427_190_999_915_9;
const SQRT_02: f64 = 0.447_213_595_499_957_94;

const fn ground(name: &'static str, panel: &'static str, description: &'static str, o24: f64, o23: f64, g3: f64) -> Preset {
    Preset {
        name,
        panel,
        description,
        omega12: 0.5,
        omega24: o24,
        omega23: o23,
        gamma3: g3,
        init: [1.0, 0.0, 0.0, 0.0],
    }
}

const fn weak(name: &'static str, panel: &'static str, description: &'static str, init: [f64; 4]) -> Preset {
    Preset {
        name,
        panel,
        description,
        omega12: 0.5,
        omega24: 0.5,
        omega23: 0.5,
        gamma3: 1.0,
        init,
    }
}

pub const PRESETS: &[Preset] = &[
    weak("fig2a", "2(a)", "Ω₁₂=Ω₂₄=Ω₂₃=0.5γ, a₂(0)=1", [0.0, 1.0, 0.0, 0.0]),
    weak("fig2b", "2(b)", "Ω₁₂=Ω₂₄=Ω₂₃=0.5γ, a₃(0)=1", [0.0, 0.0, 1.0, 0.0]),
    weak(
        "fig2c",
        "2(c)",
        "Ω₁₂=Ω₂₄=Ω₂₃=0.5γ, a₂(0)=√0.8, a₃(0)=√0.2",
        [0.0, SQRT_08, SQRT_02, 0.0],
    ),
    weak(
        "fig2d",
        "2(d)",
        "Ω₁₂=Ω₂₄=Ω₂₃=0.5γ, a₁(0)=−a₄(0)=√0.5 (dark state)",
        [SQRT_HALF, 0.0, 0.0, -SQRT_HALF],
    ),
    ground("fig3a", "3(a)", "Ω₁₂=0.5γ, Ω₂₄=Ω₂₃=0.5γ, a₁(0)=1", 0.5, 0.5, 1.0),
    ground("fig3b", "3(b)", "Ω₁₂=0.5γ, Ω₂₄=Ω₂₃=1.0γ, a₁(0)=1", 1.0, 1.0, 1.0),
    ground("fig3c", "3(c)", "Ω₁₂=0.5γ, Ω₂₄=2.0γ, Ω₂₃=1.0γ, a₁(0)=1", 2.0, 1.0, 1.0),
    ground("fig3d", "3(d)", "Ω₁₂=0.5γ, Ω₂₄=2.0γ, Ω₂₃=2.0γ, a₁(0)=1", 2.0, 2.0, 1.0),
    ground("fig3e", "3(e)", "Ω₁₂=0.5γ, Ω₂₄=2.0γ, Ω₂₃=4.0γ, a₁(0)=1", 2.0, 4.0, 1.0),
    ground("fig3f", "3(f)", "Ω₁₂=0.5γ, Ω₂₄=3.0γ, Ω₂₃=4.0γ, a₁(0)=1", 3.0, 4.0, 1.0),
    ground("fig4", "4", "Ω₁₂=0.5γ, Ω₂₃=4.0γ, Ω₂₄=3.0γ, a₁(0)=1", 3.0, 4.0, 1.0),
    ground(
        "fig4-lambda",
        "4 (dashed)",
        "Ω₁₂=0.5γ, Ω₂₃=0, Ω₂₄=3.0γ, a₁(0)=1 (Λ scheme)",
        3.0,
        0.0,
        1.0,
    ),
    ground("fig5a", "5(a)", "Ω₁₂=0.5γ, Ω₂₄=2.0γ, Ω₂₃=4.0γ, γ₃=0.5γ, a₁(0)=1", 2.0, 4.0, 0.5),
    ground("fig5b", "5(b)", "Ω₁₂=0.5γ, Ω₂₄=2.0γ, Ω₂₃=4.0γ, γ₃=0.1γ, a₁(0)=1", 2.0, 4.0, 0.1),
    ground(
        "fig5b-gamma3-zero",
        "5(b) (dashed)",
        "Ω₁₂=0.5γ, Ω₂₄=2.0γ, Ω₂₃=4.0γ, γ₃=0, a₁(0)=1",
        2.0,
        4.0,
        0.0,
    ),
    Preset {
        name: "bare-decay",
        panel: "-",
        description: "Ω=0, a₂(0)=1 (natural line)",
        omega12: 0.0,
        omega24: 0.0,
        omega23: 0.0,
        gamma3: 1.0,
        init: [0.0, 1.0, 0.0, 0.0],
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for p in PRESETS {
            let s = p.scenario();
            assert!((s.init().norm_sqr() - 1.0).abs() < 1e-15, "{}", p.name);
        }
    }

    #[test]
    fn constants_are_roots() {
        assert_eq!(SQRT_08, 0.8f64.sqrt());
        assert_eq!(SQRT_02, 0.2f64.sqrt());
    }

    #[test]
    fn names_are_unique() {
        let mut n: Vec<_> = names().collect();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), PRESETS.len());
        assert!(find("fig3e").is_some());
        assert!(find("fig9").is_none());
    }
}
