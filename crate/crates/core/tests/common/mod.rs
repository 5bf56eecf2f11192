#![allow(dead_code)]

use invy::oracle;
use invy::{DecayRates, DriveParameters, InitialAmplitudes, Scenario, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn phase(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
}

/// Complex Rabi frequency with magnitude in `range` and a random phase.
pub fn rabi(rng: &mut ChaCha8Rng, range: std::ops::Range<f64>) -> C64 {
    C64::from_polar(rng.random_range(range), phase(rng))
}

/// Resonant drive with |Ω| up to 5γ and γ₃ in [0, 2].
pub fn resonant_drive(rng: &mut ChaCha8Rng) -> (DriveParameters, DecayRates) {
    let drive = DriveParameters {
        omega12: rabi(rng, 0.0..5.0),
        omega24: rabi(rng, 0.0..5.0),
        omega23: rabi(rng, 0.0..5.0),
        delta1: 0.0,
        delta2: 0.0,
        delta3: 0.0,
    };
    (drive, DecayRates::new(1.0, rng.random_range(0.0..2.0)))
}

pub fn random_state(rng: &mut ChaCha8Rng) -> InitialAmplitudes {
    let a: [C64; 4] = std::array::from_fn(|_| C64::from_polar(rng.random_range(0.05..1.0), phase(rng)));
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    InitialAmplitudes::from_array(a.map(|z| z / norm))
}

/// Slowest decay rate accepted in [`general_scenario`]. Near two-photon
/// resonance a quasi-dark ground superposition can leak out arbitrarily
/// slowly; those draws are redrawn so the time-domain run stays bounded.
pub const MIN_DECAY_RATE: f64 = 0.02;

/// Detuned drive with complex Rabi frequencies and a random superposition
/// start, with every non-dark mode decaying at least at [`MIN_DECAY_RATE`].
pub fn general_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    loop {
        let s = draw_general(rng);
        if oracle::slowest_decay_rate(&s) >= MIN_DECAY_RATE {
            return s;
        }
    }
}

fn draw_general(rng: &mut ChaCha8Rng) -> Scenario {
    let drive = DriveParameters {
        omega12: rabi(rng, 0.3..3.0),
        omega24: rabi(rng, 0.3..3.0),
        omega23: rabi(rng, 0.3..3.0),
        delta1: rng.random_range(-2.0..2.0),
        delta2: rng.random_range(-2.0..2.0),
        delta3: rng.random_range(-2.0..2.0),
    };
    let decay = DecayRates::new(1.0, rng.random_range(0.2..1.5));
    Scenario::new(drive, decay, random_state(rng)).unwrap()
}
