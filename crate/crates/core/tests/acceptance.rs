//! Acceptance checks. Each criterion prints one PASS/FAIL line; the binary
//! exits non-zero if any fails.

mod common;

use std::fs;
use std::panic;
use std::process::Command;
use std::time::Instant;

use invy::cubic::MonicCubic;
use invy::oracle::{self, IntegrationSettings};
use invy::resonant::{self, RootRegime};
use invy::{laplace, peaks, presets, Channel, DecayRates, DriveParameters, InitialAmplitudes};
use invy::{Scenario, SpectrumGrid, C64};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn preset(name: &str) -> Scenario {
    presets::find(name).unwrap().scenario()
}

fn dark_line() -> Verdict {
    let grid = SpectrumGrid::new(-5.0, 5.0, 2001).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["fig2a", "fig2b", "fig2c"] {
        let s = laplace::spectrum_s2(&grid, &preset(name)).unwrap();
        let centre = s.values[1000];
        let maxima = peaks::local_maxima(&s.values).len();
        ok &= grid.point(1000) == 0.0 && centre < 1e-20 && maxima == 2;
        notes.push(format!("{name}: S2(0)={centre:.1e}, maxima={maxima}"));
    }
    verdict(ok, notes.join("; "))
}

fn dark_state() -> Verdict {
    let s = preset("fig2d");
    let sp = laplace::spectrum_s2(&SpectrumGrid::default(), &s).unwrap();
    let traj = oracle::integrate_default(&s).unwrap();
    let (p1, p4) = oracle::trapped_population(&traj).unwrap();
    let ok = sp.max_value() < 1e-20 && (p1 - 0.5).abs() <= 1e-6 && (p4 - 0.5).abs() <= 1e-6;
    verdict(
        ok,
        format!("max S2={:.1e}, trapped=({p1:.12}, {p4:.12})", sp.max_value()),
    )
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let grid = SpectrumGrid::default();
    let mut cases: Vec<(String, Scenario)> = presets::PRESETS
        .iter()
        .filter(|p| p.name.starts_with("fig"))
        .map(|p| (p.name.to_string(), p.scenario()))
        .collect();
    let mut rng = common::rng(3);
    for k in 0..50 {
        cases.push((format!("random-{k}"), common::general_scenario(&mut rng)));
    }
    let mut worst = (0.0, String::new());
    let mut failures = 0;
    for (name, s) in &cases {
        let traj = oracle::integrate_default(s).unwrap();
        for ch in [Channel::S2, Channel::S3] {
            let a = laplace::spectrum(&grid, s, ch).unwrap();
            let b = oracle::spectrum_from_trajectory(&traj, s, &grid, ch).unwrap();
            let dev = oracle::max_relative_deviation(&a, &b);
            if dev >= 1e-3 {
                failures += 1;
            }
            if dev > worst.0 {
                worst = (dev, format!("{name}/{ch}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        failures == 0 && secs < 60.0,
        format!(
            "{} scenarios x 2 channels, worst deviation {:.2e} ({}), {} above 1e-3, {:.1} s",
            cases.len(),
            worst.0,
            worst.1,
            failures,
            secs
        ),
    )
}

fn cubic_validity() -> Verdict {
    let mut rng = common::rng(4);
    let (mut worst_residual, mut worst_vieta) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (d, g) = common::resonant_drive(&mut rng);
        let c: MonicCubic = resonant::cubic_coefficients(&d, &g).unwrap();
        let roots = resonant::cubic_roots(c).roots;
        for r in roots {
            worst_residual = worst_residual.max(c.eval(r).norm());
        }
        let sum: C64 = roots.iter().sum();
        worst_vieta = worst_vieta.max((sum.re + (g.gamma2 + g.gamma3) / 2.0).abs().max(sum.im.abs()));
    }
    verdict(
        worst_residual < 1e-10 && worst_vieta < 1e-10,
        format!("max |P(root)|={worst_residual:.1e}, max Vieta error={worst_vieta:.1e}"),
    )
}

fn partial_fraction_identities() -> Verdict {
    let mut rng = common::rng(5);
    let i = C64::new(0.0, 1.0);
    let (mut worst_moment, mut worst_recon) = (0.0f64, 0.0f64);
    let mut checked = 0;
    for _ in 0..1000 {
        let (d, g) = common::resonant_drive(&mut rng);
        let dec = resonant::decompose(&d, &g).unwrap();
        let Some(beta) = dec.weights else { continue };
        checked += 1;
        let m0: C64 = beta.iter().sum();
        let m1: C64 = beta.iter().zip(&dec.roots).map(|(b, l)| b * i * l).sum();
        let m2: C64 = beta.iter().zip(&dec.roots).map(|(b, l)| b * (i * l) * (i * l)).sum();
        worst_moment = worst_moment.max(m0.norm()).max(m1.norm()).max((m2 - 1.0).norm());
    }
    // reconstruction on one fixed decomposition at 100 random detunings
    let f = resonant::decompose(
        &DriveParameters::resonant(0.5, 2.0, 4.0),
        &DecayRates::equal(),
    )
    .unwrap();
    let beta = f.weights.unwrap();
    for _ in 0..100 {
        let x: f64 = rng.random_range(-20.0..20.0);
        let direct = f.roots.iter().map(|l| x + i * l).product::<C64>().inv();
        let sum: C64 = beta.iter().zip(&f.roots).map(|(b, l)| b / (x + i * l)).sum();
        worst_recon = worst_recon.max((sum - direct).norm() / direct.norm());
    }
    let bare = preset("bare-decay");
    let degenerate = resonant::decompose(bare.drive(), bare.decay()).unwrap();
    let fallback = resonant::partial_fraction_spectrum_s2(&SpectrumGrid::default(), &bare);
    let fallback_ok = degenerate.degenerate
        && degenerate.weights.is_none()
        && fallback.as_ref().map(|s| s.values.iter().all(|v| v.is_finite())).unwrap_or(false);
    verdict(
        worst_moment < 1e-10 && worst_recon < 1e-10 && fallback_ok,
        format!(
            "{checked} decompositions, max moment error={worst_moment:.1e}, \
             max reconstruction error={worst_recon:.1e}, degenerate fallback ok={fallback_ok}"
        ),
    )
}

fn sideband_geometry() -> Verdict {
    let grid = SpectrumGrid::default();
    let step = grid.step();
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["fig3c", "fig3d", "fig3e", "fig3f"] {
        let s = preset(name);
        let f = resonant::spectral_features(s.drive(), s.decay()).unwrap();
        let sp = laplace::spectrum_s2(&grid, &s).unwrap();
        let found = peaks::peak_positions(&sp);
        let mut offsets = Vec::new();
        for target in [-f.delta_lambda, f.delta_lambda] {
            let nearest = found
                .iter()
                .copied()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
            let off = nearest.map(|x| (x - target).abs()).unwrap_or(f64::INFINITY);
            ok &= off <= step;
            offsets.push(off / step);
        }
        notes.push(format!(
            "{name}: delta_lambda={:.4}, peak offsets {:.1}/{:.1} steps",
            f.delta_lambda, offsets[0], offsets[1]
        ));
    }
    let mut rng = common::rng(6);
    let (mut pairs, mut violations) = (0, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (d, g) = common::resonant_drive(&mut rng);
        let f = resonant::spectral_features(&d, &g).unwrap();
        if f.regime != RootRegime::ConjugatePair || f.degenerate {
            continue;
        }
        pairs += 1;
        if f.gamma_sideband < f.gamma_central {
            violations += 1;
            worst = worst.max(f.gamma_central - f.gamma_sideband);
        }
    }
    let fig3c = preset("fig3c");
    let f3c = resonant::spectral_features(fig3c.drive(), fig3c.decay()).unwrap();
    ok &= violations == 0;
    notes.push(format!(
        "Gamma2>=Gamma1 violated in {violations}/{pairs} conjugate-pair cases (worst gap {worst:.3}; \
         fig3c Gamma1={:.4}, Gamma2={:.4})",
        f3c.gamma_central, f3c.gamma_sideband
    ));
    verdict(ok, notes.join("; "))
}

fn line_narrowing() -> Verdict {
    let grid = SpectrumGrid::default();
    let mut heights = Vec::new();
    let mut widths = Vec::new();
    for o23 in [1.0, 2.0, 4.0] {
        let d = DriveParameters::resonant(0.5, 2.0, o23);
        let s = Scenario::new(d, DecayRates::equal(), InitialAmplitudes::basis(1)).unwrap();
        heights.push(laplace::spectrum_s2(&grid, &s).unwrap().values[1000]);
        widths.push(resonant::spectral_features(&d, &DecayRates::equal()).unwrap().central_width());
    }
    let mut g3_widths = Vec::new();
    for g3 in [1.0, 0.5, 0.1, 0.0] {
        let f = resonant::spectral_features(
            &DriveParameters::resonant(0.5, 2.0, 4.0),
            &DecayRates::new(1.0, g3),
        )
        .unwrap();
        g3_widths.push(f.central_width());
    }
    let rising = heights.windows(2).all(|w| w[1] > w[0]);
    let narrowing = widths.windows(2).all(|w| w[1] < w[0]);
    let g3_narrowing = g3_widths.windows(2).all(|w| w[1] < w[0]);
    let closes = g3_widths[3] == 0.0;
    verdict(
        rising && narrowing && g3_narrowing && closes,
        format!(
            "Omega23 1,2,4: S2(0)={:.10e},{:.10e},{:.10e} (increasing={rising}), \
             2|Gamma1|={:.4},{:.4},{:.4} (decreasing={narrowing}); \
             gamma3 1,0.5,0.1,0: 2|Gamma1|={:.4},{:.4},{:.4},{:.1e} (decreasing={g3_narrowing})",
            heights[0], heights[1], heights[2], widths[0], widths[1], widths[2],
            g3_widths[0], g3_widths[1], g3_widths[2], g3_widths[3]
        ),
    )
}

fn conservation() -> Verdict {
    let mut rng = common::rng(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = common::general_scenario(&mut rng);
        let settings = IntegrationSettings::for_scenario(&s);
        // resolve the narrowest line by at least four points per half-width
        let slowest = oracle::slowest_decay_rate(&s);
        let h = (slowest / 4.0).min(0.01);
        let n = (80.0 / h).ceil() as usize + 1;
        let grid = SpectrumGrid::new(-40.0, 40.0, n).unwrap();
        let s2 = laplace::spectrum_s2(&grid, &s).unwrap();
        let s3 = laplace::spectrum_s3(&grid, &s).unwrap();
        let traj = oracle::integrate_amplitudes(&s, &settings).unwrap();
        let (p1, p4) = oracle::trapped_population(&traj).unwrap();
        let total = laplace::emitted_probability(&s2, &s) + laplace::emitted_probability(&s3, &s) + p1 + p4;
        worst = worst.max((total - 1.0).abs());
    }
    let mut trap_worst = 0.0f64;
    for _ in 0..10 {
        let d = DriveParameters {
            omega12: common::rabi(&mut rng, 0.3..3.0),
            omega24: common::rabi(&mut rng, 0.3..3.0),
            omega23: common::rabi(&mut rng, 0.0..4.0),
            delta1: 0.0,
            delta2: 0.0,
            delta3: 0.0,
        };
        let g = DecayRates::new(1.0, rng.random_range(0.2..1.5));
        let s = Scenario::new(d, g, InitialAmplitudes::basis(1)).unwrap();
        let (p1, p4) = oracle::trapped_population(&oracle::integrate_default(&s).unwrap()).unwrap();
        let predicted = d.omega24.norm_sqr() / (d.omega12.norm_sqr() + d.omega24.norm_sqr());
        trap_worst = trap_worst.max((p1 + p4 - predicted).abs());
    }
    verdict(
        worst < 1e-3 && trap_worst < 1e-3,
        format!("max |total - 1|={worst:.2e} over 20 scenarios; max trapped-fraction error={trap_worst:.2e}"),
    )
}

fn lambda_comparison() -> Verdict {
    let grid = SpectrumGrid::default();
    let count = |name: &str| {
        peaks::local_maxima(&laplace::spectrum_s2(&grid, &preset(name)).unwrap().values).len()
    };
    let (lambda, full) = (count("fig4-lambda"), count("fig4"));
    let s = preset("fig4");
    let f = resonant::spectral_features(s.drive(), s.decay()).unwrap();
    let sep = 2.0 * f.delta_lambda;
    let (o24, o23) = (s.drive().omega24.norm(), s.drive().omega23.norm());
    let d24 = (sep - o24).abs() / o24;
    let d23 = (sep - o23).abs() / o23;
    verdict(
        lambda == 2 && full == 3 && d24 > 0.1 && d23 > 0.1,
        format!(
            "peaks: Lambda scheme {lambda}, full scheme {full}; 2 delta_lambda={sep:.4} \
             differs from Omega24 by {:.0}% and Omega23 by {:.0}%",
            100.0 * d24,
            100.0 * d23
        ),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("random.toml");
    fs::write(
        &scenario,
        "channel = \"s2\"\n[drive]\nomega12 = [1.1, 40.0]\nomega24 = [2.3, -75.0]\nomega23 = [3.2, 130.0]\n\
         delta1 = -0.6\ndelta2 = 0.9\ndelta3 = 0.25\n[decay]\ngamma3 = 0.45\n\
         [init]\na1 = [0.6, 0.0]\na2 = [0.48, 33.0]\na3 = [0.64, -120.0]\n",
    )
    .unwrap();
    let sources = [
        vec!["--preset".to_string(), "fig3e".to_string()],
        vec!["--scenario".to_string(), scenario.to_str().unwrap().to_string()],
    ];
    let mut identical = true;
    let mut runs = 0;
    for src in &sources {
        let mut outputs = Vec::new();
        for (k, threads) in ["1", "4", "4"].iter().enumerate() {
            let out = dir.path().join(format!("out{runs}-{k}.txt"));
            let status = Command::new(env!("CARGO_BIN_EXE_invy"))
                .arg("run")
                .args(src)
                .args(["--points", "4001", "--output", out.to_str().unwrap()])
                .env("RAYON_NUM_THREADS", threads)
                .status()
                .unwrap();
            identical &= status.success();
            outputs.push(fs::read(&out).unwrap_or_default());
        }
        runs += 1;
        identical &= outputs.windows(2).all(|w| w[0] == w[1] && !w[0].is_empty());
    }
    verdict(identical, format!("{} sources x 3 runs (1 and 4 threads) byte-identical={identical}", runs))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Verdict); 10] = [
        ("AC1", "dark line for excited-state starts", dark_line),
        ("AC2", "dark state", dark_state),
        ("AC3", "analytic vs time-domain spectra", oracle_equivalence),
        ("AC4", "cubic root validity", cubic_validity),
        ("AC5", "partial-fraction identities", partial_fraction_identities),
        ("AC6", "sideband geometry", sideband_geometry),
        ("AC7", "line-narrowing trends", line_narrowing),
        ("AC8", "probability conservation", conservation),
        ("AC9", "Lambda-scheme comparison", lambda_comparison),
        ("AC10", "CLI determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, check) in criteria {
        let v = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!("{} [{id}] {title}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
