use proptest::prelude::*;
use vortex_twm::analysis::{winding_number_with, ModelSampler};
use vortex_twm::beams::{Grid2D, LGBeamSpec};
use vortex_twm::cli::verify::{analytic_solver, verify_with, Level};
use vortex_twm::medium::MediumParams;
use vortex_twm::propagation::{solve_channel_p, solve_channel_s, Channel, ChannelState, OutputKind, Scene};
use vortex_twm::{Complex64, Result};

fn scene(lc: i32, lp: i32, ls: i32, delta: f64) -> Scene {
    let medium = MediumParams {
        delta,
        ..MediumParams::default()
    };
    Scene {
        medium,
        control: LGBeamSpec::new(4.0, lc, 1.0),
        probe_p: LGBeamSpec::new(0.005, lp, 1.0),
        probe_s: LGBeamSpec::new(0.005, ls, 1.0),
    }
}

fn winding(scene: Scene, kind: OutputKind) -> i32 {
    let grid = Grid2D::new(32, 3.0).unwrap();
    winding_number_with(&ModelSampler::new(scene, kind, grid), 0.8, 720).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_charges_follow_conservation(
        lc in -4i32..=4, lp in -3i32..=3, ls in -3i32..=3, delta in -9.0f64..9.0,
    ) {
        prop_assume!(lc != 0);
        let s = scene(lc, lp, ls, delta);
        prop_assert_eq!(winding(s, OutputKind::Fs), lc + lp);
        prop_assert_eq!(winding(s, OutputKind::Fp), ls - lc);
    }

    // Absorption never adds energy: total channel power is non-increasing
    // for any positive decays.
    #[test]
    fn channel_power_never_grows(
        g31 in 0.1f64..2.0, g21 in 0.01f64..1.0, delta in -9.0f64..9.0,
        amp in 0.0f64..6.0, phase in 0.0f64..std::f64::consts::TAU, d in 1.0f64..200.0,
    ) {
        let p = MediumParams::new(g31, g21, delta, d);
        let ctl = Complex64::from_polar(amp, phase);
        let b = Complex64::new(1.0, 0.0);
        for solve in [solve_channel_s, solve_channel_p] {
            let mut last = f64::INFINITY;
            for k in 0..=50 {
                let s = solve(&p, ctl, b, k as f64 / 50.0).unwrap();
                let now = s.primary.norm_sqr() + s.generated.norm_sqr();
                prop_assert!(now <= last * (1.0 + 1e-12) + 1e-300);
                last = now;
            }
        }
    }
}

fn flipped_generated(p: &MediumParams, c: Complex64, b: Complex64, ch: Channel, z: f64) -> Result<ChannelState> {
    analytic_solver(p, c, b, ch, z).map(|s| ChannelState {
        generated: -s.generated,
        ..s
    })
}

fn conjugated_control(p: &MediumParams, c: Complex64, b: Complex64, ch: Channel, z: f64) -> Result<ChannelState> {
    analytic_solver(p, c.conj(), b, ch, z)
}

#[test]
fn verify_rejects_sign_error() {
    assert!(!verify_with(Level::Fast, &flipped_generated).passed());
}

#[test]
fn verify_rejects_conjugation_error() {
    assert!(!verify_with(Level::Fast, &conjugated_control).passed());
}

#[test]
fn verify_accepts_closed_forms() {
    let report = verify_with(Level::Fast, &analytic_solver);
    assert!(report.passed(), "{}", report.render());
}
