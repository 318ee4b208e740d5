mod common;

use burstnoise::detector::{awgn_llrs, bcjr_llrs, DetectorInput};
use burstnoise::synth::{synthesize_noise, NoiseSamples, SampleMode};
use burstnoise::ModelProfile;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_profile() -> impl Strategy<Value = ModelProfile> {
    (2usize..=3)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(0.05f64..1.0, m),
                prop::collection::vec(0.1f64..2.0, m),
                0.0f64..0.99,
            )
        })
        .prop_map(|(raw, mut sigmas, r)| {
            let total: f64 = raw.iter().sum();
            sigmas.sort_by(f64::total_cmp);
            for i in 1..sigmas.len() {
                if sigmas[i] <= sigmas[i - 1] {
                    sigmas[i] = sigmas[i - 1] * 1.01;
                }
            }
            ModelProfile::new(raw.iter().map(|v| v / total).collect(), sigmas, r).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bcjr_matches_enumeration(
        prof in small_profile(),
        y in prop::collection::vec(-3.0f64..3.0, 1..=5),
        priors in prop::collection::vec(-2.0f64..2.0, 5),
        use_priors in any::<bool>(),
    ) {
        let priors = &priors[..y.len()];
        let input = if use_priors {
            DetectorInput::new(&y, &prof).with_priors(priors)
        } else {
            DetectorInput::new(&y, &prof)
        };
        let got = bcjr_llrs(&input).unwrap();
        let want = common::brute_force_llrs(&y, &prof, use_priors.then_some(priors));
        for (g, w) in got.as_slice().iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-9 * w.abs().max(1.0), "{} vs {}", g, w);
        }
    }

    #[test]
    fn memoryless_chain_gives_mixture_llrs(prof in small_profile(), y in prop::collection::vec(-3.0f64..3.0, 1..=40)) {
        let prof = ModelProfile::new(prof.state_probs().to_vec(), prof.state_sigmas().to_vec(), 0.0).unwrap();
        let got = bcjr_llrs(&DetectorInput::new(&y, &prof)).unwrap();
        for (g, &yk) in got.as_slice().iter().zip(&y) {
            let w = common::mixture_llr(yk, &prof);
            prop_assert!((g - w).abs() < 1e-9 * w.abs().max(1.0));
        }
    }

    #[test]
    fn negating_the_input_negates_the_llrs(prof in small_profile(), y in prop::collection::vec(-3.0f64..3.0, 1..=40)) {
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let a = bcjr_llrs(&DetectorInput::new(&y, &prof)).unwrap();
        let b = bcjr_llrs(&DetectorInput::new(&neg, &prof)).unwrap();
        for (x, z) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((x + z).abs() < 1e-9 * x.abs().max(1.0));
        }
    }
}

#[test]
fn uncoded_symbol_errors_never_exceed_awgn() {
    let prof = ModelProfile::table1();
    let n = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let bits: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
    let NoiseSamples::Real(z) = synthesize_noise(&prof, n, 41, SampleMode::Real).unwrap().samples else {
        panic!("real mode")
    };
    let y: Vec<f64> = bits.iter().zip(&z).map(|(&b, z)| 0.1 * (1.0 - 2.0 * b as f64) + z).collect();
    let scaled: Vec<f64> = y.iter().map(|v| v / 0.1).collect();
    let prof_scaled = ModelProfile::new(
        prof.state_probs().to_vec(),
        prof.state_sigmas().iter().map(|s| s / 0.1).collect(),
        prof.correlation(),
    )
    .unwrap();
    let errors = |hard: Vec<u8>| hard.iter().zip(&bits).filter(|(a, b)| a != b).count();
    let bcjr = errors(bcjr_llrs(&DetectorInput::new(&scaled, &prof_scaled)).unwrap().hard_bits());
    let awgn = errors(awgn_llrs(&scaled, prof_scaled.state_variances()[0]).unwrap().hard_bits());
    assert!(bcjr <= awgn, "bcjr {bcjr} > awgn {awgn}");
}

#[test]
fn long_sequences_stay_finite() {
    let prof = ModelProfile::table1();
    let NoiseSamples::Real(y) = synthesize_noise(&prof, 1_000_000, 42, SampleMode::Real).unwrap().samples else {
        panic!("real mode")
    };
    let llrs = bcjr_llrs(&DetectorInput::new(&y, &prof)).unwrap();
    assert!(llrs.as_slice().iter().all(|v| v.is_finite()));
}
