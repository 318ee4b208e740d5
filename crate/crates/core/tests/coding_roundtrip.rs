use burstnoise::coding::{peg_regular, write_alist, LdpcCode, SumProductDecoder, DEFAULT_MAX_ITERS};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn dense_rank(n: usize, checks: &[Vec<usize>]) -> usize {
    let mut rows: Vec<Vec<bool>> = checks
        .iter()
        .map(|c| {
            let mut row = vec![false; n];
            for &v in c {
                row[v] ^= true;
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (a, &b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn peg_code_dimensions_match_elimination() {
    let code = peg_regular(1024, 3, 6, 1).unwrap();
    assert_eq!(code.num_checks(), 512);
    let rank = dense_rank(code.n(), code.checks());
    assert_eq!(code.rank(), rank);
    assert_eq!(code.k(), 1024 - rank);
    assert!(code.k() >= 512);
}

#[test]
fn alist_file_round_trip() {
    let code = peg_regular(96, 3, 6, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.alist");
    std::fs::write(&path, write_alist(&code)).unwrap();
    let loaded = LdpcCode::load_alist(&path).unwrap();
    assert_eq!(loaded.checks(), code.checks());
    assert_eq!(loaded.k(), code.k());
}

#[test]
fn rank_deficient_parity_checks() {
    // the third check is the sum of the first two
    let code = LdpcCode::from_checks(5, vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 1, 3, 4]]).unwrap();
    assert_eq!(code.rank(), 2);
    assert_eq!(code.k(), 3);
    for info in 0..8u8 {
        let bits: Vec<u8> = (0..3).map(|i| (info >> i) & 1).collect();
        let word = code.encode(&bits).unwrap();
        assert!(code.is_codeword(&word));
        assert_eq!(code.extract_info(&word), bits);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn encode_then_noiseless_decode(seed in any::<u64>()) {
        let code = peg_regular(192, 3, 6, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
        let word = code.encode(&info).unwrap();
        prop_assert!(code.syndrome(&word).is_empty());
        let llrs: Vec<f64> = word.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
        let out = SumProductDecoder::new(&code).decode(&llrs, DEFAULT_MAX_ITERS);
        prop_assert!(out.converged);
        prop_assert_eq!(out.info_bits, info);
    }
}

fn awgn_ber(code: &LdpcCode, snr_db: f64, codewords: usize, seed: u64) -> f64 {
    let var = 1.0 / (2.0 * code.rate() * 10f64.powf(snr_db / 10.0));
    let noise = Normal::new(0.0, var.sqrt()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decoder = SumProductDecoder::new(code);
    let mut errors = 0usize;
    for _ in 0..codewords {
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
        let word = code.encode(&info).unwrap();
        let llrs: Vec<f64> = word
            .iter()
            .map(|&b| 2.0 * (1.0 - 2.0 * b as f64 + noise.sample(&mut rng)) / var)
            .collect();
        let out = decoder.decode(&llrs, DEFAULT_MAX_ITERS);
        errors += out.info_bits.iter().zip(&info).filter(|(a, b)| a != b).count();
    }
    errors as f64 / (codewords * code.k()) as f64
}

#[test]
fn gaussian_channel_waterfall() {
    let code = peg_regular(1024, 3, 6, 1).unwrap();
    let codewords = 1_000_000usize.div_ceil(code.k());
    let ber = awgn_ber(&code, 3.0, codewords, 77);
    println!("BER at 3 dB over {} info bits: {ber:e}", codewords * code.k());
    assert!(ber < 1e-3, "BER {ber}");
}

#[test]
fn ber_falls_with_snr() {
    let code = peg_regular(256, 3, 6, 2).unwrap();
    let bers: Vec<f64> = [0.5, 1.5, 2.5].iter().map(|&s| awgn_ber(&code, s, 400, 78)).collect();
    assert!(bers.windows(2).all(|w| w[1] < w[0]), "{bers:?}");
}
