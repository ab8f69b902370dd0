//! Cross-checks of the optimized decoder against the dense literal reference.

use mlgd::reference::{self, DenseMatrix, SoftUpdate};
use mlgd::{
    extrinsic_sigma, generate_regular, Decoder, DecoderConfig, DecoderInput, Field, Gf,
    ParityCheckMatrix, StepResult, Variant,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dense_of(h: &ParityCheckMatrix) -> DenseMatrix {
    let mut rows = vec![vec![0u16; h.n_cols()]; h.n_rows()];
    for (i, j, v) in h.entries() {
        rows[i][j] = v.0;
    }
    DenseMatrix { r: h.field().bits(), poly: h.field().poly(), rows }
}

fn random_small_code(rng: &mut ChaCha8Rng) -> ParityCheckMatrix {
    let f = Field::new(2).unwrap();
    let n = 8 + 2 * rng.random_range(0..3usize); // 8, 10, or 12
    generate_regular(f, n, 2, 4, rng.random::<u64>()).unwrap()
}

#[test]
fn one_iteration_matches_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f_a7);
    let mut compared = 0;
    while compared < 30 {
        let h = random_small_code(&mut rng);
        let q: Vec<i32> = (0..h.n_cols() * 2).map(|_| rng.random_range(-32..32)).collect();
        let dense = dense_of(&h);

        for (variant, update) in [
            (Variant::Isrb, SoftUpdate::Accumulate { lambda: 16 }),
            (Variant::Iisrb, SoftUpdate::Fresh { xi1: 4, xi2: 1 }),
        ] {
            let Some(expect) = reference::soft_one_iteration(&dense, &q, update) else {
                continue;
            };
            let cfg = DecoderConfig::recommended(variant, 2);
            assert_eq!(cfg.lambda, 16);
            assert_eq!((cfg.xi1, cfg.xi2), (4, 1));
            let mut dec = Decoder::new(&h, cfg).unwrap();
            dec.start(DecoderInput::Soft(&q)).unwrap();
            assert_eq!(dec.step(), StepResult::Continue);

            let flat: Vec<i64> = expect.reliabilities.iter().flatten().copied().collect();
            assert_eq!(dec.reliabilities(), &flat[..], "{variant:?} reliabilities diverged");
            assert_eq!(dec.hard_decisions(), &expect.hard[..], "{variant:?} decisions diverged");
            compared += 1;
        }
    }
}

#[test]
fn syndrome_shortcut_sigma_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51_6a);
    for _ in 0..100 {
        let h = random_small_code(&mut rng);
        let dense = dense_of(&h);
        let z: Vec<Gf> = (0..h.n_cols()).map(|_| Gf(rng.random_range(0..4u32) as u16)).collect();
        let s = h.syndrome(&z).unwrap();
        for (i, j, _) in h.entries() {
            let fast = extrinsic_sigma(&h, &s, &z, i, j).unwrap();
            let direct = dense.extrinsic_sigma_direct(&z, i, j);
            assert_eq!(fast, direct, "edge ({i},{j})");
        }
    }
}

#[test]
fn quantized_inputs_with_ties_still_match() {
    // zero q values create reliability ties; the tie rule must agree too
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e_11);
    let mut compared = 0;
    while compared < 20 {
        let h = random_small_code(&mut rng);
        let q: Vec<i32> = (0..h.n_cols() * 2).map(|_| rng.random_range(-2..2)).collect();
        let dense = dense_of(&h);
        let Some(expect) =
            reference::soft_one_iteration(&dense, &q, SoftUpdate::Fresh { xi1: 4, xi2: 1 })
        else {
            continue;
        };
        let cfg = DecoderConfig::recommended(Variant::Iisrb, 2);
        let mut dec = Decoder::new(&h, cfg).unwrap();
        dec.start(DecoderInput::Soft(&q)).unwrap();
        assert_eq!(dec.step(), StepResult::Continue);
        let flat: Vec<i64> = expect.reliabilities.iter().flatten().copied().collect();
        assert_eq!(dec.reliabilities(), &flat[..]);
        assert_eq!(dec.hard_decisions(), &expect.hard[..]);
        compared += 1;
    }
}
