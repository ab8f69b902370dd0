//! Monte-Carlo experiment driver.
//!
//! Frames are independent work items keyed by (master seed, snr index, frame
//! index), so every variant at one SNR decodes the same noisy frames and
//! results do not depend on the worker count: frames are dispatched in fixed
//! rounds, workers split each round, and the stop rule is evaluated at round
//! boundaries only. Integer aggregation keeps merges order-free.

use std::time::Instant;

use mlgd::{
    classify_failure, DecodeStatus, Decoder, DecoderInput, DistanceClass, FailureClass, Gf,
    ParityCheckMatrix, SystematicEncoder, Variant,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelConfig};
use crate::experiment::{ExperimentSpec, SpecError, TxMode};

/// Frames dispatched per scheduling round; results are invariant to this as
/// long as it is fixed, because the stop rule only fires at round boundaries.
const ROUND_FRAMES: u64 = 512;

/// One (variant, SNR) measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub variant: String,
    pub snr_db: f64,
    /// Frames simulated (K).
    pub frames: u64,
    /// Frames whose final output differed from the transmitted codeword.
    pub block_errors: u64,
    pub bler: f64,
    /// Total decoding iterations (T).
    pub total_iterations: u64,
    /// T / K.
    pub avg_iterations: f64,
    // failure breakdown; sums to block_errors
    pub p1_small: u64,
    pub p1_large: u64,
    pub p2_small: u64,
    pub p2_large: u64,
    pub other: u64,
    /// Mean measured operation counts per iteration.
    pub fa: f64,
    pub fm: f64,
    pub ia: f64,
    pub ic: f64,
    pub wall_seconds: f64,
    /// Stop rule was cut short by max_frames.
    pub truncated: bool,
    /// Sum of squared per-frame iteration counts (for mean CIs).
    pub iterations_sq_sum: u64,
}

/// Failed-frame trajectory dump for --trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub variant: String,
    pub snr_db: f64,
    pub frame_index: u64,
    pub iterations: u32,
    /// Hard decisions per iteration, raw element values.
    pub snapshots: Vec<Vec<u16>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CodeSummary {
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub message_symbols: usize,
    pub code_rate: f64,
    pub gamma: Option<usize>,
    pub rho: Option<usize>,
    pub field_bits: u32,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub traces: Vec<TraceRecord>,
    pub code: CodeSummary,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub workers: usize,
    pub collect_traces: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, collect_traces: false }
    }
}

/// Counter-style per-frame stream: splitmix64 expansion of the key words.
pub fn frame_rng(master_seed: u64, snr_index: u64, frame_index: u64) -> ChaCha8Rng {
    fn splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = master_seed;
    let a = splitmix(&mut state);
    state ^= snr_index.wrapping_mul(0xA24B_AED4_963E_E407);
    let b = splitmix(&mut state);
    state ^= frame_index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let c = splitmix(&mut state);
    let d = splitmix(&mut state);
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&a.to_le_bytes());
    seed[8..16].copy_from_slice(&b.to_le_bytes());
    seed[16..24].copy_from_slice(&c.to_le_bytes());
    seed[24..].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

use rand::SeedableRng;

struct FrameResult {
    error: bool,
    iterations: u32,
    bucket: Option<Bucket>,
    iter_fa: u64,
    iter_fm: u64,
    iter_ia: u64,
    iter_ic: u64,
    trace: Option<(u64, u32, Vec<Vec<u16>>)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Bucket {
    P1Small,
    P1Large,
    P2Small,
    P2Large,
    Other,
}

/// Runs the whole experiment: every configured variant over the SNR sweep.
pub fn run(spec: &ExperimentSpec, opts: &RunOptions) -> Result<RunReport, SpecError> {
    let h = spec.build_matrix()?;
    let encoder = SystematicEncoder::new(&h);
    let rate = encoder.message_len() as f64 / h.n_cols() as f64;
    if encoder.message_len() == 0 {
        return Err(SpecError::Invalid("code has rank n: only the zero codeword exists".into()));
    }
    let code = CodeSummary {
        n: h.n_cols(),
        m: h.n_rows(),
        rank: encoder.rank(),
        message_symbols: encoder.message_len(),
        code_rate: rate,
        gamma: h.regularity().map(|(g, _)| g),
        rho: h.regularity().map(|(_, r)| r),
        field_bits: h.field().bits(),
    };
    let gamma = h.regularity().map(|(g, _)| g).unwrap_or_else(|| {
        (0..h.n_cols()).map(|j| h.col_weight(j)).max().unwrap_or(1)
    });

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for (variant, reselection, label) in spec.variant_list() {
        let cfg = spec.decoder_config(variant, reselection, gamma);
        for (snr_index, &snr_db) in spec.sweep.snr_db.iter().enumerate() {
            let ch = spec.channel_config(snr_db, rate);
            let (row, mut point_traces) = simulate_point(
                spec,
                &h,
                &encoder,
                &cfg,
                variant,
                &label,
                snr_index as u64,
                snr_db,
                &ch,
                opts,
            );
            rows.push(row);
            traces.append(&mut point_traces);
        }
    }
    Ok(RunReport { rows, traces, code })
}

#[allow(clippy::too_many_arguments)]
fn simulate_point(
    spec: &ExperimentSpec,
    h: &ParityCheckMatrix,
    encoder: &SystematicEncoder,
    cfg: &mlgd::DecoderConfig,
    variant: Variant,
    label: &str,
    snr_index: u64,
    snr_db: f64,
    ch: &ChannelConfig,
    opts: &RunOptions,
) -> (ResultRow, Vec<TraceRecord>) {
    let start = Instant::now();
    let workers = opts.workers.max(1);
    let master = spec.seed;
    let tx_mode = spec.tx.mode;
    let theta = cfg.theta;

    let mut frames = 0u64;
    let mut block_errors = 0u64;
    let mut total_iterations = 0u64;
    let mut iterations_sq_sum = 0u64;
    let mut buckets = [0u64; 5];
    let mut op_sums = [0u64; 4];
    let mut op_iters = 0u64;
    let mut traces = Vec::new();

    loop {
        let remaining = spec.stop.max_frames.saturating_sub(frames);
        if remaining == 0 {
            break;
        }
        let round = ROUND_FRAMES.min(remaining);
        let first = frames;

        let mut results: Vec<FrameResult> = Vec::with_capacity(round as usize);
        if workers == 1 {
            let mut decoder = Decoder::new(h, cfg.clone()).expect("validated config");
            for idx in first..first + round {
                results.push(run_frame(
                    h, encoder, &mut decoder, variant, tx_mode, ch, theta, master, snr_index, idx,
                    opts.collect_traces,
                ));
            }
        } else {
            let chunk = round.div_ceil(workers as u64);
            let mut partials: Vec<Vec<FrameResult>> = Vec::new();
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for w in 0..workers as u64 {
                    let lo = first + w * chunk;
                    let hi = (lo + chunk).min(first + round);
                    if lo >= hi {
                        break;
                    }
                    let cfg = cfg.clone();
                    handles.push(scope.spawn(move || {
                        let mut decoder = Decoder::new(h, cfg).expect("validated config");
                        (lo..hi)
                            .map(|idx| {
                                run_frame(
                                    h, encoder, &mut decoder, variant, tx_mode, ch, theta, master,
                                    snr_index, idx, opts.collect_traces,
                                )
                            })
                            .collect::<Vec<_>>()
                    }));
                }
                for handle in handles {
                    partials.push(handle.join().expect("worker panicked"));
                }
            });
            for mut part in partials {
                results.append(&mut part);
            }
        }

        for res in results {
            frames += 1;
            total_iterations += res.iterations as u64;
            iterations_sq_sum += (res.iterations as u64) * (res.iterations as u64);
            op_sums[0] += res.iter_fa;
            op_sums[1] += res.iter_fm;
            op_sums[2] += res.iter_ia;
            op_sums[3] += res.iter_ic;
            op_iters += res.iterations as u64;
            if res.error {
                block_errors += 1;
                let bucket = res.bucket.unwrap_or(Bucket::Other);
                buckets[bucket as usize] += 1;
            }
            if let Some((frame_index, iterations, snapshots)) = res.trace {
                traces.push(TraceRecord {
                    variant: label.to_string(),
                    snr_db,
                    frame_index,
                    iterations,
                    snapshots,
                });
            }
        }

        if block_errors >= spec.stop.min_block_errors {
            break;
        }
    }

    let truncated = block_errors < spec.stop.min_block_errors;
    let mean_ops = |sum: u64| if op_iters == 0 { 0.0 } else { sum as f64 / op_iters as f64 };
    let row = ResultRow {
        variant: label.to_string(),
        snr_db,
        frames,
        block_errors,
        bler: if frames == 0 { 0.0 } else { block_errors as f64 / frames as f64 },
        total_iterations,
        avg_iterations: if frames == 0 { 0.0 } else { total_iterations as f64 / frames as f64 },
        p1_small: buckets[Bucket::P1Small as usize],
        p1_large: buckets[Bucket::P1Large as usize],
        p2_small: buckets[Bucket::P2Small as usize],
        p2_large: buckets[Bucket::P2Large as usize],
        other: buckets[Bucket::Other as usize],
        fa: mean_ops(op_sums[0]),
        fm: mean_ops(op_sums[1]),
        ia: mean_ops(op_sums[2]),
        ic: mean_ops(op_sums[3]),
        wall_seconds: start.elapsed().as_secs_f64(),
        truncated,
        iterations_sq_sum,
    };
    (row, traces)
}

#[allow(clippy::too_many_arguments)]
fn run_frame(
    h: &ParityCheckMatrix,
    encoder: &SystematicEncoder,
    decoder: &mut Decoder<'_>,
    variant: Variant,
    tx_mode: TxMode,
    ch: &ChannelConfig,
    theta: usize,
    master: u64,
    snr_index: u64,
    frame_index: u64,
    collect_trace: bool,
) -> FrameResult {
    let mut rng = frame_rng(master, snr_index, frame_index);
    let r = h.field().bits();
    let order = h.field().order() as u32;

    let x: Vec<Gf> = match tx_mode {
        TxMode::AllZero => vec![Gf::ZERO; h.n_cols()],
        TxMode::Random => {
            let msg: Vec<Gf> = (0..encoder.message_len())
                .map(|_| Gf(rng.random_range(0..order) as u16))
                .collect();
            encoder.encode(&msg).expect("message sized to the encoder")
        }
    };

    let frame = channel::send(r, &x, ch, &mut rng);
    let outcome = if variant == Variant::Ihrb {
        decoder.decode(DecoderInput::Hard(&frame.z))
    } else {
        decoder.decode(DecoderInput::Soft(&frame.q))
    }
    .expect("inputs sized to the matrix");

    let error = outcome.decisions != x;
    let bucket = match &outcome.status {
        DecodeStatus::Success => error.then_some(Bucket::Other),
        DecodeStatus::Failure(_) => {
            let (class, dist) = classify_failure(
                &outcome.decisions,
                outcome.prev_decisions.as_deref(),
                outcome.prev2_decisions.as_deref(),
                Some(&x),
                theta,
            );
            Some(match (class, dist) {
                (FailureClass::Period1, DistanceClass::Small) => Bucket::P1Small,
                (FailureClass::Period1, _) => Bucket::P1Large,
                (FailureClass::Period2, DistanceClass::Small) => Bucket::P2Small,
                (FailureClass::Period2, _) => Bucket::P2Large,
                (FailureClass::Other, _) => Bucket::Other,
            })
        }
    };

    let counters = decoder.counters();
    let trace = if collect_trace && error {
        let snapshots = outcome
            .trace
            .as_ref()
            .map(|t| t.iter().map(|z| z.iter().map(|g| g.0).collect()).collect())
            .unwrap_or_default();
        Some((frame_index, outcome.iterations, snapshots))
    } else {
        None
    };

    FrameResult {
        error,
        iterations: outcome.iterations,
        bucket,
        iter_fa: counters.iteration_sum.fa,
        iter_fm: counters.iteration_sum.fm,
        iter_ia: counters.iteration_sum.ia,
        iter_ic: counters.iteration_sum.ic,
        trace,
    }
}

/// Per-SNR comparison of two result sets over matching grids.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub snr_db: f64,
    pub variant_a: String,
    pub variant_b: String,
    pub avg_iterations_a: f64,
    pub avg_iterations_b: f64,
    /// a - b; positive means the second set converges faster.
    pub avg_iterations_delta: f64,
    pub bler_a: f64,
    pub bler_b: f64,
    /// bler_a / bler_b; infinity when b saw no errors.
    pub bler_ratio: f64,
    pub bler_ci_a: (f64, f64),
    pub bler_ci_b: (f64, f64),
}

#[derive(Debug)]
pub enum CompareError {
    GridMismatch { a: Vec<f64>, b: Vec<f64> },
}

impl std::fmt::Display for CompareError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompareError::GridMismatch { a, b } => {
                write!(f, "SNR grids differ: {a:?} vs {b:?}")
            }
        }
    }
}

impl std::error::Error for CompareError {}

pub fn compare(a: &[ResultRow], b: &[ResultRow]) -> Result<Vec<CompareRow>, CompareError> {
    let grid_a: Vec<f64> = a.iter().map(|r| r.snr_db).collect();
    let grid_b: Vec<f64> = b.iter().map(|r| r.snr_db).collect();
    if grid_a != grid_b {
        return Err(CompareError::GridMismatch { a: grid_a, b: grid_b });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(ra, rb)| CompareRow {
            snr_db: ra.snr_db,
            variant_a: ra.variant.clone(),
            variant_b: rb.variant.clone(),
            avg_iterations_a: ra.avg_iterations,
            avg_iterations_b: rb.avg_iterations,
            avg_iterations_delta: ra.avg_iterations - rb.avg_iterations,
            bler_a: ra.bler,
            bler_b: rb.bler,
            bler_ratio: if rb.bler == 0.0 { f64::INFINITY } else { ra.bler / rb.bler },
            bler_ci_a: crate::stats::wilson_interval(ra.block_errors, ra.frames, crate::stats::Z_95),
            bler_ci_b: crate::stats::wilson_interval(rb.block_errors, rb.frames, crate::stats::Z_95),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::ExperimentSpec;

    fn tiny_spec(noiseless: bool, min_errors: u64, max_frames: u64) -> ExperimentSpec {
        let text = format!(
            r#"
seed = 9
[code]
source = "generate"
n = 16
col_weight = 2
row_weight = 4
field_bits = 2
code_seed = 3
[channel]
kind = "awgn"
noiseless = {noiseless}
[decode]
variants = ["iisrb"]
max_iterations = 20
[sweep]
snr_db = [3.0]
[stop]
min_block_errors = {min_errors}
max_frames = {max_frames}
"#
        );
        ExperimentSpec::from_toml_str(&text).unwrap()
    }

    #[test]
    fn noiseless_run_has_no_errors_and_zero_iterations() {
        let spec = tiny_spec(true, 10, 100);
        let report = run(&spec, &RunOptions::default()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.frames, 100);
        assert_eq!(row.block_errors, 0);
        assert_eq!(row.bler, 0.0);
        assert_eq!(row.avg_iterations, 0.0);
        assert!(row.truncated, "stop rule unreachable without noise");
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let spec = tiny_spec(false, 30, 2000);
        let serial = run(&spec, &RunOptions { workers: 1, collect_traces: false }).unwrap();
        let parallel = run(&spec, &RunOptions { workers: 4, collect_traces: false }).unwrap();
        let strip = |rows: &[ResultRow]| {
            rows.iter()
                .map(|r| ResultRow { wall_seconds: 0.0, ..r.clone() })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&serial.rows), strip(&parallel.rows));
    }

    #[test]
    fn rerun_is_deterministic() {
        let spec = tiny_spec(false, 20, 1000);
        let a = run(&spec, &RunOptions { workers: 2, collect_traces: false }).unwrap();
        let b = run(&spec, &RunOptions { workers: 3, collect_traces: false }).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.frames, rb.frames);
            assert_eq!(ra.block_errors, rb.block_errors);
            assert_eq!(ra.total_iterations, rb.total_iterations);
            assert_eq!(
                (ra.p1_small, ra.p1_large, ra.p2_small, ra.p2_large, ra.other),
                (rb.p1_small, rb.p1_large, rb.p2_small, rb.p2_large, rb.other)
            );
        }
    }

    #[test]
    fn breakdown_sums_to_block_errors() {
        let spec = tiny_spec(false, 50, 4000);
        let report = run(&spec, &RunOptions { workers: 2, collect_traces: false }).unwrap();
        for row in &report.rows {
            assert_eq!(
                row.p1_small + row.p1_large + row.p2_small + row.p2_large + row.other,
                row.block_errors
            );
        }
    }

    #[test]
    fn compare_self_is_zero_delta() {
        let rows = vec![ResultRow {
            variant: "IISRB".into(),
            snr_db: 4.0,
            frames: 1000,
            block_errors: 20,
            bler: 0.02,
            total_iterations: 3000,
            avg_iterations: 3.0,
            p1_small: 10,
            p1_large: 5,
            p2_small: 3,
            p2_large: 1,
            other: 1,
            fa: 1.0,
            fm: 1.0,
            ia: 1.0,
            ic: 1.0,
            wall_seconds: 0.1,
            truncated: false,
            iterations_sq_sum: 9000,
        }];
        let out = compare(&rows, &rows).unwrap();
        assert_eq!(out[0].avg_iterations_delta, 0.0);
        assert_eq!(out[0].bler_ratio, 1.0);

        let mut other = rows.clone();
        other[0].bler = 0.01;
        let out = compare(&rows, &other).unwrap();
        assert!((out[0].bler_ratio - 2.0).abs() < 1e-12);

        let mut shifted = rows.clone();
        shifted[0].snr_db = 5.0;
        assert!(compare(&rows, &shifted).is_err());
    }

    #[test]
    fn frame_rng_streams_are_distinct_and_stable() {
        use rand::RngCore;
        let mut a = frame_rng(1, 0, 0);
        let mut b = frame_rng(1, 0, 1);
        let mut c = frame_rng(1, 0, 0);
        let (xa, xb, xc) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(xa, xb);
        assert_eq!(xa, xc);
    }
}
