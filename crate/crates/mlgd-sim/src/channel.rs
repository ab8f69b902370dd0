//! BPSK over AWGN / block Rayleigh fading, with uniform quantization.
//!
//! Symbol bits go out in order t = 0..r-1, "0" mapped to +1 and "1" to -1.
//! The receiver quantizes with a mid-tread uniform quantizer (zero is a
//! level, rounding half away from zero, symmetric saturation) and slices hard
//! decisions off the sign, ties deciding 0.

use mlgd::Gf;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Awgn,
    BlockRayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    /// Eb/N0 in dB, per information bit.
    pub ebn0_db: f64,
    /// K/N of the code; enters the noise variance.
    pub code_rate: f64,
    /// Quantizer bits (omega); levels span -2^(omega-1) .. 2^(omega-1) - 1.
    pub quant_bits: u32,
    /// Quantizer step (delta).
    pub quant_step: f64,
    /// Disable noise entirely (ideal-channel limit).
    pub noiseless: bool,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.quant_bits < 1 || self.quant_bits > 16 {
            return Err(ChannelError::BadQuantBits(self.quant_bits));
        }
        if !(self.quant_step > 0.0) {
            return Err(ChannelError::BadQuantStep(self.quant_step));
        }
        if !(self.code_rate > 0.0 && self.code_rate <= 1.0) {
            return Err(ChannelError::BadRate(self.code_rate));
        }
        Ok(())
    }

    /// Per-dimension noise sigma: sigma^2 = 1 / (2 * rate * 10^(EbN0/10)).
    pub fn noise_sigma(&self) -> f64 {
        (1.0 / (2.0 * self.code_rate * 10f64.powf(self.ebn0_db / 10.0))).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    BadQuantBits(u32),
    BadQuantStep(f64),
    BadRate(f64),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::BadQuantBits(b) => write!(f, "quantizer bits {b} outside 1..=16"),
            ChannelError::BadQuantStep(s) => write!(f, "quantizer step {s} must be positive"),
            ChannelError::BadRate(r) => write!(f, "code rate {r} outside (0, 1]"),
        }
    }
}

impl std::error::Error for ChannelError {}

/// One received frame: raw per-bit values, their quantization, and the hard
/// decisions, plus the fade gain when the channel had one.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub y: Vec<f64>,
    pub q: Vec<i32>,
    pub z: Vec<Gf>,
    pub fade: Option<f64>,
}

/// BPSK mapping of the symbol bits, N*r values in {+1, -1}.
pub fn modulate(r: u32, x: &[Gf]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() * r as usize);
    for sym in x {
        for t in 0..r {
            out.push(if sym.bit(t) == 1 { -1.0 } else { 1.0 });
        }
    }
    out
}

/// Channel pass: AWGN adds N(0, sigma^2) per bit; block Rayleigh draws one
/// unit-second-moment gain per frame, applies it to every bit, and (receiver
/// side, perfect CSI) normalizes by the gain before returning.
pub fn transmit(frame: &[f64], cfg: &ChannelConfig, rng: &mut ChaCha8Rng) -> (Vec<f64>, Option<f64>) {
    let fade = match cfg.kind {
        ChannelKind::Awgn => None,
        ChannelKind::BlockRayleigh => {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Some(((a * a + b * b) / 2.0).sqrt())
        }
    };
    let y = faded_awgn(frame, cfg, fade.unwrap_or(1.0), rng);
    (y, fade)
}

/// y = (g*s + n)/g with i.i.d. Gaussian noise; g = 1 degenerates to plain AWGN.
pub(crate) fn faded_awgn(frame: &[f64], cfg: &ChannelConfig, gain: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if cfg.noiseless {
        return frame.to_vec();
    }
    let normal = Normal::new(0.0, cfg.noise_sigma()).expect("valid sigma");
    frame.iter().map(|&s| (gain * s + normal.sample(rng)) / gain).collect()
}

/// Mid-tread quantization: clamp(round(y/delta)) into -2^(w-1) .. 2^(w-1)-1.
pub fn quantize(y: &[f64], cfg: &ChannelConfig) -> Vec<i32> {
    let lo = -(1i64 << (cfg.quant_bits - 1));
    let hi = (1i64 << (cfg.quant_bits - 1)) - 1;
    y.iter()
        .map(|&v| {
            let level = (v / cfg.quant_step).round() as i64;
            level.clamp(lo, hi) as i32
        })
        .collect()
}

/// Sign slicing into field elements; y = 0 decides bit 0.
pub fn hard_decide(r: u32, y: &[f64]) -> Vec<Gf> {
    let r = r as usize;
    assert_eq!(y.len() % r, 0);
    (0..y.len() / r)
        .map(|j| {
            let mut v = 0u16;
            for t in 0..r {
                if y[j * r + t] < 0.0 {
                    v |= 1 << t;
                }
            }
            Gf(v)
        })
        .collect()
}

/// Modulate, pass the channel, quantize, slice.
pub fn send(r: u32, x: &[Gf], cfg: &ChannelConfig, rng: &mut ChaCha8Rng) -> ReceivedFrame {
    let s = modulate(r, x);
    let (y, fade) = transmit(&s, cfg, rng);
    let q = quantize(&y, cfg);
    let z = hard_decide(r, &y);
    ReceivedFrame { y, q, z, fade }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn cfg(kind: ChannelKind) -> ChannelConfig {
        ChannelConfig {
            kind,
            ebn0_db: 4.0,
            code_rate: 0.5,
            quant_bits: 6,
            quant_step: 0.0625,
            noiseless: false,
        }
    }

    #[test]
    fn modulate_examples() {
        let out = modulate(2, &[Gf::ZERO, Gf(2)]);
        assert_eq!(out, vec![1.0, 1.0, 1.0, -1.0]);
        let x = vec![Gf(5); 7];
        assert_eq!(modulate(3, &x).len(), 21);
        assert!(modulate(3, &[Gf::ZERO]).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn quantize_examples() {
        let c = cfg(ChannelKind::Awgn);
        assert_eq!(quantize(&[0.0], &c), vec![0]);
        assert_eq!(quantize(&[1.0], &c), vec![16]);
        assert_eq!(quantize(&[9.0], &c), vec![31]);
        assert_eq!(quantize(&[-9.0], &c), vec![-32]);
    }

    #[test]
    fn quantizer_is_monotone() {
        let c = cfg(ChannelKind::Awgn);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::Rng;
        for _ in 0..1000 {
            let a: f64 = rng.random_range(-4.0..4.0);
            let b: f64 = rng.random_range(-4.0..4.0);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let q = quantize(&[lo, hi], &c);
            assert!(q[0] <= q[1]);
        }
    }

    #[test]
    fn hard_decide_examples() {
        assert!(hard_decide(2, &[0.5, 1.0, 2.0, 0.1]).iter().all(|z| z.is_zero()));
        assert_eq!(hard_decide(2, &[-0.3, 0.8]), vec![Gf(1)]);
        // exact zero decides bit 0
        assert_eq!(hard_decide(1, &[0.0]), vec![Gf(0)]);
    }

    #[test]
    fn noiseless_round_trip() {
        let mut c = cfg(ChannelKind::Awgn);
        c.noiseless = true;
        let x = vec![Gf(3), Gf(0), Gf(2), Gf(1)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let frame = send(2, &x, &c, &mut rng);
        assert_eq!(frame.z, x);
        assert_eq!(frame.y, modulate(2, &x));
    }

    #[test]
    fn empirical_noise_variance_close() {
        let c = cfg(ChannelKind::Awgn);
        let sigma2 = c.noise_sigma() * c.noise_sigma();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 1_000_000usize;
        let ones = vec![1.0f64; n];
        let (y, _) = transmit(&ones, &c, &mut rng);
        let mean: f64 = y.iter().map(|v| v - 1.0).sum::<f64>() / n as f64;
        let var: f64 = y.iter().map(|v| (v - 1.0 - mean) * (v - 1.0 - mean)).sum::<f64>() / n as f64;
        assert!((var - sigma2).abs() / sigma2 < 0.01, "var {var} vs sigma^2 {sigma2}");
    }

    #[test]
    fn unit_fade_equals_awgn_path() {
        let c = cfg(ChannelKind::Awgn);
        let frame = vec![1.0, -1.0, 1.0, 1.0, -1.0];
        let mut rng_a = ChaCha8Rng::seed_from_u64(7);
        let mut rng_b = ChaCha8Rng::seed_from_u64(7);
        let (plain, _) = transmit(&frame, &c, &mut rng_a);
        let forced = faded_awgn(&frame, &c, 1.0, &mut rng_b);
        assert_eq!(plain, forced);
    }

    #[test]
    fn rayleigh_gain_unit_second_moment() {
        let c = cfg(ChannelKind::BlockRayleigh);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut acc = 0.0;
        let trials = 200_000;
        for _ in 0..trials {
            let (_, fade) = transmit(&[1.0], &c, &mut rng);
            let g = fade.unwrap();
            acc += g * g;
        }
        let second_moment = acc / trials as f64;
        assert!((second_moment - 1.0).abs() < 0.01, "E[g^2] = {second_moment}");
    }

    #[test]
    fn deterministic_replay() {
        let c = cfg(ChannelKind::BlockRayleigh);
        let x = vec![Gf(1), Gf(2), Gf(3)];
        let a = send(2, &x, &c, &mut ChaCha8Rng::seed_from_u64(5));
        let b = send(2, &x, &c, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(ChannelKind::Awgn);
        c.quant_bits = 0;
        assert!(c.validate().is_err());
        let mut c = cfg(ChannelKind::Awgn);
        c.quant_step = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg(ChannelKind::Awgn);
        c.code_rate = 1.5;
        assert!(c.validate().is_err());
        assert!(cfg(ChannelKind::Awgn).validate().is_ok());
    }
}
