//! Iterative reliability-based majority-logic decoding over GF(2^r).
//!
//! One engine drives five variants that share the same pass structure
//! (syndrome, extrinsic check sums, reliability update, hard decisions):
//!
//! * `Isrb` / `Ihrb`: accumulating update R <- R + psi, soft or hard init.
//! * `Eihrb`: accumulating vote update with per-edge decisions and an
//!   extrinsic recomputation through the second-best decision.
//! * `Iisrb` / `Ieihrb`: the non-accumulating update R <- base + psi, where
//!   base is the (scaled) channel term. Only the current iteration's
//!   check-to-variable messages enter R, which keeps the numerical range
//!   fixed and lets hard decisions look at just the updated entries.
//!
//! The optional re-selection scheme watches for period-1/2 repetitions of the
//! hard decisions, swaps the least confident symbol touching an unsatisfied
//! check to its second-best value, and biases that symbol's base entries.
//!
//! Every countable operation (field add/mul, integer add/compare/mul/div,
//! floor) is tallied into [`OpCounters`]; counting never branches, so enabling
//! it cannot change decode results.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gf::{Field, Gf};
use crate::matrix::ParityCheckMatrix;
use crate::metrics::{FailureClass, OpCounters};

/// Decoding algorithm variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Isrb,
    Ihrb,
    Eihrb,
    Iisrb,
    Ieihrb,
}

impl Variant {
    /// Variants whose update refills R from the channel term every iteration.
    #[inline]
    pub fn is_fresh(self) -> bool {
        matches!(self, Variant::Iisrb | Variant::Ieihrb)
    }

    /// Variants that need quantized soft values at the input.
    #[inline]
    pub fn needs_soft_input(self) -> bool {
        !matches!(self, Variant::Ihrb)
    }

    /// Hard-reliability family (integer vote counts rather than correlations).
    #[inline]
    pub fn is_hard_family(self) -> bool {
        matches!(self, Variant::Ihrb | Variant::Eihrb | Variant::Ieihrb)
    }

    pub fn base_name(self) -> &'static str {
        match self {
            Variant::Isrb => "ISRB",
            Variant::Ihrb => "IHRB",
            Variant::Eihrb => "EIHRB",
            Variant::Iisrb => "IISRB",
            Variant::Ieihrb => "IEIHRB",
        }
    }
}

/// Argmax tie rule. There is exactly one declared rule: the smallest field
/// index wins, for both the maximum and the second maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

/// All tuning parameters; fields unused by a variant are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderConfig {
    pub variant: Variant,
    pub reselection: bool,
    /// Iteration cap I_max.
    pub max_iterations: u32,
    /// ISRB initial scale on the channel correlations.
    pub lambda: i64,
    /// IHRB initial reliability of the hard decision.
    pub lambda_hard: i64,
    /// Fresh-update channel weight.
    pub xi1: i64,
    /// Fresh-update extrinsic weight.
    pub xi2: i64,
    /// Hard-family init divisor.
    pub c1: i64,
    /// Hard-family init ceiling.
    pub c2: i64,
    /// IEIHRB per-vote increment.
    pub c3: i64,
    /// Re-selection bias offset.
    pub zeta: i64,
    /// Optional clipping cap for the accumulating updates.
    pub eta: Option<i64>,
    /// Periodic-point distance threshold (classification only).
    pub theta: usize,
    pub tie_break: TieBreak,
    /// Keep per-iteration hard-decision snapshots.
    pub record_trace: bool,
    /// Keep per-iteration operation-count windows.
    pub record_iteration_counts: bool,
}

impl DecoderConfig {
    /// Defaults tuned per column weight: soft scale 16, fresh weights
    /// (xi1, xi2) = (7,1) for heavy columns down to (4,1) for light ones, and
    /// the matching hard-family (c1, c2, c3, zeta) sets.
    pub fn recommended(variant: Variant, gamma: usize) -> DecoderConfig {
        let xi1 = if gamma >= 10 {
            7
        } else if gamma >= 6 {
            5
        } else {
            4
        };
        let (c1, c2, c3, hard_zeta) = if gamma >= 10 {
            (1, 63, 12, 16)
        } else if gamma >= 6 {
            (11, 63, 2, 32)
        } else {
            (10, 63, 2, 32)
        };
        let (c1, c2) = match variant {
            Variant::Eihrb => (4, 15),
            _ => (c1, c2),
        };
        DecoderConfig {
            variant,
            reselection: false,
            max_iterations: 50,
            lambda: 16,
            lambda_hard: 4,
            xi1,
            xi2: 1,
            c1,
            c2,
            c3,
            zeta: if variant.is_hard_family() { hard_zeta } else { 32 },
            eta: None,
            theta: 8,
            tie_break: TieBreak::LowestIndex,
            record_trace: false,
            record_iteration_counts: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_iterations == 0 {
            return Err(ConfigError::MaxIterationsZero);
        }
        for (name, value) in [
            ("lambda", self.lambda),
            ("lambda_hard", self.lambda_hard),
            ("xi1", self.xi1),
            ("xi2", self.xi2),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("zeta", self.zeta),
        ] {
            if value < 0 {
                return Err(ConfigError::Negative { name, value });
            }
        }
        if self.xi2 < 1 {
            return Err(ConfigError::NotPositive { name: "xi2", value: self.xi2 });
        }
        // scale/divisor parameters the configured variant actually uses
        let used: &[(&'static str, i64)] = match self.variant {
            Variant::Isrb => &[("lambda", self.lambda)],
            Variant::Ihrb => &[("lambda_hard", self.lambda_hard)],
            Variant::Eihrb => &[("c1", self.c1), ("c2", self.c2)],
            Variant::Iisrb => &[("xi1", self.xi1)],
            Variant::Ieihrb => &[("c1", self.c1), ("c2", self.c2), ("c3", self.c3)],
        };
        for &(name, value) in used {
            if value < 1 {
                return Err(ConfigError::NotPositive { name, value });
            }
        }
        if let Some(eta) = self.eta {
            if eta <= 0 {
                return Err(ConfigError::BadEta(eta));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    MaxIterationsZero,
    Negative { name: &'static str, value: i64 },
    NotPositive { name: &'static str, value: i64 },
    BadEta(i64),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::MaxIterationsZero => write!(f, "max_iterations must be at least 1"),
            ConfigError::Negative { name, value } => write!(f, "{name} must be nonnegative, got {value}"),
            ConfigError::NotPositive { name, value } => write!(f, "{name} must be positive, got {value}"),
            ConfigError::BadEta(v) => write!(f, "eta must be positive when set, got {v}"),
        }
    }
}

impl core::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    /// Variant requires quantized soft input.
    NeedsSoftInput(Variant),
    WrongInputLength { expected: usize, got: usize },
    NotAnEdge { row: usize, col: usize },
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::NeedsSoftInput(v) => {
                write!(f, "variant {} needs quantized soft input", v.base_name())
            }
            DecodeError::WrongInputLength { expected, got } => {
                write!(f, "input length {got}, expected {expected}")
            }
            DecodeError::NotAnEdge { row, col } => write!(f, "({row},{col}) is not an edge"),
        }
    }
}

impl core::error::Error for DecodeError {}

/// Frame input: either quantized per-bit channel values (length N*r, bit t of
/// symbol j at index j*r + t) or bare hard decisions (IHRB).
#[derive(Debug, Clone, Copy)]
pub enum DecoderInput<'a> {
    Soft(&'a [i32]),
    Hard(&'a [Gf]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepResult {
    /// Syndrome is zero; current decisions form a codeword.
    Converged,
    /// Iteration cap hit with a nonzero syndrome.
    ReachedMax,
    /// One full iteration ran.
    Continue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeStatus {
    Success,
    Failure(FailureClass),
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Full iterations consumed (0 when the input already satisfied H).
    pub iterations: u32,
    /// Final hard decisions; a codeword exactly when status is Success.
    pub decisions: Vec<Gf>,
    /// z from one and two iterations back, kept on failure for classification.
    pub prev_decisions: Option<Vec<Gf>>,
    pub prev2_decisions: Option<Vec<Gf>>,
    /// Largest |R| observed across the run, including initialization.
    pub peak_reliability: i64,
    pub trace: Option<Vec<Vec<Gf>>>,
}

impl DecodeOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self.status, DecodeStatus::Success)
    }
}

/// Channel correlations phi[j*2^r + l] = sum_t (1 - 2 a_{l,t}) q_{j,t}.
pub fn channel_reliability(r: u32, q: &[i32]) -> Vec<i64> {
    assert_eq!(q.len() % r as usize, 0, "q length must be a multiple of r");
    let n = q.len() / r as usize;
    let order = 1usize << r;
    let mut phi = vec![0i64; n * order];
    for j in 0..n {
        for l in 0..order {
            let mut sum = 0i64;
            for t in 0..r as usize {
                let sign = 1 - 2 * ((l >> t) & 1) as i64;
                sum += sign * q[j * r as usize + t] as i64;
            }
            phi[j * order + l] = sum;
        }
    }
    phi
}

/// Extrinsic check sum through the syndrome shortcut:
/// sigma_{i,j} = h_{i,j}^{-1} s_i + z_j, equal to the direct sum over
/// N(i) \ {j} whenever s is the syndrome of z.
pub fn extrinsic_sigma(
    h: &ParityCheckMatrix,
    s: &[Gf],
    z: &[Gf],
    i: usize,
    j: usize,
) -> Result<Gf, DecodeError> {
    let Some(hij) = h.entry(i, j) else {
        return Err(DecodeError::NotAnEdge { row: i, col: j });
    };
    let inv = h.field().inv(hij).expect("stored entries are nonzero");
    Ok(h.field().mul(inv, s[i]) + z[j])
}

/// Saturation-control rescaling of one reliability row: entries below
/// max - 2*eta collapse to -eta, the rest shift so the new maximum is eta.
pub fn clip_row(row: &mut [i64], eta: i64) {
    debug_assert!(eta > 0);
    let max = row.iter().copied().max().unwrap_or(0);
    let threshold = max - 2 * eta;
    for v in row.iter_mut() {
        *v = if *v < threshold { -eta } else { *v - max + eta };
    }
}

/// Hard decisions from quantized values: bit t of z_j is 1 iff q_{j,t} < 0.
pub fn hard_decisions_from_quantized(r: u32, q: &[i32]) -> Vec<Gf> {
    let n = q.len() / r as usize;
    (0..n)
        .map(|j| {
            let mut v = 0u16;
            for t in 0..r as usize {
                if q[j * r as usize + t] < 0 {
                    v |= 1 << t;
                }
            }
            Gf(v)
        })
        .collect()
}

/// A decoder instance owns its mutable state and is reused across frames;
/// share one matrix among many instances for concurrent decoding.
pub struct Decoder<'a> {
    h: &'a ParityCheckMatrix,
    cfg: DecoderConfig,
    n: usize,
    m: usize,
    q: usize,
    r: u32,

    /// Per-variant iteration base: scaled channel correlations for the soft
    /// updates, the initial reliabilities R0 for the hard family. Re-selection
    /// biases this array.
    base: Vec<i64>,
    reliab: Vec<i64>,
    /// Extrinsic weights per column edge (soft updates and IHRB).
    ext_weight: Vec<i64>,
    /// Smallest-index argmax of each base row; keeps the fresh-update argmax
    /// shortcut exact under the lowest-index tie rule.
    base_best: Vec<u16>,

    z: Vec<Gf>,
    z_next: Vec<Gf>,
    z_prev1: Vec<Gf>,
    z_prev2: Vec<Gf>,
    prev_count: u8,
    synd: Vec<Gf>,

    // EIHRB per-edge state (column-edge indexed)
    z_edge: Vec<Gf>,
    sigma_edge: Vec<Gf>,

    z_tilde: Vec<Gf>,
    touched: Vec<Vec<u16>>,
    psi: Vec<i64>,
    psi_mark: Vec<u64>,
    mark: u64,

    pass: u32,
    started: bool,
    finished: bool,
    peak_reliab: i64,
    trace: Vec<Vec<Gf>>,

    ops: crate::metrics::OpCounts,
    ops_mark: crate::metrics::OpCounts,
    counters: OpCounters,
}

impl<'a> Decoder<'a> {
    pub fn new(h: &'a ParityCheckMatrix, cfg: DecoderConfig) -> Result<Decoder<'a>, ConfigError> {
        cfg.validate()?;
        let n = h.n_cols();
        let m = h.n_rows();
        let q = h.field().order();
        let r = h.field().bits();
        let edges = h.n_edges();
        Ok(Decoder {
            h,
            cfg,
            n,
            m,
            q,
            r,
            base: vec![0; n * q],
            reliab: vec![0; n * q],
            ext_weight: vec![0; edges],
            base_best: vec![0; n],
            z: vec![Gf::ZERO; n],
            z_next: vec![Gf::ZERO; n],
            z_prev1: vec![Gf::ZERO; n],
            z_prev2: vec![Gf::ZERO; n],
            prev_count: 0,
            synd: vec![Gf::ZERO; m],
            z_edge: vec![Gf::ZERO; edges],
            sigma_edge: vec![Gf::ZERO; edges],
            z_tilde: vec![Gf::ZERO; n],
            touched: vec![Vec::new(); n],
            psi: vec![0; q],
            psi_mark: vec![0; q],
            mark: 0,
            pass: 0,
            started: false,
            finished: false,
            peak_reliab: 0,
            trace: Vec::new(),
            ops: Default::default(),
            ops_mark: Default::default(),
            counters: OpCounters::default(),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn matrix(&self) -> &ParityCheckMatrix {
        self.h
    }

    /// Operation tallies of the most recent run.
    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }

    /// Current hard decisions z.
    pub fn hard_decisions(&self) -> &[Gf] {
        &self.z
    }

    /// Reliability matrix R, row-major N x 2^r.
    pub fn reliabilities(&self) -> &[i64] {
        &self.reliab
    }

    /// The iteration base (scaled channel term / initial reliabilities).
    pub fn base_reliabilities(&self) -> &[i64] {
        &self.base
    }

    /// Extrinsic weights per column edge.
    pub fn extrinsic_weights(&self) -> &[i64] {
        &self.ext_weight
    }

    /// Current syndrome (valid after a step).
    pub fn syndrome_view(&self) -> &[Gf] {
        &self.synd
    }

    pub fn iterations_run(&self) -> u32 {
        self.pass
    }

    /// Initialization phase for a new frame.
    pub fn start(&mut self, input: DecoderInput<'_>) -> Result<(), DecodeError> {
        self.counters.reset();
        self.ops = Default::default();
        self.pass = 0;
        self.prev_count = 0;
        self.started = true;
        self.finished = false;
        self.peak_reliab = 0;
        self.trace.clear();
        self.mark = self.mark.wrapping_add(1);
        for t in self.touched.iter_mut() {
            t.clear();
        }

        match input {
            DecoderInput::Soft(q_in) => {
                if q_in.len() != self.n * self.r as usize {
                    return Err(DecodeError::WrongInputLength {
                        expected: self.n * self.r as usize,
                        got: q_in.len(),
                    });
                }
                let z0 = hard_decisions_from_quantized(self.r, q_in);
                self.z.copy_from_slice(&z0);
                if self.cfg.variant == Variant::Ihrb {
                    // soft input is allowed but only the hard decisions enter
                    self.init_hard();
                } else {
                    self.init_soft(q_in);
                }
            }
            DecoderInput::Hard(z_in) => {
                if self.cfg.variant.needs_soft_input() {
                    return Err(DecodeError::NeedsSoftInput(self.cfg.variant));
                }
                if z_in.len() != self.n {
                    return Err(DecodeError::WrongInputLength { expected: self.n, got: z_in.len() });
                }
                self.z.copy_from_slice(z_in);
                self.init_hard();
            }
        }

        if self.cfg.record_trace {
            self.trace.push(self.z.clone());
        }
        self.counters.init = self.ops;
        self.ops_mark = self.ops;
        Ok(())
    }

    /// IHRB: one-hot initial reliabilities, unit extrinsic weights.
    fn init_hard(&mut self) {
        self.base.fill(0);
        for j in 0..self.n {
            self.base[j * self.q + self.z[j].index()] = self.cfg.lambda_hard;
            self.base_best[j] = self.z[j].0;
        }
        self.reliab.copy_from_slice(&self.base);
        self.ext_weight.fill(1);
        self.peak_reliab = self.cfg.lambda_hard;
    }

    fn init_soft(&mut self, q_in: &[i32]) {
        let q = self.q;
        let r = self.r as usize;
        let n = self.n;
        let variant = self.cfg.variant;

        // channel correlations; r integer additions per entry
        let mut max_phi = vec![0i64; n];
        for j in 0..n {
            for l in 0..q {
                let mut sum = 0i64;
                for t in 0..r {
                    let sign = 1 - 2 * ((l >> t) & 1) as i64;
                    sum += sign * q_in[j * r + t] as i64;
                }
                self.ops.ia += r as u64;
                self.base[j * q + l] = sum;
            }
            // max_l phi = phi at the hard decision; known without comparisons
            max_phi[j] = self.base[j * q + self.z[j].index()];
        }

        match variant {
            Variant::Isrb | Variant::Iisrb => {
                let scale = if variant == Variant::Isrb { self.cfg.lambda } else { self.cfg.xi1 };
                for v in self.base.iter_mut() {
                    *v *= scale;
                }
                self.ops.im += (n * q) as u64;
                for j in 0..n {
                    // positive scaling keeps the argmax; the hard decision is
                    // the smallest-index maximizer of the correlation row
                    self.base_best[j] = self.z[j].0;
                }
                self.init_extrinsic_weights(&max_phi);
            }
            Variant::Eihrb | Variant::Ieihrb => {
                let c1 = self.cfg.c1;
                let c2 = self.cfg.c2;
                for j in 0..n {
                    let row = &mut self.base[j * q..(j + 1) * q];
                    for v in row.iter_mut() {
                        *v = v.div_euclid(c1);
                    }
                    self.ops.id += q as u64;
                    self.ops.floor += q as u64;
                    let mut best = 0usize;
                    for l in 1..q {
                        if row[l] > row[best] {
                            best = l;
                        }
                    }
                    self.ops.ic += (q - 1) as u64;
                    self.base_best[j] = best as u16;
                    let shift = c2 - row[best];
                    self.ops.ia += 1;
                    for v in row.iter_mut() {
                        *v += shift;
                        self.ops.ia += 1;
                        self.ops.ic += 1;
                        if *v < 0 {
                            *v = 0;
                        }
                    }
                }
                if variant == Variant::Eihrb {
                    // per-edge decisions start at the channel hard decisions
                    for j in 0..n {
                        for e in self.h.col_edge_range(j) {
                            self.z_edge[e] = self.z[j];
                        }
                    }
                }
            }
            Variant::Ihrb => unreachable!("hard variant initialized via init_hard"),
        }

        self.reliab.copy_from_slice(&self.base);
        self.peak_reliab = self.base.iter().map(|v| v.abs()).max().unwrap_or(0);
    }

    /// phi_{i,j} = min over the other columns of row i of their correlation
    /// maxima; ISRB uses it unscaled, the fresh update pre-scales by xi2.
    fn init_extrinsic_weights(&mut self, max_phi: &[i64]) {
        let scale = if self.cfg.variant == Variant::Iisrb { self.cfg.xi2 } else { 1 };
        for i in 0..self.m {
            let (cols, _) = self.h.row(i);
            for slot in 0..cols.len() {
                let mut min_other = i64::MAX;
                let mut first = true;
                for (other_slot, &tc) in cols.iter().enumerate() {
                    if other_slot == slot {
                        continue;
                    }
                    let candidate = max_phi[tc as usize];
                    if first {
                        min_other = candidate;
                        first = false;
                    } else {
                        self.ops.ic += 1;
                        if candidate < min_other {
                            min_other = candidate;
                        }
                    }
                }
                if first {
                    // degenerate weight-1 row has no extrinsic information
                    min_other = 0;
                }
                let row_edge = self.h.row_edge_range(i).start + slot;
                let ce = self.h.col_edge_of_row_edge(row_edge);
                self.ext_weight[ce] = scale * min_other;
                if self.cfg.variant == Variant::Iisrb {
                    self.ops.im += 1;
                }
            }
        }
    }

    /// One pass: syndrome, convergence / cap check, optional re-selection,
    /// then the variant's update. Counts the pass into the iteration window.
    pub fn step(&mut self) -> StepResult {
        assert!(self.started && !self.finished, "decoder not mid-run; call start()");

        self.compute_syndrome();
        if self.synd.iter().all(|s| s.is_zero()) {
            self.counters.final_check = self.ops.diff(&self.ops_mark);
            self.finished = true;
            return StepResult::Converged;
        }
        if self.pass == self.cfg.max_iterations {
            self.counters.final_check = self.ops.diff(&self.ops_mark);
            self.finished = true;
            return StepResult::ReachedMax;
        }

        if self.cfg.reselection {
            self.reselect_if_periodic();
        }

        match self.cfg.variant {
            Variant::Eihrb => self.update_eihrb(),
            _ => self.update_column_major(),
        }

        // history shift: prev2 <- prev1 <- z^(k) (as possibly re-selected),
        // current <- the fresh decisions
        core::mem::swap(&mut self.z_prev2, &mut self.z_prev1);
        core::mem::swap(&mut self.z_prev1, &mut self.z);
        core::mem::swap(&mut self.z, &mut self.z_next);
        if self.prev_count < 2 {
            self.prev_count += 1;
        }

        self.pass += 1;
        if self.cfg.record_trace {
            self.trace.push(self.z.clone());
        }
        let window = self.ops.diff(&self.ops_mark);
        self.counters.iteration_sum.add(&window);
        self.counters.iterations += 1;
        if self.cfg.record_iteration_counts {
            self.counters.per_iteration.push(window);
        }
        self.ops_mark = self.ops;
        StepResult::Continue
    }

    /// Full decode loop; the outcome's decisions are a codeword iff Success.
    pub fn decode(&mut self, input: DecoderInput<'_>) -> Result<DecodeOutcome, DecodeError> {
        self.start(input)?;
        loop {
            match self.step() {
                StepResult::Continue => {}
                StepResult::Converged => {
                    return Ok(DecodeOutcome {
                        status: DecodeStatus::Success,
                        iterations: self.pass,
                        decisions: self.z.clone(),
                        prev_decisions: None,
                        prev2_decisions: None,
                        peak_reliability: self.peak_reliab,
                        trace: self.take_trace(),
                    });
                }
                StepResult::ReachedMax => {
                    let prev1 = (self.prev_count >= 1).then(|| self.z_prev1.clone());
                    let prev2 = (self.prev_count >= 2).then(|| self.z_prev2.clone());
                    let class = if prev1.as_deref() == Some(&self.z[..]) {
                        FailureClass::Period1
                    } else if prev2.as_deref() == Some(&self.z[..]) {
                        FailureClass::Period2
                    } else {
                        FailureClass::Other
                    };
                    return Ok(DecodeOutcome {
                        status: DecodeStatus::Failure(class),
                        iterations: self.pass,
                        decisions: self.z.clone(),
                        prev_decisions: prev1,
                        prev2_decisions: prev2,
                        peak_reliability: self.peak_reliab,
                        trace: self.take_trace(),
                    });
                }
            }
        }
    }

    fn take_trace(&mut self) -> Option<Vec<Vec<Gf>>> {
        if self.cfg.record_trace {
            Some(core::mem::take(&mut self.trace))
        } else {
            None
        }
    }

    /// s = H z^T; rho FMs and rho-1 FAs per row.
    fn compute_syndrome(&mut self) {
        let h = self.h;
        let field = h.field();
        for i in 0..self.m {
            let (cols, vals) = h.row(i);
            let mut s = Gf::ZERO;
            for (slot, (&jc, &hv)) in cols.iter().zip(vals).enumerate() {
                let term = field.mul(hv, self.z[jc as usize]);
                self.ops.fm += 1;
                if slot == 0 {
                    s = term;
                } else {
                    s += term;
                    self.ops.fa += 1;
                }
            }
            self.synd[i] = s;
        }
    }

    /// Shared update for ISRB/IHRB (accumulate) and IISRB/IEIHRB (fresh).
    /// Extrinsic sums come from the syndrome shortcut: one FM and one FA per
    /// edge on top of the syndrome itself.
    fn update_column_major(&mut self) {
        let h = self.h;
        let field = h.field();
        let q = self.q;
        let fresh = self.cfg.variant.is_fresh();
        let vote_weight_is_c3 = self.cfg.variant == Variant::Ieihrb;

        for j in 0..self.n {
            let row_base = j * q;
            if fresh {
                for &l in &self.touched[j] {
                    self.reliab[row_base + l as usize] = self.base[row_base + l as usize];
                }
            }
            self.touched[j].clear();
            self.mark = self.mark.wrapping_add(1);

            let (rows, _vals, invs) = h.col(j);
            let edge_start = h.col_edge_range(j).start;
            for (slot, (&irow, &inv_h)) in rows.iter().zip(invs).enumerate() {
                let sigma = field.mul(inv_h, self.synd[irow as usize]) + self.z[j];
                self.ops.fm += 1;
                self.ops.fa += 1;
                let w = if vote_weight_is_c3 {
                    self.cfg.c3
                } else {
                    self.ext_weight[edge_start + slot]
                };
                let bucket = sigma.index();
                if self.psi_mark[bucket] != self.mark {
                    self.psi_mark[bucket] = self.mark;
                    self.psi[bucket] = w;
                    self.touched[j].push(bucket as u16);
                } else {
                    self.psi[bucket] += w;
                    self.ops.ia += 1;
                }
            }

            if fresh {
                for t in 0..self.touched[j].len() {
                    let l = self.touched[j][t] as usize;
                    let v = self.base[row_base + l] + self.psi[l];
                    self.ops.ia += 1;
                    self.reliab[row_base + l] = v;
                    if v.abs() > self.peak_reliab {
                        self.peak_reliab = v.abs();
                    }
                }
                self.z_next[j] = self.argmax_fresh(j);
            } else {
                for t in 0..self.touched[j].len() {
                    let l = self.touched[j][t] as usize;
                    self.reliab[row_base + l] += self.psi[l];
                    self.ops.ia += 1;
                    let v = self.reliab[row_base + l];
                    if v.abs() > self.peak_reliab {
                        self.peak_reliab = v.abs();
                    }
                }
                let row = &mut self.reliab[row_base..row_base + q];
                let mut best = 0usize;
                for l in 1..q {
                    if row[l] > row[best] {
                        best = l;
                    }
                }
                self.ops.ic += (q - 1) as u64;
                if let Some(eta) = self.cfg.eta {
                    let max = row[best];
                    let threshold = max - 2 * eta;
                    let offset = eta - max;
                    self.ops.ia += 2;
                    for v in row.iter_mut() {
                        self.ops.ic += 1;
                        if *v < threshold {
                            *v = -eta;
                        } else {
                            *v += offset;
                            self.ops.ia += 1;
                        }
                    }
                }
                self.z_next[j] = Gf(best as u16);
            }
        }
    }

    /// Fresh-update hard decision: the maximum of R = base + psi lives among
    /// the updated entries plus the base row's smallest-index maximizer, and
    /// scanning exactly those preserves the lowest-index tie rule.
    fn argmax_fresh(&mut self, j: usize) -> Gf {
        let row_base = j * self.q;
        let mut best_l = usize::MAX;
        let mut best_v = i64::MIN;
        let mut candidates = 0u64;
        for &l in &self.touched[j] {
            let l = l as usize;
            let v = self.reliab[row_base + l];
            candidates += 1;
            if v > best_v || (v == best_v && l < best_l) {
                best_v = v;
                best_l = l;
            }
        }
        // the base maximizer is the last candidate, so best_v needs no update
        let bb = self.base_best[j] as usize;
        if self.psi_mark[bb] != self.mark {
            let v = self.reliab[row_base + bb];
            candidates += 1;
            if v > best_v || (v == best_v && bb < best_l) {
                best_l = bb;
            }
        }
        self.ops.ic += candidates.saturating_sub(1);
        Gf(best_l as u16)
    }

    /// EIHRB pass: row sweep forms per-edge sums over the edge decisions and
    /// votes, column sweep takes the top two reliabilities and recomputes the
    /// edge decisions through the second-best rule.
    fn update_eihrb(&mut self) {
        let h = self.h;
        let field = h.field();
        let q = self.q;

        for i in 0..self.m {
            let (cols, vals) = h.row(i);
            let edge_range = h.row_edge_range(i);
            // t_i = sum over the row of h * z_edge
            let mut total = Gf::ZERO;
            for (slot, (&_jc, &hv)) in cols.iter().zip(vals).enumerate() {
                let ce = h.col_edge_of_row_edge(edge_range.start + slot);
                let term = field.mul(hv, self.z_edge[ce]);
                self.ops.fm += 1;
                if slot == 0 {
                    total = term;
                } else {
                    total += term;
                    self.ops.fa += 1;
                }
            }
            for (slot, &col) in cols.iter().enumerate() {
                let row_edge = edge_range.start + slot;
                let ce = h.col_edge_of_row_edge(row_edge);
                let inv = h.inv_of_col_edge(ce);
                let sigma = field.mul(inv, total) + self.z_edge[ce];
                self.ops.fm += 1;
                self.ops.fa += 1;
                self.sigma_edge[ce] = sigma;
                let cell = col as usize * q + sigma.index();
                self.reliab[cell] += 1;
                self.ops.ia += 1;
                if self.reliab[cell] > self.peak_reliab {
                    self.peak_reliab = self.reliab[cell];
                }
            }
        }

        for j in 0..self.n {
            let row = &self.reliab[j * q..(j + 1) * q];
            let mut best = 0usize;
            let mut best_v = row[0];
            let mut second = usize::MAX;
            let mut second_v = i64::MIN;
            for (l, &v) in row.iter().enumerate().skip(1) {
                if v > best_v {
                    second = best;
                    second_v = best_v;
                    best = l;
                    best_v = v;
                } else if v > second_v {
                    second = l;
                    second_v = v;
                }
            }
            // top-two scan at the published cost: (q-1) + (q-2) comparisons
            self.ops.ic += (2 * q - 3) as u64;
            self.z_next[j] = Gf(best as u16);
            let z_prime = Gf(second as u16);

            for ce in h.col_edge_range(j) {
                self.ops.ic += 1;
                self.z_edge[ce] = if eihrb_second_best_vote(self.sigma_edge[ce], self.z_next[j], best_v, second_v) {
                    z_prime
                } else {
                    self.z_next[j]
                };
            }
        }
    }

    /// Periodic-point handling: when the current decisions equal those from
    /// one or two iterations back, swap the least confident symbol adjacent to
    /// an unsatisfied check to its second-best value, bias its base entries by
    /// +/- zeta, and patch the affected syndrome entries incrementally.
    fn reselect_if_periodic(&mut self) {
        let period1 = self.prev_count >= 1 && {
            self.ops.ic += self.n as u64;
            self.z == self.z_prev1
        };
        let period2 = !period1 && self.prev_count >= 2 && {
            self.ops.ic += self.n as u64;
            self.z == self.z_prev2
        };
        if !(period1 || period2) {
            return;
        }

        let q = self.q;
        // second-best decisions, full scan excluding the current choice
        for j in 0..self.n {
            let row = &self.reliab[j * q..(j + 1) * q];
            let skip = self.z[j].index();
            let mut best = usize::MAX;
            let mut best_v = i64::MIN;
            let mut first = true;
            for (l, &v) in row.iter().enumerate() {
                if l == skip {
                    continue;
                }
                if first {
                    best = l;
                    best_v = v;
                    first = false;
                } else {
                    self.ops.ic += 1;
                    if v > best_v {
                        best = l;
                        best_v = v;
                    }
                }
            }
            self.z_tilde[j] = Gf(best as u16);
        }

        // least confident symbol among those touching unsatisfied checks;
        // strict < keeps the first index on ties
        let mut chosen: Option<(i64, usize)> = None;
        for j in 0..self.n {
            let (rows, _, _) = self.h.col(j);
            let mut unsatisfied = 0u32;
            for &i in rows {
                self.ops.ic += 1;
                if !self.synd[i as usize].is_zero() {
                    unsatisfied += 1;
                    self.ops.ia += 1;
                }
            }
            self.ops.ic += 1;
            if unsatisfied == 0 {
                continue;
            }
            let diff = self.reliab[j * q + self.z[j].index()] - self.reliab[j * q + self.z_tilde[j].index()];
            self.ops.ia += 1;
            self.ops.ic += 1;
            if chosen.is_none_or(|(best_diff, _)| diff < best_diff) {
                chosen = Some((diff, j));
            }
        }
        let Some((_, rs_n)) = chosen else {
            // cannot happen while the syndrome is nonzero
            debug_assert!(false, "nonzero syndrome without adjacent columns");
            return;
        };

        let old = self.z[rs_n];
        let new = self.z_tilde[rs_n];
        self.base[rs_n * q + old.index()] -= self.cfg.zeta;
        self.base[rs_n * q + new.index()] += self.cfg.zeta;
        self.ops.ia += 2;
        if self.cfg.variant.is_fresh() {
            // keep the derived view R = base + psi and the cached base argmax
            // consistent with the biased base row
            for l in [old.index(), new.index()] {
                if !self.touched[rs_n].contains(&(l as u16)) {
                    self.reliab[rs_n * q + l] = self.base[rs_n * q + l];
                }
            }
            let row = &self.base[rs_n * q..(rs_n + 1) * q];
            let mut best = 0usize;
            for l in 1..q {
                if row[l] > row[best] {
                    best = l;
                }
            }
            self.ops.ic += (q - 1) as u64;
            self.base_best[rs_n] = best as u16;
        }
        self.z[rs_n] = new;

        // gamma syndrome entries change; patch them with h * (old + new)
        let field = self.h.field();
        let (rows, vals, _) = self.h.col(rs_n);
        for (&i, &hv) in rows.iter().zip(vals) {
            let delta = old + new;
            self.ops.fa += 1;
            let term = field.mul(hv, delta);
            self.ops.fm += 1;
            self.synd[i as usize] += term;
            self.ops.fa += 1;
        }
    }
}

/// The edge-decision condition of the enhanced hard update, isolated because
/// its published form parses two ways; the reading here demotes a check's
/// edge decision to the second-best value when that check voted for the
/// winner and the winning margin is at most one vote.
#[inline]
fn eihrb_second_best_vote(sigma: Gf, z_new: Gf, r_max: i64, r_second: i64) -> bool {
    sigma == z_new && r_max <= r_second + 1
}
