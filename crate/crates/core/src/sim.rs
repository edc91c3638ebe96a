//! Monte Carlo simulation of sifting, the CAD block protocol and Eve's
//! coherent block attack.
//!
//! Eve's case-I outcome is drawn from the closed-form square-root-measurement
//! distribution `(eta0, eta1, ..., eta1)` instead of simulating the
//! measurement on state vectors. For this equi-overlap family that
//! distribution is fixed by `lambda^L` alone, and [`crate::srm`] certifies the
//! closed form independently.
//!
//! Randomness: block `i` draws from a ChaCha8 stream seeded with `seed` and
//! stream id `i`, so a run is bit-identical regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::distill::{eve_guess_probs, EveStats};
use crate::error::{Error, Result};

/// One raw-key symbol, a value in `0..n`.
pub type Nit = u32;

/// Blocks per parallel work item.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ChannelParams,
    pub block_length: usize,
    pub n_blocks: usize,
    pub seed: u64,
    /// Draw bases for both parties among `n + 1` and keep matched pairs only.
    pub simulate_sifting: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_length < 1 {
            return Err(Error::BlockLength {
                min: 1,
                got: self.block_length,
            });
        }
        if self.n_blocks < 1 {
            return Err(Error::NoBlocks);
        }
        Ok(())
    }
}

/// Bob's verdict on an announced block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Constant difference; carries Bob's distilled value.
    Good(Nit),
    Bad,
}

/// Ground-truth relation between Alice's and Bob's raw blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockClass {
    /// Identical blocks.
    CaseI,
    /// Bob's block is Alice's shifted by the given nonzero amount mod `n`.
    CaseII(Nit),
    Bad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOutcome {
    Bad {
        addend: Nit,
    },
    Good {
        /// Alice's distilled value (her random addend).
        addend: Nit,
        bob_distilled: Nit,
        case: BlockClass,
        eve_guess: Nit,
    },
}

/// Row-major table of joint counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

impl ContingencyTable {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            counts: vec![0; rows * cols],
        }
    }

    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::TableShape {
                rows,
                cols,
                len: counts.len(),
            });
        }
        Ok(Self { rows, cols, counts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn increment(&mut self, row: usize, col: usize) {
        self.counts[row * self.cols + col] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Cell-wise sum of two tables of equal shape.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let counts = self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect();
        Self { counts, ..*self }
    }

    /// Columns of `other` appended to the right of `self`.
    pub fn hconcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut counts = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            counts.extend_from_slice(&self.counts[r * self.cols..(r + 1) * self.cols]);
            counts.extend_from_slice(&other.counts[r * other.cols..(r + 1) * other.cols]);
        }
        Self {
            rows: self.rows,
            cols,
            counts,
        }
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub accepted: u64,
    pub rejected: u64,
    pub case1: u64,
    /// Counts over (Alice's distilled value, Bob's distilled value).
    pub joint_ab: ContingencyTable,
    /// Counts over (Alice's distilled value, Eve's guess) for case-I blocks.
    pub joint_ae_case1: ContingencyTable,
    /// Same for case-II blocks.
    pub joint_ae_case2: ContingencyTable,
    /// Matched-basis pairs consumed by the blocks.
    pub sifted_pairs: u64,
    /// Raw pairs distributed, including those discarded by sifting.
    pub raw_pairs: u64,
    pub p_accept: f64,
    pub beta0l: f64,
    pub i_ab_hat: f64,
    /// Plug-in information between Alice and Eve's (guess, case) observation.
    pub i_ae_hat: f64,
}

impl SimResult {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    /// Counts over (Alice's distilled value, Eve's guess), all good blocks.
    pub fn joint_ae(&self) -> ContingencyTable {
        self.joint_ae_case1.add(&self.joint_ae_case2)
    }

    pub fn sift_rate(&self) -> f64 {
        self.sifted_pairs as f64 / self.raw_pairs as f64
    }
}

fn check_nits(values: &[Nit], n: usize) -> Result<()> {
    match values.iter().find(|&&v| v as usize >= n) {
        Some(&value) => Err(Error::NitRange { value, n }),
        None => Ok(()),
    }
}

fn check_pair(a: &[Nit], b: &[Nit], n: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyBlock);
    }
    check_nits(a, n)?;
    check_nits(b, n)
}

fn sub_mod(a: Nit, b: Nit, n: usize) -> Nit {
    ((a as usize + n - b as usize) % n) as Nit
}

/// Draws one matched-basis pair: Alice uniform, Bob equal with probability
/// `beta0`, otherwise uniform over the other `n - 1` values.
fn draw_pair<R: Rng>(params: &ChannelParams, rng: &mut R) -> (Nit, Nit) {
    let n = params.n() as Nit;
    let alice = rng.random_range(0..n);
    let bob = if rng.random::<f64>() < params.beta0() {
        alice
    } else {
        (alice + 1 + rng.random_range(0..n - 1)) % n
    };
    (alice, bob)
}

/// Draws basis choices until they match; returns the number of raw pairs used.
fn sift<R: Rng>(n: usize, rng: &mut R) -> u64 {
    let bases = n as u32 + 1;
    let mut used = 1;
    while rng.random_range(0..bases) != rng.random_range(0..bases) {
        used += 1;
    }
    used
}

/// Matched-basis raw key of `length` pairs, deterministic in `seed`.
pub fn sample_sifted_key(params: &ChannelParams, length: usize, seed: u64) -> (Vec<Nit>, Vec<Nit>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..length).map(|_| draw_pair(params, &mut rng)).unzip()
}

/// Alice's announced block: each value shifted by `addend` mod `n`.
pub fn cad_encode(block: &[Nit], addend: Nit, n: usize) -> Result<Vec<Nit>> {
    check_nits(block, n)?;
    check_nits(&[addend], n)?;
    Ok(block
        .iter()
        .map(|&v| ((v as usize + addend as usize) % n) as Nit)
        .collect())
}

/// Bob subtracts his block from the announcement and accepts if the
/// difference is constant.
pub fn cad_decide(announced: &[Nit], bob: &[Nit], n: usize) -> Result<Decision> {
    check_pair(announced, bob, n)?;
    Ok(constant_difference(announced, bob, n).map_or(Decision::Bad, Decision::Good))
}

fn constant_difference(a: &[Nit], b: &[Nit], n: usize) -> Option<Nit> {
    let d = sub_mod(a[0], b[0], n);
    a.iter()
        .zip(b)
        .all(|(&x, &y)| sub_mod(x, y, n) == d)
        .then_some(d)
}

/// Ground-truth case of a raw block pair.
pub fn classify_block(alice: &[Nit], bob: &[Nit], n: usize) -> Result<BlockClass> {
    check_pair(alice, bob, n)?;
    Ok(match constant_difference(bob, alice, n) {
        Some(0) => BlockClass::CaseI,
        Some(d) => BlockClass::CaseII(d),
        None => BlockClass::Bad,
    })
}

/// The `n` raw blocks consistent with an announcement, each paired with the
/// distilled value it implies.
pub fn eve_candidates(announced: &[Nit], n: usize) -> Result<Vec<(Vec<Nit>, Nit)>> {
    check_nits(announced, n)?;
    Ok((0..n as Nit)
        .map(|v| (announced.iter().map(|&a| sub_mod(a, v, n)).collect(), v))
        .collect())
}

/// Eve's guess of Alice's distilled value for a good block.
pub fn sample_eve_guess<R: Rng>(
    case: BlockClass,
    alice_distilled: Nit,
    eve: &EveStats,
    rng: &mut R,
) -> Result<Nit> {
    match case {
        BlockClass::Bad => Err(Error::BadBlock),
        BlockClass::CaseII(_) => Ok(alice_distilled),
        BlockClass::CaseI => {
            let n = eve.n as Nit;
            if rng.random::<f64>() < eve.eta0 {
                Ok(alice_distilled)
            } else {
                Ok((alice_distilled + 1 + rng.random_range(0..n - 1)) % n)
            }
        }
    }
}

/// Maximum-likelihood plug-in mutual information of a count table, measured
/// with base-`base` logarithms. No bias correction.
pub fn plugin_mutual_information(table: &ContingencyTable, base: usize) -> Result<f64> {
    let total = table.total();
    if total == 0 {
        return Err(Error::EmptyTable);
    }
    let t = total as f64;
    let row_sums: Vec<u64> = (0..table.rows())
        .map(|r| (0..table.cols()).map(|c| table.get(r, c)).sum())
        .collect();
    let col_sums: Vec<u64> = (0..table.cols())
        .map(|c| (0..table.rows()).map(|r| table.get(r, c)).sum())
        .collect();
    let mut mi = 0.0;
    for (r, &rs) in row_sums.iter().enumerate() {
        for (c, &cs) in col_sums.iter().enumerate() {
            let k = table.get(r, c);
            if k == 0 {
                continue;
            }
            let p = k as f64 / t;
            mi += p * (k as f64 * t / (rs as f64 * cs as f64)).ln();
        }
    }
    Ok((mi / (base as f64).ln()).max(0.0))
}

/// Noise estimate from a matched-basis sample: mismatch rate `f` mapped to
/// `f n / (n - 1)`, clamped to [0, 1].
pub fn estimate_noise(alice: &[Nit], bob: &[Nit], n: usize) -> Result<f64> {
    check_pair(alice, bob, n)?;
    let mismatches = alice.iter().zip(bob).filter(|(a, b)| a != b).count();
    let f = mismatches as f64 / alice.len() as f64;
    Ok((f * n as f64 / (n as f64 - 1.0)).clamp(0.0, 1.0))
}

/// Simulates one raw block through CAD and the attack.
fn simulate_block<R: Rng>(
    config: &SimConfig,
    eve: &EveStats,
    rng: &mut R,
    alice: &mut Vec<Nit>,
    bob: &mut Vec<Nit>,
) -> (BlockOutcome, u64) {
    let params = &config.params;
    let n = params.n();
    alice.clear();
    bob.clear();
    let mut raw = 0;
    for _ in 0..config.block_length {
        if config.simulate_sifting {
            raw += sift(n, rng);
        } else {
            raw += 1;
        }
        let (a, b) = draw_pair(params, rng);
        alice.push(a);
        bob.push(b);
    }
    let addend = rng.random_range(0..n as Nit);
    // Inputs are generated in range, so the checked operations cannot fail.
    let announced = cad_encode(alice, addend, n).expect("nits in range");
    let outcome = match cad_decide(&announced, bob, n).expect("equal lengths") {
        Decision::Bad => BlockOutcome::Bad { addend },
        Decision::Good(bob_distilled) => {
            let case = classify_block(alice, bob, n).expect("equal lengths");
            let eve_guess = sample_eve_guess(case, addend, eve, rng).expect("good block");
            BlockOutcome::Good {
                addend,
                bob_distilled,
                case,
                eve_guess,
            }
        }
    };
    (outcome, raw)
}

/// Per-chunk accumulator; merging is plain integer addition.
#[derive(Clone)]
struct Tally {
    accepted: u64,
    rejected: u64,
    case1: u64,
    raw_pairs: u64,
    joint_ab: ContingencyTable,
    joint_ae_case1: ContingencyTable,
    joint_ae_case2: ContingencyTable,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            accepted: 0,
            rejected: 0,
            case1: 0,
            raw_pairs: 0,
            joint_ab: ContingencyTable::zeros(n, n),
            joint_ae_case1: ContingencyTable::zeros(n, n),
            joint_ae_case2: ContingencyTable::zeros(n, n),
        }
    }

    fn record(&mut self, outcome: BlockOutcome, raw: u64) {
        self.raw_pairs += raw;
        match outcome {
            BlockOutcome::Bad { .. } => self.rejected += 1,
            BlockOutcome::Good {
                addend,
                bob_distilled,
                case,
                eve_guess,
            } => {
                self.accepted += 1;
                let a = addend as usize;
                self.joint_ab.increment(a, bob_distilled as usize);
                if case == BlockClass::CaseI {
                    self.case1 += 1;
                    self.joint_ae_case1.increment(a, eve_guess as usize);
                } else {
                    self.joint_ae_case2.increment(a, eve_guess as usize);
                }
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.case1 += other.case1;
        self.raw_pairs += other.raw_pairs;
        self.joint_ab.merge(&other.joint_ab);
        self.joint_ae_case1.merge(&other.joint_ae_case1);
        self.joint_ae_case2.merge(&other.joint_ae_case2);
        self
    }
}

/// RNG for block `index` of a run seeded with `seed`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs the full CAD experiment and returns empirical counterparts of the
/// analytic quantities.
pub fn run_cad_experiment(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let n = config.params.n();
    let eve = eve_guess_probs(&config.params, config.block_length)?;
    let chunks = config.n_blocks.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut tally = Tally::new(n);
            let mut alice = Vec::with_capacity(config.block_length);
            let mut bob = Vec::with_capacity(config.block_length);
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(config.n_blocks);
            for index in start..end {
                let mut rng = block_rng(config.seed, index as u64);
                let (outcome, raw) = simulate_block(config, &eve, &mut rng, &mut alice, &mut bob);
                tally.record(outcome, raw);
            }
            tally
        })
        .reduce(|| Tally::new(n), Tally::merge);

    let (i_ab_hat, i_ae_hat, beta0l) = if tally.accepted > 0 {
        let eve_view = tally.joint_ae_case1.hconcat(&tally.joint_ae_case2);
        (
            plugin_mutual_information(&tally.joint_ab, n)?,
            plugin_mutual_information(&eve_view, n)?,
            tally.case1 as f64 / tally.accepted as f64,
        )
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(SimResult {
        config: *config,
        accepted: tally.accepted,
        rejected: tally.rejected,
        case1: tally.case1,
        sifted_pairs: (config.n_blocks * config.block_length) as u64,
        raw_pairs: tally.raw_pairs,
        p_accept: tally.accepted as f64 / config.n_blocks as f64,
        beta0l,
        i_ab_hat,
        i_ae_hat,
        joint_ab: tally.joint_ab,
        joint_ae_case1: tally.joint_ae_case1,
        joint_ae_case2: tally.joint_ae_case2,
    })
}
