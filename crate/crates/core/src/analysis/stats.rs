//! Avalanche measurement and a small randomness battery over tag streams:
//! the monobit frequency test and a 2-bit chi-square test.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mac::{dmac, MacKey};
use crate::params::{MacParams, TagMode};

/// Two-sided 0.99 quantile of the standard normal.
pub const MONOBIT_Z_LIMIT: f64 = 2.576;

/// 0.99 quantile of the chi-square distribution with 3 degrees of freedom.
pub const SERIAL_CHI2_LIMIT: f64 = 11.344866730144373;

/// Fewest tags `bit_statistics` accepts.
pub const MIN_SAMPLE_TAGS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct AvalancheReport {
    pub trials: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub tag_bits: usize,
}

impl AvalancheReport {
    /// Whether the mean lies within `k` standard deviations of the
    /// Binomial(h, 1/2) mean, i.e. in `h/2 ± k √h / 2`.
    pub fn within(&self, k: f64) -> bool {
        let h = self.tag_bits as f64;
        (self.mean - h / 2.0).abs() <= k * h.sqrt() / 2.0
    }
}

fn random_message<R: Rng + ?Sized>(params: &MacParams, symbols: usize, rng: &mut R) -> Vec<u64> {
    (0..symbols).map(|_| rng.gen_range(0..params.alphabet())).collect()
}

/// Flips one uniformly chosen message bit per trial and records the Hamming
/// distance between the two tags. Messages are `message_bits` long, rounded
/// up to whole symbols. When the alphabet is not a power of two, flips that
/// leave the alphabet are redrawn.
pub fn avalanche<R: Rng + ?Sized>(
    params: &MacParams,
    key: &MacKey,
    trials: usize,
    message_bits: usize,
    rng: &mut R,
) -> Result<AvalancheReport> {
    if trials == 0 {
        return Err(Error::parameter("avalanche needs at least one trial"));
    }
    key.validate(params)?;
    let l = params.symbol_bits() as usize;
    let symbols = message_bits.div_ceil(l).max(1);
    let mut distances = Vec::with_capacity(trials);
    for _ in 0..trials {
        let message = random_message(params, symbols, rng);
        let mut flipped = message.clone();
        loop {
            let bit = rng.gen_range(0..symbols * l);
            let s = flipped[bit / l] ^ (1 << (l - 1 - bit % l));
            if s < params.alphabet() {
                flipped[bit / l] = s;
                break;
            }
        }
        let a = dmac(&message, key, params)?;
        let b = dmac(&flipped, key, params)?;
        distances.push(a.hamming_distance(&b) as f64);
    }
    let mean = distances.iter().sum::<f64>() / trials as f64;
    let var = distances.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / trials as f64;
    Ok(AvalancheReport {
        trials,
        mean,
        std_dev: var.sqrt(),
        tag_bits: params.tag_bits(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamReport {
    pub bits: usize,
    pub ones: usize,
    /// `|2 ones - bits| / √bits`.
    pub monobit_z: f64,
    pub monobit_pass: bool,
    /// Counts of `00, 01, 10, 11` over non-overlapping pairs.
    pub pair_counts: [usize; 4],
    pub serial_chi2: f64,
    pub serial_pass: bool,
}

impl StreamReport {
    pub fn passed(&self) -> bool {
        self.monobit_pass && self.serial_pass
    }
}

/// Runs both tests on a bit stream at significance 0.01.
pub fn stream_tests(bits: &[bool]) -> StreamReport {
    let total = bits.len();
    let ones = bits.iter().filter(|&&b| b).count();
    let monobit_z = if total == 0 {
        f64::INFINITY
    } else {
        (2.0 * ones as f64 - total as f64).abs() / (total as f64).sqrt()
    };

    let mut pair_counts = [0usize; 4];
    for pair in bits.chunks_exact(2) {
        pair_counts[usize::from(pair[0]) * 2 + usize::from(pair[1])] += 1;
    }
    let pairs = (total / 2) as f64;
    let expected = pairs / 4.0;
    let serial_chi2 = if pairs == 0.0 {
        f64::INFINITY
    } else {
        pair_counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    };

    StreamReport {
        bits: total,
        ones,
        monobit_z,
        monobit_pass: monobit_z <= MONOBIT_Z_LIMIT,
        pair_counts,
        serial_chi2,
        serial_pass: serial_chi2 <= SERIAL_CHI2_LIMIT,
    }
}

#[derive(Clone, Debug)]
pub struct BitStatsReport {
    pub tags: usize,
    pub stream: StreamReport,
    pub warnings: Vec<String>,
    /// The concatenated tags, for export.
    pub bitstream: Vec<bool>,
}

/// Tags `sample_tags` random messages of one block each and tests the
/// concatenated tag bits.
pub fn bit_statistics<R: Rng + ?Sized>(
    params: &MacParams,
    key: &MacKey,
    sample_tags: usize,
    rng: &mut R,
) -> Result<BitStatsReport> {
    if sample_tags < MIN_SAMPLE_TAGS {
        return Err(Error::parameter(format!(
            "{sample_tags} tags is too few; at least {MIN_SAMPLE_TAGS} are needed"
        )));
    }
    key.validate(params)?;
    let mut warnings = Vec::new();
    let q = params.alphabet();
    if params.tag_mode() == TagMode::ModQ && !q.is_power_of_two() {
        warnings.push(format!(
            "tag mode modq with q = {q} (not a power of two) biases tag bits; use modpow2"
        ));
    }
    let symbols = params.symbols_per_block();
    let mut bitstream = Vec::with_capacity(sample_tags * params.tag_bits());
    for _ in 0..sample_tags {
        let tag = dmac(&random_message(params, symbols, rng), key, params)?;
        bitstream.extend(tag.bits());
    }
    Ok(BitStatsReport {
        tags: sample_tags,
        stream: stream_tests(&bitstream),
        warnings,
        bitstream,
    })
}

/// Packs bits MSB-first; a trailing partial byte is zero-filled.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)))
        })
        .collect()
}
