//! Field-operation counts of a walk against the closed-form per-bit costs
//! `(2n+2)/N (1 + s/l(M))` (DMAC-1) and `(3n+2)/N (1 + s/l(M))` (DMAC-2).

use crate::error::Result;
use crate::mac::{block_directions, run, MacKey};
use crate::ops::OpTally;
use crate::params::{MacParams, Variant};

/// Field operations per walk step.
pub fn ops_per_step(variant: Variant, n: usize) -> u64 {
    let n = n as u64;
    match variant {
        Variant::Dmac1 => 2 * n + 2,
        Variant::Dmac2 => 3 * n + 2,
    }
}

/// Predicted operations per input bit for `blocks` message blocks of
/// `block_bits` bits and a password of length `password_len`.
pub fn formula_per_bit(variant: Variant, n: usize, block_bits: u32, blocks: usize, password_len: usize) -> f64 {
    ops_per_step(variant, n) as f64 / f64::from(block_bits)
        * (1.0 + password_len as f64 / blocks as f64)
}

/// [`formula_per_bit`] plus the final reduction of the `n` tag coordinates,
/// spread over the input.
pub fn per_bit_with_tag_reduction(
    variant: Variant,
    n: usize,
    block_bits: u32,
    blocks: usize,
    password_len: usize,
) -> f64 {
    formula_per_bit(variant, n, block_bits, blocks, password_len)
        + n as f64 / (f64::from(block_bits) * blocks as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpCountReport {
    pub tally: OpTally,
    /// All counted operations.
    pub measured: u64,
    /// `(ops per step) (l(M) + s)`.
    pub predicted: u64,
    /// `l(M)`, including a length block if the padding adds one.
    pub blocks: usize,
    pub password_len: usize,
    pub block_bits: u32,
    pub n: usize,
    pub variant: Variant,
}

impl OpCountReport {
    /// Measured operations per message bit; `None` for an empty message.
    pub fn measured_per_bit(&self) -> Option<f64> {
        (self.blocks > 0).then(|| self.measured as f64 / (f64::from(self.block_bits) * self.blocks as f64))
    }

    pub fn formula_per_bit(&self) -> Option<f64> {
        (self.blocks > 0).then(|| {
            formula_per_bit(self.variant, self.n, self.block_bits, self.blocks, self.password_len)
        })
    }

    pub fn matches_formula(&self) -> bool {
        self.measured == self.predicted
    }
}

/// Tags `message` with an instrumented walk.
pub fn count_ops(message: &[u64], key: &MacKey, params: &MacParams) -> Result<OpCountReport> {
    let dirs = block_directions(message, params)?;
    count_ops_blocks(&dirs, key, params)
}

/// Like [`count_ops`] for explicit block values.
pub fn count_ops_blocks(blocks: &[u64], key: &MacKey, params: &MacParams) -> Result<OpCountReport> {
    let mut tally = OpTally::default();
    run(blocks, key, params, &mut tally, None)?;
    let steps = (blocks.len() + key.password().len()) as u64;
    Ok(OpCountReport {
        tally,
        measured: tally.total(),
        predicted: ops_per_step(params.variant(), params.n()) * steps,
        blocks: blocks.len(),
        password_len: key.password().len(),
        block_bits: params.block_bits(),
        n: params.n(),
        variant: params.variant(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_block_dmac1() {
        let p = MacParams::new(29, 25, 3, 33554467, 15).unwrap().with_variant(Variant::Dmac1);
        let key = MacKey::new(vec![5, 10, 27], vec![]);
        let r = count_ops_blocks(&[28140], &key, &p).unwrap();
        assert_eq!(r.measured, 8);
        assert!(r.matches_formula());
        assert_eq!(r.tally.muls, 1 + 2);
    }

    #[test]
    fn per_bit_decreases_with_length() {
        let short = formula_per_bit(Variant::Dmac2, 32, 32, 100, 10);
        let long = formula_per_bit(Variant::Dmac2, 32, 32, 200, 10);
        assert!(long < short);
    }

    #[test]
    fn empty_message_has_no_per_bit_cost() {
        let p = MacParams::default_profile();
        let key = MacKey::new((1..=32).collect(), vec![3]);
        let r = count_ops(&[], &key, &p).unwrap();
        assert_eq!(r.measured_per_bit(), None);
        assert_eq!(r.measured, 3 * 32 + 2);
    }
}
