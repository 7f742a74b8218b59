//! DMAC-1 and DMAC-2.
//!
//! The message is split into blocks of `c = N / l(q)` symbols, each block is
//! encoded as an integer `M_i`, and the walk starts at the secret point `IV`.
//! Step `i` moves from `v_i` to the neighbor whose first coordinate is
//! `(v_i[(i mod n) + 1] + M_i)^2 mod Q`. DMAC-2 additionally replaces the new
//! vertex by its coordinatewise sum with the previous one. After the message,
//! the secret password symbols are absorbed the same way, and the tag is read
//! off the final coordinates.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::sample_uniform;
use crate::graph::{GraphParams, Vertex, VertexKind};
use crate::ops::OpCounter;
use crate::params::{Encoding, MacParams, Padding, TagMode, Variant};

/// The secret pair `(IV, S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacKey {
    iv: Vertex,
    password: Vec<u64>,
}

impl MacKey {
    pub fn new(iv: Vec<u64>, password: Vec<u64>) -> Self {
        Self {
            iv: Vertex::point(iv),
            password,
        }
    }

    pub fn iv(&self) -> &Vertex {
        &self.iv
    }

    pub fn password(&self) -> &[u64] {
        &self.password
    }

    /// Checks the key against a profile: `n` IV coordinates below `Q`,
    /// password symbols below `q`, and `s <= g(D(n, Q)) / 2`.
    pub fn validate(&self, params: &MacParams) -> Result<()> {
        params.graph().check_vertex(&self.iv)?;
        if self.password.len() > params.max_password_len() {
            return Err(Error::parameter(format!(
                "password length s = {} violates s <= g(D(n,Q))/2 = {}",
                self.password.len(),
                params.max_password_len()
            )));
        }
        if let Some(&bad) = self.password.iter().find(|&&s| s >= params.alphabet()) {
            return Err(Error::parameter(format!(
                "password symbol {bad} is outside the alphabet of size {}",
                params.alphabet()
            )));
        }
        Ok(())
    }

    pub fn to_file(&self) -> KeyFile {
        KeyFile {
            iv: self.iv.coords().to_vec(),
            s: self.password.clone(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let f: KeyFile =
            toml::from_str(text).map_err(|e| Error::parameter(format!("key file: {e}")))?;
        Ok(f.into())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("key serialize")
    }
}

/// On-disk key: `iv = [..]`, `s = [..]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyFile {
    pub iv: Vec<u64>,
    pub s: Vec<u64>,
}

impl From<KeyFile> for MacKey {
    fn from(f: KeyFile) -> Self {
        MacKey::new(f.iv, f.s)
    }
}

/// Draws a key with uniform IV coordinates in `F_Q` and uniform password
/// symbols in `[0, q)`.
pub fn keygen<R: RngCore + ?Sized>(
    params: &MacParams,
    password_len: usize,
    rng: &mut R,
) -> Result<MacKey> {
    let bound = params.max_password_len();
    if password_len == 0 || password_len > bound {
        return Err(Error::parameter(format!(
            "password length s = {password_len} violates 1 <= s <= g(D(n,Q))/2 = {bound}"
        )));
    }
    let m = params.modulus();
    let iv = (0..params.n())
        .map(|_| sample_uniform(m, rng).map(|e| e.residue()))
        .collect::<Result<Vec<_>>>()?;
    let alphabet = params.alphabet();
    let bits = crate::params::symbol_bits_for(alphabet);
    let mask = if bits == 64 { u64::MAX } else { (1 << bits) - 1 };
    let mut password = Vec::with_capacity(password_len);
    let mut buf = [0u8; 8];
    while password.len() < password_len {
        rng.try_fill_bytes(&mut buf)
            .map_err(|e| Error::Entropy(e.to_string()))?;
        let s = u64::from_le_bytes(buf) & mask;
        if s < alphabet {
            password.push(s);
        }
    }
    Ok(MacKey::new(iv, password))
}

/// An `h`-bit tag, packed most significant bit first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tag {
    bits: usize,
    bytes: Vec<u8>,
}

impl Tag {
    fn zeroed(bits: usize) -> Self {
        Self {
            bits,
            bytes: vec![0; bits.div_ceil(8)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut t = Self::zeroed(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                t.bytes[i / 8] |= 0x80 >> (i % 8);
            }
        }
        t
    }

    pub fn len_bits(&self) -> usize {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.bits);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bits).map(|i| self.bit(i))
    }

    /// Packed bytes; unused trailing bits of the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn flip_bit(&mut self, i: usize) {
        assert!(i < self.bits);
        self.bytes[i / 8] ^= 0x80 >> (i % 8);
    }

    pub fn hamming_distance(&self, other: &Tag) -> usize {
        assert_eq!(self.bits, other.bits);
        self.bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Lowercase hex, `h / 4` digits. `None` unless `h` is a multiple of 4.
    pub fn to_hex(&self) -> Option<String> {
        if !self.bits.is_multiple_of(4) {
            return None;
        }
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let s = (0..self.bits / 4)
            .map(|k| {
                let b = self.bytes[k / 2];
                let nib = if k % 2 == 0 { b >> 4 } else { b & 0x0f };
                DIGITS[nib as usize] as char
            })
            .collect();
        Some(s)
    }

    pub fn to_binary(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Parses exactly `bits / 4` hex digits.
    pub fn from_hex(text: &str, bits: usize) -> Result<Self> {
        let text = text.trim();
        if !bits.is_multiple_of(4) {
            return Err(Error::input(format!(
                "a {bits}-bit tag has no hex form; use the binary form"
            )));
        }
        if text.len() != bits / 4 {
            return Err(Error::input(format!(
                "tag has {} hex digits, expected {}",
                text.len(),
                bits / 4
            )));
        }
        let mut t = Self::zeroed(bits);
        for (k, ch) in text.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| Error::input(format!("invalid hex digit {ch:?} in tag")))?
                as u8;
            t.bytes[k / 2] |= if k % 2 == 0 { nib << 4 } else { nib };
        }
        Ok(t)
    }

    pub fn from_binary(text: &str, bits: usize) -> Result<Self> {
        let text = text.trim();
        if text.len() != bits {
            return Err(Error::input(format!(
                "tag has {} binary digits, expected {bits}",
                text.len()
            )));
        }
        let bools = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::input(format!("invalid binary digit {other:?} in tag"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bools))
    }

    /// Hex when `h` is a multiple of 4, binary otherwise.
    pub fn parse(text: &str, bits: usize) -> Result<Self> {
        if bits.is_multiple_of(4) {
            Self::from_hex(text, bits)
        } else {
            Self::from_binary(text, bits)
        }
    }

    /// Compares every byte regardless of where the first difference is.
    pub fn ct_eq(&self, other: &Tag) -> bool {
        if self.bits != other.bits {
            return false;
        }
        let diff = self
            .bytes
            .iter()
            .zip(&other.bytes)
            .fold(0u8, |acc, (a, b)| acc | (a ^ b));
        std::hint::black_box(diff) == 0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_hex() {
            Some(h) => f.write_str(&h),
            None => f.write_str(&self.to_binary()),
        }
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tag({}b, {self})", self.bits)
    }
}

/// Walk position: the current vertex (for DMAC-2, the accumulated vector
/// tagged with the kind of the last visited vertex) and the step counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkState {
    vertex: Vertex,
    step: u64,
}

impl WalkState {
    pub fn start(iv: Vertex) -> Self {
        Self { vertex: iv, step: 0 }
    }

    pub fn vertex(&self) -> &Vertex {
        &self.vertex
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Rotating coordinate used by the next step, 1-based.
    pub fn coord_index(&self, n: usize) -> usize {
        (self.step % n as u64) as usize + 1
    }
}

/// One step of the walk. `direction` is reduced mod `Q`.
pub fn walk_step(
    graph: &GraphParams,
    state: &WalkState,
    direction: u64,
    variant: Variant,
) -> Result<WalkState> {
    graph.check_vertex(&state.vertex)?;
    let mut counter = ();
    let mut w = Walker::new(graph, variant, state.vertex.clone(), &mut counter);
    w.step = state.step;
    w.advance(direction);
    Ok(w.state())
}

/// Allocation-free walk engine shared by every entry point. Coordinates are
/// held in the modulus' internal representation between steps.
pub(crate) struct Walker<'a, C: OpCounter> {
    graph: &'a GraphParams,
    variant: Variant,
    kind: VertexKind,
    cur: Vec<u64>,
    next: Vec<u64>,
    step: u64,
    counter: &'a mut C,
}

impl<'a, C: OpCounter> Walker<'a, C> {
    pub(crate) fn new(graph: &'a GraphParams, variant: Variant, start: Vertex, counter: &'a mut C) -> Self {
        let kind = start.kind();
        let m = graph.modulus();
        let cur: Vec<u64> = start.coords().iter().map(|&c| m.to_internal(c)).collect();
        let next = vec![0; cur.len()];
        Self {
            graph,
            variant,
            kind,
            cur,
            next,
            step: 0,
            counter,
        }
    }

    /// Per step: one reduction of the direction, one addition, one squaring,
    /// one reduction of the square, `2(n-1)` substitution operations and,
    /// for DMAC-2, `n` accumulation additions.
    #[inline]
    pub(crate) fn advance(&mut self, direction: u64) {
        let g = self.graph;
        let m = g.modulus();
        let n = g.n();
        let t = m.to_internal(m.reduce_u64(direction));
        let idx = (self.step % n as u64) as usize + 1;
        let first = g.walk_head_internal(&self.cur, t, idx);
        self.counter.reduce(2);
        self.counter.add(1);
        self.counter.mul(1);
        g.complete_internal(self.kind, &self.cur, first, &mut self.next, self.counter);
        if self.variant == Variant::Dmac2 {
            for (x, &prev) in self.next.iter_mut().zip(&self.cur) {
                *x = m.add_raw(*x, prev);
            }
            self.counter.add(n as u64);
        }
        std::mem::swap(&mut self.cur, &mut self.next);
        self.kind = self.kind.opposite();
        self.step += 1;
    }

    pub(crate) fn coords(&self) -> Vec<u64> {
        let m = self.graph.modulus();
        self.cur.iter().map(|&c| m.from_internal(c)).collect()
    }

    pub(crate) fn vertex(&self) -> Vertex {
        Vertex::new(self.kind, self.coords())
    }

    pub(crate) fn state(&self) -> WalkState {
        WalkState {
            vertex: self.vertex(),
            step: self.step,
        }
    }
}

/// Splits a message into blocks of `c` symbols, padding per the profile.
///
/// With [`Padding::ZeroFillWithLengthBlock`] an extra block holding the
/// symbol count as base-`2^l(q)` digits is appended. Its walk direction is
/// `len mod Q` (see [`block_directions`]).
pub fn split_pad(message: &[u64], params: &MacParams) -> Result<Vec<Vec<u64>>> {
    check_symbols(message, params)?;
    let c = params.symbols_per_block();
    let mut blocks: Vec<Vec<u64>> = message
        .chunks(c)
        .map(|chunk| {
            let mut b = chunk.to_vec();
            b.resize(c, 0);
            b
        })
        .collect();
    if params.padding() == Padding::ZeroFillWithLengthBlock {
        let mut extra = vec![0; c];
        // Positional digits of the count; the direction itself is len mod Q.
        let base_bits = params.symbol_bits();
        let mut len = message.len() as u128;
        for slot in extra.iter_mut().rev() {
            *slot = (len & ((1u128 << base_bits) - 1)) as u64;
            len >>= base_bits;
        }
        blocks.push(extra);
    }
    Ok(blocks)
}

fn check_symbols(message: &[u64], params: &MacParams) -> Result<()> {
    if let Some((i, &s)) = message
        .iter()
        .enumerate()
        .find(|(_, &s)| s >= params.alphabet())
    {
        return Err(Error::input(format!(
            "symbol {s} at position {i} is outside the alphabet of size {}",
            params.alphabet()
        )));
    }
    Ok(())
}

/// Integer value of one block, taken modulo `Q`.
///
/// Positional values are always below `2^N <= Q` and come back unchanged.
/// Decimal concatenation can exceed `Q` (and 64 bits), so it is accumulated
/// modulo `Q`; the walk only ever uses the direction modulo `Q`.
pub fn encode_block(block: &[u64], params: &MacParams) -> u64 {
    match params.encoding() {
        Encoding::Positional => {
            let l = params.symbol_bits();
            block.iter().fold(0u64, |acc, &s| (acc << l) | s)
        }
        Encoding::DecimalConcat => {
            let q = u128::from(params.modulus().value());
            let v = block.iter().fold(0u128, |acc, &s| {
                let mut scale = 10u128;
                let mut x = s / 10;
                while x > 0 {
                    scale *= 10;
                    x /= 10;
                }
                (acc * (scale % q) % q + u128::from(s) % q) % q
            });
            v as u64
        }
    }
}

/// Walk directions `M_0, M_1, ...` for a message (after padding).
pub fn block_directions(message: &[u64], params: &MacParams) -> Result<Vec<u64>> {
    check_symbols(message, params)?;
    let c = params.symbols_per_block();
    let mut pad = Vec::with_capacity(c);
    let mut dirs: Vec<u64> = message
        .chunks(c)
        .map(|chunk| {
            if chunk.len() == c {
                encode_block(chunk, params)
            } else {
                pad.clear();
                pad.extend_from_slice(chunk);
                pad.resize(c, 0);
                encode_block(&pad, params)
            }
        })
        .collect();
    if params.padding() == Padding::ZeroFillWithLengthBlock {
        dirs.push(params.modulus().reduce_wide(message.len() as u128));
    }
    Ok(dirs)
}

/// Splits bytes into `l(q)`-bit big-endian symbols. A trailing partial
/// symbol is completed with zero bits on the right.
pub fn symbols_from_bytes(bytes: &[u8], params: &MacParams) -> Result<Vec<u64>> {
    let l = params.symbol_bits() as usize;
    let symbols = if l == 8 {
        bytes.iter().map(|&b| u64::from(b)).collect::<Vec<_>>()
    } else {
        let total = bytes.len() * 8;
        let count = total.div_ceil(l);
        (0..count)
            .map(|k| {
                (0..l).fold(0u64, |acc, j| {
                    let bit = k * l + j;
                    let b = bit < total && bytes[bit / 8] & (0x80 >> (bit % 8)) != 0;
                    (acc << 1) | u64::from(b)
                })
            })
            .collect()
    };
    check_symbols(&symbols, params)?;
    Ok(symbols)
}

/// Reads the tag off final coordinates: each reduced per the tag mode,
/// written as `l(q)` big-endian bits, concatenated, truncated to `h` bits.
pub fn extract_tag(coords: &[u64], params: &MacParams) -> Tag {
    let l = params.symbol_bits() as usize;
    let h = params.tag_bits();
    let mut tag = Tag::zeroed(h);
    let mut pos = 0;
    'outer: for &c in coords {
        let v = match params.tag_mode() {
            TagMode::ModQ => c % params.alphabet(),
            TagMode::ModPow2 => {
                if l >= 64 {
                    c
                } else {
                    c & ((1u64 << l) - 1)
                }
            }
        };
        for j in (0..l).rev() {
            if pos == h {
                break 'outer;
            }
            if (v >> j) & 1 == 1 {
                tag.bytes[pos / 8] |= 0x80 >> (pos % 8);
            }
            pos += 1;
        }
    }
    tag
}

/// Result of a walk with every intermediate state recorded.
#[derive(Clone, Debug)]
pub struct Trace {
    /// `v_1, v_2, ...` after each message and password step.
    pub states: Vec<Vertex>,
    pub tag: Tag,
}

pub(crate) fn run<C: OpCounter>(
    directions: &[u64],
    key: &MacKey,
    params: &MacParams,
    counter: &mut C,
    mut trace: Option<&mut Vec<Vertex>>,
) -> Result<Tag> {
    key.validate(params)?;
    let mut w = Walker::new(params.graph(), params.variant(), key.iv.clone(), counter);
    for &d in directions.iter().chain(&key.password) {
        w.advance(d);
        if let Some(t) = trace.as_deref_mut() {
            t.push(w.vertex());
        }
    }
    Ok(extract_tag(&w.coords(), params))
}

/// The keyed hash of a symbol sequence.
pub fn dmac(message: &[u64], key: &MacKey, params: &MacParams) -> Result<Tag> {
    let dirs = block_directions(message, params)?;
    run(&dirs, key, params, &mut (), None)
}

/// The keyed hash of a byte string, read as `l(q)`-bit symbols.
pub fn dmac_bytes(message: &[u8], key: &MacKey, params: &MacParams) -> Result<Tag> {
    let symbols = symbols_from_bytes(message, params)?;
    dmac(&symbols, key, params)
}

/// Like [`dmac`] but starting from explicit block values `M_i` instead of a
/// message, e.g. to replay known intermediate values.
pub fn dmac_blocks(blocks: &[u64], key: &MacKey, params: &MacParams) -> Result<Tag> {
    run(blocks, key, params, &mut (), None)
}

pub fn trace_blocks(blocks: &[u64], key: &MacKey, params: &MacParams) -> Result<Trace> {
    let mut states = Vec::with_capacity(blocks.len() + key.password.len());
    let tag = run(blocks, key, params, &mut (), Some(&mut states))?;
    Ok(Trace { states, tag })
}

pub fn trace(message: &[u64], key: &MacKey, params: &MacParams) -> Result<Trace> {
    trace_blocks(&block_directions(message, params)?, key, params)
}

/// Recomputes the tag and compares all `h` bits.
///
/// A candidate of the wrong length is an input error, not a mismatch.
pub fn verify(message: &[u64], key: &MacKey, params: &MacParams, candidate: &Tag) -> Result<bool> {
    if candidate.len_bits() != params.tag_bits() {
        return Err(Error::input(format!(
            "candidate tag has {} bits, expected {}",
            candidate.len_bits(),
            params.tag_bits()
        )));
    }
    let expected = dmac(message, key, params)?;
    Ok(expected.ct_eq(candidate))
}

pub fn verify_bytes(message: &[u8], key: &MacKey, params: &MacParams, candidate: &Tag) -> Result<bool> {
    let symbols = symbols_from_bytes(message, params)?;
    verify(&symbols, key, params, candidate)
}
