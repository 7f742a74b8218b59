//! Exhaustive collision search on tiny instances and the constructive mirror
//! collision.
//!
//! Every colliding pair is classified by comparing the two walks:
//!
//! * [`CollisionKind::Encoding`]: both messages give the same directions.
//! * [`CollisionKind::Mirror`]: the walks visit the same vertices; at each
//!   step the directions are equal or related by `t' = -2 v[idx] - t`.
//! * [`CollisionKind::Backtracking`]: same final vertex, and one walk
//!   returns to the vertex it visited two steps earlier.
//! * [`CollisionKind::TagReduction`]: different final vertices that read off
//!   as the same tag (mod-`q` reduction, truncation, or the dropped kind).
//! * [`CollisionKind::Structural`]: anything else, i.e. two distinct
//!   non-backtracking walks meeting at one vertex. For DMAC-1 this closes a
//!   cycle, so none exist while both walks are shorter than half the girth.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{GraphParams, Vertex};
use crate::mac::{block_directions, dmac, trace, MacKey, WalkState, Walker};
use crate::params::{girth_formula, Encoding, MacParams, Variant};

/// Directions and visited states of one walk.
type Walk = (Vec<u64>, Vec<Vertex>);

/// Most inputs an exhaustive search will hash.
pub const MAX_SEARCH_SPACE: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollisionKind {
    Encoding,
    Mirror,
    Backtracking,
    TagReduction,
    Structural,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionPair {
    pub first: Vec<u64>,
    pub second: Vec<u64>,
    pub kind: CollisionKind,
    /// Walk length (steps) of the longer of the two inputs.
    pub walk_len: usize,
}

#[derive(Clone, Debug, Default)]
pub struct CollisionReport {
    /// Number of inputs hashed.
    pub searched: usize,
    pub pairs: Vec<CollisionPair>,
    /// `g(D(n,Q)) / 2` per the girth formula.
    pub half_girth: usize,
}

impl CollisionReport {
    pub fn count(&self, kind: CollisionKind) -> usize {
        self.pairs.iter().filter(|p| p.kind == kind).count()
    }

    /// Structural pairs whose walks are both shorter than half the girth.
    pub fn structural_below_half_girth(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.kind == CollisionKind::Structural && p.walk_len < self.half_girth)
            .count()
    }
}

fn backtracks(start: &Vertex, states: &[Vertex]) -> bool {
    states
        .iter()
        .enumerate()
        .skip(1)
        .any(|(i, v)| if i == 1 { v == start } else { *v == states[i - 2] })
}

fn classify(start: &Vertex, a: (&[u64], &[Vertex]), b: (&[u64], &[Vertex])) -> CollisionKind {
    if a.0 == b.0 {
        CollisionKind::Encoding
    } else if a.1.last() != b.1.last() {
        CollisionKind::TagReduction
    } else if a.1 == b.1 {
        CollisionKind::Mirror
    } else if backtracks(start, a.1) || backtracks(start, b.1) {
        CollisionKind::Backtracking
    } else {
        CollisionKind::Structural
    }
}

fn search_space(base: u64, mut lengths: impl Iterator<Item = usize>) -> Option<u64> {
    lengths.try_fold(0u64, |acc, len| {
        let count = base.checked_pow(u32::try_from(len).ok()?)?;
        acc.checked_add(count).filter(|&t| t <= MAX_SEARCH_SPACE)
    })
}

/// Odometer over all sequences of `len` values below `base`.
fn for_each_sequence(base: u64, len: usize, mut f: impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
    let mut seq = vec![0u64; len];
    loop {
        f(&seq)?;
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < base {
                break;
            }
            seq[i] = 0;
        }
    }
}

/// Hashes every message of `1..=max_blocks` full blocks and reports all
/// pairs of distinct messages with equal tags.
pub fn brute_force_collisions(
    params: &MacParams,
    key: &MacKey,
    max_blocks: usize,
) -> Result<CollisionReport> {
    key.validate(params)?;
    let c = params.symbols_per_block();
    let q = params.alphabet();
    search_space(q, (1..=max_blocks).map(|k| k * c)).ok_or_else(|| {
        Error::parameter(format!(
            "messages of up to {max_blocks} blocks over {q} symbols exceed {MAX_SEARCH_SPACE}"
        ))
    })?;

    let mut by_tag: HashMap<Vec<u8>, Vec<Vec<u64>>> = HashMap::new();
    let mut searched = 0;
    for k in 1..=max_blocks {
        for_each_sequence(q, k * c, |m| {
            let tag = dmac(m, key, params)?;
            by_tag.entry(tag.as_bytes().to_vec()).or_default().push(m.to_vec());
            searched += 1;
            Ok(())
        })?;
    }

    let mut pairs = Vec::new();
    for group in by_tag.values().filter(|g| g.len() > 1) {
        let walks = group
            .iter()
            .map(|m| Ok((block_directions(m, params)?, trace(m, key, params)?.states)))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let (da, sa) = &walks[i];
                let (db, sb) = &walks[j];
                pairs.push(CollisionPair {
                    first: group[i].clone(),
                    second: group[j].clone(),
                    kind: classify(key.iv(), (da, sa), (db, sb)),
                    walk_len: sa.len().max(sb.len()),
                });
            }
        }
    }
    pairs.sort_by(|a, b| (a.kind, &a.first, &a.second).cmp(&(b.kind, &b.first, &b.second)));

    Ok(CollisionReport {
        searched,
        pairs,
        half_girth: girth_formula(params.n())? / 2,
    })
}

/// Walks of exactly `steps` steps from `start` over every direction in
/// `F_Q`, grouped by final vertex. Pairs are classified as above (never
/// `TagReduction`, since whole vertices are compared).
pub fn direction_collisions(
    graph: &GraphParams,
    start: &Vertex,
    steps: usize,
    variant: Variant,
) -> Result<CollisionReport> {
    graph.check_vertex(start)?;
    let q = graph.modulus().value();
    search_space(q, std::iter::once(steps)).ok_or_else(|| {
        Error::parameter(format!(
            "{q}^{steps} walks exceed {MAX_SEARCH_SPACE}"
        ))
    })?;

    let mut by_end: HashMap<Vertex, Vec<Walk>> = HashMap::new();
    let mut searched = 0;
    for_each_sequence(q, steps, |dirs| {
        let mut counter = ();
        let mut w = Walker::new(graph, variant, start.clone(), &mut counter);
        let mut states = Vec::with_capacity(steps);
        for &d in dirs {
            w.advance(d);
            states.push(w.vertex());
        }
        let end = states.last().cloned().unwrap_or_else(|| start.clone());
        by_end.entry(end).or_default().push((dirs.to_vec(), states));
        searched += 1;
        Ok(())
    })?;

    let mut pairs = Vec::new();
    for group in by_end.values().filter(|g| g.len() > 1) {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let (da, sa) = &group[i];
                let (db, sb) = &group[j];
                pairs.push(CollisionPair {
                    first: da.clone(),
                    second: db.clone(),
                    kind: classify(start, (da, sa), (db, sb)),
                    walk_len: steps,
                });
            }
        }
    }
    pairs.sort_by(|a, b| (a.kind, &a.first, &a.second).cmp(&(b.kind, &b.first, &b.second)));

    Ok(CollisionReport {
        searched,
        pairs,
        half_girth: girth_formula(graph.n())? / 2,
    })
}

/// The direction `-2 v[idx] - t (mod Q)` that leads from `state` to the same
/// vertex as `t`.
pub fn mirror_direction(graph: &GraphParams, state: &WalkState, t: u64) -> u64 {
    let m = graph.modulus();
    let v = state.vertex().coords()[state.coord_index(graph.n()) - 1];
    let t = m.reduce_u64(t);
    m.sub_raw(m.reduce_u64(m.value() - m.add_raw(v, v)), t)
}

/// Replaces direction `i` by its mirror. The result has the same tag.
pub fn mirror_blocks(blocks: &[u64], key: &MacKey, params: &MacParams, i: usize) -> Result<Vec<u64>> {
    key.validate(params)?;
    if i >= blocks.len() {
        return Err(Error::input(format!(
            "block index {i} out of range for {} blocks",
            blocks.len()
        )));
    }
    let mut counter = ();
    let mut w = Walker::new(params.graph(), params.variant(), key.iv().clone(), &mut counter);
    for &d in &blocks[..i] {
        w.advance(d);
    }
    let mut out = blocks.to_vec();
    out[i] = mirror_direction(params.graph(), &w.state(), blocks[i]);
    Ok(out)
}

/// A different message with the same tag, obtained by mirroring block
/// `block` of a positionally encoded message. `None` when the mirrored
/// direction is not the encoding of any block (it is `>= 2^N` or has a
/// digit `>= q`).
pub fn mirror_message(
    message: &[u64],
    key: &MacKey,
    params: &MacParams,
    block: usize,
) -> Result<Option<Vec<u64>>> {
    if params.encoding() != Encoding::Positional {
        return Err(Error::parameter("mirror messages need positional encoding"));
    }
    let c = params.symbols_per_block();
    if !message.len().is_multiple_of(c) || (block + 1) * c > message.len() {
        return Err(Error::input(format!(
            "block {block} is not a full block of a {}-symbol message",
            message.len()
        )));
    }
    let dirs = block_directions(message, params)?;
    let mirrored = mirror_blocks(&dirs, key, params, block)?[block];
    let l = params.symbol_bits();
    if u32::try_from(c).map_or(true, |c| c as u64 * l as u64 >= 64) || mirrored >> (c as u32 * l) != 0 {
        return Ok(None);
    }
    let digits: Vec<u64> = (0..c)
        .rev()
        .map(|k| (mirrored >> (k as u32 * l)) & ((1 << l) - 1))
        .collect();
    if digits.iter().any(|&d| d >= params.alphabet()) {
        return Ok(None);
    }
    let mut out = message.to_vec();
    out[block * c..(block + 1) * c].copy_from_slice(&digits);
    Ok(Some(out))
}
