//! MAC parameter profiles and their text file format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{next_prime_at_least, PrimeModulus};
use crate::graph::GraphParams;

/// Largest block size: `Q >= 2^N` must still fit below `2^63`.
pub const MAX_BLOCK_BITS: u32 = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "dmac1")]
    Dmac1,
    #[serde(rename = "dmac2")]
    Dmac2,
}

/// How the symbols of a block become a walk direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Encoding {
    /// Base `2^l(q)` digits, most significant first. Injective, always `< 2^N`.
    #[serde(rename = "positional")]
    Positional,
    /// Decimal digit strings of the symbols glued together. Not injective:
    /// `(1, 28)` and `(12, 8)` both give 128.
    #[serde(rename = "decimal-concat")]
    DecimalConcat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Padding {
    #[serde(rename = "zero")]
    ZeroFill,
    /// Zero fill, then one extra block carrying the symbol count.
    #[serde(rename = "zero-length")]
    ZeroFillWithLengthBlock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TagMode {
    /// Reduce each final coordinate modulo the alphabet size `q`.
    #[serde(rename = "modq")]
    ModQ,
    /// Reduce each final coordinate modulo `2^l(q)`.
    #[serde(rename = "modpow2")]
    ModPow2,
}

macro_rules! text_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $($ty::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(Error::parameter(format!(
                        concat!("unknown ", stringify!($ty), " {:?}, expected one of: ", $($text, " "),+),
                        other
                    ))),
                }
            }
        }
    };
}

text_enum!(Variant { Dmac1 => "dmac1", Dmac2 => "dmac2" });
text_enum!(Encoding { Positional => "positional", DecimalConcat => "decimal-concat" });
text_enum!(Padding { ZeroFill => "zero", ZeroFillWithLengthBlock => "zero-length" });
text_enum!(TagMode { ModQ => "modq", ModPow2 => "modpow2" });

/// `ceil(log2 q)`: bits per alphabet symbol.
pub fn symbol_bits_for(alphabet: u64) -> u32 {
    debug_assert!(alphabet >= 2);
    64 - (alphabet - 1).leading_zeros()
}

/// Girth of `D(n, q)`: `n + 5` for odd `n`, `n + 4` for even `n`,
/// i.e. `2 * floor((n + 5) / 2)`.
pub fn girth_formula(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::parameter(format!("dimension n = {n} is below 2")));
    }
    Ok(2 * ((n + 5) / 2))
}

/// Smallest `n` with `h <= n * l(q)` (at least 2) and the smallest prime
/// `Q >= 2^N`.
pub fn suggest_params(tag_bits: usize, symbol_bits: u32, block_bits: u32) -> Result<(usize, u64)> {
    if tag_bits == 0 {
        return Err(Error::parameter("tag length must be at least one bit"));
    }
    if symbol_bits == 0 || !block_bits.is_multiple_of(symbol_bits) {
        return Err(Error::parameter(format!(
            "symbol size {symbol_bits} does not divide block size {block_bits}"
        )));
    }
    if block_bits > MAX_BLOCK_BITS {
        return Err(Error::parameter(format!(
            "block size {block_bits} exceeds {MAX_BLOCK_BITS} bits"
        )));
    }
    let n = tag_bits.div_ceil(symbol_bits as usize).max(2);
    let q = next_prime_at_least(1u64 << block_bits)?;
    Ok((n, q))
}

/// A validated parameter profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacParams {
    alphabet: u64,
    symbol_bits: u32,
    block_bits: u32,
    graph: GraphParams,
    tag_bits: usize,
    variant: Variant,
    encoding: Encoding,
    padding: Padding,
    tag_mode: TagMode,
}

impl MacParams {
    /// Builds a profile with the default modes (DMAC-2, positional encoding,
    /// zero padding, tags reduced mod `q`).
    ///
    /// Requires `q >= 2`, `l(q) | N`, `Q` prime with `Q >= 2^N`, `n >= 2` and
    /// `1 <= h <= n * l(q)`.
    pub fn new(alphabet: u64, block_bits: u32, n: usize, modulus: u64, tag_bits: usize) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::parameter(format!("alphabet size q = {alphabet} is below 2")));
        }
        let symbol_bits = symbol_bits_for(alphabet);
        if block_bits == 0 || !block_bits.is_multiple_of(symbol_bits) {
            return Err(Error::parameter(format!(
                "l(q) = {symbol_bits} must divide the block size N = {block_bits}"
            )));
        }
        if block_bits > MAX_BLOCK_BITS {
            return Err(Error::parameter(format!(
                "block size N = {block_bits} exceeds {MAX_BLOCK_BITS} bits"
            )));
        }
        let modulus = PrimeModulus::new(modulus)?;
        if modulus.value() < 1u64 << block_bits {
            return Err(Error::parameter(format!(
                "Q = {modulus} violates Q >= 2^N = 2^{block_bits}"
            )));
        }
        let graph = GraphParams::new(n, modulus)?;
        if tag_bits == 0 || tag_bits > n * symbol_bits as usize {
            return Err(Error::parameter(format!(
                "tag length h = {tag_bits} violates 1 <= h <= n * l(q) = {}",
                n * symbol_bits as usize
            )));
        }
        Ok(Self {
            alphabet,
            symbol_bits,
            block_bits,
            graph,
            tag_bits,
            variant: Variant::Dmac2,
            encoding: Encoding::Positional,
            padding: Padding::ZeroFill,
            tag_mode: TagMode::ModQ,
        })
    }

    /// `q = 256`, `N = 32`, `h = 256`, `n = 32`, `Q = 2^32 + 15`.
    pub fn default_profile() -> Self {
        let (n, q) = suggest_params(256, 8, 32).expect("default profile is valid");
        Self::new(256, 32, n, q, 256).expect("default profile is valid")
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn with_padding(mut self, padding: Padding) -> Self {
        self.padding = padding;
        self
    }

    pub fn with_tag_mode(mut self, tag_mode: TagMode) -> Self {
        self.tag_mode = tag_mode;
        self
    }

    pub fn alphabet(&self) -> u64 {
        self.alphabet
    }

    pub fn symbol_bits(&self) -> u32 {
        self.symbol_bits
    }

    pub fn block_bits(&self) -> u32 {
        self.block_bits
    }

    /// `c = N / l(q)`.
    pub fn symbols_per_block(&self) -> usize {
        (self.block_bits / self.symbol_bits) as usize
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.graph.modulus()
    }

    pub fn graph(&self) -> &GraphParams {
        &self.graph
    }

    pub fn tag_bits(&self) -> usize {
        self.tag_bits
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    pub fn tag_mode(&self) -> TagMode {
        self.tag_mode
    }

    /// Longest password allowed: half the girth.
    pub fn max_password_len(&self) -> usize {
        girth_formula(self.n()).expect("n >= 2") / 2
    }

    pub fn to_file(&self) -> ParamsFile {
        ParamsFile {
            q: self.alphabet,
            lq: self.symbol_bits,
            block_bits: self.block_bits,
            n: self.n(),
            modulus: self.modulus().value(),
            h: self.tag_bits,
            variant: self.variant,
            encoding: self.encoding,
            padding: self.padding,
            tagmode: self.tag_mode,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ParamsFile =
            toml::from_str(text).map_err(|e| Error::parameter(format!("params file: {e}")))?;
        file.try_into()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("params serialize")
    }
}

impl Default for MacParams {
    fn default() -> Self {
        Self::default_profile()
    }
}

/// On-disk form of [`MacParams`]. Every field is required; `lq` must agree
/// with `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub q: u64,
    pub lq: u32,
    #[serde(rename = "N")]
    pub block_bits: u32,
    pub n: usize,
    #[serde(rename = "Q")]
    pub modulus: u64,
    pub h: usize,
    pub variant: Variant,
    pub encoding: Encoding,
    pub padding: Padding,
    pub tagmode: TagMode,
}

impl TryFrom<ParamsFile> for MacParams {
    type Error = Error;

    fn try_from(f: ParamsFile) -> Result<Self> {
        if f.q >= 2 && f.lq != symbol_bits_for(f.q) {
            return Err(Error::parameter(format!(
                "lq = {} but q = {} needs {} bits",
                f.lq,
                f.q,
                symbol_bits_for(f.q)
            )));
        }
        Ok(MacParams::new(f.q, f.block_bits, f.n, f.modulus, f.h)?
            .with_variant(f.variant)
            .with_encoding(f.encoding)
            .with_padding(f.padding)
            .with_tag_mode(f.tagmode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn girth_examples() {
        assert_eq!(girth_formula(3).unwrap(), 8);
        assert_eq!(girth_formula(6).unwrap(), 10);
        assert_eq!(girth_formula(2).unwrap(), 6);
        assert_eq!(girth_formula(64).unwrap(), 68);
        assert!(girth_formula(1).is_err());
        for n in 2..100 {
            let g = girth_formula(n).unwrap();
            assert_eq!(g, if n % 2 == 1 { n + 5 } else { n + 4 });
        }
    }

    #[test]
    fn suggest_examples() {
        assert_eq!(suggest_params(512, 8, 32).unwrap(), (64, 4_294_967_311));
        assert_eq!(suggest_params(15, 5, 25).unwrap(), (3, 33_554_467));
        assert_eq!(suggest_params(128, 16, 16).unwrap(), (8, 65_537));
        assert_eq!(suggest_params(8, 8, 8).unwrap().0, 2);
        assert!(suggest_params(128, 5, 32).is_err());
        assert!(suggest_params(0, 8, 32).is_err());
        // tag-size table for 8/16/32-bit symbols
        for (h, expect) in [(128, [16, 8, 4]), (256, [32, 16, 8]), (512, [64, 32, 16]), (1024, [128, 64, 32])] {
            for (lq, n) in [8, 16, 32].into_iter().zip(expect) {
                assert_eq!(suggest_params(h, lq, 32).unwrap().0, n);
            }
        }
        for (h, lq, nb) in [(512, 8, 32), (15, 5, 25), (128, 16, 16)] {
            let (n, q) = suggest_params(h, lq, nb).unwrap();
            let alphabet = 1u64 << lq;
            assert!(MacParams::new(alphabet, nb, n, q, h).is_ok());
        }
    }

    #[test]
    fn default_profile_values() {
        let p = MacParams::default_profile();
        assert_eq!(p.alphabet(), 256);
        assert_eq!(p.symbol_bits(), 8);
        assert_eq!(p.block_bits(), 32);
        assert_eq!(p.symbols_per_block(), 4);
        assert_eq!(p.n(), 32);
        assert_eq!(p.modulus().value(), 4_294_967_311);
        assert_eq!(p.tag_bits(), 256);
        assert_eq!(p.variant(), Variant::Dmac2);
        assert_eq!(p.encoding(), Encoding::Positional);
        assert_eq!(p.padding(), Padding::ZeroFill);
        assert_eq!(p.tag_mode(), TagMode::ModQ);
        assert_eq!(p.max_password_len(), 18);
    }

    #[test]
    fn invariants_are_enforced() {
        // toy profile is valid
        assert!(MacParams::new(29, 25, 3, 33_554_467, 15).is_ok());
        assert_eq!(symbol_bits_for(29), 5);
        assert_eq!(symbol_bits_for(257), 9);
        assert_eq!(symbol_bits_for(2), 1);
        // Q < 2^N
        assert!(MacParams::new(29, 25, 3, 33_554_393, 15).is_err());
        // composite Q
        assert!(MacParams::new(256, 32, 32, 1 << 32, 256).is_err());
        // h > n l(q)
        assert!(MacParams::new(29, 25, 3, 33_554_467, 16).is_err());
        assert!(MacParams::new(29, 25, 3, 33_554_467, 0).is_err());
        // l(q) does not divide N
        assert!(MacParams::new(29, 24, 3, 33_554_467, 15).is_err());
        assert!(MacParams::new(1, 25, 3, 33_554_467, 15).is_err());
        assert!(MacParams::new(29, 25, 1, 33_554_467, 5).is_err());
        assert!(MacParams::new(2, 63, 2, (1 << 63) - 25, 2).is_err());
    }

    #[test]
    fn file_format() {
        let p = MacParams::default_profile().with_variant(Variant::Dmac1);
        let text = p.to_toml();
        assert!(text.contains("N = 32"));
        assert!(text.contains("Q = 4294967311"));
        assert!(text.contains("variant = \"dmac1\""));
        assert_eq!(MacParams::from_toml(&text).unwrap(), p);

        let toy = r#"
            q = 29
            lq = 5
            N = 25
            n = 3
            Q = 33554467
            h = 15
            variant = "dmac2"
            encoding = "decimal-concat"
            padding = "zero"
            tagmode = "modq"
        "#;
        let p = MacParams::from_toml(toy).unwrap();
        assert_eq!(p.encoding(), Encoding::DecimalConcat);
        assert!(MacParams::from_toml(&toy.replace("lq = 5", "lq = 6")).is_err());
        assert!(MacParams::from_toml(&toy.replace("Q = 33554467", "Q = 33554466")).is_err());
        assert!(MacParams::from_toml(&toy.replace("\"modq\"", "\"mod7\"")).is_err());
        assert!(MacParams::from_toml(&toy.replace("h = 15", "")).is_err());
    }

    #[test]
    fn text_enums_round_trip() {
        for v in [Variant::Dmac1, Variant::Dmac2] {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("decimal-concat".parse::<Encoding>().unwrap(), Encoding::DecimalConcat);
        assert_eq!("zero-length".parse::<Padding>().unwrap(), Padding::ZeroFillWithLengthBlock);
        assert_eq!("modpow2".parse::<TagMode>().unwrap(), TagMode::ModPow2);
        assert!("dmac3".parse::<Variant>().is_err());
    }
}
