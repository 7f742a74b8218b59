//! Known-answer test files.
//!
//! A file is a list of `[[record]]` tables:
//!
//! ```toml
//! [[record]]
//! name = "example"
//! message_hex = "48656c6c6f"      # or: blocks = [28140, 20198520]
//! intermediates = ["L:5,2,6"]     # optional, v_1, v_2, ...
//! tag_hex = "ab1a"                # or: tag_bits = "101100010101101"
//! [record.params]
//! q = 8
//! # ... every parameter-file key
//! [record.key]
//! iv = [1, 8, 4]
//! s = []
//! ```
//!
//! `blocks` gives the walk directions `M_i` directly, bypassing message
//! encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::mac::{block_directions, symbols_from_bytes, trace_blocks, KeyFile, MacKey, Tag};
use crate::params::{MacParams, ParamsFile};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatRecord {
    pub name: String,
    pub params: ParamsFile,
    pub key: KeyFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message_hex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intermediates: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_hex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_bits: Option<String>,
}

#[derive(Deserialize)]
struct RawFile {
    #[serde(default)]
    record: Vec<toml::Value>,
}

#[derive(Serialize)]
struct OutFile<'a> {
    record: &'a [KatRecord],
}

/// A record with every field parsed and validated.
#[derive(Clone, Debug)]
pub struct KatCase {
    pub name: String,
    pub params: MacParams,
    pub key: MacKey,
    pub directions: Vec<u64>,
    pub intermediates: Vec<Vertex>,
    pub tag: Tag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatOutcome {
    pub name: String,
    pub index: usize,
    /// One line per disagreement, e.g. `step i=2: expected .., got ..`.
    pub mismatches: Vec<String>,
}

impl KatOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for KatOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS [{}] {}", self.index, self.name)
        } else {
            write!(f, "FAIL [{}] {}", self.index, self.name)?;
            for m in &self.mismatches {
                write!(f, "\n  {m}")?;
            }
            Ok(())
        }
    }
}

fn record_error(index: usize, name: Option<&str>, e: impl fmt::Display) -> Error {
    match name {
        Some(n) => Error::parameter(format!("KAT record {index} ({n}): {e}")),
        None => Error::parameter(format!("KAT record {index}: {e}")),
    }
}

impl KatRecord {
    fn prepare(&self) -> Result<KatCase> {
        let params = MacParams::try_from(self.params.clone())?;
        let key = MacKey::from(self.key.clone());
        key.validate(&params)?;
        let directions = match (&self.message_hex, &self.blocks) {
            (Some(hex_text), None) => {
                let bytes = hex::decode(hex_text)
                    .map_err(|e| Error::input(format!("message_hex: {e}")))?;
                block_directions(&symbols_from_bytes(&bytes, &params)?, &params)?
            }
            (None, Some(blocks)) => blocks.clone(),
            _ => {
                return Err(Error::input(
                    "exactly one of message_hex and blocks is required",
                ))
            }
        };
        let intermediates = self
            .intermediates
            .iter()
            .flatten()
            .map(|s| Vertex::from_str(s))
            .collect::<Result<Vec<_>>>()?;
        let tag = match (&self.tag_hex, &self.tag_bits) {
            (Some(h), None) => Tag::from_hex(h, params.tag_bits())?,
            (None, Some(b)) => Tag::from_binary(b, params.tag_bits())?,
            _ => return Err(Error::input("exactly one of tag_hex and tag_bits is required")),
        };
        Ok(KatCase {
            name: self.name.clone(),
            params,
            key,
            directions,
            intermediates,
            tag,
        })
    }
}

/// Parses and validates every record. Errors name the offending record.
pub fn parse_kat(text: &str) -> Result<Vec<KatCase>> {
    let raw: RawFile =
        toml::from_str(text).map_err(|e| Error::parameter(format!("KAT file: {e}")))?;
    raw.record
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let name = value.get("name").and_then(|n| n.as_str()).map(str::to_owned);
            let rec: KatRecord = value
                .try_into()
                .map_err(|e| record_error(i, name.as_deref(), e))?;
            rec.prepare().map_err(|e| record_error(i, name.as_deref(), e))
        })
        .collect()
}

pub fn write_kat(records: &[KatRecord]) -> String {
    toml::to_string(&OutFile { record: records }).expect("KAT serialize")
}

/// Replays one case and lists every disagreement.
pub fn run_case(case: &KatCase, index: usize) -> Result<KatOutcome> {
    let trace = trace_blocks(&case.directions, &case.key, &case.params)
        .map_err(|e| record_error(index, Some(&case.name), e))?;
    let mut mismatches = Vec::new();
    if case.intermediates.len() > trace.states.len() {
        mismatches.push(format!(
            "{} intermediates listed but the walk has {} steps",
            case.intermediates.len(),
            trace.states.len()
        ));
    }
    for (i, (want, got)) in case.intermediates.iter().zip(&trace.states).enumerate() {
        if want != got {
            mismatches.push(format!("step i={i}: expected {want}, got {got}"));
        }
    }
    if trace.tag != case.tag {
        mismatches.push(format!("tag: expected {}, got {}", case.tag, trace.tag));
    }
    Ok(KatOutcome {
        name: case.name.clone(),
        index,
        mismatches,
    })
}

pub fn run_kat(text: &str) -> Result<Vec<KatOutcome>> {
    parse_kat(text)?
        .iter()
        .enumerate()
        .map(|(i, c)| run_case(c, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[[record]]
name = "one step"
blocks = [3]
intermediates = ["L:5,2,6,9,5,9"]
tag_hex = "ab1a"
[record.params]
q = 8
lq = 3
N = 3
n = 6
Q = 11
h = 16
variant = "dmac1"
encoding = "positional"
padding = "zero"
tagmode = "modq"
[record.key]
iv = [1, 8, 4, 2, 7, 0]
s = []
"#;

    #[test]
    fn passes() {
        let out = run_kat(EXAMPLE).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].passed(), "{}", out[0]);
    }

    #[test]
    fn altered_intermediate_names_step() {
        let out = run_kat(&EXAMPLE.replace("L:5,2,6,9,5,9", "L:5,2,6,9,5,8")).unwrap();
        assert!(!out[0].passed());
        assert!(out[0].mismatches[0].starts_with("step i=0"));
    }

    #[test]
    fn altered_tag_fails() {
        let out = run_kat(&EXAMPLE.replace("ab1a", "ab1b")).unwrap();
        assert_eq!(out[0].mismatches.len(), 1);
    }

    #[test]
    fn malformed_records_name_their_index() {
        let two = format!("{EXAMPLE}{}", EXAMPLE.replace("blocks = [3]", "blocks = [3]\nmessage_hex = \"00\""));
        let err = parse_kat(&two).unwrap_err().to_string();
        assert!(err.contains("record 1"), "{err}");

        let err = parse_kat(&EXAMPLE.replace("h = 16", "h = 19")).unwrap_err().to_string();
        assert!(err.contains("record 0"), "{err}");

        let err = parse_kat(&EXAMPLE.replace("name =", "nom =")).unwrap_err().to_string();
        assert!(err.contains("record 0"), "{err}");
    }

    #[test]
    fn write_round_trip() {
        let raw: RawFile = toml::from_str(EXAMPLE).unwrap();
        let recs: Vec<KatRecord> = raw.record.into_iter().map(|v| v.try_into().unwrap()).collect();
        let text = write_kat(&recs);
        assert!(run_kat(&text).unwrap()[0].passed());
    }
}
