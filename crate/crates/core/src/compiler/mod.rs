//! Dictionary compilation: compact tags, the minimal automaton and the
//! binary file format.
//!
//! # Binary layout (version 1)
//!
//! All fixed-width integers are little endian; `varint` is unsigned LEB128.
//!
//! ```text
//! magic        4 bytes  "OTDL"
//! version      u32      1
//! mode         u8       0 = concat, 1 = semitic
//! entries      u32      number of dictionary entries compiled
//! inf_count    u32
//! states       u32
//! transitions  u32
//! inf table    inf_count x (varint byte length, UTF-8 bytes)
//! state table  states x (
//!                varint n_infs, n_infs x varint inf index,
//!                varint n_trans, n_trans x (varint char code,
//!                                           varint zigzag(target - state)))
//! ```

mod madfa;
pub mod tag;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{split_tag, DictEntry, FlatDictionary};
use crate::par;

pub use madfa::{Madfa, MadfaBuilder};
pub use tag::{compute_compact_tag, CompactTag, Mode, TagError};

pub const MAGIC: &[u8; 4] = b"OTDL";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("not a compiled dictionary (bad magic)")]
    BadMagic,
    #[error("format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("file is truncated")]
    Truncated,
    #[error("corrupt dictionary: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Header {
    pub version: u32,
    pub mode: Mode,
    pub entries: u32,
    pub inf_count: u32,
    pub states: u32,
    pub transitions: u32,
}

/// Compiled dictionary: automaton plus compact-tag table.
#[derive(Debug, Clone)]
pub struct CompiledDictionary {
    pub header: Header,
    pub madfa: Madfa,
    pub infs: Vec<String>,
    parsed: Vec<CompactTag>,
    fingerprint: u64,
}

impl PartialEq for CompiledDictionary {
    fn eq(&self, other: &Self) -> bool {
        self.header == other.header && self.madfa == other.madfa && self.infs == other.infs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub entries: usize,
    pub inf_count: usize,
    pub states: usize,
    pub transitions: usize,
    pub bytes: usize,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Number of entries\t{}", self.entries)?;
        writeln!(f, "Bin size (bytes)\t{}", self.bytes)?;
        writeln!(f, "INF entries\t{}", self.inf_count)?;
        writeln!(f, "States\t{}", self.states)?;
        write!(f, "Transitions\t{}", self.transitions)
    }
}

impl CompiledDictionary {
    /// Compiles `dict`. Identical input yields byte-identical output.
    pub fn build(dict: &FlatDictionary, mode: Mode) -> CompiledDictionary {
        let tags: Vec<String> = par::map(&dict.entries, |e| {
            compute_compact_tag(&e.surface, &e.lemma, &e.annotation(), mode).render()
        });
        // INF table in sorted order so numbering is input-order independent.
        let mut inf_ids: BTreeMap<&str, u32> = tags.iter().map(|t| (t.as_str(), 0)).collect();
        for (i, v) in inf_ids.values_mut().enumerate() {
            *v = i as u32;
        }
        let mut by_surface: BTreeMap<Vec<char>, Vec<u32>> = BTreeMap::new();
        for (e, t) in dict.entries.iter().zip(&tags) {
            by_surface
                .entry(e.surface.chars().collect())
                .or_default()
                .push(inf_ids[t.as_str()]);
        }
        let mut builder = MadfaBuilder::new();
        for (surface, infs) in by_surface {
            builder.insert(&surface, infs);
        }
        let madfa = builder.finish();
        let infs: Vec<String> = inf_ids.into_keys().map(str::to_string).collect();
        let header = Header {
            version: FORMAT_VERSION,
            mode,
            entries: dict.entries.len() as u32,
            inf_count: infs.len() as u32,
            states: madfa.state_count() as u32,
            transitions: madfa.transition_count() as u32,
        };
        Self::assemble(header, madfa, infs).expect("freshly computed tags parse")
    }

    fn assemble(header: Header, madfa: Madfa, infs: Vec<String>) -> Result<Self, FormatError> {
        let parsed = infs
            .iter()
            .map(|t| CompactTag::parse(t, header.mode))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| FormatError::Corrupt(e.to_string()))?;
        let mut cd = CompiledDictionary {
            header,
            madfa,
            infs,
            parsed,
            fingerprint: 0,
        };
        let mut h = std::collections::hash_map::DefaultHasher::new();
        cd.to_bytes().hash(&mut h);
        cd.fingerprint = h.finish();
        Ok(cd)
    }

    pub fn mode(&self) -> Mode {
        self.header.mode
    }

    /// Digest of the serialized form.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn accepts(&self, surface: &str) -> bool {
        self.madfa.accepts(surface)
    }

    /// Entries stored under the final state `state` reached by `surface`.
    pub fn entries_at(&self, surface: &str, state: u32) -> Vec<DictEntry> {
        self.madfa
            .state_infs(state)
            .iter()
            .filter_map(|&i| self.expand_entry(surface, i as usize))
            .collect()
    }

    /// All entries whose surface is exactly `surface`.
    pub fn lookup_exact(&self, surface: &str) -> Vec<DictEntry> {
        match self.madfa.walk(surface) {
            Some(s) if self.madfa.is_final(s) => self.entries_at(surface, s),
            _ => Vec::new(),
        }
    }

    fn expand_entry(&self, surface: &str, inf: usize) -> Option<DictEntry> {
        let full = self.parsed.get(inf)?.expand(surface).ok()?;
        let dot = full.len() - self.parsed[inf].annotation.len();
        let (lemma, annotation) = full.split_at(dot);
        let tag = split_tag(annotation.strip_prefix('.')?)?;
        Some(DictEntry {
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            pos: tag.pos,
            sem: tag.sem,
            codes: tag.codes,
        })
    }

    /// Every entry, sorted by surface.
    pub fn entries(&self) -> Vec<DictEntry> {
        self.madfa
            .words()
            .into_iter()
            .flat_map(|(w, infs)| {
                infs.into_iter()
                    .filter_map(|i| self.expand_entry(&w, i as usize))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn stats(&self) -> Stats {
        Stats {
            entries: self.header.entries as usize,
            inf_count: self.infs.len(),
            states: self.madfa.state_count(),
            transitions: self.madfa.transition_count(),
            bytes: self.to_bytes().len(),
        }
    }

    /// Human-readable INF table, one tag per line.
    pub fn inf_listing(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.infs.iter().enumerate() {
            out.push_str(&format!("{i}\t{}\n", tag::listing_form(t, self.mode())));
        }
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.header.version.to_le_bytes());
        out.push(self.header.mode.as_byte());
        for v in [
            self.header.entries,
            self.infs.len() as u32,
            self.madfa.state_count() as u32,
            self.madfa.transition_count() as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for t in &self.infs {
            put_varint(&mut out, t.len() as u64);
            out.extend_from_slice(t.as_bytes());
        }
        for s in 0..self.madfa.state_count() as u32 {
            let infs = self.madfa.state_infs(s);
            put_varint(&mut out, infs.len() as u64);
            for &i in infs {
                put_varint(&mut out, i as u64);
            }
            let n = self.madfa.transitions(s).count();
            put_varint(&mut out, n as u64);
            for (c, t) in self.madfa.transitions(s) {
                put_varint(&mut out, c as u64);
                put_varint(&mut out, zigzag(t as i64 - s as i64));
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4).map_err(|_| FormatError::BadMagic)? != MAGIC {
            return Err(FormatError::BadMagic);
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(FormatError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let mode = Mode::from_byte(r.u8()?)
            .ok_or_else(|| FormatError::Corrupt("unknown mode byte".into()))?;
        let entries = r.u32()?;
        let inf_count = r.u32()?;
        let states = r.u32()?;
        let transitions = r.u32()?;
        let mut infs = Vec::with_capacity(inf_count.min(1 << 20) as usize);
        for _ in 0..inf_count {
            let len = r.varint()? as usize;
            let s = std::str::from_utf8(r.take(len)?)
                .map_err(|_| FormatError::Corrupt("INF entry is not UTF-8".into()))?;
            infs.push(s.to_string());
        }
        let mut m = Madfa {
            trans_start: vec![0],
            inf_start: vec![0],
            ..Default::default()
        };
        for s in 0..states {
            let n_infs = r.varint()?;
            for _ in 0..n_infs {
                let i = r.varint()?;
                if i >= inf_count as u64 {
                    return Err(FormatError::Corrupt(format!("INF index {i} out of range")));
                }
                m.infs.push(i as u32);
            }
            let n_trans = r.varint()?;
            for _ in 0..n_trans {
                let c = char::from_u32(r.varint()? as u32)
                    .ok_or_else(|| FormatError::Corrupt("invalid character".into()))?;
                let t = s as i64 + unzigzag(r.varint()?);
                if t < 0 || t >= states as i64 {
                    return Err(FormatError::Corrupt(format!("target {t} out of range")));
                }
                m.trans_char.push(c);
                m.trans_target.push(t as u32);
            }
            m.trans_start.push(m.trans_char.len() as u32);
            m.inf_start.push(m.infs.len() as u32);
        }
        if r.pos != bytes.len() {
            return Err(FormatError::Corrupt("trailing bytes".into()));
        }
        if m.transition_count() != transitions as usize {
            return Err(FormatError::Corrupt("transition count mismatch".into()));
        }
        m.check().map_err(FormatError::Corrupt)?;
        let header = Header {
            version,
            mode,
            entries,
            inf_count,
            states,
            transitions,
        };
        Self::assemble(header, m, infs)
    }

    pub fn serialize(&self, path: impl AsRef<Path>) -> Result<(), FormatError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn deserialize(path: impl AsRef<Path>) -> Result<Self, FormatError> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Entry counts per INF index, most shared first.
    pub fn inf_usage(&self) -> Vec<(String, usize)> {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for (_, infs) in self.madfa.words() {
            for i in infs {
                *counts.entry(i).or_default() += 1;
            }
        }
        let mut out: Vec<(String, usize)> = counts
            .into_iter()
            .map(|(i, n)| (self.infs[i as usize].clone(), n))
            .collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).ok_or(FormatError::Truncated)?;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or(FormatError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64, FormatError> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.u8()?;
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(FormatError::Corrupt("varint too long".into()))
    }
}
