//! Full-form dictionary lines, the tagset, and lexical masks.
//!
//! Line format: `surface,lemma.POS[+feat]*[:code]*`, where `/` starts a
//! comment running to the end of the line. Several `:code` groups on one
//! line are alternative codes for the same surface.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Part-of-speech codes.
pub const POS_TAGS: &[&str] = &[
    "V", "N", "NPr", "A", "EL", "ADV", "PREP", "PRO", "CONJC", "CONJS", "INTJ", "DET", "INNA",
    "PRTCL",
];

const VERB_FEATURES: &str = "mfsdpabPIYFMNSJE123DiAG";
const NOMINAL_FEATURES: &str = "mfsdpqDaiNAG";
const ADVERB_FEATURES: &str = "iA";
const PRONOUN_FEATURES: &str = "mfsdp123";

/// Inflectional feature characters a POS may carry in its codes.
pub fn feature_chars(pos: &str) -> Option<&'static str> {
    match pos {
        "V" => Some(VERB_FEATURES),
        "N" | "NPr" | "A" | "EL" => Some(NOMINAL_FEATURES),
        "ADV" => Some(ADVERB_FEATURES),
        "PRO" => Some(PRONOUN_FEATURES),
        "PREP" | "CONJC" | "CONJS" | "INTJ" | "DET" | "INNA" | "PRTCL" => Some(""),
        _ => None,
    }
}

pub fn is_known_pos(pos: &str) -> bool {
    POS_TAGS.contains(&pos)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: malformed entry: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("line {line}: unknown part of speech `{pos}`")]
    UnknownPos { line: usize, pos: String },
    #[error("line {line}: feature `{ch}` is not valid for {pos}")]
    UnknownFeatureChar { line: usize, pos: String, ch: char },
    #[error("line {line}: +pro and +nopro on the same entry")]
    ConflictingPro { line: usize },
    #[error("malformed mask `{0}`")]
    MalformedMask(String),
}

/// One fully vowelized surface form with its lemma and tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct DictEntry {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    /// Semantic/syntactic features without the leading `+`; negative
    /// features keep their `-` (e.g. `-Hum`).
    pub sem: Vec<String>,
    pub codes: Vec<String>,
}

impl DictEntry {
    /// `.POS+feat:code` as it appears after the lemma.
    pub fn annotation(&self) -> String {
        let mut out = String::from(".");
        out.push_str(&render_tag(&self.pos, &self.sem, &self.codes));
        out
    }

    pub fn has_sem(&self, feature: &str) -> bool {
        self.sem.iter().any(|f| f == feature)
    }
}

impl fmt::Display for DictEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}{}", self.surface, self.lemma, self.annotation())
    }
}

/// `POS+feat:code:code`
pub fn render_tag(pos: &str, sem: &[String], codes: &[String]) -> String {
    let mut out = String::from(pos);
    for f in sem {
        if !f.starts_with('-') {
            out.push('+');
        }
        out.push_str(f);
    }
    for c in codes {
        out.push(':');
        out.push_str(c);
    }
    out
}

/// Parsed `POS[+feat]*[:code]*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tag {
    pub pos: String,
    pub sem: Vec<String>,
    pub codes: Vec<String>,
}

/// Structural split of a tag; no tagset validation.
pub fn split_tag(text: &str) -> Option<Tag> {
    let mut groups = text.split(':');
    let head = groups.next()?;
    let codes: Vec<String> = groups.map(str::to_string).collect();
    if codes.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in head.char_indices() {
        if (c == '+' || c == '-') && i > 0 {
            parts.push(&head[start..i]);
            start = i;
        }
    }
    parts.push(&head[start..]);
    let pos = parts[0].to_string();
    if pos.is_empty() || pos.starts_with('+') || pos.starts_with('-') {
        return None;
    }
    let mut sem = Vec::new();
    for p in &parts[1..] {
        let f = p.strip_prefix('+').unwrap_or(p);
        if f.is_empty() || f == "-" {
            return None;
        }
        sem.push(f.to_string());
    }
    Some(Tag { pos, sem, codes })
}

fn validate_tag(tag: &Tag, line: usize) -> Result<(), LexiconError> {
    let allowed = feature_chars(&tag.pos).ok_or_else(|| LexiconError::UnknownPos {
        line,
        pos: tag.pos.clone(),
    })?;
    for code in &tag.codes {
        if let Some(ch) = code.chars().find(|c| !allowed.contains(*c)) {
            return Err(LexiconError::UnknownFeatureChar {
                line,
                pos: tag.pos.clone(),
                ch,
            });
        }
    }
    if tag.sem.iter().any(|f| f == "pro") && tag.sem.iter().any(|f| f == "nopro") {
        return Err(LexiconError::ConflictingPro { line });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line {
    Entry(DictEntry),
    Comment,
    Blank,
}

fn strip_comment(line: &str) -> (&str, bool) {
    match line.find('/') {
        Some(i) => (&line[..i], true),
        None => (line, false),
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> LexiconError {
    LexiconError::MalformedEntry {
        line,
        reason: reason.into(),
    }
}

fn is_raw_arabic_mark(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{065F}' | '\u{0670}')
}

/// Parses one dictionary line. `line_no` is only used for diagnostics.
pub fn parse_entry_at(text: &str, line_no: usize) -> Result<Line, LexiconError> {
    let (body, had_comment) = strip_comment(text);
    let body = body.trim();
    if body.is_empty() {
        return Ok(if had_comment {
            Line::Comment
        } else {
            Line::Blank
        });
    }
    let (surface, rest) = body
        .split_once(',')
        .ok_or_else(|| malformed(line_no, "missing `,`"))?;
    let (lemma, tag_text) = rest
        .split_once('.')
        .ok_or_else(|| malformed(line_no, "missing `.` before the tag"))?;
    let surface = surface.trim();
    let lemma = lemma.trim();
    if surface.is_empty() {
        return Err(malformed(line_no, "empty surface form"));
    }
    if lemma.is_empty() {
        return Err(malformed(line_no, "empty lemma"));
    }
    if let Some(c) = surface
        .chars()
        .find(|&c| c.is_whitespace() || is_raw_arabic_mark(c))
    {
        return Err(malformed(
            line_no,
            format!("character {c:?} not allowed in a surface form"),
        ));
    }
    let tag = split_tag(tag_text.trim()).ok_or_else(|| malformed(line_no, "malformed tag"))?;
    validate_tag(&tag, line_no)?;
    Ok(Line::Entry(DictEntry {
        surface: surface.to_string(),
        lemma: lemma.to_string(),
        pos: tag.pos,
        sem: tag.sem,
        codes: tag.codes,
    }))
}

pub fn parse_entry(text: &str) -> Result<Line, LexiconError> {
    parse_entry_at(text, 0)
}

/// Pattern `<[lemma.]POS[+feat]*[:group]*>` over dictionary entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexicalMask {
    pub lemma: Option<String>,
    pub pos: String,
    pub sem: Vec<String>,
    pub groups: Vec<BTreeSet<char>>,
}

impl LexicalMask {
    /// Whether the mask accepts `entry` with the specific inflection code
    /// `code` (`None` for entries without codes).
    pub fn matches_code(&self, entry: &DictEntry, code: Option<&str>) -> bool {
        if self.pos != entry.pos {
            return false;
        }
        if let Some(lemma) = &self.lemma {
            if *lemma != entry.lemma {
                return false;
            }
        }
        if !self.sem.iter().all(|f| entry.has_sem(f)) {
            return false;
        }
        if self.groups.is_empty() {
            return true;
        }
        let Some(code) = code else { return false };
        self.groups
            .iter()
            .any(|g| g.iter().all(|ch| code.contains(*ch)))
    }
}

impl fmt::Display for LexicalMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        if let Some(l) = &self.lemma {
            write!(f, "{l}.")?;
        }
        let groups: Vec<String> = self.groups.iter().map(|g| g.iter().collect()).collect();
        write!(f, "{}>", render_tag(&self.pos, &self.sem, &groups))
    }
}

pub fn parse_mask(text: &str) -> Result<LexicalMask, LexiconError> {
    let bad = || LexiconError::MalformedMask(text.to_string());
    let inner = text
        .trim()
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .ok_or_else(bad)?;
    let head_end = inner.find(':').unwrap_or(inner.len());
    let (lemma, tag_text) = match inner[..head_end].find('.') {
        Some(dot) => (Some(inner[..dot].to_string()), &inner[dot + 1..]),
        None => (None, inner),
    };
    if lemma.as_deref() == Some("") {
        return Err(bad());
    }
    let tag = split_tag(tag_text).ok_or_else(bad)?;
    if !is_known_pos(&tag.pos) {
        return Err(bad());
    }
    Ok(LexicalMask {
        lemma,
        pos: tag.pos,
        sem: tag.sem,
        groups: tag.codes.iter().map(|g| g.chars().collect()).collect(),
    })
}

/// Whether `mask` accepts `entry` under at least one of its codes.
pub fn mask_matches(mask: &LexicalMask, entry: &DictEntry) -> bool {
    if entry.codes.is_empty() {
        return mask.matches_code(entry, None);
    }
    entry
        .codes
        .iter()
        .any(|c| mask.matches_code(entry, Some(c)))
}

#[derive(Debug, Clone, Default)]
pub struct FlatDictionary {
    pub entries: Vec<DictEntry>,
    /// 1-based source line of each entry.
    pub lines: Vec<usize>,
    pub diagnostics: Vec<LexiconError>,
}

impl FlatDictionary {
    pub fn parse(text: &str) -> Self {
        let mut dict = FlatDictionary::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            match parse_entry_at(raw, i + 1) {
                Ok(Line::Entry(e)) => {
                    if seen.insert(e.clone()) {
                        dict.entries.push(e);
                        dict.lines.push(i + 1);
                    }
                }
                Ok(_) => {}
                Err(err) => dict.diagnostics.push(err),
            }
        }
        dict
    }

    pub fn from_entries(entries: impl IntoIterator<Item = DictEntry>) -> Self {
        let mut dict = FlatDictionary::default();
        let mut seen = std::collections::HashSet::new();
        for (i, e) in entries.into_iter().enumerate() {
            if seen.insert(e.clone()) {
                dict.entries.push(e);
                dict.lines.push(i + 1);
            }
        }
        dict
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn load_flat(path: impl AsRef<Path>) -> std::io::Result<FlatDictionary> {
    let text = std::fs::read_to_string(path)?;
    Ok(FlatDictionary::parse(&text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(line: &str) -> DictEntry {
        match parse_entry(line).unwrap() {
            Line::Entry(e) => e,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_verb_entry() {
        let e = entry("takotubu,ktb.V:aI3fsN");
        assert_eq!(e.surface, "takotubu");
        assert_eq!(e.lemma, "ktb");
        assert_eq!(e.pos, "V");
        assert_eq!(e.codes, vec!["aI3fsN"]);
        assert_eq!(e.to_string(), "takotubu,ktb.V:aI3fsN");
    }

    #[test]
    fn comments_and_blanks() {
        assert_eq!(parse_entry("/ a comment line").unwrap(), Line::Comment);
        assert_eq!(parse_entry("   ").unwrap(), Line::Blank);
        let e = entry("takotubu,ktb.V:aI3fsN /active-Imperfect");
        assert_eq!(e.codes, vec!["aI3fsN"]);
    }

    #[test]
    fn noun_plural_entry() {
        let e = entry("nufaAyaAtu,nufaAyap.N:fpDN");
        assert_eq!(e.pos, "N");
        assert_eq!(e.codes, vec!["fpDN"]);
    }

    #[test]
    fn sem_features_and_multiple_codes() {
        let e = entry("haA,hiya.PRO+Ppers+Acc:3fs");
        assert_eq!(e.sem, vec!["Ppers", "Acc"]);
        let e = entry("x,y.PRO+Prel-Hum:s");
        assert_eq!(e.sem, vec!["Prel", "-Hum"]);
        assert_eq!(e.to_string(), "x,y.PRO+Prel-Hum:s");
        let e = entry("kutubN,kitaAb.N:qiN:qiG");
        assert_eq!(e.codes.len(), 2);
        let e = entry("Al,Al.DET");
        assert!(e.codes.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_entry_at("kataba ktb.V", 7),
            Err(LexiconError::MalformedEntry { line: 7, .. })
        ));
        assert!(matches!(
            parse_entry_at("kataba,ktb", 3),
            Err(LexiconError::MalformedEntry { line: 3, .. })
        ));
        assert!(matches!(
            parse_entry_at("kataba,ktb.Q:aP3ms", 2),
            Err(LexiconError::UnknownPos { line: 2, .. })
        ));
        assert!(matches!(
            parse_entry_at("kataba,ktb.N:aP3ms", 2),
            Err(LexiconError::UnknownFeatureChar { ch: 'P', .. })
        ));
        assert!(matches!(
            parse_entry_at("kataba,ktb.V+pro+nopro:aP3ms", 9),
            Err(LexiconError::ConflictingPro { line: 9 })
        ));
    }

    #[test]
    fn flat_file_collects_diagnostics_and_dedups() {
        let text = "kataba,ktb.V:aP3ms\nkataba,ktb.V:aP3ms\nbad line\n\nkataba,ktb.V:bP3ms\n";
        let d = FlatDictionary::parse(text);
        assert_eq!(d.len(), 2);
        assert_eq!(d.lines, vec![1, 5]);
        assert_eq!(d.diagnostics.len(), 1);
    }

    #[test]
    fn masks() {
        let m = parse_mask("<V:aI3mp>").unwrap();
        assert_eq!(m.pos, "V");
        assert_eq!(m.groups, vec!["aI3mp".chars().collect()]);
        let m = parse_mask("<N>").unwrap();
        assert!(m.groups.is_empty() && m.lemma.is_none());
        let m = parse_mask("<PRO+Ppers+Acc:3fs>").unwrap();
        assert_eq!(m.sem, vec!["Ppers", "Acc"]);
        assert_eq!(m.groups, vec!["3fs".chars().collect()]);
        let m = parse_mask("<SuHaAfiyG.N:G>").unwrap();
        assert_eq!(m.lemma.as_deref(), Some("SuHaAfiyG"));
        assert_eq!(m.to_string(), "<SuHaAfiyG.N:G>");
        for bad in ["V:a", "<>", "<.N>", "<Q>", "<N:>"] {
            assert!(parse_mask(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn mask_matching() {
        let noun = entry("SuHaAfiyGaAti,SuHaAfiyG.N:fpDG");
        assert!(mask_matches(&parse_mask("<N:G>").unwrap(), &noun));
        assert!(mask_matches(&parse_mask("<SuHaAfiyG.N:G>").unwrap(), &noun));
        assert!(!mask_matches(&parse_mask("<x.N:G>").unwrap(), &noun));
        assert!(!mask_matches(&parse_mask("<N:A>").unwrap(), &noun));
        let v = entry("kataba,ktb.V:aP3ms");
        assert!(mask_matches(&parse_mask("<V:aP3ms>").unwrap(), &v));
        assert!(mask_matches(&parse_mask("<V:N:P>").unwrap(), &v));
        let vp = entry("katabuw,ktb.V+pro:aP3mp");
        assert!(!mask_matches(&parse_mask("<V+nopro:aP3mp>").unwrap(), &vp));
        assert!(mask_matches(&parse_mask("<V+pro>").unwrap(), &vp));
    }

    /// Full noun paradigm: 2 genders x 3 numbers x 3 definiteness x 3
    /// cases. A genitive mask keeps exactly one case in three.
    #[test]
    fn genitive_mask_keeps_a_third_of_a_paradigm() {
        let mask = parse_mask("<SuHaAfiyG.N:G>").unwrap();
        let mut total = 0;
        let mut hits = 0;
        for g in ['m', 'f'] {
            for n in ['s', 'd', 'p'] {
                for d in ['D', 'a', 'i'] {
                    for c in ['N', 'A', 'G'] {
                        let e = DictEntry {
                            surface: "x".into(),
                            lemma: "SuHaAfiyG".into(),
                            pos: "N".into(),
                            sem: vec![],
                            codes: vec![format!("{g}{n}{d}{c}")],
                        };
                        total += 1;
                        hits += mask_matches(&mask, &e) as usize;
                    }
                }
            }
        }
        assert_eq!((total, hits), (54, 18));
    }

    proptest! {
        #[test]
        fn entry_render_round_trips(
            surface in "[a-zA-Z]{1,10}",
            lemma in "[a-zA-Z]{1,8}",
            codes in proptest::collection::vec("[mfsdpqDaiNAG]{1,4}", 0..3),
            sem in proptest::collection::vec("[A-Z][a-z]{1,4}", 0..3),
        ) {
            let e = DictEntry { surface, lemma, pos: "N".into(), sem, codes };
            prop_assert_eq!(parse_entry(&e.to_string()).unwrap(), Line::Entry(e.clone()));
        }

        #[test]
        fn removing_a_mask_feature_never_shrinks_matches(
            code in "[mfsdpqDaiNAG]{1,5}",
            group in "[mfsdpqDaiNAG]{1,4}",
            drop in 0usize..4,
        ) {
            let e = DictEntry {
                surface: "x".into(), lemma: "y".into(), pos: "N".into(),
                sem: vec![], codes: vec![code],
            };
            let full = parse_mask(&format!("<N:{group}>")).unwrap();
            let mut smaller = full.clone();
            let victim = *smaller.groups[0].iter().nth(drop % smaller.groups[0].len()).unwrap();
            smaller.groups[0].remove(&victim);
            if mask_matches(&full, &e) {
                prop_assert!(mask_matches(&smaller, &e));
            }
        }

        #[test]
        fn tagset_rejects_exactly_foreign_characters(code in "[a-zA-Z0-9]{1,6}") {
            let line = format!("x,y.N:{code}");
            let ok = code.chars().all(|c| NOMINAL_FEATURES.contains(c));
            prop_assert_eq!(parse_entry(&line).is_ok(), ok);
        }
    }
}
