//! Compact tags: per-entry instructions rebuilding `lemma.annotation` from
//! the surface form.
//!
//! Two encodings exist. Suffix tags (`1.V:P3s`) remove `n` characters from
//! the end of the surface and append a literal. Semitic tags (`246.V:...`)
//! list surface positions to copy, interleaved with literal characters.
//! Positions 0-9 are single digits, larger ones are written `(NN)`, and
//! literal digits or syntax characters are escaped with `\`. The annotation
//! starts at the first unescaped `.`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which encoding a dictionary uses for its compact tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Suffix removal plus literal (concatenative morphology).
    Concat,
    /// Position copies interleaved with literals.
    Semitic,
}

impl Mode {
    pub fn as_byte(self) -> u8 {
        match self {
            Mode::Concat => 0,
            Mode::Semitic => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Mode> {
        match b {
            0 => Some(Mode::Concat),
            1 => Some(Mode::Semitic),
            _ => None,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "concat" => Ok(Mode::Concat),
            "semitic" => Ok(Mode::Semitic),
            _ => Err(format!("unknown mode `{s}` (expected semitic or concat)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Concat => "concat",
            Mode::Semitic => "semitic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagItem {
    Copy(usize),
    Lit(char),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TagBody {
    Semitic(Vec<TagItem>),
    Suffix { remove: usize, literal: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompactTag {
    pub body: TagBody,
    /// `.POS...` exactly as in the entry, or empty.
    pub annotation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("tag `{tag}` refers to position {index} of a {len}-character surface")]
    IndexOutOfRange {
        tag: String,
        index: usize,
        len: usize,
    },
    #[error("malformed compact tag `{0}`")]
    Malformed(String),
}

fn needs_escape(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '\\' | '(' | ')' | '.')
}

fn push_lit(out: &mut String, c: char) {
    if needs_escape(c) {
        out.push('\\');
    }
    out.push(c);
}

impl CompactTag {
    pub fn mode(&self) -> Mode {
        match self.body {
            TagBody::Semitic(_) => Mode::Semitic,
            TagBody::Suffix { .. } => Mode::Concat,
        }
    }

    /// Number of lemma characters taken from the surface.
    pub fn copied(&self, surface_len: usize) -> usize {
        match &self.body {
            TagBody::Semitic(items) => items
                .iter()
                .filter(|i| matches!(i, TagItem::Copy(_)))
                .count(),
            TagBody::Suffix { remove, .. } => surface_len.saturating_sub(*remove),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.body {
            TagBody::Semitic(items) => {
                for item in items {
                    match *item {
                        TagItem::Copy(k) if k < 10 => out.push(char::from(b'0' + k as u8)),
                        TagItem::Copy(k) => out.push_str(&format!("({k})")),
                        TagItem::Lit(c) => push_lit(&mut out, c),
                    }
                }
            }
            TagBody::Suffix { remove, literal } => {
                out.push_str(&remove.to_string());
                for c in literal.chars() {
                    push_lit(&mut out, c);
                }
            }
        }
        out.push_str(&self.annotation);
        out
    }

    pub fn parse(text: &str, mode: Mode) -> Result<CompactTag, TagError> {
        let bad = || TagError::Malformed(text.to_string());
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let mut items = Vec::new();
        let mut annotation_at = chars.len();
        while i < chars.len() {
            match chars[i] {
                '.' => {
                    annotation_at = i;
                    break;
                }
                '\\' => {
                    let c = *chars.get(i + 1).ok_or_else(bad)?;
                    items.push(TagItem::Lit(c));
                    i += 2;
                }
                '(' => {
                    let close = chars[i..].iter().position(|&c| c == ')').ok_or_else(bad)? + i;
                    let digits: String = chars[i + 1..close].iter().collect();
                    let k = digits.parse().map_err(|_| bad())?;
                    items.push(TagItem::Copy(k));
                    i = close + 1;
                }
                c if c.is_ascii_digit() => {
                    items.push(TagItem::Copy(c as usize - '0' as usize));
                    i += 1;
                }
                c => {
                    items.push(TagItem::Lit(c));
                    i += 1;
                }
            }
        }
        let annotation: String = chars[annotation_at..].iter().collect();
        let body = match mode {
            Mode::Semitic => TagBody::Semitic(items),
            Mode::Concat => {
                // Leading copies form the removal count, written in decimal.
                let digits: String = chars[..annotation_at]
                    .iter()
                    .take_while(|c| c.is_ascii_digit())
                    .collect();
                let remove = digits.parse().map_err(|_| bad())?;
                let mut literal = String::new();
                for item in &items[digits.len()..] {
                    match item {
                        TagItem::Lit(c) => literal.push(*c),
                        TagItem::Copy(_) => return Err(bad()),
                    }
                }
                TagBody::Suffix { remove, literal }
            }
        };
        Ok(CompactTag { body, annotation })
    }

    /// Rebuilds `lemma + annotation` from `surface`.
    pub fn expand(&self, surface: &str) -> Result<String, TagError> {
        let chars: Vec<char> = surface.chars().collect();
        let oob = |index| TagError::IndexOutOfRange {
            tag: self.render(),
            index,
            len: chars.len(),
        };
        let mut out = String::new();
        match &self.body {
            TagBody::Semitic(items) => {
                for item in items {
                    match *item {
                        TagItem::Copy(k) => out.push(*chars.get(k).ok_or_else(|| oob(k))?),
                        TagItem::Lit(c) => out.push(c),
                    }
                }
            }
            TagBody::Suffix { remove, literal } => {
                if *remove > chars.len() {
                    return Err(oob(*remove));
                }
                out.extend(&chars[..chars.len() - remove]);
                out.push_str(literal);
            }
        }
        out.push_str(&self.annotation);
        Ok(out)
    }
}

impl fmt::Display for CompactTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Copy positions of a longest common subsequence of `lemma` in `surface`,
/// paired with the lemma positions they fill. Among maximal alignments the
/// lexicographically smallest surface index sequence wins.
fn best_alignment(surface: &[char], lemma: &[char]) -> Vec<(usize, usize)> {
    let (n, m) = (surface.len(), lemma.len());
    // lcs[i][j]: LCS length of surface[i..] and lemma[j..]
    let mut lcs = vec![vec![0u16; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if surface[i] == lemma[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while lcs[i][j] > 0 {
        let want = lcs[i][j];
        let step = (i..n).find_map(|k| {
            (j..m)
                .find(|&l| surface[k] == lemma[l] && lcs[k + 1][l + 1] + 1 == want)
                .map(|l| (k, l))
        });
        let (k, l) = step.expect("an LCS step always exists");
        out.push((k, l));
        i = k + 1;
        j = l + 1;
    }
    out
}

/// The compact tag for one entry. `annotation` includes its leading `.`.
pub fn compute_compact_tag(surface: &str, lemma: &str, annotation: &str, mode: Mode) -> CompactTag {
    let s: Vec<char> = surface.chars().collect();
    let l: Vec<char> = lemma.chars().collect();
    let body = match mode {
        Mode::Semitic => {
            let mut items = Vec::with_capacity(l.len());
            let mut next_lemma = 0;
            for (k, pos) in best_alignment(&s, &l) {
                items.extend(l[next_lemma..pos].iter().map(|&c| TagItem::Lit(c)));
                items.push(TagItem::Copy(k));
                next_lemma = pos + 1;
            }
            items.extend(l[next_lemma..].iter().map(|&c| TagItem::Lit(c)));
            TagBody::Semitic(items)
        }
        Mode::Concat => {
            let common = s.iter().zip(&l).take_while(|(a, b)| a == b).count();
            TagBody::Suffix {
                remove: s.len() - common,
                literal: l[common..].iter().collect(),
            }
        }
    };
    CompactTag {
        body,
        annotation: annotation.to_string(),
    }
}

/// Debug listing form: Semitic tags carry a `__` marker.
pub fn listing_form(tag: &str, mode: Mode) -> String {
    match mode {
        Mode::Semitic => format!("__{tag}"),
        Mode::Concat => tag.to_string(),
    }
}
