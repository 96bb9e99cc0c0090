//! Typographical rules: which text-side spellings are tolerated for each
//! dictionary-side unit.
//!
//! A dictionary surface is cut into units left to right by [`split_unit`]:
//! a bare letter, a diacritic cluster (`a`, `Ga`, `GN`, `GR`, ...), or a
//! word-final nunation seat (`FA`, `FY`, `GFA`, `AF`, `YF`). Each unit has a
//! small set of text realizations that depends on the active
//! [`TypoRuleSet`] and on where the unit sits in the word.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::alphabet::{is_coronal, is_diacritic, is_lunar};

macro_rules! rules {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// One named switch of the rule file.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Rule { $($variant),* }

        impl Rule {
            pub const ALL: &'static [Rule] = &[$(Rule::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Rule::$variant => $name),* }
            }
        }
    };
}

rules! {
    FathaOmission => "fatha omission",
    DammaOmission => "damma omission",
    KasraOmission => "kasra omission",
    SukunOmission => "sukun omission",
    SuperscriptAlefOmission => "superscript alef omission",
    FathatanOmissionAtEnd => "fathatan omission at end",
    DammatanOmissionAtEnd => "dammatan omission at end",
    KasratanOmissionAtEnd => "kasratan omission at end",
    ShaddaFathaOmissionAtEnd => "shadda fatha omission at end",
    ShaddaDammaOmissionAtEnd => "shadda damma omission at end",
    ShaddaKasraOmissionAtEnd => "shadda kasra omission at end",
    ShaddaFathatanOmissionAtEnd => "shadda fathatan omission at end",
    ShaddaDammatanOmissionAtEnd => "shadda dammatan omission at end",
    ShaddaKasratanOmissionAtEnd => "shadda kasratan omission at end",
    ShaddaFathaOmission => "shadda fatha omission",
    ShaddaDammaOmission => "shadda damma omission",
    ShaddaKasraOmission => "shadda kasra omission",
    ShaddaSuperscriptAlefOmission => "shadda superscript alef omission",
    SolarAssimilation => "solar assimilation",
    LunarAssimilation => "lunar assimilation",
    AlWithWasla => "Al with wasla",
    HamzaAboveOToA => "alef hamza above O to A",
    HamzaBelowIToA => "alef hamza below I to A",
    HamzaBelowIToL => "alef hamza below I to L",
    FathatanAlefInversion => "fathatan alef equiv alef fathatan",
    FathatanAlefMaqsuraInversion => "fathatan alef maqsura equiv alef maqsura fathatan",
}

impl Rule {
    /// Canonical names plus the spellings found in the distributed rule
    /// file (`alef hamza above O`, `shadda dammatar ...`).
    pub fn from_name(name: &str) -> Option<Rule> {
        let name = name.trim();
        match name {
            "alef hamza above O" => return Some(Rule::HamzaAboveOToA),
            "shadda dammatar omission at end" => return Some(Rule::ShaddaDammatanOmissionAtEnd),
            _ => {}
        }
        Rule::ALL.iter().copied().find(|r| r.name() == name)
    }

    pub fn is_substitution(self) -> bool {
        matches!(
            self,
            Rule::HamzaAboveOToA
                | Rule::HamzaBelowIToA
                | Rule::HamzaBelowIToL
                | Rule::AlWithWasla
                | Rule::FathatanAlefInversion
                | Rule::FathatanAlefMaqsuraInversion
                | Rule::SolarAssimilation
                | Rule::LunarAssimilation
        )
    }
}

const RULE_COUNT: usize = 26;

/// The distributed default rule file.
pub const DEFAULT_RULES: &str = include_str!("../data/Arabic-typo-rules.txt");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {line}: unknown rule name `{name}`")]
    UnknownRuleName { line: usize, name: String },
    #[error("line {line}: expected `name=YES` or `name=NO`")]
    MalformedLine { line: usize },
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct IoError(pub String);

/// Named boolean switches. Rules not mentioned are off.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TypoRuleSet {
    flags: [bool; RULE_COUNT],
}

impl fmt::Debug for TypoRuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on: Vec<&str> = Rule::ALL
            .iter()
            .filter(|r| self.enabled(**r))
            .map(|r| r.name())
            .collect();
        f.debug_struct("TypoRuleSet").field("enabled", &on).finish()
    }
}

impl TypoRuleSet {
    /// Every rule off: lookup degenerates to exact matching.
    pub fn strict() -> Self {
        Self::default()
    }

    pub fn all_enabled() -> Self {
        TypoRuleSet {
            flags: [true; RULE_COUNT],
        }
    }

    /// The shipped default file.
    pub fn default_rules() -> Self {
        Self::parse(DEFAULT_RULES).expect("shipped rule file parses")
    }

    /// Omission rules only; substitutions, inversions and assimilation off.
    pub fn omission_only(&self) -> Self {
        let mut out = *self;
        for r in Rule::ALL {
            if r.is_substitution() {
                out.set(*r, false);
            }
        }
        out
    }

    /// Every omission rule on, the other rules unchanged.
    pub fn with_all_omissions(&self) -> Self {
        let mut out = *self;
        for r in Rule::ALL {
            if !r.is_substitution() {
                out.set(*r, true);
            }
        }
        out
    }

    pub fn enabled(&self, rule: Rule) -> bool {
        self.flags[rule as usize]
    }

    pub fn set(&mut self, rule: Rule, on: bool) {
        self.flags[rule as usize] = on;
    }

    pub fn with(mut self, rule: Rule, on: bool) -> Self {
        self.set(rule, on);
        self
    }

    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut rs = TypoRuleSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('/').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (name, value) = body
                .split_once('=')
                .ok_or(RuleError::MalformedLine { line })?;
            let rule = Rule::from_name(name).ok_or_else(|| RuleError::UnknownRuleName {
                line,
                name: name.trim().to_string(),
            })?;
            let on = match value.trim() {
                "YES" => true,
                "NO" => false,
                _ => return Err(RuleError::MalformedLine { line }),
            };
            rs.set(rule, on);
        }
        Ok(rs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RuleError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| RuleError::Io(IoError(e.to_string())))?;
        Self::parse(&text)
    }

    /// Canonical file rendering, one line per rule.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in Rule::ALL {
            out.push_str(r.name());
            out.push_str(if self.enabled(*r) { "=YES\n" } else { "=NO\n" });
        }
        out
    }

    /// Bitmask digest, stable across runs.
    pub fn fingerprint(&self) -> u64 {
        self.flags
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &on)| acc | ((on as u64) << i))
    }
}

/// A short character sequence (at most four characters).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seq {
    buf: [char; 4],
    len: u8,
}

impl Seq {
    pub fn new(chars: &[char]) -> Self {
        let mut s = Seq::default();
        for &c in chars {
            s.push(c);
        }
        s
    }

    pub fn push(&mut self, c: char) {
        self.buf[self.len as usize] = c;
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[char] {
        &self.buf[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.as_slice().iter().collect();
        write!(f, "{s:?}")
    }
}

/// Deduplicated set of realizations, identity first.
#[derive(Clone, Copy, Default)]
pub struct SeqSet {
    items: [Seq; 8],
    len: u8,
}

impl SeqSet {
    fn insert(&mut self, s: Seq) {
        if !self.as_slice().contains(&s) {
            self.items[self.len as usize] = s;
            self.len += 1;
        }
    }

    pub fn as_slice(&self) -> &[Seq] {
        &self.items[..self.len as usize]
    }

    pub fn contains(&self, s: &[char]) -> bool {
        self.as_slice().iter().any(|x| x.as_slice() == s)
    }

    pub fn to_strings(&self) -> BTreeSet<String> {
        self.as_slice()
            .iter()
            .map(|s| s.as_slice().iter().collect())
            .collect()
    }
}

impl fmt::Debug for SeqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.as_slice()).finish()
    }
}

/// One dictionary-side unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    /// A bare letter. `next` is the following dictionary character and is
    /// only tracked for the first letter of a segment.
    Letter {
        ch: char,
        word_start: bool,
        next: Option<char>,
    },
    /// One diacritic, or shadda followed by one diacritic.
    Cluster { marks: Seq, word_end: bool },
    /// Word-final fathatan with its alef / alef maqsura seat, in dictionary
    /// order (`[G]F` + seat when `nunation_first`, seat + `F` otherwise).
    EndSeat {
        shadda: bool,
        seat: char,
        nunation_first: bool,
    },
}

impl Unit {
    /// The dictionary characters of the unit.
    pub fn dict_seq(&self) -> Seq {
        match *self {
            Unit::Letter { ch, .. } => Seq::new(&[ch]),
            Unit::Cluster { marks, .. } => marks,
            Unit::EndSeat {
                shadda,
                seat,
                nunation_first,
            } => {
                let mut s = Seq::default();
                if nunation_first {
                    if shadda {
                        s.push('G');
                    }
                    s.push('F');
                    s.push(seat);
                } else {
                    s.push(seat);
                    s.push('F');
                }
                s
            }
        }
    }
}

/// Outcome of cutting the next unit off a dictionary buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Unit(Unit, usize),
    /// The buffer does not yet hold enough lookahead.
    NeedMore,
}

fn is_seat(c: char) -> bool {
    c == 'A' || c == 'Y'
}

/// Cuts the next unit off `buf`, the dictionary characters from the current
/// position. `complete` says that `buf` runs to the end of the surface.
/// `word_start` marks the first character of the segment.
pub fn split_unit(buf: &[char], complete: bool, word_start: bool) -> Split {
    use Split::NeedMore;
    let Some(&c0) = buf.first() else {
        return NeedMore;
    };
    // Whether the surface ends right after `k` characters, if known.
    let ends_at = |k: usize| -> Option<bool> {
        if buf.len() > k {
            Some(false)
        } else if complete {
            Some(true)
        } else {
            None
        }
    };
    let cluster = |marks: &[char], word_end: bool| {
        Split::Unit(
            Unit::Cluster {
                marks: Seq::new(marks),
                word_end,
            },
            marks.len(),
        )
    };
    if !is_diacritic(c0) {
        if word_start {
            let Some(end) = ends_at(1) else {
                return NeedMore;
            };
            let next = if end { None } else { Some(buf[1]) };
            return Split::Unit(
                Unit::Letter {
                    ch: c0,
                    word_start: true,
                    next,
                },
                1,
            );
        }
        let letter = Split::Unit(
            Unit::Letter {
                ch: c0,
                word_start: false,
                next: None,
            },
            1,
        );
        if !is_seat(c0) {
            return letter;
        }
        match ends_at(1) {
            None => return NeedMore,
            Some(true) => return letter,
            Some(false) if buf[1] != 'F' => return letter,
            Some(false) => {}
        }
        return match ends_at(2) {
            None => NeedMore,
            Some(true) => Split::Unit(
                Unit::EndSeat {
                    shadda: false,
                    seat: c0,
                    nunation_first: false,
                },
                2,
            ),
            Some(false) => letter,
        };
    }
    if c0 == 'G' {
        let Some(end) = ends_at(1) else {
            return NeedMore;
        };
        if end {
            return cluster(&['G'], true);
        }
        let x = buf[1];
        if !is_diacritic(x) || x == 'G' {
            return cluster(&['G'], false);
        }
        if x == 'F' {
            let Some(end) = ends_at(2) else {
                return NeedMore;
            };
            if end {
                return cluster(&['G', 'F'], true);
            }
            if !is_seat(buf[2]) {
                return cluster(&['G', 'F'], false);
            }
            return match ends_at(3) {
                None => NeedMore,
                Some(true) => Split::Unit(
                    Unit::EndSeat {
                        shadda: true,
                        seat: buf[2],
                        nunation_first: true,
                    },
                    3,
                ),
                Some(false) => cluster(&['G', 'F'], false),
            };
        }
        return match ends_at(2) {
            None => NeedMore,
            Some(end) => cluster(&['G', x], end),
        };
    }
    let Some(end) = ends_at(1) else {
        return NeedMore;
    };
    if c0 == 'F' && !end && is_seat(buf[1]) {
        return match ends_at(2) {
            None => NeedMore,
            Some(true) => Split::Unit(
                Unit::EndSeat {
                    shadda: false,
                    seat: buf[1],
                    nunation_first: true,
                },
                2,
            ),
            Some(false) => cluster(&['F'], false),
        };
    }
    cluster(&[c0], end)
}

/// Cuts a whole surface into units.
pub fn segment_surface(surface: &[char]) -> Vec<Unit> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < surface.len() {
        match split_unit(&surface[pos..], true, pos == 0) {
            Split::Unit(u, n) => {
                out.push(u);
                pos += n;
            }
            Split::NeedMore => unreachable!("complete buffers always split"),
        }
    }
    out
}

/// Where a dictionary sequence sits, for [`TypoRuleSet::realizations`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Position {
    pub word_start: bool,
    pub word_end: bool,
    pub after_determiner: bool,
    /// The next dictionary character, when there is one.
    pub next: Option<char>,
}

fn vowel_omission(c: char) -> Option<Rule> {
    match c {
        'a' => Some(Rule::FathaOmission),
        'u' => Some(Rule::DammaOmission),
        'i' => Some(Rule::KasraOmission),
        'o' => Some(Rule::SukunOmission),
        _ => None,
    }
}

fn nunation_omission(c: char) -> Option<Rule> {
    match c {
        'F' => Some(Rule::FathatanOmissionAtEnd),
        'N' => Some(Rule::DammatanOmissionAtEnd),
        'K' => Some(Rule::KasratanOmissionAtEnd),
        _ => None,
    }
}

fn shadda_omission(c: char, word_end: bool) -> Option<Rule> {
    Some(match (c, word_end) {
        ('a', false) => Rule::ShaddaFathaOmission,
        ('u', false) => Rule::ShaddaDammaOmission,
        ('i', false) => Rule::ShaddaKasraOmission,
        ('a', true) => Rule::ShaddaFathaOmissionAtEnd,
        ('u', true) => Rule::ShaddaDammaOmissionAtEnd,
        ('i', true) => Rule::ShaddaKasraOmissionAtEnd,
        ('F', true) => Rule::ShaddaFathatanOmissionAtEnd,
        ('N', true) => Rule::ShaddaDammatanOmissionAtEnd,
        ('K', true) => Rule::ShaddaKasratanOmissionAtEnd,
        ('R', _) => Rule::ShaddaSuperscriptAlefOmission,
        _ => return None,
    })
}

impl TypoRuleSet {
    fn on(&self, rule: Option<Rule>) -> bool {
        rule.is_some_and(|r| self.enabled(r))
    }

    /// Text realizations of a single diacritic or shadda cluster.
    fn cluster_realizations(&self, marks: &[char], word_end: bool, out: &mut SeqSet) {
        out.insert(Seq::new(marks));
        match *marks {
            ['R'] => {
                if self.enabled(Rule::SuperscriptAlefOmission) {
                    out.insert(Seq::default());
                }
            }
            [n @ ('F' | 'N' | 'K')] => {
                if word_end && self.on(nunation_omission(n)) {
                    out.insert(Seq::default());
                }
            }
            [v] => {
                if self.on(vowel_omission(v)) {
                    out.insert(Seq::default());
                }
            }
            ['G', x] => {
                let written_alone = match x {
                    'R' => self.enabled(Rule::SuperscriptAlefOmission),
                    'F' | 'N' | 'K' => word_end && self.on(nunation_omission(x)),
                    _ => self.on(vowel_omission(x)),
                };
                if written_alone {
                    out.insert(Seq::new(&['G']));
                }
                let nunation = matches!(x, 'F' | 'N' | 'K');
                if (!nunation || word_end) && self.on(shadda_omission(x, word_end)) {
                    out.insert(Seq::default());
                }
            }
            _ => {}
        }
    }

    /// Realizations of an already segmented unit.
    pub fn unit_realizations(&self, unit: &Unit, after_determiner: bool) -> SeqSet {
        let mut out = SeqSet::default();
        match *unit {
            Unit::Letter {
                ch,
                word_start,
                next,
            } => {
                let mut bases = SeqSet::default();
                bases.insert(Seq::new(&[ch]));
                if word_start {
                    match ch {
                        'O' if self.enabled(Rule::HamzaAboveOToA) => bases.insert(Seq::new(&['A'])),
                        'I' => {
                            if self.enabled(Rule::HamzaBelowIToA) {
                                bases.insert(Seq::new(&['A']));
                            }
                            if self.enabled(Rule::HamzaBelowIToL) {
                                bases.insert(Seq::new(&['L']));
                            }
                        }
                        'A' if next == Some('l') && self.enabled(Rule::AlWithWasla) => {
                            bases.insert(Seq::new(&['L']))
                        }
                        _ => {}
                    }
                }
                let assimilates = word_start
                    && after_determiner
                    && next != Some('G')
                    && ((is_coronal(ch) && self.enabled(Rule::SolarAssimilation))
                        || (is_lunar(ch) && self.enabled(Rule::LunarAssimilation)));
                for b in bases.as_slice() {
                    out.insert(*b);
                    if assimilates {
                        let mut with_g = *b;
                        with_g.push('G');
                        out.insert(with_g);
                    }
                }
            }
            Unit::Cluster { marks, word_end } => {
                self.cluster_realizations(marks.as_slice(), word_end, &mut out)
            }
            Unit::EndSeat {
                shadda,
                seat,
                nunation_first,
            } => {
                let inversion = match seat {
                    'A' => self.enabled(Rule::FathatanAlefInversion),
                    _ => self.enabled(Rule::FathatanAlefMaqsuraInversion),
                };
                let nunation: &[char] = if shadda { &['G', 'F'] } else { &['F'] };
                let mut core = SeqSet::default();
                self.cluster_realizations(nunation, true, &mut core);
                for c in core.as_slice() {
                    let mut written = SeqSet::default();
                    let with_f = c.as_slice().last() == Some(&'F');
                    let mut prefix = *c;
                    if with_f {
                        prefix.len -= 1;
                    }
                    // [G]F seat
                    let mut nf = prefix;
                    if with_f {
                        nf.push('F');
                    }
                    nf.push(seat);
                    // [G] seat F
                    let mut sf = prefix;
                    sf.push(seat);
                    if with_f {
                        sf.push('F');
                    }
                    if nunation_first {
                        written.insert(nf);
                        if inversion {
                            written.insert(sf);
                        }
                    } else {
                        written.insert(sf);
                        if inversion {
                            written.insert(nf);
                        }
                    }
                    for w in written.as_slice() {
                        out.insert(*w);
                    }
                }
            }
        }
        out
    }

    /// Text sequences tolerated for the dictionary sequence `dict_seq` at
    /// `pos`. Sequences that do not form a single unit only realize as
    /// themselves.
    pub fn realizations(&self, dict_seq: &str, pos: Position) -> BTreeSet<String> {
        let mut buf: Vec<char> = dict_seq.chars().collect();
        let declared_len = buf.len();
        match pos.next {
            Some(n) => buf.push(n),
            // Something follows; a plain consonant stands in for it.
            None if !pos.word_end => buf.push('b'),
            None => {}
        }
        let complete = true;
        let unit = match split_unit(&buf, complete, pos.word_start) {
            Split::Unit(u, n) if n == declared_len => Some(u),
            _ => None,
        };
        match unit {
            Some(u) => self
                .unit_realizations(&u, pos.after_determiner)
                .to_strings(),
            None => BTreeSet::from([dict_seq.to_string()]),
        }
    }
}
