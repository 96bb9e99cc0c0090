//! Arabic script in TB++ transliteration.
//!
//! TB++ is a one-codepoint-per-grapheme Latin transliteration derived from
//! the Buckwalter encoding. Everything inside the engine (dictionaries,
//! rule files, grammars) is TB++; Arabic Unicode is only converted at the
//! boundary.
//!
//! Two characters are extensions over the classic table: `R` (superscript
//! alef, U+0670) and `L` (wasla alef, U+0671). `_` stands for tatweel.

/// The full transliteration table, Arabic codepoint first.
pub const TRANSLIT_TABLE: &[(char, char)] = &[
    ('\u{0621}', 'c'), // hamza
    ('\u{0622}', 'C'), // alef madda
    ('\u{0623}', 'O'), // alef, hamza above
    ('\u{0624}', 'W'), // waw, hamza above
    ('\u{0625}', 'I'), // alef, hamza below
    ('\u{0626}', 'e'), // yeh, hamza above
    ('\u{0627}', 'A'),
    ('\u{0628}', 'b'),
    ('\u{0629}', 'p'), // teh marbuta
    ('\u{062A}', 't'),
    ('\u{062B}', 'v'),
    ('\u{062C}', 'j'),
    ('\u{062D}', 'H'),
    ('\u{062E}', 'x'),
    ('\u{062F}', 'd'),
    ('\u{0630}', 'J'),
    ('\u{0631}', 'r'),
    ('\u{0632}', 'z'),
    ('\u{0633}', 's'),
    ('\u{0634}', 'M'),
    ('\u{0635}', 'S'),
    ('\u{0636}', 'D'),
    ('\u{0637}', 'T'),
    ('\u{0638}', 'Z'),
    ('\u{0639}', 'E'),
    ('\u{063A}', 'g'),
    ('\u{0640}', '_'), // tatweel
    ('\u{0641}', 'f'),
    ('\u{0642}', 'q'),
    ('\u{0643}', 'k'),
    ('\u{0644}', 'l'),
    ('\u{0645}', 'm'),
    ('\u{0646}', 'n'),
    ('\u{0647}', 'h'),
    ('\u{0648}', 'w'),
    ('\u{0649}', 'Y'), // alef maqsura
    ('\u{064A}', 'y'),
    ('\u{064B}', 'F'), // fathatan
    ('\u{064C}', 'N'), // dammatan
    ('\u{064D}', 'K'), // kasratan
    ('\u{064E}', 'a'),
    ('\u{064F}', 'u'),
    ('\u{0650}', 'i'),
    ('\u{0651}', 'G'), // shadda
    ('\u{0652}', 'o'), // sukun
    ('\u{0670}', 'R'), // superscript alef
    ('\u{0671}', 'L'), // wasla alef
];

pub const TATWEEL: char = '_';
pub const ARABIC_TATWEEL: char = '\u{0640}';

/// The coronal ("solar") consonants, which let the determiner's `l`
/// assimilate.
pub const CORONAL: [char; 15] = [
    't', 'v', 'j', 'd', 'J', 'r', 'z', 's', 'M', 'S', 'D', 'T', 'Z', 'l', 'n',
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShortVowel {
    Fatha,
    Damma,
    Kasra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nunation {
    Fathatan,
    Dammatan,
    Kasratan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    BareLetter,
    ShortVowel(ShortVowel),
    ZeroVowel,
    Nunation(Nunation),
    Shadda,
    SuperscriptAlef,
    HamzaAboveAlef,
    HamzaBelowAlef,
    BareAlef,
    WaslaAlef,
}

impl CharClass {
    pub fn is_diacritic(self) -> bool {
        matches!(
            self,
            CharClass::ShortVowel(_)
                | CharClass::ZeroVowel
                | CharClass::Nunation(_)
                | CharClass::Shadda
                | CharClass::SuperscriptAlef
        )
    }
}

/// Total classification of a TB++ character. Anything that is not a
/// diacritic or one of the alef variants counts as a bare letter.
pub fn classify(c: char) -> CharClass {
    match c {
        'a' => CharClass::ShortVowel(ShortVowel::Fatha),
        'u' => CharClass::ShortVowel(ShortVowel::Damma),
        'i' => CharClass::ShortVowel(ShortVowel::Kasra),
        'o' => CharClass::ZeroVowel,
        'F' => CharClass::Nunation(Nunation::Fathatan),
        'N' => CharClass::Nunation(Nunation::Dammatan),
        'K' => CharClass::Nunation(Nunation::Kasratan),
        'G' => CharClass::Shadda,
        'R' => CharClass::SuperscriptAlef,
        'O' => CharClass::HamzaAboveAlef,
        'I' => CharClass::HamzaBelowAlef,
        'A' => CharClass::BareAlef,
        'L' => CharClass::WaslaAlef,
        _ => CharClass::BareLetter,
    }
}

#[inline]
pub fn is_diacritic(c: char) -> bool {
    matches!(c, 'a' | 'u' | 'i' | 'o' | 'F' | 'N' | 'K' | 'G' | 'R')
}

#[inline]
pub fn is_coronal(c: char) -> bool {
    CORONAL.contains(&c)
}

/// Lunar consonants: every TB++ letter that is not coronal, glottal-stop
/// allographs included.
#[inline]
pub fn is_lunar(c: char) -> bool {
    is_tbpp_letter(c) && !is_coronal(c)
}

/// A non-diacritic character of the TB++ table (tatweel excluded).
pub fn is_tbpp_letter(c: char) -> bool {
    c != TATWEEL && !is_diacritic(c) && TRANSLIT_TABLE.iter().any(|&(_, t)| t == c)
}

/// Any character of the TB++ table, diacritics included.
pub fn is_tbpp(c: char) -> bool {
    TRANSLIT_TABLE.iter().any(|&(_, t)| t == c)
}

pub fn arabic_to_tbpp(c: char) -> Option<char> {
    TRANSLIT_TABLE
        .iter()
        .find(|&&(a, _)| a == c)
        .map(|&(_, t)| t)
}

pub fn tbpp_to_arabic(c: char) -> Option<char> {
    TRANSLIT_TABLE
        .iter()
        .find(|&&(_, t)| t == c)
        .map(|&(a, _)| a)
}

/// A character that had no table entry and was copied through unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassThrough {
    /// Character offset in the input.
    pub offset: usize,
    pub ch: char,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Converted {
    pub text: String,
    pub passed_through: Vec<PassThrough>,
}

fn convert(input: &str, map: impl Fn(char) -> Option<char>) -> Converted {
    let mut out = Converted {
        text: String::with_capacity(input.len()),
        passed_through: Vec::new(),
    };
    for (offset, ch) in input.chars().enumerate() {
        match map(ch) {
            Some(t) => out.text.push(t),
            None => {
                if !ch.is_whitespace() {
                    out.passed_through.push(PassThrough { offset, ch });
                }
                out.text.push(ch);
            }
        }
    }
    out
}

/// Arabic Unicode to TB++. Uncovered characters are kept and reported
/// (whitespace is kept silently).
pub fn to_translit(arabic: &str) -> Converted {
    convert(arabic, arabic_to_tbpp)
}

/// TB++ to Arabic Unicode, the inverse of [`to_translit`].
pub fn from_translit(tbpp: &str) -> Converted {
    convert(tbpp, tbpp_to_arabic)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiacriticPos {
    pub mark: char,
    /// Offset (in characters) of the mark in the original form.
    pub offset: usize,
}

/// Splits a form into its consonantal skeleton and the removed marks.
pub fn strip_diacritics(form: &str) -> (String, Vec<DiacriticPos>) {
    let mut skeleton = String::with_capacity(form.len());
    let mut marks = Vec::new();
    for (offset, c) in form.chars().enumerate() {
        if is_diacritic(c) {
            marks.push(DiacriticPos { mark: c, offset });
        } else {
            skeleton.push(c);
        }
    }
    (skeleton, marks)
}

/// Inverse of [`strip_diacritics`].
pub fn reinsert_diacritics(skeleton: &str, marks: &[DiacriticPos]) -> String {
    let mut out = String::with_capacity(skeleton.len() + marks.len());
    let mut letters = skeleton.chars();
    let mut marks = marks.iter().peekable();
    let mut offset = 0;
    loop {
        if let Some(m) = marks.next_if(|m| m.offset == offset) {
            out.push(m.mark);
        } else if let Some(c) = letters.next() {
            out.push(c);
        } else {
            // marks past the end of the form are appended in order
            out.extend(marks.map(|m| m.mark));
            break;
        }
        offset += 1;
    }
    out
}

/// Removes tatweel (TB++ `_` or U+0640) and collapses runs of whitespace
/// to a single space.
pub fn normalize_token(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    let mut pending_space = false;
    for c in token.chars() {
        if c == TATWEEL || c == ARABIC_TATWEEL {
            continue;
        }
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_is_a_bijection() {
        for (i, &(a, t)) in TRANSLIT_TABLE.iter().enumerate() {
            for &(a2, t2) in &TRANSLIT_TABLE[i + 1..] {
                assert_ne!(a, a2);
                assert_ne!(t, t2);
            }
            assert_eq!(tbpp_to_arabic(t), Some(a));
            assert_eq!(arabic_to_tbpp(a), Some(t));
        }
    }

    #[test]
    fn kataba_both_directions() {
        let arabic = "\u{0643}\u{064E}\u{062A}\u{064E}\u{0628}\u{064E}";
        assert_eq!(to_translit(arabic).text, "kataba");
        assert_eq!(from_translit("kataba").text, arabic);
        assert_eq!(to_translit("").text, "");
    }

    #[test]
    fn every_row_round_trips() {
        let all: String = TRANSLIT_TABLE.iter().map(|&(a, _)| a).collect();
        let tb = to_translit(&all);
        assert!(tb.passed_through.is_empty());
        assert_eq!(from_translit(&tb.text).text, all);
    }

    #[test]
    fn uncovered_characters_pass_through() {
        let out = from_translit("kB1!");
        assert_eq!(out.text, "\u{0643}B1!");
        let seen: Vec<char> = out.passed_through.iter().map(|p| p.ch).collect();
        assert_eq!(seen, vec!['B', '1', '!']);
        assert_eq!(out.passed_through[0].offset, 1);
    }

    #[test]
    fn classification() {
        assert_eq!(classify('G'), CharClass::Shadda);
        assert_eq!(classify('R'), CharClass::SuperscriptAlef);
        assert_eq!(classify('k'), CharClass::BareLetter);
        assert_eq!(classify('L'), CharClass::WaslaAlef);
        let diacritics: String = TRANSLIT_TABLE
            .iter()
            .map(|&(_, t)| t)
            .filter(|&t| classify(t).is_diacritic())
            .collect();
        assert_eq!(diacritics, "FNKauiGoR");
    }

    #[test]
    fn coronal_and_lunar_partition_the_consonants() {
        assert_eq!(CORONAL.len(), 15);
        for &(_, t) in TRANSLIT_TABLE {
            if is_tbpp_letter(t) {
                assert!(is_coronal(t) ^ is_lunar(t), "{t}");
            }
        }
        for c in ['c', 'C', 'O', 'W', 'I', 'e', 'q', 'k'] {
            assert!(is_lunar(c));
        }
    }

    #[test]
    fn strip_examples() {
        let (sk, marks) = strip_diacritics("kataba");
        assert_eq!(sk, "ktb");
        assert_eq!(
            marks,
            vec![
                DiacriticPos {
                    mark: 'a',
                    offset: 1
                },
                DiacriticPos {
                    mark: 'a',
                    offset: 3
                },
                DiacriticPos {
                    mark: 'a',
                    offset: 5
                },
            ]
        );
        assert_eq!(strip_diacritics("ktb"), ("ktb".to_string(), vec![]));
        let (sk, marks) = strip_diacritics("katGaba");
        assert_eq!(sk, "ktb");
        let m: String = marks.iter().map(|m| m.mark).collect();
        assert_eq!(m, "aGaa");
        assert_eq!(reinsert_diacritics(&sk, &marks), "katGaba");
    }

    #[test]
    fn tatweel_is_trimmed() {
        assert_eq!(normalize_token("kt_Ab"), "ktAb");
        assert_eq!(normalize_token("kt\u{0640}\u{0640}Ab"), "ktAb");
        assert_eq!(normalize_token("ktb"), "ktb");
        assert_eq!(normalize_token("  ktb \t  qlm "), "ktb qlm");
    }

    fn tbpp_string() -> impl Strategy<Value = String> {
        let chars: Vec<char> = TRANSLIT_TABLE.iter().map(|&(_, t)| t).collect();
        proptest::collection::vec(proptest::sample::select(chars), 0..24)
            .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn strip_then_reinsert_is_identity(form in tbpp_string()) {
            let (sk, marks) = strip_diacritics(&form);
            prop_assert!(!sk.chars().any(is_diacritic));
            prop_assert_eq!(reinsert_diacritics(&sk, &marks), form);
        }

        #[test]
        fn translit_round_trip(form in tbpp_string()) {
            let arabic = from_translit(&form);
            prop_assert!(arabic.passed_through.is_empty());
            prop_assert_eq!(to_translit(&arabic.text).text, form);
        }

        #[test]
        fn normalize_is_idempotent(s in "[ a-zA-Z_\t]{0,30}") {
            let once = normalize_token(&s);
            prop_assert_eq!(normalize_token(&once), once.clone());
        }
    }
}
