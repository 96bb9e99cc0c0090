//! Omission-tolerant vowel restoration for Arabic.
//!
//! Fully vowelized full-form dictionaries are compiled into a minimal
//! acyclic automaton ([`compiler`]). Tokens written with any subset of their
//! diacritics are matched against it under a configurable set of
//! typographical rules ([`rules`], [`lookup`]), and clitics are segmented
//! with agglutination grammars ([`morphgraph`]).
//!
//! Text is handled internally in a one-character-per-grapheme Latin
//! transliteration; see [`alphabet`].

pub mod alphabet;
pub mod compiler;
pub mod lexicon;
pub mod lookup;
pub mod morphgraph;
pub mod par;
pub mod rules;

pub use compiler::{CompiledDictionary, Mode};
pub use lexicon::{DictEntry, FlatDictionary, LexicalMask};
pub use lookup::{Analysis, Analyzer, Segment};
pub use morphgraph::{Fst, GrammarSet, MorphGraph};
pub use rules::TypoRuleSet;
