//! Omission-tolerant lookup, clitic segmentation and text annotation.
//!
//! Matching walks the dictionary automaton and the token side by side. The
//! dictionary side is cut into units (see [`crate::rules::split_unit`]) and
//! each unit may consume any of its text realizations, so a token written
//! with some or none of its diacritics still reaches the full form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::alphabet::{is_diacritic, is_tbpp, normalize_token, strip_diacritics, TATWEEL};
use crate::compiler::{CompiledDictionary, Madfa};
use crate::lexicon::{split_tag, DictEntry};
use crate::morphgraph::{build_agglutination, Fst, GrammarError, GrammarSet, Label, Network, Rtn};
use crate::par;
use crate::rules::{segment_surface, split_unit, Seq, Split, TypoRuleSet, Unit};

/// A deterministic acyclic graph over dictionary characters.
pub trait DictGraph {
    fn root(&self) -> u32;
    fn is_final(&self, s: u32) -> bool;
    fn degree(&self, s: u32) -> usize;
    fn edge(&self, s: u32, i: usize) -> (char, u32);
}

impl DictGraph for Madfa {
    fn root(&self) -> u32 {
        Madfa::ROOT
    }

    fn is_final(&self, s: u32) -> bool {
        Madfa::is_final(self, s)
    }

    fn degree(&self, s: u32) -> usize {
        let s = s as usize;
        (self.trans_start[s + 1] - self.trans_start[s]) as usize
    }

    fn edge(&self, s: u32, i: usize) -> (char, u32) {
        let k = self.trans_start[s as usize] as usize + i;
        (self.trans_char[k], self.trans_target[k])
    }
}

/// A single literal seen as a linear automaton.
pub struct LiteralGraph(pub Vec<char>);

impl DictGraph for LiteralGraph {
    fn root(&self) -> u32 {
        0
    }

    fn is_final(&self, s: u32) -> bool {
        s as usize == self.0.len()
    }

    fn degree(&self, s: u32) -> usize {
        usize::from((s as usize) < self.0.len())
    }

    fn edge(&self, s: u32, _: usize) -> (char, u32) {
        (self.0[s as usize], s + 1)
    }
}

/// Context threaded from the segmentation into matching.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct MatchContext {
    /// The previous segment was the determiner.
    pub after_determiner: bool,
}

/// A dictionary path whose realization covers `text[start..end]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixMatch {
    pub end: usize,
    /// The dictionary surface.
    pub surface: String,
    /// The surface with any assimilation mark the text wrote.
    pub restored: String,
    pub state: u32,
}

struct Search<'a, G: DictGraph> {
    g: &'a G,
    rules: &'a TypoRuleSet,
    text: &'a [char],
    after_determiner: bool,
    path: String,
    restored: String,
    out: Vec<PrefixMatch>,
}

impl<G: DictGraph> Search<'_, G> {
    /// Cheap necessary condition for reading letter `c` after the pending
    /// characters `buf`, at text position `tpos`.
    fn letter_fits(&self, c: char, tpos: usize, buf: &Seq, word_start: bool) -> bool {
        if buf.is_empty() {
            let Some(&t) = self.text.get(tpos) else {
                return false;
            };
            return t == c
                || word_start
                    && matches!((c, t), ('O', 'A') | ('I', 'A') | ('I', 'L') | ('A', 'L'));
        }
        if word_start || !buf.as_slice().iter().all(|&d| is_diacritic(d)) {
            return true;
        }
        // Pending marks realize in at most their own length.
        let end = (tpos + buf.len() + 1).min(self.text.len());
        self.text[tpos.min(end)..end].contains(&c)
    }

    fn extend(&mut self, state: u32, tpos: usize, buf: Seq, word_start: bool) {
        if buf.len() == 4 {
            return;
        }
        for i in 0..self.g.degree(state) {
            let (c, t) = self.g.edge(state, i);
            if !is_diacritic(c) && !self.letter_fits(c, tpos, &buf, word_start) {
                continue;
            }
            let mut next = buf;
            next.push(c);
            self.path.push(c);
            self.step(t, tpos, next, false, word_start);
            self.path.pop();
        }
    }

    fn step(&mut self, state: u32, tpos: usize, buf: Seq, complete: bool, word_start: bool) {
        if buf.is_empty() {
            if self.g.is_final(state) {
                self.out.push(PrefixMatch {
                    end: tpos,
                    surface: self.path.clone(),
                    restored: self.restored.clone(),
                    state,
                });
            }
            if !complete {
                self.extend(state, tpos, buf, word_start);
            }
            return;
        }
        match split_unit(buf.as_slice(), complete, word_start) {
            Split::Unit(unit, n) => {
                let rest = Seq::new(&buf.as_slice()[n..]);
                let realizations = self.rules.unit_realizations(&unit, self.after_determiner);
                for r in realizations.as_slice() {
                    let r = r.as_slice();
                    if !self.text[tpos..].starts_with(r) {
                        continue;
                    }
                    let mark = self.restored.len();
                    self.restored.extend(unit.dict_seq().as_slice());
                    if let Unit::Letter { .. } = unit {
                        if r.last() == Some(&'G') {
                            self.restored.push('G');
                        }
                    }
                    self.step(state, tpos + r.len(), rest, complete, false);
                    self.restored.truncate(mark);
                }
            }
            Split::NeedMore => {
                if self.g.is_final(state) {
                    self.step(state, tpos, buf, true, word_start);
                }
                self.extend(state, tpos, buf, word_start);
            }
        }
    }
}

/// Every dictionary path of `g` whose realization under `rules` is a
/// prefix of `text[start..]`, sorted and deduplicated.
pub fn match_prefixes<G: DictGraph>(
    g: &G,
    rules: &TypoRuleSet,
    text: &[char],
    start: usize,
    ctx: MatchContext,
) -> Vec<PrefixMatch> {
    let mut s = Search {
        g,
        rules,
        text,
        after_determiner: ctx.after_determiner,
        path: String::new(),
        restored: String::new(),
        out: Vec::new(),
    };
    s.step(g.root(), start, Seq::default(), false, true);
    let mut out = s.out;
    out.sort();
    out.dedup();
    out
}

/// A whole-token dictionary match.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TokenMatch {
    pub restored: String,
    pub entry: DictEntry,
}

/// Dictionary entries whose surface realizes exactly `token` under `rules`.
pub fn match_token(
    cd: &CompiledDictionary,
    rules: &TypoRuleSet,
    token: &str,
    ctx: MatchContext,
) -> Vec<TokenMatch> {
    let text: Vec<char> = token.chars().collect();
    let mut out: Vec<TokenMatch> = match_prefixes(&cd.madfa, rules, &text, 0, ctx)
        .into_iter()
        .filter(|m| m.end == text.len())
        .flat_map(|m| {
            cd.entries_at(&m.surface, m.state)
                .into_iter()
                .map(move |entry| TokenMatch {
                    restored: m.restored.clone(),
                    entry,
                })
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Number of partially vowelized spellings recognized for the dictionary:
/// the sum over surfaces of the product of per-unit realization counts.
pub fn count_partial_forms(cd: &CompiledDictionary, rules: &TypoRuleSet) -> u128 {
    let words: Vec<String> = cd.madfa.words().into_iter().map(|(w, _)| w).collect();
    par::map(&words, |w| surface_partial_forms(w, rules))
        .into_iter()
        .sum()
}

/// Realization count of one surface.
pub fn surface_partial_forms(surface: &str, rules: &TypoRuleSet) -> u128 {
    let chars: Vec<char> = surface.chars().collect();
    segment_surface(&chars)
        .iter()
        .map(|u| rules.unit_realizations(u, false).as_slice().len() as u128)
        .product()
}

/// One morpheme of an analysis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Segment {
    /// The substring of the token.
    pub written: String,
    /// Fully vowelized form.
    pub restored: String,
    pub lemma: String,
    pub pos: String,
    pub sem: Vec<String>,
    pub code: Option<String>,
    /// Comes from a grammar literal rather than the dictionary.
    pub clitic: bool,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self.code.iter().cloned().collect();
        write!(
            f,
            "{{{}.{}.{}.{}}}",
            self.written,
            self.restored,
            self.lemma,
            crate::lexicon::render_tag(&self.pos, &self.sem, &codes)
        )
    }
}

/// One reading of a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Analysis {
    pub token: String,
    pub restored: String,
    pub segments: Vec<Segment>,
}

impl Analysis {
    /// The dictionary-backed segment, if any.
    pub fn core(&self) -> Option<&Segment> {
        self.segments.iter().find(|s| !s.clitic)
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.segments {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The segmentation grammar used by an [`Analyzer`].
#[derive(Debug, Clone)]
pub enum AggGrammar {
    /// No grammar: a token is a single dictionary word of any category.
    None,
    Flat(Fst),
    Interpreted(Rtn),
}

impl AggGrammar {
    pub fn flat(gs: &GrammarSet, root: &str) -> Result<Self, GrammarError> {
        build_agglutination(gs, root).map(AggGrammar::Flat)
    }

    /// Walks the network without flattening. The root must still pass the
    /// label checks of a flattened grammar.
    pub fn interpreted(gs: &GrammarSet, root: &str) -> Result<Self, GrammarError> {
        build_agglutination(gs, root)?;
        Rtn::new(gs, root).map(AggGrammar::Interpreted)
    }

    fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        match self {
            AggGrammar::None => 0u8.hash(&mut h),
            AggGrammar::Flat(f) => {
                1u8.hash(&mut h);
                f.to_graph("").to_text().hash(&mut h);
            }
            AggGrammar::Interpreted(r) => {
                2u8.hash(&mut h);
                format!("{r:?}").hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Memo table from token to analyses, tied to one configuration.
#[derive(Debug, Default)]
pub struct TokenCache {
    fingerprint: AtomicU64,
    map: Mutex<HashMap<String, Arc<Vec<Analysis>>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl TokenCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Drops every entry if the configuration changed.
    pub fn ensure(&self, fingerprint: u64) {
        let old = self.fingerprint.swap(fingerprint, Ordering::SeqCst);
        if old != fingerprint {
            self.map.lock().unwrap().clear();
        }
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

/// Spell-check verdict for an unknown token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FlagKind {
    /// The letters form a known word but the written diacritics do not fit.
    InvalidDiacritic,
    UnknownWord,
}

impl fmt::Display for FlagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlagKind::InvalidDiacritic => "INVALID_DIACRITIC",
            FlagKind::UnknownWord => "UNKNOWN_WORD",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    /// Index of the token in the input.
    pub index: usize,
    pub token: String,
    pub kind: FlagKind,
    /// Restored forms compatible with the bare letters.
    pub suggestions: Vec<String>,
}

/// Analyses of one token of a text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenAnalyses {
    pub token: String,
    pub analyses: Arc<Vec<Analysis>>,
}

impl TokenAnalyses {
    pub fn is_unknown(&self) -> bool {
        self.analyses.is_empty()
    }
}

/// A dictionary word read from some position: its end, the segment and the
/// entry it came from.
struct CoreHit {
    end: usize,
    segment: Segment,
    entry: DictEntry,
}

type CoreMemo = HashMap<(usize, bool), Arc<Vec<CoreHit>>>;

/// Dictionaries, rules and grammar bundled for analysis.
pub struct Analyzer {
    dicts: Vec<CompiledDictionary>,
    rules: TypoRuleSet,
    grammar: AggGrammar,
    cache: Option<Arc<TokenCache>>,
    traversals: AtomicU64,
    fingerprint: u64,
}

impl Analyzer {
    pub fn new(dicts: Vec<CompiledDictionary>, rules: TypoRuleSet, grammar: AggGrammar) -> Self {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for d in &dicts {
            d.fingerprint().hash(&mut h);
        }
        rules.fingerprint().hash(&mut h);
        grammar.fingerprint().hash(&mut h);
        Analyzer {
            dicts,
            rules,
            grammar,
            cache: None,
            traversals: AtomicU64::new(0),
            fingerprint: h.finish(),
        }
    }

    /// Enables memoization with a fresh cache.
    pub fn with_cache(self) -> Self {
        self.with_shared_cache(Arc::new(TokenCache::new()))
    }

    /// Uses `cache`, clearing it if it was filled under another
    /// configuration.
    pub fn with_shared_cache(mut self, cache: Arc<TokenCache>) -> Self {
        cache.ensure(self.fingerprint);
        self.cache = Some(cache);
        self
    }

    pub fn cache(&self) -> Option<&TokenCache> {
        self.cache.as_deref()
    }

    pub fn rules(&self) -> &TypoRuleSet {
        &self.rules
    }

    pub fn dictionaries(&self) -> &[CompiledDictionary] {
        &self.dicts
    }

    /// Digest of dictionaries, rules and grammar.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Number of dictionary traversals started so far.
    pub fn traversals(&self) -> u64 {
        self.traversals.load(Ordering::Relaxed)
    }

    /// Whole-token matches in every dictionary.
    pub fn match_token(&self, token: &str, ctx: MatchContext) -> Vec<TokenMatch> {
        let mut out: Vec<TokenMatch> = self
            .dicts
            .iter()
            .flat_map(|d| {
                self.traversals.fetch_add(1, Ordering::Relaxed);
                match_token(d, &self.rules, token, ctx)
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Analyses of `token`, served from the cache when enabled.
    pub fn analyze(&self, token: &str) -> Arc<Vec<Analysis>> {
        let Some(cache) = &self.cache else {
            return Arc::new(self.analyze_uncached(token));
        };
        if let Some(hit) = cache.map.lock().unwrap().get(token) {
            cache.hits.fetch_add(1, Ordering::Relaxed);
            return hit.clone();
        }
        cache.misses.fetch_add(1, Ordering::Relaxed);
        let result = Arc::new(self.analyze_uncached(token));
        cache
            .map
            .lock()
            .unwrap()
            .entry(token.to_string())
            .or_insert(result)
            .clone()
    }

    /// Analyses of `token` without touching the cache.
    pub fn analyze_uncached(&self, token: &str) -> Vec<Analysis> {
        self.analyze_with(token, &self.rules)
    }

    fn analyze_with(&self, token: &str, rules: &TypoRuleSet) -> Vec<Analysis> {
        let token = normalize_token(token);
        let text: Vec<char> = token.chars().collect();
        if text.is_empty() {
            return Vec::new();
        }
        let mut walker = Walker {
            an: self,
            rules,
            token: &token,
            text: &text,
            core_memo: HashMap::new(),
            lit_memo: HashMap::new(),
            segments: Vec::new(),
            out: Vec::new(),
        };
        match &self.grammar {
            AggGrammar::None => walker.bare(),
            AggGrammar::Flat(f) => walker.walk(f, f.start(), 0, 0),
            AggGrammar::Interpreted(r) => walker.walk(r, r.start(), 0, 0),
        }
        let mut out = walker.out;
        out.sort();
        out.dedup();
        out
    }

    /// Analyses for every token, in input order.
    pub fn analyze_tokens(&self, tokens: &[String]) -> Vec<TokenAnalyses> {
        par::map(tokens, |t| TokenAnalyses {
            token: t.clone(),
            analyses: self.analyze(t),
        })
    }

    /// Same as [`Self::analyze_tokens`] on one thread.
    pub fn analyze_tokens_sequential(&self, tokens: &[String]) -> Vec<TokenAnalyses> {
        tokens
            .iter()
            .map(|t| TokenAnalyses {
                token: t.clone(),
                analyses: self.analyze(t),
            })
            .collect()
    }

    /// Tokenizes TB++ text and analyzes every token.
    pub fn annotate_text(&self, text: &str) -> Vec<TokenAnalyses> {
        self.analyze_tokens(&tokenize(text))
    }

    /// Flags for the unknown tokens of `text`.
    pub fn spellcheck(&self, text: &str) -> Vec<Flag> {
        let tokens = tokenize(text);
        let relaxed = self.rules.with_all_omissions();
        let results = self.analyze_tokens(&tokens);
        results
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_unknown())
            .map(|(index, r)| {
                let (skeleton, _) = strip_diacritics(&r.token);
                let found = self.analyze_with(&skeleton, &relaxed);
                let suggestions: BTreeSet<String> =
                    found.iter().map(|a| a.restored.clone()).collect();
                Flag {
                    index,
                    token: r.token.clone(),
                    kind: if found.is_empty() {
                        FlagKind::UnknownWord
                    } else {
                        FlagKind::InvalidDiacritic
                    },
                    suggestions: suggestions.into_iter().collect(),
                }
            })
            .collect()
    }
}

struct Walker<'a> {
    an: &'a Analyzer,
    rules: &'a TypoRuleSet,
    token: &'a str,
    text: &'a [char],
    core_memo: CoreMemo,
    lit_memo: HashMap<(String, usize, bool), Arc<Vec<PrefixMatch>>>,
    segments: Vec<Segment>,
    out: Vec<Analysis>,
}

/// Bound on non-consuming moves in a row, against degenerate grammars.
const MAX_SEGMENT_DEPTH: usize = 64;

impl Walker<'_> {
    fn written(&self, start: usize, end: usize) -> String {
        self.text[start..end].iter().collect()
    }

    fn lit_matches(&mut self, lit: &str, start: usize, after_det: bool) -> Arc<Vec<PrefixMatch>> {
        let rules = self.rules;
        let text = self.text;
        self.lit_memo
            .entry((lit.to_string(), start, after_det))
            .or_insert_with(|| {
                let g = LiteralGraph(lit.chars().collect());
                let ctx = MatchContext {
                    after_determiner: after_det,
                };
                Arc::new(
                    match_prefixes(&g, rules, text, start, ctx)
                        .into_iter()
                        .filter(|m| m.end > start)
                        .collect(),
                )
            })
            .clone()
    }

    fn after_determiner(&self) -> bool {
        self.segments.last().is_some_and(|s| s.pos == "DET")
    }

    fn pronoun_constraints_hold(&self) -> bool {
        self.segments.iter().enumerate().all(|(i, s)| {
            if s.clitic {
                return true;
            }
            let next_is_pro = self.segments.get(i + 1).is_some_and(|n| n.pos == "PRO");
            let nopro = s.sem.iter().any(|f| f == "nopro");
            let pro = s.sem.iter().any(|f| f == "pro");
            !(nopro && next_is_pro) && !(pro && !next_is_pro)
        })
    }

    fn emit(&mut self) {
        if !self.pronoun_constraints_hold() {
            return;
        }
        self.out.push(Analysis {
            token: self.token.to_string(),
            restored: self.segments.iter().map(|s| s.restored.as_str()).collect(),
            segments: self.segments.clone(),
        });
    }

    /// Dictionary words starting at `start`, one hit per inflection code.
    fn core_hits(&mut self, start: usize, after_det: bool) -> Arc<Vec<CoreHit>> {
        if let Some(hits) = self.core_memo.get(&(start, after_det)) {
            return hits.clone();
        }
        let ctx = MatchContext {
            after_determiner: after_det,
        };
        let mut hits = Vec::new();
        for d in &self.an.dicts {
            self.an.traversals.fetch_add(1, Ordering::Relaxed);
            for m in match_prefixes(&d.madfa, self.rules, self.text, start, ctx) {
                if m.end == start {
                    continue;
                }
                let written = self.written(start, m.end);
                for entry in d.entries_at(&m.surface, m.state) {
                    let codes: Vec<Option<String>> = if entry.codes.is_empty() {
                        vec![None]
                    } else {
                        entry.codes.iter().cloned().map(Some).collect()
                    };
                    for code in codes {
                        hits.push(CoreHit {
                            end: m.end,
                            segment: Segment {
                                written: written.clone(),
                                restored: m.restored.clone(),
                                lemma: entry.lemma.clone(),
                                pos: entry.pos.clone(),
                                sem: entry.sem.clone(),
                                code,
                                clitic: false,
                            },
                            entry: entry.clone(),
                        });
                    }
                }
            }
        }
        let hits = Arc::new(hits);
        self.core_memo.insert((start, after_det), hits.clone());
        hits
    }

    /// Whole token as one dictionary word.
    fn bare(&mut self) {
        for hit in self.core_hits(0, false).iter() {
            if hit.end == self.text.len() {
                self.segments.push(hit.segment.clone());
                self.emit();
                self.segments.pop();
            }
        }
    }

    fn walk<N: Network>(&mut self, net: &N, state: N::State, tpos: usize, idle: usize) {
        if net.is_accepting(&state) && tpos == self.text.len() && !self.segments.is_empty() {
            self.emit();
        }
        if idle > MAX_SEGMENT_DEPTH {
            return;
        }
        for (label, next) in net.moves(&state) {
            match label {
                Label::Output(o) => {
                    let Some(last) = self.segments.last_mut() else {
                        self.walk(net, next, tpos, idle + 1);
                        continue;
                    };
                    if !last.clitic {
                        self.walk(net, next, tpos, idle + 1);
                        continue;
                    }
                    let saved = last.clone();
                    if let Some(tag) = split_tag(o) {
                        last.pos = tag.pos;
                        last.sem = tag.sem;
                        last.code = (!tag.codes.is_empty()).then(|| tag.codes.join(":"));
                    }
                    self.walk(net, next, tpos, idle + 1);
                    *self.segments.last_mut().unwrap() = saved;
                }
                Label::Lit(lit) => {
                    let after_det = self.after_determiner();
                    for m in self.lit_matches(lit, tpos, after_det).iter() {
                        self.segments.push(Segment {
                            written: self.written(tpos, m.end),
                            restored: m.restored.clone(),
                            lemma: lit.clone(),
                            pos: String::new(),
                            sem: Vec::new(),
                            code: None,
                            clitic: true,
                        });
                        self.walk(net, next.clone(), m.end, 0);
                        self.segments.pop();
                    }
                }
                Label::Mask(mask) => {
                    let after_det = self.after_determiner();
                    for hit in self.core_hits(tpos, after_det).iter() {
                        if !mask.matches_code(&hit.entry, hit.segment.code.as_deref()) {
                            continue;
                        }
                        self.segments.push(hit.segment.clone());
                        self.walk(net, next.clone(), hit.end, 0);
                        self.segments.pop();
                    }
                }
                _ => {}
            }
        }
    }
}

/// Splits TB++ text into tokens: maximal runs of transliteration
/// characters. Everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if is_tbpp(c) || c == TATWEEL {
            cur.push(c);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// `token<TAB>analysis<TAB>analysis...`, or `token<TAB>?` when unknown.
pub fn format_line(r: &TokenAnalyses) -> String {
    if r.analyses.is_empty() {
        return format!("{}\t?", r.token);
    }
    let mut line = r.token.clone();
    for a in r.analyses.iter() {
        line.push('\t');
        line.push_str(&a.to_string());
    }
    line
}

/// One JSON object per token.
pub fn format_json(r: &TokenAnalyses) -> String {
    serde_json::to_string(r).expect("analyses serialize")
}

/// Restored candidates of a token, `|`-separated; unknown tokens are kept
/// as written.
pub fn format_restored(r: &TokenAnalyses) -> String {
    let forms: BTreeSet<&str> = r.analyses.iter().map(|a| a.restored.as_str()).collect();
    if forms.is_empty() {
        r.token.clone()
    } else {
        forms.into_iter().collect::<Vec<_>>().join("|")
    }
}
