//! Graph grammars: a line-based text format for transducer networks,
//! flattening into a single automaton, an interpreter that walks the
//! network without flattening, and the inflection engine that turns lemma
//! lexicons into full-form dictionaries.
//!
//! # Grammar text format
//!
//! ```text
//! file       = { graph } ;
//! graph      = "graph" NAME NL { line } "end" NL ;
//! line       = "initial" STATE
//!            | "final" STATE { STATE }
//!            | STATE "->" STATE ":" { item } [ "/" OUTPUT ] ;
//! item       = '"' chars '"'          (* literal *)
//!            | "L" | "R"              (* cursor left / right *)
//!            | DIGITS                 (* copy lemma letter, 1-based *)
//!            | "<LEMMA>" | "<" DIGITS ".LEMMA>"
//!            | "<E>"                  (* empty transition *)
//!            | ":" NAME               (* subgraph call *)
//!            | "<" mask ">" ;         (* lexical mask *)
//! ```
//!
//! `#` starts a comment. A transition with several items becomes a chain of
//! single-label transitions; its output, if any, is emitted last.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::lexicon::{parse_entry_at, parse_mask, DictEntry, FlatDictionary, LexicalMask, Line};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Lit(String),
    Left,
    Right,
    CopyLemmaAll,
    CopyLemmaFrom(usize),
    CopySlot(usize),
    Call(String),
    Mask(LexicalMask),
    Output(String),
    Eps,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Lit(s) => write!(f, "\"{s}\""),
            Label::Left => f.write_str("L"),
            Label::Right => f.write_str("R"),
            Label::CopyLemmaAll => f.write_str("<LEMMA>"),
            Label::CopyLemmaFrom(k) => write!(f, "<{k}.LEMMA>"),
            Label::CopySlot(k) => write!(f, "{k}"),
            Label::Call(g) => write!(f, ":{g}"),
            Label::Mask(m) => write!(f, "{m}"),
            Label::Output(o) => write!(f, "/ {o}"),
            Label::Eps => f.write_str("<E>"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: malformed label `{label}`")]
    MalformedLabel { line: usize, label: String },
    #[error("graph `{0}` has no final state")]
    NoFinalState(String),
    #[error("graph `{0}` has no initial state")]
    NoInitialState(String),
    #[error("graph `{graph}` calls unknown graph `{callee}`")]
    UnresolvedSubgraph { graph: String, callee: String },
    #[error("graph `{0}` is defined twice")]
    DuplicateGraph(String),
    #[error("unknown graph `{0}`")]
    UnknownGraph(String),
    #[error("recursive grammar: {}", .0.join(" -> "))]
    RecursiveGrammar(Vec<String>),
    #[error("label {0} is not allowed here")]
    UnexpectedLabel(String),
    #[error("cursor moved past the edge of the word ({0})")]
    CursorUnderflow(char),
    #[error("slot {slot} is outside the {len}-letter lemma")]
    SlotOutOfRange { slot: usize, len: usize },
    #[error("inflection path longer than {0} steps (cycle?)")]
    PathTooLong(usize),
    #[error("line {line}: unknown inflection class `{class}`")]
    UnknownClass { line: usize, class: String },
    #[error("line {line}: {msg}")]
    BadLexiconLine { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub label: Label,
}

/// One named graph of a network. States are numbered `0..states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphGraph {
    pub name: String,
    pub states: usize,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<Transition>,
}

impl MorphGraph {
    pub fn calls(&self) -> impl Iterator<Item = &str> {
        self.transitions.iter().filter_map(|t| match &t.label {
            Label::Call(g) => Some(g.as_str()),
            _ => None,
        })
    }

    /// Renders the graph in the text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph {}\ninitial {}\nfinal", self.name, self.initial);
        for f in &self.finals {
            out.push_str(&format!(" {f}"));
        }
        out.push('\n');
        for t in &self.transitions {
            let label = match &t.label {
                Label::Output(o) => format!("/ {o}"),
                l => l.to_string(),
            };
            out.push_str(&format!("{} -> {} : {label}\n", t.from, t.to));
        }
        out.push_str("end\n");
        out
    }
}

/// A set of named graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrammarSet {
    pub graphs: BTreeMap<String, MorphGraph>,
}

struct GraphDraft {
    name: String,
    start_line: usize,
    names: HashMap<String, usize>,
    initial: Option<usize>,
    finals: BTreeSet<usize>,
    transitions: Vec<Transition>,
}

impl GraphDraft {
    fn state(&mut self, name: &str) -> usize {
        let n = self.names.len();
        *self.names.entry(name.to_string()).or_insert(n)
    }

    fn fresh(&mut self) -> usize {
        let n = self.names.len();
        self.names.insert(format!("#{n}"), n);
        n
    }

    fn finish(self) -> Result<MorphGraph, GrammarError> {
        let initial = self
            .initial
            .ok_or_else(|| GrammarError::NoInitialState(self.name.clone()))?;
        if self.finals.is_empty() {
            return Err(GrammarError::NoFinalState(self.name));
        }
        let _ = self.start_line;
        Ok(MorphGraph {
            name: self.name,
            states: self.names.len(),
            initial,
            finals: self.finals,
            transitions: self.transitions,
        })
    }
}

fn tokenize_items(text: &str, line: usize) -> Result<Vec<String>, GrammarError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let close = match c {
            '"' => Some('"'),
            '<' => Some('>'),
            _ => None,
        };
        let start = i;
        if let Some(close) = close {
            let end = chars[i + 1..]
                .iter()
                .position(|&x| x == close)
                .ok_or_else(|| GrammarError::MalformedLabel {
                    line,
                    label: chars[start..].iter().collect(),
                })?;
            i = i + 1 + end + 1;
        } else {
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
        }
        out.push(chars[start..i].iter().collect());
    }
    Ok(out)
}

fn parse_item(item: &str, line: usize) -> Result<Label, GrammarError> {
    let bad = || GrammarError::MalformedLabel {
        line,
        label: item.to_string(),
    };
    if let Some(lit) = item.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        if lit.is_empty() {
            return Err(bad());
        }
        return Ok(Label::Lit(lit.to_string()));
    }
    match item {
        "L" => return Ok(Label::Left),
        "R" => return Ok(Label::Right),
        "<LEMMA>" => return Ok(Label::CopyLemmaAll),
        "<E>" => return Ok(Label::Eps),
        _ => {}
    }
    if let Some(name) = item.strip_prefix(':') {
        if name.is_empty() {
            return Err(bad());
        }
        return Ok(Label::Call(name.to_string()));
    }
    if item.chars().all(|c| c.is_ascii_digit()) {
        let k: usize = item.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        return Ok(Label::CopySlot(k));
    }
    if let Some(k) = item
        .strip_prefix('<')
        .and_then(|s| s.strip_suffix(".LEMMA>"))
    {
        let k: usize = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        return Ok(Label::CopyLemmaFrom(k));
    }
    if item.starts_with('<') {
        return parse_mask(item).map(Label::Mask).map_err(|_| bad());
    }
    Err(bad())
}

impl GrammarSet {
    pub fn parse(text: &str) -> Result<GrammarSet, GrammarError> {
        let mut set = GrammarSet::default();
        let mut current: Option<GraphDraft> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let syntax = |msg: &str| GrammarError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let mut words = body.split_whitespace();
            let head = words.next().unwrap();
            match (head, current.as_mut()) {
                ("graph", None) => {
                    let name = words.next().ok_or_else(|| syntax("graph needs a name"))?;
                    if words.next().is_some() {
                        return Err(syntax("graph names cannot contain spaces"));
                    }
                    current = Some(GraphDraft {
                        name: name.to_string(),
                        start_line: line,
                        names: HashMap::new(),
                        initial: None,
                        finals: BTreeSet::new(),
                        transitions: Vec::new(),
                    });
                }
                ("graph", Some(_)) => return Err(syntax("missing `end` before `graph`")),
                (_, None) => return Err(syntax("expected `graph NAME`")),
                ("end", Some(_)) => {
                    let g = current.take().unwrap().finish()?;
                    if set.graphs.contains_key(&g.name) {
                        return Err(GrammarError::DuplicateGraph(g.name));
                    }
                    set.graphs.insert(g.name.clone(), g);
                }
                ("initial", Some(d)) => {
                    let q = words
                        .next()
                        .ok_or_else(|| syntax("initial needs a state"))?;
                    d.initial = Some(d.state(q));
                }
                ("final", Some(d)) => {
                    let mut any = false;
                    for q in words {
                        let s = d.state(q);
                        d.finals.insert(s);
                        any = true;
                    }
                    if !any {
                        return Err(syntax("final needs at least one state"));
                    }
                }
                (_, Some(d)) => {
                    let (lhs, rhs) = body
                        .split_once(':')
                        .ok_or_else(|| syntax("expected `q -> q' : items`"))?;
                    let (from, to) = lhs
                        .split_once("->")
                        .ok_or_else(|| syntax("expected `q -> q' : items`"))?;
                    let (from, to) = (from.trim(), to.trim());
                    if from.is_empty() || to.is_empty() {
                        return Err(syntax("empty state name"));
                    }
                    let (items_text, output) = match rhs.split_once('/') {
                        Some((a, b)) => (a, Some(b.trim())),
                        None => (rhs, None),
                    };
                    let mut labels = tokenize_items(items_text, line)?
                        .iter()
                        .map(|it| parse_item(it, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    if let Some(o) = output {
                        if o.is_empty() {
                            return Err(syntax("empty output"));
                        }
                        labels.push(Label::Output(o.to_string()));
                    }
                    if labels.is_empty() {
                        return Err(syntax("transition without a label"));
                    }
                    let from = d.state(from);
                    let to = d.state(to);
                    let mut at = from;
                    let last = labels.len() - 1;
                    for (k, label) in labels.into_iter().enumerate() {
                        let next = if k == last { to } else { d.fresh() };
                        d.transitions.push(Transition {
                            from: at,
                            to: next,
                            label,
                        });
                        at = next;
                    }
                }
            }
        }
        if let Some(d) = current {
            return Err(GrammarError::Syntax {
                line: d.start_line,
                msg: format!("graph `{}` is missing `end`", d.name),
            });
        }
        set.validate()?;
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GrammarSet, GrammarError> {
        let text = std::fs::read_to_string(path).map_err(|e| GrammarError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    /// Merges the graphs of several files.
    pub fn merge(mut self, other: GrammarSet) -> Result<GrammarSet, GrammarError> {
        for (name, g) in other.graphs {
            if self.graphs.contains_key(&name) {
                return Err(GrammarError::DuplicateGraph(name));
            }
            self.graphs.insert(name, g);
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), GrammarError> {
        for g in self.graphs.values() {
            for callee in g.calls() {
                if !self.graphs.contains_key(callee) {
                    return Err(GrammarError::UnresolvedSubgraph {
                        graph: g.name.clone(),
                        callee: callee.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&MorphGraph, GrammarError> {
        self.graphs
            .get(name)
            .ok_or_else(|| GrammarError::UnknownGraph(name.to_string()))
    }

    /// Fails with the offending call chain when `root` reaches a cycle.
    pub fn check_acyclic(&self, root: &str) -> Result<(), GrammarError> {
        fn visit<'a>(
            gs: &'a GrammarSet,
            name: &'a str,
            stack: &mut Vec<&'a str>,
            done: &mut HashSet<&'a str>,
        ) -> Result<(), GrammarError> {
            if let Some(i) = stack.iter().position(|s| *s == name) {
                let mut cycle: Vec<String> = stack[i..].iter().map(|s| s.to_string()).collect();
                cycle.push(name.to_string());
                return Err(GrammarError::RecursiveGrammar(cycle));
            }
            if done.contains(name) {
                return Ok(());
            }
            stack.push(name);
            for callee in gs.get(name)?.calls() {
                visit(gs, callee, stack, done)?;
            }
            stack.pop();
            done.insert(name);
            Ok(())
        }
        visit(self, root, &mut Vec::new(), &mut HashSet::new())
    }

    /// Inlines every subgraph call reachable from `root`, removes empty
    /// transitions and trims useless states.
    pub fn flatten(&self, root: &str) -> Result<Fst, GrammarError> {
        self.check_acyclic(root)?;
        let mut memo: HashMap<String, MorphGraph> = HashMap::new();
        let inlined = self.inline(root, &mut memo)?;
        Ok(Fst::from_epsilon_graph(&inlined))
    }

    fn inline(
        &self,
        name: &str,
        memo: &mut HashMap<String, MorphGraph>,
    ) -> Result<MorphGraph, GrammarError> {
        if let Some(g) = memo.get(name) {
            return Ok(g.clone());
        }
        let src = self.get(name)?;
        let mut g = MorphGraph {
            name: src.name.clone(),
            states: src.states,
            initial: src.initial,
            finals: src.finals.clone(),
            transitions: Vec::new(),
        };
        for t in &src.transitions {
            match &t.label {
                Label::Call(callee) => {
                    let sub = self.inline(callee, memo)?;
                    let off = g.states;
                    g.states += sub.states;
                    g.transitions
                        .extend(sub.transitions.iter().map(|st| Transition {
                            from: st.from + off,
                            to: st.to + off,
                            label: st.label.clone(),
                        }));
                    g.transitions.push(Transition {
                        from: t.from,
                        to: sub.initial + off,
                        label: Label::Eps,
                    });
                    for f in &sub.finals {
                        g.transitions.push(Transition {
                            from: f + off,
                            to: t.to,
                            label: Label::Eps,
                        });
                    }
                }
                _ => g.transitions.push(t.clone()),
            }
        }
        memo.insert(name.to_string(), g.clone());
        Ok(g)
    }
}

/// A single automaton without calls or empty transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    pub initial: usize,
    pub finals: Vec<bool>,
    /// Outgoing transitions per state, in insertion order.
    pub out: Vec<Vec<(Label, usize)>>,
}

impl Fst {
    fn from_epsilon_graph(g: &MorphGraph) -> Fst {
        let mut eps: Vec<Vec<usize>> = vec![Vec::new(); g.states];
        let mut plain: Vec<Vec<(Label, usize)>> = vec![Vec::new(); g.states];
        for t in &g.transitions {
            match t.label {
                Label::Eps => eps[t.from].push(t.to),
                _ => plain[t.from].push((t.label.clone(), t.to)),
            }
        }
        let mut finals = vec![false; g.states];
        let mut out: Vec<Vec<(Label, usize)>> = vec![Vec::new(); g.states];
        for p in 0..g.states {
            // Closure in discovery order keeps the result deterministic.
            let mut seen = vec![false; g.states];
            let mut order = vec![p];
            seen[p] = true;
            let mut k = 0;
            while k < order.len() {
                for &q in &eps[order[k]] {
                    if !seen[q] {
                        seen[q] = true;
                        order.push(q);
                    }
                }
                k += 1;
            }
            for &r in &order {
                finals[p] |= g.finals.contains(&r);
                for edge in &plain[r] {
                    if !out[p].contains(edge) {
                        out[p].push(edge.clone());
                    }
                }
            }
        }
        Fst {
            initial: g.initial,
            finals,
            out,
        }
        .trim()
    }

    /// Drops states that are unreachable or cannot reach a final state.
    /// Kept states retain their relative order.
    fn trim(self) -> Fst {
        let n = self.out.len();
        let mut reach = vec![false; n];
        let mut stack = vec![self.initial];
        reach[self.initial] = true;
        while let Some(p) = stack.pop() {
            for (_, q) in &self.out[p] {
                if !reach[*q] {
                    reach[*q] = true;
                    stack.push(*q);
                }
            }
        }
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for p in 0..n {
            for (_, q) in &self.out[p] {
                rev[*q].push(p);
            }
        }
        let mut coreach = self.finals.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&p| coreach[p]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !coreach[p] {
                    coreach[p] = true;
                    stack.push(p);
                }
            }
        }
        let keep: Vec<bool> = (0..n)
            .map(|p| (reach[p] && coreach[p]) || p == self.initial)
            .collect();
        let mut id = vec![usize::MAX; n];
        let mut next = 0;
        for p in 0..n {
            if keep[p] {
                id[p] = next;
                next += 1;
            }
        }
        let mut out = vec![Vec::new(); next];
        let mut finals = vec![false; next];
        for p in (0..n).filter(|&p| keep[p]) {
            finals[id[p]] = self.finals[p];
            out[id[p]] = self.out[p]
                .iter()
                .filter(|(_, q)| keep[*q])
                .map(|(l, q)| (l.clone(), id[*q]))
                .collect();
        }
        Fst {
            initial: id[self.initial],
            finals,
            out,
        }
    }

    pub fn state_count(&self) -> usize {
        self.out.len()
    }

    pub fn transition_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// The automaton as a one-graph grammar named `name`.
    pub fn to_graph(&self, name: &str) -> MorphGraph {
        MorphGraph {
            name: name.to_string(),
            states: self.out.len(),
            initial: self.initial,
            finals: (0..self.out.len()).filter(|&p| self.finals[p]).collect(),
            transitions: self
                .out
                .iter()
                .enumerate()
                .flat_map(|(p, edges)| {
                    edges.iter().map(move |(l, q)| Transition {
                        from: p,
                        to: *q,
                        label: l.clone(),
                    })
                })
                .collect(),
        }
    }

    /// Every label sequence of at most `max_len` labels that reaches a
    /// final state.
    pub fn label_paths(&self, max_len: usize) -> BTreeSet<Vec<Label>> {
        let mut out = BTreeSet::new();
        let mut path = Vec::new();
        self.paths_from(self.initial, max_len, &mut path, &mut out);
        out
    }

    fn paths_from(
        &self,
        p: usize,
        budget: usize,
        path: &mut Vec<Label>,
        out: &mut BTreeSet<Vec<Label>>,
    ) {
        if self.finals[p] {
            out.insert(path.clone());
        }
        if budget == 0 {
            return;
        }
        for (l, q) in &self.out[p] {
            path.push(l.clone());
            self.paths_from(*q, budget - 1, path, out);
            path.pop();
        }
    }

    /// Checks that only the given kinds of labels occur.
    pub fn check_labels(&self, allowed: impl Fn(&Label) -> bool) -> Result<(), GrammarError> {
        for edges in &self.out {
            for (l, _) in edges {
                if !allowed(l) {
                    return Err(GrammarError::UnexpectedLabel(l.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// A walkable grammar: either a flattened [`Fst`] or an [`Rtn`].
pub trait Network: Sync {
    type State: Clone + Eq + std::hash::Hash + Send;

    fn start(&self) -> Self::State;
    fn is_accepting(&self, s: &Self::State) -> bool;
    /// Label-consuming moves out of `s`.
    fn moves<'a>(&'a self, s: &Self::State) -> Vec<(&'a Label, Self::State)>;
}

impl Network for Fst {
    type State = usize;

    fn start(&self) -> usize {
        self.initial
    }

    fn is_accepting(&self, s: &usize) -> bool {
        self.finals[*s]
    }

    fn moves<'a>(&'a self, s: &usize) -> Vec<(&'a Label, usize)> {
        self.out[*s].iter().map(|(l, q)| (l, *q)).collect()
    }
}

/// Maximum call depth of the network interpreter.
pub const MAX_CALL_DEPTH: usize = 32;

#[derive(Debug, Clone)]
struct IndexedGraph {
    initial: usize,
    finals: Vec<bool>,
    out: Vec<Vec<(Label, usize)>>,
    calls: Vec<Vec<(usize, usize)>>,
    eps: Vec<Vec<usize>>,
}

/// Interprets a network directly, keeping a stack of return states instead
/// of inlining subgraphs.
#[derive(Debug, Clone)]
pub struct Rtn {
    graphs: Vec<IndexedGraph>,
    root: usize,
}

/// Interpreter configuration: `(graph, state)` frames, innermost last.
pub type Frames = Vec<(u32, u32)>;

impl Rtn {
    pub fn new(gs: &GrammarSet, root: &str) -> Result<Rtn, GrammarError> {
        gs.get(root)?;
        let index: HashMap<&str, usize> = gs
            .graphs
            .keys()
            .enumerate()
            .map(|(i, k)| (k.as_str(), i))
            .collect();
        let graphs = gs
            .graphs
            .values()
            .map(|g| {
                let mut ig = IndexedGraph {
                    initial: g.initial,
                    finals: (0..g.states).map(|s| g.finals.contains(&s)).collect(),
                    out: vec![Vec::new(); g.states],
                    calls: vec![Vec::new(); g.states],
                    eps: vec![Vec::new(); g.states],
                };
                for t in &g.transitions {
                    match &t.label {
                        Label::Call(c) => ig.calls[t.from].push((index[c.as_str()], t.to)),
                        Label::Eps => ig.eps[t.from].push(t.to),
                        l => ig.out[t.from].push((l.clone(), t.to)),
                    }
                }
                ig
            })
            .collect();
        Ok(Rtn {
            graphs,
            root: index[root],
        })
    }

    /// Configurations reachable through empty moves, calls and returns.
    fn closure(&self, start: &Frames) -> Vec<Frames> {
        let mut seen: HashSet<Frames> = HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![start.clone()];
        while let Some(cfg) = stack.pop() {
            if !seen.insert(cfg.clone()) {
                continue;
            }
            let &(g, s) = cfg.last().unwrap();
            let graph = &self.graphs[g as usize];
            for &q in &graph.eps[s as usize] {
                let mut next = cfg.clone();
                next.last_mut().unwrap().1 = q as u32;
                stack.push(next);
            }
            if cfg.len() < MAX_CALL_DEPTH {
                for &(callee, ret) in &graph.calls[s as usize] {
                    let mut next = cfg.clone();
                    next.last_mut().unwrap().1 = ret as u32;
                    next.push((callee as u32, self.graphs[callee].initial as u32));
                    stack.push(next);
                }
            }
            if graph.finals[s as usize] && cfg.len() > 1 {
                let mut next = cfg.clone();
                next.pop();
                stack.push(next);
            }
            order.push(cfg);
        }
        order
    }

    /// Every label sequence of at most `max_len` labels accepted by the
    /// network.
    pub fn label_paths(&self, max_len: usize) -> BTreeSet<Vec<Label>> {
        let mut out = BTreeSet::new();
        let mut path = Vec::new();
        self.paths_from(&self.start(), max_len, &mut path, &mut out);
        out
    }

    fn paths_from(
        &self,
        cfg: &Frames,
        budget: usize,
        path: &mut Vec<Label>,
        out: &mut BTreeSet<Vec<Label>>,
    ) {
        if self.is_accepting(cfg) {
            out.insert(path.clone());
        }
        if budget == 0 {
            return;
        }
        for (l, next) in self.moves(cfg) {
            path.push(l.clone());
            self.paths_from(&next, budget - 1, path, out);
            path.pop();
        }
    }
}

impl Network for Rtn {
    type State = Frames;

    fn start(&self) -> Frames {
        vec![(self.root as u32, self.graphs[self.root].initial as u32)]
    }

    fn is_accepting(&self, s: &Frames) -> bool {
        self.closure(s).iter().any(|cfg| {
            let &(g, q) = cfg.last().unwrap();
            cfg.len() == 1 && self.graphs[g as usize].finals[q as usize]
        })
    }

    fn moves<'a>(&'a self, s: &Frames) -> Vec<(&'a Label, Frames)> {
        let mut out: Vec<(&'a Label, Frames)> = Vec::new();
        for cfg in self.closure(s) {
            let &(g, q) = cfg.last().unwrap();
            for (l, to) in &self.graphs[g as usize].out[q as usize] {
                let mut next = cfg.clone();
                next.last_mut().unwrap().1 = *to as u32;
                if !out.iter().any(|(ol, on)| *ol == l && *on == next) {
                    out.push((l, next));
                }
            }
        }
        out
    }
}

/// Edit buffer of the inflection engine: letters left of the cursor and
/// original letters still pending to its right.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InflectionBuffer {
    pub produced: Vec<char>,
    pub pending: VecDeque<char>,
}

impl InflectionBuffer {
    fn write(&mut self, c: char) {
        self.pending.pop_front();
        self.produced.push(c);
    }

    fn apply(&mut self, label: &Label, lemma: &[char]) -> Result<(), GrammarError> {
        match label {
            Label::Lit(s) => s.chars().for_each(|c| self.write(c)),
            Label::Left => {
                let c = self
                    .produced
                    .pop()
                    .ok_or(GrammarError::CursorUnderflow('L'))?;
                self.pending.push_front(c);
            }
            Label::Right => {
                let c = self
                    .pending
                    .pop_front()
                    .ok_or(GrammarError::CursorUnderflow('R'))?;
                self.produced.push(c);
            }
            Label::CopyLemmaAll => lemma.iter().for_each(|&c| self.write(c)),
            Label::CopyLemmaFrom(k) | Label::CopySlot(k) => {
                if *k == 0 || *k > lemma.len() {
                    return Err(GrammarError::SlotOutOfRange {
                        slot: *k,
                        len: lemma.len(),
                    });
                }
                if matches!(label, Label::CopySlot(_)) {
                    self.write(lemma[k - 1]);
                } else {
                    lemma[k - 1..].iter().for_each(|&c| self.write(c));
                }
            }
            Label::Output(_) | Label::Eps => {}
            Label::Call(_) | Label::Mask(_) => {
                return Err(GrammarError::UnexpectedLabel(label.to_string()))
            }
        }
        Ok(())
    }
}

/// How the inflection buffer starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InflectionMode {
    /// Starts from the whole lemma, cursor at its end.
    Concat,
    /// Starts empty; forms are built from lemma copies and literals.
    Semitic,
}

/// Longest inflection path accepted before a cycle is assumed.
pub const MAX_INFLECTION_STEPS: usize = 256;

/// All `(surface, code)` pairs produced by the paths of `fst` for `lemma`,
/// in path order. Letters still pending at the end of a path are dropped.
pub fn inflect(
    lemma: &str,
    fst: &Fst,
    mode: InflectionMode,
) -> Result<Vec<(String, String)>, GrammarError> {
    let lemma: Vec<char> = lemma.chars().collect();
    let buf = match mode {
        InflectionMode::Concat => InflectionBuffer {
            produced: lemma.clone(),
            pending: VecDeque::new(),
        },
        InflectionMode::Semitic => InflectionBuffer::default(),
    };
    let mut out = Vec::new();
    inflect_from(fst, fst.initial, &lemma, buf, String::new(), 0, &mut out)?;
    Ok(out)
}

fn inflect_from(
    fst: &Fst,
    p: usize,
    lemma: &[char],
    buf: InflectionBuffer,
    code: String,
    steps: usize,
    out: &mut Vec<(String, String)>,
) -> Result<(), GrammarError> {
    if steps > MAX_INFLECTION_STEPS {
        return Err(GrammarError::PathTooLong(MAX_INFLECTION_STEPS));
    }
    if fst.finals[p] {
        out.push((buf.produced.iter().collect(), code.clone()));
    }
    for (label, q) in &fst.out[p] {
        let mut next = buf.clone();
        next.apply(label, lemma)?;
        let mut next_code = code.clone();
        if let Label::Output(o) = label {
            next_code.push_str(o);
        }
        inflect_from(fst, *q, lemma, next, next_code, steps + 1, out)?;
    }
    Ok(())
}

/// Generates a full-form dictionary from `lemma,CLASS` lines. A class
/// starting with `$` selects the Semitic buffer mode; the rest of the class
/// names the root graph. Output is sorted and deduplicated.
pub fn generate_dictionary(lexicon: &str, gs: &GrammarSet) -> Result<FlatDictionary, GrammarError> {
    let mut jobs: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in lexicon.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('/').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (lemma, class) = body
            .split_once(',')
            .ok_or_else(|| GrammarError::BadLexiconLine {
                line,
                msg: "expected `lemma,CLASS`".into(),
            })?;
        jobs.push((line, lemma.trim().to_string(), class.trim().to_string()));
    }
    let mut fsts: HashMap<String, Fst> = HashMap::new();
    for (line, _, class) in &jobs {
        let name = class.trim_start_matches('$');
        if !fsts.contains_key(name) {
            if !gs.graphs.contains_key(name) {
                return Err(GrammarError::UnknownClass {
                    line: *line,
                    class: class.clone(),
                });
            }
            fsts.insert(name.to_string(), gs.flatten(name)?);
        }
    }
    let results = par::map(&jobs, |(line, lemma, class)| {
        let mode = if class.starts_with('$') {
            InflectionMode::Semitic
        } else {
            InflectionMode::Concat
        };
        let fst = &fsts[class.trim_start_matches('$')];
        let forms = inflect(lemma, fst, mode)?;
        forms
            .into_iter()
            .map(|(surface, code)| {
                let text = format!("{surface},{lemma}.{code}");
                match parse_entry_at(&text, *line) {
                    Ok(Line::Entry(e)) => Ok(e),
                    Ok(_) => Err(GrammarError::BadLexiconLine {
                        line: *line,
                        msg: format!("generated an empty entry from `{text}`"),
                    }),
                    Err(e) => Err(GrammarError::BadLexiconLine {
                        line: *line,
                        msg: format!("generated `{text}`: {e}"),
                    }),
                }
            })
            .collect::<Result<Vec<DictEntry>, _>>()
    });
    let mut entries = Vec::new();
    for r in results {
        entries.extend(r?);
    }
    entries.sort();
    entries.dedup();
    Ok(FlatDictionary::from_entries(entries))
}

/// Flattens an agglutination grammar and checks that it only uses clitic
/// literals, lexical masks and outputs.
pub fn build_agglutination(gs: &GrammarSet, root: &str) -> Result<Fst, GrammarError> {
    let fst = gs.flatten(root)?;
    fst.check_labels(|l| matches!(l, Label::Lit(_) | Label::Mask(_) | Label::Output(_)))?;
    Ok(fst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NOUNS: &str = include_str!("../data/grammars/nouns.grm");
    const CLITICS: &str = include_str!("../data/grammars/clitics.grm");

    fn nouns() -> GrammarSet {
        GrammarSet::parse(NOUNS).unwrap()
    }

    fn one_path(items: &str) -> Fst {
        let text = format!("graph t\ninitial 0\nfinal 1\n0 -> 1 : {items}\nend\n");
        GrammarSet::parse(&text).unwrap().flatten("t").unwrap()
    }

    #[test]
    fn parse_simple_literal() {
        let gs = GrammarSet::parse("graph p\ninitial a\nfinal b\na -> b : \"aAt\"\nend").unwrap();
        let g = gs.get("p").unwrap();
        assert_eq!(g.states, 2);
        assert_eq!(g.transitions[0].label, Label::Lit("aAt".into()));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            GrammarSet::parse("graph p\ninitial 0\n0 -> 1 : \"a\"\nend"),
            Err(GrammarError::NoFinalState(_))
        ));
        assert!(matches!(
            GrammarSet::parse("graph p\ninitial 0\nfinal 1\n0 -> 1 : :missing\nend"),
            Err(GrammarError::UnresolvedSubgraph { .. })
        ));
        assert!(matches!(
            GrammarSet::parse("graph p\ninitial 0\nfinal 1\n0 -> 1 : <bogus\nend"),
            Err(GrammarError::MalformedLabel { .. })
        ));
        assert!(matches!(
            GrammarSet::parse("graph p\ninitial 0\nfinal 1\n0 -> 1 : 0\nend"),
            Err(GrammarError::MalformedLabel { .. })
        ));
        assert!(matches!(
            GrammarSet::parse("graph p\ninitial 0\nfinal 1\n0 -> 1 : \"a\""),
            Err(GrammarError::Syntax { .. })
        ));
    }

    #[test]
    fn calls_resolve_in_fixture() {
        let gs = nouns();
        assert!(gs
            .get("N-fem-ap")
            .unwrap()
            .calls()
            .any(|c| c == "N-Sfx-uiiNKK"));
    }

    #[test]
    fn recursion_is_rejected_at_flatten_time() {
        let text = "graph a\ninitial 0\nfinal 1\n0 -> 1 : :b\nend\n\
                    graph b\ninitial 0\nfinal 1\n0 -> 1 : \"x\"\n0 -> 1 : :a\nend\n";
        let gs = GrammarSet::parse(text).unwrap();
        assert_eq!(
            gs.flatten("a"),
            Err(GrammarError::RecursiveGrammar(vec![
                "a".into(),
                "b".into(),
                "a".into()
            ]))
        );
    }

    #[test]
    fn flatten_without_calls_is_isomorphic() {
        let text =
            "graph t\ninitial 0\nfinal 2\n0 -> 1 : \"a\"\n1 -> 2 : \"b\"\n0 -> 2 : \"c\"\nend\n";
        let gs = GrammarSet::parse(text).unwrap();
        let fst = gs.flatten("t").unwrap();
        let g = gs.get("t").unwrap();
        assert_eq!(fst.state_count(), g.states);
        assert_eq!(fst.transition_count(), g.transitions.len());
        let mut flat = fst.to_graph("t").transitions;
        let mut orig = g.transitions.clone();
        flat.sort_by_key(|t| (t.from, t.to, t.label.clone()));
        orig.sort_by_key(|t| (t.from, t.to, t.label.clone()));
        assert_eq!(flat, orig);
    }

    #[test]
    fn subgraph_called_twice_matches_interpreter() {
        let text = "graph root\ninitial 0\nfinal 3\n0 -> 1 : :s\n1 -> 2 : \"-\"\n2 -> 3 : :s\n0 -> 3 : <E>\nend\n\
                    graph s\ninitial 0\nfinal 1 2\n0 -> 1 : \"a\"\n0 -> 2 : \"b\" / X\n1 -> 2 : \"c\"\nend\n";
        let gs = GrammarSet::parse(text).unwrap();
        let fst = gs.flatten("root").unwrap();
        let rtn = Rtn::new(&gs, "root").unwrap();
        let flat = fst.label_paths(12);
        assert_eq!(flat, rtn.label_paths(12));
        assert_eq!(flat.len(), 1 + 3 * 3);
        assert!(fst.state_count() >= gs.get("root").unwrap().states);
    }

    #[test]
    fn concatenative_literals_append() {
        let fst = one_path("\"aAt\" \"u\"");
        let forms = inflect("kalim", &fst, InflectionMode::Concat).unwrap();
        assert_eq!(forms, [("kalimaAtu".to_string(), String::new())]);
    }

    #[test]
    fn cursor_examples() {
        let fst = one_path("L L \"aAt\" \"u\" / N:fpDN");
        assert_eq!(
            inflect("nufaAyap", &fst, InflectionMode::Concat).unwrap(),
            [("nufaAyaAtu".to_string(), "N:fpDN".to_string())]
        );
        let fst = one_path("L L L L \"a\" R \"aAt\"");
        assert_eq!(
            inflect("laSoqap", &fst, InflectionMode::Concat).unwrap()[0].0,
            "laSaqaAt"
        );
        let fst = one_path("1 \"u\" 3 \"a\" 5");
        assert_eq!(
            inflect("Euqodap", &fst, InflectionMode::Semitic).unwrap()[0].0,
            "Euqad"
        );
        let fst = one_path("1 \"i\" <3.LEMMA>");
        assert_eq!(
            inflect("nufaAyap", &fst, InflectionMode::Semitic).unwrap()[0].0,
            "nifaAyap"
        );
    }

    #[test]
    fn cursor_errors() {
        let fst = one_path("L L L");
        assert_eq!(
            inflect("ab", &fst, InflectionMode::Concat),
            Err(GrammarError::CursorUnderflow('L'))
        );
        let fst = one_path("R");
        assert_eq!(
            inflect("ab", &fst, InflectionMode::Concat),
            Err(GrammarError::CursorUnderflow('R'))
        );
        let fst = one_path("7");
        assert_eq!(
            inflect("abc", &fst, InflectionMode::Semitic),
            Err(GrammarError::SlotOutOfRange { slot: 7, len: 3 })
        );
    }

    #[test]
    fn paradigm_with_vowel_variant() {
        let d = generate_dictionary("nufaAyap,$N-fem-ap-ui", &nouns()).unwrap();
        let pairs: usize = d.entries.iter().map(|e| e.codes.len()).sum();
        assert_eq!(pairs, 54);
        assert!(d.entries.iter().all(|e| e.lemma == "nufaAyap"));
        let with_u = d
            .entries
            .iter()
            .filter(|e| e.surface.starts_with("nu"))
            .count();
        let with_i = d
            .entries
            .iter()
            .filter(|e| e.surface.starts_with("ni"))
            .count();
        assert_eq!((with_u, with_i), (27, 27));
        let lines: Vec<String> = d.entries.iter().map(|e| e.to_string()).collect();
        for l in [
            "nufaAyaAtu,nufaAyap.N:fpDN",
            "nifaAyaAtK,nufaAyap.N:fpiA",
            "nifaAyataAni,nufaAyap.N:fdDN",
            "nufaAyapF,nufaAyap.N:fsiA",
        ] {
            assert!(lines.iter().any(|x| x == l), "{l}");
        }
    }

    #[test]
    fn broken_plural_variants() {
        let d = generate_dictionary("Saliyob,$N-Saliyob", &nouns()).unwrap();
        let surfaces: BTreeSet<&str> = d.entries.iter().map(|e| e.surface.as_str()).collect();
        assert!(surfaces.contains("SulobaAnu"));
        assert!(surfaces.contains("SilobaAnu"));
        assert!(!surfaces.iter().any(|s| s.starts_with("SalobaAn")));
    }

    #[test]
    fn plural_with_cursor_right() {
        let d = generate_dictionary("laSoqap,N-fem-ap-ao", &nouns()).unwrap();
        let surfaces: BTreeSet<&str> = d.entries.iter().map(|e| e.surface.as_str()).collect();
        assert!(surfaces.contains("laSaqaAtu"));
        assert!(surfaces.contains("laSoqaAtu"));
    }

    #[test]
    fn generation_edge_cases() {
        assert!(generate_dictionary("", &nouns()).unwrap().is_empty());
        assert_eq!(
            generate_dictionary("kitaAb,NOPE", &nouns()).unwrap_err(),
            GrammarError::UnknownClass {
                line: 1,
                class: "NOPE".into()
            }
        );
    }

    #[test]
    fn generated_entries_parse_back() {
        let d =
            generate_dictionary("nufaAyap,$N-fem-ap-ui\nlaSoqap,N-fem-ap-ao", &nouns()).unwrap();
        for e in &d.entries {
            assert_eq!(
                parse_entry_at(&e.to_string(), 1),
                Ok(Line::Entry(e.clone()))
            );
        }
    }

    #[test]
    fn agglutination_grammar() {
        let gs = GrammarSet::parse(CLITICS).unwrap();
        let fst = build_agglutination(&gs, "Word").unwrap();
        let paths = fst.label_paths(8);
        let kinds = |p: &Vec<Label>| -> String {
            p.iter()
                .filter_map(|l| match l {
                    Label::Lit(s) => Some(format!("[{s}]")),
                    Label::Mask(m) => Some(m.pos.clone()),
                    Label::Output(_) => None,
                    _ => Some("?".into()),
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let rendered: BTreeSet<String> = paths.iter().map(kinds).collect();
        assert!(rendered.contains("[wa] [la] V [hA]"));
        assert!(rendered.contains("[Al] N"));
        assert!(!rendered
            .iter()
            .any(|r| r.starts_with('V') && r.contains("[wa]")));
        let rtn = Rtn::new(&gs, "Word").unwrap();
        assert_eq!(rtn.label_paths(8), paths);
    }

    #[test]
    fn agglutination_rejects_operators() {
        let text = "graph w\ninitial 0\nfinal 1\n0 -> 1 : L\nend\n";
        let gs = GrammarSet::parse(text).unwrap();
        assert!(matches!(
            build_agglutination(&gs, "w"),
            Err(GrammarError::UnexpectedLabel(_))
        ));
    }

    #[test]
    fn text_rendering_round_trips() {
        let gs = nouns();
        let fst = gs.flatten("N-fem-ap-ui").unwrap();
        let g = fst.to_graph("flat");
        let back = GrammarSet::parse(&g.to_text()).unwrap();
        let again = back.flatten("flat").unwrap();
        assert_eq!(again.label_paths(20), fst.label_paths(20));
    }
}
