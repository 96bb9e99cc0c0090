//! Minimal acyclic deterministic automaton over surface forms.
//!
//! Built incrementally from lexicographically sorted input: after each word
//! the part of the previous path that can no longer change is merged with
//! an equivalent registered state. Final states carry sorted lists of INF
//! indices, which take part in state equivalence.

use std::collections::HashMap;

/// Flat, read-only automaton. State 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Madfa {
    pub(crate) trans_start: Vec<u32>,
    pub(crate) trans_char: Vec<char>,
    pub(crate) trans_target: Vec<u32>,
    pub(crate) inf_start: Vec<u32>,
    pub(crate) infs: Vec<u32>,
}

impl Madfa {
    pub const ROOT: u32 = 0;

    pub fn state_count(&self) -> usize {
        self.trans_start.len().saturating_sub(1)
    }

    pub fn transition_count(&self) -> usize {
        self.trans_char.len()
    }

    pub fn is_final(&self, s: u32) -> bool {
        let s = s as usize;
        self.inf_start[s] < self.inf_start[s + 1]
    }

    pub fn state_infs(&self, s: u32) -> &[u32] {
        let s = s as usize;
        &self.infs[self.inf_start[s] as usize..self.inf_start[s + 1] as usize]
    }

    /// Outgoing transitions of `s`, sorted by character.
    pub fn transitions(&self, s: u32) -> impl Iterator<Item = (char, u32)> + '_ {
        let s = s as usize;
        let range = self.trans_start[s] as usize..self.trans_start[s + 1] as usize;
        self.trans_char[range.clone()]
            .iter()
            .copied()
            .zip(self.trans_target[range].iter().copied())
    }

    pub fn step(&self, s: u32, c: char) -> Option<u32> {
        let s = s as usize;
        let range = self.trans_start[s] as usize..self.trans_start[s + 1] as usize;
        let chars = &self.trans_char[range.clone()];
        chars
            .binary_search(&c)
            .ok()
            .map(|i| self.trans_target[range.start + i])
    }

    /// State reached by reading `word` from the root.
    pub fn walk(&self, word: &str) -> Option<u32> {
        if self.state_count() == 0 {
            return None;
        }
        word.chars().try_fold(Self::ROOT, |s, c| self.step(s, c))
    }

    pub fn accepts(&self, word: &str) -> bool {
        self.walk(word).is_some_and(|s| self.is_final(s))
    }

    /// Every accepted word with its INF indices, in lexicographic order.
    pub fn words(&self) -> Vec<(String, Vec<u32>)> {
        let mut out = Vec::new();
        if self.state_count() == 0 {
            return out;
        }
        let mut path = String::new();
        self.collect_words(Self::ROOT, &mut path, &mut out);
        out
    }

    fn collect_words(&self, s: u32, path: &mut String, out: &mut Vec<(String, Vec<u32>)>) {
        if self.is_final(s) {
            out.push((path.clone(), self.state_infs(s).to_vec()));
        }
        for (c, t) in self.transitions(s) {
            path.push(c);
            self.collect_words(t, path, out);
            path.pop();
        }
    }

    /// Structural checks: determinism, sorted transitions, acyclicity,
    /// every state reachable and co-reachable.
    pub fn check(&self) -> Result<(), String> {
        let n = self.state_count();
        if n == 0 {
            return Ok(());
        }
        for s in 0..n as u32 {
            let chars: Vec<char> = self.transitions(s).map(|(c, _)| c).collect();
            if chars.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("state {s}: transitions not strictly sorted"));
            }
            if let Some((_, t)) = self.transitions(s).find(|(_, t)| *t as usize >= n) {
                return Err(format!("state {s}: target {t} out of range"));
            }
            if !self.is_final(s) && self.transitions(s).next().is_none() && n > 1 {
                return Err(format!("state {s}: dead state"));
            }
        }
        // Acyclic and reachable: iterative DFS with colors.
        let mut color = vec![0u8; n];
        let mut stack = vec![(Self::ROOT, false)];
        while let Some((s, done)) = stack.pop() {
            if done {
                color[s as usize] = 2;
                continue;
            }
            match color[s as usize] {
                1 => return Err(format!("cycle through state {s}")),
                2 => continue,
                _ => {}
            }
            color[s as usize] = 1;
            stack.push((s, true));
            for (_, t) in self.transitions(s) {
                match color[t as usize] {
                    1 => return Err(format!("cycle through state {t}")),
                    0 => stack.push((t, false)),
                    _ => {}
                }
            }
        }
        if let Some(s) = color.iter().position(|&c| c != 2) {
            return Err(format!("state {s} unreachable"));
        }
        Ok(())
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
struct BuildState {
    trans: Vec<(char, u32)>,
    infs: Vec<u32>,
}

/// Incremental builder. Words must arrive in strictly increasing order.
#[derive(Default)]
pub struct MadfaBuilder {
    states: Vec<BuildState>,
    register: HashMap<BuildState, u32>,
    /// States along the path of the previous word; `path[0]` is the root.
    path: Vec<u32>,
    last: Vec<char>,
}

impl MadfaBuilder {
    pub fn new() -> Self {
        MadfaBuilder {
            states: vec![BuildState::default()],
            path: vec![0],
            ..Default::default()
        }
    }

    /// Adds `word` with its INF indices. Panics on unsorted or duplicate
    /// input, which callers rule out by sorting and grouping first.
    pub fn insert(&mut self, word: &[char], mut infs: Vec<u32>) {
        assert!(
            self.states.len() == 1 && self.last.is_empty() || word > &self.last[..],
            "words must be inserted in strictly increasing order"
        );
        infs.sort_unstable();
        infs.dedup();
        let common = word
            .iter()
            .zip(&self.last)
            .take_while(|(a, b)| a == b)
            .count();
        self.minimize_down_to(common);
        for &c in &word[common..] {
            let parent = *self.path.last().unwrap();
            let id = self.states.len() as u32;
            self.states.push(BuildState::default());
            self.states[parent as usize].trans.push((c, id));
            self.path.push(id);
        }
        let tail = *self.path.last().unwrap();
        self.states[tail as usize].infs = infs;
        self.last = word.to_vec();
    }

    /// Replaces path states deeper than `depth` by registered equivalents.
    fn minimize_down_to(&mut self, depth: usize) {
        while self.path.len() > depth + 1 {
            let child = self.path.pop().unwrap();
            let parent = *self.path.last().unwrap();
            let key = self.states[child as usize].clone();
            let canonical = *self.register.entry(key).or_insert(child);
            if canonical != child {
                let last = self.states[parent as usize].trans.last_mut().unwrap();
                last.1 = canonical;
            }
        }
    }

    /// Finishes construction. States are renumbered breadth-first from the
    /// root so the layout depends only on the input language.
    pub fn finish(mut self) -> Madfa {
        self.minimize_down_to(0);
        if self.states[0].trans.is_empty() && self.states[0].infs.is_empty() {
            return Madfa {
                trans_start: vec![0, 0],
                inf_start: vec![0, 0],
                ..Default::default()
            };
        }
        let mut new_id = vec![u32::MAX; self.states.len()];
        let mut order = vec![0u32];
        new_id[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let s = order[head] as usize;
            head += 1;
            for &(_, t) in &self.states[s].trans {
                if new_id[t as usize] == u32::MAX {
                    new_id[t as usize] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        let mut m = Madfa::default();
        m.trans_start.push(0);
        m.inf_start.push(0);
        for &old in &order {
            let st = &self.states[old as usize];
            for &(c, t) in &st.trans {
                m.trans_char.push(c);
                m.trans_target.push(new_id[t as usize]);
            }
            m.infs.extend(&st.infs);
            m.trans_start.push(m.trans_char.len() as u32);
            m.inf_start.push(m.infs.len() as u32);
        }
        m
    }
}
