//! Reference implementations favoring clarity over speed.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use tashkil::compiler::{compute_compact_tag, Mode};
use tashkil::rules::{segment_surface, Unit};
use tashkil::{DictEntry, TypoRuleSet};

#[derive(Debug, Clone, Copy)]
pub struct EnumBudget {
    pub max_forms: usize,
    pub max_diacritics: usize,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            max_forms: 1 << 16,
            max_diacritics: 20,
        }
    }
}

fn unit_options(surface: &str, rs: &TypoRuleSet, after_det: bool) -> Vec<Vec<String>> {
    let chars: Vec<char> = surface.chars().collect();
    segment_surface(&chars)
        .iter()
        .map(|u| {
            rs.unit_realizations(u, after_det)
                .to_strings()
                .into_iter()
                .collect()
        })
        .collect()
}

/// Every text realization of `surface`, or `None` over budget.
pub fn enumerate_partial(
    surface: &str,
    rs: &TypoRuleSet,
    after_det: bool,
    budget: EnumBudget,
) -> Option<BTreeSet<String>> {
    let marks = surface
        .chars()
        .filter(|&c| tashkil::alphabet::is_diacritic(c))
        .count();
    if marks > budget.max_diacritics {
        return None;
    }
    let mut forms = vec![String::new()];
    for opts in unit_options(surface, rs, after_det) {
        if forms.len() * opts.len() > budget.max_forms {
            return None;
        }
        forms = forms
            .iter()
            .flat_map(|f| opts.iter().map(move |o| format!("{f}{o}")))
            .collect();
    }
    Some(forms.into_iter().collect())
}

/// One realization picked uniformly per unit.
pub fn random_realization<R: rand::Rng>(
    surface: &str,
    rs: &TypoRuleSet,
    after_det: bool,
    rng: &mut R,
) -> String {
    unit_options(surface, rs, after_det)
        .iter()
        .map(|o| o[rng.gen_range(0..o.len())].clone())
        .collect()
}

struct IndexedSurface {
    surface: String,
    dict: Vec<Vec<char>>,
    options: Vec<Vec<Vec<char>>>,
    entries: Vec<DictEntry>,
}

/// Linear-scan tolerant lookup over a list of entries.
pub struct NaiveIndex {
    surfaces: Vec<IndexedSurface>,
}

impl NaiveIndex {
    pub fn new(entries: &[DictEntry], rs: &TypoRuleSet, after_det: bool) -> Self {
        let mut by_surface: BTreeMap<&str, Vec<DictEntry>> = BTreeMap::new();
        for e in entries {
            by_surface.entry(&e.surface).or_default().push(e.clone());
        }
        let surfaces = by_surface
            .into_iter()
            .map(|(s, mut entries)| {
                entries.sort();
                entries.dedup();
                let chars: Vec<char> = s.chars().collect();
                let units = segment_surface(&chars);
                IndexedSurface {
                    surface: s.to_string(),
                    dict: units
                        .iter()
                        .map(|u| u.dict_seq().as_slice().to_vec())
                        .collect(),
                    options: units
                        .iter()
                        .map(|u| {
                            rs.unit_realizations(u, after_det)
                                .as_slice()
                                .iter()
                                .map(|q| q.as_slice().to_vec())
                                .collect()
                        })
                        .collect(),
                    entries,
                }
            })
            .collect();
        NaiveIndex { surfaces }
    }

    /// (restored form, entry) pairs whose surface realizes `token`.
    pub fn lookup(&self, token: &str) -> BTreeSet<(String, DictEntry)> {
        let text: Vec<char> = token.chars().collect();
        let mut out = BTreeSet::new();
        for s in &self.surfaces {
            let mut restored = Vec::new();
            walk(s, 0, &text, 0, &mut String::new(), &mut restored);
            for r in restored {
                for e in &s.entries {
                    out.insert((r.clone(), e.clone()));
                }
            }
        }
        out
    }
}

fn walk(
    s: &IndexedSurface,
    unit: usize,
    text: &[char],
    pos: usize,
    restored: &mut String,
    out: &mut Vec<String>,
) {
    if unit == s.options.len() {
        if pos == text.len() && !out.contains(restored) {
            out.push(restored.clone());
        }
        return;
    }
    for opt in &s.options[unit] {
        if !text[pos..].starts_with(opt) {
            continue;
        }
        let mark = restored.len();
        restored.extend(&s.dict[unit]);
        // A letter written with an extra G is the assimilation mark.
        if s.dict[unit].len() == 1 && opt.len() == 2 && opt[1] == 'G' {
            restored.push('G');
        }
        walk(s, unit + 1, text, pos + opt.len(), restored, out);
        restored.truncate(mark);
    }
}

/// One-shot convenience over [`NaiveIndex`].
pub fn naive_lookup(
    entries: &[DictEntry],
    rs: &TypoRuleSet,
    token: &str,
    after_det: bool,
) -> BTreeSet<(String, DictEntry)> {
    NaiveIndex::new(entries, rs, after_det).lookup(token)
}

/// Minimal DFA size for `entries` by trie construction and Moore
/// partition refinement. Final states are told apart by their tag sets.
pub fn reference_minimize(entries: &[DictEntry], mode: Mode) -> usize {
    let mut finals: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for e in entries {
        let tag = compute_compact_tag(&e.surface, &e.lemma, &e.annotation(), mode).render();
        finals.entry(e.surface.clone()).or_default().insert(tag);
    }
    let mut trie: Vec<(BTreeMap<char, usize>, BTreeSet<String>)> =
        vec![(BTreeMap::new(), BTreeSet::new())];
    for (w, tags) in &finals {
        let mut s = 0;
        for c in w.chars() {
            let n = trie.len();
            s = match trie[s].0.get(&c) {
                Some(&t) => t,
                None => {
                    trie[s].0.insert(c, n);
                    trie.push((BTreeMap::new(), BTreeSet::new()));
                    n
                }
            };
        }
        trie[s].1 = tags.clone();
    }
    let mut ids: HashMap<BTreeSet<String>, usize> = HashMap::new();
    let mut class: Vec<usize> = trie
        .iter()
        .map(|(_, tags)| {
            let n = ids.len();
            *ids.entry(tags.clone()).or_insert(n)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<(usize, Vec<(char, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = trie
            .iter()
            .enumerate()
            .map(|(i, (tr, _))| {
                let sig = (class[i], tr.iter().map(|(&c, &t)| (c, class[t])).collect());
                let n = sigs.len();
                *sigs.entry(sig).or_insert(n)
            })
            .collect();
        let n = sigs.len();
        class = next;
        if n == count {
            return n;
        }
        count = n;
    }
}

const VOWELS: [char; 4] = ['a', 'u', 'i', 'o'];

/// Tokens that put a wrong vowel where the surface has one, or a vowel
/// where it has none. At most `cap` of them.
pub fn mutate(surface: &str, cap: usize) -> BTreeSet<String> {
    let chars: Vec<char> = surface.chars().collect();
    let slots: Vec<usize> = (0..chars.len())
        .filter(|&i| VOWELS.contains(&chars[i]))
        .collect();
    let mut out = BTreeSet::new();
    // Every slot kept, dropped or replaced; at least one replaced.
    let k = slots.len().min(6);
    let total = 5usize.pow(k as u32);
    'outer: for code in 0..total {
        let mut c = code;
        let mut w = chars.clone();
        let mut drop = vec![false; w.len()];
        let mut wrong = false;
        for &i in &slots[..k] {
            let choice = c % 5;
            c /= 5;
            match choice {
                0 => {}
                1 => drop[i] = true,
                r => {
                    let others: Vec<char> =
                        VOWELS.iter().copied().filter(|&v| v != chars[i]).collect();
                    w[i] = others[r - 2];
                    wrong = true;
                }
            }
        }
        if !wrong {
            continue;
        }
        out.insert(
            w.iter()
                .zip(&drop)
                .filter(|(_, &d)| !d)
                .map(|(c, _)| *c)
                .collect(),
        );
        if out.len() >= cap {
            break 'outer;
        }
    }
    // Insertions after letters not followed by a mark.
    for i in 0..chars.len() {
        if tashkil::alphabet::is_diacritic(chars[i]) {
            continue;
        }
        if chars
            .get(i + 1)
            .is_some_and(|&c| tashkil::alphabet::is_diacritic(c))
        {
            continue;
        }
        for v in VOWELS {
            let mut w = chars.clone();
            w.insert(i + 1, v);
            out.insert(w.into_iter().collect());
        }
    }
    out
}

/// Whether `u` realizes only as itself.
pub fn is_rigid(u: &Unit, rs: &TypoRuleSet) -> bool {
    rs.unit_realizations(u, false).as_slice().len() == 1
}
