//! Random dictionaries and texts.

use rand::seq::SliceRandom;
use rand::Rng;

use tashkil::DictEntry;

const LETTERS: &[char] = &[
    'b', 't', 'v', 'j', 'H', 'x', 'd', 'r', 'z', 's', 'M', 'S', 'D', 'T', 'E', 'g', 'f', 'q', 'k',
    'l', 'm', 'n', 'h', 'w', 'y',
];
const CODES: &[&str] = &["msDN", "fsiA", "mpaG", "fdDA", "msiN"];

/// A fully vowelized random surface with at most `max_marks` diacritics.
pub fn surface<R: Rng>(rng: &mut R, max_marks: usize) -> String {
    let mut w = String::new();
    let mut marks = 0;
    let mark = |w: &mut String, s: &str, marks: &mut usize| {
        let n = s.chars().count();
        if *marks + n <= max_marks {
            w.push_str(s);
            *marks += n;
        }
    };
    match rng.gen_range(0..10) {
        0 => w.push('O'),
        1 => w.push('I'),
        2 => {
            w.push_str("Al");
        }
        _ => {}
    }
    if !w.is_empty() {
        let v = ["a", "u", "i", "o"].choose(rng).unwrap();
        mark(&mut w, v, &mut marks);
    }
    let n = rng.gen_range(2..=5);
    for _ in 0..n {
        w.push(*LETTERS.choose(rng).unwrap());
        let m = match rng.gen_range(0..20) {
            0..=5 => "",
            6..=15 => ["a", "u", "i", "o"].choose(rng).unwrap(),
            16 | 17 => ["Ga", "Gu", "Gi"].choose(rng).unwrap(),
            18 => "aA",
            _ => "R",
        };
        mark(&mut w, m, &mut marks);
    }
    // A letter carries at most one mark or shadda cluster.
    let bare_end = w
        .chars()
        .last()
        .is_some_and(|c| !tashkil::alphabet::is_diacritic(c));
    match if bare_end { rng.gen_range(0..12) } else { 12 } {
        0 => mark(&mut w, "N", &mut marks),
        1 => mark(&mut w, "K", &mut marks),
        2 => mark(&mut w, "FA", &mut marks),
        3 => mark(&mut w, "GFA", &mut marks),
        4 => mark(&mut w, "FY", &mut marks),
        _ => {}
    }
    w
}

pub fn skeleton(surface: &str) -> String {
    tashkil::alphabet::strip_diacritics(surface).0
}

/// `n` random entries; some surfaces carry several entries.
pub fn entries<R: Rng>(rng: &mut R, n: usize, max_marks: usize) -> Vec<DictEntry> {
    let mut out: Vec<DictEntry> = Vec::with_capacity(n);
    while out.len() < n {
        let s = if !out.is_empty() && rng.gen_bool(0.05) {
            out.choose(rng).unwrap().surface.clone()
        } else {
            surface(rng, max_marks)
        };
        let lemma = if rng.gen_bool(0.7) {
            skeleton(&s)
        } else {
            s.clone()
        };
        out.push(DictEntry {
            surface: s,
            lemma,
            pos: "N".into(),
            sem: Vec::new(),
            codes: vec![CODES.choose(rng).unwrap().to_string()],
        });
    }
    out
}
