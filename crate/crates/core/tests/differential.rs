mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gen, oracle};
use tashkil::lookup::{match_token, MatchContext};
use tashkil::rules::Rule;
use tashkil::{CompiledDictionary, FlatDictionary, Mode, TypoRuleSet};

fn compiled(
    entries: &[tashkil::DictEntry],
    mode: Mode,
) -> (CompiledDictionary, Vec<tashkil::DictEntry>) {
    let flat = FlatDictionary::from_entries(entries.iter().cloned());
    let cd = CompiledDictionary::build(&flat, mode);
    (cd, flat.entries)
}

fn fast(
    cd: &CompiledDictionary,
    rs: &TypoRuleSet,
    token: &str,
    det: bool,
) -> BTreeSet<(String, tashkil::DictEntry)> {
    match_token(
        cd,
        rs,
        token,
        MatchContext {
            after_determiner: det,
        },
    )
    .into_iter()
    .map(|m| (m.restored, m.entry))
    .collect()
}

fn check_dictionary(seed: u64, n: usize, rs: &TypoRuleSet, tokens: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = gen::entries(&mut rng, n, 8);
    let mode = if seed % 2 == 0 {
        Mode::Semitic
    } else {
        Mode::Concat
    };
    let (cd, entries) = compiled(&raw, mode);
    let naive = [
        oracle::NaiveIndex::new(&entries, rs, false),
        oracle::NaiveIndex::new(&entries, rs, true),
    ];
    let mut hits = 0;
    for _ in 0..tokens {
        let e = &entries[rng.gen_range(0..entries.len())];
        let det = rng.gen_bool(0.3);
        let token = if rng.gen_bool(0.6) {
            oracle::random_realization(&e.surface, rs, det, &mut rng)
        } else {
            let m: Vec<String> = oracle::mutate(&e.surface, 200).into_iter().collect();
            if m.is_empty() {
                continue;
            }
            m[rng.gen_range(0..m.len())].clone()
        };
        let expected = naive[det as usize].lookup(&token);
        let got = fast(&cd, rs, &token, det);
        assert_eq!(got, expected, "seed {seed} token {token} det {det}");
        hits += usize::from(!got.is_empty());
    }
    assert!(hits > tokens / 2, "only {hits} of {tokens} tokens matched");
}

#[test]
fn traversal_equals_linear_scan_default_rules() {
    for seed in 0..4 {
        check_dictionary(seed, 300, &TypoRuleSet::default_rules(), 500);
    }
}

#[test]
fn traversal_equals_linear_scan_other_rule_sets() {
    let rs = TypoRuleSet::default_rules()
        .with(Rule::LunarAssimilation, true)
        .with(Rule::FathaOmission, false);
    check_dictionary(11, 300, &rs, 400);
    check_dictionary(12, 300, &TypoRuleSet::strict(), 400);
    check_dictionary(13, 300, &TypoRuleSet::all_enabled(), 400);
}

#[test]
fn every_realization_is_found() {
    let rs = TypoRuleSet::default_rules();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let raw = gen::entries(&mut rng, 120, 6);
    let (cd, entries) = compiled(&raw, Mode::Semitic);
    for e in &entries {
        let forms = oracle::enumerate_partial(&e.surface, &rs, false, Default::default()).unwrap();
        for t in forms {
            let hits = fast(&cd, &rs, &t, false);
            assert!(hits.iter().any(|(_, x)| x == e), "{t} misses {e}");
        }
    }
}

#[test]
fn strict_rules_mean_exact_lookup() {
    let rs = TypoRuleSet::strict();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let raw = gen::entries(&mut rng, 200, 8);
    let (cd, entries) = compiled(&raw, Mode::Semitic);
    for e in entries.iter().take(100) {
        let got: BTreeSet<_> = fast(&cd, &rs, &e.surface, false)
            .into_iter()
            .map(|(_, x)| x)
            .collect();
        let want: BTreeSet<_> = cd.lookup_exact(&e.surface).into_iter().collect();
        assert_eq!(got, want);
        let (skel, _) = tashkil::alphabet::strip_diacritics(&e.surface);
        if skel != e.surface {
            let exact: BTreeSet<_> = cd.lookup_exact(&skel).into_iter().collect();
            let got: BTreeSet<_> = fast(&cd, &rs, &skel, false)
                .into_iter()
                .map(|(_, x)| x)
                .collect();
            assert_eq!(got, exact);
        }
    }
}

#[test]
fn minimal_automaton_size() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let raw = gen::entries(&mut rng, 500, 8);
        for mode in [Mode::Semitic, Mode::Concat] {
            let (cd, entries) = compiled(&raw, mode);
            assert_eq!(
                cd.madfa.state_count(),
                oracle::reference_minimize(&entries, mode),
                "seed {seed}"
            );
        }
    }
}

#[test]
fn oracle_counts() {
    let rs = TypoRuleSet::default_rules().omission_only();
    let f = |s| oracle::enumerate_partial(s, &rs, false, Default::default()).unwrap();
    assert_eq!(f("kataba").len(), 8);
    assert_eq!(f("ktb"), BTreeSet::from(["ktb".to_string()]));
    assert!(oracle::enumerate_partial(
        "kitaAbFA",
        &TypoRuleSet::default_rules(),
        false,
        Default::default()
    )
    .unwrap()
    .contains("kitAbAF"));
    let wrong = oracle::mutate("takotubu", 10_000);
    let substitutions = wrong.iter().filter(|w| w.chars().count() == 8).count();
    assert!(substitutions >= 81, "{substitutions}");
    assert!(oracle::mutate("ktb", 100).iter().all(|w| w.len() == 4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enabling_a_rule_never_loses_matches(seed in 0u64..1000, rule in 0usize..Rule::ALL.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = gen::entries(&mut rng, 40, 8);
        let (cd, entries) = compiled(&raw, Mode::Semitic);
        let rule = Rule::ALL[rule];
        let weak = TypoRuleSet::default_rules().with(rule, false);
        let strong = weak.with(rule, true);
        let e = &entries[rng.gen_range(0..entries.len())];
        let t = oracle::random_realization(&e.surface, &weak, false, &mut rng);
        let a = fast(&cd, &weak, &t, false);
        let b = fast(&cd, &strong, &t, false);
        prop_assert!(a.is_subset(&b));
    }
}
