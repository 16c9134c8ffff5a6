//! Synthesis and analysis, rendering and segmentation invert each other
//! on the shipped packs.

use std::sync::OnceLock;

use lingcore::grammar::CompiledGrammar;
use lingware::ops::{morph_analyze, morph_synth, sandhi_render, sandhi_segment};
use lingware::pack::{load_french, load_spanish};
use proptest::prelude::*;

fn french() -> &'static CompiledGrammar {
    static G: OnceLock<CompiledGrammar> = OnceLock::new();
    G.get_or_init(|| load_french().unwrap())
}

fn spanish() -> &'static CompiledGrammar {
    static G: OnceLock<CompiledGrammar> = OnceLock::new();
    G.get_or_init(|| load_spanish().unwrap())
}

/// `stem+affix[+affix]` from the pack's own morphemes; most combinations
/// are ill-formed and synthesize nothing.
fn lexical(g: &'static CompiledGrammar) -> impl Strategy<Value = String> {
    let stems: Vec<String> = g.stems().entries().iter().map(|e| e.form.clone()).collect();
    let affixes: Vec<String> = g.morphology().unwrap().affixes().iter().map(|e| e.form.clone()).collect();
    (prop::sample::select(stems), prop::collection::vec(prop::sample::select(affixes), 1..=2))
        .prop_map(|(s, a)| format!("{s}{}", a.concat()))
}

fn morph_inverts(g: &CompiledGrammar, lex: &str) -> Result<(), TestCaseError> {
    for surface in morph_synth(g, lex) {
        prop_assert!(morph_analyze(g, &surface).contains(lex), "{} does not analyze as {}", surface, lex);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn french_words_analyze_back(lex in lexical(french())) {
        morph_inverts(french(), &lex)?;
    }

    #[test]
    fn spanish_words_analyze_back(lex in lexical(spanish())) {
        morph_inverts(spanish(), &lex)?;
    }

    #[test]
    fn french_token_strings_segment_back(
        toks in prop::collection::vec(
            prop::sample::select(vec!["le", "la", "les", "je", "de", "à", "ce", "il", "un", "me", "est-ce_que", "homme", "vol", "ai", "est", "aime", "Marie"]),
            1..=5,
        )
    ) {
        let toks = toks.join(" ");
        let surface = sandhi_render(french(), &toks).unwrap();
        prop_assert!(sandhi_segment(french(), &surface).contains(&toks), "{} -> {}", toks, surface);
    }
}

fn every_word_analyzes_back(g: &CompiledGrammar) -> usize {
    let mut words = 0;
    for s in g.stems().entries() {
        for a in g.morphology().unwrap().affixes() {
            let lex = format!("{}{}", s.form, a.form);
            for surface in morph_synth(g, &lex) {
                assert!(morph_analyze(g, &surface).contains(&lex), "{surface} does not analyze as {lex}");
                words += 1;
            }
        }
    }
    words
}

#[test]
fn french_single_affix_words_analyze_back() {
    assert!(every_word_analyzes_back(french()) > 200);
}

#[test]
fn spanish_single_affix_words_analyze_back() {
    assert!(every_word_analyzes_back(spanish()) > 50);
}
