//! Text-level wrappers over a compiled pack's morphology and sandhi.

use std::collections::BTreeSet;

use lingcore::grammar::CompiledGrammar;
use lingcore::sandhi::{tokens_from_text, tokens_to_text};
use lingcore::twolevel::MorphemeEntry;

/// Surface forms of a lexical string `stem+affix[+affix..]`. Every stem
/// and affix entry with a matching form is tried; results are unioned.
pub fn morph_synth(g: &CompiledGrammar, lexical: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let Some(m) = g.morphology() else { return out };
    let mut parts = lexical.split('+');
    let stem = parts.next().unwrap_or("");
    let affixes: Vec<String> = parts.map(|a| format!("+{a}")).collect();
    let mut slots: Vec<Vec<&MorphemeEntry>> = vec![g.stems().entries().iter().filter(|e| e.form == stem).collect()];
    for a in &affixes {
        slots.push(m.affixes().iter().filter(|e| &e.form == a).collect());
    }
    let mut combos: Vec<Vec<&MorphemeEntry>> = vec![Vec::new()];
    for slot in &slots {
        combos = combos.iter().flat_map(|c| slot.iter().map(move |e| [c.as_slice(), &[*e]].concat())).collect();
    }
    for c in combos {
        if let Ok(forms) = m.synthesize_word(&c) {
            out.extend(forms);
        }
    }
    out
}

/// Lexical strings of every analysis of `surface`.
pub fn morph_analyze(g: &CompiledGrammar, surface: &str) -> BTreeSet<String> {
    let Some(m) = g.morphology() else { return BTreeSet::new() };
    m.analyze_word(surface, g.stems()).iter().map(|a| a.lexical_form(m, g.stems())).collect()
}

/// Surface of a space-separated token string; `None` without a sandhi file.
pub fn sandhi_render(g: &CompiledGrammar, tokens: &str) -> Option<String> {
    Some(g.sandhi()?.render_surface(&tokens_from_text(tokens)))
}

/// Token strings that render to `surface`.
pub fn sandhi_segment(g: &CompiledGrammar, surface: &str) -> Vec<String> {
    match g.sandhi() {
        Some(s) => s.segment_surface(surface).iter().map(|t| tokens_to_text(t)).collect(),
        None => Vec::new(),
    }
}
