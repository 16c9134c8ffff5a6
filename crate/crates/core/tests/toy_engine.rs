//! Parsing and generation over a small topicalization grammar: a fronted
//! object is threaded down to an empty NP.

use lingcore::generator::{generate, roundtrip_check, GenOptions};
use lingcore::grammar::{compile_grammar, CompiledGrammar, PackSources, Source};
use lingcore::parser::{parse, ParseOptions};
use lingcore::sem::SemTerm;

const FEATURES: &str = "\
category S NP VP V
feature sem
feature ssem
feature num: sg pl
feature gap: y n
feature gi
feature go
feature fw
thread gi go: S NP VP
start S[gi=[fw=none], go=[fw=none]]
semantics sem
";

const SYNTAX: &str = "\
rule s: S[sem=?P] --> NP[gap=n, num=?N, sem=?X] VP[num=?N, ssem=?X, sem=?P]
rule top: S[gi=?G, go=?G] -->
    NP[gap=n, sem=?O, gi=?G, go=?G]
    S[gi=[fw=[sem=?O]], go=[fw=none]]
    ; sem: top($2)
rule vp: VP[num=?N, ssem=?S, sem=?P] --> V[num=?N, sem=?P:[a1=?S, a2=?O]] NP[sem=?O]
rule gap: NP[gap=y, sem=?S, gi=[fw=[sem=?S]], go=[fw=none]] -->
";

const LEXICON: &str = "\
lex jean: NP[num=sg, gap=n] ; sem: jean
lex marie: NP[num=sg, gap=n] ; sem: marie
lex elles: NP[num=pl, gap=n] ; sem: elles
lex aime: V[num=sg] ; sem: aimer(?S, ?O)
lex aiment: V[num=pl] ; sem: aimer(?S, ?O)
";

fn grammar() -> CompiledGrammar {
    compile_grammar(&PackSources {
        features: Source { name: "features", text: FEATURES },
        syntax: vec![Source { name: "syntax", text: SYNTAX }],
        lexicon: vec![Source { name: "lexicon", text: LEXICON }],
        morph_rules: None,
        morphotax: None,
        sandhi: None,
    })
    .unwrap()
}

fn sems(g: &CompiledGrammar, s: &str) -> Vec<String> {
    parse(s, g, ParseOptions::default()).unwrap().iter().map(|a| a.sem.to_string()).collect()
}

#[test]
fn fronted_object_fills_the_gap() {
    let g = grammar();
    assert_eq!(sems(&g, "jean aime marie"), ["aimer(jean,marie)"]);
    assert_eq!(sems(&g, "marie jean aime"), ["top(aimer(jean,marie))"]);
    let a = parse("marie jean aime", &g, ParseOptions::default()).unwrap();
    assert_eq!(a[0].tree.gaps().len(), 1);
}

#[test]
fn unfilled_or_doubled_gaps_are_rejected() {
    let g = grammar();
    assert!(sems(&g, "jean aime").is_empty());
    assert!(sems(&g, "marie jean aime marie").is_empty());
    assert!(sems(&g, "marie jean elles aiment").is_empty());
    assert!(sems(&g, "jean aiment marie").is_empty());
}

#[test]
fn generation_inverts_parsing() {
    let g = grammar();
    let gen = |t: &str| generate(&SemTerm::parse(t).unwrap(), &g, GenOptions::default()).unwrap();
    assert_eq!(gen("aimer(jean, marie)"), ["Jean aime marie"]);
    assert_eq!(gen("top(aimer(elles, jean))"), ["Jean elles aiment"]);
    assert!(gen("aimer(jean)").is_empty());
    for s in ["jean aime marie", "marie elles aiment", "elles aiment jean"] {
        assert_eq!(roundtrip_check(s, &g, GenOptions::default()).unwrap(), Some(true), "{s}");
    }
}

#[test]
fn bounds_are_reported() {
    let g = grammar();
    assert!(parse("marie jean aime", &g, ParseOptions { max_edges: 3 }).is_err());
    let opts = GenOptions { max_steps: 2, ..GenOptions::default() };
    assert!(generate(&SemTerm::parse("top(aimer(jean, marie))").unwrap(), &g, opts).is_err());
}
