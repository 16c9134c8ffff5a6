mod common;

use common::{ablated, analyses, french, pack_file};
use lingcore::generator::{generate, roundtrip_check, GenOptions};
use lingcore::grammar::{compile_grammar, PackSources, Source};
use lingcore::sem::SemTerm;

fn sems(s: &str) -> Vec<SemTerm> {
    analyses(french(), s).into_iter().map(|a| a.sem.canonical()).collect()
}

fn gen(term: &str) -> Vec<String> {
    generate(&SemTerm::parse(term).unwrap(), french(), GenOptions::default()).unwrap()
}

#[test]
fn question_constructions_label_the_root() {
    for (s, inv) in [
        ("Aime-t-il Marie ?", "inverted"),
        ("Est-ce que Jean aime Marie ?", "est_ce_que"),
        ("Jean aime-t-il Marie ?", "complex"),
        ("Quel homme aime Marie ?", "uninverted"),
        ("Quelle femme aime-t-il ?", "inverted"),
        ("Quelle femme est-ce que Jean aime ?", "est_ce_que"),
        ("Quelle femme Jean aime-t-il ?", "complex"),
        ("Combien ça coûte ?", "pseudo"),
    ] {
        let a = analyses(french(), s);
        assert!(!a.is_empty(), "{s}");
        let got: Vec<_> = a.iter().map(|x| x.root_value("inv").map(|v| v.as_str().to_string())).collect();
        assert!(got.iter().all(|v| v.as_deref() == Some(inv)), "{s}: {got:?}");
    }
}

#[test]
fn est_ce_que_and_complex_inversion_mean_the_same() {
    for (a, b) in [
        ("Est-ce que Jean aime Marie ?", "Jean aime-t-il Marie ?"),
        ("Quelle femme est-ce que Jean aime ?", "Quelle femme Jean aime-t-il ?"),
    ] {
        let (x, y) = (sems(a), sems(b));
        assert!(!x.is_empty());
        assert_eq!(x.len(), y.len());
        assert!(x.iter().all(|t| y.iter().any(|u| t.equal_mod_renaming(u))), "{a} / {b}");
    }
    assert_eq!(sems("Est-ce que Jean aime Marie ?")[0], SemTerm::parse("ynq(aimer(jean, marie))").unwrap());
}

#[test]
fn blocked_strings_have_no_parse() {
    for s in [
        "Quelle est le premier vol",
        "Quels est le premier vol",
        "Laquelle de ces vols part",
        "Quelle femme Jean aime",
        "Quand est-ce que le prochain vol est",
        "Combien de vols est-ce qu'il y a",
        "Quels vols en partance de Dallas y a-t-il",
        "Combien coûte ça pour aller à Boston",
    ] {
        assert!(sems(s).is_empty(), "{s} parsed as {:?}", sems(s));
    }
}

#[test]
fn clitic_trees_match_golden_bracketings() {
    let a = analyses(french(), "Est-ce que vous le voulez ?");
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].tree.bracketed(), "[est-ce que [vous [[le voulez]_V []_NP]_VP]_S]_S");
    assert_eq!(a[0].tree.gaps().iter().map(|c| c.as_str()).collect::<Vec<_>>(), ["NP"]);

    let a = analyses(french(), "Combien en avez-vous ?");
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].tree.bracketed(), "[combien [[[en avez]_V -]_V [vous [[]_V [[]_NP []_PP]_NP]_VP]_S]_S]_S");
    assert_eq!(a[0].tree.gaps().iter().map(|c| c.as_str()).collect::<Vec<_>>(), ["V", "NP", "PP"]);
    assert_eq!(a[0].sem, SemTerm::parse("whq(X, avoir(pron(vous), part(q(combien, X, quantité), pron(en))))").unwrap());
}

#[test]
fn clitic_rules_are_needed() {
    let g = ablated("fr", &["v_cl", "cl_one", "cl_more"]);
    assert!(common::analyses(&g, "Est-ce que vous le voulez ?").is_empty());
    assert!(!common::analyses(&g, "Est-ce que Jean aime Marie ?").is_empty());
}

#[test]
fn pack_has_several_question_rules() {
    let ids: Vec<&str> = french().rules().iter().map(|r| r.id.as_str()).collect();
    for id in ["s_inv", "s_escq", "s_complex", "s_pseudo", "s_whfront"] {
        assert!(ids.contains(&id), "{id}");
    }
}

#[test]
fn compiled_rules_recompile_to_the_same_rules() {
    let text = french().rules_text();
    let (features, lexicon) = (pack_file("fr", "features"), pack_file("fr", "lexicon"));
    let (rules, tax, sandhi) = (pack_file("fr", "morph-rules"), pack_file("fr", "morphotax"), pack_file("fr", "sandhi"));
    let src = PackSources {
        features: Source { name: "features", text: &features },
        syntax: vec![Source { name: "syntax", text: &text }],
        lexicon: vec![Source { name: "lexicon", text: &lexicon }],
        morph_rules: Some(Source { name: "morph-rules", text: &rules }),
        morphotax: Some(Source { name: "morphotax", text: &tax }),
        sandhi: Some(Source { name: "sandhi", text: &sandhi }),
    };
    let g2 = compile_grammar(&src).unwrap();
    assert_eq!(g2.rules().len(), french().rules().len());
    for (a, b) in french().rules().iter().zip(g2.rules()) {
        assert_eq!(a.id, b.id);
        assert!(a.body.equal_mod_renaming(&b.body), "{}", a.id);
    }
    assert_eq!(g2.rules_text(), text);
}

#[test]
fn yes_no_question_generates_exactly_the_licensed_forms() {
    assert_eq!(gen("ynq(aimer(jean, marie))"), ["Est-ce que Jean aime Marie", "Jean aime-t-il Marie"]);
}

#[test]
fn heavy_np_and_inverted_ca_are_not_generated() {
    let out = gen("whq(X, exist(npmod(q(quels, X, vol), depart(dallas))))");
    assert!(out.contains(&"Quels vols y a-t-il en partance de Dallas".to_string()), "{out:?}");
    assert!(!out.contains(&"Quels vols en partance de Dallas y a-t-il".to_string()));

    let out = gen("whq(X, pour(coûter(pron(ça), q(combien, X, quantité)), aller(pro, boston)))");
    assert!(out.contains(&"Combien ça coûte pour aller à Boston".to_string()), "{out:?}");
    assert!(!out.contains(&"Combien coûte ça pour aller à Boston".to_string()));
}

#[test]
fn clitic_order_is_fixed_in_generation() {
    assert_eq!(gen("imp(donner(pron(vous), pron(les), pron(me)))"), ["Donnez-les-moi"]);
    assert_eq!(gen("decl(donner(pron(vous), pron(les), pron(me)))"), ["Vous me les donnez"]);
}

#[test]
fn sentences_roundtrip() {
    for s in ["Le voulez-vous ?", "Combien de vols y a-t-il ?", "Quel est le premier vol ?", "J'ai un billet."] {
        assert_eq!(roundtrip_check(s, french(), GenOptions::default()).unwrap(), Some(true), "{s}");
    }
    assert_eq!(roundtrip_check("Aime Jean Marie", french(), GenOptions::default()).unwrap(), None);
}
