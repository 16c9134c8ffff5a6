use std::collections::BTreeSet;

use lingcore::ruletext::{read_category, read_morphotax_file, read_spelling_file};
use lingcore::twolevel::{compile_spelling, MorphemeEntry, Morphology, StemLexicon};
use lingware::pack::{default_pack_dir, read_text};

fn morphology() -> Morphology {
    let dir = default_pack_dir().join("fr");
    let rules = read_spelling_file(&read_text(&dir.join("morph-rules")).unwrap()).unwrap();
    assert!(rules.rules.len() >= 20);
    let spelling = compile_spelling(rules.rules, rules.alphabet).unwrap();
    let tax = read_morphotax_file(&read_text(&dir.join("morphotax")).unwrap()).unwrap();
    Morphology::new(spelling, tax.affixes, tax.productions).unwrap()
}

const STEMS: &[(&str, &str)] = &[
    ("chameau", "N[nclass=anim, spelling_type=eau_elle]"),
    ("peign", "V[conj=indre, spelling_type=gn_nd]"),
    ("pay", "V[conj=er, spelling_type=regular]"),
    ("employ", "V[conj=er, spelling_type=regular]"),
    ("cadet", "A[spelling_type=double]"),
    ("complet", "A[spelling_type=change_e_è]"),
    ("achet", "V[conj=er, spelling_type=change_e_è]"),
    ("affrét", "V[conj=er, spelling_type=change_é_è]"),
    ("appel", "V[conj=er, spelling_type=double]"),
    ("céd", "V[conj=er, spelling_type=change_é_è]"),
    ("aim", "V[conj=er, spelling_type=regular]"),
    ("commenc", "V[conj=er, spelling_type=cer]"),
    ("mang", "V[conj=er, spelling_type=ger]"),
    ("cheval", "N[nclass=plain, spelling_type=al_aux]"),
    ("heureux", "A[spelling_type=eux_euse]"),
    ("actif", "A[spelling_type=f_v]"),
    ("bus", "N[nclass=plain, spelling_type=regular]"),
    ("premier", "A[spelling_type=change_e_è]"),
    ("souvent", "Adv[]"),
];

fn stems() -> StemLexicon {
    StemLexicon::new(
        STEMS
            .iter()
            .map(|(form, cat)| {
                let (category, features) = read_category(cat).unwrap();
                MorphemeEntry { form: form.to_string(), category, features }
            })
            .collect(),
    )
}

/// Synthesize `stem+affix` where the affix is picked by category and form.
fn synth(m: &Morphology, stems: &StemLexicon, lexical: &str, affix_cat: &str) -> BTreeSet<String> {
    let (stem, affix) = lexical.split_once('+').unwrap();
    let s = stems.entries().iter().find(|e| e.form == stem).unwrap();
    let mut out = BTreeSet::new();
    for a in m.affixes().iter().filter(|a| a.form == format!("+{}", affix) && a.category.as_str() == affix_cat) {
        if let Ok(forms) = m.synthesize_word(&[s, a]) {
            out.extend(forms);
        }
    }
    out
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn alternations_both_ways() {
    let m = morphology();
    let stems = stems();
    let cases: &[(&str, &str, &[&str])] = &[
        ("chameau+e", "Aafx", &["chamelle"]),
        ("chameau+s", "Aafx", &["chameaux"]),
        ("peign+rai", "Vafx", &["peindrai"]),
        ("peign+ons", "Vafx", &["peignons"]),
        ("pay+e", "Vafx", &["paye", "paie"]),
        ("pay+ons", "Vafx", &["payons"]),
        ("employ+e", "Vafx", &["emploie"]),
        ("cadet+e", "Aafx", &["cadette"]),
        ("complet+e", "Aafx", &["complète"]),
        ("achet+e", "Vafx", &["achète"]),
        ("achet+erai", "Vafx", &["achèterai"]),
        ("affrét+e", "Vafx", &["affrète"]),
        ("appel+erai", "Vafx", &["appellerai"]),
        ("appel+e", "Vafx", &["appelle"]),
        ("appel+ons", "Vafx", &["appelons"]),
        ("céd+erai", "Vafx", &["céderai"]),
        ("céd+e", "Vafx", &["cède"]),
        ("commenc+ons", "Vafx", &["commençons"]),
        ("mang+ons", "Vafx", &["mangeons"]),
        ("cheval+s", "Nafx", &["chevaux"]),
        ("heureux+e", "Aafx", &["heureuse"]),
        ("heureux+s", "Aafx", &["heureux"]),
        ("actif+e", "Aafx", &["active"]),
        ("bus+s", "Nafx", &["bus"]),
        ("premier+e", "Aafx", &["première"]),
        ("aim+e", "Vafx", &["aime"]),
    ];
    for (lexical, cat, expected) in cases {
        let got = synth(&m, &stems, lexical, cat);
        assert_eq!(got, set(expected), "synthesis of {}", lexical);
        for surface in *expected {
            let found: Vec<String> = m.analyze_word(surface, &stems).iter().map(|a| a.lexical_form(&m, &stems)).collect();
            assert!(found.iter().any(|f| f == lexical), "{} should analyze as {}, got {:?}", surface, lexical, found);
        }
    }
}

#[test]
fn rejected_forms() {
    let m = morphology();
    let stems = stems();
    for bad in ["cèderai", "chameaue", "peignrai", "cadete", "achete", "appelerai", "chevals", "mangons"] {
        assert!(m.analyze_word(bad, &stems).is_empty(), "{} should not analyze", bad);
    }
}

#[test]
fn morphotax_checks() {
    let m = morphology();
    let stems = stems();
    let peign = stems.entries().iter().find(|e| e.form == "peign").unwrap();
    let plus_e = m.affixes().iter().find(|a| a.form == "+e" && a.category.as_str() == "Vafx").unwrap();
    assert!(m.check_morphotax(&[peign, plus_e]).is_none());
    let souvent = stems.entries().iter().find(|e| e.form == "souvent").unwrap();
    let bare = m.check_morphotax(&[souvent]).unwrap();
    assert!(bare.equal_mod_renaming(&souvent.features));
    assert_eq!(m.analyze_word("souvent", &stems).len(), 1);
}
