use lingcore::ruletext::read_spelling_file;
use lingcore::sandhi::{tokens_from_text, tokens_to_text, LexToken, Sandhi};
use lingware::pack::{default_pack_dir, read_text};

fn sandhi() -> Sandhi {
    let text = read_text(&default_pack_dir().join("fr/sandhi")).unwrap();
    let file = read_spelling_file(&text).unwrap();
    let vocab = ["le", "la", "les", "je", "de", "à", "ce", "cet", "il", "ils", "un", "#un", "#onze", "est-ce que", "me", "que"];
    Sandhi::new(file, vocab.iter().map(|w| LexToken::word(w))).unwrap()
}

#[test]
fn renders() {
    let s = sandhi();
    for (toks, surf) in [
        ("le homme", "l'homme"),
        ("je ai", "j'ai"),
        ("puis - je avoir", "puis-je avoir"),
        ("ce est", "c'est"),
        ("cet soir", "ce soir"),
        ("cet homme", "cet homme"),
        ("le #onze", "le onze"),
        ("de le vol", "du vol"),
        ("à les", "aux"),
        ("de le homme", "de l'homme"),
        ("va - il", "va-t-il"),
        ("vont - ils", "vont-ils"),
        ("le un", "l'un"),
        ("le #un", "le un"),
        ("Atlanta -- Indianapolis", "Atlanta - Indianapolis"),
        ("est-ce_que il", "est-ce qu'il"),
        ("est-ce_que vous", "est-ce que vous"),
    ] {
        assert_eq!(s.render_surface(&tokens_from_text(toks)), surf, "{}", toks);
    }
}

#[test]
fn segments() {
    let s = sandhi();
    let seg = |t: &str| -> Vec<String> { s.segment_surface(t).iter().map(|x| tokens_to_text(x)).collect() };
    assert_eq!(seg("du vol"), ["de le vol"]);
    assert_eq!(seg("l'homme"), ["la homme", "le homme"]);
    assert_eq!(seg("va-t-il"), ["va - il"]);
    assert!(seg("l'onze").iter().all(|t| !t.contains("#onze")));
    assert_eq!(seg("Atlanta - Indianapolis"), ["Atlanta -- Indianapolis"]);
    // Verb + hyphen + ce also renders this way; the parser decides.
    let q = seg("est-ce qu'il");
    assert!(q.contains(&"est-ce_que il".to_string()));
    for t in &q {
        assert_eq!(s.render_surface(&tokens_from_text(t)), "est-ce qu'il");
    }
    assert!(seg("puis-je avoir").contains(&"puis - je avoir".to_string()));
    assert!(seg("j'ai").contains(&"je ai".to_string()));
}
