use std::path::Path;

use lingware::corpus::{read_corpus, read_directive, run_corpus, Directive, Exclude, RunOptions};
use lingware::pack::{load_pack, load_spanish, LoadError};
use tempfile::TempDir;

const FEATURES: &str = "category S NP V\nfeature sem\nfeature num: sg pl\nstart S\nsemantics sem\n";
const SYNTAX: &str = "rule s: S --> NP[num=?N] V[num=?N] ; sem: pred($2, $1)\n";
const LEXICON: &str = "lex jean: NP[num=sg] ; sem: jean\nlex dort: V[num=sg] ; sem: dormir\n";

fn write_pack(dir: &Path, features: &str, syntax: &str, lexicon: &str) {
    std::fs::write(dir.join("features"), features).unwrap();
    std::fs::write(dir.join("syntax"), syntax).unwrap();
    std::fs::write(dir.join("lexicon"), lexicon).unwrap();
}

#[test]
fn minimal_pack_loads_without_optional_files() {
    let dir = TempDir::new().unwrap();
    write_pack(dir.path(), FEATURES, SYNTAX, LEXICON);
    let g = load_pack(dir.path()).unwrap();
    assert!(g.morphology().is_none() && g.sandhi().is_none());
    let report = run_corpus(&read_corpus("OK jean dort\nNO dort jean\n"), &g, RunOptions::default());
    assert!(report.all_passed(), "{:?}", report.outcomes);
}

#[test]
fn undeclared_feature_names_file_and_line() {
    let dir = TempDir::new().unwrap();
    write_pack(dir.path(), FEATURES, "// rules\n\nrule s: S --> NP[colour=red] V\n", LEXICON);
    match load_pack(dir.path()) {
        Err(LoadError::Grammar(e)) => {
            assert_eq!((e.file.as_str(), e.line), ("syntax", 3));
            assert!(e.msg.contains("colour"), "{}", e.msg);
        }
        other => panic!("{:?}", other.map(|_| ())),
    }
}

#[test]
fn missing_required_file_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("features"), FEATURES).unwrap();
    assert!(matches!(load_pack(dir.path()), Err(LoadError::Io { .. })));
}

#[test]
fn empty_corpus_has_no_checks() {
    let lines = read_corpus("// only comments\n\n   \n");
    assert!(lines.is_empty());
    let report = run_corpus(&lines, &load_spanish().unwrap(), RunOptions::default());
    assert!(report.outcomes.is_empty() && report.all_passed());
}

#[test]
fn directives_read() {
    assert_eq!(
        read_directive("OK Aime-t-il Marie ? ||| inv=inverted").unwrap(),
        Directive::Ok { sentence: "Aime-t-il Marie ?".into(), root: Some(("inv".into(), "inverted".into())) }
    );
    match read_directive("GEN ynq(x) ||| A; B ||| *").unwrap() {
        Directive::Gen { include, exclude, .. } => {
            assert_eq!(include, ["A", "B"]);
            assert_eq!(exclude, Exclude::AllOthers);
        }
        d => panic!("{d:?}"),
    }
    assert_eq!(
        read_directive("MORPH céd+erai -> céderai, !cèderai").unwrap(),
        Directive::Morph { lexical: "céd+erai".into(), surfaces: vec!["céderai".into()], rejected: vec!["cèderai".into()] }
    );
    assert!(matches!(read_directive("SANDHI a el => al").unwrap(), Directive::Sandhi { segment: false, .. }));
    assert!(read_directive("EQ only one side").is_err());
    assert!(read_directive("GEN not a term((").is_err());
}

#[test]
fn corpus_lines_keep_file_numbers_and_normalize() {
    // decomposed e + combining acute
    let lines = read_corpus("\n// x\nOK Ce\u{301}de\n");
    assert_eq!(lines[0].number, 3);
    assert_eq!(lines[0].text, "OK Céde");
}
