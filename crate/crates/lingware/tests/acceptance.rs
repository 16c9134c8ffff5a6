//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{analyses, french, pack_file, spanish};
use lingcore::featstruct::FeatureStructure;
use lingcore::generator::{generate, GenOptions};
use lingcore::sem::SemTerm;
use lingware::corpus::{read_corpus, run_corpus, CorpusLine, Directive, Outcome, Report, RunOptions, Status};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Run {
    lines: Vec<CorpusLine>,
    report: Report,
}

impl Run {
    fn new(lang: &str) -> Self {
        let g = if lang == "fr" { french() } else { spanish() };
        let lines = read_corpus(&pack_file(lang, "corpus"));
        let report = run_corpus(&lines, g, RunOptions::default());
        Run { lines, report }
    }

    /// Outcomes of the lines whose directive satisfies `pick`.
    fn select(&self, pick: impl Fn(&Directive) -> bool) -> Vec<&Outcome> {
        self.lines
            .iter()
            .zip(&self.report.outcomes)
            .filter(|(l, _)| l.directive.as_ref().is_ok_and(&pick))
            .map(|(_, o)| o)
            .collect()
    }

    fn named(&self, texts: &[&str]) -> Vec<&Outcome> {
        texts
            .iter()
            .map(|t| {
                self.report.outcomes.iter().find(|o| o.text.contains(t)).unwrap_or_else(|| panic!("corpus lacks {t}"))
            })
            .collect()
    }
}

fn all_pass(outcomes: &[&Outcome], at_least: usize) -> Result<String, String> {
    let bad: Vec<String> = outcomes.iter().filter(|o| o.status != Status::Pass).map(|o| o.to_string()).collect();
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    if outcomes.len() < at_least {
        return Err(format!("only {} checks, need {at_least}", outcomes.len()));
    }
    Ok(format!("{} checks", outcomes.len()))
}

fn criterion_1(fr: &Run) -> Result<String, String> {
    let start = Instant::now();
    let morph: Vec<CorpusLine> = fr.lines.iter().filter(|l| matches!(l.directive, Ok(Directive::Morph { .. }))).cloned().collect();
    let report = run_corpus(&morph, french(), RunOptions::default());
    let took = start.elapsed();
    let outcomes: Vec<&Outcome> = report.outcomes.iter().collect();
    let ok = all_pass(&outcomes, 12)?;
    if took > Duration::from_secs(5) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{ok} in {took:.2?}"))
}

fn criterion_2(fr: &Run) -> Result<String, String> {
    let sandhi = fr.select(|d| matches!(d, Directive::Sandhi { .. }));
    let negatives = fr.named(&["le #onze", "de le homme", "puis - je avoir", "Atlanta -- Indianapolis"]);
    all_pass(&negatives, 4)?;
    all_pass(&sandhi, 12)
}

fn criterion_3(fr: &Run) -> Result<String, String> {
    let labeled = fr.select(|d| matches!(d, Directive::Ok { root: Some((k, _)), .. } if k == "inv"));
    let eq = fr.select(|d| matches!(d, Directive::Eq { .. }));
    all_pass(&eq, 2)?;
    all_pass(&labeled, 8)
}

fn criterion_4(fr: &Run) -> Result<String, String> {
    all_pass(
        &fr.named(&[
            "NO Quelle est le premier vol",
            "NO Quels est le premier vol",
            "NO Laquelle de ces vols part",
            "NO Quelle femme Jean aime",
            "NO Quand est-ce que le prochain vol est",
            "NO Combien de vols est-ce qu'il y a",
            "NO Quels vols en partance de Dallas y a-t-il",
            "NO Combien coûte ça",
        ]),
        8,
    )
}

fn criterion_5() -> Result<String, String> {
    for (s, tree, gaps) in [
        ("Est-ce que vous le voulez ?", "[est-ce que [vous [[le voulez]_V []_NP]_VP]_S]_S", vec!["NP"]),
        (
            "Combien en avez-vous ?",
            "[combien [[[en avez]_V -]_V [vous [[]_V [[]_NP []_PP]_NP]_VP]_S]_S]_S",
            vec!["V", "NP", "PP"],
        ),
    ] {
        let a = analyses(french(), s);
        if a.len() != 1 {
            return Err(format!("{s}: {} analyses", a.len()));
        }
        let found = a[0].tree.gaps();
        let got_gaps: Vec<&str> = found.iter().map(|c| c.as_str()).collect();
        if a[0].tree.bracketed() != tree || got_gaps != gaps {
            return Err(format!("{s}: {} gaps {got_gaps:?}", a[0].tree.bracketed()));
        }
    }
    Ok("2 golden trees".into())
}

fn criterion_6(fr: &Run, es: &Run) -> Result<String, String> {
    let out = generate(&SemTerm::parse("ynq(aimer(jean, marie))").unwrap(), french(), GenOptions::default()).map_err(|e| e.to_string())?;
    if out != ["Est-ce que Jean aime Marie", "Jean aime-t-il Marie"] {
        return Err(format!("ynq generated {out:?}"));
    }
    all_pass(&fr.named(&["GEN whq(X, exist(", "GEN whq(X, pour(coûter"]), 2)?;
    let mut ok = fr.select(|d| matches!(d, Directive::Ok { .. }));
    ok.extend(es.select(|d| matches!(d, Directive::Ok { .. })));
    all_pass(&ok, 30).map(|n| format!("{n}, each regenerated"))
}

fn criterion_7(es: &Run) -> Result<String, String> {
    all_pass(
        &es.named(&[
            "OK Deseo un billete",
            "OK Enséñeme los vuelos que sirva una comida",
            "NO Enséñeme los vuelos que sirve una comida",
            "OK Cuál es el primer vuelo que sirve una comida",
            "MORPH enseñ+e+me",
        ]),
        5,
    )?;
    let sem = analyses(spanish(), "Deseo un billete.").first().map(|a| a.sem.to_string()).unwrap_or_default();
    if !sem.contains("desear(pron(yo)") {
        return Err(format!("prodrop subject missing: {sem}"));
    }
    let m = spanish().morphology().unwrap();
    let words = m.analyze_word("enséñeme", spanish().stems());
    if words.len() != 1 || words[0].production != "verb_cl" {
        return Err("Enséñeme is not one verb_cl word".into());
    }
    all_pass(&es.report.outcomes.iter().collect::<Vec<_>>(), 30)
}

fn value() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["x", "y", "z", "{x, y}", "{y, z}", "?A", "?B", "?A:x", "[]"]).prop_map(String::from);
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop::collection::btree_map(prop::sample::select(vec!["a", "b", "c", "d"]), inner, 1..=3).prop_map(|m| {
            format!("[{}]", m.into_iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", "))
        })
    })
}

fn fs() -> impl Strategy<Value = FeatureStructure> {
    prop::collection::btree_map(prop::sample::select(vec!["a", "b", "c", "d"]), value(), 0..=4).prop_filter_map(
        "inconsistent variable use",
        |m| FeatureStructure::read(&format!("[{}]", m.into_iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", "))).ok(),
    )
}

fn same(a: &Option<FeatureStructure>, b: &Option<FeatureStructure>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.equal_mod_renaming(y),
        _ => false,
    }
}

fn criterion_8() -> Result<String, String> {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner
        .run(&(fs(), fs(), fs()), |(a, b, c)| {
            let ab = a.unify(&b);
            prop_assert!(same(&ab, &b.unify(&a)), "commutativity");
            let left = ab.as_ref().and_then(|x| x.unify(&c));
            let right = b.unify(&c).and_then(|x| a.unify(&x));
            prop_assert!(same(&left, &right), "associativity");
            prop_assert!(a.unify(&a).is_some_and(|x| x.equal_mod_renaming(&a)), "idempotence");
            if let Some(u) = &ab {
                prop_assert!(a.subsumes(u) && b.subsumes(u), "subsumption");
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 cases, 4 laws each".into())
}

fn criterion_9(fr: &Run, es: &Run, took: Duration) -> Result<String, String> {
    let bound: Vec<String> =
        fr.report.outcomes.iter().chain(&es.report.outcomes).filter(|o| o.status == Status::Bound).map(|o| o.to_string()).collect();
    if !bound.is_empty() {
        return Err(bound.join("; "));
    }
    if !(fr.report.all_passed() && es.report.all_passed()) {
        return Err("a corpus line fails".into());
    }
    if took > Duration::from_secs(60) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{} lines in {took:.2?}", fr.report.outcomes.len() + es.report.outcomes.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (fr, es) = (Run::new("fr"), Run::new("es"));
    let took = start.elapsed();
    let results = [
        ("morphology alternations", criterion_1(&fr)),
        ("sandhi judgments", criterion_2(&fr)),
        ("French question parsing", criterion_3(&fr)),
        ("French rejections", criterion_4(&fr)),
        ("clitic gap inventories", criterion_5()),
        ("generation and roundtrip", criterion_6(&fr, &es)),
        ("Spanish", criterion_7(&es)),
        ("unification laws", criterion_8()),
        ("whole suite within bounds", criterion_9(&fr, &es, took)),
    ];
    let mut failed = false;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(info) => println!("criterion {}: PASS {name} ({info})", i + 1),
            Err(e) => {
                failed = true;
                println!("criterion {}: FAIL {name}: {e}", i + 1);
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
