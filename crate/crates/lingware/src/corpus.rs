//! Corpus regression files and their runner.
//!
//! One directive per line; `//` starts a comment. Fields are separated by
//! `|||`, alternatives inside a field by `;`.
//!
//! ```text
//! OK <sentence> [||| feat=value]       parses; root carries the value
//! NO <sentence>                        no analysis
//! EQ <s1> ||| <s2>                     same semantics set, both nonempty
//! GEN <term> ||| <incl> ||| <excl>     generation includes / excludes;
//!                                      excl `*` means nothing else
//! MORPH <lex> -> <surf>[, !<surf>]     synthesis gives exactly the
//!                                      surfaces; each analyzes back; a
//!                                      `!` surface must not analyze to lex
//! SANDHI <tokens> -> <surface>         renders, and segments back
//! SANDHI <tokens> => <surface>         renders only
//! ```

use std::collections::BTreeSet;
use std::fmt;

use lingcore::generator::{generate, roundtrip_check, GenError, GenOptions};
use lingcore::grammar::CompiledGrammar;
use lingcore::parser::{parse, Analysis, ParseError};
use lingcore::sem::SemTerm;
use rayon::prelude::*;

use crate::ops::{morph_analyze, morph_synth, sandhi_render, sandhi_segment};
use crate::pack::nfc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Directive {
    Ok { sentence: String, root: Option<(String, String)> },
    No { sentence: String },
    Eq { left: String, right: String },
    Gen { term: SemTerm, include: Vec<String>, exclude: Exclude },
    Morph { lexical: String, surfaces: Vec<String>, rejected: Vec<String> },
    Sandhi { tokens: String, surface: String, segment: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exclude {
    Listed(Vec<String>),
    AllOthers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusLine {
    pub number: usize,
    pub text: String,
    pub directive: Result<Directive, String>,
}

fn alternatives(field: &str) -> Vec<String> {
    field.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn fields(rest: &str) -> Vec<&str> {
    rest.split("|||").map(str::trim).collect()
}

pub fn read_directive(line: &str) -> Result<Directive, String> {
    let (key, rest) = line.split_once(char::is_whitespace).ok_or("directive without argument")?;
    let rest = rest.trim();
    let f = fields(rest);
    match key {
        "OK" => {
            let root = match f.as_slice() {
                [_] => None,
                [_, kv] => {
                    let (k, v) = kv.split_once('=').ok_or("root check must be feat=value")?;
                    Some((k.trim().to_string(), v.trim().to_string()))
                }
                _ => return Err("OK takes a sentence and an optional feat=value".into()),
            };
            Ok(Directive::Ok { sentence: f[0].to_string(), root })
        }
        "NO" if f.len() == 1 => Ok(Directive::No { sentence: rest.to_string() }),
        "EQ" => match f.as_slice() {
            [l, r] => Ok(Directive::Eq { left: l.to_string(), right: r.to_string() }),
            _ => Err("EQ takes two sentences".into()),
        },
        "GEN" => {
            let (t, incl, excl) = match f.as_slice() {
                [t] => (*t, "", ""),
                [t, i] => (*t, *i, ""),
                [t, i, e] => (*t, *i, *e),
                _ => return Err("GEN takes a term and up to two string lists".into()),
            };
            let term = SemTerm::parse(t).map_err(|e| format!("bad term: {e}"))?;
            let exclude = if excl == "*" { Exclude::AllOthers } else { Exclude::Listed(alternatives(excl)) };
            Ok(Directive::Gen { term, include: alternatives(incl), exclude })
        }
        "MORPH" => {
            let (lexical, surf) = rest.split_once("->").ok_or("MORPH needs `->`")?;
            let (mut surfaces, mut rejected) = (Vec::new(), Vec::new());
            for s in surf.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match s.strip_prefix('!') {
                    Some(r) => rejected.push(r.trim().to_string()),
                    None => surfaces.push(s.to_string()),
                }
            }
            Ok(Directive::Morph { lexical: lexical.trim().to_string(), surfaces, rejected })
        }
        "SANDHI" => {
            let (split, segment) = if rest.contains("->") { ("->", true) } else { ("=>", false) };
            let (tokens, surface) = rest.split_once(split).ok_or("SANDHI needs `->` or `=>`")?;
            Ok(Directive::Sandhi { tokens: tokens.trim().to_string(), surface: surface.trim().to_string(), segment })
        }
        _ => Err(format!("unknown or malformed directive `{key}`")),
    }
}

pub fn read_corpus(text: &str) -> Vec<CorpusLine> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line = nfc(line);
        out.push(CorpusLine { number: i + 1, directive: read_directive(&line), text: line });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// An engine bound was hit.
    Bound,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Bound => "BOUND",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub number: usize,
    pub text: String,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.status, self.number, self.text)?;
        if !self.detail.is_empty() {
            write!(f, " [{}]", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub gen: GenOptions,
    /// OK lines must also be regenerated from their own semantics.
    pub roundtrip: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { gen: GenOptions::default(), roundtrip: true }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.status == Status::Pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.outcomes.len()
    }
}

enum Failure {
    Check(String),
    Bound(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Bound(e.to_string())
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Failure::Bound(e.to_string())
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Check(msg.into()))
}

fn sems(a: &[Analysis]) -> Vec<SemTerm> {
    a.iter().map(|x| x.sem.canonical()).collect()
}

fn same_set(a: &[SemTerm], b: &[SemTerm]) -> bool {
    a.iter().all(|x| b.iter().any(|y| x.equal_mod_renaming(y))) && b.iter().all(|y| a.iter().any(|x| x.equal_mod_renaming(y)))
}

fn check(d: &Directive, g: &CompiledGrammar, opts: RunOptions) -> Result<String, Failure> {
    let popts = opts.gen.parse;
    match d {
        Directive::Ok { sentence, root } => {
            let a = parse(sentence, g, popts)?;
            if a.is_empty() {
                return fail("no analysis");
            }
            if let Some((k, v)) = root {
                if !a.iter().any(|x| x.root_value(k).is_some_and(|got| got.as_str() == v)) {
                    let got: Vec<String> = a.iter().map(|x| format!("{:?}", x.root_value(k).map(|s| s.as_str().to_string()))).collect();
                    return fail(format!("{k} is {}", got.join(", ")));
                }
            }
            if opts.roundtrip && roundtrip_check(sentence, g, opts.gen)? != Some(true) {
                return fail("not regenerated from its semantics");
            }
            Ok(format!("{} analyses", a.len()))
        }
        Directive::No { sentence } => {
            let a = parse(sentence, g, popts)?;
            match a.first() {
                None => Ok(String::new()),
                Some(x) => fail(format!("parsed as {}", x.sem)),
            }
        }
        Directive::Eq { left, right } => {
            let l = sems(&parse(left, g, popts)?);
            let r = sems(&parse(right, g, popts)?);
            if l.is_empty() || r.is_empty() {
                return fail("a side has no analysis");
            }
            if !same_set(&l, &r) {
                return fail("semantics differ");
            }
            Ok(format!("{} readings", l.len()))
        }
        Directive::Gen { term, include, exclude } => {
            let out: BTreeSet<String> = generate(term, g, opts.gen)?.into_iter().collect();
            let missing: Vec<&String> = include.iter().filter(|s| !out.contains(*s)).collect();
            if !missing.is_empty() {
                return fail(format!("missing {missing:?}; got {out:?}"));
            }
            let extra: Vec<&String> = match exclude {
                Exclude::Listed(x) => x.iter().filter(|s| out.contains(*s)).collect(),
                Exclude::AllOthers => out.iter().filter(|s| !include.contains(s)).collect(),
            };
            if !extra.is_empty() {
                return fail(format!("unwanted {extra:?}"));
            }
            Ok(format!("{} strings", out.len()))
        }
        Directive::Morph { lexical, surfaces, rejected } => {
            let got = morph_synth(g, lexical);
            let want: BTreeSet<String> = surfaces.iter().cloned().collect();
            if got != want {
                return fail(format!("synthesized {got:?}"));
            }
            for s in surfaces {
                if !morph_analyze(g, s).contains(lexical) {
                    return fail(format!("{s} does not analyze as {lexical}"));
                }
            }
            for s in rejected {
                if morph_analyze(g, s).contains(lexical) {
                    return fail(format!("{s} analyzes as {lexical}"));
                }
            }
            Ok(String::new())
        }
        Directive::Sandhi { tokens, surface, segment } => {
            let Some(r) = sandhi_render(g, tokens) else { return fail("pack has no sandhi file") };
            if &r != surface {
                return fail(format!("rendered {r:?}"));
            }
            if *segment {
                let segs = sandhi_segment(g, surface);
                if !segs.contains(tokens) {
                    return fail(format!("segmented {segs:?}"));
                }
            }
            Ok(String::new())
        }
    }
}

/// Run every line, in parallel; outcomes come back in file order.
pub fn run_corpus(lines: &[CorpusLine], g: &CompiledGrammar, opts: RunOptions) -> Report {
    let outcomes = lines
        .par_iter()
        .map(|l| {
            let (status, detail) = match &l.directive {
                Err(e) => (Status::Fail, format!("malformed: {e}")),
                Ok(d) => match check(d, g, opts) {
                    Ok(info) => (Status::Pass, info),
                    Err(Failure::Check(m)) => (Status::Fail, m),
                    Err(Failure::Bound(m)) => (Status::Bound, m),
                },
            };
            Outcome { number: l.number, text: l.text.clone(), status, detail }
        })
        .collect();
    Report { outcomes }
}
