//! `lingware`: parse, generate, morphology, sandhi and corpus runs.
//!
//! Exit codes: 0 success, 1 empty result or failing corpus line, 2 engine
//! bound hit, 64 usage error, 66 pack could not be loaded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lingcore::generator::{generate, GenError, GenOptions, DEFAULT_MAX_DEPTH, DEFAULT_MAX_STEPS};
use lingcore::grammar::CompiledGrammar;
use lingcore::parser::{parse, ParseOptions, DEFAULT_MAX_EDGES};
use lingcore::sem::SemTerm;
use lingware::corpus::{read_corpus, run_corpus, RunOptions, Status};
use lingware::ops::{morph_analyze, morph_synth, sandhi_render, sandhi_segment};
use lingware::pack::{default_pack_dir, load_pack, nfc, read_text};

const EXIT_EMPTY: u8 = 1;
const EXIT_BOUND: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NO_PACK: u8 = 66;

#[derive(Parser)]
#[command(name = "lingware", version, about = "Reversible French and Spanish grammar engine")]
struct Cli {
    #[command(flatten)]
    bounds: Bounds,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Bounds {
    /// Chart edge cap per parse.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_EDGES)]
    max_edges: usize,
    /// Rule applications on any generation path.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Subgoal expansions per generation call.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
}

impl Bounds {
    fn gen(self) -> GenOptions {
        GenOptions { max_depth: self.max_depth, max_steps: self.max_steps, parse: ParseOptions { max_edges: self.max_edges } }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Lang {
    Fr,
    Es,
}

impl Lang {
    fn dir(self) -> PathBuf {
        default_pack_dir().join(match self {
            Lang::Fr => "fr",
            Lang::Es => "es",
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print every analysis as a bracketed tree and its semantics.
    Parse {
        #[arg(long)]
        lang: Lang,
        text: String,
    },
    /// Print the sentences realizing a semantic term, sorted.
    Generate {
        #[arg(long)]
        lang: Lang,
        term: String,
    },
    /// Word-level morphology.
    Morph {
        #[arg(value_enum)]
        direction: MorphDir,
        lang: Lang,
        input: String,
    },
    /// Inter-word spelling.
    Sandhi {
        #[arg(value_enum)]
        direction: SandhiDir,
        lang: Lang,
        input: String,
    },
    /// Regression corpora.
    Corpus {
        #[command(subcommand)]
        action: CorpusCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MorphDir {
    /// Surface word to lexical strings.
    An,
    /// Lexical string to surface words.
    Synth,
}

#[derive(Clone, Copy, ValueEnum)]
enum SandhiDir {
    /// Tokens to surface text.
    Render,
    /// Surface text to token sequences.
    Segment,
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Check every line; the pack is the corpus file's directory unless
    /// `--lang` is given.
    Run {
        path: PathBuf,
        #[arg(long)]
        lang: Option<Lang>,
        /// Skip regenerating OK sentences.
        #[arg(long)]
        no_roundtrip: bool,
    },
}

fn load(dir: &Path) -> Result<CompiledGrammar, ExitCode> {
    load_pack(dir).map_err(|e| {
        eprintln!("lingware: {}: {e}", dir.display());
        ExitCode::from(EXIT_NO_PACK)
    })
}

fn lines(items: impl IntoIterator<Item = String>) -> ExitCode {
    let mut any = false;
    for s in items {
        println!("{s}");
        any = true;
    }
    if any {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_EMPTY)
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let opts = cli.bounds.gen();
    Ok(match cli.command {
        Command::Parse { lang, text } => {
            let g = load(&lang.dir())?;
            match parse(&nfc(&text), &g, opts.parse) {
                Err(e) => {
                    eprintln!("lingware: {e}");
                    ExitCode::from(EXIT_BOUND)
                }
                Ok(a) => lines(a.iter().map(|x| format!("{}\n  {}", x.tree.bracketed(), x.sem))),
            }
        }
        Command::Generate { lang, term } => {
            let t = SemTerm::parse(&nfc(&term)).map_err(|e| {
                eprintln!("lingware: bad term: {e}");
                ExitCode::from(EXIT_USAGE)
            })?;
            let g = load(&lang.dir())?;
            match generate(&t, &g, opts) {
                Ok(out) => lines(out),
                Err(GenError::StepLimit(n)) => {
                    eprintln!("lingware: generation exceeded {n} steps");
                    ExitCode::from(EXIT_BOUND)
                }
                Err(e) => {
                    eprintln!("lingware: {e}");
                    ExitCode::from(EXIT_BOUND)
                }
            }
        }
        Command::Morph { direction, lang, input } => {
            let g = load(&lang.dir())?;
            let input = nfc(&input);
            lines(match direction {
                MorphDir::An => morph_analyze(&g, &input),
                MorphDir::Synth => morph_synth(&g, &input),
            })
        }
        Command::Sandhi { direction, lang, input } => {
            let g = load(&lang.dir())?;
            let input = nfc(&input);
            match direction {
                SandhiDir::Render => lines(sandhi_render(&g, &input)),
                SandhiDir::Segment => lines(sandhi_segment(&g, &input)),
            }
        }
        Command::Corpus { action: CorpusCmd::Run { path, lang, no_roundtrip } } => {
            let text = read_text(&path).map_err(|e| {
                eprintln!("lingware: {}: {e}", path.display());
                ExitCode::from(EXIT_NO_PACK)
            })?;
            let dir = match lang {
                Some(l) => l.dir(),
                None => path.parent().unwrap_or(Path::new(".")).to_path_buf(),
            };
            let g = load(&dir)?;
            let corpus = read_corpus(&text);
            if corpus.is_empty() {
                eprintln!("lingware: warning: {} has no checks", path.display());
            }
            let report = run_corpus(&corpus, &g, RunOptions { gen: opts, roundtrip: !no_roundtrip });
            for o in &report.outcomes {
                println!("{o}");
            }
            let bound = report.outcomes.iter().filter(|o| o.status == Status::Bound).count();
            let failed = report.outcomes.len() - report.passed() - bound;
            println!("SUMMARY {} passed, {} failed, {} bound", report.passed(), failed, bound);
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_EMPTY)
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    run(cli).unwrap_or_else(|code| code)
}
