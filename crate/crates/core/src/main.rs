use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tashkil::alphabet::{from_translit, to_translit};
use tashkil::lookup::{
    count_partial_forms, format_json, format_line, format_restored, tokenize, AggGrammar,
    TokenAnalyses,
};
use tashkil::morphgraph::{generate_dictionary, GrammarError};
use tashkil::{Analyzer, CompiledDictionary, FlatDictionary, GrammarSet, Mode, TypoRuleSet};

/// Environment variable naming the default data directory.
const DATA_ENV: &str = "TASHKIL_DATA";
const RULES_FILE: &str = "Arabic-typo-rules.txt";
/// Lines analyzed together before output is flushed.
const BATCH_LINES: usize = 256;

#[derive(Parser)]
#[command(
    name = "tashkil",
    version,
    about = "Arabic vowel restoration and clitic segmentation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a flat dictionary into the binary format.
    Compile {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Semitic)]
        mode: ModeArg,
        /// Also write the human-readable INF listing here.
        #[arg(long)]
        listing: Option<PathBuf>,
    },
    /// Expand a lemma lexicon into a flat dictionary.
    Generate {
        lexicon: PathBuf,
        /// Grammar file or directory of `.grm` files.
        #[arg(long)]
        grammar: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Flatten a grammar network into a single graph.
    Flatten {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        root: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print every analysis of every token.
    Analyze(TextArgs),
    /// Print the text with restored vowels.
    Restore(TextArgs),
    /// Flag unknown tokens.
    Spellcheck(TextArgs),
    /// Count the partially vowelized spellings a dictionary accepts.
    Count {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Convert between Arabic script and transliteration.
    Translit {
        #[arg(long, value_enum, default_value_t = Encoding::Tbpp)]
        to: Encoding,
        input: Option<PathBuf>,
    },
    /// Measure analysis throughput on a corpus.
    Bench {
        corpus: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Rule file; defaults to the data directory copy or the built-in one.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Compiled dictionary (repeatable).
    #[arg(long = "dict")]
    dicts: Vec<PathBuf>,
    /// Agglutination grammar file or directory.
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Root graph of the agglutination grammar.
    #[arg(long, default_value = "Word")]
    root: String,
    #[arg(long, value_enum, default_value_t = Encoding::Tbpp)]
    encoding: Encoding,
    #[arg(long)]
    no_cache: bool,
    /// Interpret the grammar network instead of flattening it.
    #[arg(long)]
    no_flatten: bool,
    /// Default location of the rule file, `*.bin` dictionaries and `grammars/`.
    #[arg(long, env = DATA_ENV, hide_env_values = true)]
    data_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TextArgs {
    /// Input text; standard input when absent.
    input: Option<PathBuf>,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Lines)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Semitic,
    Concat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Encoding {
    Arabic,
    Tbpp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Lines,
    Json,
}

enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn data<E: std::fmt::Display>(context: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", context.display()))
}

fn io_err(e: io::Error) -> Failure {
    Failure::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tashkil: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Compile {
            input,
            out,
            mode,
            listing,
        } => cmd_compile(&input, &out, mode, listing.as_deref()),
        Cmd::Generate {
            lexicon,
            grammar,
            out,
        } => cmd_generate(&lexicon, &grammar, &out),
        Cmd::Flatten { grammar, root, out } => cmd_flatten(&grammar, &root, &out),
        Cmd::Analyze(t) => cmd_text(t, TextCmd::Analyze),
        Cmd::Restore(t) => cmd_text(t, TextCmd::Restore),
        Cmd::Spellcheck(t) => cmd_text(t, TextCmd::Spellcheck),
        Cmd::Count { cfg } => {
            let an = build_analyzer(&cfg)?;
            let total: u128 = an
                .dictionaries()
                .iter()
                .map(|d| count_partial_forms(d, an.rules()))
                .sum();
            println!("{total}");
            Ok(())
        }
        Cmd::Translit { to, input } => cmd_translit(to, input.as_deref()),
        Cmd::Bench { corpus, cfg } => cmd_bench(&corpus, &cfg),
    }
}

fn cmd_compile(input: &Path, out: &Path, mode: ModeArg, listing: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(input).map_err(data(input))?;
    let flat = FlatDictionary::parse(&text);
    for d in &flat.diagnostics {
        eprintln!("{}: {d}", input.display());
    }
    let mode = match mode {
        ModeArg::Semitic => Mode::Semitic,
        ModeArg::Concat => Mode::Concat,
    };
    let cd = CompiledDictionary::build(&flat, mode);
    cd.madfa
        .check()
        .map_err(|e| Failure::Internal(format!("automaton check failed: {e}")))?;
    cd.serialize(out).map_err(data(out))?;
    if let Some(path) = listing {
        fs::write(path, cd.inf_listing()).map_err(data(path))?;
    }
    println!("{}", cd.stats());
    println!("Flat file (bytes)\t{}", text.len());
    if !flat.diagnostics.is_empty() {
        return Err(Failure::Data(format!(
            "{} malformed line(s) skipped",
            flat.diagnostics.len()
        )));
    }
    Ok(())
}

/// A grammar file, or every `.grm` file of a directory in name order.
fn load_grammar(path: &Path) -> Result<GrammarSet> {
    if !path.is_dir() {
        return GrammarSet::load(path).map_err(data(path));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(data(path))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "grm"))
        .collect();
    files.sort();
    let mut set = GrammarSet::default();
    for f in files {
        let g = GrammarSet::load(&f).map_err(data(&f))?;
        set = set.merge(g).map_err(data(&f))?;
    }
    Ok(set)
}

fn cmd_generate(lexicon: &Path, grammar: &Path, out: &Path) -> Result<()> {
    let gs = load_grammar(grammar)?;
    let text = fs::read_to_string(lexicon).map_err(data(lexicon))?;
    let flat = generate_dictionary(&text, &gs).map_err(data(lexicon))?;
    fs::write(out, flat.render()).map_err(data(out))?;
    let lemmas = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .count();
    println!("{lemmas} lemmas, {} forms", flat.len());
    Ok(())
}

fn cmd_flatten(grammar: &Path, root: &str, out: &Path) -> Result<()> {
    let gs = load_grammar(grammar)?;
    let fst = gs.flatten(root).map_err(|e| match e {
        GrammarError::UnknownGraph(_) => Failure::Usage(e.to_string()),
        e => Failure::Data(e.to_string()),
    })?;
    let text = fst.to_graph(root).to_text();
    fs::write(out, &text).map_err(data(out))?;
    println!(
        "{} states, {} transitions, {} bytes",
        fst.state_count(),
        fst.transition_count(),
        text.len()
    );
    Ok(())
}

fn build_analyzer(cfg: &ConfigArgs) -> Result<Analyzer> {
    let rules = match (&cfg.rules, &cfg.data_dir) {
        (Some(p), _) => TypoRuleSet::load(p).map_err(data(p))?,
        (None, Some(dir)) if dir.join(RULES_FILE).is_file() => {
            let p = dir.join(RULES_FILE);
            TypoRuleSet::load(&p).map_err(data(&p))?
        }
        _ => TypoRuleSet::default_rules(),
    };
    let mut dict_paths = cfg.dicts.clone();
    if dict_paths.is_empty() {
        if let Some(dir) = &cfg.data_dir {
            if let Ok(rd) = fs::read_dir(dir) {
                dict_paths = rd
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "bin"))
                    .collect();
                dict_paths.sort();
            }
        }
    }
    if dict_paths.is_empty() {
        return Err(Failure::Usage(
            "at least one compiled dictionary is required (--dict)".into(),
        ));
    }
    let dicts = dict_paths
        .iter()
        .map(|p| CompiledDictionary::deserialize(p).map_err(data(p)))
        .collect::<Result<Vec<_>>>()?;
    let grammar_path = cfg.grammar.clone().or_else(|| {
        let p = cfg.data_dir.as_ref()?.join("grammars");
        p.is_dir().then_some(p)
    });
    let grammar = match grammar_path {
        None => AggGrammar::None,
        Some(p) => {
            let gs = load_grammar(&p)?;
            let g = if cfg.no_flatten {
                AggGrammar::interpreted(&gs, &cfg.root)
            } else {
                AggGrammar::flat(&gs, &cfg.root)
            };
            g.map_err(data(&p))?
        }
    };
    let an = Analyzer::new(dicts, rules, grammar);
    Ok(if cfg.no_cache { an } else { an.with_cache() })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TextCmd {
    Analyze,
    Restore,
    Spellcheck,
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(io::BufReader::new(fs::File::open(p).map_err(data(p))?)),
        None => Box::new(io::BufReader::new(io::stdin())),
    })
}

fn to_output(s: &str, enc: Encoding) -> String {
    match enc {
        Encoding::Tbpp => s.to_string(),
        Encoding::Arabic => from_translit(s).text,
    }
}

/// Maps the word fields of an analysis set back to Arabic script.
fn localize(r: &TokenAnalyses, enc: Encoding, original: &str) -> TokenAnalyses {
    if enc == Encoding::Tbpp {
        return r.clone();
    }
    let analyses = r
        .analyses
        .iter()
        .map(|a| {
            let mut a = a.clone();
            a.token = original.to_string();
            a.restored = to_output(&a.restored, enc);
            for s in &mut a.segments {
                s.written = to_output(&s.written, enc);
                s.restored = to_output(&s.restored, enc);
                s.lemma = to_output(&s.lemma, enc);
            }
            a
        })
        .collect();
    TokenAnalyses {
        token: original.to_string(),
        analyses: Arc::new(analyses),
    }
}

fn cmd_text(args: TextArgs, which: TextCmd) -> Result<()> {
    let an = build_analyzer(&args.cfg)?;
    let enc = args.cfg.encoding;
    let input = open_input(args.input.as_deref())?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut lines = input.lines();
    let mut token_index = 0usize;
    loop {
        let mut batch = Vec::with_capacity(BATCH_LINES);
        for line in lines.by_ref().take(BATCH_LINES) {
            batch.push(line.map_err(io_err)?);
        }
        if batch.is_empty() {
            break;
        }
        for line in &batch {
            let tbpp = match enc {
                Encoding::Tbpp => line.clone(),
                Encoding::Arabic => to_translit(line).text,
            };
            let tokens = tokenize(&tbpp);
            let results = an.analyze_tokens(&tokens);
            match which {
                TextCmd::Analyze => {
                    for r in &results {
                        let original = to_output(&r.token, enc);
                        let r = localize(r, enc, &original);
                        let s = match args.format {
                            Format::Lines => format_line(&r),
                            Format::Json => format_json(&r),
                        };
                        writeln!(out, "{s}").map_err(io_err)?;
                    }
                }
                TextCmd::Restore => {
                    let words: Vec<String> = results
                        .iter()
                        .map(|r| to_output(&format_restored(r), enc))
                        .collect();
                    writeln!(out, "{}", words.join(" ")).map_err(io_err)?;
                }
                TextCmd::Spellcheck => {
                    for flag in an.spellcheck(&tbpp) {
                        let token = to_output(&flag.token, enc);
                        let index = token_index + flag.index;
                        match args.format {
                            Format::Lines => writeln!(
                                out,
                                "{index}\t{token}\t{}\t{}",
                                flag.kind,
                                flag.suggestions
                                    .iter()
                                    .map(|s| to_output(s, enc))
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            ),
                            Format::Json => writeln!(
                                out,
                                "{}",
                                serde_json::json!({
                                    "index": index,
                                    "token": token,
                                    "kind": flag.kind,
                                    "suggestions": flag.suggestions,
                                })
                            ),
                        }
                        .map_err(io_err)?;
                    }
                }
            }
            token_index += tokens.len();
        }
        out.flush().map_err(io_err)?;
    }
    Ok(())
}

fn cmd_translit(to: Encoding, input: Option<&Path>) -> Result<()> {
    let input = open_input(input)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut passed = 0usize;
    for line in input.lines() {
        let line = line.map_err(io_err)?;
        let conv = match to {
            Encoding::Tbpp => to_translit(&line),
            Encoding::Arabic => from_translit(&line),
        };
        passed += conv
            .passed_through
            .iter()
            .filter(|p| !p.ch.is_whitespace())
            .count();
        writeln!(out, "{}", conv.text).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    if passed > 0 {
        eprintln!("{passed} character(s) passed through unconverted");
    }
    Ok(())
}

fn rate(tokens: usize, secs: f64) -> f64 {
    if tokens == 0 || secs <= 0.0 {
        0.0
    } else {
        tokens as f64 / secs
    }
}

fn cmd_bench(corpus: &Path, cfg: &ConfigArgs) -> Result<()> {
    let text = fs::read_to_string(corpus).map_err(data(corpus))?;
    let text = match cfg.encoding {
        Encoding::Tbpp => text,
        Encoding::Arabic => to_translit(&text).text,
    };
    let tokens = tokenize(&text);
    let time = |an: &Analyzer| {
        let t = Instant::now();
        let r = an.analyze_tokens(&tokens);
        (
            t.elapsed().as_secs_f64(),
            r.iter().filter(|x| x.is_unknown()).count(),
        )
    };
    let plain = build_analyzer(&ConfigArgs {
        no_cache: true,
        ..cfg.clone()
    })?;
    let (t_plain, unknown) = time(&plain);
    let cached = build_analyzer(&ConfigArgs {
        no_cache: false,
        ..cfg.clone()
    })?;
    let (t_cached, _) = time(&cached);
    println!("tokens                {}", tokens.len());
    println!("unknown               {unknown}");
    println!("uncached tok/s        {:.0}", rate(tokens.len(), t_plain));
    println!("cached tok/s          {:.0}", rate(tokens.len(), t_cached));
    let speedup = if t_cached > 0.0 && !tokens.is_empty() {
        t_plain / t_cached
    } else {
        0.0
    };
    println!("cache speedup         {speedup:.2}");
    if cfg.grammar.is_some() || cfg.data_dir.is_some() {
        let other = build_analyzer(&ConfigArgs {
            no_cache: true,
            no_flatten: !cfg.no_flatten,
            ..cfg.clone()
        })?;
        let (t_other, _) = time(&other);
        let (t_flat, t_rtn) = if cfg.no_flatten {
            (t_other, t_plain)
        } else {
            (t_plain, t_other)
        };
        println!("interpreted tok/s     {:.0}", rate(tokens.len(), t_rtn));
        let ratio = if t_flat > 0.0 { t_rtn / t_flat } else { 0.0 };
        println!("flattening speedup    {ratio:.2}");
    }
    Ok(())
}
