//! Subcommand implementations. Exit codes: 0 accept/ok, 1 reject/invalid,
//! 2 usage or input error.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mvg_core::derivation::enumerate_mslig;
use mvg_core::normal_forms::{to_etf, to_rinf};
use mvg_core::recognizer::{recognize, RecognizerConfig};
use mvg_core::uvgdl::{
    check_dominance, check_vector_cover, connectivity_lint, enumerate_uvgdl, infer_assignment,
    validate_uvgdl_user, DerivationTree, TreeSpec, UvgdlBounds, VectorAssignment,
};
use mvg_core::mslig::validate_mslig_user;
use mvg_core::{mslig_to_uvgdl, uvgdl_to_mslig, MsligGrammar, SearchBounds, UvgdlGrammar};

use crate::dot::{export_dot_chart, export_dot_tree};
use crate::format::{parse_grammar, serialize_grammar, GrammarFile, ParsedGrammar};
use crate::treefile::parse_tree;

#[derive(Parser)]
#[command(
    name = "mvg",
    version,
    about = "Workbench for multiset index grammars and vector grammars with dominance links"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognize an input string with a chart parser (vector grammars are
    /// converted to an index grammar first).
    Parse {
        #[command(flatten)]
        file: FileArg,
        /// The input string; tokens are split on whitespace by default.
        #[arg(long)]
        input: String,
        /// Token separator instead of whitespace.
        #[arg(long)]
        sep: Option<String>,
        /// Per-symbol chart index cap (default: input length).
        #[arg(long)]
        index_cap: Option<u32>,
        /// Write the chart as a DOT digraph to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Rewrite an index grammar into a normal form.
    Normalize {
        #[command(flatten)]
        file: FileArg,
        /// Restricted index normal form: at most one index moves per step.
        #[arg(long, conflicts_with = "etf")]
        rinf: bool,
        /// Extended two form: at most two right-hand symbols.
        #[arg(long)]
        etf: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert between the formalisms (direction follows %type).
    Convert {
        #[command(flatten)]
        file: FileArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate the bounded language, one string per line.
    Enumerate {
        #[command(flatten)]
        file: FileArg,
        /// Maximum yield length in tokens.
        #[arg(long)]
        max_len: usize,
        /// Derivation step bound (for vector grammars: productions per tree).
        #[arg(long)]
        max_steps: Option<usize>,
        /// Bound on simultaneously pending indices (index grammars only).
        #[arg(long)]
        max_index: Option<usize>,
    },
    /// Check a derivation tree file against a vector grammar.
    Check {
        #[command(flatten)]
        file: FileArg,
        /// The tree file: s-expressions like (v1:q1@1 (v5:q1@1)).
        #[arg(long)]
        tree: PathBuf,
        /// Write the checked tree as a DOT digraph to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Validate a grammar file and report style findings.
    Lint {
        #[command(flatten)]
        file: FileArg,
    },
}

#[derive(Args)]
struct FileArg {
    /// Grammar file, or - for standard input.
    file: String,
}

/// Errors that map to exit code 2.
struct InputError(String);

fn bad(e: impl std::fmt::Display) -> InputError {
    InputError(e.to_string())
}

type Verdict = Result<i32, InputError>;

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Verdict {
    match cli.command {
        Command::Parse {
            file,
            input,
            sep,
            index_cap,
            dot,
        } => cmd_parse(&file, &input, sep.as_deref(), index_cap, dot.as_deref()),
        Command::Normalize {
            file,
            rinf,
            etf,
            output,
        } => cmd_normalize(&file, rinf, etf, output.as_deref()),
        Command::Convert { file, output } => cmd_convert(&file, output.as_deref()),
        Command::Enumerate {
            file,
            max_len,
            max_steps,
            max_index,
        } => cmd_enumerate(&file, max_len, max_steps, max_index),
        Command::Check { file, tree, dot } => cmd_check(&file, &tree, dot.as_deref()),
        Command::Lint { file } => cmd_lint(&file),
    }
}

fn read_input(name: &str) -> Result<String, InputError> {
    if name == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| InputError(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(name).map_err(|e| InputError(format!("{name}: {e}")))
    }
}

fn load(file: &FileArg) -> Result<GrammarFile, InputError> {
    let text = read_input(&file.file)?;
    parse_grammar(&text).map_err(|e| InputError(format!("{}: {e}", file.file)))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), InputError> {
    match path {
        Some(path) => {
            fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn tokens_of(input: &str, sep: Option<&str>) -> Vec<String> {
    match sep {
        Some(sep) => input
            .split(sep)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
        None => input.split_whitespace().map(str::to_string).collect(),
    }
}

fn cmd_parse(
    file: &FileArg,
    input: &str,
    sep: Option<&str>,
    index_cap: Option<u32>,
    dot: Option<&Path>,
) -> Verdict {
    let loaded = load(file)?;
    let g = match loaded.grammar {
        ParsedGrammar::Mslig(g) => g,
        ParsedGrammar::Uvgdl(g) => {
            eprintln!("note: vector grammar converted to an index grammar for recognition");
            uvgdl_to_mslig(&g).map_err(bad)?.grammar
        }
    };
    let tokens = tokens_of(input, sep);
    let cfg = RecognizerConfig {
        index_cap,
        op_budget: None,
    };
    let rec = recognize(&g, &tokens, &cfg).map_err(bad)?;
    if let Some(path) = dot {
        write_output(Some(path), &export_dot_chart(&rec))?;
    }
    eprintln!(
        "{} tokens, {} operations, cap_hit={}",
        tokens.len(),
        rec.ops,
        rec.cap_hit
    );
    if rec.accepted {
        println!("accept");
        Ok(0)
    } else {
        if rec.cap_hit {
            eprintln!("note: the index cap was reached; rerun with a larger --index-cap to confirm");
        }
        println!("reject");
        Ok(1)
    }
}

fn require_mslig(file: GrammarFile, what: &str) -> Result<MsligGrammar, InputError> {
    match file.grammar {
        ParsedGrammar::Mslig(g) => Ok(g),
        ParsedGrammar::Uvgdl(_) => Err(InputError(format!("{what} needs an index grammar"))),
    }
}

fn require_uvgdl(file: GrammarFile, what: &str) -> Result<UvgdlGrammar, InputError> {
    match file.grammar {
        ParsedGrammar::Uvgdl(g) => Ok(g),
        ParsedGrammar::Mslig(_) => Err(InputError(format!("{what} needs a vector grammar"))),
    }
}

fn cmd_normalize(file: &FileArg, rinf: bool, etf: bool, output: Option<&Path>) -> Verdict {
    let g = require_mslig(load(file)?, "normalize")?;
    let (normalized, form) = if rinf {
        (to_rinf(&g), "restricted index normal form")
    } else if etf {
        (to_etf(&g), "extended two form")
    } else {
        return Err(InputError("pass --rinf or --etf".into()));
    };
    let out = GrammarFile {
        comments: vec![format!("{form} of {}", file.file)],
        grammar: ParsedGrammar::Mslig(normalized),
    };
    write_output(output, &serialize_grammar(&out))?;
    Ok(0)
}

fn cmd_convert(file: &FileArg, output: Option<&Path>) -> Verdict {
    let loaded = load(file)?;
    let out = match loaded.grammar {
        ParsedGrammar::Uvgdl(g) => {
            let conv = uvgdl_to_mslig(&g).map_err(bad)?;
            if !conv.lint.is_clean() {
                eprintln!(
                    "warning: disconnected vectors; the conversion may derive more strings"
                );
            }
            let provenance = conv
                .provenance
                .iter()
                .enumerate()
                .map(|(i, src)| format!("p{} from {src}", i + 1))
                .collect::<Vec<_>>()
                .join(", ");
            GrammarFile {
                comments: vec![
                    format!("index grammar of the vector grammar {}", file.file),
                    "one index symbol per dominance link".to_string(),
                    format!("provenance: {provenance}"),
                ],
                grammar: ParsedGrammar::Mslig(conv.grammar),
            }
        }
        ParsedGrammar::Mslig(g) => {
            let conv = mslig_to_uvgdl(&to_rinf(&g)).map_err(bad)?;
            let provenance = conv
                .grammar
                .vectors
                .iter()
                .zip(&conv.provenance)
                .map(|(v, src)| format!("{} from {src:?}", v.name))
                .collect::<Vec<_>>()
                .join(", ");
            GrammarFile {
                comments: vec![
                    format!(
                        "vector grammar of the index grammar {} (via restricted index normal form)",
                        file.file
                    ),
                    format!("provenance: {provenance}"),
                ],
                grammar: ParsedGrammar::Uvgdl(conv.grammar),
            }
        }
    };
    write_output(output, &serialize_grammar(&out))?;
    Ok(0)
}

fn cmd_enumerate(
    file: &FileArg,
    max_len: usize,
    max_steps: Option<usize>,
    max_index: Option<usize>,
) -> Verdict {
    let loaded = load(file)?;
    match loaded.grammar {
        ParsedGrammar::Mslig(g) => {
            let bounds = SearchBounds::new(
                max_len,
                max_steps.unwrap_or(20 * max_len + 10),
                max_index.unwrap_or(4 * max_len + 10),
            );
            let result = enumerate_mslig(&g, &bounds).map_err(bad)?;
            for s in &result.strings {
                println!("{}", s.join(" "));
            }
            eprintln!(
                "{} strings up to {} tokens, exhaustive={}",
                result.strings.len(),
                max_len,
                result.stats.exhausted()
            );
        }
        ParsedGrammar::Uvgdl(g) => {
            if max_index.is_some() {
                eprintln!("note: --max-index has no effect on vector grammars");
            }
            let bounds = UvgdlBounds::new(max_len, max_steps.unwrap_or(4 * max_len + 10));
            let result = enumerate_uvgdl(&g, &bounds).map_err(bad)?;
            for s in &result.strings {
                println!("{}", s.join(" "));
            }
            eprintln!(
                "{} strings up to {} tokens, exhaustive={}",
                result.strings.len(),
                max_len,
                result.stats.exhausted()
            );
        }
    }
    Ok(0)
}

fn cmd_check(file: &FileArg, tree: &Path, dot: Option<&Path>) -> Verdict {
    let g = require_uvgdl(load(file)?, "check")?;
    let text = read_input(&tree.display().to_string())?;
    let spec = parse_tree(&text).map_err(|e| InputError(format!("{}: {e}", tree.display())))?;
    let tree = match DerivationTree::assemble(&g, &spec) {
        Ok(tree) => tree,
        Err(e) => {
            println!("invalid: {e}");
            return Ok(1);
        }
    };
    let asg = match assignment_for(&g, &tree, &spec) {
        Ok(asg) => asg,
        Err(message) => {
            println!("invalid: {message}");
            return Ok(1);
        }
    };
    let cover = check_vector_cover(&g, &tree, &asg);
    let dominance = check_dominance(&g, &tree, &asg);
    let mut failed = false;
    if let mvg_core::uvgdl::CoverVerdict::Invalid(violations) = &cover {
        failed = true;
        for v in violations {
            println!("invalid: {v}");
        }
    }
    if let mvg_core::uvgdl::DominanceVerdict::Invalid(violations) = &dominance {
        failed = true;
        for v in violations {
            println!("invalid: {v}");
        }
    }
    if failed {
        return Ok(1);
    }
    if let Some(path) = dot {
        write_output(Some(path), &export_dot_tree(&g, &tree, &asg))?;
    }
    println!("valid: {}", tree.terminal_yield().join(" "));
    Ok(0)
}

/// Use declared instance ids when the spec carries them everywhere,
/// otherwise search for a grouping.
fn assignment_for(
    g: &UvgdlGrammar,
    tree: &DerivationTree,
    spec: &TreeSpec,
) -> Result<VectorAssignment, String> {
    fn fully_declared(spec: &TreeSpec) -> bool {
        spec.instance.is_some() && spec.children.iter().all(fully_declared)
    }
    if fully_declared(spec) {
        VectorAssignment::from_declared(tree)
    } else {
        infer_assignment(g, tree)
            .ok_or_else(|| "no vector grouping covers the tree".to_string())
    }
}

fn cmd_lint(file: &FileArg) -> Verdict {
    let loaded = load(file)?;
    match &loaded.grammar {
        ParsedGrammar::Mslig(g) => {
            let report = validate_mslig_user(g);
            if !report.is_ok() {
                print!("{report}");
                return Ok(1);
            }
        }
        ParsedGrammar::Uvgdl(g) => {
            let report = validate_uvgdl_user(g);
            if !report.is_ok() {
                print!("{report}");
                return Ok(1);
            }
            let connectivity = connectivity_lint(g);
            if !connectivity.is_clean() {
                for v in &connectivity.disconnected {
                    println!("warning: vector {v} is not connected by its dominance links");
                }
            }
        }
    }
    println!("ok");
    Ok(0)
}
