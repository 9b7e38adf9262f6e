//! The grammar file format: UTF-8, line-oriented, `#` comments.
//!
//! A file opens with an optional comment block and two or three directives:
//! `%type mslig|uvgdl`, `%start <NT>`, and for index grammars an optional
//! `%index <sym>...` inventory. Nonterminals and terminals are inferred from
//! the productions: quoted names are terminals, bare names nonterminals.
//! Index symbols must be declared so that a typo inside a bracket is an
//! error rather than a fresh symbol.
//!
//! Index grammar body, one production per line:
//!
//! ```text
//! T[f] -> 'a' T 'b'
//! T ->
//! ```
//!
//! Vector grammar body, one block per vector:
//!
//! ```text
//! vector v2 {
//!   q1: VP -> NP_nom VP
//!   q4: VP -> 'verspricht'
//!   dom: q1.2 > q4
//! }
//! ```
//!
//! `dom: src.pos > tgt` declares a dominance link from the `pos`-th
//! right-hand symbol (1-based) of production `src` to production `tgt`.
//! Entries may also be separated by `;` on one line.
//!
//! A `#` opens a comment only at the start of a line or after whitespace;
//! generated index names such as `l_{1,2,3}#2` pass through untouched.
//! Serialization is canonical: sorted `%index` line, definition order
//! everywhere else, bracket multisets expanded and sorted. Parsing a
//! serialized grammar reproduces it exactly.


use mvg_core::mslig::ValidationReport;
use mvg_core::multiset::IndexMultiset;
use mvg_core::uvgdl::{DominanceLink, UvgdlProduction, Vector, VectorSymbol};
use mvg_core::{validate_mslig, validate_uvgdl, Item, MsligGrammar, MsligProduction, UvgdlGrammar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("grammar does not validate:\n{0}")]
    Invalid(ValidationReport),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// A parsed grammar of either formalism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedGrammar {
    Mslig(MsligGrammar),
    Uvgdl(UvgdlGrammar),
}

impl ParsedGrammar {
    pub fn type_name(&self) -> &'static str {
        match self {
            ParsedGrammar::Mslig(_) => "mslig",
            ParsedGrammar::Uvgdl(_) => "uvgdl",
        }
    }
}

/// A grammar file: the leading comment block plus the grammar itself.
/// Comments elsewhere in the file are dropped on parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarFile {
    pub comments: Vec<String>,
    pub grammar: ParsedGrammar,
}

impl GrammarFile {
    pub fn plain(grammar: ParsedGrammar) -> Self {
        GrammarFile {
            comments: Vec::new(),
            grammar,
        }
    }
}

/// Strip a trailing comment. `#` counts only at the start of the line or
/// after whitespace, and never inside single quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '#' if !quoted && prev_ws => return &line[..i],
            _ => {}
        }
        prev_ws = c.is_whitespace();
    }
    line
}

/// One token of a production line.
#[derive(Debug, PartialEq)]
enum Token {
    Bare(String),
    Quoted(String),
}

/// Split a line into quoted and bare tokens, tracking 1-based columns.
fn tokenize(line_no: usize, line: &str) -> Result<Vec<(usize, Token)>, FormatError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let col_of = |byte: usize| line[..byte].chars().count() + 1;
    let mut i = 0;
    while i < chars.len() {
        let (byte, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = col_of(byte);
        if c == '\'' {
            let start = byte + c.len_utf8();
            let mut end = None;
            i += 1;
            while i < chars.len() {
                if chars[i].1 == '\'' {
                    end = Some(chars[i].0);
                    i += 1;
                    break;
                }
                i += 1;
            }
            let Some(end) = end else {
                return Err(syntax(line_no, col, "unterminated quoted terminal"));
            };
            out.push((col, Token::Quoted(line[start..end].to_string())));
        } else {
            let start = byte;
            let mut end = line.len();
            while i < chars.len() {
                if chars[i].1.is_whitespace() {
                    end = chars[i].0;
                    break;
                }
                i += 1;
            }
            out.push((col, Token::Bare(line[start..end].to_string())));
        }
    }
    Ok(out)
}

/// Split `name[a,b,...]` into the name and its bracket multiset. Commas
/// split only at brace depth zero, so `l_{1,2,3}` stays whole.
fn split_brackets(
    line_no: usize,
    col: usize,
    token: &str,
    declared: Option<&[String]>,
) -> Result<(String, IndexMultiset), FormatError> {
    let Some(open) = token.find('[') else {
        if token.is_empty() {
            return Err(syntax(line_no, col, "empty name"));
        }
        return Ok((token.to_string(), IndexMultiset::empty()));
    };
    let name = &token[..open];
    if name.is_empty() {
        return Err(syntax(line_no, col, "empty name before ["));
    }
    let Some(rest) = token[open + 1..].strip_suffix(']') else {
        return Err(syntax(line_no, col, format!("missing ] in {token}")));
    };
    let mut symbols = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in rest.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth = depth.checked_sub(1).ok_or_else(|| {
                    syntax(line_no, col, format!("unbalanced braces in {token}"))
                })?;
            }
            ',' if depth == 0 => {
                symbols.push(&rest[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    symbols.push(&rest[start..]);
    if symbols == [""] {
        symbols.clear(); // `[]` is the empty multiset
    }
    for sym in &symbols {
        if sym.is_empty() {
            return Err(syntax(line_no, col, format!("empty index name in {token}")));
        }
        if let Some(declared) = declared {
            if !declared.iter().any(|d| d == sym) {
                return Err(syntax(
                    line_no,
                    col,
                    format!("undeclared index symbol {sym}"),
                ));
            }
        }
    }
    Ok((name.to_string(), IndexMultiset::from_symbols(symbols)))
}

/// Parse a grammar file of either formalism.
pub fn parse_grammar(text: &str) -> Result<GrammarFile, FormatError> {
    let mut comments = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, raw)) = lines.peek() {
        let Some(stripped) = raw.strip_prefix('#') else {
            break;
        };
        comments.push(stripped.strip_prefix(' ').unwrap_or(stripped).to_string());
        lines.next();
    }

    let mut kind: Option<(usize, String)> = None;
    let mut start: Option<String> = None;
    let mut indices: Option<(usize, Vec<String>)> = None;
    let mut body: Vec<(usize, String)> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim_end();
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('%') {
            if !body.is_empty() {
                return Err(syntax(line_no, 1, "directive after grammar body"));
            }
            let mut parts = rest.split_whitespace();
            match parts.next() {
                Some("type") => {
                    let value = parts.next().unwrap_or("");
                    if !matches!(value, "mslig" | "uvgdl") {
                        return Err(syntax(line_no, 1, "expected %type mslig or %type uvgdl"));
                    }
                    if kind.is_some() {
                        return Err(syntax(line_no, 1, "duplicate %type directive"));
                    }
                    kind = Some((line_no, value.to_string()));
                }
                Some("start") => {
                    let Some(value) = parts.next() else {
                        return Err(syntax(line_no, 1, "%start needs a nonterminal"));
                    };
                    if start.is_some() {
                        return Err(syntax(line_no, 1, "duplicate %start directive"));
                    }
                    start = Some(value.to_string());
                }
                Some("index") => {
                    if indices.is_some() {
                        return Err(syntax(line_no, 1, "duplicate %index directive"));
                    }
                    indices = Some((line_no, parts.map(str::to_string).collect()));
                }
                other => {
                    return Err(syntax(
                        line_no,
                        1,
                        format!("unknown directive %{}", other.unwrap_or("")),
                    ));
                }
            }
        } else {
            body.push((line_no, line.to_string()));
        }
    }

    let Some((type_line, kind)) = kind else {
        return Err(syntax(1, 1, "missing %type directive"));
    };
    let Some(start) = start else {
        return Err(syntax(type_line, 1, "missing %start directive"));
    };
    let grammar = match kind.as_str() {
        "mslig" => {
            let declared = indices.map(|(_, names)| names).unwrap_or_default();
            ParsedGrammar::Mslig(parse_mslig_body(&body, start, declared)?)
        }
        _ => {
            if let Some((line, _)) = indices {
                return Err(syntax(line, 1, "%index applies only to %type mslig"));
            }
            ParsedGrammar::Uvgdl(parse_uvgdl_body(&body, start)?)
        }
    };
    Ok(GrammarFile { comments, grammar })
}

fn parse_mslig_body(
    body: &[(usize, String)],
    start: String,
    declared: Vec<String>,
) -> Result<MsligGrammar, FormatError> {
    let mut nonterminals = vec![start.clone()];
    let mut terminals = Vec::new();
    let mut productions = Vec::new();
    for (line_no, line) in body {
        let tokens = tokenize(*line_no, line)?;
        let arrow = tokens
            .iter()
            .position(|(_, t)| matches!(t, Token::Bare(b) if b == "->"))
            .ok_or_else(|| syntax(*line_no, 1, "expected LHS -> ..."))?;
        if arrow != 1 {
            return Err(syntax(
                *line_no,
                1,
                "expected a single nonterminal before ->",
            ));
        }
        let (col, Token::Bare(lhs_token)) = &tokens[0] else {
            return Err(syntax(*line_no, tokens[0].0, "quoted left-hand side"));
        };
        let (lhs, lhs_indices) = split_brackets(*line_no, *col, lhs_token, Some(&declared))?;
        nonterminals.push(lhs.clone());
        let mut rhs = Vec::new();
        for (col, token) in &tokens[arrow + 1..] {
            match token {
                Token::Quoted(t) => {
                    terminals.push(t.clone());
                    rhs.push(Item::terminal(t.clone()));
                }
                Token::Bare(b) => {
                    let (name, m) = split_brackets(*line_no, *col, b, Some(&declared))?;
                    nonterminals.push(name.clone());
                    rhs.push(Item::nonterminal(name, m));
                }
            }
        }
        productions.push(MsligProduction::new(lhs, lhs_indices, rhs));
    }
    let g = MsligGrammar::new(nonterminals, terminals, declared, productions, start);
    let report = validate_mslig(&g);
    if !report.is_ok() {
        return Err(FormatError::Invalid(report));
    }
    Ok(g)
}

fn parse_uvgdl_body(body: &[(usize, String)], start: String) -> Result<UvgdlGrammar, FormatError> {
    let mut nonterminals = vec![start.clone()];
    let mut terminals = Vec::new();
    let mut vectors = Vec::new();
    let mut current: Option<(String, Vec<UvgdlProduction>, Vec<DominanceLink>)> = None;
    for (line_no, line) in body {
        let trimmed = line.trim();
        if current.is_none() {
            let Some(rest) = trimmed.strip_prefix("vector ") else {
                return Err(syntax(*line_no, 1, "expected vector <name> {"));
            };
            let Some(name) = rest.strip_suffix('{').map(str::trim) else {
                return Err(syntax(*line_no, 1, "expected { at end of vector line"));
            };
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(syntax(*line_no, 1, "vector name must be a single word"));
            }
            current = Some((name.to_string(), Vec::new(), Vec::new()));
            continue;
        }
        if trimmed == "}" {
            let (name, productions, links) = current.take().expect("checked above");
            vectors.push(Vector::new(name, productions, links));
            continue;
        }
        let (_, productions, links) = current.as_mut().expect("checked above");
        for segment in split_segments(trimmed) {
            let segment = segment.trim();
            if segment.is_empty() {
                continue;
            }
            let Some(colon) = segment.find(':') else {
                return Err(syntax(*line_no, 1, "expected label: LHS -> ... or dom: ..."));
            };
            let label = segment[..colon].trim();
            let rest = segment[colon + 1..].trim();
            if label == "dom" {
                links.push(parse_dom(*line_no, rest)?);
                continue;
            }
            let tokens = tokenize(*line_no, rest)?;
            if tokens.len() < 2 || tokens[1].1 != Token::Bare("->".to_string()) {
                return Err(syntax(*line_no, 1, "expected LHS -> ... after label"));
            }
            let Token::Bare(lhs) = &tokens[0].1 else {
                return Err(syntax(*line_no, tokens[0].0, "quoted left-hand side"));
            };
            nonterminals.push(lhs.clone());
            let mut rhs = Vec::new();
            for (_, token) in &tokens[2..] {
                match token {
                    Token::Quoted(t) => {
                        terminals.push(t.clone());
                        rhs.push(VectorSymbol::terminal(t.clone()));
                    }
                    Token::Bare(b) => {
                        nonterminals.push(b.clone());
                        rhs.push(VectorSymbol::nonterminal(b.clone()));
                    }
                }
            }
            productions.push(UvgdlProduction::new(label, lhs.clone(), rhs));
        }
    }
    if current.is_some() {
        return Err(syntax(
            body.last().map(|(n, _)| *n).unwrap_or(1),
            1,
            "unterminated vector block",
        ));
    }
    let g = UvgdlGrammar::new(nonterminals, terminals, vectors, start);
    let report = validate_uvgdl(&g);
    if !report.is_ok() {
        return Err(FormatError::Invalid(report));
    }
    Ok(g)
}

/// Split vector-block entries on `;` outside quotes.
fn split_segments(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut quoted = false;
    let mut start = 0;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            ';' if !quoted => {
                out.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&line[start..]);
    out
}

/// Parse `src.pos > tgt`.
fn parse_dom(line_no: usize, text: &str) -> Result<DominanceLink, FormatError> {
    let err = || syntax(line_no, 1, "expected dom: <label>.<pos> > <label>");
    let (source, target) = text.split_once('>').ok_or_else(err)?;
    let (src_label, pos) = source.trim().rsplit_once('.').ok_or_else(err)?;
    let pos: usize = pos.parse().map_err(|_| err())?;
    let target = target.trim();
    if src_label.is_empty() || target.is_empty() || pos == 0 {
        return Err(err());
    }
    Ok(DominanceLink::new(src_label, pos, target))
}

/// Render an index multiset as `[a,b,b]`, or nothing when empty.
pub fn multiset_suffix(m: &IndexMultiset) -> String {
    if m.is_empty() {
        String::new()
    } else {
        format!("[{}]", m.expanded().join(","))
    }
}

fn push_comments(out: &mut String, comments: &[String]) {
    for c in comments {
        if c.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
    }
}

/// Serialize to the canonical form: comments, directives, blank line, body.
pub fn serialize_grammar(file: &GrammarFile) -> String {
    let mut out = String::new();
    push_comments(&mut out, &file.comments);
    match &file.grammar {
        ParsedGrammar::Mslig(g) => {
            out.push_str("%type mslig\n");
            out.push_str(&format!("%start {}\n", g.start));
            if !g.indices.is_empty() {
                let names: Vec<&str> = g.indices.iter().map(String::as_str).collect();
                out.push_str(&format!("%index {}\n", names.join(" ")));
            }
            out.push('\n');
            for p in &g.productions {
                out.push_str(&format!("{}{} ->", p.lhs, multiset_suffix(&p.lhs_indices)));
                for item in &p.rhs {
                    match item {
                        Item::Terminal(t) => out.push_str(&format!(" '{t}'")),
                        Item::Nonterminal(n, m) => {
                            out.push_str(&format!(" {n}{}", multiset_suffix(m)));
                        }
                    }
                }
                out.push('\n');
            }
        }
        ParsedGrammar::Uvgdl(g) => {
            out.push_str("%type uvgdl\n");
            out.push_str(&format!("%start {}\n", g.start));
            out.push('\n');
            for (vi, v) in g.vectors.iter().enumerate() {
                if vi > 0 {
                    out.push('\n');
                }
                out.push_str(&format!("vector {} {{\n", v.name));
                for p in &v.productions {
                    out.push_str(&format!("  {}: {} ->", p.label, p.lhs));
                    for sym in &p.rhs {
                        match sym {
                            VectorSymbol::Terminal(t) => out.push_str(&format!(" '{t}'")),
                            VectorSymbol::Nonterminal(n) => out.push_str(&format!(" {n}")),
                        }
                    }
                    out.push('\n');
                }
                for l in &v.links {
                    out.push_str(&format!(
                        "  dom: {}.{} > {}\n",
                        l.source_label, l.source_pos, l.target_label
                    ));
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvg_core::samples;

    fn mslig(file: &GrammarFile) -> &MsligGrammar {
        match &file.grammar {
            ParsedGrammar::Mslig(g) => g,
            ParsedGrammar::Uvgdl(_) => panic!("expected an index grammar"),
        }
    }

    #[test]
    fn count5_round_trips() {
        let file = GrammarFile::plain(ParsedGrammar::Mslig(samples::count5()));
        let text = serialize_grammar(&file);
        let reparsed = parse_grammar(&text).unwrap();
        assert_eq!(reparsed, file);
        assert_eq!(serialize_grammar(&reparsed), text);
    }

    #[test]
    fn scrambling_round_trips() {
        let file = GrammarFile::plain(ParsedGrammar::Uvgdl(samples::scrambling_g2()));
        let text = serialize_grammar(&file);
        let reparsed = parse_grammar(&text).unwrap();
        assert_eq!(reparsed, file);
        assert_eq!(serialize_grammar(&reparsed), text);
    }

    #[test]
    fn corpus_round_trips() {
        for (name, g) in samples::mslig_corpus() {
            let file = GrammarFile::plain(ParsedGrammar::Mslig(g));
            let text = serialize_grammar(&file);
            assert_eq!(parse_grammar(&text).unwrap(), file, "{name}");
        }
    }

    #[test]
    fn converted_grammar_round_trips() {
        let conv = mvg_core::uvgdl_to_mslig(&samples::scrambling_g2()).unwrap();
        let file = GrammarFile::plain(ParsedGrammar::Mslig(conv.grammar));
        let text = serialize_grammar(&file);
        assert!(text.contains("l_{2,1,4}"), "link symbols survive: {text}");
        assert_eq!(parse_grammar(&text).unwrap(), file);
    }

    #[test]
    fn undeclared_index_is_located() {
        let text = "%type mslig\n%start S\n%index f\n\nS[g] -> 'a'\n";
        let err = parse_grammar(text).unwrap_err();
        let FormatError::Syntax { line, message, .. } = err else {
            panic!("expected a syntax error, got {err}");
        };
        assert_eq!(line, 5);
        assert!(message.contains('g'), "{message}");
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a demo\n# two lines\n%type mslig\n%start S\n\n\
                    S -> 'a' S 'b'   # inline\nS ->\n";
        let file = parse_grammar(text).unwrap();
        assert_eq!(file.comments, vec!["a demo", "two lines"]);
        assert_eq!(mslig(&file).productions.len(), 2);
    }

    #[test]
    fn hash_inside_token_is_not_a_comment() {
        let text = "%type mslig\n%start S\n%index l_{1,1,1}#2\n\nS[l_{1,1,1}#2] -> 'a'\nS -> S[l_{1,1,1}#2]\n";
        let file = parse_grammar(text).unwrap();
        let g = mslig(&file);
        assert!(g.indices.contains("l_{1,1,1}#2"));
        assert_eq!(g.productions[0].lhs_indices.total(), 1);
    }

    #[test]
    fn multiset_repetition_and_empty_brackets() {
        let text = "%type mslig\n%start S\n%index f\n\nS[f,f] -> T[]\nT -> S[f]\nS -> 'x'\nT ->\n";
        let g = parse_grammar(text).unwrap();
        let g = mslig(&g);
        assert_eq!(g.productions[0].lhs_indices.count("f"), 2);
        assert!(g.productions[0].rhs[0] == Item::plain("T"));
    }

    #[test]
    fn semicolon_separated_vector_entries() {
        let text = "%type uvgdl\n%start S\n\nvector v {\n  q1: S -> S S; q2: S -> 'x'; dom: q1.2 > q2\n}\n";
        let file = parse_grammar(text).unwrap();
        let ParsedGrammar::Uvgdl(g) = &file.grammar else {
            panic!("expected a vector grammar")
        };
        assert_eq!(g.vectors[0].productions.len(), 2);
        assert_eq!(g.vectors[0].links.len(), 1);
        assert!(g.vectors[0].links.contains(&DominanceLink::new("q1", 2, "q2")));
    }

    #[test]
    fn errors_are_located() {
        for (text, want_line, want_fragment) in [
            ("%type what\n", 1, "%type"),
            ("%type mslig\n", 1, "%start"),
            ("%type mslig\n%start S\n\nS 'a' ->\n", 4, "->"),
            ("%type mslig\n%start S\n\nS -> 'a\n", 4, "unterminated"),
            ("%type uvgdl\n%start S\n\nvector v {\n  q1: S -> 'a'\n", 5, "unterminated"),
            ("%type uvgdl\n%start S\n%index f\n\nvector v {\n}\n", 3, "%index"),
            ("%type uvgdl\n%start S\n\nvector v {\n  dom: q1 > q2\n}\n", 5, "dom"),
        ] {
            let err = parse_grammar(text).unwrap_err();
            let FormatError::Syntax { line, message, .. } = &err else {
                panic!("expected a syntax error for {text:?}, got {err}");
            };
            assert_eq!(*line, want_line, "{text:?}: {message}");
            assert!(message.contains(want_fragment), "{text:?}: {message}");
        }
    }

    #[test]
    fn validation_is_forwarded() {
        // `a` is used both quoted and bare, which collides the inferred
        // terminal and nonterminal inventories.
        let text = "%type mslig\n%start S\n\nS -> 'a' a\na -> 'a'\n";
        let err = parse_grammar(text).unwrap_err();
        assert!(matches!(err, FormatError::Invalid(_)), "{err}");
    }

    #[test]
    fn multi_word_terminals_survive() {
        let text = "%type uvgdl\n%start S\n\nvector v {\n  q1: S -> 'zu reparieren'\n}\n";
        let file = parse_grammar(text).unwrap();
        let ParsedGrammar::Uvgdl(g) = &file.grammar else {
            panic!("expected a vector grammar")
        };
        assert!(g.terminals.contains("zu reparieren"));
    }
}
