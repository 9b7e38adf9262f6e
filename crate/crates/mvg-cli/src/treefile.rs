//! S-expression tree files: `(vector:label@id child ...)`.
//!
//! Each node names the vector and production it applies; children fill the
//! production's nonterminal positions in order, and terminal leaves are
//! implied by the production itself. The `@id` part declares which vector
//! instance the node belongs to and may be omitted to let the checker infer
//! a grouping. Comments follow the grammar-file rule: `#` at line start or
//! after whitespace.

use mvg_core::uvgdl::TreeSpec;

use crate::format::FormatError;

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

enum SToken {
    Open(Pos),
    Close(Pos),
    Atom(Pos, String),
}

fn scan(text: &str) -> Result<Vec<SToken>, FormatError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut atom_start: Option<(usize, usize)> = None; // (byte, column)
        let mut prev_ws = true;
        let flush = |out: &mut Vec<SToken>, start: Option<(usize, usize)>, end: usize| {
            if let Some((byte, column)) = start {
                out.push(SToken::Atom(
                    Pos {
                        line: line_no,
                        column,
                    },
                    raw[byte..end].to_string(),
                ));
            }
        };
        let mut column = 0;
        let mut comment = false;
        for (byte, c) in raw.char_indices() {
            column += 1;
            match c {
                '#' if prev_ws => {
                    comment = true;
                    break;
                }
                '(' | ')' => {
                    flush(&mut out, atom_start.take(), byte);
                    let pos = Pos {
                        line: line_no,
                        column,
                    };
                    out.push(if c == '(' {
                        SToken::Open(pos)
                    } else {
                        SToken::Close(pos)
                    });
                }
                c if c.is_whitespace() => flush(&mut out, atom_start.take(), byte),
                _ => {
                    if atom_start.is_none() {
                        atom_start = Some((byte, column));
                    }
                }
            }
            prev_ws = c.is_whitespace();
        }
        if !comment {
            flush(&mut out, atom_start.take(), raw.len());
        }
    }
    Ok(out)
}

fn parse_atom(pos: Pos, atom: &str) -> Result<TreeSpec, FormatError> {
    let err = |m: String| syntax(pos.line, pos.column, m);
    let Some((vector, rest)) = atom.split_once(':') else {
        return Err(err(format!("expected vector:label in {atom}")));
    };
    let (label, instance) = match rest.split_once('@') {
        Some((label, id)) => {
            let id: u32 = id
                .parse()
                .map_err(|_| err(format!("bad instance id in {atom}")))?;
            (label, Some(id))
        }
        None => (rest, None),
    };
    if vector.is_empty() || label.is_empty() {
        return Err(err(format!("expected vector:label in {atom}")));
    }
    Ok(TreeSpec {
        vector: vector.to_string(),
        label: label.to_string(),
        instance,
        children: Vec::new(),
    })
}

/// Parse a tree file into a [`TreeSpec`].
pub fn parse_tree(text: &str) -> Result<TreeSpec, FormatError> {
    let tokens = scan(text)?;
    let mut iter = tokens.into_iter();
    let root = match iter.next() {
        Some(SToken::Open(pos)) => parse_node(pos, &mut iter)?,
        Some(SToken::Atom(pos, _)) | Some(SToken::Close(pos)) => {
            return Err(syntax(pos.line, pos.column, "expected ("));
        }
        None => return Err(syntax(1, 1, "empty tree file")),
    };
    match iter.next() {
        None => Ok(root),
        Some(SToken::Open(pos)) | Some(SToken::Close(pos)) | Some(SToken::Atom(pos, _)) => {
            Err(syntax(pos.line, pos.column, "trailing input after tree"))
        }
    }
}

fn parse_node(
    open: Pos,
    iter: &mut impl Iterator<Item = SToken>,
) -> Result<TreeSpec, FormatError> {
    let mut node = match iter.next() {
        Some(SToken::Atom(pos, atom)) => parse_atom(pos, &atom)?,
        Some(SToken::Open(pos)) | Some(SToken::Close(pos)) => {
            return Err(syntax(pos.line, pos.column, "expected vector:label after ("));
        }
        None => return Err(syntax(open.line, open.column, "unclosed (")),
    };
    loop {
        match iter.next() {
            Some(SToken::Close(_)) => return Ok(node),
            Some(SToken::Open(pos)) => node.children.push(parse_node(pos, iter)?),
            Some(SToken::Atom(pos, atom)) => {
                return Err(syntax(
                    pos.line,
                    pos.column,
                    format!("bare atom {atom}; children are parenthesized"),
                ));
            }
            None => return Err(syntax(open.line, open.column, "unclosed (")),
        }
    }
}

fn node_atom(spec: &TreeSpec) -> String {
    match spec.instance {
        Some(id) => format!("{}:{}@{id}", spec.vector, spec.label),
        None => format!("{}:{}", spec.vector, spec.label),
    }
}

fn write_node(out: &mut String, spec: &TreeSpec, indent: usize) {
    out.push('(');
    out.push_str(&node_atom(spec));
    for child in &spec.children {
        out.push('\n');
        out.push_str(&" ".repeat(indent + 2));
        write_node(out, child, indent + 2);
    }
    out.push(')');
}

/// Serialize a [`TreeSpec`]: leaves inline, children indented one per line.
pub fn serialize_tree(spec: &TreeSpec) -> String {
    let mut out = String::new();
    write_node(&mut out, spec, 0);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TreeSpec {
        TreeSpec::instance("v1", "q1", 1).with_children(vec![
            TreeSpec::instance("v2", "q3", 1).with_children(vec![
                TreeSpec::instance("v3", "q2", 1),
                TreeSpec::instance("v2", "q4", 1),
            ]),
        ])
    }

    #[test]
    fn round_trip() {
        let text = serialize_tree(&sample());
        assert_eq!(parse_tree(&text).unwrap(), sample());
        assert_eq!(serialize_tree(&parse_tree(&text).unwrap()), text);
    }

    #[test]
    fn optional_instance_and_comments() {
        let text = "# a tree\n(v1:q1 # root\n  (v5:q1))\n";
        let tree = parse_tree(text).unwrap();
        assert_eq!(tree.instance, None);
        assert_eq!(tree.children.len(), 1);
        assert_eq!(tree.children[0].vector, "v5");
    }

    #[test]
    fn errors_are_located() {
        for (text, line, fragment) in [
            ("", 1, "empty"),
            ("(v1:q1", 1, "unclosed"),
            ("(v1:q1))", 1, "trailing"),
            ("(v1)", 1, "vector:label"),
            ("(v1:q1 x)", 1, "bare atom"),
            ("(v1:q1@x)", 1, "instance id"),
            ("(v1:q1\n  (v2:q1)", 1, "unclosed"),
        ] {
            let err = parse_tree(text).unwrap_err();
            let FormatError::Syntax {
                line: got, message, ..
            } = &err
            else {
                panic!("expected a syntax error for {text:?}");
            };
            assert_eq!(*got, line, "{text:?}: {message}");
            assert!(message.contains(fragment), "{text:?}: {message}");
        }
    }
}
