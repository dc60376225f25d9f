//! Refinement scripts: a textual [`RefinementTree`].
//!
//! ```text
//! base linear.net              # or: base { <net document> }
//! refine T1 {
//!     base { kind transition  trans A  trans B  input A B  output A B }
//! }
//! refine m {
//!     base par.net
//! }
//! ```
//!
//! Inline net documents are line oriented, so each directive of an inline
//! `base { ... }` block goes on its own line. File paths are resolved against
//! the directory of the script. Unknown nodes and kind mismatches are reported
//! with the line of the offending `refine` before anything is expanded.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::text::{parse_net_text, write_net_text, TextError};
use super::{load_net, IoError};
use crate::andor::RefinementTree;
use crate::net::{NodeId, NodeKind};
use crate::workflow::Border;

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {node} is not a node of the enclosing base net")]
    UnknownNode { line: usize, node: NodeId },
    #[error("line {line}: {node} is refined twice")]
    Duplicate { line: usize, node: NodeId },
    #[error("line {line}: {node} is a {kind} and needs a {expected} net, but the refinement is a {found} net")]
    KindMismatch { line: usize, node: NodeId, kind: &'static str, expected: Border, found: Border },
    #[error("inline net: {0}")]
    Inline(TextError),
    #[error("line {line}: cannot load {path}: {source}")]
    File { line: usize, path: String, source: Box<IoError> },
    #[error("line {line}: file reference {path} needs a script directory")]
    NoBaseDir { line: usize, path: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
}

fn tokenize(text: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut Vec<(usize, Tok)>| {
            if !word.is_empty() {
                out.push((i + 1, Tok::Word(std::mem::take(word))));
            }
        };
        for c in content.chars() {
            match c {
                '{' | '}' => {
                    flush(&mut word, &mut out);
                    out.push((i + 1, if c == '{' { Tok::Open } else { Tok::Close }));
                }
                c if c.is_whitespace() => flush(&mut word, &mut out),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut out);
    }
    out
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    base_dir: Option<&'a Path>,
    last_line: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn line(&self) -> usize {
        self.peek().map_or(self.last_line, |(l, _)| *l)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize, ScriptError> {
        let line = self.line();
        match self.next() {
            Some((l, t)) if t == want => Ok(l),
            Some((l, _)) => Err(ScriptError::Syntax { line: l, message: format!("expected {what}") }),
            None => Err(ScriptError::Syntax { line, message: format!("expected {what}, found end of script") }),
        }
    }

    fn word(&mut self, what: &str) -> Result<(usize, String), ScriptError> {
        let line = self.line();
        match self.next() {
            Some((l, Tok::Word(w))) => Ok((l, w)),
            Some((l, _)) => Err(ScriptError::Syntax { line: l, message: format!("expected {what}") }),
            None => Err(ScriptError::Syntax { line, message: format!("expected {what}, found end of script") }),
        }
    }

    fn tree(&mut self) -> Result<RefinementTree, ScriptError> {
        let (line, kw) = self.word("`base`")?;
        if kw != "base" {
            return Err(ScriptError::Syntax { line, message: format!("expected `base`, found `{kw}`") });
        }
        let base = match self.peek() {
            Some((_, Tok::Open)) => self.inline_net()?,
            _ => {
                let (line, path) = self.word("a net file or `{`")?;
                let dir = self.base_dir.ok_or_else(|| ScriptError::NoBaseDir { line, path: path.clone() })?;
                load_net(&dir.join(&path)).map_err(|e| ScriptError::File {
                    line,
                    path: path.clone(),
                    source: Box::new(e),
                })?
            }
        };

        let mut tree = RefinementTree::leaf(base);
        let mut seen = BTreeSet::new();
        while let Some((_, Tok::Word(w))) = self.peek() {
            if w != "refine" {
                break;
            }
            self.next();
            let (line, node) = self.word("a node id")?;
            let node = NodeId::new(node).map_err(|e| ScriptError::Syntax { line, message: e.to_string() })?;
            self.expect(Tok::Open, "`{`")?;
            let child = self.tree()?;
            self.expect(Tok::Close, "`}`")?;

            let (kind, expected) = match tree.base.net().kind_of(&node) {
                None => return Err(ScriptError::UnknownNode { line, node }),
                Some(NodeKind::Place) => ("place", Border::Place),
                Some(NodeKind::Transition) => ("transition", Border::Transition),
            };
            if child.base.border() != expected {
                return Err(ScriptError::KindMismatch { line, node, kind, expected, found: child.base.border() });
            }
            if !seen.insert(node.clone()) {
                return Err(ScriptError::Duplicate { line, node });
            }
            tree = tree.refine(node, child);
        }
        Ok(tree)
    }

    /// `{ ... }` holding a net document; tokens are regrouped by their
    /// original line so the text parser reports absolute line numbers.
    fn inline_net(&mut self) -> Result<crate::workflow::WorkflowNet, ScriptError> {
        let open = self.expect(Tok::Open, "`{`")?;
        let mut lines: Vec<(usize, Vec<String>)> = Vec::new();
        loop {
            match self.next() {
                Some((_, Tok::Close)) => break,
                Some((l, Tok::Open)) => {
                    return Err(ScriptError::Syntax { line: l, message: "`{` inside an inline net".into() })
                }
                Some((l, Tok::Word(w))) => match lines.last_mut() {
                    Some((last, ws)) if *last == l => ws.push(w),
                    _ => lines.push((l, vec![w])),
                },
                None => return Err(ScriptError::Syntax { line: open, message: "unclosed inline net".into() }),
            }
        }
        let mut text = String::new();
        let mut current = 1;
        for (l, ws) in lines {
            while current < l {
                text.push('\n');
                current += 1;
            }
            text.push_str(&ws.join(" "));
        }
        parse_net_text(&text).map_err(ScriptError::Inline)
    }
}

/// Parses a refinement script. File references are resolved against
/// `base_dir`; without one, only inline nets are accepted.
pub fn parse_refinement(text: &str, base_dir: Option<&Path>) -> Result<RefinementTree, ScriptError> {
    let toks = tokenize(text);
    let last_line = toks.last().map_or(1, |(l, _)| *l);
    let mut p = Parser { toks, pos: 0, base_dir, last_line };
    let tree = p.tree()?;
    if let Some((line, _)) = p.peek() {
        return Err(ScriptError::Syntax { line: *line, message: "unexpected input after the tree".into() });
    }
    Ok(tree)
}

/// Writes `tree` as a self-contained script with inline nets.
pub fn write_refinement(tree: &RefinementTree) -> String {
    let mut out = String::new();
    write_tree(tree, 0, &mut out);
    out
}

fn write_tree(tree: &RefinementTree, depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    writeln!(out, "{pad}base {{").unwrap();
    for line in write_net_text(&tree.base).lines() {
        writeln!(out, "{pad}    {line}").unwrap();
    }
    writeln!(out, "{pad}}}").unwrap();
    for (node, child) in &tree.refinements {
        writeln!(out, "{pad}refine {node} {{").unwrap();
        write_tree(child, depth + 1, out);
        writeln!(out, "{pad}}}").unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::andor::decomposition_mapping;
    use crate::fixtures;
    use crate::refine::structurally_equal;

    const SKELETON: &str = "base {\n  net skeleton\n  kind transition\n  place p\n  trans t_i\n  trans t_o\n  \
                            arc t_i p\n  arc p t_o\n  input t_i\n  output t_o\n}\n";

    #[test]
    fn leaf_script() {
        let tree = parse_refinement(SKELETON, None).unwrap();
        assert!(tree.is_leaf());
        assert_eq!(tree.base, fixtures::tand_skeleton().with_name("skeleton"));
    }

    #[test]
    fn skeleton_plus_pand_gives_the_11tand() {
        let script = format!(
            "{SKELETON}refine p {{\n  base {{\n    kind place\n    place a\n    place b\n    place c\n    \
             trans u\n    arc a u\n    arc u c\n    input a b\n    output b c\n  }}\n}}\n"
        );
        let net = parse_refinement(&script, None).unwrap().expand().unwrap();
        let target = fixtures::tand_target();
        assert!(structurally_equal(&target, &net, &decomposition_mapping(&target)).unwrap());
    }

    #[test]
    fn kind_mismatch_is_reported_at_the_refine_line() {
        let script = format!(
            "{SKELETON}refine p {{\n  base {{\n    kind transition\n    trans x\n    input x\n    output x\n  }}\n}}\n"
        );
        let err = parse_refinement(&script, None).unwrap_err();
        assert!(matches!(err, ScriptError::KindMismatch { line: 12, .. }), "{err}");
    }

    #[test]
    fn unknown_node_and_syntax_errors() {
        let script = format!("{SKELETON}refine nope {{ base {{\nkind place\nplace q\ninput q\noutput q\n}} }}\n");
        assert!(matches!(parse_refinement(&script, None), Err(ScriptError::UnknownNode { line: 12, .. })));
        assert!(matches!(parse_refinement("refine x { }", None), Err(ScriptError::Syntax { line: 1, .. })));
        assert!(matches!(parse_refinement("base { kind place", None), Err(ScriptError::Syntax { .. })));
        assert!(matches!(parse_refinement("base x.net", None), Err(ScriptError::NoBaseDir { .. })));
    }

    #[test]
    fn inline_net_errors_use_script_lines() {
        let err = parse_refinement("\n\nbase {\nkind place\nplace p\narc p zz\n}\n", None).unwrap_err();
        assert_eq!(err.to_string(), "inline net: line 6: unknown node zz");
    }

    #[test]
    fn written_scripts_parse_back() {
        let tree = fixtures::doubled_segment_tree();
        let text = write_refinement(&tree);
        assert_eq!(parse_refinement(&text, None).unwrap(), tree);
    }
}
