//! Strategy trees: synchronisers, super-synchronisers and homing words.
//!
//! Text format, one node per line in pre-order, two spaces of indentation per
//! level:
//!
//! ```text
//! [box] {1,2,3,4} | bot
//!   [box] {3,4} | blue bot
//!     {3,4} | bot
//!   {1,2} | red bot
//! ```
//!
//! A bracketed letter marks an internal node; its children follow on the
//! next lines, one level deeper.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::ParseError;
use crate::pda::{Letter, Pda, PseudoConfig, StateId, StateSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: PseudoConfig,
    pub letter: Option<Letter>,
    pub children: Vec<Node>,
}

impl Node {
    pub fn leaf(label: PseudoConfig) -> Self {
        Node {
            label,
            letter: None,
            children: Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Builds the internal node for `letter`, expanding children with `f`.
    pub fn expand(pda: &Pda, label: PseudoConfig, letter: Letter, mut f: impl FnMut(PseudoConfig) -> Node) -> Node {
        let children = pda.succ(&label, letter).into_iter().map(&mut f).collect();
        Node {
            label,
            letter: Some(letter),
            children,
        }
    }
}

/// A witness tree. Children of every internal node are ordered as
/// [`Pda::succ`] returns them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTree {
    pub root: Node,
}

impl StrategyTree {
    pub fn new(root: Node) -> Self {
        StrategyTree { root }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        let mut stack = vec![&self.root];
        std::iter::from_fn(move || {
            let n = stack.pop()?;
            stack.extend(n.children.iter().rev());
            Some(n)
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes().count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        fn go(n: &Node) -> usize {
            n.children.iter().map(go).max().map_or(0, |d| d + 1)
        }
        go(&self.root)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Synchroniser(StateId),
    SuperSynchroniser(StateId),
    HomingWord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    RootMismatch,
    /// Letter present without children or vice versa, or an out-of-range letter.
    MalformedTree(String),
    ChildrenMismatch,
    BadLeaf(String),
}

/// The first offending node, addressed by child indices from the root.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind:?} at node path {path:?}")]
pub struct Violation {
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

pub fn leaf_accepts(pda: &Pda, kind: WitnessKind, label: &PseudoConfig) -> bool {
    match kind {
        WitnessKind::Synchroniser(s) => label.states.single() == Some(s),
        WitnessKind::SuperSynchroniser(s) => label.states.single() == Some(s) && label.stack == [pda.bottom()],
        WitnessKind::HomingWord => label.states.len() == 1,
    }
}

/// Validates `tree` as a witness of `kind` from `root_pc`. Traversal is
/// pre-order, so the reported violation is the first one in that order.
pub fn check_witness(pda: &Pda, root_pc: &PseudoConfig, kind: WitnessKind, tree: &StrategyTree) -> Result<(), Violation> {
    let completed;
    let pda = if pda.is_complete() {
        pda
    } else {
        completed = pda.complete();
        &completed
    };
    if &tree.root.label != root_pc {
        return Err(Violation {
            path: vec![],
            kind: ViolationKind::RootMismatch,
        });
    }
    let mut stack: Vec<(&Node, Vec<usize>)> = vec![(&tree.root, vec![])];
    while let Some((node, path)) = stack.pop() {
        let fail = |kind| Err(Violation { path: path.clone(), kind });
        match node.letter {
            None => {
                if !node.children.is_empty() {
                    return fail(ViolationKind::MalformedTree("children without a letter".into()));
                }
                if !leaf_accepts(pda, kind, &node.label) {
                    let why = format!("leaf {} does not satisfy {:?}", pda.show_pseudo(&node.label), kind);
                    return fail(ViolationKind::BadLeaf(why));
                }
            }
            Some(a) => {
                if a.index() >= pda.num_inputs() {
                    return fail(ViolationKind::MalformedTree(format!("unknown letter #{}", a.0)));
                }
                if node.children.is_empty() {
                    return fail(ViolationKind::MalformedTree("letter without children".into()));
                }
                let expected = pda.succ(&node.label, a);
                if expected.len() != node.children.len() {
                    return fail(ViolationKind::MalformedTree(format!(
                        "{} children, succ has {}",
                        node.children.len(),
                        expected.len()
                    )));
                }
                if expected.iter().zip(&node.children).any(|(e, c)| e != &c.label) {
                    return fail(ViolationKind::ChildrenMismatch);
                }
                for (i, c) in node.children.iter().enumerate().rev() {
                    let mut p = path.clone();
                    p.push(i);
                    stack.push((c, p));
                }
            }
        }
    }
    Ok(())
}

pub fn serialize_tree(pda: &Pda, tree: &StrategyTree) -> String {
    let mut out = String::new();
    let mut stack = vec![(&tree.root, 0usize)];
    while let Some((n, depth)) = stack.pop() {
        for _ in 0..depth {
            out.push_str("  ");
        }
        if let Some(a) = n.letter {
            let _ = write!(out, "[{}] ", pda.input_name(a));
        }
        let _ = writeln!(out, "{} | {}", pda.show_set(&n.label.states), pda.show_word(&n.label.stack));
        for c in n.children.iter().rev() {
            stack.push((c, depth + 1));
        }
    }
    out
}

struct Line {
    depth: usize,
    letter: Option<Letter>,
    label: PseudoConfig,
    lineno: usize,
}

fn parse_line(pda: &Pda, raw: &str, lineno: usize) -> Result<Line, ParseError> {
    let indent = raw.len() - raw.trim_start_matches(' ').len();
    if indent % 2 != 0 {
        return Err(ParseError::new(lineno, indent + 1, "indentation must be a multiple of two spaces"));
    }
    let mut rest = &raw[indent..];
    let mut col = indent + 1;
    let mut letter = None;
    if let Some(r) = rest.strip_prefix('[') {
        let close = r.find(']').ok_or_else(|| ParseError::new(lineno, col, "unterminated letter bracket"))?;
        let name = r[..close].trim();
        letter = Some(
            pda.letter_id(name)
                .ok_or_else(|| ParseError::new(lineno, col + 1, format!("unknown letter `{name}`")))?,
        );
        let consumed = close + 2;
        col += consumed;
        rest = &rest[consumed..];
    }
    let trimmed = rest.trim_start();
    col += rest.len() - trimmed.len();
    let body = trimmed.strip_prefix('{').ok_or_else(|| ParseError::new(lineno, col, "expected `{`"))?;
    let close = body.find('}').ok_or_else(|| ParseError::new(lineno, col, "unterminated state set"))?;
    let mut states = StateSet::new();
    for name in body[..close].split(',').map(str::trim).filter(|s| !s.is_empty()) {
        states.insert(
            pda.state_id(name)
                .ok_or_else(|| ParseError::new(lineno, col, format!("unknown state `{name}`")))?,
        );
    }
    let after = &body[close + 1..];
    let stack_part = after
        .trim_start()
        .strip_prefix('|')
        .ok_or_else(|| ParseError::new(lineno, col + close + 2, "expected `|` before the stack"))?;
    let mut stack = Vec::new();
    for name in stack_part.split_whitespace() {
        if name == "eps" {
            continue;
        }
        stack.push(
            pda.sym_id(name)
                .ok_or_else(|| ParseError::new(lineno, col, format!("unknown stack symbol `{name}`")))?,
        );
    }
    let label = PseudoConfig::new(pda, states, stack).map_err(|e| ParseError::new(lineno, col, e.to_string()))?;
    Ok(Line {
        depth: indent / 2,
        letter,
        label,
        lineno,
    })
}

pub fn deserialize_tree(pda: &Pda, text: &str) -> Result<StrategyTree, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        lines.push(parse_line(pda, raw.trim_end(), i + 1)?);
    }
    if lines.is_empty() {
        return Err(ParseError::new(1, 1, "empty tree document"));
    }
    let mut pos = 0;
    let root = build(&lines, &mut pos, 0)?;
    if let Some(l) = lines.get(pos) {
        return Err(ParseError::new(l.lineno, 1, "more than one root"));
    }
    Ok(StrategyTree { root })
}

fn build(lines: &[Line], pos: &mut usize, depth: usize) -> Result<Node, ParseError> {
    let line = &lines[*pos];
    if line.depth != depth {
        return Err(ParseError::new(line.lineno, 1, format!("expected depth {depth}, found {}", line.depth)));
    }
    *pos += 1;
    let mut children = Vec::new();
    while let Some(next) = lines.get(*pos) {
        if next.depth <= depth {
            break;
        }
        if line.letter.is_none() {
            return Err(ParseError::new(next.lineno, 1, "child under a node without a letter"));
        }
        children.push(build(lines, pos, depth + 1)?);
    }
    if line.letter.is_some() && children.is_empty() {
        return Err(ParseError::new(line.lineno, 1, "node declares a letter but has no children"));
    }
    Ok(Node {
        label: line.label.clone(),
        letter: line.letter,
        children,
    })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: nodes labelled `S / stack`, edges by the letter.
pub fn to_dot(pda: &Pda, tree: &StrategyTree) -> String {
    let mut out = String::from("digraph witness {\n  node [shape=box];\n");
    let mut next_id = 0usize;
    let mut stack = vec![(&tree.root, None::<(usize, Letter)>)];
    while let Some((n, parent)) = stack.pop() {
        let id = next_id;
        next_id += 1;
        let label = format!("{} / {}", pda.show_set(&n.label.states), pda.show_word(&n.label.stack));
        let _ = writeln!(out, "  n{id} [label=\"{}\"];", dot_escape(&label));
        if let Some((p, a)) = parent {
            let _ = writeln!(out, "  n{p} -> n{id} [label=\"{}\"];", dot_escape(pda.input_name(a)));
        }
        for c in n.children.iter().rev() {
            stack.push((c, Some((id, n.letter.expect("internal node has a letter")))));
        }
    }
    out.push_str("}\n");
    out
}

/// Display adapter for a tree together with its PDA.
pub struct ShowTree<'a>(pub &'a Pda, pub &'a StrategyTree);

impl fmt::Display for ShowTree<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tree(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::run4;

    fn pc(p: &Pda, states: &[&str], stack: &[&str]) -> PseudoConfig {
        PseudoConfig::new(
            p,
            states.iter().map(|n| p.state_id(n).unwrap()).collect(),
            stack.iter().map(|n| p.sym_id(n).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_leaf_super() {
        let p = run4().complete();
        let s4 = p.state_id("4").unwrap();
        let root = pc(&p, &["4"], &["bot"]);
        let t = StrategyTree::new(Node::leaf(root.clone()));
        assert!(check_witness(&p, &root, WitnessKind::SuperSynchroniser(s4), &t).is_ok());

        let root = pc(&p, &["4"], &["blue", "bot"]);
        let t = StrategyTree::new(Node::leaf(root.clone()));
        let v = check_witness(&p, &root, WitnessKind::SuperSynchroniser(s4), &t).unwrap_err();
        assert_eq!(v.path, Vec::<usize>::new());
        assert!(matches!(v.kind, ViolationKind::BadLeaf(_)));
        assert!(check_witness(&p, &root, WitnessKind::Synchroniser(s4), &t).is_ok());
        assert!(check_witness(&p, &root, WitnessKind::HomingWord, &t).is_ok());
    }

    #[test]
    fn detects_permuted_children_and_bad_arity() {
        let p = run4().complete();
        let bx = p.letter_id("box").unwrap();
        let root = pc(&p, &["1", "2", "3", "4"], &["bot"]);
        let mut node = Node::expand(&p, root.clone(), bx, Node::leaf);
        let t = StrategyTree::new(node.clone());
        let v = check_witness(&p, &root, WitnessKind::HomingWord, &t).unwrap_err();
        assert_eq!(v.path, vec![0]);

        node.children.swap(0, 1);
        let v = check_witness(&p, &root, WitnessKind::HomingWord, &StrategyTree::new(node.clone())).unwrap_err();
        assert_eq!(v.kind, ViolationKind::ChildrenMismatch);

        node.children.pop();
        let v = check_witness(&p, &root, WitnessKind::HomingWord, &StrategyTree::new(node)).unwrap_err();
        assert!(matches!(v.kind, ViolationKind::MalformedTree(_)));
    }

    #[test]
    fn round_trip_and_parse_errors() {
        let p = run4().complete();
        let bx = p.letter_id("box").unwrap();
        let root = pc(&p, &["1", "2", "3", "4"], &["bot"]);
        let t = StrategyTree::new(Node::expand(&p, root, bx, |c| Node::expand(&p, c, bx, Node::leaf)));
        let text = serialize_tree(&p, &t);
        assert_eq!(
            text,
            "[box] {1,2,3,4} | bot\n  [box] {3,4} | blue bot\n    {3,4} | bot\n  [box] {1,2} | red bot\n    {1,2} | bot\n"
        );
        assert_eq!(deserialize_tree(&p, &text).unwrap(), t);

        let one = deserialize_tree(&p, "{4} | bot\n").unwrap();
        assert_eq!(one.node_count(), 1);

        let err = deserialize_tree(&p, "[box] {4} | bot\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = deserialize_tree(&p, "{4} | bot\n  {4} | bot\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(deserialize_tree(&p, "{9} | bot\n").is_err());
    }

    #[test]
    fn dot_output_mentions_every_node() {
        let p = run4().complete();
        let bx = p.letter_id("box").unwrap();
        let root = pc(&p, &["1", "2", "3", "4"], &["bot"]);
        let t = StrategyTree::new(Node::expand(&p, root, bx, Node::leaf));
        let dot = to_dot(&p, &t);
        assert_eq!(dot.matches("[label=\"box\"]").count(), 2);
        assert!(dot.contains("{1,2,3,4} / bot"));
    }
}
