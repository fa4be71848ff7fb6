//! Line-oriented text formats for PDAs (with an optional problem header),
//! AEPSs and APSs.
//!
//! ```text
//! pda
//! states 1 2
//! inputs a
//! stack A bot
//! bottom bot
//! trans 1 a bot -> 2 A bot
//! trans 2 a A -> 2 eps
//! problem given I=1,2 s=2 gamma=bot
//! ```
//!
//! `#` starts a comment when it is the first non-blank character of a line,
//! or when it stands alone as a word (whitespace before, whitespace or end
//! of line after). Inside a name such as `g:#` or `#t:0:1` it is ordinary.
//!
//! AEPS rules: `rule p A [v?=0 w?=1] -> (q, B A, [v:=1]) ; (r, eps, [])`.
//! APS rules: `rule p A -> (q, B A) ; (r, eps)`. Guards and commands are
//! optional.

use std::collections::{BTreeMap, HashMap};

use crate::aeps::{Aeps, AepsBranch, AepsRule};
use crate::aps::{Aps, ApsRule};
use crate::error::{Error, ParseError, ValidationError};
use crate::pda::{Pda, Rule, StateId, StateSet, Sym, Word};
use crate::reductions::{ProblemInstance, Variant};

/// The optional `problem` line of a PDA document, resolved against the PDA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemHeader {
    pub variant: String,
    pub init: Option<StateSet>,
    pub target: Option<StateId>,
    /// Start stack, top first.
    pub gamma: Option<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdaDocument {
    pub pda: Pda,
    pub problem: Option<ProblemHeader>,
}

impl PdaDocument {
    /// The problem instance of this document. `variant` replaces the
    /// header's variant name; `I`, `s` and `gamma` still come from the
    /// header when it has them.
    pub fn instance(&self, variant: Option<&str>) -> Result<ProblemInstance, Error> {
        let h = self.problem.as_ref();
        let name = variant
            .or(h.map(|h| h.variant.as_str()))
            .ok_or_else(|| ValidationError::Other("no problem variant given (no `problem` line and no override)".into()))?;
        let v = Variant::from_parts(name, h.and_then(|h| h.init.clone()), h.and_then(|h| h.target), self.pda.num_states())?;
        let gamma = h.and_then(|h| h.gamma.clone()).unwrap_or_else(|| vec![self.pda.bottom()]);
        Ok(ProblemInstance::new(self.pda.clone(), v, gamma)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Pda(PdaDocument),
    Aeps(Aeps),
    Aps(Aps),
}

/// Drops a trailing comment, see the module docs.
fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('#') {
        return "";
    }
    let b = line.as_bytes();
    for i in 0..b.len() {
        if b[i] == b'#' && i > 0 && b[i - 1].is_ascii_whitespace() && (i + 1 == b.len() || b[i + 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl Tok<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col, msg)
    }
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    toks: Vec<Tok<'a>>,
}

impl<'a> Line<'a> {
    fn at(&self, offset: usize) -> usize {
        self.text[..offset].chars().count() + 1
    }

    fn err_at(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.no, self.at(offset), msg)
    }

    fn end_err(&self, msg: impl Into<String>) -> ParseError {
        self.err_at(self.text.len(), msg)
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = strip_comment(raw);
        let mut toks = Vec::new();
        let mut start = None;
        for (off, ch) in body.char_indices().chain([(body.len(), ' ')]) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(off),
                (true, Some(s)) => {
                    toks.push(Tok {
                        text: &body[s..off],
                        line: i + 1,
                        col: body[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !toks.is_empty() {
            out.push(Line { no: i + 1, text: body, toks });
        }
    }
    out
}

/// Byte offset of a token inside its line.
fn offset_of(line: &Line, tok: &Tok) -> usize {
    tok.text.as_ptr() as usize - line.text.as_ptr() as usize
}

struct Names<'a, T> {
    what: &'static str,
    map: HashMap<&'a str, T>,
    list: Vec<String>,
}

impl<'a, T: Copy> Names<'a, T> {
    fn new(what: &'static str) -> Self {
        Names {
            what,
            map: HashMap::new(),
            list: Vec::new(),
        }
    }

    fn declare(&mut self, toks: &[Tok<'a>], mk: impl Fn(usize) -> T) -> Result<(), ParseError> {
        for t in toks {
            if self.map.insert(t.text, mk(self.list.len())).is_some() {
                return Err(t.err(format!("duplicate {} `{}`", self.what, t.text)));
            }
            self.list.push(t.text.to_string());
        }
        Ok(())
    }

    fn get(&self, t: &Tok) -> Result<T, ParseError> {
        self.map
            .get(t.text)
            .copied()
            .ok_or_else(|| t.err(format!("unknown {} `{}`", self.what, t.text)))
    }

    fn get_str(&self, s: &str, line: usize, col: usize) -> Result<T, ParseError> {
        self.map
            .get(s)
            .copied()
            .ok_or_else(|| ParseError::new(line, col, format!("unknown {} `{s}`", self.what)))
    }
}

/// Header keyword and the declarations every format shares.
struct Decls<'a> {
    header: &'a Line<'a>,
    single: HashMap<&'static str, &'a Line<'a>>,
    body: Vec<&'a Line<'a>>,
}

fn split_decls<'a>(ls: &'a [Line<'a>], kind: &str, keys: &[&'static str], body_keys: &[&str]) -> Result<Decls<'a>, ParseError> {
    let Some(header) = ls.first() else {
        return Err(ParseError::new(1, 1, format!("empty document; expected `{kind}`")));
    };
    if header.toks.len() != 1 || header.toks[0].text != kind {
        return Err(header.toks[0].err(format!("expected `{kind}` header")));
    }
    let mut single = HashMap::new();
    let mut body = Vec::new();
    for l in &ls[1..] {
        let k = l.toks[0].text;
        if let Some(&key) = keys.iter().find(|&&x| x == k) {
            if single.insert(key, l).is_some() {
                return Err(l.toks[0].err(format!("duplicate `{k}` line")));
            }
        } else if body_keys.contains(&k) {
            body.push(l);
        } else {
            return Err(l.toks[0].err(format!("unexpected `{k}`")));
        }
    }
    for k in keys {
        if !single.contains_key(k) && *k != "vars" && *k != "problem" {
            return Err(header.end_err(format!("missing `{k}` line")));
        }
    }
    Ok(Decls { header, single, body })
}

fn one_tok<'a>(l: &'a Line<'a>) -> Result<Tok<'a>, ParseError> {
    match l.toks.as_slice() {
        [_, t] => Ok(*t),
        _ => Err(l.toks[0].err(format!("`{}` takes exactly one name", l.toks[0].text))),
    }
}

fn word(syms: &Names<Sym>, toks: &[Tok]) -> Result<Word, ParseError> {
    if let [t] = toks {
        if t.text == "eps" {
            return Ok(vec![]);
        }
    }
    toks.iter().map(|t| syms.get(t)).collect()
}

/// `word` for a sub-string of a line (inside tuples).
fn word_str(syms: &Names<Sym>, line: &Line, s: &str, off: usize) -> Result<Word, ParseError> {
    let items: Vec<(usize, &str)> = s.split_whitespace().map(|w| (w.as_ptr() as usize - s.as_ptr() as usize + off, w)).collect();
    match items.as_slice() {
        [] => Err(line.err_at(off, "empty word; write `eps`")),
        [(_, "eps")] => Ok(vec![]),
        _ => items.iter().map(|&(o, w)| syms.get_str(w, line.no, line.at(o))).collect(),
    }
}

pub fn parse_document(text: &str) -> Result<Document, Error> {
    let ls = lines(text);
    match ls.first().map(|l| l.toks[0].text) {
        Some("pda") => Ok(Document::Pda(parse_pda(text)?)),
        Some("aeps") => Ok(Document::Aeps(parse_aeps(text)?)),
        Some("aps") => Ok(Document::Aps(parse_aps(text)?)),
        Some(_) => Err(ls[0].toks[0].err("expected `pda`, `aeps` or `aps`").into()),
        None => Err(ParseError::new(1, 1, "empty document").into()),
    }
}

pub fn parse_pda(text: &str) -> Result<PdaDocument, Error> {
    let ls = lines(text);
    let d = split_decls(&ls, "pda", &["states", "inputs", "stack", "bottom", "problem"], &["trans"])?;
    let mut states = Names::new("state");
    states.declare(&d.single["states"].toks[1..], StateId::from_index)?;
    let mut inputs = Names::new("input letter");
    inputs.declare(&d.single["inputs"].toks[1..], crate::pda::Letter::from_index)?;
    let mut syms = Names::new("stack symbol");
    syms.declare(&d.single["stack"].toks[1..], Sym::from_index)?;
    let bottom = syms.get(&one_tok(d.single["bottom"])?)?;
    let mut rules = Vec::new();
    for l in &d.body {
        let t = &l.toks;
        let arrow = t.iter().position(|x| x.text == "->").ok_or_else(|| l.end_err("expected `->`"))?;
        if arrow != 4 {
            return Err(t[0].err("expected `trans <src> <letter> <pop> -> <dst> <push|eps>`").into());
        }
        if t.len() < 7 {
            return Err(l.end_err("expected `<dst> <push|eps>` after `->`").into());
        }
        rules.push(Rule {
            src: states.get(&t[1])?,
            letter: inputs.get(&t[2])?,
            pop: syms.get(&t[3])?,
            dst: states.get(&t[5])?,
            push: word(&syms, &t[6..])?,
        });
    }
    let pda = Pda::new(states.list.clone(), inputs.list.clone(), syms.list.clone(), bottom, rules)?;
    let problem = match d.single.get("problem") {
        Some(l) => Some(parse_problem(l, &states, &syms, &pda)?),
        None => None,
    };
    let _ = d.header;
    Ok(PdaDocument { pda, problem })
}

fn parse_problem(l: &Line, states: &Names<StateId>, syms: &Names<Sym>, pda: &Pda) -> Result<ProblemHeader, Error> {
    let vt = l.toks.get(1).ok_or_else(|| l.end_err("`problem` needs a variant"))?;
    if !Variant::NAMES.contains(&vt.text) {
        return Err(vt
            .err(format!("unknown variant `{}`; expected one of {}", vt.text, Variant::NAMES.join(", ")))
            .into());
    }
    let mut h = ProblemHeader {
        variant: vt.text.to_string(),
        init: None,
        target: None,
        gamma: None,
    };
    for t in &l.toks[2..] {
        let (k, v) = t.text.split_once('=').ok_or_else(|| t.err("expected `key=value`"))?;
        let vcol = t.col + k.chars().count() + 1;
        let items = || v.split(',').filter(|x| !x.is_empty());
        match k {
            "I" => {
                let set = items().map(|x| states.get_str(x, t.line, vcol)).collect::<Result<StateSet, _>>()?;
                if set.is_empty() {
                    return Err(t.err("I must not be empty").into());
                }
                h.init = Some(set);
            }
            "s" => h.target = Some(states.get_str(v, t.line, vcol)?),
            "gamma" => {
                let w = items().map(|x| syms.get_str(x, t.line, vcol)).collect::<Result<Word, _>>()?;
                pda.check_stack(&w)
                    .map_err(|_| t.err("gamma must end with the bottom symbol and contain it once"))?;
                h.gamma = Some(w);
            }
            _ => return Err(t.err(format!("unknown key `{k}`")).into()),
        }
    }
    Ok(h)
}

/// Splits `s` at top-level occurrences of `sep` (outside (), [] and {}).
fn split_top(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

/// Trims `s`, returning the new offset too.
fn trim_at(s: &str, off: usize) -> (usize, &str) {
    let t = s.trim_start();
    (off + s.len() - t.len(), t.trim_end())
}

/// A bracketed list `[a b, c]`; returns its items with offsets.
fn bracket_items<'s>(line: &Line, s: &'s str, off: usize) -> Result<Vec<(usize, &'s str)>, ParseError> {
    let (off, s) = trim_at(s, off);
    if !s.starts_with('[') || !s.ends_with(']') {
        return Err(line.err_at(off, "expected a bracketed list `[...]`"));
    }
    let inner = &s[1..s.len() - 1];
    Ok(inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| (off + 1 + (x.as_ptr() as usize - inner.as_ptr() as usize), x))
        .collect())
}

struct RuleText<'a> {
    src: Tok<'a>,
    pop: Tok<'a>,
    /// Guard list text and offset, when present.
    guard: Option<(usize, &'a str)>,
    /// `(offset, fields)` per branch, fields trimmed.
    branches: Vec<(usize, Vec<(usize, &'a str)>)>,
}

fn rule_text<'a>(l: &'a Line<'a>) -> Result<RuleText<'a>, ParseError> {
    let t = &l.toks;
    if t.len() < 3 {
        return Err(l.end_err("expected `rule <src> <pop> ... -> (...)`"));
    }
    let arrow = l.text.find("->").ok_or_else(|| l.end_err("expected `->`"))?;
    let head_end = offset_of(l, &t[2]) + t[2].text.len();
    let (goff, gtext) = trim_at(&l.text[head_end..arrow], head_end);
    let guard = if gtext.is_empty() { None } else { Some((goff, gtext)) };
    let mut branches = Vec::new();
    for (boff, b) in split_top(&l.text[arrow + 2..], ';') {
        let (boff, b) = trim_at(b, arrow + 2 + boff);
        if !b.starts_with('(') || !b.ends_with(')') {
            return Err(l.err_at(boff, "expected a branch `(<dst>, <push|eps>[, [cmds]])`"));
        }
        let fields = split_top(&b[1..b.len() - 1], ',')
            .into_iter()
            .map(|(o, f)| trim_at(f, boff + 1 + o))
            .collect::<Vec<_>>();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(l.err_at(boff, "a branch has two or three fields"));
        }
        branches.push((boff, fields));
    }
    Ok(RuleText {
        src: t[1],
        pop: t[2],
        guard,
        branches,
    })
}

fn parse_bit(line: &Line, s: &str, off: usize) -> Result<bool, ParseError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(line.err_at(off, format!("expected 0 or 1, found `{s}`"))),
    }
}

pub fn parse_aeps(text: &str) -> Result<Aeps, Error> {
    let ls = lines(text);
    let d = split_decls(&ls, "aeps", &["states", "vars", "stack", "bottom", "init", "fin"], &["rule"])?;
    let mut states = Names::new("state");
    states.declare(&d.single["states"].toks[1..], StateId::from_index)?;
    let mut vars = Names::new("variable");
    if let Some(l) = d.single.get("vars") {
        vars.declare(&l.toks[1..], |i| i)?;
    }
    let mut syms = Names::new("stack symbol");
    syms.declare(&d.single["stack"].toks[1..], Sym::from_index)?;
    let bottom = syms.get(&one_tok(d.single["bottom"])?)?;
    let init = states.get(&one_tok(d.single["init"])?)?;
    let fin = states.get(&one_tok(d.single["fin"])?)?;
    let mut rules = Vec::new();
    for l in &d.body {
        let rt = rule_text(l)?;
        let mut guard = Vec::new();
        if let Some((off, g)) = rt.guard {
            for (o, item) in bracket_items(l, g, off)? {
                let (v, b) = item.split_once("?=").ok_or_else(|| l.err_at(o, "expected a test `v?=b`"))?;
                guard.push((vars.get_str(v, l.no, l.at(o))?, parse_bit(l, b, o + v.len() + 2)?));
            }
        }
        let mut branches = Vec::new();
        for (_, f) in &rt.branches {
            let dst = states.get_str(f[0].1, l.no, l.at(f[0].0))?;
            let push = word_str(&syms, l, f[1].1, f[1].0)?;
            let mut cmd = BTreeMap::new();
            if let Some(&(off, c)) = f.get(2) {
                for (o, item) in bracket_items(l, c, off)? {
                    let (v, b) = item.split_once(":=").ok_or_else(|| l.err_at(o, "expected a command `v:=b`"))?;
                    let var = vars.get_str(v, l.no, l.at(o))?;
                    let bit = parse_bit(l, b, o + v.len() + 2)?;
                    if cmd.insert(var, bit).is_some_and(|old| old != bit) {
                        return Err(l.err_at(o, format!("inconsistent command: `{v}` set to both 0 and 1")).into());
                    }
                }
            }
            branches.push(AepsBranch { dst, push, cmd });
        }
        rules.push(AepsRule {
            src: states.get(&rt.src)?,
            pop: syms.get(&rt.pop)?,
            guard,
            branches,
        });
    }
    Ok(Aeps::new(states.list, vars.list, syms.list, bottom, rules, init, fin)?)
}

pub fn parse_aps(text: &str) -> Result<Aps, Error> {
    let ls = lines(text);
    let d = split_decls(&ls, "aps", &["states", "stack", "bottom", "init", "fin"], &["rule"])?;
    let mut states = Names::new("state");
    states.declare(&d.single["states"].toks[1..], StateId::from_index)?;
    let mut syms = Names::new("stack symbol");
    syms.declare(&d.single["stack"].toks[1..], Sym::from_index)?;
    let bottom = syms.get(&one_tok(d.single["bottom"])?)?;
    let init = states.get(&one_tok(d.single["init"])?)?;
    let fin = states.get(&one_tok(d.single["fin"])?)?;
    let mut rules = Vec::new();
    for l in &d.body {
        let rt = rule_text(l)?;
        if let Some((off, _)) = rt.guard {
            return Err(l.err_at(off, "APS rules have no guards").into());
        }
        let mut branches = Vec::new();
        for (boff, f) in &rt.branches {
            if f.len() != 2 {
                return Err(l.err_at(*boff, "APS branches are `(<dst>, <push|eps>)`").into());
            }
            branches.push((states.get_str(f[0].1, l.no, l.at(f[0].0))?, word_str(&syms, l, f[1].1, f[1].0)?));
        }
        rules.push(ApsRule {
            src: states.get(&rt.src)?,
            pop: syms.get(&rt.pop)?,
            branches,
        });
    }
    Ok(Aps::new(states.list, syms.list, bottom, rules, init, fin)?)
}

fn show_word(names: &[String], w: &[Sym]) -> String {
    if w.is_empty() {
        "eps".into()
    } else {
        w.iter().map(|s| names[s.index()].as_str()).collect::<Vec<_>>().join(" ")
    }
}

pub fn print_pda(pda: &Pda, problem: Option<&ProblemHeader>) -> String {
    let mut out = String::from("pda\n");
    out.push_str(&format!("states {}\n", pda.state_names().join(" ")));
    out.push_str(&format!("inputs {}\n", pda.input_names().join(" ")));
    out.push_str(&format!("stack {}\n", pda.sym_names().join(" ")));
    out.push_str(&format!("bottom {}\n", pda.sym_name(pda.bottom())));
    for r in pda.rules() {
        out.push_str(&format!("trans {}\n", pda.show_rule(r)));
    }
    if let Some(h) = problem {
        out.push_str(&format!("problem {}", h.variant));
        let names = |s: &StateSet| s.iter().map(|q| pda.state_name(q)).collect::<Vec<_>>().join(",");
        if let Some(i) = &h.init {
            out.push_str(&format!(" I={}", names(i)));
        }
        if let Some(s) = h.target {
            out.push_str(&format!(" s={}", pda.state_name(s)));
        }
        if let Some(g) = &h.gamma {
            let w: Vec<&str> = g.iter().map(|s| pda.sym_name(*s)).collect();
            out.push_str(&format!(" gamma={}", w.join(",")));
        }
        out.push('\n');
    }
    out
}

pub fn header_of(inst: &ProblemInstance) -> ProblemHeader {
    ProblemHeader {
        variant: inst.variant.name().to_string(),
        init: inst.variant.init().cloned(),
        target: inst.variant.target(),
        gamma: (inst.stack != [inst.pda.bottom()]).then(|| inst.stack.clone()),
    }
}

pub fn print_instance(inst: &ProblemInstance) -> String {
    print_pda(&inst.pda, Some(&header_of(inst)))
}

pub fn print_aeps(a: &Aeps) -> String {
    let mut out = String::from("aeps\n");
    out.push_str(&format!("states {}\n", a.states.join(" ")));
    if !a.vars.is_empty() {
        out.push_str(&format!("vars {}\n", a.vars.join(" ")));
    }
    out.push_str(&format!("stack {}\n", a.stack.join(" ")));
    out.push_str(&format!("bottom {}\n", a.stack[a.bottom.index()]));
    out.push_str(&format!("init {}\n", a.states[a.init.index()]));
    out.push_str(&format!("fin {}\n", a.states[a.fin.index()]));
    let bit = |b: bool| if b { '1' } else { '0' };
    for r in &a.rules {
        out.push_str(&format!("rule {} {}", a.states[r.src.index()], a.stack[r.pop.index()]));
        if !r.guard.is_empty() {
            let g: Vec<String> = r.guard.iter().map(|&(v, b)| format!("{}?={}", a.vars[v], bit(b))).collect();
            out.push_str(&format!(" [{}]", g.join(" ")));
        }
        let bs: Vec<String> = r
            .branches
            .iter()
            .map(|b| {
                let c: Vec<String> = b.cmd.iter().map(|(&v, &x)| format!("{}:={}", a.vars[v], bit(x))).collect();
                format!("({}, {}, [{}])", a.states[b.dst.index()], show_word(&a.stack, &b.push), c.join(" "))
            })
            .collect();
        out.push_str(&format!(" -> {}\n", bs.join(" ; ")));
    }
    out
}

pub fn print_aps(a: &Aps) -> String {
    let mut out = String::from("aps\n");
    out.push_str(&format!("states {}\n", a.state_names().join(" ")));
    out.push_str(&format!("stack {}\n", a.sym_names().join(" ")));
    out.push_str(&format!("bottom {}\n", a.sym_name(a.bottom())));
    out.push_str(&format!("init {}\n", a.state_name(a.init())));
    out.push_str(&format!("fin {}\n", a.state_name(a.fin())));
    for r in a.rules() {
        out.push_str(&format!("rule {}\n", a.show_rule(r)));
    }
    out
}
