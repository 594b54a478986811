//! NETF v1: the textual net/rule/rns format, its canonical printer, and DOT
//! export.
//!
//! ```text
//! # comment
//! net NAME {
//!   node ID LABEL in=K out=M
//!   var ID NAME
//!   edge A:out:I -- B:in:J
//!   tag T A:in:I
//! }
//! rule NAME { preform { left @NET right @NET } }
//! rns NAME { rule NAME condition fresh-letters }
//! ```
//!
//! The canonical printer sorts nodes by id, edges lexicographically and tags
//! by name; parse-print-parse is the identity and a second print is
//! byte-identical.

use std::fmt::Write as _;

use crate::alphabet::{Alphabet, LetterKind};
use crate::error::{Error, Result};
use crate::net::{Direction, Net, RawNet};
use crate::rule::{Condition, Rns, Rule, RulePreform};

#[derive(Debug, Clone, Default)]
pub struct Document {
    pub nets: Vec<(String, Net)>,
    pub rules: Vec<Rule>,
    pub systems: Vec<Rns>,
}

impl Document {
    pub fn net(&self, name: &str) -> Option<&Net> {
        self.nets.iter().find(|(n, _)| n == name).map(|(_, n)| n)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn system(&self, name: &str) -> Option<&Rns> {
        self.systems.iter().find(|r| r.name == name)
    }

    pub fn jungle(&self) -> crate::net::Jungle {
        crate::net::Jungle::from_nets(self.nets.iter().map(|(_, n)| n.clone()))
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    LBrace,
    RBrace,
    Sep, // --
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.to_string(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<Spanned> {
        loop {
            match self.peek() {
                None => {
                    return Ok(Spanned {
                        tok: Tok::Eof,
                        line: self.line,
                        col: self.col,
                    })
                }
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(_) => break,
            }
        }
        let line = self.line;
        let col = self.col;
        let c = self.peek().unwrap();
        let tok = match c {
            '{' => {
                self.bump();
                Tok::LBrace
            }
            '}' => {
                self.bump();
                Tok::RBrace
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error("unterminated string")),
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Quoted(s)
            }
            _ => {
                let mut s = String::new();
                while let Some(ch) = self.peek() {
                    if ch.is_whitespace() || ch == '{' || ch == '}' || ch == '"' || ch == '#' {
                        break;
                    }
                    s.push(ch);
                    self.bump();
                }
                if s == "--" {
                    Tok::Sep
                } else {
                    Tok::Word(s)
                }
            }
        };
        Ok(Spanned { tok, line, col })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<Spanned>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(src),
            lookahead: None,
        }
    }

    fn peek(&mut self) -> Result<&Spanned> {
        if self.lookahead.is_none() {
            self.lookahead = Some(self.lexer.next_token()?);
        }
        Ok(self.lookahead.as_ref().unwrap())
    }

    fn next(&mut self) -> Result<Spanned> {
        self.peek()?;
        Ok(self.lookahead.take().unwrap())
    }

    fn err(&self, at: &Spanned, msg: &str) -> Error {
        Error::Parse {
            line: at.line,
            col: at.col,
            msg: msg.to_string(),
        }
    }

    fn expect_word(&mut self) -> Result<String> {
        let t = self.next()?;
        match t.tok {
            Tok::Word(w) => Ok(w),
            _ => Err(self.err(&t, "expected identifier")),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.next()?;
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.err(&t, &format!("expected {what}")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next()?;
        match &t.tok {
            Tok::Word(w) if w == kw => Ok(()),
            _ => Err(self.err(&t, &format!("expected `{kw}`"))),
        }
    }
}

fn parse_port_ref(p: &Parser<'_>, at: &Spanned, s: &str) -> Result<(String, Direction, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(p.err(at, &format!("malformed port reference `{s}`")));
    }
    let dir = match parts[1] {
        "in" => Direction::In,
        "out" => Direction::Out,
        _ => return Err(p.err(at, &format!("bad direction `{}`", parts[1]))),
    };
    let idx: usize = parts[2]
        .parse()
        .map_err(|_| p.err(at, &format!("bad port index `{}`", parts[2])))?;
    Ok((parts[0].to_string(), dir, idx))
}

fn parse_net_body(p: &mut Parser<'_>, alphabet: Option<&Alphabet>) -> Result<Net> {
    let mut raw = RawNet::default();
    loop {
        let t = p.next()?;
        match &t.tok {
            Tok::RBrace => break,
            Tok::Word(w) => match w.as_str() {
                "node" => {
                    let id = p.expect_word()?;
                    let label = p.expect_word()?;
                    let in_spec = p.expect_word()?;
                    let out_spec = p.expect_word()?;
                    let in_rank = in_spec
                        .strip_prefix("in=")
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| p.err(&t, "expected in=K"))?;
                    let out_rank = out_spec
                        .strip_prefix("out=")
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| p.err(&t, "expected out=M"))?;
                    raw = raw.node(&id, &label, in_rank, out_rank);
                }
                "var" => {
                    let id = p.expect_word()?;
                    let name = p.expect_word()?;
                    raw = raw.var(&id, &name);
                }
                "edge" => {
                    let src_tok = p.next()?;
                    let src = match &src_tok.tok {
                        Tok::Word(w) => w.clone(),
                        _ => return Err(p.err(&src_tok, "expected port reference")),
                    };
                    p.expect(Tok::Sep, "`--`")?;
                    let dst_tok = p.next()?;
                    let dst = match &dst_tok.tok {
                        Tok::Word(w) => w.clone(),
                        _ => return Err(p.err(&dst_tok, "expected port reference")),
                    };
                    let (sn, sd, si) = parse_port_ref(p, &src_tok, &src)?;
                    let (dn, dd, di) = parse_port_ref(p, &dst_tok, &dst)?;
                    if sd != Direction::Out || dd != Direction::In {
                        return Err(p.err(&src_tok, "edges run out-port -- in-port"));
                    }
                    raw = raw.edge(&sn, si, &dn, di);
                }
                "tag" => {
                    let name = p.expect_word()?;
                    let port_tok = p.next()?;
                    let port = match &port_tok.tok {
                        Tok::Word(w) => w.clone(),
                        _ => return Err(p.err(&port_tok, "expected port reference")),
                    };
                    let (n, d, i) = parse_port_ref(p, &port_tok, &port)?;
                    raw = raw.tag(&name, &n, d, i);
                }
                other => return Err(p.err(&t, &format!("unknown net item `{other}`"))),
            },
            _ => return Err(p.err(&t, "unexpected token in net body")),
        }
    }
    Net::validate(&raw, alphabet)
}

fn parse_net_operand(
    p: &mut Parser<'_>,
    doc: &Document,
    alphabet: Option<&Alphabet>,
) -> Result<Net> {
    let t = p.next()?;
    match &t.tok {
        Tok::Word(w) if w.starts_with('@') => {
            let name = &w[1..];
            doc.net(name)
                .cloned()
                .ok_or_else(|| p.err(&t, &format!("unknown net `{name}`")))
        }
        Tok::Word(w) if w == "net" => {
            // Optional name before the brace.
            let nt = p.next()?;
            match &nt.tok {
                Tok::LBrace => parse_net_body(p, alphabet),
                Tok::Word(_) => {
                    p.expect(Tok::LBrace, "`{`")?;
                    parse_net_body(p, alphabet)
                }
                _ => Err(p.err(&nt, "expected `{` or a name")),
            }
        }
        _ => Err(p.err(&t, "expected `@NET` or inline `net { ... }`")),
    }
}

/// Parses a NETF document. Previously-parsed nets are referencable from
/// rules via `@NAME`; an alphabet, when supplied, is enforced.
pub fn parse_document(src: &str, alphabet: Option<&Alphabet>) -> Result<Document> {
    let mut p = Parser::new(src);
    let mut doc = Document::default();
    loop {
        let t = p.next()?;
        match &t.tok {
            Tok::Eof => break,
            Tok::Word(w) => match w.as_str() {
                "net" => {
                    let name = p.expect_word()?;
                    p.expect(Tok::LBrace, "`{`")?;
                    let net = parse_net_body(&mut p, alphabet)?;
                    if doc.net(&name).is_some() {
                        return Err(p.err(&t, &format!("duplicate net `{name}`")));
                    }
                    doc.nets.push((name, net));
                }
                "rule" => {
                    let name = p.expect_word()?;
                    p.expect(Tok::LBrace, "`{`")?;
                    let mut preforms = Vec::new();
                    loop {
                        let nt = p.next()?;
                        match &nt.tok {
                            Tok::RBrace => break,
                            Tok::Word(w) if w == "preform" => {
                                p.expect(Tok::LBrace, "`{`")?;
                                p.expect_keyword("left")?;
                                let left = parse_net_operand(&mut p, &doc, alphabet)?;
                                let mut rights = Vec::new();
                                loop {
                                    let rt = p.peek()?.clone();
                                    match &rt.tok {
                                        Tok::Word(w) if w == "right" => {
                                            p.next()?;
                                            rights.push(parse_net_operand(&mut p, &doc, alphabet)?);
                                        }
                                        Tok::RBrace => {
                                            p.next()?;
                                            break;
                                        }
                                        _ => return Err(p.err(&rt, "expected `right` or `}`")),
                                    }
                                }
                                preforms.push(RulePreform::new(left, rights)?);
                            }
                            _ => return Err(p.err(&nt, "expected `preform` or `}`")),
                        }
                    }
                    if preforms.is_empty() {
                        return Err(p.err(&t, "rule has no preforms"));
                    }
                    doc.rules.push(Rule {
                        name,
                        preforms,
                    });
                }
                "rns" => {
                    let name = p.expect_word()?;
                    p.expect(Tok::LBrace, "`{`")?;
                    let mut rules = Vec::new();
                    let mut conditions = Vec::new();
                    loop {
                        let nt = p.next()?;
                        match &nt.tok {
                            Tok::RBrace => break,
                            Tok::Word(w) if w == "rule" => {
                                let rname = p.expect_word()?;
                                let rule = doc
                                    .rule(&rname)
                                    .cloned()
                                    .ok_or_else(|| p.err(&nt, &format!("unknown rule `{rname}`")))?;
                                rules.push(rule);
                            }
                            Tok::Word(w) if w == "condition" => {
                                let kind = p.expect_word()?;
                                match kind.as_str() {
                                    "fresh-letters" => conditions.push(Condition::FreshLetters),
                                    "redex-disjoint" => conditions.push(Condition::RedexDisjoint),
                                    "order" => {
                                        let qt = p.next()?;
                                        let Tok::Quoted(q) = &qt.tok else {
                                            return Err(p.err(&qt, "expected quoted rule list"));
                                        };
                                        conditions.push(Condition::ApplyOrder(
                                            q.split(',').map(|s| s.trim().to_string()).collect(),
                                        ));
                                    }
                                    "letters-outside" => {
                                        let qt = p.next()?;
                                        let Tok::Quoted(q) = &qt.tok else {
                                            return Err(p.err(&qt, "expected quoted letter list"));
                                        };
                                        conditions.push(Condition::LettersOutside(
                                            q.split(',').map(|s| s.trim().to_string()).collect(),
                                        ));
                                    }
                                    other => {
                                        return Err(p.err(
                                            &nt,
                                            &format!("unknown condition `{other}`: the demand language is closed"),
                                        ))
                                    }
                                }
                            }
                            _ => return Err(p.err(&nt, "expected `rule`, `condition` or `}`")),
                        }
                    }
                    doc.systems.push(Rns::new(&name, rules).with_conditions(conditions)?);
                }
                other => return Err(p.err(&t, &format!("unknown item `{other}`"))),
            },
            _ => return Err(p.err(&t, "expected an item")),
        }
    }
    Ok(doc)
}

/// Parses a document expected to contain exactly one net.
pub fn parse_single_net(src: &str, alphabet: Option<&Alphabet>) -> Result<Net> {
    let doc = parse_document(src, alphabet)?;
    match doc.nets.len() {
        1 => Ok(doc.nets.into_iter().next().unwrap().1),
        n => Err(Error::Invalid(format!("expected exactly 1 net, found {n}"))),
    }
}

/// Canonical printer for one net.
pub fn print_net(name: &str, net: &Net) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "net {name} {{");
    for (id, info) in net.nodes() {
        match info.kind {
            LetterKind::Ranked => {
                let _ = writeln!(
                    s,
                    "  node {id} {} in={} out={}",
                    info.letter, info.in_rank, info.out_rank
                );
            }
            LetterKind::Frontier => {
                let _ = writeln!(s, "  var {id} {}", info.letter);
            }
        }
    }
    let mut edges: Vec<String> = net
        .edges()
        .map(|e| {
            format!(
                "  edge {}:out:{} -- {}:in:{}",
                e.src, e.out_port, e.dst, e.in_port
            )
        })
        .collect();
    edges.sort();
    for e in edges {
        let _ = writeln!(s, "{e}");
    }
    for (name, port) in net.tags() {
        let _ = writeln!(s, "  tag {name} {}:{}:{}", port.node, port.dir.word(), port.index);
    }
    s.push_str("}\n");
    s
}

/// Canonical printer for a whole document (nets only are supported for
/// canonical output; rules round-trip through their nets).
pub fn print_nets(nets: &[(String, Net)]) -> String {
    let mut s = String::new();
    for (name, net) in nets {
        s.push_str(&print_net(name, net));
    }
    s
}

/// The canonical-roundtrip check: parse, print canonically, parse again,
/// confirm value identity and byte stability of a second print.
pub fn canonical_roundtrip(src: &str, alphabet: Option<&Alphabet>) -> Result<(bool, String)> {
    let doc = parse_document(src, alphabet)?;
    let printed = print_nets(&doc.nets);
    let doc2 = parse_document(&printed, alphabet)?;
    let printed2 = print_nets(&doc2.nets);
    let same_value = doc.nets.len() == doc2.nets.len()
        && doc
            .nets
            .iter()
            .zip(doc2.nets.iter())
            .all(|((an, a), (bn, b))| an == bn && a == b);
    Ok((same_value && printed == printed2, printed))
}

/// DOT export: nodes as `id:letter`, edges annotated `outI->inJ`, unoccupied
/// ports as labelled half-edges.
pub fn to_dot(name: &str, net: &Net) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{name}\" {{");
    let _ = writeln!(s, "  rankdir=BT;");
    for (id, info) in net.nodes() {
        let shape = match info.kind {
            LetterKind::Ranked => "box",
            LetterKind::Frontier => "ellipse",
        };
        let _ = writeln!(
            s,
            "  \"{id}\" [label=\"{id}:{}\", shape={shape}];",
            info.letter
        );
    }
    let mut edges: Vec<String> = net
        .edges()
        .map(|e| {
            format!(
                "  \"{}\" -> \"{}\" [label=\"out{}\\u{{2192}}in{}\"];",
                e.src, e.dst, e.out_port, e.in_port
            )
        })
        .collect();
    edges.sort();
    for e in edges {
        let _ = writeln!(s, "{e}");
    }
    for (i, p) in net.unoccupied_ports().into_iter().enumerate() {
        let tag = net.tag_of_port(&p).unwrap_or("");
        let _ = writeln!(
            s,
            "  \"__u{i}\" [label=\"{tag}\", shape=point];",
        );
        match p.dir {
            Direction::In => {
                let _ = writeln!(
                    s,
                    "  \"__u{i}\" -> \"{}\" [style=dashed, label=\"in{}\"];",
                    p.node, p.index
                );
            }
            Direction::Out => {
                let _ = writeln!(
                    s,
                    "  \"{}\" -> \"__u{i}\" [style=dashed, label=\"out{}\"];",
                    p.node, p.index
                );
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Alphabet file: `letter NAME in=K out=M`, `frontier NAME`,
/// `fresh-prefix P` lines.
pub fn parse_alphabet(src: &str) -> Result<Alphabet> {
    let mut a = Alphabet::new();
    let mut prefix: Option<String> = None;
    for (ln, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse {
            line: ln + 1,
            col: 1,
            msg: msg.to_string(),
        };
        match parts[0] {
            "letter" => {
                if parts.len() != 4 {
                    return Err(bad("expected `letter NAME in=K out=M`"));
                }
                let in_rank = parts[2]
                    .strip_prefix("in=")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad("expected in=K"))?;
                let out_rank = parts[3]
                    .strip_prefix("out=")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad("expected out=M"))?;
                a.add_ranked(parts[1], in_rank, out_rank)?;
            }
            "frontier" => {
                if parts.len() != 2 {
                    return Err(bad("expected `frontier NAME`"));
                }
                a.add_frontier(parts[1])?;
            }
            "fresh-prefix" => {
                if parts.len() != 2 {
                    return Err(bad("expected `fresh-prefix P`"));
                }
                prefix = Some(parts[1].to_string());
            }
            other => return Err(bad(&format!("unknown alphabet item `{other}`"))),
        }
    }
    if let Some(p) = prefix {
        a = a.with_fresh_prefix(&p);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{nets_equal, EqMode};
    use crate::net::fixtures::{d1, d2};

    const D1_SRC: &str = "\
# the f/a fixture
net d1 {
  node n1 f in=2 out=1
  node n2 a in=0 out=1
  edge n2:out:0 -- n1:in:0
}
";

    #[test]
    fn parse_d1() {
        let net = parse_single_net(D1_SRC, None).unwrap();
        assert!(nets_equal(&net, &d1(), EqMode::Strict));
    }

    #[test]
    fn canonical_roundtrip_stable() {
        let (ok, printed) = canonical_roundtrip(D1_SRC, None).unwrap();
        assert!(ok);
        // Reordered source prints to the same canonical bytes.
        let reordered = "net d1 {\n  node n2 a in=0 out=1\n  node n1 f in=2 out=1\n  edge n2:out:0 -- n1:in:0\n}\n";
        let (ok2, printed2) = canonical_roundtrip(reordered, None).unwrap();
        assert!(ok2);
        assert_eq!(printed, printed2);
    }

    #[test]
    fn malformed_edge_reports_location() {
        let bad = "net x {\n  node n1 f in=2 out=1\n  edge n1:out -- n1:in:0\n}\n";
        match parse_single_net(bad, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rule_and_rns_parse() {
        let src = "\
net L {
  node l f in=2 out=1
  tag t0 l:in:0
  tag t1 l:in:1
  tag t2 l:out:0
}
net R {
  node r h in=2 out=1
  tag t0 r:in:0
  tag t1 r:in:1
  tag t2 r:out:0
}
rule r1 { preform { left @L right @R } }
rns sys { rule r1 condition fresh-letters }
";
        let doc = parse_document(src, None).unwrap();
        assert_eq!(doc.rules.len(), 1);
        let sys = doc.system("sys").unwrap();
        assert_eq!(sys.rules.len(), 1);
        assert!(matches!(sys.conditions[0], Condition::FreshLetters));
    }

    #[test]
    fn free_text_condition_rejected() {
        let src = "rns sys { condition be-nice }";
        assert!(parse_document(src, None).is_err());
    }

    #[test]
    fn dot_export_mentions_ports() {
        let dot = to_dot("d2", &d2());
        assert!(dot.contains("digraph"));
        assert!(dot.contains("n1"));
        let dot1 = to_dot("d1", &d1());
        assert!(dot1.contains("style=dashed"));
    }

    #[test]
    fn alphabet_file() {
        let a = parse_alphabet("letter f in=2 out=1\nfrontier x\nfresh-prefix %\n").unwrap();
        assert!(a.contains("f"));
        assert!(a.contains("x"));
        assert_eq!(a.fresh_prefix(), "%");
        // Net validated against the alphabet rejects unknown letters.
        assert!(matches!(
            parse_single_net("net z { node n1 g in=1 out=1 }", Some(&a)),
            Err(Error::UnknownLetter(_))
        ));
    }
}
