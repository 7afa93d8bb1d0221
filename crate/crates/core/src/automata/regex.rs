//! Regular expressions over alphabet tokens.
//!
//! Grammar (whitespace-separated tokens): operators `| * + ? ( )`, keywords
//! `eps` and `empty`, every other token a letter of the declared alphabet.
//! Precedence: postfix (`* + ?`) over concatenation (juxtaposition) over
//! union. `Display` prints the same grammar back, so parse → print → parse
//! is the identity on the canonical form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::Nfa;
use crate::words::{same_alphabet, Alphabet, Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegexParseError {
    #[error("token {position}: unexpected `{token}`")]
    UnexpectedToken { position: usize, token: String },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("token {position}: `{token}` is not in the alphabet")]
    UnknownToken { position: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Empty,
    Epsilon,
    Sym(Symbol),
    Concat(Vec<Node>),
    Union(Vec<Node>),
    Star(Box<Node>),
    Plus(Box<Node>),
    Opt(Box<Node>),
}

/// A regular expression tied to its alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regex {
    alphabet: Arc<Alphabet>,
    node: Node,
}



struct Cursor<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<&'a str> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
}

impl Regex {
    pub fn parse(text: &str, alphabet: &Arc<Alphabet>) -> Result<Regex, RegexParseError> {
        let mut cur = Cursor {
            toks: text.split_whitespace().collect(),
            pos: 0,
        };
        let node = parse_union(&mut cur, alphabet)?;
        if let Some(tok) = cur.peek() {
            return Err(RegexParseError::UnexpectedToken {
                position: cur.pos,
                token: tok.to_owned(),
            });
        }
        Ok(Regex {
            alphabet: Arc::clone(alphabet),
            node,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn empty(alphabet: &Arc<Alphabet>) -> Regex {
        Regex {
            alphabet: Arc::clone(alphabet),
            node: Node::Empty,
        }
    }

    pub fn epsilon(alphabet: &Arc<Alphabet>) -> Regex {
        Regex {
            alphabet: Arc::clone(alphabet),
            node: Node::Epsilon,
        }
    }

    pub fn symbol(alphabet: &Arc<Alphabet>, sym: Symbol) -> Regex {
        assert!(sym.id() < alphabet.len());
        Regex {
            alphabet: Arc::clone(alphabet),
            node: Node::Sym(sym),
        }
    }

    pub fn literal(word: &Word) -> Regex {
        let node = if word.is_empty() {
            Node::Epsilon
        } else if word.len() == 1 {
            Node::Sym(word.get(0))
        } else {
            Node::Concat(word.symbols().iter().map(|&s| Node::Sym(s)).collect())
        };
        Regex {
            alphabet: Arc::clone(word.alphabet()),
            node,
        }
    }

    pub fn concat(parts: Vec<Regex>) -> Regex {
        let alphabet = Arc::clone(&parts.first().expect("concat of no parts").alphabet);
        let mut nodes = Vec::new();
        for p in parts {
            assert!(same_alphabet(&alphabet, &p.alphabet));
            match p.node {
                Node::Concat(inner) => nodes.extend(inner),
                other => nodes.push(other),
            }
        }
        let node = if nodes.len() == 1 {
            nodes.pop().unwrap()
        } else {
            Node::Concat(nodes)
        };
        Regex { alphabet, node }
    }

    pub fn union(alphabet: &Arc<Alphabet>, parts: Vec<Regex>) -> Regex {
        let mut nodes = Vec::new();
        for p in parts {
            assert!(same_alphabet(alphabet, &p.alphabet));
            match p.node {
                Node::Union(inner) => nodes.extend(inner),
                other => nodes.push(other),
            }
        }
        let node = match nodes.len() {
            0 => Node::Empty,
            1 => nodes.pop().unwrap(),
            _ => Node::Union(nodes),
        };
        Regex {
            alphabet: Arc::clone(alphabet),
            node,
        }
    }

    pub fn star(self) -> Regex {
        Regex {
            alphabet: self.alphabet,
            node: Node::Star(Box::new(self.node)),
        }
    }

    pub fn plus(self) -> Regex {
        Regex {
            alphabet: self.alphabet,
            node: Node::Plus(Box::new(self.node)),
        }
    }

    pub fn optional(self) -> Regex {
        Regex {
            alphabet: self.alphabet,
            node: Node::Opt(Box::new(self.node)),
        }
    }

    pub fn to_nfa(&self) -> Nfa {
        node_to_nfa(&self.node, &self.alphabet)
    }
}

fn parse_union(cur: &mut Cursor, al: &Arc<Alphabet>) -> Result<Node, RegexParseError> {
    let mut parts = vec![parse_concat(cur, al)?];
    while cur.peek() == Some("|") {
        cur.bump();
        parts.push(parse_concat(cur, al)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Node::Union(parts)
    })
}

fn parse_concat(cur: &mut Cursor, al: &Arc<Alphabet>) -> Result<Node, RegexParseError> {
    let mut parts = vec![parse_postfix(cur, al)?];
    while let Some(tok) = cur.peek() {
        if tok == ")" || tok == "|" {
            break;
        }
        parts.push(parse_postfix(cur, al)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Node::Concat(parts)
    })
}

fn parse_postfix(cur: &mut Cursor, al: &Arc<Alphabet>) -> Result<Node, RegexParseError> {
    let mut node = parse_atom(cur, al)?;
    while let Some(tok) = cur.peek() {
        node = match tok {
            "*" => Node::Star(Box::new(node)),
            "+" => Node::Plus(Box::new(node)),
            "?" => Node::Opt(Box::new(node)),
            _ => break,
        };
        cur.bump();
    }
    Ok(node)
}

fn parse_atom(cur: &mut Cursor, al: &Arc<Alphabet>) -> Result<Node, RegexParseError> {
    let position = cur.pos;
    let tok = cur.bump().ok_or(RegexParseError::UnexpectedEnd)?;
    match tok {
        "(" => {
            let inner = parse_union(cur, al)?;
            let position = cur.pos;
            match cur.bump() {
                Some(")") => Ok(inner),
                Some(other) => Err(RegexParseError::UnexpectedToken {
                    position,
                    token: other.to_owned(),
                }),
                None => Err(RegexParseError::UnexpectedEnd),
            }
        }
        "eps" => Ok(Node::Epsilon),
        "empty" => Ok(Node::Empty),
        ")" | "|" | "*" | "+" | "?" => Err(RegexParseError::UnexpectedToken {
            position,
            token: tok.to_owned(),
        }),
        _ => al
            .symbol(tok)
            .map(Node::Sym)
            .ok_or_else(|| RegexParseError::UnknownToken {
                position,
                token: tok.to_owned(),
            }),
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.node, &self.alphabet, f, 0)
    }
}

/// `level`: 0 union context, 1 concatenation context, 2 postfix context.
fn fmt_node(n: &Node, al: &Alphabet, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
    match n {
        Node::Empty => write!(f, "empty"),
        Node::Epsilon => write!(f, "eps"),
        Node::Sym(s) => write!(f, "{}", al.token(*s)),
        Node::Union(parts) => {
            if level > 0 {
                write!(f, "( ")?;
            }
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " | ")?;
                }
                fmt_node(p, al, f, 1)?;
            }
            if level > 0 {
                write!(f, " )")?;
            }
            Ok(())
        }
        Node::Concat(parts) => {
            if level > 1 {
                write!(f, "( ")?;
            }
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                fmt_node(p, al, f, 2)?;
            }
            if level > 1 {
                write!(f, " )")?;
            }
            Ok(())
        }
        Node::Star(c) => {
            fmt_node(c, al, f, 2)?;
            write!(f, " *")
        }
        Node::Plus(c) => {
            fmt_node(c, al, f, 2)?;
            write!(f, " +")
        }
        Node::Opt(c) => {
            fmt_node(c, al, f, 2)?;
            write!(f, " ?")
        }
    }
}

fn node_to_nfa(n: &Node, al: &Arc<Alphabet>) -> Nfa {
    match n {
        Node::Empty => Nfa::empty_language(al),
        Node::Epsilon => Nfa::epsilon(al),
        Node::Sym(s) => Nfa::symbol(al, *s),
        Node::Concat(parts) => parts
            .iter()
            .map(|p| node_to_nfa(p, al))
            .reduce(|a, b| a.concat(&b))
            .unwrap_or_else(|| Nfa::epsilon(al)),
        Node::Union(parts) => parts
            .iter()
            .map(|p| node_to_nfa(p, al))
            .reduce(|a, b| a.union(&b))
            .unwrap_or_else(|| Nfa::empty_language(al)),
        Node::Star(c) => node_to_nfa(c, al).star(),
        Node::Plus(c) => node_to_nfa(c, al).plus(),
        Node::Opt(c) => node_to_nfa(c, al).optional(),
    }
}

fn nullable(n: &Node) -> bool {
    match n {
        Node::Empty | Node::Sym(_) => false,
        Node::Epsilon | Node::Star(_) | Node::Opt(_) => true,
        Node::Plus(c) => nullable(c),
        Node::Concat(parts) => parts.iter().all(nullable),
        Node::Union(parts) => parts.iter().any(nullable),
    }
}

fn union_smart(a: Node, b: Node) -> Node {
    if a == b {
        return a;
    }
    match (a, b) {
        (Node::Empty, x) | (x, Node::Empty) => x,
        (Node::Epsilon, x) | (x, Node::Epsilon) => {
            if nullable(&x) {
                x
            } else {
                Node::Opt(Box::new(x))
            }
        }
        (a, b) => {
            let mut parts = Vec::new();
            for n in [a, b] {
                match n {
                    Node::Union(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            parts.dedup();
            let mut uniq = Vec::new();
            for p in parts {
                if !uniq.contains(&p) {
                    uniq.push(p);
                }
            }
            if uniq.len() == 1 {
                uniq.pop().unwrap()
            } else {
                Node::Union(uniq)
            }
        }
    }
}

fn concat_smart(parts: Vec<Node>) -> Node {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Node::Empty => return Node::Empty,
            Node::Epsilon => {}
            Node::Concat(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Node::Epsilon,
        1 => out.pop().unwrap(),
        _ => Node::Concat(out),
    }
}

fn star_smart(n: Node) -> Node {
    match n {
        Node::Empty | Node::Epsilon => Node::Epsilon,
        Node::Star(c) => Node::Star(c),
        Node::Plus(c) | Node::Opt(c) => Node::Star(c),
        other => Node::Star(Box::new(other)),
    }
}

/// Synthesizes a regex for the automaton's language by state elimination.
/// Mostly used to print constructed constraint languages in a form the
/// parser reads back.
pub fn to_regex(nfa: &Nfa) -> Regex {
    let n = nfa.states();
    let start = n;
    let end = n + 1;
    let mut edges: HashMap<(usize, usize), Node> = HashMap::new();
    let add = |edges: &mut HashMap<(usize, usize), Node>, from: usize, to: usize, node: Node| {
        match edges.remove(&(from, to)) {
            Some(old) => {
                edges.insert((from, to), union_smart(old, node));
            }
            None => {
                edges.insert((from, to), node);
            }
        }
    };
    for (q, sym, t) in nfa.symbol_edges() {
        add(&mut edges, q, t, Node::Sym(sym));
    }
    for (q, t) in nfa.eps_edges() {
        add(&mut edges, q, t, Node::Epsilon);
    }
    for &i in nfa.initial() {
        add(&mut edges, start, i, Node::Epsilon);
    }
    for &a in nfa.accepting() {
        add(&mut edges, a, end, Node::Epsilon);
    }

    let mut alive: BTreeSet<usize> = (0..n).collect();
    while !alive.is_empty() {
        // cheapest state first: fewest new edges created
        let v = *alive
            .iter()
            .min_by_key(|&&v| {
                let ins = edges.keys().filter(|(f, t)| *t == v && *f != v).count();
                let outs = edges.keys().filter(|(f, t)| *f == v && *t != v).count();
                (ins * outs, v)
            })
            .unwrap();
        alive.remove(&v);
        let loop_rx = edges
            .remove(&(v, v))
            .map(star_smart)
            .unwrap_or(Node::Epsilon);
        let ins: Vec<(usize, Node)> = edges
            .keys()
            .filter(|(f, t)| *t == v && *f != v)
            .map(|&(f, _)| f)
            .collect::<Vec<_>>()
            .into_iter()
            .map(|f| (f, edges.remove(&(f, v)).unwrap()))
            .collect();
        let outs: Vec<(usize, Node)> = edges
            .keys()
            .filter(|(f, t)| *f == v && *t != v)
            .map(|&(_, t)| t)
            .collect::<Vec<_>>()
            .into_iter()
            .map(|t| (t, edges.remove(&(v, t)).unwrap()))
            .collect();
        for (p, rp) in &ins {
            for (q, rq) in &outs {
                let node = concat_smart(vec![rp.clone(), loop_rx.clone(), rq.clone()]);
                add(&mut edges, *p, *q, node);
            }
        }
    }
    let node = edges.remove(&(start, end)).unwrap_or(Node::Empty);
    Regex {
        alphabet: Arc::clone(nfa.alphabet()),
        node,
    }
}
