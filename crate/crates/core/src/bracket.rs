//! Word and set bracketings and their tree correspondences.
//!
//! Word bracketings follow the usual convention: no brackets around the whole
//! word or around single letters, so `(xx)(xx)` is the two-cherry tree and
//! `x` is a single leaf. Set bracketings use a strict fully braced grammar,
//! `S := Label | '{' S (',' S)+ '}'`, with braces around the root as soon as
//! there are two or more labels. Whitespace is never accepted.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::Tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BracketingKind {
    WordBinary,
    WordGeneral,
    SetBinary,
    SetGeneral,
}

impl BracketingKind {
    pub const ALL: [BracketingKind; 4] = [
        BracketingKind::WordBinary,
        BracketingKind::WordGeneral,
        BracketingKind::SetBinary,
        BracketingKind::SetGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BracketingKind::WordBinary => "word-binary",
            BracketingKind::WordGeneral => "word-general",
            BracketingKind::SetBinary => "set-binary",
            BracketingKind::SetGeneral => "set-general",
        }
    }

    pub fn is_word(self) -> bool {
        matches!(self, BracketingKind::WordBinary | BracketingKind::WordGeneral)
    }

    pub fn is_binary(self) -> bool {
        matches!(self, BracketingKind::WordBinary | BracketingKind::SetBinary)
    }

    /// Checks that `t` is a tree this kind of bracketing can describe.
    pub fn check(self, t: &Tree) -> Result<()> {
        let violation = |msg: &str| Error::KindViolation { kind: self.name(), msg: msg.into() };
        if self.is_word() && t.is_labeled() {
            return Err(violation("word bracketings describe unlabeled trees"));
        }
        if !self.is_word() {
            if !t.is_labeled() {
                return Err(violation("set bracketings describe labeled trees"));
            }
            t.validate()?;
        }
        if t.has_unary_vertex() {
            return Err(violation("vertex with out-degree one"));
        }
        if self.is_binary() && !t.is_binary() {
            return Err(violation("vertex with out-degree other than two"));
        }
        Ok(())
    }

    pub fn parse(self, s: &str) -> Result<Tree> {
        if self.is_word() {
            parse_word(s, self)
        } else {
            let t = parse_set(s)?;
            self.check(&t)?;
            Ok(t)
        }
    }

    pub fn serialize(self, t: &Tree) -> Result<String> {
        if self.is_word() {
            serialize_word(t, self)
        } else {
            self.check(t)?;
            serialize_set(t)
        }
    }
}

impl fmt::Display for BracketingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BracketingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BracketingKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("unknown bracketing kind '{s}'") })
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl WordParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    /// Items up to the next `)` or the end of input.
    fn items(&mut self) -> Result<Vec<Tree>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None | Some(b')') => return Ok(out),
                Some(b'x') => {
                    self.pos += 1;
                    out.push(Tree::leaf());
                }
                Some(b'(') => {
                    let open = self.pos;
                    self.pos += 1;
                    let inner = self.items()?;
                    if self.peek() != Some(b')') {
                        return Err(syntax(open, "unbalanced '('"));
                    }
                    self.pos += 1;
                    match inner.len() {
                        0 => return Err(syntax(open, "empty brackets")),
                        1 => return Err(syntax(open, "bracket around a single item (out-degree one)")),
                        _ => out.push(Tree::node(inner)),
                    }
                }
                Some(c) => return Err(syntax(self.pos, format!("unexpected character {:?}", c as char))),
            }
        }
    }
}

/// Parses a word bracketing into its ordered unlabeled tree.
pub fn parse_word(s: &str, kind: BracketingKind) -> Result<Tree> {
    if !kind.is_word() {
        return Err(Error::KindViolation { kind: kind.name(), msg: "not a word bracketing kind".into() });
    }
    let mut p = WordParser { src: s.as_bytes(), pos: 0 };
    let items = p.items()?;
    if p.pos < s.len() {
        return Err(syntax(p.pos, "unbalanced ')'"));
    }
    let tree = match items.len() {
        0 => return Err(syntax(0, "empty word")),
        1 if s == "x" => Tree::leaf(),
        1 => return Err(syntax(0, "the whole word is a single bracket (out-degree one at the root)")),
        _ => Tree::node(items),
    };
    kind.check(&tree)?;
    Ok(tree)
}

/// Writes the word bracketing of an ordered unlabeled tree.
pub fn serialize_word(t: &Tree, kind: BracketingKind) -> Result<String> {
    if !kind.is_word() {
        return Err(Error::KindViolation { kind: kind.name(), msg: "not a word bracketing kind".into() });
    }
    kind.check(t)?;
    if t.is_leaf() {
        return Ok("x".into());
    }
    let mut out = String::with_capacity(3 * t.leaf_count());
    for c in t.children() {
        write_word_item(c, &mut out);
    }
    Ok(out)
}

fn write_word_item(t: &Tree, out: &mut String) {
    if t.is_leaf() {
        out.push('x');
        return;
    }
    out.push('(');
    for c in t.children() {
        write_word_item(c, out);
    }
    out.push(')');
}

struct SetParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl SetParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn group(&mut self) -> Result<Tree> {
        match self.peek() {
            Some(b'{') => {
                let open = self.pos;
                self.pos += 1;
                let mut kids = vec![self.group()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    kids.push(self.group()?);
                }
                match self.peek() {
                    Some(b'}') => self.pos += 1,
                    None => return Err(syntax(open, "unbalanced '{'")),
                    Some(c) => {
                        return Err(syntax(self.pos, format!("expected ',' or '}}', found {:?}", c as char)))
                    }
                }
                if kids.len() == 1 {
                    return Err(syntax(open, "singleton group (out-degree one)"));
                }
                Ok(Tree::node(kids))
            }
            Some(b'1'..=b'9') => {
                let start = self.pos;
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let label: u32 = digits.parse().map_err(|_| syntax(start, "label out of range"))?;
                Ok(Tree::labeled_leaf(label))
            }
            Some(b'0') => Err(syntax(self.pos, "labels are positive and have no leading zeros")),
            Some(c) => Err(syntax(self.pos, format!("unexpected character {:?}", c as char))),
            None => Err(syntax(self.pos, "unexpected end of input")),
        }
    }
}

/// Parses a set bracketing into its canonical leaf-labeled tree.
pub fn parse_set(s: &str) -> Result<Tree> {
    let mut p = SetParser { src: s.as_bytes(), pos: 0 };
    let tree = p.group()?;
    if p.pos < s.len() {
        return Err(syntax(p.pos, "trailing input after the top-level group"));
    }
    tree.validate()?;
    Ok(tree.canonicalize())
}

/// Writes the canonical set bracketing of a leaf-labeled tree.
pub fn serialize_set(t: &Tree) -> Result<String> {
    if !t.is_labeled() {
        return Err(Error::Labels("set bracketings need a labeled tree".into()));
    }
    t.validate()?;
    if t.has_unary_vertex() {
        return Err(Error::InvalidTree("vertex with out-degree one".into()));
    }
    let mut out = String::new();
    write_set(&t.canonicalize(), &mut out);
    Ok(out)
}

fn write_set(t: &Tree, out: &mut String) {
    if let Some(l) = t.label() {
        out.push_str(&l.to_string());
        return;
    }
    out.push('{');
    for (i, c) in t.children().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_set(c, out);
    }
    out.push('}');
}
