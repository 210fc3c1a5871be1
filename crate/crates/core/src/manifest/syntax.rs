//! The block layer of the manifest format:
//!
//! ```text
//! # comment
//! kind [label] {
//!     key: value
//!     inner [label] { ... }
//! }
//! ```
//!
//! A value is a double-quoted string, a bare word or a bracketed list of
//! values separated by optional commas.

use super::expr::Pos;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String, Pos),
    Word(String, Pos),
    List(Vec<Value>, Pos),
}

impl Value {
    pub fn pos(&self) -> Pos {
        match self {
            Value::Str(_, p) | Value::Word(_, p) | Value::List(_, p) => *p,
        }
    }

    /// Text of a string or word.
    pub fn text(&self) -> Result<&str> {
        match self {
            Value::Str(s, _) | Value::Word(s, _) => Ok(s),
            Value::List(_, p) => p.err("expected a single value, found a list"),
        }
    }

    /// Position of the first character of the text.
    pub fn text_pos(&self) -> Pos {
        match self {
            Value::Str(_, p) => Pos::new(p.line, p.col + 1),
            v => v.pos(),
        }
    }

    pub fn items(&self) -> Result<&[Value]> {
        match self {
            Value::List(v, _) => Ok(v),
            v => v.pos().err("expected a list"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub pos: Pos,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub kind: String,
    pub label: Option<String>,
    pub pos: Pos,
    pub entries: Vec<Entry>,
    pub blocks: Vec<Block>,
}

impl Block {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|e| e.key == key).map(|e| &e.value)
    }

    pub fn require(&self, key: &str) -> Result<&Value> {
        match self.get(key) {
            Some(v) => Ok(v),
            None => self.pos.err(format!("`{}` block needs `{key}`", self.kind)),
        }
    }

    pub fn block(&self, kind: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Str(String),
    Word(String),
    Punct(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut it = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = it.peek() {
        let pos = Pos::new(line, col);
        match c {
            '\n' => {
                it.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                it.next();
                col += 1;
            }
            '#' => {
                while it.peek().is_some_and(|&c| c != '\n') {
                    it.next();
                }
            }
            '{' | '}' | '[' | ']' | ':' | ',' => {
                it.next();
                col += 1;
                out.push((Tok::Punct(c), pos));
            }
            '"' => {
                it.next();
                col += 1;
                let mut s = String::new();
                loop {
                    match it.next() {
                        None => return pos.err("unterminated string"),
                        Some('"') => {
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            col += 2;
                            match it.next() {
                                Some('n') => s.push('\n'),
                                Some(e @ ('"' | '\\')) => s.push(e),
                                _ => return Pos::new(line, col - 2).err("bad escape"),
                            }
                        }
                        Some('\n') => {
                            s.push('\n');
                            line += 1;
                            col = 1;
                        }
                        Some(ch) => {
                            s.push(ch);
                            col += 1;
                        }
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = it.peek() {
                    if ch.is_whitespace() || "{}[]:,#\"".contains(ch) {
                        break;
                    }
                    s.push(ch);
                    it.next();
                    col += 1;
                }
                out.push((Tok::Word(s), pos));
            }
        }
    }
    out.push((Tok::End, Pos::new(line, col)));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.bump() {
            (Tok::Punct(p), _) if p == c => Ok(()),
            (t, pos) => pos.err(format!("expected `{c}`, found {}", describe(&t))),
        }
    }

    fn word(&mut self) -> Result<(String, Pos)> {
        match self.bump() {
            (Tok::Word(w), p) => Ok((w, p)),
            (t, p) => p.err(format!("expected a name, found {}", describe(&t))),
        }
    }

    fn block(&mut self) -> Result<Block> {
        let (kind, pos) = self.word()?;
        let label = match self.peek(0) {
            Tok::Word(_) | Tok::Str(_) => match self.bump() {
                (Tok::Word(w) | Tok::Str(w), _) => Some(w),
                _ => unreachable!(),
            },
            _ => None,
        };
        self.expect('{')?;
        let mut b = Block {
            kind,
            label,
            pos,
            entries: Vec::new(),
            blocks: Vec::new(),
        };
        loop {
            match (self.peek(0), self.peek(1)) {
                (Tok::Punct('}'), _) => {
                    self.bump();
                    return Ok(b);
                }
                (Tok::Word(_), Tok::Punct(':')) => {
                    let (key, kpos) = self.word()?;
                    self.bump();
                    let value = self.value()?;
                    b.entries.push(Entry {
                        key,
                        pos: kpos,
                        value,
                    });
                }
                (Tok::Word(_), _) => b.blocks.push(self.block()?),
                (t, _) => {
                    return self
                        .pos()
                        .err(format!("expected an entry or `}}`, found {}", describe(t)))
                }
            }
        }
    }

    fn value(&mut self) -> Result<Value> {
        match self.bump() {
            (Tok::Str(s), p) => Ok(Value::Str(s, p)),
            (Tok::Word(w), p) => Ok(Value::Word(w, p)),
            (Tok::Punct('['), p) => {
                let mut items = Vec::new();
                loop {
                    match self.peek(0) {
                        Tok::Punct(']') => {
                            self.bump();
                            return Ok(Value::List(items, p));
                        }
                        Tok::Punct(',') => {
                            self.bump();
                        }
                        _ => items.push(self.value()?),
                    }
                }
            }
            (t, p) => p.err(format!("expected a value, found {}", describe(&t))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Word(w) => format!("`{w}`"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Top-level blocks in source order.
pub fn parse_blocks(src: &str) -> Result<Vec<Block>> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let mut out = Vec::new();
    while p.peek(0) != &Tok::End {
        out.push(p.block()?);
    }
    Ok(out)
}
