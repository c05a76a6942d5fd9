//! Recursive-descent parser for the concrete term syntax.
//!
//! Grammar (ASCII, with Unicode aliases in parentheses):
//!
//! ```text
//! term  := term "|" term1 (⊔)   | term1
//! term1 := term1 "&" term2 (⊓)  | term2
//! term2 := term2 "*" term3 (⋆)  | term3
//! term3 := term3 "^" (⋄)        | atom
//! atom  := letter | "0" | "1" | "T" (⊤) | "(" term ")"
//! ```
//!
//! Binary operators are left-associative, whitespace is insignificant and
//! letters match `[a-z][a-zA-Z0-9_]*`.

use std::collections::HashSet;

use super::{Letter, TermId, TermPool};

/// Syntax error with the byte offset it was detected at.
#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Top,
    Pipe,
    Amp,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '|' | '⊔' => {
                chars.next();
                toks.push((pos, Tok::Pipe));
            }
            '&' | '⊓' => {
                chars.next();
                toks.push((pos, Tok::Amp));
            }
            '*' | '⋆' => {
                chars.next();
                toks.push((pos, Tok::Star));
            }
            '^' | '⋄' => {
                chars.next();
                toks.push((pos, Tok::Caret));
            }
            '(' => {
                chars.next();
                toks.push((pos, Tok::LParen));
            }
            ')' => {
                chars.next();
                toks.push((pos, Tok::RParen));
            }
            '0' => {
                chars.next();
                toks.push((pos, Tok::Zero));
            }
            '1' => {
                chars.next();
                toks.push((pos, Tok::One));
            }
            'T' | '⊤' => {
                chars.next();
                toks.push((pos, Tok::Top));
            }
            c if c.is_ascii_lowercase() => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((pos, Tok::Ident(name)));
            }
            other => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    pool: &'a TermPool,
    alphabet: Option<&'a HashSet<Letter>>,
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(p, _)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos(),
            message: message.into(),
        }
    }

    fn join_level(&mut self) -> Result<TermId, ParseError> {
        let mut t = self.meet_level()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let r = self.meet_level()?;
            t = self.pool.join(t, r);
        }
        Ok(t)
    }

    fn meet_level(&mut self) -> Result<TermId, ParseError> {
        let mut t = self.comp_level()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let r = self.comp_level()?;
            t = self.pool.meet(t, r);
        }
        Ok(t)
    }

    fn comp_level(&mut self) -> Result<TermId, ParseError> {
        let mut t = self.postfix_level()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let r = self.postfix_level()?;
            t = self.pool.comp(t, r);
        }
        Ok(t)
    }

    fn postfix_level(&mut self) -> Result<TermId, ParseError> {
        let mut t = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            t = self.pool.diamond(t);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<TermId, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(name)) => {
                let l = self.pool.letter(&name).map_err(|e| ParseError {
                    position: pos,
                    message: e.to_string(),
                })?;
                if let Some(alphabet) = self.alphabet {
                    if !alphabet.contains(&l) {
                        return Err(ParseError {
                            position: pos,
                            message: format!("unknown letter {name:?}"),
                        });
                    }
                }
                Ok(self.pool.atom(l))
            }
            Some(Tok::Zero) => Ok(self.pool.zero()),
            Some(Tok::One) => Ok(self.pool.one()),
            Some(Tok::Top) => Ok(self.pool.top()),
            Some(Tok::LParen) => {
                let t = self.join_level()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(t),
                    _ => Err(ParseError {
                        position: self.toks.get(self.at - 1).map(|&(p, _)| p).unwrap_or(self.end),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(other) => Err(ParseError {
                position: pos,
                message: format!("expected a term, found {other:?}"),
            }),
            None => Err(ParseError {
                position: pos,
                message: "expected a term, found end of input".into(),
            }),
        }
    }
}

pub(super) fn parse(
    pool: &TermPool,
    text: &str,
    alphabet: Option<&HashSet<Letter>>,
) -> Result<TermId, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        pool,
        alphabet,
        toks,
        at: 0,
        end: text.len(),
    };
    let t = p.join_level()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}
