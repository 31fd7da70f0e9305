//! N-Triples reader and term writer.
//!
//! Lines are parsed independently, so large inputs are split across the
//! rayon pool. Output order always follows input order.

use std::fmt::Write as _;
use std::io::Read;

use rayon::prelude::*;

use super::{Literal, Resource, RDF_LANG_STRING, XSD_STRING};
use crate::error::{Error, Result};

/// How malformed lines are handled.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum ParseMode {
    #[default]
    Strict,
    /// Skip malformed lines and count them.
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTriple {
    pub subject: Resource,
    pub predicate: Resource,
    pub object: Resource,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Debug, Default)]
pub struct ParsedTriples {
    pub triples: Vec<RawTriple>,
    /// Malformed lines skipped in lenient mode.
    pub skipped: usize,
    /// First few skipped-line errors, for diagnostics.
    pub errors: Vec<Error>,
}

const LINES_PER_CHUNK: usize = 4096;

pub fn parse_ntriples<R: Read>(mut source: R, mode: ParseMode) -> Result<ParsedTriples> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| {
        if e.kind() == std::io::ErrorKind::InvalidData {
            Error::Parse {
                line: 0,
                message: "input is not valid UTF-8".into(),
            }
        } else {
            Error::Io(e)
        }
    })?;
    parse_str(&text, mode)
}

pub(crate) fn parse_str(text: &str, mode: ParseMode) -> Result<ParsedTriples> {
    let lines: Vec<&str> = text.lines().collect();
    let chunks: Vec<Vec<std::result::Result<Option<RawTriple>, Error>>> = lines
        .par_chunks(LINES_PER_CHUNK)
        .enumerate()
        .map(|(chunk, lines)| {
            lines
                .iter()
                .enumerate()
                .map(|(i, line)| parse_line(line, chunk * LINES_PER_CHUNK + i + 1))
                .collect()
        })
        .collect();

    let mut out = ParsedTriples::default();
    for result in chunks.into_iter().flatten() {
        match result {
            Ok(Some(t)) => out.triples.push(t),
            Ok(None) => {}
            Err(e) if mode == ParseMode::Lenient => {
                out.skipped += 1;
                if out.errors.len() < 16 {
                    out.errors.push(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn parse_line(line: &str, number: usize) -> Result<Option<RawTriple>> {
    let mut cur = Cursor {
        src: line,
        pos: 0,
        line: number,
    };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Resource::Iri(cur.iri()?),
        Some('_') => Resource::Blank(cur.blank()?),
        Some('"') => return Err(Error::LiteralSubject { line: number }),
        _ => return Err(cur.error("expected subject")),
    };
    cur.skip_ws();
    let predicate = match cur.peek() {
        Some('<') => Resource::Iri(cur.iri()?),
        _ => return Err(cur.error("expected predicate IRI")),
    };
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => Resource::Iri(cur.iri()?),
        Some('_') => Resource::Blank(cur.blank()?),
        Some('"') => Resource::Literal(cur.literal()?),
        _ => return Err(cur.error("expected object")),
    };
    cur.skip_ws();
    if cur.bump() != Some('.') {
        return Err(cur.error("expected '.'"));
    }
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') => Ok(Some(RawTriple {
            subject,
            predicate,
            object,
            line: number,
        })),
        Some(_) => Err(cur.error("trailing content after '.'")),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            line: self.line,
            message: format!("{message} at column {}", self.pos + 1),
        }
    }

    fn iri(&mut self) -> Result<String> {
        self.bump(); // '<'
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(out),
                Some('\\') => out.push(self.uchar()?),
                Some('<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error("invalid character in IRI"))
                }
                Some(c) if (c as u32) <= 0x20 => return Err(self.error("whitespace or control character in IRI")),
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
    }

    fn blank(&mut self) -> Result<String> {
        self.bump();
        if self.bump() != Some(':') {
            return Err(self.error("expected ':' in blank node label"));
        }
        let start = self.pos;
        let label_char = |c: char| c.is_alphanumeric() || matches!(c, '_' | '-');
        while let Some(c) = self.peek() {
            // '.' is allowed inside a label but never as its last character
            if label_char(c) || (c == '.' && self.peek2().is_some_and(|n| label_char(n) || n == '.')) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let label = &self.src[start..self.pos];
        if label.is_empty() || label.ends_with('.') {
            return Err(self.error("invalid blank node label"));
        }
        Ok(label.to_owned())
    }

    fn literal(&mut self) -> Result<Literal> {
        self.bump(); // '"'
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('t') => lexical.push('\t'),
                    Some('b') => lexical.push('\u{8}'),
                    Some('n') => lexical.push('\n'),
                    Some('r') => lexical.push('\r'),
                    Some('f') => lexical.push('\u{c}'),
                    Some('"') => lexical.push('"'),
                    Some('\'') => lexical.push('\''),
                    Some('\\') => lexical.push('\\'),
                    Some('u') => lexical.push(self.hex(4)?),
                    Some('U') => lexical.push(self.hex(8)?),
                    _ => return Err(self.error("invalid escape sequence")),
                },
                Some(c) => lexical.push(c),
                None => return Err(self.error("unterminated literal")),
            }
        }
        match self.peek() {
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') || self.peek() != Some('<') {
                    return Err(self.error("expected '^^<datatype>'"));
                }
                let datatype = self.iri()?;
                Ok(Literal {
                    lexical,
                    datatype,
                    language: None,
                })
            }
            Some('@') => {
                self.bump();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                let tag = &self.src[start..self.pos];
                if tag.is_empty() || !tag.as_bytes()[0].is_ascii_alphabetic() {
                    return Err(self.error("invalid language tag"));
                }
                Ok(Literal {
                    lexical,
                    datatype: RDF_LANG_STRING.to_owned(),
                    language: Some(tag.to_owned()),
                })
            }
            _ => Ok(Literal {
                lexical,
                datatype: XSD_STRING.to_owned(),
                language: None,
            }),
        }
    }

    fn uchar(&mut self) -> Result<char> {
        match self.bump() {
            Some('u') => self.hex(4),
            Some('U') => self.hex(8),
            _ => Err(self.error("invalid escape in IRI")),
        }
    }

    fn hex(&mut self, digits: usize) -> Result<char> {
        let mut v = 0u32;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid hex escape"))?;
            v = v * 16 + d;
        }
        char::from_u32(v).ok_or_else(|| self.error("escape is not a scalar value"))
    }
}

/// Appends `term` in N-Triples syntax.
pub fn write_term(out: &mut String, term: &Resource) {
    match term {
        Resource::Iri(iri) => write_iri(out, iri),
        Resource::Blank(label) => {
            out.push_str("_:");
            out.push_str(label);
        }
        Resource::Literal(lit) => {
            out.push('"');
            for c in lit.lexical.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    c => out.push(c),
                }
            }
            out.push('"');
            if let Some(lang) = &lit.language {
                out.push('@');
                out.push_str(lang);
            } else if lit.datatype != XSD_STRING {
                out.push_str("^^");
                write_iri(out, &lit.datatype);
            }
        }
    }
}

fn write_iri(out: &mut String, iri: &str) {
    out.push('<');
    for c in iri.chars() {
        if (c as u32) <= 0x20 || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out.push('>');
}
