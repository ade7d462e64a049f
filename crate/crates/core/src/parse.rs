//! Text syntax for terms.
//!
//! ```text
//! term  := item { "+" item }
//! item  := "empty" | "pt[" ident* "]" | "w(" term ")" | "w*(" term ")"
//!        | "z(" term ")" | "sh(" term { "," term } ")" | "(" term ")"
//!        | "fin(" nat ")" | "eta" | "omega" | "zeta"
//! ```

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CloError, Result};
use crate::term::Term;

/// Parses and canonicalizes a term.
pub fn parse(text: &str) -> Result<Term> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(t)
}

/// Canonical text of a term; `parse(&print(t)) == t` for canonical `t`.
pub fn print(t: &Term) -> String {
    t.to_string()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Empty => write!(f, "empty"),
            Term::Pt(c) => {
                write!(f, "pt[")?;
                for (i, name) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{name}")?;
                }
                write!(f, "]")
            }
            Term::Sum(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Term::Omega(b) => write!(f, "w({b})"),
            Term::OmegaStar(b) => write!(f, "w*({b})"),
            Term::Zeta(b) => write!(f, "z({b})"),
            Term::Shuffle(args) => {
                write!(f, "sh(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses a term file: one term per line, optionally as `name = term`.
/// Blank lines and `#` comments are skipped. Unnamed terms are named by
/// their line number.
pub fn parse_term_file(text: &str) -> Result<Vec<(String, Term)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, body) = match line.split_once('=') {
            Some((n, b)) if is_ident(n.trim()) => (n.trim().to_string(), b),
            _ => (format!("line{}", lineno + 1), line),
        };
        let t = parse(body).map_err(|e| match e {
            CloError::Syntax { pos, msg } => CloError::Syntax {
                pos,
                msg: format!("line {}: {msg}", lineno + 1),
            },
            CloError::Arity { pos, msg } => CloError::Arity {
                pos,
                msg: format!("line {}: {msg}", lineno + 1),
            },
            other => other,
        })?;
        out.push((name, t));
    }
    Ok(out)
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(is_ident_byte)
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> CloError {
        CloError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", b as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && is_ident_byte(self.src[self.pos]) {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term> {
        let mut parts = vec![self.item()?];
        while self.eat(b'+') {
            parts.push(self.item()?);
        }
        Ok(Term::sum(parts))
    }

    fn item(&mut self) -> Result<Term> {
        let start = {
            self.skip_ws();
            self.pos
        };
        if self.eat(b'(') {
            let t = self.term()?;
            self.expect(b')')?;
            return Ok(t);
        }
        let Some(word) = self.ident() else {
            return Err(self.syntax("expected a term"));
        };
        match word.as_str() {
            "empty" => Ok(Term::Empty),
            "eta" => Ok(Term::eta()),
            "omega" => Ok(Term::omega()),
            "zeta" => Ok(Term::zeta()),
            "pt" => {
                self.expect(b'[')?;
                let mut colors = Vec::new();
                while let Some(c) = self.ident() {
                    colors.push(c);
                }
                self.expect(b']')?;
                Ok(Term::pt(colors))
            }
            "w" => {
                let star = self.eat(b'*');
                let body = self.parenthesized()?;
                Ok(if star { Term::omega_star_of(body) } else { Term::omega_of(body) })
            }
            "z" => Ok(Term::zeta_of(self.parenthesized()?)),
            "sh" => {
                self.expect(b'(')?;
                if self.peek() == Some(b')') {
                    return Err(CloError::Arity { pos: self.pos, msg: "shuffle needs at least one argument".into() });
                }
                let mut args = vec![self.term()?];
                while self.eat(b',') {
                    args.push(self.term()?);
                }
                self.expect(b')')?;
                Ok(Term::shuffle(args))
            }
            "fin" => {
                self.expect(b'(')?;
                let digits = self.ident().filter(|d| d.bytes().all(|b| b.is_ascii_digit()));
                let n: usize = digits
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| self.syntax("expected a natural number"))?;
                self.expect(b')')?;
                Ok(Term::fin(n))
            }
            _ => {
                self.pos = start;
                Err(self.syntax(&format!("unknown constructor '{word}'")))
            }
        }
    }

    fn parenthesized(&mut self) -> Result<Term> {
        self.expect(b'(')?;
        let t = self.term()?;
        self.expect(b')')?;
        Ok(t)
    }
}
