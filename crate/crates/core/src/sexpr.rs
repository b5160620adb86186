//! Minimal s-expression reader and writer.
//!
//! Shared by the policy surface syntax, route-value literals in network spec
//! files, and the SMT solver output parser.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("unexpected `)` at byte {0}")]
    UnexpectedClose(usize),
    #[error("unterminated quoted symbol starting at byte {0}")]
    UnterminatedQuote(usize),
    #[error("trailing input after expression at byte {0}")]
    Trailing(usize),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Self {
        Sexpr::Atom(s.into())
    }

    pub fn list(items: Vec<Sexpr>) -> Self {
        Sexpr::List(items)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            Sexpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items) => Some(items),
            Sexpr::Atom(_) => None,
        }
    }

    /// The head symbol of a non-empty list, e.g. `add` in `(add x 1)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexpr::as_atom)
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                b';' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn read(&mut self) -> Result<Sexpr, SexprError> {
        self.skip_ws();
        let Some(&c) = self.src.get(self.pos) else {
            return Err(SexprError::UnexpectedEof);
        };
        match c {
            b'(' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        None => return Err(SexprError::UnexpectedEof),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexpr::List(items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            b')' => Err(SexprError::UnexpectedClose(self.pos)),
            b'|' => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos] != b'|' {
                    self.pos += 1;
                }
                if self.pos >= self.src.len() {
                    return Err(SexprError::UnterminatedQuote(start));
                }
                let inner = &self.text[start + 1..self.pos];
                self.pos += 1;
                Ok(Sexpr::Atom(inner.to_string()))
            }
            b'"' => {
                let start = self.pos;
                self.pos += 1;
                loop {
                    match self.src.get(self.pos) {
                        None => return Err(SexprError::UnterminatedQuote(start)),
                        // SMT-LIB escapes a quote inside a string by doubling it.
                        Some(b'"') if self.src.get(self.pos + 1) == Some(&b'"') => self.pos += 2,
                        Some(b'"') => break,
                        Some(_) => self.pos += 1,
                    }
                }
                self.pos += 1;
                Ok(Sexpr::Atom(self.text[start..self.pos].to_string()))
            }
            _ => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    match self.src[self.pos] {
                        b' ' | b'\t' | b'\n' | b'\r' | b'(' | b')' | b';' => break,
                        _ => self.pos += 1,
                    }
                }
                Ok(Sexpr::Atom(self.text[start..self.pos].to_string()))
            }
        }
    }
}

/// Parses exactly one expression; trailing non-whitespace is an error.
pub fn parse(text: &str) -> Result<Sexpr, SexprError> {
    let mut r = Reader { src: text.as_bytes(), text, pos: 0 };
    let e = r.read()?;
    if !r.at_end() {
        return Err(SexprError::Trailing(r.pos));
    }
    Ok(e)
}

/// Parses a sequence of expressions (e.g. a solver's whole stdout).
pub fn parse_all(text: &str) -> Result<Vec<Sexpr>, SexprError> {
    let mut r = Reader { src: text.as_bytes(), text, pos: 0 };
    let mut out = Vec::new();
    while !r.at_end() {
        out.push(r.read()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists() {
        let e = parse("(match r (none) ((some h) (+ h 1)))").unwrap();
        assert_eq!(e.head(), Some("match"));
        assert_eq!(e.to_string(), "(match r (none) ((some h) (+ h 1)))");
    }

    #[test]
    fn comments_and_quoted_symbols() {
        let all = parse_all("sat ; done\n((|a b| 3) (x (- 2)))").unwrap();
        assert_eq!(all.len(), 2);
        let pairs = all[1].as_list().unwrap();
        assert_eq!(pairs[0].as_list().unwrap()[0], Sexpr::atom("a b"));
    }

    #[test]
    fn errors() {
        assert_eq!(parse("(a b"), Err(SexprError::UnexpectedEof));
        assert_eq!(parse(")"), Err(SexprError::UnexpectedClose(0)));
        assert!(matches!(parse("a b"), Err(SexprError::Trailing(_))));
    }
}
