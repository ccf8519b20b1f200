//! S-expression reader with source positions.
//!
//! Strings use SMT-LIB double-quote doubling; `#x...` atoms are 64-bit hex
//! words; symbols that parse as decimal integers become integer atoms.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Sym(String),
    Str(String),
    Int(i64),
    Bv(u64),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(Atom, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Atom(Atom::Sym(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(Atom::Sym(s), _) => write!(f, "{s}"),
            Sexp::Atom(Atom::Str(s), _) => {
                write!(f, "\"")?;
                for ch in s.chars() {
                    if ch == '"' {
                        write!(f, "\"\"")?;
                    } else {
                        write!(f, "{ch}")?;
                    }
                }
                write!(f, "\"")
            }
            Sexp::Atom(Atom::Int(n), _) => write!(f, "{n}"),
            Sexp::Atom(Atom::Bv(w), _) => write!(f, "#x{w:016x}"),
            Sexp::Atom(Atom::Bool(b), _) => write!(f, "{b}"),
            Sexp::List(items, _) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at {pos}: {msg}")]
pub struct SexpError {
    pub pos: Pos,
    pub msg: String,
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.chars.next()?;
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(ch)
    }

    fn skip_trivia(&mut self) {
        while let Some(&ch) = self.chars.peek() {
            if ch.is_whitespace() {
                self.bump();
            } else if ch == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> SexpError {
        SexpError {
            pos,
            msg: msg.into(),
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, SexpError> {
        self.skip_trivia();
        let pos = self.pos();
        let ch = match self.chars.peek() {
            Some(&c) => c,
            None => return Ok(None),
        };
        match ch {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, pos)));
                        }
                        Some(_) => match self.read()? {
                            Some(item) => items.push(item),
                            None => return Err(self.err(pos, "unclosed list")),
                        },
                        None => return Err(self.err(pos, "unclosed list")),
                    }
                }
            }
            ')' => Err(self.err(pos, "unexpected )")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                return Ok(Some(Sexp::Atom(Atom::Str(s), pos)));
                            }
                        }
                        Some(c) => s.push(c),
                        None => return Err(self.err(pos, "unterminated string")),
                    }
                }
            }
            _ => {
                let mut tok = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    tok.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(self.classify(tok, pos)?, pos)))
            }
        }
    }

    fn classify(&self, tok: String, pos: Pos) -> Result<Atom, SexpError> {
        if tok == "true" {
            return Ok(Atom::Bool(true));
        }
        if tok == "false" {
            return Ok(Atom::Bool(false));
        }
        if let Some(hex) = tok.strip_prefix("#x") {
            if hex.is_empty() || hex.len() > 16 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(self.err(pos, format!("bad 64-bit hex literal {tok}")));
            }
            return Ok(Atom::Bv(u64::from_str_radix(hex, 16).expect("hex checked")));
        }
        if tok.starts_with('#') {
            return Err(self.err(pos, format!("unsupported literal {tok}")));
        }
        let digits = tok.strip_prefix('-').unwrap_or(&tok);
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(n) = tok.parse::<i64>() {
                return Ok(Atom::Int(n));
            }
            return Err(self.err(pos, format!("integer literal {tok} out of range")));
        }
        Ok(Atom::Sym(tok))
    }
}

/// Reads every top-level form in the input.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    while let Some(sexp) = reader.read()? {
        out.push(sexp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_atoms_and_lists() {
        let forms = parse_all("(f \"a\"\"b\" -3 #x1f true x) ; comment\n()").unwrap();
        assert_eq!(forms.len(), 2);
        let items = forms[0].as_list().unwrap();
        assert_eq!(items[0].as_sym(), Some("f"));
        assert!(matches!(&items[1], Sexp::Atom(Atom::Str(s), _) if s == "a\"b"));
        assert!(matches!(items[2], Sexp::Atom(Atom::Int(-3), _)));
        assert!(matches!(items[3], Sexp::Atom(Atom::Bv(31), _)));
        assert!(matches!(items[4], Sexp::Atom(Atom::Bool(true), _)));
        assert!(matches!(&items[5], Sexp::Atom(Atom::Sym(s), _) if s == "x"));
    }

    #[test]
    fn reports_positions() {
        let err = parse_all("(a\n(b").unwrap_err();
        assert_eq!(err.pos.line, 2);
    }

    #[test]
    fn display_round_trips() {
        let text = "(f (g \"x\"\"\" 1) #x0000000000000001 true)";
        let forms = parse_all(text).unwrap();
        assert_eq!(parse_all(&forms[0].to_string()).unwrap(), forms);
    }

    #[test]
    fn minus_is_a_symbol_but_negative_numbers_are_ints() {
        let forms = parse_all("(- x 1) -7").unwrap();
        let items = forms[0].as_list().unwrap();
        assert_eq!(items[0].as_sym(), Some("-"));
        assert!(matches!(forms[1], Sexp::Atom(Atom::Int(-7), _)));
    }
}
