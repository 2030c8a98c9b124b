//! S-expressions in SMT-LIB concrete syntax.
//!
//! Terms, commands and solver responses all share this representation. The
//! printed form is canonical: single spaces between list elements, no
//! trailing whitespace, and atoms reproduced verbatim (quoted symbols and
//! string literals keep their delimiters).

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unexpected `)`")]
    UnexpectedClose { line: usize },
    #[error("line {line}: unclosed `(`")]
    Unclosed { line: usize },
    #[error("line {line}: unterminated {what}")]
    Unterminated { line: usize, what: &'static str },
    #[error("empty input")]
    Empty,
    #[error("line {line}: trailing input after expression")]
    Trailing { line: usize },
}

impl SExpr {
    pub fn atom(s: impl Into<String>) -> Self {
        SExpr::Atom(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = SExpr>) -> Self {
        SExpr::List(items.into_iter().collect())
    }

    /// `(head args...)`
    pub fn app(head: &str, args: impl IntoIterator<Item = SExpr>) -> Self {
        let mut items = vec![SExpr::atom(head)];
        items.extend(args);
        SExpr::List(items)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s) => Some(s),
            SExpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            SExpr::Atom(_) => None,
        }
    }

    /// Head symbol of an application, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn is_atom(&self, s: &str) -> bool {
        self.as_atom() == Some(s)
    }

    /// Height of the term tree, with atoms at height 0.
    pub fn height(&self) -> usize {
        match self {
            SExpr::Atom(_) => 0,
            SExpr::List(items) => 1 + items.iter().skip(1).map(SExpr::height).max().unwrap_or(0),
        }
    }

    /// Parses exactly one expression.
    pub fn parse(text: &str) -> Result<SExpr, ParseError> {
        let mut parser = Parser::new(text);
        let first = parser.next_expr()?.ok_or(ParseError::Empty)?;
        if parser.next_expr()?.is_some() {
            return Err(ParseError::Trailing { line: parser.line });
        }
        Ok(first)
    }

    /// Parses a sequence of expressions, returning each with its starting line.
    pub fn parse_all(text: &str) -> Result<Vec<(usize, SExpr)>, ParseError> {
        let mut parser = Parser::new(text);
        let mut out = Vec::new();
        loop {
            parser.skip_trivia();
            let line = parser.line;
            match parser.next_expr()? {
                Some(e) => out.push((line, e)),
                None => return Ok(out),
            }
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s) => f.write_str(s),
            SExpr::List(items) => {
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

/// Incremental reader over a character source; also used on solver output.
pub struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Parser<'a> {
    pub fn new(text: &'a str) -> Self {
        Parser { chars: text.chars().peekable(), line: 1 }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Next complete expression, or `None` at end of input.
    pub fn next_expr(&mut self) -> Result<Option<SExpr>, ParseError> {
        let mut stack: Vec<(usize, Vec<SExpr>)> = Vec::new();
        loop {
            self.skip_trivia();
            let Some(&c) = self.chars.peek() else {
                return match stack.last() {
                    Some((line, _)) => Err(ParseError::Unclosed { line: *line }),
                    None => Ok(None),
                };
            };
            let done = match c {
                '(' => {
                    self.bump();
                    stack.push((self.line, Vec::new()));
                    None
                }
                ')' => {
                    self.bump();
                    let (_, items) =
                        stack.pop().ok_or(ParseError::UnexpectedClose { line: self.line })?;
                    Some(SExpr::List(items))
                }
                _ => Some(SExpr::Atom(self.read_atom()?)),
            };
            if let Some(expr) = done {
                match stack.last_mut() {
                    Some((_, items)) => items.push(expr),
                    None => return Ok(Some(expr)),
                }
            }
        }
    }

    fn read_atom(&mut self) -> Result<String, ParseError> {
        let start_line = self.line;
        let mut s = String::new();
        match self.chars.peek() {
            Some('"') => {
                s.push(self.bump().unwrap());
                loop {
                    match self.bump() {
                        Some('"') => {
                            s.push('"');
                            // "" is an escaped quote inside a string literal
                            if self.chars.peek() == Some(&'"') {
                                s.push(self.bump().unwrap());
                            } else {
                                return Ok(s);
                            }
                        }
                        Some(c) => s.push(c),
                        None => {
                            return Err(ParseError::Unterminated { line: start_line, what: "string" })
                        }
                    }
                }
            }
            Some('|') => {
                s.push(self.bump().unwrap());
                loop {
                    match self.bump() {
                        Some('|') => {
                            s.push('|');
                            return Ok(s);
                        }
                        Some(c) => s.push(c),
                        None => {
                            return Err(ParseError::Unterminated {
                                line: start_line,
                                what: "quoted symbol",
                            })
                        }
                    }
                }
            }
            _ => {
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(s)
            }
        }
    }
}
