//! S-expression reader with source positions.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The head atom of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|l| l.first())
            .and_then(SExpr::as_atom)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pos}: expected {expected}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub expected: String,
}

/// Reads every top-level expression. `;` starts a comment running to the
/// end of the line.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, SyntaxError> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    loop {
        r.skip_blank();
        match r.chars.peek() {
            None => return Ok(out),
            Some(')') => {
                return Err(SyntaxError {
                    pos: r.pos,
                    expected: "an expression, found `)`".into(),
                })
            }
            Some(_) => out.push(r.expr()?),
        }
    }
}

/// Reads exactly one expression.
pub fn read_one(text: &str) -> Result<SExpr, SyntaxError> {
    let mut all = read_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(SyntaxError {
            pos: Pos { line: 1, col: 1 },
            expected: "an expression".into(),
        }),
        _ => Err(SyntaxError {
            pos: all[1].pos(),
            expected: "end of input".into(),
        }),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<SExpr, SyntaxError> {
        let start = self.pos;
        if self.chars.peek() == Some(&'(') {
            self.bump();
            let mut items = Vec::new();
            loop {
                self.skip_blank();
                match self.chars.peek() {
                    None => {
                        return Err(SyntaxError {
                            pos: self.pos,
                            expected: format!("`)` closing the list opened at {start}"),
                        })
                    }
                    Some(')') => {
                        self.bump();
                        return Ok(SExpr::List(items, start));
                    }
                    Some(_) => items.push(self.expr()?),
                }
            }
        }
        let mut atom = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                break;
            }
            atom.push(c);
            self.bump();
        }
        Ok(SExpr::Atom(atom, start))
    }
}
