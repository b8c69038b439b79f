//! Parser for the condition grammar used in model documents and CLI flags.
//!
//! ```text
//! cond := or
//! or   := and ("||" and)*
//! and  := not ("&&" not)*
//! not  := "!" not | "(" cond ")" | atom | "true" | "false"
//! atom := IDENT "=" IDENT
//! ```
//!
//! Whitespace is insignificant; `!` binds tighter than `&&`, which binds
//! tighter than `||`. The parser is the inverse of
//! [`domo_core::condition::Condition`]'s display form.

use std::fmt;

use domo_core::condition::Condition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondError {
    /// Byte offset into the condition string.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for CondError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

pub fn parse_condition(text: &str) -> Result<Condition, CondError> {
    let mut parser = CondParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    parser.skip_whitespace();
    let cond = parser.parse_or()?;
    parser.skip_whitespace();
    if parser.pos < parser.bytes.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(cond)
}

struct CondParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> CondParser<'a> {
    fn error(&self, message: impl Into<String>) -> CondError {
        CondError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat_operator(&mut self, op: &[u8; 2]) -> Result<bool, CondError> {
        self.skip_whitespace();
        if self.peek() != Some(op[0]) {
            return Ok(false);
        }
        if self.bytes.get(self.pos + 1).copied() == Some(op[1]) {
            self.pos += 2;
            Ok(true)
        } else {
            // A single `&` or `|` is always a mistake.
            Err(self.error(format!(
                "expected `{}{}`",
                op[0] as char, op[1] as char
            )))
        }
    }

    fn parse_or(&mut self) -> Result<Condition, CondError> {
        let mut left = self.parse_and()?;
        while self.eat_operator(b"||")? {
            self.skip_whitespace();
            let right = self.parse_and()?;
            left = Condition::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Condition, CondError> {
        let mut left = self.parse_not()?;
        while self.eat_operator(b"&&")? {
            self.skip_whitespace();
            let right = self.parse_not()?;
            left = Condition::and(left, right);
        }
        Ok(left)
    }

    fn parse_not(&mut self) -> Result<Condition, CondError> {
        self.skip_whitespace();
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(!self.parse_not()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_or()?;
                self.skip_whitespace();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(self.error("expected `)`"))
                }
            }
            Some(c) if c == b'_' || c.is_ascii_alphabetic() => {
                let ident = self.parse_ident()?;
                self.skip_whitespace();
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    self.skip_whitespace();
                    // `a == b` trips here: the second `=` is not an
                    // identifier start.
                    let state = self.parse_ident()?;
                    Ok(Condition::atom(ident, state))
                } else {
                    match ident.as_str() {
                        "true" => Ok(Condition::True),
                        "false" => Ok(Condition::False),
                        _ => Err(self.error(format!("expected `=` after `{ident}`"))),
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected character `{}`", c as char))),
            None => Err(self.error("unexpected end of condition")),
        }
    }

    fn parse_ident(&mut self) -> Result<String, CondError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c == b'_' || c.is_ascii_alphabetic() => self.pos += 1,
            _ => return Err(self.error("expected an identifier")),
        }
        while matches!(self.peek(), Some(c) if c == b'_' || c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }
}
