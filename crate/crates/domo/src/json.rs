//! A small strict JSON parser that keeps line/column spans on every value and
//! object key, plus the escaping helpers the serializers share.
//!
//! Strictness the document format relies on: duplicate object keys are
//! syntax errors, trailing input is rejected, and spans survive into the
//! schema layer so every diagnostic can point at its source position.

use std::fmt;

/// A parsed value plus the 1-based line/column where it starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanned<T> {
    pub value: T,
    pub line: usize,
    pub column: usize,
}

pub type SpannedValue = Spanned<JsonValue>;

#[derive(Debug, Clone, PartialEq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    /// Kept as the raw literal; the document schema has no numeric fields.
    Number(String),
    String(String),
    Array(Vec<SpannedValue>),
    /// Key order preserved; keys unique by construction.
    Object(Vec<(Spanned<String>, SpannedValue)>),
}

impl JsonValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            JsonValue::Null => "null",
            JsonValue::Bool(_) => "boolean",
            JsonValue::Number(_) => "number",
            JsonValue::String(_) => "string",
            JsonValue::Array(_) => "array",
            JsonValue::Object(_) => "object",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsonError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for JsonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

pub fn parse(text: &str) -> Result<SpannedValue, JsonError> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        line: 1,
        column: 1,
    };
    parser.skip_whitespace();
    let value = parser.parse_value()?;
    parser.skip_whitespace();
    if parser.pos < parser.bytes.len() {
        return Err(parser.error("unexpected content after the document"));
    }
    Ok(value)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> JsonError {
        JsonError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let byte = self.peek()?;
        self.pos += 1;
        if byte == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(byte)
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), JsonError> {
        match self.peek() {
            Some(found) if found == byte => {
                self.bump();
                Ok(())
            }
            Some(found) => Err(self.error(format!(
                "expected `{}`, found `{}`",
                byte as char, found as char
            ))),
            None => Err(self.error(format!("expected `{}`, found end of input", byte as char))),
        }
    }

    fn parse_value(&mut self) -> Result<SpannedValue, JsonError> {
        let (line, column) = (self.line, self.column);
        let spanned = |value| Spanned {
            value,
            line,
            column,
        };
        match self.peek() {
            None => Err(self.error("expected a value, found end of input")),
            Some(b'{') => {
                let object = self.parse_object()?;
                Ok(spanned(JsonValue::Object(object)))
            }
            Some(b'[') => {
                let array = self.parse_array()?;
                Ok(spanned(JsonValue::Array(array)))
            }
            Some(b'"') => {
                let string = self.parse_string()?;
                Ok(spanned(JsonValue::String(string)))
            }
            Some(b't') => {
                self.parse_keyword("true")?;
                Ok(spanned(JsonValue::Bool(true)))
            }
            Some(b'f') => {
                self.parse_keyword("false")?;
                Ok(spanned(JsonValue::Bool(false)))
            }
            Some(b'n') => {
                self.parse_keyword("null")?;
                Ok(spanned(JsonValue::Null))
            }
            Some(b'-' | b'0'..=b'9') => {
                let number = self.parse_number()?;
                Ok(spanned(JsonValue::Number(number)))
            }
            Some(other) => Err(self.error(format!("unexpected character `{}`", other as char))),
        }
    }

    fn parse_keyword(&mut self, keyword: &str) -> Result<(), JsonError> {
        for expected in keyword.bytes() {
            match self.peek() {
                Some(found) if found == expected => {
                    self.bump();
                }
                _ => return Err(self.error(format!("invalid literal, expected `{keyword}`"))),
            }
        }
        Ok(())
    }

    fn parse_number(&mut self) -> Result<String, JsonError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.bump();
        }
        let mut digits = 0;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.bump();
            digits += 1;
        }
        if digits == 0 {
            return Err(self.error("malformed number"));
        }
        if self.peek() == Some(b'.') {
            self.bump();
            let mut fraction = 0;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.bump();
                fraction += 1;
            }
            if fraction == 0 {
                return Err(self.error("malformed number"));
            }
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.bump();
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.bump();
            }
            let mut exponent = 0;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.bump();
                exponent += 1;
            }
            if exponent == 0 {
                return Err(self.error("malformed number"));
            }
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn parse_string(&mut self) -> Result<String, JsonError> {
        self.expect(b'"')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated string")),
                Some(b'"') => return Ok(out),
                Some(b'\\') => match self.bump() {
                    None => return Err(self.error("unterminated escape")),
                    Some(b'"') => out.push('"'),
                    Some(b'\\') => out.push('\\'),
                    Some(b'/') => out.push('/'),
                    Some(b'b') => out.push('\u{0008}'),
                    Some(b'f') => out.push('\u{000C}'),
                    Some(b'n') => out.push('\n'),
                    Some(b'r') => out.push('\r'),
                    Some(b't') => out.push('\t'),
                    Some(b'u') => {
                        let first = self.parse_hex4()?;
                        let ch = if (0xD800..=0xDBFF).contains(&first) {
                            // High surrogate: require the paired low half.
                            if self.bump() != Some(b'\\') || self.bump() != Some(b'u') {
                                return Err(self.error("unpaired surrogate escape"));
                            }
                            let second = self.parse_hex4()?;
                            if !(0xDC00..=0xDFFF).contains(&second) {
                                return Err(self.error("invalid low surrogate"));
                            }
                            let combined =
                                0x10000 + ((first - 0xD800) << 10) + (second - 0xDC00);
                            char::from_u32(combined)
                        } else if (0xDC00..=0xDFFF).contains(&first) {
                            None
                        } else {
                            char::from_u32(first)
                        };
                        match ch {
                            Some(c) => out.push(c),
                            None => return Err(self.error("invalid unicode escape")),
                        }
                    }
                    Some(other) => {
                        return Err(
                            self.error(format!("invalid escape `\\{}`", other as char))
                        )
                    }
                },
                Some(byte) if byte < 0x20 => {
                    return Err(self.error("control character in string"))
                }
                Some(byte) => {
                    // Re-assemble multi-byte UTF-8 sequences.
                    if byte < 0x80 {
                        out.push(byte as char);
                    } else {
                        let width = match byte {
                            0xC0..=0xDF => 2,
                            0xE0..=0xEF => 3,
                            0xF0..=0xF7 => 4,
                            _ => return Err(self.error("invalid UTF-8 in string")),
                        };
                        let start = self.pos - 1;
                        for _ in 1..width {
                            match self.peek() {
                                Some(0x80..=0xBF) => {
                                    self.bump();
                                }
                                _ => return Err(self.error("invalid UTF-8 in string")),
                            }
                        }
                        match core::str::from_utf8(&self.bytes[start..self.pos]) {
                            Ok(s) => out.push_str(s),
                            Err(_) => return Err(self.error("invalid UTF-8 in string")),
                        }
                    }
                }
            }
        }
    }

    fn parse_hex4(&mut self) -> Result<u32, JsonError> {
        let mut value = 0u32;
        for _ in 0..4 {
            let digit = match self.bump() {
                Some(b @ b'0'..=b'9') => (b - b'0') as u32,
                Some(b @ b'a'..=b'f') => (b - b'a' + 10) as u32,
                Some(b @ b'A'..=b'F') => (b - b'A' + 10) as u32,
                _ => return Err(self.error("invalid unicode escape")),
            };
            value = value * 16 + digit;
        }
        Ok(value)
    }

    fn parse_array(&mut self) -> Result<Vec<SpannedValue>, JsonError> {
        self.expect(b'[')?;
        let mut items = Vec::new();
        self.skip_whitespace();
        if self.peek() == Some(b']') {
            self.bump();
            return Ok(items);
        }
        loop {
            self.skip_whitespace();
            items.push(self.parse_value()?);
            self.skip_whitespace();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                }
                Some(b']') => {
                    self.bump();
                    return Ok(items);
                }
                _ => return Err(self.error("expected `,` or `]`")),
            }
        }
    }

    fn parse_object(&mut self) -> Result<Vec<(Spanned<String>, SpannedValue)>, JsonError> {
        self.expect(b'{')?;
        let mut members: Vec<(Spanned<String>, SpannedValue)> = Vec::new();
        self.skip_whitespace();
        if self.peek() == Some(b'}') {
            self.bump();
            return Ok(members);
        }
        loop {
            self.skip_whitespace();
            let (line, column) = (self.line, self.column);
            if self.peek() != Some(b'"') {
                return Err(self.error("expected a string key"));
            }
            let key = self.parse_string()?;
            if members.iter().any(|(k, _)| k.value == key) {
                return Err(JsonError {
                    line,
                    column,
                    message: format!("duplicate key `{key}`"),
                });
            }
            self.skip_whitespace();
            self.expect(b':')?;
            self.skip_whitespace();
            let value = self.parse_value()?;
            members.push((
                Spanned {
                    value: key,
                    line,
                    column,
                },
                value,
            ));
            self.skip_whitespace();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                }
                Some(b'}') => {
                    self.bump();
                    return Ok(members);
                }
                _ => return Err(self.error("expected `,` or `}`")),
            }
        }
    }
}

/// Encodes `s` as a JSON string literal, quotes included.
pub fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
