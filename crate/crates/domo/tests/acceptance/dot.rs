//! A standalone DOT grammar checker used to verify emitted diagrams.
//!
//! Covers the graph/digraph grammar with subgraphs, attribute lists, and
//! quoted identifiers (HTML strings and ports are not emitted and not
//! accepted). Independent of the emitters by construction: it sees only
//! their text output.

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Equals,
    DirectedEdge,
    UndirectedEdge,
}

fn lex(text: &str) -> Result<Vec<Token>, String> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut tokens = Vec::new();
    while pos < bytes.len() {
        let c = bytes[pos];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => pos += 1,
            b'{' => {
                tokens.push(Token::LBrace);
                pos += 1;
            }
            b'}' => {
                tokens.push(Token::RBrace);
                pos += 1;
            }
            b'[' => {
                tokens.push(Token::LBracket);
                pos += 1;
            }
            b']' => {
                tokens.push(Token::RBracket);
                pos += 1;
            }
            b';' => {
                tokens.push(Token::Semi);
                pos += 1;
            }
            b',' => {
                tokens.push(Token::Comma);
                pos += 1;
            }
            b'=' => {
                tokens.push(Token::Equals);
                pos += 1;
            }
            b'-' => {
                if bytes.get(pos + 1) == Some(&b'>') {
                    tokens.push(Token::DirectedEdge);
                    pos += 2;
                } else if bytes.get(pos + 1) == Some(&b'-') {
                    tokens.push(Token::UndirectedEdge);
                    pos += 2;
                } else if bytes.get(pos + 1).is_some_and(|b| b.is_ascii_digit()) {
                    // Negative numeral.
                    let start = pos;
                    pos += 1;
                    while pos < bytes.len()
                        && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.')
                    {
                        pos += 1;
                    }
                    tokens.push(Token::Id(
                        String::from_utf8_lossy(&bytes[start..pos]).into_owned(),
                    ));
                } else {
                    return Err(format!("stray `-` at byte {pos}"));
                }
            }
            b'"' => {
                pos += 1;
                let mut value = String::new();
                loop {
                    match bytes.get(pos) {
                        None => return Err("unterminated quoted string".into()),
                        Some(b'"') => {
                            pos += 1;
                            break;
                        }
                        Some(b'\\') => {
                            match bytes.get(pos + 1) {
                                Some(&escaped) => value.push(escaped as char),
                                None => return Err("unterminated escape".into()),
                            }
                            pos += 2;
                        }
                        Some(&b) => {
                            value.push(b as char);
                            pos += 1;
                        }
                    }
                }
                tokens.push(Token::Id(value));
            }
            b'/' if bytes.get(pos + 1) == Some(&b'/') => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            c if c == b'_' || c.is_ascii_alphanumeric() || c == b'.' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos] == b'_'
                        || bytes[pos] == b'.'
                        || bytes[pos].is_ascii_alphanumeric())
                {
                    pos += 1;
                }
                tokens.push(Token::Id(
                    String::from_utf8_lossy(&bytes[start..pos]).into_owned(),
                ));
            }
            other => return Err(format!("unexpected character `{}`", other as char)),
        }
    }
    Ok(tokens)
}

struct DotParser {
    tokens: Vec<Token>,
    pos: usize,
    directed: bool,
}

impl DotParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn expect(&mut self, expected: &Token) -> Result<(), String> {
        match self.bump() {
            Some(found) if &found == expected => Ok(()),
            other => Err(format!("expected {expected:?}, found {other:?}")),
        }
    }

    fn keyword(token: Option<&Token>) -> Option<String> {
        match token {
            Some(Token::Id(id)) => Some(id.to_ascii_lowercase()),
            _ => None,
        }
    }

    fn parse_graph(&mut self) -> Result<(), String> {
        let mut head = Self::keyword(self.peek()).ok_or("expected graph/digraph")?;
        if head == "strict" {
            self.bump();
            head = Self::keyword(self.peek()).ok_or("expected graph/digraph")?;
        }
        self.directed = match head.as_str() {
            "digraph" => true,
            "graph" => false,
            other => return Err(format!("expected graph/digraph, found `{other}`")),
        };
        self.bump();
        if matches!(self.peek(), Some(Token::Id(_))) {
            self.bump();
        }
        self.expect(&Token::LBrace)?;
        self.parse_stmt_list()?;
        self.expect(&Token::RBrace)?;
        if self.pos != self.tokens.len() {
            return Err("trailing tokens after the graph".into());
        }
        Ok(())
    }

    fn parse_stmt_list(&mut self) -> Result<(), String> {
        loop {
            match self.peek() {
                None => return Err("unexpected end inside a statement list".into()),
                Some(Token::RBrace) => return Ok(()),
                Some(Token::Semi) => {
                    self.bump();
                }
                _ => self.parse_stmt()?,
            }
        }
    }

    fn parse_stmt(&mut self) -> Result<(), String> {
        if let Some(keyword) = Self::keyword(self.peek()) {
            if keyword == "subgraph" {
                self.parse_subgraph()?;
                self.parse_optional_edge_rhs()?;
                return Ok(());
            }
            if matches!(keyword.as_str(), "graph" | "node" | "edge")
                && self.tokens.get(self.pos + 1) == Some(&Token::LBracket)
            {
                self.bump();
                self.parse_attr_lists()?;
                return Ok(());
            }
        }
        match self.peek() {
            Some(Token::LBrace) => {
                self.parse_subgraph_body()?;
                self.parse_optional_edge_rhs()?;
                Ok(())
            }
            Some(Token::Id(_)) => {
                self.bump();
                if self.peek() == Some(&Token::Equals) {
                    // ID '=' ID
                    self.bump();
                    match self.bump() {
                        Some(Token::Id(_)) => Ok(()),
                        other => Err(format!("expected a value, found {other:?}")),
                    }
                } else {
                    self.parse_optional_edge_rhs()?;
                    if self.peek() == Some(&Token::LBracket) {
                        self.parse_attr_lists()?;
                    }
                    Ok(())
                }
            }
            other => Err(format!("unexpected statement start: {other:?}")),
        }
    }

    fn parse_optional_edge_rhs(&mut self) -> Result<(), String> {
        loop {
            let op = match self.peek() {
                Some(Token::DirectedEdge) => true,
                Some(Token::UndirectedEdge) => false,
                _ => return Ok(()),
            };
            if op != self.directed {
                return Err("edge operator does not match the graph kind".into());
            }
            self.bump();
            match self.peek() {
                Some(Token::Id(_)) => {
                    self.bump();
                }
                Some(Token::LBrace) => self.parse_subgraph_body()?,
                _ => {
                    if Self::keyword(self.peek()).as_deref() == Some("subgraph") {
                        self.parse_subgraph()?;
                    } else {
                        return Err("expected an edge target".into());
                    }
                }
            }
        }
    }

    fn parse_subgraph(&mut self) -> Result<(), String> {
        // `subgraph [ID] { ... }`
        self.bump();
        if matches!(self.peek(), Some(Token::Id(_))) {
            self.bump();
        }
        self.parse_subgraph_body()
    }

    fn parse_subgraph_body(&mut self) -> Result<(), String> {
        self.expect(&Token::LBrace)?;
        self.parse_stmt_list()?;
        self.expect(&Token::RBrace)
    }

    fn parse_attr_lists(&mut self) -> Result<(), String> {
        while self.peek() == Some(&Token::LBracket) {
            self.bump();
            loop {
                match self.peek() {
                    Some(Token::RBracket) => {
                        self.bump();
                        break;
                    }
                    Some(Token::Id(_)) => {
                        self.bump();
                        self.expect(&Token::Equals)?;
                        match self.bump() {
                            Some(Token::Id(_)) => {}
                            other => {
                                return Err(format!("expected an attribute value, found {other:?}"))
                            }
                        }
                        if matches!(self.peek(), Some(Token::Comma | Token::Semi)) {
                            self.bump();
                        }
                    }
                    other => return Err(format!("unexpected token in attribute list: {other:?}")),
                }
            }
        }
        Ok(())
    }
}

/// Checks that `text` is a syntactically valid DOT graph.
pub fn check(text: &str) -> Result<(), String> {
    let tokens = lex(text)?;
    let mut parser = DotParser {
        tokens,
        pos: 0,
        directed: true,
    };
    parser.parse_graph()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_well_formed_graphs() {
        check("digraph g { a -> b [label=\"x\"]; subgraph cluster_0 { label=\"c\"; n1; } }")
            .unwrap();
        check("graph g { a -- b }").unwrap();
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(check("digraph g { a -> }").is_err());
        assert!(check("digraph g { a -- b }").is_err(), "wrong edge op");
        assert!(check("digraph g { a -> b ").is_err(), "unbalanced brace");
        assert!(check("notagraph { }").is_err());
    }
}
