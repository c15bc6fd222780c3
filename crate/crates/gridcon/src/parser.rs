//! Recursive-descent parser for the IDR surface syntax.
//!
//! One IDR per line, `%` starts a comment:
//!
//! ```text
//! idr      := entity "<-" expr
//! expr     := or_expr ("#" or_expr)*
//! or_expr  := and_expr ("|" and_expr)*
//! and_expr := atom ("&" atom)*
//! atom     := entity | "(" expr ")"
//! ```
//!
//! `&` binds tighter than `|`, which binds tighter than `#`; parentheses
//! override. Chains of one operator flatten into a single n-ary node.

use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::idr::{Idr, IdrExpression};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Entity(EntityId),
    Arrow,
    And,
    Or,
    Xor,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer { src, pos: 0, line, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize)>> {
        let mut out = Vec::new();
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            let c = bytes[self.pos] as char;
            let col = self.col;
            match c {
                ' ' | '\t' => {
                    self.pos += 1;
                    self.col += 1;
                }
                '%' => break,
                '(' => {
                    out.push((Token::LParen, col));
                    self.pos += 1;
                    self.col += 1;
                }
                ')' => {
                    out.push((Token::RParen, col));
                    self.pos += 1;
                    self.col += 1;
                }
                '&' => {
                    out.push((Token::And, col));
                    self.pos += 1;
                    self.col += 1;
                }
                '|' => {
                    out.push((Token::Or, col));
                    self.pos += 1;
                    self.col += 1;
                }
                '#' => {
                    out.push((Token::Xor, col));
                    self.pos += 1;
                    self.col += 1;
                }
                '<' => {
                    if bytes.get(self.pos + 1) == Some(&b'-') {
                        out.push((Token::Arrow, col));
                        self.pos += 2;
                        self.col += 2;
                    } else {
                        return Err(self.error("expected `<-`"));
                    }
                }
                c if c.is_ascii_alphanumeric() => {
                    let start = self.pos;
                    while self.pos < bytes.len()
                        && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                    {
                        self.pos += 1;
                        self.col += 1;
                    }
                    let word = &self.src[start..self.pos];
                    let id = word.parse::<EntityId>().map_err(|_| Error::Syntax {
                        line: self.line,
                        col,
                        msg: format!("unrecognized entity token `{word}`"),
                    })?;
                    out.push((Token::Entity(id), col));
                }
                other => return Err(self.error(format!("unexpected character `{other}`"))),
            }
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col(), msg: msg.into() }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<IdrExpression> {
        let mut parts = vec![self.or_expr()?];
        while self.peek() == Some(&Token::Xor) {
            self.pos += 1;
            parts.push(self.or_expr()?);
        }
        Ok(collapse(parts, IdrExpression::NewXor))
    }

    fn or_expr(&mut self) -> Result<IdrExpression> {
        let mut parts = vec![self.and_expr()?];
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            parts.push(self.and_expr()?);
        }
        Ok(collapse(parts, IdrExpression::MaxOr))
    }

    fn and_expr(&mut self) -> Result<IdrExpression> {
        let mut parts = vec![self.atom()?];
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        Ok(collapse(parts, IdrExpression::MinAnd))
    }

    fn atom(&mut self) -> Result<IdrExpression> {
        match self.bump() {
            Some(Token::Entity(id)) => Ok(IdrExpression::Leaf(id)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected entity or `(`"))
            }
        }
    }
}

fn collapse(mut parts: Vec<IdrExpression>, ctor: fn(Vec<IdrExpression>) -> IdrExpression) -> IdrExpression {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        ctor(parts)
    }
}

/// Parse a single IDR line. `line_no` is used for error positions.
pub fn parse_idr_line(text: &str, line_no: usize) -> Result<Idr> {
    let tokens = Lexer::new(text, line_no).tokens()?;
    let end_col = text.len() + 1;
    if tokens.is_empty() {
        return Err(Error::Syntax { line: line_no, col: 1, msg: "empty IDR".into() });
    }
    let mut p = Parser { tokens, pos: 0, line: line_no, end_col };
    let target = match p.bump() {
        Some(Token::Entity(id)) => id,
        _ => {
            p.pos = p.pos.saturating_sub(1);
            return Err(p.error("expected target entity"));
        }
    };
    p.expect(Token::Arrow, "`<-`")?;
    let expr = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input after expression"));
    }
    Idr::new(target, expr)
}

/// Parse one IDR per line, skipping blank and comment-only lines.
pub fn parse_idr_document(text: &str) -> Result<Vec<Idr>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let stripped = raw.split('%').next().unwrap_or("");
        if stripped.trim().is_empty() {
            continue;
        }
        out.push(parse_idr_line(raw, i + 1)?);
    }
    Ok(out)
}

/// Convenience for one-off parsing.
pub fn parse_idr(text: &str) -> Result<Idr> {
    parse_idr_line(text, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::EntityId;

    fn leaf(t: &str) -> IdrExpression {
        IdrExpression::Leaf(t.parse().unwrap())
    }

    #[test]
    fn simple_min_and() {
        let idr = parse_idr("P7 <- P4 & P9").unwrap();
        assert_eq!(idr.target, "P7".parse::<EntityId>().unwrap());
        assert_eq!(idr.expr, IdrExpression::MinAnd(vec![leaf("P4"), leaf("P9")]));
    }

    #[test]
    fn nested_example_shape() {
        let idr = parse_idr("C1_1_6_6 <- ((C1_2_6_6 & P12) | (C1_3_1_6 & P6)) # L1_6").unwrap();
        match &idr.expr {
            IdrExpression::NewXor(cs) => {
                assert_eq!(cs.len(), 2);
                match &cs[0] {
                    IdrExpression::MaxOr(inner) => {
                        assert_eq!(inner.len(), 2);
                        assert!(matches!(inner[0], IdrExpression::MinAnd(_)));
                        assert!(matches!(inner[1], IdrExpression::MinAnd(_)));
                    }
                    other => panic!("expected MaxOr below NewXor, got {other:?}"),
                }
                assert_eq!(cs[1], leaf("L1_6"));
            }
            other => panic!("expected NewXor root, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_over_or_over_xor() {
        let idr = parse_idr("P1 <- P2 & P3 | P4 # P5").unwrap();
        // ((P2 & P3) | P4) # P5
        assert_eq!(
            idr.expr,
            IdrExpression::NewXor(vec![
                IdrExpression::MaxOr(vec![
                    IdrExpression::MinAnd(vec![leaf("P2"), leaf("P3")]),
                    leaf("P4"),
                ]),
                leaf("P5"),
            ])
        );
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_idr("P7 <- & P4").is_err());
        assert!(parse_idr("P7 <- (P4 & P9").is_err());
        assert!(parse_idr("P7 P4").is_err());
        assert!(parse_idr("<- P4").is_err());
        assert!(parse_idr("P7 <- P4 P9").is_err());
        assert!(parse_idr("P7 <- Q4").is_err());
    }

    #[test]
    fn error_carries_position() {
        match parse_idr_line("P7 <- & P4", 3) {
            Err(Error::Syntax { line, col, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(col, 7);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn self_dependency_detected() {
        assert!(matches!(parse_idr("P7 <- P7 & P4"), Err(Error::SelfDependency(_))));
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let doc = "% comment line\n\nP8 <- PL7_8 & P7 % trailing\n";
        let idrs = parse_idr_document(doc).unwrap();
        assert_eq!(idrs.len(), 1);
        assert_eq!(idrs[0].to_string(), "P8 <- PL7_8 & P7");
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "P7 <- P4 & P9",
            "C1_1_6_6 <- ((C1_2_6_6 & P12) | (C1_3_1_6 & P6)) # L1_6",
            "P1 <- P2 & P3 | P4 # P5",
            "P1 <- (P2 # P3) & P4",
        ] {
            let idr = parse_idr(text).unwrap();
            let printed = idr.to_string();
            let reparsed = parse_idr(&printed).unwrap();
            assert_eq!(idr, reparsed, "round trip failed for `{text}` -> `{printed}`");
        }
    }
}
