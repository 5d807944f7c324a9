//! Token cursor, error reporting and statement-level recovery shared by every
//! dialect.

use std::path::Path;

use super::lexer::{tokenize, Token, TokenKind};
use super::RESERVED;
use crate::diag::{codes, Diagnostic, SourceSpan};

/// Marker returned when a statement is abandoned; the diagnostic has already
/// been recorded.
#[derive(Debug)]
pub(crate) struct Abort;

pub(crate) type PResult<T> = Result<T, Abort>;

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    pub diags: Vec<Diagnostic>,
}

impl Parser {
    pub fn new(file: &Path, text: &str) -> Self {
        Parser { tokens: tokenize(file, text), pos: 0, diags: Vec::new() }
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn nth(&self, n: usize) -> &Token {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    pub fn span(&self) -> SourceSpan {
        self.peek().span.clone()
    }

    pub fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    pub fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    pub fn is(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    pub fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.is(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, kind: TokenKind) -> PResult<SourceSpan> {
        if self.is(&kind) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&kind.describe()))
        }
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        self.nth_is_kw(0, kw)
    }

    pub fn nth_is_kw(&self, n: usize, kw: &str) -> bool {
        matches!(&self.nth(n).kind, TokenKind::Ident(s) if s == kw)
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// Any identifier, reserved or not. Used for enumerated values.
    pub fn word(&mut self, expected: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    /// A bare identifier that is not a keyword, or a quoted string.
    pub fn name(&mut self, expected: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().kind {
            TokenKind::Str(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            TokenKind::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    /// A quoted display name, only when the string is not the head of the
    /// next statement (`"A" helps "Q"`).
    pub fn display_name(&mut self, statement_heads: &[&str]) -> Option<String> {
        if let TokenKind::Str(s) = &self.peek().kind {
            let next_is_head = statement_heads.iter().any(|kw| self.nth_is_kw(1, kw));
            if !next_is_head {
                let s = s.clone();
                self.bump();
                return Some(s);
            }
        }
        None
    }

    pub fn number(&mut self, expected: &str) -> PResult<(f64, SourceSpan)> {
        match self.peek().kind {
            TokenKind::Number(n) => Ok((n, self.bump().span)),
            _ => Err(self.unexpected(expected)),
        }
    }

    /// Comma separated list of items parsed by `item`.
    pub fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.eat(&TokenKind::Comma) {
            out.push(item(self)?);
        }
        Ok(out)
    }

    pub fn unexpected(&mut self, expected: &str) -> Abort {
        let tok = self.peek().clone();
        let msg = match &tok.kind {
            TokenKind::Bad(s) if s.starts_with('"') => "unterminated string literal".to_string(),
            TokenKind::Bad(s) => format!("unexpected character `{s}`"),
            other => format!("expected {expected}, found {}", other.describe()),
        };
        self.error_at(tok.span, codes::E_SYNTAX, msg)
    }

    pub fn error_at(&mut self, span: SourceSpan, code: &str, msg: impl Into<String>) -> Abort {
        self.diags.push(Diagnostic::error(code, msg).with_span(Some(span)));
        Abort
    }

    pub fn report(&mut self, diag: Diagnostic) {
        self.diags.push(diag);
    }

    /// Skips the rest of a malformed statement that began at token `start`.
    ///
    /// Stops before a closing brace, after a semicolon, or before the first
    /// token of a later source line.
    fn recover(&mut self, start: usize) {
        let start_line = self.tokens[start].span.start_line;
        loop {
            let tok = self.peek();
            match tok.kind {
                TokenKind::Eof | TokenKind::RBrace => break,
                TokenKind::Semi => {
                    self.bump();
                    break;
                }
                TokenKind::LBrace => self.skip_balanced(),
                _ if tok.line_start && tok.span.start_line > start_line => break,
                _ => {
                    self.bump();
                }
            }
        }
        if self.pos == start && !self.at_eof() && !self.is(&TokenKind::RBrace) {
            self.bump();
        }
    }

    fn skip_balanced(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.bump().kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        return;
                    }
                }
                TokenKind::Eof => return,
                _ => {}
            }
        }
    }

    /// Parses `{ stmt* }`, recovering from malformed statements so later
    /// errors are still reported. Returns the span of the closing brace.
    pub fn block(&mut self, mut stmt: impl FnMut(&mut Self) -> PResult<()>) -> PResult<SourceSpan> {
        let open = self.expect(TokenKind::LBrace)?;
        loop {
            while self.eat(&TokenKind::Semi) {}
            if self.is(&TokenKind::RBrace) {
                return Ok(self.bump().span);
            }
            if self.at_eof() {
                return Err(self.error_at(open, codes::E_SYNTAX, "unclosed `{`"));
            }
            let start = self.pos;
            if stmt(self).is_err() {
                self.recover(start);
            }
        }
    }

    /// Requires the end of input, reporting trailing tokens once.
    pub fn finish(&mut self) {
        if !self.at_eof() {
            let _ = self.unexpected("end of input");
        }
    }
}

/// Model-wide identifier registry reporting `E-DUP` on redefinition.
#[derive(Default)]
pub(crate) struct Ids {
    seen: std::collections::HashMap<String, SourceSpan>,
}

impl Ids {
    pub fn declare(&mut self, id: &str, span: &SourceSpan, diags: &mut Vec<Diagnostic>) -> bool {
        if let Some(first) = self.seen.get(id) {
            diags.push(
                Diagnostic::error(
                    codes::E_DUP,
                    format!("duplicate identifier `{id}` (first defined at {}:{})", first.start_line, first.start_col),
                )
                .with_span(Some(span.clone())),
            );
            false
        } else {
            self.seen.insert(id.to_string(), span.clone());
            true
        }
    }
}
