use std::path::Path;

use crate::diag::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Str(String),
    Number(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eq,
    Comma,
    Colon,
    Semi,
    Dot,
    Arrow,
    /// A character or literal the lexer could not make sense of.
    Bad(String),
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Str(s) => format!("\"{s}\""),
            TokenKind::Number(n) => format!("`{n}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Bad(s) => format!("`{s}`"),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
    /// First token on its source line.
    pub line_start: bool,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Whether `s` lexes as a single identifier token.
pub fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars().peekable();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    while let Some(c) = chars.next() {
        if c == '-' {
            match chars.peek() {
                Some(&n) if is_ident_char(n) => {}
                _ => return false,
            }
        } else if !is_ident_char(c) {
            return false;
        }
    }
    true
}

pub fn tokenize(file: &Path, text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    let mut last_line = 0u32;

    let span = |l0: u32, c0: u32, l1: u32, c1: u32| SourceSpan {
        file: file.to_path_buf(),
        start_line: l0,
        start_col: c0,
        end_line: l1,
        end_col: c1,
    };

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let (l0, c0) = (line, col);
        let start = i;
        let kind = if is_ident_start(c) {
            i += 1;
            while i < chars.len() {
                let ch = chars[i];
                if is_ident_char(ch) || (ch == '-' && chars.get(i + 1).is_some_and(|&n| is_ident_char(n))) {
                    i += 1;
                } else {
                    break;
                }
            }
            TokenKind::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())) {
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let raw: String = chars[start..i].iter().collect();
            match raw.parse::<f64>() {
                Ok(n) => TokenKind::Number(n),
                Err(_) => TokenKind::Bad(raw),
            }
        } else if c == '"' {
            i += 1;
            let mut value = String::new();
            let mut closed = false;
            while i < chars.len() {
                match chars[i] {
                    '"' => {
                        closed = true;
                        i += 1;
                        break;
                    }
                    '\\' if i + 1 < chars.len() => {
                        let esc = chars[i + 1];
                        value.push(match esc {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                        i += 2;
                    }
                    '\n' => break,
                    ch => {
                        value.push(ch);
                        i += 1;
                    }
                }
            }
            if closed {
                TokenKind::Str(value)
            } else {
                TokenKind::Bad(format!("\"{value}"))
            }
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            TokenKind::Arrow
        } else {
            i += 1;
            match c {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '=' => TokenKind::Eq,
                ',' => TokenKind::Comma,
                ':' => TokenKind::Colon,
                ';' => TokenKind::Semi,
                '.' => TokenKind::Dot,
                other => TokenKind::Bad(other.to_string()),
            }
        };
        col += (i - start) as u32;
        tokens.push(Token { kind, span: span(l0, c0, line, col), line_start: l0 != last_line });
        last_line = l0;
    }

    tokens.push(Token { kind: TokenKind::Eof, span: span(line, col, line, col), line_start: true });
    tokens
}
