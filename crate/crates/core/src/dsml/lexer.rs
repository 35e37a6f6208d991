use super::{ParseError, ParseErrorKind, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Bare word: keyword, identifier, or number.
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Colon => "`:`".into(),
        }
    }
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            '\n' | ' ' | '\t' | '\r' => {
                bump(&mut chars);
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            '{' | '}' | '[' | ']' | ':' => {
                bump(&mut chars);
                out.push((
                    match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        _ => Tok::Colon,
                    },
                    span,
                ));
            }
            '"' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(ParseError::new(span, ParseErrorKind::Syntax, "unterminated string"));
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                out.push((Tok::Str(s), span));
            }
            c if is_word_char(c) => {
                let mut w = String::new();
                while chars.peek().is_some_and(|&c| is_word_char(c)) {
                    w.push(bump(&mut chars).unwrap());
                }
                out.push((Tok::Word(w), span));
            }
            other => {
                return Err(ParseError::new(
                    span,
                    ParseErrorKind::Syntax,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}
