use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(u64),
    Punct(char),
    Bad(char),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Nat(n) => format!("'{n}'"),
            Tok::Punct(c) | Tok::Bad(c) => format!("'{c}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

/// On-demand tokenizer. Numbers in exact syntax are read straight from the
/// source by the parser, so the lexer only exposes byte positions.
pub(crate) struct Lexer<'a> {
    pub src: &'a str,
    pub pos: usize,
    line_starts: Vec<usize>,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Lexer {
            src,
            pos: 0,
            line_starts,
        }
    }

    pub(crate) fn span_at(&self, byte: usize) -> Span {
        let line = self.line_starts.partition_point(|&s| s <= byte);
        let start = self.line_starts[line - 1];
        let col = self.src[start..byte.min(self.src.len())].chars().count() + 1;
        Span {
            line: line as u32,
            col: col as u32,
        }
    }

    /// Skips whitespace and `#` comments.
    pub(crate) fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'#' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    pub(crate) fn next_token(&mut self) -> Token {
        self.skip_trivia();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Token {
                tok: Tok::Eof,
                start,
                end: start,
            };
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            Tok::Ident(rest[..len].to_string())
        } else if c.is_ascii_digit() {
            let len = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            self.pos += len;
            match rest[..len].parse() {
                Ok(n) => Tok::Nat(n),
                Err(_) => Tok::Bad(c),
            }
        } else if "(){}[],;=+-".contains(c) {
            self.pos += 1;
            Tok::Punct(c)
        } else {
            self.pos += c.len_utf8();
            Tok::Bad(c)
        };
        Token {
            tok,
            start,
            end: self.pos,
        }
    }
}
