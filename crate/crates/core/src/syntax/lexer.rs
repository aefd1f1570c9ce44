use super::{ErrorKind, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Slash,
    Turnstile,
    Arrow,
    Implies,
    And,
    Or,
    Bottom,
    Tilde,
    Equiv,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Slash => "/",
            Tok::Turnstile => "|-",
            Tok::Arrow => "->",
            Tok::Implies => "=>",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Bottom => "_|_",
            Tok::Tilde => "~",
            Tok::Equiv => "==",
            Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. `#` starts a comment running to the end of
/// the line. Identifiers may contain `'` and inner hyphens (`b'`,
/// `forall-left`).
pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let two = |i: usize| -> String { chars[i..(i + 2).min(chars.len())].iter().collect() };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: tl, col: tc });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '_' if chars[i..].starts_with(&['_', '|', '_']) => push(Tok::Bottom, 3, &mut i, &mut col),
            _ if two(i) == "|-" => push(Tok::Turnstile, 2, &mut i, &mut col),
            _ if two(i) == "->" => push(Tok::Arrow, 2, &mut i, &mut col),
            _ if two(i) == "=>" => push(Tok::Implies, 2, &mut i, &mut col),
            _ if two(i) == "==" => push(Tok::Equiv, 2, &mut i, &mut col),
            _ if two(i) == "/\\" => push(Tok::And, 2, &mut i, &mut col),
            _ if two(i) == "\\/" => push(Tok::Or, 2, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '/' => push(Tok::Slash, 1, &mut i, &mut col),
            '~' => push(Tok::Tilde, 1, &mut i, &mut col),
            c if ident_char(c) => {
                let mut j = i;
                while j < chars.len()
                    && (ident_char(chars[j])
                        || (chars[j] == '-' && j > i && chars.get(j + 1).is_some_and(|d| d.is_ascii_alphabetic())))
                {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                push(Tok::Ident(s), j - i, &mut i, &mut col);
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ErrorKind::Syntax,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_identifiers() {
        assert_eq!(
            toks("P(b') |- _|_ => a /\\ b \\/ c"),
            vec![
                Tok::Ident("P".into()),
                Tok::LParen,
                Tok::Ident("b'".into()),
                Tok::RParen,
                Tok::Turnstile,
                Tok::Bottom,
                Tok::Implies,
                Tok::Ident("a".into()),
                Tok::And,
                Tok::Ident("b".into()),
                Tok::Or,
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn hyphenated_tags_but_not_arrows() {
        assert_eq!(toks("forall-left")[0], Tok::Ident("forall-left".into()));
        assert_eq!(toks("a->b"), vec![Tok::Ident("a".into()), Tok::Arrow, Tok::Ident("b".into()), Tok::Eof]);
    }

    #[test]
    fn positions_and_comments() {
        let ts = lex("# header\n  a").unwrap();
        assert_eq!((ts[0].line, ts[0].col), (2, 3));
        let err = lex("a $").unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }
}
