use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase- or digit-initial word: predicate or constant.
    Lower(String),
    /// Uppercase-initial word: variable.
    Upper(String),
    /// `_k`
    Null(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Slash,
    Dot,
    Arrow,
    Turnstile,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Null(n) => write!(f, "`_{n}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Turnstile => f.write_str("`:-`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Position,
}

#[derive(Debug)]
pub struct LexError {
    pub pos: Position,
    pub message: String,
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Position { line, column };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '/' => Tok::Slash,
            '.' => Tok::Dot,
            '-' => {
                bump!();
                match chars.peek() {
                    Some('-') => {
                        while let Some(&c) = chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            bump!();
                        }
                        continue;
                    }
                    Some('>') => {
                        bump!();
                        out.push(Token { tok: Tok::Arrow, pos });
                        continue;
                    }
                    _ => {
                        return Err(LexError {
                            pos,
                            message: "expected `->` or `--`".into(),
                        })
                    }
                }
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    out.push(Token {
                        tok: Tok::Turnstile,
                        pos,
                    });
                    continue;
                }
                return Err(LexError {
                    pos,
                    message: "expected `:-`".into(),
                });
            }
            '_' => {
                bump!();
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if !is_word(d) {
                        break;
                    }
                    digits.push(d);
                    bump!();
                }
                let id = digits
                    .parse::<u64>()
                    .ok()
                    .filter(|_| digits.bytes().all(|b| b.is_ascii_digit()));
                match id {
                    Some(id) => {
                        out.push(Token {
                            tok: Tok::Null(id),
                            pos,
                        });
                        continue;
                    }
                    None => {
                        return Err(LexError {
                            pos,
                            message: format!("malformed null `_{digits}`; expected `_` followed by digits"),
                        })
                    }
                }
            }
            c if c.is_ascii_alphanumeric() => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if !is_word(d) {
                        break;
                    }
                    word.push(d);
                    bump!();
                }
                let tok = if c.is_ascii_uppercase() {
                    Tok::Upper(word)
                } else {
                    Tok::Lower(word)
                };
                out.push(Token { tok, pos });
                continue;
            }
            other => {
                return Err(LexError {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        bump!();
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Position { line, column },
    });
    Ok(out)
}
