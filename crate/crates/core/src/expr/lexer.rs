use super::parser::{ParseError, Position};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier '{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Comma => "','".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub token: Token,
    pub pos: Position,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut cur = Cursor {
        chars: src.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let pos = cur.pos();
        let Some(c) = cur.peek() else {
            out.push(Spanned {
                token: Token::Eof,
                pos,
            });
            return Ok(out);
        };
        let token = match c {
            '0'..='9' | '.' => lex_number(&mut cur, pos)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(c) = cur
                    .peek()
                    .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    name.push(c);
                    cur.bump();
                }
                Token::Ident(name)
            }
            _ => {
                cur.bump();
                match c {
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '/' => Token::Slash,
                    '^' => Token::Caret,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    ',' => Token::Comma,
                    other => {
                        return Err(ParseError::Syntax {
                            pos,
                            message: format!("unexpected character '{other}'"),
                        })
                    }
                }
            }
        };
        out.push(Spanned { token, pos });
    }
}

// digits ['.' digits] [('e'|'E') ['+'|'-'] digits], or '.' digits
fn lex_number(cur: &mut Cursor<'_>, pos: Position) -> Result<Token, ParseError> {
    let mut text = String::new();
    let take_digits = |cur: &mut Cursor<'_>, text: &mut String| {
        let mut n = 0;
        while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
            text.push(d);
            cur.bump();
            n += 1;
        }
        n
    };
    let int_digits = take_digits(cur, &mut text);
    let mut frac_digits = 0;
    if cur.peek() == Some('.') {
        text.push('.');
        cur.bump();
        frac_digits = take_digits(cur, &mut text);
    }
    if int_digits + frac_digits == 0 {
        return Err(ParseError::Syntax {
            pos,
            message: "expected digits in number literal".into(),
        });
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        // only an exponent if digits follow; otherwise `e` is the next token
        let mut look = cur.chars.clone();
        look.next();
        let next = look.next();
        let after_sign = look.next();
        let is_exp = match next {
            Some(d) if d.is_ascii_digit() => true,
            Some('+' | '-') => after_sign.is_some_and(|d| d.is_ascii_digit()),
            _ => false,
        };
        if is_exp {
            text.push('e');
            cur.bump();
            if let Some(sign @ ('+' | '-')) = cur.peek() {
                text.push(sign);
                cur.bump();
            }
            take_digits(cur, &mut text);
        }
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Token::Num)
        .ok_or_else(|| ParseError::Syntax {
            pos,
            message: format!("number literal '{text}' is not a finite double"),
        })
}
