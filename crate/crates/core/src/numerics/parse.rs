//! Infix expression grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" exponent)?
//! exponent := "-"? integer | "(" "-"? integer ")"
//! atom   := number | variable | func "(" expr ")" | "(" expr ")"
//! func   := "sin" | "cos" | "exp"
//! variable := "t" | "s" | "x1" .. "x9"
//! ```
//!
//! Whitespace is ignored everywhere.

use std::fmt;

use super::expr::{SmoothExpr, Var};

/// Syntax error with a 1-based column and the tokens that would have been accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub column: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "column {}: expected {}, found {}",
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(v) => write!(f, "number `{v}`"),
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Plus => write!(f, "`+`"),
            Token::Minus => write!(f, "`-`"),
            Token::Star => write!(f, "`*`"),
            Token::Slash => write!(f, "`/`"),
            Token::Caret => write!(f, "`^`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::End => write!(f, "end of input"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, col));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError {
                column: col,
                expected: vec!["decimal literal"],
                found: format!("`{text}`"),
            })?;
            out.push((Token::Number(value), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(ParseError {
                column: col,
                expected: vec!["operator", "number", "identifier"],
                found: format!("`{c}`"),
            });
        }
    }
    out.push((Token::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            column: self.column(),
            expected,
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Token, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![name]))
        }
    }

    fn expr(&mut self) -> Result<SmoothExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = SmoothExpr::add(&lhs, &self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    lhs = SmoothExpr::sub(&lhs, &self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<SmoothExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = SmoothExpr::mul(&lhs, &self.unary()?);
                }
                Token::Slash => {
                    self.bump();
                    lhs = SmoothExpr::div(&lhs, &self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<SmoothExpr, ParseError> {
        if *self.peek() == Token::Minus {
            self.bump();
            Ok(SmoothExpr::neg(&self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<SmoothExpr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Token::Caret {
            return Ok(base);
        }
        self.bump();
        let parenthesized = *self.peek() == Token::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Token::Minus;
        if negative {
            self.bump();
        }
        let k = match self.peek() {
            Token::Number(v) if v.fract() == 0.0 && *v <= i32::MAX as f64 => *v as i32,
            _ => return Err(self.error(vec!["integer exponent"])),
        };
        self.bump();
        if parenthesized {
            self.expect(Token::RParen, "`)`")?;
        }
        Ok(SmoothExpr::powi(&base, if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<SmoothExpr, ParseError> {
        let column = self.column();
        match self.bump() {
            Token::Number(v) => Ok(SmoothExpr::constant(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "t" => Ok(SmoothExpr::t()),
                "s" => Ok(SmoothExpr::s()),
                "sin" | "cos" | "exp" => {
                    self.expect(Token::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "sin" => SmoothExpr::sin(&arg),
                        "cos" => SmoothExpr::cos(&arg),
                        _ => SmoothExpr::exp(&arg),
                    })
                }
                _ => match parse_coordinate(&name) {
                    Some(v) => Ok(SmoothExpr::var(v)),
                    None => Err(ParseError {
                        column,
                        expected: vec!["t", "s", "x1..x9", "sin", "cos", "exp"],
                        found: format!("`{name}`"),
                    }),
                },
            },
            other => Err(ParseError {
                column,
                expected: vec!["number", "variable", "function", "`(`"],
                found: other.to_string(),
            }),
        }
    }
}

fn parse_coordinate(name: &str) -> Option<Var> {
    let digits = name.strip_prefix('x')?;
    match digits.parse::<u8>() {
        Ok(i @ 1..=9) if digits.len() == 1 => Some(Var::X(i)),
        _ => None,
    }
}

/// Parses an expression in the infix grammar.
pub fn parse_expr(src: &str) -> Result<SmoothExpr, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(src)?,
        pos: 0,
    };
    let expr = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error(vec!["operator", "end of input"]));
    }
    Ok(expr)
}

impl std::str::FromStr for SmoothExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Assignment;

    fn eval(src: &str, t: f64) -> f64 {
        parse_expr(src)
            .unwrap()
            .eval(&Assignment::new().with_t(t).with_point(&[2.0, 3.0]))
            .unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(eval("-t^2", 3.0), -9.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("x1 * x2 - t", 1.0), 5.0);
        assert_eq!(eval(" exp( 0 ) + cos(t)*sin(t) ", 0.0), 1.0);
        assert_eq!(eval("1e-3 * 1000", 0.0), 1.0);
    }

    #[test]
    fn errors_carry_column_and_expectation() {
        let err = parse_expr("t + * 2").unwrap_err();
        assert_eq!(err.column, 5);
        assert!(err.expected.contains(&"number"));

        let err = parse_expr("sin t").unwrap_err();
        assert_eq!(err.column, 5);
        assert_eq!(err.expected, vec!["`(`"]);

        let err = parse_expr("t^1.5").unwrap_err();
        assert_eq!(err.expected, vec!["integer exponent"]);

        let err = parse_expr("x10").unwrap_err();
        assert_eq!(err.column, 1);

        let err = parse_expr("(t").unwrap_err();
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn display_reparses_to_same_tree() {
        for src in [
            "(t + x1) * -x1 - t^-2",
            "exp(-1 / (t * (1 - t)))",
            "-(t - s) / (x3 * 2)",
            "sin(t)^3 - cos(2 * t)",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
