use super::{Formula, LtlError};

/// How proposition tokens are written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    /// `cookbook_is_examined`
    #[default]
    SingleToken,
    /// `cookbook is examined`
    MultiToken,
}

const KEYWORDS: [&str; 7] = ["not", "next", "eventually", "always", "until", "and", "or"];

// Binding strength, loosest first.
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNTIL: u8 = 3;
const PREC_UNARY: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Until(..) => PREC_UNTIL,
        _ => PREC_UNARY,
    }
}

/// Lower-case infix rendering with the minimum parentheses needed for
/// [`parse`] to rebuild the same tree. `and`/`or` associate to the right.
pub fn render(phi: &Formula, mode: RenderMode) -> Result<String, LtlError> {
    let mut out = String::new();
    write_formula(phi, mode, &mut out)?;
    Ok(out)
}

fn write_operand(f: &Formula, min_prec: u8, mode: RenderMode, out: &mut String) -> Result<(), LtlError> {
    if precedence(f) < min_prec {
        out.push('(');
        write_formula(f, mode, out)?;
        out.push(')');
        Ok(())
    } else {
        write_formula(f, mode, out)
    }
}

fn write_formula(phi: &Formula, mode: RenderMode, out: &mut String) -> Result<(), LtlError> {
    match phi {
        Formula::True | Formula::False => Err(LtlError::ConstantLeaf),
        Formula::Atom(a) => {
            match mode {
                RenderMode::SingleToken => out.push_str(a),
                RenderMode::MultiToken => out.push_str(&a.replace('_', " ")),
            }
            Ok(())
        }
        Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
            out.push_str(match phi {
                Formula::Not(_) => "not ",
                Formula::Next(_) => "next ",
                Formula::Eventually(_) => "eventually ",
                _ => "always ",
            });
            write_operand(f, PREC_UNARY, mode, out)
        }
        Formula::Until(l, r) => {
            write_operand(l, PREC_UNARY, mode, out)?;
            out.push_str(" until ");
            write_operand(r, PREC_UNARY, mode, out)
        }
        Formula::And(l, r) => {
            write_operand(l, PREC_AND + 1, mode, out)?;
            out.push_str(" and ");
            write_operand(r, PREC_AND, mode, out)
        }
        Formula::Or(l, r) => {
            write_operand(l, PREC_OR + 1, mode, out)?;
            out.push_str(" or ");
            write_operand(r, PREC_OR, mode, out)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok<'_>)>, LtlError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' {
            toks.push((i, Tok::Open));
            i += 1;
        } else if c == b')' {
            toks.push((i, Tok::Close));
            i += 1;
        } else if c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
            {
                i += 1;
            }
            toks.push((start, Tok::Word(&text[start..i])));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(LtlError::Syntax {
                pos: i,
                message: format!("unexpected character {ch:?}"),
            });
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LtlError> {
        Err(LtlError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        if self.peek() == Some(&Tok::Word(kw)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn or_expr(&mut self) -> Result<Formula, LtlError> {
        let left = self.and_expr()?;
        if self.eat_word("or") {
            Ok(Formula::or(left, self.or_expr()?))
        } else {
            Ok(left)
        }
    }

    fn and_expr(&mut self) -> Result<Formula, LtlError> {
        let left = self.until_expr()?;
        if self.eat_word("and") {
            Ok(Formula::and(left, self.and_expr()?))
        } else {
            Ok(left)
        }
    }

    fn until_expr(&mut self) -> Result<Formula, LtlError> {
        let left = self.unary()?;
        if self.eat_word("until") {
            Ok(Formula::until(left, self.unary()?))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        match self.peek().cloned() {
            None => self.error("unexpected end of input, expected an operand"),
            Some(Tok::Close) => self.error("unexpected ')'"),
            Some(Tok::Open) => {
                self.at += 1;
                let inner = self.or_expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return self.error("expected ')'");
                }
                self.at += 1;
                Ok(inner)
            }
            Some(Tok::Word(w)) => {
                self.at += 1;
                match w {
                    "not" => Ok(Formula::not(self.unary()?)),
                    "next" => Ok(Formula::next(self.unary()?)),
                    "eventually" => Ok(Formula::eventually(self.unary()?)),
                    "always" => Ok(Formula::always(self.unary()?)),
                    kw if KEYWORDS.contains(&kw) => {
                        self.at -= 1;
                        self.error(format!("unexpected keyword '{kw}'"))
                    }
                    atom => Ok(Formula::atom(atom)),
                }
            }
        }
    }
}

/// Parse the single-token grammar produced by [`render`].
pub fn parse(text: &str) -> Result<Formula, LtlError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        len: text.len(),
    };
    let f = parser.or_expr()?;
    if parser.at != parser.toks.len() {
        return parser.error("trailing input");
    }
    Ok(f)
}
