//! Recursive-descent parser and printer for statements.
//!
//! ```text
//! stmt    := implies
//! implies := or ( "=>" implies )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | primary
//! primary := atom | cf | "(" stmt ")"
//! atom    := SETTING | SETTING "=" ("+" | "-")
//! cf      := "cf" "[" ("F" | "B") "]" "(" stmt ";" SWITCH ";" stmt ")"
//! SWITCH  := ("L" | "R") ":" SETTING
//! ```
//!
//! `R1=-` is an outcome atom only; it does not assert that R1 was measured.

use super::{ParseError, SourceSpan};
use crate::logic::{Statement, Switch};
use crate::spacetime::RegionKind;
use crate::worlds::{Outcome, SettingLabel, Wing};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Arrow,
    Bar,
    Amp,
    Bang,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Eq,
    Plus,
    Minus,
    Ident(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Arrow => "`=>`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::End => "end of input".into(),
        }
    }
}

struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '|' => Some(Tok::Bar),
            '&' => Some(Tok::Amp),
            '!' => Some(Tok::Bang),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            tokens.push(Token {
                tok,
                span: SourceSpan::locate(text, start, start + c.len_utf8()),
            });
            continue;
        }
        if c == '=' {
            chars.next();
            if let Some(&(_, '>')) = chars.peek() {
                chars.next();
                tokens.push(Token {
                    tok: Tok::Arrow,
                    span: SourceSpan::locate(text, start, start + 2),
                });
            } else {
                tokens.push(Token {
                    tok: Tok::Eq,
                    span: SourceSpan::locate(text, start, start + 1),
                });
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(Token {
                tok: Tok::Ident(text[start..end].to_string()),
                span: SourceSpan::locate(text, start, end),
            });
            continue;
        }
        return Err(ParseError::new(
            format!("unexpected character `{c}`"),
            SourceSpan::locate(text, start, start + c.len_utf8()),
        ));
    }
    tokens.push(Token {
        tok: Tok::End,
        span: SourceSpan::locate(text, text.len(), text.len()),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    in_counterfactual: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::new(
            format!("unexpected {}", self.peek().describe()),
            self.span(),
        )
        .expecting(expected)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn stmt(&mut self) -> Result<Statement, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.stmt()?;
            Ok(Statement::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Statement, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            lhs = Statement::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Statement, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Statement::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Statement, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            Ok(Statement::not(self.unary()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Statement, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.stmt()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "cf" => self.counterfactual(),
            Tok::Ident(_) => self.atom(),
            _ => Err(self.unexpected(&["setting label", "`cf`", "`!`", "`(`"])),
        }
    }

    fn setting_label(&mut self) -> Result<SettingLabel, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => match name.parse::<SettingLabel>() {
                Ok(label) => {
                    self.bump();
                    Ok(label)
                }
                Err(msg) => Err(ParseError::new(msg, span).expecting(&["L1", "L2", "R1", "R2"])),
            },
            _ => Err(self.unexpected(&["setting label"])),
        }
    }

    fn atom(&mut self) -> Result<Statement, ParseError> {
        let label = self.setting_label()?;
        if *self.peek() != Tok::Eq {
            return Ok(Statement::setting(label));
        }
        self.bump();
        let outcome = match self.peek() {
            Tok::Plus => Outcome::Plus,
            Tok::Minus => Outcome::Minus,
            _ => return Err(self.unexpected(&["`+`", "`-`"])),
        };
        self.bump();
        Ok(Statement::outcome(label, outcome))
    }

    fn counterfactual(&mut self) -> Result<Statement, ParseError> {
        let cf_span = self.span();
        if self.in_counterfactual {
            return Err(ParseError::new(
                "counterfactuals may not be nested",
                cf_span,
            ));
        }
        self.bump();
        self.expect(Tok::LBracket, "`[`")?;
        let region = match self.peek() {
            Tok::Ident(r) if r == "F" => RegionKind::F,
            Tok::Ident(r) if r == "B" => RegionKind::B,
            _ => return Err(self.unexpected(&["`F`", "`B`"])),
        };
        self.bump();
        self.expect(Tok::RBracket, "`]`")?;
        self.expect(Tok::LParen, "`(`")?;
        self.in_counterfactual = true;
        let given = self.stmt()?;
        self.expect(Tok::Semi, "`;`")?;
        let switch = self.switch()?;
        self.expect(Tok::Semi, "`;`")?;
        let consequent = self.stmt()?;
        self.expect(Tok::RParen, "`)`")?;
        self.in_counterfactual = false;
        Ok(Statement::counterfactual(given, switch, region, consequent))
    }

    fn switch(&mut self) -> Result<Switch, ParseError> {
        let wing = match self.peek() {
            Tok::Ident(w) if w.len() == 1 => w.chars().next().and_then(Wing::from_letter),
            _ => None,
        };
        let Some(wing) = wing else {
            return Err(self.unexpected(&["`L`", "`R`"]));
        };
        self.bump();
        self.expect(Tok::Colon, "`:`")?;
        let span = self.span();
        let setting = self.setting_label()?;
        if setting.wing() != wing {
            return Err(ParseError::new(
                format!("setting {setting} does not belong to wing {wing}"),
                span,
            ));
        }
        Ok(Switch { wing, setting })
    }
}

/// Parses one statement; trailing input is an error.
pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        in_counterfactual: false,
    };
    let stmt = parser.stmt()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected(&["end of input"]));
    }
    Ok(stmt)
}

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;
const PREC_PRIMARY: u8 = 5;

fn precedence(s: &Statement) -> u8 {
    match s {
        Statement::Implies(..) => PREC_IMPLIES,
        Statement::Or(..) => PREC_OR,
        Statement::And(..) => PREC_AND,
        Statement::Not(_) => PREC_UNARY,
        _ => PREC_PRIMARY,
    }
}

fn write_statement(s: &Statement, min_prec: u8, out: &mut String) {
    let wrap = precedence(s) < min_prec;
    if wrap {
        out.push('(');
    }
    match s {
        Statement::SettingAtom(label) => out.push_str(label.as_str()),
        Statement::OutcomeAtom(label, outcome) => {
            out.push_str(label.as_str());
            out.push('=');
            out.push(outcome.symbol());
        }
        Statement::Not(a) => {
            out.push('!');
            write_statement(a, PREC_UNARY, out);
        }
        Statement::And(a, b) => {
            write_statement(a, PREC_AND, out);
            out.push_str(" & ");
            write_statement(b, PREC_UNARY, out);
        }
        Statement::Or(a, b) => {
            write_statement(a, PREC_OR, out);
            out.push_str(" | ");
            write_statement(b, PREC_AND, out);
        }
        Statement::Implies(a, b) => {
            write_statement(a, PREC_OR, out);
            out.push_str(" => ");
            write_statement(b, PREC_IMPLIES, out);
        }
        Statement::Counterfactual(cf) => {
            out.push_str("cf[");
            out.push(cf.region.symbol());
            out.push_str("](");
            write_statement(&cf.given, PREC_IMPLIES, out);
            out.push_str(" ; ");
            out.push(cf.switch.wing.letter());
            out.push(':');
            out.push_str(cf.switch.setting.as_str());
            out.push_str(" ; ");
            write_statement(&cf.consequent, PREC_IMPLIES, out);
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

/// Canonical surface form with the fewest parentheses that preserve the tree.
pub fn print_statement(s: &Statement) -> String {
    let mut out = String::new();
    write_statement(s, PREC_IMPLIES, &mut out);
    out
}
