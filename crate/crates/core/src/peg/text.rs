use thiserror::Error;

use super::ast::{valid_letter, Expression, Grammar, GrammarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarTextError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Name(String),
    Literal(String),
    Arrow,
    Slash,
    Bang,
    Amp,
    Star,
    Plus,
    Question,
    Dot,
    Open,
    Close,
}

struct Lexer {
    chars: Vec<(usize, char)>,
    at: usize,
    line: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GrammarTextError {
    GrammarTextError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

impl Lexer {
    fn new(src: &str, line: usize) -> Self {
        Lexer {
            chars: src.chars().enumerate().collect(),
            at: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.chars.get(self.at).map_or(self.chars.len(), |&(i, _)| i) + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn tokens(mut self) -> Result<Vec<(usize, Token)>, GrammarTextError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let col = self.column();
            if c.is_whitespace() {
                self.at += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            self.at += 1;
            let tok = match c {
                '<' => {
                    if self.peek() != Some('-') {
                        return Err(syntax(self.line, col, "expected `<-`"));
                    }
                    self.at += 1;
                    Token::Arrow
                }
                '/' => Token::Slash,
                '!' => Token::Bang,
                '&' => Token::Amp,
                '*' => Token::Star,
                '+' => Token::Plus,
                '?' => Token::Question,
                '.' => Token::Dot,
                '(' => Token::Open,
                ')' => Token::Close,
                '"' => {
                    let mut lit = String::new();
                    loop {
                        match self.peek() {
                            None => return Err(syntax(self.line, col, "unterminated string literal")),
                            Some('"') => {
                                self.at += 1;
                                break;
                            }
                            Some(l) if valid_letter(l) => {
                                lit.push(l);
                                self.at += 1;
                            }
                            Some(l) => {
                                return Err(syntax(
                                    self.line,
                                    self.column(),
                                    format!("character {l:?} is not allowed in a literal"),
                                ))
                            }
                        }
                    }
                    Token::Literal(lit)
                }
                '`' => {
                    let mut name = String::new();
                    loop {
                        match self.peek() {
                            None => return Err(syntax(self.line, col, "unterminated quoted name")),
                            Some('`') => {
                                self.at += 1;
                                break;
                            }
                            Some(l) if !l.is_whitespace() && !l.is_control() && l != ',' => {
                                name.push(l);
                                self.at += 1;
                            }
                            Some(l) => {
                                return Err(syntax(
                                    self.line,
                                    self.column(),
                                    format!("character {l:?} is not allowed in a name"),
                                ))
                            }
                        }
                    }
                    if name.is_empty() {
                        return Err(syntax(self.line, col, "empty quoted name"));
                    }
                    Token::Name(name)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = c.to_string();
                    while let Some(n) = self.peek() {
                        if n.is_ascii_alphanumeric() || n == '_' || n == '\'' {
                            name.push(n);
                            self.at += 1;
                        } else {
                            break;
                        }
                    }
                    Token::Name(name)
                }
                other => return Err(syntax(self.line, col, format!("unexpected character {other:?}"))),
            };
            out.push((col, tok));
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
    line: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end_column, |&(c, _)| c)
    }

    fn error(&self, message: impl Into<String>) -> GrammarTextError {
        syntax(self.line, self.column(), message)
    }

    fn choice(&mut self) -> Result<Expression, GrammarTextError> {
        let mut alts = vec![self.sequence()?];
        while self.peek() == Some(&Token::Slash) {
            self.at += 1;
            alts.push(self.sequence()?);
        }
        Ok(Expression::choice_all(alts))
    }

    fn sequence(&mut self) -> Result<Expression, GrammarTextError> {
        let mut items = Vec::new();
        while matches!(
            self.peek(),
            Some(Token::Name(_) | Token::Literal(_) | Token::Bang | Token::Amp | Token::Dot | Token::Open)
        ) {
            items.push(self.prefix()?);
        }
        if items.is_empty() {
            return Err(self.error("expected an expression"));
        }
        Ok(Expression::seq_all(items))
    }

    fn prefix(&mut self) -> Result<Expression, GrammarTextError> {
        match self.peek() {
            Some(Token::Bang) => {
                self.at += 1;
                Ok(Expression::not(self.prefix()?))
            }
            Some(Token::Amp) => {
                self.at += 1;
                Ok(Expression::and(self.prefix()?))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expression, GrammarTextError> {
        let mut e = self.primary()?;
        loop {
            e = match self.peek() {
                Some(Token::Star) => Expression::star(e),
                Some(Token::Plus) => Expression::plus(e),
                Some(Token::Question) => Expression::optional(e),
                _ => return Ok(e),
            };
            self.at += 1;
        }
    }

    fn primary(&mut self) -> Result<Expression, GrammarTextError> {
        let tok = self.peek().cloned();
        let e = match tok {
            Some(Token::Name(n)) => Expression::Nonterminal(n),
            Some(Token::Literal(l)) => Expression::word(&l),
            Some(Token::Dot) => Expression::AnyChar,
            Some(Token::Open) => {
                self.at += 1;
                let inner = self.choice()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.error("expected `)`"));
                }
                self.at += 1;
                return Ok(inner);
            }
            _ => return Err(self.error("expected an expression")),
        };
        self.at += 1;
        Ok(e)
    }
}

/// Parses the grammar text format.
///
/// One rule per line, `Name <- body`. Terminals are double-quoted; a
/// multi-letter literal is a sequence of its letters and `""` is ε.
/// Operators by increasing binding strength: `/`, juxtaposition, prefix `!`
/// and `&`, postfix `*` `+` `?`. `.` is any letter, `#` starts a comment.
/// Names are identifiers or backtick-quoted. Directives: `@start Name`
/// selects the axiom (default: first rule) and `@alphabet "abc"` declares
/// letters in addition to those used by rules.
pub fn parse_grammar_text(text: &str) -> Result<Grammar, GrammarTextError> {
    let mut rules = Vec::new();
    let mut start: Option<String> = None;
    let mut alphabet = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if let Some(directive) = trimmed.strip_prefix('@') {
            let indent = raw.len() - trimmed.len();
            let (word, rest) = directive.split_once(char::is_whitespace).unwrap_or((directive, ""));
            let arg_col = indent + 2 + word.len() + 1;
            let toks = Lexer::new(rest, line).tokens().map_err(|e| shift(e, arg_col))?;
            match (word, toks.as_slice()) {
                ("start", [(_, Token::Name(n))]) => start = Some(n.clone()),
                ("alphabet", [(_, Token::Literal(l))]) => alphabet.extend(l.chars()),
                ("start", _) => return Err(syntax(line, arg_col, "expected one nonterminal name")),
                ("alphabet", _) => return Err(syntax(line, arg_col, "expected one string literal")),
                _ => return Err(syntax(line, indent + 1, format!("unknown directive `@{word}`"))),
            }
            continue;
        }
        let tokens = Lexer::new(raw, line).tokens()?;
        if tokens.is_empty() {
            continue;
        }
        let end_column = raw.chars().count() + 1;
        let mut p = Parser {
            tokens,
            at: 0,
            line,
            end_column,
        };
        let name = match p.peek() {
            Some(Token::Name(n)) => n.clone(),
            _ => return Err(p.error("expected a rule name")),
        };
        p.at += 1;
        if p.peek() != Some(&Token::Arrow) {
            return Err(p.error("expected `<-`"));
        }
        p.at += 1;
        let body = p.choice()?;
        if p.at != p.tokens.len() {
            return Err(p.error("unexpected token"));
        }
        rules.push((name, body));
    }
    if rules.is_empty() {
        return Err(GrammarError::NoRules.into());
    }
    let axiom = start.unwrap_or_else(|| rules[0].0.clone());
    Ok(Grammar::new(rules, &axiom, alphabet)?)
}

fn shift(e: GrammarTextError, by: usize) -> GrammarTextError {
    match e {
        GrammarTextError::Syntax { line, column, message } => GrammarTextError::Syntax {
            line,
            column: column + by - 1,
            message,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::Node;

    #[test]
    fn simple_rule_maps_to_tree() {
        let g = parse_grammar_text(r#"S <- "a" S / """#).unwrap();
        assert_eq!(g.nonterminal_count(), 1);
        let s = g.lookup("S").unwrap();
        assert_eq!(
            g.expression(g.rule(s)),
            Expression::choice(
                Expression::seq(Expression::t('a'), Expression::nt("S")),
                Expression::Empty
            )
        );
        assert_eq!(g.alphabet(), &['a']);
    }

    #[test]
    fn node_ids_follow_source_order() {
        let g = parse_grammar_text("S <- A \"x\"\nA <- \"y\"").unwrap();
        assert!(matches!(g.node(g.rule(g.lookup("S").unwrap())), Node::Sequence(..)));
        assert_eq!(g.rule(g.lookup("S").unwrap()).0, 0);
        assert_eq!(g.rule(g.lookup("A").unwrap()).0, 3);
        assert_eq!(g.node_count(), 4);
    }

    #[test]
    fn duplicate_rule_is_rejected() {
        let err = parse_grammar_text("A <- \"a\"\nA <- \"b\"").unwrap_err();
        assert_eq!(err, GrammarTextError::Grammar(GrammarError::DuplicateRule("A".into())));
    }

    #[test]
    fn undefined_reference_is_rejected() {
        let err = parse_grammar_text("S <- B").unwrap_err();
        assert!(matches!(err, GrammarTextError::Grammar(GrammarError::UndefinedNonterminal { .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_grammar_text("S <- \"a\"\nT <- (\"b\"").unwrap_err();
        assert_eq!(
            err,
            GrammarTextError::Syntax {
                line: 2,
                column: 10,
                message: "expected `)`".into()
            }
        );
    }

    #[test]
    fn directives_and_comments() {
        let g = parse_grammar_text("# header\n@alphabet \"cb\"\nA <- \"a\" # tail\n@start B\nB <- A .").unwrap();
        assert_eq!(g.axiom_name(), "B");
        assert_eq!(g.alphabet(), &['a', 'b', 'c']);
    }

    #[test]
    fn prefix_binds_looser_than_postfix() {
        let g = parse_grammar_text("S <- !\"a\"* &\"b\"").unwrap();
        let s = g.expression(g.rule(g.axiom()));
        assert_eq!(
            s,
            Expression::seq(
                Expression::not(Expression::star(Expression::t('a'))),
                Expression::and(Expression::t('b'))
            )
        );
    }

    #[test]
    fn display_round_trips() {
        let src = "S <- (A / \"b\") A* / !(A A)+ `#3`?\nA <- \"a\" / .\n`#3` <- !\"\" / \"\"";
        let g = parse_grammar_text(src).unwrap();
        let again = parse_grammar_text(&g.to_string()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn name_letter_clash_is_rejected() {
        let err = parse_grammar_text("a <- \"a\"").unwrap_err();
        assert_eq!(err, GrammarTextError::Grammar(GrammarError::NameClash("a".into())));
    }
}
