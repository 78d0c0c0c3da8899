//! Parser for the line-oriented ontology text format.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! concept <Name> | role <Name> | individual <Name>
//! axiom <CExpr> SubClassOf <CExpr> | axiom <CExpr> EquivalentTo <CExpr>
//! assert <Name>(<ind>) [= <degree>] | assert <role>(<ind>, <ind>) [= <degree>]
//! ```
//!
//! Concept expressions use `Thing`, `Nothing`, `not`, `and`, `or`,
//! `some r . C`, `only r . C`, and parentheses. Precedence is
//! `not` > `and` > `or`; a quantifier filler extends to the next closing
//! delimiter or the end of the line. Undeclared names are registered by
//! their first-use sort.

use crate::ontology::{
    ABoxAssertion, AssertionKind, ConceptExpr, NameSort, Ontology, OntologyError, Signature,
    TBoxAxiom,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Dot,
    Comma,
    Eq,
    /// `>=` or `<=`; only ever produced to report a targeted error.
    OrderCmp(&'static str),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn syntax_error(line: usize, col: usize, expected: impl Into<String>) -> OntologyError {
    OntologyError::SyntaxError {
        line,
        col,
        expected: expected.into(),
    }
}

fn lex_line(line_no: usize, line: &str) -> Result<Vec<Spanned>, OntologyError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '(' => {
                toks.push(Spanned {
                    tok: Tok::LParen,
                    col,
                });
                i += 1;
            }
            ')' => {
                toks.push(Spanned {
                    tok: Tok::RParen,
                    col,
                });
                i += 1;
            }
            '.' => {
                toks.push(Spanned { tok: Tok::Dot, col });
                i += 1;
            }
            ',' => {
                toks.push(Spanned {
                    tok: Tok::Comma,
                    col,
                });
                i += 1;
            }
            '=' => {
                toks.push(Spanned { tok: Tok::Eq, col });
                i += 1;
            }
            '>' | '<' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    let op = if c == '>' { ">=" } else { "<=" };
                    toks.push(Spanned {
                        tok: Tok::OrderCmp(op),
                        col,
                    });
                    i += 2;
                } else {
                    return Err(syntax_error(line_no, col, "a statement token"));
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text
                    .parse::<f64>()
                    .map_err(|_| syntax_error(line_no, col, "a numeric degree"))?;
                toks.push(Spanned {
                    tok: Tok::Number(value),
                    col,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                toks.push(Spanned {
                    tok: Tok::Ident(text),
                    col,
                });
            }
            _ => return Err(syntax_error(line_no, col, "a statement token")),
        }
    }
    Ok(toks)
}

struct LineParser<'a> {
    line: usize,
    toks: &'a [Spanned],
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn new(line: usize, toks: &'a [Spanned]) -> Self {
        Self { line, toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next_col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.col)
            .unwrap_or_else(|| self.toks.last().map(|s| s.col + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let s = self.toks.get(self.pos);
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn error(&self, expected: impl Into<String>) -> OntologyError {
        syntax_error(self.line, self.next_col(), expected)
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, OntologyError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Spanned {
                    tok: Tok::Ident(name),
                    ..
                }) = self.bump()
                else {
                    unreachable!()
                };
                Ok(name.clone())
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_tok(&mut self, tok: Tok, what: &str) -> Result<(), OntologyError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Lowest-precedence entry point: `or`-expression.
    fn parse_expr(&mut self) -> Result<ConceptExpr, OntologyError> {
        let mut left = self.parse_and()?;
        while self.peek() == Some(&Tok::Ident("or".into())) {
            self.bump();
            let right = self.parse_and()?;
            left = ConceptExpr::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<ConceptExpr, OntologyError> {
        let mut left = self.parse_unary()?;
        while self.peek() == Some(&Tok::Ident("and".into())) {
            self.bump();
            let right = self.parse_unary()?;
            left = ConceptExpr::and(left, right);
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<ConceptExpr, OntologyError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect_tok(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(word)) => match word.as_str() {
                "not" => {
                    self.bump();
                    Ok(ConceptExpr::not(self.parse_unary()?))
                }
                // The filler is a full expression, so it extends to the
                // next closing delimiter or the end of the line.
                "some" | "only" => {
                    let existential = word == "some";
                    self.bump();
                    let role = self.expect_ident("a role name")?;
                    self.expect_tok(Tok::Dot, "`.` after the role name")?;
                    let filler = self.parse_expr()?;
                    Ok(if existential {
                        ConceptExpr::exists(role, filler)
                    } else {
                        ConceptExpr::forall(role, filler)
                    })
                }
                "Thing" => {
                    self.bump();
                    Ok(ConceptExpr::Top)
                }
                "Nothing" => {
                    self.bump();
                    Ok(ConceptExpr::Bottom)
                }
                "and" | "or" | "SubClassOf" | "EquivalentTo" => {
                    Err(self.error("a concept expression"))
                }
                _ => {
                    let name = self.expect_ident("a concept name")?;
                    Ok(ConceptExpr::Name(name))
                }
            },
            _ => Err(self.error("a concept expression")),
        }
    }

    fn parse_degree(&mut self) -> Result<f64, OntologyError> {
        match self.peek() {
            None => Ok(1.0),
            Some(Tok::Eq) => {
                self.bump();
                match self.peek() {
                    Some(Tok::Number(_)) => {
                        let Some(Spanned {
                            tok: Tok::Number(n),
                            ..
                        }) = self.bump()
                        else {
                            unreachable!()
                        };
                        Ok(*n)
                    }
                    _ => Err(self.error("a degree in [0, 1]")),
                }
            }
            Some(Tok::OrderCmp(op)) => Err(self.error(format!(
                "`=` (fuzzy assertions use `=` only; `{op}` is not supported)"
            ))),
            _ => Err(self.error("`=` or end of line")),
        }
    }
}

enum Statement {
    Declare(NameSort, String),
    Axiom(TBoxAxiom),
    Assert(ABoxAssertion),
}

fn parse_statement(line_no: usize, toks: &[Spanned]) -> Result<Statement, OntologyError> {
    let mut p = LineParser::new(line_no, toks);
    let keyword = p.expect_ident("`concept`, `role`, `individual`, `axiom`, or `assert`")?;
    let stmt = match keyword.as_str() {
        "concept" => Statement::Declare(NameSort::Concept, p.expect_ident("a concept name")?),
        "role" => Statement::Declare(NameSort::Role, p.expect_ident("a role name")?),
        "individual" => {
            Statement::Declare(NameSort::Individual, p.expect_ident("an individual name")?)
        }
        "axiom" => {
            let left = p.parse_expr()?;
            let op = p.expect_ident("`SubClassOf` or `EquivalentTo`")?;
            let right = p.parse_expr()?;
            let axiom = match op.as_str() {
                "SubClassOf" => TBoxAxiom::Inclusion(left, right),
                "EquivalentTo" => TBoxAxiom::Equivalence(left, right),
                _ => {
                    return Err(syntax_error(
                        line_no,
                        1,
                        "`SubClassOf` or `EquivalentTo` between the axiom sides",
                    ))
                }
            };
            Statement::Axiom(axiom)
        }
        "assert" => {
            // Head is a name in the text format; a parenthesized concept
            // expression is also accepted so rendered ontologies with
            // compound assertions round-trip.
            let head = match p.peek() {
                Some(Tok::LParen) => {
                    p.bump();
                    let e = p.parse_expr()?;
                    p.expect_tok(Tok::RParen, "`)`")?;
                    e
                }
                _ => ConceptExpr::Name(p.expect_ident("a concept or role name")?),
            };
            p.expect_tok(Tok::LParen, "`(`")?;
            let first = p.expect_ident("an individual name")?;
            let kind = match p.peek() {
                Some(Tok::Comma) => {
                    p.bump();
                    let second = p.expect_ident("an individual name")?;
                    let role = match head {
                        ConceptExpr::Name(n) => n,
                        _ => return Err(syntax_error(line_no, 1, "a role name before `(`")),
                    };
                    AssertionKind::Role {
                        subject: first,
                        object: second,
                        role,
                    }
                }
                _ => AssertionKind::Concept {
                    individual: first,
                    concept: head,
                },
            };
            p.expect_tok(Tok::RParen, "`)`")?;
            let degree = p.parse_degree()?;
            Statement::Assert(ABoxAssertion::new(kind, degree)?)
        }
        _ => {
            return Err(syntax_error(
                line_no,
                toks[0].col,
                "`concept`, `role`, `individual`, `axiom`, or `assert`",
            ))
        }
    };
    if !p.at_end() {
        return Err(p.error("end of line"));
    }
    Ok(stmt)
}

/// Parses an ontology document. Names referenced without declaration are
/// auto-registered by their first-use sort.
pub fn parse_ontology(text: &str) -> Result<Ontology, OntologyError> {
    let mut sig = Signature::new();
    let mut tbox = Vec::new();
    let mut abox = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex_line(line_no, raw)?;
        if toks.is_empty() {
            continue;
        }
        match parse_statement(line_no, &toks)? {
            Statement::Declare(sort, name) => sig.ensure(&name, sort)?,
            Statement::Axiom(ax) => tbox.push(ax),
            Statement::Assert(a) => {
                // Resolve the head sort here so role assertions with one
                // argument (or concept heads with two) surface as sort
                // conflicts rather than silent reinterpretation.
                match &a.kind {
                    AssertionKind::Concept { concept, .. } => {
                        if let ConceptExpr::Name(n) = concept {
                            sig.ensure(n, NameSort::Concept)?;
                        }
                    }
                    AssertionKind::Role { role, .. } => sig.ensure(role, NameSort::Role)?,
                }
                abox.push(a);
            }
        }
    }
    Ontology::new(sig, tbox, abox)
}
