//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! E x. f    A x. f    C x. f    E=k x. f    Q:name x. f
//! ~f    <>f    []f    <Q:name>f
//! (f & g)   (f | g)   (f -> g)   (f => g)
//! R(x,y)    x=y    p
//! ```
//!
//! A formula file may start with a `sig R/2 P/1` header; without one the
//! signature is inferred from the atoms.

use thiserror::Error;

use super::{Formula, Signature};
use crate::lex::{Cursor, Pos, SyntaxError, Tok};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: unknown relation `{name}`")]
    UnknownRelation { name: String, pos: Pos },
    #[error("{pos}: `{name}` has arity {expected} but is used with {found} argument(s)")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
}

impl FormulaError {
    pub fn pos(&self) -> Pos {
        match self {
            FormulaError::Syntax(e) => e.pos,
            FormulaError::UnknownRelation { pos, .. } | FormulaError::ArityMismatch { pos, .. } => {
                *pos
            }
        }
    }
}

/// Parses `text` and checks every atom against `sig` (and against a `sig`
/// header in the text, if there is one).
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    parse_with(text, Some(sig)).map(|(f, _)| f)
}

/// Parses `text`, taking the signature from its header or inferring it from
/// the atoms. Inconsistent arities are reported as [`FormulaError::ArityMismatch`].
pub fn parse_infer(text: &str) -> Result<(Formula, Signature), FormulaError> {
    parse_with(text, None)
}

fn parse_with(text: &str, given: Option<&Signature>) -> Result<(Formula, Signature), FormulaError> {
    let mut cur = Cursor::new(text)?;
    let header = parse_sig_header(&mut cur)?;
    let mut uses = Vec::new();
    let formula = Parser {
        cur: &mut cur,
        uses: &mut uses,
    }
    .formula()?;
    cur.eat(&Tok::Semi);
    if !cur.at_eof() {
        return Err(cur.unexpected("end of formula").into());
    }

    let declared = match (given, header) {
        (Some(g), Some((h, hpos))) => Some(g.merge(&h).ok_or_else(|| {
            SyntaxError::new(hpos, "header signature conflicts with the model signature")
        })?),
        (Some(g), None) => Some(g.clone()),
        (None, Some((h, _))) => Some(h),
        (None, None) => None,
    };

    match declared {
        Some(sig) => {
            for (name, arity, pos) in &uses {
                match sig.arity(&Symbol::new(name)) {
                    None => {
                        return Err(FormulaError::UnknownRelation {
                            name: name.clone(),
                            pos: *pos,
                        })
                    }
                    Some(expected) if expected != *arity => {
                        return Err(FormulaError::ArityMismatch {
                            name: name.clone(),
                            expected,
                            found: *arity,
                            pos: *pos,
                        })
                    }
                    Some(_) => {}
                }
            }
            Ok((formula, sig))
        }
        None => {
            let mut sig = Signature::new();
            let mut first_use: std::collections::BTreeMap<&str, usize> = Default::default();
            for (name, arity, pos) in &uses {
                let prior = *first_use.entry(name).or_insert(*arity);
                if prior != *arity {
                    return Err(FormulaError::ArityMismatch {
                        name: name.clone(),
                        expected: prior,
                        found: *arity,
                        pos: *pos,
                    });
                }
                sig.declare(name, *arity);
            }
            Ok((formula, sig))
        }
    }
}

/// `sig R/2 P/1` — shared with the model-set and system formats.
pub(crate) fn parse_sig_header(cur: &mut Cursor) -> Result<Option<(Signature, Pos)>, SyntaxError> {
    if !(cur.is_keyword("sig") && matches!(cur.peek_at(2), Tok::Slash)) {
        return Ok(None);
    }
    let pos = cur.pos();
    cur.bump();
    let mut sig = Signature::new();
    while matches!(cur.peek(), Tok::Ident(_)) && matches!(cur.peek_at(1), Tok::Slash) {
        let (name, npos) = cur.ident()?;
        cur.expect(&Tok::Slash)?;
        let (arity, _) = cur.int()?;
        if arity == 0 {
            return Err(SyntaxError::new(
                npos,
                format!("`{name}` must have arity at least 1"),
            ));
        }
        if !sig.declare(&name, arity as usize) {
            return Err(SyntaxError::new(npos, format!("`{name}` declared twice")));
        }
    }
    cur.eat(&Tok::Semi);
    Ok(Some((sig, pos)))
}

struct Parser<'a> {
    cur: &'a mut Cursor,
    uses: &'a mut Vec<(String, usize, Pos)>,
}

const RESERVED: [&str; 3] = ["E", "A", "C"];

impl Parser<'_> {
    fn var(&mut self) -> Result<Symbol, SyntaxError> {
        let (name, pos) = self.cur.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(SyntaxError::new(
                pos,
                format!("`{name}` is a quantifier keyword and cannot be a variable"),
            ));
        }
        Ok(Symbol::new(&name))
    }

    fn binder(&mut self) -> Result<Symbol, SyntaxError> {
        let v = self.var()?;
        self.cur.expect(&Tok::Dot)?;
        Ok(v)
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.cur.peek().clone() {
            Tok::Tilde => {
                self.cur.bump();
                Ok(Formula::not(self.formula()?))
            }
            Tok::Diamond => {
                self.cur.bump();
                Ok(Formula::diamond(self.formula()?))
            }
            Tok::Box => {
                self.cur.bump();
                Ok(Formula::boxed(self.formula()?))
            }
            Tok::Lt => {
                self.cur.bump();
                let (q, pos) = self.cur.ident()?;
                if q != "Q" {
                    return Err(SyntaxError::new(pos, "expected `Q:` after `<`"));
                }
                self.cur.expect(&Tok::Colon)?;
                let (name, _) = self.cur.ident()?;
                self.cur.expect(&Tok::Gt)?;
                let body = self.formula()?;
                Ok(Formula::MinorModal(Symbol::new(&name), Box::new(body)))
            }
            Tok::LParen => {
                self.cur.bump();
                let left = self.formula()?;
                let op = self.cur.peek().clone();
                let build: Option<fn(Formula, Formula) -> Formula> = match op {
                    Tok::Amp => Some(Formula::and),
                    Tok::Pipe => Some(Formula::or),
                    Tok::Arrow => Some(Formula::implies),
                    Tok::FatArrow => Some(Formula::filter_implies),
                    _ => None,
                };
                let out = match build {
                    Some(build) => {
                        self.cur.bump();
                        let right = self.formula()?;
                        build(left, right)
                    }
                    None => left,
                };
                self.cur.expect(&Tok::RParen)?;
                Ok(out)
            }
            Tok::Ident(name) => self.ident_led(name),
            _ => Err(self.cur.unexpected("a formula")),
        }
    }

    fn ident_led(&mut self, name: String) -> Result<Formula, SyntaxError> {
        let pos = self.cur.pos();
        let next = self.cur.peek_at(1).clone();
        if next == Tok::LParen {
            self.cur.bump();
            self.cur.bump();
            let mut args = Vec::new();
            if !self.cur.eat(&Tok::RParen) {
                loop {
                    args.push(self.var()?);
                    if self.cur.eat(&Tok::Comma) {
                        continue;
                    }
                    self.cur.expect(&Tok::RParen)?;
                    break;
                }
            }
            if args.is_empty() {
                return Err(SyntaxError::new(
                    pos,
                    format!("`{name}` needs at least one argument"),
                ));
            }
            self.uses.push((name.clone(), args.len(), pos));
            return Ok(Formula::Rel(Symbol::new(&name), args));
        }
        match name.as_str() {
            "E" if next == Tok::Eq => {
                self.cur.bump();
                self.cur.bump();
                let (k, _) = self.cur.int()?;
                let v = self.binder()?;
                let body = self.formula()?;
                Ok(Formula::CountExists(k as usize, v, Box::new(body)))
            }
            "E" | "A" | "C" => {
                self.cur.bump();
                let v = self.binder()?;
                let body = self.formula()?;
                Ok(match name.as_str() {
                    "E" => Formula::Exists(v, Box::new(body)),
                    "C" => Formula::Const(v, Box::new(body)),
                    _ => Formula::not(Formula::Exists(v, Box::new(Formula::not(body)))),
                })
            }
            "Q" if next == Tok::Colon => {
                self.cur.bump();
                self.cur.bump();
                let (q, _) = self.cur.ident()?;
                let v = self.binder()?;
                let body = self.formula()?;
                Ok(Formula::MinorQuant(Symbol::new(&q), v, Box::new(body)))
            }
            _ if next == Tok::Eq => {
                let x = self.var()?;
                self.cur.bump();
                let y = self.var()?;
                Ok(Formula::Eq(x, y))
            }
            _ => {
                self.cur.bump();
                self.uses.push((name.clone(), 1, pos));
                Ok(Formula::Prop(Symbol::new(&name)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with("R", 2)
            .with("P", 1)
            .with("p", 1)
            .with("q", 1)
    }

    #[test]
    fn grammar_examples() {
        let s = sig();
        assert_eq!(
            parse("E x. R(x,x)", &s).unwrap(),
            Formula::exists("x", Formula::rel("R", &["x", "x"]))
        );
        assert_eq!(
            parse("C x. x=x", &s).unwrap(),
            Formula::constant("x", Formula::eq("x", "x"))
        );
        assert_eq!(
            parse("A x. P(x)", &s).unwrap(),
            Formula::forall("x", Formula::rel("P", &["x"]))
        );
        assert_eq!(
            parse("E=1 y. R(x,y)", &s).unwrap(),
            Formula::count_exists(1, "y", Formula::rel("R", &["x", "y"]))
        );
        assert_eq!(
            parse("[]<Q:most>(p => ~q)", &s).unwrap(),
            Formula::boxed(Formula::minor_modal(
                "most",
                Formula::filter_implies(Formula::prop("p"), Formula::not(Formula::prop("q")))
            ))
        );
        assert_eq!(
            parse("Q:forall y. (P(y) -> p)", &s).unwrap(),
            Formula::minor_quant(
                "forall",
                "y",
                Formula::implies(Formula::rel("P", &["y"]), Formula::prop("p"))
            )
        );
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = parse("R(x)", &sig()).unwrap_err();
        assert!(matches!(
            err,
            FormulaError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn unknown_relation_and_syntax_errors() {
        assert!(matches!(
            parse("S(x)", &sig()),
            Err(FormulaError::UnknownRelation { .. })
        ));
        let err = parse("(P(x) & P(x)", &sig()).unwrap_err();
        assert_eq!(err.pos(), Pos { line: 1, col: 13 });
        // binary connectives need their parentheses
        assert!(parse("P(x) & P(x)", &sig()).is_err());
        assert!(parse("E E. P(E)", &sig()).is_err());
    }

    #[test]
    fn relation_named_like_a_keyword() {
        let (f, s) = parse_infer("E x. E(x,x)").unwrap();
        assert_eq!(f, Formula::exists("x", Formula::rel("E", &["x", "x"])));
        assert_eq!(s.arity(&Symbol::new("E")), Some(2));
    }

    #[test]
    fn inference_and_header() {
        let (_, s) = parse_infer("(R(x,y) & P(x))").unwrap();
        assert_eq!(s, Signature::new().with("R", 2).with("P", 1));
        assert!(matches!(
            parse_infer("(R(x,y) & R(x))"),
            Err(FormulaError::ArityMismatch { .. })
        ));
        let (_, s) = parse_infer("sig R/2 D/1\nE x. R(x,x)").unwrap();
        assert_eq!(s.arity(&Symbol::new("D")), Some(1));
        assert!(parse_infer("sig R/2\nP(x)").is_err());
    }
}
