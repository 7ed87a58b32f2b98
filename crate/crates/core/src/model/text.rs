//! Model-set text format.
//!
//! ```text
//! sig R/2 P/1
//! vars x y;                 # optional; required only for an empty set
//! model { domain 0 1 2; R = (0,1) (1,2); P = (0); assign x=0 y=1 }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Elem, Interpretation, ModelError, ModelSet, Structure};
use crate::formula::parse::parse_sig_header;
use crate::formula::Signature;
use crate::lex::{Cursor, SyntaxError, Tok};
use crate::symbol::{Symbol, Var};

fn at(cur: &Cursor, e: ModelError) -> ModelError {
    match e {
        ModelError::Syntax(_) => e,
        other => ModelError::Syntax(SyntaxError::new(cur.pos(), other.to_string())),
    }
}

/// Parses `model { ... }` at the cursor.
pub(crate) fn parse_model_block(
    cur: &mut Cursor,
    sig: &Signature,
) -> Result<(Structure, BTreeMap<Var, Elem>), ModelError> {
    let start = cur.pos();
    if !cur.is_keyword("model") {
        return Err(cur.unexpected("`model`").into());
    }
    cur.bump();
    cur.expect(&Tok::LBrace)?;
    let mut domain: Option<Vec<Elem>> = None;
    let mut tuples: Vec<(String, Vec<Elem>, crate::lex::Pos)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut assignment = BTreeMap::new();
    loop {
        if cur.eat(&Tok::Semi) {
            continue;
        }
        if cur.eat(&Tok::RBrace) {
            break;
        }
        let (word, pos) = cur.ident()?;
        match word.as_str() {
            "domain" => {
                let mut elems = Vec::new();
                while let Tok::Int(_) = cur.peek() {
                    elems.push(elem(cur)?);
                }
                if domain.replace(elems).is_some() {
                    return Err(SyntaxError::new(pos, "domain given twice").into());
                }
            }
            "assign" => {
                while matches!(cur.peek(), Tok::Ident(_)) && *cur.peek_at(1) == Tok::Eq {
                    let (v, vpos) = cur.ident()?;
                    cur.bump();
                    let a = elem(cur)?;
                    if assignment.insert(Symbol::new(&v), a).is_some() {
                        return Err(SyntaxError::new(vpos, format!("`{v}` assigned twice")).into());
                    }
                }
            }
            _ => {
                cur.expect(&Tok::Eq)?;
                if !seen.insert(word.clone()) {
                    return Err(SyntaxError::new(pos, format!("`{word}` given twice")).into());
                }
                loop {
                    let tpos = cur.pos();
                    match cur.peek() {
                        Tok::Int(_) => tuples.push((word.clone(), vec![elem(cur)?], tpos)),
                        Tok::LParen => {
                            cur.bump();
                            let mut t = vec![elem(cur)?];
                            while cur.eat(&Tok::Comma) {
                                t.push(elem(cur)?);
                            }
                            cur.expect(&Tok::RParen)?;
                            tuples.push((word.clone(), t, tpos));
                        }
                        _ => break,
                    }
                }
                if !sig.contains(&Symbol::new(&word)) {
                    return Err(SyntaxError::new(
                        pos,
                        format!("relation `{word}` is not in the signature"),
                    )
                    .into());
                }
            }
        }
    }
    let domain = domain.ok_or_else(|| SyntaxError::new(start, "model block without a domain"))?;
    let mut s = Structure::new(domain, sig)
        .map_err(|e| ModelError::Syntax(SyntaxError::new(start, e.to_string())))?;
    for (name, t, pos) in tuples {
        s.insert(&name, t)
            .map_err(|e| ModelError::Syntax(SyntaxError::new(pos, e.to_string())))?;
    }
    if let Some((v, &a)) = assignment.iter().find(|(_, a)| !s.domain().contains(a)) {
        return Err(SyntaxError::new(
            start,
            format!("`{v}` is assigned {a}, which is outside the domain"),
        )
        .into());
    }
    Ok((s, assignment))
}

fn elem(cur: &mut Cursor) -> Result<Elem, SyntaxError> {
    let (n, pos) = cur.int()?;
    Elem::try_from(n).map_err(|_| SyntaxError::new(pos, format!("element {n} is too large")))
}

/// Reads the mandatory `sig` header.
pub(crate) fn require_sig(cur: &mut Cursor) -> Result<Signature, SyntaxError> {
    match parse_sig_header(cur)? {
        Some((sig, _)) => Ok(sig),
        None if cur.is_keyword("sig") => {
            cur.bump();
            cur.eat(&Tok::Semi);
            Ok(Signature::new())
        }
        None => Err(cur.unexpected("a `sig` header")),
    }
}

/// Reads an optional `vars x y;` line.
pub(crate) fn parse_vars(cur: &mut Cursor) -> Result<Option<BTreeSet<Var>>, SyntaxError> {
    if !cur.is_keyword("vars") {
        return Ok(None);
    }
    cur.bump();
    let mut vars = BTreeSet::new();
    while let Tok::Ident(_) = cur.peek() {
        vars.insert(Symbol::new(&cur.ident()?.0));
    }
    cur.eat(&Tok::Semi);
    Ok(Some(vars))
}

/// Parses a whole model-set file. Member order in the file is irrelevant:
/// the result is a set.
pub fn parse_model_set(text: &str) -> Result<ModelSet, ModelError> {
    parse_model_set_ordered(text).map(|(m, _)| m)
}

/// Like [`parse_model_set`], also returning the members in file order
/// (duplicates included).
pub fn parse_model_set_ordered(text: &str) -> Result<(ModelSet, Vec<Interpretation>), ModelError> {
    let mut cur = Cursor::new(text)?;
    let sig = require_sig(&mut cur)?;
    let declared = parse_vars(&mut cur)?;
    let mut members: Vec<Interpretation> = Vec::new();
    while !cur.at_eof() {
        let (s, a) = parse_model_block(&mut cur, &sig)?;
        let pos = cur.pos();
        let i = Interpretation::new(s, a).map_err(|e| at(&cur, e))?;
        let vars: BTreeSet<Var> = match (&declared, members.first()) {
            (Some(v), _) => v.clone(),
            (None, Some(first)) => first.assignment().keys().cloned().collect(),
            (None, None) => i.assignment().keys().cloned().collect(),
        };
        if !i.assignment().keys().eq(vars.iter()) {
            return Err(
                SyntaxError::new(pos, "model assigns different variables than the others").into(),
            );
        }
        members.push(i);
        cur.eat(&Tok::Semi);
    }
    let vars = declared.unwrap_or_else(|| {
        members
            .first()
            .map(|m| m.assignment().keys().cloned().collect())
            .unwrap_or_default()
    });
    let set = ModelSet::with_parts(members.clone(), vars, sig)?;
    Ok((set, members))
}

/// Prints `model { ... }` on one line.
pub(crate) fn write_structure_block(
    f: &mut fmt::Formatter<'_>,
    s: &Structure,
    assignment: &BTreeMap<Var, Elem>,
) -> fmt::Result {
    f.write_str("model { domain")?;
    for e in s.domain() {
        write!(f, " {e}")?;
    }
    for (name, rel) in s.relations() {
        if rel.tuples.is_empty() {
            continue;
        }
        write!(f, "; {name} =")?;
        for t in &rel.tuples {
            let items: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            write!(f, " ({})", items.join(","))?;
        }
    }
    if !assignment.is_empty() {
        f.write_str("; assign")?;
        for (v, a) in assignment {
            write!(f, " {v}={a}")?;
        }
    }
    f.write_str(" }")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "sig R/2 P/1\n\
        # two members\n\
        model { domain 0 1 2; R = (0,1) (1,2); P = (0); assign x=0 y=1 }\n\
        model { domain 0 1; P = 1; assign x=1 y=1 }\n";

    #[test]
    fn parses_sample() {
        let m = parse_model_set(SAMPLE).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.vars().len(), 2);
        assert_eq!(m.common_domain(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn print_parse_round_trip() {
        let m = parse_model_set(SAMPLE).unwrap();
        let again = parse_model_set(&m.to_string()).unwrap();
        assert_eq!(m, again);
        let empty = ModelSet::empty(
            BTreeSet::from([Symbol::new("x")]),
            Signature::new().with("P", 1),
        );
        assert_eq!(parse_model_set(&empty.to_string()).unwrap(), empty);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_model_set("sig R/2\nmodel { domain 0; R = (0) }").unwrap_err();
        let ModelError::Syntax(e) = err else { panic!() };
        assert_eq!(e.pos.line, 2);
        assert!(parse_model_set("sig P/1\nmodel { domain 0; P = (3) }").is_err());
        assert!(parse_model_set("sig P/1\nmodel { domain 0; Q = (0) }").is_err());
        assert!(parse_model_set("model { domain 0 }").is_err());
        assert!(
            parse_model_set("sig P/1\nmodel { domain 0; assign x=0 }\nmodel { domain 0 }").is_err()
        );
    }
}
