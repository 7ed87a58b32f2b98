//! Perspective text format: a `sig` header, optional `vars`, then one
//! `persp { ... }` block whose elements are either all `model { ... }`
//! blocks (rank 1) or all `persp { ... }` blocks.
//!
//! ```text
//! sig even/1 odd/1
//! persp {
//!   persp { model { domain 0 1; even = 0; odd = 1; assign x=0 } }
//!   persp { }
//! }
//! ```
//!
//! An empty `persp { }` takes its rank from its siblings, or from its parent
//! when it has none.

use std::collections::BTreeSet;
use std::fmt;

use super::{PerspError, Perspective};
use crate::formula::Signature;
use crate::lex::{Cursor, Pos, SyntaxError, Tok};
use crate::model::{
    parse_model_block, parse_vars, require_sig, write_structure_block, Interpretation, ModelError,
    ModelSet,
};
use crate::symbol::Var;

enum Raw {
    Models(Vec<(Interpretation, Pos)>),
    Nested(Vec<Raw>, Pos),
    Empty,
}

fn syntax(pos: Pos, msg: impl Into<String>) -> PerspError {
    PerspError::Model(ModelError::Syntax(SyntaxError::new(pos, msg)))
}

fn parse_block(cur: &mut Cursor, sig: &Signature) -> Result<Raw, PerspError> {
    let pos = cur.pos();
    if !cur.is_keyword("persp") {
        return Err(syntax(
            pos,
            format!("expected `persp`, found {}", cur.peek()),
        ));
    }
    cur.bump();
    cur.expect(&Tok::LBrace).map_err(ModelError::from)?;
    let mut models = Vec::new();
    let mut nested = Vec::new();
    loop {
        if cur.eat(&Tok::Semi) {
            continue;
        }
        if cur.eat(&Tok::RBrace) {
            break;
        }
        let at = cur.pos();
        if cur.is_keyword("model") {
            let (s, a) = parse_model_block(cur, sig)?;
            let i = Interpretation::new(s, a).map_err(|e| syntax(at, e.to_string()))?;
            models.push((i, at));
        } else if cur.is_keyword("persp") {
            nested.push(parse_block(cur, sig)?);
        } else {
            return Err(syntax(
                at,
                format!("expected `model` or `persp`, found {}", cur.peek()),
            ));
        }
        if !models.is_empty() && !nested.is_empty() {
            return Err(syntax(at, "a perspective mixes models and perspectives"));
        }
    }
    Ok(match (models.is_empty(), nested.is_empty()) {
        (true, true) => Raw::Empty,
        (false, _) => Raw::Models(models),
        (_, false) => Raw::Nested(nested, pos),
    })
}

/// The rank forced by the contents, if any.
fn intrinsic(raw: &Raw) -> Result<Option<usize>, PerspError> {
    match raw {
        Raw::Models(_) => Ok(Some(1)),
        Raw::Empty => Ok(None),
        Raw::Nested(children, pos) => {
            let mut rank = None;
            for c in children {
                if let Some(r) = intrinsic(c)? {
                    if rank.is_some_and(|s| s != r) {
                        return Err(syntax(*pos, "sibling perspectives have different ranks"));
                    }
                    rank = Some(r);
                }
            }
            Ok(Some(rank.unwrap_or(1) + 1))
        }
    }
}

fn build(
    raw: Raw,
    rank: usize,
    vars: &Option<BTreeSet<Var>>,
    sig: &Signature,
) -> Result<Perspective, PerspError> {
    match raw {
        Raw::Empty => Perspective::empty(rank, vars.clone().unwrap_or_default(), sig.clone()),
        Raw::Models(members) => {
            let first = &members[0];
            let domain: BTreeSet<Var> = match vars {
                Some(v) => v.clone(),
                None => first.0.assignment().keys().cloned().collect(),
            };
            if let Some((_, pos)) = members
                .iter()
                .find(|(i, _)| !i.assignment().keys().eq(domain.iter()))
            {
                return Err(syntax(
                    *pos,
                    "model assigns different variables than the others",
                ));
            }
            let m = ModelSet::with_parts(members.into_iter().map(|(i, _)| i), domain, sig.clone())?;
            Ok(Perspective::Models(m))
        }
        Raw::Nested(children, _) => {
            let children = children
                .into_iter()
                .map(|c| build(c, rank - 1, vars, sig))
                .collect::<Result<Vec<_>, _>>()?;
            Perspective::nested_with_rank(rank, children)
        }
    }
}

pub fn parse_perspective(text: &str) -> Result<Perspective, PerspError> {
    let mut cur = Cursor::new(text).map_err(ModelError::from)?;
    let sig = require_sig(&mut cur).map_err(ModelError::from)?;
    let vars = parse_vars(&mut cur).map_err(ModelError::from)?;
    let raw = parse_block(&mut cur, &sig)?;
    cur.eat(&Tok::Semi);
    if !cur.at_eof() {
        return Err(syntax(
            cur.pos(),
            "expected end of input after the perspective",
        ));
    }
    let rank = intrinsic(&raw)?.unwrap_or(1);
    build(raw, rank, &vars, &sig)
}

fn indent(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    write!(f, "{:width$}", "", width = depth * 2)
}

fn write_block(f: &mut fmt::Formatter<'_>, p: &Perspective, depth: usize) -> fmt::Result {
    indent(f, depth)?;
    if p.is_empty() {
        return writeln!(f, "persp {{ }}");
    }
    writeln!(f, "persp {{")?;
    match p {
        Perspective::Models(m) => {
            for i in m.members() {
                indent(f, depth + 1)?;
                write_structure_block(f, i.structure(), i.assignment())?;
                writeln!(f)?;
            }
        }
        Perspective::Nested { children, .. } => {
            for c in children {
                write_block(f, c, depth + 1)?;
            }
        }
    }
    indent(f, depth)?;
    writeln!(f, "}}")
}

pub(super) fn write_perspective(f: &mut fmt::Formatter<'_>, p: &Perspective) -> fmt::Result {
    let sig = p.signature().cloned().unwrap_or_default();
    writeln!(f, "{sig}")?;
    let vars: Option<BTreeSet<Var>> = first_vars(p);
    if let Some(v) = vars.filter(|v| !v.is_empty()) {
        f.write_str("vars")?;
        for x in v {
            write!(f, " {x}")?;
        }
        writeln!(f, ";")?;
    }
    write_block(f, p, 0)
}

fn first_vars(p: &Perspective) -> Option<BTreeSet<Var>> {
    match p {
        Perspective::Models(m) => Some(m.vars().clone()),
        Perspective::Nested { children, .. } => children.iter().find_map(first_vars),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NESTED: &str = "sig p/1 q/1\n\
        persp {\n\
          persp { model { domain 0 1; p = 0; assign x=0 } model { domain 0 1; q = 1; assign x=1 } }\n\
          persp { }\n\
          persp { model { domain 0 1; assign x=1 } }\n\
        }\n";

    #[test]
    fn parses_nested() {
        let p = parse_perspective(NESTED).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.len(), 3);
        assert!(p.is_regular());
        assert!(!p.is_strongly_regular());
    }

    #[test]
    fn round_trip() {
        let p = parse_perspective(NESTED).unwrap();
        assert_eq!(parse_perspective(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn empty_takes_rank_from_parent() {
        let p = parse_perspective("sig p/1\npersp { persp { persp { } } }").unwrap();
        assert_eq!(p.rank(), 3);
        assert_eq!(p.children()[0].rank(), 2);
    }

    #[test]
    fn rejects_mixed_and_mismatched() {
        assert!(parse_perspective("sig p/1\npersp { model { domain 0 } persp { } }").is_err());
        let err = parse_perspective(
            "sig p/1\npersp {\n persp { model { domain 0 } }\n persp { persp { model { domain 0 } } }\n}",
        )
        .unwrap_err();
        assert!(err.to_string().contains("different ranks"), "{err}");
    }
}
