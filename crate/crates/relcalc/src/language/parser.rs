//! Recursive-descent parser for the concrete formula syntax.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! formula := impl
//! impl    := disj ("=>" impl)?          right-associative
//! disj    := conj ("|" conj)*
//! conj    := neg ("&" neg)*
//! neg     := "!" neg | prim
//! prim    := atom | "(" formula ")"
//! atom    := "irr" "(" varlist ";" varlist ";" varlist? ")"
//! varlist := NAME ("," NAME)* | nothing
//! ```
//!
//! Precedence is `!` over `&` over `|` over `=>`. Parsing happens in two
//! stages: a raw tree of name lists, then resolution against a signature.
//! [`parse_formula_set`] resolves against a signature inferred from the
//! names themselves, in order of first appearance.

use super::{Atom, Formula, LanguageError, Signature, VarSet};

/// A formula file resolved against an inferred signature.
#[derive(Debug, Clone)]
pub struct ParsedFormulaSet {
    pub sig: Signature,
    pub formulas: Vec<Formula>,
}

/// Parses a single formula against a known signature.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, LanguageError> {
    let raw = parse_raw(text)?;
    resolve(&raw, sig)
}

/// Parses a formula-set file: one formula per line, `#` starts a comment,
/// blank lines are ignored. The signature is inferred from the variable
/// names in order of first appearance and given placeholder binary domains;
/// calculus operations never consult domains.
pub fn parse_formula_set(text: &str) -> Result<ParsedFormulaSet, LanguageError> {
    let raws = parse_raw_lines(text)?;
    let mut names: Vec<String> = Vec::new();
    for raw in &raws {
        collect_names(raw, &mut names);
    }
    let sig = Signature::new(
        names.into_iter().map(|n| (n, vec!["0".into(), "1".into()])).collect(),
    )?;
    let formulas = raws.iter().map(|r| resolve(r, &sig)).collect::<Result<_, _>>()?;
    Ok(ParsedFormulaSet { sig, formulas })
}

/// Parses a formula-set file against a known signature.
pub fn parse_formula_set_with_sig(
    text: &str,
    sig: &Signature,
) -> Result<Vec<Formula>, LanguageError> {
    let raws = parse_raw_lines(text)?;
    raws.iter().map(|r| resolve(r, sig)).collect()
}

#[derive(Debug)]
enum Raw {
    Atom { x: Vec<(String, usize)>, y: Vec<(String, usize)>, z: Vec<(String, usize)> },
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
}

fn parse_raw_lines(text: &str) -> Result<Vec<Raw>, LanguageError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let body = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_raw(body)?);
    }
    Ok(out)
}

fn collect_names(raw: &Raw, names: &mut Vec<String>) {
    match raw {
        Raw::Atom { x, y, z } => {
            for (name, _) in x.iter().chain(y).chain(z) {
                if !names.iter().any(|n| n == name) {
                    names.push(name.clone());
                }
            }
        }
        Raw::Not(a) => collect_names(a, names),
        Raw::And(a, b) | Raw::Or(a, b) | Raw::Implies(a, b) => {
            collect_names(a, names);
            collect_names(b, names);
        }
    }
}

fn resolve(raw: &Raw, sig: &Signature) -> Result<Formula, LanguageError> {
    match raw {
        Raw::Atom { x, y, z } => {
            let rx = resolve_set(x, sig)?;
            let ry = resolve_set(y, sig)?;
            let rz = resolve_set(z, sig)?;
            Ok(Formula::Atom(Atom::new(rx, ry, rz)?))
        }
        Raw::Not(a) => Ok(Formula::not(resolve(a, sig)?)),
        Raw::And(a, b) => Ok(Formula::and(resolve(a, sig)?, resolve(b, sig)?)),
        Raw::Or(a, b) => Ok(Formula::or(resolve(a, sig)?, resolve(b, sig)?)),
        Raw::Implies(a, b) => Ok(Formula::implies(resolve(a, sig)?, resolve(b, sig)?)),
    }
}

fn resolve_set(names: &[(String, usize)], sig: &Signature) -> Result<VarSet, LanguageError> {
    let mut s = VarSet::EMPTY;
    for (name, _) in names {
        match sig.var_id(name) {
            Some(v) => s.insert(v),
            None => return Err(LanguageError::UnknownVariable(name.clone())),
        }
    }
    Ok(s)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn parse_raw(text: &str) -> Result<Raw, LanguageError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let f = p.impl_expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(f)
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> LanguageError {
        LanguageError::Syntax { pos: self.pos, expected: expected.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), LanguageError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("`{}`", b as char)))
        }
    }

    fn impl_expr(&mut self) -> Result<Raw, LanguageError> {
        let lhs = self.disj()?;
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"=>") {
            self.pos += 2;
            let rhs = self.impl_expr()?;
            Ok(Raw::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Raw, LanguageError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.conj()?;
            lhs = Raw::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Raw, LanguageError> {
        let mut lhs = self.neg()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.neg()?;
            lhs = Raw::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> Result<Raw, LanguageError> {
        if self.eat(b'!') {
            Ok(Raw::Not(Box::new(self.neg()?)))
        } else {
            self.prim()
        }
    }

    fn prim(&mut self) -> Result<Raw, LanguageError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.impl_expr()?;
                self.expect(b')')?;
                Ok(f)
            }
            Some(c) if is_ident_start(c) => self.atom(),
            _ => Err(self.err("`irr(`, `!`, or `(`")),
        }
    }

    fn atom(&mut self) -> Result<Raw, LanguageError> {
        self.skip_ws();
        let kw_pos = self.pos;
        let kw = self.ident()?;
        if kw.0 != "irr" {
            self.pos = kw_pos;
            return Err(self.err("`irr`"));
        }
        self.expect(b'(')?;
        let x = self.varlist()?;
        self.expect(b';')?;
        let y = self.varlist()?;
        self.expect(b';')?;
        let z = self.varlist()?;
        self.expect(b')')?;
        Ok(Raw::Atom { x, y, z })
    }

    fn varlist(&mut self) -> Result<Vec<(String, usize)>, LanguageError> {
        let mut out = Vec::new();
        match self.peek() {
            Some(c) if is_ident_start(c) => {
                out.push(self.ident()?);
                while self.eat(b',') {
                    out.push(self.ident()?);
                }
            }
            _ => {}
        }
        Ok(out)
    }

    fn ident(&mut self) -> Result<(String, usize), LanguageError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(&c) if is_ident_start(c) => self.pos += 1,
            _ => return Err(self.err("a variable name")),
        }
        while let Some(&c) = self.src.get(self.pos) {
            if is_ident_cont(c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        Ok((name, start))
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_cont(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::render_formula;

    fn sig(n: usize) -> Signature {
        Signature::uniform(n, &["0", "1"]).unwrap()
    }

    #[test]
    fn parses_atoms_with_set_components() {
        let s = sig(4);
        let f = parse_formula("irr(X3,X4; X1; )", &s).unwrap();
        match f {
            Formula::Atom(a) => {
                assert_eq!(a.x(), VarSet::from_iter([2, 3]));
                assert_eq!(a.y(), VarSet::singleton(0));
                assert!(a.z().is_empty());
            }
            other => panic!("expected atom, got {other:?}"),
        }
    }

    #[test]
    fn third_component_is_optional_but_semicolons_are_not() {
        let s = sig(2);
        assert!(parse_formula("irr(X1; X2;)", &s).is_ok());
        assert!(parse_formula("irr(X1; X2; )", &s).is_ok());
        let err = parse_formula("irr(X1; X2)", &s).unwrap_err();
        assert!(matches!(err, LanguageError::Syntax { .. }), "{err}");
    }

    #[test]
    fn precedence_binds_not_then_and_then_or_then_implies() {
        let s = sig(3);
        let f = parse_formula("!irr(X1; X2; ) & irr(X2; X3; ) | irr(X3; X1; ) => irr(X1; X3; )", &s)
            .unwrap();
        assert_eq!(
            render_formula(&f, &s),
            "(((!irr(X1; X2; ) & irr(X2; X3; )) | irr(X3; X1; )) => irr(X1; X3; ))"
        );
    }

    #[test]
    fn implies_is_right_associative() {
        let s = sig(2);
        let f = parse_formula("irr(X1; X2; ) => irr(X2; X1; ) => irr(X1; X2; )", &s).unwrap();
        assert_eq!(
            render_formula(&f, &s),
            "(irr(X1; X2; ) => (irr(X2; X1; ) => irr(X1; X2; )))"
        );
    }

    #[test]
    fn unknown_variable_and_overlap_are_rejected() {
        let s = sig(2);
        assert_eq!(
            parse_formula("irr(X9; X2; )", &s),
            Err(LanguageError::UnknownVariable("X9".into()))
        );
        assert!(matches!(
            parse_formula("irr(X1; X1; )", &s),
            Err(LanguageError::MalformedAtom(_))
        ));
        assert!(matches!(
            parse_formula("irr(; X1; )", &s),
            Err(LanguageError::MalformedAtom(_))
        ));
    }

    #[test]
    fn round_trips_canonical_rendering() {
        let s = sig(4);
        for text in [
            "irr(X1; X2,X4; )",
            "(irr(X1; X2; ) & !irr(X2; X1; ))",
            "((irr(X1; X2; X3) | !irr(X2; X1; )) => !!irr(X3,X4; X2; X1))",
        ] {
            let f = parse_formula(text, &s).unwrap();
            let printed = render_formula(&f, &s);
            let again = parse_formula(&printed, &s).unwrap();
            assert_eq!(f, again, "round trip failed for {text}");
        }
    }

    #[test]
    fn formula_set_infers_signature_in_appearance_order() {
        let text = "# ten literals\nirr(X3,X4; X1; )\n\n!irr(X2; X1; X3,X4) # trailing\n";
        let parsed = parse_formula_set(text).unwrap();
        let names: Vec<&str> =
            parsed.sig.vars().map(|v| parsed.sig.name(v)).collect();
        assert_eq!(names, vec!["X3", "X4", "X1", "X2"]);
        assert_eq!(parsed.formulas.len(), 2);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let s = sig(2);
        let a = parse_formula("irr( X1 , ; X2 ;)", &s);
        // a dangling comma is a syntax error, not whitespace
        assert!(a.is_err());
        let f1 = parse_formula("irr( X1 ; X2 ; )", &s).unwrap();
        let f2 = parse_formula("irr(X1;X2;)", &s).unwrap();
        assert_eq!(f1, f2);
    }
}
