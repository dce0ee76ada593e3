//! Reader and writer for the Turtle subset used by preambles, ontologies and
//! indicator catalogs.
//!
//! Supported: `@prefix` (and SPARQL-style `PREFIX`), `<iri>`, prefixed names,
//! `_:label` blank nodes, `"..."` literals with escapes, `^^datatype`,
//! `@lang`, bare integers/decimals/doubles/booleans, the `a` keyword,
//! predicate lists (`;`), object lists (`,`) and `#` comments. Collections,
//! `[ ... ]` blank nodes, long strings and `@base` are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::graph::Graph;
use super::term::{valid_iri, Literal, Term, Triple};
use super::RdfError;
use crate::ns::{RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

pub fn parse_turtle(text: &str) -> Result<Graph, RdfError> {
    Parser::new(text).parse_document()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    graph: Graph,
}

#[derive(Clone, Copy)]
struct Mark {
    line: usize,
    column: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut chars: Vec<char> = text.chars().collect();
        if chars.first() == Some(&'\u{feff}') {
            chars.remove(0);
        }
        Parser {
            chars,
            pos: 0,
            line: 1,
            column: 1,
            graph: Graph::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Mark {
        Mark {
            line: self.line,
            column: self.column,
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    /// Text of the token starting at the cursor, for error messages.
    fn token_here(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let tok: String = self.chars[self.pos..]
                    .iter()
                    .take_while(|c| !c.is_whitespace())
                    .take(24)
                    .collect();
                tok
            }
        }
    }

    fn error_at(&self, mark: Mark, token: impl Into<String>, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: mark.line,
            column: mark.column,
            token: token.into(),
            message: message.into(),
        }
    }

    fn error_here(&self, message: impl Into<String>) -> RdfError {
        self.error_at(self.mark(), self.token_here(), message)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RdfError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{c}'")))
        }
    }

    fn parse_document(mut self) -> Result<Graph, RdfError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(self.graph);
            }
            if self.starts_with("@prefix") {
                for _ in 0.."@prefix".len() {
                    self.bump();
                }
                self.parse_prefix_decl(true)?;
            } else if self.keyword_ahead("PREFIX") {
                for _ in 0.."PREFIX".len() {
                    self.bump();
                }
                self.parse_prefix_decl(false)?;
            } else if self.peek() == Some('@') {
                return Err(self.error_here("unsupported directive"));
            } else {
                self.parse_triples()?;
                self.expect('.')?;
            }
        }
    }

    fn keyword_ahead(&self, kw: &str) -> bool {
        self.chars.len() >= self.pos + kw.len()
            && self.chars[self.pos..self.pos + kw.len()]
                .iter()
                .zip(kw.chars())
                .all(|(a, b)| a.eq_ignore_ascii_case(&b))
            && self.peek_at(kw.len()).map(|c| c.is_whitespace()).unwrap_or(false)
    }

    fn parse_prefix_decl(&mut self, dotted: bool) -> Result<(), RdfError> {
        self.skip_ws();
        let mark = self.mark();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if c.is_whitespace() {
                return Err(self.error_at(mark, label, "expected ':' after prefix label"));
            }
            label.push(c);
            self.bump();
        }
        if self.peek() != Some(':') {
            return Err(self.error_at(mark, label, "expected ':' after prefix label"));
        }
        self.bump();
        if !super::graph::valid_prefix_label(&label) {
            return Err(self.error_at(mark, format!("{label}:"), "invalid prefix label"));
        }
        self.skip_ws();
        let iri = self.parse_iriref()?;
        self.graph
            .set_prefix(&label, &iri)
            .map_err(|_| self.error_at(mark, format!("{label}:"), "invalid prefix declaration"))?;
        if dotted {
            self.expect('.')?;
        }
        Ok(())
    }

    fn parse_iriref(&mut self) -> Result<String, RdfError> {
        let mark = self.mark();
        if self.peek() != Some('<') {
            return Err(self.error_here("expected '<'"));
        }
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(mark, format!("<{iri}"), "unterminated IRI")),
                Some('>') => break,
                Some(c) => iri.push(c),
            }
        }
        if !valid_iri(&iri) {
            return Err(self.error_at(mark, format!("<{iri}>"), "invalid IRI"));
        }
        Ok(iri)
    }

    fn parse_triples(&mut self) -> Result<(), RdfError> {
        let subject = self.parse_subject()?;
        loop {
            self.skip_ws();
            let predicate = self.parse_verb()?;
            loop {
                self.skip_ws();
                let object = self.parse_object()?;
                self.graph
                    .insert(Triple::unchecked(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                    continue;
                }
                break;
            }
            self.skip_ws();
            if self.peek() == Some(';') {
                while self.peek() == Some(';') {
                    self.bump();
                    self.skip_ws();
                }
                // A trailing ';' before '.' is legal.
                if self.peek() == Some('.') {
                    return Ok(());
                }
                continue;
            }
            return Ok(());
        }
    }

    fn parse_subject(&mut self) -> Result<Term, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iriref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.parse_blank(),
            Some('"') => Err(self.error_here("literal cannot be a subject")),
            Some('[') | Some('(') => Err(self.error_here("anonymous nodes and collections are not supported")),
            Some(_) => self.parse_prefixed_name(),
            None => Err(self.error_here("expected subject")),
        }
    }

    fn parse_verb(&mut self) -> Result<Term, RdfError> {
        if self.peek() == Some('a')
            && self
                .peek_at(1)
                .map(|c| c.is_whitespace() || c == '<' || c == '_' || c == '"')
                .unwrap_or(false)
        {
            self.bump();
            return Ok(Term::Iri(RDF_TYPE.to_string()));
        }
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iriref()?)),
            Some('_') | Some('"') | Some('[') | Some('(') => Err(self.error_here("predicate must be an IRI")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => Err(self.error_here("predicate must be an IRI")),
            Some(_) => self.parse_prefixed_name(),
            None => Err(self.error_here("expected predicate")),
        }
    }

    fn parse_object(&mut self) -> Result<Term, RdfError> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iriref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.parse_blank(),
            Some('"') => self.parse_literal(),
            Some('[') | Some('(') => Err(self.error_here("anonymous nodes and collections are not supported")),
            Some(c)
                if c.is_ascii_digit()
                    || c == '+'
                    || c == '-'
                    || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                self.parse_number()
            }
            Some(_) if self.word_ahead("true") => {
                for _ in 0..4 {
                    self.bump();
                }
                Ok(Term::typed_literal("true", XSD_BOOLEAN))
            }
            Some(_) if self.word_ahead("false") => {
                for _ in 0..5 {
                    self.bump();
                }
                Ok(Term::typed_literal("false", XSD_BOOLEAN))
            }
            Some(_) => self.parse_prefixed_name(),
            None => Err(self.error_here("expected object")),
        }
    }

    fn word_ahead(&self, word: &str) -> bool {
        self.starts_with(word)
            && !self
                .peek_at(word.len())
                .map(|c| c.is_alphanumeric() || c == ':' || c == '_' || c == '-')
                .unwrap_or(false)
    }

    fn parse_blank(&mut self) -> Result<Term, RdfError> {
        let mark = self.mark();
        self.bump();
        self.bump();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Term::blank(label.clone()).map_err(|_| self.error_at(mark, format!("_:{label}"), "invalid blank node label"))
    }

    fn parse_prefixed_name(&mut self) -> Result<Term, RdfError> {
        let mark = self.mark();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() != Some(':') {
            let tok = if label.is_empty() { self.token_here() } else { label };
            return Err(self.error_at(mark, tok, "unexpected token"));
        }
        self.bump();
        let mut local = String::new();
        let mut raw_len_after_last_non_dot = 0usize;
        let mut trailing_dots = 0usize;
        loop {
            match self.peek() {
                Some('\\') => {
                    let esc = self.peek_at(1);
                    match esc {
                        Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                            self.bump();
                            self.bump();
                            local.push(e);
                            raw_len_after_last_non_dot = local.len();
                            trailing_dots = 0;
                        }
                        _ => return Err(self.error_here("invalid escape in local name")),
                    }
                }
                Some('%') => {
                    let h1 = self.peek_at(1);
                    let h2 = self.peek_at(2);
                    if h1.is_some_and(|c| c.is_ascii_hexdigit()) && h2.is_some_and(|c| c.is_ascii_hexdigit()) {
                        for _ in 0..3 {
                            let c = self.bump().unwrap();
                            local.push(c);
                        }
                        raw_len_after_last_non_dot = local.len();
                        trailing_dots = 0;
                    } else {
                        return Err(self.error_here("invalid percent escape in local name"));
                    }
                }
                Some('.') => {
                    // Only part of the name when followed by more name characters.
                    let next = self.peek_at(1);
                    if next.is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '%' | '\\')) {
                        self.bump();
                        local.push('.');
                        trailing_dots += 1;
                    } else {
                        break;
                    }
                }
                Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | ':') => {
                    self.bump();
                    local.push(c);
                    raw_len_after_last_non_dot = local.len();
                    trailing_dots = 0;
                }
                _ => break,
            }
        }
        if trailing_dots > 0 {
            // Dots ending the name belong to the statement terminator.
            local.truncate(raw_len_after_last_non_dot);
            for _ in 0..trailing_dots {
                self.pos -= 1;
                self.column -= 1;
            }
        }
        match self.graph.prefixes().get(&label) {
            Some(ns) => {
                let iri = format!("{ns}{local}");
                if valid_iri(&iri) {
                    Ok(Term::Iri(iri))
                } else {
                    Err(self.error_at(
                        mark,
                        format!("{label}:{local}"),
                        "prefixed name expands to an invalid IRI",
                    ))
                }
            }
            None => Err(RdfError::UnknownPrefix {
                prefix: label,
                line: mark.line,
                column: mark.column,
            }),
        }
    }

    fn parse_literal(&mut self) -> Result<Term, RdfError> {
        let mark = self.mark();
        if self.starts_with("\"\"\"") {
            return Err(self.error_here("long string literals are not supported"));
        }
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(mark, format!("\"{lexical}"), "unterminated string")),
                Some('\n') | Some('\r') => {
                    return Err(self.error_at(mark, format!("\"{lexical}"), "newline in string literal"))
                }
                Some('"') => break,
                Some('\\') => {
                    let esc_mark = self.mark();
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.parse_hex_escape(4, esc_mark)?,
                        Some('U') => self.parse_hex_escape(8, esc_mark)?,
                        other => {
                            let tok = other.map(|c| format!("\\{c}")).unwrap_or_else(|| "\\".into());
                            return Err(self.error_at(esc_mark, tok, "invalid string escape"));
                        }
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        if self.peek() == Some('@') {
            self.bump();
            let lang_mark = self.mark();
            let mut lang = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    lang.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            let valid = !lang.is_empty()
                && lang.split('-').all(|part| !part.is_empty())
                && lang.split('-').next().unwrap().chars().all(|c| c.is_ascii_alphabetic());
            if !valid {
                return Err(self.error_at(lang_mark, format!("@{lang}"), "invalid language tag"));
            }
            return Ok(Term::Literal(Literal::lang(lexical, lang)));
        }
        if self.starts_with("^^") {
            self.bump();
            self.bump();
            let dt = match self.peek() {
                Some('<') => self.parse_iriref()?,
                Some(_) => match self.parse_prefixed_name()? {
                    Term::Iri(iri) => iri,
                    _ => unreachable!("prefixed names expand to IRIs"),
                },
                None => return Err(self.error_here("expected datatype IRI")),
            };
            return Ok(Term::typed_literal(lexical, dt));
        }
        Ok(Term::literal(lexical))
    }

    fn parse_hex_escape(&mut self, digits: usize, mark: Mark) -> Result<char, RdfError> {
        let mut hex = String::new();
        for _ in 0..digits {
            match self.peek() {
                Some(c) if c.is_ascii_hexdigit() => {
                    hex.push(c);
                    self.bump();
                }
                _ => return Err(self.error_at(mark, format!("\\u{hex}"), "invalid unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error_at(mark, format!("\\u{hex}"), "invalid unicode code point"))
    }

    fn parse_number(&mut self) -> Result<Term, RdfError> {
        let mark = self.mark();
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            text.push(c);
            self.bump();
            int_digits += 1;
        }
        let mut frac_digits = 0;
        let mut has_dot = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            has_dot = true;
            text.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                text.push(c);
                self.bump();
                frac_digits += 1;
            }
        }
        let mut has_exp = false;
        if let Some(e @ ('e' | 'E')) = self.peek() {
            has_exp = true;
            text.push(e);
            self.bump();
            if let Some(s @ ('+' | '-')) = self.peek() {
                text.push(s);
                self.bump();
            }
            let mut exp_digits = 0;
            while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                text.push(c);
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return Err(self.error_at(mark, text, "malformed exponent"));
            }
        }
        if int_digits + frac_digits == 0 {
            return Err(self.error_at(mark, text, "malformed number"));
        }
        let datatype = if has_exp {
            XSD_DOUBLE
        } else if has_dot {
            XSD_DECIMAL
        } else {
            XSD_INTEGER
        };
        Ok(Term::typed_literal(text, datatype))
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn safe_local(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    let first = local.chars().next().unwrap();
    let last = local.chars().last().unwrap();
    (first.is_ascii_alphanumeric() || first == '_')
        && last != '.'
        && local
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

struct Abbreviator<'a> {
    // Longest namespaces first so the most specific prefix wins.
    namespaces: Vec<(&'a str, &'a str)>,
}

impl<'a> Abbreviator<'a> {
    fn new(prefixes: &'a BTreeMap<String, String>) -> Self {
        let mut namespaces: Vec<(&str, &str)> = prefixes
            .iter()
            .map(|(label, ns)| (label.as_str(), ns.as_str()))
            .collect();
        namespaces.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
        Abbreviator { namespaces }
    }

    fn iri(&self, iri: &str) -> String {
        for (label, ns) in &self.namespaces {
            if let Some(local) = iri.strip_prefix(ns) {
                if safe_local(local) {
                    return format!("{label}:{local}");
                }
            }
        }
        format!("<{iri}>")
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::BlankNode(label) => format!("_:{label}"),
            Term::Literal(lit) => {
                let mut out = format!("\"{}\"", escape_string(lit.lexical()));
                if let Some(lang) = lit.language() {
                    out.push('@');
                    out.push_str(lang);
                } else if let Some(dt) = lit.datatype() {
                    out.push_str("^^");
                    out.push_str(&self.iri(dt));
                }
                out
            }
        }
    }
}

/// Writes the graph as Turtle: prefix declarations sorted by label, then one
/// block per subject with `;`/`,` grouping, in the graph's term order.
pub fn serialize_turtle(g: &Graph) -> String {
    let abbrev = Abbreviator::new(g.prefixes());
    let mut out = String::new();
    for (label, ns) in g.prefixes() {
        let _ = writeln!(out, "@prefix {label}: <{ns}> .");
    }
    let mut current_subject: Option<&Term> = None;
    let mut current_predicate: Option<&Term> = None;
    for t in g.iter() {
        if current_subject != Some(t.subject()) {
            if current_subject.is_some() {
                out.push_str(" .\n");
            }
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&abbrev.term(t.subject()));
            out.push(' ');
            current_subject = Some(t.subject());
            current_predicate = None;
        }
        if current_predicate == Some(t.predicate()) {
            out.push_str(" , ");
        } else {
            if current_predicate.is_some() {
                out.push_str(" ;\n    ");
            }
            let p = t.predicate().as_iri().unwrap_or_default();
            if p == RDF_TYPE {
                out.push('a');
            } else {
                out.push_str(&abbrev.iri(p));
            }
            out.push(' ');
            current_predicate = Some(t.predicate());
        }
        out.push_str(&abbrev.term(t.object()));
    }
    if current_subject.is_some() {
        out.push_str(" .\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_empty_graph() {
        assert_eq!(parse_turtle("").unwrap().len(), 0);
        assert_eq!(parse_turtle("  # just a comment\n").unwrap().len(), 0);
    }

    #[test]
    fn single_statement() {
        let g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p ex:b .").unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject(), &Term::Iri("http://ex.org/a".into()));
        assert_eq!(t.predicate(), &Term::Iri("http://ex.org/p".into()));
        assert_eq!(t.object(), &Term::Iri("http://ex.org/b".into()));
    }

    #[test]
    fn predicate_and_object_lists() {
        let text = "@prefix ex: <http://ex.org/> .\r\nex:a ex:p ex:b , ex:c ;\r\n  a ex:T ;\n  ex:q \"x\"@en, \"1\"^^ex:int, 42, -1.5, 2e3, true ; .";
        let g = parse_turtle(text).unwrap();
        assert_eq!(g.len(), 9);
        let a = Term::Iri("http://ex.org/a".into());
        let q = Term::Iri("http://ex.org/q".into());
        let objs: Vec<_> = g.objects(&a, &q).cloned().collect();
        assert!(objs.contains(&Term::typed_literal("42", XSD_INTEGER)));
        assert!(objs.contains(&Term::typed_literal("-1.5", XSD_DECIMAL)));
        assert!(objs.contains(&Term::typed_literal("2e3", XSD_DOUBLE)));
        assert!(objs.contains(&Term::typed_literal("true", XSD_BOOLEAN)));
        assert!(objs.contains(&Term::Literal(Literal::lang("x", "en"))));
    }

    #[test]
    fn dotted_local_names_and_statement_end() {
        let g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a.b ex:p ex:c.").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject(), &Term::Iri("http://ex.org/a.b".into()));
        assert_eq!(t.object(), &Term::Iri("http://ex.org/c".into()));
    }

    #[test]
    fn string_escapes() {
        let g = parse_turtle(r#"<http://a> <http://p> "q\"\\\n\té" ."#).unwrap();
        let lit = g.iter().next().unwrap().object().as_literal().unwrap().clone();
        assert_eq!(lit.lexical(), "q\"\\\n\té");
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_turtle("@prefix ex: <http://ex.org/> .\nex:a ex:p ;").unwrap_err();
        match err {
            RdfError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_turtle("<http://a> <http://p> \"open").unwrap_err();
        assert!(matches!(
            err,
            RdfError::Syntax {
                line: 1,
                column: 23,
                ..
            }
        ));
    }

    #[test]
    fn unknown_prefix_is_reported() {
        let err = parse_turtle("ex:a ex:p ex:b .").unwrap_err();
        assert!(matches!(
            err,
            RdfError::UnknownPrefix { ref prefix, line: 1, column: 1 } if prefix == "ex"
        ));
    }

    #[test]
    fn unsupported_constructs_are_rejected() {
        for text in [
            "<http://a> <http://p> [ <http://q> 1 ] .",
            "<http://a> <http://p> ( 1 2 ) .",
            "@base <http://ex.org/> .",
            "<http://a> <http://p> \"\"\"long\"\"\" .",
            "\"lit\" <http://p> <http://o> .",
            "<http://a> _:b <http://o> .",
        ] {
            assert!(
                matches!(parse_turtle(text), Err(RdfError::Syntax { .. })),
                "accepted {text}"
            );
        }
    }

    #[test]
    fn serializer_abbreviates_and_groups() {
        let text = "@prefix ex: <http://ex.org/> .\nex:a ex:p ex:b , ex:c ; a ex:T .";
        let g = parse_turtle(text).unwrap();
        let out = serialize_turtle(&g);
        assert_eq!(
            out,
            "@prefix ex: <http://ex.org/> .\n\nex:a ex:p ex:b , ex:c ;\n    a ex:T .\n"
        );
        let back = parse_turtle(&out).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn unsafe_locals_are_written_in_full() {
        let mut g = Graph::new();
        g.set_prefix("ex", "http://ex.org/").unwrap();
        g.add(
            Term::iri("http://ex.org/inst/Station/s1").unwrap(),
            "http://ex.org/p",
            Term::literal("v"),
        )
        .unwrap();
        let out = serialize_turtle(&g);
        assert!(out.contains("<http://ex.org/inst/Station/s1> ex:p \"v\" ."));
        assert_eq!(parse_turtle(&out).unwrap(), g);
    }

    #[test]
    fn empty_graph_serializes_to_prefixes_only() {
        let mut g = Graph::new();
        assert_eq!(serialize_turtle(&g), "");
        g.set_prefix("ex", "http://ex.org/").unwrap();
        assert_eq!(serialize_turtle(&g), "@prefix ex: <http://ex.org/> .\n");
    }
}
