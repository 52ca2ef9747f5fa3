//! Line-oriented text formats for instances, schemes, and certificates.
//!
//! All three formats share the same conventions: one record per line, the
//! first tokens name the record, blank lines and lines starting with `#`
//! are ignored, and all message and client indices are 1-based (client
//! numbers refer to positions in the canonical client order).
//!
//! Instance grammar:
//!
//! ```text
//! picod instance v1
//! messages <m>
//! clients <n>
//! client <v1> <v2> ...          # n of these, each a request set
//! ```
//!
//! Scheme grammar (rows may mix the two forms; `sparse` lists the support
//! of a row whose nonzero coefficients are all 1, `dense` lists all m
//! coefficients):
//!
//! ```text
//! picod scheme v1
//! field <p>
//! messages <m>
//! rows <r>
//! row sparse <v1> <v2> ...
//! row dense <c1> ... <cm>
//! ```
//!
//! Certificate grammar (`witness` bodies vary by kind; the embedded scheme
//! reuses the scheme row records):
//!
//! ```text
//! picod certificate v1
//! tool <free text>
//! instance sha256 <64 hex digits>
//! lower <k>
//! witness nesting strict|relaxed   # then `level ...` and `pair p a b` lines
//! witness chain-min                # then `choices`, `chain-clients`, `chain-demands`
//! witness no-length-one | trivial | empty
//! upper <k>
//! source <algorithm>
//! tight true|false
//! scheme field <p> messages <m> rows <r>
//! row ...
//! ```

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bounds::{
    validate_certificate, BoundCertificate, Budgets, CertificateError, ChainWitness, LowerWitness,
    NestedCollection, NestingMode, UpperSource,
};
use crate::gf::{FieldError, FieldOrder, RowMatrix};
use crate::instance::{ModelError, PicodInstance};
use crate::scheme::Scheme;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Tokenized view of a document: meaningful lines only, with their original
/// 1-based line numbers for error messages.
struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('#')
            })
            .map(|(i, l)| (i, l.split_whitespace().collect()))
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Option<&(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos);
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn end_line(&self) -> usize {
        self.items.last().map_or(1, |(n, _)| *n + 1)
    }

    /// Takes the next line, requiring its first token to be `key`.
    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        let end = self.end_line();
        match self.next() {
            Some((n, toks)) if toks[0] == key => Ok((*n, toks.clone())),
            Some((n, toks)) => Err(syntax(*n, format!("expected `{key}`, found `{}`", toks[0]))),
            None => Err(syntax(end, format!("expected `{key}`, found end of input"))),
        }
    }

    fn expect_done(&mut self) -> Result<(), FormatError> {
        match self.next() {
            None => Ok(()),
            Some((n, toks)) => Err(syntax(*n, format!("unexpected trailing `{}`", toks[0]))),
        }
    }
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("{what} `{tok}` is not a non-negative integer")))
}

fn expect_header(lines: &mut Lines, kind: &str) -> Result<(), FormatError> {
    let (n, toks) = lines
        .next()
        .cloned()
        .ok_or_else(|| syntax(1, "empty document"))?;
    if toks != vec!["picod", kind, "v1"] {
        return Err(syntax(n, format!("expected header `picod {kind} v1`")));
    }
    Ok(())
}

/// Takes one `<key> <int>` line.
fn expect_count(lines: &mut Lines, key: &str) -> Result<usize, FormatError> {
    let (n, toks) = lines.expect(key)?;
    if toks.len() != 2 {
        return Err(syntax(n, format!("`{key}` takes exactly one value")));
    }
    parse_usize(n, toks[1], key)
}

pub fn serialize_instance(inst: &PicodInstance) -> String {
    let mut out = String::from("picod instance v1\n");
    out.push_str(&format!("messages {}\n", inst.message_count()));
    out.push_str(&format!("clients {}\n", inst.client_count()));
    for set in inst.clients() {
        out.push_str("client");
        for v in set {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_instance(text: &str) -> Result<PicodInstance, FormatError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "instance")?;
    let messages = expect_count(&mut lines, "messages")?;
    let (count_line, toks) = lines.expect("clients")?;
    if toks.len() != 2 {
        return Err(syntax(count_line, "`clients` takes exactly one value"));
    }
    let n = parse_usize(count_line, toks[1], "clients")?;
    if n == 0 {
        return Err(syntax(count_line, "an instance must list at least one client"));
    }
    let mut sets = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, toks) = lines.expect("client")?;
        let set = toks[1..]
            .iter()
            .map(|t| parse_usize(line, t, "message index"))
            .collect::<Result<Vec<_>, _>>()?;
        sets.push(set);
    }
    lines.expect_done()?;
    Ok(PicodInstance::new(messages, sets)?)
}

/// Hex SHA-256 of the canonical instance serialization; certificates carry
/// it so `check` can refuse a certificate paired with the wrong instance.
pub fn instance_digest(inst: &PicodInstance) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serialize_instance(inst).as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn serialize_row(out: &mut String, matrix: &RowMatrix, r: usize) {
    let all_unit = (0..matrix.cols()).all(|c| matrix.get(r, c) <= 1);
    if all_unit {
        out.push_str("row sparse");
        for c in 0..matrix.cols() {
            if matrix.get(r, c) == 1 {
                out.push_str(&format!(" {}", c + 1));
            }
        }
    } else {
        out.push_str("row dense");
        for c in 0..matrix.cols() {
            out.push_str(&format!(" {}", matrix.get(r, c)));
        }
    }
    out.push('\n');
}

fn parse_row(
    line: usize,
    toks: &[&str],
    matrix: &mut RowMatrix,
    r: usize,
) -> Result<(), FormatError> {
    let m = matrix.cols();
    match toks.get(1) {
        Some(&"sparse") => {
            for t in &toks[2..] {
                let v = parse_usize(line, t, "message index")?;
                if v < 1 || v > m {
                    return Err(syntax(line, format!("message index {v} outside 1..={m}")));
                }
                matrix.set(r, v - 1, 1);
            }
            Ok(())
        }
        Some(&"dense") => {
            if toks.len() - 2 != m {
                return Err(syntax(
                    line,
                    format!("dense row needs {m} coefficients, found {}", toks.len() - 2),
                ));
            }
            for (c, t) in toks[2..].iter().enumerate() {
                let value = parse_usize(line, t, "coefficient")?;
                if value >= matrix.field().order() as usize {
                    return Err(syntax(
                        line,
                        format!("coefficient {value} not reduced modulo {}", matrix.field().order()),
                    ));
                }
                matrix.set(r, c, value as u16);
            }
            Ok(())
        }
        _ => Err(syntax(line, "row must be `row sparse ...` or `row dense ...`")),
    }
}

pub fn serialize_scheme(scheme: &Scheme) -> String {
    let mut out = String::from("picod scheme v1\n");
    out.push_str(&format!("field {}\n", scheme.field().order()));
    out.push_str(&format!("messages {}\n", scheme.message_count()));
    out.push_str(&format!("rows {}\n", scheme.length()));
    for r in 0..scheme.length() {
        serialize_row(&mut out, scheme.matrix(), r);
    }
    out
}

pub fn parse_scheme(text: &str) -> Result<Scheme, FormatError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "scheme")?;
    let field = FieldOrder::new(expect_count(&mut lines, "field")? as u64)?;
    let messages = expect_count(&mut lines, "messages")?;
    let rows = expect_count(&mut lines, "rows")?;
    let mut matrix = RowMatrix::zero(field, rows, messages);
    for r in 0..rows {
        let (line, toks) = lines.expect("row")?;
        parse_row(line, &toks, &mut matrix, r)?;
    }
    lines.expect_done()?;
    Ok(Scheme::new(matrix))
}

/// A parsed certificate document: the claim plus the instance digest it was
/// issued for.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateDocument {
    pub tool: String,
    pub digest: String,
    pub certificate: BoundCertificate,
}

fn witness_kind_line(witness: &LowerWitness) -> String {
    match witness {
        LowerWitness::Nesting {
            mode: NestingMode::Strict,
            ..
        } => "witness nesting strict".into(),
        LowerWitness::Nesting {
            mode: NestingMode::Relaxed,
            ..
        } => "witness nesting relaxed".into(),
        LowerWitness::MaisMin { .. } => "witness chain-min".into(),
        LowerWitness::NoLengthOne => "witness no-length-one".into(),
        LowerWitness::TrivialOne => "witness trivial".into(),
        LowerWitness::Empty => "witness empty".into(),
    }
}

fn source_name(source: UpperSource) -> &'static str {
    match source {
        UpperSource::LengthOne => "length-one",
        UpperSource::Oracle => "oracle",
        UpperSource::MinCover => "min-cover",
        UpperSource::DegreeDescending => "degree-descending",
        UpperSource::Grcov => "grcov",
    }
}

fn push_index_list(out: &mut String, key: &str, indices: &[usize], one_based: bool) {
    out.push_str(key);
    for &i in indices {
        out.push_str(&format!(" {}", if one_based { i + 1 } else { i }));
    }
    out.push('\n');
}

pub fn serialize_certificate(cert: &BoundCertificate, inst: &PicodInstance) -> String {
    let mut out = String::from("picod certificate v1\n");
    out.push_str(&format!("tool picod {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("instance sha256 {}\n", instance_digest(inst)));
    out.push_str(&format!("lower {}\n", cert.lower));
    out.push_str(&witness_kind_line(&cert.lower_witness));
    out.push('\n');
    match &cert.lower_witness {
        LowerWitness::Nesting { collection, .. } => {
            for level in &collection.levels {
                push_index_list(&mut out, "level", level, true);
            }
            for (&parent, &(a, b)) in &collection.child_pairs {
                out.push_str(&format!("pair {} {} {}\n", parent + 1, a + 1, b + 1));
            }
        }
        LowerWitness::MaisMin { choices, chain } => {
            push_index_list(&mut out, "choices", choices, false);
            push_index_list(&mut out, "chain-clients", &chain.clients, true);
            push_index_list(&mut out, "chain-demands", &chain.demands, false);
        }
        LowerWitness::NoLengthOne | LowerWitness::TrivialOne | LowerWitness::Empty => {}
    }
    out.push_str(&format!("upper {}\n", cert.upper));
    out.push_str(&format!("source {}\n", source_name(cert.upper_source)));
    out.push_str(&format!("tight {}\n", cert.tight));
    out.push_str(&format!(
        "scheme field {} messages {} rows {}\n",
        cert.scheme.field().order(),
        cert.scheme.message_count(),
        cert.scheme.length()
    ));
    for r in 0..cert.scheme.length() {
        serialize_row(&mut out, cert.scheme.matrix(), r);
    }
    out
}

fn parse_one_based_list(line: usize, toks: &[&str], what: &str) -> Result<Vec<usize>, FormatError> {
    toks.iter()
        .map(|t| {
            let v = parse_usize(line, t, what)?;
            if v == 0 {
                return Err(syntax(line, format!("{what} indices are 1-based")));
            }
            Ok(v - 1)
        })
        .collect()
}

pub fn parse_certificate(text: &str) -> Result<CertificateDocument, FormatError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "certificate")?;
    let (_, tool_toks) = lines.expect("tool")?;
    let tool = tool_toks[1..].join(" ");
    let (dline, dtoks) = lines.expect("instance")?;
    if dtoks.len() != 3 || dtoks[1] != "sha256" {
        return Err(syntax(dline, "expected `instance sha256 <hex>`"));
    }
    let digest = dtoks[2].to_string();
    if digest.len() != 64 || !digest.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(syntax(dline, "digest must be 64 hex digits"));
    }
    let lower = expect_count(&mut lines, "lower")?;

    let (wline, wtoks) = lines.expect("witness")?;
    let lower_witness = match wtoks.get(1) {
        Some(&"nesting") => {
            let mode = match wtoks.get(2) {
                Some(&"strict") => NestingMode::Strict,
                Some(&"relaxed") => NestingMode::Relaxed,
                _ => return Err(syntax(wline, "nesting witness must be strict or relaxed")),
            };
            let mut collection = NestedCollection::default();
            while let Some((line, toks)) = lines.peek().cloned() {
                match toks[0] {
                    "level" => {
                        lines.next();
                        collection
                            .levels
                            .push(parse_one_based_list(line, &toks[1..], "client")?);
                    }
                    "pair" => {
                        lines.next();
                        if toks.len() != 4 {
                            return Err(syntax(line, "expected `pair <parent> <a> <b>`"));
                        }
                        let ids = parse_one_based_list(line, &toks[1..], "client")?;
                        collection.child_pairs.insert(ids[0], (ids[1], ids[2]));
                    }
                    _ => break,
                }
            }
            LowerWitness::Nesting { mode, collection }
        }
        Some(&"chain-min") => {
            let (cl, ctoks) = lines.expect("choices")?;
            let choices = ctoks[1..]
                .iter()
                .map(|t| parse_usize(cl, t, "demand"))
                .collect::<Result<Vec<_>, _>>()?;
            let (kl, ktoks) = lines.expect("chain-clients")?;
            let clients = parse_one_based_list(kl, &ktoks[1..], "client")?;
            let (dl, dtoks2) = lines.expect("chain-demands")?;
            let demands = dtoks2[1..]
                .iter()
                .map(|t| parse_usize(dl, t, "demand"))
                .collect::<Result<Vec<_>, _>>()?;
            LowerWitness::MaisMin {
                choices,
                chain: ChainWitness { clients, demands },
            }
        }
        Some(&"no-length-one") => LowerWitness::NoLengthOne,
        Some(&"trivial") => LowerWitness::TrivialOne,
        Some(&"empty") => LowerWitness::Empty,
        _ => return Err(syntax(wline, "unknown witness kind")),
    };

    let upper = expect_count(&mut lines, "upper")?;
    let (sline, stoks) = lines.expect("source")?;
    let upper_source = match stoks.get(1) {
        Some(&"length-one") => UpperSource::LengthOne,
        Some(&"oracle") => UpperSource::Oracle,
        Some(&"min-cover") => UpperSource::MinCover,
        Some(&"degree-descending") => UpperSource::DegreeDescending,
        Some(&"grcov") => UpperSource::Grcov,
        _ => return Err(syntax(sline, "unknown upper-bound source")),
    };
    let (tline, ttoks) = lines.expect("tight")?;
    let tight = match ttoks.get(1) {
        Some(&"true") => true,
        Some(&"false") => false,
        _ => return Err(syntax(tline, "tight must be true or false")),
    };

    let (mline, mtoks) = lines.expect("scheme")?;
    if mtoks.len() != 7
        || mtoks[1] != "field"
        || mtoks[3] != "messages"
        || mtoks[5] != "rows"
    {
        return Err(syntax(
            mline,
            "expected `scheme field <p> messages <m> rows <r>`",
        ));
    }
    let field = FieldOrder::new(parse_usize(mline, mtoks[2], "field")? as u64)?;
    let messages = parse_usize(mline, mtoks[4], "messages")?;
    let rows = parse_usize(mline, mtoks[6], "rows")?;
    let mut matrix = RowMatrix::zero(field, rows, messages);
    for r in 0..rows {
        let (line, toks) = lines.expect("row")?;
        parse_row(line, &toks, &mut matrix, r)?;
    }
    lines.expect_done()?;

    Ok(CertificateDocument {
        tool,
        digest,
        certificate: BoundCertificate {
            lower,
            lower_witness,
            upper,
            upper_source,
            scheme: Scheme::new(matrix),
            tight,
        },
    })
}

/// Why a certificate document is rejected against a given instance.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("certificate was issued for a different instance (digest mismatch)")]
    DigestMismatch,
    #[error(transparent)]
    Invalid(#[from] CertificateError),
}

/// Full check of a parsed certificate against an instance: digest match
/// plus witness re-validation.
pub fn check_certificate(
    inst: &PicodInstance,
    doc: &CertificateDocument,
    budgets: &Budgets,
) -> Result<(), CheckError> {
    if doc.digest != instance_digest(inst) {
        return Err(CheckError::DigestMismatch);
    }
    validate_certificate(inst, &doc.certificate, budgets)?;
    Ok(())
}
