//! The line-oriented `.abd` instance format.
//!
//! ```text
//! rel IMP 2 00 01 11
//! con IMP x y
//! hyp x
//! man y
//! size 1
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{AbdError, Result};
use crate::model::{parse_bitstring, AbductionInstance, ConstraintLanguage, NamedConstraint, Relation, MAX_ARITY};

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn identifier(tok: &str, line: usize) -> Result<String> {
    if is_identifier(tok) {
        Ok(tok.to_string())
    } else {
        Err(syntax(line, format!("`{tok}` is not a valid identifier")))
    }
}

pub(crate) fn syntax(line: usize, message: impl Into<String>) -> AbdError {
    AbdError::Syntax {
        line,
        message: message.into(),
    }
}

/// Tokens of a line with the comment stripped.
pub(crate) fn tokens(raw: &str) -> Vec<&str> {
    let content = raw.split('#').next().unwrap_or("");
    content.split_whitespace().collect()
}

/// Parses the tail of a `rel` line: `NAME ARITY TUPLE...`.
pub(crate) fn parse_rel(args: &[&str], line: usize) -> Result<Relation> {
    if args.len() < 2 {
        return Err(syntax(line, "expected `rel NAME ARITY TUPLE...`"));
    }
    let name = identifier(args[0], line)?;
    let arity: usize = args[1]
        .parse()
        .map_err(|_| syntax(line, format!("`{}` is not a valid arity", args[1])))?;
    if arity == 0 || arity > MAX_ARITY {
        return Err(syntax(line, format!("arity must be between 1 and {MAX_ARITY}")));
    }
    let mut tuples = Vec::with_capacity(args.len() - 2);
    for tok in &args[2..] {
        if !tok.chars().all(|c| c == '0' || c == '1') {
            return Err(syntax(line, format!("`{tok}` is not a bitstring")));
        }
        let t = parse_bitstring(tok, arity).ok_or_else(|| AbdError::TupleLength {
            line,
            relation: name.clone(),
            tuple: tok.to_string(),
            arity,
        })?;
        tuples.push(t);
    }
    Relation::new(name, arity, tuples)
}

pub(crate) fn insert_relation(lang: &mut ConstraintLanguage, rel: Relation, line: usize) -> Result<()> {
    lang.insert(rel).map(|_| ()).map_err(|e| match e {
        AbdError::DuplicateRelation(name) => syntax(line, format!("relation `{name}` is defined twice with different tuples")),
        other => other,
    })
}

/// Resolves a `con` line against a language.
pub(crate) fn resolve_con(lang: &ConstraintLanguage, args: &[String], line: usize) -> Result<NamedConstraint> {
    let name = &args[0];
    let idx = lang.index_of(name).ok_or_else(|| AbdError::UnknownRelation {
        line,
        relation: name.clone(),
    })?;
    let rel = lang.get(idx);
    if rel.arity() != args.len() - 1 {
        return Err(AbdError::ArityMismatch {
            line,
            relation: name.clone(),
            arity: rel.arity(),
            given: args.len() - 1,
        });
    }
    Ok(NamedConstraint {
        relation: idx,
        args: args[1..].to_vec(),
    })
}

/// Parses `.abd` text into an instance.
pub fn parse_instance(text: &str) -> Result<AbductionInstance> {
    let mut lang = ConstraintLanguage::new();
    let mut pending: Vec<(usize, Vec<String>)> = Vec::new();
    let mut hyp = BTreeSet::new();
    let mut man = BTreeSet::new();
    let mut size: Option<usize> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        match head {
            "rel" => {
                let rel = parse_rel(rest, line)?;
                insert_relation(&mut lang, rel, line)?;
            }
            "con" => {
                if rest.is_empty() {
                    return Err(syntax(line, "expected `con NAME v1 ... vk`"));
                }
                let mut args = vec![identifier(rest[0], line)?];
                for tok in &rest[1..] {
                    args.push(identifier(tok, line)?);
                }
                pending.push((line, args));
            }
            "hyp" | "man" => {
                if rest.is_empty() {
                    return Err(syntax(line, format!("`{head}` needs at least one variable")));
                }
                let target = if head == "hyp" { &mut hyp } else { &mut man };
                for tok in rest {
                    target.insert(identifier(tok, line)?);
                }
            }
            "size" => {
                let [n] = rest else {
                    return Err(syntax(line, "expected `size N`"));
                };
                let n: usize = n.parse().map_err(|_| syntax(line, format!("`{n}` is not a non-negative integer")))?;
                if size.is_some_and(|s| s != n) {
                    return Err(syntax(line, "conflicting `size` lines"));
                }
                size = Some(n);
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let constraints = pending
        .iter()
        .map(|(line, args)| resolve_con(&lang, args, *line))
        .collect::<Result<Vec<_>>>()?;
    AbductionInstance::from_named(lang, constraints, hyp, man, size)
}

/// Canonical text form: relations in language order with sorted tuples,
/// constraints in KB order, then sorted `hyp`, `man` and `size`.
pub fn serialize_instance(inst: &AbductionInstance) -> String {
    let mut out = String::new();
    write_relations(&mut out, &inst.language);
    for c in &inst.kb.constraints {
        out.push_str("con ");
        out.push_str(inst.relation_of(c).name());
        for &v in &c.args {
            out.push(' ');
            out.push_str(inst.var_name(v));
        }
        out.push('\n');
    }
    write_var_line(&mut out, "hyp", inst, &inst.hypotheses);
    write_var_line(&mut out, "man", inst, &inst.manifestations);
    if let Some(s) = inst.size {
        let _ = writeln!(out, "size {s}");
    }
    out
}

pub(crate) fn write_relations(out: &mut String, lang: &ConstraintLanguage) {
    for r in lang.relations() {
        let _ = write!(out, "rel {} {}", r.name(), r.arity());
        for row in r.sorted_bitstrings() {
            out.push(' ');
            out.push_str(&row);
        }
        out.push('\n');
    }
}

fn write_var_line(out: &mut String, head: &str, inst: &AbductionInstance, vars: &BTreeSet<usize>) {
    if vars.is_empty() {
        return;
    }
    out.push_str(head);
    for &v in vars {
        out.push(' ');
        out.push_str(inst.var_name(v));
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_instance() {
        let inst = parse_instance("rel IMP 2 00 01 11 \n con IMP x y \n hyp x \n man y").unwrap();
        assert_eq!(inst.vars(), &["x", "y"]);
        assert_eq!(inst.hypotheses.iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(inst.manifestations.iter().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(inst.size, None);
    }

    #[test]
    fn rejects_arity_mismatch() {
        let err = parse_instance("rel IMP 2 00 01 11\ncon IMP x\nhyp x\nman x").unwrap_err();
        assert!(matches!(err, AbdError::ArityMismatch { line: 2, arity: 2, given: 1, .. }));
    }

    #[test]
    fn rejects_tuple_length() {
        let err = parse_instance("rel R 2 00 011").unwrap_err();
        assert!(matches!(err, AbdError::TupleLength { line: 1, .. }));
    }

    #[test]
    fn rejects_unknown_relation_with_line() {
        let err = parse_instance("# header\nrel T 1 1\ncon Q x\nman x").unwrap_err();
        assert_eq!(
            err,
            AbdError::UnknownRelation {
                line: 3,
                relation: "Q".into()
            }
        );
    }

    #[test]
    fn duplicate_relation_handling() {
        assert!(parse_instance("rel T 1 1\nrel T 1 1\nman x").is_ok());
        assert!(matches!(
            parse_instance("rel T 1 1\nrel T 1 0\nman x").unwrap_err(),
            AbdError::Syntax { line: 2, .. }
        ));
    }

    #[test]
    fn empty_man_line_is_an_error() {
        assert!(parse_instance("man").is_err());
        assert!(parse_instance("hyp 1x").is_err());
    }

    #[test]
    fn unions_repeated_lines_and_comments() {
        let inst = parse_instance("hyp a b # first\nhyp c\nman a\nman d\nsize 2").unwrap();
        assert_eq!(inst.hypotheses.len(), 3);
        assert_eq!(inst.manifestations.len(), 2);
        assert_eq!(inst.size, Some(2));
    }

    #[test]
    fn serialization_is_canonical() {
        let text = "rel R 2 11 00\ncon R y x\nman y\nhyp y x\n";
        let inst = parse_instance(text).unwrap();
        let canon = serialize_instance(&inst);
        assert_eq!(canon, "rel R 2 00 11\ncon R y x\nhyp x y\nman y\n");
        assert_eq!(serialize_instance(&parse_instance(&canon).unwrap()), canon);
    }
}
