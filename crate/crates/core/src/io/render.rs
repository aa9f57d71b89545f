//! Monomial rendering for hypersurface problems.
//!
//! For a type-A problem of the form `irrep(d,0,…,0)` every character is the
//! exponent vector of a degree-d monomial in the homogeneous coordinates
//! `X0..Xn`, so states can be printed as the monomial families appearing in
//! the classical literature.

use super::document::ResultDocument;
use crate::roots::RootFamily;
use crate::weights::{parse_rep_expr, RepExpr};
use std::fmt::Write;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("monomial rendering needs a type-A problem of the form irrep(d,0,…,0); got {0}")]
    Unsupported(String),
}

fn monomial(exponents: &[i64]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exponents.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("X{i}")),
            _ => parts.push(format!("X{i}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Renders every state family in the document as monomial lists.
pub fn render_monomials(doc: &ResultDocument) -> Result<String, RenderError> {
    if doc.problem.family != RootFamily::A {
        return Err(RenderError::Unsupported(format!(
            "{}{}",
            doc.problem.family, doc.problem.rank
        )));
    }
    match parse_rep_expr(&doc.problem.rep) {
        Ok(RepExpr::Irrep(coords))
            if coords.first().copied().unwrap_or(0) > 0
                && coords.iter().skip(1).all(|&a| a == 0) => {}
        _ => return Err(RenderError::Unsupported(doc.problem.rep.clone())),
    }

    type StateRow<'a> = (Option<&'a Vec<String>>, &'a Vec<Vec<i64>>);
    let mut out = String::new();
    let mut section = |name: &str, states: &[StateRow<'_>]| {
        if states.is_empty() {
            return;
        }
        let _ = writeln!(out, "{name}:");
        for (i, (witness, chars)) in states.iter().enumerate() {
            match witness {
                Some(w) => {
                    let _ = writeln!(out, "  state {} [lambda = ({})]:", i + 1, w.join(","));
                }
                None => {
                    let _ = writeln!(out, "  stratum {}:", i + 1);
                }
            }
            let monomials: Vec<String> = chars.iter().map(|c| monomial(c)).collect();
            let _ = writeln!(out, "    {}", monomials.join(", "));
        }
    };

    if let Some(states) = &doc.stable {
        let rows: Vec<_> = states
            .iter()
            .map(|s| (Some(&s.witness), &s.characters))
            .collect();
        section("maximal non-stable states", &rows);
    }
    if let Some(states) = &doc.semistable {
        let rows: Vec<_> = states
            .iter()
            .map(|s| (Some(&s.witness), &s.characters))
            .collect();
        section("maximal unstable states", &rows);
    }
    if let Some(strata) = &doc.polystable {
        let rows: Vec<_> = strata.iter().map(|s| (None, &s.characters)).collect();
        section("polystable strata", &rows);
    }
    Ok(out)
}
