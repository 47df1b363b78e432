//! Selector strings for built-in and file-backed structures.
//!
//! Groups: `Zn`, `Sn`, `Dn`. Braces: `trivial-brace:G`, `semidirect:Zm:Z2`,
//! `radical:2Zm`, `heisenberg:n:order`, `torus:order`, `file:path`.
//! Quandles: `conj:G`, `core:G`, `trivial:n`, `sphere:n`. Biquandles: any
//! brace selector, `wada:G`, `alexander:p:t:s`, `conj:G`, `core-lift:G`,
//! `r1-heis`, `r2-heis`, `r1-torus`, `r2-torus`, `file:path`.

use std::fs;

use biquandle::{
    brace_to_biquandle, even_residue_brace, heisenberg_brace, inversion_semidirect_brace,
    make_alexander, make_trivial_brace, make_wada, quandle_to_biquandle, torus_brace, Biquandle,
    BraceOrder, ClosedForm, Error, FiniteGroup, Quandle, Result, SkewBrace, TableDoc,
};
use serde::Deserialize;

/// Finite brace document: both group tables on `0..order`.
#[derive(Debug, Deserialize)]
pub struct BraceDoc {
    pub add: TableDoc,
    pub circ: TableDoc,
}

fn unknown(kind: &str, sel: &str) -> Error {
    Error::Parameter(format!("unknown {kind} selector `{sel}`"))
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parameter(format!("cannot read `{path}`: {e}")))
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parameter(format!("`{s}` is not a valid {what}")))
}

pub fn group(sel: &str) -> Result<FiniteGroup> {
    if let Some(path) = sel.strip_prefix("file:") {
        return FiniteGroup::from_json(&read(path)?);
    }
    let (kind, n) = sel.split_at(sel.chars().next().map_or(0, char::len_utf8));
    let n: usize = number(n, "group size").map_err(|_| unknown("group", sel))?;
    let g = match (kind, n) {
        ("Z", n) if n >= 1 => FiniteGroup::cyclic(n),
        ("S", n) if (1..=6).contains(&n) => FiniteGroup::symmetric(n),
        ("D", n) if n >= 1 => FiniteGroup::dihedral(n),
        _ => return Err(unknown("group", sel)),
    };
    Ok(g)
}

pub fn brace(sel: &str) -> Result<SkewBrace> {
    let parts: Vec<&str> = sel.split(':').collect();
    match parts.as_slice() {
        ["file", ..] => {
            let doc: BraceDoc = serde_json::from_str(&read(&sel[5..])?)?;
            SkewBrace::new(
                FiniteGroup::from_doc(doc.add)?,
                FiniteGroup::from_doc(doc.circ)?,
                sel,
            )
        }
        ["trivial-brace", g] => Ok(make_trivial_brace(group(g)?)),
        ["semidirect", x, "Z2"] if x.starts_with('Z') => {
            inversion_semidirect_brace(number(&x[1..], "cyclic order")?)
        }
        ["radical", r] if r.starts_with("2Z") => even_residue_brace(number(&r[2..], "modulus")?),
        ["heisenberg", n, order] => heisenberg_brace(number(n, "dimension")?, order.parse()?),
        ["torus", order] => Ok(torus_brace(order.parse::<BraceOrder>()?)),
        _ => Err(unknown("brace", sel)),
    }
}

pub fn quandle(sel: &str) -> Result<Quandle> {
    match sel.split_once(':') {
        Some(("conj", g)) => Ok(Quandle::conjugation(&group(g)?)),
        Some(("core", g)) => Ok(Quandle::core(&group(g)?)),
        Some(("trivial", n)) => Ok(Quandle::trivial(number(n, "order")?)),
        Some(("sphere", n)) => Ok(Quandle::sphere(number(n, "dimension")?)),
        _ => Err(unknown("quandle", sel)),
    }
}

pub fn biquandle(sel: &str) -> Result<Biquandle> {
    if let Ok(form) = sel.parse::<ClosedForm>() {
        return Ok(Biquandle::closed_form(form));
    }
    let parts: Vec<&str> = sel.split(':').collect();
    let q = match parts.as_slice() {
        ["file", ..] => Biquandle::from_json(&read(&sel[5..])?)?,
        ["wada", g] => make_wada(&group(g)?),
        ["alexander", p, t, s] => make_alexander(
            number(p, "modulus")?,
            number(t, "parameter t")?,
            number(s, "parameter s")?,
        )?,
        ["conj", g] => quandle_to_biquandle(&Quandle::conjugation(&group(g)?)),
        ["core-lift", g] => quandle_to_biquandle(&Quandle::core(&group(g)?)),
        _ => brace(sel).map(|b| brace_to_biquandle(&b)).map_err(|e| match e {
            Error::Parameter(m) if m.starts_with("unknown brace") => unknown("biquandle", sel),
            other => other,
        })?,
    };
    Ok(q.with_name(sel))
}
