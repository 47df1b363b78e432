//! Biquandles: carriers with operations `∗` and `⋆` whose pair map
//! `r(a, b) = (b ⋆ a, a ∗ b)` is a non-degenerate Yang–Baxter solution with
//! a diagonal bijection `τ`.
//!
//! Argument order follows the notation throughout: `ast(a, b) = a ∗ b` and
//! `star(b, a) = b ⋆ a`, so in both operations the first argument is the
//! element acted on and the second is the acting element. The inverses
//! `ast_inv(c, a)` and `star_inv(c, a)` solve `x ∗ a = c` and `x ⋆ a = c`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brace::{heisenberg_brace, torus_brace, BraceOrder, SkewBrace};
use crate::element::{element_distance, Carrier, Element};
use crate::error::{Error, Result};
use crate::group::{flatten_square, FiniteGroup};
use crate::quandle::{check_finite as check_finite_quandle, check_quandle_axioms, Quandle};
use crate::report::{CheckMode, SampledCheck, ValidationReport, Violation, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    FromSkewBrace,
    ClosedFormR1Heis,
    ClosedFormR2Heis,
    ClosedFormR1Torus,
    ClosedFormR2Torus,
    QuandleLift,
    Wada,
    Alexander,
    Custom,
}

/// The hardcoded solutions on `ℝ³` and `S¹ × ℝ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    R1Heis,
    R2Heis,
    R1Torus,
    R2Torus,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 4] = [
        ClosedForm::R1Heis,
        ClosedForm::R2Heis,
        ClosedForm::R1Torus,
        ClosedForm::R2Torus,
    ];

    /// The brace whose generic solution this formula expands.
    pub fn brace(self) -> SkewBrace {
        match self {
            ClosedForm::R1Heis => heisenberg_brace(1, BraceOrder::PlusCirc).expect("n = 1"),
            ClosedForm::R2Heis => heisenberg_brace(1, BraceOrder::CircPlus).expect("n = 1"),
            ClosedForm::R1Torus => torus_brace(BraceOrder::PlusCirc),
            ClosedForm::R2Torus => torus_brace(BraceOrder::CircPlus),
        }
    }

    fn provenance(self) -> Provenance {
        match self {
            ClosedForm::R1Heis => Provenance::ClosedFormR1Heis,
            ClosedForm::R2Heis => Provenance::ClosedFormR2Heis,
            ClosedForm::R1Torus => Provenance::ClosedFormR1Torus,
            ClosedForm::R2Torus => Provenance::ClosedFormR2Torus,
        }
    }

    fn carrier(self) -> Carrier {
        match self {
            ClosedForm::R1Heis | ClosedForm::R2Heis => Carrier::Real { dim: 3 },
            ClosedForm::R1Torus | ClosedForm::R2Torus => Carrier::Torus,
        }
    }

    /// `b ⋆ a`, where `a = (x₁, y₁, z₁)` and `b = (x₂, y₂, z₂)`.
    fn star(self, b: &Element, a: &Element) -> Element {
        match self {
            ClosedForm::R1Heis | ClosedForm::R2Heis => {
                let (p, q) = (a.as_real(), b.as_real());
                let (x1, x2, y2, z2) = (p[0], q[0], q[1], q[2]);
                let z = if self == ClosedForm::R1Heis {
                    z2 + x1 * y2
                } else {
                    z2 - x1 * y2
                };
                Element::real([x2, y2, z])
            }
            ClosedForm::R1Torus | ClosedForm::R2Torus => {
                let ((w1, _), (w2, a2)) = (a.as_torus(), b.as_torus());
                let (c1, s1) = (w1.re, w1.im);
                let (x2, y2) = (a2.re, a2.im);
                let alpha = if self == ClosedForm::R1Torus {
                    Complex64::new(x2 * c1 - y2 * s1, x2 * s1 + y2 * c1)
                } else {
                    Complex64::new(x2 * c1 + y2 * s1, -x2 * s1 + y2 * c1)
                };
                Element::torus(w2, alpha)
            }
        }
    }

    /// `a ∗ b`.
    fn ast(self, a: &Element, b: &Element) -> Element {
        match self {
            ClosedForm::R1Heis | ClosedForm::R2Heis => {
                let (p, q) = (a.as_real(), b.as_real());
                let (x1, y1, z1, x2, y2) = (p[0], p[1], p[2], q[0], q[1]);
                let z = if self == ClosedForm::R1Heis {
                    z1 - x2 * y1
                } else {
                    z1 + x1 * y2
                };
                Element::real([x1, y1, z])
            }
            ClosedForm::R1Torus | ClosedForm::R2Torus => {
                let ((w1, a1), (w2, a2)) = (a.as_torus(), b.as_torus());
                let (x1, y1, x2, y2) = (a1.re, a1.im, a2.re, a2.im);
                let alpha = if self == ClosedForm::R1Torus {
                    let (c2, s2) = (w2.re, w2.im);
                    Complex64::new(x1 * c2 + y1 * s2, -x1 * s2 + y1 * c2)
                } else {
                    let (c1, s1) = (w1.re, w1.im);
                    Complex64::new(x1 + x2 - x2 * c1 - y2 * s1, y1 + y2 + x2 * s1 - y2 * c1)
                };
                Element::torus(w1, alpha)
            }
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosedForm::R1Heis => "r1-heis",
            ClosedForm::R2Heis => "r2-heis",
            ClosedForm::R1Torus => "r1-torus",
            ClosedForm::R2Torus => "r2-torus",
        })
    }
}

impl FromStr for ClosedForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClosedForm::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown closed form `{s}`")))
    }
}

/// Finite operation tables; rows index the acted element, columns the acting one.
#[derive(Clone, Debug, PartialEq)]
pub struct Tables {
    order: usize,
    /// `ast[x * n + a] = x ∗ a`.
    ast: Vec<usize>,
    /// `star[x * n + a] = x ⋆ a`.
    star: Vec<usize>,
    ast_inv: Option<Vec<usize>>,
    star_inv: Option<Vec<usize>>,
    /// `r_inv[c * n + d] = r⁻¹(c, d)` when `r` is a bijection.
    r_inv: Option<Vec<(usize, usize)>>,
}

/// Inverts each column map `x ↦ t[x * n + a]`; `None` if one is not a bijection.
fn invert_columns(t: &[usize], n: usize) -> Option<Vec<usize>> {
    let mut inv = vec![usize::MAX; n * n];
    for a in 0..n {
        for x in 0..n {
            let y = t[x * n + a];
            if inv[y * n + a] != usize::MAX {
                return None;
            }
            inv[y * n + a] = x;
        }
    }
    Some(inv)
}

impl Tables {
    fn new(order: usize, ast: Vec<usize>, star: Vec<usize>) -> Self {
        let n = order;
        let ast_inv = invert_columns(&ast, n);
        let star_inv = invert_columns(&star, n);
        let mut r_inv = vec![(usize::MAX, usize::MAX); n * n];
        let mut bijective = true;
        for a in 0..n {
            for b in 0..n {
                let slot = &mut r_inv[star[b * n + a] * n + ast[a * n + b]];
                bijective &= slot.0 == usize::MAX;
                *slot = (a, b);
            }
        }
        Tables {
            order,
            ast,
            star,
            ast_inv,
            star_inv,
            r_inv: bijective.then_some(r_inv),
        }
    }
}

type Op2 = dyn Fn(&Element, &Element) -> Element + Send + Sync;

/// Closure-backed operations for continuous biquandles without a brace.
pub struct CustomOps {
    ast: Box<Op2>,
    star: Box<Op2>,
    ast_inv: Box<Op2>,
    star_inv: Box<Op2>,
}

impl fmt::Debug for CustomOps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomOps")
    }
}

#[derive(Clone, Debug)]
enum Ops {
    Brace(SkewBrace),
    Closed(ClosedForm, SkewBrace),
    Table(Arc<Tables>),
    Lift(Quandle),
    Custom(Arc<CustomOps>),
}

#[derive(Clone, Debug)]
pub struct Biquandle {
    carrier: Carrier,
    provenance: Provenance,
    name: String,
    ops: Ops,
}

/// JSON document for a finite biquandle: `ast[x][a] = x ∗ a`, `star[x][a] = x ⋆ a`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiquandleDoc {
    pub order: usize,
    pub ast: Vec<Vec<usize>>,
    pub star: Vec<Vec<usize>>,
}

/// The solution `a ∗ b = (−a + a∘b)′∘a∘b`, `b ⋆ a = −a + a∘b` of a skew brace.
pub fn brace_to_biquandle(b: &SkewBrace) -> Biquandle {
    Biquandle {
        carrier: b.carrier(),
        provenance: Provenance::FromSkewBrace,
        name: format!("brace:{}", b.name()),
        ops: Ops::Brace(b.clone()),
    }
}

/// Lifts a quandle with the trivial second operation `b ⋆ a = b`.
pub fn quandle_to_biquandle(q: &Quandle) -> Biquandle {
    let name = format!("lift:{}", q.name());
    match (q.carrier(), q.table()) {
        (Carrier::Finite { order }, Some(t)) => {
            let star = (0..order * order).map(|k| k / order).collect();
            Biquandle {
                carrier: q.carrier(),
                provenance: Provenance::QuandleLift,
                name,
                ops: Ops::Table(Arc::new(Tables::new(order, t.to_vec(), star))),
            }
        }
        _ => Biquandle {
            carrier: q.carrier(),
            provenance: Provenance::QuandleLift,
            name,
            ops: Ops::Lift(q.clone()),
        },
    }
}

/// Wada biquandle: `a ∗ b = b⁻¹a⁻¹b`, `b ⋆ a = a²b`.
pub fn make_wada(g: &FiniteGroup) -> Biquandle {
    let n = g.order();
    let mut ast = Vec::with_capacity(n * n);
    let mut star = Vec::with_capacity(n * n);
    for x in 0..n {
        for a in 0..n {
            ast.push(g.op(g.op(g.inv(a), g.inv(x)), a));
            star.push(g.op(g.op(a, a), x));
        }
    }
    Biquandle::from_tables(n, ast, star, Provenance::Wada, "wada")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Alexander biquandle on `ℤ_p`: `a ∗ b = ta + (1 − st)b`, `b ⋆ a = sb`.
pub fn make_alexander(p: u64, t: i64, s: i64) -> Result<Biquandle> {
    if p < 2 {
        return Err(Error::Parameter(format!("modulus {p} must be at least 2")));
    }
    if p as usize > crate::group::MAX_ORDER {
        return Err(Error::Parameter(format!("modulus {p} exceeds the carrier cap")));
    }
    let t = t.rem_euclid(p as i64) as u64;
    let s = s.rem_euclid(p as i64) as u64;
    for (name, v) in [("t", t), ("s", s)] {
        if gcd(v, p) != 1 {
            return Err(Error::Parameter(format!("{name} = {v} is not a unit mod {p}")));
        }
    }
    let n = p as usize;
    let c = (1 + p * p - (s * t) % p) % p;
    let mut ast = Vec::with_capacity(n * n);
    let mut star = Vec::with_capacity(n * n);
    for x in 0..p {
        for a in 0..p {
            ast.push(((t * x + c * a) % p) as usize);
            star.push(((s * x) % p) as usize);
        }
    }
    Ok(Biquandle::from_tables(
        n,
        ast,
        star,
        Provenance::Alexander,
        format!("alexander:{p}:{t}:{s}"),
    ))
}

impl Biquandle {
    pub fn closed_form(form: ClosedForm) -> Self {
        Biquandle {
            carrier: form.carrier(),
            provenance: form.provenance(),
            name: form.to_string(),
            ops: Ops::Closed(form, form.brace()),
        }
    }

    fn from_tables(
        order: usize,
        ast: Vec<usize>,
        star: Vec<usize>,
        provenance: Provenance,
        name: impl Into<String>,
    ) -> Self {
        Biquandle {
            carrier: Carrier::Finite { order },
            provenance,
            name: name.into(),
            ops: Ops::Table(Arc::new(Tables::new(order, ast, star))),
        }
    }

    /// A finite biquandle from raw tables. Axioms are not checked.
    pub fn from_doc(doc: &BiquandleDoc) -> Result<Self> {
        let ast = flatten_square(doc.order, &doc.ast, "ast table")?;
        let star = flatten_square(doc.order, &doc.star, "star table")?;
        Ok(Self::from_tables(doc.order, ast, star, Provenance::Custom, "custom"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    /// A continuous biquandle given by closures for `∗`, `⋆` and their inverses.
    pub fn custom(
        name: impl Into<String>,
        carrier: Carrier,
        ast: impl Fn(&Element, &Element) -> Element + Send + Sync + 'static,
        star: impl Fn(&Element, &Element) -> Element + Send + Sync + 'static,
        ast_inv: impl Fn(&Element, &Element) -> Element + Send + Sync + 'static,
        star_inv: impl Fn(&Element, &Element) -> Element + Send + Sync + 'static,
    ) -> Self {
        Biquandle {
            carrier,
            provenance: Provenance::Custom,
            name: name.into(),
            ops: Ops::Custom(Arc::new(CustomOps {
                ast: Box::new(ast),
                star: Box::new(star),
                ast_inv: Box::new(ast_inv),
                star_inv: Box::new(star_inv),
            })),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The skew brace behind this solution, when there is one.
    pub fn brace(&self) -> Option<&SkewBrace> {
        match &self.ops {
            Ops::Brace(b) | Ops::Closed(_, b) => Some(b),
            _ => None,
        }
    }

    /// Finite operation tables, for table-backed biquandles.
    pub fn tables(&self) -> Option<&Tables> {
        match &self.ops {
            Ops::Table(t) => Some(t),
            _ => None,
        }
    }

    /// `a ∗ b`.
    pub fn ast(&self, a: &Element, b: &Element) -> Element {
        match &self.ops {
            Ops::Brace(br) => {
                let s = self.star(b, a);
                br.circ(&br.circ(&br.circ_inv(&s), a), b)
            }
            Ops::Closed(f, _) => f.ast(a, b),
            Ops::Table(t) => Element::Index(t.ast[a.as_index() * t.order + b.as_index()]),
            Ops::Lift(q) => q.ast(a, b),
            Ops::Custom(c) => (c.ast)(a, b),
        }
    }

    /// `b ⋆ a`.
    pub fn star(&self, b: &Element, a: &Element) -> Element {
        match &self.ops {
            Ops::Brace(br) => br.add(&br.neg(a), &br.circ(a, b)),
            Ops::Closed(f, _) => f.star(b, a),
            Ops::Table(t) => Element::Index(t.star[b.as_index() * t.order + a.as_index()]),
            Ops::Lift(_) => b.clone(),
            Ops::Custom(c) => (c.star)(b, a),
        }
    }

    /// The `x` with `x ∗ a = c`.
    pub fn ast_inv(&self, c: &Element, a: &Element) -> Result<Element> {
        match &self.ops {
            // (a∘c′ − a)′
            Ops::Brace(br) | Ops::Closed(_, br) => {
                Ok(br.circ_inv(&br.add(&br.circ(a, &br.circ_inv(c)), &br.neg(a))))
            }
            Ops::Table(t) => match &t.ast_inv {
                Some(inv) => Ok(Element::Index(inv[c.as_index() * t.order + a.as_index()])),
                None => Err(Error::AxiomViolation("x ↦ x ∗ a is not bijective".into())),
            },
            Ops::Lift(q) => q
                .ast_inv(c, a)
                .ok_or_else(|| Error::AxiomViolation("x ↦ x ∗ a is not bijective".into())),
            Ops::Custom(cu) => Ok((cu.ast_inv)(c, a)),
        }
    }

    /// The `x` with `x ⋆ a = c`.
    pub fn star_inv(&self, c: &Element, a: &Element) -> Result<Element> {
        match &self.ops {
            // a′∘(a + c)
            Ops::Brace(br) | Ops::Closed(_, br) => Ok(br.circ(&br.circ_inv(a), &br.add(a, c))),
            Ops::Table(t) => match &t.star_inv {
                Some(inv) => Ok(Element::Index(inv[c.as_index() * t.order + a.as_index()])),
                None => Err(Error::AxiomViolation("x ↦ x ⋆ a is not bijective".into())),
            },
            Ops::Lift(_) => Ok(c.clone()),
            Ops::Custom(cu) => Ok((cu.star_inv)(c, a)),
        }
    }

    fn check_carrier(&self, elems: &[&Element]) -> Result<()> {
        match elems.iter().find(|e| !self.carrier.contains(e)) {
            Some(e) => Err(Error::Structural(format!(
                "{e:?} is not a point of the carrier {:?}",
                self.carrier
            ))),
            None => Ok(()),
        }
    }

    /// `r(a, b) = (b ⋆ a, a ∗ b)` without carrier checks.
    pub(crate) fn r(&self, a: &Element, b: &Element) -> (Element, Element) {
        (self.star(b, a), self.ast(a, b))
    }

    pub(crate) fn r_inv(&self, c: &Element, d: &Element) -> Result<(Element, Element)> {
        match &self.ops {
            Ops::Brace(br) | Ops::Closed(_, br) => {
                let g = br.circ(c, d);
                let a = br.add(&g, &br.neg(c));
                let b = br.circ(&br.circ_inv(&a), &g);
                Ok((a, b))
            }
            Ops::Table(t) => match &t.r_inv {
                Some(inv) => {
                    let (a, b) = inv[c.as_index() * t.order + d.as_index()];
                    Ok((Element::Index(a), Element::Index(b)))
                }
                None => Err(Error::AxiomViolation("r is not a bijection".into())),
            },
            Ops::Lift(q) => {
                // r(a, b) = (b, a ∗ b)
                let a = q
                    .ast_inv(d, c)
                    .ok_or_else(|| Error::AxiomViolation("x ↦ x ∗ a is not bijective".into()))?;
                Ok((a, c.clone()))
            }
            Ops::Custom(_) => Err(Error::Unsupported(
                "r⁻¹ of a custom continuous biquandle without a skew brace".into(),
            )),
        }
    }

    pub fn yb_map(&self, a: &Element, b: &Element) -> Result<(Element, Element)> {
        self.check_carrier(&[a, b])?;
        Ok(self.r(a, b))
    }

    /// `r⁻¹(c, d)`: for brace-backed solutions `g = c∘d`, `a = g − c`,
    /// `b = a′∘g`; finite tables are inverted exhaustively.
    pub fn yb_map_inverse(&self, c: &Element, d: &Element) -> Result<(Element, Element)> {
        self.check_carrier(&[c, d])?;
        self.r_inv(c, d)
    }

    /// `S(u, v)`: with `b = star_inv(u, v)`, returns `(v ∗ b, b)`, so that
    /// `S(b ⋆ a, a) = (a ∗ b, b)`.
    pub fn s_map(&self, u: &Element, v: &Element) -> Result<(Element, Element)> {
        self.check_carrier(&[u, v])?;
        let b = self.star_inv(u, v)?;
        Ok((self.ast(v, &b), b))
    }

    /// The diagonal map `τ` with `S(a, a) = (τ(a), τ(a))`.
    ///
    /// Brace-backed solutions return `−a′`; the diagonal of `S` is checked to
    /// agree in both components in every case.
    pub fn tau(&self, a: &Element) -> Result<Element> {
        let (s1, s2) = self.s_map(a, a)?;
        let tol = if self.carrier.is_finite() { 0.0 } else { DEFAULT_TOLERANCE };
        let gap = element_distance(&s1, &s2);
        if !(gap <= tol) {
            return Err(Error::AxiomViolation(format!(
                "S(a, a) = ({s1:?}, {s2:?}) is off the diagonal (gap {gap:e})"
            )));
        }
        match self.brace() {
            Some(br) => Ok(br.neg(&br.circ_inv(a))),
            None => Ok(s1),
        }
    }

    /// Tabulated `r` and `r⁻¹` for finite carriers.
    pub fn finite_maps(&self) -> Result<FiniteMaps> {
        let n = self
            .carrier
            .order()
            .ok_or_else(|| Error::Precondition("finite_maps needs a finite carrier".into()))?;
        let r: Vec<(usize, usize)> = (0..n * n)
            .map(|k| {
                let (c, d) = self.r(&Element::Index(k / n), &Element::Index(k % n));
                (c.as_index(), d.as_index())
            })
            .collect();
        let mut r_inv = vec![(usize::MAX, usize::MAX); n * n];
        for (k, &(c, d)) in r.iter().enumerate() {
            let slot = &mut r_inv[c * n + d];
            if slot.0 != usize::MAX {
                return Err(Error::AxiomViolation(format!(
                    "r is not injective: r{:?} = r{:?}",
                    (slot.0, slot.1),
                    (k / n, k % n)
                )));
            }
            *slot = (k / n, k % n);
        }
        Ok(FiniteMaps { order: n, r, r_inv })
    }
}

/// `r` and `r⁻¹` as lookup tables: `r[a * n + b] = r(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMaps {
    pub order: usize,
    pub r: Vec<(usize, usize)>,
    pub r_inv: Vec<(usize, usize)>,
}

impl FiniteMaps {
    #[inline]
    pub fn apply(&self, a: usize, b: usize) -> (usize, usize) {
        self.r[a * self.order + b]
    }

    #[inline]
    pub fn apply_inv(&self, c: usize, d: usize) -> (usize, usize) {
        self.r_inv[c * self.order + d]
    }
}

fn sampled_params(mode: CheckMode) -> (usize, f64, u64) {
    match mode {
        CheckMode::Sampled { count, tolerance, seed } => (count, tolerance, seed),
        CheckMode::Exhaustive => (DEFAULT_SAMPLES, DEFAULT_TOLERANCE, 0),
    }
}

/// Yang–Baxter residual of `r` at `(a, b, c)`.
fn ybe_gap(q: &Biquandle, a: &Element, b: &Element, c: &Element) -> f64 {
    // (Id×r)(r×Id)(Id×r)
    let (b1, c1) = q.r(b, c);
    let (a2, b2) = q.r(a, &b1);
    let (b3, c3) = q.r(&b2, &c1);
    // (r×Id)(Id×r)(r×Id)
    let (a4, b4) = q.r(a, b);
    let (b5, c5) = q.r(&b4, c);
    let (a6, b6) = q.r(&a4, &b5);
    element_distance(&a2, &a6)
        .max(element_distance(&b3, &b6))
        .max(element_distance(&c3, &c5))
}

fn first_duplicate(values: impl Iterator<Item = usize>, n: usize) -> Option<usize> {
    let mut seen = vec![false; n];
    for (i, v) in values.enumerate() {
        if std::mem::replace(&mut seen[v], true) {
            return Some(i);
        }
    }
    None
}

/// Runs the biquandle axiom suite: Yang–Baxter, invertibility of `r`,
/// bijectivity of `∗a` and `⋆a`, bijectivity of `S`, and the diagonal
/// property with `τ` a bijection.
///
/// Finite carriers are always checked exhaustively.
pub fn check_biquandle_axioms(q: &Biquandle, mode: CheckMode) -> ValidationReport {
    if let Some(n) = q.carrier.order() {
        check_finite(q, n)
    } else {
        let (count, tolerance, seed) = sampled_params(mode);
        check_sampled(q, count, tolerance, seed)
    }
}

fn check_finite(q: &Biquandle, n: usize) -> ValidationReport {
    let mut report = ValidationReport::new();
    let ix = Element::Index;
    let r: Vec<(usize, usize)> = (0..n * n)
        .map(|k| {
            let (c, d) = q.r(&ix(k / n), &ix(k % n));
            (c.as_index(), d.as_index())
        })
        .collect();
    let rr = |a: usize, b: usize| r[a * n + b];

    let ybe = (0..n).into_par_iter().find_map_first(|a| {
        for b in 0..n {
            for c in 0..n {
                let (b1, c1) = rr(b, c);
                let (a2, b2) = rr(a, b1);
                let (b3, c3) = rr(b2, c1);
                let (a4, b4) = rr(a, b);
                let (b5, c5) = rr(b4, c);
                let (a6, b6) = rr(a4, b5);
                if (a2, b3, c3) != (a6, b6, c5) {
                    return Some([a, b, c]);
                }
            }
        }
        None
    });
    if let Some(w) = ybe {
        report.push(Violation::finite("ybe", &w));
    }
    if let Some(k) = first_duplicate(r.iter().map(|&(c, d)| c * n + d), n * n) {
        report.push(Violation::finite("r-bijectivity", &[k / n, k % n]));
    }
    let ast_col = |a: usize| (0..n).map(move |x| q.ast(&ix(x), &ix(a)).as_index());
    let star_col = |a: usize| (0..n).map(move |x| q.star(&ix(x), &ix(a)).as_index());
    if let Some(a) = (0..n).find(|&a| first_duplicate(ast_col(a), n).is_some()) {
        report.push(Violation::finite("ast-bijectivity", &[a]));
    }
    let star_ok = match (0..n).find(|&a| first_duplicate(star_col(a), n).is_some()) {
        Some(a) => {
            report.push(Violation::finite("star-bijectivity", &[a]));
            false
        }
        None => true,
    };
    if star_ok {
        let s: Vec<(usize, usize)> = (0..n * n)
            .map(|k| {
                let (u, v) = q.s_map(&ix(k / n), &ix(k % n)).expect("star is bijective");
                (u.as_index(), v.as_index())
            })
            .collect();
        if let Some(k) = first_duplicate(s.iter().map(|&(u, v)| u * n + v), n * n) {
            report.push(Violation::finite("s-bijectivity", &[k / n, k % n]));
        }
        if let Some(a) = (0..n).find(|&a| s[a * n + a].0 != s[a * n + a].1) {
            report.push(Violation::finite("diagonal", &[a]));
        } else if let Some(i) = first_duplicate((0..n).map(|a| s[a * n + a].0), n) {
            report.push(Violation::finite("tau-bijectivity", &[i]));
        }
    }
    report
}

fn check_sampled(q: &Biquandle, count: usize, tolerance: f64, seed: u64) -> ValidationReport {
    let carrier = q.carrier;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ybe = SampledCheck::new("ybe", tolerance);
    let mut r_bij = SampledCheck::new("r-bijectivity", tolerance);
    let mut ast_bij = SampledCheck::new("ast-bijectivity", tolerance);
    let mut star_bij = SampledCheck::new("star-bijectivity", tolerance);
    let mut diag = SampledCheck::new("diagonal", tolerance);
    let d = |x: &Element, y: &Element| element_distance(x, y);
    let inv_gap = |r: Result<Element>, target: &Element| r.map(|x| d(&x, target)).unwrap_or(f64::INFINITY);
    for _ in 0..count {
        let a = carrier.sample(&mut rng);
        let b = carrier.sample(&mut rng);
        let c = carrier.sample(&mut rng);
        ybe.observe(ybe_gap(q, &a, &b, &c), || vec![a.clone(), b.clone(), c.clone()]);

        let (u, v) = q.r(&a, &b);
        match q.r_inv(&u, &v) {
            Ok((a1, b1)) => {
                let back = q.r_inv(&a, &b).map(|(x, y)| {
                    let (x2, y2) = q.r(&x, &y);
                    d(&x2, &a).max(d(&y2, &b))
                });
                let g = d(&a1, &a).max(d(&b1, &b)).max(back.unwrap_or(f64::INFINITY));
                r_bij.observe(g, || vec![a.clone(), b.clone()]);
            }
            Err(Error::Unsupported(_)) => {}
            Err(_) => r_bij.observe(f64::INFINITY, || vec![a.clone(), b.clone()]),
        }

        let g = inv_gap(q.ast_inv(&q.ast(&a, &b), &b), &a).max(
            q.ast_inv(&a, &b)
                .map(|x| d(&q.ast(&x, &b), &a))
                .unwrap_or(f64::INFINITY),
        );
        ast_bij.observe(g, || vec![a.clone(), b.clone()]);
        let g = inv_gap(q.star_inv(&q.star(&a, &b), &b), &a).max(
            q.star_inv(&a, &b)
                .map(|x| d(&q.star(&x, &b), &a))
                .unwrap_or(f64::INFINITY),
        );
        star_bij.observe(g, || vec![a.clone(), b.clone()]);

        let g = q.s_map(&a, &a).map(|(s1, s2)| d(&s1, &s2)).unwrap_or(f64::INFINITY);
        diag.observe(g, || vec![a.clone()]);
    }
    let mut report = ValidationReport::new();
    ybe.finish(&mut report);
    r_bij.finish(&mut report);
    ast_bij.finish(&mut report);
    star_bij.finish(&mut report);
    diag.finish(&mut report);
    report
}

/// Outcome of [`is_involutive`]; a failing pair comes with `‖r²(a,b) − (a,b)‖`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvolutivityReport {
    pub involutive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Element>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displacement: Option<f64>,
}

/// Whether `r ∘ r = id`, on every pair (finite) or at samples (continuous).
pub fn is_involutive(q: &Biquandle, mode: CheckMode) -> InvolutivityReport {
    let twice = |a: &Element, b: &Element| {
        let (c, d) = q.r(a, b);
        let (e, f) = q.r(&c, &d);
        element_distance(&e, a).max(element_distance(&f, b))
    };
    let fail = |a: Element, b: Element, g: f64| InvolutivityReport {
        involutive: false,
        witness: Some(vec![a, b]),
        displacement: Some(g),
    };
    if let Some(n) = q.carrier.order() {
        for a in 0..n {
            for b in 0..n {
                let (ea, eb) = (Element::Index(a), Element::Index(b));
                let g = twice(&ea, &eb);
                if g > 0.0 {
                    return fail(ea, eb, g);
                }
            }
        }
    } else {
        let (count, tolerance, seed) = sampled_params(mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let a = q.carrier.sample(&mut rng);
            let b = q.carrier.sample(&mut rng);
            let g = twice(&a, &b);
            if !(g <= tolerance) {
                return fail(a, b, g);
            }
        }
    }
    InvolutivityReport {
        involutive: true,
        witness: None,
        displacement: None,
    }
}

/// True iff `⋆` is trivial (`b ⋆ a = b`) and `∗` satisfies the quandle axioms.
pub fn detect_quandle(q: &Biquandle, mode: CheckMode) -> bool {
    if let Some(n) = q.carrier.order() {
        let ix = Element::Index;
        let trivial_star = (0..n).all(|b| (0..n).all(|a| q.star(&ix(b), &ix(a)) == ix(b)));
        if !trivial_star {
            return false;
        }
        let table: Vec<usize> = (0..n * n)
            .map(|k| q.ast(&ix(k / n), &ix(k % n)).as_index())
            .collect();
        check_finite_quandle(&table, n).valid
    } else {
        let (count, tolerance, seed) = sampled_params(mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let a = q.carrier.sample(&mut rng);
            let b = q.carrier.sample(&mut rng);
            if !(element_distance(&q.star(&b, &a), &b) <= tolerance) {
                return false;
            }
        }
        match &q.ops {
            Ops::Lift(quandle) => check_quandle_axioms(quandle, mode).valid,
            _ => check_ast_as_quandle(q, count, tolerance, seed),
        }
    }
}

fn check_ast_as_quandle(q: &Biquandle, count: usize, tolerance: f64, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let carrier = q.carrier;
    (0..count).all(|_| {
        let a = carrier.sample(&mut rng);
        let b = carrier.sample(&mut rng);
        let c = carrier.sample(&mut rng);
        let idem = carrier.distance(&q.ast(&a, &a), &a);
        let dist = carrier.distance(
            &q.ast(&q.ast(&a, &b), &c),
            &q.ast(&q.ast(&a, &c), &q.ast(&b, &c)),
        );
        let bij = q
            .ast_inv(&q.ast(&a, &b), &b)
            .map(|x| carrier.distance(&x, &a))
            .unwrap_or(f64::INFINITY);
        idem <= tolerance && dist <= tolerance && bij <= tolerance
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brace::make_trivial_brace;

    fn ix(i: usize) -> Element {
        Element::Index(i)
    }

    #[test]
    fn trivial_brace_gives_conjugation() {
        let g = FiniteGroup::symmetric(3);
        let q = brace_to_biquandle(&make_trivial_brace(g.clone()));
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(q.star(&ix(b), &ix(a)), ix(b));
                assert_eq!(q.ast(&ix(a), &ix(b)), ix(g.op(g.op(g.inv(b), a), b)));
                // r(a, b) = (b, b′∘a∘b)
                assert_eq!(q.yb_map(&ix(a), &ix(b)).unwrap(), (ix(b), ix(g.op(g.op(g.inv(b), a), b))));
            }
        }
    }

    #[test]
    fn heisenberg_braces_expand_to_closed_forms() {
        let (a, b) = (Element::real([1.0, 2.0, 3.0]), Element::real([4.0, 5.0, 6.0]));
        let r1 = brace_to_biquandle(&heisenberg_brace(1, BraceOrder::PlusCirc).unwrap());
        let (c, d) = r1.yb_map(&a, &b).unwrap();
        assert_eq!(c, Element::real([4.0, 5.0, 6.0 + 1.0 * 5.0]));
        assert_eq!(d, Element::real([1.0, 2.0, 3.0 - 4.0 * 2.0]));
        let r2 = brace_to_biquandle(&heisenberg_brace(1, BraceOrder::CircPlus).unwrap());
        let (c, d) = r2.yb_map(&a, &b).unwrap();
        assert_eq!(c, Element::real([4.0, 5.0, 1.0]));
        assert_eq!(d, Element::real([1.0, 2.0, 8.0]));
    }

    #[test]
    fn closed_form_examples() {
        let (a, b) = (Element::real([1.0, 2.0, 3.0]), Element::real([4.0, 5.0, 6.0]));
        let r2 = Biquandle::closed_form(ClosedForm::R2Heis);
        assert_eq!(r2.yb_map(&a, &b).unwrap(), (Element::real([4.0, 5.0, 1.0]), Element::real([1.0, 2.0, 8.0])));
        let r1 = Biquandle::closed_form(ClosedForm::R1Heis);
        assert_eq!(r1.yb_map(&a, &b).unwrap(), (Element::real([4.0, 5.0, 11.0]), Element::real([1.0, 2.0, -5.0])));
        let back = r2
            .yb_map_inverse(&Element::real([4.0, 5.0, 1.0]), &Element::real([1.0, 2.0, 8.0]))
            .unwrap();
        assert_eq!(back, (a, b));
    }

    #[test]
    fn carrier_mismatch_is_structural() {
        let r2 = Biquandle::closed_form(ClosedForm::R2Heis);
        let err = r2.yb_map(&Element::Index(0), &Element::real([0.0; 3])).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
        let err = r2.yb_map(&Element::real([0.0; 2]), &Element::real([0.0; 3])).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn tau_examples() {
        let q = brace_to_biquandle(&heisenberg_brace(1, BraceOrder::PlusCirc).unwrap());
        let t = q.tau(&Element::real([1.0, 2.0, 3.0])).unwrap();
        assert_eq!(t, Element::real([1.0, 2.0, 1.0]));
        let triv = brace_to_biquandle(&make_trivial_brace(FiniteGroup::symmetric(3)));
        for a in 0..6 {
            assert_eq!(triv.tau(&ix(a)).unwrap(), ix(a));
        }
    }

    #[test]
    fn tau_rejects_off_diagonal() {
        // x ∗ a = x + 1, x ⋆ a = x on ℤ₃: S(a, a) = (a + 1, a)
        let rows_ast: Vec<Vec<usize>> = (0..3).map(|x| vec![(x + 1) % 3; 3]).collect();
        let rows_star: Vec<Vec<usize>> = (0..3).map(|x| vec![x; 3]).collect();
        let q = Biquandle::from_doc(&BiquandleDoc { order: 3, ast: rows_ast, star: rows_star }).unwrap();
        assert!(matches!(q.tau(&ix(0)), Err(Error::AxiomViolation(_))));
        let r = check_biquandle_axioms(&q, CheckMode::Exhaustive);
        assert!(r.has("diagonal"));
    }

    #[test]
    fn s_map_on_trivial_abelian_brace() {
        // star is trivial and conjugation is the identity, so S is the swap
        let q = brace_to_biquandle(&make_trivial_brace(FiniteGroup::cyclic(3)));
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(q.s_map(&ix(u), &ix(v)).unwrap(), (ix(v), ix(u)));
            }
        }
    }

    /// Solves `S(b ⋆ a, a) = (a ∗ b, b)` by brute force over all `(a, b)`.
    #[test]
    fn alexander_s_map_matches_definition() {
        let q = make_alexander(5, 2, 3).unwrap();
        let mut table = std::collections::HashMap::new();
        for a in 0..5 {
            for b in 0..5 {
                let key = ((3 * b) % 5, a);
                let val = ((2 * a + 25 - 5 * b) % 5, b);
                assert!(table.insert(key, val).is_none());
            }
        }
        assert_eq!(table.len(), 25);
        for ((u, v), (s1, s2)) in table {
            assert_eq!(q.s_map(&ix(u), &ix(v)).unwrap(), (ix(s1), ix(s2)));
        }
    }

    #[test]
    fn alexander_examples() {
        let q = make_alexander(5, 2, 3).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(q.star(&ix(b), &ix(a)), ix((3 * b) % 5));
                assert_eq!(q.ast(&ix(a), &ix(b)), ix((2 * a) % 5));
            }
        }
        let id = make_alexander(5, 1, 1).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(id.yb_map(&ix(a), &ix(b)).unwrap(), (ix(b), ix(a)));
            }
        }
        assert!(matches!(make_alexander(6, 2, 1), Err(Error::Parameter(_))));
        assert!(matches!(make_alexander(5, 1, 5), Err(Error::Parameter(_))));
    }

    #[test]
    fn wada_on_z2_tabulated() {
        let q = make_wada(&FiniteGroup::cyclic(2));
        // a ∗ b = −b − a + b = a (mod 2 signs vanish), b ⋆ a = 2a + b = b
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(q.ast(&ix(a), &ix(b)), ix(a));
                assert_eq!(q.star(&ix(b), &ix(a)), ix(b));
            }
        }
        assert!(check_biquandle_axioms(&q, CheckMode::Exhaustive).valid);
    }

    #[test]
    fn finite_suites_pass() {
        let s3 = FiniteGroup::symmetric(3);
        for q in [
            make_wada(&s3),
            make_alexander(5, 2, 3).unwrap(),
            brace_to_biquandle(&make_trivial_brace(s3.clone())),
            quandle_to_biquandle(&Quandle::core(&FiniteGroup::cyclic(3))),
            quandle_to_biquandle(&Quandle::conjugation(&s3)),
        ] {
            let r = check_biquandle_axioms(&q, CheckMode::Exhaustive);
            assert!(r.valid, "{}: {r:?}", q.name());
        }
    }

    #[test]
    fn wada_inverse_composes_to_identity() {
        let q = make_wada(&FiniteGroup::symmetric(3));
        for a in 0..6 {
            for b in 0..6 {
                let (c, d) = q.yb_map(&ix(a), &ix(b)).unwrap();
                assert_eq!(q.yb_map_inverse(&c, &d).unwrap(), (ix(a), ix(b)));
            }
        }
    }

    #[test]
    fn non_ybe_map_is_caught() {
        // (a, b) ↦ (b, a + (0, 0, z_b))
        let q = Biquandle::custom(
            "shear",
            Carrier::Real { dim: 3 },
            |a, b| {
                let (a, b) = (a.as_real(), b.as_real());
                Element::real([a[0], a[1], a[2] + b[2]])
            },
            |b, _a| b.clone(),
            |c, a| {
                let (c, a) = (c.as_real(), a.as_real());
                Element::real([c[0], c[1], c[2] - a[2]])
            },
            |c, _a| c.clone(),
        );
        let r = check_biquandle_axioms(&q, CheckMode::sampled(1, 1e-9));
        assert!(r.has("ybe"), "{r:?}");
        // the x-shear (b, a + (0, 0, x_b)) does satisfy YBE
        let x_shear = Biquandle::custom(
            "x-shear",
            Carrier::Real { dim: 3 },
            |a, b| {
                let (a, b) = (a.as_real(), b.as_real());
                Element::real([a[0], a[1], a[2] + b[0]])
            },
            |b, _a| b.clone(),
            |c, a| {
                let (c, a) = (c.as_real(), a.as_real());
                Element::real([c[0], c[1], c[2] - a[0]])
            },
            |c, _a| c.clone(),
        );
        let r = check_biquandle_axioms(&x_shear, CheckMode::sampled(200, 1e-9));
        assert!(!r.has("ybe"), "{r:?}");
        assert!(matches!(
            q.yb_map_inverse(&Element::real([0.0; 3]), &Element::real([0.0; 3])),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn quandle_lift_of_trivial_quandle_is_swap() {
        let q = quandle_to_biquandle(&Quandle::trivial(3));
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(q.yb_map(&ix(a), &ix(b)).unwrap(), (ix(b), ix(a)));
            }
        }
        assert!(detect_quandle(&q, CheckMode::Exhaustive));
    }

    #[test]
    fn conjugation_lift_matches_trivial_brace() {
        let s3 = FiniteGroup::symmetric(3);
        let lift = quandle_to_biquandle(&Quandle::conjugation(&s3));
        let brace = brace_to_biquandle(&make_trivial_brace(s3));
        assert_eq!(lift.finite_maps().unwrap(), brace.finite_maps().unwrap());
    }

    #[test]
    fn sphere_lift_passes_sampled_suite() {
        let q = quandle_to_biquandle(&Quandle::sphere(2));
        let r = check_biquandle_axioms(&q, CheckMode::sampled(500, 1e-9));
        assert!(r.valid, "{r:?}");
        assert!(detect_quandle(&q, CheckMode::sampled(200, 1e-9)));
    }

    #[test]
    fn detect_quandle_examples() {
        assert!(!detect_quandle(&Biquandle::closed_form(ClosedForm::R2Heis), CheckMode::default()));
        assert!(detect_quandle(
            &brace_to_biquandle(&make_trivial_brace(FiniteGroup::symmetric(3))),
            CheckMode::Exhaustive
        ));
        assert!(!detect_quandle(&make_wada(&FiniteGroup::symmetric(3)), CheckMode::Exhaustive));
    }

    #[test]
    fn involutivity_examples() {
        for (form, expect) in [
            (ClosedForm::R1Heis, true),
            (ClosedForm::R2Heis, false),
            (ClosedForm::R1Torus, true),
            (ClosedForm::R2Torus, false),
        ] {
            let rep = is_involutive(&Biquandle::closed_form(form), CheckMode::default());
            assert_eq!(rep.involutive, expect, "{form}");
            assert_eq!(rep.witness.is_some(), !expect);
        }
    }

    #[test]
    fn json_biquandle_round_trip() {
        let text = r#"{"order": 2, "ast": [[0,0],[1,1]], "star": [[0,0],[1,1]]}"#;
        let q = Biquandle::from_json(text).unwrap();
        assert_eq!(q.provenance(), Provenance::Custom);
        assert!(check_biquandle_axioms(&q, CheckMode::Exhaustive).valid);
        assert!(matches!(
            Biquandle::from_json(r#"{"order": 2, "ast": [[0,3],[1,1]], "star": [[0,0],[1,1]]}"#),
            Err(Error::Format(_))
        ));
    }
}
