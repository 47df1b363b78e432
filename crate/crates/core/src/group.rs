//! Groups that carry skew-brace structures: finite Cayley tables and the
//! closed-form continuous groups (vector spaces, Heisenberg groups and the
//! two group laws on `S¹ × ℂ`).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::element::{dot, unit, Carrier, Element};
use crate::error::{Error, Result};
use crate::report::{CheckMode, SampledCheck, ValidationReport, Violation};

/// Largest finite carrier accepted; exhaustive checks are cubic in the order.
pub const MAX_ORDER: usize = 4096;

/// A finite group given by its full Cayley table on `0..order`.
///
/// Construction only checks the table's shape; use [`validate_group`] (or
/// [`FiniteGroup::new`]) to certify the group axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

/// JSON document for a finite group or multiplication table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableDoc {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<usize>>,
}

/// Checks that `rows` is an `order × order` table with entries in range and
/// returns it flattened row-major.
pub(crate) fn flatten_square(order: usize, rows: &[Vec<usize>], what: &str) -> Result<Vec<usize>> {
    if order == 0 {
        return Err(Error::Format(format!("{what}: order must be positive")));
    }
    if order > MAX_ORDER {
        return Err(Error::Format(format!(
            "{what}: order {order} exceeds the cap of {MAX_ORDER}"
        )));
    }
    if rows.len() != order {
        return Err(Error::Format(format!(
            "{what}: expected {order} rows, found {}",
            rows.len()
        )));
    }
    let mut flat = Vec::with_capacity(order * order);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != order {
            return Err(Error::Format(format!(
                "{what}: row {i} has {} entries, expected {order}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= order {
                return Err(Error::Format(format!(
                    "{what}: entry ({i},{j}) = {v} is out of range 0..{order}"
                )));
            }
            flat.push(v);
        }
    }
    Ok(flat)
}

impl FiniteGroup {
    /// Wraps a table after shape checks, locating the identity and inverses
    /// where they exist. Axioms are not checked.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let order = rows.len();
        let table = flatten_square(order, &rows, "group table")?;
        Ok(Self::from_flat(order, table, None, None))
    }

    pub fn from_doc(doc: TableDoc) -> Result<Self> {
        let table = flatten_square(doc.order, &doc.table, "group table")?;
        if let Some(e) = doc.identity {
            if e >= doc.order {
                return Err(Error::Format(format!("identity {e} out of range")));
            }
        }
        if let Some(inv) = &doc.inverse {
            if inv.len() != doc.order || inv.iter().any(|&i| i >= doc.order) {
                return Err(Error::Format("inverse array malformed".into()));
            }
        }
        Ok(Self::from_flat(doc.order, table, doc.identity, doc.inverse))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(serde_json::from_str(text)?)
    }

    /// Builds and certifies a group; fails with the violation report otherwise.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let g = Self::from_table(rows)?;
        g.certified()
    }

    pub(crate) fn certified(self) -> Result<Self> {
        let report = validate_group(&self);
        if report.valid {
            Ok(self)
        } else {
            Err(Error::InvalidGroup(report))
        }
    }

    pub(crate) fn from_flat(
        order: usize,
        table: Vec<usize>,
        identity: Option<usize>,
        inverse: Option<Vec<usize>>,
    ) -> Self {
        let at = |i: usize, j: usize| table[i * order + j];
        let identity = identity
            .or_else(|| (0..order).find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x)))
            .unwrap_or(0);
        let inverse = inverse.unwrap_or_else(|| {
            (0..order)
                .map(|i| {
                    (0..order)
                        .find(|&j| at(i, j) == identity && at(j, i) == identity)
                        .unwrap_or(i)
                })
                .collect()
        });
        FiniteGroup {
            order,
            table,
            identity,
            inverse,
        }
    }

    /// Cyclic group `ℤ_n` under addition.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_ORDER);
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        Self::from_flat(n, table, Some(0), None)
    }

    /// Symmetric group on `k` letters; permutations in lexicographic order,
    /// product `(p·q)(x) = p(q(x))`.
    pub fn symmetric(k: usize) -> Self {
        assert!((1..=6).contains(&k), "symmetric group too large");
        let perms = permutations(k);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
        let n = perms.len();
        let mut table = Vec::with_capacity(n * n);
        for p in &perms {
            for q in &perms {
                let pq: Vec<usize> = (0..k).map(|x| p[q[x]]).collect();
                table.push(index(&pq));
            }
        }
        Self::from_flat(n, table, Some(0), None)
    }

    /// Dihedral group of order `2m`: element `r^k s^e` has index `k + m·e`.
    pub fn dihedral(m: usize) -> Self {
        assert!(m >= 1);
        let n = 2 * m;
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            let (k1, e1) = (a % m, a / m);
            for b in 0..n {
                let (k2, e2) = (b % m, b / m);
                let k = if e1 == 0 { k1 + k2 } else { k1 + m - k2 } % m;
                table.push(k + m * ((e1 + e2) % 2));
            }
        }
        Self::from_flat(n, table, Some(0), None)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn to_doc(&self) -> TableDoc {
        TableDoc {
            order: self.order,
            table: self.rows(),
            identity: Some(self.identity),
            inverse: Some(self.inverse.clone()),
        }
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.op(a, b) == self.op(b, a)))
    }

    /// First pair `(a, b)` with `f(ab) ≠ f(a)f(b)`, or a non-injective point,
    /// when `f` is not an automorphism.
    pub fn automorphism_witness(&self, f: &[usize]) -> Option<Vec<usize>> {
        if f.len() != self.order {
            return Some(vec![]);
        }
        let mut seen = vec![false; self.order];
        for (x, &y) in f.iter().enumerate() {
            if y >= self.order || seen[y] {
                return Some(vec![x]);
            }
            seen[y] = true;
        }
        for a in 0..self.order {
            for b in 0..self.order {
                if f[self.op(a, b)] != self.op(f[a], f[b]) {
                    return Some(vec![a, b]);
                }
            }
        }
        None
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Exhaustive group-axiom check of a Cayley table.
///
/// Reports the lexicographically smallest witness for each failing axiom.
pub fn validate_group(g: &FiniteGroup) -> ValidationReport {
    let n = g.order;
    let e = g.identity;
    let mut report = ValidationReport::new();

    if let Some(x) = (0..n).find(|&x| g.op(e, x) != x || g.op(x, e) != x) {
        report.push(Violation::finite("identity", &[e, x]));
    }
    if let Some(i) = (0..n).find(|&i| g.op(i, g.inv(i)) != e || g.op(g.inv(i), i) != e) {
        report.push(Violation::finite("inverse", &[i, g.inv(i)]));
    }
    let assoc = (0..n).into_par_iter().find_map_first(|a| {
        for b in 0..n {
            let ab = g.op(a, b);
            for c in 0..n {
                if g.op(ab, c) != g.op(a, g.op(b, c)) {
                    return Some([a, b, c]);
                }
            }
        }
        None
    });
    if let Some(w) = assoc {
        report.push(Violation::finite("associativity", &w));
    }
    report
}

/// The closed-form continuous groups used as brace carriers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuousGroup {
    /// `(ℝ^d, +)`.
    RealVector { dim: usize },
    /// Heisenberg group on `ℝⁿ × ℝⁿ × ℝ`:
    /// `(α₁,β₁,z₁)(α₂,β₂,z₂) = (α₁+α₂, β₁+β₂, z₁+z₂+α₁·β₂)`.
    Heisenberg { n: usize },
    /// `S¹ × ℂ` with `(w₁,α₁)(w₂,α₂) = (w₁w₂, α₁+α₂)`.
    TorusProduct,
    /// `S¹ × ℂ` with `(w₁,α₁)(w₂,α₂) = (w₁w₂, α₁+w₁α₂)` (rotations and translations of the plane).
    TorusEuclidean,
}

impl ContinuousGroup {
    pub fn carrier(&self) -> Carrier {
        match *self {
            ContinuousGroup::RealVector { dim } => Carrier::Real { dim },
            ContinuousGroup::Heisenberg { n } => Carrier::Real { dim: 2 * n + 1 },
            ContinuousGroup::TorusProduct | ContinuousGroup::TorusEuclidean => Carrier::Torus,
        }
    }

    pub fn identity(&self) -> Element {
        match *self {
            ContinuousGroup::RealVector { dim } => Element::Real(vec![0.0; dim]),
            ContinuousGroup::Heisenberg { n } => Element::Real(vec![0.0; 2 * n + 1]),
            ContinuousGroup::TorusProduct | ContinuousGroup::TorusEuclidean => Element::Torus {
                w: Complex64::new(1.0, 0.0),
                alpha: Complex64::new(0.0, 0.0),
            },
        }
    }

    pub fn op(&self, a: &Element, b: &Element) -> Element {
        match *self {
            ContinuousGroup::RealVector { .. } => {
                Element::Real(a.as_real().iter().zip(b.as_real()).map(|(x, y)| x + y).collect())
            }
            ContinuousGroup::Heisenberg { n } => {
                let (a, b) = (a.as_real(), b.as_real());
                let mut out: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out[2 * n] += dot(&a[..n], &b[n..2 * n]);
                Element::Real(out)
            }
            ContinuousGroup::TorusProduct => {
                let ((w1, a1), (w2, a2)) = (a.as_torus(), b.as_torus());
                Element::Torus {
                    w: unit(w1 * w2),
                    alpha: a1 + a2,
                }
            }
            ContinuousGroup::TorusEuclidean => {
                let ((w1, a1), (w2, a2)) = (a.as_torus(), b.as_torus());
                Element::Torus {
                    w: unit(w1 * w2),
                    alpha: a1 + w1 * a2,
                }
            }
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match *self {
            ContinuousGroup::RealVector { .. } => {
                Element::Real(a.as_real().iter().map(|x| -x).collect())
            }
            ContinuousGroup::Heisenberg { n } => {
                let a = a.as_real();
                let mut out: Vec<f64> = a.iter().map(|x| -x).collect();
                out[2 * n] = dot(&a[..n], &a[n..2 * n]) - a[2 * n];
                Element::Real(out)
            }
            ContinuousGroup::TorusProduct => {
                let (w, alpha) = a.as_torus();
                Element::Torus {
                    w: w.conj(),
                    alpha: -alpha,
                }
            }
            ContinuousGroup::TorusEuclidean => {
                let (w, alpha) = a.as_torus();
                Element::Torus {
                    w: w.conj(),
                    alpha: -(w.conj() * alpha),
                }
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(
            self,
            ContinuousGroup::RealVector { .. } | ContinuousGroup::TorusProduct
        )
    }
}

type BinaryOp = dyn Fn(&Element, &Element) -> Element + Send + Sync;
type UnaryOp = dyn Fn(&Element) -> Element + Send + Sync;

/// A user-supplied group law on a continuous carrier.
pub struct CustomGroup {
    pub name: String,
    pub carrier: Carrier,
    pub identity: Element,
    op: Box<BinaryOp>,
    inv: Box<UnaryOp>,
}

impl CustomGroup {
    pub fn new(
        name: impl Into<String>,
        carrier: Carrier,
        identity: Element,
        op: impl Fn(&Element, &Element) -> Element + Send + Sync + 'static,
        inv: impl Fn(&Element) -> Element + Send + Sync + 'static,
    ) -> Self {
        CustomGroup {
            name: name.into(),
            carrier,
            identity,
            op: Box::new(op),
            inv: Box::new(inv),
        }
    }
}

impl fmt::Debug for CustomGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGroup")
            .field("name", &self.name)
            .field("carrier", &self.carrier)
            .finish_non_exhaustive()
    }
}

/// Any group, as seen by skew-brace code.
#[derive(Clone, Debug)]
pub enum Group {
    Finite(Arc<FiniteGroup>),
    Continuous(ContinuousGroup),
    Custom(Arc<CustomGroup>),
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Group::Finite(a), Group::Finite(b)) => a == b,
            (Group::Continuous(a), Group::Continuous(b)) => a == b,
            (Group::Custom(a), Group::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl From<CustomGroup> for Group {
    fn from(g: CustomGroup) -> Self {
        Group::Custom(Arc::new(g))
    }
}

impl From<FiniteGroup> for Group {
    fn from(g: FiniteGroup) -> Self {
        Group::Finite(Arc::new(g))
    }
}

impl From<ContinuousGroup> for Group {
    fn from(g: ContinuousGroup) -> Self {
        Group::Continuous(g)
    }
}

impl Group {
    pub fn carrier(&self) -> Carrier {
        match self {
            Group::Finite(g) => Carrier::Finite { order: g.order() },
            Group::Continuous(g) => g.carrier(),
            Group::Custom(g) => g.carrier,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            Group::Finite(g) => Element::Index(g.identity()),
            Group::Continuous(g) => g.identity(),
            Group::Custom(g) => g.identity.clone(),
        }
    }

    pub fn op(&self, a: &Element, b: &Element) -> Element {
        match self {
            Group::Finite(g) => Element::Index(g.op(a.as_index(), b.as_index())),
            Group::Continuous(g) => g.op(a, b),
            Group::Custom(g) => (g.op)(a, b),
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match self {
            Group::Finite(g) => Element::Index(g.inv(a.as_index())),
            Group::Continuous(g) => g.inv(a),
            Group::Custom(g) => (g.inv)(a),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteGroup> {
        match self {
            Group::Finite(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Group::Finite(g) => g.is_abelian(),
            Group::Continuous(g) => g.is_abelian(),
            Group::Custom(_) => false,
        }
    }

    /// Exhaustive axioms for finite groups; for continuous groups the
    /// identity, inverse and associativity laws at seeded samples.
    pub fn validate(&self, mode: CheckMode) -> ValidationReport {
        match (self, mode) {
            (Group::Finite(g), _) => validate_group(g),
            (_, CheckMode::Sampled { count, tolerance, seed }) => {
                validate_sampled_group(self, count, tolerance, seed)
            }
            (_, CheckMode::Exhaustive) => validate_sampled_group(
                self,
                crate::report::DEFAULT_SAMPLES,
                crate::report::DEFAULT_TOLERANCE,
                0,
            ),
        }
    }
}

fn validate_sampled_group(
    g: &Group,
    count: usize,
    tolerance: f64,
    seed: u64,
) -> ValidationReport {
    let carrier = g.carrier();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = g.identity();
    let mut identity = SampledCheck::new("identity", tolerance);
    let mut inverse = SampledCheck::new("inverse", tolerance);
    let mut assoc = SampledCheck::new("associativity", tolerance);
    for _ in 0..count {
        let a = carrier.sample(&mut rng);
        let b = carrier.sample(&mut rng);
        let c = carrier.sample(&mut rng);
        let r = carrier
            .distance(&g.op(&a, &e), &a)
            .max(carrier.distance(&g.op(&e, &a), &a));
        identity.observe(r, || vec![a.clone()]);
        let ai = g.inv(&a);
        let r = carrier
            .distance(&g.op(&a, &ai), &e)
            .max(carrier.distance(&g.op(&ai, &a), &e));
        inverse.observe(r, || vec![a.clone()]);
        let r = carrier.distance(&g.op(&g.op(&a, &b), &c), &g.op(&a, &g.op(&b, &c)));
        assoc.observe(r, || vec![a.clone(), b.clone(), c.clone()]);
    }
    let mut report = ValidationReport::new();
    identity.finish(&mut report);
    inverse.finish(&mut report);
    assoc.finish(&mut report);
    report
}
