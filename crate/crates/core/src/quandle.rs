//! Quandles: idempotent, right-invertible, right self-distributive magmas.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::element::{dot, Carrier, Element};
use crate::error::Result;
use crate::group::{flatten_square, FiniteGroup};
use crate::report::{CheckMode, SampledCheck, ValidationReport, Violation, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
enum QuandleOp {
    /// `table[a * n + b] = a ∗ b`.
    Table(Arc<Vec<usize>>),
    /// Point reflection `x ∗ y = 2(x·y)y − x` on the unit sphere.
    SphereReflection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quandle {
    carrier: Carrier,
    op: QuandleOp,
    name: String,
}

impl Quandle {
    /// Wraps an operation table `rows[a][b] = a ∗ b`. Axioms are not checked.
    pub fn from_table(rows: &[Vec<usize>], name: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        let table = flatten_square(n, rows, "quandle table")?;
        Ok(Self::from_flat(n, table, name))
    }

    fn from_flat(order: usize, table: Vec<usize>, name: impl Into<String>) -> Self {
        Quandle {
            carrier: Carrier::Finite { order },
            op: QuandleOp::Table(Arc::new(table)),
            name: name.into(),
        }
    }

    /// `a ∗ b = a`.
    pub fn trivial(order: usize) -> Self {
        let table = (0..order * order).map(|k| k / order).collect();
        Self::from_flat(order, table, format!("trivial:{order}"))
    }

    /// `a ∗ b = b⁻¹ a b`.
    pub fn conjugation(g: &FiniteGroup) -> Self {
        let n = g.order();
        let table = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                g.op(g.op(g.inv(b), a), b)
            })
            .collect();
        Self::from_flat(n, table, "conjugation")
    }

    /// `a ∗ b = b a⁻¹ b`.
    pub fn core(g: &FiniteGroup) -> Self {
        let n = g.order();
        let table = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                g.op(g.op(b, g.inv(a)), b)
            })
            .collect();
        Self::from_flat(n, table, "core")
    }

    /// The sphere `Sⁿ` with `x ∗ y` the reflection of `x` through the line of `y`.
    pub fn sphere(dim: usize) -> Self {
        Quandle {
            carrier: Carrier::Sphere { dim },
            op: QuandleOp::SphereReflection,
            name: format!("sphere:{dim}"),
        }
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    fn order(&self) -> usize {
        self.carrier.order().unwrap_or(0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ast(&self, a: &Element, b: &Element) -> Element {
        match &self.op {
            QuandleOp::Table(t) => {
                let n = self.order();
                Element::Index(t[a.as_index() * n + b.as_index()])
            }
            QuandleOp::SphereReflection => reflect(a.as_real(), b.as_real()),
        }
    }

    /// The unique `x` with `x ∗ b = c`, if it exists.
    pub fn ast_inv(&self, c: &Element, b: &Element) -> Option<Element> {
        match &self.op {
            QuandleOp::Table(t) => {
                let n = self.order();
                let (c, b) = (c.as_index(), b.as_index());
                (0..n).find(|&x| t[x * n + b] == c).map(Element::Index)
            }
            // reflections are involutions
            QuandleOp::SphereReflection => Some(reflect(c.as_real(), b.as_real())),
        }
    }

    /// The table `a ∗ b` at index `a * n + b` for finite quandles.
    pub(crate) fn table(&self) -> Option<&[usize]> {
        match &self.op {
            QuandleOp::Table(t) => Some(t),
            QuandleOp::SphereReflection => None,
        }
    }
}

fn reflect(x: &[f64], y: &[f64]) -> Element {
    let c = 2.0 * dot(x, y);
    Element::Real(x.iter().zip(y).map(|(xi, yi)| c * yi - xi).collect())
}

/// Checks idempotence, right-translation bijectivity and right
/// self-distributivity. Finite quandles are always checked exhaustively.
pub fn check_quandle_axioms(q: &Quandle, mode: CheckMode) -> ValidationReport {
    match q.table() {
        Some(t) => check_finite(t, q.carrier.order().unwrap()),
        None => {
            let (count, tolerance, seed) = match mode {
                CheckMode::Sampled { count, tolerance, seed } => (count, tolerance, seed),
                CheckMode::Exhaustive => (DEFAULT_SAMPLES, DEFAULT_TOLERANCE, 0),
            };
            check_sampled(q, count, tolerance, seed)
        }
    }
}

pub(crate) fn check_finite(t: &[usize], n: usize) -> ValidationReport {
    let op = |a: usize, b: usize| t[a * n + b];
    let mut report = ValidationReport::new();
    if let Some(a) = (0..n).find(|&a| op(a, a) != a) {
        report.push(Violation::finite("idempotence", &[a]));
    }
    let non_bijective = (0..n).find(|&b| {
        let mut seen = vec![false; n];
        (0..n).any(|a| std::mem::replace(&mut seen[op(a, b)], true))
    });
    if let Some(b) = non_bijective {
        report.push(Violation::finite("right-bijectivity", &[b]));
    }
    let w = (0..n).into_par_iter().find_map_first(|a| {
        for b in 0..n {
            for c in 0..n {
                if op(op(a, b), c) != op(op(a, c), op(b, c)) {
                    return Some([a, b, c]);
                }
            }
        }
        None
    });
    if let Some(w) = w {
        report.push(Violation::finite("self-distributivity", &w));
    }
    report
}

fn check_sampled(q: &Quandle, count: usize, tolerance: f64, seed: u64) -> ValidationReport {
    let carrier = q.carrier;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idem = SampledCheck::new("idempotence", tolerance);
    let mut bij = SampledCheck::new("right-bijectivity", tolerance);
    let mut dist = SampledCheck::new("self-distributivity", tolerance);
    for _ in 0..count {
        let a = carrier.sample(&mut rng);
        let b = carrier.sample(&mut rng);
        let c = carrier.sample(&mut rng);
        idem.observe(carrier.distance(&q.ast(&a, &a), &a), || vec![a.clone()]);
        let r = match (q.ast_inv(&q.ast(&a, &b), &b), q.ast_inv(&a, &b)) {
            (Some(x), Some(y)) => carrier
                .distance(&x, &a)
                .max(carrier.distance(&q.ast(&y, &b), &a)),
            _ => f64::INFINITY,
        };
        bij.observe(r, || vec![a.clone(), b.clone()]);
        let lhs = q.ast(&q.ast(&a, &b), &c);
        let rhs = q.ast(&q.ast(&a, &c), &q.ast(&b, &c));
        dist.observe(carrier.distance(&lhs, &rhs), || vec![a.clone(), b.clone(), c.clone()]);
    }
    let mut report = ValidationReport::new();
    idem.finish(&mut report);
    bij.finish(&mut report);
    dist.finish(&mut report);
    report
}
