//! Skew braces: a carrier with an additive group `(A, +)` and a
//! multiplicative group `(A, ∘)` linked by `a∘(b+c) = a∘b − a + a∘c`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::element::{Carrier, Element};
use crate::error::{Error, Result};
use crate::group::{flatten_square, ContinuousGroup, FiniteGroup, Group};
use crate::report::{CheckMode, SampledCheck, ValidationReport, Violation, DEFAULT_SAMPLES};

/// Which of the two continuous group laws plays the additive role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BraceOrder {
    /// The abelian law is `+`, the non-abelian law is `∘`.
    PlusCirc,
    /// Roles swapped: the non-abelian law is additive.
    CircPlus,
}

impl fmt::Display for BraceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BraceOrder::PlusCirc => "plus-circ",
            BraceOrder::CircPlus => "circ-plus",
        })
    }
}

impl FromStr for BraceOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus-circ" => Ok(BraceOrder::PlusCirc),
            "circ-plus" => Ok(BraceOrder::CircPlus),
            other => Err(Error::Parameter(format!(
                "unknown brace order `{other}` (expected plus-circ or circ-plus)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkewBrace {
    add: Group,
    circ: Group,
    name: String,
}

impl SkewBrace {
    /// Pairs two group structures on one carrier. Axioms are not checked here.
    pub fn new(add: impl Into<Group>, circ: impl Into<Group>, name: impl Into<String>) -> Result<Self> {
        let (add, circ) = (add.into(), circ.into());
        if add.carrier() != circ.carrier() {
            return Err(Error::Structural(format!(
                "additive carrier {:?} differs from multiplicative carrier {:?}",
                add.carrier(),
                circ.carrier()
            )));
        }
        Ok(SkewBrace {
            add,
            circ,
            name: name.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> Carrier {
        self.add.carrier()
    }

    pub fn additive(&self) -> &Group {
        &self.add
    }

    pub fn multiplicative(&self) -> &Group {
        &self.circ
    }

    pub fn zero(&self) -> Element {
        self.add.identity()
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        self.add.op(a, b)
    }

    pub fn neg(&self, a: &Element) -> Element {
        self.add.inv(a)
    }

    pub fn circ(&self, a: &Element, b: &Element) -> Element {
        self.circ.op(a, b)
    }

    /// The `∘`-inverse `a′`.
    pub fn circ_inv(&self, a: &Element) -> Element {
        self.circ.inv(a)
    }

    /// `a∘b − a + a∘c`, the right-hand side of brace compatibility.
    pub fn compatibility_rhs(&self, a: &Element, b: &Element, c: &Element) -> Element {
        self.add(&self.add(&self.circ(a, b), &self.neg(a)), &self.circ(a, c))
    }

    pub fn is_trivial(&self) -> bool {
        self.add == self.circ
    }
}

/// `(G, ·, ·)`: both structures are the group law of `g`.
pub fn make_trivial_brace(g: impl Into<Group>) -> SkewBrace {
    let g = g.into();
    SkewBrace {
        add: g.clone(),
        circ: g,
        name: "trivial".into(),
    }
}

/// Skew brace on `X × A` with `(x,a)+(y,b) = (xy, ab)` and
/// `(x,a)∘(y,b) = (x·h_a(y), ab)`.
///
/// `h[a]` is the automorphism `h_a` of `X` as a permutation of `0..|X|`.
/// The pair `(x, a)` has index `x + |X|·a`.
pub fn make_semidirect_brace(x: &FiniteGroup, a: &FiniteGroup, h: &[Vec<usize>]) -> Result<SkewBrace> {
    let (nx, na) = (x.order(), a.order());
    if h.len() != na {
        return Err(Error::Construction {
            message: format!("expected {na} automorphisms, got {}", h.len()),
            witness: vec![],
        });
    }
    for (ai, ha) in h.iter().enumerate() {
        if let Some(w) = x.automorphism_witness(ha) {
            let mut witness = vec![ai];
            witness.extend(w);
            return Err(Error::Construction {
                message: format!("h_{ai} is not an automorphism of X"),
                witness,
            });
        }
    }
    for p in 0..na {
        for q in 0..na {
            let pq = a.op(p, q);
            if let Some(y) = (0..nx).find(|&y| h[pq][y] != h[p][h[q][y]]) {
                return Err(Error::Construction {
                    message: "h is not a homomorphism: h_(ab) ≠ h_a ∘ h_b".into(),
                    witness: vec![p, q, y],
                });
            }
        }
    }
    let n = nx * na;
    let split = |i: usize| (i % nx, i / nx);
    let mut add = Vec::with_capacity(n * n);
    let mut circ = Vec::with_capacity(n * n);
    for i in 0..n {
        let (xi, ai) = split(i);
        for j in 0..n {
            let (xj, aj) = split(j);
            let ab = a.op(ai, aj);
            add.push(x.op(xi, xj) + nx * ab);
            circ.push(x.op(xi, h[ai][xj]) + nx * ab);
        }
    }
    let add = FiniteGroup::from_flat(n, add, None, None).certified()?;
    let circ = FiniteGroup::from_flat(n, circ, None, None).certified()?;
    let trivial = add == circ;
    Ok(SkewBrace {
        add: add.into(),
        circ: circ.into(),
        name: if trivial { "semidirect (trivial)" } else { "semidirect" }.into(),
    })
}

/// Skew brace of a radical ring: `(R, +)` abelian and `a∘b = a + a·b + b`.
///
/// The circle group is certified by enumerating circle-inverses.
pub fn make_radical_ring_brace(add: &FiniteGroup, mult: &[Vec<usize>]) -> Result<SkewBrace> {
    let n = add.order();
    let m = flatten_square(n, mult, "multiplication table")?;
    let mul = |a: usize, b: usize| m[a * n + b];
    let violation = |message: &str, witness: Vec<usize>| Error::RadicalRing {
        message: message.into(),
        witness,
    };
    if !add.is_abelian() {
        return Err(violation("additive group is not abelian", vec![]));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                    return Err(violation("multiplication is not associative", vec![a, b, c]));
                }
                let bc = add.op(b, c);
                if mul(a, bc) != add.op(mul(a, b), mul(a, c))
                    || mul(bc, a) != add.op(mul(b, a), mul(c, a))
                {
                    return Err(violation("multiplication does not distribute", vec![a, b, c]));
                }
            }
        }
    }
    let circle: Vec<usize> = (0..n * n)
        .map(|k| {
            let (a, b) = (k / n, k % n);
            add.op(add.op(a, mul(a, b)), b)
        })
        .collect();
    let zero = add.identity();
    for a in 0..n {
        let has_inverse = (0..n).any(|b| circle[a * n + b] == zero && circle[b * n + a] == zero);
        if !has_inverse {
            return Err(violation("element has no circle-inverse", vec![a]));
        }
    }
    let circ = FiniteGroup::from_flat(n, circle, Some(zero), None)
        .certified()
        .map_err(|e| violation(&format!("circle operation is not a group: {e}"), vec![]))?;
    Ok(SkewBrace {
        add: add.clone().into(),
        circ: circ.into(),
        name: "radical ring".into(),
    })
}

/// `ℤ_m ⋊ ℤ₂` with the generator of `ℤ₂` acting by inversion.
pub fn inversion_semidirect_brace(m: usize) -> Result<SkewBrace> {
    if m == 0 {
        return Err(Error::Parameter("inversion_semidirect_brace needs m ≥ 1".into()));
    }
    let h = vec![(0..m).collect(), (0..m).map(|x| (m - x) % m).collect()];
    make_semidirect_brace(&FiniteGroup::cyclic(m), &FiniteGroup::cyclic(2), &h)
}

/// The ring `2ℤ/modulusℤ` (index `k` is the residue `2k`).
pub fn even_residue_brace(modulus: usize) -> Result<SkewBrace> {
    if modulus < 2 || modulus % 2 != 0 {
        return Err(Error::Parameter(format!("modulus {modulus} must be even and ≥ 2")));
    }
    let k = modulus / 2;
    let mult: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).map(|j| (4 * i * j % modulus) / 2).collect())
        .collect();
    make_radical_ring_brace(&FiniteGroup::cyclic(k), &mult)
}

/// The vector-space / Heisenberg brace on `ℝ^{2n+1}` in either role order.
pub fn heisenberg_brace(n: usize, order: BraceOrder) -> Result<SkewBrace> {
    if n == 0 {
        return Err(Error::Parameter("heisenberg_brace needs n ≥ 1".into()));
    }
    let plus = ContinuousGroup::RealVector { dim: 2 * n + 1 };
    let heis = ContinuousGroup::Heisenberg { n };
    let name = format!("heisenberg:{n}:{order}");
    Ok(match order {
        BraceOrder::PlusCirc => SkewBrace::new(plus, heis, name)?,
        BraceOrder::CircPlus => SkewBrace::new(heis, plus, name)?,
    })
}

/// The brace on `S¹ × ℂ` built from the product and Euclidean group laws.
pub fn torus_brace(order: BraceOrder) -> SkewBrace {
    let plus = Group::Continuous(ContinuousGroup::TorusProduct);
    let circ = Group::Continuous(ContinuousGroup::TorusEuclidean);
    let name = format!("torus:{order}");
    match order {
        BraceOrder::PlusCirc => SkewBrace { add: plus, circ, name },
        BraceOrder::CircPlus => SkewBrace { add: circ, circ: plus, name },
    }
}

/// Checks both group structures, the shared identity and compatibility.
///
/// Finite braces in exhaustive mode visit all `order³` triples; otherwise
/// `count` seeded triples are compared within `tolerance`.
pub fn validate_skew_brace(b: &SkewBrace, mode: CheckMode) -> ValidationReport {
    let mut report = ValidationReport::new();
    let carrier = b.carrier();
    let group_mode = match (carrier.is_finite(), mode) {
        (false, CheckMode::Exhaustive) => CheckMode::default(),
        _ => mode,
    };
    report.merge("additive ", b.add.validate(group_mode));
    report.merge("multiplicative ", b.circ.validate(group_mode));

    let (za, zc) = (b.add.identity(), b.circ.identity());
    let gap = carrier.distance(&za, &zc);
    if gap > mode.tolerance() {
        report.push(Violation::sampled("identity coincidence", vec![za, zc], gap));
    }

    match (&b.add, &b.circ, mode) {
        (Group::Finite(add), Group::Finite(circ), CheckMode::Exhaustive) => {
            let n = add.order();
            let w = (0..n).into_par_iter().find_map_first(|a| {
                for x in 0..n {
                    let ax = circ.op(a, x);
                    let lhs_base = add.op(ax, add.inv(a));
                    for y in 0..n {
                        let lhs = circ.op(a, add.op(x, y));
                        if lhs != add.op(lhs_base, circ.op(a, y)) {
                            return Some([a, x, y]);
                        }
                    }
                }
                None
            });
            if let Some(w) = w {
                report.push(Violation::finite("compatibility", &w));
            }
        }
        _ => {
            let (count, tolerance, seed) = match mode {
                CheckMode::Sampled { count, tolerance, seed } => (count, tolerance, seed),
                CheckMode::Exhaustive => (DEFAULT_SAMPLES, CheckMode::default().tolerance(), 0),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut check = SampledCheck::new("compatibility", tolerance);
            for _ in 0..count {
                let x = carrier.sample(&mut rng);
                let y = carrier.sample(&mut rng);
                let z = carrier.sample(&mut rng);
                let lhs = b.circ(&x, &b.add(&y, &z));
                let rhs = b.compatibility_rhs(&x, &y, &z);
                check.observe(carrier.distance(&lhs, &rhs), || vec![x.clone(), y.clone(), z.clone()]);
            }
            check.finish(&mut report);
        }
    }
    report
}
