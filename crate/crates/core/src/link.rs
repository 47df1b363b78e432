//! Components and crossing matrices of braid closures, the bilinear
//! equations cutting out `J_X(L)` for `(ℝ³, r₂)`, and a harness that checks
//! them against the braid engine.
//!
//! Under/over convention: in a positive letter `σ_i` the strand entering at
//! position `i` is the lower strand; in `σ_i⁻¹` it is the strand entering at
//! position `i + 1`. A crossing with lower strand in `K_i` and upper strand
//! in `K_j` adds its sign to `c_ij`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::biquandle::{Biquandle, ClosedForm};
use crate::braid::BraidWord;
use crate::element::{Element, SAMPLE_RADIUS};
use crate::error::Result;
use crate::numeric::fixed_residual;

pub const CONVENTION: &str =
    "positive letter i: strand entering at position i is the lower strand";

/// Component labels of the closure, numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Components {
    pub count: usize,
    /// `strand_component[p]` for the strand starting at position `p`.
    pub strand_component: Vec<usize>,
}

pub fn closure_components(w: &BraidWord) -> Components {
    let perm = w.permutation();
    let mut label = vec![usize::MAX; w.strands()];
    let mut count = 0;
    for p in 0..w.strands() {
        if label[p] != usize::MAX {
            continue;
        }
        let mut q = p;
        while label[q] == usize::MAX {
            label[q] = count;
            q = perm[q];
        }
        count += 1;
    }
    Components {
        count,
        strand_component: label,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkProfile {
    pub components: usize,
    pub strand_component: Vec<usize>,
    pub c: Vec<Vec<i64>>,
    pub lk: Vec<Vec<i64>>,
    pub convention: &'static str,
}

/// Walks the braid and yields `(sign, lower strand, upper strand)` per letter,
/// strands named by starting position.
fn crossings(w: &BraidWord) -> Vec<(i64, usize, usize)> {
    let mut at: Vec<usize> = (0..w.strands()).collect();
    w.letters()
        .iter()
        .map(|&e| {
            let i = e.unsigned_abs() as usize - 1;
            let (lower, upper) = if e > 0 { (at[i], at[i + 1]) } else { (at[i + 1], at[i]) };
            at.swap(i, i + 1);
            (e.signum() as i64, lower, upper)
        })
        .collect()
}

pub fn crossing_matrix(w: &BraidWord) -> LinkProfile {
    let comps = closure_components(w);
    let n = comps.count;
    let mut c = vec![vec![0i64; n]; n];
    for (sign, lower, upper) in crossings(w) {
        let (i, j) = (comps.strand_component[lower], comps.strand_component[upper]);
        if i != j {
            c[i][j] += sign;
        }
    }
    let lk = (0..n)
        .map(|i| (0..n).map(|j| (c[i][j] + c[j][i]) / 2).collect())
        .collect();
    LinkProfile {
        components: n,
        strand_component: comps.strand_component,
        c,
        lk,
        convention: CONVENTION,
    }
}

/// `coefficient · x_x · y_y`, components 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coefficient: i64,
    pub x: usize,
    pub y: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub component: usize,
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
    /// Implied by the others.
    pub redundant: bool,
    pub text: String,
}

impl Equation {
    pub fn is_trivial(&self) -> bool {
        self.lhs.is_empty() && self.rhs.is_empty()
    }

    /// `lhs − rhs` at component coordinates `x`, `y` (0-based slices).
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> f64 {
        let side = |ts: &[Term]| {
            ts.iter()
                .map(|t| t.coefficient as f64 * x[t.x - 1] * y[t.y - 1])
                .sum::<f64>()
        };
        side(&self.lhs) - side(&self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BilinearSystem {
    pub variables: usize,
    pub equations: Vec<Equation>,
}

impl BilinearSystem {
    /// Equations that are neither redundant nor identically `0 = 0`.
    pub fn independent(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(|e| !e.redundant && !e.is_trivial())
    }

    pub fn is_empty(&self) -> bool {
        self.equations.iter().all(Equation::is_trivial)
    }

    pub fn text(&self) -> Vec<String> {
        self.equations.iter().map(|e| e.text.clone()).collect()
    }
}

fn render(ts: &[Term]) -> String {
    if ts.is_empty() {
        return "0".into();
    }
    ts.iter()
        .map(|t| format!("{}*x{}*y{}", t.coefficient, t.x, t.y))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// For each component `i`: `Σ_j c_ij x_i y_j = Σ_j c_ji x_j y_i`. The last
/// equation is minus the sum of the others and is flagged redundant.
pub fn coloring_space_system(p: &LinkProfile) -> BilinearSystem {
    let n = p.components;
    let equations = (0..n)
        .map(|i| {
            let lhs: Vec<Term> = (0..n)
                .filter(|&j| p.c[i][j] != 0)
                .map(|j| Term { coefficient: p.c[i][j], x: i + 1, y: j + 1 })
                .collect();
            let rhs: Vec<Term> = (0..n)
                .filter(|&j| p.c[j][i] != 0)
                .map(|j| Term { coefficient: p.c[j][i], x: j + 1, y: i + 1 })
                .collect();
            let text = format!("{} = {}", render(&lhs), render(&rhs));
            Equation {
                component: i + 1,
                lhs,
                rhs,
                redundant: i + 1 == n,
                text,
            }
        })
        .collect();
    BilinearSystem {
        variables: n,
        equations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub word: BraidWord,
    pub components: usize,
    pub on_set: usize,
    pub off_set: usize,
    pub max_on_set_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_off_set_residual: Option<f64>,
    /// Largest `|last equation|` over solutions of the others.
    pub max_redundant_value: f64,
    pub tolerance: f64,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Element>>,
    pub convention: &'static str,
}

/// z-shift picked up by each strand over one pass of the braid under `r₂`,
/// computed from the crossing list alone.
fn z_shifts(w: &BraidWord, xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut dz = vec![0.0; w.strands()];
    for (sign, lower, upper) in crossings(w) {
        let t = sign as f64 * xs[lower] * ys[upper];
        dz[lower] += t;
        dz[upper] -= t;
    }
    dz
}

/// Builds a state with the given per-component `(x, y)`: the first strand of
/// each component gets `z0[k]`, the rest is filled by propagating the shifts.
fn propagated_state(w: &BraidWord, p: &LinkProfile, x: &[f64], y: &[f64], z0: &[f64]) -> Vec<Element> {
    let k = w.strands();
    let xs: Vec<f64> = (0..k).map(|s| x[p.strand_component[s]]).collect();
    let ys: Vec<f64> = (0..k).map(|s| y[p.strand_component[s]]).collect();
    let dz = z_shifts(w, &xs, &ys);
    let perm = w.permutation();
    let mut z = vec![f64::NAN; k];
    for s in 0..k {
        let comp = p.strand_component[s];
        if z.iter().enumerate().any(|(t, v)| !v.is_nan() && p.strand_component[t] == comp) {
            continue;
        }
        z[s] = z0[comp];
        let mut cur = s;
        while z[perm[cur]].is_nan() {
            z[perm[cur]] = z[cur] + dz[cur];
            cur = perm[cur];
        }
    }
    (0..k)
        .map(|s| Element::real([xs[s], ys[s], z[s]]))
        .collect()
}

/// Random `x` with `y` given, solving every equation but the last: the
/// coefficient matrix of the first `n − 1` equations in `x` has a kernel.
fn on_set_x<R: Rng>(sys: &BilinearSystem, y: &[f64], rng: &mut R) -> Vec<f64> {
    let n = sys.variables;
    if n <= 1 {
        return vec![rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS); n];
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (row, eq) in sys.equations.iter().take(n - 1).enumerate() {
        for t in &eq.lhs {
            m[(row, t.x - 1)] += t.coefficient as f64 * y[t.y - 1];
        }
        for t in &eq.rhs {
            m[(row, t.x - 1)] -= t.coefficient as f64 * y[t.y - 1];
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max().max(1.0);
    let mut x = vec![0.0; n];
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= 1e-12 * smax {
            let coef = rng.gen_range(-1.0..=1.0);
            for (xi, vi) in x.iter_mut().zip(v_t.row(r).iter()) {
                *xi += coef * vi;
            }
        }
    }
    let scale = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale > 0.0 {
        let target = rng.gen_range(1.0..=SAMPLE_RADIUS);
        x.iter_mut().for_each(|v| *v *= target / scale);
    }
    x
}

/// Samples solutions of the bilinear system (z reconstructed by forward
/// propagation) and non-solutions, and compares both against the residual
/// of `f_β` under `(ℝ³, r₂)`.
pub fn verify_system_vs_fixed_points(
    w: &BraidWord,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ConsistencyReport> {
    let profile = crossing_matrix(w);
    let sys = coloring_space_system(&profile);
    let q = Biquandle::closed_form(ClosedForm::R2Heis);
    let n = profile.components;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = |rng: &mut ChaCha8Rng, k: usize| -> Vec<f64> {
        (0..k).map(|_| rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS)).collect()
    };
    let mut report = ConsistencyReport {
        word: w.clone(),
        components: n,
        on_set: 0,
        off_set: 0,
        max_on_set_residual: 0.0,
        min_off_set_residual: None,
        max_redundant_value: 0.0,
        tolerance,
        consistent: true,
        witness: None,
        convention: CONVENTION,
    };
    for _ in 0..samples {
        let y = uniform(&mut rng, n);
        let x = on_set_x(&sys, &y, &mut rng);
        let z0 = uniform(&mut rng, n);
        if let Some(last) = sys.equations.last() {
            report.max_redundant_value = report.max_redundant_value.max(last.evaluate(&x, &y).abs());
        }
        let state = propagated_state(w, &profile, &x, &y, &z0);
        let r = fixed_residual(&q, w, &state)?;
        report.on_set += 1;
        report.max_on_set_residual = report.max_on_set_residual.max(r);
        if !(r <= tolerance) && report.witness.is_none() {
            report.witness = Some(state);
        }
    }
    if !sys.is_empty() {
        let mut attempts = 0;
        while report.off_set < samples && attempts < 100 * samples {
            attempts += 1;
            let (x, y, z0) = (uniform(&mut rng, n), uniform(&mut rng, n), uniform(&mut rng, n));
            let violation = sys
                .equations
                .iter()
                .map(|e| e.evaluate(&x, &y).abs())
                .fold(0.0, f64::max);
            if violation <= 1e-6 {
                continue;
            }
            let state = propagated_state(w, &profile, &x, &y, &z0);
            let r = fixed_residual(&q, w, &state)?;
            report.off_set += 1;
            let min = report.min_off_set_residual.unwrap_or(f64::INFINITY);
            report.min_off_set_residual = Some(min.min(r));
            if !(r > tolerance) && report.witness.is_none() {
                report.witness = Some(state);
            }
        }
    }
    let redundancy_ok = report.max_redundant_value <= 1e-9 * SAMPLE_RADIUS.powi(3);
    report.consistent = report.witness.is_none() && redundancy_ok;
    Ok(report)
}
