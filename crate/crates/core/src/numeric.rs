//! Numeric realization of the fixed set of `f_β` on continuous carriers:
//! residuals, a damped Gauss–Newton solver and a rank-based dimension
//! estimate. All Jacobians are central finite differences in the local
//! charts of `Carrier::retract`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::biquandle::Biquandle;
use crate::braid::{induced_map, BraidWord, FixedSetReport};
use crate::element::{tuple_distance, Element};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConfig {
    pub fd_step: f64,
    pub max_iterations: usize,
    /// Step halvings tried per iteration before giving up.
    pub max_halvings: usize,
    /// Singular values `≤ rank_cutoff · σ_max` count as zero.
    pub rank_cutoff: f64,
    /// Residual at which a state counts as fixed.
    pub tolerance: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            fd_step: 1e-6,
            max_iterations: 100,
            max_halvings: 20,
            rank_cutoff: 1e-6,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedSample {
    pub point: Vec<Element>,
    pub residual: f64,
    pub dimension: usize,
    pub singular_values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub dimension: usize,
    /// Local dimension of `Xⁿ`.
    pub ambient: usize,
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// Max componentwise distance of `f_β(state)` from `state`.
pub fn fixed_residual(q: &Biquandle, w: &BraidWord, state: &[Element]) -> Result<f64> {
    let image = induced_map(q, w, state)?;
    Ok(tuple_distance(&image, state))
}

fn require_continuous(q: &Biquandle) -> Result<()> {
    if q.carrier().is_finite() {
        return Err(Error::Precondition(
            "numeric fixed-point analysis needs a continuous carrier".into(),
        ));
    }
    Ok(())
}

/// `f_β(p) − p` in embedding coordinates.
fn residual_vector(q: &Biquandle, w: &BraidWord, p: &[Element]) -> Result<DVector<f64>> {
    let image = induced_map(q, w, p)?;
    let c = q.carrier();
    let v: Vec<f64> = image
        .iter()
        .zip(p)
        .flat_map(|(a, b)| c.difference(a, b))
        .collect();
    Ok(DVector::from_vec(v))
}

fn shifted(q: &Biquandle, p: &[Element], delta: &[f64]) -> Vec<Element> {
    let c = q.carrier();
    let t = c.tangent_dim();
    p.iter()
        .enumerate()
        .map(|(s, e)| c.retract(e, &delta[s * t..(s + 1) * t]))
        .collect()
}

fn jacobian(q: &Biquandle, w: &BraidWord, p: &[Element], h: f64) -> Result<DMatrix<f64>> {
    let c = q.carrier();
    let cols = p.len() * c.tangent_dim();
    let rows = p.len() * c.embedding_dim();
    let mut j = DMatrix::zeros(rows, cols);
    let mut delta = vec![0.0; cols];
    for col in 0..cols {
        delta[col] = h;
        let plus = residual_vector(q, w, &shifted(q, p, &delta))?;
        delta[col] = -h;
        let minus = residual_vector(q, w, &shifted(q, p, &delta))?;
        delta[col] = 0.0;
        j.set_column(col, &((plus - minus) / (2.0 * h)));
    }
    Ok(j)
}

pub fn solve_fixed_point_near(q: &Biquandle, w: &BraidWord, seed: &[Element]) -> Result<Vec<Element>> {
    solve_fixed_point_near_with(q, w, seed, &NumericConfig::default())
}

/// Damped Gauss–Newton on `f_β − id` from `seed`, with pseudo-inverse steps
/// and step halving when the residual does not decrease.
pub fn solve_fixed_point_near_with(
    q: &Biquandle,
    w: &BraidWord,
    seed: &[Element],
    cfg: &NumericConfig,
) -> Result<Vec<Element>> {
    require_continuous(q)?;
    let mut p = seed.to_vec();
    let mut f = residual_vector(q, w, &p)?;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        if fixed_residual(q, w, &p)? <= cfg.tolerance {
            return Ok(p);
        }
        iterations += 1;
        let j = jacobian(q, w, &p, cfg.fd_step)?;
        let svd = j.svd(true, true);
        let smax = svd.singular_values.max();
        let eps = (smax * 1e-12).max(f64::MIN_POSITIVE);
        let step = match svd.solve(&(-&f), eps) {
            Ok(s) => s,
            Err(_) => break,
        };
        let base = f.norm();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let delta: Vec<f64> = step.iter().map(|x| lambda * x).collect();
            let cand = shifted(q, &p, &delta);
            let fc = residual_vector(q, w, &cand)?;
            if fc.norm() < base {
                accepted = Some((cand, fc));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((cand, fc)) => {
                p = cand;
                f = fc;
            }
            None => break,
        }
    }
    let residual = fixed_residual(q, w, &p)?;
    if residual <= cfg.tolerance {
        Ok(p)
    } else {
        Err(Error::NoSolution { residual, iterations })
    }
}

pub fn estimate_dimension(q: &Biquandle, w: &BraidWord, state: &[Element]) -> Result<DimensionEstimate> {
    estimate_dimension_with(q, w, state, &NumericConfig::default())
}

/// Local dimension of the fixed set at `state`: chart dimension of `Xⁿ`
/// minus the numerical rank of the Jacobian of `f_β − id`.
pub fn estimate_dimension_with(
    q: &Biquandle,
    w: &BraidWord,
    state: &[Element],
    cfg: &NumericConfig,
) -> Result<DimensionEstimate> {
    require_continuous(q)?;
    let residual = fixed_residual(q, w, state)?;
    if !(residual <= cfg.tolerance) {
        return Err(Error::Precondition(format!(
            "state is not fixed: residual {residual:e} exceeds {:e}",
            cfg.tolerance
        )));
    }
    let j = jacobian(q, w, state, cfg.fd_step)?;
    let ambient = j.ncols();
    let mut singular_values: Vec<f64> = j.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&s| smax > 0.0 && s > cfg.rank_cutoff * smax)
        .count();
    Ok(DimensionEstimate {
        dimension: ambient - rank,
        ambient,
        rank,
        singular_values,
    })
}

/// Solves from `count` seeded random starts (one ChaCha stream per start)
/// and reports each fixed point found with its dimension estimate.
pub fn sample_fixed_set(
    q: &Biquandle,
    w: &BraidWord,
    count: usize,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<FixedSetReport> {
    require_continuous(q)?;
    let c = q.carrier();
    let found: Vec<Option<FixedSample>> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<Option<FixedSample>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let start: Vec<Element> = (0..w.strands()).map(|_| c.sample(&mut rng)).collect();
            let point = match solve_fixed_point_near_with(q, w, &start, cfg) {
                Ok(p) => p,
                Err(Error::NoSolution { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let est = estimate_dimension_with(q, w, &point, cfg)?;
            Ok(Some(FixedSample {
                residual: fixed_residual(q, w, &point)?,
                point,
                dimension: est.dimension,
                singular_values: est.singular_values,
            }))
        })
        .collect::<Result<_>>()?;
    let failed = found.iter().filter(|s| s.is_none()).count();
    Ok(FixedSetReport::Continuous {
        samples: found.into_iter().flatten().collect(),
        failed,
        note: format!(
            "dimension is advisory: numerical rank with cut-off {:e} x largest singular value",
            cfg.rank_cutoff
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquandle::ClosedForm;
    use crate::braid::parse_braid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn r2() -> Biquandle {
        Biquandle::closed_form(ClosedForm::R2Heis)
    }

    #[test]
    fn hopf_residual_on_surface() {
        let w = parse_braid("2: 1 1").unwrap();
        let s = [Element::real([1.0, 2.0, 3.0]), Element::real([2.0, 4.0, 7.0])];
        assert_eq!(fixed_residual(&r2(), &w, &s).unwrap(), 0.0);
        let off = [Element::real([1.0, 2.0, 3.0]), Element::real([3.0, 4.0, 7.0])];
        assert!(fixed_residual(&r2(), &w, &off).unwrap() > 0.1);
    }

    #[test]
    fn trefoil_heisenberg_family_has_dimension_three() {
        let w = parse_braid("2: 1 1 1").unwrap();
        for (x, y, z) in [(1.0, 2.0, 3.0), (-4.0, 0.5, 1.0), (2.5, -3.0, -7.0)] {
            let s = [Element::real([x, y, z]), Element::real([x, y, z + x * y])];
            assert!(fixed_residual(&r2(), &w, &s).unwrap() <= 1e-9);
            let est = estimate_dimension(&r2(), &w, &s).unwrap();
            assert_eq!(est.dimension, 3, "{est:?}");
            assert_eq!(est.ambient, 6);
        }
    }

    #[test]
    fn torus_trefoil_generic_and_special_angles() {
        let q = Biquandle::closed_form(ClosedForm::R2Torus);
        let w = parse_braid("2: 1 1 1").unwrap();
        let theta = 0.9;
        let a2 = Complex64::new(1.2, -0.4);
        let a1 = Complex64::from_polar(1.0, -theta) * a2;
        let s = [Element::torus_angle(theta, a1), Element::torus_angle(theta, a2)];
        assert!(fixed_residual(&q, &w, &s).unwrap() <= 1e-9);
        let generic = estimate_dimension(&q, &w, &s).unwrap().dimension;
        assert_eq!(generic, 3);
        for theta in [PI / 3.0, -PI / 3.0] {
            let s = [
                Element::torus_angle(theta, Complex64::new(0.3, 2.0)),
                Element::torus_angle(theta, Complex64::new(-1.0, 0.7)),
            ];
            assert!(fixed_residual(&q, &w, &s).unwrap() <= 1e-9);
            assert_eq!(estimate_dimension(&q, &w, &s).unwrap().dimension, 4);
        }
    }

    #[test]
    fn solver_lands_on_hopf_surface() {
        let w = parse_braid("2: 1 1").unwrap();
        let seed = [Element::real([1.0, 2.0, 3.0]), Element::real([3.0, 4.0, 7.0])];
        let p = solve_fixed_point_near(&r2(), &w, &seed).unwrap();
        let (a, b) = (p[0].coords(), p[1].coords());
        assert!((a[0] * b[1] - b[0] * a[1]).abs() < 1e-8);
        let est = estimate_dimension(&r2(), &w, &p).unwrap();
        assert_eq!(est.dimension, 5);
    }

    #[test]
    fn precondition_and_no_solution() {
        let w = parse_braid("2: 1 1").unwrap();
        let off = [Element::real([1.0, 2.0, 3.0]), Element::real([3.0, 4.0, 7.0])];
        assert!(matches!(estimate_dimension(&r2(), &w, &off), Err(Error::Precondition(_))));
        let cfg = NumericConfig { max_iterations: 0, ..Default::default() };
        assert!(matches!(
            solve_fixed_point_near_with(&r2(), &w, &off, &cfg),
            Err(Error::NoSolution { .. })
        ));
    }

    #[test]
    fn sampled_report_is_deterministic() {
        let w = parse_braid("2: 1 1").unwrap();
        let cfg = NumericConfig::default();
        let a = sample_fixed_set(&r2(), &w, 8, 3, &cfg).unwrap();
        let b = sample_fixed_set(&r2(), &w, 8, 3, &cfg).unwrap();
        assert_eq!(a, b);
        let FixedSetReport::Continuous { samples, failed, .. } = &a else { panic!() };
        assert_eq!(samples.len() + failed, 8);
        assert!(samples.iter().all(|s| s.residual <= 1e-9 && s.dimension == 5));
        let js = serde_json::to_value(&a).unwrap();
        assert_eq!(js["kind"], "continuous");
    }
}
