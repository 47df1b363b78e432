//! Carrier points and the carriers they live on.
//!
//! Finite carriers use dense indices `0..order`. Continuous carriers are
//! real vector spaces, `S¹ × ℂ` (stored as a unit complex number and a
//! complex number) and round spheres `Sⁿ ⊂ ℝⁿ⁺¹`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::ser::{Serialize, SerializeSeq, Serializer};

/// Half-width of the sampling box for real coordinates.
pub const SAMPLE_RADIUS: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Index(usize),
    Real(Vec<f64>),
    /// A point of `S¹ × ℂ`; `w` has unit modulus.
    Torus { w: Complex64, alpha: Complex64 },
}

impl Element {
    pub fn real(coords: impl Into<Vec<f64>>) -> Self {
        Element::Real(coords.into())
    }

    /// Builds a torus point, renormalizing the circle coordinate.
    pub fn torus(w: Complex64, alpha: Complex64) -> Self {
        Element::Torus {
            w: unit(w),
            alpha,
        }
    }

    pub fn torus_angle(theta: f64, alpha: Complex64) -> Self {
        Element::Torus {
            w: Complex64::from_polar(1.0, theta),
            alpha,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Element::Index(i) => Some(*i),
            _ => None,
        }
    }

    /// Flat real coordinates; torus points flatten to `[Re w, Im w, Re α, Im α]`.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Element::Index(i) => vec![*i as f64],
            Element::Real(v) => v.clone(),
            Element::Torus { w, alpha } => vec![w.re, w.im, alpha.re, alpha.im],
        }
    }

    pub(crate) fn as_real(&self) -> &[f64] {
        match self {
            Element::Real(v) => v,
            other => panic!("expected a real vector, got {other:?}"),
        }
    }

    pub(crate) fn as_torus(&self) -> (Complex64, Complex64) {
        match self {
            Element::Torus { w, alpha } => (*w, *alpha),
            other => panic!("expected a torus point, got {other:?}"),
        }
    }

    pub(crate) fn as_index(&self) -> usize {
        match self {
            Element::Index(i) => *i,
            other => panic!("expected a finite index, got {other:?}"),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Element::Index(i) => serializer.serialize_u64(*i as u64),
            _ => {
                let coords = self.coords();
                let mut seq = serializer.serialize_seq(Some(coords.len()))?;
                for c in &coords {
                    seq.serialize_element(c)?;
                }
                seq.end()
            }
        }
    }
}

pub(crate) fn unit(w: Complex64) -> Complex64 {
    let m = w.norm();
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        w / m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    Finite { order: usize },
    Real { dim: usize },
    /// `S¹ × ℂ ≅ S¹ × ℝ²`.
    Torus,
    /// The unit sphere `Sⁿ` embedded in `ℝⁿ⁺¹`.
    Sphere { dim: usize },
}

impl Carrier {
    pub fn is_finite(&self) -> bool {
        matches!(self, Carrier::Finite { .. })
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            Carrier::Finite { order } => Some(*order),
            _ => None,
        }
    }

    pub fn contains(&self, e: &Element) -> bool {
        match (self, e) {
            (Carrier::Finite { order }, Element::Index(i)) => i < order,
            (Carrier::Real { dim }, Element::Real(v)) => v.len() == *dim,
            (Carrier::Sphere { dim }, Element::Real(v)) => v.len() == dim + 1,
            (Carrier::Torus, Element::Torus { .. }) => true,
            _ => false,
        }
    }

    /// Componentwise distance: max of coordinate gaps, with circle and
    /// complex coordinates compared by modulus of the difference.
    pub fn distance(&self, a: &Element, b: &Element) -> f64 {
        element_distance(a, b)
    }

    /// Seeded sample: coordinates uniform in `[-10, 10]`, angles uniform,
    /// sphere points uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match *self {
            Carrier::Finite { order } => Element::Index(rng.gen_range(0..order)),
            Carrier::Real { dim } => Element::Real(
                (0..dim)
                    .map(|_| rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS))
                    .collect(),
            ),
            Carrier::Torus => {
                let theta = rng.gen_range(-PI..PI);
                let re = rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS);
                let im = rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS);
                Element::torus_angle(theta, Complex64::new(re, im))
            }
            Carrier::Sphere { dim } => loop {
                // Rejection from the cube gives a uniform direction.
                let v: Vec<f64> = (0..=dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let n = norm(&v);
                if n > 1e-3 && n <= 1.0 {
                    break Element::Real(v.iter().map(|x| x / n).collect());
                }
            },
        }
    }

    /// Dimension of the manifold (local chart size). Zero for finite carriers.
    pub fn tangent_dim(&self) -> usize {
        match *self {
            Carrier::Finite { .. } => 0,
            Carrier::Real { dim } => dim,
            Carrier::Torus => 3,
            Carrier::Sphere { dim } => dim,
        }
    }

    /// Number of real coordinates used to measure a difference of two points.
    pub fn embedding_dim(&self) -> usize {
        match *self {
            Carrier::Finite { .. } => 0,
            Carrier::Real { dim } => dim,
            Carrier::Torus => 4,
            Carrier::Sphere { dim } => dim + 1,
        }
    }

    /// Moves `p` by the tangent vector `delta` (length `tangent_dim`) and
    /// lands back on the carrier.
    pub fn retract(&self, p: &Element, delta: &[f64]) -> Element {
        match *self {
            Carrier::Finite { .. } => p.clone(),
            Carrier::Real { .. } => {
                Element::Real(p.as_real().iter().zip(delta).map(|(x, d)| x + d).collect())
            }
            Carrier::Torus => {
                let (w, alpha) = p.as_torus();
                Element::torus(
                    w * Complex64::from_polar(1.0, delta[0]),
                    alpha + Complex64::new(delta[1], delta[2]),
                )
            }
            Carrier::Sphere { .. } => {
                let x = p.as_real();
                let basis = sphere_tangent_basis(x);
                let mut y = x.to_vec();
                for (t, d) in basis.iter().zip(delta) {
                    for (yi, ti) in y.iter_mut().zip(t) {
                        *yi += d * ti;
                    }
                }
                let n = norm(&y);
                Element::Real(y.into_iter().map(|v| v / n).collect())
            }
        }
    }

    /// `a - b` in embedding coordinates (length `embedding_dim`).
    pub fn difference(&self, a: &Element, b: &Element) -> Vec<f64> {
        match (a, b) {
            (Element::Real(x), Element::Real(y)) => x.iter().zip(y).map(|(p, q)| p - q).collect(),
            (Element::Torus { w: w1, alpha: a1 }, Element::Torus { w: w2, alpha: a2 }) => {
                let dw = w1 - w2;
                let da = a1 - a2;
                vec![dw.re, dw.im, da.re, da.im]
            }
            _ => Vec::new(),
        }
    }
}

pub fn element_distance(a: &Element, b: &Element) -> f64 {
    match (a, b) {
        (Element::Index(i), Element::Index(j)) => {
            if i == j {
                0.0
            } else {
                f64::INFINITY
            }
        }
        (Element::Real(x), Element::Real(y)) if x.len() == y.len() => x
            .iter()
            .zip(y)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max),
        (Element::Torus { w: w1, alpha: a1 }, Element::Torus { w: w2, alpha: a2 }) => {
            (w1 - w2).norm().max((a1 - a2).norm())
        }
        _ => f64::INFINITY,
    }
}

/// Max componentwise distance between two tuples of points.
pub fn tuple_distance(a: &[Element], b: &[Element]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| element_distance(x, y))
        .fold(0.0, f64::max)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of the tangent space `x^⊥` at a unit vector `x`.
fn sphere_tangent_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m.saturating_sub(1));
    let mut frame = vec![x.to_vec()];
    for k in 0..m {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for f in &frame {
            let c = dot(&v, f);
            for (vi, fi) in v.iter_mut().zip(f) {
                *vi -= c * fi;
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            let v: Vec<f64> = v.into_iter().map(|t| t / n).collect();
            frame.push(v.clone());
            basis.push(v);
            if basis.len() + 1 == m {
                break;
            }
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_stay_in_carrier() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for c in [
            Carrier::Finite { order: 5 },
            Carrier::Real { dim: 3 },
            Carrier::Torus,
            Carrier::Sphere { dim: 2 },
        ] {
            for _ in 0..200 {
                let e = c.sample(&mut rng);
                assert!(c.contains(&e));
                if let Element::Real(v) = &e {
                    if let Carrier::Sphere { .. } = c {
                        assert!((norm(v) - 1.0).abs() < 1e-12);
                    } else {
                        assert!(v.iter().all(|x| x.abs() <= SAMPLE_RADIUS));
                    }
                }
                if let Element::Torus { w, .. } = e {
                    assert!((w.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sphere_retraction_stays_on_sphere() {
        let c = Carrier::Sphere { dim: 2 };
        let p = Element::real([0.0, 0.6, 0.8]);
        let basis = sphere_tangent_basis(p.as_real());
        assert_eq!(basis.len(), 2);
        for t in &basis {
            assert!(dot(t, p.as_real()).abs() < 1e-12);
        }
        let q = c.retract(&p, &[0.1, -0.2]);
        assert!((norm(q.as_real()) - 1.0).abs() < 1e-12);
        assert_eq!(c.retract(&p, &[0.0, 0.0]), p);
    }

    #[test]
    fn distance_uses_modulus_on_circle() {
        let a = Element::torus_angle(PI - 1e-12, Complex64::new(0.0, 0.0));
        let b = Element::torus_angle(-PI + 1e-12, Complex64::new(0.0, 0.0));
        assert!(element_distance(&a, &b) < 1e-11);
        assert_eq!(element_distance(&Element::Index(1), &Element::Index(2)), f64::INFINITY);
    }

    #[test]
    fn serializes_points_as_arrays() {
        assert_eq!(serde_json::to_string(&Element::Index(4)).unwrap(), "4");
        assert_eq!(
            serde_json::to_string(&Element::real([1.0, 2.5])).unwrap(),
            "[1.0,2.5]"
        );
    }
}
