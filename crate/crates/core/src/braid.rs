//! Braid words, the induced map `f_β` on `Xⁿ`, exhaustive fixed-point
//! enumeration for finite biquandles, and Markov moves.
//!
//! Convention: the letter `+i` applies `r` to the ordered pair
//! `(state_i, state_{i+1})` and `−i` applies `r⁻¹`; letters act left to right.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::biquandle::{Biquandle, FiniteMaps};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::numeric::FixedSample;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::Parameter("a braid needs at least one strand".into()));
        }
        if let Some(&e) = letters.iter().find(|&&e| !letter_in_range(e, strands)) {
            return Err(Error::Parameter(format!(
                "letter {e} out of range for {strands} strands (|e| must be in 1..={})",
                strands - 1
            )));
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `perm[p]` is the final position of the strand that starts at position `p`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[pos] = strand
        for &e in &self.letters {
            let i = e.unsigned_abs() as usize - 1;
            at.swap(i, i + 1);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &s) in at.iter().enumerate() {
            perm[s] = pos;
        }
        perm
    }
}

fn letter_in_range(e: i32, strands: usize) -> bool {
    e != 0 && (e.unsigned_abs() as usize) < strands
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.strands)?;
        for e in &self.letters {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_braid(s)
    }
}

impl Serialize for BraidWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_error(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// Parses `"n: e1 e2 ... ek"`. Error positions are byte offsets into `text`.
pub fn parse_braid(text: &str) -> Result<BraidWord> {
    let colon = text
        .find(':')
        .ok_or_else(|| parse_error(text.len(), "expected `n:` followed by the letters"))?;
    let head = &text[..colon];
    let head_at = head.len() - head.trim_start().len();
    let strands: usize = head
        .trim()
        .parse()
        .map_err(|_| parse_error(head_at, format!("strand count `{}` is not a positive integer", head.trim())))?;
    if strands == 0 {
        return Err(parse_error(head_at, "strand count must be at least 1"));
    }
    let mut letters = Vec::new();
    let base = text.as_ptr() as usize;
    for tok in text[colon + 1..].split_whitespace() {
        let at = tok.as_ptr() as usize - base;
        let e: i32 = tok
            .parse()
            .map_err(|_| parse_error(at, format!("`{tok}` is not an integer")))?;
        if e == 0 {
            return Err(parse_error(at, "zero is not a generator"));
        }
        if !letter_in_range(e, strands) {
            return Err(parse_error(
                at,
                format!("generator {e} out of range for {strands} strands"),
            ));
        }
        letters.push(e);
    }
    Ok(BraidWord { strands, letters })
}

/// Applies one signed generator to a state of `n` points.
pub fn apply_letter(q: &Biquandle, state: &[Element], letter: i32) -> Result<Vec<Element>> {
    if !letter_in_range(letter, state.len()) {
        return Err(Error::Parameter(format!(
            "letter {letter} out of range for a state of {} points",
            state.len()
        )));
    }
    let i = letter.unsigned_abs() as usize - 1;
    let (c, d) = if letter > 0 {
        q.yb_map(&state[i], &state[i + 1])?
    } else {
        q.yb_map_inverse(&state[i], &state[i + 1])?
    };
    let mut out = state.to_vec();
    out[i] = c;
    out[i + 1] = d;
    Ok(out)
}

/// `f_β(state)`: the letters of `w` applied left to right.
pub fn induced_map(q: &Biquandle, w: &BraidWord, state: &[Element]) -> Result<Vec<Element>> {
    if state.len() != w.strands {
        return Err(Error::Precondition(format!(
            "state has {} points but the braid has {} strands",
            state.len(),
            w.strands
        )));
    }
    let mut s = state.to_vec();
    for &e in &w.letters {
        s = apply_letter(q, &s, e)?;
    }
    Ok(s)
}

/// `f_β` on index tuples via lookup tables, in place.
pub(crate) fn apply_word_finite(maps: &FiniteMaps, letters: &[i32], s: &mut [usize]) {
    for &e in letters {
        let i = e.unsigned_abs() as usize - 1;
        let (c, d) = if e > 0 {
            maps.apply(s[i], s[i + 1])
        } else {
            maps.apply_inv(s[i], s[i + 1])
        };
        s[i] = c;
        s[i + 1] = d;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FixedSetReport {
    Finite {
        count: u64,
        colorings: Vec<Vec<usize>>,
        /// Set when only the first `max_listed` colorings are listed.
        #[serde(skip_serializing_if = "std::ops::Not::not")]
        truncated: bool,
    },
    Continuous {
        samples: Vec<FixedSample>,
        /// Seeds from which the solver did not reach the tolerance.
        failed: usize,
        note: String,
    },
}

impl FixedSetReport {
    pub fn count(&self) -> Option<u64> {
        match self {
            FixedSetReport::Finite { count, .. } => Some(*count),
            FixedSetReport::Continuous { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Largest `orderⁿ` that will be enumerated.
    pub budget: u64,
    /// Colorings beyond this many are counted but not listed.
    pub max_listed: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            budget: 100_000_000,
            max_listed: 1_000_000,
        }
    }
}

pub fn fixed_points_finite(q: &Biquandle, w: &BraidWord) -> Result<FixedSetReport> {
    fixed_points_finite_with(q, w, EnumerationConfig::default())
}

/// Enumerates every state of `Xⁿ` in odometer order (first coordinate
/// fastest) and keeps those fixed by `f_β`.
pub fn fixed_points_finite_with(
    q: &Biquandle,
    w: &BraidWord,
    cfg: EnumerationConfig,
) -> Result<FixedSetReport> {
    let n = q
        .carrier()
        .order()
        .ok_or_else(|| Error::Precondition("exhaustive enumeration needs a finite carrier".into()))?;
    let k = w.strands;
    let total = u32::try_from(k)
        .ok()
        .and_then(|k| (n as u64).checked_pow(k))
        .filter(|&t| t <= cfg.budget)
        .ok_or_else(|| {
            Error::Resource(format!(
                "{n}^{k} states exceed the enumeration budget of {}; use a smaller carrier or fewer strands",
                cfg.budget
            ))
        })?;
    let maps = q.finite_maps()?;
    const BLOCK: u64 = 1 << 14;
    let blocks = total.div_ceil(BLOCK);
    let parts: Vec<(u64, Vec<Vec<usize>>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(total);
            let mut state = decode(start, n, k);
            let mut work = vec![0; k];
            let mut count = 0;
            let mut listed = Vec::new();
            for _ in start..end {
                work.copy_from_slice(&state);
                apply_word_finite(&maps, &w.letters, &mut work);
                if work == state {
                    count += 1;
                    if listed.len() < cfg.max_listed {
                        listed.push(state.clone());
                    }
                }
                increment(&mut state, n);
            }
            (count, listed)
        })
        .collect();
    let count = parts.iter().map(|p| p.0).sum();
    let mut colorings = Vec::new();
    for (_, listed) in parts {
        let room = cfg.max_listed - colorings.len();
        colorings.extend(listed.into_iter().take(room));
    }
    let truncated = (colorings.len() as u64) < count;
    Ok(FixedSetReport::Finite {
        count,
        colorings,
        truncated,
    })
}

fn decode(mut idx: u64, n: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let d = (idx % n as u64) as usize;
            idx /= n as u64;
            d
        })
        .collect()
}

fn increment(state: &mut [usize], n: usize) {
    for d in state.iter_mut() {
        *d += 1;
        if *d < n {
            return;
        }
        *d = 0;
    }
}

/// `g⁻¹ · w · g` on the same strands.
pub fn markov_conjugate(w: &BraidWord, g: i32) -> Result<BraidWord> {
    if !letter_in_range(g, w.strands) {
        return Err(Error::Parameter(format!(
            "conjugator {g} out of range for {} strands",
            w.strands
        )));
    }
    let mut letters = Vec::with_capacity(w.letters.len() + 2);
    letters.push(-g);
    letters.extend_from_slice(&w.letters);
    letters.push(g);
    Ok(BraidWord {
        strands: w.strands,
        letters,
    })
}

/// `w · σₙ^{±1}` on `n + 1` strands.
pub fn markov_stabilize(w: &BraidWord, positive: bool) -> BraidWord {
    let n = w.strands as i32;
    let mut letters = w.letters.clone();
    letters.push(if positive { n } else { -n });
    BraidWord {
        strands: w.strands + 1,
        letters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquandle::{make_alexander, make_wada, quandle_to_biquandle, ClosedForm};
    use crate::element::tuple_distance;
    use crate::group::FiniteGroup;
    use crate::quandle::Quandle;
    use num_complex::Complex64;

    fn ix(i: usize) -> Element {
        Element::Index(i)
    }

    #[test]
    fn parses_examples() {
        let w = parse_braid("2: 1 1 1").unwrap();
        assert_eq!((w.strands(), w.letters()), (2, &[1, 1, 1][..]));
        let w = parse_braid("3: 1 -2 1 -2").unwrap();
        assert_eq!(w.letters(), &[1, -2, 1, -2]);
        assert_eq!(parse_braid(&w.to_string()).unwrap(), w);
        let w = parse_braid("2:").unwrap();
        assert!(w.is_empty());
        assert_eq!(w.to_string(), "2:");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let pos = |t: &str| match parse_braid(t) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{t:?}: {other:?}"),
        };
        assert_eq!(pos("2: 1 0"), 5);
        assert_eq!(pos("2: 1 2"), 5);
        assert_eq!(pos("3: 1 -3"), 5);
        assert_eq!(pos("3: 1 x"), 5);
        assert_eq!(pos("1 1 1"), 5);
        assert_eq!(pos(" 0: "), 1);
        assert_eq!(pos("two: 1"), 0);
    }

    #[test]
    fn r2_letter_example() {
        let q = Biquandle::closed_form(ClosedForm::R2Heis);
        let s = [Element::real([1.0, 2.0, 3.0]), Element::real([4.0, 5.0, 6.0])];
        let out = apply_letter(&q, &s, 1).unwrap();
        assert_eq!(out, vec![Element::real([4.0, 5.0, 1.0]), Element::real([1.0, 2.0, 8.0])]);
        let back = apply_letter(&q, &out, -1).unwrap();
        assert!(tuple_distance(&back, &s) < 1e-12);
    }

    #[test]
    fn letter_locality_and_errors() {
        let q = make_wada(&FiniteGroup::symmetric(3));
        let s = [ix(1), ix(2), ix(3)];
        assert_eq!(apply_letter(&q, &s, 2).unwrap()[0], ix(1));
        assert!(matches!(apply_letter(&q, &s, 3), Err(Error::Parameter(_))));
        let mixed = [ix(1), Element::real([0.0; 3])];
        assert!(matches!(apply_letter(&q, &mixed, 1), Err(Error::Structural(_))));
    }

    #[test]
    fn trefoil_on_torus_matches_closed_coefficient() {
        let q = Biquandle::closed_form(ClosedForm::R2Torus);
        let w = parse_braid("2: 1 1 1").unwrap();
        let (t1, t2) = (0.7_f64, -1.9_f64);
        let (a1, a2) = (Complex64::new(1.5, -0.3), Complex64::new(-2.0, 0.8));
        let s = [Element::torus_angle(t1, a1), Element::torus_angle(t2, a2)];
        let out = induced_map(&q, &w, &s).unwrap();
        let e = |t: f64| Complex64::from_polar(1.0, -t);
        let c = e(t1) - e(t1 + t2);
        let expected = c * a1 + (c + e(2.0 * t1 + t2)) * a2;
        let Element::Torus { alpha, .. } = &out[0] else { panic!() };
        assert!((alpha - expected).norm() < 1e-12, "{alpha} vs {expected}");
    }

    #[test]
    fn identity_and_cancelling_words() {
        let q = Biquandle::closed_form(ClosedForm::R2Torus);
        let id = parse_braid("2:").unwrap();
        let w = parse_braid("2: 1 -1").unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        for _ in 0..1000 {
            let s = [q.carrier().sample(&mut rng), q.carrier().sample(&mut rng)];
            assert_eq!(induced_map(&q, &id, &s).unwrap(), s.to_vec());
            assert!(tuple_distance(&induced_map(&q, &w, &s).unwrap(), &s) < 1e-9);
        }
        assert!(matches!(
            induced_map(&q, &w, &s_one()),
            Err(Error::Precondition(_))
        ));
    }

    fn s_one() -> Vec<Element> {
        vec![Element::torus_angle(0.0, Complex64::new(0.0, 0.0))]
    }

    #[test]
    fn finite_counts() {
        let core = quandle_to_biquandle(&Quandle::core(&FiniteGroup::cyclic(3)));
        let trefoil = parse_braid("2: 1 1 1").unwrap();
        let r = fixed_points_finite(&core, &trefoil).unwrap();
        assert_eq!(r.count(), Some(9));
        let triv = quandle_to_biquandle(&Quandle::trivial(3));
        let r = fixed_points_finite(&triv, &trefoil).unwrap();
        let FixedSetReport::Finite { count, colorings, .. } = r else { panic!() };
        assert_eq!(count, 3);
        assert_eq!(colorings, vec![vec![0, 0], vec![1, 1], vec![2, 2]]);
        let alex = make_alexander(5, 2, 3).unwrap();
        for k in 1..=4 {
            let r = fixed_points_finite(&alex, &BraidWord::identity(k).unwrap()).unwrap();
            assert_eq!(r.count(), Some(5u64.pow(k as u32)));
        }
    }

    #[test]
    fn listed_colorings_are_fixed_and_ascending() {
        let q = make_wada(&FiniteGroup::symmetric(3));
        let w = parse_braid("3: 1 -2 1 -2").unwrap();
        let FixedSetReport::Finite { count, colorings, truncated } = fixed_points_finite(&q, &w).unwrap() else {
            panic!()
        };
        assert!(!truncated);
        assert_eq!(count as usize, colorings.len());
        let key = |s: &Vec<usize>| s.iter().rev().fold(0, |acc, &d| acc * 6 + d);
        assert!(colorings.windows(2).all(|p| key(&p[0]) < key(&p[1])));
        for c in &colorings {
            let s: Vec<Element> = c.iter().map(|&i| ix(i)).collect();
            assert_eq!(induced_map(&q, &w, &s).unwrap(), s);
        }
    }

    #[test]
    fn budget_and_truncation() {
        let q = make_wada(&FiniteGroup::symmetric(3));
        let w = BraidWord::identity(4).unwrap();
        let cfg = EnumerationConfig { budget: 1000, max_listed: 10 };
        assert!(matches!(fixed_points_finite_with(&q, &w, cfg), Err(Error::Resource(_))));
        let cfg = EnumerationConfig { budget: 2000, max_listed: 10 };
        let r = fixed_points_finite_with(&q, &w, cfg).unwrap();
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["kind"], "finite");
        assert_eq!(js["count"], 1296);
        assert_eq!(js["colorings"].as_array().unwrap().len(), 10);
        assert_eq!(js["truncated"], true);
        let q = Biquandle::closed_form(ClosedForm::R1Heis);
        assert!(matches!(fixed_points_finite(&q, &w), Err(Error::Precondition(_))));
    }

    #[test]
    fn markov_moves() {
        let w = parse_braid("2: 1 1 1").unwrap();
        assert_eq!(markov_conjugate(&w, 1).unwrap().to_string(), "2: -1 1 1 1 1");
        assert_eq!(markov_stabilize(&w, true).to_string(), "3: 1 1 1 2");
        assert_eq!(markov_stabilize(&w, false).to_string(), "3: 1 1 1 -2");
        assert!(markov_conjugate(&w, 2).is_err());
        let q = make_wada(&FiniteGroup::symmetric(3));
        let base = fixed_points_finite(&q, &w).unwrap().count();
        for v in [
            markov_conjugate(&w, 1).unwrap(),
            markov_stabilize(&w, true),
            markov_stabilize(&w, false),
        ] {
            assert_eq!(fixed_points_finite(&q, &v).unwrap().count(), base, "{v}");
        }
    }

    #[test]
    fn permutations() {
        assert_eq!(parse_braid("2: 1 1").unwrap().permutation(), vec![0, 1]);
        assert_eq!(parse_braid("2: 1 1 1").unwrap().permutation(), vec![1, 0]);
        assert_eq!(parse_braid("3: 1 2").unwrap().permutation(), vec![2, 0, 1]);
    }
}
