//! Log Calabi–Yau surfaces given by an explicit toric model: a smooth
//! complete fan together with a number of interior blow-ups on each boundary
//! divisor.
//!
//! Rays are always stored counterclockwise starting from the
//! lexicographically least one, so structural equality is equality of
//! surfaces.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::birmap::{Generator, Letter, Word};
use crate::lattice::{angle_cmp, in_cone, LatticeError, LatticeVector, PLMap};

/// A single broken invariant of a fan or surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewRays(usize),
    NonPrimitive(LatticeVector),
    RepeatedRay(LatticeVector),
    /// `det(rays[i], rays[i+1]) != 1`
    NotSmooth { index: usize, from: LatticeVector, to: LatticeVector, det: i64 },
    /// Consecutive determinants are all +1 but the rays wind around more than once.
    Winding(usize),
    LengthMismatch { rays: usize, m: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewRays(k) => write!(f, "incomplete: {k} rays, a complete fan needs at least 3"),
            Violation::NonPrimitive(v) => write!(f, "ray {v} is not primitive"),
            Violation::RepeatedRay(v) => write!(f, "ray {v} appears twice"),
            Violation::NotSmooth { from, to, det, .. } => write!(f, "det({from},{to}) = {det}, expected 1"),
            Violation::Winding(w) => write!(f, "rays wind {w} times around the origin"),
            Violation::LengthMismatch { rays, m } => write!(f, "{rays} rays but {m} multiplicities"),
        }
    }
}

/// Why a word fails to act by an isomorphism at some step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irregularity {
    MissingRay(LatticeVector),
    NoMultiplicity(LatticeVector),
}

impl fmt::Display for Irregularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Irregularity::MissingRay(v) => write!(f, "missing ray {v}"),
            Irregularity::NoMultiplicity(v) => write!(f, "no interior blow-up on ray {v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Cy2Error {
    #[error("invalid surface: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("ray {0} is not a ray of the fan")]
    RayAbsent(LatticeVector),
    #[error("intersection matrix needs at least 3 rays, got {0}")]
    TooFewRays(usize),
    /// `step` letters (counted from the right) were applied before the failure.
    #[error("not regular at step {step} (letter {letter}): {reason}")]
    NotRegular { step: usize, letter: String, reason: Irregularity },
    #[error("malformed surface JSON: {0}")]
    Json(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Smooth complete fan, rays counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    rays: Vec<LatticeVector>,
}

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

fn fan_violations(rays: &[LatticeVector]) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = rays.len();
    if k < 3 {
        out.push(Violation::TooFewRays(k));
    }
    for (i, r) in rays.iter().enumerate() {
        if !r.is_primitive() {
            out.push(Violation::NonPrimitive(*r));
        }
        if rays[..i].contains(r) {
            out.push(Violation::RepeatedRay(*r));
        }
    }
    if k < 2 {
        return out;
    }
    let mut smooth = true;
    for i in 0..k {
        let (from, to) = (rays[i], rays[(i + 1) % k]);
        let det = from.det(&to);
        if det != 1 {
            smooth = false;
            out.push(Violation::NotSmooth { index: i, from, to, det });
        }
    }
    if smooth && k >= 3 {
        // each step turns by less than a half turn; count completed turns
        let wraps = (0..k).filter(|&i| angle_cmp(&rays[i], &rays[(i + 1) % k]).is_gt()).count();
        if wraps != 1 {
            out.push(Violation::Winding(wraps));
        }
    }
    out
}

/// Index of the lexicographically least ray.
fn canonical_start(rays: &[LatticeVector]) -> usize {
    (0..rays.len()).min_by_key(|&i| rays[i]).unwrap_or(0)
}

impl Fan {
    pub fn new(rays: Vec<LatticeVector>) -> Result<Fan, Cy2Error> {
        let bad = fan_violations(&rays);
        if !bad.is_empty() {
            return Err(Cy2Error::Invalid(bad));
        }
        let mut rays = rays;
        let start = canonical_start(&rays);
        rays.rotate_left(start);
        Ok(Fan { rays })
    }

    pub fn p2() -> Fan {
        Fan { rays: vec![v(-1, -1), v(0, 1), v(1, 0)] }.canonical()
    }

    pub fn p1xp1() -> Fan {
        Fan::new(vec![v(1, 0), v(0, 1), v(-1, 0), v(0, -1)]).expect("valid fan")
    }

    /// Hirzebruch surface F_a with rays (1,0),(0,1),(-1,a),(0,-1).
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::new(vec![v(1, 0), v(0, 1), v(-1, a), v(0, -1)]).expect("valid fan")
    }

    fn canonical(self) -> Fan {
        Fan::new(sorted(self.rays)).expect("valid fan")
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn index_of(&self, n: &LatticeVector) -> Option<usize> {
        self.rays.iter().position(|r| r == n)
    }

    /// The integers `a_i` with `v_{i-1} + v_{i+1} = -a_i v_i`; `a_i` is the
    /// self-intersection of the toric boundary divisor of `v_i`.
    pub fn toric_self_intersections(&self) -> Vec<i64> {
        let k = self.rays.len();
        (0..k)
            .map(|i| {
                let r = self.rays[i];
                let w = self.rays[(i + k - 1) % k] + self.rays[(i + 1) % k];
                debug_assert_eq!(w.det(&r), 0);
                if r.x != 0 {
                    -w.x / r.x
                } else {
                    -w.y / r.y
                }
            })
            .collect()
    }
}

/// Sorts directions counterclockwise from (1,0).
fn sorted(mut rays: Vec<LatticeVector>) -> Vec<LatticeVector> {
    rays.sort_by(angle_cmp);
    rays
}

/// Numerical shadows of a surface `(Y, D)` and its interior `U = Y \ D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NumericInvariants {
    /// number of boundary components
    pub k: usize,
    pub total_m: u64,
    pub b2: u64,
    pub chi_y: u64,
    pub chi_u: u64,
}

/// Boundary intersection form with an exact definiteness verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionReport {
    pub matrix: Vec<Vec<i64>>,
    /// Leading principal minors, from size 1 up to k.
    pub leading_minors: Vec<BigInt>,
    pub negative_definite: bool,
    /// Every `m_n > 2`, yet the form is not negative definite.
    pub remark_discrepancy: bool,
}

/// A toric model: fan plus the number of interior blow-ups on each ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surface {
    fan: Fan,
    m: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceJson {
    rays: Vec<LatticeVector>,
    m: Vec<u32>,
}

impl Surface {
    /// Validates and stores in canonical rotation.
    pub fn new(rays: Vec<LatticeVector>, m: Vec<u32>) -> Result<Surface, Cy2Error> {
        let bad = validate_parts(&rays, &m);
        if !bad.is_empty() {
            return Err(Cy2Error::Invalid(bad));
        }
        let start = canonical_start(&rays);
        let (mut rays, mut m) = (rays, m);
        rays.rotate_left(start);
        m.rotate_left(start);
        Ok(Surface { fan: Fan { rays }, m })
    }

    pub fn toric(fan: Fan) -> Surface {
        let m = vec![0; fan.len()];
        Surface { fan, m }
    }

    /// P² blown up twice at the distinguished point of each boundary line.
    pub fn cubic() -> Surface {
        Surface::from_pairs([(v(1, 0), 2), (v(0, 1), 2), (v(-1, -1), 2)]).expect("valid surface")
    }

    /// Builds a surface from (ray, multiplicity) pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (LatticeVector, u32)>) -> Result<Surface, Cy2Error> {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| angle_cmp(&a.0, &b.0));
        let (rays, m) = pairs.into_iter().unzip();
        Surface::new(rays, m)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.fan.rays
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn pairs(&self) -> impl Iterator<Item = (LatticeVector, u32)> + '_ {
        self.fan.rays.iter().copied().zip(self.m.iter().copied())
    }

    /// Multiplicity on ray `n`, `None` if `n` is not a ray.
    pub fn m_at(&self, n: &LatticeVector) -> Option<u32> {
        self.fan.index_of(n).map(|i| self.m[i])
    }

    /// The set `{ j·n : 1 ≤ j ≤ m_n }` recording every interior blow-up.
    pub fn blowup_set(&self) -> Vec<LatticeVector> {
        self.pairs().flat_map(|(n, m)| (1..=m as i64).map(move |j| n.scale(j))).collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_parts(&self.fan.rays, &self.m)
    }

    pub fn numeric_invariants(&self) -> NumericInvariants {
        let k = self.fan.len();
        let total_m: u64 = self.m.iter().map(|&m| m as u64).sum();
        NumericInvariants { k, total_m, b2: k as u64 - 2 + total_m, chi_y: k as u64 + total_m, chi_u: total_m }
    }

    pub fn boundary_intersection_matrix(&self) -> Result<IntersectionReport, Cy2Error> {
        let k = self.fan.len();
        if k < 3 {
            return Err(Cy2Error::TooFewRays(k));
        }
        let a = self.fan.toric_self_intersections();
        let mut matrix = vec![vec![0i64; k]; k];
        for i in 0..k {
            matrix[i][i] = a[i] - self.m[i] as i64;
            let j = (i + 1) % k;
            matrix[i][j] = 1;
            matrix[j][i] = 1;
        }
        let leading_minors = leading_minors(&matrix);
        let negative_definite =
            leading_minors.iter().enumerate().all(|(i, d)| if i % 2 == 0 { d.is_negative() } else { d.is_positive() });
        let remark_discrepancy = self.m.iter().all(|&m| m > 2) && !negative_definite;
        Ok(IntersectionReport { matrix, leading_minors, negative_definite, remark_discrepancy })
    }

    /// Subdivides until `n` is a ray; new rays carry no blow-ups.
    pub fn insert_ray(&self, n: &LatticeVector) -> Result<Surface, Cy2Error> {
        n.primitive()?;
        let mut pairs: Vec<(LatticeVector, u32)> = self.pairs().collect();
        while !pairs.iter().any(|(r, _)| r == n) {
            let k = pairs.len();
            let i = (0..k)
                .find(|&i| in_cone(n, &pairs[i].0, &pairs[(i + 1) % k].0))
                .expect("a complete fan covers every direction");
            let mid = pairs[i].0 + pairs[(i + 1) % k].0;
            pairs.insert(i + 1, (mid, 0));
        }
        Surface::from_pairs(pairs)
    }

    pub fn interior_blowup(&self, n: &LatticeVector) -> Result<Surface, Cy2Error> {
        let i = self.fan.index_of(n).ok_or(Cy2Error::RayAbsent(*n))?;
        let mut s = self.clone();
        s.m[i] += 1;
        Ok(s)
    }

    /// Blow-up order: every ray of `self` is a ray of `other`, with at least
    /// as many interior blow-ups.
    pub fn leq(&self, other: &Surface) -> bool {
        self.pairs().all(|(n, m)| other.m_at(&n).is_some_and(|mo| m <= mo))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SurfaceJson { rays: self.fan.rays.clone(), m: self.m.clone() })
            .expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Surface, Cy2Error> {
        let raw: SurfaceJson = serde_json::from_str(text).map_err(|e| Cy2Error::Json(e.to_string()))?;
        Surface::new(raw.rays, raw.m)
    }

    /// Applies one letter; `Err` carries the reason it is not an isomorphism.
    pub fn push_letter(&self, l: &Letter) -> Result<Surface, Irregularity> {
        let t = l.tropicalize();
        let mut pairs: Vec<(LatticeVector, u32)> = self.pairs().collect();
        if let Generator::Elementary(n) = l.generator {
            // E_n moves one blow-up from n to -n, E_n^-1 the other way
            let (from, to) = if l.inverse { (-n, n) } else { (n, -n) };
            for r in [n, -n] {
                if self.m_at(&r).is_none() {
                    return Err(Irregularity::MissingRay(r));
                }
            }
            if self.m_at(&from) == Some(0) {
                return Err(Irregularity::NoMultiplicity(from));
            }
            for (r, m) in pairs.iter_mut() {
                if *r == from {
                    *m -= 1;
                } else if *r == to {
                    *m += 1;
                }
            }
        }
        let moved = pairs.into_iter().map(|(r, m)| (t.apply(&r), m));
        Ok(Surface::from_pairs(moved).expect("a regular letter maps a smooth fan to a smooth fan"))
    }

    /// Pushes the surface forward along `w`, innermost (rightmost) letter first.
    pub fn pushforward(&self, w: &Word) -> Result<Surface, Cy2Error> {
        let mut s = self.clone();
        for (step, l) in w.letters().iter().rev().enumerate() {
            s = s.push_letter(l).map_err(|reason| Cy2Error::NotRegular { step, letter: l.to_string(), reason })?;
        }
        Ok(s)
    }

    /// A surface `s ≥ self` on which every letter of `w` acts regularly.
    pub fn resolve(&self, w: &Word) -> Surface {
        let mut cand = self.clone();
        'restart: loop {
            let mut s = cand.clone();
            // tropicalization of the letters applied so far
            let mut applied = PLMap::identity();
            for l in w.letters().iter().rev() {
                match s.push_letter(l) {
                    Ok(next) => {
                        s = next;
                        applied = l.tropicalize().compose(&applied);
                    }
                    Err(reason) => {
                        let back = applied.inverse();
                        cand = match reason {
                            Irregularity::MissingRay(r) => cand.insert_ray(&back.apply(&r)),
                            Irregularity::NoMultiplicity(r) => cand.interior_blowup(&back.apply(&r)),
                        }
                        .expect("pulled-back rays are primitive rays of the candidate");
                        continue 'restart;
                    }
                }
            }
            return cand;
        }
    }
}

fn validate_parts(rays: &[LatticeVector], m: &[u32]) -> Vec<Violation> {
    let mut out = fan_violations(rays);
    if rays.len() != m.len() {
        out.push(Violation::LengthMismatch { rays: rays.len(), m: m.len() });
    }
    out
}

/// Leading principal minors by fraction-free elimination over Q.
fn leading_minors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let k = a.len();
    let mut m: Vec<Vec<BigRational>> =
        a.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut out = Vec::with_capacity(k);
    let mut det = BigRational::from_integer(1.into());
    for i in 0..k {
        if m[i][i].is_zero() {
            // a zero pivot: fall back to cofactor-free recomputation per minor
            for j in i..k {
                out.push(exact_det(a, j + 1));
            }
            return out;
        }
        det *= &m[i][i];
        out.push(det.to_integer());
        let (top, rest) = m.split_at_mut(i + 1);
        let pivot = &top[i];
        for row in rest.iter_mut().take(k - i - 1) {
            let f = &row[i] / &pivot[i];
            for (x, p) in row[i..k].iter_mut().zip(&pivot[i..k]) {
                *x -= &f * p;
            }
        }
    }
    out
}

/// Determinant of the leading `n × n` block by Gaussian elimination with pivoting.
fn exact_det(a: &[Vec<i64>], n: usize) -> BigInt {
    let mut m: Vec<Vec<BigRational>> =
        a[..n].iter().map(|r| r[..n].iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut det = BigRational::from_integer(1.into());
    for i in 0..n {
        let Some(p) = (i..n).find(|&r| !m[r][i].is_zero()) else {
            return BigInt::zero();
        };
        if p != i {
            m.swap(p, i);
            det = -det;
        }
        det *= &m[i][i];
        let (top, rest) = m.split_at_mut(i + 1);
        let pivot = &top[i];
        for row in rest.iter_mut().take(n - i - 1) {
            let f = &row[i] / &pivot[i];
            for (x, p) in row[i..n].iter_mut().zip(&pivot[i..n]) {
                *x -= &f * p;
            }
        }
    }
    det.to_integer()
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn surf(pairs: &[((i64, i64), u32)]) -> Surface {
        Surface::from_pairs(pairs.iter().map(|((x, y), m)| (v(*x, *y), *m))).unwrap()
    }

    fn p2(m: [u32; 3]) -> Surface {
        surf(&[((1, 0), m[0]), ((0, 1), m[1]), ((-1, -1), m[2])])
    }

    #[test]
    fn validation_examples() {
        assert!(p2([2, 2, 2]).validate().is_empty());
        let bad = Surface::new(vec![v(1, 0), v(0, 1), v(-2, -1)], vec![0; 3]).unwrap_err();
        let Cy2Error::Invalid(vs) = bad else { panic!() };
        assert!(vs.contains(&Violation::NotSmooth { index: 1, from: v(0, 1), to: v(-2, -1), det: 2 }));
        let Cy2Error::Invalid(vs) = Surface::new(vec![v(1, 0), v(0, 1)], vec![0; 2]).unwrap_err() else { panic!() };
        assert!(vs.contains(&Violation::TooFewRays(2)));
        // clockwise order
        assert!(Surface::new(vec![v(1, 0), v(-1, -1), v(0, 1)], vec![0; 3]).is_err());
        // twice around: each step has det 1
        let twice: Vec<_> = [(1, 0), (0, 1), (-1, -1)].iter().cycle().take(6).map(|(x, y)| v(*x, *y)).collect();
        assert!(fan_violations(&twice).iter().any(|x| matches!(x, Violation::RepeatedRay(_))));
        assert!(Surface::new(vec![v(1, 0), v(0, 1), v(-1, -1)], vec![0; 2]).is_err());
    }

    #[test]
    fn canonical_rotation() {
        let s = Surface::new(vec![v(0, 1), v(-1, -1), v(1, 0)], vec![5, 6, 7]).unwrap();
        assert_eq!(s.rays(), &[v(-1, -1), v(1, 0), v(0, 1)]);
        assert_eq!(s.m(), &[6, 7, 5]);
        assert_eq!(s.to_json(), r#"{"rays":[[-1,-1],[1,0],[0,1]],"m":[6,7,5]}"#);
        assert_eq!(Surface::from_json(&s.to_json()).unwrap(), s);
        assert!(Surface::from_json(r#"{"rays":[[1,0],[0,1],[-1,-1]],"m":[0,0,0],"x":1}"#).is_err());
        assert!(Surface::from_json(r#"{"rays":[[1,0],[0,1],[-1,-1]],"m":[0,-1,0]}"#).is_err());
    }

    #[test]
    fn self_intersections() {
        let at = |f: &Fan| f.rays().iter().copied().zip(f.toric_self_intersections()).collect::<Vec<_>>();
        assert!(at(&Fan::p2()).iter().all(|(_, a)| *a == 1));
        let f1 = at(&Fan::hirzebruch(1));
        for (r, a) in [((1, 0), 0), ((0, 1), -1), ((-1, 1), 0), ((0, -1), 1)] {
            assert!(f1.contains(&(v(r.0, r.1), a)));
        }
        assert!(at(&Fan::p1xp1()).iter().all(|(_, a)| *a == 0));
    }

    #[test]
    fn intersection_matrix_examples() {
        let r = surf(&[((1, 0), 4), ((0, 1), 3), ((-1, -1), 3)]).boundary_intersection_matrix().unwrap();
        // canonical order starts at (-1,-1): diagonal (-2,-3,-2)
        assert_eq!(r.matrix, vec![vec![-2, 1, 1], vec![1, -3, 1], vec![1, 1, -2]]);
        assert_eq!(r.leading_minors, vec![BigInt::from(-2), BigInt::from(5), BigInt::from(-3)]);
        assert!(r.negative_definite && !r.remark_discrepancy);
        let r = p2([3, 3, 3]).boundary_intersection_matrix().unwrap();
        assert!(r.matrix.iter().all(|row| row.iter().sum::<i64>() == 0));
        assert!(!r.negative_definite && r.remark_discrepancy);
        let r = Surface::toric(Fan::p1xp1()).boundary_intersection_matrix().unwrap();
        assert_eq!(r.matrix[0], vec![0, 1, 0, 1]);
        assert!(!r.negative_definite);
    }

    #[test]
    fn zero_pivot_minors() {
        // P¹×P¹ starts with a zero pivot; minors from the definition
        let a = vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 1, 0]];
        assert_eq!(leading_minors(&a), [0, -1, 0, 0].map(BigInt::from).to_vec());
    }

    #[test]
    fn invariants() {
        let inv = |s: &Surface| {
            let n = s.numeric_invariants();
            (n.k, n.total_m, n.b2, n.chi_y, n.chi_u)
        };
        assert_eq!(inv(&Surface::cubic()), (3, 6, 7, 9, 6));
        assert_eq!(inv(&p2([0, 0, 0])), (3, 0, 1, 3, 0));
        assert_eq!(inv(&surf(&[((1, 0), 0), ((0, 1), 0), ((-1, 1), 0), ((0, -1), 1)])), (4, 1, 3, 5, 1));
    }

    #[test]
    fn insert_ray_examples() {
        let s = p2([0, 0, 0]);
        assert_eq!(s.insert_ray(&v(0, -1)).unwrap().rays(), &[v(-1, -1), v(0, -1), v(1, 0), v(0, 1)]);
        assert_eq!(s.insert_ray(&v(1, 0)).unwrap(), s);
        assert_eq!(s.insert_ray(&v(1, 1)).unwrap().rays(), &[v(-1, -1), v(1, 0), v(1, 1), v(0, 1)]);
        let deep = s.insert_ray(&v(3, -5)).unwrap();
        assert!(deep.validate().is_empty() && deep.m_at(&v(3, -5)) == Some(0));
        assert!(s.insert_ray(&v(2, 2)).is_err());
    }

    #[test]
    fn blowups_and_order() {
        let s = p2([0, 0, 0]);
        assert_eq!(s.interior_blowup(&v(1, 0)).unwrap(), p2([1, 0, 0]));
        let mut c = s.clone();
        for n in [v(1, 0), v(0, 1), v(-1, -1)] {
            c = c.interior_blowup(&n).unwrap().interior_blowup(&n).unwrap();
        }
        assert_eq!(c, Surface::cubic());
        assert_eq!(s.interior_blowup(&v(0, -1)), Err(Cy2Error::RayAbsent(v(0, -1))));
        assert!(s.leq(&s) && s.leq(&c));
        assert!(!p2([1, 0, 0]).leq(&p2([0, 1, 1])));
        assert_eq!(Surface::cubic().blowup_set().len(), 6);
        assert!(Surface::cubic().blowup_set().contains(&v(-2, -2)));
    }

    #[test]
    fn pushforward_examples() {
        let s = surf(&[((1, 0), 0), ((0, 1), 1), ((-1, 0), 0), ((0, -1), 0)]);
        let f1 = surf(&[((1, 0), 0), ((0, 1), 0), ((-1, 1), 0), ((0, -1), 1)]);
        assert_eq!(s.pushforward(&w("E")).unwrap(), f1);
        assert_eq!(f1.pushforward(&w("E^-1")).unwrap(), s);
        // self-intersection of the (0,1) divisor is -1 on both sides
        let d2 = |s: &Surface, n| {
            let i = s.fan().index_of(&n).unwrap();
            s.fan().toric_self_intersections()[i] - s.m()[i] as i64
        };
        assert_eq!(d2(&s, v(0, 1)), -1);
        assert_eq!(d2(&f1, v(0, 1)), -1);

        let rotated = p2([1, 2, 3]).pushforward(&w("A[0,-1;1,0]")).unwrap();
        // lattice action of the letter is the transpose (0,1;-1,0)
        assert_eq!(rotated, surf(&[((0, -1), 1), ((1, 0), 2), ((-1, 1), 3)]));

        let err = p2([0, 1, 0]).pushforward(&w("E")).unwrap_err();
        assert!(matches!(err, Cy2Error::NotRegular { step: 0, reason: Irregularity::MissingRay(_), .. }));
        let err = Surface::toric(Fan::p1xp1()).pushforward(&w("A[1,0;0,-1] * E")).unwrap_err();
        assert!(matches!(err, Cy2Error::NotRegular { step: 0, reason: Irregularity::NoMultiplicity(_), .. }));
    }

    #[test]
    fn resolve_examples() {
        let s0 = p2([0, 0, 0]);
        let r = s0.resolve(&w("E"));
        assert!(r.m_at(&v(0, -1)).is_some());
        assert_eq!(r.m_at(&v(0, 1)), Some(1));
        assert!(s0.leq(&r) && r.pushforward(&w("E")).is_ok());
        assert_eq!(s0.resolve(&Word::identity()), s0);

        let c = Surface::cubic();
        let r = c.resolve(&w("r2"));
        assert_eq!(r.numeric_invariants().total_m, 6);
        assert!(c.leq(&r) && r.pushforward(&w("r2")).is_ok());
        for (n, m) in r.pairs() {
            assert_eq!(m, c.m_at(&n).unwrap_or(0));
        }
    }

    #[test]
    fn relations_act_trivially() {
        // P has order five; on a resolved surface P⁵ returns the surface
        let p5 = w("P").pow(5);
        let s = p2([1, 1, 1]).resolve(&p5);
        assert_eq!(s.pushforward(&p5).unwrap(), s);
    }

    mod props {
        use super::*;
        use crate::birmap::equal;
        use crate::lattice::UnimodularMatrix;
        use proptest::prelude::*;

        fn letter() -> impl Strategy<Value = Letter> {
            let mats = [[0, -1, 1, 0], [1, 1, 0, 1], [-1, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, -1]];
            let rays = [(0, 1), (1, 0), (-1, 0), (1, 1), (1, -1), (2, 1)];
            let gen = prop_oneof![
                (0..mats.len()).prop_map(move |i| {
                    let [a, b, c, d] = mats[i];
                    Generator::Linear(UnimodularMatrix::new(a, b, c, d).unwrap())
                }),
                (0..rays.len()).prop_map(move |i| Generator::Elementary(v(rays[i].0, rays[i].1))),
            ];
            (gen, any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv))
        }

        fn word(max: usize) -> impl Strategy<Value = Word> {
            prop::collection::vec(letter(), 0..=max).prop_map(Word::new)
        }

        fn surface() -> impl Strategy<Value = Surface> {
            (prop::collection::vec((-3i64..=3, -3i64..=3), 0..4), prop::collection::vec(0u32..3, 12)).prop_map(
                |(extra, ms)| {
                    let mut s = Surface::toric(Fan::p2());
                    for (x, y) in extra {
                        if let Ok(t) = s.insert_ray(&v(x, y)) {
                            s = t;
                        }
                    }
                    let rays: Vec<_> = s.rays().to_vec();
                    for (r, m) in rays.iter().zip(ms) {
                        for _ in 0..m {
                            s = s.interior_blowup(r).unwrap();
                        }
                    }
                    s
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn resolve_is_sound(s in surface(), w in word(5)) {
                let r = s.resolve(&w);
                prop_assert!(s.leq(&r));
                prop_assert!(r.validate().is_empty());
                prop_assert!(r.pushforward(&w).is_ok());
                // regular along every applied prefix
                let n = w.len();
                for i in 0..=n {
                    let tail = Word::new(w.letters()[n - i..].iter().copied());
                    prop_assert!(r.pushforward(&tail).is_ok());
                }
            }

            #[test]
            fn pushforward_preserves_invariants(s in surface(), w in word(5)) {
                let r = s.resolve(&w);
                let t = r.pushforward(&w).unwrap();
                prop_assert!(t.validate().is_empty());
                let (a, b) = (r.numeric_invariants(), t.numeric_invariants());
                prop_assert_eq!(a, b);
            }

            #[test]
            fn self_intersections_transported(s in surface(), w in word(5)) {
                let r = s.resolve(&w);
                let t = r.pushforward(&w).unwrap();
                let trop = w.tropicalize();
                let d2 = |s: &Surface| -> Vec<(LatticeVector, i64)> {
                    let a = s.fan().toric_self_intersections();
                    s.pairs().zip(a).map(|((n, m), a)| (n, a - m as i64)).collect()
                };
                let target = d2(&t);
                for (n, d) in d2(&r) {
                    let image = trop.apply(&n);
                    prop_assert!(target.contains(&(image, d)), "ray {} -> {}", n, image);
                }
            }

            #[test]
            fn monotone(s in surface(), w in word(4), extra in prop::collection::vec((-3i64..=3, -3i64..=3), 0..3)) {
                let r = s.resolve(&w);
                let mut t = r.clone();
                for (x, y) in extra {
                    if let Ok(u) = t.insert_ray(&v(x, y)) {
                        t = u.interior_blowup(&u.rays()[0]).unwrap();
                    }
                }
                prop_assert!(r.leq(&t));
                let (pr, pt) = (r.pushforward(&w).unwrap(), t.pushforward(&w));
                prop_assert!(pt.is_ok());
                prop_assert!(pr.leq(&pt.unwrap()));
            }

            #[test]
            fn equal_words_push_equally(s in surface(), a in word(3), b in word(3)) {
                // a·P⁵·b and a·b are equal without being freely equal
                let lhs = &(&a * &w("P").pow(5)) * &b;
                let rhs = &a * &b;
                prop_assert!(equal(&lhs, &rhs));
                let r = s.resolve(&lhs).resolve(&rhs);
                prop_assert_eq!(r.pushforward(&lhs).unwrap(), r.pushforward(&rhs).unwrap());
                let (u, v_) = (w("A[-1,0;0,1] * E * A[-1,0;0,1]"), w("A[1,1;0,1] * E"));
                let r = s.resolve(&u).resolve(&v_);
                prop_assert_eq!(r.pushforward(&u).unwrap(), r.pushforward(&v_).unwrap());
            }
        }
    }
}
