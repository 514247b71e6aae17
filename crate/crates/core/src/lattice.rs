//! Lattice linear algebra on Z²: vectors, unimodular matrices, canonical
//! complements and piecewise-linear maps defined on fans of cones.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vector {0} is not primitive")]
    NonPrimitive(LatticeVector),
    #[error("matrix [{0},{1};{2},{3}] has determinant {4}, expected +1 or -1")]
    NonUnimodular(i64, i64, i64, i64, i64),
    #[error("piecewise-linear data is inconsistent: {0}")]
    InvalidPieces(String),
}

fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("lattice arithmetic overflow")
}

fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("lattice arithmetic overflow")
}

fn sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("lattice arithmetic overflow")
}

/// A point of Z².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl From<[i64; 2]> for LatticeVector {
    fn from(v: [i64; 2]) -> Self {
        LatticeVector::new(v[0], v[1])
    }
}

impl From<LatticeVector> for [i64; 2] {
    fn from(v: LatticeVector) -> Self {
        [v.x, v.y]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticeVector { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn gcd(&self) -> i64 {
        self.x.gcd(&self.y)
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    pub fn primitive(&self) -> Result<Self, LatticeError> {
        if self.is_primitive() {
            Ok(*self)
        } else {
            Err(LatticeError::NonPrimitive(*self))
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeVector::new(mul(self.x, k), mul(self.y, k))
    }

    pub fn det(&self, other: &LatticeVector) -> i64 {
        sub(mul(self.x, other.y), mul(self.y, other.x))
    }

    pub fn dot(&self, other: &LatticeVector) -> i64 {
        add(mul(self.x, other.x), mul(self.y, other.y))
    }

    /// Rotation by a quarter turn counterclockwise.
    pub fn perp(&self) -> Self {
        LatticeVector::new(-self.y, self.x)
    }

    /// 0 for directions in the half-open upper half-plane starting at (1,0), 1 otherwise.
    fn half(&self) -> u8 {
        if self.y > 0 || (self.y == 0 && self.x > 0) {
            0
        } else {
            1
        }
    }
}

impl std::ops::Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        LatticeVector::new(add(self.x, o.x), add(self.y, o.y))
    }
}

impl std::ops::Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        LatticeVector::new(sub(self.x, o.x), sub(self.y, o.y))
    }
}

impl std::ops::Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-self.x, -self.y)
    }
}

/// Total order on nonzero directions by counterclockwise angle from (1,0).
pub fn angle_cmp(u: &LatticeVector, v: &LatticeVector) -> Ordering {
    u.half().cmp(&v.half()).then_with(|| 0.cmp(&u.det(v)))
}

/// Counterclockwise angle order of `u` and `v` measured from `base`.
fn angle_cmp_from(base: &LatticeVector, u: &LatticeVector, v: &LatticeVector) -> Ordering {
    let rel = |w: &LatticeVector| -> u8 {
        let d = base.det(w);
        if d > 0 || (d == 0 && base.dot(w) > 0) {
            0
        } else {
            1
        }
    };
    rel(u).cmp(&rel(v)).then_with(|| 0.cmp(&u.det(v)))
}

/// True if `v` lies in the closed cone swept counterclockwise from `start` to `end`.
pub fn in_cone(v: &LatticeVector, start: &LatticeVector, end: &LatticeVector) -> bool {
    if v.is_zero() {
        return true;
    }
    if same_direction(v, start) {
        return true;
    }
    angle_cmp_from(start, v, end) != Ordering::Greater
}

fn same_direction(u: &LatticeVector, v: &LatticeVector) -> bool {
    u.det(v) == 0 && u.dot(v) > 0
}

/// An integer 2×2 matrix with determinant ±1, rows `(a,b)` and `(c,d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct UnimodularMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl TryFrom<[[i64; 2]; 2]> for UnimodularMatrix {
    type Error = LatticeError;
    fn try_from(m: [[i64; 2]; 2]) -> Result<Self, LatticeError> {
        UnimodularMatrix::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<UnimodularMatrix> for [[i64; 2]; 2] {
    fn from(m: UnimodularMatrix) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{};{},{}]", self.a, self.b, self.c, self.d)
    }
}

impl UnimodularMatrix {
    pub const IDENTITY: UnimodularMatrix = UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, LatticeError> {
        let det = sub(mul(a, d), mul(b, c));
        if det == 1 || det == -1 {
            Ok(UnimodularMatrix { a, b, c, d })
        } else {
            Err(LatticeError::NonUnimodular(a, b, c, d, det))
        }
    }

    /// Shear (1,0;k,1), fixing (0,1).
    pub fn lower_shear(k: i64) -> Self {
        UnimodularMatrix { a: 1, b: 0, c: k, d: 1 }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> i64 {
        sub(mul(self.a, self.d), mul(self.b, self.c))
    }

    pub fn transpose(&self) -> Self {
        UnimodularMatrix { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        UnimodularMatrix {
            a: mul(self.d, det),
            b: mul(-self.b, det),
            c: mul(-self.c, det),
            d: mul(self.a, det),
        }
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector::new(
            add(mul(self.a, v.x), mul(self.b, v.y)),
            add(mul(self.c, v.x), mul(self.d, v.y)),
        )
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { *self };
        (0..k.unsigned_abs()).fold(Self::IDENTITY, |acc, _| acc * base)
    }
}

impl std::ops::Mul for UnimodularMatrix {
    type Output = UnimodularMatrix;
    fn mul(self, o: UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            a: add(mul(self.a, o.a), mul(self.b, o.c)),
            b: add(mul(self.a, o.b), mul(self.b, o.d)),
            c: add(mul(self.c, o.a), mul(self.d, o.c)),
            d: add(mul(self.c, o.b), mul(self.d, o.d)),
        }
    }
}

/// The canonical `A ∈ SL₂(Z)` with `A·n = (0,1)`.
///
/// The first row is `(n₂, −n₁)`; the second row `(c, d)` solves `c·n₁ + d·n₂ = 1`
/// with `|c|` minimal (ties broken towards `c ≥ 0`). When `n₂ = 0` the value
/// of `c` is forced and `d = 0`.
pub fn complement_matrix(n: &LatticeVector) -> Result<UnimodularMatrix, LatticeError> {
    let n = n.primitive()?;
    let (c, d) = if n.y == 0 {
        (n.x, 0)
    } else {
        let m = n.y.abs();
        // c·n₁ ≡ 1 (mod |n₂|)
        let eg = n.x.extended_gcd(&n.y);
        let c0 = mul(eg.x, eg.gcd).mod_floor(&m);
        let c = if m == 1 {
            0
        } else if 2 * c0 > m {
            c0 - m
        } else {
            c0
        };
        (c, (1 - mul(c, n.x)) / n.y)
    };
    let a = UnimodularMatrix::new(n.y, -n.x, c, d)?;
    debug_assert_eq!(a.det(), 1);
    debug_assert_eq!(a.apply(&n), LatticeVector::new(0, 1));
    Ok(a)
}

/// One linearity cone of a [`PLMap`], swept counterclockwise from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub from: LatticeVector,
    pub to: LatticeVector,
    pub matrix: UnimodularMatrix,
}

/// A continuous piecewise-linear self-map of Z² that is linear on each cone
/// of a complete fan.
///
/// Stored canonically: breaking rays sorted by angle from (1,0), adjacent
/// cones with equal matrices merged. A linear map has no breaking rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMap {
    breaks: Vec<LatticeVector>,
    mats: Vec<UnimodularMatrix>,
}

impl PLMap {
    pub fn identity() -> Self {
        Self::linear(UnimodularMatrix::IDENTITY)
    }

    pub fn linear(m: UnimodularMatrix) -> Self {
        PLMap { breaks: Vec::new(), mats: vec![m] }
    }

    /// Builds a map from cones given by their starting rays, each paired with
    /// the matrix used from that ray counterclockwise to the next one.
    pub fn from_pieces(
        pieces: impl IntoIterator<Item = (LatticeVector, UnimodularMatrix)>,
    ) -> Result<Self, LatticeError> {
        let mut pieces: Vec<_> = pieces.into_iter().collect();
        for (r, _) in &pieces {
            r.primitive()?;
        }
        pieces.sort_by(|p, q| angle_cmp(&p.0, &q.0));
        if pieces.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(LatticeError::InvalidPieces("repeated boundary ray".into()));
        }
        if pieces.is_empty() {
            return Err(LatticeError::InvalidPieces("no pieces".into()));
        }
        let k = pieces.len();
        let sign = pieces[0].1.det();
        for i in 0..k {
            let (ray, m) = pieces[i];
            let prev = pieces[(i + k - 1) % k].1;
            if m.det() != sign {
                return Err(LatticeError::InvalidPieces("mixed orientations".into()));
            }
            if prev.apply(&ray) != m.apply(&ray) {
                return Err(LatticeError::InvalidPieces(format!(
                    "pieces disagree on boundary ray {ray}"
                )));
            }
        }
        let (breaks, mats) = pieces.into_iter().unzip();
        Ok(PLMap { breaks, mats }.merged())
    }

    fn merged(mut self) -> Self {
        loop {
            let k = self.breaks.len();
            if k == 0 {
                return self;
            }
            // ray i is redundant when the cones on either side share a matrix
            let Some(i) = (0..k).find(|&i| self.mats[(i + k - 1) % k] == self.mats[i]) else {
                return self;
            };
            if k == 1 {
                self.breaks.clear();
                self.mats.truncate(1);
                return self;
            }
            self.breaks.remove(i);
            self.mats.remove(i);
        }
    }

    pub fn is_linear(&self) -> bool {
        self.breaks.is_empty()
    }

    pub fn breaks(&self) -> &[LatticeVector] {
        &self.breaks
    }

    pub fn pieces(&self) -> Vec<Piece> {
        let k = self.breaks.len();
        (0..k)
            .map(|i| Piece {
                from: self.breaks[i],
                to: self.breaks[(i + 1) % k],
                matrix: self.mats[i],
            })
            .collect()
    }

    /// Orientation sign shared by every piece.
    pub fn orientation(&self) -> i64 {
        self.mats[0].det()
    }

    fn piece_index(&self, v: &LatticeVector) -> usize {
        let k = self.breaks.len();
        if k == 0 {
            return 0;
        }
        (0..k)
            .find(|&i| in_cone(v, &self.breaks[i], &self.breaks[(i + 1) % k]))
            .expect("cones cover the plane")
    }

    pub fn matrix_at(&self, v: &LatticeVector) -> UnimodularMatrix {
        self.mats[self.piece_index(v)]
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        self.matrix_at(v).apply(v)
    }

    pub fn inverse(&self) -> Self {
        if self.is_linear() {
            return Self::linear(self.mats[0].inverse());
        }
        let orientation = self.orientation();
        let pieces = self.pieces().into_iter().map(|p| {
            let start = if orientation > 0 { p.from } else { p.to };
            (p.matrix.apply(&start), p.matrix.inverse())
        });
        Self::from_pieces(pieces).expect("inverse of a valid PL map is valid")
    }

    /// The composite `self ∘ inner`.
    pub fn compose(&self, inner: &PLMap) -> PLMap {
        let inner_inv = inner.inverse();
        let mut rays: Vec<LatticeVector> = inner.breaks.clone();
        rays.extend(self.breaks.iter().map(|b| inner_inv.apply(b)));
        rays.sort_by(angle_cmp);
        rays.dedup();
        if rays.is_empty() {
            return Self::linear(self.mats[0] * inner.mats[0]);
        }
        let k = rays.len();
        let pieces = (0..k).map(|i| {
            let (u, w) = (rays[i], rays[(i + 1) % k]);
            let sample = cone_interior(&u, &w);
            let m = self.matrix_at(&inner.apply(&sample)) * inner.matrix_at(&sample);
            (u, m)
        });
        Self::from_pieces(pieces).expect("composite of valid PL maps is valid")
    }
}

/// A lattice vector strictly inside the counterclockwise cone from `u` to `w`
/// (the whole plane minus `u` when `u == w`).
fn cone_interior(u: &LatticeVector, w: &LatticeVector) -> LatticeVector {
    let d = u.det(w);
    if u == w {
        -*u
    } else if d > 0 {
        *u + *w
    } else if d == 0 {
        u.perp()
    } else {
        -(*u + *w)
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_linear() {
            return write!(f, "linear {}", self.mats[0]);
        }
        for (i, p) in self.pieces().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "cone {} -> {}: {}", p.from, p.to, p.matrix)?;
        }
        Ok(())
    }
}
