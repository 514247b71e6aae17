//! Exact sparse bivariate polynomials and rational functions over Q.
//!
//! [`RatFunc2`] values are always kept in canonical form: numerator and
//! denominator coprime, denominator monic with respect to graded-lex order.
//! Structural equality of canonical forms is therefore equality of rational
//! functions, which is what the word-problem oracle in [`crate::birmap`]
//! relies on.
//!
//! Text form (produced by `Display`, accepted by `FromStr`):
//!
//! ```text
//! ratfunc  := poly | num "/" den
//! poly     := "0" | term (" + " term)*          terms in decreasing graded-lex order
//! term     := coeff | coeff "*" mono | mono
//! coeff    := digits | "(" ["-"] digits ["/" digits] ")"
//! mono     := var ["^" digits] ["*" var ["^" digits]]
//! ```
//!
//! `num` is parenthesized when it has more than one term and `den` whenever it
//! is not a bare power of a single variable. The parser accepts any
//! expression built from integers, `x`, `y`, `+ - * /`, parentheses and
//! integer powers `^k` (negative `k` allowed), so the printed form always
//! parses back to the same value.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

mod gcd;
mod jacobian;

pub(crate) use jacobian::dlog_jacobian_sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("substituted denominator vanishes identically")]
    IdenticallySingular,
    #[error("pole at ({}, {})", .0.0, .0.1)]
    PoleAtPoint(Box<(BigRational, BigRational)>),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Exponent pair `x^i y^j`, ordered graded-lexicographically (x > y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Monomial { x, y }
    }

    pub fn degree(&self) -> u32 {
        self.x + self.y
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
            .then(self.y.cmp(&other.y))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A polynomial in `x, y` with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn x() -> Self {
        Self::term(Monomial::new(1, 0), BigRational::one())
    }

    pub fn y() -> Self {
        Self::term(Monomial::new(0, 1), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly2 { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly2::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.terms.len() {
            1 => self.terms.get(&Monomial::ONE),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self, var: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| match var {
                Var::X => m.x,
                Var::Y => m.y,
            })
            .max()
            .unwrap_or(0)
    }

    fn min_exponents(&self) -> (u32, u32) {
        let mx = self.terms.keys().map(|m| m.x).min().unwrap_or(0);
        let my = self.terms.keys().map(|m| m.y).min().unwrap_or(0);
        (mx, my)
    }

    fn shift_down(&self, dx: u32, dy: u32) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.x - dx, m.y - dy), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly2 {
        let mut acc = Poly2::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn evaluate(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut xs = vec![BigRational::one()];
        let mut ys = vec![BigRational::one()];
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            while xs.len() <= m.x as usize {
                let next = xs.last().unwrap() * x;
                xs.push(next);
            }
            while ys.len() <= m.y as usize {
                let next = ys.last().unwrap() * y;
                ys.push(next);
            }
            acc += c * &xs[m.x as usize] * &ys[m.y as usize];
        }
        acc
    }

    pub fn derivative(&self, var: Var) -> Poly2 {
        Poly2::from_terms(self.terms.iter().filter_map(|(m, c)| match var {
            Var::X if m.x > 0 => Some((Monomial::new(m.x - 1, m.y), c * rat(m.x as i64))),
            Var::Y if m.y > 0 => Some((Monomial::new(m.x, m.y - 1), c * rat(m.y as i64))),
            _ => None,
        }))
    }
}

impl std::ops::Add for &Poly2 {
    type Output = Poly2;
    fn add(self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }
}

impl std::ops::Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }
}

impl std::ops::Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl std::ops::Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, o: &Poly2) -> Poly2 {
        if let Some(p) = small_mul(self, o) {
            return p;
        }
        if let Some(p) = integer_mul(self, o) {
            return p;
        }
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = Monomial::new(m1.x + m2.x, m1.y + m2.y);
                *acc.entry(m).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly2 { terms: acc }
    }
}

fn small_terms(p: &Poly2) -> Option<Vec<(Monomial, i64)>> {
    p.terms
        .iter()
        .map(|(m, c)| {
            if c.is_integer() {
                i64::try_from(c.numer()).ok().map(|k| (*m, k))
            } else {
                None
            }
        })
        .collect()
}

/// Dense accumulator over the bounding box of all product exponents.
struct Grid {
    x0: u32,
    y0: u32,
    width: usize,
    len: usize,
}

impl Grid {
    /// `None` when the box is too large to allocate densely.
    fn new(a: &Poly2, b: &Poly2) -> Option<Grid> {
        let (ax, ay) = a.min_exponents();
        let (bx, by) = b.min_exponents();
        let (x0, y0) = (ax + bx, ay + by);
        let x1 = a.degree(Var::X) + b.degree(Var::X);
        let y1 = a.degree(Var::Y) + b.degree(Var::Y);
        let width = (y1 - y0 + 1) as usize;
        let len = (x1 - x0 + 1) as usize * width;
        let terms = a.len() * b.len();
        (len <= 4 * terms + 1024).then_some(Grid { x0, y0, width, len })
    }

    fn index(&self, m1: &Monomial, m2: &Monomial) -> usize {
        (m1.x + m2.x - self.x0) as usize * self.width + (m1.y + m2.y - self.y0) as usize
    }

    fn monomial(&self, i: usize) -> Monomial {
        Monomial::new(self.x0 + (i / self.width) as u32, self.y0 + (i % self.width) as u32)
    }
}

/// Product over machine integers when every coefficient is a small integer;
/// `None` on non-integer input or overflow.
fn small_mul(a: &Poly2, b: &Poly2) -> Option<Poly2> {
    let (ta, tb) = (small_terms(a)?, small_terms(b)?);
    if let Some(grid) = Grid::new(a, b) {
        let mut acc = vec![0i128; grid.len];
        for (m1, c1) in &ta {
            for (m2, c2) in &tb {
                let slot = &mut acc[grid.index(m1, m2)];
                *slot = slot.checked_add(*c1 as i128 * *c2 as i128)?;
            }
        }
        return Some(Poly2 {
            terms: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(|(i, c)| (grid.monomial(i), BigRational::from_integer(BigInt::from(c))))
                .collect(),
        });
    }
    let mut acc: std::collections::HashMap<Monomial, i128> = std::collections::HashMap::new();
    for (m1, c1) in &ta {
        for (m2, c2) in &tb {
            let m = Monomial::new(m1.x + m2.x, m1.y + m2.y);
            let slot = acc.entry(m).or_insert(0);
            *slot = slot.checked_add(*c1 as i128 * *c2 as i128)?;
        }
    }
    Some(Poly2 {
        terms: acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (m, BigRational::from_integer(BigInt::from(c))))
            .collect(),
    })
}

/// Product over big integers when every coefficient is integral; avoids the
/// per-operation normalization of rational arithmetic.
fn integer_mul(a: &Poly2, b: &Poly2) -> Option<Poly2> {
    if !a.terms.values().chain(b.terms.values()).all(|c| c.is_integer()) {
        return None;
    }
    let finish = |it: Box<dyn Iterator<Item = (Monomial, BigInt)> + '_>| Poly2 {
        terms: it.filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m, BigRational::from_integer(c))).collect(),
    };
    if let Some(grid) = Grid::new(a, b) {
        let mut acc = vec![BigInt::zero(); grid.len];
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                acc[grid.index(m1, m2)] += c1.numer() * c2.numer();
            }
        }
        return Some(finish(Box::new(acc.into_iter().enumerate().map(|(i, c)| (grid.monomial(i), c)))));
    }
    let mut acc: std::collections::HashMap<Monomial, BigInt> = std::collections::HashMap::new();
    for (m1, c1) in &a.terms {
        for (m2, c2) in &b.terms {
            let m = Monomial::new(m1.x + m2.x, m1.y + m2.y);
            *acc.entry(m).or_default() += c1.numer() * c2.numer();
        }
    }
    Some(finish(Box::new(acc.into_iter())))
}

/// `num/den` in lowest terms with a graded-lex monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc2 {
    num: Poly2,
    den: Poly2,
}

impl RatFunc2 {
    pub fn zero() -> Self {
        RatFunc2 { num: Poly2::zero(), den: Poly2::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly2::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Poly2::x())
    }

    pub fn y() -> Self {
        Self::from_poly(Poly2::y())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly2::constant(c))
    }

    pub fn from_poly(p: Poly2) -> Self {
        RatFunc2 { num: p, den: Poly2::one() }
    }

    /// Reduces `n/d` to canonical form.
    pub fn normalize(n: Poly2, d: Poly2) -> Result<Self, PolyError> {
        if d.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        if n.is_zero() {
            return Ok(Self::zero());
        }
        let (nx, ny) = n.min_exponents();
        let (dx, dy) = d.min_exponents();
        let (cx, cy) = (nx.min(dx), ny.min(dy));
        let (mut n, mut d) = (n.shift_down(cx, cy), d.shift_down(cx, cy));
        // a single-term side leaves only a monomial gcd, already removed
        if n.len() > 1 && d.len() > 1 {
            let (n2, d2) = gcd::cancel(&n, &d);
            n = n2;
            d = d2;
        }
        let lc = d.leading().expect("nonzero").1.clone();
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Ok(RatFunc2 { num: n, den: d })
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.num
    }

    pub fn denominator(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        if self.num.is_zero() {
            return None;
        }
        self.den.as_constant().and(self.num.as_constant())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn recip(&self) -> Result<Self, PolyError> {
        if self.num.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        // already coprime; only the scaling needs fixing
        let lc = self.num.leading().unwrap().1.recip();
        Ok(RatFunc2 { num: self.den.scale(&lc), den: self.num.scale(&lc) })
    }

    pub fn powi(&self, k: i64) -> Result<Self, PolyError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let k = k.unsigned_abs() as u32;
        // coprime parts stay coprime under powers
        Ok(RatFunc2 { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn evaluate(&self, x: &BigRational, y: &BigRational) -> Result<BigRational, PolyError> {
        let d = self.den.evaluate(x, y);
        if d.is_zero() {
            return Err(PolyError::PoleAtPoint(Box::new((x.clone(), y.clone()))));
        }
        Ok(self.num.evaluate(x, y) / d)
    }

    pub fn partial_derivative(&self, var: Var) -> Self {
        let n = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        let d = &self.den * &self.den;
        Self::normalize(n, d).expect("nonzero denominator")
    }

    /// `self(f, g)`.
    pub fn substitute(&self, f: &RatFunc2, g: &RatFunc2) -> Result<Self, PolyError> {
        if self.num.is_zero() {
            return Ok(Self::zero());
        }
        let (nx, ny) = (self.num.degree(Var::X), self.num.degree(Var::Y));
        let (dx, dy) = (self.den.degree(Var::X), self.den.degree(Var::Y));
        let powers = |p: &Poly2, k: u32| -> Vec<Poly2> {
            let mut v = vec![Poly2::one()];
            for _ in 0..k {
                let next = v.last().unwrap() * p;
                v.push(next);
            }
            v
        };
        let (fn_, fd) = (powers(&f.num, nx.max(dx)), powers(&f.den, nx.max(dx)));
        let (gn, gd) = (powers(&g.num, ny.max(dy)), powers(&g.den, ny.max(dy)));
        // p(f, g) · f.den^kx · g.den^ky as a polynomial
        let homogenize = |p: &Poly2, kx: u32, ky: u32| -> Poly2 {
            let mut acc = Poly2::zero();
            for (m, c) in p.terms() {
                let (i, j) = (m.x as usize, m.y as usize);
                let xpart = &fn_[i] * &fd[kx as usize - i];
                let ypart = &gn[j] * &gd[ky as usize - j];
                acc = &acc + &(&xpart * &ypart).scale(c);
            }
            acc
        };
        let d = homogenize(&self.den, dx, dy);
        if d.is_zero() {
            return Err(PolyError::IdenticallySingular);
        }
        let base = Self::normalize(homogenize(&self.num, nx, ny), d)?;
        // restore the difference of the two clearing denominators
        let fix_x = Self::from_poly(f.den.clone()).powi(dx as i64 - nx as i64)?;
        let fix_y = Self::from_poly(g.den.clone()).powi(dy as i64 - ny as i64)?;
        Ok(&(&base * &fix_x) * &fix_y)
    }

    fn add_sub(&self, o: &RatFunc2, sign: bool) -> RatFunc2 {
        let combine = |a: &Poly2, b: &Poly2| if sign { a + b } else { a - b };
        // n/d ± m is coprime whenever n/d is
        if o.den.is_one() {
            return Self::from_coprime(combine(&self.num, &(&o.num * &self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return Self::from_coprime(combine(&(&self.num * &o.den), &o.num), o.den.clone());
        }
        if self.den == o.den {
            return Self::normalize(combine(&self.num, &o.num), self.den.clone()).unwrap();
        }
        let n = combine(&(&self.num * &o.den), &(&o.num * &self.den));
        Self::normalize(n, &self.den * &o.den).unwrap()
    }

    fn mul_impl(&self, o: &RatFunc2) -> RatFunc2 {
        // cross-cancel so the products are already coprime
        let (a, d) = cancel_pair(&self.num, &o.den);
        let (c, b) = cancel_pair(&o.num, &self.den);
        Self::from_coprime(&a * &c, &b * &d)
    }

    /// Canonical scaling of a fraction already known to be in lowest terms.
    fn from_coprime(n: Poly2, d: Poly2) -> RatFunc2 {
        if n.is_zero() {
            return Self::zero();
        }
        let lc = d.leading().expect("nonzero denominator").1.clone();
        if lc.is_one() {
            return RatFunc2 { num: n, den: d };
        }
        let inv = lc.recip();
        RatFunc2 { num: n.scale(&inv), den: d.scale(&inv) }
    }

    pub fn checked_div(&self, o: &RatFunc2) -> Result<RatFunc2, PolyError> {
        Ok(self.mul_impl(&o.recip()?))
    }
}

fn cancel_pair(n: &Poly2, d: &Poly2) -> (Poly2, Poly2) {
    if n.is_zero() {
        return (Poly2::zero(), Poly2::one());
    }
    let r = RatFunc2::normalize(n.clone(), d.clone()).unwrap();
    (r.num, r.den)
}

impl std::ops::Add for &RatFunc2 {
    type Output = RatFunc2;
    fn add(self, o: &RatFunc2) -> RatFunc2 {
        self.add_sub(o, true)
    }
}

impl std::ops::Sub for &RatFunc2 {
    type Output = RatFunc2;
    fn sub(self, o: &RatFunc2) -> RatFunc2 {
        self.add_sub(o, false)
    }
}

impl std::ops::Mul for &RatFunc2 {
    type Output = RatFunc2;
    fn mul(self, o: &RatFunc2) -> RatFunc2 {
        self.mul_impl(o)
    }
}

impl std::ops::Neg for &RatFunc2 {
    type Output = RatFunc2;
    fn neg(self) -> RatFunc2 {
        RatFunc2 { num: -&self.num, den: self.den.clone() }
    }
}

fn fmt_coeff(c: &BigRational) -> String {
    if c.is_integer() && c.is_positive() {
        c.to_integer().to_string()
    } else if c.is_integer() {
        format!("({})", c.to_integer())
    } else {
        format!("({}/{})", c.numer(), c.denom())
    }
}

fn fmt_mono(m: &Monomial) -> String {
    let var = |name: &str, e: u32| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    [var("x", m.x), var("y", m.y)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                if *m == Monomial::ONE {
                    fmt_coeff(c)
                } else if c.is_one() {
                    fmt_mono(m)
                } else {
                    format!("{}*{}", fmt_coeff(c), fmt_mono(m))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for RatFunc2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let bare_power = self.den.len() == 1 && {
            let (m, c) = self.den.leading().unwrap();
            c.is_one() && (m.x == 0 || m.y == 0)
        };
        if bare_power {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl FromStr for RatFunc2 {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let mut p = ExprParser { src: s.as_bytes(), pos: 0 };
        let r = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(r)
    }
}

impl FromStr for Poly2 {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let r: RatFunc2 = s.parse()?;
        if !r.is_polynomial() {
            return Err(PolyError::Parse { pos: 0, msg: "not a polynomial".into() });
        }
        Ok(r.num)
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, msg: &str) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc2, PolyError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc2, PolyError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|_| PolyError::Parse {
                    pos: at,
                    msg: "division by zero".into(),
                })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc2, PolyError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<RatFunc2, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let k = self.integer()?;
            let k: i64 = i64::try_from(k).map_err(|_| self.error("exponent too large"))?;
            return base.powi(if neg { -k } else { k }).map_err(|_| PolyError::Parse {
                pos: at,
                msg: "negative power of zero".into(),
            });
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn atom(&mut self) -> Result<RatFunc2, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(RatFunc2::x())
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(RatFunc2::y())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatFunc2::constant(BigRational::from_integer(n)))
            }
            _ => Err(self.error("expected number, variable or '('")),
        }
    }
}
